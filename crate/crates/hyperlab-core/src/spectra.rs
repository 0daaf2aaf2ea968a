//! Eigenvalues of points with respect to a hyperbolic form, and the scalar
//! functionals built on them: p-norms, trace, numerical rank, and position
//! relative to the closed hyperbolicity cone.
//!
//! The eigenvalues of x are the roots of t ↦ h(te − x); the factorization
//! h(te − x) = h(e)·∏(t − λᵢ(x)) defines them uniquely (with multiplicity).
//! Families with closed forms use them (matrix eigenvalues for the
//! determinant family, coordinate ratios for products, the explicit quadratic
//! for Lorentz forms); everything else runs through polynomial interpolation
//! of the restriction followed by a real-rootedness check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{unpack_symmetric, FamilyKind, HyperbolicForm, PointVec};
use crate::restriction::raw_restriction;

/// Roots of the generic restriction route may carry spurious imaginary parts
/// from rounding; they are accepted as real while |Im λ| ≤ this × (1 + |λ|).
pub const IMAG_REL_TOL: f64 = 1e-7;

/// Default relative tolerance for rank and cone decisions.
pub const RANK_REL_TOL: f64 = 1e-8;

/// The univariate restriction p(t) = h(te − x), coefficients lowest degree
/// first; p has degree exactly deg h with leading coefficient h(e).
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateRestriction {
    coefficients: Vec<f64>,
}

impl UnivariateRestriction {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        crate::poly::polyval(&self.coefficients, t)
    }
}

/// Eigenvalues of a point, sorted descending: values()[0] = λ_max.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

/// Where a point sits relative to the closed cone Λ₊ = {λ_min ≥ 0}, decided
/// at a relative tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConePosition {
    Interior,
    Boundary,
    Outside,
}

/// Numerical rank decision: how many eigenvalues clear the absolute
/// threshold that a relative tolerance induced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// The absolute threshold actually compared against: tol·max(1, ‖x‖_h).
    pub tolerance_used: f64,
}

impl Spectrum {
    /// Build from unsorted eigenvalues; entries must be finite.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "a spectrum needs at least one eigenvalue".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("eigenvalues must be finite".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.values[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// ‖x‖_h = max |λᵢ|.
    pub fn spectral_norm(&self) -> f64 {
        self.lambda_max().abs().max(self.lambda_min().abs())
    }

    /// ‖x‖_{h,p} = (Σ|λᵢ|^p)^{1/p} for p ∈ [1, ∞]; p = ∞ is the spectral
    /// norm. The largest magnitude is factored out before powering so large
    /// p neither overflows nor underflows.
    pub fn hp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "p-norm exponent must satisfy p ≥ 1, got {p}"
            )));
        }
        let m = self.spectral_norm();
        if p.is_infinite() || m == 0.0 {
            return Ok(m);
        }
        let sum: f64 = self.values.iter().map(|v| (v.abs() / m).powf(p)).sum();
        Ok(m * sum.powf(1.0 / p))
    }

    /// tr x = Σ λᵢ.
    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Count eigenvalues with |λᵢ| > tol·max(1, ‖x‖_h).
    pub fn rank(&self, tol: f64) -> Result<RankReport> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidArgument("rank tolerance must be ≥ 0".into()));
        }
        let threshold = tol * self.scale();
        Ok(RankReport {
            rank: self.values.iter().filter(|v| v.abs() > threshold).count(),
            tolerance_used: threshold,
        })
    }

    /// Interior iff λ_min > tol·max(1, ‖x‖_h); outside iff λ_min is below the
    /// negated threshold; boundary in the band between.
    pub fn cone_position(&self, tol: f64) -> Result<ConePosition> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidArgument("cone tolerance must be ≥ 0".into()));
        }
        let threshold = tol * self.scale();
        let lo = self.lambda_min();
        Ok(if lo > threshold {
            ConePosition::Interior
        } else if lo < -threshold {
            ConePosition::Outside
        } else {
            ConePosition::Boundary
        })
    }

    /// Elementary symmetric function e_k of the eigenvalues (k = 0 gives 1),
    /// by the stable coefficient recurrence.
    pub fn elementary_symmetric(&self, k: usize) -> f64 {
        if k > self.values.len() {
            return 0.0;
        }
        let mut b = vec![0.0; k + 1];
        b[0] = 1.0;
        for &v in &self.values {
            for j in (1..=k.min(b.len() - 1)).rev() {
                b[j] += b[j - 1] * v;
            }
        }
        b[k]
    }

    fn scale(&self) -> f64 {
        self.spectral_norm().max(1.0)
    }
}

impl Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

/// Coefficients of the univariate restriction h(te − x).
pub fn restrict(form: &HyperbolicForm, x: &PointVec) -> Result<UnivariateRestriction> {
    let raw = raw_restriction(form, x)?;
    Ok(UnivariateRestriction {
        coefficients: raw.coeffs,
    })
}

/// Eigenvalues of x, via the family's closed form when one exists.
pub fn eigenvalues(form: &HyperbolicForm, x: &PointVec) -> Result<Spectrum> {
    form.check_dim(x, "point")?;
    match form.kind() {
        FamilyKind::DeterminantSymmetric { d } => {
            let full = unpack_symmetric(x.as_slice(), *d);
            let mat = nalgebra::DMatrix::from_row_slice(*d, *d, &full);
            let eigs = mat.symmetric_eigenvalues();
            Spectrum::new(eigs.iter().copied().collect())
        }
        FamilyKind::Product { .. } => {
            let e = form.direction();
            Spectrum::new(
                x.as_slice()
                    .iter()
                    .zip(e.as_slice())
                    .map(|(&xi, &ei)| xi / ei)
                    .collect(),
            )
        }
        FamilyKind::LorentzQuadratic { .. } => {
            let r = x.as_slice()[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            Spectrum::new(vec![x[0] + r, x[0] - r])
        }
        FamilyKind::ElementarySymmetric { .. } | FamilyKind::DenseHomogeneous { .. } => {
            eigenvalues_via_restriction(form, x)
        }
    }
}

/// Eigenvalues through the generic interpolation + root-finding route,
/// regardless of family. Roots with relative imaginary part above
/// [`IMAG_REL_TOL`] reject the point as not hyperbolic along this line.
pub fn eigenvalues_via_restriction(form: &HyperbolicForm, x: &PointVec) -> Result<Spectrum> {
    let raw = raw_restriction(form, x)?;
    let mut values = Vec::with_capacity(raw.roots.len());
    for z in &raw.roots {
        let bound = IMAG_REL_TOL * (1.0 + z.norm());
        if z.im.abs() > bound {
            return Err(Error::NotHyperbolicAtPoint {
                root: *z,
                im_abs: z.im.abs(),
                tol: bound,
            });
        }
        values.push(z.re);
    }
    Spectrum::new(values)
}

/// Normalized derivative coefficients s₀,…,s_d with
/// sᵢ = D_e^{d−i} h(x) / ((d−i)!·h(e)); these equal the elementary symmetric
/// functions of the eigenvalues, s₀ = 1 and s_d = h(x)/h(e).
pub fn symmetric_coefficients(form: &HyperbolicForm, x: &PointVec) -> Result<Vec<f64>> {
    form.check_dim(x, "point")?;
    let d = form.degree();
    let he = form.direction_value();
    let e = form.direction();
    let mut out = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let k = d - i;
        if k == 0 {
            out.push(form.evaluate(x)? / he);
        } else {
            let dirs = vec![e.clone(); k];
            let deriv = form.directional_derivative(x, &dirs)?;
            let k_factorial: f64 = (1..=k).map(|v| v as f64).product();
            out.push(deriv / (k_factorial * he));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Term;

    fn pv(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn product_eigenvalues_sorted_descending() {
        let f = HyperbolicForm::product(3).unwrap();
        let s = eigenvalues(&f, &pv(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn lorentz_eigenvalues_closed_form() {
        let f = HyperbolicForm::lorentz(3).unwrap();
        let s = eigenvalues(&f, &pv(&[0.0, 3.0, 4.0])).unwrap();
        assert_eq!(s.values(), &[5.0, -5.0]);
    }

    #[test]
    fn determinant_eigenvalues_are_matrix_eigenvalues() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let f = HyperbolicForm::determinant_symmetric(2).unwrap();
        let s = eigenvalues(&f, &pv(&[2.0, 1.0, 2.0])).unwrap();
        assert!((s.values()[0] - 3.0).abs() < 1e-12);
        assert!((s.values()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_route_matches_product_closed_form() {
        let f = HyperbolicForm::product(4).unwrap();
        let x = pv(&[0.5, -2.0, 3.25, 1.0]);
        let fast = eigenvalues(&f, &x).unwrap();
        let generic = eigenvalues_via_restriction(&f, &x).unwrap();
        for (a, b) in fast.values().iter().zip(generic.values()) {
            assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn norms_trace_rank_on_known_spectrum() {
        let s = Spectrum::new(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.spectral_norm(), 3.0);
        assert_eq!(s.trace(), 6.0);
        assert!((s.hp_norm(1.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((s.hp_norm(2.0).unwrap() - 14.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.hp_norm(f64::INFINITY).unwrap(), 3.0);
        assert!(s.hp_norm(0.5).is_err());
        let r = s.rank(RANK_REL_TOL).unwrap();
        assert_eq!(r.rank, 3);
        assert_eq!(
            s.cone_position(RANK_REL_TOL).unwrap(),
            ConePosition::Interior
        );
    }

    #[test]
    fn boundary_point_has_deficient_rank() {
        let f = HyperbolicForm::lorentz(3).unwrap();
        let s = eigenvalues(&f, &pv(&[5.0, 3.0, 4.0])).unwrap();
        assert_eq!(s.values(), &[10.0, 0.0]);
        assert_eq!(s.rank(RANK_REL_TOL).unwrap().rank, 1);
        assert_eq!(
            s.cone_position(RANK_REL_TOL).unwrap(),
            ConePosition::Boundary
        );
        let outside = eigenvalues(&f, &pv(&[1.0, 3.0, 4.0])).unwrap();
        assert_eq!(
            outside.cone_position(RANK_REL_TOL).unwrap(),
            ConePosition::Outside
        );
    }

    #[test]
    fn symmetric_coefficients_match_vieta() {
        let f = HyperbolicForm::product(3).unwrap();
        let s = symmetric_coefficients(&f, &pv(&[1.0, 2.0, 3.0])).unwrap();
        let expect = [1.0, 6.0, 11.0, 6.0];
        for (got, want) in s.iter().zip(expect) {
            assert!((got - want).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn symmetric_coefficients_equal_eigenvalue_elementaries() {
        let f = HyperbolicForm::determinant_symmetric(3).unwrap();
        let x = pv(&[1.5, 0.25, -0.5, 1.0, 0.75, 2.0]);
        let coeffs = symmetric_coefficients(&f, &x).unwrap();
        let spec = eigenvalues(&f, &x).unwrap();
        for (i, c) in coeffs.iter().enumerate() {
            let e = spec.elementary_symmetric(i);
            assert!((c - e).abs() <= 1e-8 * (1.0 + e.abs()), "i={i}: {c} vs {e}");
        }
    }

    #[test]
    fn non_hyperbolic_form_is_rejected_by_generic_route() {
        // z⁴ − x⁴ − y⁴ is not hyperbolic in direction (0,0,1): along
        // x = (1,1,0) the restriction t⁴ = 2 has two imaginary roots.
        let terms = vec![
            Term {
                exp: vec![4, 0, 0],
                coef: -1.0,
            },
            Term {
                exp: vec![0, 4, 0],
                coef: -1.0,
            },
            Term {
                exp: vec![0, 0, 4],
                coef: 1.0,
            },
        ];
        let f = HyperbolicForm::dense(3, 4, terms, pv(&[0.0, 0.0, 1.0])).unwrap();
        let err = eigenvalues(&f, &pv(&[1.0, 1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NotHyperbolicAtPoint { .. }), "{err}");
    }

    #[test]
    fn hyperbolicity_probe_flags_the_same_form() {
        let terms = vec![
            Term {
                exp: vec![4, 0, 0],
                coef: -1.0,
            },
            Term {
                exp: vec![0, 4, 0],
                coef: -1.0,
            },
            Term {
                exp: vec![0, 0, 4],
                coef: 1.0,
            },
        ];
        let bad = HyperbolicForm::dense(3, 4, terms, pv(&[0.0, 0.0, 1.0])).unwrap();
        let report = bad.check_hyperbolicity(64, 11, 1e-6).unwrap();
        assert!(!report.passed);
        assert!(report.max_imaginary_residual > 1e-3);
        assert!(report.worst_line.is_some());

        let good = HyperbolicForm::elementary_symmetric(5, 3).unwrap();
        let report = good.check_hyperbolicity(64, 11, 1e-6).unwrap();
        assert!(report.passed, "residual {}", report.max_imaginary_residual);
    }

    #[test]
    fn restriction_api_exposes_coefficients() {
        let f = HyperbolicForm::product(3).unwrap();
        let r = restrict(&f, &pv(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.degree(), 3);
        assert!((r.evaluate(0.0) - -6.0).abs() < 1e-9);
        assert!((r.evaluate(2.0) - 0.0).abs() < 1e-9);
    }
}
