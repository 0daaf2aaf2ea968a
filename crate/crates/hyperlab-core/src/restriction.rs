//! Restriction of a form to a line through its hyperbolicity direction.
//!
//! For a point x the univariate polynomial p(t) = h(te − x) has degree
//! exactly d with leading coefficient h(e); its roots are the eigenvalues of
//! x. The coefficients are recovered by exact polynomial interpolation of
//! t ↦ h(te − x) at d+1 Chebyshev nodes on [−R, R], with the radius R doubled
//! until every root's magnitude is comfortably inside the node interval
//! (|λ| ≤ 0.8·R) so the interpolation is well conditioned near the roots.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{HyperbolicForm, PointVec};
use crate::poly;

/// Maximum number of radius doublings before giving up. Starting from
/// R = 1 + ‖x‖₂ this covers root magnitudes up to ~256·(1 + ‖x‖₂); roots
/// beyond that indicate inputs far outside the numeric design range.
const MAX_RADIUS_DOUBLINGS: u32 = 8;

/// Relative agreement required between the interpolated leading coefficient
/// and h(e) before the restriction is accepted.
const LEADING_COEFF_REL_TOL: f64 = 1e-9;

/// Fraction of the node radius the largest root magnitude may occupy.
const ROOT_RADIUS_FRACTION: f64 = 0.8;

/// Coefficients and roots of t ↦ h(te − x), lowest degree first.
#[derive(Clone, Debug)]
pub(crate) struct RawRestriction {
    /// coeffs[j] multiplies t^j; coeffs[d] is snapped to exactly h(e).
    pub coeffs: Vec<f64>,
    /// All d roots (complex; realness is the caller's concern).
    pub roots: Vec<Complex64>,
    /// Final node radius after adaptation.
    #[allow(dead_code)]
    pub radius: f64,
}

/// Interpolate h(te − x) and solve for its roots, adapting the node radius.
pub(crate) fn raw_restriction(form: &HyperbolicForm, x: &PointVec) -> Result<RawRestriction> {
    form.check_dim(x, "restriction point")?;
    let d = form.degree();
    let he = form.direction_value();
    let e = form.direction();

    let mut radius = 1.0 + x.euclidean_norm();
    let mut point = vec![0.0; form.dimension()];
    for attempt in 0..=MAX_RADIUS_DOUBLINGS {
        // Chebyshev nodes of the first kind on [−R, R].
        let n = d + 1;
        let nodes: Vec<f64> = (0..n)
            .map(|j| radius * (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64).cos())
            .collect();
        let values: Vec<f64> = nodes
            .iter()
            .map(|&t| {
                for (p, (&ei, &xi)) in point.iter_mut().zip(e.as_slice().iter().zip(x.as_slice())) {
                    *p = t * ei - xi;
                }
                form.evaluate_slice(&point)
            })
            .collect();
        let mut coeffs = poly::interpolate(&nodes, &values);

        // The leading coefficient must reproduce h(e); large disagreement
        // means the interpolation is poorly conditioned at this radius.
        let lead_err = (coeffs[d] - he).abs();
        if lead_err > LEADING_COEFF_REL_TOL * he.abs() {
            if attempt == MAX_RADIUS_DOUBLINGS {
                return Err(Error::NumericalFailure {
                    context: format!(
                        "restriction leading coefficient drifted from h(e) at radius {radius:.3e}"
                    ),
                    residual: lead_err / he.abs(),
                });
            }
            radius *= 2.0;
            continue;
        }
        coeffs[d] = he;

        let mut roots = poly::roots(&coeffs)?;
        let max_mag = roots.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if max_mag <= ROOT_RADIUS_FRACTION * radius {
            polish_real_roots(form, x, &coeffs, &mut roots);
            return Ok(RawRestriction {
                coeffs,
                roots,
                radius,
            });
        }
        if attempt == MAX_RADIUS_DOUBLINGS {
            return Err(Error::NumericalFailure {
                context: format!(
                    "restriction roots kept escaping the node interval (|λ|max = {max_mag:.3e} \
                     at radius {radius:.3e})"
                ),
                residual: max_mag / radius,
            });
        }
        radius *= 2.0;
    }
    unreachable!("loop returns or errors on the final attempt");
}

/// Newton steps applied per near-real root against the exact evaluation.
const POLISH_MAX_STEPS: usize = 8;

/// Refine near-real roots by Newton iteration on the exact evaluation
/// t ↦ h(te − x).
///
/// The interpolated coefficients carry absolute rounding on the order of
/// eps·max|p| over the node interval; near a pair of close simple roots that
/// error is amplified by 1/|p′| and can cost six or more digits. The direct
/// evaluation's error is proportional to |p(t)| itself, which vanishes at a
/// root, so a few guarded Newton steps using it recover machine-level roots.
/// Each step is capped at a quarter of the distance to the nearest other root
/// (a root never hops into a neighbor's basin) and must shrink the exact
/// residual, otherwise the previous iterate is kept. Roots with a visibly
/// nonzero imaginary part are left untouched: they are the evidence the
/// hyperbolicity check runs on.
fn polish_real_roots(form: &HyperbolicForm, x: &PointVec, coeffs: &[f64], roots: &mut [Complex64]) {
    let d = coeffs.len() - 1;
    let e = form.direction();
    let mut point = vec![0.0; form.dimension()];
    let mut eval = |t: f64| -> f64 {
        for (p, (&ei, &xi)) in point.iter_mut().zip(e.as_slice().iter().zip(x.as_slice())) {
            *p = t * ei - xi;
        }
        form.evaluate_slice(&point)
    };
    let deriv: Vec<f64> = (1..=d).map(|j| coeffs[j] * j as f64).collect();
    let originals = roots.to_vec();
    for (i, slot) in roots.iter_mut().enumerate() {
        let z = originals[i];
        if z.im.abs() > crate::spectra::IMAG_REL_TOL * (1.0 + z.norm()) {
            continue;
        }
        let mut nearest = f64::INFINITY;
        for (j, w) in originals.iter().enumerate() {
            if j != i {
                nearest = nearest.min((z - w).norm());
            }
        }
        let cap = 0.25 * nearest;
        if cap <= 0.0 {
            // A coincident estimate (multiple root): Newton has no safe move.
            continue;
        }
        let mut t = z.re;
        let mut ft = eval(t);
        for _ in 0..POLISH_MAX_STEPS {
            let dp = poly::polyval(&deriv, t);
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let mut step = ft / dp;
            if !step.is_finite() {
                break;
            }
            if cap.is_finite() && step.abs() > cap {
                step = cap.copysign(step);
            }
            let t_next = t - step;
            let f_next = eval(t_next);
            if f_next.abs() >= ft.abs() {
                break;
            }
            t = t_next;
            ft = f_next;
            if step.abs() <= f64::EPSILON * (1.0 + t.abs()) {
                break;
            }
        }
        slot.re = t;
    }
}
