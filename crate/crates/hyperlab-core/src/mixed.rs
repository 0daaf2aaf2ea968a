//! Mixed hyperbolic polynomials and the δ(ε, n, r) bound function.
//!
//! For cone vectors v₁,…,vₙ the mixed polynomial ∏ᵢ(1 − yᵢ·D_{vᵢ})h,
//! evaluated at x = t·e and every yᵢ = 1, expands by inclusion–exclusion to
//!
//!   p(t) = Σ_{S⊆[n]} (−1)^{|S|} (D_{v_S} h)(t·e),
//!
//! a real-rooted univariate polynomial whose largest root dominates
//! λ_max(v₁+⋯+vₙ). The δ function is the constrained infimum
//! inf (εμ + (1−1/n)δ)/(1 + (μ−1)/n) over the feasible pairs (δ, μ); its
//! n = r = ∞ value is the closed form (1+√ε)².

use crate::error::{Error, Result};
use crate::forms::{HyperbolicForm, PointVec};
use crate::parallel::map_segments;
use crate::poly;
use crate::spectra::{eigenvalues, ConePosition, RANK_REL_TOL};

/// Largest n for which the 2ⁿ-subset expansion is allowed.
pub const MIXED_BUDGET: usize = 12;

/// Per-axis resolution of the coarse (δ, μ) grid scan.
pub const DELTA_GRID: usize = 200;
/// Search box for both δ and μ (log-spaced).
pub const DELTA_BOX: (f64, f64) = (1e-3, 1e3);
/// Relative step at which coordinate-descent refinement stops.
pub const DELTA_REFINE_REL: f64 = 1e-7;

/// The univariate polynomial t ↦ Σ_{S⊆[n]} (−1)^{|S|} (D_{v_S}h)(t·e),
/// stored as ascending coefficients of length degree(h)+1; the leading
/// coefficient is h(e) (only the empty subset contributes at top degree).
#[derive(Clone, Debug)]
pub struct MixedRestriction {
    coefficients: Vec<f64>,
}

impl MixedRestriction {
    /// Ascending coefficients: `coefficients()[k]` multiplies tᵏ.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c)
    }
}

/// Imaginary-part tolerance for accepting the computed roots of a degree-d
/// polynomial as real. Root refinement stops on residuals near 1e−13, and a
/// multiplicity-m root is then located only to (1e−13)^{1/m}; the degree
/// bounds the multiplicity, so this is the honest realness threshold.
fn realness_tolerance(degree: usize) -> f64 {
    1e-13f64.powf(1.0 / degree.max(1) as f64)
}

fn check_in_cone(form: &HyperbolicForm, vs: &[PointVec]) -> Result<()> {
    for (i, v) in vs.iter().enumerate() {
        form.check_dim(v, "cone vector")?;
        let spec = eigenvalues(form, v)?;
        if spec.cone_position(RANK_REL_TOL)? == ConePosition::Outside {
            return Err(Error::InvalidArgument(format!(
                "vector {i} lies outside the hyperbolicity cone \
                 (λ_min = {:.6e})",
                spec.lambda_min()
            )));
        }
    }
    Ok(())
}

/// Coefficients of p(t) = Σ_{S⊆[n]} (−1)^{|S|} (D_{v_S}h)(t·e).
///
/// Each subset term is homogeneous of degree d−|S|, so it is recovered
/// exactly by interpolating its values at the integer nodes 0,…,d−|S|;
/// subsets larger than the degree differentiate to zero and are skipped.
/// Subset terms are accumulated over deterministic index segments, so the
/// result is bit-identical across thread counts. Roots are checked to be
/// real within [`realness_tolerance`] — the mixed polynomial of a
/// hyperbolic form is real-rooted, so a violation signals numerical
/// breakdown (or an input outside the supported domain).
pub fn mixed_restriction(form: &HyperbolicForm, vs: &[PointVec]) -> Result<MixedRestriction> {
    if vs.len() > MIXED_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "mixed restriction expands 2^{} subset terms (limit 2^{MIXED_BUDGET})",
            vs.len()
        )));
    }
    check_in_cone(form, vs)?;
    let d = form.degree();
    let e = form.direction();

    let segments = map_segments(1u64 << vs.len(), |range| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; d + 1];
        for mask in range {
            let size = mask.count_ones() as usize;
            if size > d {
                continue;
            }
            let dirs: Vec<PointVec> = (0..vs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vs[i].clone())
                .collect();
            let deg_s = d - size;
            let nodes: Vec<f64> = (0..=deg_s).map(|j| j as f64).collect();
            let mut values = Vec::with_capacity(deg_s + 1);
            for &t in &nodes {
                let point = e.scaled(t);
                values.push(if dirs.is_empty() {
                    form.evaluate(&point)?
                } else {
                    form.directional_derivative(&point, &dirs)?
                });
            }
            let term = poly::interpolate(&nodes, &values);
            let sign = if size % 2 == 0 { 1.0 } else { -1.0 };
            for (a, c) in acc.iter_mut().zip(term) {
                *a += sign * c;
            }
        }
        Ok(acc)
    });
    let mut coefficients = vec![0.0; d + 1];
    for seg in segments {
        for (a, c) in coefficients.iter_mut().zip(seg?) {
            *a += c;
        }
    }

    let roots = poly::roots(&coefficients)?;
    let tol = realness_tolerance(d);
    let mut worst = 0.0f64;
    for z in &roots {
        worst = worst.max(z.im.abs() / (1.0 + z.norm()));
    }
    if worst > tol {
        return Err(Error::NumericalFailure {
            context: format!(
                "mixed restriction of degree {d} has a root with relative \
                 imaginary part beyond the realness tolerance {tol:.3e}"
            ),
            residual: worst,
        });
    }
    Ok(MixedRestriction { coefficients })
}

/// Largest real root of an ascending-coefficient polynomial, found by Newton
/// iteration started strictly above every root (twice the Fujiwara bound).
/// Beyond the largest root a real-rooted monic polynomial and its derivative
/// are positive and convex, so the iteration decreases monotonically to the
/// root — linearly for multiple roots, which still yields ~1e−11 absolute
/// accuracy because the stopping test bounds the remaining gap by
/// multiplicity × step.
fn largest_root_from_above(coefficients: &[f64]) -> Result<f64> {
    let d = coefficients.len() - 1;
    let lead = coefficients[d];
    let monic: Vec<f64> = coefficients.iter().map(|c| c / lead).collect();
    let mut bound = 0.0f64;
    for k in 1..=d {
        bound = bound.max(monic[d - k].abs().powf(1.0 / k as f64));
    }
    let mut t = 2.0 * bound + 1e-9;
    for _ in 0..2000 {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in monic.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        if p <= 0.0 {
            // Rounding carried t to (or just below) the root.
            return Ok(t);
        }
        if dp <= 0.0 || dp.is_nan() {
            return Err(Error::NumericalFailure {
                context: "largest-root Newton iteration lost monotonicity".into(),
                residual: dp,
            });
        }
        let step = p / dp;
        t -= step;
        if step <= 1e-12 * (1.0 + t.abs()) {
            return Ok(t);
        }
    }
    Ok(t)
}

/// λ_max(v₁,…,vₙ): the largest root of the mixed restriction. Dominates
/// λ_max(v₁+⋯+vₙ) for cone vectors.
pub fn lambda_max_mixed(form: &HyperbolicForm, vs: &[PointVec]) -> Result<f64> {
    let p = mixed_restriction(form, vs)?;
    largest_root_from_above(p.coefficients())
}

// ---------------------------------------------------------------------------
// The δ(ε, n, r) bound function
// ---------------------------------------------------------------------------

/// A count parameter that may be taken to its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    Finite(u64),
    Infinite,
}

/// Arguments of δ(ε, n, r): trace scale ε > 0, number of summands n, rank
/// bound r.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaQuery {
    eps: f64,
    n: Extent,
    r: Extent,
}

impl DeltaQuery {
    pub fn new(eps: f64, n: Extent, r: Extent) -> Result<Self> {
        if eps <= 0.0 || !eps.is_finite() {
            return Err(Error::InvalidArgument(
                "delta query needs eps finite and > 0".into(),
            ));
        }
        for (name, ext) in [("n", n), ("r", r)] {
            if let Extent::Finite(0) = ext {
                return Err(Error::InvalidArgument(format!(
                    "delta query needs {name} ≥ 1"
                )));
            }
        }
        Ok(DeltaQuery { eps, n, r })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> Extent {
        self.n
    }

    pub fn r(&self) -> Extent {
        self.r
    }
}

/// Result of evaluating δ(ε, n, r): the infimum estimate with the feasible
/// pair it was attained at and the search resolution that produced it. The
/// value is an upper envelope of the true infimum — only feasible pairs are
/// ever evaluated.
#[derive(Clone, Copy, Debug)]
pub struct DeltaBound {
    pub value: f64,
    /// δ component of the minimizing pair.
    pub delta: f64,
    /// μ component of the minimizing pair.
    pub mu: f64,
    /// Per-axis resolution of the coarse grid stage.
    pub grid: usize,
    /// Relative step the coordinate descent was refined to.
    pub refinement_step: f64,
}

/// Membership of (δ, μ) in the feasible region for rank bound r:
/// δ − 1 ≥ (δ/μ)·B_r(δ/(rμ)) where
/// B_r(u) = ((1+u)^{r−1} − u^{r−1}) / ((1+u)^r − u^r), plus the side
/// condition "μ > 1, or δ ∈ [1,2] and μ > 1 − δ/r" (strict, as stated).
/// B_r is evaluated as (1 − w^{r−1})/((1+u)(1 − w^r)) with w = u/(1+u),
/// which never overflows; its r → ∞ limit is 1, giving the limiting
/// condition δ − 1 ≥ δ/μ (with side condition μ > 1).
pub fn delta_feasible(delta: f64, mu: f64, r: Extent) -> bool {
    if delta.is_nan() || delta <= 0.0 || mu.is_nan() || mu <= 0.0 {
        return false;
    }
    let side = match r {
        Extent::Infinite => mu > 1.0,
        Extent::Finite(rv) => {
            mu > 1.0 || ((1.0..=2.0).contains(&delta) && mu > 1.0 - delta / rv as f64)
        }
    };
    if !side {
        return false;
    }
    let bracket = match r {
        Extent::Infinite => 1.0,
        Extent::Finite(rv) => {
            let r = rv as f64;
            let u = delta / (r * mu);
            let w = u / (1.0 + u);
            (1.0 - w.powf(r - 1.0)) / ((1.0 + u) * (1.0 - w.powf(r)))
        }
    };
    delta - 1.0 >= (delta / mu) * bracket
}

fn delta_objective(eps: f64, n: Extent, delta: f64, mu: f64) -> f64 {
    match n {
        Extent::Infinite => eps * mu + delta,
        Extent::Finite(nv) => {
            let n = nv as f64;
            (eps * mu + (1.0 - 1.0 / n) * delta) / (1.0 + (mu - 1.0) / n)
        }
    }
}

/// Exact minimization over μ at fixed δ. At fixed δ the feasible μ form an
/// up-set (the membership right-hand side r·u·B_r(u) = (w−wʳ)/(1−wʳ) grows
/// with u ∝ 1/μ, and both side-condition branches are thresholds in μ), and
/// the objective is monotone in μ (linear-fractional with a μ-independent
/// determinant sign) — so the coordinate minimum sits either at the
/// feasibility threshold or at the box edge. The threshold is located by
/// geometric bisection. Returns None when no μ in the box is feasible.
fn best_mu_at(q: &DeltaQuery, delta: f64) -> Option<(f64, f64)> {
    let (lo, hi) = DELTA_BOX;
    if !delta_feasible(delta, hi, q.r) {
        return None;
    }
    let mu_min = if delta_feasible(delta, lo, q.r) {
        lo
    } else {
        let (mut bad, mut good) = (lo, hi);
        for _ in 0..200 {
            let mid = (bad * good).sqrt();
            if delta_feasible(delta, mid, q.r) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let mut best: Option<(f64, f64)> = None;
    for mu in [mu_min, hi] {
        let v = delta_objective(q.eps, q.n, delta, mu);
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, mu));
        }
    }
    best
}

/// δ(ε, n, r) = inf over feasible (δ, μ) of (εμ + (1−1/n)δ)/(1 + (μ−1)/n),
/// with the n = ∞ objective εμ + δ. A 200×200 log grid over
/// [1e−3, 10³]² locates the basin; coordinate descent then refines to
/// relative step 1e−7, solving the μ coordinate exactly at each probe and
/// taking multiplicative pattern steps in δ. Only feasible pairs are ever
/// evaluated, so the result upper-bounds the true infimum. Anchors:
/// δ(1, ∞, ∞) = 4 and in general δ(ε, ∞, ∞) = (1+√ε)².
pub fn delta_bound(q: &DeltaQuery) -> Result<DeltaBound> {
    let (lo, hi) = DELTA_BOX;
    let g = DELTA_GRID as u64;
    let ratio = (hi / lo).powf(1.0 / (DELTA_GRID as f64 - 1.0));
    let coord = |i: u64| lo * ratio.powi(i as i32);

    // Coarse scan, merged by (value, index) for a deterministic argmin.
    let segments = map_segments(g * g, |range| {
        let mut best: Option<(f64, u64)> = None;
        for idx in range {
            let delta = coord(idx / g);
            let mu = coord(idx % g);
            if !delta_feasible(delta, mu, q.r) {
                continue;
            }
            let v = delta_objective(q.eps, q.n, delta, mu);
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, idx));
            }
        }
        best
    });
    let mut best: Option<(f64, u64)> = None;
    for s in segments.into_iter().flatten() {
        if best.is_none_or(|(bv, _)| s.0 < bv) {
            best = Some(s);
        }
    }
    let Some((_, idx)) = best else {
        return Err(Error::Infeasible(format!(
            "no feasible (δ, μ) on the {DELTA_GRID}×{DELTA_GRID} grid over \
             [{lo:.0e}, {hi:.0e}]² for eps = {}, n = {:?}, r = {:?}",
            q.eps, q.n, q.r
        )));
    };

    // Coordinate descent from the grid argmin: the μ coordinate is solved
    // exactly at every probe (see best_mu_at — the constrained minimum over
    // μ sits at the feasibility threshold or the box edge), leaving a 1-D
    // multiplicative pattern search over δ whose step halves when neither
    // direction improves. Following the feasibility boundary therefore never
    // stalls the descent.
    let mut delta = coord(idx / g);
    let (mut value, mut mu) =
        best_mu_at(q, delta).expect("grid argmin must stay feasible in the exact μ line search");
    let mut step = ratio - 1.0;
    let mut evals = 0u32;
    while step > DELTA_REFINE_REL && evals < 1_000_000 {
        let mut improved = false;
        for nd in [delta * (1.0 + step), delta / (1.0 + step)] {
            let nd = nd.clamp(lo, hi);
            evals += 1;
            if let Some((v, nm)) = best_mu_at(q, nd) {
                if v < value {
                    value = v;
                    delta = nd;
                    mu = nm;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(DeltaBound {
        value,
        delta,
        mu,
        grid: DELTA_GRID,
        refinement_step: step,
    })
}
