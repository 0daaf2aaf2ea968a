//! Anti-concentration of Rademacher sums in hyperbolic norms.
//!
//! Works with *pairs* of vector families — one inside the hyperbolicity cone
//! of its form, one inside the mirrored cone of a second form — and
//! estimates: the probability that either signed sum lands within Δ of a
//! shift (in the respective hyperbolic norm), the boundary measure
//! Pr[λ_max ∈ (−2ρ, 0]] behind the robust Littlewood–Offord ceiling
//! O(1/(α√n)), and the good-bucket statistics of random hashing that convert
//! spread vectors into per-bucket eigenvalue floors. Every estimator has an
//! exact-enumeration twin at small n, and Monte Carlo streams are
//! per-trial-seeded, so estimates are reproducible and exactly monotone in
//! the window width.

use crate::concentration::require_enumerable;
use crate::error::{Error, Result};
use crate::forms::{HyperbolicForm, PointVec};
use crate::parallel::map_segments;
use crate::rng::{rademacher_signs, trial_rng, StreamDomain};
use crate::spectra::eigenvalues;
use crate::stats::TailEstimate;
use rand::Rng;

/// Absolute tolerance for the eigenvalue-floor and spread hypotheses of the
/// bucket lemma.
const HYPOTHESIS_TOL: f64 = 1e-9;

/// Two families of n vectors: `xs1` in the hyperbolicity cone of `form1`
/// (λ_min ≥ 0) with λ_max ≤ τ, and `xs2` in the mirrored cone of `form2`
/// (λ_max ≤ 0) with λ_min ≥ −τ. Membership and the τ caps are checked at
/// construction with tolerance 1e−9·τ. The shifts `y1`, `y2` default to zero.
#[derive(Clone, Debug)]
pub struct ConePair {
    form1: HyperbolicForm,
    form2: HyperbolicForm,
    xs1: Vec<PointVec>,
    xs2: Vec<PointVec>,
    tau: f64,
    y1: PointVec,
    y2: PointVec,
}

impl ConePair {
    pub fn new(
        form1: HyperbolicForm,
        form2: HyperbolicForm,
        xs1: Vec<PointVec>,
        xs2: Vec<PointVec>,
        tau: f64,
    ) -> Result<Self> {
        if tau <= 0.0 || !tau.is_finite() {
            return Err(Error::InvalidArgument(
                "cone pair needs τ finite and > 0".into(),
            ));
        }
        if xs1.is_empty() {
            return Err(Error::InvalidArgument(
                "cone pair needs at least one vector per family".into(),
            ));
        }
        if xs1.len() != xs2.len() {
            return Err(Error::DimensionMismatch {
                what: "second vector family",
                expected: xs1.len(),
                got: xs2.len(),
            });
        }
        let tol = HYPOTHESIS_TOL * tau;
        for (i, x) in xs1.iter().enumerate() {
            form1.check_dim(x, "first-family vector")?;
            let spec = eigenvalues(&form1, x)?;
            if spec.lambda_min() < -tol {
                return Err(Error::InvalidArgument(format!(
                    "first-family vector {i} leaves the cone (λ_min = {:.6e})",
                    spec.lambda_min()
                )));
            }
            if spec.lambda_max() > tau + tol {
                return Err(Error::InvalidArgument(format!(
                    "first-family vector {i} exceeds the cap (λ_max = {:.6e} > τ = {tau})",
                    spec.lambda_max()
                )));
            }
        }
        for (i, x) in xs2.iter().enumerate() {
            form2.check_dim(x, "second-family vector")?;
            let spec = eigenvalues(&form2, x)?;
            if spec.lambda_max() > tol {
                return Err(Error::InvalidArgument(format!(
                    "second-family vector {i} leaves the mirrored cone (λ_max = {:.6e})",
                    spec.lambda_max()
                )));
            }
            if spec.lambda_min() < -tau - tol {
                return Err(Error::InvalidArgument(format!(
                    "second-family vector {i} exceeds the cap (λ_min = {:.6e} < −τ = {})",
                    spec.lambda_min(),
                    -tau
                )));
            }
        }
        let y1 = PointVec::zeros(form1.dimension());
        let y2 = PointVec::zeros(form2.dimension());
        Ok(ConePair {
            form1,
            form2,
            xs1,
            xs2,
            tau,
            y1,
            y2,
        })
    }

    /// Replace the shifts the signed sums are measured against.
    pub fn with_shifts(mut self, y1: PointVec, y2: PointVec) -> Result<Self> {
        self.form1.check_dim(&y1, "first shift")?;
        self.form2.check_dim(&y2, "second shift")?;
        self.y1 = y1;
        self.y2 = y2;
        Ok(self)
    }

    pub fn form1(&self) -> &HyperbolicForm {
        &self.form1
    }

    pub fn form2(&self) -> &HyperbolicForm {
        &self.form2
    }

    pub fn xs1(&self) -> &[PointVec] {
        &self.xs1
    }

    pub fn xs2(&self) -> &[PointVec] {
        &self.xs2
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn y1(&self) -> &PointVec {
        &self.y1
    }

    pub fn y2(&self) -> &PointVec {
        &self.y2
    }

    pub fn n(&self) -> usize {
        self.xs1.len()
    }

    /// Spread hypothesis: each family, mapped into its cone, must satisfy
    /// Σᵢ λ_min(xᵢ)² ≥ 1. For the second family the cone representative is
    /// −xᵢ², whose λ_min equals −λ_max(xᵢ²). Returns (spread₁, spread₂);
    /// the error lists the failing family numbers.
    pub fn check_spread_hypothesis(&self) -> Result<(f64, f64)> {
        let mut spread1 = 0.0;
        for x in &self.xs1 {
            spread1 += eigenvalues(&self.form1, x)?.lambda_min().powi(2);
        }
        let mut spread2 = 0.0;
        for x in &self.xs2 {
            spread2 += eigenvalues(&self.form2, x)?.lambda_max().powi(2);
        }
        let mut failing = Vec::new();
        if spread1 < 1.0 - HYPOTHESIS_TOL {
            failing.push(1);
        }
        if spread2 < 1.0 - HYPOTHESIS_TOL {
            failing.push(2);
        }
        if !failing.is_empty() {
            return Err(Error::HypothesisViolation {
                what: format!(
                    "per-family spread Σ λ_min² ≥ 1 (got {spread1:.6e} and {spread2:.6e})"
                ),
                indices: failing,
            });
        }
        Ok((spread1, spread2))
    }

    /// Σᵢ sᵢ·xsⱼ[i] − yⱼ for one family.
    fn shifted_sum(xs: &[PointVec], signs: &[i8], y: &PointVec) -> PointVec {
        let mut sum = y.scaled(-1.0);
        for (x, &s) in xs.iter().zip(signs) {
            sum.axpy(f64::from(s), x);
        }
        sum
    }

    /// (‖Σ±x¹ − y₁‖_{h₁}, ‖Σ±x² − y₂‖_{h₂}, λ_max(Σ±x¹ − y₁)).
    fn pattern_stats(&self, signs: &[i8]) -> Result<(f64, f64, f64)> {
        let s1 = Self::shifted_sum(&self.xs1, signs, &self.y1);
        let s2 = Self::shifted_sum(&self.xs2, signs, &self.y2);
        let spec1 = eigenvalues(&self.form1, &s1)?;
        let d2 = eigenvalues(&self.form2, &s2)?.spectral_norm();
        Ok((spec1.spectral_norm(), d2, spec1.lambda_max()))
    }
}

/// Interval-probability report: the headline event that *either* family's
/// shifted signed sum has hyperbolic norm ≤ Δ, and the first-family window
/// event λ_max(Σ±x¹ − y₁) ∈ [−Δ, Δ] the norm statement reduces to.
#[derive(Clone, Debug)]
pub struct IntervalReport {
    pub either_norm: TailEstimate,
    pub first_window: TailEstimate,
    pub delta: f64,
}

fn check_interval_args(delta: f64, trials: u64) -> Result<()> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidArgument(
            "interval width Δ must be > 0".into(),
        ));
    }
    if trials < 1000 {
        return Err(Error::InvalidArgument(
            "interval probability needs at least 1000 trials".into(),
        ));
    }
    Ok(())
}

/// Monte-Carlo estimate of Pr[∃j: ‖Σᵢ±xᵢʲ − yⱼ‖_{hⱼ} ≤ Δ] under uniform
/// signs, plus the first-family λ_max-window probability. The sign stream of
/// each trial depends only on (seed, trial), never on Δ, so both estimates
/// are exactly non-decreasing in Δ at a fixed seed.
pub fn interval_probability(
    pair: &ConePair,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<IntervalReport> {
    check_interval_args(delta, trials)?;
    let n = pair.n();
    let segments = map_segments(trials, |range| -> Result<(u64, u64)> {
        let mut norm_hits = 0u64;
        let mut window_hits = 0u64;
        for trial in range {
            let mut rng = trial_rng(seed, StreamDomain::IntervalSigns, trial);
            let signs = rademacher_signs(&mut rng, n);
            let (d1, d2, window) = pair.pattern_stats(&signs).map_err(|e| e.in_trial(trial))?;
            if d1 <= delta || d2 <= delta {
                norm_hits += 1;
            }
            if window.abs() <= delta {
                window_hits += 1;
            }
        }
        Ok((norm_hits, window_hits))
    });
    let mut norm_hits = 0u64;
    let mut window_hits = 0u64;
    for seg in segments {
        let (a, b) = seg?;
        norm_hits += a;
        window_hits += b;
    }
    Ok(IntervalReport {
        either_norm: TailEstimate::from_counts(delta, norm_hits, trials, seed)?,
        first_window: TailEstimate::from_counts(delta, window_hits, trials, seed)?,
        delta,
    })
}

/// Runs `visit` on the statistics of every one of the 2ⁿ sign patterns.
/// Shifts break the ±symmetry, so the full space is always walked.
fn for_each_pattern(
    pair: &ConePair,
    visit: impl Fn(f64, f64, f64) -> (u64, u64) + Sync,
) -> Result<(u64, u64, u64)> {
    require_enumerable(pair.n(), "interval enumeration")?;
    let patterns = 1u64 << pair.n();
    let segments = map_segments(patterns, |range| -> Result<(u64, u64)> {
        let mut acc = (0u64, 0u64);
        let mut signs = vec![0i8; pair.n()];
        for idx in range {
            for (j, s) in signs.iter_mut().enumerate() {
                *s = if idx >> j & 1 == 1 { -1 } else { 1 };
            }
            let (d1, d2, window) = pair.pattern_stats(&signs)?;
            let (a, b) = visit(d1, d2, window);
            acc.0 += a;
            acc.1 += b;
        }
        Ok(acc)
    });
    let mut totals = (0u64, 0u64);
    for seg in segments {
        let (a, b) = seg?;
        totals.0 += a;
        totals.1 += b;
    }
    Ok((totals.0, totals.1, patterns))
}

/// Exact interval probabilities by enumerating all 2ⁿ sign patterns.
pub fn exact_interval_probability(pair: &ConePair, delta: f64) -> Result<IntervalReport> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidArgument(
            "interval width Δ must be > 0".into(),
        ));
    }
    let (norm_hits, window_hits, patterns) = for_each_pattern(pair, |d1, d2, window| {
        (
            u64::from(d1 <= delta || d2 <= delta),
            u64::from(window.abs() <= delta),
        )
    })?;
    let pf = patterns as f64;
    Ok(IntervalReport {
        either_norm: TailEstimate::exact(delta, norm_hits as f64 / pf, patterns, 0),
        first_window: TailEstimate::exact(delta, window_hits as f64 / pf, patterns, 0),
        delta,
    })
}

/// min over all 2ⁿ sign patterns of minⱼ ‖Σᵢ±xᵢʲ − yⱼ‖_{hⱼ}: the largest Δ
/// at which the exact interval probability is still zero.
pub fn min_interval_distance(pair: &ConePair) -> Result<f64> {
    require_enumerable(pair.n(), "interval enumeration")?;
    let patterns = 1u64 << pair.n();
    let segments = map_segments(patterns, |range| -> Result<f64> {
        let mut best = f64::INFINITY;
        let mut signs = vec![0i8; pair.n()];
        for idx in range {
            for (j, s) in signs.iter_mut().enumerate() {
                *s = if idx >> j & 1 == 1 { -1 } else { 1 };
            }
            let (d1, d2, _) = pair.pattern_stats(&signs)?;
            best = best.min(d1.min(d2));
        }
        Ok(best)
    });
    let mut best = f64::INFINITY;
    for seg in segments {
        best = best.min(seg?);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Random bucket hashing
// ---------------------------------------------------------------------------

/// A hash [n] → [p]: `assignment()[i]` is the bucket of item i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketHash {
    p: usize,
    assignment: Vec<usize>,
}

impl BucketHash {
    pub fn new(assignment: Vec<usize>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument(
                "bucket hash needs at least one bucket".into(),
            ));
        }
        if let Some(&bad) = assignment.iter().find(|b| **b >= p) {
            return Err(Error::InvalidArgument(format!(
                "bucket index {bad} out of range for p = {p}"
            )));
        }
        Ok(BucketHash { p, assignment })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }
}

/// Seeded uniform hash: each of the n items lands in an independently
/// uniform bucket of [0, p).
pub fn random_bucket_hash(n: usize, p: usize, seed: u64) -> Result<BucketHash> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "bucket hash needs at least one bucket".into(),
        ));
    }
    let mut rng = trial_rng(seed, StreamDomain::BucketHash, 0);
    let assignment = (0..n).map(|_| rng.random_range(0..p)).collect();
    BucketHash::new(assignment, p)
}

/// Count the buckets whose summed vector σ_c = Σ_{hash(i)=c} xᵢ keeps an
/// eigenvalue floor: c is good when λ_min(σ_c) ≥ 1/(2τp). Returns the good
/// count and that threshold. Hypotheses checked at absolute tolerance 1e−9:
/// every xᵢ in the cone with λ_max ≤ τ, and Σ λ_min(xᵢ)² ≥ 1.
pub fn good_bucket_fraction(
    form: &HyperbolicForm,
    xs: &[PointVec],
    hash: &BucketHash,
    tau: f64,
) -> Result<(usize, f64)> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::InvalidArgument(
            "good-bucket count needs τ finite and > 0".into(),
        ));
    }
    if hash.n() != xs.len() {
        return Err(Error::DimensionMismatch {
            what: "bucket assignment",
            expected: xs.len(),
            got: hash.n(),
        });
    }
    let mut spread = 0.0;
    let mut violations = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        form.check_dim(x, "bucket vector")?;
        let spec = eigenvalues(form, x)?;
        if spec.lambda_min() < -HYPOTHESIS_TOL || spec.lambda_max() > tau + HYPOTHESIS_TOL {
            violations.push(i);
        }
        spread += spec.lambda_min().powi(2);
    }
    if !violations.is_empty() {
        return Err(Error::HypothesisViolation {
            what: format!("cone membership with λ_max ≤ τ = {tau}"),
            indices: violations,
        });
    }
    if spread < 1.0 - HYPOTHESIS_TOL {
        return Err(Error::HypothesisViolation {
            what: format!("spread Σ λ_min² ≥ 1 (got {spread:.6e})"),
            indices: Vec::new(),
        });
    }

    let mut sums = vec![PointVec::zeros(form.dimension()); hash.p()];
    for (x, &c) in xs.iter().zip(hash.assignment()) {
        sums[c].axpy(1.0, x);
    }
    let threshold = 1.0 / (2.0 * tau * hash.p() as f64);
    let mut good = 0usize;
    for sum in &sums {
        if eigenvalues(form, sum)?.lambda_min() >= threshold {
            good += 1;
        }
    }
    Ok((good, threshold))
}

// ---------------------------------------------------------------------------
// Boundary measure (robust Littlewood–Offord)
// ---------------------------------------------------------------------------

/// Boundary-measure report: the probability that some family's shifted
/// signed sum has λ_max in (−2ρ, 0], the realized fraction α of indices with
/// eigenvalue margin ρ in both families, and the implied constant
/// p̂·α·√n of the O(1/(α√n)) ceiling.
#[derive(Clone, Debug)]
pub struct BoundaryReport {
    pub estimate: TailEstimate,
    pub alpha: f64,
    pub n: usize,
    pub rho: f64,
    pub implied_constant: f64,
}

/// Fraction of indices with λ_min(xᵢ¹) ≥ ρ and λ_max(xᵢ²) ≤ −ρ; errors with
/// the violating indices when no index qualifies.
fn margin_fraction(pair: &ConePair, rho: f64) -> Result<f64> {
    let tol = HYPOTHESIS_TOL * rho;
    let mut satisfied = 0usize;
    let mut violating = Vec::new();
    for i in 0..pair.n() {
        let floor1 = eigenvalues(pair.form1(), &pair.xs1()[i])?.lambda_min();
        let cap2 = eigenvalues(pair.form2(), &pair.xs2()[i])?.lambda_max();
        if floor1 >= rho - tol && cap2 <= -rho + tol {
            satisfied += 1;
        } else {
            violating.push(i);
        }
    }
    if satisfied == 0 {
        return Err(Error::HypothesisViolation {
            what: format!("no index has eigenvalue margin ρ = {rho} in both families"),
            indices: violating,
        });
    }
    Ok(satisfied as f64 / pair.n() as f64)
}

fn boundary_hit(pair: &ConePair, signs: &[i8], rho: f64) -> Result<bool> {
    let s1 = ConePair::shifted_sum(pair.xs1(), signs, pair.y1());
    let l1 = eigenvalues(pair.form1(), &s1)?.lambda_max();
    if l1 > -2.0 * rho && l1 <= 0.0 {
        return Ok(true);
    }
    let s2 = ConePair::shifted_sum(pair.xs2(), signs, pair.y2());
    let l2 = eigenvalues(pair.form2(), &s2)?.lambda_max();
    Ok(l2 > -2.0 * rho && l2 <= 0.0)
}

/// Monte-Carlo estimate of Pr[∃j: λ_max(Σᵢ±xᵢʲ − yⱼ) ∈ (−2ρ, 0]] under
/// uniform signs. Requires at least one index with eigenvalue margin ρ in
/// both families; the realized fraction α is reported alongside p̂·α·√n.
pub fn boundary_measure(
    pair: &ConePair,
    rho: f64,
    trials: u64,
    seed: u64,
) -> Result<BoundaryReport> {
    if rho <= 0.0 || !rho.is_finite() {
        return Err(Error::InvalidArgument(
            "boundary width ρ must be finite and > 0".into(),
        ));
    }
    if trials < 1000 {
        return Err(Error::InvalidArgument(
            "boundary measure needs at least 1000 trials".into(),
        ));
    }
    let alpha = margin_fraction(pair, rho)?;
    let n = pair.n();
    let segments = map_segments(trials, |range| -> Result<u64> {
        let mut hits = 0u64;
        for trial in range {
            let mut rng = trial_rng(seed, StreamDomain::BoundarySigns, trial);
            let signs = rademacher_signs(&mut rng, n);
            if boundary_hit(pair, &signs, rho).map_err(|e| e.in_trial(trial))? {
                hits += 1;
            }
        }
        Ok(hits)
    });
    let mut hits = 0u64;
    for seg in segments {
        hits += seg?;
    }
    let estimate = TailEstimate::from_counts(rho, hits, trials, seed)?;
    let implied_constant = estimate.p_hat * alpha * (n as f64).sqrt();
    Ok(BoundaryReport {
        estimate,
        alpha,
        n,
        rho,
        implied_constant,
    })
}

/// Exact boundary measure by enumerating all 2ⁿ sign patterns.
pub fn exact_boundary_measure(pair: &ConePair, rho: f64) -> Result<BoundaryReport> {
    if rho <= 0.0 || !rho.is_finite() {
        return Err(Error::InvalidArgument(
            "boundary width ρ must be finite and > 0".into(),
        ));
    }
    let alpha = margin_fraction(pair, rho)?;
    require_enumerable(pair.n(), "boundary enumeration")?;
    let n = pair.n();
    let patterns = 1u64 << n;
    let segments = map_segments(patterns, |range| -> Result<u64> {
        let mut hits = 0u64;
        let mut signs = vec![0i8; n];
        for idx in range {
            for (j, s) in signs.iter_mut().enumerate() {
                *s = if idx >> j & 1 == 1 { -1 } else { 1 };
            }
            if boundary_hit(pair, &signs, rho)? {
                hits += 1;
            }
        }
        Ok(hits)
    });
    let mut hits = 0u64;
    for seg in segments {
        hits += seg?;
    }
    let estimate = TailEstimate::exact(rho, hits as f64 / patterns as f64, patterns, 0);
    let implied_constant = estimate.p_hat * alpha * (n as f64).sqrt();
    Ok(BoundaryReport {
        estimate,
        alpha,
        n,
        rho,
        implied_constant,
    })
}
