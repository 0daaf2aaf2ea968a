//! Concentration of Rademacher sums Σ rᵢxᵢ in hyperbolic norms, and Chernoff
//! bounds for sums of independent cone-valued samples.
//!
//! The measured quantities: moments E‖Σ rᵢxᵢ‖_{h,2q}^{2q} by exact sign
//! enumeration, Monte Carlo tail probabilities, the Khinchin-type ratio
//! (E‖X‖²)^{1/2} / E‖X‖, and the eigenvalue tails of cone-sample sums. The
//! closed-form counterparts: √(2q−1)·s^{1/(2q)}·σ for moments (σ² = Σ‖xᵢ‖_h²,
//! s = max rank), 2·exp(−t²/(32·E‖X‖²)) for tails, and
//! d·((1±δ)^{1±δ}/e^{±δ})^{−μ/R} for cone sums.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forms::{pack_outer, FamilyKind, HyperbolicForm, PointVec};
use crate::parallel::map_segments;
use crate::rng::{gaussian_entries, rademacher_signs, trial_rng, StreamDomain};
use crate::spectra::{eigenvalues, Spectrum, RANK_REL_TOL};
use crate::stats::TailEstimate;

/// Largest n for which full 2ⁿ sign enumeration is allowed.
pub const ENUMERATION_BUDGET: usize = 24;

/// Largest n for which the full value distribution may be materialized.
pub const DISTRIBUTION_BUDGET: usize = 20;

/// A hyperbolic form with a finite family of points x₁,…,xₙ, carrying the
/// two statistics the concentration bounds are phrased in: σ = (Σ‖xᵢ‖_h²)^{1/2}
/// and s = maxᵢ rank(xᵢ).
#[derive(Clone, Debug)]
pub struct VectorSystem {
    form: HyperbolicForm,
    vectors: Vec<PointVec>,
    norms: Vec<f64>,
    sigma: f64,
    max_rank: usize,
    rank_tolerance: f64,
}

impl VectorSystem {
    /// Validates dimensions and caches σ and s (ranks decided at the default
    /// relative tolerance).
    pub fn new(form: HyperbolicForm, vectors: Vec<PointVec>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidArgument(
                "a vector system needs at least one vector".into(),
            ));
        }
        let mut norms = Vec::with_capacity(vectors.len());
        let mut sigma_sq = 0.0;
        let mut max_rank = 0;
        for v in &vectors {
            form.check_dim(v, "system vector")?;
            let spec = eigenvalues(&form, v)?;
            let norm = spec.spectral_norm();
            norms.push(norm);
            sigma_sq += norm * norm;
            max_rank = max_rank.max(spec.rank(RANK_REL_TOL)?.rank);
        }
        Ok(VectorSystem {
            form,
            vectors,
            norms,
            sigma: sigma_sq.sqrt(),
            max_rank,
            rank_tolerance: RANK_REL_TOL,
        })
    }

    pub fn form(&self) -> &HyperbolicForm {
        &self.form
    }

    pub fn vectors(&self) -> &[PointVec] {
        &self.vectors
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    /// σ = (Σ‖xᵢ‖_h²)^{1/2}.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// s = maxᵢ rank(xᵢ).
    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// Relative tolerance the cached ranks were decided at.
    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Σ‖xᵢ‖_h — the triangle-inequality ceiling for any signed sum.
    pub fn total_norm(&self) -> f64 {
        self.norms.iter().sum()
    }

    fn signed_sum(&self, signs: &[i8]) -> PointVec {
        let m = self.form.dimension();
        let mut sum = PointVec::zeros(m);
        for (v, &s) in self.vectors.iter().zip(signs) {
            sum.axpy(f64::from(s), v);
        }
        sum
    }
}

/// ‖Σ signsᵢ·xᵢ‖_{h,p} (the spectral norm for p = ∞).
pub fn rademacher_value(sys: &VectorSystem, signs: &[i8], p: f64) -> Result<f64> {
    if signs.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            what: "sign vector",
            expected: sys.n(),
            got: signs.len(),
        });
    }
    if signs.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
    }
    let sum = sys.signed_sum(signs);
    eigenvalues(sys.form(), &sum)?.hp_norm(p)
}

// ---------------------------------------------------------------------------
// Exact sign enumeration (Gray-code walk)
// ---------------------------------------------------------------------------

/// Decode walk index i into the sign of free vector j (bit j of the Gray
/// code): set bit ⇒ −1.
pub(crate) fn walk_sign(i: u64, j: usize) -> i8 {
    if (i ^ (i >> 1)) >> j & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Fold a visitor over all sign patterns of `vectors`, walking the binary
/// reflected Gray code so each step updates the running sum by ±2xⱼ. With
/// `fix_first`, vector 0 keeps sign +1 and only 2^{n−1} patterns are walked —
/// valid whenever the visited statistic is even in the signs. Work is split
/// into deterministic segments (the same segments regardless of thread
/// count); each segment rebuilds its starting sum from scratch, which also
/// curbs floating-point drift, and per-segment accumulators come back in
/// segment order.
pub(crate) fn fold_sign_patterns<A: Send>(
    vectors: &[PointVec],
    fix_first: bool,
    make_acc: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, u64, &[f64]) -> Result<()> + Sync,
) -> Result<Vec<A>> {
    assert!(!vectors.is_empty());
    let free = vectors.len() - usize::from(fix_first);
    assert!(free < 63, "enumeration width exceeds u64 walk indices");
    let offset = usize::from(fix_first);
    let m = vectors[0].len();
    let total = 1u64 << free;

    let segments = map_segments(total, |range| -> Result<A> {
        let mut acc = make_acc();
        let mut sum = vec![0.0; m];
        if fix_first {
            for (s, &v) in sum.iter_mut().zip(vectors[0].as_slice()) {
                *s += v;
            }
        }
        for j in 0..free {
            let sign = f64::from(walk_sign(range.start, j));
            for (s, &v) in sum.iter_mut().zip(vectors[j + offset].as_slice()) {
                *s += sign * v;
            }
        }
        for i in range.clone() {
            visit(&mut acc, i, &sum)?;
            let next = i + 1;
            if next < range.end {
                let bit = next.trailing_zeros() as usize;
                // Sign of bit at index i flips when moving to i+1.
                let old = f64::from(walk_sign(i, bit));
                for (s, &v) in sum.iter_mut().zip(vectors[bit + offset].as_slice()) {
                    *s -= 2.0 * old * v;
                }
            }
        }
        Ok(acc)
    });

    segments.into_iter().collect()
}

pub(crate) fn require_enumerable(n: usize, what: &str) -> Result<()> {
    if n > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{what} enumerates 2^{n} sign patterns (limit 2^{ENUMERATION_BUDGET}); \
             use the Monte Carlo estimator instead"
        )));
    }
    Ok(())
}

/// (E[‖Σ rᵢxᵢ‖_{h,2q}^{2q}])^{1/(2q)} by full sign enumeration.
///
/// The walk fixes r₁ = +1: the statistic is even in the signs, so the half
/// space of patterns carries the full expectation.
pub fn exact_moment(sys: &VectorSystem, q: usize) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidArgument("moment order q must be ≥ 1".into()));
    }
    require_enumerable(sys.n(), "exact_moment")?;
    let p = 2.0 * q as f64;
    let power = 2 * q as i32;
    let form = sys.form();
    let segments = fold_sign_patterns(
        &sys.vectors,
        true,
        || 0.0f64,
        |acc, _, sum| {
            let spec = eigenvalues(form, &PointVec::from_vec_unchecked(sum.to_vec()))?;
            *acc += spec.hp_norm(p)?.powi(power);
            Ok(())
        },
    )?;
    let patterns = (1u64 << (sys.n() - 1)) as f64;
    let mean: f64 = segments.iter().sum::<f64>() / patterns;
    Ok(mean.powf(1.0 / (2.0 * q as f64)))
}

/// √(2q−1) · s^{1/(2q)} · σ — the closed-form ceiling for
/// (E‖Σrᵢxᵢ‖_{h,2q}^{2q})^{1/(2q)}.
pub fn moment_bound(sigma: f64, s: usize, q: usize) -> Result<f64> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(
            "sigma must be finite and ≥ 0".into(),
        ));
    }
    if s < 1 {
        return Err(Error::InvalidArgument("rank bound s must be ≥ 1".into()));
    }
    if q < 1 {
        return Err(Error::InvalidArgument("moment order q must be ≥ 1".into()));
    }
    let tq = (2 * q - 1) as f64;
    Ok(tq.sqrt() * (s as f64).powf(1.0 / (2.0 * q as f64)) * sigma)
}

/// Minimize the moment bound over integer q: returns (bound, q*) with ties
/// resolved toward smaller q. The scan covers q = 1..=max(2, 4⌈log₂(s+1)⌉),
/// beyond which √(2q−1) dominates the shrinking s^{1/(2q)}.
pub fn expectation_bound(sigma: f64, s: usize) -> Result<(f64, usize)> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidArgument(
            "sigma must be finite and ≥ 0".into(),
        ));
    }
    if s < 1 {
        return Err(Error::InvalidArgument("rank bound s must be ≥ 1".into()));
    }
    let q_max = 2usize.max(4 * ((s as f64 + 1.0).log2().ceil() as usize));
    let mut best = f64::INFINITY;
    let mut best_q = 1;
    for q in 1..=q_max {
        let b = moment_bound(sigma, s, q)?;
        if b < best {
            best = b;
            best_q = q;
        }
    }
    Ok((best, best_q))
}

/// min(1, 2·exp(−t²/(32·m₂))) where m₂ = E‖Σ rᵢxᵢ‖_h².
pub fn tail_bound_rademacher(t: f64, second_moment: f64) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument("threshold t must be > 0".into()));
    }
    if second_moment <= 0.0 || !second_moment.is_finite() {
        return Err(Error::InvalidArgument("second moment must be > 0".into()));
    }
    Ok((2.0 * (-t * t / (32.0 * second_moment)).exp()).min(1.0))
}

/// Monte Carlo estimate of Pr[‖Σ rᵢxᵢ‖_h > t]: per-trial sign vectors come
/// from independent counter-based streams keyed by (seed, trial), so p_hat is
/// bit-identical across runs and thread counts.
pub fn mc_tail(sys: &VectorSystem, t: f64, trials: u64, seed: u64) -> Result<TailEstimate> {
    if trials < 100 {
        return Err(Error::InvalidArgument(
            "Monte Carlo tail needs at least 100 trials".into(),
        ));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument("threshold must be finite".into()));
    }
    let form = sys.form();
    let n = sys.n();
    let segments = map_segments(trials, |range| -> Result<u64> {
        let mut hits = 0u64;
        for trial in range {
            let mut rng = trial_rng(seed, StreamDomain::MonteCarloTail, trial);
            let signs = rademacher_signs(&mut rng, n);
            let sum = sys.signed_sum(&signs);
            let spec = eigenvalues(form, &sum).map_err(|e| e.in_trial(trial))?;
            if spec.spectral_norm() > t {
                hits += 1;
            }
        }
        Ok(hits)
    });
    let mut total = 0u64;
    for s in segments {
        total += s?;
    }
    TailEstimate::from_counts(t, total, trials, seed)
}

/// Exact Pr[‖Σ rᵢxᵢ‖_h > t] by sign enumeration (collapsed Wilson interval).
pub fn exact_tail(sys: &VectorSystem, t: f64) -> Result<TailEstimate> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument("threshold must be finite".into()));
    }
    require_enumerable(sys.n(), "exact_tail")?;
    let form = sys.form();
    let segments = fold_sign_patterns(
        &sys.vectors,
        true,
        || 0u64,
        |acc, _, sum| {
            let spec = eigenvalues(form, &PointVec::from_vec_unchecked(sum.to_vec()))?;
            if spec.spectral_norm() > t {
                *acc += 1;
            }
            Ok(())
        },
    )?;
    let half = 1u64 << (sys.n() - 1);
    let hits: u64 = segments.iter().sum();
    Ok(TailEstimate::exact(
        t,
        hits as f64 / half as f64,
        1u64 << sys.n(),
        0,
    ))
}

/// (E‖Σrᵢxᵢ‖_h²)^{1/2} / E‖Σrᵢxᵢ‖_h by exact enumeration; the Khinchin-type
/// claim being verified is that this lies in [1, √2].
pub fn khinchin_ratio(sys: &VectorSystem) -> Result<f64> {
    require_enumerable(sys.n(), "khinchin_ratio")?;
    let form = sys.form();
    let segments = fold_sign_patterns(
        &sys.vectors,
        true,
        || (0.0f64, 0.0f64),
        |acc, _, sum| {
            let spec = eigenvalues(form, &PointVec::from_vec_unchecked(sum.to_vec()))?;
            let v = spec.spectral_norm();
            acc.0 += v;
            acc.1 += v * v;
            Ok(())
        },
    )?;
    let patterns = (1u64 << (sys.n() - 1)) as f64;
    let mean: f64 = segments.iter().map(|s| s.0).sum::<f64>() / patterns;
    let second: f64 = segments.iter().map(|s| s.1).sum::<f64>() / patterns;
    if mean == 0.0 {
        return Err(Error::UndefinedRatio(
            "every signed sum has norm zero (all vectors zero), so the \
             moment ratio is 0/0"
                .into(),
        ));
    }
    Ok(second.sqrt() / mean)
}

/// The full distribution of ‖Σ rᵢxᵢ‖_h over all sign patterns, for
/// percentile and multi-threshold queries without rewalking.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    /// Sorted ascending; one entry per pattern with r₁ = +1 (each value
    /// occurs an even number of times over the full sign space, so
    /// half-space statistics equal full-space statistics).
    values: Vec<f64>,
}

impl ExactDistribution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn second_moment(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Pr[value > t].
    pub fn tail(&self, t: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v <= t);
        (self.values.len() - idx) as f64 / self.values.len() as f64
    }

    /// Smallest value v with Pr[value ≤ v] ≥ p, for p ∈ (0, 1].
    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p * self.values.len() as f64).ceil() as usize).clamp(1, self.values.len());
        self.values[k - 1]
    }
}

/// Materialize the exact distribution of ‖Σ rᵢxᵢ‖_h (n ≤ 20).
pub fn exact_distribution(sys: &VectorSystem) -> Result<ExactDistribution> {
    if sys.n() > DISTRIBUTION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "exact_distribution stores 2^{} values (limit 2^{DISTRIBUTION_BUDGET})",
            sys.n()
        )));
    }
    let form = sys.form();
    let segments = fold_sign_patterns(
        &sys.vectors,
        true,
        Vec::new,
        |acc: &mut Vec<f64>, _, sum| {
            let spec = eigenvalues(form, &PointVec::from_vec_unchecked(sum.to_vec()))?;
            acc.push(spec.spectral_norm());
            Ok(())
        },
    )?;
    let mut values: Vec<f64> = segments.into_iter().flatten().collect();
    values.sort_by(f64::total_cmp);
    Ok(ExactDistribution { values })
}

/// Smallest C₂ for which 2·exp(−C₂·t²/(σ²·ln(s+1))) dominates every observed
/// tail point (t, p). Points with p = 0 impose no constraint; None when no
/// point constrains.
pub fn tightest_c2(tail_points: &[(f64, f64)], sigma: f64, s: usize) -> Option<f64> {
    let log_term = (s as f64 + 1.0).ln();
    let mut best: Option<f64> = None;
    for &(t, p) in tail_points {
        if p > 0.0 && t > 0.0 && sigma > 0.0 {
            let c2 = (2.0 / p).ln() * sigma * sigma * log_term / (t * t);
            best = Some(best.map_or(c2, |b: f64| b.min(c2)));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Gaussian-moment and multinomial facts
// ---------------------------------------------------------------------------

/// M_{2q} = ((2q)!/(2^q·q!))^{1/(2q)}, the 2q-th moment root of a standard
/// Gaussian, via log-factorials (stable through q = 80).
pub fn m2q(q: usize) -> Result<f64> {
    if !(1..=80).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "m2q is supported for 1 ≤ q ≤ 80, got {q}"
        )));
    }
    let ln_factorial = |n: usize| (2..=n).map(|k| (k as f64).ln()).sum::<f64>();
    let ln = ln_factorial(2 * q) - q as f64 * std::f64::consts::LN_2 - ln_factorial(q);
    Ok((ln / (2.0 * q as f64)).exp())
}

/// Binomial coefficient, exact in f64 for n ≤ 40 (all intermediates < 2⁵³).
fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 1..=k {
        acc = acc * (n - k + j) as f64 / j as f64;
    }
    acc
}

/// Multinomial coefficient n! / ∏ kᵢ! as a product of binomials.
fn multinomial_f64(n: usize, parts: &[usize]) -> f64 {
    let mut rem = n;
    let mut acc = 1.0;
    for &p in parts {
        acc *= binomial_f64(rem, p);
        rem -= p;
    }
    acc
}

/// Both sides of the pairing inequality
/// multinomial(2q; 2k₁,…,2kₙ) ≤ M_{2q}^{2q} · multinomial(q; k₁,…,kₙ);
/// returns (lhs, rhs). M_{2q}^{2q} is evaluated exactly as (2q−1)!! =
/// 1·3·5⋯(2q−1).
pub fn multinomial_inequality_check(q: usize, k: &[usize]) -> Result<(f64, f64)> {
    if !(1..=20).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "composition order must satisfy 1 ≤ q ≤ 20, got {q}"
        )));
    }
    let total: usize = k.iter().sum();
    if total != q {
        return Err(Error::InvalidArgument(format!(
            "composition {k:?} sums to {total}, expected q = {q}"
        )));
    }
    let doubled: Vec<usize> = k.iter().map(|v| 2 * v).collect();
    let lhs = multinomial_f64(2 * q, &doubled);
    let double_factorial: f64 = (1..=q).map(|j| (2 * j - 1) as f64).product();
    let rhs = double_factorial * multinomial_f64(q, k);
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Cone sampling and the Chernoff experiment
// ---------------------------------------------------------------------------

/// A seeded sampler producing points of the closed cone Λ₊ with λ_max ≤ cap.
pub trait ConeSampler: Send + Sync {
    /// Stable identifier for reports.
    fn id(&self) -> &str;
    /// Draw one point; must land in Λ₊ with λ_max ≤ cap (checked by the
    /// caller at tolerance 1e−9·cap).
    fn sample(&self, form: &HyperbolicForm, cap: f64, rng: &mut ChaCha8Rng) -> Result<PointVec>;
}

/// The sample distributions for cone experiments.
#[derive(Clone)]
pub enum ConeGenerator {
    /// Eigenvalues uniform in [0, R] on a random frame (family-specific
    /// closed-form constructions; a shift-and-rescale fallback otherwise).
    UniformBox,
    /// Random extreme-ray direction scaled by a uniform cap fraction.
    ScaledRankOne,
    /// Caller-supplied sampler (not expressible in JSON descriptions).
    Custom(Arc<dyn ConeSampler>),
}

impl std::fmt::Debug for ConeGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConeGenerator::UniformBox => write!(f, "UniformBox"),
            ConeGenerator::ScaledRankOne => write!(f, "ScaledRankOne"),
            ConeGenerator::Custom(s) => write!(f, "Custom({})", s.id()),
        }
    }
}

impl ConeGenerator {
    pub fn id(&self) -> &str {
        match self {
            ConeGenerator::UniformBox => "uniform_box",
            ConeGenerator::ScaledRankOne => "scaled_rank_one",
            ConeGenerator::Custom(s) => s.id(),
        }
    }
}

/// Description of one cone-sum experiment: n independent samples per trial,
/// each in Λ₊ with λ_max ≤ r.
#[derive(Clone, Debug)]
pub struct ConeSampleSpec {
    form: HyperbolicForm,
    n: usize,
    generator: ConeGenerator,
    r: f64,
}

impl ConeSampleSpec {
    pub fn new(form: HyperbolicForm, n: usize, generator: ConeGenerator, r: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "cone experiment needs n ≥ 1 samples per trial".into(),
            ));
        }
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::InvalidArgument(
                "eigenvalue cap R must be finite and > 0".into(),
            ));
        }
        Ok(ConeSampleSpec {
            form,
            n,
            generator,
            r,
        })
    }

    pub fn form(&self) -> &HyperbolicForm {
        &self.form
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> &ConeGenerator {
        &self.generator
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Draw one sample and verify the generator contract (inside Λ₊, capped);
    /// returns the point with its spectrum so callers reuse the eigenvalues.
    fn sample_checked(&self, rng: &mut ChaCha8Rng) -> Result<(PointVec, Spectrum)> {
        let x = match &self.generator {
            ConeGenerator::UniformBox => uniform_box_sample(&self.form, self.r, rng)?,
            ConeGenerator::ScaledRankOne => scaled_rank_one_sample(&self.form, self.r, rng)?,
            ConeGenerator::Custom(s) => s.sample(&self.form, self.r, rng)?,
        };
        let spec = eigenvalues(&self.form, &x)?;
        let tol = 1e-9 * self.r;
        if spec.lambda_min() < -tol || spec.lambda_max() > self.r + tol {
            return Err(Error::GeneratorContract(format!(
                "generator {} produced eigenvalues in [{:.6e}, {:.6e}], outside [0, {:.6e}]",
                self.generator.id(),
                spec.lambda_min(),
                spec.lambda_max(),
                self.r
            )));
        }
        Ok((x, spec))
    }
}

/// Uniform-box cone sample: eigenvalues i.i.d. uniform on [0, R].
fn uniform_box_sample(form: &HyperbolicForm, r: f64, rng: &mut ChaCha8Rng) -> Result<PointVec> {
    match form.kind() {
        FamilyKind::Product { m } => {
            let e = form.direction();
            let mut x = Vec::with_capacity(*m);
            for i in 0..*m {
                x.push(rng.random::<f64>() * r * e[i]);
            }
            Ok(PointVec::from_vec_unchecked(x))
        }
        FamilyKind::DeterminantSymmetric { d } => {
            let g = nalgebra::DMatrix::from_fn(*d, *d, |_, _| gaussian_entries(rng, 1)[0]);
            let q = g.qr().q();
            let lambda: Vec<f64> = (0..*d).map(|_| rng.random::<f64>() * r).collect();
            let mut packed = vec![0.0; crate::forms::packed_dim(*d)];
            for i in 0..*d {
                for j in 0..=i {
                    let mut v = 0.0;
                    for (k, &lk) in lambda.iter().enumerate() {
                        v += q[(i, k)] * lk * q[(j, k)];
                    }
                    packed[crate::forms::packed_index(i, j)] = v;
                }
            }
            Ok(PointVec::from_vec_unchecked(packed))
        }
        FamilyKind::LorentzQuadratic { m } => {
            let a = rng.random::<f64>() * r;
            let b = rng.random::<f64>() * r;
            let center = 0.5 * (a + b);
            let radius = 0.5 * (a - b).abs();
            Ok(lorentz_point(*m, center, radius, rng))
        }
        FamilyKind::ElementarySymmetric { .. } | FamilyKind::DenseHomogeneous { .. } => {
            // Shift a Gaussian point onto the cone boundary, then rescale so
            // λ_max is a uniform fraction of the cap.
            let y = PointVec::from_vec_unchecked(gaussian_entries(rng, form.dimension()));
            let spec = eigenvalues(form, &y)?;
            let lo = spec.lambda_min();
            let range = spec.lambda_max() - lo;
            if range <= f64::EPSILON * spec.spectral_norm().max(1.0) {
                return Ok(PointVec::zeros(form.dimension()));
            }
            let mut shifted = y.clone();
            shifted.axpy(-lo, form.direction());
            let scale = rng.random::<f64>() * r / range;
            Ok(shifted.scaled(scale))
        }
    }
}

/// Rank-one-style cone sample: an extreme direction scaled to a uniform
/// fraction of the cap. No built-in recipe exists for elementary-symmetric
/// or dense forms (their extreme rays have restriction roots of high
/// multiplicity, which the generic eigenvalue route cannot certify).
fn scaled_rank_one_sample(form: &HyperbolicForm, r: f64, rng: &mut ChaCha8Rng) -> Result<PointVec> {
    match form.kind() {
        FamilyKind::Product { m } => {
            let e = form.direction();
            let i = rng.random_range(0..*m);
            let c = rng.random::<f64>() * r;
            let mut x = vec![0.0; *m];
            x[i] = c * e[i];
            Ok(PointVec::from_vec_unchecked(x))
        }
        FamilyKind::DeterminantSymmetric { d } => {
            let mut u = gaussian_entries(rng, *d);
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-300 {
                u = vec![0.0; *d];
                u[0] = 1.0;
            } else {
                for v in &mut u {
                    *v /= norm;
                }
            }
            let c = rng.random::<f64>() * r;
            Ok(pack_outer(&u).scaled(c))
        }
        FamilyKind::LorentzQuadratic { m } => {
            let c = rng.random::<f64>() * r;
            Ok(lorentz_point(*m, 0.5 * c, 0.5 * c, rng))
        }
        FamilyKind::ElementarySymmetric { .. } | FamilyKind::DenseHomogeneous { .. } => {
            Err(Error::InvalidArgument(format!(
                "scaled_rank_one has no built-in recipe for the {} family; \
                 supply a custom sampler",
                form.family_name()
            )))
        }
    }
}

/// Lorentz point with eigenvalues center ± radius, on a random spatial
/// direction.
fn lorentz_point(m: usize, center: f64, radius: f64, rng: &mut ChaCha8Rng) -> PointVec {
    let mut tail = gaussian_entries(rng, m - 1);
    let norm = tail.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-300 {
        tail = vec![0.0; m - 1];
        tail[0] = 1.0;
    } else {
        for v in &mut tail {
            *v /= norm;
        }
    }
    let mut x = Vec::with_capacity(m);
    x.push(center);
    for v in tail {
        x.push(v * radius);
    }
    PointVec::from_vec_unchecked(x)
}

/// Result of a cone Chernoff run: empirical eigenvalue tails of Σxᵢ against
/// the closed-form bounds, plus the estimated means they are centered on.
#[derive(Clone, Debug)]
pub struct ConeChernoffOutcome {
    /// Pr[λ_max(Σxᵢ) ≥ (1+δ)·μ_max].
    pub max_tail: TailEstimate,
    /// Pr[λ_min(Σxᵢ) ≤ (1−δ)·μ_min].
    pub min_tail: TailEstimate,
    /// d·((1+δ)^{1+δ}/e^δ)^{−μ_max/R}, clamped to 1.
    pub bound_max: f64,
    /// d·((1−δ)^{1−δ}/e^{−δ})^{−μ_min/R}, clamped to 1.
    pub bound_min: f64,
    /// Estimated μ_max = Σᵢ E[λ_max(xᵢ)].
    pub mu_max: f64,
    /// Estimated μ_min = Σᵢ E[λ_min(xᵢ)].
    pub mu_min: f64,
    pub delta: f64,
}

/// Sample Σᵢ xᵢ per trial, estimate μ_max/μ_min from the same seed stream
/// (every trial's samples are reused for both the means and the tails), and
/// compare the empirical tails at (1±δ)·μ against the closed-form bounds.
pub fn cone_chernoff_experiment(
    spec: &ConeSampleSpec,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<ConeChernoffOutcome> {
    if trials < 100 {
        return Err(Error::InvalidArgument(
            "cone Chernoff experiment needs at least 100 trials".into(),
        ));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(
            "delta must lie in [0, 1]: the lower tail needs 1−δ ≥ 0".into(),
        ));
    }

    // One pass records per trial: λ_max/λ_min of the sum and the per-sample
    // eigenvalue totals the means are estimated from.
    let segments = map_segments(trials, |range| -> Result<Vec<[f64; 4]>> {
        let mut out = Vec::with_capacity(range.clone().count());
        for trial in range {
            let mut rng = trial_rng(seed, StreamDomain::ConeSamples, trial);
            let mut sum = PointVec::zeros(spec.form.dimension());
            let mut s_max = 0.0;
            let mut s_min = 0.0;
            for _ in 0..spec.n {
                let (x, sp) = spec
                    .sample_checked(&mut rng)
                    .map_err(|e| e.in_trial(trial))?;
                sum.axpy(1.0, &x);
                s_max += sp.lambda_max();
                s_min += sp.lambda_min();
            }
            let total = eigenvalues(&spec.form, &sum).map_err(|e| e.in_trial(trial))?;
            out.push([total.lambda_max(), total.lambda_min(), s_max, s_min]);
        }
        Ok(out)
    });
    let mut stats = Vec::with_capacity(trials as usize);
    for s in segments {
        stats.extend(s?);
    }

    let tf = trials as f64;
    let mu_max = stats.iter().map(|r| r[2]).sum::<f64>() / tf;
    let mu_min = stats.iter().map(|r| r[3]).sum::<f64>() / tf;
    let thr_max = (1.0 + delta) * mu_max;
    let thr_min = (1.0 - delta) * mu_min;
    let hits_max = stats.iter().filter(|r| r[0] >= thr_max).count() as u64;
    let hits_min = stats.iter().filter(|r| r[1] <= thr_min).count() as u64;

    let d = spec.form.degree() as f64;
    let x_ln_x = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    let g_max = x_ln_x(1.0 + delta) - delta;
    let g_min = x_ln_x(1.0 - delta) + delta;
    let bound_max = (d * (-(mu_max / spec.r) * g_max).exp()).min(1.0);
    let bound_min = (d * (-(mu_min / spec.r) * g_min).exp()).min(1.0);

    Ok(ConeChernoffOutcome {
        max_tail: TailEstimate::from_counts(thr_max, hits_max, trials, seed)?,
        min_tail: TailEstimate::from_counts(thr_min, hits_min, trials, seed)?,
        bound_max,
        bound_min,
        mu_max,
        mu_min,
        delta,
    })
}
