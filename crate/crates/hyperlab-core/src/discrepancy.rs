//! Low-discrepancy sign assignments and k-partitions in hyperbolic norms.
//!
//! Searches: exhaustive sign enumeration (Gray-code walk over 2^{n−1}
//! patterns), seeded random sign sampling, and k-partition optimization
//! (exhaustive base-k odometer, or seeded first-improvement local search when
//! the assignment space is too large). Verified against the closed-form
//! ceilings: 8σ for sign discrepancy, (σ/k)·δ(kε/σ, n, rk) and
//! (√ε + √(σ/k))² for partitions of cone vectors, and 2√(ε(2σ−ε)) for the
//! signs induced by an optimal 2-partition.

use crate::concentration::{
    fold_sign_patterns, rademacher_value, require_enumerable, walk_sign, VectorSystem,
};
use crate::error::{Error, Result};
use crate::forms::{HyperbolicForm, PointVec};
use crate::mixed::{delta_bound, DeltaQuery, Extent};
use crate::parallel::map_segments;
use crate::rng::{rademacher_signs, trial_rng, StreamDomain};
use crate::spectra::{eigenvalues, ConePosition, RANK_REL_TOL};
use rand::Rng;

/// A sign vector r ∈ {−1, +1}ⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    signs: Vec<i8>,
}

impl SignAssignment {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidArgument(
                "sign assignment needs at least one entry".into(),
            ));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(SignAssignment { signs })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// An assignment of n items to parts 0..k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    part_of: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(part_of: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("partition needs k ≥ 1".into()));
        }
        if let Some(&bad) = part_of.iter().find(|p| **p >= k) {
            return Err(Error::InvalidArgument(format!(
                "part index {bad} out of range for k = {k}"
            )));
        }
        Ok(Partition { part_of, k })
    }

    /// part_of()[i] is the part index of item i.
    pub fn part_of(&self) -> &[usize] {
        &self.part_of
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Item indices grouped by part.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.k];
        for (i, &p) in self.part_of.iter().enumerate() {
            parts[p].push(i);
        }
        parts
    }
}

/// Global minimizer of ‖Σ rᵢxᵢ‖_h over sign patterns with r₁ = +1 (the norm
/// is even in the signs, so the half space suffices). Ties resolve to the
/// first minimizer in Gray-walk order; the returned value is recomputed from
/// the returned signs, so it equals `rademacher_value` of the assignment
/// exactly.
pub fn best_signs_exhaustive(sys: &VectorSystem) -> Result<(SignAssignment, f64)> {
    require_enumerable(sys.n(), "best_signs_exhaustive")?;
    let form = sys.form();
    let segments = fold_sign_patterns(
        sys.vectors(),
        true,
        || (f64::INFINITY, 0u64),
        |acc, i, sum| {
            let v = eigenvalues(form, &PointVec::from_vec_unchecked(sum.to_vec()))?.spectral_norm();
            if v < acc.0 {
                *acc = (v, i);
            }
            Ok(())
        },
    )?;
    let mut best = (f64::INFINITY, 0u64);
    for s in segments {
        if s.0 < best.0 {
            best = s;
        }
    }
    let mut signs = Vec::with_capacity(sys.n());
    signs.push(1);
    for j in 0..sys.n() - 1 {
        signs.push(walk_sign(best.1, j));
    }
    let assignment = SignAssignment::new(signs)?;
    let value = rademacher_value(sys, assignment.signs(), f64::INFINITY)?;
    Ok((assignment, value))
}

/// Outcome of seeded random sign search: the best assignment found and the
/// full sorted value sample for threshold queries.
#[derive(Clone, Debug)]
pub struct RandomSignSearch {
    best: SignAssignment,
    best_value: f64,
    /// All trial values, sorted ascending.
    values: Vec<f64>,
    trials: u64,
    seed: u64,
}

impl RandomSignSearch {
    pub fn best(&self) -> &SignAssignment {
        &self.best
    }

    pub fn best_value(&self) -> f64 {
        self.best_value
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fraction of trials whose value met the threshold (value ≤ threshold).
    pub fn success_fraction_at(&self, threshold: f64) -> f64 {
        self.values.partition_point(|v| *v <= threshold) as f64 / self.trials as f64
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sample sign vectors from independent per-trial streams and track the
/// minimizer (ties resolve to the earliest trial). Deterministic in
/// (seed, trials) regardless of thread count.
pub fn best_signs_random(sys: &VectorSystem, trials: u64, seed: u64) -> Result<RandomSignSearch> {
    if trials < 100 {
        return Err(Error::InvalidArgument(
            "random sign search needs at least 100 trials".into(),
        ));
    }
    let form = sys.form();
    let n = sys.n();
    type SegBest = (f64, u64, Vec<i8>);
    let segments = map_segments(trials, |range| -> Result<(Vec<f64>, Option<SegBest>)> {
        let mut values = Vec::with_capacity(range.clone().count());
        let mut best: Option<SegBest> = None;
        for trial in range {
            let mut rng = trial_rng(seed, StreamDomain::SignSearch, trial);
            let signs = rademacher_signs(&mut rng, n);
            let mut sum = PointVec::zeros(form.dimension());
            for (v, &s) in sys.vectors().iter().zip(&signs) {
                sum.axpy(f64::from(s), v);
            }
            let value = eigenvalues(form, &sum)
                .map_err(|e| e.in_trial(trial))?
                .spectral_norm();
            values.push(value);
            if best.as_ref().is_none_or(|b| value < b.0) {
                best = Some((value, trial, signs));
            }
        }
        Ok((values, best))
    });

    let mut values = Vec::with_capacity(trials as usize);
    let mut best: Option<SegBest> = None;
    for seg in segments {
        let (vs, seg_best) = seg?;
        values.extend(vs);
        if let Some(b) = seg_best {
            if best.as_ref().is_none_or(|cur| b.0 < cur.0) {
                best = Some(b);
            }
        }
    }
    let (best_value, _, best_signs) = best.expect("trials ≥ 100 produces a best");
    values.sort_by(f64::total_cmp);
    Ok(RandomSignSearch {
        best: SignAssignment::new(best_signs)?,
        best_value,
        values,
        trials,
        seed,
    })
}

// ---------------------------------------------------------------------------
// k-partitions of cone vectors
// ---------------------------------------------------------------------------

/// Search limits for [`partition_search`].
#[derive(Clone, Copy, Debug)]
pub struct PartitionBudget {
    /// Exhaustive enumeration runs when kⁿ does not exceed this.
    pub exhaustive_limit: u64,
    /// Restart count for the local-search fallback.
    pub restarts: u64,
    /// Seed for the local-search restarts.
    pub seed: u64,
}

impl Default for PartitionBudget {
    fn default() -> Self {
        PartitionBudget {
            exhaustive_limit: 2_000_000,
            restarts: 50,
            seed: 0,
        }
    }
}

/// Result of a partition search: the best assignment with the statistics the
/// partition theorems are phrased in, and both closed-form ceilings.
#[derive(Clone, Debug)]
pub struct PartitionOutcome {
    pub partition: Partition,
    /// max_j ‖Σ_{i∈S_j} xᵢ‖_h for the returned partition.
    pub max_part_norm: f64,
    /// ε = maxᵢ tr[xᵢ].
    pub epsilon: f64,
    /// σ = ‖Σᵢ xᵢ‖_h.
    pub sigma: f64,
    /// rk used in the δ ceiling: k × maxᵢ rank(xᵢ).
    pub rank_k: u64,
    /// (σ/k) · δ(kε/σ, n, rk); equals `bound_simple` when ε or σ vanish.
    pub bound_delta: f64,
    /// (√ε + √(σ/k))².
    pub bound_simple: f64,
    /// Whether the full assignment space was enumerated.
    pub exhaustive: bool,
}

/// Part norms sorted descending: minimizing this profile lexicographically
/// minimizes the max part norm with deterministic tie-breaks down the
/// profile.
fn norm_profile(form: &HyperbolicForm, sums: &[PointVec]) -> Result<Vec<f64>> {
    let mut profile = Vec::with_capacity(sums.len());
    for s in sums {
        profile.push(eigenvalues(form, s)?.spectral_norm());
    }
    profile.sort_by(|a, b| b.total_cmp(a));
    Ok(profile)
}

fn profile_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

fn part_sums(xs: &[PointVec], assign: &[usize], k: usize, m: usize) -> Vec<PointVec> {
    let mut sums = vec![PointVec::zeros(m); k];
    for (x, &p) in xs.iter().zip(assign) {
        sums[p].axpy(1.0, x);
    }
    sums
}

/// Exhaustive scan of all kⁿ assignments via a base-k odometer with
/// incremental part-sum updates; segments rebuild their starting state so
/// parallel runs merge deterministically (profile, then index).
fn partition_exhaustive(
    form: &HyperbolicForm,
    xs: &[PointVec],
    k: usize,
    total: u64,
) -> Result<Vec<usize>> {
    let m = form.dimension();
    let decode = |idx: u64| -> Vec<usize> {
        let mut digits = Vec::with_capacity(xs.len());
        let mut rest = idx;
        for _ in 0..xs.len() {
            digits.push((rest % k as u64) as usize);
            rest /= k as u64;
        }
        digits
    };
    let segments = map_segments(total, |range| -> Result<Option<(Vec<f64>, u64)>> {
        let mut digits = decode(range.start);
        let mut sums = part_sums(xs, &digits, k, m);
        let mut best: Option<(Vec<f64>, u64)> = None;
        for idx in range.clone() {
            let profile = norm_profile(form, &sums)?;
            if best
                .as_ref()
                .is_none_or(|(bp, _)| profile_less(&profile, bp))
            {
                best = Some((profile, idx));
            }
            if idx + 1 < range.end {
                // Odometer step: advance digit 0, carrying into higher digits.
                for (i, x) in xs.iter().enumerate() {
                    let old = digits[i];
                    let new = if old + 1 == k { 0 } else { old + 1 };
                    sums[old].axpy(-1.0, x);
                    sums[new].axpy(1.0, x);
                    digits[i] = new;
                    if new != 0 {
                        break;
                    }
                }
            }
        }
        Ok(best)
    });
    let mut best: Option<(Vec<f64>, u64)> = None;
    for seg in segments {
        if let Some((profile, idx)) = seg? {
            if best
                .as_ref()
                .is_none_or(|(bp, bi)| profile_less(&profile, bp) || (profile == *bp && idx < *bi))
            {
                best = Some((profile, idx));
            }
        }
    }
    Ok(decode(best.expect("assignment space is nonempty").1))
}

const LOCAL_SEARCH_MOVE_CAP: usize = 100_000;

/// Seeded local search: random start per restart, single-element moves
/// scanned in (item, part) order, first strict profile improvement applied,
/// repeated to a local optimum; restarts merge by (profile, restart index).
fn partition_local_search(
    form: &HyperbolicForm,
    xs: &[PointVec],
    k: usize,
    budget: &PartitionBudget,
) -> Result<Vec<usize>> {
    // (norm profile, restart index, assignment) of a restart's local optimum.
    type Candidate = (Vec<f64>, u64, Vec<usize>);
    let m = form.dimension();
    let segments = map_segments(budget.restarts, |range| -> Result<Option<Candidate>> {
        let mut best: Option<Candidate> = None;
        for restart in range {
            let mut rng = trial_rng(budget.seed, StreamDomain::PartitionSearch, restart);
            let mut assign: Vec<usize> = (0..xs.len()).map(|_| rng.random_range(0..k)).collect();
            let mut sums = part_sums(xs, &assign, k, m);
            let mut profile = norm_profile(form, &sums).map_err(|e| e.in_trial(restart))?;
            let mut moves = 0usize;
            'descent: while moves < LOCAL_SEARCH_MOVE_CAP {
                for i in 0..xs.len() {
                    let old = assign[i];
                    for p in 0..k {
                        if p == old {
                            continue;
                        }
                        sums[old].axpy(-1.0, &xs[i]);
                        sums[p].axpy(1.0, &xs[i]);
                        let cand = norm_profile(form, &sums).map_err(|e| e.in_trial(restart))?;
                        if profile_less(&cand, &profile) {
                            assign[i] = p;
                            profile = cand;
                            moves += 1;
                            continue 'descent;
                        }
                        sums[p].axpy(-1.0, &xs[i]);
                        sums[old].axpy(1.0, &xs[i]);
                    }
                }
                break;
            }
            if best
                .as_ref()
                .is_none_or(|(bp, _, _)| profile_less(&profile, bp))
            {
                best = Some((profile, restart, assign));
            }
        }
        Ok(best)
    });
    let mut best: Option<(Vec<f64>, u64, Vec<usize>)> = None;
    for seg in segments {
        if let Some(cand) = seg? {
            if best.as_ref().is_none_or(|(bp, bi, _)| {
                profile_less(&cand.0, bp) || (cand.0 == *bp && cand.1 < *bi)
            }) {
                best = Some(cand);
            }
        }
    }
    Ok(best.expect("restarts ≥ 1 produce a candidate").2)
}

/// Minimize max_j ‖Σ_{i∈S_j} xᵢ‖_h over partitions of the cone vectors into
/// k parts. Exhaustive when kⁿ fits the budget, seeded local search
/// otherwise. Also reports ε = max trace, σ = ‖Σxᵢ‖_h, and the two
/// closed-form ceilings the optimum is compared against.
pub fn partition_search(
    form: &HyperbolicForm,
    xs: &[PointVec],
    k: usize,
    budget: &PartitionBudget,
) -> Result<PartitionOutcome> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "partition search needs k ≥ 2".into(),
        ));
    }
    if xs.is_empty() {
        return Err(Error::InvalidArgument(
            "partition search needs at least one vector".into(),
        ));
    }
    if budget.restarts == 0 {
        return Err(Error::InvalidArgument(
            "partition search needs at least one restart".into(),
        ));
    }
    let mut epsilon = 0.0f64;
    let mut max_rank = 0usize;
    let mut total = PointVec::zeros(form.dimension());
    for (i, x) in xs.iter().enumerate() {
        form.check_dim(x, "partition vector")?;
        let spec = eigenvalues(form, x)?;
        if spec.cone_position(RANK_REL_TOL)? == ConePosition::Outside {
            return Err(Error::InvalidArgument(format!(
                "vector {i} lies outside the hyperbolicity cone (λ_min = {:.6e})",
                spec.lambda_min()
            )));
        }
        epsilon = epsilon.max(spec.trace());
        max_rank = max_rank.max(spec.rank(RANK_REL_TOL)?.rank);
        total.axpy(1.0, x);
    }
    let sigma = eigenvalues(form, &total)?.spectral_norm();

    // kⁿ without overflow: saturate far beyond any usable limit.
    let space: u64 = {
        let mut acc: u128 = 1;
        for _ in 0..xs.len() {
            acc = acc.saturating_mul(k as u128);
            if acc > u128::from(u64::MAX) {
                acc = u128::from(u64::MAX);
                break;
            }
        }
        acc as u64
    };
    let exhaustive = space <= budget.exhaustive_limit;
    let assign = if exhaustive {
        partition_exhaustive(form, xs, k, space)?
    } else {
        partition_local_search(form, xs, k, budget)?
    };

    let sums = part_sums(xs, &assign, k, form.dimension());
    let max_part_norm = norm_profile(form, &sums)?[0];

    let kf = k as f64;
    let bound_simple = (epsilon.sqrt() + (sigma / kf).sqrt()).powi(2);
    let rank_k = (max_rank as u64) * (k as u64);
    let bound_delta = if epsilon > 0.0 && sigma > 0.0 {
        let q = DeltaQuery::new(
            kf * epsilon / sigma,
            Extent::Finite(xs.len() as u64),
            Extent::Finite(rank_k.max(1)),
        )?;
        (sigma / kf) * delta_bound(&q)?.value
    } else {
        // Degenerate statistics (all-zero vectors): both ceilings coincide.
        bound_simple
    };

    Ok(PartitionOutcome {
        partition: Partition::new(assign, k)?,
        max_part_norm,
        epsilon,
        sigma,
        rank_k,
        bound_delta,
        bound_simple,
        exhaustive,
    })
}

/// Signs induced by a 2-partition: +1 on part 0, −1 on part 1.
pub fn signs_from_partition(part: &Partition) -> Result<SignAssignment> {
    if part.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "sign extraction needs a 2-partition, got k = {}",
            part.k()
        )));
    }
    SignAssignment::new(
        part.part_of()
            .iter()
            .map(|&p| if p == 0 { 1 } else { -1 })
            .collect(),
    )
}

/// 2√(ε(2σ−ε)): the ceiling for the signed sum induced by an optimal
/// 2-partition of cone vectors with traces ≤ ε and ‖Σxᵢ‖_h ≤ σ.
pub fn subisotropic_sign_bound(epsilon: f64, sigma: f64) -> f64 {
    2.0 * (epsilon * (2.0 * sigma - epsilon)).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    fn product_system(vectors: &[&[f64]]) -> VectorSystem {
        let m = vectors[0].len();
        let form = HyperbolicForm::product(m).unwrap();
        VectorSystem::new(form, vectors.iter().map(|v| pv(v)).collect()).unwrap()
    }

    #[test]
    fn exhaustive_single_vector() {
        let sys = product_system(&[&[1.0, -2.0, 0.5]]);
        let (signs, value) = best_signs_exhaustive(&sys).unwrap();
        assert_eq!(signs.signs(), &[1]);
        assert_eq!(value, 2.0);
    }

    #[test]
    fn exhaustive_cancels_equal_pair() {
        let sys = product_system(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]);
        let (signs, value) = best_signs_exhaustive(&sys).unwrap();
        assert_eq!(signs.signs(), &[1, -1]);
        assert_eq!(value, 0.0);
    }

    #[test]
    fn exhaustive_triple_prefers_first_gray_minimizer() {
        let sys = product_system(&[&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let (signs, value) = best_signs_exhaustive(&sys).unwrap();
        assert_eq!(value, 1.0);
        // Gray walk visits (+,+,+), (+,-,+), (+,-,-), (+,+,-): the first
        // value-1 pattern flips only the duplicate.
        assert_eq!(signs.signs(), &[1, -1, 1]);
    }

    #[test]
    fn exhaustive_budget() {
        let form = HyperbolicForm::product(2).unwrap();
        let sys = VectorSystem::new(form, vec![pv(&[1.0, 0.0]); 25]).unwrap();
        assert!(matches!(
            best_signs_exhaustive(&sys).unwrap_err(),
            Error::BudgetExceeded(_)
        ));
    }

    #[test]
    fn random_search_thresholds_and_dominance() {
        let sys = product_system(&[
            &[0.9, 0.1, 0.0],
            &[0.2, -0.7, 0.3],
            &[0.0, 0.4, -1.1],
            &[0.5, 0.5, 0.5],
            &[-0.3, 0.2, 0.2],
        ]);
        let search = best_signs_random(&sys, 300, 11).unwrap();
        let (_, exact) = best_signs_exhaustive(&sys).unwrap();

        // The certified optimum floors every sampled value.
        assert!(search.best_value() >= exact - 1e-12);
        assert_eq!(search.success_fraction_at(sys.total_norm()), 1.0);
        assert_eq!(search.success_fraction_at(exact - 1e-9), 0.0);

        let again = best_signs_random(&sys, 300, 11).unwrap();
        assert_eq!(search.best_value(), again.best_value());
        assert_eq!(search.values(), again.values());
        assert!(best_signs_random(&sys, 99, 11).is_err());
    }

    #[test]
    fn partition_of_identical_vectors_spreads_them() {
        let form = HyperbolicForm::product(3).unwrap();
        let xs = vec![pv(&[0.5, 0.0, 0.0]); 3];
        let out = partition_search(&form, &xs, 3, &PartitionBudget::default()).unwrap();
        assert!(out.exhaustive);
        assert!((out.max_part_norm - 0.5).abs() < 1e-12);
        let mut counts = [0usize; 3];
        for &p in out.partition.part_of() {
            counts[p] += 1;
        }
        assert_eq!(counts, [1, 1, 1]);
    }

    #[test]
    fn partition_of_zero_vectors_is_zero() {
        let form = HyperbolicForm::product(2).unwrap();
        let xs = vec![pv(&[0.0, 0.0]); 4];
        let out = partition_search(&form, &xs, 2, &PartitionBudget::default()).unwrap();
        assert_eq!(out.max_part_norm, 0.0);
        assert_eq!(out.sigma, 0.0);
        assert_eq!(out.bound_delta, out.bound_simple);
    }

    #[test]
    fn partition_pairs_summing_to_direction() {
        // Coordinate pairs summing to e: σ = 1, ε = 0.7; the 0.7 vector
        // forces the optimum.
        let form = HyperbolicForm::product(3).unwrap();
        let xs = vec![
            pv(&[0.3, 0.0, 0.0]),
            pv(&[0.7, 0.0, 0.0]),
            pv(&[0.0, 0.4, 0.0]),
            pv(&[0.0, 0.6, 0.0]),
            pv(&[0.0, 0.0, 0.5]),
            pv(&[0.0, 0.0, 0.5]),
        ];
        let out = partition_search(&form, &xs, 2, &PartitionBudget::default()).unwrap();
        assert!(out.exhaustive);
        assert!((out.sigma - 1.0).abs() < 1e-12);
        assert!((out.epsilon - 0.7).abs() < 1e-12);
        assert!((out.max_part_norm - 0.7).abs() < 1e-12);
        assert!(out.max_part_norm <= out.bound_simple * (1.0 + 1e-9));
        assert!(out.bound_delta <= out.bound_simple * (1.0 + 1e-6));
    }

    #[test]
    fn partition_rejects_outside_cone_and_bad_k() {
        let form = HyperbolicForm::product(2).unwrap();
        let outside = vec![pv(&[1.0, -1.0])];
        assert!(matches!(
            partition_search(&form, &outside, 2, &PartitionBudget::default()).unwrap_err(),
            Error::InvalidArgument(_)
        ));
        let ok = vec![pv(&[1.0, 0.0])];
        assert!(partition_search(&form, &ok, 1, &PartitionBudget::default()).is_err());
    }

    #[test]
    fn local_search_branch_is_deterministic_and_dominated() {
        let form = HyperbolicForm::product(3).unwrap();
        let xs = vec![
            pv(&[0.2, 0.1, 0.0]),
            pv(&[0.1, 0.3, 0.0]),
            pv(&[0.0, 0.2, 0.4]),
            pv(&[0.3, 0.0, 0.1]),
            pv(&[0.1, 0.1, 0.1]),
            pv(&[0.0, 0.0, 0.3]),
        ];
        let exact = partition_search(&form, &xs, 2, &PartitionBudget::default()).unwrap();
        let forced = PartitionBudget {
            exhaustive_limit: 1,
            ..PartitionBudget::default()
        };
        let local_a = partition_search(&form, &xs, 2, &forced).unwrap();
        let local_b = partition_search(&form, &xs, 2, &forced).unwrap();
        assert!(!local_a.exhaustive);
        assert_eq!(local_a.partition, local_b.partition);
        assert!(local_a.max_part_norm >= exact.max_part_norm - 1e-12);
        // Six vectors, two parts: local search with 50 restarts finds the
        // global optimum on this instance.
        assert!((local_a.max_part_norm - exact.max_part_norm).abs() < 1e-9);
    }

    #[test]
    fn signs_from_partition_basics() {
        let all_zero = Partition::new(vec![0, 0, 0], 2).unwrap();
        assert_eq!(signs_from_partition(&all_zero).unwrap().signs(), &[1, 1, 1]);
        let alternating = Partition::new(vec![0, 1, 0, 1], 2).unwrap();
        assert_eq!(
            signs_from_partition(&alternating).unwrap().signs(),
            &[1, -1, 1, -1]
        );
        let three = Partition::new(vec![0, 1, 2], 3).unwrap();
        assert!(signs_from_partition(&three).is_err());
    }

    #[test]
    fn partition_signs_meet_the_trace_bound() {
        // Conforming instance: six cone vectors with traces ≤ ε = 0.2 and
        // σ = 0.4; the optimal 2-partition halves the sum exactly, so the
        // induced signs cancel far below 2√(ε(2σ−ε)).
        let form = HyperbolicForm::product(3).unwrap();
        let xs = vec![
            pv(&[0.2, 0.0, 0.0]),
            pv(&[0.0, 0.2, 0.0]),
            pv(&[0.0, 0.0, 0.2]),
            pv(&[0.2, 0.0, 0.0]),
            pv(&[0.0, 0.2, 0.0]),
            pv(&[0.0, 0.0, 0.2]),
        ];
        let out = partition_search(&form, &xs, 2, &PartitionBudget::default()).unwrap();
        let signs = signs_from_partition(&out.partition).unwrap();
        let sys = VectorSystem::new(form, xs).unwrap();
        let value = rademacher_value(&sys, signs.signs(), f64::INFINITY).unwrap();
        let bound = subisotropic_sign_bound(out.epsilon, out.sigma);
        assert!((bound - 2.0 * (0.2f64 * 0.6).sqrt()).abs() < 1e-12);
        assert!(value <= bound + 1e-8, "{value} > {bound}");
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0, 2], 2).is_err());
        assert!(Partition::new(vec![0], 0).is_err());
        assert!(SignAssignment::new(vec![1, 0]).is_err());
        assert!(SignAssignment::new(vec![]).is_err());
    }
}
