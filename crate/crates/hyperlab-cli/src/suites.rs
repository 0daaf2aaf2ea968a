//! Suite runners. Each takes a validated experiment description, drives the
//! library, and returns CSV rows plus named verdicts. Verdicts are
//! `asserted` when the theory pins the inequality (they decide the exit
//! code) and `reported` when only an implied constant can be measured.
//!
//! Row conventions shared by all suites: the `index` column distinguishes
//! measurement flavors inside one suite (0 = primary/exhaustive, 1 =
//! Monte-Carlo or secondary, 2+ = exact cross-checks), and every row carries
//! the seed that reproduces it.

use std::collections::BTreeMap;

use hyperlab_core::anticoncentration::{
    boundary_measure, exact_boundary_measure, exact_interval_probability, good_bucket_fraction,
    interval_probability, random_bucket_hash,
};
use hyperlab_core::concentration::{
    cone_chernoff_experiment, exact_distribution, exact_moment, expectation_bound, khinchin_ratio,
    m2q, mc_tail, moment_bound, multinomial_inequality_check, tail_bound_rademacher, tightest_c2,
};
use hyperlab_core::discrepancy::{
    best_signs_exhaustive, best_signs_random, partition_search, signs_from_partition,
    subisotropic_sign_bound,
};
use hyperlab_core::mixed::{delta_bound, lambda_max_mixed};
use hyperlab_core::rng::{trial_rng, StreamDomain};
use hyperlab_core::spectra::{eigenvalues, eigenvalues_via_restriction};
use hyperlab_core::stats::wilson99;
use hyperlab_core::{
    ConeGenerator, ConePair, ConeSampleSpec, DeltaQuery, Extent, PartitionBudget, PointVec,
    TailEstimate, VectorSystem,
};
use rand::Rng;

use crate::report::{Row, Verdict};
use crate::spec::{
    generate_vectors, ExperimentSpec, FamilySpec, GeneratorKind, Params, Suite, VectorSpec,
};
use crate::{CliError, Result};

/// Eigenvalue-path and factorization agreement, relative to 1 + scale.
const KERNEL_TOL: f64 = 1e-7;
/// Relative slack on norm comparisons between exactly computed quantities.
const REL_SLACK: f64 = 1e-9;
/// Absolute slack on exactly enumerated probabilities.
const EXACT_SLACK: f64 = 1e-12;
/// Relative slack for the moment oracle against its closed-form ceiling.
const MOMENT_SLACK: f64 = 1e-10;
/// Relative slack for ceilings that come out of the numerical δ infimum.
const DELTA_SLACK: f64 = 1e-6;
/// Exact enumeration caps: sign patterns (2^n) and partition assignments.
const ENUMERABLE_SIGNS: usize = 20;
const ENUMERABLE_CROSSCHECK: usize = 14;
const EXHAUSTIVE_SIGNS: usize = 24;

/// Everything a suite produced.
pub struct SuiteRun {
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    pub constants: BTreeMap<String, f64>,
    pub seeds: BTreeMap<String, u64>,
}

impl SuiteRun {
    fn new() -> Self {
        SuiteRun {
            rows: Vec::new(),
            verdicts: Vec::new(),
            constants: BTreeMap::new(),
            seeds: BTreeMap::new(),
        }
    }

    /// Fold a sub-run in, namespacing its verdicts, constants, and seeds.
    fn merge(&mut self, prefix: &str, sub: SuiteRun) {
        self.rows.extend(sub.rows);
        for mut v in sub.verdicts {
            v.name = format!("{prefix}.{}", v.name);
            self.verdicts.push(v);
        }
        for (k, v) in sub.constants {
            self.constants.insert(format!("{prefix}.{k}"), v);
        }
        for (k, v) in sub.seeds {
            self.seeds.insert(format!("{prefix}.{k}"), v);
        }
    }
}

/// Dispatch one validated experiment description.
pub fn run_suite(spec: &ExperimentSpec) -> Result<SuiteRun> {
    match spec.suite {
        Suite::Eig => run_eig(spec),
        Suite::Norms => run_norms(spec),
        Suite::Chernoff => run_chernoff(spec),
        Suite::ConeChernoff => run_cone_chernoff(spec),
        Suite::Anticoncentration => run_anticoncentration(spec),
        Suite::Discrepancy => run_discrepancy(spec),
        Suite::KadisonSinger => run_kadison_singer(spec),
        Suite::Mixed => run_mixed(spec),
        Suite::VerifyAll => verify_all(spec.seed),
    }
}

fn sum_points(xs: &[PointVec]) -> Result<PointVec> {
    signed_sum(xs, None)
}

/// Σ signsᵢ·xᵢ (all +1 when `signs` is `None`).
fn signed_sum(xs: &[PointVec], signs: Option<&[i8]>) -> Result<PointVec> {
    let m = xs.first().map_or(0, PointVec::len);
    let mut acc = vec![0.0; m];
    for (i, x) in xs.iter().enumerate() {
        let c = signs.map_or(1.0, |s| f64::from(s[i]));
        for (a, &xi) in acc.iter_mut().zip(x.as_slice()) {
            *a += c * xi;
        }
    }
    PointVec::new(acc).map_err(CliError::from)
}

fn estimate_cells(row: Row, est: &TailEstimate) -> Row {
    row.set_f("p_hat", est.p_hat)
        .set_f("ci_low", est.ci_low)
        .set_f("ci_high", est.ci_high)
        .set("trials", est.trials)
}

// ---------------------------------------------------------------------------
// eig
// ---------------------------------------------------------------------------

/// Spectra of every input point, cross-checked between the closed-form
/// eigenvalue path and the generic interpolation/root path.
fn run_eig(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let xs = generate_vectors(&form, &spec.vectors, spec.seed, 0)?;
    let family = spec.family.label();
    let mut run = SuiteRun::new();
    let mut worst = 0.0f64;
    let mut all_ok = true;
    for (i, x) in xs.iter().enumerate() {
        let closed = eigenvalues(&form, x)?;
        let generic = eigenvalues_via_restriction(&form, x)?;
        let scale = 1.0 + closed.spectral_norm();
        let err = closed
            .values()
            .iter()
            .zip(generic.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err / scale);
        let ok = err <= KERNEL_TOL * scale;
        all_ok &= ok;
        for (j, &lambda) in closed.values().iter().enumerate() {
            run.rows.push(
                Row::new("eig", &family)
                    .set("n", xs.len())
                    .set("d", form.degree())
                    .set("index", i)
                    .set("position", j)
                    .set_f("value", lambda)
                    .set("verdict", if ok { "pass" } else { "fail" })
                    .set("seed", spec.seed),
            );
        }
    }
    run.verdicts.push(Verdict::asserted(
        "eigenvalue_paths_agree",
        all_ok,
        format!("worst disagreement {worst:.3e}·scale, tolerance {KERNEL_TOL:.0e}·scale"),
    ));
    run.constants
        .insert("worst_path_disagreement".into(), worst);
    Ok(run)
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

/// Eigenvalue q-norms against their two-sided spectral-norm equivalence:
/// ‖x‖_h ≤ ‖x‖_{h,q} ≤ d^{1/q}·‖x‖_h.
fn run_norms(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let xs = generate_vectors(&form, &spec.vectors, spec.seed, 0)?;
    let family = spec.family.label();
    let qs: Vec<usize> = spec.params.q.map_or_else(|| vec![1, 2, 3], |q| vec![q]);
    let degree = form.degree() as f64;
    let mut run = SuiteRun::new();
    let mut all_ok = true;
    let mut max_ratio = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let spectrum = eigenvalues(&form, x)?;
        let spectral = spectrum.spectral_norm();
        for &q in &qs {
            let hq = spectrum.hp_norm(q as f64)?;
            let cap = degree.powf(1.0 / q as f64) * spectral;
            let ok = spectral <= hq * (1.0 + REL_SLACK) + EXACT_SLACK
                && hq <= cap * (1.0 + REL_SLACK) + EXACT_SLACK;
            all_ok &= ok;
            if cap > 0.0 {
                max_ratio = max_ratio.max(hq / cap);
            }
            run.rows.push(
                Row::new("norms", &family)
                    .set("n", xs.len())
                    .set("d", form.degree())
                    .set("index", i)
                    .set("q_or_delta", q)
                    .set_f("found_value", hq)
                    .set_f("bound", cap)
                    .set("verdict", if ok { "pass" } else { "fail" })
                    .set("seed", spec.seed),
            );
        }
    }
    run.verdicts.push(Verdict::asserted(
        "q_norm_equivalence",
        all_ok,
        format!(
            "‖x‖_h ≤ ‖x‖_h,q ≤ d^(1/q)·‖x‖_h on {} points, q ∈ {qs:?}",
            xs.len()
        ),
    ));
    run.constants.insert("max_hq_over_cap".into(), max_ratio);
    Ok(run)
}

// ---------------------------------------------------------------------------
// chernoff
// ---------------------------------------------------------------------------

/// Rademacher-sum tails against the sub-Gaussian closed form, with exact
/// enumeration when 2^n is affordable, plus the moment oracle and the
/// 2-vs-1 norm ratio on the enumerable branch.
fn run_chernoff(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let xs = generate_vectors(&form, &spec.vectors, spec.seed, 0)?;
    let sys = VectorSystem::new(form, xs)?;
    let family = spec.family.label();
    let n = sys.n();
    let d = sys.form().degree();
    let s = sys.max_rank();
    let trials = spec.params.trials.unwrap_or(20_000);
    let total = sys.total_norm();
    let grid: Vec<f64> = match &spec.params.t_grid {
        Some(g) => g.clone(),
        None => (1..=20).map(|j| total * j as f64 / 20.0).collect(),
    };
    for &t in &grid {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(
                "t_grid entries must be finite and > 0".into(),
            ));
        }
    }

    let mut run = SuiteRun::new();
    let base_row = |index: usize| {
        Row::new("chernoff", &family)
            .set("n", n)
            .set("d", d)
            .set("s", s)
            .set("index", index)
            .set("seed", spec.seed)
    };

    let enumerable = n <= ENUMERABLE_SIGNS;
    let mut exact_m2 = None;
    let mut exact_tails: Vec<(f64, f64)> = Vec::new();
    if enumerable {
        let dist = exact_distribution(&sys)?;
        let m2 = dist.second_moment();
        let patterns = 1u64 << n;
        let mut ok_all = true;
        let mut smallest_margin = f64::INFINITY;
        for &t in &grid {
            let p = dist.tail(t);
            let bound = tail_bound_rademacher(t, m2)?;
            let ok = p <= bound + EXACT_SLACK;
            ok_all &= ok;
            smallest_margin = smallest_margin.min(bound - p);
            exact_tails.push((t, p));
            let est = TailEstimate::exact(t, p, patterns, spec.seed);
            run.rows.push(
                estimate_cells(base_row(0), &est)
                    .set_f("t", t)
                    .set_f("bound", bound)
                    .set("verdict", if ok { "pass" } else { "fail" }),
            );
        }
        run.verdicts.push(Verdict::asserted(
            "exact_tail_dominated",
            ok_all,
            format!(
                "2^{n} patterns on {} thresholds, smallest bound−tail margin {smallest_margin:.3e}",
                grid.len()
            ),
        ));
        if let Some(c2) = tightest_c2(&exact_tails, sys.sigma(), s) {
            run.constants.insert("tightest_c2".into(), c2);
        }

        let ratio = khinchin_ratio(&sys)?;
        let sqrt2 = std::f64::consts::SQRT_2;
        run.verdicts.push(Verdict::asserted(
            "khinchin_ratio_in_range",
            (1.0 - EXACT_SLACK..=sqrt2 + REL_SLACK).contains(&ratio),
            format!("E‖·‖² ^(1/2) / E‖·‖ = {ratio:.12} ∈ [1, √2]"),
        ));
        run.constants.insert("khinchin_ratio".into(), ratio);

        let qs: Vec<usize> = spec.params.q.map_or_else(|| vec![1, 2, 3], |q| vec![q]);
        let mut ok_moments = true;
        for &q in &qs {
            let moment = exact_moment(&sys, q)?;
            let bound = moment_bound(sys.sigma(), s, q)?;
            let ok = moment <= bound * (1.0 + MOMENT_SLACK);
            ok_moments &= ok;
            run.rows.push(
                base_row(0)
                    .set("q_or_delta", q)
                    .set_f("found_value", moment)
                    .set_f("bound", bound)
                    .set("trials", patterns)
                    .set("verdict", if ok { "pass" } else { "fail" })
                    .set("seed", spec.seed),
            );
        }
        run.verdicts.push(Verdict::asserted(
            "moment_oracle_dominated",
            ok_moments,
            format!("E^(1/2q)‖·‖^2q ≤ √(2q−1)·s^(1/2q)·σ for q ∈ {qs:?}"),
        ));
        exact_m2 = Some(m2);
    } else {
        run.verdicts.push(Verdict::reported(
            "exact_enumeration_skipped",
            format!("n = {n} > {ENUMERABLE_SIGNS}; Monte-Carlo estimates only"),
        ));
    }

    // Monte-Carlo pass: always emitted so reports carry confidence intervals.
    let m2_for_bound = match exact_m2 {
        Some(m2) => m2,
        None => {
            let search = best_signs_random(&sys, trials, spec.seed)?;
            let vals = search.values();
            vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64
        }
    };
    let mut covered = 0usize;
    for (gi, &t) in grid.iter().enumerate() {
        let est = mc_tail(&sys, t, trials, spec.seed)?;
        let bound = tail_bound_rademacher(t, m2_for_bound)?;
        if enumerable {
            let exact_p = exact_tails[gi].1;
            if est.ci_low - EXACT_SLACK <= exact_p && exact_p <= est.ci_high + EXACT_SLACK {
                covered += 1;
            }
        }
        run.rows.push(
            estimate_cells(base_row(1), &est)
                .set_f("t", t)
                .set_f("bound", bound)
                .set("verdict", "report"),
        );
    }
    run.verdicts.push(Verdict::reported(
        "mc_tail_measured",
        if enumerable {
            format!("{trials} trials per threshold; 99% CI covered the exact tail at {covered}/{} thresholds", grid.len())
        } else {
            format!("{trials} trials per threshold against the estimated second moment")
        },
    ));
    Ok(run)
}

// ---------------------------------------------------------------------------
// cone_chernoff
// ---------------------------------------------------------------------------

/// Eigenvalue tails of sums of random cone samples against the closed-form
/// Chernoff bounds; asserted wherever the bound is binding (≤ 0.9).
fn run_cone_chernoff(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let d = form.degree();
    let n = spec.vectors.n.expect("validated: generator with n");
    let r = spec.vectors.r.unwrap_or(1.0);
    let generator = match spec.vectors.generator {
        Some(GeneratorKind::ConeUniform) => ConeGenerator::UniformBox,
        Some(GeneratorKind::RankOne) => ConeGenerator::ScaledRankOne,
        _ => unreachable!("validated: cone generator"),
    };
    let delta = spec.params.delta.unwrap_or(0.5);
    let trials = spec.params.trials.unwrap_or(20_000);
    let family = spec.family.label();
    let sample_spec = ConeSampleSpec::new(form, n, generator, r)?;
    let out = cone_chernoff_experiment(&sample_spec, delta, trials, spec.seed)?;

    let mut run = SuiteRun::new();
    for (index, label, est, bound) in [
        (0usize, "upper", &out.max_tail, out.bound_max),
        (1usize, "lower", &out.min_tail, out.bound_min),
    ] {
        let binding = bound <= 0.9;
        let ok = est.ci_high <= bound + EXACT_SLACK;
        run.rows.push(
            estimate_cells(Row::new("cone_chernoff", &family), est)
                .set("n", n)
                .set("d", d)
                .set("index", index)
                .set("q_or_delta", crate::report::fmt_f64(delta))
                .set_f("t", est.threshold)
                .set_f("bound", bound)
                .set(
                    "verdict",
                    if !binding {
                        "report"
                    } else if ok {
                        "pass"
                    } else {
                        "fail"
                    },
                )
                .set("seed", spec.seed),
        );
        if binding {
            run.verdicts.push(Verdict::asserted(
                format!("{label}_tail_within_bound"),
                ok,
                format!(
                    "Wilson-99% upper {:.3e} vs bound {bound:.3e} at threshold {:.6}",
                    est.ci_high, est.threshold
                ),
            ));
        } else {
            run.verdicts.push(Verdict::reported(
                format!("{label}_tail_reported"),
                format!("closed-form bound {bound:.3} > 0.9 is not binding at these parameters"),
            ));
        }
    }
    run.constants.insert("mu_max".into(), out.mu_max);
    run.constants.insert("mu_min".into(), out.mu_min);
    Ok(run)
}

// ---------------------------------------------------------------------------
// anticoncentration
// ---------------------------------------------------------------------------

/// Small-interval probabilities of signed cone sums over a width grid:
/// exact monotonicity in the width, exact-enumeration CI coverage when
/// affordable, and the measured p̂/Δ slope; optional boundary-window pass.
fn run_anticoncentration(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form1 = spec.family.build()?;
    let family2_spec = spec.family2.clone().unwrap_or_else(|| spec.family.clone());
    let form2 = family2_spec.build()?;
    let family = format!("{}|{}", spec.family.label(), family2_spec.label());
    let n = spec.vectors.count();

    let xs1 = generate_vectors(&form1, &spec.vectors, spec.seed, 0)?;
    let xs2_cone = if spec.vectors.explicit.is_some() {
        if form2.dimension() != form1.dimension() {
            return Err(CliError::Usage(
                "explicit vectors serve both families, so the families must share a dimension"
                    .into(),
            ));
        }
        xs1.clone()
    } else {
        generate_vectors(&form2, &spec.vectors, spec.seed, n as u64)?
    };
    // The second family lives on the opposite side of its cone.
    let xs2: Vec<PointVec> = xs2_cone.iter().map(|x| x.scaled(-1.0)).collect();

    let mut measured_tau = 0.0f64;
    for x in &xs1 {
        measured_tau = measured_tau.max(eigenvalues(&form1, x)?.lambda_max());
    }
    for x in &xs2 {
        measured_tau = measured_tau.max(-eigenvalues(&form2, x)?.lambda_min());
    }
    let tau = spec.params.tau.unwrap_or(measured_tau);
    if !(tau.is_finite() && tau > 0.0) {
        return Err(CliError::Usage(
            "eigenvalue cap τ must be positive (zero vectors have none to measure)".into(),
        ));
    }
    let d1 = form1.degree();
    let pair = ConePair::new(form1, form2, xs1, xs2, tau)?;

    // Default width grid follows the theorem's validity range 20τ·log d.
    let base = 20.0 * tau * (d1.max(2) as f64).ln();
    let mut grid = spec
        .params
        .delta_grid
        .clone()
        .unwrap_or_else(|| vec![base, 2.0 * base, 4.0 * base, 8.0 * base]);
    for &w in &grid {
        if !(w.is_finite() && w > 0.0) {
            return Err(CliError::Usage(
                "delta_grid entries must be finite and > 0".into(),
            ));
        }
    }
    grid.sort_by(f64::total_cmp);
    let trials = spec.params.trials.unwrap_or(20_000);
    let enumerable = n <= ENUMERABLE_CROSSCHECK;

    let mut run = SuiteRun::new();
    let base_row = || {
        Row::new("anticoncentration", &family)
            .set("n", n)
            .set_f("tau", tau)
            .set("seed", spec.seed)
    };
    let mut prev: Option<(f64, f64)> = None;
    let mut monotone = true;
    let mut covered = true;
    let mut max_slope = 0.0f64;
    for &width in &grid {
        let rep = interval_probability(&pair, width, trials, spec.seed)?;
        monotone &=
            prev.is_none_or(|(pn, pw)| rep.either_norm.p_hat >= pn && rep.first_window.p_hat >= pw);
        prev = Some((rep.either_norm.p_hat, rep.first_window.p_hat));
        max_slope = max_slope.max(rep.either_norm.p_hat / width);
        run.rows.push(
            estimate_cells(base_row(), &rep.either_norm)
                .set("index", 0)
                .set("q_or_delta", crate::report::fmt_f64(width))
                .set_f("implied_constant", rep.either_norm.p_hat / width)
                .set("verdict", "pass"),
        );
        run.rows.push(
            estimate_cells(base_row(), &rep.first_window)
                .set("index", 1)
                .set("q_or_delta", crate::report::fmt_f64(width))
                .set_f("implied_constant", rep.first_window.p_hat / width)
                .set("verdict", "report"),
        );
        if enumerable {
            let exact = exact_interval_probability(&pair, width)?;
            let p = exact.either_norm.p_hat;
            covered &= rep.either_norm.ci_low - EXACT_SLACK <= p
                && p <= rep.either_norm.ci_high + EXACT_SLACK;
            run.rows.push(
                estimate_cells(base_row(), &exact.either_norm)
                    .set("index", 2)
                    .set("q_or_delta", crate::report::fmt_f64(width))
                    .set("verdict", "pass"),
            );
        }
    }
    run.verdicts.push(Verdict::asserted(
        "interval_monotone_in_width",
        monotone,
        "p̂ is exactly non-decreasing in the width at a fixed seed",
    ));
    if enumerable {
        run.verdicts.push(Verdict::asserted(
            "mc_ci_covers_exact",
            covered,
            format!(
                "99% CI vs 2^{n} enumeration on {} widths (statistical check at confidence 99%)",
                grid.len()
            ),
        ));
    }
    run.constants
        .insert("max_phat_over_width".into(), max_slope);

    if let Some(rho) = spec.params.rho {
        let rep = boundary_measure(&pair, rho, trials, spec.seed)?;
        run.rows.push(
            estimate_cells(base_row(), &rep.estimate)
                .set("index", 3)
                .set("q_or_delta", crate::report::fmt_f64(rho))
                .set_f("implied_constant", rep.implied_constant)
                .set("verdict", "report"),
        );
        let mut detail = format!(
            "p̂·α·√n = {:.4} at ρ = {rho}, margin fraction α = {:.3}",
            rep.implied_constant, rep.alpha
        );
        if enumerable {
            let exact = exact_boundary_measure(&pair, rho)?;
            run.rows.push(
                estimate_cells(base_row(), &exact.estimate)
                    .set("index", 4)
                    .set("q_or_delta", crate::report::fmt_f64(rho))
                    .set_f("implied_constant", exact.implied_constant)
                    .set("verdict", "report"),
            );
            detail.push_str(&format!(
                "; exact boundary probability {:.6}",
                exact.estimate.p_hat
            ));
        }
        run.constants
            .insert("boundary_constant".into(), rep.implied_constant);
        run.constants.insert("boundary_alpha".into(), rep.alpha);
        run.verdicts
            .push(Verdict::reported("boundary_measured", detail));
    }
    Ok(run)
}

// ---------------------------------------------------------------------------
// discrepancy
// ---------------------------------------------------------------------------

/// Best signed-sum norm: exhaustive optimum against the rank-aware ceiling
/// (8σ for rank-one systems), with random search as a floor witness.
fn run_discrepancy(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let xs = generate_vectors(&form, &spec.vectors, spec.seed, 0)?;
    let sys = VectorSystem::new(form, xs)?;
    let family = spec.family.label();
    let n = sys.n();
    let s = sys.max_rank();
    let sigma = sys.sigma();
    let trials = spec.params.trials.unwrap_or(1000);

    let mut run = SuiteRun::new();
    let base_row = |index: usize| {
        Row::new("discrepancy", &family)
            .set("n", n)
            .set("s", s)
            .set_f("sigma", sigma)
            .set("index", index)
            .set("seed", spec.seed)
    };
    let search = best_signs_random(&sys, trials, spec.seed)?;

    if n <= EXHAUSTIVE_SIGNS {
        let (_, optimum) = best_signs_exhaustive(&sys)?;
        let (bound, bound_kind) = if s == 1 {
            (8.0 * sigma, "eight_sigma")
        } else {
            (expectation_bound(sigma, s)?.0, "expectation_ceiling")
        };
        let ok = optimum <= bound * (1.0 + REL_SLACK) + EXACT_SLACK;
        run.rows.push(
            base_row(0)
                .set_f("found_value", optimum)
                .set_f("bound", bound)
                .set("trials", 1u64 << n)
                .set("verdict", if ok { "pass" } else { "fail" }),
        );
        run.verdicts.push(Verdict::asserted(
            format!("optimum_within_{bound_kind}"),
            ok,
            format!("min over 2^{n} sign patterns = {optimum:.6} vs {bound:.6}"),
        ));
        let floor_ok = search.best_value() >= optimum - EXACT_SLACK * (1.0 + optimum.abs());
        run.verdicts.push(Verdict::asserted(
            "random_never_beats_exhaustive",
            floor_ok,
            format!(
                "best of {trials} random patterns = {:.6}",
                search.best_value()
            ),
        ));
        if s == 1 {
            run.constants.insert(
                "success_fraction_at_8sigma".into(),
                search.success_fraction_at(8.0 * sigma),
            );
        }
        if sigma > 0.0 {
            run.constants
                .insert("optimum_over_sigma".into(), optimum / sigma);
        }
        run.rows.push(
            base_row(1)
                .set_f("found_value", search.best_value())
                .set_f("bound", bound)
                .set("trials", trials)
                .set("verdict", "report"),
        );
    } else {
        run.verdicts.push(Verdict::reported(
            "exhaustive_skipped",
            format!("n = {n} > {EXHAUSTIVE_SIGNS}; random search only"),
        ));
        run.rows.push(
            base_row(1)
                .set_f("found_value", search.best_value())
                .set("trials", trials)
                .set("verdict", "report"),
        );
    }
    Ok(run)
}

// ---------------------------------------------------------------------------
// kadison_singer
// ---------------------------------------------------------------------------

/// Balanced k-partitions of cone vectors against the trace/norm ceilings,
/// plus the two-part sign witness when k = 2.
fn run_kadison_singer(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let xs = generate_vectors(&form, &spec.vectors, spec.seed, 0)?;
    let family = spec.family.label();
    let n = xs.len();
    let k = spec.params.k.unwrap_or(2);
    let budget = PartitionBudget {
        seed: spec.seed,
        ..PartitionBudget::default()
    };
    let out = partition_search(&form, &xs, k, &budget)?;
    let s = out.rank_k / k as u64;

    let mut run = SuiteRun::new();
    let base_row = |index: usize| {
        Row::new("kadison_singer", &family)
            .set("n", n)
            .set("k", k)
            .set("s", s)
            .set_f("epsilon", out.epsilon)
            .set_f("sigma", out.sigma)
            .set("index", index)
            .set("seed", spec.seed)
    };

    for (index, bound, slack, name) in [
        (
            0usize,
            out.bound_simple,
            REL_SLACK,
            "optimum_within_closed_form",
        ),
        (
            1usize,
            out.bound_delta,
            DELTA_SLACK,
            "optimum_within_delta_ceiling",
        ),
    ] {
        let ok = out.max_part_norm <= bound * (1.0 + slack) + EXACT_SLACK;
        run.rows.push(
            base_row(index)
                .set_f("found_value", out.max_part_norm)
                .set_f("bound", bound)
                .set(
                    "verdict",
                    if out.exhaustive {
                        if ok {
                            "pass"
                        } else {
                            "fail"
                        }
                    } else {
                        "report"
                    },
                ),
        );
        if out.exhaustive {
            run.verdicts.push(Verdict::asserted(
                name,
                ok,
                format!(
                    "max part norm {:.6} vs {bound:.6} over all {k}-partitions",
                    out.max_part_norm
                ),
            ));
        }
    }
    if !out.exhaustive {
        run.verdicts.push(Verdict::reported(
            "local_search_only",
            format!("{k}^{n} assignments exceed the enumeration budget; ceilings reported, not asserted"),
        ));
    }

    if k == 2 {
        let signs = signs_from_partition(&out.partition)?;
        let sum = signed_sum(&xs, Some(signs.signs()))?;
        let value = eigenvalues(&form, &sum)?.spectral_norm();
        let cap = subisotropic_sign_bound(out.epsilon, out.sigma);
        run.rows.push(
            base_row(2)
                .set_f("found_value", value)
                .set_f("bound", cap)
                .set("verdict", "report"),
        );
        run.verdicts.push(Verdict::reported(
            "two_part_sign_witness",
            format!("‖Σ±xᵢ‖_h = {value:.6} from the best partition vs trace-level cap {cap:.6}"),
        ));
        if cap > 0.0 {
            run.constants
                .insert("sign_value_over_trace_cap".into(), value / cap);
        }
    }
    if out.bound_simple > 0.0 {
        run.constants.insert(
            "optimum_over_closed_form".into(),
            out.max_part_norm / out.bound_simple,
        );
    }
    Ok(run)
}

// ---------------------------------------------------------------------------
// mixed
// ---------------------------------------------------------------------------

/// Largest mixed-restriction root against the plain-sum root below it and
/// the σ·δ(ε/σ, n, r) ceiling above it.
fn run_mixed(spec: &ExperimentSpec) -> Result<SuiteRun> {
    let form = spec.family.build()?;
    let xs = generate_vectors(&form, &spec.vectors, spec.seed, 0)?;
    let family = spec.family.label();
    let n = xs.len();

    let sum = sum_points(&xs)?;
    let sum_spectrum = eigenvalues(&form, &sum)?;
    let lambda_sum = sum_spectrum.lambda_max();
    let sigma = sum_spectrum.spectral_norm();
    let mixed = lambda_max_mixed(&form, &xs)?;
    let mut scale = 1.0;
    let mut epsilon = 0.0f64;
    for x in &xs {
        let spectrum = eigenvalues(&form, x)?;
        scale += spectrum.spectral_norm();
        epsilon = epsilon.max(spectrum.trace());
    }
    let max_rank = VectorSystem::new(form.clone(), xs.clone())?.max_rank();

    let mut run = SuiteRun::new();
    let ok_dom = lambda_sum <= mixed + KERNEL_TOL * scale;
    run.verdicts.push(Verdict::asserted(
        "sum_root_below_mixed_root",
        ok_dom,
        format!("λ_max(Σv) = {lambda_sum:.9} vs mixed root {mixed:.9}"),
    ));

    let mut delta_value = f64::NAN;
    let mut all_ok = ok_dom;
    if sigma > 0.0 && epsilon > 0.0 && max_rank > 0 {
        let query = DeltaQuery::new(
            epsilon / sigma,
            Extent::Finite(n as u64),
            Extent::Finite(max_rank as u64),
        )?;
        let bound = delta_bound(&query)?;
        delta_value = bound.value;
        let cap = sigma * bound.value;
        let ok = mixed <= cap * (1.0 + DELTA_SLACK);
        all_ok &= ok;
        run.verdicts.push(Verdict::asserted(
            "mixed_root_within_delta_ceiling",
            ok,
            format!("mixed root {mixed:.9} vs σ·δ(ε/σ, n, r) = {cap:.9}"),
        ));
        run.constants.insert("delta_value".into(), bound.value);
    } else {
        run.verdicts.push(Verdict::reported(
            "delta_ceiling_skipped",
            format!("degenerate statistics (ε = {epsilon:.3e}, σ = {sigma:.3e})"),
        ));
    }
    if mixed > 0.0 {
        run.constants
            .insert("sum_over_mixed".into(), lambda_sum / mixed);
    }

    let mut row = Row::new("mixed", &family)
        .set("n", n)
        .set("r", max_rank)
        .set_f("epsilon", epsilon)
        .set_f("sigma", sigma)
        .set_f("lambda_max_sum", lambda_sum)
        .set_f("lambda_max_mixed", mixed)
        .set("verdict", if all_ok { "pass" } else { "fail" })
        .set("seed", spec.seed);
    if delta_value.is_finite() {
        row = row.set_f("delta_value", delta_value);
    }
    run.rows.push(row);
    Ok(run)
}

// ---------------------------------------------------------------------------
// verify_all
// ---------------------------------------------------------------------------

fn sub_spec(
    suite: Suite,
    family: FamilySpec,
    vectors: VectorSpec,
    params: Params,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        suite,
        family,
        family2: None,
        vectors,
        params,
        seed,
        output: None,
    }
}

fn generated(kind: GeneratorKind, n: usize, r: Option<f64>) -> VectorSpec {
    VectorSpec {
        explicit: None,
        generator: Some(kind),
        n: Some(n),
        r,
    }
}

fn explicit(list: Vec<Vec<f64>>) -> VectorSpec {
    VectorSpec {
        explicit: Some(list),
        generator: None,
        n: None,
        r: None,
    }
}

/// All weak compositions of `total` into `parts` ordered cells.
fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for head in 0..=total {
        for mut tail in weak_compositions(total - head, parts - 1) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// The fixed verification battery: every suite at small budgets plus the
/// closed-form constant checks, all derived from one seed. Target runtime:
/// well under a minute on a laptop; byte-identical output per seed.
pub fn verify_all(seed: u64) -> Result<SuiteRun> {
    let section_seed = |idx: u64| seed.wrapping_add(idx.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut run = SuiteRun::new();
    let record = |run: &mut SuiteRun, name: &str, s: u64| {
        run.seeds.insert(name.to_string(), s);
        s
    };

    // 1. Eigenvalue anchor: the coordinate family's spectrum is the sorted
    //    coordinates.
    let s1 = record(&mut run, "eig_anchor", section_seed(1));
    let anchor_spec = sub_spec(
        Suite::Eig,
        FamilySpec::Product { m: 3 },
        explicit(vec![vec![1.0, 2.0, 3.0]]),
        Params::default(),
        s1,
    );
    run.merge("eig_anchor", run_eig(&anchor_spec)?);
    {
        let form = anchor_spec.family.build()?;
        let spectrum = eigenvalues(&form, &PointVec::new(vec![1.0, 2.0, 3.0])?)?;
        let ok = spectrum
            .values()
            .iter()
            .zip(&[3.0, 2.0, 1.0])
            .all(|(a, b)| (a - b).abs() <= 1e-9);
        run.verdicts.push(Verdict::asserted(
            "eig_anchor.spectrum_is_sorted_coordinates",
            ok,
            format!("spectrum of (1,2,3) = {:?}", spectrum.values()),
        ));
    }

    // 2. Eigenvalue paths across the closed-form families.
    for (name, family, n) in [
        ("eig_product", FamilySpec::Product { m: 5 }, 6),
        ("eig_detsym", FamilySpec::DeterminantSymmetric { d: 3 }, 6),
        ("eig_lorentz", FamilySpec::Lorentz { m: 4 }, 6),
    ] {
        let s = record(
            &mut run,
            name,
            section_seed(2) ^ n as u64 ^ family.build()?.dimension() as u64,
        );
        let spec = sub_spec(
            Suite::Eig,
            family,
            generated(GeneratorKind::Gaussian, n, None),
            Params::default(),
            s,
        );
        run.merge(name, run_eig(&spec)?);
    }

    // 3. Norm equivalences.
    for (name, family, n) in [
        ("norms_product", FamilySpec::Product { m: 5 }, 20),
        (
            "norms_detsym",
            FamilySpec::DeterminantSymmetric { d: 3 },
            12,
        ),
    ] {
        let s = record(&mut run, name, section_seed(3) ^ n as u64);
        let spec = sub_spec(
            Suite::Norms,
            family,
            generated(GeneratorKind::Gaussian, n, None),
            Params::default(),
            s,
        );
        run.merge(name, run_norms(&spec)?);
    }

    // 4. Rademacher tails, moments, and the 2-vs-1 ratio (enumerable n).
    let s4 = record(&mut run, "chernoff", section_seed(4));
    let spec4 = sub_spec(
        Suite::Chernoff,
        FamilySpec::Product { m: 4 },
        generated(GeneratorKind::UnitNorm, 12, None),
        Params {
            trials: Some(20_000),
            ..Params::default()
        },
        s4,
    );
    run.merge("chernoff", run_chernoff(&spec4)?);

    // 5. Cone Chernoff at a binding configuration.
    let s5 = record(&mut run, "cone_chernoff", section_seed(5));
    let spec5 = sub_spec(
        Suite::ConeChernoff,
        FamilySpec::Product { m: 4 },
        generated(GeneratorKind::ConeUniform, 50, Some(0.2)),
        Params {
            delta: Some(0.5),
            trials: Some(20_000),
            ..Params::default()
        },
        s5,
    );
    run.merge("cone_chernoff", run_cone_chernoff(&spec5)?);

    // 6. Interval anti-concentration with exact cross-check (n ≤ 14).
    let s6 = record(&mut run, "anticoncentration", section_seed(6));
    let spec6 = sub_spec(
        Suite::Anticoncentration,
        FamilySpec::Product { m: 3 },
        generated(GeneratorKind::ConeUniform, 12, Some(0.5)),
        Params {
            trials: Some(20_000),
            ..Params::default()
        },
        s6,
    );
    run.merge("anticoncentration", run_anticoncentration(&spec6)?);

    // 7. Boundary window on strictly interior vectors (margin ρ = 0.1).
    let s7 = record(&mut run, "boundary", section_seed(7));
    let interior: Vec<Vec<f64>> = (0..10)
        .map(|i| {
            let mut rng = trial_rng(s7, StreamDomain::VectorGen, i);
            (0..3).map(|_| rng.random_range(0.3..1.0)).collect()
        })
        .collect();
    let spec7 = sub_spec(
        Suite::Anticoncentration,
        FamilySpec::Product { m: 3 },
        explicit(interior),
        Params {
            rho: Some(0.1),
            trials: Some(20_000),
            ..Params::default()
        },
        s7,
    );
    run.merge("boundary", run_anticoncentration(&spec7)?);

    // 8. Discrepancy: general-rank ceiling and the rank-one 8σ ceiling.
    let s8a = record(&mut run, "discrepancy_gaussian", section_seed(8));
    let spec8a = sub_spec(
        Suite::Discrepancy,
        FamilySpec::Product { m: 4 },
        generated(GeneratorKind::Gaussian, 12, None),
        Params {
            trials: Some(1000),
            ..Params::default()
        },
        s8a,
    );
    run.merge("discrepancy_gaussian", run_discrepancy(&spec8a)?);
    let s8b = record(&mut run, "discrepancy_rank_one", section_seed(9));
    let spec8b = sub_spec(
        Suite::Discrepancy,
        FamilySpec::DeterminantSymmetric { d: 3 },
        generated(GeneratorKind::RankOne, 10, None),
        Params {
            trials: Some(1000),
            ..Params::default()
        },
        s8b,
    );
    run.merge("discrepancy_rank_one", run_discrepancy(&spec8b)?);

    // 9. Partition ceilings, exhaustive at both k = 2 and k = 3.
    let s9a = record(&mut run, "partition_k2", section_seed(10));
    let spec9a = sub_spec(
        Suite::KadisonSinger,
        FamilySpec::Product { m: 4 },
        generated(GeneratorKind::RankOne, 12, None),
        Params {
            k: Some(2),
            ..Params::default()
        },
        s9a,
    );
    run.merge("partition_k2", run_kadison_singer(&spec9a)?);
    let s9b = record(&mut run, "partition_k3", section_seed(11));
    let spec9b = sub_spec(
        Suite::KadisonSinger,
        FamilySpec::DeterminantSymmetric { d: 3 },
        generated(GeneratorKind::RankOne, 8, None),
        Params {
            k: Some(3),
            ..Params::default()
        },
        s9b,
    );
    run.merge("partition_k3", run_kadison_singer(&spec9b)?);

    // 10. Mixed-root anchor: a single coordinate vector's mixed root is its
    //     eigenvalue.
    let s10 = record(&mut run, "mixed_anchor", section_seed(12));
    let spec10 = sub_spec(
        Suite::Mixed,
        FamilySpec::Product { m: 3 },
        explicit(vec![vec![1.0, 0.0, 0.0]]),
        Params::default(),
        s10,
    );
    run.merge("mixed_anchor", run_mixed(&spec10)?);
    {
        let form = FamilySpec::Product { m: 3 }.build()?;
        let mixed = lambda_max_mixed(&form, &[PointVec::new(vec![1.0, 0.0, 0.0])?])?;
        run.verdicts.push(Verdict::asserted(
            "mixed_anchor.single_vector_root_is_one",
            (mixed - 1.0).abs() <= 1e-9,
            format!("mixed root of one coordinate vector = {mixed:.12}"),
        ));
    }

    // 11. Mixed roots on random rank-one tuples.
    for (name, family, n, idx) in [
        ("mixed_product", FamilySpec::Product { m: 3 }, 6usize, 13u64),
        (
            "mixed_detsym",
            FamilySpec::DeterminantSymmetric { d: 3 },
            5,
            14,
        ),
    ] {
        let s = record(&mut run, name, section_seed(idx));
        let spec = sub_spec(
            Suite::Mixed,
            family,
            generated(GeneratorKind::RankOne, n, None),
            Params::default(),
            s,
        );
        run.merge(name, run_mixed(&spec)?);
    }

    // 12. Closed-form moment constants.
    {
        let mut ok_all = true;
        let mut anchor_ok = true;
        for q in 1..=40usize {
            let value = m2q(q)?;
            let cap = ((2 * q - 1) as f64).sqrt();
            let ok = value <= cap * (1.0 + EXACT_SLACK);
            ok_all &= ok;
            if q == 1 {
                anchor_ok = (value - 1.0).abs() <= EXACT_SLACK;
            }
            if q <= 8 || q == 40 {
                run.rows.push(
                    Row::new("moment_constants", "rademacher")
                        .set("q_or_delta", q)
                        .set_f("found_value", value)
                        .set_f("bound", cap)
                        .set("verdict", if ok { "pass" } else { "fail" })
                        .set("seed", seed),
                );
            }
        }
        run.verdicts.push(Verdict::asserted(
            "moment_constants.m2q_below_sqrt",
            ok_all,
            "‖r‖_2q-style constant ≤ √(2q−1) for q ≤ 40",
        ));
        run.verdicts.push(Verdict::asserted(
            "moment_constants.m2_is_one",
            anchor_ok,
            "q = 1 constant equals 1",
        ));

        let mut ok_multi = true;
        let mut checked = 0usize;
        for q in 1..=4usize {
            for parts in 1..=4usize {
                for composition in weak_compositions(q, parts) {
                    let (lhs, rhs) = multinomial_inequality_check(q, &composition)?;
                    ok_multi &= lhs <= rhs * (1.0 + EXACT_SLACK);
                    checked += 1;
                }
            }
        }
        let (lhs, rhs) = multinomial_inequality_check(2, &[1, 1])?;
        let anchor = (lhs - 6.0).abs() <= 1e-9 && (rhs - 6.0).abs() <= 1e-9;
        run.verdicts.push(Verdict::asserted(
            "moment_constants.multinomial_inequality",
            ok_multi && anchor,
            format!(
                "{checked} compositions checked; the (q=2, k=(1,1)) case is the equality 6 = 6"
            ),
        ));
    }

    // 13. Good-bucket hashing on a conforming spread instance.
    {
        let s13 = record(&mut run, "bucket_lemma", section_seed(15));
        let form = FamilySpec::Product { m: 4 }.build()?;
        let tau = 0.05;
        let p = 32usize;
        let n = 600usize;
        let xs: Vec<PointVec> = (0..n)
            .map(|_| PointVec::new(vec![tau; 4]).map_err(CliError::from))
            .collect::<Result<_>>()?;
        let hashes = 400u64;
        let mut bad = 0u64;
        let mut threshold = 0.0;
        for h in 0..hashes {
            let hash = random_bucket_hash(n, p, s13.wrapping_add(h))?;
            let (good, thr) = good_bucket_fraction(&form, &xs, &hash, tau)?;
            threshold = thr;
            if 5 * good <= 4 * p {
                bad += 1;
            }
        }
        let (ci_low, ci_high) = wilson99(bad, hashes);
        let cap = (-(p as f64) / 4.0).exp();
        let ok = ci_low <= cap;
        run.rows.push(
            Row::new("bucket_lemma", "product_4")
                .set("n", n)
                .set("k", p)
                .set_f("tau", tau)
                .set_f("t", threshold)
                .set_f("p_hat", bad as f64 / hashes as f64)
                .set_f("ci_low", ci_low)
                .set_f("ci_high", ci_high)
                .set_f("bound", cap)
                .set("trials", hashes)
                .set("verdict", if ok { "pass" } else { "fail" })
                .set("seed", s13),
        );
        run.verdicts.push(Verdict::asserted(
            "bucket_lemma.bad_fraction_within_chernoff",
            ok,
            format!(
                "{bad}/{hashes} hashes left ≤ 4/5 of buckets good; Wilson-99 lower {ci_low:.4e} vs e^(−p/4) = {cap:.3e}"
            ),
        ));
    }

    Ok(run)
}
