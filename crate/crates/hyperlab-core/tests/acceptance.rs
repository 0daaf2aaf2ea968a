//! Acceptance battery: each test drives one numerical contract at full scale
//! and prints a single `ACCEPTANCE <n> <name>: PASS|FAIL` line (visible under
//! `--nocapture`). Tolerances, sample counts, and runtime budgets are pinned
//! here and are not meant to be loosened to make a failing run green.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hyperlab_core::anticoncentration::{good_bucket_fraction, random_bucket_hash};
use hyperlab_core::concentration::{
    cone_chernoff_experiment, exact_distribution, exact_moment, khinchin_ratio, m2q, moment_bound,
    multinomial_inequality_check, tail_bound_rademacher, ConeGenerator, ConeSampleSpec,
    VectorSystem,
};
use hyperlab_core::discrepancy::{best_signs_exhaustive, best_signs_random, partition_search};
use hyperlab_core::forms::{pack_outer, HyperbolicForm, PointVec};
use hyperlab_core::mixed::{delta_bound, lambda_max_mixed, DeltaQuery, Extent};
use hyperlab_core::rng::{gaussian_entries, trial_rng, StreamDomain};
use hyperlab_core::spectra::{
    eigenvalues, eigenvalues_via_restriction, symmetric_coefficients, Spectrum,
};
use hyperlab_core::stats::wilson99;
use hyperlab_core::PartitionBudget;
use rand::Rng;

/// Run one criterion body, print its verdict line, and enforce its runtime
/// budget. A panic inside the body is re-raised after the FAIL line so the
/// test harness still reports the failure.
fn criterion<F>(num: u32, name: &str, budget: Duration, body: F)
where
    F: FnOnce(),
{
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) => {
            if elapsed <= budget {
                println!("ACCEPTANCE {num} {name}: PASS ({elapsed:.2?})");
            } else {
                println!(
                    "ACCEPTANCE {num} {name}: FAIL (runtime {elapsed:.2?} over budget {budget:?})"
                );
                panic!("criterion {num} exceeded its runtime budget");
            }
        }
        Err(cause) => {
            println!("ACCEPTANCE {num} {name}: FAIL ({elapsed:.2?})");
            std::panic::resume_unwind(cause);
        }
    }
}

fn pv(entries: Vec<f64>) -> PointVec {
    PointVec::new(entries).unwrap()
}

fn gaussian_point(seed: u64, index: u64, m: usize) -> PointVec {
    let mut rng = trial_rng(seed, StreamDomain::VectorGen, index);
    pv(gaussian_entries(&mut rng, m))
}

fn vec_add(a: &PointVec, b: &PointVec) -> PointVec {
    pv(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x + y)
        .collect())
}

fn vec_sum(xs: &[PointVec]) -> PointVec {
    let mut acc = vec![0.0; xs[0].len()];
    for x in xs {
        for (a, v) in acc.iter_mut().zip(x.as_slice()) {
            *a += v;
        }
    }
    pv(acc)
}

/// Elementary symmetric function of |λ| values: the conditioning scale for
/// coefficient comparisons (no cancellation between terms).
fn abs_elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    Spectrum::new(abs).unwrap().elementary_symmetric(k)
}

// ---------------------------------------------------------------------------
// 1. Closed-form eigenvalue paths agree with the generic restriction +
//    root-finding path: 1000 random points per family, entrywise error
//    ≤ 1e−7·(1+‖x‖), under 30 s.
// ---------------------------------------------------------------------------

#[test]
fn a01_eigenvalue_kernel() {
    criterion(1, "eigenvalue-kernel", Duration::from_secs(30), || {
        let seed = 0xACC0_0001;
        let mut points = 0u64;
        for trial in 0..1000u64 {
            let size = 2 + (trial % 7) as usize; // 2..=8
            let cases = [
                HyperbolicForm::determinant_symmetric(size).unwrap(),
                HyperbolicForm::product(size).unwrap(),
                HyperbolicForm::lorentz(size).unwrap(),
            ];
            for (fam, form) in cases.into_iter().enumerate() {
                let m = form.dimension();
                let x = gaussian_point(seed, (fam as u64) * 1000 + trial, m);
                let closed = eigenvalues(&form, &x).unwrap();
                let generic = eigenvalues_via_restriction(&form, &x).unwrap();
                assert_eq!(closed.len(), generic.len());
                let tol = 1e-7 * (1.0 + closed.spectral_norm());
                for (a, b) in closed.values().iter().zip(generic.values()) {
                    assert!(
                        (a - b).abs() <= tol,
                        "closed {a} vs generic {b} beyond {tol} (family {fam}, size {size})"
                    );
                }
                points += 1;
            }
        }
        assert_eq!(points, 3000);
    });
}

// ---------------------------------------------------------------------------
// 2. Factorization h(te−x)/h(e) = Π(t−λᵢ(x)): residual ≤ 1e−7·scale^d with
//    scale = 1+|t|+‖x‖_h, 20 random t per point, 1000 points, under 30 s.
// ---------------------------------------------------------------------------

#[test]
fn a02_factorization_residual() {
    criterion(2, "factorization-residual", Duration::from_secs(30), || {
        let seed = 0xACC0_0002;
        let forms: Vec<HyperbolicForm> = vec![
            HyperbolicForm::product(4).unwrap(),
            HyperbolicForm::product(8).unwrap(),
            HyperbolicForm::determinant_symmetric(3).unwrap(),
            HyperbolicForm::determinant_symmetric(5).unwrap(),
            HyperbolicForm::lorentz(6).unwrap(),
            HyperbolicForm::elementary_symmetric(5, 3).unwrap(),
        ];
        for point in 0..1000u64 {
            let form = &forms[(point % forms.len() as u64) as usize];
            let m = form.dimension();
            let d = form.degree();
            let e = form.direction();
            let he = form.evaluate(e).unwrap();
            let x = gaussian_point(seed, point, m);
            let spectrum = eigenvalues(form, &x).unwrap();
            let radius = 2.0 * (1.0 + spectrum.spectral_norm());
            let mut rng = trial_rng(seed, StreamDomain::HyperbolicityProbe, point);
            for _ in 0..20 {
                let t: f64 = rng.random_range(-radius..radius);
                let shifted = pv(e
                    .as_slice()
                    .iter()
                    .zip(x.as_slice())
                    .map(|(ei, xi)| t * ei - xi)
                    .collect());
                let lhs = form.evaluate(&shifted).unwrap() / he;
                let rhs: f64 = spectrum.values().iter().map(|l| t - l).product();
                let scale = 1.0 + t.abs() + spectrum.spectral_norm();
                let tol = 1e-7 * scale.powi(d as i32);
                assert!(
                    (lhs - rhs).abs() <= tol,
                    "factorization residual {} beyond {tol} ({}, t={t})",
                    (lhs - rhs).abs(),
                    form.family_name()
                );
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 3. Normalized derivative coefficients equal the elementary symmetric
//    functions of the spectrum: error ≤ 1e−7 relative to the cancellation-free
//    scale e_k(|λ|), 200 points per family, under 60 s.
// ---------------------------------------------------------------------------

#[test]
fn a03_symmetric_coefficients() {
    criterion(3, "symmetric-coefficients", Duration::from_secs(60), || {
        let seed = 0xACC0_0003;
        let forms: Vec<HyperbolicForm> = vec![
            HyperbolicForm::determinant_symmetric(4).unwrap(),
            HyperbolicForm::product(6).unwrap(),
            HyperbolicForm::lorentz(6).unwrap(),
            HyperbolicForm::elementary_symmetric(5, 2).unwrap(),
        ];
        for (fam, form) in forms.iter().enumerate() {
            let d = form.degree();
            for point in 0..200u64 {
                let x = gaussian_point(seed, (fam as u64) * 200 + point, form.dimension());
                let coeffs = symmetric_coefficients(form, &x).unwrap();
                let spectrum = eigenvalues(form, &x).unwrap();
                assert_eq!(coeffs.len(), d + 1);
                for (k, c) in coeffs.iter().enumerate() {
                    let direct = spectrum.elementary_symmetric(k);
                    let scale = abs_elementary_symmetric(spectrum.values(), k).max(1.0);
                    assert!(
                        (c - direct).abs() <= 1e-7 * scale,
                        "coefficient {k}: {c} vs {direct} ({})",
                        form.family_name()
                    );
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 4. Norm relations ‖x‖_h ≤ ‖x‖_{h,q} ≤ d^{1/q}·‖x‖_h and the triangle
//    inequality on regular families: zero violations over 1000 samples at
//    relative tolerance 1e−9.
// ---------------------------------------------------------------------------

#[test]
fn a04_norm_relations() {
    criterion(4, "norm-relations", Duration::from_secs(300), || {
        let seed = 0xACC0_0004;
        let rel = 1.0 + 1e-9;
        for sample in 0..1000u64 {
            let size = 2 + (sample % 7) as usize;
            let cases = [
                HyperbolicForm::product(size).unwrap(),
                HyperbolicForm::determinant_symmetric(2 + (sample % 5) as usize).unwrap(),
                HyperbolicForm::lorentz(size).unwrap(),
            ];
            for (fam, form) in cases.into_iter().enumerate() {
                let m = form.dimension();
                let d = form.degree() as f64;
                let base = (fam as u64) * 2000 + 2 * sample;
                let x = gaussian_point(seed, base, m);
                let y = gaussian_point(seed, base + 1, m);
                let sx = eigenvalues(&form, &x).unwrap();
                let sy = eigenvalues(&form, &y).unwrap();
                let sxy = eigenvalues(&form, &vec_add(&x, &y)).unwrap();
                for q in [1.0, 2.0, 3.0] {
                    let hq = sx.hp_norm(q).unwrap();
                    assert!(sx.spectral_norm() <= hq * rel, "max|λ| > ℓ_{q} norm");
                    assert!(
                        hq <= d.powf(1.0 / q) * sx.spectral_norm() * rel,
                        "ℓ_{q} norm above d^(1/q)·max|λ|"
                    );
                }
                assert!(
                    sxy.spectral_norm() <= (sx.spectral_norm() + sy.spectral_norm()) * rel,
                    "triangle inequality violated on {}",
                    form.family_name()
                );
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Shared corpus for the enumeration-based criteria (5, 6, 7): small random
// systems over the three closed-form families, n ≤ 12, degree ≤ 4.
// ---------------------------------------------------------------------------

fn enumeration_corpus(seed: u64, per_family: usize) -> Vec<VectorSystem> {
    let mut out = Vec::new();
    for i in 0..per_family as u64 {
        let cases = [
            HyperbolicForm::product(2 + (i % 3) as usize).unwrap(),
            HyperbolicForm::determinant_symmetric(2 + (i % 3) as usize).unwrap(),
            HyperbolicForm::lorentz(2 + (i % 5) as usize).unwrap(),
        ];
        for (fam, form) in cases.into_iter().enumerate() {
            let n = 2 + ((i * 7 + fam as u64) % 11) as usize; // 2..=12
            let m = form.dimension();
            let base = ((fam as u64) << 32) | (i * 16);
            let vectors: Vec<PointVec> = (0..n as u64)
                .map(|j| gaussian_point(seed, base + j, m))
                .collect();
            out.push(VectorSystem::new(form, vectors).unwrap());
        }
    }
    out
}

/// The equality anchor: two identical unit vectors under the coordinate
/// product form. E[(r₁+r₂)²] = 2, so the q=1 moment and its bound both
/// equal √2.
fn duplicated_unit_pair() -> VectorSystem {
    let form = HyperbolicForm::product(3).unwrap();
    let x = pv(vec![1.0, 0.0, 0.0]);
    VectorSystem::new(form, vec![x.clone(), x]).unwrap()
}

// ---------------------------------------------------------------------------
// 5. Moment oracle: exact enumerated 2q-th moments never exceed the
//    √(2q−1)·s^{1/(2q)}·σ bound (slack 1e−10) on 50 systems per family,
//    q ∈ {1,2,3}; the duplicated-pair anchor is an equality at √2. Under 5 min.
// ---------------------------------------------------------------------------

#[test]
fn a05_moment_oracle() {
    criterion(5, "moment-oracle", Duration::from_secs(300), || {
        let corpus = enumeration_corpus(0xACC0_0005, 50);
        assert_eq!(corpus.len(), 150);
        for sys in &corpus {
            let s = sys.max_rank();
            assert!(s >= 1, "corpus system degenerated to rank 0");
            for q in 1..=3usize {
                let exact = exact_moment(sys, q).unwrap();
                let bound = moment_bound(sys.sigma(), s, q).unwrap();
                assert!(
                    exact <= bound * (1.0 + 1e-10),
                    "moment {exact} above bound {bound} (q={q}, n={}, {})",
                    sys.n(),
                    sys.form().family_name()
                );
            }
        }
        let anchor = duplicated_unit_pair();
        let exact = exact_moment(&anchor, 1).unwrap();
        let bound = moment_bound(anchor.sigma(), anchor.max_rank(), 1).unwrap();
        let root2 = f64::sqrt(2.0);
        assert!((exact - root2).abs() <= 1e-12);
        assert!((bound - root2).abs() <= 1e-12);
    });
}

// ---------------------------------------------------------------------------
// 6. Khinchin-type ratio (E‖X‖²)^{1/2} / E‖X‖ lies in [1, √2+1e−9] on every
//    enumerable system; the duplicated pair attains √2 exactly.
// ---------------------------------------------------------------------------

#[test]
fn a06_khinchin_ratio() {
    criterion(6, "khinchin-ratio", Duration::from_secs(300), || {
        let corpus = enumeration_corpus(0xACC0_0006, 50);
        for sys in &corpus {
            let ratio = khinchin_ratio(sys).unwrap();
            assert!(
                (1.0 - 1e-12..=f64::sqrt(2.0) + 1e-9).contains(&ratio),
                "ratio {ratio} outside [1, √2]"
            );
        }
        let ratio = khinchin_ratio(&duplicated_unit_pair()).unwrap();
        assert!((ratio - f64::sqrt(2.0)).abs() <= 1e-12);
    });
}

// ---------------------------------------------------------------------------
// 7. Tail domination: with the exact second moment m₂ from enumeration,
//    Pr[‖X‖_h > t] ≤ min(1, 2·exp(−t²/(32·m₂))) on a 50-point t grid spanning
//    (0, Σ‖xᵢ‖_h], zero violations. Under 5 min.
// ---------------------------------------------------------------------------

#[test]
fn a07_tail_domination() {
    criterion(7, "tail-domination", Duration::from_secs(300), || {
        let corpus = enumeration_corpus(0xACC0_0007, 10);
        assert_eq!(corpus.len(), 30);
        for sys in &corpus {
            let dist = exact_distribution(sys).unwrap();
            let m2 = dist.second_moment();
            let total = sys.total_norm();
            assert!(m2 > 0.0 && total > 0.0);
            for j in 1..=50 {
                let t = total * j as f64 / 50.0;
                let p = dist.tail(t);
                let bound = tail_bound_rademacher(t, m2).unwrap();
                assert!(
                    p <= bound + 1e-12,
                    "tail {p} above bound {bound} at t={t} (n={})",
                    sys.n()
                );
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 8. Moment-constant arithmetic: m2q(q) ≤ √(2q−1) for q = 1..80 with equality
//    at q=1 (1e−12), and the multinomial inequality holds over every
//    composition with q ≤ 6, n ≤ 5 parts; (q=2, k=(1,1)) is the equality 6=6.
// ---------------------------------------------------------------------------

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

#[test]
fn a08_moment_constants() {
    criterion(8, "moment-constants", Duration::from_secs(300), || {
        for q in 1..=80usize {
            let value = m2q(q).unwrap();
            let cap = ((2 * q - 1) as f64).sqrt();
            assert!(
                value <= cap * (1.0 + 1e-12),
                "m2q({q}) = {value} above {cap}"
            );
        }
        assert!((m2q(1).unwrap() - 1.0).abs() <= 1e-12);

        let mut checked = 0u64;
        for parts in 1..=5usize {
            for q in 1..=6usize {
                for k in compositions(q, parts) {
                    let (lhs, rhs) = multinomial_inequality_check(q, &k).unwrap();
                    assert!(
                        lhs <= rhs * (1.0 + 1e-12),
                        "multinomial inequality violated at q={q}, k={k:?}: {lhs} > {rhs}"
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 200, "composition sweep unexpectedly small");

        let (lhs, rhs) = multinomial_inequality_check(2, &[1, 1]).unwrap();
        assert!((lhs - 6.0).abs() <= 1e-9 && (rhs - 6.0).abs() <= 1e-9);
    });
}

// ---------------------------------------------------------------------------
// 9. Cone Chernoff: on a 10-configuration grid, wherever the closed-form
//    eigenvalue-tail bound is ≤ 0.9 the empirical tail's 99% Wilson upper
//    bound stays below it; 50 000 trials per configuration; at least 10
//    (configuration, branch) pairs must actually be asserted. Under 5 min.
// ---------------------------------------------------------------------------

#[test]
fn a09_cone_chernoff() {
    criterion(9, "cone-chernoff", Duration::from_secs(300), || {
        struct Config {
            form: HyperbolicForm,
            n: usize,
            generator: ConeGenerator,
            r: f64,
            delta: f64,
        }
        let grid = vec![
            Config {
                form: HyperbolicForm::product(4).unwrap(),
                n: 50,
                generator: ConeGenerator::UniformBox,
                r: 0.2,
                delta: 0.5,
            },
            Config {
                form: HyperbolicForm::product(4).unwrap(),
                n: 100,
                generator: ConeGenerator::UniformBox,
                r: 0.1,
                delta: 0.3,
            },
            Config {
                form: HyperbolicForm::product(6).unwrap(),
                n: 80,
                generator: ConeGenerator::UniformBox,
                r: 0.25,
                delta: 0.4,
            },
            Config {
                form: HyperbolicForm::determinant_symmetric(3).unwrap(),
                n: 60,
                generator: ConeGenerator::UniformBox,
                r: 0.2,
                delta: 0.5,
            },
            Config {
                form: HyperbolicForm::determinant_symmetric(4).unwrap(),
                n: 80,
                generator: ConeGenerator::UniformBox,
                r: 0.15,
                delta: 0.45,
            },
            Config {
                form: HyperbolicForm::lorentz(4).unwrap(),
                n: 70,
                generator: ConeGenerator::UniformBox,
                r: 0.2,
                delta: 0.5,
            },
            Config {
                form: HyperbolicForm::product(4).unwrap(),
                n: 50,
                generator: ConeGenerator::ScaledRankOne,
                r: 0.3,
                delta: 0.6,
            },
            Config {
                form: HyperbolicForm::product(5).unwrap(),
                n: 60,
                generator: ConeGenerator::ScaledRankOne,
                r: 0.25,
                delta: 0.5,
            },
            Config {
                form: HyperbolicForm::lorentz(6).unwrap(),
                n: 90,
                generator: ConeGenerator::UniformBox,
                r: 0.1,
                delta: 0.35,
            },
            Config {
                form: HyperbolicForm::determinant_symmetric(3).unwrap(),
                n: 100,
                generator: ConeGenerator::UniformBox,
                r: 0.1,
                delta: 0.25,
            },
        ];
        assert_eq!(grid.len(), 10);
        let mut asserted = 0u32;
        for (idx, cfg) in grid.into_iter().enumerate() {
            let spec = ConeSampleSpec::new(cfg.form, cfg.n, cfg.generator, cfg.r).unwrap();
            let seed = 0xACC0_0009 + idx as u64;
            let outcome = cone_chernoff_experiment(&spec, cfg.delta, 50_000, seed).unwrap();
            for (tail, bound, branch) in [
                (&outcome.max_tail, outcome.bound_max, "upper"),
                (&outcome.min_tail, outcome.bound_min, "lower"),
            ] {
                if bound <= 0.9 {
                    assert!(
                        tail.ci_high <= bound + 1e-12,
                        "config {idx} {branch} branch: Wilson upper {} above bound {bound}",
                        tail.ci_high
                    );
                    asserted += 1;
                }
            }
        }
        assert!(asserted >= 10, "only {asserted} branches had bound ≤ 0.9");
    });
}

// ---------------------------------------------------------------------------
// 10. Good-bucket hashing: on a conforming instance with p above the
//     1/(10τ²·log d) threshold, the frequency of hashes leaving ≤ 4/5 of the
//     buckets good stays below e^{−p/4} (99% Wilson lower bound), over 400
//     seeded hashes. Under 2 min.
// ---------------------------------------------------------------------------

#[test]
fn a10_bucket_lemma() {
    criterion(10, "bucket-lemma", Duration::from_secs(120), || {
        let form = HyperbolicForm::product(4).unwrap();
        let tau = 0.05;
        let d = form.degree() as f64;
        let p = 32usize;
        assert!(
            p as f64 >= 1.0 / (10.0 * tau * tau * d.ln()),
            "bucket count below the lemma's regime"
        );
        let n = 600usize;
        let xs: Vec<PointVec> = (0..n).map(|_| pv(vec![tau; 4])).collect();
        // Hypotheses: every eigenvalue equals τ (cap met, cone met) and the
        // spread Σ λ_min² = n·τ² = 1.5 ≥ 1.
        let hashes = 400u64;
        let mut bad = 0u64;
        for h in 0..hashes {
            let hash = random_bucket_hash(n, p, 0xACC0_0010 + h).unwrap();
            let (good, threshold) = good_bucket_fraction(&form, &xs, &hash, tau).unwrap();
            assert!((threshold - 1.0 / (2.0 * tau * p as f64)).abs() <= 1e-15);
            if 5 * good <= 4 * p {
                bad += 1;
            }
        }
        let (ci_low, _) = wilson99(bad, hashes);
        let cap = (-(p as f64) / 4.0).exp();
        assert!(
            ci_low <= cap,
            "bad-hash frequency {} (of {hashes}) not consistent with e^(−p/4) = {cap}",
            bad as f64 / hashes as f64
        );
    });
}

// ---------------------------------------------------------------------------
// 11. Eight deviations: on 100 seeded rank-1 systems (n ≤ 16) the exhaustive
//     sign optimum is ≤ 8σ, and uniform random signs land at ≤ 8σ with
//     frequency ≥ 1 − 2/e minus Wilson slack (the 99% upper confidence bound
//     must reach 1 − 2/e). Under 5 min.
// ---------------------------------------------------------------------------

#[test]
fn a11_eight_deviations() {
    criterion(11, "eight-deviations", Duration::from_secs(300), || {
        let seed = 0xACC0_0011u64;
        let floor = 1.0 - 2.0 / std::f64::consts::E;
        for i in 0..100u64 {
            let n = 8 + (i % 9) as usize; // 8..=16
            let sys = if i % 2 == 0 {
                // Packed rank-1 matrices u·uᵀ under the symmetric determinant.
                let dim = 2 + ((i / 2) % 5) as usize; // 2..=6
                let form = HyperbolicForm::determinant_symmetric(dim).unwrap();
                let vectors: Vec<PointVec> = (0..n as u64)
                    .map(|j| {
                        let mut rng = trial_rng(seed, StreamDomain::VectorGen, i * 64 + j);
                        pack_outer(&gaussian_entries(&mut rng, dim))
                    })
                    .collect();
                VectorSystem::new(form, vectors).unwrap()
            } else {
                // Single-support vectors under the coordinate product.
                let m = 2 + ((i / 2) % 7) as usize; // 2..=8
                let form = HyperbolicForm::product(m).unwrap();
                let vectors: Vec<PointVec> = (0..n as u64)
                    .map(|j| {
                        let mut rng = trial_rng(seed, StreamDomain::VectorGen, i * 64 + j);
                        let support = rng.random_range(0..m);
                        let c: f64 = rng.random_range(0.1..2.0);
                        let mut entries = vec![0.0; m];
                        entries[support] = c;
                        pv(entries)
                    })
                    .collect();
                VectorSystem::new(form, vectors).unwrap()
            };
            assert_eq!(sys.max_rank(), 1, "system {i} is not rank-1");
            let sigma = sys.sigma();
            let (_, optimum) = best_signs_exhaustive(&sys).unwrap();
            assert!(
                optimum <= 8.0 * sigma + 1e-9 * sigma,
                "system {i}: exhaustive optimum {optimum} above 8σ = {}",
                8.0 * sigma
            );

            let trials = 1000u64;
            let search = best_signs_random(&sys, trials, seed + i).unwrap();
            assert!(search.best_value() >= optimum - 1e-12 * sigma);
            let successes =
                (search.success_fraction_at(8.0 * sigma) * trials as f64).round() as u64;
            let (_, ci_high) = wilson99(successes, trials);
            assert!(
                ci_high >= floor,
                "system {i}: success rate {} not consistent with ≥ 1 − 2/e",
                successes as f64 / trials as f64
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 12. Sub-isotropic partitioning: the exhaustive k-partition optimum is at
//     most (√ε+√(σ/k))² on conforming cone instances with k^n ≤ 2·10⁶,
//     zero violations. Under 5 min.
// ---------------------------------------------------------------------------

#[test]
fn a12_ks_partition() {
    criterion(12, "ks-partition", Duration::from_secs(300), || {
        let seed = 0xACC0_0012u64;

        enum Family {
            Product(usize),
            DetSym(usize),
            Lorentz(usize),
        }
        let configs = [
            (Family::Product(4), 2usize, 16usize, 0.2),
            (Family::Product(4), 2, 20, 0.15),
            (Family::Product(4), 3, 10, 0.25),
            (Family::Product(4), 4, 8, 0.3),
            (Family::DetSym(3), 2, 14, 0.2),
            (Family::DetSym(3), 3, 9, 0.25),
            (Family::Lorentz(4), 2, 16, 0.2),
            (Family::Lorentz(4), 3, 10, 0.25),
            (Family::Lorentz(4), 4, 9, 0.3),
            (Family::Product(5), 3, 12, 0.2),
        ];
        for (idx, (family, k, n, eps_target)) in configs.iter().enumerate() {
            let (form, make) = match family {
                Family::Product(m) => {
                    let m = *m;
                    let make = Box::new(move |rng: &mut rand_chacha::ChaCha8Rng| {
                        let entries: Vec<f64> =
                            gaussian_entries(rng, m).into_iter().map(f64::abs).collect();
                        pv(entries)
                    })
                        as Box<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> PointVec>;
                    (HyperbolicForm::product(m).unwrap(), make)
                }
                Family::DetSym(d) => {
                    let d = *d;
                    let make = Box::new(move |rng: &mut rand_chacha::ChaCha8Rng| {
                        pack_outer(&gaussian_entries(rng, d))
                    })
                        as Box<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> PointVec>;
                    (HyperbolicForm::determinant_symmetric(d).unwrap(), make)
                }
                Family::Lorentz(m) => {
                    let m = *m;
                    let make = Box::new(move |rng: &mut rand_chacha::ChaCha8Rng| {
                        let v = gaussian_entries(rng, m - 1);
                        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                        let head = norm * (1.0 + rng.random_range(0.0..1.0));
                        let mut entries = vec![head];
                        entries.extend(v);
                        pv(entries)
                    })
                        as Box<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> PointVec>;
                    (HyperbolicForm::lorentz(m).unwrap(), make)
                }
            };
            let mut rng = trial_rng(seed, StreamDomain::VectorGen, idx as u64);
            let xs: Vec<PointVec> = (0..*n)
                .map(|_| {
                    let raw = make(&mut rng);
                    let trace = eigenvalues(&form, &raw).unwrap().trace();
                    let target = eps_target * rng.random_range(0.3..1.0);
                    raw.scaled(target / trace)
                })
                .collect();
            let budget = PartitionBudget::default();
            let outcome = partition_search(&form, &xs, *k, &budget).unwrap();
            assert!(outcome.exhaustive, "config {idx} fell back to local search");
            let expected = (outcome.epsilon.sqrt() + (outcome.sigma / *k as f64).sqrt()).powi(2);
            assert!((outcome.bound_simple - expected).abs() <= 1e-12 * expected);
            assert!(
                outcome.max_part_norm <= expected * (1.0 + 1e-9),
                "config {idx}: optimum {} above (√ε+√(σ/k))² = {expected}",
                outcome.max_part_norm
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 13. Mixed polynomials: the largest mixed root dominates λ_max of the plain
//     sum on 200 cone tuples; the δ bound hits its closed-form anchors
//     δ(1,∞,∞)=4 and δ(0.25,∞,∞)=2.25 within 1e−4; and on conforming rank-1
//     instances the mixed root obeys σ·δ(ε/σ, n, r). Under 5 min.
// ---------------------------------------------------------------------------

#[test]
fn a13_mixed_roots() {
    criterion(13, "mixed-roots", Duration::from_secs(300), || {
        let seed = 0xACC0_0013u64;

        // Root comparison on 200 tuples, alternating the two matrix-like
        // families, n ≤ 6, degree ≤ 4.
        for i in 0..200u64 {
            let (form, dim_for_make) = if i % 2 == 0 {
                let m = 2 + (i % 3) as usize;
                (HyperbolicForm::product(m).unwrap(), m)
            } else {
                let d = 2 + (i % 3) as usize;
                (HyperbolicForm::determinant_symmetric(d).unwrap(), d)
            };
            let n = 1 + (i % 6) as usize;
            let mut rng = trial_rng(seed, StreamDomain::VectorGen, i);
            let vs: Vec<PointVec> = (0..n)
                .map(|_| {
                    if i % 2 == 0 {
                        pv(gaussian_entries(&mut rng, dim_for_make)
                            .into_iter()
                            .map(f64::abs)
                            .collect())
                    } else {
                        pack_outer(&gaussian_entries(&mut rng, dim_for_make)).scaled(0.5)
                    }
                })
                .collect();
            let mixed_root = lambda_max_mixed(&form, &vs).unwrap();
            let sum_top = eigenvalues(&form, &vec_sum(&vs)).unwrap().lambda_max();
            let scale = 1.0
                + vs.iter()
                    .map(|v| eigenvalues(&form, v).unwrap().spectral_norm())
                    .sum::<f64>();
            assert!(
                sum_top <= mixed_root + 1e-7 * scale,
                "tuple {i}: λ_max(Σv) = {sum_top} above mixed root {mixed_root}"
            );
        }

        // Closed-form anchors of the δ function.
        let at = |eps: f64| {
            delta_bound(&DeltaQuery::new(eps, Extent::Infinite, Extent::Infinite).unwrap())
                .unwrap()
                .value
        };
        assert!((at(1.0) - 4.0).abs() <= 1e-4, "δ(1,∞,∞) = {}", at(1.0));
        assert!(
            (at(0.25) - 2.25).abs() <= 1e-4,
            "δ(0.25,∞,∞) = {}",
            at(0.25)
        );

        // Conforming rank-1 instances: mixed root ≤ σ·δ(ε/σ, n, r).
        for i in 0..20u64 {
            let m = 3 + (i % 3) as usize;
            let form = HyperbolicForm::product(m).unwrap();
            let n = 2 + (i % 5) as usize;
            let mut rng = trial_rng(seed, StreamDomain::PartitionSearch, i);
            let vs: Vec<PointVec> = (0..n)
                .map(|_| {
                    let support = rng.random_range(0..m);
                    let c: f64 = rng.random_range(0.05..0.4);
                    let mut entries = vec![0.0; m];
                    entries[support] = c;
                    pv(entries)
                })
                .collect();
            let eps = vs
                .iter()
                .map(|v| eigenvalues(&form, v).unwrap().trace())
                .fold(0.0, f64::max);
            let sigma = eigenvalues(&form, &vec_sum(&vs)).unwrap().spectral_norm();
            let query =
                DeltaQuery::new(eps / sigma, Extent::Finite(n as u64), Extent::Finite(1)).unwrap();
            let cap = sigma * delta_bound(&query).unwrap().value;
            let mixed_root = lambda_max_mixed(&form, &vs).unwrap();
            assert!(
                mixed_root <= cap * (1.0 + 1e-6),
                "instance {i}: mixed root {mixed_root} above σ·δ = {cap}"
            );
        }
    });
}
