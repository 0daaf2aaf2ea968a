//! Randomized algebraic invariants with shrinking, complementing the seeded
//! module tests and the acceptance battery.

use proptest::prelude::*;

use hyperlab_core::concentration::VectorSystem;
use hyperlab_core::discrepancy::{best_signs_exhaustive, best_signs_random};
use hyperlab_core::forms::{pack_outer, HyperbolicForm, PointVec};
use hyperlab_core::spectra::eigenvalues;

fn pv(entries: Vec<f64>) -> PointVec {
    PointVec::new(entries).unwrap()
}

/// Pick one of the three closed-form families at the given size parameter
/// (matrix side, factor count, or quadratic dimension respectively).
fn pick_form(which: u8, size: usize) -> HyperbolicForm {
    match which % 3 {
        0 => HyperbolicForm::product(size).unwrap(),
        1 => HyperbolicForm::determinant_symmetric(size).unwrap(),
        _ => HyperbolicForm::lorentz(size).unwrap(),
    }
}

/// Truncate a generated entry pool to the form's point dimension.
fn point_for(form: &HyperbolicForm, pool: &[f64]) -> PointVec {
    pv(pool[..form.dimension()].to_vec())
}

/// A point inside the closed cone of the given family; `size` is the same
/// parameter the form was built from.
fn cone_point_for(form: &HyperbolicForm, which: u8, size: usize, pool: &[f64]) -> PointVec {
    match which % 3 {
        0 => pv(pool[..form.dimension()].iter().map(|v| v.abs()).collect()),
        1 => {
            // Sum of two packed rank-one outer products is positive
            // semidefinite by construction.
            let d = size;
            let a = pack_outer(&pool[..d]);
            let b = pack_outer(&pool[d..2 * d]);
            pv(a.as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| x + y)
                .collect())
        }
        _ => {
            let m = form.dimension();
            let tail = &pool[1..m];
            let norm = tail.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut entries = vec![norm * (1.0 + pool[0].abs())];
            entries.extend_from_slice(tail);
            pv(entries)
        }
    }
}

proptest! {
    /// Eigenvalues transform affinely along the direction axis:
    /// λ(s·x + t·e) is the sorted image of s·λ(x) + t.
    #[test]
    fn eigenvalues_transform_affinely(
        which in 0u8..3,
        size in 2usize..6,
        pool in prop::collection::vec(-10.0f64..10.0, 15),
        s in -3.0f64..3.0,
        t in -5.0f64..5.0,
    ) {
        let form = pick_form(which, size);
        let x = point_for(&form, &pool);
        let base = eigenvalues(&form, &x).unwrap();
        let e = form.direction();
        let shifted = pv(x
            .as_slice()
            .iter()
            .zip(e.as_slice())
            .map(|(xi, ei)| s * xi + t * ei)
            .collect());
        let observed = eigenvalues(&form, &shifted).unwrap();
        let mut expected: Vec<f64> = base.values().iter().map(|l| s * l + t).collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        let tol = 1e-8 * (1.0 + s.abs() * base.spectral_norm() + t.abs());
        for (a, b) in observed.values().iter().zip(&expected) {
            prop_assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
        }
    }

    /// The trace equals the direction-derivative coefficient D_v h(e)/h(e).
    /// Both sides are linear in v, so the check runs on the unit-scaled
    /// vector, where the derivative's interpolation stays well conditioned.
    #[test]
    fn trace_is_the_normalized_first_derivative(
        which in 0u8..3,
        size in 2usize..6,
        pool in prop::collection::vec(-10.0f64..10.0, 15),
    ) {
        let form = pick_form(which, size);
        let raw = point_for(&form, &pool);
        prop_assume!(raw.euclidean_norm() > 1e-6);
        let v = raw.scaled(1.0 / raw.euclidean_norm());
        let trace = eigenvalues(&form, &v).unwrap().trace();
        let e = form.direction().clone();
        let he = form.evaluate(&e).unwrap();
        let deriv = form.directional_derivative(&e, std::slice::from_ref(&v)).unwrap();
        prop_assert!(
            (trace - deriv / he).abs() <= 1e-8 * (1.0 + trace.abs()),
            "trace {trace} vs derivative ratio {}",
            deriv / he
        );
    }

    /// The trace is linear: tr(x + y) = tr(x) + tr(y).
    #[test]
    fn trace_is_linear(
        which in 0u8..3,
        size in 2usize..6,
        pool_x in prop::collection::vec(-10.0f64..10.0, 15),
        pool_y in prop::collection::vec(-10.0f64..10.0, 15),
    ) {
        let form = pick_form(which, size);
        let x = point_for(&form, &pool_x);
        let y = point_for(&form, &pool_y);
        let sum = pv(x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| a + b)
            .collect());
        let tx = eigenvalues(&form, &x).unwrap().trace();
        let ty = eigenvalues(&form, &y).unwrap().trace();
        let ts = eigenvalues(&form, &sum).unwrap().trace();
        let scale = 1.0 + tx.abs() + ty.abs();
        prop_assert!((ts - (tx + ty)).abs() <= 1e-8 * scale);
    }

    /// Convexity of the cone: midpoints of cone points stay in the cone.
    #[test]
    fn cone_is_convex(
        which in 0u8..3,
        size in 2usize..6,
        pool_x in prop::collection::vec(-10.0f64..10.0, 15),
        pool_y in prop::collection::vec(-10.0f64..10.0, 15),
        theta in 0.0f64..1.0,
    ) {
        let form = pick_form(which, size);
        let x = cone_point_for(&form, which, size, &pool_x);
        let y = cone_point_for(&form, which, size, &pool_y);
        let mix = pv(x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| theta * a + (1.0 - theta) * b)
            .collect());
        let spectrum = eigenvalues(&form, &mix).unwrap();
        let scale = 1.0 + spectrum.spectral_norm();
        prop_assert!(
            spectrum.lambda_min() >= -1e-9 * scale,
            "λ_min = {} left the cone",
            spectrum.lambda_min()
        );
    }

    /// Absolute homogeneity of the spectral norm: ‖c·x‖ = |c|·‖x‖.
    #[test]
    fn spectral_norm_is_absolutely_homogeneous(
        which in 0u8..3,
        size in 2usize..6,
        pool in prop::collection::vec(-10.0f64..10.0, 15),
        c in -4.0f64..4.0,
    ) {
        let form = pick_form(which, size);
        let x = point_for(&form, &pool);
        let norm_x = eigenvalues(&form, &x).unwrap().spectral_norm();
        let norm_cx = eigenvalues(&form, &x.scaled(c)).unwrap().spectral_norm();
        let scale = 1.0 + c.abs() * norm_x;
        prop_assert!((norm_cx - c.abs() * norm_x).abs() <= 1e-9 * scale);
    }

    /// The exhaustive sign optimum is a floor for every random-search result.
    #[test]
    fn exhaustive_sign_optimum_floors_random_search(
        which in 0u8..3,
        size in 2usize..5,
        n in 2usize..8,
        pool in prop::collection::vec(-5.0f64..5.0, 8 * 15),
        seed in any::<u64>(),
    ) {
        let form = pick_form(which, size);
        let m = form.dimension();
        let vectors: Vec<PointVec> = (0..n)
            .map(|i| pv(pool[i * m..(i + 1) * m].to_vec()))
            .collect();
        let sys = VectorSystem::new(form, vectors).unwrap();
        let (_, optimum) = best_signs_exhaustive(&sys).unwrap();
        let search = best_signs_random(&sys, 100, seed).unwrap();
        prop_assert!(search.best_value() >= optimum - 1e-12 * (1.0 + optimum));
        prop_assert!(search.success_fraction_at(sys.total_norm() + 1e-9) == 1.0);
    }
}
