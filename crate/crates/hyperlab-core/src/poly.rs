//! Univariate polynomial kernel: Horner evaluation, Newton interpolation on
//! arbitrary nodes, and complex root finding via a balanced companion matrix
//! polished by Aberth–Ehrlich iteration.
//!
//! Coefficient convention throughout: `coeffs[j]` multiplies `t^j`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Horner evaluation of Σ coeffs[j]·t^j.
pub fn polyval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Horner evaluation at a complex point.
pub fn polyval_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::ZERO, |acc, &c| acc * z + c)
}

/// Monomial coefficients of the unique polynomial of degree < nodes.len()
/// interpolating `values` at `nodes` (Newton divided differences, then
/// expansion of the Newton form).
///
/// Exact for polynomial data up to floating-point rounding; nodes must be
/// pairwise distinct.
pub fn interpolate(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    assert_eq!(n, values.len(), "one value per node");
    assert!(n > 0, "at least one node");

    // Divided-difference table, computed in place: a[i] = f[x_0, …, x_i].
    let mut a = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            a[i] = (a[i] - a[i - 1]) / (nodes[i] - nodes[i - j]);
        }
    }

    // Expand the Newton form a[0] + a[1](t−x₀) + … by synthetic multiplication.
    let mut c = vec![0.0; n];
    c[0] = a[n - 1];
    let mut deg = 0;
    for i in (0..n - 1).rev() {
        deg += 1;
        for k in (1..=deg).rev() {
            c[k] = c[k - 1] - nodes[i] * c[k];
        }
        c[0] = a[i] - nodes[i] * c[0];
    }
    c
}

/// All complex roots of Σ coeffs[j]·t^j with a nonzero leading coefficient.
///
/// Degrees 1 and 2 use closed forms; otherwise eigenvalues of the balanced
/// companion matrix (bounded QR; a Fujiwara-circle seeding takes over if QR
/// stalls) are polished by Aberth–Ehrlich iteration until the residual
/// reaches 1e−13·scale^d, scale = max(1, max |root|).
///
/// Accuracy caveat: the stopping rule is residual-based, so a root of
/// multiplicity k is only located to ~(1e−13)^{1/k} — the intrinsic
/// conditioning of multiple roots under coefficient rounding.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    if !lead.is_finite() || lead == 0.0 {
        return Err(Error::NumericalFailure {
            context: "root finding: zero or non-finite leading coefficient".into(),
            residual: lead.abs(),
        });
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NumericalFailure {
            context: "root finding: non-finite coefficient".into(),
            residual: f64::INFINITY,
        });
    }
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();

    if d == 1 {
        return Ok(vec![Complex64::new(-monic[0], 0.0)]);
    }
    if d == 2 {
        return Ok(quadratic_roots(monic[0], monic[1]));
    }

    let (mut z, sweeps) = match companion_eigenvalues(&monic) {
        Some(z) => (z, ABERTH_POLISH_SWEEPS),
        None => (circle_initial_guesses(&monic), ABERTH_COLD_START_SWEEPS),
    };
    aberth_polish(&monic, &mut z, sweeps);
    if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(Error::NumericalFailure {
            context: "root finding: non-finite root after polish".into(),
            residual: f64::INFINITY,
        });
    }
    Ok(z)
}

/// Roots of t² + b·t + c (monic), stable against cancellation.
fn quadratic_roots(c: f64, b: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        let (r1, r2) = if q != 0.0 { (q, c / q) } else { (0.0, 0.0) };
        vec![Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let s = (-disc).sqrt() * 0.5;
        let re = -0.5 * b;
        vec![Complex64::new(re, -s), Complex64::new(re, s)]
    }
}

/// Eigenvalues of the balanced Frobenius companion matrix of a monic
/// polynomial (coefficients `monic`, leading coefficient 1 implicit).
/// Returns None when bounded QR iteration fails to converge — possible for
/// companion matrices whose eigenvalues share one modulus (e.g. t⁴ + 1),
/// where the Francis shift can stall.
fn companion_eigenvalues(monic: &[f64]) -> Option<Vec<Complex64>> {
    let d = monic.len() - 1;
    let mut a = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        a[(i, d - 1)] = -monic[i];
        if i + 1 < d {
            a[(i + 1, i)] = 1.0;
        }
    }
    balance(&mut a);
    let schur = nalgebra::linalg::Schur::try_new(a, f64::EPSILON, 100 * d * d)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

/// Initial root guesses on a circle of Fujiwara's root-magnitude bound, with
/// an offset angle so the guesses never align with a symmetry of the root
/// set (which could trap the simultaneous iteration in an invariant
/// configuration).
fn circle_initial_guesses(monic: &[f64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let mut bound = 0.0f64;
    for k in 1..=d {
        let a = monic[d - k].abs();
        if a > 0.0 {
            bound = bound.max(a.powf(1.0 / k as f64));
        }
    }
    let radius = (2.0 * bound).max(1e-3);
    (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.7;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Parlett–Reinsch balancing by powers of two (a similarity transform, so
/// eigenvalues are unchanged while their conditioning improves). Scaling a
/// row by 1/f and its column by f multiplies the column sum c by f and
/// divides the row sum r by f; the loops track c·f² so that (c + r)/f is the
/// rescaled sum, and a rescale is accepted only when it shrinks the sum by
/// at least 5%, which forces termination. The sweep cap is pure defense: an
/// early exit still leaves a similarity transform.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    r += a[(i, j)].abs();
                    c += a[(j, i)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Sweep budget when polishing already-good eigenvalue seeds.
const ABERTH_POLISH_SWEEPS: usize = 40;
/// Sweep budget when starting cold from the Fujiwara circle.
const ABERTH_COLD_START_SWEEPS: usize = 500;
const ABERTH_RESIDUAL_TOL: f64 = 1e-13;

/// Aberth–Ehrlich simultaneous refinement of all roots of a monic polynomial.
fn aberth_polish(monic: &[f64], z: &mut [Complex64], max_sweeps: usize) {
    let d = monic.len() - 1;
    // Derivative of the monic polynomial (leading coefficient 1 included).
    let mut deriv = vec![0.0; d];
    for j in 1..d {
        deriv[j - 1] = monic[j] * j as f64;
    }
    let dd = d as f64;

    let eval = |w: Complex64| -> Complex64 {
        // Monic Horner: leading coefficient 1.
        let mut acc = Complex64::new(1.0, 0.0);
        for &c in monic[..d].iter().rev() {
            acc = acc * w + c;
        }
        acc
    };
    let eval_deriv = |w: Complex64| -> Complex64 {
        let mut acc = Complex64::new(dd, 0.0);
        for &c in deriv[..d - 1].iter().rev() {
            acc = acc * w + c;
        }
        acc
    };

    for _ in 0..max_sweeps {
        let scale = z.iter().map(|w| w.norm()).fold(1.0f64, f64::max);
        let target = ABERTH_RESIDUAL_TOL * scale.powi(d as i32);
        let residual = z.iter().map(|&w| eval(w).norm()).fold(0.0f64, f64::max);
        if residual <= target {
            break;
        }
        let mut max_step = 0.0f64;
        for i in 0..d {
            let p = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let dp = eval_deriv(z[i]);
            if dp.norm() == 0.0 {
                // Critical point: nudge off it deterministically.
                z[i] += Complex64::new(1e-8 * (1.0 + z[i].norm()), 0.0);
                continue;
            }
            let newton = p / dp;
            let mut repulsion = Complex64::ZERO;
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step <= 1e-15 {
            break;
        }
    }
}
