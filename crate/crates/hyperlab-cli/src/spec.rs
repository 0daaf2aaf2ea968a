//! JSON experiment descriptions: suite selection, polynomial family, vector
//! source, suite parameters, and the mandatory seed. Parsing is strict
//! (unknown fields are rejected) and serialization round-trips exactly.

use hyperlab_core::rng::{gaussian_entries, trial_rng, StreamDomain};
use hyperlab_core::spectra::eigenvalues;
use hyperlab_core::{FamilyKind, HyperbolicForm, PointVec};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Which experiment battery to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Eig,
    Norms,
    Chernoff,
    ConeChernoff,
    Anticoncentration,
    Discrepancy,
    KadisonSinger,
    Mixed,
    VerifyAll,
}

impl Suite {
    /// Stable name used in the CSV `suite` column and the JSON summary.
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Eig => "eig",
            Suite::Norms => "norms",
            Suite::Chernoff => "chernoff",
            Suite::ConeChernoff => "cone_chernoff",
            Suite::Anticoncentration => "anticoncentration",
            Suite::Discrepancy => "discrepancy",
            Suite::KadisonSinger => "kadison_singer",
            Suite::Mixed => "mixed",
            Suite::VerifyAll => "verify_all",
        }
    }
}

/// Named polynomial family with its size parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// x₁⋯x_m (eigenvalues are the coordinates).
    Product { m: usize },
    /// det on packed symmetric d×d matrices.
    DeterminantSymmetric { d: usize },
    /// x₁² − x₂² − ⋯ − x_m².
    Lorentz { m: usize },
    /// k-th elementary symmetric polynomial in m variables.
    ElementarySymmetric { m: usize, k: usize },
}

impl FamilySpec {
    /// Construct the form, turning size errors into usage errors.
    pub fn build(&self) -> Result<HyperbolicForm> {
        let form = match *self {
            FamilySpec::Product { m } => HyperbolicForm::product(m),
            FamilySpec::DeterminantSymmetric { d } => HyperbolicForm::determinant_symmetric(d),
            FamilySpec::Lorentz { m } => HyperbolicForm::lorentz(m),
            FamilySpec::ElementarySymmetric { m, k } => HyperbolicForm::elementary_symmetric(m, k),
        };
        form.map_err(|e| CliError::Usage(format!("family: {e}")))
    }

    /// Comma-free label for CSV cells, e.g. `product_4`.
    pub fn label(&self) -> String {
        match *self {
            FamilySpec::Product { m } => format!("product_{m}"),
            FamilySpec::DeterminantSymmetric { d } => format!("determinant_symmetric_{d}"),
            FamilySpec::Lorentz { m } => format!("lorentz_{m}"),
            FamilySpec::ElementarySymmetric { m, k } => format!("elementary_symmetric_{m}_{k}"),
        }
    }
}

/// How random vectors are drawn (always from the experiment seed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Independent standard normal coordinates.
    Gaussian,
    /// Cone members with eigenvalues in [0, R·u], u uniform in [1/4, 1]:
    /// a gaussian point shifted to the cone boundary and rescaled.
    ConeUniform,
    /// Rank-one cone members (single eigenvalue direction per vector).
    RankOne,
    /// Gaussian points rescaled to spectral norm 1.
    UnitNorm,
}

/// Vector source: an explicit list or a seeded generator with a count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Eigenvalue cap R for `cone_uniform` (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl VectorSpec {
    pub fn count(&self) -> usize {
        match (&self.explicit, self.n) {
            (Some(list), _) => list.len(),
            (None, Some(n)) => n,
            (None, None) => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        match (&self.explicit, &self.generator) {
            (Some(list), None) => {
                if list.is_empty() {
                    return Err(CliError::Usage("vectors.explicit must be non-empty".into()));
                }
                if self.n.is_some_and(|n| n != list.len()) {
                    return Err(CliError::Usage(
                        "vectors.n contradicts the explicit list length".into(),
                    ));
                }
                Ok(())
            }
            (None, Some(_)) => {
                if self.n.is_none_or(|n| n == 0) {
                    return Err(CliError::Usage("a vector generator needs n ≥ 1".into()));
                }
                Ok(())
            }
            (Some(_), Some(_)) => Err(CliError::Usage(
                "give either vectors.explicit or vectors.generator, not both".into(),
            )),
            (None, None) => Err(CliError::Usage(
                "vectors needs either an explicit list or a generator".into(),
            )),
        }
    }
}

/// Suite-specific knobs; every field is optional and suites document their
/// defaults. Unknown keys are rejected at parse time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Moment order (norms, chernoff).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Tail thresholds (chernoff).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    /// Relative deviation δ (cone_chernoff).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Interval widths Δ (anticoncentration).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    /// Part count (kadison_singer).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Eigenvalue cap τ (anticoncentration; default: measured).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Boundary width ρ (anticoncentration; boundary pass runs only if set).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Monte-Carlo trial count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

/// One experiment: everything needed to reproduce a report bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub suite: Suite,
    pub family: FamilySpec,
    /// Second family for two-family suites (anticoncentration); defaults to
    /// mirroring `family`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family2: Option<FamilySpec>,
    pub vectors: VectorSpec,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    pub seed: u64,
    /// Output path prefix; `--out` overrides, and the description file's
    /// stem is the fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Params {
    fn is_empty(&self) -> bool {
        *self == Params::default()
    }
}

impl ExperimentSpec {
    /// Strict parse; any malformed or unknown field is a usage error.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("invalid experiment description: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }

    /// Suite-specific structural checks, reported before anything runs.
    pub fn validate(&self) -> Result<()> {
        self.vectors.validate()?;
        if self.params.trials == Some(0) {
            return Err(CliError::Usage("params.trials must be ≥ 1".into()));
        }
        match self.suite {
            Suite::ConeChernoff => match self.vectors.generator {
                Some(GeneratorKind::ConeUniform) | Some(GeneratorKind::RankOne) => Ok(()),
                _ => Err(CliError::Usage(
                    "cone_chernoff samples fresh cone vectors every trial: use \
                     vectors.generator = cone_uniform or rank_one"
                        .into(),
                )),
            },
            Suite::Anticoncentration | Suite::KadisonSinger | Suite::Mixed => {
                match self.vectors.generator {
                    Some(GeneratorKind::Gaussian) | Some(GeneratorKind::UnitNorm) => {
                        Err(CliError::Usage(format!(
                            "{} needs cone vectors: use cone_uniform, rank_one, or an \
                             explicit list of cone members",
                            self.suite.name()
                        )))
                    }
                    _ => {
                        if self.suite == Suite::Mixed && self.vectors.count() > 12 {
                            return Err(CliError::Usage(
                                "mixed enumerates 2^n subset terms; n ≤ 12".into(),
                            ));
                        }
                        Ok(())
                    }
                }
            }
            _ => Ok(()),
        }
    }
}

/// Materialize the vector source for `form`. Generator streams are indexed
/// by `stream_offset + i` so two families in one experiment draw disjoint
/// streams from the same seed.
pub fn generate_vectors(
    form: &HyperbolicForm,
    vectors: &VectorSpec,
    seed: u64,
    stream_offset: u64,
) -> Result<Vec<PointVec>> {
    if let Some(list) = &vectors.explicit {
        let m = form.dimension();
        return list
            .iter()
            .enumerate()
            .map(|(i, entries)| {
                if entries.len() != m {
                    return Err(CliError::Usage(format!(
                        "explicit vector {i} has {} coordinates; the family needs {m}",
                        entries.len()
                    )));
                }
                PointVec::new(entries.clone()).map_err(|e| CliError::Usage(e.to_string()))
            })
            .collect();
    }
    let kind = vectors.generator.expect("validated: generator present");
    let n = vectors.n.expect("validated: n present");
    let r = vectors.r.unwrap_or(1.0);
    if !(r.is_finite() && r > 0.0) {
        return Err(CliError::Usage("vectors.r must be finite and > 0".into()));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = trial_rng(seed, StreamDomain::VectorGen, stream_offset + i as u64);
        let v = match kind {
            GeneratorKind::Gaussian => gaussian_point(form, &mut rng)?,
            GeneratorKind::UnitNorm => {
                let x = gaussian_point(form, &mut rng)?;
                let norm = eigenvalues(form, &x)?.spectral_norm();
                if norm <= 1e-12 {
                    return Err(CliError::Failure(format!(
                        "degenerate unit_norm sample at index {i}: spectral norm {norm:.3e}"
                    )));
                }
                x.scaled(1.0 / norm)
            }
            GeneratorKind::ConeUniform => cone_uniform_point(form, r, &mut rng)?,
            GeneratorKind::RankOne => rank_one_point(form, &mut rng)?,
        };
        out.push(v);
    }
    Ok(out)
}

fn gaussian_point(form: &HyperbolicForm, rng: &mut impl Rng) -> Result<PointVec> {
    PointVec::new(gaussian_entries(rng, form.dimension())).map_err(CliError::from)
}

/// Shift a gaussian point onto the cone and rescale its spectrum into
/// [0, R·u]: y = (x − λ_min·e) · R·u/(λ_max − λ_min).
fn cone_uniform_point(form: &HyperbolicForm, r: f64, rng: &mut impl Rng) -> Result<PointVec> {
    let x = gaussian_point(form, rng)?;
    let u: f64 = rng.random_range(0.25..1.0);
    let spectrum = eigenvalues(form, &x)?;
    let span = spectrum.lambda_max() - spectrum.lambda_min();
    let e = form.direction();
    if span <= 1e-12 * (1.0 + spectrum.spectral_norm()) {
        // Degenerate spread (e.g. degree-1 families): use the direction axis.
        return Ok(e.scaled(r * u));
    }
    let scale = r * u / span;
    let entries = x
        .as_slice()
        .iter()
        .zip(e.as_slice())
        .map(|(&xi, &ei)| (xi - spectrum.lambda_min() * ei) * scale)
        .collect();
    PointVec::new(entries).map_err(CliError::from)
}

/// One rank-one cone member per family: a scaled coordinate axis where the
/// coordinates are the eigenvalue directions, a packed outer product for the
/// determinant family, and an extreme ray for the Lorentz family.
fn rank_one_point(form: &HyperbolicForm, rng: &mut impl Rng) -> Result<PointVec> {
    let scale: f64 = rng.random_range(0.1..1.0);
    match *form.kind() {
        FamilyKind::Product { m } | FamilyKind::ElementarySymmetric { m, .. } => {
            let axis = rng.random_range(0..m);
            let mut entries = vec![0.0; m];
            entries[axis] = scale;
            PointVec::new(entries).map_err(CliError::from)
        }
        FamilyKind::DeterminantSymmetric { d } => {
            let u = gaussian_entries(rng, d);
            Ok(hyperlab_core::forms::pack_outer(&u).scaled(scale))
        }
        FamilyKind::LorentzQuadratic { m } => {
            let v = gaussian_entries(rng, m - 1);
            let head = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let mut entries = Vec::with_capacity(m);
            entries.push(head);
            entries.extend_from_slice(&v);
            Ok(PointVec::new(entries)
                .map_err(CliError::from)?
                .scaled(scale))
        }
        FamilyKind::DenseHomogeneous { .. } => Err(CliError::Usage(
            "rank_one generation is only defined for the named families".into(),
        )),
    }
}
