//! Hyperbolic polynomial families: representation, evaluation, directional
//! derivatives, and an empirical hyperbolicity check.
//!
//! A form h of degree d in m variables is hyperbolic with respect to a
//! direction e when h(e) ≠ 0 and t ↦ h(te − x) has only real roots for every
//! x. The families here are the standard examples: coordinate products,
//! determinants of symmetric matrices (in packed coordinates), Lorentz
//! quadratics x₁² − x₂² − ⋯ − x_m², elementary symmetric polynomials, and
//! arbitrary dense homogeneous term lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::restriction;
use crate::rng::{gaussian_entries, trial_rng, StreamDomain};

/// A point (or direction) in the form's ambient space ℝ^m.
///
/// Invariant: every entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVec {
    entries: Vec<f64>,
}

impl PointVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "point entry {bad} is not finite"
            )));
        }
        Ok(PointVec { entries })
    }

    /// Internal constructor for arithmetic results whose entries are known
    /// to be finite at desk scale.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        PointVec { entries }
    }

    pub fn zeros(m: usize) -> Self {
        PointVec {
            entries: vec![0.0; m],
        }
    }

    pub fn constant(m: usize, value: f64) -> Result<Self> {
        PointVec::new(vec![value; m])
    }

    pub fn standard_basis(m: usize, i: usize) -> Result<Self> {
        if i >= m {
            return Err(Error::InvalidArgument(format!(
                "basis index {i} out of range for dimension {m}"
            )));
        }
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        Ok(PointVec { entries: v })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> PointVec {
        PointVec {
            entries: self.entries.iter().map(|v| c * v).collect(),
        }
    }

    /// self += c · other.
    pub(crate) fn axpy(&mut self, c: f64, other: &PointVec) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += c * b;
        }
    }
}

impl std::ops::Index<usize> for PointVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

impl std::ops::Add for &PointVec {
    type Output = PointVec;
    fn add(self, rhs: &PointVec) -> PointVec {
        assert_eq!(self.len(), rhs.len(), "point dimensions differ");
        PointVec {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &PointVec {
    type Output = PointVec;
    fn sub(self, rhs: &PointVec) -> PointVec {
        assert_eq!(self.len(), rhs.len(), "point dimensions differ");
        PointVec {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Serialize for PointVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<f64>::deserialize(d)?;
        PointVec::new(entries).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Packed symmetric storage
//
// A symmetric d×d matrix X is stored as the d(d+1)/2 entries of its lower
// triangle in row-major order: packed[i(i+1)/2 + j] = X[i][j] for i ≥ j, each
// off-diagonal entry stored once. Inverse map: index p belongs to row
// i = ⌊(√(8p+1) − 1)/2⌋, column j = p − i(i+1)/2.
// ---------------------------------------------------------------------------

/// Packed length for a d×d symmetric matrix.
pub fn packed_dim(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Packed position of matrix entry (i, j) with i ≥ j.
pub fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// Packed identity matrix — the hyperbolicity direction of the determinant
/// family.
pub fn packed_identity(d: usize) -> PointVec {
    let mut v = vec![0.0; packed_dim(d)];
    for i in 0..d {
        v[packed_index(i, i)] = 1.0;
    }
    PointVec { entries: v }
}

/// Packed form of the rank-one matrix u·uᵀ.
pub fn pack_outer(u: &[f64]) -> PointVec {
    let d = u.len();
    let mut v = vec![0.0; packed_dim(d)];
    for i in 0..d {
        for j in 0..=i {
            v[packed_index(i, j)] = u[i] * u[j];
        }
    }
    PointVec { entries: v }
}

/// Expand packed coordinates to a full row-major d×d symmetric matrix.
pub fn unpack_symmetric(packed: &[f64], d: usize) -> Vec<f64> {
    debug_assert_eq!(packed.len(), packed_dim(d));
    let mut full = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let v = packed[packed_index(i, j)];
            full[i * d + j] = v;
            full[j * d + i] = v;
        }
    }
    full
}

/// One monomial of a dense homogeneous form: coef · ∏ xᵢ^{exp[i]}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exp: Vec<u32>,
    pub coef: f64,
}

/// The supported polynomial families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyKind {
    /// det(X) on packed symmetric d×d matrices; degree d, dimension d(d+1)/2.
    DeterminantSymmetric { d: usize },
    /// x₁x₂⋯x_m; degree m.
    Product { m: usize },
    /// x₁² − x₂² − ⋯ − x_m²; degree 2.
    LorentzQuadratic { m: usize },
    /// k-th elementary symmetric polynomial of x₁,…,x_m; degree k.
    ElementarySymmetric { m: usize, k: usize },
    /// Explicit homogeneous term list of total degree d in m variables.
    DenseHomogeneous {
        m: usize,
        d: usize,
        terms: Vec<Term>,
    },
}

/// A hyperbolic polynomial form together with its hyperbolicity direction.
///
/// Immutable after construction; all operations are pure.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicForm {
    kind: FamilyKind,
    direction: PointVec,
    degree: usize,
    dimension: usize,
}

/// Outcome of the randomized hyperbolicity probe: the largest relative
/// imaginary part |Im λ| / (1 + |λ|) seen over all sampled restriction roots.
#[derive(Clone, Debug)]
pub struct HyperbolicityReport {
    pub lines_tested: u32,
    pub max_imaginary_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The (point, direction) pair attaining the worst residual, if any
    /// residual was nonzero.
    pub worst_line: Option<(PointVec, PointVec)>,
}

impl HyperbolicForm {
    // -- constructors -------------------------------------------------------

    pub fn determinant_symmetric(d: usize) -> Result<Self> {
        Self::from_parts(FamilyKind::DeterminantSymmetric { d }, packed_identity(d))
    }

    /// Product form with the all-ones direction.
    pub fn product(m: usize) -> Result<Self> {
        Self::from_parts(FamilyKind::Product { m }, PointVec::constant(m, 1.0)?)
    }

    /// Product form with a custom strictly positive direction.
    pub fn product_with_direction(m: usize, direction: PointVec) -> Result<Self> {
        Self::from_parts(FamilyKind::Product { m }, direction)
    }

    pub fn lorentz(m: usize) -> Result<Self> {
        Self::from_parts(
            FamilyKind::LorentzQuadratic { m },
            PointVec::standard_basis(m, 0)?,
        )
    }

    pub fn elementary_symmetric(m: usize, k: usize) -> Result<Self> {
        Self::from_parts(
            FamilyKind::ElementarySymmetric { m, k },
            PointVec::constant(m, 1.0)?,
        )
    }

    /// Dense homogeneous form; terms are canonicalized (sorted lexicographically
    /// by exponent vector) and must contain no duplicate exponents.
    pub fn dense(m: usize, d: usize, terms: Vec<Term>, direction: PointVec) -> Result<Self> {
        Self::from_parts(FamilyKind::DenseHomogeneous { m, d, terms }, direction)
    }

    /// Validated constructor behind every public one; enforces the family
    /// invariants on dimensions, directions, and term lists.
    pub fn from_parts(kind: FamilyKind, direction: PointVec) -> Result<Self> {
        let (degree, dimension, kind) = match kind {
            FamilyKind::DeterminantSymmetric { d } => {
                if d == 0 {
                    return Err(Error::InvalidArgument(
                        "matrix dimension must be ≥ 1".into(),
                    ));
                }
                if direction != packed_identity(d) {
                    return Err(Error::InvalidArgument(
                        "determinant family direction must be the packed identity".into(),
                    ));
                }
                (d, packed_dim(d), FamilyKind::DeterminantSymmetric { d })
            }
            FamilyKind::Product { m } => {
                if m == 0 {
                    return Err(Error::InvalidArgument("dimension must be ≥ 1".into()));
                }
                if direction.len() != m {
                    return Err(Error::DimensionMismatch {
                        what: "product direction",
                        expected: m,
                        got: direction.len(),
                    });
                }
                if direction.as_slice().iter().any(|&v| v <= 0.0) {
                    return Err(Error::InvalidArgument(
                        "product family direction must be strictly positive".into(),
                    ));
                }
                (m, m, FamilyKind::Product { m })
            }
            FamilyKind::LorentzQuadratic { m } => {
                if m < 2 {
                    return Err(Error::InvalidArgument(
                        "Lorentz quadratic needs dimension ≥ 2".into(),
                    ));
                }
                if direction != PointVec::standard_basis(m, 0)? {
                    return Err(Error::InvalidArgument(
                        "Lorentz direction must be the first standard basis vector".into(),
                    ));
                }
                (2, m, FamilyKind::LorentzQuadratic { m })
            }
            FamilyKind::ElementarySymmetric { m, k } => {
                if m == 0 || k == 0 || k > m {
                    return Err(Error::InvalidArgument(format!(
                        "elementary symmetric needs 1 ≤ k ≤ m, got k={k}, m={m}"
                    )));
                }
                if direction != PointVec::constant(m, 1.0)? {
                    return Err(Error::InvalidArgument(
                        "elementary symmetric direction must be all-ones".into(),
                    ));
                }
                (k, m, FamilyKind::ElementarySymmetric { m, k })
            }
            FamilyKind::DenseHomogeneous { m, d, mut terms } => {
                if m == 0 || d == 0 {
                    return Err(Error::InvalidArgument(
                        "dense form needs m ≥ 1 and degree ≥ 1".into(),
                    ));
                }
                if terms.is_empty() {
                    return Err(Error::InvalidArgument(
                        "dense form needs at least one term".into(),
                    ));
                }
                if direction.len() != m {
                    return Err(Error::DimensionMismatch {
                        what: "dense direction",
                        expected: m,
                        got: direction.len(),
                    });
                }
                for t in &terms {
                    if t.exp.len() != m {
                        return Err(Error::DimensionMismatch {
                            what: "term exponent vector",
                            expected: m,
                            got: t.exp.len(),
                        });
                    }
                    if !t.coef.is_finite() {
                        return Err(Error::InvalidArgument(
                            "term coefficient is not finite".into(),
                        ));
                    }
                    let total: u32 = t.exp.iter().sum();
                    if total as usize != d {
                        return Err(Error::InvalidArgument(format!(
                            "term {:?} has total degree {total}, expected {d}",
                            t.exp
                        )));
                    }
                }
                terms.sort_by(|a, b| a.exp.cmp(&b.exp));
                if terms.windows(2).any(|w| w[0].exp == w[1].exp) {
                    return Err(Error::InvalidArgument(
                        "duplicate exponent vectors in term list".into(),
                    ));
                }
                (d, m, FamilyKind::DenseHomogeneous { m, d, terms })
            }
        };
        let form = HyperbolicForm {
            kind,
            direction,
            degree,
            dimension,
        };
        let he = form.evaluate_slice(form.direction.as_slice());
        if he == 0.0 || !he.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "h(e) = {he} violates the hyperbolicity prerequisite h(e) ≠ 0"
            )));
        }
        Ok(form)
    }

    // -- accessors ----------------------------------------------------------

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn direction(&self) -> &PointVec {
        &self.direction
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Short family label for reports.
    pub fn family_name(&self) -> &'static str {
        match self.kind {
            FamilyKind::DeterminantSymmetric { .. } => "determinant_symmetric",
            FamilyKind::Product { .. } => "product",
            FamilyKind::LorentzQuadratic { .. } => "lorentz_quadratic",
            FamilyKind::ElementarySymmetric { .. } => "elementary_symmetric",
            FamilyKind::DenseHomogeneous { .. } => "dense_homogeneous",
        }
    }

    pub(crate) fn check_dim(&self, v: &PointVec, what: &'static str) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.dimension,
                got: v.len(),
            });
        }
        Ok(())
    }

    // -- evaluation ---------------------------------------------------------

    /// h(x).
    pub fn evaluate(&self, x: &PointVec) -> Result<f64> {
        self.check_dim(x, "evaluation point")?;
        Ok(self.evaluate_slice(x.as_slice()))
    }

    /// Evaluation on a raw slice of the correct length (callers guarantee the
    /// dimension); the hot path for grids and enumerations.
    pub(crate) fn evaluate_slice(&self, x: &[f64]) -> f64 {
        match &self.kind {
            FamilyKind::DeterminantSymmetric { d } => {
                let mut full = unpack_symmetric(x, *d);
                determinant_in_place(&mut full, *d)
            }
            FamilyKind::Product { .. } => x.iter().product(),
            FamilyKind::LorentzQuadratic { .. } => {
                x[0] * x[0] - x[1..].iter().map(|v| v * v).sum::<f64>()
            }
            FamilyKind::ElementarySymmetric { k, .. } => elementary_symmetric_value(x, *k),
            FamilyKind::DenseHomogeneous { terms, .. } => terms
                .iter()
                .map(|t| {
                    t.coef
                        * t.exp
                            .iter()
                            .zip(x)
                            .map(|(&e, &v)| if e == 0 { 1.0 } else { v.powi(e as i32) })
                            .product::<f64>()
                })
                .sum(),
        }
    }

    /// h(e), the leading coefficient of every restriction.
    pub(crate) fn direction_value(&self) -> f64 {
        self.evaluate_slice(self.direction.as_slice())
    }

    // -- directional derivatives --------------------------------------------

    /// Composed directional derivative D_{v₁}⋯D_{v_k} h(x).
    ///
    /// Computed without symbolic algebra: h is evaluated on an integer tensor
    /// grid of the multi-affine restriction (t₁,…) ↦ h(x + Σ tₐ·uₐ) over the
    /// distinct directions uₐ (equal directions grouped into multiplicities),
    /// the grid is reduced one axis at a time by exact Newton interpolation,
    /// and the mixed coefficient is scaled by the multiplicity factorials.
    /// Axis a only needs nodes {0,…,d − Σ_{b<a} mult_b} because extracting a
    /// coefficient lowers the total degree that remains.
    ///
    /// A composition longer than the degree returns 0.
    pub fn directional_derivative(&self, x: &PointVec, directions: &[PointVec]) -> Result<f64> {
        self.check_dim(x, "derivative base point")?;
        if directions.is_empty() {
            return Err(Error::InvalidArgument(
                "directional derivative needs at least one direction".into(),
            ));
        }
        for v in directions {
            self.check_dim(v, "derivative direction")?;
        }
        let d = self.degree;
        if directions.len() > d {
            return Ok(0.0);
        }

        // Group identical directions, largest multiplicity first.
        let mut groups: Vec<(&PointVec, usize)> = Vec::new();
        for v in directions {
            match groups
                .iter_mut()
                .find(|(u, _)| u.as_slice() == v.as_slice())
            {
                Some(g) => g.1 += 1,
                None => groups.push((v, 1)),
            }
        }
        groups.sort_by_key(|g| std::cmp::Reverse(g.1));

        // Node count per axis under the shrinking total degree.
        let mut sizes = Vec::with_capacity(groups.len());
        let mut remaining = d;
        for (_, mult) in &groups {
            sizes.push(remaining + 1);
            remaining -= mult;
        }

        // Evaluate h on the grid; axis 0 varies fastest.
        let total: usize = sizes.iter().product();
        let mut values = vec![0.0; total];
        let mut point = vec![0.0; self.dimension];
        for (flat, slot) in values.iter_mut().enumerate() {
            point.copy_from_slice(x.as_slice());
            let mut rest = flat;
            for (a, &na) in sizes.iter().enumerate() {
                let t = (rest % na) as f64;
                rest /= na;
                if t != 0.0 {
                    for (p, u) in point.iter_mut().zip(groups[a].0.as_slice()) {
                        *p += t * u;
                    }
                }
            }
            *slot = self.evaluate_slice(&point);
        }

        // Reduce axis by axis: interpolate each contiguous fiber and keep the
        // coefficient matching that axis's multiplicity.
        let mut current = values;
        for (a, &na) in sizes.iter().enumerate() {
            let nodes: Vec<f64> = (0..na).map(|t| t as f64).collect();
            let mult = groups[a].1;
            let mut next = Vec::with_capacity(current.len() / na);
            for fiber in current.chunks_exact(na) {
                let coeffs = poly::interpolate(&nodes, fiber);
                next.push(coeffs[mult]);
            }
            current = next;
        }
        debug_assert_eq!(current.len(), 1);

        let factorial_product: f64 = groups
            .iter()
            .map(|(_, mult)| (1..=*mult).map(|v| v as f64).product::<f64>())
            .product();
        Ok(current[0] * factorial_product)
    }

    // -- hyperbolicity probe --------------------------------------------------

    /// Sample random lines and measure how far the restriction roots stray
    /// from the real axis: pass iff max |Im λ| / (1 + |λ|) ≤ tol over all
    /// trials (standard Gaussian points, seeded).
    pub fn check_hyperbolicity(
        &self,
        trials: u32,
        seed: u64,
        tol: f64,
    ) -> Result<HyperbolicityReport> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be > 0".into()));
        }
        if self.direction_value() == 0.0 {
            return Err(Error::InvalidArgument(
                "h(e) = 0: hyperbolicity prerequisite fails".into(),
            ));
        }
        let mut worst = 0.0f64;
        let mut worst_point: Option<PointVec> = None;
        for i in 0..trials {
            let mut rng = trial_rng(seed, StreamDomain::HyperbolicityProbe, u64::from(i));
            let x = PointVec::from_vec_unchecked(gaussian_entries(&mut rng, self.dimension));
            let raw = restriction::raw_restriction(self, &x)?;
            let ratio = raw
                .roots
                .iter()
                .map(|z| z.im.abs() / (1.0 + z.norm()))
                .fold(0.0f64, f64::max);
            if ratio > worst || worst_point.is_none() {
                worst = ratio;
                worst_point = Some(x);
            }
        }
        Ok(HyperbolicityReport {
            lines_tested: trials,
            max_imaginary_residual: worst,
            tolerance: tol,
            passed: worst <= tol,
            worst_line: worst_point.map(|x| (x, self.direction.clone())),
        })
    }

    // -- dense JSON interface -------------------------------------------------

    /// Parse a dense form from its JSON description
    /// `{"m": int, "d": int, "e": [reals], "terms": [{"exp": [ints], "coef": real}]}`.
    pub fn dense_from_json(text: &str) -> Result<Self> {
        let dto: DenseJson = serde_json::from_str(text)?;
        let e = PointVec::new(dto.e)?;
        HyperbolicForm::dense(dto.m, dto.d, dto.terms, e)
    }

    /// Serialize a dense form to the JSON schema above; other families are
    /// rejected (they are reconstructed from their parameters instead).
    pub fn dense_to_json(&self) -> Result<String> {
        match &self.kind {
            FamilyKind::DenseHomogeneous { m, d, terms } => {
                let dto = DenseJson {
                    m: *m,
                    d: *d,
                    e: self.direction.as_slice().to_vec(),
                    terms: terms.clone(),
                };
                Ok(serde_json::to_string(&dto)?)
            }
            _ => Err(Error::InvalidArgument(
                "only dense forms use the term-list JSON schema".into(),
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DenseJson {
    m: usize,
    d: usize,
    e: Vec<f64>,
    terms: Vec<Term>,
}

/// Determinant by in-place LU with partial pivoting on a row-major buffer.
fn determinant_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut pivot_row = k;
        let mut best = a[k * n + k].abs();
        for r in k + 1..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                pivot_row = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot_row != k {
            for c in 0..n {
                a.swap(k * n + c, pivot_row * n + c);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for r in k + 1..n {
            let f = a[r * n + k] / pivot;
            if f != 0.0 {
                for c in k..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
    }
    det
}

/// e_k(x₁,…,x_m) by the coefficient recurrence of ∏(1 + xᵢ z).
fn elementary_symmetric_value(x: &[f64], k: usize) -> f64 {
    let mut b = vec![0.0; k + 1];
    b[0] = 1.0;
    for &xi in x {
        for j in (1..=k).rev() {
            b[j] += b[j - 1] * xi;
        }
    }
    b[k]
}
