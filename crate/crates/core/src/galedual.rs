//! Point configurations, the (conjugated) Gale transform and its inverse,
//! the lift-and-augment step, and the correspondence between affine
//! dependences of the primal points and linear functionals on the dual.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{hermitian_dot, rank_of, ExactMatrix, Field, FieldKind, Scalar};

/// A labeled sequence of points over one exact field, optionally colored.
///
/// Colors are 0-based class indices; an m-coloring uses every class in `0..m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct PointConfig {
    pub field: FieldKind,
    pub dim: usize,
    pub points: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<usize>>,
    #[serde(skip)]
    spanning: OnceLock<bool>,
}

#[derive(Deserialize)]
struct RawConfig {
    field: FieldKind,
    dim: usize,
    points: Vec<Vec<Scalar>>,
    #[serde(default)]
    coloring: Option<Vec<usize>>,
}

impl TryFrom<RawConfig> for PointConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        let cfg = PointConfig::new(raw.field, raw.dim, raw.points)?;
        match raw.coloring {
            Some(c) => cfg.with_coloring(c),
            None => Ok(cfg),
        }
    }
}

impl PartialEq for PointConfig {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.dim == other.dim
            && self.points == other.points
            && self.coloring == other.coloring
    }
}

impl PointConfig {
    /// Validates dimensions and brings every coordinate into `field`.
    pub fn new(field: FieldKind, dim: usize, points: Vec<Vec<Scalar>>) -> Result<Self> {
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            out.push(p.iter().map(|s| field.coerce(s)).collect::<Result<Vec<_>>>()?);
        }
        Ok(PointConfig {
            field,
            dim,
            points: out,
            coloring: None,
            spanning: OnceLock::new(),
        })
    }

    /// Rational configuration from integer coordinates.
    pub fn from_ints(points: &[&[i64]]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        let pts = points
            .iter()
            .map(|p| p.iter().map(|&v| Scalar::from_int(v)).collect())
            .collect();
        Self::new(FieldKind::Rational, dim, pts)
    }

    pub fn with_coloring(mut self, coloring: Vec<usize>) -> Result<Self> {
        validate_coloring(&coloring, self.len())?;
        self.coloring = Some(coloring);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of color classes (0 when uncolored).
    pub fn num_classes(&self) -> usize {
        self.coloring
            .as_ref()
            .map_or(0, |c| c.iter().max().map_or(0, |m| m + 1))
    }

    /// Sizes of the color classes.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes()];
        if let Some(c) = &self.coloring {
            for &k in c {
                sizes[k] += 1;
            }
        }
        sizes
    }

    /// Rank of the lifted points (a_i, 1).
    pub fn affine_rank(&self) -> usize {
        let lifted: Vec<Vec<Scalar>> = self.points.iter().map(|p| lift(p)).collect();
        rank_of(&lifted, self.dim + 1)
    }

    /// Whether the points affinely span the ambient space; cached.
    pub fn is_affinely_spanning(&self) -> bool {
        *self.spanning.get_or_init(|| self.affine_rank() == self.dim + 1)
    }

    pub fn require_affinely_spanning(&self) -> Result<()> {
        if self.is_affinely_spanning() {
            Ok(())
        } else {
            Err(Error::NotAffinelySpanning {
                rank: self.affine_rank(),
                expected: self.dim + 1,
            })
        }
    }

    /// Sub-configuration keeping the given indices in order (coloring dropped).
    pub fn select(&self, indices: &[usize]) -> PointConfig {
        PointConfig {
            field: self.field,
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            coloring: None,
            spanning: OnceLock::new(),
        }
    }
}

pub(crate) fn validate_coloring(coloring: &[usize], n: usize) -> Result<()> {
    if coloring.len() != n {
        return Err(Error::pre(format!(
            "coloring has {} entries for {} points",
            coloring.len(),
            n
        )));
    }
    let m = coloring.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; m];
    for &k in coloring {
        seen[k] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::pre(format!("color class {k} is empty")));
    }
    Ok(())
}

/// (p, 1).
pub fn lift(p: &[Scalar]) -> Vec<Scalar> {
    let mut v = p.to_vec();
    v.push(Scalar::one());
    v
}

/// A primal configuration together with its Gale dual.
///
/// `basis` holds the kernel basis b_1..b_{n−d−1} of A (rows); the dual
/// points are the columns of its conjugate.
#[derive(Clone, Debug)]
pub struct GaleDualPair {
    pub primal: PointConfig,
    pub dual: PointConfig,
    pub basis: ExactMatrix<Scalar>,
}

#[derive(Serialize)]
struct PairJson<'a> {
    primal: &'a PointConfig,
    dual: &'a PointConfig,
    basis: Vec<Vec<Scalar>>,
}

impl Serialize for GaleDualPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairJson {
            primal: &self.primal,
            dual: &self.dual,
            basis: self.basis.row_vecs(),
        }
        .serialize(s)
    }
}

impl GaleDualPair {
    pub fn n(&self) -> usize {
        self.primal.len()
    }

    /// The primal dimension d.
    pub fn primal_dim(&self) -> usize {
        self.primal.dim
    }

    /// The dual dimension n − d − 1.
    pub fn dual_dim(&self) -> usize {
        self.dual.dim
    }

    /// Checks the defining relations: A·b = 0 for every basis row, the dual
    /// spans and sums to zero.
    pub fn validate(&self) -> Result<()> {
        let a = lifted_matrix(&self.primal);
        for b in self.basis.row_vecs() {
            if a.mul_vec(&b).iter().any(|x| !x.is_zero()) {
                return Err(Error::verify("basis row is not in ker A"));
            }
        }
        check_dual_side(&self.dual.points, self.dual.dim).map_err(|e| Error::verify(e.to_string()))
    }
}

/// The (d+1)×n matrix with columns (a_j, 1).
fn lifted_matrix(cfg: &PointConfig) -> ExactMatrix<Scalar> {
    let cols: Vec<Vec<Scalar>> = cfg.points.iter().map(|p| lift(p)).collect();
    ExactMatrix::from_columns(&cols, cfg.dim + 1)
}

fn check_dual_side(points: &[Vec<Scalar>], dim: usize) -> Result<()> {
    let rank = rank_of(points, dim);
    if rank != dim {
        return Err(Error::NotSpanning { rank, expected: dim });
    }
    for k in 0..dim {
        let mut s = Scalar::zero();
        for p in points {
            s = s.add(&p[k]);
        }
        if !s.is_zero() {
            return Err(Error::NonzeroSum);
        }
    }
    Ok(())
}

/// Gale transform of an affinely spanning configuration.
pub fn gale_transform(primal: &PointConfig) -> Result<GaleDualPair> {
    primal.require_affinely_spanning()?;
    let a = lifted_matrix(primal);
    let kernel = a.kernel_basis();
    let n = primal.len();
    let m = n - primal.dim - 1;
    debug_assert_eq!(kernel.len(), m);
    let basis = if m == 0 {
        ExactMatrix::zeros(0, n)
    } else {
        ExactMatrix::from_rows(&kernel, n)
    };
    let dual_pts: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..m).map(|k| basis.get(k, i).conj()).collect())
        .collect();
    let dual = PointConfig::new(primal.field, m, dual_pts)?;
    Ok(GaleDualPair {
        primal: primal.clone(),
        dual,
        basis,
    })
}

/// Inverse Gale transform: recovers affinely spanning primal points whose
/// Gale dual is exactly the given sequence.
pub fn inverse_gale(dual: &PointConfig) -> Result<GaleDualPair> {
    let n = dual.len();
    let m = dual.dim;
    check_dual_side(&dual.points, m)?;
    if n < m + 1 {
        return Err(Error::pre("need at least dim + 1 dual points"));
    }
    let g = if m == 0 {
        ExactMatrix::zeros(0, n)
    } else {
        ExactMatrix::from_columns(&dual.points, m)
    };
    let mut w = g.kernel_basis();
    let ones = vec![Scalar::one(); n];
    // Exchange one basis vector for the all-ones vector and move it last.
    let coords = ExactMatrix::from_rows(&w, n)
        .transpose()
        .solve(&ones)
        .ok_or_else(|| Error::verify("all-ones vector not in the kernel"))?;
    let k = coords
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or_else(|| Error::verify("all-ones vector has zero coordinates"))?;
    w.remove(k);
    w.push(ones);
    let d = w.len() - 1;
    let points: Vec<Vec<Scalar>> = (0..n)
        .map(|j| (0..d).map(|row| w[row][j].conj()).collect())
        .collect();
    let primal = PointConfig::new(dual.field, d, points)?;
    let basis = g.conj();
    let mut dual_out = PointConfig::new(dual.field, m, dual.points.clone())?;
    dual_out.coloring = dual.coloring.clone();
    let pair = GaleDualPair {
        primal,
        dual: dual_out,
        basis,
    };
    pair.primal.require_affinely_spanning().map_err(|e| Error::verify(e.to_string()))?;
    Ok(pair)
}

/// Lifts X to height one and appends g_{n+1} = −Σ (x_i, 1).
pub fn lift_augment(x: &PointConfig) -> Result<PointConfig> {
    x.require_affinely_spanning()?;
    let mut pts: Vec<Vec<Scalar>> = x.points.iter().map(|p| lift(p)).collect();
    let mut last = vec![Scalar::zero(); x.dim + 1];
    for p in &pts {
        for (acc, v) in last.iter_mut().zip(p) {
            *acc = acc.sub(v);
        }
    }
    pts.push(last);
    PointConfig::new(x.field, x.dim + 1, pts)
}

/// Checks λ ≠ 0, Σλ_i = 0 and Σλ_i a_i = 0.
pub fn is_affine_dependence(primal: &PointConfig, lambda: &[Scalar]) -> bool {
    if lambda.len() != primal.len() || lambda.iter().all(|l| l.is_zero()) {
        return false;
    }
    let a = lifted_matrix(primal);
    a.mul_vec(lambda).iter().all(|x| x.is_zero())
}

/// The unique α with ⟨α, g_i⟩ = λ_i for all i.
pub fn dependence_to_functional(pair: &GaleDualPair, lambda: &[Scalar]) -> Result<Vec<Scalar>> {
    if lambda.len() != pair.n() {
        return Err(Error::DimensionMismatch {
            expected: pair.n(),
            found: lambda.len(),
        });
    }
    if !is_affine_dependence(&pair.primal, lambda) {
        return Err(Error::NotADependence);
    }
    // ⟨α, g_i⟩ = Σ_k α_k B[k][i], so α solves Bᵀ α = λ.
    let alpha = pair
        .basis
        .transpose()
        .solve(lambda)
        .ok_or_else(|| Error::verify("dependence outside the span of the kernel basis"))?;
    Ok(alpha)
}

/// λ_i = ⟨α, g_i⟩; the result is a non-zero affine dependence of the primal.
pub fn functional_to_dependence(pair: &GaleDualPair, alpha: &[Scalar]) -> Result<Vec<Scalar>> {
    if alpha.len() != pair.dual_dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dual_dim(),
            found: alpha.len(),
        });
    }
    if alpha.iter().all(|a| a.is_zero()) {
        return Err(Error::ZeroFunctional);
    }
    let lambda = pair
        .dual
        .points
        .iter()
        .map(|g| hermitian_dot(alpha, g))
        .collect::<Result<Vec<_>>>()?;
    if !is_affine_dependence(&pair.primal, &lambda) {
        return Err(Error::verify("functional did not produce an affine dependence"));
    }
    Ok(lambda)
}

/// Finds an invertible T with T·from_i = to_i for every i, if one exists.
pub fn linear_change(from: &[Vec<Scalar>], to: &[Vec<Scalar>], dim: usize) -> Option<ExactMatrix<Scalar>> {
    if from.len() != to.len() {
        return None;
    }
    if dim == 0 {
        return Some(ExactMatrix::zeros(0, 0));
    }
    let sys = ExactMatrix::from_rows(from, dim);
    let mut rows = Vec::with_capacity(dim);
    for k in 0..dim {
        let rhs: Vec<Scalar> = to.iter().map(|p| p[k].clone()).collect();
        rows.push(sys.solve(&rhs)?);
    }
    let t = ExactMatrix::from_rows(&rows, dim);
    // Verify and require invertibility.
    for (f, g) in from.iter().zip(to) {
        if &t.mul_vec(f) != g {
            return None;
        }
    }
    (t.rank() == dim).then_some(t)
}

/// Whether two configurations agree up to an affine isomorphism.
pub fn affinely_equivalent(a: &PointConfig, b: &PointConfig) -> bool {
    if a.dim != b.dim || a.len() != b.len() {
        return false;
    }
    let la: Vec<Vec<Scalar>> = a.points.iter().map(|p| lift(p)).collect();
    let lb: Vec<Vec<Scalar>> = b.points.iter().map(|p| lift(p)).collect();
    linear_change(&la, &lb, a.dim + 1).is_some()
}
