//! Real codimension-(r−2) fans and complex regular fans: construction from
//! proper tuples on the Gale dual, recovery of tuples from fans, the
//! slice-and-project step, point classification and distribution reports.
//!
//! Parts and half-flats are 0-based. Interior(j) of a real fan means
//! ⟨β_i, x⟩ = c_i for every i ∉ {j, j−1 (mod r)} and ⟨β_j, x⟩ > c_j.
//! Half-flat j of a complex fan is {z : ⟨α, z⟩ − β ∈ ω_r^{j+1}·R≥0}.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{serde_rational_mat, serde_rational_vec};
use crate::exactnum::{hermitian_dot, rank_of, Cyclotomic, ExactMatrix, Field, FieldKind, Positivity, Rational, Scalar};
use crate::feaslp::{realify, verify_witness, WeightWitness};
use crate::galedual::{dependence_to_functional, GaleDualPair, PointConfig};
use crate::kneser::{mask_of, SetFamily};
use crate::tverberg::TverbergTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Center,
    Interior(usize),
    Outside,
}

/// Real fan given by normals β_j and offsets c_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealFan {
    pub r: usize,
    pub dim: usize,
    #[serde(with = "serde_rational_mat")]
    pub normals: Vec<Vec<Rational>>,
    #[serde(with = "serde_rational_vec")]
    pub offsets: Vec<Rational>,
    pub normalized: bool,
}

/// Complex regular fan {z : ⟨α, z⟩ = β + t ω_r^{j+1}, t ≥ 0}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFan {
    pub r: usize,
    pub dim: usize,
    #[serde(rename = "N")]
    pub conductor: u32,
    pub alpha: Vec<Scalar>,
    pub beta: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fan {
    Real(RealFan),
    Complex(ComplexFan),
}

fn rzero() -> Rational {
    <Rational as Zero>::zero()
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).fold(rzero(), |acc, (a, b)| acc + a * b)
}

fn rational_point(x: &[Scalar]) -> Result<Vec<Rational>> {
    x.iter()
        .map(|s| {
            s.as_rational()
                .cloned()
                .ok_or_else(|| Error::FieldMismatch("non-rational coordinate for a real fan".into()))
        })
        .collect()
}

impl RealFan {
    /// Validates the fan and rescales it so that Σβ_j = 0 and Σc_j = 0.
    pub fn new(r: usize, dim: usize, normals: Vec<Vec<Rational>>, offsets: Vec<Rational>) -> Result<Self> {
        if r < 2 || normals.len() != r || offsets.len() != r {
            return Err(Error::pre("a fan needs r ≥ 2 normals and offsets"));
        }
        if let Some(b) = normals.iter().find(|b| b.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.len(),
            });
        }
        let mut fan = RealFan {
            r,
            dim,
            normals,
            offsets,
            normalized: false,
        };
        fan.check_structure()?;
        fan.normalize()?;
        Ok(fan)
    }

    /// Any r−1 normals independent, all r of rank r−1, center nonempty.
    pub fn check_structure(&self) -> Result<()> {
        let r = self.r;
        for skip in 0..r {
            let rest: Vec<Vec<Rational>> = (0..r).filter(|&j| j != skip).map(|j| self.normals[j].clone()).collect();
            if rank_of(&rest, self.dim) != r - 1 {
                return Err(Error::pre("some r−1 fan normals are linearly dependent"));
            }
        }
        if rank_of(&self.normals, self.dim) != r - 1 {
            return Err(Error::pre("fan normals must span a space of dimension r−1"));
        }
        if self.center_point().is_none() {
            return Err(Error::pre("fan center is empty"));
        }
        Ok(())
    }

    /// Some point of the center, if it is nonempty.
    pub fn center_point(&self) -> Option<Vec<Rational>> {
        ExactMatrix::from_rows(&self.normals, self.dim).solve(&self.offsets)
    }

    fn normalize(&mut self) -> Result<()> {
        let rows: Vec<Vec<Rational>> = (0..self.r)
            .map(|j| {
                let mut v = self.normals[j].clone();
                v.push(self.offsets[j].clone());
                v
            })
            .collect();
        let mu = ExactMatrix::from_rows(&rows, self.dim + 1).transpose().kernel_basis();
        if mu.len() != 1 {
            return Err(Error::pre("fan normals and offsets admit no unique dependency"));
        }
        let mu = &mu[0];
        if mu.iter().any(Zero::is_zero) || !(mu.iter().all(|m| m.is_positive()) || mu.iter().all(|m| m.is_negative())) {
            return Err(Error::pre("fan half-flats are inconsistently oriented"));
        }
        let scale = mu[0].recip();
        for j in 0..self.r {
            let f = &mu[j] * &scale;
            for v in self.normals[j].iter_mut() {
                *v *= &f;
            }
            self.offsets[j] *= &f;
        }
        self.normalized = true;
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.offsets.iter().all(Zero::is_zero)
    }

    pub fn classify_rational(&self, x: &[Rational]) -> Result<Classification> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let v: Vec<Rational> = (0..self.r).map(|j| dot(&self.normals[j], x) - &self.offsets[j]).collect();
        if v.iter().all(Zero::is_zero) {
            return Ok(Classification::Center);
        }
        let r = self.r;
        for j in 0..r {
            let prev = (j + r - 1) % r;
            if v[j].is_positive() && (0..r).all(|i| i == j || i == prev || Zero::is_zero(&v[i])) {
                return Ok(Classification::Interior(j));
            }
        }
        Ok(Classification::Outside)
    }
}

fn omega(conductor: u32, r: usize, power: i64) -> Scalar {
    let step = (conductor as usize / r) as i64;
    Scalar::Cyc(Cyclotomic::root_of_unity(conductor, step * power))
}

impl ComplexFan {
    pub fn new(r: usize, conductor: u32, alpha: Vec<Scalar>, beta: Scalar) -> Result<Self> {
        if r < 2 || !(conductor as usize).is_multiple_of(r) {
            return Err(Error::pre(format!("r = {r} must divide the conductor {conductor}")));
        }
        if alpha.iter().all(|a| a.is_zero()) {
            return Err(Error::pre("complex fan normal is zero"));
        }
        let field = FieldKind::Cyclotomic(conductor);
        let alpha = alpha.iter().map(|a| field.coerce(a)).collect::<Result<Vec<_>>>()?;
        let beta = field.coerce(&beta)?;
        Ok(ComplexFan {
            r,
            dim: alpha.len(),
            conductor,
            alpha,
            beta,
        })
    }

    /// Classification plus a note when a quotient is real but irrational.
    pub fn classify_detail(&self, x: &[Scalar]) -> Result<(Classification, Option<String>)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let w = hermitian_dot(&self.alpha, x)?.sub(&self.beta);
        if w.is_zero() {
            return Ok((Classification::Center, None));
        }
        let mut note = None;
        for j in 0..self.r {
            let q = w.mul(&omega(self.conductor, self.r, -(j as i64 + 1)));
            match q.positivity() {
                Positivity::Positive => return Ok((Classification::Interior(j), None)),
                Positivity::NotRationalReal if q == q.conj() => {
                    note = Some(format!("quotient for half-flat {j} is real but not rational; treated as outside"));
                }
                _ => {}
            }
        }
        Ok((Classification::Outside, note))
    }
}

impl Fan {
    pub fn r(&self) -> usize {
        match self {
            Fan::Real(f) => f.r,
            Fan::Complex(f) => f.r,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Fan::Real(f) => f.dim,
            Fan::Complex(f) => f.dim,
        }
    }

    pub fn classify(&self, x: &[Scalar]) -> Result<Classification> {
        Ok(self.classify_detail(x)?.0)
    }

    pub fn classify_detail(&self, x: &[Scalar]) -> Result<(Classification, Option<String>)> {
        match self {
            Fan::Real(f) => Ok((f.classify_rational(&rational_point(x)?)?, None)),
            Fan::Complex(f) => f.classify_detail(x),
        }
    }
}

/// Classification of one point.
pub fn classify_point(fan: &Fan, x: &[Scalar]) -> Result<Classification> {
    fan.classify(x)
}

fn check_tuple_against(pair: &GaleDualPair, tuple: &TverbergTuple) -> Result<Vec<Vec<Rational>>> {
    let pts = realify(&pair.primal.points, pair.primal.field);
    tuple.validate(&pts).map_err(|e| Error::pre(format!("tuple witness invalid: {e}")))?;
    Ok(pts)
}

/// The classification a fan built from `tuple` must produce on the dual.
fn expected_classes(tuple: &TverbergTuple, n: usize) -> Vec<Classification> {
    let mut out = vec![Classification::Center; n];
    for (j, part) in tuple.parts.iter().enumerate() {
        for &i in part {
            out[i] = Classification::Interior(j);
        }
    }
    out
}

/// Linear real fan distributing the dual points according to the tuple.
pub fn fan_from_tuple_real(pair: &GaleDualPair, tuple: &TverbergTuple) -> Result<RealFan> {
    if pair.primal.field != FieldKind::Rational {
        return Err(Error::pre("real fans need a rational configuration"));
    }
    check_tuple_against(pair, tuple)?;
    let n = pair.n();
    let r = tuple.r;
    let m = pair.dual_dim();
    let mut normals = Vec::with_capacity(r);
    for j in 0..r {
        let next = (j + 1) % r;
        let mut lambda = vec![Scalar::zero(); n];
        for &i in &tuple.parts[j] {
            lambda[i] = Scalar::Rat(tuple.witness.weight(i));
        }
        for &i in &tuple.parts[next] {
            lambda[i] = Scalar::Rat(-tuple.witness.weight(i));
        }
        let alpha = dependence_to_functional(pair, &lambda)?;
        normals.push(rational_point(&alpha)?);
    }
    let mut sum = vec![rzero(); m];
    for a in &normals {
        for (s, v) in sum.iter_mut().zip(a) {
            *s += v;
        }
    }
    if sum.iter().any(|v| !Zero::is_zero(v)) {
        return Err(Error::verify("fan normals do not sum to zero"));
    }
    let fan = RealFan::new(r, m, normals, vec![rzero(); r]).map_err(|e| Error::verify(e.to_string()))?;
    let expected = expected_classes(tuple, n);
    for (i, g) in pair.dual.points.iter().enumerate() {
        if fan.classify_rational(&rational_point(g)?)? != expected[i] {
            return Err(Error::verify(format!("dual point {i} misclassified by the constructed fan")));
        }
    }
    Ok(fan)
}

/// Linear complex regular fan with ⟨α, g_i⟩ = t_i ω_r^{j+1} on part j.
pub fn fan_from_tuple_complex(pair: &GaleDualPair, tuple: &TverbergTuple) -> Result<ComplexFan> {
    let FieldKind::Cyclotomic(nc) = pair.primal.field else {
        return Err(Error::pre("complex fans need a cyclotomic configuration"));
    };
    let r = tuple.r;
    if !(nc as usize).is_multiple_of(r) {
        return Err(Error::pre(format!("r = {r} must divide the conductor {nc}")));
    }
    check_tuple_against(pair, tuple)?;
    let n = pair.n();
    let mut lambda = vec![Scalar::zero(); n];
    for (j, part) in tuple.parts.iter().enumerate() {
        let w = omega(nc, r, j as i64 + 1);
        for &i in part {
            lambda[i] = w.mul(&Scalar::Rat(tuple.witness.weight(i)));
        }
    }
    let alpha = dependence_to_functional(pair, &lambda)?;
    let fan = ComplexFan::new(r, nc, alpha, Scalar::zero()).map_err(|e| Error::verify(e.to_string()))?;
    for (i, g) in pair.dual.points.iter().enumerate() {
        if hermitian_dot(&fan.alpha, g)? != lambda[i] {
            return Err(Error::verify(format!("functional misses the dependence at {i}")));
        }
    }
    let expected = expected_classes(tuple, n);
    for (i, g) in pair.dual.points.iter().enumerate() {
        if fan.classify_detail(g)?.0 != expected[i] {
            return Err(Error::verify(format!("dual point {i} misclassified by the constructed fan")));
        }
    }
    Ok(fan)
}

/// Recovers the proper tuple from a linear real fan distributing the dual.
pub fn tuple_from_fan(fan: &RealFan, pair: &GaleDualPair) -> Result<TverbergTuple> {
    if !fan.is_linear() {
        return Err(Error::pre("tuple recovery needs a linear fan"));
    }
    if fan.dim != pair.dual_dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dual_dim(),
            found: fan.dim,
        });
    }
    let r = fan.r;
    let mut parts = vec![Vec::new(); r];
    let mut u = BTreeMap::new();
    for (i, g) in pair.dual.points.iter().enumerate() {
        let g = rational_point(g)?;
        match fan.classify_rational(&g)? {
            Classification::Center => {}
            Classification::Interior(j) => {
                parts[j].push(i);
                u.insert(i, dot(&fan.normals[j], &g));
            }
            Classification::Outside => return Err(Error::pre(format!("dual point {i} lies outside the fan"))),
        }
    }
    if let Some(j) = parts.iter().position(|p| p.is_empty()) {
        return Err(Error::pre(format!("half-flat {j} has empty interior part")));
    }
    let sums: Vec<Rational> = parts
        .iter()
        .map(|p| p.iter().fold(rzero(), |a, i| a + &u[i]))
        .collect();
    if sums.iter().any(|s| s != &sums[0]) {
        return Err(Error::verify("part sums differ; fan is not normalized"));
    }
    let weights: BTreeMap<usize, Rational> = u.into_iter().map(|(i, v)| (i, v / &sums[0])).collect();
    let pts = realify(&pair.primal.points, pair.primal.field);
    let dim = pts.first().map_or(0, |p| p.len());
    let mut point = vec![rzero(); dim];
    for &i in &parts[0] {
        for (acc, v) in point.iter_mut().zip(&pts[i]) {
            *acc += &weights[&i] * v;
        }
    }
    let slack = weights.values().min().cloned().unwrap_or_else(rzero);
    let witness = WeightWitness { weights, point, slack };
    if !verify_witness(&pts, &parts, &witness) {
        return Err(Error::verify("recovered weights fail exact substitution"));
    }
    Ok(TverbergTuple { r, parts, witness })
}

/// Slices a linear fan at height one and projects: α = (β, γ) becomes the
/// affine condition ⟨β, x⟩ = −γ. `apex` (the augmented point) must lie on
/// the center.
pub fn slice_project(fan: &Fan, apex: &[Scalar]) -> Result<Fan> {
    if fan.classify(apex)? != Classification::Center {
        return Err(Error::pre("augmented point is not on the fan's center"));
    }
    match fan {
        Fan::Real(f) => {
            if !f.is_linear() {
                return Err(Error::pre("slice_project needs a linear fan"));
            }
            let d = f.dim - 1;
            let normals: Vec<Vec<Rational>> = f.normals.iter().map(|a| a[..d].to_vec()).collect();
            if normals.iter().any(|b| b.iter().all(Zero::is_zero)) {
                return Err(Error::pre("projected normal is zero"));
            }
            let offsets: Vec<Rational> = f.normals.iter().map(|a| -a[d].clone()).collect();
            Ok(Fan::Real(RealFan::new(f.r, d, normals, offsets)?))
        }
        Fan::Complex(f) => {
            if !f.beta.is_zero() {
                return Err(Error::pre("slice_project needs a linear fan"));
            }
            let d = f.dim - 1;
            let beta = f.alpha[..d].to_vec();
            if beta.iter().all(|b| b.is_zero()) {
                return Err(Error::pre("projected normal is zero"));
            }
            Ok(Fan::Complex(ComplexFan::new(f.r, f.conductor, beta, f.alpha[d].neg())?))
        }
    }
}

/// What a verification report checks beyond plain distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifyMode {
    Distribute,
    Equidistribute { coloring: Vec<usize> },
    Pierce { family: SetFamily },
    Rainbow { coloring: Vec<usize> },
    TwoFan { other: Fan, coloring: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: String,
    pub classifications: Vec<Classification>,
    pub center_count: usize,
    pub interior_counts: Vec<usize>,
    /// interior_by_class[j][k] = |Int(B_j) ∩ X_k|.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub interior_by_class: Vec<Vec<usize>>,
    /// cells[i][j][k] = |Int(B¹_i) ∩ Int(B²_j) ∩ X_k| (two-fan mode).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub cells: Vec<Vec<Vec<usize>>>,
    /// Σ_j |Int(B_j) ∩ X|.
    pub robustness: usize,
    pub distributes: bool,
    /// Named checks; `passed` is their conjunction.
    pub checks: BTreeMap<String, bool>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub diagnostics: Vec<String>,
}

fn classify_all(fan: &Fan, x: &PointConfig, diagnostics: &mut Vec<String>) -> Result<Vec<Classification>> {
    if fan.dim() != x.dim {
        return Err(Error::DimensionMismatch {
            expected: fan.dim(),
            found: x.dim,
        });
    }
    x.points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (c, note) = fan.classify_detail(p)?;
            if let Some(note) = note {
                diagnostics.push(format!("point {i}: {note}"));
            }
            Ok(c)
        })
        .collect()
}

fn by_class(classes: &[Classification], coloring: &[usize], r: usize) -> Result<Vec<Vec<usize>>> {
    if coloring.len() != classes.len() {
        return Err(Error::pre("coloring length differs from the point count"));
    }
    let m = coloring.iter().max().map_or(0, |c| c + 1);
    let mut t = vec![vec![0usize; m]; r];
    for (c, &k) in classes.iter().zip(coloring) {
        if let Classification::Interior(j) = c {
            t[*j][k] += 1;
        }
    }
    Ok(t)
}

fn class_sizes(coloring: &[usize]) -> Vec<usize> {
    let m = coloring.iter().max().map_or(0, |c| c + 1);
    let mut s = vec![0; m];
    for &k in coloring {
        s[k] += 1;
    }
    s
}

/// Classifies every point of X and checks the requested distribution mode.
pub fn verify_report(fan: &Fan, x: &PointConfig, mode: &VerifyMode) -> Result<VerificationReport> {
    let r = fan.r();
    let mut diagnostics = Vec::new();
    let classes = classify_all(fan, x, &mut diagnostics)?;
    let mut interior_counts = vec![0usize; r];
    let mut center_count = 0;
    for c in &classes {
        match c {
            Classification::Center => center_count += 1,
            Classification::Interior(j) => interior_counts[*j] += 1,
            Classification::Outside => {}
        }
    }
    let distributes = classes.iter().all(|c| *c != Classification::Outside);
    let mut checks = BTreeMap::new();
    checks.insert("distribute".to_string(), distributes);
    let mut interior_by_class = Vec::new();
    let mut cells = Vec::new();
    let name = match mode {
        VerifyMode::Distribute => "distribute",
        VerifyMode::Equidistribute { coloring } => {
            interior_by_class = by_class(&classes, coloring, r)?;
            let sizes = class_sizes(coloring);
            let ok = interior_by_class
                .iter()
                .all(|row| row.iter().zip(&sizes).all(|(&c, &s)| r * c <= s));
            checks.insert("equidistribute".to_string(), ok);
            "equidistribute"
        }
        VerifyMode::Rainbow { coloring } => {
            interior_by_class = by_class(&classes, coloring, r)?;
            let ok = interior_by_class.iter().all(|row| row.iter().all(|&c| c <= 1));
            checks.insert("rainbow".to_string(), ok);
            "rainbow"
        }
        VerifyMode::Pierce { family } => {
            if family.n > x.len() {
                return Err(Error::pre("family ground set larger than the configuration"));
            }
            let mut closed_ok = true;
            let mut interior_ok = true;
            for member in &family.members {
                let mut met = vec![false; r];
                for &i in member {
                    match classes[i] {
                        Classification::Center => met.iter_mut().for_each(|m| *m = true),
                        Classification::Interior(j) => met[j] = true,
                        Classification::Outside => {}
                    }
                }
                if met.iter().filter(|&&m| m).count() < 2 {
                    closed_ok = false;
                }
                let inside_one = (0..r).any(|j| member.iter().all(|&i| classes[i] == Classification::Interior(j)));
                if inside_one {
                    interior_ok = false;
                }
            }
            checks.insert("pierce_closed_half_flats".to_string(), closed_ok);
            checks.insert("pierce_no_member_in_interior".to_string(), interior_ok);
            "pierce"
        }
        VerifyMode::TwoFan { other, coloring } => {
            if other.r() != r {
                return Err(Error::pre("two-fan verification needs fans with the same r"));
            }
            let second = classify_all(other, x, &mut diagnostics)?;
            checks.insert("second_fan_distributes".to_string(), second.iter().all(|c| *c != Classification::Outside));
            if coloring.len() != classes.len() {
                return Err(Error::pre("coloring length differs from the point count"));
            }
            let sizes = class_sizes(coloring);
            cells = vec![vec![vec![0usize; sizes.len()]; r]; r];
            for ((a, b), &k) in classes.iter().zip(&second).zip(coloring) {
                if let (Classification::Interior(i), Classification::Interior(j)) = (a, b) {
                    cells[*i][*j][k] += 1;
                }
            }
            let ok = cells
                .iter()
                .flatten()
                .all(|cell| cell.iter().zip(&sizes).all(|(&c, &s)| r * r * c <= s));
            checks.insert("two_fan_cells".to_string(), ok);
            "two_fan"
        }
    };
    let passed = checks.values().all(|&b| b);
    Ok(VerificationReport {
        mode: name.to_string(),
        robustness: interior_counts.iter().sum(),
        classifications: classes,
        center_count,
        interior_counts,
        interior_by_class,
        cells,
        distributes,
        checks,
        passed,
        diagnostics,
    })
}

/// Whether any member of `family` lies inside one interior (stronger pierce form).
pub fn member_in_interior(family: &SetFamily, classes: &[Classification]) -> bool {
    let r = classes
        .iter()
        .filter_map(|c| match c {
            Classification::Interior(j) => Some(j + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    (0..r).any(|j| {
        let part: Vec<usize> = (0..classes.len())
            .filter(|&i| classes[i] == Classification::Interior(j))
            .collect();
        !family.avoided_by(mask_of(&part))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::galedual::{gale_transform, inverse_gale};
    use crate::tverberg::{search_tuple, SearchConstraint, SearchOptions};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn sc(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    fn hand_fan() -> RealFan {
        RealFan::new(3, 2, vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[-1, -1])], ints(&[0, 0, 0])).unwrap()
    }

    #[test]
    fn hand_fan_classification() {
        let f = hand_fan();
        assert_eq!(f.classify_rational(&ints(&[0, 0])).unwrap(), Classification::Center);
        assert_eq!(f.classify_rational(&ints(&[2, 0])).unwrap(), Classification::Interior(0));
        assert_eq!(f.classify_rational(&ints(&[-2, 2])).unwrap(), Classification::Interior(1));
        assert_eq!(f.classify_rational(&ints(&[0, -2])).unwrap(), Classification::Interior(2));
        assert_eq!(f.classify_rational(&ints(&[1, 1])).unwrap(), Classification::Outside);
    }

    #[test]
    fn normalization_rescales_to_zero_sum() {
        let f = RealFan::new(3, 2, vec![ints(&[2, 0]), ints(&[0, 1]), ints(&[-1, -1])], ints(&[0, 0, 0])).unwrap();
        assert_eq!(f.normals[0], ints(&[2, 0]));
        assert_eq!(f.normals[1], ints(&[0, 2]));
        assert_eq!(f.normals[2], ints(&[-2, -2]));
        assert!(RealFan::new(3, 2, vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[1, 1])], ints(&[0, 0, 0])).is_err());
    }

    #[test]
    fn tuple_from_hand_fan() {
        let dual = PointConfig::new(
            FieldKind::Rational,
            2,
            vec![sc(&[2, 0]), sc(&[-2, 2]), sc(&[0, -2]), sc(&[0, 0])],
        )
        .unwrap();
        let pair = inverse_gale(&dual).unwrap();
        let t = tuple_from_fan(&hand_fan(), &pair).unwrap();
        assert_eq!(t.parts, vec![vec![0], vec![1], vec![2]]);
        for i in 0..3 {
            assert_eq!(t.witness.weight(i), int(1));
        }
        let back = fan_from_tuple_real(&pair, &t).unwrap();
        assert_eq!(tuple_from_fan(&back, &pair).unwrap(), t);
    }

    #[test]
    fn outside_dual_point_rejected() {
        let dual = PointConfig::new(
            FieldKind::Rational,
            2,
            vec![sc(&[1, 1]), sc(&[-2, 2]), sc(&[1, -3])],
        )
        .unwrap();
        let pair = inverse_gale(&dual).unwrap();
        assert!(tuple_from_fan(&hand_fan(), &pair).is_err());
    }

    #[test]
    fn collinear_five_lifted_round_trip() {
        let x = PointConfig::from_ints(&[&[1], &[2], &[3], &[4], &[5]]).unwrap();
        let pair = gale_transform(&x).unwrap();
        let t = search_tuple(&x, 3, &SearchConstraint::None, &SearchOptions::default())
            .unwrap()
            .unwrap();
        let fan = fan_from_tuple_real(&pair, &t).unwrap();
        let sum: Vec<Rational> = (0..fan.dim)
            .map(|k| fan.normals.iter().fold(rzero(), |a, n| a + &n[k]))
            .collect();
        assert!(sum.iter().all(|v| Zero::is_zero(v)));
        assert_eq!(tuple_from_fan(&fan, &pair).unwrap(), t);
    }

    #[test]
    fn complex_r2_fan_on_gaussian_points() {
        let n4 = FieldKind::Cyclotomic(4);
        let i = Scalar::Cyc(Cyclotomic::root_of_unity(4, 1));
        let pts = vec![
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(2)],
            vec![i.clone()],
            vec![Scalar::from_int(1).add(&i)],
        ];
        let x = PointConfig::new(n4, 1, pts).unwrap();
        let pair = gale_transform(&x).unwrap();
        let t = search_tuple(&x, 2, &SearchConstraint::None, &SearchOptions::default())
            .unwrap()
            .unwrap();
        let fan = fan_from_tuple_complex(&pair, &t).unwrap();
        for (j, part) in t.parts.iter().enumerate() {
            for &k in part {
                let q = hermitian_dot(&fan.alpha, &pair.dual.points[k])
                    .unwrap()
                    .mul(&omega(4, 2, -(j as i64 + 1)));
                assert_eq!(q.positivity(), Positivity::Positive);
            }
        }
    }

    #[test]
    fn report_modes() {
        let f = Fan::Real(hand_fan());
        let x = PointConfig::new(
            FieldKind::Rational,
            2,
            vec![sc(&[0, 0]), sc(&[2, 0]), sc(&[3, 0]), sc(&[-2, 2]), sc(&[0, -2])],
        )
        .unwrap();
        let rep = verify_report(&f, &x, &VerifyMode::Distribute).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.center_count, 1);
        assert_eq!(rep.interior_counts, vec![2, 1, 1]);
        assert_eq!(rep.robustness, 4);
        let eq = verify_report(&f, &x, &VerifyMode::Equidistribute { coloring: vec![0; 5] }).unwrap();
        // 3·2 > 5 in half-flat 0.
        assert!(!eq.passed);
        let rb = verify_report(&f, &x, &VerifyMode::Rainbow { coloring: vec![0; 5] }).unwrap();
        assert!(!rb.passed);
        let fam = SetFamily::new(5, vec![vec![1, 2]]).unwrap();
        let pr = verify_report(&f, &x, &VerifyMode::Pierce { family: fam }).unwrap();
        assert!(!pr.passed);
        assert!(!pr.checks["pierce_closed_half_flats"]);
    }

    #[test]
    fn equidistribute_threshold_arithmetic() {
        // r = 4 fan in R^3: interior count 3 out of a class of 10 fails (4·3 > 10).
        let normals = vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), ints(&[-1, -1, -1])];
        let f = Fan::Real(RealFan::new(4, 3, normals, ints(&[0, 0, 0, 0])).unwrap());
        // Interior(0): zero on normals 1 and 2, positive on 0.
        let mut pts = vec![sc(&[1, 0, 0]), sc(&[2, 0, 0]), sc(&[3, 0, 0])];
        pts.extend((0..7).map(|_| sc(&[0, 0, 0])));
        let x = PointConfig::new(FieldKind::Rational, 3, pts).unwrap();
        let rep = verify_report(&f, &x, &VerifyMode::Equidistribute { coloring: vec![0; 10] }).unwrap();
        assert!(rep.distributes);
        assert!(!rep.passed);
    }

    #[test]
    fn all_center_passes_everything() {
        let f = Fan::Real(hand_fan());
        let x = PointConfig::new(FieldKind::Rational, 2, vec![sc(&[0, 0]), sc(&[0, 0])]).unwrap();
        let rep = verify_report(&f, &x, &VerifyMode::Equidistribute { coloring: vec![0, 1] }).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.robustness, 0);
    }

    #[test]
    fn slice_project_real() {
        // Linear fan in R^2 with apex (−1, −1)·… on the center: α_j = (β_j, γ_j).
        let lin = RealFan::new(3, 3, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[-1, -1, 0])], ints(&[0, 0, 0]))
            .unwrap();
        let apex = sc(&[0, 0, -5]);
        let proj = slice_project(&Fan::Real(lin), &apex).unwrap();
        let Fan::Real(p) = &proj else { panic!() };
        assert_eq!(p.dim, 2);
        assert_eq!(
            p.classify_rational(&[rat(1, 2), int(0)]).unwrap(),
            Classification::Interior(0)
        );
        assert!(slice_project(&proj, &sc(&[1, 1])).is_err());
    }

    #[test]
    fn fan_json_round_trip() {
        let f = Fan::Real(hand_fan());
        let js = serde_json::to_string(&f).unwrap();
        let back: Fan = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
        let c = Fan::Complex(ComplexFan::new(2, 4, vec![Scalar::from_int(1)], Scalar::from_int(0)).unwrap());
        let js = serde_json::to_string(&c).unwrap();
        assert!(js.contains("\"N\":4"));
        assert_eq!(serde_json::from_str::<Fan>(&js).unwrap(), c);
    }
}
