//! Exact feasibility of proper Tverberg tuples.
//!
//! Given points a_1..a_n with rational coordinates and disjoint parts
//! I_1..I_r, decide whether there are weights t_i > 0 with Σ_{I_j} t_i = 1
//! and all weighted sums Σ_{I_j} t_i a_i equal. Strict positivity is handled
//! by maximizing a common lower bound ε on the weights.

pub mod simplex;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::serde_rational;
use crate::exactnum::{FieldKind, Rational, Scalar};
use simplex::{maximize, LpOutcome};

/// A candidate tuple of parts over realified points.
#[derive(Clone, Debug)]
pub struct ProperWeightProblem<'a> {
    pub points: &'a [Vec<Rational>],
    pub parts: &'a [Vec<usize>],
}

impl<'a> ProperWeightProblem<'a> {
    pub fn new(points: &'a [Vec<Rational>], parts: &'a [Vec<usize>]) -> Result<Self> {
        check_parts(parts, points.len())?;
        Ok(ProperWeightProblem { points, parts })
    }

    fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }
}

/// Parts must be nonempty, in range and pairwise disjoint.
pub fn check_parts(parts: &[Vec<usize>], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for part in parts {
        if part.is_empty() {
            return Err(Error::pre("empty part"));
        }
        for &i in part {
            if i >= n {
                return Err(Error::pre(format!("index {i} out of range for {n} points")));
            }
            if seen[i] {
                return Err(Error::pre(format!("index {i} appears in two parts")));
            }
            seen[i] = true;
        }
    }
    Ok(())
}

/// Positive weights with equal part sums and a common weighted point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightWitness {
    #[serde(with = "serde_weight_map")]
    pub weights: BTreeMap<usize, Rational>,
    #[serde(with = "crate::exactnum::rational::serde_rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub slack: Rational,
}

impl WeightWitness {
    pub fn weight(&self, i: usize) -> Rational {
        self.weights.get(&i).cloned().unwrap_or_else(Rational::zero)
    }
}

mod serde_weight_map {
    use super::*;
    use crate::exactnum::rational::{format_rational, parse_rational};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(&k.to_string(), &format_rational(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<usize, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let k: usize = k.parse().map_err(serde::de::Error::custom)?;
                let v = parse_rational(&v).map_err(serde::de::Error::custom)?;
                Ok((k, v))
            })
            .collect()
    }
}

/// Solves the max-ε program; `None` when no strictly positive weights exist.
pub fn proper_weights(problem: &ProperWeightProblem<'_>) -> Option<WeightWitness> {
    let parts = problem.parts;
    let pts = problem.points;
    let dim = problem.dim();
    let order: Vec<usize> = parts.iter().flatten().copied().collect();
    let mut col = BTreeMap::new();
    for (k, &i) in order.iter().enumerate() {
        col.insert(i, k + 1);
    }
    // Variables: ε, then s_i per listed index, with t_i = ε + s_i.
    let nv = order.len() + 1;
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    for part in parts {
        let mut row = vec![Rational::zero(); nv];
        row[0] = Rational::from_integer(part.len().into());
        for i in part {
            row[col[i]] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
    }
    for part in &parts[1..] {
        for k in 0..dim {
            let mut row = vec![Rational::zero(); nv];
            for &i in part {
                row[0] += &pts[i][k];
                row[col[&i]] += &pts[i][k];
            }
            for &i in &parts[0] {
                row[0] -= &pts[i][k];
                row[col[&i]] -= &pts[i][k];
            }
            if row.iter().any(|v| !v.is_zero()) {
                a.push(row);
                b.push(Rational::zero());
            }
        }
    }
    let mut c = vec![Rational::zero(); nv];
    c[0] = Rational::one();
    let LpOutcome::Optimal { value, x } = maximize(&a, &b, &c) else {
        return None;
    };
    if !value.is_positive() {
        return None;
    }
    let weights: BTreeMap<usize, Rational> = order.iter().map(|&i| (i, &x[0] + &x[col[&i]])).collect();
    let point = weighted_sum(pts, &parts[0], &weights, dim);
    let witness = WeightWitness {
        weights,
        point,
        slack: value,
    };
    assert!(
        verify_witness(pts, parts, &witness),
        "simplex produced a witness that fails exact substitution"
    );
    Some(witness)
}

/// Whether the convex hulls of the parts share a point. On success returns
/// the supports of a nonnegative solution, which form a proper tuple, with
/// their witness.
pub fn meeting_hulls(points: &[Vec<Rational>], parts: &[Vec<usize>]) -> Option<(Vec<Vec<usize>>, WeightWitness)> {
    let dim = points.first().map_or(0, |p| p.len());
    let order: Vec<usize> = parts.iter().flatten().copied().collect();
    let col: BTreeMap<usize, usize> = order.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let nv = order.len();
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    for part in parts {
        let mut row = vec![Rational::zero(); nv];
        for i in part {
            row[col[i]] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
    }
    for part in &parts[1..] {
        for k in 0..dim {
            let mut row = vec![Rational::zero(); nv];
            for &i in part {
                row[col[&i]] += &points[i][k];
            }
            for &i in &parts[0] {
                row[col[&i]] -= &points[i][k];
            }
            if row.iter().any(|v| !v.is_zero()) {
                a.push(row);
                b.push(Rational::zero());
            }
        }
    }
    let LpOutcome::Optimal { x, .. } = maximize(&a, &b, &vec![Rational::zero(); nv]) else {
        return None;
    };
    let supports: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| p.iter().copied().filter(|i| x[col[i]].is_positive()).collect())
        .collect();
    let weights: BTreeMap<usize, Rational> = supports.iter().flatten().map(|&i| (i, x[col[&i]].clone())).collect();
    let slack = weights.values().min().cloned().unwrap_or_else(Rational::zero);
    let witness = WeightWitness {
        point: weighted_sum(points, &supports[0], &weights, dim),
        weights,
        slack,
    };
    assert!(
        verify_witness(points, &supports, &witness),
        "simplex produced hull weights that fail exact substitution"
    );
    Some((supports, witness))
}

fn weighted_sum(pts: &[Vec<Rational>], part: &[usize], w: &BTreeMap<usize, Rational>, dim: usize) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); dim];
    for &i in part {
        for (a, p) in acc.iter_mut().zip(&pts[i]) {
            *a += &w[&i] * p;
        }
    }
    acc
}

/// Exact re-substitution: positive weights on exactly the listed indices,
/// unit part sums and a common weighted point.
pub fn verify_witness(points: &[Vec<Rational>], parts: &[Vec<usize>], w: &WeightWitness) -> bool {
    if check_parts(parts, points.len()).is_err() {
        return false;
    }
    let listed: usize = parts.iter().map(|p| p.len()).sum();
    if w.weights.len() != listed || !w.slack.is_positive() {
        return false;
    }
    let dim = points.first().map_or(0, |p| p.len());
    for part in parts {
        let mut sum = Rational::zero();
        for i in part {
            match w.weights.get(i) {
                Some(t) if t.is_positive() && *t >= w.slack => sum += t,
                _ => return false,
            }
        }
        if !sum.is_one() || weighted_sum(points, part, &w.weights, dim) != w.point {
            return false;
        }
    }
    true
}

/// Replaces every coordinate by its coefficient vector over the power basis
/// of the configuration's field (identity on rational configurations).
pub fn realify(points: &[Vec<Scalar>], field: FieldKind) -> Vec<Vec<Rational>> {
    points
        .iter()
        .map(|p| p.iter().flat_map(|s| s.coefficients(field)).collect())
        .collect()
}
