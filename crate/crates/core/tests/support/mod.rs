//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use galefan_core::exactnum::{hermitian_dot, Field, Rational};
use galefan_core::pipeline::gaussian_parts;
use galefan_core::{ComplexFan, Fan, PointConfig, RealFan, Scalar};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use num_traits::{Signed, ToPrimitive, Zero};

/// Where an oracle puts a point: `None` is the center, `Some(Some(j))` the
/// open half-flat j and `Some(None)` outside the fan.
pub type Place = Option<Option<usize>>;

pub fn rational_points(x: &PointConfig) -> Vec<Vec<Rational>> {
    x.points
        .iter()
        .map(|p| p.iter().map(|s| s.as_rational().expect("real point").clone()).collect())
        .collect()
}

pub fn float_points(x: &PointConfig) -> Vec<Vec<f64>> {
    rational_points(x)
        .iter()
        .map(|p| p.iter().map(|q| q.to_f64().unwrap()).collect())
        .collect()
}

/// Real fan membership straight from the normal form: the values
/// v_j = ⟨n_j, x⟩ − o_j vanish on the center, and on the open half-flat j
/// every value except v_j and v_{j−1} vanishes while v_j > 0.
pub fn place_real(fan: &RealFan, x: &[Rational]) -> Place {
    let r = fan.r;
    let v: Vec<Rational> = (0..r)
        .map(|j| {
            let mut s = -fan.offsets[j].clone();
            for (a, b) in fan.normals[j].iter().zip(x) {
                s += a * b;
            }
            s
        })
        .collect();
    if v.iter().all(Zero::is_zero) {
        return None;
    }
    let pos: Vec<usize> = (0..r).filter(|&j| v[j].is_positive()).collect();
    if pos.len() != 1 {
        return Some(None);
    }
    let j = pos[0];
    let prev = (j + r - 1) % r;
    let ok = (0..r).all(|i| i == j || i == prev || Zero::is_zero(&v[i]));
    Some(ok.then_some(j))
}

/// Complex regular 2-fan: w = ⟨α, z⟩ − β must be real, negative on half-flat
/// 0 and positive on half-flat 1.
pub fn place_complex_r2(fan: &ComplexFan, z: &[Scalar]) -> Place {
    assert_eq!(fan.r, 2);
    let w = hermitian_dot(&fan.alpha, z).unwrap().sub(&fan.beta);
    let (re, im) = gaussian_parts(&w).expect("Gaussian data");
    if Zero::is_zero(&re) && Zero::is_zero(&im) {
        return None;
    }
    if !Zero::is_zero(&im) {
        return Some(None);
    }
    Some(Some(if re.is_negative() { 0 } else { 1 }))
}

pub fn place_all(fan: &Fan, x: &PointConfig) -> Vec<Place> {
    match fan {
        Fan::Real(f) => rational_points(x).iter().map(|p| place_real(f, p)).collect(),
        Fan::Complex(f) => x.points.iter().map(|p| place_complex_r2(f, p)).collect(),
    }
}

/// counts[j][k] = points of class k in open half-flat j.
pub fn interior_counts(places: &[Place], coloring: &[usize], r: usize, m: usize) -> Vec<Vec<usize>> {
    let mut c = vec![vec![0; m]; r];
    for (p, &k) in places.iter().zip(coloring) {
        if let Some(Some(j)) = p {
            c[*j][k] += 1;
        }
    }
    c
}

pub fn class_sizes(coloring: &[usize], m: usize) -> Vec<usize> {
    let mut s = vec![0; m];
    for &k in coloring {
        s[k] += 1;
    }
    s
}

/// Whether some r disjoint parts covering all points have intersecting
/// convex hulls, decided by a floating point LP per labelling.
pub fn float_tverberg_exists(points: &[Vec<f64>], r: usize) -> bool {
    let n = points.len();
    let dim = points.first().map_or(0, |p| p.len());
    let mut labels = vec![0usize; n];
    // Restricted growth strings enumerate set partitions without relabelings.
    fn next(labels: &mut [usize], r: usize) -> bool {
        let n = labels.len();
        for i in (1..n).rev() {
            let cap = labels[..i].iter().max().unwrap() + 1;
            if labels[i] < cap.min(r - 1) {
                labels[i] += 1;
                for l in labels.iter_mut().skip(i + 1) {
                    *l = 0;
                }
                return true;
            }
        }
        false
    }
    loop {
        if labels.iter().max() == Some(&(r - 1)) && hulls_meet(points, &labels, r, dim) {
            return true;
        }
        if !next(&mut labels, r) {
            return false;
        }
    }
}

fn hulls_meet(points: &[Vec<f64>], labels: &[usize], r: usize, dim: usize) -> bool {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = points.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for j in 0..r {
        let row: Vec<_> = (0..points.len()).filter(|&i| labels[i] == j).map(|i| (vars[i], 1.0)).collect();
        lp.add_constraint(&row[..], ComparisonOp::Eq, 1.0);
    }
    for j in 1..r {
        for k in 0..dim {
            let row: Vec<_> = (0..points.len())
                .filter(|&i| labels[i] == j || labels[i] == 0)
                .map(|i| (vars[i], if labels[i] == j { points[i][k] } else { -points[i][k] }))
                .collect();
            lp.add_constraint(&row[..], ComparisonOp::Eq, 0.0);
        }
    }
    lp.solve().is_ok()
}
