//! Randomized invariants across the library. Every comparison is exact.

mod support;

use galefan_core::exactnum::{hermitian_dot, int, rank_of, Cyclotomic, ExactMatrix, Field, Positivity, Rational};
use galefan_core::fans::{fan_from_tuple_real, tuple_from_fan, verify_report};
use galefan_core::feaslp::{proper_weights, verify_witness, ProperWeightProblem};
use galefan_core::galedual::{
    affinely_equivalent, dependence_to_functional, functional_to_dependence, gale_transform, inverse_gale, lift,
};
use galefan_core::genpos::{check_sgp, corresponding_primal, is_typical, random_config, violation_holds};
use galefan_core::kneser::{
    has_r_disjoint, m_eligible, mask_of, threshold_caps, verify_certificate, CertificateVerdict, ColoringCertificate,
};
use galefan_core::pipeline;
use galefan_core::tverberg::{search_tuple, SearchConstraint, SearchOptions};
use galefan_core::{Classification, FieldKind, PipelineOptions, PointConfig, Scalar, VerifyMode};
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn cyclotomic(n: u32) -> impl Strategy<Value = Scalar> {
    proptest::collection::vec(small_rational(), n as usize).prop_map(move |c| Scalar::Cyc(Cyclotomic::new(n, c)))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        small_rational().prop_map(Scalar::Rat),
        cyclotomic(12),
    ]
}

fn int_config(n: usize, dim: usize, span: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-span..=span, dim), n)
}

fn config_of(points: &[Vec<i64>], dim: usize) -> PointConfig {
    let pts = points.iter().map(|p| p.iter().map(|&v| Scalar::from_int(v)).collect()).collect();
    PointConfig::new(FieldKind::Rational, dim, pts).unwrap()
}

fn rationals(x: &PointConfig) -> Vec<Vec<Rational>> {
    x.points.iter().map(|p| p.iter().map(|s| s.as_rational().unwrap().clone()).collect()).collect()
}

fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combos(n - 1, k);
    for mut c in combos(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv()), Scalar::one());
        }
    }

    #[test]
    fn conj_is_an_involutive_homomorphism(a in scalar(), b in scalar()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_basis_is_an_independent_kernel(
        rows in 1usize..5,
        cols in 1usize..7,
        seed in proptest::collection::vec(-3i64..=3, 36),
    ) {
        let data: Vec<Vec<Rational>> = (0..rows).map(|i| (0..cols).map(|j| int(seed[i * cols + j])).collect()).collect();
        let m = ExactMatrix::from_rows(&data, cols);
        let kernel = m.kernel_basis();
        for b in &kernel {
            prop_assert!(m.mul_vec(b).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(rank_of(&kernel, cols), kernel.len());
        prop_assert_eq!(kernel.len() + m.rank(), cols);
    }

    #[test]
    fn hermitian_norm_is_positive(u in proptest::collection::vec(cyclotomic(4), 1..5)) {
        let n = hermitian_dot(&u, &u).unwrap();
        let expected = if u.iter().all(|s| s.is_zero()) { Positivity::Zero } else { Positivity::Positive };
        prop_assert_eq!(n.positivity(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gale_dual_spans_and_sums_to_zero(n in 3usize..9, dim in 1usize..4, seed in any::<u64>()) {
        prop_assume!(n > dim);
        let x = random_config(n, dim, FieldKind::Rational, 6, seed).unwrap();
        let pair = gale_transform(&x).unwrap();
        pair.validate().unwrap();
        prop_assert_eq!(rank_of(&pair.dual.points, pair.dual_dim()), pair.dual_dim());
        let back = inverse_gale(&pair.dual).unwrap();
        prop_assert!(affinely_equivalent(&back.primal, &x));
    }

    #[test]
    fn bridge_is_a_bijection(n in 4usize..9, dim in 1usize..3, seed in any::<u64>(), coef in proptest::collection::vec(-5i64..=5, 8)) {
        let x = random_config(n, dim, FieldKind::Rational, 6, seed).unwrap();
        let pair = gale_transform(&x).unwrap();
        let m = pair.dual_dim();
        let alpha: Vec<Scalar> = coef[..m].iter().map(|&c| Scalar::from_int(c)).collect();
        prop_assume!(alpha.iter().any(|a| !a.is_zero()));
        let lambda = functional_to_dependence(&pair, &alpha).unwrap();
        prop_assert_eq!(&dependence_to_functional(&pair, &lambda).unwrap(), &alpha);

        // A dependence built from kernel rows goes around the other way.
        let mut dep = vec![Scalar::zero(); n];
        for (k, c) in coef[..m].iter().enumerate() {
            for (i, slot) in dep.iter_mut().enumerate() {
                *slot = slot.add(&pair.basis.get(k, i).mul(&Scalar::from_int(*c)));
            }
        }
        let back = functional_to_dependence(&pair, &dependence_to_functional(&pair, &dep).unwrap()).unwrap();
        prop_assert_eq!(back, dep);
    }

    #[test]
    fn general_position_is_self_dual(pts in int_config(7, 2, 2)) {
        let x = config_of(&pts, 2);
        prop_assume!(x.is_affinely_spanning());
        let pair = gale_transform(&x).unwrap();
        let (n, d, m) = (x.len(), x.dim, pair.dual_dim());
        // A (d+1)-subset is affinely independent iff the complementary dual
        // vectors are linearly independent.
        for s in combos(n, d + 1) {
            let lifted: Vec<Vec<Scalar>> = s.iter().map(|&i| lift(&x.points[i])).collect();
            let rest: Vec<Vec<Scalar>> = (0..n).filter(|i| !s.contains(i)).map(|i| pair.dual.points[i].clone()).collect();
            prop_assert_eq!(rank_of(&lifted, d + 1) == d + 1, rank_of(&rest, m) == m, "subset {:?}", s);
        }
    }
}

/// Exact feasibility oracle: the polytope of part-weights is bounded, so a
/// strictly positive point exists iff every coordinate is positive at some
/// basic feasible solution.
fn vertex_oracle(points: &[Vec<Rational>], parts: &[Vec<usize>]) -> bool {
    let d = points[0].len();
    let idx: Vec<usize> = parts.concat();
    let col = |i: usize| -> Vec<Rational> {
        let j = parts.iter().position(|p| p.contains(&i)).unwrap();
        let mut c = vec![<Rational as Zero>::zero(); parts.len() + (parts.len() - 1) * d];
        c[j] = int(1);
        for k in 0..d {
            if j > 0 {
                c[parts.len() + (j - 1) * d + k] = points[i][k].clone();
            } else {
                for jj in 1..parts.len() {
                    c[parts.len() + (jj - 1) * d + k] = -points[i][k].clone();
                }
            }
        }
        c
    };
    let rows = parts.len() + (parts.len() - 1) * d;
    let mut b = vec![<Rational as Zero>::zero(); rows];
    b[..parts.len()].fill(int(1));
    let mut covered = vec![false; idx.len()];
    for size in 1..=idx.len().min(rows) {
        for basis in combos(idx.len(), size) {
            let cols: Vec<Vec<Rational>> = basis.iter().map(|&k| col(idx[k])).collect();
            let m = ExactMatrix::from_columns(&cols, rows);
            if m.rank() != size {
                continue;
            }
            if let Some(w) = m.solve(&b) {
                if w.iter().all(|v| *v >= <Rational as Zero>::zero()) {
                    for (k, v) in basis.iter().zip(&w) {
                        if *v > <Rational as Zero>::zero() {
                            covered[*k] = true;
                        }
                    }
                }
            }
        }
    }
    covered.iter().all(|&c| c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn weights_match_vertex_oracle(
        dim in 1usize..3,
        pts in int_config(7, 2, 3),
        labels in proptest::collection::vec(0usize..4, 7),
        r in 2usize..4,
    ) {
        let points: Vec<Vec<Rational>> = pts.iter().map(|p| p[..dim].iter().map(|&v| int(v)).collect()).collect();
        let parts: Vec<Vec<usize>> = (0..r).map(|j| (0..7).filter(|&i| labels[i] == j).collect()).collect();
        prop_assume!(parts.iter().all(|p| !p.is_empty()));
        let problem = ProperWeightProblem::new(&points, &parts).unwrap();
        let found = proper_weights(&problem);
        if let Some(w) = &found {
            prop_assert!(verify_witness(&points, &parts, w));
        }
        prop_assert_eq!(found.is_some(), vertex_oracle(&points, &parts));
    }

    #[test]
    fn translation_moves_only_the_common_point(
        pts in int_config(6, 2, 4),
        labels in proptest::collection::vec(0usize..2, 6),
        shift in proptest::collection::vec(-9i64..=9, 2),
    ) {
        let points: Vec<Vec<Rational>> = pts.iter().map(|p| p.iter().map(|&v| int(v)).collect()).collect();
        let moved: Vec<Vec<Rational>> = points.iter().map(|p| p.iter().zip(&shift).map(|(a, s)| a + int(*s)).collect()).collect();
        let parts: Vec<Vec<usize>> = (0..2).map(|j| (0..6).filter(|&i| labels[i] == j).collect()).collect();
        prop_assume!(parts.iter().all(|p| !p.is_empty()));
        let a = proper_weights(&ProperWeightProblem::new(&points, &parts).unwrap());
        let b = proper_weights(&ProperWeightProblem::new(&moved, &parts).unwrap());
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert_eq!(&a.weights, &b.weights);
            let expect: Vec<Rational> = a.point.iter().zip(&shift).map(|(p, s)| p + int(*s)).collect();
            prop_assert_eq!(b.point, expect);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn one_below_tverberg_number_has_no_tuple(r in 2usize..4, d in 1usize..3, seed in any::<u64>()) {
        let n = (r - 1) * (d + 1);
        prop_assume!(n > d);
        let x = random_config(n, d, FieldKind::Rational, 16, seed).unwrap();
        prop_assert!(search_tuple(&x, r, &SearchConstraint::None, &SearchOptions::default()).unwrap().is_none());
    }

    #[test]
    fn emitted_tuples_revalidate(pts in int_config(7, 2, 3), r in 2usize..4, caps in proptest::collection::vec(1usize..3, 2)) {
        let x = config_of(&pts, 2);
        prop_assume!(x.is_affinely_spanning());
        let coloring: Vec<usize> = (0..7).map(|i| i % 2).collect();
        let constraints = [SearchConstraint::None, SearchConstraint::ColorCap { coloring, caps }];
        let points = rationals(&x);
        for c in &constraints {
            let one = search_tuple(&x, r, c, &SearchOptions { threads: 1, ..Default::default() });
            let many = search_tuple(&x, r, c, &SearchOptions { threads: 3, ..Default::default() });
            let (one, many) = match (one, many) {
                (Ok(a), Ok(b)) => (a, b),
                // A violated automatic guarantee would be a bug either way.
                (a, b) => return Err(TestCaseError::fail(format!("{a:?} / {b:?}"))),
            };
            prop_assert_eq!(&one, &many);
            if let Some(t) = one {
                t.validate(&points).unwrap();
                prop_assert!(c.admits(&t.parts));
            }
        }
    }

    #[test]
    fn threshold_certificates_are_valid(coloring in proptest::collection::vec(0usize..3, 4..8), r in 2usize..5) {
        let n = coloring.len();
        let m = coloring.iter().max().unwrap() + 1;
        let sizes: Vec<usize> = (0..m).map(|k| coloring.iter().filter(|&&c| c == k).count()).collect();
        let caps = threshold_caps(&sizes, r);
        let mut members = Vec::new();
        let mut classes = Vec::new();
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let hit = (0..m).find(|&k| set.iter().filter(|&&i| coloring[i] == k).count() > caps[k]);
            if let Some(k) = hit {
                members.push(set);
                classes.push(k);
            }
        }
        let cert = ColoringCertificate::new(n, members, r, classes).unwrap();
        prop_assert_eq!(verify_certificate(&cert, u64::MAX).unwrap(), CertificateVerdict::Valid);
    }

    #[test]
    fn disjoint_members_match_enumeration(masks in proptest::collection::vec(1u128..256, 0..13), r in 2usize..5) {
        let found = has_r_disjoint(&masks, r, u64::MAX).unwrap();
        let brute = combos(masks.len(), r).into_iter().any(|c| {
            c.iter().enumerate().all(|(a, &i)| c[a + 1..].iter().all(|&j| masks[i] & masks[j] == 0))
        });
        prop_assert_eq!(found.is_some(), brute);
        if let Some(hit) = found {
            prop_assert_eq!(hit.len(), r);
            let union = hit.iter().fold(0u128, |acc, &i| acc | masks[i]);
            prop_assert_eq!(union.count_ones(), hit.iter().map(|&i| masks[i].count_ones()).sum::<u32>());
        }
    }
}

#[test]
fn eligibility_generators_pass() {
    for r in [3u64, 5, 7] {
        for a in (1..r).step_by(2) {
            for k in 1..=3usize {
                for ells in combos(5, k) {
                    let m = 2 * a * ells.iter().map(|&l| r.pow(l as u32)).sum::<u64>();
                    assert!(m_eligible(m, r).unwrap().0, "m = {m}, r = {r}");
                }
            }
        }
    }
}

fn solve_for(fan: &galefan_core::RealFan, v: &[Rational]) -> Vec<Rational> {
    let rhs: Vec<Rational> = fan.offsets.iter().zip(v).map(|(c, t)| c + t).collect();
    ExactMatrix::from_rows(&fan.normals, fan.dim).solve(&rhs).unwrap()
}

fn in_closed(fan: &galefan_core::RealFan, x: &[Rational], j: usize) -> bool {
    let r = fan.r;
    let v: Vec<Rational> = (0..r)
        .map(|i| fan.normals[i].iter().zip(x).fold(<Rational as Zero>::zero(), |a, (b, c)| a + b * c) - &fan.offsets[i])
        .collect();
    (0..r).all(|i| i == j || i == (j + r - 1) % r || Zero::is_zero(&v[i])) && v[j] >= <Rational as Zero>::zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fans_round_trip_and_classify(
        seed in any::<u64>(),
        r in 2usize..4,
        targets in proptest::collection::vec((0usize..3, 0usize..3, -4i64..=4, -4i64..=4), 12),
    ) {
        let d = 2;
        let n = (r - 1) * (d + 1) + 1;
        let x = random_config(n, d, FieldKind::Rational, 6, seed).unwrap();
        let pair = gale_transform(&x).unwrap();
        let t = search_tuple(&x, r, &SearchConstraint::None, &SearchOptions::default()).unwrap().unwrap();
        let fan = fan_from_tuple_real(&pair, &t).unwrap();
        prop_assert_eq!(&tuple_from_fan(&fan, &pair).unwrap(), &t);

        for j in 0..r {
            let rest: Vec<Vec<Rational>> = (0..r).filter(|&i| i != j).map(|i| fan.normals[i].clone()).collect();
            prop_assert_eq!(rank_of(&rest, fan.dim), r - 1);
        }
        for k in 0..fan.dim {
            let sum = fan.normals.iter().fold(<Rational as Zero>::zero(), |a, b| a + &b[k]);
            prop_assert!(Zero::is_zero(&sum));
        }

        // Points on or near the half-flats: pick values of the r affine
        // functionals summing to zero and solve for x.
        for &(a, b, s, u) in &targets {
            let mut v = vec![<Rational as Zero>::zero(); r];
            v[a % r] += int(s);
            v[(a % r + r - 1) % r] -= int(s);
            v[b % r] += int(u);
            v[(b % r + 1) % r] -= int(u);
            let p = solve_for(&fan, &v);
            let tag = fan.classify_rational(&p).unwrap();
            let expect = match support::place_real(&fan, &p) {
                None => Classification::Center,
                Some(None) => Classification::Outside,
                Some(Some(j)) => Classification::Interior(j),
            };
            prop_assert_eq!(tag, expect);
            let closed: Vec<usize> = (0..r).filter(|&j| in_closed(&fan, &p, j)).collect();
            if closed.len() >= 2 {
                prop_assert_eq!(tag, Classification::Center);
            }
            if let Classification::Interior(j) = tag {
                prop_assert_eq!(closed, vec![j]);
            }
        }
        let report = verify_report(&galefan_core::Fan::Real(fan), &pair.dual, &VerifyMode::Distribute).unwrap();
        let sizes: Vec<usize> = t.parts.iter().map(Vec::len).collect();
        prop_assert_eq!(report.interior_counts, sizes);
    }

    #[test]
    fn sgp_violations_reverify(pts in int_config(6, 2, 2)) {
        let x = config_of(&pts, 2);
        prop_assume!(x.is_affinely_spanning());
        let report = check_sgp(&x, 6, 10).unwrap();
        if let Some(v) = &report.violation {
            prop_assert!(violation_holds(&x, v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generic_inputs_are_typical(seed in any::<u64>(), n in 5usize..8) {
        let x = random_config(n, n - 2, FieldKind::Rational, 12, seed).unwrap();
        let primal = corresponding_primal(&x).unwrap();
        prop_assert!(check_sgp(&primal, primal.len(), 10).unwrap().general_position);
        prop_assert!(is_typical(&x, 10).unwrap());
    }

    #[test]
    fn pipeline_runs_are_exact_and_deterministic(seed in any::<u64>(), r in 3usize..5) {
        let d = 1;
        let dim = (r - 1) * (d + 2);
        let n = dim + d + 1;
        let x = random_config(n, dim, FieldKind::Rational, 8, seed).unwrap().with_coloring(vec![0; n]).unwrap();
        let one = pipeline::equidistribute(&x, r, &PipelineOptions { threads: 1, ..Default::default() }).unwrap().unwrap();
        let two = pipeline::equidistribute(&x, r, &PipelineOptions { threads: 2, ..Default::default() }).unwrap().unwrap();
        prop_assert_eq!(serde_json::to_value(&one).unwrap(), serde_json::to_value(&two).unwrap());
        prop_assert!(one.report.passed);
        let sizes: Vec<usize> = one.tuple.parts.iter().map(Vec::len).collect();
        prop_assert_eq!(&one.report.interior_counts, &sizes);
        if one.typical == Some(true) {
            prop_assert!(one.report.robustness > (r - 1) * (d + 1));
        }
        let members: Vec<u128> = one.tuple.parts.iter().map(|p| mask_of(p)).collect();
        prop_assert_eq!(members.iter().fold(0u128, |a, m| a | m).count_ones() as usize, sizes.iter().sum::<usize>());
    }
}
