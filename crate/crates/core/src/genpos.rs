//! Strong general position, typicality, the robustness bound, sharpness
//! counterexamples and random instances.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Cyclotomic, ExactMatrix, Field, FieldKind, Rational, Scalar};
use crate::fans::VerificationReport;
use crate::galedual::{gale_transform, inverse_gale, lift, lift_augment, PointConfig};
#[cfg(test)]
use crate::galedual::linear_change;
use crate::tverberg::{search_covering_tuple, SearchOptions};

pub const DEFAULT_SGP_GATE: usize = 10;
pub const DEFAULT_CLASS_GATE: usize = 14;
const SGP_RETRIES: usize = 100;
const SPAN_RETRIES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgpViolation {
    pub parts: Vec<Vec<usize>>,
    pub codims: Vec<usize>,
    pub sum_codim: usize,
    /// `None` when the hulls do not meet.
    pub intersection_codim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgpReport {
    pub pass: bool,
    pub general_position: bool,
    /// Affinely dependent subset of at most d+1 points.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dependent: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<SgpViolation>,
    pub max_parts: usize,
    pub tuples_checked: u64,
}

/// Affine flat {x : N x = b} with independent rows.
#[derive(Clone)]
struct Flat {
    eqs: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
}

fn hull(points: &[&Vec<Scalar>], dim: usize) -> Flat {
    let p0 = points[0];
    let dirs: Vec<Vec<Scalar>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a.sub(b)).collect())
        .collect();
    let eqs = if dirs.is_empty() {
        ExactMatrix::<Scalar>::identity(dim).row_vecs()
    } else {
        ExactMatrix::from_rows(&dirs, dim).kernel_basis()
    };
    let rhs = eqs.iter().map(|v| dot(v, p0)).collect();
    Flat { eqs, rhs }
}

fn dot(u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter().zip(v).fold(Scalar::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
}

/// Intersection of `a` with `b`; `None` when empty.
fn meet(a: &Flat, b: &Flat, dim: usize) -> Option<Flat> {
    let mut rows: Vec<Vec<Scalar>> = a.eqs.iter().chain(&b.eqs).cloned().collect();
    let rhs: Vec<Scalar> = a.rhs.iter().chain(&b.rhs).cloned().collect();
    if rows.is_empty() {
        return Some(a.clone());
    }
    for (row, c) in rows.iter_mut().zip(&rhs) {
        row.push(c.clone());
    }
    let (rref, pivots) = ExactMatrix::from_rows(&rows, dim + 1).rref();
    if pivots.contains(&dim) {
        return None;
    }
    let eqs = (0..pivots.len()).map(|i| rref.row(i)[..dim].to_vec()).collect();
    let rhs = (0..pivots.len()).map(|i| rref.row(i)[dim].clone()).collect();
    Some(Flat { eqs, rhs })
}

fn codim_of(f: &Flat) -> usize {
    f.eqs.len()
}

struct SgpSearch<'a> {
    points: &'a [Vec<Scalar>],
    dim: usize,
    max_parts: usize,
    max_size: usize,
    used: Vec<bool>,
    parts: Vec<Vec<usize>>,
    codims: Vec<usize>,
    checked: u64,
}

impl SgpSearch<'_> {
    /// Extends the current tuple (with intersection `acc`) by parts whose
    /// minimum exceeds `after`.
    fn extend(&mut self, acc: &Flat, after: Option<usize>) -> Option<SgpViolation> {
        if self.parts.len() >= self.max_parts {
            return None;
        }
        let n = self.points.len();
        let start = after.map_or(0, |a| a + 1);
        for first in start..n {
            if self.used[first] {
                continue;
            }
            let mut part = vec![first];
            if let Some(v) = self.subsets(acc, &mut part, first + 1) {
                return Some(v);
            }
        }
        None
    }

    fn subsets(&mut self, acc: &Flat, part: &mut Vec<usize>, from: usize) -> Option<SgpViolation> {
        if let Some(v) = self.try_part(acc, part) {
            return Some(v);
        }
        if part.len() >= self.max_size {
            return None;
        }
        for next in from..self.points.len() {
            if self.used[next] {
                continue;
            }
            part.push(next);
            let v = self.subsets(acc, part, next + 1);
            part.pop();
            if v.is_some() {
                return v;
            }
        }
        None
    }

    fn try_part(&mut self, acc: &Flat, part: &[usize]) -> Option<SgpViolation> {
        let pts: Vec<&Vec<Scalar>> = part.iter().map(|&i| &self.points[i]).collect();
        let h = hull(&pts, self.dim);
        let c = codim_of(&h);
        let inter = meet(acc, &h, self.dim);
        self.parts.push(part.to_vec());
        self.codims.push(c);
        let sum: usize = self.codims.iter().sum();
        let mut out = None;
        if self.parts.len() >= 2 {
            self.checked += 1;
            let ok = match &inter {
                Some(f) => codim_of(f) == sum,
                None => sum > self.dim,
            };
            if !ok {
                out = Some(SgpViolation {
                    parts: self.parts.clone(),
                    codims: self.codims.clone(),
                    sum_codim: sum,
                    intersection_codim: inter.as_ref().map(codim_of),
                });
            }
        }
        if out.is_none() {
            if let Some(f) = &inter {
                for &i in part {
                    self.used[i] = true;
                }
                out = self.extend(f, Some(part[0]));
                for &i in part {
                    self.used[i] = false;
                }
            }
        }
        self.parts.pop();
        self.codims.pop();
        out
    }
}

fn first_dependent(points: &[Vec<Scalar>], dim: usize) -> Option<Vec<usize>> {
    let n = points.len();
    let k = (dim + 1).min(n);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let lifted: Vec<Vec<Scalar>> = idx
            .iter()
            .map(|&i| {
                let mut v = points[i].clone();
                v.push(Scalar::one());
                v
            })
            .collect();
        if ExactMatrix::from_rows(&lifted, dim + 1).rank() < k {
            return Some(idx);
        }
        // next k-combination
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Recomputes a violation from scratch; true when it is genuine.
pub fn violation_holds(config: &PointConfig, v: &SgpViolation) -> bool {
    let dim = config.dim;
    let mut acc = Some(Flat {
        eqs: Vec::new(),
        rhs: Vec::new(),
    });
    let mut sum = 0;
    for part in &v.parts {
        let pts: Vec<&Vec<Scalar>> = part.iter().map(|&i| &config.points[i]).collect();
        let h = hull(&pts, dim);
        sum += codim_of(&h);
        acc = acc.and_then(|a| meet(&a, &h, dim));
    }
    match acc {
        Some(f) => codim_of(&f) != sum,
        None => sum <= dim,
    }
}

/// Checks ordinary and strong general position over all tuples of 2..=max_parts
/// pairwise disjoint nonempty subsets. An empty intersection passes exactly
/// when the codimensions sum past the dimension.
pub fn check_sgp(config: &PointConfig, max_parts: usize, gate: usize) -> Result<SgpReport> {
    let n = config.len();
    if n > gate {
        return Err(Error::gate("points for strong general position", gate as u64));
    }
    let dim = config.dim;
    if let Some(dep) = first_dependent(&config.points, dim) {
        return Ok(SgpReport {
            pass: false,
            general_position: false,
            dependent: Some(dep),
            violation: None,
            max_parts,
            tuples_checked: 0,
        });
    }
    // In general position any d+1 points span, so larger parts add nothing.
    let mut s = SgpSearch {
        points: &config.points,
        dim,
        max_parts,
        max_size: dim.max(1),
        used: vec![false; n],
        parts: Vec::new(),
        codims: Vec::new(),
        checked: 0,
    };
    let whole = Flat {
        eqs: Vec::new(),
        rhs: Vec::new(),
    };
    let violation = s.extend(&whole, None);
    if let Some(v) = &violation {
        if !violation_holds(config, v) {
            return Err(Error::verify("strong general position witness does not re-verify"));
        }
    }
    Ok(SgpReport {
        pass: violation.is_none(),
        general_position: true,
        dependent: None,
        violation,
        max_parts,
        tuples_checked: s.checked,
    })
}

/// The points a_1..a_n in K^d whose augmented sequence is Gale dual to the
/// lifted X (the augmented average point is dropped).
pub fn corresponding_primal(x: &PointConfig) -> Result<PointConfig> {
    let pair = inverse_gale(&lift_augment(x)?)?;
    let idx: Vec<usize> = (0..x.len()).collect();
    let mut primal = pair.primal.select(&idx);
    if let Some(c) = &x.coloring {
        primal = primal.with_coloring(c.clone())?;
    }
    Ok(primal)
}

/// Strong general position of the corresponding primal; complex input is
/// checked on its realification, which needs Gaussian coordinates.
pub fn is_typical(x: &PointConfig, gate: usize) -> Result<bool> {
    let primal = corresponding_primal(x)?;
    let real = crate::pipeline::realify_gaussian(&primal)
        .ok_or_else(|| Error::pre("typicality of complex input needs Gaussian rational coordinates"))?;
    Ok(check_sgp(&real, real.len(), gate)?.pass)
}

/// Lower bound on Σ_j |Int(B_j) ∩ X| for typical X.
pub fn robustness_bound(r: usize, d: usize, complex: bool) -> usize {
    if complex {
        (r - 1) * (2 * d + 1) + 1
    } else {
        (r - 1) * (d + 1) + 1
    }
}

pub fn robustness_check(report: &VerificationReport, r: usize, d: usize, complex: bool) -> bool {
    report.robustness >= robustness_bound(r, d, complex)
}

fn sample_rational(rng: &mut ChaCha8Rng, bits: u32) -> Rational {
    let top = (1i64 << bits.min(62)) - 1;
    let num = rng.gen_range(-top..=top);
    let den = rng.gen_range(1..=top + 1);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn sample_scalar(rng: &mut ChaCha8Rng, field: FieldKind, bits: u32) -> Scalar {
    match field {
        FieldKind::Rational => Scalar::Rat(sample_rational(rng, bits)),
        FieldKind::Cyclotomic(n) => {
            let re = Cyclotomic::from_rational(n, sample_rational(rng, bits));
            let i = Cyclotomic::root_of_unity(n, (n / 4) as i64);
            let im = i.scale(&sample_rational(rng, bits));
            Scalar::Cyc(re.add(&im))
        }
    }
}

fn sample_config(rng: &mut ChaCha8Rng, n: usize, dim: usize, field: FieldKind, bits: u32) -> Result<PointConfig> {
    for _ in 0..SPAN_RETRIES {
        let pts = (0..n)
            .map(|_| (0..dim).map(|_| sample_scalar(rng, field, bits)).collect())
            .collect();
        let cfg = PointConfig::new(field, dim, pts)?;
        if cfg.is_affinely_spanning() {
            return Ok(cfg);
        }
    }
    Err(Error::pre("could not sample an affinely spanning configuration"))
}

/// Seeded random configuration with coordinates p/q, |p| < 2^bits, 1 ≤ q ≤ 2^bits.
/// Cyclotomic fields get Gaussian rationals a + b·i.
pub fn random_config(n: usize, dim: usize, field: FieldKind, bits: u32, seed: u64) -> Result<PointConfig> {
    if n < dim + 1 {
        return Err(Error::pre(format!("{n} points cannot affinely span dimension {dim}")));
    }
    if bits == 0 {
        return Err(Error::pre("coordinate bit bound must be positive"));
    }
    if let FieldKind::Cyclotomic(c) = field {
        if c % 4 != 0 {
            return Err(Error::pre("random complex points need i in the field (4 | N)"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_config(&mut rng, n, dim, field, bits)
}

/// A colored configuration that no r-fan equidistributes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleInstance {
    pub x: PointConfig,
    pub r: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub ell: usize,
    pub n: usize,
    /// Sampled points a_1..a_{n+ℓ−1} in R^{d+ℓ−1}.
    pub primal: PointConfig,
    pub sgp_verified: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

/// Counterexample with n = (r−1)(d+m+1)+k+1: the dual of n+ℓ−1 sampled points
/// plus the origin, colored with |X_i| = r−1 for i ≥ 2 and the origin last.
pub fn build_counterexample(
    r: usize,
    m: usize,
    d: usize,
    k: usize,
    ell: usize,
    seed: u64,
    sgp_gate: usize,
) -> Result<CounterexampleInstance> {
    if r < 3 || m < 2 || d < 1 {
        return Err(Error::pre("need r ≥ 3, m ≥ 2 and d ≥ 1"));
    }
    if k > r - 1 {
        return Err(Error::pre(format!("k = {k} exceeds r − 1")));
    }
    if ell * (r - 1) <= 2 * (r - 1) + k {
        return Err(Error::pre(format!("ℓ = {ell} must exceed 2 + k/(r−1)")));
    }
    let n = (r - 1) * (d + m + 1) + k + 1;
    let total = n + ell;
    let sampled = total - 1;
    let pdim = d + ell - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flags = Vec::new();
    let mut chosen = None;
    for _ in 0..SGP_RETRIES {
        let cfg = sample_config(&mut rng, sampled, pdim, FieldKind::Rational, 8)?;
        if sampled > sgp_gate {
            flags.push("unverified-SGP".to_string());
            chosen = Some((cfg, false));
            break;
        }
        if check_sgp(&cfg, sampled, sgp_gate)?.pass {
            chosen = Some((cfg, true));
            break;
        }
    }
    let Some((primal, sgp_verified)) = chosen else {
        return Err(Error::pre("no sample in strong general position within the retry limit"));
    };
    let pair = gale_transform(&primal)?;
    let xdim = n - d - 1;
    let mut pts = pair.dual.points.clone();
    pts.push(vec![Scalar::zero(); xdim]);
    let mut coloring = vec![0usize; total];
    let mut idx = total;
    for class in (1..m).rev() {
        for _ in 0..r - 1 {
            idx -= 1;
            coloring[idx] = class;
        }
    }
    let x = PointConfig::new(FieldKind::Rational, xdim, pts)?.with_coloring(coloring)?;
    x.require_affinely_spanning().map_err(|e| Error::verify(e.to_string()))?;
    Ok(CounterexampleInstance {
        x,
        r,
        m,
        d,
        k,
        ell,
        n,
        primal,
        sgp_verified,
        flags,
    })
}

/// True when no proper r-tuple of the lifted primal has all parts inside the
/// first color class; any equidistributing fan would yield one.
pub fn verify_no_equidistribution(inst: &CounterexampleInstance, class_gate: usize, opts: &SearchOptions) -> Result<bool> {
    let coloring = inst
        .x
        .coloring
        .as_ref()
        .ok_or_else(|| Error::pre("counterexample instance is uncolored"))?;
    let class1: Vec<bool> = coloring.iter().map(|&c| c == 0).collect();
    let size = class1.iter().filter(|&&b| b).count();
    if size < inst.r {
        return Ok(true);
    }
    if size > class_gate {
        return Err(Error::gate("first color class size", class_gate as u64));
    }
    let pair = inverse_gale(&lift_augment(&inst.x)?)?;
    let idx: Vec<usize> = (0..inst.x.len()).filter(|&i| class1[i]).collect();
    let derived = pair.primal.select(&idx);
    // The derived coordinates are huge; search on the sampled points when
    // they are exactly an affine preimage, which preserves proper tuples.
    let search = if idx.iter().all(|&i| i < inst.primal.len()) {
        let sampled = inst.primal.select(&idx);
        if affine_preimage(&sampled, &derived) {
            sampled
        } else {
            derived
        }
    } else {
        derived
    };
    let o = SearchOptions {
        allowed: None,
        guarantee: None,
        auto_guarantee: false,
        ..opts.clone()
    };
    Ok(search_covering_tuple(&search, inst.r, &o)?.is_none())
}

/// Whether an injective affine map sends `small_i` to `big_i` for every i.
pub fn affine_preimage(small: &PointConfig, big: &PointConfig) -> bool {
    if small.len() != big.len() || small.affine_rank() != small.dim + 1 || big.affine_rank() != small.dim + 1 {
        return false;
    }
    let rows: Vec<Vec<Scalar>> = small.points.iter().map(|p| lift(p)).collect();
    let sys = ExactMatrix::from_rows(&rows, small.dim + 1);
    (0..big.dim).all(|k| {
        let rhs: Vec<Scalar> = big.points.iter().map(|p| p[k].clone()).collect();
        sys.solve(&rhs).is_some()
    })
}
