//! Set families, Kneser hypergraph colorings and their certificates.
//!
//! Members are stored as bit masks over a ground set of at most 128 indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_GROUND: usize = 128;

/// Default node budget for disjointness backtracking.
pub const DEFAULT_DISJOINT_GATE: u64 = 50_000_000;

pub fn mask_of(indices: &[usize]) -> u128 {
    indices.iter().fold(0u128, |m, &i| m | (1u128 << i))
}

pub fn indices_of(mask: u128) -> Vec<usize> {
    (0..MAX_GROUND).filter(|&i| mask >> i & 1 == 1).collect()
}

/// A family of nonempty subsets of `0..n`, sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct SetFamily {
    pub n: usize,
    pub members: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawFamily {
    n: usize,
    members: Vec<Vec<usize>>,
}

impl TryFrom<RawFamily> for SetFamily {
    type Error = Error;
    fn try_from(raw: RawFamily) -> Result<Self> {
        SetFamily::new(raw.n, raw.members)
    }
}

fn canonical_member(n: usize, mut m: Vec<usize>) -> Result<Vec<usize>> {
    m.sort_unstable();
    m.dedup();
    if m.is_empty() {
        return Err(Error::pre("family members must be nonempty"));
    }
    if let Some(&i) = m.iter().find(|&&i| i >= n) {
        return Err(Error::pre(format!("member index {i} outside ground set of size {n}")));
    }
    Ok(m)
}

impl SetFamily {
    pub fn new(n: usize, members: Vec<Vec<usize>>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::pre(format!("ground sets above {MAX_GROUND} are not supported")));
        }
        let mut ms = members
            .into_iter()
            .map(|m| canonical_member(n, m))
            .collect::<Result<Vec<_>>>()?;
        ms.sort();
        ms.dedup();
        Ok(SetFamily { n, members: ms })
    }

    pub fn empty(n: usize) -> Self {
        SetFamily { n, members: Vec::new() }
    }

    /// All k-element subsets of `0..n` in lexicographic order.
    pub fn all_k_subsets(n: usize, k: usize) -> Result<Self> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        if k > 0 {
            rec(0, n, k, &mut cur, &mut out);
        }
        SetFamily::new(n, out)
    }

    pub fn masks(&self) -> Vec<u128> {
        self.members.iter().map(|m| mask_of(m)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether no member is a subset of `part`.
    pub fn avoided_by(&self, part: u128) -> bool {
        self.members.iter().all(|m| mask_of(m) & !part != 0)
    }
}

/// An assignment of family members to classes `0..m`, claimed to have no
/// class containing r pairwise disjoint members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCertificate")]
pub struct ColoringCertificate {
    pub n: usize,
    pub members: Vec<Vec<usize>>,
    pub r: usize,
    pub classes: Vec<usize>,
}

#[derive(Deserialize)]
struct RawCertificate {
    n: usize,
    members: Vec<Vec<usize>>,
    r: usize,
    classes: Vec<usize>,
}

impl TryFrom<RawCertificate> for ColoringCertificate {
    type Error = Error;
    fn try_from(raw: RawCertificate) -> Result<Self> {
        ColoringCertificate::new(raw.n, raw.members, raw.r, raw.classes)
    }
}

impl ColoringCertificate {
    /// Canonicalizes members together with their classes.
    pub fn new(n: usize, members: Vec<Vec<usize>>, r: usize, classes: Vec<usize>) -> Result<Self> {
        if members.len() != classes.len() {
            return Err(Error::InvalidCertificate(format!(
                "{} members but {} class labels",
                members.len(),
                classes.len()
            )));
        }
        if r < 2 {
            return Err(Error::pre("r must be at least 2"));
        }
        if n > MAX_GROUND {
            return Err(Error::pre(format!("ground sets above {MAX_GROUND} are not supported")));
        }
        let mut pairs = members
            .into_iter()
            .zip(classes)
            .map(|(m, c)| Ok((canonical_member(n, m)?, c)))
            .collect::<Result<Vec<_>>>()?;
        pairs.sort();
        pairs.dedup();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidCertificate(format!(
                    "member {:?} assigned to two classes",
                    w[0].0
                )));
            }
        }
        let (members, classes) = pairs.into_iter().unzip();
        Ok(ColoringCertificate { n, members, r, classes })
    }

    pub fn family(&self) -> SetFamily {
        SetFamily {
            n: self.n,
            members: self.members.clone(),
        }
    }

    /// Number of classes m (one more than the largest label).
    pub fn num_classes(&self) -> usize {
        self.classes.iter().max().map_or(0, |c| c + 1)
    }
}

/// Outcome of certificate verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CertificateVerdict {
    Valid,
    Violation { class: usize, hyperedge: Vec<Vec<usize>> },
}

/// Searches for r pairwise disjoint members; returns their positions in `members`.
pub fn has_r_disjoint(members: &[u128], r: usize, gate: u64) -> Result<Option<Vec<usize>>> {
    if r < 2 {
        return Err(Error::pre("r must be at least 2"));
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&i| (members[i].count_ones(), i));
    let sizes: Vec<u32> = order.iter().map(|&i| members[i].count_ones()).collect();
    let ground = members.iter().fold(0u128, |a, &m| a | m).count_ones();
    let mut chosen = Vec::with_capacity(r);
    let mut nodes = 0u64;
    let found = disjoint_rec(members, &order, &sizes, r, 0, 0, ground, &mut chosen, &mut nodes, gate)?;
    Ok(found.then(|| {
        let mut v: Vec<usize> = chosen.iter().map(|&k| order[k]).collect();
        v.sort_unstable();
        v
    }))
}

#[allow(clippy::too_many_arguments)]
fn disjoint_rec(
    members: &[u128],
    order: &[usize],
    sizes: &[u32],
    r: usize,
    start: usize,
    used: u128,
    ground: u32,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    gate: u64,
) -> Result<bool> {
    let need = (r - chosen.len()) as u32;
    if need == 0 {
        return Ok(true);
    }
    *nodes += 1;
    if *nodes > gate {
        return Err(Error::gate("disjoint-member search nodes", gate));
    }
    let free = ground - used.count_ones();
    for k in start..order.len() {
        if (order.len() - k) < need as usize || sizes[k] * need > free {
            break;
        }
        let m = members[order[k]];
        if m & used != 0 {
            continue;
        }
        chosen.push(k);
        if disjoint_rec(members, order, sizes, r, k + 1, used | m, ground, chosen, nodes, gate)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Checks every class for r pairwise disjoint members.
pub fn verify_certificate(cert: &ColoringCertificate, gate: u64) -> Result<CertificateVerdict> {
    let masks: Vec<u128> = cert.members.iter().map(|m| mask_of(m)).collect();
    for class in 0..cert.num_classes() {
        let idx: Vec<usize> = (0..masks.len()).filter(|&i| cert.classes[i] == class).collect();
        let sub: Vec<u128> = idx.iter().map(|&i| masks[i]).collect();
        if let Some(hit) = has_r_disjoint(&sub, cert.r, gate)? {
            return Ok(CertificateVerdict::Violation {
                class,
                hyperedge: hit.iter().map(|&k| cert.members[idx[k]].clone()).collect(),
            });
        }
    }
    Ok(CertificateVerdict::Valid)
}

/// Assigns each member to the first class that stays free of r pairwise
/// disjoint members. Always yields a valid certificate.
pub fn greedy_certificate(family: &SetFamily, r: usize, gate: u64) -> Result<ColoringCertificate> {
    let masks = family.masks();
    let mut classes: Vec<Vec<u128>> = Vec::new();
    let mut labels = Vec::with_capacity(masks.len());
    for &m in &masks {
        let mut placed = None;
        for (c, members) in classes.iter().enumerate() {
            let disjoint: Vec<u128> = members.iter().copied().filter(|&x| x & m == 0).collect();
            let blocked = if r == 2 {
                !disjoint.is_empty()
            } else {
                has_r_disjoint(&disjoint, r - 1, gate)?.is_some()
            };
            if !blocked {
                placed = Some(c);
                break;
            }
        }
        let c = placed.unwrap_or_else(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(m);
        labels.push(c);
    }
    ColoringCertificate::new(family.n, family.members.clone(), r, labels)
}

/// Caps floor(|X_k| / q): a part avoids every set meeting X_k in more than
/// |X_k|/q points iff it holds at most the cap from class k.
pub fn threshold_caps(class_sizes: &[usize], q: usize) -> Vec<usize> {
    class_sizes.iter().map(|&s| s / q).collect()
}

pub fn is_prime(r: u64) -> bool {
    r >= 2 && (2..).take_while(|d| d * d <= r).all(|d| !r.is_multiple_of(d))
}

/// Whether r is a power of a prime.
pub fn is_prime_power(r: u64) -> bool {
    if r < 2 {
        return false;
    }
    let p = (2..=r).find(|d| r.is_multiple_of(*d)).unwrap();
    let mut x = r;
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

/// Digit test on m(r−1)/2 in base r (most significant digit first).
pub fn m_eligible(m: u64, r: u64) -> Result<(bool, Vec<u64>)> {
    if m < 1 {
        return Err(Error::pre("m must be at least 1"));
    }
    if r.is_multiple_of(2) || !is_prime(r) {
        return Err(Error::pre(format!("r = {r} is not an odd prime")));
    }
    let prod = m
        .checked_mul(r - 1)
        .ok_or_else(|| Error::pre("m(r-1) overflows"))?;
    if prod % 2 == 1 {
        return Err(Error::pre("m(r-1) is odd"));
    }
    let mut v = prod / 2;
    let mut digits = Vec::new();
    while v > 0 {
        digits.push(v % r);
        v /= r;
    }
    digits.reverse();
    let ok = digits.iter().all(|d| d % 2 == 0);
    Ok((ok, digits))
}
