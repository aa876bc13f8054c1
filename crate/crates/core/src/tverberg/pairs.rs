//! Pairs of proper tuples whose cells I_i ∩ J_j obey a constraint.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{first_feasible, real_points, with_threads, word_to_parts, Filter, Stream, TverbergTuple, CHUNK};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::feaslp::{proper_weights, ProperWeightProblem, WeightWitness};
use crate::galedual::PointConfig;
use crate::kneser::{mask_of, SetFamily};

/// Restriction on every cell I_i ∩ J_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairConstraint {
    /// No member of the family is a subset of any cell.
    FamilyAvoid { family: SetFamily },
    /// |I_i ∩ J_j ∩ C_k| ≤ caps[k].
    CellCap { coloring: Vec<usize>, caps: Vec<usize> },
}

impl PairConstraint {
    pub fn admits(&self, first: &[Vec<usize>], second: &[Vec<usize>]) -> bool {
        for a in first {
            for b in second {
                let cell = mask_of(a) & mask_of(b);
                let ok = match self {
                    PairConstraint::FamilyAvoid { family } => cell == 0 || family.avoided_by(cell),
                    PairConstraint::CellCap { coloring, caps } => {
                        let mut counts = vec![0usize; caps.len()];
                        for i in 0..coloring.len() {
                            if cell >> i & 1 == 1 {
                                counts[coloring[i]] += 1;
                            }
                        }
                        counts.iter().zip(caps).all(|(c, k)| c <= k)
                    }
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            PairConstraint::FamilyAvoid { family } if family.n > n => {
                Err(Error::pre("family ground set larger than the configuration"))
            }
            PairConstraint::CellCap { coloring, caps } => {
                if coloring.len() != n {
                    return Err(Error::pre(format!("coloring has {} entries for {n} points", coloring.len())));
                }
                if coloring.iter().any(|&c| c >= caps.len()) {
                    return Err(Error::pre("missing cap for a color class"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Filter for the second tuple given the first tuple's word.
    fn inner_filter(&self, outer: &[u8], allowed: &[bool]) -> Filter {
        let n = outer.len();
        let mut f = Filter::plain(n, true);
        f.allowed = allowed.to_vec();
        match self {
            PairConstraint::FamilyAvoid { family } => {
                f.family = family
                    .members
                    .iter()
                    .filter(|m| outer[m[0]] != 0 && m.iter().all(|&i| outer[i] == outer[m[0]]))
                    .map(|m| mask_of(m))
                    .collect();
            }
            PairConstraint::CellCap { coloring, caps } => {
                let m = caps.len();
                f.group = (0..n).map(|i| outer[i] as usize * m + coloring[i]).collect();
                // Cells outside the first tuple's parts are unconstrained.
                let top = outer.iter().copied().max().unwrap_or(0) as usize;
                let mut all = vec![usize::MAX; m];
                for _ in 0..top {
                    all.extend(caps.iter().copied());
                }
                f.caps = Some(all);
            }
        }
        f
    }

    fn permuted(&self, perm: &[usize]) -> PairConstraint {
        // perm[new] = old
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        match self {
            PairConstraint::FamilyAvoid { family } => PairConstraint::FamilyAvoid {
                family: SetFamily::new(
                    perm.len(),
                    family.members.iter().map(|m| m.iter().map(|&i| inv[i]).collect()).collect(),
                )
                .expect("relabeled family stays valid"),
            },
            PairConstraint::CellCap { coloring, caps } => PairConstraint::CellCap {
                coloring: perm.iter().map(|&old| coloring[old]).collect(),
                caps: caps.clone(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    Exhaustive,
    Randomized,
    /// Exhaustive under the gate, then randomized restarts.
    Auto,
}

#[derive(Clone, Debug)]
pub struct PairOptions {
    /// LP-call budget of the exhaustive mode.
    pub gate: u64,
    pub threads: usize,
    pub allowed: Option<Vec<bool>>,
    pub mode: PairMode,
    pub seed: u64,
    /// LP-call budget of each randomized restart.
    pub restart_gate: u64,
    pub max_restarts: usize,
    pub timeout: Option<Duration>,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            gate: super::DEFAULT_PAIR_GATE,
            threads: 0,
            allowed: None,
            mode: PairMode::Auto,
            seed: 0,
            restart_gate: 100_000,
            max_restarts: 1000,
            timeout: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuplePair {
    pub first: TverbergTuple,
    pub second: TverbergTuple,
}

type Found = (Vec<Vec<usize>>, WeightWitness, Vec<Vec<usize>>, WeightWitness);

fn exhaustive(
    pts: &[Vec<Rational>],
    r: usize,
    constraint: &PairConstraint,
    allowed: &[bool],
    gate: u64,
    deadline: Option<Instant>,
) -> Result<Option<Found>> {
    let mut outer = Filter::plain(pts.len(), true);
    outer.allowed = allowed.to_vec();
    let mut stream = Stream::new(outer, r);
    let mut calls = 0u64;
    loop {
        check_deadline(deadline)?;
        let budget = gate.saturating_sub(calls);
        let chunk: Vec<Vec<u8>> = stream.by_ref().take(CHUNK.min(budget as usize)).collect();
        if chunk.is_empty() {
            if budget == 0 && stream.next().is_some() {
                return Err(Error::gate("two-tuple LP calls", gate));
            }
            return Ok(None);
        }
        calls += chunk.len() as u64;
        let feasible: Vec<Option<WeightWitness>> = chunk
            .par_iter()
            .map(|w| {
                let parts = word_to_parts(w, r);
                proper_weights(&ProperWeightProblem { points: pts, parts: &parts })
            })
            .collect();
        for (w, wit) in chunk.iter().zip(feasible) {
            let Some(wit) = wit else { continue };
            check_deadline(deadline)?;
            let mut inner = Stream::new(constraint.inner_filter(w, allowed), r);
            if let Some((p2, w2)) = first_feasible(pts, r, &mut inner, gate, &mut calls)? {
                return Ok(Some((word_to_parts(w, r), wit, p2, w2)));
            }
        }
    }
}

fn check_deadline(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::Timeout {
            seconds: d.elapsed().as_secs(),
        }),
        _ => Ok(()),
    }
}

/// Maps parts found on relabeled indices back and orders them min-first.
fn unpermute(parts: Vec<Vec<usize>>, wit: WeightWitness, perm: &[usize]) -> (Vec<Vec<usize>>, WeightWitness) {
    let mut parts: Vec<Vec<usize>> = parts
        .into_iter()
        .map(|p| {
            let mut q: Vec<usize> = p.iter().map(|&i| perm[i]).collect();
            q.sort_unstable();
            q
        })
        .collect();
    parts.sort_by_key(|p| p[0]);
    let weights: BTreeMap<usize, Rational> = wit.weights.into_iter().map(|(i, t)| (perm[i], t)).collect();
    (
        parts,
        WeightWitness {
            weights,
            point: wit.point,
            slack: wit.slack,
        },
    )
}

/// Two proper tuples with every cell I_i ∩ J_j satisfying `constraint`.
///
/// Exhaustive mode walks first tuples canonically and searches the second
/// under cell constraints; randomized mode repeats that walk on seeded random
/// relabelings with a per-restart budget. Any emitted pair is re-verified.
pub fn search_two_tuples(
    config: &PointConfig,
    r: usize,
    constraint: &PairConstraint,
    opts: &PairOptions,
) -> Result<Option<TuplePair>> {
    if r < 2 {
        return Err(Error::pre("r must be at least 2"));
    }
    let n = config.len();
    if n > 128 {
        return Err(Error::pre("searches support at most 128 points"));
    }
    constraint.check(n)?;
    let allowed = opts.allowed.clone().unwrap_or_else(|| vec![true; n]);
    if allowed.len() != n {
        return Err(Error::pre("allowed mask length differs from the point count"));
    }
    let (pts, _) = real_points(config);
    let deadline = opts.timeout.map(|t| Instant::now() + t);

    let found = with_threads(opts.threads, || -> Result<Option<Found>> {
        if opts.mode != PairMode::Randomized {
            match exhaustive(&pts, r, constraint, &allowed, opts.gate, deadline) {
                Err(Error::SizeGate { .. }) if opts.mode == PairMode::Auto => {}
                other => return other,
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let usable: Vec<usize> = (0..n).filter(|&i| allowed[i]).collect();
        let fixed: Vec<usize> = (0..n).filter(|&i| !allowed[i]).collect();
        for _ in 0..opts.max_restarts {
            let mut perm = usable.clone();
            perm.shuffle(&mut rng);
            perm.extend(fixed.iter().copied());
            let p_pts: Vec<Vec<Rational>> = perm.iter().map(|&i| pts[i].clone()).collect();
            let p_allowed: Vec<bool> = perm.iter().map(|&i| allowed[i]).collect();
            let p_con = constraint.permuted(&perm);
            match exhaustive(&p_pts, r, &p_con, &p_allowed, opts.restart_gate, deadline) {
                Ok(Some((a, wa, b, wb))) => {
                    let (a, wa) = unpermute(a, wa, &perm);
                    let (b, wb) = unpermute(b, wb, &perm);
                    return Ok(Some((a, wa, b, wb)));
                }
                Ok(None) => return Ok(None),
                Err(Error::SizeGate { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::gate("randomized two-tuple restarts", opts.max_restarts as u64))
    })?;

    let Some((a, wa, b, wb)) = found else {
        return Ok(None);
    };
    let pair = TuplePair {
        first: TverbergTuple { r, parts: a, witness: wa },
        second: TverbergTuple { r, parts: b, witness: wb },
    };
    pair.first.validate(&pts)?;
    pair.second.validate(&pts)?;
    if !constraint.admits(&pair.first.parts, &pair.second.parts) {
        return Err(Error::verify("emitted pair violates the cell constraint"));
    }
    Ok(Some(pair))
}
