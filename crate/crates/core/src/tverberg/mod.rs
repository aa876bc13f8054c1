//! Deterministic searches for proper Tverberg tuples, optionally
//! constrained, and for pairs of tuples with constrained intersections.

mod enumerate;
mod pairs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::feaslp::{check_parts, proper_weights, realify, verify_witness, ProperWeightProblem, WeightWitness};
use crate::galedual::PointConfig;
use crate::kneser::{is_prime, mask_of, SetFamily};
pub(crate) use enumerate::{word_to_parts, Filter, Stream};
pub use pairs::{search_two_tuples, PairConstraint, PairMode, PairOptions, TuplePair};

pub const DEFAULT_LP_GATE: u64 = 50_000_000;
pub const DEFAULT_PAIR_GATE: u64 = 1_000_000;
const CHUNK: usize = 256;

/// Ordered disjoint nonempty parts with a positivity witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TverbergTuple {
    pub r: usize,
    pub parts: Vec<Vec<usize>>,
    pub witness: WeightWitness,
}

impl TverbergTuple {
    /// Indices in no part.
    pub fn leftover(&self, n: usize) -> Vec<usize> {
        let mut used = vec![false; n];
        for &i in self.parts.iter().flatten() {
            used[i] = true;
        }
        (0..n).filter(|&i| !used[i]).collect()
    }

    /// Σ |I_j|.
    pub fn support_size(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    /// Part label per index: 0 for leftover, j+1 for part j.
    pub fn word(&self, n: usize) -> Vec<u8> {
        let mut w = vec![0u8; n];
        for (j, part) in self.parts.iter().enumerate() {
            for &i in part {
                w[i] = (j + 1) as u8;
            }
        }
        w
    }

    /// Exact re-validation against realified points.
    pub fn validate(&self, points: &[Vec<Rational>]) -> Result<()> {
        if self.parts.len() != self.r {
            return Err(Error::verify("tuple has the wrong number of parts"));
        }
        check_parts(&self.parts, points.len()).map_err(|e| Error::verify(e.to_string()))?;
        if !verify_witness(points, &self.parts, &self.witness) {
            return Err(Error::verify("tuple witness fails exact substitution"));
        }
        Ok(())
    }
}

/// Restrictions on the parts of a single tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchConstraint {
    None,
    /// No member of the family is a subset of any part.
    FamilyAvoid { family: SetFamily },
    /// |I_j ∩ C_k| ≤ caps[k].
    ColorCap { coloring: Vec<usize>, caps: Vec<usize> },
    /// |I_j ∩ C_k| ≤ 1.
    Rainbow { coloring: Vec<usize> },
}

impl SearchConstraint {
    pub fn admits(&self, parts: &[Vec<usize>]) -> bool {
        match self {
            SearchConstraint::None => true,
            SearchConstraint::FamilyAvoid { family } => parts.iter().all(|p| family.avoided_by(mask_of(p))),
            SearchConstraint::ColorCap { coloring, caps } => caps_hold(parts, coloring, caps),
            SearchConstraint::Rainbow { coloring } => {
                let m = coloring.iter().max().map_or(0, |c| c + 1);
                caps_hold(parts, coloring, &vec![1; m])
            }
        }
    }

    fn filter(&self, n: usize, canonical: bool) -> Result<Filter> {
        let mut f = Filter::plain(n, canonical);
        match self {
            SearchConstraint::None => {}
            SearchConstraint::FamilyAvoid { family } => {
                if family.n > n {
                    return Err(Error::pre("family ground set larger than the configuration"));
                }
                f.family = family.masks();
            }
            SearchConstraint::ColorCap { coloring, caps } => {
                check_coloring(coloring, n)?;
                if caps.len() <= coloring.iter().copied().max().unwrap_or(0) {
                    return Err(Error::pre("missing cap for a color class"));
                }
                f.group = coloring.clone();
                f.caps = Some(caps.clone());
            }
            SearchConstraint::Rainbow { coloring } => {
                check_coloring(coloring, n)?;
                let m = coloring.iter().max().map_or(0, |c| c + 1);
                f.group = coloring.clone();
                f.caps = Some(vec![1; m]);
            }
        }
        Ok(f)
    }
}

fn check_coloring(coloring: &[usize], n: usize) -> Result<()> {
    if coloring.len() != n {
        return Err(Error::pre(format!("coloring has {} entries for {n} points", coloring.len())));
    }
    Ok(())
}

fn caps_hold(parts: &[Vec<usize>], coloring: &[usize], caps: &[usize]) -> bool {
    parts.iter().all(|p| {
        let mut counts = vec![0usize; caps.len()];
        for &i in p {
            counts[coloring[i]] += 1;
        }
        counts.iter().zip(caps).all(|(c, k)| c <= k)
    })
}

/// Search configuration.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Maximum number of LP calls.
    pub gate: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
    /// Suppress relabelings by requiring min(I_1) < … < min(I_r).
    pub canonical: bool,
    /// Indices that may appear in parts (all when `None`).
    pub allowed: Option<Vec<bool>>,
    /// When set, exhausting the search is reported as a violation of this promise.
    pub guarantee: Option<String>,
    /// Derive a guarantee from the linear and colored Tverberg bounds when
    /// `guarantee` is unset.
    pub auto_guarantee: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            gate: DEFAULT_LP_GATE,
            threads: 0,
            canonical: true,
            allowed: None,
            guarantee: None,
            auto_guarantee: true,
        }
    }
}

/// All candidate part-tuples of `0..n` into r parts, in canonical order.
pub fn enumerate_candidates(n: usize, r: usize, canonical: bool) -> impl Iterator<Item = Vec<Vec<usize>>> {
    Stream::new(Filter::plain(n, canonical), r).map(move |w| word_to_parts(&w, r))
}

/// Runs `f` inside a pool with the requested number of threads.
pub(crate) fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// First candidate from `stream` (in stream order) admitting proper weights.
pub(crate) fn first_feasible(
    points: &[Vec<Rational>],
    r: usize,
    stream: &mut Stream,
    gate: u64,
    lp_calls: &mut u64,
) -> Result<Option<(Vec<Vec<usize>>, WeightWitness)>> {
    loop {
        let budget = gate.saturating_sub(*lp_calls);
        let chunk: Vec<Vec<u8>> = stream.by_ref().take(CHUNK.min(budget as usize)).collect();
        if chunk.is_empty() {
            if budget == 0 && stream.next().is_some() {
                return Err(Error::gate("LP calls", gate));
            }
            return Ok(None);
        }
        *lp_calls += chunk.len() as u64;
        let hit = chunk.par_iter().find_map_first(|w| {
            let parts = word_to_parts(w, r);
            let problem = ProperWeightProblem { points, parts: &parts };
            proper_weights(&problem).map(|wit| (parts, wit))
        });
        if hit.is_some() {
            return Ok(hit);
        }
    }
}

/// Realified coordinates and their real dimension.
pub(crate) fn real_points(config: &PointConfig) -> (Vec<Vec<Rational>>, usize) {
    let pts = realify(&config.points, config.field);
    let dim = pts.first().map_or(0, |p| p.len());
    (pts, dim)
}

fn prepare(config: &PointConfig, r: usize, opts: &SearchOptions) -> Result<Vec<bool>> {
    if r < 2 {
        return Err(Error::pre("r must be at least 2"));
    }
    if config.len() > 128 {
        return Err(Error::pre("searches support at most 128 points"));
    }
    let allowed = opts.allowed.clone().unwrap_or_else(|| vec![true; config.len()]);
    if allowed.len() != config.len() {
        return Err(Error::pre("allowed mask length differs from the point count"));
    }
    Ok(allowed)
}

/// First proper tuple (in canonical order) satisfying `constraint`.
pub fn search_tuple(
    config: &PointConfig,
    r: usize,
    constraint: &SearchConstraint,
    opts: &SearchOptions,
) -> Result<Option<TverbergTuple>> {
    let allowed = prepare(config, r, opts)?;
    let (pts, dim) = real_points(config);
    let mut filter = constraint.filter(config.len(), opts.canonical)?;
    filter.allowed = allowed;
    let usable = filter.allowed.iter().filter(|&&a| a).count();
    let guarantee = opts.guarantee.clone().or_else(|| {
        (opts.auto_guarantee && matches!(constraint, SearchConstraint::None) && usable > (r - 1) * (dim + 1))
            .then(|| format!("linear Tverberg: {usable} points in R^{dim} with r = {r}"))
    });
    let mut calls = 0;
    let found = with_threads(opts.threads, || {
        let mut stream = Stream::new(filter, r);
        first_feasible(&pts, r, &mut stream, opts.gate, &mut calls)
    })?;
    finish(found, r, &pts, constraint, guarantee)
}

fn finish(
    found: Option<(Vec<Vec<usize>>, WeightWitness)>,
    r: usize,
    pts: &[Vec<Rational>],
    constraint: &SearchConstraint,
    guarantee: Option<String>,
) -> Result<Option<TverbergTuple>> {
    match found {
        Some((parts, witness)) => {
            let t = TverbergTuple { r, parts, witness };
            t.validate(pts)?;
            if !constraint.admits(&t.parts) {
                return Err(Error::verify("emitted tuple violates its constraint"));
            }
            Ok(Some(t))
        }
        None => match guarantee {
            Some(g) => Err(Error::GuaranteeViolation(format!("search exhausted although guaranteed ({g})"))),
            None => Ok(None),
        },
    }
}

/// Rainbow search: every part takes at most one index per color class.
pub fn search_colored_tuple(
    config: &PointConfig,
    r: usize,
    coloring: &[usize],
    opts: &SearchOptions,
) -> Result<Option<TverbergTuple>> {
    let allowed = prepare(config, r, opts)?;
    check_coloring(coloring, config.len())?;
    let m = coloring.iter().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0usize; m];
    for (i, &c) in coloring.iter().enumerate() {
        if allowed[i] {
            sizes[c] += 1;
        }
    }
    if let Some(k) = sizes.iter().position(|&s| s < r) {
        return Err(Error::pre(format!("color class {k} has {} < r = {r} points", sizes[k])));
    }
    let (_, dim) = real_points(config);
    let usable: usize = sizes.iter().sum();
    let mut o = opts.clone();
    o.allowed = Some(allowed);
    if o.guarantee.is_none() && o.auto_guarantee && is_prime(r as u64 + 1) && m == dim + 1 && usable >= r * (dim + 1) {
        o.guarantee = Some(format!("optimal colored Tverberg: r = {r}, {m} classes in R^{dim}"));
    }
    search_tuple(
        config,
        r,
        &SearchConstraint::Rainbow {
            coloring: coloring.to_vec(),
        },
        &o,
    )
}

/// Set partitions of `0..k` into exactly r blocks as restricted growth
/// strings, in lexicographic order.
struct Partitions {
    word: Vec<usize>,
    r: usize,
    done: bool,
}

impl Partitions {
    fn new(k: usize, r: usize) -> Self {
        // Smallest string using every label: 0…0 1 2 … r−1.
        let mut word = vec![0; k];
        let done = k < r || r == 0;
        if !done {
            for (j, w) in word.iter_mut().skip(k - r).enumerate() {
                *w = j;
            }
        }
        Partitions { word, r, done }
    }

    fn step(&mut self) -> bool {
        let k = self.word.len();
        let mut prefix_max = vec![0; k];
        for i in 1..k {
            prefix_max[i] = prefix_max[i - 1].max(self.word[i - 1]);
        }
        for i in (1..k).rev() {
            while self.word[i] < (prefix_max[i] + 1).min(self.r - 1) {
                self.word[i] += 1;
                let mut top = prefix_max[i].max(self.word[i]);
                // Fill the tail minimally while still reaching label r−1.
                for j in i + 1..k {
                    let need = self.r - 1 - top;
                    self.word[j] = if k - j <= need { top + 1 } else { 0 };
                    top = top.max(self.word[j]);
                }
                if top == self.r - 1 {
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.word.clone();
        self.done = !self.step();
        Some(out)
    }
}

/// Proper tuple inside the allowed indices, found by testing every
/// partition of them into r blocks for meeting convex hulls. Existence is
/// equivalent to `search_tuple` without a constraint, with far fewer LPs.
pub fn search_covering_tuple(config: &PointConfig, r: usize, opts: &SearchOptions) -> Result<Option<TverbergTuple>> {
    let allowed = prepare(config, r, opts)?;
    let (pts, _) = real_points(config);
    let idx: Vec<usize> = (0..config.len()).filter(|&i| allowed[i]).collect();
    let mut stream = Partitions::new(idx.len(), r);
    let mut calls = 0u64;
    let found = with_threads(opts.threads, || -> Result<_> {
        loop {
            let budget = opts.gate.saturating_sub(calls);
            let chunk: Vec<Vec<usize>> = stream.by_ref().take(CHUNK.min(budget as usize)).collect();
            if chunk.is_empty() {
                if budget == 0 && stream.next().is_some() {
                    return Err(Error::gate("LP calls", opts.gate));
                }
                return Ok(None);
            }
            calls += chunk.len() as u64;
            let hit = chunk.par_iter().find_map_first(|w| {
                let mut parts = vec![Vec::new(); r];
                for (k, &label) in w.iter().enumerate() {
                    parts[label].push(idx[k]);
                }
                crate::feaslp::meeting_hulls(&pts, &parts)
            });
            if hit.is_some() {
                return Ok(hit);
            }
        }
    })?;
    finish(found, r, &pts, &SearchConstraint::None, None)
}

/// Sequential reference: every proper candidate satisfying the constraint
/// (used by oracles and tests; no gate).
pub fn all_proper_tuples(config: &PointConfig, r: usize, constraint: &SearchConstraint) -> Result<Vec<TverbergTuple>> {
    let (pts, _) = real_points(config);
    let filter = constraint.filter(config.len(), true)?;
    let mut out = Vec::new();
    for w in Stream::new(filter, r) {
        let parts = word_to_parts(&w, r);
        if let Some(witness) = proper_weights(&ProperWeightProblem { points: &pts, parts: &parts }) {
            out.push(TverbergTuple { r, parts, witness });
        }
    }
    Ok(out)
}
