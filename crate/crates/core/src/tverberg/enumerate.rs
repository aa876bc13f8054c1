//! Candidate streams.
//!
//! A candidate is an assignment word w ∈ {0..r}^n (0 = leftover) with every
//! part nonempty. Words are produced in increasing order of Σ w_i (r+1)^i, so
//! the highest index is the most significant digit and the search assigns
//! positions from n−1 down to 0.

/// Pruning data shared by every search.
#[derive(Clone, Debug)]
pub(crate) struct Filter {
    pub allowed: Vec<bool>,
    /// Group id per position; caps bound the count of each group in a part.
    pub group: Vec<usize>,
    pub caps: Option<Vec<usize>>,
    /// Members no part may contain.
    pub family: Vec<u128>,
    pub canonical: bool,
}

impl Filter {
    pub fn plain(n: usize, canonical: bool) -> Self {
        Filter {
            allowed: vec![true; n],
            group: vec![0; n],
            caps: None,
            family: Vec::new(),
            canonical,
        }
    }
}

pub(crate) struct Stream {
    f: Filter,
    n: usize,
    r: usize,
    ngroups: usize,
    word: Vec<u8>,
    next_sym: Vec<u8>,
    depth: usize,
    masks: Vec<u128>,
    counts: Vec<usize>,
    by_min: Vec<Vec<u128>>,
    allowed_below: Vec<usize>,
    done: bool,
}

impl Stream {
    pub fn new(f: Filter, r: usize) -> Self {
        let n = f.allowed.len();
        assert!(n <= 128, "at most 128 points");
        assert!((1..255).contains(&r));
        let ngroups = f.group.iter().max().map_or(1, |g| g + 1);
        let mut by_min = vec![Vec::new(); n];
        let allowed_mask = (0..n).filter(|&i| f.allowed[i]).fold(0u128, |m, i| m | 1u128 << i);
        for &m in &f.family {
            if m != 0 && m & !allowed_mask == 0 {
                by_min[m.trailing_zeros() as usize].push(m);
            }
        }
        let mut allowed_below = vec![0; n];
        for p in 1..n {
            allowed_below[p] = allowed_below[p - 1] + usize::from(f.allowed[p - 1]);
        }
        let total_allowed = f.allowed.iter().filter(|&&a| a).count();
        Stream {
            f,
            n,
            r,
            ngroups,
            word: vec![0; n],
            next_sym: vec![0; n + 1],
            depth: 0,
            masks: vec![0; r + 1],
            counts: vec![0; (r + 1) * ngroups],
            by_min,
            allowed_below,
            done: n == 0 || total_allowed < r,
        }
    }

    fn empties_ok(&self, p: usize) -> bool {
        let empties = self.masks[1..].iter().filter(|&&m| m == 0).count();
        empties <= self.allowed_below[p]
    }

    fn assign(&mut self, p: usize, s: u8) -> bool {
        if s == 0 {
            self.word[p] = 0;
            return self.empties_ok(p);
        }
        if !self.f.allowed[p] {
            return false;
        }
        let s = s as usize;
        let g = self.f.group[p];
        if let Some(caps) = &self.f.caps {
            if self.counts[s * self.ngroups + g] >= caps[g] {
                return false;
            }
        }
        let mask = self.masks[s] | 1u128 << p;
        if self.by_min[p].iter().any(|&m| m & !mask == 0) {
            return false;
        }
        self.counts[s * self.ngroups + g] += 1;
        self.masks[s] = mask;
        self.word[p] = s as u8;
        if !self.empties_ok(p) {
            self.undo(p);
            return false;
        }
        true
    }

    fn undo(&mut self, p: usize) {
        let s = self.word[p] as usize;
        if s > 0 {
            self.counts[s * self.ngroups + self.f.group[p]] -= 1;
            self.masks[s] &= !(1u128 << p);
        }
        self.word[p] = 0;
    }

    fn leaf_ok(&self) -> bool {
        if self.masks[1..].contains(&0) {
            return false;
        }
        !self.f.canonical
            || self.masks[1..]
                .windows(2)
                .all(|w| w[0].trailing_zeros() < w[1].trailing_zeros())
    }

    fn max_sym(&self, p: usize) -> u8 {
        if self.f.allowed[p] {
            self.r as u8
        } else {
            0
        }
    }
}

impl Iterator for Stream {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        loop {
            if self.done {
                return None;
            }
            if self.depth == self.n {
                let ok = self.leaf_ok();
                let out = ok.then(|| self.word.clone());
                self.depth -= 1;
                self.undo(0);
                if out.is_some() {
                    return out;
                }
                continue;
            }
            let p = self.n - 1 - self.depth;
            let s = self.next_sym[self.depth];
            if s > self.max_sym(p) {
                if self.depth == 0 {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
                self.undo(self.n - 1 - self.depth);
                continue;
            }
            self.next_sym[self.depth] = s + 1;
            if self.assign(p, s) {
                self.depth += 1;
                self.next_sym[self.depth] = 0;
            }
        }
    }
}

/// Parts (sorted index lists) of an assignment word.
pub(crate) fn word_to_parts(word: &[u8], r: usize) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); r];
    for (i, &s) in word.iter().enumerate() {
        if s > 0 {
            parts[s as usize - 1].push(i);
        }
    }
    parts
}
