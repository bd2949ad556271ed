//! Include/exclude branch and bound over box points that tracks the
//! palette of the chosen set and prunes once it would exceed `s`.
//!
//! Pruning uses three bounds: chosen + remaining candidates; an anchor
//! bound (all later points sit at a palette distance from every chosen
//! point, so from any anchor at most `s` distance classes are usable); and,
//! once the palette is full, a colouring bound through the clique solver.

use super::bitset::Bitset;
use super::clique::{lex_first_clique, max_clique_above, CliqueGraph, Meter};
use super::instance::SearchInstance;
use super::strategy::next_combination;

/// Completion counts up to which the candidate distances are scanned, and
/// up to which completions are enumerated instead of branching.
const COMPLETION_SCAN: u64 = 1 << 12;
const COMPLETION_LIMIT: u64 = 64;

/// `C(n, k)`, saturating at `u64::MAX`.
fn binomial_capped(n: usize, k: usize) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Candidate points with, for each, the distances to chosen points not yet
/// in the palette, stored back to back.
#[derive(Clone, Debug, Default)]
struct Cands {
    vs: Vec<usize>,
    ends: Vec<u32>,
    fresh: Vec<u32>,
}

impl Cands {
    fn len(&self) -> usize {
        self.vs.len()
    }

    fn is_empty(&self) -> bool {
        self.vs.is_empty()
    }

    fn clear(&mut self) {
        self.vs.clear();
        self.ends.clear();
        self.fresh.clear();
    }

    fn fresh(&self, i: usize) -> &[u32] {
        let lo = if i == 0 { 0 } else { self.ends[i - 1] as usize };
        &self.fresh[lo..self.ends[i] as usize]
    }

    fn pending(&self) -> &[u32] {
        &self.fresh[self.ends.last().map_or(0, |&e| e as usize)..]
    }

    /// Pushes `d` onto the pending list unless it is already there.
    fn note(&mut self, d: u32) {
        if !self.pending().contains(&d) {
            self.fresh.push(d);
        }
    }

    /// Keeps the pending list as candidate `v` if it has at most `free`
    /// entries, and drops it otherwise.
    fn commit(&mut self, v: usize, free: usize) {
        if self.pending().len() <= free {
            self.vs.push(v);
            self.ends.push(self.fresh.len() as u32);
        } else {
            self.fresh.truncate(self.ends.last().map_or(0, |&e| e as usize));
        }
    }
}

pub(crate) struct DynamicSearch<'a> {
    inst: &'a SearchInstance,
    s: usize,
    best: usize,
    best_set: Option<Vec<usize>>,
    lex: bool,
    done: bool,
    counts: Vec<u32>,
    touched: Vec<u32>,
    outside: Vec<u32>,
    pools: Vec<Cands>,
}

impl<'a> DynamicSearch<'a> {
    /// Searches for a set larger than `floor`, keeping the largest found.
    pub fn above(inst: &'a SearchInstance, s: usize, floor: usize) -> Self {
        DynamicSearch {
            inst,
            s,
            best: floor,
            best_set: None,
            lex: false,
            done: false,
            counts: vec![0; inst.palette_len()],
            touched: Vec::new(),
            outside: Vec::new(),
            pools: Vec::new(),
        }
    }

    /// Searches for the lexicographically first set of exactly `size` points.
    pub fn lex_first(inst: &'a SearchInstance, s: usize, size: usize) -> Self {
        let mut d = DynamicSearch::above(inst, s, size.saturating_sub(1));
        d.lex = true;
        d
    }

    /// Largest (or, in lex mode, first) admissible set containing `fixed`
    /// and otherwise drawn from `allowed` (ascending).
    pub fn run(mut self, fixed: &[usize], allowed: &[usize], meter: &mut Meter) -> Option<Vec<usize>> {
        let mut palette = Bitset::new(self.inst.palette_len());
        let mut used = 0;
        for (k, &a) in fixed.iter().enumerate() {
            for &b in &fixed[k + 1..] {
                let d = self.inst.dist(a, b) as usize;
                if !palette.contains(d) {
                    palette.insert(d);
                    used += 1;
                }
            }
        }
        if used > self.s {
            return None;
        }
        let free = self.s - used;
        let mut cands = Cands::default();
        for &v in allowed.iter().filter(|v| !fixed.contains(v)) {
            for &f in fixed {
                let d = self.inst.dist(v, f);
                if !palette.contains(d as usize) {
                    cands.note(d);
                }
            }
            cands.commit(v, free);
        }
        let mut chosen = fixed.to_vec();
        self.expand(&mut chosen, &palette, used, &cands, meter);
        self.best_set
    }

    fn record(&mut self, mut set: Vec<usize>) {
        set.sort_unstable();
        self.best = set.len();
        self.best_set = Some(set);
        if self.lex {
            self.done = true;
        }
    }

    /// Upper bound on the number of candidates that can join, taken over
    /// every chosen point as anchor.
    fn anchor_bound(&mut self, chosen: &[usize], palette: &Bitset, free: usize, cands: &Cands) -> usize {
        let mut bound = cands.len();
        for &a in chosen {
            let mut inside = 0;
            for &v in &cands.vs {
                let d = self.inst.dist(a, v);
                if palette.contains(d as usize) {
                    inside += 1;
                } else {
                    if self.counts[d as usize] == 0 {
                        self.touched.push(d);
                    }
                    self.counts[d as usize] += 1;
                }
            }
            let outside = &mut self.outside;
            outside.clear();
            outside.extend(self.touched.iter().map(|&d| self.counts[d as usize]));
            for &d in &self.touched {
                self.counts[d as usize] = 0;
            }
            self.touched.clear();
            let top: usize = if outside.len() > free {
                outside.select_nth_unstable_by(free, |x, y| y.cmp(x));
                outside[..free].iter().map(|&x| x as usize).sum()
            } else {
                outside.iter().map(|&x| x as usize).sum()
            };
            bound = bound.min(inside + top);
            if chosen.len() + bound <= self.best {
                break;
            }
        }
        bound
    }

    fn expand(&mut self, chosen: &mut Vec<usize>, palette: &Bitset, used: usize, cands: &Cands, meter: &mut Meter) {
        if !meter.tick() {
            return;
        }
        let size = chosen.len();
        if size > self.best {
            self.record(chosen.clone());
            if self.done {
                return;
            }
        }
        if cands.is_empty() || size + cands.len() <= self.best {
            return;
        }
        let free = self.s - used;
        if free == 0 {
            self.finish_with_clique(chosen, palette, cands, meter);
            return;
        }
        if size + self.anchor_bound(chosen, palette, free, cands) <= self.best {
            return;
        }
        if let Some(missing) = self.few_completions(palette, used, cands) {
            self.finish_by_completion(chosen, palette, &missing, cands, meter);
            return;
        }

        if self.pools.len() <= size {
            self.pools.resize_with(size + 1, Cands::default);
        }
        let mut next = std::mem::take(&mut self.pools[size]);
        for idx in 0..cands.len() {
            if size + (cands.len() - idx) <= self.best {
                break;
            }
            let v = cands.vs[idx];
            let mut child_palette = palette.clone();
            for &d in cands.fresh(idx) {
                child_palette.insert(d as usize);
            }
            let child_used = used + cands.fresh(idx).len();
            let child_free = self.s - child_used;
            next.clear();
            for j in idx + 1..cands.len() {
                for &d in cands.fresh(j) {
                    if !child_palette.contains(d as usize) {
                        next.fresh.push(d);
                    }
                }
                let d = self.inst.dist(cands.vs[j], v);
                if !child_palette.contains(d as usize) {
                    next.note(d);
                }
                next.commit(cands.vs[j], child_free);
            }
            chosen.push(v);
            self.expand(chosen, &child_palette, child_used, &next, meter);
            chosen.pop();
            if self.done || meter.aborted {
                break;
            }
        }
        self.pools[size] = next;
    }

    /// Distances outside the palette that occur among candidates, when the
    /// ways of completing the palette with them are few enough to try each.
    fn few_completions(&self, palette: &Bitset, used: usize, cands: &Cands) -> Option<Vec<u32>> {
        let free = self.s - used;
        if binomial_capped(self.inst.palette_len() - used, free) > COMPLETION_SCAN {
            return None;
        }
        let mut seen = Bitset::new(self.inst.palette_len());
        for (i, &v) in cands.vs.iter().enumerate() {
            for &d in cands.fresh(i) {
                seen.insert(d as usize);
            }
            for &w in &cands.vs[i + 1..] {
                seen.insert(self.inst.dist(v, w) as usize);
            }
        }
        seen.difference_with(palette);
        let missing: Vec<u32> = seen.iter().map(|d| d as u32).collect();
        (binomial_capped(missing.len(), free.min(missing.len())) <= COMPLETION_LIMIT).then_some(missing)
    }

    /// Tries every completion of the palette by `free` of the `missing`
    /// distances (all of them if there are fewer) as a clique problem.
    fn finish_by_completion(
        &mut self,
        chosen: &[usize],
        palette: &Bitset,
        missing: &[u32],
        cands: &Cands,
        meter: &mut Meter,
    ) {
        let k = (self.s - palette.count()).min(missing.len());
        let mut combo: Vec<usize> = (0..k).collect();
        let size = chosen.len();
        let mut lex_best: Option<Vec<usize>> = None;
        loop {
            let mut full = palette.clone();
            for &i in &combo {
                full.insert(missing[i] as usize);
            }
            let sub: Vec<usize> = (0..cands.len())
                .filter(|&i| cands.fresh(i).iter().all(|&d| full.contains(d as usize)))
                .map(|i| cands.vs[i])
                .collect();
            if size + sub.len() > self.best {
                let inst = self.inst;
                let g = CliqueGraph::new(sub.len(), |i, j| full.contains(inst.dist(sub[i], sub[j]) as usize));
                if self.lex {
                    if let Some(c) = lex_first_clique(&g, self.best + 1 - size, meter) {
                        let mut set = chosen.to_vec();
                        set.extend(c.into_iter().map(|i| sub[i]));
                        set.sort_unstable();
                        if lex_best.as_ref().map_or(true, |b| set < *b) {
                            lex_best = Some(set);
                        }
                    }
                } else if let Some(c) = max_clique_above(&g, self.best - size, meter) {
                    let mut set = chosen.to_vec();
                    set.extend(c.into_iter().map(|i| sub[i]));
                    self.record(set);
                }
            }
            if meter.aborted || !next_combination(&mut combo, missing.len()) {
                break;
            }
        }
        if let Some(set) = lex_best {
            self.record(set);
        }
    }

    fn finish_with_clique(&mut self, chosen: &[usize], palette: &Bitset, cands: &Cands, meter: &mut Meter) {
        let inst = self.inst;
        let vs = &cands.vs;
        let g = CliqueGraph::new(vs.len(), |i, j| palette.contains(inst.dist(vs[i], vs[j]) as usize));
        let size = chosen.len();
        let found = if self.lex {
            lex_first_clique(&g, self.best + 1 - size, meter)
        } else {
            max_clique_above(&g, self.best - size, meter)
        };
        if let Some(clique) = found {
            let mut set = chosen.to_vec();
            set.extend(clique.into_iter().map(|i| vs[i]));
            self.record(set);
        }
    }
}
