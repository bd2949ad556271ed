//! Maximum clique by branch and bound with greedy-colouring bounds over
//! bitsets.

use std::time::Instant;

use super::bitset::Bitset;

/// Node counter with a cap and an optional wall-clock deadline.
pub(crate) struct Meter {
    pub nodes: u64,
    cap: u64,
    deadline: Option<Instant>,
    pub aborted: bool,
}

impl Meter {
    pub fn new(cap: u64, deadline: Option<Instant>) -> Self {
        Meter { nodes: 0, cap, deadline, aborted: false }
    }

    /// Counts a node; false once a budget is exhausted.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if self.aborted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            self.aborted = true;
        } else if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.aborted = true;
                }
            }
        }
        !self.aborted
    }
}

/// Graph on `0..k` as adjacency bitsets.
pub(crate) struct CliqueGraph {
    adj: Vec<Bitset>,
}

impl CliqueGraph {
    pub fn new(k: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = vec![Bitset::new(k); k];
        for i in 0..k {
            for j in i + 1..k {
                if edge(i, j) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        CliqueGraph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    /// Greedy sequential colouring of `p` in vertex order; returns
    /// `(vertex, colour)` with colours non-decreasing.
    fn colour(&self, p: &Bitset) -> Vec<(usize, usize)> {
        let mut uncoloured = p.clone();
        let mut out = Vec::with_capacity(p.count());
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                uncoloured.remove(v);
                q.remove(v);
                q.difference_with(&self.adj[v]);
                out.push((v, colour));
            }
        }
        out
    }

    fn colour_count(&self, p: &Bitset) -> usize {
        self.colour(p).last().map_or(0, |&(_, c)| c)
    }
}

/// Largest clique strictly larger than `floor`, if any; `None` when the
/// graph has no clique above `floor` (or the meter ran out first).
pub(crate) fn max_clique_above(g: &CliqueGraph, floor: usize, meter: &mut Meter) -> Option<Vec<usize>> {
    let k = g.len();
    if k <= floor {
        return None;
    }
    // relabel by non-increasing degree, ties by index
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut pos = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let relabeled = CliqueGraph {
        adj: order
            .iter()
            .map(|&old| {
                let mut b = Bitset::new(k);
                for u in g.adj[old].iter() {
                    b.insert(pos[u]);
                }
                b
            })
            .collect(),
    };
    let mut state = Bbmc { g: &relabeled, best: floor, best_clique: None, current: Vec::new() };
    state.expand(Bitset::full(k), meter);
    state
        .best_clique
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| order[v]).collect();
            c.sort_unstable();
            c
        })
}

struct Bbmc<'a> {
    g: &'a CliqueGraph,
    best: usize,
    best_clique: Option<Vec<usize>>,
    current: Vec<usize>,
}

impl Bbmc<'_> {
    fn expand(&mut self, mut p: Bitset, meter: &mut Meter) {
        if !meter.tick() {
            return;
        }
        let coloured = self.g.colour(&p);
        for &(v, colour) in coloured.iter().rev() {
            if self.current.len() + colour <= self.best {
                return;
            }
            self.current.push(v);
            let next = p.intersection(&self.g.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best {
                    self.best = self.current.len();
                    self.best_clique = Some(self.current.clone());
                }
            } else {
                self.expand(next, meter);
            }
            self.current.pop();
            p.remove(v);
            if meter.aborted {
                return;
            }
        }
    }
}

/// Lexicographically first clique of exactly `size` vertices (in vertex
/// order), if one exists.
pub(crate) fn lex_first_clique(g: &CliqueGraph, size: usize, meter: &mut Meter) -> Option<Vec<usize>> {
    let mut current = Vec::with_capacity(size);
    if lex_expand(g, Bitset::full(g.len()), size, &mut current, meter) {
        Some(current)
    } else {
        None
    }
}

fn lex_expand(g: &CliqueGraph, mut p: Bitset, need: usize, current: &mut Vec<usize>, meter: &mut Meter) -> bool {
    if need == 0 {
        return true;
    }
    if !meter.tick() || p.count() < need || g.colour_count(&p) < need {
        return false;
    }
    while let Some(v) = p.first() {
        if p.count() < need {
            return false;
        }
        p.remove(v);
        current.push(v);
        let next = p.intersection(&g.adj[v]);
        if lex_expand(g, next, need - 1, current, meter) {
            return true;
        }
        current.pop();
        if meter.aborted {
            return false;
        }
    }
    false
}
