//! Search strategies: each one splits the problem into an ordered stream of
//! independent tasks. The engine runs the stream in fixed-size waves.

use std::collections::BTreeMap;

use super::bitset::Bitset;
use super::clique::{max_clique_above, CliqueGraph, Meter};
use super::dynamic::DynamicSearch;
use super::instance::{orbit_classes, SearchInstance, Symmetry};
use crate::error::{Error, Result};

/// One subproblem: the best set containing `fixed`, with the remaining
/// points drawn from `allowed`. With a palette, every pair must be at a
/// palette distance; without one, the palette is discovered while searching.
pub(crate) struct Task {
    pub fixed: Vec<usize>,
    pub allowed: Vec<usize>,
    pub palette: Option<Bitset>,
}

impl Task {
    /// Best set larger than `floor` within this task, if any.
    pub fn run(&self, inst: &SearchInstance, s: usize, floor: usize, meter: &mut Meter) -> Option<Vec<usize>> {
        if self.fixed.len() + self.allowed.len() <= floor {
            return None;
        }
        match &self.palette {
            None => DynamicSearch::above(inst, s, floor).run(&self.fixed, &self.allowed, meter),
            Some(palette) => {
                let g = CliqueGraph::new(self.allowed.len(), |i, j| {
                    palette.contains(inst.dist(self.allowed[i], self.allowed[j]) as usize)
                });
                let clique = max_clique_above(&g, floor.saturating_sub(self.fixed.len()), meter)?;
                let mut set = self.fixed.clone();
                set.extend(clique.into_iter().map(|i| self.allowed[i]));
                set.sort_unstable();
                (set.len() > floor).then_some(set)
            }
        }
    }
}

/// Lazily produced, canonically ordered task list.
pub(crate) trait TaskStream {
    /// Up to `limit` further tasks; tasks that cannot beat `floor` may be
    /// dropped. An empty result means the stream is exhausted.
    fn next_wave(&mut self, floor: usize, limit: usize) -> Vec<Task>;
}

/// A way of covering the search space of `search_max`.
pub(crate) trait SearchStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn tasks<'a>(&self, inst: &'a SearchInstance, s: usize, symmetry: bool) -> Box<dyn TaskStream + 'a>;
}

/// Strategies by name.
pub(crate) struct StrategyRegistry {
    strategies: BTreeMap<&'static str, Box<dyn SearchStrategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry { strategies: BTreeMap::new() };
        r.register(Box::new(DynamicPalette));
        r.register(Box::new(EnumeratePalettes));
        r
    }
}

impl StrategyRegistry {
    pub fn register(&mut self, strategy: Box<dyn SearchStrategy>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<&dyn SearchStrategy> {
        self.strategies
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }
}

/// Orbit classes of the box points, in label order.
fn point_classes(inst: &SearchInstance, symmetry: bool) -> (Symmetry, Vec<Vec<usize>>) {
    let bx = inst.bounding_box();
    let sym = if symmetry { Symmetry::detect(bx) } else { Symmetry::trivial(bx) };
    let classes = orbit_classes(&sym.orbits(bx, inst.len()));
    (sym, classes)
}

/// Points of classes `from..`, ascending, without `skip`.
fn union_from(classes: &[Vec<usize>], from: usize, skip: usize) -> Vec<usize> {
    let mut out: Vec<usize> = classes[from..].iter().flatten().copied().filter(|&v| v != skip).collect();
    out.sort_unstable();
    out
}

/// 1 + the `s` largest distance-class sizes seen from `anchor`.
fn anchor_cap(inst: &SearchInstance, s: usize, anchor: usize, others: &[usize]) -> usize {
    let mut counts = vec![0usize; inst.palette_len()];
    for &v in others {
        counts[inst.dist(anchor, v) as usize] += 1;
    }
    counts.sort_unstable_by(|a, b| b.cmp(a));
    1 + counts.iter().take(s).sum::<usize>()
}

/// Branch and bound with the palette grown along the way. Symmetry is broken
/// twice: the least orbit met by a solution is mapped to its representative,
/// then the same is done for the stabilizer of that representative.
pub(crate) struct DynamicPalette;

impl SearchStrategy for DynamicPalette {
    fn name(&self) -> &'static str {
        "dynamic"
    }

    fn tasks<'a>(&self, inst: &'a SearchInstance, s: usize, symmetry: bool) -> Box<dyn TaskStream + 'a> {
        let (sym, classes) = point_classes(inst, symmetry);
        Box::new(DynamicStream { inst, s, sym, classes, next_class: 0, pending: Vec::new() })
    }
}

struct DynamicStream<'a> {
    inst: &'a SearchInstance,
    s: usize,
    sym: Symmetry,
    classes: Vec<Vec<usize>>,
    next_class: usize,
    /// Second-level tasks of the current representative, reversed.
    pending: Vec<Task>,
}

impl DynamicStream<'_> {
    fn split(&mut self, i: usize, floor: usize) {
        let rep = self.classes[i][0];
        let allowed = union_from(&self.classes, i, rep);
        if 1 + allowed.len() <= floor || anchor_cap(self.inst, self.s, rep, &allowed) <= floor {
            return;
        }
        let labels = self.sym.stabilizer_orbits(self.inst.bounding_box(), self.inst.len(), rep);
        let mut inside = vec![false; self.inst.len()];
        for &v in &allowed {
            inside[v] = true;
        }
        let sub: Vec<Vec<usize>> = orbit_classes(&labels)
            .into_iter()
            .filter(|c| inside[c[0]])
            .collect();
        let mut remaining = allowed.len();
        let mut tasks = Vec::new();
        for j in 0..sub.len() {
            let second = sub[j][0];
            if 1 + remaining > floor {
                tasks.push(Task { fixed: vec![rep, second], allowed: union_from(&sub, j, second), palette: None });
            }
            remaining -= sub[j].len();
        }
        tasks.reverse();
        self.pending = tasks;
    }
}

impl TaskStream for DynamicStream<'_> {
    fn next_wave(&mut self, floor: usize, limit: usize) -> Vec<Task> {
        let mut wave = Vec::new();
        while wave.len() < limit {
            if let Some(t) = self.pending.pop() {
                wave.push(t);
                continue;
            }
            if self.next_class >= self.classes.len() {
                break;
            }
            let i = self.next_class;
            self.next_class += 1;
            self.split(i, floor);
        }
        wave
    }
}

/// For every `s`-subset of the global palette, a maximum clique in the
/// graph of pairs at those distances.
pub(crate) struct EnumeratePalettes;

impl SearchStrategy for EnumeratePalettes {
    fn name(&self) -> &'static str {
        "enumerate-palettes"
    }

    fn tasks<'a>(&self, inst: &'a SearchInstance, s: usize, symmetry: bool) -> Box<dyn TaskStream + 'a> {
        let (_, classes) = point_classes(inst, symmetry);
        let k = s.min(inst.palette_len());
        Box::new(PaletteStream {
            inst,
            classes,
            combo: Some((0..k).collect()),
            next_class: 0,
        })
    }
}

/// Tasks for one fixed palette: one per orbit representative.
pub(crate) fn palette_tasks(
    inst: &SearchInstance,
    classes: &[Vec<usize>],
    palette: &Bitset,
    floor: usize,
    range: std::ops::Range<usize>,
) -> Vec<Task> {
    range
        .filter_map(|i| {
            let rep = classes[i][0];
            let allowed: Vec<usize> = union_from(classes, i, rep)
                .into_iter()
                .filter(|&v| palette.contains(inst.dist(rep, v) as usize))
                .collect();
            (1 + allowed.len() > floor).then(|| Task { fixed: vec![rep], allowed, palette: Some(palette.clone()) })
        })
        .collect()
}

struct PaletteStream<'a> {
    inst: &'a SearchInstance,
    classes: Vec<Vec<usize>>,
    combo: Option<Vec<usize>>,
    next_class: usize,
}

/// Advances `c` to the next `c.len()`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl TaskStream for PaletteStream<'_> {
    fn next_wave(&mut self, floor: usize, limit: usize) -> Vec<Task> {
        let mut wave = Vec::new();
        while wave.len() < limit {
            let Some(combo) = &mut self.combo else { break };
            let mut palette = Bitset::new(self.inst.palette_len());
            for &d in combo.iter() {
                palette.insert(d);
            }
            let end = (self.next_class + (limit - wave.len())).min(self.classes.len());
            wave.extend(palette_tasks(self.inst, &self.classes, &palette, floor, self.next_class..end));
            self.next_class = end;
            if end == self.classes.len() {
                self.next_class = 0;
                if !next_combination(combo, self.inst.palette_len()) {
                    self.combo = None;
                }
            }
        }
        wave
    }
}
