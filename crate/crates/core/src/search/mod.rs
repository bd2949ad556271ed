//! Exact and anytime search for the largest s-distance subset of a box.
//!
//! The search runs in two phases. The first finds the maximum size: a
//! strategy splits the problem into canonically ordered tasks, which run in
//! fixed-size waves, each task seeded with the best size known when its wave
//! started. The second phase (exact mode only) finds the lexicographically
//! least set of that size. Results do not depend on the worker count.

mod bitset;
mod clique;
mod dynamic;
mod instance;
mod strategy;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{count_monomials, main_theorem_bound};
use crate::error::{Error, Result};
use crate::geometry::{distance_palette, CoordBox, PointSet, Scalar, SquaredDistancePalette};
use crate::witness::biguint_string;

use bitset::Bitset;
use clique::{lex_first_clique, CliqueGraph, Meter};
use dynamic::DynamicSearch;
pub use instance::{SearchInstance, MAX_SEARCH_POINTS};
use strategy::{palette_tasks, StrategyRegistry, Task, TaskStream};

/// Tasks per wave. Fixed so that results do not depend on the worker count.
const WAVE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Anytime,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub node_budget: u64,
    /// Wall-clock limit in seconds; `None` for unlimited.
    pub time_budget: Option<f64>,
    pub symmetry_reduction: bool,
    /// `"dynamic"` or `"enumerate-palettes"`.
    pub palette_mode: String,
    pub worker_count: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::Exact,
            node_budget: u64::MAX,
            time_budget: None,
            symmetry_reduction: true,
            palette_mode: "dynamic".to_string(),
            worker_count: 1,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.node_budget == 0 {
            return Err(Error::InvalidParameter("node_budget must be positive".into()));
        }
        if let Some(t) = self.time_budget {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter("time_budget must be positive".into()));
            }
        }
        if self.worker_count == 0 {
            return Err(Error::InvalidParameter("worker_count must be positive".into()));
        }
        Ok(())
    }

    fn deadline(&self) -> Option<Instant> {
        self.time_budget.map(|t| Instant::now() + Duration::from_secs_f64(t))
    }
}

/// Names accepted for [`SearchConfig::palette_mode`].
pub fn palette_modes() -> Vec<&'static str> {
    StrategyRegistry::default().names()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub s: usize,
    pub best_size: usize,
    pub witness: PointSet,
    /// True only when an exact search ran to completion.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub palette_of_witness: SquaredDistancePalette,
}

/// Every squared distance between distinct points of `bx`.
pub fn global_palette(bx: &CoordBox) -> SquaredDistancePalette {
    let mut sums: BTreeSet<Scalar> = BTreeSet::from([Scalar::zero()]);
    for set in bx.coord_sets() {
        let mut gaps: BTreeSet<Scalar> = BTreeSet::new();
        for (k, a) in set.iter().enumerate() {
            for b in &set[..=k] {
                gaps.insert((a - b).square());
            }
        }
        sums = sums.iter().flat_map(|x| gaps.iter().map(move |g| x + g)).collect();
    }
    sums.remove(&Scalar::zero());
    SquaredDistancePalette::from_values(sums).expect("positive values")
}

/// Largest subset of `bx` with at most `s` distinct distances.
pub fn search_max(bx: &CoordBox, s: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    search_instance(&SearchInstance::new(bx)?, s, cfg)
}

/// As [`search_max`], reusing a precomputed instance.
pub fn search_instance(inst: &SearchInstance, s: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    if s == 0 {
        return Err(Error::InvalidParameter("s must be at least 1".into()));
    }
    let registry = StrategyRegistry::default();
    let strategy = registry.get(&cfg.palette_mode)?;
    let m = inst.len();
    if s >= inst.palette_len() {
        return finish(inst, s, (0..m).collect(), cfg.mode == SearchMode::Exact, 0);
    }
    let seed = greedy_seed(inst, s);
    let stream = strategy.tasks(inst, s, cfg.symmetry_reduction);
    let deadline = cfg.deadline();
    let phase1 = run_waves(inst, s, stream, seed, cfg, deadline)?;
    let exact = cfg.mode == SearchMode::Exact && phase1.complete;
    let mut nodes = phase1.nodes;
    let mut best = phase1.best;
    if exact {
        let mut meter = Meter::new(cfg.node_budget.saturating_sub(nodes).max(1), deadline);
        let all: Vec<usize> = (0..m).collect();
        let found = DynamicSearch::lex_first(inst, s, best.len()).run(&[], &all, &mut meter);
        nodes += meter.nodes;
        if let Some(w) = found {
            best = w;
        }
    }
    finish(inst, s, best, exact, nodes)
}

/// Largest subset of `bx` whose pairwise squared distances all lie in
/// `palette`.
pub fn max_clique_for_palette(
    bx: &CoordBox,
    palette: &SquaredDistancePalette,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    let inst = SearchInstance::new(bx)?;
    let global = inst.palette().values();
    let mut bits = Bitset::new(global.len());
    for v in palette.values() {
        let idx = global
            .binary_search(v)
            .map_err(|_| Error::InvalidParameter(format!("{v} is not a distance of the box")))?;
        bits.insert(idx);
    }
    let m = inst.len();
    let symmetry = cfg.symmetry_reduction;
    let stream = Box::new(SinglePalette { inst: &inst, symmetry, palette: bits.clone(), next: 0, classes: None });
    let deadline = cfg.deadline();
    let phase1 = run_waves(&inst, palette.len(), stream, vec![0], cfg, deadline)?;
    let exact = cfg.mode == SearchMode::Exact && phase1.complete;
    let mut nodes = phase1.nodes;
    let mut best = phase1.best;
    if exact {
        let mut meter = Meter::new(cfg.node_budget.saturating_sub(nodes).max(1), deadline);
        let g = CliqueGraph::new(m, |i, j| bits.contains(inst.dist(i, j) as usize));
        let found = lex_first_clique(&g, best.len(), &mut meter);
        nodes += meter.nodes;
        if let Some(w) = found {
            best = w;
        }
    }
    finish(&inst, palette.len(), best, exact, nodes)
}

struct SinglePalette<'a> {
    inst: &'a SearchInstance,
    symmetry: bool,
    palette: Bitset,
    next: usize,
    classes: Option<Vec<Vec<usize>>>,
}

impl TaskStream for SinglePalette<'_> {
    fn next_wave(&mut self, floor: usize, limit: usize) -> Vec<Task> {
        let inst = self.inst;
        let symmetry = self.symmetry;
        let classes = self.classes.get_or_insert_with(|| {
            let bx = inst.bounding_box();
            let sym = if symmetry { instance::Symmetry::detect(bx) } else { instance::Symmetry::trivial(bx) };
            instance::orbit_classes(&sym.orbits(bx, inst.len()))
        });
        let mut wave = Vec::new();
        while wave.len() < limit && self.next < classes.len() {
            let end = (self.next + limit - wave.len()).min(classes.len());
            wave.extend(palette_tasks(inst, classes, &self.palette, floor, self.next..end));
            self.next = end;
        }
        wave
    }
}

fn finish(inst: &SearchInstance, s: usize, mut best: Vec<usize>, optimal: bool, nodes: u64) -> Result<SearchResult> {
    best.sort_unstable();
    let witness = PointSet::new(inst.bounding_box().clone(), inst.points(&best))?;
    let palette_of_witness = distance_palette(&witness)?;
    debug_assert!(palette_of_witness.len() <= s);
    Ok(SearchResult {
        s,
        best_size: best.len(),
        witness,
        optimal,
        nodes_explored: nodes,
        palette_of_witness,
    })
}

/// Greedy sets grown in index order from a few starting points.
fn greedy_seed(inst: &SearchInstance, s: usize) -> Vec<usize> {
    let m = inst.len();
    let mut best: Vec<usize> = vec![0];
    // stamp[d] == tag marks distance d as used by the current set;
    // seen[d] == probe marks it as already counted for the current candidate
    let mut stamp = vec![0u32; inst.palette_len()];
    let mut seen = vec![0u32; inst.palette_len()];
    let (mut tag, mut probe) = (0u32, 0u32);
    let mut set = Vec::with_capacity(m);
    let mut fresh = Vec::with_capacity(s);
    for start in 0..m.min(16) {
        tag += 1;
        set.clear();
        set.push(start);
        let mut used = 0;
        for v in (start + 1..m).chain(0..start) {
            probe += 1;
            fresh.clear();
            for &u in &set {
                let d = inst.dist(u, v) as usize;
                if stamp[d] != tag && seen[d] != probe {
                    seen[d] = probe;
                    fresh.push(d);
                    if used + fresh.len() > s {
                        break;
                    }
                }
            }
            if used + fresh.len() <= s {
                used += fresh.len();
                for &d in &fresh {
                    stamp[d] = tag;
                }
                set.push(v);
            }
        }
        if set.len() > best.len() {
            best = set.clone();
        }
    }
    best.sort_unstable();
    best
}

struct Phase1 {
    best: Vec<usize>,
    nodes: u64,
    complete: bool,
}

fn run_waves(
    inst: &SearchInstance,
    s: usize,
    mut stream: Box<dyn TaskStream + '_>,
    seed: Vec<usize>,
    cfg: &SearchConfig,
    deadline: Option<Instant>,
) -> Result<Phase1> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let m = inst.len();
    let mut best = seed;
    let mut nodes = 0u64;
    loop {
        if best.len() == m {
            return Ok(Phase1 { best, nodes, complete: true });
        }
        let floor = best.len();
        let wave = stream.next_wave(floor, WAVE);
        if wave.is_empty() {
            return Ok(Phase1 { best, nodes, complete: true });
        }
        let cap = cfg.node_budget.saturating_sub(nodes);
        let outcomes: Vec<(Option<Vec<usize>>, u64, bool)> = pool.install(|| {
            wave.par_iter()
                .map(|task| {
                    let mut meter = Meter::new(cap, deadline);
                    let found = task.run(inst, s, floor, &mut meter);
                    (found, meter.nodes, meter.aborted)
                })
                .collect()
        });
        let mut aborted = false;
        for (found, n, a) in outcomes {
            nodes = nodes.saturating_add(n);
            aborted |= a;
            if let Some(set) = found {
                if set.len() > best.len() {
                    best = set;
                }
            }
        }
        if aborted || nodes >= cfg.node_budget {
            return Ok(Phase1 { best, nodes, complete: false });
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub q: usize,
    pub s: usize,
    pub best_size: usize,
    pub optimal: bool,
    #[serde(serialize_with = "biguint_string")]
    pub count_monomials: BigUint,
    #[serde(serialize_with = "biguint_string")]
    pub main_theorem_bound: BigUint,
    /// `best_size ≤ count_monomials`.
    pub conjecture_consistent: bool,
    /// `best_size ≤ main_theorem_bound`.
    pub theorem_consistent: bool,
    pub nodes_explored: u64,
    pub witness: PointSet,
}

/// Compares the search maximum on `bx` with the monomial count and the
/// proven bound.
pub fn conjecture_probe(n: usize, q: usize, s: usize, bx: &CoordBox, cfg: &SearchConfig) -> Result<ProbeReport> {
    if bx.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: bx.dim() });
    }
    if bx.q() != q {
        return Err(Error::BoxSizeMismatch { box_q: bx.q(), t: q });
    }
    let r = search_max(bx, s, cfg)?;
    let count = count_monomials(n as u64, q as u64, s as u64)?;
    let main = main_theorem_bound(n as u64, q as u64, s as u64)?;
    let best = BigUint::from(r.best_size);
    Ok(ProbeReport {
        n,
        q,
        s,
        best_size: r.best_size,
        optimal: r.optimal,
        conjecture_consistent: best <= count,
        theorem_consistent: best <= main,
        count_monomials: count,
        main_theorem_bound: main,
        nodes_explored: r.nodes_explored,
        witness: r.witness,
    })
}
