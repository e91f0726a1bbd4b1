//! Exact search for largest schemes with a prescribed minimum distance.
//!
//! A scheme with minimum distance at least `d` is a clique in the graph on
//! lattice elements whose edges join pairs at height distance `>= d`. The
//! search is a branch-and-bound maximum clique solver with greedy-coloring
//! bounds. Vertices are ordered by height, then element id, so results are
//! reproducible.
//!
//! With several workers the root branches are shared out; workers prune
//! against a common incumbent but still look for ties, and the final clique
//! is taken from the earliest root branch reaching the optimum. This makes
//! the returned scheme identical to the single-worker one.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitSet;
use crate::bounds::{kks_bound, BoundError};
use crate::counting::BigNat;
use crate::families::{build_projective_lattice_with, Caps, FamilyError};
use crate::lattice::{ElemId, Lattice};
use crate::schemes::Scheme;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("minimum distance must be at least 1")]
    InvalidDistance,
    #[error("height window [{0}, {1}] contains no elements")]
    EmptyWindow(usize, usize),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            max_time: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchProblem<'l> {
    pub lattice: &'l Lattice,
    pub d: usize,
    /// Inclusive height range `[m, M]`; `None` means the whole lattice.
    pub window: Option<(usize, usize)>,
    pub budget: Budget,
    pub workers: usize,
}

impl<'l> SearchProblem<'l> {
    pub fn new(lattice: &'l Lattice, d: usize) -> Self {
        Self {
            lattice,
            d,
            window: None,
            budget: Budget::default(),
            workers: 1,
        }
    }

    pub fn with_window(mut self, m: usize, max: usize) -> Self {
        self.window = Some((m, max));
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Candidate elements in search order: by height, then id.
    pub fn candidates(&self) -> Vec<ElemId> {
        let l = self.lattice;
        let mut v: Vec<ElemId> = l
            .elements()
            .filter(|&x| {
                self.window
                    .is_none_or(|(m, max)| (m..=max).contains(&l.height(x)))
            })
            .collect();
        v.sort_by_key(|&x| (l.height(x), x));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Members of the best scheme, in search order.
    pub members: Vec<ElemId>,
    pub best_size: usize,
    pub proven_optimal: bool,
    pub nodes: u64,
}

impl SearchResult {
    pub fn scheme<'l>(&self, lattice: &'l Lattice) -> Scheme<'l> {
        Scheme::new(lattice, self.members.iter().copied())
            .expect("search returns a nonempty scheme")
    }
}

struct Graph {
    vertices: Vec<ElemId>,
    adj: Vec<BitSet>,
}

impl Graph {
    fn new(problem: &SearchProblem<'_>) -> Self {
        let vertices = problem.candidates();
        let n = vertices.len();
        let mut adj = vec![BitSet::new(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if problem.lattice.height_metric(vertices[i], vertices[j]) >= problem.d {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Self { vertices, adj }
    }

    /// Greedy sequential coloring of `p`; returns vertices sorted by color
    /// with the (1-based) color of each, so `colors[i]` bounds the clique
    /// size among `order[..=i]`.
    fn color_sort(&self, p: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = p.clone();
        let mut order = Vec::with_capacity(p.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut available = uncolored.clone();
            while let Some(v) = available.first() {
                available.remove(v);
                uncolored.remove(v);
                for u in self.adj[v].iter() {
                    available.remove(u);
                }
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }
}

struct Limits<'a> {
    budget: Budget,
    start: Instant,
    nodes: &'a AtomicU64,
    aborted: &'a AtomicBool,
}

impl Limits<'_> {
    /// Counts a node; false once the budget is spent.
    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget.max_nodes
            || (n.is_multiple_of(1024) && self.start.elapsed() > self.budget.max_time)
        {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

struct Branch<'a> {
    graph: &'a Graph,
    limits: &'a Limits<'a>,
    /// Best size known across workers; a subtree is cut only if it cannot
    /// reach it, so ties are still explored.
    shared: Option<&'a AtomicUsize>,
    best: Vec<usize>,
}

impl Branch<'_> {
    fn expand(&mut self, clique: &mut Vec<usize>, mut p: BitSet) {
        if !self.limits.tick() {
            return;
        }
        if clique.len() > self.best.len() {
            self.best = clique.clone();
            if let Some(shared) = self.shared {
                shared.fetch_max(self.best.len(), Ordering::Relaxed);
            }
        }
        if p.is_empty() {
            return;
        }
        let (order, colors) = self.graph.color_sort(&p);
        for idx in (0..order.len()).rev() {
            let bound = clique.len() + colors[idx];
            if bound <= self.best.len() {
                return;
            }
            if let Some(shared) = self.shared {
                if bound < shared.load(Ordering::Relaxed) {
                    return;
                }
            }
            let v = order[idx];
            clique.push(v);
            self.expand(clique, p.intersection(&self.graph.adj[v]));
            clique.pop();
            if self.limits.aborted.load(Ordering::Relaxed) {
                return;
            }
            p.remove(v);
        }
    }
}

/// Largest scheme with minimum distance at least `problem.d`.
pub fn max_code(problem: &SearchProblem<'_>) -> Result<SearchResult, SearchError> {
    if problem.d == 0 {
        return Err(SearchError::InvalidDistance);
    }
    let graph = Graph::new(problem);
    if graph.vertices.is_empty() {
        let (m, max) = problem.window.unwrap_or((0, 0));
        return Err(SearchError::EmptyWindow(m, max));
    }
    let nodes = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    let limits = Limits {
        budget: problem.budget,
        start: Instant::now(),
        nodes: &nodes,
        aborted: &aborted,
    };
    let all = BitSet::full(graph.vertices.len());

    let best = if problem.workers <= 1 {
        let mut branch = Branch {
            graph: &graph,
            limits: &limits,
            shared: None,
            best: Vec::new(),
        };
        branch.expand(&mut Vec::new(), all);
        branch.best
    } else {
        search_parallel(&graph, &limits, all, problem.workers)
    };

    let members: Vec<ElemId> = best.iter().map(|&i| graph.vertices[i]).collect();
    let result = SearchResult {
        best_size: members.len(),
        members,
        proven_optimal: !aborted.load(Ordering::Relaxed),
        nodes: nodes.load(Ordering::Relaxed),
    };
    if result.best_size >= 2 {
        let check = result.scheme(problem.lattice).min_distance();
        assert!(
            check.is_ok_and(|dist| dist >= problem.d),
            "search produced a scheme violating the distance constraint"
        );
    }
    Ok(result)
}

fn search_parallel(graph: &Graph, limits: &Limits<'_>, all: BitSet, workers: usize) -> Vec<usize> {
    if !limits.tick() {
        return Vec::new();
    }
    let (order, colors) = graph.color_sort(&all);
    // Root branch i takes vertex order[i] with candidates among order[..i].
    let branches: Vec<usize> = (0..order.len()).rev().collect();
    let next = AtomicUsize::new(0);
    let shared = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Vec<usize>>>> = Mutex::new(vec![None; branches.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let slot = next.fetch_add(1, Ordering::Relaxed);
                if slot >= branches.len() || limits.aborted.load(Ordering::Relaxed) {
                    break;
                }
                let idx = branches[slot];
                if colors[idx] < shared.load(Ordering::Relaxed) {
                    continue;
                }
                let v = order[idx];
                let mut p = BitSet::new(all.len());
                for &u in &order[..idx] {
                    p.insert(u);
                }
                p.intersect_with(&graph.adj[v]);
                let mut branch = Branch {
                    graph,
                    limits,
                    shared: Some(&shared),
                    best: Vec::new(),
                };
                let mut clique = vec![v];
                branch.expand(&mut clique, p);
                results.lock().expect("no poisoned lock")[slot] = Some(branch.best);
            });
        }
    });
    let results = results.into_inner().expect("no poisoned lock");
    let top = results.iter().flatten().map(Vec::len).max().unwrap_or(0);
    results
        .into_iter()
        .flatten()
        .find(|b| b.len() == top)
        .unwrap_or_default()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    Attained,
    Gap,
    Inconclusive,
}

/// Evidence for one Grassmannian instance: bound against exact optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRow {
    pub q: u32,
    pub n: usize,
    pub l: usize,
    pub d: usize,
    pub alpha: usize,
    pub bound: BigNat,
    pub bound_degenerate: bool,
    pub optimum: usize,
    pub proven_optimal: bool,
    /// `bound − optimum` when the search completed.
    pub gap: Option<BigNat>,
    pub status: ProbeStatus,
    /// `α = 0`: the bound counts the whole window, so attaining it says
    /// nothing about the conjecture. Such rows are left out of tallies.
    pub trivial: bool,
    pub nodes: u64,
}

/// Compares the constant-dimension bound with the largest code in `G_q(n, l)`.
pub fn conjecture_probe(
    q: u32,
    n: usize,
    l: usize,
    d: usize,
    budget: Budget,
    workers: usize,
    caps: &Caps,
) -> Result<ProbeRow, SearchError> {
    let bound = kks_bound(n, l, d, q as u64)?;
    let proj = build_projective_lattice_with(n, q, caps)?;
    let problem = SearchProblem::new(&proj.lattice, d)
        .with_window(l, l)
        .with_budget(budget)
        .with_workers(workers);
    let result = max_code(&problem)?;
    let optimum = BigNat::from(result.best_size);
    let (gap, status) = if !result.proven_optimal {
        (None, ProbeStatus::Inconclusive)
    } else {
        assert!(
            optimum <= bound.value,
            "exact optimum exceeds the upper bound"
        );
        let gap = &bound.value - &optimum;
        let status = if gap == BigNat::from(0u32) {
            ProbeStatus::Attained
        } else {
            ProbeStatus::Gap
        };
        (Some(gap), status)
    };
    Ok(ProbeRow {
        q,
        n,
        l,
        d,
        alpha: bound.alpha,
        bound: bound.value,
        bound_degenerate: bound.degenerate,
        optimum: result.best_size,
        proven_optimal: result.proven_optimal,
        gap,
        status,
        trivial: bound.alpha == 0,
        nodes: result.nodes,
    })
}

/// Counts over non-trivial, conclusive rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProbeTally {
    pub attained: usize,
    pub strict_gap: usize,
    pub inconclusive: usize,
    pub excluded_trivial: usize,
}

pub fn tally(rows: &[ProbeRow]) -> ProbeTally {
    let mut t = ProbeTally::default();
    for r in rows {
        if r.trivial {
            t.excluded_trivial += 1;
            continue;
        }
        match r.status {
            ProbeStatus::Attained => t.attained += 1,
            ProbeStatus::Gap => t.strict_gap += 1,
            ProbeStatus::Inconclusive => t.inconclusive += 1,
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyOrder {
    /// By height, then id.
    Deterministic,
    Seeded(u64),
}

/// A maximal (not necessarily maximum) scheme built first-fit.
pub fn greedy_code<'l>(
    lattice: &'l Lattice,
    d: usize,
    order: GreedyOrder,
    window: Option<(usize, usize)>,
) -> Result<Scheme<'l>, SearchError> {
    if d == 0 {
        return Err(SearchError::InvalidDistance);
    }
    let mut problem = SearchProblem::new(lattice, d);
    problem.window = window;
    let mut candidates = problem.candidates();
    if candidates.is_empty() {
        let (m, max) = window.unwrap_or((0, 0));
        return Err(SearchError::EmptyWindow(m, max));
    }
    if let GreedyOrder::Seeded(seed) = order {
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut chosen: Vec<ElemId> = Vec::new();
    for x in candidates {
        if chosen.iter().all(|&c| lattice.height_metric(c, x) >= d) {
            chosen.push(x);
        }
    }
    Ok(Scheme::new(lattice, chosen).expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_powerset_lattice, build_projective_lattice_with};

    #[test]
    fn lines_of_the_plane() {
        let p = build_projective_lattice_with(2, 2, &Caps::default()).unwrap();
        let r = max_code(&SearchProblem::new(&p.lattice, 2)).unwrap();
        assert_eq!(r.best_size, 3);
        assert!(r.proven_optimal);
        assert!(r.members.iter().all(|&x| p.lattice.height(x) == 1));
    }

    #[test]
    fn repetition_code() {
        let l = build_powerset_lattice(3).unwrap();
        let r = max_code(&SearchProblem::new(&l, 3)).unwrap();
        assert_eq!(r.best_size, 2);
    }

    #[test]
    fn distance_one_takes_everything() {
        let p = build_projective_lattice_with(3, 2, &Caps::default()).unwrap();
        let r = max_code(&SearchProblem::new(&p.lattice, 1)).unwrap();
        assert_eq!(r.best_size, 16);
        let r = max_code(&SearchProblem::new(&p.lattice, 1).with_window(1, 1)).unwrap();
        assert_eq!(r.best_size, 7);
    }

    #[test]
    fn errors() {
        let l = build_powerset_lattice(2).unwrap();
        assert_eq!(
            max_code(&SearchProblem::new(&l, 0)),
            Err(SearchError::InvalidDistance)
        );
        assert_eq!(
            max_code(&SearchProblem::new(&l, 1).with_window(5, 6)),
            Err(SearchError::EmptyWindow(5, 6))
        );
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let p = build_projective_lattice_with(4, 2, &Caps::default()).unwrap();
        let budget = Budget {
            max_nodes: 3,
            max_time: Duration::from_secs(60),
        };
        let r = max_code(
            &SearchProblem::new(&p.lattice, 4)
                .with_window(2, 2)
                .with_budget(budget),
        )
        .unwrap();
        assert!(!r.proven_optimal);
    }

    #[test]
    fn deterministic_and_worker_independent() {
        let p = build_projective_lattice_with(4, 2, &Caps::default()).unwrap();
        let base = SearchProblem::new(&p.lattice, 4).with_window(2, 2);
        let a = max_code(&base).unwrap();
        let b = max_code(&base).unwrap();
        assert_eq!(a, b);
        for workers in [2, 4] {
            let c = max_code(&base.with_workers(workers)).unwrap();
            assert_eq!(c.members, a.members);
            assert!(c.proven_optimal);
        }
    }

    #[test]
    fn greedy() {
        let l = build_powerset_lattice(4).unwrap();
        let g = greedy_code(&l, 3, GreedyOrder::Deterministic, None).unwrap();
        assert!(g.len() >= 2);
        assert!(g.min_distance().unwrap() >= 3);
        let all = greedy_code(&l, 1, GreedyOrder::Seeded(5), None).unwrap();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn probe_small() {
        let row = conjecture_probe(2, 2, 1, 2, Budget::default(), 1, &Caps::default()).unwrap();
        assert_eq!(row.bound, BigNat::from(3u32));
        assert_eq!(row.optimum, 3);
        assert_eq!(row.status, ProbeStatus::Attained);
        assert!(row.trivial);
        let t = tally(&[row]);
        assert_eq!(t.excluded_trivial, 1);
        assert_eq!(t.attained, 0);
    }
}
