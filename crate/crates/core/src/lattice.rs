//! Finite lattices given by their Hasse diagram.
//!
//! A [`Lattice`] is built once from a list of element names and a cover
//! relation, after which the order relation, join and meet tables and the
//! height of every element are fully materialized. All queries are table
//! lookups; the structure is immutable and can be shared across threads.
//!
//! Heights are maximum chain lengths from the bottom element, so they are
//! computed as longest paths over the cover DAG.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;

/// Dense element identifier, `0..lattice.len()`.
pub type ElemId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("cover ({lower}, {upper}) references an element outside 0..{len}")]
    IndexOutOfRange {
        lower: usize,
        upper: usize,
        len: usize,
    },
    #[error("cover relation contains a cycle through `{0}`")]
    Cycle(String),
    #[error("poset has several minimal elements: {0:?}")]
    MultipleMinimal(Vec<String>),
    #[error("poset has several maximal elements: {0:?}")]
    MultipleMaximal(Vec<String>),
    #[error("elements `{0}` and `{1}` have no least upper bound")]
    NoJoin(String, String),
    #[error("elements `{0}` and `{1}` have no greatest lower bound")]
    NoMeet(String, String),
    #[error("lattice has {size} elements, above the materialization cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("invalid lattice JSON: {0}")]
    Json(String),
}

/// Integer-valued function on the elements of a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    pub values: Vec<i64>,
}

impl Valuation {
    pub fn new(values: Vec<i64>) -> Self {
        Self { values }
    }

    pub fn constant(len: usize, value: i64) -> Self {
        Self {
            values: vec![value; len],
        }
    }

    #[inline]
    pub fn get(&self, x: ElemId) -> i64 {
        self.values[x]
    }
}

/// On-disk lattice description: `{"elements": [...], "covers": [[i, j], ...]}`
/// where `i` is covered by `j`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LatticeJson {
    pub elements: Vec<String>,
    pub covers: Vec<[usize; 2]>,
}

#[derive(Clone, Debug)]
pub struct Lattice {
    names: Vec<String>,
    covers: Vec<(ElemId, ElemId)>,
    upper_covers: Vec<Vec<ElemId>>,
    lower_covers: Vec<Vec<ElemId>>,
    // Linear extension: `order[pos]` is an element, `pos_of[id]` its position.
    order: Vec<ElemId>,
    pos_of: Vec<usize>,
    // Up- and down-sets, indexed by element id, bits indexed by position.
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    join: Vec<u32>,
    meet: Vec<u32>,
    height: Vec<usize>,
    top: ElemId,
    bottom: ElemId,
}

impl Lattice {
    /// Builds a lattice from element names and pairs `(lower, upper)`.
    ///
    /// Redundant pairs implied by transitivity are accepted and dropped from
    /// the stored cover relation.
    pub fn build<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        covers: &[(ElemId, ElemId)],
    ) -> Result<Self, LatticeError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(LatticeError::IndexOutOfRange {
                    lower: a,
                    upper: b,
                    len: n,
                });
            }
            if a == b {
                return Err(LatticeError::Cycle(names[a].clone()));
            }
            if !succ[a].contains(&b) {
                succ[a].push(b);
                indeg[b] += 1;
            }
        }

        // Kahn's algorithm; ties broken by id so the extension is deterministic.
        let mut order = Vec::with_capacity(n);
        let mut queue: VecDeque<ElemId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut remaining = indeg.clone();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next = succ[v].clone();
            next.sort_unstable();
            for w in next {
                remaining[w] -= 1;
                if remaining[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&v| remaining[v] > 0).unwrap_or(0);
            return Err(LatticeError::Cycle(names[stuck].clone()));
        }

        let minimal: Vec<ElemId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        if minimal.len() > 1 {
            return Err(LatticeError::MultipleMinimal(
                minimal.iter().map(|&v| names[v].clone()).collect(),
            ));
        }
        let maximal: Vec<ElemId> = (0..n).filter(|&v| succ[v].is_empty()).collect();
        if maximal.len() > 1 {
            return Err(LatticeError::MultipleMaximal(
                maximal.iter().map(|&v| names[v].clone()).collect(),
            ));
        }
        let bottom = minimal[0];
        let top = maximal[0];

        let mut pos_of = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos_of[v] = p;
        }

        let mut up = vec![BitSet::new(n); n];
        for &v in order.iter().rev() {
            let mut set = BitSet::new(n);
            set.insert(pos_of[v]);
            for &w in &succ[v] {
                set.union_with(&up[w]);
            }
            up[v] = set;
        }
        let mut pred = vec![Vec::new(); n];
        for (a, s) in succ.iter().enumerate() {
            for &b in s {
                pred[b].push(a);
            }
        }
        let mut down = vec![BitSet::new(n); n];
        for &v in &order {
            let mut set = BitSet::new(n);
            set.insert(pos_of[v]);
            for &u in &pred[v] {
                set.union_with(&down[u]);
            }
            down[v] = set;
        }

        // Keep only genuine covers: intervals [a, b] with exactly two elements.
        let mut reduced = Vec::new();
        for (a, s) in succ.iter().enumerate() {
            for &b in s {
                if up[a].intersection(&down[b]).count() == 2 {
                    reduced.push((a, b));
                }
            }
        }
        reduced.sort_unstable();
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for &(a, b) in &reduced {
            upper_covers[a].push(b);
            lower_covers[b].push(a);
        }

        let mut height = vec![0usize; n];
        for &v in &order {
            height[v] = lower_covers[v]
                .iter()
                .map(|&u| height[u] + 1)
                .max()
                .unwrap_or(0);
        }

        let up_count: Vec<usize> = up.iter().map(BitSet::count).collect();
        let down_count: Vec<usize> = down.iter().map(BitSet::count).collect();
        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        for a in 0..n {
            for b in a..n {
                let common = up[a].intersection(&up[b]);
                // The first common upper bound in the linear extension is
                // minimal; it is the least one iff its up-set is everything.
                let j = common
                    .first()
                    .map(|p| order[p])
                    .filter(|&x| up_count[x] == common.count())
                    .ok_or_else(|| LatticeError::NoJoin(names[a].clone(), names[b].clone()))?;
                let common = down[a].intersection(&down[b]);
                let m = common
                    .last()
                    .map(|p| order[p])
                    .filter(|&x| down_count[x] == common.count())
                    .ok_or_else(|| LatticeError::NoMeet(names[a].clone(), names[b].clone()))?;
                join[a * n + b] = j as u32;
                join[b * n + a] = j as u32;
                meet[a * n + b] = m as u32;
                meet[b * n + a] = m as u32;
            }
        }

        Ok(Self {
            names,
            covers: reduced,
            upper_covers,
            lower_covers,
            order,
            pos_of,
            up,
            down,
            join,
            meet,
            height,
            top,
            bottom,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, LatticeError> {
        let raw: LatticeJson =
            serde_json::from_str(text).map_err(|e| LatticeError::Json(e.to_string()))?;
        let covers: Vec<(usize, usize)> = raw.covers.iter().map(|c| (c[0], c[1])).collect();
        Self::build(raw.elements, &covers)
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            elements: self.names.clone(),
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Graphviz rendering of the Hasse diagram, upper elements drawn above.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=plaintext];\n");
        for (i, name) in self.names.iter().enumerate() {
            let label = name.replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  n{i} [label=\"{label}\"];");
        }
        for &(a, b) in &self.covers {
            let _ = writeln!(out, "  n{a} -> n{b} [arrowhead=none];");
        }
        out.push_str("}\n");
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<ElemId> {
        0..self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: ElemId) -> &str {
        &self.names[x]
    }

    pub fn find(&self, name: &str) -> Option<ElemId> {
        self.names.iter().position(|n| n == name)
    }

    /// The reduced cover relation, sorted.
    pub fn covers(&self) -> &[(ElemId, ElemId)] {
        &self.covers
    }

    pub fn upper_covers(&self, x: ElemId) -> &[ElemId] {
        &self.upper_covers[x]
    }

    pub fn lower_covers(&self, x: ElemId) -> &[ElemId] {
        &self.lower_covers[x]
    }

    #[inline]
    pub fn top(&self) -> ElemId {
        self.top
    }

    #[inline]
    pub fn bottom(&self) -> ElemId {
        self.bottom
    }

    #[inline]
    pub fn height(&self, x: ElemId) -> usize {
        self.height[x]
    }

    pub fn heights(&self) -> &[usize] {
        &self.height
    }

    /// Height of the top element.
    pub fn rank(&self) -> usize {
        self.height[self.top]
    }

    #[inline]
    pub fn leq(&self, a: ElemId, b: ElemId) -> bool {
        self.up[a].contains(self.pos_of[b])
    }

    #[inline]
    pub fn lt(&self, a: ElemId, b: ElemId) -> bool {
        a != b && self.leq(a, b)
    }

    #[inline]
    pub fn join(&self, a: ElemId, b: ElemId) -> ElemId {
        self.join[a * self.len() + b] as ElemId
    }

    #[inline]
    pub fn meet(&self, a: ElemId, b: ElemId) -> ElemId {
        self.meet[a * self.len() + b] as ElemId
    }

    /// Elements below or equal to `x`.
    pub fn down_set(&self, x: ElemId) -> impl Iterator<Item = ElemId> + '_ {
        self.down[x].iter().map(|p| self.order[p])
    }

    /// Elements above or equal to `x`.
    pub fn up_set(&self, x: ElemId) -> impl Iterator<Item = ElemId> + '_ {
        self.up[x].iter().map(|p| self.order[p])
    }

    /// `d_h(a, b) = h(a ∨ b) − h(a ∧ b)`.
    #[inline]
    pub fn height_metric(&self, a: ElemId, b: ElemId) -> usize {
        self.height[self.join(a, b)] - self.height[self.meet(a, b)]
    }

    /// `d_v(a, b) = v(a ∨ b) − v(a ∧ b)`.
    pub fn valuation_metric(&self, v: &Valuation, a: ElemId, b: ElemId) -> i64 {
        v.get(self.join(a, b)) - v.get(self.meet(a, b))
    }

    pub fn height_valuation(&self) -> Valuation {
        Valuation::new(self.height.iter().map(|&h| h as i64).collect())
    }

    /// `v(x ∨ y) + v(x ∧ y) = v(x) + v(y)` for every pair.
    pub fn is_valuation(&self, v: &Valuation) -> bool {
        self.pairs()
            .all(|(a, b)| v.get(self.join(a, b)) + v.get(self.meet(a, b)) == v.get(a) + v.get(b))
    }

    /// `x ≤ y ⟹ v(x) ≤ v(y)`.
    pub fn is_isotone(&self, v: &Valuation) -> bool {
        self.covers.iter().all(|&(a, b)| v.get(a) <= v.get(b))
    }

    /// Isotone valuation with `x < y ⟹ v(x) < v(y)`.
    pub fn is_positive_isotone(&self, v: &Valuation) -> bool {
        self.is_valuation(v) && self.covers.iter().all(|&(a, b)| v.get(a) < v.get(b))
    }

    fn pairs(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |a| (a..n).map(move |b| (a, b)))
    }

    /// Every maximal chain between two comparable elements has the same length.
    pub fn has_jordan_dedekind(&self) -> bool {
        let n = self.len();
        let mut shortest = vec![usize::MAX; n];
        let mut longest = vec![0usize; n];
        for a in 0..n {
            shortest.iter_mut().for_each(|s| *s = usize::MAX);
            longest.iter_mut().for_each(|l| *l = 0);
            shortest[a] = 0;
            for p in self.pos_of[a]..n {
                let v = self.order[p];
                if shortest[v] == usize::MAX {
                    continue;
                }
                if shortest[v] != longest[v] {
                    return false;
                }
                for &w in &self.upper_covers[v] {
                    shortest[w] = shortest[w].min(shortest[v] + 1);
                    longest[w] = longest[w].max(longest[v] + 1);
                }
            }
        }
        true
    }

    /// `a ≤ c ⟹ a ∨ (b ∧ c) = (a ∨ b) ∧ c`, checked on every triple.
    pub fn is_modular(&self) -> bool {
        for a in self.elements() {
            for c in self.up_set(a) {
                for b in self.elements() {
                    if self.join(a, self.meet(b, c)) != self.meet(self.join(a, b), c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Both distributive laws on every triple.
    pub fn is_distributive(&self) -> bool {
        for a in self.elements() {
            for b in self.elements() {
                for c in self.elements() {
                    if self.join(a, self.meet(b, c)) != self.meet(self.join(a, b), self.join(a, c))
                    {
                        return false;
                    }
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<ElemId> {
        self.upper_covers[self.bottom].clone()
    }

    /// Elements covered by the top.
    pub fn coatoms(&self) -> Vec<ElemId> {
        self.lower_covers[self.top].clone()
    }

    /// Join of all atoms below `x` (the bottom if there are none).
    pub fn atomic_closure(&self, x: ElemId) -> ElemId {
        self.atoms()
            .into_iter()
            .filter(|&a| self.leq(a, x))
            .fold(self.bottom, |acc, a| self.join(acc, a))
    }

    /// Every element is a join of atoms.
    pub fn is_geometric(&self) -> bool {
        self.elements().all(|x| self.atomic_closure(x) == x)
    }

    pub fn is_geometric_modular(&self) -> bool {
        self.is_geometric() && self.is_modular()
    }

    pub fn is_geometric_distributive(&self) -> bool {
        self.is_geometric() && self.is_distributive()
    }

    /// Smallest join- and meet-closed subset containing `seed`, sorted by id.
    pub fn closure_ids(&self, seed: &[ElemId]) -> Vec<ElemId> {
        let n = self.len();
        let mut member = BitSet::new(n);
        let mut members: Vec<ElemId> = Vec::new();
        for &s in seed {
            if !member.contains(s) {
                member.insert(s);
                members.push(s);
            }
        }
        let mut i = 0;
        while i < members.len() {
            let a = members[i];
            let mut j = 0;
            while j <= i {
                let b = members[j];
                for c in [self.join(a, b), self.meet(a, b)] {
                    if !member.contains(c) {
                        member.insert(c);
                        members.push(c);
                    }
                }
                j += 1;
            }
            i += 1;
        }
        members.sort_unstable();
        members
    }

    /// The sublattice generated by `seed`, as a lattice in its own right.
    /// Element `i` of the result is `closure_ids(seed)[i]` of `self`.
    pub fn sublattice_closure(&self, seed: &[ElemId]) -> Result<Lattice, LatticeError> {
        let members = self.closure_ids(seed);
        self.induced(&members)
    }

    /// Replaces the display names, keeping the structure.
    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.len(), "one name per element");
        self.names = names;
        self
    }

    /// Builds the subposet on `members` (assumed closed under join and meet).
    pub(crate) fn induced(&self, members: &[ElemId]) -> Result<Lattice, LatticeError> {
        let mut covers = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if self.lt(a, b)
                    && !members
                        .iter()
                        .any(|&c| c != a && c != b && self.lt(a, c) && self.lt(c, b))
                {
                    covers.push((i, j));
                }
            }
        }
        Lattice::build(members.iter().map(|&m| self.names[m].clone()), &covers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow3() -> Lattice {
        // masks 0..8, bit i is element i+1
        let names: Vec<String> = (0..8u32).map(|m| format!("{m:03b}")).collect();
        let mut covers = Vec::new();
        for m in 0..8usize {
            for bit in 0..3 {
                if m & (1 << bit) == 0 {
                    covers.push((m, m | (1 << bit)));
                }
            }
        }
        Lattice::build(names, &covers).unwrap()
    }

    fn n5() -> Lattice {
        // d=0 a=1 b=2 c=3 u=4
        Lattice::build(
            ["d", "a", "b", "c", "u"],
            &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        )
        .unwrap()
    }

    fn m3() -> Lattice {
        Lattice::build(
            ["O", "A", "B", "C", "I"],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .unwrap()
    }

    #[test]
    fn powerset_of_three() {
        let l = pow3();
        assert_eq!(l.len(), 8);
        assert_eq!(l.rank(), 3);
        assert_eq!(l.bottom(), 0);
        assert_eq!(l.top(), 7);
        assert_eq!(l.join(0b001, 0b010), 0b011);
        assert_eq!(l.meet(0b011, 0b110), 0b010);
        assert_eq!(l.height_metric(0b001, 0b010), 2);
        assert_eq!(l.atoms(), vec![1, 2, 4]);
        assert!(l.is_distributive());
        assert!(l.is_geometric());
        assert!(l.has_jordan_dedekind());
    }

    #[test]
    fn single_element() {
        let l = Lattice::build(["x"], &[]).unwrap();
        assert_eq!(l.top(), l.bottom());
        assert_eq!(l.rank(), 0);
        assert!(l.is_modular() && l.is_distributive() && l.is_geometric());
    }

    #[test]
    fn n5_properties() {
        let l = n5();
        assert_eq!(l.len(), 5);
        assert!(!l.has_jordan_dedekind());
        assert!(!l.is_modular());
        assert!(!l.is_valuation(&l.height_valuation()));
        assert_eq!(l.height(4), 3);
    }

    #[test]
    fn m3_properties() {
        let l = m3();
        assert_eq!(l.join(1, 2), 4);
        assert_eq!(l.meet(1, 2), 0);
        assert_eq!(l.height_metric(1, 3), 2);
        assert!(l.is_modular());
        assert!(!l.is_distributive());
        assert!(l.is_geometric());
        assert!(l.has_jordan_dedekind());
    }

    #[test]
    fn meet_with_bottom_is_bottom() {
        for l in [pow3(), n5(), m3()] {
            for a in l.elements() {
                assert_eq!(l.meet(a, l.bottom()), l.bottom());
                assert_eq!(l.height_metric(a, a), 0);
            }
        }
    }

    #[test]
    fn rejects_cycles() {
        let err = Lattice::build(["a", "b"], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, LatticeError::Cycle(_)));
        let err = Lattice::build(["a"], &[(0, 0)]).unwrap_err();
        assert!(matches!(err, LatticeError::Cycle(_)));
    }

    #[test]
    fn rejects_several_extremes() {
        let err = Lattice::build(["a", "b", "t"], &[(0, 2), (1, 2)]).unwrap_err();
        assert!(matches!(err, LatticeError::MultipleMinimal(_)));
        let err = Lattice::build(["o", "a", "b"], &[(0, 1), (0, 2)]).unwrap_err();
        assert!(matches!(err, LatticeError::MultipleMaximal(_)));
        assert_eq!(
            Lattice::build(Vec::<String>::new(), &[]).unwrap_err(),
            LatticeError::Empty
        );
    }

    #[test]
    fn rejects_poset_without_unique_join() {
        // bowtie: a, b both below c and d
        let err = Lattice::build(
            ["o", "a", "b", "c", "d", "i"],
            &[
                (0, 1),
                (0, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 5),
                (4, 5),
            ],
        )
        .unwrap_err();
        assert_eq!(err, LatticeError::NoJoin("a".into(), "b".into()));
    }

    #[test]
    fn redundant_pairs_are_reduced() {
        let l = Lattice::build(["0", "1", "2"], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(l.covers(), &[(0, 1), (1, 2)]);
        assert_eq!(l.height(2), 2);
    }

    #[test]
    fn out_of_range_cover() {
        let err = Lattice::build(["0"], &[(0, 3)]).unwrap_err();
        assert!(matches!(err, LatticeError::IndexOutOfRange { .. }));
    }

    #[test]
    fn valuations() {
        let l = pow3();
        let h = l.height_valuation();
        assert!(l.is_valuation(&h));
        assert!(l.is_positive_isotone(&h));
        let zero = Valuation::constant(l.len(), 0);
        assert!(l.is_valuation(&zero));
        assert!(l.is_isotone(&zero));
        assert!(!l.is_positive_isotone(&zero));
    }

    #[test]
    fn chain_is_distributive_but_not_geometric() {
        let l =
            Lattice::build(["{}", "{1}", "{1,2}", "{1,2,3}"], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(l.is_distributive());
        assert!(!l.is_geometric());
    }

    #[test]
    fn sublattice_of_subsets() {
        let l = pow3();
        let sub = l.sublattice_closure(&[0b000, 0b001, 0b010, 0b011]).unwrap();
        assert_eq!(sub.len(), 4);
        assert_eq!(sub.rank(), 2);
        let chain = l.sublattice_closure(&[l.bottom(), l.top()]).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain.covers(), &[(0, 1)]);
        // Closure of two incomparable atoms adds their join and meet.
        assert_eq!(l.closure_ids(&[0b001, 0b010]), vec![0, 1, 2, 3]);
    }

    #[test]
    fn json_round_trip_and_dot() {
        let l = n5();
        let json = serde_json::to_string(&l.to_json()).unwrap();
        let back = Lattice::from_json_str(&json).unwrap();
        assert_eq!(back.covers(), l.covers());
        assert_eq!(back.names(), l.names());
        let dot = l.to_dot();
        assert!(dot.contains("rankdir=BT"));
        assert_eq!(dot.matches("->").count(), l.covers().len());
        assert!(matches!(
            Lattice::from_json_str("{"),
            Err(LatticeError::Json(_))
        ));
    }
}
