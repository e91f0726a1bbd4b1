//! Lattice schemes (subsets of a lattice playing the role of codes), their
//! minimum distance under the height metric, puncturing, and transforms
//! that carry classical codes into lattices.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fq::{Fq, FqError, SubspaceRepr};
use crate::lattice::{ElemId, Lattice};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("a scheme needs at least one element")]
    Empty,
    #[error("element id {0} is not in the lattice")]
    UnknownElement(ElemId),
    #[error("undefined minimum distance: scheme has a single element")]
    UndefinedMinDistance,
    #[error("no element of height {target} lies below `{meet}`")]
    NoProjection { meet: String, target: usize },
    #[error("entry {0} is not binary")]
    NotBinary(u8),
}

/// A nonempty set of lattice elements with cached distance and height range.
#[derive(Clone, Debug)]
pub struct Scheme<'l> {
    lattice: &'l Lattice,
    members: Vec<ElemId>,
    min_distance: Option<usize>,
    min_height: usize,
    max_height: usize,
}

impl PartialEq for Scheme<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.lattice, other.lattice) && self.members == other.members
    }
}

impl<'l> Scheme<'l> {
    /// Duplicates are merged; members are kept sorted by id.
    pub fn new(
        lattice: &'l Lattice,
        members: impl IntoIterator<Item = ElemId>,
    ) -> Result<Self, SchemeError> {
        let set: BTreeSet<ElemId> = members.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= lattice.len()) {
            return Err(SchemeError::UnknownElement(bad));
        }
        if set.is_empty() {
            return Err(SchemeError::Empty);
        }
        let members: Vec<ElemId> = set.into_iter().collect();
        let min_distance = pairwise_min(lattice, &members);
        let heights = members.iter().map(|&x| lattice.height(x));
        let min_height = heights.clone().min().expect("nonempty");
        let max_height = heights.max().expect("nonempty");
        Ok(Self {
            lattice,
            members,
            min_distance,
            min_height,
            max_height,
        })
    }

    pub fn lattice(&self) -> &'l Lattice {
        self.lattice
    }

    pub fn members(&self) -> &[ElemId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: ElemId) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Least pairwise height distance between distinct members.
    pub fn min_distance(&self) -> Result<usize, SchemeError> {
        self.min_distance.ok_or(SchemeError::UndefinedMinDistance)
    }

    /// Minimum distance, with a collapsed (single-element) scheme counted as 0.
    pub fn distance_or_zero(&self) -> usize {
        self.min_distance.unwrap_or(0)
    }

    pub fn min_height(&self) -> usize {
        self.min_height
    }

    pub fn max_height(&self) -> usize {
        self.max_height
    }

    pub fn names(&self) -> Vec<&str> {
        self.members.iter().map(|&x| self.lattice.name(x)).collect()
    }
}

fn pairwise_min(lattice: &Lattice, members: &[ElemId]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let d = lattice.height_metric(a, b);
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

pub fn min_distance(scheme: &Scheme<'_>) -> Result<usize, SchemeError> {
    scheme.min_distance()
}

/// Least distance between the images of distinct members, images listed in
/// member order. Two members with the same image give 0. `None` for fewer
/// than two images.
pub fn image_min_distance(lattice: &Lattice, images: &[ElemId]) -> Option<usize> {
    pairwise_min(lattice, images)
}

/// `{w ∧ a | a ∈ C}`, as a set.
pub fn puncture<'l>(scheme: &Scheme<'l>, w: ElemId) -> Scheme<'l> {
    let l = scheme.lattice;
    Scheme::new(l, scheme.members.iter().map(|&a| l.meet(w, a))).expect("nonempty image")
}

/// Minimum distance of the punctured scheme, counting merged members as 0.
pub fn punctured_distance(scheme: &Scheme<'_>, w: ElemId) -> Option<usize> {
    let l = scheme.lattice;
    let images: Vec<ElemId> = scheme.members.iter().map(|&a| l.meet(w, a)).collect();
    image_min_distance(l, &images)
}

/// Picks the image of `c` when `c ≤ w`, among the elements one level below `c`.
pub trait Chooser {
    fn choose(&mut self, lattice: &Lattice, c: ElemId, candidates: &[ElemId]) -> ElemId;

    fn describe(&self) -> String;
}

/// Smallest element id among the candidates.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeastIdChooser;

impl Chooser for LeastIdChooser {
    fn choose(&mut self, _: &Lattice, _: ElemId, candidates: &[ElemId]) -> ElemId {
        *candidates.iter().min().expect("nonempty candidates")
    }

    fn describe(&self) -> String {
        "least-id".to_string()
    }
}

/// Uniform choice from a seeded ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct SeededChooser {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededChooser {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Chooser for SeededChooser {
    fn choose(&mut self, _: &Lattice, _: ElemId, candidates: &[ElemId]) -> ElemId {
        *candidates
            .choose(&mut self.rng)
            .expect("nonempty candidates")
    }

    fn describe(&self) -> String {
        format!("seeded(seed={})", self.seed)
    }
}

/// An element of height `h(c) − 1` below `c ∧ w`.
///
/// If `c ∧ w` already has that height it is returned; if `c ≤ w` the chooser
/// picks among the elements one level below `c`. The bottom maps to itself.
pub fn project_element(
    lattice: &Lattice,
    c: ElemId,
    w: ElemId,
    chooser: &mut dyn Chooser,
) -> Result<ElemId, SchemeError> {
    if c == lattice.bottom() {
        return Ok(c);
    }
    let target = lattice.height(c) - 1;
    let m = lattice.meet(c, w);
    let hm = lattice.height(m);
    if hm == target {
        return Ok(m);
    }
    if hm < target {
        return Err(SchemeError::NoProjection {
            meet: lattice.name(m).to_string(),
            target,
        });
    }
    let mut candidates: Vec<ElemId> = lattice
        .down_set(m)
        .filter(|&x| lattice.height(x) == target)
        .collect();
    candidates.sort_unstable();
    Ok(chooser.choose(lattice, c, &candidates))
}

/// Puncture by `w` and push every image exactly one level below its preimage.
pub fn puncture_project<'l>(
    scheme: &Scheme<'l>,
    w: ElemId,
    chooser: &mut dyn Chooser,
) -> Result<Scheme<'l>, SchemeError> {
    let l = scheme.lattice;
    let images = scheme
        .members
        .iter()
        .map(|&c| project_element(l, c, w, chooser))
        .collect::<Result<Vec<_>, _>>()?;
    Scheme::new(l, images)
}

/// Support of a binary vector as an element of `Pow({1..n})`, whose ids are
/// bitmasks (coordinate `i` is bit `i − 1`).
pub fn support_transform(vector: &[u8]) -> Result<ElemId, SchemeError> {
    vector
        .iter()
        .enumerate()
        .try_fold(0usize, |acc, (i, &b)| match b {
            0 => Ok(acc),
            1 => Ok(acc | 1 << i),
            other => Err(SchemeError::NotBinary(other)),
        })
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// `A ↦ rowspace [I_m | A]` for an `m × n` matrix `A`.
pub fn lifting_transform(field: Fq, matrix: &[Vec<u8>]) -> Result<SubspaceRepr, FqError> {
    let m = matrix.len();
    let n = matrix.first().map_or(0, Vec::len);
    let rows: Vec<Vec<u8>> = matrix
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (0..m)
                .map(|j| u8::from(i == j))
                .chain(r.iter().copied())
                .collect()
        })
        .collect();
    field.rref(m + n, &rows)
}

/// `rank(A − B)`.
pub fn rank_distance(field: Fq, a: &[Vec<u8>], b: &[Vec<u8>]) -> usize {
    field.rank(&field.matrix_sub(a, b))
}

/// `dim(A + B) − dim(A ∩ B)`.
pub fn subspace_distance(a: &SubspaceRepr, b: &SubspaceRepr) -> Result<usize, FqError> {
    Ok(a.sum(b)?.dim() - a.intersect(b)?.dim())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformViolation {
    /// Two codewords sent to the same element.
    Collision { first: usize, second: usize },
    Distance {
        first: usize,
        second: usize,
        code: usize,
        lattice: usize,
    },
}

/// Outcome of checking that a map is injective and distance-preserving.
#[derive(Clone, Debug)]
pub struct TransformWitness {
    pub description: String,
    pub code_size: usize,
    pub image: Vec<ElemId>,
    pub pairs_checked: usize,
    pub injective: bool,
    pub isometric: bool,
    /// First offending pair, by codeword index.
    pub violation: Option<TransformViolation>,
    pub code_min_distance: Option<usize>,
    pub scheme_min_distance: Option<usize>,
}

impl TransformWitness {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    /// The image is all of the lattice.
    pub fn onto(&self, lattice: &Lattice) -> bool {
        self.image.iter().collect::<BTreeSet<_>>().len() == lattice.len()
    }
}

/// Checks every pair of `code` for injectivity and exact distance agreement.
pub fn verify_transform<C>(
    description: &str,
    lattice: &Lattice,
    code: &[C],
    code_metric: impl Fn(&C, &C) -> usize,
    map: impl Fn(&C) -> ElemId,
) -> TransformWitness {
    let image: Vec<ElemId> = code.iter().map(&map).collect();
    let mut violation = None;
    let mut injective = true;
    let mut isometric = true;
    let mut pairs = 0;
    let mut code_min: Option<usize> = None;
    let mut scheme_min: Option<usize> = None;
    for i in 0..code.len() {
        for j in i + 1..code.len() {
            pairs += 1;
            let dc = code_metric(&code[i], &code[j]);
            let dl = lattice.height_metric(image[i], image[j]);
            code_min = Some(code_min.map_or(dc, |m| m.min(dc)));
            scheme_min = Some(scheme_min.map_or(dl, |m| m.min(dl)));
            if image[i] == image[j] {
                injective = false;
                violation.get_or_insert(TransformViolation::Collision {
                    first: i,
                    second: j,
                });
            }
            if dc != dl {
                isometric = false;
                violation.get_or_insert(TransformViolation::Distance {
                    first: i,
                    second: j,
                    code: dc,
                    lattice: dl,
                });
            }
        }
    }
    TransformWitness {
        description: description.to_string(),
        code_size: code.len(),
        image,
        pairs_checked: pairs,
        injective,
        isometric,
        violation,
        code_min_distance: code_min,
        scheme_min_distance: scheme_min,
    }
}
