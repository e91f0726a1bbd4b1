//! Constructors for the concrete lattices: power sets, projective lattices
//! `Sub(F_q^n)` and the small named examples.

use std::collections::HashMap;
use std::str::FromStr;

use thiserror::Error;

use crate::fq::{grassmannian, Fq, FqError, SubspaceRepr};
use crate::lattice::{ElemId, Lattice, LatticeError};

/// Environment variable overriding the materialization cap.
pub const MAX_ELEMENTS_ENV: &str = "LATTICE_SB_MAX_ELEMENTS";

pub const DEFAULT_MAX_ELEMENTS: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FqError),
    #[error("Sub(F_{q}^{n}) exceeds the default dimension cap n <= {cap}; raise it with {MAX_ELEMENTS_ENV}")]
    DimensionCap { n: usize, q: u32, cap: usize },
    #[error("lattice would have {size} elements, above the cap of {cap}")]
    TooLarge { size: u128, cap: usize },
    #[error("unknown lattice name `{0}` (expected M3, N5, L1 or L2)")]
    UnknownName(String),
}

/// Limits on which lattices may be materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_elements: usize,
    /// When set, per-field dimension caps for projective lattices apply
    /// (n <= 4 for q = 2, n <= 3 for q = 3, n <= 2 otherwise).
    pub projective_dimension_caps: bool,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_elements: DEFAULT_MAX_ELEMENTS,
            projective_dimension_caps: true,
        }
    }
}

impl Caps {
    /// Defaults, or a pure element cap taken from `LATTICE_SB_MAX_ELEMENTS`.
    pub fn from_env() -> Self {
        match std::env::var(MAX_ELEMENTS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(max_elements) => Self {
                max_elements,
                projective_dimension_caps: false,
            },
            None => Self::default(),
        }
    }

    pub fn unlimited() -> Self {
        Self {
            max_elements: usize::MAX,
            projective_dimension_caps: false,
        }
    }

    pub fn projective_max_n(&self, q: u32) -> Option<usize> {
        self.projective_dimension_caps.then_some(match q {
            2 => 4,
            3 => 3,
            _ => 2,
        })
    }

    pub fn allows_projective(&self, n: usize, q: u32) -> bool {
        self.check_projective(n, q).is_ok()
    }

    fn check_projective(&self, n: usize, q: u32) -> Result<(), FamilyError> {
        if let Some(cap) = self.projective_max_n(q) {
            if n > cap {
                return Err(FamilyError::DimensionCap { n, q, cap });
            }
        }
        let size = projective_size(n, q as u128);
        if size > self.max_elements as u128 {
            return Err(FamilyError::TooLarge {
                size,
                cap: self.max_elements,
            });
        }
        Ok(())
    }
}

/// `|Sub(F_q^n)|`, saturating.
fn projective_size(n: usize, q: u128) -> u128 {
    // q-Pascal on u128 with saturation; only used for cap checks.
    let mut row = vec![1u128];
    for m in 1..=n {
        let mut next = vec![1u128; m + 1];
        for k in 1..m {
            let qk = q.checked_pow(k as u32).unwrap_or(u128::MAX);
            next[k] = row[k - 1].saturating_add(qk.saturating_mul(row[k]));
        }
        row = next;
    }
    row.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// `Sub(F_q^n)` together with the subspace behind every element id.
#[derive(Clone, Debug)]
pub struct ProjectiveLattice {
    pub lattice: Lattice,
    pub field: Fq,
    pub n: usize,
    subspaces: Vec<SubspaceRepr>,
    index: HashMap<SubspaceRepr, ElemId>,
}

impl ProjectiveLattice {
    pub fn subspace(&self, x: ElemId) -> &SubspaceRepr {
        &self.subspaces[x]
    }

    pub fn subspaces(&self) -> &[SubspaceRepr] {
        &self.subspaces
    }

    pub fn id_of(&self, s: &SubspaceRepr) -> Option<ElemId> {
        self.index.get(s).copied()
    }

    /// Parses a subspace in text form and returns its element id.
    pub fn parse_element(&self, text: &str) -> Result<ElemId, FqError> {
        let s = SubspaceRepr::parse(self.field, Some(self.n), text)?;
        Ok(self.id_of(&s).expect("every subspace is an element"))
    }
}

pub fn build_projective_lattice(n: usize, q: u32) -> Result<ProjectiveLattice, FamilyError> {
    build_projective_lattice_with(n, q, &Caps::from_env())
}

/// Elements ordered by dimension, then by Grassmannian enumeration order.
/// Element names are the subspace text form.
pub fn build_projective_lattice_with(
    n: usize,
    q: u32,
    caps: &Caps,
) -> Result<ProjectiveLattice, FamilyError> {
    let field = Fq::new(q)?;
    caps.check_projective(n, q)?;
    let mut subspaces = Vec::new();
    let mut levels = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let start = subspaces.len();
        subspaces.extend(grassmannian(field, n, k));
        levels.push(start..subspaces.len());
    }
    let mut covers = Vec::new();
    for k in 0..n {
        for a in levels[k].clone() {
            for b in levels[k + 1].clone() {
                if subspaces[a].is_subspace_of(&subspaces[b]) {
                    covers.push((a, b));
                }
            }
        }
    }
    let lattice = Lattice::build(subspaces.iter().map(ToString::to_string), &covers)?;
    let index = subspaces
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(ProjectiveLattice {
        lattice,
        field,
        n,
        subspaces,
        index,
    })
}

pub fn build_powerset_lattice(n: usize) -> Result<Lattice, FamilyError> {
    build_powerset_lattice_with(n, &Caps::from_env())
}

/// `Pow({1..n})`; element id is the bitmask of the subset (bit `i` for
/// element `i + 1`), so join is `|` and meet is `&` on ids.
pub fn build_powerset_lattice_with(n: usize, caps: &Caps) -> Result<Lattice, FamilyError> {
    let size = 1u128 << n.min(127);
    if n > 20 || size > caps.max_elements as u128 {
        return Err(FamilyError::TooLarge {
            size,
            cap: caps.max_elements.min(1 << 20),
        });
    }
    let size = size as usize;
    let mut covers = Vec::with_capacity(size * n / 2);
    for m in 0..size {
        for bit in 0..n {
            if m & (1 << bit) == 0 {
                covers.push((m, m | (1 << bit)));
            }
        }
    }
    Ok(Lattice::build((0..size).map(subset_name), &covers)?)
}

pub fn subset_name(mask: usize) -> String {
    let items: Vec<String> = (0..usize::BITS as usize)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| (b + 1).to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedLattice {
    M3,
    N5,
    L1,
    L2,
}

impl FromStr for NamedLattice {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "M3" => Ok(Self::M3),
            "N5" => Ok(Self::N5),
            "L1" | "L'" => Ok(Self::L1),
            "L2" => Ok(Self::L2),
            _ => Err(FamilyError::UnknownName(s.to_string())),
        }
    }
}

pub fn build_named_lattice(name: NamedLattice) -> Result<Lattice, FamilyError> {
    match name {
        // Sub(F_2^2)
        NamedLattice::M3 => Ok(build_projective_lattice_with(2, 2, &Caps::default())?.lattice),
        NamedLattice::N5 => Ok(Lattice::build(
            ["d", "a", "b", "c", "u"],
            &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        )?),
        NamedLattice::L1 => Ok(Lattice::build(
            ["{}", "{1}", "{1,2}", "{1,2,3}"],
            &[(0, 1), (1, 2), (2, 3)],
        )?),
        NamedLattice::L2 => Ok(l2()?.0),
    }
}

/// Vector of `F_2^n` from its integer code `a_1 + 2 a_2 + 4 a_3 + ...`.
pub fn vector_from_code(code: u32, n: usize) -> Vec<u8> {
    (0..n).map(|i| (code >> i & 1) as u8).collect()
}

/// The seven-element sublattice of `Sub(F_2^3)` generated by
/// `<{1}>, <{2}>, <{3}>, <{1,3}>, <{3,5}>` (vectors by integer code), whose
/// top is the join of the generators. Returns the lattice and the ids of
/// its elements inside `Sub(F_2^3)`.
pub fn l2() -> Result<(Lattice, Vec<ElemId>), FamilyError> {
    let proj = build_projective_lattice_with(3, 2, &Caps::default())?;
    let span = |codes: &[u32]| -> Result<ElemId, FamilyError> {
        let rows: Vec<Vec<u8>> = codes.iter().map(|&c| vector_from_code(c, 3)).collect();
        let s = proj.field.rref(3, &rows)?;
        Ok(proj.id_of(&s).expect("subspace present"))
    };
    let labelled = [
        ("<{0}>", span(&[0])?),
        ("<{1}>", span(&[1])?),
        ("<{2}>", span(&[2])?),
        ("<{3}>", span(&[3])?),
        ("<{1,3}>", span(&[1, 3])?),
        ("<{3,5}>", span(&[3, 5])?),
    ];
    let seed: Vec<ElemId> = labelled.iter().map(|&(_, id)| id).collect();
    let members = proj.lattice.closure_ids(&seed);
    let sub = proj.lattice.sublattice_closure(&seed)?;
    let names = members
        .iter()
        .map(|m| {
            labelled
                .iter()
                .find(|(_, id)| id == m)
                .map(|(label, _)| label.to_string())
                .unwrap_or_else(|| "F_2^3".to_string())
        })
        .collect();
    Ok((sub.with_names(names), members))
}
