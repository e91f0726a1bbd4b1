//! Upper and lower bounds on the size of lattice schemes.
//!
//! The upper bound punctures a scheme `α` times by a coatom, each time
//! losing at most `β` units of minimum distance (`β = 1` on distributive
//! lattices, `β = 2` on modular ones), and counts the elements of the
//! resulting height-`(n − α)` lattice. Every quantity here is exact.

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::counting::{binomial, gaussian, BigNat};
use crate::families::{build_projective_lattice_with, Caps, FamilyError};
use crate::lattice::{ElemId, Lattice};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("minimum distance must be at least 1 (got {0})")]
    InvalidDistance(usize),
    #[error("minimum distance {d} exceeds the length {n}")]
    DistanceExceedsLength { n: usize, d: usize },
    #[error("puncture budget {alpha} exceeds the lattice height {n}")]
    AlphaExceedsHeight { alpha: usize, n: usize },
    #[error("invalid height window [{m}, {max}] for height {n}")]
    InvalidWindow { m: usize, max: usize, n: usize },
    #[error("dimension {l} exceeds the ambient dimension {n}")]
    DimensionTooLarge { l: usize, n: usize },
    #[error("the lattice is not modular, so no puncturing bound applies")]
    NotModular,
    #[error("cannot materialize the lattice: {0}")]
    NotMaterializable(#[from] FamilyError),
}

/// Where the Whitney numbers of the punctured lattice come from.
#[derive(Clone, Copy, Debug)]
pub enum Family<'l> {
    Powerset,
    /// `q >= 2`; prime powers allowed since only Gaussian binomials are used.
    Projective {
        q: u64,
    },
    Explicit(&'l Lattice),
}

impl Family<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Powerset => "powerset",
            Family::Projective { .. } => "projective",
            Family::Explicit(_) => "explicit",
        }
    }

    pub fn q(&self) -> Option<u64> {
        match self {
            Family::Projective { q } => Some(*q),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Distributive,
    /// Modular but not distributive.
    Modular,
}

impl Structure {
    /// Largest drop in minimum distance caused by one puncture by a coatom.
    pub fn drop_per_puncture(self) -> usize {
        match self {
            Structure::Distributive => 1,
            Structure::Modular => 2,
        }
    }

    /// `α_L = d − 1` (distributive) or `⌊(d − 1)/2⌋` (modular).
    pub fn alpha(self, d: usize) -> usize {
        (d - 1) / self.drop_per_puncture()
    }
}

/// Lattice height `n`, minimum distance `d` and the family.
#[derive(Clone, Copy, Debug)]
pub struct BoundParams<'l> {
    pub family: Family<'l>,
    pub n: usize,
    pub d: usize,
    pub structure: Structure,
}

impl<'l> BoundParams<'l> {
    pub fn powerset(n: usize, d: usize) -> Result<Self, BoundError> {
        Self::checked(Family::Powerset, n, d, Structure::Distributive)
    }

    pub fn projective(q: u64, n: usize, d: usize) -> Result<Self, BoundError> {
        Self::checked(Family::Projective { q }, n, d, Structure::Modular)
    }

    /// Height and structure are read off the lattice.
    pub fn explicit(lattice: &'l Lattice, d: usize) -> Result<Self, BoundError> {
        let structure = if lattice.is_distributive() {
            Structure::Distributive
        } else if lattice.is_modular() {
            Structure::Modular
        } else {
            return Err(BoundError::NotModular);
        };
        Self::checked(Family::Explicit(lattice), lattice.rank(), d, structure)
    }

    fn checked(
        family: Family<'l>,
        n: usize,
        d: usize,
        structure: Structure,
    ) -> Result<Self, BoundError> {
        if d == 0 {
            return Err(BoundError::InvalidDistance(d));
        }
        let alpha = structure.alpha(d);
        if alpha > n {
            return Err(BoundError::AlphaExceedsHeight { alpha, n });
        }
        Ok(Self {
            family,
            n,
            d,
            structure,
        })
    }

    pub fn alpha(&self) -> usize {
        self.structure.alpha(self.d)
    }

    /// Number of height-`k` elements in the lattice left after puncturing.
    fn punctured_count(&self, heights: std::ops::RangeInclusive<usize>) -> BigNat {
        let top = self.n - self.alpha();
        match self.family {
            Family::Powerset => heights.map(|k| binomial(top as u64, k as u64)).sum(),
            Family::Projective { q } => heights.map(|k| gaussian(top as u64, k as u64, q)).sum(),
            Family::Explicit(l) => {
                // Largest principal ideal below an element of height n − α.
                let best = l
                    .elements()
                    .filter(|&w| l.height(w) == top)
                    .map(|w| {
                        l.down_set(w)
                            .filter(|&x| heights.contains(&l.height(x)))
                            .count()
                    })
                    .max()
                    .unwrap_or(0);
                BigNat::from(best)
            }
        }
    }
}

/// `Σ_{k=0}^{n−α} c(n − α, k)`.
pub fn lsb(params: &BoundParams<'_>) -> BigNat {
    params.punctured_count(0..=params.n - params.alpha())
}

/// `Σ_{k=m−α}^{M−α} c(n − α, k)`, terms with `k < 0` dropped.
pub fn lsb_windowed(params: &BoundParams<'_>, m: usize, max: usize) -> Result<BigNat, BoundError> {
    if m > max || max > params.n {
        return Err(BoundError::InvalidWindow {
            m,
            max,
            n: params.n,
        });
    }
    let alpha = params.alpha();
    if max < alpha {
        return Ok(BigNat::zero());
    }
    Ok(params.punctured_count(m.saturating_sub(alpha)..=max - alpha))
}

/// `2^{n−d+1}`.
pub fn classical_singleton(n: usize, d: usize) -> Result<BigNat, BoundError> {
    if d == 0 {
        return Err(BoundError::InvalidDistance(d));
    }
    if d > n {
        return Err(BoundError::DistanceExceedsLength { n, d });
    }
    Ok(BigNat::one() << (n - d + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KksBound {
    pub value: BigNat,
    pub alpha: usize,
    /// `l < α`: the formula has no meaning and the value is reported as 1.
    pub degenerate: bool,
}

/// `[n−α, l−α]_q` with `α = ⌊(d − 1)/2⌋`.
pub fn kks_bound(n: usize, l: usize, d: usize, q: u64) -> Result<KksBound, BoundError> {
    if d == 0 {
        return Err(BoundError::InvalidDistance(d));
    }
    if l > n {
        return Err(BoundError::DimensionTooLarge { l, n });
    }
    let alpha = (d - 1) / 2;
    if l < alpha {
        return Ok(KksBound {
            value: BigNat::one(),
            alpha,
            degenerate: true,
        });
    }
    Ok(KksBound {
        value: gaussian((n - alpha) as u64, (l - alpha) as u64, q),
        alpha,
        degenerate: false,
    })
}

/// `Σ_{k=0}^{n−⌊(d−1)/2⌋} [n − ⌊(d−1)/2⌋, k]_q`.
pub fn projective_singleton(n: usize, d: usize, q: u64) -> Result<BigNat, BoundError> {
    if d == 0 {
        return Err(BoundError::InvalidDistance(d));
    }
    let alpha = (d - 1) / 2;
    if alpha > n {
        return Err(BoundError::AlphaExceedsHeight { alpha, n });
    }
    let top = (n - alpha) as u64;
    Ok((0..=top).map(|k| gaussian(top, k, q)).sum())
}

/// Elements within height distance `radius` of `center`.
pub fn ball_volume(lattice: &Lattice, center: ElemId, radius: usize) -> BigNat {
    BigNat::from(ball_count(lattice, center, radius, None))
}

fn ball_count(
    lattice: &Lattice,
    center: ElemId,
    radius: usize,
    window: Option<(usize, usize)>,
) -> usize {
    lattice
        .elements()
        .filter(|&x| in_window(lattice, x, window))
        .filter(|&x| lattice.height_metric(center, x) <= radius)
        .count()
}

fn in_window(lattice: &Lattice, x: ElemId, window: Option<(usize, usize)>) -> bool {
    window.is_none_or(|(m, max)| (m..=max).contains(&lattice.height(x)))
}

/// `⌈|space| / max_x |B(x, d − 1)|⌉`, where the space is the whole lattice or
/// the elements with height in `window`. A greedy packing always reaches it.
pub fn gv_lower_lattice(
    lattice: &Lattice,
    d: usize,
    window: Option<(usize, usize)>,
) -> Result<BigNat, BoundError> {
    if d == 0 {
        return Err(BoundError::InvalidDistance(d));
    }
    let space: Vec<ElemId> = lattice
        .elements()
        .filter(|&x| in_window(lattice, x, window))
        .collect();
    let max_ball = space
        .iter()
        .map(|&c| ball_count(lattice, c, d - 1, window))
        .max()
        .unwrap_or(1);
    Ok(BigNat::from(space.len().div_ceil(max_ball)))
}

/// Classical `⌈2^n / Σ_{i<d} C(n, i)⌉`; balls in `Pow(n)` do not depend on
/// the center.
pub fn gv_lower_powerset(n: usize, d: usize) -> Result<BigNat, BoundError> {
    if d == 0 {
        return Err(BoundError::InvalidDistance(d));
    }
    let volume: BigNat = (0..d.min(n + 1))
        .map(|i| binomial(n as u64, i as u64))
        .sum();
    let space = BigNat::one() << n;
    Ok(Integer::div_ceil(&space, &volume))
}

/// GV-type lower bound for a family, materializing the lattice if needed.
pub fn gv_lower(
    family: Family<'_>,
    n: usize,
    d: usize,
    window: Option<(usize, usize)>,
    caps: &Caps,
) -> Result<BigNat, BoundError> {
    match family {
        Family::Powerset if window.is_none() => gv_lower_powerset(n, d),
        Family::Powerset => {
            let l = crate::families::build_powerset_lattice_with(n, caps)?;
            gv_lower_lattice(&l, d, window)
        }
        Family::Projective { q } => {
            let q = u32::try_from(q).unwrap_or(u32::MAX);
            let p = build_projective_lattice_with(n, q, caps)?;
            gv_lower_lattice(&p.lattice, d, window)
        }
        Family::Explicit(l) => gv_lower_lattice(l, d, window),
    }
}

/// One row of a bound table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub family: String,
    pub q: Option<u64>,
    pub n: usize,
    pub d: usize,
    pub window: Option<(usize, usize)>,
    pub lsb: BigNat,
    pub lsb_windowed: Option<BigNat>,
    pub gv_lower: Option<BigNat>,
    pub oracle_max: Option<BigNat>,
}

impl BoundReport {
    /// The upper bound that applies to this row: windowed if a window is set.
    pub fn upper(&self) -> &BigNat {
        self.lsb_windowed.as_ref().unwrap_or(&self.lsb)
    }

    /// `gv_lower ≤ oracle_max ≤ upper`, over whichever values are present.
    pub fn sandwich_holds(&self) -> bool {
        let upper = self.upper();
        match (&self.gv_lower, &self.oracle_max) {
            (Some(g), Some(o)) => g <= o && o <= upper,
            (None, Some(o)) => o <= upper,
            (Some(g), None) => g <= upper,
            (None, None) => true,
        }
    }
}
