//! Exact combinatorial counts: binomials, Gaussian binomials and Whitney
//! numbers.
//!
//! Gaussian binomials have two independent implementations, the product
//! formula and the q-Pascal recurrence. They are kept side by side and
//! checked against each other; every bound in this crate rests on them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::Lattice;

/// Arbitrary-precision natural number.
pub type BigNat = BigUint;

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigNat {
    if k > n {
        return BigNat::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigNat::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `[n k]_q` via `∏_{i<k} (q^{n−i} − 1) / (q^{k−i} − 1)` with exact division.
pub fn gaussian(n: u64, k: u64, q: u64) -> BigNat {
    assert!(q >= 2, "Gaussian binomial needs q >= 2");
    if k > n {
        return BigNat::zero();
    }
    let k = k.min(n - k);
    let q = BigNat::from(q);
    let mut num = BigNat::one();
    let mut den = BigNat::one();
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((k - i) as u32) - 1u32;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quot
}

/// `[n k]_q` via `[n k]_q = [n−1 k−1]_q + q^k [n−1 k]_q`.
pub fn gaussian_pascal(n: u64, k: u64, q: u64) -> BigNat {
    assert!(q >= 2, "Gaussian binomial needs q >= 2");
    if k > n {
        return BigNat::zero();
    }
    let q = BigNat::from(q);
    let k = k as usize;
    let mut row = vec![BigNat::one()];
    for m in 1..=n as usize {
        let mut next = vec![BigNat::one(); m + 1];
        for j in 1..m.min(k + 1) {
            next[j] = &row[j - 1] + q.pow(j as u32) * &row[j];
        }
        row = next;
    }
    row[k].clone()
}

/// Number of elements at each height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhitneyTable {
    pub counts: Vec<BigNat>,
}

impl WhitneyTable {
    pub fn total(&self) -> BigNat {
        self.counts.iter().sum()
    }

    pub fn get(&self, k: usize) -> BigNat {
        self.counts.get(k).cloned().unwrap_or_default()
    }

    /// Counts as machine integers (they always fit for materialized lattices).
    pub fn to_vec(&self) -> Vec<u64> {
        self.counts
            .iter()
            .map(|c| c.to_u64().expect("materialized counts fit in u64"))
            .collect()
    }
}

impl fmt::Display for WhitneyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn whitney(lattice: &Lattice) -> WhitneyTable {
    let mut counts = vec![BigNat::zero(); lattice.rank() + 1];
    for &h in lattice.heights() {
        counts[h] += 1u32;
    }
    WhitneyTable { counts }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown lattice family `{0}` (expected powerset or projective)")]
pub struct UnknownFamily(pub String);

/// Lattice families whose Whitney numbers have closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedFamily {
    Powerset,
    /// Any `q >= 2`; prime powers are fine here since only arithmetic is done.
    Projective {
        q: u64,
    },
}

impl FromStr for ClosedFamily {
    type Err = UnknownFamily;

    /// `powerset`, `projective` (q = 2) or `projective:<q>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "powerset" => Ok(Self::Powerset),
            None if s == "projective" => Ok(Self::Projective { q: 2 }),
            Some(("projective", q)) => q
                .parse::<u64>()
                .ok()
                .filter(|&q| q >= 2)
                .map(|q| Self::Projective { q })
                .ok_or_else(|| UnknownFamily(s.to_string())),
            _ => Err(UnknownFamily(s.to_string())),
        }
    }
}

/// Number of height-`k` elements in the height-`n` member of the family.
pub fn whitney_closed_form(family: ClosedFamily, n: u64, k: u64) -> BigNat {
    match family {
        ClosedFamily::Powerset => binomial(n, k),
        ClosedFamily::Projective { q } => gaussian(n, k, q),
    }
}

/// `log2(x)` rounded to 4 decimal places; `None` for zero.
pub fn log2_4dp(x: &BigNat) -> Option<String> {
    if x.is_zero() {
        return None;
    }
    let bits = x.bits();
    let value = if bits <= 64 {
        x.to_u64().expect("fits") as f64
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_u64().expect("fits") as f64;
        return Some(format!("{:.4}", top.log2() + shift as f64));
    };
    Some(format!("{:.4}", value.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subsets(n: u32, k: u32) -> u64 {
        (0u32..1 << n).filter(|m| m.count_ones() == k).count() as u64
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigNat::from(10u32));
        assert_eq!(binomial(9, 0), BigNat::one());
        assert_eq!(binomial(3, 4), BigNat::zero());
        assert_eq!(binomial(4, 2), BigNat::from(brute_subsets(4, 2)));
        for n in 0..12 {
            for k in 0..=n {
                assert_eq!(
                    binomial(n as u64, k as u64),
                    BigNat::from(brute_subsets(n, k))
                );
            }
        }
    }

    #[test]
    fn gaussians() {
        assert_eq!(gaussian(4, 2, 2), BigNat::from(35u32));
        assert_eq!(gaussian(3, 1, 2), BigNat::from(7u32));
        assert_eq!(gaussian(7, 0, 3), BigNat::one());
        assert_eq!(gaussian(2, 3, 2), BigNat::zero());
        assert_eq!(gaussian_pascal(4, 2, 2), BigNat::from(35u32));
    }

    #[test]
    fn gaussian_symmetry_and_routes_agree() {
        for q in 2..=5 {
            for n in 0..=12 {
                for k in 0..=n {
                    let g = gaussian(n, k, q);
                    assert_eq!(g, gaussian(n, n - k, q), "symmetry n={n} k={k} q={q}");
                    assert_eq!(g, gaussian_pascal(n, k, q), "routes n={n} k={k} q={q}");
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            whitney_closed_form(ClosedFamily::Powerset, 6, 3),
            BigNat::from(20u32)
        );
        let proj = ClosedFamily::Projective { q: 2 };
        assert_eq!(whitney_closed_form(proj, 3, 1), BigNat::from(7u32));
        assert_eq!(whitney_closed_form(proj, 3, 3), BigNat::one());
        assert_eq!(
            "projective:3".parse(),
            Ok(ClosedFamily::Projective { q: 3 })
        );
        assert_eq!("powerset".parse(), Ok(ClosedFamily::Powerset));
        assert!("hypercube".parse::<ClosedFamily>().is_err());
        assert!("projective:1".parse::<ClosedFamily>().is_err());
    }

    #[test]
    fn log2_rendering() {
        assert_eq!(log2_4dp(&BigNat::from(32u32)).unwrap(), "5.0000");
        assert_eq!(log2_4dp(&BigNat::from(3u32)).unwrap(), "1.5850");
        assert_eq!(log2_4dp(&(BigNat::one() << 200u32)).unwrap(), "200.0000");
        assert_eq!(log2_4dp(&BigNat::zero()), None);
    }
}
