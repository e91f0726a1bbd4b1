//! Linear algebra over prime fields and canonical subspace representations.
//!
//! Subspaces of `F_q^n` are stored by their reduced row echelon generator
//! matrix, which makes equality of subspaces plain structural equality.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FqError {
    #[error("{0} is not a prime below 256")]
    NotPrime(u32),
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("entry {entry} is not in F_{q}")]
    EntryOutOfRange { entry: u32, q: u32 },
    #[error("row {row} has length {len}, expected {expected}")]
    RowLength {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("cannot parse subspace `{0}`")]
    Parse(String),
}

/// The prime field `F_q`, with `q < 256`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fq {
    q: u32,
}

pub fn is_prime(q: u64) -> bool {
    q >= 2
        && (2..)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

impl Fq {
    pub fn new(q: u32) -> Result<Self, FqError> {
        if q < 256 && is_prime(q as u64) {
            Ok(Self { q })
        } else {
            Err(FqError::NotPrime(q))
        }
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u32 + b as u32) % self.q) as u8
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        ((a as u32 + self.q - b as u32) % self.q) as u8
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u32 * b as u32) % self.q) as u8
    }

    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "zero has no inverse");
        // a^(q-2)
        let mut result = 1u32;
        let mut base = a as u32 % self.q;
        let mut e = self.q - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.q;
            }
            base = base * base % self.q;
            e >>= 1;
        }
        result as u8
    }

    fn check_rows(&self, n: usize, rows: &[Vec<u8>]) -> Result<(), FqError> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(FqError::RowLength {
                    row: i,
                    len: r.len(),
                    expected: n,
                });
            }
            if let Some(&e) = r.iter().find(|&&e| e as u32 >= self.q) {
                return Err(FqError::EntryOutOfRange {
                    entry: e as u32,
                    q: self.q,
                });
            }
        }
        Ok(())
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    /// Zero rows are removed.
    fn reduce(&self, rows: &mut Vec<Vec<u8>>) -> Vec<usize> {
        let width = rows.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..width {
            let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(r, p);
            let inv = self.inv(rows[r][col]);
            for e in rows[r].iter_mut() {
                *e = self.mul(*e, inv);
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row[col] != 0 {
                    let f = row[col];
                    for (e, &p) in row.iter_mut().zip(&pivot_row) {
                        *e = self.sub(*e, self.mul(f, p));
                    }
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        pivots
    }

    /// Canonical form of the row space of `rows`, all of length `n`.
    pub fn rref(&self, n: usize, rows: &[Vec<u8>]) -> Result<SubspaceRepr, FqError> {
        self.check_rows(n, rows)?;
        let mut m = rows.to_vec();
        self.reduce(&mut m);
        Ok(SubspaceRepr {
            q: self.q,
            n,
            rows: m,
        })
    }

    /// Rank of a matrix.
    pub fn rank(&self, rows: &[Vec<u8>]) -> usize {
        let mut m = rows.to_vec();
        self.reduce(&mut m).len()
    }

    /// Entrywise `a − b`.
    pub fn matrix_sub(&self, a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
        a.iter()
            .zip(b)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| self.sub(x, y)).collect())
            .collect()
    }
}

/// A subspace of `F_q^n`, held as its reduced row echelon generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubspaceRepr {
    q: u32,
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl SubspaceRepr {
    pub fn zero(q: u32, n: usize) -> Self {
        Self {
            q,
            n,
            rows: Vec::new(),
        }
    }

    pub fn full(field: Fq, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
            .collect();
        Self {
            q: field.order(),
            n,
            rows,
        }
    }

    pub fn field(&self) -> Fq {
        Fq { q: self.q }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .position(|&e| e != 0)
                    .expect("rref rows are nonzero")
            })
            .collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), FqError> {
        if self.n != other.n || self.q != other.q {
            Err(FqError::AmbientMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    /// `A + B`.
    pub fn sum(&self, other: &Self) -> Result<Self, FqError> {
        self.check_compatible(other)?;
        let rows: Vec<Vec<u8>> = self.rows.iter().chain(&other.rows).cloned().collect();
        self.field().rref(self.n, &rows)
    }

    /// `A ∩ B`, via the Zassenhaus algorithm.
    pub fn intersect(&self, other: &Self) -> Result<Self, FqError> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut m: Vec<Vec<u8>> = self
            .rows
            .iter()
            .map(|r| r.iter().chain(r.iter()).copied().collect())
            .chain(
                other
                    .rows
                    .iter()
                    .map(|r| r.iter().copied().chain(std::iter::repeat_n(0, n)).collect()),
            )
            .collect();
        let field = self.field();
        if m.is_empty() {
            return Ok(Self::zero(self.q, n));
        }
        field.reduce(&mut m);
        let basis: Vec<Vec<u8>> = m
            .into_iter()
            .filter(|r| r[..n].iter().all(|&e| e == 0))
            .map(|r| r[n..].to_vec())
            .collect();
        field.rref(n, &basis)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.sum(other).is_ok_and(|s| s == *other)
    }

    /// Parses the text form `"101/011"`; the zero subspace may be written
    /// as a single all-zero row.
    pub fn parse(field: Fq, n: Option<usize>, text: &str) -> Result<Self, FqError> {
        let text = text.trim();
        let bad = || FqError::Parse(text.to_string());
        if text.is_empty() {
            return Err(bad());
        }
        let mut rows = Vec::new();
        for part in text.split('/') {
            let row = part
                .trim()
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<Vec<u8>, _>>()?;
            if row.is_empty() {
                return Err(bad());
            }
            rows.push(row);
        }
        let width = n.unwrap_or(rows[0].len());
        field.rref(width, &rows)
    }
}

impl fmt::Display for SubspaceRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "{}", "0".repeat(self.n.max(1)));
        }
        let text: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| char::from(b'0' + e)).collect())
            .collect();
        write!(f, "{}", text.join("/"))
    }
}

/// All `k`-dimensional subspaces of `F_q^n`, each exactly once, by
/// enumerating pivot patterns and the free entries of each pattern.
pub fn grassmannian(field: Fq, n: usize, k: usize) -> impl Iterator<Item = SubspaceRepr> {
    let q = field.order();
    let patterns: Vec<Vec<usize>> = if k > n {
        Vec::new()
    } else {
        combinations(n, k)
    };
    patterns.into_iter().flat_map(move |pivots| {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                let pivots = pivots.clone();
                ((p + 1)..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let count = (q as u64).pow(free.len() as u32);
        (0..count).map(move |mut code| {
            let mut rows = vec![vec![0u8; n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                rows[i][p] = 1;
            }
            for &(i, c) in &free {
                rows[i][c] = (code % q as u64) as u8;
                code /= q as u64;
            }
            SubspaceRepr { q, n, rows }
        })
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fq {
        Fq::new(2).unwrap()
    }

    #[test]
    fn field_arithmetic() {
        let f = Fq::new(7).unwrap();
        for a in 1..7u8 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.sub(2, 5), 4);
        assert!(Fq::new(4).is_err());
        assert!(Fq::new(1).is_err());
    }

    #[test]
    fn rref_example() {
        let s = f2().rref(3, &[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(s.rows(), &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(s.pivots(), vec![0, 1]);
        assert_eq!(s.to_string(), "101/011");
    }

    #[test]
    fn rref_zero_and_identity() {
        let z = f2().rref(3, &[vec![0, 0, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!(z.dim(), 0);
        assert_eq!(z, SubspaceRepr::zero(2, 3));
        let id = f2()
            .rref(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
        assert_eq!(id, SubspaceRepr::full(f2(), 3));
    }

    #[test]
    fn rref_rejects_bad_entries() {
        assert_eq!(
            f2().rref(2, &[vec![2, 0]]).unwrap_err(),
            FqError::EntryOutOfRange { entry: 2, q: 2 }
        );
        assert!(matches!(
            f2().rref(3, &[vec![1, 0]]),
            Err(FqError::RowLength { .. })
        ));
    }

    #[test]
    fn sum_and_intersection_in_plane() {
        let a = f2().rref(2, &[vec![0, 1]]).unwrap();
        let b = f2().rref(2, &[vec![1, 0]]).unwrap();
        assert_eq!(a.sum(&b).unwrap(), SubspaceRepr::full(f2(), 2));
        assert_eq!(a.intersect(&b).unwrap().dim(), 0);
        assert_eq!(a.sum(&a).unwrap(), a);
        assert_eq!(a.intersect(&a).unwrap(), a);
    }

    #[test]
    fn two_planes_in_three_space() {
        // A1 = <e1, e2>, A2 = <e2, e1 + e3>
        let a1 = f2().rref(3, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let a2 = f2().rref(3, &[vec![0, 1, 0], vec![1, 0, 1]]).unwrap();
        let e2 = f2().rref(3, &[vec![0, 1, 0]]).unwrap();
        assert_eq!(a1.intersect(&a2).unwrap(), e2);
        assert_eq!(a1.sum(&a2).unwrap(), SubspaceRepr::full(f2(), 3));
    }

    #[test]
    fn ambient_mismatch() {
        let a = SubspaceRepr::zero(2, 2);
        let b = SubspaceRepr::zero(2, 3);
        assert_eq!(a.sum(&b).unwrap_err(), FqError::AmbientMismatch(2, 3));
    }

    #[test]
    fn grassmannian_small() {
        let lines: Vec<String> = grassmannian(f2(), 2, 1).map(|s| s.to_string()).collect();
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["01", "10", "11"]);
        assert_eq!(grassmannian(f2(), 5, 0).count(), 1);
        assert_eq!(grassmannian(f2(), 4, 2).count(), 35);
        assert_eq!(grassmannian(f2(), 2, 3).count(), 0);
    }

    #[test]
    fn parse_text_form() {
        let s = SubspaceRepr::parse(f2(), None, "110/011").unwrap();
        assert_eq!(s.to_string(), "101/011");
        let z = SubspaceRepr::parse(f2(), Some(3), "000").unwrap();
        assert_eq!(z.dim(), 0);
        assert_eq!(z.to_string(), "000");
        assert!(SubspaceRepr::parse(f2(), None, "1x1").is_err());
        assert!(SubspaceRepr::parse(f2(), None, "").is_err());
        assert!(SubspaceRepr::parse(f2(), Some(3), "10").is_err());
    }
}
