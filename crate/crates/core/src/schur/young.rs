//! Two-row Young diagrams and their dimensions.

use std::fmt;

use crate::error::{Error, Result};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn from_int(v: i32) -> Self {
        Self(2 * v)
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Adds one whole unit.
    pub const fn succ(self) -> Self {
        Self(self.0 + 2)
    }

    pub const fn pred(self) -> Self {
        Self(self.0 - 2)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Two-row partition `[lambda1, lambda2]` of `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct YoungDiagram {
    lambda1: usize,
    lambda2: usize,
}

impl YoungDiagram {
    pub fn new(lambda1: usize, lambda2: usize) -> Result<Self> {
        if lambda1 < lambda2 || lambda1 == 0 {
            return Err(Error::InvalidInput(format!("[{lambda1},{lambda2}] is not a valid two-row diagram")));
        }
        Ok(Self { lambda1, lambda2 })
    }

    /// The diagram with total spin `two_j / 2` on `k` boxes.
    pub fn from_spin(k: usize, two_j: usize) -> Result<Self> {
        if two_j > k || (k - two_j) % 2 != 0 {
            return Err(Error::InvalidInput(format!("no two-row diagram of {k} boxes has 2j = {two_j}")));
        }
        Self::new((k + two_j) / 2, (k - two_j) / 2)
    }

    /// The single-row (symmetric) diagram `[k, 0]`.
    pub fn symmetric(k: usize) -> Result<Self> {
        Self::new(k, 0)
    }

    #[inline]
    pub fn lambda1(&self) -> usize {
        self.lambda1
    }

    #[inline]
    pub fn lambda2(&self) -> usize {
        self.lambda2
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.lambda1 + self.lambda2
    }

    /// Twice the SU(2) spin, `lambda1 - lambda2`.
    #[inline]
    pub fn two_j(&self) -> usize {
        self.lambda1 - self.lambda2
    }

    pub fn spin(&self) -> HalfInt {
        HalfInt::from_twice(self.two_j() as i32)
    }

    pub fn is_symmetric(&self) -> bool {
        self.lambda2 == 0
    }

    /// Number of weights, `2j + 1`.
    pub fn num_weights(&self) -> usize {
        self.two_j() + 1
    }

    /// Weights `-j, -j+1, ..., j` in ascending order.
    pub fn weights(&self) -> Vec<HalfInt> {
        let tj = self.two_j() as i32;
        (0..=self.two_j()).map(|i| HalfInt::from_twice(-tj + 2 * i as i32)).collect()
    }

    /// Position of `omega` in [`Self::weights`], if it is a weight of this diagram.
    pub fn weight_index(&self, omega: HalfInt) -> Option<usize> {
        let tj = self.two_j() as i32;
        let t = omega.twice();
        if t.abs() > tj || (t + tj) % 2 != 0 {
            return None;
        }
        Some(((t + tj) / 2) as usize)
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lambda1, self.lambda2)
    }
}

/// All two-row diagrams of `k` boxes, by decreasing `lambda1`.
pub fn list_diagrams(k: usize) -> Result<Vec<YoungDiagram>> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    Ok((0..=k / 2).map(|l2| YoungDiagram { lambda1: k - l2, lambda2: l2 }).collect())
}

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Hook-length dimension of the symmetric-group irrep:
/// `k! (lambda1 - lambda2 + 1) / (lambda2! (lambda1 + 1)!)`.
pub fn hook_dim(lam: &YoungDiagram) -> u128 {
    binomial(lam.k(), lam.lambda2) * (lam.two_j() as u128 + 1) / (lam.lambda1 as u128 + 1)
}

/// Multiplicity of the spin-`j` irrep in `k` qubits, from the one-box-at-a-time
/// recursion `C[l1, l2] = C[l1 - 1, l2] + C[l1, l2 - 1]`.
pub fn multiplicity(k: usize, lam: &YoungDiagram) -> Result<u128> {
    if lam.k() != k {
        return Err(Error::InvalidInput(format!("{lam} is not a diagram of {k} boxes")));
    }
    // table[l2] for the current number of boxes m; entries with l1 < l2 stay 0
    let mut table = vec![0u128; k / 2 + 1];
    table[0] = 1; // m = 1: [1,0]
    for m in 2..=k {
        let mut next = vec![0u128; k / 2 + 1];
        for l2 in 0..=m / 2 {
            let l1 = m - l2;
            // remove a box from row 1: [l1 - 1, l2], valid when l1 - 1 >= l2
            let from_row1 = if l1 > l2 { table[l2] } else { 0 };
            let from_row2 = if l2 > 0 { table[l2 - 1] } else { 0 };
            next[l2] = from_row1 + from_row2;
        }
        table = next;
    }
    Ok(table[lam.lambda2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(l1: usize, l2: usize) -> YoungDiagram {
        YoungDiagram::new(l1, l2).unwrap()
    }

    /// Brute-force count of standard tableaux: fill boxes 1..k keeping rows
    /// and columns increasing, i.e. row 2 never longer than row 1.
    fn count_tableaux(l1: usize, l2: usize) -> u128 {
        fn go(r1: usize, r2: usize, l1: usize, l2: usize) -> u128 {
            if r1 == l1 && r2 == l2 {
                return 1;
            }
            let mut n = 0;
            if r1 < l1 {
                n += go(r1 + 1, r2, l1, l2);
            }
            if r2 < l2 && r2 < r1 {
                n += go(r1, r2 + 1, l1, l2);
            }
            n
        }
        go(0, 0, l1, l2)
    }

    #[test]
    fn diagrams_small_k() {
        assert_eq!(list_diagrams(3).unwrap(), vec![d(3, 0), d(2, 1)]);
        assert_eq!(list_diagrams(2).unwrap(), vec![d(2, 0), d(1, 1)]);
        assert_eq!(list_diagrams(4).unwrap(), vec![d(4, 0), d(3, 1), d(2, 2)]);
        assert!(list_diagrams(0).is_err());
    }

    #[test]
    fn hook_dim_examples() {
        assert_eq!(hook_dim(&d(2, 1)), 2);
        assert_eq!(hook_dim(&d(7, 0)), 1);
        assert_eq!(hook_dim(&d(3, 1)), 3);
        assert_eq!(count_tableaux(3, 1), 3);
    }

    #[test]
    fn hook_dim_matches_tableau_count() {
        for k in 1..=14 {
            for lam in list_diagrams(k).unwrap() {
                assert_eq!(hook_dim(&lam), count_tableaux(lam.lambda1(), lam.lambda2()), "{lam}");
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(3, &d(2, 1)).unwrap(), 2);
        assert_eq!(multiplicity(6, &d(4, 2)).unwrap(), 9);
        let total: u128 = list_diagrams(4)
            .unwrap()
            .iter()
            .map(|l| multiplicity(4, l).unwrap() * (l.two_j() as u128 + 1))
            .sum();
        assert_eq!(total, 16);
        assert!(multiplicity(5, &d(2, 1)).is_err());
    }

    #[test]
    fn rejects_bad_diagrams() {
        assert!(YoungDiagram::new(1, 2).is_err());
        assert!(YoungDiagram::new(0, 0).is_err());
        assert!(YoungDiagram::from_spin(4, 1).is_err());
        assert_eq!(YoungDiagram::from_spin(5, 1).unwrap(), d(3, 2));
    }

    #[test]
    fn weights_and_indices() {
        let lam = d(3, 1);
        let ws = lam.weights();
        assert_eq!(ws, vec![HalfInt::from_int(-1), HalfInt::ZERO, HalfInt::from_int(1)]);
        assert_eq!(lam.weight_index(HalfInt::from_int(1)), Some(2));
        assert_eq!(lam.weight_index(HalfInt::from_twice(1)), None);
        assert_eq!(lam.weight_index(HalfInt::from_int(2)), None);
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
    }
}
