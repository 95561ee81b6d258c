//! Young diagrams and pairs of them, which index the torus fixed points of
//! the framed moduli space of rank-2 sheaves.

use crate::error::{CoreError, Result};
use std::fmt;

/// A partition stored row by row (English convention), rows weakly
/// decreasing and positive. Boxes are addressed 1-indexed as `(row, col)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    pub fn empty() -> Self {
        YoungDiagram { rows: Vec::new() }
    }

    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.contains(&0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(CoreError::Input(format!("not a partition: {:?}", rows)));
        }
        Ok(YoungDiagram { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Length of row `i` (zero outside the diagram).
    pub fn row_len(&self, i: usize) -> usize {
        if i >= 1 && i <= self.rows.len() {
            self.rows[i - 1]
        } else {
            0
        }
    }

    /// Height of column `j` (zero outside the diagram).
    pub fn col_len(&self, j: usize) -> usize {
        self.rows.iter().filter(|&&r| r >= j).count()
    }

    pub fn contains(&self, (i, j): (usize, usize)) -> bool {
        i >= 1 && j >= 1 && self.row_len(i) >= j
    }

    pub fn transpose(&self) -> Self {
        let width = self.rows.first().copied().unwrap_or(0);
        YoungDiagram { rows: (1..=width).map(|j| self.col_len(j)).collect() }
    }

    /// All boxes in row-major order.
    pub fn boxes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.size());
        for (i, &r) in self.rows.iter().enumerate() {
            for j in 1..=r {
                out.push((i + 1, j));
            }
        }
        out
    }
}

impl fmt::Debug for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

/// Arm of `s` in `y` and leg of `s` in `y2`. The box must lie in `y`; the leg
/// may be negative when `s` sticks out of `y2`.
pub fn arm_leg(y: &YoungDiagram, y2: &YoungDiagram, s: (usize, usize)) -> Result<(i64, i64)> {
    if !y.contains(s) {
        return Err(CoreError::Input(format!("box {:?} not in diagram {:?}", s, y)));
    }
    let arm = y.row_len(s.0) as i64 - s.1 as i64;
    let leg = y2.col_len(s.1) as i64 - s.0 as i64;
    Ok((arm, leg))
}

/// All partitions of `n`, in reverse lexicographic order of the rows.
pub fn partitions_of(n: usize) -> Vec<YoungDiagram> {
    fn rec(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if n == 0 {
            out.push(YoungDiagram { rows: prefix.clone() });
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            rec(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct YoungPair(pub YoungDiagram, pub YoungDiagram);

impl YoungPair {
    pub fn size(&self) -> usize {
        self.0.size() + self.1.size()
    }

    pub fn get(&self, alpha: usize) -> &YoungDiagram {
        if alpha == 0 {
            &self.0
        } else {
            &self.1
        }
    }
}

/// Every pair of diagrams with `n` boxes in total, ordered by the size of
/// the first diagram and then by [`partitions_of`].
pub fn enumerate_pairs(n: usize) -> Vec<YoungPair> {
    let mut out = Vec::new();
    for k in 0..=n {
        for y1 in partitions_of(k) {
            for y2 in partitions_of(n - k) {
                out.push(YoungPair(y1.clone(), y2));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Partition counts from Euler's pentagonal recurrence.
    fn partition_count(n: usize) -> usize {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut k: i64 = 1;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                p[m] += sign * p[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    p[m] += sign * p[m - g2];
                }
                k += 1;
            }
        }
        p[n] as usize
    }

    fn d(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn small_pair_counts() {
        assert_eq!(enumerate_pairs(0), vec![YoungPair(YoungDiagram::empty(), YoungDiagram::empty())]);
        assert_eq!(enumerate_pairs(1).len(), 2);
        assert_eq!(enumerate_pairs(3).len(), 10);
    }

    #[test]
    fn arm_leg_examples() {
        assert_eq!(arm_leg(&d(&[1]), &d(&[1]), (1, 1)).unwrap(), (0, 0));
        assert_eq!(arm_leg(&d(&[3, 1]), &d(&[3, 1]), (1, 1)).unwrap(), (2, 1));
        assert!(arm_leg(&d(&[1]), &d(&[1]), (2, 1)).is_err());
    }

    #[test]
    fn legs_against_transpose() {
        let y = d(&[2, 2]);
        let y2 = d(&[1]);
        let mut saw_negative = false;
        for s in y.boxes() {
            let (_, leg) = arm_leg(&y, &y2, s).unwrap();
            // leg in y2 equals the arm of the transposed box in y2ᵗ
            let arm_t = y2.transpose().row_len(s.1) as i64 - s.0 as i64;
            assert_eq!(leg, arm_t);
            saw_negative |= leg < 0;
        }
        assert!(saw_negative);
    }

    proptest! {
        #[test]
        fn pair_count_matches_convolution(n in 0usize..9) {
            let expect: usize = (0..=n).map(|k| partition_count(k) * partition_count(n - k)).sum();
            prop_assert_eq!(enumerate_pairs(n).len(), expect);
        }

        #[test]
        fn hooks_are_positive(n in 1usize..9, pick in 0usize..100) {
            let ps = partitions_of(n);
            let y = &ps[pick % ps.len()];
            prop_assert_eq!(y.size(), n);
            for s in y.boxes() {
                let (a, l) = arm_leg(y, y, s).unwrap();
                prop_assert!(a + l + 1 >= 1);
            }
        }
    }
}
