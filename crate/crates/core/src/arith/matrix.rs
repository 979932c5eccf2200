//! Dense exact matrices and rank computations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rat::{lcm_denominators, Rat};
use crate::error::{Error, Result};

/// A dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from equal-length rows. An empty row list gives a
    /// `0 x cols` matrix only through [`RatMatrix::zeros`].
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("rows of unequal length".into()));
        }
        let n = rows.len();
        Ok(RatMatrix { rows: n, cols, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rat::from_int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Rank over the rationals. Each row is scaled to integers, then
    /// fraction-free elimination runs on the integer matrix.
    pub fn rank(&self) -> usize {
        let ints: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = lcm_denominators(row);
                row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
            })
            .collect();
        bareiss_rank_big(ints, self.cols)
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero()).ok_or(Error::Singular)?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let piv = a[(c, c)].recip();
            for j in 0..n {
                a[(c, j)] = &a[(c, j)] * &piv;
                inv[(c, j)] = &inv[(c, j)] * &piv;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    let t = &f * &a[(c, j)];
                    a[(r, j)] -= t;
                    let t = &f * &inv[(c, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rat::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn rank(m: &RatMatrix) -> usize {
    m.rank()
}

/// `1 + rank` of the differences `p_i - p_0`.
pub fn affine_rank(points: &[Vec<Rat>]) -> Result<usize> {
    let first = points.first().ok_or_else(|| Error::Shape("affine rank of an empty point list".into()))?;
    if points.iter().any(|p| p.len() != first.len()) {
        return Err(Error::Shape("points of unequal length".into()));
    }
    let diffs: Vec<Vec<Rat>> =
        points[1..].iter().map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
    if diffs.is_empty() {
        return Ok(1);
    }
    Ok(1 + RatMatrix::from_rows(diffs)?.rank())
}

/// Affine rank of integer points; same contract as [`affine_rank`].
pub fn affine_rank_int(points: &[Vec<i64>]) -> Result<usize> {
    let first = points.first().ok_or_else(|| Error::Shape("affine rank of an empty point list".into()))?;
    if points.iter().any(|p| p.len() != first.len()) {
        return Err(Error::Shape("points of unequal length".into()));
    }
    let diffs: Vec<Vec<i64>> = points[1..].iter().map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
    Ok(1 + int_rank(&diffs))
}

/// Rank of an integer matrix. Runs fraction-free elimination in machine
/// integers and restarts with big integers on overflow.
pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    match bareiss_rank_i64(rows.to_vec(), cols) {
        Some(r) => r,
        None => bareiss_rank_big(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect(), cols),
    }
}

fn bareiss_rank_i64(mut m: Vec<Vec<i64>>, cols: usize) -> Option<usize> {
    let n = m.len();
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| m[i][c] != 0) else { continue };
        m.swap(p, r);
        let piv = m[r][c] as i128;
        for i in r + 1..n {
            let f = m[i][c] as i128;
            for j in c + 1..cols {
                let v = piv.checked_mul(m[i][j] as i128)?.checked_sub(f.checked_mul(m[r][j] as i128)?)? / prev;
                m[i][j] = i64::try_from(v).ok()?;
            }
            m[i][c] = 0;
        }
        prev = piv;
        r += 1;
    }
    Some(r)
}

fn bareiss_rank_big(mut m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let n = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, r);
        let piv = m[r][c].clone();
        for i in r + 1..n {
            let f = std::mem::take(&mut m[i][c]);
            for j in c + 1..cols {
                let v = (&piv * &m[i][j] - &f * &m[r][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = piv;
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(2).rank(), 2);
        assert_eq!(RatMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(ints(&[&[1, 2], &[2, 4]]).rank(), 1);
        let m = RatMatrix::from_rows(vec![
            vec![Rat::new(1, 2), Rat::new(1, 3)],
            vec![Rat::new(3, 2), Rat::from_int(1)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn affine_rank_examples() {
        let p = |v: &[i64]| v.iter().map(|&x| Rat::from_int(x)).collect::<Vec<_>>();
        assert_eq!(affine_rank(&[p(&[3, 4])]).unwrap(), 1);
        assert_eq!(affine_rank(&[p(&[0, 0]), p(&[1, 1]), p(&[2, 2])]).unwrap(), 2);
        assert!(affine_rank(&[]).is_err());
        assert_eq!(affine_rank_int(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap(), 3);
    }

    #[test]
    fn inverse_round_trip() {
        let m = ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e: Rat = (0..3).map(|k| &m[(i, k)] * &inv[(k, j)]).sum();
                assert_eq!(e, if i == j { Rat::one() } else { Rat::zero() });
            }
        }
        assert!(ints(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = i64::MAX / 3;
        let rows = vec![vec![big, big - 1, 7], vec![big - 5, big, 3], vec![1, 2, big]];
        let m = RatMatrix::from_int_rows(&rows).unwrap();
        assert_eq!(int_rank(&rows), m.rank());
        assert_eq!(int_rank(&rows), 3);
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(entries in proptest::collection::vec(-3i64..=3, 20), rows in 1usize..=5) {
            let cols = 20 / rows;
            let data: Vec<Vec<i64>> = (0..rows).map(|i| entries[i * cols..(i + 1) * cols].to_vec()).collect();
            let m = RatMatrix::from_int_rows(&data).unwrap();
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert_eq!(m.rank(), int_rank(&data));
        }
    }
}
