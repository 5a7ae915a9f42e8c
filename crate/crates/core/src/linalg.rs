//! Dense Gaussian elimination over any [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must all have length n".into()));
        }
        Ok(DenseMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Principal submatrix with row and column `skip` removed.
    pub fn without(&self, skip: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&k| k != skip).collect();
        let mut out = Self::zeros(keep.len());
        for (a, &r) in keep.iter().enumerate() {
            for (b, &c) in keep.iter().enumerate() {
                out[(a, b)] = self[(r, c)].clone();
            }
        }
        out
    }

    fn scale(&self) -> f64 {
        if S::EXACT {
            return 1.0;
        }
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.n {
            self.data.swap(a * self.n + c, b * self.n + c);
        }
    }

    fn pivot_row(&self, col: usize, scale: f64) -> Option<usize> {
        if S::EXACT {
            (col..self.n).find(|&r| !self[(r, col)].is_zero())
        } else {
            let best = (col..self.n).max_by(|&a, &b| {
                self[(a, col)]
                    .abs()
                    .partial_cmp(&self[(b, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            (!self[(best, col)].negligible(scale)).then_some(best)
        }
    }

    /// Solves `self * x = rhs`.
    pub fn solve(&self, rhs: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, matrix is {n}x{n}",
                rhs.len()
            )));
        }
        let scale = self.scale();
        let mut a = self.clone();
        let mut b = rhs.to_vec();
        for col in 0..n {
            let p = a
                .pivot_row(col, scale)
                .ok_or_else(|| Error::SolveFailure(format!("zero pivot in column {col}")))?;
            a.swap_rows(col, p);
            b.swap(col, p);
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone() / a[(col, col)].clone();
                for c in col..n {
                    let v = f.clone() * a[(col, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
                let v = f * b[col].clone();
                b[r] = b[r].clone() - v;
            }
        }
        let mut x = vec![S::zero(); n];
        for r in (0..n).rev() {
            let mut acc = b[r].clone();
            for c in r + 1..n {
                acc = acc - a[(r, c)].clone() * x[c].clone();
            }
            x[r] = acc / a[(r, r)].clone();
        }
        if !S::EXACT && x.iter().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::SolveFailure("non-finite solution".into()));
        }
        Ok(x)
    }

    /// Diagonal of the eliminated upper factor and the permutation sign.
    ///
    /// The determinant is `sign * product(pivots)`; an exactly singular
    /// matrix yields `Ok` with a zero pivot in the exact backend.
    pub fn elimination_pivots(&self) -> Result<(Vec<S>, bool)> {
        let n = self.n;
        let scale = self.scale();
        let mut a = self.clone();
        let mut negative = false;
        let mut pivots = Vec::with_capacity(n);
        for col in 0..n {
            let Some(p) = a.pivot_row(col, scale) else {
                if S::EXACT {
                    pivots.push(S::zero());
                    pivots.extend((col + 1..n).map(|_| S::zero()));
                    return Ok((pivots, negative));
                }
                return Err(Error::SolveFailure(format!("zero pivot in column {col}")));
            };
            if p != col {
                a.swap_rows(col, p);
                negative = !negative;
            }
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone() / a[(col, col)].clone();
                for c in col..n {
                    let v = f.clone() * a[(col, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
            }
            pivots.push(a[(col, col)].clone());
        }
        Ok((pivots, negative))
    }

    pub fn determinant(&self) -> Result<S> {
        let (pivots, negative) = self.elimination_pivots()?;
        let det = pivots.into_iter().fold(S::one(), |acc, p| acc * p);
        Ok(if negative { -det } else { det })
    }

    /// `ln |det|` accumulated pivot by pivot, together with the determinant sign.
    pub fn log_abs_determinant(&self) -> Result<(f64, i8)> {
        let (pivots, negative) = self.elimination_pivots()?;
        let mut sign: i8 = if negative { -1 } else { 1 };
        let mut log = 0.0;
        for p in &pivots {
            if p.is_zero() {
                return Ok((f64::NEG_INFINITY, 0));
            }
            if p.is_negative() {
                sign = -sign;
            }
            log += p.abs().ln_value();
        }
        Ok((log, sign))
    }
}

impl<S> std::ops::Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.n + c]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for DenseMatrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.n + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(a: i64, b: i64) -> Rational {
        Rational::frac(a, b)
    }

    #[test]
    fn solves_small_rational_system() {
        // 2x + y = 3, x + 3y = 5  =>  x = 4/5, y = 7/5
        let m = DenseMatrix::from_rows(vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]]).unwrap();
        let x = m.solve(&[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
    }

    #[test]
    fn pivoting_handles_leading_zero() {
        let m = DenseMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(m.solve(&[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
        assert_eq!(m.determinant().unwrap(), -1.0);
    }

    #[test]
    fn singular_is_reported() {
        let m = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(m.solve(&[1.0, 1.0]), Err(Error::SolveFailure(_))));
        let r = DenseMatrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]).unwrap();
        assert!(r.determinant().unwrap().is_zero());
    }

    #[test]
    fn log_determinant_matches_determinant() {
        let m = DenseMatrix::from_rows(vec![
            vec![4.0, -1.0, 0.5],
            vec![-1.0, 3.0, -0.25],
            vec![0.5, -0.25, 2.0],
        ])
        .unwrap();
        let det = m.determinant().unwrap();
        let (log, sign) = m.log_abs_determinant().unwrap();
        assert_eq!(sign, 1);
        assert!((log.exp() - det).abs() < 1e-12);
    }
}
