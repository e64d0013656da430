//! Dense matrices over Q.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use super::{QPolynomial, Rational};
use crate::{Error, Result};

/// Row-major dense rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular literal")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Columns `cols` of this matrix, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (k, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m[(k, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &f * &m[(r, j)];
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel as columns of a `cols x k` matrix, in the
    /// standard echelon normalization (free variables set to unit vectors).
    pub fn kernel(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zeros(self.cols, free.len());
        for (idx, &f) in free.iter().enumerate() {
            k[(f, idx)] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                k[(p, idx)] = -r[(row, f)].clone();
            }
        }
        k
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "determinant of a non-square matrix".into(),
            ));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &m[(i, j)] - &f * &m[(c, j)];
                    m[(i, j)] = v;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * X = B` for square nonsingular `self`.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        if !self.is_square() || b.rows != self.rows {
            return Err(Error::Dimension("solve: incompatible shapes".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, n + b.cols);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..b.cols {
                aug[(i, n + j)] = b[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let cols: Vec<usize> = (n..n + b.cols).collect();
        Ok(r.select_columns(&cols))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }

    /// Coordinates of the columns of `b` with respect to the (independent)
    /// columns of `self`; errors if some column is outside the span.
    pub fn coordinates_in_span(&self, b: &Self) -> Result<Self> {
        if b.rows != self.rows {
            return Err(Error::Dimension("span coordinates: row mismatch".into()));
        }
        let k = self.cols;
        let mut aug = Self::zeros(self.rows, k + b.cols);
        for i in 0..self.rows {
            for j in 0..k {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..b.cols {
                aug[(i, k + j)] = b[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() > k || pivots.iter().any(|&p| p >= k) || pivots.len() < k {
            return Err(Error::Domain("vector outside the column span".into()));
        }
        let mut out = Self::zeros(k, b.cols);
        for (row, _) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                out[(row, j)] = r[(row, k + j)].clone();
            }
        }
        Ok(out)
    }

    /// Characteristic polynomial `det(xI - M)` via reduction to upper
    /// Hessenberg form.
    pub fn charpoly(&self) -> Result<QPolynomial> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "characteristic polynomial of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !h[(i, m - 1)].is_zero()) else {
                continue;
            };
            if i != m {
                h.swap_rows(i, m);
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let piv = h[(m, m - 1)].clone();
            for j in m + 1..n {
                if h[(j, m - 1)].is_zero() {
                    continue;
                }
                let u = &h[(j, m - 1)] / &piv;
                for c in 0..n {
                    let v = &h[(j, c)] - &u * &h[(m, c)];
                    h[(j, c)] = v;
                }
                for r in 0..n {
                    let v = &h[(r, m)] + &u * &h[(r, j)];
                    h[(r, m)] = v;
                }
            }
        }
        // p[k] = charpoly of the leading k x k block
        let x = QPolynomial::x();
        let mut p: Vec<QPolynomial> = vec![QPolynomial::one()];
        for k in 1..=n {
            let diag = QPolynomial::constant(h[(k - 1, k - 1)].clone());
            let mut pk = &(&x - &diag) * &p[k - 1];
            let mut t = Rational::one();
            for i in (1..k).rev() {
                t *= &h[(i, i - 1)];
                if t.is_zero() {
                    break;
                }
                let c = &t * &h[(i - 1, k - 1)];
                pk = &pk - &p[i - 1].scale(&c);
            }
            p.push(pk);
        }
        Ok(p.pop().unwrap())
    }

    /// Evaluates a polynomial at this square matrix.
    pub fn eval_poly(&self, poly: &QPolynomial) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("polynomial of a non-square matrix".into()));
        }
        let mut acc = Self::zeros(self.rows, self.cols);
        for c in poly.coeffs().iter().rev() {
            acc = &(&acc * self) + &Self::identity(self.rows).scale(c);
        }
        Ok(acc)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        (self * other) == (other * self)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Characteristic polynomial `det(xI - M)`.
pub fn charpoly(m: &QMatrix) -> Result<QPolynomial> {
    m.charpoly()
}
