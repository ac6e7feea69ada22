//! Dense matrices over any [`Scalar`], and the reference determinant and
//! characteristic-polynomial routines every cycle expansion is checked
//! against.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::ring::{Conjugate, Field, GaussianRational, MultiPoly, Scalar};
use crate::{Error, Result};

/// Largest size accepted by the cofactor-expansion determinant used for
/// polynomial entries.
pub const MINOR_EXPANSION_MAX: usize = 8;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[S]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_struct("Matrix").field("rows", &self.rows).field("cols", &self.cols).field("data", &rows).finish()
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries supplied for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, S::one())
    }

    /// `s·I_n`.
    pub fn scalar(n: usize, s: S) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { s.clone() } else { S::zero() })
    }

    pub fn diag(entries: &[S]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { S::zero() })
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

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn neg(&self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix<S> {
        let (r0, c0) = (rows.start, cols.start);
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Selects rows and columns by index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<S> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn approx_eq(&self, other: &Matrix<S>) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn pow(&self, e: u32) -> Matrix<S> {
        (0..e).fold(Matrix::identity(self.rows), |acc, _| acc.mul(self))
    }
}

impl<S: Conjugate> Matrix<S> {
    pub fn adjoint(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }
}

impl<S: Field> Matrix<S> {
    /// Gauss–Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Matrix<S> = Matrix::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let d = a.get(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).clone() * d.clone());
                inv.set(col, j, inv.get(col, j).clone() * d.clone());
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j).clone() - f.clone() * a.get(col, j).clone());
                    inv.set(r, j, inv.get(r, j).clone() - f.clone() * inv.get(col, j).clone());
                }
            }
        }
        Some(inv)
    }
}

impl<S> Matrix<S> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Square matrix together with a partition of its index range into blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix<S> {
    base: Matrix<S>,
    partition: Vec<usize>,
    offsets: Vec<usize>,
    block_of: Vec<usize>,
}

impl<S: Scalar> BlockMatrix<S> {
    pub fn new(base: Matrix<S>, partition: Vec<usize>) -> Result<Self> {
        if !base.is_square() {
            return Err(Error::NotSquare { rows: base.rows(), cols: base.cols() });
        }
        if partition.contains(&0) {
            return Err(Error::Dimension("block sizes must be positive".into()));
        }
        let total: usize = partition.iter().sum();
        if total != base.rows() {
            return Err(Error::Dimension(format!("partition sums to {total}, matrix has size {}", base.rows())));
        }
        let mut offsets = Vec::with_capacity(partition.len() + 1);
        let mut block_of = Vec::with_capacity(total);
        let mut acc = 0;
        for (a, &k) in partition.iter().enumerate() {
            offsets.push(acc);
            acc += k;
            block_of.extend(std::iter::repeat_n(a, k));
        }
        offsets.push(acc);
        Ok(Self { base, partition, offsets, block_of })
    }

    /// Assembles a block matrix from its `p × p` grid of blocks.
    pub fn from_blocks(partition: Vec<usize>, block: impl Fn(usize, usize) -> Matrix<S>) -> Result<Self> {
        let n: usize = partition.iter().sum();
        let mut base = Matrix::zeros(n, n);
        let mut off = 0;
        let offsets: Vec<usize> = partition
            .iter()
            .map(|&k| {
                let o = off;
                off += k;
                o
            })
            .collect();
        for a in 0..partition.len() {
            for b in 0..partition.len() {
                let m = block(a, b);
                if m.rows() != partition[a] || m.cols() != partition[b] {
                    return Err(Error::Dimension(format!("block ({a},{b}) has the wrong shape")));
                }
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        base.set(offsets[a] + i, offsets[b] + j, m.get(i, j).clone());
                    }
                }
            }
        }
        Self::new(base, partition)
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.base
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.base
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    /// Number of blocks `p`.
    pub fn num_blocks(&self) -> usize {
        self.partition.len()
    }

    /// Total size `n`.
    pub fn size(&self) -> usize {
        self.base.rows()
    }

    /// Index of the block containing index `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn block_range(&self, a: usize) -> std::ops::Range<usize> {
        self.offsets[a]..self.offsets[a + 1]
    }

    /// The `n_a × n_b` block `A_[ab]`.
    pub fn block(&self, a: usize, b: usize) -> Matrix<S> {
        self.base.submatrix(self.block_range(a), self.block_range(b))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BlockMatrix<T> {
        BlockMatrix {
            base: self.base.map(f),
            partition: self.partition.clone(),
            offsets: self.offsets.clone(),
            block_of: self.block_of.clone(),
        }
    }

    pub fn with_matrix(&self, base: Matrix<S>) -> Result<Self> {
        Self::new(base, self.partition.clone())
    }
}

/// Trace of the cyclic product of blocks `A_[a1 a2] A_[a2 a3] ··· A_[ak a1]`.
///
/// The product depends on the starting block but its trace does not.
pub fn walk_trace<S: Scalar>(a: &BlockMatrix<S>, blocks: impl AsRef<[usize]>) -> S {
    let blocks = blocks.as_ref();
    match blocks.len() {
        0 => S::zero(),
        k => {
            let mut prod = a.block(blocks[0], blocks[1 % k]);
            for i in 1..k {
                prod = prod.mul(&a.block(blocks[i], blocks[(i + 1) % k]));
            }
            prod.trace()
        }
    }
}

/// Scalars with a reference determinant algorithm.
pub trait OracleDet: Scalar {
    fn det_kernel(m: &Matrix<Self>) -> Result<Self>;
}

/// Independent reference determinant: LU with partial pivoting for floats,
/// Bareiss elimination for exact fields, memoized cofactor expansion for
/// polynomials.
pub fn det_oracle<S: OracleDet>(m: &Matrix<S>) -> Result<S> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 {
        return Ok(S::one());
    }
    S::det_kernel(m)
}

impl OracleDet for Complex64 {
    fn det_kernel(m: &Matrix<Self>) -> Result<Self> {
        Ok(det_lu(m))
    }
}

impl OracleDet for BigRational {
    fn det_kernel(m: &Matrix<Self>) -> Result<Self> {
        Ok(det_bareiss(m))
    }
}

impl OracleDet for GaussianRational {
    fn det_kernel(m: &Matrix<Self>) -> Result<Self> {
        Ok(det_bareiss(m))
    }
}

impl<C: Scalar> OracleDet for MultiPoly<C> {
    fn det_kernel(m: &Matrix<Self>) -> Result<Self> {
        det_minors(m)
    }
}

fn det_lu(m: &Matrix<Complex64>) -> Complex64 {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (piv, best) = (col..n).map(|r| (r, a.get(r, col).norm())).max_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            a.swap_rows(piv, col);
            det = -det;
        }
        let p = *a.get(col, col);
        det *= p;
        for r in col + 1..n {
            let f = a.get(r, col) / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = a.get(r, j) - f * a.get(col, j);
                a.set(r, j, v);
            }
        }
    }
    det
}

/// Fraction-free Bareiss elimination. Every division is exact by Sylvester's
/// identity.
pub fn det_bareiss<S: Field>(m: &Matrix<S>) -> S {
    let n = m.rows();
    let mut a = m.clone();
    let mut prev = S::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&r| !a.get(r, k).is_zero()) {
                Some(r) => {
                    a.swap_rows(r, k);
                    negate = !negate;
                }
                None => return S::zero(),
            }
        }
        let prev_inv = prev.inv().expect("Bareiss pivot is nonzero");
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(k, k).clone() * a.get(i, j).clone() - a.get(i, k).clone() * a.get(k, j).clone())
                    * prev_inv.clone();
                a.set(i, j, v);
            }
            a.set(i, k, S::zero());
        }
        prev = a.get(k, k).clone();
    }
    let d = a.get(n - 1, n - 1).clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Laplace expansion along rows, memoized on the set of remaining columns.
fn det_minors<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    let n = m.rows();
    if n > MINOR_EXPANSION_MAX {
        return Err(Error::SizeRefused { method: "polynomial determinant oracle", n, bound: MINOR_EXPANSION_MAX });
    }
    // memo[mask] = determinant of rows (n - |mask|).. with columns in mask
    let mut memo: HashMap<u32, S> = HashMap::new();
    memo.insert(0, S::one());
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    // process masks by increasing popcount
    let mut masks: Vec<u32> = (1..=full).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = S::zero();
        let mut pos = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let entry = m.get(row, j);
            if !entry.is_zero() {
                let sub = &memo[&(mask & !(1 << j))];
                if !sub.is_zero() {
                    let term = entry.clone() * sub.clone();
                    acc = if pos % 2 == 0 { acc + term } else { acc - term };
                }
            }
            pos += 1;
        }
        memo.insert(mask, acc);
    }
    Ok(memo.remove(&full).unwrap())
}

/// Coefficients of `det(tI + M)` in ascending powers of `t`, by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly_oracle<S: Scalar>(m: &Matrix<S>) -> Result<Vec<S>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    // recursion for det(tI - A) with A = -M
    let a = m.neg();
    let mut coeffs = vec![S::zero(); n + 1];
    coeffs[n] = S::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        let ident = Matrix::scalar(n, coeffs[n - k + 1].clone());
        mk = a.mul(&mk).add(&ident);
        let tr = a.mul(&mk).trace();
        coeffs[n - k] = -tr.int_div(k as u64);
    }
    Ok(coeffs)
}

/// Coefficients `1, α_1, …, α_n` of `det(I - s·H)` in ascending powers of `s`.
pub fn reversed_charpoly<S: Scalar>(h: &Matrix<S>) -> Result<Vec<S>> {
    // det(sI - H) = Σ c_k s^k, so det(I - sH) = Σ c_k s^(n-k)
    let mut c = charpoly_oracle(&h.neg())?;
    c.reverse();
    Ok(c)
}
