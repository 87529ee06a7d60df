//! Exact linear algebra over the rationals.
//!
//! Every subspace is stored in a canonical form: the reduced row echelon
//! form of any spanning set, with each row then scaled to coprime integers.
//! Two [`Subspace`] values are equal as sets exactly when their stored
//! bases are identical, so `==`, `Hash` and `Ord` all act on the subspace
//! itself rather than on a particular spanning set.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Row-major dense matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::SizeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from explicit rows. `cols` is required so that a
    /// matrix with no rows still knows its width.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    index: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Self::new(nrows, cols, entries)
    }

    pub fn from_i64_rows(cols: usize, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &RationalMatrix) -> Result<Self> {
        if self.cols != below.cols {
            return Err(Error::AmbientMismatch {
                left: self.cols,
                right: below.cols,
            });
        }
        let mut entries = self.entries.clone();
        entries.extend(below.entries.iter().cloned());
        Self::new(self.rows + below.rows, self.cols, entries)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::SizeMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), v)).collect())
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::SizeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    acc += self.get(r, j) * rhs.get(j, c);
                }
                entries.push(acc);
            }
        }
        Self::new(self.rows, rhs.cols, entries)
    }

    /// Reduced row echelon form together with the pivot columns. Zero rows
    /// are dropped, so the result has exactly `rank` rows.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut rows = self.row_vectors();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == rows.len() {
                break;
            }
            let Some(p) = (lead..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
                continue;
            };
            rows.swap(lead, p);
            let inv = rows[lead][c].recip();
            for x in rows[lead].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = rows[lead].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == lead || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
            pivots.push(c);
            lead += 1;
        }
        rows.truncate(lead);
        let m = RationalMatrix::from_rows(self.cols, rows).expect("row lengths preserved");
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Determinant by Gaussian elimination; the empty matrix has determinant 1.
    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::SizeMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.row_vectors();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let pivot = a[c][c].clone();
            det *= &pivot;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let factor = &a[r][c] / &pivot;
                for j in c..n {
                    let t = &factor * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * x = b` for square invertible `self`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if self.rows != self.cols || b.len() != self.rows {
            return Err(Error::SizeMismatch("solve needs a square system".into()));
        }
        let n = self.rows;
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.push(b[r].clone());
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !aug[r][c].is_zero())
                .ok_or_else(|| Error::Invariant("singular system".into()))?;
            aug.swap(p, c);
            let inv = aug[c][c].recip();
            for x in aug[c].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = aug[c].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == c || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        Ok(aug.into_iter().map(|mut row| row.pop().unwrap()).collect())
    }

    fn submatrix(&self, row_set: &[usize], col_set: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(row_set.len() * col_set.len());
        for &r in row_set {
            for &c in col_set {
                entries.push(self.get(r, c).clone());
            }
        }
        Self {
            rows: row_set.len(),
            cols: col_set.len(),
            entries,
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn check_indices(indices: &[usize], bound: usize) -> Result<()> {
    for w in indices.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::UnsortedIndices);
        }
    }
    if let Some(&last) = indices.last() {
        if last >= bound {
            return Err(Error::IndexOutOfRange { index: last, bound });
        }
    }
    Ok(())
}

/// Determinant of the square submatrix on `row_set` x `col_set` (0-based).
pub fn minor(m: &RationalMatrix, row_set: &[usize], col_set: &[usize]) -> Result<Rational> {
    if row_set.len() != col_set.len() {
        return Err(Error::SizeMismatch(format!(
            "{} rows vs {} columns",
            row_set.len(),
            col_set.len()
        )));
    }
    check_indices(row_set, m.rows)?;
    check_indices(col_set, m.cols)?;
    m.submatrix(row_set, col_set).determinant()
}

/// Scales a nonzero vector to coprime integers whose first nonzero entry is
/// positive. Returns the integers and the scalar `s` with `ints = s * v`.
pub fn primitive_integer_vector(v: &[Rational]) -> Option<(Vec<BigInt>, Rational)> {
    let first = v.iter().find(|x| !x.is_zero())?;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut scale = Rational::new(lcm, gcd.clone());
    let mut ints: Vec<BigInt> = scaled.into_iter().map(|x| x / &gcd).collect();
    if first.is_negative() {
        scale = -scale;
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    Some((ints, scale))
}

/// Integer counterpart of [`primitive_integer_vector`].
pub fn primitive_bigint_vector(v: &[BigInt]) -> Option<(Vec<BigInt>, Rational)> {
    let first = v.iter().find(|x| !x.is_zero())?;
    let mut gcd = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if first.is_negative() {
        gcd = -gcd;
    }
    let ints = v.iter().map(|x| x / &gcd).collect();
    Some((ints, Rational::new(BigInt::one(), gcd)))
}

/// A linear subspace of Q^n in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RationalMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: RationalMatrix::zeros(0, n),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: RationalMatrix::identity(n),
        }
    }

    /// Row space of the given spanning vectors.
    pub fn span(n: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        Ok(canonical_subspace(&RationalMatrix::from_rows(n, vectors)?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Basis rows as integers (always exact, by construction).
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim())
            .map(|r| self.basis.row(r).iter().map(|x| x.to_integer()).collect())
            .collect()
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        let stacked = RationalMatrix::from_rows(self.ambient_dim, vec![v.to_vec()])
            .and_then(|row| self.basis.stack(&row));
        match stacked {
            Ok(m) => m.rank() == self.dim(),
            Err(_) => false,
        }
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.ambient_dim == self.ambient_dim
            && other.dim() <= self.dim()
            && self.basis.stack(&other.basis).map(|m| m.rank()) == Ok(self.dim())
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by ambient dimension, then dimension, then basis entries
/// lexicographically.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient_dim
            .cmp(&other.ambient_dim)
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| self.basis.entries.cmp(&other.basis.entries))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "{{o}}");
        }
        let rows: Vec<String> = (0..self.dim())
            .map(|r| {
                let row: Vec<String> = self.basis.row(r).iter().map(|x| x.to_string()).collect();
                format!("({})", row.join(","))
            })
            .collect();
        write!(f, "span{{{}}}", rows.join(","))
    }
}

/// Canonical form of the row space of `m`.
pub fn canonical_subspace(m: &RationalMatrix) -> Subspace {
    let (r, _) = m.rref();
    let mut entries = Vec::with_capacity(r.entries.len());
    for i in 0..r.rows {
        let (ints, _) = primitive_integer_vector(r.row(i)).expect("rref rows are nonzero");
        entries.extend(ints.into_iter().map(Rational::from_integer));
    }
    Subspace {
        ambient_dim: m.cols,
        basis: RationalMatrix::new(r.rows, m.cols, entries).expect("shape preserved"),
    }
}

/// Null space `{v : Mv = 0}`.
pub fn kernel(m: &RationalMatrix) -> Subspace {
    let n = m.cols;
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut vectors = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); n];
        v[free] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(row, free).clone();
        }
        vectors.push(v);
    }
    canonical_subspace(&RationalMatrix::from_rows(n, vectors).expect("length n"))
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::AmbientMismatch {
            left: u.ambient_dim,
            right: v.ambient_dim,
        });
    }
    Ok(())
}

pub fn orth_complement(u: &Subspace) -> Subspace {
    kernel(&u.basis)
}

pub fn intersect(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    check_ambient(u, v)?;
    if u.is_full() {
        return Ok(v.clone());
    }
    if v.is_full() {
        return Ok(u.clone());
    }
    let constraints = orth_complement(u).basis.stack(&orth_complement(v).basis)?;
    Ok(kernel(&constraints))
}

pub fn subspace_sum(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    check_ambient(u, v)?;
    Ok(canonical_subspace(&u.basis.stack(&v.basis)?))
}

/// True iff `u ⊕ v = Q^n`, decided by the determinant of the stacked bases.
pub fn is_direct_sum_full(u: &Subspace, v: &Subspace) -> Result<bool> {
    check_ambient(u, v)?;
    if u.dim() + v.dim() != u.ambient_dim {
        return Ok(false);
    }
    Ok(!u.basis.stack(&v.basis)?.determinant()?.is_zero())
}

/// Orthogonal projection of `v` onto `u`, computed as `Bᵀ(BBᵀ)⁻¹Bv`.
pub fn project(u: &Subspace, v: &[Rational]) -> Result<Vec<Rational>> {
    let n = u.ambient_dim;
    if v.len() != n {
        return Err(Error::SizeMismatch(format!(
            "vector of length {} in ambient dimension {n}",
            v.len()
        )));
    }
    if u.is_zero() {
        return Ok(vec![Rational::zero(); n]);
    }
    let b = &u.basis;
    let bt = b.transpose();
    let gram = b.mul(&bt)?;
    let coeffs = gram.solve(&b.mul_vec(v)?)?;
    bt.mul_vec(&coeffs)
}
