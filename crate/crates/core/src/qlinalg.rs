//! Exact rational scalars, dense rational matrices and integer lattice
//! algorithms (Smith normal form, primitive vectors).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Exact rational number. Always reduced with a positive denominator.
pub type Rat = BigRational;

/// Dense rational vector.
pub type RatVec = Vec<Rat>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rvec(xs: &[i64]) -> RatVec {
    xs.iter().map(|&x| rat(x)).collect()
}

/// Formats as `p/q`, omitting `q` when it equals 1.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(p))
        }
    }
}

/// Reads a JSON value that is either a `"p/q"` string or an integer.
pub fn rat_from_json(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::String(s) => parse_rat(s),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(rat(i)),
            None => Err(Error::Parse(format!("non-integer number {n}; use \"p/q\""))),
        },
        _ => Err(Error::Parse(format!("expected rational, got {v}"))),
    }
}

pub fn ratvec_from_json(v: &serde_json::Value) -> Result<RatVec> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("expected array, got {v}")))?
        .iter()
        .map(rat_from_json)
        .collect()
}

pub fn ratvec_to_json(v: &[Rat]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(|r| serde_json::Value::String(fmt_rat(r))).collect())
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Rat], c: &Rat) -> RatVec {
    a.iter().map(|x| x * c).collect()
}

/// Least common multiple of the denominators of `v` (1 for the empty vector).
pub fn denom_lcm(v: &[Rat]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray. The zero vector is returned unchanged.
pub fn primitive(v: &[Rat]) -> RatVec {
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let l = denom_lcm(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// Normalizes a nonzero vector up to nonzero scalars: primitive integer with
/// positive first nonzero entry.
pub fn projective_normal(v: &[Rat]) -> RatVec {
    let mut p = primitive(v);
    if let Some(first) = p.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            p = p.iter().map(|x| -x).collect();
        }
    }
    p
}

/// Dense matrix over the rationals in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(fmt_rat).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds from rows; `cols` is needed to describe matrices with no rows.
    pub fn from_rows(cols: usize, rows: &[RatVec]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row of length {} in matrix with {cols} columns", r.len())));
            }
            data.extend(r.iter().cloned());
        }
        Ok(RatMat { rows: rows.len(), cols, data })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[RatVec]) -> Result<Self> {
        Ok(Self::from_rows(rows, cols)?.transpose())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rs: Vec<RatVec> = rows.iter().map(|r| rvec(r)).collect();
        Self::from_rows(cols, &rs).expect("ragged literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> RatVec {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<RatVec> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> Result<RatMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<RatVec> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), v)).collect())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
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
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            let v = &m[(r, j)] * &f;
                            m[(i, j)] -= v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact solution of `A x = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero, which makes the output deterministic.
    pub fn solve(&self, b: &[Rat]) -> Result<Option<RatVec>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} system with right side of length {}", self.rows, self.cols, b.len())));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = b[r].clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = red[(i, self.cols)].clone();
        }
        Ok(Some(x))
    }

    /// Basis of the null space; empty iff the matrix is injective.
    pub fn kernel_basis(&self) -> Vec<RatVec> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -red[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Result<Rat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("determinant of {}x{}", self.rows, self.cols)));
        }
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Rat::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &piv;
                    for j in c..m.cols {
                        let v = &m[(c, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
        }
        Ok(det)
    }
}

/// Rank of a list of vectors of common length `dim`.
pub fn rank_of(dim: usize, vs: &[RatVec]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    RatMat::from_rows(dim, vs).map(|m| m.rank()).unwrap_or(0)
}

/// An independent basis of the span of `vs` (rows of the reduced echelon form).
pub fn span_basis(dim: usize, vs: &[RatVec]) -> Vec<RatVec> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = RatMat::from_rows(dim, vs).expect("vectors of equal length");
    let (red, pivots) = m.rref();
    (0..pivots.len()).map(|r| red.row(r).to_vec()).collect()
}

/// Basis of the orthogonal complement `{u : u . v = 0 for all v in vs}`.
pub fn orthogonal_complement(dim: usize, vs: &[RatVec]) -> Vec<RatVec> {
    if vs.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut e = vec![Rat::zero(); dim];
                e[i] = Rat::one();
                e
            })
            .collect();
    }
    RatMat::from_rows(dim, vs).expect("vectors of equal length").kernel_basis()
}

/// Integer matrix stored as rows.
pub type IntMat = Vec<Vec<BigInt>>;

/// Result of [`smith_normal_form`]: `u * a * v = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl Snf {
    /// The nonzero diagonal entries d_1 | d_2 | ...
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i].clone()).filter(|x| !x.is_zero()).collect()
    }
}

fn int_identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn int_det(a: &IntMat) -> BigInt {
    let m = RatMat::from_rows(
        a.len(),
        &a.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect::<Vec<_>>(),
    )
    .expect("square integer matrix");
    m.det().expect("square integer matrix").to_integer()
}

/// Smith normal form of an integer matrix with `rows x cols` entries.
/// Returns unimodular `u`, `v` and diagonal `d` with `u a v = d`,
/// nonnegative diagonal and `d_i | d_{i+1}`.
pub fn smith_normal_form(a: &IntMat, cols: usize) -> Snf {
    let rows = a.len();
    let mut d: IntMat = a.clone();
    let mut u = int_identity(rows);
    let mut v = int_identity(cols);

    fn swap_cols(m: &mut IntMat, i: usize, j: usize) {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    }
    // row_i += f * row_j
    fn add_row(m: &mut IntMat, i: usize, j: usize, f: &BigInt) {
        let rj = m[j].clone();
        for (x, y) in m[i].iter_mut().zip(rj.iter()) {
            *x += f * y;
        }
    }
    fn add_col(m: &mut IntMat, i: usize, j: usize, f: &BigInt) {
        for row in m.iter_mut() {
            let y = row[j].clone();
            row[i] += f * y;
        }
    }

    let k = rows.min(cols);
    let mut t = 0;
    while t < k {
        // pick the smallest nonzero entry of the remaining block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        let mut done = true;
        for i in t + 1..rows {
            if !d[i][t].is_zero() {
                let q = d[i][t].div_floor(&d[t][t]);
                add_row(&mut d, i, t, &-q.clone());
                add_row(&mut u, i, t, &-q);
                if !d[i][t].is_zero() {
                    done = false;
                }
            }
        }
        for j in t + 1..cols {
            if !d[t][j].is_zero() {
                let q = d[t][j].div_floor(&d[t][t]);
                add_col(&mut d, j, t, &-q.clone());
                add_col(&mut v, j, t, &-q);
                if !d[t][j].is_zero() {
                    done = false;
                }
            }
        }
        if !done {
            continue;
        }
        // divisibility of the remaining block by the pivot
        let mut fixed = true;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&d[i][j] % &d[t][t]).is_zero() {
                    add_row(&mut d, t, i, &BigInt::one());
                    add_row(&mut u, t, i, &BigInt::one());
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    Snf { u, d, v }
}

/// Converts a rational vector with integral entries to integers.
pub fn to_int_vec(v: &[Rat]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

/// A sublattice of Z^rank described by a basis of integer column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    pub rank: usize,
    pub basis: Option<Vec<Vec<BigInt>>>,
}

impl IntLattice {
    /// The full lattice Z^rank.
    pub fn full(rank: usize) -> Self {
        IntLattice { rank, basis: None }
    }

    pub fn with_basis(rank: usize, basis: Vec<Vec<BigInt>>) -> Result<Self> {
        let rows: Vec<RatVec> = basis.iter().map(|b| b.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
        if rows.iter().any(|r| r.len() != rank) {
            return Err(Error::DimensionMismatch("lattice basis vector of wrong length".into()));
        }
        if rank_of(rank, &rows) != basis.len() {
            return Err(Error::DimensionMismatch("lattice basis is not independent".into()));
        }
        Ok(IntLattice { rank, basis: Some(basis) })
    }

    /// Integral coordinates of the quotient map Z^rank -> Z^rank / sat(L),
    /// where sat(L) is the saturation of this lattice. Rows of the returned
    /// matrix are functionals.
    pub fn quotient_map(&self) -> IntMat {
        let Some(basis) = &self.basis else {
            return Vec::new();
        };
        if basis.is_empty() {
            return int_identity(self.rank);
        }
        // rows of u beyond the rank annihilate the span of the basis
        let a: IntMat = (0..self.rank).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
        let snf = smith_normal_form(&a, basis.len());
        let r = snf.invariant_factors().len();
        snf.u[r..].to_vec()
    }
}

/// Index of an integer vector in its own saturation modulo `lattice`: the
/// gcd of its coordinates in the quotient by the saturated span.
pub fn quotient_multiplicity(lattice: &IntLattice, v: &[BigInt]) -> BigInt {
    lattice
        .quotient_map()
        .iter()
        .map(|row| row.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn solve_small_systems() {
        let a = RatMat::from_i64(&[&[1]]);
        assert_eq!(a.solve(&rvec(&[2])).unwrap(), Some(rvec(&[2])));
        let a = RatMat::from_i64(&[&[1, 1], &[1, -1]]);
        assert_eq!(a.solve(&rvec(&[0, 2])).unwrap(), Some(rvec(&[1, -1])));
        let a = RatMat::from_i64(&[&[1, 1], &[2, 2]]);
        assert_eq!(a.solve(&rvec(&[1, 3])).unwrap(), None);
        assert!(a.solve(&rvec(&[1])).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert!(RatMat::from_i64(&[&[1, 0], &[0, 1]]).kernel_basis().is_empty());
        let k = RatMat::from_i64(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, vec![rvec(&[-1, 1])]);
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&im(&[&[2]]), 1);
        assert_eq!(s.d, im(&[&[2]]));
        let s = smith_normal_form(&im(&[&[1, 0], &[0, 1]]), 2);
        assert_eq!(s.d, im(&[&[1, 0], &[0, 1]]));
        let a = im(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&a, 2);
        assert_eq!(s.d, im(&[&[2, 0], &[0, 4]]));
        assert_eq!(int_mat_mul(&int_mat_mul(&s.u, &a), &s.v), s.d);
        assert_eq!(int_det(&s.u).abs(), BigInt::one());
        assert_eq!(int_det(&s.v).abs(), BigInt::one());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(fmt_rat(&ratq(6, -4)), "-3/2");
        assert_eq!(fmt_rat(&rat(5)), "5");
        assert_eq!(parse_rat("-3/2").unwrap(), ratq(-3, 2));
        assert_eq!(parse_rat(" 7 ").unwrap(), rat(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[ratq(1, 2), rat(1)]), rvec(&[1, 2]));
        assert_eq!(primitive(&rvec(&[4, -6])), rvec(&[2, -3]));
        assert_eq!(projective_normal(&rvec(&[-4, 6])), rvec(&[2, -3]));
    }

    #[test]
    fn quotient_multiplicity_of_rays() {
        // Z^2 / Z(1,0): the vector (3,2) maps to 2
        let l = IntLattice::with_basis(2, vec![vec![BigInt::from(1), BigInt::from(0)]]).unwrap();
        assert_eq!(quotient_multiplicity(&l, &[BigInt::from(3), BigInt::from(2)]), BigInt::from(2));
    }
}
