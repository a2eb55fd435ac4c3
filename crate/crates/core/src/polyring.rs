//! Homogeneous polynomials over Q in ambient coordinates, restriction to
//! linear subspaces, and exact summation of rational functions whose
//! denominators are products of linear forms.

use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::qlinalg::{fmt_rat, parse_rat, projective_normal, rat, span_basis, Rat, RatVec};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Homogeneous polynomial of a fixed degree in `nvars` variables.
///
/// The zero polynomial may carry a negative degree; nonzero polynomials
/// always have nonnegative degree equal to every exponent sum.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogPoly {
    nvars: usize,
    degree: i64,
    terms: BTreeMap<Monomial, Rat>,
}

impl fmt::Debug for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            let neg = c < &Rat::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = if mono.is_empty() {
                fmt_rat(&abs)
            } else if abs.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", fmt_rat(&abs), mono.join("*"))
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// All exponent vectors of total degree `k` in `n` variables, in descending
/// lexicographic order (x1^k first).
pub fn monomials(n: usize, k: usize) -> Vec<Monomial> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if n == 1 {
            prefix.push(k as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e as u32);
            rec(n - 1, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

impl HomogPoly {
    pub fn zero(nvars: usize, degree: i64) -> Self {
        HomogPoly { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars, 0);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Monomial, c: Rat) -> Self {
        let nvars = exps.len();
        let degree = exps.iter().map(|&e| e as i64).sum();
        let mut p = Self::zero(nvars, degree);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The linear form sum_i coeffs[i] x_i.
    pub fn linear(coeffs: &[Rat]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    /// Builds from explicit terms; every exponent sum must equal `degree`.
    pub fn from_terms(nvars: usize, degree: i64, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Result<Self> {
        let mut p = Self::zero(nvars, degree);
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(Error::DimensionMismatch(format!("monomial of length {} in {nvars} variables", m.len())));
            }
            let d: i64 = m.iter().map(|&e| e as i64).sum();
            if d != degree {
                return Err(Error::DegreeMismatch(d, degree));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u32]) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Same polynomial re-tagged with a degree; only valid for zero or
    /// matching degrees.
    pub fn with_degree(mut self, degree: i64) -> Self {
        debug_assert!(self.is_zero() || self.degree == degree);
        self.degree = degree;
        self
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!("{} vs {} variables", self.nvars, other.nvars)));
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.degree);
        }
        HomogPoly { nvars: self.nvars, degree: self.degree, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "product of polynomials in different rings");
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *out.terms.entry(m).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        self.terms.iter().fold(Rat::zero(), |acc, (m, c)| {
            let v = m.iter().zip(point).fold(c.clone(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize));
            acc + v
        })
    }

    /// Substitutes x_i := forms[i], where each form is a linear form in
    /// `target_vars` variables.
    pub fn substitute_linear(&self, forms: &[RatVec], target_vars: usize) -> Self {
        assert_eq!(forms.len(), self.nvars, "substitution needs one form per variable");
        let lin: Vec<HomogPoly> = forms.iter().map(|f| HomogPoly::linear(f)).collect();
        let mut cache: HashMap<(usize, u32), HomogPoly> = HashMap::new();
        let mut out = Self::zero(target_vars, self.degree);
        for (m, c) in &self.terms {
            let mut term = Self::constant(target_vars, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cache.entry((i, e)).or_insert_with(|| {
                    if target_vars == 0 {
                        Self::zero(0, e as i64)
                    } else {
                        lin[i].pow(e)
                    }
                });
                term = term.mul(p);
            }
            for (tm, tc) in term.terms {
                *out.terms.entry(tm).or_insert_with(Rat::zero) += tc;
            }
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    /// Coefficients with respect to the given monomial list.
    pub fn coeff_vec(&self, monos: &[Monomial]) -> RatVec {
        debug_assert!(self.terms.keys().all(|m| monos.contains(m)), "polynomial has monomials outside the list");
        monos.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn from_coeff_vec(nvars: usize, degree: i64, monos: &[Monomial], coeffs: &[Rat]) -> Self {
        let mut p = Self::zero(nvars, degree);
        for (m, c) in monos.iter().zip(coeffs) {
            if !c.is_zero() {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    /// Exact quotient by a nonzero linear form; on failure returns the
    /// partial remainder whose leading term is not divisible.
    pub fn div_linear(&self, l: &[Rat]) -> std::result::Result<Self, Self> {
        assert_eq!(l.len(), self.nvars);
        let p = l.iter().position(|c| !c.is_zero()).expect("division by the zero form");
        let lp = l[p].clone();
        let lf = HomogPoly::linear(l);
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars, self.degree - 1);
        while let Some((m, c)) = r.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if m[p] == 0 {
                return Err(r);
            }
            let mut mq = m.clone();
            mq[p] -= 1;
            let t = HomogPoly::monomial(mq, c / &lp);
            r = r.sub(&t.mul(&lf)).expect("degrees agree");
            q = q.add(&t).expect("degrees agree");
        }
        Ok(q)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let key: Vec<String> = m.iter().map(|e| e.to_string()).collect();
                (key.join(","), serde_json::Value::String(fmt_rat(c)))
            })
            .collect();
        serde_json::json!({ "degree": self.degree, "coeffs": coeffs })
    }

    pub fn from_json(v: &serde_json::Value, nvars: usize) -> Result<Self> {
        let degree = v
            .get("degree")
            .and_then(|d| d.as_i64())
            .ok_or_else(|| Error::Parse("polynomial needs an integer \"degree\"".into()))?;
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_object())
            .ok_or_else(|| Error::Parse("polynomial needs a \"coeffs\" object".into()))?;
        let mut terms = Vec::new();
        for (k, c) in coeffs {
            let m: Monomial = if k.is_empty() {
                Vec::new()
            } else {
                k.split(',')
                    .map(|e| e.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent key {k:?}"))))
                    .collect::<Result<_>>()?
            };
            let c = match c {
                serde_json::Value::String(s) => parse_rat(s)?,
                serde_json::Value::Number(n) => rat(n.as_i64().ok_or_else(|| Error::Parse(format!("bad coefficient {n}")))?),
                _ => return Err(Error::Parse(format!("bad coefficient {c}"))),
            };
            terms.push((m, c));
        }
        Self::from_terms(nvars, degree, terms)
    }
}

/// A linear subspace of Q^ambient given by an independent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinSubspace {
    ambient: usize,
    basis: Vec<RatVec>,
}

impl LinSubspace {
    pub fn new(ambient: usize, spanning: &[RatVec]) -> Self {
        LinSubspace { ambient, basis: span_basis(ambient, spanning) }
    }

    pub fn zero(ambient: usize) -> Self {
        LinSubspace { ambient, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[RatVec] {
        &self.basis
    }

    /// Linear forms expressing x = sum_j s_j b_j coordinatewise.
    pub fn parametrization(&self) -> Vec<RatVec> {
        (0..self.ambient).map(|i| self.basis.iter().map(|b| b[i].clone()).collect()).collect()
    }
}

/// Restriction of `p` to `v`, written in the coordinates of the basis of `v`.
pub fn restrict(p: &HomogPoly, v: &LinSubspace) -> HomogPoly {
    p.substitute_linear(&v.parametrization(), v.dim())
}

/// True iff `p - q` vanishes identically on `v`.
pub fn equal_on_span(p: &HomogPoly, q: &HomogPoly, v: &LinSubspace) -> bool {
    if p.degree() != q.degree() {
        return p.is_zero() && q.is_zero();
    }
    match p.sub(q) {
        Ok(d) => d.is_zero() || restrict(&d, v).is_zero(),
        Err(_) => false,
    }
}

/// Formal quotient of a polynomial by a product of linear forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFun {
    pub num: HomogPoly,
    pub den: Vec<RatVec>,
}

impl RatFun {
    pub fn new(num: HomogPoly, den: Vec<RatVec>) -> Self {
        debug_assert!(den.iter().all(|l| l.len() == num.nvars() && l.iter().any(|c| !c.is_zero())));
        RatFun { num, den }
    }

    pub fn degree(&self) -> i64 {
        self.num.degree() - self.den.len() as i64
    }
}

/// Exact sum of rational functions, which must be a polynomial.
pub fn ratfun_sum_to_poly(terms: &[RatFun]) -> Result<HomogPoly> {
    let first = terms.first().ok_or_else(|| Error::DimensionMismatch("empty sum of rational functions".into()))?;
    let n = first.num.nvars();
    let deg = first.degree();
    // factor each denominator as scalar * product of normalized forms
    let mut keys: Vec<RatVec> = Vec::new();
    let mut split: Vec<(Rat, Vec<usize>)> = Vec::new();
    for t in terms {
        if t.num.nvars() != n {
            return Err(Error::DimensionMismatch("rational functions in different rings".into()));
        }
        if t.degree() != deg && !t.num.is_zero() {
            return Err(Error::DegreeMismatch(t.degree(), deg));
        }
        let mut scalar = Rat::one();
        let mut counts = Vec::new();
        for l in &t.den {
            let nl = projective_normal(l);
            let i = nl.iter().position(|c| !c.is_zero()).expect("nonzero form");
            scalar *= &l[i] / &nl[i];
            let idx = match keys.iter().position(|k| *k == nl) {
                Some(idx) => idx,
                None => {
                    keys.push(nl);
                    keys.len() - 1
                }
            };
            counts.push(idx);
        }
        split.push((scalar, counts));
    }
    let mut maxe = vec![0u32; keys.len()];
    let mut exps_per_term = Vec::new();
    for (_, counts) in &split {
        let mut e = vec![0u32; keys.len()];
        for &i in counts {
            e[i] += 1;
        }
        for (m, x) in maxe.iter_mut().zip(&e) {
            *m = (*m).max(*x);
        }
        exps_per_term.push(e);
    }
    let total_den: u32 = maxe.iter().sum();
    let mut numer = HomogPoly::zero(n, deg + total_den as i64);
    for (t, ((scalar, _), e)) in terms.iter().zip(split.iter().zip(&exps_per_term)) {
        if t.num.is_zero() {
            continue;
        }
        let mut p = t.num.scale(&scalar.recip());
        for (k, (&m, &x)) in keys.iter().zip(maxe.iter().zip(e)) {
            if m > x {
                p = p.mul(&HomogPoly::linear(k).pow(m - x));
            }
        }
        numer = numer.add(&p)?;
    }
    let mut q = numer;
    for (k, &m) in keys.iter().zip(&maxe) {
        for _ in 0..m {
            q = q.div_linear(k).map_err(|r| Error::NotPolynomial(r.to_string()))?;
        }
    }
    Ok(q.with_degree(deg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{ratq, rvec};

    fn x() -> HomogPoly {
        HomogPoly::var(2, 0)
    }
    fn t() -> HomogPoly {
        HomogPoly::var(2, 1)
    }

    #[test]
    fn products_and_sums() {
        assert_eq!(x().mul(&x()), HomogPoly::monomial(vec![2, 0], rat(1)));
        let a = x().add(&t()).unwrap();
        let b = x().sub(&t()).unwrap();
        let expect = x().mul(&x()).sub(&t().mul(&t())).unwrap();
        assert_eq!(a.mul(&b), expect);
        assert_eq!(x().add(&x().mul(&x())), Err(Error::DegreeMismatch(1, 2)));
    }

    #[test]
    fn span_equality_examples() {
        let x2 = x().mul(&x());
        let t2 = t().mul(&t());
        let xt = x().mul(&t());
        assert!(equal_on_span(&x2, &t2, &LinSubspace::new(2, &[rvec(&[1, 1])])));
        assert!(equal_on_span(&x(), &HomogPoly::zero(2, 1), &LinSubspace::new(2, &[rvec(&[0, 1])])));
        assert!(!equal_on_span(&x2, &xt, &LinSubspace::new(2, &[rvec(&[1, 2])])));
        // constants are compared at the origin
        let one = HomogPoly::one(2);
        let two = HomogPoly::constant(2, rat(2));
        assert!(!equal_on_span(&one, &two, &LinSubspace::zero(2)));
        assert!(equal_on_span(&x(), &t(), &LinSubspace::zero(2)));
    }

    #[test]
    fn ratfun_sums() {
        let xs = HomogPoly::var(1, 0);
        let r = ratfun_sum_to_poly(&[RatFun::new(xs.clone(), vec![rvec(&[1])]), RatFun::new(HomogPoly::zero(1, 1), vec![rvec(&[1])])]).unwrap();
        assert_eq!(r, HomogPoly::one(1));
        let r = ratfun_sum_to_poly(&[RatFun::new(xs.clone(), vec![rvec(&[1])]), RatFun::new(HomogPoly::zero(1, 1), vec![rvec(&[-1])])]).unwrap();
        assert_eq!(r, HomogPoly::one(1));
        let one = HomogPoly::one(1);
        let r = ratfun_sum_to_poly(&[RatFun::new(one.clone(), vec![rvec(&[1])]), RatFun::new(one.clone(), vec![rvec(&[-1])])]).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.degree(), -1);
        let bad = ratfun_sum_to_poly(&[RatFun::new(one, vec![rvec(&[1])])]);
        assert!(matches!(bad, Err(Error::NotPolynomial(_))));
    }

    #[test]
    fn ratfun_with_distinct_factors() {
        // x t / (x (t - x)) + x t / (t (x - t)) = 1
        let xt = x().mul(&t());
        let terms = [
            RatFun::new(xt.clone(), vec![rvec(&[1, 0]), rvec(&[-1, 1])]),
            RatFun::new(xt, vec![rvec(&[0, 1]), rvec(&[1, -1])]),
        ];
        assert_eq!(ratfun_sum_to_poly(&terms).unwrap(), HomogPoly::one(2));
    }

    #[test]
    fn json_round_trip() {
        let p = x().mul(&t()).scale(&ratq(-3, 2)).add(&x().mul(&x())).unwrap();
        let j = p.to_json();
        assert_eq!(HomogPoly::from_json(&j, 2).unwrap(), p);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(2, 0), vec![vec![0, 0]]);
        assert_eq!(monomials(0, 0).len(), 1);
        assert!(monomials(0, 1).is_empty());
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }
}
