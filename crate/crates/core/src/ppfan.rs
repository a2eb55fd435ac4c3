//! Piecewise polynomial functions on fans: generators, ring operations,
//! pullback and pushforward along subdivisions, and the equivariant degree.

use num_traits::{One, Zero};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyhedra::{Fan, ModelMap};
use crate::polyring::{equal_on_span, monomials, restrict, HomogPoly, LinSubspace, Monomial, RatFun};
use crate::qlinalg::{fmt_rat, is_zero_vec, Rat, RatMat, RatVec};

/// A piecewise polynomial function, stored by its pieces on the maximal
/// cones of the fan (in the fan's maximal-cone order).
#[derive(Clone, Debug)]
pub struct PPFunction {
    fan: Arc<Fan>,
    degree: i64,
    pieces: Vec<HomogPoly>,
}

impl PartialEq for PPFunction {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan) && self.degree == other.degree && self.pieces == other.pieces
    }
}
impl Eq for PPFunction {}

/// Validates pieces against the gluing conditions on common faces.
pub fn make_pp(fan: &Arc<Fan>, degree: i64, pieces: Vec<HomogPoly>) -> Result<PPFunction> {
    let n = fan.dim();
    if pieces.len() != fan.maximal().len() {
        return Err(Error::DimensionMismatch(format!("{} pieces for {} maximal cones", pieces.len(), fan.maximal().len())));
    }
    let mut norm = Vec::with_capacity(pieces.len());
    for p in pieces {
        if p.nvars() != n {
            return Err(Error::DimensionMismatch(format!("piece in {} variables on a fan of dimension {n}", p.nvars())));
        }
        if p.degree() != degree {
            if !p.is_zero() {
                return Err(Error::DegreeMismatch(p.degree(), degree));
            }
            norm.push(HomogPoly::zero(n, degree));
        } else {
            norm.push(p);
        }
    }
    let max = fan.maximal();
    for a in 0..max.len() {
        for b in a + 1..max.len() {
            let tau = fan.common_face(max[a], max[b]);
            let span = LinSubspace::new(n, &fan.cone_generators(tau));
            if !equal_on_span(&norm[a], &norm[b], &span) {
                return Err(Error::FaceMismatch(a, b, fan.cone_rays(tau).to_vec()));
            }
        }
    }
    Ok(PPFunction { fan: fan.clone(), degree, pieces: norm })
}

/// Linear forms on a full-dimensional simplicial cone dual to its rays:
/// `forms[i]` is 1 on ray i and 0 on the others.
pub fn dual_forms(fan: &Fan, cone: usize) -> Result<Vec<RatVec>> {
    let gens = fan.cone_generators(cone);
    let n = fan.dim();
    if gens.len() != fan.cone_dim(cone) {
        return Err(Error::NotRegular);
    }
    let g = RatMat::from_rows(n, &gens)?;
    (0..gens.len())
        .map(|i| {
            let mut e = vec![Rat::zero(); gens.len()];
            e[i] = Rat::one();
            g.solve(&e)?.ok_or(Error::NotRegular)
        })
        .collect()
}

/// The Courant function of a ray: the piecewise linear function that is 1 on
/// its primitive generator and 0 on all other rays.
pub fn phi_ray(fan: &Arc<Fan>, ray: &[Rat]) -> Result<PPFunction> {
    if !fan.is_regular() {
        return Err(Error::NotRegular);
    }
    let r = fan.ray_index(ray).ok_or_else(|| Error::NotARay(ray.iter().map(fmt_rat).collect::<Vec<_>>().join(",")))?;
    phi_ray_idx(fan, r)
}

pub fn phi_ray_idx(fan: &Arc<Fan>, r: usize) -> Result<PPFunction> {
    if !fan.is_regular() {
        return Err(Error::NotRegular);
    }
    let n = fan.dim();
    let pieces = fan
        .maximal()
        .iter()
        .map(|&m| match fan.cone_rays(m).iter().position(|&x| x == r) {
            Some(i) => Ok(HomogPoly::linear(&dual_forms(fan, m)?[i])),
            None => Ok(HomogPoly::zero(n, 1)),
        })
        .collect::<Result<_>>()?;
    make_pp(fan, 1, pieces)
}

/// Product of the Courant functions of the rays of a cone.
pub fn phi_cone_idx(fan: &Arc<Fan>, cone: usize) -> Result<PPFunction> {
    if !fan.is_regular() {
        return Err(Error::NotRegular);
    }
    let mut out = PPFunction::one(fan);
    for &r in fan.cone_rays(cone) {
        out = out.mul(&phi_ray_idx(fan, r)?)?;
    }
    Ok(out)
}

/// `phi_cone` for a cone given by generators.
pub fn phi_cone(fan: &Arc<Fan>, gens: &[RatVec]) -> Result<PPFunction> {
    let c = fan.find_cone(gens).ok_or_else(|| Error::NotARay(format!("{} generators do not span a cone of the fan", gens.len())))?;
    phi_cone_idx(fan, c)
}

impl PPFunction {
    pub fn zero(fan: &Arc<Fan>, degree: i64) -> Self {
        PPFunction { fan: fan.clone(), degree, pieces: vec![HomogPoly::zero(fan.dim(), degree); fan.maximal().len()] }
    }

    pub fn one(fan: &Arc<Fan>) -> Self {
        Self::global(fan, HomogPoly::one(fan.dim()))
    }

    /// The same polynomial on every cone.
    pub fn global(fan: &Arc<Fan>, p: HomogPoly) -> Self {
        PPFunction { fan: fan.clone(), degree: p.degree(), pieces: vec![p; fan.maximal().len()] }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn pieces(&self) -> &[HomogPoly] {
        &self.pieces
    }

    pub fn piece(&self, p: usize) -> &HomogPoly {
        &self.pieces[p]
    }

    /// A polynomial representing the function on the given cone.
    pub fn piece_on_cone(&self, cone: usize) -> &HomogPoly {
        let p = self.fan.maximal_containing(cone)[0];
        &self.pieces[p]
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero())
    }

    fn same_fan(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("piecewise polynomials on different fans".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_fan(other)?;
        if self.degree != other.degree {
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let pieces = self.pieces.iter().zip(&other.pieces).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(PPFunction { fan: self.fan.clone(), degree: self.degree, pieces })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        PPFunction { fan: self.fan.clone(), degree: self.degree, pieces: self.pieces.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_fan(other)?;
        let pieces = self.pieces.iter().zip(&other.pieces).map(|(a, b)| a.mul(b)).collect();
        Ok(PPFunction { fan: self.fan.clone(), degree: self.degree + other.degree, pieces })
    }

    /// Multiplies every piece by a global polynomial.
    pub fn mul_poly(&self, p: &HomogPoly) -> Self {
        PPFunction { fan: self.fan.clone(), degree: self.degree + p.degree(), pieces: self.pieces.iter().map(|q| q.mul(p)).collect() }
    }

    /// Coefficients of all pieces, concatenated in maximal-cone order.
    pub fn flatten(&self) -> RatVec {
        let monos = monomials(self.fan.dim(), self.degree.max(0) as usize);
        if self.degree < 0 {
            return Vec::new();
        }
        self.pieces.iter().flat_map(|p| p.coeff_vec(&monos)).collect()
    }

    /// Inverse of [`PPFunction::flatten`]; validates the result.
    pub fn from_flat(fan: &Arc<Fan>, degree: i64, coeffs: &[Rat]) -> Result<Self> {
        let n = fan.dim();
        if degree < 0 {
            return Ok(Self::zero(fan, degree));
        }
        let monos = monomials(n, degree as usize);
        let pieces = coeffs.chunks(monos.len().max(1)).take(fan.maximal().len()).map(|c| HomogPoly::from_coeff_vec(n, degree, &monos, c)).collect();
        make_pp(fan, degree, pieces)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pieces: Vec<serde_json::Value> =
            self.pieces.iter().enumerate().map(|(i, p)| serde_json::json!({ "cone": i, "poly": p.to_json() })).collect();
        serde_json::json!({ "degree": self.degree, "pieces": pieces })
    }

    pub fn from_json(fan: &Arc<Fan>, v: &serde_json::Value) -> Result<Self> {
        let degree = v.get("degree").and_then(|d| d.as_i64()).ok_or_else(|| Error::Parse("PP function needs \"degree\"".into()))?;
        let n = fan.dim();
        let mut pieces = vec![HomogPoly::zero(n, degree); fan.maximal().len()];
        let arr = v.get("pieces").and_then(|p| p.as_array()).ok_or_else(|| Error::Parse("PP function needs \"pieces\"".into()))?;
        for item in arr {
            let c = item.get("cone").and_then(|c| c.as_u64()).ok_or_else(|| Error::Parse("piece needs \"cone\"".into()))? as usize;
            if c >= pieces.len() {
                return Err(Error::Parse(format!("cone index {c} out of range")));
            }
            let poly = item.get("poly").ok_or_else(|| Error::Parse("piece needs \"poly\"".into()))?;
            pieces[c] = HomogPoly::from_json(poly, n)?;
        }
        make_pp(fan, degree, pieces)
    }
}

/// Basis of the degree-k piecewise polynomials on a fan.
pub fn graded_basis(fan: &Arc<Fan>, k: i64) -> Vec<PPFunction> {
    if k < 0 {
        return Vec::new();
    }
    let n = fan.dim();
    let monos = monomials(n, k as usize);
    let nm = monos.len();
    let max = fan.maximal();
    let unknowns = nm * max.len();
    let mut rows: Vec<RatVec> = Vec::new();
    for a in 0..max.len() {
        for b in a + 1..max.len() {
            let tau = fan.common_face(max[a], max[b]);
            let span = LinSubspace::new(n, &fan.cone_generators(tau));
            let images: Vec<HomogPoly> = monos.iter().map(|m| restrict(&HomogPoly::monomial(m.clone(), Rat::one()), &span)).collect();
            let targets: Vec<Monomial> = monomials(span.dim(), k as usize);
            for t in &targets {
                let mut row = vec![Rat::zero(); unknowns];
                for (j, img) in images.iter().enumerate() {
                    let c = img.coeff(t);
                    if !c.is_zero() {
                        row[a * nm + j] = c.clone();
                        row[b * nm + j] = -c;
                    }
                }
                if !is_zero_vec(&row) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..unknowns).map(|i| (0..unknowns).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
    } else {
        RatMat::from_rows(unknowns, &rows).expect("constraint rows").kernel_basis()
    };
    kernel.iter().map(|v| PPFunction::from_flat(fan, k, v).expect("kernel vectors satisfy the gluing conditions")).collect()
}

/// Pullback along a map of fans given by the smallest-containing-cone map.
pub fn pullback_fans(src: &Arc<Fan>, mu: &[usize], f: &PPFunction) -> Result<PPFunction> {
    let pieces = src.maximal().iter().map(|&m| f.piece_on_cone(mu[m]).clone()).collect();
    make_pp(src, f.degree, pieces)
}

pub fn pullback(m: &ModelMap, f: &PPFunction) -> Result<PPFunction> {
    pullback_fans(m.source.cone_over(), &m.mu, f)
}

fn dual_product(fan: &Fan, cone: usize) -> Result<HomogPoly> {
    Ok(dual_forms(fan, cone)?.iter().fold(HomogPoly::one(fan.dim()), |acc, l| acc.mul(&HomogPoly::linear(l))))
}

/// Pushforward along a subdivision of complete or equal-support regular fans.
pub fn pushforward_fans(src: &Arc<Fan>, tgt: &Arc<Fan>, mu: &[usize], f: &PPFunction) -> Result<PPFunction> {
    if !src.is_pure_full() || !tgt.is_pure_full() {
        return Err(Error::NotProper("pushforward needs full-dimensional maximal cones".into()));
    }
    if !src.is_regular() || !tgt.is_regular() {
        return Err(Error::NotRegular);
    }
    let n = tgt.dim();
    let mut pieces = Vec::new();
    for &t in tgt.maximal() {
        let phi_t = dual_product(tgt, t)?;
        let terms: Vec<RatFun> = (0..src.maximal().len())
            .filter(|&p| mu[src.maximal()[p]] == t)
            .map(|p| Ok(RatFun::new(f.piece(p).mul(&phi_t), dual_forms(src, src.maximal()[p])?)))
            .collect::<Result<_>>()?;
        if terms.is_empty() {
            return Err(Error::NotProper("a target cone has no source cone inside".into()));
        }
        pieces.push(ratfun_sum(&terms, n, f.degree)?);
    }
    make_pp(tgt, f.degree, pieces)
}

pub fn pushforward(m: &ModelMap, f: &PPFunction) -> Result<PPFunction> {
    pushforward_fans(m.source.cone_over(), m.target.cone_over(), &m.mu, f)
}

fn ratfun_sum(terms: &[RatFun], n: usize, degree: i64) -> Result<HomogPoly> {
    let p = crate::polyring::ratfun_sum_to_poly(terms)?;
    if p.is_zero() {
        Ok(HomogPoly::zero(n, degree))
    } else {
        Ok(p)
    }
}

/// Equivariant degree: the sum over maximal cones of the piece divided by
/// the product of the dual forms, a polynomial of degree k - dim.
pub fn degree(f: &PPFunction) -> Result<HomogPoly> {
    let fan = f.fan();
    if !fan.is_complete() {
        return Err(Error::IncompleteInput);
    }
    if !fan.is_regular() {
        return Err(Error::NotRegular);
    }
    let terms: Vec<RatFun> = fan
        .maximal()
        .iter()
        .enumerate()
        .map(|(p, &m)| Ok(RatFun::new(f.piece(p).clone(), dual_forms(fan, m)?)))
        .collect::<Result<_>>()?;
    ratfun_sum(&terms, fan.dim(), f.degree - fan.dim() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polyhedra::refines;
    use crate::qlinalg::{rat, rvec};
    use proptest::prelude::*;

    fn x() -> HomogPoly {
        HomogPoly::var(2, 0)
    }
    fn t() -> HomogPoly {
        HomogPoly::var(2, 1)
    }
    fn piece_at(f: &PPFunction, gens: &[RatVec]) -> HomogPoly {
        let c = f.fan().find_cone(gens).unwrap();
        f.piece(f.fan().max_position(c).unwrap()).clone()
    }

    #[test]
    fn make_pp_on_p1() {
        let fan = Arc::new(fixtures::p1_fan());
        let pos = fan.max_position(fan.find_cone(&[rvec(&[1])]).unwrap()).unwrap();
        let mut pieces = vec![HomogPoly::zero(1, 1); 2];
        pieces[pos] = HomogPoly::var(1, 0);
        assert!(make_pp(&fan, 1, pieces.clone()).is_ok());
        pieces[1 - pos] = HomogPoly::one(1);
        assert!(matches!(make_pp(&fan, 1, pieces), Err(Error::DegreeMismatch(0, 1))));
        let consts = vec![HomogPoly::one(1), HomogPoly::constant(1, rat(2))];
        assert!(matches!(make_pp(&fan, 0, consts), Err(Error::FaceMismatch(0, 1, _))));
    }

    #[test]
    fn phi_on_f2() {
        let f2 = fixtures::f2();
        let fan = f2.cone_over().clone();
        let a = vec![rvec(&[0, 1]), rvec(&[1, 1])];
        let b = vec![rvec(&[1, 1]), rvec(&[1, 0])];
        let c = vec![rvec(&[0, 1]), rvec(&[-1, 0])];
        let p01 = phi_ray(&fan, &rvec(&[0, 1])).unwrap();
        assert_eq!(piece_at(&p01, &a), t().sub(&x()).unwrap());
        assert_eq!(piece_at(&p01, &b), HomogPoly::zero(2, 1));
        assert_eq!(piece_at(&p01, &c), t());
        let p11 = phi_ray(&fan, &rvec(&[1, 1])).unwrap();
        assert_eq!(piece_at(&p11, &a), x());
        assert_eq!(piece_at(&p11, &b), t());
        let pa = phi_cone(&fan, &a).unwrap();
        assert_eq!(piece_at(&pa, &a), x().mul(&t().sub(&x()).unwrap()));
        assert_eq!(pa, p01.mul(&p11).unwrap());
        assert!(matches!(phi_ray(&fan, &rvec(&[2, 1])), Err(Error::NotARay(_))));
        let bad = Arc::new(Fan::from_max_cones(2, &[vec![rvec(&[1, 0]), rvec(&[1, 2])]]).unwrap());
        assert!(matches!(phi_ray(&bad, &rvec(&[1, 0])), Err(Error::NotRegular)));
    }

    #[test]
    fn products_and_sums() {
        let fan = Arc::new(fixtures::p1_fan());
        let p = phi_ray(&fan, &rvec(&[1])).unwrap();
        let m = phi_ray(&fan, &rvec(&[-1])).unwrap();
        assert!(p.mul(&m).unwrap().is_zero());
        assert_eq!(p.add(&p).unwrap(), p.scale(&rat(2)));
        assert_eq!(phi_cone(&fan, &[]).unwrap(), PPFunction::one(&fan));
        assert_eq!(phi_cone(&fan, &[rvec(&[1])]).unwrap(), p);
        assert!(matches!(p.add(&PPFunction::one(&fan)), Err(Error::DegreeMismatch(1, 0))));
    }

    #[test]
    fn graded_dimensions() {
        let p1 = Arc::new(fixtures::p1_fan());
        assert_eq!(graded_basis(&p1, 0).len(), 1);
        assert_eq!(graded_basis(&p1, 1).len(), 2);
        let p2 = Arc::new(fixtures::p2_fan());
        assert_eq!(graded_basis(&p2, 0).len(), 1);
        assert_eq!(graded_basis(&p2, 1).len(), 3);
        assert_eq!(graded_basis(&p2, 2).len(), 6);
    }

    #[test]
    fn pushforward_to_canonical() {
        let f2 = Arc::new(fixtures::f2());
        let f1 = Arc::new(fixtures::f1());
        let m = refines(&f2, &f1).unwrap();
        let fan = f2.cone_over();
        let p11 = phi_ray(fan, &rvec(&[1, 1])).unwrap();
        assert!(pushforward(&m, &p11).unwrap().is_zero());
        let p01 = phi_ray(fan, &rvec(&[0, 1])).unwrap();
        assert_eq!(pushforward(&m, &p01).unwrap(), phi_ray(f1.cone_over(), &rvec(&[0, 1])).unwrap());
    }

    #[test]
    fn pullback_identity_and_composites() {
        let f1 = Arc::new(fixtures::f1());
        let f2 = Arc::new(fixtures::f2());
        let f5 = Arc::new(fixtures::f5());
        let m52 = refines(&f5, &f2).unwrap();
        let m21 = refines(&f2, &f1).unwrap();
        let m51 = refines(&f5, &f1).unwrap();
        let id = refines(&f2, &f2).unwrap();
        for g in graded_basis(f1.cone_over(), 2) {
            let direct = pullback(&m51, &g).unwrap();
            assert_eq!(pullback(&m52, &pullback(&m21, &g).unwrap()).unwrap(), direct);
            assert_eq!(pushforward(&m51, &direct).unwrap(), g);
        }
        for g in graded_basis(f5.cone_over(), 1) {
            let two = pushforward(&m21, &pushforward(&m52, &g).unwrap()).unwrap();
            assert_eq!(two, pushforward(&m51, &g).unwrap());
        }
        let p = phi_ray(f2.cone_over(), &rvec(&[0, 1])).unwrap();
        assert_eq!(pullback(&id, &p).unwrap(), p);
    }

    #[test]
    fn degree_examples() {
        let p1 = Arc::new(fixtures::p1_fan());
        assert_eq!(degree(&phi_ray(&p1, &rvec(&[1])).unwrap()).unwrap(), HomogPoly::one(1));
        assert!(degree(&PPFunction::one(&p1)).unwrap().is_zero());
        let p2 = Arc::new(fixtures::p2_fan());
        for &m in p2.maximal() {
            assert_eq!(degree(&phi_cone_idx(&p2, m).unwrap()).unwrap(), HomogPoly::one(2));
        }
    }

    #[test]
    fn fundamental_class_identity() {
        for pc in [fixtures::f2(), fixtures::f5(), fixtures::f3_subdivided(), fixtures::half()] {
            let fan = pc.cone_over();
            let n = pc.rank();
            let mut sum = PPFunction::zero(fan, 1);
            for v in pc.vertices() {
                let phi = phi_ray_idx(fan, v.ray).unwrap();
                sum = sum.add(&phi.scale(&Rat::from_integer(v.multiplicity.clone()))).unwrap();
            }
            assert_eq!(sum, PPFunction::global(fan, HomogPoly::var(n + 1, n)));
        }
    }

    #[test]
    fn json_round_trip() {
        let fan = fixtures::f2().cone_over().clone();
        let p = phi_ray(&fan, &rvec(&[0, 1])).unwrap();
        assert_eq!(PPFunction::from_json(&fan, &p.to_json()).unwrap(), p);
    }

    fn combo(basis: &[PPFunction], coeffs: &[i64]) -> PPFunction {
        basis.iter().zip(coeffs).fold(PPFunction::zero(basis[0].fan(), basis[0].degree()), |acc, (b, &c)| acc.add(&b.scale(&rat(c))).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn push_pull_is_identity(c in proptest::collection::vec(-3i64..4, 3)) {
            let f1 = Arc::new(fixtures::f1());
            let f5 = Arc::new(fixtures::f5());
            let m = refines(&f5, &f1).unwrap();
            let basis = graded_basis(f1.cone_over(), 1);
            let f = combo(&basis, &c);
            prop_assert_eq!(pushforward(&m, &pullback(&m, &f).unwrap()).unwrap(), f);
        }

        #[test]
        fn projection_formula(a in proptest::collection::vec(-3i64..4, 3), b in proptest::collection::vec(-3i64..4, 4)) {
            let f1 = Arc::new(fixtures::f1());
            let f5 = Arc::new(fixtures::f5());
            let m = refines(&f5, &f1).unwrap();
            let x = combo(&graded_basis(f1.cone_over(), 1), &a);
            let yb = graded_basis(f5.cone_over(), 1);
            let y = combo(&yb, &b[..yb.len().min(4)]);
            let lhs = pushforward(&m, &pullback(&m, &x).unwrap().mul(&y).unwrap()).unwrap();
            let rhs = x.mul(&pushforward(&m, &y).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pullback_is_ring_hom(a in proptest::collection::vec(-3i64..4, 3), b in proptest::collection::vec(-3i64..4, 3)) {
            let f1 = Arc::new(fixtures::f1());
            let f2 = Arc::new(fixtures::f2());
            let m = refines(&f2, &f1).unwrap();
            let basis = graded_basis(f1.cone_over(), 1);
            let (x, y) = (combo(&basis, &a), combo(&basis, &b));
            let lhs = pullback(&m, &x.mul(&y).unwrap()).unwrap();
            prop_assert_eq!(lhs, pullback(&m, &x).unwrap().mul(&pullback(&m, &y).unwrap()).unwrap());
        }
    }

    #[test]
    fn pullback_is_injective() {
        let f1 = Arc::new(fixtures::f1());
        let f5 = Arc::new(fixtures::f5());
        let m = refines(&f5, &f1).unwrap();
        for k in 0..3 {
            let imgs: Vec<RatVec> = graded_basis(f1.cone_over(), k).iter().map(|g| pullback(&m, g).unwrap().flatten()).collect();
            let n = imgs.len();
            assert_eq!(crate::qlinalg::rank_of(imgs[0].len(), &imgs), n);
            assert!(graded_basis(f5.cone_over(), k).len() >= n);
        }
    }
}
