//! Arithmetic Chow classes of toric models: eigenfunction divisors, the
//! Poincaré–Lelong identity, the map Θ from PP functions on c(Π) to
//! arithmetic cycles, and its extension Θ' on towers of PP functions.

use num_traits::{One, Zero};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits::{
    common_model, ddc_current, delta_current, green_from_lifting, is_green, ClosedForm, CurrentTower, Flavor, InvariantCycle, Model,
    Stabilized, TowerValue,
};
use crate::polyhedra::{refines, standard_chain, Fan, ModelMap};
use crate::polyring::{monomials, HomogPoly};
use crate::ppfan::{self, make_pp, phi_cone_idx, PPFunction};
use crate::qlinalg::{dot, Rat, RatMat, RatVec};
use crate::specialfiber::{class_equal, iota_lower, vertical_decompose_mod_t, AffinePP, VertexTuple};

fn model_map(fine: &Model, coarse: &Model) -> Result<ModelMap> {
    refines(fine, coarse).ok_or_else(|| Error::NotARefinement(format!("{} does not refine {}", fine.key(), coarse.key())))
}

fn lift(g: &[Rat]) -> RatVec {
    let mut h = g.to_vec();
    h.push(Rat::zero());
    h
}

fn decompose(pc: &Model, target: &PPFunction) -> Result<VertexTuple> {
    vertical_decompose_mod_t(pc, target).map_err(|e| match e {
        Error::DecompositionFailed(s) => Error::NotCycleSupported(format!("difference is not vertical: {s}")),
        e => e,
    })
}

/// Divisor of the eigenfunction of weight m̃ on V(σ̃) in the model X_Π:
/// each codimension-one coface τ̃ of σ̃ in c(Π) contributes ⟨m̃, r⟩ V(τ̃),
/// r the ray of τ̃ not in σ̃.
pub fn eigen_divisor(pc: &Model, sigma: &[RatVec], weight: &[Rat]) -> Result<InvariantCycle> {
    let fan = pc.cone_over();
    let n1 = fan.dim();
    if weight.len() != n1 || sigma.iter().any(|g| g.len() != n1) {
        return Err(Error::DimensionMismatch(format!("eigen_divisor works in dimension {n1}")));
    }
    if !fan.is_regular() {
        return Err(Error::NotRegular);
    }
    if sigma.iter().any(|g| !dot(weight, g).is_zero()) {
        return Err(Error::WeightNotOrthogonal);
    }
    let s = if sigma.is_empty() {
        fan.zero_cone()
    } else {
        fan.find_cone(sigma).ok_or_else(|| Error::NotARay(format!("{} generators do not span a cone of c(Π)", sigma.len())))?
    };
    let d = fan.cone_dim(s);
    let mut terms = Vec::new();
    for c in 0..fan.num_cones() {
        if fan.cone_dim(c) != d + 1 || !fan.is_face(s, c) {
            continue;
        }
        let extra = fan.cone_rays(c).iter().find(|r| !fan.cone_rays(s).contains(r)).copied().expect("coface has a new ray");
        terms.push((fan.cone_generators(c), dot(weight, fan.ray(extra))));
    }
    InvariantCycle::new(n1, d + 1, terms)
}

/// The restriction of a PP function on c(Π) to N x {0}, as a PP function on
/// the recession fan.
pub fn generic_restriction(pc: &Model, f: &PPFunction) -> Result<(Arc<Fan>, PPFunction)> {
    let sigma = Arc::new(pc.recession_fan()?);
    let n = pc.rank();
    let cfan = pc.cone_over();
    if f.fan().as_ref() != cfan.as_ref() {
        return Err(Error::DimensionMismatch("function does not live on c(Π)".into()));
    }
    let mut forms: Vec<RatVec> = (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    forms.push(vec![Rat::zero(); n]);
    let pieces = sigma
        .maximal()
        .iter()
        .map(|&m| {
            let gens: Vec<RatVec> = sigma.cone_generators(m).iter().map(|g| lift(g)).collect();
            let c = cfan.find_cone(&gens).ok_or_else(|| Error::Internal("recession cone missing from c(Π)".into()))?;
            Ok(f.piece_on_cone(c).substitute_linear(&forms, n))
        })
        .collect::<Result<_>>()?;
    Ok((sigma.clone(), make_pp(&sigma, f.degree(), pieces)?))
}

/// Writes a PP function on a regular fan as Σ p_σ φ_σ with polynomial
/// coefficients, preferring cones of the largest dimension.
pub fn cycle_of(fan: &Arc<Fan>, f: &PPFunction) -> Result<InvariantCycle> {
    let n = fan.dim();
    let k = f.degree();
    if k < 0 {
        return Err(Error::NotCycleSupported(format!("negative degree {k}")));
    }
    if !fan.is_regular() {
        return Err(Error::NotRegular);
    }
    let mut cones: Vec<usize> = (0..fan.num_cones()).filter(|&c| fan.cone_dim(c) as i64 <= k).collect();
    cones.sort_by_key(|&c| std::cmp::Reverse(fan.cone_dim(c)));
    let mut labels = Vec::new();
    let mut cols = Vec::new();
    for &c in &cones {
        let phi = phi_cone_idx(fan, c)?;
        for m in monomials(n, (k - fan.cone_dim(c) as i64) as usize) {
            cols.push(phi.mul_poly(&HomogPoly::monomial(m.clone(), Rat::one())).flatten());
            labels.push((c, m));
        }
    }
    let b = f.flatten();
    let sol = RatMat::from_cols(b.len(), &cols)?
        .solve(&b)?
        .ok_or_else(|| Error::NotCycleSupported("no combination of orbit classes matches".into()))?;
    let terms = labels
        .into_iter()
        .zip(sol)
        .filter(|(_, a)| !a.is_zero())
        .map(|((c, m), a)| (fan.cone_generators(c), HomogPoly::monomial(m, a)))
        .collect();
    InvariantCycle::equivariant(n, k as usize, terms)
}

/// Eigenfunction datum: W = V(σ) for a horizontal cone σ, and a weight
/// m̃ = (m, a) in M x Z with m orthogonal to σ.
#[derive(Clone, Debug)]
pub struct Eigenfunction {
    pub sigma: Vec<RatVec>,
    pub weight: RatVec,
}

impl Eigenfunction {
    pub fn new(sigma: Vec<RatVec>, weight: RatVec) -> Result<Self> {
        let n = weight.len().checked_sub(1).ok_or_else(|| Error::DimensionMismatch("empty weight".into()))?;
        if sigma.iter().any(|g| g.len() != n) {
            return Err(Error::DimensionMismatch(format!("horizontal cone generators must have length {n}")));
        }
        if sigma.iter().any(|g| !dot(&weight[..n], g).is_zero()) {
            return Err(Error::WeightNotOrthogonal);
        }
        Ok(Eigenfunction { sigma, weight })
    }

    fn lifted_sigma(&self) -> Vec<RatVec> {
        self.sigma.iter().map(|g| lift(g)).collect()
    }

    /// The character χ = m in M.
    pub fn character(&self) -> &[Rat] {
        &self.weight[..self.weight.len() - 1]
    }

    /// W as a horizontal cycle.
    pub fn support(&self) -> Result<InvariantCycle> {
        let n = self.weight.len() - 1;
        InvariantCycle::new(n, self.sigma.len(), vec![(self.sigma.clone(), Rat::one())])
    }

    /// div(f) on the generic fiber.
    pub fn divisor(&self, pc: &Model) -> Result<InvariantCycle> {
        eigen_divisor(pc, &self.lifted_sigma(), &self.weight)?.horizontal_part()
    }

    /// χ[W] - div(f).
    pub fn relation_cycle(&self, pc: &Model) -> Result<InvariantCycle> {
        self.support()?.mul_character(self.character())?.sub(&self.divisor(pc)?)
    }
}

/// The tower of div_ν(f) = closure of div(f) minus div_Π(f), a vertical cycle
/// read as a class on the special fiber.
pub fn div_nu(base: &Model, f: &Eigenfunction) -> Result<CurrentTower> {
    if f.weight.len() != base.rank() + 1 {
        return Err(Error::DimensionMismatch("weight must live in M x Z".into()));
    }
    let fc = f.clone();
    let rule: Arc<crate::limits::RuleFn> = Arc::new(move |pc: &Model| {
        let d = eigen_divisor(pc, &fc.lifted_sigma(), &fc.weight)?.vertical_part().scale(&-Rat::one());
        Ok(TowerValue::ModDdbar(decompose(pc, &d.pp_on(pc.cone_over())?)?))
    });
    Ok(CurrentTower::rule(Flavor::ModDdbar, f.sigma.len() as i64, base.clone(), rule))
}

/// Both sides of dd^c(-div_ν f) = δ_{χ[W] - div f}, model by model.
#[derive(Clone, Debug)]
pub struct PoincareLelong {
    pub lhs: Vec<AffinePP>,
    pub rhs: Vec<AffinePP>,
}

impl PoincareLelong {
    pub fn holds(&self) -> bool {
        self.lhs.len() == self.rhs.len() && self.lhs.iter().zip(&self.rhs).all(|(a, b)| a == b || (a.is_zero() && b.is_zero()))
    }
}

pub fn poincare_lelong_check(f: &Eigenfunction, chain: &[Model]) -> Result<PoincareLelong> {
    let base = chain.first().ok_or_else(|| Error::DimensionMismatch("empty chain".into()))?;
    let lhs = ddc_current(&div_nu(base, f)?.scale(&-Rat::one()), chain)?.materialize(chain)?;
    let rhs = delta_current(&f.relation_cycle(base)?, base)?.materialize(chain)?;
    let closed = |v: Vec<TowerValue>| v.iter().map(|x| x.as_closed().cloned()).collect::<Result<Vec<_>>>();
    Ok(PoincareLelong { lhs: closed(lhs)?, rhs: closed(rhs)? })
}

/// A class of the direct limit of PP(c(Π)) over models.
#[derive(Clone, Debug)]
pub struct LimitClass {
    model: Model,
    f: PPFunction,
}

impl LimitClass {
    pub fn new(pc: &Model, f: PPFunction) -> Result<Self> {
        if f.fan().as_ref() != pc.cone_over().as_ref() {
            return Err(Error::DimensionMismatch("representative does not live on c(Π)".into()));
        }
        Ok(LimitClass { model: pc.clone(), f })
    }

    pub fn one(pc: &Model) -> Self {
        LimitClass { model: pc.clone(), f: PPFunction::one(pc.cone_over()) }
    }

    /// The class of a model-level cycle.
    pub fn of_cycle(pc: &Model, z: &InvariantCycle) -> Result<Self> {
        Self::new(pc, z.pp_on(pc.cone_over())?)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn representative(&self) -> &PPFunction {
        &self.f
    }

    pub fn degree(&self) -> i64 {
        self.f.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn on(&self, pc: &Model) -> Result<PPFunction> {
        if pc == &self.model {
            return Ok(self.f.clone());
        }
        ppfan::pullback(&model_map(pc, &self.model)?, &self.f)
    }

    pub fn equals(&self, other: &LimitClass) -> Result<bool> {
        let m = common_model(&self.model, &other.model)?;
        let (a, b) = (self.on(&m)?, other.on(&m)?);
        Ok(a == b || (a.is_zero() && b.is_zero()))
    }

    fn binary(&self, other: &LimitClass, op: impl Fn(&PPFunction, &PPFunction) -> Result<PPFunction>) -> Result<LimitClass> {
        let m = common_model(&self.model, &other.model)?;
        let f = op(&self.on(&m)?, &other.on(&m)?)?;
        Ok(LimitClass { model: m, f })
    }

    pub fn add(&self, other: &LimitClass) -> Result<LimitClass> {
        self.binary(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &LimitClass) -> Result<LimitClass> {
        self.binary(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &LimitClass) -> Result<LimitClass> {
        self.binary(other, |a, b| a.mul(b))
    }

    pub fn scale(&self, c: &Rat) -> LimitClass {
        LimitClass { model: self.model.clone(), f: self.f.scale(c) }
    }
}

/// An arithmetic cycle (η, g) with the closed form dd^c g + δ_η it
/// stabilizes to, when certified.
#[derive(Clone, Debug)]
pub struct ArithCycle {
    eta: InvariantCycle,
    g: CurrentTower,
    certificate: Option<Stabilized<ClosedForm>>,
}

impl ArithCycle {
    /// An uncertified pair.
    pub fn new(eta: InvariantCycle, g: CurrentTower) -> Result<Self> {
        if g.flavor() != Flavor::ModDdbar {
            return Err(Error::DimensionMismatch("Green currents are currents modulo dd^c".into()));
        }
        if g.degree() != eta.codim() as i64 - 1 {
            return Err(Error::DegreeMismatch(g.degree(), eta.codim() as i64 - 1));
        }
        Ok(ArithCycle { eta, g, certificate: None })
    }

    /// Runs the Green check along a chain and attaches the result.
    pub fn certify(mut self, chain: &[Model]) -> Result<Self> {
        let cert = is_green(&self.g, &self.eta, chain)?.ok_or(Error::NotStabilized(chain.len()))?;
        self.certificate = Some(cert);
        Ok(self)
    }

    pub fn eta(&self) -> &InvariantCycle {
        &self.eta
    }

    pub fn green(&self) -> &CurrentTower {
        &self.g
    }

    pub fn certificate(&self) -> Option<&Stabilized<ClosedForm>> {
        self.certificate.as_ref()
    }

    pub fn codim(&self) -> usize {
        self.eta.codim()
    }
}

/// Θ on a PP function F on c(Π): η is its restriction to height 0 and g the
/// Green tower of the lifting F, certified along the standard chain of Π.
pub fn theta_lifting(pc: &Model, f: &PPFunction, eta: &InvariantCycle, depth: usize) -> Result<ArithCycle> {
    let g = green_from_lifting(pc, f, eta)?;
    let chain = standard_chain(pc, depth)?;
    let cert = is_green(&g, eta, &chain)?.ok_or_else(|| Error::Internal("Green current of a lifting did not stabilize".into()))?;
    Ok(ArithCycle { eta: eta.clone(), g, certificate: Some(cert) })
}

/// Θ on a model-level cycle.
pub fn theta(pc: &Model, z: &InvariantCycle, depth: usize) -> Result<ArithCycle> {
    if z.ambient() != pc.rank() + 1 {
        return Err(Error::DimensionMismatch("theta needs a model-level cycle".into()));
    }
    theta_lifting(pc, &z.pp_on(pc.cone_over())?, &z.horizontal_part()?, depth)
}

/// Θ on a limit class; η is read off the restriction to height 0.
pub fn theta_class(c: &LimitClass, depth: usize) -> Result<ArithCycle> {
    let (sigma, r) = generic_restriction(&c.model, &c.f)?;
    theta_lifting(&c.model, &c.f, &cycle_of(&sigma, &r)?, depth)
}

/// Θ^{-1}: closure of η plus the pushforward of g on the stabilizing model.
pub fn theta_inverse(a: &ArithCycle) -> Result<LimitClass> {
    let cert = a.certificate.as_ref().ok_or(Error::NoCertificate)?;
    let pc = &cert.model;
    let g = a.g.value_at(pc)?;
    let h = a.eta.closure_on(pc)?;
    let h = if g.is_zero() { h } else { h.add(&iota_lower(g.as_tuple()?)?)? };
    LimitClass::new(pc, h)
}

/// Equality in the arithmetic Chow group.
pub fn arith_equal(a: &ArithCycle, b: &ArithCycle) -> Result<bool> {
    theta_inverse(a)?.equals(&theta_inverse(b)?)
}

/// Whether Θ(Θ^{-1}(a)) = a and Θ^{-1}(Θ(Θ^{-1}(a))) = Θ^{-1}(a), with
/// the Green towers compared class by class along the chain.
pub fn theta_round_trip(a: &ArithCycle, depth: usize) -> Result<bool> {
    let c = theta_inverse(a)?;
    let b = theta_class(&c, depth)?;
    if !theta_inverse(&b)?.equals(&c)? {
        return Ok(false);
    }
    if b.eta != a.eta {
        return Ok(false);
    }
    for pc in standard_chain(c.model(), depth)? {
        let (x, y) = (a.g.value_at(&pc)?, b.g.value_at(&pc)?);
        if !class_equal(x.as_tuple()?, y.as_tuple()?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn arith_add(a: &ArithCycle, b: &ArithCycle, depth: usize) -> Result<ArithCycle> {
    theta_class(&theta_inverse(a)?.add(&theta_inverse(b)?)?, depth)
}

pub fn arith_product(a: &ArithCycle, b: &ArithCycle, depth: usize) -> Result<ArithCycle> {
    theta_class(&theta_inverse(a)?.mul(&theta_inverse(b)?)?, depth)
}

/// A truncated tower of PP functions on c(Π) along a chain of refinements,
/// compatible under pushforward.
#[derive(Clone, Debug)]
pub struct LimitTower {
    entries: Vec<(Model, PPFunction)>,
}

impl LimitTower {
    pub fn new(entries: Vec<(Model, PPFunction)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("empty tower".into()));
        }
        for (pc, f) in &entries {
            if f.fan().as_ref() != pc.cone_over().as_ref() {
                return Err(Error::DimensionMismatch("tower value does not live on c(Π)".into()));
            }
        }
        for i in 0..entries.len() - 1 {
            let m = model_map(&entries[i + 1].0, &entries[i].0)?;
            let pushed = ppfan::pushforward(&m, &entries[i + 1].1)?;
            if pushed != entries[i].1 && !(pushed.is_zero() && entries[i].1.is_zero()) {
                return Err(Error::CompatibilityViolation(i, i + 1));
            }
        }
        Ok(LimitTower { entries })
    }

    /// The tower of pullbacks of a limit class.
    pub fn of_class(c: &LimitClass, chain: &[Model]) -> Result<Self> {
        Self::new(chain.iter().map(|pc| Ok((pc.clone(), c.on(pc)?))).collect::<Result<_>>()?)
    }

    /// The tower of closures of a horizontal cycle.
    pub fn closures(eta: &InvariantCycle, chain: &[Model]) -> Result<Self> {
        Self::new(chain.iter().map(|pc| Ok((pc.clone(), eta.closure_on(pc)?))).collect::<Result<_>>()?)
    }

    pub fn entries(&self) -> &[(Model, PPFunction)] {
        &self.entries
    }

    pub fn models(&self) -> Vec<Model> {
        self.entries.iter().map(|(m, _)| m.clone()).collect()
    }

    pub fn degree(&self) -> i64 {
        self.entries[0].1.degree()
    }

    pub fn equals(&self, other: &LimitTower) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|((p, f), (q, g))| p == q && (f == g || (f.is_zero() && g.is_zero())))
    }
}

/// An element of the extended group: η with an arbitrary compatible tower.
#[derive(Clone, Debug)]
pub struct ExtendedArithCycle {
    eta: InvariantCycle,
    g: CurrentTower,
}

impl ExtendedArithCycle {
    pub fn new(eta: InvariantCycle, g: CurrentTower) -> Result<Self> {
        if g.flavor() != Flavor::ModDdbar || !g.is_finite() {
            return Err(Error::DimensionMismatch("extended cycles carry a finite tower modulo dd^c".into()));
        }
        Ok(ExtendedArithCycle { eta, g })
    }

    pub fn eta(&self) -> &InvariantCycle {
        &self.eta
    }

    pub fn green(&self) -> &CurrentTower {
        &self.g
    }

    pub fn equals(&self, other: &ExtendedArithCycle) -> Result<bool> {
        if self.eta != other.eta {
            return Ok(false);
        }
        let (ma, mb) = (self.g.finite_models(), other.g.finite_models());
        if ma != mb {
            return Ok(false);
        }
        for pc in &ma {
            if !class_equal(self.g.value_at(pc)?.as_tuple()?, other.g.value_at(pc)?.as_tuple()?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Θ': η is the common restriction to height 0, g the tower of vertical
/// differences from the closures of η.
pub fn theta_prime(t: &LimitTower) -> Result<ExtendedArithCycle> {
    let (p0, f0) = &t.entries[0];
    let (sigma, r0) = generic_restriction(p0, f0)?;
    let eta = cycle_of(&sigma, &r0)?;
    let k = t.degree();
    let mut values = Vec::new();
    for (i, (pc, f)) in t.entries.iter().enumerate() {
        let (s, r) = generic_restriction(pc, f)?;
        let expect = eta.pp_on(&s)?;
        if r != expect && !(r.is_zero() && expect.is_zero()) {
            return Err(Error::CompatibilityViolation(0, i));
        }
        let diff = f.sub(&eta.closure_on(pc)?)?;
        let g = if diff.is_zero() { VertexTuple::zero(pc, k - 1) } else { decompose(pc, &diff)? };
        values.push(TowerValue::ModDdbar(g));
    }
    ExtendedArithCycle::new(eta, CurrentTower::finite(Flavor::ModDdbar, k - 1, values)?)
}

/// Θ'^{-1}: h_Π = closure of η + ι_*(g_Π) on every model of the tower,
/// checked to map back to the same extended cycle.
pub fn theta_prime_inverse(e: &ExtendedArithCycle) -> Result<LimitTower> {
    let mut entries = Vec::new();
    for pc in e.g.finite_models() {
        let g = e.g.value_at(&pc)?;
        let mut h = e.eta.closure_on(&pc)?;
        if !g.is_zero() {
            h = h.add(&iota_lower(g.as_tuple()?)?)?;
        }
        entries.push((pc, h));
    }
    let t = LimitTower::new(entries)?;
    if !theta_prime(&t)?.equals(e)? {
        return Err(Error::Internal("theta' does not invert its inverse on the truncation".into()));
    }
    Ok(t)
}

/// The product of a limit class with every value of a tower. On models the
/// class does not live on, the product is pushed forward from the first
/// model of the tower that refines the class's model.
pub fn module_action(c: &LimitClass, t: &LimitTower) -> Result<LimitTower> {
    let j = t
        .entries
        .iter()
        .position(|(pc, _)| refines(pc, c.model()).is_some())
        .ok_or_else(|| Error::NotARefinement("no model of the tower refines the class's model".into()))?;
    let (pj, fj) = &t.entries[j];
    let at_j = fj.mul(&c.on(pj)?)?;
    let mut entries = Vec::new();
    for (i, (pc, f)) in t.entries.iter().enumerate() {
        let v = if i < j { ppfan::pushforward(&model_map(pj, pc)?, &at_j)? } else { f.mul(&c.on(pc)?)? };
        entries.push((pc.clone(), v));
    }
    LimitTower::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polyhedra::PolyComplex;
    use crate::qlinalg::{rat, rvec};
    use crate::specialfiber::alpha;

    fn arc(p: PolyComplex) -> Model {
        Arc::new(p)
    }

    fn p1_chain() -> Vec<Model> {
        standard_chain(&arc(fixtures::f1()), 3).unwrap()
    }

    fn cycle(ambient: usize, terms: &[(&[&[i64]], i64)]) -> InvariantCycle {
        let k = terms.first().map_or(1, |t| t.0.len());
        InvariantCycle::new(ambient, k, terms.iter().map(|(g, c)| (g.iter().map(|v| rvec(v)).collect(), rat(*c))).collect()).unwrap()
    }

    #[test]
    fn eigen_divisor_examples() {
        let f1 = arc(fixtures::f1());
        let d = eigen_divisor(&f1, &[], &rvec(&[1, 0])).unwrap();
        assert_eq!(d, cycle(2, &[(&[&[1, 0]], 1), (&[&[-1, 0]], -1)]));
        let f2 = arc(fixtures::f2());
        let d = eigen_divisor(&f2, &[], &rvec(&[0, 1])).unwrap();
        assert_eq!(d, cycle(2, &[(&[&[0, 1]], 1), (&[&[1, 1]], 1)]));
        assert!(eigen_divisor(&f2, &[], &rvec(&[0, 0])).unwrap().is_zero());
        assert!(matches!(eigen_divisor(&f2, &[rvec(&[1, 0])], &rvec(&[1, 0])), Err(Error::WeightNotOrthogonal)));
    }

    #[test]
    fn eigen_divisor_is_rationally_trivial() {
        let f3 = arc(fixtures::f3_subdivided());
        for (sigma, m) in [(vec![], rvec(&[1, -1, 2])), (vec![rvec(&[1, 0, 0])], rvec(&[0, 1, 1])), (vec![rvec(&[1, 1, 1])], rvec(&[1, 0, -1]))] {
            let d = eigen_divisor(&f3, &sigma, &m).unwrap().pp_on(f3.cone_over()).unwrap();
            let base = if sigma.is_empty() { PPFunction::one(f3.cone_over()) } else { ppfan::phi_cone(f3.cone_over(), &sigma).unwrap() };
            assert_eq!(d, base.mul_poly(&HomogPoly::linear(&m)));
        }
    }

    #[test]
    fn div_nu_on_p1() {
        let chain = p1_chain();
        let f = Eigenfunction::new(vec![], rvec(&[1, 0])).unwrap();
        let t = div_nu(&chain[0], &f).unwrap();
        let v = t.materialize(&chain).unwrap();
        assert!(v[0].is_zero());
        assert!(!v[1].is_zero());
        let pl = poincare_lelong_check(&f, &chain).unwrap();
        assert!(pl.holds());
        let zero = Eigenfunction::new(vec![], rvec(&[0, 0])).unwrap();
        let pl = poincare_lelong_check(&zero, &chain).unwrap();
        assert!(pl.holds() && pl.lhs.iter().all(|a| a.is_zero()));
    }

    #[test]
    fn poincare_lelong_on_p2() {
        let chain = standard_chain(&arc(fixtures::f3()), 3).unwrap();
        for w in [[1, 0, 0], [0, 1, 0], [1, 0, 1], [0, 0, 1]] {
            let f = Eigenfunction::new(vec![], rvec(&w)).unwrap();
            assert!(poincare_lelong_check(&f, &chain).unwrap().holds(), "weight {w:?}");
        }
        let f = Eigenfunction::new(vec![rvec(&[1, 0])], rvec(&[0, 1, 0])).unwrap();
        assert!(poincare_lelong_check(&f, &chain).unwrap().holds());
    }

    #[test]
    fn theta_examples() {
        let f1 = arc(fixtures::f1());
        let h = theta(&f1, &cycle(2, &[(&[&[1, 0]], 1)]), 3).unwrap();
        assert_eq!(h.eta(), &cycle(1, &[(&[&[1]], 1)]), "{:?}", h.eta());
        assert!(h.green().value_at(&f1).unwrap().is_zero());

        let f2 = arc(fixtures::f2());
        let v = theta(&f2, &cycle(2, &[(&[&[0, 1]], 1)]), 3).unwrap();
        assert!(v.eta().is_zero());
        let g = v.green().value_at(&f2).unwrap();
        let v0 = f2.vertex_index(&[rat(0)]).unwrap();
        assert!(class_equal(g.as_tuple().unwrap(), &VertexTuple::vertex_class(&f2, v0)).unwrap());

        let mixed = theta(&f2, &cycle(2, &[(&[&[1, 0]], 1), (&[&[0, 1]], 1)]), 3).unwrap();
        let h2 = theta(&f2, &cycle(2, &[(&[&[1, 0]], 1)]), 3).unwrap();
        assert!(arith_equal(&mixed, &arith_add(&h2, &v, 3).unwrap()).unwrap());
        for a in [&h, &v, &mixed] {
            assert!(theta_round_trip(a, 3).unwrap());
        }
    }

    #[test]
    fn theta_inverse_needs_certificate() {
        let f1 = arc(fixtures::f1());
        let a = ArithCycle::new(InvariantCycle::zero(1, 1), CurrentTower::zero(Flavor::ModDdbar, 0, &f1)).unwrap();
        assert!(matches!(theta_inverse(&a), Err(Error::NoCertificate)));
        let a = a.certify(&p1_chain()).unwrap();
        assert!(theta_inverse(&a).unwrap().is_zero());
    }

    #[test]
    fn representatives_on_different_models_agree() {
        let f2 = arc(fixtures::f2());
        let f5 = arc(fixtures::f5());
        let z = cycle(2, &[(&[&[1, 0]], 1)]);
        let a = LimitClass::of_cycle(&f2, &z).unwrap();
        let m = refines(&f5, &f2).unwrap();
        let b = LimitClass::new(&f5, ppfan::pullback(&m, a.representative()).unwrap()).unwrap();
        assert!(a.equals(&b).unwrap());
        let ta = theta_class(&a, 3).unwrap();
        let tb = theta_class(&b, 3).unwrap();
        assert!(arith_equal(&ta, &tb).unwrap());
    }

    #[test]
    fn products() {
        let f2 = arc(fixtures::f2());
        let plus = theta(&f2, &cycle(2, &[(&[&[1, 0]], 1)]), 2).unwrap();
        let vert = theta(&f2, &cycle(2, &[(&[&[1, 1]], 1)]), 2).unwrap();
        let one = theta_class(&LimitClass::one(&f2), 2).unwrap();
        assert!(arith_equal(&arith_product(&plus, &one, 2).unwrap(), &plus).unwrap());
        let ab = arith_product(&plus, &vert, 2).unwrap();
        let ba = arith_product(&vert, &plus, 2).unwrap();
        assert!(arith_equal(&ab, &ba).unwrap());
        assert_eq!(ab.codim(), 2);
        assert!(theta_round_trip(&ab, 2).unwrap());
    }

    #[test]
    fn relation_cycles_vanish() {
        let f2 = arc(fixtures::f2());
        let f = Eigenfunction::new(vec![], rvec(&[1, 0])).unwrap();
        let d = eigen_divisor(&f2, &[], &rvec(&[1, 3])).unwrap();
        let rel = LimitClass::new(&f2, PPFunction::one(f2.cone_over()).mul_poly(&HomogPoly::linear(&rvec(&[1, 3]))))
            .unwrap()
            .sub(&LimitClass::of_cycle(&f2, &d).unwrap())
            .unwrap();
        assert!(rel.is_zero());
        assert_eq!(f.relation_cycle(&f2).unwrap().codim(), 1);
    }

    #[test]
    fn theta_prime_examples() {
        let chain = p1_chain();
        let eta = cycle(1, &[(&[&[1]], 2)]);
        let t = LimitTower::closures(&eta, &chain).unwrap();
        let e = theta_prime(&t).unwrap();
        assert_eq!(e.eta(), &eta);
        assert!(e.green().materialize(&chain).unwrap().iter().all(|v| v.is_zero()));
        assert!(theta_prime_inverse(&e).unwrap().equals(&t));

        let fine = chain.last().unwrap();
        let g = VertexTuple::vertex_class(fine, 0).add(&VertexTuple::vertex_class(fine, 2).scale(&rat(3))).unwrap();
        let entries = chain
            .iter()
            .map(|pc| {
                let gp = if pc == fine { g.clone() } else { alpha(&refines(fine, pc).unwrap(), &g).unwrap() };
                (pc.clone(), iota_lower(&gp).unwrap())
            })
            .collect();
        let t = LimitTower::new(entries).unwrap();
        let e = theta_prime(&t).unwrap();
        assert!(e.eta().is_zero());
        assert!(class_equal(e.green().value_at(fine).unwrap().as_tuple().unwrap(), &g).unwrap());
        assert!(theta_prime_inverse(&e).unwrap().equals(&t));
    }

    #[test]
    fn incompatible_tower_is_rejected() {
        let chain = p1_chain();
        let mut entries: Vec<(Model, PPFunction)> = chain.iter().map(|pc| (pc.clone(), PPFunction::zero(pc.cone_over(), 1))).collect();
        entries[2].1 = ppfan::phi_ray(chain[2].cone_over(), &rvec(&[1, 1])).unwrap().scale(&rat(0));
        entries[1].1 = ppfan::phi_ray(chain[1].cone_over(), &rvec(&[1, 1])).unwrap();
        assert!(matches!(LimitTower::new(entries), Err(Error::CompatibilityViolation(0, 1)) | Err(Error::CompatibilityViolation(1, 2))));
    }

    #[test]
    fn module_action_examples() {
        let chain = p1_chain();
        let eta = cycle(1, &[(&[&[-1]], 1)]);
        let t = LimitTower::closures(&eta, &chain).unwrap();
        assert!(module_action(&LimitClass::one(&chain[0]), &t).unwrap().equals(&t));
        let c = LimitClass::of_cycle(&chain[1], &cycle(2, &[(&[&[1, 1]], 1)])).unwrap();
        let c2 = LimitClass::of_cycle(&chain[0], &cycle(2, &[(&[&[1, 0]], 1)])).unwrap();
        let ct = module_action(&c, &t).unwrap();
        for (pc, f) in &ct.entries()[1..] {
            assert_eq!(*f, eta.closure_on(pc).unwrap().mul(&c.on(pc).unwrap()).unwrap());
        }
        let left = module_action(&c.mul(&c2).unwrap(), &t).unwrap();
        let right = module_action(&c, &module_action(&c2, &t).unwrap()).unwrap();
        assert!(left.equals(&right));
    }

    #[test]
    fn cycle_of_recovers_plain_cycles() {
        let f3 = arc(fixtures::f3());
        let sigma = Arc::new(f3.recession_fan().unwrap());
        let z = cycle(2, &[(&[&[1, 0]], 2), (&[&[-1, -1]], -1)]);
        assert_eq!(cycle_of(&sigma, &z.pp_on(&sigma).unwrap()).unwrap(), z);
        let sq = ppfan::phi_ray(&sigma, &rvec(&[1, 0])).unwrap().mul_poly(&HomogPoly::linear(&rvec(&[1, 0])));
        let e = cycle_of(&sigma, &sq).unwrap();
        assert!(!e.is_plain());
        assert_eq!(e.pp_on(&sigma).unwrap(), sq);
    }
}
