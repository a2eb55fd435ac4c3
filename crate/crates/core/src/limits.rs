//! Direct and inverse limits over toric models: closed forms, forms modulo
//! dd^c-exact terms, towers of currents, dd^c on limits, delta currents,
//! Green currents, regularity, the cap maps g and g' and the equivariant
//! degree.

use num_traits::{One, Zero};
use parking_lot::Mutex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyhedra::{refines, standard_chain, ModelMap, PolyComplex};
use crate::polyring::HomogPoly;
use crate::ppfan::{self, phi_cone, PPFunction};
use crate::qlinalg::{fmt_rat, parse_rat, primitive, rank_of, ratvec_from_json, ratvec_to_json, Rat, RatVec};
use crate::specialfiber::{
    affine_basis, alpha, beta, cap_fundamental, class_equal, ddc_model, from_vertex_tuple, iota_upper,
    pullback_special, vertex_layer, vertical_decompose_mod_t, zeta, AffinePP, VertexTuple,
};

pub type Model = Arc<PolyComplex>;

/// The coarsest model refining both, reusing either input when possible.
pub fn common_model(a: &Model, b: &Model) -> Result<Model> {
    if a == b || refines(a, b).is_some() {
        return Ok(a.clone());
    }
    if refines(b, a).is_some() {
        return Ok(b.clone());
    }
    Ok(Arc::new(a.common_refinement(b)?))
}

fn model_map(fine: &Model, coarse: &Model) -> Result<ModelMap> {
    refines(fine, coarse).ok_or_else(|| Error::NotARefinement(format!("{} does not refine {}", fine.key(), coarse.key())))
}

/// A closed form: an affine PP function on some model, up to pullback.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    form: AffinePP,
}

impl ClosedForm {
    pub fn new(form: AffinePP) -> Self {
        ClosedForm { form }
    }

    pub fn zero(pc: &Model, degree: i64) -> Self {
        ClosedForm { form: AffinePP::zero(pc, degree) }
    }

    pub fn model(&self) -> &Model {
        self.form.complex()
    }

    pub fn degree(&self) -> i64 {
        self.form.degree()
    }

    pub fn form(&self) -> &AffinePP {
        &self.form
    }

    /// The representative on a model refining the defining one.
    pub fn on(&self, pc: &Model) -> Result<AffinePP> {
        if pc == self.model() {
            return Ok(self.form.clone());
        }
        pullback_special(&model_map(pc, self.model())?, &self.form)
    }

    /// First maximal cell of the common refinement where the two forms differ.
    pub fn witness(&self, other: &ClosedForm) -> Result<Option<usize>> {
        let m = common_model(self.model(), other.model())?;
        let (a, b) = (self.on(&m)?, other.on(&m)?);
        if a.degree() != b.degree() && !(a.is_zero() && b.is_zero()) {
            return Err(Error::DegreeMismatch(a.degree(), b.degree()));
        }
        Ok(a.pieces().iter().zip(b.pieces()).position(|(p, q)| p != q && !(p.is_zero() && q.is_zero())))
    }

    pub fn equals(&self, other: &ClosedForm) -> Result<bool> {
        Ok(self.witness(other)?.is_none())
    }

    fn binary(&self, other: &ClosedForm, op: impl Fn(&AffinePP, &AffinePP) -> Result<AffinePP>) -> Result<ClosedForm> {
        let m = common_model(self.model(), other.model())?;
        Ok(ClosedForm { form: op(&self.on(&m)?, &other.on(&m)?)? })
    }

    pub fn add(&self, other: &ClosedForm) -> Result<ClosedForm> {
        self.binary(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &ClosedForm) -> Result<ClosedForm> {
        self.binary(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &ClosedForm) -> Result<ClosedForm> {
        self.binary(other, |a, b| a.mul(b))
    }

    pub fn scale(&self, c: &Rat) -> ClosedForm {
        ClosedForm { form: self.form.scale(c) }
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }
}

pub fn form_equal(a: &ClosedForm, b: &ClosedForm) -> Result<bool> {
    a.equals(b)
}

/// A form modulo dd^c-exact terms: a vertex tuple on some model, up to zeta
/// pullback and the image of gamma.
#[derive(Clone, Debug)]
pub struct FormModDdbar {
    tuple: VertexTuple,
}

impl FormModDdbar {
    pub fn new(tuple: VertexTuple) -> Self {
        FormModDdbar { tuple }
    }

    pub fn model(&self) -> &Model {
        self.tuple.complex()
    }

    pub fn degree(&self) -> i64 {
        self.tuple.degree()
    }

    pub fn tuple(&self) -> &VertexTuple {
        &self.tuple
    }

    pub fn on(&self, pc: &Model) -> Result<VertexTuple> {
        if pc == self.model() {
            return Ok(self.tuple.clone());
        }
        zeta(&model_map(pc, self.model())?, &self.tuple)
    }

    pub fn equals(&self, other: &FormModDdbar) -> Result<bool> {
        let m = common_model(self.model(), other.model())?;
        class_equal(&self.on(&m)?, &other.on(&m)?)
    }

    pub fn add(&self, other: &FormModDdbar) -> Result<FormModDdbar> {
        let m = common_model(self.model(), other.model())?;
        Ok(FormModDdbar { tuple: self.on(&m)?.add(&other.on(&m)?)? })
    }

    pub fn scale(&self, c: &Rat) -> FormModDdbar {
        FormModDdbar { tuple: self.tuple.scale(c) }
    }

    /// Module action of a closed form.
    pub fn mul_form(&self, c: &ClosedForm) -> Result<FormModDdbar> {
        let m = common_model(self.model(), c.model())?;
        Ok(FormModDdbar { tuple: self.on(&m)?.mul_affine(&c.on(&m)?)? })
    }
}

/// dd^c on a single model, read back as an affine PP function.
fn ddc_affine(t: &VertexTuple) -> Result<AffinePP> {
    from_vertex_tuple(&ddc_model(t)?).map_err(|e| Error::Internal(format!("dd^c image is not in ker rho: {e}")))
}

pub fn ddc_form(c: &FormModDdbar) -> Result<ClosedForm> {
    Ok(ClosedForm::new(ddc_affine(&c.tuple)?))
}

/// The cap map g: multiply by the multiplicities of the components.
pub fn cap_g(c: &ClosedForm) -> Result<FormModDdbar> {
    Ok(FormModDdbar::new(cap_fundamental(&c.form)?.rep))
}

/// The product c * dd^c d on forms modulo dd^c-exact terms.
pub fn ddbar_product(c: &FormModDdbar, d: &FormModDdbar) -> Result<FormModDdbar> {
    c.mul_form(&ddc_form(d)?)
}

/// Whether c * dd^c d and d * dd^c c agree as classes.
pub fn ddbar_product_commutes(c: &FormModDdbar, d: &FormModDdbar) -> Result<bool> {
    ddbar_product(c, d)?.equals(&ddbar_product(d, c)?)
}

/// Torus-invariant cycle: combination of orbit closures V(σ), each cone
/// given by its primitive generators, with coefficients in Sym(M) of degree
/// codim - dim σ. Plain cycles have constant coefficients. Horizontal cycles
/// live in N; model-level cycles live in N x R.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCycle {
    ambient: usize,
    codim: usize,
    terms: Vec<(Vec<RatVec>, HomogPoly)>,
}

impl InvariantCycle {
    pub fn new(ambient: usize, codim: usize, terms: Vec<(Vec<RatVec>, Rat)>) -> Result<Self> {
        let terms = terms.into_iter().map(|(g, c)| (g, HomogPoly::constant(ambient, c))).collect();
        Self::equivariant(ambient, codim, terms)
    }

    /// A cycle whose coefficients may be polynomials on N.
    pub fn equivariant(ambient: usize, codim: usize, terms: Vec<(Vec<RatVec>, HomogPoly)>) -> Result<Self> {
        let mut merged: Vec<(Vec<RatVec>, HomogPoly)> = Vec::new();
        for (gens, c) in terms {
            if gens.len() > codim {
                return Err(Error::DimensionMismatch(format!("cone with {} generators in a codimension {codim} cycle", gens.len())));
            }
            if gens.iter().any(|g| g.len() != ambient) || c.nvars() != ambient {
                return Err(Error::DimensionMismatch(format!("term outside an ambient space of dimension {ambient}")));
            }
            if c.is_zero() {
                continue;
            }
            if c.degree() + gens.len() as i64 != codim as i64 {
                return Err(Error::DegreeMismatch(c.degree() + gens.len() as i64, codim as i64));
            }
            if rank_of(ambient, &gens) != gens.len() {
                return Err(Error::NonScr("cycle cone generators are linearly dependent".into()));
            }
            let mut gens: Vec<RatVec> = gens.iter().map(|g| primitive(g)).collect();
            gens.sort();
            match merged.iter_mut().find(|(g, _)| *g == gens) {
                Some(slot) => slot.1 = slot.1.add(&c)?,
                None => merged.push((gens, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(InvariantCycle { ambient, codim, terms: merged })
    }

    pub fn zero(ambient: usize, codim: usize) -> Self {
        InvariantCycle { ambient, codim, terms: Vec::new() }
    }

    /// The prime cycle V(σ).
    pub fn prime(gens: Vec<RatVec>) -> Result<Self> {
        let ambient = gens.first().map(|g| g.len()).ok_or_else(|| Error::DimensionMismatch("empty cone".into()))?;
        let k = gens.len();
        Self::new(ambient, k, vec![(gens, Rat::one())])
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn terms(&self) -> &[(Vec<RatVec>, HomogPoly)] {
        &self.terms
    }

    /// Whether every coefficient is a constant.
    pub fn is_plain(&self) -> bool {
        self.terms.iter().all(|(g, _)| g.len() == self.codim)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient || self.codim != other.codim {
            return Err(Error::DimensionMismatch("cycles of different type".into()));
        }
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Self::equivariant(self.ambient, self.codim, t)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { self.terms.iter().map(|(g, a)| (g.clone(), a.scale(c))).collect() };
        InvariantCycle { ambient: self.ambient, codim: self.codim, terms }
    }

    /// The action of a character: multiplies every coefficient by the
    /// linear form χ, raising the codimension by one.
    pub fn mul_character(&self, chi: &[Rat]) -> Result<Self> {
        if chi.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!("character of length {} on an ambient space of dimension {}", chi.len(), self.ambient)));
        }
        let l = HomogPoly::linear(chi);
        let terms = self.terms.iter().map(|(g, a)| (g.clone(), a.mul(&l))).collect();
        Self::equivariant(self.ambient, self.codim + 1, terms)
    }

    fn map_terms(&self, ambient: usize, keep: impl Fn(&[RatVec]) -> bool, gen: impl Fn(&RatVec) -> RatVec, forms: &[RatVec]) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(gs, _)| keep(gs))
            .map(|(gs, c)| (gs.iter().map(&gen).collect(), c.substitute_linear(forms, ambient)))
            .filter(|(_, c): &(Vec<RatVec>, HomogPoly)| !c.is_zero())
            .collect();
        InvariantCycle { ambient, codim: self.codim, terms }
    }

    /// Embeds a horizontal cycle at height 0 in N x R.
    pub fn at_height_zero(&self) -> Self {
        let n = self.ambient;
        let forms: Vec<RatVec> = (0..n).map(|i| unit(n + 1, i)).collect();
        self.map_terms(
            n + 1,
            |_| true,
            |g| {
                let mut h = g.clone();
                h.push(Rat::zero());
                h
            },
            &forms,
        )
    }

    fn is_horizontal_cone(gens: &[RatVec]) -> bool {
        gens.iter().all(|g| g.last().map_or(true, |h| h.is_zero()))
    }

    /// Restriction of a model-level cycle to the generic fiber: the terms
    /// whose cone lies at height 0, with t set to zero in the coefficients.
    pub fn horizontal_part(&self) -> Result<Self> {
        let n = self.ambient.checked_sub(1).ok_or_else(|| Error::DimensionMismatch("model-level cycle in dimension 0".into()))?;
        let mut forms: Vec<RatVec> = (0..n).map(|i| unit(n, i)).collect();
        forms.push(vec![Rat::zero(); n]);
        Ok(self.map_terms(n, Self::is_horizontal_cone, |g| g[..n].to_vec(), &forms))
    }

    /// The terms of a model-level cycle supported on the special fiber.
    pub fn vertical_part(&self) -> Self {
        let terms = self.terms.iter().filter(|(g, _)| !Self::is_horizontal_cone(g)).cloned().collect();
        InvariantCycle { ambient: self.ambient, codim: self.codim, terms }
    }

    /// Sum of a_σ φ_σ on a fan of matching dimension.
    pub fn pp_on(&self, fan: &Arc<crate::polyhedra::Fan>) -> Result<PPFunction> {
        if fan.dim() != self.ambient {
            return Err(Error::DimensionMismatch(format!("cycle in dimension {} on a fan of dimension {}", self.ambient, fan.dim())));
        }
        let mut out = PPFunction::zero(fan, self.codim as i64);
        for (gens, c) in &self.terms {
            let phi = if gens.is_empty() { PPFunction::one(fan) } else { phi_cone(fan, gens)? };
            out = out.add(&phi.mul_poly(c))?;
        }
        Ok(out)
    }

    /// The class of the closure of a horizontal cycle on c(Π).
    pub fn closure_on(&self, pc: &Model) -> Result<PPFunction> {
        if self.ambient != pc.rank() {
            return Err(Error::DimensionMismatch("closure needs a horizontal cycle".into()));
        }
        self.at_height_zero().pp_on(pc.cone_over())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let zero_mono = vec![0u32; self.ambient];
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(g, c)| {
                let cone: Vec<serde_json::Value> = g.iter().map(|v| ratvec_to_json(v)).collect();
                if c.degree() == 0 {
                    serde_json::json!({"cone": cone, "coeff": fmt_rat(&c.coeff(&zero_mono))})
                } else {
                    serde_json::json!({"cone": cone, "poly": c.to_json()})
                }
            })
            .collect();
        serde_json::json!({"ambient": self.ambient, "codim": self.codim, "terms": terms})
    }

    /// Reads a cycle file. `ambient` is used when the file has no explicit
    /// "ambient" entry.
    pub fn from_json(v: &serde_json::Value, ambient: usize) -> Result<Self> {
        let codim = v.get("codim").and_then(|c| c.as_u64()).ok_or_else(|| Error::Parse("cycle without codim".into()))? as usize;
        let ambient = v.get("ambient").and_then(|a| a.as_u64()).map(|a| a as usize).unwrap_or(ambient);
        let terms = v.get("terms").and_then(|t| t.as_array()).ok_or_else(|| Error::Parse("cycle without terms".into()))?;
        let mut out = Vec::new();
        for t in terms {
            let cone = t.get("cone").and_then(|c| c.as_array()).ok_or_else(|| Error::Parse("term without cone".into()))?;
            let gens = cone.iter().map(ratvec_from_json).collect::<Result<Vec<_>>>()?;
            let coeff = match (t.get("coeff"), t.get("poly")) {
                (_, Some(p)) => HomogPoly::from_json(p, ambient)?,
                (Some(serde_json::Value::String(s)), None) => HomogPoly::constant(ambient, parse_rat(s)?),
                (Some(serde_json::Value::Number(n)), None) => HomogPoly::constant(ambient, parse_rat(&n.to_string())?),
                (None, None) => HomogPoly::one(ambient),
                _ => return Err(Error::Parse("bad coefficient".into())),
            };
            out.push((gens, coeff));
        }
        Self::equivariant(ambient, codim, out)
    }
}

fn unit(n: usize, i: usize) -> RatVec {
    (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()
}

/// The two flavors of currents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Closed,
    ModDdbar,
}

/// The value of a tower on one model.
#[derive(Clone, Debug)]
pub enum TowerValue {
    Closed(AffinePP),
    ModDdbar(VertexTuple),
}

impl TowerValue {
    pub fn flavor(&self) -> Flavor {
        match self {
            TowerValue::Closed(_) => Flavor::Closed,
            TowerValue::ModDdbar(_) => Flavor::ModDdbar,
        }
    }

    pub fn model(&self) -> &Model {
        match self {
            TowerValue::Closed(f) => f.complex(),
            TowerValue::ModDdbar(t) => t.complex(),
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            TowerValue::Closed(f) => f.degree(),
            TowerValue::ModDdbar(t) => t.degree(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TowerValue::Closed(f) => f.is_zero(),
            TowerValue::ModDdbar(t) => t.is_zero(),
        }
    }

    pub fn as_closed(&self) -> Result<&AffinePP> {
        match self {
            TowerValue::Closed(f) => Ok(f),
            TowerValue::ModDdbar(_) => Err(Error::DimensionMismatch("expected a closed current".into())),
        }
    }

    pub fn as_tuple(&self) -> Result<&VertexTuple> {
        match self {
            TowerValue::ModDdbar(t) => Ok(t),
            TowerValue::Closed(_) => Err(Error::DimensionMismatch("expected a current modulo dd^c".into())),
        }
    }

    /// Exact equality for closed currents, equality of classes otherwise.
    pub fn equals(&self, other: &TowerValue) -> Result<bool> {
        match (self, other) {
            (TowerValue::Closed(a), TowerValue::Closed(b)) => Ok(a == b),
            (TowerValue::ModDdbar(a), TowerValue::ModDdbar(b)) => class_equal(a, b),
            _ => Err(Error::DimensionMismatch("currents of different flavors".into())),
        }
    }

    /// Pushforward along a refinement: beta for closed currents, alpha otherwise.
    pub fn push(&self, m: &ModelMap) -> Result<TowerValue> {
        if m.is_identity() {
            return Ok(self.clone());
        }
        match self {
            TowerValue::Closed(f) => Ok(TowerValue::Closed(beta(m, f)?)),
            TowerValue::ModDdbar(t) => Ok(TowerValue::ModDdbar(alpha(m, t)?)),
        }
    }

    pub fn add(&self, other: &TowerValue) -> Result<TowerValue> {
        match (self, other) {
            (TowerValue::Closed(a), TowerValue::Closed(b)) => Ok(TowerValue::Closed(a.add(b)?)),
            (TowerValue::ModDdbar(a), TowerValue::ModDdbar(b)) => Ok(TowerValue::ModDdbar(a.add(b)?)),
            _ => Err(Error::DimensionMismatch("currents of different flavors".into())),
        }
    }

    pub fn scale(&self, c: &Rat) -> TowerValue {
        match self {
            TowerValue::Closed(a) => TowerValue::Closed(a.scale(c)),
            TowerValue::ModDdbar(a) => TowerValue::ModDdbar(a.scale(c)),
        }
    }

    pub fn mul_affine(&self, f: &AffinePP) -> Result<TowerValue> {
        match self {
            TowerValue::Closed(a) => Ok(TowerValue::Closed(a.mul(f)?)),
            TowerValue::ModDdbar(a) => Ok(TowerValue::ModDdbar(a.mul_affine(f)?)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            TowerValue::Closed(f) => f.to_json(),
            TowerValue::ModDdbar(t) => t.to_json(),
        }
    }

    pub fn from_json(flavor: Flavor, pc: &Model, v: &serde_json::Value) -> Result<TowerValue> {
        match flavor {
            Flavor::Closed => Ok(TowerValue::Closed(AffinePP::from_json(pc, v)?)),
            Flavor::ModDdbar => Ok(TowerValue::ModDdbar(VertexTuple::from_json(pc, v)?)),
        }
    }
}

pub type RuleFn = dyn Fn(&Model) -> Result<TowerValue> + Send + Sync;

#[derive(Clone)]
enum Source {
    Finite(Vec<TowerValue>),
    Rule { base: Model, rule: Arc<RuleFn> },
}

/// A compatible system of currents, one per model. Either an explicit
/// finite family over a refinement chain, or a rule evaluated on demand
/// with a synchronized cache. Rules are evaluated on models refining their
/// base; other models are reached through a common refinement and pushed
/// down.
#[derive(Clone)]
pub struct CurrentTower {
    flavor: Flavor,
    degree: i64,
    source: Source,
    cache: Arc<Mutex<HashMap<String, TowerValue>>>,
}

impl std::fmt::Debug for CurrentTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.source {
            Source::Finite(v) => format!("finite({})", v.len()),
            Source::Rule { base, .. } => format!("rule(base {})", base.key()),
        };
        write!(f, "CurrentTower({:?}, degree {}, {kind})", self.flavor, self.degree)
    }
}

impl CurrentTower {
    /// A finite tower over a chain of successive refinements; consecutive
    /// compatibility is checked exactly.
    pub fn finite(flavor: Flavor, degree: i64, values: Vec<TowerValue>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch("empty tower".into()));
        }
        for v in &values {
            if v.flavor() != flavor {
                return Err(Error::DimensionMismatch("tower value of the wrong flavor".into()));
            }
            if v.degree() != degree && !v.is_zero() {
                return Err(Error::DegreeMismatch(v.degree(), degree));
            }
        }
        for i in 0..values.len() - 1 {
            let m = model_map(values[i + 1].model(), values[i].model())?;
            if !values[i + 1].push(&m)?.equals(&values[i])? {
                return Err(Error::CompatibilityViolation(i, i + 1));
            }
        }
        Ok(CurrentTower { flavor, degree, source: Source::Finite(values), cache: Arc::default() })
    }

    pub fn rule(flavor: Flavor, degree: i64, base: Model, rule: Arc<RuleFn>) -> Self {
        CurrentTower { flavor, degree, source: Source::Rule { base, rule }, cache: Arc::default() }
    }

    pub fn zero(flavor: Flavor, degree: i64, base: &Model) -> Self {
        let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| {
            Ok(match flavor {
                Flavor::Closed => TowerValue::Closed(AffinePP::zero(pc, degree)),
                Flavor::ModDdbar => TowerValue::ModDdbar(VertexTuple::zero(pc, degree)),
            })
        });
        Self::rule(flavor, degree, base.clone(), rule)
    }

    /// The pullback system of a closed form.
    pub fn from_form(c: &ClosedForm) -> Self {
        let cf = c.clone();
        let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| Ok(TowerValue::Closed(cf.on(pc)?)));
        Self::rule(Flavor::Closed, c.degree(), c.model().clone(), rule)
    }

    /// The zeta-pullback system of a form modulo dd^c.
    pub fn from_form_mod(c: &FormModDdbar) -> Self {
        let cf = c.clone();
        let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| Ok(TowerValue::ModDdbar(cf.on(pc)?)));
        Self::rule(Flavor::ModDdbar, c.degree(), c.model().clone(), rule)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// The earliest model the tower is defined on.
    pub fn base(&self) -> &Model {
        match &self.source {
            Source::Finite(v) => v[0].model(),
            Source::Rule { base, .. } => base,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.source, Source::Finite(_))
    }

    /// Models carried by a finite tower.
    pub fn finite_models(&self) -> Vec<Model> {
        match &self.source {
            Source::Finite(v) => v.iter().map(|x| x.model().clone()).collect(),
            Source::Rule { .. } => Vec::new(),
        }
    }

    fn evaluate(&self, pc: &Model) -> Result<TowerValue> {
        match &self.source {
            Source::Finite(values) => {
                if let Some(v) = values.iter().find(|v| v.model() == pc) {
                    return Ok(v.clone());
                }
                for v in values.iter().rev() {
                    if let Some(m) = refines(v.model(), pc) {
                        return v.push(&m);
                    }
                }
                Err(Error::NotARefinement(format!("model {} lies beyond the truncation of the tower", pc.key())))
            }
            Source::Rule { base, rule } => {
                if pc == base || refines(pc, base).is_some() {
                    return rule(pc);
                }
                let top = common_model(pc, base)?;
                let v = self.value_at(&top)?;
                v.push(&model_map(&top, pc)?)
            }
        }
    }

    /// The value on a model, memoized.
    pub fn value_at(&self, pc: &Model) -> Result<TowerValue> {
        let key = pc.key();
        if let Some(v) = self.cache.lock().get(&key) {
            return Ok(v.clone());
        }
        let v = self.evaluate(pc)?;
        if v.flavor() != self.flavor {
            return Err(Error::Internal("rule produced a value of the wrong flavor".into()));
        }
        self.cache.lock().insert(key, v.clone());
        Ok(v)
    }

    /// The standard refinement chain of the given depth above the base, or
    /// the carried chain for finite towers.
    pub fn chain(&self, depth: usize) -> Result<Vec<Model>> {
        match &self.source {
            Source::Finite(_) => Ok(self.finite_models().into_iter().take(depth.max(1)).collect()),
            Source::Rule { base, .. } => standard_chain(base, depth),
        }
    }

    /// Values on a chain, evaluated concurrently.
    pub fn materialize(&self, chain: &[Model]) -> Result<Vec<TowerValue>> {
        std::thread::scope(|s| {
            let handles: Vec<_> = chain.iter().map(|pc| s.spawn(move || self.value_at(pc))).collect();
            handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("tower evaluation panicked".into())))).collect()
        })
    }

    /// Checks pushforward compatibility on consecutive models of a chain.
    pub fn verify(&self, chain: &[Model]) -> Result<Vec<TowerValue>> {
        let values = self.materialize(chain)?;
        for i in 0..values.len().saturating_sub(1) {
            let m = model_map(&chain[i + 1], &chain[i])?;
            if !values[i + 1].push(&m)?.equals(&values[i])? {
                return Err(Error::CompatibilityViolation(i, i + 1));
            }
        }
        Ok(values)
    }

    fn map_values(&self, flavor: Flavor, degree: i64, f: Arc<dyn Fn(TowerValue) -> Result<TowerValue> + Send + Sync>) -> Self {
        let this = self.clone();
        let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| f(this.value_at(pc)?));
        Self::rule(flavor, degree, self.base().clone(), rule)
    }

    pub fn add(&self, other: &CurrentTower) -> Result<CurrentTower> {
        if self.flavor != other.flavor {
            return Err(Error::DimensionMismatch("towers of different flavors".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        let base = common_model(self.base(), other.base())?;
        let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| a.value_at(pc)?.add(&b.value_at(pc)?));
        Ok(Self::rule(self.flavor, self.degree, base, rule))
    }

    pub fn scale(&self, c: &Rat) -> CurrentTower {
        let c = c.clone();
        self.map_values(self.flavor, self.degree, Arc::new(move |v| Ok(v.scale(&c))))
    }

    /// Module action of a closed form, model by model.
    pub fn mul_form(&self, c: &ClosedForm) -> Result<CurrentTower> {
        let this = self.clone();
        let cf = c.clone();
        let base = common_model(self.base(), c.model())?;
        let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| this.value_at(pc)?.mul_affine(&cf.on(pc)?));
        Ok(Self::rule(self.flavor, self.degree + c.degree(), base, rule))
    }

    pub fn to_json(&self, chain: &[Model]) -> Result<serde_json::Value> {
        let values = self.materialize(chain)?;
        let models: Vec<serde_json::Value> =
            chain.iter().zip(&values).map(|(pc, v)| serde_json::json!({"complex": pc.to_json(), "value": v.to_json()})).collect();
        let flavor = match self.flavor {
            Flavor::Closed => "closed",
            Flavor::ModDdbar => "mod-ddbar",
        };
        Ok(serde_json::json!({"flavor": flavor, "degree": self.degree, "models": models}))
    }

    /// Reads a finite tower: `{"flavor", "degree", "models": [{"complex", "value"}]}`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let flavor = match v.get("flavor").and_then(|f| f.as_str()) {
            Some("closed") => Flavor::Closed,
            Some("mod-ddbar") => Flavor::ModDdbar,
            _ => return Err(Error::Parse("tower flavor must be \"closed\" or \"mod-ddbar\"".into())),
        };
        let degree = v.get("degree").and_then(|d| d.as_i64()).ok_or_else(|| Error::Parse("tower without degree".into()))?;
        let models = v.get("models").and_then(|m| m.as_array()).ok_or_else(|| Error::Parse("tower without models".into()))?;
        let mut values = Vec::new();
        for m in models {
            let pc = Arc::new(PolyComplex::from_json(m.get("complex").ok_or_else(|| Error::Parse("model without complex".into()))?)?);
            values.push(TowerValue::from_json(flavor, &pc, m.get("value").ok_or_else(|| Error::Parse("model without value".into()))?)?);
        }
        Self::finite(flavor, degree, values)
    }
}

/// dd^c on currents modulo dd^c, model by model, verified on a chain.
pub fn ddc_current(t: &CurrentTower, chain: &[Model]) -> Result<CurrentTower> {
    if t.flavor != Flavor::ModDdbar {
        return Err(Error::DimensionMismatch("dd^c acts on currents modulo dd^c".into()));
    }
    let out = t.map_values(Flavor::Closed, t.degree + 1, Arc::new(|v| Ok(TowerValue::Closed(ddc_affine(v.as_tuple()?)?))));
    out.verify(chain)?;
    Ok(out)
}

/// The delta current of a horizontal cycle: restrictions of its closure
/// classes to the special fibers.
pub fn delta_current(z: &InvariantCycle, base: &Model) -> Result<CurrentTower> {
    if z.ambient() != base.rank() {
        return Err(Error::DimensionMismatch("delta needs a horizontal cycle".into()));
    }
    let zc = z.clone();
    let rule: Arc<RuleFn> = Arc::new(move |pc: &Model| Ok(TowerValue::Closed(iota_upper(&zc.closure_on(pc)?, pc)?)));
    Ok(CurrentTower::rule(Flavor::Closed, z.codim() as i64, base.clone(), rule))
}

/// Checks that F restricts to the class of η at height 0.
pub fn check_lifting(pc: &Model, f: &PPFunction, eta: &InvariantCycle) -> Result<()> {
    if f.fan().as_ref() != pc.cone_over().as_ref() {
        return Err(Error::NotALifting("lifting does not live on c(Π)".into()));
    }
    if f.degree() != eta.codim() as i64 && !f.is_zero() {
        return Err(Error::NotALifting(format!("lifting has degree {}, cycle has codimension {}", f.degree(), eta.codim())));
    }
    let diff = f.sub(&eta.closure_on(pc)?)?;
    let n = pc.rank();
    let fan = pc.cone_over();
    for (p, &c) in fan.maximal().iter().enumerate() {
        let gens = fan.cone_generators(c);
        if gens.iter().filter(|g| g[n].is_zero()).count() < n {
            continue;
        }
        let forms: Vec<RatVec> = (0..=n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
        if !diff.piece(p).substitute_linear(&forms, n).is_zero() {
            return Err(Error::NotALifting(format!("differs from the cycle class at height 0 on cone {c}")));
        }
    }
    Ok(())
}

/// The Green current of η attached to a lifting F on c(Π): on Π' the
/// vertical decomposition of pi^*F minus the closure class of η.
pub fn green_from_lifting(pc: &Model, f: &PPFunction, eta: &InvariantCycle) -> Result<CurrentTower> {
    check_lifting(pc, f, eta)?;
    let (base, f, eta) = (pc.clone(), f.clone(), eta.clone());
    let k = eta.codim() as i64;
    let b2 = base.clone();
    let rule: Arc<RuleFn> = Arc::new(move |p2: &Model| {
        let lifted = if p2 == &b2 { f.clone() } else { ppfan::pullback(&model_map(p2, &b2)?, &f)? };
        let target = lifted.sub(&eta.closure_on(p2)?)?;
        let g = vertical_decompose_mod_t(p2, &target).map_err(|e| match e {
            Error::DecompositionFailed(s) => Error::Internal(format!("vertical decomposition failed: {s}")),
            e => e,
        })?;
        Ok(TowerValue::ModDdbar(g))
    });
    Ok(CurrentTower::rule(Flavor::ModDdbar, k - 1, base, rule))
}

/// The default lifting: the closure class of η.
pub fn default_lifting(pc: &Model, eta: &InvariantCycle) -> Result<PPFunction> {
    eta.closure_on(pc)
}

/// Whether every later value is the pullback of the value on the earliest
/// model. A single-model chain carries no evidence and never stabilizes.
fn stabilizes(chain: &[Model], values: &[TowerValue]) -> Result<bool> {
    if values.len() < 2 {
        return Ok(false);
    }
    for j in 1..values.len() {
        let m = model_map(&chain[j], &chain[0])?;
        let same = match (&values[0], &values[j]) {
            (TowerValue::Closed(a), TowerValue::Closed(b)) => pullback_special(&m, a)? == *b,
            (TowerValue::ModDdbar(a), TowerValue::ModDdbar(b)) => class_equal(&zeta(&m, a)?, b)?,
            _ => return Err(Error::DimensionMismatch("currents of different flavors".into())),
        };
        if !same {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A tower value that stabilized on `model`, the earliest model of the chain.
#[derive(Clone, Debug)]
pub struct Stabilized<T> {
    pub model: Model,
    pub value: T,
}

/// The closed form a closed tower stabilizes to along a chain, if any.
pub fn stabilized_form(t: &CurrentTower, chain: &[Model]) -> Result<Option<Stabilized<ClosedForm>>> {
    let values = t.verify(chain)?;
    if !stabilizes(chain, &values)? {
        return Ok(None);
    }
    Ok(Some(Stabilized { model: chain[0].clone(), value: ClosedForm::new(values[0].as_closed()?.clone()) }))
}

/// dd^c g + δ_η if it stabilizes along the chain.
pub fn is_green(g: &CurrentTower, eta: &InvariantCycle, chain: &[Model]) -> Result<Option<Stabilized<ClosedForm>>> {
    if chain.is_empty() {
        return Err(Error::DimensionMismatch("empty chain".into()));
    }
    let total = ddc_current(g, chain)?.add(&delta_current(eta, &chain[0])?)?;
    stabilized_form(&total, chain)
}

/// If dd^c g is a form along the chain, checks that g itself is the
/// pullback system of its value on the earliest model and returns it.
pub fn regularity_check(g: &CurrentTower, chain: &[Model]) -> Result<Stabilized<FormModDdbar>> {
    let d = ddc_current(g, chain)?;
    if stabilized_form(&d, chain)?.is_none() {
        return Err(Error::NotStabilized(chain.len()));
    }
    let values = g.verify(chain)?;
    if !stabilizes(chain, &values)? {
        return Err(Error::NotStabilized(chain.len()));
    }
    Ok(Stabilized { model: chain[0].clone(), value: FormModDdbar::new(values[0].as_tuple()?.clone()) })
}

/// The cap map g' on closed currents.
pub fn cap_g_prime(t: &CurrentTower) -> Result<CurrentTower> {
    if t.flavor != Flavor::Closed {
        return Err(Error::DimensionMismatch("g' acts on closed currents".into()));
    }
    Ok(t.map_values(Flavor::ModDdbar, t.degree, Arc::new(|v| Ok(TowerValue::ModDdbar(cap_fundamental(v.as_closed()?)?.rep)))))
}

/// The equivariant degree of a top-degree current: the sum over vertices of
/// the localization degree on each chart, required to agree on every model
/// of the chain. Closed currents are capped first.
pub fn degree_current(t: &CurrentTower, chain: &[Model]) -> Result<HomogPoly> {
    let t = match t.flavor {
        Flavor::Closed => cap_g_prime(t)?,
        Flavor::ModDdbar => t.clone(),
    };
    let n = t.base().rank() as i64;
    if t.degree != n {
        return Err(Error::DegreeMismatch(t.degree, n));
    }
    let values = t.materialize(chain)?;
    let mut out: Option<HomogPoly> = None;
    for v in &values {
        let mut d = HomogPoly::zero(n as usize, 0);
        for e in v.as_tuple()?.entries() {
            d = d.add(&ppfan::degree(e)?)?;
        }
        match &out {
            None => out = Some(d),
            Some(prev) if *prev == d || (prev.is_zero() && d.is_zero()) => {}
            Some(_) => return Err(Error::NotStabilized(chain.len())),
        }
    }
    out.ok_or(Error::NotStabilized(0))
}

/// A random integer combination of basis vectors with coefficients in [-3, 3].
fn random_combination<T: Clone>(basis: &[T], rng: &mut ChaCha8Rng, zero: T, add: impl Fn(&T, &T) -> Result<T>, scale: impl Fn(&T, &Rat) -> T) -> Result<T> {
    let mut acc = zero;
    for b in basis {
        let c: i64 = rng.gen_range(-3..=3);
        if c != 0 {
            acc = add(&acc, &scale(b, &Rat::from_integer(c.into())))?;
        }
    }
    Ok(acc)
}

pub fn random_vertex_tuple(pc: &Model, k: i64, rng: &mut ChaCha8Rng) -> Result<VertexTuple> {
    random_combination(&vertex_layer(pc, k), rng, VertexTuple::zero(pc, k), |a, b| a.add(b), |a, c| a.scale(c))
}

pub fn random_affine_pp(pc: &Model, k: i64, rng: &mut ChaCha8Rng) -> Result<AffinePP> {
    random_combination(&affine_basis(pc, k), rng, AffinePP::zero(pc, k), |a, b| a.add(b), |a, c| a.scale(c))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of one composition in the zero-composition suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionReport {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
}

/// Checks that dd^c∘g, g∘dd^c, dd^c∘g' and g'∘dd^c vanish on seeded random
/// samples over each model, in degrees 0..=max_degree. Currents are sampled
/// as pullback systems evaluated along the standard chain of each model.
pub fn zero_composition_suite(models: &[Model], max_degree: i64, samples: usize, depth: usize, seed: u64) -> Result<Vec<CompositionReport>> {
    let mut rng = seeded_rng(seed);
    let mut reports = vec![
        CompositionReport { name: "ddc after g", samples: 0, failures: 0 },
        CompositionReport { name: "g after ddc", samples: 0, failures: 0 },
        CompositionReport { name: "ddc after g'", samples: 0, failures: 0 },
        CompositionReport { name: "g' after ddc", samples: 0, failures: 0 },
    ];
    let mut record = |i: usize, ok: bool| {
        reports[i].samples += 1;
        if !ok {
            reports[i].failures += 1;
        }
    };
    for s in 0..samples {
        let pc = &models[s % models.len()];
        let k = (s as i64) % (max_degree + 1);
        let chain = standard_chain(pc, depth)?;

        let c = ClosedForm::new(random_affine_pp(pc, k, &mut rng)?);
        record(0, ddc_form(&cap_g(&c)?)?.is_zero());
        let t = FormModDdbar::new(random_vertex_tuple(pc, k, &mut rng)?);
        record(1, cap_g(&ddc_form(&t)?)?.equals(&FormModDdbar::new(VertexTuple::zero(pc, k + 1)))?);

        let tc = cap_g_prime(&CurrentTower::from_form(&c))?;
        let ok = ddc_current(&tc, &chain)?.materialize(&chain)?.iter().all(|v| v.is_zero());
        record(2, ok);
        let tm = CurrentTower::from_form_mod(&t);
        let back = cap_g_prime(&ddc_current(&tm, &chain)?)?;
        let mut ok = true;
        for v in back.materialize(&chain)? {
            ok &= class_equal(v.as_tuple()?, &VertexTuple::zero(v.model(), k + 1))?;
        }
        record(3, ok);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ppfan::phi_ray;
    use crate::qlinalg::{rat, rvec};
    use proptest::prelude::*;

    fn arc(pc: PolyComplex) -> Model {
        Arc::new(pc)
    }

    fn ray_cycle(v: &[i64]) -> InvariantCycle {
        InvariantCycle::prime(vec![rvec(v)]).unwrap()
    }

    fn x_form(pc: &Model) -> ClosedForm {
        ClosedForm::new(AffinePP::global(pc, HomogPoly::var(pc.rank(), 0)))
    }

    #[test]
    fn form_equal_across_refinement() {
        let (f2, f5) = (arc(fixtures::f2()), arc(fixtures::f5()));
        assert!(form_equal(&x_form(&f2), &x_form(&f5)).unwrap());
        let mut pieces = x_form(&f5).form().pieces().to_vec();
        pieces[1] = HomogPoly::var(1, 0).scale(&rat(2));
        let bent = crate::specialfiber::make_affine_pp(&f5, 1, pieces).unwrap();
        let w = x_form(&f2).witness(&ClosedForm::new(bent)).unwrap();
        assert_eq!(w, Some(1));
        let sq = x_form(&f2).mul(&x_form(&f5)).unwrap();
        assert_eq!(sq.degree(), 2);
    }

    #[test]
    fn equality_is_transitive_on_a_chain() {
        let chain = standard_chain(&arc(fixtures::f1()), 3).unwrap();
        let a = x_form(&chain[0]);
        let b = ClosedForm::new(a.on(&chain[1]).unwrap());
        let c = ClosedForm::new(a.on(&chain[2]).unwrap());
        assert!(a.equals(&b).unwrap() && b.equals(&c).unwrap() && a.equals(&c).unwrap());
    }

    #[test]
    fn ddc_form_on_canonical_model_vanishes() {
        let f1 = arc(fixtures::f1());
        for k in 0..3 {
            for b in vertex_layer(&f1, k) {
                assert!(ddc_form(&FormModDdbar::new(b)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn ddc_form_of_vertex_class_is_restricted_divisor() {
        let f2 = arc(fixtures::f2());
        let v0 = f2.vertex_index(&rvec(&[0])).unwrap();
        let d = ddc_form(&FormModDdbar::new(VertexTuple::vertex_class(&f2, v0))).unwrap();
        let phi = phi_ray(f2.cone_over(), &rvec(&[0, 1])).unwrap();
        let expected = ClosedForm::new(iota_upper(&phi, &f2).unwrap());
        assert!(d.equals(&expected).unwrap());
    }

    #[test]
    fn delta_of_ray_and_compatibility() {
        let f1 = arc(fixtures::f1());
        let f2 = arc(fixtures::f2());
        let d = delta_current(&ray_cycle(&[1]), &f1).unwrap();
        let phi = phi_ray(f2.cone_over(), &rvec(&[1, 0])).unwrap();
        let v = d.value_at(&f2).unwrap();
        assert_eq!(v.as_closed().unwrap(), &iota_upper(&phi, &f2).unwrap());
        let chain = standard_chain(&f1, 3).unwrap();
        d.verify(&chain).unwrap();
        assert!(delta_current(&InvariantCycle::zero(1, 1), &f1).unwrap().materialize(&chain).unwrap().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn ddc_of_zero_tower_is_zero() {
        let f1 = arc(fixtures::f1());
        let chain = standard_chain(&f1, 3).unwrap();
        let zero = CurrentTower::zero(Flavor::ModDdbar, 0, &f1);
        let d = ddc_current(&zero, &chain).unwrap();
        assert!(d.materialize(&chain).unwrap().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn ddc_of_green_tower_is_form_minus_delta_on_each_model() {
        let f1 = arc(fixtures::f1());
        let chain = standard_chain(&f1, 3).unwrap();
        let eta = ray_cycle(&[1]);
        let f = default_lifting(&f1, &eta).unwrap();
        let g = green_from_lifting(&f1, &f, &eta).unwrap();
        let d = ddc_current(&g, &chain).unwrap().materialize(&chain).unwrap();
        let delta = delta_current(&eta, &f1).unwrap().materialize(&chain).unwrap();
        let omega = ClosedForm::new(iota_upper(&f, &f1).unwrap());
        for ((pc, a), b) in chain.iter().zip(&d).zip(&delta) {
            let lhs = a.add(b).unwrap();
            assert!(lhs.equals(&TowerValue::Closed(omega.on(pc).unwrap())).unwrap());
        }
        // g is max(x, 0) on vertices: not a form, and δ_η is not one either.
        assert!(!g.value_at(&chain[1]).unwrap().is_zero());
        assert_eq!(regularity_check(&g, &chain).unwrap_err(), Error::NotStabilized(3));
    }

    #[test]
    fn finite_tower_compatibility_is_enforced() {
        let f2 = arc(fixtures::f2());
        let f5 = arc(fixtures::f5());
        let c = x_form(&f2);
        let good = vec![TowerValue::Closed(c.on(&f2).unwrap()), TowerValue::Closed(c.on(&f5).unwrap())];
        CurrentTower::finite(Flavor::Closed, 1, good).unwrap();
        let bad = vec![TowerValue::Closed(c.on(&f2).unwrap()), TowerValue::Closed(c.on(&f5).unwrap().scale(&rat(2)))];
        assert_eq!(CurrentTower::finite(Flavor::Closed, 1, bad).unwrap_err(), Error::CompatibilityViolation(0, 1));
    }

    #[test]
    fn green_current_of_canonical_lifting() {
        let f2 = arc(fixtures::f2());
        let eta = ray_cycle(&[1]);
        let g = green_from_lifting(&f2, &default_lifting(&f2, &eta).unwrap(), &eta).unwrap();
        assert!(g.value_at(&f2).unwrap().is_zero());
    }

    #[test]
    fn green_property_on_p1_and_p2() {
        let cases: Vec<(Model, Vec<InvariantCycle>)> = vec![
            (arc(fixtures::f1()), vec![ray_cycle(&[1]), ray_cycle(&[-1])]),
            (arc(fixtures::f2()), vec![ray_cycle(&[1]), ray_cycle(&[-1])]),
            (arc(fixtures::f3()), vec![ray_cycle(&[1, 0]), InvariantCycle::prime(vec![rvec(&[1, 0]), rvec(&[0, 1])]).unwrap()]),
        ];
        for (pc, etas) in cases {
            let chain = standard_chain(&pc, 3).unwrap();
            for eta in etas {
                let f = default_lifting(&pc, &eta).unwrap();
                let g = green_from_lifting(&pc, &f, &eta).unwrap();
                let omega = is_green(&g, &eta, &chain).unwrap().expect("green");
                let expected = ClosedForm::new(iota_upper(&f, &pc).unwrap());
                assert!(omega.value.equals(&expected).unwrap());
                assert!(Arc::ptr_eq(&omega.model, &pc));
                match regularity_check(&g, &chain) {
                    Ok(r) => assert!(CurrentTower::from_form_mod(&r.value).verify(&chain).is_ok()),
                    Err(e) => assert_eq!(e, Error::NotStabilized(3)),
                }
            }
        }
    }

    #[test]
    fn green_of_nontrivial_lifting() {
        // Lifting of [V(+ray)] on F2 that differs from the closure by the
        // vertical divisor at vertex 1.
        let f2 = arc(fixtures::f2());
        let eta = ray_cycle(&[1]);
        let fan = f2.cone_over();
        let f = eta.closure_on(&f2).unwrap().add(&phi_ray(fan, &rvec(&[1, 1])).unwrap()).unwrap();
        let g = green_from_lifting(&f2, &f, &eta).unwrap();
        let chain = standard_chain(&f2, 3).unwrap();
        let g0 = g.value_at(&f2).unwrap();
        let v1 = f2.vertex_index(&rvec(&[1])).unwrap();
        assert!(g0.equals(&TowerValue::ModDdbar(VertexTuple::vertex_class(&f2, v1))).unwrap());
        let omega = is_green(&g, &eta, &chain).unwrap().unwrap();
        assert!(omega.value.equals(&ClosedForm::new(iota_upper(&f, &f2).unwrap())).unwrap());
    }

    #[test]
    fn not_a_lifting_is_rejected() {
        let f2 = arc(fixtures::f2());
        let eta = ray_cycle(&[1]);
        let wrong = ray_cycle(&[-1]).closure_on(&f2).unwrap();
        assert!(matches!(green_from_lifting(&f2, &wrong, &eta), Err(Error::NotALifting(_))));
    }

    #[test]
    fn quadratic_tower_is_not_stabilized() {
        let f1 = arc(fixtures::f1());
        let chain = standard_chain(&f1, 3).unwrap();
        let rule: Arc<RuleFn> = Arc::new(|pc: &Model| {
            let entries = pc
                .vertices()
                .iter()
                .zip(pc.charts())
                .map(|(v, ch)| {
                    let q: Rat = v.point.iter().map(|x| x * x).sum();
                    PPFunction::one(&ch.fan).scale(&q)
                })
                .collect();
            Ok(TowerValue::ModDdbar(VertexTuple::new(pc, 0, entries)?))
        });
        let g = CurrentTower::rule(Flavor::ModDdbar, 0, f1, rule);
        assert_eq!(regularity_check(&g, &chain).unwrap_err(), Error::NotStabilized(3));
    }

    #[test]
    fn pullback_system_is_regular() {
        let f2 = arc(fixtures::f2());
        let chain = standard_chain(&f2, 3).unwrap();
        let v = f2.vertex_index(&rvec(&[0])).unwrap();
        let g = CurrentTower::from_form_mod(&FormModDdbar::new(VertexTuple::vertex_class(&f2, v)));
        assert_eq!(regularity_check(&g, &chain).unwrap().model, f2);
    }

    #[test]
    fn zero_compositions() {
        let models = vec![arc(fixtures::f1()), arc(fixtures::f2()), arc(fixtures::f5()), arc(fixtures::f3())];
        for r in zero_composition_suite(&models, 2, 12, 2, 7).unwrap() {
            assert_eq!(r.failures, 0, "{}", r.name);
        }
    }

    #[test]
    fn degree_of_point_class() {
        let f1 = arc(fixtures::f1());
        let chain = standard_chain(&f1, 3).unwrap();
        let d = delta_current(&ray_cycle(&[1]), &f1).unwrap();
        assert_eq!(degree_current(&d, &chain).unwrap(), HomogPoly::one(1));
        let z = CurrentTower::zero(Flavor::Closed, 1, &f1);
        assert!(degree_current(&z, &chain).unwrap().is_zero());
    }

    #[test]
    fn ddc_is_a_module_map() {
        let f2 = arc(fixtures::f2());
        let chain = standard_chain(&f2, 3).unwrap();
        let v = f2.vertex_index(&rvec(&[1])).unwrap();
        let t = CurrentTower::from_form_mod(&FormModDdbar::new(VertexTuple::vertex_class(&f2, v)));
        let c = x_form(&f2);
        let lhs = ddc_current(&t.mul_form(&c).unwrap(), &chain).unwrap().materialize(&chain).unwrap();
        let rhs = ddc_current(&t, &chain).unwrap().mul_form(&c).unwrap().materialize(&chain).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!(a.equals(b).unwrap());
        }
    }

    #[test]
    fn ddbar_product_commutativity_is_reported() {
        let f5 = arc(fixtures::f5());
        let basis = vertex_layer(&f5, 0);
        for a in &basis {
            for b in &basis {
                let (c, d) = (FormModDdbar::new(a.clone()), FormModDdbar::new(b.clone()));
                assert!(ddbar_product_commutes(&c, &d).unwrap());
            }
        }
    }

    #[test]
    fn cycle_json_round_trip() {
        let z = InvariantCycle::new(2, 1, vec![(vec![rvec(&[2, 0])], rat(3)), (vec![rvec(&[0, 1])], crate::qlinalg::ratq(-1, 2))]).unwrap();
        assert_eq!(z.terms()[1].0, vec![rvec(&[1, 0])]);
        let back = InvariantCycle::from_json(&z.to_json(), 2).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn tower_json_round_trip() {
        let f2 = arc(fixtures::f2());
        let eta = ray_cycle(&[1]);
        let d = delta_current(&eta, &f2).unwrap();
        let chain = standard_chain(&f2, 2).unwrap();
        let j = d.to_json(&chain).unwrap();
        let back = CurrentTower::from_json(&j).unwrap();
        for pc in &chain {
            assert!(back.value_at(pc).unwrap().equals(&d.value_at(pc).unwrap()).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn ddc_form_is_linear(seed in 0u64..1000, k in 0i64..2) {
            let f5 = arc(fixtures::f5());
            let mut rng = seeded_rng(seed);
            let a = FormModDdbar::new(random_vertex_tuple(&f5, k, &mut rng).unwrap());
            let b = FormModDdbar::new(random_vertex_tuple(&f5, k, &mut rng).unwrap());
            let lhs = ddc_form(&a.add(&b).unwrap()).unwrap();
            let rhs = ddc_form(&a).unwrap().add(&ddc_form(&b).unwrap()).unwrap();
            prop_assert!(lhs.equals(&rhs).unwrap());
        }

        #[test]
        fn pullback_tower_is_compatible(seed in 0u64..1000) {
            let f2 = arc(fixtures::f2());
            let mut rng = seeded_rng(seed);
            let c = ClosedForm::new(random_affine_pp(&f2, 1, &mut rng).unwrap());
            let chain = standard_chain(&f2, 3).unwrap();
            prop_assert!(CurrentTower::from_form(&c).verify(&chain).is_ok());
        }
    }
}
