//! Equivariant Chow groups of the special fiber of a toric model: affine
//! piecewise polynomials, the vertex and edge layers with the maps rho and
//! gamma, dd^c = -gamma rho, the maps iota^* and iota_*, cap with the
//! fundamental class, and transfer maps between models.

use num_traits::{One, Zero};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyhedra::{ModelMap, PolyComplex};
use crate::polyring::{equal_on_span, monomials, ratfun_sum_to_poly, restrict, HomogPoly, Monomial, RatFun};
use crate::ppfan::{dual_forms, graded_basis, make_pp, phi_ray_idx, PPFunction};
use crate::qlinalg::{is_zero_vec, rank_of, Rat, RatMat, RatVec};

/// Degree-k affine piecewise polynomial: one ambient polynomial per maximal
/// cell, agreeing on the direction space of every common cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePP {
    complex: Arc<PolyComplex>,
    degree: i64,
    pieces: Vec<HomogPoly>,
}

/// One piecewise polynomial on each vertex chart Π(v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexTuple {
    complex: Arc<PolyComplex>,
    degree: i64,
    entries: Vec<PPFunction>,
}

/// One piecewise polynomial on the star of each bounded edge, read in the
/// chart of its higher endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeTuple {
    complex: Arc<PolyComplex>,
    degree: i64,
    entries: Vec<PPFunction>,
}

/// A class in coker(gamma), carried by a representative.
#[derive(Clone, Debug)]
pub struct HomologyClass {
    pub rep: VertexTuple,
}

fn zero_poly(n: usize, k: i64) -> HomogPoly {
    HomogPoly::zero(n, k)
}

fn normalize(p: HomogPoly, n: usize, k: i64) -> Result<HomogPoly> {
    if p.nvars() != n {
        return Err(Error::DimensionMismatch(format!("polynomial in {} variables, expected {n}", p.nvars())));
    }
    if p.degree() == k {
        Ok(p)
    } else if p.is_zero() {
        Ok(zero_poly(n, k))
    } else {
        Err(Error::DegreeMismatch(p.degree(), k))
    }
}

/// Validates cell polynomials against the gluing condition on common cells.
pub fn make_affine_pp(pc: &Arc<PolyComplex>, degree: i64, pieces: Vec<HomogPoly>) -> Result<AffinePP> {
    let n = pc.rank();
    let fan = pc.cone_over();
    let max = fan.maximal();
    if pieces.len() != max.len() {
        return Err(Error::DimensionMismatch(format!("{} pieces for {} maximal cells", pieces.len(), max.len())));
    }
    let pieces: Vec<HomogPoly> = pieces.into_iter().map(|p| normalize(p, n, degree)).collect::<Result<_>>()?;
    for a in 0..max.len() {
        for b in a + 1..max.len() {
            let tau = fan.common_face(max[a], max[b]);
            if !pc.is_cell(tau) {
                continue;
            }
            if !equal_on_span(&pieces[a], &pieces[b], &pc.direction_space(tau)) {
                return Err(Error::FacetMismatch(a, b, fan.cone_rays(tau).to_vec()));
            }
        }
    }
    Ok(AffinePP { complex: pc.clone(), degree, pieces })
}

impl AffinePP {
    pub fn zero(pc: &Arc<PolyComplex>, degree: i64) -> Self {
        AffinePP { complex: pc.clone(), degree, pieces: vec![zero_poly(pc.rank(), degree); pc.maximal_cells().len()] }
    }

    pub fn global(pc: &Arc<PolyComplex>, p: HomogPoly) -> Self {
        AffinePP { complex: pc.clone(), degree: p.degree(), pieces: vec![p; pc.maximal_cells().len()] }
    }

    pub fn complex(&self) -> &Arc<PolyComplex> {
        &self.complex
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn pieces(&self) -> &[HomogPoly] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_complex(&self.complex, &other.complex)?;
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
        Ok(AffinePP { complex: self.complex.clone(), degree: self.degree, pieces })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        AffinePP { complex: self.complex.clone(), degree: self.degree, pieces: self.pieces.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_complex(&self.complex, &other.complex)?;
        let pieces = self.pieces.iter().zip(&other.pieces).map(|(a, b)| a.mul(b)).collect();
        Ok(AffinePP { complex: self.complex.clone(), degree: self.degree + other.degree, pieces })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> =
            self.pieces.iter().enumerate().map(|(i, p)| serde_json::json!({ "cell": i, "poly": p.to_json() })).collect();
        serde_json::json!({ "degree": self.degree, "cells": cells })
    }

    pub fn from_json(pc: &Arc<PolyComplex>, v: &serde_json::Value) -> Result<Self> {
        let degree = v.get("degree").and_then(|d| d.as_i64()).ok_or_else(|| Error::Parse("affine PP needs \"degree\"".into()))?;
        let n = pc.rank();
        let mut pieces = vec![zero_poly(n, degree); pc.maximal_cells().len()];
        let cells = v.get("cells").and_then(|c| c.as_array()).ok_or_else(|| Error::Parse("affine PP needs \"cells\"".into()))?;
        for c in cells {
            let i = c.get("cell").and_then(|x| x.as_u64()).ok_or_else(|| Error::Parse("entry needs \"cell\"".into()))? as usize;
            if i >= pieces.len() {
                return Err(Error::Parse(format!("cell index {i} out of range")));
            }
            pieces[i] = HomogPoly::from_json(c.get("poly").ok_or_else(|| Error::Parse("entry needs \"poly\"".into()))?, n)?;
        }
        make_affine_pp(pc, degree, pieces)
    }
}

fn same_complex(a: &Arc<PolyComplex>, b: &Arc<PolyComplex>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("objects live on different complexes".into()))
    }
}

fn tuple_json(key: &str, plural: &str, degree: i64, entries: &[PPFunction]) -> serde_json::Value {
    let items: Vec<serde_json::Value> = entries.iter().enumerate().map(|(i, f)| serde_json::json!({ key: i, "pp": f.to_json() })).collect();
    serde_json::json!({ "degree": degree, plural: items })
}

impl VertexTuple {
    pub fn new(pc: &Arc<PolyComplex>, degree: i64, entries: Vec<PPFunction>) -> Result<Self> {
        let charts = pc.charts();
        if entries.len() != charts.len() {
            return Err(Error::DimensionMismatch(format!("{} entries for {} vertices", entries.len(), charts.len())));
        }
        let entries = entries
            .into_iter()
            .zip(charts)
            .map(|(f, ch)| {
                if f.degree() != degree && !f.is_zero() {
                    return Err(Error::DegreeMismatch(f.degree(), degree));
                }
                make_pp(&ch.fan, degree, f.pieces().to_vec())
            })
            .collect::<Result<_>>()?;
        Ok(VertexTuple { complex: pc.clone(), degree, entries })
    }

    pub fn zero(pc: &Arc<PolyComplex>, degree: i64) -> Self {
        let entries = pc.charts().iter().map(|ch| PPFunction::zero(&ch.fan, degree)).collect();
        VertexTuple { complex: pc.clone(), degree, entries }
    }

    /// The class of the vertex `v` in degree 0 (the constant 1 on Π(v)).
    pub fn vertex_class(pc: &Arc<PolyComplex>, v: usize) -> Self {
        let mut t = Self::zero(pc, 0);
        t.entries[v] = PPFunction::one(&pc.charts()[v].fan);
        t
    }

    pub fn complex(&self) -> &Arc<PolyComplex> {
        &self.complex
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn entries(&self) -> &[PPFunction] {
        &self.entries
    }

    pub fn entry(&self, v: usize) -> &PPFunction {
        &self.entries[v]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|f| f.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_complex(&self.complex, &other.complex)?;
        if self.degree != other.degree {
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(VertexTuple { complex: self.complex.clone(), degree: self.degree, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        VertexTuple { complex: self.complex.clone(), degree: self.degree, entries: self.entries.iter().map(|f| f.scale(c)).collect() }
    }

    /// Multiplies each entry by the restriction of an affine PP function.
    pub fn mul_affine(&self, f: &AffinePP) -> Result<Self> {
        let tf = to_vertex_tuple(f)?;
        same_complex(&self.complex, &f.complex)?;
        let entries = self.entries.iter().zip(&tf.entries).map(|(a, b)| a.mul(b)).collect::<Result<_>>()?;
        Ok(VertexTuple { complex: self.complex.clone(), degree: self.degree + f.degree, entries })
    }

    pub fn flatten(&self) -> RatVec {
        self.entries.iter().flat_map(|f| f.flatten()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        tuple_json("vertex", "vertices", self.degree, &self.entries)
    }

    pub fn from_json(pc: &Arc<PolyComplex>, v: &serde_json::Value) -> Result<Self> {
        let degree = v.get("degree").and_then(|d| d.as_i64()).ok_or_else(|| Error::Parse("vertex tuple needs \"degree\"".into()))?;
        let mut t = Self::zero(pc, degree);
        let items = v.get("vertices").and_then(|x| x.as_array()).ok_or_else(|| Error::Parse("vertex tuple needs \"vertices\"".into()))?;
        for item in items {
            let i = item.get("vertex").and_then(|x| x.as_u64()).ok_or_else(|| Error::Parse("entry needs \"vertex\"".into()))? as usize;
            if i >= t.entries.len() {
                return Err(Error::Parse(format!("vertex index {i} out of range")));
            }
            let pp = item.get("pp").ok_or_else(|| Error::Parse("entry needs \"pp\"".into()))?;
            t.entries[i] = PPFunction::from_json(&pc.charts()[i].fan, pp)?;
        }
        Ok(t)
    }
}

impl EdgeTuple {
    pub fn new(pc: &Arc<PolyComplex>, degree: i64, entries: Vec<PPFunction>) -> Result<Self> {
        let edges = pc.edges();
        if entries.len() != edges.len() {
            return Err(Error::DimensionMismatch(format!("{} entries for {} edges", entries.len(), edges.len())));
        }
        let entries = entries.into_iter().zip(edges).map(|(f, e)| make_pp(&e.star, degree, f.pieces().to_vec())).collect::<Result<_>>()?;
        Ok(EdgeTuple { complex: pc.clone(), degree, entries })
    }

    pub fn zero(pc: &Arc<PolyComplex>, degree: i64) -> Self {
        let entries = pc.edges().iter().map(|e| PPFunction::zero(&e.star, degree)).collect();
        EdgeTuple { complex: pc.clone(), degree, entries }
    }

    /// The constant 1 on the edge with the given position.
    pub fn edge_class(pc: &Arc<PolyComplex>, e: usize) -> Self {
        let mut t = Self::zero(pc, 0);
        t.entries[e] = PPFunction::one(&pc.edges()[e].star);
        t
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn entries(&self) -> &[PPFunction] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|f| f.is_zero())
    }

    pub fn flatten(&self) -> RatVec {
        self.entries.iter().flat_map(|f| f.flatten()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        tuple_json("edge", "edges", self.degree, &self.entries)
    }
}

/// Reads an affine PP function in each vertex chart.
pub fn to_vertex_tuple(f: &AffinePP) -> Result<VertexTuple> {
    let pc = &f.complex;
    let entries = pc
        .charts()
        .iter()
        .map(|ch| make_pp(&ch.fan, f.degree, ch.cell_of_max.iter().map(|&p| f.pieces[p].clone()).collect()))
        .collect::<Result<_>>()?;
    Ok(VertexTuple { complex: pc.clone(), degree: f.degree, entries })
}

/// Inverse of [`to_vertex_tuple`] on ker(rho).
pub fn from_vertex_tuple(t: &VertexTuple) -> Result<AffinePP> {
    let pc = &t.complex;
    let charts = pc.charts();
    for e in pc.edges() {
        for &p in &e.cells {
            let a = t.entries[e.v1].piece(charts[e.v1].max_of_cell[&p]);
            let b = t.entries[e.v2].piece(charts[e.v2].max_of_cell[&p]);
            if a != b && !(a.is_zero() && b.is_zero()) {
                return Err(Error::NotInKernel(e.cone));
            }
        }
    }
    let pieces = pc
        .maximal_cells()
        .iter()
        .enumerate()
        .map(|(p, &c)| {
            let v = pc.cell_vertices(c)[0];
            t.entries[v].piece(charts[v].max_of_cell[&p]).clone()
        })
        .collect();
    make_affine_pp(pc, t.degree, pieces)
}

/// Difference of the endpoint functions on the star of each bounded edge.
pub fn rho(t: &VertexTuple) -> Result<EdgeTuple> {
    let pc = &t.complex;
    let charts = pc.charts();
    let n = pc.rank();
    let entries = pc
        .edges()
        .iter()
        .map(|e| {
            let mut pieces = vec![zero_poly(n, t.degree); e.star.maximal().len()];
            for (i, &p) in e.cells.iter().enumerate() {
                let a = t.entries[e.v1].piece(charts[e.v1].max_of_cell[&p]);
                let b = t.entries[e.v2].piece(charts[e.v2].max_of_cell[&p]);
                pieces[e.star_max_of_cell[i]] = a.sub(b)?;
            }
            make_pp(&e.star, t.degree, pieces)
        })
        .collect::<Result<_>>()?;
    Ok(EdgeTuple { complex: pc.clone(), degree: t.degree, entries })
}

/// Pushes edge functions to both endpoints (multiplying by the Courant
/// function of the edge ray), with sign + at the higher endpoint.
pub fn gamma(e: &EdgeTuple) -> Result<VertexTuple> {
    let pc = &e.complex;
    let charts = pc.charts();
    let mut out = VertexTuple::zero(pc, e.degree + 1);
    for (info, g) in pc.edges().iter().zip(&e.entries) {
        if g.is_zero() {
            continue;
        }
        for (slot, (v, sign)) in [(info.v1, Rat::one()), (info.v2, -Rat::one())].into_iter().enumerate() {
            let ch = &charts[v];
            let phi = phi_ray_idx(&ch.fan, info.ray_at[slot])?;
            let mut pieces = vec![zero_poly(pc.rank(), e.degree + 1); ch.fan.maximal().len()];
            for (i, &p) in info.cells.iter().enumerate() {
                let cp = ch.max_of_cell[&p];
                pieces[cp] = g.piece(info.star_max_of_cell[i]).mul(phi.piece(cp)).scale(&sign);
            }
            let contrib = make_pp(&ch.fan, e.degree + 1, pieces)?;
            out.entries[v] = out.entries[v].add(&contrib)?;
        }
    }
    Ok(out)
}

/// dd^c on the special fiber, -gamma(rho(t)), cross-checked against the
/// closed form sum over edges of phi_{v,gamma} (f_{other end} - f_v).
pub fn ddc_model(t: &VertexTuple) -> Result<VertexTuple> {
    let out = gamma(&rho(t)?)?.scale(&-Rat::one());
    let closed = ddc_closed_form(t)?;
    if out != closed {
        return Err(Error::Internal("dd^c disagrees with its closed form".into()));
    }
    Ok(out)
}

/// dd^c computed edge by edge from the endpoint functions.
pub fn ddc_closed_form(t: &VertexTuple) -> Result<VertexTuple> {
    let pc = &t.complex;
    let charts = pc.charts();
    let n = pc.rank();
    let mut out = VertexTuple::zero(pc, t.degree + 1);
    for e in pc.edges() {
        for (slot, (v, w)) in [(e.v1, e.v2), (e.v2, e.v1)].into_iter().enumerate() {
            let ch = &charts[v];
            let phi = phi_ray_idx(&ch.fan, e.ray_at[slot])?;
            let mut pieces = vec![zero_poly(n, t.degree + 1); ch.fan.maximal().len()];
            for &p in &e.cells {
                let cp = ch.max_of_cell[&p];
                let other = t.entries[w].piece(charts[w].max_of_cell[&p]);
                let own = t.entries[v].piece(cp);
                pieces[cp] = phi.piece(cp).mul(&other.sub(own)?);
            }
            out.entries[v] = out.entries[v].add(&make_pp(&ch.fan, t.degree + 1, pieces)?)?;
        }
    }
    Ok(out)
}

/// Restriction to the special fiber: substitute height 0 on each cell.
pub fn iota_upper(f: &PPFunction, pc: &Arc<PolyComplex>) -> Result<AffinePP> {
    let n = pc.rank();
    if f.fan().dim() != n + 1 {
        return Err(Error::DimensionMismatch("function does not live on c(Π)".into()));
    }
    let forms: Vec<RatVec> = (0..=n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    let pieces = f.pieces().iter().map(|p| p.substitute_linear(&forms, n)).collect();
    make_affine_pp(pc, f.degree(), pieces).map_err(|e| Error::Internal(format!("restriction to the special fiber is not affine PP: {e}")))
}

/// Linear forms substituting x -> x - t v in n+1 variables.
fn lift_forms(v: &[Rat]) -> Vec<RatVec> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut f = vec![Rat::zero(); n + 1];
            f[i] = Rat::one();
            f[n] = -v[i].clone();
            f
        })
        .collect()
}

/// Pushforward from the special fiber: sum over vertices of the lifted
/// chart function times the Courant function of the vertex ray.
pub fn iota_lower(t: &VertexTuple) -> Result<PPFunction> {
    let pc = &t.complex;
    let fan = pc.cone_over();
    let n = pc.rank();
    let mut out = PPFunction::zero(fan, t.degree + 1);
    for (v, vert) in pc.vertices().iter().enumerate() {
        let f = &t.entries[v];
        if f.is_zero() {
            continue;
        }
        let ch = &pc.charts()[v];
        let forms = lift_forms(&vert.point);
        let phi = phi_ray_idx(fan, vert.ray)?;
        let mut pieces = vec![zero_poly(n + 1, t.degree + 1); fan.maximal().len()];
        for (cp, &p) in ch.cell_of_max.iter().enumerate() {
            pieces[p] = f.piece(cp).substitute_linear(&forms, n + 1).mul(phi.piece(p));
        }
        out = out.add(&make_pp(fan, t.degree + 1, pieces)?)?;
    }
    Ok(out)
}

/// The cap product with the fundamental class of the special fiber.
pub fn cap_fundamental(f: &AffinePP) -> Result<HomologyClass> {
    let pc = &f.complex;
    let t = to_vertex_tuple(f)?;
    let entries = t.entries.iter().zip(pc.vertices()).map(|(e, v)| e.scale(&Rat::from_integer(v.multiplicity.clone()))).collect();
    Ok(HomologyClass { rep: VertexTuple { complex: pc.clone(), degree: f.degree, entries } })
}

/// Basis of the vertex layer in degree k: chart bases placed at each vertex.
pub fn vertex_layer(pc: &Arc<PolyComplex>, k: i64) -> Vec<VertexTuple> {
    let mut out = Vec::new();
    for (v, ch) in pc.charts().iter().enumerate() {
        for b in graded_basis(&ch.fan, k) {
            let mut t = VertexTuple::zero(pc, k);
            t.entries[v] = b;
            out.push(t);
        }
    }
    out
}

/// Basis of the edge layer in degree k.
pub fn edge_layer(pc: &Arc<PolyComplex>, k: i64) -> Vec<EdgeTuple> {
    let mut out = Vec::new();
    for (i, e) in pc.edges().iter().enumerate() {
        for b in graded_basis(&e.star, k) {
            let mut t = EdgeTuple::zero(pc, k);
            t.entries[i] = b;
            out.push(t);
        }
    }
    out
}

fn columns_matrix(rows: usize, cols: &[RatVec]) -> RatMat {
    if cols.is_empty() {
        return RatMat::zeros(rows, 0);
    }
    RatMat::from_cols(rows, cols).expect("columns of equal length")
}

fn combine(basis: &[VertexTuple], coeffs: &[Rat], pc: &Arc<PolyComplex>, k: i64) -> Result<VertexTuple> {
    let mut out = VertexTuple::zero(pc, k);
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add(&b.scale(c))?;
        }
    }
    Ok(out)
}

fn flat_len(pc: &Arc<PolyComplex>, k: i64) -> usize {
    VertexTuple::zero(pc, k).flatten().len()
}

/// Basis of ker(rho) in degree k, as vertex tuples.
pub fn ker_rho_basis(pc: &Arc<PolyComplex>, k: i64) -> Result<Vec<VertexTuple>> {
    let basis = vertex_layer(pc, k);
    let cols: Vec<RatVec> = basis.iter().map(|b| rho(b).map(|e| e.flatten())).collect::<Result<_>>()?;
    let rows = EdgeTuple::zero(pc, k).flatten().len();
    if rows == 0 {
        return Ok(basis);
    }
    columns_matrix(rows, &cols).kernel_basis().iter().map(|c| combine(&basis, c, pc, k)).collect()
}

/// Basis of the degree-k affine PP functions by the cell-wise gluing solve.
pub fn affine_basis(pc: &Arc<PolyComplex>, k: i64) -> Vec<AffinePP> {
    if k < 0 {
        return Vec::new();
    }
    let n = pc.rank();
    let monos: Vec<Monomial> = monomials(n, k as usize);
    let nm = monos.len();
    let fan = pc.cone_over();
    let max = fan.maximal();
    let unknowns = nm * max.len();
    let mut rows: Vec<RatVec> = Vec::new();
    for a in 0..max.len() {
        for b in a + 1..max.len() {
            let tau = fan.common_face(max[a], max[b]);
            if !pc.is_cell(tau) {
                continue;
            }
            let span = pc.direction_space(tau);
            let images: Vec<HomogPoly> = monos.iter().map(|m| restrict(&HomogPoly::monomial(m.clone(), Rat::one()), &span)).collect();
            for target in monomials(span.dim(), k as usize) {
                let mut row = vec![Rat::zero(); unknowns];
                for (j, img) in images.iter().enumerate() {
                    let c = img.coeff(&target);
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
    let kernel: Vec<RatVec> = if rows.is_empty() {
        (0..unknowns).map(|i| (0..unknowns).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
    } else {
        RatMat::from_rows(unknowns, &rows).expect("constraint rows").kernel_basis()
    };
    kernel
        .iter()
        .map(|c| {
            let pieces = c.chunks(nm).map(|ch| HomogPoly::from_coeff_vec(n, k, &monos, ch)).collect();
            make_affine_pp(pc, k, pieces).expect("kernel vectors satisfy the gluing conditions")
        })
        .collect()
}

/// Dimension of the degree-k affine PP functions, certified against ker(rho).
pub fn dim_affine_pp(pc: &Arc<PolyComplex>, k: i64) -> Result<usize> {
    let a = affine_basis(pc, k);
    let kr = ker_rho_basis(pc, k)?;
    if a.len() != kr.len() {
        return Err(Error::Internal(format!("affine PP dimension {} differs from dim ker rho {}", a.len(), kr.len())));
    }
    let imgs: Vec<RatVec> = a.iter().map(|f| to_vertex_tuple(f).map(|t| t.flatten())).collect::<Result<_>>()?;
    let mut all = imgs.clone();
    all.extend(kr.iter().map(|t| t.flatten()));
    let len = flat_len(pc, k);
    if rank_of(len, &all) != a.len() {
        return Err(Error::Internal("affine PP functions and ker rho span different spaces".into()));
    }
    Ok(a.len())
}

/// Flattened images of gamma landing in the degree-k vertex layer.
fn gamma_image(pc: &Arc<PolyComplex>, k: i64) -> Result<Vec<RatVec>> {
    edge_layer(pc, k - 1).iter().map(|e| gamma(e).map(|t| t.flatten())).collect()
}

/// Quotient basis of coker(gamma) in vertex degree k.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub degree: i64,
    pub dim: usize,
    pub basis: Vec<VertexTuple>,
}

pub fn homology_presentation(pc: &Arc<PolyComplex>, k: i64) -> Result<Presentation> {
    let len = flat_len(pc, k);
    let mut span = gamma_image(pc, k)?;
    let mut r = rank_of(len, &span);
    let mut basis = Vec::new();
    for b in vertex_layer(pc, k) {
        span.push(b.flatten());
        let r2 = rank_of(len, &span);
        if r2 > r {
            basis.push(b);
            r = r2;
        } else {
            span.pop();
        }
    }
    Ok(Presentation { degree: k, dim: basis.len(), basis })
}

/// Is the vertex tuple in the image of gamma?
pub fn in_gamma_image(t: &VertexTuple) -> Result<bool> {
    let pc = &t.complex;
    if t.is_zero() {
        return Ok(true);
    }
    let cols = gamma_image(pc, t.degree)?;
    let target = t.flatten();
    if cols.is_empty() {
        return Ok(false);
    }
    Ok(columns_matrix(target.len(), &cols).solve(&target)?.is_some())
}

pub fn class_equal(a: &VertexTuple, b: &VertexTuple) -> Result<bool> {
    in_gamma_image(&a.sub(b)?)
}

impl HomologyClass {
    pub fn equals(&self, other: &HomologyClass) -> Result<bool> {
        class_equal(&self.rep, &other.rep)
    }

    pub fn is_zero(&self) -> Result<bool> {
        in_gamma_image(&self.rep)
    }
}

/// Dimensions of ker and coker of iota^* iota_* in degree k, together with
/// dim PP^k of the recession fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KerCokerReport {
    pub degree: i64,
    pub ker: usize,
    pub coker: usize,
    pub pp_sigma: usize,
}

impl KerCokerReport {
    pub fn consistent(&self) -> bool {
        self.ker == self.coker && self.coker == self.pp_sigma
    }
}

/// Flattened images of dd^c from the degree-k vertex layer.
fn ddc_images(pc: &Arc<PolyComplex>, k: i64) -> Result<(Vec<VertexTuple>, Vec<RatVec>)> {
    let basis = vertex_layer(pc, k);
    let imgs = basis.iter().map(|b| ddc_model(b).map(|t| t.flatten())).collect::<Result<_>>()?;
    Ok((basis, imgs))
}

pub fn ker_coker_report(pc: &Arc<PolyComplex>, k: i64) -> Result<KerCokerReport> {
    let sigma = Arc::new(pc.recession_fan()?);
    let pp_sigma = graded_basis(&sigma, k).len();

    let (basis, imgs) = ddc_images(pc, k)?;
    let rows = flat_len(pc, k + 1);
    let d = columns_matrix(rows, &imgs);
    let ker_d = if rows == 0 { basis.len() } else { basis.len() - d.rank() };
    let gam = gamma_image(pc, k)?;
    let len = flat_len(pc, k);
    for g in &gam {
        let coords = columns_matrix(len, &basis.iter().map(|b| b.flatten()).collect::<Vec<_>>()).solve(g)?;
        let coords = coords.ok_or_else(|| Error::Internal("gamma image outside the vertex layer".into()))?;
        let img = d.mul_vec(&coords)?;
        if !is_zero_vec(&img) {
            return Err(Error::Internal("dd^c does not vanish on the image of gamma".into()));
        }
    }
    let ker = ker_d - rank_of(len, &gam);

    let kr = ker_rho_basis(pc, k)?.len();
    let (_, prev) = ddc_images(pc, k - 1)?;
    let coker = kr - rank_of(len, &prev);
    Ok(KerCokerReport { degree: k, ker, coker, pp_sigma })
}

/// Solves iota_lower(g) = target for a vertex tuple g of degree k-1.
pub fn vertical_decompose(pc: &Arc<PolyComplex>, target: &PPFunction) -> Result<VertexTuple> {
    let k = target.degree() - 1;
    if target.is_zero() {
        return Ok(VertexTuple::zero(pc, k));
    }
    let basis = vertex_layer(pc, k);
    let cols: Vec<RatVec> = basis.iter().map(|b| iota_lower(b).map(|f| f.flatten())).collect::<Result<_>>()?;
    let rhs = target.flatten();
    if cols.is_empty() {
        return Err(Error::DecompositionFailed("vertex layer is empty in this degree".into()));
    }
    let sol = columns_matrix(rhs.len(), &cols)
        .solve(&rhs)?
        .ok_or_else(|| Error::DecompositionFailed("class is not supported on the special fiber".into()))?;
    combine(&basis, &sol, pc, k)
}

/// Solves target = iota_lower(g) + t * iota_lower(h) and returns g. Falls
/// back from [`vertical_decompose`] when the exact solve has no solution;
/// the t-multiple vanishes under iota^*.
pub fn vertical_decompose_mod_t(pc: &Arc<PolyComplex>, target: &PPFunction) -> Result<VertexTuple> {
    match vertical_decompose(pc, target) {
        Err(Error::DecompositionFailed(_)) => {}
        other => return other,
    }
    let k = target.degree() - 1;
    let n = pc.rank();
    let t = HomogPoly::var(n + 1, n);
    let basis = vertex_layer(pc, k);
    let mut cols: Vec<RatVec> = basis.iter().map(|b| iota_lower(b).map(|f| f.flatten())).collect::<Result<_>>()?;
    for b in vertex_layer(pc, k - 1) {
        cols.push(iota_lower(&b)?.mul_poly(&t).flatten());
    }
    let rhs = target.flatten();
    let sol = columns_matrix(rhs.len(), &cols)
        .solve(&rhs)?
        .ok_or_else(|| Error::DecompositionFailed("class is not supported on the special fiber modulo t".into()))?;
    combine(&basis, &sol[..basis.len()], pc, k)
}

fn check_map(m: &ModelMap) -> Result<()> {
    if m.source.rank() != m.target.rank() {
        return Err(Error::NotARefinement("ranks differ".into()));
    }
    Ok(())
}

/// Pullback of an affine PP function to a refinement: re-read the cell
/// polynomials on the subdivided cells.
pub fn pullback_special(m: &ModelMap, f: &AffinePP) -> Result<AffinePP> {
    check_map(m)?;
    same_complex(&m.target, &f.complex)?;
    let pieces = (0..m.source.maximal_cells().len()).map(|p| f.pieces[m.max_image(p)].clone()).collect();
    make_affine_pp(&m.source, f.degree, pieces)
}

/// Pullback of vertex tuples to a refinement. A new vertex gets the sum of
/// the functions of the vertices of its carrier cell, restricted there.
pub fn zeta(m: &ModelMap, t: &VertexTuple) -> Result<VertexTuple> {
    check_map(m)?;
    same_complex(&m.target, &t.complex)?;
    let (src, tgt) = (&m.source, &m.target);
    let tcharts = tgt.charts();
    let n = src.rank();
    let mut entries = Vec::new();
    for (v2, ch2) in src.charts().iter().enumerate() {
        let point = &src.vertices()[v2].point;
        let carrier_vertices: Vec<usize> = match tgt.vertex_index(point) {
            Some(v) => vec![v],
            None => tgt.cell_vertices(m.mu[src.vertex_cone(v2)]),
        };
        let mut pieces = Vec::new();
        for &p2 in &ch2.cell_of_max {
            let p = m.max_image(p2);
            let mut acc = zero_poly(n, t.degree);
            for &v in &carrier_vertices {
                acc = acc.add(t.entries[v].piece(tcharts[v].max_of_cell[&p]))?;
            }
            pieces.push(acc);
        }
        entries.push(make_pp(&ch2.fan, t.degree, pieces)?);
    }
    Ok(VertexTuple { complex: src.clone(), degree: t.degree, entries })
}

/// Pushforward of vertex tuples along a refinement. The component of a
/// vertex v' maps onto the stratum of its carrier cell σ; the result is
/// pushed into the chart of the highest vertex of σ by localization: on each
/// cell Λ containing σ the piece is the sum of f'_{Λ'} φ_Λ / φ_{Λ'} over the
/// cells Λ' at v' inside Λ. For old vertices this is the toric pushforward
/// of the vertex charts.
pub fn alpha(m: &ModelMap, t: &VertexTuple) -> Result<VertexTuple> {
    check_map(m)?;
    same_complex(&m.source, &t.complex)?;
    let (src, tgt) = (&m.source, &m.target);
    let n = tgt.rank();
    let scharts = src.charts();
    let tcharts = tgt.charts();
    let mut out = VertexTuple::zero(tgt, t.degree);
    for (v2, ch2) in scharts.iter().enumerate() {
        let f = &t.entries[v2];
        if f.is_zero() {
            continue;
        }
        let carrier = m.mu[src.vertex_cone(v2)];
        let w = tgt.cell_vertices(carrier).into_iter().max_by(|a, b| tgt.vertices()[*a].point.cmp(&tgt.vertices()[*b].point)).ok_or_else(|| Error::NotARefinement("vertex maps to no cell".into()))?;
        let ch = &tcharts[w];
        let mut pieces = vec![zero_poly(n, t.degree); ch.fan.maximal().len()];
        for (cp, &p) in ch.cell_of_max.iter().enumerate() {
            if !tgt.cone_over().is_face(carrier, tgt.maximal_cells()[p]) {
                continue;
            }
            let phi = dual_product(&ch.fan, ch.fan.maximal()[cp])?;
            let terms: Vec<RatFun> = ch2
                .cell_of_max
                .iter()
                .enumerate()
                .filter(|(_, &p2)| m.max_image(p2) == p)
                .map(|(cp2, _)| Ok(RatFun::new(f.piece(cp2).mul(&phi), dual_forms(&ch2.fan, ch2.fan.maximal()[cp2])?)))
                .collect::<Result<_>>()?;
            if !terms.is_empty() {
                let sum = ratfun_sum_to_poly(&terms)?;
                pieces[cp] = if sum.is_zero() { zero_poly(n, t.degree) } else { sum };
            }
        }
        let contrib = make_pp(&ch.fan, t.degree, pieces)?;
        out.entries[w] = out.entries[w].add(&contrib)?;
    }
    Ok(out)
}

fn dual_product(fan: &crate::polyhedra::Fan, cone: usize) -> Result<HomogPoly> {
    Ok(dual_forms(fan, cone)?.iter().fold(HomogPoly::one(fan.dim()), |acc, l| acc.mul(&HomogPoly::linear(l))))
}

/// Pushforward of affine PP functions: alpha on vertex tuples, read back as
/// an affine PP function on the coarser model.
pub fn beta(m: &ModelMap, f: &AffinePP) -> Result<AffinePP> {
    from_vertex_tuple(&alpha(m, &to_vertex_tuple(f)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polyhedra::refines;
    use crate::ppfan::phi_ray;
    use crate::qlinalg::{rat, rvec};
    use proptest::prelude::*;

    fn x1() -> HomogPoly {
        HomogPoly::var(1, 0)
    }

    fn cell_pos(pc: &PolyComplex, pts: &[i64], rays: &[i64]) -> usize {
        let mut gens: Vec<RatVec> = pts.iter().map(|&p| rvec(&[p, 1])).collect();
        gens.extend(rays.iter().map(|&r| rvec(&[r, 0])));
        let c = pc.cone_over().find_cone(&gens).unwrap();
        pc.cone_over().max_position(c).unwrap()
    }

    /// Pieces in the order ((-inf,0], [0,1], [1,inf)).
    fn f2_pp(k: i64, ps: [HomogPoly; 3]) -> Result<AffinePP> {
        let pc = Arc::new(fixtures::f2());
        let order = [cell_pos(&pc, &[0], &[-1]), cell_pos(&pc, &[0, 1], &[]), cell_pos(&pc, &[1], &[1])];
        let mut pieces = vec![HomogPoly::zero(1, k); 3];
        for (i, p) in ps.into_iter().enumerate() {
            pieces[order[i]] = p;
        }
        make_affine_pp(&pc, k, pieces)
    }

    fn chart_piece(t: &VertexTuple, point: i64, dir: i64) -> HomogPoly {
        let pc = t.complex();
        let v = pc.vertex_index(&rvec(&[point])).unwrap();
        let fan = &pc.charts()[v].fan;
        let c = fan.find_cone(&[rvec(&[dir])]).unwrap();
        t.entry(v).piece(fan.max_position(c).unwrap()).clone()
    }

    #[test]
    fn affine_pp_validation() {
        assert!(f2_pp(1, [x1(), x1(), x1()]).is_ok());
        assert!(f2_pp(1, [HomogPoly::zero(1, 1), x1(), x1()]).is_ok());
        let c = |n| HomogPoly::constant(1, rat(n));
        assert!(matches!(f2_pp(0, [c(1), c(2), c(1)]), Err(Error::FacetMismatch(..))));
    }

    #[test]
    fn affine_dimensions() {
        let f2 = Arc::new(fixtures::f2());
        assert_eq!(dim_affine_pp(&f2, 0).unwrap(), 1);
        assert_eq!(dim_affine_pp(&f2, 1).unwrap(), 3);
        assert_eq!(dim_affine_pp(&f2, 2).unwrap(), 3);
        let f1 = Arc::new(fixtures::f1());
        assert_eq!(dim_affine_pp(&f1, 1).unwrap(), 2);
        for pc in [fixtures::f5(), fixtures::half(), fixtures::f3(), fixtures::f3_subdivided()] {
            let pc = Arc::new(pc);
            for k in 0..3 {
                dim_affine_pp(&pc, k).unwrap();
            }
        }
    }

    #[test]
    fn vertex_tuple_round_trip() {
        let g = f2_pp(1, [x1(), x1(), x1()]).unwrap();
        let t = to_vertex_tuple(&g).unwrap();
        for (p, d) in [(0, 1), (0, -1), (1, 1), (1, -1)] {
            assert_eq!(chart_piece(&t, p, d), x1());
        }
        assert_eq!(from_vertex_tuple(&t).unwrap(), g);
        let pc = t.complex().clone();
        let v0 = pc.vertex_index(&rvec(&[0])).unwrap();
        let fan0 = pc.charts()[v0].fan.clone();
        let mut bad = VertexTuple::zero(&pc, 1);
        bad.entries[v0] = phi_ray(&fan0, &rvec(&[1])).unwrap();
        assert!(matches!(from_vertex_tuple(&bad), Err(Error::NotInKernel(_))));
        assert!(from_vertex_tuple(&VertexTuple::zero(&pc, 1)).unwrap().is_zero());
    }

    #[test]
    fn rho_examples() {
        let pc = Arc::new(fixtures::f2());
        let v0 = pc.vertex_index(&rvec(&[0])).unwrap();
        let v1 = pc.vertex_index(&rvec(&[1])).unwrap();
        let g = to_vertex_tuple(&AffinePP::global(&pc, x1())).unwrap();
        assert!(rho(&g).unwrap().is_zero());
        let fan1 = pc.charts()[v1].fan.clone();
        let mut t = VertexTuple::zero(&pc, 1);
        t.entries[v1] = phi_ray(&fan1, &rvec(&[-1])).unwrap().scale(&rat(-3));
        let r = rho(&t).unwrap();
        assert_eq!(r.entries()[0].piece(0), &x1().scale(&rat(3)));
        let r0 = rho(&VertexTuple::vertex_class(&pc, v0)).unwrap();
        assert_eq!(r0.entries()[0].piece(0), &HomogPoly::constant(1, rat(-1)));
    }

    #[test]
    fn gamma_and_ddc_examples() {
        let pc = Arc::new(fixtures::f2());
        let v0 = pc.vertex_index(&rvec(&[0])).unwrap();
        let g = gamma(&EdgeTuple::edge_class(&pc, 0)).unwrap();
        assert_eq!(chart_piece(&g, 1, -1), x1().scale(&rat(-1)));
        assert!(chart_piece(&g, 1, 1).is_zero());
        assert_eq!(chart_piece(&g, 0, 1), x1().scale(&rat(-1)));
        assert!(chart_piece(&g, 0, -1).is_zero());
        assert!(gamma(&EdgeTuple::zero(&pc, 0)).unwrap().is_zero());

        let d = ddc_model(&VertexTuple::vertex_class(&pc, v0)).unwrap();
        assert_eq!(chart_piece(&d, 0, 1), x1().scale(&rat(-1)));
        assert!(chart_piece(&d, 0, -1).is_zero());
        assert_eq!(chart_piece(&d, 1, -1), x1().scale(&rat(-1)));
        assert!(chart_piece(&d, 1, 1).is_zero());

        let f1 = Arc::new(fixtures::f1());
        for b in vertex_layer(&f1, 2) {
            assert!(ddc_model(&b).unwrap().is_zero());
        }
    }

    #[test]
    fn iota_maps() {
        let pc = Arc::new(fixtures::f2());
        let v0 = pc.vertex_index(&rvec(&[0])).unwrap();
        let phi = phi_ray(pc.cone_over(), &rvec(&[0, 1])).unwrap();
        assert_eq!(iota_lower(&VertexTuple::vertex_class(&pc, v0)).unwrap(), phi);
        let up = iota_upper(&phi, &pc).unwrap();
        let expect = f2_pp(1, [HomogPoly::zero(1, 1), x1().scale(&rat(-1)), HomogPoly::zero(1, 1)]).unwrap();
        assert_eq!(up, expect);
        assert_eq!(to_vertex_tuple(&up).unwrap(), ddc_model(&VertexTuple::vertex_class(&pc, v0)).unwrap());
        let tt = PPFunction::global(pc.cone_over(), HomogPoly::var(2, 1).pow(2));
        assert!(iota_upper(&tt, &pc).unwrap().is_zero());
        let f1 = Arc::new(fixtures::f1());
        let g = crate::ppfan::graded_basis(f1.cone_over(), 1);
        for f in g {
            let up = iota_upper(&f, &f1).unwrap();
            assert_eq!(up.pieces().len(), 2);
        }
    }

    #[test]
    fn composite_identities() {
        for pc in [fixtures::f2(), fixtures::f5(), fixtures::f3_subdivided()] {
            let pc = Arc::new(pc);
            for k in 0..2 {
                for b in vertex_layer(&pc, k) {
                    let d = ddc_model(&b).unwrap();
                    let up = iota_upper(&iota_lower(&b).unwrap(), &pc).unwrap();
                    assert_eq!(to_vertex_tuple(&up).unwrap(), d);
                    assert!(rho(&d).unwrap().is_zero());
                }
                for e in edge_layer(&pc, k) {
                    let l = iota_lower(&gamma(&e).unwrap()).unwrap();
                    if k == 0 {
                        assert!(l.is_zero());
                    }
                    assert!(iota_upper(&l, &pc).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn cap_with_multiplicities() {
        let pc = Arc::new(fixtures::f2());
        let g = AffinePP::global(&pc, x1());
        assert_eq!(cap_fundamental(&g).unwrap().rep, to_vertex_tuple(&g).unwrap());
        let h = Arc::new(fixtures::half());
        let one = AffinePP::global(&h, HomogPoly::one(1));
        let c = cap_fundamental(&one).unwrap().rep;
        let vh = h.vertex_index(&[crate::qlinalg::ratq(1, 2)]).unwrap();
        assert_eq!(c.entry(vh), &PPFunction::one(&h.charts()[vh].fan).scale(&rat(2)));
        assert!(cap_fundamental(&AffinePP::zero(&h, 1)).unwrap().rep.is_zero());
    }

    #[test]
    fn homology_classes() {
        let pc = Arc::new(fixtures::f2());
        let v0 = VertexTuple::vertex_class(&pc, 0);
        let v1 = VertexTuple::vertex_class(&pc, 1);
        assert!(!in_gamma_image(&v0).unwrap());
        assert!(!in_gamma_image(&v1).unwrap());
        assert!(!class_equal(&v0, &v1).unwrap());
        assert_eq!(homology_presentation(&pc, 0).unwrap().dim, 2);
        for e in edge_layer(&pc, 0) {
            assert!(in_gamma_image(&gamma(&e).unwrap()).unwrap());
        }
        let f1 = Arc::new(fixtures::f1());
        for k in 0..3 {
            assert_eq!(homology_presentation(&f1, k).unwrap().dim, vertex_layer(&f1, k).len());
        }
    }

    #[test]
    fn ker_coker_reports() {
        let f2 = Arc::new(fixtures::f2());
        assert_eq!(ker_coker_report(&f2, 1).unwrap(), KerCokerReport { degree: 1, ker: 2, coker: 2, pp_sigma: 2 });
        assert_eq!(ker_coker_report(&f2, 0).unwrap(), KerCokerReport { degree: 0, ker: 1, coker: 1, pp_sigma: 1 });
        for pc in [fixtures::f1(), fixtures::f5(), fixtures::half(), fixtures::f3(), fixtures::f3_subdivided()] {
            let pc = Arc::new(pc);
            for k in 0..3 {
                let r = ker_coker_report(&pc, k).unwrap();
                assert!(r.consistent(), "{r:?}");
            }
        }
    }

    #[test]
    fn transfer_examples() {
        let f2 = Arc::new(fixtures::f2());
        let f5 = Arc::new(fixtures::f5());
        let m = refines(&f5, &f2).unwrap();
        let f = f2_pp(1, [HomogPoly::zero(1, 1), x1(), x1()]).unwrap();
        let pulled = pullback_special(&m, &f).unwrap();
        assert!(pulled.pieces()[cell_pos(&f5, &[-1], &[-1])].is_zero());
        assert!(pulled.pieces()[cell_pos(&f5, &[-1, 0], &[])].is_zero());
        assert_eq!(pulled.pieces()[cell_pos(&f5, &[0, 1], &[])], x1());
        assert_eq!(beta(&m, &pulled).unwrap(), f);

        let vm1 = f5.vertex_index(&rvec(&[-1])).unwrap();
        assert!(alpha(&m, &VertexTuple::vertex_class(&f5, vm1)).unwrap().is_zero());
    }

    #[test]
    fn transfers_commute_with_ddc() {
        let f1 = Arc::new(fixtures::f1());
        let f2 = Arc::new(fixtures::f2());
        let f5 = Arc::new(fixtures::f5());
        for (fine, coarse) in [(&f5, &f2), (&f2, &f1), (&f5, &f1)] {
            let m = refines(fine, coarse).unwrap();
            for k in 0..2 {
                for b in vertex_layer(coarse, k) {
                    let lhs = ddc_model(&zeta(&m, &b).unwrap()).unwrap();
                    let rhs = to_vertex_tuple(&pullback_special(&m, &from_vertex_tuple(&ddc_model(&b).unwrap()).unwrap()).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
                for b in vertex_layer(fine, k) {
                    let lhs = beta(&m, &from_vertex_tuple(&ddc_model(&b).unwrap()).unwrap()).unwrap();
                    let rhs = from_vertex_tuple(&ddc_model(&alpha(&m, &b).unwrap()).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn transfers_in_rank_two_and_with_multiplicity() {
        let pairs = [(fixtures::f3_subdivided(), fixtures::f3()), (fixtures::half(), fixtures::f1())];
        for (fine, coarse) in pairs {
            let (fine, coarse) = (Arc::new(fine), Arc::new(coarse));
            let m = refines(&fine, &coarse).unwrap();
            for k in 0..3 {
                for f in affine_basis(&coarse, k) {
                    assert_eq!(beta(&m, &pullback_special(&m, &f).unwrap()).unwrap(), f);
                }
                for b in vertex_layer(&coarse, k) {
                    let lhs = ddc_model(&zeta(&m, &b).unwrap()).unwrap();
                    let rhs = to_vertex_tuple(&pullback_special(&m, &from_vertex_tuple(&ddc_model(&b).unwrap()).unwrap()).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
                for b in vertex_layer(&fine, k) {
                    let lhs = beta(&m, &from_vertex_tuple(&ddc_model(&b).unwrap()).unwrap()).unwrap();
                    let rhs = from_vertex_tuple(&ddc_model(&alpha(&m, &b).unwrap()).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn zeta_on_f2_to_f5() {
        let f2 = Arc::new(fixtures::f2());
        let f5 = Arc::new(fixtures::f5());
        let m = refines(&f5, &f2).unwrap();
        let v0 = f2.vertex_index(&rvec(&[0])).unwrap();
        let z = zeta(&m, &VertexTuple::vertex_class(&f2, v0)).unwrap();
        let nv = f5.vertex_index(&rvec(&[-1])).unwrap();
        assert_eq!(z.entry(nv), &PPFunction::one(&f5.charts()[nv].fan));
    }

    #[test]
    fn json_round_trips() {
        let f = f2_pp(1, [HomogPoly::zero(1, 1), x1(), x1()]).unwrap();
        assert_eq!(AffinePP::from_json(f.complex(), &f.to_json()).unwrap(), f);
        let t = to_vertex_tuple(&f).unwrap();
        assert_eq!(VertexTuple::from_json(t.complex(), &t.to_json()).unwrap(), t);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn ddc_is_linear(a in proptest::collection::vec(-3i64..4, 6), b in proptest::collection::vec(-3i64..4, 6)) {
            let pc = Arc::new(fixtures::f5());
            let basis = vertex_layer(&pc, 1);
            let s = |c: &[i64]| combine(&basis, &c.iter().map(|&x| rat(x)).collect::<Vec<_>>(), &pc, 1).unwrap();
            let (ta, tb) = (s(&a), s(&b));
            let lhs = ddc_model(&ta.add(&tb).unwrap()).unwrap();
            prop_assert_eq!(lhs, ddc_model(&ta).unwrap().add(&ddc_model(&tb).unwrap()).unwrap());
        }

        #[test]
        fn gamma_projection_formula(a in proptest::collection::vec(-3i64..4, 3), c in -3i64..4) {
            let pc = Arc::new(fixtures::f5());
            let basis = affine_basis(&pc, 1);
            let mut f = AffinePP::zero(&pc, 1);
            for (b, x) in basis.iter().zip(&a) {
                f = f.add(&b.scale(&rat(*x))).unwrap();
            }
            let e = EdgeTuple::edge_class(&pc, 0);
            let lhs = gamma(&rho(&to_vertex_tuple(&f).unwrap()).unwrap()).unwrap();
            prop_assert!(rho(&lhs).unwrap().is_zero());
            let ge = gamma(&e).unwrap().scale(&rat(c));
            let prod = ge.mul_affine(&f).unwrap();
            let star_f: Vec<PPFunction> = pc.edges().iter().enumerate().map(|(i, info)| {
                let v1 = info.v1;
                let ch = &pc.charts()[v1];
                let pieces = info.cells.iter().map(|&p| to_vertex_tuple(&f).unwrap().entry(v1).piece(ch.max_of_cell[&p]).clone()).collect::<Vec<_>>();
                let mut ordered = vec![HomogPoly::zero(1, 1); pieces.len()];
                for (j, p) in pieces.into_iter().enumerate() { ordered[info.star_max_of_cell[j]] = p; }
                let g = make_pp(&info.star, 1, ordered).unwrap();
                if i == 0 { g.scale(&rat(c)) } else { PPFunction::zero(&info.star, 1) }
            }).collect();
            let e2 = EdgeTuple::new(&pc, 1, star_f).unwrap();
            prop_assert_eq!(prod, gamma(&e2).unwrap());
        }
    }
}
