//! Rational polyhedral cones and fans, and strongly convex rational (SCR)
//! polyhedral complexes Π in N_R, stored through their cone c(Π) in
//! N_R x R_{>=0} with the height coordinate last.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::OnceCell;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyring::LinSubspace;
use crate::qlinalg::{
    denom_lcm, dot, fmt_rat, is_zero_vec, orthogonal_complement, primitive, rank_of, ratvec_from_json, ratvec_to_json,
    smith_normal_form, span_basis, to_int_vec, vec_sub, IntLattice, Rat, RatMat, RatVec,
};

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(","))
}

/// A facet of a cone: an inward normal in the span of the cone and the
/// indices of the extreme rays lying on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: RatVec,
    pub rays: Vec<usize>,
}

/// A pointed rational polyhedral cone with both descriptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    ambient: usize,
    rays: Vec<RatVec>,
    facets: Vec<Facet>,
    equations: Vec<RatVec>,
}

impl Cone {
    pub fn zero(ambient: usize) -> Self {
        Cone { ambient, rays: Vec::new(), facets: Vec::new(), equations: orthogonal_complement(ambient, &[]) }
    }

    /// Cone generated by the given vectors. Fails with `NonScr` if the cone
    /// contains a line.
    pub fn from_generators(ambient: usize, gens: &[RatVec]) -> Result<Cone> {
        let mut g: Vec<RatVec> = Vec::new();
        for v in gens {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch(format!("generator of length {} in dimension {ambient}", v.len())));
            }
            if is_zero_vec(v) {
                continue;
            }
            let p = primitive(v);
            if !g.contains(&p) {
                g.push(p);
            }
        }
        if g.is_empty() {
            return Ok(Cone::zero(ambient));
        }
        let equations = orthogonal_complement(ambient, &g);
        let basis = span_basis(ambient, &g);
        let r = basis.len();
        if r == 1 {
            let first = g[0].clone();
            if g.iter().any(|v| *v != first) {
                return Err(Error::NonScr(format!("cone contains the line through {}", fmt_vec(&first))));
            }
            return Ok(Cone { ambient, rays: vec![first.clone()], facets: vec![Facet { normal: first, rays: vec![] }], equations });
        }
        let mut normals: Vec<RatVec> = Vec::new();
        for subset in combinations(g.len(), r - 1) {
            let rows: Vec<RatVec> = subset.iter().map(|&i| basis.iter().map(|b| dot(&g[i], b)).collect()).collect();
            let m = RatMat::from_rows(r, &rows)?;
            let ker = m.kernel_basis();
            if ker.len() != 1 {
                continue;
            }
            let mut u: RatVec = vec![Rat::zero(); ambient];
            for (c, b) in ker[0].iter().zip(&basis) {
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui += c * bi;
                }
            }
            let vals: Vec<Rat> = g.iter().map(|v| dot(&u, v)).collect();
            let pos = vals.iter().all(|x| !x.is_negative());
            let neg = vals.iter().all(|x| !x.is_positive());
            if !(pos || neg) {
                continue;
            }
            let u = primitive(&if pos { u } else { u.iter().map(|x| -x).collect() });
            if !normals.contains(&u) {
                normals.push(u);
            }
        }
        if rank_of(ambient, &normals) != r {
            return Err(Error::NonScr(format!("cone generated by {} is not pointed", g.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(" "))));
        }
        let rays: Vec<RatVec> = g
            .into_iter()
            .filter(|v| {
                let tight: Vec<RatVec> = normals.iter().filter(|u| dot(u, v).is_zero()).cloned().collect();
                rank_of(ambient, &tight) == r - 1
            })
            .collect();
        let facets = normals
            .into_iter()
            .map(|u| {
                let on: Vec<usize> = (0..rays.len()).filter(|&i| dot(&u, &rays[i]).is_zero()).collect();
                Facet { normal: u, rays: on }
            })
            .collect();
        Ok(Cone { ambient, rays, facets, equations })
    }

    /// Cone `{x : a.x >= 0 for a in ineqs, e.x = 0 for e in eqs}`, assumed pointed.
    pub fn from_inequalities(ambient: usize, ineqs: &[RatVec], eqs: &[RatVec]) -> Result<Cone> {
        let eb = span_basis(ambient, eqs);
        if eb.len() >= ambient {
            return Ok(Cone::zero(ambient));
        }
        let k = ambient - 1 - eb.len();
        let mut found: Vec<RatVec> = Vec::new();
        for subset in combinations(ineqs.len(), k) {
            let mut rows = eb.clone();
            rows.extend(subset.iter().map(|&i| ineqs[i].clone()));
            let m = RatMat::from_rows(ambient, &rows)?;
            let ker = m.kernel_basis();
            if ker.len() != 1 {
                continue;
            }
            for d in [ker[0].clone(), ker[0].iter().map(|x| -x).collect::<RatVec>()] {
                if ineqs.iter().all(|a| !dot(a, &d).is_negative()) {
                    let p = primitive(&d);
                    if !found.contains(&p) {
                        found.push(p);
                    }
                }
            }
        }
        Cone::from_generators(ambient, &found)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[RatVec] {
        &self.rays
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[RatVec] {
        &self.equations
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.equations.len()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim()
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        self.equations.iter().all(|e| dot(e, p).is_zero()) && self.facets.iter().all(|f| !dot(&f.normal, p).is_negative())
    }

    /// Membership in the relative interior.
    pub fn relint_contains(&self, p: &[Rat]) -> bool {
        if self.rays.is_empty() {
            return is_zero_vec(p);
        }
        self.equations.iter().all(|e| dot(e, p).is_zero()) && self.facets.iter().all(|f| dot(&f.normal, p).is_positive())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone> {
        let mut ineqs: Vec<RatVec> = self.facets.iter().map(|f| f.normal.clone()).collect();
        ineqs.extend(other.facets.iter().map(|f| f.normal.clone()));
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_inequalities(self.ambient, &ineqs, &eqs)
    }

    pub fn span(&self) -> LinSubspace {
        LinSubspace::new(self.ambient, &self.rays)
    }

    /// All faces as sorted sets of ray indices, including the apex `[]` and
    /// the cone itself.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let full: Vec<usize> = (0..self.rays.len()).collect();
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        set.insert(full);
        set.insert(Vec::new());
        let mut frontier: Vec<Vec<usize>> = self.facets.iter().map(|f| f.rays.clone()).collect();
        while let Some(f) = frontier.pop() {
            if !set.insert(f.clone()) {
                continue;
            }
            for g in &self.facets {
                let meet: Vec<usize> = f.iter().copied().filter(|i| g.rays.contains(i)).collect();
                if !set.contains(&meet) {
                    frontier.push(meet);
                }
            }
        }
        set.into_iter().collect()
    }
}

/// A fan: cones stored by sorted ray-index sets over a shared primitive ray
/// list (sorted lexicographically). Maximal cones are ordered by their
/// lexicographically sorted generator lists.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<RatVec>,
    cones: Vec<Vec<usize>>,
    geom: Vec<Cone>,
    maximal: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
    regular: bool,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.cones == other.cones
    }
}
impl Eq for Fan {}

fn cone_is_unimodular(c: &Cone) -> bool {
    if !c.is_simplicial() {
        return false;
    }
    if c.rays.is_empty() {
        return true;
    }
    let ints: Option<Vec<Vec<BigInt>>> = c.rays.iter().map(|r| to_int_vec(r)).collect();
    let Some(ints) = ints else { return false };
    let a: Vec<Vec<BigInt>> = (0..c.ambient).map(|i| ints.iter().map(|r| r[i].clone()).collect()).collect();
    let snf = smith_normal_form(&a, ints.len());
    let f = snf.invariant_factors();
    f.len() == ints.len() && f.iter().all(|x| x.is_one())
}

impl Fan {
    /// Builds the fan generated by the given cones and all their faces.
    /// Intersections are not checked here; see [`Fan::check_intersections`].
    pub fn from_max_cones(dim: usize, gens: &[Vec<RatVec>]) -> Result<Fan> {
        let geoms: Vec<Cone> = gens.iter().map(|g| Cone::from_generators(dim, g)).collect::<Result<_>>()?;
        let mut rays: Vec<RatVec> = geoms.iter().flat_map(|c| c.rays.iter().cloned()).collect();
        rays.sort();
        rays.dedup();
        let ray_idx = |r: &RatVec| rays.binary_search(r).expect("ray collected above");
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &geoms {
            for f in c.faces() {
                let mut s: Vec<usize> = f.iter().map(|&i| ray_idx(&c.rays[i])).collect();
                s.sort();
                all.insert(s);
            }
        }
        if all.is_empty() {
            all.insert(Vec::new());
        }
        let mut cones: Vec<Vec<usize>> = all.into_iter().collect();
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let geom: Vec<Cone> = cones
            .iter()
            .map(|s| Cone::from_generators(dim, &s.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let is_sub = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|x| b.contains(x));
        let mut maximal: Vec<usize> = (0..cones.len()).filter(|&i| !cones.iter().any(|c| is_sub(&cones[i], c))).collect();
        maximal.sort_by(|&a, &b| cones[a].cmp(&cones[b]));
        let index = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let regular = geom.iter().all(cone_is_unimodular);
        Ok(Fan { dim, rays, cones, geom, maximal, index, regular })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[RatVec] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &RatVec {
        &self.rays[i]
    }

    pub fn ray_index(&self, v: &[Rat]) -> Option<usize> {
        if is_zero_vec(v) {
            return None;
        }
        self.rays.binary_search(&primitive(v)).ok()
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn cone_rays(&self, c: usize) -> &[usize] {
        &self.cones[c]
    }

    pub fn cone_geom(&self, c: usize) -> &Cone {
        &self.geom[c]
    }

    pub fn cone_dim(&self, c: usize) -> usize {
        self.geom[c].dim()
    }

    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        let mut s = rays.to_vec();
        s.sort();
        self.index.get(&s).copied()
    }

    /// Cone index of the cone generated by the given vectors, if it is a cone
    /// of the fan.
    pub fn find_cone(&self, gens: &[RatVec]) -> Option<usize> {
        let c = Cone::from_generators(self.dim, gens).ok()?;
        let idx: Option<Vec<usize>> = c.rays.iter().map(|r| self.ray_index(r)).collect();
        self.cone_index(&idx?)
    }

    pub fn zero_cone(&self) -> usize {
        self.index[&Vec::new()]
    }

    /// Cone indices of the maximal cones, in their canonical order.
    pub fn maximal(&self) -> &[usize] {
        &self.maximal
    }

    pub fn max_position(&self, cone: usize) -> Option<usize> {
        self.maximal.iter().position(|&m| m == cone)
    }

    pub fn is_face(&self, small: usize, big: usize) -> bool {
        self.cones[small].iter().all(|r| self.cones[big].contains(r))
    }

    /// Positions (in `maximal()`) of maximal cones containing the given cone.
    pub fn maximal_containing(&self, cone: usize) -> Vec<usize> {
        (0..self.maximal.len()).filter(|&p| self.is_face(cone, self.maximal[p])).collect()
    }

    /// Smallest cone containing both (the common face for a valid fan).
    pub fn common_face(&self, a: usize, b: usize) -> usize {
        let s: Vec<usize> = self.cones[a].iter().copied().filter(|r| self.cones[b].contains(r)).collect();
        self.cone_index(&s).unwrap_or_else(|| self.zero_cone())
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn is_pure_full(&self) -> bool {
        self.maximal.iter().all(|&m| self.geom[m].dim() == self.dim)
    }

    /// Verifies that any two maximal cones meet in a common face; returns the
    /// offending pair of maximal positions otherwise.
    pub fn check_intersections(&self) -> std::result::Result<(), (usize, usize)> {
        for (pa, &a) in self.maximal.iter().enumerate() {
            for (pb, &b) in self.maximal.iter().enumerate().skip(pa + 1) {
                let inter = self.geom[a].intersect(&self.geom[b]).map_err(|_| (pa, pb))?;
                let idx: Option<Vec<usize>> = inter.rays.iter().map(|r| self.ray_index(r)).collect();
                let Some(mut idx) = idx else { return Err((pa, pb)) };
                idx.sort();
                let common: Vec<usize> = self.cones[a].iter().copied().filter(|r| self.cones[b].contains(r)).collect();
                if idx != common || !self.index.contains_key(&common) {
                    return Err((pa, pb));
                }
            }
        }
        Ok(())
    }

    /// Facets (codimension one faces) of the full-dimensional maximal cone at
    /// position `p`, as cone indices.
    pub fn facets_of_max(&self, p: usize) -> Vec<usize> {
        let c = self.maximal[p];
        let g = &self.geom[c];
        g.facets
            .iter()
            .filter_map(|f| {
                let idx: Vec<usize> = f.rays.iter().map(|&i| self.ray_index(&g.rays[i]).expect("ray of fan")).collect();
                self.cone_index(&idx)
            })
            .collect()
    }

    /// Complete iff all maximal cones are full-dimensional and every facet is
    /// shared by exactly two of them.
    pub fn is_complete(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        if !self.is_pure_full() || self.maximal.is_empty() {
            return false;
        }
        let mut count: HashMap<usize, usize> = HashMap::new();
        for p in 0..self.maximal.len() {
            for f in self.facets_of_max(p) {
                *count.entry(f).or_default() += 1;
            }
        }
        count.values().all(|&c| c == 2)
    }

    /// Ray generators of a cone.
    pub fn cone_generators(&self, c: usize) -> Vec<RatVec> {
        self.cones[c].iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// Canonical text key identifying the fan up to equality.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self
            .maximal
            .iter()
            .map(|&m| self.cones[m].iter().map(|&i| fmt_vec(&self.rays[i])).collect::<Vec<_>>().join(""))
            .collect();
        format!("{}|{}", self.dim, parts.join(";"))
    }
}

/// For each cone of `src`, the smallest cone of `tgt` containing it; `None`
/// if some maximal cone of `src` lies in no cone of `tgt`.
pub fn fan_refinement_map(src: &Fan, tgt: &Fan) -> Option<Vec<usize>> {
    if src.dim != tgt.dim {
        return None;
    }
    let mut by_dim: Vec<usize> = (0..tgt.num_cones()).collect();
    by_dim.sort_by_key(|&c| (tgt.cone_dim(c), tgt.cones[c].len()));
    (0..src.num_cones())
        .map(|c| {
            let gens = src.cone_generators(c);
            by_dim.iter().copied().find(|&t| gens.iter().all(|g| tgt.geom[t].contains(g)))
        })
        .collect()
}

/// Checks that the full-dimensional cones of `src` mapping into each maximal
/// cone of `tgt` tile it (facet pairing inside, boundary facets once).
fn covers_cones(src: &Fan, tgt: &Fan, mu: &[usize]) -> bool {
    for &t in tgt.maximal() {
        let tg = &tgt.geom[t];
        let inside: Vec<usize> = (0..src.maximal.len()).filter(|&p| tgt.is_face(mu[src.maximal[p]], t)).collect();
        if inside.is_empty() {
            return false;
        }
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &p in &inside {
            if src.geom[src.maximal[p]].dim() != tg.dim() {
                return false;
            }
            for f in src.facets_of_max(p) {
                *count.entry(f).or_default() += 1;
            }
        }
        for (f, c) in count {
            let on_boundary = tg.facets.iter().any(|fa| src.cone_generators(f).iter().all(|g| dot(&fa.normal, g).is_zero()));
            let expect = if on_boundary { 1 } else { 2 };
            if c != expect {
                return false;
            }
        }
    }
    true
}

/// Vertex of a complex: its ray in c(Π), its coordinates and its
/// multiplicity m_v (least l with l v integral).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub ray: usize,
    pub point: RatVec,
    pub multiplicity: BigInt,
}

/// The star fan Π(v) of a complex at a vertex.
#[derive(Clone, Debug)]
pub struct VertexChart {
    pub vertex: usize,
    pub fan: Arc<Fan>,
    /// c(Π) cone index (for cones containing the vertex ray) -> chart cone.
    pub cone_of_cell: HashMap<usize, usize>,
    /// chart maximal position -> maximal position of c(Π).
    pub cell_of_max: Vec<usize>,
    /// maximal position of c(Π) -> chart maximal position.
    pub max_of_cell: HashMap<usize, usize>,
}

/// A bounded edge with endpoints in descending lexicographic order.
#[derive(Clone, Debug)]
pub struct EdgeInfo {
    pub cone: usize,
    pub v1: usize,
    pub v2: usize,
    /// ray index of the edge in the charts at v1 and v2
    pub ray_at: [usize; 2],
    /// maximal positions of c(Π) containing the edge
    pub cells: Vec<usize>,
    /// star of the edge ray in the chart at v1; maximal cones aligned with `cells`
    pub star: Arc<Fan>,
    pub star_max_of_cell: Vec<usize>,
}

/// An SCR polyhedral complex in N_R with N = Z^rank, through its cone c(Π).
#[derive(Debug)]
pub struct PolyComplex {
    rank: usize,
    fan: Arc<Fan>,
    complete: bool,
    vertices: Vec<Vertex>,
    charts: OnceCell<Vec<VertexChart>>,
    edges: OnceCell<Vec<EdgeInfo>>,
}

impl Clone for PolyComplex {
    fn clone(&self) -> Self {
        PolyComplex {
            rank: self.rank,
            fan: self.fan.clone(),
            complete: self.complete,
            vertices: self.vertices.clone(),
            charts: OnceCell::new(),
            edges: OnceCell::new(),
        }
    }
}

impl PartialEq for PolyComplex {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.fan == other.fan
    }
}
impl Eq for PolyComplex {}

/// Either a point of N_Q (ray through (p,1)) or a ray of c(Π).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarCenter {
    Point(RatVec),
    Ray(RatVec),
}

fn height(v: &[Rat]) -> &Rat {
    v.last().expect("cone over a complex has a height coordinate")
}

fn lift_point(p: &[Rat]) -> RatVec {
    let mut v = p.to_vec();
    v.push(Rat::one());
    primitive(&v)
}

fn lift_ray(r: &[Rat]) -> RatVec {
    let mut v = r.to_vec();
    v.push(Rat::zero());
    v
}

impl PolyComplex {
    /// Builds a complex from cells given by vertex coordinates and recession rays.
    pub fn from_cells(rank: usize, cells: &[(Vec<RatVec>, Vec<RatVec>)]) -> Result<PolyComplex> {
        let mut gens = Vec::new();
        for (pts, rays) in cells {
            if pts.is_empty() {
                return Err(Error::NonScr("cell without vertices".into()));
            }
            let mut g: Vec<RatVec> = pts
                .iter()
                .map(|p| if p.len() == rank { Ok(lift_point(p)) } else { Err(Error::DimensionMismatch(format!("point of length {} in rank {rank}", p.len()))) })
                .collect::<Result<_>>()?;
            for r in rays {
                if r.len() != rank {
                    return Err(Error::DimensionMismatch(format!("ray of length {} in rank {rank}", r.len())));
                }
                g.push(lift_ray(r));
            }
            gens.push(g);
        }
        Self::from_cones(rank, &gens)
    }

    /// Builds a complex from generators of cones in N_R x R_{>=0}.
    pub fn from_cones(rank: usize, gens: &[Vec<RatVec>]) -> Result<PolyComplex> {
        let geoms: Vec<Cone> = gens.iter().map(|g| Cone::from_generators(rank + 1, g)).collect::<Result<_>>()?;
        for g in &geoms {
            if g.rays.iter().any(|r| height(r).is_negative()) {
                return Err(Error::NonScr("cone reaches below height 0".into()));
            }
            if !g.rays.iter().any(|r| height(r).is_positive()) {
                return Err(Error::NonScr("cell without vertices".into()));
            }
        }
        // pairwise intersections must be common faces
        for i in 0..geoms.len() {
            for j in i + 1..geoms.len() {
                let inter = geoms[i].intersect(&geoms[j])?;
                let fa = geoms[i].faces();
                let fb = geoms[j].faces();
                let as_face = |g: &Cone, faces: &[Vec<usize>]| {
                    let idx: Option<Vec<usize>> = inter.rays.iter().map(|r| g.rays.iter().position(|x| x == r)).collect();
                    idx.map_or(false, |mut s| {
                        s.sort();
                        faces.contains(&s)
                    })
                };
                if !as_face(&geoms[i], &fa) || !as_face(&geoms[j], &fb) {
                    return Err(Error::NotAComplex(i, j));
                }
            }
        }
        let fan = Fan::from_max_cones(rank + 1, gens)?;
        let mut vertices: Vec<Vertex> = fan
            .rays
            .iter()
            .enumerate()
            .filter(|(_, r)| height(r).is_positive())
            .map(|(i, r)| {
                let h = height(r).clone();
                let point: RatVec = r[..rank].iter().map(|x| x / &h).collect();
                let multiplicity = denom_lcm(&point);
                Vertex { ray: i, point, multiplicity }
            })
            .collect();
        vertices.sort_by(|a, b| a.point.cmp(&b.point));
        let mut pc = PolyComplex { rank, fan: Arc::new(fan), complete: false, vertices, charts: OnceCell::new(), edges: OnceCell::new() };
        pc.complete = pc.compute_complete();
        Ok(pc)
    }

    /// The canonical model of a fan: c(Σ) = Σ x R_{>=0}.
    pub fn canonical(sigma: &Fan) -> Result<PolyComplex> {
        let n = sigma.dim();
        let mut top = vec![Rat::zero(); n];
        top.push(Rat::one());
        let gens: Vec<Vec<RatVec>> = sigma
            .maximal()
            .iter()
            .map(|&m| {
                let mut g: Vec<RatVec> = sigma.cone_generators(m).iter().map(|r| lift_ray(r)).collect();
                g.push(top.clone());
                g
            })
            .collect();
        Self::from_cones(n, &gens)
    }

    fn compute_complete(&self) -> bool {
        let Ok(rec) = self.recession_fan_unchecked() else { return false };
        if !rec.is_complete() {
            return false;
        }
        let f = &self.fan;
        if !f.is_pure_full() {
            return false;
        }
        let mut count: HashMap<usize, usize> = HashMap::new();
        for p in 0..f.maximal().len() {
            for facet in f.facets_of_max(p) {
                if f.cone_rays(facet).iter().any(|&r| height(f.ray(r)).is_positive()) {
                    *count.entry(facet).or_default() += 1;
                }
            }
        }
        count.values().all(|&c| c == 2)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The fan c(Π) in rank n+1.
    pub fn cone_over(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn is_regular(&self) -> bool {
        self.fan.is_regular()
    }

    pub fn key(&self) -> String {
        self.fan.key()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_index(&self, p: &[Rat]) -> Option<usize> {
        self.vertices.iter().position(|v| v.point == p)
    }

    pub fn vertex_of_ray(&self, ray: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.ray == ray)
    }

    /// Cone index of the ray of vertex `v` in c(Π).
    pub fn vertex_cone(&self, v: usize) -> usize {
        self.fan.cone_index(&[self.vertices[v].ray]).expect("vertex ray is a cone")
    }

    pub fn is_vertex_ray(&self, ray: usize) -> bool {
        height(self.fan.ray(ray)).is_positive()
    }

    /// Is the cone of c(Π) a cell (it has a vertex), rather than a recession cone?
    pub fn is_cell(&self, cone: usize) -> bool {
        self.fan.cone_rays(cone).iter().any(|&r| self.is_vertex_ray(r))
    }

    /// Vertex indices of a cell.
    pub fn cell_vertices(&self, cone: usize) -> Vec<usize> {
        self.fan.cone_rays(cone).iter().filter_map(|&r| self.vertex_of_ray(r)).collect()
    }

    /// Recession rays of a cell, in N.
    pub fn cell_recession_rays(&self, cone: usize) -> Vec<RatVec> {
        self.fan
            .cone_rays(cone)
            .iter()
            .filter(|&&r| !self.is_vertex_ray(r))
            .map(|&r| self.fan.ray(r)[..self.rank].to_vec())
            .collect()
    }

    /// Direction space of the affine hull of a cell.
    pub fn direction_space(&self, cone: usize) -> LinSubspace {
        let vs = self.cell_vertices(cone);
        let mut gens = self.cell_recession_rays(cone);
        if let Some(&v0) = vs.first() {
            for &v in &vs[1..] {
                gens.push(vec_sub(&self.vertices[v].point, &self.vertices[v0].point));
            }
        }
        LinSubspace::new(self.rank, &gens)
    }

    /// Dimension of a cell (one less than the dimension of its cone).
    pub fn cell_dim(&self, cone: usize) -> usize {
        self.fan.cone_dim(cone) - 1
    }

    /// Maximal cells, as cone indices of c(Π).
    pub fn maximal_cells(&self) -> &[usize] {
        self.fan.maximal()
    }

    fn recession_fan_unchecked(&self) -> Result<Fan> {
        let f = &self.fan;
        let rec: Vec<usize> = (0..f.num_cones()).filter(|&c| !self.is_cell(c)).collect();
        let maxrec: Vec<Vec<RatVec>> = rec
            .iter()
            .filter(|&&c| !rec.iter().any(|&d| d != c && f.cone_rays(c).len() < f.cone_rays(d).len() && f.is_face(c, d)))
            .map(|&c| f.cone_generators(c).iter().map(|r| r[..self.rank].to_vec()).collect())
            .collect();
        Fan::from_max_cones(self.rank, &maxrec)
    }

    /// The recession fan rec(Π), read in N_R.
    pub fn recession_fan(&self) -> Result<Fan> {
        if !self.complete {
            return Err(Error::IncompleteInput);
        }
        self.recession_fan_unchecked()
    }

    /// The cone of c(Π) corresponding to a cone of rec(Π) given by rays in N.
    pub fn recession_cone_index(&self, rays: &[RatVec]) -> Option<usize> {
        let lifted: Vec<RatVec> = rays.iter().map(|r| lift_ray(r)).collect();
        let c = self.fan.find_cone(&lifted)?;
        if self.is_cell(c) {
            None
        } else {
            Some(c)
        }
    }

    pub fn charts(&self) -> &[VertexChart] {
        self.charts.get_or_init(|| (0..self.vertices.len()).map(|v| self.build_chart(v).expect("chart of a validated complex")).collect())
    }

    fn chart_image(&self, v: usize, r: &[Rat]) -> RatVec {
        let p = &self.vertices[v].point;
        let h = height(r);
        r[..self.rank].iter().zip(p).map(|(a, pv)| a - h * pv).collect()
    }

    fn build_chart(&self, v: usize) -> Result<VertexChart> {
        let f = &self.fan;
        let vr = self.vertices[v].ray;
        let images = |c: usize| -> Vec<RatVec> {
            f.cone_rays(c).iter().filter(|&&r| r != vr).map(|&r| self.chart_image(v, f.ray(r))).collect()
        };
        let containing: Vec<usize> = (0..f.num_cones()).filter(|&c| f.cone_rays(c).contains(&vr)).collect();
        let maxpos: Vec<usize> = (0..f.maximal().len()).filter(|&p| f.cone_rays(f.maximal()[p]).contains(&vr)).collect();
        let gens: Vec<Vec<RatVec>> = maxpos.iter().map(|&p| images(f.maximal()[p])).collect();
        let chart = Fan::from_max_cones(self.rank, &gens)?;
        let mut cone_of_cell = HashMap::new();
        for &c in &containing {
            let idx = chart.find_cone(&images(c)).ok_or_else(|| Error::Internal(format!("cell {c} has no image in the chart at vertex {v}")))?;
            cone_of_cell.insert(c, idx);
        }
        let mut cell_of_max = vec![usize::MAX; chart.maximal().len()];
        let mut max_of_cell = HashMap::new();
        for &p in &maxpos {
            let cc = cone_of_cell[&f.maximal()[p]];
            let cp = chart.max_position(cc).ok_or_else(|| Error::Internal("maximal cell not maximal in chart".into()))?;
            cell_of_max[cp] = p;
            max_of_cell.insert(p, cp);
        }
        Ok(VertexChart { vertex: v, fan: Arc::new(chart), cone_of_cell, cell_of_max, max_of_cell })
    }

    /// The star fan Π(v) and the multiplicity m_v.
    pub fn vertex_chart(&self, point: &[Rat]) -> Result<(&VertexChart, BigInt)> {
        let v = self.vertex_index(point).ok_or_else(|| Error::NotAVertex(fmt_vec(point)))?;
        Ok((&self.charts()[v], self.vertices[v].multiplicity.clone()))
    }

    /// Bounded edges, sorted by cone index.
    pub fn edges(&self) -> &[EdgeInfo] {
        self.edges.get_or_init(|| {
            let f = &self.fan;
            (0..f.num_cones())
                .filter(|&c| f.cone_rays(c).len() == 2 && f.cone_rays(c).iter().all(|&r| self.is_vertex_ray(r)))
                .map(|c| self.build_edge(c).expect("edge of a validated complex"))
                .collect()
        })
    }

    fn build_edge(&self, c: usize) -> Result<EdgeInfo> {
        let f = &self.fan;
        let mut vs = self.cell_vertices(c);
        vs.sort_by(|a, b| self.vertices[*b].point.cmp(&self.vertices[*a].point));
        let (v1, v2) = (vs[0], vs[1]);
        let charts = self.charts();
        let ray_in = |v: usize, w: usize| -> Result<usize> {
            let d = vec_sub(&self.vertices[w].point, &self.vertices[v].point);
            charts[v].fan.ray_index(&d).ok_or_else(|| Error::Internal("edge direction is not a chart ray".into()))
        };
        let ray_at = [ray_in(v1, v2)?, ray_in(v2, v1)?];
        let cells: Vec<usize> = f.maximal_containing(c);
        let ch = &charts[v1];
        let gens: Vec<Vec<RatVec>> = cells.iter().map(|&p| ch.fan.cone_generators(ch.fan.maximal()[ch.max_of_cell[&p]])).collect();
        let star = Fan::from_max_cones(self.rank, &gens)?;
        let star_max_of_cell = gens
            .iter()
            .map(|g| star.find_cone(g).and_then(|ci| star.max_position(ci)).ok_or_else(|| Error::Internal("star cone".into())))
            .collect::<Result<_>>()?;
        Ok(EdgeInfo { cone: c, v1, v2, ray_at, cells, star: Arc::new(star), star_max_of_cell })
    }

    /// Edge data for the bounded edge with the given cone index.
    pub fn edge_data(&self, cone: usize) -> Result<&EdgeInfo> {
        self.edges().iter().find(|e| e.cone == cone).ok_or(Error::UnboundedEdge(cone))
    }

    /// Edge data for the segment between two vertices given by coordinates.
    pub fn edge_between(&self, a: &[Rat], b: &[Rat]) -> Result<&EdgeInfo> {
        let va = self.vertex_index(a).ok_or_else(|| Error::NotAVertex(fmt_vec(a)))?;
        let vb = self.vertex_index(b).ok_or_else(|| Error::NotAVertex(fmt_vec(b)))?;
        self.edges()
            .iter()
            .find(|e| (e.v1 == va && e.v2 == vb) || (e.v1 == vb && e.v2 == va))
            .ok_or(Error::UnboundedEdge(usize::MAX))
    }

    /// The complex Π(σ) in N(σ)_R for a cone σ of rec(Π).
    pub fn horizontal_star(&self, sigma: &[RatVec]) -> Result<PolyComplex> {
        let c = self.recession_cone_index(sigma).ok_or_else(|| Error::NotARecessionCone(sigma.iter().map(|r| fmt_vec(r)).collect::<Vec<_>>().join(" ")))?;
        let f = &self.fan;
        let basis: Vec<Vec<BigInt>> = f
            .cone_generators(c)
            .iter()
            .map(|r| to_int_vec(&r[..self.rank]).expect("primitive rays are integral"))
            .collect();
        let q = IntLattice::with_basis(self.rank, basis)?.quotient_map();
        let project = |r: &RatVec| -> RatVec {
            let mut out: RatVec = q.iter().map(|row| row.iter().zip(&r[..self.rank]).fold(Rat::zero(), |acc, (a, b)| acc + Rat::from_integer(a.clone()) * b)).collect();
            out.push(height(r).clone());
            out
        };
        let gens: Vec<Vec<RatVec>> = f
            .maximal_containing(c)
            .iter()
            .map(|&p| f.cone_generators(f.maximal()[p]).iter().map(project).filter(|v| !is_zero_vec(v)).collect())
            .collect();
        PolyComplex::from_cones(q.len(), &gens)
    }

    /// Stellar subdivision of c(Π) at the given center.
    pub fn star_subdivision(&self, center: &StarCenter) -> Result<PolyComplex> {
        let r = match center {
            StarCenter::Point(p) => {
                if p.len() != self.rank {
                    return Err(Error::DimensionMismatch("subdivision point has wrong length".into()));
                }
                lift_point(p)
            }
            StarCenter::Ray(r) => {
                if r.len() != self.rank + 1 || is_zero_vec(r) {
                    return Err(Error::DimensionMismatch("subdivision ray has wrong length".into()));
                }
                primitive(r)
            }
        };
        let f = &self.fan;
        if !f.maximal().iter().any(|&m| f.cone_geom(m).contains(&r)) {
            return Err(Error::PointOutsideSupport(fmt_vec(&r)));
        }
        if f.ray_index(&r).is_some() {
            return Ok(self.clone());
        }
        let mut gens: Vec<Vec<RatVec>> = Vec::new();
        for &m in f.maximal() {
            let g = f.cone_geom(m);
            if !g.contains(&r) {
                gens.push(f.cone_generators(m));
                continue;
            }
            for facet in g.facets() {
                if dot(&facet.normal, &r).is_positive() {
                    let mut cg: Vec<RatVec> = facet.rays.iter().map(|&i| g.rays()[i].clone()).collect();
                    cg.push(r.clone());
                    gens.push(cg);
                }
            }
        }
        PolyComplex::from_cones(self.rank, &gens)
    }

    /// Cell-wise intersection of two complexes with the same recession fan.
    pub fn common_refinement(&self, other: &PolyComplex) -> Result<PolyComplex> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch("complexes of different rank".into()));
        }
        if self == other {
            return Ok(self.clone());
        }
        if self.recession_fan_unchecked()? != other.recession_fan_unchecked()? {
            return Err(Error::RecessionMismatch);
        }
        let (fa, fb) = (&self.fan, &other.fan);
        let mut gens = Vec::new();
        for &a in fa.maximal() {
            for &b in fb.maximal() {
                let inter = fa.cone_geom(a).intersect(fb.cone_geom(b))?;
                if inter.dim() == self.rank + 1 {
                    gens.push(inter.rays().to_vec());
                }
            }
        }
        PolyComplex::from_cones(self.rank, &gens)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<serde_json::Value> = self.vertices.iter().map(|v| ratvec_to_json(&v.point)).collect();
        let cells: Vec<serde_json::Value> = self
            .maximal_cells()
            .iter()
            .map(|&c| {
                let vs = self.cell_vertices(c);
                let rays: Vec<serde_json::Value> = self.cell_recession_rays(c).iter().map(|r| ratvec_to_json(r)).collect();
                serde_json::json!({ "vertices": vs, "rays": rays })
            })
            .collect();
        serde_json::json!({ "rank": self.rank, "points": points, "cells": cells })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PolyComplex> {
        let rank = v.get("rank").and_then(|r| r.as_u64()).ok_or_else(|| Error::Parse("complex needs \"rank\"".into()))? as usize;
        let points: Vec<RatVec> = v
            .get("points")
            .and_then(|p| p.as_array())
            .ok_or_else(|| Error::Parse("complex needs \"points\"".into()))?
            .iter()
            .map(ratvec_from_json)
            .collect::<Result<_>>()?;
        let cells_json = v.get("cells").and_then(|c| c.as_array()).ok_or_else(|| Error::Parse("complex needs \"cells\"".into()))?;
        let mut cells = Vec::new();
        for c in cells_json {
            let vs: Vec<RatVec> = c
                .get("vertices")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Parse("cell needs \"vertices\"".into()))?
                .iter()
                .map(|i| {
                    let i = i.as_u64().ok_or_else(|| Error::Parse("vertex index must be an integer".into()))? as usize;
                    points.get(i).cloned().ok_or_else(|| Error::Parse(format!("vertex index {i} out of range")))
                })
                .collect::<Result<_>>()?;
            let rays: Vec<RatVec> = match c.get("rays") {
                Some(r) => r.as_array().ok_or_else(|| Error::Parse("\"rays\" must be an array".into()))?.iter().map(ratvec_from_json).collect::<Result<_>>()?,
                None => Vec::new(),
            };
            cells.push((vs, rays));
        }
        PolyComplex::from_cells(rank, &cells)
    }
}

/// A refinement Π' >= Π: each cone of c(Π') is sent to the smallest cone of
/// c(Π) containing it.
#[derive(Clone, Debug)]
pub struct ModelMap {
    pub source: Arc<PolyComplex>,
    pub target: Arc<PolyComplex>,
    pub mu: Vec<usize>,
}

impl ModelMap {
    /// Maximal position in the target of the maximal cone containing the
    /// image of the source maximal cone at position `p`.
    pub fn max_image(&self, p: usize) -> usize {
        let sf = self.source.cone_over();
        let tf = self.target.cone_over();
        let c = self.mu[sf.maximal()[p]];
        tf.maximal_containing(c)[0]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }
}

/// The refinement map if Π' refines Π with the same support.
pub fn refines(fine: &Arc<PolyComplex>, coarse: &Arc<PolyComplex>) -> Option<ModelMap> {
    if fine.rank != coarse.rank {
        return None;
    }
    let mu = fan_refinement_map(&fine.fan, &coarse.fan)?;
    let supports_agree = (fine.complete && coarse.complete) || covers_cones(&fine.fan, &coarse.fan, &mu);
    if !supports_agree {
        return None;
    }
    Some(ModelMap { source: fine.clone(), target: coarse.clone(), mu })
}

/// Looks up a lattice point enumeration for refinement chains: points of
/// Z^n ordered by sup-norm, then descending lexicographically.
pub fn lattice_points_by_norm(n: usize, max_norm: i64) -> Vec<RatVec> {
    let mut pts: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        pts = pts.into_iter().flat_map(|p| (-max_norm..=max_norm).map(move |x| {
            let mut q = p.clone();
            q.push(x);
            q
        })).collect();
    }
    pts.sort_by(|a, b| {
        let na = a.iter().map(|x| x.abs()).max().unwrap_or(0);
        let nb = b.iter().map(|x| x.abs()).max().unwrap_or(0);
        na.cmp(&nb).then(b.cmp(a))
    });
    pts.into_iter().map(|p| p.into_iter().map(|x| Rat::from_integer(BigInt::from(x))).collect()).collect()
}

/// Refinement chain of length `depth` starting at `base`: each step is a
/// stellar subdivision at the first lattice point (by sup-norm, then
/// descending lexicographic order) that is not yet a vertex and keeps the
/// model regular.
pub fn standard_chain(base: &Arc<PolyComplex>, depth: usize) -> Result<Vec<Arc<PolyComplex>>> {
    let mut out = vec![base.clone()];
    let pts = lattice_points_by_norm(base.rank, 4);
    while out.len() < depth {
        let cur = out.last().expect("nonempty").clone();
        let next = pts.iter().find_map(|p| {
            if cur.vertex_index(p).is_some() {
                return None;
            }
            let sub = cur.star_subdivision(&StarCenter::Point(p.clone())).ok()?;
            sub.is_regular().then_some(sub)
        });
        match next {
            Some(s) => out.push(Arc::new(s)),
            None => return Err(Error::Internal("no lattice point left for refinement".into())),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::qlinalg::{ratq, rvec};

    #[test]
    fn cone_descriptions() {
        let c = Cone::from_generators(2, &[rvec(&[1, 0]), rvec(&[1, 1]), rvec(&[0, 1])]).unwrap();
        assert_eq!(c.rays().len(), 2);
        assert_eq!(c.facets().len(), 2);
        assert!(c.contains(&rvec(&[2, 1])));
        assert!(!c.contains(&rvec(&[-1, 1])));
        assert_eq!(c.faces().len(), 4);
        assert!(Cone::from_generators(1, &[rvec(&[1]), rvec(&[-1])]).is_err());
        assert!(Cone::from_generators(2, &[rvec(&[1, 0]), rvec(&[-1, 0]), rvec(&[0, 1])]).is_err());
    }

    #[test]
    fn cone_intersection() {
        let a = Cone::from_generators(2, &[rvec(&[0, 1]), rvec(&[1, 1])]).unwrap();
        let b = Cone::from_generators(2, &[rvec(&[1, 2]), rvec(&[2, 1])]).unwrap();
        let i = a.intersect(&b).unwrap();
        let mut rays = i.rays().to_vec();
        rays.sort();
        assert_eq!(rays, vec![rvec(&[1, 1]), rvec(&[1, 2])]);
    }

    #[test]
    fn overlapping_cells_are_rejected() {
        let cells = vec![(vec![rvec(&[0]), rvec(&[1])], vec![]), (vec![vec![ratq(1, 2)], rvec(&[2])], vec![])];
        assert!(matches!(PolyComplex::from_cells(1, &cells), Err(Error::NotAComplex(0, 1))));
    }

    #[test]
    fn f2_cone_over() {
        let f2 = fixtures::f2();
        let fan = f2.cone_over();
        let mut maxes: Vec<Vec<RatVec>> = fan.maximal().iter().map(|&m| fan.cone_generators(m)).collect();
        maxes.sort();
        let mut expect = vec![
            vec![rvec(&[0, 1]), rvec(&[1, 1])],
            vec![rvec(&[1, 0]), rvec(&[1, 1])],
            vec![rvec(&[-1, 0]), rvec(&[0, 1])],
        ];
        expect.sort();
        assert_eq!(maxes, expect);
        assert!(f2.is_complete());
        assert!(fan.is_regular());
    }

    #[test]
    fn vertex_charts_of_f2() {
        let f2 = fixtures::f2();
        let (ch0, m0) = f2.vertex_chart(&rvec(&[0])).unwrap();
        assert_eq!(m0, BigInt::one());
        assert!(ch0.fan.is_complete());
        let (ch1, _) = f2.vertex_chart(&rvec(&[1])).unwrap();
        // the cell [0,1] maps to R_{<=0} at v = 1
        let seg = f2.cone_over().find_cone(&[rvec(&[0, 1]), rvec(&[1, 1])]).unwrap();
        let img = ch1.cone_of_cell[&seg];
        assert_eq!(ch1.fan.cone_generators(img), vec![rvec(&[-1])]);
        assert!(f2.vertex_chart(&rvec(&[2])).is_err());
    }

    #[test]
    fn half_vertex_multiplicity() {
        let h = fixtures::half();
        let (_, m) = h.vertex_chart(&[ratq(1, 2)]).unwrap();
        assert_eq!(m, BigInt::from(2));
    }

    #[test]
    fn edges_are_ordered_descending() {
        let f2 = fixtures::f2();
        let e = &f2.edges()[0];
        assert_eq!(f2.vertices()[e.v1].point, rvec(&[1]));
        assert_eq!(f2.vertices()[e.v2].point, rvec(&[0]));
        let f5 = fixtures::f5();
        let e = f5.edge_between(&rvec(&[-1]), &rvec(&[0])).unwrap();
        assert_eq!(f5.vertices()[e.v1].point, rvec(&[0]));
        let f1 = fixtures::f1();
        assert!(f1.edges().is_empty());
        assert!(matches!(f1.edge_data(0), Err(Error::UnboundedEdge(0))));
    }

    #[test]
    fn recession_and_refinement() {
        let f1 = Arc::new(fixtures::f1());
        let f2 = Arc::new(fixtures::f2());
        let f5 = Arc::new(fixtures::f5());
        let rec = f2.recession_fan().unwrap();
        assert_eq!(rec, f1.recession_fan().unwrap());
        assert_eq!(f5.recession_fan().unwrap(), rec);
        assert!(refines(&f5, &f2).is_some());
        assert!(refines(&f2, &f5).is_none());
        assert!(refines(&f2, &f2).unwrap().is_identity());
        assert!(refines(&f2, &f1).is_some());
    }

    #[test]
    fn subdivisions() {
        let f1 = fixtures::f1();
        assert_eq!(f1.star_subdivision(&StarCenter::Point(rvec(&[1]))).unwrap(), fixtures::f2());
        let f2 = fixtures::f2();
        assert_eq!(f2.star_subdivision(&StarCenter::Point(rvec(&[-1]))).unwrap(), fixtures::f5());
        assert_eq!(f2.star_subdivision(&StarCenter::Point(rvec(&[0]))).unwrap(), f2);
        assert_eq!(f2.common_refinement(&fixtures::f5()).unwrap(), fixtures::f5());
        let shifted = PolyComplex::from_cells(
            1,
            &[
                (vec![vec![ratq(1, 2)]], vec![rvec(&[-1])]),
                (vec![vec![ratq(1, 2)], vec![ratq(3, 2)]], vec![]),
                (vec![vec![ratq(3, 2)]], vec![rvec(&[1])]),
            ],
        )
        .unwrap();
        let cr = f2.common_refinement(&shifted).unwrap();
        let pts: Vec<RatVec> = cr.vertices().iter().map(|v| v.point.clone()).collect();
        assert_eq!(pts, vec![rvec(&[0]), vec![ratq(1, 2)], rvec(&[1]), vec![ratq(3, 2)]]);
    }

    #[test]
    fn horizontal_stars() {
        let f2 = fixtures::f2();
        assert_eq!(f2.horizontal_star(&[]).unwrap(), f2);
        let pt = f2.horizontal_star(&[rvec(&[1])]).unwrap();
        assert_eq!(pt.rank(), 0);
        assert_eq!(pt.vertices().len(), 1);
        let f3 = fixtures::f3();
        let s = f3.horizontal_star(&[rvec(&[1, 0])]).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.is_complete());
        assert!(f2.horizontal_star(&[rvec(&[2])]).is_ok());
        assert!(matches!(f2.horizontal_star(&[rvec(&[1]), rvec(&[-1])]), Err(_)));
    }

    #[test]
    fn regularity_examples() {
        let bad = Fan::from_max_cones(2, &[vec![rvec(&[1, 0]), rvec(&[1, 2])]]).unwrap();
        assert!(!bad.is_regular());
        assert!(fixtures::f1().cone_over().is_regular());
        assert!(fixtures::f3_subdivided().is_regular());
    }

    #[test]
    fn standard_chain_of_p1() {
        let f1 = Arc::new(fixtures::f1());
        let chain = standard_chain(&f1, 3).unwrap();
        assert_eq!(*chain[1], fixtures::f2());
        assert_eq!(*chain[2], fixtures::f5());
    }
}
