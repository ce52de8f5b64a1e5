//! Z-modules admitting Verma flags, stored as lattices of vertex-indexed
//! polynomial vectors with componentwise action of the structure algebra.

use std::collections::{HashMap, HashSet};
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::momentgraph::{
    c_element, default_separating, sections_slice, EdgeSpace, GSheaf, MomentGraph, SectionFrame,
};
use crate::polylin::graded::slice_solve::kernel as slice_solve_kernel;
use crate::polylin::graded::{dim_s, free_slice, monomials, times_linear};
use crate::polylin::{linalg, GradedBasis, GradedSpace, HomVec, Mono, Poly, SVec, Span};
use crate::rat::Rat;

/// Polynomial matrix, `m[row][col]`.
pub type PMat = Vec<Vec<Poly>>;

pub fn pmat_zero(n: usize, rows: usize, cols: usize) -> PMat {
    vec![vec![Poly::zero(n); cols]; rows]
}

pub fn pmat_identity(n: usize, k: usize) -> PMat {
    let mut m = pmat_zero(n, k, k);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Poly::one(n);
    }
    m
}

pub fn pmat_mul(n: usize, a: &PMat, b: &PMat) -> PMat {
    let rows = a.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    let mut out = pmat_zero(n, rows, cols);
    for i in 0..rows {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !bk[j].is_zero() {
                    out[i][j] = out[i][j].add(&a[i][k].mul(&bk[j]));
                }
            }
        }
    }
    out
}

pub fn pmat_scale(a: &PMat, p: &Poly) -> PMat {
    a.iter()
        .map(|r| r.iter().map(|x| x.mul(p)).collect())
        .collect()
}

/// Fiber coordinates: for every vertex, the shifts of its generic-fiber coordinates.
#[derive(Debug)]
pub struct Frame {
    pub nvars: usize,
    pub fibers: Vec<Vec<i32>>,
    pub offsets: Vec<usize>,
    pub space: GradedSpace,
}

impl Frame {
    pub fn new(nvars: usize, fibers: Vec<Vec<i32>>) -> Frame {
        let mut offsets = Vec::with_capacity(fibers.len() + 1);
        let mut shifts = Vec::new();
        for f in &fibers {
            offsets.push(shifts.len());
            shifts.extend_from_slice(f);
        }
        offsets.push(shifts.len());
        Frame {
            nvars,
            fibers,
            offsets,
            space: GradedSpace::new(nvars, shifts),
        }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block(&self, w: usize) -> Range<usize> {
        self.offsets[w]..self.offsets[w + 1]
    }

    pub fn rank(&self, w: usize) -> usize {
        self.fibers[w].len()
    }
}

/// A graded free `S`-lattice inside `⊕_w (generic fiber at w)`, closed under `Z`.
#[derive(Debug)]
pub struct SectionModule {
    pub frame: Arc<Frame>,
    pub basis: GradedBasis,
    pub tag: String,
    slices: Mutex<HashMap<i32, Arc<(Span, Vec<(usize, Mono)>)>>>,
    z_gens: OnceLock<Vec<usize>>,
}

impl Clone for SectionModule {
    fn clone(&self) -> Self {
        SectionModule::new(self.frame.clone(), self.basis.gens.clone(), &self.tag)
    }
}

impl SectionModule {
    pub fn new(frame: Arc<Frame>, gens: Vec<HomVec>, tag: &str) -> SectionModule {
        SectionModule {
            frame,
            basis: GradedBasis { gens },
            tag: tag.to_string(),
            slices: Mutex::new(HashMap::new()),
            z_gens: OnceLock::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.frame.nvars
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn gens(&self) -> &[HomVec] {
        &self.basis.gens
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis.gens[i].degree
    }

    pub fn fiber_rank(&self, w: usize) -> usize {
        self.frame.rank(w)
    }

    pub fn fiber_ranks(&self) -> Vec<usize> {
        (0..self.frame.fibers.len())
            .map(|w| self.frame.rank(w))
            .collect()
    }

    pub fn max_fiber(&self) -> usize {
        self.fiber_ranks().into_iter().max().unwrap_or(0)
    }

    /// Predicted slice dimension from the generator degrees.
    pub fn hilbert(&self, d: i32) -> usize {
        self.basis.free_dim(self.nvars(), d)
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.basis.gens.iter().map(|g| g.degree).min()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.basis.gens.iter().map(|g| g.degree).max()
    }

    /// Tracking span of the degree-`d` slice (monomial multiples of generators).
    pub fn slice(&self, d: i32) -> Arc<(Span, Vec<(usize, Mono)>)> {
        if let Some(s) = self.slices.lock().unwrap().get(&d) {
            return s.clone();
        }
        let s = Arc::new(free_slice(&self.frame.space, &self.basis, d, true));
        self.slices.lock().unwrap().insert(d, s.clone());
        s
    }

    pub fn slice_rows(&self, d: i32) -> Vec<SVec> {
        self.slice(d).0.rows().to_vec()
    }

    /// `S`-coordinates of a degree-`d` element, or `None` if it lies outside the lattice.
    pub fn express(&self, v: &[Poly], d: i32) -> Option<Vec<Poly>> {
        let n = self.nvars();
        let flat = self.frame.space.layout(d).flatten(v).ok()?;
        let sl = self.slice(d);
        let c = sl.0.coords(&flat)?;
        let mut terms: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); self.rank()];
        for (idx, x) in c {
            let (g, m) = sl.1[idx];
            terms[g].push((m, x));
        }
        Some(terms.into_iter().map(|t| Poly::from_terms(n, t)).collect())
    }

    pub fn contains(&self, v: &[Poly], d: i32) -> bool {
        match self.frame.space.layout(d).flatten(v) {
            Ok(f) => self.slice(d).0.contains(&f),
            Err(_) => false,
        }
    }

    /// `Σ_i c_i m_i` in fiber coordinates.
    pub fn combine(&self, c: &[Poly]) -> Vec<Poly> {
        let n = self.nvars();
        let mut out = vec![Poly::zero(n); self.frame.len()];
        for (ci, g) in c.iter().zip(&self.basis.gens) {
            if ci.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(&g.coords) {
                if !x.is_zero() {
                    *o = o.add(&ci.mul(x));
                }
            }
        }
        out
    }

    /// Componentwise action of a vertex tuple `z`.
    pub fn zmul(&self, z: &[Poly], v: &[Poly]) -> Vec<Poly> {
        let mut out = v.to_vec();
        for (w, zw) in z.iter().enumerate() {
            for k in self.frame.block(w) {
                out[k] = out[k].mul(zw);
            }
        }
        out
    }

    /// Matrix of `z·` on the `S`-basis; fails if `z·m` leaves the lattice.
    pub fn action_matrix(&self, z: &[Poly], zdeg: i32) -> Result<PMat> {
        let n = self.nvars();
        let mut m = pmat_zero(n, self.rank(), self.rank());
        for (i, g) in self.basis.gens.iter().enumerate() {
            let img = self.zmul(z, &g.coords);
            let c = self
                .express(&img, g.degree + zdeg)
                .ok_or(crate::polylin::PolyError::NotClosedUnderAction)?;
            for (j, p) in c.into_iter().enumerate() {
                m[j][i] = p;
            }
        }
        Ok(m)
    }

    /// Degreewise independence of the generators for every degree up to `d_max`.
    pub fn is_graded_free(&self, d_max: i32) -> bool {
        let Some(lo) = self.min_degree() else {
            return true;
        };
        (lo..=d_max).all(|d| self.slice(d).0.rank() == self.hilbert(d))
    }

    /// Whether `z·m_i` stays in the lattice for every generator.
    pub fn closed_under(&self, z: &[Poly], zdeg: i32) -> bool {
        self.action_matrix(z, zdeg).is_ok()
    }

    /// Rank of the projection to fiber `w` over the rational function field.
    pub fn generic_rank(&self, w: usize) -> usize {
        // Evaluate at a point avoiding the finitely many bad hyperplanes.
        let n = self.nvars();
        let pt: Vec<Rat> = (0..n)
            .map(|i| Rat::int(7 + 13 * i as i64 * (i as i64 + 3)))
            .collect();
        let rows: Vec<SVec> = self
            .basis
            .gens
            .iter()
            .map(|g| {
                linalg::sparse(
                    &self
                        .frame
                        .block(w)
                        .map(|k| eval_at(&g.coords[k], &pt))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        linalg::rank(rows)
    }

    /// Elements of the degree-`d` slice, unflattened.
    pub fn slice_elements(&self, d: i32) -> Vec<Vec<Poly>> {
        let lay = self.frame.space.layout(d);
        self.slice(d)
            .0
            .rows()
            .iter()
            .map(|r| lay.unflatten(r))
            .collect()
    }
}

pub fn eval_at(p: &Poly, pt: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (i, x) in pt.iter().enumerate() {
            for _ in 0..m.exp(i) {
                t = &t * x;
            }
        }
        acc = &acc + &t;
    }
    acc
}

/// A homogeneous `Z`-linear map given by its matrix on the source and target `S`-bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZMap {
    pub degree: i32,
    /// `matrix[j][i]`: coefficient of target generator `j` in the image of source generator `i`.
    pub matrix: PMat,
}

impl ZMap {
    pub fn compose(&self, inner: &ZMap, nvars: usize) -> ZMap {
        ZMap {
            degree: self.degree + inner.degree,
            matrix: pmat_mul(nvars, &self.matrix, &inner.matrix),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|p| p.is_zero())
    }

    /// Image of source generator `i` in target fiber coordinates.
    pub fn apply_gen(&self, dst: &SectionModule, i: usize) -> Vec<Poly> {
        let col: Vec<Poly> = self.matrix.iter().map(|r| r[i].clone()).collect();
        dst.combine(&col)
    }
}

/// Incremental graded-Nakayama extraction with a saturation stop: once
/// `expected` generators are found, `extra` further degrees are checked
/// against the Hilbert function of the free module they span.
pub fn saturated_generators(
    space: &GradedSpace,
    start: i32,
    cap: i32,
    expected: usize,
    extra: i32,
    what: &str,
    mut slice: impl FnMut(i32) -> Result<Vec<SVec>>,
) -> Result<Vec<HomVec>> {
    let n = space.nvars;
    let mut gens: Vec<HomVec> = Vec::new();
    let mut prev: HashMap<i32, Vec<SVec>> = HashMap::new();
    let mut saturated = if expected == 0 { Some(start - 1) } else { None };
    let mut d = start;
    loop {
        match saturated {
            Some(s) if d > s + extra => break,
            None if d > cap => {
                return Err(Error::DegreeCapExhausted(format!(
                    "{what}: {} of {expected} generators by degree {cap}",
                    gens.len()
                )))
            }
            _ => {}
        }
        let basis = slice(d)?;
        let lay = space.layout(d);
        let mut sub = match prev.get(&(d - 2)) {
            Some(lo) => times_linear(&space.layout(d - 2), lo, &lay),
            None => Span::new(),
        };
        let below = sub.rank();
        for v in &basis {
            if sub.insert(v.clone()) {
                if saturated.is_some() {
                    return Err(Error::Invalid(format!(
                        "{what}: rank exceeds the expected {expected}"
                    )));
                }
                gens.push(HomVec {
                    degree: d,
                    coords: lay.unflatten(v),
                });
            }
        }
        if sub.rank() != basis.len() || below > basis.len() {
            return Err(crate::polylin::PolyError::NotClosedUnderAction.into());
        }
        if gens.len() > expected {
            return Err(Error::Invalid(format!(
                "{what}: rank exceeds the expected {expected}"
            )));
        }
        if saturated.is_none() && gens.len() == expected {
            saturated = Some(d);
        }
        if saturated.is_some() {
            let fd: usize = gens.iter().map(|g| dim_s(n, d - g.degree)).sum();
            if fd != basis.len() {
                return Err(Error::Invalid(format!(
                    "{what}: Hilbert function mismatch in degree {d}"
                )));
            }
        }
        prev.remove(&(d - 4));
        prev.insert(d, basis);
        d += 1;
    }
    Ok(gens)
}

fn identity_rho(n: usize, r: usize) -> Vec<Vec<Poly>> {
    pmat_identity(n, r)
}

/// Braden–MacPherson sheaf `𝔅̃(x)` on `graph`, supported on `{y ≤ x}`.
pub fn bmp_sheaf(graph: &MomentGraph, x: usize, margin: i32) -> Result<GSheaf> {
    let n = graph.nvars();
    let ne = graph.edges.len();
    let mut sh = GSheaf {
        nvars: n,
        stalks: vec![Vec::new(); graph.len()],
        edge_gens: vec![Vec::new(); ne],
        rho_head: vec![Vec::new(); ne],
        rho_tail: vec![Vec::new(); ne],
    };
    sh.stalks[x] = vec![0];
    let lx = graph.length(x) as i32;
    // vertex positions are sorted by (length, key), so reversing gives the extension order
    let below: Vec<usize> = (0..graph.len())
        .rev()
        .filter(|&y| y != x && graph.leq(y, x))
        .collect();
    for y in below {
        let ups: Vec<usize> = graph.up[y]
            .iter()
            .copied()
            .filter(|&e| graph.leq(graph.edges[e].tail, x))
            .collect();
        for &e in &ups {
            let t = graph.edges[e].tail;
            sh.edge_gens[e] = sh.stalks[t].clone();
            sh.rho_tail[e] = identity_rho(n, sh.stalks[t].len());
        }
        let omega: Vec<usize> = (0..graph.len())
            .filter(|&v| v != y && graph.leq(y, v) && graph.leq(v, x))
            .collect();
        let frame = SectionFrame::new(&sh, &omega);
        let coord_of: HashMap<(usize, usize), usize> = frame
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect();
        let bound = (lx - graph.length(y) as i32 - 1).max(0);
        let cap = bound + margin;
        let mut prev: HashMap<i32, Vec<SVec>> = HashMap::new();
        let mut gens: Vec<(i32, SVec)> = Vec::new();
        for d in 0..=cap {
            let es = EdgeSpace::new(graph, &sh, &ups, d);
            let sec = sections_slice(graph, &sh, &frame, d)?;
            let lay = frame.space.layout(d);
            let mut img = Span::new();
            for v in &sec.basis {
                let polys = lay.unflatten(v);
                let mut out = Vec::new();
                for &e in &ups {
                    let t = graph.edges[e].tail;
                    for j in 0..sh.stalks[t].len() {
                        es.push(graph, e, j, &polys[coord_of[&(t, j)]], &mut out)?;
                    }
                }
                img.insert(linalg::normalize(out));
            }
            let mut sub = Span::new();
            if let Some(lo) = prev.get(&(d - 2)) {
                let les = EdgeSpace::new(graph, &sh, &ups, d - 2);
                for v in lo {
                    let comps = les.unflatten(n, v);
                    for i in 0..n {
                        let mut out = Vec::new();
                        for ((e, j), p) in &comps {
                            es.push(graph, *e, *j, &p.mul_mono(Mono::var(i)), &mut out)?;
                        }
                        sub.insert(linalg::normalize(out));
                    }
                }
            }
            for r in img.rows() {
                if sub.insert(r.clone()) {
                    gens.push((d, r.clone()));
                }
            }
            prev.insert(d, img.rows().to_vec());
        }
        if let Some((d, _)) = gens.iter().find(|(d, _)| *d > bound) {
            return Err(Error::DegreeCapExhausted(format!(
                "stalk at {} of B({}) has a generator in degree {d} beyond {bound}",
                graph.name(y),
                graph.name(x)
            )));
        }
        sh.stalks[y] = gens.iter().map(|g| g.0).collect();
        for &e in &ups {
            let rt = sh.edge_gens[e].len();
            sh.rho_head[e] = vec![vec![Poly::zero(n); gens.len()]; rt];
        }
        for (g, (d, v)) in gens.iter().enumerate() {
            let es = EdgeSpace::new(graph, &sh, &ups, *d);
            for ((e, i), p) in es.unflatten(n, v) {
                sh.rho_head[e][i][g] = p;
            }
        }
    }
    Ok(sh)
}

/// `B(x) = Γ(𝔅̃(x))⟨−ℓ(x)⟩` as a section module on the full vertex set of `graph`.
pub fn sections_b(
    graph: &MomentGraph,
    sheaf: &GSheaf,
    x: usize,
    margin: i32,
) -> Result<SectionModule> {
    let all = graph.all().vertices;
    let frame = SectionFrame::new(sheaf, &all);
    let lx = graph.length(x) as i32;
    let expected: usize = sheaf.stalks.iter().map(|s| s.len()).sum();
    let what = format!("sections of B({})", graph.name(x));
    let gens = saturated_generators(
        &frame.space,
        0,
        2 * lx + margin,
        expected,
        margin,
        &what,
        |d| Ok(sections_slice(graph, sheaf, &frame, d)?.basis),
    )?;
    let fibers = sheaf
        .stalks
        .iter()
        .map(|s| s.iter().map(|g| g - lx).collect())
        .collect();
    let gens = gens
        .into_iter()
        .map(|g| HomVec {
            degree: g.degree - lx,
            coords: g.coords,
        })
        .collect();
    Ok(SectionModule::new(
        Arc::new(Frame::new(graph.nvars(), fibers)),
        gens,
        &format!("B({})", graph.name(x)),
    ))
}

/// `V(x)`: rank one at `x`, generator in degree 0.
pub fn verma_z(graph: &MomentGraph, x: usize) -> SectionModule {
    let n = graph.nvars();
    let mut fibers = vec![Vec::new(); graph.len()];
    fibers[x] = vec![0];
    SectionModule::new(
        Arc::new(Frame::new(n, fibers)),
        vec![HomVec {
            degree: 0,
            coords: vec![Poly::one(n)],
        }],
        &format!("V({})", graph.name(x)),
    )
}

/// The structure algebra `Z` as a section module.
pub fn structure_module(graph: &MomentGraph, margin: i32) -> Result<SectionModule> {
    let sh = GSheaf::structure(graph);
    let frame = SectionFrame::new(&sh, &graph.all().vertices);
    let top = (0..graph.len()).map(|v| graph.length(v)).max().unwrap_or(0) as i32;
    let gens = saturated_generators(
        &frame.space,
        0,
        2 * top + margin,
        graph.len(),
        margin,
        "Z",
        |d| Ok(sections_slice(graph, &sh, &frame, d)?.basis),
    )?;
    Ok(SectionModule::new(
        Arc::new(Frame::new(graph.nvars(), vec![vec![0]; graph.len()])),
        gens,
        "Z",
    ))
}

/// A translated module with its unit `M → FM` and counit `FM → M` (both of degree 1).
#[derive(Debug, Clone)]
pub struct Adjunction {
    pub module: SectionModule,
    pub unit: ZMap,
    pub counit: ZMap,
}

fn right_mul(graph: &MomentGraph, w: usize, s: usize) -> Result<usize> {
    graph
        .group
        .right_mul_gen(graph.element(w), s)
        .and_then(|g| graph.position(g))
        .ok_or(Error::IncompatibleVertexSet)
}

fn left_mul(graph: &MomentGraph, s: usize, w: usize) -> Result<usize> {
    graph
        .group
        .left_mul_gen(s, graph.element(w))
        .and_then(|g| graph.position(g))
        .ok_or(Error::IncompatibleVertexSet)
}

/// `θ_s^Z M = Z ⊗_{Z^s} M⟨−1⟩`, embedded by `ι(z⊗m)_w = z_w (m_w, m_{ws})`.
pub fn theta_z(graph: &MomentGraph, s: usize, m: &SectionModule) -> Result<Adjunction> {
    let n = graph.nvars();
    let nv = graph.len();
    let partner: Vec<usize> = (0..nv)
        .map(|w| right_mul(graph, w, s))
        .collect::<Result<_>>()?;
    let c = c_element(graph, s)?;
    let fibers: Vec<Vec<i32>> = (0..nv)
        .map(|w| {
            let f = &m.frame.fibers;
            f[w].iter().chain(&f[partner[w]]).map(|g| g - 1).collect()
        })
        .collect();
    let frame = Arc::new(Frame::new(n, fibers));
    let embed = |v: &[Poly], scale: Option<&Vec<Poly>>| -> Vec<Poly> {
        let mut out = Vec::with_capacity(frame.len());
        for w in 0..nv {
            for k in m.frame.block(w).chain(m.frame.block(partner[w])) {
                out.push(match scale {
                    Some(z) => v[k].mul(&z[w]),
                    None => v[k].clone(),
                });
            }
        }
        out
    };
    let mut gens = Vec::new();
    for g in m.gens() {
        gens.push(HomVec {
            degree: g.degree - 1,
            coords: embed(&g.coords, None),
        });
    }
    for g in m.gens() {
        gens.push(HomVec {
            degree: g.degree + 1,
            coords: embed(&g.coords, Some(&c)),
        });
    }
    let module = SectionModule::new(frame, gens, &format!("θ{}{}", s + 1, m.tag));
    let a = m.action_matrix(&c, 2)?;
    let (unit, counit) = unit_counit(n, &a, &pmat_identity(n, m.rank()));
    Ok(Adjunction {
        module,
        unit,
        counit,
    })
}

/// Unit `[A; B]` and counit `[I | A']` on the doubled basis.
fn unit_counit(n: usize, top: &PMat, bottom: &PMat) -> (ZMap, ZMap) {
    let r = top.len();
    let mut u = pmat_zero(n, 2 * r, r);
    let mut e = pmat_zero(n, r, 2 * r);
    for i in 0..r {
        for j in 0..r {
            u[j][i] = top[j][i].clone();
            u[r + j][i] = bottom[j][i].clone();
            e[j][r + i] = top[j][i].clone();
        }
        e[i][i] = Poly::one(n);
    }
    (
        ZMap {
            degree: 1,
            matrix: u,
        },
        ZMap {
            degree: 1,
            matrix: e,
        },
    )
}

/// `φ_s^Z M = Z ⊗_{Z^{r_s}} M`, embedded by `ι(z⊗m)_w = z_w (m_w, s(m_{sw}))`,
/// with `S`-basis `{1⊗m_i, 1⊗α_s m_i}`.
pub fn phi_z(graph: &MomentGraph, s: usize, m: &SectionModule) -> Result<Adjunction> {
    let n = graph.nvars();
    let nv = graph.len();
    let group = &graph.group;
    let partner: Vec<usize> = (0..nv)
        .map(|w| left_mul(graph, s, w))
        .collect::<Result<_>>()?;
    let sel = group.elem(group.from_word(&[s]).unwrap()).clone();
    let alpha = Poly::linear(&group.sys.alphas[s]);
    let fibers: Vec<Vec<i32>> = (0..nv)
        .map(|w| {
            let f = &m.frame.fibers;
            f[w].iter().chain(&f[partner[w]]).map(|g| g - 1).collect()
        })
        .collect();
    let frame = Arc::new(Frame::new(n, fibers));
    let embed = |v: &[Poly], times_alpha: bool| -> Result<Vec<Poly>> {
        let mut out = Vec::with_capacity(frame.len());
        for w in 0..nv {
            for k in m.frame.block(w) {
                out.push(if times_alpha {
                    v[k].mul(&alpha)
                } else {
                    v[k].clone()
                });
            }
            for k in m.frame.block(partner[w]) {
                let t = sel.act(&v[k])?;
                out.push(if times_alpha { t.mul(&alpha).neg() } else { t });
            }
        }
        Ok(out)
    };
    let mut gens = Vec::new();
    for g in m.gens() {
        gens.push(HomVec {
            degree: g.degree - 1,
            coords: embed(&g.coords, false)?,
        });
    }
    for g in m.gens() {
        gens.push(HomVec {
            degree: g.degree + 1,
            coords: embed(&g.coords, true)?,
        });
    }
    let module = SectionModule::new(frame, gens, &format!("φ{}{}", s + 1, m.tag));
    let r = m.rank();
    let a = pmat_scale(&pmat_identity(n, r), &alpha);
    let (unit, counit) = unit_counit(n, &a, &pmat_identity(n, r));
    Ok(Adjunction {
        module,
        unit,
        counit,
    })
}

/// `θ_s^Z(f) = diag(C, C)`.
pub fn theta_map(f: &ZMap, nvars: usize) -> ZMap {
    let (rn, rm) = (
        f.matrix.len(),
        f.matrix.first().map(|r| r.len()).unwrap_or(0),
    );
    let mut out = pmat_zero(nvars, 2 * rn, 2 * rm);
    for j in 0..rn {
        for i in 0..rm {
            out[j][i] = f.matrix[j][i].clone();
            out[rn + j][rm + i] = f.matrix[j][i].clone();
        }
    }
    ZMap {
        degree: f.degree,
        matrix: out,
    }
}

/// `φ_s^Z(f)`: writing each entry `p = p' + α q` with `p', q` `s`-invariant,
/// the matrix is `[[P', α²Q], [Q, P']]` on the bases `{1⊗m, 1⊗αm}`.
pub fn phi_map(graph: &MomentGraph, s: usize, f: &ZMap) -> Result<ZMap> {
    let n = graph.nvars();
    let group = &graph.group;
    let sel = group.elem(group.from_word(&[s]).unwrap()).clone();
    let a = &group.sys.alphas[s];
    let alpha = Poly::linear(a);
    let a2 = alpha.mul(&alpha);
    let half = Rat::new(1, 2);
    let (rn, rm) = (
        f.matrix.len(),
        f.matrix.first().map(|r| r.len()).unwrap_or(0),
    );
    let mut out = pmat_zero(n, 2 * rn, 2 * rm);
    for j in 0..rn {
        for i in 0..rm {
            let p = &f.matrix[j][i];
            if p.is_zero() {
                continue;
            }
            let sp = sel.act(p)?;
            let pp = p.add(&sp).scale(&half);
            let q = p.sub(&sp).scale(&half).divide_exact(a)?;
            out[j][i] = pp.clone();
            out[rn + j][rm + i] = pp;
            out[j][rm + i] = q.mul(&a2);
            out[rn + j][i] = q;
        }
    }
    Ok(ZMap {
        degree: f.degree,
        matrix: out,
    })
}

/// The involution `(m_w)_w ↦ (w(m_{w⁻¹}))_w` on fiber coordinates.
pub fn a_transform(graph: &MomentGraph, src: &Frame, dst: &Frame, v: &[Poly]) -> Result<Vec<Poly>> {
    let group = &graph.group;
    let mut out = Vec::with_capacity(dst.len());
    for w in 0..graph.len() {
        let g = graph.element(w);
        let inv = group
            .inverse(g)
            .and_then(|i| graph.position(i))
            .ok_or(Error::IncompatibleVertexSet)?;
        let el = group.elem(g);
        for k in src.block(inv) {
            out.push(el.act(&v[k])?);
        }
    }
    Ok(out)
}

/// `a_M(M)`: the same set with `Z` acting through `a`; the `S`-basis is re-extracted.
pub fn a_module(graph: &MomentGraph, m: &SectionModule, margin: i32) -> Result<SectionModule> {
    let n = graph.nvars();
    let group = &graph.group;
    let mut fibers = Vec::with_capacity(graph.len());
    for w in 0..graph.len() {
        let inv = group
            .inverse(graph.element(w))
            .and_then(|i| graph.position(i))
            .ok_or(Error::IncompatibleVertexSet)?;
        fibers.push(m.frame.fibers[inv].clone());
    }
    let frame = Arc::new(Frame::new(n, fibers));
    let (Some(lo), Some(hi)) = (m.min_degree(), m.max_degree()) else {
        return Ok(SectionModule::new(
            frame,
            Vec::new(),
            &format!("a{}", m.tag),
        ));
    };
    let top = (0..graph.len()).map(|v| graph.length(v)).max().unwrap_or(0) as i32;
    let what = format!("a_M({})", m.tag);
    let gens = saturated_generators(
        &frame.space,
        lo,
        hi + 2 * top + margin,
        m.rank(),
        margin,
        &what,
        |d| {
            let lay = frame.space.layout(d);
            let mut span = Span::new();
            for v in m.slice_elements(d) {
                span.insert(lay.flatten(&a_transform(graph, &m.frame, &frame, &v)?)?);
            }
            Ok(span.rows().to_vec())
        },
    )?;
    Ok(SectionModule::new(frame, gens, &format!("a{}", m.tag)))
}

/// How homomorphisms are parametrized.
#[derive(Debug, Clone)]
enum HomKind {
    /// By their values on the listed `Z`-generators of the source.
    Values(Vec<usize>),
    /// By the full matrix.
    Matrix,
}

/// Homogeneous basis of `Hom_Z(M, N)` as a free `S`-module.
#[derive(Debug)]
pub struct ZHomBasis {
    pub gens: Vec<ZMap>,
    pub expected_rank: usize,
    pub free: bool,
    src_rank: usize,
    dst_rank: usize,
    kind: HomKind,
    space: GradedSpace,
    values: GradedBasis,
    reducers: Mutex<HashMap<i32, Arc<(Span, Vec<(usize, Mono)>)>>>,
}

impl ZHomBasis {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.gens.iter().map(|g| g.degree).collect()
    }

    pub fn uses_values(&self) -> bool {
        matches!(self.kind, HomKind::Values(_))
    }

    fn to_values(&self, c: &PMat) -> Vec<Poly> {
        match &self.kind {
            HomKind::Values(u) => u
                .iter()
                .flat_map(|&a| (0..self.dst_rank).map(move |j| c[j][a].clone()))
                .collect(),
            HomKind::Matrix => (0..self.dst_rank)
                .flat_map(|j| (0..self.src_rank).map(move |i| c[j][i].clone()))
                .collect(),
        }
    }

    /// `S`-coordinates of a degree-`d` homomorphism against the basis.
    pub fn coords(&self, c: &PMat, d: i32) -> Option<Vec<Poly>> {
        let n = self.space.nvars;
        let sl = {
            let cached = self.reducers.lock().unwrap().get(&d).cloned();
            match cached {
                Some(s) => s,
                None => {
                    let s = Arc::new(free_slice(&self.space, &self.values, d, true));
                    self.reducers.lock().unwrap().insert(d, s.clone());
                    s
                }
            }
        };
        let flat = self.space.layout(d).flatten(&self.to_values(c)).ok()?;
        let co = sl.0.coords(&flat)?;
        let mut terms: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); self.gens.len()];
        for (idx, x) in co {
            let (g, m) = sl.1[idx];
            terms[g].push((m, x));
        }
        Some(terms.into_iter().map(|t| Poly::from_terms(n, t)).collect())
    }

    /// Image in `Hom ⊗_S ℂ`: the constant coefficients on generators of degree `d`.
    pub fn reduce(&self, c: &PMat, d: i32) -> Option<Vec<Rat>> {
        let co = self.coords(c, d)?;
        Some(co.iter().map(|p| p.coeff(Mono::ONE)).collect())
    }

    /// Multiplies generator `k` by `c`.
    pub fn rescale(&mut self, k: usize, c: &Rat) {
        let n = self.space.nvars;
        let p = Poly::constant(n, c.clone());
        self.gens[k].matrix = pmat_scale(&self.gens[k].matrix, &p);
        for x in self.values.gens[k].coords.iter_mut() {
            *x = x.scale(c);
        }
        self.reducers.lock().unwrap().clear();
    }

    /// Indices of generators in degree `d`.
    pub fn in_degree(&self, d: i32) -> Vec<usize> {
        (0..self.gens.len())
            .filter(|&k| self.gens[k].degree == d)
            .collect()
    }
}

/// Minimal `Z`-generators of `M`, as indices into its `S`-basis.
pub fn z_generators(z: &SectionModule, m: &SectionModule) -> Result<Vec<usize>> {
    if let Some(v) = m.z_gens.get() {
        return Ok(v.clone());
    }
    let n = m.nvars();
    let zpos: Vec<&HomVec> = z.gens().iter().filter(|g| g.degree > 0).collect();
    let mut degs: Vec<i32> = m.gens().iter().map(|g| g.degree).collect();
    degs.sort();
    degs.dedup();
    let mut out = Vec::new();
    for d in degs {
        let lay = m.frame.space.layout(d);
        let mut sub = Span::new();
        for v in m.slice_rows(d - 2) {
            for i in 0..n {
                sub.insert(m.frame.space.layout(d - 2).mul_mono(&v, Mono::var(i), &lay));
            }
        }
        for g in &zpos {
            for v in m.slice_elements(d - g.degree) {
                let zv: Vec<Poly> = expand_vertexwise(m, &g.coords, &v);
                sub.insert(lay.flatten(&zv)?);
            }
        }
        for (i, g) in m.gens().iter().enumerate() {
            if g.degree == d && sub.insert(lay.flatten(&g.coords)?) {
                out.push(i);
            }
        }
    }
    let _ = m.z_gens.set(out.clone());
    Ok(out)
}

fn expand_vertexwise(m: &SectionModule, z: &[Poly], v: &[Poly]) -> Vec<Poly> {
    m.zmul(z, v)
}

fn hom_range(m: &SectionModule, nmod: &SectionModule, margin: i32) -> Option<(i32, i32)> {
    let (glo, ghi) = (m.min_degree()?, m.max_degree()?);
    let (hlo, hhi) = (nmod.min_degree()?, nmod.max_degree()?);
    Some((hlo - ghi, hhi - glo + margin))
}

fn expected_hom_rank(m: &SectionModule, nmod: &SectionModule) -> usize {
    (0..m.frame.fibers.len())
        .map(|w| m.fiber_rank(w) * nmod.fiber_rank(w))
        .sum()
}

/// `Hom_Z(M, N)`: parametrized by values on `Z`-generators when every source fiber
/// has rank at most one, otherwise by the `ζ_λ`-commutation method.
pub fn hom_z(
    z: &SectionModule,
    zeta: &[Poly],
    m: &SectionModule,
    nmod: &SectionModule,
    margin: i32,
) -> Result<ZHomBasis> {
    if m.max_fiber() <= 1 {
        hom_z_values(z, m, nmod, margin)
    } else {
        hom_z_direct(zeta, m, nmod, margin)
    }
}

fn empty_hom(m: &SectionModule, nmod: &SectionModule, expected: usize) -> ZHomBasis {
    ZHomBasis {
        gens: Vec::new(),
        expected_rank: expected,
        free: true,
        src_rank: m.rank(),
        dst_rank: nmod.rank(),
        kind: HomKind::Matrix,
        space: GradedSpace::new(m.nvars(), Vec::new()),
        values: GradedBasis { gens: Vec::new() },
        reducers: Mutex::new(HashMap::new()),
    }
}

/// The direct method: `S`-matrices `C` with `C·A_M = A_N·C` for the separating `ζ_λ`.
pub fn hom_z_direct(
    zeta: &[Poly],
    m: &SectionModule,
    nmod: &SectionModule,
    margin: i32,
) -> Result<ZHomBasis> {
    let n = m.nvars();
    let expected = expected_hom_rank(m, nmod);
    let Some((start, cap)) = hom_range(m, nmod, margin) else {
        return Ok(empty_hom(m, nmod, expected));
    };
    if expected == 0 {
        return Ok(empty_hom(m, nmod, expected));
    }
    let (rm, rn) = (m.rank(), nmod.rank());
    let am = m.action_matrix(zeta, 2)?;
    let an = nmod.action_matrix(zeta, 2)?;
    let shifts: Vec<i32> = (0..rn)
        .flat_map(|j| (0..rm).map(move |i| (j, i)))
        .map(|(j, i)| nmod.degree(j) - m.degree(i))
        .collect();
    let space = GradedSpace::new(n, shifts);
    let what = format!("Hom_Z({}, {})", m.tag, nmod.tag);
    let gens = saturated_generators(&space, start, cap, expected, margin, &what, |d| {
        let lay = space.layout(d);
        let mut rows: HashMap<(usize, usize, Mono), usize> = HashMap::new();
        let mut images = Vec::with_capacity(lay.len());
        for c in 0..lay.len() {
            let (coord, mono) = lay.coordinate(c);
            let (j, k) = (coord / rm, coord % rm);
            let mut out: Vec<(usize, Rat)> = Vec::new();
            let mut push =
                |row: (usize, usize),
                 p: &Poly,
                 sign: bool,
                 rows: &mut HashMap<(usize, usize, Mono), usize>| {
                    for (mm, x) in p.terms() {
                        let key = (row.0, row.1, *mm);
                        let next = rows.len();
                        let r = *rows.entry(key).or_insert(next);
                        out.push((r, if sign { x.clone() } else { -x }));
                    }
                };
            for i in 0..rm {
                let p = am[k][i].mul_mono(mono);
                if !p.is_zero() {
                    push((j, i), &p, true, &mut rows);
                }
            }
            for jj in 0..rn {
                let p = an[jj][j].mul_mono(mono);
                if !p.is_zero() {
                    push((jj, k), &p, false, &mut rows);
                }
            }
            images.push(linalg::normalize(out));
        }
        Ok(slice_solve_kernel(&space, d, &images).basis)
    })?;
    let maps = gens
        .iter()
        .map(|g| {
            let mut c = pmat_zero(n, rn, rm);
            for j in 0..rn {
                for i in 0..rm {
                    c[j][i] = g.coords[j * rm + i].clone();
                }
            }
            ZMap {
                degree: g.degree,
                matrix: c,
            }
        })
        .collect();
    Ok(ZHomBasis {
        gens: maps,
        expected_rank: expected,
        free: true,
        src_rank: rm,
        dst_rank: rn,
        kind: HomKind::Matrix,
        space,
        values: GradedBasis { gens },
        reducers: Mutex::new(HashMap::new()),
    })
}

/// The value method for sources whose fibers have rank at most one.
pub fn hom_z_values(
    z: &SectionModule,
    m: &SectionModule,
    nmod: &SectionModule,
    margin: i32,
) -> Result<ZHomBasis> {
    let n = m.nvars();
    let expected = expected_hom_rank(m, nmod);
    let Some((start, cap)) = hom_range(m, nmod, margin) else {
        return Ok(empty_hom(m, nmod, expected));
    };
    if expected == 0 {
        return Ok(empty_hom(m, nmod, expected));
    }
    if m.max_fiber() > 1 {
        return Err(Error::Invalid(
            "value method needs source fibers of rank at most one".into(),
        ));
    }
    let u = z_generators(z, m)?;
    let (rm, rn) = (m.rank(), nmod.rank());
    let nu = u.len();
    let nvert = m.frame.fibers.len();
    let shifts: Vec<i32> = (0..nu)
        .flat_map(|a| (0..rn).map(move |j| (a, j)))
        .map(|(a, j)| nmod.degree(j) - m.degree(u[a]))
        .collect();
    let space = GradedSpace::new(n, shifts);
    // u_{a,w} for rank-one source fibers, and the chosen pivot generator per vertex
    let uval =
        |a: usize, w: usize| -> Poly { m.gens()[u[a]].coords[m.frame.block(w).start].clone() };
    let mut pivot: Vec<Option<usize>> = vec![None; nvert];
    for (w, p) in pivot.iter_mut().enumerate() {
        if m.fiber_rank(w) == 1 {
            *p = (0..nu).find(|&a| !uval(a, w).is_zero());
            if p.is_none() {
                return Err(Error::Invalid(format!(
                    "{}: Z-generators vanish on a fiber",
                    m.tag
                )));
            }
        }
    }
    let active: Vec<usize> = (0..nvert).filter(|&w| nmod.fiber_rank(w) > 0).collect();
    // prod[w][a][j][k] = n_{j,w,k} · u_{a,w} (or n_{j,w,k} when the source fiber is zero)
    let mut prod: HashMap<(usize, usize, usize, usize), Poly> = HashMap::new();
    for &w in &active {
        for j in 0..rn {
            for (k, idx) in nmod.frame.block(w).enumerate() {
                let nj = &nmod.gens()[j].coords[idx];
                if nj.is_zero() {
                    continue;
                }
                if m.fiber_rank(w) == 0 {
                    prod.insert((w, 0, j, k), nj.clone());
                } else {
                    for a in 0..nu {
                        let p = nj.mul(&uval(a, w));
                        if !p.is_zero() {
                            prod.insert((w, a, j, k), p);
                        }
                    }
                }
            }
        }
    }
    let what = format!("Hom_Z({}, {})", m.tag, nmod.tag);
    let gens = saturated_generators(&space, start, cap, expected, margin, &what, |d| {
        let lay = space.layout(d);
        let mut rows: HashMap<(usize, usize, usize, Mono), usize> = HashMap::new();
        let mut images = Vec::with_capacity(lay.len());
        for c in 0..lay.len() {
            let (coord, mono) = lay.coordinate(c);
            let (a, j) = (coord / rn, coord % rn);
            let mut out: Vec<(usize, Rat)> = Vec::new();
            let mut push = |key: (usize, usize, usize), p: &Poly, sign: bool| {
                for (mm, x) in p.terms() {
                    let next = rows.len();
                    let r = *rows.entry((key.0, key.1, key.2, *mm)).or_insert(next);
                    out.push((r, if sign { x.clone() } else { -x }));
                }
            };
            for &w in &active {
                for k in 0..nmod.fiber_rank(w) {
                    match pivot[w] {
                        None => {
                            if let Some(p) = prod.get(&(w, 0, j, k)) {
                                push((w, a, k), &p.mul_mono(mono), true);
                            }
                        }
                        Some(a0) if a != a0 => {
                            if let Some(p) = prod.get(&(w, a0, j, k)) {
                                push((w, a, k), &p.mul_mono(mono), true);
                            }
                        }
                        Some(a0) => {
                            for b in (0..nu).filter(|&b| b != a0) {
                                if let Some(p) = prod.get(&(w, b, j, k)) {
                                    push((w, b, k), &p.mul_mono(mono), false);
                                }
                            }
                        }
                    }
                }
            }
            images.push(linalg::normalize(out));
        }
        Ok(slice_solve_kernel(&space, d, &images).basis)
    })?;
    let mut maps = Vec::with_capacity(gens.len());
    for g in &gens {
        let fu: Vec<Vec<Poly>> = (0..nu)
            .map(|a| nmod.combine(&g.coords[a * rn..(a + 1) * rn]))
            .collect();
        let mut c = pmat_zero(n, rn, rm);
        for i in 0..rm {
            let mi = &m.gens()[i].coords;
            let mut img = vec![Poly::zero(n); nmod.frame.len()];
            for &w in &active {
                let Some(a0) = pivot[w] else { continue };
                let src = m.frame.block(w).start;
                if mi[src].is_zero() {
                    continue;
                }
                let den = uval(a0, w);
                for idx in nmod.frame.block(w) {
                    let num = fu[a0][idx].mul(&mi[src]);
                    img[idx] = num.divide_poly(&den)?;
                }
            }
            let col = nmod.express(&img, m.degree(i) + g.degree).ok_or_else(|| {
                Error::Invalid(format!("{what}: image leaves the target lattice"))
            })?;
            for (j, p) in col.into_iter().enumerate() {
                c[j][i] = p;
            }
        }
        maps.push(ZMap {
            degree: g.degree,
            matrix: c,
        });
    }
    Ok(ZHomBasis {
        gens: maps,
        expected_rank: expected,
        free: true,
        src_rank: rm,
        dst_rank: rn,
        kind: HomKind::Values(u),
        space,
        values: GradedBasis { gens },
        reducers: Mutex::new(HashMap::new()),
    })
}

/// Verifies `f(ζ·m_i) = ζ·f(m_i)` on every generator.
pub fn commutes_with(zeta: &[Poly], m: &SectionModule, nmod: &SectionModule, f: &ZMap) -> bool {
    for i in 0..m.rank() {
        let lhs_src = m.zmul(zeta, &m.gens()[i].coords);
        let Some(c) = m.express(&lhs_src, m.degree(i) + 2) else {
            return false;
        };
        let mut lhs = vec![Poly::zero(m.nvars()); nmod.frame.len()];
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let img = f.apply_gen(nmod, k);
            for (o, x) in lhs.iter_mut().zip(img) {
                *o = o.add(&ck.mul(&x));
            }
        }
        let rhs = nmod.zmul(zeta, &f.apply_gen(nmod, i));
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Shared state for one moment graph: `Z`, a separating `ζ_λ`, and memoized `B(x)`.
#[derive(Debug)]
pub struct ZContext {
    pub graph: Arc<MomentGraph>,
    pub margin: i32,
    pub lambda: Vec<Rat>,
    pub zeta: Vec<Poly>,
    pub z: Arc<SectionModule>,
    sheaves: Mutex<HashMap<usize, Arc<GSheaf>>>,
    bs: Mutex<HashMap<usize, Arc<SectionModule>>>,
}

impl ZContext {
    pub fn new(graph: Arc<MomentGraph>, margin: i32) -> Result<ZContext> {
        let (lambda, zeta) = default_separating(&graph)?;
        let z = Arc::new(structure_module(&graph, margin)?);
        Ok(ZContext {
            graph,
            margin,
            lambda,
            zeta,
            z,
            sheaves: Mutex::new(HashMap::new()),
            bs: Mutex::new(HashMap::new()),
        })
    }

    pub fn nvars(&self) -> usize {
        self.graph.nvars()
    }

    pub fn bmp(&self, x: usize) -> Result<Arc<GSheaf>> {
        if let Some(s) = self.sheaves.lock().unwrap().get(&x) {
            return Ok(s.clone());
        }
        let s = Arc::new(bmp_sheaf(&self.graph, x, self.margin)?);
        self.sheaves.lock().unwrap().insert(x, s.clone());
        Ok(s)
    }

    /// The sheaf at `x` if it has been computed or installed.
    pub fn cached_bmp(&self, x: usize) -> Option<Arc<GSheaf>> {
        self.sheaves.lock().unwrap().get(&x).cloned()
    }

    /// Installs a precomputed sheaf (e.g. from a cache).
    pub fn insert_bmp(&self, x: usize, s: GSheaf) {
        self.sheaves.lock().unwrap().insert(x, Arc::new(s));
    }

    pub fn b(&self, x: usize) -> Result<Arc<SectionModule>> {
        if let Some(b) = self.bs.lock().unwrap().get(&x) {
            return Ok(b.clone());
        }
        let sh = self.bmp(x)?;
        let b = Arc::new(sections_b(&self.graph, &sh, x, self.margin)?);
        self.bs.lock().unwrap().insert(x, b.clone());
        Ok(b)
    }

    pub fn verma(&self, x: usize) -> SectionModule {
        verma_z(&self.graph, x)
    }

    pub fn theta(&self, s: usize, m: &SectionModule) -> Result<Adjunction> {
        theta_z(&self.graph, s, m)
    }

    pub fn phi(&self, s: usize, m: &SectionModule) -> Result<Adjunction> {
        phi_z(&self.graph, s, m)
    }

    pub fn a_m(&self, m: &SectionModule) -> Result<SectionModule> {
        a_module(&self.graph, m, self.margin)
    }

    pub fn hom(&self, m: &SectionModule, nmod: &SectionModule) -> Result<ZHomBasis> {
        hom_z(&self.z, &self.zeta, m, nmod, self.margin)
    }

    pub fn hom_direct(&self, m: &SectionModule, nmod: &SectionModule) -> Result<ZHomBasis> {
        hom_z_direct(&self.zeta, m, nmod, self.margin)
    }
}

/// `M^Ω`: the image of the projection onto the coordinates of `Ω`, as slice dimensions.
pub fn upset_image_dims(m: &SectionModule, omega: &[usize], degrees: Range<i32>) -> Vec<usize> {
    let keep: HashSet<usize> = omega.iter().flat_map(|&w| m.frame.block(w)).collect();
    degrees
        .map(|d| {
            let mut s = Span::new();
            for v in m.slice_rows(d) {
                s.insert(
                    v.into_iter()
                        .filter(|(i, _)| keep.contains(&m.frame.space.layout(d).coordinate(*i).0))
                        .collect(),
                );
            }
            s.rank()
        })
        .collect()
}

/// `M_Ω`: elements supported on `Ω`, as slice dimensions (diagnostic only).
pub fn upset_sub_dims(m: &SectionModule, omega: &[usize], degrees: Range<i32>) -> Vec<usize> {
    let keep: HashSet<usize> = omega.iter().flat_map(|&w| m.frame.block(w)).collect();
    degrees
        .map(|d| {
            let lay = m.frame.space.layout(d);
            let rows = m.slice_rows(d);
            // kernel of the projection away from Ω
            let mut eqs: HashMap<usize, Vec<(usize, Rat)>> = HashMap::new();
            for (r, v) in rows.iter().enumerate() {
                for (i, x) in v {
                    if !keep.contains(&lay.coordinate(*i).0) {
                        eqs.entry(*i).or_default().push((r, x.clone()));
                    }
                }
            }
            let k = linalg::kernel(rows.len(), eqs.into_values().map(linalg::normalize));
            k.len()
        })
        .collect()
}

/// Stalk graded ranks of `M` read from its fibers: counts per shift.
pub fn fiber_graded_ranks(m: &SectionModule) -> Vec<Vec<(i32, usize)>> {
    m.frame
        .fibers
        .iter()
        .map(|f| {
            let mut c: std::collections::BTreeMap<i32, usize> = Default::default();
            for &g in f {
                *c.entry(g).or_default() += 1;
            }
            c.into_iter().collect()
        })
        .collect()
}

/// Checks that the monomial basis of degree `k` has the expected size; used by callers
/// that size buffers from [`dim_s`].
pub fn monomial_count(n: usize, k: u32) -> usize {
    monomials(n, k).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{builtin, Group};

    fn ctx(name: &str) -> ZContext {
        let g = Arc::new(Group::new(Arc::new(builtin(name).unwrap()), None).unwrap());
        ZContext::new(Arc::new(MomentGraph::full(g).unwrap()), 4).unwrap()
    }

    fn vertex(c: &ZContext, word: &str) -> usize {
        let g = &c.graph.group;
        let w = word.replace('s', "1").replace('t', "2");
        c.graph.position(g.parse(&w).unwrap()).unwrap()
    }

    #[test]
    fn structure_algebra_is_free() {
        let c = ctx("A2");
        assert_eq!(c.z.rank(), 6);
        let mut d: Vec<i32> = c.z.gens().iter().map(|g| g.degree).collect();
        d.sort();
        assert_eq!(d, vec![0, 2, 2, 4, 4, 6]);
        assert!(c.z.is_graded_free(10));
        assert!(c.z.closed_under(&c.zeta, 2));
    }

    #[test]
    fn bmp_ranks_a2() {
        let c = ctx("A2");
        let w0 = vertex(&c, "sts");
        let sh = c.bmp(w0).unwrap();
        assert!((0..6).all(|y| sh.rank(y) == 1));
        let b = c.b(w0).unwrap();
        assert_eq!(b.rank(), 6);
        assert!(b.is_graded_free(10));
        assert!(b.closed_under(&c.zeta, 2));
        let s = vertex(&c, "s");
        let bs = c.b(s).unwrap();
        assert_eq!(bs.fiber_ranks().iter().sum::<usize>(), 2);
        assert_eq!(bs.rank(), 2);
    }

    #[test]
    fn theta_and_phi_units() {
        let c = ctx("A2");
        let n = c.nvars();
        for word in ["e", "s", "st"] {
            let x = vertex(&c, word);
            let m = c.b(x).unwrap();
            for s in 0..2 {
                let th = c.theta(s, &m).unwrap();
                assert!(th.module.is_graded_free(8));
                assert!(th.module.closed_under(&c.zeta, 2));
                let ph = c.phi(s, &m).unwrap();
                assert!(ph.module.is_graded_free(8));
                assert!(ph.module.closed_under(&c.zeta, 2));
                let ee = th.counit.compose(&th.unit, n);
                let cs = c_element(&c.graph, s).unwrap();
                assert_eq!(
                    ee.matrix,
                    pmat_scale(
                        &m.action_matrix(&cs, 2).unwrap(),
                        &Poly::constant(n, Rat::int(2))
                    )
                );
                assert!(commutes_with(&c.zeta, &m, &th.module, &th.unit));
                assert!(commutes_with(&c.zeta, &th.module, &m, &th.counit));
                assert!(commutes_with(&c.zeta, &m, &ph.module, &ph.unit));
                assert!(commutes_with(&c.zeta, &ph.module, &m, &ph.counit));
            }
        }
    }

    #[test]
    fn hom_ranks_and_methods_agree() {
        let c = ctx("A2");
        let s = vertex(&c, "s");
        let t = vertex(&c, "t");
        let w0 = vertex(&c, "sts");
        let bs = c.b(s).unwrap();
        let bt = c.b(t).unwrap();
        let bw = c.b(w0).unwrap();
        let h = c.hom(&bs, &bt).unwrap();
        assert_eq!(h.len(), 1);
        for (m, nn) in [(&bs, &bw), (&bw, &bs), (&bw, &bw)] {
            let a = c.hom(m, nn).unwrap();
            let b = c.hom_direct(m, nn).unwrap();
            assert_eq!(a.len(), a.expected_rank);
            let mut da = a.degrees();
            let mut db = b.degrees();
            da.sort();
            db.sort();
            assert_eq!(da, db);
            for f in &a.gens {
                assert!(commutes_with(&c.zeta, m, nn, f));
            }
        }
        let v = c.verma(s);
        assert_eq!(c.hom(&v, &v).unwrap().degrees(), vec![0]);
        assert!(c.hom(&v, &c.verma(t)).unwrap().is_empty());
    }

    #[test]
    fn a_involution() {
        let c = ctx("A2");
        let st = vertex(&c, "st");
        let ts = vertex(&c, "ts");
        let am = c.a_m(&c.b(st).unwrap()).unwrap();
        assert_eq!(
            fiber_graded_ranks(&am),
            fiber_graded_ranks(&c.b(ts).unwrap())
        );
        let back = c.a_m(&am).unwrap();
        let orig = c.b(st).unwrap();
        for g in back.gens() {
            assert!(orig.contains(&g.coords, g.degree));
        }
    }

    #[test]
    fn bmp_a3_singular_stalk() {
        let g = Arc::new(Group::new(Arc::new(builtin("A3").unwrap()), None).unwrap());
        let x = g.parse("2132").unwrap();
        let graph = MomentGraph::interval(g.clone(), x).unwrap();
        let top = graph.position(x).unwrap();
        let sh = bmp_sheaf(&graph, top, 4).unwrap();
        let y = graph.position(g.parse("2").unwrap()).unwrap();
        assert_eq!(sh.graded_rank(y), vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn b2_all_bmp() {
        let c = ctx("B2");
        for x in 0..c.graph.len() {
            let sh = c.bmp(x).unwrap();
            for y in 0..c.graph.len() {
                assert_eq!(sh.rank(y), usize::from(c.graph.leq(y, x)));
            }
            assert_eq!(
                c.b(x).unwrap().rank(),
                (0..8).filter(|&y| c.graph.leq(y, x)).count()
            );
        }
    }
}
