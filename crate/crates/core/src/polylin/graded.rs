//! Degree slices of graded free modules and graded-Nakayama generator extraction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::linalg::{self, SVec, Span};
use super::poly::{Mono, Poly};
use super::PolyError;
use crate::rat::Rat;

/// Monomials of a fixed total degree with an index lookup.
#[derive(Debug)]
pub struct MonoBasis {
    pub monos: Vec<Mono>,
    index: HashMap<Mono, usize>,
}

impl MonoBasis {
    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index(&self, m: Mono) -> Option<usize> {
        self.index.get(&m).copied()
    }
}

fn enumerate(n: usize, k: u32, skip: Option<usize>) -> Vec<Mono> {
    fn rec(
        i: usize,
        n: usize,
        left: u32,
        skip: Option<usize>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Mono>,
    ) {
        if i + 1 == n {
            if skip == Some(i) && left > 0 {
                return;
            }
            cur.push(left);
            out.push(Mono::from_exps(cur));
            cur.pop();
            return;
        }
        let top = if skip == Some(i) { 0 } else { left };
        for e in (0..=top).rev() {
            cur.push(e);
            rec(i + 1, n, left - e, skip, cur, out);
            cur.pop();
        }
    }
    if n == 0 {
        return if k == 0 { vec![Mono::ONE] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(0, n, k, skip, &mut Vec::new(), &mut out);
    out
}

type BasisCache = Mutex<HashMap<(usize, u32, Option<usize>), Arc<MonoBasis>>>;

fn cache() -> &'static BasisCache {
    static C: OnceLock<BasisCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Monomials of total degree `k` in `n` variables (lexicographically descending).
pub fn monomials(n: usize, k: u32) -> Arc<MonoBasis> {
    monomials_skipping(n, k, None)
}

/// Monomials of total degree `k` in which variable `skip` does not occur.
pub fn monomials_skipping(n: usize, k: u32, skip: Option<usize>) -> Arc<MonoBasis> {
    let key = (n, k, skip);
    if let Some(b) = cache().lock().unwrap().get(&key) {
        return b.clone();
    }
    let monos = enumerate(n, k, skip);
    let index = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let b = Arc::new(MonoBasis { monos, index });
    cache().lock().unwrap().insert(key, b.clone());
    b
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Dimension of the degree-`d` part of the polynomial ring in `n` variables
/// (linear forms in degree 2).
pub fn dim_s(n: usize, d: i32) -> usize {
    if d < 0 || d % 2 != 0 {
        return 0;
    }
    if n == 0 {
        return usize::from(d == 0);
    }
    binomial(d as u64 / 2 + n as u64 - 1, n as u64 - 1) as usize
}

/// Monomial degree carried by a coordinate with shift `s` in an element of degree `d`.
pub fn coord_degree(d: i32, s: i32) -> Option<u32> {
    let k = d - s;
    if k >= 0 && k % 2 == 0 {
        Some((k / 2) as u32)
    } else {
        None
    }
}

/// Flattening of degree-`d` vectors of polynomials whose coordinate `c` has
/// degree shift `shifts[c]` (its entry has degree `d - shifts[c]`).
#[derive(Debug, Clone)]
pub struct Layout {
    pub nvars: usize,
    pub degree: i32,
    pub shifts: Vec<i32>,
    blocks: Vec<Option<(usize, Arc<MonoBasis>)>>,
    rev: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(nvars: usize, shifts: &[i32], degree: i32) -> Layout {
        let mut blocks = Vec::with_capacity(shifts.len());
        let mut rev = Vec::new();
        let mut off = 0;
        for (c, &s) in shifts.iter().enumerate() {
            match coord_degree(degree, s) {
                Some(k) => {
                    let b = monomials(nvars, k);
                    for j in 0..b.len() {
                        rev.push((c, j));
                    }
                    blocks.push(Some((off, b.clone())));
                    off += b.len();
                }
                None => blocks.push(None),
            }
        }
        Layout {
            nvars,
            degree,
            shifts: shifts.to_vec(),
            blocks,
            rev,
        }
    }

    /// Number of scalar coordinates.
    pub fn len(&self) -> usize {
        self.rev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rev.is_empty()
    }

    pub fn flatten(&self, v: &[Poly]) -> Result<SVec, PolyError> {
        if v.len() != self.shifts.len() {
            return Err(PolyError::DimensionMismatch);
        }
        let mut out = Vec::new();
        for (c, p) in v.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let Some((off, b)) = &self.blocks[c] else {
                return Err(PolyError::InhomogeneousInput);
            };
            for (m, x) in p.terms() {
                let j = b.index(*m).ok_or(PolyError::InhomogeneousInput)?;
                out.push((off + j, x.clone()));
            }
        }
        Ok(linalg::normalize(out))
    }

    pub fn unflatten(&self, v: &SVec) -> Vec<Poly> {
        let mut terms: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); self.shifts.len()];
        for (i, x) in v {
            let (c, j) = self.rev[*i];
            let (_, b) = self.blocks[c].as_ref().unwrap();
            terms[c].push((b.monos[j], x.clone()));
        }
        terms
            .into_iter()
            .map(|t| Poly::from_terms(self.nvars, t))
            .collect()
    }

    /// Multiplies a flattened vector by the monomial `m`, landing in `target`.
    pub fn mul_mono(&self, v: &SVec, m: Mono, target: &Layout) -> SVec {
        let mut out = Vec::with_capacity(v.len());
        for (i, x) in v {
            let (c, j) = self.rev[*i];
            let (_, b) = self.blocks[c].as_ref().unwrap();
            let nm = b.monos[j].mul(m);
            let (off, tb) = target.blocks[c].as_ref().expect("target layout degree");
            out.push((off + tb.index(nm).unwrap(), x.clone()));
        }
        linalg::normalize(out)
    }

    /// The monomial-times-unit-vector elements spanning this slice of the free module.
    pub fn coordinate(&self, i: usize) -> (usize, Mono) {
        let (c, j) = self.rev[i];
        (c, self.blocks[c].as_ref().unwrap().1.monos[j])
    }
}

/// Cached layouts for a fixed list of coordinate shifts.
#[derive(Debug, Clone)]
pub struct GradedSpace {
    pub nvars: usize,
    pub shifts: Vec<i32>,
    layouts: Arc<Mutex<HashMap<i32, Arc<Layout>>>>,
}

impl GradedSpace {
    pub fn new(nvars: usize, shifts: Vec<i32>) -> GradedSpace {
        GradedSpace {
            nvars,
            shifts,
            layouts: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn layout(&self, d: i32) -> Arc<Layout> {
        if let Some(l) = self.layouts.lock().unwrap().get(&d) {
            return l.clone();
        }
        let l = Arc::new(Layout::new(self.nvars, &self.shifts, d));
        self.layouts.lock().unwrap().insert(d, l.clone());
        l
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }
}

/// A homogeneous element: its degree and polynomial coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomVec {
    pub degree: i32,
    pub coords: Vec<Poly>,
}

/// Basis of one degree slice, stored flattened.
#[derive(Debug, Clone)]
pub struct DegreeSlice {
    pub degree: i32,
    pub basis: Vec<SVec>,
}

/// Homogeneous generators with sorted degrees.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    pub gens: Vec<HomVec>,
}

impl GradedBasis {
    pub fn degrees(&self) -> Vec<i32> {
        self.gens.iter().map(|g| g.degree).collect()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Predicted slice dimension of the free module on these generators.
    pub fn free_dim(&self, nvars: usize, d: i32) -> usize {
        self.gens.iter().map(|g| dim_s(nvars, d - g.degree)).sum()
    }
}

/// Span of `V*·slice` flattened in the layout of degree `slice.degree + 2`.
pub fn times_linear(lower: &Layout, slice: &[SVec], upper: &Layout) -> Span {
    let mut s = Span::new();
    for v in slice {
        for i in 0..lower.nvars {
            s.insert(lower.mul_mono(v, Mono::var(i), upper));
        }
    }
    s
}

/// Graded-Nakayama extraction: for each degree the complement of `V*·slice_{d-2}`
/// inside `slice_d`, taking `preferred[d]` candidates first. Fails with
/// `NotClosedUnderAction` if a multiple of a lower slice escapes the next one.
pub fn minimal_generators(
    space: &GradedSpace,
    slices: &[DegreeSlice],
    preferred: &HashMap<i32, Vec<SVec>>,
) -> Result<(GradedBasis, Vec<SVec>), PolyError> {
    let mut by_deg: HashMap<i32, &DegreeSlice> = HashMap::new();
    for s in slices {
        by_deg.insert(s.degree, s);
    }
    let mut degs: Vec<i32> = slices.iter().map(|s| s.degree).collect();
    degs.sort();
    let mut gens = Vec::new();
    let mut flat = Vec::new();
    for d in degs {
        let slice = by_deg[&d];
        let up = space.layout(d);
        let mut sub = match by_deg.get(&(d - 2)) {
            Some(lo) => {
                let low = space.layout(d - 2);
                times_linear(&low, &lo.basis, &up)
            }
            None => Span::new(),
        };
        let mut full = Span::new();
        for v in &slice.basis {
            full.insert(v.clone());
        }
        for r in sub.rows() {
            if !full.contains(r) {
                return Err(PolyError::NotClosedUnderAction);
            }
        }
        let cands = preferred
            .get(&d)
            .into_iter()
            .flatten()
            .chain(slice.basis.iter());
        for v in cands {
            if sub.rank() == full.rank() {
                break;
            }
            if !full.contains(v) {
                continue;
            }
            if sub.insert(v.clone()) {
                gens.push(HomVec {
                    degree: d,
                    coords: up.unflatten(v),
                });
                flat.push(v.clone());
            }
        }
    }
    Ok((GradedBasis { gens }, flat))
}

/// Span of a free module's degree-`d` slice, given its generators: all
/// monomial multiples, inserted in generator order. Tracking is optional.
pub fn free_slice(
    space: &GradedSpace,
    gens: &GradedBasis,
    d: i32,
    track: bool,
) -> (Span, Vec<(usize, Mono)>) {
    let lay = space.layout(d);
    let mut span = if track { Span::tracking() } else { Span::new() };
    let mut labels = Vec::new();
    for (g, hv) in gens.gens.iter().enumerate() {
        let Some(k) = coord_degree(d, hv.degree) else {
            continue;
        };
        let glay = space.layout(hv.degree);
        let gv = glay
            .flatten(&hv.coords)
            .expect("generator in its own layout");
        for m in monomials(space.nvars, k).monos.iter() {
            span.insert(glay.mul_mono(&gv, *m, &lay));
            labels.push((g, *m));
        }
    }
    (span, labels)
}

/// Matrix of reduction modulo a linear form on a fixed degree: monomial of
/// degree `k` ↦ flattened normal form over monomials avoiding the eliminated variable.
#[derive(Debug)]
pub struct ModAlpha {
    pub var: usize,
    pub k: u32,
    pub images: Vec<SVec>,
    pub target: Arc<MonoBasis>,
}

type ModCache = Mutex<HashMap<(Vec<Rat>, u32), Arc<ModAlpha>>>;

fn mod_cache() -> &'static ModCache {
    static C: OnceLock<ModCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn mod_alpha(alpha: &[Rat], k: u32) -> Result<Arc<ModAlpha>, PolyError> {
    let key = (alpha.to_vec(), k);
    if let Some(m) = mod_cache().lock().unwrap().get(&key) {
        return Ok(m.clone());
    }
    let n = alpha.len();
    let var = alpha
        .iter()
        .position(|a| !a.is_zero())
        .ok_or(PolyError::ZeroDivisor)?;
    let src = monomials(n, k);
    let target = monomials_skipping(n, k, Some(var));
    let mut images = Vec::with_capacity(src.len());
    for m in &src.monos {
        let p = Poly::monomial(n, *m, Rat::one()).reduce_mod_linear(alpha)?;
        let v: Vec<(usize, Rat)> = p
            .terms()
            .iter()
            .map(|(mm, x)| (target.index(*mm).unwrap(), x.clone()))
            .collect();
        images.push(linalg::normalize(v));
    }
    let m = Arc::new(ModAlpha {
        var,
        k,
        images,
        target,
    });
    mod_cache().lock().unwrap().insert(key, m.clone());
    Ok(m)
}

impl ModAlpha {
    /// Normal form of a homogeneous polynomial of monomial degree `k`, flattened.
    pub fn reduce(&self, p: &Poly) -> SVec {
        let src = monomials(p.nvars(), self.k);
        let mut out: Vec<(usize, Rat)> = Vec::new();
        for (m, x) in p.terms() {
            let i = src
                .index(*m)
                .expect("degree mismatch in mod-alpha reduction");
            for (j, y) in &self.images[i] {
                out.push((*j, x * y));
            }
        }
        linalg::normalize(out)
    }
}

/// Solves the three slice problems on explicit polynomial vectors of one degree.
pub mod slice_solve {
    use super::*;

    /// Basis of the span of `family` (homogeneous vectors of degree `d`).
    pub fn image(
        space: &GradedSpace,
        d: i32,
        family: &[Vec<Poly>],
    ) -> Result<DegreeSlice, PolyError> {
        let lay = space.layout(d);
        let mut s = Span::new();
        for v in family {
            s.insert(lay.flatten(v)?);
        }
        Ok(DegreeSlice {
            degree: d,
            basis: s.rows().to_vec(),
        })
    }

    /// Coordinates of `target` in terms of `family`, or `NotInSpan`.
    pub fn membership(
        space: &GradedSpace,
        d: i32,
        family: &[Vec<Poly>],
        target: &[Poly],
    ) -> Result<Vec<Rat>, PolyError> {
        let lay = space.layout(d);
        let mut s = Span::tracking();
        for v in family {
            s.insert(lay.flatten(v)?);
        }
        let c = s
            .coords(&lay.flatten(target)?)
            .ok_or(PolyError::NotInSpan)?;
        Ok(linalg::dense(&c, family.len()))
    }

    /// Kernel of the linear map sending the `i`-th basis vector of the degree-`d`
    /// slice of `space` to `images[i]` (flattened in any common coordinate system).
    pub fn kernel(space: &GradedSpace, d: i32, images: &[SVec]) -> DegreeSlice {
        let lay = space.layout(d);
        assert_eq!(images.len(), lay.len(), "one image per slice coordinate");
        // transpose: equations indexed by target coordinate
        let mut rows: HashMap<usize, Vec<(usize, Rat)>> = HashMap::new();
        for (i, img) in images.iter().enumerate() {
            for (j, x) in img {
                rows.entry(*j).or_default().push((i, x.clone()));
            }
        }
        let mut keys: Vec<usize> = rows.keys().copied().collect();
        keys.sort();
        let eqs = keys
            .into_iter()
            .map(|k| linalg::normalize(rows.remove(&k).unwrap()));
        DegreeSlice {
            degree: d,
            basis: linalg::kernel(lay.len(), eqs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_dimension_formula() {
        for n in 1..=4 {
            for d in 0..=20 {
                let expect = if d % 2 == 0 {
                    monomials(n, d as u32 / 2).len()
                } else {
                    0
                };
                assert_eq!(dim_s(n, d), expect, "n={n} d={d}");
            }
        }
        assert_eq!(dim_s(2, 4), 3);
    }

    #[test]
    fn kernel_of_mod_alpha_is_alpha_line() {
        let alpha = vec![Rat::one(), Rat::int(-1)];
        let space = GradedSpace::new(2, vec![0]);
        let m = mod_alpha(&alpha, 1).unwrap();
        let lay = space.layout(2);
        let images: Vec<SVec> = (0..lay.len())
            .map(|i| {
                let (_, mono) = lay.coordinate(i);
                m.reduce(&Poly::monomial(2, mono, Rat::one()))
            })
            .collect();
        let k = slice_solve::kernel(&space, 2, &images);
        assert_eq!(k.basis.len(), 1);
        let p = &lay.unflatten(&k.basis[0])[0];
        let q = Poly::linear(&alpha);
        assert!(p.divide_exact(&alpha).is_ok());
        assert_eq!(p.degree(), q.degree());
    }

    #[test]
    fn membership_in_span_of_roots() {
        let space = GradedSpace::new(2, vec![0]);
        let a = vec![Poly::var(2, 0)];
        let b = vec![Poly::var(2, 1)];
        let t = vec![Poly::var(2, 0).add(&Poly::var(2, 1))];
        let c = slice_solve::membership(&space, 2, &[a, b], &t).unwrap();
        assert_eq!(c, vec![Rat::one(), Rat::one()]);
    }

    #[test]
    fn generators_of_free_module_and_ideal() {
        let space = GradedSpace::new(2, vec![0]);
        // free module S: slices are all of S_d
        let slices: Vec<DegreeSlice> = (0..=8)
            .step_by(2)
            .map(|d| {
                let n = space.layout(d).len();
                DegreeSlice {
                    degree: d,
                    basis: (0..n).map(|i| vec![(i, Rat::one())]).collect(),
                }
            })
            .collect();
        let (g, _) = minimal_generators(&space, &slices, &HashMap::new()).unwrap();
        assert_eq!(g.degrees(), vec![0]);
        // ideal (x1): slice_d = x1·S_{d-2}
        let x1 = Poly::var(2, 0);
        let slices: Vec<DegreeSlice> = (2..=8)
            .step_by(2)
            .map(|d| {
                let lay = space.layout(d);
                let basis = monomials(2, (d as u32 - 2) / 2)
                    .monos
                    .iter()
                    .map(|m| lay.flatten(&[x1.mul_mono(*m)]).unwrap())
                    .collect();
                DegreeSlice { degree: d, basis }
            })
            .collect();
        let (g, _) = minimal_generators(&space, &slices, &HashMap::new()).unwrap();
        assert_eq!(g.degrees(), vec![2]);
        assert_eq!(g.gens[0].coords[0], x1);
    }

    #[test]
    fn minimal_generators_idempotent() {
        let space = GradedSpace::new(2, vec![0, 2]);
        let gens = GradedBasis {
            gens: vec![
                HomVec {
                    degree: 0,
                    coords: vec![Poly::one(2), Poly::zero(2)],
                },
                HomVec {
                    degree: 4,
                    coords: vec![Poly::var(2, 0).pow(2), Poly::var(2, 1)],
                },
            ],
        };
        let slices: Vec<DegreeSlice> = (0..=10)
            .step_by(2)
            .map(|d| DegreeSlice {
                degree: d,
                basis: free_slice(&space, &gens, d, false).0.rows().to_vec(),
            })
            .collect();
        let (g, _) = minimal_generators(&space, &slices, &HashMap::new()).unwrap();
        assert_eq!(g.degrees(), gens.degrees());
    }
}
