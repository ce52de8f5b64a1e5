//! Bimodules `X` stored as the right modules `e_y X` plus left operators,
//! and the functors `Hom_A(X, -)` and `- ⊗_A X`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::algebra::FinAlgebra;
use super::dense;
use super::module::{
    direct_sum, factor_through, quotient, quotient_section, regular_projective, submodule, sum_map,
    FinModule, ModMap, Spans, SumLayout,
};
use super::resolution::{Presentation, Resolution};
use crate::polylin::{Mat, SVec, Span};
use crate::rat::Rat;

/// An `A`-bimodule. `parts[y] = e_y X` as a right module; the generator
/// `g ∈ e_{dst} A e_{src}` acts on the left as a right-module map
/// `parts[src] → parts[dst]`.
pub struct Bimodule {
    pub label: String,
    pub parts: Vec<FinModule>,
    left_gen: HashMap<usize, ModMap>,
    /// Whether the left operators come from an action of `A`. When false every
    /// non-idempotent basis element has its own operator (a lift to `End_Z`).
    pub exact: bool,
    /// Extra left operators (the `V*` action on `φ`), `vstar[i][y]` acting on `e_y X`.
    pub vstar: Vec<Vec<ModMap>>,
    /// Bimodule maps `X → A` and `A → X`, part by part (`e_y A = P(y)`).
    pub to_a: Option<Vec<ModMap>>,
    pub from_a: Option<Vec<ModMap>>,
    left_cache: Mutex<HashMap<usize, Arc<ModMap>>>,
    pres: Vec<OnceLock<Arc<Presentation>>>,
}

impl Bimodule {
    pub fn new(label: &str, parts: Vec<FinModule>, left_gen: HashMap<usize, ModMap>) -> Bimodule {
        let n = parts.len();
        Bimodule {
            label: label.to_string(),
            parts,
            left_gen,
            exact: true,
            vstar: Vec::new(),
            to_a: None,
            from_a: None,
            left_cache: Mutex::new(HashMap::new()),
            pres: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim()).sum()
    }

    /// Left action of a basis element, `parts[src a] → parts[dst a]`.
    pub fn left(&self, alg: &FinAlgebra, a: usize) -> Arc<ModMap> {
        if let Some(m) = self.left_cache.lock().unwrap().get(&a) {
            return m.clone();
        }
        let b = alg.basis[a];
        let m = if alg.is_idempotent(a) {
            ModMap::identity(&self.parts[b.src])
        } else if let Some(m) = self.left_gen.get(&a) {
            m.clone()
        } else {
            // (g·c)ξ = g(cξ)
            let mut acc = ModMap::zero(&self.parts[b.src], &self.parts[b.dst]);
            for (g, c, x) in alg.expression(a) {
                let lc = self.left(alg, *c);
                let lg = self.left(alg, *g);
                acc = acc.add(&lc.then(&lg).scale(x));
            }
            acc
        };
        let m = Arc::new(m);
        self.left_cache.lock().unwrap().insert(a, m.clone());
        m
    }

    /// Left action of `Σ c_a a` restricted to `parts[from] → parts[to]`.
    pub fn left_elem(&self, alg: &FinAlgebra, elem: &SVec, from: usize, to: usize) -> ModMap {
        let mut acc = ModMap::zero(&self.parts[from], &self.parts[to]);
        for (a, c) in elem {
            let b = alg.basis[*a];
            if b.src == from && b.dst == to {
                acc = acc.add(&self.left(alg, *a).scale(c));
            }
        }
        acc
    }

    pub fn presentation(&self, alg: &FinAlgebra, y: usize) -> Arc<Presentation> {
        self.pres[y]
            .get_or_init(|| Arc::new(Presentation::new(alg, &self.parts[y])))
            .clone()
    }

    /// Checks the right module axioms, that left operators are right-module
    /// maps, that the left action is multiplicative, and that `to_a`/`from_a`
    /// are bimodule maps.
    pub fn check(&self, alg: &FinAlgebra) -> std::result::Result<(), String> {
        for (y, p) in self.parts.iter().enumerate() {
            if !p.check_axioms(alg) {
                return Err(format!(
                    "{}: e_{} X is not a right module",
                    self.label, alg.names[y]
                ));
            }
        }
        let ops: Vec<usize> = if self.exact {
            alg.gens.clone()
        } else {
            (0..alg.dim()).filter(|&a| !alg.is_idempotent(a)).collect()
        };
        for &g in &ops {
            let b = alg.basis[g];
            let lg = self.left(alg, g);
            if !lg.is_module_map(alg, &self.parts[b.src], &self.parts[b.dst]) {
                return Err(format!(
                    "{}: left generator {g} is not right linear",
                    self.label
                ));
            }
            for c in alg.with_dst(b.src).into_iter().filter(|_| self.exact) {
                let lhs = self.left(alg, c).then(&lg);
                let rhs = self.left_elem(alg, &alg.product(g, c), alg.basis[c].src, b.dst);
                if lhs != rhs {
                    return Err(format!("{}: left action fails on {g}·{c}", self.label));
                }
            }
            for v in &self.vstar {
                if v[b.src].then(&lg) != lg.then(&v[b.dst]) {
                    return Err(format!(
                        "{}: V* operator does not commute with {g}",
                        self.label
                    ));
                }
            }
        }
        for v in &self.vstar {
            for (y, op) in v.iter().enumerate() {
                if !op.is_module_map(alg, &self.parts[y], &self.parts[y]) {
                    return Err(format!("{}: V* operator is not right linear", self.label));
                }
            }
        }
        let regular = Bimodule::regular(alg);
        for (maps, forward) in [(&self.to_a, true), (&self.from_a, false)] {
            let Some(maps) = maps else { continue };
            for (y, f) in maps.iter().enumerate() {
                let (src, dst) = if forward {
                    (&self.parts[y], &regular.parts[y])
                } else {
                    (&regular.parts[y], &self.parts[y])
                };
                if !f.is_module_map(alg, src, dst) {
                    return Err(format!(
                        "{}: comparison map at {} is not right linear",
                        self.label, alg.names[y]
                    ));
                }
            }
            for &g in &ops {
                let b = alg.basis[g];
                let (ls, lr) = (self.left(alg, g), regular.left(alg, g));
                let ok = if forward {
                    ls.then(&maps[b.dst]) == maps[b.src].then(&lr)
                } else {
                    lr.then(&maps[b.dst]) == maps[b.src].then(&ls)
                };
                if !ok {
                    return Err(format!(
                        "{}: comparison map is not left linear at {g}",
                        self.label
                    ));
                }
            }
        }
        Ok(())
    }

    /// `A` as a bimodule over itself.
    pub fn regular(alg: &FinAlgebra) -> Bimodule {
        let parts: Vec<FinModule> = (0..alg.nv).map(|y| regular_projective(alg, y)).collect();
        let mut left = HashMap::new();
        for &g in &alg.gens {
            let b = alg.basis[g];
            let blocks = (0..alg.nv)
                .map(|z| {
                    let mut m =
                        Mat::zeros(alg.by_pair[z][b.src].len(), alg.by_pair[z][b.dst].len());
                    for (i, &c) in alg.by_pair[z][b.src].iter().enumerate() {
                        for (k, x) in alg.product(g, c) {
                            m.set(i, alg.pos[k], x);
                        }
                    }
                    m
                })
                .collect();
            left.insert(g, ModMap { blocks });
        }
        let mut x = Bimodule::new("A", parts, left);
        x.to_a = Some(x.parts.iter().map(ModMap::identity).collect());
        x.from_a = x.to_a.clone();
        x
    }

    /// Sub-bimodule with the given per-part spans.
    pub fn sub(&self, alg: &FinAlgebra, spans: &[Spans], label: &str) -> Bimodule {
        let (parts, incls): (Vec<FinModule>, Vec<ModMap>) = self
            .parts
            .iter()
            .zip(spans)
            .map(|(p, s)| submodule(alg, p, s))
            .unzip();
        let mut left = HashMap::new();
        for &g in &alg.gens {
            let b = alg.basis[g];
            let f = incls[b.src].then(&self.left(alg, g));
            left.insert(g, factor_through(&f, &incls[b.dst]));
        }
        let parts = parts.into_iter().map(|p| p.with_label(label)).collect();
        Bimodule::new(label, parts, left)
    }

    /// Quotient bimodule by the sub-bimodule with the given per-part spans.
    pub fn quotient(&self, alg: &FinAlgebra, spans: &[Spans], label: &str) -> Bimodule {
        let (parts, projs): (Vec<FinModule>, Vec<ModMap>) = self
            .parts
            .iter()
            .zip(spans)
            .map(|(p, s)| quotient(alg, p, s))
            .unzip();
        let sections: Vec<ModMap> = self
            .parts
            .iter()
            .zip(spans)
            .map(|(p, s)| quotient_section(p, s))
            .collect();
        let mut left = HashMap::new();
        for &g in &alg.gens {
            let b = alg.basis[g];
            left.insert(
                g,
                sections[b.src].then(&self.left(alg, g)).then(&projs[b.dst]),
            );
        }
        let parts = parts.into_iter().map(|p| p.with_label(label)).collect();
        Bimodule::new(label, parts, left)
    }

    /// Per-part spans of a two-sided ideal given by a span of algebra elements.
    pub fn ideal_spans(alg: &FinAlgebra, ideal: &Span) -> Vec<Spans> {
        let mut spans: Vec<Spans> = (0..alg.nv)
            .map(|_| (0..alg.nv).map(|_| Span::new()).collect())
            .collect();
        for r in ideal.rows() {
            // rows of an ideal spanned by products are homogeneous in (src, dst)
            let b = alg.basis[r[0].0];
            let v: SVec = r.iter().map(|(k, x)| (alg.pos[*k], x.clone())).collect();
            spans[b.dst][b.src].insert(v);
        }
        spans
    }
}

/// The coordinates of `Hom_A(e_y X, M)` inside `⊕_i M e_{z_i}`, one summand
/// per generator of `e_y X`.
struct HSpace {
    pres: Arc<Presentation>,
    offs: Vec<usize>,
    total: usize,
    basis: Mat,
    tracker: Span,
}

impl HSpace {
    fn new(alg: &FinAlgebra, pres: Arc<Presentation>, m: &FinModule) -> HSpace {
        let ws = pres.gen_weights().to_vec();
        let mut offs = vec![0];
        for &z in &ws {
            offs.push(offs.last().unwrap() + m.wdim(z));
        }
        let total = *offs.last().unwrap();
        let mut coff = vec![0];
        for (w, _) in &pres.rels {
            coff.push(coff.last().unwrap() + m.wdim(*w));
        }
        let mut e = Mat::zeros(total, *coff.last().unwrap());
        for (k, (w, rel)) in pres.rels.iter().enumerate() {
            for (j, r) in rel {
                dense::add_block(
                    &mut e,
                    offs[*j],
                    coff[k],
                    &m.act_elem(alg, r, ws[*j], *w),
                    &Rat::one(),
                );
            }
        }
        let basis_rows = dense::left_kernel(&e);
        let basis = dense::from_svecs(&basis_rows, total);
        let tracker = dense::row_tracker(&basis);
        HSpace {
            pres,
            offs,
            total,
            basis,
            tracker,
        }
    }

    fn dim(&self) -> usize {
        self.basis.rows
    }

    /// Matrix of `h ↦ h(ξ)` for `ξ` in weight `z` of `e_y X`, on stacked coordinates.
    fn eval_at(&self, alg: &FinAlgebra, m: &FinModule, z: usize, xi: &SVec) -> Mat {
        let ws = self.pres.gen_weights();
        let mut out = Mat::zeros(self.total, m.wdim(z));
        if xi.is_empty() {
            return out;
        }
        for (j, b) in self.pres.cover.preimage(alg, z, xi) {
            dense::add_block(
                &mut out,
                self.offs[j],
                0,
                &m.act_elem(alg, &b, ws[j], z),
                &Rat::one(),
            );
        }
        out
    }

    fn coords(&self, rows: &Mat) -> Mat {
        let cs: Vec<SVec> = dense::rows(rows)
            .iter()
            .map(|r| self.tracker.coords(r).expect("image lies in Hom"))
            .collect();
        dense::from_svecs(&cs, self.dim())
    }
}

/// `Hom_A(X, M)` with its right module structure from the left action on `X`.
pub struct HomApplied {
    pub module: FinModule,
    spaces: Vec<HSpace>,
}

impl HomApplied {
    pub fn new(alg: &FinAlgebra, x: &Bimodule, m: &FinModule) -> HomApplied {
        let spaces: Vec<HSpace> = (0..alg.nv)
            .into_par_iter()
            .map(|y| HSpace::new(alg, x.presentation(alg, y), m))
            .collect();
        let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
        let mut h = HomApplied {
            module: FinModule::zero(alg),
            spaces,
        };
        let label = format!("Hom({},{})", x.label, m.label);
        let op = |g: usize| {
            let b = alg.basis[g];
            h.induced(alg, m, &x.left(alg, g), b.dst, b.src)
        };
        let module = if x.exact {
            FinModule::from_gens(alg, &dims, op, &label)
        } else {
            FinModule::from_all(alg, &dims, op, &label)
        };
        h.module = module;
        h
    }

    /// For a right-module map `L: e_{y'} X → e_y X`, the map `h ↦ h∘L`.
    fn induced(&self, alg: &FinAlgebra, m: &FinModule, l: &ModMap, y: usize, y2: usize) -> Mat {
        let (sy, sy2) = (&self.spaces[y], &self.spaces[y2]);
        let mut t = Mat::zeros(sy.total, sy2.total);
        let ws2 = sy2.pres.gen_weights();
        for (i, lift) in sy2.pres.cover.lifts.iter().enumerate() {
            let z = ws2[i];
            let v = dense::svec_mat(lift, &l.blocks[z]);
            dense::add_block(
                &mut t,
                0,
                sy2.offs[i],
                &sy.eval_at(alg, m, z, &v),
                &Rat::one(),
            );
        }
        sy2.coords(&sy.basis.mul(&t))
    }

    /// The `V*` operators on `Hom_A(X, M)` induced by those of `X`.
    pub fn vstar(&self, alg: &FinAlgebra, x: &Bimodule, m: &FinModule) -> Vec<ModMap> {
        x.vstar
            .iter()
            .map(|ops| ModMap {
                blocks: (0..alg.nv)
                    .map(|y| self.induced(alg, m, &ops[y], y, y))
                    .collect(),
            })
            .collect()
    }

    /// `M = Hom_A(A, M) → Hom_A(X, M)`, precomposition with `X → A`.
    pub fn from_module(&self, alg: &FinAlgebra, x: &Bimodule, m: &FinModule) -> ModMap {
        let to_a = x.to_a.as_ref().expect("bimodule has a map to A");
        let blocks = (0..alg.nv)
            .map(|y| {
                let s = &self.spaces[y];
                let ws = s.pres.gen_weights();
                let mut u = Mat::zeros(m.wdim(y), s.total);
                for (j, lift) in s.pres.cover.lifts.iter().enumerate() {
                    let z = ws[j];
                    let t = dense::svec_mat(lift, &to_a[y].blocks[z]);
                    let elem: SVec = t
                        .into_iter()
                        .map(|(k, c)| (alg.by_pair[z][y][k], c))
                        .collect();
                    dense::add_block(
                        &mut u,
                        0,
                        s.offs[j],
                        &m.act_elem(alg, &elem, y, z),
                        &Rat::one(),
                    );
                }
                s.coords(&u)
            })
            .collect();
        ModMap { blocks }
    }

    /// `Hom_A(X, M) → Hom_A(A, M) = M`, precomposition with `A → X`.
    pub fn to_module(&self, alg: &FinAlgebra, x: &Bimodule, m: &FinModule) -> ModMap {
        let from_a = x.from_a.as_ref().expect("bimodule has a map from A");
        let blocks = (0..alg.nv)
            .map(|y| {
                let s = &self.spaces[y];
                let xi = dense::row(&from_a[y].blocks[y], alg.pos[alg.idem[y]]);
                s.basis.mul(&s.eval_at(alg, m, y, &xi))
            })
            .collect();
        ModMap { blocks }
    }

    /// `Hom_A(X, h)` for `h: M → N`, given `Hom_A(X, N)`.
    pub fn map_to(&self, target: &HomApplied, h: &ModMap) -> ModMap {
        let blocks = self
            .spaces
            .iter()
            .zip(&target.spaces)
            .map(|(s, t)| {
                let ws = s.pres.gen_weights();
                let mut d = Mat::zeros(s.total, t.total);
                for (j, &z) in ws.iter().enumerate() {
                    dense::add_block(&mut d, s.offs[j], t.offs[j], &h.blocks[z], &Rat::one());
                }
                t.coords(&s.basis.mul(&d))
            })
            .collect();
        ModMap { blocks }
    }
}

/// `⊕_j e_{y_j} X` as a right module.
pub fn sum_parts(alg: &FinAlgebra, x: &Bimodule, weights: &[usize]) -> (FinModule, SumLayout) {
    let refs: Vec<&FinModule> = weights.iter().map(|&y| &x.parts[y]).collect();
    direct_sum(alg, &refs)
}

/// The map `⊕_k e_{w_k} X → ⊕_j e_{y_j} X` given by left multiplication by a
/// matrix of algebra elements, column `k` listing `(j, r_jk)`.
pub fn left_matrix(
    alg: &FinAlgebra,
    x: &Bimodule,
    src: (&FinModule, &SumLayout, &[usize]),
    dst: (&FinModule, &SumLayout, &[usize]),
    cols: &[Vec<(usize, SVec)>],
) -> ModMap {
    let parts: Vec<(usize, usize, ModMap)> = cols
        .iter()
        .enumerate()
        .flat_map(|(k, col)| col.iter().map(move |(j, r)| (k, *j, r)))
        .map(|(k, j, r)| (k, j, x.left_elem(alg, r, src.2[k], dst.2[j])))
        .collect();
    sum_map(src.0, src.1, dst.0, dst.1, &parts)
}

/// `M ⊗_A X`, the cokernel of the presentation tensored with `X`.
pub struct TensorApplied {
    pub module: FinModule,
    pub sum: FinModule,
    pub proj: ModMap,
    pres: Presentation,
    layout: SumLayout,
    section: ModMap,
}

pub fn tensor(alg: &FinAlgebra, m: &FinModule, x: &Bimodule) -> TensorApplied {
    assert!(x.exact, "tensoring needs a left A-action");
    let pres = Presentation::new(alg, m);
    let gw = pres.gen_weights().to_vec();
    let rw: Vec<usize> = pres.rels.iter().map(|r| r.0).collect();
    let cols: Vec<Vec<(usize, SVec)>> = pres.rels.iter().map(|r| r.1.clone()).collect();
    let (s, sl) = sum_parts(alg, x, &gw);
    let (r, rl) = sum_parts(alg, x, &rw);
    let d = left_matrix(alg, x, (&r, &rl, &rw), (&s, &sl, &gw), &cols);
    let section = super::module::quotient_section(&s, &super::module::image_spans(&d));
    let (q, proj) = super::module::cokernel(alg, &s, &d);
    TensorApplied {
        module: q.with_label(&format!("{}⊗{}", m.label, x.label)),
        sum: s,
        proj,
        pres,
        layout: sl,
        section,
    }
}

impl TensorApplied {
    /// `m ⊗ ξ` for `m ∈ M e_y` and `ξ ∈ e_y X e_z`, in weight `z` of `M ⊗ X`.
    fn pure(
        &self,
        alg: &FinAlgebra,
        x: &Bimodule,
        y: usize,
        m: &SVec,
        z: usize,
        xi: &SVec,
    ) -> SVec {
        let gw = self.pres.gen_weights();
        let mut v: SVec = Vec::new();
        if !m.is_empty() && !xi.is_empty() {
            for (j, b) in self.pres.cover.preimage(alg, y, m) {
                let l = x.left_elem(alg, &b, y, gw[j]);
                let s = self.layout.starts[z][j];
                v.extend(
                    dense::svec_mat(xi, &l.blocks[z])
                        .into_iter()
                        .map(|(k, c)| (s + k, c)),
                );
            }
        }
        dense::svec_mat(&crate::polylin::linalg::normalize(v), &self.proj.blocks[z])
    }

    /// `f ⊗ X: M ⊗ X → M' ⊗ X` for `f: M → M'`.
    pub fn map_to(
        &self,
        alg: &FinAlgebra,
        x: &Bimodule,
        target: &TensorApplied,
        f: &ModMap,
    ) -> ModMap {
        let gw = self.pres.gen_weights();
        let tw = target.pres.gen_weights();
        let mut parts = Vec::new();
        for (j, lift) in self.pres.cover.lifts.iter().enumerate() {
            let img = dense::svec_mat(lift, &f.blocks[gw[j]]);
            if img.is_empty() {
                continue;
            }
            for (k, b) in target.pres.cover.preimage(alg, gw[j], &img) {
                parts.push((j, k, x.left_elem(alg, &b, gw[j], tw[k])));
            }
        }
        let lifted = sum_map(&self.sum, &self.layout, &target.sum, &target.layout, &parts);
        self.section.then(&lifted).then(&target.proj)
    }
}

/// Unit `M → Hom_A(X, M ⊗ X)`, `m ↦ (ξ ↦ m ⊗ ξ)`, where `h = Hom_A(X, t)`.
pub fn adjunction_unit(
    alg: &FinAlgebra,
    x: &Bimodule,
    m: &FinModule,
    t: &TensorApplied,
    h: &HomApplied,
) -> ModMap {
    let blocks = (0..alg.nv)
        .map(|y| {
            let sp = &h.spaces[y];
            let ws = sp.pres.gen_weights();
            let mut u = Mat::zeros(m.wdim(y), sp.total);
            for i in 0..m.wdim(y) {
                let mv = vec![(i, Rat::one())];
                for (j, lift) in sp.pres.cover.lifts.iter().enumerate() {
                    for (k, c) in t.pure(alg, x, y, &mv, ws[j], lift) {
                        u.set(i, sp.offs[j] + k, c);
                    }
                }
            }
            sp.coords(&u)
        })
        .collect();
    ModMap { blocks }
}

/// Counit `Hom_A(X, N) ⊗ X → N`, `h ⊗ ξ ↦ h(ξ)`, where `t` tensors `h.module`.
pub fn adjunction_counit(
    alg: &FinAlgebra,
    h: &HomApplied,
    n: &FinModule,
    t: &TensorApplied,
) -> ModMap {
    let gw = t.pres.gen_weights();
    let blocks: Vec<Mat> = (0..alg.nv)
        .map(|z| {
            let mut e = Mat::zeros(t.sum.wdim(z), n.wdim(z));
            for (j, lift) in t.pres.cover.lifts.iter().enumerate() {
                let sp = &h.spaces[gw[j]];
                let hv = dense::svec_mat(lift, &sp.basis);
                let part = t.layout.starts[z][j];
                let width = t.layout.starts[z]
                    .get(j + 1)
                    .copied()
                    .unwrap_or(t.sum.wdim(z))
                    - part;
                for r in 0..width {
                    let val = dense::svec_mat(&hv, &sp.eval_at(alg, n, z, &vec![(r, Rat::one())]));
                    for (k, c) in val {
                        e.set(part + r, k, c);
                    }
                }
            }
            e
        })
        .collect();
    t.section.then(&ModMap { blocks })
}

/// `P_• ⊗_A X`: terms `C_n` and differentials `d_n: C_{n+1} → C_n`.
pub fn tensor_complex(
    alg: &FinAlgebra,
    res: &Resolution,
    x: &Bimodule,
) -> (Vec<FinModule>, Vec<ModMap>) {
    let sums: Vec<(FinModule, SumLayout)> = res
        .terms
        .iter()
        .map(|t| sum_parts(alg, x, &t.weights))
        .collect();
    let diffs = (0..res.diffs.len())
        .map(|n| {
            let (src, dst) = (&sums[n + 1], &sums[n]);
            left_matrix(
                alg,
                x,
                (&src.0, &src.1, &res.terms[n + 1].weights),
                (&dst.0, &dst.1, &res.terms[n].weights),
                &res.diffs[n],
            )
        })
        .collect();
    (sums.into_iter().map(|s| s.0).collect(), diffs)
}

/// `Hom_A(P_•, Y)` as vector spaces: `C^n = ⊕_j Y e_{y_j}` and `d^n: C^n → C^{n+1}`.
pub fn hom_complex(alg: &FinAlgebra, res: &Resolution, y: &FinModule) -> (Vec<usize>, Vec<Mat>) {
    let dims: Vec<usize> = res
        .terms
        .iter()
        .map(|t| t.weights.iter().map(|&w| y.wdim(w)).sum())
        .collect();
    let offs = |n: usize| -> Vec<usize> {
        let mut o = vec![0];
        for &w in &res.terms[n].weights {
            o.push(o.last().unwrap() + y.wdim(w));
        }
        o
    };
    let diffs = (0..res.diffs.len())
        .map(|n| {
            let (o0, o1) = (offs(n), offs(n + 1));
            let mut d = Mat::zeros(dims[n], dims[n + 1]);
            for (k, col) in res.diffs[n].iter().enumerate() {
                for (j, r) in col {
                    let blk = y.act_elem(
                        alg,
                        r,
                        res.terms[n].weights[*j],
                        res.terms[n + 1].weights[k],
                    );
                    dense::add_block(&mut d, o0[*j], o1[k], &blk, &Rat::one());
                }
            }
            d
        })
        .collect();
    (dims, diffs)
}

/// Cohomology dimensions of a complex of vector spaces `C^0 → C^1 → ⋯`.
pub fn cohomology_dims(dims: &[usize], diffs: &[Mat]) -> Vec<usize> {
    let ranks: Vec<usize> = diffs.iter().map(|d| d.rank()).collect();
    (0..dims.len())
        .map(|n| {
            let out = ranks.get(n).copied().unwrap_or(0);
            let inc = if n > 0 {
                ranks.get(n - 1).copied().unwrap_or(0)
            } else {
                0
            };
            dims[n] - out - inc
        })
        .collect()
}
