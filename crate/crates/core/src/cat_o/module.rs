//! Finite-dimensional right `A`-modules stored weight space by weight space.

use std::collections::HashMap;
use std::ops::Range;

use super::algebra::FinAlgebra;
use super::dense;
use crate::polylin::{linalg, Mat, SVec, Span};
use crate::rat::Rat;

/// A right module `M = ⊕_x M e_x`. `act[a]` is the matrix of `v ↦ v·a`
/// from `M e_{dst a}` to `M e_{src a}` (row-vector convention).
#[derive(Debug, Clone)]
pub struct FinModule {
    pub off: Vec<usize>,
    pub act: Vec<Mat>,
    pub label: String,
}

/// A module homomorphism, one block `M e_x → N e_x` per weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMap {
    pub blocks: Vec<Mat>,
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut off = vec![0];
    for d in dims {
        off.push(off.last().unwrap() + d);
    }
    off
}

impl FinModule {
    pub fn dim(&self) -> usize {
        *self.off.last().unwrap()
    }

    pub fn nw(&self) -> usize {
        self.off.len() - 1
    }

    pub fn wdim(&self, x: usize) -> usize {
        self.off[x + 1] - self.off[x]
    }

    pub fn wdims(&self) -> Vec<usize> {
        (0..self.nw()).map(|x| self.wdim(x)).collect()
    }

    pub fn block(&self, x: usize) -> Range<usize> {
        self.off[x]..self.off[x + 1]
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn with_label(mut self, label: &str) -> FinModule {
        self.label = label.to_string();
        self
    }

    pub fn zero(alg: &FinAlgebra) -> FinModule {
        FinModule::from_gens(alg, &vec![0; alg.nv], |_| unreachable!(), "0")
    }

    /// Builds a module from the matrices of the algebra generators; the other
    /// basis elements act through their recorded expressions.
    pub fn from_gens(
        alg: &FinAlgebra,
        dims: &[usize],
        mut gen_act: impl FnMut(usize) -> Mat,
        label: &str,
    ) -> FinModule {
        let off = offsets(dims);
        let mut act: Vec<Mat> = alg
            .basis
            .iter()
            .map(|b| Mat::zeros(dims[b.dst], dims[b.src]))
            .collect();
        for (x, &e) in alg.idem.iter().enumerate() {
            act[e] = Mat::identity(dims[x]);
        }
        for &g in &alg.gens {
            let b = alg.basis[g];
            act[g] = if dims[b.dst] == 0 || dims[b.src] == 0 {
                Mat::zeros(dims[b.dst], dims[b.src])
            } else {
                gen_act(g)
            };
        }
        for &a in alg.derived_order() {
            let b = alg.basis[a];
            let mut m = Mat::zeros(dims[b.dst], dims[b.src]);
            if m.rows > 0 && m.cols > 0 {
                for (g, c, x) in alg.expression(a) {
                    dense::add_block(&mut m, 0, 0, &act[*g].mul(&act[*c]), x);
                }
            }
            act[a] = m;
        }
        FinModule {
            off,
            act,
            label: label.to_string(),
        }
    }

    /// Builds a module-like object from the matrices of every non-idempotent
    /// basis element, without assuming they multiply as in `A`.
    pub fn from_all(
        alg: &FinAlgebra,
        dims: &[usize],
        mut f: impl FnMut(usize) -> Mat,
        label: &str,
    ) -> FinModule {
        let act = alg
            .basis
            .iter()
            .enumerate()
            .map(|(a, b)| {
                if alg.is_idempotent(a) {
                    Mat::identity(dims[b.src])
                } else if dims[b.dst] == 0 || dims[b.src] == 0 {
                    Mat::zeros(dims[b.dst], dims[b.src])
                } else {
                    f(a)
                }
            })
            .collect();
        FinModule {
            off: offsets(dims),
            act,
            label: label.to_string(),
        }
    }

    /// Matrix of `Σ c_a a` restricted to `M e_from → M e_to`.
    pub fn act_elem(&self, alg: &FinAlgebra, elem: &SVec, from: usize, to: usize) -> Mat {
        let mut m = Mat::zeros(self.wdim(from), self.wdim(to));
        for (a, c) in elem {
            let b = alg.basis[*a];
            if b.dst == from && b.src == to {
                dense::add_block(&mut m, 0, 0, &self.act[*a], c);
            }
        }
        m
    }

    /// Verifies `act(a)·act(b) = act(ab)` on every composable pair of basis elements.
    pub fn check_axioms(&self, alg: &FinAlgebra) -> bool {
        for a in 0..alg.dim() {
            for b in alg.with_dst(alg.basis[a].src) {
                let ab = alg.product(a, b);
                let lhs = self.act[a].mul(&self.act[b]);
                let rhs = self.act_elem(alg, &ab, alg.basis[a].dst, alg.basis[b].src);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// The dual `Hom_ℂ(M, ℂ)`, a right module over the opposite algebra.
    pub fn dual(&self, op: &FinAlgebra) -> FinModule {
        FinModule {
            off: self.off.clone(),
            act: self.act.iter().map(|m| m.transpose()).collect(),
            label: format!("D{}", self.label),
        }
        .checked_shape(op)
    }

    fn checked_shape(self, alg: &FinAlgebra) -> FinModule {
        debug_assert!(alg
            .basis
            .iter()
            .enumerate()
            .all(|(a, b)| self.act[a].rows == self.wdim(b.dst)));
        self
    }
}

impl ModMap {
    pub fn zero(m: &FinModule, n: &FinModule) -> ModMap {
        ModMap {
            blocks: (0..m.nw())
                .map(|x| Mat::zeros(m.wdim(x), n.wdim(x)))
                .collect(),
        }
    }

    pub fn identity(m: &FinModule) -> ModMap {
        ModMap {
            blocks: (0..m.nw()).map(|x| Mat::identity(m.wdim(x))).collect(),
        }
    }

    /// `self` followed by `g`.
    pub fn then(&self, g: &ModMap) -> ModMap {
        ModMap {
            blocks: self
                .blocks
                .iter()
                .zip(&g.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn add(&self, g: &ModMap) -> ModMap {
        ModMap {
            blocks: self
                .blocks
                .iter()
                .zip(&g.blocks)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> ModMap {
        ModMap {
            blocks: self.blocks.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    pub fn is_injective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows)
    }

    pub fn is_surjective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols)
    }

    pub fn is_iso(&self) -> bool {
        self.blocks.iter().all(dense::is_invertible)
    }

    /// Whether the blocks intertwine the generator actions.
    pub fn is_module_map(&self, alg: &FinAlgebra, m: &FinModule, n: &FinModule) -> bool {
        alg.gens.iter().all(|&g| {
            let b = alg.basis[g];
            m.act[g].mul(&self.blocks[b.src]) == self.blocks[b.dst].mul(&n.act[g])
        })
    }
}

/// Per-weight spans of a submodule.
pub type Spans = Vec<Span>;

fn gens_by_dst(alg: &FinAlgebra) -> Vec<Vec<usize>> {
    let mut v = vec![Vec::new(); alg.nv];
    for &g in &alg.gens {
        v[alg.basis[g].dst].push(g);
    }
    v
}

/// Submodule generated by weight-homogeneous vectors.
pub fn generate(alg: &FinAlgebra, m: &FinModule, seeds: Vec<(usize, SVec)>) -> Spans {
    let gbd = gens_by_dst(alg);
    let mut spans: Spans = (0..m.nw()).map(|_| Span::new()).collect();
    let mut queue = Vec::new();
    for (x, v) in seeds {
        if spans[x].insert(v.clone()) {
            queue.push((x, v));
        }
    }
    while let Some((x, v)) = queue.pop() {
        for &g in &gbd[x] {
            let y = alg.basis[g].src;
            let w = dense::svec_mat(&v, &m.act[g]);
            if !w.is_empty() && spans[y].insert(w.clone()) {
                queue.push((y, w));
            }
        }
    }
    spans
}

/// The submodule with the given per-weight spans, and its inclusion.
pub fn submodule(alg: &FinAlgebra, m: &FinModule, spans: &Spans) -> (FinModule, ModMap) {
    let rows: Vec<Vec<SVec>> = spans.iter().map(|s| s.rows().to_vec()).collect();
    let dims: Vec<usize> = rows.iter().map(|r| r.len()).collect();
    let trackers: Vec<Span> = rows
        .iter()
        .map(|r| {
            let mut t = Span::tracking();
            for v in r {
                t.insert(v.clone());
            }
            t
        })
        .collect();
    let sub = FinModule::from_all(
        alg,
        &dims,
        |g| {
            let b = alg.basis[g];
            let mut out = Mat::zeros(dims[b.dst], dims[b.src]);
            for (i, r) in rows[b.dst].iter().enumerate() {
                let w = dense::svec_mat(r, &m.act[g]);
                let c = trackers[b.src].coords(&w).expect("span is a submodule");
                for (j, x) in c {
                    out.set(i, j, x);
                }
            }
            out
        },
        &m.label,
    );
    let incl = ModMap {
        blocks: (0..m.nw())
            .map(|x| dense::from_svecs(&rows[x], m.wdim(x)))
            .collect(),
    };
    (sub, incl)
}

/// Coordinates of `M` left free by the spans (the non-pivot columns).
pub fn complement(m: &FinModule, spans: &Spans) -> Vec<Vec<usize>> {
    (0..m.nw())
        .map(|x| {
            let piv: std::collections::HashSet<usize> = spans[x].pivots().into_iter().collect();
            (0..m.wdim(x)).filter(|c| !piv.contains(c)).collect()
        })
        .collect()
}

/// Linear section `M/N → M` of the projection returned by [`quotient`].
pub fn quotient_section(m: &FinModule, spans: &Spans) -> ModMap {
    let comp = complement(m, spans);
    ModMap {
        blocks: (0..m.nw())
            .map(|x| {
                let mut b = Mat::zeros(comp[x].len(), m.wdim(x));
                for (i, &c) in comp[x].iter().enumerate() {
                    b.set(i, c, Rat::one());
                }
                b
            })
            .collect(),
    }
}

/// Rewrites a map landing inside a submodule in the submodule's coordinates.
pub fn factor_through(f: &ModMap, incl: &ModMap) -> ModMap {
    ModMap {
        blocks: f
            .blocks
            .iter()
            .zip(&incl.blocks)
            .map(|(b, i)| {
                let t = dense::row_tracker(i);
                let rows: Vec<SVec> = dense::rows(b)
                    .iter()
                    .map(|r| t.coords(r).expect("map lands in the submodule"))
                    .collect();
                dense::from_svecs(&rows, i.rows)
            })
            .collect(),
    }
}

/// `M/N` for the submodule with the given spans, and the projection.
pub fn quotient(alg: &FinAlgebra, m: &FinModule, spans: &Spans) -> (FinModule, ModMap) {
    let comp = complement(m, spans);
    let index: Vec<HashMap<usize, usize>> = comp
        .iter()
        .map(|c| c.iter().enumerate().map(|(i, &k)| (k, i)).collect())
        .collect();
    let project = |x: usize, v: &SVec| -> SVec {
        spans[x]
            .reduce(v)
            .into_iter()
            .map(|(k, c)| (index[x][&k], c))
            .collect()
    };
    let dims: Vec<usize> = comp.iter().map(|c| c.len()).collect();
    let q = FinModule::from_all(
        alg,
        &dims,
        |g| {
            let b = alg.basis[g];
            let mut out = Mat::zeros(dims[b.dst], dims[b.src]);
            for (i, &k) in comp[b.dst].iter().enumerate() {
                let w = dense::row(&m.act[g], k);
                for (j, x) in project(b.src, &w) {
                    out.set(i, j, x);
                }
            }
            out
        },
        &m.label,
    );
    let proj = ModMap {
        blocks: (0..m.nw())
            .map(|x| {
                let mut p = Mat::zeros(m.wdim(x), dims[x]);
                for i in 0..m.wdim(x) {
                    for (j, c) in project(x, &vec![(i, Rat::one())]) {
                        p.set(i, j, c);
                    }
                }
                p
            })
            .collect(),
    };
    (q, proj)
}

pub fn kernel(alg: &FinAlgebra, m: &FinModule, f: &ModMap) -> (FinModule, ModMap) {
    let spans: Spans = f
        .blocks
        .iter()
        .map(|b| {
            let mut s = Span::new();
            for v in dense::left_kernel(b) {
                s.insert(v);
            }
            s
        })
        .collect();
    submodule(alg, m, &spans)
}

pub fn image_spans(f: &ModMap) -> Spans {
    f.blocks
        .iter()
        .map(|b| {
            let mut s = Span::new();
            for r in dense::rows(b) {
                s.insert(r);
            }
            s
        })
        .collect()
}

pub fn cokernel(alg: &FinAlgebra, n: &FinModule, f: &ModMap) -> (FinModule, ModMap) {
    quotient(alg, n, &image_spans(f))
}

/// `ker g / im f` for `f: L → M`, `g: M → N` with `f·g = 0`.
pub fn homology(alg: &FinAlgebra, m: &FinModule, f: &ModMap, g: &ModMap) -> FinModule {
    let (k, incl) = kernel(alg, m, g);
    // image of f inside the kernel coordinates
    let spans: Spans = (0..m.nw())
        .map(|x| {
            let t = dense::row_tracker(&incl.blocks[x]);
            let mut s = Span::new();
            for r in dense::rows(&f.blocks[x]) {
                s.insert(t.coords(&r).expect("f·g = 0"));
            }
            s
        })
        .collect();
    quotient(alg, &k, &spans).0
}

/// `Hom_A(M, N)` as a list of homomorphisms.
pub fn hom(alg: &FinAlgebra, m: &FinModule, n: &FinModule) -> Vec<ModMap> {
    let nw = m.nw();
    let mut voff = vec![0];
    for x in 0..nw {
        voff.push(voff[x] + m.wdim(x) * n.wdim(x));
    }
    let var = |x: usize, i: usize, j: usize| voff[x] + i * n.wdim(x) + j;
    let mut eqs = Vec::new();
    for &g in &alg.gens {
        let b = alg.basis[g];
        let (y, z) = (b.dst, b.src);
        let (am, an) = (&m.act[g], &n.act[g]);
        // (am · F_z − F_y · an)[i][j] = 0 for i ∈ M e_y, j ∈ N e_z
        for i in 0..m.wdim(y) {
            for j in 0..n.wdim(z) {
                let mut row = Vec::new();
                for k in 0..m.wdim(z) {
                    let c = am.get(i, k);
                    if !c.is_zero() {
                        row.push((var(z, k, j), c.clone()));
                    }
                }
                for l in 0..n.wdim(y) {
                    let c = an.get(l, j);
                    if !c.is_zero() {
                        row.push((var(y, i, l), -c));
                    }
                }
                let row = linalg::normalize(row);
                if !row.is_empty() {
                    eqs.push(row);
                }
            }
        }
    }
    let ker = linalg::kernel(voff[nw], eqs);
    ker.into_iter()
        .map(|v| {
            let mut blocks: Vec<Mat> = (0..nw).map(|x| Mat::zeros(m.wdim(x), n.wdim(x))).collect();
            for (k, c) in v {
                let x = (0..nw).find(|&x| k < voff[x + 1]).unwrap();
                let r = k - voff[x];
                blocks[x].set(r / n.wdim(x), r % n.wdim(x), c);
            }
            ModMap { blocks }
        })
        .collect()
}

/// `M·rad A`.
pub fn radical_spans(alg: &FinAlgebra, m: &FinModule) -> Spans {
    let mut seeds = Vec::new();
    for &g in &alg.gens {
        let b = alg.basis[g];
        for r in dense::rows(&m.act[g]) {
            if !r.is_empty() {
                seeds.push((b.src, r));
            }
        }
    }
    generate(alg, m, seeds)
}

/// Multiplicities of the simples in the top `M/M·rad A`.
pub fn top_dims(alg: &FinAlgebra, m: &FinModule) -> Vec<usize> {
    let r = radical_spans(alg, m);
    (0..m.nw()).map(|x| m.wdim(x) - r[x].rank()).collect()
}

/// Multiplicities of the simples in the socle.
pub fn socle_dims(alg: &FinAlgebra, m: &FinModule) -> Vec<usize> {
    (0..m.nw())
        .map(|x| {
            let stacked: Vec<Mat> = alg
                .gens
                .iter()
                .filter(|&&g| alg.basis[g].dst == x)
                .map(|&g| m.act[g].clone())
                .collect();
            let mut eqs = Vec::new();
            for a in &stacked {
                for j in 0..a.cols {
                    eqs.push(linalg::sparse(
                        &(0..a.rows).map(|i| a.get(i, j).clone()).collect::<Vec<_>>(),
                    ));
                }
            }
            linalg::kernel(m.wdim(x), eqs).len()
        })
        .collect()
}

/// Composition-factor multiplicities (weight dimensions, since simples are one-dimensional).
pub fn composition_factors(m: &FinModule) -> Vec<usize> {
    m.wdims()
}

/// `P(y) = e_y A`, with basis the elements with `dst = y`, grouped by `src`.
pub fn regular_projective(alg: &FinAlgebra, y: usize) -> FinModule {
    let dims: Vec<usize> = (0..alg.nv).map(|z| alg.by_pair[z][y].len()).collect();
    let act = alg
        .basis
        .iter()
        .enumerate()
        .map(|(a, b)| {
            let mut m = Mat::zeros(dims[b.dst], dims[b.src]);
            for (i, &c) in alg.by_pair[b.dst][y].iter().enumerate() {
                for (k, x) in alg.product(c, a) {
                    m.set(i, alg.pos[k], x);
                }
            }
            m
        })
        .collect();
    FinModule {
        off: offsets(&dims),
        act,
        label: format!("P({})", alg.names[y]),
    }
}

/// `L(x)`: one-dimensional, concentrated in weight `x`.
pub fn simple(alg: &FinAlgebra, x: usize) -> FinModule {
    let mut dims = vec![0; alg.nv];
    dims[x] = 1;
    FinModule::from_gens(
        alg,
        &dims,
        |g| Mat::zeros(dims[alg.basis[g].dst], dims[alg.basis[g].src]),
        &format!("L({})", alg.names[x]),
    )
}

/// Block layout of a direct sum: `starts[x][i]` is where summand `i` begins in weight `x`.
#[derive(Debug, Clone)]
pub struct SumLayout {
    pub starts: Vec<Vec<usize>>,
}

pub fn direct_sum(alg: &FinAlgebra, mods: &[&FinModule]) -> (FinModule, SumLayout) {
    let nw = alg.nv;
    let mut starts = vec![Vec::with_capacity(mods.len()); nw];
    let mut dims = vec![0; nw];
    for (x, st) in starts.iter_mut().enumerate() {
        for m in mods {
            st.push(dims[x]);
            dims[x] += m.wdim(x);
        }
    }
    let act = alg
        .basis
        .iter()
        .enumerate()
        .map(|(a, b)| {
            let mut out = Mat::zeros(dims[b.dst], dims[b.src]);
            for (i, m) in mods.iter().enumerate() {
                dense::add_block(
                    &mut out,
                    starts[b.dst][i],
                    starts[b.src][i],
                    &m.act[a],
                    &Rat::one(),
                );
            }
            out
        })
        .collect();
    let label = mods
        .iter()
        .map(|m| m.label.as_str())
        .collect::<Vec<_>>()
        .join("⊕");
    (
        FinModule {
            off: offsets(&dims),
            act,
            label,
        },
        SumLayout { starts },
    )
}

/// A map between direct sums assembled from component maps `(i → j, f)`.
pub fn sum_map(
    src: &FinModule,
    sl: &SumLayout,
    dst: &FinModule,
    dl: &SumLayout,
    parts: &[(usize, usize, ModMap)],
) -> ModMap {
    let mut blocks: Vec<Mat> = (0..src.nw())
        .map(|x| Mat::zeros(src.wdim(x), dst.wdim(x)))
        .collect();
    for (i, j, f) in parts {
        for (x, b) in blocks.iter_mut().enumerate() {
            dense::add_block(
                b,
                sl.starts[x][*i],
                dl.starts[x][*j],
                &f.blocks[x],
                &Rat::one(),
            );
        }
    }
    ModMap { blocks }
}

/// `⊕_j P(y_j)`, with helpers translating between vectors and algebra elements.
#[derive(Debug, Clone)]
pub struct ProjSum {
    pub weights: Vec<usize>,
    pub module: FinModule,
    pub layout: SumLayout,
}

impl ProjSum {
    pub fn new(alg: &FinAlgebra, weights: Vec<usize>) -> ProjSum {
        let ps: Vec<FinModule> = weights
            .iter()
            .map(|&y| regular_projective(alg, y))
            .collect();
        let refs: Vec<&FinModule> = ps.iter().collect();
        let (module, layout) = direct_sum(alg, &refs);
        ProjSum {
            weights,
            module,
            layout,
        }
    }

    /// Splits a weight-`z` vector into `(j, Σ c·a)` with `a ∈ e_{y_j} A e_z`.
    pub fn decode(&self, alg: &FinAlgebra, z: usize, v: &SVec) -> Vec<(usize, SVec)> {
        let mut out: Vec<(usize, SVec)> = Vec::new();
        for (k, c) in v {
            let j = (0..self.weights.len())
                .rev()
                .find(|&j| self.layout.starts[z][j] <= *k)
                .unwrap();
            let a = alg.by_pair[z][self.weights[j]][k - self.layout.starts[z][j]];
            match out.last_mut() {
                Some((jj, e)) if *jj == j => e.push((a, c.clone())),
                _ => out.push((j, vec![(a, c.clone())])),
            }
        }
        out
    }

    /// Vector of `g_j · elem` in weight `z` (only terms with `src = z` contribute).
    pub fn encode(&self, alg: &FinAlgebra, z: usize, parts: &[(usize, SVec)]) -> SVec {
        let mut out = Vec::new();
        for (j, elem) in parts {
            let y = self.weights[*j];
            for (a, c) in elem {
                let b = alg.basis[*a];
                if b.src == z && b.dst == y {
                    out.push((self.layout.starts[z][*j] + alg.pos[*a], c.clone()));
                }
            }
        }
        linalg::normalize(out)
    }
}

/// A projective cover `⊕ P(y_j) ↠ M` with chosen top lifts.
#[derive(Debug, Clone)]
pub struct Cover {
    pub proj: ProjSum,
    pub lifts: Vec<SVec>,
    pub map: ModMap,
    trackers: Vec<Span>,
}

impl Cover {
    pub fn new(alg: &FinAlgebra, m: &FinModule) -> Cover {
        let rad = radical_spans(alg, m);
        let mut weights = Vec::new();
        let mut lifts = Vec::new();
        for (x, r) in rad.iter().enumerate() {
            let piv: std::collections::HashSet<usize> = r.pivots().into_iter().collect();
            for c in (0..m.wdim(x)).filter(|c| !piv.contains(c)) {
                weights.push(x);
                lifts.push(vec![(c, Rat::one())]);
            }
        }
        let proj = ProjSum::new(alg, weights.clone());
        let blocks: Vec<Mat> = (0..alg.nv)
            .map(|z| {
                let mut b = Mat::zeros(proj.module.wdim(z), m.wdim(z));
                for (j, &y) in weights.iter().enumerate() {
                    for (i, &c) in alg.by_pair[z][y].iter().enumerate() {
                        let img = dense::svec_mat(&lifts[j], &m.act[c]);
                        for (k, x) in img {
                            b.set(proj.layout.starts[z][j] + i, k, x);
                        }
                    }
                }
                b
            })
            .collect();
        let trackers = blocks.iter().map(dense::row_tracker).collect();
        Cover {
            proj,
            lifts,
            map: ModMap { blocks },
            trackers,
        }
    }

    pub fn is_iso(&self) -> bool {
        self.map.is_iso()
    }

    /// Some preimage of a weight-`z` vector, as `(j, algebra element)` terms.
    pub fn preimage(&self, alg: &FinAlgebra, z: usize, v: &SVec) -> Vec<(usize, SVec)> {
        let c = self.trackers[z].coords(v).expect("cover is surjective");
        // tracker rows are the rows of the block, inserted in order
        self.proj.decode(alg, z, &c)
    }
}

/// Outcome of an isomorphism test.
#[derive(Debug, Clone)]
pub enum IsoVerdict {
    Iso(ModMap),
    NotIso(String),
    Indeterminate,
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Iso(_))
    }
}

fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Searches `Hom(M, N)` for an invertible element: single basis maps, sums of
/// up to three, then a deterministic coefficient sweep.
pub fn isomorphic(alg: &FinAlgebra, m: &FinModule, n: &FinModule) -> IsoVerdict {
    if m.wdims() != n.wdims() {
        return IsoVerdict::NotIso("weight dimensions differ".into());
    }
    if top_dims(alg, m) != top_dims(alg, n) {
        return IsoVerdict::NotIso("tops differ".into());
    }
    if socle_dims(alg, m) != socle_dims(alg, n) {
        return IsoVerdict::NotIso("socles differ".into());
    }
    let h = hom(alg, m, n);
    if m.dim() == 0 {
        return IsoVerdict::Iso(ModMap::zero(m, n));
    }
    if h.is_empty() {
        return IsoVerdict::NotIso("no homomorphisms".into());
    }
    if hom(alg, n, m).len() != h.len() {
        return IsoVerdict::NotIso("hom dimensions are asymmetric".into());
    }
    for k in 1..=3.min(h.len()) {
        for c in combos(h.len(), k) {
            let mut f = h[c[0]].clone();
            for &i in &c[1..] {
                f = f.add(&h[i]);
            }
            if f.is_iso() {
                return IsoVerdict::Iso(f);
            }
        }
    }
    for t in 0..64i64 {
        let mut f = h[0].scale(&Rat::int(1 + t));
        for (i, g) in h.iter().enumerate().skip(1) {
            let c = ((i as i64 + 2) * (t + 3) * (t + 7 * i as i64 + 1)) % 101 - 50;
            f = f.add(&g.scale(&Rat::int(c)));
        }
        if f.is_iso() {
            return IsoVerdict::Iso(f);
        }
    }
    IsoVerdict::Indeterminate
}
