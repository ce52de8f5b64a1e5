//! The basic algebra `A = End_Z(⊕ B(x)) ⊗_S ℂ` with exact structure constants.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polylin::{linalg, SVec, Span};
use crate::rat::Rat;
use crate::zmod::{ZContext, ZHomBasis};

/// A basis element: the image of a homogeneous generator of `Hom_Z(B(src), B(dst))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct BasisElt {
    pub src: usize,
    pub dst: usize,
    pub degree: i32,
}

/// A finite-dimensional algebra with a complete set of orthogonal idempotents
/// indexed by vertices; the product `a·b` is composition `a ∘ b`.
#[derive(Debug, Clone)]
pub struct FinAlgebra {
    pub nv: usize,
    pub names: Vec<String>,
    pub basis: Vec<BasisElt>,
    /// `by_pair[src][dst]`: basis elements in `e_dst A e_src`.
    pub by_pair: Vec<Vec<Vec<usize>>>,
    /// Position of each basis element inside its `by_pair` list.
    pub pos: Vec<usize>,
    pub idem: Vec<usize>,
    /// Complement of `rad²` in `rad`, spanned by basis elements.
    pub gens: Vec<usize>,
    mult: HashMap<(usize, usize), SVec>,
    /// Non-generator radical elements in increasing degree, each written as `Σ c·(g·b)`.
    order: Vec<usize>,
    expr: HashMap<usize, Vec<(usize, usize, Rat)>>,
}

impl FinAlgebra {
    /// Assembles an algebra from its structure constants and checks the grading
    /// assertion (degree-zero part spanned by the idempotents).
    pub fn from_table(
        names: Vec<String>,
        basis: Vec<BasisElt>,
        idem: Vec<usize>,
        mult: HashMap<(usize, usize), SVec>,
    ) -> Result<FinAlgebra> {
        let nv = names.len();
        let mut by_pair = vec![vec![Vec::new(); nv]; nv];
        let mut pos = vec![0; basis.len()];
        for (k, b) in basis.iter().enumerate() {
            pos[k] = by_pair[b.src][b.dst].len();
            by_pair[b.src][b.dst].push(k);
        }
        for (k, b) in basis.iter().enumerate() {
            let is_idem = idem.contains(&k);
            if (b.degree <= 0) != is_idem || b.degree < 0 {
                return Err(Error::GradingAssertFailed);
            }
        }
        let mut alg = FinAlgebra {
            nv,
            names,
            basis,
            by_pair,
            pos,
            idem,
            gens: Vec::new(),
            mult,
            order: Vec::new(),
            expr: HashMap::new(),
        };
        alg.find_generators()?;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.basis[a].degree == 0
    }

    /// Product of two basis elements.
    pub fn product(&self, a: usize, b: usize) -> SVec {
        if self.basis[a].src != self.basis[b].dst {
            return Vec::new();
        }
        if self.is_idempotent(a) {
            return vec![(b, Rat::one())];
        }
        if self.is_idempotent(b) {
            return vec![(a, Rat::one())];
        }
        self.mult.get(&(a, b)).cloned().unwrap_or_default()
    }

    /// Product of two elements.
    pub fn mul(&self, x: &SVec, y: &SVec) -> SVec {
        let mut out = Vec::new();
        for (a, c) in x {
            for (b, d) in y {
                let cd = c * d;
                for (k, e) in self.product(*a, *b) {
                    out.push((k, &cd * &e));
                }
            }
        }
        linalg::normalize(out)
    }

    pub fn max_degree(&self) -> i32 {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    /// Non-generator radical elements, in an order where every expression
    /// only refers to earlier elements, generators or idempotents.
    pub fn derived_order(&self) -> &[usize] {
        &self.order
    }

    pub fn expression(&self, a: usize) -> &[(usize, usize, Rat)] {
        &self.expr[&a]
    }

    fn find_generators(&mut self) -> Result<()> {
        let rad: Vec<usize> = (0..self.dim())
            .filter(|&a| !self.is_idempotent(a))
            .collect();
        let mut rad2 = Span::new();
        for &a in &rad {
            for &b in &rad {
                let p = self.product(a, b);
                if !p.is_empty() {
                    rad2.insert(p);
                }
            }
        }
        let mut sorted = rad.clone();
        sorted.sort_by_key(|&a| (self.basis[a].degree, a));
        let mut span = rad2;
        for &a in &sorted {
            if span.insert(vec![(a, Rat::one())]) {
                self.gens.push(a);
            }
        }
        // express the remaining elements degree by degree
        for &a in &sorted {
            if self.gens.contains(&a) {
                continue;
            }
            let d = self.basis[a].degree;
            let mut cands: Vec<(usize, usize)> = Vec::new();
            let mut s = Span::tracking();
            for &g in &self.gens {
                let dg = self.basis[g].degree;
                if dg > d {
                    continue;
                }
                for b in 0..self.dim() {
                    if self.basis[b].degree == d - dg && self.basis[b].dst == self.basis[g].src {
                        let p = self.product(g, b);
                        if !p.is_empty() {
                            cands.push((g, b));
                            s.insert(p);
                        }
                    }
                }
            }
            let c = s.coords(&vec![(a, Rat::one())]).ok_or_else(|| {
                Error::NonAssociative(format!("basis element {a} is not generated in degree {d}"))
            })?;
            self.expr.insert(
                a,
                c.into_iter()
                    .map(|(i, x)| (cands[i].0, cands[i].1, x))
                    .collect(),
            );
            self.order.push(a);
        }
        Ok(())
    }

    /// Checks `(ab)c = a(bc)` on all composable basis triples and the idempotent relations.
    pub fn check_associative(&self) -> Result<()> {
        let bad = (0..self.dim()).into_par_iter().find_map_any(|a| {
            for b in &self.with_dst(self.basis[a].src) {
                let ab = self.product(a, *b);
                for c in &self.with_dst(self.basis[*b].src) {
                    let bc = self.product(*b, *c);
                    let l = self.mul(&ab, &vec![(*c, Rat::one())]);
                    let r = self.mul(&vec![(a, Rat::one())], &bc);
                    if l != r {
                        return Some(format!("({a}·{b})·{c}"));
                    }
                }
            }
            None
        });
        if let Some(t) = bad {
            return Err(Error::NonAssociative(t));
        }
        for (x, &e) in self.idem.iter().enumerate() {
            if self.basis[e].src != x || self.basis[e].dst != x {
                return Err(Error::NonAssociative(format!("idempotent {x} misplaced")));
            }
        }
        Ok(())
    }

    /// Basis elements with `dst = y`.
    pub fn with_dst(&self, y: usize) -> Vec<usize> {
        (0..self.nv)
            .flat_map(|z| self.by_pair[z][y].iter().copied())
            .collect()
    }

    /// The radical: positive-degree part, verified nilpotent.
    pub fn radical(&self) -> Result<Vec<usize>> {
        let rad: Vec<usize> = (0..self.dim())
            .filter(|&a| !self.is_idempotent(a))
            .collect();
        let mut power: Vec<SVec> = rad.iter().map(|&a| vec![(a, Rat::one())]).collect();
        for _ in 0..=self.max_degree() + 1 {
            if power.is_empty() {
                return Ok(rad);
            }
            let mut next = Span::new();
            for p in &power {
                for &a in &rad {
                    let q = self.mul(p, &vec![(a, Rat::one())]);
                    if !q.is_empty() {
                        next.insert(q);
                    }
                }
            }
            power = next.rows().to_vec();
        }
        Err(Error::RadicalNotNilpotent)
    }

    /// The radical as `{a : tr(L_{ab}) = 0 for all b}`, valid in characteristic 0
    /// without any grading assumption.
    pub fn trace_radical(&self) -> Vec<SVec> {
        let n = self.dim();
        // trace of left multiplication by basis element k
        let tr: Vec<Rat> = (0..n)
            .map(|k| {
                let mut t = Rat::zero();
                for c in 0..n {
                    for (i, x) in self.product(k, c) {
                        if i == c {
                            t += &x;
                        }
                    }
                }
                t
            })
            .collect();
        let eqs = (0..n).map(|b| {
            let row: Vec<(usize, Rat)> = (0..n)
                .map(|a| {
                    let mut t = Rat::zero();
                    for (k, x) in self.product(a, b) {
                        t += &(&x * &tr[k]);
                    }
                    (a, t)
                })
                .filter(|e| !e.1.is_zero())
                .collect();
            row
        });
        linalg::kernel(n, eqs)
    }

    /// The opposite algebra on the same basis, with `src` and `dst` exchanged.
    pub fn opposite(&self) -> Result<FinAlgebra> {
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElt {
                src: b.dst,
                dst: b.src,
                degree: b.degree,
            })
            .collect();
        let mult = self
            .mult
            .iter()
            .map(|(&(a, b), v)| ((b, a), v.clone()))
            .collect();
        FinAlgebra::from_table(self.names.clone(), basis, self.idem.clone(), mult)
    }

    /// `Σ_{x ∈ set} e_x`.
    pub fn idempotent_sum(&self, set: &[usize]) -> SVec {
        let mut v: SVec = set.iter().map(|&x| (self.idem[x], Rat::one())).collect();
        v.sort_by_key(|e| e.0);
        v
    }

    /// Basis of the two-sided ideal `A e A` for `e = Σ_{x ∈ set} e_x`, as a span of elements.
    pub fn ideal_of(&self, set: &[usize]) -> Span {
        let mut span = Span::new();
        for &x in set {
            let left: Vec<usize> = (0..self.nv)
                .flat_map(|y| self.by_pair[x][y].iter().copied())
                .collect();
            let right = self.with_dst(x);
            for &c in &left {
                for &d in &right {
                    let p = self.product(c, d);
                    if !p.is_empty() {
                        span.insert(p);
                    }
                }
            }
        }
        span
    }
}

/// The algebra together with the `Z`-level homomorphism bases it was reduced from.
pub struct BuiltAlgebra {
    pub alg: FinAlgebra,
    /// `homs[src][dst]` with generator `k` mapped to basis element `by_pair[src][dst][k]`.
    pub homs: Vec<Vec<ZHomBasis>>,
}

/// Builds `A` from all `B(x)` on the context's moment graph.
pub fn build_algebra(ctx: &ZContext) -> Result<BuiltAlgebra> {
    let g = &ctx.graph;
    let nv = g.len();
    let names: Vec<String> = (0..nv).map(|v| g.name(v)).collect();
    let bs: Vec<_> = (0..nv).map(|x| ctx.b(x)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|s| (0..nv).map(move |d| (s, d))).collect();
    let mut flat: Vec<ZHomBasis> = pairs
        .par_iter()
        .map(|&(s, d)| ctx.hom(&bs[s], &bs[d]))
        .collect::<Result<Vec<_>>>()?;
    // normalize identities
    for x in 0..nv {
        let h = &mut flat[x * nv + x];
        let zero: Vec<usize> = h.in_degree(0);
        if zero.len() != 1 || h.gens.iter().any(|f| f.degree < 0) {
            return Err(Error::GradingAssertFailed);
        }
        let k = zero[0];
        let c = h.gens[k].matrix[0][0].coeff(crate::polylin::Mono::ONE);
        if c.is_zero() {
            return Err(Error::GradingAssertFailed);
        }
        h.rescale(k, &c.recip());
        let r = h.gens[k].matrix.len();
        let id = crate::zmod::pmat_identity(g.nvars(), r);
        if h.gens[k].matrix != id {
            return Err(Error::GradingAssertFailed);
        }
    }
    for (i, h) in flat.iter().enumerate() {
        let (s, d) = pairs[i];
        if h.len() != h.expected_rank {
            return Err(Error::Invalid(format!(
                "Hom_Z(B({}), B({})) has rank {} not {}",
                names[s],
                names[d],
                h.len(),
                h.expected_rank
            )));
        }
        if s != d && h.gens.iter().any(|f| f.degree <= 0) {
            return Err(Error::GradingAssertFailed);
        }
    }
    let mut basis = Vec::new();
    let mut index: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); nv]; nv];
    for &(s, d) in &pairs {
        for f in &flat[s * nv + d].gens {
            index[s][d].push(basis.len());
            basis.push(BasisElt {
                src: s,
                dst: d,
                degree: f.degree,
            });
        }
    }
    let idem: Vec<usize> = (0..nv)
        .map(|x| index[x][x][flat[x * nv + x].in_degree(0)[0]])
        .collect();
    let n = g.nvars();
    let all: Vec<usize> = (0..basis.len()).filter(|k| !idem.contains(k)).collect();
    let products: Vec<Vec<((usize, usize), SVec)>> = all
        .par_iter()
        .map(|&a| -> Result<Vec<((usize, usize), SVec)>> {
            let ba = basis[a];
            let fa = &flat[ba.src * nv + ba.dst].gens[a - index[ba.src][ba.dst][0]];
            let mut out = Vec::new();
            for z in 0..nv {
                for (kb, &b) in index[z][ba.src].iter().enumerate() {
                    if idem.contains(&b) {
                        continue;
                    }
                    let fb = &flat[z * nv + ba.src].gens[kb];
                    let comp = fa.compose(fb, n);
                    let target = &flat[z * nv + ba.dst];
                    let red = target.reduce(&comp.matrix, comp.degree).ok_or_else(|| {
                        Error::NonAssociative(format!("composite {a}·{b} leaves Hom_Z"))
                    })?;
                    let v: SVec = red
                        .into_iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(k, x)| (index[z][ba.dst][k], x))
                        .collect();
                    if !v.is_empty() {
                        out.push(((a, b), v));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mult: HashMap<(usize, usize), SVec> = products.into_iter().flatten().collect();
    let alg = FinAlgebra::from_table(names, basis, idem, mult)?;
    alg.check_associative()?;
    let mut homs: Vec<Vec<ZHomBasis>> = Vec::with_capacity(nv);
    let mut it = flat.into_iter();
    for _ in 0..nv {
        homs.push((0..nv).map(|_| it.next().unwrap()).collect());
    }
    Ok(BuiltAlgebra { alg, homs })
}
