//! The principal block as a whole: standard modules, functors and the checks
//! relating them.

use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::algebra::{build_algebra, BuiltAlgebra, FinAlgebra};
use super::bimodule::{adjunction_counit, adjunction_unit, tensor, Bimodule, HomApplied};
use super::homological::{
    chain_homology, derived_tensor, ext_dims, rhom_from_complex, rhom_into_complex,
};
use super::module::{
    cokernel, generate, hom, isomorphic, kernel, quotient, regular_projective, simple, top_dims,
    FinModule, IsoVerdict, ModMap,
};
use super::resolution::{resolve, Resolution};
use super::zbridge::{verma_module, z_bimodule, ZFunctor};
use crate::coxeter::Group;
use crate::error::{Error, Result};
use crate::momentgraph::MomentGraph;
use crate::polylin::Span;
use crate::zmod::ZContext;

/// `φ_s(M)` with its unit, counit and `V*` operators.
pub struct PhiApplied {
    pub module: FinModule,
    pub unit: ModMap,
    pub counit: ModMap,
    pub vstar: Vec<ModMap>,
}

/// `dim Hom(M(x), M(y))` and whether the basis map is injective.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VermaHomEntry {
    pub src: String,
    pub dst: String,
    pub dim: usize,
    pub injective: bool,
}

/// Ranks along `0 → A → A'_φ → A → A/J_s → 0`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FourTerm {
    pub dim_a: usize,
    pub dim_a_phi: usize,
    pub dim_j: usize,
    pub rank_unit: usize,
    pub rank_counit: usize,
    pub composite_zero: bool,
    pub image_is_j: bool,
}

impl FourTerm {
    pub fn exact(&self) -> bool {
        self.rank_unit == self.dim_a
            && self.rank_counit + self.rank_unit == self.dim_a_phi
            && self.rank_counit == self.dim_j
            && self.composite_zero
            && self.image_is_j
            && self.dim_a_phi == self.dim_a + self.dim_j
    }
}

/// `θ_s` on `P(x)` and `L(x)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TranslationRow {
    pub x: String,
    pub xs_less: bool,
    /// Multiplicity of each `P(y)` in `θ_s P(x)`, by vertex name.
    pub summands: BTreeMap<String, usize>,
    pub projective: bool,
    /// `θ_sP(x) ≅ P(x)⊕P(x)` when `xs < x`; `P(xs)` once plus Bruhat-smaller summands otherwise.
    pub shape_ok: bool,
    pub simple_killed: bool,
    pub tensor_agrees: bool,
}

impl TranslationRow {
    pub fn ok(&self) -> bool {
        self.projective && self.shape_ok && self.tensor_agrees && self.simple_killed != self.xs_less
    }
}

pub struct CategoryO {
    pub ctx: Arc<ZContext>,
    pub built: BuiltAlgebra,
    pub max_len: usize,
    op: OnceLock<FinAlgebra>,
    theta: Vec<OnceLock<Arc<Bimodule>>>,
    phi: Vec<OnceLock<Arc<Bimodule>>>,
    ideal: Vec<OnceLock<(Arc<Bimodule>, Arc<Bimodule>)>>,
    vermas: Vec<OnceLock<FinModule>>,
    resolutions: Mutex<HashMap<u64, Arc<Resolution>>>,
}

/// Content hash of a module, used to memoize resolutions.
pub fn fingerprint(m: &FinModule) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    m.off.hash(&mut h);
    for a in &m.act {
        for i in 0..a.rows {
            a.row(i).hash(&mut h);
        }
    }
    h.finish()
}

impl CategoryO {
    pub fn new(ctx: Arc<ZContext>) -> Result<CategoryO> {
        let built = build_algebra(&ctx)?;
        let nv = built.alg.nv;
        let rank = ctx.graph.group.sys.rank;
        let top = (0..nv).map(|v| ctx.graph.length(v)).max().unwrap_or(0);
        Ok(CategoryO {
            ctx,
            built,
            max_len: 2 * top + 2,
            op: OnceLock::new(),
            theta: (0..rank).map(|_| OnceLock::new()).collect(),
            phi: (0..rank).map(|_| OnceLock::new()).collect(),
            ideal: (0..rank).map(|_| OnceLock::new()).collect(),
            vermas: (0..nv).map(|_| OnceLock::new()).collect(),
            resolutions: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_group(group: Arc<Group>, margin: i32) -> Result<CategoryO> {
        let graph = Arc::new(MomentGraph::full(group)?);
        CategoryO::new(Arc::new(ZContext::new(graph, margin)?))
    }

    pub fn alg(&self) -> &FinAlgebra {
        &self.built.alg
    }

    pub fn op(&self) -> Result<&FinAlgebra> {
        if let Some(o) = self.op.get() {
            return Ok(o);
        }
        let o = self.alg().opposite()?;
        Ok(self.op.get_or_init(|| o))
    }

    pub fn nv(&self) -> usize {
        self.alg().nv
    }

    pub fn rank(&self) -> usize {
        self.ctx.graph.group.sys.rank
    }

    pub fn name(&self, x: usize) -> &str {
        &self.alg().names[x]
    }

    pub fn length(&self, x: usize) -> usize {
        self.ctx.graph.length(x)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.ctx.graph.leq(a, b)
    }

    /// Vertex of a word in generator indices (0-based).
    pub fn vertex(&self, word: &[usize]) -> Result<usize> {
        let g = &self.ctx.graph.group;
        g.from_word(word)
            .and_then(|e| self.ctx.graph.position(e))
            .ok_or_else(|| Error::Invalid("word outside the vertex set".into()))
    }

    pub fn identity(&self) -> usize {
        self.ctx
            .graph
            .position(self.ctx.graph.group.identity())
            .unwrap()
    }

    /// `sx`.
    pub fn left_mul(&self, s: usize, x: usize) -> usize {
        let g = &self.ctx.graph.group;
        self.ctx
            .graph
            .position(g.left_mul_gen(s, self.ctx.graph.element(x)).unwrap())
            .unwrap()
    }

    /// `xs`.
    pub fn right_mul(&self, x: usize, s: usize) -> usize {
        let g = &self.ctx.graph.group;
        self.ctx
            .graph
            .position(g.right_mul_gen(self.ctx.graph.element(x), s).unwrap())
            .unwrap()
    }

    /// `{x : sx < x}`.
    pub fn left_descents(&self, s: usize) -> Vec<usize> {
        (0..self.nv())
            .filter(|&x| self.length(self.left_mul(s, x)) < self.length(x))
            .collect()
    }

    pub fn projective(&self, x: usize) -> FinModule {
        regular_projective(self.alg(), x)
    }

    pub fn simple(&self, x: usize) -> FinModule {
        simple(self.alg(), x)
    }

    pub fn verma(&self, x: usize) -> Result<FinModule> {
        if let Some(m) = self.vermas[x].get() {
            return Ok(m.clone());
        }
        let m = verma_module(&self.ctx, &self.built, x)?;
        Ok(self.vermas[x].get_or_init(|| m).clone())
    }

    fn cached(
        &self,
        cell: &OnceLock<Arc<Bimodule>>,
        make: impl FnOnce() -> Result<Bimodule>,
    ) -> Result<Arc<Bimodule>> {
        if let Some(b) = cell.get() {
            return Ok(b.clone());
        }
        let b = Arc::new(make()?);
        Ok(cell.get_or_init(|| b).clone())
    }

    pub fn theta_bimodule(&self, s: usize) -> Result<Arc<Bimodule>> {
        self.cached(&self.theta[s], || {
            z_bimodule(&self.ctx, &self.built, ZFunctor::Theta(s))
        })
    }

    pub fn phi_bimodule(&self, s: usize) -> Result<Arc<Bimodule>> {
        self.cached(&self.phi[s], || {
            z_bimodule(&self.ctx, &self.built, ZFunctor::Phi(s))
        })
    }

    /// `J_s = A(Σ_{sx<x} e_x)A` and `A/J_s` as bimodules.
    pub fn ideal_bimodules(&self, s: usize) -> (Arc<Bimodule>, Arc<Bimodule>) {
        self.ideal[s]
            .get_or_init(|| {
                let alg = self.alg();
                let span = alg.ideal_of(&self.left_descents(s));
                let spans = Bimodule::ideal_spans(alg, &span);
                let reg = Bimodule::regular(alg);
                let j = reg.sub(alg, &spans, &format!("J{}", s + 1));
                let q = reg.quotient(alg, &spans, &format!("A/J{}", s + 1));
                (Arc::new(j), Arc::new(q))
            })
            .clone()
    }

    pub fn theta(&self, s: usize, m: &FinModule) -> Result<FinModule> {
        let x = self.theta_bimodule(s)?;
        Ok(HomApplied::new(self.alg(), &x, m)
            .module
            .with_label(&format!("θ{}{}", s + 1, m.label)))
    }

    /// `M ⊗_A A'_θ`, the tensor description of `θ_s`.
    pub fn theta_tensor(&self, s: usize, m: &FinModule) -> Result<FinModule> {
        let x = self.theta_bimodule(s)?;
        Ok(tensor(self.alg(), m, &x).module)
    }

    pub fn phi(&self, s: usize, m: &FinModule) -> Result<PhiApplied> {
        let x = self.phi_bimodule(s)?;
        let alg = self.alg();
        let h = HomApplied::new(alg, &x, m);
        let unit = h.from_module(alg, &x, m);
        let counit = h.to_module(alg, &x, m);
        let vstar = h.vstar(alg, &x, m);
        Ok(PhiApplied {
            module: h.module.with_label(&format!("φ{}{}", s + 1, m.label)),
            unit,
            counit,
            vstar,
        })
    }

    /// `τ_s(M) = M / Σ_{sx<x} M e_x A`.
    pub fn tau(&self, s: usize, m: &FinModule) -> FinModule {
        let alg = self.alg();
        let mut seeds = Vec::new();
        for x in self.left_descents(s) {
            for i in 0..m.wdim(x) {
                seeds.push((x, vec![(i, crate::rat::Rat::one())]));
            }
        }
        let spans = generate(alg, m, seeds);
        quotient(alg, m, &spans)
            .0
            .with_label(&format!("τ{}{}", s + 1, m.label))
    }

    /// `T_s(M) = M ⊗_A J_s`.
    pub fn twist(&self, s: usize, m: &FinModule) -> FinModule {
        let (j, _) = self.ideal_bimodules(s);
        tensor(self.alg(), m, &j)
            .module
            .with_label(&format!("T{}{}", s + 1, m.label))
    }

    /// `C_s(M) = Hom_A(J_s, M)`.
    pub fn cotwist(&self, s: usize, m: &FinModule) -> FinModule {
        let (j, _) = self.ideal_bimodules(s);
        HomApplied::new(self.alg(), &j, m)
            .module
            .with_label(&format!("C{}{}", s + 1, m.label))
    }

    /// `Cok(M → φ_s M)`, with the `V*` operators required to vanish.
    pub fn twist_via_phi(&self, s: usize, m: &FinModule) -> Result<FinModule> {
        let p = self.phi(s, m)?;
        let alg = self.alg();
        let (q, proj) = cokernel(alg, &p.module, &p.unit);
        let sec = super::module::quotient_section(&p.module, &super::module::image_spans(&p.unit));
        for v in &p.vstar {
            if !sec.then(v).then(&proj).is_zero() {
                return Err(Error::RouteMismatch(format!(
                    "V* acts on Cok(η) for {}",
                    m.label
                )));
            }
        }
        if !q.check_axioms(alg) {
            return Err(Error::RouteMismatch(format!(
                "Cok(η) is not an A-module for {}",
                m.label
            )));
        }
        Ok(q)
    }

    /// `Ker(φ_s M → M)`, with the `V*` operators required to vanish.
    pub fn cotwist_via_phi(&self, s: usize, m: &FinModule) -> Result<FinModule> {
        let p = self.phi(s, m)?;
        let alg = self.alg();
        let (k, incl) = kernel(alg, &p.module, &p.counit);
        for v in &p.vstar {
            if !incl.then(v).is_zero() {
                return Err(Error::RouteMismatch(format!(
                    "V* acts on Ker(ε) for {}",
                    m.label
                )));
            }
        }
        if !k.check_axioms(alg) {
            return Err(Error::RouteMismatch(format!(
                "Ker(ε) is not an A-module for {}",
                m.label
            )));
        }
        Ok(k)
    }

    /// Both routes for `T_s` and `C_s`, compared by an isomorphism test.
    pub fn twist_routes_agree(&self, s: usize, m: &FinModule) -> Result<(bool, bool)> {
        let alg = self.alg();
        let t = isomorphic(alg, &self.twist(s, m), &self.twist_via_phi(s, m)?).is_iso();
        let c = isomorphic(alg, &self.cotwist(s, m), &self.cotwist_via_phi(s, m)?).is_iso();
        Ok((t, c))
    }

    /// Triangle identities `ε_{TM} ∘ T(η_M) = id` and `C(ε_M) ∘ η_{CM} = id` for `T_s ⊣ C_s`.
    pub fn adjunction_triangles(&self, s: usize, m: &FinModule) -> (bool, bool) {
        let alg = self.alg();
        let (j, _) = self.ideal_bimodules(s);
        // ε_{TM} ∘ T(η_M)
        let t = tensor(alg, m, &j);
        let ct = HomApplied::new(alg, &j, &t.module);
        let eta = adjunction_unit(alg, &j, m, &t, &ct);
        let tct = tensor(alg, &ct.module, &j);
        let left = t
            .map_to(alg, &j, &tct, &eta)
            .then(&adjunction_counit(alg, &ct, &t.module, &tct));
        let first = left.blocks == ModMap::identity(&t.module).blocks;
        // C(ε_M) ∘ η_{CM}
        let c = HomApplied::new(alg, &j, m);
        let tc = tensor(alg, &c.module, &j);
        let ctc = HomApplied::new(alg, &j, &tc.module);
        let eta_c = adjunction_unit(alg, &j, &c.module, &tc, &ctc);
        let eps = adjunction_counit(alg, &c, m, &tc);
        let right = eta_c.then(&ctc.map_to(&c, &eps));
        (first, right.blocks == ModMap::identity(&c.module).blocks)
    }

    /// `dim Hom(T_s M, N)` and `dim Hom(M, C_s N)`.
    pub fn adjoint_hom_dims(&self, s: usize, m: &FinModule, n: &FinModule) -> (usize, usize) {
        let alg = self.alg();
        (
            hom(alg, &self.twist(s, m), n).len(),
            hom(alg, m, &self.cotwist(s, n)).len(),
        )
    }

    /// `(dim L^1T_s M, dim Ker(M → φ_s M), dim R^1C_s M, dim Cok(φ_s M → M))`.
    pub fn first_derived_cross_check(&self, s: usize, m: &FinModule) -> Result<[usize; 4]> {
        let lt = self.lt(s, m)?;
        let rc = self.rc_dims(s, m)?;
        let p = self.phi(s, m)?;
        Ok([
            lt.get(1).map(|h| h.dim()).unwrap_or(0),
            m.dim() - p.unit.rank(),
            rc.get(1).copied().unwrap_or(0),
            m.dim() - p.counit.rank(),
        ])
    }

    pub fn resolution(&self, m: &FinModule) -> Arc<Resolution> {
        let key = fingerprint(m);
        if let Some(r) = self.resolutions.lock().unwrap().get(&key) {
            return r.clone();
        }
        let r = Arc::new(resolve(self.alg(), m, self.max_len));
        self.resolutions.lock().unwrap().insert(key, r.clone());
        r
    }

    fn op_resolution(&self, n: &FinModule) -> Result<Resolution> {
        let op = self.op()?;
        Ok(resolve(op, &n.dual(op), self.max_len))
    }

    pub fn ext_dims(&self, m: &FinModule, n: &FinModule) -> Result<Vec<usize>> {
        ext_dims(self.alg(), &self.resolution(m), n)
    }

    /// `L_iT_s(M)`.
    pub fn lt(&self, s: usize, m: &FinModule) -> Result<Vec<FinModule>> {
        let (j, _) = self.ideal_bimodules(s);
        derived_tensor(self.alg(), &self.resolution(m), &j)
    }

    /// `L_iτ_s(M)`.
    pub fn ltau(&self, s: usize, m: &FinModule) -> Result<Vec<FinModule>> {
        let (_, q) = self.ideal_bimodules(s);
        derived_tensor(self.alg(), &self.resolution(m), &q)
    }

    /// `dim R^iC_s(M)`, summed over weights (`R^iC_s(M) e_y = Ext^i(e_y J_s, M)`).
    pub fn rc_dims(&self, s: usize, m: &FinModule) -> Result<Vec<usize>> {
        let (j, _) = self.ideal_bimodules(s);
        let mut total: Vec<usize> = Vec::new();
        for part in &j.parts {
            let d = ext_dims(self.alg(), &self.resolution(part), m)?;
            if total.len() < d.len() {
                total.resize(d.len(), 0);
            }
            for (t, x) in total.iter_mut().zip(d) {
                *t += x;
            }
        }
        Ok(total)
    }

    /// `Lτ_s(M)` as the complex `P_•(M) ⊗_A A/J_s`.
    fn ltau_complex(&self, s: usize, m: &FinModule) -> Result<(Vec<FinModule>, Vec<ModMap>)> {
        let (_, q) = self.ideal_bimodules(s);
        let res = self.resolution(m);
        super::homological::require_complete(&res)?;
        Ok(super::bimodule::tensor_complex(self.alg(), &res, &q))
    }

    /// `dim H^k RHom(Lτ_s M[-1], N)` and `dim H^k RHom(M, Lτ_s N[-1])`.
    pub fn zuckerman_duality(
        &self,
        s: usize,
        m: &FinModule,
        n: &FinModule,
    ) -> Result<(BTreeMap<i32, usize>, BTreeMap<i32, usize>)> {
        let (c, cd) = self.ltau_complex(s, m)?;
        let q = self.op_resolution(n)?;
        let lhs = rhom_from_complex(self.alg(), &c, &cd, &q)?;
        let (c2, cd2) = self.ltau_complex(s, n)?;
        let rhs = rhom_into_complex(self.alg(), &self.resolution(m), &c2, &cd2)?;
        let nonzero = |m: BTreeMap<i32, usize>| m.into_iter().filter(|e| e.1 > 0).collect();
        Ok((nonzero(lhs), nonzero(rhs)))
    }

    /// `RC_s(LT_s(M))`: the complex `P_•(M) ⊗ J_s` has `C_s`-acyclic terms, so
    /// `C_s` is applied termwise. Returns the homology (index = homological degree).
    pub fn rc_lt(&self, s: usize, m: &FinModule) -> Result<Vec<FinModule>> {
        let alg = self.alg();
        let (j, _) = self.ideal_bimodules(s);
        let res = self.resolution(m);
        super::homological::require_complete(&res)?;
        for y in res.terms.iter().flat_map(|t| t.weights.iter().copied()) {
            let r = self.rc_dims(s, &j.parts[y])?;
            if r.iter().skip(1).any(|&d| d != 0) {
                return Err(Error::Invalid(format!(
                    "e_{} J is not C-acyclic",
                    self.name(y)
                )));
            }
        }
        let (terms, diffs) = super::bimodule::tensor_complex(alg, &res, &j);
        let applied: Vec<HomApplied> = terms
            .par_iter()
            .map(|t| HomApplied::new(alg, &j, t))
            .collect();
        let cdiffs: Vec<ModMap> = diffs
            .iter()
            .enumerate()
            .map(|(n, d)| applied[n + 1].map_to(&applied[n], d))
            .collect();
        let cterms: Vec<FinModule> = applied.into_iter().map(|a| a.module).collect();
        chain_homology(alg, &cterms, &cdiffs)
    }

    /// Whether `RC_s(LT_s(M)) ≃ M` concentrated in degree 0.
    pub fn equivalence_check(&self, s: usize, m: &FinModule) -> Result<bool> {
        let h = self.rc_lt(s, m)?;
        Ok(h.iter().skip(1).all(|x| x.is_zero()) && isomorphic(self.alg(), &h[0], m).is_iso())
    }

    /// `T_{s_1} ∘ ⋯ ∘ T_{s_l}(M)`, the last letter applied first.
    pub fn twist_word(&self, word: &[usize], m: &FinModule) -> Result<FinModule> {
        if !self.ctx.graph.group.is_reduced(word) {
            return Err(Error::NotReducedWord);
        }
        let mut cur = m.clone();
        for &s in word.iter().rev() {
            cur = self.twist(s, &cur);
        }
        Ok(cur)
    }

    /// Applies `T_w` along every reduced word of `w` and tests the results pairwise.
    pub fn word_independence(&self, w: usize, m: &FinModule) -> Result<Vec<(Vec<usize>, bool)>> {
        let words = self
            .ctx
            .graph
            .group
            .reduced_words(self.ctx.graph.element(w));
        let results: Vec<FinModule> = words
            .iter()
            .map(|wd| self.twist_word(wd, m))
            .collect::<Result<_>>()?;
        Ok(words
            .iter()
            .zip(&results)
            .map(|(wd, r)| (wd.clone(), isomorphic(self.alg(), &results[0], r).is_iso()))
            .collect())
    }

    pub fn verma_hom_table(&self) -> Result<Vec<VermaHomEntry>> {
        let vs: Vec<FinModule> = (0..self.nv())
            .map(|x| self.verma(x))
            .collect::<Result<_>>()?;
        let alg = self.alg();
        let pairs: Vec<(usize, usize)> = (0..self.nv())
            .flat_map(|x| (0..self.nv()).map(move |y| (x, y)))
            .collect();
        Ok(pairs
            .par_iter()
            .map(|&(x, y)| {
                let h = hom(alg, &vs[x], &vs[y]);
                let injective = h.first().map(|f| f.is_injective()).unwrap_or(false);
                VermaHomEntry {
                    src: self.name(x).into(),
                    dst: self.name(y).into(),
                    dim: h.len(),
                    injective,
                }
            })
            .collect())
    }

    /// A Verma flag of `M` as the list `x_n, x_{n-1}, …` peeled from the top, or `None`.
    pub fn verma_flag(&self, m: &FinModule) -> Result<Option<Vec<usize>>> {
        let vs: Vec<FinModule> = (0..self.nv())
            .map(|x| self.verma(x))
            .collect::<Result<_>>()?;
        Ok(self.peel(m, &vs, 0))
    }

    fn peel(&self, m: &FinModule, vs: &[FinModule], depth: usize) -> Option<Vec<usize>> {
        if m.is_zero() {
            return Some(Vec::new());
        }
        if depth > self.nv() * self.nv() {
            return None;
        }
        let alg = self.alg();
        let top = top_dims(alg, m);
        let mut cands: Vec<usize> = (0..self.nv())
            .filter(|&x| top[x] > 0 && vs[x].dim() <= m.dim())
            .collect();
        cands.sort_by_key(|&x| (self.length(x), x));
        for x in cands {
            let surj: Vec<ModMap> = hom(alg, m, &vs[x])
                .into_iter()
                .filter(|f| !f.blocks[x].is_zero())
                .take(3)
                .collect();
            for f in surj {
                let (k, _) = kernel(alg, m, &f);
                if let Some(mut rest) = self.peel(&k, vs, depth + 1) {
                    rest.insert(0, x);
                    return Some(rest);
                }
            }
        }
        None
    }

    pub fn four_term(&self, s: usize) -> Result<FourTerm> {
        let alg = self.alg();
        let x = self.phi_bimodule(s)?;
        let (j, _) = self.ideal_bimodules(s);
        let (to_a, from_a) = (x.to_a.as_ref().unwrap(), x.from_a.as_ref().unwrap());
        let mut ft = FourTerm {
            dim_a: alg.dim(),
            dim_a_phi: x.dim(),
            dim_j: j.dim(),
            rank_unit: 0,
            rank_counit: 0,
            composite_zero: true,
            image_is_j: true,
        };
        let span = alg.ideal_of(&self.left_descents(s));
        let jspans = Bimodule::ideal_spans(alg, &span);
        for y in 0..alg.nv {
            ft.rank_unit += from_a[y].rank();
            ft.rank_counit += to_a[y].rank();
            ft.composite_zero &= from_a[y].then(&to_a[y]).is_zero();
            for (z, b) in to_a[y].blocks.iter().enumerate() {
                let mut img = Span::new();
                for r in super::dense::rows(b) {
                    img.insert(r);
                }
                let js = &jspans[y][z];
                ft.image_is_j &=
                    img.rank() == js.rank() && js.rows().iter().all(|r| img.contains(r));
            }
        }
        Ok(ft)
    }

    pub fn translation_row(&self, s: usize, x: usize) -> Result<TranslationRow> {
        let alg = self.alg();
        let p = self.projective(x);
        let tp = self.theta(s, &p)?;
        let xs = self.right_mul(x, s);
        let xs_less = self.length(xs) < self.length(x);
        let decomposition = self.projective_decomposition(&tp);
        let mult = decomposition.clone().unwrap_or_default();
        let shape_ok = match &decomposition {
            None => false,
            Some(_) if xs_less => {
                let (pp, _) = super::module::direct_sum(alg, &[&p, &p]);
                isomorphic(alg, &tp, &pp).is_iso()
            }
            Some(d) => {
                d[xs] == 1
                    && (0..self.nv()).all(|y| {
                        y == xs
                            || d[y] == 0
                            || (y != x
                                && self.leq(y, x)
                                && self.length(self.right_mul(y, s)) < self.length(y))
                    })
            }
        };
        let l = self.simple(x);
        let tensor_agrees = tp.dim() == self.theta_tensor(s, &p)?.dim();
        Ok(TranslationRow {
            x: self.name(x).into(),
            xs_less,
            summands: (0..self.nv())
                .filter(|&y| mult.get(y).copied().unwrap_or(0) > 0)
                .map(|y| (self.name(y).into(), mult[y]))
                .collect(),
            projective: decomposition.is_some(),
            shape_ok,
            simple_killed: self.theta(s, &l)?.is_zero(),
            tensor_agrees,
        })
    }

    /// `Φ(θ_t φ_s B(x)) ≅ Φ(φ_s θ_t B(x))`, the two orders taken before reducing by `V*`.
    pub fn theta_phi_commute(&self, t: usize, s: usize, x: usize) -> Result<bool> {
        let b = self.ctx.b(x)?;
        let a = self.ctx.theta(t, &self.ctx.phi(s, &b)?.module)?.module;
        let c = self.ctx.phi(s, &self.ctx.theta(t, &b)?.module)?.module;
        let ma = super::zbridge::phi_image(&self.ctx, &self.built, &a, "θφ")?.module;
        let mc = super::zbridge::phi_image(&self.ctx, &self.built, &c, "φθ")?.module;
        Ok(isomorphic(self.alg(), &ma, &mc).is_iso())
    }

    pub fn iso(&self, m: &FinModule, n: &FinModule) -> IsoVerdict {
        isomorphic(self.alg(), m, n)
    }

    /// Multiplicities of `P(y)` in a projective module (its top), if it is projective.
    pub fn projective_decomposition(&self, m: &FinModule) -> Option<Vec<usize>> {
        let c = super::module::Cover::new(self.alg(), m);
        c.is_iso().then(|| top_dims(self.alg(), m))
    }
}
