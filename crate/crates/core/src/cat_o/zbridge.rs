//! From `Z`-modules to `A`-modules: `Φ(N) = Hom_Z(⊕ B(z), N) ⊗_S ℂ` and the
//! bimodules `A'_θ`, `A'_φ` built from translated `B(x)`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::algebra::{BuiltAlgebra, FinAlgebra};
use super::bimodule::Bimodule;
use super::module::{FinModule, ModMap};
use crate::error::{Error, Result};
use crate::polylin::{Mat, Poly};
use crate::zmod::{
    phi_map, pmat_identity, pmat_scale, theta_map, SectionModule, ZContext, ZHomBasis, ZMap,
};

/// `Φ(N)` together with the hom bases it is expressed in.
pub struct PhiImage {
    pub homs: Vec<ZHomBasis>,
    pub module: FinModule,
}

fn reduce_row(h: &ZHomBasis, f: &ZMap, what: &str) -> Result<Vec<(usize, crate::rat::Rat)>> {
    let v = h
        .reduce(&f.matrix, f.degree)
        .ok_or_else(|| Error::Invalid(format!("{what} leaves the hom space")))?;
    Ok(v.into_iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .collect())
}

/// The matrix of `f ↦ F∘f` (or `f ↦ f∘a` via `post = false`) between two hom bases.
fn compose_matrix(
    src: &ZHomBasis,
    dst: &ZHomBasis,
    op: &ZMap,
    post: bool,
    nvars: usize,
    what: &str,
) -> Result<Mat> {
    let mut m = Mat::zeros(src.len(), dst.len());
    for (i, f) in src.gens.iter().enumerate() {
        let c = if post {
            op.compose(f, nvars)
        } else {
            f.compose(op, nvars)
        };
        for (j, x) in reduce_row(dst, &c, what)? {
            m.set(i, j, x);
        }
    }
    Ok(m)
}

pub fn phi_image(
    ctx: &ZContext,
    built: &BuiltAlgebra,
    n: &SectionModule,
    label: &str,
) -> Result<PhiImage> {
    let alg = &built.alg;
    let homs: Vec<ZHomBasis> = (0..alg.nv)
        .into_par_iter()
        .map(|z| ctx.hom(&*ctx.b(z)?, n))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = homs.iter().map(|h| h.len()).collect();
    let nv = ctx.nvars();
    let mut err = None;
    let module = FinModule::from_gens(
        alg,
        &dims,
        |g| {
            let b = alg.basis[g];
            let a = &built.homs[b.src][b.dst].gens[alg.pos[g]];
            compose_matrix(&homs[b.dst], &homs[b.src], a, false, nv, label).unwrap_or_else(|e| {
                err = Some(e);
                Mat::zeros(dims[b.dst], dims[b.src])
            })
        },
        label,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(PhiImage { homs, module })
}

/// Which translation to lift to a bimodule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZFunctor {
    Theta(usize),
    Phi(usize),
}

impl ZFunctor {
    pub fn label(&self) -> String {
        match self {
            ZFunctor::Theta(s) => format!("A'θ{}", s + 1),
            ZFunctor::Phi(s) => format!("A'φ{}", s + 1),
        }
    }
}

/// `A'_F = Φ(F(⊕ B(x)))` with left action `a ↦ F(a)∘-`, comparison maps to
/// and from `A` induced by the counit and unit, and (for `φ`) the `V*` operators.
pub fn z_bimodule(ctx: &ZContext, built: &BuiltAlgebra, kind: ZFunctor) -> Result<Bimodule> {
    let alg: &FinAlgebra = &built.alg;
    let nv = ctx.nvars();
    let graph = &ctx.graph;
    let adj: Vec<_> = (0..alg.nv)
        .into_par_iter()
        .map(|x| {
            let b = ctx.b(x)?;
            match kind {
                ZFunctor::Theta(s) => ctx.theta(s, &b),
                ZFunctor::Phi(s) => ctx.phi(s, &b),
            }
        })
        .collect::<Result<_>>()?;
    let label = kind.label();
    let images: Vec<PhiImage> = adj
        .par_iter()
        .enumerate()
        .map(|(x, a)| phi_image(ctx, built, &a.module, &format!("{label}e{}", alg.names[x])))
        .collect::<Result<_>>()?;
    let lift = |f: &ZMap| -> Result<ZMap> {
        match kind {
            ZFunctor::Theta(_) => Ok(theta_map(f, nv)),
            ZFunctor::Phi(s) => phi_map(graph, s, f),
        }
    };
    // φ does not preserve V*·Hom, so every basis element acts through its own lift
    let ops: Vec<usize> = match kind {
        ZFunctor::Theta(_) => alg.gens.clone(),
        ZFunctor::Phi(_) => (0..alg.dim()).filter(|&a| !alg.is_idempotent(a)).collect(),
    };
    let left: HashMap<usize, ModMap> = ops
        .par_iter()
        .map(|&g| -> Result<(usize, ModMap)> {
            let b = alg.basis[g];
            let fg = lift(&built.homs[b.src][b.dst].gens[alg.pos[g]])?;
            let blocks = (0..alg.nv)
                .map(|z| {
                    compose_matrix(
                        &images[b.src].homs[z],
                        &images[b.dst].homs[z],
                        &fg,
                        true,
                        nv,
                        &label,
                    )
                })
                .collect::<Result<_>>()?;
            Ok((g, ModMap { blocks }))
        })
        .collect::<Result<_>>()?;
    let to_a: Vec<ModMap> = (0..alg.nv)
        .into_par_iter()
        .map(|y| -> Result<ModMap> {
            let blocks = (0..alg.nv)
                .map(|z| {
                    compose_matrix(
                        &images[y].homs[z],
                        &built.homs[z][y],
                        &adj[y].counit,
                        true,
                        nv,
                        "counit",
                    )
                })
                .collect::<Result<_>>()?;
            Ok(ModMap { blocks })
        })
        .collect::<Result<_>>()?;
    let from_a: Vec<ModMap> = (0..alg.nv)
        .into_par_iter()
        .map(|y| -> Result<ModMap> {
            let blocks = (0..alg.nv)
                .map(|z| {
                    compose_matrix(
                        &built.homs[z][y],
                        &images[y].homs[z],
                        &adj[y].unit,
                        true,
                        nv,
                        "unit",
                    )
                })
                .collect::<Result<_>>()?;
            Ok(ModMap { blocks })
        })
        .collect::<Result<_>>()?;
    let vstar = match kind {
        ZFunctor::Theta(_) => Vec::new(),
        ZFunctor::Phi(s) => (0..nv)
            .map(|i| {
                (0..alg.nv)
                    .map(|x| -> Result<ModMap> {
                        let r = ctx.b(x)?.rank();
                        let lam = ZMap {
                            degree: 2,
                            matrix: pmat_scale(&pmat_identity(nv, r), &Poly::var(nv, i)),
                        };
                        let op = phi_map(graph, s, &lam)?;
                        let blocks = (0..alg.nv)
                            .map(|z| {
                                compose_matrix(
                                    &images[x].homs[z],
                                    &images[x].homs[z],
                                    &op,
                                    true,
                                    nv,
                                    "V*",
                                )
                            })
                            .collect::<Result<_>>()?;
                        Ok(ModMap { blocks })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
    };
    let parts = images.into_iter().map(|i| i.module).collect();
    let mut x = Bimodule::new(&label, parts, left);
    x.to_a = Some(to_a);
    x.from_a = Some(from_a);
    x.vstar = vstar;
    x.exact = matches!(kind, ZFunctor::Theta(_));
    Ok(x)
}

/// `M(x) = Φ(V(x))`.
pub fn verma_module(ctx: &ZContext, built: &BuiltAlgebra, x: usize) -> Result<FinModule> {
    let v = Arc::new(ctx.verma(x));
    Ok(phi_image(ctx, built, &v, &format!("M({})", built.alg.names[x]))?.module)
}
