//! The principal block of category O through its basic algebra.

pub mod algebra;
pub mod bimodule;
pub mod category;
pub mod dense;
pub mod homological;
pub mod module;
pub mod resolution;
pub mod zbridge;

pub use algebra::{build_algebra, BasisElt, BuiltAlgebra, FinAlgebra};
pub use module::{Cover, FinModule, IsoVerdict, ModMap, ProjSum};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::module::*;
    use super::*;
    use crate::coxeter::{builtin, Group};
    use crate::momentgraph::MomentGraph;
    use crate::zmod::ZContext;

    fn algebra(name: &str) -> (ZContext, FinAlgebra) {
        let g = Arc::new(Group::new(Arc::new(builtin(name).unwrap()), None).unwrap());
        let ctx = ZContext::new(Arc::new(MomentGraph::full(g).unwrap()), 4).unwrap();
        let alg = build_algebra(&ctx).unwrap().alg;
        (ctx, alg)
    }

    #[test]
    fn basic_algebra_dims() {
        let (_, a1) = algebra("A1");
        assert_eq!(a1.dim(), 5);
        assert_eq!(a1.radical().unwrap().len(), 3);
        assert_eq!(a1.trace_radical().len(), 3);
        let (ctx, a2) = algebra("A2");
        assert_eq!(a2.dim(), 77);
        let e = ctx.graph.position(ctx.graph.group.identity()).unwrap();
        let p = regular_projective(&a2, e);
        assert_eq!(p.dim(), 6);
        assert!(p.check_axioms(&a2));
        let sizes: Vec<usize> = (0..6).map(|y| regular_projective(&a2, y).dim()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 77);
        let cov = Cover::new(&a2, &p);
        assert_eq!(cov.proj.weights.len(), 1);
        assert!(cov.is_iso());
        assert_eq!(hom(&a2, &p, &p).len(), p.wdim(e));
        assert!(isomorphic(&a2, &p, &p).is_iso());
    }

    #[test]
    fn z_bimodules_are_consistent() {
        use super::bimodule::*;
        use super::zbridge::*;
        let g = Arc::new(Group::new(Arc::new(builtin("A2").unwrap()), None).unwrap());
        let ctx = ZContext::new(Arc::new(MomentGraph::full(g).unwrap()), 4).unwrap();
        let built = build_algebra(&ctx).unwrap();
        let alg = &built.alg;
        let dims: Vec<usize> = (0..6)
            .map(|x| verma_module(&ctx, &built, x).unwrap().dim())
            .collect();
        let mut sorted = dims.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 2, 4, 4, 6]);
        for kind in [ZFunctor::Theta(0), ZFunctor::Phi(0)] {
            let x = z_bimodule(&ctx, &built, kind).unwrap();
            x.check(alg).unwrap();
            let reg = Bimodule::regular(alg);
            reg.check(alg).unwrap();
            for y in 0..6 {
                let p = regular_projective(alg, y);
                let h = HomApplied::new(alg, &x, &p);
                assert_eq!(h.module.dim(), x.parts[y].dim(), "{kind:?} at {y}");
                if x.exact {
                    let t = tensor(alg, &p, &x);
                    assert_eq!(t.module.dim(), x.parts[y].dim());
                }
            }
        }
    }
}
