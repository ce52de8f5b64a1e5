//! Dimensions of standard modules against counts from Kazhdan-Lusztig polynomials.

use mgcat_core::coxeter::KLTable;
use mgcat_core::suites::Session;

#[test]
fn module_dims_follow_kl_counts() {
    for name in ["A1", "A1xA1", "A2", "B2"] {
        let s = Session::builtin(name).unwrap();
        let cat = s.cat().unwrap();
        let kl = KLTable::new(&s.group);
        let graph = &cat.ctx.graph;
        let p = |z: usize, x: usize| kl.p(graph.element(z), graph.element(x)).eval1() as usize;
        let n = cat.nv();
        // dim M(x) = Σ_y P_{x,y}(1)
        let verma: Vec<usize> = (0..n).map(|x| (0..n).map(|y| p(x, y)).sum()).collect();
        for x in 0..n {
            assert_eq!(
                cat.verma(x).unwrap().dim(),
                verma[x],
                "{name} M({})",
                cat.name(x)
            );
            // BGG reciprocity: (P(x) : M(z)) = [M(z) : L(x)] = P_{z,x}(1)
            let proj: usize = (0..n).map(|z| p(z, x) * verma[z]).sum();
            assert_eq!(cat.projective(x).dim(), proj, "{name} P({})", cat.name(x));
        }
        let total: usize = (0..n)
            .map(|z| (0..n).map(|x| p(z, x)).sum::<usize>().pow(2))
            .sum();
        assert_eq!(cat.alg().dim(), total, "{name}");
    }
}

#[test]
fn verma_flags_of_projectives_follow_reciprocity() {
    let s = Session::builtin("B2").unwrap();
    let cat = s.cat().unwrap();
    let kl = KLTable::new(&s.group);
    let graph = &cat.ctx.graph;
    for x in 0..cat.nv() {
        let flag = cat
            .verma_flag(&cat.projective(x))
            .unwrap()
            .expect("projectives have Verma flags");
        assert_eq!(flag[0], x);
        for z in 0..cat.nv() {
            let want = kl.p(graph.element(z), graph.element(x)).eval1() as usize;
            assert_eq!(flag.iter().filter(|&&y| y == z).count(), want);
        }
    }
}

#[test]
fn b2_algebra_dimension() {
    assert_eq!(
        Session::builtin("B2").unwrap().cat().unwrap().alg().dim(),
        177
    );
}
