//! Minimal projective resolutions by iterated projective covers.

use super::algebra::FinAlgebra;
use super::dense;
use super::module::{kernel, Cover, FinModule, ModMap, ProjSum};
use crate::polylin::SVec;

/// `⋯ → P_1 → P_0 → M`, with `diffs[n][k]` the image in `P_n` of generator
/// `k` of `P_{n+1}`, written as `Σ_j g_j r_jk`.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub terms: Vec<ProjSum>,
    pub diffs: Vec<Vec<Vec<(usize, SVec)>>>,
    pub cover: Cover,
    /// Whether the last term is followed by zero.
    pub complete: bool,
}

pub fn resolve(alg: &FinAlgebra, m: &FinModule, max_len: usize) -> Resolution {
    let cover = Cover::new(alg, m);
    let mut terms = vec![cover.proj.clone()];
    let mut diffs = Vec::new();
    let mut current = cover.clone();
    let mut complete = false;
    while terms.len() <= max_len {
        let (k, incl) = kernel(alg, &current.proj.module, &current.map);
        if k.is_zero() {
            complete = true;
            break;
        }
        let next = Cover::new(alg, &k);
        let prev = terms.last().unwrap();
        let d = next
            .lifts
            .iter()
            .zip(&next.proj.weights)
            .map(|(l, &w)| prev.decode(alg, w, &dense::svec_mat(l, &incl.blocks[w])))
            .collect();
        diffs.push(d);
        terms.push(next.proj.clone());
        current = next;
    }
    Resolution {
        terms,
        diffs,
        cover,
        complete,
    }
}

impl Resolution {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `d_{n+1}: P_{n+1} → P_n` as a module map.
    pub fn diff_map(&self, alg: &FinAlgebra, n: usize) -> ModMap {
        let (src, dst) = (&self.terms[n + 1], &self.terms[n]);
        let blocks = (0..alg.nv)
            .map(|z| {
                let mut rows = Vec::new();
                for (k, &y) in src.weights.iter().enumerate() {
                    for &c in &alg.by_pair[z][y] {
                        let img: Vec<(usize, SVec)> = self.diffs[n][k]
                            .iter()
                            .map(|(j, r)| (*j, alg.mul(r, &vec![(c, crate::rat::Rat::one())])))
                            .collect();
                        rows.push(dst.encode(alg, z, &img));
                    }
                }
                dense::from_svecs(&rows, dst.module.wdim(z))
            })
            .collect();
        ModMap { blocks }
    }
}

/// Generators and relations of a module.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub cover: Cover,
    /// `(w_k, Σ_j g_j r_jk)`: relation `k` lives in weight `w_k`.
    pub rels: Vec<(usize, Vec<(usize, SVec)>)>,
}

impl Presentation {
    pub fn new(alg: &FinAlgebra, m: &FinModule) -> Presentation {
        let res = resolve(alg, m, 1);
        let rels = match res.diffs.first() {
            Some(d) => res.terms[1]
                .weights
                .iter()
                .copied()
                .zip(d.iter().cloned())
                .collect(),
            None => Vec::new(),
        };
        Presentation {
            cover: res.cover,
            rels,
        }
    }

    pub fn gen_weights(&self) -> &[usize] {
        &self.cover.proj.weights
    }
}
