//! Bounded complexes: homology of module complexes, Ext, derived functors
//! and total complexes of vector spaces.

use std::collections::BTreeMap;

use super::algebra::FinAlgebra;
use super::bimodule::{hom_complex, tensor_complex, Bimodule};
use super::dense;
use super::module::{homology, FinModule, ModMap};
use super::resolution::Resolution;
use crate::error::{Error, Result};
use crate::polylin::Mat;
use crate::rat::Rat;

/// Homology of `⋯ → C_1 → C_0` with `diffs[n]: C_{n+1} → C_n`.
pub fn chain_homology(
    alg: &FinAlgebra,
    terms: &[FinModule],
    diffs: &[ModMap],
) -> Result<Vec<FinModule>> {
    let zero = FinModule::zero(alg);
    for n in 1..diffs.len() {
        if !diffs[n].then(&diffs[n - 1]).is_zero() {
            return Err(Error::Invalid(format!("d² ≠ 0 at degree {n}")));
        }
    }
    Ok((0..terms.len())
        .map(|n| {
            let f = diffs
                .get(n)
                .cloned()
                .unwrap_or_else(|| ModMap::zero(&zero, &terms[n]));
            let g = if n == 0 {
                ModMap::zero(&terms[0], &zero)
            } else {
                diffs[n - 1].clone()
            };
            homology(alg, &terms[n], &f, &g)
        })
        .collect())
}

pub fn require_complete(res: &Resolution) -> Result<()> {
    if res.complete {
        Ok(())
    } else {
        Err(Error::ResolutionTooShort)
    }
}

/// `L_i F(M) = H_i(P_•(M) ⊗_A X)`.
pub fn derived_tensor(alg: &FinAlgebra, res: &Resolution, x: &Bimodule) -> Result<Vec<FinModule>> {
    require_complete(res)?;
    let (terms, diffs) = tensor_complex(alg, res, x);
    chain_homology(alg, &terms, &diffs)
}

/// `dim Ext^i(M, N)` from a complete resolution of `M`.
pub fn ext_dims(alg: &FinAlgebra, res: &Resolution, n: &FinModule) -> Result<Vec<usize>> {
    require_complete(res)?;
    let (dims, diffs) = hom_complex(alg, res, n);
    Ok(super::bimodule::cohomology_dims(&dims, &diffs))
}

/// A complex of finite-dimensional spaces assembled from blocks; degrees increase along maps.
#[derive(Default)]
pub struct LinComplex {
    nodes: Vec<(i32, usize)>,
    maps: Vec<(usize, usize, Mat)>,
}

impl LinComplex {
    pub fn new() -> LinComplex {
        LinComplex::default()
    }

    pub fn node(&mut self, degree: i32, dim: usize) -> usize {
        self.nodes.push((degree, dim));
        self.nodes.len() - 1
    }

    pub fn map(&mut self, src: usize, dst: usize, m: Mat, sign: i64) {
        assert_eq!(
            self.nodes[src].0 + 1,
            self.nodes[dst].0,
            "maps raise the degree by one"
        );
        let m = if sign < 0 { m.scale(&Rat::int(-1)) } else { m };
        self.maps.push((src, dst, m));
    }

    fn total(&self, d: i32) -> (Vec<usize>, Vec<usize>) {
        let mut idx = Vec::new();
        let mut off = Vec::new();
        let mut o = 0;
        for (i, &(deg, dim)) in self.nodes.iter().enumerate() {
            if deg == d {
                idx.push(i);
                off.push(o);
                o += dim;
            }
        }
        off.push(o);
        (idx, off)
    }

    fn differential(&self, d: i32) -> Mat {
        let (si, so) = self.total(d);
        let (ti, to) = self.total(d + 1);
        let mut m = Mat::zeros(*so.last().unwrap(), *to.last().unwrap());
        for (s, t, b) in &self.maps {
            if self.nodes[*s].0 != d {
                continue;
            }
            let r = si.iter().position(|x| x == s).unwrap();
            let c = ti.iter().position(|x| x == t).unwrap();
            dense::add_block(&mut m, so[r], to[c], b, &Rat::one());
        }
        m
    }

    /// Cohomology dimensions by degree, after checking `d² = 0`.
    pub fn cohomology(&self) -> Result<BTreeMap<i32, usize>> {
        let (lo, hi) = match (
            self.nodes.iter().map(|n| n.0).min(),
            self.nodes.iter().map(|n| n.0).max(),
        ) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(BTreeMap::new()),
        };
        let ds: BTreeMap<i32, Mat> = (lo - 1..=hi).map(|d| (d, self.differential(d))).collect();
        for d in lo..hi {
            if !ds[&d].mul(&ds[&(d + 1)]).is_zero() {
                return Err(Error::Invalid(format!(
                    "total complex has d² ≠ 0 at degree {d}"
                )));
            }
        }
        let rank: BTreeMap<i32, usize> = ds.iter().map(|(d, m)| (*d, m.rank())).collect();
        Ok((lo..=hi)
            .map(|d| {
                let dim = *self.total(d).1.last().unwrap();
                (d, dim - rank[&d] - rank[&(d - 1)])
            })
            .collect())
    }
}

/// `dim H^k RHom(C[-1], N)` for a bounded complex `C` of modules (homological,
/// `cdiffs[p]: C_{p+1} → C_p`), using `Q_•`, a projective resolution of `D(N)`
/// over the opposite algebra: `Hom(C_p, D Q_q) = D(C_p e_w)`.
pub fn rhom_from_complex(
    alg: &FinAlgebra,
    c: &[FinModule],
    cdiffs: &[ModMap],
    q: &Resolution,
) -> Result<BTreeMap<i32, usize>> {
    require_complete(q)?;
    let mut lc = LinComplex::new();
    let mut ids = vec![vec![0; q.len()]; c.len()];
    let offs = |p: usize, qi: usize| -> Vec<usize> {
        let mut o = vec![0];
        for &w in &q.terms[qi].weights {
            o.push(o.last().unwrap() + c[p].wdim(w));
        }
        o
    };
    // the dual of C_p ⊗ Q_q sits in degree p+q, minus one for the shift C[-1]
    for p in 0..c.len() {
        for qi in 0..q.len() {
            ids[p][qi] = lc.node(p as i32 + qi as i32 - 1, *offs(p, qi).last().unwrap());
        }
    }
    // dualizing reverses arrows, so each block enters transposed
    for p in 0..c.len() {
        for qi in 0..q.len() {
            let o = offs(p, qi);
            if p > 0 {
                let o2 = offs(p - 1, qi);
                let mut m = Mat::zeros(*o.last().unwrap(), *o2.last().unwrap());
                for (l, &w) in q.terms[qi].weights.iter().enumerate() {
                    dense::add_block(&mut m, o[l], o2[l], &cdiffs[p - 1].blocks[w], &Rat::one());
                }
                lc.map(ids[p - 1][qi], ids[p][qi], m.transpose(), 1);
            }
            if qi > 0 {
                let o2 = offs(p, qi - 1);
                let mut m = Mat::zeros(*o.last().unwrap(), *o2.last().unwrap());
                let (src_w, dst_w) = (&q.terms[qi].weights, &q.terms[qi - 1].weights);
                for (k, col) in q.diffs[qi - 1].iter().enumerate() {
                    for (l, r) in col {
                        let blk = c[p].act_elem(alg, r, src_w[k], dst_w[*l]);
                        dense::add_block(&mut m, o[k], o2[*l], &blk, &Rat::one());
                    }
                }
                lc.map(
                    ids[p][qi - 1],
                    ids[p][qi],
                    m.transpose(),
                    if p % 2 == 0 { 1 } else { -1 },
                );
            }
        }
    }
    lc.cohomology()
}

/// `dim H^k RHom(M, C[-1])` from a resolution of `M` and a bounded complex `C`.
pub fn rhom_into_complex(
    alg: &FinAlgebra,
    res: &Resolution,
    c: &[FinModule],
    cdiffs: &[ModMap],
) -> Result<BTreeMap<i32, usize>> {
    require_complete(res)?;
    let mut lc = LinComplex::new();
    let offs = |n: usize, qi: usize| -> Vec<usize> {
        let mut o = vec![0];
        for &y in &res.terms[n].weights {
            o.push(o.last().unwrap() + c[qi].wdim(y));
        }
        o
    };
    let mut ids = vec![vec![0; c.len()]; res.len()];
    for n in 0..res.len() {
        for qi in 0..c.len() {
            ids[n][qi] = lc.node(n as i32 - qi as i32 + 1, *offs(n, qi).last().unwrap());
        }
    }
    for n in 0..res.len() {
        for qi in 0..c.len() {
            let o = offs(n, qi);
            if n + 1 < res.len() {
                let o2 = offs(n + 1, qi);
                let mut m = Mat::zeros(*o.last().unwrap(), *o2.last().unwrap());
                for (k, col) in res.diffs[n].iter().enumerate() {
                    for (j, r) in col {
                        let blk = c[qi].act_elem(
                            alg,
                            r,
                            res.terms[n].weights[*j],
                            res.terms[n + 1].weights[k],
                        );
                        dense::add_block(&mut m, o[*j], o2[k], &blk, &Rat::one());
                    }
                }
                lc.map(ids[n][qi], ids[n + 1][qi], m, 1);
            }
            if qi > 0 {
                let o2 = offs(n, qi - 1);
                let mut m = Mat::zeros(*o.last().unwrap(), *o2.last().unwrap());
                for (j, &y) in res.terms[n].weights.iter().enumerate() {
                    dense::add_block(&mut m, o[j], o2[j], &cdiffs[qi - 1].blocks[y], &Rat::one());
                }
                lc.map(
                    ids[n][qi],
                    ids[n][qi - 1],
                    m,
                    if n % 2 == 0 { 1 } else { -1 },
                );
            }
        }
    }
    lc.cohomology()
}

/// Euler characteristic `Σ (−1)^i dim H_i`.
pub fn euler(dims: &[usize]) -> i64 {
    dims.iter()
        .enumerate()
        .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum()
}
