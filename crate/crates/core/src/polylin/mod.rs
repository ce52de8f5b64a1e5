//! Graded polynomial arithmetic and degree-sliced exact linear algebra.

pub mod graded;
pub mod linalg;
pub mod poly;

pub use graded::{dim_s, DegreeSlice, GradedBasis, GradedSpace, HomVec, Layout};
pub use linalg::{Mat, SVec, Span};
pub use poly::{Mono, Poly};

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial is not divisible by the linear form")]
    NotDivisible,
    #[error("division by the zero linear form")]
    ZeroDivisor,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("inhomogeneous input for a degree slice")]
    InhomogeneousInput,
    #[error("target is not in the span")]
    NotInSpan,
    #[error("a linear multiple of a slice member escapes the next slice")]
    NotClosedUnderAction,
}

/// Applies the substitution `x_i ↦ Σ_j m[i][j] x_j` (the dual action of a group
/// element whose inverse matrix is `m`).
pub fn act_matrix(m: &Mat, p: &Poly) -> Result<Poly, PolyError> {
    let n = p.nvars();
    if m.rows != n || m.cols != n {
        return Err(PolyError::DimensionMismatch);
    }
    let images: Vec<Poly> = (0..n).map(|i| Poly::linear(m.row(i))).collect();
    Ok(p.substitute(&images))
}

/// Applies a linear substitution to every entry of a vector.
pub fn act_vec(m: &Mat, v: &[Poly]) -> Result<Vec<Poly>, PolyError> {
    v.iter().map(|p| act_matrix(m, p)).collect()
}

/// Row vector `λ` times matrix `m`.
pub fn row_times(l: &[Rat], m: &Mat) -> Vec<Rat> {
    m.apply_row(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn divide_exact_examples() {
        let a = vec![r(1), r(0)];
        let b = vec![r(0), r(1)];
        let xa = Poly::linear(&a);
        let xb = Poly::linear(&b);
        assert_eq!(xa.mul(&xa).divide_exact(&a).unwrap(), xa);
        let p = xa.mul(&xb).add(&xb.mul(&xb));
        assert_eq!(p.divide_exact(&b).unwrap(), xa.add(&xb));
        assert_eq!(xa.divide_exact(&b), Err(PolyError::NotDivisible));
        assert_eq!(xa.divide_exact(&[r(0), r(0)]), Err(PolyError::ZeroDivisor));
        assert_eq!(xa.add(&xb).divide_poly(&xa), Err(PolyError::NotDivisible));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec((0u32..4, 0u32..4, -5i64..6), 0..6).prop_map(|ts| {
            Poly::from_terms(
                2,
                ts.into_iter()
                    .map(|(a, b, c)| (Mono::from_exps(&[a, b]), r(c))),
            )
        })
    }

    fn homogeneous(k: u32) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((0..=k, -5i64..6), 0..5).prop_map(move |ts| {
            Poly::from_terms(
                2,
                ts.into_iter()
                    .map(|(a, c)| (Mono::from_exps(&[a, k - a]), r(c))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws(p in arb_poly(), q in arb_poly(), s in arb_poly()) {
            prop_assert_eq!(p.mul(&q), q.mul(&p));
            prop_assert_eq!(p.mul(&q.add(&s)), p.mul(&q).add(&p.mul(&s)));
            prop_assert!(p.sub(&p).is_zero());
        }

        #[test]
        fn division_roundtrip(p in arb_poly(), a in -3i64..4, b in -3i64..4) {
            prop_assume!(a != 0 || b != 0);
            let alpha = vec![r(a), r(b)];
            let prod = p.mul(&Poly::linear(&alpha));
            prop_assert_eq!(prod.divide_exact(&alpha).unwrap(), p.clone());
            prop_assert!(prod.reduce_mod_linear(&alpha).unwrap().is_zero());
        }

        #[test]
        fn general_division_roundtrip(p in arb_poly(), q in arb_poly()) {
            prop_assume!(!q.is_zero());
            prop_assert_eq!(p.mul(&q).divide_poly(&q).unwrap(), p.clone());
        }

        #[test]
        fn substitution_preserves_degree(p in homogeneous(3), a in -3i64..4, b in -3i64..4, c in -3i64..4, d in -3i64..4) {
            let m = Mat::from_rows(&[vec![r(a), r(b)], vec![r(c), r(d)]]);
            prop_assume!(m.inverse().is_some());
            let q = act_matrix(&m, &p).unwrap();
            prop_assert!(q.is_homogeneous());
            if !p.is_zero() {
                prop_assert_eq!(q.degree(), p.degree());
            }
        }
    }
}
