//! Small dense helpers on top of the sparse elimination core.

use crate::polylin::{linalg, Mat, SVec, Span};
use crate::rat::Rat;

pub fn row(m: &Mat, i: usize) -> SVec {
    linalg::sparse(m.row(i))
}

pub fn rows(m: &Mat) -> Vec<SVec> {
    (0..m.rows).map(|i| row(m, i)).collect()
}

pub fn from_svecs(rows: &[SVec], cols: usize) -> Mat {
    let mut m = Mat::zeros(rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, x) in r {
            m.set(i, *j, x.clone());
        }
    }
    m
}

/// `v · m` for a sparse row vector.
pub fn svec_mat(v: &SVec, m: &Mat) -> SVec {
    let mut out = vec![Rat::zero(); m.cols];
    for (i, a) in v {
        for (j, o) in out.iter_mut().enumerate() {
            let b = m.get(*i, j);
            if !b.is_zero() {
                *o += &(a * b);
            }
        }
    }
    linalg::sparse(&out)
}

pub fn rank(m: &Mat) -> usize {
    m.rank()
}

/// Row vectors `v` with `v · m = 0`.
pub fn left_kernel(m: &Mat) -> Vec<SVec> {
    let eqs = (0..m.cols)
        .map(|j| linalg::sparse(&(0..m.rows).map(|i| m.get(i, j).clone()).collect::<Vec<_>>()));
    linalg::kernel(m.rows, eqs)
}

pub fn is_invertible(m: &Mat) -> bool {
    m.rows == m.cols && m.rank() == m.rows
}

pub fn add_block(dst: &mut Mat, r0: usize, c0: usize, src: &Mat, c: &Rat) {
    for i in 0..src.rows {
        for j in 0..src.cols {
            let x = src.get(i, j);
            if !x.is_zero() {
                let v = dst.get(r0 + i, c0 + j) + &(x * c);
                dst.set(r0 + i, c0 + j, v);
            }
        }
    }
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.add(&b.scale(&-Rat::one()))
}

/// Tracking span over the rows of `m`, so that `coords` returns row combinations.
pub fn row_tracker(m: &Mat) -> Span {
    let mut s = Span::tracking();
    for r in rows(m) {
        s.insert(r);
    }
    s
}

/// Dense coordinates of `v` against independent rows recorded in `s`.
pub fn coords_dense(s: &Span, v: &SVec, n: usize) -> Option<Vec<Rat>> {
    s.coords(v).map(|c| linalg::dense(&c, n))
}
