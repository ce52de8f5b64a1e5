//! Exact sparse linear algebra over `Rat`.
//!
//! Vectors are sorted `(column, value)` lists. [`Span`] keeps an echelon
//! basis of inserted vectors (pivot = first nonzero column, normalized to 1)
//! and optionally tracks how each basis row is combined from the inputs, which
//! gives membership with coordinates. [`kernel`] solves homogeneous systems.

use crate::rat::Rat;

pub type SVec = Vec<(usize, Rat)>;

/// Sparse vector from a dense one.
pub fn sparse(v: &[Rat]) -> SVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn dense(v: &SVec, n: usize) -> Vec<Rat> {
    let mut d = vec![Rat::zero(); n];
    for (i, x) in v {
        d[*i] = x.clone();
    }
    d
}

/// `a + c·b` for sorted sparse vectors.
pub fn axpy(a: &SVec, c: &Rat, b: &SVec) -> SVec {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(a: &SVec, c: &Rat) -> SVec {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// Sorts and merges duplicate columns.
pub fn normalize(mut v: Vec<(usize, Rat)>) -> SVec {
    v.sort_by_key(|e| e.0);
    let mut out: SVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += &x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// Working row used during reduction: dense values plus a list of touched columns.
struct Work {
    vals: Vec<Rat>,
    nz: Vec<bool>,
    cols: Vec<usize>,
}

impl Work {
    fn new(n: usize) -> Work {
        Work {
            vals: vec![Rat::zero(); n],
            nz: vec![false; n],
            cols: Vec::new(),
        }
    }

    fn load(&mut self, v: &SVec) {
        for (i, x) in v {
            self.touch(*i);
            self.vals[*i] = x.clone();
        }
    }

    fn touch(&mut self, i: usize) {
        if i >= self.vals.len() {
            self.vals.resize(i + 1, Rat::zero());
            self.nz.resize(i + 1, false);
        }
        if !self.nz[i] {
            self.nz[i] = true;
            self.cols.push(i);
        }
    }

    fn axpy(&mut self, c: &Rat, row: &SVec) {
        for (i, x) in row {
            self.touch(*i);
            let v = &self.vals[*i] - &(c * x);
            self.vals[*i] = v;
        }
    }

    /// Drains into a sorted sparse vector, resetting the buffer.
    fn take(&mut self) -> SVec {
        self.cols.sort_unstable();
        let mut out = Vec::new();
        for &i in &self.cols {
            self.nz[i] = false;
            let v = std::mem::take(&mut self.vals[i]);
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        self.cols.clear();
        out
    }
}

/// Echelon basis of a growing span.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<SVec>,
    combos: Vec<SVec>,
    pivot_row: Vec<Option<usize>>,
    track: bool,
    inputs: usize,
}

impl Span {
    pub fn new() -> Span {
        Span::default()
    }

    /// A span that records coordinates against the inserted vectors.
    pub fn tracking() -> Span {
        Span {
            track: true,
            ..Span::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }

    pub fn rows(&self) -> &[SVec] {
        &self.rows
    }

    fn pivot(&self, c: usize) -> Option<usize> {
        self.pivot_row.get(c).copied().flatten()
    }

    /// Reduces `v` against the basis, returning the residual and the
    /// multipliers used per basis row.
    fn reduce_inner(&self, v: &SVec, want_mult: bool) -> (SVec, Vec<(usize, Rat)>) {
        let maxc = v
            .last()
            .map(|e| e.0 + 1)
            .unwrap_or(0)
            .max(self.pivot_row.len());
        let mut w = Work::new(maxc);
        w.load(v);
        let mut mult = Vec::new();
        let mut c = 0;
        let mut frontier: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
            v.iter().map(|e| std::cmp::Reverse(e.0)).collect();
        while let Some(std::cmp::Reverse(col)) = frontier.pop() {
            if col < c {
                continue;
            }
            c = col;
            if w.vals[col].is_zero() {
                continue;
            }
            if let Some(r) = self.pivot(col) {
                let f = w.vals[col].clone();
                let row = &self.rows[r];
                for (i, _) in row.iter().skip(1) {
                    if !w.nz.get(*i).copied().unwrap_or(false) || w.vals[*i].is_zero() {
                        frontier.push(std::cmp::Reverse(*i));
                    }
                }
                w.axpy(&f, row);
                if want_mult {
                    mult.push((r, f));
                }
            }
        }
        (w.take(), mult)
    }

    /// Residual of `v` modulo the span (zero iff `v` is in the span).
    pub fn reduce(&self, v: &SVec) -> SVec {
        self.reduce_inner(v, false).0
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v`; returns `true` if it was independent of the current span.
    pub fn insert(&mut self, v: SVec) -> bool {
        let idx = self.inputs;
        self.inputs += 1;
        let (res, mult) = self.reduce_inner(&v, self.track);
        if res.is_empty() {
            return false;
        }
        let p = res[0].0;
        let inv = res[0].1.recip();
        let row = scale(&res, &inv);
        if self.track {
            let mut combo: SVec = vec![(idx, Rat::one())];
            for (r, f) in &mult {
                combo = axpy(&combo, &(-f), &self.combos[*r]);
            }
            self.combos.push(scale(&combo, &inv));
        }
        if self.pivot_row.len() <= p {
            self.pivot_row.resize(p + 1, None);
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(row);
        true
    }

    /// Coordinates of `v` against the inserted vectors, if `v` is in the span.
    /// Requires a tracking span.
    pub fn coords(&self, v: &SVec) -> Option<SVec> {
        assert!(self.track, "coords needs a tracking span");
        let (res, mult) = self.reduce_inner(v, true);
        if !res.is_empty() {
            return None;
        }
        let mut out: Vec<(usize, Rat)> = Vec::new();
        for (r, f) in mult {
            for (i, x) in &self.combos[r] {
                out.push((*i, &f * x));
            }
        }
        Some(normalize(out))
    }
}

/// Basis of the null space of the system whose equations are `rows`, in
/// `ncols` unknowns. Each basis vector has a 1 at its own free column and 0
/// at every other free column.
pub fn kernel(ncols: usize, rows: impl IntoIterator<Item = SVec>) -> Vec<SVec> {
    let mut span = Span::new();
    for r in rows {
        if !r.is_empty() {
            span.insert(r);
            if span.rank() == ncols {
                return Vec::new();
            }
        }
    }
    kernel_of_span(ncols, &span)
}

/// Null space of the equations collected in `span`.
pub fn kernel_of_span(ncols: usize, span: &Span) -> Vec<SVec> {
    let rref = to_rref(span);
    let mut is_pivot = vec![false; ncols];
    for r in &rref {
        is_pivot[r[0].0] = true;
    }
    // column -> list of (pivot column, coefficient) for rows containing it
    let mut by_col: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); ncols];
    for r in &rref {
        let p = r[0].0;
        for (c, x) in r.iter().skip(1) {
            by_col[*c].push((p, x.clone()));
        }
    }
    let mut out = Vec::new();
    for f in 0..ncols {
        if is_pivot[f] {
            continue;
        }
        let mut v: Vec<(usize, Rat)> = vec![(f, Rat::one())];
        for (p, x) in &by_col[f] {
            v.push((*p, -x));
        }
        out.push(normalize(v));
    }
    out
}

/// Fully reduced rows (each pivot column is zero in every other row).
pub fn to_rref(span: &Span) -> Vec<SVec> {
    let mut rows: Vec<SVec> = span.rows.clone();
    rows.sort_by_key(|r| r[0].0);
    let mut pos = std::collections::HashMap::new();
    for (k, r) in rows.iter().enumerate() {
        pos.insert(r[0].0, k);
    }
    // back substitution, last pivot first
    for k in (0..rows.len()).rev() {
        let mut cur = rows[k].clone();
        let mut changed = false;
        let mut idx = 1;
        while idx < cur.len() {
            let (c, x) = cur[idx].clone();
            if let Some(&j) = pos.get(&c) {
                if j != k {
                    cur = axpy(&cur, &(-&x), &rows[j]);
                    changed = true;
                    continue;
                }
            }
            idx += 1;
        }
        if changed {
            rows[k] = cur;
        }
    }
    rows
}

/// Rank of a list of vectors.
pub fn rank(vs: impl IntoIterator<Item = SVec>) -> usize {
    let mut s = Span::new();
    for v in vs {
        s.insert(v);
    }
    s.rank()
}

/// Dense row-major matrix over `Rat`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rat) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Rat::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let b = self.get(i, j);
                if !b.is_zero() {
                    out[j] += &(a * b);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rank((0..self.rows).map(|i| sparse(self.row(i))))
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut s = Span::tracking();
        for i in 0..n {
            s.insert(sparse(self.row(i)));
        }
        if s.rank() < n {
            return None;
        }
        // row i of the inverse: coordinates of e_i against the rows
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            let c = s.coords(&vec![(i, Rat::one())]).expect("full rank");
            for (j, x) in c {
                inv.set(i, j, x);
            }
        }
        // coords gives e_i = Σ c_j row_j, i.e. C·M = I
        Some(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn membership_coordinates() {
        let mut s = Span::tracking();
        s.insert(vec![(0, r(1))]);
        s.insert(vec![(1, r(1))]);
        let c = s.coords(&vec![(0, r(1)), (1, r(1))]).unwrap();
        assert_eq!(c, vec![(0, r(1)), (1, r(1))]);
        assert!(s.coords(&vec![(2, r(1))]).is_none());
    }

    #[test]
    fn kernel_of_single_equation() {
        // x0 + x1 - x2 = 0
        let k = kernel(3, vec![vec![(0, r(1)), (1, r(1)), (2, r(-1))]]);
        assert_eq!(k.len(), 2);
        for v in &k {
            let d = dense(v, 3);
            assert_eq!(&d[0] + &d[1], d[2]);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(&[vec![r(2), r(1)], vec![r(1), r(1)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul(&m), Mat::identity(2));
        assert_eq!(m.mul(&inv), Mat::identity(2));
        let sing = Mat::from_rows(&[vec![r(1), r(2)], vec![r(2), r(4)]]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn tracked_coords_reconstruct() {
        let vs = vec![
            vec![(0, r(1)), (2, r(3))],
            vec![(0, r(2)), (1, r(1))],
            vec![(1, r(5)), (2, Rat::new(1, 2))],
        ];
        let mut s = Span::tracking();
        for v in &vs {
            s.insert(v.clone());
        }
        let target = vec![(0, r(7)), (1, r(-1)), (2, r(4))];
        let c = s.coords(&target).unwrap();
        let mut acc: SVec = Vec::new();
        for (i, x) in c {
            acc = axpy(&acc, &x, &vs[i]);
        }
        assert_eq!(acc, target);
    }
}
