//! Coxeter systems with exact rational realizations, Bruhat combinatorics,
//! reflections and Kazhdan–Lusztig polynomials.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::polylin::{act_matrix, Mat, Poly, PolyError};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoxeterError {
    #[error("coxeter matrix is not symmetric with unit diagonal")]
    BadCoxeterMatrix,
    #[error("realization shapes do not match")]
    DimensionMismatch,
    #[error("generator {0} is not an involution with a codimension-one fixed space")]
    NonInvolution(usize),
    #[error("product of generators {0} and {1} has the wrong order")]
    WrongBraidOrder(usize, usize),
    #[error("root of generator {0} is inconsistent with its fixed hyperplane")]
    RootMismatch(usize),
    #[error("unknown built-in type {0:?}")]
    UnknownType(String),
    #[error("element is not in the enumerated interval")]
    NotInInterval,
    #[error("word is not reduced")]
    NotReducedWord,
    #[error("group enumeration exceeded {0} elements")]
    TooLarge(usize),
    #[error("realization input: {0}")]
    Input(String),
}

/// A Coxeter system together with a rational realization on `V`.
#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    pub name: String,
    pub rank: usize,
    /// `m_st`, with 0 standing for infinity.
    pub coxeter_matrix: Vec<Vec<u32>>,
    pub dim_v: usize,
    /// Action of each simple reflection on `V` (column vectors).
    pub gens: Vec<Mat>,
    /// Root functional `α_s` as a row vector.
    pub alphas: Vec<Vec<Rat>>,
}

fn fixed_codim(m: &Mat) -> usize {
    m.add(&Mat::identity(m.rows).scale(&Rat::int(-1))).rank()
}

fn order_of(m: &Mat, bound: u32) -> Option<u32> {
    let id = Mat::identity(m.rows);
    let mut p = m.clone();
    for k in 1..=bound {
        if p == id {
            return Some(k);
        }
        p = p.mul(m);
    }
    None
}

/// Validates and assembles a system.
pub fn build_system(
    name: &str,
    coxeter_matrix: Vec<Vec<u32>>,
    gens: Vec<Mat>,
    alphas: Vec<Vec<Rat>>,
) -> Result<CoxeterSystem, CoxeterError> {
    let rank = coxeter_matrix.len();
    for (i, row) in coxeter_matrix.iter().enumerate() {
        if row.len() != rank || row[i] != 1 {
            return Err(CoxeterError::BadCoxeterMatrix);
        }
        for (j, &m) in row.iter().enumerate() {
            if m != coxeter_matrix[j][i] || (i != j && m == 1) {
                return Err(CoxeterError::BadCoxeterMatrix);
            }
        }
    }
    if gens.len() != rank || alphas.len() != rank {
        return Err(CoxeterError::DimensionMismatch);
    }
    let dim_v = gens.first().map(|m| m.rows).unwrap_or(0);
    for (i, m) in gens.iter().enumerate() {
        if m.rows != dim_v || m.cols != dim_v || alphas[i].len() != dim_v {
            return Err(CoxeterError::DimensionMismatch);
        }
        if m.mul(m) != Mat::identity(dim_v) || fixed_codim(m) != 1 {
            return Err(CoxeterError::NonInvolution(i));
        }
        let a = &alphas[i];
        if a.iter().all(|x| x.is_zero()) {
            return Err(CoxeterError::RootMismatch(i));
        }
        // α vanishes on Fix(s): every column of (M - I)^T ... equivalently α(v) = 0
        // whenever Mv = v. The fixed space is the kernel of M - I.
        let shifted = m.add(&Mat::identity(dim_v).scale(&Rat::int(-1)));
        let fix = crate::polylin::linalg::kernel(
            dim_v,
            (0..dim_v).map(|r| crate::polylin::linalg::sparse(shifted.row(r))),
        );
        for v in &fix {
            let dv = crate::polylin::linalg::dense(v, dim_v);
            let val: Rat = a
                .iter()
                .zip(&dv)
                .fold(Rat::zero(), |acc, (x, y)| &acc + &(x * y));
            if !val.is_zero() {
                return Err(CoxeterError::RootMismatch(i));
            }
        }
        let sa = m.apply_row(a);
        if sa.iter().zip(a).any(|(x, y)| x != &-y) {
            return Err(CoxeterError::RootMismatch(i));
        }
    }
    for i in 0..rank {
        for j in (i + 1)..rank {
            let p = gens[i].mul(&gens[j]);
            let want = coxeter_matrix[i][j];
            let got = order_of(&p, if want == 0 { 64 } else { want });
            let ok = if want == 0 {
                got.is_none()
            } else {
                got == Some(want)
            };
            if !ok {
                return Err(CoxeterError::WrongBraidOrder(i, j));
            }
        }
    }
    Ok(CoxeterSystem {
        name: name.to_string(),
        rank,
        coxeter_matrix,
        dim_v,
        gens,
        alphas,
    })
}

/// Cartan-matrix realization: `s_i(α_j) = α_j − a_ij α_i`.
pub fn from_cartan(name: &str, a: &[Vec<i64>]) -> Result<CoxeterSystem, CoxeterError> {
    let n = a.len();
    let mut gens = Vec::new();
    let mut alphas = Vec::new();
    for i in 0..n {
        let mut m = Mat::identity(n);
        for j in 0..n {
            let v = m.get(j, i) - &Rat::int(a[i][j]);
            m.set(j, i, v);
        }
        gens.push(m);
        let mut al = vec![Rat::zero(); n];
        al[i] = Rat::one();
        alphas.push(al);
    }
    let mut cm = vec![vec![1u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                cm[i][j] = match a[i][j] * a[j][i] {
                    0 => 2,
                    1 => 3,
                    2 => 4,
                    3 => 6,
                    _ => 0,
                };
            }
        }
    }
    build_system(name, cm, gens, alphas)
}

pub const BUILTIN: [&str; 6] = ["A1", "A1xA1", "A2", "B2", "G2", "A3"];

pub fn builtin(name: &str) -> Result<CoxeterSystem, CoxeterError> {
    let a: Vec<Vec<i64>> = match name {
        "A1" => vec![vec![2]],
        "A1xA1" => vec![vec![2, 0], vec![0, 2]],
        "A2" => vec![vec![2, -1], vec![-1, 2]],
        "B2" => vec![vec![2, -2], vec![-1, 2]],
        "G2" => vec![vec![2, -1], vec![-3, 2]],
        "A3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
        _ => return Err(CoxeterError::UnknownType(name.to_string())),
    };
    from_cartan(name, &a)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorInput {
    pub matrix: Vec<Vec<Rat>>,
    pub alpha: Vec<Rat>,
}

/// JSON realization file format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationInput {
    pub rank: usize,
    pub coxeter_matrix: Vec<Vec<u32>>,
    #[serde(rename = "dimV")]
    pub dim_v: usize,
    pub generators: Vec<GeneratorInput>,
}

impl RealizationInput {
    pub fn build(&self, name: &str) -> Result<CoxeterSystem, CoxeterError> {
        if self.generators.len() != self.rank || self.coxeter_matrix.len() != self.rank {
            return Err(CoxeterError::DimensionMismatch);
        }
        let mut gens = Vec::new();
        let mut alphas = Vec::new();
        for g in &self.generators {
            if g.matrix.len() != self.dim_v || g.matrix.iter().any(|r| r.len() != self.dim_v) {
                return Err(CoxeterError::DimensionMismatch);
            }
            gens.push(Mat::from_rows(&g.matrix));
            alphas.push(g.alpha.clone());
        }
        build_system(name, self.coxeter_matrix.clone(), gens, alphas)
    }
}

impl CoxeterSystem {
    pub fn to_input(&self) -> RealizationInput {
        RealizationInput {
            rank: self.rank,
            coxeter_matrix: self.coxeter_matrix.clone(),
            dim_v: self.dim_v,
            generators: self
                .gens
                .iter()
                .zip(&self.alphas)
                .map(|(m, a)| GeneratorInput {
                    matrix: (0..m.rows).map(|i| m.row(i).to_vec()).collect(),
                    alpha: a.clone(),
                })
                .collect(),
        }
    }

    pub fn is_finite_type(&self) -> bool {
        self.coxeter_matrix.iter().flatten().all(|&m| m != 0)
    }
}

/// A group element: its matrix (the canonical key), length and a reduced word.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    pub matrix: Mat,
    pub inverse: Mat,
    pub length: usize,
    pub word: Vec<usize>,
}

impl Element {
    /// Dual action on polynomials: `w·p = p ∘ w⁻¹`.
    pub fn act(&self, p: &Poly) -> Result<Poly, PolyError> {
        act_matrix(&self.inverse, p)
    }

    /// Dual action on a linear form given as a row vector.
    pub fn act_linear(&self, l: &[Rat]) -> Vec<Rat> {
        self.inverse.apply_row(l)
    }

    pub fn word_string(&self) -> String {
        word_string(&self.word)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word_string())
    }
}

pub fn word_string(w: &[usize]) -> String {
    if w.is_empty() {
        "e".into()
    } else {
        w.iter().map(|i| format!("s{}", i + 1)).collect()
    }
}

/// Parses `e`, `s1s2s1`, or a digit string `121` into zero-based letters.
pub fn parse_word(s: &str, rank: usize) -> Result<Vec<usize>, CoxeterError> {
    let t = s.trim();
    if t.is_empty() || t == "e" {
        return Ok(Vec::new());
    }
    let digits: String = t
        .chars()
        .filter(|c| *c != 's' && *c != ',' && *c != ' ')
        .collect();
    let mut out = Vec::new();
    if t.contains('s') {
        for part in t.split('s').filter(|p| !p.is_empty()) {
            let k: usize = part
                .trim_matches(',')
                .parse()
                .map_err(|_| CoxeterError::Input(s.into()))?;
            out.push(k);
        }
    } else {
        for c in digits.chars() {
            out.push(
                c.to_digit(10)
                    .ok_or_else(|| CoxeterError::Input(s.into()))? as usize,
            );
        }
    }
    out.into_iter()
        .map(|k| {
            if k >= 1 && k <= rank {
                Ok(k - 1)
            } else {
                Err(CoxeterError::Input(format!(
                    "letter {k} out of range in {s:?}"
                )))
            }
        })
        .collect()
}

fn key_cmp(a: &Mat, b: &Mat) -> std::cmp::Ordering {
    a.data.cmp(&b.data)
}

/// The elements of a finite group, or of a length ball in an infinite one,
/// sorted by (length, matrix entries).
#[derive(Debug)]
pub struct Group {
    pub sys: Arc<CoxeterSystem>,
    pub elems: Vec<Element>,
    index: HashMap<Vec<Rat>, usize>,
    /// Whether every group element was enumerated.
    pub complete: bool,
    left_gen: Vec<Vec<Option<usize>>>,
    right_gen: Vec<Vec<Option<usize>>>,
    inv: Vec<Option<usize>>,
    reflections: Vec<usize>,
    subwords: Mutex<HashMap<usize, Arc<HashSet<usize>>>>,
}

pub const ENUMERATION_LIMIT: usize = 20_000;

impl Group {
    /// Enumerates the whole group (finite type) or the ball of radius `max_len`.
    pub fn new(sys: Arc<CoxeterSystem>, max_len: Option<usize>) -> Result<Group, CoxeterError> {
        let n = sys.dim_v;
        let id = Element {
            matrix: Mat::identity(n),
            inverse: Mat::identity(n),
            length: 0,
            word: vec![],
        };
        let mut seen: HashMap<Vec<Rat>, usize> = HashMap::new();
        let mut elems = vec![id.clone()];
        seen.insert(id.matrix.data.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        let mut complete = true;
        while let Some(i) = queue.pop_front() {
            if let Some(l) = max_len {
                if elems[i].length >= l {
                    complete = false;
                    continue;
                }
            }
            for (s, g) in sys.gens.iter().enumerate() {
                let m = elems[i].matrix.mul(g);
                if seen.contains_key(&m.data) {
                    continue;
                }
                let inv = g.mul(&elems[i].inverse);
                let mut word = elems[i].word.clone();
                word.push(s);
                let e = Element {
                    matrix: m,
                    inverse: inv,
                    length: elems[i].length + 1,
                    word,
                };
                seen.insert(e.matrix.data.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(e);
                if elems.len() > ENUMERATION_LIMIT {
                    return Err(CoxeterError::TooLarge(ENUMERATION_LIMIT));
                }
            }
        }
        elems.sort_by(|a, b| {
            a.length
                .cmp(&b.length)
                .then_with(|| key_cmp(&a.matrix, &b.matrix))
        });
        let index: HashMap<Vec<Rat>, usize> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.matrix.data.clone(), i))
            .collect();
        let look = |m: &Mat| index.get(&m.data).copied();
        let left_gen = sys
            .gens
            .iter()
            .map(|g| elems.iter().map(|e| look(&g.mul(&e.matrix))).collect())
            .collect();
        let right_gen = sys
            .gens
            .iter()
            .map(|g| elems.iter().map(|e| look(&e.matrix.mul(g))).collect())
            .collect();
        let inv = elems.iter().map(|e| look(&e.inverse)).collect();
        let mut refl = HashSet::new();
        for e in &elems {
            for g in &sys.gens {
                let t = e.matrix.mul(g).mul(&e.inverse);
                if let Some(i) = look(&t) {
                    refl.insert(i);
                }
            }
        }
        let mut reflections: Vec<usize> = refl.into_iter().collect();
        reflections.sort();
        Ok(Group {
            sys,
            elems,
            index,
            complete,
            left_gen,
            right_gen,
            inv,
            reflections,
            subwords: Mutex::new(HashMap::new()),
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elem(&self, i: usize) -> &Element {
        &self.elems[i]
    }

    pub fn length(&self, i: usize) -> usize {
        self.elems[i].length
    }

    pub fn lookup(&self, m: &Mat) -> Option<usize> {
        self.index.get(&m.data).copied()
    }

    pub fn from_word(&self, w: &[usize]) -> Option<usize> {
        let mut m = Mat::identity(self.sys.dim_v);
        for &s in w {
            m = m.mul(&self.sys.gens[s]);
        }
        self.lookup(&m)
    }

    pub fn parse(&self, s: &str) -> Result<usize, CoxeterError> {
        let w = parse_word(s, self.sys.rank)?;
        self.from_word(&w).ok_or(CoxeterError::NotInInterval)
    }

    pub fn left_mul_gen(&self, s: usize, x: usize) -> Option<usize> {
        self.left_gen[s][x]
    }

    pub fn right_mul_gen(&self, x: usize, s: usize) -> Option<usize> {
        self.right_gen[s][x]
    }

    pub fn mul(&self, x: usize, y: usize) -> Option<usize> {
        self.lookup(&self.elems[x].matrix.mul(&self.elems[y].matrix))
    }

    pub fn inverse(&self, x: usize) -> Option<usize> {
        self.inv[x]
    }

    /// `sx < x`.
    pub fn is_left_descent(&self, s: usize, x: usize) -> bool {
        match self.left_gen[s][x] {
            Some(y) => self.length(y) < self.length(x),
            None => false,
        }
    }

    /// `xs < x`.
    pub fn is_right_descent(&self, x: usize, s: usize) -> bool {
        match self.right_gen[s][x] {
            Some(y) => self.length(y) < self.length(x),
            None => false,
        }
    }

    /// Indices of reflections present in the enumerated set.
    pub fn reflections(&self) -> &[usize] {
        &self.reflections
    }

    /// Normalized root of a reflection: first nonzero row of `M_t − I`,
    /// scaled so that its first nonzero entry is 1.
    pub fn reflection_root(&self, t: usize) -> Vec<Rat> {
        root_of_reflection(&self.elems[t].matrix)
    }

    /// Set of subword products of the stored reduced word of `w`.
    pub fn subword_set(&self, w: usize) -> Arc<HashSet<usize>> {
        if let Some(s) = self.subwords.lock().unwrap().get(&w) {
            return s.clone();
        }
        let mut cur: HashSet<Vec<Rat>> = HashSet::from([Mat::identity(self.sys.dim_v).data]);
        for &s in &self.elems[w].word {
            let g = &self.sys.gens[s];
            let mut next = cur.clone();
            for d in &cur {
                let m = Mat {
                    rows: g.rows,
                    cols: g.cols,
                    data: d.clone(),
                }
                .mul(g);
                next.insert(m.data);
            }
            cur = next;
        }
        let set: HashSet<usize> = cur
            .iter()
            .filter_map(|d| self.index.get(d).copied())
            .collect();
        let set = Arc::new(set);
        self.subwords.lock().unwrap().insert(w, set.clone());
        set
    }

    /// Bruhat order by the subword criterion.
    pub fn bruhat_leq(&self, x: usize, y: usize) -> bool {
        self.length(x) <= self.length(y) && self.subword_set(y).contains(&x)
    }

    /// `{y ≤ w}` sorted by length then key.
    pub fn interval(&self, w: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.subword_set(w).iter().copied().collect();
        v.sort();
        v
    }

    /// Every reflection pair `(t, x, tx)` inside `interval` with `x < tx`.
    pub fn reflections_between(
        &self,
        interval: &[usize],
    ) -> Result<Vec<(usize, usize, usize)>, CoxeterError> {
        let inside: HashSet<usize> = interval.iter().copied().collect();
        let mut out = Vec::new();
        for &x in interval {
            for &t in &self.reflections {
                let Some(y) = self.mul(t, x) else { continue };
                if inside.contains(&y) && self.length(y) > self.length(x) {
                    out.push((t, x, y));
                }
            }
        }
        out.sort_by_key(|&(t, x, y)| (x, y, t));
        Ok(out)
    }

    /// All reduced words of `w`.
    pub fn reduced_words(&self, w: usize) -> Vec<Vec<usize>> {
        if self.length(w) == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for s in 0..self.sys.rank {
            if let Some(v) = self.left_mul_gen(s, w) {
                if self.length(v) + 1 == self.length(w) {
                    for mut rest in self.reduced_words(v) {
                        rest.insert(0, s);
                        out.push(rest);
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_reduced(&self, word: &[usize]) -> bool {
        self.from_word(word)
            .map(|w| self.length(w) == word.len())
            .unwrap_or(false)
    }

    /// Longest element of a finite group.
    pub fn longest(&self) -> Option<usize> {
        if self.complete {
            Some(self.elems.len() - 1)
        } else {
            None
        }
    }
}

pub fn root_of_reflection(m: &Mat) -> Vec<Rat> {
    let n = m.rows;
    for i in 0..n {
        let row: Vec<Rat> = (0..n)
            .map(|j| {
                if i == j {
                    m.get(i, j) - &Rat::one()
                } else {
                    m.get(i, j).clone()
                }
            })
            .collect();
        if let Some(p) = row.iter().find(|x| !x.is_zero()).cloned() {
            return row.iter().map(|x| x / &p).collect();
        }
    }
    panic!("identity matrix has no root")
}

/// Outcome of the reflection-faithfulness check.
#[derive(Debug, Clone, Serialize)]
pub struct FaithfulReport {
    pub checked: usize,
    pub violations: Vec<String>,
    /// False when only a finite interval of an infinite group was examined.
    pub global: bool,
}

impl FaithfulReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every element of `interval`, the fixed space has codimension one
/// exactly when the element is a reflection.
pub fn check_reflection_faithful(g: &Group, interval: &[usize]) -> FaithfulReport {
    let refl: HashSet<usize> = g.reflections().iter().copied().collect();
    let mut violations = Vec::new();
    for &w in interval {
        let codim = fixed_codim(&g.elem(w).matrix);
        if (codim == 1) != refl.contains(&w) {
            violations.push(format!(
                "{} has fixed-space codimension {}",
                g.elem(w).word_string(),
                codim
            ));
        }
    }
    FaithfulReport {
        checked: interval.len(),
        violations,
        global: g.complete && interval.len() == g.len(),
    }
}

/// Integer polynomial in `q`, coefficients by ascending power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly(pub Vec<i64>);

impl QPoly {
    pub fn one() -> QPoly {
        QPoly(vec![1])
    }

    pub fn zero() -> QPoly {
        QPoly(vec![])
    }

    fn trim(mut self) -> QPoly {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect()).trim()
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect()).trim()
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![0i64; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly(c).trim()
    }

    pub fn shift(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.0);
        QPoly(c)
    }

    pub fn scale(&self, s: i64) -> QPoly {
        QPoly(self.0.iter().map(|c| c * s).collect()).trim()
    }

    pub fn eval1(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let a = c.abs();
            let body = match (i, a) {
                (0, _) => a.to_string(),
                (1, 1) => "q".into(),
                (1, _) => format!("{a}q"),
                (_, 1) => format!("q^{i}"),
                _ => format!("{a}q^{i}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// Memoized Kazhdan–Lusztig polynomials `P_{y,x}` on a group or ball.
pub struct KLTable<'g> {
    g: &'g Group,
    memo: Mutex<HashMap<(usize, usize), QPoly>>,
}

impl<'g> KLTable<'g> {
    pub fn new(g: &'g Group) -> KLTable<'g> {
        KLTable {
            g,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn mu(&self, z: usize, v: usize) -> i64 {
        let (lz, lv) = (self.g.length(z), self.g.length(v));
        if lz >= lv || (lv - lz) % 2 == 0 || !self.g.bruhat_leq(z, v) {
            return 0;
        }
        self.p(z, v).coeff((lv - lz - 1) / 2)
    }

    /// `P_{x,w}` by the descent recursion.
    pub fn p(&self, x: usize, w: usize) -> QPoly {
        if let Some(v) = self.memo.lock().unwrap().get(&(x, w)) {
            return v.clone();
        }
        let g = self.g;
        let res = if !g.bruhat_leq(x, w) {
            QPoly::zero()
        } else if x == w {
            QPoly::one()
        } else {
            let s = (0..g.sys.rank)
                .find(|&s| g.is_left_descent(s, w))
                .expect("nonidentity has a descent");
            let v = g.left_mul_gen(s, w).unwrap();
            let sx = g.left_mul_gen(s, x).expect("sx inside enumerated set");
            let c = usize::from(g.length(sx) < g.length(x));
            let mut acc = self.p(sx, v).shift(1 - c).add(&self.p(x, v).shift(c));
            let lw = g.length(w);
            for z in g.interval(v) {
                if z == v || !g.is_left_descent(s, z) || !g.bruhat_leq(x, z) {
                    continue;
                }
                let m = self.mu(z, v);
                if m != 0 {
                    let k = (lw - g.length(z)) / 2;
                    acc = acc.sub(&self.p(x, z).shift(k).scale(m));
                }
            }
            acc
        };
        self.memo.lock().unwrap().insert((x, w), res.clone());
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(name: &str) -> Group {
        Group::new(Arc::new(builtin(name).unwrap()), None).unwrap()
    }

    #[test]
    fn group_orders() {
        for (n, k) in [
            ("A1", 2),
            ("A1xA1", 4),
            ("A2", 6),
            ("B2", 8),
            ("G2", 12),
            ("A3", 24),
        ] {
            assert_eq!(group(n).len(), k, "{n}");
        }
    }

    #[test]
    fn reflection_counts() {
        assert_eq!(group("A2").reflections().len(), 3);
        assert_eq!(group("B2").reflections().len(), 4);
        assert_eq!(group("A3").reflections().len(), 6);
    }

    #[test]
    fn wrong_braid_order_is_rejected() {
        let a2 = builtin("A2").unwrap();
        let err = build_system(
            "bad",
            vec![vec![1, 6], vec![6, 1]],
            a2.gens.clone(),
            a2.alphas.clone(),
        );
        assert_eq!(err.unwrap_err(), CoxeterError::WrongBraidOrder(0, 1));
    }

    #[test]
    fn a2_bruhat_examples() {
        let g = group("A2");
        let s = g.parse("s1").unwrap();
        let st = g.parse("s1s2").unwrap();
        let ts = g.parse("s2s1").unwrap();
        let w0 = g.parse("s1s2s1").unwrap();
        assert!(g.bruhat_leq(s, w0));
        assert!(!g.bruhat_leq(st, ts));
        assert_eq!(g.interval(w0).len(), 6);
        assert_eq!(g.reflections_between(&g.interval(w0)).unwrap().len(), 9);
        assert_eq!(g.reflections_between(&g.interval(st)).unwrap().len(), 4);
    }

    #[test]
    fn simple_reflection_acts_on_roots() {
        let g = group("A2");
        let s = g.elem(g.parse("s1").unwrap());
        let at = vec![Rat::zero(), Rat::one()];
        assert_eq!(s.act_linear(&at), vec![Rat::one(), Rat::one()]);
        let as_ = vec![Rat::one(), Rat::zero()];
        assert_eq!(s.act_linear(&as_), vec![Rat::int(-1), Rat::zero()]);
    }

    #[test]
    fn kl_examples() {
        let g = group("A3");
        let kl = KLTable::new(&g);
        let y = g.parse("s2").unwrap();
        let x = g.parse("s2s1s3s2").unwrap();
        assert_eq!(kl.p(y, x), QPoly(vec![1, 1]));
        assert_eq!(kl.p(y, x).to_string(), "1+q");
        let a2 = group("A2");
        let kl2 = KLTable::new(&a2);
        for x in 0..6 {
            for y in 0..6 {
                let expect = if a2.bruhat_leq(y, x) {
                    QPoly::one()
                } else {
                    QPoly::zero()
                };
                assert_eq!(kl2.p(y, x), expect);
            }
        }
    }

    #[test]
    fn word_parsing() {
        assert_eq!(parse_word("s2s1s3s2", 3).unwrap(), vec![1, 0, 2, 1]);
        assert_eq!(parse_word("121", 2).unwrap(), vec![0, 1, 0]);
        assert_eq!(parse_word("e", 2).unwrap(), Vec::<usize>::new());
        assert!(parse_word("s3", 2).is_err());
    }

    #[test]
    fn faithfulness_reports() {
        for n in ["A2", "B2"] {
            let g = group(n);
            let all: Vec<usize> = (0..g.len()).collect();
            let r = check_reflection_faithful(&g, &all);
            assert!(r.pass() && r.global, "{n}: {:?}", r.violations);
        }
    }
}
