//! Sparse multivariate polynomials over `Rat`.
//!
//! Degrees follow the convention that a linear form has degree 2, so
//! [`Poly::degree`] is twice the total monomial degree.

use std::collections::HashMap;
use std::fmt;

use super::PolyError;
use crate::rat::Rat;

/// Maximum number of variables a packed monomial can hold.
pub const MAX_VARS: usize = 8;

/// Exponent vector packed into a `u64`, eight bits per variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(i: usize) -> Mono {
        assert!(i < MAX_VARS);
        Mono(1u64 << (8 * i))
    }

    pub fn from_exps(e: &[u32]) -> Mono {
        assert!(e.len() <= MAX_VARS);
        let mut m = 0u64;
        for (i, &x) in e.iter().enumerate() {
            assert!(x < 256, "exponent overflow");
            m |= (x as u64) << (8 * i);
        }
        Mono(m)
    }

    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (8 * i)) & 0xff) as u32
    }

    pub fn exps(self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.exp(i)).collect()
    }

    /// Total monomial degree.
    pub fn total(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exp(i)).sum()
    }

    pub fn mul(self, o: Mono) -> Mono {
        for i in 0..MAX_VARS {
            assert!(self.exp(i) + o.exp(i) < 256, "exponent overflow");
        }
        Mono(self.0 + o.0)
    }

    pub fn div(self, o: Mono) -> Option<Mono> {
        for i in 0..MAX_VARS {
            if self.exp(i) < o.exp(i) {
                return None;
            }
        }
        Some(Mono(self.0 - o.0))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps(MAX_VARS))
    }
}

/// Polynomial in `nvars` variables; terms sorted by monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Mono, Rat)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Poly {
        Poly::monomial(nvars, Mono::ONE, c)
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Rat::one())
    }

    pub fn monomial(nvars: usize, m: Mono, c: Rat) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        Poly::monomial(nvars, Mono::var(i), Rat::one())
    }

    /// The linear form `Σ c_i x_i`.
    pub fn linear(c: &[Rat]) -> Poly {
        let n = c.len();
        let mut terms: Vec<(Mono, Rat)> = c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (Mono::var(i), x.clone()))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { nvars: n, terms }
    }

    /// Builds a polynomial from unsorted terms, merging duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Mono, Rat)>) -> Poly {
        let mut map: HashMap<Mono, Rat> = HashMap::new();
        for (m, c) in terms {
            let e = map.entry(m).or_insert_with(Rat::zero);
            *e += &c;
        }
        let mut terms: Vec<(Mono, Rat)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> Rat {
        match self.terms.binary_search_by(|t| t.0.cmp(&m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    /// Degree (twice the monomial degree) if homogeneous and nonzero.
    pub fn degree(&self) -> Option<i32> {
        let first = self.terms.first()?.0.total();
        if self.terms.iter().all(|t| t.0.total() == first) {
            Some(2 * first as i32)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Linear coefficients when the polynomial is a linear form.
    pub fn linear_coeffs(&self) -> Option<Vec<Rat>> {
        let mut c = vec![Rat::zero(); self.nvars];
        for (m, x) in &self.terms {
            if m.total() != 1 {
                return None;
            }
            let i = (0..self.nvars).find(|&i| m.exp(i) == 1).unwrap();
            c[i] = x.clone();
        }
        Some(c)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: Mono) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (k.mul(m), x.clone()))
                .collect(),
        }
    }

    fn merge(&self, o: &Poly, sign: bool) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            let take_left =
                j >= o.terms.len() || (i < self.terms.len() && self.terms[i].0 < o.terms[j].0);
            let take_right =
                i >= self.terms.len() || (j < o.terms.len() && o.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                let c = if sign {
                    o.terms[j].1.clone()
                } else {
                    -&o.terms[j].1
                };
                out.push((o.terms[j].0, c));
                j += 1;
            } else {
                let c = if sign {
                    &self.terms[i].1 + &o.terms[j].1
                } else {
                    &self.terms[i].1 - &o.terms[j].1
                };
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Poly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.merge(o, true)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.merge(o, false)
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Rat::int(-1))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut map: HashMap<Mono, Rat> = HashMap::with_capacity(self.terms.len() * o.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let e = map.entry(a.mul(*b)).or_insert_with(Rat::zero);
                *e += &(x * y);
            }
        }
        let mut terms: Vec<(Mono, Rat)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Ring substitution `x_i ↦ images[i]`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars, "substitution arity");
        let n = images.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::one(n)]; self.nvars];
        let mut acc = Poly::zero(n);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(n, c.clone());
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exp(i) as usize;
                while pw.len() <= e {
                    let next = pw.last().unwrap().mul(&images[i]);
                    pw.push(next);
                }
                if e > 0 {
                    t = t.mul(&pw[e]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Normal form modulo a nonzero linear form: the variable carrying the
    /// first nonzero coefficient of `alpha` is eliminated.
    pub fn reduce_mod_linear(&self, alpha: &[Rat]) -> Result<Poly, PolyError> {
        let (j, cj) = pivot_of(alpha)?;
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                if i == j {
                    let c: Vec<Rat> = alpha
                        .iter()
                        .enumerate()
                        .map(|(k, a)| if k == j { Rat::zero() } else { -&(a / cj) })
                        .collect();
                    Poly::linear(&c)
                } else {
                    Poly::var(self.nvars, i)
                }
            })
            .collect();
        Ok(self.substitute(&images))
    }

    /// Exact quotient `p / alpha` for a linear form `alpha`.
    pub fn divide_exact(&self, alpha: &[Rat]) -> Result<Poly, PolyError> {
        let (j, cj) = pivot_of(alpha)?;
        let lin = Poly::linear(alpha);
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        loop {
            let lead = rem
                .terms
                .iter()
                .filter(|(m, _)| m.exp(j) > 0)
                .max_by_key(|(m, _)| (m.exp(j), *m))
                .cloned();
            let Some((m, c)) = lead else { break };
            let q = m.div(Mono::var(j)).unwrap();
            let qc = &c / cj;
            quo = quo.add(&Poly::monomial(self.nvars, q, qc.clone()));
            rem = rem.sub(&lin.mul_mono(q).scale(&qc));
        }
        if rem.is_zero() {
            Ok(quo)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    /// Leading term in the packed-exponent (lexicographic) order.
    pub fn lead(&self) -> Option<&(Mono, Rat)> {
        self.terms.last()
    }

    /// Exact quotient by an arbitrary nonzero polynomial.
    pub fn divide_poly(&self, d: &Poly) -> Result<Poly, PolyError> {
        let (dm, dc) = d.lead().cloned().ok_or(PolyError::ZeroDivisor)?;
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.lead().cloned() {
            let q = m.div(dm).ok_or(PolyError::NotDivisible)?;
            let qc = &c / &dc;
            quo = quo.add(&Poly::monomial(self.nvars, q, qc.clone()));
            rem = rem.sub(&d.mul_mono(q).scale(&qc));
        }
        Ok(quo)
    }

    /// Human-readable form in variables `x1, x2, ...`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = (0..self.nvars)
                .filter(|&i| m.exp(i) > 0)
                .map(|i| {
                    if m.exp(i) == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, m.exp(i))
                    }
                })
                .collect();
            let neg = c.signum() < 0;
            let abs = if neg { -c } else { c.clone() };
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if mono.is_empty() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

fn pivot_of(alpha: &[Rat]) -> Result<(usize, &Rat), PolyError> {
    alpha
        .iter()
        .enumerate()
        .find(|(_, a)| !a.is_zero())
        .ok_or(PolyError::ZeroDivisor)
}
