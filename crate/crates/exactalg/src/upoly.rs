//! Dense univariate polynomials over an exact ring.
//!
//! Coefficients are stored from the constant term upwards with no trailing
//! zeros. Resultants use the subresultant algorithm (exact divisions only, no
//! content removal); a Sylvester determinant evaluated by fraction-free
//! Bareiss elimination is kept as an independent route.

use crate::error::AlgError;
use crate::mpoly::MPoly;
use crate::ring::{Field, Ring};
use crate::vars::{var, Var};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly<R: Ring> {
    c: Vec<R>,
}

impl<R: Ring> fmt::Debug for UPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly{:?}", self.c)
    }
}

impl<R: Ring> UPoly<R> {
    pub fn new(mut c: Vec<R>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(a: R) -> Self {
        Self::new(vec![a])
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        UPoly { c: vec![R::zero(), R::one()] }
    }

    /// `a * x^k`.
    pub fn monomial(a: R, k: usize) -> Self {
        let mut c = vec![R::zero(); k];
        c.push(a);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> R {
        self.c.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> R {
        self.c.last().cloned().unwrap_or_else(R::zero)
    }

    /// Multiplicity of the root at 0.
    pub fn low_order(&self) -> usize {
        self.c.iter().take_while(|x| x.is_zero()).count()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| self.coeff(k).sub(&o.coeff(k))).collect())
    }

    pub fn neg(&self) -> Self {
        UPoly { c: self.c.iter().map(|x| x.neg()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, a: &R) -> Self {
        Self::new(self.c.iter().map(|x| x.mul(a)).collect())
    }

    /// Coefficientwise exact division by a scalar.
    pub fn div_scalar(&self, a: &R) -> Option<Self> {
        let mut out = Vec::with_capacity(self.c.len());
        for x in &self.c {
            out.push(x.div_exact(a)?);
        }
        Some(Self::new(out))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(R::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(x).add(a);
        }
        acc
    }

    /// Composition `self(g)`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(g).add(&Self::constant(a.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.mul(&R::from_int(k as i64)))
                .collect(),
        )
    }

    /// `self(x) * x^n`, with `n = 0` meaning unchanged.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![R::zero(); n];
        c.extend(self.c.iter().cloned());
        Self::new(c)
    }

    /// Reverse with respect to the formal degree `n >= deg`: `x^n p(1/x)`.
    pub fn reverse(&self, n: usize) -> Self {
        assert!(self.is_zero() || self.deg() <= n);
        Self::new((0..=n).map(|k| self.coeff(n - k)).collect())
    }

    /// Pseudo-division: `(q, r)` with `lc(d)^(deg a - deg d + 1) a = q d + r`.
    pub fn pseudo_divide(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "pseudo-division by zero");
        let dd = d.deg();
        if self.is_zero() || self.deg() < dd {
            return (Self::zero(), self.clone());
        }
        let l = d.lc();
        let mut r = self.c.clone();
        let steps = self.deg() - dd + 1;
        let mut q = vec![R::zero(); steps];
        for k in (0..steps).rev() {
            let top = r[k + dd].clone();
            // r <- l * r - top * x^k * d
            for x in r.iter_mut() {
                *x = x.mul(&l);
            }
            for x in q.iter_mut() {
                *x = x.mul(&l);
            }
            q[k] = q[k].add(&top);
            if !top.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&top.mul(b));
                }
            }
            r.truncate(k + dd);
        }
        (Self::new(q), Self::new(r))
    }

    pub fn prem(&self, d: &Self) -> Self {
        self.pseudo_divide(d).1
    }

    /// Resultant by the subresultant algorithm.
    pub fn resultant(&self, o: &Self) -> R {
        if self.is_zero() || o.is_zero() {
            return R::zero();
        }
        let (mut a, mut b) = (self.clone(), o.clone());
        let mut s = R::one();
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
            if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
                s = s.neg();
            }
        }
        if b.deg() == 0 {
            return s.mul(&b.lc().pow(a.deg() as u32));
        }
        let mut g = R::one();
        let mut h = R::one();
        loop {
            let delta = a.deg() - b.deg();
            if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
                s = s.neg();
            }
            let r = a.prem(&b);
            if r.is_zero() {
                return R::zero();
            }
            a = b;
            let div = g.mul(&h.pow(delta as u32));
            b = r.div_scalar(&div).expect("subresultant division is exact");
            g = a.lc();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta as u32)
                    .div_exact(&h.pow(delta as u32 - 1))
                    .expect("subresultant division is exact")
            };
            if b.deg() == 0 {
                let da = a.deg() as u32;
                let t = b.lc().pow(da);
                let hh = if da == 0 { t.mul(&h) } else { t.div_exact(&h.pow(da - 1)).expect("exact") };
                return s.mul(&hh);
            }
        }
    }

    /// Resultant as the determinant of the Sylvester matrix.
    pub fn resultant_sylvester(&self, o: &Self) -> R {
        if self.is_zero() || o.is_zero() {
            return R::zero();
        }
        let (m, n) = (self.deg(), o.deg());
        let size = m + n;
        if size == 0 {
            return R::one();
        }
        let mut mat = vec![vec![R::zero(); size]; size];
        for i in 0..n {
            for k in 0..=m {
                mat[i][i + k] = self.coeff(m - k);
            }
        }
        for i in 0..m {
            for k in 0..=n {
                mat[n + i][i + k] = o.coeff(n - k);
            }
        }
        bareiss_det(mat)
    }

    /// `(-1)^(n(n-1)/2) Res(p, p') / lc(p)`.
    pub fn discriminant(&self) -> Result<R, AlgError> {
        let n = self.deg();
        if self.is_zero() || n < 1 {
            return Err(AlgError::DegreeTooLow(n));
        }
        if n == 1 {
            return Ok(R::one());
        }
        let r = self.resultant(&self.derivative());
        let r = if (n * (n - 1) / 2) % 2 == 1 { r.neg() } else { r };
        r.div_exact(&self.lc()).ok_or(AlgError::NotDivisible)
    }

    pub fn map<S: Ring, F: Fn(&R) -> S>(&self, f: F) -> UPoly<S> {
        UPoly::new(self.c.iter().map(f).collect())
    }
}

/// Fraction-free determinant (Bareiss) with row pivoting.
pub fn bareiss_det<R: Ring>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut sign = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = !sign;
                }
                None => return R::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = R::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

impl<R: Field> UPoly<R> {
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let inv = d.lc().inv().unwrap();
        let dd = d.deg();
        if self.is_zero() || self.deg() < dd {
            return (Self::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let mut q = vec![R::zero(); self.deg() - dd + 1];
        for k in (0..q.len()).rev() {
            let f = r[k + dd].mul(&inv);
            if !f.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&f.mul(b));
                }
            }
            q[k] = f;
            r.truncate(k + dd);
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lc().inv().unwrap())
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn div_exact_poly(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Yun's squarefree decomposition: pairs `(f_i, i)` with `f_i` monic,
    /// squarefree, pairwise coprime, nonconstant, and `self = lc * prod f_i^i`.
    /// Characteristic zero is assumed.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact_poly(&a0).unwrap();
        let mut c = fp.div_exact_poly(&a0).unwrap();
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.deg() > 0 {
            let a = b.gcd(&d);
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact_poly(&a).unwrap();
            c = d.div_exact_poly(&a).unwrap();
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }
}

/// Discriminant of `gc_n t^n + ... + gc_0` over `Q[gc_0..gc_n]`, cached.
pub fn generic_discriminant(n: usize) -> MPoly {
    static CACHE: OnceLock<Mutex<HashMap<usize, MPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&n) {
        return d.clone();
    }
    let d = UPoly::new(generic_coeffs("gc", n)).discriminant().expect("generic degree >= 1");
    cache.lock().unwrap().insert(n, d.clone());
    d
}

/// Resultant of generic polynomials of degrees `m` (coefficients `ga_i`)
/// and `n` (coefficients `gb_j`), cached.
pub fn generic_resultant(m: usize, n: usize) -> MPoly {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), MPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&(m, n)) {
        return d.clone();
    }
    let r = UPoly::new(generic_coeffs("ga", m)).resultant(&UPoly::new(generic_coeffs("gb", n)));
    cache.lock().unwrap().insert((m, n), r.clone());
    r
}

fn generic_coeffs(prefix: &str, n: usize) -> Vec<MPoly> {
    (0..=n).map(|i| MPoly::named(&format!("{prefix}{i}"))).collect()
}

fn generic_vars(prefix: &str, n: usize) -> Vec<Var> {
    (0..=n).map(|i| var(&format!("{prefix}{i}"))).collect()
}

impl UPoly<MPoly> {
    /// Discriminant through the cached generic formula: no divisions in
    /// the coefficient ring, which keeps large multivariate inputs cheap.
    pub fn discriminant_by_formula(&self) -> Result<MPoly, AlgError> {
        let n = self.deg();
        if self.is_zero() || n < 1 {
            return Err(AlgError::DegreeTooLow(n));
        }
        Ok(generic_discriminant(n).horner_substitute(&generic_vars("gc", n), &self.c))
    }

    /// Resultant through the cached generic formula.
    pub fn resultant_by_formula(&self, o: &Self) -> MPoly {
        if self.is_zero() || o.is_zero() {
            return MPoly::zero();
        }
        let (m, n) = (self.deg(), o.deg());
        let mut vars = generic_vars("ga", m);
        vars.extend(generic_vars("gb", n));
        let vals: Vec<MPoly> = self.c.iter().chain(&o.c).cloned().collect();
        generic_resultant(m, n).horner_substitute(&vars, &vals)
    }

    /// View `p` as a polynomial in `v` with polynomial coefficients.
    pub fn from_mpoly(p: &MPoly, v: Var) -> Self {
        Self::new(p.coeffs_in(v))
    }

    pub fn to_mpoly(&self, v: Var) -> MPoly {
        MPoly::from_coeffs_in(v, &self.c)
    }
}

impl<R: Ring> Ring for UPoly<R> {
    fn zero() -> Self {
        UPoly::zero()
    }
    fn one() -> Self {
        UPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        UPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        UPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        UPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        UPoly::neg(self)
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.deg() < d.deg() {
            return None;
        }
        // long division with exact leading-coefficient quotients
        let dd = d.deg();
        let l = d.lc();
        let mut r = self.c.clone();
        let mut q = vec![R::zero(); self.deg() - dd + 1];
        for k in (0..q.len()).rev() {
            let f = r[k + dd].div_exact(&l)?;
            if !f.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&f.mul(b));
                }
            }
            q[k] = f;
            r.truncate(k + dd);
        }
        if r.iter().all(|x| x.is_zero()) {
            Some(UPoly::new(q))
        } else {
            None
        }
    }
    fn from_int(n: i64) -> Self {
        UPoly::constant(R::from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Q;
    use crate::{mp, q, var};

    fn qp(v: &[i64]) -> UPoly<Q> {
        UPoly::new(v.iter().map(|&x| q(x, 1)).collect())
    }

    #[test]
    fn cubic_discriminant() {
        // x^3 + a x + b has discriminant -4a^3 - 27b^2
        let x = var("x");
        let p = UPoly::from_mpoly(&mp("x^3 + alpha*x + beta"), x);
        assert_eq!(p.discriminant().unwrap(), mp("-4*alpha^3 - 27*beta^2"));
    }

    #[test]
    fn resultant_routes_agree() {
        let x = var("x");
        let a = UPoly::from_mpoly(&mp("J2*x^3 + J3*x - 1"), x);
        let b = UPoly::from_mpoly(&mp("x^2 - J4*x + J5"), x);
        assert_eq!(a.resultant(&b), a.resultant_sylvester(&b));
        assert_eq!(b.resultant(&a), b.resultant_sylvester(&a));
    }

    #[test]
    fn squarefree_parts() {
        // (x-1)^2 (x+2)^3 x
        let p = qp(&[-1, 1]).pow(2).mul(&qp(&[2, 1]).pow(3)).mul(&qp(&[0, 1]));
        let sq = p.squarefree_decomposition();
        let mult: Vec<(usize, usize)> = sq.iter().map(|(f, i)| (f.deg(), *i)).collect();
        assert_eq!(mult, vec![(1, 1), (1, 2), (1, 3)]);
    }
}

#[cfg(test)]
mod formula_tests {
    use super::*;
    use crate::parse::parse_mpoly as mp;

    #[test]
    fn formulas_agree_with_subresultants() {
        let p = UPoly::new(vec![mp("x*y - 1").unwrap(), mp("3*y^2").unwrap(), mp("x + 2").unwrap(), mp("-y").unwrap()]);
        assert_eq!(p.discriminant_by_formula().unwrap(), p.discriminant().unwrap());
        let q = UPoly::new(vec![mp("x").unwrap(), mp("y - x^2").unwrap(), mp("5").unwrap()]);
        assert_eq!(p.resultant_by_formula(&q), p.resultant(&q));
        assert_eq!(q.resultant_by_formula(&p), q.resultant(&p));
    }
}
