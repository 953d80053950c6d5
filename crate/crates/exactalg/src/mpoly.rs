//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept sorted in descending graded-lexicographic order (total
//! degree first, then lexicographic with lower registry index more
//! significant) with no zero coefficients, so structural equality is
//! polynomial equality.

use crate::error::AlgError;
use crate::ring::{fmt_q, q_is_negative, Ring, Q};
use crate::vars::{var_name, Var};
use num::Signed;
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Sparse exponent vector: `(var index, exponent)` pairs, ascending by index,
/// exponents nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub SmallVec<[(u16, u16); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var, e: u16) -> Self {
        let mut m = SmallVec::new();
        if e > 0 {
            m.push((v.0, e));
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0
            .iter()
            .find(|&&(i, _)| i == v.0)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / o` if `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < o.0.len() && o.0[j].0 < v {
                return None;
            }
            if j < o.0.len() && o.0[j].0 == v {
                let f = o.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for &(v, e) in &self.0 {
            let f = o.exp(Var(v));
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Monomial(out)
    }

    /// Removes variable `v`, returning its exponent and the rest.
    pub fn split_var(&self, v: Var) -> (u16, Monomial) {
        let mut e = 0;
        let mut rest = SmallVec::with_capacity(self.0.len());
        for &(i, k) in &self.0 {
            if i == v.0 {
                e = k;
            } else {
                rest.push((i, k));
            }
        }
        (e, Monomial(rest))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(i, _)| Var(i))
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            c => return c,
        }
        let (a, b) = (&self.0, &o.0);
        let n = a.len().min(b.len());
        for k in 0..n {
            if a[k] != b[k] {
                if a[k].0 != b[k].0 {
                    // the one holding the lower-index variable is larger
                    return if a[k].0 < b[k].0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
                return a[k].1.cmp(&b[k].1);
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Multivariate polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: Vec<(Monomial, Q)>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MPoly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Q::from_integer(n.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v, 1), Q::one())
    }

    pub fn named(name: &str) -> Self {
        Self::var(crate::vars::var(name))
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            MPoly { terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary terms, combining duplicates and sorting.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(it: I) -> Self {
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in it {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(x) => *x += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Q>) -> Self {
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MPoly { terms }
    }

    fn from_sorted(terms: Vec<(Monomial, Q)>) -> Self {
        MPoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.terms.is_empty() {
            Some(Q::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn lc(&self) -> Q {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn deg_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v) as u32).max().unwrap_or(0)
    }

    pub fn min_deg_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v) as u32).min().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    /// Sorted list of variables that occur.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.iter().flat_map(|t| t.0.vars()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MPoly::from_sorted(self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        // multiplication by a monomial preserves the order
        MPoly::from_sorted(self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect())
    }

    fn merge(&self, o: &MPoly, negate: bool) -> MPoly {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        MPoly::from_sorted(out)
    }

    fn mul_impl(&self, o: &MPoly) -> MPoly {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return o.mul_monomial(m, c);
        }
        if o.terms.len() == 1 {
            let (m, c) = &o.terms[0];
            return self.mul_monomial(m, c);
        }
        let (small, big) = if self.terms.len() <= o.terms.len() { (self, o) } else { (o, self) };
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(big.terms.len() * 2);
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    pub fn pow(&self, e: u32) -> MPoly {
        Ring::pow(self, e)
    }

    /// Coefficients with respect to `v`: entry `k` is the coefficient of `v^k`.
    pub fn coeffs_in(&self, v: Var) -> Vec<MPoly> {
        let d = self.deg_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|b| {
                let mut b = b;
                b.sort_unstable_by(|x, y| y.0.cmp(&x.0));
                MPoly::from_sorted(b)
            })
            .collect()
    }

    /// Inverse of [`MPoly::coeffs_in`].
    pub fn from_coeffs_in(v: Var, cs: &[MPoly]) -> MPoly {
        let mut terms = Vec::new();
        for (k, c) in cs.iter().enumerate() {
            let vm = Monomial::var(v, k as u16);
            for (m, x) in &c.terms {
                terms.push((m.mul(&vm), x.clone()));
            }
        }
        MPoly::from_terms(terms)
    }

    /// Coefficient of `v^k`.
    pub fn coeff_of(&self, v: Var, k: u32) -> MPoly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if e as u32 == k {
                out.push((rest, c.clone()));
            }
        }
        out.sort_unstable_by(|x, y| y.0.cmp(&x.0));
        MPoly::from_sorted(out)
    }

    pub fn derivative(&self, v: Var) -> MPoly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if e > 0 {
                let nm = rest.mul(&Monomial::var(v, e - 1));
                out.push((nm, c * Q::from_integer(e.into())));
            }
        }
        MPoly::from_terms(out)
    }

    /// Simultaneous substitution of polynomials for variables.
    pub fn substitute(&self, map: &[(Var, MPoly)]) -> MPoly {
        if map.is_empty() {
            return self.clone();
        }
        let mut cache: HashMap<(u16, u16), MPoly> = HashMap::new();
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in &self.terms {
            let mut keep = SmallVec::new();
            let mut factor = MPoly::constant(c.clone());
            for &(i, e) in &m.0 {
                if let Some((_, val)) = map.iter().find(|(w, _)| w.0 == i) {
                    let p = cache.entry((i, e)).or_insert_with(|| val.pow(e as u32)).clone();
                    factor = &factor * &p;
                } else {
                    keep.push((i, e));
                }
            }
            let km = Monomial(keep);
            for (fm, fc) in factor.terms {
                let nm = fm.mul(&km);
                match acc.get_mut(&nm) {
                    Some(x) => *x += fc,
                    None => {
                        acc.insert(nm, fc);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    /// Substitutes `vals[i]` for `vars[i]` by nested Horner evaluation in
    /// the listed order; variables not listed stay symbolic.
    pub fn horner_substitute(&self, vars: &[Var], vals: &[MPoly]) -> MPoly {
        assert_eq!(vars.len(), vals.len());
        match vars.split_first() {
            None => self.clone(),
            Some((&v, rest)) => {
                let cs = self.coeffs_in(v);
                let mut acc = MPoly::zero();
                for c in cs.iter().rev() {
                    acc = &(&acc * &vals[0]) + &c.horner_substitute(rest, &vals[1..]);
                }
                acc
            }
        }
    }

    pub fn subs(&self, v: Var, val: &MPoly) -> MPoly {
        self.substitute(&[(v, val.clone())])
    }

    /// Substitutes rational values; unassigned variables stay symbolic.
    pub fn eval_partial(&self, vals: &[(Var, Q)]) -> MPoly {
        let map: Vec<(Var, MPoly)> = vals.iter().map(|(v, c)| (*v, MPoly::constant(c.clone()))).collect();
        self.substitute(&map)
    }

    /// Full evaluation; `None` if a variable is left unassigned.
    pub fn eval(&self, vals: &[(Var, Q)]) -> Option<Q> {
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut x = c.clone();
            for &(i, e) in &m.0 {
                let (_, val) = vals.iter().find(|(w, _)| w.0 == i)?;
                x *= num::pow(val.clone(), e as usize);
            }
            total += x;
        }
        Some(total)
    }

    /// Exact quotient `self / d`.
    pub fn div_exact(&self, d: &MPoly) -> Result<MPoly, AlgError> {
        if d.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = dc.recip();
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let q = m.div(dm).ok_or(AlgError::NotDivisible)?;
                out.push((q, c * &inv));
            }
            return Ok(MPoly::from_sorted(out));
        }
        let (q, r) = self.div_rem_impl(d, true)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgError::NotDivisible)
        }
    }

    /// Division with remainder by a single divisor in the fixed term order.
    ///
    /// A single polynomial is a Groebner basis of its ideal, so the remainder
    /// vanishes exactly when `d` divides `self`.
    pub fn div_rem(&self, d: &MPoly) -> Result<(MPoly, MPoly), AlgError> {
        if d.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        self.div_rem_impl(d, false)
    }

    fn div_rem_impl(&self, d: &MPoly, exact: bool) -> Result<(MPoly, MPoly), AlgError> {
        let (lm, lc) = d.terms[0].clone();
        let lc_inv = lc.recip();
        let mut rem: BTreeMap<Monomial, Q> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Monomial, Q)> = Vec::new();
        let mut out_rem: Vec<(Monomial, Q)> = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            match m.div(&lm) {
                Some(qm) => {
                    let qc = &c * &lc_inv;
                    for (dm, dc) in &d.terms[1..] {
                        let nm = dm.mul(&qm);
                        let delta = dc * &qc;
                        match rem.get_mut(&nm) {
                            Some(x) => {
                                *x -= delta;
                                if x.is_zero() {
                                    rem.remove(&nm);
                                }
                            }
                            None => {
                                rem.insert(nm, -delta);
                            }
                        }
                    }
                    quot.push((qm, qc));
                }
                None => {
                    if exact {
                        return Err(AlgError::NotDivisible);
                    }
                    out_rem.push((m, c));
                }
            }
        }
        Ok((MPoly::from_sorted(quot), MPoly::from_sorted(out_rem)))
    }

    /// Remainder modulo `d` (see [`MPoly::div_rem`]).
    pub fn reduce_mod(&self, d: &MPoly) -> MPoly {
        self.div_rem(d).expect("nonzero divisor").1
    }

    /// Greatest common divisor, normalized by [`MPoly::normalize`].
    pub fn gcd(&self, o: &MPoly) -> MPoly {
        crate::gcd::gcd(self, o)
    }

    /// Splits off the rational content: returns `(c, p)` with `self = c * p`,
    /// `p` having coprime integer coefficients and positive leading coefficient.
    pub fn rational_content(&self) -> (Q, MPoly) {
        if self.is_zero() {
            return (Q::one(), Self::zero());
        }
        let mut num_g = num::BigInt::zero();
        let mut den_l = num::BigInt::one();
        for (_, c) in &self.terms {
            num_g = num::Integer::gcd(&num_g, c.numer());
            den_l = num::Integer::lcm(&den_l, c.denom());
        }
        let mut content = Q::new(num_g, den_l);
        if q_is_negative(&self.terms[0].1) {
            content = -content;
        }
        let p = self.scale(&content.recip());
        (content, p)
    }

    /// Canonical associate: coprime integer coefficients, positive leading coefficient.
    pub fn normalize(&self) -> MPoly {
        self.rational_content().1
    }

    /// Monomial gcd of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let mut g = match it.next() {
            Some(t) => t.0.clone(),
            None => return Monomial::one(),
        };
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Largest `k` with `d^k | self`, together with the cofactor.
    pub fn multiplicity(&self, d: &MPoly) -> (u32, MPoly) {
        let mut k = 0;
        let mut cur = self.clone();
        if d.is_constant() || self.is_zero() {
            return (0, cur);
        }
        while let Ok(q) = cur.div_exact(d) {
            cur = q;
            k += 1;
        }
        (k, cur)
    }

    /// Canonical text form: terms in descending order, `c*x^e*y` style.
    pub fn to_canonical_string(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(fmt_q(&a));
            }
            for &(i, e) in &m.0 {
                let n = var_name(Var(i));
                if e == 1 {
                    parts.push(n);
                } else {
                    parts.push(format!("{n}^{e}"));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

impl Ring for MPoly {
    fn zero() -> Self {
        MPoly::zero()
    }
    fn one() -> Self {
        MPoly::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        self.merge(o, false)
    }
    fn sub(&self, o: &Self) -> Self {
        self.merge(o, true)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_impl(o)
    }
    fn neg(&self) -> Self {
        MPoly::from_sorted(self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        MPoly::div_exact(self, d).ok()
    }
    fn from_int(n: i64) -> Self {
        MPoly::int(n)
    }
    fn is_one(&self) -> bool {
        MPoly::is_one(self)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl<'a> $tr<&'a MPoly> for &'a MPoly {
            type Output = MPoly;
            fn $m(self, o: &'a MPoly) -> MPoly {
                Ring::$imp(self, o)
            }
        }
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, o: MPoly) -> MPoly {
                Ring::$imp(&self, &o)
            }
        }
        impl<'a> $tr<&'a MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, o: &'a MPoly) -> MPoly {
                Ring::$imp(&self, o)
            }
        }
        impl<'a> $tr<MPoly> for &'a MPoly {
            type Output = MPoly;
            fn $m(self, o: MPoly) -> MPoly {
                Ring::$imp(self, &o)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        Ring::neg(&self)
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        Ring::neg(self)
    }
}

impl From<i64> for MPoly {
    fn from(n: i64) -> Self {
        MPoly::int(n)
    }
}

impl From<Q> for MPoly {
    fn from(c: Q) -> Self {
        MPoly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp;

    #[test]
    fn order_is_graded_then_lex() {
        let p = mp("x + y^2 + x*y + 1");
        assert_eq!(p.to_string(), "x*y + y^2 + x + 1");
    }

    #[test]
    fn division_examples() {
        assert_eq!(mp("x^2 - 1").div_exact(&mp("x - 1")).unwrap(), mp("x + 1"));
        assert_eq!(mp("x^2").div_exact(&mp("x + 1")), Err(AlgError::NotDivisible));
    }

    #[test]
    fn coefficient_roundtrip() {
        let p = mp("3*t^2*J2 - t*J5 + J6 - 1/2*aa*t^3");
        let t = crate::var("t");
        let cs = p.coeffs_in(t);
        assert_eq!(cs.len(), 4);
        assert_eq!(MPoly::from_coeffs_in(t, &cs), p);
    }

    #[test]
    fn substitution_and_eval() {
        let p = mp("x^2 + y");
        let x = crate::var("x");
        assert_eq!(p.subs(x, &mp("y + 1")), mp("y^2 + 3*y + 1"));
        let y = crate::var("y");
        assert_eq!(p.eval(&[(x, Q::from_integer(2.into())), (y, Q::from_integer(3.into()))]), Some(Q::from_integer(7.into())));
    }

    #[test]
    fn reduction_mod_single_polynomial() {
        let f = mp("x^2 + y^2 - 1");
        let g = mp("(x^2 + y^2 - 1)*(x*y + 3) + 0");
        assert!(g.reduce_mod(&f).is_zero());
        assert!(!mp("x^3").reduce_mod(&f).is_zero());
    }
}
