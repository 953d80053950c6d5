//! Elements of `Q(J2..J6)[aa] / (aa^2 - (J5^2 - 4 J4 J6))`.
//!
//! An element is `(p + q*aa) / den` with `p, q, den` free of `aa`. Inverses
//! use the conjugate `aa -> -aa`, so the ring is a field as long as
//! `J5^2 - 4 J4 J6` is not a square, which holds generically.

use crate::mpoly::MPoly;
use crate::ring::{Field, Ring, Q};
use crate::vars::{var, Var};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JElem {
    p: MPoly,
    q: MPoly,
    den: MPoly,
}

pub fn aa_var() -> Var {
    var("aa")
}

/// `J5^2 - 4 J4 J6`, the square of `aa`.
pub fn aa_square() -> MPoly {
    crate::mp("J5^2 - 4*J4*J6")
}

impl JElem {
    pub fn zero() -> Self {
        JElem {
            p: MPoly::zero(),
            q: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(c: Q) -> Self {
        JElem {
            p: MPoly::constant(c),
            q: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn aa() -> Self {
        JElem {
            p: MPoly::zero(),
            q: MPoly::one(),
            den: MPoly::one(),
        }
    }

    /// Reduces an arbitrary polynomial (possibly containing `aa`) using
    /// `aa^2 = J5^2 - 4 J4 J6`.
    pub fn from_mpoly(m: &MPoly) -> Self {
        Self::from_mpoly_with(m, &aa_square())
    }

    /// As [`JElem::from_mpoly`] with an explicit value for `aa^2`; used after
    /// specialization of the invariants.
    fn from_mpoly_with(m: &MPoly, c: &MPoly) -> Self {
        let a = aa_var();
        if !m.contains_var(a) {
            return JElem {
                p: m.clone(),
                q: MPoly::zero(),
                den: MPoly::one(),
            };
        }
        let cs = m.coeffs_in(a);
        let mut p = MPoly::zero();
        let mut q = MPoly::zero();
        let mut cpow = MPoly::one();
        for (k, ck) in cs.iter().enumerate() {
            if k >= 2 && k % 2 == 0 {
                cpow = &cpow * c;
            }
            if ck.is_zero() {
                continue;
            }
            if k % 2 == 0 {
                p = &p + &(ck * &cpow);
            } else {
                q = &q + &(ck * &cpow);
            }
        }
        JElem { p, q, den: MPoly::one() }
    }

    pub fn new(p: MPoly, q: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let a = aa_var();
        assert!(
            !p.contains_var(a) && !q.contains_var(a) && !den.contains_var(a),
            "components must be free of aa"
        );
        JElem { p, q, den }.normalized()
    }

    /// Quotient of two polynomials, each reduced modulo the relation.
    pub fn ratio(num: &MPoly, den: &MPoly) -> Option<Self> {
        Self::from_mpoly(num).div(&Self::from_mpoly(den))
    }

    pub fn parts(&self) -> (&MPoly, &MPoly, &MPoly) {
        (&self.p, &self.q, &self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn has_aa(&self) -> bool {
        !self.q.is_zero()
    }

    /// Numerator `p + q*aa` as a plain polynomial.
    pub fn numerator(&self) -> MPoly {
        if self.q.is_zero() {
            return self.p.clone();
        }
        &self.p + &(&self.q * &MPoly::var(aa_var()))
    }

    pub fn denominator(&self) -> &MPoly {
        &self.den
    }

    /// The polynomial `p + q*aa` when the denominator is 1.
    pub fn to_mpoly(&self) -> Option<MPoly> {
        if self.den.is_one() {
            Some(self.numerator())
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        JElem {
            p: self.p.clone(),
            q: -&self.q,
            den: self.den.clone(),
        }
    }

    /// Norm to the invariant field: `(p^2 - q^2 c) / den^2`, returned as
    /// numerator and denominator.
    pub fn norm_parts(&self) -> (MPoly, MPoly) {
        let n = &(&self.p * &self.p) - &(&(&self.q * &self.q) * &aa_square());
        (n, &self.den * &self.den)
    }

    fn normalized(mut self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if let Some(c) = self.den.as_constant() {
            if !c.is_one() {
                let inv = c.recip();
                self.p = self.p.scale(&inv);
                self.q = self.q.scale(&inv);
                self.den = MPoly::one();
            }
            return self;
        }
        let g = crate::gcd::gcd_list(&[self.den.clone(), self.p.clone(), self.q.clone()]);
        if !g.is_constant() {
            self.p = self.p.div_exact(&g).unwrap();
            self.q = self.q.div_exact(&g).unwrap();
            self.den = self.den.div_exact(&g).unwrap();
        }
        let (c, d) = self.den.rational_content();
        let inv = c.recip();
        self.p = self.p.scale(&inv);
        self.q = self.q.scale(&inv);
        self.den = d;
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return JElem {
                p: &self.p + &o.p,
                q: &self.q + &o.q,
                den: self.den.clone(),
            }
            .normalized();
        }
        JElem {
            p: &(&self.p * &o.den) + &(&o.p * &self.den),
            q: &(&self.q * &o.den) + &(&o.q * &self.den),
            den: &self.den * &o.den,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        JElem {
            p: -&self.p,
            q: -&self.q,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = aa_square();
        let mut p = &self.p * &o.p;
        if !self.q.is_zero() && !o.q.is_zero() {
            p = &p + &(&(&self.q * &o.q) * &c);
        }
        let q = &(&self.p * &o.q) + &(&self.q * &o.p);
        let den = if self.den.is_one() {
            o.den.clone()
        } else if o.den.is_one() {
            self.den.clone()
        } else {
            &self.den * &o.den
        };
        JElem { p, q, den }.normalized()
    }

    pub fn scale(&self, c: &Q) -> Self {
        JElem {
            p: self.p.scale(c),
            q: self.q.scale(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn pow(&self, e: u32) -> Self {
        Ring::pow(self, e)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.q.is_zero() {
            return Some(
                JElem {
                    p: self.den.clone(),
                    q: MPoly::zero(),
                    den: self.p.clone(),
                }
                .normalized(),
            );
        }
        // 1/(p + q aa) = (p - q aa) / (p^2 - q^2 c)
        let n = &(&self.p * &self.p) - &(&(&self.q * &self.q) * &aa_square());
        if n.is_zero() {
            return None;
        }
        Some(
            JElem {
                p: &self.p * &self.den,
                q: -(&self.q * &self.den),
                den: n,
            }
            .normalized(),
        )
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    /// Substitutes polynomials for invariants (and possibly `aa`).
    ///
    /// When any of `J4, J5, J6` is replaced and the element involves `aa`, the
    /// map must also assign `aa` consistently; otherwise the relation would
    /// change meaning. A `None` return signals a vanishing denominator.
    pub fn substitute(&self, map: &[(Var, MPoly)]) -> Option<Self> {
        let a = aa_var();
        let touches_rel = map.iter().any(|(v, _)| ["J4", "J5", "J6"].contains(&crate::var_name(*v).as_str()));
        let aa_val = map.iter().find(|(v, _)| *v == a).map(|(_, m)| m.clone());
        assert!(
            !(touches_rel && self.has_aa() && aa_val.is_none()),
            "specialization of J4, J5 or J6 needs a value for aa"
        );
        let rest: Vec<(Var, MPoly)> = map.iter().filter(|(v, _)| *v != a).cloned().collect();
        let c_new = aa_square().substitute(&rest);
        let num = self.numerator().substitute(map);
        let den = self.den.substitute(&rest);
        if den.is_zero() {
            return None;
        }
        let n = Self::from_mpoly_with(&num, &c_new);
        Some(JElem { p: n.p, q: n.q, den }.normalized())
    }

    /// Specialization at rational values.
    pub fn specialize(&self, vals: &[(Var, Q)]) -> Option<Self> {
        let map: Vec<(Var, MPoly)> = vals.iter().map(|(v, c)| (*v, MPoly::constant(c.clone()))).collect();
        self.substitute(&map)
    }

    /// Full evaluation to a rational (`aa` must be among the values if present).
    pub fn eval(&self, vals: &[(Var, Q)]) -> Option<Q> {
        let n = self.numerator().eval(vals)?;
        let d = self.den.eval(vals)?;
        if d.is_zero() {
            return None;
        }
        Some(n / d)
    }
}

impl fmt::Display for JElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator();
        if self.den.is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/({})", self.den)
        }
    }
}

impl fmt::Debug for JElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JElem({self})")
    }
}

impl Ring for JElem {
    fn zero() -> Self {
        JElem::zero()
    }
    fn one() -> Self {
        JElem::one()
    }
    fn is_zero(&self) -> bool {
        JElem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        JElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        JElem::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        JElem::mul(self, o)
    }
    fn neg(&self) -> Self {
        JElem::neg(self)
    }
    fn div_exact(&self, d: &Self) -> Option<Self> {
        self.div(d)
    }
    fn from_int(n: i64) -> Self {
        JElem::from_q(Q::from_integer(n.into()))
    }
    fn is_one(&self) -> bool {
        self.q.is_zero() && self.p == self.den
    }
}

impl Field for JElem {
    fn inv(&self) -> Option<Self> {
        JElem::inv(self)
    }
}

impl From<MPoly> for JElem {
    fn from(m: MPoly) -> Self {
        JElem::from_mpoly(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp;

    #[test]
    fn relation_is_applied() {
        let a = JElem::aa();
        assert_eq!(a.mul(&a), JElem::from_mpoly(&mp("J5^2 - 4*J4*J6")));
        assert_eq!(JElem::from_mpoly(&mp("aa^3")), JElem::from_mpoly(&mp("aa*(J5^2 - 4*J4*J6)")));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = JElem::from_mpoly(&mp("J5 + aa"));
        let y = x.inv().unwrap();
        assert!(x.mul(&y).is_one());
        // (J5 + aa)(J5 - aa) = 4 J4 J6
        assert_eq!(y, JElem::new(mp("J5"), mp("-1"), mp("4*J4*J6")));
    }

    #[test]
    fn specialize_with_rational_aa() {
        let x = JElem::from_mpoly(&mp("J5 + aa"));
        // J4 = 1, J5 = 3, J6 = 2: aa^2 = 1
        let vals = [(var("J4"), crate::q(1, 1)), (var("J5"), crate::q(3, 1)), (var("J6"), crate::q(2, 1)), (var("aa"), crate::q(-1, 1))];
        assert_eq!(x.specialize(&vals).unwrap(), JElem::from_q(crate::q(2, 1)));
    }
}
