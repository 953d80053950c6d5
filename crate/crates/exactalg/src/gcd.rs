//! Multivariate gcd over Q by recursive content / primitive-part splitting
//! and primitive pseudo-remainder sequences.

use crate::mpoly::MPoly;
use crate::ring::{Ring, Q};
use crate::upoly::UPoly;
use crate::vars::Var;

pub(crate) fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.normalize();
    }
    if b.is_zero() {
        return a.normalize();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let g0 = ma.gcd(&mb);
    if a.is_monomial() || b.is_monomial() {
        return MPoly::monomial(g0, Q::one());
    }
    let a1 = a.div_exact(&MPoly::monomial(ma, Q::one())).unwrap();
    let b1 = b.div_exact(&MPoly::monomial(mb, Q::one())).unwrap();
    let g = gcd_nomon(&a1, &b1);
    g.mul_monomial(&g0, &Q::one()).normalize()
}

/// Gcd of a list, stopping early at 1.
pub(crate) fn gcd_list(items: &[MPoly]) -> MPoly {
    let mut v: Vec<&MPoly> = items.iter().filter(|p| !p.is_zero()).collect();
    v.sort_by_key(|p| p.num_terms());
    let mut g = MPoly::zero();
    for p in v {
        g = gcd(&g, p);
        if g.is_constant() && !g.is_zero() {
            return MPoly::one();
        }
    }
    g
}

fn content_in(p: &MPoly, v: Var) -> MPoly {
    gcd_list(&p.coeffs_in(v))
}

fn gcd_nomon(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    // a variable occurring on one side only can only live in the content there
    if let Some(&x) = va.iter().find(|x| !vb.contains(x)) {
        return gcd(&content_in(a, x), b);
    }
    if let Some(&x) = vb.iter().find(|x| !va.contains(x)) {
        return gcd(a, &content_in(b, x));
    }
    let v = *va
        .iter()
        .min_by_key(|&&x| (a.deg_in(x).min(b.deg_in(x)), a.deg_in(x) + b.deg_in(x)))
        .unwrap();
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = a.div_exact(&ca).unwrap();
    let pb = b.div_exact(&cb).unwrap();
    let c = gcd(&ca, &cb);
    let g = primitive_prs(&pa, &pb, v);
    (&c * &g).normalize()
}

fn primitive_part_u(p: &UPoly<MPoly>) -> UPoly<MPoly> {
    let g = gcd_list(p.coeffs());
    if g.is_one() {
        return p.clone();
    }
    UPoly::new(p.coeffs().iter().map(|c| c.div_exact(&g).unwrap()).collect())
}

fn primitive_prs(a: &MPoly, b: &MPoly, v: Var) -> MPoly {
    let mut pa = UPoly::from_mpoly(a, v);
    let mut pb = UPoly::from_mpoly(b, v);
    if pa.degree() < pb.degree() {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        if pb.is_zero() {
            return primitive_part_u(&pa).to_mpoly(v);
        }
        if pb.degree() == Some(0) {
            return MPoly::one();
        }
        let r = pa.prem(&pb);
        pa = pb;
        pb = if r.is_zero() { r } else { primitive_part_u(&r) };
    }
}


#[cfg(test)]
mod tests {
    use crate::mp;

    #[test]
    fn gcd_examples() {
        assert_eq!(mp("x^2 - 1").gcd(&mp("x^2 + 2*x + 1")), mp("x + 1"));
        assert_eq!(mp("6*x*y").gcd(&mp("4*x^2")), mp("x"));
        let g = mp("J4*t - J5 + aa");
        let a = &g * &mp("t^2 + J2");
        let b = &g * &mp("J3*t - 1");
        assert_eq!(a.gcd(&b), g.normalize());
        assert!(mp("x + y").gcd(&mp("x - y")).is_one());
    }
}
