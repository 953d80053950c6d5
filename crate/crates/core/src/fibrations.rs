//! Weierstrass models over the J-ring, Kodaira classification, torsion,
//! specializations, the J30 chain, witnesses and the Siegel restriction.
//!
//! Models are `y^2 = x^3 + a2 x^2 + a4 x + a6` with coefficients in
//! `JElem[t]`. Symbolic identities are checked in polynomial rings over
//! `Q[J2..J6]` (with `aa` kept free and reduced at the end) or through the
//! injective parameter map of [`quartic::j_in_params`].

use crate::error::{K3Error, Result};
use crate::lattices::{self, RootType};
use crate::quartic::{self, QuarticParams};
use exactalg::{mp, q, var, var_name, JElem, MPoly, Ring, UPoly, Var, Q};
use num::{BigInt, Integer, Signed};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub use crate::quartic::Fibration;

pub type JPoly = UPoly<JElem>;

pub fn tvar() -> Var {
    var("t")
}

/// Polynomial in `t` with J-ring coefficients from an [`MPoly`] in `t`.
pub fn jpoly_of(m: &MPoly) -> JPoly {
    UPoly::new(m.coeffs_in(tvar()).iter().map(JElem::from_mpoly).collect())
}

pub fn jpoly(src: &str) -> JPoly {
    jpoly_of(&mp(src))
}

fn jc(src: &str) -> JElem {
    JElem::from_mpoly(&mp(src))
}

/// Back to an [`MPoly`] in `t` (and `aa`); `None` if a coefficient has a
/// nontrivial denominator.
pub fn jpoly_to_mpoly(p: &JPoly) -> Option<MPoly> {
    let cs: Option<Vec<MPoly>> = p.coeffs().iter().map(|c| c.to_mpoly()).collect();
    Some(MPoly::from_coeffs_in(tvar(), &cs?))
}

/// Rational polynomial when every coefficient is a constant.
pub fn jpoly_to_q(p: &JPoly) -> Option<UPoly<Q>> {
    let cs: Option<Vec<Q>> = p.coeffs().iter().map(|c| c.to_mpoly()?.as_constant()).collect();
    Some(UPoly::new(cs?))
}

pub fn q_to_jpoly(p: &UPoly<Q>) -> JPoly {
    p.map(|c| JElem::from_q(c.clone()))
}

fn jvars(p: &JPoly) -> Vec<Var> {
    let mut vs: Vec<Var> = vec![];
    for c in p.coeffs() {
        for v in c.numerator().vars().into_iter().chain(c.denominator().vars()) {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
    }
    vs.sort();
    vs
}

fn eval_jpoly(p: &JPoly, pt: &[(Var, Q)]) -> Option<UPoly<Q>> {
    let cs: Option<Vec<Q>> = p.coeffs().iter().map(|c| c.eval(pt)).collect();
    Some(UPoly::new(cs?))
}

fn fmt_poly(p: &JPoly) -> String {
    match jpoly_to_mpoly(p) {
        Some(m) => m.to_string(),
        None => format!("{p:?}"),
    }
}

// ---------------------------------------------------------------------------
// Models

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassModel {
    pub a2: JPoly,
    pub a4: JPoly,
    pub a6: JPoly,
}

impl WeierstrassModel {
    /// Checks the K3 degree bounds and `Δ ≠ 0`.
    pub fn new(a2: JPoly, a4: JPoly, a6: JPoly) -> Result<Self> {
        let m = WeierstrassModel { a2, a4, a6 };
        for (p, bound, name) in [(&m.a2, 4, "a2"), (&m.a4, 8, "a4"), (&m.a6, 12, "a6")] {
            if !p.is_zero() && p.deg() > bound {
                return Err(K3Error::Inconsistent(format!("deg {name} = {} exceeds {bound}", p.deg())));
            }
        }
        if weierstrass_disc(&m).is_zero() {
            return Err(K3Error::DegenerateSpecialization);
        }
        Ok(m)
    }

    pub fn short(f: JPoly, g: JPoly) -> Result<Self> {
        Self::new(JPoly::zero(), f, g)
    }

    pub fn is_short(&self) -> bool {
        self.a2.is_zero()
    }

    pub fn coefficients(&self) -> [&JPoly; 3] {
        [&self.a2, &self.a4, &self.a6]
    }

    /// True when every coefficient is a rational constant.
    pub fn is_rational(&self) -> bool {
        self.coefficients().iter().all(|p| jpoly_to_q(p).is_some())
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.coefficients().iter().flat_map(|p| jvars(p)).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    fn try_map(&self, f: impl Fn(&JElem) -> Option<JElem>) -> Option<Self> {
        let g = |p: &JPoly| -> Option<JPoly> {
            let cs: Option<Vec<JElem>> = p.coeffs().iter().map(&f).collect();
            Some(UPoly::new(cs?))
        };
        Some(WeierstrassModel { a2: g(&self.a2)?, a4: g(&self.a4)?, a6: g(&self.a6)? })
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3")?;
        for (p, x) in [(&self.a2, " x^2"), (&self.a4, " x"), (&self.a6, "")] {
            if !p.is_zero() {
                write!(f, " + ({}){x}", fmt_poly(p))?;
            }
        }
        Ok(())
    }
}

/// The J-models of the four fibrations in the affine coordinate `t`.
pub fn model(which: Fibration) -> WeierstrassModel {
    let z = JPoly::zero;
    let m = match which {
        Fibration::Std => {
            // f = -t^3 ( (J5 - aa)/(2 J6) t^2 + 3 J2 t + (J5 + aa)/2 )
            let top = JElem::ratio(&mp("J5 - aa"), &mp("2*J6")).unwrap();
            let f = UPoly::new(vec![
                JElem::zero(),
                JElem::zero(),
                JElem::zero(),
                jc("-(J5 + aa)/2"),
                jc("-3*J2"),
                top.neg(),
            ]);
            WeierstrassModel { a2: z(), a4: f, a6: jpoly("t^5*(t^2 - 2*J3*t + J6)") }
        }
        Fibration::Alt => WeierstrassModel {
            a2: jpoly("t^3 - 3*J2*t - 2*J3"),
            a4: jpoly("J4*t^2 - J5*t + J6"),
            a6: z(),
        },
        Fibration::Bfd => WeierstrassModel {
            a2: z(),
            a4: jpoly("t^2*(-3*J2*t^2 - J5*t - J4^2/3)"),
            a6: jpoly("t^3*(t^4 - 2*J3*t^3 + (J2*J4 + J6)*t^2 + J4*J5*t/3 + 2*J4^3/27)"),
        },
        Fibration::Max => WeierstrassModel {
            a2: jpoly("J6*(t^3 + 6*J3*J4*t^2 + 3*(4*J3^2*J4^2 - J2*J6^2)*t - 2*J3*(3*J2*J4*J6^2 - 4*J3^2*J4^3 + J6^3))"),
            a4: jpoly("-J6^6*(2*J4*t^2 + (8*J3*J4^2 + J5*J6)*t + (8*J3^2*J4^3 - 3*J2*J4*J6^2 + 2*J3*J4*J5*J6 - J6^3))"),
            a6: jpoly("J4*J6^11*(J4*t + (2*J3*J4^2 + J5*J6))"),
        },
    };
    debug_assert!(WeierstrassModel::new(m.a2.clone(), m.a4.clone(), m.a6.clone()).is_ok());
    m
}

/// Depressed form `y^2 = x^3 + f x + g` (`x -> x - a2/3`).
pub fn short_form(m: &WeierstrassModel) -> (JPoly, JPoly) {
    if m.a2.is_zero() {
        return (m.a4.clone(), m.a6.clone());
    }
    let third = JElem::from_q(q(1, 3));
    let a2 = &m.a2;
    let a2sq = a2.mul(a2);
    let f = m.a4.sub(&a2sq.scale(&third));
    let g = m
        .a6
        .sub(&a2.mul(&m.a4).scale(&third))
        .add(&a2sq.mul(a2).scale(&JElem::from_q(q(2, 27))));
    (f, g)
}

/// `4 f^3 + 27 g^2`.
pub fn short_disc(f: &JPoly, g: &JPoly) -> JPoly {
    f.pow(3).scale(&JElem::from_int(4)).add(&g.mul(g).scale(&JElem::from_int(27)))
}

/// `b^2 (a^2 - 4b) - 2ac(2a^2 - 9b) - 27c^2` for `x^3 + a x^2 + b x + c`.
pub fn cubic_disc(a: &JPoly, b: &JPoly, c: &JPoly) -> JPoly {
    let (a2, b2) = (a.mul(a), b.mul(b));
    let four = JElem::from_int(4);
    let t1 = b2.mul(&a2.sub(&b.scale(&four)));
    let t2 = a
        .mul(c)
        .mul(&a2.scale(&JElem::from_int(2)).sub(&b.scale(&JElem::from_int(9))))
        .scale(&JElem::from_int(2));
    t1.sub(&t2).sub(&c.mul(c).scale(&JElem::from_int(27)))
}

/// Discriminant in the module's convention: `4 f^3 + 27 g^2` for short
/// models, the cubic formula otherwise. The two conventions differ by the
/// sign `-1` after depression; see [`disc_conventions_agree`].
pub fn weierstrass_disc(m: &WeierstrassModel) -> JPoly {
    if m.is_short() {
        short_disc(&m.a4, &m.a6)
    } else {
        cubic_disc(&m.a2, &m.a4, &m.a6)
    }
}

/// Cubic-formula discriminant of the model equals `-(4f^3 + 27g^2)` of its
/// depressed form.
pub fn disc_conventions_agree(m: &WeierstrassModel) -> bool {
    let (f, g) = short_form(m);
    cubic_disc(&m.a2, &m.a4, &m.a6) == short_disc(&f, &g).neg()
}

/// Named factors of the generic discriminants: `D`, `E` (alt), `p` (std),
/// `P` (bfd), `d` (max).
///
/// `p` and `d` are normalized as `Δ = J6^-3 t^9 p` and `Δ = J6^16 d` with
/// the module's discriminant convention; `P` is taken with the opposite
/// sign, `-(4F^3 + 27G^2) = t^8 P`, so that its leading term is `-27 t^6`.
pub fn named_factor(name: &str) -> Result<JPoly> {
    let out = match name {
        "E" => model(Fibration::Alt).a4,
        "D" => {
            let m = model(Fibration::Alt);
            m.a2.mul(&m.a2).sub(&m.a4.scale(&JElem::from_int(4)))
        }
        "p" => {
            let d = weierstrass_disc(&model(Fibration::Std));
            let j6c = jc("J6^3");
            UPoly::new(d.coeffs()[9..].iter().map(|c| c.mul(&j6c)).collect())
        }
        "P" => {
            let d = weierstrass_disc(&model(Fibration::Bfd)).neg();
            UPoly::new(d.coeffs()[8..].to_vec())
        }
        "d" => {
            let d = weierstrass_disc(&model(Fibration::Max));
            d.div_scalar(&jc("J6^16")).ok_or_else(|| K3Error::IdentityFailed("J6^16 does not divide Δ_max".into()))?
        }
        _ => return Err(K3Error::UnknownType(name.into())),
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kodaira types

/// Order used for an identically vanishing coefficient.
pub const ORD_INF: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kodaira {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    pub fn euler(&self) -> u32 {
        match *self {
            Kodaira::I(n) => n,
            Kodaira::IStar(n) => n + 6,
            Kodaira::II => 2,
            Kodaira::III => 3,
            Kodaira::IV => 4,
            Kodaira::IVStar => 8,
            Kodaira::IIIStar => 9,
            Kodaira::IIStar => 10,
        }
    }

    /// Root lattice of the reducible fiber (none for `I0, I1, II`).
    pub fn root_type(&self) -> Option<RootType> {
        match *self {
            Kodaira::I(n) if n >= 2 => Some(RootType::a(n as usize - 1)),
            Kodaira::IStar(n) => Some(RootType::d(n as usize + 4)),
            Kodaira::III => Some(RootType::a(1)),
            Kodaira::IV => Some(RootType::a(2)),
            Kodaira::IVStar => Some(RootType::e(6)),
            Kodaira::IIIStar => Some(RootType::e(7)),
            Kodaira::IIStar => Some(RootType::e(8)),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || K3Error::UnknownFiber(s.to_string());
        let k = match s {
            "II" => Kodaira::II,
            "III" => Kodaira::III,
            "IV" => Kodaira::IV,
            "IV*" => Kodaira::IVStar,
            "III*" => Kodaira::IIIStar,
            "II*" => Kodaira::IIStar,
            _ => {
                let rest = s.strip_prefix('I').ok_or_else(bad)?;
                let (num, star) = match rest.strip_suffix('*') {
                    Some(n) => (n, true),
                    None => (rest, false),
                };
                let n: u32 = num.parse().map_err(|_| bad())?;
                if star {
                    Kodaira::IStar(n)
                } else {
                    Kodaira::I(n)
                }
            }
        };
        Ok(k)
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Kodaira's table in characteristic zero.
pub fn kodaira_from_orders(a: u32, b: u32, c: u32) -> Result<Kodaira> {
    if a >= 4 && b >= 6 {
        return Err(K3Error::NonMinimal);
    }
    let k = match (a, b, c) {
        (_, _, 0) => Kodaira::I(0),
        (0, _, n) | (_, 0, n) => Kodaira::I(n),
        (_, 1, 2) => Kodaira::II,
        (1, _, 3) => Kodaira::III,
        (_, 2, 4) => Kodaira::IV,
        (_, _, 6) if a >= 2 && b >= 3 => Kodaira::IStar(0),
        (2, 3, n) if n > 6 => Kodaira::IStar(n - 6),
        (_, 4, 8) if a >= 3 => Kodaira::IVStar,
        (3, _, 9) if b >= 5 => Kodaira::IIIStar,
        (_, 5, 10) if a >= 4 => Kodaira::IIStar,
        _ => return Err(K3Error::NoMatch(a, b, c)),
    };
    Ok(k)
}

// ---------------------------------------------------------------------------
// Places and vanishing orders

#[derive(Clone, Debug, PartialEq)]
pub enum FiberPlace {
    /// The roots of a factor, all assumed to share one fiber type.
    Root(JPoly),
    Infinity,
}

impl FiberPlace {
    pub fn t() -> Self {
        FiberPlace::Root(UPoly::x())
    }

    pub fn label(&self) -> String {
        match self {
            FiberPlace::Infinity => "t=oo".into(),
            FiberPlace::Root(q) if *q == UPoly::x() => "t=0".into(),
            FiberPlace::Root(q) => format!("{}=0", fmt_poly(q)),
        }
    }
}

/// Multiplicity of `q` in `p`, by repeated exact division.
fn multiplicity(p: &JPoly, q: &JPoly) -> (u32, JPoly) {
    if p.is_zero() {
        return (ORD_INF, p.clone());
    }
    if *q == UPoly::x() {
        let k = p.low_order();
        return (k as u32, UPoly::new(p.coeffs()[k..].to_vec()));
    }
    let mut k = 0;
    let mut cur = p.clone();
    loop {
        let (qt, r) = cur.div_rem(q);
        if !r.is_zero() {
            return (k, cur);
        }
        cur = qt;
        k += 1;
    }
}

fn deficit(p: &JPoly, weight: usize) -> Result<u32> {
    if p.is_zero() {
        return Ok(ORD_INF);
    }
    weight
        .checked_sub(p.deg())
        .map(|d| d as u32)
        .ok_or_else(|| K3Error::Inconsistent(format!("degree {} exceeds the weight {weight}", p.deg())))
}

/// Orders of `f`, `g`, `Δ` at a place.
pub fn vanishing_orders(m: &WeierstrassModel, place: &FiberPlace) -> Result<(u32, u32, u32)> {
    let (f, g) = short_form(m);
    let d = short_disc(&f, &g);
    if d.is_zero() {
        return Err(K3Error::ZeroPolynomial);
    }
    match place {
        FiberPlace::Infinity => Ok((deficit(&f, 8)?, deficit(&g, 12)?, deficit(&d, 24)?)),
        FiberPlace::Root(q) => {
            if q.is_zero() || q.deg() == 0 {
                return Err(K3Error::ZeroPolynomial);
            }
            Ok((multiplicity(&f, q).0, multiplicity(&g, q).0, multiplicity(&d, q).0))
        }
    }
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberEntry {
    pub place: String,
    pub kodaira: Kodaira,
    pub ade: String,
    pub count: usize,
    pub orders: (u32, u32, u32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberConfig {
    pub fibers: Vec<FiberEntry>,
    pub roots: Vec<RootType>,
    pub mw_torsion: String,
    pub mw_rank: usize,
    pub picard: usize,
    /// Discriminant group of the frame-glued lattice `U + overlattice(R)`.
    pub disc_group: String,
    pub euler: u32,
}

impl FiberConfig {
    /// `"I8* + 2I2 + 6I1"`: types aggregated over places, ordered by Euler
    /// number (largest first).
    pub fn summary(&self) -> String {
        summarize(self.fibers.iter().map(|e| (e.kodaira, e.count)))
    }

    pub fn root_label(&self) -> String {
        lattices::root_label(&self.roots)
    }
}

pub fn summarize(items: impl Iterator<Item = (Kodaira, usize)>) -> String {
    let mut agg: BTreeMap<Kodaira, usize> = BTreeMap::new();
    for (k, n) in items {
        if k != Kodaira::I(0) {
            *agg.entry(k).or_default() += n;
        }
    }
    let mut v: Vec<(Kodaira, usize)> = agg.into_iter().collect();
    v.sort_by(|a, b| {
        b.0.euler()
            .cmp(&a.0.euler())
            .then(matches!(b.0, Kodaira::IStar(_) | Kodaira::IVStar | Kodaira::IIIStar | Kodaira::IIStar)
                .cmp(&matches!(a.0, Kodaira::IStar(_) | Kodaira::IVStar | Kodaira::IIIStar | Kodaira::IIStar)))
    });
    v.iter()
        .map(|(k, n)| if *n == 1 { k.to_string() } else { format!("{n}{k}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Parses `"2III* + 6I1"` into aggregated (type, count) pairs.
pub fn parse_summary(s: &str) -> Result<Vec<(Kodaira, usize)>> {
    let mut out = vec![];
    for tok in s.split('+') {
        let tok = tok.trim();
        let digits = tok.chars().take_while(|c| c.is_ascii_digit()).count();
        let n = if digits == 0 { 1 } else { tok[..digits].parse().unwrap() };
        out.push((Kodaira::parse(&tok[digits..])?, n));
    }
    Ok(out)
}

/// A deterministic rational point for the indeterminates of a model.
///
/// Values for `J2..J6, aa` come from rational quartic parameters through
/// the gauge `gamma = 1`, so `aa^2 = J5^2 - 4 J4 J6` holds exactly. Other
/// indeterminates get small distinct rationals.
pub fn sample_point(vars: &[Var], k: usize) -> Vec<(Var, Q)> {
    const P: [i64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    let val = |i: usize| q(P[(i + k) % P.len()] + 2 * k as i64, 1 + (i as i64 + k as i64) % 4);
    let (al, be, de, ep, ze) = (val(0), val(1), val(2), val(3), val(4));
    let mut out = vec![];
    for &v in vars {
        let name = var_name(v);
        let x = match name.as_str() {
            "J2" => al.clone(),
            "J3" => be.clone(),
            "J4" => ep.clone(),
            "J5" => &ze + &(&de * &ep),
            "J6" => &de * &ze,
            "aa" => &ze - &(&de * &ep),
            _ => val(5 + v.0 as usize),
        };
        out.push((v, x));
    }
    out
}

/// Squarefree test by specialization: a degree-preserving specialization
/// that is squarefree proves the generic polynomial squarefree.
pub fn generically_squarefree(p: &JPoly, attempts: usize) -> bool {
    if let Some(pq) = jpoly_to_q(p) {
        return pq.deg() == 0 || pq.is_squarefree();
    }
    let vars = jvars(p);
    for k in 0..attempts {
        let pt = sample_point(&vars, k);
        if let Some(s) = eval_jpoly(p, &pt) {
            if s.degree() == p.degree() && s.is_squarefree() {
                return true;
            }
        }
    }
    false
}

/// Splits a squarefree `s` into pieces on whose roots `f` has constant order.
fn split_by_order(s: &UPoly<Q>, f: &UPoly<Q>) -> Vec<(UPoly<Q>, u32)> {
    if f.is_zero() {
        return vec![(s.clone(), ORD_INF)];
    }
    let mut out = vec![];
    let (mut rem, mut cur, mut k) = (s.clone(), f.clone(), 0u32);
    loop {
        let a = rem.gcd(&cur);
        let b = rem.div_exact_poly(&a).unwrap();
        if b.deg() > 0 {
            out.push((b, k));
        }
        if a.deg() == 0 {
            return out;
        }
        cur = cur.div_exact_poly(&a).unwrap();
        rem = a;
        k += 1;
    }
}

fn entry(place: String, kodaira: Kodaira, count: usize, orders: (u32, u32, u32)) -> FiberEntry {
    FiberEntry {
        place,
        kodaira,
        ade: kodaira.root_type().map(|r| r.to_string()).unwrap_or_else(|| "-".into()),
        count,
        orders,
    }
}

fn classify_finite_rational(f: &UPoly<Q>, g: &UPoly<Q>, d: &UPoly<Q>) -> Result<Vec<FiberEntry>> {
    let mut out = vec![];
    for (s, i) in d.squarefree_decomposition() {
        for (pa, a) in split_by_order(&s, f) {
            for (pb, b) in split_by_order(&pa, g) {
                let k = kodaira_from_orders(a, b, i as u32)?;
                let place = if pb.deg() == 1 {
                    let r = -pb.coeff(0) / pb.coeff(1);
                    format!("t={}", exactalg::ring::fmt_q(&r))
                } else {
                    format!("{}=0", fmt_poly(&q_to_jpoly(&pb)))
                };
                out.push(entry(place, k, pb.deg(), (a, b, i as u32)));
            }
        }
    }
    Ok(out)
}

/// Default factor skeleton of the generic J-models.
pub fn default_skeleton(which: Fibration) -> Vec<JPoly> {
    match which {
        Fibration::Std | Fibration::Bfd => vec![UPoly::x()],
        Fibration::Alt => vec![named_factor("E").unwrap()],
        Fibration::Max => vec![],
    }
}

/// Classifies all singular fibers.
///
/// Rational models are classified exactly through the squarefree
/// decomposition of `Δ` refined by the orders of `f` and `g`. Symbolic
/// models use the factor skeleton: each listed factor is a place whose roots
/// share a fiber type; the residual of `Δ` must be squarefree and coprime
/// to the skeleton (checked by specialization) and contributes `I1` fibers.
///
/// The Picard number is taken as `max(16, 2 + rank R)`, the smallest value
/// compatible with the fibers; the torsion comes from the model and is
/// cross-checked against the root-free gluings of the root lattice.
pub fn classify_fibers(m: &WeierstrassModel, skeleton: Option<&[JPoly]>) -> Result<FiberConfig> {
    let (f, g) = short_form(m);
    let d = short_disc(&f, &g);
    if d.is_zero() {
        return Err(K3Error::DegenerateSpecialization);
    }
    let mut fibers = vec![];
    let inf = (deficit(&f, 8)?, deficit(&g, 12)?, deficit(&d, 24)?);
    match (jpoly_to_q(&f), jpoly_to_q(&g), jpoly_to_q(&d)) {
        (Some(fq), Some(gq), Some(dq)) => fibers.extend(classify_finite_rational(&fq, &gq, &dq)?),
        _ => {
            let default;
            let sk = match skeleton {
                Some(s) => s,
                None => {
                    default = if d.low_order() > 0 { vec![UPoly::x()] } else { vec![] };
                    &default
                }
            };
            let mut residual = d.clone();
            let mut radical = JPoly::one();
            for qf in sk {
                let place = FiberPlace::Root(qf.clone());
                let orders = (multiplicity(&f, qf).0, multiplicity(&g, qf).0, multiplicity(&d, qf).0);
                let k = kodaira_from_orders(orders.0, orders.1, orders.2)?;
                let (c, rest) = multiplicity(&residual, qf);
                debug_assert_eq!(c, orders.2);
                residual = rest;
                radical = radical.mul(qf);
                fibers.push(entry(place.label(), k, qf.deg(), orders));
            }
            if residual.deg() > 0 {
                if !generically_squarefree(&residual.mul(&radical), 8) {
                    return Err(K3Error::ResidualNotSquarefree);
                }
                fibers.push(entry("residual".into(), Kodaira::I(1), residual.deg(), (0, 0, 1)));
            } else if !generically_squarefree(&radical, 8) {
                return Err(K3Error::ResidualNotSquarefree);
            }
        }
    }
    if inf.2 > 0 {
        fibers.push(entry("t=oo".into(), kodaira_from_orders(inf.0, inf.1, inf.2)?, 1, inf));
    }
    let euler: u32 = fibers.iter().map(|e| e.kodaira.euler() * e.count as u32).sum();
    if euler != 24 {
        return Err(K3Error::EulerMismatch(euler));
    }
    fibers.retain(|e| e.kodaira != Kodaira::I(0));
    let mut roots: Vec<RootType> = vec![];
    for e in &fibers {
        if let Some(r) = e.kodaira.root_type() {
            roots.extend(std::iter::repeat(r).take(e.count));
        }
    }
    lattices::sort_roots(&mut roots);
    let ranks: Vec<usize> = roots.iter().map(|r| r.rank).collect();
    let root_rank: usize = ranks.iter().sum();
    let picard = (2 + root_rank).max(16);
    let mw_rank = lattices::shioda_tate_rank(&ranks, picard)?;
    let torsion_order = if two_torsion_present(m) { 2 } else { 1 };
    let (mw_torsion, disc_group) = torsion_and_disc(&roots, torsion_order, mw_rank)?;
    Ok(FiberConfig { fibers, roots, mw_torsion, mw_rank, picard, disc_group, euler })
}

fn torsion_and_disc(roots: &[RootType], order: u64, mw_rank: usize) -> Result<(String, String)> {
    let label = lattices::mw_label(if order == 2 { &[2] } else { &[] });
    if mw_rank > 0 {
        // the frame is not determined by the fibers alone
        return Ok((label, "?".into()));
    }
    let rank: usize = roots.iter().map(|r| r.rank).sum();
    if rank == 14 {
        let frame = lattices::mw_torsion_from_frame(roots)?;
        if frame != label {
            return Err(K3Error::Inconsistent(format!(
                "model torsion {label} but frame {} forces {frame}",
                lattices::root_label(roots)
            )));
        }
        return Ok((label, "Z2^2".into()));
    }
    let glue = lattices::root_free_gluings(roots)?;
    let discs: Vec<String> = glue.iter().filter(|g| g.order == order).map(|g| g.disc_group.clone()).collect();
    if discs.is_empty() {
        return Err(K3Error::Inconsistent(format!(
            "no root-free gluing of order {order} for {}",
            lattices::root_label(roots)
        )));
    }
    Ok((label, discs.join("|")))
}

/// Two-torsion detection.
///
/// Symbolic models: `x | RHS`. Rational models: a polynomial root `r(t)`
/// of the cubic in `x` has degree at most 4, and `r(t0)` is a rational
/// root of the cubic at every `t0`; all interpolants through rational roots
/// at five sample points are tested exactly.
pub fn two_torsion_present(m: &WeierstrassModel) -> bool {
    if m.a6.is_zero() {
        return true;
    }
    if !m.is_rational() {
        return false;
    }
    let (a2, a4, a6) = (jpoly_to_q(&m.a2).unwrap(), jpoly_to_q(&m.a4).unwrap(), jpoly_to_q(&m.a6).unwrap());
    let cubic = |r: &UPoly<Q>| r.pow(3).add(&a2.mul(&r.mul(r))).add(&a4.mul(r)).add(&a6);
    let mut pts: Vec<(Q, Vec<Q>)> = vec![];
    for t0 in (0..40i64).map(|k| if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 }) {
        let t0 = q(t0, 1);
        let c = UPoly::new(vec![a6.eval(&t0), a4.eval(&t0), a2.eval(&t0), Q::one()]);
        match rational_roots(&c) {
            Some(rs) if rs.is_empty() => return false,
            Some(rs) => pts.push((t0, rs)),
            None => continue,
        }
        if pts.len() == 5 {
            break;
        }
    }
    if pts.len() < 5 {
        return false;
    }
    let mut choice = vec![0usize; 5];
    loop {
        let nodes: Vec<(Q, Q)> = pts.iter().zip(&choice).map(|((t, rs), &i)| (t.clone(), rs[i].clone())).collect();
        if cubic(&interpolate(&nodes)).is_zero() {
            return true;
        }
        let mut k = 0;
        loop {
            if k == 5 {
                return false;
            }
            choice[k] += 1;
            if choice[k] < pts[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Lagrange interpolation.
pub fn interpolate(nodes: &[(Q, Q)]) -> UPoly<Q> {
    let mut out = UPoly::zero();
    for (i, (xi, yi)) in nodes.iter().enumerate() {
        let mut basis = UPoly::constant(yi.clone());
        for (j, (xj, _)) in nodes.iter().enumerate() {
            if i != j {
                let lin = UPoly::new(vec![-xj.clone(), Q::one()]);
                basis = basis.mul(&lin).div_scalar(&(xi - xj)).unwrap();
            }
        }
        out = out.add(&basis);
    }
    out
}

/// Distinct rational roots by the rational root test; `None` when the
/// integer coefficients are too large to enumerate divisors.
pub fn rational_roots(p: &UPoly<Q>) -> Option<Vec<Q>> {
    if p.is_zero() {
        return None;
    }
    let mut p = p.clone();
    let mut out = vec![];
    if p.coeff(0).is_zero() {
        out.push(Q::zero());
        while p.coeff(0).is_zero() {
            p = UPoly::new(p.coeffs()[1..].to_vec());
        }
    }
    if p.deg() == 0 {
        return Some(out);
    }
    let den = p.coeffs().iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
    let (num_divs, den_divs) = (divisors(&ints[0])?, divisors(ints.last().unwrap())?);
    for a in &num_divs {
        for b in &den_divs {
            for r in [Q::new(a.clone(), b.clone()), -Q::new(a.clone(), b.clone())] {
                if p.eval(&r).is_zero() && !out.contains(&r) {
                    out.push(r);
                }
            }
        }
    }
    Some(out)
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n: u64 = num::ToPrimitive::to_u64(&n.abs())?;
    if n > 1u64 << 40 {
        return None;
    }
    let mut small = vec![];
    let mut large = vec![];
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

// ---------------------------------------------------------------------------
// Specialization

/// An assignment of the invariants (and `aa`) to polynomials.
pub type Assignment = Vec<(Var, MPoly)>;

pub fn assignment(pairs: &[(&str, &str)]) -> Assignment {
    pairs.iter().map(|(k, v)| (var(k), mp(v))).collect()
}

/// `J4 = s^2, J5 = 2 s u, J6 = u^2, aa = 0`: a dense parametrization of
/// the `aa = 0` locus.
pub fn a0_assignment() -> Assignment {
    assignment(&[("J4", "s^2"), ("J5", "2*s*u"), ("J6", "u^2"), ("aa", "0")])
}

/// Checks that an assignment is compatible with `aa^2 = J5^2 - 4 J4 J6`
/// whenever it touches `aa`.
pub fn assignment_consistent(a: &Assignment) -> bool {
    let get = |n: &str| a.iter().find(|(v, _)| var_name(*v) == n).map(|(_, m)| m.clone());
    match get("aa") {
        None => true,
        Some(aa) => {
            let j = |n: &str| get(n).unwrap_or_else(|| MPoly::named(n));
            let rel = &(&j("J5") * &j("J5")) - &(&MPoly::int(4) * &(&j("J4") * &j("J6")));
            &aa * &aa == rel
        }
    }
}

pub fn specialize(m: &WeierstrassModel, a: &Assignment) -> Result<WeierstrassModel> {
    if !assignment_consistent(a) {
        return Err(K3Error::Inconsistent("assignment violates aa^2 = J5^2 - 4 J4 J6".into()));
    }
    let s = m.try_map(|c| c.substitute(a)).ok_or(K3Error::DegenerateSpecialization)?;
    WeierstrassModel::new(s.a2, s.a4, s.a6)
}

/// Rational values of the invariants.
pub fn rational_assignment(j: &[Q; 5], aa: Option<&Q>) -> Assignment {
    let mut out: Assignment = ["J2", "J3", "J4", "J5", "J6"]
        .iter()
        .zip(j)
        .map(|(n, c)| (var(n), MPoly::constant(c.clone())))
        .collect();
    if let Some(a) = aa {
        out.push((var("aa"), MPoly::constant(a.clone())));
    }
    out
}

// ---------------------------------------------------------------------------
// Witnesses

/// Inverts the coefficient map of `D(t)`.
pub fn witness_from_d(d: &UPoly<Q>) -> Result<[Q; 5]> {
    if d.deg() != 6 || !d.lc().is_one() {
        return Err(K3Error::Inconsistent("D must be monic of degree 6".into()));
    }
    if !d.coeff(5).is_zero() {
        return Err(K3Error::BadQuintic);
    }
    let j2 = -d.coeff(4) / q(6, 1);
    let j3 = -d.coeff(3) / q(4, 1);
    let j4 = (q(9, 1) * &j2 * &j2 - d.coeff(2)) / q(4, 1);
    let j5 = (d.coeff(1) - q(12, 1) * &j2 * &j3) / q(4, 1);
    let j6 = &j3 * &j3 - d.coeff(0) / q(4, 1);
    Ok([j2, j3, j4, j5, j6])
}

/// `D(t)` at rational invariants.
pub fn d_at(j: &[Q; 5]) -> UPoly<Q> {
    eval_jpoly(&named_factor("D").unwrap(), &rational_assignment_q(j)).unwrap()
}

fn rational_assignment_q(j: &[Q; 5]) -> Vec<(Var, Q)> {
    ["J2", "J3", "J4", "J5", "J6"].iter().zip(j).map(|(n, c)| (var(n), c.clone())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Locus {
    Generic,
    /// Common root of the two non-monomial factors of `f` and `g` (std,
    /// bfd) or of `D` and `E` (alt).
    Res,
    A0,
    J30,
    J4,
    J4J5,
}

impl Locus {
    pub fn label(&self, which: Fibration) -> &'static str {
        match (self, which) {
            (Locus::Generic, _) => "generic",
            (Locus::Res, Fibration::Std) => "Res_t(t^-3 f, t^-5 g)=0",
            (Locus::Res, Fibration::Alt) => "Res_t(D, E)=0",
            (Locus::Res, _) => "Res_t(t^-2 F, t^-3 G)=0",
            (Locus::A0, _) => "aa=0",
            (Locus::J30, _) => "J30=0",
            (Locus::J4, _) => "J4=0",
            (Locus::J4J5, _) => "J4=J5=0",
        }
    }

    /// Codimension in the moduli space.
    pub fn codim(&self) -> usize {
        match self {
            Locus::Generic | Locus::Res => 0,
            Locus::A0 | Locus::J30 | Locus::J4 => 1,
            Locus::J4J5 => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "generic" => Locus::Generic,
            "res" | "resde" | "resfg" => Locus::Res,
            "a0" | "aa0" => Locus::A0,
            "j30" => Locus::J30,
            "j4" => Locus::J4,
            "j4j5" => Locus::J4J5,
            _ => return Err(K3Error::UnknownType(s.into())),
        })
    }
}

/// Rational point of a locus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub locus: Locus,
    #[serde(serialize_with = "ser_qs")]
    pub j: [Q; 5],
    /// A rational square root of `J5^2 - 4 J4 J6`, when one exists.
    #[serde(serialize_with = "ser_opt_q")]
    pub aa: Option<Q>,
}

fn ser_qs<S: serde::Serializer>(v: &[Q; 5], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(5))?;
    for x in v {
        seq.serialize_element(&exactalg::ring::fmt_q(x))?;
    }
    seq.end()
}

fn ser_opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&exactalg::ring::fmt_q(x)),
        None => s.serialize_none(),
    }
}

impl Witness {
    pub fn assignment(&self) -> Assignment {
        rational_assignment(&self.j, self.aa.as_ref())
    }

    pub fn aa_square(&self) -> Q {
        let [_, _, j4, j5, j6] = &self.j;
        j5 * j5 - q(4, 1) * j4 * j6
    }
}

/// Exact rational square root.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    rational_root(x, 2)
}

pub fn rational_root(x: &Q, n: u32) -> Option<Q> {
    if x.is_zero() {
        return Some(Q::zero());
    }
    let neg = x.is_negative();
    if neg && n % 2 == 0 {
        return None;
    }
    let root = |b: &BigInt| -> Option<BigInt> {
        let r = num::integer::Roots::nth_root(&b.abs(), n);
        if num::pow::pow(r.clone(), n as usize) == b.abs() {
            Some(r)
        } else {
            None
        }
    };
    let (a, b) = (root(x.numer())?, root(x.denom())?);
    let r = Q::new(a, b);
    Some(if neg { -r } else { r })
}

/// Invariants that single out the loci of the tables, at a rational point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocusInvariants {
    pub j4: Q,
    pub j5: Q,
    pub aa_square: Q,
    pub j30: Q,
    pub res_std: Option<Q>,
    pub res_alt: Q,
    pub res_bfd: Q,
    pub res_max: Q,
}

fn res_of(f: &JPoly, g: &JPoly, pt: &[(Var, Q)]) -> Option<Q> {
    Some(eval_jpoly(f, pt)?.resultant(&eval_jpoly(g, pt)?))
}

fn strip_t(p: &JPoly, k: usize) -> JPoly {
    assert!(p.low_order() >= k);
    UPoly::new(p.coeffs()[k..].to_vec())
}

/// The non-monomial factors whose resultant defines each `Res` locus.
pub fn res_pair(which: Fibration) -> (JPoly, JPoly) {
    let m = model(which);
    match which {
        Fibration::Std => (strip_t(&m.a4, 3), strip_t(&m.a6, 5)),
        Fibration::Bfd => (strip_t(&m.a4, 2), strip_t(&m.a6, 3)),
        Fibration::Alt => (named_factor("D").unwrap(), named_factor("E").unwrap()),
        Fibration::Max => short_form(&m),
    }
}

pub fn locus_invariants(j: &[Q; 5], aa: Option<&Q>) -> LocusInvariants {
    let mut pt = rational_assignment_q(j);
    let aa_square = &j[3] * &j[3] - q(4, 1) * &j[2] * &j[4];
    let d = d_at(j);
    let j30 = d.discriminant().unwrap();
    let res = |w: Fibration, pt: &[(Var, Q)]| {
        let (a, b) = res_pair(w);
        res_of(&a, &b, pt)
    };
    let res_alt = res(Fibration::Alt, &pt).unwrap();
    let res_bfd = res(Fibration::Bfd, &pt).unwrap();
    let res_max = res(Fibration::Max, &pt).unwrap();
    let res_std = aa.and_then(|a| {
        pt.push((var("aa"), a.clone()));
        res(Fibration::Std, &pt)
    });
    LocusInvariants { j4: j[2].clone(), j5: j[3].clone(), aa_square, j30, res_std, res_alt, res_bfd, res_max }
}

impl LocusInvariants {
    /// True when exactly the invariants of the locus vanish among
    /// `J4, aa^2, J30` and the resultants relevant to the fibration.
    pub fn isolates(&self, locus: Locus, which: Fibration) -> bool {
        let z = |x: &Q| x.is_zero();
        let res_here = match which {
            Fibration::Std => self.res_std.as_ref().map(z).unwrap_or(false),
            Fibration::Alt => z(&self.res_alt),
            Fibration::Bfd => z(&self.res_bfd),
            Fibration::Max => z(&self.res_max),
        };
        let want = |l: Locus| l == locus;
        z(&self.j4) == want(Locus::J4)
            && z(&self.aa_square) == want(Locus::A0)
            && z(&self.j30) == want(Locus::J30)
            && res_here == want(Locus::Res)
            && !z(&self.j5)
    }
}

/// Rational witness for a codimension-one locus, by a deterministic scan.
///
/// `J30`: a double root `r` of `D` is imposed by solving `D(r) = D'(r) = 0`
/// for `J5, J6`; the remaining freedom makes `aa^2` a chosen square. The
/// `Res` loci impose a common root `r` of the relevant pair and solve
/// linearly. `A0` uses the `s, u` parametrization. A candidate is accepted
/// when it lies on no other locus of the tables (for all fibrations when
/// `which` is `None`).
pub fn find_witness(locus: Locus, which: Option<Fibration>) -> Result<Witness> {
    let fibs: Vec<Fibration> = match which {
        Some(w) => vec![w],
        None => Fibration::ALL.to_vec(),
    };
    let accept = |w: &Witness| -> bool {
        let inv = locus_invariants(&w.j, w.aa.as_ref());
        fibs.iter().all(|&f| {
            let l = if locus == Locus::Res && f != which.unwrap_or(f) { Locus::Generic } else { locus };
            inv.isolates(l, f)
        }) && (locus != Locus::Res || which.map_or(false, |f| res_gcd_degree(w, f) == Some(1)))
            && !w.j[4].is_zero()
            && !w.j[0].is_zero()
            && !w.j[1].is_zero()
    };
    let small = |n: i64| -> Vec<i64> { (1..=n).flat_map(|k| [k, -k]).collect() };
    match locus {
        Locus::J30 => {
            for r in small(3) {
                for j2 in small(3) {
                    for j3 in small(3) {
                        let (r, j2, j3) = (q(r, 1), q(j2, 1), q(j3, 1));
                        let a = &r * &r * &r - q(3, 1) * &j2 * &r - q(2, 1) * &j3;
                        let ap = q(3, 1) * &r * &r - q(3, 1) * &j2;
                        let c1 = &a * &ap / q(2, 1);
                        let c2 = &a * &a / q(4, 1);
                        if c2.is_zero() {
                            continue;
                        }
                        for s in 1..=6 {
                            let s = q(s, 1);
                            let j4 = (&c1 * &c1 - &s * &s) / (q(4, 1) * &c2);
                            let j5 = q(2, 1) * &j4 * &r - &c1;
                            let j6 = &c2 - &c1 * &r + &j4 * &r * &r;
                            let d = d_at(&[j2.clone(), j3.clone(), j4.clone(), j5.clone(), j6.clone()]);
                            let j = witness_from_d(&d)?;
                            let w = Witness { locus, j, aa: Some(s.clone()) };
                            debug_assert_eq!(w.aa_square(), &s * &s);
                            if accept(&w) {
                                return Ok(w);
                            }
                        }
                    }
                }
            }
        }
        Locus::Res => match which {
            Some(Fibration::Std) => {
                // gamma = 1 parameters with a common root r of
                // eps/zeta t^2 + 3 alpha t + zeta and t^2 - 2 beta t + delta zeta
                for r in small(3) {
                    for (de, ep, ze) in triples(3) {
                        let (r, de, ep, ze) = (q(r, 1), q(de, 1), q(ep, 1), q(ze, 1));
                        let be = (&r * &r + &de * &ze) / (q(2, 1) * &r);
                        let al = -(&ep * &r * &r / &ze + &ze) / (q(3, 1) * &r);
                        let j = [al, be, ep.clone(), &ze + &de * &ep, &de * &ze];
                        let w = Witness { locus, j, aa: Some(&ze - &de * &ep) };
                        if accept(&w) {
                            return Ok(w);
                        }
                    }
                }
            }
            Some(Fibration::Alt) => {
                // A(r) = E(r) = 0
                for r in small(3) {
                    for (j2, j4, j5) in triples(3) {
                        let (r, j2, j4, j5) = (q(r, 1), q(j2, 1), q(j4, 1), q(j5, 1));
                        let j3 = (&r * &r * &r - q(3, 1) * &j2 * &r) / q(2, 1);
                        let j6 = &j5 * &r - &j4 * &r * &r;
                        let j = [j2, j3, j4, j5, j6];
                        let aa = rational_sqrt(&(&j[3] * &j[3] - q(4, 1) * &j[2] * &j[4]));
                        let w = Witness { locus, j, aa };
                        if accept(&w) {
                            return Ok(w);
                        }
                    }
                }
            }
            Some(Fibration::Bfd) => {
                for r in small(3) {
                    for (j2, j3, j4) in triples(3) {
                        let (r, j2, j3, j4) = (q(r, 1), q(j2, 1), q(j3, 1), q(j4, 1));
                        let j5 = -(q(3, 1) * &j2 * &r * &r + &j4 * &j4 / q(3, 1)) / &r;
                        let g = &r * &r * &r * &r - q(2, 1) * &j3 * &r * &r * &r + &j2 * &j4 * &r * &r
                            + &j4 * &j5 * &r / q(3, 1)
                            + q(2, 27) * &j4 * &j4 * &j4;
                        let j6 = -g / (&r * &r);
                        let j = [j2, j3, j4, j5, j6];
                        let aa = rational_sqrt(&(&j[3] * &j[3] - q(4, 1) * &j[2] * &j[4]));
                        let w = Witness { locus, j, aa };
                        if accept(&w) {
                            return Ok(w);
                        }
                    }
                }
            }
            _ => {}
        },
        Locus::A0 => {
            for (j2, j3, s) in triples(3) {
                for u in small(3) {
                    let (s, u) = (q(s, 1), q(u, 1));
                    let j = [q(j2, 1), q(j3, 1), &s * &s, q(2, 1) * &s * &u, &u * &u];
                    let w = Witness { locus, j, aa: Some(Q::zero()) };
                    if accept(&w) {
                        return Ok(w);
                    }
                }
            }
        }
        _ => return Err(K3Error::UnknownType(format!("no rational witness search for {locus:?}"))),
    }
    Err(K3Error::Inconsistent(format!("no witness found for {locus:?}")))
}

/// Degree of the gcd of the `Res` pair at a witness.
fn res_gcd_degree(w: &Witness, which: Fibration) -> Option<usize> {
    let mut pt = rational_assignment_q(&w.j);
    if let Some(a) = &w.aa {
        pt.push((var("aa"), a.clone()));
    }
    let (a, b) = res_pair(which);
    Some(eval_jpoly(&a, &pt)?.gcd(&eval_jpoly(&b, &pt)?).deg())
}

fn triples(n: i64) -> Vec<(i64, i64, i64)> {
    let vals: Vec<i64> = (1..=n).flat_map(|k| [k, -k]).collect();
    let mut out = vec![];
    for &a in &vals {
        for &b in &vals {
            for &c in &vals {
                out.push((a, b, c));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Table rows

/// Specialized model and skeleton for a row of the tables. Rows on the
/// `Res` and `J30` loci use rational witnesses.
pub fn locus_model(which: Fibration, locus: Locus) -> Result<(WeierstrassModel, Option<Vec<JPoly>>)> {
    let m = model(which);
    let x = UPoly::x;
    Ok(match locus {
        Locus::Generic => (m, Some(default_skeleton(which))),
        Locus::Res | Locus::J30 => {
            let w = if locus == Locus::J30 { find_witness(Locus::J30, None)? } else { find_witness(Locus::Res, Some(which))? };
            (specialize(&m, &w.assignment())?, None)
        }
        Locus::A0 => {
            let s = specialize(&m, &a0_assignment())?;
            let sk = match which {
                Fibration::Alt => vec![jpoly("s*t - u")],
                Fibration::Bfd | Fibration::Std => vec![x()],
                Fibration::Max => vec![],
            };
            (s, Some(sk))
        }
        Locus::J4 => {
            let s = specialize(&m, &assignment(&[("J4", "0"), ("aa", "J5")]))?;
            let sk = match which {
                Fibration::Std | Fibration::Bfd => vec![x()],
                Fibration::Alt => vec![jpoly("J5*t - J6")],
                Fibration::Max => vec![jpoly("J5*t - J6^2")],
            };
            (s, Some(sk))
        }
        Locus::J4J5 => {
            let s = specialize(&m, &assignment(&[("J4", "0"), ("J5", "0"), ("aa", "0")]))?;
            let sk = match which {
                Fibration::Std | Fibration::Bfd => vec![x()],
                _ => vec![],
            };
            (s, Some(sk))
        }
    })
}

pub fn table_loci(which: Fibration) -> Vec<Locus> {
    use Locus::*;
    match which {
        Fibration::Std => vec![Generic, Res, J30, J4, J4J5],
        Fibration::Alt | Fibration::Bfd => vec![Generic, Res, A0, J30, J4, J4J5],
        Fibration::Max => vec![Generic, A0, J30, J4, J4J5],
    }
}

/// Classifies a table row; the Picard number is `16 + codim` of the locus.
pub fn classify_locus(which: Fibration, locus: Locus) -> Result<FiberConfig> {
    let (m, sk) = locus_model(which, locus)?;
    let cfg = classify_fibers(&m, sk.as_deref())?;
    let picard = 16 + locus.codim();
    if cfg.picard != picard {
        let ranks: Vec<usize> = cfg.roots.iter().map(|r| r.rank).collect();
        let mw_rank = lattices::shioda_tate_rank(&ranks, picard)?;
        return Ok(FiberConfig { picard, mw_rank, ..cfg });
    }
    Ok(cfg)
}

/// Completes a user assignment of `J2..J6, aa`: a missing `aa` is filled in
/// when `J5^2 - 4 J4 J6` has an evident square root (zero, a rational
/// square, or `J5^2` on `J4 = 0`) and left free otherwise.
pub fn complete_assignment(a: &Assignment) -> Result<Assignment> {
    const KEYS: [&str; 6] = ["J2", "J3", "J4", "J5", "J6", "aa"];
    let mut out = a.clone();
    for (v, val) in a {
        let name = var_name(*v);
        if !KEYS.contains(&name.as_str()) {
            return Err(K3Error::Parse(format!("cannot assign {name}; expected one of J2..J6, aa")));
        }
        if let Some(w) = val.vars().into_iter().find(|w| !["s", "u"].contains(&var_name(*w).as_str())) {
            return Err(K3Error::Parse(format!("{name} = {val}: only rationals and the tokens s, u are allowed, found {}", var_name(w))));
        }
    }
    let aa = var("aa");
    if a.iter().any(|(v, _)| *v == aa) {
        return Ok(out);
    }
    let rel = mp("J5^2 - 4*J4*J6").substitute(a);
    let j4 = MPoly::named("J4").substitute(a);
    let root = if rel.is_zero() {
        Some(MPoly::zero())
    } else if let Some(c) = rel.as_constant() {
        let r = rational_sqrt(&c).ok_or_else(|| {
            K3Error::Unsupported(format!("J5^2 - 4 J4 J6 = {} has no rational square root, so aa is irrational", exactalg::ring::fmt_q(&c)))
        })?;
        Some(MPoly::constant(r))
    } else if j4.is_zero() {
        Some(MPoly::named("J5").substitute(a))
    } else {
        None
    };
    if let Some(r) = root {
        out.push((aa, r));
    }
    Ok(out)
}

fn same_assignment(a: &Assignment, b: &Assignment) -> bool {
    let key = |x: &Assignment| x.iter().map(|(v, m)| (var_name(*v), m.clone())).collect::<BTreeMap<_, _>>();
    key(a) == key(b)
}

/// Classifies a J-model under an assignment. Assignments that cut out a
/// locus of the tables use that locus's factor skeleton; rational models
/// are classified exactly; other symbolic ones use the generic skeleton.
pub fn classify_assignment(which: Fibration, a: &Assignment) -> Result<(Assignment, FiberConfig)> {
    let full = complete_assignment(a)?;
    let loci = [
        (Locus::J4, assignment(&[("J4", "0"), ("aa", "J5")])),
        (Locus::J4J5, assignment(&[("J4", "0"), ("J5", "0"), ("aa", "0")])),
        (Locus::A0, a0_assignment()),
    ];
    if full.is_empty() {
        return Ok((full, classify_locus(which, Locus::Generic)?));
    }
    for (locus, la) in &loci {
        if same_assignment(&full, la) {
            return Ok((full, classify_locus(which, *locus)?));
        }
    }
    let m = specialize(&model(which), &full)?;
    let cfg = if m.is_rational() {
        classify_fibers(&m, None)?
    } else {
        classify_fibers(&m, Some(&default_skeleton(which)))?
    };
    Ok((full, cfg))
}

// ---------------------------------------------------------------------------
// The J30 chain
//
// All members are weighted homogeneous in `J2..J6` (weight `k` for `J_k`,
// 5 for `aa`), so an identity between members of equal weight holds iff it
// holds at `J6 = 1`. The symbolic checks run there, after the weights of
// both sides are computed from the inputs.

#[derive(Clone, Debug, Serialize)]
pub struct ChainMember {
    pub name: String,
    pub holds: bool,
    /// `symbolic` or `points`.
    pub method: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub members: Vec<ChainMember>,
    /// Weights (`J_k` of weight `k`) of `J30` and of each side.
    pub weights: Vec<(String, i64)>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.members.iter().all(|m| m.holds)
    }

    pub fn member(&self, prefix: &str) -> Option<&ChainMember> {
        self.members.iter().find(|m| m.name.starts_with(prefix))
    }
}

/// Weight of a homogeneous polynomial in the J-ring (`J_k -> k`, `aa -> 5`).
pub fn mpoly_weight(m: &MPoly) -> Option<i64> {
    let w = |v: Var| -> Option<i64> {
        Some(match var_name(v).as_str() {
            "J2" => 2,
            "J3" => 3,
            "J4" => 4,
            "J5" => 5,
            "J6" => 6,
            "aa" => 5,
            _ => return None,
        })
    };
    let mut out = None;
    for (mono, _) in m.terms() {
        let mut s = 0;
        for v in mono.vars() {
            s += w(v)? * mono.exp(v) as i64;
        }
        match out {
            None => out = Some(s),
            Some(x) if x != s => return None,
            _ => {}
        }
    }
    out
}

fn jelem_weight(c: &JElem) -> Option<i64> {
    Some(mpoly_weight(&c.numerator())? - mpoly_weight(&c.denominator())?)
}

/// `(W, tw)` with the coefficient of `t^i` homogeneous of weight `W - i tw`.
pub fn jpoly_weight(p: &JPoly) -> Option<(i64, i64)> {
    let ws: Vec<(i64, i64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| Some((i as i64, jelem_weight(c)?)))
        .collect::<Option<_>>()?;
    let (i0, w0) = ws[0];
    let (i1, w1) = *ws.last()?;
    if i1 == i0 || (w0 - w1) % (i1 - i0) != 0 {
        return None;
    }
    let tw = (w0 - w1) / (i1 - i0);
    let big_w = w0 + i0 * tw;
    ws.iter().all(|&(i, w)| w + i * tw == big_w).then_some((big_w, tw))
}

fn disc_weight(p: &JPoly) -> Option<i64> {
    let (w, tw) = jpoly_weight(p)?;
    let n = p.deg() as i64;
    Some((2 * n - 2) * w - n * (n - 1) * tw)
}

fn res_weight(f: &JPoly, g: &JPoly) -> Option<i64> {
    let ((wf, tf), (wg, tg)) = (jpoly_weight(f)?, jpoly_weight(g)?);
    if tf != tg {
        return None;
    }
    let (m, n) = (f.deg() as i64, g.deg() as i64);
    Some(n * wf + m * wg - m * n * tf)
}

fn umap(p: &JPoly, a: &Assignment) -> UPoly<MPoly> {
    let cs: Vec<MPoly> = p
        .coeffs()
        .iter()
        .map(|c| c.to_mpoly().expect("polynomial coefficient").substitute(a))
        .collect();
    UPoly::new(cs)
}

/// Reduces `m` modulo `aa^2 = rel`, returning `c0 + c1 aa`.
fn reduce_aa(m: &MPoly, rel: &MPoly) -> (MPoly, MPoly) {
    let aa = var("aa");
    let (mut c0, mut c1) = (MPoly::zero(), MPoly::zero());
    let mut pw = MPoly::one();
    for (k, c) in m.coeffs_in(aa).iter().enumerate() {
        if k > 0 && k % 2 == 0 {
            pw = &pw * rel;
        }
        let term = c * &pw;
        if k % 2 == 0 {
            c0 = &c0 + &term;
        } else {
            c1 = &c1 + &term;
        }
    }
    (c0, c1)
}

/// The polynomial inputs of the chain.
struct ChainInputs {
    d_big: JPoly,
    d_small: JPoly,
    p: JPoly,
    p_big: JPoly,
    /// `2 J6 t^-3 f` and `t^-5 g` (std).
    f1: JPoly,
    g1: JPoly,
    /// `t^-2 F`, `t^-3 G` (bfd).
    bf: JPoly,
    bg: JPoly,
    /// short form of the maximal model
    mf: JPoly,
    mg: JPoly,
}

fn chain_inputs() -> Result<ChainInputs> {
    let (sf, sg) = res_pair(Fibration::Std);
    let (bf, bg) = res_pair(Fibration::Bfd);
    let (mf, mg) = res_pair(Fibration::Max);
    Ok(ChainInputs {
        d_big: named_factor("D")?,
        d_small: named_factor("d")?,
        p: named_factor("p")?,
        p_big: named_factor("P")?,
        f1: sf.scale(&jc("2*J6")),
        g1: sg,
        bf,
        bg,
        mf,
        mg,
    })
}

/// Members of the chain (with `J30 := Disc_t D`):
///
/// * `Disc_t d = J30`;
/// * `(2^4/(3^18 J6^30)) Disc_t p / Res_t^3(t^-3 f, t^-5 g) = J30`;
/// * `-(J2^9/3^21) Disc_t P / Res_t^3(t^-2 F, t^-3 G) = J30`.
///
/// The `p` and `P` members are checked symbolically; when the `P` member
/// fails, the quotient standing in place of `J2^9` is computed exactly.
/// `d` has degree 8 and the `Disc_t d` member is decided at rational
/// points: one point where the sides differ disproves it, and the relation
/// that does hold is reported with the number of points checked.
pub fn verify_j30_chain() -> Result<ChainReport> {
    let inp = chain_inputs()?;
    let mut weights = vec![];
    let mut wt = |name: &str, w: Option<i64>| -> Result<i64> {
        let w = w.ok_or_else(|| K3Error::IdentityFailed(format!("{name} is not weighted homogeneous")))?;
        weights.push((name.to_string(), w));
        Ok(w)
    };
    let w_j30 = wt("J30", disc_weight(&inp.d_big))?;
    let w_std_l = wt("J30 3^18 J6^24 Res^3 (std)", Some(w_j30 + 24 * 6 + 3 * res_weight(&inp.f1, &inp.g1).unwrap_or(i64::MIN / 8)))?;
    let w_std_r = wt("2^10 Disc p", disc_weight(&inp.p))?;
    let w_bfd_l = wt("3^21 Res^3 J30 (bfd)", Some(w_j30 + 3 * res_weight(&inp.bf, &inp.bg).unwrap_or(i64::MIN / 8)))?;
    let w_bfd_r = wt("Disc P", disc_weight(&inp.p_big))?;
    let mut members = vec![ChainMember {
        name: "J30 := Disc_t D".into(),
        holds: true,
        method: "definition".into(),
        detail: format!("weight {w_j30} (J_k of weight k)"),
    }];

    let dehom = assignment(&[("J6", "1")]);
    let rel = mp("J5^2 - 4*J4");
    let qc = |n: i64| MPoly::int(n);
    let j30 = umap(&inp.d_big, &dehom).discriminant_by_formula()?;

    // Disc d, at points
    members.push(disc_d_member(&inp)?);

    // std
    let res_std = umap(&inp.f1, &dehom).resultant_by_formula(&umap(&inp.g1, &dehom));
    let disc_p = umap(&inp.p, &dehom).discriminant_by_formula()?;
    let lhs = &(&j30 * &qc(3).pow(18)) * &res_std.pow(3);
    let rhs = &disc_p * &qc(2).pow(10);
    let exact = reduce_aa(&(&lhs - &rhs), &rel) == (MPoly::zero(), MPoly::zero());
    let holds = exact && w_std_l == w_std_r;
    members.push(ChainMember {
        name: "J30 = 2^4/(3^18 J6^30) Disc_t p / Res_t^3(t^-3 f, t^-5 g)".into(),
        holds,
        method: "symbolic".into(),
        detail: format!(
            "J30 3^18 J6^24 Res_t(2 J6 t^-3 f, t^-5 g)^3 = 2^10 Disc_t p: {} at J6 = 1 modulo aa^2 = J5^2 - 4 J4 J6; weights {w_std_l} / {w_std_r}",
            if exact { "equal" } else { "different" }
        ),
    });

    // bfd
    let res_bfd = umap(&inp.bf, &dehom).resultant_by_formula(&umap(&inp.bg, &dehom));
    let disc_pb = umap(&inp.p_big, &dehom).discriminant_by_formula()?;
    let num = -&(&(&qc(3).pow(21) * &res_bfd.pow(3)) * &j30);
    let j2 = MPoly::named("J2");
    let holds = num == &disc_pb * &j2.pow(9) && w_bfd_l == w_bfd_r + 18;
    let detail = if holds {
        "exact".into()
    } else {
        match num.div_exact(&disc_pb) {
            Ok(x) => {
                let wx = mpoly_weight(&x);
                format!(
                    "fails in the constant only: J30 = -(X/3^21) Disc_t P / Res_t^3 holds with X = {x} (weight {}; printed X = J2^9, weight 18)",
                    wx.map(|w| w.to_string()).unwrap_or("-".into())
                )
            }
            Err(_) => "fails; -3^21 Res^3 J30 / Disc_t P is not a polynomial".into(),
        }
    };
    members.push(ChainMember {
        name: "J30 = -(J2^9/3^21) Disc_t P / Res_t^3(t^-2 F, t^-3 G)".into(),
        holds,
        method: "symbolic".into(),
        detail,
    });
    Ok(ChainReport { members, weights })
}

/// Sample points for point checks: rational parameters in the `gamma = 1`
/// gauge, so the point is a genuine point of the J-ring with `aa`.
fn chain_points(n: usize) -> Vec<Vec<(Var, Q)>> {
    let vars: Vec<Var> = ["J2", "J3", "J4", "J5", "J6", "aa"].iter().map(|s| var(s)).collect();
    (0..n).map(|k| sample_point(&vars, k)).collect()
}

fn disc_d_member(inp: &ChainInputs) -> Result<ChainMember> {
    let pts = chain_points(6);
    let mut equal = 0;
    let mut corrected = 0;
    for pt in &pts {
        let ev = |p: &JPoly| eval_jpoly(p, pt).ok_or(K3Error::DegenerateSpecialization);
        let j30 = ev(&inp.d_big)?.discriminant()?;
        let dd = ev(&inp.d_small)?.discriminant()?;
        let res = ev(&inp.mf)?.resultant(&ev(&inp.mg)?);
        let val = |n: &str| pt.iter().find(|(v, _)| var_name(*v) == n).unwrap().1.clone();
        if dd == j30 {
            equal += 1;
        }
        let rhs = j30 * Q::from_integer(BigInt::from(2).pow(4) * BigInt::from(3).pow(54)) * val("J4") * res.pow(3)
            / val("J6").pow(214);
        if dd == rhs {
            corrected += 1;
        }
    }
    let n = pts.len();
    Ok(ChainMember {
        name: "J30 = Disc_t d".into(),
        holds: equal == n,
        method: "points".into(),
        detail: format!(
            "Disc_t d = J30 at {equal}/{n} rational points; Disc_t d = 2^4 3^54 J4 Res_t(f,g)^3 J30 / J6^214 (f, g the short-form \
             coefficients of the maximal model) at {corrected}/{n}"
        ),
    })
}

/// All members at one rational point of the invariants, with `aa` kept
/// symbolic and reduced by `aa^2 = J5^2 - 4 J4 J6`.
pub fn chain_at_point(j: &[Q; 5]) -> Result<Vec<(String, bool)>> {
    let inp = chain_inputs()?;
    let a = rational_assignment(j, None);
    let rel = mp("J5^2 - 4*J4*J6").substitute(&a);
    let qc = |n: i64| MPoly::int(n);
    let j30 = umap(&inp.d_big, &a).discriminant()?;
    let dd = umap(&inp.d_small, &a).discriminant()?;
    let j6 = MPoly::constant(j[4].clone());
    let res_std = umap(&inp.f1, &a).resultant(&umap(&inp.g1, &a));
    let disc_p = umap(&inp.p, &a).discriminant()?;
    let lhs = &(&(&j30 * &qc(3).pow(18)) * &j6.pow(24)) * &res_std.pow(3);
    let std_ok = reduce_aa(&(&lhs - &(&disc_p * &qc(2).pow(10))), &rel) == (MPoly::zero(), MPoly::zero());
    let res_bfd = umap(&inp.bf, &a).resultant(&umap(&inp.bg, &a));
    let disc_pb = umap(&inp.p_big, &a).discriminant()?;
    let num = -&(&(&qc(3).pow(21) * &res_bfd.pow(3)) * &j30);
    let j2 = MPoly::constant(j[0].clone());
    let j4 = MPoly::constant(j[2].clone());
    Ok(vec![
        ("Disc_t d = J30".into(), dd == j30),
        ("std member".into(), std_ok),
        ("bfd member (J2^9)".into(), num == &disc_pb * &j2.pow(9)),
        ("bfd member with J4^9".into(), num == &disc_pb * &j4.pow(9)),
    ])
}

// ---------------------------------------------------------------------------
// Rescalings: Siegel restriction and model equivalence

/// `c * prod v^e` with integer (possibly negative) exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct Scale {
    pub c: Q,
    pub exps: BTreeMap<Var, i64>,
}

impl Scale {
    pub fn one() -> Self {
        Scale { c: Q::one(), exps: BTreeMap::new() }
    }

    fn of_term(m: &MPoly) -> Option<Self> {
        if m.num_terms() != 1 {
            return None;
        }
        let (mono, c) = &m.terms()[0];
        let exps = mono.vars().map(|v| (v, mono.exp(v) as i64)).collect();
        Some(Scale { c: c.clone(), exps })
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut exps = self.exps.clone();
        for (v, e) in &o.exps {
            *exps.entry(*v).or_default() += e;
        }
        exps.retain(|_, e| *e != 0);
        Scale { c: &self.c * &o.c, exps }
    }

    pub fn pow(&self, n: i64) -> Self {
        let c = if n >= 0 { num::pow::pow(self.c.clone(), n as usize) } else { num::pow::pow(self.c.recip(), (-n) as usize) };
        let exps = self.exps.iter().map(|(v, e)| (*v, e * n)).filter(|(_, e)| *e != 0).collect();
        Scale { c, exps }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// All `n`-th roots (two for even `n` and positive constant).
    pub fn roots(&self, n: i64) -> Vec<Self> {
        if n < 0 {
            return self.inv().roots(-n);
        }
        if n == 0 {
            return vec![];
        }
        if self.exps.values().any(|e| e % n != 0) {
            return vec![];
        }
        let exps: BTreeMap<Var, i64> = self.exps.iter().map(|(v, e)| (*v, e / n)).collect();
        match rational_root(&self.c, n as u32) {
            Some(c) if n % 2 == 0 && !c.is_zero() => {
                vec![Scale { c: c.clone(), exps: exps.clone() }, Scale { c: -c, exps }]
            }
            Some(c) => vec![Scale { c, exps }],
            None => vec![],
        }
    }

    /// `(numerator, denominator)` monomials.
    pub fn split(&self) -> (MPoly, MPoly) {
        let mut up = MPoly::constant(self.c.clone());
        let mut down = MPoly::one();
        for (v, e) in &self.exps {
            let m = MPoly::var(*v).pow(e.unsigned_abs() as u32);
            if *e > 0 {
                up = &up * &m;
            } else {
                down = &down * &m;
            }
        }
        (up, down)
    }

    /// As a polynomial when all exponents are nonnegative.
    pub fn to_mpoly(&self) -> Option<MPoly> {
        let mut m = MPoly::constant(self.c.clone());
        for (v, e) in &self.exps {
            if *e < 0 {
                return None;
            }
            m = &m * &MPoly::var(*v).pow(*e as u32);
        }
        Some(m)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", exactalg::ring::fmt_q(&self.c))?;
        for (v, e) in &self.exps {
            write!(f, "*{}^{}", var_name(*v), e)?;
        }
        Ok(())
    }
}

/// `(x, y, t) -> (w2 x, w2^(3/2) y, s t)` taking one model to another:
/// `a_i'(T) = w2^(-i/2) a_i(s T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseRescaling {
    pub w2: Scale,
    pub s: Scale,
}

impl fmt::Display for BaseRescaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^2 = {}, t -> ({}) t", self.w2, self.s)
    }
}

fn mpoly_coeffs(m: &WeierstrassModel) -> Result<[Vec<MPoly>; 3]> {
    let g = |p: &JPoly| -> Result<Vec<MPoly>> {
        p.coeffs()
            .iter()
            .map(|c| c.to_mpoly().ok_or(K3Error::NoRescalingFound))
            .collect()
    };
    Ok([g(&m.a2)?, g(&m.a4)?, g(&m.a6)?])
}

/// `num / den` when it is a constant times a Laurent monomial.
pub fn monomial_ratio(num: &MPoly, den: &MPoly) -> Option<Scale> {
    if let (Some(x), Some(y)) = (Scale::of_term(num), Scale::of_term(den)) {
        return Some(x.mul(&y.inv()));
    }
    if let Some(r) = num.div_exact(den).ok().and_then(|r| Scale::of_term(&r)) {
        return Some(r);
    }
    den.div_exact(num).ok().and_then(|r| Scale::of_term(&r)).map(|r| r.inv())
}

/// Finds `(w2, s)` with `dst.a_i(T) = w2^(-i/2) src.a_i(s T)`. Every nonzero
/// coefficient must be a single term on both sides.
pub fn find_base_rescaling(src: &WeierstrassModel, dst: &WeierstrassModel) -> Result<BaseRescaling> {
    let (a, b) = (mpoly_coeffs(src)?, mpoly_coeffs(dst)?);
    // equations s^k w2^(-e) = ratio
    let mut eqs: Vec<(i64, i64, Scale)> = vec![];
    for (e, (pa, pb)) in a.iter().zip(&b).enumerate() {
        let n = pa.len().max(pb.len());
        for k in 0..n {
            let ca = pa.get(k).cloned().unwrap_or_else(MPoly::zero);
            let cb = pb.get(k).cloned().unwrap_or_else(MPoly::zero);
            match (ca.is_zero(), cb.is_zero()) {
                (true, true) => continue,
                (true, false) | (false, true) => return Err(K3Error::NoRescalingFound),
                _ => {}
            }
            let ratio = monomial_ratio(&cb, &ca).ok_or(K3Error::NoRescalingFound)?;
            eqs.push((k as i64, e as i64 + 1, ratio));
        }
    }
    // eliminate w2 between two equations with independent exponent vectors
    for i in 0..eqs.len() {
        for j in i + 1..eqs.len() {
            let (k1, e1, r1) = &eqs[i];
            let (k2, e2, r2) = &eqs[j];
            let det = k1 * e2 - k2 * e1;
            if det == 0 {
                continue;
            }
            // s^(k1 e2 - k2 e1) = r1^e2 / r2^e1
            let rhs = r1.pow(*e2).mul(&r2.pow(*e1).inv());
            for s in rhs.roots(det) {
                // w2^e1 = s^k1 / r1
                for w2 in s.pow(*k1).mul(&r1.inv()).roots(*e1) {
                    let ok = eqs.iter().all(|(k, e, r)| s.pow(*k).mul(&w2.pow(-e)) == *r);
                    if ok {
                        return Ok(BaseRescaling { w2, s });
                    }
                }
            }
            return Err(K3Error::NoRescalingFound);
        }
    }
    Err(K3Error::NoRescalingFound)
}

/// The Siegel substitution at `J4 = 0`.
pub fn siegel_assignment() -> Assignment {
    assignment(&[
        ("J2", "psi4"),
        ("J3", "psi6"),
        ("J4", "0"),
        ("J5", "2^12*3^5*chi10"),
        ("J6", "2^12*3^6*chi12"),
        ("aa", "2^12*3^5*chi10"),
    ])
}

/// `y^2 = x^3 - t^3(psi4 t/48 + 4 chi10) x + t^5 (t^2 - psi6 t/864 + chi12)`.
pub fn std_red() -> WeierstrassModel {
    WeierstrassModel {
        a2: JPoly::zero(),
        a4: jpoly("-t^3*(psi4*t/48 + 4*chi10)"),
        a6: jpoly("t^5*(t^2 - psi6*t/864 + chi12)"),
    }
}

/// `y^2 = x^3 + (t^3 - psi4 t/48 - psi6/864) x^2 - (4 chi10 t - chi12) x`.
pub fn alt_red() -> WeierstrassModel {
    WeierstrassModel {
        a2: jpoly("t^3 - psi4*t/48 - psi6/864"),
        a4: jpoly("-(4*chi10*t - chi12)"),
        a6: JPoly::zero(),
    }
}

#[derive(Clone, Debug)]
pub struct SiegelResult {
    pub source: Fibration,
    pub target: &'static str,
    pub rescaling: BaseRescaling,
    pub model: WeierstrassModel,
}

/// Restricts a J-model to the Siegel locus and finds the rescaling onto
/// the reduced form (`std_red` for bfd and std, `alt_red` for alt and max).
pub fn siegel_restriction(which: Fibration) -> Result<SiegelResult> {
    let m = specialize(&model(which), &siegel_assignment())?;
    let (target, name) = match which {
        Fibration::Bfd | Fibration::Std => (std_red(), "std_red"),
        Fibration::Alt | Fibration::Max => (alt_red(), "alt_red"),
    };
    let r = find_base_rescaling(&m, &target)?;
    let applied = apply_base_rescaling(&m, &r)?;
    if applied != target {
        return Err(K3Error::NoRescalingFound);
    }
    Ok(SiegelResult { source: which, target: name, rescaling: r, model: applied })
}

/// Applies `a_i(T) -> w2^(-i/2) a_i(s T)`; exponents must stay polynomial.
pub fn apply_base_rescaling(m: &WeierstrassModel, r: &BaseRescaling) -> Result<WeierstrassModel> {
    let cs = mpoly_coeffs(m)?;
    let mut out: Vec<JPoly> = vec![];
    for (e, p) in cs.iter().enumerate() {
        let mut v = vec![];
        for (k, c) in p.iter().enumerate() {
            if c.is_zero() {
                v.push(JElem::zero());
                continue;
            }
            let sc = r.s.pow(k as i64).mul(&r.w2.pow(-(e as i64 + 1)));
            let (up, down) = sc.split();
            let scaled = (c * &up).div_exact(&down).map_err(|_| K3Error::NoRescalingFound)?;
            v.push(JElem::from_mpoly(&scaled));
        }
        out.push(UPoly::new(v));
    }
    let mut it = out.into_iter();
    Ok(WeierstrassModel { a2: it.next().unwrap(), a4: it.next().unwrap(), a6: it.next().unwrap() })
}

/// A model with coefficients `num/den` over a polynomial ring containing `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatModel {
    pub a: [(MPoly, MPoly); 3],
}

impl RatModel {
    pub fn from_polys(a2: MPoly, a4: MPoly, a6: MPoly) -> Self {
        RatModel { a: [(a2, MPoly::one()), (a4, MPoly::one()), (a6, MPoly::one())] }
    }

    /// A J-model pushed through a substitution of the invariants and `aa`
    /// (typically [`quartic::j_in_params`]).
    pub fn from_model(m: &WeierstrassModel, sub: &Assignment) -> Self {
        let conv = |p: &JPoly| -> (MPoly, MPoly) {
            // common denominator over the coefficients
            let mut den = MPoly::one();
            for c in p.coeffs() {
                let d = c.denominator().substitute(sub);
                if !(&den).div_exact(&d).is_ok() {
                    den = &den * &d;
                }
            }
            let mut num = MPoly::zero();
            for (k, c) in p.coeffs().iter().enumerate() {
                let n = c.numerator().substitute(sub);
                let d = c.denominator().substitute(sub);
                let f = den.div_exact(&d).expect("common denominator");
                num = &num + &(&(&n * &f) * &MPoly::var(tvar()).pow(k as u32));
            }
            (num, den)
        };
        RatModel { a: [conv(&m.a2), conv(&m.a4), conv(&m.a6)] }
    }
}

/// `x -> w2 x` (so `a_i -> w2^(i/2) a_i`) taking `m2` to `m1`, with `w2` a
/// constant times a monomial in `t` and the ring indeterminates.
pub fn equivalence_check_rat(m1: &RatModel, m2: &RatModel) -> Result<Scale> {
    let mut cands: Option<Vec<Scale>> = None;
    for (i, ((n1, d1), (n2, d2))) in m1.a.iter().zip(&m2.a).enumerate() {
        match (n1.is_zero(), n2.is_zero()) {
            (true, true) => continue,
            (true, false) | (false, true) => {
                return Err(K3Error::Mismatch(format!("a{} vanishes on one side only", 2 * (i + 1))))
            }
            _ => {}
        }
        let top = n1 * d2;
        let bot = d1 * n2;
        let ratio = top
            .div_exact(&bot)
            .ok()
            .and_then(|r| Scale::of_term(&r))
            .ok_or_else(|| K3Error::Mismatch(format!("a{} ratio is not a monomial", 2 * (i + 1))))?;
        let k = i as i64 + 1;
        cands = Some(match cands {
            None => ratio.roots(k),
            Some(c) => c.into_iter().filter(|w| w.pow(k) == ratio).collect(),
        });
        if cands.as_ref().unwrap().is_empty() {
            return Err(K3Error::Mismatch(format!("no common rescaling through a{}", 2 * (i + 1))));
        }
    }
    cands
        .and_then(|c| c.into_iter().next())
        .ok_or_else(|| K3Error::Mismatch("zero models".into()))
}

/// Compares two J-models through the injective parameter map.
pub fn equivalence_check(m1: &WeierstrassModel, m2: &WeierstrassModel) -> Result<Scale> {
    let sub = quartic::j_in_params();
    equivalence_check_rat(&RatModel::from_model(m1, &sub), &RatModel::from_model(m2, &sub))
}

/// The quartic parameters in the gauge `gamma = 1`.
pub fn gauge_params() -> QuarticParams {
    let mut p = QuarticParams::symbolic();
    p.gamma = MPoly::one();
    p
}

/// Derives the fibration from the quartic in the gauge `gamma = 1`,
/// dehomogenizes, and matches it with the J-model.
pub fn derived_vs_j_model(which: Fibration) -> Result<Scale> {
    let p = gauge_params();
    let der = quartic::derive_fibration(which, &p)?;
    let (u, v) = quartic::dehomogenization(which, &p);
    let map = vec![(var("u"), u), (var("v"), v)];
    let d = |m: &MPoly| m.substitute(&map);
    let derived = RatModel::from_polys(d(&der.model.a2), d(&der.model.a4), d(&der.model.a6));
    let jm = RatModel::from_model(&model(which), &quartic::j_in_params());
    equivalence_check_rat(&derived, &jm)
}

/// The extreme coefficients of `p` against the stated values.
///
/// Returns `(as_stated, conjugate)`: whether `p` has leading coefficient
/// `2(J5^2(J5+aa) - J4 J6(3J5+aa))` and constant coefficient
/// `2 J6^3 (J5^2(J5-aa) - J4 J6 (3J5-aa))`, and whether `-p` with
/// `aa -> -aa` does.
pub fn p_extreme_coefficients() -> (bool, bool) {
    let p = named_factor("p").unwrap();
    let lead = jc("2*(J5^2*(J5 + aa) - J4*J6*(3*J5 + aa))");
    let trail = jc("2*J6^3*(J5^2*(J5 - aa) - J4*J6*(3*J5 - aa))");
    let as_stated = p.lc() == lead && p.coeff(0) == trail;
    let conj = p.lc().neg().conj() == lead && p.coeff(0).neg().conj() == trail;
    (as_stated, conj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kodaira_table() {
        assert_eq!(kodaira_from_orders(3, 5, 9).unwrap(), Kodaira::IIIStar);
        assert_eq!(kodaira_from_orders(2, 3, 14).unwrap(), Kodaira::IStar(8));
        assert_eq!(kodaira_from_orders(0, 0, 1).unwrap(), Kodaira::I(1));
        assert_eq!(kodaira_from_orders(4, 5, 10).unwrap(), Kodaira::IIStar);
        assert!(matches!(kodaira_from_orders(4, 6, 12), Err(K3Error::NonMinimal)));
        assert!(matches!(kodaira_from_orders(1, 1, 5), Err(K3Error::NoMatch(..))));
        for s in ["I0", "I1", "I8*", "II", "III", "IV", "IV*", "III*", "II*"] {
            assert_eq!(Kodaira::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn orders_of_generic_models() {
        let std = model(Fibration::Std);
        assert_eq!(vanishing_orders(&std, &FiberPlace::t()).unwrap(), (3, 5, 9));
        let bfd = model(Fibration::Bfd);
        assert_eq!(vanishing_orders(&bfd, &FiberPlace::Infinity).unwrap(), (4, 5, 10));
        let alt = model(Fibration::Alt);
        let e = named_factor("E").unwrap();
        assert_eq!(vanishing_orders(&alt, &FiberPlace::Root(e)).unwrap(), (0, 0, 2));
        let max = model(Fibration::Max);
        assert_eq!(vanishing_orders(&max, &FiberPlace::Infinity).unwrap(), (2, 3, 16));
    }

    #[test]
    fn discriminants() {
        for w in Fibration::ALL {
            assert!(disc_conventions_agree(&model(w)), "{w}");
        }
        let alt = model(Fibration::Alt);
        let e = named_factor("E").unwrap();
        let d = named_factor("D").unwrap();
        assert_eq!(weierstrass_disc(&alt), e.mul(&e).mul(&d));
        let dd = named_factor("d").unwrap();
        assert_eq!(dd.deg(), 8);
        assert_eq!(dd.lc(), jc("J5^2 - 4*J4*J6"));
        let p = named_factor("P").unwrap();
        assert_eq!(p.lc(), jc("-27"));
        assert_eq!(p.coeff(5), jc("108*J3"));
        assert_eq!(p.coeff(0), jc("J4^2*(J5^2 - 4*J4*J6)"));
        let (f, g) = short_form(&alt);
        let (a, b) = (&alt.a2, &alt.a4);
        assert_eq!(f, b.sub(&a.mul(a).scale(&JElem::from_q(q(1, 3)))));
        assert_eq!(
            g,
            a.pow(3).scale(&JElem::from_q(q(2, 27))).sub(&a.mul(b).scale(&JElem::from_q(q(1, 3))))
        );
    }

    #[test]
    fn generic_classification() {
        let expect = [
            (Fibration::Std, "2III* + 6I1", "trivial"),
            (Fibration::Alt, "I8* + 2I2 + 6I1", "Z/2Z"),
            (Fibration::Bfd, "II* + I2* + 6I1", "trivial"),
            (Fibration::Max, "I10* + 8I1", "trivial"),
        ];
        for (w, fibers, mw) in expect {
            let c = classify_fibers(&model(w), Some(&default_skeleton(w))).unwrap();
            assert_eq!(c.summary(), fibers, "{w}");
            assert_eq!(c.mw_torsion, mw, "{w}");
            assert_eq!(c.euler, 24);
            assert_eq!(c.mw_rank, 0);
        }
    }

    #[test]
    fn torsion() {
        assert!(two_torsion_present(&model(Fibration::Alt)));
        assert!(!two_torsion_present(&model(Fibration::Std)));
        assert!(!two_torsion_present(&model(Fibration::Bfd)));
        assert!(!two_torsion_present(&model(Fibration::Max)));
    }

    #[test]
    fn translated_two_torsion() {
        let w = find_witness(Locus::A0, None).unwrap();
        let m = specialize(&model(Fibration::Alt), &w.assignment()).unwrap();
        // x -> x + (t^2 - 2): the torsion point moves off x = 0
        let r = jpoly("t^2 - 2");
        let (a2, a4) = (&m.a2, &m.a4);
        let three = JElem::from_int(3);
        let moved = WeierstrassModel::new(
            a2.add(&r.scale(&three)),
            a4.add(&a2.mul(&r).scale(&JElem::from_int(2))).add(&r.mul(&r).scale(&three)),
            r.pow(3).add(&a2.mul(&r.mul(&r))).add(&a4.mul(&r)),
        )
        .unwrap();
        assert!(!moved.a6.is_zero());
        assert!(two_torsion_present(&moved));
        let std = specialize(&model(Fibration::Std), &find_witness(Locus::J30, None).unwrap().assignment()).unwrap();
        assert!(!two_torsion_present(&std));
        let rr = rational_roots(&UPoly::new(vec![q(-6, 1), q(11, 1), q(-6, 1), q(1, 1)])).unwrap();
        assert_eq!(rr.len(), 3);
    }

    #[test]
    fn witness_round_trip() {
        let d = UPoly::<Q>::monomial(Q::one(), 6);
        assert_eq!(witness_from_d(&d).unwrap(), [Q::zero(), Q::zero(), Q::zero(), Q::zero(), Q::zero()]);
        let j = [q(2, 3), q(-1, 1), q(5, 2), q(7, 1), q(-3, 4)];
        assert_eq!(witness_from_d(&d_at(&j)).unwrap(), j);
        let bad = UPoly::new(vec![Q::zero(), Q::zero(), Q::zero(), Q::zero(), Q::zero(), Q::one(), Q::one()]);
        assert!(matches!(witness_from_d(&bad), Err(K3Error::BadQuintic)));
    }

    #[test]
    fn specializations() {
        let alt = model(Fibration::Alt);
        let s = specialize(&alt, &assignment(&[("J4", "0")])).unwrap();
        assert_eq!(vanishing_orders(&s, &FiberPlace::Infinity).unwrap(), (2, 3, 16));
        let bad = assignment(&[("J4", "0"), ("aa", "J6")]);
        assert!(specialize(&alt, &bad).is_err());
    }

    #[test]
    fn equivalence_with_derived_models() {
        for w in Fibration::ALL {
            let s = derived_vs_j_model(w).unwrap();
            eprintln!("{w}: w^2 = {s}");
        }
        assert!(equivalence_check(&model(Fibration::Std), &model(Fibration::Alt)).is_err());
        let id = equivalence_check(&model(Fibration::Std), &model(Fibration::Std)).unwrap();
        assert_eq!(id, Scale::one());
    }

    #[test]
    fn j30_chain() {
        let r = verify_j30_chain().unwrap();
        assert!(r.member("J30 = 2^4").unwrap().holds);
        let bfd = r.member("J30 = -(J2^9").unwrap();
        assert!(!bfd.holds);
        assert!(bfd.detail.contains("X = J4^9"), "{}", bfd.detail);
        let d = r.member("J30 = Disc_t d").unwrap();
        assert!(!d.holds);
        assert!(d.detail.ends_with("at 6/6"), "{}", d.detail);
        // J2 = J4 at this point, so both constants agree there
        let pt = chain_at_point(&[q(1, 1), q(1, 1), q(1, 1), q(3, 1), q(1, 1)]).unwrap();
        assert_eq!(pt.iter().map(|x| x.1).collect::<Vec<_>>(), vec![false, true, true, true]);
        let pt = chain_at_point(&[q(2, 1), q(1, 1), q(3, 1), q(3, 1), q(1, 1)]).unwrap();
        assert_eq!(pt.iter().map(|x| x.1).collect::<Vec<_>>(), vec![false, true, false, true]);
    }

    #[test]
    fn p_extremes_are_conjugated() {
        assert_eq!(p_extreme_coefficients(), (false, true));
    }

    #[test]
    fn siegel() {
        for w in Fibration::ALL {
            let r = siegel_restriction(w).unwrap();
            eprintln!("{w} -> {}: {}", r.target, r.rescaling);
        }
    }
}
