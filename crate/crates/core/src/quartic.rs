//! The quartic normal form, its parameter symmetries, the Nikulin
//! involution, the pencils cutting out the four fibrations, and the
//! symbolic derivation of each Weierstrass model from its substitution.

use crate::error::{K3Error, Result};
use exactalg::{mp, var, JElem, MPoly, Q, Var};
use serde::Serialize;

/// The six quartic parameters, as polynomials (indeterminates by default).
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticParams {
    pub alpha: MPoly,
    pub beta: MPoly,
    pub gamma: MPoly,
    pub delta: MPoly,
    pub epsilon: MPoly,
    pub zeta: MPoly,
}

pub const PARAM_NAMES: [&str; 6] = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"];

impl QuarticParams {
    pub fn symbolic() -> Self {
        Self::from_array(PARAM_NAMES.map(MPoly::named))
    }

    pub fn from_array([alpha, beta, gamma, delta, epsilon, zeta]: [MPoly; 6]) -> Self {
        QuarticParams { alpha, beta, gamma, delta, epsilon, zeta }
    }

    pub fn from_rationals(vals: [Q; 6]) -> Self {
        Self::from_array(vals.map(MPoly::constant))
    }

    pub fn to_array(&self) -> [MPoly; 6] {
        [
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.delta.clone(),
            self.epsilon.clone(),
            self.zeta.clone(),
        ]
    }

    /// Substitution map sending the parameter indeterminates to these values.
    pub fn map(&self) -> Vec<(Var, MPoly)> {
        PARAM_NAMES.iter().map(|n| var(n)).zip(self.to_array()).collect()
    }

    /// Evaluates a formula written in the parameter indeterminates.
    pub fn apply(&self, template: &MPoly) -> MPoly {
        template.substitute(&self.map())
    }

    /// `(gamma, delta) <-> (epsilon, zeta)`.
    pub fn swapped(&self) -> Self {
        QuarticParams {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            gamma: self.epsilon.clone(),
            delta: self.zeta.clone(),
            epsilon: self.gamma.clone(),
            zeta: self.delta.clone(),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        *self == Self::symbolic()
    }
}

/// The quartic surface `Q(alpha, ..., zeta)` in `P^3` with coordinates `X, Y, Z, W`.
#[derive(Clone, Debug)]
pub struct QuarticSurface {
    pub params: QuarticParams,
    pub f: MPoly,
}

fn quartic_template() -> MPoly {
    mp("Y^2*Z*W - 4*X^3*Z + 3*alpha*X*Z*W^2 + beta*Z*W^3 + gamma*X*Z^2*W \
        - 1/2*delta*Z^2*W^2 - 1/2*zeta*W^4 + epsilon*X*W^3")
}

pub fn quartic_poly(p: &QuarticParams) -> MPoly {
    p.apply(&quartic_template())
}

impl QuarticSurface {
    pub fn new(params: QuarticParams) -> Self {
        let f = quartic_poly(&params);
        QuarticSurface { params, f }
    }

    /// True when the curve `P(s, r)` (a point in `P^3` depending
    /// polynomially on parameters) lies on the surface.
    pub fn contains(&self, curve: &[MPoly; 4]) -> bool {
        on_curve(&self.f, curve)
    }
}

fn xyzw() -> [Var; 4] {
    [var("X"), var("Y"), var("Z"), var("W")]
}

/// Substitutes a projective point (or parametrized curve) into a form.
pub fn eval_at(f: &MPoly, pt: &[MPoly; 4]) -> MPoly {
    let vs = xyzw();
    f.substitute(&[
        (vs[0], pt[0].clone()),
        (vs[1], pt[1].clone()),
        (vs[2], pt[2].clone()),
        (vs[3], pt[3].clone()),
    ])
}

fn on_curve(f: &MPoly, curve: &[MPoly; 4]) -> bool {
    eval_at(f, curve).is_zero()
}

/// Parametrizations of the special curves on the quartic in the parameters
/// `x, y` (homogeneous of a common degree).
///
/// The residual conics are parametrized rationally from their defining
/// equations: on `R1` the first equation fixes `X : W`, and the second is
/// linear in `Z`; on `R2` likewise with the roles of the two pairs swapped.
pub fn special_curve(name: &str, p: &QuarticParams) -> Result<[MPoly; 4]> {
    let s = MPoly::named("x");
    let y = MPoly::named("y");
    let zero = MPoly::zero();
    Ok(match name {
        "L1" => [zero.clone(), s, y, zero],
        "L2" => [s, y, zero.clone(), zero],
        "L3" => [&p.zeta * &s, y, zero, &(&p.epsilon * &s) * &MPoly::int(2)],
        "R1" => {
            // 2 eps X = zeta W; (3 a e^2 z + 2 b e^3 - z^3) W^2 - e^2 (d e - g z) Z W + 2 e^3 Y^2 = 0
            let c1 = p.apply(&mp("3*alpha*epsilon^2*zeta + 2*beta*epsilon^3 - zeta^3"));
            let e = &p.epsilon;
            let e2 = e * e;
            let e3 = &e2 * e;
            let k = p.apply(&mp("delta*epsilon - gamma*zeta"));
            // with X = zeta s, W = 2 eps s:  4 e^2 c1 s^2 - 2 e^3 k s Z + 2 e^3 Y^2 = 0
            let den = &(&(&e3 * &k) * &s) * &MPoly::int(2);
            let num = &(&(&e2 * &c1) * &(&s * &s)).scale(&Q::from_integer(4.into())) + &(&(&e3 * &(&y * &y)) * &MPoly::int(2));
            [
                &(&p.zeta * &s) * &den,
                &y * &den,
                num,
                &(&(e * &s) * &den) * &MPoly::int(2),
            ]
        }
        "R2" => {
            // 2 g X = d W; (3 a g^2 d + 2 b g^3 - d^3) Z W^2 - g^2 (g z - d e) W^3 + 2 g^3 Y^2 Z = 0
            let c2 = p.apply(&mp("3*alpha*gamma^2*delta + 2*beta*gamma^3 - delta^3"));
            let g = &p.gamma;
            let g2 = g * g;
            let g3 = &g2 * g;
            let k = p.apply(&mp("gamma*zeta - delta*epsilon"));
            // with X = delta s, W = 2 g s:  Z (4 g^2 c2 s^2 + 2 g^3 Y^2) = 8 g^5 k s^3
            let den = &(&(&g2 * &c2) * &(&s * &s)).scale(&Q::from_integer(4.into())) + &(&(&g3 * &(&y * &y)) * &MPoly::int(2));
            let num = &(&(&(&g3 * &g2) * &k) * &s.pow(3)) * &MPoly::int(8);
            [
                &(&p.delta * &s) * &den,
                &y * &den,
                num,
                &(&(g * &s) * &den) * &MPoly::int(2),
            ]
        }
        other => return Err(K3Error::UnknownType(other.to_string())),
    })
}

pub const SPECIAL_CURVES: [&str; 5] = ["L1", "L2", "L3", "R1", "R2"];

/// `P1 = [0:1:0:0]`, the common point of the three lines.
pub fn base_point_p1() -> [MPoly; 4] {
    [MPoly::zero(), MPoly::one(), MPoly::zero(), MPoly::zero()]
}

/// True when the three lines meet exactly in `P1`: their four linear forms
/// `X, W, Z, 2 eps X - zeta W` vanish at `P1` and have rank three.
pub fn lines_concurrent_at_p1(p: &QuarticParams) -> bool {
    let forms = [
        mp("X"),
        mp("W"),
        mp("Z"),
        p.apply(&mp("2*epsilon*X - zeta*W")),
    ];
    if !forms.iter().all(|f| eval_at(f, &base_point_p1()).is_zero()) {
        return false;
    }
    // X, W, Z already have rank three; the fourth form adds nothing new.
    // Rank three needs eps or zeta nonzero so that L3 is a line at all.
    !(p.epsilon.is_zero() && p.zeta.is_zero())
}

// ---------------------------------------------------------------------------
// Pencils

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PencilName {
    L1,
    L2,
    L3,
    C1,
    C2,
    C3,
    T,
}

impl PencilName {
    pub const ALL: [PencilName; 7] = [
        PencilName::L1,
        PencilName::L2,
        PencilName::L3,
        PencilName::C1,
        PencilName::C2,
        PencilName::C3,
        PencilName::T,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "L1" => PencilName::L1,
            "L2" => PencilName::L2,
            "L3" => PencilName::L3,
            "C1" => PencilName::C1,
            "C2" => PencilName::C2,
            "C3" => PencilName::C3,
            "T" => PencilName::T,
            other => return Err(K3Error::UnknownPencil(other.to_string())),
        })
    }
}

fn c3_template() -> MPoly {
    mp("v*(2*gamma^2*delta*epsilon*zeta*X*Z \
        + (6*alpha*gamma*delta*epsilon*zeta + 4*beta*gamma*delta*epsilon^2 + 4*beta*gamma^2*epsilon*zeta + 2*delta^2*zeta^2)*X*W \
        - gamma*delta^2*epsilon*zeta*Z*W + 2*gamma*delta*epsilon*zeta*Y^2 \
        - (8*beta*gamma^2*epsilon^2 + 4*delta^2*epsilon*zeta + 4*gamma*delta*zeta^2)*X^2) \
        + u*(2*gamma*X - delta*W)*(2*epsilon*X - zeta*W)")
}

/// The pencil polynomial with `u, v` replaced by the given forms.
pub fn pencil(name: PencilName, p: &QuarticParams, u: &MPoly, v: &MPoly) -> MPoly {
    let template = match name {
        PencilName::L1 => mp("u*W - v*X"),
        PencilName::L2 => mp("u*W - v*Z"),
        PencilName::L3 => mp("u*Z - v*(2*epsilon*X - zeta*W)"),
        PencilName::C1 => mp("v*W*(2*epsilon*X - zeta*W) - u*Z*(2*gamma*X - delta*W)"),
        PencilName::C2 => mp("v*Z*(2*gamma*X - delta*W) - u*W^2"),
        PencilName::C3 => c3_template(),
        PencilName::T => t_template(false),
    };
    p.apply(&template).substitute(&[(var("u"), u.clone()), (var("v"), v.clone())])
}

/// `C3 Z - gamma delta eps zeta (C2 Z + L3 W^2)`.
///
/// With `printed = true` the sign of `L3 W^2` is flipped; that pencil still
/// contains `L2` and `L3` but not `R2`. Requiring `C3 Z + a C2 Z + b L3 W^2`
/// to vanish on `R2` forces `a = b = -gamma delta eps zeta`.
fn t_template(printed: bool) -> MPoly {
    let c3 = c3_template();
    let c2 = mp("v*Z*(2*gamma*X - delta*W) - u*W^2");
    let l3w2 = &mp("u*Z - v*(2*epsilon*X - zeta*W)") * &mp("W^2");
    let inner = if printed { &(&c2 * &mp("Z")) - &l3w2 } else { &(&c2 * &mp("Z")) + &l3w2 };
    &(&c3 * &mp("Z")) - &(&mp("gamma*delta*epsilon*zeta") * &inner)
}

/// The cubic pencil `T` with the sign as printed, for the audit report.
pub fn pencil_t_printed(p: &QuarticParams, u: &MPoly, v: &MPoly) -> MPoly {
    p.apply(&t_template(true)).substitute(&[(var("u"), u.clone()), (var("v"), v.clone())])
}

/// Curves each pencil member is claimed to contain, as `(pencil, multiplier, curves)`.
///
/// The cubic pencil `(2 gamma X - delta W) C3` contains `L1`, `R1`, `R2`;
/// the multiplier records the extra linear factor.
pub fn pencil_incidences() -> Vec<(PencilName, &'static str, Vec<&'static str>)> {
    vec![
        (PencilName::L1, "1", vec!["L1"]),
        (PencilName::L2, "1", vec!["L2"]),
        (PencilName::L3, "1", vec!["L3"]),
        (PencilName::C1, "1", vec!["L1", "L2", "L3"]),
        (PencilName::C2, "1", vec!["L1", "L2"]),
        (PencilName::C3, "1", vec!["R1"]),
        (PencilName::C3, "2*gamma*X - delta*W", vec!["L1", "R1", "R2"]),
        (PencilName::T, "1", vec!["L2", "L3", "R2"]),
    ]
}

/// Checks that every member of the pencil (times the multiplier) vanishes
/// on the named curve.
pub fn pencil_contains(name: PencilName, multiplier: &str, curve: &str, p: &QuarticParams) -> Result<bool> {
    let poly = &pencil(name, p, &MPoly::named("u"), &MPoly::named("v")) * &p.apply(&mp(multiplier));
    let c = special_curve(curve, p)?;
    Ok(on_curve(&poly, &c))
}

/// Whether the printed form of `T` vanishes on the named curve.
pub fn pencil_contains_printed_t(curve: &str, p: &QuarticParams) -> bool {
    let poly = pencil_t_printed(p, &mp("u"), &mp("v"));
    special_curve(curve, p).map(|c| on_curve(&poly, &c)).unwrap_or(false)
}

// ---------------------------------------------------------------------------
// Parameter symmetries

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// `[q^8 X : q^9 Y : Z : q^6 W]` carries Q(p) to Q(t^2 alpha, ..., t^-1 eps, zeta), factor `t^12`.
    pub scaling: bool,
    /// `[XZ : YZ : W^2 : ZW]` carries Q(p) to the quartic with `(gamma, delta) <-> (epsilon, zeta)`.
    pub swap: bool,
    /// The variant with only `epsilon <-> zeta` exchanged does not hold.
    pub eps_zeta_variant_fails: bool,
    /// `params_to_J` of the scaled tuple is the weight scaling of `J`.
    pub j_weights: bool,
    /// At `t = 1` the scaling is the identity.
    pub trivial_at_one: bool,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.scaling && self.swap && self.j_weights && self.trivial_at_one
    }
}

/// The scaled parameter tuple with `t = q^2` and `t^-1 = s`.
fn scaled_params(p: &QuarticParams, q: &MPoly, s: &MPoly) -> QuarticParams {
    let t = q * q;
    QuarticParams {
        alpha: &p.alpha * &t.pow(2),
        beta: &p.beta * &t.pow(3),
        gamma: &p.gamma * &t.pow(5),
        delta: &p.delta * &t.pow(6),
        epsilon: &p.epsilon * s,
        zeta: p.zeta.clone(),
    }
}

/// Both isomorphisms of the parameter space.
///
/// The square root `q` of `t` and the inverse `s` of `q^2` are formal
/// symbols; identities are checked modulo `q^2 s - 1`.
pub fn verify_param_symmetries(p: &QuarticParams) -> SymmetryReport {
    let f = quartic_poly(p);
    let q = MPoly::named("q");
    let s = MPoly::named("s");
    let rel = mp("q^2*s - 1");

    let pt = scaled_params(p, &q, &s);
    let phi = [&q.pow(8) * &mp("X"), &q.pow(9) * &mp("Y"), mp("Z"), &q.pow(6) * &mp("W")];
    let lhs = eval_at(&quartic_poly(&pt), &phi);
    let scaling = (&lhs - &(&q.pow(24) * &f)).reduce_mod(&rel).is_zero();

    let one = MPoly::one();
    let p1 = scaled_params(p, &one, &one);
    let trivial_at_one = p1 == *p;

    let [x, y, z, w] = [mp("X"), mp("Y"), mp("Z"), mp("W")];
    let bir = [&x * &z, &y * &z, &w * &w, &z * &w];
    let pulled = eval_at(&f, &bir);
    let zw2 = (&z * &w).pow(2);
    let swap = pulled == &zw2 * &quartic_poly(&p.swapped());
    let mut ez = p.clone();
    std::mem::swap(&mut ez.epsilon, &mut ez.zeta);
    let eps_zeta_variant_fails = !(ez != *p && pulled == &zw2 * &quartic_poly(&ez));

    let j = params_to_j(p);
    let js = params_to_j(&pt);
    let j_weights = (0..5).all(|k| {
        let expected = &j[k] * &q.pow(2 * (k as u32 + 2));
        (&js[k] - &expected).reduce_mod(&rel).is_zero()
    });

    SymmetryReport { scaling, swap, eps_zeta_variant_fails, j_weights, trivial_at_one }
}

// ---------------------------------------------------------------------------
// Nikulin involution

/// The involution `[A XZ : -A YZ : C W^2 : A ZW]` with `A = 2 gamma X - delta W`
/// and `C = 2 eps X - zeta W`.
///
/// With `printed = true` the last slot is `A Z^2` instead; that map does
/// not preserve the quartic. The `A ZW` slot is what the two-torsion
/// translation of the alternate fibration gives when pushed back through
/// its substitution.
pub fn nikulin_map(p: &QuarticParams, printed: bool) -> [MPoly; 4] {
    let a = p.apply(&mp("2*gamma*X - delta*W"));
    let b = p.apply(&mp("2*epsilon*X - zeta*W"));
    let last = if printed { mp("Z^2") } else { mp("Z*W") };
    [
        &a * &mp("X*Z"),
        &(-&a) * &mp("Y*Z"),
        &b * &mp("W^2"),
        &a * &last,
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct InvolutionReport {
    /// `F(Psi) = m F`.
    pub preserves_quartic: bool,
    /// The multiplier `m`, when it exists.
    pub multiplier: Option<String>,
    /// Every 2x2 minor of `(Psi(Psi(P)), P)` vanishes modulo `F`.
    pub squares_to_identity: bool,
    /// The common factor `h` with `Psi(Psi(P)) = h P` read off from the `Y` slot.
    pub common_factor_terms: usize,
    /// `Psi` sends `P1` to the zero tuple and `P1` is a singular point of `F`.
    pub base_point_flagged: bool,
    /// `Psi^* omega = omega` modulo `F` in the chart `W = 1`.
    pub symplectic: bool,
    /// `Psi^* omega = -omega` would hold instead (expected false).
    pub anti_symplectic: bool,
}

impl InvolutionReport {
    pub fn passed(&self) -> bool {
        self.preserves_quartic && self.squares_to_identity && self.base_point_flagged && self.symplectic
    }
}

pub fn nikulin_involution_verify(p: &QuarticParams, printed: bool) -> InvolutionReport {
    let f = quartic_poly(p);
    let psi = nikulin_map(p, printed);

    let fpsi = eval_at(&f, &psi);
    let m = fpsi.div_exact(&f).ok();
    let preserves_quartic = m.is_some();
    let multiplier = m.as_ref().map(|m| m.to_string());

    // Psi o Psi, componentwise; compare with the identity up to a common factor.
    let psi2: Vec<MPoly> = psi.iter().map(|c| eval_at(c, &psi)).collect();
    let coords = [mp("X"), mp("Y"), mp("Z"), mp("W")];
    let mut squares_to_identity = true;
    'outer: for i in 0..4 {
        for j in i + 1..4 {
            let minor = &(&psi2[i] * &coords[j]) - &(&psi2[j] * &coords[i]);
            if !minor.is_zero() && minor.div_exact(&f).is_err() {
                squares_to_identity = false;
                break 'outer;
            }
        }
    }
    let common_factor_terms = psi2[1].div_exact(&coords[1]).map(|h| h.num_terms()).unwrap_or(0);

    let p1 = base_point_p1();
    let image = psi.clone().map(|c| eval_at(&c, &p1));
    let grad_zero = xyzw().iter().all(|&v| eval_at(&f.derivative(v), &p1).is_zero());
    let base_point_flagged = image.iter().all(|c| c.is_zero()) && grad_zero;

    let (symplectic, anti_symplectic) = symplectic_check(&f, &psi);

    InvolutionReport {
        preserves_quartic,
        multiplier,
        squares_to_identity,
        common_factor_terms,
        base_point_flagged,
        symplectic,
        anti_symplectic,
    }
}

/// Pullback of `omega = dX ^ dY / F_Z` in the chart `W = 1`.
///
/// On the surface `dx' ^ dy' = det(grad x', grad y', grad f) / f_Z dX ^ dY`,
/// so `Psi^* omega = omega` is `det(grad x', grad y', grad f) = f_Z(Psi)`.
/// With `x' = Px/D` etc. this clears to
/// `det(D grad Px - Px grad D, D grad Py - Py grad D, grad f) = D F_Z(Psi)`
/// modulo `f`.
fn symplectic_check(f: &MPoly, psi: &[MPoly; 4]) -> (bool, bool) {
    let wv = var("W");
    let chart = |m: &MPoly| m.subs(wv, &MPoly::one());
    let fa = chart(f);
    let vs = [var("X"), var("Y"), var("Z")];
    let (px, py, d) = (chart(&psi[0]), chart(&psi[1]), chart(&psi[3]));
    let grad = |m: &MPoly| vs.map(|v| m.derivative(v));
    let (gx, gy, gd, gf) = (grad(&px), grad(&py), grad(&d), grad(&fa));
    let row = |g: &[MPoly; 3], c: &MPoly| -> [MPoly; 3] {
        [0, 1, 2].map(|k| &(&d * &g[k]) - &(c * &gd[k]))
    };
    let (a, b) = (row(&gx, &px), row(&gy, &py));
    let det = &(&a[0] * &(&(&b[1] * &gf[2]) - &(&b[2] * &gf[1])))
        - &(&(&a[1] * &(&(&b[0] * &gf[2]) - &(&b[2] * &gf[0])))
            - &(&a[2] * &(&(&b[0] * &gf[1]) - &(&b[1] * &gf[0]))));
    let fz_psi = chart(&eval_at(&f.derivative(var("Z")), psi));
    let rhs = &d * &fz_psi;
    let divisible = |m: MPoly| m.is_zero() || m.div_exact(&fa).is_ok();
    (divisible(&det - &rhs), divisible(&det + &rhs))
}

// ---------------------------------------------------------------------------
// Derivation of the fibrations

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Fibration {
    Std,
    Alt,
    Bfd,
    Max,
}

impl Fibration {
    pub const ALL: [Fibration; 4] = [Fibration::Std, Fibration::Alt, Fibration::Bfd, Fibration::Max];

    pub fn name(&self) -> &'static str {
        match self {
            Fibration::Std => "std",
            Fibration::Alt => "alt",
            Fibration::Bfd => "bfd",
            Fibration::Max => "max",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "std" | "standard" => Fibration::Std,
            "alt" | "alternate" => Fibration::Alt,
            "bfd" | "base-fiber-dual" => Fibration::Bfd,
            "max" | "maximal" => Fibration::Max,
            other => return Err(K3Error::UnknownType(other.to_string())),
        })
    }

    /// The pencil whose members cut out the fibers.
    pub fn pencil(&self) -> PencilName {
        match self {
            Fibration::Std => PencilName::L2,
            Fibration::Alt => PencilName::L1,
            Fibration::Bfd => PencilName::L3,
            Fibration::Max => PencilName::C3,
        }
    }
}

impl std::fmt::Display for Fibration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `y^2 z = x^3 + a2 x^2 z + a4 x z^2 + a6 z^3` with coefficients homogeneous
/// in `u, v` of degrees 4, 8, 12.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousModel {
    pub a2: MPoly,
    pub a4: MPoly,
    pub a6: MPoly,
}

impl HomogeneousModel {
    pub fn cubic(&self) -> MPoly {
        let (x, z) = (mp("x"), mp("z"));
        &(&(&x.pow(3) + &(&(&self.a2 * &x.pow(2)) * &z)) + &(&(&self.a4 * &x) * &z.pow(2))) + &(&self.a6 * &z.pow(3))
    }

    /// `y^2 z - (x^3 + a2 x^2 z + a4 x z^2 + a6 z^3)`.
    pub fn weierstrass_poly(&self) -> MPoly {
        &mp("y^2*z") - &self.cubic()
    }
}

#[derive(Clone, Debug)]
pub struct DerivedFibration {
    pub which: Fibration,
    pub model: HomogeneousModel,
    /// The factor `K` with `pullback = K * (weierstrass polynomial)`.
    pub cofactor: MPoly,
}

/// The substitution `[X, Y, Z, W]` in terms of `x, y, z, u, v`.
///
/// For the maximal fibration `Z` is left symbolic; it is eliminated from the
/// pencil equation by [`derive_fibration`].
pub fn substitution(which: Fibration, p: &QuarticParams, printed_bfd: bool) -> [MPoly; 4] {
    let t = |s: &str| p.apply(&mp(s));
    match which {
        Fibration::Std => [t("u*v*x"), t("y"), t("4*u^4*v^2*z"), t("4*u^3*v^3*z")],
        Fibration::Alt => [t("2*u*v*x"), t("y"), t("4*v^5*(-2*epsilon*u + zeta*v)*z"), t("2*v^2*x")],
        Fibration::Bfd => {
            let z = if printed_bfd {
                "6*v^2*(epsilon*x - 6*gamma*epsilon^2*u*v^3*z - 18*zeta*u^2*v^2*z)"
            } else {
                "6*v^2*(epsilon*x + 6*gamma*epsilon^2*u*v^3*z - 18*zeta*u^2*v^2*z)"
            };
            [t("3*u*v*(x + 6*gamma*epsilon*u*v^3*z)"), t("y"), t(z), t("108*u^3*v^3*z")]
        }
        Fibration::Max => [
            t("delta*zeta*v*((2*beta*gamma*epsilon*v - u)*x - 2*gamma*delta^5*epsilon*zeta^5*v^5*z)"),
            t("y"),
            mp("Z"),
            t("2*delta^2*zeta^2*v^2*x"),
        ],
    }
}

/// Pulls the quartic back along the fibration's substitution and splits off
/// the Weierstrass cubic.
///
/// The pullback `N` must have the shape `K (y^2 z - cubic)` with `K` free of
/// `y`; `K` is read from the `y^2` coefficient and the cubic by exact
/// division. For the maximal fibration `Z` is solved from `C3(u, v) = 0`
/// (the pencil is linear in `Z`) and the quartic is cleared of the
/// denominator first.
pub fn derive_fibration_with(which: Fibration, p: &QuarticParams, printed_bfd: bool) -> Result<DerivedFibration> {
    let f = quartic_poly(p);
    let sub = substitution(which, p, printed_bfd);
    let n = match which {
        Fibration::Max => {
            let zv = var("Z");
            let partial = [sub[0].clone(), sub[1].clone(), mp("Z"), sub[3].clone()];
            let fz = eval_at(&f, &partial);
            let c3 = eval_at(&pencil(PencilName::C3, p, &mp("u"), &mp("v")), &partial);
            if c3.deg_in(zv) != 1 || fz.deg_in(zv) != 2 {
                return Err(K3Error::PullbackMismatch("pencil is not linear in Z".into()));
            }
            // Z = -r / c with C3 = c Z + r; F = f0 + f1 Z + f2 Z^2
            let (r, c) = (c3.coeff_of(zv, 0), c3.coeff_of(zv, 1));
            let (f0, f1, f2) = (fz.coeff_of(zv, 0), fz.coeff_of(zv, 1), fz.coeff_of(zv, 2));
            &(&(&f0 * &c.pow(2)) - &(&(&f1 * &r) * &c)) + &(&f2 * &r.pow(2))
        }
        _ => eval_at(&f, &sub),
    };
    split_weierstrass(which, &n)
}

/// True when the substitution lands in the fibration's pencil member
/// `[u : v]`. For the maximal fibration `Z` is solved from the pencil, so
/// this holds by construction.
pub fn substitution_on_pencil(which: Fibration, p: &QuarticParams) -> bool {
    if which == Fibration::Max {
        return true;
    }
    let sub = substitution(which, p, false);
    eval_at(&pencil(which.pencil(), p, &mp("u"), &mp("v")), &sub).is_zero()
}

pub fn derive_fibration(which: Fibration, p: &QuarticParams) -> Result<DerivedFibration> {
    derive_fibration_with(which, p, false)
}

fn split_weierstrass(which: Fibration, n: &MPoly) -> Result<DerivedFibration> {
    let (xv, yv, zv) = (var("x"), var("y"), var("z"));
    if n.is_zero() {
        return Err(K3Error::PullbackMismatch("pullback vanishes".into()));
    }
    if n.deg_in(yv) != 2 {
        return Err(K3Error::PullbackMismatch(format!("pullback has degree {} in y", n.deg_in(yv))));
    }
    let top = n.coeff_of(yv, 2);
    let k = top
        .div_exact(&MPoly::var(zv))
        .map_err(|_| K3Error::PullbackMismatch("y^2 coefficient not divisible by z".into()))?;
    let w = n
        .div_exact(&k)
        .map_err(|_| K3Error::PullbackMismatch("cofactor does not divide the pullback".into()))?;
    // w = y^2 z - x^3 - a2 x^2 z - a4 x z^2 - a6 z^3
    let x3 = w.coeff_of(yv, 0).coeff_of(xv, 3);
    if w.coeff_of(yv, 1).is_zero() && w.coeff_of(yv, 2) == MPoly::var(zv) && x3 == MPoly::int(-1) {
        let cub = -&w.coeff_of(yv, 0);
        let take = |i: u32, j: u32| cub.coeff_of(xv, i).coeff_of(zv, j);
        let model = HomogeneousModel { a2: take(2, 1), a4: take(1, 2), a6: take(0, 3) };
        if model.weierstrass_poly() == w {
            return Ok(DerivedFibration { which, model, cofactor: k });
        }
    }
    Err(K3Error::PullbackMismatch(format!("{which}: residual factor is not a Weierstrass cubic")))
}

/// The published coefficients of the four models, homogeneous in `u, v`.
pub fn printed_model(which: Fibration, p: &QuarticParams) -> HomogeneousModel {
    let t = |s: &str| p.apply(&mp(s));
    match which {
        Fibration::Std => HomogeneousModel {
            a2: MPoly::zero(),
            a4: t("-4*u^3*v^3*(gamma*u^2 + 3*alpha*u*v + epsilon*v^2)"),
            a6: t("8*u^5*v^5*(delta*u^2 - 2*beta*u*v + zeta*v^2)"),
        },
        Fibration::Alt => HomogeneousModel {
            a2: t("4*v*(4*u^3 - 3*alpha*u*v^2 - beta*v^3)"),
            a4: t("4*v^6*(2*gamma*u - delta*v)*(2*epsilon*u - zeta*v)"),
            a6: MPoly::zero(),
        },
        Fibration::Bfd => HomogeneousModel {
            a2: MPoly::zero(),
            a4: t("-108*u^2*v^4*(9*alpha*u^2 - 3*(gamma*zeta + delta*epsilon)*u*v + gamma^2*epsilon^2*v^2)"),
            a6: t("-216*u^3*v^5*(27*u^4 + 54*beta*u^3*v + 27*(alpha*gamma*epsilon + delta*zeta)*u^2*v^2 \
                   - 9*gamma*epsilon*(gamma*zeta + delta*epsilon)*u*v^3 + 2*gamma^3*epsilon^3*v^4)"),
        },
        Fibration::Max => HomogeneousModel {
            a2: t("-2*delta*zeta*v*(u^3 - 6*beta*gamma*epsilon*u^2*v + 3*(4*beta^2*gamma^2*epsilon^2 - alpha*delta^2*zeta^2)*u*v^2 \
                   - 2*beta*(4*beta^2*gamma^3*epsilon^3 - 3*alpha*gamma*delta^2*epsilon*zeta^2 - delta^3*zeta^3)*v^3)"),
            a4: t("-4*delta^6*zeta^6*v^6*(2*gamma*epsilon*u^2 - (8*beta*gamma^2*epsilon^2 + gamma*delta*zeta^2 + delta^2*epsilon*zeta)*u*v \
                   + (8*beta^2*gamma^3*epsilon^3 - 3*alpha*gamma*delta^2*epsilon*zeta^2 + 2*beta*gamma^2*delta*epsilon*zeta^2 \
                   + 2*beta*gamma*delta^2*epsilon^2*zeta - delta^3*zeta^3)*v^2)"),
            a6: t("-8*gamma*delta^11*epsilon*zeta^11*v^11*(gamma*epsilon*u - (2*beta*gamma^2*epsilon^2 + gamma*delta*zeta^2 + delta^2*epsilon*zeta)*v)"),
        },
    }
}

/// The dehomogenization `(u, v)` used to compare a derived model with the
/// J-model in the affine coordinate `t`.
pub fn dehomogenization(which: Fibration, p: &QuarticParams) -> (MPoly, MPoly) {
    match which {
        // (u, v) = (1, t / zeta), scaled by zeta
        Fibration::Std => (p.zeta.clone(), mp("t")),
        Fibration::Alt => (mp("t"), mp("2")),
        Fibration::Bfd | Fibration::Max => (mp("-t"), mp("1")),
    }
}

// ---------------------------------------------------------------------------
// Modular parameters

/// `[J2 : J3 : J4 : J5 : J6] = [alpha : beta : gamma eps : gamma zeta + delta eps : delta zeta]`.
pub fn params_to_j(p: &QuarticParams) -> [MPoly; 5] {
    [
        p.alpha.clone(),
        p.beta.clone(),
        &p.gamma * &p.epsilon,
        &(&p.gamma * &p.zeta) + &(&p.delta * &p.epsilon),
        &p.delta * &p.zeta,
    ]
}

/// True when `(J3, J4, J5) = 0`, outside the moduli space.
pub fn j_is_degenerate(j: &[MPoly; 5]) -> bool {
    j[1].is_zero() && j[2].is_zero() && j[3].is_zero()
}

/// Parameter values over the J-ring in the gauge `gamma = 1`:
/// `eps = J4`, `zeta = (J5 + aa)/2`, `delta = (J5 - aa)/(2 J4)`.
pub fn params_from_j(j: &[JElem; 5], aa: &JElem) -> Result<[JElem; 6]> {
    if j[2].is_zero() {
        return Err(K3Error::DegenerateJ4);
    }
    let half = exactalg::q(1, 2);
    let zeta = j[3].add(aa).scale(&half);
    let delta = j[3].sub(aa).scale(&half).div(&j[2]).ok_or(K3Error::DegenerateJ4)?;
    Ok([j[0].clone(), j[1].clone(), JElem::one(), delta, j[2].clone(), zeta])
}

/// [`params_from_j`] at the symbolic invariants.
pub fn params_from_j_symbolic() -> [JElem; 6] {
    let j = ["J2", "J3", "J4", "J5", "J6"].map(|n| JElem::from_mpoly(&MPoly::named(n)));
    params_from_j(&j, &JElem::aa()).expect("J4 is a nonzero indeterminate")
}

/// The same gauge written polynomially: with `gamma = 1` the invariants are
/// `J4 = eps`, `J5 = zeta + delta eps`, `J6 = delta zeta` and
/// `aa = zeta - delta eps`. The map from the J-ring with `aa` into
/// `Q[alpha, beta, delta, eps, zeta]` is injective, so identities among
/// J-expressions may be checked there.
pub fn j_in_params() -> Vec<(Var, MPoly)> {
    vec![
        (var("J2"), mp("alpha")),
        (var("J3"), mp("beta")),
        (var("J4"), mp("epsilon")),
        (var("J5"), mp("zeta + delta*epsilon")),
        (var("J6"), mp("delta*zeta")),
        (var("aa"), mp("zeta - delta*epsilon")),
    ]
}

/// Evaluates a polynomial in the parameter indeterminates at JElem values.
pub fn mpoly_at_jelem(m: &MPoly, vals: &[(Var, JElem)]) -> JElem {
    use std::collections::HashMap;
    let mut cache: HashMap<(u16, u16), JElem> = HashMap::new();
    let mut acc = JElem::zero();
    for (mono, c) in m.terms() {
        let mut term = JElem::from_q(c.clone());
        let mut rest = exactalg::Monomial::one();
        for &(i, e) in &mono.0 {
            match vals.iter().find(|(v, _)| v.0 == i) {
                Some((_, val)) => {
                    let pw = cache.entry((i, e)).or_insert_with(|| val.pow(e as u32)).clone();
                    term = term.mul(&pw);
                }
                None => rest = rest.mul(&exactalg::Monomial::var(Var(i), e)),
            }
        }
        if !rest.is_one() {
            term = term.mul(&JElem::from_mpoly(&MPoly::monomial(rest, Q::from_integer(1.into()))));
        }
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_params_give_two_terms() {
        let p = QuarticParams::from_array(std::array::from_fn(|_| MPoly::zero()));
        assert_eq!(quartic_poly(&p), mp("Y^2*Z*W - 4*X^3*Z"));
        assert_eq!(quartic_poly(&QuarticParams::symbolic()).num_terms(), 8);
    }

    #[test]
    fn special_curves_lie_on_quartic() {
        let p = QuarticParams::symbolic();
        let s = QuarticSurface::new(p.clone());
        for c in SPECIAL_CURVES {
            assert!(s.contains(&special_curve(c, &p).unwrap()), "{c}");
        }
        assert!(lines_concurrent_at_p1(&p));
    }

    #[test]
    fn pencils_contain_their_curves() {
        let p = QuarticParams::symbolic();
        for (name, mult, curves) in pencil_incidences() {
            for c in curves {
                assert!(pencil_contains(name, mult, c, &p).unwrap(), "{name:?} * {mult} on {c}");
            }
        }
        assert_eq!(pencil(PencilName::L2, &p, &MPoly::one(), &MPoly::zero()), mp("W"));
    }

    #[test]
    fn symmetries() {
        let r = verify_param_symmetries(&QuarticParams::symbolic());
        assert!(r.passed(), "{r:?}");
        assert!(r.eps_zeta_variant_fails);
    }

    #[test]
    fn params_to_j_examples() {
        let ones = QuarticParams::from_array(std::array::from_fn(|_| MPoly::one()));
        assert_eq!(params_to_j(&ones).map(|m| m.to_string()), ["1", "1", "1", "2", "1"].map(String::from));
        let j = [0, 0, 1, 2, 1].map(|k| JElem::from_q(Q::from_integer(k.into())));
        let p = params_from_j(&j, &JElem::zero()).unwrap();
        let want = [0, 0, 1, 1, 1, 1].map(|k| JElem::from_q(Q::from_integer(k.into())));
        assert_eq!(p, want);
        let j0 = [1, 1, 0, 1, 1].map(|k| JElem::from_q(Q::from_integer(k.into())));
        assert!(matches!(params_from_j(&j0, &JElem::one()), Err(K3Error::DegenerateJ4)));
    }

    #[test]
    fn derivations_match_printed_coefficients() {
        let p = QuarticParams::symbolic();
        for w in Fibration::ALL {
            let d = derive_fibration(w, &p).unwrap();
            assert_eq!(d.model, printed_model(w, &p), "{w}");
            assert!(substitution_on_pencil(w, &p), "{w}");
        }
        assert_eq!(derive_fibration(Fibration::Std, &p).unwrap().cofactor, mp("16*z*u^7*v^5"));
        assert!(derive_fibration_with(Fibration::Bfd, &p, true).is_err());
    }

    #[test]
    fn involution() {
        let p = QuarticParams::symbolic();
        assert!(nikulin_involution_verify(&p, false).passed());
        let printed = nikulin_involution_verify(&p, true);
        assert!(!printed.preserves_quartic);
        assert!(!pencil_contains_printed_t("R2", &p));
    }

    #[test]
    fn gauge_reproduces_invariants() {
        let p = params_from_j_symbolic();
        let j = ["J2", "J3", "J4", "J5", "J6"].map(|n| JElem::from_mpoly(&MPoly::named(n)));
        assert_eq!(p[2].mul(&p[4]), j[2]);
        assert_eq!(p[2].mul(&p[5]).add(&p[3].mul(&p[4])), j[3]);
        assert_eq!(p[3].mul(&p[5]), j[4]);
    }
}

