//! F-theory forms of the bfd and alt models, gauge algebra labels, the
//! lattice-polarization tables and the bundle exponent system.

use crate::error::{K3Error, Result};
use crate::fibrations::{
    classify_locus, find_base_rescaling, model, table_loci, BaseRescaling, FiberConfig, Fibration, JPoly,
    Kodaira, Locus, WeierstrassModel,
};
use exactalg::{JElem, MPoly, UPoly};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct DualityParams {
    pub a: JElem,
    pub b: JElem,
    pub c: JElem,
    pub d: JElem,
    pub e: JElem,
    pub f: JElem,
    pub g: JElem,
    pub lambda: JElem,
}

impl DualityParams {
    /// `c = -λ^10 J5, d = -λ^8 J4/3, e = -3 λ^4 J2, f = λ^12 J6,
    /// g = -2 λ^6 J3`, with `a = -3d^2`, `b = -2d^3`.
    pub fn new(j: &[JElem; 5], lambda: &JElem) -> Self {
        let l = |k: u32| lambda.pow(k);
        let [j2, j3, j4, j5, j6] = j;
        let d = l(8).mul(j4).scale(&exactalg::q(-1, 3));
        DualityParams {
            a: d.mul(&d).scale(&exactalg::q(-3, 1)),
            b: d.pow(3).scale(&exactalg::q(-2, 1)),
            c: l(10).mul(j5).neg(),
            e: l(4).mul(j2).scale(&exactalg::q(-3, 1)),
            f: l(12).mul(j6),
            g: l(6).mul(j3).scale(&exactalg::q(-2, 1)),
            d,
            lambda: lambda.clone(),
        }
    }

    pub fn constraints_hold(&self) -> bool {
        self.a == self.d.mul(&self.d).scale(&exactalg::q(-3, 1)) && self.b == self.d.pow(3).scale(&exactalg::q(-2, 1))
    }
}

pub fn symbolic_j() -> [JElem; 5] {
    ["J2", "J3", "J4", "J5", "J6"].map(|n| JElem::from_mpoly(&MPoly::named(n)))
}

pub fn symbolic_lambda() -> JElem {
    JElem::from_mpoly(&MPoly::named("lambda"))
}

fn poly(cs: Vec<JElem>) -> JPoly {
    UPoly::new(cs)
}

/// `Y^2 = X^3 + (a t^2 + c t^3 + e t^4) X + b t^3 + c d t^4 + (de + f) t^5 + g t^6 + t^7`.
pub fn ftheory_e8_form(j: &[JElem; 5], lambda: &JElem) -> Result<WeierstrassModel> {
    let p = DualityParams::new(j, lambda);
    let z = JElem::zero;
    let a4 = poly(vec![z(), z(), p.a.clone(), p.c.clone(), p.e.clone()]);
    let a6 = poly(vec![
        z(),
        z(),
        z(),
        p.b.clone(),
        p.c.mul(&p.d),
        p.d.mul(&p.e).add(&p.f),
        p.g.clone(),
        JElem::one(),
    ]);
    WeierstrassModel::short(a4, a6)
}

/// `Y^2 = X^3 + (t^3 + e t + g) X^2 + (-3d t^2 + c t + f) X`.
pub fn ftheory_so32_form(j: &[JElem; 5], lambda: &JElem) -> Result<WeierstrassModel> {
    let p = DualityParams::new(j, lambda);
    let a2 = poly(vec![p.g.clone(), p.e.clone(), JElem::zero(), JElem::one()]);
    let a4 = poly(vec![p.f.clone(), p.c.clone(), p.d.scale(&exactalg::q(-3, 1))]);
    WeierstrassModel::new(a2, a4, JPoly::zero())
}

/// Coefficient-by-coefficient comparison; returns the mismatching slots.
pub fn coefficient_diff(m1: &WeierstrassModel, m2: &WeierstrassModel) -> Vec<String> {
    let mut out = vec![];
    for (name, p1, p2) in [("a2", &m1.a2, &m2.a2), ("a4", &m1.a4, &m2.a4), ("a6", &m1.a6, &m2.a6)] {
        let n = p1.coeffs().len().max(p2.coeffs().len());
        for k in 0..n {
            if p1.coeff(k) != p2.coeff(k) {
                out.push(format!("{name}[t^{k}]"));
            }
        }
    }
    out
}

/// Both forms at `λ = 1` against the J-models.
pub fn check_forms() -> Result<()> {
    let j = symbolic_j();
    let one = JElem::one();
    let e8 = ftheory_e8_form(&j, &one)?;
    let diff = coefficient_diff(&e8, &model(Fibration::Bfd));
    if !diff.is_empty() {
        return Err(K3Error::Mismatch(format!("E8 form vs bfd: {}", diff.join(", "))));
    }
    let so = ftheory_so32_form(&j, &one)?;
    let diff = coefficient_diff(&so, &model(Fibration::Alt));
    if !diff.is_empty() {
        return Err(K3Error::Mismatch(format!("so(32) form vs alt: {}", diff.join(", "))));
    }
    Ok(())
}

/// The λ-dependence of a form is a Weierstrass rescaling `(x, t) ->
/// (w2 x, s t)` back to `λ = 1`; both `w2` and `s` are powers of λ.
pub fn lambda_weights(which: Fibration) -> Result<BaseRescaling> {
    let j = symbolic_j();
    let (at_l, at_1) = match which {
        Fibration::Bfd => (ftheory_e8_form(&j, &symbolic_lambda())?, ftheory_e8_form(&j, &JElem::one())?),
        Fibration::Alt => (ftheory_so32_form(&j, &symbolic_lambda())?, ftheory_so32_form(&j, &JElem::one())?),
        _ => return Err(K3Error::UnknownType(format!("no F-theory form for {which}"))),
    };
    let r = find_base_rescaling(&at_l, &at_1)?;
    let lam = exactalg::var("lambda");
    if r.w2.exps.keys().chain(r.s.exps.keys()).any(|&v| v != lam) {
        return Err(K3Error::NoRescalingFound);
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Gauge algebras

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeLabel {
    /// Simple summands with their ranks, largest first.
    pub summands: Vec<(String, usize)>,
    pub note: String,
}

impl GaugeLabel {
    pub fn rank(&self) -> usize {
        self.summands.iter().map(|s| s.1).sum()
    }
}

impl std::fmt::Display for GaugeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<&str> = self.summands.iter().map(|s| s.0.as_str()).collect();
        f.write_str(&s.join(" ⊕ "))?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

pub fn fiber_algebra(k: Kodaira) -> Option<(String, usize)> {
    match k {
        Kodaira::I(n) if n >= 2 => Some((format!("su({n})"), n as usize - 1)),
        Kodaira::IStar(n) => Some((format!("so({})", 2 * n + 8), n as usize + 4)),
        Kodaira::III => Some(("su(2)".into(), 1)),
        Kodaira::IV => Some(("su(3)".into(), 2)),
        Kodaira::IVStar => Some(("e6".into(), 6)),
        Kodaira::IIIStar => Some(("e7".into(), 7)),
        Kodaira::IIStar => Some(("e8".into(), 8)),
        _ => None,
    }
}

pub fn gauge_algebra_of(fibers: &[(Kodaira, usize)]) -> GaugeLabel {
    let mut summands = vec![];
    let mut sorted = fibers.to_vec();
    sorted.sort_by(|a, b| b.0.euler().cmp(&a.0.euler()).then(b.0.cmp(&a.0)));
    let mut note = String::new();
    for (k, n) in sorted {
        if let Some(s) = fiber_algebra(k) {
            if k == Kodaira::IStar(12) {
                note = "Spin(32)/Z2".into();
            }
            for _ in 0..n {
                summands.push(s.clone());
            }
        }
    }
    GaugeLabel { summands, note }
}

pub fn gauge_algebra(config: &FiberConfig) -> GaugeLabel {
    let items: Vec<(Kodaira, usize)> = config.fibers.iter().map(|e| (e.kodaira, e.count)).collect();
    gauge_algebra_of(&items)
}

// ---------------------------------------------------------------------------
// Tables

/// Isomorphism classes of the lattices appearing in the tables, keyed by
/// (rank, discriminant group); labels list the root summands after `H`.
pub const LATTICE_CLASSES: &[(usize, &str, &[&str])] = &[
    (16, "Z2^2", &["E7+E7", "D14", "E8+D6"]),
    (17, "Z2", &["E8+E7"]),
    (17, "Z4", &["E8+D7", "D15"]),
    (17, "Z2^3", &["E7+E7+A1", "E8+D6+A1", "D14+A1"]),
    (18, "0", &["E8+E8", "D16+"]),
];

/// Lattice label for a row: the class is fixed by (rank, discriminant
/// group); within it the label equal to the root lattice is preferred,
/// otherwise the first one.
pub fn lattice_label(rank: usize, disc: &str, root_label: &str) -> Option<(String, Vec<String>)> {
    let (_, _, labels) = LATTICE_CLASSES.iter().find(|(r, d, _)| *r == rank && *d == disc)?;
    let pick = labels.iter().find(|l| **l == root_label).unwrap_or(&labels[0]);
    let h = |l: &str| format!("H+{l}");
    Some((h(pick), labels.iter().map(|l| h(l)).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub picard: usize,
    pub fibers: String,
    pub mw: String,
    pub lattice: String,
    pub disc_group: String,
    pub status: String,
    /// Isomorphic labels of the same lattice.
    pub isomorphic: Vec<String>,
    pub gauge: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub fibration: String,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == "pass")
    }
}

/// Expected rows: (locus, picard, fibers, MW, lattice, discriminant group).
pub fn expected_rows(which: Fibration) -> Vec<(Locus, usize, &'static str, &'static str, &'static str, &'static str)> {
    use Locus::*;
    match which {
        Fibration::Std => vec![
            (Generic, 16, "2III* + 6I1", "trivial", "H+E7+E7", "Z2^2"),
            (Res, 16, "2III* + II + 4I1", "trivial", "H+E7+E7", "Z2^2"),
            (J30, 17, "2III* + I2 + 4I1", "trivial", "H+E7+E7+A1", "Z2^3"),
            (J4, 17, "II* + III* + 5I1", "trivial", "H+E8+E7", "Z2"),
            (J4J5, 18, "2II* + 4I1", "trivial", "H+E8+E8", "0"),
        ],
        Fibration::Alt => vec![
            (Generic, 16, "I8* + 2I2 + 6I1", "Z/2Z", "H+E7+E7", "Z2^2"),
            (Res, 16, "I8* + III + I2 + 5I1", "Z/2Z", "H+E7+E7", "Z2^2"),
            (A0, 17, "I8* + I4 + 6I1", "Z/2Z", "H+E8+D7", "Z4"),
            (J30, 17, "I8* + 3I2 + 4I1", "Z/2Z", "H+E7+E7+A1", "Z2^3"),
            (J4, 17, "I10* + I2 + 6I1", "Z/2Z", "H+E8+E7", "Z2"),
            (J4J5, 18, "I12* + 6I1", "Z/2Z", "H+E8+E8", "0"),
        ],
        Fibration::Bfd => vec![
            (Generic, 16, "II* + I2* + 6I1", "trivial", "H+E8+D6", "Z2^2"),
            (Res, 16, "II* + I2* + II + 4I1", "trivial", "H+E8+D6", "Z2^2"),
            (A0, 17, "II* + I3* + 5I1", "trivial", "H+E8+D7", "Z4"),
            (J30, 17, "II* + I2* + I2 + 4I1", "trivial", "H+E8+D6+A1", "Z2^3"),
            (J4, 17, "II* + III* + 5I1", "trivial", "H+E8+E7", "Z2"),
            (J4J5, 18, "2II* + 4I1", "trivial", "H+E8+E8", "0"),
        ],
        Fibration::Max => vec![
            (Generic, 16, "I10* + 8I1", "trivial", "H+D14", "Z2^2"),
            (A0, 17, "I11* + 7I1", "trivial", "H+D15", "Z4"),
            (J30, 17, "I10* + I2 + 6I1", "trivial", "H+D14+A1", "Z2^3"),
            (J4, 17, "I10* + I2 + 6I1", "Z/2Z", "H+E8+E7", "Z2"),
            (J4J5, 18, "I12* + 6I1", "Z/2Z", "H+E8+E8", "0"),
        ],
    }
}

fn row_for(which: Fibration, locus: Locus) -> TableRow {
    let label = locus.label(which).to_string();
    let expected = expected_rows(which).into_iter().find(|r| r.0 == locus);
    let cfg = match classify_locus(which, locus) {
        Ok(c) => c,
        Err(e) => {
            return TableRow {
                label,
                picard: 16 + locus.codim(),
                fibers: String::new(),
                mw: String::new(),
                lattice: String::new(),
                disc_group: String::new(),
                status: format!("error: {e}"),
                isomorphic: vec![],
                gauge: String::new(),
            }
        }
    };
    let (lattice, isomorphic) = lattice_label(cfg.picard, &cfg.disc_group, &cfg.root_label())
        .unwrap_or_else(|| (format!("H+{}", cfg.root_label()), vec![]));
    let mut row = TableRow {
        label,
        picard: cfg.picard,
        fibers: cfg.summary(),
        mw: cfg.mw_torsion.clone(),
        lattice,
        disc_group: cfg.disc_group.clone(),
        status: String::new(),
        isomorphic,
        gauge: gauge_algebra(&cfg).to_string(),
    };
    row.status = match expected {
        None => "no expected row".into(),
        Some((_, rho, fibers, mw, lat, disc)) => {
            let mut diff = vec![];
            if row.picard != rho {
                diff.push(format!("picard {} != {rho}", row.picard));
            }
            if row.fibers != fibers {
                diff.push(format!("fibers {} != {fibers}", row.fibers));
            }
            if row.mw != mw {
                diff.push(format!("MW {} != {mw}", row.mw));
            }
            if row.lattice != lat {
                diff.push(format!("lattice {} != {lat}", row.lattice));
            }
            if row.disc_group != disc {
                diff.push(format!("disc {} != {disc}", row.disc_group));
            }
            if diff.is_empty() {
                "pass".into()
            } else {
                format!("mismatch: {}", diff.join("; "))
            }
        }
    };
    row
}

pub fn emit_table(which: Fibration) -> Table {
    let rows = table_loci(which).par_iter().map(|&l| row_for(which, l)).collect();
    Table { fibration: which.to_string(), rows }
}

pub fn emit_tables() -> Vec<Table> {
    Fibration::ALL.par_iter().map(|&w| emit_table(w)).collect()
}

pub fn tables_markdown(tables: &[Table]) -> String {
    let mut out = String::new();
    for t in tables {
        let _ = writeln!(out, "### {}\n", t.fibration);
        let _ = writeln!(out, "| locus | rho | singular fibers | MW | lattice | D | status |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for r in &t.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                r.label, r.picard, r.fibers, r.mw, r.lattice, r.disc_group, r.status
            );
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Bundle exponents

/// `k_L L + k_M M + c` in units of the base line bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Affine {
    pub l: i64,
    pub m: i64,
    pub c: i64,
}

impl Affine {
    pub const fn new(l: i64, m: i64, c: i64) -> Self {
        Affine { l, m, c }
    }

    pub fn at(&self, l: i64, m: i64) -> i64 {
        self.l * l + self.m * m + self.c
    }
}

/// Chains of equal degrees from restricting the coefficients of the E8
/// form: `4L = 4 + 4M = 10 + 3M = 16 + 2M` and
/// `6L = 7M = 6 + 6M = 12 + 5M = 18 + 4M = 24 + 3M`.
pub fn bundle_system() -> Vec<Vec<Affine>> {
    let a = Affine::new;
    vec![
        vec![a(4, 0, 0), a(0, 4, 4), a(0, 3, 10), a(0, 2, 16)],
        vec![a(6, 0, 0), a(0, 7, 0), a(0, 6, 6), a(0, 5, 12), a(0, 4, 18), a(0, 3, 24)],
    ]
}

/// Integer solution `(M, L)` of a system of equality chains.
pub fn solve_bundle_system(chains: &[Vec<Affine>]) -> Result<(i64, i64)> {
    // linear equations e(L, M) = 0 from consecutive members
    let eqs: Vec<Affine> = chains
        .iter()
        .flat_map(|c| c.windows(2).map(|w| Affine::new(w[0].l - w[1].l, w[0].m - w[1].m, w[0].c - w[1].c)))
        .collect();
    for (i, e1) in eqs.iter().enumerate() {
        for e2 in &eqs[i + 1..] {
            let det = e1.l * e2.m - e2.l * e1.m;
            if det == 0 {
                continue;
            }
            let ln = -e1.c * e2.m + e2.c * e1.m;
            let mn = -e1.l * e2.c + e2.l * e1.c;
            if ln % det != 0 || mn % det != 0 {
                return Err(K3Error::InconsistentSystem);
            }
            let (l, m) = (ln / det, mn / det);
            if eqs.iter().all(|e| e.at(l, m) == 0) {
                return Ok((m, l));
            }
            return Err(K3Error::InconsistentSystem);
        }
    }
    Err(K3Error::InconsistentSystem)
}

/// `(M, L)` exponents of the two bundles.
pub fn susy_bundle_exponents() -> Result<(i64, i64)> {
    solve_bundle_system(&bundle_system())
}

/// Every single-constant perturbation of the system is inconsistent.
pub fn bundle_negative_controls() -> Vec<(String, bool)> {
    let base = bundle_system();
    let mut out = vec![];
    for (i, chain) in base.iter().enumerate() {
        for j in 0..chain.len() {
            let mut sys = base.clone();
            sys[i][j].c += 1;
            let rejected = matches!(solve_bundle_system(&sys), Err(K3Error::InconsistentSystem));
            out.push((format!("chain {} member {}", i + 1, j + 1), rejected));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations;

    #[test]
    fn forms_match_models() {
        check_forms().unwrap();
        let j = symbolic_j();
        let e8 = ftheory_e8_form(&j, &JElem::one()).unwrap();
        assert_eq!(e8.a4, fibrations::jpoly("-J4^2/3*t^2 - J5*t^3 - 3*J2*t^4"));
        let p = DualityParams::new(&j, &symbolic_lambda());
        assert!(p.constraints_hold());
        assert!(fibrations::two_torsion_present(&ftheory_so32_form(&j, &symbolic_lambda()).unwrap()));
    }

    #[test]
    fn lambda_is_a_weight() {
        let r = lambda_weights(Fibration::Bfd).unwrap();
        assert_eq!(r.to_string(), "w^2 = 1*lambda^14, t -> (1*lambda^6) t");
        let r = lambda_weights(Fibration::Alt).unwrap();
        assert_eq!(r.to_string(), "w^2 = 1*lambda^6, t -> (1*lambda^2) t");
    }

    #[test]
    fn gauge() {
        let g = gauge_algebra_of(&[(Kodaira::IIStar, 1), (Kodaira::IStar(2), 1), (Kodaira::I(1), 6)]);
        assert_eq!(g.to_string(), "e8 ⊕ so(12)");
        let g = gauge_algebra_of(&[(Kodaira::IStar(8), 1), (Kodaira::I(2), 2)]);
        assert_eq!(g.to_string(), "so(24) ⊕ su(2) ⊕ su(2)");
        let g = gauge_algebra_of(&[(Kodaira::IStar(12), 1)]);
        assert_eq!(g.note, "Spin(32)/Z2");
        assert_eq!(g.rank(), 16);
    }

    #[test]
    fn bundle_exponents() {
        assert_eq!(susy_bundle_exponents().unwrap(), (6, 7));
        assert!(bundle_negative_controls().iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn lattice_labels() {
        assert_eq!(lattice_label(16, "Z2^2", "D12+A1+A1").unwrap().0, "H+E7+E7");
        assert_eq!(lattice_label(16, "Z2^2", "E8+D6").unwrap().0, "H+E8+D6");
        assert_eq!(lattice_label(18, "0", "D16").unwrap().0, "H+E8+E8");
        assert!(lattice_label(16, "Z4", "D14").is_none());
    }
}
