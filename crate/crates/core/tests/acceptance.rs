//! One line per acceptance criterion: status, wall time against its budget,
//! and the evidence. Criteria that do not hold are printed as FAIL and
//! explained; only the ones that hold are asserted.

#[path = "../../exactalg/tests/common/props.rs"]
mod props;

use exactalg::Q;
use k3fib::divisors::{self, CurveGraph};
use k3fib::duality;
use k3fib::fibrations::{self, Fibration, Locus};
use k3fib::lattices::{self, FiniteQuadraticForm};
use k3fib::quartic::{self, QuarticParams};
use k3fib::report;
use std::time::{Duration, Instant};

struct Outcome {
    id: u32,
    name: &'static str,
    budget: Duration,
    elapsed: Duration,
    holds: bool,
    detail: String,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.holds && self.elapsed <= self.budget
    }

    fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.3}s / budget {}s): {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

fn timed(id: u32, name: &'static str, budget_s: u64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (holds, detail) = f();
    Outcome { id, name, budget: Duration::from_secs(budget_s), elapsed: start.elapsed(), holds, detail }
}

fn frames() -> (bool, String) {
    let c = lattices::classify_frame_lattices();
    let (extra, missing) = report::frame_discrepancies(&c);
    let found: Vec<String> = c.results.iter().map(|r| format!("{} ({})", r.root_label, r.torsion)).collect();
    (
        c.results.len() == 4 && extra.is_empty() && missing.is_empty(),
        format!("{}; extras [{}]", found.join(", "), extra.join(", ")),
    )
}

fn disc_forms() -> (bool, String) {
    let target = FiniteQuadraticForm::target();
    let mut ok = true;
    let mut out = vec![];
    for spec in report::FRAME_SPECS {
        let l = lattices::parse_lattice_spec(spec).unwrap().lattice();
        let f = lattices::discriminant_form(&l).unwrap();
        let iso = lattices::fqf_isomorphic(&f, &target).unwrap();
        // second route: q-value multisets over the whole group
        let same_values = f.value_multiset() == target.value_multiset();
        ok &= iso && same_values && l.det() == 4.into();
        out.push(format!("{spec}: {} iso {iso}", f.group_label()));
    }
    (ok, out.join("; "))
}

fn divisor_suite() -> (bool, String) {
    let g = CurveGraph::standard();
    let cat = divisors::fiber_catalog();
    let fibers_ok = cat
        .iter()
        .filter(|f| divisors::verify_fiber_class(&g, &f.class, f.kind, &f.sections).unwrap().passed())
        .count();
    let ids = divisors::class_identities();
    let ns = ids.iter().filter(|i| divisors::verify_class_identity(&g, &i.lhs, &i.rhs)).count();
    let literal = ids.iter().filter(|i| divisors::coefficientwise_equal(&i.lhs, &i.rhs)).count();
    (
        fibers_ok == cat.len() && literal == ids.len(),
        format!(
            "fiber classes {fibers_ok}/{}; identities coefficient-wise {literal}/{}, in NS {ns}/{} (printed alt identity fails in NS)",
            cat.len(),
            ids.len(),
            ids.len()
        ),
    )
}

fn quartic_suite() -> (bool, String) {
    let p = QuarticParams::symbolic();
    let s = quartic::verify_param_symmetries(&p);
    let printed = quartic::nikulin_involution_verify(&p, true);
    let fixed = quartic::nikulin_involution_verify(&p, false);
    let printed_ok = printed.preserves_quartic && printed.squares_to_identity && printed.symplectic;
    let fixed_ok = fixed.preserves_quartic && fixed.squares_to_identity && fixed.symplectic;
    (
        s.scaling && s.swap && printed_ok,
        format!(
            "isomorphisms scaling {} swap {}; printed map: preserved {}, square {}, 2-form {}; \
             with last slot AZW: preserved {}, square {}, 2-form {}",
            s.scaling,
            s.swap,
            printed.preserves_quartic,
            printed.squares_to_identity,
            printed.symplectic,
            fixed.preserves_quartic,
            fixed.squares_to_identity,
            fixed_ok
        ),
    )
}

fn derivations() -> (bool, String) {
    let p = QuarticParams::symbolic();
    let mut ok = true;
    let mut out = vec![];
    for w in Fibration::ALL {
        let same = quartic::derive_fibration(w, &p).map(|d| d.model == quartic::printed_model(w, &p)).unwrap_or(false);
        let eq = fibrations::derived_vs_j_model(w);
        ok &= same && eq.is_ok();
        out.push(format!(
            "{w} verbatim {same}, J-model {}",
            eq.map(|s| format!("scale {s}")).unwrap_or_else(|e| e.to_string())
        ));
    }
    (ok, out.join("; "))
}

fn generic_fibers() -> (bool, String) {
    let mut ok = true;
    let mut out = vec![];
    for w in Fibration::ALL {
        let (want, mw) = report::expected_generic(w);
        let c = fibrations::classify_locus(w, Locus::Generic).unwrap();
        // Euler sum recomputed from the listed fibers
        let euler: u32 = c.fibers.iter().map(|e| e.kodaira.euler() * e.count as u32).sum();
        ok &= c.summary() == want && c.mw_torsion == mw && euler == 24 && c.euler == 24;
        out.push(format!("{w} {} MW {}", c.summary(), c.mw_torsion));
    }
    (ok, out.join("; "))
}

fn chain() -> (bool, String) {
    let r = fibrations::verify_j30_chain().unwrap();
    let failing: Vec<String> = r.members.iter().filter(|m| !m.holds).map(|m| format!("{} -> {}", m.name, m.detail)).collect();
    let held = r.members.iter().filter(|m| m.holds).count();
    (r.passed(), format!("{held}/{} members hold; {}", r.members.len(), failing.join(" | ")))
}

fn tables() -> (bool, String) {
    let tabs = duality::emit_tables();
    let rows: usize = tabs.iter().map(|t| t.rows.len()).sum();
    let bad: Vec<String> = tabs
        .iter()
        .flat_map(|t| t.rows.iter().filter(|r| r.status != "pass").map(move |r| format!("{} {}", t.fibration, r.label)))
        .collect();
    // the witness rows: each witness lies on its locus and on no other
    let zero = Q::from_integer(0.into());
    let j30 = fibrations::find_witness(Locus::J30, None).unwrap();
    let inv = fibrations::locus_invariants(&j30.j, j30.aa.as_ref());
    let mut witnesses_ok = inv.j30 == zero && Fibration::ALL.iter().all(|&w| inv.isolates(Locus::J30, w));
    for w in Fibration::ALL {
        if fibrations::table_loci(w).contains(&Locus::Res) {
            let x = fibrations::find_witness(Locus::Res, Some(w)).unwrap();
            witnesses_ok &= fibrations::locus_invariants(&x.j, x.aa.as_ref()).isolates(Locus::Res, w);
        }
    }
    (
        bad.is_empty() && witnesses_ok && rows == 22,
        format!("{rows} rows in 4 tables, mismatches [{}], witnesses isolated {witnesses_ok}", bad.join(", ")),
    )
}

fn duality_checks() -> (bool, String) {
    let forms = duality::check_forms();
    let mut sieg = vec![];
    let mut ok = forms.is_ok();
    for (w, want) in [(Fibration::Bfd, "std_red"), (Fibration::Std, "std_red"), (Fibration::Alt, "alt_red"), (Fibration::Max, "alt_red")] {
        let r = fibrations::siegel_restriction(w);
        let hit = r.as_ref().map(|r| r.target == want).unwrap_or(false);
        ok &= hit;
        sieg.push(format!("{w}->{want} {hit}"));
    }
    let susy = duality::susy_bundle_exponents().ok();
    ok &= susy == Some((6, 7));
    (ok, format!("forms {}; Siegel {}; (M, L) = {susy:?}", forms.is_ok(), sieg.join(", ")))
}

fn properties() -> (bool, String) {
    let res = props::run_all(1000);
    let ok = res.iter().all(|r| r.outcome.is_ok() && r.cases == 1000);
    let d: Vec<String> = res
        .iter()
        .map(|r| format!("{} {} ({:.2}s)", r.name, if r.outcome.is_ok() { "ok" } else { "FAILED" }, r.elapsed.as_secs_f64()))
        .collect();
    (ok, format!("1000 cases each: {}", d.join(", ")))
}

#[test]
fn acceptance() {
    let outcomes = vec![
        timed(1, "frame classification", 10, frames),
        timed(2, "discriminant forms", 1, disc_forms),
        timed(3, "divisor suite", 1, divisor_suite),
        timed(4, "quartic suite", 300, quartic_suite),
        timed(5, "derivations", 120, derivations),
        timed(6, "generic fibers", 60, generic_fibers),
        timed(7, "J30 chain", 120, chain),
        timed(8, "tables", 300, tables),
        timed(9, "duality", 30, duality_checks),
        timed(10, "property suites", 60, properties),
    ];
    println!();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("{passed}/{} criteria pass", outcomes.len());

    // 3, 4 and 7 concern printed statements that do not hold as written
    for o in outcomes.iter().filter(|o| ![3, 4, 7].contains(&o.id)) {
        assert!(o.passed(), "{}", o.line());
    }
}
