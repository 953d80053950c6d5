use clap::{Parser, Subcommand, ValueEnum};
use exactalg::{parse_mpoly, var};
use k3fib::duality;
use k3fib::fibrations::{self, Fibration, Locus};
use k3fib::lattices;
use k3fib::report::{self, Suite};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "k3fib", version, about = "Exact checks for elliptic fibrations on H+E7+E7 polarized K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Json,
    Markdown,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Emit the lattice-polarization tables.
    Tables {
        #[arg(long, default_value = "all")]
        fibration: String,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Classify the singular fibers of a J-model under an assignment.
    Classify {
        #[arg(long)]
        fibration: String,
        /// `K=V` with K one of J2..J6, aa and V a rational or a polynomial in s, u.
        #[arg(long = "set", value_name = "K=V")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Rational witness for a locus of the tables.
    Witness {
        #[arg(long)]
        locus: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Lattice utilities.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Discriminant form of a direct sum such as "H+E7+E7" or "D12+2A1".
    Disc {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

enum Fail {
    Usage(String),
    Check(String),
}

impl From<k3fib::K3Error> for Fail {
    fn from(e: k3fib::K3Error) -> Self {
        Fail::Check(e.to_string())
    }
}

type Out = Result<bool, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Verify { suite, format } => verify(&suite, format),
        Cmd::Tables { fibration, format, out } => tables(&fibration, format, out),
        Cmd::Classify { fibration, set, format } => classify(&fibration, &set, format),
        Cmd::Witness { locus, format } => witness(&locus, format),
        Cmd::Lattice { cmd: LatticeCmd::Disc { spec, format } } => lattice_disc(&spec, format),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn fibrations_arg(s: &str) -> Result<Vec<Fibration>, Fail> {
    if s == "all" {
        return Ok(Fibration::ALL.to_vec());
    }
    Fibration::parse(s).map(|f| vec![f]).map_err(|_| Fail::Usage(format!("unknown fibration {s:?}")))
}

fn verify(suite: &str, format: Format) -> Out {
    let suites = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(suite).map_err(|_| Fail::Usage(format!("unknown suite {suite:?}")))?]
    };
    let reports = report::run_suites(&suites);
    match format {
        Format::Json => println!("{}", to_json(&reports)),
        Format::Text => print!("{}", report::render_text(&reports)),
        Format::Markdown => return Err(Fail::Usage("verify supports text and json".into())),
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn tables(fibration: &str, format: Format, out: Option<std::path::PathBuf>) -> Out {
    let which = fibrations_arg(fibration)?;
    let tables: Vec<duality::Table> = which.iter().map(|&w| duality::emit_table(w)).collect();
    let text = match format {
        Format::Json => to_json(&tables) + "\n",
        Format::Markdown | Format::Text => duality::tables_markdown(&tables),
    };
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Fail::Check(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(tables.iter().all(|t| t.passed()))
}

fn parse_set(items: &[String]) -> Result<fibrations::Assignment, Fail> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| Fail::Usage(format!("expected K=V, got {kv:?}")))?;
            let val = parse_mpoly(v.trim()).map_err(|e| Fail::Usage(format!("{k}: {e}")))?;
            Ok((var(k.trim()), val))
        })
        .collect()
}

fn classify(fibration: &str, set: &[String], format: Format) -> Out {
    let which = Fibration::parse(fibration).map_err(|_| Fail::Usage(format!("unknown fibration {fibration:?}")))?;
    let a = parse_set(set)?;
    let (full, cfg) = fibrations::classify_assignment(which, &a).map_err(|e| match e {
        k3fib::K3Error::Parse(m) => Fail::Usage(m),
        e => Fail::Check(e.to_string()),
    })?;
    match format {
        Format::Json => {
            let assignments: Vec<_> = full.iter().map(|(v, m)| json!([exactalg::var_name(*v), m.to_string()])).collect();
            let fibers: Vec<_> = cfg
                .fibers
                .iter()
                .map(|e| json!({"place": e.place, "kodaira": e.kodaira.to_string(), "ade": e.ade, "count": e.count}))
                .collect();
            let v = json!({
                "fibration": which.name(),
                "assignments": assignments,
                "fibers": fibers,
                "mw_torsion": cfg.mw_torsion,
                "mw_rank": cfg.mw_rank,
                "euler": cfg.euler,
            });
            println!("{}", to_json(&v));
        }
        _ => {
            println!("{}: {}", which, cfg.summary());
            for e in &cfg.fibers {
                println!("  {:<24} {:<6} x{} {}", e.place, e.kodaira.to_string(), e.count, e.ade);
            }
            println!("MW torsion {}, rank {}, euler {}", cfg.mw_torsion, cfg.mw_rank, cfg.euler);
        }
    }
    Ok(true)
}

fn witness(locus: &str, format: Format) -> Out {
    let (l, which) = match locus.to_ascii_lowercase().as_str() {
        "j30" => (Locus::J30, None),
        "resde" => (Locus::Res, Some(Fibration::Alt)),
        "a0" => (Locus::A0, None),
        _ => return Err(Fail::Usage(format!("unknown locus {locus:?}; expected j30, resDE or a0"))),
    };
    if l == Locus::A0 {
        // the aa = 0 locus is parametrized rather than sampled
        let a = fibrations::a0_assignment();
        match format {
            Format::Json => {
                let v: Vec<_> = a.iter().map(|(v, m)| json!([exactalg::var_name(*v), m.to_string()])).collect();
                println!("{}", to_json(&json!({"locus": "a0", "assignment": v})));
            }
            _ => {
                for (v, m) in &a {
                    println!("{} = {}", exactalg::var_name(*v), m);
                }
            }
        }
        return Ok(true);
    }
    let w = fibrations::find_witness(l, which)?;
    let inv = fibrations::locus_invariants(&w.j, w.aa.as_ref());
    let on_locus = match l {
        Locus::J30 => inv.j30 == exactalg::Q::from_integer(0.into()),
        _ => inv.res_alt == exactalg::Q::from_integer(0.into()),
    };
    match format {
        Format::Json => println!("{}", to_json(&json!({"witness": w, "on_locus": on_locus}))),
        _ => {
            let j: Vec<String> = w.j.iter().map(exactalg::ring::fmt_q).collect();
            println!("[J2 : J3 : J4 : J5 : J6] = [{}]", j.join(" : "));
            if let Some(aa) = &w.aa {
                println!("aa = {}", exactalg::ring::fmt_q(aa));
            }
            println!("on locus: {on_locus}");
        }
    }
    Ok(on_locus)
}

fn lattice_disc(spec: &str, format: Format) -> Out {
    let s = lattices::parse_lattice_spec(spec).map_err(|e| Fail::Usage(e.to_string()))?;
    let l = s.lattice();
    let f = lattices::discriminant_form(&l)?;
    let iso = lattices::fqf_isomorphic(&f, &lattices::FiniteQuadraticForm::target())?;
    let q: Vec<String> = f.gram().iter().enumerate().map(|(i, r)| exactalg::ring::fmt_q(&r[i])).collect();
    match format {
        Format::Json => println!(
            "{}",
            to_json(&json!({
                "spec": spec,
                "rank": l.rank(),
                "det": l.det().to_string(),
                "group": f.group_label(),
                "orders": f.orders(),
                "q": q,
                "isomorphic_to_target": iso,
            }))
        ),
        _ => {
            println!("rank {}, det {}", l.rank(), l.det());
            println!("D = {}", f.group_label());
            println!("q on generators: ({})", q.join(", "));
            println!("isomorphic to (Z2^2, (1/2, 1/2)): {iso}");
        }
    }
    Ok(true)
}
