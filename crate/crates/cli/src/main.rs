use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use rhdist::barlet::{self, i_ledger, windowed, MonomialMap, ProductTestForm};
use rhdist::io::{self, PairingFile};
use rhdist::mellin::mellin_ledger;
use rhdist::nilalg::{jordan_type, monodromy_filtration};
use rhdist::parse::{parse_germ, parse_gr, render_error};
use rhdist::quiver::{self, hermitian_dual_quiver, psi_limit};
use rhdist::sesqui::{self, GradedPairing, SMat};
use rhdist::vfilt::{graded_class, l_alpha, v_orders};
use rhdist::{selftest, BiOrder, Error, GaussianRational as G, PoleLedger, VGradedModule};

#[derive(Parser)]
#[command(name = "rhdist", version, about = "Exact calculus of regular holonomic distribution germs in one variable")]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a germ and print its canonical form
    Germ { expr: String },
    /// Bi-order (a', a'') of a germ
    Orders { expr: String },
    /// Representative of the graded class at an order "a',a''"
    Class {
        #[arg(short, long, allow_hyphen_values = true)]
        order: String,
        expr: String,
    },
    /// The functional L_alpha
    #[command(name = "L")]
    L {
        #[arg(short, long, allow_hyphen_values = true)]
        alpha: String,
        expr: String,
    },
    /// Pole ledger of J^(k',k'')
    Mellin {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k1: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k2: i64,
        expr: String,
    },
    /// Quiver modules (JSON files)
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Sesquilinear pairings (JSON files)
    #[command(subcommand)]
    Pairing(PairingCmd),
    /// Poles of integrals of |f|^(2s) against test forms
    #[command(subcommand)]
    Barlet(BarletCmd),
    /// Run the invariant suite
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand)]
enum ModuleCmd {
    /// Check var*can = N_-1 and can*var = N_0
    Check { file: String },
    /// Nilpotents, monodromy filtrations and stabilized limits
    Psi { file: String },
    /// Hermitian dual module
    Dual { file: String },
    /// Localized module (phi = psi(-1), var = id)
    Localize {
        file: String,
        /// Produce the colocalized module instead
        #[arg(long)]
        co: bool,
    },
}

#[derive(Subcommand)]
enum PairingCmd {
    /// psi_lambda S matrices
    Psi {
        file: String,
        #[arg(short, long, allow_hyphen_values = true)]
        alpha: Option<String>,
    },
    /// phi_1 S matrix
    Phi { file: String },
    /// The four compatibility identities
    CheckProps { file: String },
    /// Nondegeneracy of the full and the primitive pairings
    CheckCor { file: String },
    /// psi_lambda S directly and through the extension modules
    TwoRoute {
        file: String,
        #[arg(short)]
        p: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BarletCmd {
    /// Ledger of I(s) for a monomial f
    Ledger {
        #[arg(short)]
        f: String,
        #[arg(long, default_value_t = 5)]
        window: u32,
        /// Exponents "a=1,0" (radial) or "a=1,0;b=0,0"
        #[arg(long)]
        form: Option<String>,
    },
    /// Bundled fixtures: predicted order against the ledger
    Fixtures {
        #[arg(long, default_value_t = 5)]
        window: u32,
        /// Read fixtures from a manifest file instead of the built-in table
        #[arg(long)]
        manifest: Option<String>,
    },
}

enum Fail {
    Usage(String),
    Verify(Out),
}

/// Text and JSON forms of a report.
struct Out {
    text: String,
    json: Value,
}

type Res = Result<Out, Fail>;

fn out(text: impl Into<String>, json: Value) -> Res {
    Ok(Out { text: text.into(), json })
}

fn usage(e: Error) -> Fail {
    Fail::Usage(format!("error: {}", e))
}

fn germ_arg(s: &str) -> Result<rhdist::Germ, Fail> {
    parse_germ(s).map_err(|e| Fail::Usage(render_error(s, &e)))
}

fn gr_arg(s: &str) -> Result<G, Fail> {
    parse_gr(s).map_err(|e| Fail::Usage(render_error(s, &e)))
}

fn read_json(path: &str) -> Result<Value, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::Usage(format!("error: cannot read {}: {}", path, e)))?;
    io::parse_json(&text).map_err(|e| Fail::Usage(format!("error: {}: {}", path, e)))
}

fn read_module(path: &str) -> Result<VGradedModule, Fail> {
    io::module_from_json(&read_json(path)?).map_err(|e| Fail::Usage(format!("error: {}: {}", path, e)))
}

fn read_pairing(path: &str) -> Result<PairingFile, Fail> {
    io::pairing_from_json(&read_json(path)?).map_err(|e| Fail::Usage(format!("error: {}: {}", path, e)))
}

fn smat_text(m: &SMat) -> String {
    if m.is_empty() {
        return "[]\n".into();
    }
    m.iter().map(|r| format!("[{}]\n", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect()
}

fn smat_json(m: &SMat) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

fn ledger_json(l: &PoleLedger) -> Value {
    Value::Array(
        l.poles()
            .map(|(s0, cs)| {
                json!({
                    "s0": s0.to_string(),
                    "order": cs.len(),
                    "coeffs": cs.iter().rev().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn cmd_class(order: &str, expr: &str) -> Res {
    let parts: Vec<&str> = order.trim_matches(|c| c == '(' || c == ')').split(',').collect();
    if parts.len() != 2 {
        return Err(Fail::Usage("error: order must look like \"a',a''\"".into()));
    }
    let o = BiOrder::new(gr_arg(parts[0].trim())?, gr_arg(parts[1].trim())?);
    let g = germ_arg(expr)?;
    let c = graded_class(&g, &o).map_err(usage)?;
    out(c.to_string(), json!({"order": o.to_string(), "class": c.to_string()}))
}

fn module_psi(m: &VGradedModule) -> Res {
    let mut text = String::new();
    let mut js = Vec::new();
    for a in m.alphas() {
        let n = m.psi_n(&a);
        let k = n.nilpotency_index().map_err(usage)?;
        let jt = jordan_type(&n).map_err(usage)?;
        let f = monodromy_filtration(&n).map_err(usage)?;
        let gr: Vec<(i64, usize)> = f.support().into_iter().map(|l| (l, f.gr_dim(l))).filter(|x| x.1 > 0).collect();
        let lim = psi_limit(&n, k).map_err(usage)?;
        text.push_str(&format!(
            "alpha = {}: dim {}, Jordan type {:?}, nilpotency index {}, gr dims {}, limit at p = {} {}\n",
            a,
            n.rows(),
            jt,
            k,
            gr.iter().map(|(l, d)| format!("{}:{}", l, d)).collect::<Vec<_>>().join(" "),
            k,
            if lim.witness.is_iso() { "iso" } else { "NOT iso" }
        ));
        js.push(json!({
            "alpha": a.to_string(), "dim": n.rows(), "jordan_type": jt, "nilpotency_index": k,
            "gr_dims": gr.iter().map(|(l, d)| json!([l, d])).collect::<Vec<_>>(),
            "limit_iso": lim.witness.is_iso(),
        }));
    }
    if m.alphas().is_empty() {
        text.push_str("(no psi)\n");
    }
    out(text, Value::Array(js))
}

fn graded_json(g: &GradedPairing) -> Value {
    json!({"alpha": g.alpha.to_string(), "matrix": smat_json(&g.m)})
}

fn pairing_psi(pf: &PairingFile, alpha: Option<&str>) -> Res {
    let alphas = match alpha {
        Some(a) => vec![gr_arg(a)?],
        None => pf.pairing.alphas(),
    };
    let mut text = String::new();
    let mut js = Vec::new();
    for a in alphas {
        let g = sesqui::psi_s(&pf.pairing, &a).map_err(usage)?;
        text.push_str(&format!("alpha = {}\n{}", a, smat_text(&g.m)));
        js.push(graded_json(&g));
    }
    out(text, Value::Array(js))
}

fn verdict(ok: bool, o: Out) -> Res {
    if ok {
        Ok(o)
    } else {
        Err(Fail::Verify(o))
    }
}

fn two_route(pf: &PairingFile, p: Option<usize>) -> Res {
    let pr = &pf.pairing;
    let mut lines = Vec::new();
    let mut js = Vec::new();
    let mut all = true;
    for a in pr.alphas() {
        let k = pr.left.psi_n(&a).nilpotency_index().map_err(usage)?;
        let pp = p.or(pf.p).unwrap_or(k);
        let direct = sesqui::psi_s(pr, &a).map_err(usage)?;
        let via = sesqui::psi_s_via_malphap(pr, &a, pp).map_err(usage)?;
        let eq = direct == via;
        all &= eq;
        lines.push(format!("alpha = {} (p = {}): {}", a, pp, if eq { "EQUAL" } else { "DIFFER" }));
        if !eq {
            lines.push(format!("direct:\n{}via M_alpha,p:\n{}", smat_text(&direct.m), smat_text(&via.m)));
        }
        js.push(json!({"alpha": a.to_string(), "p": pp, "equal": eq, "direct": smat_json(&direct.m), "via": smat_json(&via.m)}));
    }
    let head = if all { "EQUAL" } else { "DIFFER" };
    let text = format!("{}\n{}", head, lines.join("\n"));
    verdict(all, Out { text, json: json!({"equal": all, "alphas": js}) })
}

fn parse_form(f: &MonomialMap, form: Option<&str>, window: u32) -> Result<ProductTestForm, Fail> {
    let n = f.n();
    let Some(s) = form else {
        return ProductTestForm::radial(f, &vec![0; n], window).map_err(usage);
    };
    let mut a: Option<Vec<i64>> = None;
    let mut b: Option<Vec<i64>> = None;
    for part in s.split(';') {
        let (k, v) = part.split_once('=').ok_or_else(|| Fail::Usage(format!("error: bad form part \"{}\"", part)))?;
        let xs = v
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Fail::Usage(format!("error: bad exponent list \"{}\"", v)))?;
        match k.trim() {
            "a" => a = Some(xs),
            "b" => b = Some(xs),
            other => return Err(Fail::Usage(format!("error: unknown form key \"{}\"", other))),
        }
    }
    let a = a.ok_or_else(|| Fail::Usage("error: form needs \"a=...\"".into()))?;
    let b = b.unwrap_or_else(|| a.clone());
    if a.len() != n || b.len() != n {
        return Err(Fail::Usage(format!("error: form has {} exponents, f has {} variables", a.len(), n)));
    }
    ProductTestForm::for_window(f, a.into_iter().zip(b).collect(), window).map_err(usage)
}

/// `(f, module, declared orders per alpha)` read from a manifest.
type Entry = (String, VGradedModule, Vec<(G, usize)>);

fn load_manifest(path: &str) -> Result<Vec<Entry>, Fail> {
    let man = read_json(path)?;
    let dir = Path::new(path).parent().unwrap_or(Path::new("."));
    let bad = |m: &str| Fail::Usage(format!("error: {}: {}", path, m));
    let mut out = Vec::new();
    for e in man.get("fixtures").and_then(Value::as_array).ok_or_else(|| bad("missing \"fixtures\""))? {
        let f = e.get("f").and_then(Value::as_str).ok_or_else(|| bad("fixture without \"f\""))?;
        let file = e.get("module").and_then(Value::as_str).ok_or_else(|| bad("fixture without \"module\""))?;
        let m = read_module(&dir.join(file).to_string_lossy())?;
        let mut preds = Vec::new();
        for p in e.get("predicted").and_then(Value::as_array).ok_or_else(|| bad("fixture without \"predicted\""))? {
            let a = io::gr_from_json(p.get("alpha").unwrap_or(&Value::Null)).map_err(usage)?;
            let o = p.get("order").and_then(Value::as_u64).ok_or_else(|| bad("prediction without \"order\""))?;
            preds.push((a, o as usize));
        }
        out.push((f.to_string(), m, preds));
    }
    Ok(out)
}

fn barlet_fixtures(window: u32, manifest: Option<&str>) -> Res {
    let entries: Vec<Entry> = match manifest {
        Some(p) => load_manifest(p)?,
        None => barlet::fixtures()
            .into_iter()
            .map(|fx| (fx.f.to_string(), fx.module.clone(), vec![]))
            .collect(),
    };
    let mut text = String::new();
    let mut js = Vec::new();
    let mut all = true;
    for (f, module, declared) in entries {
        let fm = MonomialMap::parse(&f).map_err(usage)?;
        let fam = barlet::radial_family(&fm, 2, window);
        for a in module.alphas() {
            let want = barlet::predicted_order(&module, &a).map_err(usage)?;
            let seen = barlet::max_order_along(&fm, &fam, &a, window).map_err(usage)?;
            let decl = declared.iter().find(|(x, _)| *x == a).map(|x| x.1);
            let ok = seen >= want && decl.map_or(true, |d| d == want);
            all &= ok;
            text.push_str(&format!("f = {}  alpha = {}  predicted {}  seen {}{}\n", f, a, want, seen, if ok { "" } else { "  MISMATCH" }));
            js.push(json!({"f": f, "alpha": a.to_string(), "predicted": want, "declared": decl, "seen": seen, "ok": ok}));
        }
    }
    verdict(all, Out { text, json: Value::Array(js) })
}

fn run(cli: &Cli) -> Res {
    match &cli.cmd {
        Cmd::Germ { expr } => {
            let g = germ_arg(expr)?;
            out(g.to_string(), json!({"germ": g.to_string()}))
        }
        Cmd::Orders { expr } => {
            let o = v_orders(&germ_arg(expr)?).map_err(usage)?;
            out(o.to_string(), json!({"aprime": o.aprime.to_string(), "asecond": o.asecond.to_string()}))
        }
        Cmd::Class { order, expr } => cmd_class(order, expr),
        Cmd::L { alpha, expr } => {
            let a = gr_arg(alpha)?;
            let v = l_alpha(&germ_arg(expr)?, &a).map_err(usage)?;
            out(v.to_string(), json!({"alpha": a.to_string(), "value": v.to_string()}))
        }
        Cmd::Mellin { k1, k2, expr } => {
            let l = mellin_ledger(&germ_arg(expr)?, *k1, *k2);
            out(l.to_string().trim_end(), ledger_json(&l))
        }
        Cmd::Module(mc) => match mc {
            ModuleCmd::Check { file } => {
                let m = read_module(file)?;
                let v = m.violations();
                let text = if v.is_empty() { "OK".to_string() } else { format!("FAIL\n{}", v.join("\n")) };
                verdict(v.is_empty(), Out { text, json: json!({"ok": v.is_empty(), "violations": v}) })
            }
            ModuleCmd::Psi { file } => {
                let m = read_module(file)?;
                m.check().map_err(usage)?;
                module_psi(&m)
            }
            ModuleCmd::Dual { file } => {
                let m = read_module(file)?;
                m.check().map_err(usage)?;
                let j = io::module_to_json(&hermitian_dual_quiver(&m));
                out(io::to_text(&j), j)
            }
            ModuleCmd::Localize { file, co } => {
                let m = read_module(file)?;
                let r = if *co { quiver::colocalize(&m) } else { quiver::localize(&m) };
                let j = io::module_to_json(&r);
                out(io::to_text(&j), j)
            }
        },
        Cmd::Pairing(pc) => match pc {
            PairingCmd::Psi { file, alpha } => pairing_psi(&read_pairing(file)?, alpha.as_deref()),
            PairingCmd::Phi { file } => {
                let g = sesqui::phi_s(&read_pairing(file)?.pairing).map_err(usage)?;
                out(smat_text(&g.m).trim_end(), graded_json(&g))
            }
            PairingCmd::CheckProps { file } => {
                let rep = sesqui::check_props(&read_pairing(file)?.pairing).map_err(usage)?;
                let text: Vec<String> =
                    rep.checks.iter().map(|(n, ok)| format!("{} {}", if *ok { "PASS" } else { "FAIL" }, n)).collect();
                let js: Vec<Value> = rep.checks.iter().map(|(n, ok)| json!({"identity": n, "pass": ok})).collect();
                verdict(rep.all_pass(), Out { text: text.join("\n"), json: json!({"ok": rep.all_pass(), "checks": js}) })
            }
            PairingCmd::CheckCor { file } => {
                let c = sesqui::check_cor_sesqui(&read_pairing(file)?.pairing).map_err(usage)?;
                let text = format!(
                    "full pairing nondegenerate: {}\nprimitive pairings nondegenerate: {}\nequivalence: {}",
                    c.full,
                    c.primitive,
                    if c.holds() { "HOLDS" } else { "FAILS" }
                );
                verdict(c.holds(), Out { text, json: json!({"full": c.full, "primitive": c.primitive, "holds": c.holds()}) })
            }
            PairingCmd::TwoRoute { file, p } => two_route(&read_pairing(file)?, *p),
        },
        Cmd::Barlet(bc) => match bc {
            BarletCmd::Ledger { f, window, form } => {
                let fm = MonomialMap::parse(f).map_err(usage)?;
                let phi = parse_form(&fm, form.as_deref(), *window)?;
                let l = windowed(&i_ledger(&fm, &phi).map_err(usage)?, *window);
                out(l.to_string().trim_end(), json!({"f": fm.to_string(), "window": window, "poles": ledger_json(&l)}))
            }
            BarletCmd::Fixtures { window, manifest } => barlet_fixtures(*window, manifest.as_deref()),
        },
        Cmd::Selftest { seed, quick } => {
            let rep = selftest::run(*seed, *quick);
            let mut text = format!("seed {}{}\n", seed, if *quick { " (quick)" } else { "" });
            for r in &rep.results {
                text.push_str(&format!("{} {}/{} {}\n", if r.ok() { "PASS" } else { "FAIL" }, r.passed, r.total, r.name));
                if let Some(f) = &r.first_failure {
                    text.push_str(&format!("     first failure: {}\n", f));
                }
            }
            let js: Vec<Value> = rep
                .results
                .iter()
                .map(|r| json!({"property": r.name, "passed": r.passed, "total": r.total, "first_failure": r.first_failure}))
                .collect();
            verdict(rep.all_pass(), Out { text: text.trim_end().to_string(), json: json!({"seed": seed, "quick": quick, "properties": js}) })
        }
    }
}

fn emit(o: &Out, as_json: bool) {
    let body = if as_json { serde_json::to_string_pretty(&o.json).expect("json") } else { o.text.trim_end().to_string() };
    // a closed pipe is not an error for a batch tool
    let _ = writeln!(std::io::stdout().lock(), "{}", body);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            emit(&o, cli.json);
            ExitCode::SUCCESS
        }
        Err(Fail::Verify(o)) => {
            emit(&o, cli.json);
            ExitCode::from(1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("{}", msg);
            ExitCode::from(2)
        }
    }
}
