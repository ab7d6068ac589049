//! Command-line front end for the `rmb` binary.

pub mod suites;

use crate::boundary::{
    admissibility, exponent_lattice, nontrinodal_psi, satisfies_values, stratum_equations, trinodal_psi, CheckMode,
    Certificate, CrossRatioEq, GaussRat, ProjPoint, StratumKind, Weighting,
};
use crate::error::Error;
use crate::exact::{fmt_rat, parse_pc_list, parse_quad, parse_rat, split_top_level, Disc, PCElem, QuadElem, Rat};
use crate::lattices::QMat;
use crate::modvariety::{count_components, GammaElem, Mat2K, Mat2Z, ModContext};
use crate::orders::{QIdeal, QOrder};
use crate::prym::prym_pipeline;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rmb", version, about = "Exact computations for real multiplication boundary strata")]
struct Cli {
    /// Machine-readable JSON output, one object per task.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// File with one task per line, processed in parallel; output keeps input order.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Ideal arithmetic and enumeration in O_D.
    Ideal(IdealArgs),
    /// Prime factor condition, component count and smart bases.
    Classify(ClassifyArgs),
    /// Membership of (A;B) in the lower bound group, the modular group and the upper bound group.
    Group(GroupArgs),
    /// The symplectic matrix M(A,B) and its cocycle and period checks.
    Cocycle(CocycleArgs),
    /// Admissibility of a weighted stratum from its Q-images.
    Admissible(AdmissibleArgs),
    /// Cross-ratio equations of a weighted stratum.
    Crossratio(CrossratioArgs),
    /// The boundary pipeline for the S-shaped Prym family.
    Prym(PrymArgs),
    /// Run a named property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct IdealArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
    /// List the primitive ideals of this norm.
    #[arg(long)]
    norm: Option<u64>,
    /// `<n, a + g>` or a comma-separated generator list.
    #[arg(long)]
    gens: Option<String>,
    /// Invert the ideal given by --gens.
    #[arg(long)]
    invert: bool,
    /// Multiply the ideal given by --gens by this one.
    #[arg(long)]
    mul: Option<String>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
    #[arg(long = "d")]
    norm: u64,
}

#[derive(Args, Debug)]
struct ContextArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
    #[arg(long = "d")]
    norm: u64,
    /// The ideal `<n, a + g>`; defaults to the first primitive ideal of norm d.
    #[arg(long)]
    ideal: Option<String>,
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[command(flatten)]
    ctx: ContextArgs,
    /// `a1,a2,a3,a4;b1,b2,b3,b4` with A over K and B integral.
    #[arg(long, allow_hyphen_values = true)]
    check: String,
}

#[derive(Args, Debug)]
struct CocycleArgs {
    #[command(flatten)]
    ctx: ContextArgs,
    #[arg(long, allow_hyphen_values = true)]
    pair: String,
    /// Second pair for the cocycle identity; defaults to the first.
    #[arg(long, allow_hyphen_values = true)]
    with: Option<String>,
    #[arg(long)]
    verify_period: bool,
}

#[derive(Args, Debug)]
struct AdmissibleArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
    /// Weights `(x ; q),(x ; q),...`.
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
}

#[derive(Args, Debug)]
struct CrossratioArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
    /// Symmetric coefficient matrix of h in the weights, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    h: String,
    #[arg(long, default_value = "trinodal")]
    stratum: String,
    /// Six points p1,p2,p3,q1,q2,q3 (trinodal) or eight points p1,q1,p3+,q3-,p2,q2,q3+,p3-.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
}

#[derive(Args, Debug)]
struct PrymArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
}

/// Result of one task.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn verdict(ok: bool, text: String, json: Value) -> Outcome {
        Outcome { code: if ok { EXIT_OK } else { EXIT_FALSE }, text, json }
    }

    fn error(e: &Error) -> Outcome {
        let code = if matches!(e, Error::Parse(_)) { EXIT_USAGE } else { EXIT_DOMAIN };
        Outcome { code, text: format!("error: {e}"), json: json!({ "error": e.to_string() }) }
    }
}

type CmdResult = std::result::Result<Outcome, Error>;

fn disc(d: i64) -> std::result::Result<Disc, Error> {
    Disc::new(d)
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_ideal_text(order: &QOrder, text: &str) -> std::result::Result<QIdeal, Error> {
    let t = text.trim();
    if t.starts_with('<') {
        return order.parse_ideal(t);
    }
    let gens = split_top_level(t, ',').into_iter().map(|g| parse_quad(g, order.disc())).collect::<Result<Vec<_>, _>>()?;
    order.ideal_from_generators(&gens)
}

fn ideal_json(i: &QIdeal) -> Value {
    json!({
        "ideal": i.to_string(),
        "n": i.n().to_string(),
        "a": i.a().to_string(),
        "b": i.b().to_string(),
        "norm": i.norm().to_string(),
        "primitive": i.is_primitive(),
        "invertible": i.is_invertible(),
    })
}

fn cmd_ideal(a: &IdealArgs) -> CmdResult {
    let order = QOrder::from_value(a.d)?;
    if let Some(n) = a.norm {
        let pfc = order.satisfies_pfc(n)?;
        let ideals = order.primitive_ideals_of_norm(n)?;
        let mut text = format!("D = {}, norm {}: prime factor condition {}\n", a.d, n, pfc);
        for i in &ideals {
            text.push_str(&format!("{i}\n"));
        }
        let js = json!({ "D": a.d, "norm": n, "pfc": pfc, "ideals": ideals.iter().map(ideal_json).collect::<Vec<_>>() });
        return Ok(Outcome::verdict(!ideals.is_empty(), text.trim_end().into(), js));
    }
    let Some(g) = &a.gens else {
        let js = json!({ "D": a.d, "conductor": order.conductor(), "gamma": order.gamma().to_string() });
        let text = format!("O_{}: conductor {}, gamma = {}", a.d, order.conductor(), order.gamma());
        return Ok(Outcome::verdict(true, text, js));
    };
    let ideal = parse_ideal_text(&order, g)?;
    let mut js = ideal_json(&ideal);
    let mut text = format!(
        "{}: norm {}, primitive {}, invertible {}",
        ideal,
        ideal.norm(),
        ideal.is_primitive(),
        ideal.is_invertible()
    );
    let mut ok = true;
    if ideal.is_invertible() {
        let prod = ideal.mul(&ideal.conj())?;
        let expect = order.scalar_ideal(&ideal.norm());
        let holds = prod == expect;
        js["norm_identity"] = json!(holds);
        text.push_str(&format!("\nI * I^sigma = N(I) O: {holds}"));
        ok &= holds;
    }
    if a.invert {
        match ideal.inverse() {
            Ok(inv) => {
                js["inverse"] = json!(inv.to_string());
                text.push_str(&format!("\ninverse: {inv}"));
            }
            Err(Error::NotInvertible) => {
                js["inverse"] = Value::Null;
                text.push_str("\ninverse: not invertible");
                ok = false;
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(m) = &a.mul {
        let other = parse_ideal_text(&order, m)?;
        let p = ideal.mul(&other)?;
        js["product"] = json!(p.to_string());
        text.push_str(&format!("\nproduct: {p}"));
    }
    Ok(Outcome::verdict(ok, text, js))
}

fn cmd_classify(a: &ClassifyArgs) -> CmdResult {
    let order = QOrder::from_value(a.d)?;
    let pfc = order.satisfies_pfc(a.norm)?;
    let components = count_components(a.d, a.norm)?;
    let ideals = order.primitive_ideals_of_norm(a.norm)?;
    let mut bases = Vec::new();
    let mut text = format!("D = {}, d = {}: prime factor condition {}, components {}", a.d, a.norm, pfc, components);
    for i in &ideals {
        let (e1, e2) = order.smart_basis(i, a.norm)?;
        let ok = order.verify_smart_basis(&e1, &e2, i)?.all();
        text.push_str(&format!("\n{i}: smart basis ({e1}, {e2}) verified {ok}"));
        bases.push(json!({ "ideal": i.to_string(), "eta1": e1.to_string(), "eta2": e2.to_string(), "verified": ok }));
    }
    let js = json!({
        "D": a.d,
        "d": a.norm,
        "pfc": pfc,
        "components": components,
        "ideals": ideals.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        "smart_bases": bases,
    });
    Ok(Outcome::verdict(pfc, text, js))
}

fn context(a: &ContextArgs) -> std::result::Result<ModContext, Error> {
    let order = QOrder::from_value(a.d)?;
    let ideal = match &a.ideal {
        Some(t) => parse_ideal_text(&order, t)?,
        None => order
            .primitive_ideals_of_norm(a.norm)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::CheckFailed(format!("no primitive ideal of norm {} in O_{}", a.norm, a.d)))?,
    };
    if ideal.norm() != BigInt::from(a.norm) {
        return Err(Error::WrongNorm { expected: a.norm, found: ideal.norm().to_string() });
    }
    ModContext::new(&ideal)
}

fn parse_pair(text: &str, d: Disc) -> std::result::Result<GammaElem, Error> {
    let (a, b) = text.split_once(';').ok_or_else(|| usage(format!("expected `A;B`, got `{text}`")))?;
    GammaElem::new(Mat2K::parse(a, d)?, Mat2Z::parse(b)?)
}

fn cmd_group(a: &GroupArgs) -> CmdResult {
    let ctx = context(&a.ctx)?;
    let g = parse_pair(&a.check, ctx.disc())?;
    let lb = ctx.in_gamma_lb(&g);
    let gamma = ctx.in_gamma(&g);
    let ub = ctx.in_gamma_ub(&g);
    let phi = ctx.phi_reduction(g.a()).ok();
    let phi_s = phi.as_ref().map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    let text = format!(
        "ideal {}: lower bound {}, Gamma {}, upper bound {}, phi(A) = {}",
        ctx.ideal(),
        lb,
        gamma,
        ub,
        phi_s.as_ref().map(|p| format!("[{}]", p.join(", "))).unwrap_or_else(|| "undefined".into())
    );
    let js = json!({ "ideal": ctx.ideal().to_string(), "lower_bound": lb, "gamma": gamma, "upper_bound": ub, "phi": phi_s });
    Ok(Outcome::verdict(gamma, text, js))
}

fn qmat_json(m: &QMat) -> Value {
    json!((0..m.rows()).map(|i| m.row(i).iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn qmat_text(m: &QMat) -> String {
    (0..m.rows()).map(|i| m.row(i).iter().map(fmt_rat).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("\n")
}

fn cmd_cocycle(a: &CocycleArgs) -> CmdResult {
    let ctx = context(&a.ctx)?;
    let g = parse_pair(&a.pair, ctx.disc())?;
    let h = match &a.with {
        Some(t) => parse_pair(t, ctx.disc())?,
        None => g.clone(),
    };
    let m = ctx.m_of(&g);
    let integral = m.is_integral();
    let cocycle = &ctx.m_of(&h) * &m == ctx.m_of(&g.mul(&h));
    let mut ok = integral && cocycle;
    let mut js = json!({ "ideal": ctx.ideal().to_string(), "M": qmat_json(&m), "integral": integral, "cocycle": cocycle });
    let mut text = format!("M(A,B) =\n{}\nintegral {}, cocycle {}", qmat_text(&m), integral, cocycle);
    if a.verify_period {
        let p = match ctx.verify_period_identity(&g) {
            Ok(b) => b,
            Err(Error::NotInGamma) => false,
            Err(e) => return Err(e),
        };
        js["period_identity"] = json!(p);
        text.push_str(&format!(", period identity {p}"));
        ok &= p;
    }
    Ok(Outcome::verdict(ok, text, js))
}

fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::Interior(l) => json!({ "interior": l.iter().map(fmt_rat).collect::<Vec<_>>() }),
        Certificate::Separating(v) => json!({ "separating": v.iter().map(fmt_rat).collect::<Vec<_>>() }),
    }
}

fn cmd_admissible(a: &AdmissibleArgs) -> CmdResult {
    let d = disc(a.d)?;
    let ws = parse_pc_list(&a.weights, d)?;
    if ws.is_empty() {
        return Err(usage("no weights"));
    }
    let adm = admissibility(&ws)?;
    let images: Vec<Vec<String>> = adm.images.iter().map(|q| q.iter().map(fmt_rat).collect()).collect();
    let mut text = String::new();
    for (w, q) in ws.iter().zip(&images) {
        text.push_str(&format!("Q{} = ({})\n", w, q.join(", ")));
    }
    text.push_str(&format!("admissible {}\ncertificate: {}", adm.admissible, adm.certificate));
    let js = json!({
        "D": a.d,
        "images": images,
        "admissible": adm.admissible,
        "certificate": certificate_json(&adm.certificate),
        "certificate_verified": adm.certificate.verify(&adm.images),
    });
    Ok(Outcome::verdict(adm.admissible, text, js))
}

fn parse_h(text: &str) -> std::result::Result<QMat, Error> {
    let rows: Vec<Vec<Rat>> = text
        .split(';')
        .map(|r| r.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(usage("h must be a 3x3 matrix `b11,b12,b13;b21,b22,b23;b31,b32,b33`"));
    }
    let m = QMat::from_rows(rows);
    if m != m.transpose() {
        return Err(usage("h must be symmetric"));
    }
    Ok(m)
}

fn parse_points(text: &str) -> std::result::Result<Vec<ProjPoint>, Error> {
    text.split(',').map(ProjPoint::parse).collect()
}

fn weighting(d: i64, weights: &str, kind: StratumKind) -> std::result::Result<Weighting, Error> {
    let ws = parse_pc_list(weights, disc(d)?)?;
    let r: [PCElem; 3] = ws.try_into().map_err(|_| usage("a stratum needs exactly three weights"))?;
    Weighting::new(kind, r)
}

fn check_mode(eqs: &[CrossRatioEq]) -> CheckMode {
    if eqs.iter().all(|e| GaussRat::root_of_unity(&e.phase).is_some()) {
        CheckMode::Exact
    } else {
        CheckMode::Numeric(128)
    }
}

fn cmd_crossratio(a: &CrossratioArgs) -> CmdResult {
    let kind = StratumKind::parse(&a.stratum)?;
    let w = weighting(a.d, &a.weights, kind)?;
    let b = parse_h(&a.h)?;
    let eqs = stratum_equations(&w, &b);
    let kernel = exponent_lattice(&w.dual_basis());
    let mut text = format!("{} stratum, exponent lattice rank {}", kind.name(), kernel.len());
    for e in &eqs {
        text.push_str(&format!("\n{e}"));
    }
    let mut js = json!({
        "stratum": kind.name(),
        "rank": kernel.len(),
        "equations": eqs.iter().map(CrossRatioEq::to_json).collect::<Vec<_>>(),
    });
    let mut ok = true;
    if let Some(p) = &a.point {
        let pts = parse_points(p)?;
        let values = match (kind, pts.len()) {
            (StratumKind::Trinodal, 6) => trinodal_psi(&pts.clone().try_into().expect("six points"))?,
            (StratumKind::NiceNonTrinodal, 8) => {
                let first: [ProjPoint; 4] = pts[..4].to_vec().try_into().expect("four points");
                let second: [ProjPoint; 4] = pts[4..].to_vec().try_into().expect("four points");
                nontrinodal_psi(&first, &second)?
            }
            (k, n) => return Err(usage(format!("{} stratum expects {} points, got {n}", k.name(), if k == StratumKind::Trinodal { 6 } else { 8 }))),
        };
        let mode = check_mode(&eqs);
        let sat = satisfies_values(&values, &eqs, mode)?;
        let mode_s = match mode {
            CheckMode::Exact => "exact".to_string(),
            CheckMode::Numeric(p) => format!("numeric({p})"),
        };
        text.push_str(&format!("\npsi = ({}, {}, {})\non S(h): {} [{}]", values[0], values[1], values[2], sat, mode_s));
        js["psi"] = json!(values.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        js["satisfied"] = json!(sat);
        js["mode"] = json!(mode_s);
        ok = sat;
    }
    Ok(Outcome::verdict(ok, text, js))
}

fn cmd_prym(a: &PrymArgs) -> CmdResult {
    let plus = match a.sign.as_str() {
        "+" | "plus" => true,
        "-" | "minus" => false,
        s => return Err(usage(format!("sign must be + or -, got `{s}`"))),
    };
    let r = prym_pipeline(a.n, plus)?;
    let js = json!({
        "n": a.n,
        "sign": if plus { "+" } else { "-" },
        "D": r.data.d.value(),
        "weights": r.data.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "q_images": r.images.iter().map(|q| q.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "dual_basis": r.dual.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "kernel": r.kernel.iter().map(|k| k.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "checks": r.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
        "equation": r.equation.as_ref().map(CrossRatioEq::to_json),
        "equation_text": r.equation_line(),
    });
    Ok(Outcome::verdict(r.all_passed(), r.to_string(), js))
}

fn cmd_verify(a: &VerifyArgs, seed: u64) -> CmdResult {
    let results = suites::run_named(&a.suite, seed)?;
    let ok = results.iter().all(|r| r.passed);
    let text = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
    let js = json!({
        "seed": seed,
        "suites": results.iter().map(|r| json!({ "name": r.name, "passed": r.passed, "detail": r.detail })).collect::<Vec<_>>(),
    });
    Ok(Outcome::verdict(ok, text, js))
}

fn dispatch(cmd: &Cmd, seed: u64) -> Outcome {
    let r = match cmd {
        Cmd::Ideal(a) => cmd_ideal(a),
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::Group(a) => cmd_group(a),
        Cmd::Cocycle(a) => cmd_cocycle(a),
        Cmd::Admissible(a) => cmd_admissible(a),
        Cmd::Crossratio(a) => cmd_crossratio(a),
        Cmd::Prym(a) => cmd_prym(a),
        Cmd::Verify(a) => cmd_verify(a, seed),
    };
    r.unwrap_or_else(|e| Outcome::error(&e))
}

fn clap_failure(e: clap::Error) -> Outcome {
    use clap::error::ErrorKind;
    let code = match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
        _ => EXIT_USAGE,
    };
    let text = e.render().to_string();
    Outcome { code, text: text.trim_end().to_string(), json: json!({ "error": text.trim_end() }) }
}

/// Runs one batch line. Global flags of the outer invocation act as defaults.
fn run_line(line: &str, json_default: bool, seed_default: u64) -> (Outcome, bool) {
    let Some(words) = shlex::split(line) else {
        return (Outcome::error(&usage(format!("unbalanced quotes in `{line}`"))), json_default);
    };
    let argv = std::iter::once("rmb".to_string()).chain(words);
    match Cli::try_parse_from(argv) {
        Ok(cli) => {
            let json = cli.json || json_default;
            let seed = if cli.seed != 0 { cli.seed } else { seed_default };
            match &cli.cmd {
                Some(cmd) => (dispatch(cmd, seed), json),
                None => (Outcome::error(&usage("missing subcommand")), json),
            }
        }
        Err(e) => (clap_failure(e), json_default),
    }
}

fn emit(out: &mut dyn Write, o: &Outcome, json: bool) {
    let s = if json { o.json.to_string() } else { o.text.clone() };
    let _ = writeln!(out, "{s}");
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let o = clap_failure(e);
            emit(out, &o, false);
            return o.code;
        }
    };
    if let Some(path) = &cli.input {
        let content = match std::fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) => {
                let o = Outcome::error(&usage(format!("cannot read {}: {e}", path.display())));
                emit(out, &o, cli.json);
                return o.code;
            }
        };
        let lines: Vec<&str> = content.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        let results: Vec<(Outcome, bool)> = lines.par_iter().map(|l| run_line(l, cli.json, cli.seed)).collect();
        let mut code = EXIT_OK;
        for (o, json) in &results {
            emit(out, o, *json);
            code = code.max(o.code);
        }
        return code;
    }
    let Some(cmd) = &cli.cmd else {
        let o = Outcome::error(&usage("missing subcommand (try --help)"));
        emit(out, &o, cli.json);
        return EXIT_USAGE;
    };
    let o = dispatch(cmd, cli.seed);
    emit(out, &o, cli.json);
    o.code
}

/// Parses a quadratic element printed by this tool.
pub fn reparse_quad(s: &str, d: i64) -> std::result::Result<QuadElem, Error> {
    parse_quad(s, disc(d)?)
}
