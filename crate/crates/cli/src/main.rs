use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lorentz_forge::fourier::{coeffs_2d, CoeffMatrix, OrthonormalSystem, SystemKind};
use lorentz_forge::interpolation::{constant_d, interp_norm, k_upper, ThetaPoint};
use lorentz_forge::norms::{
    discrete_grand_norm_p6, grand_lorentz_norm, grand_seq_norm, logweight_sup_norm, lorentz_norm, mixed_lebesgue_norm,
    ApproxDirection, Exponents, GrandParams, P6Config, SeqSign,
};
use lorentz_forge::rearrange::Sequence2D;
use lorentz_forge::verify::report::{all_gated_pass, fmt_num, write_jsonl, write_summary_csv, CheckReport};
use lorentz_forge::verify::{run_suite, Suite, Thresholds, VerifyConfig};
use lorentz_forge::{DyadicStep2D, Error};

const THREADS_ENV: &str = "LORENTZ_FORGE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "lorentz-forge", version, about = "Rearrangements, Lorentz norms and Fourier coefficients of dyadic step functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one norm of a grid (or of a coefficient dump for seq_grand)
    Norm(NormArgs),
    /// Dump Fourier coefficients of a grid
    Coeffs(CoeffsArgs),
    /// K-functional terms and the discretized interpolation norm
    Interp(InterpArgs),
    /// Run a verification suite and write its reports
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum NormKind {
    Lorentz,
    Grand,
    Mixed,
    #[value(name = "seq_grand")]
    SeqGrand,
    Logweight,
    P6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SystemArg {
    Trig,
    Walsh,
}

impl From<SystemArg> for SystemKind {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Trig => SystemKind::Trig,
            SystemArg::Walsh => SystemKind::Walsh,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct InputArgs {
    /// Grid file {"levels":[n1,n2],"values":[[...],...]}, rows are x₂-slices
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Refine the input grid to these levels first
    #[arg(long, num_args = 2, value_names = ["N1", "N2"])]
    level: Option<Vec<u32>>,
    /// Output file (stdout when absent)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct NormArgs {
    #[arg(long, value_enum)]
    kind: NormKind,
    /// Integrability exponents p₁ p₂ (`inf` allowed)
    #[arg(long, num_args = 2, value_names = ["P1", "P2"], default_values_t = [2.0, 2.0])]
    #[serde(serialize_with = "ser_exponents")]
    p: Vec<f64>,
    /// Secondary exponents q₁ q₂ (`inf` allowed)
    #[arg(long, num_args = 2, value_names = ["Q1", "Q2"], default_values_t = [2.0, 2.0])]
    #[serde(serialize_with = "ser_exponents")]
    q: Vec<f64>,
    /// θ₁ θ₂; both ≥ 0 selects the sup form, both < 0 the inf form
    #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true, default_values_t = [0.0, 0.0])]
    theta: Vec<f64>,
    /// ε shift sign of the sequence norm
    #[arg(long, value_enum, default_value_t = Sign::Minus)]
    sign: Sign,
    /// Depth of the ε grid 2^{-j}, j = 0..=J
    #[arg(long = "J", default_value_t = GrandParams::DEFAULT_EPS_J)]
    j: u32,
    #[command(flatten)]
    io: InputArgs,
}

#[derive(Args, Debug, Serialize)]
struct CoeffsArgs {
    /// System per axis; one value applies to both
    #[arg(long, value_enum, num_args = 1..=2, default_values_t = [SystemArg::Walsh])]
    system: Vec<SystemArg>,
    /// Truncation K₁ K₂ (default: 2^level for walsh, 2^{level+2} for trig)
    #[arg(long = "K", num_args = 2, value_names = ["K1", "K2"])]
    k: Option<Vec<usize>>,
    #[command(flatten)]
    io: InputArgs,
}

#[derive(Args, Debug, Serialize)]
struct InterpArgs {
    #[arg(long, num_args = 2, value_names = ["T1", "T2"], default_values_t = [0.5, 0.5])]
    theta: Vec<f64>,
    #[arg(long, num_args = 2, value_names = ["Q1", "Q2"], default_values_t = [2.0, 2.0])]
    #[serde(serialize_with = "ser_exponents")]
    q: Vec<f64>,
    /// t-grid 2^k, |k| ≤ J
    #[arg(long = "J", default_value_t = 10)]
    j: u32,
    /// Also report the four decomposition terms at (t₁, t₂)
    #[arg(long, num_args = 2, value_names = ["T1", "T2"])]
    t: Option<Vec<f64>>,
    #[command(flatten)]
    io: InputArgs,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// karamata, mink, hardy, le3, te3, te4, thm5, embeddings or all
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// JSON-lines report; the CSV summary and plot data go next to it
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Thresholds file replacing the shipped defaults
    #[arg(long, value_name = "PATH")]
    thresholds: Option<PathBuf>,
    /// Depth of the ε grid for grand norms
    #[arg(long = "J", default_value_t = GrandParams::DEFAULT_EPS_J)]
    j: u32,
}

fn ser_exponents<S: serde::Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&x| num(x)))
}

/// Failure with a process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::WalshResolution { .. }) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn pair<T: Copy>(v: &[T]) -> [T; 2] {
    [v[0], v[1]]
}

/// Header line: the resolved config and a hash over it and the input bytes.
fn header(command: &str, config: &impl Serialize, input: Option<&[u8]>) -> Value {
    let config = serde_json::to_value(config).unwrap_or(Value::Null);
    let mut h = Sha256::new();
    h.update(config.to_string().as_bytes());
    if let Some(bytes) = input {
        h.update(bytes);
    }
    json!({
        "kind": "header",
        "tool": "lorentz-forge",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "content_hash": hex::encode(h.finalize()),
    })
}

fn read_input(io: &InputArgs) -> Result<(Vec<u8>, DyadicStep2D), Failure> {
    let bytes = fs::read(&io.input).map_err(|e| fail(format!("cannot read {}: {e}", io.input.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| fail(format!("{} is not UTF-8", io.input.display())))?;
    let mut f = DyadicStep2D::from_json(text)?;
    if let Some(l) = &io.level {
        f = f.refine(pair(l))?;
    }
    Ok((bytes, f))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_line(fields: &[String]) -> String {
    fields.iter().map(|f| if f.contains(',') { format!("\"{f}\"") } else { f.clone() }).collect::<Vec<_>>().join(",")
}

/// Renders `record` (a flat JSON object) as JSON or as a header + row CSV.
fn render(record: &Value, format: Format, header_line: &Value) -> String {
    match format {
        Format::Json => format!("{header_line}\n{record}\n"),
        Format::Csv => {
            let obj = record.as_object().expect("flat record");
            let keys: Vec<String> = obj.keys().cloned().collect();
            let vals: Vec<String> = obj
                .values()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            format!("{}\n{}\n", csv_line(&keys), csv_line(&vals))
        }
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_num(v))
    }
}

fn seq_from_input(bytes: &[u8], f: &DyadicStep2D) -> Result<Sequence2D, Failure> {
    if let Ok(dump) = CoeffMatrix::from_dump_json(std::str::from_utf8(bytes).unwrap_or_default()) {
        return Ok(dump.magnitudes());
    }
    // grid cell (j₁, j₂) becomes entry (m₁, m₂) = (j₁+1, j₂+1)
    let (w, h) = (f.width(), f.height());
    Ok(Sequence2D::new([w, h], (0..w).flat_map(|j1| (0..h).map(move |j2| f.get(j1, j2))).collect())?)
}

fn cmd_norm(a: &NormArgs) -> Result<u8, Failure> {
    let bytes = fs::read(&a.io.input).map_err(|e| fail(format!("cannot read {}: {e}", a.io.input.display())))?;
    let (p, q, theta) = (pair(&a.p), pair(&a.q), pair(&a.theta));
    let e = Exponents::new(p, q)?;
    let g = GrandParams::new(theta).with_eps_j(a.j);
    // a coefficient dump is only meaningful for the sequence norm
    let grid = read_input(&a.io);
    let (value, direction, argmax) = match a.kind {
        NormKind::SeqGrand => {
            let seq = match &grid {
                Ok((_, f)) => seq_from_input(&bytes, f)?,
                Err(_) => CoeffMatrix::from_dump_json(std::str::from_utf8(&bytes).unwrap_or_default())?.magnitudes(),
            };
            let sign = if a.sign == Sign::Plus { SeqSign::Plus } else { SeqSign::Minus };
            let v = grand_seq_norm(&seq, &e, &g, sign)?;
            (v.value, v.direction, Some(v.argmax_eps))
        }
        kind => {
            let (_, f) = grid?;
            match kind {
                NormKind::Lorentz => (lorentz_norm(&f, &e), ApproxDirection::Exact, None),
                NormKind::Mixed => (mixed_lebesgue_norm(&f, p), ApproxDirection::Exact, None),
                NormKind::Grand => {
                    let v = grand_lorentz_norm(&f, &e, &g)?;
                    (v.value, v.direction, Some(v.argmax_eps))
                }
                NormKind::Logweight => (logweight_sup_norm(&f, p, theta)?, ApproxDirection::Exact, None),
                NormKind::P6 => (discrete_grand_norm_p6(&f, &e, theta, &P6Config::default())?, ApproxDirection::Exact, None),
                NormKind::SeqGrand => unreachable!(),
            }
        }
    };
    let mut record = json!({
        "norm": a.kind,
        "p": p.map(num),
        "q": q.map(num),
        "value": num(value),
        "approx_direction": direction,
    });
    if matches!(a.kind, NormKind::Grand | NormKind::SeqGrand | NormKind::Logweight | NormKind::P6) {
        record["theta"] = json!(theta);
    }
    if matches!(a.kind, NormKind::Grand | NormKind::SeqGrand) {
        record["epsJ"] = json!(a.j);
        record["argmax_eps"] = json!(argmax);
    }
    if a.kind == NormKind::SeqGrand {
        record["sign"] = json!(a.sign);
    }
    emit(&a.io.out, &render(&record, a.io.format, &header("norm", a, Some(&bytes))))?;
    Ok(0)
}

fn cmd_coeffs(a: &CoeffsArgs) -> Result<u8, Failure> {
    let (bytes, f) = read_input(&a.io)?;
    let kinds: [SystemKind; 2] = [a.system[0].into(), (*a.system.last().unwrap()).into()];
    let sys = kinds.map(OrthonormalSystem::of);
    let k = match &a.k {
        Some(k) => pair(k),
        None => [sys[0].default_truncation(f.levels()[0]), sys[1].default_truncation(f.levels()[1])],
    };
    let c = coeffs_2d(&f, sys, k)?;
    let norm2 = mixed_lebesgue_norm(&f, [2.0, 2.0]).powi(2);
    let gap = norm2 - c.sum_sq();
    let label = if kinds == [SystemKind::Walsh; 2] && k == [f.width(), f.height()] {
        "parseval residual"
    } else {
        "bessel gap"
    };
    eprintln!("{label}: {:e}", gap.abs());
    let text = match a.io.format {
        Format::Json => format!("{}\n", c.to_dump_json()?),
        Format::Csv => {
            let mut s = String::from("k1,k2,re,im,abs\n");
            for k1 in 0..k[0] {
                for k2 in 0..k[1] {
                    let z = c.get(k1, k2);
                    s.push_str(&format!("{},{},{},{},{}\n", k1 + 1, k2 + 1, z.re, z.im, z.norm()));
                }
            }
            s
        }
    };
    let _ = bytes;
    emit(&a.io.out, &text)?;
    Ok(0)
}

fn cmd_interp(a: &InterpArgs) -> Result<u8, Failure> {
    let (bytes, f) = read_input(&a.io)?;
    let (theta, q) = (pair(&a.theta), pair(&a.q));
    let tp = ThetaPoint::from_theta(theta)?;
    let d = constant_d(theta, q)?;
    let lor = lorentz_norm(&f, &Exponents::new(tp.p, q)?);
    let mut record = json!({
        "theta": theta,
        "q": q.map(num),
        "J": a.j,
        "p": tp.p,
        "D": num(d),
        "interp_norm": num(interp_norm(&f, theta, q, a.j)?),
        "lorentz_norm": num(lor),
        "bound_6D_lorentz": num(6.0 * d * lor),
    });
    if let Some(t) = &a.t {
        let k = k_upper(&f, t[0], t[1])?;
        record["t"] = json!(t);
        record["T00"] = num(k.t00);
        record["T10"] = num(k.t10);
        record["T01"] = num(k.t01);
        record["T11"] = num(k.t11);
        record["K_hat"] = num(k.k_hat());
    }
    emit(&a.io.out, &render(&record, a.io.format, &header("interp", a, Some(&bytes))))?;
    Ok(0)
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

/// Te3 sweep data for plotting maxRatio against θ̄ with the D(θ̄) overlay.
fn write_plot_csv(path: &Path, reports: &[CheckReport]) -> Result<(), Failure> {
    let mut s = String::from("check_id,system,theta,q,D,max_ratio\n");
    for r in reports.iter().filter(|r| matches!(r.check_id.as_str(), "te3" | "interp")) {
        let get = |k: &str| r.param_point.get(k).cloned().unwrap_or_default();
        s.push_str(&csv_line(&[
            r.check_id.clone(),
            get("system"),
            get("theta"),
            get("q"),
            get("D"),
            fmt_num(r.max_ratio),
        ]));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    let suite: Suite = a.suite.parse().map_err(|e: Error| fail(e.to_string()))?;
    let thresholds = match &a.thresholds {
        Some(p) => Thresholds::from_toml_str(&fs::read_to_string(p).map_err(|e| fail(format!("{}: {e}", p.display())))?)?,
        None => Thresholds::default(),
    };
    let cfg = VerifyConfig { eps_j: a.j, thresholds, ..VerifyConfig::new(a.seed) };
    let reports = run_suite(suite, &cfg)?;

    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("verify-{}-seed{}.jsonl", suite.name(), a.seed)));
    let head = header("verify", &json!({ "suite": suite.name(), "verify": cfg }), None);
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &head, &reports)?;
    fs::write(&out, buf)?;
    let mut csv = Vec::new();
    write_summary_csv(&mut csv, &reports)?;
    fs::write(sibling(&out, "csv"), csv)?;
    write_plot_csv(&sibling(&out, "plot.csv"), &reports)?;

    let mut stdout = io::stdout().lock();
    for r in &reports {
        let status = match (r.pass, r.gated) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        writeln!(stdout, "{status} {} {} max_ratio={} threshold={}", r.check_id, r.param_string(), fmt_num(r.max_ratio), fmt_num(r.pass_threshold))?;
    }
    let ok = all_gated_pass(&reports);
    let gated = reports.iter().filter(|r| r.gated).count();
    let failed = reports.iter().filter(|r| r.gated && !r.pass).count();
    writeln!(stdout, "{}: {gated} gated reports, {failed} failed; report written to {}", suite.name(), out.display())?;
    Ok(if ok { 0 } else { 1 })
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| fail(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(fail(format!("{THREADS_ENV} must be positive")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| fail(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Norm(a) => cmd_norm(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Interp(a) => cmd_interp(a),
        Command::Verify(a) => cmd_verify(a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
