//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation fails on valid input, 2 on
//! a usage error. `UNIVOQUE_MAX_DEPTH` caps every depth argument.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classify::{self, Classification, Reference};
use crate::count;
use crate::dimension::{self, AlphaPeriod, Bracket, MoranRoot};
use crate::error::{Error, Result};
use crate::exactnum::{make_base, rational_from_decimal, to_fixed, Base, PointInJ, Rational};
use crate::expand::{self, Mode};
use crate::scan::{self, ScanConfig};
use crate::sequences::{EpSeq, Word};

pub const MAX_DEPTH_VAR: &str = "UNIVOQUE_MAX_DEPTH";

#[derive(Parser, Debug)]
#[command(
    name = "univoque",
    version,
    about = "Expansions in non-integer bases and the univoque set"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy or quasi-greedy digits of x in base q
    Expand(ExpandArgs),
    /// Quasi-greedy expansion of 1
    Alpha(BaseDepthArgs),
    /// Greedy expansion of 1
    Beta(BaseDepthArgs),
    /// Admissibility, uniqueness and closure tests
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Number of feasible digit prefixes of x at a given depth
    Count(PointArgs),
    /// List the feasible digit prefixes of x at a given depth
    Enumerate(EnumerateArgs),
    /// Moran-equation dimensions and related roots
    #[command(subcommand)]
    Dimension(DimensionCommand),
    /// Rasterize a region of the (x, q) plane
    Scan(ScanArgs),
    /// Run built-in consistency checks
    Selftest(JsonFlag),
}

#[derive(Args, Debug, Clone)]
struct JsonFlag {
    /// Print JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Clone)]
struct BaseArgs {
    /// Base q > 1 (decimal or p/s)
    #[arg(long)]
    q: String,
    /// Error bound on q, for a base known only approximately
    #[arg(long)]
    error: Option<String>,
}

impl BaseArgs {
    fn base(&self) -> Result<Base> {
        let q = rational_from_decimal(&self.q)?;
        match &self.error {
            Some(e) => Base::approximate(q, rational_from_decimal(e)?),
            None => make_base(q),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PointArgs {
    /// The point x (decimal or p/s)
    #[arg(long)]
    x: String,
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    #[command(flatten)]
    json: JsonFlag,
}

impl PointArgs {
    fn point(&self) -> Result<PointInJ> {
        PointInJ::new(rational_from_decimal(&self.x)?, self.base.base()?)
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Greedy,
    QuasiGreedy,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Greedy => Mode::Greedy,
            ModeArg::QuasiGreedy => Mode::QuasiGreedy,
        }
    }
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Greedy)]
    mode: ModeArg,
    /// Look for an eventually periodic form within `depth` digits
    #[arg(long)]
    periodic: bool,
}

#[derive(Args, Debug)]
struct BaseDepthArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    #[command(flatten)]
    json: JsonFlag,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Maximum number of prefixes to list
    #[arg(long, default_value_t = 1000)]
    cap: usize,
}

/// A reference sequence given either exactly or as α of a base.
#[derive(Args, Debug, Clone)]
struct ReferenceArgs {
    /// α as an eventually periodic sequence, e.g. "(10)"
    #[arg(long, conflicts_with = "alpha_of")]
    alpha: Option<String>,
    /// Use α(q) of this base instead
    #[arg(long)]
    alpha_of: Option<String>,
    /// Digits of α(q) to compute with --alpha-of
    #[arg(long, default_value_t = count::ALPHA_LEN)]
    alpha_len: usize,
}

impl ReferenceArgs {
    fn reference(&self, depth_cap: Option<usize>) -> Result<Reference> {
        match (&self.alpha, &self.alpha_of) {
            (Some(a), _) => Ok(Reference::Exact(a.parse()?)),
            (None, Some(q)) => {
                let base = make_base(rational_from_decimal(q)?)?;
                classify::alpha_reference(&base, cap_depth(self.alpha_len, depth_cap))
            }
            (None, None) => Err(Error::InvalidConfig(
                "one of --alpha or --alpha-of is required".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct SeqRefArgs {
    /// The sequence, e.g. "0(11)" or "1,1(1,0)"
    #[arg(long)]
    seq: String,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    json: JsonFlag,
}

#[derive(Subcommand, Debug)]
enum ClassifyCommand {
    /// Quasi-greedy admissibility of a sequence
    QuasiGreedy(SeqRefArgs),
    /// Greedy admissibility of a sequence
    Greedy(SeqRefArgs),
    /// Whether a sequence is the unique expansion of its value
    Unique(SeqRefArgs),
    /// The conjugated-tail condition against α
    V(SeqRefArgs),
    /// The conjugated-tail condition against β
    VBeta {
        #[arg(long)]
        seq: String,
        /// β as an eventually periodic sequence, e.g. "11(0)"
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Membership of (x, q) in the closure of the univoque set
    Closure(PointArgs),
    /// Membership of (x, m) in the part of the closure outside J
    OutsideJ {
        #[arg(long)]
        x: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// The two digit implications defining D_m'
    DM {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Whether a word occurs in the greedy expansion of x
    Word {
        #[arg(long)]
        word: String,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Uniqueness by branch enumeration
    Bruteforce(PointArgs),
}

#[derive(Args, Debug, Clone)]
struct ToleranceArgs {
    /// Bisection tolerance
    #[arg(long, default_value = "1/1000000000000")]
    tolerance: String,
    /// Decimal places in the printed result
    #[arg(long, default_value_t = 10)]
    places: usize,
    #[command(flatten)]
    json: JsonFlag,
}

impl ToleranceArgs {
    fn tolerance(&self) -> Result<Rational> {
        rational_from_decimal(&self.tolerance)
    }
}

#[derive(Subcommand, Debug)]
enum DimensionCommand {
    /// Dimension of the set with α-period ap, viewed in base q
    G {
        /// The period α_1 … α_n, e.g. "10" or "2,1"
        #[arg(long)]
        alpha_period: String,
        #[command(flatten)]
        base: BaseArgs,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Dimension of I_q for q between the tribonacci constant and 2
    I {
        #[arg(long)]
        q: String,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Upper bound for the dimension after forbidding a word
    Bound {
        #[arg(long)]
        q: String,
        /// Block lengths m_1,…,m_k
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<usize>,
        /// Prefix length n (defaults to the smallest admissible one)
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// The root q_m in (m, m+1) of m/q + 1/q² = 1
    Qm {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    x_min: Option<String>,
    #[arg(long)]
    x_max: Option<String>,
    #[arg(long)]
    q_min: Option<String>,
    #[arg(long)]
    q_max: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    height: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// pgm or csv
    #[arg(long)]
    format: Option<String>,
    /// exact or decimal CSV coordinates
    #[arg(long)]
    values: Option<String>,
    /// nodes or centers
    #[arg(long)]
    sampling: Option<String>,
    #[command(flatten)]
    json: JsonFlag,
}

impl ScanArgs {
    fn config(&self, depth_cap: Option<usize>) -> Result<ScanConfig> {
        let mut cfg = ScanConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("x_min", &self.x_min),
            ("x_max", &self.x_max),
            ("q_min", &self.q_min),
            ("q_max", &self.q_max),
            ("width", &self.width),
            ("height", &self.height),
            ("depth", &self.depth),
            ("output", &self.output),
            ("format", &self.format),
            ("values", &self.values),
            ("sampling", &self.sampling),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.depth = cap_depth(cfg.depth, depth_cap);
        Ok(cfg)
    }
}

fn cap_depth(depth: usize, cap: Option<usize>) -> usize {
    cap.map_or(depth, |c| depth.min(c))
}

fn depth_cap_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(MAX_DEPTH_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{MAX_DEPTH_VAR}='{v}' is not a nonnegative integer")),
        Err(_) => Ok(None),
    }
}

/// Output of one command, rendered as text or JSON.
struct Report {
    text: String,
    json: serde_json::Value,
}

impl Report {
    fn new(text: impl Into<String>, json: serde_json::Value) -> Report {
        Report {
            text: text.into(),
            json,
        }
    }
}

fn classification_report(c: Classification) -> Report {
    Report::new(
        c.to_string(),
        serde_json::to_value(c).expect("serializable"),
    )
}

fn root_report(inputs: serde_json::Value, root: &MoranRoot, places: usize) -> Report {
    let s = format!("{:.places$}", root.s);
    Report::new(
        s.clone(),
        json!({
            "inputs": inputs,
            "t_root": { "lo": root.t.lo.to_string(), "hi": root.t.hi.to_string() },
            "s": s,
            "s_lo": root.s_lo,
            "s_hi": root.s_hi,
        }),
    )
}

fn bracket_report(inputs: serde_json::Value, b: &Bracket, places: usize) -> Report {
    let v = to_fixed(&b.mid(), places);
    Report::new(
        v.clone(),
        json!({
            "inputs": inputs,
            "root": { "lo": b.lo.to_string(), "hi": b.hi.to_string() },
            "value": v,
        }),
    )
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let cap = match depth_cap_from_env() {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    match execute(cli.command, cap, out) {
        Ok(()) => 0,
        Err(e @ (Error::InvalidConfig(_) | Error::Parse { .. })) => {
            let msg = e.to_string();
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit(out: &mut dyn Write, json: bool, r: Report) -> Result<()> {
    if json {
        writeln!(out, "{}", r.json)?;
    } else {
        writeln!(out, "{}", r.text)?;
    }
    Ok(())
}

fn execute(cmd: Command, cap: Option<usize>, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Expand(a) => {
            let p = a.point.point()?;
            let depth = cap_depth(a.point.depth, cap);
            let mode = Mode::from(a.mode);
            if a.periodic {
                let found = expand::detect_period(&p, mode, depth)?;
                let text = found
                    .as_ref()
                    .map_or_else(|| "none".to_string(), EpSeq::to_string);
                let r = Report::new(
                    text.clone(),
                    json!({ "mode": mode.to_string(), "sequence": found.map(|s| s.to_string()) }),
                );
                return emit(out, a.point.json.json, r);
            }
            let e = expand::expansion_prefix(&p, mode, depth)?;
            let r = Report::new(
                e.digits.to_string(),
                json!({
                    "mode": mode.to_string(),
                    "digits": e.digits.to_string(),
                    "depth": e.depth,
                    "remainder": e.remainder.to_string(),
                }),
            );
            emit(out, a.point.json.json, r)
        }
        Command::Alpha(a) => one_expansion(&a, Mode::QuasiGreedy, cap, out),
        Command::Beta(a) => one_expansion(&a, Mode::Greedy, cap, out),
        Command::Classify(c) => classify_command(c, cap, out),
        Command::Count(a) => {
            let n = count::count_expansions(&a.point()?, cap_depth(a.depth, cap))?;
            emit(
                out,
                a.json.json,
                Report::new(n.to_string(), json!({ "count": n.to_string() })),
            )
        }
        Command::Enumerate(a) => {
            let depth = cap_depth(a.point.depth, cap);
            let e = count::enumerate_prefixes(&a.point.point()?, depth, a.cap)?;
            let words: Vec<String> = e.prefixes.iter().map(Word::to_string).collect();
            let mut text = words.join("\n");
            if e.overflow {
                text.push_str(&format!("\n… more than {} prefixes", a.cap));
            }
            emit(
                out,
                a.point.json.json,
                Report::new(text, json!({ "prefixes": words, "overflow": e.overflow })),
            )
        }
        Command::Dimension(d) => dimension_command(d, out),
        Command::Scan(a) => {
            let cfg = a.config(cap)?;
            let result = scan::scan(&cfg)?;
            result.write_file()?;
            let counts: serde_json::Map<String, serde_json::Value> = result
                .counts()
                .into_iter()
                .map(|(k, v)| (k.name().to_string(), v.into()))
                .collect();
            let text = counts
                .iter()
                .map(|(k, v)| format!("{k} {v}"))
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                out,
                a.json.json,
                Report::new(
                    format!("wrote {}\n{text}", cfg.output.display()),
                    json!({ "output": cfg.output.display().to_string(), "counts": counts }),
                ),
            )
        }
        Command::Selftest(j) => {
            let results = selftest();
            let failed = results.iter().filter(|(_, ok)| !ok).count();
            if j.json {
                let rows: Vec<_> = results
                    .iter()
                    .map(|(n, ok)| json!({ "check": n, "pass": ok }))
                    .collect();
                writeln!(out, "{}", serde_json::Value::Array(rows))?;
            } else {
                for (name, ok) in &results {
                    writeln!(out, "{} {name}", if *ok { "PASS" } else { "FAIL" })?;
                }
            }
            if failed > 0 {
                return Err(Error::Postcondition(format!(
                    "{failed} self-test checks failed"
                )));
            }
            Ok(())
        }
    }
}

fn one_expansion(
    a: &BaseDepthArgs,
    mode: Mode,
    cap: Option<usize>,
    out: &mut dyn Write,
) -> Result<()> {
    let base = a.base.base()?;
    let depth = cap_depth(a.depth, cap);
    let digits = match mode {
        Mode::QuasiGreedy if !base.is_exact() => expand::alpha_prefix_certified(&base, depth),
        Mode::QuasiGreedy => expand::alpha_prefix(&base, depth)?,
        Mode::Greedy => expand::beta_prefix(&base, depth)?,
    };
    let finite = match mode {
        Mode::Greedy => expand::finite_beta(&base, depth)?.map(|(n, _)| n),
        Mode::QuasiGreedy => None,
    };
    let r = Report::new(
        digits.to_string(),
        json!({ "q": base.to_string(), "mode": mode.to_string(), "digits": digits.to_string(), "finite_length": finite }),
    );
    emit(out, a.json.json, r)
}

fn classify_command(c: ClassifyCommand, cap: Option<usize>, out: &mut dyn Write) -> Result<()> {
    let (json, r) = match c {
        ClassifyCommand::QuasiGreedy(a) => {
            let s: EpSeq = a.seq.parse()?;
            (
                a.json.json,
                classify::is_quasi_greedy_admissible(&s, &a.reference.reference(cap)?)?,
            )
        }
        ClassifyCommand::Greedy(a) => {
            let s: EpSeq = a.seq.parse()?;
            (
                a.json.json,
                classify::is_greedy_admissible(&s, &a.reference.reference(cap)?)?,
            )
        }
        ClassifyCommand::Unique(a) => {
            let s: EpSeq = a.seq.parse()?;
            (
                a.json.json,
                classify::is_unique_expansion(&s, &a.reference.reference(cap)?)?,
            )
        }
        ClassifyCommand::V(a) => {
            let s: EpSeq = a.seq.parse()?;
            (
                a.json.json,
                classify::in_v(&s, &a.reference.reference(cap)?)?,
            )
        }
        ClassifyCommand::VBeta { seq, beta, json } => {
            let s: EpSeq = seq.parse()?;
            (
                json.json,
                classify::in_v_beta_form(&s, &Reference::Exact(beta.parse()?))?,
            )
        }
        ClassifyCommand::Closure(a) => (
            a.json.json,
            classify::in_closure_u(&a.point()?, cap_depth(a.depth, cap))?,
        ),
        ClassifyCommand::OutsideJ { x, m, depth, json } => {
            let x = rational_from_decimal(&x)?;
            let r = classify::closure_minus_j_member(&x, m, cap_depth(depth, cap))?;
            let seq = r.sequence.as_ref().map(EpSeq::to_string);
            let mut text = r.classification.to_string();
            if let Some(s) = &seq {
                text.push_str(&format!(" {s}"));
            }
            let mut v = serde_json::to_value(r.classification).expect("serializable");
            v["sequence"] = json!(seq);
            return emit(out, json.json, Report::new(text, v));
        }
        ClassifyCommand::DM { seq, m, json } => {
            let s: EpSeq = seq.parse()?;
            (json.json, classify::d_m_membership(&s, m)?)
        }
        ClassifyCommand::Word { word, point } => {
            let w: Word = word.parse()?;
            (
                point.json.json,
                classify::word_occurs(&w, &point.point()?, cap_depth(point.depth, cap))?,
            )
        }
        ClassifyCommand::Bruteforce(a) => (
            a.json.json,
            count::is_unique_bruteforce(&a.point()?, cap_depth(a.depth, cap))?,
        ),
    };
    emit(out, json, classification_report(r))
}

fn dimension_command(d: DimensionCommand, out: &mut dyn Write) -> Result<()> {
    match d {
        DimensionCommand::G {
            alpha_period,
            base,
            tol,
        } => {
            let ap: AlphaPeriod = alpha_period.parse()?;
            let b = base.base()?;
            let root = dimension::dim_g(&ap, &b, &tol.tolerance()?)?;
            let inputs = json!({ "alpha_period": ap.word().to_string(), "q": b.to_string() });
            emit(out, tol.json.json, root_report(inputs, &root, tol.places))
        }
        DimensionCommand::I { q, tol } => {
            let q = rational_from_decimal(&q)?;
            let (n, root) = dimension::dim_i(&q, &tol.tolerance()?)?;
            let inputs = json!({ "q": q.to_string(), "N": n });
            emit(out, tol.json.json, root_report(inputs, &root, tol.places))
        }
        DimensionCommand::Bound { q, blocks, n, tol } => {
            let b = make_base(rational_from_decimal(&q)?)?;
            let n = match n {
                Some(n) => n,
                None => dimension::minimal_n(b.q(), &blocks, 4096)?,
            };
            let root = dimension::thm28_bound(&b, blocks.len(), n, &blocks, &tol.tolerance()?)?;
            let inputs =
                json!({ "q": b.q().to_string(), "k": blocks.len(), "n": n, "blocks": blocks });
            emit(out, tol.json.json, root_report(inputs, &root, tol.places))
        }
        DimensionCommand::Qm { m, tol } => {
            let r = dimension::q_m_root(m, &tol.tolerance()?)?;
            emit(
                out,
                tol.json.json,
                bracket_report(json!({ "m": m }), &r, tol.places),
            )
        }
    }
}

/// Quick checks against hand-verifiable values.
pub fn selftest() -> Vec<(&'static str, bool)> {
    fn check(f: impl FnOnce() -> Result<bool>) -> bool {
        f().unwrap_or(false)
    }
    let three_halves = || make_base(rational_from_decimal("3/2")?);
    vec![
        (
            "greedy expansion of 1 in base 3/2",
            check(|| {
                let p = PointInJ::new(rational_from_decimal("1")?, three_halves()?)?;
                Ok(expand::greedy_prefix(&p, 9)?.digits.to_string() == "101000001")
            }),
        ),
        (
            "unique expansion (01) in base 2",
            check(|| {
                let c = classify::is_unique_expansion(
                    &"(01)".parse()?,
                    &Reference::Exact("(1)".parse()?),
                )?;
                Ok(c.is_yes())
            }),
        ),
        (
            "golden ratio word system",
            check(|| {
                let ws = dimension::words_w(&"10".parse()?);
                Ok(ws.iter().map(Word::to_string).collect::<Vec<_>>() == ["0", "10"])
            }),
        ),
        (
            "two binary expansions of 1/2",
            check(|| {
                let p = PointInJ::new(
                    rational_from_decimal("1/2")?,
                    make_base(rational_from_decimal("2")?)?,
                )?;
                Ok(count::count_expansions(&p, 10)? == 2u32.into())
            }),
        ),
        (
            "q_2 = 1 + sqrt 2",
            check(|| {
                let r = dimension::q_m_root(2, &rational_from_decimal("1/1000000000000")?)?;
                Ok((r.approx() - (1.0 + 2f64.sqrt())).abs() < 1e-10)
            }),
        ),
        (
            "3/2 lies in D_2 via 2(1)",
            check(|| {
                let r = classify::closure_minus_j_member(&rational_from_decimal("3/2")?, 2, 64)?;
                Ok(r.classification.is_yes())
            }),
        ),
    ]
}
