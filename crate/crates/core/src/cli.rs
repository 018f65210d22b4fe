//! Command-line front end. Every verb produces a JSON report on stdout and
//! a short table on stderr; exit codes are 0 (ok), 1 (fail) and 2 (error).

use std::ffi::OsString;
use std::io::{Read, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cohomology::{
    binomial, cech_vs_group_cohomology, finite_group_cohomology, polydisc_cohomology, smallest_prime_not_dividing,
};
use crate::covers::{classify_covers, galois_correspondence_check, LogPoint};
use crate::error::{Error, Result};
use crate::fault::{inject, Fault};
use crate::io::{
    ambient_to_json, finite_group_to_json, int_to_json, matrix_to_json, monoid_to_json, parse_input,
    presentation_to_json, vector_to_json, vectors_to_json, Input,
};
use crate::monoid::{integralize, AffineMonoid};
use crate::morphism::{
    chart_classification, is_exact, kummer_conditions, pushout_with_mode, ramification_index, MonoidHom,
    PushoutMode, PushoutOutput,
};
use crate::verify::{run_criterion, Scale, SuiteConfig, CRITERIA, DEFAULT_SEED};
use crate::zlattice::{FiniteAbelianGroup, Int};

#[derive(Parser, Debug)]
#[command(name = "logchart", version, about = "Exact monoid computations for log charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Saturation and Hilbert basis of a monoid or presentation.
    Saturate(InputArg),
    /// Fine / sharp / saturated flags of a monoid or presentation.
    Classify(InputArg),
    /// Chart conditions of a homomorphism at a residue characteristic.
    CheckChart {
        #[arg(long)]
        hom: String,
        #[arg(long = "residue-char", default_value_t = 0)]
        residue_char: u64,
    },
    /// Amalgamated sum of two maps out of a common monoid.
    Pushout {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Fs)]
        mode: ModeArg,
    },
    /// Kummer étale covers of a log point.
    #[command(subcommand)]
    Covers(CoversCommand),
    /// Group, Čech and polydisc cohomology.
    #[command(subcommand)]
    Cohomology(CohomologyCommand),
    /// Runs the acceptance battery.
    VerifySuite {
        #[arg(long, value_enum, default_value_t = ScaleArg::Smoke)]
        scale: ScaleArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Only these criteria (1-8); all by default.
        #[arg(long)]
        criterion: Vec<u8>,
        #[arg(long = "inject-fault", value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Args, Debug)]
pub struct InputArg {
    /// JSON file; `-` or nothing reads standard input.
    pub input: Option<String>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub monoid: String,
    #[arg(long)]
    pub annihilator: u64,
    #[arg(long = "exclude-prime")]
    pub exclude_prime: Vec<u64>,
}

#[derive(Subcommand, Debug)]
pub enum CoversCommand {
    Classify(PointArgs),
    Check(PointArgs),
}

#[derive(Subcommand, Debug)]
pub enum CohomologyCommand {
    Group {
        #[arg(long, value_delimiter = ',', required = true)]
        invariants: Vec<u64>,
        #[arg(long = "char")]
        characteristic: u64,
        #[arg(long = "max-degree", default_value_t = 4)]
        max_degree: usize,
    },
    Cech {
        #[arg(long)]
        hom: String,
        /// Defaults to the smallest prime not dividing the Galois group order.
        #[arg(long = "char")]
        characteristic: Option<u64>,
        #[arg(long = "degree-bound", default_value_t = 12)]
        degree_bound: i64,
        /// Number of terms of the augmented complex, at least 3.
        #[arg(long, default_value_t = 5)]
        length: usize,
    },
    Polydisc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u64,
        /// Defaults to the smallest prime congruent to 1 modulo the level.
        #[arg(long = "char")]
        characteristic: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Raw,
    Fine,
    Fs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ScaleArg {
    Smoke,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FaultArg {
    Saturation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Fail,
    Error,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Ok => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }
}

/// A finished run. `table` is the human summary; the rest is the JSON report.
pub struct Report {
    pub verb: String,
    pub inputs_digest: String,
    pub result: Value,
    pub verdict: Verdict,
    pub counterexample: Option<Value>,
    pub error: Option<String>,
    pub table: Vec<(String, String)>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "verb": self.verb,
            "inputs_digest": self.inputs_digest,
            "result": self.result,
            "verdict": self.verdict.name(),
        });
        if let Some(c) = &self.counterexample {
            v["counterexample"] = c.clone();
        }
        if let Some(e) = &self.error {
            v["error"] = Value::String(e.clone());
        }
        v
    }
}

struct Outcome {
    result: Value,
    counterexample: Option<Value>,
    table: Vec<(String, String)>,
}

impl Outcome {
    fn ok(result: Value, table: Vec<(String, String)>) -> Self {
        Outcome { result, counterexample: None, table }
    }
}

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// Hashes the verb, its options and the bytes of every input it read.
struct Inputs {
    hasher: Sha256,
    stdin: Option<String>,
}

impl Inputs {
    fn new(verb: &str, options: &Value) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(verb.as_bytes());
        hasher.update([0]);
        hasher.update(options.to_string().as_bytes());
        Inputs { hasher, stdin: None }
    }

    fn read(&mut self, path: Option<&str>) -> Result<Input> {
        let text = match path {
            None | Some("-") => {
                if self.stdin.is_none() {
                    let mut s = String::new();
                    std::io::stdin()
                        .read_to_string(&mut s)
                        .map_err(|e| Error::InvalidInput(format!("standard input: {e}")))?;
                    self.stdin = Some(s);
                }
                self.stdin.clone().unwrap_or_default()
            }
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{p}: {e}")))?,
        };
        self.hasher.update([0]);
        self.hasher.update(text.as_bytes());
        let label = path.unwrap_or("-");
        parse_input(&text).map_err(|e| match e {
            Error::InvalidInput(m) => Error::InvalidInput(format!("{label}: {m}")),
            other => other,
        })
    }

    fn monoid(&mut self, path: Option<&str>) -> Result<(AffineMonoid, Value)> {
        match self.read(path)? {
            Input::Monoid(m) => Ok((m.clone(), monoid_to_json(&m))),
            Input::Presentation(p) => {
                let m = integralize(&p);
                Ok((m, json!({ "presentation": presentation_to_json(&p) })))
            }
            Input::Hom(_) => Err(Error::InvalidInput(format!("{}: expected a monoid, got a hom", path.unwrap_or("-")))),
        }
    }

    fn hom(&mut self, path: &str) -> Result<MonoidHom> {
        match self.read(Some(path))? {
            Input::Hom(u) => Ok(u),
            _ => Err(Error::InvalidInput(format!("{path}: expected a hom with domain, codomain and group_map"))),
        }
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn canonical_json(m: &AffineMonoid) -> Value {
    let cf = m.canonical_form();
    json!({ "units": vectors_to_json(&cf.units), "irreducibles": vectors_to_json(&cf.sharp) })
}

fn saturate_verb(inputs: &mut Inputs, path: Option<&str>) -> Result<Outcome> {
    let (m, input) = inputs.monoid(path)?;
    let sat = m.saturate();
    let cf = sat.canonical_form();
    let table = vec![
        row("monoid", &m),
        row("saturated already", m.is_saturated()),
        row("saturation", &sat),
        row("hilbert basis", cf.sharp.iter().map(|v| crate::morphism::fmt_vec(v)).collect::<Vec<_>>().join(" ")),
    ];
    Ok(Outcome::ok(
        json!({
            "input": input,
            "monoid": monoid_to_json(&m),
            "was_saturated": m.is_saturated(),
            "saturation": monoid_to_json(&sat),
            "hilbert_basis": vectors_to_json(&cf.sharp),
            "units": vectors_to_json(&cf.units),
        }),
        table,
    ))
}

fn classify_verb(inputs: &mut Inputs, path: Option<&str>) -> Result<Outcome> {
    let (m, input) = inputs.monoid(path)?;
    let p = m.classify();
    let uq = m.units_and_sharp_quotient()?;
    let table = vec![
        row("monoid", &m),
        row("fine", p.fine),
        row("sharp", p.sharp),
        row("saturated", p.saturated),
        row("fs", p.fs),
        row("dimension", p.dimension),
        row("units", &uq.unit_group),
    ];
    Ok(Outcome::ok(
        json!({
            "input": input,
            "monoid": monoid_to_json(&m),
            "fine": p.fine,
            "sharp": p.sharp,
            "saturated": p.saturated,
            "fs": p.fs,
            "dimension": p.dimension,
            "unit_group": ambient_to_json(&uq.unit_group),
            "sharp_quotient": monoid_to_json(&uq.sharp),
            "canonical_form": canonical_json(&m),
        }),
        table,
    ))
}

fn check_chart_verb(inputs: &mut Inputs, path: &str, p: u64) -> Result<Outcome> {
    let u = inputs.hom(path)?;
    let c = chart_classification(&u, p)?;
    let exact = is_exact(&u)?;
    let kv = kummer_conditions(&u);
    let ramification = if c.kummer { ramification_index(&u).ok() } else { None };
    let result = json!({
        "injective": c.injective,
        "exact": c.exact,
        "kummer": c.kummer,
        "log_smooth": c.log_smooth,
        "log_etale": c.log_etale,
        "kummer_etale": c.kummer_etale,
        "residue_characteristic": c.residue_characteristic,
        "galois_group": c.galois_group.as_ref().map(finite_group_to_json),
        "ramification_index": ramification.as_ref().map(int_to_json),
    });
    let mut table = vec![
        row("injective", c.injective),
        row("exact", c.exact),
        row("kummer", c.kummer),
        row("log smooth", c.log_smooth),
        row("log étale", c.log_etale),
        row("kummer étale", c.kummer_etale),
    ];
    if let Some(g) = &c.galois_group {
        table.push(row("galois group", g));
    }
    let counterexample = if c.kummer_etale {
        None
    } else if let Some(w) = exact.witness {
        Some(json!({ "reason": "not exact", "witness": vector_to_json(&w) }))
    } else if let Some(r) = kv.reason {
        Some(json!({ "reason": r }))
    } else {
        Some(json!({ "reason": format!("the residue characteristic {p} divides the Galois group order") }))
    };
    Ok(Outcome { result, counterexample, table })
}

fn pushout_verb(inputs: &mut Inputs, left: &str, right: &str, mode: ModeArg) -> Result<Outcome> {
    let u = inputs.hom(left)?;
    let v = inputs.hom(right)?;
    let mode = match mode {
        ModeArg::Raw => PushoutMode::Raw,
        ModeArg::Fine => PushoutMode::Fine,
        ModeArg::Fs => PushoutMode::Fs,
    };
    match pushout_with_mode(&u, &v, mode)? {
        PushoutOutput::Raw(p) => {
            let table = vec![row("generators", p.generator_count()), row("relations", p.relations().len())];
            Ok(Outcome::ok(json!({ "presentation": presentation_to_json(&p) }), table))
        }
        PushoutOutput::Affine(po) => {
            let table = vec![row("pushout", &po.monoid), row("classification", format!("{:?}", po.monoid.classify()))];
            Ok(Outcome::ok(
                json!({
                    "monoid": monoid_to_json(&po.monoid),
                    "left": matrix_to_json(po.left.group_map()),
                    "right": matrix_to_json(po.right.group_map()),
                }),
                table,
            ))
        }
    }
}

fn log_point(inputs: &mut Inputs, a: &PointArgs) -> Result<LogPoint> {
    let (m, _) = inputs.monoid(Some(&a.monoid))?;
    LogPoint::new(m, a.exclude_prime.clone())
}

fn covers_verb(inputs: &mut Inputs, cmd: &CoversCommand) -> Result<Outcome> {
    match cmd {
        CoversCommand::Classify(a) => {
            let pt = log_point(inputs, a)?;
            let covers = classify_covers(&pt, a.annihilator)?;
            let table = covers
                .iter()
                .enumerate()
                .map(|(i, c)| row(&format!("cover {i}"), format!("G = {}, Q = {}", c.galois_group, c.monoid)))
                .collect();
            let list: Vec<Value> = covers
                .iter()
                .map(|c| {
                    json!({
                        "level": c.level.to_string(),
                        "lattice": vectors_to_json(&c.lattice),
                        "monoid": monoid_to_json(&c.monoid),
                        "galois_group": finite_group_to_json(&c.galois_group),
                    })
                })
                .collect();
            Ok(Outcome::ok(Value::Array(list), table))
        }
        CoversCommand::Check(a) => {
            let pt = log_point(inputs, a)?;
            let rep = galois_correspondence_check(&pt, a.annihilator)?;
            let matching = rep.pairs.iter().filter(|p| p.matches).count();
            let pairs: Vec<Value> = rep
                .pairs
                .iter()
                .map(|p| {
                    json!({
                        "left": p.left, "right": p.right, "hom_count": int_to_json(&p.hom_count),
                        "equivariant_maps": p.equivariant_maps.to_string(), "matches": p.matches,
                    })
                })
                .collect();
            let counterexample = rep.pairs.iter().position(|p| !p.matches).map(|i| pairs[i].clone());
            let table = vec![row("covers", rep.covers.len()), row("pairs matching", format!("{matching}/{}", rep.pairs.len()))];
            Ok(Outcome {
                result: json!({
                    "level": rep.level.to_string(),
                    "covers": rep.covers.len(),
                    "pairs": pairs,
                    "pairs_matching": matching,
                    "passed": rep.passed,
                }),
                counterexample,
                table,
            })
        }
    }
}

fn cohomology_verb(inputs: &mut Inputs, cmd: &CohomologyCommand) -> Result<Outcome> {
    match cmd {
        CohomologyCommand::Group { invariants, characteristic, max_degree } => {
            if invariants.contains(&0) {
                return Err(Error::InvalidInput("invariants must be positive".into()));
            }
            let g = FiniteAbelianGroup::from_orders(&invariants.iter().map(|&d| Int::from(d)).collect::<Vec<_>>());
            let dims = finite_group_cohomology(&g, *characteristic, *max_degree)?;
            let table = vec![row("group", &g), row("characteristic", characteristic), row("dims", format!("{dims:?}"))];
            Ok(Outcome::ok(
                json!({ "group": finite_group_to_json(&g), "characteristic": characteristic, "dims": dims }),
                table,
            ))
        }
        CohomologyCommand::Cech { hom, characteristic, degree_bound, length } => {
            if *length < 3 {
                return Err(Error::InvalidInput("--length must be at least 3".into()));
            }
            let u = inputs.hom(hom)?;
            let kv = kummer_conditions(&u);
            let g = kv.galois_group.filter(|_| kv.kummer).ok_or_else(|| Error::NotKummer(kv.reason.unwrap_or_default()))?;
            let ell = characteristic.unwrap_or_else(|| smallest_prime_not_dividing(&g.order()));
            let c = cech_vs_group_cohomology(&u, ell, length - 3, *degree_bound)?;
            let table = vec![
                row("galois group", &g),
                row("characteristic", ell),
                row("degrees checked", c.degrees_checked),
                row("non-exact degrees", c.non_exact.len()),
                row("čech (per degree)", format!("{:?}", c.cech_normalized)),
                row("group cohomology", format!("{:?}", c.group_cohomology)),
            ];
            let counterexample = (!c.matches).then(|| {
                json!({
                    "non_exact_degrees": vectors_to_json(&c.non_exact),
                    "nonzero_outside_image": vectors_to_json(&c.nontrivial_class_nonzero),
                    "stable": c.stable,
                })
            });
            Ok(Outcome {
                result: json!({
                    "galois_group": finite_group_to_json(&g),
                    "characteristic": ell,
                    "length": length,
                    "degree_bound": degree_bound.to_string(),
                    "degrees_checked": c.degrees_checked,
                    "image_degrees": c.trivial_class_degrees,
                    "exact": c.non_exact.is_empty(),
                    "cech": c.cech_normalized,
                    "cech_inner_box": c.cech_normalized_inner,
                    "group_cohomology": c.group_cohomology,
                    "matches": c.matches,
                }),
                counterexample,
                table,
            })
        }
        CohomologyCommand::Polydisc { n, level, characteristic } => {
            let rep = polydisc_cohomology(*n, *level, *characteristic)?;
            let expected: Vec<usize> = (0..=*n).map(|i| binomial(*n, i)).collect();
            let only_trivial = rep.contributing == vec![vec![0u64; *n]];
            let table = vec![
                row("characteristic", rep.ell),
                row("characters", rep.characters),
                row("dims", format!("{:?}", rep.dims)),
            ];
            let counterexample = (!only_trivial || rep.dims != expected).then(|| {
                json!({ "contributing": rep.contributing, "dims": rep.dims, "expected": expected })
            });
            Ok(Outcome {
                result: json!({
                    "n": n,
                    "level": level.to_string(),
                    "characteristic": rep.ell,
                    "characters": rep.characters,
                    "dims": rep.dims,
                    "contributing": rep.contributing.iter().map(|a| a.iter().map(|x| format!("{x}/{level}")).collect::<Vec<_>>()).collect::<Vec<_>>(),
                }),
                counterexample,
                table,
            })
        }
    }
}

fn verify_verb(scale: ScaleArg, seed: u64, criteria: &[u8], fault: Option<FaultArg>) -> Result<Outcome> {
    if let Some(bad) = criteria.iter().find(|&&c| !(1..=8).contains(&c)) {
        return Err(Error::InvalidInput(format!("no criterion {bad}")));
    }
    if let Some(FaultArg::Saturation) = fault {
        inject(Fault::Saturation);
    }
    let scale = match scale {
        ScaleArg::Smoke => Scale::Smoke,
        ScaleArg::Full => Scale::Full,
    };
    let cfg = SuiteConfig { scale, seed };
    let ids: Vec<u8> = if criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { criteria.to_vec() };
    let start = Instant::now();
    let outcomes: Vec<_> = ids.iter().map(|&id| run_criterion(id, cfg)).collect();
    inject(Fault::None);
    let elapsed = start.elapsed();
    let limit = std::time::Duration::from_secs(if scale == Scale::Smoke { 30 } else { 300 });
    let mut table: Vec<(String, String)> = outcomes
        .iter()
        .map(|o| {
            let mark = if o.passed { "PASS" } else { "FAIL" };
            row(&format!("{} criterion {}", mark, o.id), format!("{} | {} | {:.2?}", o.name, o.summary, o.duration))
        })
        .collect();
    table.push(row("wall-clock", format!("{elapsed:.2?} (limit {limit:?})")));
    let failing: Vec<Value> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| json!({ "criterion": o.id, "summary": o.summary, "counterexample": o.counterexample }))
        .collect();
    let mut counterexample = (!failing.is_empty()).then_some(Value::Array(failing));
    if counterexample.is_none() && elapsed > limit {
        counterexample = Some(json!({ "reason": format!("suite exceeded {limit:?}") }));
    }
    Ok(Outcome {
        result: json!({
            "scale": match scale { Scale::Smoke => "smoke", Scale::Full => "full" },
            "seed": seed.to_string(),
            "criteria": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
        }),
        counterexample,
        table,
    })
}

fn options_json(cmd: &Command) -> Value {
    Value::String(format!("{cmd:?}"))
}

fn verb_name(cmd: &Command) -> String {
    match cmd {
        Command::Saturate(_) => "saturate".into(),
        Command::Classify(_) => "classify".into(),
        Command::CheckChart { .. } => "check-chart".into(),
        Command::Pushout { .. } => "pushout".into(),
        Command::Covers(CoversCommand::Classify(_)) => "covers classify".into(),
        Command::Covers(CoversCommand::Check(_)) => "covers check".into(),
        Command::Cohomology(CohomologyCommand::Group { .. }) => "cohomology group".into(),
        Command::Cohomology(CohomologyCommand::Cech { .. }) => "cohomology cech".into(),
        Command::Cohomology(CohomologyCommand::Polydisc { .. }) => "cohomology polydisc".into(),
        Command::VerifySuite { .. } => "verify-suite".into(),
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Report {
    let verb = verb_name(&cli.command);
    let mut inputs = Inputs::new(&verb, &options_json(&cli.command));
    let outcome = match &cli.command {
        Command::Saturate(a) => saturate_verb(&mut inputs, a.input.as_deref()),
        Command::Classify(a) => classify_verb(&mut inputs, a.input.as_deref()),
        Command::CheckChart { hom, residue_char } => check_chart_verb(&mut inputs, hom, *residue_char),
        Command::Pushout { left, right, mode } => pushout_verb(&mut inputs, left, right, *mode),
        Command::Covers(c) => covers_verb(&mut inputs, c),
        Command::Cohomology(c) => cohomology_verb(&mut inputs, c),
        Command::VerifySuite { scale, seed, criterion, inject_fault } => {
            verify_verb(*scale, *seed, criterion, *inject_fault)
        }
    };
    let inputs_digest = inputs.digest();
    match outcome {
        Ok(o) => Report {
            verb,
            inputs_digest,
            verdict: if o.counterexample.is_some() { Verdict::Fail } else { Verdict::Ok },
            result: o.result,
            counterexample: o.counterexample,
            error: None,
            table: o.table,
        },
        Err(e) => Report {
            verb,
            inputs_digest,
            result: Value::Null,
            verdict: Verdict::Error,
            counterexample: None,
            error: Some(e.to_string()),
            table: vec![row("error", e)],
        },
    }
}

/// Parses arguments, runs, writes both outputs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let report = execute(&cli);
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, &report.to_json());
    let _ = writeln!(out);
    let mut err = std::io::stderr().lock();
    let width = report.table.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0).max("duration".len());
    let _ = writeln!(err, "{} [{}]", report.verb, report.verdict.name());
    for (k, v) in &report.table {
        let _ = writeln!(err, "  {k:<width$}  {v}");
    }
    let _ = writeln!(err, "  {:<width$}  {:.2?}", "duration", start.elapsed());
    report.verdict.exit_code()
}
