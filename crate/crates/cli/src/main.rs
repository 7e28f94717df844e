//! `gcu`: command-line front end for evidence conditioning and updating.
//!
//! Exit codes: 0 on success, 1 when an input fails validation or a domain
//! error occurs, 2 on usage or I/O errors.

mod demo;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gcu_core::io::{boe_to_json, parse_beta_strategy, read_boe, read_raw_boe, BoeOut, Sig17};
use gcu_core::stream::trends_to_json;
use gcu_core::{
    cct_decompose, compare_rules, conditional_core_cct, fh_conditional_mass, load_stream,
    random_boe, run_from, run_stream, unsupported_proposition_report, AlphaStrategy,
    DegenerateEventPolicy, ExperimentReport, Frame, MassFunction, PipelineState, PriorSpec,
    Proposition, StreamRecord, UpdateConfig, UpdateRule,
};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "gcu",
    version,
    about = "Dempster-Shafer evidence conditioning and updating"
)]
struct Cli {
    /// Output format; `stream` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a BoE file against the BPA axioms.
    Validate { boe: PathBuf },
    /// Fagin-Halpern conditioning and the conditional-core sets.
    Condition {
        boe: PathBuf,
        /// Conditioning event as a comma-separated label list.
        #[arg(long)]
        event: String,
        /// Views to print; repeat the flag for several.
        #[arg(long, value_enum, default_value = "mass")]
        show: Vec<View>,
    },
    /// One update step of a BoE with incoming evidence.
    Update {
        boe: PathBuf,
        incoming: PathBuf,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Run a JSON-Lines evidence stream and emit the trajectory.
    Stream {
        stream: PathBuf,
        #[command(flatten)]
        prior: PriorArgs,
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Continue from a saved state; records before its step are skipped.
        #[arg(long, value_name = "STATE", conflicts_with = "prior")]
        resume: Option<PathBuf>,
        /// Save the final state here.
        #[arg(long, value_name = "PATH")]
        save_state: Option<PathBuf>,
        /// Write the unsupported-proposition trend table (JSON) here.
        #[arg(long, value_name = "PATH")]
        trends: Option<PathBuf>,
    },
    /// Run several rule configurations on one stream and compare them.
    Compare {
        stream: PathBuf,
        /// JSON list of {"rule", "alpha", "beta", "policy"} objects.
        #[arg(long, value_name = "PATH")]
        configs: PathBuf,
        #[command(flatten)]
        prior: PriorArgs,
    },
    /// Walk through one of the built-in examples.
    Demo {
        #[arg(value_enum)]
        name: demo::Demo,
    },
    /// Generate a random BoE.
    RandomBoe {
        /// Frame labels, comma-separated.
        #[arg(long, conflicts_with = "n", required_unless_present = "n")]
        frame: Option<String>,
        /// Frame size; labels are t0, t1, ...
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_focal: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum View {
    #[value(name = "in")]
    In,
    #[value(name = "out")]
    Out,
    #[value(name = "IN")]
    InUnions,
    #[value(name = "OUT")]
    OutUnions,
    Core,
    Mass,
}

#[derive(Args)]
struct StrategyArgs {
    /// gcu, cue or bayes.
    #[arg(long, default_value = "gcu")]
    rule: String,
    /// fixed:<a>, zero, infinite or proportional.
    #[arg(long, default_value = "zero")]
    alpha: String,
    /// receptive, cautious or explicit:<path>.
    #[arg(long, default_value = "receptive")]
    beta: String,
    /// skip or error.
    #[arg(long, default_value = "skip")]
    policy: String,
}

#[derive(Args)]
struct PriorArgs {
    /// vacuous, uniform, dirichlet:<gamma> or file:<path>.
    #[arg(long, default_value = "vacuous")]
    prior: String,
    /// Frame labels, comma-separated; needed when neither the prior nor the stream fixes them.
    #[arg(long)]
    frame: Option<String>,
}

/// A mistake in how the tool was invoked.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Validation failure whose report has already been printed.
#[derive(Debug)]
struct Invalid;

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("input is not a valid body of evidence")
    }
}

impl std::error::Error for Invalid {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<gcu_core::Error>() {
            if matches!(e.root(), gcu_core::Error::Io(_)) {
                return 2;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if !err.is::<Invalid>() {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let format = cli.format;
    let text = match cli.command {
        Command::Validate { boe } => {
            json_only(format)?;
            return validate(&boe, cli.out.as_deref());
        }
        Command::Condition { boe, event, show } => {
            json_only(format)?;
            condition(&boe, &event, &show)?
        }
        Command::Update {
            boe,
            incoming,
            strategy,
        } => {
            json_only(format)?;
            update(&boe, &incoming, &strategy)?
        }
        Command::Stream {
            stream,
            prior,
            strategy,
            resume,
            save_state,
            trends,
        } => stream_cmd(
            &stream,
            &prior,
            &strategy,
            resume.as_deref(),
            save_state.as_deref(),
            trends.as_deref(),
            format.unwrap_or(Format::Csv),
        )?,
        Command::Compare {
            stream,
            configs,
            prior,
        } => compare(&stream, &configs, &prior, format.unwrap_or(Format::Json))?,
        Command::Demo { name } => demo::run(name)?,
        Command::RandomBoe {
            frame,
            n,
            max_focal,
            seed,
        } => {
            json_only(format)?;
            let frame = match (frame, n) {
                (Some(labels), _) => parse_frame(&labels)?,
                (None, Some(n)) => Frame::new((0..n).map(|i| format!("t{i}")))?,
                (None, None) => return Err(usage("give --frame or --n")),
            };
            if max_focal == 0 {
                return Err(usage("--max-focal must be at least 1"));
            }
            boe_to_json(&random_boe(&frame, max_focal, seed))
        }
    };
    emit(cli.out.as_deref(), &text)
}

fn json_only(format: Option<Format>) -> anyhow::Result<()> {
    match format {
        Some(Format::Csv) => Err(usage("this command only produces json output")),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_frame(labels: &str) -> anyhow::Result<Frame> {
    let labels: Vec<&str> = labels.split(',').map(str::trim).collect();
    Ok(Frame::new(labels)?)
}

fn load_boe(path: &Path) -> anyhow::Result<MassFunction> {
    read_boe(path).with_context(|| format!("reading {}", path.display()))
}

#[derive(Serialize)]
struct ValidationOut {
    valid: bool,
    total_mass: Sig17,
    violations: Vec<String>,
}

fn validate(path: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let raw = read_raw_boe(path).with_context(|| format!("reading {}", path.display()))?;
    let report = raw.validate();
    let doc = ValidationOut {
        valid: report.is_valid(),
        total_mass: Sig17(report.total_mass),
        violations: report.describe(&raw.frame),
    };
    emit(out, &serde_json::to_string(&doc)?)?;
    if report.is_valid() {
        Ok(())
    } else {
        for v in &doc.violations {
            eprintln!("violation: {v}");
        }
        Err(Invalid.into())
    }
}

type Sets<'a> = Vec<Vec<&'a str>>;

fn sets<'a>(frame: &'a Frame, props: &BTreeSet<Proposition>) -> Sets<'a> {
    props.iter().map(|p| frame.labels_of(*p)).collect()
}

#[derive(Serialize)]
struct ConditionOut<'a> {
    event: Vec<&'a str>,
    #[serde(rename = "in", skip_serializing_if = "Option::is_none")]
    inner: Option<Sets<'a>>,
    #[serde(rename = "out", skip_serializing_if = "Option::is_none")]
    outer: Option<Sets<'a>>,
    #[serde(rename = "IN", skip_serializing_if = "Option::is_none")]
    inner_unions: Option<Sets<'a>>,
    #[serde(rename = "OUT", skip_serializing_if = "Option::is_none")]
    outer_unions: Option<Sets<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    core: Option<Sets<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mass: Option<BoeOut<'a>>,
}

fn condition(path: &Path, event: &str, show: &[View]) -> anyhow::Result<String> {
    let m = load_boe(path)?;
    let frame = m.frame();
    let a = frame.parse_proposition(event)?;
    if a.is_empty() {
        return Err(anyhow!("conditioning event must not be empty"));
    }
    let views: BTreeSet<View> = show.iter().copied().collect();
    let cond = if views.contains(&View::Mass) || views.contains(&View::Core) {
        Some(fh_conditional_mass(&m, a)?)
    } else {
        None
    };
    if views.len() == 1 && views.contains(&View::Mass) {
        return Ok(boe_to_json(cond.as_ref().expect("mass view computed")));
    }
    let d = cct_decompose(&m, a)?;
    let pick = |view: View, props: &BTreeSet<Proposition>| {
        views.contains(&view).then(|| sets(frame, props))
    };
    let core = if views.contains(&View::Core) {
        Some(conditional_core_cct(&m, a)?)
    } else {
        None
    };
    let out = ConditionOut {
        event: frame.labels_of(a),
        inner: pick(View::In, &d.inner),
        outer: pick(View::Out, &d.outer),
        inner_unions: pick(View::InUnions, &d.inner_unions),
        outer_unions: pick(View::OutUnions, &d.outer_unions),
        core: core.map(|c| sets(frame, &c)),
        mass: cond
            .as_ref()
            .filter(|_| views.contains(&View::Mass))
            .map(BoeOut::new),
    };
    Ok(serde_json::to_string(&out)?)
}

fn update_config(
    s: &StrategyArgs,
    frame: &Frame,
    base: Option<&Path>,
) -> anyhow::Result<UpdateConfig> {
    Ok(UpdateConfig {
        rule: s.rule.parse::<UpdateRule>()?,
        alpha: s.alpha.parse::<AlphaStrategy>()?,
        beta: parse_beta_strategy(&s.beta, frame, base)?,
        policy: s.policy.parse::<DegenerateEventPolicy>()?,
    })
}

fn update(boe: &Path, incoming: &Path, strategy: &StrategyArgs) -> anyhow::Result<String> {
    let current = load_boe(boe)?;
    let incoming = load_boe(incoming)?;
    let config = update_config(strategy, current.frame(), None)?;
    let step = config.step(&current, &incoming, 0)?;
    Ok(boe_to_json(&step.boe))
}

fn load_records(path: &Path) -> anyhow::Result<Vec<StreamRecord>> {
    load_stream(path).with_context(|| format!("reading {}", path.display()))
}

/// Resolves the prior and its frame from the flags and the stream.
fn resolve_prior(args: &PriorArgs, records: &[StreamRecord]) -> anyhow::Result<(PriorSpec, Frame)> {
    let explicit_frame = args.frame.as_deref().map(parse_frame).transpose()?;
    if let Some(path) = args.prior.strip_prefix("file:") {
        let m = load_boe(Path::new(path))?;
        let frame = m.frame().clone();
        if let Some(f) = explicit_frame {
            if f != frame {
                return Err(usage("--frame disagrees with the prior file"));
            }
        }
        return Ok((PriorSpec::Explicit(m), frame));
    }
    let spec: PriorSpec = args.prior.parse()?;
    let frame = explicit_frame
        .or_else(|| records.first().map(|r| r.incoming.frame().clone()))
        .ok_or_else(|| usage("cannot tell the frame: pass --frame or a file prior"))?;
    Ok((spec, frame))
}

#[allow(clippy::too_many_arguments)]
fn stream_cmd(
    stream: &Path,
    prior: &PriorArgs,
    strategy: &StrategyArgs,
    resume: Option<&Path>,
    save_state: Option<&Path>,
    trends: Option<&Path>,
    format: Format,
) -> anyhow::Result<String> {
    let records = load_records(stream)?;
    let log = match resume {
        Some(path) => {
            let state = PipelineState::load(path)
                .with_context(|| format!("reading state {}", path.display()))?;
            let config = update_config(strategy, state.boe.frame(), None)?;
            run_from(state, &records, &config)?
        }
        None => {
            let (spec, frame) = resolve_prior(prior, &records)?;
            let config = update_config(strategy, &frame, None)?;
            run_stream(&spec, &frame, &records, &config)?
        }
    };
    if let Some(path) = save_state {
        log.final_state
            .save(path)
            .with_context(|| format!("writing state {}", path.display()))?;
    }
    if let Some(path) = trends {
        let table = unsupported_proposition_report(&log, &records);
        fs::write(path, trends_to_json(&log.frame, &table) + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(match format {
        Format::Csv => log.to_csv()?,
        Format::Json => log.to_json(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    rule: String,
    #[serde(default = "default_alpha")]
    alpha: String,
    #[serde(default = "default_beta")]
    beta: String,
    #[serde(default = "default_policy")]
    policy: String,
}

fn default_alpha() -> String {
    "zero".into()
}

fn default_beta() -> String {
    "receptive".into()
}

fn default_policy() -> String {
    "skip".into()
}

fn compare(
    stream: &Path,
    configs: &Path,
    prior: &PriorArgs,
    format: Format,
) -> anyhow::Result<String> {
    let records = load_records(stream)?;
    let (spec, frame) = resolve_prior(prior, &records)?;
    let text =
        fs::read_to_string(configs).with_context(|| format!("reading {}", configs.display()))?;
    let docs: Vec<ConfigDoc> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", configs.display()))?;
    let configs = docs
        .iter()
        .map(|d| {
            let args = StrategyArgs {
                rule: d.rule.clone(),
                alpha: d.alpha.clone(),
                beta: d.beta.clone(),
                policy: d.policy.clone(),
            };
            update_config(&args, &frame, configs.parent())
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let report = compare_rules(&spec, &frame, &records, &configs)?;
    Ok(match format {
        Format::Json => report.to_json(),
        Format::Csv => divergence_csv(&report),
    })
}

fn divergence_csv(report: &ExperimentReport) -> String {
    use gcu_core::io::format_sig17;
    let mut header = vec!["k".to_string(), "max_pignistic_divergence".to_string()];
    for p in &report.pairs {
        header.push(format!("pignistic_{}_{}", p.first, p.second));
        header.push(format!("mass_{}_{}", p.first, p.second));
    }
    let mut lines = vec![header.join(",")];
    for (i, s) in report.logs[0].samples.iter().enumerate() {
        let mut row = vec![s.k.to_string(), format_sig17(report.max_divergence[i])];
        for p in &report.pairs {
            row.push(format_sig17(p.per_step[i]));
            row.push(p.per_step_mass[i].map(format_sig17).unwrap_or_default());
        }
        lines.push(row.join(","));
    }
    lines.join("\n") + "\n"
}
