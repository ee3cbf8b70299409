use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use isac_core::binary::{binary_curves, find_intersection, BinaryParams, Coupling};
use isac_core::fmt::sig;
use isac_core::sim::{run_channel_coding_trial, run_symbolwise_jscc, CodingConfig, JsccConfig, SimulationReport};
use isac_core::tradeoff::{rate_distortion, rd_sweep, CapacitySolver, ConstraintSet, RdResult};
use isac_core::{
    build_binary_isac_channel, ChannelSpec, ConditionalDistribution, Distribution, Error, SolverResult,
    SourceSpec, SpecFile,
};
use serde::Serialize;
use serde_json::json;

use crate::args::{
    BinaryArgs, CapacityArgs, CouplingRule, Mode, RdArgs, SimulateArgs, SweepArgs, ValidateArgs,
};

/// A simulation report that fails its own consistency checks.
#[derive(Debug)]
pub struct InvalidReport(pub Vec<String>);

impl fmt::Display for InvalidReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "report violates its invariants: {}", self.0.join("; "))
    }
}

impl std::error::Error for InvalidReport {}

fn read_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SpecFile::from_json(&text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        anyhow!("{}:{}:{}: {msg}", path.display(), e.line(), e.column())
    })
}

fn channel_of(path: &Path, file: &SpecFile) -> Result<ChannelSpec> {
    file.channel().map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn source_of(path: &Path, file: &SpecFile) -> Result<SourceSpec> {
    file.source().map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_channel(path: &Path) -> Result<ChannelSpec> {
    channel_of(path, &read_spec(path)?)
}

fn require<T>(value: Option<T>, flag: &str, command: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("`{command}` needs --{flag}"))
}

/// Writes to stdout; a reader that went away (`| head`) is not an error.
fn stdout(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other.context("writing stdout"),
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout(text),
    }
}

/// `# isac <command> <effective config>` as the first CSV line.
fn csv_preamble<T: Serialize>(command: &str, config: &T) -> String {
    format!("# isac {command} {}\n", serde_json::to_string(config).expect("config serializes"))
}

fn human(x: f64) -> String {
    sig(x, 4)
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| human(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn capacity_summary(r: &SolverResult) -> String {
    format!(
        "C_inf = {} bits/use\nachieved D_s = {}, B = {}\nP_X = {}\nmultipliers: lambda_s = {}, lambda_B = {}\niterations = {}, converged = {}\n",
        human(r.value),
        human(r.achieved_ds),
        human(r.achieved_b),
        vector(r.argmax_input.probs()),
        human(r.multipliers.0),
        human(r.multipliers.1),
        r.iterations,
        r.converged
    )
}

pub fn capacity(args: &CapacityArgs) -> Result<()> {
    let path = require(args.channel.as_ref(), "channel", "capacity")?;
    let spec = load_channel(path)?;
    let constraints = ConstraintSet::new(args.ds.unwrap_or(f64::INFINITY), args.cost.unwrap_or(f64::INFINITY))?;
    let outcome = CapacitySolver::new(&spec).capacity_distortion_cost(constraints);
    let shown = match &outcome {
        Ok(r) => r,
        Err(Error::NotConverged { best, .. }) => best.as_ref(),
        Err(_) => return outcome.map(|_| ()).map_err(Into::into),
    };
    if args.json {
        let doc = json!({ "effective_config": args, "result": shown });
        stdout(&(serde_json::to_string_pretty(&doc)? + "\n"))?;
    } else {
        stdout(&capacity_summary(shown))?;
    }
    outcome.map(|_| ()).map_err(Into::into)
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let mut args = args.clone();
    let spec = load_channel(require(args.channel.as_ref(), "channel", "sweep")?)?;
    let solver = CapacitySolver::new(&spec);
    let budget = args.cost.unwrap_or(f64::INFINITY);
    let lo = match args.ds_min {
        Some(v) => v,
        None => *args.ds_min.insert(solver.floors(budget, None)?.ds_min),
    };
    let hi = match args.ds_max {
        Some(v) => v,
        None => *args.ds_max.insert(solver.saturation_distortion(budget)?),
    };
    let n = *args.grid.get_or_insert(21);
    let grid: Vec<f64> = match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    };
    let curve = solver.sweep_curve(budget, &grid);
    for p in &curve.points {
        if let Err(e) = &p.result {
            eprintln!("warning: D_s = {}: {e}", sig(p.d_s, 12));
        }
    }
    emit(args.output.as_ref(), &(csv_preamble("sweep", &args) + &curve.to_csv()))
}

fn rd_summary(r: &RdResult) -> String {
    format!(
        "R = {} bits/symbol\nachieved D_u = {}\nslope = {}\niterations = {}, converged = {}\n",
        human(r.value),
        human(r.achieved_du),
        human(r.slope),
        r.iterations,
        r.converged
    )
}

#[derive(Serialize)]
struct RdSummary {
    value: f64,
    achieved_du: f64,
    slope: f64,
    iterations: usize,
    converged: bool,
    test_channel: Vec<Vec<f64>>,
}

pub fn rd(args: &RdArgs) -> Result<()> {
    let mut args = args.clone();
    let source = match (&args.source, args.p) {
        (Some(path), _) => source_of(path, &read_spec(path)?)?,
        (None, Some(p)) => SourceSpec::hamming(Distribution::bernoulli_zero(p)?),
        (None, None) => bail!("`rd` needs --source or --p"),
    };
    if let Some(du) = args.du {
        let outcome = rate_distortion(&source, du);
        let shown = match &outcome {
            Ok(r) => r,
            Err(Error::RdNotConverged { best, .. }) => best.as_ref(),
            Err(_) => return outcome.map(|_| ()).map_err(Into::into),
        };
        if args.json {
            let summary = RdSummary {
                value: shown.value,
                achieved_du: shown.achieved_du,
                slope: shown.slope,
                iterations: shown.iterations,
                converged: shown.converged,
                test_channel: shown.test_channel.to_nested(),
            };
            let doc = json!({ "effective_config": &args, "result": summary });
            stdout(&(serde_json::to_string_pretty(&doc)? + "\n"))?;
        } else {
            stdout(&rd_summary(shown))?;
        }
        return outcome.map(|_| ()).map_err(Into::into);
    }
    let (lo, hi) = (source.min_distortion(), source.zero_rate_distortion().1);
    let n = *args.grid.get_or_insert(21);
    let grid: Vec<f64> = match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    };
    let curve = rd_sweep(&source, &grid);
    for p in &curve.points {
        if let Err(e) = &p.result {
            eprintln!("warning: D_u = {}: {e}", sig(p.d_u, 12));
        }
    }
    emit(args.output.as_ref(), &(csv_preamble("rd", &args) + &curve.to_csv()))
}

fn open_unit_half(what: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v <= 0.5 {
        Ok(v)
    } else {
        Err(Error::Domain {
            what,
            value: v,
            domain: "(0, 1/2]",
        }
        .into())
    }
}

pub fn binary(args: &BinaryArgs) -> Result<()> {
    let mut args = args.clone();
    let p = open_unit_half("p", require(args.p, "p", "binary")?)?;
    let q = open_unit_half("q", require(args.q, "q", "binary")?)?;
    let params = BinaryParams::new(p, q)?;
    let coupling = match *args.coupling.get_or_insert_default() {
        CouplingRule::Boundary => Coupling::Boundary,
        CouplingRule::Fixed => Coupling::Fixed {
            d_u: require(args.du, "du", "binary --coupling fixed")?,
        },
    };
    let curves = binary_curves(&params, *args.grid.get_or_insert(101), coupling)?;
    let x = find_intersection(&params, *args.tol.get_or_insert(1e-15))?;
    emit(args.output.as_ref(), &(csv_preamble("binary", &args) + &curves.to_csv()))?;
    stdout(&format!(
        "intersection: d_s={}, d_u={}, value={}\n",
        sig(x.d_s, 12),
        sig(x.d_u, 12),
        sig(x.value, 12)
    ))?;
    let bad = curves.ordering_violations(1e-9);
    if !bad.is_empty() {
        return Err(InvalidReport(vec![format!("r_curve exceeds c_curve at rows {bad:?}")]).into());
    }
    Ok(())
}

struct SimInputs {
    spec: ChannelSpec,
    file: Option<(PathBuf, SpecFile)>,
}

fn simulation_channel(args: &SimulateArgs) -> Result<SimInputs> {
    match (&args.channel, args.q) {
        (Some(path), _) => {
            let file = read_spec(path)?;
            Ok(SimInputs {
                spec: channel_of(path, &file)?,
                file: Some((path.clone(), file)),
            })
        }
        (None, Some(q)) => Ok(SimInputs {
            spec: build_binary_isac_channel(q)?,
            file: None,
        }),
        (None, None) => bail!("`simulate` needs --channel or --q"),
    }
}

fn too_large_hint(err: anyhow::Error) -> anyhow::Error {
    match err.downcast_ref::<Error>() {
        Some(Error::TooLarge { limit, .. }) => {
            let hint = format!("lower --rate or --n so that ceil(n * rate) <= {limit}");
            err.context(hint)
        }
        _ => err,
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let mut args = args.clone();
    let inputs = simulation_channel(&args)?;
    let spec = &inputs.spec;
    let seed = *args.seed.get_or_insert(0);
    let trace = args.trace.is_some();
    let report: SimulationReport = match *args.mode.get_or_insert_default() {
        Mode::RandomCoding => {
            let input = match (&args.input, &inputs.file) {
                (Some(v), _) => Distribution::new(v.clone())?,
                (None, Some((path, file))) => match file.input_distribution() {
                    Some(d) => d.map_err(|e| anyhow!("{}: {e}", path.display()))?,
                    None => Distribution::uniform(spec.n_inputs()),
                },
                (None, None) => Distribution::uniform(spec.n_inputs()),
            };
            args.input = Some(input.probs().to_vec());
            let config = CodingConfig {
                n: *args.n.get_or_insert(30),
                rate: require(args.rate, "rate", "simulate --mode random-coding")?,
                epsilon: *args.epsilon.get_or_insert(0.5),
                trials: *args.trials.get_or_insert(1000),
                seed,
                input,
                trace,
            };
            run_channel_coding_trial(spec, &config)
                .map_err(anyhow::Error::from)
                .map_err(too_large_hint)?
        }
        Mode::Symbolwise => {
            let source_file = match &args.source {
                Some(path) => Some((path.clone(), read_spec(path)?)),
                None => None,
            };
            let with_source = source_file
                .as_ref()
                .or(inputs.file.as_ref().filter(|(_, f)| f.source.is_some()));
            let source = match (with_source, args.p) {
                (Some((path, file)), _) => source_of(path, file)?,
                (None, Some(p)) => SourceSpec::hamming(Distribution::bernoulli_zero(p)?),
                (None, None) => bail!("symbolwise mode needs --source, a `source` section, or --p"),
            };
            let from_file = source_file
                .iter()
                .chain(inputs.file.iter())
                .find_map(|(path, f)| f.encoder().map(|k| k.map_err(|e| anyhow!("{}: {e}", path.display()))));
            let kernel = match (from_file, args.a.is_some() || args.b.is_some()) {
                (Some(k), false) => k?,
                _ => ConditionalDistribution::binary(args.a.unwrap_or(1.0), args.b.unwrap_or(0.0))?,
            };
            let config = JsccConfig {
                n: *args.n.get_or_insert(100_000),
                trials: *args.trials.get_or_insert(1),
                seed,
                trace,
            };
            run_symbolwise_jscc(spec, &source, &kernel, &config)?
        }
    };
    let doc = json!({ "effective_config": &args, "report": report });
    emit(args.output.as_ref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    if let Some(path) = &args.trace {
        std::fs::write(path, report.trace_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let violations = report.invariant_violations();
    if !violations.is_empty() {
        return Err(InvalidReport(violations).into());
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let path = require(args.file.as_ref(), "file", "validate")?;
    let file = read_spec(path)?;
    let mut sections = Vec::new();
    if file.has_channel() {
        let c = channel_of(path, &file)?;
        sections.push(format!(
            "channel |S|={} |X|={} |Y|={} |Z|={}",
            c.n_states(),
            c.n_inputs(),
            c.n_outputs(),
            c.n_feedback()
        ));
    }
    if file.source.is_some() {
        let s = source_of(path, &file)?;
        sections.push(format!("source |U|={} |U_hat|={}", s.n_symbols(), s.n_reconstructions()));
    }
    if let Some(k) = file.encoder() {
        let k = k.map_err(|e| anyhow!("{}: {e}", path.display()))?;
        sections.push(format!("encoder {}x{}", k.rows(), k.cols()));
    }
    if let Some(d) = file.input_distribution() {
        d.map_err(|e| anyhow!("{}: {e}", path.display()))?;
        sections.push("input distribution".into());
    }
    if sections.is_empty() {
        bail!("{}: no sections found", path.display());
    }
    stdout(&format!("ok: {}: {}\n", path.display(), sections.join(", ")))
}
