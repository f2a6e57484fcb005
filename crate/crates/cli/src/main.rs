//! Command-line surface: model ingestion, verification suites, decomposition
//! reports, and trajectory dumps.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 input error, 3 genericity error.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use equiflow::decomposition::{basin_classify, basins_csv, decompose, verify_convergence_condition, verify_hyperbolic, RunSettings};
use equiflow::flow::{
    flow_exact_in_charts, flow_rk4_in_charts, from_chart_point, limit_by_trajectory, to_chart_point,
    Direction, ExponentTable, TrajectoryOptions,
};
use equiflow::metric::{verify_closed_form_agreement, verify_norm_decay};
use equiflow::models::verify::{verify_all_charts_equivariance, verify_covering};
use equiflow::models::{Fan, Model, ModelDescriptor, Point};
use equiflow::sampling::{rng_for, sample_stratified};
use equiflow::{Error, GeneratorVector, ToleranceSet, Verdict};

const EXIT_OK: u8 = 0;
const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GENERICITY: u8 = 3;

#[derive(Parser)]
#[command(name = "equiflow", version, about = "Equivariant gradient-like flows on torus manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Model preset (cp1, cp2, cp3, s2, s4, fan:cp2, fan:hirzebruch1) or a
    /// JSON file (model descriptor or bare fan).
    #[arg(long)]
    model: String,
    /// Generator vector as comma-separated rationals, e.g. "1/3,1/7".
    #[arg(long)]
    a0: Option<String>,
    /// RNG seed; fully determines all sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count for sampling-based suites.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file with tolerance overrides: {"tolerances": {...}}.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the model summary: fixed points, weights, charts.
    Describe {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the full decomposition pipeline and write report.json, poset.dot,
    /// basins.csv.
    Decompose {
        #[command(flatten)]
        common: CommonOpts,
        /// Unstable-direction seeds per fixed point for the connection poset.
        #[arg(long, default_value_t = 32)]
        poset_seeds: usize,
    },
    /// Run verification suites: covering, equivariance, hyperbolic,
    /// convergence, decay, or all.
    Verify {
        /// Suite name.
        which: String,
        #[command(flatten)]
        common: CommonOpts,
        /// Trials for equivariance suites.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Integrate a trajectory and dump CSV (exact and RK4 columns).
    Flow {
        #[command(flatten)]
        common: CommonOpts,
        /// Start point: projective "1,1,..." (homogeneous complex entries),
        /// toric "chart:K:w1,w2,...".
        #[arg(long)]
        start: String,
        /// Time range "a:b".
        #[arg(long, default_value = "0:3")]
        s_range: String,
        /// Number of output rows.
        #[arg(long, default_value_t = 101)]
        rows: usize,
        /// RK4 step.
        #[arg(long)]
        step: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Describe { common } => cmd_describe(&common),
        Command::Decompose { common, poset_seeds } => cmd_decompose(&common, poset_seeds),
        Command::Verify { which, common, trials } => cmd_verify(&which, &common, trials),
        Command::Flow {
            common,
            start,
            s_range,
            rows,
            step,
        } => cmd_flow(&common, &start, &s_range, rows, step),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn preset_descriptor(name: &str) -> Option<ModelDescriptor> {
    match name {
        "cp1" => Some(ModelDescriptor::Projective { dimension: 1, coordinate_weights: None }),
        "cp2" => Some(ModelDescriptor::Projective { dimension: 2, coordinate_weights: None }),
        "cp3" => Some(ModelDescriptor::Projective { dimension: 3, coordinate_weights: None }),
        "s2" => Some(ModelDescriptor::Sphere { half_dimension: 1 }),
        "s4" => Some(ModelDescriptor::Sphere { half_dimension: 2 }),
        "fan:cp2" => Some(ModelDescriptor::Toric {
            fan: equiflow::models::toric::projective_fan(2),
        }),
        "fan:hirzebruch1" => Some(ModelDescriptor::Toric {
            fan: equiflow::models::toric::hirzebruch_fan(),
        }),
        _ => None,
    }
}

fn load_model(spec: &str) -> Result<Model, String> {
    let descriptor = if let Some(d) = preset_descriptor(spec) {
        d
    } else {
        let text = fs::read_to_string(spec)
            .map_err(|e| format!("cannot read model '{spec}': {e}"))?;
        // accept a full descriptor or a bare fan file
        match serde_json::from_str::<ModelDescriptor>(&text) {
            Ok(d) => d,
            Err(first) => match serde_json::from_str::<Fan>(&text) {
                Ok(fan) => ModelDescriptor::Toric { fan },
                Err(_) => return Err(format!("cannot parse model '{spec}': {first}")),
            },
        }
    };
    Model::from_descriptor(&descriptor).map_err(|e| format!("invalid model: {e}"))
}

#[derive(serde::Deserialize, Default)]
struct ConfigFile {
    #[serde(default)]
    tolerances: Option<ToleranceSet>,
}

fn load_tolerances(config: &Option<PathBuf>) -> Result<ToleranceSet, String> {
    match config {
        None => Ok(ToleranceSet::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
            let cfg: ConfigFile = serde_json::from_str(&text)
                .map_err(|e| format!("cannot parse config '{}': {e}", path.display()))?;
            Ok(cfg.tolerances.unwrap_or_default())
        }
    }
}

fn parse_a0(common: &CommonOpts, rank: usize) -> Result<GeneratorVector, String> {
    let raw = common
        .a0
        .as_ref()
        .ok_or_else(|| "--a0 is required for this command".to_string())?;
    let a0 = GeneratorVector::parse(raw).map_err(|e| format!("invalid --a0: {e}"))?;
    if a0.rank() != rank {
        return Err(format!("--a0 has rank {}, model expects {rank}", a0.rank()));
    }
    Ok(a0)
}

fn write_out(dir: &Option<PathBuf>, name: &str, contents: &str) -> Result<(), String> {
    match dir {
        None => {
            println!("{contents}");
            Ok(())
        }
        Some(d) => {
            fs::create_dir_all(d).map_err(|e| format!("cannot create {}: {e}", d.display()))?;
            let path = d.join(name);
            fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
    }
}

fn cmd_describe(common: &CommonOpts) -> Result<u8, String> {
    let model = match load_model(&common.model) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INPUT);
        }
    };
    println!("model: {}", model.kind_name());
    println!("torus rank: {}", model.rank());
    println!("complex dimension: {}", model.complex_dim());
    println!("charts: {}", model.chart_count());
    println!("fixed points: {}", model.fixed_points().len());
    for fp in model.fixed_points() {
        let weights: Vec<String> = fp.weights.iter().map(|w| w.to_string()).collect();
        println!(
            "  {} (chart {}): weights {}",
            fp.label,
            model.chart_label(fp.chart),
            weights.join(" ")
        );
    }
    if let Some(a0_raw) = &common.a0 {
        let a0 = GeneratorVector::parse(a0_raw).map_err(|e| format!("invalid --a0: {e}"))?;
        let report = verify_hyperbolic(&model, &a0).map_err(|e| e.to_string())?;
        println!("hyperbolic for a0 = {a0}: {}", report.verdict.pass);
        for row in &report.exponent_table {
            println!(
                "  {} weight ({}) pairing {} scaled {:.6}",
                row.fixed_point,
                row.weight.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
                row.pairing,
                row.scaled
            );
        }
    }
    Ok(EXIT_OK)
}

fn genericity_exit(e: &Error) -> Option<u8> {
    match e {
        Error::NotGeneric(_) | Error::ExponentTie(_) => Some(EXIT_GENERICITY),
        _ => None,
    }
}

fn cmd_decompose(common: &CommonOpts, poset_seeds: usize) -> Result<u8, String> {
    let model = match load_model(&common.model) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INPUT);
        }
    };
    if !model.supports_flow() {
        eprintln!("decompose requires a flowable model (projective or toric)");
        return Ok(EXIT_INPUT);
    }
    let a0 = match parse_a0(common, model.rank()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INPUT);
        }
    };
    let tolerances = load_tolerances(&common.config)?;
    let settings = RunSettings {
        seed: common.seed,
        sample_count: common.samples,
        poset_seeds_per_point: poset_seeds,
        equivariance_trials: 300,
        tolerances,
    };
    let report = match decompose(&model, &a0, &settings) {
        Ok(r) => r,
        Err(e) => {
            if let Some(code) = genericity_exit(&e) {
                eprintln!("genericity error: {e}");
                return Ok(code);
            }
            return Err(e.to_string());
        }
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    write_out(&common.out, "report.json", &json)?;
    write_out(&common.out, "poset.dot", &report.poset_dot())?;
    // basins.csv reuses the stratified sample stream of the report
    let samples = sample_stratified(&model, settings.sample_count, &mut rng_for(settings.seed, 1));
    let basins = basin_classify(&model, &a0, &samples, &settings.tolerances)
        .map_err(|e| e.to_string())?;
    write_out(&common.out, "basins.csv", &basins_csv(&basins, &model))?;
    for (name, v) in &report.verdicts {
        println!("{}: {}", name, if v.pass { "pass" } else { "FAIL" });
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_VERIFICATION })
}

fn cmd_verify(which: &str, common: &CommonOpts, trials: usize) -> Result<u8, String> {
    let known = ["covering", "equivariance", "hyperbolic", "convergence", "decay", "all"];
    if !known.contains(&which) {
        eprintln!("unknown suite '{which}'; expected one of {known:?}");
        return Ok(EXIT_INPUT);
    }
    let model = match load_model(&common.model) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INPUT);
        }
    };
    let tolerances = load_tolerances(&common.config)?;
    let flowable = model.supports_flow();
    let needs_a0 = match which {
        "hyperbolic" | "convergence" | "decay" => true,
        "all" => flowable,
        "equivariance" => flowable,
        _ => false,
    };
    let a0 = if needs_a0 || common.a0.is_some() {
        match parse_a0(common, model.rank()) {
            Ok(v) => Some(v),
            Err(e) => {
                if needs_a0 {
                    eprintln!("{e}");
                    return Ok(EXIT_INPUT);
                }
                None
            }
        }
    } else {
        None
    };
    if matches!(which, "convergence" | "decay") && !flowable {
        eprintln!("suite '{which}' requires a flowable model (projective or toric)");
        return Ok(EXIT_INPUT);
    }

    let mut verdicts: BTreeMap<String, Verdict> = BTreeMap::new();
    let run_covering = matches!(which, "covering" | "all");
    let run_equivariance = matches!(which, "equivariance" | "all");
    let run_hyperbolic = matches!(which, "hyperbolic") || (which == "all" && a0.is_some());
    let run_convergence = matches!(which, "convergence") || (which == "all" && flowable);
    let run_decay = matches!(which, "decay") || (which == "all" && flowable);

    if run_covering {
        let samples = sample_stratified(&model, common.samples, &mut rng_for(common.seed, 1));
        let report = verify_covering(&model, &samples, None);
        for (chart, hits) in &report.per_chart_hits {
            println!("covering: chart {chart} hit by {hits}/{} samples", report.total_samples);
        }
        verdicts.insert("covering".into(), report.verdict);
    }
    if run_equivariance {
        let mut rng = rng_for(common.seed, 2);
        let v = verify_all_charts_equivariance(&model, trials, tolerances.chart_equivariance, &mut rng)
            .map_err(|e| e.to_string())?;
        verdicts.insert("chart_equivariance".into(), v);
        if flowable {
            let a0 = a0.as_ref().expect("gated by needs_a0");
            match equiflow::flow::flow_equivariance_check(&model, a0, trials, tolerances.flow_identity, &mut rng) {
                Ok(v) => {
                    verdicts.insert("flow_equivariance".into(), v);
                }
                Err(e) => {
                    if let Some(code) = genericity_exit(&e) {
                        eprintln!("genericity error: {e}");
                        return Ok(code);
                    }
                    return Err(e.to_string());
                }
            }
        }
    }
    if run_hyperbolic {
        let a0 = a0.as_ref().expect("gated");
        let report = verify_hyperbolic(&model, a0).map_err(|e| e.to_string())?;
        verdicts.insert("hyperbolic".into(), report.verdict);
    }
    if run_convergence {
        let a0 = a0.as_ref().expect("gated");
        let samples = sample_stratified(&model, common.samples, &mut rng_for(common.seed, 3));
        match verify_convergence_condition(&model, a0, &samples, &tolerances) {
            Ok(report) => {
                verdicts.insert("convergence_fixed_set".into(), report.fixed_set_verdict);
                verdicts.insert("convergence_separatrix".into(), report.separatrix_verdict);
                verdicts.insert("convergence_limits".into(), report.limits_verdict);
            }
            Err(e) => {
                if let Some(code) = genericity_exit(&e) {
                    eprintln!("genericity error: {e}");
                    return Ok(code);
                }
                return Err(e.to_string());
            }
        }
    }
    if run_decay {
        let a0 = a0.as_ref().expect("gated");
        let mut rng = rng_for(common.seed, 4);
        match verify_norm_decay(&model, a0, common.samples.min(100), &tolerances, &mut rng) {
            Ok(v) => {
                verdicts.insert("norm_decay".into(), v);
            }
            Err(e) => {
                if let Some(code) = genericity_exit(&e) {
                    eprintln!("genericity error: {e}");
                    return Ok(code);
                }
                return Err(e.to_string());
            }
        }
        let mut rng = rng_for(common.seed, 5);
        let v = verify_closed_form_agreement(&model, a0, 100, tolerances.metric_closed_form, &mut rng)
            .map_err(|e| e.to_string())?;
        verdicts.insert("metric_closed_form".into(), v);
        if common.out.is_some() {
            write_decay_curves(&model, a0, common, &tolerances)?;
        }
    }

    let all_pass = verdicts.values().all(|v| v.pass);
    for (name, v) in &verdicts {
        println!(
            "{}: {} (max violation {:.3e})",
            name,
            if v.pass { "pass" } else { "FAIL" },
            v.max_violation
        );
        for w in &v.witnesses {
            println!("  witness: {w}");
        }
    }
    if common.out.is_some() {
        let doc = serde_json::json!({
            "convention": equiflow::SIGN_CONVENTION,
            "suite": which,
            "seed": common.seed,
            "verdicts": verdicts,
        });
        let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
        write_out(&common.out, "verdicts.json", &json)?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFICATION })
}

/// Decay curves (trajectory, s, global field norm) for a handful of samples,
/// one block per trajectory, for external plotting.
fn write_decay_curves(
    model: &Model,
    a0: &GeneratorVector,
    common: &CommonOpts,
    tolerances: &ToleranceSet,
) -> Result<(), String> {
    let table = ExponentTable::new(model, a0).map_err(|e| e.to_string())?;
    let pou = equiflow::metric::PartitionOfUnity::new(tolerances.bump_radius);
    let horizon = tolerances.decay_horizon_factor / table.min_abs_exponent();
    let grid: Vec<f64> = (0..=40).map(|k| horizon * k as f64 / 40.0).collect();
    let mut rng = rng_for(common.seed, 6);
    let samples = equiflow::sampling::sample_generic_batch(model, 5, &mut rng);
    let mut csv = String::from("trajectory,s,norm\n");
    for (idx, x) in samples.iter().enumerate() {
        let curve = equiflow::metric::decay_curve(model, &table, &pou, x, &grid, tolerances.switch_margin)
            .map_err(|e| e.to_string())?;
        for (s, norm) in curve {
            csv.push_str(&format!("{idx},{s:.6},{norm:.17e}\n"));
        }
    }
    write_out(&common.out, "decay.csv", &csv)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    if let Ok(re) = t.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    if let Some(im_str) = t.strip_suffix('i') {
        // pure imaginary or a±bi
        for split in (1..im_str.len()).rev() {
            let (head, tail) = im_str.split_at(split);
            if !tail.starts_with('+') && !tail.starts_with('-') {
                continue;
            }
            if let (Ok(re), Ok(im)) = (head.parse::<f64>(), parse_signed(tail)) {
                return Ok(Complex64::new(re, im));
            }
        }
        let im = parse_signed(im_str)?;
        return Ok(Complex64::new(0.0, im));
    }
    Err(format!("cannot parse complex number '{s}'"))
}

fn parse_signed(s: &str) -> Result<f64, String> {
    match s {
        "+" | "" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}")),
    }
}

fn parse_start(model: &Model, start: &str) -> Result<Point, String> {
    if let Some(rest) = start.strip_prefix("chart:") {
        let (idx_str, coords_str) = rest
            .split_once(':')
            .ok_or_else(|| "expected chart:K:w1,w2,...".to_string())?;
        let idx: usize = idx_str.parse().map_err(|e| format!("bad chart index: {e}"))?;
        let coords = coords_str
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>, _>>()?;
        return model
            .chart_unmap(equiflow::models::ChartId(idx), &coords)
            .map_err(|e| e.to_string());
    }
    let entries = start
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()?;
    match model {
        Model::Projective(m) => Ok(Point::Projective(
            m.normalize(&entries).map_err(|e| e.to_string())?,
        )),
        Model::Toric(_) => model
            .chart_unmap(equiflow::models::ChartId(0), &entries)
            .map_err(|e| e.to_string()),
        Model::Sphere(_) => Err("flows are not supported on sphere models".into()),
    }
}

fn cmd_flow(
    common: &CommonOpts,
    start: &str,
    s_range: &str,
    rows: usize,
    step: Option<f64>,
) -> Result<u8, String> {
    let model = match load_model(&common.model) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INPUT);
        }
    };
    if !model.supports_flow() {
        eprintln!("flow requires a flowable model (projective or toric)");
        return Ok(EXIT_INPUT);
    }
    let a0 = match parse_a0(common, model.rank()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INPUT);
        }
    };
    let tolerances = load_tolerances(&common.config)?;
    let x = match parse_start(&model, start) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("invalid --start: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    let (s0, s1) = match s_range.split_once(':') {
        Some((a, b)) => match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(a), Ok(b)) if b > a => (a, b),
            _ => {
                eprintln!("invalid --s-range '{s_range}', expected a:b with b > a");
                return Ok(EXIT_INPUT);
            }
        },
        None => {
            eprintln!("invalid --s-range '{s_range}', expected a:b");
            return Ok(EXIT_INPUT);
        }
    };
    let table = match ExponentTable::new(&model, &a0) {
        Ok(t) => t,
        Err(e) => return Err(e.to_string()),
    };
    if let Err(e) = table.require_generic() {
        eprintln!("genericity error: {e}");
        return Ok(EXIT_GENERICITY);
    }
    let opts = TrajectoryOptions {
        step: step.unwrap_or(tolerances.rk4_step),
        max_time: tolerances.horizon_factor,
        switch_margin: tolerances.switch_margin,
        tolerance: tolerances.limit_detection,
    };

    let n = model.complex_dim();
    let mut header = vec!["s".to_string(), "chart".to_string()];
    for i in 1..=n {
        header.push(format!("x_{i}"));
        header.push(format!("y_{i}"));
    }
    for i in 1..=n {
        header.push(format!("rk4_x_{i}"));
        header.push(format!("rk4_y_{i}"));
    }
    header.push("deviation".to_string());
    let mut csv = header.join(",");
    csv.push('\n');

    let start_chart = to_chart_point(&model, &x).map_err(|e| e.to_string())?;
    let mut rk4_state = flow_rk4_in_charts(&model, &table, &start_chart, s0, &opts).map_err(|e| e.to_string())?;
    let rows = rows.max(2);
    let ds = (s1 - s0) / (rows - 1) as f64;
    let mut max_deviation = 0.0f64;
    for k in 0..rows {
        let s = s0 + k as f64 * ds;
        let exact = flow_exact_in_charts(&model, &table, &start_chart, s, opts.switch_margin)
            .map_err(|e| e.to_string())?;
        if k > 0 {
            rk4_state = flow_rk4_in_charts(&model, &table, &rk4_state, ds, &opts).map_err(|e| e.to_string())?;
        }
        let exact_pt = from_chart_point(&model, &exact).map_err(|e| e.to_string())?;
        let rk4_pt = from_chart_point(&model, &rk4_state).map_err(|e| e.to_string())?;
        let deviation = model.distance(&exact_pt, &rk4_pt).map_err(|e| e.to_string())?;
        max_deviation = max_deviation.max(deviation);
        let rk4_in_exact_chart = model
            .transition(rk4_state.chart, exact.chart, &rk4_state.coords)
            .unwrap_or_else(|_| rk4_state.coords.clone());
        let mut row = vec![format!("{s:.6}"), model.chart_label(exact.chart)];
        for w in &exact.coords {
            row.push(format!("{:.17e}", w.re));
            row.push(format!("{:.17e}", w.im));
        }
        for w in &rk4_in_exact_chart {
            row.push(format!("{:.17e}", w.re));
            row.push(format!("{:.17e}", w.im));
        }
        row.push(format!("{deviation:.3e}"));
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_out(&common.out, "trajectory.csv", &csv)?;

    // limits of the start point in both directions
    let mut limits = Vec::new();
    for dir in [Direction::Forward, Direction::Backward] {
        match limit_by_trajectory(&model, &table, &x, dir, &opts) {
            Ok(outcome) => limits.push(serde_json::json!({
                "point_id": outcome.fixed_point.0,
                "label": model.fixed_point(outcome.fixed_point).map(|fp| fp.label.clone()).unwrap_or_default(),
                "direction": match dir { Direction::Forward => "forward", Direction::Backward => "backward" },
                "s_reached": outcome.s_reached,
            })),
            Err(e) => limits.push(serde_json::json!({
                "direction": match dir { Direction::Forward => "forward", Direction::Backward => "backward" },
                "error": e.to_string(),
            })),
        }
    }
    if common.out.is_some() {
        let doc = serde_json::json!({
            "convention": equiflow::SIGN_CONVENTION,
            "limits": limits,
        });
        let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
        write_out(&common.out, "limits.json", &json)?;
    }
    eprintln!("max deviation exact vs RK4: {max_deviation:.3e}");
    Ok(EXIT_OK)
}
