use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use audience_core::copula::{generate, make_scenario, CorrelationLevel, MarginalShape, ScenarioConfig, TimestampPlan};
use audience_core::data::{hour_of, SchemaMode, TargetDefinition, TimeWindow, TransactionLog, DAY, HOUR};
use audience_core::estimator::{build_store, load_store, save_store, Estimator};
use audience_core::eval::{run_benchmark, BenchmarkConfig, FB_THRESHOLD};
use audience_core::mining::{mine, render_fis, Algorithm, MiningConfig, Threshold};
use audience_core::Error;

use crate::config::Config;
use crate::{BuildStoreArgs, Cli, CliError, Command, EvaluateArgs, ForecastArgs, MineArgs, SimulateArgs};

type Res<T = ()> = Result<T, CliError>;

pub fn run(cli: Cli) -> Res {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let threads = cfg.pick(cli.threads, "threads")?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Simulate(a) => simulate(a, &cfg, &mut out),
        Command::Mine(a) => mine_cmd(a, &cfg, threads.unwrap_or(1), &mut out),
        Command::BuildStore(a) => build_store_cmd(a, &cfg, &mut out),
        Command::Forecast(a) => forecast(a, &cfg, &mut out),
        Command::Evaluate(a) => evaluate(a, &cfg, &mut out),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> Res<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required")))
}

fn load_log(path: &Path) -> Res<TransactionLog> {
    TransactionLog::load_csv(path, SchemaMode::Inferred).with_context(|| format!("loading {}", path.display())).map_err(Into::into)
}

fn write_file(path: &Path, body: &str) -> Res {
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn simulate(a: SimulateArgs, cfg: &Config, out: &mut impl Write) -> Res {
    let k = required(cfg.pick(a.attrs, "attrs")?, "attrs")?;
    let any = cfg.flag(a.attrs_any, "attrs-any")?;
    let corr = cfg.pick(a.corr, "corr")?.unwrap_or(CorrelationLevel::High);
    let shape = cfg.pick(a.marginals, "marginals")?.unwrap_or(MarginalShape::Steep);
    let rows = required(cfg.pick(a.rows, "rows")?, "rows")?;
    let seed = cfg.pick(a.seed, "seed")?.unwrap_or(0);
    let plan = cfg.pick(a.timestamps, "timestamps")?.unwrap_or(TimestampPlan::Uniform { start: 0, end: 7 * DAY });
    let path = required(cfg.pick(a.out, "out")?, "out")?;
    let mut sc = ScenarioConfig::new(k, corr, shape, rows, seed);
    if let Some(v) = cfg.pick(a.values, "values")? {
        sc = sc.with_values(v);
    }
    sc.validate(!any).map_err(|e| usage(e.to_string()))?;
    let spec = make_scenario(&sc)?;
    let log = generate(&spec, rows, seed, plan)?;
    log.write_csv(&path).with_context(|| format!("writing {}", path.display()))?;
    write!(out, "{}", spec.summary())?;
    writeln!(out, "STAT rows={} attrs={k} corr={corr} marginals={shape} seed={seed}", log.len())?;
    Ok(())
}

fn mine_cmd(a: MineArgs, cfg: &Config, threads: usize, out: &mut impl Write) -> Res {
    let mut algos = a.algos;
    if algos.is_empty() {
        algos.push(cfg.pick(None, "algo")?.unwrap_or(Algorithm::EclatCc));
    }
    let support: Threshold = required(cfg.pick(a.support, "support")?, "support")?;
    let input: PathBuf = required(cfg.pick(a.input, "in")?, "in")?;
    let bench = cfg.flag(a.bench, "bench")?;
    let runs = if bench { cfg.pick(a.runs, "runs")?.unwrap_or(3) } else { 1 };
    if runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    let warmup = cfg.flag(a.warmup, "warmup")?;
    let max_size = cfg.pick(a.max_size, "max-size")?;

    let log = load_log(&input)?;
    let mut first = None;
    for algo in algos {
        let mut mc = MiningConfig::new(algo, support).with_threads(threads);
        if let Some(m) = max_size {
            mc = mc.with_max_size(m);
        }
        if warmup {
            mine(&log, &mc)?;
        }
        let mut times = Vec::with_capacity(runs);
        let mut last = None;
        for _ in 0..runs {
            let (records, stats) = mine(&log, &mc)?;
            times.push(stats.wall_time);
            last = Some((records, stats));
        }
        let (records, stats) = last.expect("runs >= 1");
        let mean = times.iter().sum::<f64>() / runs as f64;
        let each: Vec<String> = times.iter().map(|t| t.to_string()).collect();
        writeln!(
            out,
            "STAT algo={algo} itemsets={} runs={runs} mean_wall_time={mean} run_times={} {stats}",
            records.len(),
            each.join(",")
        )?;
        if first.is_none() {
            first = Some(records);
        }
    }
    if let Some(path) = cfg.pick(a.out, "out")? {
        write_file(&path, &render_fis(&first.unwrap_or_default(), log.schema()))?;
    }
    Ok(())
}

fn default_train(log: &TransactionLog, start: Option<i64>, end: Option<i64>) -> Res<TimeWindow> {
    let first = *log.timestamps().first().ok_or_else(|| CliError::Runtime(anyhow::anyhow!("the log is empty")))?;
    let start = start.unwrap_or(hour_of(first) * HOUR);
    let end = end.unwrap_or(start + 6 * DAY);
    TimeWindow::new(start, end).map_err(|e| usage(e.to_string()))
}

fn build_store_cmd(a: BuildStoreArgs, cfg: &Config, out: &mut impl Write) -> Res {
    let input: PathBuf = required(cfg.pick(a.input, "in")?, "in")?;
    let support: Threshold = required(cfg.pick(a.support, "support")?, "support")?;
    let fis_out: PathBuf = required(cfg.pick(a.fis_out, "fis-out")?, "fis-out")?;
    let params_out: PathBuf = required(cfg.pick(a.params_out, "params-out")?, "params-out")?;
    let log = load_log(&input)?;
    let train = default_train(&log, cfg.pick(a.train_start, "train-start")?, cfg.pick(a.train_end, "train-end")?)?;
    let kappa = support.resolve(log.window(train).len())?;
    let (store, uset) = build_store(&log, train, kappa)?;
    save_store(&store, &uset, &fis_out, &params_out)?;
    writeln!(
        out,
        "STAT kappa={kappa} n_train={} itemsets={} univariates={} window_start={} window_end={}",
        store.n_train(),
        store.len(),
        uset.len(),
        train.start(),
        train.end()
    )?;
    Ok(())
}

fn forecast(a: ForecastArgs, cfg: &Config, out: &mut impl Write) -> Res {
    let fis: PathBuf = required(cfg.pick(a.fis, "fis")?, "fis")?;
    let params: PathBuf = required(cfg.pick(a.params, "params")?, "params")?;
    let target_text: String = required(cfg.pick(a.target, "target")?, "target")?;
    let hours = cfg.pick(a.hours, "hours")?.unwrap_or(24);
    let (store, uset) = load_store(&fis, &params)?;
    let target = TargetDefinition::parse(store.schema(), &target_text).map_err(|e| match e {
        Error::InvalidTarget(_) => usage(e.to_string()),
        other => CliError::Runtime(other.into()),
    })?;
    let start = cfg.pick(a.start, "start")?.unwrap_or(store.window().end());
    let horizon = TimeWindow::new(start, start + hours as i64 * HOUR).map_err(|e| usage(e.to_string()))?;
    let e = Estimator::new(&store, &uset).estimate(&target, horizon)?;
    let chosen = e.chosen_univariate.map_or_else(|| "*".to_string(), |it| store.schema().render_item(it));
    writeln!(out, "target: {}", target.render(store.schema()))?;
    writeln!(out, "point: {}", e.point)?;
    writeln!(out, "sigma: {}", e.sigma)?;
    writeln!(out, "chosen univariate: {chosen}")?;
    writeln!(out, "method: {}", e.method)?;
    writeln!(out, "multiplier: {}", e.multiplier)?;
    writeln!(
        out,
        "STAT point={} sigma={} chosen={chosen} method={} multiplier={} univariate_forecast={} hours={hours}",
        e.point, e.sigma, e.method, e.multiplier, e.univariate_forecast
    )?;
    Ok(())
}

fn evaluate(a: EvaluateArgs, cfg: &Config, out: &mut impl Write) -> Res {
    let input: PathBuf = required(cfg.pick(a.input, "in")?, "in")?;
    let dir: PathBuf = required(cfg.pick(a.out, "out")?, "out")?;
    let defaults = BenchmarkConfig::default();
    let bc = BenchmarkConfig {
        kappa: cfg.pick(a.support, "support")?.unwrap_or(defaults.kappa),
        fis_count: cfg.pick(a.fis_count, "fis-count")?.unwrap_or(defaults.fis_count),
        ifis_count: cfg.pick(a.ifis_count, "ifis-count")?.unwrap_or(defaults.ifis_count),
        ifis_kappa: cfg.pick(a.ifis_support, "ifis-support")?,
        seed: cfg.pick(a.seed, "seed")?.unwrap_or(defaults.seed),
        fb_threshold: cfg.pick(a.fb_threshold, "fb-threshold")?.unwrap_or(FB_THRESHOLD),
        start: cfg.pick(a.start, "start")?,
        include_ts: !cfg.flag(a.no_ts, "no-ts")?,
    };
    let log = load_log(&input)?;
    let bench = run_benchmark(&log, &bc)?;
    bench.write(&dir).with_context(|| format!("writing reports to {}", dir.display()))?;
    write!(out, "{}", bench.report.summary_text())?;
    writeln!(
        out,
        "STAT kappa={} ifis_kappa={} itemsets={} univariates={} fis={} ifis={} elapsed_seconds={:.3}",
        bench.kappa,
        bench.ifis_kappa,
        bench.store.len(),
        bench.univariates.len(),
        bench.fis.len(),
        bench.ifis.len(),
        bench.report.elapsed_seconds.unwrap_or(0.0)
    )?;
    Ok(())
}
