//! The `memkick` command line.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 for numeric failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::analysis::{
    bifurcation_scan, detect_period, divergence_exponent, run_trajectory, with_param, ScanConfig,
    DEFAULT_DELTA0, DEFAULT_PERIOD_TOL,
};
use crate::analytic::growth_solution;
use crate::config::{Params, CONFIG_ENV};
use crate::econ_model::{
    normalize_memory, FractionalOrder, ForcingSpec, GCase, GrowthParams, OutputFunction, PriceSpec,
};
use crate::error::{Error, Result};
use crate::maps::{
    r_initial_state, simulate, Engine, Fault, MapSpec, SeedStep, SimOptions, StateVector,
    Trajectory,
};
use crate::special_fn::{kernel_table, mittag_leffler, MlParams};
use crate::verify::{criteria_verdicts, run_checks};

const MAP_KEYS: &[(&str, &str)] = &[
    ("map", "map family: logistic|burst|generalized|logistic-memory"),
    ("engine", "evaluation route: direct|incremental"),
    ("seed_step", "first incremental step: volterra|incremental"),
    ("lambda", "logistic parameter [3.2]"),
    ("z0", "initial logistic state [0.3]"),
    ("m", "net-investment norm, 0 < m < 1 [0.5]"),
    ("v", "accelerator coefficient [1]"),
    ("T", "kick period [1]"),
    ("alpha", "order of the memory [0.5]"),
    ("a", "slope of F(Y) = a·Y - b [1]"),
    ("b", "offset of F(Y) = a·Y - b [0.5]"),
    ("p", "weight of the smooth price [1 - q, or 0.5]"),
    ("q", "weight of the price bursts [1 - p]"),
    ("g_case", "smooth price G: constant|power"),
    ("P0", "constant price level [1]"),
    ("rho", "power-law price coefficient [1]"),
    ("j", "power-law price exponent [1]"),
    ("forcing", "C(t): constant|power|mittag-leffler"),
    ("C", "forcing coefficient [1]"),
    ("beta", "forcing exponent [0 for power, 1 for mittag-leffler]"),
    ("mu", "Mittag-Leffler order of the forcing [1]"),
    ("gamma", "Mittag-Leffler rate of the forcing [0]"),
    ("y0", "initial output [0.5]"),
    ("y0_d1", "initial output derivative, 1 < alpha <= 2 [0]"),
];

fn opt(key: &'static str, help: &'static str) -> Arg {
    Arg::new(key)
        .long(key.replace('_', "-"))
        .help(help)
        .action(ArgAction::Set)
        .value_name("VALUE")
}

fn with_keys(cmd: Command, keys: &[(&'static str, &'static str)]) -> Command {
    keys.iter().fold(cmd, |c, (k, h)| c.arg(opt(k, h)))
}

fn map_command(name: &'static str, about: &'static str) -> Command {
    with_keys(Command::new(name).about(about), MAP_KEYS)
}

pub fn command() -> Command {
    Command::new("memkick")
        .about("Discrete maps with power-law memory for fractional growth models")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("PATH")
                .help("flat key = value config file (overridden by flags)"),
        )
        .subcommand(with_keys(
            map_command("simulate", "Iterate a map and write its orbit as CSV"),
            &[("n_steps", "number of steps [100]"), ("out", "output CSV path [stdout]")],
        ))
        .subcommand(with_keys(
            map_command("bifurcate", "Scan a parameter and record long-run orbit values"),
            &[
                ("param", "parameter to scan [lambda]"),
                ("from", "lower end of the scan [2.5]"),
                ("to", "upper end of the scan [4.0]"),
                ("grid", "number of grid points [1500]"),
                ("transient", "unrecorded steps per point [1000]"),
                ("sample", "recorded steps per point [128]"),
                ("out", "output CSV path [stdout]"),
            ],
        ))
        .subcommand(with_keys(
            map_command("lyapunov", "Estimate the divergence exponent of an orbit"),
            &[
                ("n_steps", "number of steps [10000]"),
                ("delta0", "initial separation [1e-8]"),
                ("renorm_every", "steps between renormalizations [1]"),
            ],
        ))
        .subcommand(with_keys(
            map_command("period", "Detect the period of the orbit tail"),
            &[
                ("n_steps", "number of steps [10000]"),
                ("tail", "samples examined [256]"),
                ("tol", "relative tolerance [1e-8]"),
            ],
        ))
        .subcommand(with_keys(
            Command::new("mlf").about("Evaluate the Mittag-Leffler function E_{alpha,beta}(z)"),
            &[
                ("alpha", "first parameter [1]"),
                ("beta", "second parameter [1]"),
                ("z", "argument"),
                ("tol", "series tolerance [1e-14]"),
                ("max_terms", "series term limit [2000]"),
            ],
        ))
        .subcommand(with_keys(
            Command::new("kernel").about("Tabulate the memory kernel V_alpha(z)"),
            &[
                ("alpha", "kernel order"),
                ("nmax", "largest z [10]"),
                ("out", "output CSV path [stdout]"),
            ],
        ))
        .subcommand(with_keys(
            Command::new("solve-growth").about("Closed-form natural growth with constant price"),
            &[
                ("alpha", "order of the equation"),
                ("rate", "growth rate m·P/v"),
                ("t", "time at which to evaluate"),
                ("y0", "initial output"),
                ("y0_d1", "initial output derivative, 1 < alpha <= 2 [0]"),
                ("sample", "number of sample times from 0 to t-max"),
                ("t_max", "last sample time"),
                ("out", "output CSV path [stdout]"),
            ],
        ))
        .subcommand(
            Command::new("verify")
                .about("Run the verification suite and print a pass/fail table")
                .arg(
                    Arg::new("fault")
                        .long("fault")
                        .hide(true)
                        .value_parser(["none", "flip-kernel-sign", "gamma-shift"]),
                ),
        )
}

/// `printf("%.17g")`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        trim_zeros(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn flag_values(m: &ArgMatches) -> Vec<(String, String)> {
    m.ids()
        .map(|id| id.as_str())
        .filter(|id| *id != "config")
        .filter(|id| m.value_source(id) == Some(ValueSource::CommandLine))
        .filter_map(|id| {
            m.get_one::<String>(id)
                .map(|v| (id.to_string(), v.clone()))
        })
        .collect()
}

fn output(params: &Params) -> Result<Box<dyn Write>> {
    match params.get("out") {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| Error::invalid("out", "cannot create output file", format!("{path}: {e}")))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn csv_writer(params: &Params) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new().from_writer(output(params)?))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::invalid("out", "write failed", e)
}

fn sim_options(params: &Params) -> Result<SimOptions> {
    let engine = match params.choice("engine", &["direct", "incremental"])? {
        "direct" => Engine::Direct,
        _ => Engine::Incremental,
    };
    let seed = match params.choice("seed_step", &["volterra", "incremental"])? {
        "volterra" => SeedStep::Volterra,
        _ => SeedStep::Incremental,
    };
    Ok(SimOptions { engine, seed, fault: Fault::None })
}

fn growth(params: &Params) -> Result<GrowthParams> {
    GrowthParams::new(
        params.f64_or("m", 0.5)?,
        params.f64_or("v", 1.0)?,
        params.f64_or("T", 1.0)?,
        params.f64_or("alpha", 0.5)?,
    )
}

fn initial_outputs(params: &Params, g: &GrowthParams) -> Result<Vec<f64>> {
    let mut y = vec![params.f64_or("y0", 0.5)?];
    if g.alpha.bracket_n() == 2 {
        y.push(params.f64_or("y0_d1", 0.0)?);
    } else if g.alpha.bracket_n() > 2 {
        return Err(Error::invalid("alpha", "maps are available for 0 < alpha <= 2", g.alpha.value()));
    } else if params.has("y0_d1") {
        return Err(Error::invalid("y0_d1", "only used when 1 < alpha <= 2", params.str_or("y0_d1", "")));
    }
    Ok(y)
}

/// Map spec and initial state described by the parameters.
pub fn build_map(params: &Params) -> Result<(MapSpec, StateVector)> {
    let kind = params.choice("map", &["logistic", "burst", "generalized", "logistic-memory"])?;
    match kind {
        "logistic" => Ok((
            MapSpec::logistic(params.f64_or("lambda", 3.2)?)?,
            StateVector::scalar(params.f64_or("z0", 0.3)?),
        )),
        "logistic-memory" => {
            let g = growth(params)?;
            let norm = normalize_memory(&g, params.f64_or("a", 1.0)?, params.f64_or("b", 0.5)?)?;
            let mut spec = MapSpec::NormalizedLogisticMemory { norm };
            if let Some(lambda) = params.f64_opt("lambda")? {
                spec = with_param(&spec, "lambda", lambda)?;
            }
            Ok((spec, StateVector::scalar(params.f64_or("z0", 0.3)?)))
        }
        "burst" => {
            let g = growth(params)?;
            let f = OutputFunction::linear(params.f64_or("a", 1.0)?, params.f64_or("b", 0.5)?);
            let init = StateVector::new(initial_outputs(params, &g)?);
            Ok((MapSpec::burst(g, f), init))
        }
        _ => {
            let g = growth(params)?;
            let f = OutputFunction::linear(params.f64_or("a", 1.0)?, params.f64_or("b", 0.5)?);
            let (p, q) = match (params.f64_opt("p")?, params.f64_opt("q")?) {
                (Some(p), Some(q)) => (p, q),
                (Some(p), None) => (p, 1.0 - p),
                (None, Some(q)) => (1.0 - q, q),
                (None, None) => (0.5, 0.5),
            };
            let gc = match params.choice("g_case", &["constant", "power"])? {
                "constant" => GCase::constant(params.f64_or("P0", 1.0)?)?,
                _ => GCase::power(params.f64_or("rho", 1.0)?, params.f64_or("j", 1.0)?)?,
            };
            let c = params.f64_or("C", 1.0)?;
            let forcing = match params.choice("forcing", &["constant", "power", "mittag-leffler"])? {
                "constant" => ForcingSpec::ConstantC { c },
                "power" => ForcingSpec::power(c, params.f64_or("beta", 0.0)?)?,
                _ => ForcingSpec::mittag_leffler(
                    c,
                    params.f64_or("beta", 1.0)?,
                    params.f64_or("mu", 1.0)?,
                    params.f64_or("gamma", 0.0)?,
                )?,
            };
            let init = r_initial_state(&gc, &initial_outputs(params, &g)?)?;
            Ok((MapSpec::generalized(g, PriceSpec::mixed(p, q, gc, f)?, forcing)?, init))
        }
    }
}

fn trajectory_csv(tr: &Trajectory, params: &Params) -> Result<()> {
    let dim = tr.states().first().map_or(1, |s| s.len());
    let generalized = matches!(tr.spec, MapSpec::GeneralizedGrowth { .. });
    let mut header = vec!["n".to_string()];
    if generalized {
        header.push("R".into());
        if dim == 2 {
            header.push("R_d1".into());
        }
        header.push("Y".into());
    } else {
        header.push("Y".into());
        if dim == 2 {
            header.push("Y_d1".into());
        }
    }
    let mut w = csv_writer(params)?;
    w.write_record(&header).map_err(io_err)?;
    for (i, state) in tr.states().iter().enumerate() {
        let mut row = vec![(tr.first_step() + i).to_string()];
        row.extend(state.values().iter().map(|x| fmt_g17(*x)));
        if generalized {
            row.push(fmt_g17(tr.outputs()[i]));
        }
        w.write_record(&row).map_err(io_err)?;
    }
    if let Some(halt) = tr.halt() {
        let mut row = vec!["escaped".to_string(), halt.step.to_string()];
        row.resize(header.len(), String::new());
        w.write_record(&row).map_err(io_err)?;
        eprintln!("orbit stopped at step {} ({:?})", halt.step, halt.reason);
    }
    w.flush().map_err(io_err)
}

fn cmd_simulate(params: &Params) -> Result<()> {
    let (spec, init) = build_map(params)?;
    let n = params.usize_or("n_steps", 100)?;
    let tr = simulate(&spec, init, n, sim_options(params)?)?;
    trajectory_csv(&tr, params)
}

fn cmd_bifurcate(params: &Params) -> Result<()> {
    let (spec, init) = build_map(params)?;
    let cfg = ScanConfig {
        param_name: params.str_or("param", "lambda").to_string(),
        lo: params.f64_or("from", 2.5)?,
        hi: params.f64_or("to", 4.0)?,
        grid_points: params.usize_or("grid", 1500)?,
        n_transient: params.usize_or("transient", 1000)?,
        n_sample: params.usize_or("sample", 128)?,
        init,
        opts: sim_options(params)?,
    };
    let data = bifurcation_scan(&cfg, &spec)?;
    let mut w = csv_writer(params)?;
    w.write_record(["param", "sample_index", "value", "escaped"]).map_err(io_err)?;
    for r in &data.rows {
        w.write_record([
            fmt_g17(r.param),
            r.sample_index.to_string(),
            fmt_g17(r.value),
            r.escaped.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn cmd_lyapunov(params: &Params) -> Result<()> {
    let (spec, init) = build_map(params)?;
    let l = divergence_exponent(
        &spec,
        init,
        params.usize_or("n_steps", 10_000)?,
        params.f64_or("delta0", DEFAULT_DELTA0)?,
        params.usize_or("renorm_every", 1)?,
        sim_options(params)?,
    )?;
    println!("{}", fmt_g17(l));
    Ok(())
}

fn cmd_period(params: &Params) -> Result<()> {
    let (spec, init) = build_map(params)?;
    let n = params.usize_or("n_steps", 10_000)?;
    let tail = params.usize_or("tail", 256)?;
    let tr = run_trajectory(&spec, init, n, tail, sim_options(params)?)?;
    if let Some(h) = tr.halt() {
        return Err(Error::OutOfRange(format!("orbit stopped at step {} ({:?})", h.step, h.reason)));
    }
    println!("{}", detect_period(tr.outputs(), params.f64_or("tol", DEFAULT_PERIOD_TOL)?));
    Ok(())
}

fn cmd_mlf(params: &Params) -> Result<()> {
    let mut p = MlParams::new(params.f64_or("alpha", 1.0)?, params.f64_or("beta", 1.0)?)?;
    p.tol = params.f64_or("tol", p.tol)?;
    p.max_terms = params.usize_or("max_terms", p.max_terms)?;
    let v = mittag_leffler(&p, params.f64_req("z")?)?;
    println!("{}", fmt_g17(v));
    Ok(())
}

fn cmd_kernel(params: &Params) -> Result<()> {
    let table = kernel_table(params.f64_req("alpha")?, params.usize_or("nmax", 10)?)?;
    let mut w = csv_writer(params)?;
    w.write_record(["z", "value"]).map_err(io_err)?;
    for (i, v) in table.values().iter().enumerate() {
        w.write_record([(i + 1).to_string(), fmt_g17(*v)]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn cmd_solve_growth(params: &Params) -> Result<()> {
    let order = FractionalOrder::new(params.f64_req("alpha")?)?;
    let rate = params.f64_req("rate")?;
    let mut init = vec![params.f64_req("y0")?];
    if order.bracket_n() == 2 {
        init.push(params.f64_or("y0_d1", 0.0)?);
    }
    match params.get("sample") {
        None => {
            let y = growth_solution(&order, rate, &init, params.f64_req("t")?)?;
            println!("{}", fmt_g17(y));
            Ok(())
        }
        Some(_) => {
            let n = params.usize_or("sample", 2)?;
            if n < 2 {
                return Err(Error::invalid("sample", "need at least 2 sample times", n));
            }
            let t_max = params.f64_req("t_max")?;
            let mut w = csv_writer(params)?;
            w.write_record(["t", "Y"]).map_err(io_err)?;
            for i in 0..n {
                let t = t_max * i as f64 / (n - 1) as f64;
                let y = growth_solution(&order, rate, &init, t)?;
                w.write_record([fmt_g17(t), fmt_g17(y)]).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

fn cmd_verify(m: &ArgMatches) -> Result<bool> {
    let fault = match m.get_one::<String>("fault").map(String::as_str) {
        Some("flip-kernel-sign") => Fault::FlipKernelSign,
        Some("gamma-shift") => Fault::GammaShift,
        _ => Fault::None,
    };
    let checks = run_checks(fault);
    println!("{:<4} {:<62} {:>12} {:>10}  verdict", "crit", "check", "max_error", "tolerance");
    for c in &checks {
        println!(
            "{:<4} {:<62} {:>12.3e} {:>10.1e}  {}",
            c.criterion,
            c.name,
            c.max_error,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let verdicts = criteria_verdicts(&checks);
    let failed: Vec<String> = verdicts
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(id, _)| id.to_string())
        .collect();
    if failed.is_empty() {
        println!("all {} criteria pass", verdicts.len());
        Ok(true)
    } else {
        println!("failing criteria: {}", failed.join(", "));
        Ok(false)
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

/// Parse `argv` (program name first), run the subcommand and return the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    if name == "verify" {
        return match cmd_verify(sub) {
            Ok(true) => 0,
            Ok(false) => 2,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        };
    }

    let config = matches.get_one::<String>("config").map(PathBuf::from);
    let env_config = std::env::var_os(CONFIG_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let result = Params::layered(flag_values(sub), config.as_deref(), env_config.as_deref()).and_then(
        |params| match name {
            "simulate" => cmd_simulate(&params),
            "bifurcate" => cmd_bifurcate(&params),
            "lyapunov" => cmd_lyapunov(&params),
            "period" => cmd_period(&params),
            "mlf" => cmd_mlf(&params),
            "kernel" => cmd_kernel(&params),
            "solve-growth" => cmd_solve_growth(&params),
            other => unreachable!("unknown subcommand {other}"),
        },
    );
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
