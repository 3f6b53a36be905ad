use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rrs_cli::config::{Resolved, RunConfig};
use rrs_cli::repro::{write_figure, Figure};
use rrs_cli::sweep::{evaluate, pa_aperture, rrs_aperture, run_sweep};
use rrs_cli::Quantity;
use rrs_core::em_model::cauchy_snr_bound;
use rrs_core::power_analysis::{crossover_rates, element_power_ratio, power_pa, power_rrs, verdict};
use rrs_core::rate_analysis::{farfield_thresholds, rrs_farfield_asymptote};

#[derive(Parser)]
#[command(name = "rrs", version, about = "Refractive-surface versus phased-array rate and power analysis")]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set tx_power_dbm=40`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory for CSV and plot files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// RRS rate: exact element sum, integral, bounds and far-field form.
    RateRrs,
    /// Phased-array rate: exact sum, integral and far-field form.
    RatePa,
    /// Lower bound, integral, upper bound and Cauchy bound for the RRS.
    Bounds,
    /// Power draw of both technologies at the configured sizes.
    Power,
    /// Rates where the RRS draws less power than the array.
    Crossover,
    /// Size both technologies for a rate and compare their power.
    Verdict {
        /// Required rate in bit/s/Hz; defaults to the config's `rate`.
        rate: Option<f64>,
    },
    /// Evaluate `quantity` along the configured sweep axis.
    Sweep,
    /// Reproduce figures as CSV plus gnuplot scripts.
    Repro {
        #[arg(required = true, value_name = "FIGURE")]
        figures: Vec<Figure>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let mut overrides = cli.set.clone();
    if let Some(tol) = cli.tol {
        overrides.push(format!("rel_tol = {tol}"));
    }
    Ok(RunConfig::parse_with_overrides(&text, &overrides)?)
}

fn line(label: &str, value: impl std::fmt::Display) {
    println!("{label:<28} {value}");
}

fn show(label: &str, r: &Resolved, q: Quantity, columns: &[&str]) {
    match evaluate(q, r) {
        Ok(v) => {
            let parts: Vec<String> = columns.iter().zip(&v).map(|(c, x)| format!("{c}={x:.6}")).collect();
            line(label, parts.join("  "));
        }
        Err(e) => line(label, format!("unavailable: {e}")),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = load_config(&cli)?;

    match &cli.command {
        Command::RateRrs => {
            let r = config.resolve(None)?;
            let (_, n) = rrs_aperture(&r);
            line("rrs elements", n);
            show("exact sum", &r, Quantity::RateRrsExact, &["rate", "snr"]);
            show("integral", &r, Quantity::RateRrsQuadrature, &["rate", "snr", "err"]);
            show("lower bound (disc)", &r, Quantity::RateRrsLower, &["rate", "snr", "err"]);
            show("upper bound (envelope)", &r, Quantity::RateRrsUpper, &["rate", "snr", "err"]);
            show("far-field closed form", &r, Quantity::RateRrsFarfield, &["rate", "snr"]);
        }
        Command::RatePa => {
            let r = config.resolve(None)?;
            let (_, n) = pa_aperture(&r);
            line("array elements", n);
            show("exact sum", &r, Quantity::RatePaExact, &["rate", "snr"]);
            show("integral", &r, Quantity::RatePaQuadrature, &["rate", "snr", "err"]);
            show("far-field closed form", &r, Quantity::RatePaFarfield, &["rate", "snr"]);
        }
        Command::Bounds => {
            let r = config.resolve(None)?;
            show("rates", &r, Quantity::Bounds, &["lower", "integral", "upper"]);
            show("exact sum", &r, Quantity::RateRrsExact, &["rate", "snr"]);
            if r.rrs_elements.is_none() {
                let bound = cauchy_snr_bound(&r.pair.scene)?;
                line("cauchy snr bound", format!("{bound:.6e}"));
            }
        }
        Command::Power => {
            let r = config.resolve(None)?;
            let (_, n_r) = rrs_aperture(&r);
            let (_, n_p) = pa_aperture(&r);
            let pr = power_rrs(&r.model, n_r);
            let pp = power_pa(&r.model, n_p);
            line("rrs elements / watts", format!("{n_r} / {:.6}{}", pr.watts, if pr.exceeds_budget { "  (over budget)" } else { "" }));
            line("array elements / watts", format!("{n_p} / {:.6}{}", pp.watts, if pp.exceeds_budget { "  (over budget)" } else { "" }));
            line("l_pw", format!("{:.6} (Q = {})", element_power_ratio(&r.model)?, r.model.group_size));
        }
        Command::Crossover => {
            let r = config.resolve(None)?;
            let c = crossover_rates(&r.pair, &r.model)?;
            let t = farfield_thresholds(&r.pair)?;
            line("l_pw", format!("{:.6} (Q = {})", c.l_pw, c.group_size));
            line("far-field limits (rrs, pa)", format!("{:.1}, {:.1} elements", t.rrs_element_limit, t.pa_element_limit));
            line("rate threshold", format!("{:.6}", c.rate_threshold));
            line("rrs asymptote", format!("{:.6}", rrs_farfield_asymptote(&r.pair.scene)?));
            line("g minimum", format!("{:.6} at C = {:.6}", c.g_min, c.g_min_rate));
            let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.9}"));
            line("c_e1 / c_e2", format!("{} / {}", opt(c.c_e1), opt(c.c_e2)));
            match c.rrs_wins_interval {
                Some((a, b)) => line("rrs wins on", format!("[{a:.6}, {b:.6}]")),
                None => line("rrs wins on", "empty (array always cheaper in the window)"),
            }
        }
        Command::Verdict { rate } => {
            let r = config.resolve(None)?;
            let Some(rate) = rate.or(r.rate) else {
                bail!("no rate given; pass it as an argument or set `rate`");
            };
            let v = verdict(rate, &r.pair, &r.model, &r.sizing)?;
            line("verdict", v.verdict);
            line("rrs count / method", format!("{:.3} ({} elements) / {}", v.rrs_sizing.count, v.rrs_sizing.elements, v.rrs_sizing.method));
            line("array count / method", format!("{:.3} ({} elements) / {}", v.pa_sizing.count, v.pa_sizing.elements, v.pa_sizing.method));
            line("rrs / array watts", format!("{:.6} / {:.6}", v.rrs_power.watts, v.pa_power.watts));
            line("g / l_pw", format!("{:.6} / {:.6} (Q = {})", v.count_ratio, v.l_pw, r.model.group_size));
        }
        Command::Sweep => {
            let table = run_sweep(&config)?;
            match &cli.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    let name = config.output.clone().unwrap_or_else(|| "sweep.csv".to_string());
                    let path = dir.join(name);
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    table.write_csv(io::BufWriter::new(file))?;
                    eprintln!("wrote {}", path.display());
                }
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    table.write_csv(&mut lock)?;
                    lock.flush()?;
                }
            }
        }
        Command::Repro { figures } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("repro"));
            for &figure in figures {
                for path in write_figure(figure, &config, &dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
        }
    }
    Ok(())
}
