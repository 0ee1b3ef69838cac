//! Command-line front end: `figure`, `sweep`, and `check`.
//!
//! ```text
//! dd-metrology figure <id> [--out DIR] [--set key=value]...
//! dd-metrology sweep --config FILE [--out DIR] [--set key=value]...
//! dd-metrology check
//! ```
//!
//! `figure` runs a named preset and writes `<id>.csv` plus a gnuplot-flavored
//! `<id>.plot` companion; `sweep` does the same for a user config
//! (`sweep.csv`/`sweep.plot`). Config files are flat `key = value` text with
//! `#` comments; `--set` applies the same keys on top. `check` runs the
//! built-in consistency suite and prints one pass/fail line per item.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 numeric failure.
//! `DD_METROLOGY_THREADS` caps sweep parallelism (unset or 0 = all cores).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{run_figure, run_sweep, self_check, Dataset, FigureId, SweepConfig};
use crate::Result;

#[derive(Parser, Debug)]
#[command(
    name = "dd-metrology",
    about = "Spin squeezing and quantum Fisher information for collective spins \
             under dephasing and dynamical-decoupling pulse sequences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct OutputArgs {
    /// Directory for the CSV and plot-script outputs.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override a config key, e.g. `--set time_grid.points=100` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named figure preset (1, 2a, 2b, 3a, 3b, 4, 5a, 5b).
    Figure {
        id: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a sweep described by a config file.
    Sweep {
        /// Flat key = value config file.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in consistency checks and report pass/fail.
    Check,
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path too; those are
            // not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    init_thread_pool();

    let outcome = match cli.command {
        Command::Figure { id, output } => run_figure_command(&id, &output),
        Command::Sweep { config, output } => run_sweep_command(&config, &output),
        Command::Check => run_check_command(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NumericFailure { .. } | Error::AtGridPoint { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("DD_METROLOGY_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                // ignore the error if a pool already exists (tests, repeat calls)
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        } else {
            eprintln!("warning: ignoring unparsable DD_METROLOGY_THREADS={raw}");
        }
    }
}

fn run_figure_command(id: &str, output: &OutputArgs) -> Result<i32> {
    let figure: FigureId = id.parse()?;
    let overrides = parse_overrides(&output.overrides)?;
    let dataset = run_figure(figure, &overrides)?;
    let (csv, plot) = write_outputs(&output.out, figure.name(), &dataset)?;
    println!("wrote {} and {}", csv.display(), plot.display());
    Ok(0)
}

fn run_sweep_command(config_path: &Path, output: &OutputArgs) -> Result<i32> {
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let mut pairs = parse_config_text(&text)?;
    pairs.extend(parse_overrides(&output.overrides)?);
    let config = SweepConfig::from_pairs(&pairs)?;
    let dataset = run_sweep(&config)?;
    let (csv, plot) = write_outputs(&output.out, "sweep", &dataset)?;
    println!("wrote {} and {}", csv.display(), plot.display());
    Ok(0)
}

fn run_check_command() -> Result<i32> {
    let outcomes = self_check();
    let mut all_ok = true;
    for o in &outcomes {
        let label = if o.passed { "PASS" } else { "FAIL" };
        println!("check {:<48} {} ({})", o.name, label, o.detail);
        all_ok &= o.passed;
    }
    if all_ok {
        println!("all {} checks passed", outcomes.len());
        Ok(0)
    } else {
        Err(Error::NumericFailure {
            context: "self-check failed".into(),
            value: f64::NAN,
            achieved_error: f64::NAN,
        })
    }
}

/// Parse `key = value` text: one pair per line, `#` starts a comment, blank
/// lines ignored.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>> {
    raw.iter()
        .map(|item| {
            item.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{item}`")))
        })
        .collect()
}

/// Write `<stem>.csv` and `<stem>.plot` into `dir`, creating it if needed.
/// Rewrites both files from scratch, so identical runs produce identical
/// bytes.
pub fn write_outputs(dir: &Path, stem: &str, dataset: &Dataset) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let plot_path = dir.join(format!("{stem}.plot"));
    std::fs::write(&csv_path, render_csv(dataset))?;
    std::fs::write(&plot_path, render_plot_script(stem, dataset))?;
    Ok((csv_path, plot_path))
}

/// CSV with `#`-prefixed metadata lines, a header row, and 15-significant-digit
/// values. Newlines are LF.
pub fn render_csv(dataset: &Dataset) -> String {
    let mut out = String::new();
    for (key, value) in &dataset.metadata {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    let header: Vec<&str> = dataset.columns.iter().map(|c| c.name.as_str()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..dataset.rows() {
        let mut first = true;
        for col in &dataset.columns {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{:.14e}", col.values[row]));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// A small gnuplot script that draws every column against the first.
fn render_plot_script(stem: &str, dataset: &Dataset) -> String {
    let axis = dataset.columns.first().map_or("t", |c| c.name.as_str());
    let ncols = dataset.columns.len();
    let mut out = String::new();
    out.push_str("#!/usr/bin/env gnuplot\n");
    out.push_str(&format!("# companion line plot for {stem}.csv\n"));
    out.push_str("set datafile separator comma\n");
    out.push_str("set key autotitle columnhead outside\n");
    out.push_str(&format!("set xlabel '{axis}'\n"));
    out.push_str("set grid\n");
    out.push_str(&format!(
        "plot for [col=2:{ncols}] '{stem}.csv' using 1:col with lines\n"
    ));
    out.push_str("pause -1 'press enter to close'\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Column, TimeGrid};

    fn tiny_dataset() -> Dataset {
        Dataset {
            columns: vec![
                Column { name: "t".into(), values: vec![0.0, 0.5] },
                Column { name: "xi2".into(), values: vec![1.0, 0.25] },
            ],
            metadata: vec![("alpha".into(), "0.1".into())],
        }
    }

    #[test]
    fn config_text_parses_comments_and_blanks() {
        let text = "\n# a comment\nn_atoms = 20   # trailing\n\nsequence.family= UDD\n";
        let pairs = parse_config_text(text).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("n_atoms".to_string(), "20".to_string()),
                ("sequence.family".to_string(), "UDD".to_string()),
            ]
        );
        assert!(parse_config_text("just words\n").is_err());
    }

    #[test]
    fn csv_layout() {
        let csv = render_csv(&tiny_dataset());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# alpha = 0.1");
        assert_eq!(lines.next().unwrap(), "t,xi2");
        let row = lines.next().unwrap();
        assert!(row.starts_with("0.0000000000000"), "{row}");
        // 15 significant digits survive a round trip
        let second = lines.next().unwrap();
        let xi: f64 = second.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(xi, 0.25);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn outputs_are_idempotent() {
        let dir = std::env::temp_dir().join(format!("ddm-cli-test-{}", std::process::id()));
        let ds = tiny_dataset();
        let (csv1, _) = write_outputs(&dir, "probe", &ds).unwrap();
        let first = std::fs::read(&csv1).unwrap();
        let (csv2, plot2) = write_outputs(&dir, "probe", &ds).unwrap();
        let second = std::fs::read(&csv2).unwrap();
        assert_eq!(first, second);
        assert!(std::fs::read_to_string(&plot2).unwrap().contains("probe.csv"));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn overrides_require_equals() {
        assert!(parse_overrides(&["alpha=0.2".into()]).is_ok());
        assert!(parse_overrides(&["alpha".into()]).is_err());
    }

    #[test]
    fn config_pipeline_builds_a_sweep() {
        let text = "n_atoms = 8\nalpha = 0.02\nsequence.family = PDD\nsequence.n = 3\n\
                    time_grid.t_min = 0\ntime_grid.t_max = 4\ntime_grid.points = 3\n\
                    quantities = R, xi2\n";
        let pairs = parse_config_text(text).unwrap();
        let cfg = SweepConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.n_atoms, 8);
        assert_eq!(cfg.time_grid, TimeGrid { t_min: 0.0, t_max: 4.0, points: 3 });
        assert_eq!(cfg.quantities.len(), 2);
    }
}
