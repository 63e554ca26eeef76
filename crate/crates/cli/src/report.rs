use std::path::Path;

use cohdist_core::acceptance::{run_report, ReportOptions};
use cohdist_core::config::{OutputFormat, RunConfig};

use crate::output::{emit, Output};
use crate::CliError;

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Include per-criterion wall-clock seconds; the output is then no longer reproducible.
    #[arg(long)]
    pub timings: bool,
    /// Print one line per criterion on standard error as results arrive.
    #[arg(long)]
    pub progress: bool,
}

pub fn run(args: &ReportArgs, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let report = run_report(cfg, ReportOptions { timings: args.timings }, |r| {
        if args.progress {
            eprintln!("{}", r.line());
        }
    })?;
    let text = match cfg.format {
        OutputFormat::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let rows = report
                .criteria
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.title.clone(),
                        r.status.label().to_string(),
                        r.gating.to_string(),
                        r.seed.to_string(),
                        r.seconds.map(|s| s.to_string()).unwrap_or_default(),
                        r.summary.clone(),
                    ]
                })
                .collect();
            Output::new("report", serde_json::Value::Null)
                .table(vec!["id", "title", "status", "gating", "seed", "seconds", "summary"], rows)
                .render(&report.config, OutputFormat::Csv)?
        }
    };
    emit(&text, out)
}
