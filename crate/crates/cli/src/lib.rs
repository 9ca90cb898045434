//! Configuration, pipeline and report formats of the `varconv` command.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod text;

pub use config::{parse_config, parse_config_file, AnalysisConfig, Format, Overrides};
pub use error::{CliError, CliResult};
pub use report::AnalysisReport;
pub use run::{run_analysis, Command};

/// Renders a report in the requested format.
pub fn emit_report(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => text::to_text(report),
    }
}
