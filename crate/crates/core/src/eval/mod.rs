//! Prediction ingestion, scoring, comparison matrices, reports and plots.

mod matrices;
mod persist;
mod plot;
mod predictions;
mod report;
mod score;

pub use matrices::{
    beats, efficiency_curves, significance_matrix, winrate_matrix, CurveEntry, Roster, SignificanceCell,
    WinRateCell,
};
pub use persist::{load_run, scores_csv, write_run, RunLock, REPORTS_DIR, RUN_FILE, SCORES_FILE};
pub use plot::{emit_plot, render_svg, Chart, PlotKind, Series};
pub use predictions::{
    load_predictions, parse_predictions, LoadReport, PredictionRecord, RecordKey, Rejection, SystemId,
    PREDICTION_SCHEMA_VERSION,
};
pub use report::{
    build_report, curves_json, metrics_csv, parse_counts_csv, report_charts, significance_json, winrate_csv,
    CURVES_FILE, METRICS_FILE, PARSE_COUNTS_FILE, PLOTS_DIR, SIGNIFICANCE_FILE, WINRATE_FILE,
};
pub use score::{
    aggregate, predictions_digest, score_record, score_run, Aggregate, EmbeddingTable, EvalRun, MetricVector,
    ScoreConfig, ScoredRecord, RUN_SCHEMA_VERSION,
};
