//! File formats and report rendering: CSV datasets, event expressions, graph
//! and simulator config files, and the table/CSV/JSON output layer.

mod csv_io;
mod event;
mod graph_spec;
mod report;
mod scm_spec;

pub use csv_io::{load_csv, write_dataset, write_truth};
pub use event::parse_event;
pub use graph_spec::{parse_graph, write_graph};
pub use report::{OutputFormat, ReportOptions};
pub use report::{render_attribution, render_ice_matrix, render_monotonicity, render_oracle};
pub use scm_spec::{parse_scm, write_scm};
