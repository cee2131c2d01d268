//! File formats: schema sidecars, CSV data, model and domain files, TSV
//! reports and plot series.

mod csv;
mod persist;
mod plot;
mod schema_file;
pub mod tsv;

pub use self::csv::{load_dataset, read_dataset, CsvOptions};
pub use persist::{load_model, load_spec, model_from_str, model_to_string, save_model, spec_from_str, spec_to_string};
pub use plot::{density_plot, density_plot_fitted, Grid, PlotSeries};
pub use schema_file::{load_schema, SchemaFile};
