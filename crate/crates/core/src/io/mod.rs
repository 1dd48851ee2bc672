//! Configuration files, CSV tables and SVG charts.

pub mod config;
pub mod svg;
pub mod table;

pub use config::{parse_config, parse_config_str, KernelSpec, MuSpec, RunConfig, RunTarget};
pub use svg::{emit_svg_lines, render_svg, Scale, Series};
pub use table::{
    read_convergence, read_csv, write_convergence, write_csv, write_events, CsvFile, Metadata,
};
