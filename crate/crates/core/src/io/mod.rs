//! Configuration, CSV tables and binary snapshots.

pub mod config;
pub mod snapshot;
pub mod tables;

pub use config::{parse_config, RunConfig};
pub use snapshot::{load_snapshot_into, read_snapshot, write_snapshot};
pub use tables::{
    format_number, read_diagnostics_csv, read_sweep_csv, write_diagnostics_csv, write_residual_csv, write_sweep_csv,
    SweepRow, DIAGNOSTICS_COLUMNS, RESIDUAL_COLUMNS, SWEEP_COLUMNS,
};
