//! Batch experiments: specs, execution, manifests and tables.

pub mod defaults;
pub mod manifest;
pub mod run;
pub mod spec;
pub mod tables;

pub use defaults::{default_params, Tolerances, Window, TOLERANCES, TOLERANCES_VERSION};
pub use manifest::{
    AdversaryRecord, Check, EigRecord, LanczosRecord, LinearRecord, Records, RunManifest,
    SCHEMA_VERSION,
};
pub use run::{predict_linear, run_experiment};
pub use spec::{ExperimentKind, ExperimentParams, ExperimentSpec};
pub use tables::{emit_tables, read_manifest, table_rows, write_tables, TableFormat};
