//! Survey ingestion and cleaning.

pub mod binary;
pub mod pipeline;
pub mod schema;
pub mod survey;

pub use binary::BinaryDataset;
pub use pipeline::{
    casewise_delete, dichotomize, filter_missing_variables, prepare_groups, split_by_group,
    DroppedVariable, ExclusionReport, GroupSplit, GroupingSpec, PipelineConfig, PreparedGroup,
};
pub use schema::{ColumnKind, Schema};
pub use survey::{load_csv, Column, SurveyDataset};
