//! Inferential statistics for the group-level analysis.

pub mod analysis;
pub mod ancova;
pub mod correlation;
pub mod distributions;
pub mod quadrature;
pub mod records;
pub mod studentized_range;

pub use analysis::{
    connectivity_strength_analysis, format_p, group_ancova, levels_in_order, residualize,
    standardized_aspl, strength_correlation, strength_report, ConnectivityStrength, ScatterPoint,
    StandardizedAspl, StrengthCorrelation, StrengthMeasure, StrengthReport,
};
pub use ancova::{ancova, fit_ancova, tukey_contrasts, AncovaFit, AncovaResult, GroupSummary, TukeyContrast};
pub use correlation::{biserial, correlation_p_value, partial_correlation, pearson, point_biserial, Biserial};
pub use records::{load_records, read_records, read_records_str, records_to_csv_string, write_records, GroupRecord};
pub use studentized_range::{ptukey, qtukey};
