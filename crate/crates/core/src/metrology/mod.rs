//! QFI, SLD structure and curvature of entanglement.

mod derivative;
mod oracles;
mod probe;
mod qfi;
mod sample;

pub use derivative::{coe, drho_dg, CoeEstimate, DerivativeConfig, Scheme};
pub use oracles::{
    closed_form_suite, curvature_ratio, fidelity_relation_check, ClosedForm, Family,
    FidelityRelation,
};
pub use probe::{AnalyticOpenProbe, ClosedProbe, OpenProbe, Probe};
pub use qfi::{
    nonzero_sld_concurrences, qfi_mixed, qfi_pure, sld, sld_eigen_concurrences, sld_mean,
    sld_with_threshold, SLDOperator, SldEigen,
};
pub use sample::{
    csv_row, sample, sample_series, to_csv, CoincidenceConfig, MetrologySample, CSV_HEADER,
};
