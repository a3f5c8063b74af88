//! Conjecture scans, coincidence detection, transcendental roots and figure data.

mod coincidence;
mod figures;
mod roots;
mod scan;

pub use coincidence::{find_coincidences, CoincidenceEvent};
pub use figures::{emit_figure, figure_samples, Figure, FigureOutput, FigureParams};
pub use roots::{transcendental_roots, Root, RootKind};
pub use scan::{
    bell_concurrence, evaluate_instance, inequality_scan, InstanceId, ScanConfig, ScanOutcome,
    ScanReport, Violation, WorstMargin,
};
