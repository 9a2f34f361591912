pub mod estimators;
pub mod growth;
pub mod report;

pub use estimators::{
    barcode_entropy, barcode_entropy_from_barcodes, barcodes, compare_theorems, gamma_lower_bound, log_eps_grid,
    orbit_entropy, subsampling_ratios, volume_entropy, BarcodeEntropy, GammaBound, TheoremInputs, Tolerance, Verdict,
    Verdicts,
};
pub use growth::{growth_exponent, log_plus, EntropyError, GrowthFit, GrowthSequence, SeriesKind, Window};
pub use report::EntropyReport;
