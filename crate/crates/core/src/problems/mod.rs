//! Problem adapters, synthetic generators, metrics and file formats for the
//! five applications: sparse feature selection, segmented regression, trend
//! filtering, binary MRF labeling and l0-TV impulse denoising.

mod feature_selection;
mod image;
pub mod io;
mod mrf;
mod quadratic;
mod segmented;
mod trend;

pub use feature_selection::{
    build_feature_selection, fractional_sparsity_grid, generate_classification,
    FeatureSelectionData, Loss, DEFAULT_BOX_BOUND,
};
pub use image::{
    add_impulse_noise, build_l0tv, piecewise_constant_image, snr_metrics, GrayImage, ImageInstance,
    SnrMetrics,
};
pub use mrf::{build_mrf, generate_mrf, MrfInstance};
pub use quadratic::{
    build_quadratic, generate_quadratic, generate_separated_quadratic, QuadraticInstance,
};
pub use segmented::{
    build_segmented_regression, generate_segmented_regression,
    generate_segmented_regression_with_noise, SegmentedRegressionInstance,
};
pub use trend::{build_trend_filtering, generate_trend_series};
