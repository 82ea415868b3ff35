//! Listener screening, BHLD aggregation and the t-distribution kernels.

pub mod aggregate;
pub mod screening;
pub mod tdist;
pub mod welch;

pub use aggregate::{aggregate_bhld, bhld_values, export_figure_data, mean_ci, Aggregation, Grouping, StatsRow};
pub use screening::{retain_screened, screen_dummies, screen_participants, ScreeningOutcome, DEFAULT_THRESHOLD_DB};
pub use tdist::{t_cdf, t_quantile, t_sf};
pub use welch::{welch_t_test, Sidedness, TestResult};
