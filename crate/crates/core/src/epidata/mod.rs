//! Surveillance data: ILINet parsing and cleaning, the season calendar,
//! census weights, seasonal-target scorability and volatility summaries.

pub mod calendar;
pub mod ilinet;
pub mod panel;
pub mod scorable;
pub mod volatility;
pub mod weights;

pub use calendar::SeasonCalendar;
pub use ilinet::{clean_row, parse_ilinet, RawIliRow};
pub use panel::{build_aggregate_panel, build_panel, reconstruct_aggregates, IliPanel};
pub use scorable::{scorable_seasonal_targets, ScorableMask};
pub use volatility::{standardized_volatility, VolatilityReport};
pub use weights::{load_weights, WeightMatrix, NATIONAL};
