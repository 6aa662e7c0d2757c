//! Fault propagation, exhaustive counting and sampling.

pub mod count;
pub mod ideal;
pub mod judge;
pub mod mc;
pub mod propagate;

pub use count::{count_parameters, enumerate, CountOptions, CountReport, Enumeration, TripleEstimate, TripleMode};
pub use judge::Judge;
pub use mc::{fit_exponent, monte_carlo, wilson, McResult};
pub use propagate::{propagate, Engine, FaultEvent, Frame};
