//! Delay stretch, loss rate and message overhead computed from event logs.

pub mod csv;
mod log;
mod loss;
mod overhead;
mod stretch;

pub use log::{ControlKind, EventLog, PingRecord, Record};
pub use loss::{compute_loss_rate, mean_loss_rate, LossRow};
pub use overhead::{compute_message_overhead, cumulative_ratio, Overhead, OverheadRow};
pub use stretch::{compute_delay_stretch, percentile, window_means, StretchRow};
