//! Discrete-event simulation of a whole network running one scenario.

mod engine;
mod failure;
mod scenario;
mod traffic;

pub use engine::{failure_plan, run, run_scenario};
pub use failure::{build_sequential_failure_plan, down_intervals, FailureEvent, FailureTarget};
pub use scenario::{
    FailureSpec, LinkStateConfig, NetworkConfig, ProbeAccounting, RoutingMode, Scenario, SequentialPlan,
    StrategyName, TrafficConfig,
};
pub use traffic::{build_ping_traffic, targets_per_node, Flow};
