use crate::error::{Error, Result};
use crate::time::SimTime;
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureTarget {
    Node(NodeId),
    /// Endpoints in ascending order.
    Link(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureEvent {
    pub target: FailureTarget,
    pub fail: SimTime,
    pub recover: Option<SimTime>,
}

/// The `count` highest-degree nodes (ties by id), node `k` failing at
/// `first + k * period` and recovering `downtime` later.
pub fn build_sequential_failure_plan(
    t: &Topology,
    count: usize,
    first: SimTime,
    period: SimTime,
    downtime: SimTime,
) -> Result<Vec<FailureEvent>> {
    if count > t.node_count() {
        return Err(Error::InvalidScenario(format!(
            "cannot fail {count} nodes of a {}-node topology",
            t.node_count()
        )));
    }
    Ok(t.highest_degree(count)
        .into_iter()
        .enumerate()
        .map(|(k, id)| {
            let fail = first + SimTime(period.as_micros() * k as u64);
            FailureEvent {
                target: FailureTarget::Node(id),
                fail,
                recover: Some(fail + downtime),
            }
        })
        .collect())
}

/// Times during which `node` is failed according to `plan`.
pub fn down_intervals(plan: &[FailureEvent], node: NodeId) -> Vec<(SimTime, SimTime)> {
    plan.iter()
        .filter(|e| e.target == FailureTarget::Node(node))
        .map(|e| (e.fail, e.recover.unwrap_or(SimTime(u64::MAX))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{generate_hyperbolic_graph, GeneratorParams};

    #[test]
    fn schedule_arithmetic() {
        let t = generate_hyperbolic_graph(&GeneratorParams::new(30, 6.0, 5)).unwrap();
        let s = SimTime::from_secs;
        let plan = build_sequential_failure_plan(&t, 10, s(60), s(180), s(90)).unwrap();
        assert_eq!(plan.len(), 10);
        assert_eq!((plan[0].fail, plan[0].recover), (s(60), Some(s(150))));
        assert_eq!((plan[9].fail, plan[9].recover), (s(1680), Some(s(1770))));
        let top = t.highest_degree(10);
        for (e, id) in plan.iter().zip(top) {
            assert_eq!(e.target, FailureTarget::Node(id));
        }
        assert!(build_sequential_failure_plan(&t, 0, s(60), s(180), s(90)).unwrap().is_empty());
        assert!(build_sequential_failure_plan(&t, 1000, s(60), s(180), s(90)).is_err());
    }
}
