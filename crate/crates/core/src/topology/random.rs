//! Seeded random connected graphs for tests, benchmarks and stress runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, NodeId};

/// Parameters of [`erdos_renyi`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomGraphParams {
    pub nodes: usize,
    /// Expected number of neighbours per node, spanning tree included.
    pub avg_degree: f64,
    /// Inclusive delay range in microseconds.
    pub delay_us: (u64, u64),
    /// Drawn delays are rounded down to a multiple of this step.
    pub delay_step_us: u64,
    /// Inclusive IGP cost range.
    pub cost: (u64, u64),
    /// Probability that a link gets a parallel twin with independent weights.
    pub parallel_prob: f64,
}

impl RandomGraphParams {
    /// Random graph in the style of the evaluation setup: degree about
    /// `ln |V|`, delays up to 1 ms, costs up to 2^32 / (10 |V|).
    pub fn evaluation(nodes: usize) -> Self {
        let max_cost = ((1u64 << 32) / (10 * nodes.max(1) as u64)).max(1);
        RandomGraphParams {
            nodes,
            avg_degree: (nodes as f64).ln().max(2.0),
            delay_us: (0, 1000),
            delay_step_us: 1,
            cost: (1, max_cost),
            parallel_prob: 0.0,
        }
    }
}

/// Undirected connected random graph: a random spanning tree plus
/// Erdős–Rényi links, every link expanded to both directions.
pub fn erdos_renyi(params: &RandomGraphParams, seed: u64) -> Graph {
    let n = params.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_node_count(n);
    if n < 2 {
        return g;
    }
    let mut linked = vec![false; n * n];
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    order.shuffle(&mut rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        pairs.push((parent, order[i]));
    }
    for &(a, b) in &pairs {
        linked[a as usize * n + b as usize] = true;
        linked[b as usize * n + a as usize] = true;
    }
    let extra = (params.avg_degree - 2.0 * (n - 1) as f64 / n as f64).max(0.0);
    let p = (extra / (n - 1) as f64).min(1.0);
    for a in 0..n {
        for b in a + 1..n {
            if !linked[a * n + b] && rng.random_bool(p) {
                pairs.push((a as NodeId, b as NodeId));
            }
        }
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let step = params.delay_step_us.max(1);
        let delay = rng.random_range(params.delay_us.0..=params.delay_us.1) / step * step;
        let cost = rng.random_range(params.cost.0..=params.cost.1);
        (delay, cost)
    };
    for (a, b) in pairs {
        let (delay, cost) = draw(&mut rng);
        g.add_undirected(a, b, delay, cost);
        if params.parallel_prob > 0.0 && rng.random_bool(params.parallel_prob) {
            let (delay, cost) = draw(&mut rng);
            g.add_undirected(a, b, delay, cost);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_and_deterministic() {
        let params = RandomGraphParams::evaluation(60);
        let a = erdos_renyi(&params, 7);
        assert!(a.is_strongly_connected());
        assert_eq!(a, erdos_renyi(&params, 7));
        assert_ne!(a, erdos_renyi(&params, 8));
        let degree = a.link_count() as f64 / 60.0;
        assert!(degree > 2.0 && degree < 8.0, "{degree}");
    }

    #[test]
    fn delay_step_respected() {
        let mut params = RandomGraphParams::evaluation(20);
        params.delay_step_us = 100;
        let g = erdos_renyi(&params, 3);
        assert!(g.links().iter().all(|l| l.delay_us % 100 == 0));
    }
}
