//! Independent oracles shared by the integration tests.

use segpath_core::{Graph, RawPath};

/// All-pairs (best cost, worst delay among best-cost paths) by Floyd–Warshall
/// over the lexicographic (cost ascending, delay descending) order.
pub fn best_cost_worst_delay(g: &Graph) -> Vec<Vec<Option<(u64, u64)>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = Some((0, 0));
    }
    let better = |a: (u64, u64), b: Option<(u64, u64)>| match b {
        None => true,
        Some(b) => a.0 < b.0 || (a.0 == b.0 && a.1 > b.1),
    };
    for l in g.links() {
        let w = (l.cost, l.delay_us);
        if better(w, d[l.src as usize][l.dst as usize]) {
            d[l.src as usize][l.dst as usize] = Some(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    let w = (a.0 + b.0, a.1 + b.1);
                    if better(w, d[i][j]) {
                        d[i][j] = Some(w);
                    }
                }
            }
        }
    }
    d
}

pub fn simple_paths(g: &Graph, max_hops: usize) -> Vec<RawPath> {
    fn dfs(g: &Graph, nodes: &mut Vec<u32>, max_hops: usize, out: &mut Vec<RawPath>) {
        if nodes.len() > 1 {
            out.push(RawPath::new(nodes.clone()));
        }
        if nodes.len() > max_hops {
            return;
        }
        let u = *nodes.last().unwrap();
        let mut next: Vec<u32> = g.out_links(u).map(|l| l.dst).collect();
        next.sort_unstable();
        next.dedup();
        for v in next {
            if !nodes.contains(&v) {
                nodes.push(v);
                dfs(g, nodes, max_hops, out);
                nodes.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..g.node_count() as u32 {
        dfs(g, &mut vec![s], max_hops, &mut out);
    }
    out
}

/// Fewest segments over all tilings of `p` by single links and best-cost
/// sub-paths carrying the worst best-cost delay.
pub fn min_encoding_len(g: &Graph, apsp: &[Vec<Option<(u64, u64)>>], p: &RawPath) -> usize {
    let hops = p.hops();
    let link = |k: usize| g.find_link(p.nodes[k], p.nodes[k + 1], p.links[k]).unwrap();
    let mut best = vec![usize::MAX; hops + 1];
    best[0] = 0;
    for j in 1..=hops {
        best[j] = best[j - 1] + 1;
        for i in 0..j {
            let (cost, delay) = (i..j).fold((0, 0), |(c, d), k| (c + link(k).cost, d + link(k).delay_us));
            if apsp[p.nodes[i] as usize][p.nodes[j] as usize] == Some((cost, delay)) && best[i] + 1 < best[j] {
                best[j] = best[i] + 1;
            }
        }
    }
    best[hops]
}
