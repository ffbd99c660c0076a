//! Synthetic ground truth for the selector: known networks, d-separation,
//! Markov blankets, the graphical fair set and exact interventional
//! distributions.

mod graph;
mod network;

pub use graph::Dag;
pub use network::{random_problem, BayesNet, NetSpec, NodeSpec, RandomNetConfig, SyntheticProblem};

use serde::{Deserialize, Serialize};

use crate::citest::{candidate_subsets, SubsetSearch};
use crate::error::{Error, Result};

/// Exact enumeration is limited to this many binary-equivalent free nodes.
pub const ENUMERATION_CAP: usize = 20;

pub fn d_separated(bn: &BayesNet, x: usize, y: usize, z: &[usize]) -> bool {
    bn.dag().d_separated(x, y, z)
}

pub fn markov_blanket(bn: &BayesNet, t: usize) -> Vec<usize> {
    bn.dag().markov_blanket(t)
}

/// A member of the fair set with the subset of MB(s) that separates it from
/// `s` once the edges into `s` are cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairMember {
    pub node: usize,
    pub certificate: Vec<usize>,
}

/// Members X of MB(t) \ {s} for which some Z ⊆ MB(s) \ {X, t} with
/// |Z| ≤ `max_k` d-separates X from `s` in the graph with the edges into `s`
/// removed. The target is never used as a blocker: the selector cannot
/// condition on it when testing against `s`.
pub fn fair_feature_set(bn: &BayesNet, t: usize, s: usize, max_k: usize) -> Result<Vec<FairMember>> {
    if s == t {
        return Err(Error::InvalidIndices("sensitive and target nodes must differ".into()));
    }
    let intervened = bn.dag().mutilate(&[s]);
    let mb_s = bn.dag().markov_blanket(s);
    let mut out = Vec::new();
    for x in bn.dag().markov_blanket(t) {
        if x == s {
            continue;
        }
        let pool: Vec<usize> = mb_s.iter().copied().filter(|&v| v != x && v != t).collect();
        let cert = candidate_subsets(&pool, SubsetSearch::UpTo(max_k))
            .into_iter()
            .find(|z| intervened.d_separated(x, s, z));
        if let Some(certificate) = cert {
            out.push(FairMember { node: x, certificate });
        }
    }
    Ok(out)
}

fn free_bits(bn: &BayesNet, clamped: &[usize]) -> f64 {
    (0..bn.len())
        .filter(|v| !clamped.contains(v))
        .map(|v| (bn.cardinality(v) as f64).log2())
        .sum()
}

/// Calls `visit(assignment, probability)` for every joint assignment of the
/// network mutilated by `interventions`, weighted by the truncated
/// factorization.
pub fn enumerate_interventional(
    bn: &BayesNet,
    interventions: &[(usize, u32)],
    mut visit: impl FnMut(&[u32], f64),
) -> Result<()> {
    for &(v, state) in interventions {
        if v >= bn.len() {
            return Err(Error::InvalidIndices(format!("node {v} out of range")));
        }
        if state as usize >= bn.cardinality(v) {
            return Err(Error::Domain(format!(
                "state {state} out of range for node `{}`",
                bn.name(v)
            )));
        }
    }
    let clamped: Vec<usize> = interventions.iter().map(|&(v, _)| v).collect();
    let bits = free_bits(bn, &clamped);
    if bits > ENUMERATION_CAP as f64 + 1e-9 {
        return Err(Error::EnumerationCap {
            bits,
            cap: ENUMERATION_CAP,
        });
    }
    let free: Vec<usize> = (0..bn.len()).filter(|v| !clamped.contains(v)).collect();
    let mut assignment = vec![0u32; bn.len()];
    for &(v, state) in interventions {
        assignment[v] = state;
    }
    loop {
        let p: f64 = free.iter().map(|&v| bn.local_prob(v, &assignment)).product();
        visit(&assignment, p);
        // odometer over the free nodes
        let mut i = 0;
        loop {
            if i == free.len() {
                return Ok(());
            }
            let v = free[i];
            assignment[v] += 1;
            if (assignment[v] as usize) < bn.cardinality(v) {
                break;
            }
            assignment[v] = 0;
            i += 1;
        }
    }
}

/// Exact P(query | do(interventions)).
pub fn interventional_dist(bn: &BayesNet, interventions: &[(usize, u32)], query: usize) -> Result<Vec<f64>> {
    if interventions.iter().any(|&(v, _)| v == query) {
        return Err(Error::InvalidIndices("query node is intervened on".into()));
    }
    if query >= bn.len() {
        return Err(Error::InvalidIndices(format!("query node {query} out of range")));
    }
    let mut dist = vec![0.0; bn.cardinality(query)];
    enumerate_interventional(bn, interventions, |a, p| dist[a[query] as usize] += p)?;
    Ok(dist)
}

/// Largest gap, over contexts of `k_nodes` and outcomes, between the
/// predictor's output distribution under do(S = 0) and under do(S = 1).
/// The predictor sees full assignments indexed by node.
pub fn kfair_gap(
    bn: &BayesNet,
    predictor: impl Fn(&[u32]) -> u8,
    s: usize,
    k_nodes: &[usize],
) -> Result<f64> {
    if bn.cardinality(s) != 2 {
        return Err(Error::InvalidInput(format!("sensitive node `{}` must be binary", bn.name(s))));
    }
    if k_nodes.contains(&s) {
        return Err(Error::InvalidIndices("context nodes contain the sensitive node".into()));
    }
    let mut gap = 0.0f64;
    let mut context = vec![0u32; k_nodes.len()];
    loop {
        let mut positive = [0.0f64; 2];
        let mut mass = [0.0f64; 2];
        for s_state in 0..2u32 {
            let mut interventions: Vec<(usize, u32)> =
                k_nodes.iter().copied().zip(context.iter().copied()).collect();
            interventions.push((s, s_state));
            enumerate_interventional(bn, &interventions, |a, p| {
                mass[s_state as usize] += p;
                if predictor(a) == 1 {
                    positive[s_state as usize] += p;
                }
            })?;
        }
        // contexts without mass say nothing about fairness
        if mass[0] > 1e-15 && mass[1] > 1e-15 {
            let p1 = positive[0] / mass[0];
            let p2 = positive[1] / mass[1];
            // binary outcome: the gap for O = 0 equals the gap for O = 1
            gap = gap.max((p1 - p2).abs());
        }
        let mut i = 0;
        loop {
            if i == k_nodes.len() {
                return Ok(gap);
            }
            context[i] += 1;
            if (context[i] as usize) < bn.cardinality(k_nodes[i]) {
                break;
            }
            context[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// S -> C, A -> T <- ... small explicit nets.
    fn net(names: &[&str], cards: &[usize], parents: Vec<Vec<usize>>, cpts: Vec<Vec<Vec<f64>>>) -> BayesNet {
        BayesNet::new(names.iter().map(|s| s.to_string()).collect(), cards.to_vec(), parents, cpts).unwrap()
    }

    #[test]
    fn do_on_root_equals_conditioning() {
        // R -> Q
        let bn = net(
            &["r", "q"],
            &[2, 2],
            vec![vec![], vec![0]],
            vec![vec![vec![0.3, 0.7]], vec![vec![0.9, 0.1], vec![0.2, 0.8]]],
        );
        assert_eq!(interventional_dist(&bn, &[(0, 1)], 1).unwrap(), vec![0.2, 0.8]);
        assert_eq!(interventional_dist(&bn, &[(0, 0)], 1).unwrap(), vec![0.9, 0.1]);
    }

    #[test]
    fn do_on_sink_leaves_marginal() {
        let bn = net(
            &["r", "q"],
            &[2, 2],
            vec![vec![], vec![0]],
            vec![vec![vec![0.3, 0.7]], vec![vec![0.9, 0.1], vec![0.2, 0.8]]],
        );
        let d = interventional_dist(&bn, &[(1, 0)], 0).unwrap();
        assert!((d[0] - 0.3).abs() < 1e-15 && (d[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_state() {
        let bn = net(&["a", "b"], &[2, 2], vec![vec![], vec![]], vec![vec![vec![0.5, 0.5]], vec![vec![0.5, 0.5]]]);
        assert!(matches!(interventional_dist(&bn, &[(0, 2)], 1), Err(Error::Domain(_))));
    }

    #[test]
    fn enumeration_cap_enforced() {
        let n = 22;
        let bn = BayesNet::new(
            (0..n).map(|i| format!("v{i}")).collect(),
            vec![2; n],
            vec![vec![]; n],
            vec![vec![vec![0.5, 0.5]]; n],
        )
        .unwrap();
        assert!(matches!(interventional_dist(&bn, &[(0, 0)], 1), Err(Error::EnumerationCap { .. })));
        assert!(interventional_dist(&bn, &[(0, 0), (2, 1)], 1).is_ok());
    }

    #[test]
    fn child_predictor_gap() {
        // S -> C with P(C=1|S=0)=0.2, P(C=1|S=1)=0.7
        let bn = net(
            &["s", "c"],
            &[2, 2],
            vec![vec![], vec![0]],
            vec![vec![vec![0.5, 0.5]], vec![vec![0.8, 0.2], vec![0.3, 0.7]]],
        );
        let gap = kfair_gap(&bn, |a| a[1] as u8, 0, &[]).unwrap();
        assert!((gap - 0.5).abs() < 1e-12);
        assert_eq!(kfair_gap(&bn, |_| 1, 0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn disconnected_target_keeps_whole_blanket() {
        // s alone; a -> t <- b
        let bn = net(
            &["s", "a", "b", "t"],
            &[2, 2, 2, 2],
            vec![vec![], vec![], vec![], vec![1, 2]],
            vec![
                vec![vec![0.5, 0.5]],
                vec![vec![0.5, 0.5]],
                vec![vec![0.5, 0.5]],
                vec![vec![0.9, 0.1], vec![0.5, 0.5], vec![0.4, 0.6], vec![0.1, 0.9]],
            ],
        );
        let fair: Vec<usize> = fair_feature_set(&bn, 3, 0, 3).unwrap().iter().map(|m| m.node).collect();
        assert_eq!(fair, markov_blanket(&bn, 3));
    }

    #[test]
    fn child_of_sensitive_excluded_and_collider_spouse_kept() {
        // s -> c -> t, a -> c, a -> t: c is a child of s, a is s's spouse
        let half = vec![vec![0.5, 0.5]];
        let bn = net(
            &["s", "a", "c", "t"],
            &[2, 2, 2, 2],
            vec![vec![], vec![], vec![0, 1], vec![1, 2]],
            vec![half.clone(), half, vec![vec![0.5, 0.5]; 4], vec![vec![0.5, 0.5]; 4]],
        );
        let fair = fair_feature_set(&bn, 3, 0, 3).unwrap();
        assert_eq!(fair, vec![FairMember { node: 1, certificate: vec![] }]);
    }
}
