//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fairsfs_core::oracle::BayesNet;

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load_fixture(name: &str) -> BayesNet {
    BayesNet::load(fixture_path(name)).expect("fixture network loads")
}

/// Descendants of `v` (excluding `v`) by walking child lists built from
/// `parents`.
fn descendants(parents: &[Vec<usize>], v: usize) -> BTreeSet<usize> {
    let n = parents.len();
    let mut out = BTreeSet::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for c in 0..n {
            if parents[c].contains(&u) && out.insert(c) {
                stack.push(c);
            }
        }
    }
    out
}

/// d-separation by listing every simple path in the skeleton and checking
/// each one against the collider rules.
pub fn d_separated_by_paths(parents: &[Vec<usize>], x: usize, y: usize, z: &[usize]) -> bool {
    let n = parents.len();
    let adjacent = |a: usize, b: usize| parents[a].contains(&b) || parents[b].contains(&a);
    let z: BTreeSet<usize> = z.iter().copied().collect();
    let desc: Vec<BTreeSet<usize>> = (0..n).map(|v| descendants(parents, v)).collect();

    let path_active = |path: &[usize]| {
        path.windows(3).all(|w| {
            let (a, v, b) = (w[0], w[1], w[2]);
            let collider = parents[v].contains(&a) && parents[v].contains(&b);
            if collider {
                z.contains(&v) || desc[v].iter().any(|d| z.contains(d))
            } else {
                !z.contains(&v)
            }
        })
    };

    let mut path = vec![x];
    let mut on_path = vec![false; n];
    on_path[x] = true;
    fn walk(
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        y: usize,
        n: usize,
        adjacent: &dyn Fn(usize, usize) -> bool,
        active: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        for next in 0..n {
            if on_path[next] || !adjacent(last, next) {
                continue;
            }
            path.push(next);
            on_path[next] = true;
            let found = if next == y {
                active(path)
            } else {
                active(path) && walk(path, on_path, y, n, adjacent, active)
            };
            on_path[next] = false;
            path.pop();
            if found {
                return true;
            }
        }
        false
    }
    // a prefix that already violates a rule cannot be extended into an
    // active path, so pruning on `active(prefix)` is exact
    !walk(&mut path, &mut on_path, y, n, &adjacent, &path_active)
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels % 2 == 0);
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Upper tail of χ² with one degree of freedom. With x = u² the density
/// becomes twice the standard normal density in u.
pub fn chi2_sf_dof1_by_quadrature(x: f64) -> f64 {
    let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    2.0 * simpson(phi, x.sqrt(), 40.0, 200_000)
}

/// Upper tail of χ² with two degrees of freedom from its density e^{-t/2}/2.
pub fn chi2_sf_dof2_by_quadrature(x: f64) -> f64 {
    simpson(|t| 0.5 * (-0.5 * t).exp(), x, x + 120.0, 200_000)
}

/// Two-sided Kolmogorov–Smirnov statistic of `sample` against U(0, 1).
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let lo = v - i as f64 / n;
            let hi = (i + 1) as f64 / n - v;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Every labelled DAG on `n` nodes, as parent lists. Each unordered pair is
/// absent, i→j or j→i; cyclic orientations are filtered out.
pub fn all_dags(n: usize) -> Vec<Vec<Vec<usize>>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut parents = vec![Vec::new(); n];
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => parents[j].push(i),
                2 => parents[i].push(j),
                _ => {}
            }
            c /= 3;
        }
        if is_acyclic(&parents) {
            out.push(parents);
        }
    }
    out
}

pub fn is_acyclic(parents: &[Vec<usize>]) -> bool {
    let n = parents.len();
    let mut removed = vec![false; n];
    for _ in 0..n {
        match (0..n).find(|&v| !removed[v] && parents[v].iter().all(|&p| removed[p])) {
            Some(v) => removed[v] = true,
            None => return false,
        }
    }
    true
}

/// All subsets of `pool` with at most `k` members.
pub fn small_subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &v in pool {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < k)
            .map(|s| {
                let mut t = s.clone();
                t.push(v);
                t
            })
            .collect();
        out.extend(grown);
    }
    out
}
