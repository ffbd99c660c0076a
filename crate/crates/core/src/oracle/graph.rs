//! Directed acyclic graphs, d-separation and Markov blankets.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn from_parents(parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = parents.len();
        let mut children = vec![Vec::new(); n];
        for (v, ps) in parents.iter().enumerate() {
            for &p in ps {
                if p >= n {
                    return Err(Error::InvalidNetwork(format!("node {v} has parent {p} out of range")));
                }
                if p == v {
                    return Err(Error::InvalidNetwork(format!("node {v} is its own parent")));
                }
                children[p].push(v);
            }
            if ps.iter().collect::<BTreeSet<_>>().len() != ps.len() {
                return Err(Error::InvalidNetwork(format!("node {v} lists a parent twice")));
            }
        }
        let dag = Self { parents, children };
        if dag.topological_order().len() != n {
            return Err(Error::InvalidNetwork("graph has a directed cycle".into()));
        }
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(v, ps)| ps.iter().map(move |&p| (p, v)))
            .collect()
    }

    /// Kahn's algorithm, smallest index first among ready nodes. Shorter than
    /// `len()` when the graph has a cycle.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// Same graph with every edge into `nodes` removed.
    pub fn mutilate(&self, nodes: &[usize]) -> Dag {
        let parents = self
            .parents
            .iter()
            .enumerate()
            .map(|(v, ps)| if nodes.contains(&v) { Vec::new() } else { ps.clone() })
            .collect();
        let mut children = vec![Vec::new(); self.len()];
        for (v, ps) in self.parents.iter().enumerate() {
            if nodes.contains(&v) {
                continue;
            }
            for &p in ps {
                children[p].push(v);
            }
        }
        Dag { parents, children }
    }

    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// Bayes-ball reachability: is every path between `x` and `y` blocked by `z`?
    pub fn d_separated(&self, x: usize, y: usize, z: &[usize]) -> bool {
        !self.reachable(x, z).contains(&y)
    }

    /// Nodes d-connected to `source` given `z` (excluding `z` itself).
    pub fn reachable(&self, source: usize, z: &[usize]) -> BTreeSet<usize> {
        let n = self.len();
        let mut in_z = vec![false; n];
        for &v in z {
            in_z[v] = true;
        }
        // z together with its ancestors: colliders that open a path
        let mut anc_z = in_z.clone();
        let mut stack: Vec<usize> = z.to_vec();
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if !anc_z[p] {
                    anc_z[p] = true;
                    stack.push(p);
                }
            }
        }

        const UP: usize = 0; // arrived from a child
        const DOWN: usize = 1; // arrived from a parent
        let mut visited = vec![[false; 2]; n];
        let mut out = BTreeSet::new();
        let mut queue = VecDeque::from([(source, UP)]);
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if !in_z[v] && v != source {
                out.insert(v);
            }
            if dir == UP && !in_z[v] {
                queue.extend(self.parents[v].iter().map(|&p| (p, UP)));
                queue.extend(self.children[v].iter().map(|&c| (c, DOWN)));
            } else if dir == DOWN {
                if !in_z[v] {
                    queue.extend(self.children[v].iter().map(|&c| (c, DOWN)));
                }
                if anc_z[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, UP)));
                }
            }
        }
        out
    }

    /// Parents, children and spouses, sorted.
    pub fn markov_blanket(&self, t: usize) -> Vec<usize> {
        let mut mb: BTreeSet<usize> = self.parents[t].iter().copied().collect();
        for &c in &self.children[t] {
            mb.insert(c);
            mb.extend(self.parents[c].iter().copied());
        }
        mb.remove(&t);
        mb.into_iter().collect()
    }
}
