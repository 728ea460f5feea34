use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A directed acyclic graph whose source-to-sink paths form an action set.
///
/// Node 0 is the source and the largest node id is the sink. Actions are
/// edge-indicator vectors indexed by edge position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dag {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    /// Topological order of all nodes.
    order: Vec<usize>,
}

impl Dag {
    pub fn new(edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidGraph("no edges".into()));
        }
        let nodes = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 1;
        if let Some(&(a, b)) = edges.iter().find(|(a, b)| a == b) {
            return Err(Error::InvalidGraph(format!("self loop {a} -> {b}")));
        }
        let mut indeg = vec![0usize; nodes];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        for &(a, b) in &edges {
            indeg[b] += 1;
            out[a].push(b);
        }
        let mut queue: VecDeque<usize> = (0..nodes).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(nodes);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() != nodes {
            return Err(Error::InvalidGraph("graph has a cycle".into()));
        }
        let dag = Self { nodes, edges, order };
        // reject graphs without any source-sink path up front
        dag.shortest_path(&vec![0.0; dag.edges.len()])?;
        Ok(dag)
    }

    /// Parses `src dst` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ids: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| {
                    Error::InvalidGraph(format!("line {}: bad node id `{s}`", lineno + 1))
                })
            };
            match ids.as_slice() {
                [a, b] => edges.push((parse(a)?, parse(b)?)),
                _ => {
                    return Err(Error::InvalidGraph(format!(
                        "line {}: expected `src dst`, got `{line}`",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(edges)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.nodes - 1
    }

    fn shortest_path(&self, cost: &[f64]) -> Result<Vec<f64>> {
        check_dim("edge cost vector", self.edges.len(), cost.len())?;
        let sink = self.sink();
        // best[v] = (cost to sink, first edge on the chosen path)
        let mut best: Vec<Option<(f64, usize)>> = vec![None; self.nodes];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes];
        for (e, &(a, _)) in self.edges.iter().enumerate() {
            out[a].push(e);
        }
        for &v in self.order.iter().rev() {
            if v == sink {
                continue;
            }
            // out-edges are in increasing index order, so strict `<` keeps
            // the smallest index among ties
            for &e in &out[v] {
                let w = self.edges[e].1;
                let tail = if w == sink {
                    Some(0.0)
                } else {
                    best[w].map(|(c, _)| c)
                };
                if let Some(tail) = tail {
                    let c = cost[e] + tail;
                    if best[v].is_none_or(|(bc, _)| c < bc) {
                        best[v] = Some((c, e));
                    }
                }
            }
        }
        let mut action = vec![0.0; self.edges.len()];
        let mut v = self.source();
        while v != sink {
            let (_, e) = best[v].ok_or(Error::SinkUnreachable { sink })?;
            action[e] = 1.0;
            v = self.edges[e].1;
        }
        Ok(action)
    }

    /// All source-sink paths as edge-index sequences, stopping once `limit`
    /// paths have been found.
    pub fn enumerate_paths(&self, limit: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes];
        for (e, &(a, _)) in self.edges.iter().enumerate() {
            out[a].push(e);
        }
        let mut paths = Vec::new();
        let mut stack = vec![(self.source(), Vec::new())];
        while let Some((v, path)) = stack.pop() {
            if paths.len() >= limit {
                break;
            }
            if v == self.sink() {
                paths.push(path);
                continue;
            }
            for &e in out[v].iter().rev() {
                let mut p = path.clone();
                p.push(e);
                stack.push((self.edges[e].1, p));
            }
        }
        paths
    }

    fn longest_path_edges(&self) -> usize {
        let mut len: Vec<Option<usize>> = vec![None; self.nodes];
        len[self.sink()] = Some(0);
        for &v in self.order.iter().rev() {
            for &(a, b) in &self.edges {
                if a == v {
                    if let Some(l) = len[b] {
                        len[v] = Some(len[v].map_or(l + 1, |cur| cur.max(l + 1)));
                    }
                }
            }
        }
        len[self.source()].unwrap_or(0)
    }
}

/// Minimum-total-cost source-sink path as an edge-indicator vector.
pub fn dag_shortest_path(graph: &Dag, cost: &[f64]) -> Result<Vec<f64>> {
    graph.shortest_path(cost)
}

/// Exact linear minimization over an action set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearOracle {
    /// Actions `{0, 1}^dim`.
    Hypercube { dim: usize },
    DagShortestPath(Dag),
}

const EXACT_DIAMETER_PATH_LIMIT: usize = 4096;

impl LinearOracle {
    pub fn dim(&self) -> usize {
        match self {
            LinearOracle::Hypercube { dim } => *dim,
            LinearOracle::DagShortestPath(g) => g.num_edges(),
        }
    }

    /// Some action in `argmin_a <a, cost>`.
    pub fn minimize(&self, cost: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearOracle::Hypercube { dim } => {
                check_dim("cost vector", *dim, cost.len())?;
                Ok(cost.iter().map(|&c| if c < 0.0 { 1.0 } else { 0.0 }).collect())
            }
            LinearOracle::DagShortestPath(g) => g.shortest_path(cost),
        }
    }

    /// `max_{a, a'} |a - a'|_1` over the action set. Exact for the hypercube
    /// and for graphs with few paths; otherwise twice the longest path length.
    pub fn action_diameter(&self) -> f64 {
        match self {
            LinearOracle::Hypercube { dim } => *dim as f64,
            LinearOracle::DagShortestPath(g) => {
                let paths = g.enumerate_paths(EXACT_DIAMETER_PATH_LIMIT + 1);
                if paths.len() > EXACT_DIAMETER_PATH_LIMIT {
                    return 2.0 * g.longest_path_edges() as f64;
                }
                let mut best = 0usize;
                for (i, p) in paths.iter().enumerate() {
                    for q in &paths[i + 1..] {
                        let shared = p.iter().filter(|e| q.contains(e)).count();
                        best = best.max(p.len() + q.len() - 2 * shared);
                    }
                }
                best as f64
            }
        }
    }
}
