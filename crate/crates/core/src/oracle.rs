//! Brute-force depth-first counting on explicit domain graphs.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::tm::problem::{Point, ProblemSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("search exceeded {0} steps")]
    Budget(u64),
}

/// Explicit graph with designated vertices, built from a problem layout.
#[derive(Debug, Clone)]
pub struct DomainGraph {
    pub coords: Vec<Point>,
    pub adjacency: Vec<Vec<usize>>,
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
    pub mandatory: Vec<usize>,
    pub polygon: bool,
}

impl DomainGraph {
    pub fn new(problem: &ProblemSpec, size: usize) -> Self {
        let layout = problem.layout(size);
        let index: HashMap<Point, usize> = layout.vertices.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut adjacency = vec![Vec::new(); layout.vertices.len()];
        for (a, b) in &layout.edges {
            let (ia, ib) = (index[a], index[b]);
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        let lookup = |ps: &[Point]| ps.iter().map(|p| index[p]).collect::<Vec<_>>();
        DomainGraph {
            coords: layout.vertices.clone(),
            sources: lookup(&layout.sources),
            targets: lookup(&layout.targets),
            mandatory: lookup(&layout.mandatory),
            adjacency,
            polygon: layout.polygon,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }
}

struct Search<'a> {
    graph: &'a DomainGraph,
    visited: Vec<bool>,
    is_target: Vec<bool>,
    steps: u64,
    budget: u64,
}

impl Search<'_> {
    fn all_mandatory(&self) -> bool {
        self.graph.mandatory.iter().all(|&m| self.visited[m])
    }

    fn walks(&mut self, v: usize) -> Result<u64, OracleError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(OracleError::Budget(self.budget));
        }
        let mut total = 0;
        if self.is_target[v] && self.all_mandatory() {
            total += 1;
        }
        for i in 0..self.graph.adjacency[v].len() {
            let w = self.graph.adjacency[v][i];
            if !self.visited[w] {
                self.visited[w] = true;
                total += self.walks(w)?;
                self.visited[w] = false;
            }
        }
        Ok(total)
    }

    /// Cycles through `root`, each counted in both directions.
    fn cycles(&mut self, root: usize, v: usize, len: usize) -> Result<u64, OracleError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(OracleError::Budget(self.budget));
        }
        let mut total = 0;
        for i in 0..self.graph.adjacency[v].len() {
            let w = self.graph.adjacency[v][i];
            if w == root && len >= 3 && self.all_mandatory() {
                total += 1;
            } else if !self.visited[w] {
                self.visited[w] = true;
                total += self.cycles(root, w, len + 1)?;
                self.visited[w] = false;
            }
        }
        Ok(total)
    }
}

/// Exhaustive count of the problem's walks or polygons.
pub fn dfs_count(problem: &ProblemSpec, size: usize) -> Result<BigUint, OracleError> {
    dfs_count_with_budget(problem, size, 2_000_000_000)
}

pub fn dfs_count_with_budget(problem: &ProblemSpec, size: usize, budget: u64) -> Result<BigUint, OracleError> {
    let graph = DomainGraph::new(problem, size);
    let n = graph.vertex_count();
    let mut is_target = vec![false; n];
    for &t in &graph.targets {
        is_target[t] = true;
    }
    let mut search = Search { graph: &graph, visited: vec![false; n], is_target, steps: 0, budget };
    if graph.polygon {
        let root = graph.mandatory[0];
        search.visited[root] = true;
        let twice = search.cycles(root, root, 1)?;
        return Ok(BigUint::from(twice / 2));
    }
    let mut total = 0u64;
    for &s in &graph.sources {
        search.visited[s] = true;
        total += search.walks(s)?;
        search.visited[s] = false;
    }
    Ok(BigUint::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(id: &str, size: usize) -> u64 {
        let p: ProblemSpec = id.parse().unwrap();
        dfs_count(&p, size).unwrap().try_into().unwrap()
    }

    #[test]
    fn small_oracle_values() {
        assert_eq!(count("hex-triangle-saw", 2), 7);
        assert_eq!(count("sq-saw-crossing", 1), 2);
        assert_eq!(count("hex-rhombus-span", 2), 50);
        assert_eq!(count("sq-sap-crossing", 3), 42);
    }

    #[test]
    fn budget_is_enforced() {
        let p: ProblemSpec = "sq-saw-crossing".parse().unwrap();
        assert_eq!(dfs_count_with_budget(&p, 4, 10), Err(OracleError::Budget(10)));
    }
}
