//! Walk substrates.
//!
//! A [`Graph`] is a finite undirected graph (self-loops allowed) whose
//! neighbourhoods are kept sorted. The coin value of a walker is the id of
//! the neighbour it will move to, so the walk modes are exactly the directed
//! edges `(position, coin)`, indexed densely in lexicographic order.

mod defects;
mod virtual_graph;

pub use defects::{etch_defects, DefectPattern};
pub use virtual_graph::{build_virtual_graph, Multiset, VirtualGraph};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// A walker mode: position plus the neighbour the coin points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub position: Vertex,
    pub coin: Vertex,
}

impl Mode {
    pub const fn new(position: Vertex, coin: Vertex) -> Self {
        Mode { position, coin }
    }

    /// The mode this one is sent to by the step operator.
    pub const fn stepped(self) -> Self {
        Mode {
            position: self.coin,
            coin: self.position,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.position, self.coin)
    }
}

/// Direction labels for line graphs: `Left` is the neighbour `x - 1`,
/// `Right` is `x + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineDirection {
    Left,
    Right,
}

impl LineDirection {
    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            -1 => Some(LineDirection::Left),
            1 => Some(LineDirection::Right),
            _ => None,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            LineDirection::Left => -1,
            LineDirection::Right => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<Vertex>>,
    /// `offsets[x]` is the dense index of mode `(x, neighbors[x][0])`.
    offsets: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. `(x, x)` adds a self-loop;
    /// repeated edges are merged.
    pub fn from_edges(vertex_count: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidSize("graph needs at least one vertex".into()));
        }
        let mut neighbors = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(Error::lookup(
                        "vertex",
                        format!("{v} in edge ({a},{b}); graph has {vertex_count} vertices"),
                    ));
                }
            }
            neighbors[a].push(b);
            if a != b {
                neighbors[b].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_sorted(neighbors))
    }

    fn from_sorted(neighbors: Vec<Vec<Vertex>>) -> Self {
        let mut offsets = Vec::with_capacity(neighbors.len());
        let mut acc = 0;
        for list in &neighbors {
            offsets.push(acc);
            acc += list.len();
        }
        Graph { neighbors, offsets }
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, x: Vertex) -> &[Vertex] {
        &self.neighbors[x]
    }

    pub fn degree(&self, x: Vertex) -> usize {
        self.neighbors[x].len()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.vertex_count() && self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Total number of walk modes, `Σ_x |n_x|`.
    pub fn mode_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    /// Position of `coin` within the sorted neighbourhood of `x`.
    pub fn coin_slot(&self, x: Vertex, coin: Vertex) -> Option<usize> {
        self.neighbors.get(x)?.binary_search(&coin).ok()
    }

    pub fn mode_index(&self, mode: Mode) -> Result<usize> {
        self.coin_slot(mode.position, mode.coin)
            .map(|slot| self.offsets[mode.position] + slot)
            .ok_or_else(|| Error::lookup("mode", mode))
    }

    pub fn mode(&self, index: usize) -> Mode {
        let position = match self.offsets.binary_search(&index) {
            Ok(mut p) => {
                // skip isolated vertices sharing the same offset
                while self.neighbors[p].is_empty() {
                    p += 1;
                }
                p
            }
            Err(p) => p - 1,
        };
        Mode::new(
            position,
            self.neighbors[position][index - self.offsets[position]],
        )
    }

    /// Dense indices of the modes at position `x` (its bundle).
    pub fn bundle(&self, x: Vertex) -> std::ops::Range<usize> {
        self.offsets[x]..self.offsets[x] + self.neighbors[x].len()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(x, list)| list.iter().map(move |&c| Mode::new(x, c)))
    }

    /// The step operator `(x, j) -> (j, x)` as a map on dense mode indices.
    pub fn step_permutation(&self) -> Vec<usize> {
        self.modes()
            .map(|m| {
                self.mode_index(m.stepped())
                    .expect("undirected graph: reversed edge is a mode")
            })
            .collect()
    }

    /// Coin value of the line-graph neighbour in `direction`, if present.
    pub fn line_coin(&self, x: Vertex, direction: LineDirection) -> Option<Vertex> {
        let target = x as i64 + direction.sign() as i64;
        (target >= 0 && self.has_edge(x, target as usize)).then_some(target as usize)
    }
}

/// Path graph `0 - 1 - ... - (V-1)`.
pub fn build_line(vertex_count: usize) -> Result<Graph> {
    if vertex_count < 2 {
        return Err(Error::InvalidSize(format!(
            "line needs at least 2 vertices, got {vertex_count}"
        )));
    }
    let edges: Vec<_> = (1..vertex_count).map(|x| (x - 1, x)).collect();
    Graph::from_edges(vertex_count, &edges)
}

/// Cycle graph on `V >= 3` vertices.
pub fn build_cycle(vertex_count: usize) -> Result<Graph> {
    if vertex_count < 3 {
        return Err(Error::InvalidSize(format!(
            "cycle needs at least 3 vertices, got {vertex_count}"
        )));
    }
    let edges: Vec<_> = (0..vertex_count)
        .map(|x| (x, (x + 1) % vertex_count))
        .collect();
    Graph::from_edges(vertex_count, &edges)
}

/// Complete graph with a self-loop at every vertex: every position neighbours
/// every position including itself, giving `N²` modes with mode `(x, c)` at
/// index `x·N + c`.
pub fn build_complete_with_loops(vertex_count: usize) -> Result<Graph> {
    if vertex_count == 0 {
        return Err(Error::InvalidSize(
            "complete graph needs at least 1 vertex".into(),
        ));
    }
    let neighbors = (0..vertex_count)
        .map(|_| (0..vertex_count).collect())
        .collect();
    Ok(Graph::from_sorted(neighbors))
}
