use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Graph, Vertex};
use crate::error::{Error, Result};

/// A sorted multiset of vertex ids, the position of a virtual walker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset(Vec<Vertex>);

impl Multiset {
    pub fn new(mut items: Vec<Vertex>) -> Self {
        items.sort_unstable();
        Multiset(items)
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when no vertex appears twice.
    pub fn all_distinct(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }

    /// `(vertex, multiplicity)` runs in ascending vertex order.
    pub fn groups(&self) -> Vec<(Vertex, usize)> {
        let mut out: Vec<(Vertex, usize)> = Vec::new();
        for &v in &self.0 {
            match out.last_mut() {
                Some((last, count)) if *last == v => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Sub-multiset containment.
    pub fn contains_all(&self, other: &Multiset) -> bool {
        let mut i = 0;
        for &v in &other.0 {
            while i < self.0.len() && self.0[i] < v {
                i += 1;
            }
            if i == self.0.len() || self.0[i] != v {
                return false;
            }
            i += 1;
        }
        true
    }
}

impl From<Vec<Vertex>> for Multiset {
    fn from(v: Vec<Vertex>) -> Self {
        Multiset::new(v)
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// All size-`n` multisets over `0..vertex_count` in lexicographic order.
pub(crate) fn multisets(vertex_count: usize, n: usize) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(start: usize, v: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Multiset>) {
        if cur.len() == n {
            out.push(Multiset(cur.clone()));
            return;
        }
        for x in start..v {
            cur.push(x);
            rec(x, v, n, cur, out);
            cur.pop();
        }
    }
    rec(0, vertex_count, n, &mut current, &mut out);
    out
}

/// Cartesian product of the neighbourhoods of each component, in component order.
fn neighbor_tuples(g: &Graph, vertex: &Multiset) -> Vec<Vec<Vertex>> {
    let mut tuples = vec![Vec::with_capacity(vertex.len())];
    for &x in vertex.as_slice() {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                g.neighbors(x).iter().map(move |&c| {
                    let mut next = t.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    tuples
}

/// The graph traversed by a single virtual walker standing in for `n`
/// indistinguishable walkers on `base`.
///
/// Vertices are size-`n` multisets. Adjacency comes from pairing components
/// along base edges. At a vertex with all-distinct components every coin tuple
/// is its own edge (parallel edges are kept, so the degree is the product of
/// base degrees). At vertices with a repeated component the neighbour
/// multisets are merged, since swapping the coins of co-located walkers gives
/// the same configuration.
#[derive(Debug, Clone)]
pub struct VirtualGraph {
    base: Graph,
    walkers: usize,
    vertices: Vec<Multiset>,
    index: HashMap<Multiset, usize>,
    adjacency: Vec<Vec<usize>>,
}

pub fn build_virtual_graph(base: &Graph, walkers: usize) -> Result<VirtualGraph> {
    if walkers == 0 {
        return Err(Error::InvalidSize(
            "virtual graph needs at least one walker".into(),
        ));
    }
    let vertices = multisets(base.vertex_count(), walkers);
    let index: HashMap<_, _> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let adjacency = vertices
        .iter()
        .map(|v| {
            let targets = neighbor_tuples(base, v)
                .into_iter()
                .map(|t| index[&Multiset::new(t)]);
            if v.all_distinct() {
                let mut list: Vec<usize> = targets.collect();
                list.sort_unstable();
                list
            } else {
                targets.collect::<BTreeSet<_>>().into_iter().collect()
            }
        })
        .collect();
    Ok(VirtualGraph {
        base: base.clone(),
        walkers,
        vertices,
        index,
        adjacency,
    })
}

impl VirtualGraph {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn walkers(&self) -> usize {
        self.walkers
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Multiset] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Multiset {
        &self.vertices[i]
    }

    pub fn index_of(&self, vertex: &Multiset) -> Result<usize> {
        self.index
            .get(vertex)
            .copied()
            .ok_or_else(|| Error::lookup("virtual vertex", vertex))
    }

    /// Neighbour indices of vertex `i`, sorted, with parallel edges repeated.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Coin-space size at a virtual vertex.
    ///
    /// All-distinct components give `∏ |n_{x_i}|`. With a repeated component
    /// the count of distinct reachable neighbour multisets is returned instead,
    /// which is a convention: the generic product formula double counts there.
    pub fn degree(&self, vertex: &Multiset) -> Result<usize> {
        self.index_of(vertex)?;
        if vertex.all_distinct() {
            Ok(vertex
                .as_slice()
                .iter()
                .map(|&x| self.base.degree(x))
                .product())
        } else {
            Ok(neighbor_tuples(&self.base, vertex)
                .into_iter()
                .map(Multiset::new)
                .collect::<BTreeSet<_>>()
                .len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_line;

    #[test]
    fn multiset_canonical() {
        assert_eq!(Multiset::new(vec![3, 1]), Multiset::new(vec![1, 3]));
        assert!(Multiset::new(vec![2, 2]).groups() == vec![(2, 2)]);
        assert!(Multiset::new(vec![1, 2, 2, 5]).contains_all(&Multiset::new(vec![2, 5])));
        assert!(!Multiset::new(vec![1, 2, 5]).contains_all(&Multiset::new(vec![2, 2])));
    }

    #[test]
    fn line6_two_walkers_has_21_vertices() {
        let vg = build_virtual_graph(&build_line(6).unwrap(), 2).unwrap();
        assert_eq!(vg.vertex_count(), 21);
        let diagonal = vg.vertices().iter().filter(|v| !v.all_distinct()).count();
        assert_eq!(diagonal, 6);
    }

    #[test]
    fn degree_examples() {
        let line = build_line(6).unwrap();
        let vg = build_virtual_graph(&line, 2).unwrap();
        assert_eq!(vg.degree(&Multiset::new(vec![2, 4])).unwrap(), 4);
        assert_eq!(vg.degree(&Multiset::new(vec![0, 3])).unwrap(), 2);
        // diagonal {2,2}: neighbour multisets {1,1},{1,3},{3,3}
        assert_eq!(vg.degree(&Multiset::new(vec![2, 2])).unwrap(), 3);

        let vg3 = build_virtual_graph(&line, 3).unwrap();
        assert_eq!(vg3.degree(&Multiset::new(vec![1, 2, 4])).unwrap(), 8);
        assert!(vg3.degree(&Multiset::new(vec![1, 2])).is_err());
    }

    #[test]
    fn single_walker_is_base_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 2), (3, 0), (1, 3), (4, 2)]).unwrap();
        let vg = build_virtual_graph(&g, 1).unwrap();
        assert_eq!(vg.vertex_count(), 5);
        for x in 0..5 {
            let i = vg.index_of(&Multiset::new(vec![x])).unwrap();
            let nbrs: Vec<_> = vg
                .neighbors(i)
                .iter()
                .map(|&j| vg.vertex(j).as_slice()[0])
                .collect();
            assert_eq!(nbrs, g.neighbors(x));
        }
    }

    #[test]
    fn zero_walkers_rejected() {
        assert!(build_virtual_graph(&build_line(3).unwrap(), 0).is_err());
    }
}
