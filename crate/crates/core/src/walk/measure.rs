use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::graph::{Graph, Multiset, Vertex};

/// Walker density per position, normalised by the walker number so the
/// values sum to one. For a single walker this is the usual position
/// distribution.
pub fn position_distribution(g: &Graph, s: &FockState) -> BTreeMap<Vertex, f64> {
    let mode_position: Vec<Vertex> = g.modes().map(|m| m.position).collect();
    let n = s.walkers().max(1) as f64;
    let mut dist = BTreeMap::new();
    for (key, amp) in s.terms() {
        let p = amp.norm_sqr() / n;
        for b in key.bosons() {
            *dist.entry(mode_position[b]).or_insert(0.0) += p;
        }
    }
    dist
}

/// Probability of each multiset of walker positions, summed over coins.
pub fn coincidence_distribution(g: &Graph, s: &FockState) -> Result<BTreeMap<Multiset, f64>> {
    if s.walkers() < 2 {
        return Err(Error::Arity(s.walkers()));
    }
    let mode_position: Vec<Vertex> = g.modes().map(|m| m.position).collect();
    let mut dist = BTreeMap::new();
    for (key, amp) in s.terms() {
        let positions = Multiset::new(key.bosons().map(|b| mode_position[b]).collect());
        *dist.entry(positions).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(dist)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Spread {
    pub mean: f64,
    pub std_dev: f64,
}

/// Mean displacement from `origin` and the standard deviation about that mean.
pub fn spread_statistics(dist: &BTreeMap<Vertex, f64>, origin: Vertex) -> Result<Spread> {
    spread_of(dist.iter().map(|(&x, &p)| (x as f64 - origin as f64, p)))
}

pub(crate) fn spread_of(points: impl Iterator<Item = (f64, f64)>) -> Result<Spread> {
    let (mut total, mut first, mut second) = (0.0, 0.0, 0.0);
    let mut any = false;
    for (d, p) in points {
        any = true;
        total += p;
        first += p * d;
        second += p * d * d;
    }
    if !any || total <= 0.0 {
        return Err(Error::Validation("spread of an empty distribution".into()));
    }
    let mean = first / total;
    let var = (second / total - mean * mean).max(0.0);
    Ok(Spread {
        mean,
        std_dev: var.sqrt(),
    })
}

/// Classical unbiased ±1 random walk after `t` steps, keyed by displacement.
pub fn classical_line_walk(t: usize) -> BTreeMap<i64, f64> {
    let mut dist = BTreeMap::from([(0i64, 1.0)]);
    for _ in 0..t {
        let mut next = BTreeMap::new();
        for (&x, &p) in &dist {
            *next.entry(x - 1).or_insert(0.0) += p / 2.0;
            *next.entry(x + 1).or_insert(0.0) += p / 2.0;
        }
        dist = next;
    }
    dist
}

/// Sum of absolute differences over the union of keys.
pub fn l1_distance<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    let mut total = 0.0;
    for (k, &p) in a {
        total += (p - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &q) in b {
        if !a.contains_key(k) {
            total += q.abs();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_line, Mode};
    use crate::walk::create_walkers;

    #[test]
    fn point_mass() {
        let g = build_line(5).unwrap();
        let s = create_walkers(&g, &[Mode::new(2, 3)]).unwrap();
        let d = position_distribution(&g, &s);
        assert_eq!(d, BTreeMap::from([(2, 1.0)]));
        let sp = spread_statistics(&d, 2).unwrap();
        assert_eq!((sp.mean, sp.std_dev), (0.0, 0.0));
    }

    #[test]
    fn uniform_pair_has_unit_spread() {
        let d = BTreeMap::from([(4, 0.5), (6, 0.5)]);
        let sp = spread_statistics(&d, 5).unwrap();
        assert!(sp.mean.abs() < 1e-15);
        assert!((sp.std_dev - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_spread_rejected() {
        assert!(spread_statistics(&BTreeMap::new(), 0).is_err());
    }

    #[test]
    fn coincidence_needs_two_walkers() {
        let g = build_line(5).unwrap();
        let s = create_walkers(&g, &[Mode::new(2, 3)]).unwrap();
        assert_eq!(
            coincidence_distribution(&g, &s).unwrap_err(),
            Error::Arity(1)
        );
        let s = create_walkers(&g, &[Mode::new(3, 2), Mode::new(1, 2)]).unwrap();
        let d = coincidence_distribution(&g, &s).unwrap();
        assert_eq!(d, BTreeMap::from([(Multiset::new(vec![1, 3]), 1.0)]));
    }

    #[test]
    fn classical_walk_is_binomial() {
        let d = classical_line_walk(4);
        assert_eq!(d[&0], 6.0 / 16.0);
        assert_eq!(d[&-4], 1.0 / 16.0);
        assert!(!d.contains_key(&1));
    }

    #[test]
    fn l1_over_union() {
        let a = BTreeMap::from([(1, 0.5), (2, 0.5)]);
        let b = BTreeMap::from([(2, 0.25), (3, 0.75)]);
        assert!((l1_distance(&a, &b) - 1.5).abs() < 1e-15);
    }
}
