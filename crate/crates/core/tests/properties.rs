use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qwalk_core::fock::{FockState, ModeUnitary, OccupationVector};
use qwalk_core::graph::{
    build_complete_with_loops, build_cycle, build_line, build_virtual_graph, Graph, Mode,
};
use qwalk_core::linalg::{max_abs_diff, random_unitary};
use qwalk_core::optics::{
    compile_network_to_walk, compile_walk_to_network, hoist_cphases, operator_distance,
    padded_mode_map_distance, reck_decompose, Element, HoistOutcome, NetToWalkOptions,
    OpticalNetwork,
};
use qwalk_core::walk::{
    coincidence_distribution, evolve, l1_distance, mode_map, position_distribution, walker_state,
    CoinAssignment, WalkSchedule, WalkStep,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_walkers(g: &Graph, n: usize, rng: &mut impl Rng) -> FockState {
    let walkers: Vec<Vec<(Mode, Complex64)>> = (0..n)
        .map(|_| {
            let x = rng.random_range(0..g.vertex_count());
            g.neighbors(x)
                .iter()
                .map(|&c| {
                    (
                        Mode::new(x, c),
                        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                    )
                })
                .collect()
        })
        .collect();
    walker_state(g, &walkers).unwrap()
}

fn random_coins(g: &Graph, rng: &mut impl Rng) -> CoinAssignment {
    let mats = (0..g.vertex_count())
        .map(|x| random_unitary(g.degree(x), rng))
        .collect();
    CoinAssignment::new(g, mats).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_preserves_norm(seed in any::<u64>(), v in 3usize..9, n in 1usize..4, t in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = build_cycle(v).unwrap();
        let s = random_walkers(&g, n, &mut rng);
        let steps = (0..t).map(|_| WalkStep::new(random_coins(&g, &mut rng))).collect();
        let out = evolve(&g, &s, &WalkSchedule::new(steps)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let total: f64 = position_distribution(&g, &out).values().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_is_an_involution(seed in any::<u64>(), v in 2usize..7, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = build_complete_with_loops(v).unwrap();
        let s = random_walkers(&g, n, &mut rng);
        let perm = g.step_permutation();
        let twice = s.apply_mode_permutation(&perm).unwrap().apply_mode_permutation(&perm).unwrap();
        prop_assert!((twice.inner_product(&s).unwrap().norm() - 1.0).abs() < 1e-12);
        for (k, a) in s.terms() {
            prop_assert!((twice.amplitude(k) - a).norm() < 1e-15);
        }
    }

    #[test]
    fn cycle_walk_is_rotation_equivariant(seed in any::<u64>(), v in 3usize..12, shift in 0usize..12, t in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = build_cycle(v).unwrap();
        let coin = random_unitary(2, &mut rng);
        let amps = [Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.77)];
        let schedule = WalkSchedule::repeated(&directional_coins(&g, &coin), t);
        let s = shift % v;
        let base = position_distribution(&g, &evolve(&g, &directional_walker(&g, 0, amps), &schedule).unwrap());
        let moved = position_distribution(&g, &evolve(&g, &directional_walker(&g, s, amps), &schedule).unwrap());
        let rotated: BTreeMap<usize, f64> = base.iter().map(|(&x, &p)| ((x + s) % v, p)).collect();
        prop_assert!(l1_distance(&rotated, &moved) < 1e-12);
    }

    #[test]
    fn permutation_commutes_with_conjugated_phase(seed in any::<u64>(), m in 2usize..7, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let modes: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let s = FockState::create(&modes, m).unwrap()
            .apply_mode_unitary(&ModeUnitary::full(random_unitary(m, &mut rng)).unwrap()).unwrap();
        let phase = |w: &[f64]| {
            let w = w.to_vec();
            move |k: &OccupationVector| k.bosons().map(|b| w[b]).sum::<f64>() + 0.3 * f64::from(k.count(0) * k.count(m - 1))
        };
        // D then P equals P then (D relabelled by P)
        let lhs = s.apply_diagonal_phase(phase(&weights)).apply_mode_permutation(&perm).unwrap();
        let mut moved = vec![0.0; m];
        for i in 0..m {
            moved[perm[i]] = weights[i];
        }
        let first = s.apply_mode_permutation(&perm).unwrap();
        let (p0, pl) = (perm[0], perm[m - 1]);
        let rhs = first.apply_diagonal_phase(move |k: &OccupationVector| {
            k.bosons().map(|b| moved[b]).sum::<f64>() + 0.3 * f64::from(k.count(p0) * k.count(pl))
        });
        for (k, a) in lhs.terms() {
            prop_assert!((rhs.amplitude(k) - a).norm() < 1e-12);
        }
    }

    #[test]
    fn reck_round_trip(seed in any::<u64>(), k in 1usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(k, &mut rng);
        let net = reck_decompose(&u).unwrap();
        prop_assert!(net.beamsplitter_count() <= k * (k - 1) / 2);
        prop_assert!(max_abs_diff(&net.mode_map().unwrap(), &u) <= 1e-9);
    }

    #[test]
    fn walk_to_network_agrees_on_two_bosons(seed in any::<u64>(), v in 2usize..7, t in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = build_line(v).unwrap();
        let steps = (0..t).map(|_| WalkStep::new(random_coins(&g, &mut rng))).collect();
        let schedule = WalkSchedule::new(steps);
        let net = compile_walk_to_network(&g, &schedule).unwrap();
        prop_assert!(max_abs_diff(&net.mode_map().unwrap(), &mode_map(&g, &schedule).unwrap()) <= 1e-9);
        let s = random_walkers(&g, 2, &mut rng);
        let by_walk = coincidence_distribution(&g, &evolve(&g, &s, &schedule).unwrap()).unwrap();
        let by_net = coincidence_distribution(&g, &net.apply(&s).unwrap()).unwrap();
        prop_assert!(l1_distance(&by_walk, &by_net) <= 1e-10);
    }

    #[test]
    fn network_round_trip(seed in any::<u64>(), modes in 2usize..17, len in 1usize..8, batch in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elements = (0..len).map(|_| {
            let i = rng.random_range(0..modes);
            let j = (i + rng.random_range(1..modes)) % modes;
            match rng.random_range(0..3) {
                0 => Element::phase(i, rng.random_range(0.0..2.0 * PI)),
                1 => Element::cphase(i, j, rng.random_range(0.0..2.0 * PI)),
                _ => Element::beamsplitter(i, j, random_unitary(2, &mut rng)),
            }
        }).collect();
        let net = OpticalNetwork::new(modes, elements).unwrap();
        let walk = compile_network_to_walk(&net, NetToWalkOptions { batch_parallel: batch }).unwrap();
        let back = compile_walk_to_network(&walk.graph, &walk.schedule).unwrap();
        if net.cphase_count() == 0 {
            prop_assert!(padded_mode_map_distance(&net.mode_map().unwrap(), &back.mode_map().unwrap()) <= 1e-9);
        }
        // two bosons on the network modes, padded modes left empty
        let a = rng.random_range(0..modes);
        let b = rng.random_range(0..modes);
        let padded = walk.graph.mode_count();
        let direct = net.apply(&FockState::create(&[a, b], modes).unwrap()).unwrap();
        let via_walk = evolve(&walk.graph, &FockState::create(&[a, b], padded).unwrap(), &walk.schedule).unwrap();
        for (k, amp) in via_walk.terms() {
            let inside = k.bosons().all(|x| x < modes);
            let expected = if inside { direct.amplitude(k) } else { Complex64::new(0.0, 0.0) };
            prop_assert!((amp - expected).norm() <= 1e-10);
        }
    }

    #[test]
    fn hoisting_preserves_the_circuit(seed in any::<u64>(), modes in 3usize..7, len in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elements = (0..len).map(|_| {
            let i = rng.random_range(0..modes);
            let j = (i + rng.random_range(1..modes)) % modes;
            match rng.random_range(0..4) {
                0 => Element::phase(i, if rng.random_bool(0.5) { PI } else { 0.4 }),
                1 => Element::cphase(i, j, PI),
                2 => Element::swap(i, j),
                _ => Element::beamsplitter(i, j, random_unitary(2, &mut rng)),
            }
        }).collect();
        let net = OpticalNetwork::new(modes, elements).unwrap();
        if let HoistOutcome::Hoisted { prefix, suffix, cphase_count } = hoist_cphases(&net) {
            prop_assert_eq!(cphase_count, net.cphase_count());
            prop_assert_eq!(suffix.cphase_count(), 0);
            let joined = prefix.then(&suffix).unwrap();
            prop_assert!(operator_distance(net.elements(), joined.elements(), 2).unwrap() <= 1e-10);
        }
    }
}

/// Coin slots are ordered by neighbour index, which on a cycle puts the
/// wrap-around neighbour first at the last vertex and second at vertex 0.
/// These helpers express coins and states in (left, right) order instead.
fn left_first(g: &Graph, x: usize) -> bool {
    let v = g.vertex_count();
    g.neighbors(x)[0] == (x + v - 1) % v
}

fn directional_coins(g: &Graph, coin: &qwalk_core::Matrix) -> CoinAssignment {
    let mats = (0..g.vertex_count())
        .map(|x| {
            if left_first(g, x) {
                coin.clone()
            } else {
                let mut m = coin.clone();
                m.swap([0, 0], [1, 1]);
                m.swap([0, 1], [1, 0]);
                m
            }
        })
        .collect();
    CoinAssignment::new(g, mats).unwrap()
}

fn directional_walker(g: &Graph, x: usize, amps: [Complex64; 2]) -> FockState {
    let v = g.vertex_count();
    let (l, r) = ((x + v - 1) % v, (x + 1) % v);
    walker_state(
        g,
        &[vec![(Mode::new(x, l), amps[0]), (Mode::new(x, r), amps[1])]],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn step_permutation_is_a_valid_involution(seed in any::<u64>(), v in 1usize..9, density in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..v {
            for b in a..v {
                if rng.random::<f64>() < density {
                    edges.push((a, b));
                }
            }
        }
        let g = Graph::from_edges(v, &edges).unwrap();
        let perm = g.step_permutation();
        prop_assert_eq!(perm.len(), g.mode_count());
        let mut seen = vec![false; perm.len()];
        for (i, &j) in perm.iter().enumerate() {
            prop_assert!(!seen[j]);
            seen[j] = true;
            prop_assert_eq!(perm[j], i);
            let m = g.mode(i);
            prop_assert_eq!(g.mode(j), Mode::new(m.coin, m.position));
        }
    }

    #[test]
    fn two_walkers_on_a_path_live_on_a_lattice(v in 2usize..12) {
        let g = build_line(v).unwrap();
        let vg = build_virtual_graph(&g, 2).unwrap();
        prop_assert_eq!(vg.vertex_count(), v * (v + 1) / 2);
        for i in 0..vg.vertex_count() {
            let a = vg.vertex(i).as_slice().to_vec();
            for &j in vg.neighbors(i) {
                let b = vg.vertex(j).as_slice().to_vec();
                if a[0] == a[1] || b[0] == b[1] {
                    continue;
                }
                // walkers are unlabelled, so either pairing may realise the move
                let straight = a[0].abs_diff(b[0]) == 1 && a[1].abs_diff(b[1]) == 1;
                let crossed = a[0].abs_diff(b[1]) == 1 && a[1].abs_diff(b[0]) == 1;
                prop_assert!(straight || crossed, "{:?} -> {:?}", a, b);
            }
        }
    }
}
