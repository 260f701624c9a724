use hedonic_core::decomposition::{heuristic_decompose, make_nice, Heuristic};
use hedonic_core::oracle::{brute_force_connected_nash, brute_force_nash, brute_force_stable_coloring};
use hedonic_core::random::{random_instance, RandomSpec};
use hedonic_core::{
    choose_k, is_connected_partition, is_nash_stable, solve_connected_nash, solve_nash_via_coloring, square_graph,
    SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn suite(seed: u64, count: usize, max_n: usize) -> Vec<hedonic_core::AshgInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let spec = RandomSpec {
                n: rng.gen_range(1..=max_n),
                edge_probability: rng.gen_range(0.3..0.9),
                ..RandomSpec::default()
            };
            random_instance(&mut rng, &spec)
        })
        .collect()
}

#[test]
fn coloring_dp_agrees_with_oracle() {
    for (i, g) in suite(11, 120, 7).iter().enumerate() {
        let oracle = brute_force_nash(g).unwrap();
        for h in [Heuristic::MinDegree, Heuristic::MinFill] {
            let td = heuristic_decompose(g, h);
            let got = solve_nash_via_coloring(g, &td, &SolverConfig::default()).unwrap();
            assert_eq!(got.is_some(), oracle.is_some(), "instance {i} {h:?}: {g:?}");
            if let Some(p) = got {
                assert!(is_nash_stable(g, &p).unwrap());
            }
        }
    }
}

#[test]
fn connected_dp_agrees_with_oracle() {
    for (i, g) in suite(12, 120, 7).iter().enumerate() {
        let oracle = brute_force_connected_nash(g).unwrap();
        let ntd = make_nice(&heuristic_decompose(g, Heuristic::MinFill)).unwrap();
        let got = solve_connected_nash(g, &ntd, &SolverConfig::parallel()).unwrap();
        assert_eq!(got.is_some(), oracle.is_some(), "instance {i}: {g:?}");
        if let Some(p) = got {
            assert!(is_nash_stable(g, &p).unwrap());
            assert!(is_connected_partition(g, &p).unwrap());
        }
    }
}

#[test]
fn stable_coloring_exists_iff_stable_partition_exists() {
    for (i, g) in suite(13, 120, 6).iter().enumerate() {
        let td = heuristic_decompose(g, Heuristic::MinDegree);
        let k = choose_k(td.max_bag_size(), g.max_degree());
        let coloring = brute_force_stable_coloring(g, k).unwrap();
        assert_eq!(coloring.is_some(), brute_force_nash(g).unwrap().is_some(), "instance {i}: {g:?}");
    }
}

#[test]
fn squaring_turns_nash_into_connected_nash() {
    for g in suite(14, 80, 7) {
        let plain = brute_force_nash(&g).unwrap().is_some();
        assert_eq!(brute_force_connected_nash(&square_graph(&g)).unwrap().is_some(), plain);
    }
}
