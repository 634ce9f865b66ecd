use mtmct_core::cluster::{objective, solve_exact, solve_heuristic, SimilarityGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn heuristic_matches_exact_on_small_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 200;
    let mut optimal = 0;
    for _ in 0..trials {
        let n = rng.random_range(1..=8);
        let mut g = SimilarityGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set_weight(i, j, rng.random_range(-1.0..=1.0));
            }
        }
        let exact = objective(&g, &solve_exact(&g).unwrap()).unwrap();
        let heur = objective(&g, &solve_heuristic(&g)).unwrap();
        assert!(heur <= exact + 1e-9, "heuristic {heur} exceeds exact {exact}");
        if (exact - heur).abs() <= 1e-9 {
            optimal += 1;
        }
    }
    println!("heuristic optimal on {optimal}/{trials}");
    assert!(optimal as f64 >= 0.95 * trials as f64);
}
