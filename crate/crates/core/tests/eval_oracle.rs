use mtmct_core::eval::{id_measures, HypothesisRecord, IdScores, TruthRecord};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RADIUS: f64 = 1.0;

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<TruthRecord>, Vec<HypothesisRecord>) {
    let n_true = rng.random_range(1..=5u32);
    let n_hyp = rng.random_range(1..=5u64);
    let mut truth = Vec::new();
    let mut hyp = Vec::new();
    for id in 1..=n_true {
        let camera_id = rng.random_range(1..=2);
        let x0 = 10.0 * id as f64;
        for frame in 0..rng.random_range(1..30u64) {
            let center = [x0, frame as f64];
            truth.push(TruthRecord {
                camera_id,
                frame,
                identity: id,
                center,
            });
            if rng.random_bool(0.8) {
                let near = rng.random_bool(0.9);
                let off = if near { rng.random_range(-0.6..0.6) } else { 5.0 };
                hyp.push(HypothesisRecord {
                    camera_id,
                    frame,
                    hypothesis: rng.random_range(1..=n_hyp),
                    center: [center[0] + off, center[1]],
                });
            }
        }
    }
    for _ in 0..rng.random_range(0..10) {
        let camera_id = truth[rng.random_range(0..truth.len())].camera_id;
        hyp.push(HypothesisRecord {
            camera_id,
            frame: rng.random_range(0..30),
            hypothesis: rng.random_range(1..=n_hyp),
            center: [rng.random_range(0.0..60.0), rng.random_range(0.0..30.0)],
        });
    }
    (truth, hyp)
}

/// Overlap by brute force over every record pair, then the best one-to-one
/// matching by enumerating all partial injections truth -> hypothesis.
fn oracle(truth: &[TruthRecord], hyp: &[HypothesisRecord]) -> (u64, u64, u64) {
    let mut tids: Vec<u32> = truth.iter().map(|t| t.identity).collect();
    tids.sort();
    tids.dedup();
    let mut hids: Vec<u64> = hyp.iter().map(|h| h.hypothesis).collect();
    hids.sort();
    hids.dedup();
    let mut overlap = vec![vec![0u64; hids.len()]; tids.len()];
    for t in truth {
        for h in hyp {
            let d = ((t.center[0] - h.center[0]).powi(2) + (t.center[1] - h.center[1]).powi(2)).sqrt();
            if t.camera_id == h.camera_id && t.frame == h.frame && d <= RADIUS {
                let ti = tids.iter().position(|&x| x == t.identity).unwrap();
                let hi = hids.iter().position(|&x| x == h.hypothesis).unwrap();
                overlap[ti][hi] += 1;
            }
        }
    }
    fn best(overlap: &[Vec<u64>], row: usize, used: &mut Vec<bool>) -> u64 {
        if row == overlap.len() {
            return 0;
        }
        let mut top = best(overlap, row + 1, used);
        for h in 0..used.len() {
            if !used[h] {
                used[h] = true;
                top = top.max(overlap[row][h] + best(overlap, row + 1, used));
                used[h] = false;
            }
        }
        top
    }
    let tp = best(&overlap, 0, &mut vec![false; hids.len()]);
    (tp, hyp.len() as u64 - tp, truth.len() as u64 - tp)
}

#[test]
fn matches_exhaustive_assignment_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let (truth, hyp) = random_instance(&mut rng);
        let s = id_measures(&truth, &hyp, RADIUS).unwrap();
        assert_eq!((s.idtp, s.idfp, s.idfn), oracle(&truth, &hyp), "case {case}");
    }
}

proptest! {
    #[test]
    fn idf1_is_harmonic_mean(seed in any::<u64>()) {
        let (truth, hyp) = random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let s = id_measures(&truth, &hyp, RADIUS).unwrap();
        if s.idp + s.idr > 0.0 {
            let h = 2.0 * s.idp * s.idr / (s.idp + s.idr);
            prop_assert!((s.idf1 - h).abs() < 1e-12);
        }
    }

    #[test]
    fn invariant_to_hypothesis_relabeling(seed in any::<u64>(), shift in 1u64..1000) {
        let (truth, hyp) = random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        // A bijection that also reverses id order.
        let relabeled: Vec<HypothesisRecord> = hyp
            .iter()
            .map(|h| HypothesisRecord { hypothesis: shift + 100 - h.hypothesis, ..h.clone() })
            .collect();
        prop_assert_eq!(
            id_measures(&truth, &hyp, RADIUS).unwrap(),
            id_measures(&truth, &relabeled, RADIUS).unwrap()
        );
    }

    #[test]
    fn unmatched_track_lowers_precision_only(seed in any::<u64>()) {
        let (truth, mut hyp) = random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let before: IdScores = id_measures(&truth, &hyp, RADIUS).unwrap();
        // Precision that is already zero cannot drop further.
        prop_assume!(before.idtp > 0);
        let camera_id = truth[0].camera_id;
        hyp.extend((0..5).map(|f| HypothesisRecord {
            camera_id,
            frame: f,
            hypothesis: 999,
            center: [-500.0, -500.0],
        }));
        let after = id_measures(&truth, &hyp, RADIUS).unwrap();
        prop_assert!(after.idp < before.idp);
        prop_assert_eq!(after.idr, before.idr);
    }
}
