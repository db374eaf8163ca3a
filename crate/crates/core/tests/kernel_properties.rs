use rsfourier::kernels::{c_rq, c_rq_series, psi, psi_rq_closed, psi_rq_series, ApKernelClosedForm};

/// 101 points `k/103` in (0, 1); 103 is prime, so none is a multiple of 1/q.
fn off_jump_grid() -> Vec<f64> {
    (1..=101).map(|k| k as f64 / 103.0).collect()
}

fn on_jump(u: f64, q: i64) -> bool {
    let x = u * q as f64;
    (x - x.round()).abs() < 1e-9
}

#[test]
fn residue_classes_partition_the_sawtooth() {
    for q in 1..=12 {
        for u in off_jump_grid() {
            assert!(!on_jump(u, q));
            let total: num_complex::Complex64 = (1..=q).map(|r| psi_rq_closed(u, r, q).unwrap()).sum();
            assert!((total.re - psi(u)).abs() <= 1e-12 && total.im.abs() <= 1e-12, "q = {q}, u = {u}");
        }
    }
}

#[test]
fn closed_form_tracks_truncated_series() {
    let grid = off_jump_grid();
    let mut worst = [0.0f64; 3];
    for q in 1..=8 {
        for r in 1..=q {
            for (slot, m) in [100u64, 1000, 10_000].into_iter().enumerate() {
                for &u in &grid {
                    let d = (psi_rq_closed(u, r, q).unwrap() - psi_rq_series(u, r, q, m).unwrap()).norm();
                    worst[slot] = worst[slot].max(d);
                }
            }
        }
    }
    assert!(worst[0] > worst[1] && worst[1] > worst[2], "{worst:?}");
    assert!(worst[2] <= 1e-3, "{worst:?}");
}

#[test]
fn series_tends_to_jump_midpoints() {
    for q in 2..=6 {
        for r in 1..q {
            let k = ApKernelClosedForm::new(r, q).unwrap();
            for l in 1..q {
                let u = l as f64 / q as f64;
                let closed = psi_rq_closed(u, r, q).unwrap();
                let mean = 0.5 * (k.step_values()[l as usize - 1] + k.step_values()[l as usize]);
                assert!((closed - mean).norm() <= 1e-14);
                let series = psi_rq_series(u, r, q, 100_000).unwrap();
                assert!((closed - series).norm() <= 1e-3, "q = {q}, r = {r}, l = {l}");
            }
        }
    }
    let series = psi_rq_series(0.5, 1, 2, 100_000).unwrap();
    assert!(series.norm() <= 1e-3);
}

#[test]
fn constant_term_matches_series() {
    for q in 2..=12 {
        for r in 1..q {
            let d = (c_rq(r, q).unwrap() - c_rq_series(r, q, 1_000_000).unwrap()).norm();
            assert!(d <= 1e-6, "r = {r}, q = {q}: {d}");
        }
    }
}
