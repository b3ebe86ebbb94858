use std::time::Instant;

use abac_core::discretization::{AllAtOnceOperator, SpaceTimeMesh, SpatialOperator};
use abac_core::SpaceTimeVector;

fn t_apply_seconds(d: usize, m1: usize, n: usize) -> f64 {
    let mesh = SpaceTimeMesh::new(d, m1, n, 1.0).unwrap();
    let aao = AllAtOnceOperator::new(mesh, SpatialOperator::laplacian(&mesh)).unwrap();
    let data: Vec<f64> = (0..mesh.dof()).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect();
    let v = SpaceTimeVector::from_vec(n, mesh.m, data).unwrap();
    let mut best = f64::INFINITY;
    for _ in 0..15 {
        let start = Instant::now();
        let out = aao.t_apply(&v).unwrap();
        best = best.min(start.elapsed().as_secs_f64());
        std::hint::black_box(out);
    }
    best
}

#[test]
fn t_apply_time_is_linear_in_n_and_m() {
    // warm-up: first touches of the allocator and caches are not linear
    t_apply_seconds(1, 2047, 256);
    let base = t_apply_seconds(1, 1023, 128);
    let double_n = t_apply_seconds(1, 1023, 256);
    let double_m = t_apply_seconds(1, 2047, 128);
    for (what, ratio) in [("n", double_n / base), ("m", double_m / base)] {
        println!("doubling {what}: time ratio {ratio:.3} (base {base:.2e} s)");
        assert!((1.4..=2.6).contains(&ratio), "doubling {what} gave ratio {ratio}");
    }
}
