//! Desk-scale instances shared by the integration tests and the acceptance suite.
#![allow(dead_code, clippy::too_many_arguments)]

use dispersa_core::extremal::{sample_certified, Certificate, CertifyOptions, DisperserSpec, Verdict};
use dispersa_core::mothercode::{LinearCode, MotherCode};
use dispersa_core::GraphCode;

pub struct Desk {
    pub name: String,
    pub gc: GraphCode<LinearCode>,
    pub k: usize,
    pub distance: usize,
    pub cert: Certificate,
}

/// Mother `[m, dim]_q` with the best distance of a few random draws; graph
/// sampled until exhaustively certified at `(k, delta)`, where `delta` comes
/// from `pick_delta(m, distance)`.
pub fn build(
    q: usize,
    m: usize,
    dim: usize,
    n: usize,
    k: usize,
    degree: usize,
    seed: u64,
    pick_delta: impl Fn(usize, usize) -> f64,
) -> Desk {
    let mother = LinearCode::random_best_distance(q, m, dim, 50, seed).expect("mother");
    let distance = mother.min_distance().expect("distance");
    let spec = DisperserSpec::plain(k, pick_delta(m, distance));
    let (g, cert) = sample_certified(n, m, degree, &spec, 2000, seed, &CertifyOptions::default()).expect("graph");
    assert_eq!(cert.verdict, Verdict::CertifiedExhaustive);
    Desk {
        name: format!("[{m},{dim},{distance}]_{q} N={n} D={degree} k={k}"),
        gc: GraphCode::new(g, mother).expect("code"),
        k,
        distance,
        cert,
    }
}

/// Certified at `(k, (d - 1) / 2M)`: every `k`-set misses fewer than `d/2` right vertices.
pub fn unique_desk(q: usize, m: usize, dim: usize, n: usize, k: usize, degree: usize, seed: u64) -> Desk {
    build(q, m, dim, n, k, degree, seed, |m, d| (d - 1) as f64 / (2 * m) as f64)
}

pub fn unique_desks() -> Vec<Desk> {
    vec![
        unique_desk(2, 12, 4, 16, 2, 16, 0),
        unique_desk(3, 10, 3, 12, 2, 14, 2),
        unique_desk(4, 8, 2, 12, 2, 14, 3),
        unique_desk(5, 6, 2, 10, 2, 12, 5),
        unique_desk(2, 20, 8, 24, 3, 26, 1),
        unique_desk(3, 12, 4, 16, 2, 20, 4),
    ]
}

/// Certified at `(k, rho)` for list decoding.
pub fn list_desk(q: usize, m: usize, dim: usize, n: usize, k: usize, degree: usize, rho: f64, seed: u64) -> Desk {
    build(q, m, dim, n, k, degree, seed, |_, _| rho)
}

pub fn list_desks() -> Vec<(Desk, usize, f64)> {
    vec![(list_desk(3, 8, 2, 16, 2, 6, 0.5, 11), 2, 0.5), (list_desk(4, 10, 2, 20, 2, 6, 0.5, 12), 3, 0.5)]
}
