//! Fixed instances shared by the benchmarks.

use dispersa_core::extremal::{sample_certified, CertifyOptions};
use dispersa_core::harness::{corrupt, ChannelSpec, Strategy};
use dispersa_core::mothercode::{ExpanderCode, MotherCode};
use dispersa_core::rng::rng_from_seed;
use dispersa_core::{BipartiteGraph, DisperserSpec, GraphCode, LeftWord, LinearCode, ReceivedWord};

/// A certified unique-decoding instance with a received word at the edge of the budget.
pub struct UniqueFixture {
    pub code: GraphCode<LinearCode>,
    pub k: usize,
    pub sent: LeftWord,
    pub received: ReceivedWord,
}

pub fn unique_fixture() -> UniqueFixture {
    let (n, k) = (16, 2);
    let mother = LinearCode::random_best_distance(2, 12, 4, 50, 0).expect("mother");
    let d = mother.min_distance().expect("distance");
    let spec = DisperserSpec::plain(k, (d - 1) as f64 / 24.0);
    let (g, _) = sample_certified(n, 12, 16, &spec, 2000, 0, &CertifyOptions::default()).expect("graph");
    let code = GraphCode::new(g, mother).expect("code");
    let mut rng = rng_from_seed(2);
    let sent = code.encode(&code.mother().random_codeword(&mut rng).expect("codeword")).expect("encode");
    let e = (n - k - 1) / 2;
    let spec = ChannelSpec { e, s: n - k - 1 - 2 * e, strategy: Strategy::UniformRandom, seed: 3 };
    let received = corrupt(&sent, 2, &spec, None).expect("corrupt");
    UniqueFixture { code, k, sent, received }
}

/// A certified list-decoding instance with `errors` corrupted positions.
pub fn list_fixture(errors: usize) -> UniqueFixture {
    let (n, k) = (16, 2);
    let mother = LinearCode::random_best_distance(3, 8, 2, 50, 11).expect("mother");
    let spec = DisperserSpec::plain(k, 0.5);
    let (g, _) = sample_certified(n, 8, 6, &spec, 2000, 11, &CertifyOptions::default()).expect("graph");
    let code = GraphCode::new(g, mother).expect("code");
    let sent = code.encode(&code.mother().codewords().expect("codewords")[5]).expect("encode");
    let spec = ChannelSpec { e: errors, s: 0, strategy: Strategy::UniformRandom, seed: 6 };
    let received = corrupt(&sent, 3, &spec, None).expect("corrupt");
    UniqueFixture { code, k, sent, received }
}

/// A large flip-decoded instance: `M = N/2`, degree 8, `N/64` errors on the zero word.
pub fn flip_fixture(n: usize) -> (GraphCode<ExpanderCode>, usize, ReceivedWord) {
    let m = n / 2;
    let g = BipartiteGraph::sample_left_regular(n, m, 8, 7).expect("graph");
    let g2 = BipartiteGraph::sample_left_regular(m, m / 2, 6, 8).expect("checks");
    let code = GraphCode::new(g, ExpanderCode::new(g2).flip_only()).expect("code");
    let sent = code.encode(&vec![0; m]).expect("encode");
    let spec = ChannelSpec { e: n / 64, s: 0, strategy: Strategy::UniformRandom, seed: 9 };
    let received = corrupt(&sent, 2, &spec, None).expect("corrupt");
    (code, n / 4, received)
}
