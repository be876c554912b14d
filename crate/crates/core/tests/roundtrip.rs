mod common;

use dispersa_core::graphcode::{half_distance, list_decode, unique_decode};
use dispersa_core::harness::{corrupt, ChannelSpec, Strategy};
use dispersa_core::mothercode::MotherCode;
use dispersa_core::rng::rng_from_seed;
use dispersa_core::{BipartiteGraph, LinearCode, ReceivedWord};

#[test]
fn files_round_trip() {
    let d = common::unique_desk(3, 10, 3, 12, 2, 14, 2);
    let g = BipartiteGraph::from_json(&d.gc.graph().to_json().unwrap()).unwrap();
    assert_eq!(&g, d.gc.graph());
    let c = LinearCode::from_json(&d.gc.mother().to_json().unwrap()).unwrap();
    assert_eq!(c.codewords().unwrap(), d.gc.mother().codewords().unwrap());
    let x = d.gc.encode(&d.gc.mother().codewords().unwrap()[4]).unwrap();
    let spec = ChannelSpec { e: 2, s: 3, strategy: Strategy::UniformRandom, seed: 1 };
    let y = corrupt(&x, 3, &spec, None).unwrap();
    let back = ReceivedWord::from_json(&y.to_json(3, d.gc.degree()).unwrap()).unwrap();
    assert_eq!(back, y);
    let cert: dispersa_core::Certificate = serde_json::from_str(&d.cert.to_json().unwrap()).unwrap();
    assert_eq!(cert, d.cert);
}

#[test]
fn corrupt_then_decode_on_every_desk() {
    for d in common::unique_desks() {
        let n = d.gc.length();
        let q = d.gc.alphabet_q();
        let mut rng = rng_from_seed(3);
        for seed in 0..50 {
            let c = d.gc.mother().random_codeword(&mut rng).unwrap();
            let x = d.gc.encode(&c).unwrap();
            let e = (n - d.k - 1) / 2;
            let s = n - d.k - 1 - 2 * e;
            let y = corrupt(&x, q, &ChannelSpec { e, s, strategy: Strategy::Clustered, seed }, None).unwrap();
            assert_eq!(half_distance(&y, &x).unwrap(), n - d.k - 1);
            assert_eq!(unique_decode(&d.gc, &y, d.k).unwrap(), Some(x.clone()), "{}", d.name);
        }
    }
}

#[test]
fn list_decoding_contains_the_transmitted_word() {
    for (d, ell, rho) in common::list_desks() {
        let q = d.gc.alphabet_q();
        let budget = dispersa_core::harness::list_budget(d.gc.length(), d.k, ell).unwrap();
        for seed in 0..50 {
            let c = d.gc.mother().codewords().unwrap()[seed as usize % 9].clone();
            let x = d.gc.encode(&c).unwrap();
            let y = corrupt(&x, q, &ChannelSpec { e: budget, s: 0, strategy: Strategy::UniformRandom, seed }, None)
                .unwrap();
            assert!(list_decode(&d.gc, &y, d.k, ell, rho).unwrap().contains(&x));
        }
    }
}
