//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p dispersa-core --test acceptance`. Exits non-zero
//! if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::Rng as _;

use common::{list_desks, unique_desks, Desk};
use dispersa_core::bigraph::BipartiteGraph;
use dispersa_core::extremal::{
    certify_disperser_exhaustive, certify_multiset_exhaustive, plan_multiset_params, refute_multiset_randomized,
    DisperserSpec, Verdict, DEFAULT_FAMILY_CAP, DEFAULT_SUBSET_CAP,
};
use dispersa_core::graphcode::{agreement, fold_list_decode, FoldParams, FoldedWord};
use dispersa_core::harness::{
    flip_family, list_budget, runtime_scaling, trial_folded, trial_list, trial_unique, unique_lattice, wilson_interval,
    FamilyShape, ListTrials, Strategy, TrialReport, UniqueTrials,
};
use dispersa_core::mothercode::{find_inner_code, list_recovery_bound, ExpanderCode, LinearCode, MotherCode};
use dispersa_core::plurality::{
    average_radius_check, intersection_witness, multiset_lbar, pair_agreement_bound, plurality_vector, scan_plurality,
    ScanMode,
};
use dispersa_core::rng::{derive_seed, rng_from_seed};
use dispersa_core::{FoldedCode, GraphCode, Symbol};

const ROOT_SEED: u64 = 0xACCE_97A0;
/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.96;

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into() }
    }
}

fn desks() -> &'static [Desk] {
    static DESKS: OnceLock<Vec<Desk>> = OnceLock::new();
    DESKS.get_or_init(unique_desks)
}

fn lists() -> &'static [(Desk, usize, f64)] {
    static LISTS: OnceLock<Vec<(Desk, usize, f64)>> = OnceLock::new();
    LISTS.get_or_init(list_desks)
}

/// Multi-set disperser code: `N = 64`, `k = 1`, `delta = 1/3` plans `D = 72`,
/// `M = 6`; binary mother `[6, 4, 2]`.
fn multiset_code() -> &'static (GraphCode<LinearCode>, usize) {
    static CODE: OnceLock<(GraphCode<LinearCode>, usize)> = OnceLock::new();
    CODE.get_or_init(|| {
        let (n, k, delta) = (64, 1, 1.0 / 3.0);
        let (d, m) = plan_multiset_params(n, k, delta).unwrap();
        let spec = DisperserSpec::multiset(k, delta);
        let mut attempt = 0;
        let g = loop {
            let g = BipartiteGraph::sample_left_regular(n, m, d, derive_seed(ROOT_SEED, &[7, attempt])).unwrap();
            let c = certify_multiset_exhaustive(&g, &spec, 3, DEFAULT_FAMILY_CAP).unwrap();
            if c.verdict == Verdict::CertifiedExhaustive {
                break g;
            }
            attempt += 1;
        };
        let mother = LinearCode::random_best_distance(2, m, 4, 50, 7).unwrap();
        assert_eq!(mother.min_distance().unwrap(), 2);
        (GraphCode::new(g, mother).unwrap(), k)
    })
}

fn folded_code() -> &'static (FoldedCode, usize) {
    static CODE: OnceLock<(FoldedCode, usize)> = OnceLock::new();
    CODE.get_or_init(|| {
        let base = common::list_desk(4, 8, 2, 16, 2, 6, 0.5, 21);
        let inner = find_inner_code(4, 0.5, 8, 21).unwrap();
        let g2 = BipartiteGraph::sample_left_regular(2 * 16 + 3, 8 * inner.len(), 3, 22).unwrap();
        let c1 = base.gc.mother().clone();
        (FoldedCode::new(base.gc.graph().clone(), c1, g2, inner).unwrap(), base.k)
    })
}

fn image<C: MotherCode>(gc: &GraphCode<C>) -> Vec<Vec<Vec<Symbol>>> {
    gc.mother().codewords().unwrap().iter().map(|c| gc.encode(c).unwrap()).collect()
}

fn max_agreement(words: &[Vec<Vec<Symbol>>]) -> usize {
    let mut best = 0;
    for (i, a) in words.iter().enumerate() {
        for b in &words[..i] {
            best = best.max(agreement(a, b));
        }
    }
    best
}

fn rate_identity() -> Check {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut check = |name: String, expected: Ratio<u64>, stated: Option<Ratio<u64>>, measured: Option<Ratio<u64>>| {
        checked += 1;
        if stated != Some(expected) || measured != Some(expected) {
            bad.push(format!("{name}: expected {expected}, stated {stated:?}, measured {measured:?}"));
        }
    };
    let linear: Vec<&Desk> = desks().iter().chain(lists().iter().map(|l| &l.0)).collect();
    for d in linear {
        let gc = &d.gc;
        let expected = Ratio::new(gc.mother().dim() as u64, (gc.length() * gc.degree()) as u64);
        check(d.name.clone(), expected, gc.rate(), gc.image_rate().unwrap());
    }
    let (mc, _) = multiset_code();
    let expected = Ratio::new(4, (mc.length() * mc.degree()) as u64);
    check("multi-set".into(), expected, mc.rate(), mc.image_rate().unwrap());

    let (fc, _) = folded_code();
    let b1 = fc.branch1();
    let expected = Ratio::new(fc.c1().dim() as u64, (b1.length() * b1.degree()) as u64);
    check("folded first branch".into(), expected, b1.rate(), b1.image_rate().unwrap());

    // expander mother: rate = dim / M, dimension read off the parity checks
    let g2 = BipartiteGraph::sample_left_regular(10, 4, 2, 3).unwrap();
    let mother = ExpanderCode::new(g2);
    let dim = mother.linear().unwrap().dim() as u64;
    let g = BipartiteGraph::sample_left_regular(12, 10, 3, 4).unwrap();
    let gc = GraphCode::new(g, mother).unwrap();
    let inj = max_agreement(&image(&gc)) < gc.length();
    if inj {
        check("expander mother".into(), Ratio::new(dim, 36), gc.rate(), gc.image_rate().unwrap());
    }
    Check::new(
        bad.is_empty(),
        format!(
            "{checked} codes exact{}",
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    )
}

fn distance_amplification() -> Check {
    let mut parts = Vec::new();
    let mut pass = desks().len() >= 5;
    for d in desks() {
        let words = image(&d.gc);
        let a = max_agreement(&words);
        let size = d.gc.mother().size();
        pass &= d.cert.verdict == Verdict::CertifiedExhaustive && size <= 4096 && a < d.k;
        parts.push(format!("|C|={size} max agreement {a} < k={}", d.k));
    }
    Check::new(pass, format!("{} instances: {}", desks().len(), parts.join(", ")))
}

fn unique_report(
    d: &Desk,
    trials: u64,
    strategy: Strategy,
    seed: u64,
    permutations: usize,
    cells: Vec<(usize, usize)>,
) -> TrialReport {
    let cfg = UniqueTrials { cells, trials, seed, strategy, permutations };
    trial_unique(&d.gc, d.k, &cfg).unwrap()
}

fn unique_guarantee() -> Check {
    let mut pass = true;
    let mut in_budget_trials = 0;
    let mut wrong = 0;
    let mut declined_out = 0;
    let mut runs = 0;
    for (i, d) in desks().iter().enumerate() {
        let n = d.gc.length();
        let lattice = unique_lattice(n, d.k);
        let boundary_present = lattice.iter().any(|&(e, s)| 2 * e + s == n - d.k)
            && lattice.iter().any(|&(e, s)| 2 * e + s == n - d.k + 1);
        pass &= boundary_present;
        let mut strategies = vec![Strategy::UniformRandom];
        if i < 2 {
            strategies.extend([Strategy::Targeted, Strategy::Clustered]);
        }
        for (j, &strategy) in strategies.iter().enumerate() {
            let r =
                unique_report(d, 1000, strategy, derive_seed(ROOT_SEED, &[3, i as u64, j as u64]), 0, lattice.clone());
            runs += 1;
            pass &= r.in_budget_perfect() && r.wrong_decodes() == 0;
            pass &= r.cells.iter().all(|c| c.trials >= 1000 && c.successes + c.failures == c.trials);
            in_budget_trials += r.cells.iter().filter(|c| c.in_budget).map(|c| c.trials).sum::<u64>();
            wrong += r.wrong_decodes();
            declined_out += r.cells.iter().filter(|c| !c.in_budget).map(|c| c.declined).sum::<u64>();
        }
    }
    Check::new(
        pass,
        format!(
            "{runs} lattice sweeps, {in_budget_trials} in-budget trials all exact, wrong decodes {wrong}, out-of-budget declines {declined_out}"
        ),
    )
}

fn unique_internals() -> Check {
    let mut accounting = 0;
    let mut order = 0;
    let mut trials = 0;
    for (i, d) in desks().iter().enumerate().take(4) {
        let lattice = unique_lattice(d.gc.length(), d.k);
        let r = unique_report(d, 100, Strategy::UniformRandom, derive_seed(ROOT_SEED, &[4, i as u64]), 20, lattice);
        accounting += r.cells.iter().map(|c| c.accounting_violations).sum::<u64>();
        order += r.cells.iter().map(|c| c.order_violations).sum::<u64>();
        trials += r.cells.iter().map(|c| c.trials).sum::<u64>();
    }
    Check::new(
        accounting == 0 && order == 0,
        format!("{trials} trials x 20 scan orders: accounting violations {accounting}, order violations {order}"),
    )
}

fn list_guarantee() -> Check {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (d, ell, rho)) in lists().iter().enumerate() {
        let n = d.gc.length();
        let budget = list_budget(n, d.k, *ell).unwrap();
        let cfg = ListTrials {
            errors: (0..=budget).collect(),
            trials: 1000,
            seed: derive_seed(ROOT_SEED, &[5, i as u64]),
            ell: *ell,
            rho: *rho,
            strategy: Strategy::UniformRandom,
        };
        let r = trial_list(&d.gc, d.k, &cfg).unwrap();
        let max_list = r.cells.iter().map(|c| c.max_list).max().unwrap_or(0);
        let bound = list_recovery_bound(d.gc.mother(), *ell, *rho, 1 << 22).ok();
        pass &= r.in_budget_perfect() && r.violations() == 0 && r.cells.iter().all(|c| c.in_budget);
        pass &= bound.is_none_or(|b| max_list <= b);
        parts.push(format!(
            "ell={ell} e<={budget}: containment 100%={}, max list {max_list} (recovery bound {})",
            r.in_budget_perfect(),
            bound.map_or("n/a".into(), |b| b.to_string())
        ));
    }
    Check::new(pass, parts.join("; "))
}

fn multiset_dispersers() -> Check {
    // randomized refutation at a planned shape beyond exhaustive reach
    let (n, k, delta) = (256, 4, 0.5);
    let (d, m) = plan_multiset_params(n, k, delta).unwrap();
    let spec = DisperserSpec::multiset(k, delta);
    let probes = 1000u64;
    let mut passed = 0;
    for p in 0..probes {
        let g = BipartiteGraph::sample_left_regular(n, m, d, derive_seed(ROOT_SEED, &[6, p])).unwrap();
        let c = refute_multiset_randomized(&g, &spec, 3, 1, derive_seed(ROOT_SEED, &[6, p, 1])).unwrap();
        passed += u64::from(!c.is_refuted());
    }
    let (_, probe_hi) = wilson_interval(passed, probes, Z95);

    // exhaustive certification on tiny planned shapes, plus the conversion
    let shapes = [(32, 2, 0.5), (64, 2, 0.5), (64, 1, 1.0 / 3.0)];
    let mut sampled = 0u64;
    let mut certified = 0u64;
    let mut conv_2k = 0u64;
    let mut conv_2k1 = 0u64;
    for (si, &(n, k, delta)) in shapes.iter().enumerate() {
        let (d, m) = plan_multiset_params(n, k, delta).unwrap();
        assert!(m <= 12);
        let spec = DisperserSpec::multiset(k, delta);
        for gi in 0..50 {
            let g = BipartiteGraph::sample_left_regular(n, m, d, derive_seed(ROOT_SEED, &[6, 1000 + si as u64, gi]))
                .unwrap();
            sampled += 1;
            let c = certify_multiset_exhaustive(&g, &spec, 3, DEFAULT_FAMILY_CAP).unwrap();
            if c.verdict != Verdict::CertifiedExhaustive {
                continue;
            }
            certified += 1;
            let plain = |kk: usize| {
                kk >= n
                    || certify_disperser_exhaustive(&g, &DisperserSpec::plain(kk, delta), DEFAULT_SUBSET_CAP)
                        .map(|c| c.verdict == Verdict::CertifiedExhaustive)
                        .unwrap_or(false)
            };
            conv_2k += u64::from(plain(2 * k));
            conv_2k1 += u64::from(plain(2 * k + 1));
        }
    }
    let (_, cert_hi) = wilson_interval(certified, sampled, Z95);
    let pass = probe_hi >= 0.99 && cert_hi >= 0.90 && conv_2k == certified;
    Check::new(
        pass,
        format!(
            "refutation passed {passed}/{probes} (95% upper {probe_hi:.4}); exhaustive certified {certified}/{sampled} (95% upper {cert_hi:.4}); plain (2k) on {conv_2k}/{certified}, plain (2k+1) on {conv_2k1}/{certified}"
        ),
    )
}

fn plurality_bounds() -> Check {
    // (a) exhaustive scans on certified codes
    let mut a_pass = true;
    let mut scans = 0;
    for d in desks() {
        let words = image(&d.gc);
        for l in 2..=4usize {
            if dispersa_core::extremal::binomial(words.len(), l) > 200_000 {
                continue;
            }
            let r = scan_plurality(&words, l, ScanMode::Exhaustive { cap: 200_000 }).unwrap();
            scans += 1;
            a_pass &= r.worst_sum as u128 <= pair_agreement_bound(d.gc.length(), l, d.k);
        }
    }

    // (b) sampled sets on the multi-set disperser code
    let (mc, k) = multiset_code();
    let words = image(mc);
    let lbar = multiset_lbar(mc.length(), *k);
    let bound = 10.0 * *k as f64 * lbar as f64 * ((lbar as f64).ln() + 2.0);
    let mut rng = rng_from_seed(derive_seed(ROOT_SEED, &[7]));
    let mut violations = 0;
    let mut worst = 0;
    for _ in 0..10_000 {
        let lam: Vec<Vec<Vec<Symbol>>> = sample(&mut rng, words.len(), lbar).iter().map(|i| words[i].clone()).collect();
        let s = plurality_vector(&lam).unwrap().sum;
        worst = worst.max(s);
        violations += usize::from(s as f64 >= bound);
    }

    // (c) plurality hypothesis implies average radius, all received words
    let mut c_checked = 0;
    let mut c_fail = 0;
    for &(n, q) in &[(8usize, 2usize), (6, 3), (8, 3)] {
        let ys = all_words(n, q);
        for l in 2..=4usize {
            for t in 0..30u64 {
                let mut rng = rng_from_seed(derive_seed(ROOT_SEED, &[7, n as u64, q as u64, l as u64, t]));
                let lam = distinct_words(&mut rng, n, q, l);
                let sum = plurality_vector(&lam).unwrap().sum;
                let eps = (sum as f64 + 0.5) / (n * l) as f64;
                assert!(average_radius_check(&lam, eps).unwrap());
                c_checked += 1;
                let radius = (1.0 - eps) * (n * l) as f64;
                let ok = ys.iter().all(|y| {
                    let total: usize = lam.iter().map(|c| c.iter().zip(y).filter(|(a, b)| a != b).count()).sum();
                    total as f64 > radius
                });
                c_fail += usize::from(!ok);
            }
        }
    }
    Check::new(
        a_pass && violations == 0 && c_fail == 0,
        format!(
            "(a) {scans} exhaustive scans within n + C(L,2)k: {a_pass}; (b) 10000 sets of size {lbar}: worst {worst} vs bound {bound:.1}, violations {violations}; (c) {c_checked} sets, conclusion failures {c_fail}"
        ),
    )
}

fn all_words(n: usize, q: usize) -> Vec<Vec<Symbol>> {
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let s = (x % q) as Symbol;
                    x /= q;
                    s
                })
                .collect()
        })
        .collect()
}

fn distinct_words(rng: &mut dispersa_core::rng::Rng, n: usize, q: usize, l: usize) -> Vec<Vec<Symbol>> {
    let mut out: Vec<Vec<Symbol>> = Vec::new();
    while out.len() < l {
        let w: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..q as Symbol)).collect();
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

fn counting_witness() -> Check {
    let (count, ground, beta) = (200, 20, 0.25);
    let families = 500u64;
    let mut found = 0;
    for f in 0..families {
        let mut rng = rng_from_seed(derive_seed(ROOT_SEED, &[8, f]));
        let sets: Vec<Vec<usize>> = (0..count)
            .map(|_| {
                let size = rng.gen_range(5..=8);
                sample(&mut rng, ground, size).into_vec()
            })
            .collect();
        let w = intersection_witness(&sets, ground, beta, 100, derive_seed(ROOT_SEED, &[8, f, 1])).unwrap();
        found += u64::from(w.is_some());
    }
    let (lo, hi) = wilson_interval(found, families, Z95);
    Check::new(hi >= 0.99, format!("witness found for {found}/{families} families (95% interval {lo:.4}..{hi:.4})"))
}

fn folded_decoder() -> Check {
    let (fc, k) = folded_code();
    let ell = 2;
    let gamma = 1.0 / ell as f64 + *k as f64 / fc.length() as f64;
    let params = FoldParams { k: *k, ell, rho: 0.5, gamma };
    let mut round_trip = true;
    for c in fc.c1().codewords().unwrap() {
        let z = fc.fold_encode(c).unwrap();
        let out = fold_list_decode(fc, &FoldedWord::clean(&z), params).unwrap();
        round_trip &= out.words.contains(&z) && out.mother_words.contains(c);
    }
    let budget = list_budget(fc.length(), *k, ell).unwrap();
    let r = trial_folded(fc, params, &[budget / 2, budget], 200, derive_seed(ROOT_SEED, &[9])).unwrap();
    let in_budget = r.cells.iter().all(|c| c.in_budget);
    Check::new(
        round_trip && in_budget && r.in_budget_perfect(),
        format!(
            "t={} dropped={}: zero-corruption round trip {round_trip}; containment at e={:?} over 200 trials: {:?}",
            fc.t(),
            fc.dropped(),
            r.cells.iter().map(|c| c.e).collect::<Vec<_>>(),
            r.cells.iter().map(|c| c.successes).collect::<Vec<_>>()
        ),
    )
}

fn runtime_scaling_check() -> Check {
    let shape = FamilyShape { refute_trials: 20, ..FamilyShape::default() };
    let sizes = [2048, 4096, 8192, 16384];
    let r = runtime_scaling(&sizes, 200, derive_seed(ROOT_SEED, &[10]), flip_family(shape, 6)).unwrap();
    let certs_ok = r.points.iter().all(|p| p.certificate.as_ref().is_some_and(|c| !c.is_refuted()));
    let pts: Vec<String> =
        r.points.iter().map(|p| format!("N={} {:.3}ms {}/{}", p.n, p.mean_ms, p.successes, p.trials)).collect();
    Check::new((0.8..=1.3).contains(&r.exponent) && certs_ok, format!("exponent {:.3}; {}", r.exponent, pts.join(", ")))
}

type Criterion = (u32, &'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "rate identity", rate_identity),
        (2, "distance amplification", distance_amplification),
        (3, "unique decoding guarantee", unique_guarantee),
        (4, "unique decoding internals", unique_internals),
        (5, "list decoding guarantee", list_guarantee),
        (6, "multi-set dispersers", multiset_dispersers),
        (7, "plurality bounds", plurality_bounds),
        (8, "counting witness", counting_witness),
        (9, "folded list decoding", folded_decoder),
        (10, "runtime scaling", runtime_scaling_check),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (id, name, f) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let check = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Check::new(false, format!("panicked: {msg}"))
        });
        failed += u32::from(!check.pass);
        println!(
            "criterion {id:>2} {}: {name} [{:.1}s] {}",
            if check.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            check.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
