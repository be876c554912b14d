use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::channel::{corrupt, ChannelSpec, Strategy};
use crate::bigraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::extremal::{refute_disperser_randomized, Certificate, DisperserSpec};
use crate::field::Symbol;
use crate::graphcode::{unique_decode, GraphCode, LeftWord};
use crate::mothercode::{ExpanderCode, LinearCode, MotherCode};
use crate::rng::derive_seed;

/// One prepared instance of a scaling family.
pub trait ScalingCase {
    /// Corrupts and decodes once; returns the decode time in milliseconds
    /// and whether the transmitted word came back.
    fn run(&mut self, seed: u64) -> Result<(f64, bool)>;

    fn certificate(&self) -> Option<&Certificate> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub mean_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Slope of `log2 time` against `log2 N`.
    pub exponent: f64,
    pub intercept: f64,
}

/// Least-squares fit of `log y = a log x + b`; returns `(a, b)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::param(format!("power-law fit needs at least 3 distinct sizes, got {}", xs.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::param("power-law fit needs positive finite samples"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log2(), y.log2())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    Ok((a, my - a * mx))
}

/// Mean decode time per size, then the power-law fit.
pub fn runtime_scaling<F>(sizes: &[usize], trials: u64, seed: u64, mut family: F) -> Result<ScalingReport>
where
    F: FnMut(usize, u64) -> Result<Box<dyn ScalingCase>>,
{
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::param(format!("runtime scaling needs at least 3 distinct sizes, got {}", distinct.len())));
    }
    if trials == 0 {
        return Err(Error::param("runtime scaling needs at least one trial"));
    }
    let mut cases = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let mut case = family(n, derive_seed(seed, &[i as u64]))?;
        // one untimed run warms caches and allocations
        case.run(derive_seed(seed, &[i as u64, u64::MAX]))?;
        cases.push(case);
    }
    // rounds visit every size once, so slow drift hits all sizes alike
    let mut totals = vec![0.0; sizes.len()];
    let mut successes = vec![0u64; sizes.len()];
    for t in 0..trials {
        for (i, case) in cases.iter_mut().enumerate() {
            let (ms, ok) = case.run(derive_seed(seed, &[i as u64, t]))?;
            totals[i] += ms;
            successes[i] += u64::from(ok);
        }
    }
    let points: Vec<ScalingPoint> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| ScalingPoint {
            n,
            trials,
            successes: successes[i],
            mean_ms: totals[i] / trials as f64,
            certificate: cases[i].certificate().cloned(),
        })
        .collect();
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_ms)).collect();
    let (exponent, intercept) = fit_power_law(&samples)?;
    Ok(ScalingReport { points, exponent, intercept })
}

/// Shape of a unique-decoding scaling family: `M = right_ratio * N`, degree
/// `D`, threshold `k = k_fraction * N` and `e = error_fraction * N` errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyShape {
    pub degree: usize,
    pub right_ratio: f64,
    pub k_fraction: f64,
    pub error_fraction: f64,
    /// Randomized disperser refutation trials per instance; 0 skips it.
    #[serde(default)]
    pub refute_trials: u64,
}

impl Default for FamilyShape {
    fn default() -> Self {
        FamilyShape { degree: 8, right_ratio: 0.5, k_fraction: 0.25, error_fraction: 1.0 / 64.0, refute_trials: 0 }
    }
}

impl FamilyShape {
    fn dims(&self, n: usize) -> Result<(usize, usize, usize)> {
        let m = ((n as f64) * self.right_ratio).round() as usize;
        let k = ((n as f64) * self.k_fraction).round() as usize;
        let e = ((n as f64) * self.error_fraction).floor() as usize;
        if m == 0 || k == 0 || k >= n {
            return Err(Error::param(format!("family shape degenerates at N = {n}")));
        }
        Ok((m, k, e))
    }
}

struct UniqueCase<C> {
    gc: GraphCode<C>,
    x: LeftWord,
    k: usize,
    e: usize,
    certificate: Option<Certificate>,
}

impl<C: MotherCode> ScalingCase for UniqueCase<C> {
    fn run(&mut self, seed: u64) -> Result<(f64, bool)> {
        let spec = ChannelSpec { e: self.e, s: 0, strategy: Strategy::UniformRandom, seed };
        let y = corrupt(&self.x, self.gc.alphabet_q(), &spec, None)?;
        let start = Instant::now();
        let out = unique_decode(&self.gc, &y, self.k)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        Ok((ms, out.as_ref() == Some(&self.x)))
    }

    fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }
}

fn prepare<C: MotherCode + 'static>(
    g: BipartiteGraph,
    mother: C,
    x_mother: Vec<Symbol>,
    k: usize,
    e: usize,
    shape: &FamilyShape,
    seed: u64,
) -> Result<Box<dyn ScalingCase>> {
    let certificate = if shape.refute_trials > 0 {
        let spec = DisperserSpec::plain(k, 0.5);
        Some(refute_disperser_randomized(&g, &spec, shape.refute_trials, derive_seed(seed, &[2]))?)
    } else {
        None
    };
    let gc = GraphCode::new(g, mother)?;
    let x = gc.encode(&x_mother)?;
    Ok(Box::new(UniqueCase { gc, x, k, e, certificate }))
}

/// Unique decoding with a bit-flipping expander mother on `M` variables and
/// `M / 2` checks of variable degree `check_degree`. The all-zero codeword
/// is transmitted; the code is linear, so this loses no generality.
pub fn flip_family(shape: FamilyShape, check_degree: usize) -> impl FnMut(usize, u64) -> Result<Box<dyn ScalingCase>> {
    move |n, seed| {
        let (m, k, e) = shape.dims(n)?;
        let g = BipartiteGraph::sample_left_regular(n, m, shape.degree, derive_seed(seed, &[0]))?;
        let g2 = BipartiteGraph::sample_left_regular(m, (m / 2).max(1), check_degree, derive_seed(seed, &[1]))?;
        let mother = ExpanderCode::new(g2).flip_only();
        prepare(g, mother, vec![0; m], k, e, &shape, seed)
    }
}

/// Unique decoding with a random binary mother of dimension `M / 4`,
/// decoded by exhaustive search. Only usable at very small sizes.
pub fn brute_force_family(shape: FamilyShape) -> impl FnMut(usize, u64) -> Result<Box<dyn ScalingCase>> {
    move |n, seed| {
        let (m, k, e) = shape.dims(n)?;
        let g = BipartiteGraph::sample_left_regular(n, m, shape.degree, derive_seed(seed, &[0]))?;
        let mother = LinearCode::random(2, m, (m / 4).max(1), derive_seed(seed, &[1]))?;
        prepare(g, mother, vec![0; m], k, e, &shape, seed)
    }
}
