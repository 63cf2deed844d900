//! Exact and quantized consensus iterations and seeded Monte Carlo batches.
//!
//! Quantized states are kept as level indices, so consensus means every
//! index is equal. Trial `i` of a batch draws from a ChaCha8 stream keyed
//! by `(seed, i)`; outcomes are reduced in trial order, which makes the
//! statistics independent of how trials are scheduled across threads.

pub mod quantizer;

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use quantizer::{QuantizerSpec, Scheme};

use crate::error::{Error, Result};
use crate::topology::Topology;
use crate::weights::{fmt_full, WeightMatrix, Weighting};

/// Consensus threshold on the deviation from the mean for unquantized runs.
pub const EXACT_CONSENSUS_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

fn check_dim(w: &WeightMatrix, x: &[f64]) -> Result<()> {
    if w.order() != x.len() {
        return Err(Error::DimensionMismatch { expected: w.order(), found: x.len() });
    }
    Ok(())
}

fn apply(w: &WeightMatrix, x: &[f64], out: &mut [f64]) {
    let d = w.as_dense();
    for (i, o) in out.iter_mut().enumerate() {
        *o = d.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

/// `x(0), ..., x(steps)` of the linear iteration `x(t+1) = W x(t)`.
pub fn iterate(w: &WeightMatrix, x0: &[f64], steps: usize) -> Result<Vec<Vec<f64>>> {
    check_dim(w, x0)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x0.to_vec());
    for t in 0..steps {
        let mut next = vec![0.0; x0.len()];
        apply(w, &out[t], &mut next);
        out.push(next);
    }
    Ok(out)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub consensus_reached: bool,
    /// Update steps performed.
    pub iterations: usize,
    pub consensus_value: Option<f64>,
    /// `(consensus value - mean of the unquantized initial states) / Δ`.
    pub normalized_error: Option<f64>,
}

impl TrialOutcome {
    fn failed(iterations: usize) -> Self {
        TrialOutcome { consensus_reached: false, iterations, consensus_value: None, normalized_error: None }
    }
}

/// Independent random stream of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n` initial states drawn uniformly from `[-1, 1)`.
pub fn sample_initial<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Runs `x(t+1) = Q(W x(t))` from `Q(x0)` until all states agree or
/// `max_iters` updates have been made.
///
/// Under uniform quantization the map is deterministic, so a repeated
/// state means a fixed point or cycle and the trial stops as a failure.
pub fn run_trial<R: Rng + ?Sized>(
    w: &WeightMatrix,
    x0: &[f64],
    spec: &QuantizerSpec,
    max_iters: usize,
    rng: &mut R,
) -> Result<TrialOutcome> {
    check_dim(w, x0)?;
    spec.check()?;
    let target = mean(x0);
    let delta = spec.resolution();
    if spec.scheme == Scheme::None {
        let mut x = x0.to_vec();
        let mut next = vec![0.0; x.len()];
        for t in 0..=max_iters {
            let mu = mean(&x);
            if x.iter().all(|v| (v - mu).abs() <= EXACT_CONSENSUS_TOL) {
                return Ok(TrialOutcome {
                    consensus_reached: true,
                    iterations: t,
                    consensus_value: Some(mu),
                    normalized_error: Some((mu - target) / delta),
                });
            }
            if t == max_iters {
                break;
            }
            apply(w, &x, &mut next);
            std::mem::swap(&mut x, &mut next);
        }
        return Ok(TrialOutcome::failed(max_iters));
    }

    let mut idx: Vec<u32> = x0.iter().map(|&v| spec.quantize_index(spec.to_index_units(v), rng)).collect();
    let mut pos = vec![0.0; idx.len()];
    let mut seen = HashSet::new();
    let deterministic = spec.scheme == Scheme::Uniform;
    for t in 0..=max_iters {
        if idx.iter().all(|&i| i == idx[0]) {
            let value = spec.level(idx[0]);
            return Ok(TrialOutcome {
                consensus_reached: true,
                iterations: t,
                consensus_value: Some(value),
                normalized_error: Some((value - target) / delta),
            });
        }
        if t == max_iters {
            break;
        }
        if deterministic && !seen.insert(idx.clone()) {
            return Ok(TrialOutcome::failed(t));
        }
        let cur: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
        // W has unit row sums, so W acts on index units directly.
        apply(w, &cur, &mut pos);
        for (i, p) in idx.iter_mut().zip(&pos) {
            *i = spec.quantize_index(*p, rng);
        }
    }
    Ok(TrialOutcome::failed(max_iters))
}

/// Batch statistics. `eta`, `mu` and `rho` cover consensus trials only and
/// are absent when none reached consensus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    /// Percentage of trials that reached consensus.
    pub psi: f64,
    /// Mean iterations to consensus.
    pub eta: Option<f64>,
    /// Mean normalized error.
    pub mu: Option<f64>,
    /// Population variance of the normalized error.
    pub rho: Option<f64>,
    pub trials: usize,
    pub consensus_trials: usize,
    pub seed: u64,
}

impl TrialStats {
    /// Reduces outcomes in the given order.
    pub fn from_outcomes(outcomes: &[TrialOutcome], seed: u64) -> Self {
        let ok: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.consensus_reached).collect();
        let c = ok.len();
        let (eta, mu, rho) = if c == 0 {
            (None, None, None)
        } else {
            let cf = c as f64;
            let eta = ok.iter().map(|o| o.iterations as f64).sum::<f64>() / cf;
            let errs: Vec<f64> = ok.iter().map(|o| o.normalized_error.unwrap_or(0.0)).collect();
            let mu = errs.iter().sum::<f64>() / cf;
            let rho = errs.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>() / cf;
            (Some(eta), Some(mu), Some(rho))
        };
        TrialStats {
            psi: if outcomes.is_empty() { 0.0 } else { 100.0 * c as f64 / outcomes.len() as f64 },
            eta,
            mu,
            rho,
            trials: outcomes.len(),
            consensus_trials: c,
            seed,
        }
    }
}

/// Runs `trials` independent trials on a weight matrix, in parallel on the
/// current rayon pool.
pub fn monte_carlo_matrix(
    w: &WeightMatrix,
    spec: &QuantizerSpec,
    trials: usize,
    seed: u64,
    max_iters: usize,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::ParameterBounds("trials must be at least 1".into()));
    }
    spec.check()?;
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let x0 = sample_initial(w.order(), &mut rng);
            run_trial(w, &x0, spec, max_iters, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(TrialStats::from_outcomes(&outcomes, seed))
}

pub fn monte_carlo(
    topology: &Topology,
    weighting: Weighting,
    spec: &QuantizerSpec,
    trials: usize,
    seed: u64,
    max_iters: usize,
) -> Result<TrialStats> {
    let w = weighting.matrix(topology)?;
    monte_carlo_matrix(&w, spec, trials, seed, max_iters)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}

/// One Monte Carlo experiment as read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub topology: Topology,
    pub weighting: Weighting,
    pub bits: u32,
    pub scheme: Scheme,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl SimulationConfig {
    pub fn quantizer(&self) -> Result<QuantizerSpec> {
        QuantizerSpec::new(self.bits, self.scheme)
    }

    pub fn run(&self) -> Result<TrialStats> {
        monte_carlo(&self.topology, self.weighting, &self.quantizer()?, self.trials, self.seed, self.max_iters)
    }
}

/// State history of one quantized run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    /// Step at which all states agreed, if they did.
    pub consensus_at: Option<usize>,
}

impl Trajectory {
    /// CSV `t,node0,...,nodeN`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let header: Vec<String> = (0..n).map(|i| format!("node{i}")).collect();
        writeln!(out, "t,{}", header.join(","))?;
        for (t, x) in self.states.iter().enumerate() {
            let row: Vec<String> = x.iter().map(|v| fmt_full(*v)).collect();
            writeln!(out, "{t},{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Records `Q(x0), Q(W Q(x0)), ...` for at most `steps` updates, stopping
/// at consensus.
pub fn trajectory<R: Rng + ?Sized>(
    w: &WeightMatrix,
    x0: &[f64],
    spec: &QuantizerSpec,
    steps: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    check_dim(w, x0)?;
    spec.check()?;
    let agree = |x: &[f64]| match spec.scheme {
        Scheme::None => {
            let mu = mean(x);
            x.iter().all(|v| (v - mu).abs() <= EXACT_CONSENSUS_TOL)
        }
        _ => x.iter().all(|v| *v == x[0]),
    };
    let mut x: Vec<f64> = x0.iter().map(|&v| spec.quantize(v, rng)).collect();
    let mut states = vec![x.clone()];
    let mut consensus_at = agree(&x).then_some(0);
    let mut next = vec![0.0; x.len()];
    let mut t = 0;
    while consensus_at.is_none() && t < steps {
        apply(w, &x, &mut next);
        for (xi, v) in x.iter_mut().zip(&next) {
            *xi = spec.quantize(*v, rng);
        }
        t += 1;
        states.push(x.clone());
        if agree(&x) {
            consensus_at = Some(t);
        }
    }
    Ok(Trajectory { states, consensus_at })
}
