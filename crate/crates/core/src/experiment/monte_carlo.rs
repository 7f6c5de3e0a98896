use super::outcome::{Coin, SpinZ, WBarOutcome, WOutcome};
use super::protocol::Protocol;
use super::tree::OutcomeTable;
use super::ExperimentError;
use crate::statevec::{born_probability, collapse, sample_measurement, StateError, TOLERANCE};
use crate::stream::StreamId;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Rounds per logical lane. Lane `k` draws its rounds from stream `k`, so the
/// partition of work is fixed by the round count alone.
pub const LANE_ROUNDS: u64 = 16_384;

/// One sampled round.
///
/// `r` and `z` are what F̄ and F read inside their labs; `wbar` and `w` are
/// drawn from the description of the sealed labs that W̄ and W measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub r: Coin,
    pub z: SpinZ,
    pub wbar: WBarOutcome,
    pub w: WOutcome,
    pub stream: StreamId,
}

fn label_index(name: &str, names: [&str; 2]) -> usize {
    names.iter().position(|n| *n == name).expect("label from known basis")
}

/// Samples one round by successive projective measurements. Draws four
/// `f64`s from the stream, one per measurement.
pub fn run_round(protocol: &Protocol, stream: StreamId) -> RoundRecord {
    let mut rng = stream.rng();
    let sample =
        |state, basis, rng: &mut _| sample_measurement(state, basis, rng).expect("protocol states are normalized");
    let (r, _) = sample(protocol.initial_state(), protocol.coin_basis(), &mut rng);
    let r = Coin::from_label(&r.name).expect("coin label");
    let (z, _) = sample(protocol.prepared_spin(r), protocol.f_basis(), &mut rng);
    let z = SpinZ::from_index(label_index(&z.name, ["down", "up"]));
    let (wbar, post) = sample(protocol.pre_measurement_state(), protocol.wbar_basis(), &mut rng);
    let wbar = WBarOutcome::from_label(&wbar.name).expect("wbar label");
    let (w, _) = sample(&post, protocol.w_basis(), &mut rng);
    let w = WOutcome::from_label(&w.name).expect("w label");
    RoundRecord { r, z, wbar, w, stream }
}

/// Precomputed Born tables that reproduce [`run_round`] draw for draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSampler {
    coin: [f64; 2],
    z: [[f64; 2]; 2],
    wbar: [f64; 2],
    w: [[f64; 2]; 2],
}

/// Same selection rule as `sample_measurement`.
fn pick(u: f64, probs: &[f64; 2]) -> usize {
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum && p > TOLERANCE {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > TOLERANCE)
        .expect("some outcome is possible")
}

impl RoundSampler {
    pub fn new(protocol: &Protocol) -> Result<Self, StateError> {
        let mut s = RoundSampler {
            coin: [0.0; 2],
            z: [[0.0; 2]; 2],
            wbar: [0.0; 2],
            w: [[0.0; 2]; 2],
        };
        for r in Coin::ALL {
            s.coin[r.index()] = born_probability(protocol.initial_state(), &protocol.coin_projector(r))?;
            for (j, (_, proj)) in protocol.f_basis().outcomes().enumerate() {
                s.z[r.index()][j] = born_probability(protocol.prepared_spin(r), proj)?;
            }
        }
        let pre = protocol.pre_measurement_state();
        for wb in WBarOutcome::ALL {
            let p = born_probability(pre, protocol.wbar_projector(wb))?;
            s.wbar[wb.index()] = p;
            if p > TOLERANCE {
                let (post, _) = collapse(pre, protocol.wbar_projector(wb))?;
                for w in WOutcome::ALL {
                    s.w[wb.index()][w.index()] = born_probability(&post, protocol.w_projector(w))?;
                }
            }
        }
        Ok(s)
    }

    pub fn sample(&self, stream: StreamId) -> RoundRecord {
        let mut rng = stream.rng();
        let r = pick(rng.random(), &self.coin);
        let z = pick(rng.random(), &self.z[r]);
        let wbar = pick(rng.random(), &self.wbar);
        let w = pick(rng.random(), &self.w[wbar]);
        RoundRecord {
            r: Coin::from_index(r),
            z: SpinZ::from_index(z),
            wbar: WBarOutcome::from_index(wbar),
            w: WOutcome::from_index(w),
            stream,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    joint: [[u64; 2]; 2],
    r: [u64; 2],
    z: [u64; 2],
}

impl Counts {
    fn add(mut self, o: Counts) -> Counts {
        for i in 0..2 {
            for j in 0..2 {
                self.joint[i][j] += o.joint[i][j];
            }
            self.r[i] += o.r[i];
            self.z[i] += o.z[i];
        }
        self
    }
}

/// Count, frequency and standard error of one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    pub count: u64,
    pub frequency: f64,
    /// `√(p(1−p)/N)`; `None` when fewer than two rounds make it meaningless.
    pub stderr: Option<f64>,
}

impl CellEstimate {
    fn new(count: u64, rounds: u64) -> Self {
        let p = count as f64 / rounds as f64;
        let stderr = (rounds >= 2).then(|| (p * (1.0 - p) / rounds as f64).sqrt());
        Self {
            count,
            frequency: p,
            stderr,
        }
    }

    /// Distance to `exact` in units of the binomial standard error at the
    /// exact value. Zero when both agree on a certain or impossible event.
    pub fn sigmas_from(&self, exact: f64, rounds: u64) -> f64 {
        let sigma = (exact * (1.0 - exact) / rounds as f64).sqrt();
        let d = (self.frequency - exact).abs();
        if sigma > 0.0 {
            d / sigma
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Empirical counterpart of [`OutcomeTable`] plus the friends' marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub rounds: u64,
    pub seed: u64,
    joint: [[u64; 2]; 2],
    r: [u64; 2],
    z: [u64; 2],
}

impl FrequencyTable {
    pub fn count(&self, wbar: WBarOutcome, w: WOutcome) -> u64 {
        self.joint[wbar.index()][w.index()]
    }

    pub fn cell(&self, wbar: WBarOutcome, w: WOutcome) -> CellEstimate {
        CellEstimate::new(self.count(wbar, w), self.rounds)
    }

    /// Joint cells in report order.
    pub fn cells(&self) -> impl Iterator<Item = (WBarOutcome, WOutcome, CellEstimate)> + '_ {
        WBarOutcome::ALL
            .into_iter()
            .flat_map(|a| WOutcome::ALL.into_iter().map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.cell(a, b)))
    }

    pub fn wbar(&self, wbar: WBarOutcome) -> CellEstimate {
        CellEstimate::new(self.joint[wbar.index()].iter().sum(), self.rounds)
    }

    pub fn w(&self, w: WOutcome) -> CellEstimate {
        CellEstimate::new(self.joint.iter().map(|row| row[w.index()]).sum(), self.rounds)
    }

    pub fn r(&self, r: Coin) -> CellEstimate {
        CellEstimate::new(self.r[r.index()], self.rounds)
    }

    pub fn z(&self, z: SpinZ) -> CellEstimate {
        CellEstimate::new(self.z[z.index()], self.rounds)
    }

    /// True when the standard errors are undefined (fewer than two rounds).
    pub fn degenerate(&self) -> bool {
        self.rounds < 2
    }

    /// Largest deviation of a joint cell from `exact`, in standard errors.
    pub fn max_sigmas(&self, exact: &OutcomeTable) -> f64 {
        self.cells()
            .map(|(a, b, c)| c.sigmas_from(exact.get(a, b), self.rounds))
            .fold(0.0, f64::max)
    }
}

/// Runs `rounds` independent rounds on `workers` threads.
///
/// Rounds are grouped into fixed lanes of [`LANE_ROUNDS`]; round `i` uses
/// stream `(seed, i / LANE_ROUNDS, i)`. Integer counts are reduced, so the
/// table is identical for every worker count.
pub fn monte_carlo(
    protocol: &Protocol,
    rounds: u64,
    seed: u64,
    workers: usize,
) -> Result<FrequencyTable, ExperimentError> {
    if rounds == 0 {
        return Err(ExperimentError::ZeroRounds);
    }
    if workers == 0 {
        return Err(ExperimentError::ZeroWorkers);
    }
    let sampler = RoundSampler::new(protocol)?;
    let lanes = rounds.div_ceil(LANE_ROUNDS);
    let run_lane = |lane: u64| {
        let mut c = Counts::default();
        let end = ((lane + 1) * LANE_ROUNDS).min(rounds);
        for i in lane * LANE_ROUNDS..end {
            let rec = sampler.sample(StreamId::new(seed, lane, i));
            c.joint[rec.wbar.index()][rec.w.index()] += 1;
            c.r[rec.r.index()] += 1;
            c.z[rec.z.index()] += 1;
        }
        c
    };
    let counts = if workers == 1 {
        (0..lanes).map(run_lane).fold(Counts::default(), Counts::add)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| {
            (0..lanes)
                .into_par_iter()
                .map(run_lane)
                .reduce(Counts::default, Counts::add)
        })
    };
    Ok(FrequencyTable {
        rounds,
        seed,
        joint: counts.joint,
        r: counts.r,
        z: counts.z,
    })
}
