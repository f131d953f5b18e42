//! Seeded Monte Carlo run of the BB84-like protocol.
//!
//! Per pulse: Alice picks a basis. In the Z basis she measures the first qubit of
//! her prepared two-qubit state and sends the collapsed second qubit (`|φ⟩` or
//! `|φ′⟩`); in the X basis she sends `|ψ⟩ = (|φ⟩+|φ′⟩)/√2` or
//! `|ψ′⟩ = (|φ⟩-|φ′⟩)/√2`. Eve, when configured, intercepts with probability `p`,
//! clones, and forwards the Bob share of the cloner output. The channel then
//! applies depolarizing noise, Bob measures in a random basis, and only Z/Z rounds
//! are kept. A random subset of the sifted key estimates `δ_z`; the rest is the key.
//!
//! # Random streams
//!
//! Pulses are processed in fixed chunks of [`CHUNK_PULSES`]. Chunk `k` draws from
//! `ChaCha8(seed)` on stream `k + 1`; stream 0 is reserved for choosing the
//! estimation sample. Results therefore do not depend on how many worker threads
//! process the chunks.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{delta_z_threshold, fidelity_window, woodhead_rate, KeyRateReport};
use crate::circuits::{alice_measure_and_emit, prepare_alice_state, signal_pair, PrepParams};
use crate::cloners::{bob_qber_oracle, clone, CloningMachine};
use crate::error::{Error, Result};
use crate::qstate::{DensityOperator, PureState};

/// Pulses per independently seeded chunk.
pub const CHUNK_PULSES: usize = 4096;

fn default_sample_fraction() -> f64 {
    0.5
}

/// Intercept-clone-resend attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveConfig {
    pub machine: CloningMachine,
    pub interception_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub n_pulses: usize,
    /// Source angle; `α = cos θ1`.
    pub theta1: f64,
    #[serde(default)]
    pub eve: Option<EveConfig>,
    /// Fraction of the sifted key disclosed for error estimation.
    #[serde(default = "default_sample_fraction")]
    pub sample_fraction: f64,
    pub seed: u64,
    #[serde(default)]
    pub depolarizing_noise: f64,
}

impl ProtocolConfig {
    /// Honest run with `θ1 = arccos √α²`.
    pub fn new(n_pulses: usize, alpha_sq: f64, seed: u64) -> Self {
        Self {
            n_pulses,
            theta1: alpha_sq.sqrt().acos(),
            eve: None,
            sample_fraction: default_sample_fraction(),
            seed,
            depolarizing_noise: 0.0,
        }
    }

    pub fn with_eve(mut self, machine: CloningMachine, interception_probability: f64) -> Self {
        self.eve = Some(EveConfig {
            machine,
            interception_probability,
        });
        self
    }

    pub fn with_noise(mut self, depolarizing_noise: f64) -> Self {
        self.depolarizing_noise = depolarizing_noise;
        self
    }

    pub fn with_sample_fraction(mut self, sample_fraction: f64) -> Self {
        self.sample_fraction = sample_fraction;
        self
    }

    pub fn alpha_sq(&self) -> f64 {
        self.theta1.cos().powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_pulses == 0 {
            return bad("n_pulses must be positive".into());
        }
        if !(self.theta1 > 0.0 && self.theta1 < std::f64::consts::FRAC_PI_2) {
            return bad(format!("theta1 = {} is outside (0, pi/2)", self.theta1));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction < 1.0) {
            return bad(format!("sample_fraction = {} is outside (0, 1)", self.sample_fraction));
        }
        if !(0.0..=1.0).contains(&self.depolarizing_noise) {
            return bad(format!(
                "depolarizing_noise = {} is outside [0, 1]",
                self.depolarizing_noise
            ));
        }
        if let Some(eve) = &self.eve {
            if !(0.0..=1.0).contains(&eve.interception_probability) {
                return bad(format!(
                    "interception_probability = {} is outside [0, 1]",
                    eve.interception_probability
                ));
            }
            eve.machine
                .validate()
                .map_err(|e| Error::InvalidConfig(format!("eve.machine: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Continue,
    Abort,
}

/// Key bits, serialised as a string of `0`/`1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString(pub Vec<u8>);

impl BitString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.0.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        f.write_str(&s)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(serde::de::Error::custom(format!("invalid bit {other:?}"))),
            })
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map(BitString)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub sifted_length: usize,
    pub sample_size: usize,
    pub sample_errors: usize,
    pub delta_z_hat: f64,
    /// Analytic prediction for `δ_z` under the same configuration.
    pub expected_delta_z: f64,
    pub intercepted_pulses: usize,
    /// Bound chain at `δ̂_z`, with Eve's closed-form fidelity (or `F = 1` without Eve).
    pub key_rate_report: KeyRateReport,
    /// Fidelity fed into the abort rule.
    pub decision_fidelity: f64,
    pub decision_threshold: Option<f64>,
    pub decision: Decision,
    /// `R > 0` at `δ̂_z`, the looser verdict.
    pub rate_positive: bool,
    pub final_key_bits_alice: BitString,
    pub final_key_bits_bob: BitString,
}

/// Analytic Z-basis error rate: `(1-d) · p · qber(machine, α²) + d/2`.
pub fn expected_delta_z(cfg: &ProtocolConfig) -> Result<f64> {
    let eve_part = match &cfg.eve {
        Some(eve) => eve.interception_probability * bob_qber_oracle(&eve.machine, cfg.alpha_sq())?,
        None => 0.0,
    };
    let d = cfg.depolarizing_noise;
    Ok((1.0 - d) * eve_part + 0.5 * d)
}

/// Born probability of Bob's outcome 0 for every (signal, intercepted, Bob basis).
///
/// Signals are indexed `2 * basis + bit` with basis 0 = Z, 1 = X.
struct Channel {
    p0: [[[f64; 2]; 2]; 4],
    interception_probability: f64,
}

impl Channel {
    fn build(cfg: &ProtocolConfig) -> Result<Self> {
        let (phi, phi_prime) = signal_pair(cfg.alpha_sq());
        let plus = superpose(&phi, &phi_prime, 1.0)?;
        let minus = superpose(&phi, &phi_prime, -1.0)?;
        let signals = [&phi, &phi_prime, &plus, &minus];
        let bob_bases = [&phi, &plus];
        let noise = DensityOperator::maximally_mixed(2);

        let mut p0 = [[[0.0; 2]; 2]; 4];
        for (s, signal) in signals.iter().enumerate() {
            let clean = signal.density();
            let attacked = match &cfg.eve {
                Some(eve) => clone(&eve.machine, signal)?.rho_b,
                None => clean.clone(),
            };
            for (i, rho) in [clean, attacked].into_iter().enumerate() {
                let arriving = rho.mix(&noise, cfg.depolarizing_noise)?;
                for (b, zero_state) in bob_bases.iter().enumerate() {
                    p0[s][i][b] = arriving.expectation(zero_state)?.clamp(0.0, 1.0);
                }
            }
        }
        Ok(Self {
            p0,
            interception_probability: cfg.eve.map_or(0.0, |e| e.interception_probability),
        })
    }
}

fn superpose(a: &PureState, b: &PureState, sign: f64) -> Result<PureState> {
    let amps = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x + y * sign) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    PureState::new(amps, vec![2])
}

#[derive(Default)]
struct ChunkResult {
    sifted: Vec<(u8, u8)>,
    intercepted: usize,
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_chunk(cfg: &ProtocolConfig, channel: &Channel, source: &PureState, chunk: usize) -> Result<ChunkResult> {
    let start = chunk * CHUNK_PULSES;
    let len = CHUNK_PULSES.min(cfg.n_pulses - start);
    let mut rng = chunk_rng(cfg.seed, chunk as u64 + 1);
    let mut out = ChunkResult {
        sifted: Vec::with_capacity(len / 3),
        intercepted: 0,
    };
    for _ in 0..len {
        let alice_x = rng.random_bool(0.5);
        let alice_bit = if alice_x {
            rng.random_bool(0.5) as u8
        } else {
            alice_measure_and_emit(source, &mut rng)?.0
        };
        let intercepted =
            channel.interception_probability > 0.0 && rng.random::<f64>() < channel.interception_probability;
        out.intercepted += intercepted as usize;
        let bob_x = rng.random_bool(0.5);
        let signal = 2 * alice_x as usize + alice_bit as usize;
        let p0 = channel.p0[signal][intercepted as usize][bob_x as usize];
        let bob_bit = u8::from(rng.random::<f64>() >= p0);
        if !alice_x && !bob_x {
            out.sifted.push((alice_bit, bob_bit));
        }
    }
    Ok(out)
}

/// Runs the protocol; deterministic in `cfg` (including the seed).
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolOutcome> {
    cfg.validate()?;
    let channel = Channel::build(cfg)?;
    let source = prepare_alice_state(&PrepParams::for_signal(cfg.theta1)?)?;

    let n_chunks = cfg.n_pulses.div_ceil(CHUNK_PULSES);
    let chunks: Vec<ChunkResult> = (0..n_chunks)
        .into_par_iter()
        .map(|k| run_chunk(cfg, &channel, &source, k))
        .collect::<Result<_>>()?;

    let intercepted_pulses = chunks.iter().map(|c| c.intercepted).sum();
    let sifted: Vec<(u8, u8)> = chunks.into_iter().flat_map(|c| c.sifted).collect();
    let sifted_length = sifted.len();
    let sample_size = (cfg.sample_fraction * sifted_length as f64).round() as usize;
    if sample_size == 0 {
        return Err(Error::EmptySample {
            sifted: sifted_length,
            fraction: cfg.sample_fraction,
        });
    }

    let mut in_sample = vec![false; sifted_length];
    let mut sample_rng = chunk_rng(cfg.seed, 0);
    for i in index::sample(&mut sample_rng, sifted_length, sample_size) {
        in_sample[i] = true;
    }
    let mut sample_errors = 0;
    let mut alice_key = Vec::with_capacity(sifted_length - sample_size);
    let mut bob_key = Vec::with_capacity(sifted_length - sample_size);
    for (&(a, b), &sampled) in sifted.iter().zip(&in_sample) {
        if sampled {
            sample_errors += (a != b) as usize;
        } else {
            alice_key.push(a);
            bob_key.push(b);
        }
    }
    let delta_z_hat = sample_errors as f64 / sample_size as f64;

    let (report_fidelity, decision_fidelity) = match &cfg.eve {
        Some(eve) => {
            let f = eve.machine.closed_form_fidelity(cfg.alpha_sq())?;
            (f, f)
        }
        None => (1.0, fidelity_window().upper),
    };
    let decision_threshold = delta_z_threshold(decision_fidelity);
    let decision = match decision_threshold {
        Some(t) if delta_z_hat < t => Decision::Continue,
        _ => Decision::Abort,
    };

    Ok(ProtocolOutcome {
        sifted_length,
        sample_size,
        sample_errors,
        delta_z_hat,
        expected_delta_z: expected_delta_z(cfg)?,
        intercepted_pulses,
        key_rate_report: KeyRateReport::evaluate(report_fidelity, delta_z_hat)?,
        decision_fidelity,
        decision_threshold,
        decision,
        rate_positive: woodhead_rate(report_fidelity, delta_z_hat)? > 0.0,
        final_key_bits_alice: BitString(alice_key),
        final_key_bits_bob: BitString(bob_key),
    })
}
