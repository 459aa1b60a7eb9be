//! Photon-subtracted squeezed vacuum ("kitten" states).
//!
//! A squeezed vacuum `Σ Cₙ|n⟩` is split at angle `θ_sub` and `k` photons are
//! counted in the tapped arm. The kept arm is then, up to an `n`-independent
//! factor, `Σₙ √(n!/(n−k)!) cos^{n−k}θ_sub Cₙ |n−k⟩`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::circuits::beamsplit;
use crate::combinatorics::{ln_binomial, ln_falling, log_sum_exp};
use crate::error::{Error, Result};
use crate::fock::{cis, tensor, FockState, ModeLayout};
use crate::measurement::measure_count;
use crate::states::{squeezed_vacuum, squeezed_vacuum_log_term, InfiniteSqueezeLimit, Squeeze};

/// Largest tail mass beyond the cutoff that a kitten construction accepts.
pub const KITTEN_TAIL_LIMIT: f64 = 1e-10;

/// Input squeezing of the subtraction stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Squeezing {
    /// Mean photons `sinh²r` of the input squeezed vacuum.
    Photons(f64),
    /// The `r → ∞` limit.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KittenSpec {
    pub squeezing: Squeezing,
    /// Phase `θ` of the input `ξ = r e^{iθ}`.
    pub squeeze_theta: f64,
    pub theta_sub: f64,
    pub k: usize,
    pub cutoff: usize,
}

impl KittenSpec {
    pub fn finite(squeeze_photons: f64, theta_sub: f64, k: usize, cutoff: usize) -> Self {
        Self {
            squeezing: Squeezing::Photons(squeeze_photons),
            squeeze_theta: 0.0,
            theta_sub,
            k,
            cutoff,
        }
    }

    pub fn infinite(theta_sub: f64, k: usize, cutoff: usize) -> Self {
        Self {
            squeezing: Squeezing::Infinite,
            squeeze_theta: 0.0,
            theta_sub,
            k,
            cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_sub > 0.0 && self.theta_sub < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "theta_sub = {} outside (0, π/2)",
                self.theta_sub
            )));
        }
        if let Squeezing::Photons(s) = self.squeezing {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::InvalidArgument(format!("squeezing photons {s}")));
            }
        }
        if !self.squeeze_theta.is_finite() {
            return Err(Error::InvalidArgument(
                "squeeze phase must be finite".into(),
            ));
        }
        Ok(())
    }

    fn squeeze(&self) -> Option<Squeeze> {
        match self.squeezing {
            Squeezing::Photons(s) => Some(Squeeze {
                r: s.sqrt().asinh(),
                theta: self.squeeze_theta,
            }),
            Squeezing::Infinite => None,
        }
    }

    /// `ln|Cₙ|` and `arg Cₙ` of the input state; `None` for exact zeros.
    fn input_term(&self, n: usize) -> Option<(f64, f64)> {
        match self.squeeze() {
            Some(sq) => squeezed_vacuum_log_term(n, sq),
            None if n % 2 == 0 => {
                let lim = InfiniteSqueezeLimit::new(self.squeeze_theta);
                Some((lim.log_magnitude(n / 2), lim.phase(n / 2)))
            }
            None => None,
        }
    }

    /// Unnormalized `(ln|c_j|, arg c_j)` of output level `j`.
    fn output_term(&self, j: usize, ln_cos: f64) -> Option<(f64, f64)> {
        let n = j + self.k;
        let (lm, ph) = self.input_term(n)?;
        Some((lm + 0.5 * ln_falling(n, self.k) + j as f64 * ln_cos, ph))
    }
}

/// Normalized kitten state with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct KittenState {
    pub spec: KittenSpec,
    pub state: FockState,
    /// Probability of the count; `None` in the infinite-squeezing limit.
    pub probability: Option<f64>,
    pub mean_photons: f64,
    /// Normalized mass the untruncated state carries above the cutoff.
    pub tail_mass: f64,
}

/// Build the kitten state directly from the coefficient formula.
pub fn kitten_direct(spec: &KittenSpec) -> Result<KittenState> {
    spec.validate()?;
    if spec.squeezing == Squeezing::Infinite && spec.k == 0 {
        return Err(Error::NonNormalizable);
    }
    let ln_cos = spec.theta_sub.cos().ln();
    let cutoff = spec.cutoff;

    let mut logs = vec![f64::NEG_INFINITY; cutoff + 1];
    let mut phases = vec![0.0; cutoff + 1];
    for j in 0..=cutoff {
        if let Some((lm, ph)) = spec.output_term(j, ln_cos) {
            logs[j] = lm;
            phases[j] = ph;
        }
    }

    // Continue the series past the cutoff until it is negligible, both to
    // normalize against the full state and to measure the truncated tail.
    let mut tail = Vec::new();
    let mut j = cutoff + 1;
    let mut head_max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let limit = cutoff.saturating_mul(20).saturating_add(20_000);
    let mut last = f64::INFINITY;
    while j <= limit {
        if let Some((lm, _)) = spec.output_term(j, ln_cos) {
            tail.push(2.0 * lm);
            head_max = head_max.max(lm);
            if lm < head_max - 60.0 && lm < last {
                break;
            }
            last = lm;
        } else {
            tail.push(f64::NEG_INFINITY);
        }
        j += 1;
    }
    if head_max == f64::NEG_INFINITY {
        return Err(Error::ZeroVector);
    }

    let ln_head = log_sum_exp(logs.iter().map(|l| 2.0 * l));
    let ln_tail = log_sum_exp(tail.iter().copied());
    let ln_total = log_sum_exp([ln_head, ln_tail]);
    let tail_mass = (ln_tail - ln_total).exp();
    if tail_mass > KITTEN_TAIL_LIMIT {
        let suggestion = suggest_cutoff(&logs, &tail, ln_total, cutoff);
        return Err(Error::Leakage {
            leakage: tail_mass,
            threshold: KITTEN_TAIL_LIMIT,
            suggestion,
        });
    }

    let amps: Vec<Complex64> = logs
        .iter()
        .zip(&phases)
        .map(|(&l, &ph)| {
            if l == f64::NEG_INFINITY {
                Complex64::new(0.0, 0.0)
            } else {
                (l - 0.5 * ln_head).exp() * cis(ph)
            }
        })
        .collect();
    let state = FockState::from_parts(ModeLayout::single(cutoff), amps, tail_mass);
    let mean_photons = state.mean_photons(0)?;
    let probability = match spec.squeezing {
        Squeezing::Photons(_) => Some(kitten_probability(spec)?),
        Squeezing::Infinite => None,
    };
    Ok(KittenState {
        spec: *spec,
        state,
        probability,
        mean_photons,
        tail_mass,
    })
}

fn suggest_cutoff(head: &[f64], tail: &[f64], ln_total: f64, cutoff: usize) -> Option<usize> {
    let all: Vec<f64> = head
        .iter()
        .map(|l| 2.0 * l)
        .chain(tail.iter().copied())
        .collect();
    let mut remaining = 1.0f64;
    for (j, l) in all.iter().enumerate() {
        remaining -= (l - ln_total).exp();
        if j >= cutoff && remaining <= KITTEN_TAIL_LIMIT * 0.5 {
            return Some(j + 2);
        }
    }
    None
}

/// Probability of counting `k` photons in the tapped arm:
/// `P(k) = Σₙ |Cₙ|² C(n,k) cos^{2(n−k)}θ sin^{2k}θ`, summed to convergence.
pub fn kitten_probability(spec: &KittenSpec) -> Result<f64> {
    spec.validate()?;
    let sq = spec.squeeze().ok_or_else(|| {
        Error::InvalidArgument("count probabilities are undefined for infinite squeezing".into())
    })?;
    if sq.r == 0.0 {
        return Ok(if spec.k == 0 { 1.0 } else { 0.0 });
    }
    let (s, c) = spec.theta_sub.sin_cos();
    let (ln_s, ln_c) = (s.ln(), c.ln());
    let k = spec.k;
    let mut terms = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut last = f64::INFINITY;
    let mut n = k + (k % 2);
    loop {
        let (lm, _) = squeezed_vacuum_log_term(n, sq).expect("even level");
        let t = 2.0 * lm + ln_binomial(n, k) + 2.0 * (n - k) as f64 * ln_c + 2.0 * k as f64 * ln_s;
        terms.push(t);
        best = best.max(t);
        if (t < best - 80.0 && t < last) || n > 10_000_000 {
            break;
        }
        last = t;
        n += 2;
    }
    Ok(log_sum_exp(terms).exp())
}

/// Reference pipeline: squeezed vacuum and vacuum at `cutoff`, beamsplitter
/// at `θ_sub`, count `k` in the second mode. Only practical for modest cutoffs.
pub fn kitten_two_mode(spec: &KittenSpec) -> Result<KittenState> {
    spec.validate()?;
    let sq = spec.squeeze().ok_or_else(|| {
        Error::InvalidArgument("the two-mode pipeline needs finite squeezing".into())
    })?;
    let input = squeezed_vacuum(sq, spec.cutoff)?;
    let two = tensor(&input, &FockState::vacuum(ModeLayout::single(spec.cutoff)))?;
    let split = beamsplit(&two, 0, 1, spec.theta_sub)?;
    let out = measure_count(&split, 1, spec.k)?;
    let mean_photons = out.post_state.mean_photons(0)?;
    Ok(KittenState {
        spec: *spec,
        tail_mass: out.post_state.leakage(),
        state: out.post_state,
        probability: Some(out.probability),
        mean_photons,
    })
}

/// Approximate location of the photon-number peak, `−k / (2 ln cos θ_sub)`.
/// Returns `+∞` as `θ_sub → 0`.
pub fn peak_estimate(k: usize, theta_sub: f64) -> Result<f64> {
    if !(theta_sub >= 0.0 && theta_sub < FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!(
            "theta_sub = {theta_sub} outside [0, π/2)"
        )));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let l = theta_sub.cos().ln();
    if l == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(k as f64) / (2.0 * l))
}

/// `√peak_estimate`, the expected displacement magnitude of the kitten.
pub fn displacement_estimate(k: usize, theta_sub: f64) -> Result<f64> {
    Ok(peak_estimate(k, theta_sub)?.sqrt())
}
