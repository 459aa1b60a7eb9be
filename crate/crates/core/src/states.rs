//! Analytic single-mode state constructors.
//!
//! Amplitudes are evaluated from closed forms or stable recurrences, never by
//! exponentiating operators, so cutoffs in the thousands are cheap. The
//! constructors return the raw truncated amplitudes; the mass the untruncated
//! state has above the cutoff is recorded as leakage.

use num_complex::Complex64;

use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};
use crate::fock::{cis, FockState, ModeLayout};

/// Squeezing parameter `ξ = r·e^{iθ}`; `S(ξ) = exp(½ξ*â² − ½ξâ†²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Squeeze {
    pub r: f64,
    pub theta: f64,
}

impl Squeeze {
    pub const NONE: Squeeze = Squeeze { r: 0.0, theta: 0.0 };

    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "squeeze r={r}, theta={theta}"
            )));
        }
        Ok(Self { r, theta })
    }

    /// Squeezing carrying `photons` mean photons on vacuum (`sinh²r = photons`).
    pub fn from_photons(photons: f64, theta: f64) -> Result<Self> {
        if !(photons >= 0.0) || !photons.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "squeezing photons {photons}"
            )));
        }
        Self::new(photons.sqrt().asinh(), theta)
    }

    /// Mean photon number of `S(ξ)|0⟩`.
    pub fn photons(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// `(D(α) + e^{iφ}D(−α)) S(ξ)|0⟩`, normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    pub alpha: Complex64,
    pub phi: f64,
    pub squeeze: Squeeze,
}

fn finish(cutoff: usize, amps: Vec<Complex64>) -> FockState {
    let mass: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    FockState::from_parts(ModeLayout::single(cutoff), amps, (1.0 - mass).max(0.0))
}

/// Coherent state `|α⟩ = e^{−|α|²/2} Σ αⁿ/√n! |n⟩`.
pub fn coherent(alpha: Complex64, cutoff: usize) -> Result<FockState> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidArgument(format!("displacement {alpha}")));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mag = alpha.norm();
    if mag == 0.0 {
        amps[0] = Complex64::new(1.0, 0.0);
        return Ok(finish(cutoff, amps));
    }
    let (ln_mag, arg) = (mag.ln(), alpha.arg());
    for (n, a) in amps.iter_mut().enumerate() {
        let lm = -0.5 * mag * mag + n as f64 * ln_mag - 0.5 * ln_factorial(n);
        *a = Complex64::from_polar(lm.exp(), n as f64 * arg);
    }
    Ok(finish(cutoff, amps))
}

/// Log-magnitude and phase of `S(ξ)|0⟩` at Fock level `2m`, with or without
/// the `(cosh r)^{-1/2}` prefactor.
fn squeezed_even_term(m: usize, squeeze: Squeeze) -> (f64, f64) {
    let t = squeeze.r.tanh();
    let lm = -0.5 * squeeze.r.cosh().ln() + m as f64 * t.ln() + even_limit_log_magnitude(m);
    (lm, even_limit_phase(m, squeeze.theta))
}

fn even_limit_log_magnitude(m: usize) -> f64 {
    0.5 * ln_factorial(2 * m) - m as f64 * std::f64::consts::LN_2 - ln_factorial(m)
}

fn even_limit_phase(m: usize, theta: f64) -> f64 {
    m as f64 * (std::f64::consts::PI + theta)
}

/// Squeezed vacuum `S(ξ)|0⟩`. Odd amplitudes are exactly zero.
pub fn squeezed_vacuum(squeeze: Squeeze, cutoff: usize) -> Result<FockState> {
    Squeeze::new(squeeze.r, squeeze.theta)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    if squeeze.r == 0.0 {
        amps[0] = Complex64::new(1.0, 0.0);
        return Ok(finish(cutoff, amps));
    }
    for m in 0..=cutoff / 2 {
        let (lm, ph) = squeezed_even_term(m, squeeze);
        amps[2 * m] = lm.exp() * cis(ph);
    }
    Ok(finish(cutoff, amps))
}

/// Raw amplitudes of `D(α)S(ξ)|0⟩` for `n = 0..=cutoff`.
///
/// The state is annihilated by `μ(â−α) + ν(â†−α*)` with `μ = cosh r`,
/// `ν = e^{iθ} sinh r`, which gives the three-term recurrence
/// `μ√(n+1) c_{n+1} = γ c_n − ν√n c_{n−1}`, `γ = μα + να*`. Values are carried
/// with a running log scale so large displacements neither overflow nor
/// underflow before the final exponentiation.
fn squeezed_coherent_amplitudes(
    alpha: Complex64,
    squeeze: Squeeze,
    cutoff: usize,
) -> Vec<Complex64> {
    let mu = squeeze.r.cosh();
    let nu = Complex64::from_polar(squeeze.r.sinh(), squeeze.theta);
    let gamma = alpha * mu + nu * alpha.conj();
    let ln_c0 = Complex64::new(-0.5 * mu.ln() - 0.5 * alpha.norm_sqr(), 0.0)
        - 0.5 * alpha.conj() * alpha.conj() * cis(squeeze.theta) * squeeze.r.tanh();

    let mut out = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut scale = 0.0f64;
    let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let emit = |v: Complex64, scale: f64| -> Complex64 {
        if v == Complex64::new(0.0, 0.0) {
            return v;
        }
        let lm = v.norm().ln() + scale + ln_c0.re;
        Complex64::from_polar(lm.exp(), v.arg() + ln_c0.im)
    };
    out[0] = emit(cur, scale);
    for n in 0..cutoff {
        let next = (gamma * cur - nu * (n as f64).sqrt() * prev) / (mu * ((n + 1) as f64).sqrt());
        prev = cur;
        cur = next;
        let big = prev.norm().max(cur.norm());
        if big > 1e100 || (big < 1e-100 && big > 0.0) {
            prev /= big;
            cur /= big;
            scale += big.ln();
        }
        out[n + 1] = emit(cur, scale);
    }
    out
}

/// Squeezed coherent state `D(α)S(ξ)|0⟩`.
pub fn squeezed_coherent(alpha: Complex64, squeeze: Squeeze, cutoff: usize) -> Result<FockState> {
    Squeeze::new(squeeze.r, squeeze.theta)?;
    if squeeze.r == 0.0 {
        return coherent(alpha, cutoff);
    }
    if alpha == Complex64::new(0.0, 0.0) {
        return squeezed_vacuum(squeeze, cutoff);
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidArgument(format!("displacement {alpha}")));
    }
    Ok(finish(
        cutoff,
        squeezed_coherent_amplitudes(alpha, squeeze, cutoff),
    ))
}

/// Normalized cat state `(D(α) + e^{iφ}D(−α))S(ξ)|0⟩ / norm`.
pub fn cat_state(spec: &CatSpec, cutoff: usize) -> Result<FockState> {
    if !spec.phi.is_finite() {
        return Err(Error::InvalidArgument(format!("cat phase {}", spec.phi)));
    }
    let plus = squeezed_coherent(spec.alpha, spec.squeeze, cutoff)?;
    // D(−α)S(ξ)|0⟩ has amplitudes (−1)ⁿ cₙ.
    let w = cis(spec.phi);
    let amps: Vec<Complex64> = plus
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n % 2 == 0 {
                c * (1.0 + w)
            } else {
                c * (1.0 - w)
            }
        })
        .collect();
    let norm_sqr: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    if !(norm_sqr > 1e-300) {
        return Err(Error::ZeroVector);
    }
    let s = norm_sqr.sqrt().recip();
    let leakage = (4.0 * plus.leakage() / norm_sqr).min(1.0);
    Ok(FockState::from_parts(
        ModeLayout::single(cutoff),
        amps.into_iter().map(|c| c * s).collect(),
        leakage,
    ))
}

/// Infinite-squeezing limit of `S(ξ)|0⟩` over even levels, without the
/// vanishing `(cosh r)^{-1/2}` prefactor:
/// `C_{2m} ∝ (−1)^m e^{iθm} √((2m)!) / (2^m m!)`.
///
/// The sequence decays only like `m^{-1/4}`, so it is not square-summable on
/// its own; consumers multiply in a convergent prefactor before normalizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteSqueezeLimit {
    pub theta: f64,
}

impl InfiniteSqueezeLimit {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    /// `ln |C_{2m}|`.
    pub fn log_magnitude(&self, m: usize) -> f64 {
        even_limit_log_magnitude(m)
    }

    /// `arg C_{2m}`.
    pub fn phase(&self, m: usize) -> f64 {
        even_limit_phase(m, self.theta)
    }

    pub fn coefficient(&self, m: usize) -> Complex64 {
        self.log_magnitude(m).exp() * cis(self.phase(m))
    }

    /// `(ln|C_{2m}|, arg C_{2m})` for `m = 0..=max_m`.
    pub fn coeffs(&self, max_m: usize) -> Vec<(f64, f64)> {
        (0..=max_m)
            .map(|m| (self.log_magnitude(m), self.phase(m)))
            .collect()
    }

    /// Always fails: the bare sequence has no finite norm.
    pub fn normalized(&self, _cutoff: usize) -> Result<FockState> {
        Err(Error::NonNormalizable)
    }
}

/// `ln|C_n|` and `arg C_n` of `S(ξ)|0⟩` for even `n`, used by the kitten
/// pipeline; `None` when the amplitude is exactly zero.
pub(crate) fn squeezed_vacuum_log_term(n: usize, squeeze: Squeeze) -> Option<(f64, f64)> {
    if n % 2 == 1 {
        return None;
    }
    if squeeze.r == 0.0 {
        return (n == 0).then_some((0.0, 0.0));
    }
    Some(squeezed_even_term(n / 2, squeeze))
}
