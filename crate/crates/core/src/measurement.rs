//! Photon-number statistics, post-selected counting, quadrature means and the
//! two differential bit decodings.

use num_complex::Complex64;

use crate::circuits::{interference_gadget, GadgetSpec};
use crate::error::{Error, Result};
use crate::fock::{tensor, FockState, ModeLayout};

/// Absolute band inside which two expectation values count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Joint photon-number distribution over a subset of modes, row-major in the
/// order the modes were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub modes: Vec<usize>,
    pub cutoffs: Vec<usize>,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    pub fn get(&self, counts: &[usize]) -> f64 {
        let mut idx = 0;
        for (n, c) in counts.iter().zip(&self.cutoffs) {
            if n > c {
                return 0.0;
            }
            idx = idx * (c + 1) + n;
        }
        self.probs[idx]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Iterate `(counts, probability)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let layout = ModeLayout::new(self.cutoffs.clone()).expect("distribution layout");
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (layout.occupation(i), *p))
    }
}

pub fn joint_number_distribution(state: &FockState, modes: &[usize]) -> Result<JointDistribution> {
    let layout = state.layout();
    for &m in modes {
        layout.check_mode(m)?;
    }
    let cutoffs: Vec<usize> = modes.iter().map(|&m| layout.cutoff(m)).collect();
    let sub = ModeLayout::new(cutoffs.clone())?;
    let mut probs = vec![0.0; sub.dim()];
    for (i, c) in state.amplitudes().iter().enumerate() {
        let p = c.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let idx = modes.iter().zip(&cutoffs).fold(0, |acc, (&m, &cut)| {
            acc * (cut + 1) + layout.occupation_of(i, m)
        });
        probs[idx] += p;
    }
    Ok(JointDistribution {
        modes: modes.to_vec(),
        cutoffs,
        probs,
    })
}

/// Result of counting photons in one mode and keeping the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtractionOutcome {
    pub k: usize,
    pub probability: f64,
    /// Normalized conditional state of the remaining modes.
    pub post_state: FockState,
}

/// Project `mode` onto `|k⟩`, remove it from the layout and renormalize.
pub fn measure_count(state: &FockState, mode: usize, k: usize) -> Result<SubtractionOutcome> {
    let layout = state.layout();
    layout.check_mode(mode)?;
    if k > layout.cutoff(mode) {
        let mut occ = vec![0; layout.modes()];
        occ[mode] = k;
        return Err(Error::OccupationOutOfRange {
            occupation: occ,
            cutoffs: layout.cutoffs().to_vec(),
        });
    }
    let rest = layout.without_mode(mode)?;
    let stride = layout.stride(mode);
    let amps: Vec<Complex64> = layout
        .fiber_bases(mode)
        .map(|b| state.amplitudes()[b + k * stride])
        .collect();
    let probability: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    if !(probability >= 1e-300) {
        return Err(Error::ImpossibleOutcome(probability));
    }
    let s = probability.sqrt().recip();
    let post_state = FockState::from_parts(
        rest,
        amps.into_iter().map(|c| c * s).collect(),
        state.leakage() / probability,
    );
    Ok(SubtractionOutcome {
        k,
        probability,
        post_state,
    })
}

/// `(⟨X⟩, ⟨P⟩)` with `X = â + â†`, `P = −i(â − â†)`.
pub fn mean_quadrature(state: &FockState, mode: usize) -> Result<(f64, f64)> {
    let a = state.mean_annihilation(mode)?;
    Ok((2.0 * a.re, 2.0 * a.im))
}

/// A decoded differential bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDecode {
    Zero,
    One,
    Undefined,
}

impl BitDecode {
    fn compare(v0: f64, v1: f64) -> Self {
        if (v0 - v1).abs() <= TIE_TOLERANCE {
            BitDecode::Undefined
        } else if v0 > v1 {
            BitDecode::Zero
        } else {
            BitDecode::One
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BitDecode::Zero => "0",
            BitDecode::One => "1",
            BitDecode::Undefined => "undefined",
        }
    }
}

/// Photon-number decoding: expectation-level bit plus per-shot probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipneDecode {
    pub value: BitDecode,
    /// `P(n₀ > n₁)`
    pub p_zero: f64,
    /// `P(n₁ > n₀)`
    pub p_one: f64,
    /// `P(n₀ = n₁)`
    pub p_undefined: f64,
}

pub fn decode_dipne(state: &FockState, mode0: usize, mode1: usize) -> Result<DipneDecode> {
    let n0 = state.mean_photons(mode0)?;
    let n1 = state.mean_photons(mode1)?;
    let joint = joint_number_distribution(state, &[mode0, mode1])?;
    let total = joint.total();
    let (mut p0, mut p1, mut pu) = (0.0, 0.0, 0.0);
    for (counts, p) in joint.iter() {
        match counts[0].cmp(&counts[1]) {
            std::cmp::Ordering::Greater => p0 += p,
            std::cmp::Ordering::Less => p1 += p,
            std::cmp::Ordering::Equal => pu += p,
        }
    }
    Ok(DipneDecode {
        value: BitDecode::compare(n0, n1),
        p_zero: p0 / total,
        p_one: p1 / total,
        p_undefined: pu / total,
    })
}

/// Displacement decoding on the `X` quadrature means.
pub fn decode_dide(state: &FockState, mode0: usize, mode1: usize) -> Result<BitDecode> {
    let (x0, _) = mean_quadrature(state, mode0)?;
    let (x1, _) = mean_quadrature(state, mode1)?;
    Ok(BitDecode::compare(x0, x1))
}

/// `|⟨n̂₀⟩ − ⟨n̂₁⟩| / √(Var n₀ + Var n₁)`; `+∞` when both variances vanish.
pub fn distinguishability(state: &FockState, mode0: usize, mode1: usize) -> Result<f64> {
    let diff = (state.mean_photons(mode0)? - state.mean_photons(mode1)?).abs();
    let var = state.number_variance(mode0)? + state.number_variance(mode1)?;
    if var <= 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(diff / var.sqrt())
}

/// Interference contribution to the light lost through a gadget's erasure
/// modes, with the recorded truncation leakage of the three runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceLoss {
    pub value: f64,
    pub both: f64,
    pub only0: f64,
    pub only1: f64,
    pub leakage: f64,
}

fn erasure_photons(
    psi0: &FockState,
    psi1: &FockState,
    spec: &GadgetSpec,
    cutoff: usize,
) -> Result<(f64, f64)> {
    let sys = tensor(psi0, psi1)?;
    let full = tensor(&sys, &FockState::vacuum(ModeLayout::uniform(2, cutoff)?))?;
    let out = interference_gadget(&full, spec)?;
    let n = out.mean_photons(spec.erasure_modes[0])? + out.mean_photons(spec.erasure_modes[1])?;
    Ok((n, out.truncation_diagnostic()))
}

/// `L_intf = n_e(ψ₀⊗ψ₁) − n_e(ψ₀⊗0) − n_e(0⊗ψ₁)`, where `n_e` sums the mean
/// photons leaving through both erasure modes. Each erasure mode gets the
/// larger of the two input cutoffs.
pub fn l_intf_detailed(
    input0: &FockState,
    input1: &FockState,
    spec: &GadgetSpec,
) -> Result<InterferenceLoss> {
    for s in [input0, input1] {
        if s.layout().modes() != 1 {
            return Err(Error::InvalidArgument(
                "gadget inputs must be single-mode states".into(),
            ));
        }
    }
    let mut spec = spec.clone();
    spec.system_modes = [0, 1];
    spec.erasure_modes = [2, 3];
    spec.validate()?;
    let cutoff = input0.layout().cutoff(0).max(input1.layout().cutoff(0));
    let vac0 = FockState::vacuum(input0.layout().clone());
    let vac1 = FockState::vacuum(input1.layout().clone());
    let (both, l_b) = erasure_photons(input0, input1, &spec, cutoff)?;
    let (only0, l_0) = erasure_photons(input0, &vac1, &spec, cutoff)?;
    let (only1, l_1) = erasure_photons(&vac0, input1, &spec, cutoff)?;
    Ok(InterferenceLoss {
        value: both - only0 - only1,
        both,
        only0,
        only1,
        leakage: l_b.max(l_0).max(l_1),
    })
}

pub fn l_intf(input0: &FockState, input1: &FockState, spec: &GadgetSpec) -> Result<f64> {
    Ok(l_intf_detailed(input0, input1, spec)?.value)
}
