//! Fit single-mode states against squeezed cats
//! `(D(α) + e^{iφ}D(−α))S(ξ)|0⟩` at a fixed photon budget.
//!
//! The search coordinate is the squeezing fraction `s ∈ [0, 1]`. The
//! displacement axis is read off the target (the phase of `√⟨â²⟩`), and the
//! squeezing is oriented to stretch the state along that axis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{inner, FockState};
use crate::kitten::KittenState;
use crate::optimize::grid_then_golden;
use crate::states::{cat_state, CatSpec, Squeeze};

/// How the photon budget `N` is split between displacement and squeezing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhotonAccounting {
    /// Per superposed component: `|α|² = (1−s)N`, `sinh²r = sN`.
    #[default]
    Component,
    /// `sinh²r = sN` and `|α|` chosen so the normalized superposition itself
    /// has `⟨n̂⟩ = N`.
    State,
}

impl PhotonAccounting {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "component" => Ok(Self::Component),
            "state" => Ok(Self::State),
            other => Err(Error::InvalidArgument(format!(
                "unknown photon accounting '{other}' (expected component or state)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Component => "component",
            Self::State => "state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub accounting: PhotonAccounting,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            accounting: PhotonAccounting::Component,
            grid_points: 64,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatFitResult {
    pub fidelity: f64,
    pub infidelity: f64,
    /// Photons attributed to squeezing over the total budget.
    pub squeeze_fraction: f64,
    /// Displacement magnitude `|α|` of the best candidate.
    pub alpha: f64,
    pub r: f64,
    pub phi: f64,
    /// Fidelity of the `s = 0` member of the family.
    pub plain_cat_fidelity: f64,
    /// Phase of the displacement axis.
    pub axis: f64,
    /// Phase of the candidate squeezing parameter.
    pub squeeze_theta: f64,
    /// Photon budget `N` (the target's `⟨n̂⟩`).
    pub mean_photons: f64,
}

/// Fit geometry shared by every candidate of one target.
#[derive(Debug, Clone, Copy)]
struct Frame {
    n: f64,
    axis: f64,
    phi: f64,
    cutoff: usize,
    accounting: PhotonAccounting,
}

/// A fully specified candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub spec: CatSpec,
    pub alpha: f64,
}

/// Phase of the displacement axis of `state`, from `arg √⟨â²⟩`; real axis when
/// `⟨â²⟩` vanishes.
pub fn displacement_axis(state: &FockState) -> Result<f64> {
    let a2 = state.mean_annihilation_sq(0)?;
    Ok(if a2.norm() < 1e-12 {
        0.0
    } else {
        0.5 * a2.arg()
    })
}

impl Frame {
    fn of(state: &FockState, phi: f64, accounting: PhotonAccounting) -> Result<Self> {
        if state.layout().modes() != 1 {
            return Err(Error::InvalidArgument(
                "cat fits take single-mode states".into(),
            ));
        }
        state.ensure_normalized()?;
        let n = state.mean_photons(0)?;
        if !(n > 1e-12) {
            return Err(Error::InvalidArgument(
                "cannot fit a state with zero mean photon number".into(),
            ));
        }
        Ok(Self {
            n,
            axis: displacement_axis(state)?,
            phi,
            cutoff: state.layout().cutoff(0),
            accounting,
        })
    }

    fn squeeze_theta(&self) -> f64 {
        (2.0 * self.axis - PI).rem_euclid(2.0 * PI)
    }

    fn spec(&self, alpha: f64, r: f64) -> CatSpec {
        CatSpec {
            alpha: Complex64::from_polar(alpha, self.axis),
            phi: self.phi,
            squeeze: Squeeze {
                r,
                theta: self.squeeze_theta(),
            },
        }
    }

    fn candidate(&self, s: f64) -> Result<Option<Candidate>> {
        let s = s.clamp(0.0, 1.0);
        let r = (s * self.n).sqrt().asinh();
        match self.accounting {
            PhotonAccounting::Component => {
                let alpha = ((1.0 - s) * self.n).sqrt();
                Ok(Some(Candidate {
                    spec: self.spec(alpha, r),
                    alpha,
                }))
            }
            PhotonAccounting::State => self.solve_alpha(r),
        }
    }

    /// `⟨n̂⟩` of the normalized candidate with displacement `alpha`.
    fn photons(&self, alpha: f64, r: f64) -> Result<Option<f64>> {
        match cat_state(&self.spec(alpha, r), self.cutoff) {
            Ok(s) => Ok(Some(s.mean_photons(0)?)),
            Err(Error::ZeroVector) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn solve_alpha(&self, r: f64) -> Result<Option<Candidate>> {
        let mut lo = 1e-6;
        match self.photons(lo, r)? {
            Some(n0) if n0 <= self.n => {}
            _ => return Ok(None),
        }
        let mut hi = self.n.sqrt() + 1.0;
        while self.photons(hi, r)?.is_none_or(|n| n < self.n) {
            hi *= 2.0;
            if hi > 1e4 {
                return Ok(None);
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            match self.photons(mid, r)? {
                Some(n) if n < self.n => lo = mid,
                _ => hi = mid,
            }
            if hi - lo < 1e-14 * hi {
                break;
            }
        }
        let alpha = 0.5 * (lo + hi);
        Ok(Some(Candidate {
            spec: self.spec(alpha, r),
            alpha,
        }))
    }

    fn fidelity(&self, target: &FockState, s: f64) -> Result<f64> {
        let Some(c) = self.candidate(s)? else {
            return Ok(0.0);
        };
        match cat_state(&c.spec, self.cutoff) {
            Ok(cand) => Ok(inner(&cand, target)?.norm_sqr().min(1.0)),
            Err(Error::ZeroVector) => Ok(0.0),
            Err(e) => Err(e),
        }
    }
}

/// Candidate for squeezing fraction `s` against `target` (single mode,
/// normalized); `None` when no member of the family meets the budget.
pub fn candidate_for(
    target: &FockState,
    phi: f64,
    s: f64,
    opts: &FitOptions,
) -> Result<Option<Candidate>> {
    Frame::of(target, phi, opts.accounting)?.candidate(s)
}

/// Maximize the fidelity with a squeezed cat of parity phase `phi` over the
/// squeezing fraction.
pub fn fit_squeezed_cat(target: &FockState, phi: f64, opts: &FitOptions) -> Result<CatFitResult> {
    let frame = Frame::of(target, phi, opts.accounting)?;
    let mut failure = None;
    let best = grid_then_golden(
        |s| match frame.fidelity(target, s) {
            Ok(f) => f,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        0.0,
        1.0,
        opts.grid_points,
        opts.tolerance,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let plain = frame.fidelity(target, 0.0)?;
    let cand = frame.candidate(best.x)?;
    let (alpha, r) = cand
        .map(|c| (c.alpha, c.spec.squeeze.r))
        .unwrap_or((0.0, 0.0));
    let fidelity = best.value.max(plain);
    Ok(CatFitResult {
        fidelity,
        infidelity: 1.0 - fidelity,
        squeeze_fraction: best.x,
        alpha,
        r,
        phi,
        plain_cat_fidelity: plain,
        axis: frame.axis,
        squeeze_theta: frame.squeeze_theta(),
        mean_photons: frame.n,
    })
}

/// Fidelity with the unsqueezed cat of the same budget.
pub fn fit_plain_cat(target: &FockState, phi: f64, opts: &FitOptions) -> Result<f64> {
    Frame::of(target, phi, opts.accounting)?.fidelity(target, 0.0)
}

/// Parity phase a `k`-photon kitten can realise: `π` for odd `k`, `0` for even.
pub fn parity_phase(k: usize) -> f64 {
    if k % 2 == 1 {
        PI
    } else {
        0.0
    }
}

pub fn fit_kitten(kitten: &KittenState, opts: &FitOptions) -> Result<CatFitResult> {
    fit_squeezed_cat(&kitten.state, parity_phase(kitten.spec.k), opts)
}

/// Squeezing fraction at the fidelity maximum.
pub fn squeeze_fraction_report(kitten: &KittenState, opts: &FitOptions) -> Result<f64> {
    Ok(fit_kitten(kitten, opts)?.squeeze_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::cis;
    use crate::kitten::{kitten_direct, KittenSpec};
    use crate::states::squeezed_vacuum;

    fn state_opts() -> FitOptions {
        FitOptions {
            accounting: PhotonAccounting::State,
            ..FitOptions::default()
        }
    }

    #[test]
    fn exact_squeezed_cat_fits_itself() {
        // budget split 0.2 : 0.8 at the state level
        let axis = 0.4;
        let spec = CatSpec {
            alpha: Complex64::from_polar(1.6, axis),
            phi: PI,
            squeeze: Squeeze {
                r: 0.35,
                theta: 2.0 * axis - PI,
            },
        };
        let target = cat_state(&spec, 150).unwrap();
        let n = target.mean_photons(0).unwrap();
        let fit = fit_squeezed_cat(&target, PI, &state_opts()).unwrap();
        assert!(fit.infidelity < 1e-9, "{fit:?}");
        let s_true = 0.35f64.sinh().powi(2) / n;
        assert!(
            (fit.squeeze_fraction - s_true).abs() < 1e-4,
            "{} vs {s_true}",
            fit.squeeze_fraction
        );
        assert!((fit.alpha - 1.6).abs() < 1e-3);
        assert!(fit.fidelity >= fit.plain_cat_fidelity - 1e-12);
    }

    #[test]
    fn plain_cat_fits_itself() {
        let spec = CatSpec {
            alpha: Complex64::new(0.0, 1.3),
            phi: 0.0,
            squeeze: Squeeze::NONE,
        };
        let target = cat_state(&spec, 80).unwrap();
        assert!((fit_plain_cat(&target, 0.0, &state_opts()).unwrap() - 1.0).abs() < 1e-9);
        // with large α the component budget coincides with the state budget
        let spec = CatSpec {
            alpha: Complex64::new(4.0, 0.0),
            phi: PI,
            squeeze: Squeeze::NONE,
        };
        let target = cat_state(&spec, 120).unwrap();
        assert!((fit_plain_cat(&target, PI, &FitOptions::default()).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn squeezed_vacuum_fits_at_full_fraction() {
        let target = squeezed_vacuum(Squeeze::new(0.8, 0.0).unwrap(), 120).unwrap();
        let fit = fit_squeezed_cat(&target, 0.0, &FitOptions::default()).unwrap();
        assert!(fit.squeeze_fraction > 1.0 - 1e-6);
        assert!(fit.infidelity < 1e-9);
    }

    #[test]
    fn kitten_fits_are_good_and_phase_invariant() {
        let k = kitten_direct(&KittenSpec::finite(8.0, PI / 5.0, 3, 300)).unwrap();
        let fit = fit_kitten(&k, &FitOptions::default()).unwrap();
        assert!(fit.infidelity < 5e-3, "{fit:?}");
        assert!(fit.squeeze_fraction < 0.05);
        assert!(fit.plain_cat_fidelity < fit.fidelity);
        let rotated = k.state.scaled(cis(1.234));
        let fit2 = fit_squeezed_cat(&rotated, PI, &FitOptions::default()).unwrap();
        assert!((fit2.squeeze_fraction - fit.squeeze_fraction).abs() < 1e-12);
        let again = fit_kitten(&k, &FitOptions::default()).unwrap();
        assert_eq!(again, fit);
    }

    #[test]
    fn state_budget_is_met_by_every_candidate() {
        let k = kitten_direct(&KittenSpec::finite(4.0, PI / 5.0, 1, 200)).unwrap();
        let opts = state_opts();
        for s in [0.0, 0.05, 0.1, 0.2] {
            if let Some(c) = candidate_for(&k.state, PI, s, &opts).unwrap() {
                let n = cat_state(&c.spec, 200).unwrap().mean_photons(0).unwrap();
                assert!((n - k.mean_photons).abs() / k.mean_photons < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_empty_states() {
        let vac = FockState::vacuum(crate::fock::ModeLayout::single(5));
        assert!(fit_squeezed_cat(&vac, 0.0, &FitOptions::default()).is_err());
        assert!(PhotonAccounting::parse("nope").is_err());
    }
}
