//! First and second quadrature moments of Gaussian states, propagated through
//! the same elements the Fock-space circuits provide.
//!
//! Quadratures are `X = â + â†`, `P = −i(â − â†)`, ordered
//! `(X₀, P₀, X₁, P₁, …)`; the vacuum covariance is the identity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuits::{beamsplit, displace, phase_shift, squeeze_op};
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::states::Squeeze;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoments {
    modes: usize,
    mean: Vec<f64>,
    /// Row-major `2M × 2M`.
    cov: Vec<f64>,
}

impl GaussianMoments {
    pub fn vacuum(modes: usize) -> Self {
        let d = 2 * modes;
        let mut cov = vec![0.0; d * d];
        for i in 0..d {
            cov[i * d + i] = 1.0;
        }
        Self {
            modes,
            mean: vec![0.0; d],
            cov,
        }
    }

    pub fn new(mean: Vec<f64>, cov: Vec<f64>) -> Result<Self> {
        if mean.len() % 2 != 0 || cov.len() != mean.len() * mean.len() {
            return Err(Error::InvalidArgument(format!(
                "moments need a 2M mean and a 2M×2M covariance, got {} and {}",
                mean.len(),
                cov.len()
            )));
        }
        let m = Self {
            modes: mean.len() / 2,
            mean,
            cov,
        };
        let d = m.dim();
        for i in 0..d {
            for j in 0..i {
                if (m.cov(i, j) - m.cov(j, i)).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "covariance not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.dim() + j]
    }

    /// `(⟨X⟩, ⟨P⟩)` of `mode`.
    pub fn mean_quadrature(&self, mode: usize) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        Ok((self.mean[2 * mode], self.mean[2 * mode + 1]))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::InvalidMode {
                mode,
                modes: self.modes,
            });
        }
        Ok(())
    }

    /// Whether `cov + iΩ ⪰ 0`, tested by a Cholesky factorization of the
    /// Hermitian matrix with a small diagonal allowance for pure states,
    /// whose matrix is singular.
    pub fn is_physical(&self) -> bool {
        let d = self.dim();
        let scale = self.cov.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let eps = 1e-9 * scale;
        let mut h: Vec<Complex64> = (0..d * d)
            .map(|ij| {
                let (i, j) = (ij / d, ij % d);
                let omega = if i / 2 == j / 2 && i != j {
                    if i % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                };
                Complex64::new(self.cov[ij] + if i == j { eps } else { 0.0 }, omega)
            })
            .collect();
        for j in 0..d {
            let mut pivot = h[j * d + j].re;
            for k in 0..j {
                pivot -= h[j * d + k].norm_sqr();
            }
            if !(pivot > 0.0) {
                return false;
            }
            let l = pivot.sqrt();
            h[j * d + j] = Complex64::new(l, 0.0);
            for i in j + 1..d {
                let mut v = h[i * d + j];
                for k in 0..j {
                    v -= h[i * d + k] * h[j * d + k].conj();
                }
                h[i * d + j] = v / l;
            }
        }
        true
    }

    /// Largest eigenvalue of the `2 × 2` covariance block of `mode`.
    pub fn mode_variance_max(&self, mode: usize) -> f64 {
        let (i, j) = (2 * mode, 2 * mode + 1);
        let (a, b, d) = (self.cov(i, i), self.cov(i, j), self.cov(j, j));
        0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt()
    }

    fn ensure_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "covariance violates the uncertainty relation".into(),
            ))
        }
    }

    /// `mean → S·mean`, `cov → S·cov·Sᵀ` for a symplectic `S` acting
    /// on the listed quadrature indices only.
    fn transform(&self, indices: &[usize], s: &[f64]) -> Self {
        let d = self.dim();
        let k = indices.len();
        let mut out = self.clone();
        for (a, &i) in indices.iter().enumerate() {
            out.mean[i] = (0..k).map(|b| s[a * k + b] * self.mean[indices[b]]).sum();
        }
        // rows: S·cov restricted to the touched rows
        let mut rows = vec![0.0; k * d];
        for a in 0..k {
            for j in 0..d {
                rows[a * d + j] = (0..k)
                    .map(|b| s[a * k + b] * self.cov[indices[b] * d + j])
                    .sum();
            }
        }
        for a in 0..k {
            for j in 0..d {
                out.cov[indices[a] * d + j] = rows[a * d + j];
            }
        }
        // columns: (S·cov)·Sᵀ
        let snapshot = out.cov.clone();
        for i in 0..d {
            for a in 0..k {
                out.cov[i * d + indices[a]] = (0..k)
                    .map(|b| snapshot[i * d + indices[b]] * s[a * k + b])
                    .sum();
            }
        }
        out
    }
}

/// One Gaussian circuit element, in the conventions of [`crate::circuits`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianElement {
    Displace {
        mode: usize,
        alpha: Complex64,
    },
    Squeeze {
        mode: usize,
        squeeze: Squeeze,
    },
    Phase {
        mode: usize,
        phi: f64,
    },
    Beamsplit {
        mode_a: usize,
        mode_b: usize,
        theta: f64,
    },
}

impl GaussianElement {
    /// The same element applied to a Fock-space state.
    pub fn apply_fock(&self, state: &FockState) -> Result<FockState> {
        match *self {
            Self::Displace { mode, alpha } => displace(state, mode, alpha),
            Self::Squeeze { mode, squeeze } => squeeze_op(state, mode, squeeze),
            Self::Phase { mode, phi } => phase_shift(state, mode, phi),
            Self::Beamsplit {
                mode_a,
                mode_b,
                theta,
            } => beamsplit(state, mode_a, mode_b, theta),
        }
    }
}

pub fn gaussian_propagate(
    moments: &GaussianMoments,
    element: &GaussianElement,
) -> Result<GaussianMoments> {
    match *element {
        GaussianElement::Displace { mode, alpha } => {
            moments.check_mode(mode)?;
            let mut out = moments.clone();
            out.mean[2 * mode] += 2.0 * alpha.re;
            out.mean[2 * mode + 1] += 2.0 * alpha.im;
            Ok(out)
        }
        GaussianElement::Phase { mode, phi } => {
            moments.check_mode(mode)?;
            let (s, c) = phi.sin_cos();
            Ok(moments.transform(&[2 * mode, 2 * mode + 1], &[c, -s, s, c]))
        }
        GaussianElement::Squeeze { mode, squeeze } => {
            moments.check_mode(mode)?;
            let (ch, sh) = (squeeze.r.cosh(), squeeze.r.sinh());
            let (st, ct) = squeeze.theta.sin_cos();
            let m = [ch - sh * ct, -sh * st, -sh * st, ch + sh * ct];
            Ok(moments.transform(&[2 * mode, 2 * mode + 1], &m))
        }
        GaussianElement::Beamsplit {
            mode_a,
            mode_b,
            theta,
        } => {
            moments.check_mode(mode_a)?;
            moments.check_mode(mode_b)?;
            if mode_a == mode_b {
                return Err(Error::InvalidArgument(
                    "beamsplitter needs two distinct modes".into(),
                ));
            }
            let (s, c) = theta.sin_cos();
            // (xa, pa, xb, pb)
            #[rustfmt::skip]
            let m = [
                c, 0.0, 0.0, -s,
                0.0, c, s, 0.0,
                0.0, -s, c, 0.0,
                s, 0.0, 0.0, c,
            ];
            Ok(moments.transform(
                &[2 * mode_a, 2 * mode_a + 1, 2 * mode_b, 2 * mode_b + 1],
                &m,
            ))
        }
    }
}

/// `⟨n̂⟩ = (X̄² + P̄² + V_XX + V_PP − 2) / 4`.
pub fn mean_photons_from_moments(moments: &GaussianMoments, mode: usize) -> Result<f64> {
    moments.check_mode(mode)?;
    moments.ensure_physical()?;
    let (x, p) = (moments.mean[2 * mode], moments.mean[2 * mode + 1]);
    let (i, j) = (2 * mode, 2 * mode + 1);
    Ok((x * x + p * p + moments.cov(i, i) + moments.cov(j, j) - 2.0) / 4.0)
}

/// A Gaussian circuit on `modes` modes starting from vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCircuit {
    pub modes: usize,
    pub elements: Vec<GaussianElement>,
}

impl GaussianCircuit {
    pub fn moments(&self) -> Result<GaussianMoments> {
        self.elements
            .iter()
            .try_fold(GaussianMoments::vacuum(self.modes), |m, e| {
                gaussian_propagate(&m, e)
            })
    }
}

/// Bounds for [`enumerate_circuits`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumeratorBounds {
    pub max_modes: usize,
    pub max_elements: usize,
    pub max_r: f64,
    pub max_alpha: f64,
    /// Elements that would push any mode's `⟨n̂⟩` above this are redrawn, so
    /// the Fock comparison stays well inside its cutoff.
    pub max_mode_photons: f64,
    /// Same, for the largest eigenvalue of any mode's reduced covariance.
    /// Squeezed tails decay only like `tanh^n r`, so accumulated squeezing
    /// reaches the cutoff long before the mean photon number does.
    pub max_mode_variance: f64,
}

impl Default for EnumeratorBounds {
    fn default() -> Self {
        Self {
            max_modes: 3,
            max_elements: 6,
            max_r: 0.5,
            max_alpha: 2.0,
            max_mode_photons: 6.0,
            max_mode_variance: 1.2f64.exp(),
        }
    }
}

/// Deterministic sequence of `count` circuits from `seed`. The first circuit
/// is always empty.
pub fn enumerate_circuits(
    seed: u64,
    count: usize,
    bounds: &EnumeratorBounds,
) -> Vec<GaussianCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for id in 0..count {
        let modes = rng.random_range(1..=bounds.max_modes.max(1));
        if id == 0 {
            out.push(GaussianCircuit {
                modes,
                elements: Vec::new(),
            });
            continue;
        }
        let len = rng.random_range(1..=bounds.max_elements.max(1));
        let mut elements = Vec::with_capacity(len);
        let mut moments = GaussianMoments::vacuum(modes);
        let mut attempts = 0;
        while elements.len() < len && attempts < 100 * len {
            attempts += 1;
            let e = random_element(&mut rng, modes, bounds);
            let Ok(next) = gaussian_propagate(&moments, &e) else {
                continue;
            };
            let within = (0..modes).all(|m| {
                mean_photons_from_moments(&next, m)
                    .map(|n| n <= bounds.max_mode_photons)
                    .unwrap_or(false)
                    && next.mode_variance_max(m) <= bounds.max_mode_variance
            });
            if within {
                elements.push(e);
                moments = next;
            }
        }
        out.push(GaussianCircuit { modes, elements });
    }
    out
}

fn random_element(
    rng: &mut ChaCha8Rng,
    modes: usize,
    bounds: &EnumeratorBounds,
) -> GaussianElement {
    let tau = std::f64::consts::TAU;
    let mode = rng.random_range(0..modes);
    let kinds = if modes > 1 { 4 } else { 3 };
    match rng.random_range(0..kinds) {
        0 => {
            let alpha = Complex64::from_polar(
                bounds.max_alpha * rng.random::<f64>(),
                tau * rng.random::<f64>(),
            );
            GaussianElement::Displace { mode, alpha }
        }
        1 => {
            let squeeze = Squeeze {
                r: bounds.max_r * rng.random::<f64>(),
                theta: tau * rng.random::<f64>(),
            };
            GaussianElement::Squeeze { mode, squeeze }
        }
        2 => GaussianElement::Phase {
            mode,
            phi: tau * rng.random::<f64>(),
        },
        _ => {
            let other = (mode + rng.random_range(1..modes)) % modes;
            GaussianElement::Beamsplit {
                mode_a: mode,
                mode_b: other,
                theta: tau * rng.random::<f64>(),
            }
        }
    }
}

/// Largest deviations between moment propagation and Fock simulation of one
/// circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub max_photon_error: f64,
    pub max_quadrature_error: f64,
    pub leakage: f64,
}

pub fn compare_with_fock(circuit: &GaussianCircuit, cutoff: usize) -> Result<OracleComparison> {
    let moments = circuit.moments()?;
    let layout = crate::fock::ModeLayout::uniform(circuit.modes, cutoff)?;
    let mut state = FockState::vacuum(layout);
    for e in &circuit.elements {
        state = e.apply_fock(&state)?;
    }
    let mut out = OracleComparison {
        max_photon_error: 0.0,
        max_quadrature_error: 0.0,
        leakage: state.truncation_diagnostic(),
    };
    for m in 0..circuit.modes {
        let n = mean_photons_from_moments(&moments, m)?;
        out.max_photon_error = out.max_photon_error.max((n - state.mean_photons(m)?).abs());
        let (gx, gp) = moments.mean_quadrature(m)?;
        let (fx, fp) = crate::measurement::mean_quadrature(&state, m)?;
        out.max_quadrature_error = out
            .max_quadrature_error
            .max((gx - fx).abs())
            .max((gp - fp).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_and_displacement() {
        let v = GaussianMoments::vacuum(2);
        assert_eq!(mean_photons_from_moments(&v, 1).unwrap(), 0.0);
        let same = gaussian_propagate(&v, &GaussianElement::Phase { mode: 0, phi: 0.0 }).unwrap();
        assert_eq!(same, v);
        let d = gaussian_propagate(
            &v,
            &GaussianElement::Displace {
                mode: 0,
                alpha: Complex64::new(1.5, 0.0),
            },
        )
        .unwrap();
        assert_eq!(d.mean_quadrature(0).unwrap(), (3.0, 0.0));
        assert_eq!(d.cov, v.cov);
        assert!((mean_photons_from_moments(&d, 0).unwrap() - 2.25).abs() < 1e-15);
    }

    #[test]
    fn squeezed_vacuum_photons() {
        let v = GaussianMoments::vacuum(1);
        let s = gaussian_propagate(
            &v,
            &GaussianElement::Squeeze {
                mode: 0,
                squeeze: Squeeze { r: 0.7, theta: 1.1 },
            },
        )
        .unwrap();
        assert!((mean_photons_from_moments(&s, 0).unwrap() - 0.7f64.sinh().powi(2)).abs() < 1e-12);
        assert!(s.is_physical());
    }

    #[test]
    fn unphysical_moments_are_rejected() {
        let m = GaussianMoments::new(vec![0.0, 0.0], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(!m.is_physical());
        assert!(mean_photons_from_moments(&m, 0).is_err());
        assert!(GaussianMoments::new(vec![0.0, 0.0], vec![1.0, 0.2, 0.1, 1.0]).is_err());
    }

    #[test]
    fn single_elements_match_fock_simulation() {
        let elems = [
            GaussianElement::Displace {
                mode: 0,
                alpha: Complex64::new(0.8, -0.3),
            },
            GaussianElement::Squeeze {
                mode: 1,
                squeeze: Squeeze { r: 0.4, theta: 0.9 },
            },
            GaussianElement::Phase { mode: 0, phi: 1.3 },
            GaussianElement::Beamsplit {
                mode_a: 0,
                mode_b: 1,
                theta: PI / 7.0,
            },
            GaussianElement::Displace {
                mode: 1,
                alpha: Complex64::new(-0.5, 1.0),
            },
            GaussianElement::Beamsplit {
                mode_a: 1,
                mode_b: 0,
                theta: 0.4,
            },
        ];
        for len in 1..=elems.len() {
            let c = GaussianCircuit {
                modes: 2,
                elements: elems[..len].to_vec(),
            };
            let r = compare_with_fock(&c, 40).unwrap();
            assert!(r.max_photon_error < 1e-9, "{len}: {r:?}");
            assert!(r.max_quadrature_error < 1e-9, "{len}: {r:?}");
        }
    }

    #[test]
    fn enumerator_is_deterministic_and_bounded() {
        let b = EnumeratorBounds::default();
        let a = enumerate_circuits(7, 30, &b);
        assert_eq!(a, enumerate_circuits(7, 30, &b));
        assert!(a[0].elements.is_empty());
        for c in &a {
            let m = c.moments().unwrap();
            for mode in 0..c.modes {
                assert!(mean_photons_from_moments(&m, mode).unwrap() <= b.max_mode_photons);
                assert!(m.mode_variance_max(mode) <= b.max_mode_variance);
            }
        }
    }

    proptest! {
        #[test]
        fn propagation_preserves_physicality(r in 0.0f64..1.0, th in 0.0f64..6.3, bs in 0.0f64..6.3, ph in 0.0f64..6.3) {
            let mut m = GaussianMoments::vacuum(2);
            for e in [
                GaussianElement::Squeeze { mode: 0, squeeze: Squeeze { r, theta: th } },
                GaussianElement::Beamsplit { mode_a: 0, mode_b: 1, theta: bs },
                GaussianElement::Phase { mode: 1, phi: ph },
            ] {
                m = gaussian_propagate(&m, &e).unwrap();
            }
            prop_assert!(m.is_physical());
            let total = mean_photons_from_moments(&m, 0).unwrap() + mean_photons_from_moments(&m, 1).unwrap();
            prop_assert!((total - r.sinh().powi(2)).abs() < 1e-10);
        }
    }
}
