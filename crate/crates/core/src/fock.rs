//! Truncated multimode Fock space: layouts, state vectors and ladder operators.
//!
//! Basis ordering is mixed-radix with the last mode varying fastest, so the
//! amplitude of occupation `(n_0, .., n_{M-1})` lives at
//! `Σ n_j · stride_j` with `stride_{M-1} = 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Mass within the guard band above which a state is reported as leaky.
pub const LEAKAGE_THRESHOLD: f64 = 1e-8;
/// Number of top Fock levels per mode that make up the guard band.
pub const DEFAULT_GUARD_BAND: usize = 2;
/// Tolerance used when an operation requires a normalized input.
pub const NORM_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{ix}`, exact at integer multiples of π/2 so that parity-driven
/// cancellations produce bitwise zeros.
pub fn cis(x: f64) -> Complex64 {
    let q = x / std::f64::consts::FRAC_PI_2;
    let k = q.round();
    if (q - k).abs() <= 1e-12 * k.abs().max(1.0) && k.abs() < 1e15 {
        match (k as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, x)
    }
}

/// Ordered list of modes, each truncated at an inclusive photon-number cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLayout {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl ModeLayout {
    pub fn new(cutoffs: Vec<usize>) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a layout needs at least one mode".into(),
            ));
        }
        let mut strides = vec![0; cutoffs.len()];
        let mut dim = 1usize;
        for (j, &c) in cutoffs.iter().enumerate().rev() {
            strides[j] = dim;
            dim = c
                .checked_add(1)
                .and_then(|d| dim.checked_mul(d))
                .ok_or(Error::DimensionOverflow)?;
        }
        let bytes = dim
            .checked_mul(std::mem::size_of::<Complex64>())
            .ok_or(Error::DimensionOverflow)?;
        if bytes > isize::MAX as usize {
            return Err(Error::DimensionOverflow);
        }
        Ok(Self {
            cutoffs,
            strides,
            dim,
        })
    }

    pub fn single(cutoff: usize) -> Self {
        Self::new(vec![cutoff]).expect("single-mode layouts always fit")
    }

    pub fn uniform(modes: usize, cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff; modes])
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn cutoff(&self, mode: usize) -> usize {
        self.cutoffs[mode]
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    /// Joint dimension `Π (cutoff_i + 1)`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes() {
            Ok(())
        } else {
            Err(Error::InvalidMode {
                mode,
                modes: self.modes(),
            })
        }
    }

    /// Index of an occupation tuple.
    pub fn basis_index(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.modes()
            || occupation.iter().zip(&self.cutoffs).any(|(n, c)| n > c)
        {
            return Err(Error::OccupationOutOfRange {
                occupation: occupation.to_vec(),
                cutoffs: self.cutoffs.clone(),
            });
        }
        Ok(occupation
            .iter()
            .zip(&self.strides)
            .map(|(n, s)| n * s)
            .sum())
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn occupation(&self, index: usize) -> Vec<usize> {
        (0..self.modes())
            .map(|m| self.occupation_of(index, m))
            .collect()
    }

    /// Photon number of `mode` in basis state `index`.
    #[inline]
    pub fn occupation_of(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.cutoffs[mode] + 1)
    }

    /// Layout of `self` followed by `other`.
    pub fn concat(&self, other: &ModeLayout) -> Result<Self> {
        let mut c = self.cutoffs.clone();
        c.extend_from_slice(&other.cutoffs);
        Self::new(c)
    }

    /// Layout with `mode` removed.
    pub fn without_mode(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if self.modes() == 1 {
            return Err(Error::InvalidArgument("cannot remove the only mode".into()));
        }
        let mut c = self.cutoffs.clone();
        c.remove(mode);
        Self::new(c)
    }

    /// Base indices of every fiber along `mode` (indices with `n_mode = 0`).
    pub fn fiber_bases(&self, mode: usize) -> impl Iterator<Item = usize> + '_ {
        let stride = self.strides[mode];
        let block = stride * (self.cutoffs[mode] + 1);
        (0..self.dim / block).flat_map(move |o| (0..stride).map(move |i| o * block + i))
    }

    /// Base indices with zero occupation in both `a` and `b`.
    pub fn pair_bases(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.occupation_of(i, a) == 0 && self.occupation_of(i, b) == 0)
            .collect()
    }
}

/// Complex amplitude vector over a truncated multimode Fock basis.
///
/// `leakage` accumulates the probability mass an operation had to drop because
/// it would have landed above a cutoff (or, for analytic constructors, the
/// mass of the untruncated state that lies beyond the cutoff).
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    layout: ModeLayout,
    amps: Vec<Complex64>,
    leakage: f64,
}

impl FockState {
    pub fn vacuum(layout: ModeLayout) -> Self {
        let mut amps = vec![ZERO; layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self {
            layout,
            amps,
            leakage: 0.0,
        }
    }

    /// Single basis state `|occupation⟩`.
    pub fn basis(layout: ModeLayout, occupation: &[usize]) -> Result<Self> {
        let idx = layout.basis_index(occupation)?;
        let mut amps = vec![ZERO; layout.dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            layout,
            amps,
            leakage: 0.0,
        })
    }

    pub fn from_amplitudes(layout: ModeLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::LayoutMismatch(format!(
                "{} amplitudes for a layout of dimension {}",
                amps.len(),
                layout.dim()
            )));
        }
        Ok(Self {
            layout,
            amps,
            leakage: 0.0,
        })
    }

    pub(crate) fn from_parts(layout: ModeLayout, amps: Vec<Complex64>, leakage: f64) -> Self {
        debug_assert_eq!(amps.len(), layout.dim());
        Self {
            layout,
            amps,
            leakage,
        }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.layout.basis_index(occupation)?])
    }

    /// Accumulated truncation leakage.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn with_leakage(mut self, leakage: f64) -> Self {
        self.leakage = leakage;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        let dev = (self.norm_sqr() - 1.0).abs();
        dev <= NORM_TOLERANCE || dev <= self.leakage + 1e-12
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    /// Rescaled copy with unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let s = 1.0 / n.sqrt();
        Ok(Self {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|c| c * s).collect(),
            leakage: self.leakage,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|c| c * factor).collect(),
            leakage: self.leakage * factor.norm_sqr(),
        }
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &FockState, factor: Complex64) -> Result<Self> {
        self.same_layout(other)?;
        Ok(Self {
            layout: self.layout.clone(),
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + factor * b)
                .collect(),
            leakage: self.leakage + factor.norm_sqr() * other.leakage,
        })
    }

    fn same_layout(&self, other: &FockState) -> Result<()> {
        if self.layout == other.layout {
            Ok(())
        } else {
            Err(Error::LayoutMismatch(format!(
                "{:?} vs {:?}",
                self.layout.cutoffs(),
                other.layout.cutoffs()
            )))
        }
    }

    /// Probability mass with any mode within `g` levels of its cutoff.
    pub fn guard_band_mass(&self, g: usize) -> f64 {
        let layout = &self.layout;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                (0..layout.modes()).any(|m| layout.occupation_of(*i, m) + g > layout.cutoff(m))
            })
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Largest of the recorded leakage and the default guard-band mass.
    pub fn truncation_diagnostic(&self) -> f64 {
        self.leakage.max(self.guard_band_mass(DEFAULT_GUARD_BAND))
    }

    pub fn is_leaky(&self) -> bool {
        self.truncation_diagnostic() > LEAKAGE_THRESHOLD
    }

    /// `â` on `mode`; the result is not renormalized.
    pub fn apply_annihilation(&self, mode: usize) -> Result<Self> {
        self.layout.check_mode(mode)?;
        let stride = self.layout.stride(mode);
        let cutoff = self.layout.cutoff(mode);
        let mut out = vec![ZERO; self.amps.len()];
        for base in self.layout.fiber_bases(mode) {
            for n in 0..cutoff {
                out[base + n * stride] =
                    self.amps[base + (n + 1) * stride] * ((n + 1) as f64).sqrt();
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            amps: out,
            leakage: self.leakage,
        })
    }

    /// `â†` on `mode`; amplitude pushed above the cutoff is dropped and
    /// recorded as leakage.
    pub fn apply_creation(&self, mode: usize) -> Result<Self> {
        self.layout.check_mode(mode)?;
        let stride = self.layout.stride(mode);
        let cutoff = self.layout.cutoff(mode);
        let mut out = vec![ZERO; self.amps.len()];
        let mut dropped = 0.0;
        for base in self.layout.fiber_bases(mode) {
            for n in 1..=cutoff {
                out[base + n * stride] = self.amps[base + (n - 1) * stride] * (n as f64).sqrt();
            }
            dropped += self.amps[base + cutoff * stride].norm_sqr() * (cutoff + 1) as f64;
        }
        Ok(Self {
            layout: self.layout.clone(),
            amps: out,
            leakage: self.leakage + dropped,
        })
    }

    /// Photon-number distribution of a single mode.
    pub fn marginal_number_distribution(&self, mode: usize) -> Result<Vec<f64>> {
        self.layout.check_mode(mode)?;
        let mut p = vec![0.0; self.layout.cutoff(mode) + 1];
        for (i, c) in self.amps.iter().enumerate() {
            p[self.layout.occupation_of(i, mode)] += c.norm_sqr();
        }
        Ok(p)
    }

    /// `⟨n̂_mode⟩`, divided by the squared norm.
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        let p = self.marginal_number_distribution(mode)?;
        let total: f64 = p.iter().sum();
        Ok(p.iter().enumerate().map(|(n, q)| n as f64 * q).sum::<f64>() / total)
    }

    /// Variance of `n̂_mode`.
    pub fn number_variance(&self, mode: usize) -> Result<f64> {
        let p = self.marginal_number_distribution(mode)?;
        let total: f64 = p.iter().sum();
        let m1: f64 = p.iter().enumerate().map(|(n, q)| n as f64 * q).sum::<f64>() / total;
        let m2: f64 = p
            .iter()
            .enumerate()
            .map(|(n, q)| (n * n) as f64 * q)
            .sum::<f64>()
            / total;
        Ok((m2 - m1 * m1).max(0.0))
    }

    /// `⟨â_mode⟩`, divided by the squared norm.
    pub fn mean_annihilation(&self, mode: usize) -> Result<Complex64> {
        let a = self.apply_annihilation(mode)?;
        Ok(inner(self, &a)? / self.norm_sqr())
    }

    /// `⟨â_mode²⟩`, divided by the squared norm.
    pub fn mean_annihilation_sq(&self, mode: usize) -> Result<Complex64> {
        let a2 = self.apply_annihilation(mode)?.apply_annihilation(mode)?;
        Ok(inner(self, &a2)? / self.norm_sqr())
    }
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &FockState, b: &FockState) -> Result<Complex64> {
    a.same_layout(b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    a.ensure_normalized()?;
    b.ensure_normalized()?;
    Ok(inner(a, b)?.norm_sqr().min(1.0))
}

/// `a ⊗ b` with `b`'s modes appended after `a`'s.
pub fn tensor(a: &FockState, b: &FockState) -> Result<FockState> {
    let layout = a.layout.concat(&b.layout)?;
    let mut amps = Vec::with_capacity(layout.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    let leakage = a.leakage * nb + b.leakage * na;
    Ok(FockState {
        layout,
        amps,
        leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_index_examples() {
        let l = ModeLayout::single(3);
        assert_eq!(l.basis_index(&[0]).unwrap(), 0);
        let l = ModeLayout::new(vec![2, 2]).unwrap();
        assert_eq!(l.basis_index(&[2, 2]).unwrap(), 8);
        let l = ModeLayout::new(vec![2, 3]).unwrap();
        let idx = l.basis_index(&[1, 2]).unwrap();
        assert_eq!(l.occupation(idx), vec![1, 2]);
        assert!(matches!(
            l.basis_index(&[3, 0]),
            Err(Error::OccupationOutOfRange { .. })
        ));
    }

    #[test]
    fn round_trip_over_all_twelve_occupations() {
        let l = ModeLayout::new(vec![2, 3]).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for n0 in 0..=2 {
            for n1 in 0..=3 {
                let i = l.basis_index(&[n0, n1]).unwrap();
                assert!(seen.insert(i));
                assert_eq!(l.occupation(i), vec![n0, n1]);
            }
        }
        assert_eq!(seen.len(), 12);
        assert_eq!(*seen.iter().max().unwrap(), 11);
    }

    #[test]
    fn oversized_layout_is_rejected() {
        assert_eq!(
            ModeLayout::uniform(12, 1 << 10).unwrap_err(),
            Error::DimensionOverflow
        );
    }

    #[test]
    fn ladder_examples() {
        let l = ModeLayout::single(4);
        let vac = FockState::vacuum(l.clone());
        assert!(vac.apply_annihilation(0).unwrap().norm_sqr() == 0.0);
        let one = FockState::basis(l.clone(), &[1]).unwrap();
        let a1 = one.apply_annihilation(0).unwrap();
        assert_eq!(a1.amplitudes()[0], c(1.0, 0.0));

        let s = 1.0 / 2f64.sqrt();
        let psi = FockState::from_amplitudes(
            l.clone(),
            vec![c(0., 0.), c(s, 0.), c(s, 0.), c(0., 0.), c(0., 0.)],
        )
        .unwrap();
        let a = psi.apply_annihilation(0).unwrap();
        assert!((a.amplitudes()[0] - c(s, 0.)).norm() < 1e-15);
        assert!((a.amplitudes()[1] - c(2f64.sqrt() * s, 0.)).norm() < 1e-15);

        let ad = vac.apply_creation(0).unwrap();
        assert_eq!(ad.amplitudes()[1], c(1.0, 0.0));
        let top = FockState::basis(l.clone(), &[4]).unwrap();
        let gone = top.apply_creation(0).unwrap();
        assert_eq!(gone.norm_sqr(), 0.0);
        assert!(gone.leakage() > 0.0);
        let two = vac.apply_creation(0).unwrap().apply_creation(0).unwrap();
        assert!((two.amplitudes()[2] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_and_fidelity_examples() {
        let l = ModeLayout::single(3);
        let z = FockState::vacuum(l.clone());
        let one = FockState::basis(l.clone(), &[1]).unwrap();
        assert_eq!(inner(&z, &z).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&z, &one).unwrap(), c(0.0, 0.0));
        assert_eq!(fidelity(&z, &z).unwrap(), 1.0);
        assert_eq!(fidelity(&z, &one).unwrap(), 0.0);
        let other = FockState::vacuum(ModeLayout::single(4));
        assert!(matches!(inner(&z, &other), Err(Error::LayoutMismatch(_))));
        let half = z.scaled(c(0.5, 0.0));
        assert!(matches!(fidelity(&half, &z), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn marginal_of_bell_like_state() {
        let l = ModeLayout::uniform(2, 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let a = FockState::basis(l.clone(), &[0, 1]).unwrap();
        let b = FockState::basis(l.clone(), &[1, 0]).unwrap();
        let psi = a.scaled(c(s, 0.)).add_scaled(&b, c(s, 0.)).unwrap();
        let p = psi.marginal_number_distribution(0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && p[2] == 0.0);
        let v = FockState::vacuum(ModeLayout::single(3))
            .marginal_number_distribution(0)
            .unwrap();
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_examples() {
        let l = ModeLayout::single(2);
        let z = FockState::vacuum(l.clone());
        let zz = tensor(&z, &z).unwrap();
        assert_eq!(zz.amplitude(&[0, 0]).unwrap(), c(1.0, 0.0));
        let s = 1.0 / 2f64.sqrt();
        let plus =
            FockState::from_amplitudes(l.clone(), vec![c(s, 0.), c(s, 0.), c(0., 0.)]).unwrap();
        let one = FockState::basis(l.clone(), &[1]).unwrap();
        let t = tensor(&plus, &one).unwrap();
        assert!((t.amplitude(&[0, 1]).unwrap() - c(s, 0.)).norm() < 1e-15);
        assert!((t.amplitude(&[1, 1]).unwrap() - c(s, 0.)).norm() < 1e-15);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn guard_band_mass_counts_top_levels() {
        let l = ModeLayout::single(5);
        let top = FockState::basis(l.clone(), &[4]).unwrap();
        assert_eq!(top.guard_band_mass(2), 1.0);
        assert_eq!(top.guard_band_mass(1), 0.0);
        assert!(top.is_leaky());
        assert!(!FockState::vacuum(l).is_leaky());
    }

    fn arb_state(max_modes: usize, max_cut: usize) -> impl Strategy<Value = FockState> {
        prop::collection::vec(0..=max_cut, 1..=max_modes).prop_flat_map(|cuts| {
            let layout = ModeLayout::new(cuts).unwrap();
            let dim = layout.dim();
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(move |v| {
                let amps = v.into_iter().map(|(a, b)| c(a, b)).collect();
                FockState::from_amplitudes(layout.clone(), amps).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn basis_index_round_trip(cuts in prop::collection::vec(0usize..6, 1..5)) {
            let l = ModeLayout::new(cuts).unwrap();
            prop_assume!(l.dim() <= 10_000);
            for i in 0..l.dim() {
                prop_assert_eq!(l.basis_index(&l.occupation(i)).unwrap(), i);
            }
        }

        #[test]
        fn normalized_inner_is_one(psi in arb_state(3, 4)) {
            prop_assume!(psi.norm_sqr() > 1e-6);
            let p = psi.normalized().unwrap();
            prop_assert!((inner(&p, &p).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        }

        #[test]
        fn fidelity_is_symmetric(
            v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 7),
        ) {
            let l = ModeLayout::single(6);
            let a = FockState::from_amplitudes(l.clone(), v.iter().map(|t| c(t.0, t.1)).collect()).unwrap();
            let b = FockState::from_amplitudes(l, v.iter().map(|t| c(t.2, t.3)).collect()).unwrap();
            prop_assume!(a.norm_sqr() > 1e-6 && b.norm_sqr() > 1e-6);
            let (a, b) = (a.normalized().unwrap(), b.normalized().unwrap());
            prop_assert!((fidelity(&a, &b).unwrap() - fidelity(&b, &a).unwrap()).abs() < 1e-14);
        }

        #[test]
        fn commutator_is_identity_below_guard_band(psi in arb_state(2, 5), mode in 0usize..2) {
            let l = psi.layout().clone();
            prop_assume!(mode < l.modes());
            // zero the top two levels of every mode
            let amps: Vec<_> = psi.amplitudes().iter().enumerate().map(|(i, a)| {
                if (0..l.modes()).any(|m| l.occupation_of(i, m) + 2 > l.cutoff(m)) { c(0., 0.) } else { *a }
            }).collect();
            let psi = FockState::from_amplitudes(l, amps).unwrap();
            let ad_a = psi.apply_annihilation(mode).unwrap().apply_creation(mode).unwrap();
            let a_ad = psi.apply_creation(mode).unwrap().apply_annihilation(mode).unwrap();
            for ((x, y), z) in a_ad.amplitudes().iter().zip(ad_a.amplitudes()).zip(psi.amplitudes()) {
                prop_assert!((x - y - z).norm() < 1e-12);
            }
        }

        #[test]
        fn mean_number_matches_marginal(psi in arb_state(2, 5)) {
            prop_assume!(psi.norm_sqr() > 1e-6);
            let p = psi.normalized().unwrap();
            let a = p.apply_annihilation(0).unwrap();
            let n_op = a.norm_sqr();
            let dist = p.marginal_number_distribution(0).unwrap();
            let n_dist: f64 = dist.iter().enumerate().map(|(n, q)| n as f64 * q).sum();
            prop_assert!(n_op >= 0.0);
            prop_assert!((n_op - n_dist).abs() < 1e-12);
            prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn tensor_norm_is_multiplicative(a in arb_state(1, 4), b in arb_state(2, 3)) {
            let t = tensor(&a, &b).unwrap();
            prop_assert!((t.norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() < 1e-12 * (1.0 + t.norm_sqr()));
        }
    }
}
