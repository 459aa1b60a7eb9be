//! Linear-optical circuit elements and composite gadgets on truncated states.
//!
//! Beamsplitter convention: `U = exp(iθ(â†b̂ + âb̂†))`, so that
//! `â† → cosθ·â† + i sinθ·b̂†` and coherent inputs map as
//! `(α_a, α_b) → (cosθ α_a + i sinθ α_b, cosθ α_b + i sinθ α_a)`.
//! Reflection picks up `+i`, transmission nothing; `θ = π/4` is 50:50.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expm::{
    apply_displacement_generator, apply_squeeze_generator, displacement_generator, expm_action,
    expm_dense, squeeze_generator, DenseMatrix,
};
use crate::fock::{cis, tensor, FockState, ModeLayout};
use crate::states::Squeeze;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cutoffs above which single-mode exponentials switch to the matrix-free route.
const DENSE_CUTOFF_LIMIT: usize = 200;

/// `e^{iφn̂}` on `mode`.
pub fn phase_shift(state: &FockState, mode: usize, phi: f64) -> Result<FockState> {
    let layout = state.layout();
    layout.check_mode(mode)?;
    let phases: Vec<Complex64> = (0..=layout.cutoff(mode))
        .map(|n| cis(phi * n as f64))
        .collect();
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, c)| c * phases[layout.occupation_of(i, mode)])
        .collect();
    Ok(FockState::from_parts(layout.clone(), amps, state.leakage()))
}

/// Eigenvectors of the beamsplitter generator `â†b̂ + âb̂†` restricted to the
/// `N`-photon block, in the basis `|m, N−m⟩`.
///
/// The block is real symmetric tridiagonal with off-diagonal
/// `√((m+1)(N−m))` and eigenvalues `−N, −N+2, …, N`. Column `k` of `vectors`
/// (row-major, `(N+1)²`) belongs to eigenvalue `2k − N`. These do not depend
/// on the angle, so they are computed once per block and shared.
struct BlockSpectrum {
    n: usize,
    vectors: Vec<f64>,
}

impl BlockSpectrum {
    fn compute(n: usize) -> Self {
        let w = n + 1;
        let off: Vec<f64> = (0..n)
            .map(|m| (((m + 1) * (n - m)) as f64).sqrt())
            .collect();
        let mut vectors = vec![0.0; w * w];
        for k in 0..w {
            let lambda = 2.0 * k as f64 - n as f64;
            let v = inverse_iteration(&off, lambda);
            for m in 0..w {
                vectors[m * w + k] = v[m];
            }
        }
        Self { n, vectors }
    }

    /// `out = V · diag(e^{iθλ}) · Vᵀ · x`, where `x` is supported on
    /// `p ∈ p_range` and only `m ∈ m_range` of the output is written.
    fn apply(
        &self,
        phases: &[Complex64],
        x: &[Complex64],
        p_range: std::ops::RangeInclusive<usize>,
        y: &mut [Complex64],
    ) {
        let w = self.n + 1;
        let v = &self.vectors;
        let mut z = vec![ZERO; w];
        for p in p_range {
            let xp = x[p];
            if xp == ZERO {
                continue;
            }
            let row = &v[p * w..(p + 1) * w];
            for (zk, vk) in z.iter_mut().zip(row) {
                *zk += xp * *vk;
            }
        }
        for (zk, ph) in z.iter_mut().zip(phases) {
            *zk *= ph;
        }
        for (m, ym) in y.iter_mut().enumerate().take(w) {
            let row = &v[m * w..(m + 1) * w];
            *ym = row.iter().zip(&z).map(|(a, b)| b * *a).sum();
        }
    }
}

/// Unit eigenvector of the symmetric tridiagonal matrix with zero diagonal and
/// off-diagonal `off` for the (simple, exactly known) eigenvalue `lambda`.
fn inverse_iteration(off: &[f64], lambda: f64) -> Vec<f64> {
    let w = off.len() + 1;
    // Deterministic start vector with no reversal symmetry, since the true
    // eigenvectors are alternately symmetric and antisymmetric.
    let mut x: Vec<f64> = (0..w)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin())
        .collect();
    let shift = lambda + 1e-10 * (1.0 + lambda.abs());
    for _ in 0..6 {
        x = solve_shifted_tridiagonal(off, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut x {
            *v /= norm;
        }
    }
    x
}

/// Solve `(T − σI) x = b` for symmetric tridiagonal `T` with zero diagonal,
/// by Gaussian elimination with partial pivoting.
fn solve_shifted_tridiagonal(off: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let w = b.len();
    if w == 1 {
        return vec![b[0] / -sigma];
    }
    // Row i holds (diag, super, super2) after pivoting; super2 appears only
    // from row swaps.
    let mut d = vec![-sigma; w];
    let mut du: Vec<f64> = off.to_vec();
    let mut dl: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; w.saturating_sub(2)];
    let mut rhs = b.to_vec();
    let tiny = 1e-300;
    for i in 0..w - 1 {
        if d[i].abs() >= dl[i].abs() {
            let piv = if d[i] == 0.0 { tiny } else { d[i] };
            d[i] = piv;
            let f = dl[i] / piv;
            dl[i] = f;
            d[i + 1] -= f * du[i];
            rhs[i + 1] -= f * rhs[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - f * d[i + 1];
            if i + 2 < w {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if d[w - 1] == 0.0 {
        d[w - 1] = tiny;
    }
    let mut x = vec![0.0; w];
    x[w - 1] = rhs[w - 1] / d[w - 1];
    x[w - 2] = (rhs[w - 2] - du[w - 2] * x[w - 1]) / d[w - 2];
    for i in (0..w.saturating_sub(2)).rev() {
        x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn block_spectra(n_max: usize) -> Vec<Arc<BlockSpectrum>> {
    static CACHE: OnceLock<RwLock<Vec<Arc<BlockSpectrum>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(Vec::new()));
    {
        let have = cache.read().expect("spectrum cache");
        if have.len() > n_max {
            return have[..=n_max].to_vec();
        }
    }
    let mut have = cache.write().expect("spectrum cache");
    let start = have.len();
    if start <= n_max {
        let fresh: Vec<Arc<BlockSpectrum>> = (start..=n_max)
            .into_par_iter()
            .map(|n| Arc::new(BlockSpectrum::compute(n)))
            .collect();
        have.extend(fresh);
    }
    have[..=n_max].to_vec()
}

/// Two-mode beamsplitter at angle `theta` between `mode_a` and `mode_b`.
///
/// Amplitude scattered above either cutoff is dropped and added to leakage.
pub fn beamsplit(state: &FockState, mode_a: usize, mode_b: usize, theta: f64) -> Result<FockState> {
    let layout = state.layout();
    layout.check_mode(mode_a)?;
    layout.check_mode(mode_b)?;
    if mode_a == mode_b {
        return Err(Error::InvalidArgument(format!(
            "beamsplitter needs two distinct modes, got {mode_a} twice"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beamsplitter angle {theta}"
        )));
    }
    if theta == 0.0 {
        return Ok(state.clone());
    }
    let (ca, cb) = (layout.cutoff(mode_a), layout.cutoff(mode_b));
    let (sa, sb) = (layout.stride(mode_a), layout.stride(mode_b));
    let n_max = ca + cb;
    let spectra = block_spectra(n_max);
    let phases: Vec<Vec<Complex64>> = (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|k| cis(theta * (2.0 * k as f64 - n as f64)))
                .collect()
        })
        .collect();
    let amps = state.amplitudes();

    let bases = layout.pair_bases(mode_a, mode_b);
    let results: Vec<(Vec<Complex64>, f64)> = bases
        .par_iter()
        .map(|&base| {
            let mut out = vec![ZERO; (ca + 1) * (cb + 1)];
            let mut lost = 0.0;
            let mut x = vec![ZERO; n_max + 1];
            let mut y = vec![ZERO; n_max + 1];
            for n in 0..=n_max {
                let p_lo = n.saturating_sub(cb);
                let p_hi = n.min(ca);
                let mut any = false;
                for p in p_lo..=p_hi {
                    x[p] = amps[base + p * sa + (n - p) * sb];
                    any |= x[p] != ZERO;
                }
                if !any {
                    continue;
                }
                spectra[n].apply(&phases[n], &x, p_lo..=p_hi, &mut y);
                for (m, ym) in y.iter().enumerate().take(n + 1) {
                    if m <= ca && n - m <= cb {
                        out[m * (cb + 1) + (n - m)] = *ym;
                    } else {
                        lost += ym.norm_sqr();
                    }
                }
                for p in p_lo..=p_hi {
                    x[p] = ZERO;
                }
            }
            (out, lost)
        })
        .collect();

    let mut new_amps = vec![ZERO; amps.len()];
    let mut leakage = state.leakage();
    for (base, (out, lost)) in bases.iter().zip(results) {
        for m in 0..=ca {
            for q in 0..=cb {
                new_amps[base + m * sa + q * sb] = out[m * (cb + 1) + q];
            }
        }
        leakage += lost;
    }
    Ok(FockState::from_parts(layout.clone(), new_amps, leakage))
}

/// Apply a single-mode operator, given either as a dense matrix or as a
/// matrix-free exponential action, along `mode`.
fn apply_single_mode<F>(state: &FockState, mode: usize, op: F) -> Result<FockState>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    let layout = state.layout();
    layout.check_mode(mode)?;
    let d = layout.cutoff(mode) + 1;
    let stride = layout.stride(mode);
    let amps = state.amplitudes();
    let bases: Vec<usize> = layout.fiber_bases(mode).collect();
    let fibers: Vec<Vec<Complex64>> = bases
        .par_iter()
        .map(|&b| {
            let v: Vec<Complex64> = (0..d).map(|n| amps[b + n * stride]).collect();
            if v.iter().all(|x| *x == ZERO) {
                v
            } else {
                op(&v)
            }
        })
        .collect();
    let mut out = vec![ZERO; amps.len()];
    for (b, f) in bases.iter().zip(fibers) {
        for (n, x) in f.into_iter().enumerate() {
            out[b + n * stride] = x;
        }
    }
    Ok(FockState::from_parts(layout.clone(), out, state.leakage()))
}

fn dense_op(u: DenseMatrix) -> impl Fn(&[Complex64]) -> Vec<Complex64> + Sync {
    move |v| {
        let mut o = vec![ZERO; v.len()];
        u.matvec(v, &mut o);
        o
    }
}

/// Displacement `D(α)` on `mode` via the exponential of the truncated generator.
pub fn displace(state: &FockState, mode: usize, alpha: Complex64) -> Result<FockState> {
    state.layout().check_mode(mode)?;
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidArgument(format!("displacement {alpha}")));
    }
    if alpha == ZERO {
        return Ok(state.clone());
    }
    let cutoff = state.layout().cutoff(mode);
    if cutoff <= DENSE_CUTOFF_LIMIT {
        apply_single_mode(
            state,
            mode,
            dense_op(expm_dense(&displacement_generator(alpha, cutoff))),
        )
    } else {
        let norm = 2.0 * alpha.norm() * ((cutoff + 1) as f64).sqrt();
        apply_single_mode(state, mode, move |v| {
            expm_action(|x, o| apply_displacement_generator(alpha, x, o), norm, v)
        })
    }
}

/// Squeezing `S(ξ)` on `mode` via the exponential of the truncated generator.
pub fn squeeze_op(state: &FockState, mode: usize, squeeze: Squeeze) -> Result<FockState> {
    state.layout().check_mode(mode)?;
    squeeze_by_xi(state, mode, squeeze.xi())
}

/// `S(ξ)` for an arbitrary complex `ξ`, so that negative magnitudes along a
/// fixed axis can be swept continuously.
pub fn squeeze_by_xi(state: &FockState, mode: usize, xi: Complex64) -> Result<FockState> {
    state.layout().check_mode(mode)?;
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(Error::InvalidArgument(format!("squeezing {xi}")));
    }
    if xi == ZERO {
        return Ok(state.clone());
    }
    let cutoff = state.layout().cutoff(mode);
    if cutoff <= DENSE_CUTOFF_LIMIT {
        apply_single_mode(
            state,
            mode,
            dense_op(expm_dense(&squeeze_generator(xi, cutoff))),
        )
    } else {
        let norm = xi.norm() * (cutoff + 1) as f64;
        apply_single_mode(state, mode, move |v| {
            expm_action(|x, o| apply_squeeze_generator(xi, x, o), norm, v)
        })
    }
}

/// Phase-encoded pair `[measured, LO]` → differential displacement pair:
/// 50:50 beamsplitter, then `−i` on the first mode so both outputs share the
/// LO phase.
pub fn phase_to_dide(state: &FockState, mode0: usize, mode1: usize) -> Result<FockState> {
    let s = beamsplit(state, mode0, mode1, FRAC_PI_4)?;
    phase_shift(&s, mode0, -FRAC_PI_2)
}

/// Inverse of [`phase_to_dide`]: `+i` on the first mode, then the opposite-phase
/// 50:50 beamsplitter. The second output carries the sum, the first the
/// difference.
pub fn dide_to_phase(state: &FockState, mode0: usize, mode1: usize) -> Result<FockState> {
    let s = phase_shift(state, mode0, FRAC_PI_2)?;
    beamsplit(&s, mode0, mode1, -FRAC_PI_4)
}

/// Symmetric two-mode interference gadget with two erasure modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetSpec {
    pub theta_split: f64,
    pub theta_interfere: f64,
    /// π phase on the picked-off light; flips the sign of the coupling.
    pub pi_shift: bool,
    pub system_modes: [usize; 2],
    pub erasure_modes: [usize; 2],
}

impl GadgetSpec {
    /// Gadget on modes `[m0, m1, e0, e1] = [0, 1, 2, 3]`.
    pub fn new(theta_split: f64, theta_interfere: f64, pi_shift: bool) -> Result<Self> {
        let spec = Self {
            theta_split,
            theta_interfere,
            pi_shift,
            system_modes: [0, 1],
            erasure_modes: [2, 3],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("theta_split", self.theta_split),
            ("theta_interfere", self.theta_interfere),
        ] {
            if !(0.0..FRAC_PI_2).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {t} outside [0, π/2)"
                )));
            }
        }
        let mut all = vec![
            self.system_modes[0],
            self.system_modes[1],
            self.erasure_modes[0],
            self.erasure_modes[1],
        ];
        all.sort_unstable();
        all.dedup();
        if all.len() != 4 {
            return Err(Error::InvalidArgument(
                "gadget modes must be distinct".into(),
            ));
        }
        Ok(())
    }
}

/// Run the interference gadget: pick off light from each system mode into its
/// erasure mode, optionally π-shift it, then recombine each erasure mode with
/// the opposite system mode.
pub fn interference_gadget(state: &FockState, spec: &GadgetSpec) -> Result<FockState> {
    spec.validate()?;
    let [m0, m1] = spec.system_modes;
    let [e0, e1] = spec.erasure_modes;
    for e in [e0, e1] {
        let p = state.marginal_number_distribution(e)?;
        let total: f64 = p.iter().sum();
        if (total - p[0]).abs() > 1e-12 * total.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "erasure mode {e} does not start in vacuum"
            )));
        }
    }
    let mut s = beamsplit(state, m0, e0, spec.theta_split)?;
    s = beamsplit(&s, m1, e1, spec.theta_split)?;
    if spec.pi_shift {
        s = phase_shift(&s, e0, PI)?;
        s = phase_shift(&s, e1, PI)?;
    }
    s = beamsplit(&s, m1, e0, spec.theta_interfere)?;
    beamsplit(&s, m0, e1, spec.theta_interfere)
}

/// Inject a prepared state into a system: the layouts are concatenated
/// (system modes first) and prepared mode `i` is beamsplit with system mode `i`.
pub fn inject(system: &FockState, prepared: &FockState, theta_inject: f64) -> Result<FockState> {
    let m = system.layout().modes();
    if prepared.layout().modes() != m {
        return Err(Error::LayoutMismatch(format!(
            "{} prepared modes for {} system modes",
            prepared.layout().modes(),
            m
        )));
    }
    let mut s = tensor(system, prepared)?;
    for i in 0..m {
        s = beamsplit(&s, i, m + i, theta_inject)?;
    }
    Ok(s)
}

/// Vacuum on `cutoffs`, convenient for building gadget inputs.
pub fn vacuum(cutoffs: &[usize]) -> Result<FockState> {
    Ok(FockState::vacuum(ModeLayout::new(cutoffs.to_vec())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fidelity, inner};
    use crate::states::{coherent, squeezed_vacuum};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &FockState, b: &FockState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn pair(a: Complex64, b: Complex64, cutoff: usize) -> FockState {
        tensor(&coherent(a, cutoff).unwrap(), &coherent(b, cutoff).unwrap()).unwrap()
    }

    #[test]
    fn phase_shift_examples() {
        let a = coherent(c(1., 0.), 30).unwrap();
        assert_eq!(phase_shift(&a, 0, 0.0).unwrap(), a);
        let flipped = phase_shift(&a, 0, PI).unwrap();
        assert!(max_diff(&flipped, &coherent(c(-1., 0.), 30).unwrap()) < 1e-15);
        let rot = phase_shift(&a, 0, FRAC_PI_2).unwrap();
        assert!(max_diff(&rot, &coherent(c(0., 1.), 30).unwrap()) < 1e-10);
    }

    #[test]
    fn beamsplitter_maps_coherent_pairs() {
        let (am, al) = (c(0.4, 0.3), c(1.1, -0.2));
        let s = beamsplit(&pair(am, al, 30), 0, 1, FRAC_PI_4).unwrap();
        let r = 0.5f64.sqrt();
        let expect = pair((am + c(0., 1.) * al) * r, (al + c(0., 1.) * am) * r, 30);
        assert!(max_diff(&s, &expect) < 1e-10);
        assert!(max_diff(&beamsplit(&s, 0, 1, 0.0).unwrap(), &s) < 1e-15);
    }

    #[test]
    fn hong_ou_mandel() {
        let l = ModeLayout::uniform(2, 2).unwrap();
        let s = FockState::basis(l, &[1, 1]).unwrap();
        let out = beamsplit(&s, 0, 1, FRAC_PI_4).unwrap();
        assert!(out.amplitude(&[1, 1]).unwrap().norm() < 1e-15);
        assert!((out.amplitude(&[2, 0]).unwrap().norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn beamsplitter_rejects_same_mode() {
        let s = vacuum(&[2, 2]).unwrap();
        assert!(matches!(
            beamsplit(&s, 1, 1, 0.3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            beamsplit(&s, 0, 2, 0.3),
            Err(Error::InvalidMode { .. })
        ));
    }

    #[test]
    fn block_spectra_are_orthonormal_eigenbases_at_large_n() {
        let n = 300;
        let spec = BlockSpectrum::compute(n);
        let w = n + 1;
        let v = &spec.vectors;
        let mut worst = 0.0f64;
        for p in [0usize, 1, 150, 299, 300] {
            for q in [0usize, 2, 150, 300] {
                let d: f64 = (0..w).map(|m| v[m * w + p] * v[m * w + q]).sum();
                let e = if p == q { 1.0 } else { 0.0 };
                worst = worst.max((d - e).abs());
            }
            // residual of T v = λ v
            let lambda = 2.0 * p as f64 - n as f64;
            for m in 0..w {
                let mut tv = 0.0;
                if m > 0 {
                    tv += ((m * (n + 1 - m)) as f64).sqrt() * v[(m - 1) * w + p];
                }
                if m < n {
                    tv += (((m + 1) * (n - m)) as f64).sqrt() * v[(m + 1) * w + p];
                }
                worst = worst.max((tv - lambda * v[m * w + p]).abs() / n as f64);
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn beamsplitter_matches_single_photon_closed_form() {
        // U|1,0⟩ = cosθ|1,0⟩ + i sinθ|0,1⟩
        let l = ModeLayout::uniform(2, 1).unwrap();
        let out = beamsplit(&FockState::basis(l, &[1, 0]).unwrap(), 0, 1, 0.3).unwrap();
        assert!((out.amplitude(&[1, 0]).unwrap() - c(0.3f64.cos(), 0.)).norm() < 1e-15);
        assert!((out.amplitude(&[0, 1]).unwrap() - c(0., 0.3f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn beamsplitter_handles_unequal_cutoffs_and_middle_modes() {
        let a = coherent(c(0.5, 0.2), 12).unwrap();
        let v = vacuum(&[3]).unwrap();
        let b = coherent(c(-0.3, 0.4), 9).unwrap();
        let s = tensor(&tensor(&a, &v).unwrap(), &b).unwrap();
        let out = beamsplit(&s, 2, 0, 0.6).unwrap();
        let (sn, cs) = 0.6f64.sin_cos();
        let i = c(0., 1.);
        let expect = tensor(
            &tensor(
                &coherent(c(0.5, 0.2) * cs + i * sn * c(-0.3, 0.4), 12).unwrap(),
                &v,
            )
            .unwrap(),
            &coherent(c(-0.3, 0.4) * cs + i * sn * c(0.5, 0.2), 9).unwrap(),
        )
        .unwrap();
        assert!(max_diff(&out, &expect) < 1e-6);
    }

    #[test]
    fn displacement_and_squeezing_match_analytic_states() {
        let v = vacuum(&[40]).unwrap();
        for alpha in [c(2., 0.), c(-1.2, 1.5), c(0.3, -0.4)] {
            let d = displace(&v, 0, alpha).unwrap();
            assert!(max_diff(&d, &coherent(alpha, 40).unwrap()) < 1e-8);
        }
        let sq = Squeeze::new(0.3, 0.0).unwrap();
        let s = squeeze_op(&v, 0, sq).unwrap();
        assert!(max_diff(&s, &squeezed_vacuum(sq, 40).unwrap()) < 1e-8);
        assert_eq!(displace(&v, 0, c(0., 0.)).unwrap(), v);
        assert_eq!(squeeze_op(&v, 0, Squeeze::NONE).unwrap(), v);
    }

    #[test]
    fn inverse_pairs() {
        let psi = coherent(c(0.7, 0.1), 40).unwrap();
        let back = displace(&displace(&psi, 0, c(1.1, -0.5)).unwrap(), 0, c(-1.1, 0.5)).unwrap();
        assert!(max_diff(&back, &psi) < 1e-8);
        let sq = Squeeze::new(0.4, 1.3).unwrap();
        let inv = Squeeze {
            r: sq.r,
            theta: sq.theta + PI,
        };
        let back = squeeze_op(&squeeze_op(&psi, 0, sq).unwrap(), 0, inv).unwrap();
        assert!(max_diff(&back, &psi) < 1e-8);
    }

    #[test]
    fn large_cutoff_uses_matrix_free_route() {
        let v = vacuum(&[400]).unwrap();
        let alpha = c(3.0, -2.0);
        let d = displace(&v, 0, alpha).unwrap();
        assert!(max_diff(&d, &coherent(alpha, 400).unwrap()) < 1e-9);
        let sq = Squeeze::new(1.0, 0.5).unwrap();
        let s = squeeze_op(&v, 0, sq).unwrap();
        assert!(max_diff(&s, &squeezed_vacuum(sq, 400).unwrap()) < 1e-9);
    }

    #[test]
    fn dide_examples() {
        let (a, l) = (0.6, 1.4);
        let r = 0.5f64.sqrt();
        let out = phase_to_dide(&pair(c(0., a), c(l, 0.), 30), 0, 1).unwrap();
        assert!(max_diff(&out, &pair(c((l + a) * r, 0.), c((l - a) * r, 0.), 30)) < 1e-10);
        let out = phase_to_dide(&pair(c(0., -a), c(l, 0.), 30), 0, 1).unwrap();
        assert!(max_diff(&out, &pair(c((l - a) * r, 0.), c((l + a) * r, 0.), 30)) < 1e-10);
        let out = phase_to_dide(&pair(c(0., l), c(l, 0.), 30), 0, 1).unwrap();
        assert!(out.marginal_number_distribution(1).unwrap()[0] > 1.0 - 1e-12);

        let back = dide_to_phase(&pair(c(a, 0.), c(a, 0.), 30), 0, 1).unwrap();
        assert!(max_diff(&back, &pair(c(0., 0.), c(2f64.sqrt() * a, 0.), 30)) < 1e-10);
        let back = dide_to_phase(&pair(c(a, 0.), c(-a, 0.), 30), 0, 1).unwrap();
        assert!((back.mean_annihilation(0).unwrap().norm() - 2f64.sqrt() * a).abs() < 1e-10);
        assert!(back.mean_annihilation(1).unwrap().norm() < 1e-10);
    }

    #[test]
    fn gadget_edge_cases() {
        // Without a split the recombination beamsplitters only see vacuum in
        // the erasure ports, so each system mode loses sin²θ_i of its light
        // independently and no cross term appears.
        let theta_i = 0.4f64;
        let spec = GadgetSpec::new(0.0, theta_i, false).unwrap();
        let (a0, a1) = (c(0.5, 0.), c(0.3, 0.2));
        let full = tensor(&pair(a0, a1, 14), &vacuum(&[14, 14]).unwrap()).unwrap();
        let out = interference_gadget(&full, &spec).unwrap();
        let (s, cs) = theta_i.sin_cos();
        let i = c(0., 1.);
        let expect = tensor(
            &pair(a0 * cs, a1 * cs, 14),
            &pair(i * s * a1, i * s * a0, 14),
        )
        .unwrap();
        assert!(
            max_diff(&out, &expect) < 1e-8,
            "{}",
            max_diff(&out, &expect)
        );

        let vac = vacuum(&[6, 6, 6, 6]).unwrap();
        let spec = GadgetSpec::new(0.6, 0.3, true).unwrap();
        let out = interference_gadget(&vac, &spec).unwrap();
        assert!((out.amplitudes()[0] - c(1., 0.)).norm() < 1e-14);

        let bad = tensor(
            &vacuum(&[3, 3, 3]).unwrap(),
            &coherent(c(0.2, 0.), 3).unwrap(),
        )
        .unwrap();
        assert!(interference_gadget(&bad, &spec).is_err());
        assert!(GadgetSpec::new(FRAC_PI_2, 0.1, false).is_err());
    }

    #[test]
    fn inject_examples() {
        let sys = coherent(c(0.4, 0.), 12).unwrap();
        let prep = coherent(c(0., 0.7), 12).unwrap();
        let out = inject(&sys, &prep, 0.0).unwrap();
        assert!(max_diff(&out, &tensor(&sys, &prep).unwrap()) < 1e-15);
        let swapped = inject(&sys, &prep, FRAC_PI_2).unwrap();
        let p = swapped.marginal_number_distribution(0).unwrap();
        let q = prep.marginal_number_distribution(0).unwrap();
        assert!(p.iter().zip(&q).all(|(x, y)| (x - y).abs() < 1e-12));
        let theta = 0.3;
        let out = inject(&sys, &prep, theta).unwrap();
        let (s, cs) = theta.sin_cos();
        let a0 = c(0.4, 0.) * cs + c(0., s) * c(0., 0.7);
        assert!((out.mean_annihilation(0).unwrap() - a0).norm() < 1e-8);
        assert!(inject(&sys, &vacuum(&[2, 2]).unwrap(), 0.1).is_err());
    }

    fn arb_two_mode() -> impl Strategy<Value = FockState> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36).prop_map(|v| {
            let l = ModeLayout::uniform(2, 5).unwrap();
            // keep the top two levels empty so nothing leaks
            let amps = v
                .into_iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    if l.occupation_of(i, 0) + l.occupation_of(i, 1) <= 3 {
                        c(a, b)
                    } else {
                        c(0., 0.)
                    }
                })
                .collect();
            FockState::from_amplitudes(l, amps)
                .unwrap()
                .normalized()
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn beamsplitter_is_unitary_and_conserves_photons(psi in arb_two_mode(), theta in -3.0f64..3.0) {
            let out = beamsplit(&psi, 0, 1, theta).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
            let n_in = psi.mean_photons(0).unwrap() + psi.mean_photons(1).unwrap();
            let n_out = out.mean_photons(0).unwrap() + out.mean_photons(1).unwrap();
            prop_assert!((n_in - n_out).abs() < 1e-10);
            let back = beamsplit(&out, 0, 1, -theta).unwrap();
            prop_assert!(max_diff(&back, &psi) < 1e-10);
        }

        #[test]
        fn dide_round_trip(psi in arb_two_mode()) {
            let there = phase_to_dide(&psi, 0, 1).unwrap();
            let back = dide_to_phase(&there, 0, 1).unwrap();
            prop_assert!(max_diff(&back, &psi) < 1e-10);
        }

        #[test]
        fn elements_preserve_norm(psi in arb_two_mode(), phi in -4.0f64..4.0) {
            let out = phase_shift(&psi, 1, phi).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((fidelity(&out, &out).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
