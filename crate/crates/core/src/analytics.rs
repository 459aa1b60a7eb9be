//! Closed-form predictions used as oracles and as inputs to the experiments:
//! interference loss of the coupling gadget, equal-split amplitudes of a 50:50
//! beamsplitter, erasure residuals, Poisson counts, the strong-antisqueezing
//! photon fraction and the displacement-matching solver.

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::catfit::{fit_kitten, fit_squeezed_cat, parity_phase, FitOptions};
use crate::circuits::squeeze_by_xi;
use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};
use crate::fock::{cis, FockState, LEAKAGE_THRESHOLD};
use crate::kitten::{kitten_direct, KittenSpec};

/// Predicted interference loss of the gadget for coherent inputs `α₁`, `α₂`:
/// `±4 sinθ_s cosθ_s sinθ_i cosθ_i Re[α₁α₂*]`, `+` without the π shift.
pub fn interference_loss_theory(
    alpha1: Complex64,
    alpha2: Complex64,
    theta_s: f64,
    theta_i: f64,
    pi_shift: bool,
) -> Result<f64> {
    for (name, t) in [("theta_split", theta_s), ("theta_interfere", theta_i)] {
        if !(t.is_finite() && t.abs() < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {t} must lie inside (−π/2, π/2)"
            )));
        }
    }
    let (ss, cs) = theta_s.sin_cos();
    let (si, ci) = theta_i.sin_cos();
    let sign = if pi_shift { -1.0 } else { 1.0 };
    Ok(sign * 4.0 * ss * cs * si * ci * (alpha1 * alpha2.conj()).re)
}

/// Amplitude of the equal split `|p, p⟩`, `p = (n+m)/2`, after a 50:50
/// beamsplitter acts on `|n, m⟩`. Zero when `n + m` is odd.
pub fn c_equal(n: usize, m: usize) -> Complex64 {
    if (n + m) % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let (n, m) = if n >= m { (n, m) } else { (m, n) };
    let d = (n - m) / 2;
    let p = (n + m) / 2;
    let sum = alternating_sum(n, m, d, p);
    if sum.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let ln_mag = ln_factorial(p)
        - 0.5 * (ln_factorial(n) + ln_factorial(m))
        - p as f64 * std::f64::consts::LN_2
        + ln_abs(&sum);
    // i^{−d}
    sign * ln_mag.exp() * cis(-FRAC_PI_2 * d as f64)
}

/// `Σ_{k=d}^{p} (−1)^k C(n,k) C(m,k−d)` in exact integers; the terms cancel
/// far below `f64` resolution for large arguments.
fn alternating_sum(n: usize, m: usize, d: usize, p: usize) -> BigInt {
    let mut cn = binomial_big(n, d);
    let mut cm = BigInt::one();
    let mut total = BigInt::zero();
    for k in d..=p {
        let j = k - d;
        if k % 2 == 0 {
            total += &cn * &cm;
        } else {
            total -= &cn * &cm;
        }
        // C(n, k+1) = C(n, k)(n−k)/(k+1), exact at each step
        cn = cn * (n - k) / (k + 1);
        cm = cm * (m - j.min(m)) / (j + 1);
    }
    total
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |c, i| c * (n - i) / (i + 1))
}

fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Largest `n + m` the brute-force expansion accepts.
pub const BRUTEFORCE_MAX_PHOTONS: usize = 24;

/// Full output of a 50:50 beamsplitter on `|n, m⟩`, by multiplying out
/// `(a† + i b†)ⁿ (b† + i a†)ᵐ / √(2^{n+m} n! m!)`. Entry `x` is the amplitude
/// of `|x, n+m−x⟩`.
pub fn beamsplit_output_bruteforce(n: usize, m: usize) -> Result<Vec<Complex64>> {
    let total = n + m;
    if total > BRUTEFORCE_MAX_PHOTONS {
        return Err(Error::InvalidArgument(format!(
            "brute-force expansion limited to n + m ≤ {BRUTEFORCE_MAX_PHOTONS}, got {total}"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // poly[x] multiplies a†^x b†^(degree − x)
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let times = |poly: &mut Vec<Complex64>, ca: Complex64, cb: Complex64| {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (x, c) in poly.iter().enumerate() {
            next[x + 1] += c * ca * h;
            next[x] += c * cb * h;
        }
        *poly = next;
    };
    for _ in 0..n {
        times(&mut poly, Complex64::new(1.0, 0.0), i);
    }
    for _ in 0..m {
        times(&mut poly, i, Complex64::new(1.0, 0.0));
    }
    let norm = (-0.5 * (ln_factorial(n) + ln_factorial(m))).exp();
    Ok(poly
        .iter()
        .enumerate()
        .map(|(x, c)| c * norm * (0.5 * (ln_factorial(x) + ln_factorial(total - x))).exp())
        .collect())
}

/// Equal-split amplitude read off [`beamsplit_output_bruteforce`].
pub fn c_equal_bruteforce(n: usize, m: usize) -> Result<Complex64> {
    let out = beamsplit_output_bruteforce(n, m)?;
    if (n + m) % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(out[(n + m) / 2])
}

/// Residual displacement left after a weak field `α_w` is combined in
/// quadrature with a strong one `α_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureResidual {
    /// `√(α_s² + α_w²) − α_s`.
    pub exact: f64,
    /// `α_w² / (2α_s)`.
    pub approx: f64,
}

pub fn erasure_residual(alpha_weak: f64, alpha_strong: f64) -> Result<ErasureResidual> {
    if !(alpha_strong > 0.0 && alpha_strong.is_finite()) || !alpha_weak.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "erasure residual needs a positive strong field, got α_s = {alpha_strong}, α_w = {alpha_weak}"
        )));
    }
    let w2 = alpha_weak * alpha_weak;
    Ok(ErasureResidual {
        exact: w2 / (alpha_strong.hypot(alpha_weak) + alpha_strong),
        approx: w2 / (2.0 * alpha_strong),
    })
}

/// Photon-count probability of a coherent state, `e^{−|α|²}|α|^{2n}/n!`.
pub fn poisson_pn(alpha: Complex64, n: usize) -> f64 {
    let a2 = alpha.norm_sqr();
    if a2 == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-a2 + n as f64 * a2.ln() - ln_factorial(n)).exp()
}

/// Photon bookkeeping of a displaced squeezed state `D(d₀)S(r₀)` driven by a
/// further antisqueezing `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntisqueezeFraction {
    /// Displacement photons over squeezing photons, `d₀²e^{2r}/sinh²(r+r₀)`.
    pub ratio_exact: f64,
    /// Its `r → ∞` limit `4d₀²/e^{2r₀}`.
    pub ratio_strong: f64,
    /// Share of photons from squeezing, `1/(1+ratio_exact)`.
    pub fraction_exact: f64,
    pub fraction_strong: f64,
}

pub fn squeeze_fraction_strong(d0: f64, r0: f64, r: f64) -> Result<AntisqueezeFraction> {
    if !(d0 > 0.0 && d0.is_finite())
        || !(r0 >= 0.0 && r0.is_finite())
        || !(r >= 0.0 && r.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "need d0 > 0, r0 ≥ 0, r ≥ 0; got {d0}, {r0}, {r}"
        )));
    }
    let sh = (r + r0).sinh();
    // e^{2r}/sinh² computed as a ratio of exponentials to stay finite for large r
    let ratio_exact = if sh == 0.0 {
        f64::INFINITY
    } else {
        let q = 2.0 / (1.0 - (-2.0 * (r + r0)).exp());
        d0 * d0 * q * q * (-2.0 * r0).exp()
    };
    let ratio_strong = 4.0 * d0 * d0 * (-2.0 * r0).exp();
    Ok(AntisqueezeFraction {
        ratio_exact,
        ratio_strong,
        fraction_exact: 1.0 / (1.0 + ratio_exact),
        fraction_strong: 1.0 / (1.0 + ratio_strong),
    })
}

/// Antisqueezing that brings a kitten's fitted displacement to a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    /// Signed magnitude along the displacement axis; negative values squeeze.
    pub r_required: f64,
    /// `1 − |α_fit|² / ⟨n̂⟩` of the antisqueezed state.
    pub excess_fraction: f64,
    pub source_displacement: f64,
    pub fitted_displacement: f64,
    pub mean_photons: f64,
    /// Guard-band mass of the antisqueezed state.
    pub leakage: f64,
}

/// Fitted displacement of a kitten, the quantity [`squeeze_to_match`] aims at.
pub fn fitted_displacement(spec: &KittenSpec, opts: &FitOptions) -> Result<f64> {
    Ok(fit_kitten(&kitten_direct(spec)?, &match_options(opts))?.alpha)
}

fn match_options(opts: &FitOptions) -> FitOptions {
    FitOptions {
        tolerance: opts.tolerance.min(1e-10),
        ..*opts
    }
}

struct Antisqueezed {
    alpha: f64,
    mean_photons: f64,
    leakage: f64,
}

/// Squeeze the kitten along its displacement axis by signed `r` and refit.
fn antisqueeze_and_fit(
    state: &FockState,
    axis_theta: f64,
    phi: f64,
    r: f64,
    opts: &FitOptions,
) -> Result<Antisqueezed> {
    let out = squeeze_by_xi(
        state,
        0,
        Complex64::new(r * axis_theta.cos(), r * axis_theta.sin()),
    )?;
    let leakage = out.truncation_diagnostic();
    if leakage > LEAKAGE_THRESHOLD {
        return Err(Error::Leakage {
            leakage,
            threshold: LEAKAGE_THRESHOLD,
            suggestion: None,
        });
    }
    let out = out.normalized()?;
    let fit = fit_squeezed_cat(&out, phi, opts)?;
    Ok(Antisqueezed {
        alpha: fit.alpha,
        mean_photons: fit.mean_photons,
        leakage,
    })
}

/// Solve for the (anti)squeezing that gives `source` the fitted displacement
/// `target`, by bisection on the monotone map `r ↦ α_fit(r)`.
pub fn squeeze_to_match(
    source: &KittenSpec,
    target: f64,
    opts: &FitOptions,
) -> Result<MatchResult> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "target displacement {target}"
        )));
    }
    let opts = match_options(opts);
    let kitten = kitten_direct(source)?;
    let phi = parity_phase(source.k);
    let fit0 = fit_kitten(&kitten, &opts)?;
    let alpha0 = fit0.alpha;
    if alpha0 < 1e-9 {
        return Err(Error::InvalidArgument(
            "source has no fitted displacement".into(),
        ));
    }
    let theta = fit0.squeeze_theta;
    let at = |r: f64| antisqueeze_and_fit(&kitten.state, theta, phi, r, &opts);

    let done = |r: f64, a: &Antisqueezed| MatchResult {
        r_required: r,
        excess_fraction: 1.0 - a.alpha * a.alpha / a.mean_photons,
        source_displacement: alpha0,
        fitted_displacement: a.alpha,
        mean_photons: a.mean_photons,
        leakage: a.leakage,
    };
    if (alpha0 - target).abs() <= 1e-6 {
        let a = Antisqueezed {
            alpha: alpha0,
            mean_photons: fit0.mean_photons,
            leakage: kitten.tail_mass,
        };
        return Ok(done(0.0, &a));
    }

    // bracket [lo, hi] with α(lo) < target < α(hi)
    let dir = if target > alpha0 { 1.0 } else { -1.0 };
    let mut near = 0.0;
    // linear steps: overshooting in r drives the state into the cutoff
    let step = 0.2 * dir;
    let mut far = step;
    let mut far_val = at(far)?;
    while (far_val.alpha - target) * dir < 0.0 {
        near = far;
        far += step;
        if far.abs() > 6.0 {
            return Err(Error::Numerical(format!(
                "no squeezing up to |r| = 6 reaches displacement {target}"
            )));
        }
        far_val = at(far)?;
    }
    let (mut lo, mut hi) = if dir > 0.0 { (near, far) } else { (far, near) };
    let mut best = (far, far_val);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = at(mid)?;
        let err = v.alpha - target;
        let hit = err.abs() <= 1e-6;
        if err.abs() < (best.1.alpha - target).abs() {
            best = (mid, v);
        }
        if hit || hi - lo < 1e-13 {
            break;
        }
        if err < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1.alpha - target).abs() > 1e-6 {
        return Err(Error::Numerical(format!(
            "displacement match stalled at {} for target {target}",
            best.1.alpha
        )));
    }
    Ok(done(best.0, &best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::beamsplit;
    use crate::fock::ModeLayout;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn interference_theory_values() {
        let a = Complex64::new(0.5f64.sqrt(), 0.0);
        let v = interference_loss_theory(a, a, PI / 5.0, PI / 10.0, false).unwrap();
        assert!((v - 0.2795).abs() < 1e-4, "{v}");
        let w = interference_loss_theory(a, a, PI / 5.0, PI / 10.0, true).unwrap();
        assert_eq!(v, -w);
        assert_eq!(
            interference_loss_theory(a, Complex64::new(0.0, 0.0), 0.3, 0.2, false).unwrap(),
            0.0
        );
        assert!(interference_loss_theory(a, a, PI / 2.0, 0.2, false).is_err());
    }

    #[test]
    fn c_equal_small_cases() {
        assert_eq!(c_equal(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(c_equal(1, 1), Complex64::new(0.0, 0.0));
        assert!((c_equal(2, 0).norm_sqr() - 0.5).abs() < 1e-15);
        assert_eq!(c_equal(3, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn c_equal_matches_expansion() {
        for n in 0..=8 {
            for m in 0..=8 {
                let a = c_equal(n, m);
                let b = c_equal_bruteforce(n, m).unwrap();
                assert!((a - b).norm() < 1e-12, "{n},{m}: {a} vs {b}");
                if n % 2 == 1 && m % 2 == 1 {
                    assert_eq!(a, Complex64::new(0.0, 0.0));
                    assert_eq!(c_equal_bruteforce(n, m).unwrap().norm(), 0.0);
                }
            }
        }
        assert!(c_equal(4, 2).norm() > 0.1);
    }

    #[test]
    fn expansion_is_a_unit_vector_and_matches_the_simulator() {
        for (n, m) in [(3, 2), (5, 5), (12, 12), (7, 0)] {
            let out = beamsplit_output_bruteforce(n, m).unwrap();
            let total: f64 = out.iter().map(|c| c.norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-10);
            let cut = n + m;
            let st = FockState::basis(ModeLayout::uniform(2, cut).unwrap(), &[n, m]).unwrap();
            let sim = beamsplit(&st, 0, 1, PI / 4.0).unwrap();
            for (x, c) in out.iter().enumerate() {
                let s = sim.amplitude(&[x, cut - x]).unwrap();
                assert!((s - c).norm() < 1e-10, "{n},{m},{x}: {s} vs {c}");
            }
        }
        assert!(beamsplit_output_bruteforce(20, 5).is_err());
    }

    #[test]
    fn c_equal_large_arguments_stay_bounded() {
        for (n, m) in [(200, 100), (400, 400), (1001, 3)] {
            let v = c_equal(n, m);
            assert!(v.norm_sqr() <= 1.0 + 1e-9);
        }
        assert_eq!(c_equal(301, 101), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn erasure_and_poisson() {
        let e = erasure_residual(0.0, 3.0).unwrap();
        assert_eq!(e.exact, 0.0);
        let e = erasure_residual(1.0, 10.0).unwrap();
        assert!((e.exact - (101f64.sqrt() - 10.0)).abs() < 1e-14);
        assert!((e.approx - 0.05).abs() < 1e-15);
        let e = erasure_residual(1.0, 1e3).unwrap();
        assert!((e.exact / e.approx - 1.0).abs() < 1e-4);
        assert!(erasure_residual(1.0, 0.0).is_err());

        assert_eq!(poisson_pn(Complex64::new(0.0, 0.0), 0), 1.0);
        assert!((poisson_pn(Complex64::new(1.0, 0.0), 1) - (-1f64).exp()).abs() < 1e-15);
        let total: f64 = (0..=60)
            .map(|n| poisson_pn(Complex64::new(2.0, 0.0), n))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    #[allow(clippy::approx_constant)] // 0.318 is the target value, not 1/π
    fn strong_antisqueeze_fraction() {
        let f = squeeze_fraction_strong(1.0, 0.0, 50.0).unwrap();
        assert!((f.ratio_strong - 4.0).abs() < 1e-12);
        assert!((f.fraction_strong - 0.2).abs() < 1e-12);
        let r0 = 0.1f64.sqrt().asinh();
        let f = squeeze_fraction_strong(1.0, r0, 4.0).unwrap();
        assert!((f.fraction_strong - 0.318).abs() < 1e-3 && f.fraction_strong < 1.0 / 3.0);
        assert!((f.fraction_exact / f.fraction_strong - 1.0).abs() < 0.01);
        // initial photons only
        let f = squeeze_fraction_strong(1.0, r0, 0.0).unwrap();
        assert!((f.ratio_exact - 1.0 / 0.1).abs() < 1e-12);
        assert_eq!(
            squeeze_fraction_strong(1.0, 0.0, 0.0)
                .unwrap()
                .fraction_exact,
            0.0
        );
        // direct evaluation oracle
        for r in [0.5, 1.0, 3.0] {
            let f = squeeze_fraction_strong(0.7, 0.2, r).unwrap();
            let direct = 0.49 * (2.0 * r as f64).exp() / (r + 0.2f64).sinh().powi(2);
            assert!((f.ratio_exact / direct - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn fraction_approaches_its_limit_monotonically(d0 in 0.1f64..3.0, r0 in 0.0f64..2.0, r in 0.0f64..4.0) {
            let r = r0 + 1.0 + r;
            let a = squeeze_fraction_strong(d0, r0, r).unwrap();
            let b = squeeze_fraction_strong(d0, r0, r + 0.1).unwrap();
            let da = (a.fraction_exact - a.fraction_strong).abs();
            let db = (b.fraction_exact - b.fraction_strong).abs();
            prop_assert!(db <= da + 1e-15);
        }

        #[test]
        fn c_equal_is_symmetric(n in 0usize..60, m in 0usize..60) {
            prop_assert!((c_equal(n, m) - c_equal(m, n)).norm() < 1e-14);
            prop_assert!(c_equal(n, m).norm_sqr() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn matching_on_the_diagonal_needs_no_squeezing() {
        let spec = KittenSpec::infinite(PI / 5.0, 3, 400);
        let opts = FitOptions::default();
        let target = fitted_displacement(&spec, &opts).unwrap();
        let m = squeeze_to_match(&spec, target, &opts).unwrap();
        assert_eq!(m.r_required, 0.0);
        assert!(m.excess_fraction >= 0.0 && m.excess_fraction < 0.1);
    }

    #[test]
    fn matching_goes_both_ways() {
        let opts = FitOptions::default();
        let src = KittenSpec::infinite(PI / 5.0, 3, 400);
        let up = fitted_displacement(&KittenSpec::infinite(PI / 5.0, 5, 400), &opts).unwrap();
        let down = fitted_displacement(&KittenSpec::infinite(PI / 5.0, 1, 400), &opts).unwrap();
        let a = squeeze_to_match(&src, up, &opts).unwrap();
        assert!(a.r_required > 0.0);
        assert!((a.fitted_displacement - up).abs() <= 1e-6);
        let b = squeeze_to_match(&src, down, &opts).unwrap();
        assert!(b.r_required < 0.0);
        assert!((b.fitted_displacement - down).abs() <= 1e-6);
    }
}
