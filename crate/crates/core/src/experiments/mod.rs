//! Experiment runners behind the `dipne-sim` command.
//!
//! Each runner takes a flat [`Config`], checks it against the experiment's
//! keys and returns a [`ResultTable`] whose rows are sorted by the sweep
//! keys, so parallel evaluation never changes the output bytes.

pub mod config;
pub mod table;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

pub use config::{Config, Params};
pub use table::{Cell, ResultTable};

use crate::analytics::{
    c_equal, c_equal_bruteforce, fitted_displacement, interference_loss_theory,
    squeeze_fraction_strong, squeeze_to_match,
};
use crate::catfit::{displacement_axis, fit_kitten, FitOptions, PhotonAccounting};
use crate::circuits::{displace, phase_to_dide, squeeze_op, GadgetSpec};
use crate::error::{Error, Result};
use crate::fock::{tensor, FockState, ModeLayout};
use crate::gaussian::{compare_with_fock, enumerate_circuits, EnumeratorBounds};
use crate::kitten::{kitten_direct, kitten_probability, peak_estimate, KittenSpec, Squeezing};
use crate::measurement::{joint_number_distribution, l_intf_detailed};
use crate::states::{coherent, Squeeze};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Interference,
    Kitten,
    Catfit,
    Numberdiff,
    Match,
    Gaussdrive,
    OracleCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Interference,
        Self::Kitten,
        Self::Catfit,
        Self::Numberdiff,
        Self::Match,
        Self::Gaussdrive,
        Self::OracleCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Interference => "interference",
            Self::Kitten => "kitten",
            Self::Catfit => "catfit",
            Self::Numberdiff => "numberdiff",
            Self::Match => "match",
            Self::Gaussdrive => "gaussdrive",
            Self::OracleCheck => "oracle-check",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
                Error::Config(format!(
                    "unknown experiment '{name}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }

    /// Accepted keys with their defaults; an empty default means optional.
    pub fn keys(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            Self::Interference => &[
                ("theta_split", "pi/5"),
                ("theta_recomb", "pi/10"),
                ("phase", "0"),
                (
                    "families",
                    "vacuum,photon0,photon-both,photon-both+squeeze-i",
                ),
                ("fractions", "0:1:11"),
                ("total_photons", "1"),
                ("cutoff", "30"),
            ],
            Self::Kitten => &[
                ("squeeze_photons", "1:20:20"),
                ("ks", "0..9"),
                ("theta_sub", "pi/5"),
                ("squeeze_theta", "0"),
                ("cutoff", "1000"),
                ("infinite", "false"),
                ("fit", "true"),
                ("accounting", "component"),
            ],
            Self::Catfit => &[
                ("ks", "1"),
                ("squeeze_photons", "10"),
                ("theta_sub", "pi/5"),
                ("cutoff", "1000"),
                ("accounting", "component"),
                ("grid", "64"),
                ("tolerance", "1e-6"),
            ],
            Self::Numberdiff => &[
                ("k", "1"),
                ("squeeze_photons", "10"),
                ("theta_sub", "pi/5"),
                ("cutoff", "100"),
                ("lo_rule", "sqrt_plus_2"),
                ("view", "joint"),
            ],
            Self::Match => &[
                ("source_ks", "1,3,5,7,9"),
                ("target_ks", "1,3,5,7,9"),
                ("theta_sub", "pi/5"),
                ("cutoff", "400"),
                ("accounting", "component"),
            ],
            Self::Gaussdrive => &[("d0", "1"), ("r0_photons", ""), ("r0", ""), ("r", "0:5:51")],
            Self::OracleCheck => &[
                ("seed", "1"),
                ("circuits", "100"),
                ("cutoff", "60"),
                ("max_modes", "3"),
                ("max_elements", "6"),
                ("max_r", "0.5"),
                ("max_alpha", "2"),
                ("max_mode_photons", "6"),
                ("max_mode_variance", "3.32"),
                ("photon_tolerance", "1e-6"),
                ("quadrature_tolerance", "1e-8"),
                ("cequal_max", "8"),
                ("cequal_tolerance", "1e-9"),
            ],
        }
    }
}

/// A finished run. `tolerance_breach` is only ever set by `oracle-check`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub table: ResultTable,
    pub tolerance_breach: bool,
}

pub fn run(experiment: Experiment, cfg: &Config) -> Result<ExperimentOutput> {
    let params = Params::resolve(cfg, experiment.keys())?;
    let mut breach = false;
    let mut table = match experiment {
        Experiment::Interference => run_interference(&params)?,
        Experiment::Kitten => run_kitten(&params)?,
        Experiment::Catfit => run_catfit(&params)?,
        Experiment::Numberdiff => run_numberdiff(&params)?,
        Experiment::Match => run_match(&params)?,
        Experiment::Gaussdrive => run_gaussdrive(&params)?,
        Experiment::OracleCheck => {
            let (t, b) = run_oracle_check(&params)?;
            breach = b;
            t
        }
    };
    let mut head = vec![
        ("experiment".to_string(), experiment.name().to_string()),
        ("version".to_string(), crate::VERSION.to_string()),
    ];
    head.extend(
        params
            .echo()
            .map(|(k, v)| (format!("config.{k}"), v.to_string())),
    );
    head.append(&mut table.metadata);
    table.metadata = head;
    Ok(ExperimentOutput {
        table,
        tolerance_breach: breach,
    })
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn accounting(p: &Params) -> Result<PhotonAccounting> {
    PhotonAccounting::parse(p.str("accounting")?).map_err(|e| Error::Config(e.to_string()))
}

fn positive_cutoff(p: &Params) -> Result<usize> {
    let c = p.usize("cutoff")?;
    if c == 0 {
        return Err(Error::Config("cutoff must be positive".into()));
    }
    Ok(c)
}

/// Parse a squeezing list entry: photons or `inf`.
fn squeezing_of(x: f64) -> Result<Squeezing> {
    if x == f64::INFINITY {
        Ok(Squeezing::Infinite)
    } else if x >= 0.0 {
        Ok(Squeezing::Photons(x))
    } else {
        Err(Error::Config(format!(
            "squeeze_photons must be non-negative or inf, got {x}"
        )))
    }
}

// ---------------------------------------------------------------- interference

const FAMILIES: [&str; 4] = ["vacuum", "photon0", "photon-both", "photon-both+squeeze-i"];

/// Zero-displacement cores of the two inputs for a named family.
fn family_cores(family: &str, cutoff: usize) -> Result<(FockState, FockState)> {
    let layout = ModeLayout::single(cutoff);
    let vac = FockState::vacuum(layout.clone());
    let one = FockState::basis(layout, &[1.min(cutoff)])?;
    match family {
        "vacuum" => Ok((vac.clone(), vac)),
        "photon0" => Ok((one, vac)),
        "photon-both" => Ok((one.clone(), one)),
        "photon-both+squeeze-i" => {
            let sq = squeeze_op(&one, 0, Squeeze::from_photons(1.0, FRAC_PI_2)?)?;
            Ok((one, sq))
        }
        other => Err(Error::Config(format!(
            "unknown input family '{other}' (valid: {})",
            FAMILIES.join(", ")
        ))),
    }
}

fn run_interference(p: &Params) -> Result<ResultTable> {
    let ts = p.f64("theta_split")?;
    let ti = p.f64("theta_recomb")?;
    let phase = p.f64("phase")?;
    let pi_shift = if phase.abs() < 1e-12 {
        false
    } else if (phase - PI).abs() < 1e-12 {
        true
    } else {
        return Err(Error::Config(format!("phase must be 0 or pi, got {phase}")));
    };
    let spec = GadgetSpec::new(ts, ti, pi_shift).map_err(|e| Error::Config(e.to_string()))?;
    let families = p.str_list("families")?;
    for f in &families {
        if !FAMILIES.contains(&f.as_str()) {
            return Err(Error::Config(format!(
                "unknown input family '{f}' (valid: {})",
                FAMILIES.join(", ")
            )));
        }
    }
    let mut fractions = p.f64_list("fractions")?;
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::Config("fractions must lie in [0, 1]".into()));
    }
    fractions.sort_by(f64::total_cmp);
    let total = p.f64("total_photons")?;
    if !(total >= 0.0) {
        return Err(Error::Config("total_photons must be non-negative".into()));
    }
    let cutoff = positive_cutoff(p)?;

    let jobs: Vec<(usize, f64)> = (0..families.len())
        .flat_map(|i| fractions.iter().map(move |&f| (i, f)))
        .collect();
    let rows: Vec<Result<(Vec<Cell>, f64)>> = jobs
        .par_iter()
        .map(|&(fi, f)| {
            let (c0, c1) = family_cores(&families[fi], cutoff)?;
            let a0 = Complex64::new((f * total).sqrt(), 0.0);
            let a1 = Complex64::new(((1.0 - f) * total).sqrt(), 0.0);
            let in0 = displace(&c0, 0, a0)?;
            let in1 = displace(&c1, 0, a1)?;
            let leak_in = in0.truncation_diagnostic().max(in1.truncation_diagnostic());
            let sim = l_intf_detailed(&in0, &in1, &spec)?;
            let theory = interference_loss_theory(a0, a1, ts, ti, pi_shift)?;
            let leak = sim.leakage.max(leak_in);
            Ok((
                vec![
                    Cell::from(families[fi].as_str()),
                    Cell::from(f),
                    Cell::from(sim.value),
                    Cell::from(theory),
                    Cell::from((sim.value - theory).abs()),
                    Cell::from(leak),
                ],
                leak,
            ))
        })
        .collect();
    let mut t = ResultTable::new(
        "interference",
        &[
            "family",
            "fraction",
            "L_intf_sim",
            "L_intf_theory",
            "abs_error",
            "leakage",
        ],
    );
    let mut leak = 0.0f64;
    for r in rows {
        let (row, l) = r?;
        leak = leak.max(l);
        t.push(row);
    }
    t.meta("cutoffs", format!("{cutoff} per mode, 4 modes"));
    t.meta("max_abs_error", max_of(t.values("abs_error")));
    t.meta("max_leakage", leak);
    t.plot = Some((
        "fraction".into(),
        vec!["L_intf_theory".into(), "L_intf_sim".into()],
    ));
    Ok(t)
}

// ---------------------------------------------------------------- kitten

fn run_kitten(p: &Params) -> Result<ResultTable> {
    let mut squeezings: Vec<f64> = p.f64_list("squeeze_photons")?;
    if p.bool("infinite")? {
        squeezings.push(f64::INFINITY);
    }
    squeezings.sort_by(f64::total_cmp);
    squeezings.dedup();
    let mut ks = p.usize_list("ks")?;
    ks.sort_unstable();
    ks.dedup();
    let mut thetas = p.f64_list("theta_sub")?;
    thetas.sort_by(f64::total_cmp);
    let squeeze_theta = p.f64("squeeze_theta")?;
    let cutoff = positive_cutoff(p)?;
    let fit = p.bool("fit")?;
    let opts = FitOptions {
        accounting: accounting(p)?,
        ..FitOptions::default()
    };

    let mut jobs = Vec::new();
    for &th in &thetas {
        for &s in &squeezings {
            let sq = squeezing_of(s)?;
            for &k in &ks {
                if sq == Squeezing::Infinite && k == 0 {
                    continue;
                }
                let mut spec = match sq {
                    Squeezing::Photons(x) => KittenSpec::finite(x, th, k, cutoff),
                    Squeezing::Infinite => KittenSpec::infinite(th, k, cutoff),
                };
                spec.squeeze_theta = squeeze_theta;
                spec.validate().map_err(|e| Error::Config(e.to_string()))?;
                jobs.push(spec);
            }
        }
    }
    let rows: Vec<Result<(Vec<Cell>, f64)>> = jobs
        .par_iter()
        .map(|spec| kitten_row(spec, fit, &opts))
        .collect();
    let mut t = ResultTable::new(
        "kitten",
        &[
            "theta_sub",
            "squeeze_photons",
            "k",
            "probability",
            "mean_n",
            "infidelity_sqcat",
            "infidelity_plaincat",
            "squeeze_fraction",
            "peak_estimate",
            "tail_mass",
        ],
    );
    let mut leak = 0.0f64;
    for r in rows {
        let (row, l) = r?;
        leak = leak.max(l);
        t.push(row);
    }
    t.meta("cutoffs", cutoff);
    t.meta("photon_accounting", opts.accounting.as_str());
    if squeezings.contains(&f64::INFINITY) && ks.contains(&0) {
        t.meta(
            "note",
            "k = 0 has no normalizable infinite-squeezing limit and is omitted there",
        );
    }
    t.meta("max_leakage", leak);
    t.plot = Some((
        "squeeze_photons".into(),
        vec!["infidelity_sqcat".into(), "infidelity_plaincat".into()],
    ));
    Ok(t)
}

fn kitten_row(spec: &KittenSpec, fit: bool, opts: &FitOptions) -> Result<(Vec<Cell>, f64)> {
    let squeeze_cell = match spec.squeezing {
        Squeezing::Photons(x) => Cell::from(x),
        Squeezing::Infinite => Cell::from("inf"),
    };
    let peak = Cell::from(peak_estimate(spec.k, spec.theta_sub)?);
    let head = vec![Cell::from(spec.theta_sub), squeeze_cell, Cell::from(spec.k)];
    if let Squeezing::Photons(_) = spec.squeezing {
        let prob = kitten_probability(spec)?;
        if prob == 0.0 {
            let mut row = head;
            row.extend([
                Cell::from(0.0),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                peak,
                Cell::Empty,
            ]);
            return Ok((row, 0.0));
        }
    }
    let kitten = kitten_direct(spec)?;
    let (sq, plain, frac) = if fit && kitten.mean_photons > 1e-12 {
        let f = fit_kitten(&kitten, opts)?;
        (
            Cell::from(f.infidelity),
            Cell::from(1.0 - f.plain_cat_fidelity),
            Cell::from(f.squeeze_fraction),
        )
    } else {
        (Cell::Empty, Cell::Empty, Cell::Empty)
    };
    let mut row = head;
    row.extend([
        Cell::from(kitten.probability),
        Cell::from(kitten.mean_photons),
        sq,
        plain,
        frac,
        peak,
        Cell::from(kitten.tail_mass),
    ]);
    Ok((row, kitten.tail_mass))
}

// ---------------------------------------------------------------- catfit

fn run_catfit(p: &Params) -> Result<ResultTable> {
    let mut ks = p.usize_list("ks")?;
    ks.sort_unstable();
    ks.dedup();
    let sq = squeezing_of(p.f64("squeeze_photons")?)?;
    let theta = p.f64("theta_sub")?;
    let cutoff = positive_cutoff(p)?;
    let grid = p.usize("grid")?;
    let tolerance = p.f64("tolerance")?;
    if grid < 2 || !(tolerance > 0.0) {
        return Err(Error::Config(
            "grid must be at least 2 and tolerance positive".into(),
        ));
    }
    let opts = FitOptions {
        accounting: accounting(p)?,
        grid_points: grid,
        tolerance,
    };
    let rows: Vec<Result<(Vec<Cell>, f64)>> = ks
        .par_iter()
        .map(|&k| {
            let spec = match sq {
                Squeezing::Photons(x) => KittenSpec::finite(x, theta, k, cutoff),
                Squeezing::Infinite => KittenSpec::infinite(theta, k, cutoff),
            };
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
            let kitten = kitten_direct(&spec)?;
            let f = fit_kitten(&kitten, &opts)?;
            Ok((
                vec![
                    Cell::from(k),
                    Cell::from(f.mean_photons),
                    Cell::from(f.fidelity),
                    Cell::from(f.infidelity),
                    Cell::from(f.squeeze_fraction),
                    Cell::from(f.alpha),
                    Cell::from(f.r),
                    Cell::from(f.phi),
                    Cell::from(f.plain_cat_fidelity),
                    Cell::from(f.axis),
                    Cell::from(f.squeeze_theta),
                ],
                kitten.tail_mass,
            ))
        })
        .collect();
    let mut t = ResultTable::new(
        "catfit",
        &[
            "k",
            "mean_n",
            "fidelity",
            "infidelity",
            "squeeze_fraction",
            "alpha",
            "r",
            "phi",
            "plain_cat_fidelity",
            "axis",
            "squeeze_theta",
        ],
    );
    let mut leak = 0.0f64;
    for r in rows {
        let (row, l) = r?;
        leak = leak.max(l);
        t.push(row);
    }
    t.meta("cutoffs", cutoff);
    t.meta("photon_accounting", opts.accounting.as_str());
    t.meta("max_leakage", leak);
    t.plot = Some(("k".into(), vec!["infidelity".into()]));
    Ok(t)
}

// ---------------------------------------------------------------- numberdiff

/// Local-oscillator amplitude for a kitten with `n` mean photons.
pub fn lo_amplitude(rule: &str, n: f64) -> Result<f64> {
    match rule {
        "sqrt_plus_2" => Ok(n.sqrt() + 2.0),
        "sqrt_of_plus_2" => Ok((n + 2.0).sqrt()),
        other => Err(Error::Config(format!(
            "unknown lo_rule '{other}' (expected sqrt_plus_2 or sqrt_of_plus_2)"
        ))),
    }
}

fn run_numberdiff(p: &Params) -> Result<ResultTable> {
    let k = p.usize("k")?;
    let s = p.f64("squeeze_photons")?;
    let theta = p.f64("theta_sub")?;
    let cutoff = positive_cutoff(p)?;
    let rule = p.str("lo_rule")?;
    lo_amplitude(rule, 0.0)?;
    let view = p.str("view")?;
    if view != "joint" && view != "difference" {
        return Err(Error::Config(format!(
            "view must be joint or difference, got '{view}'"
        )));
    }
    let spec = KittenSpec::finite(s, theta, k, cutoff);
    spec.validate().map_err(|e| Error::Config(e.to_string()))?;
    let kitten = kitten_direct(&spec)?;
    let beta = lo_amplitude(rule, kitten.mean_photons)?;
    // LO a quarter turn from the kitten's displacement axis, so the two cat
    // components leave through opposite ports
    let axis = displacement_axis(&kitten.state)?;
    let lo = coherent(Complex64::from_polar(beta, axis + FRAC_PI_2), cutoff)?;
    let out = phase_to_dide(&tensor(&kitten.state, &lo)?, 0, 1)?;
    let dist = joint_number_distribution(&out, &[0, 1])?;
    let leakage = kitten.tail_mass + lo.leakage() + out.leakage();
    let p_equal: f64 = (0..=cutoff).map(|n| dist.get(&[n, n])).sum();

    let mut t = if view == "joint" {
        let mut t = ResultTable::new("numberdiff", &["n0", "n1", "probability"]);
        for (counts, prob) in dist.iter() {
            t.push(vec![
                Cell::from(counts[0]),
                Cell::from(counts[1]),
                Cell::from(prob),
            ]);
        }
        t
    } else {
        let c = cutoff as i64;
        let mut marginal = vec![0.0; 2 * cutoff + 1];
        for (counts, prob) in dist.iter() {
            marginal[(counts[0] as i64 - counts[1] as i64 + c) as usize] += prob;
        }
        let mut t = ResultTable::new("numberdiff", &["n0_minus_n1", "probability"]);
        for (i, prob) in marginal.iter().enumerate() {
            t.push(vec![Cell::from(i as i64 - c), Cell::from(*prob)]);
        }
        t.plot = Some(("n0_minus_n1".into(), vec!["probability".into()]));
        t
    };
    t.meta("cutoffs", format!("{cutoff} per mode, 2 modes"));
    t.meta("kitten_mean_photons", kitten.mean_photons);
    t.meta("lo_amplitude", beta);
    t.meta("p_equal", p_equal);
    t.meta("total_probability", dist.total());
    t.meta("max_leakage", leakage);
    Ok(t)
}

// ---------------------------------------------------------------- match

fn run_match(p: &Params) -> Result<ResultTable> {
    let mut sources = p.usize_list("source_ks")?;
    let mut targets = p.usize_list("target_ks")?;
    sources.sort_unstable();
    sources.dedup();
    targets.sort_unstable();
    targets.dedup();
    if sources.contains(&0) || targets.contains(&0) {
        return Err(Error::Config(
            "infinite-squeezing kittens need k ≥ 1".into(),
        ));
    }
    let theta = p.f64("theta_sub")?;
    let cutoff = positive_cutoff(p)?;
    let opts = FitOptions {
        accounting: accounting(p)?,
        ..FitOptions::default()
    };
    let spec = |k: usize| {
        let s = KittenSpec::infinite(theta, k, cutoff);
        s.validate()
            .map_err(|e| Error::Config(e.to_string()))
            .map(|_| s)
    };
    let target_alpha: Vec<f64> = targets
        .par_iter()
        .map(|&k| fitted_displacement(&spec(k)?, &opts))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = sources
        .iter()
        .flat_map(|&s| (0..targets.len()).map(move |j| (s, j)))
        .collect();
    let rows: Vec<Result<(Vec<Cell>, f64)>> = jobs
        .par_iter()
        .map(|&(ks, j)| {
            let m = squeeze_to_match(&spec(ks)?, target_alpha[j], &opts)?;
            Ok((
                vec![
                    Cell::from(ks),
                    Cell::from(targets[j]),
                    Cell::from(target_alpha[j]),
                    Cell::from(m.r_required),
                    Cell::from(m.excess_fraction),
                    Cell::from(m.mean_photons),
                    Cell::from(m.leakage),
                ],
                m.leakage,
            ))
        })
        .collect();
    let mut t = ResultTable::new(
        "match",
        &[
            "k_source",
            "k_target",
            "target_displacement",
            "r_required",
            "excess_fraction",
            "mean_n",
            "leakage",
        ],
    );
    let mut leak = 0.0f64;
    for r in rows {
        let (row, l) = r?;
        leak = leak.max(l);
        t.push(row);
    }
    t.meta("cutoffs", cutoff);
    t.meta("photon_accounting", opts.accounting.as_str());
    t.meta("max_excess_fraction", max_of(t.values("excess_fraction")));
    t.meta("max_leakage", leak);
    t.plot = Some(("k_target".into(), vec!["excess_fraction".into()]));
    Ok(t)
}

// ---------------------------------------------------------------- gaussdrive

fn run_gaussdrive(p: &Params) -> Result<ResultTable> {
    let d0s = p.f64_list("d0")?;
    if p.has("r0") && p.has("r0_photons") {
        return Err(Error::Config(
            "give either r0 or r0_photons, not both".into(),
        ));
    }
    let r0s: Vec<f64> = if p.has("r0") {
        p.f64_list("r0")?
    } else {
        let photons = if p.has("r0_photons") {
            p.f64_list("r0_photons")?
        } else {
            vec![0.1]
        };
        photons
            .into_iter()
            .map(|n| {
                if n >= 0.0 {
                    Ok(n.sqrt().asinh())
                } else {
                    Err(Error::Config(format!(
                        "r0_photons must be non-negative, got {n}"
                    )))
                }
            })
            .collect::<Result<_>>()?
    };
    let mut rs = p.f64_list("r")?;
    rs.sort_by(f64::total_cmp);
    let mut t = ResultTable::new(
        "gaussdrive",
        &[
            "d0",
            "r0",
            "r",
            "fraction_exact",
            "fraction_strong_limit",
            "ratio_exact",
            "ratio_strong_limit",
        ],
    );
    for &d0 in &d0s {
        for &r0 in &r0s {
            for &r in &rs {
                let f =
                    squeeze_fraction_strong(d0, r0, r).map_err(|e| Error::Config(e.to_string()))?;
                t.push(vec![
                    Cell::from(d0),
                    Cell::from(r0),
                    Cell::from(r),
                    Cell::from(f.fraction_exact),
                    Cell::from(f.fraction_strong),
                    Cell::from(f.ratio_exact),
                    Cell::from(f.ratio_strong),
                ]);
            }
        }
    }
    t.meta("cutoffs", "none (closed form)");
    t.meta("max_leakage", 0.0);
    t.plot = Some((
        "r".into(),
        vec!["fraction_exact".into(), "fraction_strong_limit".into()],
    ));
    Ok(t)
}

// ---------------------------------------------------------------- oracle-check

fn run_oracle_check(p: &Params) -> Result<(ResultTable, bool)> {
    let bounds = EnumeratorBounds {
        max_modes: p.usize("max_modes")?,
        max_elements: p.usize("max_elements")?,
        max_r: p.f64("max_r")?,
        max_alpha: p.f64("max_alpha")?,
        max_mode_photons: p.f64("max_mode_photons")?,
        max_mode_variance: p.f64("max_mode_variance")?,
    };
    if bounds.max_modes == 0 {
        return Err(Error::Config("max_modes must be positive".into()));
    }
    let seed = p.u64("seed")?;
    let count = p.usize("circuits")?;
    let cutoff = positive_cutoff(p)?;
    let (ptol, qtol) = (p.f64("photon_tolerance")?, p.f64("quadrature_tolerance")?);
    let circuits = enumerate_circuits(seed, count, &bounds);
    let rows: Vec<Result<Vec<Cell>>> = circuits
        .par_iter()
        .enumerate()
        .map(|(id, c)| {
            let r = compare_with_fock(c, cutoff)?;
            Ok(vec![
                Cell::from(id),
                Cell::from(c.modes),
                Cell::from(c.elements.len()),
                Cell::from(r.max_photon_error),
                Cell::from(r.max_quadrature_error),
                Cell::from(r.leakage),
            ])
        })
        .collect();
    let mut t = ResultTable::new(
        "oracle-check",
        &[
            "circuit_id",
            "modes",
            "elements",
            "max_meanphoton_error",
            "max_quadrature_error",
            "leakage",
        ],
    );
    for r in rows {
        t.push(r?);
    }
    let photon_err = max_of(t.values("max_meanphoton_error"));
    let quad_err = max_of(t.values("max_quadrature_error"));

    let nmax = p
        .usize("cequal_max")?
        .min(crate::analytics::BRUTEFORCE_MAX_PHOTONS / 2);
    let ctol = p.f64("cequal_tolerance")?;
    let mut c_dev = 0.0f64;
    let mut odd_nonzero = 0usize;
    for n in 0..=nmax {
        for m in 0..=nmax {
            let closed = c_equal(n, m);
            c_dev = c_dev.max((closed - c_equal_bruteforce(n, m)?).norm());
            if n % 2 == 1 && m % 2 == 1 && closed.norm() != 0.0 {
                odd_nonzero += 1;
            }
        }
    }
    let breach = photon_err > ptol || quad_err > qtol || c_dev > ctol || odd_nonzero > 0;
    t.meta("cutoffs", format!("{cutoff} per mode"));
    t.meta("max_meanphoton_error", photon_err);
    t.meta("max_quadrature_error", quad_err);
    t.meta("c_equal_max_deviation", c_dev);
    t.meta("c_equal_odd_odd_nonzero", odd_nonzero);
    t.meta("status", if breach { "FAIL" } else { "PASS" });
    t.meta("max_leakage", max_of(t.values("leakage")));
    t.plot = Some(("circuit_id".into(), vec!["max_meanphoton_error".into()]));
    Ok((t, breach))
}
