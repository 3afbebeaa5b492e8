//! Self-check suite run by `thermwit verify`.
//!
//! Every check is deterministic for a fixed [`VerifyOptions`], so two runs produce
//! byte-identical reports.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::{
    bipartite_pure_robustness, concurrence_two_qubit, concurrence_vanishing_temperature,
    dicke_max_overlap_sq, dicke_relative_entropy, dicke_robustness, geometric_measure_als,
    ppt_min_eigenvalue, AlsConfig, BoundSource, Partition, RobustnessBound,
};
use crate::error::Result;
use crate::numerics::{hermitian_eigenvalues, log_sum_exp};
use crate::systems::{
    build_dimer_hamiltonian, build_stabilizer_hamiltonian, dicke_state, dimer_ground_state,
    dimer_spectrum, stabilizer_spectrum, toy_spectrum, DimerParams, Graph, Level, Spectrum,
    ToySpectrumParams,
};
use crate::thermal::{
    partition_function, partition_function_alpha_closed, partition_function_alpha_gamma,
    population, relative_entropy_ground_to_thermal, thermal_density_matrix, ThermalPoint,
};
use crate::witness::{
    default_grid, dimer_condition, evaluate_condition, flip_probability_from_temperature,
    noise_threshold, satisfying_intervals, stabilizer_t_trans, toy_t0, toy_talpha,
    transition_temperature, ContributorSpec, Transition,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Multiplier applied to the closed-form Dicke robustness; anything but 1 is a deliberate
    /// fault that the bound-chain check must catch.
    pub dicke_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            dicke_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {:<24} {}", c.name, c.detail)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

type Check = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn tp(kt: f64) -> ThermalPoint<f64> {
    ThermalPoint::new(kt).expect("positive temperature")
}

fn dimer(b: f64, j: f64) -> DimerParams<f64> {
    DimerParams::new(b, j).expect("valid dimer")
}

fn witness_t(b: f64) -> Result<Option<f64>> {
    let s = dimer_spectrum(&dimer(b, 1.0));
    Ok(transition_temperature(&s, &RobustnessBound::singlet())?.t_trans())
}

fn concurrence_t(b: f64) -> Result<Option<f64>> {
    concurrence_vanishing_temperature(&build_dimer_hamiltonian(&dimer(b, 1.0)), 1e-2, 1e2, 1e-12)
}

fn dimer_coincidence() -> Result<Check> {
    let closed = 4.0 / 3f64.ln();
    let (Some(w), Some(c)) = (witness_t(0.0)?, concurrence_t(0.0)?) else {
        return Ok((false, "transition not found".into()));
    };
    let ok = rel(w, closed) < 1e-6 && rel(w, c) < 1e-6;
    Ok((ok, format!("witness={w:.9} concurrence={c:.9} closed={closed:.9}")))
}

fn dimer_conservative() -> Result<Check> {
    let (Some(w), Some(c)) = (witness_t(1.0)?, concurrence_t(1.0)?) else {
        return Ok((false, "transition not found".into()));
    };
    Ok((c - w > 1e-3, format!("witness={w:.9} concurrence={c:.9}")))
}

fn dimer_phase_change() -> Result<Check> {
    let p = dimer(5.0, 1.0);
    let s = dimer_spectrum(&p);
    let ground = dimer_ground_state(&p);
    let ground_is_00 = ground.amplitude(0).norm() == 1.0;
    // |00⟩ is a product state, so R = 0 and the threshold is 1
    let r = RobustnessBound::exact(1.0, BoundSource::BipartitePureSchmidt)?;
    let grid = default_grid(&s);
    let ground_hits = satisfying_intervals(&s, &r, ContributorSpec::ground(), &grid)?;
    let singlet = s.level_index(-3.0).expect("singlet level");
    let singlet_hits = satisfying_intervals(
        &s,
        &RobustnessBound::singlet(),
        ContributorSpec::level(singlet),
        &grid,
    )?;
    let c = concurrence_two_qubit(&thermal_density_matrix(&build_dimer_hamiltonian(&p), &tp(1.0))?)?;
    let ok = ground_is_00 && ground_hits.is_empty() && singlet_hits.is_empty() && c > 0.0;
    Ok((
        ok,
        format!(
            "ground_00={ground_is_00} witness_intervals={} concurrence(kT=1)={c:.6}",
            ground_hits.len() + singlet_hits.len()
        ),
    ))
}

fn lemma_soundness(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut satisfied, mut exceptions, mut one_sided) = (0usize, 0usize, false);
    let mut draws = 0;
    while satisfied < 200 && draws < 100_000 {
        draws += 1;
        let j = rng.random_range(0.2..2.0);
        let b = rng.random_range(0.0..4.0 * j);
        let kt = rng.random_range(0.05..6.0) * j;
        let p = dimer(b, j);
        let cond = dimer_condition(b, j, kt);
        if !cond && !(b > 1.9 * j && b < 2.1 * j) {
            continue;
        }
        let rho = thermal_density_matrix(&build_dimer_hamiltonian(&p), &tp(kt))?;
        let c = concurrence_two_qubit(&rho)?;
        if cond {
            satisfied += 1;
            let pt = ppt_min_eigenvalue(&rho, &[2, 2], &[1])?;
            if !(c > 0.0 && pt < 0.0) {
                exceptions += 1;
            }
        } else if c > 0.0 {
            one_sided = true;
        }
    }
    Ok((
        satisfied >= 200 && exceptions == 0 && one_sided,
        format!("samples={satisfied} exceptions={exceptions} missed_entanglement_seen={one_sided}"),
    ))
}

fn dicke_bound_chain(opts: &VerifyOptions) -> Result<Check> {
    let mut worst = 0.0f64;
    let als = AlsConfig {
        seed: opts.seed,
        ..AlsConfig::default()
    };
    for n in [2u64, 4, 6, 8] {
        let k = n / 2;
        let one_plus_r = dicke_robustness::<f64>(n, k)?.one_plus_r() * opts.dicke_scale;
        let e_r = dicke_relative_entropy::<f64>(n, k)?;
        worst = worst.max(rel(one_plus_r, e_r.exp2()));
        let g = geometric_measure_als(&dicke_state::<f64>(n as usize, k as usize)?, &als)?;
        worst = worst.max((g.overlap_sq - 1.0 / one_plus_r).abs());
        worst = worst.max((g.overlap_sq - dicke_max_overlap_sq::<f64>(n, k)?).abs());
    }
    let two = dicke_robustness::<f64>(2, 1)?.one_plus_r() * opts.dicke_scale;
    let ratios: Vec<f64> = [4u64, 16, 64, 256, 1024]
        .iter()
        .map(|&n| dicke_robustness::<f64>(n, n / 2).map(|r| r.one_plus_r() / (n as f64).sqrt()))
        .collect::<Result<_>>()?;
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]) && ratios.iter().all(|&r| r > 1.0);
    Ok((
        worst < 1e-6 && two == 2.0 && decreasing,
        format!("max_deviation={worst:.3e} n2={two} ratio_1024={:.6}", ratios[4]),
    ))
}

/// Σ_{m<D} e^{−m x} in closed form.
fn geometric_sum(levels: u64, x: f64) -> f64 {
    -(-(levels as f64) * x).exp_m1() / -(-x).exp_m1()
}

fn toy_closed_forms() -> Result<Check> {
    let s = toy_spectrum(&ToySpectrumParams::new(0.0, 1.0, 0.0, 4)?);
    let bisected = transition_temperature(&s, &RobustnessBound::singlet())?
        .t_trans()
        .unwrap_or(f64::NAN);
    let closed = toy_t0(4, 1.0, 1.0)?;
    let t0_ok = rel(bisected, closed) < 1e-6;

    let mut ordering = true;
    for i in 0..20 {
        let alpha = 0.05 + 0.95 * i as f64 / 19.0;
        for j in 0..20 {
            let t = tp(0.1 * 1.3f64.powi(j));
            let z0 = partition_function_alpha_closed(&ToySpectrumParams::new(0.0, 1.0, 0.0, 64)?, &t);
            let za = partition_function_alpha_closed(&ToySpectrumParams::new(0.0, 1.0, alpha, 64)?, &t);
            ordering &= z0.ln() >= za.ln();
        }
    }

    // the integral form drops the +1/2 of the Euler–Maclaurin expansion, so its relative
    // error is about Δ/2kT
    let p = ToySpectrumParams::new(0.0, 1.0, 1.0, 1_000_000)?;
    let mut worst = 0.0f64;
    for kt in [10.0, 20.0, 50.0, 100.0] {
        let exact = geometric_sum(p.levels, 1.0 / kt);
        let approx = partition_function_alpha_gamma(&p, &tp(kt))?.value();
        worst = worst.max(rel(approx, exact));
    }
    Ok((
        t0_ok && ordering && worst < 0.06,
        format!(
            "t0_bisect={bisected:.9} t0_closed={closed:.9} z_ordering={ordering} gamma_err(kT>=10)={worst:.4}"
        ),
    ))
}

fn stabilizer_numbers() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut degeneracies = true;
    for n in 2..=6usize {
        for g in [Graph::path(n), Graph::ring(n), Graph::star(n), Graph::complete(n)] {
            let h = build_stabilizer_hamiltonian(&g, 1.0)?;
            let numeric = Spectrum::from_eigenvalues(&hermitian_eigenvalues(&h)?)?;
            let analytic = stabilizer_spectrum(n as u64, 1.0f64)?;
            degeneracies &= numeric.degeneracies() == analytic.degeneracies();
            for (a, b) in numeric.energies().iter().zip(analytic.energies()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let t = stabilizer_t_trans(8, 1.0f64, 4.0)?;
    let closed = -2.0 / (2f64.sqrt() - 1.0).ln();
    let p = noise_threshold(4.0f64, 8)?;
    let flip = flip_probability_from_temperature(1.0f64, &tp(t));
    let target = 1.0 - 0.5f64.sqrt();
    let bisected = transition_temperature(
        &stabilizer_spectrum(8, 1.0)?,
        &RobustnessBound::lower_bound(16.0, BoundSource::RelativeEntropyInput)?,
    )?
    .t_trans()
    .unwrap_or(f64::NAN);
    let ok = worst < 1e-9
        && degeneracies
        && rel(t, closed) < 1e-6
        && rel(bisected, t) < 1e-6
        && (p - target).abs() < 1e-12
        && (flip - target).abs() < 1e-12;
    Ok((
        ok,
        format!("max_eig_err={worst:.2e} t_trans={t:.9} bisected={bisected:.9} p_trans={p:.12}"),
    ))
}

fn random_spectrum(rng: &mut ChaCha8Rng) -> Result<Spectrum<f64>> {
    let count = rng.random_range(2..12);
    let mut energies: Vec<f64> = (0..count).map(|_| rng.random_range(-5.0..5.0)).collect();
    energies.sort_by(f64::total_cmp);
    energies.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut levels = vec![Level::new(energies[0], 1)];
    levels.extend(energies[1..].iter().map(|&e| Level::new(e, rng.random_range(1..6))));
    Spectrum::new(levels)
}

fn statistical_identity(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = random_spectrum(&mut rng)?;
        for j in 0..20 {
            let t = tp(0.05 * 1.4f64.powi(j));
            let d = relative_entropy_ground_to_thermal(&s, &t)?;
            let p0 = population(&s, &t, 0)?;
            // independent route: direct Boltzmann sum without the ground shift
            let ln_z = log_sum_exp(s.levels().iter().map(|l| l.ln_degeneracy - l.energy / t.kt()));
            let direct = -((-s.ground_energy() / t.kt() - ln_z) / std::f64::consts::LN_2);
            worst = worst.max((d + p0.log2()).abs()).max((d - direct).abs());
            debug_assert!(partition_function(&s, &t).ln().is_finite());
        }
    }
    Ok((worst < 1e-12, format!("max_deviation={worst:.3e}")))
}

fn dicke_ordering() -> Result<Check> {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [4usize, 6, 8] {
        let s = toy_spectrum(&ToySpectrumParams::new(0.0, 1.0, 1.0, 1 << n)?);
        let full = dicke_robustness::<f64>(n as u64, n as u64 / 2)?;
        let psi = dicke_state::<f64>(n, n / 2)?;
        let bi = bipartite_pure_robustness(&psi, &Partition::half_cut(n)?)?;
        let tf = transition_temperature(&s, &full)?.t_trans().unwrap_or(f64::NAN);
        let tb = transition_temperature(&s, &bi)?.t_trans().unwrap_or(f64::NAN);
        ok &= tb <= tf * (1.0 + 1e-9);
        detail.push(format!("n{n}:{tb:.6}<={tf:.6}"));
    }
    Ok((ok, detail.join(" ")))
}

fn finite_size_trends() -> Result<Check> {
    let t0: Vec<f64> = [4u64, 16, 256, 65_536, 1 << 32]
        .iter()
        .map(|&d| toy_t0(d, 1.0f64, 1.0))
        .collect::<Result<_>>()?;
    let mut ok = t0.windows(2).all(|w| w[1] < w[0]);
    for alpha in [0.25, 0.5, 1.0] {
        let ts: Vec<f64> = [2u64, 4, 8, 16, 64, 256]
            .iter()
            .map(|&n| toy_talpha(alpha, n, 1.0))
            .collect::<Result<_>>()?;
        ok &= ts.windows(2).all(|w| w[1] > w[0]);
    }
    Ok((ok, format!("t0(D=2^32)={:.6}", t0[4])))
}

fn witness_verdicts() -> Result<Check> {
    let s = dimer_spectrum(&dimer(0.0, 1.0));
    let r = RobustnessBound::singlet();
    let at3 = evaluate_condition(&s, &tp(3.0), &r, ContributorSpec::ground())?.satisfied;
    let at4 = evaluate_condition(&s, &tp(4.0), &r, ContributorSpec::ground())?.satisfied;
    let strong = transition_temperature(
        &dimer_spectrum(&dimer(5.0, 1.0)),
        &RobustnessBound::exact(1.0, BoundSource::BipartitePureSchmidt)?,
    )?;
    let ok = at3 && !at4 && strong.outcome == Transition::NotDetected;
    Ok((ok, format!("kT3={at3} kT4={at4} strong_field={:?}", strong.outcome)))
}

/// Runs every check; numeric errors are reported as failures rather than aborting the suite.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let checks: Vec<(&'static str, Box<dyn Fn() -> Result<Check>>)> = vec![
        ("dimer_coincidence", Box::new(dimer_coincidence)),
        ("dimer_conservative", Box::new(dimer_conservative)),
        ("dimer_phase_change", Box::new(dimer_phase_change)),
        ("witness_verdicts", Box::new(witness_verdicts)),
        ("lemma_soundness", Box::new(move || lemma_soundness(opts.seed))),
        ("dicke_bound_chain", Box::new(move || dicke_bound_chain(opts))),
        ("toy_closed_forms", Box::new(toy_closed_forms)),
        ("stabilizer_numbers", Box::new(stabilizer_numbers)),
        ("statistical_identity", Box::new(move || statistical_identity(opts.seed))),
        ("dicke_ordering", Box::new(dicke_ordering)),
        ("finite_size_trends", Box::new(finite_size_trends)),
    ];
    VerifyReport {
        checks: checks
            .into_iter()
            .map(|(name, f)| match f() {
                Ok((passed, detail)) => CheckResult { name, passed, detail },
                Err(e) => CheckResult {
                    name,
                    passed: false,
                    detail: format!("error: {e}"),
                },
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_and_is_deterministic() {
        let a = run(&VerifyOptions::default());
        assert!(a.all_passed(), "{a}");
        let b = run(&VerifyOptions::default());
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn perturbed_dicke_formula_is_caught() {
        let report = run(&VerifyOptions {
            dicke_scale: 1.01,
            ..VerifyOptions::default()
        });
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert_eq!(failed, ["dicke_bound_chain"]);
    }

    #[test]
    fn geometric_sum_oracle() {
        let brute: f64 = (0..1000).map(|m| (-(m as f64) * 0.3).exp()).sum();
        assert!((geometric_sum(1000, 0.3) - brute).abs() < 1e-12);
    }
}
