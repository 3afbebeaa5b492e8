use thermwit::entanglement::{
    bipartite_pure_robustness, concurrence_two_qubit, concurrence_vanishing_temperature,
    dicke_max_overlap_sq, dicke_relative_entropy, dicke_robustness, geometric_measure_als,
    ppt_min_eigenvalue, AlsConfig, BoundSource, Partition, RobustnessBound,
};
use thermwit::numerics::hermitian_eigenvalues;
use thermwit::systems::{
    build_dimer_hamiltonian, build_stabilizer_hamiltonian, dicke_state, dimer_spectrum,
    graph_state, stabilizer_spectrum, toy_spectrum, DimerParams, Graph, Spectrum,
    ToySpectrumParams, MAX_EXPLICIT_SITES,
};
use thermwit::thermal::{
    partition_function, partition_function_alpha_closed, partition_function_alpha_gamma,
    population, stabilizer_partition_function, thermal_density_matrix, ThermalPoint,
};
use thermwit::witness::{
    flip_probability_from_temperature, gapping_rule_min_gap, noise_threshold, stabilizer_t_trans,
    toy_t0, toy_t1, toy_talpha, transition_temperature, Transition,
};
use thermwit::{ComplexMatrixF64, SpectrumF64};

use crate::config::RunSettings;
use crate::output::{num, Report, SweepRow};
use crate::CliError;

/// Largest `D` for which power-law spectra are summed term by term.
pub const MAX_EXPLICIT_LEVELS: u64 = 10_000_000;
/// Largest `D` for which the transition temperature of a power-law spectrum is solved.
pub const MAX_TRANSITION_LEVELS: u64 = 1_000_000;

fn point(t: f64, run: &RunSettings) -> Result<ThermalPoint<f64>, CliError> {
    Ok(ThermalPoint::with_kb(t, run.kb)?)
}

fn transition_summary(
    report: &mut Report,
    s: &SpectrumF64,
    bound: &RobustnessBound<f64>,
    kb: f64,
) -> Result<Option<f64>, CliError> {
    let result = transition_temperature(s, bound)?;
    let t = match result.outcome {
        Transition::Detected(kt) => {
            report.push_num("T_trans", kt / kb);
            report.push_num("kT_trans", kt);
            Some(kt / kb)
        }
        Transition::NotDetected => {
            report.push("T_trans", "NotDetected");
            None
        }
        Transition::AboveBracket => {
            report.push("T_trans", format!("above {}", num(result.bracket.1 / kb)));
            None
        }
    };
    Ok(t)
}

/// Eigenvalues of `h` against the analytic spectrum expanded by degeneracy.
fn cross_check_spectrum(h: &ComplexMatrixF64, s: &SpectrumF64, what: &str) -> Result<f64, CliError> {
    let numeric = hermitian_eigenvalues(h)?;
    let mut analytic = Vec::new();
    for l in s.levels() {
        let d = l.degeneracy.ok_or_else(|| CliError::CrossCheck(format!("{what}: degeneracy overflow")))?;
        analytic.extend(std::iter::repeat_n(l.energy, d as usize));
    }
    if numeric.len() != analytic.len() {
        return Err(CliError::CrossCheck(format!(
            "{what}: {} eigenvalues vs {} analytic states",
            numeric.len(),
            analytic.len()
        )));
    }
    let worst = numeric
        .iter()
        .zip(&analytic)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if !(worst < 1e-9) {
        return Err(CliError::CrossCheck(format!(
            "{what}: analytic and explicit spectra differ by {worst:e}"
        )));
    }
    let numeric_levels = Spectrum::from_eigenvalues(&numeric)?;
    if numeric_levels.degeneracies() != s.degeneracies() {
        return Err(CliError::CrossCheck(format!("{what}: degeneracy counts differ")));
    }
    Ok(worst)
}

pub fn dimer(b: f64, j: f64, run: &RunSettings) -> Result<Report, CliError> {
    let params = DimerParams::new(b, j)?;
    let s = dimer_spectrum(&params);
    let h = build_dimer_hamiltonian(&params);
    let (bound, ground) = if params.singlet_is_ground() {
        (RobustnessBound::singlet(), "singlet")
    } else {
        (RobustnessBound::exact(1.0, BoundSource::BipartitePureSchmidt)?, "|00>")
    };
    let extra = if run.oracles {
        vec!["concurrence", "min_pt_eig"]
    } else {
        vec![]
    };
    let mut report = Report::new(extra);
    for t in run.grid.points() {
        let tp = point(t, run)?;
        let p = population(&s, &tp, 0)?;
        let mut row = SweepRow {
            temperature: t,
            ln_z: partition_function(&s, &tp).ln(),
            population: p,
            threshold: bound.threshold(),
            satisfied: p > bound.threshold(),
            bound_kind: bound.kind().to_string(),
            extra: vec![],
        };
        if run.oracles {
            let rho = thermal_density_matrix(&h, &tp)?;
            row.extra.push(concurrence_two_qubit(&rho)?);
            row.extra.push(ppt_min_eigenvalue(&rho, &[2, 2], &[1])?);
        }
        report.rows.push(row);
    }
    report.push("system", "dimer");
    report.push_param("B", b);
    report.push_param("J", j);
    report.push_param("kB", run.kb);
    report.push("ground", ground);
    report.push_num("one_plus_R", bound.one_plus_r());
    report.push("bound_kind", bound.kind().to_string());
    if run.matrix_check {
        let worst = cross_check_spectrum(&h, &s, "dimer")?;
        report.push("matrix_check", format!("pass (max error {})", num(worst)));
    }
    let t_trans = transition_summary(&mut report, &s, &bound, run.kb)?;
    if run.oracles {
        let scale = j.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        match concurrence_vanishing_temperature(&h, 1e-3 * scale, 1e3 * scale, 1e-12)? {
            Some(kt) => {
                let tc = kt / run.kb;
                report.push_num("T_concurrence", tc);
                if let Some(tw) = t_trans {
                    report.push("witness_below_concurrence", (tw < tc).to_string());
                    report.push_num("concurrence_minus_witness", tc - tw);
                }
            }
            None => report.push("T_concurrence", "none"),
        }
    }
    Ok(report)
}

pub struct ToyInput {
    pub e0: f64,
    pub delta: f64,
    pub alpha: f64,
    pub levels: u64,
    pub e_r: f64,
    pub bound: RobustnessBound<f64>,
    /// Site count of a half-filled Dicke ground state, when known.
    pub dicke_n: Option<u64>,
}

fn toy_rows(input: &ToyInput, run: &RunSettings, report: &mut Report) -> Result<ToySpectrumParams<f64>, CliError> {
    let p = ToySpectrumParams::new(input.e0, input.delta, input.alpha, input.levels)?;
    if input.alpha > 0.0 && input.levels > MAX_EXPLICIT_LEVELS {
        return Err(CliError::Config(format!(
            "D={} exceeds {MAX_EXPLICIT_LEVELS} levels for alpha > 0",
            input.levels
        )));
    }
    let threshold = input.bound.threshold();
    for t in run.grid.points() {
        let tp = point(t, run)?;
        let z = partition_function_alpha_closed(&p, &tp);
        let pop = (-z.log_reduced).exp();
        let mut extra = vec![];
        if input.alpha > 0.0 {
            let zg = partition_function_alpha_gamma(&p, &tp)?;
            extra.push(zg.value());
            extra.push(((zg.log_reduced - z.log_reduced).exp_m1()).abs());
        }
        report.rows.push(SweepRow {
            temperature: t,
            ln_z: z.ln(),
            population: pop,
            threshold,
            satisfied: pop > threshold,
            bound_kind: input.bound.kind().to_string(),
            extra,
        });
    }
    Ok(p)
}

fn toy_summary(input: &ToyInput, p: &ToySpectrumParams<f64>, run: &RunSettings, report: &mut Report) -> Result<(), CliError> {
    let kb = run.kb;
    report.push_param("E0", input.e0);
    report.push_param("delta", input.delta);
    report.push_param("alpha", input.alpha);
    report.push("D", input.levels.to_string());
    report.push_param("kB", kb);
    report.push_num("eR", input.e_r);
    report.push_num("one_plus_R", input.bound.one_plus_r());
    report.push("bound_kind", input.bound.kind().to_string());
    match toy_t0(input.levels, input.e_r, input.delta) {
        Ok(t0) => report.push_num("T0", t0 / kb),
        Err(thermwit::Error::ThresholdUnreachable { .. }) => report.push("T0", "unreachable"),
        Err(e) => return Err(e.into()),
    }
    let (t1, t1_low) = toy_t1(input.e_r, input.delta)?;
    report.push_num("T1_exact", t1 / kb);
    report.push_num("T1_lowT", t1_low / kb);
    if input.alpha > 0.0 {
        if let Some(n) = input.dicke_n {
            report.push_num("T_alpha", toy_talpha(input.alpha, n, input.delta)? / kb);
        }
    }
    report.push_num("delta_min", gapping_rule_min_gap(input.e_r)?);
    if input.alpha == 0.0 || input.levels <= MAX_TRANSITION_LEVELS {
        transition_summary(report, &toy_spectrum(p), &input.bound, kb)?;
    } else {
        report.push("T_trans", format!("skipped (D > {MAX_TRANSITION_LEVELS})"));
    }
    Ok(())
}

pub fn toy(input: &ToyInput, run: &RunSettings) -> Result<Report, CliError> {
    let extra = if input.alpha > 0.0 {
        vec!["Z_gamma", "gamma_rel_err"]
    } else {
        vec![]
    };
    let mut report = Report::new(extra);
    let p = toy_rows(input, run, &mut report)?;
    report.push("system", "toy");
    toy_summary(input, &p, run, &mut report)?;
    Ok(report)
}

/// Bound and entropy for a Dicke ground state given only its site count.
pub fn half_dicke_bound(n: u64) -> Result<(f64, RobustnessBound<f64>), CliError> {
    if n % 2 == 1 {
        return Err(CliError::Config(format!("n={n} must be even for a half-filled Dicke state")));
    }
    Ok((dicke_relative_entropy(n, n / 2)?, dicke_robustness(n, n / 2)?))
}

pub struct DickeInput {
    pub n: u64,
    pub k: u64,
    pub e0: f64,
    pub delta: f64,
    pub alpha: f64,
    pub levels: u64,
}

pub fn dicke(input: &DickeInput, run: &RunSettings) -> Result<Report, CliError> {
    let (n, k) = (input.n, input.k);
    let bound = dicke_robustness::<f64>(n, k)?;
    let e_r = dicke_relative_entropy::<f64>(n, k)?;
    let half = 2 * k == n;
    let toy_input = ToyInput {
        e0: input.e0,
        delta: input.delta,
        alpha: input.alpha,
        levels: input.levels,
        e_r,
        bound,
        dicke_n: half.then_some(n),
    };
    let extra = if input.alpha > 0.0 {
        vec!["Z_gamma", "gamma_rel_err"]
    } else {
        vec![]
    };
    let mut report = Report::new(extra);
    let p = toy_rows(&toy_input, run, &mut report)?;
    report.push("system", "dicke");
    report.push("n", n.to_string());
    report.push("k", k.to_string());
    report.push_num("E_R_bits", e_r);
    if half {
        report.push_num("one_plus_R_over_sqrt_n", bound.one_plus_r() / (n as f64).sqrt());
    }
    if n as usize <= MAX_EXPLICIT_SITES {
        let psi = dicke_state::<f64>(n as usize, k as usize)?;
        let bi = bipartite_pure_robustness(&psi, &Partition::half_cut(n as usize)?)?;
        report.push_num("one_plus_R_halfcut", bi.one_plus_r());
        if run.oracles {
            let cfg = AlsConfig {
                seed: run.seed,
                ..AlsConfig::default()
            };
            let g = geometric_measure_als(&psi, &cfg)?;
            report.push_num("als_overlap_sq", g.overlap_sq);
            report.push_num("closed_overlap_sq", dicke_max_overlap_sq::<f64>(n, k)?);
            report.push_num("eG_upper", g.e_g_upper);
        }
    } else if run.oracles {
        report.push("als_overlap_sq", format!("skipped (n > {MAX_EXPLICIT_SITES})"));
    }
    toy_summary(&toy_input, &p, run, &mut report)?;
    Ok(report)
}

pub fn graph(g: &Graph, b: f64, e_r_per_site: f64, run: &RunSettings) -> Result<Report, CliError> {
    let n = g.n() as u64;
    let e_r = e_r_per_site * n as f64;
    let bound = RobustnessBound::lower_bound(e_r.exp2(), BoundSource::RelativeEntropyInput)?;
    let mut report = Report::new(vec!["flip_probability"]);
    for t in run.grid.points() {
        let tp = point(t, run)?;
        let z = stabilizer_partition_function(n, b, &tp)?;
        let pop = (-z.log_reduced).exp();
        report.rows.push(SweepRow {
            temperature: t,
            ln_z: z.ln(),
            population: pop,
            threshold: bound.threshold(),
            satisfied: pop > bound.threshold(),
            bound_kind: bound.kind().to_string(),
            extra: vec![flip_probability_from_temperature(b, &tp)],
        });
    }
    report.push("system", "graph");
    report.push("n", n.to_string());
    report.push("edges", g.edge_count().to_string());
    report.push_param("B", b);
    report.push_param("kB", run.kb);
    report.push_param("eR_per_site", e_r_per_site);
    report.push_num("one_plus_R", bound.one_plus_r());
    report.push("bound_kind", bound.kind().to_string());
    if run.matrix_check {
        if g.n() > MAX_EXPLICIT_SITES {
            return Err(CliError::Config(format!(
                "--matrix-check needs n <= {MAX_EXPLICIT_SITES}, graph has {}",
                g.n()
            )));
        }
        let h = build_stabilizer_hamiltonian(g, b)?;
        let worst = cross_check_spectrum(&h, &stabilizer_spectrum(n, b)?, "stabilizer")?;
        let psi = graph_state::<f64>(g)?;
        let hv = h.matvec(psi.amplitudes());
        let residual = hv
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, &x)| (*a + x * (n as f64 * b)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if !(residual < 1e-9) {
            return Err(CliError::CrossCheck(format!(
                "graph state is not a ground state: residual {residual:e}"
            )));
        }
        report.push("matrix_check", format!("pass (max error {})", num(worst.max(residual))));
    }
    let ratio = e_r_per_site;
    if ratio > 0.0 && ratio < 1.0 {
        report.push_num("T_trans_closed", stabilizer_t_trans(n, b, e_r)? / run.kb);
    } else {
        report.push("T_trans_closed", "undefined");
    }
    transition_summary(&mut report, &stabilizer_spectrum(n, b)?, &bound, run.kb)?;
    if ratio > 0.0 && ratio <= 1.0 {
        report.push_num("P_trans", noise_threshold(e_r, n)?);
    }
    Ok(report)
}
