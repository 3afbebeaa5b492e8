//! Partition functions, level populations and thermal density matrices.
//!
//! Boltzmann sums are evaluated relative to the ground energy, so `Z` is carried as
//! `ln Z = −E0/kT + ln Σ_j g_j e^{−(E_j − E0)/kT}` and never overflows.

use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eigendecompose, log_gamma, log_sum_exp, ComplexMatrix, DensityMatrix, MAX_DIM,
};
use crate::scalar::Real;
use crate::systems::{Spectrum, ToySpectrumParams};

/// Temperature with its Boltzmann constant; all formulas use `kT = kB·T`.
///
/// `temperature` may be `+∞` (see [`ThermalPoint::infinite`]), never zero or negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint<S> {
    temperature: S,
    kb: S,
}

impl<S: Real> ThermalPoint<S> {
    /// Temperature in energy units (kB = 1).
    pub fn new(temperature: S) -> Result<Self> {
        Self::with_kb(temperature, S::one())
    }

    pub fn with_kb(temperature: S, kb: S) -> Result<Self> {
        if !(temperature > S::zero()) || !(kb > S::zero()) || !kb.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "temperature {temperature} and kB {kb} must be positive"
            )));
        }
        Ok(Self { temperature, kb })
    }

    /// The T → ∞ limit, where every Boltzmann factor is 1.
    pub fn infinite() -> Self {
        Self {
            temperature: S::infinity(),
            kb: S::one(),
        }
    }

    pub fn temperature(&self) -> S {
        self.temperature
    }

    pub fn kb(&self) -> S {
        self.kb
    }

    pub fn kt(&self) -> S {
        self.kb * self.temperature
    }

    /// 1/kT, zero at infinite temperature.
    pub fn beta(&self) -> S {
        if self.temperature.is_infinite() {
            S::zero()
        } else {
            S::one() / self.kt()
        }
    }
}

/// Partition function as `ln Z = ground_exponent + log_reduced`, with
/// `ground_exponent = −E0/kT` and `log_reduced = ln(Z·e^{E0/kT})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPartition<S> {
    pub ground_exponent: S,
    pub log_reduced: S,
}

impl<S: Real> LogPartition<S> {
    pub fn ln(&self) -> S {
        self.ground_exponent + self.log_reduced
    }

    /// Z itself; may be ±∞ or 0 when not representable.
    pub fn value(&self) -> S {
        self.ln().exp()
    }

    /// Σ_j g_j e^{−(E_j − E0)/kT}, i.e. 1/p0 for a unique ground state.
    pub fn reduced(&self) -> S {
        self.log_reduced.exp()
    }
}

/// Boltzmann weights at one temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationProfile<S> {
    pub partition: LogPartition<S>,
    /// Weight of a single state in each level, e^{−E_j/kT}/Z.
    pub per_state: Vec<S>,
    /// Total weight of each level, g_j·e^{−E_j/kT}/Z; sums to 1.
    pub per_level: Vec<S>,
}

impl<S: Real> PopulationProfile<S> {
    pub fn ground_population(&self) -> S {
        self.per_state[0]
    }
}

fn reduced_exponents<S: Real>(s: &Spectrum<S>, t: &ThermalPoint<S>) -> Vec<S> {
    let e0 = s.ground_energy();
    let beta = t.beta();
    s.levels()
        .iter()
        .map(|l| l.ln_degeneracy - (l.energy - e0) * beta)
        .collect()
}

/// Z = Σ_levels g·e^{−E/kT}, in log form.
pub fn partition_function<S: Real>(s: &Spectrum<S>, t: &ThermalPoint<S>) -> LogPartition<S> {
    LogPartition {
        ground_exponent: -s.ground_energy() * t.beta(),
        log_reduced: log_sum_exp(reduced_exponents(s, t)),
    }
}

/// Single-state weight e^{−E_j/kT}/Z of level `level`.
pub fn population<S: Real>(s: &Spectrum<S>, t: &ThermalPoint<S>, level: usize) -> Result<S> {
    let l = s.levels().get(level).ok_or(Error::IndexOutOfRange {
        index: level,
        len: s.len(),
    })?;
    let z = partition_function(s, t);
    Ok((-(l.energy - s.ground_energy()) * t.beta() - z.log_reduced).exp())
}

pub fn populations<S: Real>(s: &Spectrum<S>, t: &ThermalPoint<S>) -> PopulationProfile<S> {
    let exps = reduced_exponents(s, t);
    let partition = LogPartition {
        ground_exponent: -s.ground_energy() * t.beta(),
        log_reduced: log_sum_exp(exps.iter().copied()),
    };
    let e0 = s.ground_energy();
    let per_state = s
        .levels()
        .iter()
        .map(|l| (-(l.energy - e0) * t.beta() - partition.log_reduced).exp())
        .collect();
    let per_level = exps
        .iter()
        .map(|&x| (x - partition.log_reduced).exp())
        .collect();
    PopulationProfile {
        partition,
        per_state,
        per_level,
    }
}

/// ρ_T = e^{−H/kT}/Z from the eigendecomposition of `h`.
pub fn thermal_density_matrix<S: Real>(
    h: &ComplexMatrix<S>,
    t: &ThermalPoint<S>,
) -> Result<DensityMatrix<S>> {
    if h.dim() > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: h.dim(),
            limit: MAX_DIM,
        });
    }
    let eig = hermitian_eigendecompose(h)?;
    let e0 = eig.eigenvalues[0];
    let beta = t.beta();
    let weights: Vec<S> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-(e - e0) * beta).exp())
        .collect();
    let total: S = weights.iter().copied().sum();
    let mut k = 0;
    let rho = eig.map_spectrum(|_| {
        let w = weights[k] / total;
        k += 1;
        w
    });
    Ok(DensityMatrix::new_unchecked(rho))
}

/// D(|e0⟩‖ρ_T) = −log₂ p0 for a unique ground state.
pub fn relative_entropy_ground_to_thermal<S: Real>(
    s: &Spectrum<S>,
    t: &ThermalPoint<S>,
) -> Result<S> {
    let g = s.ground();
    if g.degeneracy != Some(1) {
        return Err(Error::DegenerateGround {
            degeneracy: g.degeneracy.unwrap_or(u64::MAX),
        });
    }
    // −log₂ p0 = log₂ Σ_j g_j e^{−(E_j−E0)/kT}
    Ok(partition_function(s, t).log_reduced / S::LN_2())
}

/// Exact toy-model sum Z_α = e^{−E0/kT}(1 + Σ_{m=1}^{D−1} e^{−m^α Δ/kT}).
pub fn partition_function_alpha_closed<S: Real>(
    p: &ToySpectrumParams<S>,
    t: &ThermalPoint<S>,
) -> LogPartition<S> {
    let beta = t.beta();
    let ground_exponent = -p.e0 * beta;
    let excited = p.levels - 1;
    let log_reduced = if p.alpha == S::zero() {
        let ln_excited = S::from_u64(excited).unwrap().ln();
        log_sum_exp([S::zero(), ln_excited - p.delta * beta])
    } else {
        log_sum_exp(std::iter::once(S::zero()).chain((1..=excited).map(|m| {
            -S::from_u64(m).unwrap().powf(p.alpha) * p.delta * beta
        })))
    };
    LogPartition {
        ground_exponent,
        log_reduced,
    }
}

/// Integral approximation Z_α ≈ e^{−E0/kT}·Γ(1/α)/α·(kT/Δ)^{1/α}, valid for D → ∞.
pub fn partition_function_alpha_gamma<S: Real>(
    p: &ToySpectrumParams<S>,
    t: &ThermalPoint<S>,
) -> Result<LogPartition<S>> {
    if p.alpha == S::zero() {
        return Err(Error::AlphaZero);
    }
    if t.temperature().is_infinite() {
        return Err(Error::InvalidParameter(
            "gamma approximation needs a finite temperature".into(),
        ));
    }
    let inv = S::one() / p.alpha;
    Ok(LogPartition {
        ground_exponent: -p.e0 * t.beta(),
        log_reduced: log_gamma(inv)? - p.alpha.ln() + inv * (t.kt() / p.delta).ln(),
    })
}

/// Z = e^{nB/kT}((1 + e^{2B/kT})/e^{2B/kT})ⁿ for the stabilizer Hamiltonian.
pub fn stabilizer_partition_function<S: Real>(
    n: u64,
    b: S,
    t: &ThermalPoint<S>,
) -> Result<LogPartition<S>> {
    if n == 0 || !(b > S::zero()) {
        return Err(Error::InvalidParameter(format!(
            "stabilizer partition function needs n >= 1 and B > 0, got n={n}, B={b}"
        )));
    }
    let nf = S::from_u64(n).unwrap();
    let x = S::lit(2.0) * b * t.beta();
    Ok(LogPartition {
        ground_exponent: nf * b * t.beta(),
        log_reduced: nf * (-x).exp().ln_1p(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{
        build_dimer_hamiltonian, build_stabilizer_hamiltonian, dimer_spectrum,
        stabilizer_spectrum, DimerParams, Graph, Level,
    };
    use crate::numerics::hermitian_eigenvalues;
    use proptest::prelude::*;

    fn tp(kt: f64) -> ThermalPoint<f64> {
        ThermalPoint::new(kt).unwrap()
    }

    fn two_level() -> Spectrum<f64> {
        Spectrum::new(vec![Level::new(0.0, 1), Level::new(1.0, 3)]).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn thermal_point_validation() {
        assert!(ThermalPoint::new(0.0f64).is_err());
        assert!(ThermalPoint::new(-1.0f64).is_err());
        assert!(ThermalPoint::with_kb(1.0f64, 0.0).is_err());
        let t = ThermalPoint::with_kb(300.0f64, 0.5).unwrap();
        assert_eq!(t.kt(), 150.0);
        assert_eq!(ThermalPoint::<f64>::infinite().beta(), 0.0);
    }

    #[test]
    fn two_level_partition_and_population() {
        let z = partition_function(&two_level(), &tp(1.0)).value();
        let direct = 1.0 + 3.0 * (-1.0f64).exp();
        assert!(close(z, direct, 1e-14));
        assert!((z - 2.10364).abs() < 1e-5);
        let p0 = population(&two_level(), &tp(1.0), 0).unwrap();
        assert!(close(p0, 1.0 / direct, 1e-14));
        assert!((p0 - 0.47537).abs() < 1e-5);
        assert!(matches!(
            population(&two_level(), &tp(1.0), 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn infinite_temperature_counts_states() {
        let s = stabilizer_spectrum(5, 1.0).unwrap();
        let z = partition_function(&s, &ThermalPoint::infinite());
        assert!(close(z.value(), 32.0, 1e-14));
    }

    #[test]
    fn dimer_partition_expression() {
        let s = dimer_spectrum(&DimerParams::new(1.0, 1.0).unwrap());
        let z = partition_function(&s, &tp(1.0)).value();
        let expected = (-2.0f64).exp() + (-1.0f64).exp() + 1.0 + 3.0f64.exp();
        assert!(close(z, expected, 1e-14));
    }

    #[test]
    fn ground_population_limits() {
        let s = dimer_spectrum(&DimerParams::new(0.0, 1.0).unwrap());
        let p0 = population(&s, &tp(4.0 * 1e-6), 0).unwrap();
        assert!((p0 - 1.0).abs() < 1e-12);
        let p0 = population(&s, &tp(4.0 / 3f64.ln()), 0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn no_overflow_at_low_temperature() {
        let s = stabilizer_spectrum(200, 1.0).unwrap();
        let z = partition_function(&s, &tp(1e-3));
        assert!(z.ln().is_finite());
        assert!(z.value().is_infinite());
        assert_eq!(population(&s, &tp(1e-3), 0).unwrap(), 1.0);
    }

    #[test]
    fn thermal_state_limits() {
        let rho = thermal_density_matrix(&ComplexMatrix::<f64>::zeros(4), &tp(1.0)).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed(4));

        let h = build_dimer_hamiltonian(&DimerParams::new(0.0, 1.0).unwrap());
        let rho = thermal_density_matrix(&h, &tp(4e-6)).unwrap();
        let singlet = DensityMatrix::from_pure(crate::systems::PureState::<f64>::singlet().amplitudes());
        let diff = (rho.matrix() - singlet.matrix()).max_abs();
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn thermal_state_eigenvalues_are_populations() {
        let p = DimerParams::new(1.0, 1.0).unwrap();
        let rho = thermal_density_matrix(&build_dimer_hamiltonian(&p), &tp(1.0)).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        let mut eig = hermitian_eigenvalues(rho.matrix()).unwrap();
        eig.reverse();
        let prof = populations(&dimer_spectrum(&p), &tp(1.0));
        for (a, b) in eig.iter().zip(&prof.per_state) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn statistical_distance() {
        let s = dimer_spectrum(&DimerParams::new(0.0, 1.0).unwrap());
        assert!(relative_entropy_ground_to_thermal(&s, &tp(1e-6)).unwrap().abs() < 1e-12);
        let d = relative_entropy_ground_to_thermal(&s, &tp(4.0 / 3f64.ln())).unwrap();
        assert!((d - 1.0).abs() < 1e-13);
        let d = relative_entropy_ground_to_thermal(&two_level(), &tp(1.0)).unwrap();
        assert!((d - 1.0729).abs() < 1e-4);
        let degenerate = Spectrum::new(vec![Level::new(0.0, 2)]).unwrap();
        assert!(matches!(
            relative_entropy_ground_to_thermal(&degenerate, &tp(1.0)),
            Err(Error::DegenerateGround { degeneracy: 2 })
        ));
    }

    #[test]
    fn alpha_closed_forms() {
        let kt = 0.7;
        let p = ToySpectrumParams::new(0.3, 1.0, 0.0, 4).unwrap();
        let z = partition_function_alpha_closed(&p, &tp(kt)).value();
        let expected = (-0.3f64 / kt).exp() * (1.0 + 3.0 * (-1.0 / kt).exp());
        assert!(close(z, expected, 1e-14));

        let p = ToySpectrumParams::new(0.0, 1.0, 1.0, 1_000_000).unwrap();
        let z = partition_function_alpha_closed(&p, &tp(1.0)).value();
        assert!(close(z, 1.0 / (1.0 - (-1.0f64).exp()), 1e-12));

        let p = ToySpectrumParams::new(0.0, 1.0, 0.5, 100).unwrap();
        let z = partition_function_alpha_closed(&p, &tp(1.0)).value();
        let brute: f64 = 1.0 + (1..100).map(|m| (-(m as f64).sqrt()).exp()).sum::<f64>();
        assert!(close(z, brute, 1e-12));
    }

    #[test]
    fn alpha_closed_matches_generic_spectrum() {
        let p = ToySpectrumParams::new(-1.0, 0.5, 0.5, 50).unwrap();
        let s = crate::systems::toy_spectrum(&p);
        for kt in [0.1, 1.0, 10.0] {
            let a = partition_function_alpha_closed(&p, &tp(kt)).ln();
            let b = partition_function(&s, &tp(kt)).ln();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_approximation() {
        let p = ToySpectrumParams::new(0.0, 1.0, 1.0, 1_000_000).unwrap();
        let z = partition_function_alpha_gamma(&p, &tp(1.0)).unwrap().value();
        assert!(close(z, 1.0, 1e-13));
        let approx = partition_function_alpha_gamma(&p, &tp(10.0)).unwrap().value();
        let exact = 1.0 / (1.0 - (-0.1f64).exp());
        assert!((approx - 10.0).abs() < 1e-10);
        assert!((exact - 10.508).abs() < 1e-3);
        assert!((approx - exact).abs() / exact < 0.051);

        let p = ToySpectrumParams::new(0.0, 1.0, 0.5, 1_000_000).unwrap();
        let approx = partition_function_alpha_gamma(&p, &tp(1.0)).unwrap().value();
        assert!((approx - 2.0).abs() < 1e-12);
        let brute: f64 = (0..2_000_000).map(|m| (-(m as f64).sqrt()).exp()).sum();
        assert!((brute - 2.670_407).abs() < 1e-6, "{brute}");
        let exact = partition_function_alpha_closed(&p, &tp(1.0)).value();
        assert!((exact - 2.670_407).abs() < 1e-6);

        let p = ToySpectrumParams::new(0.0, 1.0, 0.0, 10).unwrap();
        assert!(matches!(
            partition_function_alpha_gamma(&p, &tp(1.0)),
            Err(Error::AlphaZero)
        ));
    }

    #[test]
    fn stabilizer_closed_form() {
        let z = stabilizer_partition_function(1, 0.8, &tp(1.3)).unwrap().value();
        assert!(close(z, 2.0 * (0.8f64 / 1.3).cosh(), 1e-14));

        let z = stabilizer_partition_function(4, 1.0, &tp(1.0)).unwrap().value();
        let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
        let direct: f64 = (0..=4)
            .map(|i| binom[i] * (-(-4.0 + 2.0 * i as f64)).exp())
            .sum();
        assert!(close(z, direct, 1e-12));

        let z = stabilizer_partition_function(7, 1.0, &ThermalPoint::infinite()).unwrap();
        assert!(close(z.value(), 128.0, 1e-14));
    }

    #[test]
    fn trace_of_matrix_exponential_matches() {
        for kt in [0.3f64, 1.0, 4.0] {
            let p = DimerParams::new(0.5, 1.0).unwrap();
            let eig = hermitian_eigenvalues(&build_dimer_hamiltonian(&p)).unwrap();
            let tr: f64 = eig.iter().map(|e: &f64| (-e / kt).exp()).sum();
            let z = partition_function(&dimer_spectrum(&p), &tp(kt)).value();
            assert!(close(z, tr, 1e-9));

            let g = Graph::ring(5);
            let eig =
                hermitian_eigenvalues(&build_stabilizer_hamiltonian(&g, 1.0).unwrap()).unwrap();
            let tr: f64 = eig.iter().map(|e: &f64| (-e / kt).exp()).sum();
            let z = stabilizer_partition_function(5, 1.0, &tp(kt)).unwrap().value();
            assert!(close(z, tr, 1e-9));
        }
    }

    fn arb_spectrum() -> impl Strategy<Value = Spectrum<f64>> {
        prop::collection::vec((0.01f64..5.0, 1u64..5), 1..8).prop_map(|gaps| {
            let mut e = -2.0;
            let mut levels = vec![Level::new(e, 1)];
            for (g, d) in gaps {
                e += g;
                levels.push(Level::new(e, d));
            }
            Spectrum::new(levels).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ground_population_non_increasing(s in arb_spectrum(), kts in prop::collection::vec(0.01f64..50.0, 2..20)) {
            let mut kts: Vec<f64> = kts;
            kts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let p: Vec<f64> = kts.iter().map(|&k| population(&s, &tp(k), 0).unwrap()).collect();
            for w in p.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
            }
        }

        #[test]
        fn populations_sum_to_one(s in arb_spectrum(), kt in 0.01f64..100.0) {
            let prof = populations(&s, &tp(kt));
            let total: f64 = prof.per_level.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let by_state: f64 = s.levels().iter().zip(&prof.per_state)
                .map(|(l, p)| l.degeneracy.unwrap() as f64 * p).sum();
            prop_assert!((by_state - 1.0).abs() < 1e-12);
        }

        #[test]
        fn degenerate_spectrum_bounds_all_alpha(alpha in 0.0f64..=1.0, kt in 0.05f64..50.0, d in 2u64..200) {
            let z0 = partition_function_alpha_closed(&ToySpectrumParams::new(0.0, 1.0, 0.0, d).unwrap(), &tp(kt));
            let za = partition_function_alpha_closed(&ToySpectrumParams::new(0.0, 1.0, alpha, d).unwrap(), &tp(kt));
            prop_assert!(z0.ln() >= za.ln() - 1e-12);
        }

        #[test]
        fn statistical_identity(s in arb_spectrum(), kt in 0.01f64..100.0) {
            let d = relative_entropy_ground_to_thermal(&s, &tp(kt)).unwrap();
            let p0 = population(&s, &tp(kt), 0).unwrap();
            prop_assert!((d + p0.log2()).abs() < 1e-12);
        }
    }
}
