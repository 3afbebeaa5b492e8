//! The population witness: a thermal state is entangled whenever the weight of an
//! eigenstate exceeds `1/(1 + R)` with `R` that eigenstate's global robustness.
//!
//! Temperatures returned here are in energy units (`kT` with `kB = 1`).

use crate::entanglement::{BoundKind, RobustnessBound};
use crate::error::{Error, Result};
use crate::numerics::{bisect, bisect_log, log_gamma};
use crate::scalar::Real;
use crate::systems::Spectrum;
use crate::thermal::{population, ThermalPoint};

/// Which eigenlevel's population is compared against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContributorSpec {
    pub level_index: usize,
}

impl ContributorSpec {
    pub fn ground() -> Self {
        Self { level_index: 0 }
    }

    pub fn level(level_index: usize) -> Self {
        Self { level_index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessVerdict<S> {
    pub temperature: S,
    pub population: S,
    pub threshold: S,
    pub satisfied: bool,
    pub bound_kind: BoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transition<S> {
    /// Satisfied strictly below this `kT`, violated above.
    Detected(S),
    /// Not satisfied even at the cold end of the bracket.
    NotDetected,
    /// Still satisfied at the hot end of the bracket.
    AboveBracket,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionResult<S> {
    pub outcome: Transition<S>,
    pub bracket: (S, S),
    pub bound_kind: BoundKind,
}

impl<S: Real> TransitionResult<S> {
    pub fn t_trans(&self) -> Option<S> {
        match self.outcome {
            Transition::Detected(t) => Some(t),
            _ => None,
        }
    }

    pub fn detected(&self) -> bool {
        self.t_trans().is_some()
    }
}

/// Relative tolerance of transition temperatures.
pub const TRANSITION_REL_TOL: f64 = 1e-10;

/// Compares the contributor's single-state population with `1/(1+R)`.
///
/// `r` must be the robustness (or a lower bound on it) of the contributing eigenstate.
pub fn evaluate_condition<S: Real>(
    s: &Spectrum<S>,
    t: &ThermalPoint<S>,
    r: &RobustnessBound<S>,
    c: ContributorSpec,
) -> Result<WitnessVerdict<S>> {
    let p = population(s, t, c.level_index)?;
    let threshold = r.threshold();
    Ok(WitnessVerdict {
        temperature: t.temperature(),
        population: p,
        threshold,
        satisfied: p > threshold,
        bound_kind: r.kind(),
    })
}

fn reduced_point<S: Real>(kt: S) -> ThermalPoint<S> {
    ThermalPoint::new(kt).expect("positive temperature")
}

/// Search bracket `[1e-6·gap, 1e4·spread]` in `kT`.
pub fn transition_bracket<S: Real>(s: &Spectrum<S>) -> Result<(S, S)> {
    let gap = s.gap().ok_or_else(|| {
        Error::InvalidParameter("spectrum has a single level, so p0 is 1 at every T".into())
    })?;
    Ok((gap * S::lit(1e-6), s.spread() * S::lit(1e4)))
}

/// Solves `p0(kT) = 1/(1+R)` for the ground contributor.
///
/// `p0` is non-increasing in `T`, so logarithmic bisection on the bracket suffices.
pub fn transition_temperature<S: Real>(
    s: &Spectrum<S>,
    r: &RobustnessBound<S>,
) -> Result<TransitionResult<S>> {
    let ground = s.ground();
    if ground.degeneracy != Some(1) {
        return Err(Error::DegenerateGround {
            degeneracy: ground.degeneracy.unwrap_or(u64::MAX),
        });
    }
    let bracket = transition_bracket(s)?;
    let ln_threshold = r.threshold().ln();
    let margin = |kt: S| -> S {
        let p = population(s, &reduced_point(kt), 0).expect("ground level exists");
        p.ln() - ln_threshold
    };
    let result = |outcome| TransitionResult {
        outcome,
        bracket,
        bound_kind: r.kind(),
    };
    if !(margin(bracket.0) > S::zero()) {
        return Ok(result(Transition::NotDetected));
    }
    if margin(bracket.1) > S::zero() {
        return Ok(result(Transition::AboveBracket));
    }
    let t = bisect_log(margin, bracket.0, bracket.1, S::tol(TRANSITION_REL_TOL))?;
    Ok(result(Transition::Detected(t)))
}

/// 512 log-spaced `kT` values over `[1e-6, 1e4]·spread`.
pub fn default_grid<S: Real>(s: &Spectrum<S>) -> Vec<S> {
    let spread = if s.spread() > S::zero() { s.spread() } else { S::one() };
    log_grid(spread * S::lit(1e-6), spread * S::lit(1e4), 512)
}

pub fn log_grid<S: Real>(lo: S, hi: S, count: usize) -> Vec<S> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = S::from_usize_lossy(count.max(2) - 1);
    (0..count)
        .map(|i| (a + (b - a) * S::from_usize_lossy(i) / last).exp())
        .collect()
}

/// Temperature intervals on which the contributor's population exceeds the threshold.
///
/// Each crossing is refined by bisection inside its grid cell; an interval touching a grid
/// end is reported up to that end.
pub fn satisfying_intervals<S: Real>(
    s: &Spectrum<S>,
    r: &RobustnessBound<S>,
    c: ContributorSpec,
    grid: &[S],
) -> Result<Vec<(S, S)>> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] > S::zero()) {
        return Err(Error::EmptyGrid);
    }
    population(s, &reduced_point(grid[0]), c.level_index)?;
    let threshold = r.threshold();
    let margin = |kt: S| population(s, &reduced_point(kt), c.level_index).unwrap() - threshold;
    let tol = S::tol(TRANSITION_REL_TOL);
    let mut intervals = Vec::new();
    let mut start = if margin(grid[0]) > S::zero() { Some(grid[0]) } else { None };
    for w in grid.windows(2) {
        let (inside_lo, inside_hi) = (margin(w[0]) > S::zero(), margin(w[1]) > S::zero());
        if inside_lo == inside_hi {
            continue;
        }
        let crossing = bisect(margin, w[0], w[1], tol)?;
        if inside_hi {
            start = Some(crossing);
        } else if let Some(a) = start.take() {
            intervals.push((a, crossing));
        }
    }
    if let Some(a) = start {
        intervals.push((a, *grid.last().unwrap()));
    }
    Ok(intervals)
}

/// `e^{−4J/kT}(e^{B/kT} + e^{−B/kT} + 1)`; below 1 exactly when the singlet weight exceeds 1/2.
pub fn dimer_condition_lhs<S: Real>(b: S, j: S, kt: S) -> S {
    let direct = (-S::lit(4.0) * j / kt).exp() * ((b / kt).exp() + (-b / kt).exp() + S::one());
    if direct.is_finite() {
        return direct;
    }
    let four_j = S::lit(4.0) * j;
    ((b - four_j) / kt).exp() + ((-b - four_j) / kt).exp() + (-four_j / kt).exp()
}

pub fn dimer_condition<S: Real>(b: S, j: S, kt: S) -> bool {
    dimer_condition_lhs(b, j, kt) < S::one()
}

/// `Δ / ln((D−1)/(2^{eR}−1))`, the transition of the flat excited band (α = 0).
pub fn toy_t0<S: Real>(levels: u64, e_r: S, delta: S) -> Result<S> {
    if !(e_r > S::zero()) {
        return Err(Error::NonpositiveEntanglement(e_r.to_f64_lossy()));
    }
    if levels < 2 {
        return Err(Error::InvalidParameter(format!("D={levels} must be at least 2")));
    }
    let above = S::from_u64(levels - 1).unwrap();
    let r = e_r.exp2() - S::one();
    if !(above > r) {
        return Err(Error::ThresholdUnreachable {
            levels_above: above.to_f64_lossy(),
            robustness: r.to_f64_lossy(),
        });
    }
    Ok(delta / (above / r).ln())
}

/// Equally spaced band in the large-D limit: `(exact, low_t)` with
/// `exact = Δ/ln(2^{eR}/(2^{eR}−1))` and `low_t = Δ·2^{eR}`.
pub fn toy_t1<S: Real>(e_r: S, delta: S) -> Result<(S, S)> {
    if !(e_r > S::zero()) {
        return Err(Error::NonpositiveEntanglement(e_r.to_f64_lossy()));
    }
    let exact = delta / -(-(-e_r).exp2()).ln_1p();
    Ok((exact, delta * e_r.exp2()))
}

/// `Δ·[α√n/Γ(1/α)]^α` for the power-law band with Dicke-scale robustness.
pub fn toy_talpha<S: Real>(alpha: S, n: u64, delta: S) -> Result<S> {
    if !(alpha > S::zero() && alpha <= S::one()) {
        return Err(Error::AlphaOutOfRange(alpha.to_f64_lossy()));
    }
    if n % 2 == 1 {
        return Err(Error::OddN(n as usize));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n={n} must be at least 2")));
    }
    let ln_inner = alpha.ln() + S::lit(0.5) * S::from_u64(n).unwrap().ln()
        - log_gamma(alpha.recip())?;
    Ok(delta * (alpha * ln_inner).exp())
}

/// Smallest first gap `2^{−eR}` keeping a finite transition temperature.
pub fn gapping_rule_min_gap<S: Real>(e_r: S) -> Result<S> {
    if !(e_r >= S::zero()) {
        return Err(Error::NegativeEntanglement(e_r.to_f64_lossy()));
    }
    Ok((-e_r).exp2())
}

fn ratio<S: Real>(e_r: S, n: u64) -> Result<S> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    Ok(e_r / S::from_u64(n).unwrap())
}

/// `−2B/ln(2^{eR/n} − 1)` for the stabilizer Hamiltonian.
pub fn stabilizer_t_trans<S: Real>(n: u64, b: S, e_r: S) -> Result<S> {
    let q = ratio(e_r, n)?;
    if !(q > S::zero() && q < S::one()) {
        return Err(Error::RatioOutOfRange(q.to_f64_lossy()));
    }
    if !(b > S::zero()) {
        return Err(Error::InvalidParameter(format!("B={b} must be positive")));
    }
    Ok(-S::lit(2.0) * b / (q * S::LN_2()).exp_m1().ln())
}

/// Per-site σz flip probability `1/(1 + e^{2B/kT})` equivalent to temperature `t`.
pub fn flip_probability_from_temperature<S: Real>(b: S, t: &ThermalPoint<S>) -> S {
    let x = S::lit(2.0) * b * t.beta();
    // logistic in a form that neither overflows nor cancels
    if x > S::zero() {
        let e = (-x).exp();
        e / (S::one() + e)
    } else {
        S::one() / (S::one() + x.exp())
    }
}

/// Tolerable flip probability `1 − 2^{−eR/n}`.
pub fn noise_threshold<S: Real>(e_r: S, n: u64) -> Result<S> {
    let q = ratio(e_r, n)?;
    if !(q > S::zero() && q <= S::one()) {
        return Err(Error::RatioOutOfRange(q.to_f64_lossy()));
    }
    Ok(-(-q * S::LN_2()).exp_m1())
}
