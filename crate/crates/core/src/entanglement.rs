//! Robustness values and lower bounds, plus independent entanglement oracles.
//!
//! Logarithms of entanglement quantities are base 2 throughout.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{
    binomial, hermitian_eigendecompose, hermitian_eigenvalues, kron, ln_binomial,
    bisect_log, partial_transpose, ComplexMatrix, DensityMatrix,
};
use crate::scalar::Real;
use crate::systems::{site_bit, PureState};
use crate::thermal::{thermal_density_matrix, ThermalPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Exact,
    LowerBound,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Exact => "exact",
            BoundKind::LowerBound => "lower_bound",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundSource {
    ClosedFormDicke,
    SingletKnown,
    BipartitePureSchmidt,
    RelativeEntropyInput,
    GeometricInput,
}

impl BoundSource {
    /// Sources whose value is the robustness itself rather than a bound on it.
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            BoundSource::ClosedFormDicke | BoundSource::SingletKnown | BoundSource::BipartitePureSchmidt
        )
    }
}

/// A value of 1 + R, tagged with whether it is the robustness itself or a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessBound<S> {
    one_plus_r: S,
    kind: BoundKind,
    source: BoundSource,
}

impl<S: Real> RobustnessBound<S> {
    pub fn exact(one_plus_r: S, source: BoundSource) -> Result<Self> {
        if !source.is_exact() {
            return Err(Error::InvalidParameter(format!(
                "{source:?} only provides lower bounds"
            )));
        }
        Self::build(one_plus_r, BoundKind::Exact, source)
    }

    pub fn lower_bound(one_plus_r: S, source: BoundSource) -> Result<Self> {
        Self::build(one_plus_r, BoundKind::LowerBound, source)
    }

    fn build(one_plus_r: S, kind: BoundKind, source: BoundSource) -> Result<Self> {
        if !(one_plus_r >= S::one()) {
            return Err(Error::InvalidParameter(format!(
                "1 + R = {one_plus_r} must be at least 1"
            )));
        }
        Ok(Self {
            one_plus_r,
            kind,
            source,
        })
    }

    /// R = 1 for the two-qubit singlet.
    pub fn singlet() -> Self {
        Self {
            one_plus_r: S::lit(2.0),
            kind: BoundKind::Exact,
            source: BoundSource::SingletKnown,
        }
    }

    pub fn one_plus_r(&self) -> S {
        self.one_plus_r
    }

    pub fn robustness(&self) -> S {
        self.one_plus_r - S::one()
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn source(&self) -> BoundSource {
        self.source
    }

    /// Population threshold 1/(1 + R).
    pub fn threshold(&self) -> S {
        S::one() / self.one_plus_r
    }
}

/// Disjoint nonempty site blocks covering `0..n_sites`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n_sites: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n_sites: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::BadPartition("need at least two blocks".into()));
        }
        let mut seen = vec![false; n_sites];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::BadPartition("empty block".into()));
            }
            for &s in b {
                if s >= n_sites {
                    return Err(Error::BadPartition(format!("site {s} outside 0..{n_sites}")));
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Err(Error::BadPartition(format!("site {s} appears twice")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&x| !x) {
            return Err(Error::BadPartition(format!("site {missing} not covered")));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Self { n_sites, blocks })
    }

    /// `side` against its complement.
    pub fn bipartition(n_sites: usize, side: &[usize]) -> Result<Self> {
        let rest = (0..n_sites).filter(|s| !side.contains(s)).collect();
        Self::new(n_sites, vec![side.to_vec(), rest])
    }

    /// First ⌊n/2⌋ sites against the rest.
    pub fn half_cut(n_sites: usize) -> Result<Self> {
        Self::bipartition(n_sites, &(0..n_sites / 2).collect::<Vec<_>>())
    }

    /// Every site its own block.
    pub fn full(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, (0..n_sites).map(|s| vec![s]).collect())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

fn two_blocks(cut: &Partition, n_sites: usize) -> Result<(&[usize], &[usize])> {
    if cut.n_sites != n_sites {
        return Err(Error::BadPartition(format!(
            "partition covers {} sites, state has {n_sites}",
            cut.n_sites
        )));
    }
    match cut.blocks.as_slice() {
        [a, b] => Ok((a, b)),
        _ => Err(Error::BadPartition(format!(
            "expected 2 blocks, got {}",
            cut.blocks.len()
        ))),
    }
}

fn block_index(label: usize, block: &[usize], n_sites: usize) -> usize {
    block
        .iter()
        .fold(0, |acc, &s| (acc << 1) | site_bit(label, s, n_sites) as usize)
}

/// Reduced density matrix of `psi` on `keep` (sites in ascending order, first most significant).
pub fn reduced_density_matrix<S: Real>(
    psi: &PureState<S>,
    keep: &[usize],
    trace_out: &[usize],
) -> ComplexMatrix<S> {
    let n = psi.n_sites();
    let da = 1usize << keep.len();
    let db = 1usize << trace_out.len();
    let mut m = vec![Complex::new(S::zero(), S::zero()); da * db];
    for (x, &amp) in psi.amplitudes().iter().enumerate() {
        m[block_index(x, keep, n) * db + block_index(x, trace_out, n)] = amp;
    }
    ComplexMatrix::from_fn(da, |i, j| {
        (0..db).fold(Complex::new(S::zero(), S::zero()), |acc, k| {
            acc + m[i * db + k] * m[j * db + k].conj()
        })
    })
}

/// Squared Schmidt coefficients across a two-block cut, descending, summing to 1.
pub fn schmidt_coefficients<S: Real>(psi: &PureState<S>, cut: &Partition) -> Result<Vec<S>> {
    let (a, b) = two_blocks(cut, psi.n_sites())?;
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let rho = reduced_density_matrix(psi, small, large);
    // eigenvalues at rounding level would otherwise contribute ~√eps to Σ√λ
    let floor = S::tol(0.0);
    let mut vals: Vec<S> = hermitian_eigenvalues(&rho)?
        .into_iter()
        .map(|v| if v < floor { S::zero() } else { v })
        .collect();
    vals.reverse();
    let total: S = vals.iter().copied().sum();
    Ok(vals.into_iter().map(|v| v / total).collect())
}

/// Exact pure-state robustness across a cut: 1 + R = (Σᵢ √λᵢ)².
pub fn bipartite_pure_robustness<S: Real>(
    psi: &PureState<S>,
    cut: &Partition,
) -> Result<RobustnessBound<S>> {
    let lambdas = schmidt_coefficients(psi, cut)?;
    let root_sum: S = lambdas.iter().map(|l| l.sqrt()).sum();
    Ok(RobustnessBound {
        one_plus_r: (root_sum * root_sum).max(S::one()),
        kind: BoundKind::Exact,
        source: BoundSource::BipartitePureSchmidt,
    })
}

/// ln(1+R) for |S(n,k)⟩: −ln C(n,k) + k ln(n/k) + (n−k) ln(n/(n−k)).
pub fn dicke_ln_one_plus_r<S: Real>(n: u64, k: u64) -> Result<S> {
    if k == 0 || k >= n {
        return Err(if k > n {
            Error::BadExcitationCount {
                n: n as usize,
                k: k as usize,
            }
        } else {
            Error::SeparableCase {
                n: n as usize,
                k: k as usize,
            }
        });
    }
    let nf = S::from_u64(n).unwrap();
    let kf = S::from_u64(k).unwrap();
    let rest = nf - kf;
    let ln_c: S = ln_binomial(n, k).unwrap();
    Ok(-ln_c + kf * (nf / kf).ln() + rest * (nf / rest).ln())
}

/// Exact global robustness of the Dicke state |S(n,k)⟩, which equals 2^{E_R}.
pub fn dicke_robustness<S: Real>(n: u64, k: u64) -> Result<RobustnessBound<S>> {
    Ok(RobustnessBound {
        one_plus_r: dicke_ln_one_plus_r::<S>(n, k)?.exp(),
        kind: BoundKind::Exact,
        source: BoundSource::ClosedFormDicke,
    })
}

/// Relative entropy of entanglement of |S(n,k)⟩ in bits.
pub fn dicke_relative_entropy<S: Real>(n: u64, k: u64) -> Result<S> {
    Ok(dicke_ln_one_plus_r::<S>(n, k)? / S::LN_2())
}

/// Large-n value √n of 1 + R for |S(n, n/2)⟩.
pub fn dicke_half_asymptotic<S: Real>(n: u64) -> Result<S> {
    if n % 2 == 1 {
        return Err(Error::OddN(n as usize));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n={n} must be at least 2")));
    }
    Ok(S::from_u64(n).unwrap().sqrt())
}

/// 1 + R ≥ 2^{E_R}.
pub fn bound_from_relative_entropy<S: Real>(e_r: S) -> Result<RobustnessBound<S>> {
    bound_from_log2(e_r, BoundSource::RelativeEntropyInput)
}

/// 1 + R ≥ 2^{E_R} ≥ 2^{E_G}; `e_g` must be the exact geometric measure (or a lower bound on it).
pub fn bound_from_geometric<S: Real>(e_g: S) -> Result<RobustnessBound<S>> {
    bound_from_log2(e_g, BoundSource::GeometricInput)
}

fn bound_from_log2<S: Real>(e: S, source: BoundSource) -> Result<RobustnessBound<S>> {
    if !(e >= S::zero()) || !e.is_finite() {
        return Err(Error::NegativeEntanglement(e.to_f64_lossy()));
    }
    Ok(RobustnessBound {
        one_plus_r: e.exp2(),
        kind: BoundKind::LowerBound,
        source,
    })
}

fn sigma_yy<S: Real>() -> ComplexMatrix<S> {
    let y = ComplexMatrix::pauli_y();
    kron(&y, &y).unwrap()
}

/// μ₁ − μ₂ − μ₃ − μ₄ with μᵢ the descending square roots of the eigenvalues of ρ·ρ̃,
/// ρ̃ = (σy⊗σy)ρ*(σy⊗σy). Positive exactly when the state is entangled.
pub fn wootters_margin<S: Real>(rho: &DensityMatrix<S>) -> Result<S> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension {
            expected: 4,
            got: rho.dim(),
        });
    }
    let m = rho.matrix();
    let yy = sigma_yy();
    let tilde = yy.matmul(&m.conj()).matmul(&yy);
    // eigenvalues of ρρ̃ equal those of the Hermitian √ρ ρ̃ √ρ
    let sqrt_rho = hermitian_eigendecompose(m)?.map_spectrum(|l| l.max(S::zero()).sqrt());
    let mut sym = sqrt_rho.matmul(&tilde).matmul(&sqrt_rho);
    sym = (&sym + &sym.adjoint()).scale(S::lit(0.5));
    let mut mu: Vec<S> = hermitian_eigenvalues(&sym)?
        .into_iter()
        .map(|l| l.max(S::zero()).sqrt())
        .collect();
    mu.reverse();
    Ok(mu[0] - mu[1] - mu[2] - mu[3])
}

/// Wootters concurrence max(0, μ₁ − μ₂ − μ₃ − μ₄).
pub fn concurrence_two_qubit<S: Real>(rho: &DensityMatrix<S>) -> Result<S> {
    Ok(wootters_margin(rho)?.max(S::zero()))
}

/// `kT` in `[lo, hi]` above which the thermal state of the two-qubit `h` has zero
/// concurrence: the first positive-to-zero change of the Wootters margin on a log grid,
/// refined by bisection.
///
/// Returns `None` when no entangled grid point is found or the state is still entangled at `hi`.
pub fn concurrence_vanishing_temperature<S: Real>(
    h: &ComplexMatrix<S>,
    lo: S,
    hi: S,
    rel_tol: S,
) -> Result<Option<S>> {
    let margin = |kt: S| -> Result<S> {
        wootters_margin(&thermal_density_matrix(h, &ThermalPoint::new(kt)?)?)
    };
    let steps = 400;
    let ratio = (hi / lo).ln() / S::from_usize_lossy(steps);
    let mut last_entangled = None;
    for i in 0..=steps {
        let kt = match i {
            0 => lo,
            i if i == steps => hi,
            i => lo * (ratio * S::from_usize_lossy(i)).exp(),
        };
        if margin(kt)? > S::zero() {
            last_entangled = Some(kt);
        } else if let Some(prev) = last_entangled {
            let f = |x: S| margin(x).unwrap_or(S::nan());
            return bisect_log(f, prev, kt, rel_tol).map(Some);
        }
    }
    Ok(None)
}

/// Smallest eigenvalue of the partial transpose over `subset`; negative certifies entanglement.
pub fn ppt_min_eigenvalue<S: Real>(
    rho: &DensityMatrix<S>,
    local_dims: &[usize],
    subset: &[usize],
) -> Result<S> {
    let pt = partial_transpose(rho.matrix(), local_dims, subset)?;
    Ok(hermitian_eigenvalues(&pt)?[0])
}

/// Settings for the alternating single-site optimization of the product-state overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlsConfig {
    pub restarts: usize,
    /// Stop a run once a sweep improves the overlap by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for AlsConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            tol: 1e-12,
            max_sweeps: 500,
            seed: 0x5eed,
        }
    }
}

/// Best product-state overlap found by ALS.
///
/// `e_g_upper = −log₂ Λ²` over-estimates the geometric measure (a local optimum can only
/// under-estimate the maximal overlap), so it is not a valid robustness lower bound and
/// deliberately has no conversion into [`RobustnessBound`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricEstimate<S> {
    pub overlap: S,
    pub overlap_sq: S,
    pub e_g_upper: S,
    /// Overlap after each sweep of the best run.
    pub best_history: Vec<S>,
}

/// Overlap trace of one ALS run, starting from the initial product state.
#[derive(Debug, Clone, PartialEq)]
pub struct AlsRun<S> {
    pub history: Vec<S>,
    pub factors: Vec<[Complex<S>; 2]>,
}

fn random_unit_qubit<S: Real>(rng: &mut ChaCha8Rng) -> [Complex<S>; 2] {
    let mut g = || S::lit(rng.sample::<f64, _>(StandardNormal));
    let mut v = [Complex::new(g(), g()), Complex::new(g(), g())];
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    for c in &mut v {
        *c = *c / norm;
    }
    v
}

fn product_overlap<S: Real>(psi: &PureState<S>, factors: &[[Complex<S>; 2]]) -> Complex<S> {
    let n = psi.n_sites();
    psi.amplitudes()
        .iter()
        .enumerate()
        .fold(Complex::new(S::zero(), S::zero()), |acc, (x, &a)| {
            let mut w = a;
            for (s, f) in factors.iter().enumerate() {
                w *= f[site_bit(x, s, n) as usize].conj();
            }
            acc + w
        })
}

/// Runs ALS from the given product state until the per-sweep gain drops below `tol`.
pub fn als_run<S: Real>(
    psi: &PureState<S>,
    mut factors: Vec<[Complex<S>; 2]>,
    tol: S,
    max_sweeps: usize,
) -> AlsRun<S> {
    let n = psi.n_sites();
    let zero = Complex::new(S::zero(), S::zero());
    let mut history = vec![product_overlap(psi, &factors).norm()];
    for _ in 0..max_sweeps {
        for site in 0..n {
            // contraction of ψ with every other site's conjugated vector
            let mut c = [zero, zero];
            for (x, &a) in psi.amplitudes().iter().enumerate() {
                let mut w = a;
                for (s, f) in factors.iter().enumerate() {
                    if s != site {
                        w *= f[site_bit(x, s, n) as usize].conj();
                    }
                }
                c[site_bit(x, site, n) as usize] += w;
            }
            let norm = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
            if norm > S::zero() {
                factors[site] = [c[0] / norm, c[1] / norm];
            }
        }
        let now = product_overlap(psi, &factors).norm();
        let prev = *history.last().unwrap();
        history.push(now);
        if now - prev < tol {
            break;
        }
    }
    AlsRun { history, factors }
}

/// Geometric-measure diagnostic from `cfg.restarts` random ALS starts.
pub fn geometric_measure_als<S: Real>(
    psi: &PureState<S>,
    cfg: &AlsConfig,
) -> Result<GeometricEstimate<S>> {
    if psi.n_sites() > crate::systems::MAX_EXPLICIT_SITES {
        return Err(Error::DimensionTooLarge {
            dim: psi.dim(),
            limit: crate::numerics::MAX_DIM,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<AlsRun<S>> = None;
    for _ in 0..cfg.restarts.max(1) {
        let init = (0..psi.n_sites()).map(|_| random_unit_qubit(&mut rng)).collect();
        let run = als_run(psi, init, S::lit(cfg.tol), cfg.max_sweeps);
        let better = best
            .as_ref()
            .is_none_or(|b| run.history.last() > b.history.last());
        if better {
            best = Some(run);
        }
    }
    let best = best.unwrap();
    let overlap = (*best.history.last().unwrap()).min(S::one());
    let overlap_sq = overlap * overlap;
    Ok(GeometricEstimate {
        overlap,
        overlap_sq,
        e_g_upper: -overlap_sq.log2(),
        best_history: best.history,
    })
}

/// Closed-form maximal squared product overlap of |S(n,k)⟩: C(n,k)(k/n)^k((n−k)/n)^{n−k}.
pub fn dicke_max_overlap_sq<S: Real>(n: u64, k: u64) -> Result<S> {
    if k > n {
        return Err(Error::BadExcitationCount {
            n: n as usize,
            k: k as usize,
        });
    }
    if k == 0 || k == n {
        return Ok(S::one());
    }
    Ok((-dicke_ln_one_plus_r::<S>(n, k)?).exp())
}

/// Hilbert–Schmidt random density matrix GG†/tr(GG†) with G complex Gaussian.
pub fn random_density_matrix<S: Real>(dim: usize, rng: &mut impl Rng) -> DensityMatrix<S> {
    let mut g = || S::lit(rng.sample::<f64, _>(StandardNormal));
    let gm = ComplexMatrix::from_fn(dim, |_, _| Complex::new(g(), g()));
    let w = gm.matmul(&gm.adjoint());
    let tr = w.trace().re;
    let mut m = w.scale(S::one() / tr);
    for i in 0..dim {
        m[(i, i)].im = S::zero();
    }
    DensityMatrix::new(m).expect("GG† is Hermitian with unit trace after scaling")
}

/// Exact C(n,k) as a float, falling back to the log form when it overflows `u64`.
pub fn binomial_real<S: Real>(n: u64, k: u64) -> S {
    match binomial(n, k) {
        Some(c) => S::from_u64(c).unwrap(),
        None => ln_binomial::<S>(n, k).map_or(S::nan(), S::exp),
    }
}
