//! Hamiltonians, analytic spectra and reference states for the three model families:
//! the Heisenberg dimer in a field, the toy many-level spectrum, and graph/stabilizer systems.
//!
//! Qubit ordering: site 0 is the most significant bit of a basis label, so `|01⟩` is index 1.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{binomial, kron_all, ComplexMatrix, MAX_DIM};
use crate::scalar::Real;

/// Largest site count for explicit 2^n matrices and state vectors.
pub const MAX_EXPLICIT_SITES: usize = 12;
/// Largest site count accepted by [`dicke_state`].
pub const MAX_DICKE_SITES: usize = 20;

/// Two spins with Heisenberg coupling `j` in a longitudinal field `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams<S> {
    pub b: S,
    pub j: S,
}

impl<S: Real> DimerParams<S> {
    pub fn new(b: S, j: S) -> Result<Self> {
        if !(b >= S::zero() && j >= S::zero()) || !b.is_finite() || !j.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dimer needs finite B >= 0 and J >= 0, got B={b}, J={j}"
            )));
        }
        Ok(Self { b, j })
    }

    /// Singlet is the unique ground state iff B < 4J.
    pub fn singlet_is_ground(&self) -> bool {
        self.b < S::lit(4.0) * self.j
    }
}

/// Spectrum `E0` plus `E0 + m^alpha * delta` for `m = 1..levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToySpectrumParams<S> {
    pub e0: S,
    pub delta: S,
    pub alpha: S,
    /// Total number of states `D`.
    pub levels: u64,
}

impl<S: Real> ToySpectrumParams<S> {
    pub fn new(e0: S, delta: S, alpha: S, levels: u64) -> Result<Self> {
        if !e0.is_finite() || !(delta > S::zero()) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "toy spectrum needs finite E0 and delta > 0, got E0={e0}, delta={delta}"
            )));
        }
        if !(alpha >= S::zero() && alpha <= S::one()) {
            return Err(Error::InvalidParameter(format!("alpha={alpha} outside [0, 1]")));
        }
        if levels < 2 {
            return Err(Error::InvalidParameter(format!("D={levels} must be >= 2")));
        }
        Ok(Self {
            e0,
            delta,
            alpha,
            levels,
        })
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::BadGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::BadGraph(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self { n, edges: set })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn ring(n: usize) -> Self {
        if n < 3 {
            return Self::path(n);
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Vertex 0 joined to every other vertex.
    pub fn star(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (0, i))).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(u, v)| {
                if u == i {
                    Some(v)
                } else if v == i {
                    Some(u)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Parses the edge-list text format: first line `n`, then one `u v` pair per line.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("'{s}': {e}"),
                })
            };
            match (n, fields.as_slice()) {
                (None, [count]) => n = Some(parse(count)?),
                (None, _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected vertex count".into(),
                    })
                }
                (Some(_), [u, v]) => edges.push((parse(u)?, parse(v)?)),
                (Some(_), _) => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected 'u v', got '{line}'"),
                    })
                }
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing vertex count".into(),
        })?;
        Self::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Normalized qubit state vector of length 2^n_sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<S> {
    n_sites: usize,
    amplitudes: Vec<Complex<S>>,
}

impl<S: Real> PureState<S> {
    pub fn new(n_sites: usize, amplitudes: Vec<Complex<S>>) -> Result<Self> {
        let expected = 1usize
            .checked_shl(n_sites as u32)
            .filter(|_| n_sites < usize::BITS as usize)
            .ok_or(Error::DimensionTooLarge {
                dim: usize::MAX,
                limit: MAX_DIM,
            })?;
        if amplitudes.len() != expected {
            return Err(Error::BadDimension {
                expected,
                got: amplitudes.len(),
            });
        }
        let norm_sq: S = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - S::one()).abs() > S::tol(1e-12) {
            return Err(Error::NotNormalized(norm_sq.to_f64_lossy()));
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_sites: usize, mut amplitudes: Vec<Complex<S>>) -> Result<Self> {
        let norm: S = amplitudes.iter().map(|a| a.norm_sqr()).sum::<S>().sqrt();
        if !(norm > S::zero()) {
            return Err(Error::NotNormalized(0.0));
        }
        for a in &mut amplitudes {
            *a = *a / norm;
        }
        Self::new(n_sites, amplitudes)
    }

    /// Computational basis state; `label` uses site 0 as the most significant bit.
    pub fn basis(n_sites: usize, label: usize) -> Result<Self> {
        let dim = 1usize << n_sites;
        if label >= dim {
            return Err(Error::IndexOutOfRange {
                index: label,
                len: dim,
            });
        }
        let mut amps = vec![Complex::new(S::zero(), S::zero()); dim];
        amps[label] = Complex::new(S::one(), S::zero());
        Self::new(n_sites, amps)
    }

    /// (|01⟩ − |10⟩)/√2
    pub fn singlet() -> Self {
        let h = S::FRAC_1_SQRT_2();
        let z = S::zero();
        Self::new(
            2,
            vec![
                Complex::new(z, z),
                Complex::new(h, z),
                Complex::new(-h, z),
                Complex::new(z, z),
            ],
        )
        .unwrap()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: usize) -> Complex<S> {
        self.amplitudes[label]
    }

    pub fn inner(&self, other: &Self) -> Complex<S> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(S::zero(), S::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Relabels sites: the amplitude of basis label x moves to the label whose site
    /// `perm[i]` carries the bit of site `i` in x.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_sites;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let mut out = vec![Complex::new(S::zero(), S::zero()); self.dim()];
        for (x, &a) in self.amplitudes.iter().enumerate() {
            let mut y = 0;
            for (i, &p) in perm.iter().enumerate() {
                if site_bit(x, i, n) {
                    y |= 1 << (n - 1 - p);
                }
            }
            out[y] = a;
        }
        Ok(Self {
            n_sites: n,
            amplitudes: out,
        })
    }
}

#[inline]
pub(crate) fn site_bit(label: usize, site: usize, n_sites: usize) -> bool {
    (label >> (n_sites - 1 - site)) & 1 == 1
}

/// One energy level. `degeneracy` is `None` when the count overflows `u64`;
/// `ln_degeneracy` is always available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level<S> {
    pub energy: S,
    pub degeneracy: Option<u64>,
    pub ln_degeneracy: S,
}

impl<S: Real> Level<S> {
    pub fn new(energy: S, degeneracy: u64) -> Self {
        Self {
            energy,
            degeneracy: Some(degeneracy),
            ln_degeneracy: S::from_u64(degeneracy).unwrap_or_else(S::infinity).ln(),
        }
    }
}

/// Energy levels in strictly ascending order with their degeneracies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<S> {
    levels: Vec<Level<S>>,
}

impl<S: Real> Spectrum<S> {
    pub fn new(levels: Vec<Level<S>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("spectrum has no levels".into()));
        }
        for l in &levels {
            if !l.energy.is_finite() || l.degeneracy == Some(0) || !l.ln_degeneracy.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "invalid level E={} deg={:?}",
                    l.energy, l.degeneracy
                )));
            }
        }
        if levels.windows(2).any(|w| !(w[0].energy < w[1].energy)) {
            return Err(Error::InvalidParameter(
                "level energies must be strictly ascending".into(),
            ));
        }
        Ok(Self { levels })
    }

    /// Builds from (energy, degeneracy) pairs in any order, merging near-equal energies.
    pub fn from_pairs(pairs: &[(S, u64)]) -> Result<Self> {
        let mut sorted: Vec<(S, u64)> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut levels: Vec<Level<S>> = Vec::new();
        let mut anchor = S::zero();
        for (e, d) in sorted {
            match levels.last_mut() {
                Some(last) if same_level(anchor, e) => {
                    let total = last.degeneracy.and_then(|x| x.checked_add(d));
                    *last = match total {
                        Some(t) => Level::new(last.energy, t),
                        None => Level {
                            energy: last.energy,
                            degeneracy: None,
                            ln_degeneracy: crate::numerics::log_sum_exp([
                                last.ln_degeneracy,
                                S::from_u64(d).unwrap().ln(),
                            ]),
                        },
                    };
                }
                _ => {
                    anchor = e;
                    levels.push(Level::new(e, d));
                }
            }
        }
        Self::new(levels)
    }

    /// Groups raw eigenvalues (e.g. from diagonalization) into degenerate levels.
    pub fn from_eigenvalues(eigenvalues: &[S]) -> Result<Self> {
        let pairs: Vec<(S, u64)> = eigenvalues.iter().map(|&e| (e, 1)).collect();
        Self::from_pairs(&pairs)
    }

    pub fn levels(&self) -> &[Level<S>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn ground(&self) -> &Level<S> {
        &self.levels[0]
    }

    pub fn ground_energy(&self) -> S {
        self.levels[0].energy
    }

    /// E1 − E0, or `None` for a single-level spectrum.
    pub fn gap(&self) -> Option<S> {
        self.levels.get(1).map(|l| l.energy - self.levels[0].energy)
    }

    /// E_max − E0.
    pub fn spread(&self) -> S {
        self.levels.last().unwrap().energy - self.levels[0].energy
    }

    /// ln(Σ degeneracies).
    pub fn ln_dimension(&self) -> S {
        crate::numerics::log_sum_exp(self.levels.iter().map(|l| l.ln_degeneracy))
    }

    pub fn dimension(&self) -> Option<u64> {
        self.levels
            .iter()
            .try_fold(0u64, |acc, l| acc.checked_add(l.degeneracy?))
    }

    pub fn degeneracies(&self) -> Vec<Option<u64>> {
        self.levels.iter().map(|l| l.degeneracy).collect()
    }

    pub fn energies(&self) -> Vec<S> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Index of the level at energy `e` (within the merge tolerance).
    pub fn level_index(&self, e: S) -> Option<usize> {
        self.levels.iter().position(|l| same_level(l.energy, e))
    }
}

/// Merge rule: |a − b| ≤ 1e-9·max(|a|, 1).
fn same_level<S: Real>(anchor: S, e: S) -> bool {
    (e - anchor).abs() <= S::tol(1e-9) * anchor.abs().max(S::one())
}

/// −(B/2)(σz⊗1 + 1⊗σz) + J(σx⊗σx + σy⊗σy + σz⊗σz).
///
/// `B` is the Zeeman splitting of a single spin and `|0⟩` is aligned with the field, which
/// gives the level set {J+B, J, J−B, −3J} with `|00⟩` at J−B.
pub fn build_dimer_hamiltonian<S: Real>(p: &DimerParams<S>) -> ComplexMatrix<S> {
    let x = ComplexMatrix::pauli_x();
    let y = ComplexMatrix::pauli_y();
    let z = ComplexMatrix::pauli_z();
    let id = ComplexMatrix::identity(2);
    let pair = |a: &ComplexMatrix<S>, b: &ComplexMatrix<S>| kron_all(&[a.clone(), b.clone()]).unwrap();
    let zeeman = &pair(&z, &id) + &pair(&id, &z);
    let exchange = &(&pair(&x, &x) + &pair(&y, &y)) + &pair(&z, &z);
    &zeeman.scale(-p.b / S::lit(2.0)) + &exchange.scale(p.j)
}

/// Analytic dimer levels {J+B, J, J−B, −3J}, merged where they coincide.
pub fn dimer_spectrum<S: Real>(p: &DimerParams<S>) -> Spectrum<S> {
    let (b, j) = (p.b, p.j);
    Spectrum::from_pairs(&[(j + b, 1), (j, 1), (j - b, 1), (-S::lit(3.0) * j, 1)])
        .expect("finite dimer levels")
}

/// Ground level E0 plus E0 + m^α·Δ for m = 1..D−1; coinciding energies share a level.
pub fn toy_spectrum<S: Real>(p: &ToySpectrumParams<S>) -> Spectrum<S> {
    let mut levels = vec![Level::new(p.e0, 1)];
    if p.alpha == S::zero() {
        levels.push(Level::new(p.e0 + p.delta, p.levels - 1));
        return Spectrum::new(levels).expect("valid toy spectrum");
    }
    let mut pairs = Vec::with_capacity(p.levels as usize);
    pairs.push((p.e0, 1));
    for m in 1..p.levels {
        let mf = S::from_u64(m).unwrap();
        pairs.push((p.e0 + mf.powf(p.alpha) * p.delta, 1));
    }
    Spectrum::from_pairs(&pairs).expect("valid toy spectrum")
}

/// Symmetric state with `k` excitations on `n` sites: amplitude 1/√C(n,k) on every
/// basis label of Hamming weight `k`.
pub fn dicke_state<S: Real>(n: usize, k: usize) -> Result<PureState<S>> {
    if k > n || n == 0 {
        return Err(Error::BadExcitationCount { n, k });
    }
    if n > MAX_DICKE_SITES {
        return Err(Error::DimensionTooLarge {
            dim: 1 << n,
            limit: 1 << MAX_DICKE_SITES,
        });
    }
    let count = binomial(n as u64, k as u64).expect("C(n,k) fits for n <= 20");
    let amp = Complex::new(S::one() / S::from_u64(count).unwrap().sqrt(), S::zero());
    let zero = Complex::new(S::zero(), S::zero());
    let amps = (0..1usize << n)
        .map(|x| if x.count_ones() as usize == k { amp } else { zero })
        .collect();
    PureState::new(n, amps)
}

fn check_explicit(n: usize) -> Result<()> {
    if n > MAX_EXPLICIT_SITES {
        return Err(Error::GraphTooLarge {
            n,
            limit: MAX_EXPLICIT_SITES,
        });
    }
    if n == 0 {
        return Err(Error::BadGraph("graph has no vertices".into()));
    }
    Ok(())
}

/// −B Σᵢ Kᵢ with Kᵢ = σx on site i and σz on each neighbor of i.
///
/// Each Kᵢ is a signed permutation, Kᵢ|x⟩ = (−1)^{Σ_{j∈N(i)} x_j} |x ⊕ eᵢ⟩, so the matrix is
/// filled entry by entry rather than through Kronecker products.
pub fn build_stabilizer_hamiltonian<S: Real>(g: &Graph, b: S) -> Result<ComplexMatrix<S>> {
    let n = g.n();
    check_explicit(n)?;
    if !(b > S::zero()) {
        return Err(Error::InvalidParameter(format!("field B={b} must be positive")));
    }
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim);
    for i in 0..n {
        let flip = 1usize << (n - 1 - i);
        let nbr_mask = g
            .neighbors(i)
            .into_iter()
            .fold(0usize, |m, j| m | 1 << (n - 1 - j));
        for x in 0..dim {
            let sign = if (x & nbr_mask).count_ones() % 2 == 0 {
                S::one()
            } else {
                -S::one()
            };
            // ⟨x ⊕ eᵢ| Kᵢ |x⟩ = sign(x)
            h[(x ^ flip, x)] -= Complex::new(b * sign, S::zero());
        }
    }
    Ok(h)
}

/// Kᵢ assembled as an explicit Kronecker product of single-site Paulis.
pub fn stabilizer_generator<S: Real>(g: &Graph, i: usize) -> Result<ComplexMatrix<S>> {
    check_explicit(g.n())?;
    let nbrs = g.neighbors(i);
    let factors: Vec<ComplexMatrix<S>> = (0..g.n())
        .map(|s| {
            if s == i {
                ComplexMatrix::pauli_x()
            } else if nbrs.contains(&s) {
                ComplexMatrix::pauli_z()
            } else {
                ComplexMatrix::identity(2)
            }
        })
        .collect();
    kron_all(&factors)
}

/// Levels B(−n+2i) with degeneracy C(n,i), i = 0..n.
pub fn stabilizer_spectrum<S: Real>(n: u64, b: S) -> Result<Spectrum<S>> {
    if n == 0 || !(b > S::zero()) {
        return Err(Error::InvalidParameter(format!(
            "stabilizer spectrum needs n >= 1 and B > 0, got n={n}, B={b}"
        )));
    }
    let nf = S::from_u64(n).unwrap();
    let mut levels = Vec::with_capacity(n as usize + 1);
    let mut ln_deg = S::zero();
    let mut exact: Option<u128> = Some(1);
    for i in 0..=n {
        let fi = S::from_u64(i).unwrap();
        levels.push(Level {
            energy: b * (S::lit(2.0) * fi - nf),
            degeneracy: exact.and_then(|d| u64::try_from(d).ok()),
            ln_degeneracy: ln_deg,
        });
        // C(n, i+1) = C(n, i)·(n − i)/(i + 1)
        if i < n {
            ln_deg += (S::from_u64(n - i).unwrap() / S::from_u64(i + 1).unwrap()).ln();
            exact = exact
                .and_then(|d| d.checked_mul((n - i) as u128))
                .map(|d| d / (i + 1) as u128)
                .filter(|&d| d <= u64::MAX as u128);
        }
    }
    Spectrum::new(levels)
}

/// Graph state: CZ on every edge of |+⟩^⊗n. Amplitude of x is (−1)^{#edges with both ends 1}/√2ⁿ.
pub fn graph_state<S: Real>(g: &Graph) -> Result<PureState<S>> {
    let n = g.n();
    check_explicit(n)?;
    let dim = 1usize << n;
    let amp = S::one() / S::from_usize_lossy(dim).sqrt();
    let amps = (0..dim)
        .map(|x| {
            let odd = g
                .edges()
                .filter(|&(u, v)| site_bit(x, u, n) && site_bit(x, v, n))
                .count()
                % 2
                == 1;
            Complex::new(if odd { -amp } else { amp }, S::zero())
        })
        .collect();
    PureState::new(n, amps)
}

/// Two-qubit computational-basis helper used by the dimer diagnostics.
pub fn dimer_ground_state<S: Real>(p: &DimerParams<S>) -> PureState<S> {
    if p.singlet_is_ground() {
        PureState::singlet()
    } else {
        PureState::basis(2, 0).unwrap()
    }
}
