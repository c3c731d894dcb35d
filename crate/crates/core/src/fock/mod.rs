//! Sparse bosonic Fock states over a fixed set of modes.
//!
//! States are immutable values: every operation returns a new state. Basis
//! terms are keyed by [`OccupationVector`] in a `BTreeMap`, which keeps
//! iteration order (and therefore floating-point summation order) fixed.

mod permanent;

pub use permanent::{permanent, permanent_amplitude, MAX_PERMANENT_PHOTONS};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ZERO};

/// Amplitudes below this modulus are dropped after each operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Occupation numbers of a Fock basis state.
///
/// Stored as the sorted list of occupied mode indices, one entry per boson,
/// so `[1, 1, 4]` means two bosons in mode 1 and one in mode 4. Equality and
/// ordering are those of the dense count vector's canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn from_modes(mut modes: Vec<usize>) -> Self {
        modes.sort_unstable();
        OccupationVector(modes.into_iter().map(|m| m as u32).collect())
    }

    pub fn from_counts(counts: &[u32]) -> Self {
        let mut bosons = Vec::new();
        for (m, &c) in counts.iter().enumerate() {
            bosons.extend(std::iter::repeat_n(m as u32, c as usize));
        }
        OccupationVector(bosons)
    }

    pub fn total(&self) -> usize {
        self.0.len()
    }

    /// Dense count vector of length `mode_count`.
    pub fn counts(&self, mode_count: usize) -> Vec<u32> {
        let mut counts = vec![0; mode_count];
        for &m in &self.0 {
            counts[m as usize] += 1;
        }
        counts
    }

    pub fn count(&self, mode: usize) -> u32 {
        self.0.iter().filter(|&&m| m as usize == mode).count() as u32
    }

    /// Occupied modes with their counts, ascending.
    pub fn occupied(&self) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        for &m in &self.0 {
            match out.last_mut() {
                Some((last, c)) if *last == m as usize => *c += 1,
                _ => out.push((m as usize, 1)),
            }
        }
        out
    }

    /// One mode index per boson, ascending.
    pub fn bosons(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&m| m as usize)
    }

    /// `∏_m n_m!`
    pub fn factorial_product(&self) -> f64 {
        self.occupied().iter().map(|&(_, c)| factorial(c)).product()
    }

    fn max_mode(&self) -> Option<usize> {
        self.0.last().map(|&m| m as usize)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (m, c)) in self.occupied().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}:{c}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// A unitary acting on a listed subset of modes, identity elsewhere.
#[derive(Debug, Clone)]
pub struct ModeUnitary {
    support: Vec<usize>,
    matrix: Matrix,
}

impl ModeUnitary {
    pub fn new(support: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != support.len() || matrix.ncols() != support.len() {
            return Err(Error::Validation(format!(
                "mode unitary is {:?} but support lists {} modes",
                matrix.dim(),
                support.len()
            )));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!(
                "mode unitary support has repeated modes: {support:?}"
            )));
        }
        linalg::ensure_unitary(&matrix, linalg::UNITARY_TOL, "mode unitary")?;
        Ok(ModeUnitary { support, matrix })
    }

    /// Acts on all `matrix.nrows()` modes.
    pub fn full(matrix: Matrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new((0..n).collect(), matrix)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Image of each mode's creation operator; `None` leaves the mode untouched.
pub(crate) type SparseRows = Vec<Option<Vec<(usize, Complex64)>>>;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    mode_count: usize,
    walkers: usize,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
}

impl FockState {
    /// Basis state `∏ a_m† |0⟩`, normalised. Repeated modes give multiple bosons.
    pub fn create(modes: &[usize], mode_count: usize) -> Result<Self> {
        check_modes(modes.iter().copied(), mode_count)?;
        let key = OccupationVector::from_modes(modes.to_vec());
        Ok(FockState {
            mode_count,
            walkers: modes.len(),
            amplitudes: BTreeMap::from([(key, Complex64::new(1.0, 0.0))]),
        })
    }

    /// `∏_k (Σ_m α_km a_m†) |0⟩` normalised: one entry per walker, each a
    /// superposition over modes.
    pub fn from_walkers(walkers: &[Vec<(usize, Complex64)>], mode_count: usize) -> Result<Self> {
        for w in walkers {
            check_modes(w.iter().map(|&(m, _)| m), mode_count)?;
        }
        let mut amplitudes = BTreeMap::new();
        let mut chosen = Vec::with_capacity(walkers.len());
        fn rec(
            walkers: &[Vec<(usize, Complex64)>],
            chosen: &mut Vec<usize>,
            coeff: Complex64,
            out: &mut BTreeMap<OccupationVector, Complex64>,
        ) {
            let Some((first, rest)) = walkers.split_first() else {
                let key = OccupationVector::from_modes(chosen.clone());
                let amp = coeff * key.factorial_product().sqrt();
                *out.entry(key).or_insert(ZERO) += amp;
                return;
            };
            for &(m, a) in first {
                chosen.push(m);
                rec(rest, chosen, coeff * a, out);
                chosen.pop();
            }
        }
        rec(
            walkers,
            &mut chosen,
            Complex64::new(1.0, 0.0),
            &mut amplitudes,
        );
        FockState {
            mode_count,
            walkers: walkers.len(),
            amplitudes,
        }
        .normalized()
    }

    /// Builds a state from explicit basis terms (summing duplicates), then normalises.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (OccupationVector, Complex64)>,
        mode_count: usize,
    ) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        let mut walkers = None;
        for (key, amp) in terms {
            if let Some(m) = key.max_mode() {
                if m >= mode_count {
                    return Err(Error::lookup("mode index", m));
                }
            }
            match walkers {
                None => walkers = Some(key.total()),
                Some(n) if n != key.total() => {
                    return Err(Error::PhotonNumber {
                        input: n,
                        output: key.total(),
                    })
                }
                _ => {}
            }
            *amplitudes.entry(key).or_insert(ZERO) += amp;
        }
        FockState {
            mode_count,
            walkers: walkers.unwrap_or(0),
            amplitudes,
        }
        .normalized()
    }

    fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation("state has zero norm".into()));
        }
        for a in self.amplitudes.values_mut() {
            *a /= norm;
        }
        self.prune();
        Ok(self)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Number of bosons carried by every basis term.
    pub fn walkers(&self) -> usize {
        self.walkers
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, Complex64)> {
        self.amplitudes.iter().map(|(k, &a)| (k, a))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, key: &OccupationVector) -> Complex64 {
        self.amplitudes.get(key).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    pub fn inner_product(&self, other: &FockState) -> Result<Complex64> {
        if self.mode_count != other.mode_count {
            return Err(Error::Validation(format!(
                "inner product of states over {} and {} modes",
                self.mode_count, other.mode_count
            )));
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        Ok(small
            .amplitudes
            .iter()
            .filter_map(|(k, &a)| {
                large.amplitudes.get(k).map(|&b| {
                    if conj_small {
                        a.conj() * b
                    } else {
                        b.conj() * a
                    }
                })
            })
            .sum())
    }

    /// Replaces every creation operator on the support by its image under `u`
    /// and multiplies out.
    pub fn apply_mode_unitary(&self, u: &ModeUnitary) -> Result<FockState> {
        check_modes(u.support.iter().copied(), self.mode_count)?;
        let mut rows: SparseRows = vec![None; self.mode_count];
        for (a, &i) in u.support.iter().enumerate() {
            let row = u
                .support
                .iter()
                .enumerate()
                .filter_map(|(b, &j)| {
                    let z = u.matrix[[a, b]];
                    (z != ZERO).then_some((j, z))
                })
                .collect();
            rows[i] = Some(row);
        }
        Ok(self.apply_rows(&rows))
    }

    /// Linear substitution `a_m† -> Σ_j rows[m][j] a_j†`. The caller guarantees
    /// the substitution is unitary.
    pub(crate) fn apply_rows(&self, rows: &SparseRows) -> FockState {
        let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        let mut fixed = Vec::new();
        let mut moving = Vec::new();
        for (key, &amp) in &self.amplitudes {
            fixed.clear();
            moving.clear();
            for b in key.bosons() {
                match &rows[b] {
                    Some(row) => moving.push(row.as_slice()),
                    None => fixed.push(b),
                }
            }
            if moving.is_empty() {
                *out.entry(key.clone()).or_insert(ZERO) += amp;
                continue;
            }
            let coeff = amp / key.factorial_product().sqrt();
            expand(&moving, &mut fixed.clone(), coeff, &mut out);
        }
        let mut state = FockState {
            mode_count: self.mode_count,
            walkers: self.walkers,
            amplitudes: out,
        };
        state.prune();
        state
    }

    /// Relabels modes: a boson in mode `m` moves to `perm[m]`.
    pub fn apply_mode_permutation(&self, perm: &[usize]) -> Result<FockState> {
        if perm.len() != self.mode_count {
            return Err(Error::Validation(format!(
                "permutation has {} entries for {} modes",
                perm.len(),
                self.mode_count
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Validation(format!(
                    "mode map is not a bijection (image {p} repeated or out of range)"
                )));
            }
        }
        Ok(self.relabel(perm))
    }

    pub(crate) fn relabel(&self, perm: &[usize]) -> FockState {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(k, &a)| {
                (
                    OccupationVector::from_modes(k.bosons().map(|b| perm[b]).collect()),
                    a,
                )
            })
            .collect();
        FockState {
            mode_count: self.mode_count,
            walkers: self.walkers,
            amplitudes,
        }
    }

    /// Multiplies each basis term by `exp(i · phase(key))`.
    pub fn apply_diagonal_phase(&self, phase: impl Fn(&OccupationVector) -> f64) -> FockState {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(k, &a)| {
                let theta = phase(k);
                let a = if theta == 0.0 {
                    a
                } else {
                    a * Complex64::from_polar(1.0, theta)
                };
                (k.clone(), a)
            })
            .collect();
        FockState {
            mode_count: self.mode_count,
            walkers: self.walkers,
            amplitudes,
        }
    }
}

fn check_modes(modes: impl Iterator<Item = usize>, mode_count: usize) -> Result<()> {
    for m in modes {
        if m >= mode_count {
            return Err(Error::lookup(
                "mode index",
                format!("{m} (state has {mode_count} modes)"),
            ));
        }
    }
    Ok(())
}

fn expand(
    moving: &[&[(usize, Complex64)]],
    chosen: &mut Vec<usize>,
    coeff: Complex64,
    out: &mut BTreeMap<OccupationVector, Complex64>,
) {
    let Some((row, rest)) = moving.split_first() else {
        let key = OccupationVector::from_modes(chosen.clone());
        let amp = coeff * key.factorial_product().sqrt();
        *out.entry(key).or_insert(ZERO) += amp;
        return;
    };
    for &(j, z) in *row {
        chosen.push(j);
        expand(rest, chosen, coeff * z, out);
        chosen.pop();
    }
}
