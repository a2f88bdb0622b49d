//! Dense reference path: explicit Kraus-sum application of the memory channel
//! to `2^n × 2^n` density matrices, followed by Hermitian diagonalization.
//!
//! Every one of the `4^n` Pauli strings is applied as a signed index
//! permutation, `U|k⟩ = ± |k ⊕ flip⟩`, so a Kraus term costs `O(4^n)` instead
//! of a full matrix product. This path knows nothing of the closed forms in
//! [`crate::spectrum`] and is used to check them and to evaluate encodings
//! that have no closed form (Bell strings, `w3`).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::channel::{pattern_prob_code, ChannelParams, PauliString};
use crate::error::{Error, Result};
use crate::spectrum::{clamp_solver_noise, Level, SpectrumStream};

/// Default qubit cap for dense channel application.
pub const DEFAULT_DENSE_CAP: usize = 8;

const STATE_TOLERANCE: f64 = 1e-12;
const POSITIVITY_TOLERANCE: f64 = 1e-10;
/// Fixed number of accumulation chunks, so the reduction order does not depend
/// on the thread pool.
const ACCUMULATION_CHUNKS: u64 = 32;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pure `n`-qubit state, qubit 1 being the most significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_dim(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("norm² = {norm}, expected 1")));
        }
        Ok(StateVector { n, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitude vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::new(amps)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > 30 || index >= 1 << n {
            return Err(Error::InvalidArgument(format!("basis state {index} of {n} qubits")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n: self.n + other.n,
            amps,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        let dim = self.amps.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in &self.amps {
            for b in &self.amps {
                data.push(a * b.conj());
            }
        }
        DensityMatrix { n: self.n, data }
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not 2^n with n >= 1")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Hermitian, unit-trace, positive semidefinite `2^n × 2^n` matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace to `1e-12` and eigenvalues against `-1e-10`.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::InvalidLength { n, max: 30 });
        }
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let rho = DensityMatrix { n, data };
        let herm = rho.hermiticity_error();
        if herm > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr}, expected 1")));
        }
        let min = rho.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![ZERO; dim * dim];
        for r1 in 0..da {
            for c1 in 0..da {
                let a = self.get(r1, c1);
                for r2 in 0..db {
                    for c2 in 0..db {
                        data[(r1 * db + r2) * dim + c1 * db + c2] = a * other.get(r2, c2);
                    }
                }
            }
        }
        DensityMatrix {
            n: self.n + other.n,
            data,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.data)
    }

    /// Eigenvalues sorted descending (not clamped).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.to_matrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// One block of a product encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// `|0⟩`, one qubit.
    Zero,
    /// `ψ+ = (|00⟩ + |11⟩)/√2`, two qubits.
    Bell,
}

/// Input encodings: named states or a product pattern over `'0'` and `'B'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// `|0…0⟩`.
    Separable,
    /// `(|0…0⟩ + |1…1⟩)/√2`.
    Ghz,
    /// `½(|100⟩ + |010⟩ + |001⟩ + |111⟩)`, three qubits only.
    W3,
    Pattern(Vec<Block>),
}

impl Encoding {
    /// Qubit count fixed by the encoding, if any.
    pub fn fixed_qubits(&self) -> Option<usize> {
        match self {
            Encoding::Separable | Encoding::Ghz => None,
            Encoding::W3 => Some(3),
            Encoding::Pattern(blocks) => Some(blocks.iter().map(|b| if *b == Block::Bell { 2 } else { 1 }).sum()),
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidLength { n, max: usize::MAX });
        }
        match self.fixed_qubits() {
            Some(k) if k != n => Err(Error::InvalidEncoding(format!(
                "{self} covers {k} qubits, string length is {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Separable and GHZ encodings have closed-form spectra on symmetric channels.
    pub fn has_closed_form(&self) -> bool {
        matches!(self, Encoding::Separable | Encoding::Ghz)
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Encoding::Separable => f.write_str("sep"),
            Encoding::Ghz => f.write_str("ghz"),
            Encoding::W3 => f.write_str("w3"),
            Encoding::Pattern(blocks) => blocks
                .iter()
                .try_for_each(|b| f.write_str(if *b == Block::Bell { "B" } else { "0" })),
        }
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sep" => Ok(Encoding::Separable),
            "ghz" => Ok(Encoding::Ghz),
            "w3" => Ok(Encoding::W3),
            "" => Err(Error::InvalidEncoding("empty encoding".into())),
            pattern => pattern
                .chars()
                .map(|c| match c {
                    '0' => Ok(Block::Zero),
                    'B' => Ok(Block::Bell),
                    other => Err(Error::InvalidEncoding(format!(
                        "unknown encoding {pattern:?} (character {other:?}; expected sep, ghz, w3 or a pattern over '0'/'B')"
                    ))),
                })
                .collect::<Result<Vec<_>>>()
                .map(Encoding::Pattern),
        }
    }
}

impl Serialize for Encoding {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Amplitude vector of an encoding on `n` qubits.
pub fn encode_state(spec: &Encoding, n: usize) -> Result<StateVector> {
    spec.check(n)?;
    if n > 30 {
        return Err(Error::InvalidLength { n, max: 30 });
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match spec {
        Encoding::Separable => StateVector::basis(n, 0),
        Encoding::Ghz => {
            let mut amps = vec![ZERO; 1 << n];
            amps[0] += r;
            amps[(1 << n) - 1] += r;
            StateVector::new(amps)
        }
        Encoding::W3 => {
            let mut amps = vec![ZERO; 8];
            for i in [0b100, 0b010, 0b001, 0b111] {
                amps[i] = Complex64::new(0.5, 0.0);
            }
            StateVector::new(amps)
        }
        Encoding::Pattern(blocks) => {
            let zero = StateVector::basis(1, 0)?;
            let bell = StateVector::new(vec![Complex64::new(r, 0.0), ZERO, ZERO, Complex64::new(r, 0.0)])?;
            let mut parts = blocks.iter().map(|b| if *b == Block::Bell { &bell } else { &zero });
            let first = parts.next().expect("pattern covers n >= 1 qubits").clone();
            Ok(parts.fold(first, |acc, b| acc.tensor(b)))
        }
    }
}

/// `(flip mask, phase mask)` of a base-4 pattern code with digits `I, X, Y, Z`.
#[inline]
fn code_masks(code: u64, n: usize) -> (usize, usize) {
    let mut flip = 0usize;
    let mut phase = 0usize;
    for i in 0..n {
        let d = (code >> (2 * (n - 1 - i))) & 3;
        flip = (flip << 1) | (d == 1 || d == 2) as usize;
        phase = (phase << 1) | (d == 2 || d == 3) as usize;
    }
    (flip, phase)
}

#[inline]
fn parity_sign(mask: usize, k: usize) -> f64 {
    if (mask & k).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Adds `weight · U ρ U†` to `acc` for `U|k⟩ = (-1)^{|phase ∧ k|} |k ⊕ flip⟩`.
fn accumulate_conjugated(
    acc: &mut [Complex64],
    rho: &[Complex64],
    dim: usize,
    flip: usize,
    phase: usize,
    weight: f64,
    signs: &mut [f64],
) {
    for (k, s) in signs.iter_mut().enumerate() {
        *s = parity_sign(phase, k);
    }
    for k in 0..dim {
        let row_in = &rho[k * dim..(k + 1) * dim];
        let row_out = (k ^ flip) * dim;
        let wk = weight * signs[k];
        for (l, &v) in row_in.iter().enumerate() {
            acc[row_out + (l ^ flip)] += v * (wk * signs[l]);
        }
    }
}

/// `U ρ U†` for `U` the tensor product of the string's Paulis.
pub fn conjugate_by_pauli_string(rho: &DensityMatrix, s: &PauliString) -> Result<DensityMatrix> {
    if s.len() != rho.n {
        return Err(Error::DimensionMismatch {
            expected: rho.n,
            found: s.len(),
        });
    }
    let dim = rho.dim();
    let mut out = vec![ZERO; dim * dim];
    let mut signs = vec![0.0; dim];
    accumulate_conjugated(
        &mut out,
        &rho.data,
        dim,
        s.flip_mask() as usize,
        s.phase_mask() as usize,
        1.0,
        &mut signs,
    );
    Ok(DensityMatrix { n: rho.n, data: out })
}

/// Applies the `n`-qubit memory channel by summing all `4^n` weighted Kraus terms.
///
/// Fails when `rho` has more than `cap` qubits.
pub fn apply_channel_dense(rho: &DensityMatrix, ch: &ChannelParams, cap: usize) -> Result<DensityMatrix> {
    let n = rho.n;
    if n > cap {
        return Err(Error::CapExceeded {
            what: "dense channel application",
            n,
            cap,
        });
    }
    if n > 15 {
        return Err(Error::InvalidLength { n, max: 15 });
    }
    let dim = rho.dim();
    let terms = 1u64 << (2 * n);
    let chunks = terms.min(ACCUMULATION_CHUNKS);
    let chunk_len = terms.div_ceil(chunks);
    let partials: Vec<Vec<Complex64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![ZERO; dim * dim];
            let mut signs = vec![0.0; dim];
            let start = c * chunk_len;
            let end = (start + chunk_len).min(terms);
            for code in start..end {
                let weight = pattern_prob_code(code, n, ch);
                if weight == 0.0 {
                    continue;
                }
                let (flip, phase) = code_masks(code, n);
                accumulate_conjugated(&mut acc, &rho.data, dim, flip, phase, weight, &mut signs);
            }
            acc
        })
        .collect();
    let mut out = vec![ZERO; dim * dim];
    for part in &partials {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    Ok(DensityMatrix { n, data: out })
}

/// Channel output spectrum of a pure state, solver noise below `1e-14` zeroed, sorted descending.
pub fn output_spectrum_dense(state: &StateVector, ch: &ChannelParams, cap: usize) -> Result<SpectrumStream> {
    let out = apply_channel_dense(&state.density(), ch, cap)?;
    Ok(out
        .eigenvalues()
        .into_iter()
        .map(|v| Level::single(clamp_solver_noise(v)))
        .collect())
}
