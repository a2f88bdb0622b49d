//! Channel parameterization and the probability of correlated Pauli error patterns.
//!
//! A single qubit suffers `σ_i` with probability `p_i`. Along a string, each
//! qubit repeats the error of its right neighbour with probability `mu` and
//! draws an independent error with probability `1 - mu`:
//!
//! ```text
//! P(i_1 .. i_n) = p_{i_n} · Π_{m=1}^{n-1} [ (1 - mu) p_{i_m} + mu δ(i_m, i_{m+1}) ]
//! ```
//!
//! For two qubits this is `P_ij = (1 - mu) p_i p_j + mu δ_ij p_i`; only the
//! factorized form above is evaluated.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Input tolerance on `Σ p_i = 1`.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance for the `p0 = p3`, `p1 = p2` symmetry test.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Largest string length for which all `4^n` patterns are enumerated.
pub const PATTERN_ENUMERATION_CAP: usize = 10;

/// Single-qubit Pauli error.
///
/// One-index labels are `0 = I, 1 = X, 2 = Y, 3 = Z`. The two-index label
/// `(flip, phase)` follows `σ_{flip,phase} = Σ_k (-1)^{phase·k} |k+flip⟩⟨k|`:
/// `(0,0) = I`, `(0,1) = Z`, `(1,0) = X`, `(1,1) = XZ`, which is `Y` up to a
/// global phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: u8) -> Option<Pauli> {
        Pauli::ALL.get(i as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_bits(flip: bool, phase: bool) -> Pauli {
        match (flip, phase) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::Z,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
        }
    }

    /// `(flip, phase)` two-index label.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::Z => (false, true),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
        }
    }

    pub fn matrix(self) -> Matrix2<Complex64> {
        let (flip, phase) = self.bits();
        single_qubit_pauli(flip, phase)
    }
}

/// `σ_{alpha,beta} = Σ_k (-1)^{beta·k} |k ⊕ alpha⟩⟨k|`.
///
/// `(true, true)` yields `|1⟩⟨0| - |0⟩⟨1|`; the phase relative to `σ_y`
/// cancels under conjugation.
pub fn single_qubit_pauli(alpha: bool, beta: bool) -> Matrix2<Complex64> {
    let mut m = Matrix2::zeros();
    for k in 0..2usize {
        let row = k ^ alpha as usize;
        let sign = if beta && k == 1 { -1.0 } else { 1.0 };
        m[(row, k)] = Complex64::new(sign, 0.0);
    }
    m
}

/// A length-`n` string of Pauli errors, qubit 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(paulis: Vec<Pauli>) -> Result<Self> {
        if paulis.is_empty() || paulis.len() > 63 {
            return Err(Error::InvalidLength {
                n: paulis.len(),
                max: 63,
            });
        }
        Ok(PauliString(paulis))
    }

    /// From one-index labels in `{0, 1, 2, 3}`.
    pub fn from_indices(indices: &[u8]) -> Result<Self> {
        let paulis = indices
            .iter()
            .map(|&i| {
                Pauli::from_index(i).ok_or_else(|| Error::InvalidArgument(format!("Pauli index {i} not in 0..=3")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(paulis)
    }

    /// From two-index `(flip, phase)` labels.
    pub fn from_bits(bits: &[(bool, bool)]) -> Result<Self> {
        PauliString::new(bits.iter().map(|&(a, b)| Pauli::from_bits(a, b)).collect())
    }

    /// Decodes a base-4 pattern code, qubit 1 being the most significant digit.
    pub fn from_code(code: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::InvalidLength { n, max: 31 });
        }
        let paulis = (0..n)
            .map(|i| Pauli::ALL[((code >> (2 * (n - 1 - i))) & 3) as usize])
            .collect();
        PauliString::new(paulis)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Pauli] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        self.0.iter().copied()
    }

    /// Bit mask of qubits flipped by the string (qubit 1 = MSB).
    pub fn flip_mask(&self) -> u64 {
        self.mask(|p| p.bits().0)
    }

    /// Bit mask of qubits carrying a `(-1)^k` phase (qubit 1 = MSB).
    pub fn phase_mask(&self) -> u64 {
        self.mask(|p| p.bits().1)
    }

    fn mask(&self, f: impl Fn(Pauli) -> bool) -> u64 {
        self.0.iter().fold(0u64, |acc, &p| (acc << 1) | f(p) as u64)
    }
}

/// Marginal weights `η_0 = p0 + p3 = 2p` (no bit flip), `η_1 = p1 + p2 = 2q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaWeights {
    pub eta0: f64,
    pub eta1: f64,
}

impl EtaWeights {
    #[inline]
    pub fn get(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.eta0
        } else {
            self.eta1
        }
    }
}

/// Validated error probabilities and memory parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelParams {
    probs: [f64; 4],
    mu: f64,
    symmetric: bool,
}

/// Validates and builds channel parameters; see [`ChannelParams::new`].
pub fn make_channel(p0: f64, p1: f64, p2: f64, p3: f64, mu: f64) -> Result<ChannelParams> {
    ChannelParams::new([p0, p1, p2, p3], mu)
}

impl ChannelParams {
    /// Rejects negative or non-finite probabilities, sums off 1 by more than
    /// `1e-9` and `mu` outside `[0, 1]`. Accepted probabilities are rescaled to
    /// sum to 1.
    pub fn new(probs: [f64; 4], mu: f64) -> Result<Self> {
        const NAMES: [&str; 4] = ["p0", "p1", "p2", "p3"];
        for (value, name) in probs.iter().zip(NAMES) {
            if !value.is_finite() || *value < 0.0 || *value > 1.0 + SUM_TOLERANCE {
                return Err(Error::InvalidProbability { name, value: *value });
            }
        }
        if !mu.is_finite() || !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidMemory(mu));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized(sum));
        }
        let probs = probs.map(|p| p / sum);
        let symmetric =
            (probs[0] - probs[3]).abs() < SYMMETRY_TOLERANCE && (probs[1] - probs[2]).abs() < SYMMETRY_TOLERANCE;
        Ok(ChannelParams { probs, mu, symmetric })
    }

    /// Symmetric channel `p0 = p3 = p`, `p1 = p2 = 1/2 - p`.
    pub fn symmetric(p: f64, mu: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "symmetric channel needs p in [0, 0.5], got {p}"
            )));
        }
        let q = 0.5 - p;
        ChannelParams::new([p, q, q, p], mu)
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn prob(&self, pauli: Pauli) -> f64 {
        self.probs[pauli.index()]
    }

    /// Probability of `σ_{flip,phase}` in the two-index labeling.
    pub fn prob_bits(&self, flip: bool, phase: bool) -> f64 {
        self.prob(Pauli::from_bits(flip, phase))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `p` of the symmetric parameterization (`p0`).
    pub fn p(&self) -> Option<f64> {
        self.symmetric.then_some(self.probs[0])
    }

    pub fn eta(&self) -> Option<EtaWeights> {
        self.symmetric.then(|| EtaWeights {
            eta0: self.probs[0] + self.probs[3],
            eta1: self.probs[1] + self.probs[2],
        })
    }

    /// Same error probabilities with a different memory parameter.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        ChannelParams::new(self.probs, mu)
    }
}

/// Probability of a correlated error pattern.
pub fn pattern_prob(s: &PauliString, ch: &ChannelParams) -> f64 {
    let p = s.as_slice();
    let mu = ch.mu;
    let mut prob = ch.prob(p[p.len() - 1]);
    for w in p.windows(2) {
        prob *= (1.0 - mu) * ch.prob(w[0]) + if w[0] == w[1] { mu } else { 0.0 };
    }
    prob
}

/// Same probability evaluated in the two-index labeling, where repetition
/// requires both labels to match.
pub fn pattern_prob_bits(bits: &[(bool, bool)], ch: &ChannelParams) -> Result<f64> {
    let Some(&(last_a, last_b)) = bits.last() else {
        return Err(Error::InvalidLength { n: 0, max: 63 });
    };
    let mu = ch.mu;
    let mut prob = ch.prob_bits(last_a, last_b);
    for w in bits.windows(2) {
        let (a, b) = w[0];
        let (a1, b1) = w[1];
        let same = (a == a1) && (b == b1);
        prob *= (1.0 - mu) * ch.prob_bits(a, b) + if same { mu } else { 0.0 };
    }
    Ok(prob)
}

/// Pattern probability from a base-4 code without allocating.
pub(crate) fn pattern_prob_code(code: u64, n: usize, ch: &ChannelParams) -> f64 {
    let digit = |i: usize| ((code >> (2 * (n - 1 - i))) & 3) as usize;
    let mu = ch.mu;
    let mut prob = ch.probs[digit(n - 1)];
    for i in 0..n - 1 {
        let (a, b) = (digit(i), digit(i + 1));
        prob *= (1.0 - mu) * ch.probs[a] + if a == b { mu } else { 0.0 };
    }
    prob
}

/// Sum of [`pattern_prob`] over all `4^n` error patterns.
pub fn total_pattern_mass(n: usize, ch: &ChannelParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidLength {
            n,
            max: PATTERN_ENUMERATION_CAP,
        });
    }
    if n > PATTERN_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "pattern enumeration",
            n,
            cap: PATTERN_ENUMERATION_CAP,
        });
    }
    let total: NeumaierSum = (0..1u64 << (2 * n)).map(|c| pattern_prob_code(c, n, ch)).collect();
    Ok(total.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_channel_is_valid_not_symmetric() {
        let ch = make_channel(1.0, 0.0, 0.0, 0.0, 0.3).unwrap();
        assert!(!ch.is_symmetric());
        assert!(ch.eta().is_none());
    }

    #[test]
    fn symmetric_channel_eta() {
        let ch = make_channel(0.4, 0.1, 0.1, 0.4, 0.5).unwrap();
        assert!(ch.is_symmetric());
        let eta = ch.eta().unwrap();
        assert!((eta.eta0 - 0.8).abs() < 1e-15);
        assert!((eta.eta1 - 0.2).abs() < 1e-15);
        assert!((eta.eta0 + eta.eta1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_channel(0.5, 0.5, 0.1, 0.1, 0.2),
            Err(Error::NotNormalized(s)) if (s - 1.2).abs() < 1e-12
        ));
        assert!(matches!(
            make_channel(-0.1, 0.5, 0.3, 0.3, 0.2),
            Err(Error::InvalidProbability { name: "p0", .. })
        ));
        assert!(matches!(
            make_channel(0.25, 0.25, 0.25, 0.25, 1.5),
            Err(Error::InvalidMemory(_))
        ));
        assert!(matches!(
            make_channel(f64::NAN, 0.5, 0.25, 0.25, 0.5),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(ChannelParams::symmetric(0.6, 0.2).is_err());
    }

    #[test]
    fn renormalizes_near_unit_sums() {
        let ch = make_channel(0.4 + 5e-10, 0.1, 0.1, 0.4, 0.0).unwrap();
        let sum: f64 = ch.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pattern_prob_examples() {
        let ch = ChannelParams::symmetric(0.3, 0.4).unwrap();
        let s = PauliString::from_indices(&[2]).unwrap();
        assert_eq!(pattern_prob(&s, &ch), ch.prob(Pauli::Y));

        let full = make_channel(0.1, 0.2, 0.3, 0.4, 1.0).unwrap();
        for i in 0..4u8 {
            for j in 0..4u8 {
                let s = PauliString::from_indices(&[i, j]).unwrap();
                let expected = if i == j { full.probs()[j as usize] } else { 0.0 };
                assert_eq!(pattern_prob(&s, &full), expected);
            }
        }

        let ch = make_channel(0.7, 0.1, 0.1, 0.1, 0.5).unwrap();
        let s00 = PauliString::from_indices(&[0, 0]).unwrap();
        let s01 = PauliString::from_indices(&[0, 1]).unwrap();
        assert!((pattern_prob(&s00, &ch) - 0.595).abs() < 1e-15);
        assert!((pattern_prob(&s01, &ch) - 0.035).abs() < 1e-15);
    }

    #[test]
    fn pattern_mass_normalized() {
        let ch = make_channel(0.7, 0.1, 0.1, 0.1, 0.5).unwrap();
        assert!((total_pattern_mass(1, &ch).unwrap() - 1.0).abs() < 1e-15);
        assert!((total_pattern_mass(2, &ch).unwrap() - 1.0).abs() < 1e-15);
        assert!((total_pattern_mass(3, &ch).unwrap() - 1.0).abs() < 1e-12);
        let sym = make_channel(0.4, 0.1, 0.1, 0.4, 0.7).unwrap();
        assert!((total_pattern_mass(5, &sym).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(total_pattern_mass(11, &sym), Err(Error::CapExceeded { .. })));
        assert!(total_pattern_mass(0, &sym).is_err());
    }

    #[test]
    fn three_qubit_error_diagram_sum() {
        // independent, one link, two links
        let ch = make_channel(0.15, 0.25, 0.35, 0.25, 0.37).unwrap();
        let p = ch.probs();
        let mu = ch.mu();
        let mut by_diagram = 0.0;
        for &pi in &p {
            for &pj in &p {
                for &pk in &p {
                    by_diagram += (1.0 - mu).powi(2) * pi * pj * pk;
                }
                by_diagram += 2.0 * mu * (1.0 - mu) * pi * pj;
            }
            by_diagram += mu * mu * pi;
        }
        assert!((by_diagram - 1.0).abs() < 1e-12);
        assert!((total_pattern_mass(3, &ch).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_paulis() {
        let i = single_qubit_pauli(false, false);
        assert_eq!(i, Matrix2::identity());
        let x = single_qubit_pauli(true, false);
        assert_eq!(x, Matrix2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)));
        let z = single_qubit_pauli(false, true);
        assert_eq!(z, Matrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)));
        // |1><0| - |0><1|
        let y = single_qubit_pauli(true, true);
        assert_eq!(y, Matrix2::new(c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)));
        for p in Pauli::ALL {
            let m = p.matrix();
            let prod = m * m.adjoint();
            assert!((prod - Matrix2::identity()).norm() < 1e-14);
        }
    }

    #[test]
    fn labelings_round_trip() {
        for p in Pauli::ALL {
            let (a, b) = p.bits();
            assert_eq!(Pauli::from_bits(a, b), p);
            assert_eq!(Pauli::from_index(p.index() as u8), Some(p));
        }
        assert_eq!(Pauli::from_index(4), None);
        let s = PauliString::from_code(0b00_01_10_11, 4).unwrap();
        assert_eq!(s.as_slice(), &[Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]);
        assert_eq!(s.flip_mask(), 0b0110);
        assert_eq!(s.phase_mask(), 0b0011);
        assert!(PauliString::new(vec![]).is_err());
    }
}
