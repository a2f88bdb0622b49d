//! Closed-form output spectra for `|0…0⟩` and GHZ inputs on the symmetric channel.
//!
//! On the symmetric channel (`p0 = p3 = p`, `p1 = p2 = q`) only the bit-flip
//! part of an error matters for the diagonal, and the output of `|0…0⟩` is
//! diagonal with weights
//!
//! ```text
//! P̃_α = η_{α_n} Π_{i=1}^{n-1} [ (1 - mu) η_{α_i} + mu δ(α_i, α_{i+1}) ]
//! ```
//!
//! The GHZ output is block diagonal on the pairs `{α, ᾱ}`: diagonal
//! `(P̃_α + P̃_ᾱ)/2`, off-diagonal `(Q̃_α + Q̃_ᾱ)/2`, where `Q̃` is the signed sum
//! over phase errors (zero for odd `n`). Each pair is visited once, through
//! the representative with `α_1 = 0`.
//!
//! Spectra are produced as iterators over `α` in increasing order, sharing
//! prefix products between neighbouring strings so a step costs amortized O(1)
//! and memory stays O(n).

use std::ops::Range;

use serde::Serialize;

use crate::channel::{ChannelParams, EtaWeights};
use crate::error::{Error, Result};
use crate::numeric::{binary_entropy, CLAMP_EPS};

/// Longest string handled by the closed-form streams.
pub const MAX_STREAM_LEN: usize = 48;

/// An `n`-bit word `α_1 … α_n` with `α_1` the most significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    len: usize,
}

impl BitString {
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len == 0 || len > 63 {
            return Err(Error::InvalidLength { n: len, max: 63 });
        }
        if value >> len != 0 {
            return Err(Error::InvalidArgument(format!("{value} does not fit in {len} bits")));
        }
        Ok(BitString { value, len })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("bits must be 0 or 1".into()));
        }
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        BitString::new(value, bits.len())
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `α_i` for `i` in `1..=n`.
    pub fn bit(&self, i: usize) -> u8 {
        assert!((1..=self.len).contains(&i), "bit index {i} out of 1..={}", self.len);
        ((self.value >> (self.len - i)) & 1) as u8
    }

    pub fn complement(&self) -> BitString {
        BitString {
            value: self.value ^ mask(self.len),
            len: self.len,
        }
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 1..=self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Diagonal and off-diagonal weights of the output on basis string `α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TildeCoeffs {
    pub p_tilde: f64,
    pub q_tilde: f64,
}

#[derive(Clone, Copy, Debug)]
struct Symmetric {
    eta: EtaWeights,
    mu: f64,
}

fn symmetric(ch: &ChannelParams) -> Result<Symmetric> {
    let eta = ch.eta().ok_or(Error::NotSymmetric)?;
    Ok(Symmetric { eta, mu: ch.mu() })
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STREAM_LEN {
        return Err(Error::InvalidLength { n, max: MAX_STREAM_LEN });
    }
    Ok(())
}

/// `P̃_α` evaluated directly in O(n).
pub fn tilde_p(alpha: BitString, ch: &ChannelParams) -> Result<f64> {
    let sym = symmetric(ch)?;
    let n = alpha.len();
    let mut prod = sym.eta.get(alpha.bit(n));
    for i in 1..n {
        let (a, b) = (alpha.bit(i), alpha.bit(i + 1));
        prod *= (1.0 - sym.mu) * sym.eta.get(a) + if a == b { sym.mu } else { 0.0 };
    }
    Ok(prod)
}

/// `Q̃_α` evaluated directly in O(n); exactly zero for odd `n`.
///
/// For even `n` the phase sum pairs the positions `(1,2), (3,4), …`: each pair
/// contributes `mu δ(α_{2i-1}, α_{2i})`, and between pairs the usual link
/// factor `(1 - mu) η_{α_{2i}} + mu δ(α_{2i}, α_{2i+1})` survives.
pub fn tilde_q(alpha: BitString, ch: &ChannelParams) -> Result<f64> {
    let sym = symmetric(ch)?;
    let n = alpha.len();
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let mu = sym.mu;
    let delta = |i: usize, j: usize| if alpha.bit(i) == alpha.bit(j) { 1.0 } else { 0.0 };
    let mut prod = mu.powi((n / 2) as i32) * sym.eta.get(alpha.bit(n)) * delta(n - 1, n);
    for i in 1..n / 2 {
        prod *= delta(2 * i - 1, 2 * i) * ((1.0 - mu) * sym.eta.get(alpha.bit(2 * i)) + mu * delta(2 * i, 2 * i + 1));
    }
    Ok(prod)
}

pub fn tilde_coeffs(alpha: BitString, ch: &ChannelParams) -> Result<TildeCoeffs> {
    Ok(TildeCoeffs {
        p_tilde: tilde_p(alpha, ch)?,
        q_tilde: tilde_q(alpha, ch)?,
    })
}

/// `P̃` and `Q̃` for a string and its complement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCoeffs {
    pub alpha: u64,
    pub p: f64,
    pub p_bar: f64,
    pub q: f64,
    pub q_bar: f64,
}

/// Walks `α` over a range of `n`-bit words, maintaining prefix products of
/// the per-position factors of `P̃_α`, `P̃_ᾱ`, `Q̃_α` and `Q̃_ᾱ`.
///
/// Factor `i` (0-based) depends on bits `i` and `i + 1`, so when the
/// highest changed bit of the next word is `k`, factors `k-1..n` are redone.
#[derive(Clone, Debug)]
pub struct PairWalker {
    n: usize,
    sym: Symmetric,
    next: u64,
    end: u64,
    prev: Option<u64>,
    prefix: Vec<[f64; 4]>,
}

impl PairWalker {
    pub fn new(n: usize, ch: &ChannelParams, range: Range<u64>) -> Result<Self> {
        check_len(n)?;
        let sym = symmetric(ch)?;
        let limit = 1u64 << n;
        if range.end > limit {
            return Err(Error::InvalidArgument(format!("range end {} exceeds 2^{n}", range.end)));
        }
        Ok(PairWalker {
            n,
            sym,
            next: range.start,
            end: range.end,
            prev: None,
            prefix: vec![[0.0; 4]; n],
        })
    }

    #[inline]
    fn factors(&self, alpha: u64, i: usize) -> [f64; 4] {
        let n = self.n;
        let bit = |j: usize| ((alpha >> (n - 1 - j)) & 1) as u8;
        let eta = self.sym.eta;
        let mu = self.sym.mu;
        let b = bit(i);
        if i == n - 1 {
            let e = eta.get(b);
            let e_bar = eta.get(1 - b);
            let (q, q_bar) = if n.is_multiple_of(2) { (e, e_bar) } else { (0.0, 0.0) };
            return [e, e_bar, q, q_bar];
        }
        let same = if b == bit(i + 1) { mu } else { 0.0 };
        let link = (1.0 - mu) * eta.get(b) + same;
        let link_bar = (1.0 - mu) * eta.get(1 - b) + same;
        if n % 2 == 1 {
            [link, link_bar, 0.0, 0.0]
        } else if i.is_multiple_of(2) {
            // opens a pair (α_{2j-1}, α_{2j})
            [link, link_bar, same, same]
        } else {
            // link between pairs
            [link, link_bar, link, link_bar]
        }
    }
}

impl Iterator for PairWalker {
    type Item = PairCoeffs;

    fn next(&mut self) -> Option<PairCoeffs> {
        if self.next >= self.end {
            return None;
        }
        let alpha = self.next;
        self.next += 1;
        let n = self.n;
        let start = match self.prev {
            None => 0,
            Some(prev) => {
                let top = 63 - (prev ^ alpha).leading_zeros() as usize;
                // bit position `top` (LSB = 0) is 0-based index n-1-top from the MSB
                (n - 1 - top).saturating_sub(1)
            }
        };
        for i in start..n {
            let f = self.factors(alpha, i);
            let before = if i == 0 { [1.0; 4] } else { self.prefix[i - 1] };
            self.prefix[i] = [before[0] * f[0], before[1] * f[1], before[2] * f[2], before[3] * f[3]];
        }
        self.prev = Some(alpha);
        let [p, p_bar, q, q_bar] = self.prefix[n - 1];
        Some(PairCoeffs {
            alpha,
            p,
            p_bar,
            q,
            q_bar,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

/// One eigenvalue with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: u64,
}

impl Level {
    pub fn single(value: f64) -> Level {
        Level { value, multiplicity: 1 }
    }
}

/// Closed-form eigenvalues are exact products up to rounding, so only
/// negative rounding residue is cut.
#[inline]
pub fn clamp_eigenvalue(x: f64) -> f64 {
    x.max(0.0)
}

/// Eigensolver output below [`CLAMP_EPS`] is solver noise and set to zero.
#[inline]
pub fn clamp_solver_noise(x: f64) -> f64 {
    if x < CLAMP_EPS {
        0.0
    } else {
        x
    }
}

/// Materialized spectrum.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SpectrumStream {
    levels: Vec<Level>,
}

impl SpectrumStream {
    pub fn new(levels: Vec<Level>) -> Self {
        SpectrumStream { levels }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<Level> {
        self.levels
    }

    pub fn mass(&self) -> f64 {
        self.levels.iter().map(|l| l.value * l.multiplicity as f64).sum()
    }

    pub fn dimension(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    /// Eigenvalues with multiplicities expanded, sorted descending.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value, l.multiplicity as usize))
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

impl FromIterator<Level> for SpectrumStream {
    fn from_iter<I: IntoIterator<Item = Level>>(iter: I) -> Self {
        SpectrumStream {
            levels: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for SpectrumStream {
    type Item = Level;
    type IntoIter = std::vec::IntoIter<Level>;

    fn into_iter(self) -> Self::IntoIter {
        self.levels.into_iter()
    }
}

/// Stream of `λ_α = P̃_α` for `α` in `[0, 2^n)`.
pub struct SeparableLevels(PairWalker);

impl Iterator for SeparableLevels {
    type Item = Level;

    fn next(&mut self) -> Option<Level> {
        self.0.next().map(|c| Level::single(clamp_eigenvalue(c.p)))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.0.size_hint()
    }
}

/// Stream of the two eigenvalues of every `{α, ᾱ}` block.
///
/// Degenerate blocks (zero coherence, always the case for odd `n`) are
/// emitted as one level of multiplicity 2.
pub struct GhzLevels {
    walker: PairWalker,
    pending: Option<Level>,
}

impl Iterator for GhzLevels {
    type Item = Level;

    fn next(&mut self) -> Option<Level> {
        if let Some(l) = self.pending.take() {
            return Some(l);
        }
        let c = self.walker.next()?;
        let (plus, minus) = ghz_block_eigenvalues(&c);
        if c.q + c.q_bar == 0.0 {
            Some(Level {
                value: clamp_eigenvalue(plus),
                multiplicity: 2,
            })
        } else {
            self.pending = Some(Level::single(clamp_eigenvalue(minus)));
            Some(Level::single(clamp_eigenvalue(plus)))
        }
    }
}

/// Unclamped `(P̃_α + P̃_ᾱ ± (Q̃_α + Q̃_ᾱ)) / 2`.
#[inline]
pub fn ghz_block_eigenvalues(c: &PairCoeffs) -> (f64, f64) {
    let diag = c.p + c.p_bar;
    let off = c.q + c.q_bar;
    (0.5 * (diag + off), 0.5 * (diag - off))
}

pub fn separable_spectrum(n: usize, ch: &ChannelParams) -> Result<SeparableLevels> {
    separable_spectrum_range(n, ch, 0..1u64 << n.min(63))
}

/// Separable levels for a sub-range of `α`, for partitioned evaluation.
pub fn separable_spectrum_range(n: usize, ch: &ChannelParams, range: Range<u64>) -> Result<SeparableLevels> {
    check_len(n)?;
    Ok(SeparableLevels(PairWalker::new(n, ch, range)?))
}

pub fn ghz_spectrum(n: usize, ch: &ChannelParams) -> Result<GhzLevels> {
    check_len(n)?;
    ghz_spectrum_range(n, ch, 0..1u64 << (n - 1))
}

/// GHZ levels for block representatives in `range`, a sub-range of `[0, 2^(n-1))`.
pub fn ghz_spectrum_range(n: usize, ch: &ChannelParams, range: Range<u64>) -> Result<GhzLevels> {
    check_len(n)?;
    if range.end > 1u64 << (n - 1) {
        return Err(Error::InvalidArgument(format!(
            "GHZ block representatives lie in [0, 2^{}), got end {}",
            n - 1,
            range.end
        )));
    }
    Ok(GhzLevels {
        walker: PairWalker::new(n, ch, range)?,
        pending: None,
    })
}

/// Separable output entropy in bits via the chain rule of the Markov chain
/// behind `P̃`: `h(η_0) + (n - 1) [η_0 h((1-mu) η_0 + mu) + η_1 h((1-mu) η_1 + mu)]`.
pub fn separable_entropy_closed(n: usize, ch: &ChannelParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidLength { n, max: usize::MAX });
    }
    let sym = symmetric(ch)?;
    let (e0, e1, mu) = (sym.eta.eta0, sym.eta.eta1, sym.mu);
    let rate = e0 * binary_entropy((1.0 - mu) * e0 + mu) + e1 * binary_entropy((1.0 - mu) * e1 + mu);
    Ok(binary_entropy(e0) + (n - 1) as f64 * rate)
}
