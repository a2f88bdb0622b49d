//! Entropies, mutual-information bounds and the separable-vs-GHZ comparison.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::numeric::{entropy_term, NeumaierSum};
use crate::oracle::{encode_state, output_spectrum_dense, Encoding};
use crate::spectrum::{ghz_spectrum_range, separable_spectrum_range, Level};

/// Allowed deviation of a spectrum's total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-10;
/// Slack when checking `0 <= S <= n`.
const ENTROPY_RANGE_SLACK: f64 = 1e-9;
/// Grid size of the sign-change pre-scan in [`critical_memory`].
pub const DEFAULT_GRID_POINTS: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const MIN_TOL: f64 = 1e-8;

/// Streams below this many `α` are summed on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 12;
const PARTITIONS: u64 = 64;

/// Running entropy and mass of a stream of levels.
#[derive(Clone, Copy, Debug, Default)]
pub struct EntropyAccumulator {
    entropy: NeumaierSum,
    mass: NeumaierSum,
}

impl EntropyAccumulator {
    pub fn push(&mut self, level: Level) {
        let v = level.value.max(0.0);
        let m = level.multiplicity as f64;
        self.entropy.add(m * entropy_term(v));
        self.mass.add(m * v);
    }

    pub fn merge(&mut self, other: &EntropyAccumulator) {
        self.entropy.merge(&other.entropy);
        self.mass.merge(&other.mass);
    }

    pub fn mass(&self) -> f64 {
        self.mass.value()
    }

    pub fn finish(&self) -> Result<f64> {
        let mass = self.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::SpectrumMass(mass));
        }
        Ok(self.entropy.value().max(0.0))
    }
}

impl Extend<Level> for EntropyAccumulator {
    fn extend<I: IntoIterator<Item = Level>>(&mut self, iter: I) {
        for l in iter {
            self.push(l);
        }
    }
}

/// `-Σ λ lg λ` in bits over a unit-mass spectrum.
pub fn von_neumann_entropy<I: IntoIterator<Item = Level>>(levels: I) -> Result<f64> {
    let mut acc = EntropyAccumulator::default();
    acc.extend(levels);
    acc.finish()
}

/// Bound `n - S` on the mutual information of `n` channel uses, and its per-use value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoBound {
    pub holevo_bound_bits: f64,
    pub per_use_bits: f64,
}

pub fn mutual_info_bound(n: usize, entropy_bits: f64) -> Result<InfoBound> {
    let nf = n as f64;
    if n == 0
        || !entropy_bits.is_finite()
        || entropy_bits < -ENTROPY_RANGE_SLACK
        || entropy_bits > nf + ENTROPY_RANGE_SLACK
    {
        return Err(Error::EntropyOutOfRange {
            n,
            entropy: entropy_bits,
        });
    }
    let bound = nf - entropy_bits;
    Ok(InfoBound {
        holevo_bound_bits: bound,
        per_use_bits: bound / nf,
    })
}

fn partitioned<F>(len: u64, f: F) -> Result<EntropyAccumulator>
where
    F: Fn(std::ops::Range<u64>) -> Result<EntropyAccumulator> + Sync,
{
    if len <= PARALLEL_THRESHOLD {
        return f(0..len);
    }
    let step = len.div_ceil(PARTITIONS);
    let parts: Vec<EntropyAccumulator> = (0..PARTITIONS)
        .into_par_iter()
        .map(|i| f(i * step..((i + 1) * step).min(len)))
        .collect::<Result<_>>()?;
    let mut total = EntropyAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// Entropy of `E(|0…0⟩⟨0…0|)` by streaming all `2^n` closed-form eigenvalues.
pub fn separable_entropy(n: usize, ch: &ChannelParams) -> Result<f64> {
    let len = 1u64 << n.clamp(1, 63);
    partitioned(len, |r| {
        let mut acc = EntropyAccumulator::default();
        acc.extend(separable_spectrum_range(n, ch, r)?);
        Ok(acc)
    })?
    .finish()
}

/// Entropy of the GHZ output by streaming its `2^(n-1)` closed-form blocks.
pub fn ghz_entropy(n: usize, ch: &ChannelParams) -> Result<f64> {
    let len = 1u64 << n.clamp(1, 64).saturating_sub(1);
    partitioned(len, |r| {
        let mut acc = EntropyAccumulator::default();
        acc.extend(ghz_spectrum_range(n, ch, r)?);
        Ok(acc)
    })?
    .finish()
}

/// Output entropy of an encoding: closed form for `sep`/`ghz` on symmetric
/// channels, dense oracle otherwise (limited to `dense_cap` qubits).
pub fn encoding_entropy(encoding: &Encoding, n: usize, ch: &ChannelParams, dense_cap: usize) -> Result<f64> {
    encoding.check(n)?;
    match encoding {
        Encoding::Separable if ch.is_symmetric() => separable_entropy(n, ch),
        Encoding::Ghz if ch.is_symmetric() => ghz_entropy(n, ch),
        _ => {
            if n > dense_cap {
                return Err(Error::CapExceeded {
                    what: "dense channel application",
                    n,
                    cap: dense_cap,
                });
            }
            let state = encode_state(encoding, n)?;
            von_neumann_entropy(output_spectrum_dense(&state, ch, dense_cap)?)
        }
    }
}

/// One `(n, p, mu, encoding)` evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub n: usize,
    pub p: f64,
    pub mu: f64,
    pub encoding: Encoding,
    pub entropy_bits: f64,
    pub holevo_bound_bits: f64,
    pub per_use_bits: f64,
}

impl EntropyReport {
    pub fn new(n: usize, p: f64, mu: f64, encoding: Encoding, entropy_bits: f64) -> Result<Self> {
        let bound = mutual_info_bound(n, entropy_bits)?;
        let entropy_bits = entropy_bits.clamp(0.0, n as f64);
        Ok(EntropyReport {
            n,
            p,
            mu,
            encoding,
            entropy_bits,
            holevo_bound_bits: bound.holevo_bound_bits.clamp(0.0, n as f64),
            per_use_bits: bound.per_use_bits.clamp(0.0, 1.0),
        })
    }
}

/// Report for a symmetric channel with parameters `(p, mu)`.
pub fn entropy_report(n: usize, p: f64, mu: f64, encoding: &Encoding, dense_cap: usize) -> Result<EntropyReport> {
    let ch = ChannelParams::symmetric(p, mu)?;
    let s = encoding_entropy(encoding, n, &ch, dense_cap)?;
    EntropyReport::new(n, p, mu, encoding.clone(), s)
}

/// `S_sep - S_ghz`; positive when the GHZ encoding has lower output entropy.
pub fn entropy_gap(n: usize, p: f64, mu: f64) -> Result<f64> {
    let ch = ChannelParams::symmetric(p, mu)?;
    Ok(separable_entropy(n, &ch)? - ghz_entropy(n, &ch)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalMemoryResult {
    pub n: usize,
    pub p: f64,
    /// Smallest detected crossing of the entropy gap.
    pub mu_c: Option<f64>,
    /// Final bisection bracket around `mu_c`.
    pub bracket: Option<(f64, f64)>,
    pub tol: f64,
    /// Every refined crossing, ascending.
    pub crossings: Vec<f64>,
    /// More than one sign change was found on the grid.
    pub multiple_crossings: bool,
}

pub fn critical_memory(n: usize, p: f64, tol: f64) -> Result<CriticalMemoryResult> {
    critical_memory_with_grid(n, p, tol, DEFAULT_GRID_POINTS)
}

/// Scans `grid_points` equally spaced `mu` in `[0, 1]` for sign changes of
/// [`entropy_gap`] and bisects each to width `tol`.
pub fn critical_memory_with_grid(n: usize, p: f64, tol: f64, grid_points: usize) -> Result<CriticalMemoryResult> {
    if !tol.is_finite() || tol < MIN_TOL {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be >= {MIN_TOL}, got {tol}"
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    let gap = |mu: f64| entropy_gap(n, p, mu);
    let grid = mu_grid(0.0, 1.0, grid_points)?;
    let values: Vec<f64> = grid.par_iter().map(|&mu| gap(mu)).collect::<Result<_>>()?;

    let mut brackets = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&mu, &g) in grid.iter().zip(&values) {
        if g == 0.0 {
            continue;
        }
        if let Some((mu0, g0)) = last {
            if (g0 < 0.0) != (g < 0.0) {
                brackets.push((mu0, g0, mu));
            }
        }
        last = Some((mu, g));
    }

    let mut refined = Vec::with_capacity(brackets.len());
    for (lo, g_lo, hi) in brackets {
        refined.push(bisect(&gap, lo, g_lo, hi, tol)?);
    }
    let first = refined.first().copied();
    Ok(CriticalMemoryResult {
        n,
        p,
        mu_c: first.map(|(root, _)| root),
        bracket: first.map(|(_, b)| b),
        tol,
        multiple_crossings: refined.len() > 1,
        crossings: refined.into_iter().map(|(root, _)| root).collect(),
    })
}

/// Bisection on `[lo, hi]` given the sign at `lo`; returns the midpoint of
/// the final bracket and the bracket.
fn bisect<F>(f: &F, mut lo: f64, g_lo: f64, mut hi: f64, tol: f64) -> Result<(f64, (f64, f64))>
where
    F: Fn(f64) -> Result<f64>,
{
    let lo_negative = g_lo < 0.0;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g = f(mid)?;
        if g == 0.0 {
            return Ok((mid, (mid, mid)));
        }
        if (g < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), (lo, hi)))
}

/// `count` equally spaced points from `start` to `stop`, both inclusive.
pub fn mu_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!("grid count must be >= 2, got {count}")));
    }
    if !start.is_finite() || !stop.is_finite() || start > stop {
        return Err(Error::InvalidArgument(format!("invalid grid range [{start}, {stop}]")));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { stop } else { start + step * k as f64 })
        .collect())
}

/// One report per `(encoding, mu)`, encoding-major with `mu` ascending.
pub fn sweep(
    n: usize,
    p: f64,
    mu_grid: &[f64],
    encodings: &[Encoding],
    dense_cap: usize,
) -> Result<Vec<EntropyReport>> {
    ChannelParams::symmetric(p, 0.0)?;
    let mut mus = mu_grid.to_vec();
    for &mu in &mus {
        if !mu.is_finite() || !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidMemory(mu));
        }
    }
    mus.sort_by(f64::total_cmp);
    let wrap = |e: &Encoding, err: Error| Error::Encoding {
        encoding: e.to_string(),
        source: Box::new(err),
    };
    for e in encodings {
        e.check(n).map_err(|err| wrap(e, err))?;
        if !e.has_closed_form() && n > dense_cap {
            return Err(wrap(
                e,
                Error::CapExceeded {
                    what: "dense channel application",
                    n,
                    cap: dense_cap,
                },
            ));
        }
    }
    let jobs: Vec<(&Encoding, f64)> = encodings
        .iter()
        .flat_map(|e| mus.iter().map(move |&mu| (e, mu)))
        .collect();
    jobs.par_iter()
        .map(|&(e, mu)| entropy_report(n, p, mu, e, dense_cap).map_err(|err| wrap(e, err)))
        .collect()
}
