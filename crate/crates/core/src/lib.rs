//! Pauli channels with partial memory acting on strings of qubits.
//!
//! Consecutive qubits passing through the channel suffer the same Pauli error
//! with probability `mu` and independent errors otherwise. The crate computes
//! the output spectrum of the channel for separable and GHZ inputs in closed
//! form (streaming over all `2^n` basis strings, no dense matrices), an
//! independent dense Kraus-sum oracle for arbitrary pure inputs, and the
//! derived quantities used to compare encodings: von Neumann entropy,
//! the `n - S` mutual-information bound and the critical memory above which
//! GHZ strings beat separable ones.
//!
//! Bit and tensor ordering: qubit 1 is the leftmost tensor factor and the most
//! significant bit of a basis index.
//!
//! ```
//! use paulimem::{analysis, ChannelParams};
//!
//! let ch = ChannelParams::symmetric(0.4, 0.5).unwrap();
//! let s_sep = paulimem::spectrum::separable_entropy_closed(2, &ch).unwrap();
//! assert!((s_sep - 1.29131).abs() < 1e-4);
//! let gap = analysis::entropy_gap(2, 0.4, 0.9).unwrap();
//! assert!(gap > 0.0);
//! ```

pub mod analysis;
pub mod channel;
mod error;
pub mod numeric;
pub mod oracle;
pub mod spectrum;

pub use analysis::{CriticalMemoryResult, EntropyReport, InfoBound};
pub use channel::{make_channel, ChannelParams, EtaWeights, Pauli, PauliString};
pub use error::{Error, Result};
pub use oracle::{DensityMatrix, Encoding, StateVector, DEFAULT_DENSE_CAP};
pub use spectrum::{BitString, Level, SpectrumStream, TildeCoeffs};
