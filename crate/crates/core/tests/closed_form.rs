//! Closed-form spectra against brute-force enumeration.

use paulimem::analysis::{ghz_entropy, mutual_info_bound, separable_entropy, von_neumann_entropy};
use paulimem::channel::{pattern_prob, pattern_prob_bits, total_pattern_mass, Pauli, PauliString};
use paulimem::spectrum::{
    ghz_spectrum, separable_entropy_closed, separable_spectrum, tilde_p, tilde_q, BitString, MAX_STREAM_LEN,
};
use paulimem::{ChannelParams, Level, SpectrumStream};
use proptest::prelude::*;

/// `P̃_α = Σ_β P(α, β)` and `Q̃_α = Σ_β P(α, β) (-1)^{|β|}`, enumerating every
/// phase string `β` and evaluating the two-index pattern probability.
fn tilde_by_enumeration(alpha: u64, n: usize, ch: &ChannelParams) -> (f64, f64) {
    let mut p = 0.0;
    let mut q = 0.0;
    for beta in 0..1u64 << n {
        let bits: Vec<(bool, bool)> = (0..n)
            .map(|i| {
                let shift = n - 1 - i;
                ((alpha >> shift) & 1 == 1, (beta >> shift) & 1 == 1)
            })
            .collect();
        let w = pattern_prob_bits(&bits, ch).unwrap();
        p += w;
        q += if beta.count_ones() % 2 == 0 { w } else { -w };
    }
    (p, q)
}

#[test]
fn tilde_coefficients_match_phase_sum() {
    for n in 1..=8 {
        for &(p, mu) in &[(0.4, 0.5), (0.3, 0.0), (0.45, 1.0), (0.1, 0.77), (0.5, 0.3)] {
            let ch = ChannelParams::symmetric(p, mu).unwrap();
            for alpha in 0..1u64 << n {
                let (ep, eq) = tilde_by_enumeration(alpha, n, &ch);
                let a = BitString::new(alpha, n).unwrap();
                let tp = tilde_p(a, &ch).unwrap();
                let tq = tilde_q(a, &ch).unwrap();
                assert!((tp - ep).abs() < 1e-14, "P n={n} α={a} {tp} vs {ep}");
                assert!((tq - eq).abs() < 1e-14, "Q n={n} α={a} {tq} vs {eq}");
            }
        }
    }
}

#[test]
fn chain_rule_matches_enumeration_up_to_16() {
    for n in 1..=16 {
        for &(p, mu) in &[(0.4, 0.5), (0.2, 0.9), (0.05, 0.1), (0.33, 1.0), (0.49, 0.0)] {
            let ch = ChannelParams::symmetric(p, mu).unwrap();
            let closed = separable_entropy_closed(n, &ch).unwrap();
            let enumerated = von_neumann_entropy(separable_spectrum(n, &ch).unwrap()).unwrap();
            assert!((closed - enumerated).abs() < 1e-10, "n={n} p={p} mu={mu}");
        }
    }
}

#[test]
fn anchor_spectra_two_qubits() {
    let ch = ChannelParams::symmetric(0.4, 0.5).unwrap();
    let sep = SpectrumStream::from_iter(separable_spectrum(2, &ch).unwrap());
    let ghz = SpectrumStream::from_iter(ghz_spectrum(2, &ch).unwrap());
    let expect_sep = [0.72, 0.12, 0.08, 0.08];
    let expect_ghz = [0.67, 0.17, 0.08, 0.08];
    for (a, b) in sep.sorted_values().iter().zip(expect_sep) {
        assert!((a - b).abs() < 1e-15);
    }
    for (a, b) in ghz.sorted_values().iter().zip(expect_ghz) {
        assert!((a - b).abs() < 1e-15);
    }
    // entropies from the frozen spectra: -Σ λ lg λ
    let h = |v: &[f64]| -v.iter().map(|x| x * x.log2()).sum::<f64>();
    assert!((von_neumann_entropy(sep).unwrap() - h(&expect_sep)).abs() < 1e-14);
    assert!((von_neumann_entropy(ghz).unwrap() - h(&expect_ghz)).abs() < 1e-14);
}

#[test]
fn stream_length_limits() {
    let ch = ChannelParams::symmetric(0.4, 0.5).unwrap();
    assert!(separable_spectrum(0, &ch).is_err());
    assert!(ghz_spectrum(MAX_STREAM_LEN + 1, &ch).is_err());
}

fn symmetric_channel() -> impl Strategy<Value = ChannelParams> {
    (0.0..=0.5f64, 0.0..=1.0f64).prop_map(|(p, mu)| ChannelParams::symmetric(p, mu).unwrap())
}

fn any_channel() -> impl Strategy<Value = ChannelParams> {
    (proptest::array::uniform4(0.0..1.0f64), 0.0..=1.0f64).prop_filter_map("degenerate weights", |(w, mu)| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| ChannelParams::new(w.map(|x| x / s), mu).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectra_normalized_and_nonnegative(ch in symmetric_channel(), n in 1usize..=12) {
        let mut mass = 0.0;
        for l in separable_spectrum(n, &ch).unwrap() {
            prop_assert!(l.value >= -1e-14);
            mass += l.value * l.multiplicity as f64;
        }
        prop_assert!((mass - 1.0).abs() < 1e-12);

        let mut mass = 0.0;
        for l in ghz_spectrum(n, &ch).unwrap() {
            prop_assert!(l.value >= -1e-14);
            mass += l.value * l.multiplicity as f64;
        }
        prop_assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn raw_ghz_block_values_nonnegative(ch in symmetric_channel(), n in 1usize..=12) {
        use paulimem::spectrum::{ghz_block_eigenvalues, PairWalker};
        for pc in PairWalker::new(n, &ch, 0..1 << (n - 1)).unwrap() {
            let (_, minus) = ghz_block_eigenvalues(&pc);
            prop_assert!(minus >= -1e-14, "n={} α={} λ-={}", n, pc.alpha, minus);
        }
    }

    #[test]
    fn pattern_mass_is_one(ch in any_channel(), n in 1usize..=6) {
        prop_assert!((total_pattern_mass(n, &ch).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn labelings_agree_exactly(ch in any_channel(), idx in proptest::collection::vec(0u8..4, 1..10)) {
        let s = PauliString::from_indices(&idx).unwrap();
        let bits: Vec<(bool, bool)> = s.iter().map(Pauli::bits).collect();
        prop_assert_eq!(pattern_prob(&s, &ch), pattern_prob_bits(&bits, &ch).unwrap());
    }

    #[test]
    fn pattern_prob_factorized_form(ch in any_channel(), idx in proptest::collection::vec(0u8..4, 1..10)) {
        let s = PauliString::from_indices(&idx).unwrap();
        let p = ch.probs();
        let mu = ch.mu();
        let n = idx.len();
        let mut expect = p[idx[n - 1] as usize];
        for m in 0..n - 1 {
            let same = if idx[m] == idx[m + 1] { 1.0 } else { 0.0 };
            expect *= (1.0 - mu) * p[idx[m] as usize] + mu * same;
        }
        prop_assert!((pattern_prob(&s, &ch) - expect).abs() <= 1e-15 * expect.max(1e-300));
    }

    #[test]
    fn bound_plus_entropy_is_n(n in 1usize..=30, frac in 0.0..=1.0f64) {
        let s = frac * n as f64;
        let b = mutual_info_bound(n, s).unwrap();
        prop_assert!((b.holevo_bound_bits + s - n as f64).abs() < 1e-12);
        prop_assert!((b.per_use_bits * n as f64 - b.holevo_bound_bits).abs() < 1e-12);
    }

    #[test]
    fn partitioned_entropy_matches_sequential(ch in symmetric_channel(), n in 13usize..=15) {
        let seq = von_neumann_entropy(separable_spectrum(n, &ch).unwrap()).unwrap();
        prop_assert!((separable_entropy(n, &ch).unwrap() - seq).abs() < 1e-12);
        let seq = von_neumann_entropy(ghz_spectrum(n, &ch).unwrap()).unwrap();
        prop_assert!((ghz_entropy(n, &ch).unwrap() - seq).abs() < 1e-12);
    }
}

#[test]
fn odd_ghz_levels_have_multiplicity_two() {
    let ch = ChannelParams::symmetric(0.4, 0.8).unwrap();
    let levels: Vec<Level> = ghz_spectrum(7, &ch).unwrap().collect();
    assert!(levels.iter().all(|l| l.multiplicity == 2));
    assert_eq!(levels.iter().map(|l| l.multiplicity).sum::<u64>(), 128);
}
