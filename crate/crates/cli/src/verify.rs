//! On-demand verification: normalization, chain rule, analytic limits and
//! closed-form vs dense-oracle agreement.

use paulimem::analysis::{ghz_entropy, separable_entropy, von_neumann_entropy};
use paulimem::channel::total_pattern_mass;
use paulimem::numeric::binary_entropy;
use paulimem::oracle::{encode_state, output_spectrum_dense};
use paulimem::spectrum::{ghz_spectrum, separable_entropy_closed, separable_spectrum};
use paulimem::{ChannelParams, Encoding, Error, SpectrumStream};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const MAX_LISTED_FAILURES: usize = 10;

/// Deliberate corruption of the closed-form side, used as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Evaluate closed forms at `1 - mu` instead of `mu`.
    FlipMemory,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub dense_cap: usize,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub suite: &'static str,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub name: &'static str,
    pub checks: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub suites: Vec<SuiteSummary>,
    pub failures: Vec<Failure>,
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<Failure>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, label: impl FnOnce() -> String, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure {
                suite: self.name,
                check: label(),
                detail: detail(),
            });
        }
    }

    fn fail(&mut self, label: String, err: &Error) {
        self.checks += 1;
        self.failures.push(Failure {
            suite: self.name,
            check: label,
            detail: err.to_string(),
        });
    }
}

/// Channel handed to the closed-form side.
fn closed_channel(p: f64, mu: f64, fault: Option<Fault>) -> Result<ChannelParams, Error> {
    match fault {
        None => ChannelParams::symmetric(p, mu),
        Some(Fault::FlipMemory) => ChannelParams::symmetric(p, 1.0 - mu),
    }
}

fn mass<I: Iterator<Item = paulimem::Level>>(levels: I) -> (f64, f64) {
    levels.fold((0.0, f64::INFINITY), |(m, lo), l| {
        (m + l.value * l.multiplicity as f64, lo.min(l.value))
    })
}

fn pattern_mass(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Suite {
    let mut s = Suite::new("pattern_mass");
    for n in 1..=opts.n_max.clamp(1, 8) {
        for _ in 0..4 {
            let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.01..1.0));
            let total: f64 = w.iter().sum();
            let ch = match ChannelParams::new(w.map(|x| x / total), rng.random_range(0.0..=1.0)) {
                Ok(ch) => ch,
                Err(e) => {
                    s.fail(format!("n={n}"), &e);
                    continue;
                }
            };
            match total_pattern_mass(n, &ch) {
                Ok(m) => s.check(
                    || format!("n={n} probs={:?} mu={}", ch.probs(), ch.mu()),
                    (m - 1.0).abs() < 1e-12,
                    || format!("mass {m}"),
                ),
                Err(e) => s.fail(format!("n={n}"), &e),
            }
        }
    }
    s
}

fn normalization(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Suite {
    let mut s = Suite::new("normalization");
    for _ in 0..opts.samples {
        let p = rng.random_range(0.0..=0.5);
        let mu = rng.random_range(0.0..=1.0);
        let n = rng.random_range(1..=12usize);
        let label = || format!("n={n} p={p} mu={mu}");
        let ch = match closed_channel(p, mu, opts.fault) {
            Ok(ch) => ch,
            Err(e) => {
                s.fail(label(), &e);
                continue;
            }
        };
        let sep = separable_spectrum(n, &ch).map(mass);
        let ghz = ghz_spectrum(n, &ch).map(mass);
        for (kind, res) in [("sep", sep), ("ghz", ghz)] {
            match res {
                Ok((m, lo)) => s.check(
                    || format!("{kind} {}", label()),
                    (m - 1.0).abs() < 1e-12 && lo >= -1e-14,
                    || format!("mass {m}, min eigenvalue {lo}"),
                ),
                Err(e) => s.fail(label(), &e),
            }
        }
    }
    s
}

fn chain_rule(opts: &VerifyOptions) -> Suite {
    let mut s = Suite::new("chain_rule");
    for n in 1..=16 {
        for (p, mu) in [(0.4, 0.5), (0.2, 0.9), (0.45, 0.0), (0.1, 1.0), (0.3, 0.35)] {
            let label = || format!("n={n} p={p} mu={mu}");
            let res = closed_channel(p, mu, opts.fault).and_then(|ch| {
                let closed = separable_entropy_closed(n, &ch)?;
                let enumerated = von_neumann_entropy(separable_spectrum(n, &ch)?)?;
                Ok((closed, enumerated))
            });
            match res {
                Ok((a, b)) => s.check(label, (a - b).abs() < 1e-10, || format!("closed {a} vs enumerated {b}")),
                Err(e) => s.fail(label(), &e),
            }
        }
    }
    s
}

fn analytic_limits(opts: &VerifyOptions) -> Suite {
    let mut s = Suite::new("analytic_limits");
    for n in 1..=12usize {
        for p in [0.1, 0.3, 0.4] {
            let h = binary_entropy(2.0 * p);
            let ghz_limit = if n % 2 == 0 { 0.0 } else { 1.0 };
            let cases = [
                ("S_sep(mu=0) = n h(2p)", 0.0, false, n as f64 * h),
                ("S_sep(mu=1) = h(2p)", 1.0, false, h),
                ("S_ghz(mu=1)", 1.0, true, ghz_limit),
            ];
            for (what, mu, ghz, expect) in cases {
                let label = || format!("{what} n={n} p={p}");
                let res = closed_channel(p, mu, opts.fault).and_then(|ch| {
                    if ghz {
                        ghz_entropy(n, &ch)
                    } else {
                        separable_entropy(n, &ch)
                    }
                });
                match res {
                    Ok(v) => s.check(label, (v - expect).abs() < 1e-12, || {
                        format!("got {v}, expected {expect}")
                    }),
                    Err(e) => s.fail(label(), &e),
                }
            }
        }
    }
    s
}

fn oracle_equivalence(opts: &VerifyOptions) -> Suite {
    let mut s = Suite::new("oracle_equivalence");
    for n in 2..=opts.n_max {
        for p in [0.3, 0.4, 0.45] {
            for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
                for enc in [Encoding::Separable, Encoding::Ghz] {
                    let label = || format!("{enc} n={n} p={p} mu={mu}");
                    let res = (|| {
                        let closed_ch = closed_channel(p, mu, opts.fault)?;
                        let closed: SpectrumStream = match enc {
                            Encoding::Ghz => ghz_spectrum(n, &closed_ch)?.collect(),
                            _ => separable_spectrum(n, &closed_ch)?.collect(),
                        };
                        let ch = ChannelParams::symmetric(p, mu)?;
                        let dense = output_spectrum_dense(&encode_state(&enc, n)?, &ch, opts.dense_cap)?;
                        Ok::<_, Error>(
                            closed
                                .sorted_values()
                                .iter()
                                .zip(dense.sorted_values())
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0, f64::max),
                        )
                    })();
                    match res {
                        Ok(worst) => s.check(label, worst < 1e-10, || format!("max eigenvalue deviation {worst:e}")),
                        Err(e) => s.fail(label(), &e),
                    }
                }
            }
        }
    }
    s
}

pub fn run(opts: &VerifyOptions) -> Result<Summary, Error> {
    if opts.n_max > opts.dense_cap {
        return Err(Error::CapExceeded {
            what: "dense oracle verification",
            n: opts.n_max,
            cap: opts.dense_cap,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let suites = [
        pattern_mass(opts, &mut rng),
        normalization(opts, &mut rng),
        chain_rule(opts),
        analytic_limits(opts),
        oracle_equivalence(opts),
    ];
    let total = suites.iter().map(|s| s.checks).sum();
    let failed = suites.iter().map(|s| s.failures.len()).sum();
    let failures = suites
        .iter()
        .flat_map(|s| s.failures.iter().cloned())
        .take(MAX_LISTED_FAILURES)
        .collect();
    Ok(Summary {
        passed: failed == 0,
        total,
        failed,
        suites: suites
            .iter()
            .map(|s| SuiteSummary {
                name: s.name,
                checks: s.checks,
                failed: s.failures.len(),
            })
            .collect(),
        failures,
    })
}
