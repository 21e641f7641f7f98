//! Monte Carlo sweeps over erasure rates, the oracle cross-check harness,
//! and the CSV output format.

use crate::channel::{complement, sample, ErasureInstance, TrialSeed};
use crate::codes::{hgp, load, random_check_matrix, shipped_hgp, surface_code, CssCode, ErrorType};
use crate::decoders::{
    classify, hard_guess_peel, inactivation_decode, peel, peeling_order, DecodeResult,
};
use crate::dual_peeling::{dual_peel, stab_assisted_decode, DualConfig, DualState, Engine};
use crate::gf2::SparseBitMatrix;
use crate::oracle::{erased_logical_dim, fully_erased_dim, ml_decode_ge};
use crate::surface_fast::{contract_known_edges, surface_ml_decode};
use anyhow::{anyhow, bail, ensure, Context, Result};
use rayon::prelude::*;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

pub const CSV_HEADER: &str = "code,decoder,p,trials,failures,failure_rate,mean_inactivations,\
mean_core_dim,mean_fixed_bits,mean_hard_guesses,seed,wall_seconds";

pub const CSV_COMMENT: &str = "# a trial fails if either the X or the Z side ends in a logical or \
non-convergent outcome; means are per decoded side";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Peel,
    DualPeel,
    Hard,
    Inact,
    StabInact,
    SurfaceFast,
    MlOracle,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 7] = [
        DecoderKind::Peel,
        DecoderKind::DualPeel,
        DecoderKind::Hard,
        DecoderKind::Inact,
        DecoderKind::StabInact,
        DecoderKind::SurfaceFast,
        DecoderKind::MlOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Peel => "peel",
            DecoderKind::DualPeel => "dual-peel",
            DecoderKind::Hard => "hard",
            DecoderKind::Inact => "inact",
            DecoderKind::StabInact => "stab-inact",
            DecoderKind::SurfaceFast => "surface-fast",
            DecoderKind::MlOracle => "ml-oracle",
        }
    }

    pub fn needs_lattice(self) -> bool {
        self == DecoderKind::SurfaceFast
    }

    /// Decodes one side of an instance.
    pub fn decode(
        self,
        code: &CssCode,
        inst: &ErasureInstance,
        side: ErrorType,
    ) -> Result<DecodeResult> {
        let h = code.checks(side);
        let s = inst.syndrome(side);
        Ok(match self {
            DecoderKind::Peel => peel(h, &inst.erased, s).0,
            DecoderKind::DualPeel => stab_assisted_decode(code, inst, side, Engine::Peel),
            DecoderKind::Hard => hard_guess_peel(h, &inst.erased, s),
            DecoderKind::Inact => inactivation_decode(h, &inst.erased, s),
            DecoderKind::StabInact => stab_assisted_decode(code, inst, side, Engine::Inactivation),
            DecoderKind::SurfaceFast => surface_ml_decode(code, inst, side)?.result,
            DecoderKind::MlOracle => ml_decode_ge(h, &inst.erased, s),
        })
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|d| d.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = DecoderKind::ALL.iter().map(|d| d.name()).collect();
                anyhow!(
                    "unknown decoder {s:?}; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

pub fn parse_decoders(list: &str) -> Result<Vec<DecoderKind>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// `surface:<d>`, `hgp:shipped`, `hgp-random:<m>x<n>:<seed>` or a bundle directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSource {
    Surface(usize),
    ShippedHgp,
    RandomHgp { rows: usize, cols: usize, seed: u64 },
    Bundle(PathBuf),
}

impl FromStr for CodeSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(d) = s.strip_prefix("surface:") {
            return Ok(CodeSource::Surface(
                d.parse()
                    .with_context(|| format!("bad distance in {s:?}"))?,
            ));
        }
        if s == "hgp:shipped" {
            return Ok(CodeSource::ShippedHgp);
        }
        if let Some(rest) = s.strip_prefix("hgp-random:") {
            let parse = || -> Option<CodeSource> {
                let (dims, seed) = rest.split_once(':')?;
                let (m, n) = dims.split_once('x')?;
                Some(CodeSource::RandomHgp {
                    rows: m.parse().ok()?,
                    cols: n.parse().ok()?,
                    seed: seed.parse().ok()?,
                })
            };
            return parse().ok_or_else(|| anyhow!("expected hgp-random:<m>x<n>:<seed>, got {s:?}"));
        }
        Ok(CodeSource::Bundle(PathBuf::from(s)))
    }
}

impl CodeSource {
    pub fn build(&self) -> Result<CssCode> {
        Ok(match self {
            CodeSource::Surface(d) => surface_code(*d)?,
            CodeSource::ShippedHgp => shipped_hgp(),
            CodeSource::RandomHgp { rows, cols, seed } => {
                let h1 = random_check_matrix(*rows, *cols, *seed);
                let h2 = random_check_matrix(*rows, *cols, seed.wrapping_add(1));
                hgp(&h1, &h2)?
            }
            CodeSource::Bundle(dir) => load(dir)?,
        })
    }
}

/// `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_rates(s: &str) -> Result<Vec<f64>> {
    let round = |x: f64| (x * 1e9).round() / 1e9;
    let rates: Vec<f64> = if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("bad rate range {s:?}"))?;
        let [a, b, step] = parts[..] else {
            bail!("rate range must be start:stop:step, got {s:?}");
        };
        ensure!(step > 0.0, "rate step must be positive");
        ensure!(b >= a, "rate range stop is below start");
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| round(a + i as f64 * step)).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map(round))
            .collect::<Result<_, _>>()
            .with_context(|| format!("bad rate list {s:?}"))?
    };
    ensure!(!rates.is_empty(), "no erasure rates given");
    for &p in &rates {
        ensure!((0.0..=1.0).contains(&p), "erasure rate {p} outside [0, 1]");
    }
    Ok(rates)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub decoders: Vec<DecoderKind>,
    pub rates: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SweepConfig {
    pub fn validate(&self, code: &CssCode) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(!self.decoders.is_empty(), "no decoders given");
        for &p in &self.rates {
            ensure!((0.0..=1.0).contains(&p), "erasure rate {p} outside [0, 1]");
        }
        for d in &self.decoders {
            ensure!(
                !d.needs_lattice() || code.lattice().is_some(),
                "decoder {d} needs a planar surface code, {} has no lattice",
                code.name()
            );
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub code: String,
    pub decoder: DecoderKind,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub mean_inactivations: f64,
    pub mean_core_dim: f64,
    pub mean_fixed_bits: f64,
    pub mean_hard_guesses: f64,
    pub seed: u64,
    pub wall_seconds: f64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            self.code,
            self.decoder,
            self.p,
            self.trials,
            self.failures,
            self.failure_rate,
            self.mean_inactivations,
            self.mean_core_dim,
            self.mean_fixed_bits,
            self.mean_hard_guesses,
            self.seed,
            self.wall_seconds
        )
    }
}

/// Integer sums over trials; merging is commutative so the worker count
/// cannot change the totals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    failures: u64,
    inactivations: u64,
    core_dim: u64,
    fixed_bits: u64,
    hard_guesses: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.failures += o.failures;
        self.inactivations += o.inactivations;
        self.core_dim += o.core_dim;
        self.fixed_bits += o.fixed_bits;
        self.hard_guesses += o.hard_guesses;
        self
    }
}

/// Decodes both sides of one instance. Returns whether the trial failed
/// and its tally contribution.
fn run_trial(code: &CssCode, inst: &ErasureInstance, decoder: DecoderKind) -> Result<Tally> {
    let mut t = Tally {
        trials: 1,
        ..Tally::default()
    };
    let mut failed = false;
    for side in ErrorType::BOTH {
        let res = decoder.decode(code, inst, side)?;
        failed |= classify(&res.estimate, inst.error(side), code, side, res.status).is_failure();
        t.inactivations += res.stats.num_inactivations as u64;
        t.core_dim += res.stats.core_dim as u64;
        t.fixed_bits += res.stats.num_fixed_bits as u64;
        t.hard_guesses += res.stats.num_hard_guesses as u64;
    }
    t.failures = failed as u64;
    Ok(t)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")
}

/// Trial `t` at rate index `r` uses stream `r * trials + t`.
pub fn trial_seed(config: &SweepConfig, rate_index: usize, t: u64) -> TrialSeed {
    TrialSeed::new(config.seed, rate_index as u64 * config.trials + t)
}

pub fn run_sweep(code: &CssCode, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate(code)?;
    let pool = pool(config.workers)?;
    // warm the stabilizer-space cache outside the timed region
    for side in ErrorType::BOTH {
        code.stabilizer_space(side);
    }
    let mut rows = Vec::new();
    for &decoder in &config.decoders {
        for (r, &p) in config.rates.iter().enumerate() {
            let start = Instant::now();
            let tally = pool.install(|| {
                (0..config.trials)
                    .into_par_iter()
                    .map(|t| run_trial(code, &sample(code, p, trial_seed(config, r, t)), decoder))
                    .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
            })?;
            let n = tally.trials as f64;
            // per decoded side: each trial decodes an X and a Z side
            let per_side = |x: u64| x as f64 / (2.0 * n);
            rows.push(SweepRow {
                code: code.name().to_string(),
                decoder,
                p,
                trials: tally.trials,
                failures: tally.failures,
                failure_rate: tally.failures as f64 / n,
                mean_inactivations: per_side(tally.inactivations),
                mean_core_dim: per_side(tally.core_dim),
                mean_fixed_bits: per_side(tally.fixed_bits),
                mean_hard_guesses: per_side(tally.hard_guesses),
                seed: config.seed,
                wall_seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

/// Appends rows to `path`, writing the comment and header first if the
/// file is new or empty.
pub fn write_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut out = String::new();
    if fresh {
        out.push_str(CSV_COMMENT);
        out.push('\n');
        out.push_str(CSV_HEADER);
        out.push('\n');
    }
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    file.write_all(out.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

/// Empirical failure count of one decoder against the oracle expectation.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderCheck {
    pub decoder: DecoderKind,
    pub failures: u64,
    /// Sum over trials of the predicted ML failure probability.
    pub expected: f64,
    pub sigma: f64,
}

impl DecoderCheck {
    pub fn deviation(&self) -> f64 {
        self.failures as f64 - self.expected
    }

    /// Within three standard deviations; exact agreement when the
    /// prediction is deterministic.
    pub fn within_three_sigma(&self) -> bool {
        if self.sigma == 0.0 {
            (self.failures as f64 - self.expected).abs() < 1e-9
        } else {
            self.deviation().abs() <= 3.0 * self.sigma
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub trials: u64,
    pub p: f64,
    pub checks: Vec<DecoderCheck>,
    /// Sides where elimination and inactivation estimates differ.
    pub ge_mismatches: u64,
    /// Sides reported solved whose estimate misses the syndrome.
    pub inconsistent_solved: u64,
    /// Trials with no erased logical on which an ML decoder failed.
    pub zero_logical_failures: u64,
    /// Rule-2 re-runs that found a new fully erased stabilizer.
    pub rule2_rerun_violations: u64,
    /// Sides where Rule-1 dual peeling, contraction and the rank oracle disagree.
    pub basis_count_violations: u64,
}

impl VerifyReport {
    pub fn hard_violations(&self) -> u64 {
        self.ge_mismatches
            + self.inconsistent_solved
            + self.zero_logical_failures
            + self.rule2_rerun_violations
            + self.basis_count_violations
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={} trials={}", self.p, self.trials)?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<13} failures={} expected={:.2} sigma={:.2} deviation={:+.2} {}",
                c.decoder.name(),
                c.failures,
                c.expected,
                c.sigma,
                c.deviation(),
                if c.within_three_sigma() {
                    "ok"
                } else {
                    "OUTSIDE 3 SIGMA"
                }
            )?;
        }
        writeln!(f, "ge/inact estimate mismatches: {}", self.ge_mismatches)?;
        writeln!(
            f,
            "solved but syndrome-inconsistent: {}",
            self.inconsistent_solved
        )?;
        writeln!(
            f,
            "failures without an erased logical: {}",
            self.zero_logical_failures
        )?;
        writeln!(
            f,
            "rule-2 re-run violations: {}",
            self.rule2_rerun_violations
        )?;
        writeln!(
            f,
            "rule-1 basis count violations: {}",
            self.basis_count_violations
        )?;
        write!(f, "hard violations: {}", self.hard_violations())
    }
}

#[derive(Clone, Debug, Default)]
struct VerifyTally {
    failures: Vec<u64>,
    expected: f64,
    variance: f64,
    ge_mismatches: u64,
    inconsistent_solved: u64,
    zero_logical_failures: u64,
    rule2_rerun_violations: u64,
    basis_count_violations: u64,
}

impl VerifyTally {
    fn merge(mut self, o: VerifyTally) -> VerifyTally {
        if self.failures.len() < o.failures.len() {
            self.failures.resize(o.failures.len(), 0);
        }
        for (a, b) in self.failures.iter_mut().zip(&o.failures) {
            *a += b;
        }
        self.expected += o.expected;
        self.variance += o.variance;
        self.ge_mismatches += o.ge_mismatches;
        self.inconsistent_solved += o.inconsistent_solved;
        self.zero_logical_failures += o.zero_logical_failures;
        self.rule2_rerun_violations += o.rule2_rerun_violations;
        self.basis_count_violations += o.basis_count_violations;
        self
    }
}

/// New fully erased stabilizers found by Rule 2 after full dual peeling,
/// while the first `prefix` qubits of the primal peeling order are fed
/// into the known set one at a time.
pub fn rule2_rerun_discoveries(
    stabilizers: &SparseBitMatrix,
    checks: &SparseBitMatrix,
    erased: &[usize],
    prefix: usize,
) -> usize {
    let n = stabilizers.num_cols();
    let mut state = DualState::new(stabilizers, &complement(erased, n), DualConfig::default());
    state.run();
    let fixed = state.fixed_qubits().to_vec();
    let reduced: Vec<usize> = erased
        .iter()
        .copied()
        .filter(|q| !fixed.contains(q))
        .collect();
    state.set_config(DualConfig::rule2_only());
    let before = state.fully_erased().len();
    for q in peeling_order(checks, &reduced).into_iter().take(prefix) {
        state.add_known(q);
        state.run();
    }
    state.fully_erased().len() - before
}

fn verify_trial(
    code: &CssCode,
    inst: &ErasureInstance,
    decoders: &[DecoderKind],
) -> Result<VerifyTally> {
    let n = code.n();
    let known = complement(&inst.erased, n);
    let mut t = VerifyTally {
        failures: vec![0; decoders.len()],
        ..VerifyTally::default()
    };
    let mut logicals = 0;
    for side in ErrorType::BOTH {
        let h = code.checks(side);
        let s = inst.syndrome(side);
        let ge = ml_decode_ge(h, &inst.erased, s);
        let inact = inactivation_decode(h, &inst.erased, s);
        t.ge_mismatches += (ge.estimate != inact.estimate || ge.status != inact.status) as u64;
        logicals += erased_logical_dim(code, &inst.erased, side);

        let stabs = code.stabilizers(side);
        t.rule2_rerun_violations +=
            rule2_rerun_discoveries(stabs, h, &inst.erased, usize::MAX) as u64;
        if code.lattice().is_some() {
            let oracle = fully_erased_dim(stabs, &known);
            let rule1 = dual_peel(stabs, &known, DualConfig::rule1_only())
                .fixed_qubits
                .len();
            let uf = contract_known_edges(code, &inst.erased, side)?
                .fully_erased_roots()
                .len();
            t.basis_count_violations += (rule1 != oracle || uf != oracle) as u64;
        }
    }
    let q = 1.0 - 0.5f64.powi(logicals as i32);
    t.expected = q;
    t.variance = q * (1.0 - q);
    for (i, &d) in decoders.iter().enumerate() {
        let mut failed = false;
        for side in ErrorType::BOTH {
            let res = d.decode(code, inst, side)?;
            if res.is_solved() && code.checks(side).mul_vec(&res.estimate) != *inst.syndrome(side) {
                t.inconsistent_solved += 1;
            }
            failed |=
                classify(&res.estimate, inst.error(side), code, side, res.status).is_failure();
        }
        t.failures[i] = failed as u64;
        if failed && logicals == 0 {
            t.zero_logical_failures += 1;
        }
    }
    Ok(t)
}

/// Cross-checks the ML decoders against the oracle on `trials` samples at
/// rate `p`.
pub fn verify(
    code: &CssCode,
    p: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<VerifyReport> {
    ensure!((0.0..=1.0).contains(&p), "erasure rate {p} outside [0, 1]");
    ensure!(trials >= 1, "trials must be at least 1");
    let mut decoders = vec![DecoderKind::Inact, DecoderKind::StabInact];
    if code.lattice().is_some() {
        decoders.push(DecoderKind::SurfaceFast);
    }
    for side in ErrorType::BOTH {
        code.stabilizer_space(side);
    }
    let tally = pool(workers)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| verify_trial(code, &sample(code, p, TrialSeed::new(seed, t)), &decoders))
            .try_reduce(VerifyTally::default, |a, b| Ok(a.merge(b)))
    })?;
    let sigma = tally.variance.sqrt();
    let checks = decoders
        .iter()
        .enumerate()
        .map(|(i, &decoder)| DecoderCheck {
            decoder,
            failures: tally.failures.get(i).copied().unwrap_or(0),
            expected: tally.expected,
            sigma,
        })
        .collect();
    Ok(VerifyReport {
        trials,
        p,
        checks,
        ge_mismatches: tally.ge_mismatches,
        inconsistent_solved: tally.inconsistent_solved,
        zero_logical_failures: tally.zero_logical_failures,
        rule2_rerun_violations: tally.rule2_rerun_violations,
        basis_count_violations: tally.basis_count_violations,
    })
}
