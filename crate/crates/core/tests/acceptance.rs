//! Acceptance checks. Each test writes one `[PASS]` or `[FAIL]` line to
//! stderr before asserting.

use erasure_qec::channel::{complement, sample, TrialSeed};
use erasure_qec::codes::{hgp, load, random_check_matrix, shipped_hgp, surface_code};
use erasure_qec::decoders::{classify, inactivation_decode};
use erasure_qec::dual_peeling::{dual_peel, stab_assisted_decode, DualConfig, Engine};
use erasure_qec::oracle::{fully_erased_dim, ml_decode_ge, predict};
use erasure_qec::sim::{rule2_rerun_discoveries, run_sweep, DecoderKind, SweepConfig, SweepRow};
use erasure_qec::surface_fast::{contract_known_edges, surface_ml_decode};
use erasure_qec::{CssCode, ErasureInstance, ErrorType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::Instant;

fn report(criterion: u32, pass: bool, detail: &str) {
    // written to the raw handle so the line shows up without --nocapture
    let status = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "[{status}] criterion {criterion}: {detail}"
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn sweep(
    code: &CssCode,
    decoders: &[DecoderKind],
    rates: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<SweepRow> {
    let config = SweepConfig {
        decoders: decoders.to_vec(),
        rates: rates.to_vec(),
        trials,
        seed,
        workers: workers(),
    };
    run_sweep(code, &config).unwrap()
}

fn row(rows: &[SweepRow], decoder: DecoderKind, p: f64) -> &SweepRow {
    rows.iter()
        .find(|r| r.decoder == decoder && r.p == p)
        .unwrap()
}

fn random_3x6_hgp() -> CssCode {
    hgp(
        &random_check_matrix(3, 6, 31),
        &random_check_matrix(3, 6, 32),
    )
    .unwrap()
}

#[test]
fn criterion_1_ml_equivalence() {
    let settings: Vec<(CssCode, f64)> = vec![
        (surface_code(3).unwrap(), 0.3),
        (surface_code(3).unwrap(), 0.4),
        (surface_code(5).unwrap(), 0.3),
        (surface_code(5).unwrap(), 0.4),
        (random_3x6_hgp(), 0.2),
        (random_3x6_hgp(), 0.3),
    ];
    let trials = 10_000u64;
    let mut mismatches = 0u64;
    let mut details = Vec::new();
    let mut all_within = true;
    for (i, (code, p)) in settings.iter().enumerate() {
        let (mut failures, mut expected, mut variance) = (0u64, 0.0f64, 0.0f64);
        for t in 0..trials {
            let inst = sample(code, *p, TrialSeed::new(100 + i as u64, t));
            let mut failed = false;
            let mut q_success = 1.0;
            for side in ErrorType::BOTH {
                let h = code.checks(side);
                let s = inst.syndrome(side);
                let ge = ml_decode_ge(h, &inst.erased, s);
                let inact = inactivation_decode(h, &inst.erased, s);
                mismatches += (ge.estimate != inact.estimate) as u64;
                let res = stab_assisted_decode(code, &inst, side, Engine::Inactivation);
                failed |=
                    classify(&res.estimate, inst.error(side), code, side, res.status).is_failure();
                q_success *= 1.0 - predict(code, &inst.erased, side).ml_failure_probability();
            }
            let q = 1.0 - q_success;
            failures += failed as u64;
            expected += q;
            variance += q * (1.0 - q);
        }
        let sigma = variance.sqrt();
        let within = (failures as f64 - expected).abs() <= 3.0 * sigma.max(1e-12);
        all_within &= within;
        details.push(format!(
            "{}@{p}: {failures} vs {expected:.1}±{sigma:.1}",
            code.name()
        ));
    }
    report(
        1,
        mismatches == 0 && all_within,
        &format!(
            "ge/inact mismatches={mismatches}; stab-inact vs oracle: {}",
            details.join("; ")
        ),
    );
}

#[test]
fn criterion_2_surface_fast_matches_inactivation() {
    let trials = 100_000u64;
    let mut ok = true;
    let mut details = Vec::new();
    for d in [3, 5, 13] {
        let code = surface_code(d).unwrap();
        let rates = [0.3, 0.4];
        let rows = sweep(
            &code,
            &[DecoderKind::Inact, DecoderKind::SurfaceFast],
            &rates,
            trials,
            200 + d as u64,
        );
        for p in rates {
            let a = row(&rows, DecoderKind::Inact, p).failure_rate;
            let b = row(&rows, DecoderKind::SurfaceFast, p).failure_rate;
            let sigma = ((a * (1.0 - a) + b * (1.0 - b)) / trials as f64).sqrt();
            let within = (a - b).abs() <= 3.0 * sigma || a == b;
            ok &= within;
            details.push(format!("d={d} p={p}: {a:.5} vs {b:.5}"));
        }
    }
    report(2, ok, &details.join("; "));
}

#[test]
fn criterion_3_rule1_basis_count() {
    let mut violations = 0;
    let mut checked = 0;
    for d in [3, 5, 7] {
        let code = surface_code(d).unwrap();
        for (pi, p) in [0.2, 0.5, 0.8].into_iter().enumerate() {
            for t in 0..1000 {
                let inst = sample(&code, p, TrialSeed::new(300 + (d * 10 + pi) as u64, t));
                let known = complement(&inst.erased, code.n());
                let oracle = fully_erased_dim(code.hx(), &known);
                let rule1 = dual_peel(code.hx(), &known, DualConfig::rule1_only())
                    .fixed_qubits
                    .len();
                let uf = contract_known_edges(&code, &inst.erased, ErrorType::X)
                    .unwrap()
                    .fully_erased_roots()
                    .len();
                violations += (rule1 != oracle || uf != oracle) as u32;
                checked += 1;
            }
        }
    }
    report(
        3,
        violations == 0,
        &format!("{violations} disagreements over {checked} patterns"),
    );
}

#[test]
fn criterion_4_rule2_reruns_find_nothing_new() {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let mut new_found = 0;
    for i in 0..1000u64 {
        let (m1, n1) = (rng.gen_range(2..=4), rng.gen_range(4..=7));
        let (m2, n2) = (rng.gen_range(2..=4), rng.gen_range(4..=7));
        let code = hgp(
            &random_check_matrix(m1, n1, 2 * i),
            &random_check_matrix(m2, n2, 2 * i + 1),
        )
        .unwrap();
        let p = rng.gen_range(0.1..0.8);
        let inst = sample(&code, p, TrialSeed::new(401, i));
        let side = if rng.gen::<bool>() {
            ErrorType::X
        } else {
            ErrorType::Z
        };
        let prefix = rng.gen_range(0..=inst.erased.len());
        new_found += rule2_rerun_discoveries(
            code.stabilizers(side),
            code.checks(side),
            &inst.erased,
            prefix,
        );
    }
    report(
        4,
        new_found == 0,
        &format!("{new_found} new fully erased stabilizers over 1000 triples"),
    );
}

#[test]
fn criterion_5_inactivation_reduction_surface_11() {
    let code = surface_code(11).unwrap();
    let rows = sweep(
        &code,
        &[DecoderKind::Inact, DecoderKind::StabInact],
        &[0.38],
        100_000,
        500,
    );
    let inact = row(&rows, DecoderKind::Inact, 0.38).mean_inactivations;
    let stab = row(&rows, DecoderKind::StabInact, 0.38).mean_inactivations;
    let reduction = 1.0 - stab / inact;
    let near = |x: f64, reference: f64| x / reference <= 3.0 && reference / x <= 3.0;
    report(
        5,
        stab < inact && reduction >= 0.9,
        &format!(
            "mean inactivations {inact:.4} -> {stab:.4} ({:.1}% reduction); reference 4.38 -> 0.038, within factor 3: {}",
            100.0 * reduction,
            near(inact, 4.376233) && near(stab, 0.03838)
        ),
    );
}

#[test]
fn criterion_6_surface_13_failure_rate() {
    let code = surface_code(13).unwrap();
    let rows = sweep(&code, &[DecoderKind::Inact], &[0.34], 300_000, 600);
    let rate = row(&rows, DecoderKind::Inact, 0.34).failure_rate;
    let reference = 2.1286666e-3;
    report(
        6,
        rate >= reference / 3.0 && rate <= reference * 3.0,
        &format!(
            "failure rate {rate:.3e} vs reference {reference:.3e}, band [{:.2e}, {:.2e}]",
            reference / 3.0,
            reference * 3.0
        ),
    );
}

#[test]
fn criterion_7_guess_reduction_on_hgp() {
    let code = shipped_hgp();
    let rates = [0.1, 0.2, 0.3, 0.4, 0.5];
    let rows = sweep(
        &code,
        &[DecoderKind::Inact, DecoderKind::StabInact],
        &rates,
        20_000,
        700,
    );
    let top = rates[rates.len() - 1];
    let inact = row(&rows, DecoderKind::Inact, top).mean_inactivations;
    let stab = row(&rows, DecoderKind::StabInact, top).mean_inactivations;
    let reduction = 1.0 - stab / inact;
    let ordered = rates.iter().all(|&p| {
        row(&rows, DecoderKind::StabInact, p).mean_inactivations
            <= row(&rows, DecoderKind::Inact, p).mean_inactivations
    });
    let mut detail = format!(
        "{} at p={top}: {inact:.3} -> {stab:.3} ({:.1}% reduction), ordered at every p: {ordered}",
        code.name(),
        100.0 * reduction
    );
    let mut pass = reduction >= 0.2 && ordered;

    match std::env::var_os("ERASURE_QEC_B1_BUNDLE") {
        Some(dir) => {
            let b1 = load(std::path::Path::new(&dir)).unwrap();
            let rows = sweep(
                &b1,
                &[DecoderKind::Inact, DecoderKind::StabInact],
                &[0.48],
                2000,
                701,
            );
            let a = row(&rows, DecoderKind::Inact, 0.48).mean_inactivations;
            let b = row(&rows, DecoderKind::StabInact, 0.48).mean_inactivations;
            pass &= 1.0 - b / a >= 0.2;
            detail += &format!(
                "; {} at p=0.48: {a:.2} -> {b:.2} (reference 31.32 -> 23.72)",
                b1.name()
            );
        }
        None => detail += "; B1 bundle not supplied (set ERASURE_QEC_B1_BUNDLE), B1 check skipped",
    }
    report(7, pass, &detail);
}

#[test]
fn criterion_8_near_linear_time() {
    let setup = |d: usize| {
        let code = surface_code(d).unwrap();
        let instances: Vec<ErasureInstance> = (0..1000)
            .map(|t| sample(&code, 0.4, TrialSeed::new(800, t)))
            .collect();
        (code, instances)
    };
    let time_batch = |(code, instances): &(CssCode, Vec<ErasureInstance>)| {
        let start = Instant::now();
        for inst in instances {
            for side in ErrorType::BOTH {
                std::hint::black_box(surface_ml_decode(code, inst, side).unwrap());
            }
        }
        start.elapsed().as_secs_f64() / instances.len() as f64
    };
    let (small, large) = (setup(32), setup(64));
    time_batch(&small);
    // interleaved rounds so a busy machine slows both sizes alike
    let mut rounds: Vec<(f64, f64)> = (0..5)
        .map(|_| (time_batch(&small), time_batch(&large)))
        .collect();
    rounds.sort_by(|a, b| (a.1 / a.0).total_cmp(&(b.1 / b.0)));
    let (t32, t64) = rounds[rounds.len() / 2];
    let ratio = t64 / t32;
    report(
        8,
        ratio <= 5.0,
        &format!(
            "median round: mean decode {:.1}us (d=32) vs {:.1}us (d=64), ratio {ratio:.2}",
            t32 * 1e6,
            t64 * 1e6
        ),
    );
}

#[test]
fn criterion_9_simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_erasure-qec"))
            .args([
                "simulate",
                "--code",
                "surface:5",
                "--decoders",
                "inact,stab-inact,surface-fast,hard",
                "--p",
                "0.2:0.5:0.1",
                "--trials",
                "2000",
                "--seed",
                "9",
                "--workers",
                workers,
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(&out)
            .unwrap()
            .lines()
            .map(|l| match l.rsplit_once(',') {
                Some((head, _)) if !l.starts_with('#') && !l.starts_with("code,") => {
                    head.to_string()
                }
                _ => l.to_string(),
            })
            .collect::<Vec<_>>()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "3");
    report(
        9,
        a == b && a == c && a.len() == 18,
        &format!(
            "{} CSV lines identical across reruns and worker counts: {}",
            a.len(),
            a == b && a == c
        ),
    );
}
