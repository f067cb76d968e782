//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;

use rand::seq::SliceRandom;
use rand::Rng;
use tempreach::analysis::analyze;
use tempreach::cactus::{
    greedy_guarantee, greedy_union_lower_bound, max_cactus_cover, omega_h_lower_bound,
};
use tempreach::cdg::{cdg_upper_bound, crp_check};
use tempreach::fixtures;
use tempreach::oracle::{
    ezzine_haddad_report, omegabar_basis, oracle_gdim_clow, oracle_gdim_omega_h,
    oracle_gdim_omegabar, oracle_target_rank, reachable_subspace_basis, OracleParams, Schedule,
};
use tempreach::{
    augment_dedicated_inputs, sample_realization, stcp_embedding, Realization, SamplingConfig,
    StructuredPair, SwitchingPath, TargetSpec, TemporalNetwork,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example_one() -> Outcome {
    let net = fixtures::ex1();
    let p = OracleParams::default();
    let omega_h = oracle_gdim_omega_h(&net, &p)
        .map_err(|e| e.to_string())?
        .value;
    let upper = cdg_upper_bound(&net).bound;
    let lower = omega_h_lower_bound(&net);
    let omega_bar = oracle_gdim_omegabar(&net, &p)
        .map_err(|e| e.to_string())?
        .value;
    let got = (omega_h, upper, lower, omega_bar);
    ensure(got == (2, 2, 2, 3), || {
        format!("(oracle, CDG, cactus, omega_bar) = {got:?}")
    })?;
    Ok(format!(
        "oracle {omega_h}, CDG {upper}, cactus {lower}, omega_bar {omega_bar}"
    ))
}

fn ezzine_haddad_three() -> Outcome {
    let net = fixtures::eh3();
    for seed in 0..10 {
        let p = OracleParams::new(5, seed, 1e-8);
        let r = ezzine_haddad_report(&net, &p).map_err(|e| e.to_string())?;
        ensure(r.rank_c.per_trial.iter().all(|&v| v == 3), || {
            format!("seed {seed}: rank C per trial {:?}", r.rank_c.per_trial)
        })?;
        ensure(r.rank_c_low.per_trial.iter().all(|&v| v == 2), || {
            format!(
                "seed {seed}: rank C_low per trial {:?}",
                r.rank_c_low.per_trial
            )
        })?;
        ensure(r.differs && r.verdict.contains("N=3"), || {
            format!("seed {seed}: verdict {}", r.verdict)
        })?;
    }
    Ok("rank 3 vs 2 in all 50 trials over 10 seeds".into())
}

fn ezzine_haddad_two() -> Outcome {
    let mut rng = common::rng(2);
    let nets = 60;
    let mut trials = 0;
    for k in 0..nets {
        let n = rng.gen_range(1..=5);
        let density = rng.gen_range(0.2..0.6);
        let net = TemporalNetwork::random(&mut rng, n, 2, (0, 2), density);
        let p = OracleParams::new(5, k, 1e-8);
        let r = ezzine_haddad_report(&net, &p).map_err(|e| e.to_string())?;
        trials += p.trials;
        ensure(!r.differs, || {
            format!(
                "net {k}: rank C {:?} vs C_low {:?}",
                r.rank_c.per_trial, r.rank_c_low.per_trial
            )
        })?;
    }
    Ok(format!("{nets} nets, {trials} trials, all equal"))
}

fn sandwich() -> Outcome {
    let mut rng = common::rng(4);
    let nets = 120;
    for k in 0..nets {
        let n = rng.gen_range(1..=4);
        let big_n = rng.gen_range(1..=3);
        let density = rng.gen_range(0.2..0.6);
        let net = TemporalNetwork::random(&mut rng, n, big_n, (0, 2), density);
        let r =
            analyze(&net, &OracleParams::new(5, k, 1e-8), 8, false).map_err(|e| e.to_string())?;
        let v = r.sandwich_violations();
        ensure(v.is_empty(), || {
            format!("net {k} (n={n}, N={big_n}): {}", v.join("; "))
        })?;
    }
    Ok(format!("{nets} nets, zero violations"))
}

fn lemma_two() -> Outcome {
    let mut rng = common::rng(5);
    let pairs = 80;
    for k in 0..pairs {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(0..=2);
        let density = rng.gen_range(0.15..0.6);
        let pair = StructuredPair::random(&mut rng, n, m, density);
        let all: BTreeSet<usize> = (0..n).collect();
        let cover = max_cactus_cover(&pair, &all).size();
        let net = TemporalNetwork::new(n, vec![pair]).map_err(|e| e.to_string())?;
        let rank = oracle_gdim_clow(&net, &OracleParams::new(5, k, 1e-8))
            .map_err(|e| e.to_string())?
            .value;
        ensure(cover == rank, || {
            format!("pair {k}: cover {cover}, oracle rank {rank}")
        })?;
    }
    Ok(format!("{pairs} pairs, cover size = rank in all"))
}

fn greedy_guarantees() -> Outcome {
    let mut rng = common::rng(6);
    let nets = 200;
    let mut worst = f64::INFINITY;
    for k in 0..nets {
        let n = rng.gen_range(1..=5);
        let big_n = rng.gen_range(2..=3);
        let density = rng.gen_range(0.15..0.5);
        let net = TemporalNetwork::random(&mut rng, n, big_n, (0, 2), density);
        let greedy = greedy_union_lower_bound(&net);
        let opt = common::brute_union_optimum(&net);
        let first = greedy.steps[0].covered.len();
        let g = greedy_guarantee(big_n, opt, first).map_err(|e| e.to_string())?;
        let got = greedy.bound as f64;
        ensure(greedy.bound <= opt, || {
            format!("net {k}: greedy {} above optimum {opt}", greedy.bound)
        })?;
        ensure(got + 1e-9 >= g.ratio_bound, || {
            format!("net {k}: greedy {got} below ratio bound {}", g.ratio_bound)
        })?;
        ensure(got + 1e-9 >= g.best(), || {
            format!("net {k}: greedy {got} below max f(t) {}", g.best())
        })?;
        ensure(2 * greedy.bound >= opt, || {
            format!("net {k}: greedy {got} below half of {opt}")
        })?;
        if opt > 0 {
            worst = worst.min(got / opt as f64);
        }
    }
    Ok(format!("{nets} nets, worst greedy/opt ratio {worst:.3}"))
}

fn switched_example() -> Outcome {
    let net = fixtures::sw();
    let short = crp_check(&net, &SwitchingPath::from_one_based(&[1, 2]).unwrap())
        .map_err(|e| e.to_string())?;
    let long = crp_check(&net, &SwitchingPath::from_one_based(&[1, 2, 1]).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(!short.passes && short.linking == 2, || {
        format!("(1,2): {short:?}")
    })?;
    ensure(long.passes && long.linking == 3, || {
        format!("(1,2,1): {long:?}")
    })?;

    let h2 = 0.8;
    let r = Realization::constant(&net, 1.0, &[1.0, h2]).map_err(|e| e.to_string())?;
    let path = SwitchingPath::from_one_based(&[1, 2]).unwrap();
    let q = reachable_subspace_basis(&r, &Schedule::along(&path, &[1.0, h2]).unwrap(), 1e-8)
        .map_err(|e| e.to_string())?;
    let proj = &q * q.transpose();
    let spans = [[1.0, 0.0, 0.0], [0.0, 1.0, h2]].iter().all(|v| {
        let v = nalgebra::DVector::from_row_slice(v);
        (&proj * &v - &v).norm() < 1e-10
    });
    ensure(q.ncols() == 2 && spans, || {
        format!("(1,2): rank {}, spans e1 and (0,1,h2): {spans}", q.ncols())
    })?;
    let path = SwitchingPath::from_one_based(&[1, 2, 1]).unwrap();
    let q = reachable_subspace_basis(&r, &Schedule::along(&path, &[1.0, h2, 1.0]).unwrap(), 1e-8)
        .map_err(|e| e.to_string())?;
    ensure(q.ncols() == 3, || format!("(1,2,1): rank {}", q.ncols()))?;
    Ok("(1,2): linking 2, rank 2; (1,2,1): linking 3, rank 3".into())
}

fn embedding_identity() -> Outcome {
    let mut rng = common::rng(8);
    let cases = 40;
    for k in 0..cases {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=2);
        let density = rng.gen_range(0.15..0.6);
        let pair = StructuredPair::random(&mut rng, n, m, density);
        let size = rng.gen_range(1..n);
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(&mut rng);
        let target =
            TargetSpec::new(n, nodes[..size].iter().copied()).map_err(|e| e.to_string())?;
        let big_n = rng.gen_range(2..=n - size + 1);
        let net = stcp_embedding(&pair, &target, big_n).map_err(|e| e.to_string())?;
        let p = OracleParams::new(5, k, 1e-8);
        let lhs = oracle_gdim_omega_h(&net, &p)
            .map_err(|e| e.to_string())?
            .value;
        let target_rank = oracle_target_rank(&pair, &target, &p)
            .map_err(|e| e.to_string())?
            .value;
        ensure(lhs == n - size + target_rank, || {
            format!("case {k}: gdim {lhs} vs {} + {target_rank}", n - size)
        })?;
    }
    Ok(format!("{cases} embeddings, identity exact"))
}

fn dedicated_invariance() -> Outcome {
    let mut rng = common::rng(9);
    let nets = 40;
    for k in 0..nets {
        let n = rng.gen_range(1..=5);
        let big_n = rng.gen_range(1..=3);
        let density = rng.gen_range(0.15..0.5);
        let pairs = (0..big_n)
            .map(|_| {
                let m = rng.gen_range(0..=2);
                common::dedicated_pair(&mut rng, n, m, density)
            })
            .collect();
        let net = TemporalNetwork::new(n, pairs).map_err(|e| e.to_string())?;
        let aug = augment_dedicated_inputs(&net).map_err(|e| e.to_string())?;
        let p = OracleParams::new(5, k, 1e-8);
        let before = oracle_gdim_omegabar(&net, &p)
            .map_err(|e| e.to_string())?
            .value;
        let after = oracle_gdim_omegabar(&aug, &p)
            .map_err(|e| e.to_string())?
            .value;
        ensure(before == after, || {
            format!("net {k}: {before} before, {after} after")
        })?;
    }
    Ok(format!("{nets} nets, unchanged"))
}

fn compression_equivalence() -> Outcome {
    let cfg = SamplingConfig::default();
    let check = |net: &TemporalNetwork, seed: u64| -> Result<(), String> {
        let r = sample_realization(net, seed, &cfg).map_err(|e| e.to_string())?;
        let compressed = omegabar_basis(&r, 1e-8).ncols();
        let explicit = common::explicit_omegabar_rank(&r, 1e-8);
        ensure(compressed == explicit, || {
            format!("{net:?} seed {seed}: compressed {compressed}, explicit {explicit}")
        })
    };
    let mut count = 0u64;
    for n in 1..=2 {
        let pairs = common::all_pairs(n, 1);
        for p in &pairs {
            check(&TemporalNetwork::new(n, vec![p.clone()]).unwrap(), count)?;
            count += 1;
            for q in &pairs {
                check(
                    &TemporalNetwork::new(n, vec![p.clone(), q.clone()]).unwrap(),
                    count,
                )?;
                count += 1;
            }
        }
    }
    let exhaustive = count;
    let mut rng = common::rng(10);
    for _ in 0..400 {
        let big_n = rng.gen_range(1..=2);
        let density = rng.gen_range(0.15..0.6);
        let net = TemporalNetwork::random(&mut rng, 3, big_n, (0, 2), density);
        check(&net, count)?;
        count += 1;
    }
    Ok(format!(
        "{exhaustive} exhaustive nets (n ≤ 2) and {} random nets (n = 3)",
        count - exhaustive
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("example network brackets", example_one),
        ("N=3 rank discrepancy", ezzine_haddad_three),
        ("N=2 rank agreement", ezzine_haddad_two),
        ("sandwich property", sandwich),
        ("cactus cover exactness", lemma_two),
        ("greedy guarantees", greedy_guarantees),
        ("switched example", switched_example),
        ("target embedding identity", embedding_identity),
        ("dedicated input invariance", dedicated_invariance),
        ("compression equivalence", compression_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
