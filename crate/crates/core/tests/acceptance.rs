//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use cmab_core::analysis::{
    classical_bound, classical_gaps, clustered_bound, compute_cluster_profile, compute_gap_profile, theorem1_bound,
    theorem2_bound,
};
use cmab_core::arm_model::{Environment, ExpectationVector};
use cmab_core::environments::{Instance, SpreadMode};
use cmab_core::harness::{evaluate_bound, prepare, run_all, simulate, ExperimentConfig, Prepared};
use cmab_core::oracles::{ExactOracle, GreedyPmcOracle, Oracle};
use cmab_core::policies::{nice_run_check, ClusterScheme, Cucb, Policy};
use common::*;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn prep(toml: &str) -> Prepared {
    prepare(&ExperimentConfig::from_toml(toml).expect("config")).expect("prepare")
}

fn mean_final(prep: &Prepared) -> f64 {
    let runs = run_all(prep, None).expect("runs");
    runs.iter().map(|r| r.final_cumulative_regret).sum::<f64>() / runs.len() as f64
}

const CLASSICAL: &str = r#"
horizon = 100000
repetitions = 20
seed = 2024
instance.kind = "classical"
instance.means = [0.1, 0.3, 0.5, 0.7, 0.9]
"#;

const PMC: &str = r#"
horizon = 100000
repetitions = 20
seed = 7
instance.kind = "pmc"
instance.left = 5
instance.right = 6
instance.budget = 2
instance.generate.seed = 11
instance.generate.density = 0.5
instance.generate.p_low = 0.1
instance.generate.p_high = 0.9
oracle.kind = "greedy_pmc"
"#;

/// Mean cumulative regret at each of `marks` over all repetitions.
fn regret_at_marks(prep: &Prepared, marks: &[u64]) -> Vec<f64> {
    let reps = prep.config.repetitions;
    let mut totals = vec![0.0; marks.len()];
    for run in 0..reps {
        simulate(prep, run, |rec| {
            if let Some(i) = marks.iter().position(|&m| m == rec.t) {
                totals[i] += rec.cumulative_regret;
            }
            Ok(())
        })
        .expect("simulate");
    }
    totals.iter().map(|t| t / reps as f64).collect()
}

fn a1_a2() -> (Outcome, Outcome) {
    let p = prep(CLASSICAL);
    let marks = [1_000, 10_000, 100_000];
    let means = regret_at_marks(&p, &marks);
    let profile = p.profile.as_ref().unwrap();
    let bound = classical_bound(&classical_gaps(profile), 1e5).unwrap().value;
    let a1 = check(
        means[2] <= bound,
        format!("mean regret {:.2} <= classical bound {:.2}", means[2], bound),
    );
    let ratios: Vec<f64> = marks.iter().zip(&means).map(|(&n, r)| r / (n as f64).ln()).collect();
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let a2 = check(
        lo > 0.0 && hi / lo < 2.0,
        format!(
            "regret/ln n = {:.3}, {:.3}, {:.3}; max/min {:.3} < 2",
            ratios[0],
            ratios[1],
            ratios[2],
            hi / lo
        ),
    );
    (a1, a2)
}

fn a3() -> Outcome {
    let two = prep(&format!("{CLASSICAL}policy.kind = \"ucb1_improved\"\npolicy.c = 2.0\n"));
    let regret = mean_final(&two);
    let b2 = evaluate_bound(&two, "ucb1_improved", 1e5).unwrap();
    let lead = b2.term("arm");
    let gaps = classical_gaps(two.profile.as_ref().unwrap());
    let six: f64 = gaps.iter().filter(|&&d| d > 0.0).map(|d| 6.0 * 1e5f64.ln() / d).sum();
    let one_one = prep(&format!("{CLASSICAL}policy.kind = \"ucb1_improved\"\npolicy.c = 1.1\n"));
    let b11 = evaluate_bound(&one_one, "ucb1_improved", 1e5).unwrap();
    check(
        regret <= b2.value && (lead - six).abs() <= 1e-9 * six && b11.value < b2.value,
        format!(
            "c=2 regret {:.2} <= bound {:.2} (leading coefficient 6); c=1.1 bound {:.2} < {:.2}",
            regret, b2.value, b11.value, b2.value
        ),
    )
}

fn a4(pmc_prep: &Prepared) -> Outcome {
    let inst = &pmc_prep.instance;
    let Instance::Pmc(pmc) = inst else { unreachable!() };
    let ratio = 1.0 - (-1.0f64).exp();
    let mut r = rng(404);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let means = uniform_means(pmc.edges().len(), &mut r);
        let opt_arm = ExactOracle.select(inst, &means, &mut r).unwrap().super_arm;
        let opt = pmc.expected_reward(&means, &opt_arm).unwrap();
        let g = GreedyPmcOracle.select(inst, &means, &mut r).unwrap().super_arm;
        let got = pmc.expected_reward(&means, &g).unwrap();
        if got < ratio * opt - 1e-12 {
            violations += 1;
        }
        if opt > 0.0 {
            worst = worst.min(got / opt);
        }
    }
    check(
        violations == 0,
        format!("{violations} violations on 1000 vectors (worst ratio {worst:.4} vs {ratio:.4})"),
    )
}

fn a5(pmc_prep: &Prepared) -> Outcome {
    let regret = mean_final(pmc_prep);
    let bound = evaluate_bound(pmc_prep, "pmc", 1e5).unwrap().value;
    let bad = pmc_prep.profile.as_ref().unwrap().bad_set().len();
    let exact = prep(&PMC.replace("oracle.kind = \"greedy_pmc\"", "oracle.kind = \"exact\""));
    let exact_regret = mean_final(&exact);
    let exact_bound = evaluate_bound(&exact, "pmc", 1e5).unwrap().value;
    let exact_bad = exact.profile.as_ref().unwrap().bad_set().len();
    check(
        regret <= bound && exact_regret <= exact_bound,
        format!(
            "greedy (1-1/e, 1)-regret {regret:.2} <= pmc bound {bound:.2} ({bad} bad super arms); \
             exact (1, 1)-regret {exact_regret:.2} <= pmc bound {exact_bound:.2} ({exact_bad} bad super arms)"
        ),
    )
}

fn a6() -> Outcome {
    let mut worst_z: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut ok = true;
    for i in 0..20u64 {
        let ic = ic(6000 + i, 6, 10, 1);
        let mu = ic.true_means();
        let out_degree = |u: usize| ic.edges().iter().filter(|e| e.source == u).count();
        let seed = (0..6).max_by_key(|&u| (out_degree(u), std::cmp::Reverse(u))).unwrap();
        let exact = ic.spread(mu, &[seed], SpreadMode::Exact, &mut rng(i)).unwrap().mean;
        let mc = ic
            .spread(
                mu,
                &[seed],
                SpreadMode::MonteCarlo { samples: 1_000_000 },
                &mut rng(7000 + i),
            )
            .unwrap();
        let z = (exact - mc.mean).abs() / mc.std_error.max(1e-300);
        worst_z = worst_z.max(z);
        ok &= (exact - mc.mean).abs() <= 3.0 * mc.std_error;

        let pairs = edge_pairs(&ic);
        for s in ic.space().explicit().unwrap() {
            let (_, active) = brute_force_ic(6, &pairs, mu.values(), s.nodes().unwrap());
            let ts = ic.trigger_probabilities(mu, s).unwrap();
            for (e, &(u, _)) in pairs.iter().enumerate() {
                let d = (ts.probability(e) - active[u]).abs();
                worst_p = worst_p.max(d);
                ok &= d <= 1e-12;
            }
        }
    }
    check(
        ok,
        format!("exact vs MC(1e6): max |z| {worst_z:.2} <= 3; trigger probabilities max error {worst_p:.1e} <= 1e-12"),
    )
}

fn a7() -> Outcome {
    let mut r = rng(77);
    let mut violations = 0;
    let mut tightest: f64 = 0.0;
    for i in 0..100u64 {
        let ic = ic(7700 + i, 6, 10, r.random_range(1..=2));
        let m = ic.num_arms();
        let mu = uniform_means(m, &mut r);
        let list = ic.space().explicit().unwrap();
        let s = &list[r.random_range(0..list.len())];
        let lambda = r.random_range(0.0..0.2);
        let trig: Vec<usize> = ic.triggering_set(&mu, s).unwrap().arms().collect();
        let mut other = mu.values().to_vec();
        for &e in &trig {
            other[e] = (other[e] + r.random_range(-lambda..=lambda)).clamp(0.0, 1.0);
        }
        let other = ExpectationVector::new(other).unwrap();
        let diff = (ic.expected_reward(&mu, s).unwrap() - ic.expected_reward(&other, s).unwrap()).abs();
        let limit = (m * ic.num_nodes()) as f64 * lambda;
        if diff > limit + 1e-12 {
            violations += 1;
        }
        if limit > 0.0 {
            tightest = tightest.max(diff / limit);
        }
    }
    check(
        violations == 0,
        format!("{violations} violations on 100 tuples (largest |dr| / (|E||V|L) = {tightest:.4})"),
    )
}

fn a8() -> Outcome {
    let means = [0.1, 0.3, 0.5, 0.7, 0.9];
    let inst: Instance = cmab_core::environments::ClassicalMab::new(means.to_vec()).into();
    let t = 100u64;
    let runs = 200;
    let mut failures = 0;
    for run in 0..runs {
        let mut cucb = Cucb::new(means.len());
        let mut r = rng(8000 + run);
        for _ in 1..t {
            let choice = cucb.select(&inst, &ExactOracle, &mut r).unwrap();
            let fb = inst.play(&choice.super_arm, cucb.round(), &mut r).unwrap();
            cucb.update(&fb).unwrap();
        }
        if !nice_run_check(cucb.estimates(), t, &means).nice {
            failures += 1;
        }
    }
    let p = 2.0 * means.len() as f64 / (t * t) as f64;
    let limit = p + 3.0 * (p * (1.0 - p) / runs as f64).sqrt();
    let frac = failures as f64 / runs as f64;
    check(
        frac <= limit,
        format!("non-nice fraction {frac:.4} ({failures}/{runs}) <= 2m/t^2 + 3 sigma = {limit:.4}"),
    )
}

fn a9() -> Outcome {
    let p = prep(&format!(
        "{CLASSICAL}oracle.kind = \"exact\"\noracle.beta_override = 0.8\noracle.failure_mode = \"worst\"\n"
    ));
    let runs = run_all(&p, None).unwrap();
    let regret = runs.iter().map(|r| r.final_cumulative_regret).sum::<f64>() / runs.len() as f64;
    let failures = runs.iter().map(|r| r.oracle_failures).sum::<u64>() as f64 / (runs.len() as f64 * 1e5);
    let bound = evaluate_bound(&p, "theorem1", 1e5).unwrap().value;
    check(
        regret <= bound && (p.descriptor.beta - 0.8).abs() < 1e-15,
        format!("(1, 0.8)-regret {regret:.2} <= theorem1 {bound:.2}; failure rate {failures:.4}"),
    )
}

fn a10() -> Outcome {
    let p = prep(
        "horizon = 100000\nrepetitions = 20\nseed = 10\ninstance.kind = \"classical\"\n\
         instance.means = [0.5, 0.7]\npolicy.kind = \"eps_greedy\"\npolicy.c = 2.0\n",
    );
    let regret = mean_final(&p);
    let report = evaluate_bound(&p, "epsgreedy", 1e5).unwrap();
    let dmin = p.profile.as_ref().unwrap().delta_min;
    check(
        regret <= report.value && (dmin - 0.2).abs() < 1e-12,
        format!(
            "gamma {:.1}: regret {regret:.2} <= bound {:.4e}",
            p.gamma.unwrap(),
            report.value
        ),
    )
}

fn a11() -> Outcome {
    let mut ok = true;
    let mut max_ratio: f64 = 0.0;
    let mut strict = 0;
    for seed in 0..20 {
        let pmc = pmc(1100 + seed, 5, 6, 0.5, 2);
        let g = compute_gap_profile(&pmc, pmc.true_means(), 1.0).unwrap();
        let scheme = ClusterScheme::per_left_node(&pmc).unwrap();
        let cp = compute_cluster_profile(&g, &scheme).unwrap();
        let f = pmc.smoothness();
        let c = clustered_bound(&cp, &f, 1e5).unwrap().value;
        let t = theorem1_bound(&g, &f, 1e5).unwrap().value;
        ok &= c <= t;
        if c < t {
            strict += 1;
        }
        max_ratio = max_ratio.max(c / t);
    }
    check(
        ok,
        format!("clustered <= theorem1 on 20 instances ({strict} strict; max ratio {max_ratio:.4})"),
    )
}

fn a12() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m, n, gamma) in [(5usize, 1e5, 1.0), (12, 1e6, 3.0), (30, 2.5e4, 0.25)] {
        let lead = theorem2_bound(m, n, gamma, 1.0, 1.0, &[], 1.0).unwrap().term("leading");
        let hand = 2.0 * gamma * (6.0 * m as f64 * n * n.ln()).sqrt();
        worst = worst.max((lead - hand).abs() / hand);
    }
    check(worst <= 1e-9, format!("max relative error {worst:.2e} <= 1e-9"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(&str, &str, Outcome)> = Vec::new();
    let (a1, a2) = a1_a2();
    results.push(("A1", "classical CUCB regret below classical bound", a1));
    results.push(("A2", "classical CUCB regret grows logarithmically", a2));
    results.push(("A3", "UCB1-improved regret below its bound", a3()));
    let pmc_prep = prep(PMC);
    results.push(("A4", "greedy PMC oracle meets 1-1/e", a4(&pmc_prep)));
    results.push(("A5", "PMC CUCB regret below coverage bound", a5(&pmc_prep)));
    results.push(("A6", "IC exact reward and trigger probabilities", a6()));
    results.push(("A7", "IC bounded smoothness", a7()));
    results.push(("A8", "nice-run failure frequency", a8()));
    results.push(("A9", "beta-failure regret below theorem1", a9()));
    results.push(("A10", "eps-greedy regret below its bound", a10()));
    results.push(("A11", "clustered bound below theorem1", a11()));
    results.push(("A12", "theorem2 leading term", a12()));
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(d) => println!("PASS [{id}] {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL [{id}] {name}: {d}");
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
