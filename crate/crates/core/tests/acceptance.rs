//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits with a failure status if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use orderfind::circuits::{
    experimental_oracle_sequences, qft_deviation, search_oracle_sequence, verify_oracle_sequence,
};
use orderfind::classical;
use orderfind::lp::LpScalar;
use orderfind::measurement::{
    analytic_distribution, exact_order_finding_guess, guess_success_per_r, optimal_guess_strategy,
    order_finding_distributions, simulated_distribution, Observables,
};
use orderfind::perm::{OracleSpec, Permutation};
use orderfind::prodops::{
    apply_prep, dense_prep_image, equilibrium_zsum, experimental_prep_sequences, schedule_prep,
    verify_prep_set, verify_prep_set_n, ZTermSum,
};
use orderfind::sim::{DensityKind, DensityOperator};
use orderfind::spectra::{net_area, readout_lines, MoleculeParams};
use orderfind::Execution;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn perm(s: &str) -> Permutation {
    s.parse().expect("valid permutation")
}

fn spec(p: &str, y: usize) -> OracleSpec {
    OracleSpec::new(perm(p), y).expect("valid instance")
}

fn exhaustive_sweep() -> Check {
    let mut worst = 0.0f64;
    for s in OracleSpec::all() {
        let d = simulated_distribution(&s);
        let ideal = analytic_distribution(s.order()).map_err(|e| e.to_string())?;
        let dev = d.max_abs_diff(&ideal);
        worst = worst.max(dev);
        ensure(
            dev <= 1e-10,
            format!("{} y={} deviates by {dev:e}", s.pi, s.y),
        )?;
    }
    Ok(format!("96 cases, largest deviation {worst:.1e}"))
}

fn anchor_observables() -> Check {
    let cases: [(&str, usize, &[f64]); 4] = [
        ("()", 0, &[1.0, 1.0, 1.0, 1.0, 1.0]),
        ("(0 1)(2 3)", 0, &[1.0, 1.0, 0.0, 1.0, 0.0]),
        ("(0 1 2 3)", 0, &[1.0, 0.0, 0.0, 0.0, 0.0]),
        ("(0 1 2)", 0, &[0.0, 0.25, 0.3125]),
    ];
    for (p, y, want) in cases {
        let o = Observables::of_state(&spec(p, y));
        for (i, w) in want.iter().enumerate() {
            let got = o.spin(i + 1);
            ensure(
                (got - w).abs() <= 1e-9,
                format!("{p} y={y}: O_{} = {got}, expected {w}", i + 1),
            )?;
        }
    }
    Ok("r = 1, 2, 4 on five spins and r = 3 on spins 1-3".into())
}

fn guess_value() -> Check {
    let dists = order_finding_distributions();
    let (g, value) = optimal_guess_strategy(&dists).map_err(|e| e.to_string())?;
    ensure(
        (0.545..=0.560).contains(&value),
        format!("value {value} outside [0.545, 0.560]"),
    )?;
    let success = guess_success_per_r(&g, &dists);
    ensure(
        success.iter().all(|s| *s >= value - 1e-6),
        format!("per-r success {success:?} below {value}"),
    )?;
    let exact = exact_order_finding_guess().map_err(|e| e.to_string())?;
    ensure(
        (exact.value.approx_f64() - value).abs() < 1e-12,
        "exact and rational solutions disagree",
    )?;
    Ok(format!("value {} = {value:.9}", exact.value))
}

fn preparation() -> Check {
    let seqs = experimental_prep_sequences();
    let report = verify_prep_set(&seqs).map_err(|e| e.to_string())?;
    ensure(
        report.total_terms == 45,
        format!("{} terms", report.total_terms),
    )?;
    ensure(
        report.is_effective_pure,
        format!("residual {}", report.residual),
    )?;
    ensure(
        report.summed.len() == 31 && report.summed.iter().all(|(_, c)| c == 1),
        format!("sum is {}", report.summed),
    )?;
    for s in &seqs {
        let symbolic = apply_prep(s, &equilibrium_zsum()).map_err(|e| e.to_string())?;
        let dense = dense_prep_image(s).map_err(|e| e.to_string())?;
        ensure(symbolic == dense, format!("dense mismatch for {s}"))?;
    }
    Ok(format!(
        "45 terms, effective pure, {} cancelled pairs, dense agreement",
        report.cancelled_pairs
    ))
}

fn scheduler() -> Check {
    let five = schedule_prep(5, 9, Execution::Parallel).map_err(|e| format!("n=5: {e}"))?;
    let r5 = verify_prep_set(&five).map_err(|e| e.to_string())?;
    ensure(r5.is_effective_pure, "n=5 schedule does not verify")?;
    let two = schedule_prep(2, 2, Execution::Parallel)
        .map_err(|e| format!("n=5 found {} experiments; n=2: {e}", five.len()))?;
    let r2 = verify_prep_set_n(2, &two).map_err(|e| e.to_string())?;
    ensure(
        two.len() == 2 && r2.is_effective_pure,
        "n=2 schedule does not verify",
    )?;
    Ok(format!(
        "n=2: 2 experiments, n=5: {} experiments",
        five.len()
    ))
}

fn classical_bounds() -> Check {
    let report = classical::classical_report(Execution::Parallel).map_err(|e| e.to_string())?;
    ensure(
        report.one_query_value_by_y.iter().all(|v| v == "1/2"),
        format!("one-query values {:?}", report.one_query_value_by_y),
    )?;
    ensure(
        report.dual_value_by_y.iter().all(|v| v == "1/2"),
        "dual disagrees",
    )?;
    ensure(
        report
            .cube_query_min_success_by_y
            .iter()
            .all(|v| v == "1/2"),
        "x=3 witness",
    )?;
    ensure(report.two_query_certain_cases == 96, "two-query table")?;
    ensure(
        report.single_query.strategies_certain == 0,
        "a single query succeeded",
    )?;
    Ok(format!(
        "value 1/2, {{2,3}} certain on 96/96, 0/{} single-query strategies certain",
        report.single_query.strategies_checked
    ))
}

fn qft() -> Check {
    let (a, b) = (qft_deviation(true), qft_deviation(false));
    ensure(
        a < 1e-12 && b < 1e-12,
        format!("deviations {a:e} and {b:e}"),
    )?;
    Ok(format!("deviations {a:.1e}, {b:.1e}"))
}

fn spectra_signatures() -> Check {
    let params = MoleculeParams::synthetic();
    let lines_of = |rho: &DensityOperator| readout_lines(rho, 1, &params).expect("spin 1");

    let mut prepared = ZTermSum::new(5);
    for s in experimental_prep_sequences() {
        let image = apply_prep(&s, &equilibrium_zsum()).map_err(|e| e.to_string())?;
        for (pattern, c) in image.iter() {
            prepared.add(pattern, c);
        }
    }
    let pure = DensityOperator::new(prepared.dense(), DensityKind::Deviation)
        .map_err(|e| e.to_string())?;
    let lines = lines_of(&pure);
    ensure(lines[0].amplitude.re > 0.0, "0000 line not positive")?;
    ensure(
        lines[1..].iter().all(|l| l.amplitude.norm() < 1e-9),
        "effective pure state has extra lines",
    )?;

    let final_rho = |p: &str, y: usize| orderfind::circuits::final_state(&spec(p, y)).density();
    let r2 = lines_of(&final_rho("(0 1)(2 3)", 0));
    let positive: Vec<String> = r2
        .iter()
        .filter(|l| l.amplitude.re > 1e-9)
        .map(|l| l.label.to_string())
        .collect();
    ensure(
        positive == ["0000", "0001", "0100", "0101"],
        format!("r=2 positive lines {positive:?}"),
    )?;
    ensure(
        r2.iter()
            .filter(|l| l.amplitude.re <= 1e-9)
            .all(|l| l.amplitude.norm() < 1e-9),
        "r=2 has nonzero non-positive lines",
    )?;

    let r4 = lines_of(&final_rho("(0 1 2 3)", 0));
    ensure(
        r4.iter().all(|l| l.amplitude.re >= -1e-9) && net_area(&r4) > 0.0,
        "r=4 lines not all positive",
    )?;

    let r3 = lines_of(&final_rho("(0 1 2)", 0));
    let area = net_area(&r3);
    ensure(area.abs() < 1e-9, format!("r=3 net area {area}"))?;
    Ok(format!(
        "pure 0000 only, r=2 four lines, r=4 all positive, r=3 net area {:.1e}",
        area.abs()
    ))
}

fn oracle_sequences() -> Check {
    let [_, (_, b), (_, c), (_, d)] = experimental_oracle_sequences();
    ensure(
        verify_oracle_sequence(&b, &perm("(0 1)(2 3)"), 0),
        "sequence b fails for (0 1)(2 3), y=0",
    )?;
    let d_hits = search_oracle_sequence(&d, Execution::Parallel);
    let four_cycle = d_hits
        .iter()
        .find(|s| s.pi.cycles().iter().any(|cyc| cyc.len() == 4))
        .ok_or("sequence d implements no 4-cycle")?;
    let c_hits = search_oracle_sequence(&c, Execution::Parallel);
    let order_three_y2 = c_hits.iter().any(|s| s.y == 2 && s.order() == 3);
    let fails_elsewhere = Permutation::all()
        .iter()
        .any(|p| (0..4).any(|y| y != 2 && !verify_oracle_sequence(&c, p, y)));
    ensure(
        order_three_y2 && fails_elsewhere,
        format!(
            "b ok, d ok for {} y={}; sequence c matches {} instances and none has order 3 with y=2",
            four_cycle.pi,
            four_cycle.y,
            c_hits.len()
        ),
    )?;
    Ok(format!(
        "b ok, d ok for {} y={}, c ok",
        four_cycle.pi, four_cycle.y
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exhaustive sweep", exhaustive_sweep),
        ("anchor observables", anchor_observables),
        ("guess strategy value", guess_value),
        ("preparation sequences", preparation),
        ("preparation scheduler", scheduler),
        ("classical bounds", classical_bounds),
        ("QFT", qft),
        ("spectra signatures", spectra_signatures),
        ("oracle sequences", oracle_sequences),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", k + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} ({name}): FAIL  {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
