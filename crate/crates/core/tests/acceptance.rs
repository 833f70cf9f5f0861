//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use entangle_core::cmparams::{fundamental_discriminants, is_even_discriminant, validate_order};
use entangle_core::entangle::{
    build_det_lift, check_diagram_commutes, degree_report, kernel_parametrized, n0_search,
    reduction_kernel, NormalizerSpec, Tower,
};
use entangle_core::matgroup::{cartan_enumerate, CartanParams, FiniteGroup, Mat2};
use entangle_core::{Error, Tower64};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn raw_tower(
    delta: i64,
    phi: i64,
    p: u64,
    n_min: u32,
    n_max: u32,
    budget: usize,
) -> Result<Tower, String> {
    Tower64::full_normalizer(p, NormalizerSpec::Raw { delta, phi }, n_min, n_max, budget).map_err(e)
}

const BUDGET: usize = 1 << 24;

fn even_orders_kernel_in_sl2() -> Outcome {
    let mut checked = 0;
    for d in fundamental_discriminants(-20, -3) {
        for f in 1..=3 {
            let order = validate_order(d, f).map_err(e)?;
            if !is_even_discriminant(&order) {
                continue;
            }
            let tower = Tower64::full_normalizer(2, NormalizerSpec::Order(order), 2, 7, BUDGET)
                .map_err(e)?;
            for n in 2..=6 {
                let k = reduction_kernel(&tower, n).map_err(e)?;
                ensure(k.in_sl2, || {
                    format!("Δ_K={d}, f={f}, n={n}: kernel leaves SL2 ({:?})", k.witness)
                })?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no even orders in range".into())
}

fn level_one_failure() -> Outcome {
    let tower = raw_tower(-4, 0, 2, 1, 2, BUDGET)?;
    let k = reduction_kernel(&tower, 1).map_err(e)?;
    let witness = Mat2::from_i64([3, 0, 0, 1], 4).map_err(e)?;
    ensure(k.kernel_elements.len() == 8, || {
        format!("kernel size {}", k.kernel_elements.len())
    })?;
    ensure(k.kernel_elements.contains(&witness), || {
        "(3,0;0,1) missing".into()
    })?;
    ensure(witness.det().value() == 3, || {
        "det of witness is not 3".into()
    })?;
    let w = k.witness.ok_or("no witness reported")?;
    ensure(w.element == witness && w.det.value() == 3, || {
        format!("reported witness {:?}", w.element)
    })
}

fn lift_well_defined_delta_minus_four() -> Outcome {
    let tower = raw_tower(-4, 0, 2, 2, 7, BUDGET)?;
    for n in 2..=6 {
        let lift = build_det_lift(&tower, n).map_err(e)?;
        ensure(lift.well_defined, || format!("n={n}: not well defined"))?;
        ensure(lift.surjective, || format!("n={n}: not surjective"))?;
        let diagram = check_diagram_commutes(&tower, n, &lift).map_err(e)?;
        ensure(diagram.commutes, || {
            format!("n={n}: diagram fails at {:?}", diagram.counterexample)
        })?;
    }
    Ok(())
}

fn odd_discriminant_necessity() -> Outcome {
    let order = validate_order(-7, 1).map_err(e)?;
    let tower =
        Tower64::full_normalizer(2, NormalizerSpec::Order(order), 1, 7, BUDGET).map_err(e)?;
    let params = NormalizerSpec::Order(order)
        .params_at::<u64>(8)
        .map_err(e)?;
    ensure(
        params.phi().value() == 1 && params.delta().value() == 6,
        || {
            format!(
                "(φ, δ) mod 8 = ({}, {})",
                params.phi().value(),
                params.delta().value()
            )
        },
    )?;
    let lift = build_det_lift(&tower, 2).map_err(e)?;
    ensure(!lift.well_defined, || "lift at n=2 is well defined".into())?;
    let conflict = lift.failure_witness.ok_or("no conflicting pair")?;
    ensure(conflict.element.is_identity(), || {
        format!("conflict at {:?}, not I", conflict.element)
    })?;
    let dets: BTreeSet<u64> = [conflict.first.det.value(), conflict.second.det.value()].into();
    ensure(dets == BTreeSet::from([1, 5]), || {
        format!("pair dets {dets:?}")
    })?;
    let fiber_dets: BTreeSet<u64> = reduction_kernel(&tower, 2)
        .map_err(e)?
        .kernel_elements
        .iter()
        .map(|g| g.det().value())
        .collect();
    ensure(fiber_dets == BTreeSet::from([1, 5]), || {
        format!("dets over preimages of I: {fiber_dets:?}")
    })?;
    let search = n0_search(&tower, 6).map_err(e)?;
    ensure(search.n0.is_none(), || format!("n0 = {:?}", search.n0))
}

fn odd_prime_has_no_n0() -> Outcome {
    let tower = raw_tower(2, 0, 5, 1, 5, 1 << 25)?;
    let k = reduction_kernel(&tower, 1).map_err(e)?;
    let w = k.witness.ok_or("no witness at n=1")?;
    let expected = Mat2::from_i64([6, 0, 0, 6], 25).map_err(e)?;
    ensure(w.element == expected && w.det.value() == 11, || {
        format!("witness {:?} det {}", w.element, w.det.value())
    })?;
    let search = n0_search(&tower, 4).map_err(e)?;
    ensure(search.n0.is_none(), || format!("n0 = {:?}", search.n0))
}

fn parametrized_kernel_matches_brute_force() -> Outcome {
    let mut cases = 0;
    for p in [2u64, 3, 5] {
        for delta in 0..8 {
            for phi in 0..8 {
                let tower = raw_tower(delta, phi, p, 1, 4, BUDGET)?;
                for n in 1..=3 {
                    let brute = reduction_kernel(&tower, n).map_err(e)?.kernel_elements;
                    let params = NormalizerSpec::Raw { delta, phi }
                        .params_at::<u64>(tower.modulus(n + 1).map_err(e)?)
                        .map_err(e)?;
                    let formula = kernel_parametrized(&params, p, n).map_err(e)?;
                    ensure(brute == formula, || {
                        format!(
                            "δ={delta}, φ={phi}, p={p}, n={n}: sizes {} vs {}",
                            brute.len(),
                            formula.len()
                        )
                    })?;
                    cases += 1;
                }
            }
        }
    }
    ensure(cases == 3 * 64 * 3, || format!("{cases} cases"))
}

fn index_bookkeeping() -> Outcome {
    let tower = raw_tower(-4, 0, 2, 2, 6, BUDGET)?;
    for n in 2..=5 {
        let lift = build_det_lift(&tower, n).map_err(e)?;
        let report = degree_report(&tower, n, &lift).map_err(e)?;
        let group = tower.level(n).map_err(e)?.order();
        ensure(report.kernel_size * report.image_size == group, || {
            format!(
                "n={n}: {} * {} != {group}",
                report.kernel_size, report.image_size
            )
        })?;
        ensure(report.image_size == 1 << n, || {
            format!("n={n}: image size {}", report.image_size)
        })?;
    }
    Ok(())
}

fn cartan_order_formula() -> Outcome {
    for delta in 0..8 {
        for n in 1..=5u32 {
            let m = 1u64 << n;
            let params = CartanParams::<u64>::from_i64(delta, 0, m).map_err(e)?;
            let size = cartan_enumerate(&params).order();
            ensure(size == 1 << (2 * n - 1), || {
                format!("δ={delta}, n={n}: |C| = {size}")
            })?;
        }
    }
    Ok(())
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "even orders, p=2, n in [2,6]: reduction kernel inside SL2",
            limit: Some(Duration::from_secs(10)),
            run: even_orders_kernel_in_sl2,
        },
        Criterion {
            id: 2,
            name: "delta=-4, n=1: kernel of size 8 with witness (3,0;0,1), det 3",
            limit: None,
            run: level_one_failure,
        },
        Criterion {
            id: 3,
            name: "delta=-4, n in [2,6]: lift well defined, surjective, diagram commutes",
            limit: Some(Duration::from_secs(30)),
            run: lift_well_defined_delta_minus_four,
        },
        Criterion {
            id: 4,
            name: "disc -7: lift at n=2 ill defined with dets {1,5}, no n0 up to 6",
            limit: None,
            run: odd_discriminant_necessity,
        },
        Criterion {
            id: 5,
            name: "delta=2, p=5: no n0 up to 4, witness (6,0;0,6) det 11 at n=1",
            limit: None,
            run: odd_prime_has_no_n0,
        },
        Criterion {
            id: 6,
            name: "parametrized kernel equals brute force (576 cases)",
            limit: None,
            run: parametrized_kernel_matches_brute_force,
        },
        Criterion {
            id: 7,
            name: "delta=-4, n in [2,5]: |ker| * |image| = |N(2^n)|, |image| = 2^n",
            limit: None,
            run: index_bookkeeping,
        },
        Criterion {
            id: 8,
            name: "|C(2^n)| = 2^(2n-1) for delta in 0..8, n in [1,5]",
            limit: None,
            run: cartan_order_formula,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(()) => println!("PASS  criterion {}  {}  ({elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL  criterion {}  {}  ({elapsed:.2?}): {why}",
                    c.id, c.name
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
