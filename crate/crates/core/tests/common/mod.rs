//! Independent oracles and property runners shared by the integration
//! suites. Nothing here calls into the code it is checking except through
//! the public API under test.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use vdw::bounds::{self, ap_lower_bound_n, check_square_condition, decompose_log};
use vdw::cnf::{cnf_export, decode_assignment, encode_coloring, Cnf, InstanceMeta};
use vdw::search::{feasibility, Feasibility};
use vdw::{expand, floor_log, localize, verify, Budget, Coloring};

pub const CASES: u32 = 1000;

/// The seven exact values with `(r, k, W)`.
pub const KNOWN: [(u64, u64, u64); 7] = [
    (2, 3, 9),
    (2, 4, 35),
    (2, 5, 178),
    (2, 6, 1132),
    (3, 3, 27),
    (3, 4, 293),
    (4, 3, 76),
];

// ---------------------------------------------------------------- logs

const FRAC_BITS: u32 = 256;

/// `log2(value)` to about 60 bits by repeated squaring of the mantissa in
/// 256-bit fixed point.
pub fn log2_fixed(value: &BigUint) -> f64 {
    assert!(value >= &BigUint::one());
    let n = value.bits() - 1;
    let one = BigUint::one() << FRAC_BITS;
    let two = &one << 1u32;
    let mut m = if n as u32 <= FRAC_BITS {
        value << (FRAC_BITS - n as u32)
    } else {
        value >> (n as u32 - FRAC_BITS)
    };
    let mut frac = 0f64;
    let mut weight = 0.5f64;
    for _ in 0..62 {
        m = (&m * &m) >> FRAC_BITS;
        if m >= two {
            frac += weight;
            m >>= 1u32;
        }
        weight /= 2.0;
    }
    n as f64 + frac
}

pub fn log_fixed(value: u64, base: u64) -> f64 {
    log2_fixed(&BigUint::from(value)) / log2_fixed(&BigUint::from(base))
}

// ---------------------------------------------------------- brute force

/// Whether some 2-coloring of `[1, n]` avoids monochromatic 3-term APs,
/// by enumerating all `2^n` colorings.
pub fn brute_force_two_three(n: u32) -> bool {
    (0u32..1 << n).any(|mask| {
        let color = |i: u32| (mask >> i) & 1;
        !(0..n).any(|a| (1..n).any(|d| a + 2 * d < n && color(a) == color(a + d) && color(a) == color(a + 2 * d)))
    })
}

// ----------------------------------------------------------------- DPLL

/// Plain DPLL with unit propagation; adequate for a few dozen variables.
pub fn dpll_satisfiable(cnf: &Cnf) -> bool {
    let mut assignment = vec![0i8; cnf.num_vars as usize + 1];
    dpll(&cnf.clauses, &mut assignment)
}

fn lit_value(assignment: &[i8], lit: i64) -> i8 {
    let v = assignment[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

fn dpll(clauses: &[Vec<i64>], assignment: &mut Vec<i8>) -> bool {
    let saved = assignment.clone();
    loop {
        let mut unit = None;
        let mut all_sat = true;
        for clause in clauses {
            let mut unassigned = None;
            let mut free = 0;
            let mut sat = false;
            for &lit in clause {
                match lit_value(assignment, lit) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        free += 1;
                        unassigned = Some(lit);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            all_sat = false;
            if free == 0 {
                *assignment = saved;
                return false;
            }
            if free == 1 {
                unit = unassigned;
                break;
            }
        }
        if all_sat {
            return true;
        }
        match unit {
            Some(lit) => assignment[lit.unsigned_abs() as usize] = if lit > 0 { 1 } else { -1 },
            None => break,
        }
    }
    let var = (1..assignment.len()).find(|&v| assignment[v] == 0).expect("unsatisfied clause has a free literal");
    for value in [1, -1] {
        assignment[var] = value;
        if dpll(clauses, assignment) {
            return true;
        }
        assignment[var] = 0;
    }
    *assignment = saved;
    false
}

// ------------------------------------------------------------ properties

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub type PropResult = Result<(), String>;

pub fn radix_round_trip(cases: u32) -> PropResult {
    runner(cases)
        .run(&(1u64..=1_000_000, 2u64..=64), |(value, base)| {
            let e = expand(value, base).map_err(fail)?;
            prop_assert_eq!(e.reconstruct(), BigUint::from(value));
            prop_assert!(e.digits().iter().all(|d| d < &BigUint::from(base)));
            prop_assert!(e.leading_digit() > &BigUint::from(0u32));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn interval_membership(cases: u32) -> PropResult {
    runner(cases)
        .run(&(1u64..=u64::MAX, 2u64..=64), |(value, base)| {
            let (v, b) = (BigUint::from(value), BigUint::from(base));
            let n = floor_log(&v, &b).map_err(fail)?;
            let interval = localize(&v, &b).map_err(fail)?;
            prop_assert_eq!(interval.exponent(), n);
            prop_assert!(interval.lower() <= &v && &v < interval.upper());
            prop_assert_eq!(interval.lower().clone(), b.pow(n as u32));
            prop_assert!(floor_log(&(&v + 1u32), &b).map_err(fail)? >= n);
            let delta = vdw::radix::delta(&v, &b).map_err(fail)?;
            prop_assert!(delta - n as f64 >= 0.0 && delta - (n as f64) < 1.0);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn epsilon_identity(cases: u32) -> PropResult {
    runner(cases)
        .run(&(1u64..=u64::MAX, 2u64..=64), |(value, base)| {
            let d = decompose_log(&expand(value, base).map_err(fail)?);
            let expected = (value as f64).ln() / (base as f64).ln();
            prop_assert!((d.total - expected).abs() <= 1e-12, "total {} vs {}", d.total, expected);
            let n = d.n as f64;
            prop_assert!(d.eps1 >= 0.0 && d.eps2 >= 0.0);
            prop_assert!(n + d.eps1 + d.eps2 < n + 1.0);
            prop_assert!((n + d.eps1 + d.eps2 - expected).abs() <= 1e-9);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn square_condition_case() -> impl Strategy<Value = (BigUint, u64, u64)> {
    (2u64..=8, 3u64..=10).prop_flat_map(|(r, k)| {
        (1u32..=(k * k) as u32 + 4, any::<u128>()).prop_map(move |(e, noise)| {
            let lower = BigUint::from(r).pow(e);
            let span = &lower * (r - 1);
            (&lower + BigUint::from(noise) % span, r, k)
        })
    })
}

pub fn square_condition_equivalence(cases: u32) -> PropResult {
    runner(cases)
        .run(&square_condition_case(), |(w, r, k)| {
            let report = check_square_condition(&w, r, k).map_err(fail)?;
            prop_assert_eq!(report.k_ge_sqrt_n_plus_1, report.n_le_k2_minus_1);
            let n = floor_log(&w, &BigUint::from(r)).map_err(fail)?;
            prop_assert_eq!(report.n, n);
            // oracle: k >= sqrt(n + 1) iff k^2 >= n + 1
            prop_assert_eq!(report.k_ge_sqrt_n_plus_1, k * k > n);
            let below = w < BigUint::from(r).pow((k * k) as u32);
            prop_assert_eq!(report.w_lt_r_pow_k2, below);
            if report.k_ge_sqrt_n_plus_1 && n < k * k {
                prop_assert!(report.w_lt_r_pow_k2);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn embedded_ap() -> impl Strategy<Value = (u64, u64, u64, u64, u64)> {
    (0..KNOWN.len()).prop_flat_map(|i| {
        let (r, k, w) = KNOWN[i];
        (1..=w - (k - 1)).prop_flat_map(move |a| (Just(a), 1..=(w - a) / (k - 1)).prop_map(move |(a, d)| (r, k, w, a, d)))
    })
}

pub fn ap_bound_below_exponent(cases: u32) -> PropResult {
    runner(cases)
        .run(&embedded_ap(), |(r, k, w, a, d)| {
            prop_assert!(a + (k - 1) * d <= w);
            let bound = ap_lower_bound_n(&BigUint::from(a), &BigUint::from(d), k, r).map_err(fail)?;
            let exponent = floor_log(&BigUint::from(w), &BigUint::from(r)).map_err(fail)?;
            prop_assert!(bound <= exponent, "a={} d={} bound {} > n {}", a, d, bound, exponent);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn root_envelope(cases: u32) -> PropResult {
    runner(cases)
        .run(&(2u64..=u64::MAX, 2u64..=64), |(value, base)| {
            let e = expand(value, base).map_err(fail)?;
            if e.leading_exponent() == 0 {
                return Ok(());
            }
            let env = bounds::nth_root_envelope(&e).map_err(fail)?;
            prop_assert!(env.lower <= env.root && env.root < env.upper, "{:?}", env);
            prop_assert_eq!(env.lower, base as f64);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// For `3 <= n <= 30` the CNF for `(2, 3, n)` is satisfiable iff the engine finds a coloring,
/// with satisfiability decided by a separate DPLL. A random assignment
/// satisfies the CNF iff it decodes to an AP-free coloring.
pub fn cnf_agrees_with_search(cases: u32) -> PropResult {
    runner(cases)
        .run(&(3u64..=30, proptest::collection::vec(any::<bool>(), 30)), |(n, bits)| {
            let cnf = cnf_export(2, 3, n).map_err(fail)?;
            let sat = dpll_satisfiable(&cnf);
            let feasible = match feasibility(2, 3, n as usize, Budget::unlimited()).map_err(fail)? {
                Feasibility::Witness(c) => {
                    prop_assert!(cnf.is_satisfied_by(&encode_coloring(&c)));
                    true
                }
                Feasibility::Infeasible { .. } => false,
                Feasibility::Aborted { .. } => return Err(fail("unbounded search aborted")),
            };
            prop_assert_eq!(sat, feasible, "n={}", n);
            prop_assert_eq!(sat, n < 9);

            let assignment: Vec<bool> = bits[..n as usize].to_vec();
            let meta = InstanceMeta { r: 2, k: 3, n_points: n };
            let coloring: Coloring = decode_assignment(meta, &assignment).map_err(fail)?;
            let clean = verify(&coloring, 3).map_err(fail)?.is_none();
            prop_assert_eq!(cnf.is_satisfied_by(&assignment), clean);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn brute_force_agrees(max_n: u32) -> PropResult {
    for n in 1..=max_n {
        let brute = brute_force_two_three(n);
        let engine = match feasibility(2, 3, n as usize, Budget::unlimited()).map_err(|e| e.to_string())? {
            Feasibility::Witness(c) => {
                if verify(&c, 3).map_err(|e| e.to_string())?.is_some() {
                    return Err(format!("n={n}: witness contains an AP"));
                }
                true
            }
            Feasibility::Infeasible { .. } => false,
            Feasibility::Aborted { .. } => return Err(format!("n={n}: aborted")),
        };
        if brute != engine {
            return Err(format!("n={n}: brute force {brute}, search {engine}"));
        }
    }
    Ok(())
}

pub fn to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap()
}
