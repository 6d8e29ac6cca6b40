//! Public API on the fixture states, against oracles written out here.

use std::path::PathBuf;

use renyi_core::divergence::{sandwiched_renyi, standard_renyi};
use renyi_core::exponent::{chernoff, hoeffding, regularized_test, Method};
use renyi_core::io::{read_state, write_state, State};
use renyi_core::measurement::{ncopy_table_classical, test_divergence_classical};
use renyi_core::random::{random_density, rng};
use renyi_core::{ClassicalState, PsiProfile};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn classical(name: &str) -> ClassicalState {
    read_state(fixture(name)).unwrap().as_classical().unwrap().clone()
}

/// log Σ pᵅ q¹⁻ᵅ / (α − 1), written out directly.
fn renyi_oracle(p: &[f64], q: &[f64], a: f64) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum();
    s.ln() / (a - 1.0)
}

/// Best binary Rényi value over all 2^k subsets.
fn brute_force_test(p: &[f64], q: &[f64], a: f64) -> f64 {
    let k = p.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << k) {
        let (mut pa, mut qa) = (0.0, 0.0);
        for i in 0..k {
            if mask >> i & 1 == 1 {
                pa += p[i];
                qa += q[i];
            }
        }
        best = best.max(renyi_oracle(&[pa, 1.0 - pa], &[qa, 1.0 - qa], a));
    }
    best
}

fn product(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        out = out.iter().flat_map(|x| p.iter().map(move |y| x * y)).collect();
    }
    out
}

#[test]
fn classical_fixture_families_match_direct_sums() {
    let (p, q) = (classical("generic-p.json"), classical("generic-q.json"));
    let (rho, sigma) = (p.to_density(), q.to_density());
    for a in [0.2, 0.5, 0.8, 1.5, 3.0] {
        let want = renyi_oracle(p.weights(), q.weights(), a);
        assert!((standard_renyi(&rho, &sigma, a).unwrap().value - want).abs() < 1e-12);
        assert!((sandwiched_renyi(&rho, &sigma, a).unwrap().value - want).abs() < 1e-10);
    }
}

#[test]
fn ncopy_rows_match_brute_force() {
    let (p, q) = (classical("two-level-p.json"), classical("two-level-q.json"));
    for a in [0.3, 0.7] {
        let rows = ncopy_table_classical(&p, &q, a, 3).unwrap();
        for r in rows {
            let (pn, qn) = (product(p.weights(), r.n), product(q.weights(), r.n));
            let want = brute_force_test(&pn, &qn, a) / r.n as f64;
            assert!((r.dtest_per_copy - want).abs() < 1e-12, "alpha {a}, n {}", r.n);
        }
    }
}

#[test]
fn single_copy_test_on_generic_pair() {
    let (p, q) = (classical("generic-p.json"), classical("generic-q.json"));
    for a in [0.1, 0.5, 0.9] {
        let got = test_divergence_classical(&p, &q, a).unwrap();
        assert_eq!(got.value, brute_force_test(p.weights(), q.weights(), a));
        assert!(got.certified);
    }
}

#[test]
fn regularized_value_is_chernoff_at_half_on_fixtures() {
    for (a, b) in [
        ("two-level-p.json", "two-level-q.json"),
        ("generic-p.json", "generic-q.json"),
        ("noncommuting-rho.json", "noncommuting-sigma.json"),
    ] {
        let rho = read_state(fixture(a)).unwrap().to_density();
        let sigma = read_state(fixture(b)).unwrap().to_density();
        let prof = PsiProfile::from_states(&rho, &sigma).unwrap();
        let v = regularized_test(&prof, 0.5, Method::Both).unwrap().value;
        assert!((v - chernoff(&prof)).abs() < 1e-6, "{a}");
    }
}

#[test]
fn hoeffding_closes_at_relative_entropy() {
    let (p, q) = (classical("two-level-p.json"), classical("two-level-q.json"));
    let prof = PsiProfile::from_classical(&p, &q).unwrap();
    // D(p‖q) = ½ log 2 + ½ log(2/3)
    let d = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
    assert!(hoeffding(&prof, d).h.abs() < 1e-9);
    assert!(hoeffding(&prof, d / 2.0).h > 0.0);
}

#[test]
fn written_states_read_back_exactly() {
    let dir = std::env::temp_dir();
    let mut r = rng(7);
    for d in 1..=4 {
        let rho = random_density(d, &mut r);
        let path = dir.join(format!("renyi-core-rt-{}-{d}.json", std::process::id()));
        write_state(&path, &State::Density(rho.clone())).unwrap();
        let back = read_state(&path).unwrap().to_density();
        std::fs::remove_file(&path).unwrap();
        assert_eq!(back.entries(), rho.entries());
    }
    let p = classical("generic-p.json");
    let path = dir.join(format!("renyi-core-rt-{}-c.json", std::process::id()));
    write_state(&path, &State::Classical(p.clone())).unwrap();
    let back = read_state(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back.as_classical().unwrap(), &p);
}
