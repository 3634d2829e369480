use std::cmp::Ordering;

use rand::Rng;

use spherecover_core::estimates::{evaluate, samebig_c, zeta_derivative_abs, Formula};
use spherecover_core::linalg::Matrix;
use spherecover_core::real::Real;
use spherecover_core::thurston::{spectral_radius, Comparison, ThurstonMatrix};
use spherecover_core::{CurveId, Rational};
use spherecover_oracle::dec::{rel_close, Dec};
use spherecover_oracle::{formulas, quad, spectral};
use spherecover_testkit as kit;

fn certify(rows: &[Vec<Rational>]) -> Comparison {
    let a = ThurstonMatrix {
        curve_order: (0..rows.len()).map(|i| CurveId::from(format!("c{i}"))).collect(),
        entries: Matrix::from_rows(rows.to_vec()),
    };
    spectral_radius(&a).comparison
}

fn expected(ord: Ordering) -> Comparison {
    match ord {
        Ordering::Less => Comparison::Lt,
        Ordering::Equal => Comparison::Eq,
        Ordering::Greater => Comparison::Ge,
    }
}

#[test]
fn spectral_comparison_matches_both_oracles() {
    let mut rng = kit::rng(11);
    let mut seen = [0usize; 3];
    for n in 0..300 {
        let dim = rng.gen_range(1..=6);
        let rows = if n % 3 == 0 {
            kit::tie_matrix(&mut rng, dim)
        } else {
            kit::random_matrix(&mut rng, dim)
        };
        let by_charpoly = spectral::compare_by_charpoly(&rows);
        assert_eq!(by_charpoly, spectral::compare_by_minors(&rows), "{rows:?}");
        if n % 3 == 0 {
            assert_eq!(by_charpoly, Ordering::Equal, "{rows:?}");
        }
        assert_eq!(certify(&rows), expected(by_charpoly), "{rows:?}");
        seen[(by_charpoly as i8 + 1) as usize] += 1;
    }
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
}

#[test]
fn estimates_match_the_decimal_oracle() {
    let tol = kit::q(1, 1_000_000_000_000_000_000).pow(2);
    for formula in Formula::ALL {
        for args in kit::estimate_inputs(formula.name()) {
            let ours = evaluate(formula, &args.iter().map(Real::from_rational).collect::<Vec<_>>()).unwrap();
            let theirs = formulas::evaluate(formula.name(), &args.iter().map(Dec::from_q).collect::<Vec<_>>()).unwrap();
            assert_eq!(ours.values.len(), theirs.len());
            for ((name, a), b) in ours.values.iter().zip(&theirs) {
                assert!(
                    rel_close(&a.to_rational(), &b.to_q(), &tol),
                    "{formula} {name} at {args:?}: {} vs {}",
                    a.to_decimal(40),
                    b.to_f64()
                );
            }
        }
    }
}

#[test]
fn zeta_derivative_matches_finite_differences() {
    for x in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let numeric = quad::derivative(formulas::float::zeta, x, 1e-4).abs();
        let exact = zeta_derivative_abs(&Real::from_f64(x).unwrap()).unwrap().to_f64();
        assert!((numeric - exact).abs() < 1e-9, "x = {x}: {numeric} vs {exact}");
    }
}

#[test]
fn poincare_integral_reproduces_c() {
    for (n, d) in [(1, 2), (1, 1), (2, 1)] {
        let k1 = n as f64 / d as f64;
        let r0 = 1.0 / (2.0 * (2.0 * k1).exp());
        let integral = quad::integrate(formulas::float::poincare, r0, 0.5, 1e-12);
        let c = samebig_c(&Real::from_ratio(n, d)).unwrap().to_f64();
        assert!((integral - c).abs() < 1e-6, "K1 = {k1}: {integral} vs {c}");
    }
}
