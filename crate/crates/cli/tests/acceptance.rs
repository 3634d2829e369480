//! The eight acceptance criteria, one line each. Runs without the libtest
//! harness so the lines always reach the output; exits non-zero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use spherecover::{parse, Document};
use spherecover_core::curves::{compose_table, is_stable, validate_table, Multicurve, PullbackTable};
use spherecover_core::decomposition::{carrier_piece, decomposition_report, StandardFormSpec};
use spherecover_core::estimates::{evaluate, samebig_c, Formula};
use spherecover_core::extension::{
    classify_extended, extend, induced_pullback, realizability_report, validate_extension, ExtendOptions, Outcome,
    PeriodicPieceData,
};
use spherecover_core::linalg::Matrix;
use spherecover_core::model::{validate_spec, CoveringType, OrbifoldType};
use spherecover_core::real::Real;
use spherecover_core::thurston::{
    length_decay_diagnostic, spectral_radius, thurston_matrix, Comparison, DecayParams, ThurstonMatrix,
    DEFAULT_UNIVERSE_CAP,
};
use spherecover_core::{CurveId, Rational, Rule};
use spherecover_oracle::dec::{rel_close, Dec};
use spherecover_oracle::{formulas, quad, spectral};
use spherecover_testkit as kit;

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

const CORPUS: [&str; 6] = ["power", "basilica", "levy", "two-curve", "pcf-extension", "shsr"];

fn corpus(name: &str) -> Document {
    let path = format!("{}/corpus/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    match parse(&text, false) {
        Ok(p) => p.document,
        Err(errors) => panic!("{name}: {}", errors[0]),
    }
}

fn subsets(universe: &[CurveId]) -> Vec<Multicurve> {
    (1u32..(1 << universe.len()))
        .map(|mask| {
            let picked = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| c.clone());
            Multicurve::new(picked.collect()).unwrap()
        })
        .collect()
}

fn formula_oracle() -> Check {
    let tol = kit::q(1, 1_000_000_000_000);
    let mut points = 0;
    for formula in Formula::ALL {
        for args in kit::estimate_inputs(formula.name()) {
            let reals: Vec<Real> = args.iter().map(Real::from_rational).collect();
            let ours = evaluate(formula, &reals).map_err(|e| format!("{formula}: {e}"))?;
            let decs: Vec<Dec> = args.iter().map(Dec::from_q).collect();
            let theirs = formulas::evaluate(formula.name(), &decs).ok_or(format!("oracle lacks {formula}"))?;
            ensure!(ours.values.len() == theirs.len(), "{formula}: output arity differs");
            for ((name, a), b) in ours.values.iter().zip(&theirs) {
                ensure!(
                    rel_close(&a.to_rational(), &b.to_q(), &tol),
                    "{formula} {name} at {args:?}: {} vs {}",
                    a.to_decimal(20),
                    b.to_f64()
                );
                points += 1;
            }
        }
    }
    let mut worst = 0f64;
    for (n, d) in [(1, 2), (1, 1), (2, 1)] {
        let k1 = f64::from(n) / f64::from(d);
        let r0 = 0.5 * (-2.0 * k1).exp();
        let integral = quad::integrate(formulas::float::poincare, r0, 0.5, 1e-12);
        let c = samebig_c(&Real::from_ratio(n.into(), d.into()))
            .map_err(|e| e.to_string())?
            .to_f64();
        let err = (integral - c).abs();
        ensure!(err <= 1e-6, "C at K1 = {k1}: quadrature {integral} vs closed form {c}");
        worst = worst.max(err);
    }
    Ok(format!("{points} values within 1e-12, C identity error {worst:.1e}"))
}

fn iterate_identity_on(table: &PullbackTable, ks: &[u32]) -> Result<usize, String> {
    let mut checked = 0;
    for &k in ks {
        let tk = compose_table(table, k).map_err(|e| format!("compose k={k}: {e}"))?;
        for gamma in subsets(&table.universe).into_iter().filter(|g| is_stable(table, g)) {
            let a = thurston_matrix(table, &gamma).map_err(|e| e.to_string())?;
            let ak = thurston_matrix(&tk, &gamma).map_err(|e| e.to_string())?;
            ensure!(ak == a.pow(k), "k={k}, Γ={:?}: {ak} ≠ {}", gamma.curves(), a.pow(k));
            checked += 1;
        }
    }
    Ok(checked)
}

fn iterate_identity() -> Check {
    let mut checked = 0;
    let mut tables = 0;
    for name in CORPUS {
        let doc = corpus(name);
        if doc.has_curves() {
            checked += iterate_identity_on(&doc.table, &[1, 2, 3, 4]).map_err(|e| format!("{name}: {e}"))?;
            tables += 1;
        }
    }
    let mut rng = kit::rng(2);
    for n in 0..100 {
        let t = kit::random_table(&mut rng, 5, 4);
        ensure!(validate_table(&t).is_valid(), "random table #{n} is invalid");
        let k = rng.gen_range(1..=4);
        checked += iterate_identity_on(&t, &[k]).map_err(|e| format!("random table #{n}: {e}"))?;
    }
    Ok(format!(
        "{tables} corpus + 100 random tables, {checked} exact matrix identities"
    ))
}

fn spectral_soundness() -> Check {
    let mut rng = kit::rng(3);
    let mut ties = 0;
    for n in 0..500 {
        let dim = rng.gen_range(1..=6);
        let rows = if n % 5 == 0 {
            ties += 1;
            kit::tie_matrix(&mut rng, dim)
        } else {
            kit::random_matrix(&mut rng, dim)
        };
        let oracle = match spectral::compare_by_charpoly(&rows) {
            std::cmp::Ordering::Less => Comparison::Lt,
            std::cmp::Ordering::Equal => Comparison::Eq,
            std::cmp::Ordering::Greater => Comparison::Ge,
        };
        ensure!(
            n % 5 != 0 || oracle == Comparison::Eq,
            "constructed tie {rows:?} is not a tie"
        );
        let a = ThurstonMatrix {
            curve_order: (0..dim).map(|i| CurveId::from(format!("c{i}"))).collect(),
            entries: Matrix::from_rows(rows.clone()),
        };
        let ours = spectral_radius(&a).comparison;
        ensure!(
            ours == oracle,
            "matrix #{n} {rows:?}: certificate {ours:?}, oracle {oracle:?}"
        );
    }
    Ok(format!("500/500 agree, {ties} constructed λ = 1 ties"))
}

fn degree_invariants() -> Check {
    let mut docs = 0;
    for name in CORPUS {
        let doc = corpus(name);
        let r = validate_spec(&doc.covering);
        ensure!(r.is_valid(), "{name}: {:?}", r.violations);
        if doc.has_curves() {
            let r = validate_table(&doc.table);
            ensure!(r.is_valid(), "{name} table: {:?}", r.violations);
        }
        for piece in &doc.periodic_pieces {
            let r = validate_extension(piece);
            ensure!(r.is_valid(), "{name} piece {}: {:?}", piece.piece, r.violations);
        }
        docs += 1;
    }
    let mut rng = kit::rng(4);
    for n in 0..200 {
        let (spec, table) = kit::random_document(&mut rng);
        ensure!(validate_spec(&spec).is_valid(), "random spec #{n} fails validation");
        ensure!(validate_table(&table).is_valid(), "random table #{n} fails validation");
        if !spec.complete {
            continue;
        }
        // One local degree off by one must surface as a residual of exactly that size.
        let mut bumped = spec.clone();
        let i = rng.gen_range(0..bumped.points.len());
        let before = bumped.points[i].local_degree;
        bumped.points[i].local_degree = if before < bumped.degree { before + 1 } else { before - 1 };
        let delta = i64::from(bumped.points[i].local_degree) - i64::from(before);
        let report = validate_spec(&bumped);
        let rh: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.rule == Rule::RiemannHurwitz)
            .collect();
        ensure!(
            rh.len() == 1 && rh[0].residual == Some(delta),
            "random spec #{n}: bump of {delta} reported as {:?}",
            report.violations
        );
    }
    Ok(format!(
        "{docs} corpus documents and 200 random specs valid, residuals exact"
    ))
}

fn decomposition_properties(spec: &StandardFormSpec) -> Result<(usize, usize), String> {
    let d = decomposition_report(spec).map_err(|e| e.to_string())?;
    ensure!(!d.piece_map.cycles.is_empty(), "no periodic cycle");
    for p in &d.thick {
        ensure!(d.piece_map.tails.contains_key(p), "{p} never reaches a cycle");
    }
    for p in &spec.pieces0 {
        let c = carrier_piece(p, &spec.pieces1).map_err(|e| format!("carrier of {}: {e}", p.id))?;
        let candidates = spec
            .pieces1
            .iter()
            .filter(|q| q.contained_in == p.id && q.id == c.id)
            .count();
        ensure!(candidates == 1, "carrier of {} is not unique", p.id);
        ensure!(d.carriers[&p.id] == c.id, "report disagrees on the carrier of {}", p.id);
    }
    Ok((d.thick.len(), d.piece_map.cycles.len()))
}

fn decomposition() -> Check {
    let doc = corpus("two-curve");
    let spec = doc.standard_form.as_ref().ok_or("two-curve has no standard form")?;
    let (pieces, cycles) = decomposition_properties(spec).map_err(|e| format!("two-curve: {e}"))?;
    let mut rng = kit::rng(5);
    for n in 0..100 {
        let form = kit::random_standard_form(&mut rng);
        decomposition_properties(&form.spec).map_err(|e| format!("random form #{n}: {e}"))?;
        for (p, expected) in &form.carriers {
            let piece = form.spec.pieces0.iter().find(|q| &q.id == p).unwrap();
            let c = carrier_piece(piece, &form.spec.pieces1).map_err(|e| e.to_string())?;
            ensure!(
                &c.id == expected,
                "random form #{n}: carrier of {p} is {}, built as {expected}",
                c.id
            );
        }
    }
    Ok(format!(
        "two-curve: {pieces} thick pieces, {cycles} cycles; 100 random forms hold"
    ))
}

/// Every single-degree ±1 change of the instance.
fn mutants(data: &PeriodicPieceData) -> Vec<(String, PeriodicPieceData)> {
    let mut out = Vec::new();
    for delta in [1i64, -1] {
        let shift = |v: u32| (i64::from(v) + delta) as u32;
        let tag = if delta > 0 { "+1" } else { "-1" };
        let mut m = data.clone();
        m.degree = shift(m.degree);
        out.push((format!("D {tag}"), m));
        let mut m = data.clone();
        m.interior.degree = shift(m.interior.degree);
        out.push((format!("interior degree {tag}"), m));
        for i in 0..data.gamma.len() {
            let mut m = data.clone();
            m.gamma[i].degree = shift(m.gamma[i].degree);
            out.push((format!("d_γ({}) {tag}", data.gamma[i].curve), m));
        }
        for j in 0..data.beta.len() {
            let mut m = data.clone();
            m.beta[j].degree = shift(m.beta[j].degree);
            out.push((format!("d_β({}) {tag}", data.beta[j].id), m));
        }
        for k in 0..data.interior.points.len() {
            let mut m = data.clone();
            m.interior.points[k].local_degree = shift(m.interior.points[k].local_degree);
            out.push((format!("deg at {} {tag}", data.interior.points[k].id), m));
        }
    }
    out
}

fn extension() -> Check {
    let doc = corpus("pcf-extension");
    let data = doc
        .periodic_pieces
        .first()
        .ok_or("pcf-extension has no periodic piece")?;
    let r = validate_extension(data);
    ensure!(r.is_valid(), "instance fails validation: {:?}", r.violations);
    let ext = extend(data, &ExtendOptions::default()).map_err(|e| e.to_string())?;
    let r = validate_spec(&ext.spec);
    ensure!(r.is_valid(), "extended covering: {:?}", r.violations);
    let kind = classify_extended(&ext).map_err(|e| e.to_string())?;
    ensure!(kind == CoveringType::PostcriticallyFinite, "classified as {kind:?}");

    let all = mutants(data);
    ensure!(all.len() >= 20, "only {} mutation sites", all.len());
    let mut caught = 0;
    for (what, m) in all.iter().take(20) {
        ensure!(!validate_extension(m).is_valid(), "mutant `{what}` passes validation");
        caught += 1;
    }
    Ok(format!(
        "degree identity and Riemann–Hurwitz exact, PCF-type, {caught}/20 mutants caught"
    ))
}

fn pipeline() -> Check {
    let doc = corpus("two-curve");
    let spec = doc.standard_form.as_ref().ok_or("two-curve has no standard form")?;
    let d = decomposition_report(spec).map_err(|e| e.to_string())?;
    let periodic = d.periodic_pieces();
    ensure!(!periodic.is_empty(), "no periodic piece");
    let data = doc
        .periodic_pieces
        .iter()
        .find(|p| periodic.contains(&&p.piece))
        .ok_or("no periodic piece data for a periodic piece")?;
    let period = d.piece_map.period(&data.piece).unwrap_or(0);
    ensure!(
        period == data.period as usize,
        "piece {} has period {period}, declared {}",
        data.piece,
        data.period
    );
    let ext = extend(data, &ExtendOptions::default()).map_err(|e| e.to_string())?;
    let induced = induced_pullback(&doc.table, data).map_err(|e| e.to_string())?;
    let v = realizability_report(&ext, &induced, DEFAULT_UNIVERSE_CAP).map_err(|e| e.to_string())?;
    let zero = Rational::from_integer(0.into());
    ensure!(
        v.orbifold == OrbifoldType::Hyperbolic && v.signature.chi < zero,
        "orbifold {}",
        v.orbifold
    );
    ensure!(
        v.obstructions.is_empty(),
        "{} obstructions in the induced universe",
        v.obstructions.len()
    );
    ensure!(v.outcome == Outcome::Realizable, "{}", v.summary());

    let path = format!("{}/corpus/two-curve.json", env!("CARGO_MANIFEST_DIR"));
    let out = spherecover::run(["spherecover", "verdict", "--input", &path], &mut std::io::empty());
    ensure!(out.code == 0, "CLI verdict exited {}: {}", out.code, out.stdout);
    ensure!(
        out.stdout.contains("realizable"),
        "CLI verdict lacks `realizable`: {}",
        out.stdout
    );
    Ok(format!(
        "piece {}: χ = {}, 0 obstructions, realizable",
        data.piece, v.signature.chi
    ))
}

fn length_decay() -> Check {
    let mut rng = kit::rng(8);
    let curves: Vec<CurveId> = (0..6).map(|i| CurveId::from(format!("c{i}"))).collect();
    for n in 0..50 {
        let decaying = kit::random_subset(&mut rng, &curves);
        let floor = rng.gen_range(0.01..1.0);
        let trace = kit::geometric_trace(&mut rng, &curves, &decaying, floor);
        let r = length_decay_diagnostic(&trace, &DecayParams::new(floor)).map_err(|e| e.to_string())?;
        ensure!(
            r.gamma_c == decaying,
            "subset #{n}: recovered {:?}, planted {decaying:?}",
            r.gamma_c
        );
        ensure!(
            r.floor_violations.is_valid(),
            "subset #{n}: {:?}",
            r.floor_violations.violations
        );
    }
    Ok("50/50 planted subsets recovered, no floor violations".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("formula oracle", 5, formula_oracle),
        ("iterate identity", 10, iterate_identity),
        ("spectral certificate", 30, spectral_soundness),
        ("degree sums and Riemann–Hurwitz", 5, degree_invariants),
        ("decomposition", 5, decomposition),
        ("extension", 5, extension),
        ("decompose → extend → verdict", 10, pipeline),
        ("length decay", 5, length_decay),
    ];
    let mut failed = 0;
    for (n, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("took {elapsed:.2?}, budget {budget} s")),
            r => r,
        };
        match result {
            Ok(detail) => println!(
                "PASS criterion {}: {name} ({elapsed:.2?} of {budget} s): {detail}",
                n + 1
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({elapsed:.2?} of {budget} s): {why}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
