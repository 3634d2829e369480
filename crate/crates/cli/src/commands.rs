//! One function per subcommand, each filling in a [`Report`].

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use spherecover_core::curves::{is_full, is_stable, validate_table, Multicurve};
use spherecover_core::decomposition::{decomposition_report, validate_against_covering, validate_standard_form};
use spherecover_core::estimates::{evaluate, Formula};
use spherecover_core::extension::{
    classify_extended, extend, induced_pullback, realizability_report, validate_extension, ExtendOptions,
    PeriodicPieceData, Verdict,
};
use spherecover_core::model::{classify_type, compute_signature, orbifold_type, validate_spec, OrbifoldType};
use spherecover_core::real::{format_significant, Real};
use spherecover_core::thurston::{
    is_irreducible, length_decay_diagnostic, search_obstructions, spectral_radius, thurston_matrix, DecayParams,
    ObstructionCandidate, SpectralCertificate, ThurstonMatrix,
};
use spherecover_core::{CurveId, Error, Rational};

use crate::document::Document;
use crate::report::{rational_value, Report, Status};

fn error_rule(e: &Error) -> &'static str {
    match e {
        Error::PortraitIncomplete { .. } | Error::UnknownCurve(_) => "dangling-reference",
        Error::NotSemiRational(_) => "not-semi-rational",
        Error::InvalidMulticurve(_) => "multicurve",
        Error::PeripheralPullbackUndeclared(_) => "missing-entry",
        Error::UniverseTooLarge { .. } => "universe-cap",
        Error::StandardFormViolated { .. } => "standard-form",
        Error::ContainmentFlags(_) => "containment",
        Error::Invalid(_) => "invalid",
        Error::Trace(_) => "trace",
        Error::Domain { .. } => "domain",
    }
}

/// Records a core error; validation reports are expanded into their violations.
pub fn fail(r: &mut Report, e: &Error) {
    match e {
        Error::Invalid(v) => {
            r.absorb(v);
        }
        other => r.error(error_rule(other), other.to_string()),
    }
}

fn ids<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(items.into_iter().map(|i| Value::String(i.to_string())).collect())
}

fn validity(ok: bool) -> &'static str {
    if ok {
        "valid"
    } else {
        "invalid"
    }
}

fn require_table(doc: &Document, r: &mut Report) -> bool {
    if !doc.has_curves() {
        r.error("missing-section", "the document has no `curves` section");
        return false;
    }
    r.absorb(&validate_table(&doc.table))
}

fn certificate_value(c: &SpectralCertificate) -> Value {
    json!({
        "comparison": c.comparison.as_str(),
        "lower": c.lower.to_string(),
        "upper": c.upper.to_string(),
        "approx": format_significant(&c.value(), 12),
        "method": c.method.to_string(),
    })
}

fn matrix_value(m: &ThurstonMatrix) -> Value {
    Value::Array(m.entries.rows().map(|row| ids(row.iter())).collect())
}

fn candidate_value(c: &ObstructionCandidate) -> Value {
    json!({
        "curves": ids(c.curves.curves()),
        "lambda": certificate_value(&c.certificate),
        "full": c.full,
        "irreducible": c.irreducible,
        "canonical": c.is_canonical_candidate(),
    })
}

pub fn validate(doc: &Document, r: &mut Report) {
    let ok = r.absorb(&validate_spec(&doc.covering));
    r.verdict("covering", validity(ok));
    if ok {
        match classify_type(&doc.covering) {
            Ok(t) => r.verdict("type", t.to_string()),
            Err(e) => fail(r, &e),
        }
    }
    if doc.has_curves() {
        let ok = r.absorb(&validate_table(&doc.table));
        r.verdict("pullback_table", validity(ok));
    }
    if let Some(sf) = &doc.standard_form {
        let mut v = validate_standard_form(sf);
        v.merge(validate_against_covering(sf, &doc.covering));
        let ok = r.absorb(&v);
        r.verdict("standard_form", validity(ok));
    }
    if !doc.periodic_pieces.is_empty() {
        let mut pieces = Map::new();
        for p in &doc.periodic_pieces {
            let ok = r.absorb(&validate_extension(p));
            pieces.insert(p.piece.to_string(), validity(ok).into());
        }
        r.verdict("periodic_pieces", pieces);
    }
    if doc.traces.is_some() {
        r.verdict("traces", "valid");
    }
}

pub fn orbifold(doc: &Document, r: &mut Report) {
    if !r.absorb(&validate_spec(&doc.covering)) {
        return;
    }
    let sig = match compute_signature(&doc.covering) {
        Ok(s) => s,
        Err(e) => return fail(r, &e),
    };
    let kind = orbifold_type(&sig);
    r.verdict("orbifold", kind.to_string());
    r.verdict("chi", rational_value(&sig.chi));
    r.verdict(
        "signature",
        sig.nu
            .iter()
            .map(|(p, nu)| (p.to_string(), Value::String(nu.to_string())))
            .collect::<Map<_, _>>(),
    );
    if kind != OrbifoldType::Hyperbolic {
        r.set_status(Status::Negative);
    }
    if kind.is_anomalous() {
        r.note("χ > 0 cannot occur for a branched covering whose marked set contains its postcritical set");
    }
}

/// A multicurve by name, or a comma-separated list of universe curves.
fn resolve_multicurve(doc: &Document, spec: &str, r: &mut Report) -> Option<Multicurve> {
    if let Some(m) = doc.multicurve(spec) {
        return Some(m.clone());
    }
    let curves: Vec<CurveId> = spec.split(',').map(|c| CurveId::new(c.trim())).collect();
    for c in &curves {
        if !doc.table.contains_curve(c) {
            r.error(
                "dangling-reference",
                format!("`{c}` is neither a named multicurve nor a universe curve"),
            );
            return None;
        }
    }
    match Multicurve::new(curves) {
        Ok(m) => Some(m),
        Err(e) => {
            fail(r, &e);
            None
        }
    }
}

pub fn thurston(doc: &Document, multicurve: &str, r: &mut Report) {
    if !require_table(doc, r) {
        return;
    }
    let Some(gamma) = resolve_multicurve(doc, multicurve, r) else {
        return;
    };
    let matrix = match thurston_matrix(&doc.table, &gamma) {
        Ok(m) => m,
        Err(e) => return fail(r, &e),
    };
    let cert = spectral_radius(&matrix);
    let stable = is_stable(&doc.table, &gamma);
    let obstruction = stable && cert.is_at_least_one();
    r.verdict("multicurve", ids(gamma.curves()));
    r.verdict("matrix", matrix_value(&matrix));
    r.verdict("lambda", certificate_value(&cert));
    r.verdict("stable", stable);
    r.verdict("full", is_full(&doc.table, &gamma));
    r.verdict("irreducible", is_irreducible(&matrix));
    r.verdict("obstruction", obstruction);
    if obstruction {
        r.set_status(Status::Negative);
    }
    if !stable {
        r.note("the multicurve is not stable, so its matrix does not bear on obstructions");
    }
}

pub struct SearchOptions {
    pub universe_cap: usize,
    pub decay: DecayParams,
}

pub fn search(doc: &Document, opts: &SearchOptions, r: &mut Report) {
    if !require_table(doc, r) {
        return;
    }
    let found = match search_obstructions(&doc.table, opts.universe_cap) {
        Ok(f) => f,
        Err(e) => return fail(r, &e),
    };
    r.verdict("universe", ids(&doc.table.universe));
    r.verdict("candidates", Value::Array(found.iter().map(candidate_value).collect()));
    r.verdict(
        "canonical_candidates",
        found.iter().filter(|c| c.is_canonical_candidate()).count(),
    );
    if !found.is_empty() {
        r.set_status(Status::Negative);
    }
    r.note(Verdict::SCOPE);

    let Some(trace) = &doc.traces else { return };
    let decay = match length_decay_diagnostic(trace, &opts.decay) {
        Ok(d) => d,
        Err(e) => return fail(r, &e),
    };
    for v in &decay.floor_violations.violations {
        r.warning("length-floor", v.message.clone());
    }
    let gamma_c: BTreeSet<&CurveId> = decay.gamma_c.iter().collect();
    let matches = found
        .iter()
        .any(|c| c.curves.curves().iter().collect::<BTreeSet<_>>() == gamma_c);
    let mut d = Map::new();
    d.insert("decaying".into(), ids(&decay.gamma_c));
    d.insert("window".into(), opts.decay.window.into());
    d.insert("floor".into(), json!(opts.decay.floor));
    d.insert("matches_candidate".into(), matches.into());
    r.verdict("decay", d);
}

pub fn decompose(doc: &Document, r: &mut Report) {
    let Some(sf) = &doc.standard_form else {
        return r.error("missing-section", "the document has no `standard_form` section");
    };
    if !r.absorb(&validate_against_covering(sf, &doc.covering)) {
        return;
    }
    let res = match decomposition_report(sf) {
        Ok(res) => res,
        Err(e) => return fail(r, &e),
    };
    r.verdict("thin", ids(&res.thin));
    r.verdict("thick", ids(&res.thick));
    r.verdict(
        "level1",
        res.level1
            .iter()
            .map(|(p, c)| (p.to_string(), Value::String(c.to_string())))
            .collect::<Map<_, _>>(),
    );
    r.verdict(
        "carriers",
        res.carriers
            .iter()
            .map(|(p, c)| (p.to_string(), Value::String(c.to_string())))
            .collect::<Map<_, _>>(),
    );
    r.verdict(
        "tau",
        res.piece_map
            .tau
            .iter()
            .map(|(p, q)| (p.to_string(), Value::String(q.to_string())))
            .collect::<Map<_, _>>(),
    );
    r.verdict("cycles", Value::Array(res.piece_map.cycles.iter().map(ids).collect()));
    r.verdict(
        "preperiods",
        res.piece_map
            .tails
            .iter()
            .map(|(p, n)| (p.to_string(), Value::from(*n)))
            .collect::<Map<_, _>>(),
    );
    r.verdict("periodic", ids(res.periodic_pieces()));
}

fn select_piece<'d>(doc: &'d Document, piece: Option<&str>, r: &mut Report) -> Option<&'d PeriodicPieceData> {
    match piece {
        Some(name) => {
            let found = doc.periodic_piece(name);
            if found.is_none() {
                r.error(
                    "dangling-reference",
                    format!("no periodic piece `{name}` in the document"),
                );
            }
            found
        }
        None => match doc.periodic_pieces.as_slice() {
            [only] => Some(only),
            [] => {
                r.error("missing-section", "the document has no `periodic_pieces` section");
                None
            }
            _ => {
                r.error(
                    "ambiguous",
                    "the document has several periodic pieces; choose one with --piece",
                );
                None
            }
        },
    }
}

pub struct ExtendArgs<'a> {
    pub piece: Option<&'a str>,
    pub options: ExtendOptions,
}

pub fn extend_piece(doc: &Document, args: &ExtendArgs<'_>, r: &mut Report) {
    let Some(data) = select_piece(doc, args.piece, r) else {
        return;
    };
    r.verdict("piece", data.piece.to_string());
    if !r.absorb(&validate_extension(data)) {
        return;
    }
    let ext = match extend(data, &args.options) {
        Ok(e) => e,
        Err(e) => return fail(r, &e),
    };
    r.verdict("new_marked", ids(&ext.new_marked));
    r.verdict("centers", ids(&ext.centers));
    r.verdict(
        "z_cycles",
        Value::Array(
            ext.z_cycles
                .iter()
                .map(|c| {
                    json!({
                        "points": ids(&c.points),
                        "degree": c.degree,
                        "default_multiplier": c.defaulted_multiplier.as_ref().map(ToString::to_string),
                    })
                })
                .collect(),
        ),
    );
    r.verdict("degree", ext.spec.degree);
    r.verdict("points", ext.spec.points.len());
    let ok = r.absorb(&validate_spec(&ext.spec));
    r.verdict("portrait", validity(ok));
    match classify_extended(&ext) {
        Ok(t) => r.verdict("type", t.to_string()),
        Err(e) => fail(r, &e),
    }
    for c in ext.z_cycles.iter().filter(|c| c.defaulted_multiplier.is_some()) {
        r.note(format!(
            "cycle {} has every boundary degree 1; recorded as attracting with the default multiplier",
            ids(&c.points)
        ));
    }
}

pub struct VerdictArgs<'a> {
    pub piece: Option<&'a str>,
    pub options: ExtendOptions,
    pub universe_cap: usize,
}

pub fn verdict(doc: &Document, args: &VerdictArgs<'_>, r: &mut Report) {
    if !require_table(doc, r) {
        return;
    }
    let Some(data) = select_piece(doc, args.piece, r) else {
        return;
    };
    r.verdict("piece", data.piece.to_string());
    if let Some(sf) = &doc.standard_form {
        match decomposition_report(sf) {
            Ok(res) => {
                let period = res.piece_map.period(&data.piece);
                if !res.piece_map.is_periodic(&data.piece) || period != Some(data.period as usize) {
                    r.error(
                        "periodic-piece",
                        format!(
                            "piece {} declares period {} but the piece map gives {}",
                            data.piece,
                            data.period,
                            period.map_or("no period".to_string(), |p| p.to_string())
                        ),
                    );
                    return;
                }
            }
            Err(e) => return fail(r, &e),
        }
    }
    if !r.absorb(&validate_extension(data)) {
        return;
    }
    let induced = match induced_pullback(&doc.table, data) {
        Ok(t) => t,
        Err(e) => return fail(r, &e),
    };
    let ext = match extend(data, &args.options) {
        Ok(e) => e,
        Err(e) => return fail(r, &e),
    };
    let v = match realizability_report(&ext, &induced, args.universe_cap) {
        Ok(v) => v,
        Err(e) => return fail(r, &e),
    };
    r.verdict("outcome", v.summary());
    r.verdict("realizable", v.is_realizable());
    r.verdict("orbifold", v.orbifold.to_string());
    r.verdict("chi", rational_value(&v.signature.chi));
    r.verdict("type", v.covering_type.to_string());
    r.verdict("induced_universe", ids(&induced.universe));
    r.verdict(
        "obstructions",
        Value::Array(v.obstructions.iter().map(candidate_value).collect()),
    );
    r.verdict(
        "defaulted_cycles",
        Value::Array(v.defaulted_cycles.iter().map(ids).collect()),
    );
    if !v.is_realizable() {
        r.set_status(Status::Negative);
    }
    r.note(Verdict::SCOPE);
    if v.is_realizable() {
        r.note(Verdict::UNIQUENESS);
    }
}

pub struct EstimateArgs {
    pub formula: Formula,
    /// Named parameters as given, before defaults.
    pub params: Vec<(String, Rational)>,
    pub precision: usize,
    pub sweep: Option<(String, Vec<Rational>)>,
}

/// Maximum significant digits shown; the working precision is about 96.
pub const MAX_PRECISION: usize = 90;

fn arguments(args: &EstimateArgs, r: &mut Report) -> Option<Vec<Real>> {
    let names = args.formula.params();
    for (name, _) in &args.params {
        if !names.contains(&name.as_str()) {
            r.error(
                "parameter",
                format!(
                    "--{name} is not a parameter of {} (expects {})",
                    args.formula,
                    names.join(", ")
                ),
            );
        }
    }
    if let Some((name, _)) = &args.sweep {
        if !names.contains(&name.as_str()) {
            r.error(
                "parameter",
                format!("cannot sweep {name}: not a parameter of {}", args.formula),
            );
        }
    }
    let mut out = Vec::new();
    for name in names {
        let given = args
            .params
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| Real::from_rational(v));
        let swept = args.sweep.as_ref().is_some_and(|(n, _)| n == name);
        match given.or_else(|| args.formula.default_param(name)) {
            Some(v) => out.push(v),
            None if swept => out.push(Real::zero()),
            None => r.error("parameter", format!("{} needs --{name}", args.formula)),
        }
    }
    if args.precision == 0 || args.precision > MAX_PRECISION {
        r.error("parameter", format!("--precision must lie in 1..={MAX_PRECISION}"));
    }
    (r.status != Status::Invalid).then_some(out)
}

/// Evaluates a bound once, or along a sweep. Sweep rows are returned for
/// tabular output as well as being recorded in the report.
pub fn estimates(args: &EstimateArgs, r: &mut Report) -> Vec<Vec<String>> {
    r.verdict("formula", args.formula.name());
    let Some(base) = arguments(args, r) else {
        return Vec::new();
    };
    let names = args.formula.params();
    let show = |v: &Real| format_significant(&v.to_rational(), args.precision);

    let Some((param, grid)) = &args.sweep else {
        match evaluate(args.formula, &base) {
            Ok(res) => {
                r.verdict(
                    "inputs",
                    res.inputs
                        .iter()
                        .map(|(n, v)| (n.to_string(), show(v).into()))
                        .collect::<Map<_, _>>(),
                );
                r.verdict(
                    "values",
                    res.values
                        .iter()
                        .map(|(n, v)| (n.to_string(), show(v).into()))
                        .collect::<Map<_, _>>(),
                );
            }
            Err(e) => fail(r, &e),
        }
        return Vec::new();
    };

    let slot = names.iter().position(|n| n == param).expect("checked in arguments");
    let mut rows = Vec::new();
    let mut header: Vec<String> = vec![param.clone()];
    for x in grid {
        let mut point = base.clone();
        point[slot] = Real::from_rational(x);
        match evaluate(args.formula, &point) {
            Ok(res) => {
                if rows.is_empty() {
                    header.extend(res.values.iter().map(|(n, _)| n.to_string()));
                    rows.push(header.clone());
                }
                let mut row = vec![format_significant(x, args.precision)];
                row.extend(res.values.iter().map(|(_, v)| show(v)));
                rows.push(row);
            }
            Err(e) => {
                fail(r, &e);
                return Vec::new();
            }
        }
    }
    r.verdict("sweep", Value::Array(rows.iter().map(|row| ids(row.iter())).collect()));
    rows
}
