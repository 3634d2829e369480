use std::io::Cursor;
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

use spherecover::{emit, parse, run, Document, InputErrorKind, Outcome};
use spherecover_testkit as kit;

fn corpus_path(name: &str) -> String {
    format!("{}/corpus/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

const CORPUS: [&str; 6] = ["power", "basilica", "levy", "two-curve", "pcf-extension", "shsr"];

fn cli(args: &[&str]) -> Outcome {
    run(
        std::iter::once("spherecover").chain(args.iter().copied()),
        &mut std::io::empty(),
    )
}

fn cli_stdin(args: &[&str], input: &str) -> Outcome {
    run(
        std::iter::once("spherecover").chain(args.iter().copied()),
        &mut Cursor::new(input.as_bytes().to_vec()),
    )
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn process_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_spherecover");
    let cases: &[(&[&str], &str, i32)] = &[
        (&["validate"], "two-curve", 0),
        (&["orbifold"], "basilica", 0),
        (&["orbifold"], "power", 1),
        (&["search"], "levy", 1),
        (&["search"], "basilica", 0),
        (&["thurston", "--multicurve", "levy"], "levy", 1),
        (&["decompose"], "power", 2),
        (&["verdict"], "two-curve", 0),
    ];
    for (args, doc, code) in cases {
        let status = Command::new(bin)
            .args(*args)
            .args(["--input", &corpus_path(doc)])
            .output()
            .unwrap()
            .status;
        assert_eq!(status.code(), Some(*code), "{args:?} on {doc}");
    }
    let status = Command::new(bin).args(["frobnicate"]).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn every_corpus_document_validates() {
    for name in CORPUS {
        let out = cli(&["validate", "--json", "--input", &corpus_path(name)]);
        assert_eq!(out.code, 0, "{name}: {}", out.stdout);
        assert_eq!(json(&out)["status"], "ok");
    }
}

#[test]
fn subcommand_exit_codes_on_the_corpus() {
    let cases: &[(&[&str], &str, i32)] = &[
        (&["orbifold"], "shsr", 0),
        (&["orbifold"], "pcf-extension", 0),
        (&["search"], "two-curve", 1),
        (&["search"], "pcf-extension", 0),
        (&["thurston", "--multicurve", "pair"], "two-curve", 1),
        (&["thurston", "--multicurve", "delta"], "two-curve", 0),
        (&["decompose"], "two-curve", 0),
        (&["extend"], "pcf-extension", 0),
        (&["extend"], "two-curve", 0),
        (&["verdict"], "pcf-extension", 0),
        (&["extend"], "levy", 2),
        (&["thurston", "--multicurve", "nope"], "levy", 2),
        (&["decompose"], "levy", 2),
    ];
    for (args, doc, code) in cases {
        let path = corpus_path(doc);
        let mut full = args.to_vec();
        full.extend(["--input", &path]);
        let out = cli(&full);
        assert_eq!(out.code, *code, "{args:?} on {doc}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn levy_search_lists_one_canonical_candidate() {
    let out = cli(&["search", "--json", "--input", &corpus_path("levy")]);
    assert_eq!(out.code, 1);
    let v = json(&out);
    assert_eq!(v["verdicts"]["canonical_candidates"], 1);
    assert_eq!(v["verdicts"]["candidates"][0]["curves"], serde_json::json!(["g"]));
    assert_eq!(v["verdicts"]["candidates"][0]["lambda"]["comparison"], "EQ");
}

#[test]
fn basilica_orbifold_is_hyperbolic_with_chi_minus_one() {
    let out = cli(&["orbifold", "--json", "--input", &corpus_path("basilica")]);
    let v = json(&out);
    assert_eq!(v["verdicts"]["orbifold"], "hyperbolic");
    assert_eq!(v["verdicts"]["chi"]["exact"], "-1");
}

#[test]
fn two_curve_verdict_is_realizable() {
    let v = json(&cli(&["verdict", "--json", "--input", &corpus_path("two-curve")]));
    assert_eq!(v["verdicts"]["realizable"], true);
    assert_eq!(v["verdicts"]["obstructions"], serde_json::json!([]));
    assert_eq!(v["verdicts"]["orbifold"], "hyperbolic");
}

#[test]
fn thin_cut_estimate() {
    let out = cli(&["estimates", "thin-cut", "--K", "1", "--K1", "1"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("0.2245539673"), "{}", out.stdout);
}

#[test]
fn estimate_domain_errors_are_invalid_input() {
    assert_eq!(cli(&["estimates", "collar", "--l", "-1"]).code, 2);
    assert_eq!(cli(&["estimates", "zeta", "--x", "1"]).code, 2);
    assert_eq!(cli(&["estimates", "zeta"]).code, 2);
    assert_eq!(cli(&["estimates", "bogus"]).code, 2);
}

#[test]
fn estimate_sweeps_print_one_row_per_point() {
    let out = cli(&["estimates", "zeta", "--sweep", "x=0.1:0.5:0.1"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 6, "{}", out.stdout);
}

#[test]
fn missing_section_is_reported() {
    let out = cli(&["decompose", "--input", &corpus_path("power")]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("standard_form"), "{}", out.stdout);
}

#[test]
fn missing_document_is_a_usage_error() {
    let out = cli(&["validate"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--input"));
}

#[test]
fn positional_path_and_stdin() {
    let a = cli(&["orbifold", "--json", &corpus_path("shsr")]);
    let b = cli_stdin(&["orbifold", "--json", "--input", "-"], &corpus_text("shsr"));
    assert_eq!(a.code, 0);
    assert_eq!(b.code, 0);
    assert_eq!(json(&a)["verdicts"], json(&b)["verdicts"]);
}

#[test]
fn corpus_round_trips_through_emit() {
    for name in CORPUS {
        let text = corpus_text(name);
        let doc = parse(&text, false).unwrap().document;
        let emitted = emit(&doc);
        assert_eq!(emitted, text, "{name} is not in canonical form");
        assert_eq!(parse(&emitted, false).unwrap().document, doc, "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let runs: &[&[&str]] = &[
        &["validate"],
        &["orbifold"],
        &["search"],
        &["decompose"],
        &["extend"],
        &["verdict"],
    ];
    for name in ["two-curve", "pcf-extension", "levy"] {
        for args in runs {
            let path = corpus_path(name);
            let mut full = vec!["--json"];
            full.extend_from_slice(args);
            full.extend(["--input", &path]);
            let first = cli(&full);
            let second = cli(&full);
            assert_eq!(first, second, "{args:?} on {name}");
        }
    }
}

#[test]
fn duplicate_curve_ids_cite_both_locations() {
    let text = corpus_text("levy").replacen(
        "\"universe\": [\n      \"g\"",
        "\"universe\": [\n      \"g\",\n      \"g\"",
        1,
    );
    let errors = parse(&text, false).unwrap_err();
    let dup = errors
        .iter()
        .find(|e| e.kind == InputErrorKind::DuplicateId)
        .expect("duplicate reported");
    assert_eq!(dup.locations.len(), 2, "{dup}");
    assert!(dup.locations[0].line > dup.locations[1].line);
    assert!(dup.to_string().contains("first declared at"));

    let out = cli_stdin(&["validate", "--json", "-"], &text);
    assert_eq!(out.code, 2);
    let v = json(&out);
    assert_eq!(v["diagnostics"][0]["rule"], "duplicate-id");
    assert!(v["diagnostics"][0]["location"].is_string());
}

#[test]
fn dangling_point_reference_has_a_location() {
    let text = corpus_text("basilica");
    let doc = parse(&text, false).unwrap().document;
    let old = format!("\"image\": \"{}\"", doc.covering.points[0].image);
    let bad = text.replacen(&old, "\"image\": \"nowhere\"", 1);
    let errors = parse(&bad, false).unwrap_err();
    assert_eq!(errors[0].kind, InputErrorKind::DanglingReference);
    let at = errors[0].locations[0];
    let line = bad.lines().nth(at.line - 1).unwrap();
    assert!(line.contains("nowhere"), "{at}: {line}");
}

#[test]
fn unknown_keys_are_errors_unless_lenient() {
    let text = corpus_text("power").replacen("\"degree\":", "\"colour\": \"red\",\n    \"degree\":", 1);
    let errors = parse(&text, false).unwrap_err();
    assert_eq!(errors[0].kind, InputErrorKind::UnknownKey);
    assert!(errors[0].message.contains("colour"));

    let parsed = parse(&text, true).unwrap();
    assert_eq!(parsed.warnings.len(), 1);
    let out = cli_stdin(&["--lenient", "validate", "--json", "-"], &text);
    assert_eq!(out.code, 0);
    assert_eq!(json(&out)["diagnostics"][0]["severity"], "warning");
    assert_eq!(cli_stdin(&["validate", "-"], &text).code, 2);
}

#[test]
fn syntax_errors_are_located() {
    let out = cli_stdin(
        &["validate", "--json", "-"],
        "{\n  \"format_version\": 1,\n  \"covering\": [\n}",
    );
    assert_eq!(out.code, 2);
    let v = json(&out);
    assert_eq!(v["diagnostics"][0]["rule"], "syntax");
    assert!(v["diagnostics"][0]["location"].as_str().unwrap().starts_with("4:"));
}

#[test]
fn unsupported_format_version_is_rejected() {
    let text = corpus_text("power").replacen("\"format_version\": 1", "\"format_version\": 7", 1);
    assert_eq!(cli_stdin(&["validate", "-"], &text).code, 2);
}

#[test]
fn schema_describes_the_document_keys() {
    let out = cli(&["schema"]);
    assert_eq!(out.code, 0);
    let schema: Value = serde_json::from_str(&out.stdout).unwrap();
    let props = schema["properties"].as_object().unwrap();
    for name in CORPUS {
        let doc: Value = serde_json::from_str(&corpus_text(name)).unwrap();
        for key in doc.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "schema lacks `{key}` used by {name}");
        }
    }
    assert_eq!(schema["additionalProperties"], false);
}

#[test]
fn text_and_json_agree_on_status() {
    for name in CORPUS {
        let path = corpus_path(name);
        let text = cli(&["orbifold", "--input", &path]);
        let v = json(&cli(&["orbifold", "--json", "--input", &path]));
        assert_eq!(
            text.code,
            v["status"].as_str().map_or(-1, |s| match s {
                "ok" => 0,
                "negative" => 1,
                _ => 2,
            })
        );
        assert!(text
            .stdout
            .contains(&format!("status: {}", v["status"].as_str().unwrap())));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_documents_round_trip(seed in any::<u64>()) {
        let (covering, table) = kit::random_document(&mut kit::rng(seed));
        let doc = Document {
            name: Some(format!("random-{seed}")),
            description: None,
            covering,
            table,
            multicurves: Vec::new(),
            standard_form: None,
            periodic_pieces: Vec::new(),
            traces: None,
        };
        let text = emit(&doc);
        let back = parse(&text, false).map_err(|e| TestCaseError::fail(e[0].to_string()))?;
        prop_assert_eq!(emit(&back.document), text);
        prop_assert_eq!(back.document.covering, doc.covering);
        prop_assert_eq!(back.document.table.canonical(), doc.table.canonical());
    }
}
