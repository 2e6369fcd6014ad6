use std::io::Write;
use std::process::{Command, Stdio};

use tamegrade::automorphism::random_tame;
use tamegrade::parse::parse_map;
use tamegrade::{QMap, Rational};
use tamegrade_cli::{parse_inline, run, MapDocument, NamedMap, Outcome};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("tamegrade").chain(args.iter().copied()))
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classify_reports_the_wild_admitting_decomposition() {
    let out = cli(&["classify", "7", "2", "-3"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "WildAdmitting: 7 = 2·2 + 1·3, q̂ = 2\n");
}

#[test]
fn classify_json_carries_the_verdict() {
    let out = cli(&["--json", "classify", "5", "2", "-3"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "TameOnly");
}

#[test]
fn witness_output_is_certified_wild() {
    let dir = tempfile::tempdir().unwrap();
    let w = cli(&["witness", "7", "2", "-3"]);
    assert_eq!(w.code, 0);
    let path = write_temp(&dir, "witness.txt", &w.stdout);
    let out = cli(&["certify-wild", "--grading=7,2,-3", &path]);
    assert_eq!(out.code, 4, "{out:?}");
    assert_eq!(out.stdout, "CertifiedWild: term -2*u^2*v of degree 3 < 5\n");
    // the space-separated flag form takes the same weights
    assert_eq!(cli(&["certify-wild", "--grading", "7,2,-3", &path]).code, 4);
    // and decompose refuses it with the same verdict
    assert_eq!(cli(&["decompose", "--grading=7,2,-3", &path]).code, 4);
}

#[test]
fn witness_json_is_a_map_document_with_its_grading() {
    let dir = tempfile::tempdir().unwrap();
    let w = cli(&["--json", "witness", "7", "2", "-3"]);
    let path = write_temp(&dir, "witness.json", &w.stdout);
    // the document carries its grading, so no flag is needed
    let out = cli(&["--json", "certify-wild", &path]);
    assert_eq!(out.code, 4);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["degree"], 3);
    assert_eq!(v["bound"], 5);
}

#[test]
fn plane_decomposition_replays_through_compose() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..10 {
        let (m, _) = random_tame::<Rational>(2, 4, 3, 3, seed);
        let input = m.fmt_with(&["x", "y"]);
        let dec = cli(&["decompose", &input]);
        assert_eq!(dec.code, 0, "{dec:?}");
        let path = write_temp(&dir, &format!("chain{seed}.txt"), &dec.stdout);
        let replay = cli(&["compose", &path]);
        assert_eq!(replay.code, 0);
        assert_eq!(replay.stdout, format!("{input}\n"));
        // the JSON factor list replays too
        let dec = cli(&["--json", "decompose", &input]);
        let path = write_temp(&dir, &format!("chain{seed}.json"), &dec.stdout);
        assert_eq!(cli(&["compose", &path]).stdout, format!("{input}\n"));
    }
}

#[test]
fn graded_decomposition_replays_through_compose() {
    let dir = tempfile::tempdir().unwrap();
    let composed = cli(&[
        "compose",
        "(x + 2*y^4*z, y, z)",
        "(x, y + x*z, z)",
        "(x - y^4*z, y, z)",
    ]);
    let input = composed.stdout.trim().to_string();
    let dec = cli(&["decompose", "--grading=5,2,-3", &input]);
    assert_eq!(dec.code, 0, "{dec:?}");
    let path = write_temp(&dir, "chain.txt", &dec.stdout);
    assert_eq!(cli(&["compose", &path]).stdout.trim(), input);
}

#[test]
fn graded_plane_decomposition() {
    let out = cli(&["decompose", "--grading", "2,1", "(x + y^2, y)"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("(y^2 + x, y)"));
    assert_eq!(
        cli(&["decompose", "--grading", "1,1", "(x + y^2, y)"]).code,
        2
    );
    // y^2 has weight 0 = 2 modulo 2
    assert_eq!(
        cli(&["decompose", "--grading=1,1", "--modulus=1", "(x + y^2, y)"]).code,
        0
    );
}

#[test]
fn exit_codes_for_each_failure_class() {
    assert_eq!(cli(&["verify", "(x^2 + y^2, y)"]).code, 1);
    assert_eq!(cli(&["decompose", "(x^2 + y, x)"]).code, 0);
    assert_eq!(cli(&["decompose", "(x + y^2, y"]).code, 64);
    assert_eq!(cli(&["decompose", "(x + 2y, y)"]).code, 64);
    assert_eq!(cli(&["decompose", "(x + w, y)"]).code, 64);
    assert_eq!(cli(&["lift", "--grading=7,2,-3", "(u + v^2, v)"]).code, 3);
    assert_eq!(cli(&["lift", "--grading=7,2,-3", "(u + v^3, v)"]).code, 2);
    assert_eq!(cli(&["example", "no-such-map"]).code, 64);
    assert_eq!(cli(&["classify", "1", "2"]).code, 64);
    assert_eq!(cli(&["frobnicate"]).code, 64);
    let help = cli(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("decompose"));
}

#[test]
fn lift_then_restrict_is_the_identity() {
    let plane = "(u + 3*v^5, v)";
    let lifted = cli(&["lift", "--grading=7,2,-3", plane]);
    assert_eq!(lifted.code, 0);
    assert_eq!(lifted.stdout, "(3*y^5*z + x, y, z)\n");
    let back = cli(&["restrict", "--grading=7,2,-3", lifted.stdout.trim()]);
    assert_eq!(back.code, 0);
    let expected = parse_map::<Rational>(plane, &["u", "v"]).unwrap();
    assert_eq!(parse_inline(back.stdout.trim()).unwrap().map, expected);
}

#[test]
fn nagata_checks() {
    let dir = tempfile::tempdir().unwrap();
    let n = write_temp(&dir, "n.txt", &cli(&["example", "nagata"]).stdout);
    let ni = write_temp(&dir, "ni.txt", &cli(&["example", "nagata-inverse"]).stdout);
    assert_eq!(cli(&["verify", &n, "--inverse", &ni]).code, 0);
    assert_eq!(cli(&["verify", &n, "--inverse", &n]).code, 1);
    assert_eq!(cli(&["compose", &n, &ni]).stdout, "(x, y, z)\n");
    // a constant Jacobian alone does not settle it
    assert_eq!(cli(&["verify", &n]).code, 5);
}

#[test]
fn invert_inverts() {
    let out = cli(&["invert", "(x + y^2, y)"]);
    assert_eq!(out.stdout, "(-y^2 + x, y)\n");
    let out = cli(&["invert", "(2*x + y, x + y, z)"]);
    assert_eq!(out.code, 0);
    assert_eq!(
        cli(&["compose", "(2*x + y, x + y, z)", out.stdout.trim()]).stdout,
        "(x, y, z)\n"
    );
}

#[test]
fn polygon_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let out = cli(&["polygon", "x^3 + x*y^2 + y", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("area: 7/2"));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
}

#[test]
fn decompose_trace_svg_has_one_group_per_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("trace.svg");
    let out = cli(&[
        "decompose",
        "(x + (y + x^2)^3, y + x^2)",
        "--trace-svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    // two reductions, then the linear base case
    assert_eq!(text.matches("<g id=\"step-").count(), 3);
}

#[test]
fn json_documents_round_trip() {
    let names = [
        "nagata",
        "nagata-inverse",
        "identity2",
        "identity3",
        "witness(7,2,3)",
        "witness(3,1,1)",
    ];
    for name in names {
        let out = cli(&["--json", "example", name]);
        assert_eq!(out.code, 0, "{name}");
        let doc: MapDocument = serde_json::from_str(&out.stdout).unwrap();
        let parsed = NamedMap::from_document(&doc).unwrap();
        assert_eq!(parsed.document(), doc, "{name}");
    }
    for seed in 0..20 {
        let (m, _) = random_tame::<Rational>(2, 3, 3, 3, seed);
        let doc = NamedMap::new(m.clone(), None).document();
        let text = serde_json::to_string(&doc).unwrap();
        let back: MapDocument = serde_json::from_str(&text).unwrap();
        let parsed = NamedMap::from_document(&back).unwrap();
        assert_eq!(parsed.map, m);
        assert_eq!(parsed.document(), doc);
    }
}

#[test]
fn text_output_is_canonical() {
    // equal maps written differently print identically
    let a = cli(&["compose", "(y + x, x)"]).stdout;
    let b = cli(&["compose", "( x+y , x )"]).stdout;
    assert_eq!(a, b);
    let m: QMap = parse_map("(x + y, x)", &["x", "y"]).unwrap();
    assert_eq!(a.trim(), m.fmt_with(&["x", "y"]));
}

#[test]
fn binary_reads_standard_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tamegrade"))
        .args(["decompose", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"(x + y^2, y)\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("(y^2 + x, y)"));

    let status = Command::new(env!("CARGO_BIN_EXE_tamegrade"))
        .args(["verify", "(x^2, y)"])
        .stdout(Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}
