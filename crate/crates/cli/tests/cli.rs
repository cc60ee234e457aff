use std::path::{Path, PathBuf};

use sierpinski_cli::{run_with, CSV_HEADER, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE};

fn bench_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sierpinski").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn stats_prints_counts() {
    let (code, out, _) = run(&["stats", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "vertices=9 cells=10 empty=1 (4^n/2-2^n/2: 6)");
    assert_eq!(run(&["stats", "0"]).0, EXIT_USAGE);
}

#[test]
fn minimize_xor5() {
    let xor5 = bench_dir().join("xor5.pla");
    let (code, out, _) = run(&["minimize", p(&xor5), "--cost", "lex"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().next(), Some("terms=5 literals=5"));
}

#[test]
fn verify_reports_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let pla = dir.path().join("f.pla");
    std::fs::write(&pla, ".i 3\n.o 1\n1-- 1\n-00 1\n.e\n").unwrap();
    let wrong = dir.path().join("wrong.esop");
    std::fs::write(&wrong, ".n 3\n1--\n").unwrap();
    let (code, out, _) = run(&["verify", p(&pla), p(&wrong)]);
    assert_eq!(code, EXIT_INVALID);
    assert!(
        out.contains("INVALID") && out.contains("input 000"),
        "{out}"
    );

    let right = dir.path().join("right.esop");
    std::fs::write(&right, ".n 3\n1--\n000\n").unwrap();
    assert_eq!(run(&["verify", p(&pla), p(&right)]).0, EXIT_OK);
}

#[test]
fn error_exit_codes() {
    assert_eq!(run(&[]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    let xor5 = bench_dir().join("xor5.pla");
    assert_eq!(
        run(&["minimize", p(&xor5), "--cost", "cheap"]).0,
        EXIT_USAGE
    );
    assert_eq!(run(&["minimize", "/nonexistent/x.pla"]).0, EXIT_IO);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pla");
    std::fs::write(&bad, ".i 2\n.o 1\n1 1\n.e\n").unwrap();
    let (code, _, err) = run(&["build", p(&bad)]);
    assert_eq!(code, EXIT_IO);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn bench_empty_directory_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["bench", p(dir.path())]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, format!("{CSV_HEADER}\n"));
}

#[test]
fn bench_row_for_xor5_and_failures_in_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(bench_dir().join("xor5.pla"), dir.path().join("xor5.pla")).unwrap();
    std::fs::write(dir.path().join("broken.pla"), ".i 2\n.o 1\n111 1\n").unwrap();
    let (code, out, _) = run(&["bench", p(dir.path()), "--omit-time", "--seed", "3"]);
    assert_eq!(code, EXIT_INVALID);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines[1], "broken,-,-,-,-,-,-,error,3");
    assert_eq!(lines[2], "xor5,5,1,5,5,5,-,true,3");
}

#[test]
fn emitted_expressions_verify() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["rd53", "squar5", "z4ml", "9sym"] {
        let pla = bench_dir().join(format!("{name}.pla"));
        let emit = dir.path().join(format!("{name}.esop"));
        let (code, out, _) = run(&["minimize", p(&pla), "--iters", "300", "--emit", p(&emit)]);
        assert_eq!(code, EXIT_OK, "{name}: {out}");
        let spec = sierpinski_cli::load_pla(&pla).unwrap();
        for o in 0..spec.n_outputs {
            let file = if spec.n_outputs == 1 {
                emit.clone()
            } else {
                dir.path().join(format!("{name}.{o}.esop"))
            };
            let (code, out, _) = run(&["verify", p(&pla), p(&file), "--output", &o.to_string()]);
            assert_eq!(code, EXIT_OK, "{name} output {o}: {out}");
        }
    }
}

#[test]
fn render_writes_svg_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let pla = dir.path().join("f.pla");
    std::fs::write(&pla, ".i 3\n.o 1\n1-- 1\n-00 1\n.e\n").unwrap();
    let esop = dir.path().join("m.esop");
    std::fs::write(&esop, ".n 3\n-00\n1-1\n110\n").unwrap();
    let svg = dir.path().join("g.svg");
    let (code, _, _) = run(&[
        "render",
        p(&pla),
        "--format",
        "svg",
        "-o",
        p(&svg),
        "--marking",
        p(&esop),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<circle").count(), 27);
    assert_eq!(text.matches("class=\"marked\"").count(), 3);

    let (code, out, _) = run(&["render", p(&pla), "--triangle"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 8);
    assert_eq!(run(&["render", p(&pla), "--format", "png"]).0, EXIT_USAGE);
}

#[test]
fn gf4_pair_minimize_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let pla = dir.path().join("and.pla");
    std::fs::write(&pla, ".i 2\n.o 1\n11 1\n.e\n").unwrap();
    let prefix = dir.path().join("and");
    assert_eq!(run(&["gf4", "pair", p(&pla), "-o", p(&prefix)]).0, EXIT_OK);
    let q4 = dir.path().join("and.0.q4");
    assert_eq!(std::fs::read_to_string(&q4).unwrap(), ".v 1\n.r 4\n0001\n");

    let gfsop = dir.path().join("and.gfsop");
    let (code, out, _) = run(&["gf4", "minimize", p(&q4), "--emit", p(&gfsop)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verified=true"), "{out}");
    assert_eq!(run(&["gf4", "verify", p(&q4), p(&gfsop)]).0, EXIT_OK);

    std::fs::write(&gfsop, ".v 1\n1 : 0.1\n").unwrap();
    let (code, out, _) = run(&["gf4", "verify", p(&q4), p(&gfsop)]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.starts_with("INVALID"), "{out}");
}

#[test]
fn build_lists_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let pla = dir.path().join("f.pla");
    std::fs::write(&pla, ".i 3\n.o 1\n1-- 1\n-00 1\n.e\n").unwrap();
    let (code, out, _) = run(&["build", p(&pla), "--cells"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("output=0 n=3 minterms=5 cells=27"), "{out}");
    assert!(out.contains("(2,2,2) 1"));
}
