//! End-to-end tests running the real binary: every verb, every exit-code
//! class (0 = success, 1 = failed check or inconsistency, 2 = usage, parse,
//! or I/O error), and determinism of the emitted artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use dipole::kernel::read_tables;
use dipole::ConstraintNetwork;

const STREET_OBSERVATIONS: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../dipole/data/networks/street_observations.txt"
);
const STREET_CLOSURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../dipole/data/networks/street_closure.txt"
);
const STREET_SCENARIOS: [&str; 3] = [
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../dipole/data/networks/street_scenario_1.txt"
    ),
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../dipole/data/networks/street_scenario_2.txt"
    ),
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../dipole/data/networks/street_scenario_3.txt"
    ),
];

/// Runs the binary and returns `(exit code, stdout, stderr)`.
fn dipole(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dipole"))
        .args(args)
        .output()
        .expect("the binary runs");
    (
        out.status.code().expect("terminated by exit, not signal"),
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
    )
}

/// Directory with one generated table + witness pair per calculus, shared by
/// every test in this binary; generation runs once.
fn artifacts() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-artifacts");
        fs::create_dir_all(&dir).expect("tmpdir is writable");
        for kind in ["dra-f", "dra-fp"] {
            let (code, stdout, stderr) =
                dipole(&["gen-tables", kind, "--out", dir.to_str().unwrap()]);
            assert_eq!(code, 0, "gen-tables {kind}: {stderr}");
            assert!(stdout.contains("base relations)"), "{stdout}");
        }
        dir
    })
}

fn artifact(name: &str) -> String {
    artifacts().join(name).to_str().unwrap().to_string()
}

/// A scratch directory private to one test.
fn scratch(test: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(test);
    fs::create_dir_all(&dir).expect("tmpdir is writable");
    dir
}

#[test]
fn gen_tables_is_deterministic_across_reruns() {
    let first = artifacts();
    let again = scratch("gen-again");
    let (code, stdout, _) = dipole(&["gen-tables", "dra-f", "--out", again.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(72 base relations)"), "{stdout}");
    for name in ["dra-f.calc", "dra-f.witnesses"] {
        let a = fs::read(first.join(name)).unwrap();
        let b = fs::read(again.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
    let (code, stdout, _) = dipole(&["gen-tables", "dra-fp", "--out", again.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(80 base relations)"), "{stdout}");
    assert_eq!(
        fs::read(first.join("dra-fp.calc")).unwrap(),
        fs::read(again.join("dra-fp.calc")).unwrap()
    );
}

#[test]
fn gen_tables_rejects_an_unwritable_output_directory() {
    let (code, _, stderr) = dipole(&["gen-tables", "dra-f", "--out", "/proc/no-such-dir"]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn quotient_emits_both_oriented_point_tables_and_rejects_a_mismatched_mapping() {
    let dir = scratch("quotient");
    let op = dir.join("dra-op.calc");
    let (code, stdout, _) = dipole(&[
        "quotient",
        &artifact("dra-f.calc"),
        "op",
        "--out",
        op.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(20 base relations)"), "{stdout}");
    let table = read_tables(&fs::read_to_string(&op).unwrap()).unwrap();
    assert_eq!(table.len(), 20);
    assert_eq!(table.registry().name(table.identity()), "SAMEfront");

    let opp = dir.join("dra-opp.calc");
    let (code, stdout, _) = dipole(&[
        "quotient",
        &artifact("dra-fp.calc"),
        "opp",
        "--out",
        opp.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(28 base relations)"), "{stdout}");

    // The oriented-point-with-parallelism mapping names qualified relations
    // that the 72-relation calculus does not have.
    let (code, _, stderr) = dipole(&["quotient", &artifact("dra-f.calc"), "opp"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn check_algebra_reports_the_census_and_flags_a_corrupted_table() {
    let (code, stdout, _) = dipole(&["check-algebra", &artifact("dra-f.calc")]);
    assert_eq!(code, 0, "legitimate non-associativity is a report, not a failure");
    assert!(stdout.contains("axioms: all hold"), "{stdout}");
    assert!(
        stdout.contains("associativity: 71424 failing of 373248 triples"),
        "{stdout}"
    );

    let (code, stdout, _) = dipole(&["check-algebra", &artifact("dra-fp.calc")]);
    assert_eq!(code, 0);
    assert!(
        stdout.contains("associativity: 0 failing of 512000 triples"),
        "{stdout}"
    );

    // Redirect one converse so involution breaks: conv(lllr) := llll while
    // conv(llll) stays llll.
    let dir = scratch("corrupt-conv");
    let text = fs::read_to_string(artifacts().join("dra-f.calc")).unwrap();
    assert!(text.contains("conv lllr lrll"));
    let broken = text.replace("conv lllr lrll", "conv lllr llll");
    let path = dir.join("broken.calc");
    fs::write(&path, broken).unwrap();
    let (code, stdout, _) = dipole(&["check-algebra", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.contains("axiom violated:"), "{stdout}");
    assert!(stdout.contains("lllr"), "counterexample names the relation: {stdout}");
}

#[test]
fn verify_passes_on_generated_tables_and_fails_on_a_corrupted_witness() {
    let (code, stdout, _) = dipole(&[
        "verify",
        &artifact("dra-f.calc"),
        "--witnesses",
        &artifact("dra-f.witnesses"),
        "--samples",
        "500",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("all re-classify"), "{stdout}");
    assert!(stdout.contains("zero violations"), "{stdout}");

    // Rewriting the first witness's observed composition endpoint makes its
    // realization disagree with the recorded triple.
    let dir = scratch("corrupt-witness");
    let text = fs::read_to_string(artifacts().join("dra-f.witnesses")).unwrap();
    let first = text.lines().next().unwrap().to_string();
    let mut parts: Vec<&str> = first.split_whitespace().collect();
    let swapped = if parts[3] == "ffff" { "llll" } else { "ffff" };
    parts[3] = swapped;
    let broken = text.replacen(&first, &parts.join(" "), 1);
    let path = dir.join("broken.witnesses");
    fs::write(&path, broken).unwrap();
    let (code, stdout, _) = dipole(&[
        "verify",
        &artifact("dra-f.calc"),
        "--witnesses",
        path.to_str().unwrap(),
        "--samples",
        "1",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("witness audit failed"), "{stdout}");

    // A table that is not one of the two dipole calculi cannot be audited
    // against the dipole oracle.
    let dir = scratch("verify-op");
    let op = dir.join("dra-op.calc");
    let (code, _, _) = dipole(&[
        "quotient",
        &artifact("dra-f.calc"),
        "op",
        "--out",
        op.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, _, stderr) = dipole(&["verify", op.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("72 or 80"), "{stderr}");
}

#[test]
fn aclosure_prints_the_refined_network_and_flags_inconsistency() {
    let (code, stdout, _) = dipole(&["aclosure", &artifact("dra-fp.calc"), STREET_OBSERVATIONS]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("(("), "{stdout}");

    // sese is the identity, so A and B coincide, B and C coincide, yet A and
    // C are forced apart: closure empties a cell.
    let dir = scratch("aclosure-bad");
    let net = dir.join("contradiction.txt");
    fs::write(&net, "((A (sese) B)(B (sese) C)(A (llll+) C))").unwrap();
    let (code, stdout, _) = dipole(&["aclosure", &artifact("dra-fp.calc"), net.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.contains("inconsistent"), "{stdout}");

    let garbled = dir.join("garbled.txt");
    fs::write(&garbled, "((A (no-such-relation) B))").unwrap();
    let (code, _, stderr) = dipole(&[
        "aclosure",
        &artifact("dra-fp.calc"),
        garbled.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn scenarios_enumerates_counts_and_signals_unsatisfiability() {
    let (code, stdout, _) = dipole(&[
        "scenarios",
        &artifact("dra-fp.calc"),
        STREET_OBSERVATIONS,
        "--mode",
        "count",
    ]);
    assert_eq!(code, 0);
    assert!(
        stdout.contains("3 scenarios found, no further scenarios exist."),
        "{stdout}"
    );

    let (code, stdout, _) = dipole(&[
        "scenarios",
        &artifact("dra-fp.calc"),
        STREET_OBSERVATIONS,
        "--mode",
        "first",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("((")).count(), 1);
    assert!(stdout.contains("scenario found."), "{stdout}");

    let dir = scratch("scenarios-bad");
    let net = dir.join("contradiction.txt");
    fs::write(&net, "((A (sese) B)(B (sese) C)(A (llll+) C))").unwrap();
    let (code, stdout, _) = dipole(&[
        "scenarios",
        &artifact("dra-fp.calc"),
        net.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(
        stdout.contains("0 scenarios found, no further scenarios exist."),
        "{stdout}"
    );
}

#[test]
fn census_reports_no_qualified_only_scenarios_and_ignores_thread_count() {
    let args = [
        "census",
        "--fp",
        &artifact("dra-fp.calc"),
        "--f",
        &artifact("dra-f.calc"),
        "--trials",
        "500",
        "--max-size",
        "8",
        "--seed",
        "3",
    ];
    let (code, stdout, _) = dipole(&args);
    assert_eq!(code, 0);
    assert!(stdout.contains("closed only with:          0"), "{stdout}");

    let mut serial = args.to_vec();
    serial.extend(["--jobs", "1"]);
    let (code, serial_out, _) = dipole(&serial);
    assert_eq!(code, 0);
    assert_eq!(stdout, serial_out, "reports must not depend on --jobs");

    // Swapping the table roles cannot silently produce a census.
    let (code, _, stderr) = dipole(&[
        "census",
        "--fp",
        &artifact("dra-f.calc"),
        "--f",
        &artifact("dra-fp.calc"),
        "--trials",
        "10",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error:"), "{stderr}");
}

#[test]
fn demo_street_replays_the_walkthrough_with_matching_fact_sets() {
    let (code, stdout, _) = dipole(&["demo-street", &artifact("dra-fp.calc")]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("Modified network.\n"), "{stdout}");
    assert!(
        stdout.ends_with("3 scenarios found, no further scenarios exist.\n"),
        "{stdout}"
    );

    let calc = read_tables(&fs::read_to_string(artifacts().join("dra-fp.calc")).unwrap()).unwrap();
    let printed: Vec<ConstraintNetwork> = stdout
        .lines()
        .filter(|l| l.starts_with("(("))
        .map(|l| ConstraintNetwork::parse(&calc, l).expect("printed networks parse back"))
        .collect();
    assert_eq!(printed.len(), 4, "one closure and three scenarios");

    let closure =
        ConstraintNetwork::parse(&calc, &fs::read_to_string(STREET_CLOSURE).unwrap()).unwrap();
    assert!(printed[0].same_facts(&closure));

    let expected: Vec<ConstraintNetwork> = STREET_SCENARIOS
        .iter()
        .map(|p| ConstraintNetwork::parse(&calc, &fs::read_to_string(p).unwrap()).unwrap())
        .collect();
    let mut matched: Vec<usize> = expected
        .iter()
        .map(|want| {
            let hits: Vec<usize> = (1..4).filter(|&i| printed[i].same_facts(want)).collect();
            assert_eq!(hits.len(), 1, "each expected scenario appears exactly once");
            hits[0]
        })
        .collect();
    matched.sort_unstable();
    assert_eq!(matched, vec![1, 2, 3]);
}

#[test]
fn demo_street_rejects_a_coarse_table() {
    let (code, _, stderr) = dipole(&["demo-street", &artifact("dra-f.calc")]);
    assert_eq!(code, 2);
    assert!(stderr.contains("80-relation"), "{stderr}");
}
