//! Command-line frontend for the dipole calculi.
//!
//! The binary wires the library end to end: `gen-tables` regenerates the
//! 72- and 80-relation composition tables from the condensed semantics,
//! `quotient` projects a table through a base-relation mapping, `verify` and
//! `check-algebra` audit a table file against the geometric oracle and the
//! non-associative-algebra axioms, `aclosure` / `scenarios` run the
//! constraint reasoner on network files, `census` compares closure verdicts
//! of random scenarios across the two dipole calculi, and `demo-street`
//! replays the worked street-network example.
//!
//! Exit status: 0 = success (checks pass, network consistent), 1 = an
//! inconsistency or a failed check, 2 = usage, parse, or I/O errors.
//! Everything printed to stdout is deterministic for fixed inputs, seeds and
//! thread counts; timing goes to stderr so transcripts stay byte-identical.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use dipole::condensed::tables::{
    audit_f_witnesses, audit_fp_witnesses, read_witnesses, tables, write_witnesses, WitnessedTable,
};
use dipole::kernel::{associativity_census, check_axioms, read_tables, write_tables, Calculus};
use dipole::{
    dra_f_relation, dra_fp_relation, drop_qualifier_mapping, op_mapping, opp_mapping,
    quotient_calculus, random_dipoles, scenario_census, BaseRelMapping, ClosureStatus,
    ConstraintNetwork, Dipole, SearchMode,
};

/// Anything that reaches `main` through this channel is a usage, parse, or
/// I/O problem and exits with status 2. Failed checks and inconsistent
/// networks are not errors; they report on stdout and exit with status 1.
type Failure = Box<dyn Error>;

#[derive(Parser)]
#[command(
    name = "dipole",
    version,
    about = "Dipole relation algebras: table generation, checking, constraint reasoning"
)]
struct Cli {
    /// Worker threads for generation and audits (default: all cores).
    /// Results never depend on the thread count.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    verb: Verb,
}

/// Which of the two dipole calculi a command targets.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// The 72-relation calculus.
    #[value(name = "dra-f")]
    F,
    /// The 80-relation refinement with parallelism qualifiers.
    #[value(name = "dra-fp")]
    Fp,
}

impl Kind {
    fn stem(self) -> &'static str {
        match self {
            Kind::F => "dra-f",
            Kind::Fp => "dra-fp",
        }
    }
}

/// How much of the scenario space `scenarios` explores.
#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Stop at the first scenario.
    First,
    /// Enumerate and print every scenario.
    All,
    /// Count scenarios without printing them.
    Count,
}

#[derive(Subcommand)]
enum Verb {
    /// Regenerate a composition table from the condensed semantics.
    GenTables {
        /// Which calculus to emit.
        calculus: Kind,
        /// Directory receiving `<calculus>.calc` and `<calculus>.witnesses`.
        #[arg(long, default_value = ".", value_name = "DIR")]
        out: PathBuf,
    },
    /// Project a table file through a base-relation mapping.
    Quotient {
        /// Source table file.
        spec: PathBuf,
        /// `op`, `opp`, or a mapping file of `source target` lines.
        mapping: String,
        /// Label recorded in the output table.
        #[arg(long, value_name = "NAME")]
        label: Option<String>,
        /// Output path (default: `<label>.calc` in the working directory).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check the non-associative-algebra axioms and report the
    /// associativity census of a table file.
    CheckAlgebra {
        /// Table file to check.
        spec: PathBuf,
        /// Seed for the sampled distributivity checks.
        #[arg(long, default_value_t = 0x5EED, value_name = "N")]
        seed: u64,
        /// Relation pairs sampled per distributivity law.
        #[arg(long, default_value_t = 4096, value_name = "N")]
        samples: usize,
    },
    /// Audit a dipole table file against the exact geometric oracle.
    Verify {
        /// Table file of one of the two dipole calculi.
        spec: PathBuf,
        /// Witness file from `gen-tables`; every witness must realize and
        /// re-classify to its recorded triple.
        #[arg(long, value_name = "FILE")]
        witnesses: Option<PathBuf>,
        /// Random dipole triples classified and tested for soundness.
        #[arg(long, default_value_t = 20_000, value_name = "N")]
        samples: usize,
        /// Seed for the random triples.
        #[arg(long, default_value_t = 7, value_name = "N")]
        seed: u64,
    },
    /// Refine a constraint network to algebraic closure.
    Aclosure {
        /// Table file.
        spec: PathBuf,
        /// Network file: `((A (r s) B) (B (t) C) ...)`.
        network: PathBuf,
    },
    /// Enumerate atomic, algebraically closed refinements of a network.
    Scenarios {
        /// Table file.
        spec: PathBuf,
        /// Network file.
        network: PathBuf,
        /// Search mode.
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
    },
    /// Compare closure verdicts of random atomic scenarios between the
    /// qualified calculus and its qualifier-free projection.
    Census {
        /// Table file of the 80-relation calculus.
        #[arg(long, value_name = "FILE")]
        fp: PathBuf,
        /// Table file of the 72-relation calculus.
        #[arg(long, value_name = "FILE")]
        f: PathBuf,
        /// Scenarios to draw.
        #[arg(long, default_value_t = 10_000, value_name = "N")]
        trials: u64,
        /// Largest scenario size; sizes are drawn uniformly from 1..=N.
        #[arg(long, default_value_t = 30, value_name = "N")]
        max_size: usize,
        /// Seed for the scenario stream.
        #[arg(long, default_value_t = 7, value_name = "N")]
        seed: u64,
    },
    /// Replay the street-network walkthrough: algebraic closure of the
    /// observation network, then every scenario.
    DemoStreet {
        /// Pregenerated 80-relation table file; the table is regenerated
        /// in-process when omitted.
        spec: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: --jobs {jobs}: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.verb) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(verb: Verb) -> Result<ExitCode, Failure> {
    match verb {
        Verb::GenTables { calculus, out } => gen_tables(calculus, &out),
        Verb::Quotient {
            spec,
            mapping,
            label,
            out,
        } => quotient(&spec, &mapping, label, out),
        Verb::CheckAlgebra {
            spec,
            seed,
            samples,
        } => check_algebra(&spec, seed, samples),
        Verb::Verify {
            spec,
            witnesses,
            samples,
            seed,
        } => verify(&spec, witnesses.as_deref(), samples, seed),
        Verb::Aclosure { spec, network } => aclosure(&spec, &network),
        Verb::Scenarios {
            spec,
            network,
            mode,
        } => scenarios(&spec, &network, mode),
        Verb::Census {
            fp,
            f,
            trials,
            max_size,
            seed,
        } => census(&fp, &f, trials, max_size, seed),
        Verb::DemoStreet { spec } => demo_street(spec.as_deref()),
    }
}

/// Reads a file with the path named in the error.
fn slurp(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_calculus(path: &Path) -> Result<Calculus, Failure> {
    read_tables(&slurp(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn parse_network<'c>(calc: &'c Calculus, path: &Path) -> Result<ConstraintNetwork<'c>, Failure> {
    ConstraintNetwork::parse(calc, &slurp(path)?)
        .map_err(|e| format!("{}: {e}", path.display()).into())
}

fn gen_tables(kind: Kind, out: &Path) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let ts = tables();
    let table = match kind {
        Kind::F => &ts.f,
        Kind::Fp => &ts.fp,
    };
    fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let spec_path = out.join(format!("{}.calc", kind.stem()));
    let wit_path = out.join(format!("{}.witnesses", kind.stem()));
    fs::write(&spec_path, write_tables(&table.calculus))
        .map_err(|e| format!("{}: {e}", spec_path.display()))?;
    fs::write(&wit_path, write_witnesses(table))
        .map_err(|e| format!("{}: {e}", wit_path.display()))?;
    println!(
        "wrote {} ({} base relations)",
        spec_path.display(),
        table.calculus.len()
    );
    println!(
        "wrote {} ({} witnesses)",
        wit_path.display(),
        table.witnesses.len()
    );
    eprintln!("gen-tables: {:.2?}", started.elapsed());
    Ok(ExitCode::SUCCESS)
}

fn quotient(
    spec: &Path,
    mapping: &str,
    label: Option<String>,
    out: Option<PathBuf>,
) -> Result<ExitCode, Failure> {
    let source = load_calculus(spec)?;
    let (m, default_label) = match mapping {
        "op" => (op_mapping(source.registry())?, "dra-op".to_string()),
        "opp" => (opp_mapping(source.registry())?, "dra-opp".to_string()),
        file => {
            let path = Path::new(file);
            let m = BaseRelMapping::parse(source.registry(), &slurp(path)?)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("quotient");
            (m, format!("{}-{stem}", source.label()))
        }
    };
    let label = label.unwrap_or(default_label);
    let target = quotient_calculus(&source, &m, label.as_str())?;
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{label}.calc")));
    fs::write(&out, write_tables(&target)).map_err(|e| format!("{}: {e}", out.display()))?;
    println!("wrote {} ({} base relations)", out.display(), target.len());
    Ok(ExitCode::SUCCESS)
}

fn check_algebra(spec: &Path, seed: u64, samples: usize) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let calc = load_calculus(spec)?;
    println!("{}: {} base relations", calc.label(), calc.len());
    let violations = check_axioms(&calc, seed, samples);
    if violations.is_empty() {
        println!("axioms: all hold ({samples} sampled pairs per distributivity law, seed {seed})");
    } else {
        for v in &violations {
            println!("axiom violated: {}: {}", v.axiom, v.detail);
        }
    }
    let census = associativity_census(&calc);
    println!(
        "associativity: {} failing of {} triples",
        census.failing, census.total
    );
    if let Some((a, b, c)) = census.first_failure {
        let reg = calc.registry();
        println!(
            "first failing triple: ({} {} {})",
            reg.name(a),
            reg.name(b),
            reg.name(c)
        );
    }
    eprintln!("check-algebra: {:.2?}", started.elapsed());
    Ok(if violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify(
    spec: &Path,
    witnesses: Option<&Path>,
    samples: usize,
    seed: u64,
) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let calc = load_calculus(spec)?;
    let kind = match calc.len() {
        72 => Kind::F,
        80 => Kind::Fp,
        n => {
            return Err(format!(
                "{}: expected one of the two dipole calculi (72 or 80 base relations), found {n}",
                spec.display()
            )
            .into())
        }
    };
    let mut failed = false;

    if let Some(wit_path) = witnesses {
        let table = WitnessedTable {
            witnesses: read_witnesses(&calc, &slurp(wit_path)?)
                .map_err(|e| format!("{}: {e}", wit_path.display()))?,
            calculus: calc.clone(),
        };
        let audit = match kind {
            Kind::F => audit_f_witnesses(&table),
            Kind::Fp => audit_fp_witnesses(&table),
        };
        match audit {
            Ok(n) => println!("witnesses: {n} audited, all re-classify to their entries"),
            Err(e) => {
                println!("witness audit failed: {e}");
                failed = true;
            }
        }
    }

    let classify = |x: &Dipole, y: &Dipole| match kind {
        Kind::F => dra_f_relation(x, y).to_string(),
        Kind::Fp => dra_fp_relation(x, y).to_string(),
    };
    let reg = calc.registry();
    let dipoles = random_dipoles(seed, 3 * samples, 8);
    let mut violations = 0usize;
    let mut first = None;
    for chunk in dipoles.chunks_exact(3) {
        let ab = classify(&chunk[0], &chunk[1]);
        let bc = classify(&chunk[1], &chunk[2]);
        let ac = classify(&chunk[0], &chunk[2]);
        let problem = match (reg.lookup(&ab), reg.lookup(&bc), reg.lookup(&ac)) {
            (Ok(i), Ok(j), Ok(k)) => {
                if calc.compose_base(i, j).contains(k) {
                    None
                } else {
                    Some(format!(
                        "observed triple ({ab} ; {bc} ; {ac}) missing from {}",
                        calc.label()
                    ))
                }
            }
            _ => Some(format!(
                "oracle classification ({ab} ; {bc} ; {ac}) names a relation outside the registry"
            )),
        };
        if let Some(msg) = problem {
            violations += 1;
            if first.is_none() {
                first = Some(msg);
            }
        }
    }
    if violations == 0 {
        println!("soundness: {samples} random triples, zero violations (seed {seed})");
    } else {
        println!("soundness: {violations} violations in {samples} random triples (seed {seed})");
        println!("first violation: {}", first.expect("violations imply a first"));
        failed = true;
    }
    eprintln!("verify: {:.2?}", started.elapsed());
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn aclosure(spec: &Path, network: &Path) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let calc = load_calculus(spec)?;
    let net = parse_network(&calc, network)?;
    let outcome = net.algebraic_closure();
    let code = match outcome.status {
        ClosureStatus::Closed => {
            println!("{}", outcome.network.print());
            ExitCode::SUCCESS
        }
        ClosureStatus::Inconsistent { triple: (i, k, j) } => {
            let vars: Vec<&str> = outcome.network.variables().collect();
            println!(
                "inconsistent: ({}, {}) emptied composing through {}",
                vars[i], vars[j], vars[k]
            );
            ExitCode::from(1)
        }
    };
    eprintln!("aclosure: {:.2?}", started.elapsed());
    Ok(code)
}

fn scenarios(spec: &Path, network: &Path, mode: Mode) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let calc = load_calculus(spec)?;
    let net = parse_network(&calc, network)?;
    let search = net.scenario_consistency(match mode {
        Mode::First => SearchMode::First,
        Mode::All => SearchMode::All,
        Mode::Count => SearchMode::Count,
    });
    for s in &search.scenarios {
        println!("{}", s.print());
    }
    match mode {
        Mode::First if search.count > 0 => println!("scenario found."),
        _ => println!(
            "{} scenarios found, no further scenarios exist.",
            search.count
        ),
    }
    eprintln!("scenarios: {:.2?}", started.elapsed());
    Ok(if search.count > 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn census(
    fp: &Path,
    f: &Path,
    trials: u64,
    max_size: usize,
    seed: u64,
) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let fp_calc = load_calculus(fp)?;
    let f_calc = load_calculus(f)?;
    if max_size < 3 {
        return Err("--max-size must be at least 3".into());
    }
    drop_qualifier_mapping(fp_calc.registry())
        .resolve(&f_calc)
        .map_err(|e| format!("--f table does not accept the qualifier-dropping map: {e}"))?;
    let out = scenario_census(&fp_calc, &f_calc, max_size, trials, seed);
    println!(
        "trials: {} (scenario size 1..={max_size}, seed {seed})",
        out.trials
    );
    println!("closed with qualifiers:    {}", out.fp_closed);
    println!("closed without qualifiers: {}", out.f_closed);
    println!("closed only without:       {}", out.f_only);
    println!("closed only with:          {}", out.fp_only);
    println!("coarse-only ratio: {:.4}", out.f_only_ratio());
    eprintln!("census: {:.2?}", started.elapsed());
    Ok(if out.fp_only == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// The observation network of the street walkthrough, shipped with the
/// library's fixture set.
const STREET_OBSERVATIONS: &str =
    include_str!("../../dipole/data/networks/street_observations.txt");

fn demo_street(spec: Option<&Path>) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let storage;
    let calc = match spec {
        Some(path) => {
            storage = load_calculus(path)?;
            if storage.len() != 80 {
                return Err(format!(
                    "{}: the street demo needs the 80-relation calculus, found {} base relations",
                    path.display(),
                    storage.len()
                )
                .into());
            }
            &storage
        }
        None => &tables().fp.calculus,
    };
    let net = ConstraintNetwork::parse(calc, STREET_OBSERVATIONS)
        .expect("the embedded observation network parses");
    let closure = net.algebraic_closure();
    if !closure.is_closed() {
        println!("inconsistent: the observation network admits no closure");
        return Ok(ExitCode::from(1));
    }
    println!("Modified network.");
    println!("{}", closure.network.print());
    println!();
    let search = closure.network.scenario_consistency(SearchMode::All);
    for s in &search.scenarios {
        println!("{}", s.print());
    }
    println!(
        "{} scenarios found, no further scenarios exist.",
        search.count
    );
    eprintln!("demo-street: {:.2?}", started.elapsed());
    Ok(if search.count > 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
