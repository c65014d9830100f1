//! Assembles converse and composition tables from the qcc enumeration.
//!
//! Every enumerated qcc is processed twice: the symbolic classifiers turn it
//! into three pairwise relation names, and independently it is realized as
//! concrete rational dipoles which the exact geometric oracle classifies.
//! The build fails on the first disagreement, so a successfully built table
//! carries a machine-checked consistency proof for all 732 320 enumerated
//! situations. Composition cells collect the third relation of every triple
//! `(r_AB, r_BC, r_AC)`; the first qcc (in the fixed enumeration order)
//! producing a triple is retained as its witness and can be dumped to and
//! reloaded from a text file.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::geom::{dra_fp_relation, random_dipoles, Angle, FName, FpName};
use crate::kernel::{BaseIx, Calculus, Registry, Relation};

use super::classify::{basic_classify, fp_extend, PAIRS};
use super::{enumerate_config, realize_qcc, CondensedError, ConfigId, Qcc};

/// A calculus plus one enumeration witness per populated composition triple.
#[derive(Clone, Debug)]
pub struct WitnessedTable {
    pub calculus: Calculus,
    pub witnesses: BTreeMap<(BaseIx, BaseIx, BaseIx), Qcc>,
}

/// Both regenerated calculi: the 72-relation one and its 80-relation
/// parallelism refinement.
#[derive(Clone, Debug)]
pub struct TableSet {
    pub f: WitnessedTable,
    pub fp: WitnessedTable,
}

/// Interns names to dense provisional ids while triples stream in; the
/// final registry order is only known after the full pass.
struct Intern<N> {
    ids: HashMap<N, u16>,
    names: Vec<String>,
}

impl<N: std::hash::Hash + Eq + Copy + ToString> Intern<N> {
    fn new() -> Intern<N> {
        Intern {
            ids: HashMap::new(),
            names: Vec::new(),
        }
    }

    fn id(&mut self, name: N) -> u16 {
        if let Some(&i) = self.ids.get(&name) {
            return i;
        }
        let i = self.names.len() as u16;
        self.ids.insert(name, i);
        self.names.push(name.to_string());
        i
    }
}

struct Accumulator<N> {
    intern: Intern<N>,
    cells: HashMap<(u16, u16), u128>,
    witnesses: HashMap<(u16, u16, u16), Qcc>,
}

impl<N: std::hash::Hash + Eq + Copy + ToString> Accumulator<N> {
    fn new() -> Accumulator<N> {
        Accumulator {
            intern: Intern::new(),
            cells: HashMap::new(),
            witnesses: HashMap::new(),
        }
    }

    fn add(&mut self, triple: [N; 3], qcc: &Qcc) {
        let ab = self.intern.id(triple[0]);
        let bc = self.intern.id(triple[1]);
        let ac = self.intern.id(triple[2]);
        *self.cells.entry((ab, bc)).or_insert(0) |= 1u128 << ac;
        self.witnesses
            .entry((ab, bc, ac))
            .or_insert_with(|| qcc.clone());
    }

    /// Finalizes into a calculus: canonical registry, converse by the name
    /// rule, composition cells from the collected triples.
    fn assemble(
        self,
        label: &str,
        expected: usize,
        converse_name: impl Fn(&str) -> String,
    ) -> Result<WitnessedTable, CondensedError> {
        let n = self.intern.names.len();
        if n != expected {
            return Err(CondensedError::Table(format!(
                "{label}: enumeration produced {n} base relations, expected {expected}"
            )));
        }
        let registry = Registry::new(self.intern.names.clone())
            .map_err(|e| CondensedError::Table(format!("{label}: {e}")))?;
        let to_base: Vec<BaseIx> = self
            .intern
            .names
            .iter()
            .map(|name| registry.lookup(name).expect("interned name registered"))
            .collect();

        let identity = registry
            .lookup("sese")
            .map_err(|e| CondensedError::Table(format!("{label}: no identity: {e}")))?;
        let mut converse = Vec::with_capacity(n);
        for b in registry.iter() {
            let conv = converse_name(registry.name(b));
            converse.push(registry.lookup(&conv).map_err(|_| {
                CondensedError::Table(format!(
                    "{label}: converse {conv} of {} is not a base relation",
                    registry.name(b)
                ))
            })?);
        }

        let mut composition = vec![Relation::EMPTY; n * n];
        for (&(a, b), &mask) in &self.cells {
            let row = to_base[a as usize].0 as usize;
            let col = to_base[b as usize].0 as usize;
            let mut members = Relation::EMPTY;
            for c in 0..n {
                if mask & (1u128 << c) != 0 {
                    members = members | Relation::singleton(to_base[c]);
                }
            }
            composition[row * n + col] = members;
        }
        if let Some(i) = composition.iter().position(|r| r.is_empty()) {
            return Err(CondensedError::Table(format!(
                "{label}: empty composition cell ({}, {})",
                registry.name(BaseIx((i / n) as u8)),
                registry.name(BaseIx((i % n) as u8)),
            )));
        }

        let calculus = Calculus::new(label, registry, identity, converse, composition)
            .map_err(|e| CondensedError::Table(format!("{label}: {e}")))?;
        let witnesses = self
            .witnesses
            .into_iter()
            .map(|((a, b, c), q)| ((to_base[a as usize], to_base[b as usize], to_base[c as usize]), q))
            .collect();
        Ok(WitnessedTable {
            calculus,
            witnesses,
        })
    }
}

/// Converse of a 4-letter name: swap the two halves.
pub fn f_converse_name(name: &str) -> String {
    let f = FName::parse(name).expect("valid base name");
    let l = f.0;
    FName([l[2], l[3], l[0], l[1]]).to_string()
}

/// Converse in the refined calculus: swap halves, flip `+`/`-` (parallel and
/// anti-parallel are symmetric and stay put).
pub fn fp_converse_name(name: &str) -> String {
    let f = FpName::parse(name).expect("valid base name");
    let l = f.letters.0;
    let angle = f.angle.map(|a| match a {
        Angle::Plus => Angle::Minus,
        Angle::Minus => Angle::Plus,
        other => other,
    });
    FpName {
        letters: FName([l[2], l[3], l[0], l[1]]),
        angle,
    }
    .to_string()
}

/// Classifies one qcc both ways and insists the results agree.
fn classify_checked(q: &Qcc) -> Result<[FpName; 3], CondensedError> {
    let base = basic_classify(q)?;
    let fine = fp_extend(q, &base)?;
    let dipoles = realize_qcc(q)?;
    let oracle = PAIRS.map(|(x, y)| dra_fp_relation(&dipoles[x], &dipoles[y]));
    if oracle != fine {
        return Err(CondensedError::OracleMismatch {
            qcc: q.encode(),
            symbolic: fine.map(|r| r.to_string()).join(" "),
            oracle: oracle.map(|r| r.to_string()).join(" "),
        });
    }
    Ok(fine)
}

/// Builds both calculi from scratch. Runs the full enumeration with the
/// oracle cross-check on every qcc; deterministic regardless of thread
/// count (accumulation follows the fixed enumeration order).
pub fn build_tables() -> Result<TableSet, CondensedError> {
    let mut acc_f: Accumulator<FName> = Accumulator::new();
    let mut acc_fp: Accumulator<FpName> = Accumulator::new();

    for id in ConfigId::ALL {
        let qccs = enumerate_config(id);
        let classified: Result<Vec<[FpName; 3]>, CondensedError> = qccs
            .par_chunks(4096)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(classify_checked)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|chunks| chunks.into_iter().flatten().collect());
        for (q, fine) in qccs.iter().zip(classified?) {
            acc_fp.add(fine, q);
            acc_f.add(fine.map(|r| r.letters), q);
        }
    }

    Ok(TableSet {
        f: acc_f.assemble("dra-f", 72, f_converse_name)?,
        fp: acc_fp.assemble("dra-fp", 80, fp_converse_name)?,
    })
}

/// The cached table set. Built on first use; the build cross-checks every
/// enumerated qcc against the exact oracle and panics on any failure, so
/// everything downstream can rely on validated tables.
pub fn tables() -> &'static TableSet {
    static TABLES: OnceLock<TableSet> = OnceLock::new();
    TABLES.get_or_init(|| build_tables().expect("table regeneration self-check"))
}

/// Serializes witnesses as `witness <ab> <bc> <ac> <qcc>` lines.
pub fn write_witnesses(table: &WitnessedTable) -> String {
    let reg = table.calculus.registry();
    let mut out = String::new();
    for (&(a, b, c), q) in &table.witnesses {
        out.push_str(&format!(
            "witness {} {} {} {}\n",
            reg.name(a),
            reg.name(b),
            reg.name(c),
            q.encode()
        ));
    }
    out
}

/// Parses the [`write_witnesses`] format against a calculus registry.
pub fn read_witnesses(
    calculus: &Calculus,
    text: &str,
) -> Result<BTreeMap<(BaseIx, BaseIx, BaseIx), Qcc>, CondensedError> {
    let reg = calculus.registry();
    let mut out = BTreeMap::new();
    for (lno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let bad = |msg: &str| CondensedError::Table(format!("witness line {}: {msg}", lno + 1));
        if parts.next() != Some("witness") {
            return Err(bad("expected `witness`"));
        }
        let mut name = || parts.next().ok_or_else(|| bad("truncated line"));
        let a = reg.lookup(name()?).map_err(|e| bad(&e.to_string()))?;
        let b = reg.lookup(name()?).map_err(|e| bad(&e.to_string()))?;
        let c = reg.lookup(name()?).map_err(|e| bad(&e.to_string()))?;
        let qcc = Qcc::decode(name()?)?;
        out.insert((a, b, c), qcc);
    }
    Ok(out)
}

/// Re-realizes every witness of the fine table and checks the oracle
/// reproduces exactly the recorded triple. Returns the number audited.
pub fn audit_fp_witnesses(table: &WitnessedTable) -> Result<usize, CondensedError> {
    audit_witnesses(table, |q| {
        let dipoles = realize_qcc(q)?;
        Ok(PAIRS.map(|(x, y)| dra_fp_relation(&dipoles[x], &dipoles[y]).to_string()))
    })
}

/// Same audit for the coarse table (names without qualifiers).
pub fn audit_f_witnesses(table: &WitnessedTable) -> Result<usize, CondensedError> {
    audit_witnesses(table, |q| {
        let dipoles = realize_qcc(q)?;
        Ok(PAIRS.map(|(x, y)| dra_fp_relation(&dipoles[x], &dipoles[y]).letters.to_string()))
    })
}

fn audit_witnesses(
    table: &WitnessedTable,
    classify: impl Fn(&Qcc) -> Result<[String; 3], CondensedError> + Sync,
) -> Result<usize, CondensedError> {
    let reg = table.calculus.registry();
    let entries: Vec<(&(BaseIx, BaseIx, BaseIx), &Qcc)> = table.witnesses.iter().collect();
    entries
        .par_iter()
        .map(|&(&(a, b, c), q)| {
            let got = classify(q)?;
            let want = [reg.name(a), reg.name(b), reg.name(c)];
            if got != want {
                return Err(CondensedError::Table(format!(
                    "witness {} realizes to ({}) instead of ({})",
                    q.encode(),
                    got.join(" "),
                    want.join(" ")
                )));
            }
            Ok(())
        })
        .collect::<Result<(), _>>()?;
    Ok(entries.len())
}

/// Random soundness audit: classifies `samples` random dipole triples with
/// the exact oracle and checks each observed `(r_AB, r_BC, r_AC)` is licensed
/// by both composition tables. Returns the number of triples checked.
pub fn audit_random_soundness(
    ts: &TableSet,
    seed: u64,
    samples: usize,
    grid: i64,
) -> Result<usize, CondensedError> {
    let dipoles = random_dipoles(seed, 3 * samples, grid);
    for chunk in dipoles.chunks_exact(3) {
        let (a, b, c) = (&chunk[0], &chunk[1], &chunk[2]);
        for (table, names) in [
            (
                &ts.fp,
                [
                    dra_fp_relation(a, b).to_string(),
                    dra_fp_relation(b, c).to_string(),
                    dra_fp_relation(a, c).to_string(),
                ],
            ),
            (
                &ts.f,
                [
                    dra_fp_relation(a, b).letters.to_string(),
                    dra_fp_relation(b, c).letters.to_string(),
                    dra_fp_relation(a, c).letters.to_string(),
                ],
            ),
        ] {
            let reg = table.calculus.registry();
            let ab = reg.lookup(&names[0]).map_err(|e| {
                CondensedError::Table(format!("oracle produced unregistered name: {e}"))
            })?;
            let bc = reg.lookup(&names[1]).map_err(|e| {
                CondensedError::Table(format!("oracle produced unregistered name: {e}"))
            })?;
            let ac = reg.lookup(&names[2]).map_err(|e| {
                CondensedError::Table(format!("oracle produced unregistered name: {e}"))
            })?;
            if !table.calculus.compose_base(ab, bc).contains(ac) {
                return Err(CondensedError::Table(format!(
                    "observed triple ({} ; {} ; {}) missing from {}",
                    names[0],
                    names[1],
                    names[2],
                    table.calculus.label()
                )));
            }
        }
    }
    Ok(samples)
}
