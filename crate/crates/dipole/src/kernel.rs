//! Calculus kernel: base-relation registries, bitset relations, converse and
//! composition tables, and the algebraic validators that run against them.
//!
//! A [`Calculus`] is deliberately dumb storage — the tables inside it are
//! produced elsewhere (regenerated from the condensed semantics, or derived by
//! quotient) — plus the operations a relation algebra needs: converse and
//! composition lifted to relation bitsets, the non-associative-algebra axiom
//! checks, and the exhaustive associativity census that separates the
//! 72-relation calculus (not associative) from its 80-relation refinement
//! (associative).

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::SplitMix64;

/// Errors from registry lookups, table parsing and table validation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    /// A relation name not present in the registry.
    #[error("unknown relation name: {0:?}")]
    UnknownRelation(String),
    /// A structurally invalid table file.
    #[error("table parse error: {0}")]
    Parse(String),
    /// A parsed table that is internally inconsistent.
    #[error("table validation error: {0}")]
    Validation(String),
}

/// Index of a base relation inside a registry (dense, `< Registry::len`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct BaseIx(pub u8);

/// A (possibly non-atomic) relation: a set of base relations as a bitset.
///
/// Both calculi have at most 80 base relations, so a `u128` covers either.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Relation(u128);

impl Relation {
    pub const EMPTY: Relation = Relation(0);

    pub fn singleton(b: BaseIx) -> Relation {
        Relation(1u128 << b.0)
    }

    pub fn from_bases<I: IntoIterator<Item = BaseIx>>(it: I) -> Relation {
        it.into_iter()
            .fold(Relation::EMPTY, |acc, b| acc | Relation::singleton(b))
    }

    pub fn contains(&self, b: BaseIx) -> bool {
        self.0 & (1u128 << b.0) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    /// True when the relation is a single base relation.
    pub fn is_atomic(&self) -> bool {
        self.len() == 1
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.0 & !other.0 == 0
    }

    /// Iterates the member base relations in registry order.
    pub fn iter(&self) -> impl Iterator<Item = BaseIx> + '_ {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let ix = bits.trailing_zeros() as u8;
                bits &= bits - 1;
                Some(BaseIx(ix))
            }
        })
    }

    pub fn bits(&self) -> u128 {
        self.0
    }

    pub fn from_bits(bits: u128) -> Relation {
        Relation(bits)
    }
}

impl std::ops::BitOr for Relation {
    type Output = Relation;
    fn bitor(self, rhs: Relation) -> Relation {
        Relation(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for Relation {
    fn bitor_assign(&mut self, rhs: Relation) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for Relation {
    type Output = Relation;
    fn bitand(self, rhs: Relation) -> Relation {
        Relation(self.0 & rhs.0)
    }
}

impl std::ops::BitAndAssign for Relation {
    fn bitand_assign(&mut self, rhs: Relation) {
        self.0 &= rhs.0;
    }
}

impl std::ops::Sub for Relation {
    type Output = Relation;
    fn sub(self, rhs: Relation) -> Relation {
        Relation(self.0 & !rhs.0)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation[{:#x}]", self.0)
    }
}

/// Rank of a name character in the canonical ordering of base relation names.
///
/// The seven point-position letters come first in their conventional order,
/// then the four angle qualifiers; oriented-point names (uppercase compounds)
/// fall back to byte order after all of these.
fn char_rank(c: char) -> u32 {
    match c {
        'l' => 0,
        'r' => 1,
        'b' => 2,
        's' => 3,
        'i' => 4,
        'e' => 5,
        'f' => 6,
        '+' => 7,
        '-' => 8,
        'P' => 9,
        'A' => 10,
        _ => 20 + c as u32,
    }
}

fn name_key(name: &str) -> Vec<u32> {
    name.chars().map(char_rank).collect()
}

/// Sorts base relation names into the canonical registry order.
pub fn canonical_sort(names: &mut Vec<String>) {
    names.sort_by(|a, b| name_key(a).cmp(&name_key(b)));
}

/// An ordered registry of base relation names with case-insensitive lookup.
#[derive(Clone, Debug)]
pub struct Registry {
    names: Vec<String>,
    by_name: HashMap<String, BaseIx>,
}

impl Registry {
    /// Builds a registry from names, sorting them canonically first.
    /// Duplicate names (case-insensitively) are rejected.
    pub fn new(mut names: Vec<String>) -> Result<Registry, KernelError> {
        assert!(names.len() <= 128, "registry exceeds bitset width");
        canonical_sort(&mut names);
        let mut by_name = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if by_name
                .insert(n.to_ascii_lowercase(), BaseIx(i as u8))
                .is_some()
            {
                return Err(KernelError::Validation(format!(
                    "duplicate relation name {n:?}"
                )));
            }
        }
        Ok(Registry { names, by_name })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, b: BaseIx) -> &str {
        &self.names[b.0 as usize]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }

    /// Case-insensitive lookup (the literature prints the same names in
    /// either case).
    pub fn lookup(&self, name: &str) -> Result<BaseIx, KernelError> {
        self.by_name
            .get(&name.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| KernelError::UnknownRelation(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = BaseIx> {
        (0..self.len() as u8).map(BaseIx)
    }
}

/// A finite relation algebra presentation: registry, identity element,
/// converse table, and weak composition table over base relations.
#[derive(Clone, Debug)]
pub struct Calculus {
    label: String,
    registry: Registry,
    identity: BaseIx,
    converse: Vec<BaseIx>,
    composition: Vec<Relation>, // row-major: [b1 * n + b2]
}

impl Calculus {
    pub fn new(
        label: impl Into<String>,
        registry: Registry,
        identity: BaseIx,
        converse: Vec<BaseIx>,
        composition: Vec<Relation>,
    ) -> Result<Calculus, KernelError> {
        let n = registry.len();
        if converse.len() != n {
            return Err(KernelError::Validation(format!(
                "converse table has {} entries for {} relations",
                converse.len(),
                n
            )));
        }
        if composition.len() != n * n {
            return Err(KernelError::Validation(format!(
                "composition table has {} entries for {} relations",
                composition.len(),
                n
            )));
        }
        let universe = if n == 128 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        };
        for r in &composition {
            if r.bits() & !universe != 0 {
                return Err(KernelError::Validation(
                    "composition entry mentions out-of-range base relation".into(),
                ));
            }
        }
        Ok(Calculus {
            label: label.into(),
            registry,
            identity,
            converse,
            composition,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.registry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registry.is_empty()
    }

    pub fn identity(&self) -> BaseIx {
        self.identity
    }

    /// The universal relation (all base relations).
    pub fn universal(&self) -> Relation {
        let n = self.len();
        if n == 128 {
            Relation::from_bits(u128::MAX)
        } else {
            Relation::from_bits((1u128 << n) - 1)
        }
    }

    pub fn complement(&self, r: Relation) -> Relation {
        self.universal() - r
    }

    pub fn converse_base(&self, b: BaseIx) -> BaseIx {
        self.converse[b.0 as usize]
    }

    pub fn converse(&self, r: Relation) -> Relation {
        Relation::from_bases(r.iter().map(|b| self.converse_base(b)))
    }

    pub fn compose_base(&self, a: BaseIx, b: BaseIx) -> Relation {
        self.composition[a.0 as usize * self.len() + b.0 as usize]
    }

    pub fn compose(&self, a: Relation, b: Relation) -> Relation {
        let mut out = Relation::EMPTY;
        for x in a.iter() {
            for y in b.iter() {
                out |= self.compose_base(x, y);
            }
        }
        out
    }

    /// Parses a relation given either as a single base name or as a
    /// whitespace-separated list (optionally wrapped in `(...)` or `{...}`).
    pub fn parse_relation(&self, text: &str) -> Result<Relation, KernelError> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .or_else(|| inner.strip_prefix('{').and_then(|s| s.strip_suffix('}')))
            .unwrap_or(inner);
        let mut rel = Relation::EMPTY;
        let mut any = false;
        for tok in inner.split_whitespace() {
            rel |= Relation::singleton(self.registry.lookup(tok)?);
            any = true;
        }
        if !any {
            return Err(KernelError::Parse(format!(
                "empty relation in {text:?}"
            )));
        }
        Ok(rel)
    }

    /// Renders a relation as its member names in registry order, separated by
    /// single spaces (no brackets).
    pub fn format_relation(&self, r: Relation) -> String {
        let mut out = String::new();
        for b in r.iter() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(self.registry.name(b));
        }
        out
    }
}

/// The axioms of a non-associative relation algebra checked over a table set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axiom {
    /// (a) `conv(conv(a)) = a`
    ConverseInvolution,
    /// (b) `id ; a = a ; id = a`
    IdentityLaw,
    /// (c) `a ; (b + c) = a;b + a;c`
    CompositionAdditivity,
    /// (d) `conv(a + b) = conv(a) + conv(b)`
    ConverseAdditivity,
    /// (e) `conv(a - b) = conv(a) - conv(b)`
    ConverseDifference,
    /// (f) `conv(a ; b) = conv(b) ; conv(a)`
    ConverseOfComposition,
    /// (g) `(a;b) . conv(c) = 0  iff  (b;c) . conv(a) = 0` (Peirce triangles)
    PeirceLaw,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::ConverseInvolution => "converse involution",
            Axiom::IdentityLaw => "identity law",
            Axiom::CompositionAdditivity => "composition distributes over union",
            Axiom::ConverseAdditivity => "converse distributes over union",
            Axiom::ConverseDifference => "converse distributes over difference",
            Axiom::ConverseOfComposition => "converse of a composition",
            Axiom::PeirceLaw => "Peirce triangle law",
        };
        f.write_str(s)
    }
}

/// A concrete witness that an axiom fails.
#[derive(Clone, Debug)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub detail: String,
}

/// Checks axioms (a)-(g). Atom-level laws — involution, identity, converse of
/// composition, Peirce — are verified exhaustively; the distributivity laws
/// quantify over arbitrary relations, so they are verified on `samples`
/// seeded random relation pairs (they hold by construction for the bitset
/// lift, and the sampled check guards the lift itself).
pub fn check_axioms(calc: &Calculus, seed: u64, samples: usize) -> Vec<AxiomViolation> {
    let mut out = Vec::new();
    let n = calc.len();

    for a in calc.registry.iter() {
        let cc = calc.converse_base(calc.converse_base(a));
        if cc != a {
            out.push(AxiomViolation {
                axiom: Axiom::ConverseInvolution,
                detail: format!(
                    "conv(conv({})) = {}",
                    calc.registry.name(a),
                    calc.registry.name(cc)
                ),
            });
        }
        let sa = Relation::singleton(a);
        let left = calc.compose_base(calc.identity, a);
        let right = calc.compose_base(a, calc.identity);
        if left != sa || right != sa {
            out.push(AxiomViolation {
                axiom: Axiom::IdentityLaw,
                detail: format!(
                    "id;{a} = ({}), {a};id = ({})",
                    calc.format_relation(left),
                    calc.format_relation(right),
                    a = calc.registry.name(a),
                ),
            });
        }
    }

    for a in calc.registry.iter() {
        for b in calc.registry.iter() {
            let lhs = calc.converse(calc.compose_base(a, b));
            let rhs = calc.compose_base(calc.converse_base(b), calc.converse_base(a));
            if lhs != rhs {
                out.push(AxiomViolation {
                    axiom: Axiom::ConverseOfComposition,
                    detail: format!(
                        "conv({};{}) = ({}) but conv;conv = ({})",
                        calc.registry.name(a),
                        calc.registry.name(b),
                        calc.format_relation(lhs),
                        calc.format_relation(rhs)
                    ),
                });
            }
        }
    }

    // Peirce triangles over atoms: conv(c) in a;b  iff  conv(a) in b;c.
    'peirce: for a in calc.registry.iter() {
        for b in calc.registry.iter() {
            let ab = calc.compose_base(a, b);
            for c in calc.registry.iter() {
                let lhs = ab.contains(calc.converse_base(c));
                let rhs = calc.compose_base(b, c).contains(calc.converse_base(a));
                if lhs != rhs {
                    out.push(AxiomViolation {
                        axiom: Axiom::PeirceLaw,
                        detail: format!(
                            "a={}, b={}, c={}: conv(c) in a;b is {lhs}, conv(a) in b;c is {rhs}",
                            calc.registry.name(a),
                            calc.registry.name(b),
                            calc.registry.name(c)
                        ),
                    });
                    if out.len() > 32 {
                        break 'peirce; // enough witnesses to be conclusive
                    }
                }
            }
        }
    }

    let mut rng = SplitMix64::new(seed);
    let universe = calc.universal().bits();
    let rand_rel = |rng: &mut SplitMix64| {
        let lo = rng.next_u64() as u128;
        let hi = (rng.next_u64() as u128) << 64;
        Relation::from_bits((hi | lo) & universe)
    };
    for _ in 0..samples {
        let a = rand_rel(&mut rng);
        let b = rand_rel(&mut rng);
        let c = rand_rel(&mut rng);
        if calc.compose(a, b | c) != calc.compose(a, b) | calc.compose(a, c) {
            out.push(AxiomViolation {
                axiom: Axiom::CompositionAdditivity,
                detail: format!("a={a:?}, b={b:?}, c={c:?}"),
            });
        }
        if calc.converse(a | b) != calc.converse(a) | calc.converse(b) {
            out.push(AxiomViolation {
                axiom: Axiom::ConverseAdditivity,
                detail: format!("a={a:?}, b={b:?}"),
            });
        }
        if calc.converse(a - b) != calc.converse(a) - calc.converse(b) {
            out.push(AxiomViolation {
                axiom: Axiom::ConverseDifference,
                detail: format!("a={a:?}, b={b:?}"),
            });
        }
        if n == 0 {
            break;
        }
    }

    out
}

/// Result of the exhaustive associativity census over base-relation triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociativityCensus {
    pub total: u64,
    pub failing: u64,
    /// First failing triple in registry order, if any.
    pub first_failure: Option<(BaseIx, BaseIx, BaseIx)>,
}

impl AssociativityCensus {
    pub fn is_associative(&self) -> bool {
        self.failing == 0
    }
}

/// Counts base triples `(a, b, c)` with `(a;b);c != a;(b;c)` (as unions of
/// base relations). Exhaustive over all `n^3` triples; rows are scanned in
/// parallel and merged in registry order so the first failure is
/// deterministic.
pub fn associativity_census(calc: &Calculus) -> AssociativityCensus {
    let rows: Vec<(u64, Option<(BaseIx, BaseIx, BaseIx)>)> = calc
        .registry
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| {
            let mut failing = 0u64;
            let mut first = None;
            for b in calc.registry.iter() {
                let ab = calc.compose_base(a, b);
                for c in calc.registry.iter() {
                    let lhs = calc.compose(ab, Relation::singleton(c));
                    let rhs = calc.compose(Relation::singleton(a), calc.compose_base(b, c));
                    if lhs != rhs {
                        failing += 1;
                        if first.is_none() {
                            first = Some((a, b, c));
                        }
                    }
                }
            }
            (failing, first)
        })
        .collect();

    let n = calc.len() as u64;
    let mut census = AssociativityCensus {
        total: n * n * n,
        failing: 0,
        first_failure: None,
    };
    for (failing, first) in rows {
        census.failing += failing;
        if census.first_failure.is_none() {
            census.first_failure = first;
        }
    }
    census
}

/// Serializes a calculus to a line-oriented text form:
///
/// ```text
/// calculus <label>
/// relations <n>
/// names <name-1> ... <name-n>
/// identity <name>
/// conv <name> <name>           # n lines
/// comp <name> <name> <members...>  # n*n lines
/// ```
pub fn write_tables(calc: &Calculus) -> String {
    let mut out = String::new();
    out.push_str(&format!("calculus {}\n", calc.label));
    out.push_str(&format!("relations {}\n", calc.len()));
    out.push_str("names");
    for n in calc.registry.names() {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
    out.push_str(&format!(
        "identity {}\n",
        calc.registry.name(calc.identity)
    ));
    for b in calc.registry.iter() {
        out.push_str(&format!(
            "conv {} {}\n",
            calc.registry.name(b),
            calc.registry.name(calc.converse_base(b))
        ));
    }
    for a in calc.registry.iter() {
        for b in calc.registry.iter() {
            out.push_str(&format!(
                "comp {} {} {}\n",
                calc.registry.name(a),
                calc.registry.name(b),
                calc.format_relation(calc.compose_base(a, b))
            ));
        }
    }
    out
}

/// Parses the format produced by [`write_tables`].
pub fn read_tables(text: &str) -> Result<Calculus, KernelError> {
    let mut label = None;
    let mut count = None;
    let mut names: Option<Vec<String>> = None;
    let mut identity_name = None;
    let mut conv_pairs = Vec::new();
    let mut comp_lines = Vec::new();

    for (lno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        let bad = |msg: &str| KernelError::Parse(format!("line {}: {}", lno + 1, msg));
        match head {
            "calculus" => label = Some(rest.join(" ")),
            "relations" => {
                count = Some(
                    rest.first()
                        .ok_or_else(|| bad("missing count"))?
                        .parse::<usize>()
                        .map_err(|_| bad("bad count"))?,
                )
            }
            "names" => names = Some(rest.iter().map(|s| s.to_string()).collect()),
            "identity" => {
                identity_name = Some(
                    rest.first()
                        .ok_or_else(|| bad("missing identity name"))?
                        .to_string(),
                )
            }
            "conv" => {
                if rest.len() != 2 {
                    return Err(bad("conv needs exactly two names"));
                }
                conv_pairs.push((rest[0].to_string(), rest[1].to_string()));
            }
            "comp" => {
                if rest.len() < 2 {
                    return Err(bad("comp needs two names plus members"));
                }
                comp_lines.push((
                    rest[0].to_string(),
                    rest[1].to_string(),
                    rest[2..].iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                ));
            }
            other => return Err(bad(&format!("unknown directive {other:?}"))),
        }
    }

    let label = label.ok_or_else(|| KernelError::Parse("missing calculus line".into()))?;
    let names = names.ok_or_else(|| KernelError::Parse("missing names line".into()))?;
    if let Some(c) = count {
        if c != names.len() {
            return Err(KernelError::Validation(format!(
                "relations line says {} but {} names given",
                c,
                names.len()
            )));
        }
    }
    let registry = Registry::new(names)?;
    let identity = registry.lookup(
        &identity_name.ok_or_else(|| KernelError::Parse("missing identity line".into()))?,
    )?;

    let n = registry.len();
    let mut converse = vec![None; n];
    for (a, b) in conv_pairs {
        let a = registry.lookup(&a)?;
        converse[a.0 as usize] = Some(registry.lookup(&b)?);
    }
    let converse: Vec<BaseIx> = converse
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                KernelError::Validation(format!("missing conv line for {}", registry.name(BaseIx(i as u8))))
            })
        })
        .collect::<Result<_, _>>()?;

    let mut composition = vec![None; n * n];
    for (a, b, members) in comp_lines {
        let a = registry.lookup(&a)?;
        let b = registry.lookup(&b)?;
        let mut rel = Relation::EMPTY;
        for m in members {
            rel |= Relation::singleton(registry.lookup(&m)?);
        }
        composition[a.0 as usize * n + b.0 as usize] = Some(rel);
    }
    let composition: Vec<Relation> = composition
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                KernelError::Validation(format!(
                    "missing comp line for pair ({}, {})",
                    registry.name(BaseIx((i / n) as u8)),
                    registry.name(BaseIx((i % n) as u8))
                ))
            })
        })
        .collect::<Result<_, _>>()?;

    Calculus::new(label, registry, identity, converse, composition)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The point algebra over {<, =, >}: a tiny associative relation algebra
    /// that exercises every kernel code path with hand-checkable tables.
    fn point_algebra() -> Calculus {
        let registry =
            Registry::new(vec!["lt".into(), "eq".into(), "gt".into()]).unwrap();
        let ix = |n: &str| registry.lookup(n).unwrap();
        let (lt, eq, gt) = (ix("lt"), ix("eq"), ix("gt"));
        let n = registry.len();
        let mut conv = vec![eq; n];
        conv[lt.0 as usize] = gt;
        conv[gt.0 as usize] = lt;
        conv[eq.0 as usize] = eq;
        let all = Relation::from_bases([lt, eq, gt]);
        let mut comp = vec![Relation::EMPTY; n * n];
        let mut set = |a: BaseIx, b: BaseIx, r: Relation| comp[a.0 as usize * n + b.0 as usize] = r;
        set(lt, lt, Relation::singleton(lt));
        set(lt, eq, Relation::singleton(lt));
        set(lt, gt, all);
        set(eq, lt, Relation::singleton(lt));
        set(eq, eq, Relation::singleton(eq));
        set(eq, gt, Relation::singleton(gt));
        set(gt, lt, all);
        set(gt, eq, Relation::singleton(gt));
        set(gt, gt, Relation::singleton(gt));
        Calculus::new("points", registry, eq, conv, comp).unwrap()
    }

    #[test]
    fn point_algebra_satisfies_all_axioms() {
        let calc = point_algebra();
        let violations = check_axioms(&calc, 7, 200);
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn point_algebra_is_associative() {
        let census = associativity_census(&point_algebra());
        assert_eq!(census.total, 27);
        assert_eq!(census.failing, 0);
        assert!(census.is_associative());
    }

    #[test]
    fn broken_identity_is_reported() {
        let calc = point_algebra();
        let mut composition: Vec<Relation> = (0..9)
            .map(|i| calc.compose_base(BaseIx(i / 3), BaseIx(i % 3)))
            .collect();
        // Corrupt id;lt.
        let eq = calc.registry().lookup("eq").unwrap();
        let lt = calc.registry().lookup("lt").unwrap();
        composition[eq.0 as usize * 3 + lt.0 as usize] = calc.universal();
        let broken = Calculus::new(
            "broken",
            calc.registry().clone(),
            eq,
            (0..3).map(|i| calc.converse_base(BaseIx(i))).collect(),
            composition,
        )
        .unwrap();
        let violations = check_axioms(&broken, 7, 0);
        assert!(violations
            .iter()
            .any(|v| v.axiom == Axiom::IdentityLaw && v.detail.contains("lt")));
    }

    #[test]
    fn relation_parsing_accepts_names_lists_and_brackets() {
        let calc = point_algebra();
        let lt = Relation::singleton(calc.registry().lookup("lt").unwrap());
        let both = lt | Relation::singleton(calc.registry().lookup("eq").unwrap());
        assert_eq!(calc.parse_relation("lt").unwrap(), lt);
        assert_eq!(calc.parse_relation("LT").unwrap(), lt);
        assert_eq!(calc.parse_relation("(lt eq)").unwrap(), both);
        assert_eq!(calc.parse_relation("{eq lt}").unwrap(), both);
        assert!(matches!(
            calc.parse_relation("leq"),
            Err(KernelError::UnknownRelation(_))
        ));
        assert!(matches!(
            calc.parse_relation("()"),
            Err(KernelError::Parse(_))
        ));
    }

    #[test]
    fn tables_round_trip_through_text() {
        let calc = point_algebra();
        let text = write_tables(&calc);
        let back = read_tables(&text).unwrap();
        assert_eq!(back.label(), calc.label());
        assert_eq!(back.len(), calc.len());
        for a in calc.registry().iter() {
            assert_eq!(
                back.registry().name(a),
                calc.registry().name(a),
                "registry order must survive the round trip"
            );
            assert_eq!(back.converse_base(a), calc.converse_base(a));
            for b in calc.registry().iter() {
                assert_eq!(back.compose_base(a, b), calc.compose_base(a, b));
            }
        }
        assert_eq!(write_tables(&back), text);
    }

    #[test]
    fn canonical_name_order_is_letters_then_qualifiers() {
        let mut names = vec![
            "rrll+".to_string(),
            "llll-".to_string(),
            "lllb".to_string(),
            "llllA".to_string(),
            "llll+".to_string(),
            "sese".to_string(),
        ];
        canonical_sort(&mut names);
        assert_eq!(
            names,
            vec!["llll+", "llll-", "llllA", "lllb", "rrll+", "sese"]
        );
    }
}
