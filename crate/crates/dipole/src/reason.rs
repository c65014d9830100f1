//! Constraint networks over a calculus: parsing, algebraic closure, and
//! exhaustive scenario search.
//!
//! A network assigns a relation to every ordered pair of variables, kept
//! converse-consistent ( `c[j][i] = conv(c[i][j])` ) with identity on the
//! diagonal. [`ConstraintNetwork::algebraic_closure`] propagates
//! `c[i][j] ← c[i][j] ∩ c[i][k];c[k][j]` to the greatest fixpoint with a
//! pair worklist; an emptied cell witnesses inconsistency. Because the
//! calculi only have weak composition, a closed network — even an atomic
//! one — need not be satisfiable; closure is a sound refutation filter,
//! not a decision procedure. [`ConstraintNetwork::scenario_consistency`]
//! enumerates all algebraically closed atomic refinements by depth-first
//! search with closure pruning, branching on a smallest non-atomic cell.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::kernel::{Calculus, Relation};
use crate::quotient::{image_rel, BaseRelMapping, QuotientError};

/// Errors from network construction and parsing. The uppercase prefixes are
/// stable machine-readable codes surfaced on the command line.
#[derive(Debug, Error)]
pub enum ReasonError {
    #[error("PARSE_ERROR: {0}")]
    Parse(String),
    #[error("UNKNOWN_RELATION: {0}")]
    UnknownRelation(String),
    /// A self-loop fact `(A r A)` with `r` other than the identity.
    #[error("VARIABLE_SELF_CONSTRAINT: {var} constrained against itself with {relation}")]
    SelfConstraint { var: String, relation: String },
}

/// A binary constraint network over one calculus.
#[derive(Clone)]
pub struct ConstraintNetwork<'c> {
    calc: &'c Calculus,
    vars: Vec<String>,
    /// Row-major `n × n`; diagonal = identity, mirror = converse.
    cells: Vec<Relation>,
}

/// Result status of [`ConstraintNetwork::algebraic_closure`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosureStatus {
    /// Greatest fixpoint reached with no empty cell.
    Closed,
    /// Cell `(i, j)` emptied while intersecting with `c[i][k];c[k][j]`.
    Inconsistent { triple: (usize, usize, usize) },
}

/// A refined network together with how closure terminated.
pub struct ClosureOutcome<'c> {
    pub status: ClosureStatus,
    pub network: ConstraintNetwork<'c>,
}

impl ClosureOutcome<'_> {
    pub fn is_closed(&self) -> bool {
        self.status == ClosureStatus::Closed
    }
}

/// How much of the scenario space [`ConstraintNetwork::scenario_consistency`]
/// explores.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchMode {
    /// Stop after the first algebraically closed scenario.
    First,
    /// Enumerate every scenario, in deterministic branch order.
    All,
    /// Count scenarios without materializing them.
    Count,
}

/// Scenarios found by the search; `scenarios` is populated per the mode.
pub struct ScenarioSearch<'c> {
    pub count: u64,
    pub scenarios: Vec<ConstraintNetwork<'c>>,
}

impl<'c> ConstraintNetwork<'c> {
    /// An unconstrained network: identity diagonal, universal elsewhere.
    /// Variable names must be distinct case-insensitively.
    pub fn new(calc: &'c Calculus, vars: Vec<String>) -> Result<ConstraintNetwork<'c>, ReasonError> {
        let n = vars.len();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.eq_ignore_ascii_case(v)) {
                return Err(ReasonError::Parse(format!("duplicate variable {v:?}")));
            }
        }
        let mut cells = vec![calc.universal(); n * n];
        for i in 0..n {
            cells[i * n + i] = Relation::singleton(calc.identity());
        }
        Ok(ConstraintNetwork { calc, vars, cells })
    }

    pub fn calculus(&self) -> &'c Calculus {
        self.calc
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.as_str())
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.eq_ignore_ascii_case(name))
    }

    pub fn cell(&self, i: usize, j: usize) -> Relation {
        self.cells[i * self.len() + j]
    }

    fn set_cell(&mut self, i: usize, j: usize, r: Relation) {
        let n = self.len();
        self.cells[i * n + j] = r;
        self.cells[j * n + i] = self.calc.converse(r);
    }

    /// Intersects `c[i][j]` with `rel` (and the mirror cell with its
    /// converse). A self-loop is only accepted as the exact identity.
    pub fn constrain(&mut self, i: usize, j: usize, rel: Relation) -> Result<(), ReasonError> {
        if i == j {
            if rel == Relation::singleton(self.calc.identity()) {
                return Ok(());
            }
            return Err(ReasonError::SelfConstraint {
                var: self.vars[i].clone(),
                relation: self.calc.format_relation(rel),
            });
        }
        self.set_cell(i, j, self.cell(i, j) & rel);
        Ok(())
    }

    /// Parses the fact-list format: whitespace-separated facts
    /// `(A rel B)` or `(A (r1 r2 …) B)`, optionally wrapped in one outer
    /// pair of parentheses, with `#` line comments. Variables are ordered
    /// by first occurrence and matched case-insensitively.
    pub fn parse(calc: &'c Calculus, text: &str) -> Result<ConstraintNetwork<'c>, ReasonError> {
        let facts = parse_facts(calc, text)?;
        let mut vars: Vec<String> = Vec::new();
        let index_of = |name: &str, vars: &mut Vec<String>| -> usize {
            match vars.iter().position(|v| v.eq_ignore_ascii_case(name)) {
                Some(i) => i,
                None => {
                    vars.push(name.to_string());
                    vars.len() - 1
                }
            }
        };
        let mut triples = Vec::with_capacity(facts.len());
        for (a, rel, b) in facts {
            let i = index_of(&a, &mut vars);
            let j = index_of(&b, &mut vars);
            triples.push((i, j, rel));
        }
        let mut network = ConstraintNetwork::new(calc, vars)?;
        for (i, j, rel) in triples {
            network.constrain(i, j, rel)?;
        }
        Ok(network)
    }

    /// Prints the network as a parenthesized fact list, one fact per pair
    /// `i < j`, pairs ordered with `i` descending and `j` descending —
    /// the layout used by the worked examples this crate reproduces.
    pub fn print(&self) -> String {
        let n = self.len();
        let mut out = String::from("(");
        for i in (0..n.saturating_sub(1)).rev() {
            for j in ((i + 1)..n).rev() {
                let members: Vec<&str> = self
                    .cell(i, j)
                    .iter()
                    .map(|b| self.calc.registry().name(b))
                    .collect();
                out.push_str(&format!(
                    "({} ({}) {})",
                    self.vars[i],
                    members.join(" "),
                    self.vars[j]
                ));
            }
        }
        out.push(')');
        out
    }

    /// True when every pair cell is a single base relation.
    pub fn is_atomic(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (i + 1..n).all(|j| self.cell(i, j).is_atomic()))
    }

    /// True when every cell already satisfies `c[i][j] ⊆ c[i][k];c[k][j]`.
    pub fn is_closed(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let through = self.calc.compose(self.cell(i, k), self.cell(k, j));
                    if !self.cell(i, j).is_subset_of(&through) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Compares constraint content: same variable set (case-insensitive),
    /// same relation in every corresponding cell. Variable order and
    /// spelling differences are ignored.
    pub fn same_facts(&self, other: &ConstraintNetwork<'_>) -> bool {
        if self.len() != other.len() || !std::ptr::eq(self.calc, other.calc) {
            return false;
        }
        let mapping: Option<Vec<usize>> = self
            .vars
            .iter()
            .map(|v| other.variable_index(v))
            .collect();
        let Some(mapping) = mapping else {
            return false;
        };
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.cell(i, j) == other.cell(mapping[i], mapping[j])))
    }

    /// Pushes every cell through a base-relation mapping, producing the
    /// image network over the target calculus. Assumes the mapping commutes
    /// with converse (true for the quotient and qualifier-dropping maps),
    /// which keeps the image converse-consistent.
    pub fn map_through<'t>(
        &self,
        m: &BaseRelMapping,
        target: &'t Calculus,
    ) -> Result<ConstraintNetwork<'t>, QuotientError> {
        let img = m.resolve(target)?;
        let cells = self.cells.iter().map(|&c| image_rel(&img, c)).collect();
        Ok(ConstraintNetwork {
            calc: target,
            vars: self.vars.clone(),
            cells,
        })
    }

    /// Runs path-consistency-style propagation to the greatest fixpoint.
    ///
    /// A worklist holds pairs whose cell shrank; popping `(p, q)` re-derives
    /// every cell a triple through `(p, q)` can refine. Triples with a
    /// repeated variable never refine anything (the diagonal is the
    /// identity and `R;id = R`), so only distinct triples are visited. The
    /// fixpoint is unique — intersection is order-independent — so the
    /// result does not depend on worklist order.
    pub fn algebraic_closure(&self) -> ClosureOutcome<'c> {
        let mut net = self.clone();
        let n = net.len();
        if n == 0 {
            return ClosureOutcome {
                status: ClosureStatus::Closed,
                network: net,
            };
        }
        for i in 0..n {
            for j in 0..n {
                if net.cell(i, j).is_empty() {
                    return ClosureOutcome {
                        status: ClosureStatus::Inconsistent { triple: (i, i, j) },
                        network: net,
                    };
                }
            }
        }

        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let mut queued = vec![false; n * n];
        let enqueue = |queue: &mut VecDeque<(usize, usize)>, queued: &mut Vec<bool>, p: usize, q: usize| {
            let (p, q) = if p < q { (p, q) } else { (q, p) };
            if !queued[p * n + q] {
                queued[p * n + q] = true;
                queue.push_back((p, q));
            }
        };
        for p in 0..n {
            for q in p + 1..n {
                enqueue(&mut queue, &mut queued, p, q);
            }
        }

        while let Some((p, q)) = queue.pop_front() {
            queued[p * n + q] = false;
            for k in 0..n {
                if k == p || k == q {
                    continue;
                }
                // c[p][k] through q, and c[k][q] through p.
                let updates = [
                    (p, k, (p, q, k), net.calc.compose(net.cell(p, q), net.cell(q, k))),
                    (k, q, (k, p, q), net.calc.compose(net.cell(k, p), net.cell(p, q))),
                ];
                for (i, j, triple, through) in updates {
                    let old = net.cell(i, j);
                    let refined = old & through;
                    if refined != old {
                        net.set_cell(i, j, refined);
                        if refined.is_empty() {
                            return ClosureOutcome {
                                status: ClosureStatus::Inconsistent { triple },
                                network: net,
                            };
                        }
                        enqueue(&mut queue, &mut queued, i, j);
                    }
                }
            }
        }
        ClosureOutcome {
            status: ClosureStatus::Closed,
            network: net,
        }
    }

    /// Depth-first search for algebraically closed atomic refinements
    /// (scenarios). Branches on a smallest non-atomic cell (ties: canonical
    /// pair order), tries its base relations in registry order, and prunes
    /// with closure — so enumeration order is deterministic.
    pub fn scenario_consistency(&self, mode: SearchMode) -> ScenarioSearch<'c> {
        let mut search = ScenarioSearch {
            count: 0,
            scenarios: Vec::new(),
        };
        let closed = self.algebraic_closure();
        if closed.is_closed() {
            descend(closed.network, mode, &mut search);
        }
        search
    }
}

/// Recursive worker for scenario search; `net` is already closed.
fn descend<'c>(net: ConstraintNetwork<'c>, mode: SearchMode, search: &mut ScenarioSearch<'c>) {
    if mode == SearchMode::First && search.count > 0 {
        return;
    }
    let n = net.len();
    let mut branch: Option<(usize, usize)> = None;
    let mut best = u32::MAX;
    for i in 0..n {
        for j in i + 1..n {
            let size = net.cell(i, j).len();
            if size > 1 && size < best {
                best = size;
                branch = Some((i, j));
            }
        }
    }
    let Some((i, j)) = branch else {
        search.count += 1;
        if mode != SearchMode::Count {
            search.scenarios.push(net);
        }
        return;
    };
    for b in net.cell(i, j).iter() {
        let mut candidate = net.clone();
        candidate.set_cell(i, j, Relation::singleton(b));
        let closed = candidate.algebraic_closure();
        if closed.is_closed() {
            descend(closed.network, mode, search);
            if mode == SearchMode::First && search.count > 0 {
                return;
            }
        }
    }
}

/// Tokenizer + fact reader for the network text format.
fn parse_facts(calc: &Calculus, text: &str) -> Result<Vec<(String, Relation, String)>, ReasonError> {
    #[derive(Debug)]
    enum Sexp {
        Atom(String),
        List(Vec<Sexp>),
    }

    let mut tokens: Vec<String> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        let mut cur = String::new();
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            tokens.push(cur);
        }
    }

    fn read(tokens: &[String], pos: &mut usize) -> Result<Sexp, ReasonError> {
        match tokens.get(*pos) {
            None => Err(ReasonError::Parse("unexpected end of input".into())),
            Some(t) if t == "(" => {
                *pos += 1;
                let mut items = Vec::new();
                loop {
                    match tokens.get(*pos) {
                        None => {
                            return Err(ReasonError::Parse("unclosed parenthesis".into()));
                        }
                        Some(t) if t == ")" => {
                            *pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(read(tokens, pos)?),
                    }
                }
            }
            Some(t) if t == ")" => Err(ReasonError::Parse("unbalanced ')'".into())),
            Some(t) => {
                *pos += 1;
                Ok(Sexp::Atom(t.clone()))
            }
        }
    }

    let mut items = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        items.push(read(&tokens, &mut pos)?);
    }
    // One outer wrapper list around the facts is allowed.
    if items.len() == 1 {
        if let Sexp::List(inner) = &items[0] {
            if inner.iter().all(|s| matches!(s, Sexp::List(_))) {
                let Sexp::List(inner) = items.remove(0) else {
                    unreachable!()
                };
                items = inner;
            }
        }
    }

    let mut facts = Vec::with_capacity(items.len());
    for item in items {
        let Sexp::List(parts) = item else {
            return Err(ReasonError::Parse(format!("expected a fact list, got {item:?}")));
        };
        let [Sexp::Atom(a), rel, Sexp::Atom(b)] = parts.as_slice() else {
            return Err(ReasonError::Parse(format!(
                "expected (var relation var), got {parts:?}"
            )));
        };
        let relation = match rel {
            Sexp::Atom(name) => lookup(calc, name)?,
            Sexp::List(names) => {
                let mut r = Relation::EMPTY;
                for n in names {
                    let Sexp::Atom(name) = n else {
                        return Err(ReasonError::Parse(format!(
                            "expected a relation name, got {n:?}"
                        )));
                    };
                    r |= lookup(calc, name)?;
                }
                r
            }
        };
        facts.push((a.clone(), relation, b.clone()));
    }
    Ok(facts)
}

fn lookup(calc: &Calculus, name: &str) -> Result<Relation, ReasonError> {
    calc.registry()
        .lookup(name)
        .map(Relation::singleton)
        .map_err(|_| ReasonError::UnknownRelation(name.to_string()))
}

impl fmt::Debug for ConstraintNetwork<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintNetwork")
            .field("calculus", &self.calc.label())
            .field("vars", &self.vars)
            .finish_non_exhaustive()
    }
}
