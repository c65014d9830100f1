//! Allen's interval algebra and its embedding into the dipole calculi.
//!
//! Intervals on a directed line are dipoles whose carriers coincide and
//! point the same way, so each of Allen's 13 base relations names exactly
//! one dipole base relation. The module derives the 13×13 Allen composition
//! table from first principles (brute force over small integer intervals,
//! exhaustive for three intervals because six endpoint values realize every
//! ordering), packages it as a [`Calculus`], and checks that the base
//! mapping into a dipole calculus is a proper homomorphism: all 169
//! composition equations, converse commutation, and identity preservation.

use crate::kernel::{Calculus, KernelError, Registry, Relation};
use crate::quotient::{check_homomorphism, BaseRelMapping, HomMode, HomReport, QuotientError};

/// Allen's 13 base relations between intervals `a` and `b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum AllenRel {
    Equal,
    Before,
    After,
    Meets,
    MetBy,
    Overlaps,
    OverlappedBy,
    During,
    Contains,
    Starts,
    StartedBy,
    Finishes,
    FinishedBy,
}

impl AllenRel {
    pub const ALL: [AllenRel; 13] = [
        AllenRel::Equal,
        AllenRel::Before,
        AllenRel::After,
        AllenRel::Meets,
        AllenRel::MetBy,
        AllenRel::Overlaps,
        AllenRel::OverlappedBy,
        AllenRel::During,
        AllenRel::Contains,
        AllenRel::Starts,
        AllenRel::StartedBy,
        AllenRel::Finishes,
        AllenRel::FinishedBy,
    ];

    /// The conventional short symbol.
    pub fn symbol(self) -> &'static str {
        match self {
            AllenRel::Equal => "=",
            AllenRel::Before => "b",
            AllenRel::After => "bi",
            AllenRel::Meets => "m",
            AllenRel::MetBy => "mi",
            AllenRel::Overlaps => "o",
            AllenRel::OverlappedBy => "oi",
            AllenRel::During => "d",
            AllenRel::Contains => "di",
            AllenRel::Starts => "s",
            AllenRel::StartedBy => "si",
            AllenRel::Finishes => "f",
            AllenRel::FinishedBy => "fi",
        }
    }

    pub fn converse(self) -> AllenRel {
        match self {
            AllenRel::Equal => AllenRel::Equal,
            AllenRel::Before => AllenRel::After,
            AllenRel::After => AllenRel::Before,
            AllenRel::Meets => AllenRel::MetBy,
            AllenRel::MetBy => AllenRel::Meets,
            AllenRel::Overlaps => AllenRel::OverlappedBy,
            AllenRel::OverlappedBy => AllenRel::Overlaps,
            AllenRel::During => AllenRel::Contains,
            AllenRel::Contains => AllenRel::During,
            AllenRel::Starts => AllenRel::StartedBy,
            AllenRel::StartedBy => AllenRel::Starts,
            AllenRel::Finishes => AllenRel::FinishedBy,
            AllenRel::FinishedBy => AllenRel::Finishes,
        }
    }

    /// The dipole base relation realized by two same-carrier, same-direction
    /// dipoles whose intervals stand in this relation. The images avoid the
    /// four angle-split names, so they are valid in both dipole calculi.
    pub fn dipole_image(self) -> &'static str {
        match self {
            AllenRel::Equal => "sese",
            AllenRel::Before => "ffbb",
            AllenRel::After => "bbff",
            AllenRel::Meets => "efbs",
            AllenRel::MetBy => "bsef",
            AllenRel::Overlaps => "ifbi",
            AllenRel::OverlappedBy => "biif",
            AllenRel::During => "bfii",
            AllenRel::Contains => "iibf",
            AllenRel::Starts => "sfsi",
            AllenRel::StartedBy => "sisf",
            AllenRel::Finishes => "beie",
            AllenRel::FinishedBy => "iebe",
        }
    }
}

/// Classifies two intervals (start < end each) by endpoint comparison.
pub fn allen_classify(a: (i32, i32), b: (i32, i32)) -> AllenRel {
    debug_assert!(a.0 < a.1 && b.0 < b.1);
    use std::cmp::Ordering::*;
    match (a.0.cmp(&b.0), a.1.cmp(&b.1)) {
        (Equal, Equal) => AllenRel::Equal,
        (Equal, Less) => AllenRel::Starts,
        (Equal, Greater) => AllenRel::StartedBy,
        (Greater, Equal) => AllenRel::Finishes,
        (Less, Equal) => AllenRel::FinishedBy,
        (Greater, Less) => AllenRel::During,
        (Less, Greater) => AllenRel::Contains,
        (Less, Less) => match a.1.cmp(&b.0) {
            Less => AllenRel::Before,
            Equal => AllenRel::Meets,
            Greater => AllenRel::Overlaps,
        },
        (Greater, Greater) => match a.0.cmp(&b.1) {
            Greater => AllenRel::After,
            Equal => AllenRel::MetBy,
            Less => AllenRel::OverlappedBy,
        },
    }
}

/// Derives the 13×13 composition table by enumerating all triples of
/// intervals with endpoints in {0..5}. Six values place three intervals'
/// endpoints in every possible order relation, so the table is exact.
pub fn allen_composition_oracle() -> [[Vec<AllenRel>; 13]; 13] {
    let intervals: Vec<(i32, i32)> = (0..6)
        .flat_map(|s| (s + 1..6).map(move |e| (s, e)))
        .collect();
    let mut seen = [[0u16; 13]; 13];
    for &i1 in &intervals {
        for &i2 in &intervals {
            let r12 = allen_classify(i1, i2) as usize;
            for &i3 in &intervals {
                let r23 = allen_classify(i2, i3) as usize;
                seen[r12][r23] |= 1 << allen_classify(i1, i3) as usize;
            }
        }
    }
    seen.map(|row| {
        row.map(|bits| {
            AllenRel::ALL
                .into_iter()
                .filter(|r| bits & (1 << *r as usize) != 0)
                .collect()
        })
    })
}

/// Packages the interval algebra as a [`Calculus`]: 13 base relations
/// named by their symbols, identity `=`, oracle-derived composition.
pub fn allen_calculus() -> Result<Calculus, KernelError> {
    let registry = Registry::new(AllenRel::ALL.iter().map(|r| r.symbol().to_string()).collect())?;
    let ix = |r: AllenRel| registry.lookup(r.symbol()).expect("symbol registered");
    let identity = ix(AllenRel::Equal);
    let mut converse = vec![identity; 13];
    for r in AllenRel::ALL {
        converse[ix(r).0 as usize] = ix(r.converse());
    }
    let oracle = allen_composition_oracle();
    let mut composition = vec![Relation::EMPTY; 13 * 13];
    for a in AllenRel::ALL {
        for b in AllenRel::ALL {
            composition[ix(a).0 as usize * 13 + ix(b).0 as usize] =
                Relation::from_bases(oracle[a as usize][b as usize].iter().map(|&c| ix(c)));
        }
    }
    Calculus::new("allen", registry, identity, converse, composition)
}

/// The base-relation mapping sending each Allen symbol to its dipole name.
pub fn allen_embedding_mapping(allen: &Registry) -> BaseRelMapping {
    BaseRelMapping::from_fn(allen, |symbol| {
        AllenRel::ALL
            .into_iter()
            .find(|r| r.symbol() == symbol)
            .expect("registry holds exactly the 13 symbols")
            .dipole_image()
            .to_string()
    })
}

/// Checks that the interval algebra embeds into `target` as a proper
/// homomorphism (169 composition equations, converse, identity).
pub fn check_allen_embedding(target: &Calculus) -> Result<HomReport, QuotientError> {
    let allen = allen_calculus()?;
    let mapping = allen_embedding_mapping(allen.registry());
    check_homomorphism(&mapping, &allen, target, HomMode::Proper)
}
