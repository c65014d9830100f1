//! Symbolic classifiers: from a qcc to relation names without coordinates.
//!
//! Three primitives classify one dipole against one point, depending on how
//! the two carriers relate: [`cli`] for intersecting carriers, [`cls`] for a
//! shared carrier, [`clpar`] for parallel ones. Each is written for the
//! canonical angular layout (the angle from the dipole's ray to the point's
//! carrier in `(pi, 2*pi]`, respectively the parallel carrier to the right);
//! [`com`] swaps left and right for pairs laid out the other way around.
//! [`basic_classify`] assembles the three pairwise base relation names from
//! twelve primitive calls, and [`fp_extend`] adds the parallelity/angle
//! qualifier to the names that carry one in the finer calculus.

use std::cmp::Ordering;

use crate::geom::{Angle, FName, FpName, LrLetter};

use super::{CondensedError, Dir, PairKind, Qcc, Seg, Slot};

/// Swaps left and right; all other letters describe positions on the carrier
/// itself and are unaffected by which side the other line lies on.
pub fn com(letter: LrLetter) -> LrLetter {
    match letter {
        LrLetter::L => LrLetter::R,
        LrLetter::R => LrLetter::L,
        other => other,
    }
}

/// Classifies a dipole `(st, ed, dir)` against a point on an intersecting
/// carrier. `x` is the segmentation slot of the crossing on the dipole's
/// line, `y` the slot of the crossing on the point's line, and `pt` the
/// point's segment there. Canonical layout: the point's carrier leaves the
/// crossing to the dipole's right.
pub fn cli(
    dir: Dir,
    st: Seg,
    ed: Seg,
    x: Slot,
    pt: Seg,
    y: Slot,
) -> Result<LrLetter, CondensedError> {
    let x = x.as_seg();
    let y = y.as_seg();
    let unreachable = |ctx: &str| {
        Err(CondensedError::UnreachableCase(format!(
            "cli {ctx}: dir={} st={} ed={} x={} pt={} y={}",
            dir.as_char(),
            st.as_char(),
            ed.as_char(),
            x.as_char(),
            pt.as_char(),
            y.as_char()
        )))
    };
    Ok(match dir {
        Dir::Plus => match pt.cmp(&y) {
            Ordering::Greater => LrLetter::R,
            Ordering::Less => LrLetter::L,
            Ordering::Equal => match (st.cmp(&x), ed.cmp(&x)) {
                (Ordering::Less, Ordering::Less) => LrLetter::F,
                (Ordering::Less, Ordering::Equal) => LrLetter::E,
                (Ordering::Less, Ordering::Greater) => LrLetter::I,
                (Ordering::Equal, Ordering::Greater) => LrLetter::S,
                (Ordering::Greater, Ordering::Greater) => LrLetter::B,
                _ => return unreachable("positive"),
            },
        },
        Dir::Minus => match pt.cmp(&y) {
            Ordering::Less => LrLetter::R,
            Ordering::Greater => LrLetter::L,
            Ordering::Equal => match (st.cmp(&x), ed.cmp(&x)) {
                (Ordering::Greater, Ordering::Greater) => LrLetter::F,
                (Ordering::Greater, Ordering::Equal) => LrLetter::E,
                (Ordering::Greater, Ordering::Less) => LrLetter::I,
                (Ordering::Equal, Ordering::Less) => LrLetter::S,
                (Ordering::Less, Ordering::Less) => LrLetter::B,
                _ => return unreachable("negative"),
            },
        },
    })
}

/// Classifies a dipole `(st, ed, dir)` against a point `pt` on the *same*
/// carrier. Segments refer to the shared segmentation. Where segments tie,
/// the order `<_p` decides: `st_vs_pt`/`ed_vs_pt` compare the endpoints with
/// the point and are only consulted then (pass `None` when unknown; an error
/// is raised if the case actually needs them).
pub fn cls(
    dir: Dir,
    st: Seg,
    ed: Seg,
    pt: Seg,
    st_vs_pt: Option<Ordering>,
    ed_vs_pt: Option<Ordering>,
) -> Result<LrLetter, CondensedError> {
    let need = |o: Option<Ordering>| {
        o.ok_or_else(|| {
            CondensedError::MalformedQcc(format!(
                "cls needs <_p for dir={} st={} ed={} pt={}",
                dir.as_char(),
                st.as_char(),
                ed.as_char(),
                pt.as_char()
            ))
        })
    };
    let unreachable = || {
        Err(CondensedError::UnreachableCase(format!(
            "cls: dir={} st={} ed={} pt={}",
            dir.as_char(),
            st.as_char(),
            ed.as_char(),
            pt.as_char()
        )))
    };
    // Five-row sub-table for both endpoints tied with the point's segment,
    // resolved purely by `<_p` (positive direction reading).
    let tie_table = |stp: Ordering, edp: Ordering| -> Result<LrLetter, CondensedError> {
        Ok(match (stp, edp) {
            (Ordering::Less, Ordering::Less) => LrLetter::F,
            (Ordering::Less, Ordering::Equal) => LrLetter::E,
            (Ordering::Less, Ordering::Greater) => LrLetter::I,
            (Ordering::Equal, Ordering::Greater) => LrLetter::S,
            (Ordering::Greater, Ordering::Greater) => LrLetter::B,
            _ => return unreachable(),
        })
    };
    let flip = |o: Ordering| o.reverse();

    match dir {
        Dir::Plus => match pt {
            Seg::F => match (st.cmp(&Seg::F), ed.cmp(&Seg::F)) {
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::F),
                (Ordering::Less, Ordering::Equal) => Ok(match need(ed_vs_pt)? {
                    Ordering::Less => LrLetter::F,
                    Ordering::Equal => LrLetter::E,
                    Ordering::Greater => LrLetter::I,
                }),
                (Ordering::Equal, Ordering::Equal) => tie_table(need(st_vs_pt)?, need(ed_vs_pt)?),
                _ => unreachable(),
            },
            Seg::E => match (st.cmp(&Seg::E), ed.cmp(&Seg::E)) {
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::F),
                (Ordering::Less, Ordering::Equal) => Ok(LrLetter::E),
                (Ordering::Less, Ordering::Greater) => Ok(LrLetter::I),
                (Ordering::Equal, Ordering::Greater) => Ok(LrLetter::S),
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::B),
                _ => unreachable(),
            },
            Seg::I => match (st.cmp(&Seg::I), ed.cmp(&Seg::I)) {
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::F),
                (Ordering::Less, Ordering::Equal) => Ok(match need(ed_vs_pt)? {
                    Ordering::Less => LrLetter::F,
                    Ordering::Equal => LrLetter::E,
                    Ordering::Greater => LrLetter::I,
                }),
                (Ordering::Less, Ordering::Greater) => Ok(LrLetter::I),
                (Ordering::Equal, Ordering::Equal) => tie_table(need(st_vs_pt)?, need(ed_vs_pt)?),
                (Ordering::Equal, Ordering::Greater) => Ok(match need(st_vs_pt)? {
                    Ordering::Less => LrLetter::I,
                    Ordering::Equal => LrLetter::S,
                    Ordering::Greater => LrLetter::B,
                }),
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::B),
                _ => unreachable(),
            },
            Seg::S => match (st.cmp(&Seg::S), ed.cmp(&Seg::S)) {
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::F),
                (Ordering::Less, Ordering::Equal) => Ok(LrLetter::E),
                (Ordering::Less, Ordering::Greater) => Ok(LrLetter::I),
                (Ordering::Equal, Ordering::Greater) => Ok(LrLetter::S),
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::B),
                _ => unreachable(),
            },
            Seg::B => match (st.cmp(&Seg::B), ed.cmp(&Seg::B)) {
                (Ordering::Equal, Ordering::Equal) => tie_table(need(st_vs_pt)?, need(ed_vs_pt)?),
                (Ordering::Equal, Ordering::Greater) => Ok(match need(st_vs_pt)? {
                    Ordering::Less => LrLetter::I,
                    Ordering::Equal => LrLetter::S,
                    Ordering::Greater => LrLetter::B,
                }),
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::B),
                _ => unreachable(),
            },
        },
        // Negative direction: the mirror image — segment comparisons and the
        // `<_p` comparisons both flip.
        Dir::Minus => match pt {
            Seg::B => match (st.cmp(&Seg::B), ed.cmp(&Seg::B)) {
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::F),
                (Ordering::Greater, Ordering::Equal) => Ok(match need(ed_vs_pt)? {
                    Ordering::Greater => LrLetter::F,
                    Ordering::Equal => LrLetter::E,
                    Ordering::Less => LrLetter::I,
                }),
                (Ordering::Equal, Ordering::Equal) => {
                    tie_table(flip(need(st_vs_pt)?), flip(need(ed_vs_pt)?))
                }
                _ => unreachable(),
            },
            Seg::S => match (st.cmp(&Seg::S), ed.cmp(&Seg::S)) {
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::F),
                (Ordering::Greater, Ordering::Equal) => Ok(LrLetter::E),
                (Ordering::Greater, Ordering::Less) => Ok(LrLetter::I),
                (Ordering::Equal, Ordering::Less) => Ok(LrLetter::S),
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::B),
                _ => unreachable(),
            },
            Seg::I => match (st.cmp(&Seg::I), ed.cmp(&Seg::I)) {
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::F),
                (Ordering::Greater, Ordering::Equal) => Ok(match need(ed_vs_pt)? {
                    Ordering::Greater => LrLetter::F,
                    Ordering::Equal => LrLetter::E,
                    Ordering::Less => LrLetter::I,
                }),
                (Ordering::Greater, Ordering::Less) => Ok(LrLetter::I),
                (Ordering::Equal, Ordering::Equal) => {
                    tie_table(flip(need(st_vs_pt)?), flip(need(ed_vs_pt)?))
                }
                (Ordering::Equal, Ordering::Less) => Ok(match need(st_vs_pt)? {
                    Ordering::Greater => LrLetter::I,
                    Ordering::Equal => LrLetter::S,
                    Ordering::Less => LrLetter::B,
                }),
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::B),
                _ => unreachable(),
            },
            Seg::E => match (st.cmp(&Seg::E), ed.cmp(&Seg::E)) {
                (Ordering::Greater, Ordering::Greater) => Ok(LrLetter::F),
                (Ordering::Greater, Ordering::Equal) => Ok(LrLetter::E),
                (Ordering::Greater, Ordering::Less) => Ok(LrLetter::I),
                (Ordering::Equal, Ordering::Less) => Ok(LrLetter::S),
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::B),
                _ => unreachable(),
            },
            Seg::F => match (st.cmp(&Seg::F), ed.cmp(&Seg::F)) {
                (Ordering::Equal, Ordering::Equal) => {
                    tie_table(flip(need(st_vs_pt)?), flip(need(ed_vs_pt)?))
                }
                (Ordering::Equal, Ordering::Less) => Ok(match need(st_vs_pt)? {
                    Ordering::Greater => LrLetter::I,
                    Ordering::Equal => LrLetter::S,
                    Ordering::Less => LrLetter::B,
                }),
                (Ordering::Less, Ordering::Less) => Ok(LrLetter::B),
                _ => unreachable(),
            },
        },
    }
}

/// Classifies a dipole against a point on a distinct parallel carrier:
/// everything on the right for a dipole running with its ray, on the left
/// against it (canonical layout: the point's carrier to the right).
pub fn clpar(dir: Dir) -> LrLetter {
    match dir {
        Dir::Plus => LrLetter::R,
        Dir::Minus => LrLetter::L,
    }
}

/// One primitive classification: dipole of line `dline` against endpoint
/// `which` (0 = start, 1 = end) of line `pline`, dispatching on the carrier
/// pair kind and applying [`com`] where the layout demands it.
fn primitive(
    q: &Qcc,
    dline: usize,
    pline: usize,
    which: usize,
) -> Result<LrLetter, CondensedError> {
    let geom = super::config_geom(q.config);
    let dp = q.dipoles[dline];
    let dir = q.dirs[dline];
    let pt_seg = if which == 0 {
        q.dipoles[pline].st
    } else {
        q.dipoles[pline].ed
    };
    let letter = match geom.pair_kind(dline, pline) {
        PairKind::Coincident => {
            let rank_cmp = |a: Option<u8>, b: Option<u8>| match (a, b) {
                (Some(x), Some(y)) => Some(x.cmp(&y)),
                _ => None,
            };
            let pt_rank = q.ranks[pline][which];
            cls(
                dir,
                dp.st,
                dp.ed,
                pt_seg,
                rank_cmp(q.ranks[dline][0], pt_rank),
                rank_cmp(q.ranks[dline][1], pt_rank),
            )?
        }
        PairKind::Intersecting(label) => {
            let x = q.slot_of(dline, label).ok_or_else(|| {
                CondensedError::MissingIntersection(format!(
                    "{} unassigned on line {dline} in {}",
                    label.code(),
                    q.encode()
                ))
            })?;
            let y = q.slot_of(pline, label).ok_or_else(|| {
                CondensedError::MissingIntersection(format!(
                    "{} unassigned on line {pline} in {}",
                    label.code(),
                    q.encode()
                ))
            })?;
            cli(dir, dp.st, dp.ed, x, pt_seg, y)?
        }
        PairKind::Parallel => clpar(dir),
    };
    Ok(if geom.com_needed(dline, pline) {
        com(letter)
    } else {
        letter
    })
}

/// Pairs in table order: the relation triple is `(A vs B, B vs C, A vs C)`.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// The three pairwise base relation names of a qcc, assembled from four
/// primitive classifications per pair.
pub fn basic_classify(q: &Qcc) -> Result<[FName; 3], CondensedError> {
    let mut out = Vec::with_capacity(3);
    for (x, y) in PAIRS {
        let letters = [
            primitive(q, x, y, 0)?,
            primitive(q, x, y, 1)?,
            primitive(q, y, x, 0)?,
            primitive(q, y, x, 1)?,
        ];
        out.push(FName(letters));
    }
    Ok([out[0], out[1], out[2]])
}

/// Extends the three base names with the parallelity/angle qualifier of the
/// finer calculus. Only names built entirely from `l`/`r` letters carry one:
/// `P`/`A` for parallel carriers (same/opposite dipole orientation), `+`/`-`
/// for intersecting ones depending on where the crossing lies relative to
/// the first dipole and on the name.
pub fn fp_extend(q: &Qcc, base: &[FName; 3]) -> Result<[FpName; 3], CondensedError> {
    let geom = super::config_geom(q.config);
    let mut out = Vec::with_capacity(3);
    for ((x, y), name) in PAIRS.into_iter().zip(base) {
        if !name.splits_by_angle() {
            out.push(FpName { letters: *name, angle: None });
            continue;
        }
        let angle = match geom.pair_kind(x, y) {
            PairKind::Parallel => {
                if q.dirs[x] == q.dirs[y] {
                    Angle::Parallel
                } else {
                    Angle::AntiParallel
                }
            }
            PairKind::Intersecting(label) => {
                let slot = q.slot_of(x, label).ok_or_else(|| {
                    CondensedError::MissingIntersection(format!(
                        "{} unassigned on line {x} in {}",
                        label.code(),
                        q.encode()
                    ))
                })?;
                let xs = slot.as_seg();
                let dp = q.dipoles[x];
                let dir = q.dirs[x];
                // For an all-l/r pair the crossing lies strictly outside the
                // first dipole: ahead of its end, or behind its start.
                let front = (xs > dp.ed && dir == Dir::Plus) || (xs < dp.ed && dir == Dir::Minus);
                let behind = (dp.st > xs && dir == Dir::Plus) || (xs > dp.st && dir == Dir::Minus);
                if front == behind {
                    return Err(CondensedError::UnreachableCase(format!(
                        "crossing neither strictly ahead nor strictly behind in {}",
                        q.encode()
                    )));
                }
                match (name.to_string().as_str(), front) {
                    ("rrrr", true) | ("llrr", true) => Angle::Minus,
                    ("rrrr", false) | ("llrr", false) => Angle::Plus,
                    ("rrll", true) | ("llll", true) => Angle::Plus,
                    ("rrll", false) | ("llll", false) => Angle::Minus,
                    _ => {
                        return Err(CondensedError::UnreachableCase(format!(
                            "name {name} cannot split by angle"
                        )))
                    }
                }
            }
            PairKind::Coincident => {
                return Err(CondensedError::UnreachableCase(format!(
                    "all-sides name {name} on coincident carriers in {}",
                    q.encode()
                )))
            }
        };
        out.push(FpName { letters: *name, angle: Some(angle) });
    }
    Ok([out[0], out[1], out[2]])
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_config, AbstractDipole, ConfigId, IsectLabel};
    use super::*;

    fn seg(c: char) -> Seg {
        Seg::from_char(c).unwrap()
    }

    #[test]
    fn cli_spot_checks() {
        // The point lies past the crossing on its own line: pure side info.
        assert_eq!(
            cli(Dir::Plus, seg('I'), seg('I'), Slot::S, seg('I'), Slot::S).unwrap(),
            LrLetter::R
        );
        // Point on the crossing, dipole entirely past it: the point is behind.
        assert_eq!(
            cli(Dir::Plus, seg('I'), seg('I'), Slot::S, seg('S'), Slot::S).unwrap(),
            LrLetter::B
        );
        // Point off the crossing slot: pure side information.
        assert_eq!(
            cli(Dir::Plus, seg('B'), seg('I'), Slot::S, seg('F'), Slot::S).unwrap(),
            LrLetter::R
        );
        assert_eq!(
            cli(Dir::Minus, seg('I'), seg('B'), Slot::S, seg('F'), Slot::S).unwrap(),
            LrLetter::L
        );
        // st = ed = x without order data is no valid dipole situation.
        assert!(matches!(
            cli(Dir::Plus, seg('S'), seg('S'), Slot::S, seg('S'), Slot::S),
            Err(CondensedError::UnreachableCase(_))
        ));
    }

    #[test]
    fn cls_spot_checks() {
        use Ordering::*;
        // Plain rows: the segments alone decide.
        assert_eq!(
            cls(Dir::Plus, seg('B'), seg('E'), seg('E'), None, None).unwrap(),
            LrLetter::E
        );
        assert_eq!(
            cls(Dir::Plus, seg('S'), seg('I'), seg('S'), None, None).unwrap(),
            LrLetter::S
        );
        assert_eq!(
            cls(Dir::Minus, seg('F'), seg('B'), seg('I'), None, None).unwrap(),
            LrLetter::I
        );
        // Ties resolved by <_p, lazily.
        assert_eq!(
            cls(Dir::Plus, seg('I'), seg('I'), seg('I'), Some(Less), Some(Greater)).unwrap(),
            LrLetter::I
        );
        assert_eq!(
            cls(Dir::Minus, seg('B'), seg('B'), seg('B'), Some(Greater), Some(Less)).unwrap(),
            LrLetter::I
        );
        assert_eq!(
            cls(Dir::Plus, seg('F'), seg('F'), seg('F'), Some(Greater), Some(Greater)).unwrap(),
            LrLetter::B
        );
        // Same case without the order data is rejected, not guessed.
        assert!(matches!(
            cls(Dir::Plus, seg('I'), seg('I'), seg('I'), None, Some(Greater)),
            Err(CondensedError::MalformedQcc(_))
        ));
        // Inverted segment layout for the direction cannot happen.
        assert!(matches!(
            cls(Dir::Plus, seg('F'), seg('B'), seg('I'), None, None),
            Err(CondensedError::UnreachableCase(_))
        ));
    }

    #[test]
    fn clpar_and_com() {
        assert_eq!(clpar(Dir::Plus), LrLetter::R);
        assert_eq!(clpar(Dir::Minus), LrLetter::L);
        assert_eq!(com(LrLetter::L), LrLetter::R);
        assert_eq!(com(LrLetter::R), LrLetter::L);
        assert_eq!(com(LrLetter::S), LrLetter::S);
    }

    #[test]
    fn triangle_pair_classification_matches_the_printed_recipe() {
        // In the positively oriented triangle, the (A, B) pair reads off
        // cli at the S slots both ways (with com on the way back), because
        // their crossing is the first segmentation point on both lines.
        for q in enumerate_config(ConfigId::C1Plus).into_iter().step_by(211) {
            let rels = basic_classify(&q).unwrap();
            let dp_a = q.dipoles[0];
            let dp_b = q.dipoles[1];
            let expect = [
                cli(q.dirs[0], dp_a.st, dp_a.ed, Slot::S, dp_b.st, Slot::S).unwrap(),
                cli(q.dirs[0], dp_a.st, dp_a.ed, Slot::S, dp_b.ed, Slot::S).unwrap(),
                com(cli(q.dirs[1], dp_b.st, dp_b.ed, Slot::S, dp_a.st, Slot::S).unwrap()),
                com(cli(q.dirs[1], dp_b.st, dp_b.ed, Slot::S, dp_a.ed, Slot::S).unwrap()),
            ];
            assert_eq!(rels[0], FName(expect), "qcc {q}");
        }
    }

    #[test]
    fn total_coincidence_classifies_identical_dipoles_as_identity() {
        let q = super::super::Qcc {
            config: ConfigId::C7,
            assignment: [[None; 2]; 3],
            dipoles: [AbstractDipole {
                st: Seg::I,
                ed: Seg::I,
            }; 3],
            dirs: [Dir::Plus; 3],
            ranks: [[Some(0), Some(1)]; 3],
        };
        let rels = basic_classify(&q).unwrap();
        assert!(rels.iter().all(|r| r.to_string() == "sese"));
    }

    #[test]
    fn parallel_qualifier_distinguishes_orientations() {
        // Three parallels, all dipoles strictly inside their reference
        // segments: pure side names, qualified P/A by direction agreement.
        let dp = AbstractDipole {
            st: Seg::I,
            ed: Seg::I,
        };
        let mk = |dirs: [Dir; 3]| super::super::Qcc {
            config: ConfigId::C5a,
            assignment: [[None; 2]; 3],
            dipoles: [dp; 3],
            dirs,
            ranks: [[None; 2]; 3],
        };
        let q = mk([Dir::Plus, Dir::Plus, Dir::Plus]);
        let base = basic_classify(&q).unwrap();
        let fine = fp_extend(&q, &base).unwrap();
        // A runs above B, below C; B runs below C.
        assert_eq!(fine[0].to_string(), "rrllP");
        assert_eq!(fine[1].to_string(), "llrrP");
        let q = mk([Dir::Plus, Dir::Minus, Dir::Plus]);
        let base = basic_classify(&q).unwrap();
        let fine = fp_extend(&q, &base).unwrap();
        assert_eq!(fine[0].to_string(), "rrrrA");
    }

    #[test]
    fn crossing_qualifier_follows_the_sign_tables() {
        // Triangle with dp_A after the AB crossing, dp_B before it: the
        // crossing lies behind dp_A, in front of dp_B.
        let q = super::super::Qcc {
            config: ConfigId::C1Plus,
            assignment: [
                [Some(IsectLabel::AB), Some(IsectLabel::AC)],
                [Some(IsectLabel::AB), Some(IsectLabel::BC)],
                [Some(IsectLabel::AC), Some(IsectLabel::BC)],
            ],
            dipoles: [
                AbstractDipole {
                    st: Seg::I,
                    ed: Seg::I,
                },
                AbstractDipole {
                    st: Seg::B,
                    ed: Seg::B,
                },
                AbstractDipole {
                    st: Seg::I,
                    ed: Seg::I,
                },
            ],
            dirs: [Dir::Plus, Dir::Plus, Dir::Plus],
            ranks: [[None; 2]; 3],
        };
        let base = basic_classify(&q).unwrap();
        let fine = fp_extend(&q, &base).unwrap();
        let ab = fine[0].to_string();
        assert!(ab.ends_with('+') || ab.ends_with('-'), "{ab} should split");
    }
}
