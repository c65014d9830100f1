//! Condensed semantics for three interacting dipoles.
//!
//! Composition tables are computed by enumerating *qualitative composition
//! configurations* (qccs): symbolic descriptions of how three dipoles can sit
//! on a triple of oriented carrier lines. Triples of lines fall into 17
//! orbits under orientation-preserving affine maps; within an orbit, each
//! line carries up to two segmentation points (intersections with the other
//! lines where present, free reference points otherwise) which cut it into
//! the segments `B < S < I < E < F`. A qcc records the orbit, which
//! intersection sits at which segmentation slot (the assignment mapping),
//! the segment pair of every dipole's endpoints, dipole directions, and —
//! where several endpoints share a carrier — their relative order.
//!
//! Two independent paths lead from a qcc to relations: the symbolic
//! classifiers in [`classify`], and [`realize_qcc`], which produces concrete
//! rational coordinates on canonical carrier placements so the exact
//! geometric oracle can classify the same situation. The table builder in
//! [`tables`] runs both on every enumerated qcc and insists they agree.
//!
//! Conventions fixed by the canonical placements (and validated by that
//! cross-check): carrier rays are chosen so the angle from line A's ray to
//! each other ray lies in `(pi, 2*pi]`; segmentations are ordered along the
//! ray; coincident carriers share one segmentation. For every orbit, one
//! concrete coordinate catalog entry below pins all remaining freedom.

pub mod classify;
pub mod tables;

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::geom::{cross, Dipole, Point, Rational};

/// Errors raised while realizing, classifying, or assembling tables.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CondensedError {
    /// Qcc data violates the well-formedness constraints (bad assignment,
    /// contradictory order, degenerate dipole, ...).
    #[error("malformed qcc: {0}")]
    MalformedQcc(String),
    /// A classifier hit a case combination that cannot occur for any
    /// well-formed input; indicates an enumeration bug.
    #[error("unreachable classifier case: {0}")]
    UnreachableCase(String),
    /// The classifier needed an intersection point that the assignment does
    /// not provide.
    #[error("missing intersection assignment: {0}")]
    MissingIntersection(String),
    /// The symbolic classification of a qcc disagrees with the exact
    /// geometric oracle on its realization.
    #[error("classifier/oracle mismatch on {qcc}: symbolic ({symbolic}), oracle ({oracle})")]
    OracleMismatch {
        qcc: String,
        symbolic: String,
        oracle: String,
    },
    /// Assembled tables failed a structural sanity check.
    #[error("table validation: {0}")]
    Table(String),
}

/// Abstract segment of a carrier line, ordered `B < S < I < E < F` along the
/// ray. `S` and `E` are the two segmentation points themselves (single
/// points); `B`, `I`, `F` are the open pieces before, between, and after.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Seg {
    B,
    S,
    I,
    E,
    F,
}

impl Seg {
    pub fn as_char(self) -> char {
        match self {
            Seg::B => 'B',
            Seg::S => 'S',
            Seg::I => 'I',
            Seg::E => 'E',
            Seg::F => 'F',
        }
    }

    pub fn from_char(c: char) -> Option<Seg> {
        Some(match c {
            'B' => Seg::B,
            'S' => Seg::S,
            'I' => Seg::I,
            'E' => Seg::E,
            'F' => Seg::F,
            _ => return None,
        })
    }
}

/// Direction of a dipole relative to its carrier ray.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Dir {
    Plus,
    Minus,
}

impl Dir {
    pub fn as_char(self) -> char {
        match self {
            Dir::Plus => '+',
            Dir::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Dir> {
        match c {
            '+' => Some(Dir::Plus),
            '-' => Some(Dir::Minus),
            _ => None,
        }
    }
}

/// The start/end segments of one abstract dipole. `(S,S)` and `(E,E)` are
/// excluded because dipole endpoints are distinct while `S` and `E` are
/// single points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AbstractDipole {
    pub st: Seg,
    pub ed: Seg,
}

impl AbstractDipole {
    pub fn new(st: Seg, ed: Seg) -> Option<AbstractDipole> {
        if (st == Seg::S && ed == Seg::S) || (st == Seg::E && ed == Seg::E) {
            None
        } else {
            Some(AbstractDipole { st, ed })
        }
    }
}

/// One of the 17 orbits of oriented line triples.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ConfigId {
    C1Plus,
    C1Minus,
    C2Plus,
    C2Minus,
    C3a,
    C3b,
    C3c,
    C4a,
    C4b,
    C4c,
    C5a,
    C5b,
    C5c,
    C6a,
    C6b,
    C6c,
    C7,
}

impl ConfigId {
    pub const ALL: [ConfigId; 17] = [
        ConfigId::C1Plus,
        ConfigId::C1Minus,
        ConfigId::C2Plus,
        ConfigId::C2Minus,
        ConfigId::C3a,
        ConfigId::C3b,
        ConfigId::C3c,
        ConfigId::C4a,
        ConfigId::C4b,
        ConfigId::C4c,
        ConfigId::C5a,
        ConfigId::C5b,
        ConfigId::C5c,
        ConfigId::C6a,
        ConfigId::C6b,
        ConfigId::C6c,
        ConfigId::C7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfigId::C1Plus => "1+",
            ConfigId::C1Minus => "1-",
            ConfigId::C2Plus => "2+",
            ConfigId::C2Minus => "2-",
            ConfigId::C3a => "3a",
            ConfigId::C3b => "3b",
            ConfigId::C3c => "3c",
            ConfigId::C4a => "4a",
            ConfigId::C4b => "4b",
            ConfigId::C4c => "4c",
            ConfigId::C5a => "5a",
            ConfigId::C5b => "5b",
            ConfigId::C5c => "5c",
            ConfigId::C6a => "6a",
            ConfigId::C6b => "6b",
            ConfigId::C6c => "6c",
            ConfigId::C7 => "7",
        }
    }

    pub fn parse(s: &str) -> Option<ConfigId> {
        ConfigId::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Named intersection point of carrier lines.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum IsectLabel {
    AB,
    BC,
    AC,
    ABC,
}

impl IsectLabel {
    pub fn involves(self, line: usize) -> bool {
        match self {
            IsectLabel::AB => line == 0 || line == 1,
            IsectLabel::BC => line == 1 || line == 2,
            IsectLabel::AC => line == 0 || line == 2,
            IsectLabel::ABC => true,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            IsectLabel::AB => "ab",
            IsectLabel::BC => "bc",
            IsectLabel::AC => "ac",
            IsectLabel::ABC => "abc",
        }
    }

    pub fn parse(s: &str) -> Option<IsectLabel> {
        Some(match s {
            "ab" => IsectLabel::AB,
            "bc" => IsectLabel::BC,
            "ac" => IsectLabel::AC,
            "abc" => IsectLabel::ABC,
            _ => return None,
        })
    }
}

/// Segmentation slot of a line: its first (`S`) or second (`E`) segmentation
/// point along the ray.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Slot {
    S,
    E,
}

impl Slot {
    pub fn index(self) -> usize {
        match self {
            Slot::S => 0,
            Slot::E => 1,
        }
    }

    /// The slot viewed as a segment value for order comparisons.
    pub fn as_seg(self) -> Seg {
        match self {
            Slot::S => Seg::S,
            Slot::E => Seg::E,
        }
    }
}

/// A qualitative composition configuration.
///
/// `assignment[line][slot]` maps segmentation slots to intersection labels
/// (`None` = free reference point). `ranks` carries the order `<_p`: for
/// endpoints on a shared (coincident) carrier, a smaller rank means earlier
/// along the ray, equal ranks mean coincident points; endpoints on sole
/// carriers leave it `None` (the segments and the dipole direction already
/// determine everything there).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Qcc {
    pub config: ConfigId,
    pub assignment: [[Option<IsectLabel>; 2]; 3],
    pub dipoles: [AbstractDipole; 3],
    pub dirs: [Dir; 3],
    pub ranks: [[Option<u8>; 2]; 3],
}

impl Qcc {
    /// Slot of `label` on `line`, if assigned.
    pub fn slot_of(&self, line: usize, label: IsectLabel) -> Option<Slot> {
        if self.assignment[line][0] == Some(label) {
            Some(Slot::S)
        } else if self.assignment[line][1] == Some(label) {
            Some(Slot::E)
        } else {
            None
        }
    }

    /// Compact single-line encoding, also used in witness files:
    /// `cfg=1+;asg=SA:ab,EA:ac;dp=BI+,SE+,II-;ord=0,1,-,-,2,3`.
    pub fn encode(&self) -> String {
        let mut asg = String::new();
        for (line, lc) in ["A", "B", "C"].iter().enumerate() {
            for (slot, sc) in ["S", "E"].iter().enumerate() {
                if let Some(label) = self.assignment[line][slot] {
                    if !asg.is_empty() {
                        asg.push(',');
                    }
                    asg.push_str(&format!("{sc}{lc}:{}", label.code()));
                }
            }
        }
        if asg.is_empty() {
            asg.push('-');
        }
        let dp = self
            .dipoles
            .iter()
            .zip(self.dirs)
            .map(|(d, dir)| format!("{}{}{}", d.st.as_char(), d.ed.as_char(), dir.as_char()))
            .collect::<Vec<_>>()
            .join(",");
        let ord = self
            .ranks
            .iter()
            .flatten()
            .map(|r| r.map_or("-".to_string(), |v| v.to_string()))
            .collect::<Vec<_>>()
            .join(",");
        format!("cfg={};asg={asg};dp={dp};ord={ord}", self.config)
    }

    /// Parses the [`Qcc::encode`] format.
    pub fn decode(text: &str) -> Result<Qcc, CondensedError> {
        let bad = |msg: &str| CondensedError::MalformedQcc(format!("{msg} in {text:?}"));
        let mut config = None;
        let mut assignment = [[None; 2]; 3];
        let mut dipoles = Vec::new();
        let mut dirs = Vec::new();
        let mut ranks = Vec::new();
        for field in text.split(';') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| bad("missing key=value"))?;
            match key {
                "cfg" => {
                    config = Some(ConfigId::parse(value).ok_or_else(|| bad("bad config id"))?)
                }
                "asg" => {
                    if value == "-" {
                        continue;
                    }
                    for part in value.split(',') {
                        let (slotline, label) = part
                            .split_once(':')
                            .ok_or_else(|| bad("bad assignment entry"))?;
                        let mut cs = slotline.chars();
                        let slot = match cs.next() {
                            Some('S') => 0,
                            Some('E') => 1,
                            _ => return Err(bad("bad slot letter")),
                        };
                        let line = match cs.next() {
                            Some('A') => 0,
                            Some('B') => 1,
                            Some('C') => 2,
                            _ => return Err(bad("bad line letter")),
                        };
                        assignment[line][slot] =
                            Some(IsectLabel::parse(label).ok_or_else(|| bad("bad label"))?);
                    }
                }
                "dp" => {
                    for part in value.split(',') {
                        let cs: Vec<char> = part.chars().collect();
                        if cs.len() != 3 {
                            return Err(bad("dipole entry needs three characters"));
                        }
                        let st = Seg::from_char(cs[0]).ok_or_else(|| bad("bad segment"))?;
                        let ed = Seg::from_char(cs[1]).ok_or_else(|| bad("bad segment"))?;
                        dipoles.push(
                            AbstractDipole::new(st, ed)
                                .ok_or_else(|| bad("degenerate abstract dipole"))?,
                        );
                        dirs.push(Dir::from_char(cs[2]).ok_or_else(|| bad("bad direction"))?);
                    }
                }
                "ord" => {
                    for part in value.split(',') {
                        ranks.push(if part == "-" {
                            None
                        } else {
                            Some(part.parse::<u8>().map_err(|_| bad("bad rank"))?)
                        });
                    }
                }
                _ => return Err(bad("unknown field")),
            }
        }
        let config = config.ok_or_else(|| bad("missing cfg"))?;
        if dipoles.len() != 3 || ranks.len() != 6 {
            return Err(bad("need three dipoles and six rank entries"));
        }
        Ok(Qcc {
            config,
            assignment,
            dipoles: [dipoles[0], dipoles[1], dipoles[2]],
            dirs: [dirs[0], dirs[1], dirs[2]],
            ranks: [
                [ranks[0], ranks[1]],
                [ranks[2], ranks[3]],
                [ranks[4], ranks[5]],
            ],
        })
    }
}

impl fmt::Display for Qcc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Canonical placement of one carrier line: base point and ray direction.
#[derive(Clone, Debug)]
pub struct LineGeom {
    pub base: Point,
    pub dir: (Rational, Rational),
}

impl LineGeom {
    fn new(bx: i64, by: i64, dx: i64, dy: i64) -> LineGeom {
        LineGeom {
            base: Point::from_ints(bx, by),
            dir: (Rational::from_int(dx), Rational::from_int(dy)),
        }
    }

    /// The point at ray parameter `t`.
    pub fn at(&self, t: Rational) -> Point {
        Point::new(self.base.x + t * self.dir.0, self.base.y + t * self.dir.1)
    }
}

/// An intersection point with its ray parameter on each line it lies on.
#[derive(Clone, Debug)]
pub struct AnchorGeom {
    pub label: IsectLabel,
    pub param: [Option<Rational>; 3],
}

/// How the carriers of an ordered line pair relate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairKind {
    Coincident,
    Intersecting(IsectLabel),
    Parallel,
}

/// Canonical geometry of one configuration orbit.
#[derive(Clone, Debug)]
pub struct ConfigGeom {
    pub id: ConfigId,
    pub lines: [LineGeom; 3],
    /// Carrier group id per line; coincident lines share an id (and, in this
    /// catalog, base point and direction, so ray parameters are comparable).
    pub carrier: [u8; 3],
    pub anchors: Vec<AnchorGeom>,
}

impl ConfigGeom {
    pub fn pair_kind(&self, x: usize, y: usize) -> PairKind {
        if self.carrier[x] == self.carrier[y] {
            return PairKind::Coincident;
        }
        for a in &self.anchors {
            if a.param[x].is_some() && a.param[y].is_some() {
                return PairKind::Intersecting(a.label);
            }
        }
        PairKind::Parallel
    }

    /// Intersection labels lying on `line`, sorted by ray parameter.
    pub fn anchors_on_line(&self, line: usize) -> Vec<(IsectLabel, Rational)> {
        let mut out: Vec<(IsectLabel, Rational)> = self
            .anchors
            .iter()
            .filter_map(|a| a.param[line].map(|p| (a.label, p)))
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1));
        out
    }

    pub fn anchor_param(&self, line: usize, label: IsectLabel) -> Option<Rational> {
        self.anchors
            .iter()
            .find(|a| a.label == label)
            .and_then(|a| a.param[line])
    }

    /// Whether the classifier output for `(dipole on x, point on y)` must be
    /// passed through `com` (the L/R swap). The primitive classifiers are
    /// built for the angle from ray `x` to ray `y` lying in `(pi, 2*pi]`;
    /// when it lies in `(0, pi]` instead — positive cross product for
    /// intersecting rays, carrier of `y` to the left for parallel ones —
    /// the sides swap.
    pub fn com_needed(&self, x: usize, y: usize) -> bool {
        match self.pair_kind(x, y) {
            PairKind::Coincident => false,
            PairKind::Intersecting(_) => {
                let (ux, uy) = self.lines[x].dir;
                let (vx, vy) = self.lines[y].dir;
                cross(ux, uy, vx, vy).signum() > 0
            }
            PairKind::Parallel => {
                let (ux, uy) = self.lines[x].dir;
                let off = (
                    self.lines[y].base.x - self.lines[x].base.x,
                    self.lines[y].base.y - self.lines[x].base.y,
                );
                cross(ux, uy, off.0, off.1).signum() > 0
            }
        }
    }
}

fn r(v: i64) -> Rational {
    Rational::from_int(v)
}

fn build_catalog() -> Vec<ConfigGeom> {
    let anchor2 = |label, a: (usize, i64), b: (usize, i64)| {
        let mut param = [None; 3];
        param[a.0] = Some(r(a.1));
        param[b.0] = Some(r(b.1));
        AnchorGeom { label, param }
    };
    let anchor3 = |pa: i64, pb: i64, pc: i64| AnchorGeom {
        label: IsectLabel::ABC,
        param: [Some(r(pa)), Some(r(pb)), Some(r(pc))],
    };

    vec![
        // Triangle, positive orientation of the three crossing points.
        ConfigGeom {
            id: ConfigId::C1Plus,
            lines: [
                LineGeom::new(0, 0, 2, 3),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(2, 3, 2, -3),
            ],
            carrier: [0, 1, 2],
            anchors: vec![
                anchor2(IsectLabel::AB, (0, 0), (1, 0)),
                anchor2(IsectLabel::AC, (0, 1), (2, 0)),
                anchor2(IsectLabel::BC, (1, 4), (2, 1)),
            ],
        },
        // Triangle, negative orientation.
        ConfigGeom {
            id: ConfigId::C1Minus,
            lines: [
                LineGeom::new(0, 0, 2, -3),
                LineGeom::new(0, 0, -1, 0),
                LineGeom::new(2, -3, -2, -3),
            ],
            carrier: [0, 1, 2],
            anchors: vec![
                anchor2(IsectLabel::AB, (0, 0), (1, 0)),
                anchor2(IsectLabel::AC, (0, 1), (2, 0)),
                anchor2(IsectLabel::BC, (1, -4), (2, -1)),
            ],
        },
        // Three concurrent lines, the two orientations of (B, C) around A.
        ConfigGeom {
            id: ConfigId::C2Plus,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, -1, -2),
                LineGeom::new(0, 0, 1, -1),
            ],
            carrier: [0, 1, 2],
            anchors: vec![anchor3(0, 0, 0)],
        },
        ConfigGeom {
            id: ConfigId::C2Minus,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, -1),
                LineGeom::new(0, 0, -1, -2),
            ],
            carrier: [0, 1, 2],
            anchors: vec![anchor3(0, 0, 0)],
        },
        // One transversal across two parallels; the letter says which line
        // is the transversal: a -> A, b -> C, c -> B.
        ConfigGeom {
            id: ConfigId::C3a,
            lines: [
                LineGeom::new(0, 0, 1, 2),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 4, 1, 0),
            ],
            carrier: [0, 1, 2],
            anchors: vec![
                anchor2(IsectLabel::AB, (0, 0), (1, 0)),
                anchor2(IsectLabel::AC, (0, 2), (2, 2)),
            ],
        },
        ConfigGeom {
            id: ConfigId::C3b,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 4, 1, 0),
                LineGeom::new(2, 4, -1, -2),
            ],
            carrier: [0, 1, 2],
            anchors: vec![
                anchor2(IsectLabel::AC, (0, 0), (2, 2)),
                anchor2(IsectLabel::BC, (1, 2), (2, 0)),
            ],
        },
        ConfigGeom {
            id: ConfigId::C3c,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(2, 4, -1, -2),
                LineGeom::new(0, 4, 1, 0),
            ],
            carrier: [0, 1, 2],
            anchors: vec![
                anchor2(IsectLabel::AB, (0, 0), (1, 2)),
                anchor2(IsectLabel::BC, (1, 0), (2, 2)),
            ],
        },
        // Two coincident lines crossed by a transversal (same letter rule).
        ConfigGeom {
            id: ConfigId::C4a,
            lines: [
                LineGeom::new(0, 0, 0, 1),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, 0),
            ],
            carrier: [0, 1, 1],
            anchors: vec![anchor3(0, 0, 0)],
        },
        ConfigGeom {
            id: ConfigId::C4b,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 0, -1),
            ],
            carrier: [0, 0, 1],
            anchors: vec![anchor3(0, 0, 0)],
        },
        ConfigGeom {
            id: ConfigId::C4c,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 0, -1),
                LineGeom::new(0, 0, 1, 0),
            ],
            carrier: [0, 1, 0],
            anchors: vec![anchor3(0, 0, 0)],
        },
        // Three distinct parallels (distance ratio fixed to 1; the letter
        // says which line runs in the middle).
        ConfigGeom {
            id: ConfigId::C5a,
            lines: [
                LineGeom::new(0, 2, 1, 0),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 4, 1, 0),
            ],
            carrier: [0, 1, 2],
            anchors: vec![],
        },
        ConfigGeom {
            id: ConfigId::C5b,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 4, 1, 0),
                LineGeom::new(0, 2, 1, 0),
            ],
            carrier: [0, 1, 2],
            anchors: vec![],
        },
        ConfigGeom {
            id: ConfigId::C5c,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 2, 1, 0),
                LineGeom::new(0, 4, 1, 0),
            ],
            carrier: [0, 1, 2],
            anchors: vec![],
        },
        // Two coincident lines plus a parallel one (letter = the lone line).
        ConfigGeom {
            id: ConfigId::C6a,
            lines: [
                LineGeom::new(0, 2, 1, 0),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, 0),
            ],
            carrier: [0, 1, 1],
            anchors: vec![],
        },
        ConfigGeom {
            id: ConfigId::C6b,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 2, 1, 0),
            ],
            carrier: [0, 0, 1],
            anchors: vec![],
        },
        ConfigGeom {
            id: ConfigId::C6c,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 2, 1, 0),
                LineGeom::new(0, 0, 1, 0),
            ],
            carrier: [0, 1, 0],
            anchors: vec![],
        },
        // All three coincident.
        ConfigGeom {
            id: ConfigId::C7,
            lines: [
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, 0),
                LineGeom::new(0, 0, 1, 0),
            ],
            carrier: [0, 0, 0],
            anchors: vec![],
        },
    ]
}

/// The canonical geometry for a configuration id.
pub fn config_geom(id: ConfigId) -> &'static ConfigGeom {
    static CATALOG: OnceLock<Vec<ConfigGeom>> = OnceLock::new();
    let catalog = CATALOG.get_or_init(build_catalog);
    catalog.iter().find(|c| c.id == id).expect("catalog covers all ids")
}

/// Tiny exact one-dimensional order solver used by [`realize_qcc`]: nodes are
/// positions on one carrier, related by equalities, strict inequalities, and
/// pinned values (anchor parameters). Produces concrete rational positions or
/// reports the constraint set unsatisfiable.
struct OrderSolver {
    parent: Vec<usize>,
    pins: Vec<Option<Rational>>,
    edges: Vec<(usize, usize)>,
}

impl OrderSolver {
    fn new(n: usize) -> OrderSolver {
        OrderSolver {
            parent: (0..n).collect(),
            pins: vec![None; n],
            edges: Vec::new(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> Result<(), String> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        match (self.pins[ra], self.pins[rb]) {
            (Some(x), Some(y)) if x != y => {
                return Err(format!("points pinned to {x} and {y} forced equal"))
            }
            (None, Some(y)) => self.pins[ra] = Some(y),
            _ => {}
        }
        self.parent[rb] = ra;
        Ok(())
    }

    fn pin(&mut self, a: usize, v: Rational) -> Result<(), String> {
        let ra = self.find(a);
        match self.pins[ra] {
            Some(x) if x != v => Err(format!("point pinned to both {x} and {v}")),
            _ => {
                self.pins[ra] = Some(v);
                Ok(())
            }
        }
    }

    fn less(&mut self, a: usize, b: usize) {
        self.edges.push((a, b));
    }

    /// Solves to concrete values. Free positions between pinned ones are
    /// interpolated; before/after all pins they step by one.
    fn solve(mut self) -> Result<Vec<Rational>, String> {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        let mut edge_set = std::collections::HashSet::new();
        for &(a, b) in &self.edges.clone() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                return Err("strict order between coincident points".into());
            }
            if edge_set.insert((ra, rb)) {
                adj[ra].push(rb);
                indeg[rb] += 1;
            }
        }

        let is_root = |i: usize| roots[i] == i;
        let mut queue: Vec<usize> = (0..n).filter(|&i| is_root(i) && indeg[i] == 0).collect();
        queue.sort_unstable();
        let mut topo = Vec::new();
        let mut qi = 0;
        while qi < queue.len() {
            let u = queue[qi];
            qi += 1;
            topo.push(u);
            for &v in &adj[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v);
                }
            }
        }
        if topo.len() != (0..n).filter(|&i| is_root(i)).count() {
            return Err("cyclic order constraints".into());
        }

        // Smallest pinned value strictly downstream of each root.
        let mut min_down: Vec<Option<Rational>> = vec![None; n];
        for &u in topo.iter().rev() {
            for &v in &adj[u] {
                for cand in [self.pins[v], min_down[v]].into_iter().flatten() {
                    if min_down[u].is_none_or(|m| cand < m) {
                        min_down[u] = Some(cand);
                    }
                }
            }
        }

        let mut value: Vec<Option<Rational>> = vec![None; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(ra, rb) in &edge_set {
            preds[rb].push(ra);
        }
        for &u in &topo {
            let lb = preds[u]
                .iter()
                .map(|&p| value[p].expect("topological order"))
                .max();
            let v = match (self.pins[u], lb, min_down[u]) {
                (Some(pin), Some(lb), _) if lb >= pin => {
                    return Err(format!("pinned value {pin} not above predecessor {lb}"))
                }
                (Some(pin), _, _) => pin,
                (None, None, None) => Rational::ZERO,
                (None, Some(lb), None) => lb + Rational::ONE,
                (None, None, Some(ub)) => ub - Rational::ONE,
                (None, Some(lb), Some(ub)) => {
                    if lb >= ub {
                        return Err(format!(
                            "no room between predecessor {lb} and downstream pin {ub}"
                        ));
                    }
                    lb + (ub - lb) * Rational::new(1, 2)
                }
            };
            value[u] = Some(v);
        }

        Ok((0..n)
            .map(|i| value[roots[i]].expect("every root valued"))
            .collect())
    }
}

/// Checks the assignment mapping of `q` against the configuration's actual
/// intersection structure: labels must involve the line they are assigned
/// on, the two slots of a line must not share a label, and the mapping must
/// be maximal (every intersection point on a line occupies some slot).
fn validate_assignment(q: &Qcc) -> Result<(), CondensedError> {
    let geom = config_geom(q.config);
    for line in 0..3 {
        let expected: Vec<IsectLabel> = geom
            .anchors_on_line(line)
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        let assigned: Vec<IsectLabel> = q.assignment[line].iter().flatten().copied().collect();
        for l in &assigned {
            if !l.involves(line) {
                return Err(CondensedError::MalformedQcc(format!(
                    "label {} assigned on line {line} it does not involve",
                    l.code()
                )));
            }
            if !expected.contains(l) {
                return Err(CondensedError::MalformedQcc(format!(
                    "label {} does not exist on line {line} in config {}",
                    l.code(),
                    q.config
                )));
            }
        }
        if assigned.len() == 2 && assigned[0] == assigned[1] {
            return Err(CondensedError::MalformedQcc(format!(
                "both slots of line {line} mapped to {}",
                assigned[0].code()
            )));
        }
        if assigned.len() != expected.len() {
            return Err(CondensedError::MalformedQcc(format!(
                "line {line} has {} intersection points but {} assigned slots (assignment must be maximal)",
                expected.len(),
                assigned.len()
            )));
        }
    }
    Ok(())
}

/// Realizes a qcc as three concrete dipoles on the canonical carrier
/// placement of its configuration.
///
/// Fails with [`CondensedError::MalformedQcc`] when the qcc violates the
/// well-formedness constraints: bad assignment mapping, segment/order/
/// direction data that contradicts itself, or missing `<_p` information for
/// endpoints sharing a segment on a shared carrier.
pub fn realize_qcc(q: &Qcc) -> Result<[Dipole; 3], CondensedError> {
    let geom = config_geom(q.config);
    validate_assignment(q)?;
    for (line, (dp, dir)) in q.dipoles.iter().zip(q.dirs).enumerate() {
        if AbstractDipole::new(dp.st, dp.ed).is_none() {
            return Err(CondensedError::MalformedQcc(format!(
                "degenerate abstract dipole on line {line}"
            )));
        }
        // Direction is determined by the segments whenever they differ.
        let forced = match dp.st.cmp(&dp.ed) {
            Ordering::Less => Some(Dir::Plus),
            Ordering::Greater => Some(Dir::Minus),
            Ordering::Equal => None,
        };
        if let Some(f) = forced {
            if f != dir {
                return Err(CondensedError::MalformedQcc(format!(
                    "direction of dipole {line} contradicts its segments"
                )));
            }
        }
        if let [Some(rs), Some(re)] = q.ranks[line] {
            let by_rank = match rs.cmp(&re) {
                Ordering::Less => Dir::Plus,
                Ordering::Greater => Dir::Minus,
                Ordering::Equal => {
                    return Err(CondensedError::MalformedQcc(format!(
                        "endpoints of dipole {line} share a rank"
                    )))
                }
            };
            if by_rank != dir {
                return Err(CondensedError::MalformedQcc(format!(
                    "direction of dipole {line} contradicts its ranks"
                )));
            }
        }
    }

    let mut params: [[Option<Rational>; 2]; 3] = [[None; 2]; 3];
    let groups: Vec<u8> = {
        let mut g: Vec<u8> = geom.carrier.to_vec();
        g.sort_unstable();
        g.dedup();
        g
    };
    for group in groups {
        let members: Vec<usize> = (0..3).filter(|&l| geom.carrier[l] == group).collect();
        solve_group(q, geom, &members, &mut params)?;
    }

    let mut out = Vec::with_capacity(3);
    for line in 0..3 {
        let st = geom.lines[line].at(params[line][0].expect("solved"));
        let ed = geom.lines[line].at(params[line][1].expect("solved"));
        let d = Dipole::new(st, ed).map_err(|_| {
            CondensedError::MalformedQcc(format!("dipole {line} realized with coincident endpoints"))
        })?;
        out.push(d);
    }
    Ok([out[0], out[1], out[2]])
}

/// Solves endpoint and segmentation-point positions for the lines sharing one
/// carrier. Node layout per member: S-point, E-point, start, end.
fn solve_group(
    q: &Qcc,
    geom: &ConfigGeom,
    members: &[usize],
    params: &mut [[Option<Rational>; 2]; 3],
) -> Result<(), CondensedError> {
    let k = members.len();
    let mut solver = OrderSolver::new(4 * k);
    let svar = |i: usize| 4 * i;
    let evar = |i: usize| 4 * i + 1;
    let pvar = |i: usize, which: usize| 4 * i + 2 + which;
    let malformed =
        |msg: String| CondensedError::MalformedQcc(format!("{msg} (qcc {})", q.encode()));

    for (i, &line) in members.iter().enumerate() {
        solver.less(svar(i), evar(i));
        for (slot, var) in [(0, svar(i)), (1, evar(i))] {
            if let Some(label) = q.assignment[line][slot] {
                let p = geom
                    .anchor_param(line, label)
                    .expect("assignment validated");
                solver.pin(var, p).map_err(malformed)?;
            }
        }
        for which in 0..2 {
            let seg = if which == 0 {
                q.dipoles[line].st
            } else {
                q.dipoles[line].ed
            };
            let p = pvar(i, which);
            match seg {
                Seg::B => solver.less(p, svar(i)),
                Seg::S => solver.union(p, svar(i)).map_err(malformed)?,
                Seg::I => {
                    solver.less(svar(i), p);
                    solver.less(p, evar(i));
                }
                Seg::E => solver.union(p, evar(i)).map_err(malformed)?,
                Seg::F => solver.less(evar(i), p),
            }
        }
        match q.dirs[line] {
            Dir::Plus => solver.less(pvar(i, 0), pvar(i, 1)),
            Dir::Minus => solver.less(pvar(i, 1), pvar(i, 0)),
        }
    }

    if k > 1 {
        // Coincident members share one segmentation (the classifiers compare
        // their segment letters directly, which is only meaningful against a
        // common scale).
        for i in 1..k {
            solver.union(svar(0), svar(i)).map_err(malformed)?;
            solver.union(evar(0), evar(i)).map_err(malformed)?;
        }
        // `<_p` order between endpoints.
        let endpoint = |i: usize, which: usize| {
            let line = members[i];
            let seg = if which == 0 {
                q.dipoles[line].st
            } else {
                q.dipoles[line].ed
            };
            (q.ranks[line][which], seg)
        };
        for i in 0..k {
            for wi in 0..2 {
                for j in 0..k {
                    for wj in 0..2 {
                        if (i, wi) >= (j, wj) {
                            continue;
                        }
                        let (ri, si) = endpoint(i, wi);
                        let (rj, sj) = endpoint(j, wj);
                        match (ri, rj) {
                            (Some(a), Some(b)) => match a.cmp(&b) {
                                Ordering::Less => solver.less(pvar(i, wi), pvar(j, wj)),
                                Ordering::Greater => solver.less(pvar(j, wj), pvar(i, wi)),
                                Ordering::Equal => solver
                                    .union(pvar(i, wi), pvar(j, wj))
                                    .map_err(malformed)?,
                            },
                            _ if i != j
                                && si == sj
                                && matches!(si, Seg::B | Seg::I | Seg::F) =>
                            {
                                return Err(malformed(format!(
                                    "endpoints of lines {} and {} share segment {} but have no <_p order",
                                    members[i], members[j], si.as_char()
                                )));
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }

    let values = solver.solve().map_err(malformed)?;
    for (i, &line) in members.iter().enumerate() {
        params[line][0] = Some(values[pvar(i, 0)]);
        params[line][1] = Some(values[pvar(i, 1)]);
    }
    Ok(())
}

/// All `(AbstractDipole, Dir)` variants over a segment alphabet: direction is
/// forced when the segments differ and free when they coincide.
fn dipole_variants(alphabet: &[Seg]) -> Vec<(AbstractDipole, Dir)> {
    let mut out = Vec::new();
    for &st in alphabet {
        for &ed in alphabet {
            let Some(dp) = AbstractDipole::new(st, ed) else {
                continue;
            };
            match st.cmp(&ed) {
                Ordering::Less => out.push((dp, Dir::Plus)),
                Ordering::Greater => out.push((dp, Dir::Minus)),
                Ordering::Equal => {
                    out.push((dp, Dir::Plus));
                    out.push((dp, Dir::Minus));
                }
            }
        }
    }
    out
}

const FULL: [Seg; 5] = [Seg::B, Seg::S, Seg::I, Seg::E, Seg::F];
const ANCHOR_AT_S: [Seg; 3] = [Seg::B, Seg::S, Seg::I];
const ANCHOR_AT_E: [Seg; 3] = [Seg::I, Seg::E, Seg::F];

/// Segment of a grid position relative to an anchor sitting at `anchor` in
/// slot `slot`.
fn grid_seg(v: i64, anchor: i64, slot: Slot) -> Seg {
    match (v.cmp(&anchor), slot) {
        (Ordering::Less, Slot::S) => Seg::B,
        (Ordering::Equal, Slot::S) => Seg::S,
        (Ordering::Greater, Slot::S) => Seg::I,
        (Ordering::Less, Slot::E) => Seg::I,
        (Ordering::Equal, Slot::E) => Seg::E,
        (Ordering::Greater, Slot::E) => Seg::F,
    }
}

fn dir_of(vs: i64, ve: i64) -> Dir {
    if vs < ve {
        Dir::Plus
    } else {
        Dir::Minus
    }
}

/// Enumerates the qccs of one configuration in a fixed deterministic order.
///
/// The stream is *optimized* in the paper's sense: per-line segment variants
/// are enumerated against canonical slot layouts, order data is generated
/// only on shared carriers (as integer grid positions: {0..8} around a
/// central anchor for the crossed coincident pairs, {0..3} for the plain
/// coincident pairs, {0..5} for three coincident lines), and redundant
/// relabellings of free segmentation points are skipped. Every realizable
/// three-dipole situation is covered up to these symmetries; the
/// realize-and-compare loop in [`tables`] and the randomized soundness audit
/// are the checks this claim is anchored to.
pub fn enumerate_config(id: ConfigId) -> Vec<Qcc> {
    let geom = config_geom(id);
    let mut out = Vec::new();

    // Lines on sole carriers, by anchor count.
    let line_variants = |line: usize, slot_choice: Option<Slot>| -> (Vec<(AbstractDipole, Dir)>, [Option<IsectLabel>; 2]) {
        let anchors = geom.anchors_on_line(line);
        match (anchors.len(), slot_choice) {
            (2, _) => (
                dipole_variants(&FULL),
                [Some(anchors[0].0), Some(anchors[1].0)],
            ),
            (1, Some(Slot::S)) => (
                dipole_variants(&ANCHOR_AT_S),
                [Some(anchors[0].0), None],
            ),
            (1, Some(Slot::E)) => (
                dipole_variants(&ANCHOR_AT_E),
                [None, Some(anchors[0].0)],
            ),
            (0, _) => (dipole_variants(&[Seg::I]), [None, None]),
            _ => unreachable!("slot choice required iff the line has one anchor"),
        }
    };

    let shared: Vec<usize> = (0..3)
        .filter(|&l| geom.carrier.iter().filter(|&&c| c == geom.carrier[l]).count() > 1)
        .collect();
    let sole: Vec<usize> = (0..3).filter(|l| !shared.contains(l)).collect();

    if shared.is_empty() {
        // 1+/1-/2+/2-/3*/5*: independent per-line variants; one slot choice
        // per single-anchor line.
        let slot_choices = |line: usize| -> Vec<Option<Slot>> {
            match geom.anchors_on_line(line).len() {
                1 => vec![Some(Slot::S), Some(Slot::E)],
                _ => vec![None],
            }
        };
        for ca in slot_choices(0) {
            for cb in slot_choices(1) {
                for cc in slot_choices(2) {
                    let (va, aa) = line_variants(0, ca);
                    let (vb, ab) = line_variants(1, cb);
                    let (vc, ac) = line_variants(2, cc);
                    for &(dpa, dira) in &va {
                        for &(dpb, dirb) in &vb {
                            for &(dpc, dirc) in &vc {
                                out.push(Qcc {
                                    config: id,
                                    assignment: [aa, ab, ac],
                                    dipoles: [dpa, dpb, dpc],
                                    dirs: [dira, dirb, dirc],
                                    ranks: [[None; 2]; 3],
                                });
                            }
                        }
                    }
                }
            }
        }
        return out;
    }

    // Configurations with a shared carrier: 4*, 6*, 7.
    let has_anchor = !geom.anchors.is_empty();
    let (grid, anchor_pos) = match (shared.len(), has_anchor) {
        (2, true) => (0..9, Some(4i64)),  // 4*: anchored shared pair
        (2, false) => (0..4, None),       // 6*: free shared pair
        (3, false) => (0..6, None),       // 7: all three shared
        _ => unreachable!("no configuration has three shared lines with an anchor"),
    };

    // Values for the shared members' endpoints.
    let mut member_placements: Vec<Vec<(i64, i64)>> = vec![Vec::new(); shared.len()];
    for (mi, placements) in member_placements.iter_mut().enumerate() {
        let _ = mi;
        for vs in grid.clone() {
            for ve in grid.clone() {
                if vs != ve {
                    placements.push((vs, ve));
                }
            }
        }
    }

    let group_slots: Vec<Option<Slot>> = if has_anchor {
        vec![Some(Slot::S), Some(Slot::E)]
    } else {
        vec![None]
    };
    let sole_slot_choices: Vec<Option<Slot>> = match sole
        .first()
        .map(|&l| geom.anchors_on_line(l).len())
    {
        Some(1) => vec![Some(Slot::S), Some(Slot::E)],
        Some(0) => vec![None],
        None => vec![None], // config 7: no sole line; dummy single pass
        _ => unreachable!(),
    };

    for &group_slot in &group_slots {
        for &sole_slot in &sole_slot_choices {
            let sole_data = sole.first().map(|&l| (l, line_variants(l, sole_slot)));
            let mut emit = |placement: &[(i64, i64)], sole_variant: Option<(usize, (AbstractDipole, Dir), [Option<IsectLabel>; 2])>| {
                let mut assignment = [[None; 2]; 3];
                let mut dipoles = [AbstractDipole { st: Seg::I, ed: Seg::I }; 3];
                let mut dirs = [Dir::Plus; 3];
                let mut ranks = [[None; 2]; 3];
                for (mi, &line) in shared.iter().enumerate() {
                    let (vs, ve) = placement[mi];
                    let (st, ed) = match (group_slot, anchor_pos) {
                        (Some(slot), Some(ap)) => {
                            assignment[line][slot.index()] = Some(IsectLabel::ABC);
                            (grid_seg(vs, ap, slot), grid_seg(ve, ap, slot))
                        }
                        _ => (Seg::I, Seg::I),
                    };
                    dipoles[line] = AbstractDipole { st, ed };
                    dirs[line] = dir_of(vs, ve);
                    ranks[line] = [Some(vs as u8), Some(ve as u8)];
                }
                if let Some((line, (dp, dir), asg)) = sole_variant {
                    assignment[line] = asg;
                    dipoles[line] = dp;
                    dirs[line] = dir;
                }
                out.push(Qcc {
                    config: id,
                    assignment,
                    dipoles,
                    dirs,
                    ranks,
                });
            };

            // Iterate the cartesian product of member placements.
            let mut placement = vec![(0i64, 0i64); shared.len()];
            let mut stack = vec![0usize; shared.len()];
            let mut depth = 0usize;
            loop {
                if depth == shared.len() {
                    match &sole_data {
                        Some((line, (variants, asg))) => {
                            for &(dp, dir) in variants {
                                emit(&placement, Some((*line, (dp, dir), *asg)));
                            }
                        }
                        None => emit(&placement, None),
                    }
                    depth -= 1;
                    stack[depth] += 1;
                    continue;
                }
                if stack[depth] >= member_placements[depth].len() {
                    if depth == 0 {
                        break;
                    }
                    stack[depth] = 0;
                    depth -= 1;
                    stack[depth] += 1;
                    continue;
                }
                placement[depth] = member_placements[depth][stack[depth]];
                depth += 1;
            }
        }
    }

    out
}

/// Streams every enumerated qcc across all 17 configurations, in
/// configuration order.
pub fn enumerate_qccs() -> impl Iterator<Item = Qcc> {
    ConfigId::ALL.into_iter().flat_map(enumerate_config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dra_f_relation;

    #[test]
    fn abstract_dipoles_number_23() {
        assert_eq!(dipole_variants(&FULL).len(), 26); // 23 segment pairs, 3 of them with both directions
        let pairs: std::collections::HashSet<_> = dipole_variants(&FULL)
            .into_iter()
            .map(|(d, _)| (d.st, d.ed))
            .collect();
        assert_eq!(pairs.len(), 23);
    }

    #[test]
    fn catalog_geometry_is_coherent() {
        for id in ConfigId::ALL {
            let geom = config_geom(id);
            // Anchors lie where every participating line says they do.
            for a in &geom.anchors {
                let pts: Vec<Point> = (0..3)
                    .filter_map(|l| a.param[l].map(|t| geom.lines[l].at(t)))
                    .collect();
                assert!(pts.len() >= 2, "{id}: anchor on fewer than two lines");
                assert!(
                    pts.windows(2).all(|w| w[0] == w[1]),
                    "{id}: anchor parameter mismatch"
                );
            }
            // Realization angle constraint: ray A to rays B and C in (pi, 2pi].
            for other in [1, 2] {
                let (ax, ay) = geom.lines[0].dir;
                let (ox, oy) = geom.lines[other].dir;
                assert!(
                    cross(ax, ay, ox, oy).signum() <= 0,
                    "{id}: ray angle constraint violated for line {other}"
                );
            }
            // Coincident carriers share base and direction so parameters align.
            for x in 0..3 {
                for y in (x + 1)..3 {
                    if geom.carrier[x] == geom.carrier[y] {
                        assert_eq!(geom.lines[x].base, geom.lines[y].base);
                        assert_eq!(geom.lines[x].dir, geom.lines[y].dir);
                    }
                }
            }
        }
    }

    #[test]
    fn assignment_candidates_match_definition() {
        // Brute-force partial maps for line A of config 1+: two intersection
        // points on the line admit exactly the two bijections onto {S_A, E_A}.
        let geom = config_geom(ConfigId::C1Plus);
        let labels: Vec<IsectLabel> = geom
            .anchors_on_line(0)
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        let mut count = 0;
        let options = [None, Some(labels[0]), Some(labels[1])];
        for s in options {
            for e in options {
                let assigned: Vec<_> = [s, e].into_iter().flatten().collect();
                let distinct = s.is_none() || e.is_none() || s != e;
                let maximal = assigned.len() == labels.len();
                let compatible = assigned.iter().all(|l| l.involves(0));
                if distinct && maximal && compatible {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 2);
        // Config 5a has no intersections, so nothing may be assigned.
        assert!(config_geom(ConfigId::C5a).anchors.is_empty());
    }

    #[test]
    fn realize_total_coincidence_gives_identical_dipoles() {
        let dp = AbstractDipole {
            st: Seg::S,
            ed: Seg::E,
        };
        let q = Qcc {
            config: ConfigId::C7,
            assignment: [[None; 2]; 3],
            dipoles: [dp; 3],
            dirs: [Dir::Plus; 3],
            ranks: [[Some(0), Some(1)]; 3],
        };
        let [a, b, c] = realize_qcc(&q).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert_eq!(dra_f_relation(&a, &b).to_string(), "sese");
    }

    #[test]
    fn realize_recovers_the_worked_parallel_example() {
        // Config 3b with A and B anchored at their S slots, dipole data from
        // the construction that recovers a qcc from three concrete dipoles.
        let q = Qcc {
            config: ConfigId::C3b,
            assignment: [
                [Some(IsectLabel::AC), None],
                [Some(IsectLabel::BC), None],
                [Some(IsectLabel::BC), Some(IsectLabel::AC)],
            ],
            dipoles: [
                AbstractDipole {
                    st: Seg::E,
                    ed: Seg::F,
                },
                AbstractDipole {
                    st: Seg::E,
                    ed: Seg::I,
                },
                AbstractDipole {
                    st: Seg::B,
                    ed: Seg::B,
                },
            ],
            dirs: [Dir::Plus, Dir::Minus, Dir::Minus],
            ranks: [[None; 2]; 3],
        };
        let [a, b, c] = realize_qcc(&q).unwrap();
        // Directions on the canonical rays.
        let geom = config_geom(ConfigId::C3b);
        let (ux, uy) = geom.lines[0].dir;
        let (vx, vy) = a.direction();
        assert!(cross(ux, uy, vx, vy).is_zero() && (ux * vx + uy * vy).signum() > 0);
        let (ux, uy) = geom.lines[1].dir;
        let (vx, vy) = b.direction();
        assert!((ux * vx + uy * vy).signum() < 0, "dp_B runs against its ray");
        let (ux, uy) = geom.lines[2].dir;
        let (vx, vy) = c.direction();
        assert!((ux * vx + uy * vy).signum() < 0, "dp_C runs against its ray");
        // A and B are parallel dipoles on distinct carriers; C crosses both.
        let rel = dra_f_relation(&a, &b).to_string();
        assert!(rel.chars().all(|ch| ch == 'l' || ch == 'r'), "{rel}");
    }

    #[test]
    fn realize_rejects_contradictory_qccs() {
        // S slot mapped to the later of the two anchors on line A of 1+:
        // violates the ray-order of segmentation points.
        let dp = AbstractDipole {
            st: Seg::I,
            ed: Seg::I,
        };
        let base = Qcc {
            config: ConfigId::C1Plus,
            assignment: [
                [Some(IsectLabel::AC), Some(IsectLabel::AB)],
                [Some(IsectLabel::AB), Some(IsectLabel::BC)],
                [Some(IsectLabel::AC), Some(IsectLabel::BC)],
            ],
            dipoles: [dp; 3],
            dirs: [Dir::Plus; 3],
            ranks: [[None; 2]; 3],
        };
        assert!(matches!(
            realize_qcc(&base),
            Err(CondensedError::MalformedQcc(_))
        ));

        // Non-maximal assignment.
        let mut nonmax = base.clone();
        nonmax.assignment[0] = [Some(IsectLabel::AB), None];
        nonmax.assignment[1] = [Some(IsectLabel::AB), Some(IsectLabel::BC)];
        nonmax.assignment[2] = [Some(IsectLabel::AC), Some(IsectLabel::BC)];
        assert!(matches!(
            realize_qcc(&nonmax),
            Err(CondensedError::MalformedQcc(_))
        ));

        // Direction contradicting segments.
        let mut baddir = base.clone();
        baddir.assignment[0] = [Some(IsectLabel::AB), Some(IsectLabel::AC)];
        baddir.dipoles[0] = AbstractDipole {
            st: Seg::B,
            ed: Seg::I,
        };
        baddir.dirs[0] = Dir::Minus;
        assert!(matches!(
            realize_qcc(&baddir),
            Err(CondensedError::MalformedQcc(_))
        ));

        // Shared carrier with a same-segment tie but no order data.
        let shared = Qcc {
            config: ConfigId::C7,
            assignment: [[None; 2]; 3],
            dipoles: [dp; 3],
            dirs: [Dir::Plus; 3],
            ranks: [[None; 2]; 3],
        };
        assert!(matches!(
            realize_qcc(&shared),
            Err(CondensedError::MalformedQcc(_))
        ));
    }

    #[test]
    fn enumeration_counts_per_configuration() {
        let count = |id| enumerate_config(id).len();
        assert_eq!(count(ConfigId::C1Plus), 26 * 26 * 26);
        assert_eq!(count(ConfigId::C1Minus), 26 * 26 * 26);
        assert_eq!(count(ConfigId::C2Plus), 8 * 10 * 10 * 10);
        assert_eq!(count(ConfigId::C3a), 4 * 26 * 10 * 10);
        assert_eq!(count(ConfigId::C4a), 4 * (9 * 8) * (9 * 8) * 10);
        assert_eq!(count(ConfigId::C5a), 8);
        assert_eq!(count(ConfigId::C6a), (4 * 3) * (4 * 3) * 2);
        assert_eq!(count(ConfigId::C7), 30 * 30 * 30);
    }

    #[test]
    fn every_enumerated_qcc_realizes() {
        // The full loop runs in the table builder; here spot-check the
        // configurations with distinct structure.
        for id in [
            ConfigId::C1Plus,
            ConfigId::C2Minus,
            ConfigId::C3b,
            ConfigId::C5c,
            ConfigId::C6b,
        ] {
            for q in enumerate_config(id) {
                realize_qcc(&q).unwrap_or_else(|e| panic!("{id}: {e} for {q}"));
            }
        }
    }

    #[test]
    fn qcc_encoding_round_trips() {
        for q in enumerate_config(ConfigId::C4b).into_iter().step_by(997) {
            let text = q.encode();
            assert_eq!(Qcc::decode(&text).unwrap(), q, "{text}");
        }
    }
}
