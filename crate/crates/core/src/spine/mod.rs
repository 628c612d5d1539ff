//! Thurston's spine of the figure-eight knot complement and connector complexes on it.
//!
//! The spine σ has two hexagons `X`, `Y`, four edges `a`, `b`, `c`, `d` and two
//! vertices `P1`, `P2`. Sides of a hexagon are numbered `0..6` cyclically; side
//! `k` runs from corner `k` to corner `k + 1`. Even corners sit at `P1`, odd
//! corners at `P2`.
//!
//! The boundary torus `T` is tiled by four hexagons, two over each hexagon of
//! σ, and a connector lifts to one arc in each of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::traintrack::{Branch, BranchEnd, EndKind, Switch, TrackError, TrainTrack};

mod qtypes;

pub use qtypes::{canonical_qtypes, qtype, LawReport, LawViolation, QType, QTypeError, SlopeLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hexagon {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    P1,
    P2,
}

impl Hexagon {
    pub const ALL: [Hexagon; 2] = [Hexagon::X, Hexagon::Y];

    fn index(self) -> usize {
        self as usize
    }

    fn other(self) -> Self {
        match self {
            Hexagon::X => Hexagon::Y,
            Hexagon::Y => Hexagon::X,
        }
    }
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::A, Edge::B, Edge::C, Edge::D];

    fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        ['a', 'b', 'c', 'd'][self.index()]
    }
}

impl fmt::Display for Hexagon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

use Edge::{A, B, C, D};

const SIDES: [[Edge; 6]; 2] = [[C, A, B, D, A, B], [B, C, D, A, C, D]];

/// The spine σ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Spine;

impl Spine {
    /// Edge of σ carrying side `k` of `h`.
    pub fn side_edge(&self, h: Hexagon, k: usize) -> Edge {
        SIDES[h.index()][k % 6]
    }

    pub fn corner_vertex(&self, _h: Hexagon, k: usize) -> Vertex {
        if k % 2 == 0 {
            Vertex::P1
        } else {
            Vertex::P2
        }
    }

    /// The sides of `h` as edge letters, e.g. `"cabdab"`.
    pub fn boundary_word(&self, h: Hexagon) -> String {
        SIDES[h.index()].iter().map(|e| e.letter()).collect()
    }

    /// Number of hexagon sides lying on `e`. Every edge is triple.
    pub fn valence(&self, e: Edge) -> usize {
        SIDES.iter().flatten().filter(|&&x| x == e).count()
    }

    pub fn symmetries(&self) -> Vec<Symmetry> {
        symmetry_table()
    }
}

/// A combinatorial automorphism of σ.
///
/// `dihedral[h] = (1, s)` rotates sides `k ↦ k + s`; `(-1, s)` reflects `k ↦ s − 1 − k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub swap_hexagons: bool,
    pub dihedral: [(i8, u8); 2],
    /// Images of `a, b, c, d`.
    pub edges: [Edge; 4],
    pub swap_vertices: bool,
}

impl Symmetry {
    pub fn hexagon(&self, h: Hexagon) -> Hexagon {
        if self.swap_hexagons {
            h.other()
        } else {
            h
        }
    }

    pub fn side(&self, h: Hexagon, k: usize) -> usize {
        let (e, s) = self.dihedral[h.index()];
        let (k, s) = (k as i64, i64::from(s));
        (if e == 1 { k + s } else { s - 1 - k }).rem_euclid(6) as usize
    }

    pub fn corner(&self, h: Hexagon, k: usize) -> usize {
        let (e, s) = self.dihedral[h.index()];
        let (k, s) = (k as i64, i64::from(s));
        (if e == 1 { k + s } else { s - k }).rem_euclid(6) as usize
    }

    pub fn edge(&self, e: Edge) -> Edge {
        self.edges[e.index()]
    }

    pub fn vertex(&self, v: Vertex) -> Vertex {
        match (self.swap_vertices, v) {
            (false, v) => v,
            (true, Vertex::P1) => Vertex::P2,
            (true, Vertex::P2) => Vertex::P1,
        }
    }

    /// True iff the map sends sides to sides and corners to corners compatibly with σ.
    pub fn preserves_incidence(&self) -> bool {
        let sp = Spine;
        Hexagon::ALL.iter().all(|&h| {
            let g = self.hexagon(h);
            (0..6).all(|k| {
                sp.side_edge(g, self.side(h, k)) == self.edge(sp.side_edge(h, k))
                    && sp.corner_vertex(g, self.corner(h, k)) == self.vertex(sp.corner_vertex(h, k))
                    && [self.corner(h, k), self.corner(h, k + 1)].contains(&self.side(h, k))
                    && [self.corner(h, k), self.corner(h, k + 1)].contains(&((self.side(h, k) + 1) % 6))
            })
        })
    }

    /// Hexagon swaps reverse the orientation of the knot complement, and with it the sign of slopes.
    pub fn reverses_slopes(&self) -> bool {
        self.swap_hexagons
    }

    pub fn apply(&self, c: &Connector) -> Connector {
        let h = self.hexagon(c.hexagon);
        let (i, j) = (self.side(c.hexagon, c.sides.0), self.side(c.hexagon, c.sides.1));
        Connector::new(h, i, j).expect("symmetry maps connectors to connectors")
    }

    pub fn compose(&self, then: &Symmetry) -> Symmetry {
        let mut dihedral = [(1, 0); 2];
        for h in Hexagon::ALL {
            let g = self.hexagon(h);
            let s0 = then.side(g, self.side(h, 0));
            let s1 = then.side(g, self.side(h, 1));
            dihedral[h.index()] = if (s1 + 6 - s0) % 6 == 1 {
                (1, s0 as u8)
            } else {
                (-1, ((s0 + 1) % 6) as u8)
            };
        }
        Symmetry {
            swap_hexagons: self.swap_hexagons ^ then.swap_hexagons,
            dihedral,
            edges: Edge::ALL.map(|e| then.edge(self.edge(e))),
            swap_vertices: self.swap_vertices ^ then.swap_vertices,
        }
    }
}

fn symmetry_table() -> Vec<Symmetry> {
    let rows: [(bool, [(i8, u8); 2], [Edge; 4], bool); 8] = [
        (false, [(1, 0), (1, 0)], [A, B, C, D], false),
        (false, [(-1, 1), (1, 3)], [B, A, C, D], true),
        (false, [(1, 3), (-1, 1)], [A, B, D, C], true),
        (false, [(-1, 4), (-1, 4)], [B, A, D, C], false),
        (true, [(-1, 4), (1, 0)], [D, C, A, B], false),
        (true, [(1, 3), (1, 3)], [C, D, A, B], true),
        (true, [(-1, 1), (-1, 1)], [D, C, B, A], true),
        (true, [(1, 0), (-1, 4)], [C, D, B, A], false),
    ];
    rows.iter()
        .map(|&(swap_hexagons, dihedral, edges, swap_vertices)| Symmetry {
            swap_hexagons,
            dihedral,
            edges,
            swap_vertices,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectorKind {
    Short,
    Medium,
    Long,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpineError {
    #[error("side {0} out of range")]
    Side(usize),
    #[error("connector joins side {0} to itself")]
    SameSide(usize),
    #[error("connector {0} has weight zero")]
    ZeroWeight(String),
    #[error("connector {0} listed twice")]
    Duplicate(String),
    #[error("connectors {0} and {1} cross")]
    Crossing(String, String),
    #[error("lifted arcs end on one side of {0} only; the track would have a monogon")]
    Monogon(String),
    #[error(transparent)]
    Track(#[from] TrackError),
}

/// A normal arc in a hexagon of σ, joining two distinct sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ConnectorDoc", into = "ConnectorDoc")]
pub struct Connector {
    hexagon: Hexagon,
    sides: (usize, usize),
}

#[derive(Serialize, Deserialize)]
struct ConnectorDoc {
    hexagon: Hexagon,
    sides: [usize; 2],
}

impl TryFrom<ConnectorDoc> for Connector {
    type Error = SpineError;
    fn try_from(d: ConnectorDoc) -> Result<Self, SpineError> {
        Connector::new(d.hexagon, d.sides[0], d.sides[1])
    }
}

impl From<Connector> for ConnectorDoc {
    fn from(c: Connector) -> Self {
        ConnectorDoc {
            hexagon: c.hexagon,
            sides: [c.sides.0, c.sides.1],
        }
    }
}

impl Connector {
    pub fn new(hexagon: Hexagon, i: usize, j: usize) -> Result<Self, SpineError> {
        for k in [i, j] {
            if k >= 6 {
                return Err(SpineError::Side(k));
            }
        }
        if i == j {
            return Err(SpineError::SameSide(i));
        }
        Ok(Connector {
            hexagon,
            sides: (i.min(j), i.max(j)),
        })
    }

    pub fn hexagon(&self) -> Hexagon {
        self.hexagon
    }

    /// The two sides, smaller first.
    pub fn sides(&self) -> (usize, usize) {
        self.sides
    }

    pub fn kind(&self) -> ConnectorKind {
        match self.sides.1 - self.sides.0 {
            1 | 5 => ConnectorKind::Short,
            2 | 4 => ConnectorKind::Medium,
            _ => ConnectorKind::Long,
        }
    }

    /// Corner enclosed by a short connector.
    pub fn corner(&self) -> Option<usize> {
        let (i, j) = self.sides;
        match j - i {
            1 => Some(j),
            5 => Some(0),
            _ => None,
        }
    }

    /// Side skipped by a medium connector.
    pub fn skipped_side(&self) -> Option<usize> {
        let (i, j) = self.sides;
        match j - i {
            2 => Some(i + 1),
            4 => Some((j + 1) % 6),
            _ => None,
        }
    }

    /// `s1..s6` in `X` and `t1..t6` in `Y` for shorts, `m_*` for mediums and
    /// `l_*` for longs, primed in `Y`.
    pub fn label(&self) -> String {
        let sp = Spine;
        let h = self.hexagon;
        let prime = if h == Hexagon::Y { "'" } else { "" };
        match self.kind() {
            ConnectorKind::Short => {
                let c = self.corner().unwrap();
                let n = (c + 4) % 6 + 1;
                format!("{}{}", if h == Hexagon::X { 's' } else { 't' }, n)
            }
            ConnectorKind::Medium => {
                let k = self.skipped_side().unwrap();
                let e = sp.side_edge(h, k);
                if (0..6).filter(|&x| sp.side_edge(h, x) == e).count() == 1 {
                    format!("m_{e}{prime}")
                } else {
                    format!("m_{e}{k}{prime}")
                }
            }
            ConnectorKind::Long => {
                let (i, j) = self.sides;
                format!("l_{}{}{prime}", sp.side_edge(h, i), sp.side_edge(h, j))
            }
        }
    }

    /// Whether the two connectors must intersect inside their common hexagon.
    pub fn crosses(&self, other: &Connector) -> bool {
        if self.hexagon != other.hexagon {
            return false;
        }
        let (i, j) = self.sides;
        let (k, l) = other.sides;
        if [i, j].contains(&k) || [i, j].contains(&l) {
            return false;
        }
        let inside = |x| i < x && x < j;
        inside(k) != inside(l)
    }
}

impl fmt::Display for Connector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeightCase {
    CdZero,
    AcZero,
    CZero,
    AllPositive,
}

impl fmt::Display for WeightCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightCase::CdZero => "CD_ZERO",
            WeightCase::AcZero => "AC_ZERO",
            WeightCase::CZero => "C_ZERO",
            WeightCase::AllPositive => "ALL_POSITIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightedDoc", into = "WeightedDoc")]
pub struct WeightedConnector {
    pub connector: Connector,
    pub weight: u32,
}

#[derive(Serialize, Deserialize)]
struct WeightedDoc {
    hexagon: Hexagon,
    sides: [usize; 2],
    weight: u32,
}

impl TryFrom<WeightedDoc> for WeightedConnector {
    type Error = SpineError;
    fn try_from(d: WeightedDoc) -> Result<Self, SpineError> {
        Ok(WeightedConnector {
            connector: Connector::new(d.hexagon, d.sides[0], d.sides[1])?,
            weight: d.weight,
        })
    }
}

impl From<WeightedConnector> for WeightedDoc {
    fn from(w: WeightedConnector) -> Self {
        let (i, j) = w.connector.sides;
        WeightedDoc {
            hexagon: w.connector.hexagon,
            sides: [i, j],
            weight: w.weight,
        }
    }
}

/// A weighted family of pairwise disjoint connectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<WeightedConnector>", into = "Vec<WeightedConnector>")]
pub struct QComplex {
    connectors: Vec<WeightedConnector>,
}

impl TryFrom<Vec<WeightedConnector>> for QComplex {
    type Error = SpineError;
    fn try_from(v: Vec<WeightedConnector>) -> Result<Self, SpineError> {
        QComplex::new(v)
    }
}

impl From<QComplex> for Vec<WeightedConnector> {
    fn from(q: QComplex) -> Self {
        q.connectors
    }
}

impl QComplex {
    pub fn new(connectors: Vec<WeightedConnector>) -> Result<Self, SpineError> {
        let mut seen = BTreeSet::new();
        for w in &connectors {
            if w.weight == 0 {
                return Err(SpineError::ZeroWeight(w.connector.label()));
            }
            if !seen.insert(w.connector) {
                return Err(SpineError::Duplicate(w.connector.label()));
            }
        }
        for (n, x) in connectors.iter().enumerate() {
            for y in &connectors[n + 1..] {
                if x.connector.crosses(&y.connector) {
                    return Err(SpineError::Crossing(x.connector.label(), y.connector.label()));
                }
            }
        }
        Ok(QComplex { connectors })
    }

    /// Every connector with weight one.
    pub fn unit(connectors: &[Connector]) -> Result<Self, SpineError> {
        Self::new(
            connectors
                .iter()
                .map(|&c| WeightedConnector {
                    connector: c,
                    weight: 1,
                })
                .collect(),
        )
    }

    pub fn empty() -> Self {
        QComplex { connectors: Vec::new() }
    }

    pub fn connectors(&self) -> &[WeightedConnector] {
        &self.connectors
    }

    pub fn support(&self) -> Vec<Connector> {
        self.connectors.iter().map(|w| w.connector).collect()
    }

    /// Weighted number of connector ends on each hexagon side.
    pub fn side_counts(&self) -> [[u32; 6]; 2] {
        let mut out = [[0; 6]; 2];
        for w in &self.connectors {
            let (i, j) = w.connector.sides;
            out[w.connector.hexagon.index()][i] += w.weight;
            out[w.connector.hexagon.index()][j] += w.weight;
        }
        out
    }

    /// `w_a, w_b, w_c, w_d`: connector ends over all sides lying on each edge.
    pub fn edge_weights(&self) -> BTreeMap<Edge, u32> {
        let sp = Spine;
        let counts = self.side_counts();
        let mut out: BTreeMap<Edge, u32> = Edge::ALL.iter().map(|&e| (e, 0)).collect();
        for h in Hexagon::ALL {
            for k in 0..6 {
                *out.get_mut(&sp.side_edge(h, k)).unwrap() += counts[h.index()][k];
            }
        }
        out
    }

    /// True iff all three sides on each edge meet the same number of connector ends.
    pub fn is_measured(&self) -> bool {
        let sp = Spine;
        let counts = self.side_counts();
        Edge::ALL.iter().all(|&e| {
            let v: BTreeSet<u32> = Hexagon::ALL
                .iter()
                .flat_map(|&h| {
                    (0..6)
                        .filter(move |&k| sp.side_edge(h, k) == e)
                        .map(move |k| counts[h.index()][k])
                })
                .collect();
            v.len() == 1
        })
    }

    pub fn support_edges(&self) -> BTreeSet<Edge> {
        self.edge_weights()
            .into_iter()
            .filter(|&(_, w)| w > 0)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn transform(&self, g: &Symmetry) -> Self {
        let connectors = self
            .connectors
            .iter()
            .map(|w| WeightedConnector {
                connector: g.apply(&w.connector),
                weight: w.weight,
            })
            .collect();
        QComplex { connectors }
    }

    /// The first case whose vanishing edges can be reached by a symmetry, and that symmetry.
    pub fn normalize(&self) -> (WeightCase, Symmetry) {
        let support = self.support_edges();
        let cases = [
            (WeightCase::CdZero, vec![C, D]),
            (WeightCase::AcZero, vec![A, C]),
            (WeightCase::CZero, vec![C]),
        ];
        let syms = symmetry_table();
        for (case, zero) in cases {
            for g in &syms {
                if support.iter().all(|&e| !zero.contains(&g.edge(e))) {
                    return (case, *g);
                }
            }
        }
        (WeightCase::AllPositive, syms[0])
    }

    pub fn case_of(&self) -> WeightCase {
        self.normalize().0
    }

    /// Pairs of short connectors around the same vertex whose sides share an edge.
    pub fn adjacent_short_pairs(&self) -> Vec<(Connector, Connector)> {
        let sp = Spine;
        let shorts: Vec<Connector> = self
            .support()
            .into_iter()
            .filter(|c| c.kind() == ConnectorKind::Short)
            .collect();
        let mut out = Vec::new();
        for (n, x) in shorts.iter().enumerate() {
            for y in &shorts[n + 1..] {
                let vx = sp.corner_vertex(x.hexagon, x.corner().unwrap());
                let vy = sp.corner_vertex(y.hexagon, y.corner().unwrap());
                let ex = [sp.side_edge(x.hexagon, x.sides.0), sp.side_edge(x.hexagon, x.sides.1)];
                let ey = [sp.side_edge(y.hexagon, y.sides.0), sp.side_edge(y.hexagon, y.sides.1)];
                if vx == vy && ex.iter().any(|e| ey.contains(e)) {
                    out.push((*x, *y));
                }
            }
        }
        out
    }

    /// The train track `B ∩ T` together with the covering projection.
    pub fn boundary_double_cover(&self) -> Result<DoubleCover, SpineError> {
        boundary_double_cover(self)
    }
}

/// One of the four hexagons tiling `T`: the lift of `hexagon` at the given end of its edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sheet {
    pub hexagon: Hexagon,
    pub end: u8,
}

/// Position of the lifted sides in `H₁(T)` relative to a base side, per sheet, as `(p, q)`.
fn potential(s: Sheet) -> [(i64, i64); 6] {
    match (s.hexagon, s.end) {
        (Hexagon::Y, 0) => [(0, 0), (0, -1), (0, -1), (0, -1), (0, -1), (0, 0)],
        (Hexagon::Y, _) => [(0, 0), (0, 0), (0, 0), (0, 1), (0, 1), (0, 0)],
        (Hexagon::X, 0) => [(0, 0), (0, 0), (0, 0), (0, -1), (0, -1), (0, 0)],
        (Hexagon::X, _) => [(0, 0), (0, 1), (0, 1), (-1, 1), (-1, 1), (0, 0)],
    }
}

/// A side of a sheet, and whether it runs along the edge of `T` in its preferred direction.
type Slot = (Sheet, usize, bool);

/// The twelve edges of the hexagonal tiling of `T`, each as its two incident sides.
pub fn torus_edges() -> [(Slot, Slot); 12] {
    const fn sh(h: Hexagon, end: u8) -> Sheet {
        Sheet { hexagon: h, end }
    }
    use Hexagon::{X, Y};
    [
        ((sh(Y, 0), 1, false), (sh(X, 0), 0, true)),
        ((sh(Y, 0), 0, true), (sh(X, 0), 5, false)),
        ((sh(Y, 0), 2, true), (sh(Y, 0), 5, false)),
        ((sh(X, 0), 1, false), (sh(X, 0), 4, true)),
        ((sh(Y, 1), 0, true), (sh(X, 0), 2, true)),
        ((sh(Y, 1), 5, false), (sh(X, 0), 3, false)),
        ((sh(Y, 1), 3, false), (sh(X, 1), 4, true)),
        ((sh(Y, 1), 1, false), (sh(Y, 1), 4, true)),
        ((sh(Y, 1), 2, true), (sh(X, 1), 3, false)),
        ((sh(Y, 0), 3, false), (sh(X, 1), 1, false)),
        ((sh(Y, 0), 4, true), (sh(X, 1), 0, true)),
        ((sh(X, 1), 2, true), (sh(X, 1), 5, false)),
    ]
}

/// Number of vertices of the tiling of `T`, found by gluing hexagon corners along edges.
pub fn torus_vertex_count() -> usize {
    let sheets: Vec<Sheet> = [Hexagon::X, Hexagon::Y]
        .iter()
        .flat_map(|&h| [0, 1].map(|end| Sheet { hexagon: h, end }))
        .collect();
    let id = |s: Sheet, c: usize| sheets.iter().position(|&x| x == s).unwrap() * 6 + c % 6;
    let mut parent: Vec<usize> = (0..24).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for ((s1, k1, d1), (s2, k2, d2)) in torus_edges() {
        // corners at the start and finish of the edge in its preferred direction
        let ends = |s, k: usize, d| {
            if d {
                (id(s, k), id(s, k + 1))
            } else {
                (id(s, k + 1), id(s, k))
            }
        };
        let (a1, b1) = ends(s1, k1, d1);
        let (a2, b2) = ends(s2, k2, d2);
        for (x, y) in [(a1, a2), (b1, b2)] {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[rx] = ry;
        }
    }
    (0..24).filter(|&x| find(&mut parent, x) == x).count()
}

/// A lifted arc of `B ∩ T` and the connector it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub branch: String,
    pub connector: Connector,
    pub sheet: Sheet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCover {
    pub track: TrainTrack,
    pub projection: Vec<Lift>,
}

fn boundary_double_cover(q: &QComplex) -> Result<DoubleCover, SpineError> {
    let mut branches = Vec::new();
    let mut projection = Vec::new();
    // arcs per sheet side: (branch name, end kind, other side)
    let mut at: BTreeMap<(Sheet, usize), Vec<(String, EndKind, usize)>> = BTreeMap::new();
    for w in &q.connectors {
        let c = w.connector;
        let (i, j) = c.sides;
        for end in [0, 1] {
            let sheet = Sheet {
                hexagon: c.hexagon,
                end,
            };
            let pot = potential(sheet);
            let name = format!("{}.{}", c.label(), end);
            let label = (pot[j].0 - pot[i].0, pot[j].1 - pot[i].1);
            branches.push(Branch {
                name: name.clone(),
                label: Some(label),
            });
            at.entry((sheet, i)).or_default().push((name.clone(), EndKind::Tail, j));
            at.entry((sheet, j)).or_default().push((name.clone(), EndKind::Head, i));
            projection.push(Lift {
                branch: name,
                connector: c,
                sheet,
            });
        }
    }
    let mut switches = Vec::new();
    for (n, (x, y)) in torus_edges().into_iter().enumerate() {
        let order = |(sheet, k, dir): Slot| -> (bool, Vec<BranchEnd>) {
            let mut ends = at.get(&(sheet, k)).cloned().unwrap_or_default();
            // nearest the far corner first
            ends.sort_by_key(|e| std::cmp::Reverse((e.2 + 6 - k) % 6));
            if !dir {
                ends.reverse();
            }
            let one_fold = !dir ^ (sheet.end == 1);
            (
                one_fold,
                ends.into_iter()
                    .map(|(branch, end, _)| BranchEnd { branch, end })
                    .collect(),
            )
        };
        let (fx, ex) = order(x);
        let (fy, ey) = order(y);
        debug_assert_ne!(fx, fy);
        match (ex.is_empty(), ey.is_empty()) {
            (true, true) => continue,
            (false, false) => {}
            _ => return Err(SpineError::Monogon(format!("edge {n} of the torus"))),
        }
        let (one_fold, two_fold) = if fx { (ex, ey) } else { (ey, ex) };
        switches.push(Switch { one_fold, two_fold });
    }
    let track = TrainTrack::new(branches, switches)?;
    Ok(DoubleCover { track, projection })
}
