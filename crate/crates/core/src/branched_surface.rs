//! Branched surfaces as sector complexes over a Q-type base.
//!
//! A branched surface `B` is recorded as its base region `Bⁿ = B ∩ N` (named by
//! its Q-type), the sectors it adds in the filling solid torus `V`, the closed
//! branch curves those sectors attach to, and a CW structure used for Euler
//! characteristics. Coorientation parities across the branch locus drive the
//! transverse orientability check.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Slope;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("{surface}: duplicate sector {0}", surface = .1)]
    DuplicateSector(String, String),
    #[error("{surface}: duplicate branch curve {0}", surface = .1)]
    DuplicateCurve(String, String),
    #[error("{surface}: sector {sector} attaches to unknown curve {curve}")]
    UnknownCurve {
        surface: String,
        sector: String,
        curve: String,
    },
    #[error("{surface}: junction names unknown sector {sector}")]
    UnknownSector { surface: String, sector: String },
    #[error("{surface}: sector {sector} is malformed: {reason}")]
    Sector {
        surface: String,
        sector: String,
        reason: String,
    },
    #[error("{surface}: CW structure is inconsistent: {reason}")]
    Cw { surface: String, reason: String },
    #[error("{surface}: recorded complement is inconsistent: {reason}")]
    Complement { surface: String, reason: String },
    #[error("the filling slope inf is not a surgery in scope")]
    InfiniteSlope,
    #[error("meridian intersection is undefined for {0}")]
    NotSolidTorus(String),
}

/// Which side of a branch curve a sector lies on. The branch direction points
/// from the two-fold side into the one-fold side. `Smooth` marks a seam that is
/// not a branch arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldSide {
    OneFold,
    TwoFold,
    Smooth,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SectorKind {
    Disk,
    MeridianDisk,
    /// Annulus in `V` with both ends on one closed branch curve.
    AnnulusTypeI,
    /// Annulus in `V` with ends on two distinct closed branch curves.
    #[serde(rename = "annulus_type_ii")]
    AnnulusTypeII,
    NamedSurface {
        genus: u32,
        punctures: u32,
        orientable: bool,
    },
}

impl SectorKind {
    pub fn is_disk(&self) -> bool {
        matches!(self, SectorKind::Disk | SectorKind::MeridianDisk)
    }

    pub fn is_annulus(&self) -> bool {
        matches!(self, SectorKind::AnnulusTypeI | SectorKind::AnnulusTypeII)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub curve: String,
    pub side: FoldSide,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Slope>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub id: String,
    pub kind: SectorKind,
    pub attachments: Vec<Attachment>,
    /// The other half of an abstractly split type II sector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_partner: Option<String>,
    /// Whether no horizontal leaves lie on the far side of this sector in `V`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacant: bool,
}

impl Sector {
    /// Boundary slope on `T` shared by the attachments, if recorded.
    pub fn slope(&self) -> Option<&Slope> {
        self.attachments.iter().find_map(|a| a.slope.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCurve {
    pub id: String,
    pub closed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Slope>,
}

/// Two sectors meeting along a branch curve. `flip` is set when a coorientation
/// of the first reverses on crossing into the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junction {
    pub curve: String,
    pub sectors: [String; 2],
    #[serde(default)]
    pub flip: bool,
}

/// A finite CW complex. Faces are closed edge walks of signed 1-based edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwComplex {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<Vec<i64>>,
}

impl CwComplex {
    pub fn validate(&self) -> Result<(), String> {
        for (n, e) in self.edges.iter().enumerate() {
            if e.iter().any(|&v| v >= self.vertices) {
                return Err(format!("edge {} has an endpoint outside 0..{}", n + 1, self.vertices));
            }
        }
        for (n, f) in self.faces.iter().enumerate() {
            if f.is_empty() {
                return Err(format!("face {} has an empty boundary", n + 1));
            }
            let mut ends = Vec::with_capacity(f.len());
            for &s in f {
                let i = s.unsigned_abs() as usize;
                if s == 0 || i > self.edges.len() {
                    return Err(format!("face {} uses missing edge {s}", n + 1));
                }
                let [a, b] = self.edges[i - 1];
                ends.push(if s > 0 { (a, b) } else { (b, a) });
            }
            for k in 0..ends.len() {
                if ends[k].1 != ends[(k + 1) % ends.len()].0 {
                    return Err(format!("face {} boundary is not a closed walk", n + 1));
                }
            }
        }
        Ok(())
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

/// Topological type of a complement component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Topology {
    Ball,
    SolidTorus,
    Handlebody { genus: u32 },
    TorusTimesInterval,
    Other { description: String, euler: i64 },
}

impl Topology {
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            Topology::Ball => 1,
            Topology::SolidTorus | Topology::TorusTimesInterval => 0,
            Topology::Handlebody { genus } => 1 - i64::from(*genus),
            Topology::Other { euler, .. } => *euler,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Ball => write!(f, "3-ball"),
            Topology::SolidTorus => write!(f, "solid torus"),
            Topology::Handlebody { genus } => write!(f, "genus-{genus} handlebody"),
            Topology::TorusTimesInterval => write!(f, "T^2 x I"),
            Topology::Other { description, .. } => write!(f, "{description}"),
        }
    }
}

/// A component of the vertical boundary: an annulus and how many times its core
/// runs around the component it bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalAnnulus {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Slope>,
    pub wrapping: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComplementShape {
    SolidTorusTwoVerticalAnnuli,
    SolidTorusDoublyWrappedAnnulus,
    BallWithVerticalSideAnnulus,
    Other { description: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementComponent {
    pub topology: Topology,
    pub vertical: Vec<VerticalAnnulus>,
    /// Sectors whose sides bound this component.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub adjacent: Vec<String>,
}

impl ComplementComponent {
    pub fn shape(&self) -> ComplementShape {
        let wraps: Vec<u32> = self.vertical.iter().map(|a| a.wrapping).collect();
        match (&self.topology, wraps.as_slice()) {
            (Topology::SolidTorus, [1, 1]) => ComplementShape::SolidTorusTwoVerticalAnnuli,
            (Topology::SolidTorus, [2]) => ComplementShape::SolidTorusDoublyWrappedAnnulus,
            (Topology::Ball, [1]) => ComplementShape::BallWithVerticalSideAnnulus,
            (t, _) => {
                let description = if wraps.is_empty() {
                    format!("{t}, empty vertical boundary")
                } else {
                    let w: Vec<String> = wraps.iter().map(u32::to_string).collect();
                    format!("{t}, {} vertical annuli wrapping {}", wraps.len(), w.join(","))
                };
                ComplementShape::Other { description }
            }
        }
    }

    pub fn is_solid_torus(&self) -> bool {
        self.topology == Topology::SolidTorus
    }
}

/// Whether `c` is one of the three shapes that carry an `I`-bundle coherent to
/// the vertical boundary.
pub fn admits_coherent_ibundle(c: &ComplementComponent) -> bool {
    !matches!(c.shape(), ComplementShape::Other { .. })
}

/// Fewest points in which a meridian circle of the solid torus `c` meets the
/// core of one vertical annulus, maximized over the annuli.
pub fn meridian_vertical_intersection(c: &ComplementComponent) -> Result<u32, SurfaceError> {
    if !c.is_solid_torus() {
        return Err(SurfaceError::NotSolidTorus(c.topology.to_string()));
    }
    Ok(c.vertical.iter().map(|a| a.wrapping).max().unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceType {
    pub genus: u32,
    pub punctures: u32,
    pub orientable: bool,
}

/// `Bⁿ = B ∩ N`, named by its Q-type. Junctions refer to it as [`BASE`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRegion {
    pub qtype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Set when `Bⁿ` is an honest surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceType>,
}

pub const BASE: &str = "base";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchedSurface {
    pub id: String,
    pub base: BaseRegion,
    pub sectors: Vec<Sector>,
    #[serde(default)]
    pub locus: Vec<BranchCurve>,
    #[serde(default)]
    pub junctions: Vec<Junction>,
    pub cw: CwComplex,
    /// Components of `W(B)` independent of the filling, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<ComplementComponent>>,
}

/// Result of the transverse orientability check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Orientability {
    /// A coorientation sign for every sector, consistent across all junctions.
    Certificate { signs: BTreeMap<String, i8> },
    /// A legal loop along which the `I`-bundle is twisted: the sectors it visits
    /// in order and the branch curves it crosses.
    Obstruction { sectors: Vec<String>, curves: Vec<String> },
}

impl Orientability {
    pub fn is_orientable(&self) -> bool {
        matches!(self, Orientability::Certificate { .. })
    }
}

impl BranchedSurface {
    pub fn validate(&self) -> Result<(), SurfaceError> {
        let id = || self.id.clone();
        let mut curves = BTreeSet::new();
        for c in &self.locus {
            if !curves.insert(c.id.as_str()) {
                return Err(SurfaceError::DuplicateCurve(c.id.clone(), id()));
            }
        }
        let mut sectors = BTreeSet::new();
        for s in &self.sectors {
            if s.id == BASE || !sectors.insert(s.id.as_str()) {
                return Err(SurfaceError::DuplicateSector(s.id.clone(), id()));
            }
            for a in &s.attachments {
                if !curves.contains(a.curve.as_str()) {
                    return Err(SurfaceError::UnknownCurve {
                        surface: id(),
                        sector: s.id.clone(),
                        curve: a.curve.clone(),
                    });
                }
            }
            self.check_sector(s)?;
        }
        for s in &self.sectors {
            if let Some(p) = &s.split_partner {
                let partner = self.sector(p).ok_or_else(|| SurfaceError::UnknownSector {
                    surface: id(),
                    sector: p.clone(),
                })?;
                if partner.split_partner.as_deref() != Some(s.id.as_str()) {
                    return Err(self.bad_sector(s, "split partner does not point back"));
                }
            }
        }
        for j in &self.junctions {
            for s in &j.sectors {
                if s != BASE && !sectors.contains(s.as_str()) {
                    return Err(SurfaceError::UnknownSector {
                        surface: id(),
                        sector: s.clone(),
                    });
                }
            }
            if !curves.contains(j.curve.as_str()) {
                return Err(SurfaceError::UnknownCurve {
                    surface: id(),
                    sector: j.sectors[0].clone(),
                    curve: j.curve.clone(),
                });
            }
        }
        self.cw
            .validate()
            .map_err(|reason| SurfaceError::Cw { surface: id(), reason })?;
        if let Some(comp) = &self.complement {
            let chi: i64 = comp.iter().map(|c| c.topology.euler_characteristic()).sum();
            let own = self.cw.euler_characteristic();
            if chi != own {
                return Err(SurfaceError::Complement {
                    surface: id(),
                    reason: format!("χ(W) = {chi} but χ(B) = {own}"),
                });
            }
        }
        Ok(())
    }

    fn bad_sector(&self, s: &Sector, reason: &str) -> SurfaceError {
        SurfaceError::Sector {
            surface: self.id.clone(),
            sector: s.id.clone(),
            reason: reason.into(),
        }
    }

    fn check_sector(&self, s: &Sector) -> Result<(), SurfaceError> {
        let closed = |c: &str| self.locus.iter().any(|x| x.id == c && x.closed);
        match &s.kind {
            SectorKind::AnnulusTypeI | SectorKind::AnnulusTypeII => {
                if s.attachments.len() != 2 {
                    return Err(self.bad_sector(s, "an annulus has exactly two boundary circles"));
                }
                let (a, b) = (&s.attachments[0].curve, &s.attachments[1].curve);
                if !closed(a) || !closed(b) {
                    return Err(self.bad_sector(s, "annulus ends must lie on closed branch curves"));
                }
                let same = a == b;
                if same != (s.kind == SectorKind::AnnulusTypeI) {
                    return Err(self.bad_sector(
                        s,
                        if same {
                            "type II ends share a curve"
                        } else {
                            "type I ends lie on different curves"
                        },
                    ));
                }
            }
            SectorKind::Disk | SectorKind::MeridianDisk => {
                if s.attachments.is_empty() {
                    return Err(self.bad_sector(s, "a disk sector must meet the branch locus"));
                }
            }
            SectorKind::NamedSurface { punctures, .. } => {
                if s.attachments.len() != *punctures as usize {
                    return Err(self.bad_sector(s, "each boundary circle attaches to one curve"));
                }
            }
        }
        if s.split_partner.is_some() && s.kind != SectorKind::AnnulusTypeII {
            return Err(self.bad_sector(s, "only type II sectors are split"));
        }
        Ok(())
    }

    pub fn sector(&self, id: &str) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.id == id)
    }

    pub fn euler_characteristic(&self) -> Result<i64, SurfaceError> {
        self.cw.validate().map_err(|reason| SurfaceError::Cw {
            surface: self.id.clone(),
            reason,
        })?;
        Ok(self.cw.euler_characteristic())
    }

    pub fn count_sectors(&self, pred: impl Fn(&SectorKind) -> bool) -> usize {
        self.sectors.iter().filter(|s| pred(&s.kind)).count()
    }

    /// Two-colors the sectors by coorientation, or finds a legal loop with odd
    /// holonomy. A one-sided sector is its own odd loop.
    pub fn is_transversely_orientable(&self) -> Orientability {
        let mut names: Vec<&str> = self.sectors.iter().map(|s| s.id.as_str()).collect();
        names.push(BASE);
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let one_sided = self.sectors.iter().find_map(|s| match s.kind {
            SectorKind::NamedSurface { orientable: false, .. } => Some(s.id.clone()),
            _ => None,
        });
        let one_sided = one_sided.or_else(|| self.base.surface.filter(|t| !t.orientable).map(|_| BASE.to_string()));
        if let Some(s) = one_sided {
            return Orientability::Obstruction {
                sectors: vec![s.clone(), s],
                curves: vec![],
            };
        }
        let n = names.len();
        let mut adj: Vec<Vec<(usize, bool, usize)>> = vec![Vec::new(); n];
        for (k, j) in self.junctions.iter().enumerate() {
            let (Some(&a), Some(&b)) = (index.get(j.sectors[0].as_str()), index.get(j.sectors[1].as_str())) else {
                continue;
            };
            adj[a].push((b, j.flip, k));
            adj[b].push((a, j.flip, k));
        }
        let mut sign: Vec<Option<i8>> = vec![None; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        for root in 0..n {
            if sign[root].is_some() {
                continue;
            }
            sign[root] = Some(1);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(v, flip, k) in &adj[u] {
                    let want = if flip { -sign[u].unwrap() } else { sign[u].unwrap() };
                    match sign[v] {
                        None => {
                            sign[v] = Some(want);
                            parent[v] = Some((u, k));
                            queue.push_back(v);
                        }
                        Some(s) if s != want => return self.odd_loop(&names, &parent, u, v, k),
                        Some(_) => {}
                    }
                }
            }
        }
        let signs = names
            .iter()
            .zip(sign)
            .map(|(s, x)| (s.to_string(), x.unwrap()))
            .collect();
        Orientability::Certificate { signs }
    }

    fn odd_loop(
        &self,
        names: &[&str],
        parent: &[Option<(usize, usize)>],
        u: usize,
        v: usize,
        closing: usize,
    ) -> Orientability {
        // Each entry is a sector and the junction leading to it from the previous one.
        let up = |mut x: usize| {
            let mut path = vec![(x, None)];
            while let Some((p, k)) = parent[x] {
                path.push((p, Some(k)));
                x = p;
            }
            path
        };
        let pu = up(u);
        let pv = up(v);
        let meet = pu.iter().position(|&(x, _)| pv.iter().any(|&(y, _)| y == x)).unwrap();
        let mv = pv.iter().position(|&(y, _)| y == pu[meet].0).unwrap();
        let mut sectors: Vec<usize> = pu[..=meet].iter().rev().map(|&(x, _)| x).collect();
        sectors.extend(pv[..=mv].iter().map(|&(x, _)| x));
        let mut curves: Vec<usize> = pu[1..=meet].iter().rev().filter_map(|&(_, k)| k).collect();
        curves.push(closing);
        curves.extend(pv[1..=mv].iter().filter_map(|&(_, k)| k));
        Orientability::Obstruction {
            sectors: sectors.iter().map(|&i| names[i].to_string()).collect(),
            curves: curves.iter().map(|&k| self.junctions[k].curve.clone()).collect(),
        }
    }

    /// Disk sectors all of whose boundary branch arcs have branch direction pointing in.
    pub fn detect_sink_disks(&self) -> Vec<&Sector> {
        self.sectors
            .iter()
            .filter(|s| s.kind.is_disk())
            .filter(|s| {
                let mut arcs = s.attachments.iter().filter(|a| a.side != FoldSide::Smooth).peekable();
                arcs.peek().is_some() && arcs.all(|a| a.side == FoldSide::OneFold)
            })
            .collect()
    }

    /// Components of `W(B)` in `M(r)`: the recorded base-region components and the
    /// solid tori cut off in `V` by annular sectors.
    pub fn complement_components(&self, r: &Slope) -> Result<Vec<ComplementComponent>, SurfaceError> {
        if r.is_infinite() {
            return Err(SurfaceError::InfiniteSlope);
        }
        let mut out = self.complement.clone().unwrap_or_default();
        let wrap = |s: &Sector| -> u32 {
            s.slope()
                .map_or(1, |a| u32::try_from(a.intersection_number(r)).unwrap_or(u32::MAX))
        };
        let mut seen = BTreeSet::new();
        for s in &self.sectors {
            match s.kind {
                SectorKind::AnnulusTypeI if s.vacant => out.push(ComplementComponent {
                    topology: Topology::SolidTorus,
                    vertical: vec![VerticalAnnulus {
                        slope: s.slope().cloned(),
                        wrapping: wrap(s),
                    }],
                    adjacent: vec![s.id.clone()],
                }),
                SectorKind::AnnulusTypeII => {
                    let Some(p) = &s.split_partner else { continue };
                    if !seen.insert(s.id.clone()) || !seen.insert(p.clone()) {
                        continue;
                    }
                    let t = self.sector(p).expect("validated partner");
                    out.push(ComplementComponent {
                        topology: Topology::SolidTorus,
                        vertical: vec![
                            VerticalAnnulus {
                                slope: s.slope().cloned(),
                                wrapping: wrap(s),
                            },
                            VerticalAnnulus {
                                slope: t.slope().cloned(),
                                wrapping: wrap(t),
                            },
                        ],
                        adjacent: vec![s.id.clone(), t.id.clone()],
                    });
                }
                _ => {}
            }
        }
        if let Some(cycle) = self.type_ii_cycle() {
            let slope = self.sector(&cycle[0]).and_then(|s| s.slope().cloned());
            out.push(ComplementComponent {
                topology: Topology::SolidTorus,
                vertical: cycle
                    .iter()
                    .map(|_| VerticalAnnulus {
                        slope: slope.clone(),
                        wrapping: 1,
                    })
                    .collect(),
                adjacent: cycle,
            });
        }
        Ok(out)
    }

    /// Unsplit type II sectors whose curves close up into a cycle of length at
    /// least three; the solid torus they enclose has one cusp per sector.
    fn type_ii_cycle(&self) -> Option<Vec<String>> {
        let ii: Vec<&Sector> = self
            .sectors
            .iter()
            .filter(|s| s.kind == SectorKind::AnnulusTypeII && s.split_partner.is_none())
            .collect();
        let mut deg: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &ii {
            for a in &s.attachments {
                *deg.entry(a.curve.as_str()).or_default() += 1;
            }
        }
        let in_cycle: Vec<&Sector> = ii
            .iter()
            .copied()
            .filter(|s| s.attachments.iter().all(|a| deg[a.curve.as_str()] == 2))
            .collect();
        let curves: BTreeSet<&str> = in_cycle
            .iter()
            .flat_map(|s| s.attachments.iter().map(|a| a.curve.as_str()))
            .collect();
        (in_cycle.len() >= 3 && curves.len() == in_cycle.len()).then(|| in_cycle.iter().map(|s| s.id.clone()).collect())
    }
}
