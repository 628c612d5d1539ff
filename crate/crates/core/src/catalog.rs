//! The catalog of essential branched surfaces in the figure-eight knot surgeries,
//! shipped as JSON data with a checksummed manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::branched_surface::{BranchedSurface, ComplementComponent, Orientability, SurfaceError};
use crate::spine::{qtype, LawReport, QTypeError, SlopeLaw};
use crate::{AdmissibleSet, Slope};

const MANIFEST: &str = include_str!("../data/catalog/manifest.json");

macro_rules! embedded {
    ($($id:literal),* $(,)?) => {
        &[$(($id, include_str!(concat!("../data/catalog/", $id, ".json")))),*]
    };
}

const ENTRIES: &[(&str, &str)] = embedded![
    "B1",
    "B2",
    "B3",
    "B4",
    "B5",
    "B6",
    "B6_I_g",
    "B6_I_h",
    "B6_II",
    "B7",
    "B7_I_f",
    "B7_I_g",
    "B7_I_h",
    "B7_II_fg",
    "B7_II_gh",
    "R7",
    "R7_I_f",
    "R7_I_g",
    "R7_I_h",
    "R7_II_fg",
    "R7_II_gh",
    "R7_II_hf",
    "B7_star",
    "B7_2star_fg_f",
    "B7_2star_fg_g",
    "B7_2star_fg_h",
    "B7_2star_gh_f",
    "B7_2star_gh_g",
    "B7_2star_gh_h",
    "B8",
    "B8_II_fg",
    "B8_II_fh",
    "B8_III",
    "B9",
    "B9_II",
    "B9_M",
    "B10",
    "B11",
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{file}: schema violation: {source}")]
    Schema { file: String, source: serde_json::Error },
    #[error("{file}: checksum mismatch (manifest {expected}, found {found})")]
    Checksum {
        file: String,
        expected: String,
        found: String,
    },
    #[error("manifest lists {listed} entries but records count {count}")]
    Count { listed: usize, count: usize },
    #[error("manifest family counts sum to {sum}, not {count}")]
    FamilyCount { sum: usize, count: usize },
    #[error("{file}: id {found} does not match manifest id {expected}")]
    IdMismatch {
        file: String,
        expected: String,
        found: String,
    },
    #[error("unknown entry {0}")]
    UnknownEntry(String),
    #[error("{0}: admissible set is empty")]
    EmptyAdmissible(String),
    #[error("{id}: {source}")]
    Surface { id: String, source: SurfaceError },
    #[error("{id}: slope {slope} is not admissible")]
    NotAdmissible { id: String, slope: Slope },
    #[error(transparent)]
    QType(#[from] QTypeError),
}

impl CatalogError {
    /// Whether the data on disk differs from what the manifest promises.
    pub fn is_corruption(&self) -> bool {
        matches!(
            self,
            CatalogError::Checksum { .. } | CatalogError::IdMismatch { .. } | CatalogError::Count { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExclusionClass {
    #[serde(rename = "disk_leaf")]
    DiskLeaf,
    #[serde(rename = "basic_type_ii")]
    BasicTypeII,
    #[serde(rename = "r7_cusps")]
    R7Cusps,
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "split_type_ii")]
    SplitTypeII,
}

impl fmt::Display for ExclusionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionClass::DiskLeaf => "disk-leaf",
            ExclusionClass::BasicTypeII => "basic type II",
            ExclusionClass::R7Cusps => "R7 cusps",
            ExclusionClass::TypeI => "type I",
            ExclusionClass::SplitTypeII => "split type II",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub version: u32,
    pub id: String,
    /// Display name, e.g. `B7^II (f,g)`.
    pub name: String,
    pub family: String,
    pub exclusion_class: ExclusionClass,
    pub admissible: AdmissibleSet,
    pub slope_law: SlopeLaw,
    /// `None` when not recorded.
    pub orientable: Option<bool>,
    /// The unsplit surface a split type II entry comes from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub surface: BranchedSurface,
}

impl CatalogEntry {
    pub fn is_admissible(&self, r: &Slope) -> bool {
        self.admissible.contains(r)
    }

    pub fn complement_components(&self, r: &Slope) -> Result<Vec<ComplementComponent>, CatalogError> {
        if !self.is_admissible(r) {
            return Err(CatalogError::NotAdmissible {
                id: self.id.clone(),
                slope: r.clone(),
            });
        }
        self.surface
            .complement_components(r)
            .map_err(|source| CatalogError::Surface {
                id: self.id.clone(),
                source,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub count: usize,
    /// The total quoted in the literature, which the per-family counts do not reach.
    pub stated_total: usize,
    pub families: BTreeMap<String, usize>,
    pub entries: Vec<ManifestEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub manifest: Manifest,
    pub entries: Vec<CatalogEntry>,
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn parse<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, CatalogError> {
    serde_json::from_str(text).map_err(|source| CatalogError::Schema {
        file: file.to_string(),
        source,
    })
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn embedded() -> Result<Self, CatalogError> {
        let files: BTreeMap<String, String> = ENTRIES
            .iter()
            .map(|(id, text)| (format!("{id}.json"), text.to_string()))
            .collect();
        Self::from_texts(MANIFEST, |f| {
            files.get(f).cloned().ok_or_else(|| CatalogError::Io {
                path: f.to_string(),
                source: std::io::Error::from(std::io::ErrorKind::NotFound),
            })
        })
    }

    /// A catalog directory holding `manifest.json` and one file per entry.
    pub fn load_dir(dir: &Path) -> Result<Self, CatalogError> {
        let read = |f: &str| {
            let path = dir.join(f);
            std::fs::read_to_string(&path).map_err(|source| CatalogError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let manifest = read("manifest.json")?;
        Self::from_texts(&manifest, read)
    }

    pub fn from_texts(
        manifest: &str,
        mut read: impl FnMut(&str) -> Result<String, CatalogError>,
    ) -> Result<Self, CatalogError> {
        let manifest: Manifest = parse("manifest.json", manifest)?;
        if manifest.entries.len() != manifest.count {
            return Err(CatalogError::Count {
                listed: manifest.entries.len(),
                count: manifest.count,
            });
        }
        let sum: usize = manifest.families.values().sum();
        if sum != manifest.count {
            return Err(CatalogError::FamilyCount {
                sum,
                count: manifest.count,
            });
        }
        let mut entries = Vec::with_capacity(manifest.count);
        for m in &manifest.entries {
            let text = read(&m.file)?;
            let found = sha256_hex(&text);
            if found != m.sha256 {
                return Err(CatalogError::Checksum {
                    file: m.file.clone(),
                    expected: m.sha256.clone(),
                    found,
                });
            }
            let e: CatalogEntry = parse(&m.file, &text)?;
            if e.id != m.id {
                return Err(CatalogError::IdMismatch {
                    file: m.file.clone(),
                    expected: m.id.clone(),
                    found: e.id,
                });
            }
            e.surface.validate().map_err(|source| CatalogError::Surface {
                id: e.id.clone(),
                source,
            })?;
            if e.admissible.witness().is_none() {
                return Err(CatalogError::EmptyAdmissible(e.id));
            }
            entries.push(e);
        }
        Ok(Catalog { manifest, entries })
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn candidates_for(&self, r: &Slope) -> Vec<&CatalogEntry> {
        self.entries.iter().filter(|e| e.is_admissible(r)).collect()
    }

    pub fn by_class(&self, class: ExclusionClass) -> Vec<&CatalogEntry> {
        self.entries.iter().filter(|e| e.exclusion_class == class).collect()
    }

    /// The count mismatch between the manifest and the quoted total, if any.
    pub fn count_warning(&self) -> Option<String> {
        (self.manifest.count != self.manifest.stated_total).then(|| {
            let parts: Vec<String> = self.manifest.families.iter().map(|(f, n)| format!("{f}:{n}")).collect();
            format!(
                "catalog ships {} entries ({}) but the stated total is {}; the missing entry is not invented",
                self.manifest.count,
                parts.join(" "),
                self.manifest.stated_total
            )
        })
    }

    pub fn check(&self, bound: u32) -> Result<CheckReport, CatalogError> {
        let mut laws = BTreeMap::new();
        let mut entries = Vec::new();
        for e in &self.entries {
            let key = (e.family.clone(), e.slope_law);
            if !laws.contains_key(&key) {
                laws.insert(key.clone(), slope_law_check(e, bound)?);
            }
            entries.push(check_entry(e, &laws[&key])?);
        }
        Ok(CheckReport {
            count: self.entries.len(),
            manifest_count: self.manifest.count,
            warnings: self.count_warning().into_iter().collect(),
            entries,
        })
    }
}

/// Loads the embedded catalog, panicking on corrupt data.
pub fn load() -> Catalog {
    Catalog::embedded().expect("embedded catalog is valid")
}

/// Runs the entry's recorded slope law against its boundary track.
pub fn slope_law_check(entry: &CatalogEntry, bound: u32) -> Result<LawReport, CatalogError> {
    let q = qtype(&entry.family).ok_or_else(|| CatalogError::UnknownEntry(entry.family.clone()))?;
    Ok(q.check(entry.slope_law, bound)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: Option<String>) -> Self {
        Check { name, passed, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub id: String,
    pub checks: Vec<Check>,
}

impl EntryCheck {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub count: usize,
    pub manifest_count: usize,
    pub warnings: Vec<String>,
    pub entries: Vec<EntryCheck>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.count == self.manifest_count && self.entries.iter().all(EntryCheck::passed)
    }
}

fn check_entry(e: &CatalogEntry, law: &LawReport) -> Result<EntryCheck, CatalogError> {
    let mut checks = Vec::new();
    checks.push(Check::new(
        "slope-law",
        law.passed(),
        law.violation
            .as_ref()
            .map(|v| format!("expected {}, found {}", v.expected, v.found)),
    ));
    let sinks: Vec<&str> = e.surface.detect_sink_disks().iter().map(|s| s.id.as_str()).collect();
    checks.push(Check::new(
        "sink-disk",
        sinks.is_empty(),
        (!sinks.is_empty()).then(|| sinks.join(", ")),
    ));
    checks.push(Check::new(
        "admissible",
        e.admissible.witness().is_some(),
        e.admissible.witness().map(|w| format!("witness {w}")),
    ));
    let disk_leaf = e.surface.sectors.iter().all(|s| s.kind.is_disk());
    checks.push(Check::new(
        "class",
        disk_leaf == (e.exclusion_class == ExclusionClass::DiskLeaf),
        None,
    ));
    let computed = e.surface.is_transversely_orientable();
    let mut orient_ok = e.orientable.is_none_or(|o| o == computed.is_orientable());
    let mut detail = match &computed {
        Orientability::Certificate { .. } => "certificate".to_string(),
        Orientability::Obstruction { sectors, .. } => format!("odd loop through {}", sectors.join(" ")),
    };
    if e.orientable == Some(true) {
        let track = qtype(&e.family)
            .ok_or_else(|| CatalogError::UnknownEntry(e.family.clone()))?
            .track()?;
        if let Err(odd) = track.transverse_orientation() {
            orient_ok = false;
            detail = format!("boundary track has an odd loop through branches {odd:?}");
        }
    }
    checks.push(Check::new("orientability", orient_ok, Some(detail)));
    let chi = e
        .surface
        .euler_characteristic()
        .map_err(|source| CatalogError::Surface {
            id: e.id.clone(),
            source,
        })?;
    let chi_detail = match &e.surface.complement {
        Some(c) => {
            let w: i64 = c.iter().map(|x| x.topology.euler_characteristic()).sum();
            Some((w == chi, format!("chi(B) = {chi}, chi(W) = {w}")))
        }
        None => None,
    };
    let (ok, d) = chi_detail.unwrap_or((true, format!("chi(B) = {chi}")));
    checks.push(Check::new("euler", ok, Some(d)));
    Ok(EntryCheck {
        id: e.id.clone(),
        checks,
    })
}
