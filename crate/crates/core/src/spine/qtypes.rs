//! The eleven connector complexes Q1–Q11 and the carried-loop laws of their boundary tracks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{QComplex, SpineError, WeightCase};
use crate::slopes::slopes_up_to_height;
use crate::traintrack::{TrackError, TrainTrack, WeightVector};
use crate::Slope;

const DATA: [&str; 11] = [
    include_str!("../../data/qtypes/Q1.json"),
    include_str!("../../data/qtypes/Q2.json"),
    include_str!("../../data/qtypes/Q3.json"),
    include_str!("../../data/qtypes/Q4.json"),
    include_str!("../../data/qtypes/Q5.json"),
    include_str!("../../data/qtypes/Q6.json"),
    include_str!("../../data/qtypes/Q7.json"),
    include_str!("../../data/qtypes/Q8.json"),
    include_str!("../../data/qtypes/Q9.json"),
    include_str!("../../data/qtypes/Q10.json"),
    include_str!("../../data/qtypes/Q11.json"),
];

#[derive(Debug, Error)]
pub enum QTypeError {
    #[error("malformed Q-type data: {0}")]
    Data(#[from] serde_json::Error),
    #[error(transparent)]
    Spine(#[from] SpineError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error("{id}: variable {name} names no branch of the boundary track")]
    Variable { id: String, name: String },
}

/// What the loops carried by a boundary track look like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeLaw {
    /// Every finite slope occurs, using both chiralities of the complex.
    AnySlope,
    OnlyZero,
    OnlyInfinity,
    OnlyFour,
    /// `(μ − ν)/ω`, with `ν < ω` when fully carried.
    FormulaMuNuOmega,
    /// `3 + (μ + ν)/ω`, with `ω ≥ 2`, `μ ≥ 1`, `1 ≤ ν < ω` when fully carried.
    FormulaThreePlus,
    /// `(g + h − f − e − i)/g` whenever `g > 0`.
    FormulaB9,
}

impl SlopeLaw {
    pub fn variables(&self) -> &'static [&'static str] {
        match self {
            SlopeLaw::FormulaMuNuOmega | SlopeLaw::FormulaThreePlus => &["ω", "μ", "ν"],
            SlopeLaw::FormulaB9 => &["e", "f", "g", "h", "i"],
            _ => &[],
        }
    }

    /// The predicted `(p, q)` for the named weights, when the formula applies.
    pub fn predict(&self, v: &BTreeMap<&str, i64>) -> Option<(i64, i64)> {
        match self {
            SlopeLaw::FormulaMuNuOmega if v["ω"] > 0 => Some((v["ω"], v["μ"] - v["ν"])),
            SlopeLaw::FormulaThreePlus if v["ω"] > 0 => Some((v["ω"], 3 * v["ω"] + v["μ"] + v["ν"])),
            SlopeLaw::FormulaB9 if v["g"] > 0 => Some((v["g"], v["g"] + v["h"] - v["f"] - v["e"] - v["i"])),
            _ => None,
        }
    }

    /// Side conditions a fully carried solution satisfies.
    pub fn fully_carried_constraint(&self, v: &BTreeMap<&str, i64>) -> bool {
        match self {
            SlopeLaw::FormulaMuNuOmega => v["ν"] < v["ω"],
            SlopeLaw::FormulaThreePlus => v["ω"] >= 2 && v["μ"] >= 1 && 1 <= v["ν"] && v["ν"] < v["ω"],
            _ => true,
        }
    }

    pub fn only(&self) -> Option<Slope> {
        match self {
            SlopeLaw::OnlyZero => Some(Slope::integer(0)),
            SlopeLaw::OnlyFour => Some(Slope::integer(4)),
            SlopeLaw::OnlyInfinity => Some(Slope::infinity()),
            _ => None,
        }
    }
}

impl fmt::Display for SlopeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlopeLaw::AnySlope => "any slope",
            SlopeLaw::OnlyZero => "only 0",
            SlopeLaw::OnlyInfinity => "only inf",
            SlopeLaw::OnlyFour => "only 4",
            SlopeLaw::FormulaMuNuOmega => "(μ-ν)/ω",
            SlopeLaw::FormulaThreePlus => "3+(μ+ν)/ω",
            SlopeLaw::FormulaB9 => "(g+h-f-e-i)/g",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub weights: Option<WeightVector>,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub qtype: String,
    pub law: SlopeLaw,
    pub bound: u32,
    pub solutions: usize,
    pub slopes: BTreeSet<Slope>,
    pub fully_carried: BTreeSet<Slope>,
    pub violation: Option<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Deserialize)]
struct QTypeDoc {
    version: u32,
    id: String,
    case: WeightCase,
    connectors: QComplex,
    law: SlopeLaw,
    #[serde(default)]
    names: BTreeMap<String, String>,
}

/// A canonical connector complex, the law of its boundary track, and names for
/// the lifted arcs the law refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QType {
    pub version: u32,
    pub id: String,
    pub case: WeightCase,
    pub complex: QComplex,
    pub law: SlopeLaw,
    /// Variable name to lifted arc name.
    pub names: BTreeMap<String, String>,
}

impl QType {
    pub fn from_json(s: &str) -> Result<Self, QTypeError> {
        let d: QTypeDoc = serde_json::from_str(s)?;
        Ok(QType {
            version: d.version,
            id: d.id,
            case: d.case,
            complex: d.connectors,
            law: d.law,
            names: d.names,
        })
    }

    /// The lift of every connector, before smoothing.
    pub fn raw_track(&self) -> Result<TrainTrack, QTypeError> {
        Ok(self.complex.boundary_double_cover()?.track)
    }

    /// The boundary track with bivalent switches smoothed away.
    pub fn track(&self) -> Result<TrainTrack, QTypeError> {
        Ok(self.raw_track()?.smooth())
    }

    /// Branch of `track` containing the arc called `var`.
    pub fn variable(&self, track: &TrainTrack, var: &str) -> Result<usize, QTypeError> {
        let missing = || QTypeError::Variable {
            id: self.id.clone(),
            name: var.to_string(),
        };
        let arc = self.names.get(var).ok_or_else(missing)?;
        track
            .branches()
            .iter()
            .position(|b| b.name.split('+').any(|x| x == arc))
            .ok_or_else(missing)
    }

    /// The same complex seen through a symmetry reversing slopes.
    pub fn mirror(&self) -> QType {
        let g = super::Spine
            .symmetries()
            .into_iter()
            .find(|g| g.reverses_slopes())
            .unwrap();
        QType {
            complex: self.complex.transform(&g),
            ..self.clone()
        }
    }

    /// Checks the law on every solution with entries at most `bound`.
    pub fn check_law(&self, bound: u32) -> Result<LawReport, QTypeError> {
        self.check(self.law, bound)
    }

    pub fn check(&self, law: SlopeLaw, bound: u32) -> Result<LawReport, QTypeError> {
        let track = self.track()?;
        let vars: Vec<(&str, usize)> = law
            .variables()
            .iter()
            .map(|&v| Ok((v, self.variable(&track, v)?)))
            .collect::<Result<_, QTypeError>>()?;
        let sols = track.enumerate_solutions(bound);
        let exempt: Vec<usize> = (0..track.branch_count())
            .filter(|&i| sols.iter().all(|w| w[i] == 0))
            .collect();
        let mut report = LawReport {
            qtype: self.id.clone(),
            law,
            bound,
            solutions: sols.len(),
            slopes: BTreeSet::new(),
            fully_carried: BTreeSet::new(),
            violation: None,
        };
        let mut violation = None;
        for w in &sols {
            if w.iter().all(|&x| x == 0) {
                continue;
            }
            let class = track.class_of(w)?.map(|c| c.slope);
            let full = w.iter().enumerate().all(|(i, &x)| x > 0 || exempt.contains(&i));
            if let Some(s) = &class {
                report.slopes.insert(s.clone());
                if full {
                    report.fully_carried.insert(s.clone());
                }
            }
            if violation.is_some() {
                continue;
            }
            let vals: BTreeMap<&str, i64> = vars.iter().map(|&(v, i)| (v, i64::from(w[i]))).collect();
            let show = |c: &Option<Slope>| c.as_ref().map_or("nothing".to_string(), |s| s.to_string());
            if let Some(want) = law.only() {
                if class.as_ref() != Some(&want) {
                    violation = Some(LawViolation {
                        weights: Some(w.clone()),
                        expected: want.to_string(),
                        found: show(&class),
                    });
                }
            } else if let Some((p, q)) = law.predict(&vals) {
                let want = Slope::reduce(p, q).ok();
                if want != class {
                    violation = Some(LawViolation {
                        weights: Some(w.clone()),
                        expected: show(&want),
                        found: show(&class),
                    });
                } else if full && !law.fully_carried_constraint(&vals) {
                    violation = Some(LawViolation {
                        weights: Some(w.clone()),
                        expected: "fully carried weights within the stated range".into(),
                        found: format!("{vals:?}"),
                    });
                }
            }
        }
        if violation.is_none() {
            if let Some(want) = law.only() {
                if report.slopes.is_empty() {
                    violation = Some(LawViolation {
                        weights: None,
                        expected: want.to_string(),
                        found: "nothing".into(),
                    });
                }
            }
        }
        if violation.is_none() && law == SlopeLaw::AnySlope {
            let other = self.mirror().track()?.carried_classes(bound)?.slopes();
            let h = i64::from(bound / 2);
            if let Some(s) = slopes_up_to_height(h)
                .into_iter()
                .find(|s| !report.slopes.contains(s) && !other.contains(s))
            {
                violation = Some(LawViolation {
                    weights: None,
                    expected: format!("slope {s} in either chirality"),
                    found: "not carried".into(),
                });
            }
        }
        report.violation = violation;
        Ok(report)
    }
}

/// Q1–Q11 as shipped.
pub fn canonical_qtypes() -> Vec<QType> {
    DATA.iter()
        .map(|s| QType::from_json(s).expect("embedded Q-type data is valid"))
        .collect()
}

pub fn qtype(id: &str) -> Option<QType> {
    canonical_qtypes().into_iter().find(|q| q.id == id)
}
