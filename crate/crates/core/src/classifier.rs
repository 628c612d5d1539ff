//! Rule engine deciding which Dehn fillings carry Anosov flows, with a cited
//! trace for every exclusion.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branched_surface::{
    admits_coherent_ibundle, meridian_vertical_intersection, ComplementComponent, SectorKind,
};
use crate::catalog::{Catalog, CatalogEntry, CatalogError, ExclusionClass};
use crate::Slope;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("slope inf fills back to S^3, which is out of scope")]
    OutOfScope,
    #[error("{0} is not an integer slope")]
    NotInteger(Slope),
    #[error("power k = 0 does not come from a periodic orbit")]
    ZeroPower,
    #[error("{entry} does not admit slope {slope}")]
    NotAdmissible { entry: String, slope: Slope },
    #[error("classification gap at {entry}: {reason}")]
    Gap { entry: String, reason: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// An intermediate fact feeding later steps.
    Fact,
    Excludes,
    ForcesIntegerSlope,
    YieldsCoreOrbit,
    /// Pins the flow down up to topological equivalence.
    Classifies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub id: &'static str,
    pub anchor: &'static str,
    pub conclusion: Conclusion,
    pub note: Option<&'static str>,
}

use Conclusion::*;

const fn rule(id: &'static str, anchor: &'static str, conclusion: Conclusion) -> Rule {
    Rule {
        id,
        anchor,
        conclusion,
        note: None,
    }
}

pub const RULES: &[Rule] = &[
    rule("prop-5.1/three-types", "Moreover, $W_0$ should be one of the following three types", Fact),
    rule("prop-5.1/no-coherent-ibundle", "carries an $I$-bundle (regular or twisted)", Excludes),
    rule("lemma-6.1/b1-complement", "$W(B_1)$ is homeomorphic to $T^2 \\times [0,1]$", Fact),
    rule("lemma-6.2/b2-b4-complement", "Each of $W(B_2)$ and $W(B_4)$ is homeomorphic to a genus two handlebody.", Fact),
    rule(
        "lemma-6.3/b3-complement",
        "$B_3$ is homeomorphic to a Klein bottle so that $\\partial_h W(B_3)\\cong T^2$ and $\\partial_v W(B_3)= \\emptyset$",
        Fact,
    ),
    rule("lemma-6.4/b9m-complement", "$W(B_9^M)$ is homeomorphic to a genus four handlebody.", Fact),
    rule("prop-6.1/disk-leaf", "none of them carries any Anosov lamination", Excludes),
    rule("prop-6.5/three-cusps", "the union of three circles with slope-$\\infty$", Fact),
    rule("prop-6.5/r7-excluded", "$W(R_7)$ does not carry any I-bundle so that", Excludes),
    rule("prop-6.6/meridian-twice", "intersects to a core of $A_0$ twice", Fact),
    rule("prop-6.6/exceptional-core", "$V_0$ is an exceptional solid torus in $M(r)$", Fact),
    rule("prop-6.6/one-boundary-orbit", "with a unique boundary periodic orbit", Fact),
    rule("thm-5.5/two-boundary-orbits", "there exist two boundary periodic orbits on this attractor", Excludes),
    rule("prop-6.7/unique-exceptional", "is the unique exceptional solid torus in", Fact),
    rule("prop-6.7/meridian-more-than-once", "intersects to a core circle of $A_1$ more than once", Fact),
    rule(
        "prop-6.7/split-excluded",
        "$W(B)$ does not carry any I-bundle so that the I-bundle is coherent to $\\partial_v W(B)$",
        Excludes,
    ),
    rule("prop-6.2/core-power", "Therefore, $\\omega$ is homotopic to either $c(V_0)^p$ or $c(V_0)^{-p}$.", Fact),
    rule("thm-5.2/power-bound", "then $1\\leq |k| \\leq 2$", Fact),
    rule("thm-5.2/power-exceeds", "then $1\\leq |k| \\leq 2$", Excludes),
    rule(
        "thm-5.2/non-coorientable",
        "then either the stable foliation or the unstable foliation of $X_t$ is not transversely orientable",
        Fact,
    ),
    Rule {
        id: "lemma-5.7/infinitely-many",
        anchor: "Then there are infinitely many periodic orbits of $X_t$ so that each of their weak stable/unstable manifolds is not orientable.",
        conclusion: Fact,
        note: Some("applied as written; the lemma assumes the flow is transitive"),
    },
    rule("cor-4.3/transversely-orientable", "Then $\\cL$ is transversely orientable.", Fact),
    rule("prop-6.2/contradiction", "We get a contradiction, which means that $r\\in \\ZZ$", ForcesIntegerSlope),
    rule(
        "prop-6.2/core-orbit",
        "there exists a periodic orbit $\\omega$ of $X_t$ so that $\\omega$ is isotopic to a core $c(V)$ of $V$ in $M(r)$",
        YieldsCoreOrbit,
    ),
    rule("lemma-5.6/da-surgery", "by doing DA surgery on $(M(r), X_t)$ along $\\omega$", Fact),
    rule("thm-5.5/unique-attractor", "Then $Y_t$ is topologically equivalent to the DA flow $Y_t^0$ on $N$.", Fact),
    rule("thm-5.3/plante", "Then $X_t$ is topologically equivalent to a suspension Anosov flow on $M$.", Classifies),
    rule(
        "lemma-5.6/equivalence",
        "then $r\\in \\ZZ$ and $X_t$ is topologically equivalent to $X_t^r$",
        Classifies,
    ),
];

pub fn rule_by_id(id: &str) -> Option<&'static Rule> {
    RULES.iter().find(|r| r.id == id)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: String,
    pub anchor: String,
    pub conclusion: Conclusion,
    pub facts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// An ordered chain of cited deductions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    pub steps: Vec<Step>,
}

impl Trace {
    fn new(entry: Option<&str>) -> Self {
        Trace {
            entry: entry.map(str::to_string),
            steps: Vec::new(),
        }
    }

    fn push(&mut self, id: &str, facts: Vec<String>) -> &mut Self {
        let r = rule_by_id(id).unwrap_or_else(|| panic!("no rule {id}"));
        self.steps.push(Step {
            rule: r.id.to_string(),
            anchor: r.anchor.to_string(),
            conclusion: r.conclusion,
            facts,
            note: r.note.map(str::to_string),
        });
        self
    }

    pub fn conclusion(&self) -> Option<Conclusion> {
        self.steps.last().map(|s| s.conclusion)
    }

    /// Rule ids joined by `>`.
    pub fn digest(&self) -> String {
        let rules: Vec<&str> = self.steps.iter().map(|s| s.rule.as_str()).collect();
        rules.join(" > ")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(e) = &self.entry {
            out.push_str(&format!("{e}:\n"));
        }
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("  {}. [{}] \"{}\"\n", i + 1, s.rule, s.anchor));
            for f in &s.facts {
                out.push_str(&format!("       - {f}\n"));
            }
            if let Some(n) = &s.note {
                out.push_str(&format!("       note: {n}\n"));
            }
        }
        out
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Whether a periodic orbit may be freely homotopic to the `k`-th power of a closed curve.
pub fn fenley_power_admissible(k: i64) -> Result<bool, ClassifyError> {
    if k == 0 {
        return Err(ClassifyError::ZeroPower);
    }
    Ok((1..=2).contains(&k.abs()))
}

fn describe(c: &ComplementComponent) -> String {
    let wraps: Vec<String> = c.vertical.iter().map(|a| a.wrapping.to_string()).collect();
    if wraps.is_empty() {
        format!("{}, empty vertical boundary", c.topology)
    } else {
        format!("{}, vertical annuli wrapping [{}]", c.topology, wraps.join(", "))
    }
}

fn gap(e: &CatalogEntry, reason: impl Into<String>) -> ClassifyError {
    ClassifyError::Gap {
        entry: e.id.clone(),
        reason: reason.into(),
    }
}

/// The chain forced on a basic type II entry when the filling slope has denominator `p`.
/// `Ok(None)` when `p = 1`, where nothing is excluded.
pub fn integer_slope_chain(entry: &CatalogEntry, p: i64) -> Result<Option<Trace>, ClassifyError> {
    if entry.exclusion_class != ExclusionClass::BasicTypeII {
        return Err(gap(entry, "not a basic type II entry"));
    }
    if p == 1 {
        return Ok(None);
    }
    let mut t = Trace::new(Some(&entry.id));
    t.push(
        "prop-6.2/core-power",
        vec![
            "an annular sector has both end-loops of slope inf".into(),
            format!("the orbit through it is freely homotopic to c(V_0)^(+-{p})"),
        ],
    );
    if !fenley_power_admissible(p)? {
        t.push("thm-5.2/power-exceeds", vec![format!("k = {p} violates 1 <= |k| <= 2")]);
        return Ok(Some(t));
    }
    t.push("thm-5.2/power-bound", vec![format!("k = {p} is within 1 <= |k| <= 2")]);
    t.push(
        "thm-5.2/non-coorientable",
        vec!["k = 2, so the flow is non-coorientable".into()],
    );
    t.push(
        "lemma-5.7/infinitely-many",
        vec![
            "the stable foliation has infinitely many non-orientable leaves".into(),
            "splitting finitely many leaves leaves the lamination not transversely orientable".into(),
        ],
    );
    if entry.orientable != Some(true) {
        return Err(gap(
            entry,
            "p = 2 needs the entry to be transversely orientable, which is not recorded",
        ));
    }
    t.push(
        "cor-4.3/transversely-orientable",
        vec![format!("{} is transversely orientable", entry.id)],
    );
    t.push("prop-6.2/contradiction", vec![format!("p = {p} is impossible")]);
    Ok(Some(t))
}

fn disk_leaf_anchor(id: &str) -> Option<&'static str> {
    match id {
        "B1" => Some("lemma-6.1/b1-complement"),
        "B2" | "B4" => Some("lemma-6.2/b2-b4-complement"),
        "B3" => Some("lemma-6.3/b3-complement"),
        "B9_M" => Some("lemma-6.4/b9m-complement"),
        _ => None,
    }
}

/// Why `entry` cannot fully carry an Anosov lamination on `M(r)`.
/// `Ok(None)` for a basic type II entry at an integer slope.
///
/// A solid torus in the complement is exceptional when its core is not isotopic
/// to the core of the filling torus. The opposite wording also occurs in the
/// literature; these rules use this one.
pub fn exclusion_reason(entry: &CatalogEntry, r: &Slope) -> Result<Option<Trace>, ClassifyError> {
    if r.is_infinite() {
        return Err(ClassifyError::OutOfScope);
    }
    if !entry.is_admissible(r) {
        return Err(ClassifyError::NotAdmissible {
            entry: entry.id.clone(),
            slope: r.clone(),
        });
    }
    let comps = entry.complement_components(r)?;
    let mut t = Trace::new(Some(&entry.id));
    match entry.exclusion_class {
        ExclusionClass::DiskLeaf => {
            let lemma = disk_leaf_anchor(&entry.id).ok_or_else(|| gap(entry, "no complement lemma"))?;
            let bad: Vec<&ComplementComponent> = comps.iter().filter(|c| !admits_coherent_ibundle(c)).collect();
            if bad.is_empty() {
                return Err(gap(entry, "every complement component has an admissible shape"));
            }
            t.push(
                lemma,
                comps
                    .iter()
                    .map(|c| format!("W({}) = {}", entry.id, describe(c)))
                    .collect(),
            );
            t.push(
                "prop-5.1/three-types",
                bad.iter()
                    .map(|c| format!("{} is none of the three shapes", describe(c)))
                    .collect(),
            );
            t.push(
                "prop-6.1/disk-leaf",
                vec![format!("{} carries no Anosov lamination on M({r})", entry.id)],
            );
        }
        ExclusionClass::R7Cusps => {
            let c = comps
                .iter()
                .find(|c| c.is_solid_torus() && c.vertical.len() >= 3)
                .ok_or_else(|| gap(entry, "no solid torus with three vertical annuli"))?;
            t.push("prop-6.5/three-cusps", vec![format!("V_0 = {}", describe(c))]);
            t.push(
                "prop-5.1/three-types",
                vec![format!("{} is none of the three shapes", describe(c))],
            );
            t.push(
                "prop-6.5/r7-excluded",
                vec![format!("R7 does not fully carry an Anosov foliation on M({r})")],
            );
        }
        ExclusionClass::TypeI => {
            let s = entry
                .surface
                .sectors
                .iter()
                .find(|s| s.kind == SectorKind::AnnulusTypeI && s.vacant)
                .ok_or_else(|| gap(entry, "no vacant type I sector"))?;
            let c = comps
                .iter()
                .find(|c| c.adjacent.contains(&s.id))
                .ok_or_else(|| gap(entry, "vacant sector bounds no complement component"))?;
            let delta = meridian_vertical_intersection(c).map_err(|e| gap(entry, e.to_string()))?;
            let slope = s.slope().map_or("?".to_string(), |x| x.to_string());
            let meridian = format!(
                "vacant sector {} with end-loops of slope {slope}; a meridian of V_0 meets the core of A_0 {delta} times",
                s.id
            );
            if delta != 2 {
                t.push(
                    "prop-5.1/three-types",
                    vec![meridian, format!("{} is none of the three shapes", describe(c))],
                );
                t.push(
                    "prop-5.1/no-coherent-ibundle",
                    vec![format!("W({}) has no coherent I-bundle", entry.id)],
                );
            } else {
                t.push("prop-6.6/meridian-twice", vec![meridian]);
                t.push(
                    "prop-6.6/exceptional-core",
                    vec!["V_0 is the only exceptional solid torus, so M(r) - int(V_0) is isotopic to N".into()],
                );
                t.push(
                    "prop-6.6/one-boundary-orbit",
                    vec!["DA surgery along the core orbit gives an expanding attractor on N with one boundary periodic orbit".into()],
                );
                t.push(
                    "thm-5.5/two-boundary-orbits",
                    vec!["the unique expanding attractor on N has two boundary periodic orbits".into()],
                );
            }
        }
        ExclusionClass::SplitTypeII => {
            let c = comps
                .iter()
                .find(|c| c.is_solid_torus() && c.vertical.len() == 2 && c.adjacent.len() == 2)
                .ok_or_else(|| gap(entry, "no solid torus between the split sectors"))?;
            let m = meridian_vertical_intersection(c).map_err(|e| gap(entry, e.to_string()))?;
            if m <= 1 {
                return Err(gap(entry, format!("meridian meets the vertical annuli {m} time(s)")));
            }
            let parent = entry.parent.as_deref().unwrap_or("its parent");
            t.push(
                "prop-6.7/unique-exceptional",
                vec![format!(
                    "V_0 between {} splits a type II sector of {parent}",
                    c.adjacent.join(" and ")
                )],
            );
            t.push(
                "prop-6.7/meridian-more-than-once",
                vec![format!("a meridian of V_0 meets the core of A_1 {m} times")],
            );
            t.push(
                "prop-6.7/split-excluded",
                vec![format!("{} carries no Anosov lamination on M({r})", entry.id)],
            );
        }
        ExclusionClass::BasicTypeII => return integer_slope_chain(entry, *r.p()),
    }
    Ok(Some(t))
}

/// The core-orbit conclusion for a basic type II entry at an integer slope.
pub fn core_orbit(entry: &CatalogEntry, r: &Slope) -> Result<Trace, ClassifyError> {
    if !r.is_integral() {
        return Err(ClassifyError::NotInteger(r.clone()));
    }
    if entry.exclusion_class != ExclusionClass::BasicTypeII {
        return Err(gap(entry, "not a basic type II entry"));
    }
    let mut t = Trace::new(Some(&entry.id));
    t.push(
        "prop-6.2/core-orbit",
        vec![format!(
            "both boundary tori of N and the slope-inf sector of {} bound regular solid tori",
            entry.id
        )],
    );
    Ok(t)
}

/// Why the Anosov flow on `M(r)`, `r` an integer, is unique.
pub fn unique_flow_argument(r: &Slope) -> Result<Trace, ClassifyError> {
    if r.is_infinite() {
        return Err(ClassifyError::OutOfScope);
    }
    if !r.is_integral() {
        return Err(ClassifyError::NotInteger(r.clone()));
    }
    let mut t = Trace::new(None);
    if *r.q() == 0 {
        t.push(
            "thm-5.3/plante",
            vec!["M(0) is the sol-manifold, so the flow is the suspension of A".into()],
        );
        return Ok(t);
    }
    t.push(
        "prop-6.2/core-orbit",
        vec![
            "the stable foliation is fully carried by one of B6, B7, B8, B9".into(),
            "some periodic orbit omega is isotopic to the core of V".into(),
        ],
    );
    t.push(
        "lemma-5.6/da-surgery",
        vec!["M(r) minus a neighborhood of omega is isotopic to N".into()],
    );
    t.push(
        "thm-5.5/unique-attractor",
        vec!["the resulting expanding attractor is the DA attractor on N".into()],
    );
    t.push(
        "thm-5.3/plante",
        vec![format!(
            "{}-surgery along omega returns a flow on M(0), equivalent to the suspension",
            -r.q()
        )],
    );
    t.push(
        "lemma-5.6/equivalence",
        vec![format!("the flow is topologically equivalent to X_t^{r}")],
    );
    Ok(t)
}

/// Integer slopes whose filling is not hyperbolic.
pub fn is_exceptional_integer(q: i64) -> bool {
    (-4..=4).contains(&q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    SuspensionAnosov {
        argument: Trace,
    },
    UniqueAnosov {
        surgery: String,
        hyperbolic: bool,
        argument: Trace,
    },
    NoAnosov {
        traces: Vec<Trace>,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::SuspensionAnosov { .. } => "SuspensionAnosov",
            Verdict::UniqueAnosov { .. } => "UniqueAnosov",
            Verdict::NoAnosov { .. } => "NoAnosov",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub slope: Slope,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub hyperbolic: bool,
    pub taut_foliation: bool,
    pub candidates: Vec<String>,
    /// Facts stated alongside the theorem that the engine does not check.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metadata: Vec<String>,
}

pub struct Classifier {
    pub catalog: Catalog,
}

impl Classifier {
    pub fn new(catalog: Catalog) -> Self {
        Classifier { catalog }
    }

    pub fn embedded() -> Self {
        Classifier {
            catalog: crate::catalog::load(),
        }
    }

    pub fn classify(&self, r: &Slope) -> Result<ClassificationResult, ClassifyError> {
        if r.is_infinite() {
            return Err(ClassifyError::OutOfScope);
        }
        let cands = self.catalog.candidates_for(r);
        let candidates = cands.iter().map(|e| e.id.clone()).collect();
        let (verdict, hyperbolic, metadata) = if r.is_integral() {
            let q = *r.q();
            let argument = unique_flow_argument(r)?;
            if q == 0 {
                (Verdict::SuspensionAnosov { argument }, false, vec![])
            } else {
                let hyperbolic = !is_exceptional_integer(q);
                let meta = vec![
                    "the unique flow is obtained from the suspension flow on M(0) by surgery on gamma".to_string(),
                    "skew R-covered and isotopy-class statements about its periodic orbits are not checked".to_string(),
                ];
                let surgery = format!("{q}-Dehn-Fried-Goodman surgery on γ");
                (
                    Verdict::UniqueAnosov {
                        surgery,
                        hyperbolic,
                        argument,
                    },
                    hyperbolic,
                    meta,
                )
            }
        } else {
            let mut traces = Vec::with_capacity(cands.len());
            for e in &cands {
                match exclusion_reason(e, r)? {
                    Some(t) => traces.push(t),
                    None => return Err(gap(e, format!("no exclusion at {r}"))),
                }
            }
            (Verdict::NoAnosov { traces }, true, vec![])
        };
        Ok(ClassificationResult {
            slope: r.clone(),
            verdict,
            hyperbolic,
            taut_foliation: true,
            candidates,
            metadata,
        })
    }
}
