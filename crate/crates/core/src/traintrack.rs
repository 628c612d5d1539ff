//! Train tracks on the boundary torus and their carried curves.
//!
//! A switch is a tie with two sides. Strands cross the tie from the one-fold
//! side to the two-fold side; the branch ends on each side are listed from
//! left to right for an observer moving in that direction. This ordering is
//! what lets [`TrainTrack::carried_classes`] realize a weight vector as an
//! honest family of disjoint curves, so tracks need not be orientable.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Slope;

pub type WeightVector = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrackError {
    #[error("duplicate branch name {0:?}")]
    DuplicateBranch(String),
    #[error("unknown branch {0:?}")]
    UnknownBranch(String),
    #[error("branch {0:?} has its {1} end attached {2} times")]
    EndCount(String, EndKind, usize),
    #[error("branch {0:?} has one end attached and the other free")]
    HalfAttached(String),
    #[error("switch {0} has an empty side")]
    EmptySide(usize),
    #[error("branch {0:?} has no homology label")]
    MissingLabel(String),
    #[error("weights {0:?} do not satisfy the switch equations")]
    NotASolution(WeightVector),
    #[error("weights {weights:?} realize curves of different slopes {first} and {second}")]
    MixedSlopes {
        weights: WeightVector,
        first: Slope,
        second: Slope,
    },
    #[error("weight vector has {got} entries, track has {want} branches")]
    Length { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndKind {
    Tail,
    Head,
}

impl EndKind {
    pub fn opposite(self) -> Self {
        match self {
            EndKind::Tail => EndKind::Head,
            EndKind::Head => EndKind::Tail,
        }
    }
}

impl std::fmt::Display for EndKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EndKind::Tail => "tail",
            EndKind::Head => "head",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub name: String,
    /// Homology class `(p, q)` swept out when running from tail to head.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchEnd {
    pub branch: String,
    pub end: EndKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub one_fold: Vec<BranchEnd>,
    pub two_fold: Vec<BranchEnd>,
}

/// Serialized form of a track.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackDoc {
    pub branches: Vec<Branch>,
    pub switches: Vec<Switch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct End {
    branch: usize,
    kind: EndKind,
}

/// A branched 1-manifold with switch structure, optionally labeled in `H₁(T)`.
///
/// A branch that meets no switch is a closed loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TrackDoc", into = "TrackDoc")]
pub struct TrainTrack {
    branches: Vec<Branch>,
    switches: Vec<(Vec<End>, Vec<End>)>,
}

/// One homogeneous linear equation per switch, columns indexed by branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub columns: usize,
    pub rows: Vec<Vec<i64>>,
}

impl LinearSystem {
    pub fn is_solution(&self, w: &[u32]) -> bool {
        w.len() == self.columns
            && self
                .rows
                .iter()
                .all(|row| row.iter().zip(w).map(|(c, x)| c * i64::from(*x)).sum::<i64>() == 0)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<i128>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.columns {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let (a, b) = (m[rank][col], m[r][col]);
                    for c in 0..self.columns {
                        m[r][c] = m[r][c] * a - m[rank][c] * b;
                    }
                    let g = m[r].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                    if g > 1 {
                        m[r].iter_mut().for_each(|x| *x /= g);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// All nonnegative solutions with entries at most `bound`, in lexicographic order.
    pub fn solutions(&self, bound: u32) -> Vec<WeightVector> {
        Solver::new(self, bound).run()
    }
}

struct Solver<'a> {
    sys: &'a LinearSystem,
    bound: i64,
    // rows touching each column
    by_col: Vec<Vec<usize>>,
    // for each row, the last column with a nonzero coefficient
    last: Vec<usize>,
    // per row and column: sums of positive / negative coefficients over columns > col
    pos_tail: Vec<Vec<i64>>,
    neg_tail: Vec<Vec<i64>>,
}

impl<'a> Solver<'a> {
    fn new(sys: &'a LinearSystem, bound: u32) -> Self {
        let n = sys.columns;
        let mut by_col = vec![Vec::new(); n];
        let mut last = Vec::with_capacity(sys.rows.len());
        let mut pos_tail = Vec::with_capacity(sys.rows.len());
        let mut neg_tail = Vec::with_capacity(sys.rows.len());
        for (r, row) in sys.rows.iter().enumerate() {
            let mut l = 0;
            for (c, &x) in row.iter().enumerate() {
                if x != 0 {
                    by_col[c].push(r);
                    l = c;
                }
            }
            last.push(l);
            let mut pt = vec![0; n + 1];
            let mut nt = vec![0; n + 1];
            for c in (0..n).rev() {
                pt[c] = pt[c + 1] + row[c].max(0);
                nt[c] = nt[c + 1] + (-row[c]).max(0);
            }
            pos_tail.push(pt);
            neg_tail.push(nt);
        }
        Solver {
            sys,
            bound: i64::from(bound),
            by_col,
            last,
            pos_tail,
            neg_tail,
        }
    }

    fn run(&self) -> Vec<WeightVector> {
        let n = self.sys.columns;
        let mut out = Vec::new();
        let mut w = vec![0u32; n];
        let mut sums = vec![0i64; self.sys.rows.len()];
        self.descend(0, &mut w, &mut sums, &mut out);
        out
    }

    fn descend(&self, col: usize, w: &mut Vec<u32>, sums: &mut Vec<i64>, out: &mut Vec<WeightVector>) {
        if col == self.sys.columns {
            out.push(w.clone());
            return;
        }
        let (mut lo, mut hi) = (0i64, self.bound);
        // A row whose last live column is this one pins the value.
        for &r in &self.by_col[col] {
            if self.last[r] == col {
                let c = self.sys.rows[r][col];
                let s = sums[r];
                if s % c != 0 {
                    return;
                }
                let x = -s / c;
                lo = lo.max(x);
                hi = hi.min(x);
            }
        }
        for x in lo..=hi {
            let mut ok = true;
            for &r in &self.by_col[col] {
                let s = sums[r] + self.sys.rows[r][col] * x;
                // remaining columns can still move the sum within this window
                if s + self.pos_tail[r][col + 1] * self.bound < 0 || s - self.neg_tail[r][col + 1] * self.bound > 0 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            for &r in &self.by_col[col] {
                sums[r] += self.sys.rows[r][col] * x;
            }
            w[col] = x as u32;
            self.descend(col + 1, w, sums, out);
            for &r in &self.by_col[col] {
                sums[r] -= self.sys.rows[r][col] * x;
            }
        }
        w[col] = 0;
    }
}

/// The reduced classes realized by one weight vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CarriedClass {
    pub weights: WeightVector,
    pub slope: Slope,
    /// Number of parallel essential components.
    pub multiplicity: u32,
    /// Number of nullhomologous components alongside them.
    pub trivial: u32,
}

/// Outcome of [`TrainTrack::carried_classes`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CarriedReport {
    pub classes: Vec<CarriedClass>,
    /// Nonzero solutions all of whose components are nullhomologous.
    pub nullhomologous: Vec<WeightVector>,
}

impl CarriedReport {
    pub fn slopes(&self) -> BTreeSet<Slope> {
        self.classes.iter().map(|c| c.slope.clone()).collect()
    }

    /// First witness for each realized slope.
    pub fn witnesses(&self) -> BTreeMap<Slope, &CarriedClass> {
        let mut m = BTreeMap::new();
        for c in &self.classes {
            m.entry(c.slope.clone()).or_insert(c);
        }
        m
    }
}

impl TrainTrack {
    pub fn new(branches: Vec<Branch>, switches: Vec<Switch>) -> Result<Self, TrackError> {
        Self::try_from(TrackDoc { branches, switches })
    }

    pub fn empty() -> Self {
        TrainTrack {
            branches: Vec::new(),
            switches: Vec::new(),
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn branch_index(&self, name: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.name == name)
    }

    pub fn has_labels(&self) -> bool {
        self.branches.iter().all(|b| b.label.is_some())
    }

    pub fn to_doc(&self) -> TrackDoc {
        self.clone().into()
    }

    /// Switch equations: one-fold side minus two-fold side.
    pub fn switch_system(&self) -> LinearSystem {
        let n = self.branches.len();
        let rows = self
            .switches
            .iter()
            .map(|(one, two)| {
                let mut row = vec![0i64; n];
                for e in one {
                    row[e.branch] += 1;
                }
                for e in two {
                    row[e.branch] -= 1;
                }
                row
            })
            .collect();
        LinearSystem { columns: n, rows }
    }

    /// Every solution with entries at most `bound`, zero vector included, in lexicographic order.
    pub fn enumerate_solutions(&self, bound: u32) -> Vec<WeightVector> {
        self.switch_system().solutions(bound)
    }

    /// Branches that vanish in every solution up to `bound`.
    pub fn forced_zero(&self, bound: u32) -> Vec<usize> {
        let sols = self.enumerate_solutions(bound);
        (0..self.branches.len())
            .filter(|&i| sols.iter().all(|w| w[i] == 0))
            .collect()
    }

    /// Homology classes of the components of the multicurve with weights `w`.
    pub fn realize(&self, w: &[u32]) -> Result<Vec<(i64, i64)>, TrackError> {
        let n = self.branches.len();
        if w.len() != n {
            return Err(TrackError::Length { got: w.len(), want: n });
        }
        if !self.switch_system().is_solution(w) {
            return Err(TrackError::NotASolution(w.to_vec()));
        }
        let labels = self.labels()?;
        // strand key: (branch, copy, end)
        let mut partner: HashMap<(usize, u32, EndKind), (usize, u32, EndKind)> = HashMap::new();
        for (one, two) in &self.switches {
            let a = stack(one, w, true);
            let b = stack(two, w, false);
            debug_assert_eq!(a.len(), b.len());
            for (x, y) in a.into_iter().zip(b) {
                partner.insert(x, y);
                partner.insert(y, x);
            }
        }
        let mut seen: Vec<Vec<bool>> = w.iter().map(|&k| vec![false; k as usize]).collect();
        let mut comps = Vec::new();
        for b in 0..n {
            for c in 0..w[b] {
                if seen[b][c as usize] {
                    continue;
                }
                let mut total = (0i64, 0i64);
                let (mut cb, mut cc, mut entered) = (b, c, EndKind::Tail);
                loop {
                    seen[cb][cc as usize] = true;
                    let (p, q) = labels[cb];
                    let s = if entered == EndKind::Tail { 1 } else { -1 };
                    total.0 += s * p;
                    total.1 += s * q;
                    let exit = (cb, cc, entered.opposite());
                    let Some(&(nb, nc, ne)) = partner.get(&exit) else {
                        // closed loop branch without switches
                        break;
                    };
                    if (nb, nc) == (b, c) {
                        break;
                    }
                    (cb, cc, entered) = (nb, nc, ne);
                }
                comps.push(total);
            }
        }
        Ok(comps)
    }

    /// The weighted sum of labels; the class of `w` when the track is oriented.
    pub fn weighted_class(&self, w: &[u32]) -> Result<(i64, i64), TrackError> {
        let labels = self.labels()?;
        Ok(labels.iter().zip(w).fold((0, 0), |(p, q), (&(a, b), &x)| {
            (p + a * i64::from(x), q + b * i64::from(x))
        }))
    }

    /// Slope and multiplicity of `w`, or `None` if every component is trivial.
    pub fn class_of(&self, w: &[u32]) -> Result<Option<CarriedClass>, TrackError> {
        let comps = self.realize(w)?;
        let mut slope: Option<Slope> = None;
        let (mut mult, mut trivial) = (0, 0);
        for (p, q) in comps {
            match Slope::reduce(p, q) {
                Err(_) => trivial += 1,
                Ok(s) => {
                    if let Some(prev) = &slope {
                        if *prev != s {
                            return Err(TrackError::MixedSlopes {
                                weights: w.to_vec(),
                                first: prev.clone(),
                                second: s,
                            });
                        }
                    }
                    slope = Some(s);
                    mult += 1;
                }
            }
        }
        Ok(slope.map(|slope| CarriedClass {
            weights: w.to_vec(),
            slope,
            multiplicity: mult,
            trivial,
        }))
    }

    /// Classes realized by every nonzero solution up to `bound`.
    pub fn carried_classes(&self, bound: u32) -> Result<CarriedReport, TrackError> {
        self.labels()?;
        self.classes_where(bound, |_| true)
    }

    /// Classes realized by solutions positive on every branch outside `exempt`.
    ///
    /// These are the multicurves that are fully carried, apart from branches that
    /// only ever carry non-compact leaves.
    pub fn fully_carried_classes(&self, bound: u32, exempt: &[usize]) -> Result<CarriedReport, TrackError> {
        self.labels()?;
        self.classes_where(bound, |w| {
            w.iter().enumerate().all(|(i, &x)| x > 0 || exempt.contains(&i))
        })
    }

    fn classes_where(&self, bound: u32, keep: impl Fn(&[u32]) -> bool) -> Result<CarriedReport, TrackError> {
        let mut report = CarriedReport::default();
        for w in self.enumerate_solutions(bound) {
            if w.iter().all(|&x| x == 0) || !keep(&w) {
                continue;
            }
            match self.class_of(&w)? {
                Some(c) => report.classes.push(c),
                None => report.nullhomologous.push(w),
            }
        }
        Ok(report)
    }

    /// A solution realizing slope `s`, if one exists within `bound`.
    pub fn carries_slope(&self, s: &Slope, bound: u32) -> Result<Option<WeightVector>, TrackError> {
        self.labels()?;
        for w in self.enumerate_solutions(bound) {
            if w.iter().all(|&x| x == 0) {
                continue;
            }
            if let Some(c) = self.class_of(&w)? {
                if &c.slope == s {
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    }

    /// Renames branches; names missing from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Result<Self, TrackError> {
        let mut doc = self.to_doc();
        let new = |n: &String| map.get(n).cloned().unwrap_or_else(|| n.clone());
        for b in &mut doc.branches {
            b.name = new(&b.name);
        }
        for s in &mut doc.switches {
            for e in s.one_fold.iter_mut().chain(s.two_fold.iter_mut()) {
                e.branch = new(&e.branch);
            }
        }
        Self::try_from(doc)
    }

    /// Removes every switch with a single end on each side, fusing the two branches.
    ///
    /// The fused branch is named `first+second` in the direction of travel from the
    /// one-fold side. Carried multicurves are unchanged.
    pub fn smooth(&self) -> Self {
        let mut t = self.clone();
        while let Some(k) = t.switches.iter().position(|(a, b)| a.len() == 1 && b.len() == 1) {
            let (x, y) = (t.switches[k].0[0], t.switches[k].1[0]);
            t.switches.remove(k);
            if x.branch == y.branch {
                continue;
            }
            let flip = |l: Option<(i64, i64)>, rev: bool| l.map(|(p, q)| if rev { (-p, -q) } else { (p, q) });
            let rev1 = x.kind == EndKind::Tail;
            let rev2 = y.kind == EndKind::Head;
            let (b1, b2) = (&t.branches[x.branch], &t.branches[y.branch]);
            let label = match (flip(b1.label, rev1), flip(b2.label, rev2)) {
                (Some((p1, q1)), Some((p2, q2))) => Some((p1 + p2, q1 + q2)),
                _ => None,
            };
            let name = format!("{}+{}", b1.name, b2.name);
            let (lo, hi) = (x.branch.min(y.branch), x.branch.max(y.branch));
            let relabel = |e: End| -> End {
                if e.branch == x.branch {
                    End {
                        branch: lo,
                        kind: EndKind::Tail,
                    }
                } else if e.branch == y.branch {
                    End {
                        branch: lo,
                        kind: EndKind::Head,
                    }
                } else {
                    End {
                        branch: e.branch - usize::from(e.branch > hi),
                        kind: e.kind,
                    }
                }
            };
            for (a, b) in &mut t.switches {
                for e in a.iter_mut().chain(b.iter_mut()) {
                    *e = relabel(*e);
                }
            }
            t.branches[lo] = Branch { name, label };
            t.branches.remove(hi);
        }
        t
    }

    /// Orients every tie so that each branch carries a consistent transverse
    /// direction. Returns one sign per switch, or the branches of a loop along
    /// which no such choice exists.
    pub fn transverse_orientation(&self) -> Result<Vec<i8>, Vec<usize>> {
        // (switch, on two-fold side) for each end of each branch
        let mut at: Vec<[Option<(usize, bool)>; 2]> = vec![[None, None]; self.branches.len()];
        for (s, (one, two)) in self.switches.iter().enumerate() {
            for (ends, is_two) in [(one, false), (two, true)] {
                for e in ends {
                    let k = usize::from(e.kind == EndKind::Head);
                    at[e.branch][k] = Some((s, is_two));
                }
            }
        }
        let mut adj: Vec<Vec<(usize, bool, usize)>> = vec![Vec::new(); self.switches.len()];
        for (b, ends) in at.iter().enumerate() {
            let [Some((s, tail_two)), Some((t, head_two))] = *ends else {
                continue;
            };
            // Running tail to head agrees with the crossing direction at both
            // switches, or at neither, exactly when the tie sides match up.
            let flip = tail_two == head_two;
            adj[s].push((t, flip, b));
            if s != t {
                adj[t].push((s, flip, b));
            }
        }
        let mut sign: Vec<Option<i8>> = vec![None; self.switches.len()];
        let mut via: Vec<Option<(usize, usize)>> = vec![None; self.switches.len()];
        for root in 0..self.switches.len() {
            if sign[root].is_some() {
                continue;
            }
            sign[root] = Some(1);
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &(v, flip, b) in &adj[u] {
                    let want = if flip { -sign[u].unwrap() } else { sign[u].unwrap() };
                    match sign[v] {
                        None => {
                            sign[v] = Some(want);
                            via[v] = Some((u, b));
                            stack.push(v);
                        }
                        Some(x) if x != want => {
                            let path = |mut x: usize| {
                                let mut out = vec![(x, None)];
                                while let Some((p, b)) = via[x] {
                                    out.push((p, Some(b)));
                                    x = p;
                                }
                                out
                            };
                            let (pu, pv) = (path(u), path(v));
                            let meet = pu.iter().position(|&(x, _)| pv.iter().any(|&(y, _)| y == x)).unwrap();
                            let mv = pv.iter().position(|&(y, _)| y == pu[meet].0).unwrap();
                            let mut loop_: Vec<usize> = pu[1..=meet].iter().rev().filter_map(|&(_, b)| b).collect();
                            loop_.push(b);
                            loop_.extend(pv[1..=mv].iter().filter_map(|&(_, b)| b));
                            return Err(loop_);
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(sign.into_iter().map(Option::unwrap).collect())
    }

    fn labels(&self) -> Result<Vec<(i64, i64)>, TrackError> {
        self.branches
            .iter()
            .map(|b| b.label.ok_or_else(|| TrackError::MissingLabel(b.name.clone())))
            .collect()
    }
}

/// Strands crossing one side of a tie, left to right.
///
/// A branch is numbered from its own left when running tail to head, so its
/// strands appear in ascending order exactly when it runs across the tie from
/// the one-fold side towards the two-fold side.
fn stack(ends: &[End], w: &[u32], one_fold: bool) -> Vec<(usize, u32, EndKind)> {
    let mut out = Vec::new();
    for e in ends {
        let k = w[e.branch];
        let ascending = (e.kind == EndKind::Head) == one_fold;
        for i in 0..k {
            let c = if ascending { i } else { k - 1 - i };
            out.push((e.branch, c, e.kind));
        }
    }
    out
}

impl TryFrom<TrackDoc> for TrainTrack {
    type Error = TrackError;

    fn try_from(doc: TrackDoc) -> Result<Self, Self::Error> {
        let mut index = HashMap::new();
        for (i, b) in doc.branches.iter().enumerate() {
            if index.insert(b.name.clone(), i).is_some() {
                return Err(TrackError::DuplicateBranch(b.name.clone()));
            }
        }
        let mut counts = vec![[0usize; 2]; doc.branches.len()];
        let mut resolve = |ends: &[BranchEnd]| -> Result<Vec<End>, TrackError> {
            ends.iter()
                .map(|e| {
                    let &i = index
                        .get(&e.branch)
                        .ok_or_else(|| TrackError::UnknownBranch(e.branch.clone()))?;
                    counts[i][(e.end == EndKind::Head) as usize] += 1;
                    Ok(End { branch: i, kind: e.end })
                })
                .collect()
        };
        let mut switches = Vec::with_capacity(doc.switches.len());
        for (k, s) in doc.switches.iter().enumerate() {
            if s.one_fold.is_empty() || s.two_fold.is_empty() {
                return Err(TrackError::EmptySide(k));
            }
            switches.push((resolve(&s.one_fold)?, resolve(&s.two_fold)?));
        }
        for (b, [t, h]) in doc.branches.iter().zip(&counts) {
            match (t, h) {
                (0, 0) | (1, 1) => {}
                (1, 0) | (0, 1) => return Err(TrackError::HalfAttached(b.name.clone())),
                (t, _) if *t > 1 => return Err(TrackError::EndCount(b.name.clone(), EndKind::Tail, *t)),
                (_, h) => return Err(TrackError::EndCount(b.name.clone(), EndKind::Head, *h)),
            }
        }
        Ok(TrainTrack {
            branches: doc.branches,
            switches,
        })
    }
}

impl From<TrainTrack> for TrackDoc {
    fn from(t: TrainTrack) -> Self {
        let name = |e: &End| BranchEnd {
            branch: t.branches[e.branch].name.clone(),
            end: e.kind,
        };
        let switches = t
            .switches
            .iter()
            .map(|(one, two)| Switch {
                one_fold: one.iter().map(name).collect(),
                two_fold: two.iter().map(name).collect(),
            })
            .collect();
        TrackDoc {
            branches: t.branches,
            switches,
        }
    }
}
