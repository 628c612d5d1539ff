use std::collections::BTreeMap;

use anosurf::spine::qtype;
use anosurf::traintrack::{Branch, BranchEnd, EndKind, Switch, TrackDoc, TrackError};
use anosurf::{Slope, TrainTrack};
use proptest::prelude::*;

fn end(b: &str, e: EndKind) -> BranchEnd {
    BranchEnd {
        branch: b.into(),
        end: e,
    }
}

fn br(name: &str, label: (i64, i64)) -> Branch {
    Branch {
        name: name.into(),
        label: Some(label),
    }
}

/// A longitude loop and a meridian loop merging into one branch and splitting again.
fn figure_x() -> TrainTrack {
    use EndKind::*;
    TrainTrack::new(
        vec![br("l", (1, 0)), br("m", (0, 1)), br("x", (0, 0))],
        vec![
            Switch {
                one_fold: vec![end("x", Tail)],
                two_fold: vec![end("l", Head), end("m", Head)],
            },
            Switch {
                one_fold: vec![end("x", Head)],
                two_fold: vec![end("l", Tail), end("m", Tail)],
            },
        ],
    )
    .unwrap()
}

#[test]
fn single_loop_carries_its_label() {
    let t = TrainTrack::new(vec![br("a", (1, 0))], vec![]).unwrap();
    let r = t.carried_classes(4).unwrap();
    assert_eq!(r.slopes().into_iter().collect::<Vec<_>>(), vec![Slope::integer(0)]);
    let c = t.class_of(&[3]).unwrap().unwrap();
    assert_eq!(c.multiplicity, 3);
}

#[test]
fn switch_equations() {
    let t = figure_x();
    let sys = t.switch_system();
    assert_eq!(sys.columns, 3);
    assert_eq!(sys.rank(), 1);
    assert!(sys.is_solution(&[2, 3, 5]));
    assert!(!sys.is_solution(&[2, 3, 4]));
    let sols = t.enumerate_solutions(2);
    // l + m <= 2
    assert_eq!(sols.len(), 6);
    assert!(sols.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn merged_loops_realize_sums() {
    let t = figure_x();
    // l and m cross on the torus, so the merged strands close up into one (1, 1) curve
    assert_eq!(t.realize(&[1, 1, 2]).unwrap(), vec![(1, 1)]);
    assert_eq!(
        t.class_of(&[2, 1, 3]).unwrap().unwrap().slope,
        Slope::reduce(2, 1).unwrap()
    );
    assert_eq!(t.class_of(&[1, 0, 1]).unwrap().unwrap().slope, Slope::integer(0));
    assert_eq!(t.class_of(&[0, 1, 1]).unwrap().unwrap().slope, Slope::infinity());
    assert!(matches!(t.realize(&[1, 0, 0]), Err(TrackError::NotASolution(_))));
    assert!(matches!(
        t.realize(&[1, 0]),
        Err(TrackError::Length { got: 2, want: 3 })
    ));
}

#[test]
fn structural_errors() {
    use EndKind::*;
    let dup = TrainTrack::new(vec![br("a", (1, 0)), br("a", (0, 1))], vec![]);
    assert!(matches!(dup, Err(TrackError::DuplicateBranch(_))));
    let half = TrainTrack::new(
        vec![br("a", (1, 0)), br("b", (1, 0))],
        vec![Switch {
            one_fold: vec![end("a", Head)],
            two_fold: vec![end("b", Tail)],
        }],
    );
    assert!(matches!(half, Err(TrackError::HalfAttached(_))));
    let unknown = TrainTrack::new(
        vec![br("a", (1, 0))],
        vec![Switch {
            one_fold: vec![end("z", Head)],
            two_fold: vec![end("a", Tail)],
        }],
    );
    assert!(matches!(unknown, Err(TrackError::UnknownBranch(_))));
    let empty = TrainTrack::new(
        vec![br("a", (1, 0))],
        vec![Switch {
            one_fold: vec![end("a", Head), end("a", Tail)],
            two_fold: vec![],
        }],
    );
    assert!(matches!(empty, Err(TrackError::EmptySide(0))));
}

#[test]
fn unlabeled_tracks_solve_but_do_not_realize() {
    let t = TrainTrack::new(
        vec![Branch {
            name: "a".into(),
            label: None,
        }],
        vec![],
    )
    .unwrap();
    assert!(!t.has_labels());
    assert_eq!(t.enumerate_solutions(3).len(), 4);
    assert!(matches!(t.carried_classes(3), Err(TrackError::MissingLabel(_))));
}

#[test]
fn json_round_trip() {
    let t = figure_x();
    let j = serde_json::to_string(&t).unwrap();
    let back: TrainTrack = serde_json::from_str(&j).unwrap();
    assert_eq!(back, t);
    let doc: TrackDoc = t.to_doc();
    assert_eq!(doc.branches.len(), 3);
}

#[test]
fn rename_keeps_solutions() {
    let t = figure_x();
    let map = BTreeMap::from([("x".to_string(), "y".to_string())]);
    let r = t.rename(&map).unwrap();
    assert_eq!(r.branch_index("y"), Some(2));
    assert_eq!(r.enumerate_solutions(3), t.enumerate_solutions(3));
}

#[test]
fn smoothing_removes_bivalent_switches() {
    for id in ["Q2", "Q5", "Q9"] {
        let raw = qtype(id).unwrap().raw_track().unwrap();
        let smooth = raw.smooth();
        assert!(smooth.branch_count() < raw.branch_count(), "{id}");
        assert_eq!(smooth.smooth(), smooth, "{id}");
    }
}

#[test]
fn transverse_orientation_of_qtype_tracks() {
    for id in ["Q6", "Q7", "Q8", "Q9"] {
        let t = qtype(id).unwrap().track().unwrap();
        let signs = t
            .transverse_orientation()
            .unwrap_or_else(|odd| panic!("{id}: odd loop {odd:?}"));
        assert_eq!(signs.len(), t.switch_count());
    }
    for id in ["Q5", "Q10", "Q11"] {
        let t = qtype(id).unwrap().track().unwrap();
        let odd = t.transverse_orientation().expect_err(id);
        assert!(!odd.is_empty());
    }
}

#[test]
fn q5_carries_only_slope_four() {
    let t = qtype("Q5").unwrap().track().unwrap();
    let four = Slope::integer(4);
    assert!(t.carries_slope(&four, 6).unwrap().is_some());
    assert!(t.carries_slope(&Slope::integer(3), 6).unwrap().is_none());
    assert_eq!(
        t.carried_classes(8).unwrap().slopes().into_iter().collect::<Vec<_>>(),
        vec![four]
    );
}

#[test]
fn forced_zero_branches() {
    use EndKind::*;
    // a = a + b and b + c = c
    let t = TrainTrack::new(
        vec![br("a", (1, 0)), br("b", (0, 1)), br("c", (1, 0))],
        vec![
            Switch {
                one_fold: vec![end("a", Head)],
                two_fold: vec![end("a", Tail), end("b", Tail)],
            },
            Switch {
                one_fold: vec![end("b", Head), end("c", Head)],
                two_fold: vec![end("c", Tail)],
            },
        ],
    )
    .unwrap();
    assert_eq!(t.forced_zero(4), vec![1]);
    assert_eq!(t.enumerate_solutions(2).len(), 9);
}

fn grid(n: usize, bound: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (bound as usize + 1).pow(n as u32);
    (0..total).map(move |mut k| {
        let mut w = vec![0u32; n];
        for x in w.iter_mut().rev() {
            *x = (k % (bound as usize + 1)) as u32;
            k /= bound as usize + 1;
        }
        w
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_are_closed_under_addition(a in 0usize..40, b in 0usize..40) {
        let t = qtype("Q2").unwrap().track().unwrap();
        let sols = t.enumerate_solutions(3);
        let (x, y) = (&sols[a % sols.len()], &sols[b % sols.len()]);
        let sum: Vec<u32> = x.iter().zip(y).map(|(p, q)| p + q).collect();
        prop_assert!(t.switch_system().is_solution(&sum));
    }

    #[test]
    fn q2_slopes_follow_weighted_class(bound in 1u32..4) {
        let t = qtype("Q2").unwrap().track().unwrap();
        let sols: Vec<Vec<u32>> = grid(t.branch_count(), bound).filter(|w| t.switch_system().is_solution(w)).collect();
        prop_assert_eq!(&sols, &t.enumerate_solutions(bound));
        for w in sols.iter().filter(|w| w.iter().any(|&x| x > 0)) {
            if let Some(c) = t.class_of(w).unwrap() {
                let (p, q) = t.weighted_class(w).unwrap();
                if (p, q) != (0, 0) {
                    prop_assert_eq!(Slope::reduce(p, q).unwrap(), c.slope);
                }
            }
        }
    }
}
