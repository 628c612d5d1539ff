use anosurf::branched_surface::{
    admits_coherent_ibundle, meridian_vertical_intersection, ComplementComponent, ComplementShape, CwComplex,
    Orientability, SurfaceError, Topology, VerticalAnnulus,
};
use anosurf::{BranchedSurface, Slope};
use serde_json::json;

fn surface(v: serde_json::Value) -> BranchedSurface {
    serde_json::from_value(v).unwrap()
}

fn torus_cw() -> serde_json::Value {
    json!({"vertices": 1, "edges": [[0, 0], [0, 0]], "faces": [[1, 2, -1, -2]]})
}

/// Two annuli on the curves f and g, glued to the base with the given flips.
fn two_annuli(flips: [bool; 3]) -> BranchedSurface {
    surface(json!({
        "id": "T",
        "base": {"qtype": "Q6"},
        "sectors": [
            {"id": "A", "kind": {"type": "annulus_type_ii"},
             "attachments": [{"curve": "f", "side": "two_fold", "slope": "inf"}, {"curve": "g", "side": "two_fold", "slope": "inf"}]},
            {"id": "C", "kind": {"type": "annulus_type_ii"},
             "attachments": [{"curve": "f", "side": "two_fold", "slope": "inf"}, {"curve": "g", "side": "two_fold", "slope": "inf"}]}
        ],
        "locus": [{"id": "f", "closed": true, "slope": "inf"}, {"id": "g", "closed": true, "slope": "inf"}],
        "junctions": [
            {"curve": "f", "sectors": ["base", "A"], "flip": flips[0]},
            {"curve": "g", "sectors": ["A", "C"], "flip": flips[1]},
            {"curve": "f", "sectors": ["C", "base"], "flip": flips[2]}
        ],
        "cw": torus_cw()
    }))
}

#[test]
fn cw_euler_characteristic() {
    let torus: CwComplex = serde_json::from_value(torus_cw()).unwrap();
    torus.validate().unwrap();
    assert_eq!(torus.euler_characteristic(), 0);
    let klein: CwComplex =
        serde_json::from_value(json!({"vertices": 1, "edges": [[0, 0], [0, 0]], "faces": [[1, 2, -1, 2]]})).unwrap();
    assert_eq!(klein.euler_characteristic(), 0);
    let disk: CwComplex =
        serde_json::from_value(json!({"vertices": 2, "edges": [[0, 1], [1, 0]], "faces": [[1, 2]]})).unwrap();
    disk.validate().unwrap();
    assert_eq!(disk.euler_characteristic(), 1);
}

#[test]
fn cw_rejects_open_walks() {
    let bad: CwComplex =
        serde_json::from_value(json!({"vertices": 2, "edges": [[0, 1], [0, 1]], "faces": [[1, 2]]})).unwrap();
    assert!(bad.validate().is_err());
    let out_of_range: CwComplex =
        serde_json::from_value(json!({"vertices": 1, "edges": [[0, 0]], "faces": [[2]]})).unwrap();
    assert!(out_of_range.validate().is_err());
}

#[test]
fn even_junction_graph_has_a_certificate() {
    let s = two_annuli([false, true, true]);
    s.validate().unwrap();
    match s.is_transversely_orientable() {
        Orientability::Certificate { signs } => {
            assert_eq!(signs["base"], signs["A"]);
            assert_eq!(signs["C"], -signs["A"]);
        }
        o => panic!("expected a certificate, got {o:?}"),
    }
}

#[test]
fn odd_junction_loop_is_an_obstruction() {
    let s = two_annuli([false, true, false]);
    match s.is_transversely_orientable() {
        Orientability::Obstruction { sectors, curves } => {
            assert_eq!(sectors.first(), sectors.last());
            assert_eq!(sectors.len(), 4);
            assert_eq!(curves.len(), 3);
        }
        o => panic!("expected an obstruction, got {o:?}"),
    }
}

#[test]
fn one_sided_base_is_an_obstruction() {
    let mut s = two_annuli([false, false, false]);
    s.base.surface = Some(anosurf::branched_surface::SurfaceType {
        genus: 2,
        punctures: 1,
        orientable: false,
    });
    assert!(!s.is_transversely_orientable().is_orientable());
}

#[test]
fn sink_disk_detection() {
    let disk = |sides: [&str; 2]| {
        surface(json!({
            "id": "D",
            "base": {"qtype": "Q2"},
            "sectors": [{"id": "d", "kind": {"type": "disk"},
                "attachments": [{"curve": "x", "side": sides[0]}, {"curve": "y", "side": sides[1]}]}],
            "locus": [{"id": "x", "closed": false}, {"id": "y", "closed": false}],
            "cw": torus_cw()
        }))
    };
    assert_eq!(disk(["one_fold", "one_fold"]).detect_sink_disks().len(), 1);
    assert_eq!(disk(["one_fold", "smooth"]).detect_sink_disks().len(), 1);
    assert!(disk(["one_fold", "two_fold"]).detect_sink_disks().is_empty());
    assert!(disk(["smooth", "smooth"]).detect_sink_disks().is_empty());
}

#[test]
fn validation_errors() {
    let mut s = two_annuli([false; 3]);
    s.sectors[1].id = "A".into();
    assert!(matches!(s.validate(), Err(SurfaceError::DuplicateSector(..))));
    let mut s = two_annuli([false; 3]);
    s.sectors[0].attachments[0].curve = "zz".into();
    assert!(matches!(s.validate(), Err(SurfaceError::UnknownCurve { .. })));
    let mut s = two_annuli([false; 3]);
    s.sectors[0].split_partner = Some("C".into());
    assert!(s.validate().is_err(), "partner must be mutual");
    let mut s = two_annuli([false; 3]);
    s.sectors[0].attachments[1].curve = "f".into();
    assert!(s.validate().is_err(), "type II ends lie on distinct curves");
}

#[test]
fn recorded_complement_must_match_euler_characteristic() {
    let mut s = two_annuli([false; 3]);
    s.complement = Some(vec![ComplementComponent {
        topology: Topology::Handlebody { genus: 2 },
        vertical: vec![],
        adjacent: vec![],
    }]);
    assert!(s.validate().is_err());
    s.complement.as_mut().unwrap()[0].topology = Topology::SolidTorus;
    s.validate().unwrap();
}

#[test]
fn split_pair_bounds_a_solid_torus_wrapping_p_times() {
    let mut s = two_annuli([false; 3]);
    s.sectors[0].split_partner = Some("C".into());
    s.sectors[1].split_partner = Some("A".into());
    s.validate().unwrap();
    let comps = s.complement_components(&"7/3".parse().unwrap()).unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(
        comps[0].vertical.iter().map(|a| a.wrapping).collect::<Vec<_>>(),
        vec![3, 3]
    );
    assert_eq!(meridian_vertical_intersection(&comps[0]).unwrap(), 3);
    assert!(!admits_coherent_ibundle(&comps[0]));
    assert!(matches!(
        s.complement_components(&Slope::infinity()),
        Err(SurfaceError::InfiniteSlope)
    ));
}

#[test]
fn complement_shapes() {
    let st = |w: &[u32]| ComplementComponent {
        topology: Topology::SolidTorus,
        vertical: w
            .iter()
            .map(|&wrapping| VerticalAnnulus { slope: None, wrapping })
            .collect(),
        adjacent: vec![],
    };
    assert_eq!(st(&[1, 1]).shape(), ComplementShape::SolidTorusTwoVerticalAnnuli);
    assert_eq!(st(&[2]).shape(), ComplementShape::SolidTorusDoublyWrappedAnnulus);
    assert!(matches!(st(&[3]).shape(), ComplementShape::Other { .. }));
    assert!(matches!(st(&[1, 1, 1]).shape(), ComplementShape::Other { .. }));
    let ball = ComplementComponent {
        topology: Topology::Ball,
        vertical: vec![VerticalAnnulus {
            slope: None,
            wrapping: 1,
        }],
        adjacent: vec![],
    };
    assert_eq!(ball.shape(), ComplementShape::BallWithVerticalSideAnnulus);
    assert!(admits_coherent_ibundle(&ball));
    assert!(matches!(
        meridian_vertical_intersection(&ball),
        Err(SurfaceError::NotSolidTorus(_))
    ));
    let h = ComplementComponent {
        topology: Topology::Handlebody { genus: 2 },
        vertical: vec![],
        adjacent: vec![],
    };
    assert!(!admits_coherent_ibundle(&h));
    assert_eq!(h.topology.euler_characteristic(), -1);
}
