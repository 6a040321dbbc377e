//! Randomized structural properties over builder parameter ranges.

use dilaflow_core::builders::{build_dilation_cylinder, build_two_chamber, TwoChamberParams};
use dilaflow_core::geom::DirectionAngle;
use dilaflow_core::surface::{holonomy_of_path, SingularityKind};
use dilaflow_core::trace::{trace, FlowPoint, TraceConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    /// Any wedge cylinder validates into an annulus with involutive gluings
    /// and trivial out-and-back holonomy.
    #[test]
    fn wedge_cylinders_validate(rho in 0.05f64..0.95, alpha in 0.05f64..6.2) {
        let s = build_dilation_cylinder(rho, alpha).unwrap();
        prop_assert_eq!(s.genus, 0);
        prop_assert_eq!(s.euler_characteristic, 0);
        prop_assert_eq!(s.boundary_components.len(), 2);
        for pairing in &s.pairings {
            let back = s.crossing_side(pairing.f).unwrap().map;
            prop_assert!(back.compose(&pairing.map).identity_defect() < 1e-12);
            let loop_h = holonomy_of_path(&s, &[pairing.e, pairing.f]).unwrap();
            prop_assert!(loop_h.identity_defect() < 1e-9);
        }
    }

    /// Any two-chamber surface is closed of genus two with one index-3 cone
    /// point, and its slit disconnects.
    #[test]
    fn two_chambers_validate(
        p in 1.2f64..4.0,
        q in 1.2f64..4.0,
        scale in 0.3f64..3.0,
    ) {
        let tc = build_two_chamber(TwoChamberParams { ratio_a: p, ratio_b: q, scale }).unwrap();
        let s = &tc.surface;
        prop_assert!(s.is_closed());
        prop_assert_eq!(s.genus, 2);
        prop_assert_eq!(s.singularities.len(), 1);
        prop_assert_eq!(s.singularities[0].kind, SingularityKind::Interior { index: 3 });
        prop_assert_eq!(s.index_sum(), 2);

        let sc = dilaflow_core::saddle::SaddleConnection::of_edge(s, tc.designated_edge);
        let report = dilaflow_core::horizon::is_disconnecting(s, &sc).unwrap();
        prop_assert!(report.disconnecting);
        prop_assert_eq!(report.components, 2);
    }

    /// Tracing is deterministic and direction is constant along a trace.
    #[test]
    fn traces_are_deterministic(
        x in 0.05f64..0.95,
        y in 0.05f64..0.95,
        dir in 0.0f64..6.2,
    ) {
        let tc = build_two_chamber(Default::default()).unwrap();
        // Map the unit square into chamber A's lower-right block.
        let start = FlowPoint::new(0, x, y);
        let d = DirectionAngle::new(dir);
        let cfg = TraceConfig::with_max_crossings(96);
        let a = trace(&tc.surface, start, d, &cfg);
        let b = trace(&tc.surface, start, d, &cfg);
        match (a, b) {
            (Ok(ra), Ok(rb)) => {
                prop_assert_eq!(ra.crossings.len(), rb.crossings.len());
                for (ca, cb) in ra.crossings.iter().zip(rb.crossings.iter()) {
                    prop_assert_eq!(ca.edge, cb.edge);
                    prop_assert_eq!(ca.coord, cb.coord);
                }
                prop_assert_eq!(ra.path_length, rb.path_length);
            }
            (Err(ea), Err(eb)) => prop_assert_eq!(ea, eb),
            other => prop_assert!(false, "nondeterministic: {other:?}"),
        }
    }
}
