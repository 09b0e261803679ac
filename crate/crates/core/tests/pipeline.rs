use bodycad::algebra::{assemble, random_generic_labeling};
use bodycad::analyzer::fixtures::{self, random_geometry, PAPPUS_IMPLIED};
use bodycad::analyzer::{analyze, numeric_result, random_counted_frame, CrossCheck, RandomFrameSpec};
use bodycad::cad::{build_primitive_frame, CadConstraint, CadFramework, ConstraintKind};
use bodycad::engine::{decide, find_certificate, fundamental_circuits, rank, verify_certificate, Status};
use bodycad::field::{Fp, Rational};
use bodycad::graph::{BiColoredMultigraph, Color, Edge, EdgeId, SparsityParams};
use bodycad::io::{format_document, parse_document, report_to_json};
use proptest::prelude::*;

const P63: SparsityParams = SparsityParams::BODY_AND_CAD;

#[test]
fn pappus_ranks() {
    let exact = build_primitive_frame(&fixtures::pappus(false)).unwrap();
    let generic = build_primitive_frame(&fixtures::pappus(true)).unwrap();
    for frame in [&exact, &generic] {
        assert_eq!((frame.graph.n(), frame.graph.m(), frame.graph.red_count()), (18, 54, 0));
        assert_eq!(rank(&frame.graph, &frame.graph.edge_ids(), P63).unwrap(), 54);
    }
    assert_eq!(numeric_result(&generic.graph, &generic.labeling).unwrap().rank, 54);
    let exact_rank = numeric_result(&exact.graph, &exact.labeling).unwrap().rank;
    assert_eq!(exact_rank, 50);
    // Both rows of the implied coincidence depend on the other 52.
    let reduced = build_primitive_frame(&fixtures::pappus(false).without(PAPPUS_IMPLIED)).unwrap();
    assert_eq!(numeric_result(&reduced.graph, &reduced.labeling).unwrap().rank, exact_rank);
}

#[test]
fn pappus_points_are_incident() {
    // Every point lies on its line: the point minus the line point is parallel to the direction.
    for c in fixtures::pappus(false).constraints() {
        let bodycad::cad::Geometry::PointLineCoincidence { point_i, line_j } = &c.geometry else { panic!() };
        let offset = point_i - &line_j.point;
        assert!(offset.cross(line_j.direction.vec()).is_zero(), "{}", c.id);
    }
}

#[test]
fn example_31_certificates_verify() {
    let g = fixtures::example_31_graph();
    let p31 = SparsityParams::new(3, 1).unwrap();
    assert!(verify_certificate(&g, &fixtures::example_31_certificate(), p31));
    let found = find_certificate(&g, p31).unwrap();
    assert!(verify_certificate(&g, &found, p31));
    assert_eq!(decide(&g, p31).status, Status::MinimallyRigid);
    let angular_side = fixtures::example_31_certificate().angular_side_black(&g, p31);
    assert_eq!(angular_side, vec![EdgeId(3)]);
}

#[test]
fn example_31_with_four_red_edges_is_rejected() {
    let g = fixtures::example_31_graph();
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| Edge { color: if e.id.0 == 3 || e.id.0 == 4 { Color::Red } else { e.color }, ..e.clone() })
        .collect();
    let h = BiColoredMultigraph::new(4, edges).unwrap();
    let p31 = SparsityParams::new(3, 1).unwrap();
    assert_eq!(decide(&h, p31).status, Status::NotCounted);
}

#[test]
fn analysis_is_byte_identical_across_runs_and_round_trips() {
    for fw in [fixtures::rigid_pair(), fixtures::pappus(false), fixtures::double_banana()] {
        let reparsed = parse_document(&format_document(&fw)).unwrap();
        let a = report_to_json(&analyze::<Fp>(&fw, 17).unwrap());
        let b = report_to_json(&analyze::<Fp>(&reparsed, 17).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn rational_and_prime_fields_agree_on_fixtures() {
    for fw in [fixtures::rigid_pair(), fixtures::flexible_pair(), fixtures::double_banana()] {
        let q = analyze::<Rational>(&fw, 2).unwrap();
        let p = analyze::<Fp>(&fw, 2).unwrap();
        assert_eq!(q.combinatorial, p.combinatorial);
        assert_eq!(q.numeric.embedding, p.numeric.embedding);
        assert_eq!(q.cross_check, p.cross_check);
    }
}

fn arb_framework() -> impl Strategy<Value = CadFramework> {
    (2usize..5, prop::collection::vec((0usize..21, 0usize..5, 1usize..5, any::<u64>()), 0..6)).prop_map(|(n, specs)| {
        let constraints = specs
            .into_iter()
            .enumerate()
            .map(|(k, (kind, i, d, seed))| {
                let i = i % n;
                let j = (i + d) % n;
                let j = if j == i { (i + 1) % n } else { j };
                CadConstraint { id: format!("c{k}"), i, j, geometry: random_geometry(ConstraintKind::ALL[kind], seed) }
            })
            .collect();
        CadFramework::numbered(n, constraints).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn withheld_iff_point_point_coincidence(fw in arb_framework()) {
        let report = analyze::<Fp>(&fw, 1).unwrap();
        prop_assert_eq!(report.is_withheld(), fw.has_point_point_coincidence());
        if !report.is_withheld() {
            prop_assert_eq!(report.cross_check, CrossCheck::Agree);
        }
    }

    #[test]
    fn circuits_are_minimally_dependent_rows(seed in any::<u64>(), n in 2usize..5, extra in 1usize..6) {
        // A counted frame plus extra edges always carries circuits.
        let spec = RandomFrameSpec { n, params: P63, red_fraction: None, seed };
        let (g, _) = random_counted_frame::<Fp>(spec).unwrap();
        let mut edges = g.edges().to_vec();
        for k in 0..extra {
            let base = edges[k % edges.len()].clone();
            edges.push(Edge { id: EdgeId(edges.len()), ..base });
        }
        let g = BiColoredMultigraph::new(n, edges).unwrap();
        let labeling = random_generic_labeling::<Fp>(&g, P63, seed ^ 0xc1);
        let full = assemble(&g, &labeling).unwrap().matrix;
        let row_rank = |ids: &[EdgeId]| {
            let rows: Vec<usize> = ids.iter().map(|e| e.0).collect();
            let cols: Vec<usize> = (0..full.cols()).collect();
            full.submatrix(&rows, &cols).rank()
        };
        let circuits = fundamental_circuits(&g, P63);
        prop_assert!(!circuits.is_empty());
        for (_, c) in circuits {
            prop_assert_eq!(row_rank(&c), c.len() - 1);
            for skip in 0..c.len() {
                let rest: Vec<EdgeId> = c.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &e)| e).collect();
                prop_assert_eq!(row_rank(&rest), c.len() - 1);
            }
        }
    }
}
