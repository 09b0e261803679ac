//! Reference frameworks and graphs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cad::{
    Body, CadConstraint, CadFramework, ConstraintKind, Direction3, Geometry, LineGeom, Num, PlaneGeom, Point3, Vec3,
};
use crate::engine::ForestCertificate;
use crate::field::Rational;
use crate::graph::{BiColoredMultigraph, Color, EdgeId};

fn constraint(id: &str, i: usize, j: usize, geometry: Geometry) -> CadConstraint {
    CadConstraint { id: id.into(), i, j, geometry }
}

/// Two bodies held by a line-line coincidence, a point-plane coincidence
/// and a point-point distance. Minimally rigid.
pub fn rigid_pair() -> CadFramework {
    let point = Vec3::int(1, 2, 3);
    let direction = Direction3::int(1, 2, 4);
    let r = Vec3::int(4, 1, 3);
    let normal = Direction3::int(1, 2, 3);
    // (2, -1, 0) is orthogonal to the normal, so r lies on the plane.
    let plane = PlaneGeom::new(Vec3::int(6, 0, 3), normal);
    let (p, q) = (Vec3::int(2, 0, 1), Vec3::int(3, 2, 3));
    CadFramework::numbered(
        2,
        vec![
            constraint("line-line", 0, 1, Geometry::LineLineCoincidence { point, direction }),
            constraint("point-plane", 0, 1, Geometry::PointPlaneCoincidence { point_i: r, plane_j: plane }),
            constraint(
                "point-point",
                0,
                1,
                Geometry::PointPointDistance { point_i: p, point_j: q, distance: Num::int(3) },
            ),
        ],
    )
    .expect("fixture is well formed")
}

/// [`rigid_pair`] without its point-point distance: one degree of freedom.
pub fn flexible_pair() -> CadFramework {
    rigid_pair().without("point-point")
}

/// Two bodies sharing two points: they still rotate about the line
/// through the points.
pub fn double_banana() -> CadFramework {
    CadFramework::numbered(
        2,
        vec![
            constraint("a", 0, 1, Geometry::PointPointCoincidence { point: Vec3::int(1, 2, 3) }),
            constraint("b", 0, 1, Geometry::PointPointCoincidence { point: Vec3::int(4, -1, 2) }),
        ],
    )
    .expect("fixture is well formed")
}

const PAPPUS_POINTS: [&str; 9] = ["A", "B", "C", "a", "b", "c", "p_ab", "p_ac", "p_bc"];
const PAPPUS_LINES: [(&str, [&str; 3]); 9] = [
    ("ABC", ["A", "B", "C"]),
    ("abc", ["a", "b", "c"]),
    ("Ab", ["A", "b", "p_ab"]),
    ("Ba", ["B", "a", "p_ab"]),
    ("Ac", ["A", "c", "p_ac"]),
    ("Ca", ["C", "a", "p_ac"]),
    ("Bc", ["B", "c", "p_bc"]),
    ("Cb", ["C", "b", "p_bc"]),
    ("L", ["p_ab", "p_bc", "p_ac"]),
];

/// The id of the point-line coincidence implied by the other 26.
pub const PAPPUS_IMPLIED: &str = "p_ac-on-L";

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Intersection of lines `p1 p2` and `q1 q2` in the plane.
fn meet(p1: &[Rational; 2], p2: &[Rational; 2], q1: &[Rational; 2], q2: &[Rational; 2]) -> [Rational; 2] {
    let d1 = [&p2[0] - &p1[0], &p2[1] - &p1[1]];
    let d2 = [&q2[0] - &q1[0], &q2[1] - &q1[1]];
    let den = &d1[0] * &d2[1] - &d1[1] * &d2[0];
    assert!(den != q(0, 1), "Pappus lines must not be parallel");
    let t = ((&q1[0] - &p1[0]) * &d2[1] - (&q1[1] - &p1[1]) * &d2[0]) / den;
    [&p1[0] + &t * &d1[0], &p1[1] + &t * &d1[1]]
}

/// Exact Pappus configuration: `A, B, C` on `y = 0`, `a, b, c` on `y = 1`,
/// mapped affinely onto a tilted plane in space.
fn pappus_positions() -> BTreeMap<&'static str, Point3> {
    let mut flat: BTreeMap<&str, [Rational; 2]> = BTreeMap::new();
    for (name, x, y) in [("A", 0, 0), ("B", 1, 0), ("C", 3, 0), ("a", 0, 1), ("b", 2, 1), ("c", 5, 1)] {
        flat.insert(name, [q(x, 1), q(y, 1)]);
    }
    let cross = |l1: (&str, &str), l2: (&str, &str), flat: &BTreeMap<&str, [Rational; 2]>| {
        meet(&flat[l1.0], &flat[l1.1], &flat[l2.0], &flat[l2.1])
    };
    let p_ab = cross(("A", "b"), ("B", "a"), &flat);
    let p_ac = cross(("A", "c"), ("C", "a"), &flat);
    let p_bc = cross(("B", "c"), ("C", "b"), &flat);
    flat.insert("p_ab", p_ab);
    flat.insert("p_ac", p_ac);
    flat.insert("p_bc", p_bc);
    let origin = Vec3::int(1, 1, 1);
    let (u, w) = (Vec3::new(q(1, 1), q(0, 1), q(1, 2)), Vec3::new(q(0, 1), q(1, 1), q(2, 3)));
    flat.into_iter().map(|(k, [x, y])| (k, &(&origin + &u.scale(&x)) + &w.scale(&y))).collect()
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.random_range(-1000..=1000), rng.random_range(1..=97))
}

fn random_point(rng: &mut ChaCha8Rng) -> Point3 {
    Vec3::new(random_rational(rng), random_rational(rng), random_rational(rng))
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction3 {
    loop {
        if let Ok(d) = Direction3::new(random_point(rng)) {
            return d;
        }
    }
}

/// 9 point bodies, 9 line bodies and 27 point-line coincidences.
///
/// `generic = false` uses one exact Pappus configuration shared by all
/// constraints, where the coincidence of `p_ac` with `L` is implied by the
/// rest. `generic = true` gives every constraint its own random point and
/// line, seeded deterministically.
pub fn pappus(generic: bool) -> CadFramework {
    let mut bodies: Vec<Body> =
        PAPPUS_POINTS.iter().map(|p| Body { id: (*p).into(), name: Some("point".into()) }).collect();
    bodies.extend(PAPPUS_LINES.iter().map(|(l, _)| Body { id: (*l).into(), name: Some("line".into()) }));
    let index = |id: &str| bodies.iter().position(|b| b.id == id).expect("known body");
    let positions = pappus_positions();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a99_u64);
    let mut constraints = Vec::new();
    for point in PAPPUS_POINTS {
        for (line, members) in PAPPUS_LINES.iter().filter(|(_, m)| m.contains(&point)) {
            let (point_i, line_j) = if generic {
                let p = random_point(&mut rng);
                (p.clone(), LineGeom::new(p, random_direction(&mut rng)))
            } else {
                let others: Vec<&str> = members.iter().copied().filter(|m| *m != point).collect();
                let d = &positions[others[1]] - &positions[others[0]];
                (
                    positions[point].clone(),
                    LineGeom::new(positions[others[0]].clone(), Direction3::new(d).expect("distinct points")),
                )
            };
            constraints.push(CadConstraint {
                id: format!("{point}-on-{line}"),
                i: index(point),
                j: index(line),
                geometry: Geometry::PointLineCoincidence { point_i, line_j },
            });
        }
    }
    CadFramework::new(bodies, constraints).expect("fixture is well formed")
}

/// Edge names of the (3,1) example graph, in edge order.
pub const EXAMPLE_31_LABELS: [char; 9] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i'];

/// The (3,1)-counted example on 4 vertices with red edges `c` (1-2) and
/// `h` (3-4). Vertices are 0-based here.
pub fn example_31_graph() -> BiColoredMultigraph {
    let spec = [
        (0, 3, Color::Black), // a
        (1, 3, Color::Black), // b
        (0, 1, Color::Red),   // c
        (1, 2, Color::Black), // d
        (0, 1, Color::Black), // e
        (2, 3, Color::Black), // f
        (0, 2, Color::Black), // g
        (2, 3, Color::Red),   // h
        (1, 2, Color::Black), // i
    ];
    let mut b = BiColoredMultigraph::builder(4);
    for (u, v, c) in spec {
        b = b.edge(u, v, c);
    }
    b.build().expect("fixture is well formed")
}

/// Two black trees `{a, e, i}` and `{b, f, g}`, and the tree `{c, h, d}`
/// holding both red edges plus the black edge `d`.
pub fn example_31_certificate() -> ForestCertificate {
    let classes = [("aei", 0), ("bfg", 1), ("chd", 2)];
    let mut class_of = BTreeMap::new();
    for (names, class) in classes {
        for name in names.chars() {
            let pos = EXAMPLE_31_LABELS.iter().position(|&l| l == name).expect("label");
            class_of.insert(EdgeId(pos), class);
        }
    }
    ForestCertificate { class_of }
}

/// The fan `((c,d,e), (g,h,i), (a,b,f))` at vertices 2, 3, 4.
pub fn example_31_fan() -> Vec<Vec<EdgeId>> {
    ["cde", "ghi", "abf"]
        .iter()
        .map(|g| g.chars().map(|c| EdgeId(EXAMPLE_31_LABELS.iter().position(|&l| l == c).expect("label"))).collect())
        .collect()
}

/// Random geometry of the given kind between bodies 0 and 1.
///
/// Incidences are made consistent (points on their lines and planes) and
/// scalar parameters are measured from the geometry, although the rows do
/// not depend on either.
pub fn random_geometry(kind: ConstraintKind, seed: u64) -> Geometry {
    use ConstraintKind as K;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    let point = random_point(rng);
    let dir = random_direction(rng);
    let line = |rng: &mut ChaCha8Rng| LineGeom::new(random_point(rng), random_direction(rng));
    let plane = |rng: &mut ChaCha8Rng| PlaneGeom::new(random_point(rng), random_direction(rng));
    let angle = Num(Rational::from_integer(rng.random_range(1..180).into()));
    let distance = Num(q(rng.random_range(1..100), rng.random_range(1..10)));
    match kind {
        K::PointPointCoincidence => Geometry::PointPointCoincidence { point },
        K::PointPointDistance => Geometry::PointPointDistance { point_i: point, point_j: random_point(rng), distance },
        K::PointLineCoincidence => Geometry::PointLineCoincidence {
            line_j: LineGeom::new(&point + &dir.vec().scale(&random_rational(rng)), dir),
            point_i: point,
        },
        K::PointLineDistance => Geometry::PointLineDistance { point_i: point, line_j: line(rng), distance },
        K::PointPlaneCoincidence => {
            let normal = dir;
            let along = random_point(rng).reject(normal.vec());
            Geometry::PointPlaneCoincidence { plane_j: PlaneGeom::new(&point + &along, normal), point_i: point }
        }
        K::PointPlaneDistance => Geometry::PointPlaneDistance { point_i: point, plane_j: plane(rng), distance },
        K::LineLineParallel => {
            Geometry::LineLineParallel { point_i: point, point_j: random_point(rng), direction: dir }
        }
        K::LineLinePerpendicular => Geometry::LineLinePerpendicular { line_i: line(rng), line_j: line(rng) },
        K::LineLineAngle => Geometry::LineLineAngle { line_i: line(rng), line_j: line(rng), angle },
        K::LineLineCoincidence => Geometry::LineLineCoincidence { point, direction: dir },
        K::LineLineDistance => Geometry::LineLineDistance { line_i: line(rng), line_j: line(rng), distance },
        K::LinePlaneParallel => Geometry::LinePlaneParallel { line_i: line(rng), plane_j: plane(rng) },
        K::LinePlanePerpendicular => Geometry::LinePlanePerpendicular { line_i: line(rng), plane_j: plane(rng) },
        K::LinePlaneAngle => Geometry::LinePlaneAngle { line_i: line(rng), plane_j: plane(rng), angle },
        K::LinePlaneCoincidence => Geometry::LinePlaneCoincidence { line_i: line(rng), plane_j: plane(rng) },
        K::LinePlaneDistance => Geometry::LinePlaneDistance { line_i: line(rng), plane_j: plane(rng), distance },
        K::PlanePlaneParallel => {
            Geometry::PlanePlaneParallel { point_i: point, point_j: random_point(rng), normal: dir }
        }
        K::PlanePlanePerpendicular => Geometry::PlanePlanePerpendicular { plane_i: plane(rng), plane_j: plane(rng) },
        K::PlanePlaneAngle => Geometry::PlanePlaneAngle { plane_i: plane(rng), plane_j: plane(rng), angle },
        K::PlanePlaneCoincidence => Geometry::PlanePlaneCoincidence { point, normal: dir },
        K::PlanePlaneDistance => {
            Geometry::PlanePlaneDistance { point_i: point, point_j: random_point(rng), normal: dir, distance }
        }
    }
}

/// A two-body framework holding one constraint of `kind`.
pub fn single_constraint(kind: ConstraintKind, seed: u64) -> CadFramework {
    CadFramework::numbered(2, vec![constraint(&kind.name(), 0, 1, random_geometry(kind, seed))])
        .expect("fixture is well formed")
}
