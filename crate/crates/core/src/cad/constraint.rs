//! The 21 body-and-cad constraints and their primitive rows.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::geometry::{Direction3, LineGeom, Num, PlaneGeom, Point3, Vec3};
use super::rows::{angular_row, blind_row, complement_pair, point_point_coincidence_rows, PrimitiveConstraint};
use super::CadError;
use crate::field::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    PointPointCoincidence,
    PointPointDistance,
    PointLineCoincidence,
    PointLineDistance,
    PointPlaneCoincidence,
    PointPlaneDistance,
    LineLineParallel,
    LineLinePerpendicular,
    LineLineAngle,
    LineLineCoincidence,
    LineLineDistance,
    LinePlaneParallel,
    LinePlanePerpendicular,
    LinePlaneAngle,
    LinePlaneCoincidence,
    LinePlaneDistance,
    PlanePlaneParallel,
    PlanePlanePerpendicular,
    PlanePlaneAngle,
    PlanePlaneCoincidence,
    PlanePlaneDistance,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 21] = {
        use ConstraintKind::*;
        [
            PointPointCoincidence,
            PointPointDistance,
            PointLineCoincidence,
            PointLineDistance,
            PointPlaneCoincidence,
            PointPlaneDistance,
            LineLineParallel,
            LineLinePerpendicular,
            LineLineAngle,
            LineLineCoincidence,
            LineLineDistance,
            LinePlaneParallel,
            LinePlanePerpendicular,
            LinePlaneAngle,
            LinePlaneCoincidence,
            LinePlaneDistance,
            PlanePlaneParallel,
            PlanePlanePerpendicular,
            PlanePlaneAngle,
            PlanePlaneCoincidence,
            PlanePlaneDistance,
        ]
    };

    /// `(angular, blind)` primitive counts.
    pub fn counts(self) -> (usize, usize) {
        use ConstraintKind::*;
        match self {
            PointPointCoincidence => (0, 3),
            PointPointDistance => (0, 1),
            PointLineCoincidence => (0, 2),
            PointLineDistance => (0, 1),
            PointPlaneCoincidence => (0, 1),
            PointPlaneDistance => (0, 1),
            LineLineParallel => (2, 0),
            LineLinePerpendicular => (1, 0),
            LineLineAngle => (1, 0),
            LineLineCoincidence => (2, 2),
            LineLineDistance => (0, 1),
            LinePlaneParallel => (1, 0),
            LinePlanePerpendicular => (2, 0),
            LinePlaneAngle => (1, 0),
            LinePlaneCoincidence => (1, 1),
            LinePlaneDistance => (1, 1),
            PlanePlaneParallel => (2, 0),
            PlanePlanePerpendicular => (1, 0),
            PlanePlaneAngle => (1, 0),
            PlanePlaneCoincidence => (2, 1),
            PlanePlaneDistance => (2, 1),
        }
    }

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

/// Kind-specific parameters. Angles are in degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Geometry {
    PointPointCoincidence { point: Point3 },
    PointPointDistance { point_i: Point3, point_j: Point3, distance: Num },
    PointLineCoincidence { point_i: Point3, line_j: LineGeom },
    PointLineDistance { point_i: Point3, line_j: LineGeom, distance: Num },
    PointPlaneCoincidence { point_i: Point3, plane_j: PlaneGeom },
    PointPlaneDistance { point_i: Point3, plane_j: PlaneGeom, distance: Num },
    LineLineParallel { point_i: Point3, point_j: Point3, direction: Direction3 },
    LineLinePerpendicular { line_i: LineGeom, line_j: LineGeom },
    LineLineAngle { line_i: LineGeom, line_j: LineGeom, angle: Num },
    LineLineCoincidence { point: Point3, direction: Direction3 },
    LineLineDistance { line_i: LineGeom, line_j: LineGeom, distance: Num },
    LinePlaneParallel { line_i: LineGeom, plane_j: PlaneGeom },
    LinePlanePerpendicular { line_i: LineGeom, plane_j: PlaneGeom },
    LinePlaneAngle { line_i: LineGeom, plane_j: PlaneGeom, angle: Num },
    LinePlaneCoincidence { line_i: LineGeom, plane_j: PlaneGeom },
    LinePlaneDistance { line_i: LineGeom, plane_j: PlaneGeom, distance: Num },
    PlanePlaneParallel { point_i: Point3, point_j: Point3, normal: Direction3 },
    PlanePlanePerpendicular { plane_i: PlaneGeom, plane_j: PlaneGeom },
    PlanePlaneAngle { plane_i: PlaneGeom, plane_j: PlaneGeom, angle: Num },
    PlanePlaneCoincidence { point: Point3, normal: Direction3 },
    PlanePlaneDistance { point_i: Point3, point_j: Point3, normal: Direction3, distance: Num },
}

/// A constraint between bodies `i` and `j` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CadConstraint {
    pub id: String,
    pub i: usize,
    pub j: usize,
    pub geometry: Geometry,
}

impl Geometry {
    pub fn kind(&self) -> ConstraintKind {
        use ConstraintKind as K;
        use Geometry as G;
        match self {
            G::PointPointCoincidence { .. } => K::PointPointCoincidence,
            G::PointPointDistance { .. } => K::PointPointDistance,
            G::PointLineCoincidence { .. } => K::PointLineCoincidence,
            G::PointLineDistance { .. } => K::PointLineDistance,
            G::PointPlaneCoincidence { .. } => K::PointPlaneCoincidence,
            G::PointPlaneDistance { .. } => K::PointPlaneDistance,
            G::LineLineParallel { .. } => K::LineLineParallel,
            G::LineLinePerpendicular { .. } => K::LineLinePerpendicular,
            G::LineLineAngle { .. } => K::LineLineAngle,
            G::LineLineCoincidence { .. } => K::LineLineCoincidence,
            G::LineLineDistance { .. } => K::LineLineDistance,
            G::LinePlaneParallel { .. } => K::LinePlaneParallel,
            G::LinePlanePerpendicular { .. } => K::LinePlanePerpendicular,
            G::LinePlaneAngle { .. } => K::LinePlaneAngle,
            G::LinePlaneCoincidence { .. } => K::LinePlaneCoincidence,
            G::LinePlaneDistance { .. } => K::LinePlaneDistance,
            G::PlanePlaneParallel { .. } => K::PlanePlaneParallel,
            G::PlanePlanePerpendicular { .. } => K::PlanePlanePerpendicular,
            G::PlanePlaneAngle { .. } => K::PlanePlaneAngle,
            G::PlanePlaneCoincidence { .. } => K::PlanePlaneCoincidence,
            G::PlanePlaneDistance { .. } => K::PlanePlaneDistance,
        }
    }

    /// Checks scalar parameters: distances `>= 0`, angles in `[0, 180]`.
    pub fn validate(&self) -> Result<(), CadError> {
        use Geometry as G;
        match self {
            G::PointPointDistance { distance, .. }
            | G::PointLineDistance { distance, .. }
            | G::PointPlaneDistance { distance, .. }
            | G::LineLineDistance { distance, .. }
            | G::LinePlaneDistance { distance, .. }
            | G::PlanePlaneDistance { distance, .. } => {
                if distance.0.is_negative() {
                    return Err(CadError::Degenerate("distance must be non-negative".into()));
                }
            }
            G::LineLineAngle { angle, .. } | G::LinePlaneAngle { angle, .. } | G::PlanePlaneAngle { angle, .. }
                if angle.0.is_negative() || angle.0 > Rational::from_integer(180.into()) =>
            {
                return Err(CadError::Degenerate("angle must lie in [0, 180] degrees".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Primitive rows from the current geometry. Sources are left at 0.
    pub fn rows(&self) -> Result<Vec<PrimitiveConstraint>, CadError> {
        use Geometry as G;
        self.validate()?;
        let rows = match self {
            G::PointPointCoincidence { point } => point_point_coincidence_rows(point).to_vec(),
            G::PointPointDistance { point_i, point_j, .. } => {
                let c = Direction3::new(point_i - point_j)
                    .map_err(|_| CadError::Degenerate("distance between coincident points".into()))?;
                vec![blind_row(point_i, &c)]
            }
            G::PointLineCoincidence { point_i, line_j } => {
                let (a, b) = complement_pair(&line_j.direction);
                vec![blind_row(point_i, &a), blind_row(point_i, &b)]
            }
            G::PointLineDistance { point_i, line_j, .. } => {
                let c = Direction3::new((point_i - &line_j.point).reject(line_j.direction.vec()))
                    .map_err(|_| CadError::Degenerate("point lies on the line".into()))?;
                vec![blind_row(point_i, &c)]
            }
            G::PointPlaneCoincidence { point_i, plane_j } | G::PointPlaneDistance { point_i, plane_j, .. } => {
                vec![blind_row(point_i, &plane_j.normal)]
            }
            G::LineLineParallel { direction, .. } | G::PlanePlaneParallel { normal: direction, .. } => {
                parallel_rows(direction)?.to_vec()
            }
            G::LineLinePerpendicular { line_i, line_j } | G::LineLineAngle { line_i, line_j, .. } => {
                vec![angular_row(&line_i.direction, &line_j.direction)?]
            }
            G::LineLineCoincidence { point, direction } => {
                let (a, b) = complement_pair(direction);
                let [r1, r2] = parallel_rows(direction)?;
                vec![r1, r2, blind_row(point, &a), blind_row(point, &b)]
            }
            G::LineLineDistance { line_i, line_j, .. } => vec![line_line_distance_row(line_i, line_j)?],
            G::LinePlaneParallel { line_i, plane_j } | G::LinePlaneAngle { line_i, plane_j, .. } => {
                vec![angular_row(&line_i.direction, &plane_j.normal)?]
            }
            G::LinePlanePerpendicular { line_i, .. } => parallel_rows(&line_i.direction)?.to_vec(),
            G::LinePlaneCoincidence { line_i, plane_j } | G::LinePlaneDistance { line_i, plane_j, .. } => {
                vec![angular_row(&line_i.direction, &plane_j.normal)?, blind_row(&line_i.point, &plane_j.normal)]
            }
            G::PlanePlanePerpendicular { plane_i, plane_j } | G::PlanePlaneAngle { plane_i, plane_j, .. } => {
                vec![angular_row(&plane_i.normal, &plane_j.normal)?]
            }
            G::PlanePlaneCoincidence { point, normal } | G::PlanePlaneDistance { point_i: point, normal, .. } => {
                let [r1, r2] = parallel_rows(normal)?;
                vec![r1, r2, blind_row(point, normal)]
            }
        };
        Ok(rows)
    }
}

/// Two angular rows keeping direction `d` parallel on both bodies.
fn parallel_rows(d: &Direction3) -> Result<[PrimitiveConstraint; 2], CadError> {
    let (a, b) = complement_pair(d);
    Ok([angular_row(&a, d)?, angular_row(&b, d)?])
}

/// The common normal row: relative velocity along `d_i × d_j` at the
/// foot of the common perpendicular on line `i`.
fn line_line_distance_row(li: &LineGeom, lj: &LineGeom) -> Result<PrimitiveConstraint, CadError> {
    let (di, dj) = (li.direction.vec(), lj.direction.vec());
    let n = di.cross(dj);
    if n.is_zero() {
        let c = Direction3::new((&li.point - &lj.point).reject(di))
            .map_err(|_| CadError::Degenerate("distance between coincident lines".into()))?;
        return Ok(blind_row(&li.point, &c));
    }
    let s = (&lj.point - &li.point).cross(dj).dot(&n) / n.norm2();
    let foot: Vec3 = &li.point + &di.scale(&s);
    Ok(blind_row(&foot, &Direction3::new(n).expect("nonzero")))
}

impl CadConstraint {
    pub fn kind(&self) -> ConstraintKind {
        self.geometry.kind()
    }

    /// Rows of this constraint, tagged with `source`.
    pub fn expand(&self, source: usize) -> Result<Vec<PrimitiveConstraint>, CadError> {
        let mut rows = self
            .geometry
            .rows()
            .map_err(|e| CadError::Malformed { constraint: self.id.clone(), reason: e.to_string() })?;
        for r in &mut rows {
            r.source = source;
        }
        debug_assert_eq!(
            {
                let (a, b) = self.kind().counts();
                a + b
            },
            rows.len()
        );
        Ok(rows)
    }
}
