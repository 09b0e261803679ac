//! Frameworks of bodies and constraints, and their primitive cad graphs.

use std::collections::HashSet;

use super::constraint::{CadConstraint, ConstraintKind};
use super::rows::PrimitiveConstraint;
use super::CadError;
use crate::algebra::FrameLabeling;
use crate::field::Rational;
use crate::graph::{BiColoredMultigraph, Color, Edge, EdgeId, SparsityParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Body {
    pub id: String,
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CadFramework {
    bodies: Vec<Body>,
    constraints: Vec<CadConstraint>,
}

impl CadFramework {
    pub fn new(bodies: Vec<Body>, constraints: Vec<CadConstraint>) -> Result<Self, CadError> {
        if bodies.is_empty() {
            return Err(CadError::NoBodies);
        }
        let mut seen = HashSet::new();
        for b in &bodies {
            if !seen.insert(&b.id) {
                return Err(CadError::DuplicateId(b.id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for c in &constraints {
            if !seen.insert(&c.id) {
                return Err(CadError::DuplicateId(c.id.clone()));
            }
            if c.i >= bodies.len() || c.j >= bodies.len() {
                return Err(CadError::UnknownBody(c.id.clone()));
            }
            if c.i == c.j {
                return Err(CadError::SameBody(c.id.clone()));
            }
            c.geometry
                .validate()
                .map_err(|e| CadError::Malformed { constraint: c.id.clone(), reason: e.to_string() })?;
        }
        Ok(CadFramework { bodies, constraints })
    }

    /// Bodies named `1..=n`.
    pub fn numbered(n: usize, constraints: Vec<CadConstraint>) -> Result<Self, CadError> {
        let bodies = (1..=n).map(|i| Body { id: i.to_string(), name: None }).collect();
        CadFramework::new(bodies, constraints)
    }

    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn constraints(&self) -> &[CadConstraint] {
        &self.constraints
    }

    pub fn has_point_point_coincidence(&self) -> bool {
        self.constraints.iter().any(|c| c.kind() == ConstraintKind::PointPointCoincidence)
    }

    /// Copy without the constraint `id`.
    pub fn without(&self, id: &str) -> CadFramework {
        CadFramework {
            bodies: self.bodies.clone(),
            constraints: self.constraints.iter().filter(|c| c.id != id).cloned().collect(),
        }
    }
}

/// The primitive cad graph with its geometric labels.
///
/// Edge `e{k}` is `primitives[k]`.
#[derive(Clone, Debug)]
pub struct PrimitiveFrame {
    pub graph: BiColoredMultigraph,
    pub labeling: FrameLabeling<Rational>,
    pub primitives: Vec<PrimitiveConstraint>,
    /// A point-point coincidence is present; combinatorial verdicts do not apply.
    pub taint: bool,
}

impl PrimitiveFrame {
    pub fn angular_count(&self) -> usize {
        self.graph.red_count()
    }

    pub fn blind_count(&self) -> usize {
        self.graph.black_count()
    }
}

/// A red edge per angular row and a black edge per other row, labeled by
/// the row as seen from the lower-numbered body.
pub fn build_primitive_frame(fw: &CadFramework) -> Result<PrimitiveFrame, CadError> {
    let mut primitives = Vec::new();
    let mut edges = Vec::new();
    let mut labeling = FrameLabeling::new(SparsityParams::BODY_AND_CAD);
    for (source, c) in fw.constraints.iter().enumerate() {
        for row in c.expand(source)? {
            let id = EdgeId(edges.len());
            let color = if row.is_red() { Color::Red } else { Color::Black };
            let label: Vec<Rational> =
                if c.i < c.j { row.row6.to_vec() } else { row.row6.iter().map(|x| -x).collect() };
            labeling.insert(id, label);
            edges.push(Edge { id, u: c.i.min(c.j), v: c.i.max(c.j), color });
            primitives.push(row);
        }
    }
    let graph = BiColoredMultigraph::new(fw.bodies.len(), edges).map_err(|e| CadError::Degenerate(e.to_string()))?;
    Ok(PrimitiveFrame { graph, labeling, primitives, taint: fw.has_point_point_coincidence() })
}
