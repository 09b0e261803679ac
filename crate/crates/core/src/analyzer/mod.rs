//! End-to-end analysis: expand, decide combinatorially, check numerically.
//!
//! Row and tree numbers in reports are 1-based; body references use the
//! body ids of the input.

pub mod fixtures;
pub mod random;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    assemble, pure_condition, random_generic_labeling, rank_and_motions, tie_down, AlgebraError, FrameLabeling,
};
use crate::cad::{build_primitive_frame, CadError, CadFramework, Flavor, PrimitiveFrame};
use crate::engine::{decide, fundamental_circuits, Status};
use crate::field::Field;
use crate::graph::{BiColoredMultigraph, EdgeId, SparsityParams};

pub use random::{crossvalidate, random_counted_frame, splitmix64, CrossValidation, RandomFrameSpec, TrialOutcome};

/// Labelings tried before a cross-check disagreement is reported.
pub const GENERIC_ATTEMPTS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Cad(#[from] CadError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One primitive constraint (a row of the rigidity matrix).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveRow {
    pub row: usize,
    pub constraint: String,
    pub flavor: Flavor,
    pub red: bool,
    pub body_i: String,
    pub body_j: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveSummary {
    pub angular: usize,
    pub blind: usize,
    pub rows: Vec<PrimitiveRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Combinatorial {
    Decided { status: Status, rank: usize, deficiency: usize },
    Withheld { reason: String },
}

impl Combinatorial {
    pub fn status(&self) -> Option<Status> {
        match self {
            Combinatorial::Decided { status, .. } => Some(*status),
            Combinatorial::Withheld { .. } => None,
        }
    }
}

/// Rank data of one labeling of the primitive graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericResult {
    pub rank: usize,
    /// Motions beyond the trivial ones.
    pub dof: usize,
    /// `det M_T != 0`; absent unless the row count is `6(n-1)`.
    pub det_nonzero: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericReport {
    pub field: String,
    /// The geometry of the input.
    pub embedding: NumericResult,
    /// A random labeling with the same zero pattern.
    pub generic: NumericResult,
    /// Seed of the labeling behind `generic`.
    pub generic_seed: u64,
    pub attempts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossCheck {
    Agree,
    Disagree,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEntry {
    pub row: usize,
    pub constraint: String,
    pub tree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub trees: Vec<TreeEntry>,
    /// Rows of black primitives placed in an angular-side tree.
    pub angular_side_black: Vec<usize>,
}

/// A minimally dependent set of primitive rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitReport {
    /// Source constraints, in input order.
    pub constraints: Vec<String>,
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub bodies: usize,
    pub constraints: usize,
    pub primitives: PrimitiveSummary,
    pub combinatorial: Combinatorial,
    pub numeric: NumericReport,
    pub cross_check: CrossCheck,
    pub certificate: Option<CertificateReport>,
    pub circuits: Vec<CircuitReport>,
}

impl AnalysisReport {
    /// Whether the combinatorial verdict was withheld.
    pub fn is_withheld(&self) -> bool {
        matches!(self.combinatorial, Combinatorial::Withheld { .. })
    }
}

/// Reason given when a point-point coincidence is present.
pub const TAINT_REASON: &str =
    "point-point coincidence present: counts and tree decompositions do not characterize rigidity";

const PARAMS: SparsityParams = SparsityParams::BODY_AND_CAD;

/// Rank, dof and pure condition of one labeling.
pub fn numeric_result<F: Field>(
    graph: &BiColoredMultigraph,
    labeling: &FrameLabeling<F>,
) -> Result<NumericResult, AlgebraError> {
    let m = assemble(graph, labeling)?;
    let motions = rank_and_motions(&m);
    let det_nonzero =
        if graph.m() == PARAMS.full_rank(graph.n()) { Some(!pure_condition(&tie_down(&m)?).is_zero()) } else { None };
    Ok(NumericResult { rank: motions.rank, dof: motions.dof, det_nonzero })
}

fn summary(fw: &CadFramework, frame: &PrimitiveFrame) -> PrimitiveSummary {
    let rows = frame
        .primitives
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let c = &fw.constraints()[p.source];
            PrimitiveRow {
                row: k + 1,
                constraint: c.id.clone(),
                flavor: p.flavor,
                red: p.is_red(),
                body_i: fw.bodies()[c.i].id.clone(),
                body_j: fw.bodies()[c.j].id.clone(),
            }
        })
        .collect();
    PrimitiveSummary { angular: frame.angular_count(), blind: frame.blind_count(), rows }
}

fn circuit_report(fw: &CadFramework, frame: &PrimitiveFrame, circuit: &[EdgeId]) -> CircuitReport {
    let mut rows: Vec<usize> = circuit.iter().map(|e| e.0 + 1).collect();
    rows.sort_unstable();
    let mut sources: Vec<usize> = circuit.iter().map(|e| frame.primitives[e.0].source).collect();
    sources.sort_unstable();
    sources.dedup();
    CircuitReport { constraints: sources.into_iter().map(|s| fw.constraints()[s].id.clone()).collect(), rows }
}

/// Whether a generic numeric result confirms a combinatorial verdict.
fn agrees(status: Status, comb_rank: usize, generic: &NumericResult) -> bool {
    let rigid = status == Status::MinimallyRigid;
    let det_ok = generic.det_nonzero.is_none_or(|nz| nz == rigid);
    det_ok && generic.rank == comb_rank
}

/// Runs the full pipeline over the field `F`.
///
/// The generic labeling is drawn from `seed`; on a cross-check disagreement
/// up to [`GENERIC_ATTEMPTS`] labelings are tried before reporting it.
pub fn analyze<F: Field>(fw: &CadFramework, seed: u64) -> Result<AnalysisReport, AnalysisError> {
    let frame = build_primitive_frame(fw)?;
    let graph = &frame.graph;
    let embedding = numeric_result(graph, &frame.labeling.reduce::<F>()?)?;

    let mut generic_seed = seed;
    let mut generic = numeric_result(graph, &random_generic_labeling::<F>(graph, PARAMS, generic_seed))?;
    let mut attempts = 1;

    let (combinatorial, cross_check, certificate, circuits) = if frame.taint {
        (Combinatorial::Withheld { reason: TAINT_REASON.into() }, CrossCheck::NotApplicable, None, Vec::new())
    } else {
        let verdict = decide(graph, PARAMS);
        while !agrees(verdict.status, verdict.rank, &generic) && attempts < GENERIC_ATTEMPTS {
            generic_seed = splitmix64(generic_seed);
            generic = numeric_result(graph, &random_generic_labeling::<F>(graph, PARAMS, generic_seed))?;
            attempts += 1;
        }
        let cross =
            if agrees(verdict.status, verdict.rank, &generic) { CrossCheck::Agree } else { CrossCheck::Disagree };
        let certificate = verdict.certificate.as_ref().map(|cert| CertificateReport {
            trees: cert
                .class_of
                .iter()
                .map(|(e, &class)| TreeEntry {
                    row: e.0 + 1,
                    constraint: fw.constraints()[frame.primitives[e.0].source].id.clone(),
                    tree: class + 1,
                })
                .collect(),
            angular_side_black: cert.angular_side_black(graph, PARAMS).iter().map(|e| e.0 + 1).collect(),
        });
        let circuits = fundamental_circuits(graph, PARAMS).iter().map(|(_, c)| circuit_report(fw, &frame, c)).collect();
        let comb =
            Combinatorial::Decided { status: verdict.status, rank: verdict.rank, deficiency: verdict.deficiency };
        (comb, cross, certificate, circuits)
    };

    Ok(AnalysisReport {
        bodies: fw.bodies().len(),
        constraints: fw.constraints().len(),
        primitives: summary(fw, &frame),
        combinatorial,
        numeric: NumericReport { field: F::NAME.into(), embedding, generic, generic_seed, attempts },
        cross_check,
        certificate,
        circuits,
    })
}
