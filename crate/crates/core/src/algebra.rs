//! Rigidity matrices of `(k,g)`-frames over an exact field.
//!
//! Every edge `e = uv` (`u < v`) carries a `k`-vector `p(e)`; its row holds
//! `p(e)` in the columns of `u` and `-p(e)` in the columns of `v`. Red edges
//! are zero in their first `k - g` coordinates. Appending the basic tie-down
//! (identity on the columns of vertex 0) to a counted frame gives a square
//! matrix whose determinant is the pure condition evaluated at `p`.

use std::cell::RefCell;
use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{verify_certificate, ForestCertificate};
use crate::field::{Field, Rational};
use crate::graph::{is_kg_counted, BiColoredMultigraph, EdgeId, FanWalker, SparsityParams, Vertex};
use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("edge {0} has no label")]
    MissingLabel(EdgeId),
    #[error("label of edge {edge} has length {found}, expected {expected}")]
    WrongLength { edge: EdgeId, expected: usize, found: usize },
    #[error("red edge {0} is nonzero in a black-only coordinate")]
    RedPatternViolation(EdgeId),
    #[error("matrix has {rows} rows but a counted frame needs {expected}")]
    NotCounted { rows: usize, expected: usize },
    #[error("certificate is not a valid tree decomposition of the graph")]
    InvalidCertificate,
    #[error("fan expansion limited to {limit} vertices, graph has {n}")]
    SizeLimitExceeded { n: usize, limit: usize },
    #[error("label entry of edge {0} has no image in the target field")]
    NotRepresentable(EdgeId),
}

/// The function `p: E -> F^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameLabeling<F> {
    params: SparsityParams,
    vec_of: BTreeMap<EdgeId, Vec<F>>,
}

impl<F: Field> FrameLabeling<F> {
    pub fn new(params: SparsityParams) -> Self {
        FrameLabeling { params, vec_of: BTreeMap::new() }
    }

    pub fn params(&self) -> SparsityParams {
        self.params
    }

    pub fn insert(&mut self, edge: EdgeId, vector: Vec<F>) {
        self.vec_of.insert(edge, vector);
    }

    pub fn get(&self, edge: EdgeId) -> Option<&[F]> {
        self.vec_of.get(&edge).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &[F])> {
        self.vec_of.iter().map(|(&e, v)| (e, v.as_slice()))
    }

    /// Checks coverage, vector lengths and the red zero pattern.
    pub fn validate(&self, graph: &BiColoredMultigraph) -> Result<(), AlgebraError> {
        let k = self.params.k();
        for edge in graph.edges() {
            let v = self.vec_of.get(&edge.id).ok_or(AlgebraError::MissingLabel(edge.id))?;
            if v.len() != k {
                return Err(AlgebraError::WrongLength { edge: edge.id, expected: k, found: v.len() });
            }
            if edge.is_red() && v[..self.params.black_only()].iter().any(|x| !x.is_zero()) {
                return Err(AlgebraError::RedPatternViolation(edge.id));
            }
        }
        Ok(())
    }
}

impl FrameLabeling<Rational> {
    /// Image of a rational labeling in another field.
    pub fn reduce<G: Field>(&self) -> Result<FrameLabeling<G>, AlgebraError> {
        let mut out = FrameLabeling::new(self.params);
        for (&e, v) in &self.vec_of {
            let mapped = v.iter().map(G::from_rational).collect::<Option<Vec<G>>>();
            out.insert(e, mapped.ok_or(AlgebraError::NotRepresentable(e))?);
        }
        Ok(out)
    }
}

/// `M(H(p))`: one row per edge, `k` columns per vertex.
#[derive(Clone, Debug)]
pub struct RigidityMatrix<F: Field> {
    pub params: SparsityParams,
    pub n: usize,
    pub matrix: Matrix<F>,
    /// Edge behind each row.
    pub row_edges: Vec<EdgeId>,
}

/// `M_T(H(p))`: the rigidity matrix with the basic tie-down appended.
#[derive(Clone, Debug)]
pub struct TiedMatrix<F: Field> {
    pub params: SparsityParams,
    pub n: usize,
    pub matrix: Matrix<F>,
}

/// Kernel of a rigidity matrix.
#[derive(Clone, Debug)]
pub struct MotionSpace<F> {
    pub rank: usize,
    pub kernel_basis: Vec<Vec<F>>,
    pub trivial_dim: usize,
    /// `kn - rank - k`: motions beyond the trivial ones.
    pub dof: usize,
}

pub fn assemble<F: Field>(
    graph: &BiColoredMultigraph,
    labeling: &FrameLabeling<F>,
) -> Result<RigidityMatrix<F>, AlgebraError> {
    labeling.validate(graph)?;
    let k = labeling.params.k();
    let mut matrix = Matrix::zeros(graph.m(), k * graph.n());
    for (row, edge) in graph.edges().iter().enumerate() {
        let (u, v) = edge.ordered();
        let p = labeling.get(edge.id).expect("validated");
        for (c, x) in p.iter().enumerate() {
            matrix.set(row, k * u + c, x.clone());
            matrix.set(row, k * v + c, x.neg());
        }
    }
    Ok(RigidityMatrix { params: labeling.params, n: graph.n(), matrix, row_edges: graph.edge_ids() })
}

pub fn tie_down<F: Field>(m: &RigidityMatrix<F>) -> Result<TiedMatrix<F>, AlgebraError> {
    let k = m.params.k();
    let expected = m.params.full_rank(m.n);
    if m.matrix.rows() != expected {
        return Err(AlgebraError::NotCounted { rows: m.matrix.rows(), expected });
    }
    let mut t = Matrix::zeros(k, k * m.n);
    for i in 0..k {
        t.set(i, i, F::one());
    }
    Ok(TiedMatrix { params: m.params, n: m.n, matrix: m.matrix.stack(&t) })
}

/// `det M_T(H(p))`.
pub fn pure_condition<F: Field>(t: &TiedMatrix<F>) -> F {
    t.matrix.determinant()
}

pub fn rank_and_motions<F: Field>(m: &RigidityMatrix<F>) -> MotionSpace<F> {
    let kernel_basis = m.matrix.kernel();
    let rank = m.matrix.cols() - kernel_basis.len();
    let trivial_dim = m.params.k().min(m.matrix.cols());
    MotionSpace { rank, dof: kernel_basis.len() - trivial_dim, kernel_basis, trivial_dim }
}

/// The motion giving every body the same `k`-vector.
pub fn trivial_motion<F: Field>(n: usize, vector: &[F]) -> Vec<F> {
    (0..n).flat_map(|_| vector.iter().cloned()).collect()
}

fn sample_vector<F: Field>(rng: &mut ChaCha8Rng, params: SparsityParams, red: bool) -> Vec<F> {
    (0..params.k())
        .map(|c| {
            let x = F::random(rng);
            if red && c < params.black_only() {
                F::zero()
            } else {
                x
            }
        })
        .collect()
}

/// Independent uniform entries for every free coordinate, in edge order.
pub fn random_generic_labeling<F: Field>(
    graph: &BiColoredMultigraph,
    params: SparsityParams,
    seed: u64,
) -> FrameLabeling<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labeling = FrameLabeling::new(params);
    for edge in graph.edges() {
        // Sample every coordinate so red and black edges consume the stream alike.
        let v = sample_vector(&mut rng, params, edge.is_red());
        labeling.insert(edge.id, v);
    }
    labeling
}

/// Random tree vectors `a_0..a_{k-1}`, the last `g` truncated to the red pattern.
pub fn tree_vectors<F: Field>(params: SparsityParams, seed: u64) -> Vec<Vec<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..params.k()).map(|j| sample_vector(&mut rng, params, j >= params.black_only())).collect()
}

/// Labels every edge of tree `j` with the tree vector `a_j`.
pub fn specialize_from_certificate<F: Field>(
    graph: &BiColoredMultigraph,
    cert: &ForestCertificate,
    params: SparsityParams,
    seed: u64,
) -> Result<FrameLabeling<F>, AlgebraError> {
    if !verify_certificate(graph, cert, params) {
        return Err(AlgebraError::InvalidCertificate);
    }
    let vectors = tree_vectors::<F>(params, seed);
    let mut labeling = FrameLabeling::new(params);
    for (&e, &class) in &cert.class_of {
        labeling.insert(e, vectors[class].clone());
    }
    Ok(labeling)
}

/// Result of expanding the pure condition over fans.
#[derive(Clone, Debug)]
pub struct FanExpansion<F> {
    /// `Σ ± [φ_1]⋯[φ_{n-1}]`, signed to match `det M_T`.
    pub sum: F,
    /// Fans whose product of brackets is nonzero; zero terms are pruned.
    pub nonzero_terms: usize,
    /// `det M_T` by elimination.
    pub determinant: F,
}

/// Sign of the permutation `0..len` -> `order`.
fn permutation_sign(order: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Generalized Laplace expansion of the pure condition over the column
/// blocks of vertices `1..n`.
pub fn fan_expansion<F: Field>(
    graph: &BiColoredMultigraph,
    labeling: &FrameLabeling<F>,
    vertex_limit: usize,
) -> Result<FanExpansion<F>, AlgebraError> {
    if graph.n() > vertex_limit {
        return Err(AlgebraError::SizeLimitExceeded { n: graph.n(), limit: vertex_limit });
    }
    let params = labeling.params();
    let m = assemble(graph, labeling)?;
    let determinant = pure_condition(&tie_down(&m)?);
    if !is_kg_counted(graph, params) {
        // Too many red edges: every fan term vanishes.
        return Ok(FanExpansion { sum: F::zero(), nonzero_terms: 0, determinant });
    }
    let k = params.k();
    let matrix = &m.matrix;
    // Bracket of each group on the current partial fan.
    let brackets: RefCell<Vec<F>> = RefCell::new(Vec::with_capacity(graph.n()));
    let mut sum = F::zero();
    let mut nonzero_terms = 0;
    let mut accept = |vertex: Vertex, group: &[usize]| -> bool {
        let cols: Vec<usize> = (k * vertex..k * (vertex + 1)).collect();
        let det = matrix.submatrix(group, &cols).determinant();
        let mut stack = brackets.borrow_mut();
        stack.truncate(vertex - 1);
        let keep = !det.is_zero();
        stack.push(det);
        keep
    };
    let mut visit = |groups: &[Vec<usize>]| {
        let order: Vec<usize> = groups.iter().flatten().copied().collect();
        let product = brackets.borrow().iter().fold(F::one(), |acc, b| acc.mul(b));
        nonzero_terms += 1;
        sum = if permutation_sign(&order) { sum.sub(&product) } else { sum.add(&product) };
    };
    FanWalker::new(graph, params).walk_pruned(1, &mut accept, &mut visit);
    // det M_T = (-1)^{km} det A, with A the block of rows 0..m, columns k..kn.
    if (k * graph.m()) % 2 == 1 {
        sum = sum.neg();
    }
    Ok(FanExpansion { sum, nonzero_terms, determinant })
}

/// Whether the fan expansion reproduces `det M_T`.
pub fn fan_expansion_check<F: Field>(
    graph: &BiColoredMultigraph,
    labeling: &FrameLabeling<F>,
    vertex_limit: usize,
) -> Result<bool, AlgebraError> {
    let e = fan_expansion(graph, labeling, vertex_limit)?;
    Ok(e.sum == e.determinant)
}

/// `det` of the tree vectors stacked as rows: the bracket of every fan group
/// under a specialized labeling, up to sign.
pub fn tree_bracket<F: Field>(vectors: &[Vec<F>]) -> F {
    let k = vectors.len();
    Matrix::from_rows(k, vectors.to_vec()).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{decide, find_certificate, Status};
    use crate::field::Fp;
    use crate::graph::{Color, DEFAULT_FAN_LIMIT};
    use proptest::prelude::*;
    use rand::Rng;

    const P63: SparsityParams = SparsityParams::BODY_AND_CAD;

    fn q(v: i64) -> Rational {
        <Rational as Field>::from_i64(v)
    }

    /// The (3,1) graph with two red edges used throughout: edges a..i.
    fn thicket() -> BiColoredMultigraph {
        let spec = [
            (0, 3, false),
            (1, 3, false),
            (0, 1, true),
            (1, 2, false),
            (0, 1, false),
            (2, 3, false),
            (0, 2, false),
            (2, 3, true),
            (1, 2, false),
        ];
        let mut b = BiColoredMultigraph::builder(4);
        for (u, v, red) in spec {
            b = b.edge(u, v, if red { Color::Red } else { Color::Black });
        }
        b.build().unwrap()
    }

    /// Random counted graph on `n` vertices; not necessarily rigid.
    fn random_counted(n: usize, params: SparsityParams, seed: u64) -> BiColoredMultigraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = params.full_rank(n);
        let reds = rng.random_range(0..=params.g() * (n - 1));
        let mut b = BiColoredMultigraph::builder(n);
        for i in 0..m {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            b = b.edge(u, v, if i < reds { Color::Red } else { Color::Black });
        }
        b.build().unwrap()
    }

    #[test]
    fn single_edge_row_unrolls_the_definition() {
        let g = BiColoredMultigraph::builder(2).black(0, 1).build().unwrap();
        let mut l = FrameLabeling::new(P63);
        l.insert(EdgeId(0), vec![q(1), q(0), q(0), q(0), q(0), q(0)]);
        let m = assemble(&g, &l).unwrap();
        let expected: Vec<Rational> = [1, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0].into_iter().map(q).collect();
        assert_eq!(m.matrix.row(0), expected.as_slice());
    }

    #[test]
    fn labels_are_validated() {
        let g = BiColoredMultigraph::builder(2).red(0, 1).build().unwrap();
        let mut l = FrameLabeling::new(P63);
        assert_eq!(assemble(&g, &l).unwrap_err(), AlgebraError::MissingLabel(EdgeId(0)));
        l.insert(EdgeId(0), vec![q(1), q(0), q(0), q(0), q(0), q(0)]);
        assert_eq!(assemble(&g, &l).unwrap_err(), AlgebraError::RedPatternViolation(EdgeId(0)));
        l.insert(EdgeId(0), vec![q(0), q(0), q(0), q(2), q(0), q(0)]);
        assert!(assemble(&g, &l).is_ok());
        l.insert(EdgeId(0), vec![q(0)]);
        assert!(matches!(assemble(&g, &l), Err(AlgebraError::WrongLength { .. })));
    }

    #[test]
    fn tie_down_shapes() {
        let one = BiColoredMultigraph::builder(1).build().unwrap();
        let t = tie_down(&assemble(&one, &FrameLabeling::<Rational>::new(P63)).unwrap()).unwrap();
        assert_eq!(t.matrix, Matrix::identity(6));
        let mut b = BiColoredMultigraph::builder(2);
        for _ in 0..5 {
            b = b.black(0, 1);
        }
        let g = b.build().unwrap();
        let l = random_generic_labeling::<Fp>(&g, P63, 1);
        assert_eq!(
            tie_down(&assemble(&g, &l).unwrap()).unwrap_err(),
            AlgebraError::NotCounted { rows: 5, expected: 6 }
        );
    }

    #[test]
    fn repeated_parallel_rows_kill_the_determinant() {
        let mut b = BiColoredMultigraph::builder(2);
        for _ in 0..6 {
            b = b.black(0, 1);
        }
        let g = b.build().unwrap();
        let mut l = random_generic_labeling::<Rational>(&g, P63, 5);
        assert!(!pure_condition(&tie_down(&assemble(&g, &l).unwrap()).unwrap()).is_zero());
        let copy = l.get(EdgeId(0)).unwrap().to_vec();
        l.insert(EdgeId(1), copy);
        assert!(pure_condition(&tie_down(&assemble(&g, &l).unwrap()).unwrap()).is_zero());
    }

    #[test]
    fn two_free_bodies_have_six_dof() {
        let g = BiColoredMultigraph::builder(2).build().unwrap();
        let motions = rank_and_motions(&assemble(&g, &FrameLabeling::<Fp>::new(P63)).unwrap());
        assert_eq!((motions.rank, motions.dof, motions.trivial_dim), (0, 6, 6));
    }

    #[test]
    fn labelings_are_deterministic_and_respect_red() {
        let g = thicket();
        let p = SparsityParams::new(3, 1).unwrap();
        let a = random_generic_labeling::<Rational>(&g, p, 9);
        assert_eq!(a, random_generic_labeling(&g, p, 9));
        assert_ne!(a, random_generic_labeling(&g, p, 10));
        for e in g.edges().iter().filter(|e| e.is_red()) {
            assert!(a.get(e.id).unwrap()[..2].iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn two_by_two_block_matches_hand_expansion() {
        let p = SparsityParams::new(2, 1).unwrap();
        let g = BiColoredMultigraph::builder(2).black(0, 1).black(0, 1).build().unwrap();
        for seed in 0..5 {
            let l = random_generic_labeling::<Rational>(&g, p, seed);
            let (x, y) = (l.get(EdgeId(0)).unwrap(), l.get(EdgeId(1)).unwrap());
            let hand = x[0].clone() * &y[1] - x[1].clone() * &y[0];
            let e = fan_expansion(&g, &l, DEFAULT_FAN_LIMIT).unwrap();
            assert_eq!(e.sum, hand);
            assert_eq!(e.determinant, hand);
            assert_eq!(e.nonzero_terms, 1);
        }
    }

    #[test]
    fn thicket_expansion_matches_determinant() {
        let g = thicket();
        let p = SparsityParams::new(3, 1).unwrap();
        for seed in 0..5 {
            let l = random_generic_labeling::<Rational>(&g, p, seed);
            assert!(fan_expansion_check(&g, &l, DEFAULT_FAN_LIMIT).unwrap());
        }
    }

    #[test]
    fn specialization_leaves_one_fan_and_a_power_of_the_tree_bracket() {
        let g = thicket();
        let p = SparsityParams::new(3, 1).unwrap();
        let cert = find_certificate(&g, p).unwrap();
        for seed in 0..3 {
            let l = specialize_from_certificate::<Rational>(&g, &cert, p, seed).unwrap();
            let e = fan_expansion(&g, &l, DEFAULT_FAN_LIMIT).unwrap();
            assert_eq!(e.nonzero_terms, 1);
            assert_eq!(e.sum, e.determinant);
            let d = tree_bracket(&tree_vectors::<Rational>(p, seed));
            let power = num_traits::pow(d, g.n() - 1);
            assert!(e.determinant == power || e.determinant == -power);
        }
    }

    #[test]
    fn swapping_tree_classes_keeps_the_witness() {
        let g = thicket();
        let p = SparsityParams::new(3, 1).unwrap();
        let cert = find_certificate(&g, p).unwrap();
        let mut swapped = cert.clone();
        for c in swapped.class_of.values_mut() {
            *c = match *c {
                0 => 1,
                1 => 0,
                other => other,
            };
        }
        let l = specialize_from_certificate::<Fp>(&g, &swapped, p, 4).unwrap();
        assert!(!pure_condition(&tie_down(&assemble(&g, &l).unwrap()).unwrap()).is_zero());
        let mut broken = cert.clone();
        broken.class_of.insert(EdgeId(2), 0);
        assert_eq!(specialize_from_certificate::<Fp>(&g, &broken, p, 4).unwrap_err(), AlgebraError::InvalidCertificate);
    }

    #[test]
    fn size_limit_is_enforced() {
        let g = random_counted(6, P63, 1);
        let l = random_generic_labeling::<Fp>(&g, P63, 1);
        assert_eq!(
            fan_expansion_check(&g, &l, DEFAULT_FAN_LIMIT).unwrap_err(),
            AlgebraError::SizeLimitExceeded { n: 6, limit: 5 }
        );
    }

    #[test]
    fn reduction_to_the_prime_field() {
        let g = thicket();
        let p = SparsityParams::new(3, 1).unwrap();
        let l = random_generic_labeling::<Rational>(&g, p, 2);
        let r = l.reduce::<Fp>().unwrap();
        let det_q = pure_condition(&tie_down(&assemble(&g, &l).unwrap()).unwrap());
        let det_p = pure_condition(&tie_down(&assemble(&g, &r).unwrap()).unwrap());
        assert_eq!(Fp::from_rational(&det_q).unwrap(), det_p);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn trivial_motions_are_in_the_kernel(n in 2usize..=4, seed in any::<u64>()) {
            let g = random_counted(n, P63, seed);
            let l = random_generic_labeling::<Fp>(&g, P63, seed ^ 1);
            let m = assemble(&g, &l).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
            let t: Vec<Fp> = (0..6).map(|_| Fp::random(&mut rng)).collect();
            prop_assert!(m.matrix.mul_vec(&trivial_motion(n, &t)).iter().all(|x| x.is_zero()));
            let motions = rank_and_motions(&m);
            for v in &motions.kernel_basis {
                prop_assert!(m.matrix.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            prop_assert_eq!(motions.rank + motions.dof + 6, 6 * n);
        }

        #[test]
        fn determinant_and_rank_agree(n in 2usize..=4, k in 1usize..=3, seed in any::<u64>()) {
            let p = SparsityParams::new(k, 1 + (seed as usize) % k).unwrap();
            let g = random_counted(n, p, seed);
            let l = random_generic_labeling::<Fp>(&g, p, seed);
            let m = assemble(&g, &l).unwrap();
            let det = pure_condition(&tie_down(&m).unwrap());
            prop_assert_eq!(!det.is_zero(), m.matrix.rank() == p.full_rank(n));
        }

        #[test]
        fn fan_expansion_reproduces_the_determinant(n in 2usize..=4, k in 1usize..=3, seed in any::<u64>()) {
            let p = SparsityParams::new(k, 1 + (seed as usize) % k).unwrap();
            let g = random_counted(n, p, seed);
            let l = random_generic_labeling::<Fp>(&g, p, seed);
            prop_assert!(fan_expansion_check(&g, &l, DEFAULT_FAN_LIMIT).unwrap());
        }

        #[test]
        fn fields_agree_on_vanishing(n in 2usize..=3, seed in any::<u64>()) {
            let g = random_counted(n, P63, seed);
            // Small integers make accidental dependence likely enough to exercise both outcomes.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut l = FrameLabeling::<Rational>::new(P63);
            for e in g.edges() {
                let v = (0..6).map(|c| if e.is_red() && c < 3 { q(0) } else { q(rng.random_range(-2..=2)) }).collect();
                l.insert(e.id, v);
            }
            let dq = pure_condition(&tie_down(&assemble(&g, &l).unwrap()).unwrap());
            let dp = pure_condition(&tie_down(&assemble(&g, &l.reduce::<Fp>().unwrap()).unwrap()).unwrap());
            // Reduction commutes with the determinant; p | det is the only way they differ on zero.
            prop_assert_eq!(Fp::from_rational(&dq).unwrap(), dp);
            if dq.is_zero() {
                prop_assert!(dp.is_zero());
            }
        }

        #[test]
        fn generic_determinant_tracks_the_combinatorial_verdict(n in 2usize..=4, seed in any::<u64>()) {
            let g = random_counted(n, P63, seed);
            let l = random_generic_labeling::<Fp>(&g, P63, seed);
            let det = pure_condition(&tie_down(&assemble(&g, &l).unwrap()).unwrap());
            prop_assert_eq!(!det.is_zero(), decide(&g, P63).status == Status::MinimallyRigid);
        }
    }
}
