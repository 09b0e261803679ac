//! Random counted frames and batch cross-validation.
//!
//! Trial `t` of a run with seed `s` uses the seed `splitmix64(s + t)`, and
//! every further seed inside a trial is the next `splitmix64` image, so
//! trials are independent of each other and of the execution mode.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    assemble, fan_expansion, pure_condition, random_generic_labeling, specialize_from_certificate, tie_down,
    FrameLabeling,
};
use crate::engine::{decide, Status};
use crate::field::{Field, Fp};
use crate::graph::{BiColoredMultigraph, Color, SparsityParams, DEFAULT_FAN_LIMIT};
use crate::parallel::{map_indexed, Execution};

use super::GENERIC_ATTEMPTS;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RandomError {
    #[error("infeasible spec: {0}")]
    InfeasibleSpec(String),
}

/// The SplitMix64 output function applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFrameSpec {
    pub n: usize,
    pub params: SparsityParams,
    /// Fraction of red edges; uniform over the feasible counts when absent.
    pub red_fraction: Option<f64>,
    pub seed: u64,
}

/// A `(k,g)`-counted graph with a random generic labeling.
///
/// Endpoints are uniform over vertex pairs, so the graph may be disconnected.
pub fn random_counted_frame<F: Field>(
    spec: RandomFrameSpec,
) -> Result<(BiColoredMultigraph, FrameLabeling<F>), RandomError> {
    let RandomFrameSpec { n, params, red_fraction, seed } = spec;
    if n == 0 {
        return Err(RandomError::InfeasibleSpec("need at least one vertex".into()));
    }
    let m = params.full_rank(n);
    let red_cap = params.g() * (n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let red = match red_fraction {
        Some(f) if !(0.0..=1.0).contains(&f) => {
            return Err(RandomError::InfeasibleSpec(format!("red fraction {f} outside [0, 1]")))
        }
        Some(f) => {
            let red = (f * m as f64).round() as usize;
            if red > red_cap {
                return Err(RandomError::InfeasibleSpec(format!(
                    "{red} red edges exceed the bound g(n-1) = {red_cap}"
                )));
            }
            red
        }
        None => rng.random_range(0..=red_cap),
    };
    let red_positions = sample(&mut rng, m.max(1), red.min(m));
    let mut colors = vec![Color::Black; m];
    for p in red_positions.iter() {
        colors[p] = Color::Red;
    }
    let mut builder = BiColoredMultigraph::builder(n);
    for color in colors {
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        builder = builder.edge(u, v, color);
    }
    let graph = builder.build().expect("endpoints are in range and distinct");
    let labeling = random_generic_labeling::<F>(&graph, params, splitmix64(seed));
    Ok((graph, labeling))
}

/// One random frame checked against the combinatorial decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub red: usize,
    pub connected: bool,
    pub status: Status,
    /// `det M_T != 0` at the last labeling tried.
    pub det_nonzero: bool,
    pub attempts: usize,
    pub agree: bool,
    /// Tree-specialized determinant nonzero; only for rigid trials.
    pub specialization_nonzero: Option<bool>,
    /// Exactly one nonzero fan term, matching `det M_T`; only for rigid
    /// trials small enough to expand.
    pub single_fan_term: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub params: SparsityParams,
    pub seed: u64,
    pub trials: Vec<TrialOutcome>,
}

impl CrossValidation {
    pub fn agreements(&self) -> usize {
        self.trials.iter().filter(|t| t.agree).count()
    }

    pub fn rigid(&self) -> usize {
        self.trials.iter().filter(|t| t.status == Status::MinimallyRigid).count()
    }

    /// Agreement on every trial and every proof check that ran.
    pub fn all_pass(&self) -> bool {
        self.trials
            .iter()
            .all(|t| t.agree && t.specialization_nonzero != Some(false) && t.single_fan_term != Some(false))
    }
}

fn tied_det_nonzero(graph: &BiColoredMultigraph, labeling: &FrameLabeling<Fp>) -> bool {
    let m = assemble(graph, labeling).expect("generated labels are valid");
    !pure_condition(&tie_down(&m).expect("generated graphs are counted")).is_zero()
}

fn run_trial(trial: usize, nmax: usize, params: SparsityParams, seed: u64) -> TrialOutcome {
    let trial_seed = splitmix64(seed.wrapping_add(trial as u64));
    let n = ChaCha8Rng::seed_from_u64(trial_seed).random_range(2..=nmax);
    let spec = RandomFrameSpec { n, params, red_fraction: None, seed: trial_seed };
    let (graph, mut labeling) = random_counted_frame::<Fp>(spec).expect("unconstrained red count is feasible");
    let verdict = decide(&graph, params);
    let rigid = verdict.status == Status::MinimallyRigid;

    let mut det_nonzero = tied_det_nonzero(&graph, &labeling);
    let mut attempts = 1;
    let mut labeling_seed = splitmix64(trial_seed);
    while det_nonzero != rigid && attempts < GENERIC_ATTEMPTS {
        labeling_seed = splitmix64(labeling_seed);
        labeling = random_generic_labeling(&graph, params, labeling_seed);
        det_nonzero = tied_det_nonzero(&graph, &labeling);
        attempts += 1;
    }

    let (mut specialization_nonzero, mut single_fan_term) = (None, None);
    if let Some(cert) = &verdict.certificate {
        let special = specialize_from_certificate::<Fp>(&graph, cert, params, splitmix64(labeling_seed))
            .expect("decide returns valid certificates");
        specialization_nonzero = Some(tied_det_nonzero(&graph, &special));
        if n <= DEFAULT_FAN_LIMIT.min(4) {
            let e = fan_expansion(&graph, &special, DEFAULT_FAN_LIMIT).expect("within limit");
            single_fan_term = Some(e.nonzero_terms == 1 && e.sum == e.determinant);
        }
    }

    TrialOutcome {
        trial,
        seed: trial_seed,
        n,
        red: graph.red_count(),
        connected: graph.is_connected(),
        status: verdict.status,
        det_nonzero,
        attempts,
        agree: det_nonzero == rigid,
        specialization_nonzero,
        single_fan_term,
    }
}

/// Checks `decide == MinimallyRigid` against `det M_T != 0` at random
/// prime-field labelings on `trials` counted graphs with `2 <= n <= nmax`.
pub fn crossvalidate(
    trials: usize,
    nmax: usize,
    params: SparsityParams,
    seed: u64,
    execution: Execution,
) -> Result<CrossValidation, RandomError> {
    if nmax < 2 {
        return Err(RandomError::InfeasibleSpec("nmax must be at least 2".into()));
    }
    let outcomes = map_indexed(trials, execution, |t| run_trial(t, nmax, params, seed));
    Ok(CrossValidation { params, seed, trials: outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::graph::is_kg_counted;

    const P63: SparsityParams = SparsityParams::BODY_AND_CAD;

    #[test]
    fn two_vertices_give_six_parallel_edges() {
        for seed in 0..20 {
            let spec = RandomFrameSpec { n: 2, params: P63, red_fraction: None, seed };
            let (g, l) = random_counted_frame::<Rational>(spec).unwrap();
            assert_eq!(g.m(), 6);
            assert!(g.red_count() <= 3);
            assert!(g.edges().iter().all(|e| e.ordered() == (0, 1)));
            l.validate(&g).unwrap();
        }
    }

    #[test]
    fn excessive_red_fraction_is_infeasible() {
        let spec = RandomFrameSpec { n: 3, params: P63, red_fraction: Some(0.9), seed: 0 };
        assert!(matches!(random_counted_frame::<Fp>(spec), Err(RandomError::InfeasibleSpec(_))));
    }

    #[test]
    fn frames_are_counted_and_deterministic() {
        for seed in 0..30 {
            let spec = RandomFrameSpec { n: 2 + (seed as usize % 5), params: P63, red_fraction: None, seed };
            let (g, l) = random_counted_frame::<Fp>(spec).unwrap();
            assert!(is_kg_counted(&g, P63));
            let (g2, l2) = random_counted_frame::<Fp>(spec).unwrap();
            assert_eq!(g, g2);
            assert_eq!(l, l2);
        }
    }

    #[test]
    fn sequential_and_parallel_runs_match() {
        let a = crossvalidate(12, 4, P63, 5, Execution::Sequential).unwrap();
        let b = crossvalidate(12, 4, P63, 5, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.all_pass());
    }
}
