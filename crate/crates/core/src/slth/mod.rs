//! Sparse subnetwork construction inside random overparameterized nets.
//!
//! A target network with spectral-norm-bounded layers is approximated by
//! pruning a twice-as-deep random network: each target layer gets an
//! intermediate layer of replica blocks, one block of `2 n*` neurons per
//! input coordinate, and every (input, output) weight is realized by
//! selecting exactly k first-times-second-layer weight products per sign
//! class via the subset-sum machinery. The retained fraction lands at
//! `rho * gamma'` up to one-subset rounding slack.

mod matrix;

pub use matrix::{norm, Matrix, PowerIterationError, POWER_ITERATION_CAP, POWER_ITERATION_REL_TOL};

use crate::bounds::{
    replica_count_fixed_point, BoundError, BoundInputs, ConstantsConfig, SparsityBudget,
};
use crate::densities::{DensitySpec, SampleSet};
use crate::rng::{trial_seed, SplitMix64};
use crate::solver::{solver_by_name, HeuristicSolver, Solver, SolverError, SubsetSolution, Target};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SlthError {
    #[error(transparent)]
    PowerIteration(#[from] PowerIterationError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("no qualifying subset in the {sign} class")]
    NoQualifyingSubset { sign: SignClass },
    #[error("subset search failed for layer {layer}, output {output}, input {input}: {source}")]
    GroupFailed {
        layer: usize,
        output: usize,
        input: usize,
        #[source]
        source: Box<SlthError>,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub type Result<T> = std::result::Result<T, SlthError>;

/// Which half-line a replica neuron serves, by the sign of its input weight
/// (zero weights count as positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    Positive,
    Negative,
}

impl std::fmt::Display for SignClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignClass::Positive => write!(f, "positive"),
            SignClass::Negative => write!(f, "negative"),
        }
    }
}

/// A feed-forward ReLU network: ReLU between layers, identity after the
/// last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    layer_widths: Vec<usize>,
    weights: Vec<Matrix>,
}

impl DenseNet {
    pub fn new(layer_widths: Vec<usize>, weights: Vec<Matrix>) -> Result<Self> {
        if layer_widths.len() < 2 {
            return Err(SlthError::Shape("need at least one layer".into()));
        }
        if weights.len() + 1 != layer_widths.len() {
            return Err(SlthError::Shape(format!(
                "{} weight matrices do not chain {} widths",
                weights.len(),
                layer_widths.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            if w.rows() != layer_widths[i + 1] || w.cols() != layer_widths[i] {
                return Err(SlthError::Shape(format!(
                    "layer {i} is {}x{}, expected {}x{}",
                    w.rows(),
                    w.cols(),
                    layer_widths[i + 1],
                    layer_widths[i]
                )));
            }
        }
        Ok(Self {
            layer_widths,
            weights,
        })
    }

    pub fn layer_widths(&self) -> &[usize] {
        &self.layer_widths
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    pub fn param_count(&self) -> u64 {
        self.weights.iter().map(|w| w.len() as u64).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut acts = self.weights[0].matvec(x);
        for w in &self.weights[1..] {
            for a in &mut acts {
                *a = a.max(0.0); // ReLU between layers
            }
            acts = w.matvec(&acts);
        }
        acts
    }
}

/// Random target in the norm-contractive family: independent uniform
/// entries rescaled so every layer has spectral norm 1 (up to the power
/// iteration tolerance).
pub fn build_target(layer_widths: &[usize], seed: u64) -> Result<DenseNet> {
    if layer_widths.iter().any(|&d| d == 0) {
        return Err(SlthError::Shape("layer widths must be positive".into()));
    }
    let mut weights = Vec::with_capacity(layer_widths.len().saturating_sub(1));
    for (i, pair) in layer_widths.windows(2).enumerate() {
        let mut rng = SplitMix64::new(trial_seed(seed, i as u64));
        let mut w = Matrix::random_uniform(pair[1], pair[0], &mut rng);
        let sigma = w.spectral_norm(trial_seed(seed ^ 0x5CA1E, i as u64))?;
        if sigma == 0.0 {
            return Err(SlthError::Shape("degenerate zero layer".into()));
        }
        w.scale(1.0 / sigma);
        weights.push(w);
    }
    DenseNet::new(layer_widths.to_vec(), weights)
}

/// Replica block for one input coordinate of one layer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputBlock {
    pub input: usize,
    /// First intermediate row of the block; the block spans `2 * n_star`
    /// consecutive rows.
    pub row_start: usize,
    pub positive_rows: Vec<usize>,
    pub negative_rows: Vec<usize>,
}

/// Metadata for one overparameterized layer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerBlocks {
    pub n_star: u64,
    pub d_in: usize,
    pub d_out: usize,
    pub per_input: Vec<InputBlock>,
}

/// A random `2 ell`-layer network with per-block neuron roles recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverparamNet {
    net: DenseNet,
    blocks: Vec<LayerBlocks>,
    target_widths: Vec<usize>,
    seed: u64,
}

impl OverparamNet {
    pub fn net(&self) -> &DenseNet {
        &self.net
    }

    pub fn blocks(&self) -> &[LayerBlocks] {
        &self.blocks
    }

    pub fn target_widths(&self) -> &[usize] {
        &self.target_widths
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Build the `2 ell`-layer random network for the given target shape: per
/// target layer i an intermediate width `2 d_{i-1} n_i*`, all entries
/// Uniform[-1,1], with each intermediate neuron assigned to its (input,
/// sign-class) role.
pub fn build_overparam(
    target_widths: &[usize],
    epsilon: f64,
    gamma_prime: f64,
    constants: &ConstantsConfig,
    seed: u64,
) -> Result<OverparamNet> {
    if target_widths.len() < 2 {
        return Err(SlthError::Shape("need at least one target layer".into()));
    }
    let ell = target_widths.len() - 1;
    let mut widths = Vec::with_capacity(2 * ell + 1);
    let mut weights = Vec::with_capacity(2 * ell);
    let mut blocks = Vec::with_capacity(ell);
    widths.push(target_widths[0]);
    for i in 0..ell {
        let (d_in, d_out) = (target_widths[i], target_widths[i + 1]);
        let inputs =
            BoundInputs::layer(ell as u64, d_in as u64, d_out as u64, epsilon, gamma_prime);
        let n_star = replica_count_fixed_point(&inputs, constants)?.n_star;
        let width_mid = 2 * d_in * n_star as usize;

        let mut rng = SplitMix64::new(trial_seed(seed, 2 * i as u64));
        let first = Matrix::random_uniform(width_mid, d_in, &mut rng);
        let mut rng = SplitMix64::new(trial_seed(seed, 2 * i as u64 + 1));
        let second = Matrix::random_uniform(d_out, width_mid, &mut rng);

        let mut per_input = Vec::with_capacity(d_in);
        for j in 0..d_in {
            let row_start = j * 2 * n_star as usize;
            let mut positive_rows = Vec::new();
            let mut negative_rows = Vec::new();
            for r in row_start..row_start + 2 * n_star as usize {
                if first.get(r, j) >= 0.0 {
                    positive_rows.push(r);
                } else {
                    negative_rows.push(r);
                }
            }
            per_input.push(InputBlock {
                input: j,
                row_start,
                positive_rows,
                negative_rows,
            });
        }
        blocks.push(LayerBlocks {
            n_star,
            d_in,
            d_out,
            per_input,
        });
        widths.push(width_mid);
        widths.push(d_out);
        weights.push(first);
        weights.push(second);
    }
    Ok(OverparamNet {
        net: DenseNet::new(widths, weights)?,
        blocks,
        target_widths: target_widths.to_vec(),
        seed,
    })
}

/// Subset size per (input, output, sign-class) group: `gamma' n*` rounded
/// to nearest, at least 1.
pub fn subset_size(gamma_prime: f64, n_star: u64) -> usize {
    ((gamma_prime * n_star as f64).round() as usize).max(1)
}

/// How pruning searches for qualifying subsets.
#[derive(Debug, Clone)]
pub struct PruneSettings {
    /// Registry name of the subset-sum strategy.
    pub solver: String,
    /// Move budget for the randomized strategy.
    pub heuristic_budget: u64,
    /// Unit-ball inputs for the approximation estimate.
    pub verify_inputs: usize,
}

impl Default for PruneSettings {
    fn default() -> Self {
        Self {
            solver: "heuristic".into(),
            heuristic_budget: 100_000,
            verify_inputs: 1000,
        }
    }
}

fn build_group_solver(settings: &PruneSettings, seed: u64) -> Result<Box<dyn Solver>> {
    if settings.solver == "heuristic" {
        return Ok(Box::new(HeuristicSolver::new(
            settings.heuristic_budget,
            seed,
        )));
    }
    solver_by_name(&settings.solver, seed)
        .ok_or_else(|| SlthError::Shape(format!("unknown solver '{}'", settings.solver)))
}

/// Select exactly k replica products per sign class whose sums land within
/// `epsilon_w` of the weight `w`.
///
/// `u_values` and `v_values` are the block's first- and second-layer
/// weights; the positive class holds positions with `u >= 0`. Returned
/// positions index into the block arrays. The two pruned sign classes
/// realize `w x` on the two half-lines: for x > 0 only positive-class
/// neurons fire and their selected products sum to about w, symmetrically
/// for x < 0.
pub fn prune_single_weight(
    u_values: &[f64],
    v_values: &[f64],
    w: f64,
    epsilon_w: f64,
    k: usize,
    settings: &PruneSettings,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if u_values.len() != v_values.len() {
        return Err(SlthError::Shape("u and v must have equal length".into()));
    }
    if !(-1.0..=1.0).contains(&w) {
        return Err(SlthError::Shape(format!("weight {w} outside [-1, 1]")));
    }
    let mut selections = Vec::with_capacity(2);
    for (class_id, sign) in [SignClass::Positive, SignClass::Negative]
        .into_iter()
        .enumerate()
    {
        let members: Vec<usize> = (0..u_values.len())
            .filter(|&r| match sign {
                SignClass::Positive => u_values[r] >= 0.0,
                SignClass::Negative => u_values[r] < 0.0,
            })
            .collect();
        if 2 * k > members.len() {
            return Err(SlthError::Shape(format!(
                "k = {k} exceeds half the {sign} class size {}",
                members.len()
            )));
        }
        // Conditioned on its sign, u is uniform on a half-interval and v is
        // uniform on [-1,1], so the products follow the product-uniform law.
        let products: Vec<f64> = members.iter().map(|&r| u_values[r] * v_values[r]).collect();
        let samples = SampleSet::from_values(products, DensitySpec::ProductUniform, seed);
        let solver = build_group_solver(settings, trial_seed(seed, class_id as u64))?;
        let target = Target::new(w, epsilon_w);
        let solution: Option<SubsetSolution> = solver.solve(&samples, k, &target)?;
        match solution {
            Some(sol) => selections.push(
                sol.indices
                    .iter()
                    .map(|&i| members[i])
                    .collect::<Vec<usize>>(),
            ),
            None => return Err(SlthError::NoQualifyingSubset { sign }),
        }
    }
    let negative = selections.pop().unwrap();
    let positive = selections.pop().unwrap();
    Ok((positive, negative))
}

/// Pruning outcome for one layer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerPruneOutcome {
    pub mask_first: Matrix,
    pub mask_second: Matrix,
    pub surviving_first: u64,
    pub surviving_second: u64,
    pub total_params: u64,
    pub density: f64,
    /// The analytic per-layer density bound `2 d_out gamma' / (d_in + d_out)`.
    pub density_bound: f64,
    /// Extra density allowed by rounding k up to the nearest integer.
    pub rounding_slack: f64,
    pub k: usize,
}

/// Prune one layer pair: for every output row reuse the shared input
/// blocks, select k products per (input, output, sign-class) group, and
/// retain first-layer edges only where some outgoing selected edge exists.
pub fn prune_layer(
    first: &Matrix,
    second: &Matrix,
    layer_blocks: &LayerBlocks,
    w_target: &Matrix,
    epsilon_layer: f64,
    gamma_prime: f64,
    settings: &PruneSettings,
    seed: u64,
    layer_index: usize,
) -> Result<LayerPruneOutcome> {
    let (d_in, d_out) = (layer_blocks.d_in, layer_blocks.d_out);
    if w_target.rows() != d_out || w_target.cols() != d_in {
        return Err(SlthError::Shape(format!(
            "target layer is {}x{}, blocks expect {}x{}",
            w_target.rows(),
            w_target.cols(),
            d_out,
            d_in
        )));
    }
    let epsilon_entry = epsilon_layer / ((d_in * d_out) as f64).sqrt();
    let k = subset_size(gamma_prime, layer_blocks.n_star);
    let mut mask_first = Matrix::zeros(first.rows(), first.cols());
    let mut mask_second = Matrix::zeros(second.rows(), second.cols());

    for block in &layer_blocks.per_input {
        let j = block.input;
        let rows: Vec<usize> =
            (block.row_start..block.row_start + 2 * layer_blocks.n_star as usize).collect();
        let u: Vec<f64> = rows.iter().map(|&r| first.get(r, j)).collect();
        for o in 0..d_out {
            let v: Vec<f64> = rows.iter().map(|&r| second.get(o, r)).collect();
            let group_seed = trial_seed(seed, (o * d_in + j) as u64);
            let (pos, neg) = prune_single_weight(
                &u,
                &v,
                w_target.get(o, j),
                epsilon_entry,
                k,
                settings,
                group_seed,
            )
            .map_err(|source| SlthError::GroupFailed {
                layer: layer_index,
                output: o,
                input: j,
                source: Box::new(source),
            })?;
            for local in pos.into_iter().chain(neg) {
                let r = rows[local];
                mask_second.set(o, r, 1.0);
                mask_first.set(r, j, 1.0);
            }
        }
    }

    let surviving_first = mask_first.count_nonzero();
    let surviving_second = mask_second.count_nonzero();
    let total_params = (first.len() + second.len()) as u64;
    let density = (surviving_first + surviving_second) as f64 / total_params as f64;
    let density_bound = 2.0 * d_out as f64 * gamma_prime / (d_in + d_out) as f64;
    let overshoot = (k as f64 - gamma_prime * layer_blocks.n_star as f64).max(0.0);
    let rounding_slack = 4.0 * (d_in * d_out) as f64 * overshoot / total_params as f64;
    Ok(LayerPruneOutcome {
        mask_first,
        mask_second,
        surviving_first,
        surviving_second,
        total_params,
        density,
        density_bound,
        rounding_slack,
        k,
    })
}

/// Per-layer binary retain matrices congruent to the network weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneMask {
    layers: Vec<Matrix>,
}

impl PruneMask {
    pub fn all_ones(net: &DenseNet) -> Self {
        let layers = net
            .weights()
            .iter()
            .map(|w| Matrix::from_flat(w.rows(), w.cols(), vec![1.0; w.len()]))
            .collect();
        Self { layers }
    }

    pub fn layers(&self) -> &[Matrix] {
        &self.layers
    }

    /// Materialize the pruned network (entrywise product).
    pub fn apply(&self, net: &DenseNet) -> Result<DenseNet> {
        if self.layers.len() != net.depth() {
            return Err(SlthError::Shape(
                "mask depth differs from network depth".into(),
            ));
        }
        let weights = net
            .weights()
            .iter()
            .zip(&self.layers)
            .map(|(w, m)| w.hadamard(m))
            .collect();
        DenseNet::new(net.layer_widths().to_vec(), weights)
    }

    /// Forward pass applying the mask on the fly, without materializing.
    pub fn masked_forward(&self, net: &DenseNet, x: &[f64]) -> Vec<f64> {
        let mut acts = x.to_vec();
        for (i, (w, m)) in net.weights().iter().zip(&self.layers).enumerate() {
            if i > 0 {
                for a in &mut acts {
                    *a = a.max(0.0);
                }
            }
            let mut out = vec![0.0; w.rows()];
            for (r, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (c, &a) in acts.iter().enumerate() {
                    acc += w.get(r, c) * m.get(r, c) * a;
                }
                *o = acc;
            }
            acts = out;
        }
        acts
    }

    pub fn surviving_per_layer(&self) -> Vec<u64> {
        self.layers.iter().map(|m| m.count_nonzero()).collect()
    }

    pub fn surviving_total(&self) -> u64 {
        self.surviving_per_layer().iter().sum()
    }
}

/// Sparsity and approximation ledger for one construction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub epsilon_target: f64,
    pub epsilon_achieved_estimate: f64,
    pub density_per_layer: Vec<f64>,
    pub density_overall: f64,
    pub budget: SparsityBudget,
    /// Subset size per layer pair.
    pub subset_sizes: Vec<usize>,
    pub surviving_params: u64,
    pub total_params: u64,
    /// One-subset rounding slack on the overall density bound.
    pub rounding_slack: f64,
}

/// CSV header for prune summaries.
pub const PRUNE_CSV_HEADER: &str =
    "epsilon_target,epsilon_achieved_estimate,density_overall,gamma,rho,surviving_params,total_params";

impl PruneReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.epsilon_target,
            self.epsilon_achieved_estimate,
            self.density_overall,
            self.budget.gamma,
            self.budget.rho,
            self.surviving_params,
            self.total_params
        )
    }
}

/// Prune the whole overparameterized network against a target, layer pair
/// by layer pair with per-layer budget `epsilon / (2 ell)`, and estimate
/// the achieved approximation error on sampled unit-ball inputs.
pub fn prune_network(
    overparam: &OverparamNet,
    target: &DenseNet,
    epsilon: f64,
    gamma_prime: f64,
    settings: &PruneSettings,
    seed: u64,
) -> Result<(PruneMask, PruneReport)> {
    if overparam.target_widths() != target.layer_widths() {
        return Err(SlthError::Shape(format!(
            "overparameterized net was built for widths {:?}, target has {:?}",
            overparam.target_widths(),
            target.layer_widths()
        )));
    }
    let ell = target.depth();
    let epsilon_layer = epsilon / (2.0 * ell as f64);
    let mut layers = Vec::with_capacity(2 * ell);
    let mut density_per_layer = Vec::with_capacity(ell);
    let mut subset_sizes = Vec::with_capacity(ell);
    let mut surviving = 0u64;
    let mut slack_weighted = 0.0;
    for i in 0..ell {
        let outcome = prune_layer(
            &overparam.net().weights()[2 * i],
            &overparam.net().weights()[2 * i + 1],
            &overparam.blocks()[i],
            &target.weights()[i],
            epsilon_layer,
            gamma_prime,
            settings,
            trial_seed(seed, i as u64),
            i,
        )?;
        surviving += outcome.surviving_first + outcome.surviving_second;
        slack_weighted += outcome.rounding_slack * outcome.total_params as f64;
        density_per_layer.push(outcome.density);
        subset_sizes.push(outcome.k);
        layers.push(outcome.mask_first);
        layers.push(outcome.mask_second);
    }
    let mask = PruneMask { layers };
    let total_params = overparam.net().param_count();
    let density_overall = surviving as f64 / total_params as f64;
    let budget = SparsityBudget::from_widths(
        &target
            .layer_widths()
            .iter()
            .map(|&d| d as u64)
            .collect::<Vec<_>>(),
        gamma_prime,
    )?;

    let pruned = mask.apply(overparam.net())?;
    let epsilon_achieved_estimate = verify_approximation(
        &pruned,
        target,
        settings.verify_inputs,
        trial_seed(seed, 0xEE),
    );

    let report = PruneReport {
        epsilon_target: epsilon,
        epsilon_achieved_estimate,
        density_per_layer,
        density_overall,
        budget,
        subset_sizes,
        surviving_params: surviving,
        total_params,
        rounding_slack: slack_weighted / total_params as f64,
    };
    Ok((mask, report))
}

/// Max Euclidean error between the two networks over sampled unit-ball
/// inputs (uniform direction, radius `u^(1/d)`).
pub fn verify_approximation(
    pruned: &DenseNet,
    target: &DenseNet,
    num_inputs: usize,
    seed: u64,
) -> f64 {
    assert!(num_inputs >= 1);
    assert_eq!(pruned.input_dim(), target.input_dim(), "input dims differ");
    let d = target.input_dim();
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..num_inputs {
        let mut x = Vec::with_capacity(d);
        while x.len() < d {
            let (a, b) = rng.next_gaussian_pair();
            x.push(a);
            if x.len() < d {
                x.push(b);
            }
        }
        let len = norm(&x);
        let radius = rng.next_f64().powf(1.0 / d as f64);
        if len > 0.0 {
            for v in &mut x {
                *v *= radius / len;
            }
        }
        let f = target.forward(&x);
        let g = pruned.forward(&x);
        let err = f
            .iter()
            .zip(&g)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err);
    }
    worst
}

/// For a pruned two-layer network whose intermediate rows each keep at most
/// one input edge, the exact worst-case error against a linear target: the
/// maximum over input orthants of the spectral norm of the effective-matrix
/// difference. Upper-bounds any sampled estimate.
pub fn linear_error_exact(pruned: &DenseNet, target: &DenseNet, seed: u64) -> Result<f64> {
    if target.depth() != 1 || pruned.depth() != 2 {
        return Err(SlthError::Shape(
            "exact check needs a 1-layer target and 2-layer prune".into(),
        ));
    }
    let d_in = target.input_dim();
    let d_out = target.output_dim();
    if d_in > 20 {
        return Err(SlthError::Shape(
            "orthant enumeration is capped at 20 inputs".into(),
        ));
    }
    let first = &pruned.weights()[0];
    let second = &pruned.weights()[1];
    // effective slopes per sign of each input coordinate
    let mut s_pos = Matrix::zeros(d_out, d_in);
    let mut s_neg = Matrix::zeros(d_out, d_in);
    for r in 0..first.rows() {
        let mut edge: Option<(usize, f64)> = None;
        for j in 0..d_in {
            let u = first.get(r, j);
            if u != 0.0 {
                if edge.is_some() {
                    return Err(SlthError::Shape(format!(
                        "intermediate row {r} keeps more than one input edge"
                    )));
                }
                edge = Some((j, u));
            }
        }
        let Some((j, u)) = edge else { continue };
        for o in 0..d_out {
            let v = second.get(o, r);
            if v == 0.0 {
                continue;
            }
            // active for x_j > 0 iff u > 0
            if u > 0.0 {
                s_pos.set(o, j, s_pos.get(o, j) + v * u);
            } else {
                s_neg.set(o, j, s_neg.get(o, j) + v * u);
            }
        }
    }
    let w = &target.weights()[0];
    let mut worst = 0.0f64;
    for pattern in 0..(1u32 << d_in) {
        let mut diff = Matrix::zeros(d_out, d_in);
        for j in 0..d_in {
            let s = if pattern & (1 << j) != 0 {
                &s_pos
            } else {
                &s_neg
            };
            for o in 0..d_out {
                diff.set(o, j, w.get(o, j) - s.get(o, j));
            }
        }
        worst = worst.max(diff.spectral_norm(trial_seed(seed, pattern as u64))?);
    }
    Ok(worst)
}

/// On-disk network format: widths plus layer-major, row-major weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub widths: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub seed: u64,
}

impl NetworkFile {
    pub fn from_net(net: &DenseNet, seed: u64) -> Self {
        Self {
            widths: net.layer_widths().to_vec(),
            weights: net.weights().iter().map(|w| w.data().to_vec()).collect(),
            seed,
        }
    }

    pub fn to_net(&self) -> Result<DenseNet> {
        let weights = self
            .widths
            .windows(2)
            .zip(&self.weights)
            .map(|(pair, flat)| Matrix::from_flat(pair[1], pair[0], flat.clone()))
            .collect();
        DenseNet::new(self.widths.clone(), weights)
    }
}

/// On-disk mask format: shapes plus one '0'/'1' string per layer, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskFile {
    pub shapes: Vec<(usize, usize)>,
    pub bits: Vec<String>,
}

impl MaskFile {
    pub fn from_mask(mask: &PruneMask) -> Self {
        Self {
            shapes: mask.layers.iter().map(|m| (m.rows(), m.cols())).collect(),
            bits: mask
                .layers
                .iter()
                .map(|m| {
                    m.data()
                        .iter()
                        .map(|&v| if v != 0.0 { '1' } else { '0' })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_mask(&self) -> Result<PruneMask> {
        if self.shapes.len() != self.bits.len() {
            return Err(SlthError::Shape(
                "mask shapes and bits differ in length".into(),
            ));
        }
        let mut layers = Vec::with_capacity(self.shapes.len());
        for (&(r, c), bits) in self.shapes.iter().zip(&self.bits) {
            if bits.len() != r * c {
                return Err(SlthError::Shape("bit string length mismatch".into()));
            }
            let data = bits
                .chars()
                .map(|ch| if ch == '1' { 1.0 } else { 0.0 })
                .collect();
            layers.push(Matrix::from_flat(r, c, data));
        }
        Ok(PruneMask { layers })
    }
}
