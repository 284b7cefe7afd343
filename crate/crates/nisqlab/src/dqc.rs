//! Differentiable quantum circuits: a quantum feature map encodes a real
//! input into rotation angles, a variational ansatz reshapes the state, and
//! the expectation of the total magnetization Σσ_z serves as the model output
//! f(x). Parameter-shift rules give exact derivatives in both the data
//! variable and the trainable angles, which is what makes the circuits usable
//! as trial solutions inside an ODE loss.
//!
//! Model anatomy (applied left to right on |0…0⟩):
//!
//! ```text
//! R_y(2 w_j φ(x)) per qubit   →   [R_y(θ) R_z(θ′) per qubit; CNOT chain] × layers   →   ⟨Σσ_z⟩
//! ```

use crate::statevector::{Axis, DiagonalObservable, StateError, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Boundary-pin weight in the ODE loss.
pub const BOUNDARY_WEIGHT: f64 = 10.0;

/// Expressivity enumeration walks 2^n sign patterns; beyond this it stops
/// being an "analytic" computation.
pub const MAX_EXPRESSIVITY_QUBITS: usize = 12;

#[derive(Debug, Error)]
pub enum DqcError {
    #[error("feature map acts on {feature_map} qubits but ansatz on {ansatz}")]
    QubitMismatch { feature_map: usize, ansatz: usize },
    #[error("generator weights must be strictly positive and finite")]
    BadWeights,
    #[error("theta has length {got}, expected layers × qubits × 2 = {want}")]
    ThetaLength { got: usize, want: usize },
    #[error("x = {0} is outside the Chebyshev encoding domain [−1, 1]")]
    OutsideDomain(f64),
    #[error("the Chebyshev encoding is not differentiable at x = {0}")]
    NotDifferentiable(f64),
    #[error("theta index {index} out of range for {len} parameters")]
    ThetaIndexOutOfRange { index: usize, len: usize },
    #[error("collocation point {0} lies outside the domain")]
    CollocationOutsideDomain(f64),
    #[error("an ODE problem needs at least one collocation point")]
    EmptyCollocation,
    #[error("an ODE problem needs at least one boundary pin")]
    NoBoundaryPins,
    #[error("domain [{a}, {b}] is empty")]
    EmptyDomain { a: f64, b: f64 },
    #[error("training diverged at iteration {at_iteration}: loss {loss:.3e} exceeds 10³ × initial")]
    Diverged {
        at_iteration: usize,
        loss: f64,
        trace: Vec<f64>,
    },
    #[error("expressivity enumeration supports at most {MAX_EXPRESSIVITY_QUBITS} qubits, got {0}")]
    ExpressivityTooLarge(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

// ---------------------------------------------------------------------------
// Feature maps
// ---------------------------------------------------------------------------

/// The encoding families. Fourier uses φ(x) = x; the Chebyshev variants use
/// φ(x) = arccos(x), which turns the circuit output into a polynomial in x.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureMapKind {
    FourierDefault,
    ChebyshevDefault,
    ChebyshevTower,
}

impl FeatureMapKind {
    pub fn label(&self) -> &'static str {
        match self {
            FeatureMapKind::FourierDefault => "fourier",
            FeatureMapKind::ChebyshevDefault => "chebyshev",
            FeatureMapKind::ChebyshevTower => "tower",
        }
    }
}

/// Per-qubit data encoding R_y(2 w_j φ(x)); the generator is G = Σ_j w_j σ^j,
/// whose spectrum {Σ ±w_j} decides which frequencies the model can express.
///
/// Default weights are all ½; the tower uses w_j = j/2 so the generator gaps
/// grow quadratically in number rather than linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    n_qubits: usize,
    kind: FeatureMapKind,
    weights: Vec<f64>,
}

impl FeatureMap {
    /// Builds the map with its kind's default weights.
    pub fn new(n_qubits: usize, kind: FeatureMapKind) -> Self {
        let weights = match kind {
            FeatureMapKind::ChebyshevTower => {
                (1..=n_qubits).map(|j| j as f64 / 2.0).collect()
            }
            _ => vec![0.5; n_qubits],
        };
        Self { n_qubits, kind, weights }
    }

    /// Overrides the generator weights (must be strictly positive).
    pub fn with_weights(
        n_qubits: usize,
        kind: FeatureMapKind,
        weights: Vec<f64>,
    ) -> Result<Self, DqcError> {
        if weights.len() != n_qubits || !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(DqcError::BadWeights);
        }
        Ok(Self { n_qubits, kind, weights })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kind(&self) -> FeatureMapKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn is_chebyshev(&self) -> bool {
        matches!(
            self.kind,
            FeatureMapKind::ChebyshevDefault | FeatureMapKind::ChebyshevTower
        )
    }

    /// The nonlinearity φ(x).
    pub fn phi(&self, x: f64) -> Result<f64, DqcError> {
        if self.is_chebyshev() {
            if !(-1.0..=1.0).contains(&x) {
                return Err(DqcError::OutsideDomain(x));
            }
            Ok(x.acos())
        } else {
            Ok(x)
        }
    }

    /// dφ/dx; errors at the Chebyshev endpoints where arccos has a vertical
    /// tangent.
    pub fn phi_prime(&self, x: f64) -> Result<f64, DqcError> {
        if self.is_chebyshev() {
            if x.abs() >= 1.0 {
                return Err(DqcError::NotDifferentiable(x));
            }
            Ok(-1.0 / (1.0 - x * x).sqrt())
        } else {
            Ok(1.0)
        }
    }

    /// d²φ/dx².
    pub fn phi_double_prime(&self, x: f64) -> Result<f64, DqcError> {
        if self.is_chebyshev() {
            if x.abs() >= 1.0 {
                return Err(DqcError::NotDifferentiable(x));
            }
            Ok(-x / (1.0 - x * x).powf(1.5))
        } else {
            Ok(0.0)
        }
    }

    /// Rotation angles 2 w_j φ(x), one per qubit.
    pub fn encoding_angles(&self, x: f64) -> Result<Vec<f64>, DqcError> {
        let phi = self.phi(x)?;
        Ok(self.weights.iter().map(|w| 2.0 * w * phi).collect())
    }
}

/// Number of distinct positive gaps in the spectrum of the encoding
/// generator G = Σ_j w_j σ^j, i.e. how many frequencies the model can carry.
/// The spectrum is {Σ ±w_j} by the product structure, so no diagonalization
/// is needed; values and gaps are merged at tolerance 1e-9.
pub fn generator_spectrum_expressivity(fm: &FeatureMap) -> Result<usize, DqcError> {
    let n = fm.n_qubits();
    if n > MAX_EXPRESSIVITY_QUBITS {
        return Err(DqcError::ExpressivityTooLarge(n));
    }
    const TOL: f64 = 1e-9;
    let mut eigenvalues: Vec<f64> = (0..1usize << n)
        .map(|pattern| {
            fm.weights()
                .iter()
                .enumerate()
                .map(|(j, w)| if (pattern >> j) & 1 == 0 { *w } else { -*w })
                .sum()
        })
        .collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    eigenvalues.dedup_by(|a, b| (*a - *b).abs() <= TOL);

    let mut gaps: Vec<f64> = Vec::new();
    for (i, &lo) in eigenvalues.iter().enumerate() {
        for &hi in &eigenvalues[i + 1..] {
            let gap = hi - lo;
            if gap > TOL {
                gaps.push(gap);
            }
        }
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).expect("finite gaps"));
    gaps.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    Ok(gaps.len())
}

// ---------------------------------------------------------------------------
// Ansatz and model
// ---------------------------------------------------------------------------

/// Hardware-efficient variational circuit: each layer applies R_y and R_z to
/// every qubit, then entangles along a nearest-neighbor CNOT chain. Parameter
/// `(layer, qubit)` pairs live at `theta[(layer·n + qubit)·2]` (R_y) and the
/// following slot (R_z).
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalAnsatz {
    n_qubits: usize,
    n_layers: usize,
    theta: Vec<f64>,
}

impl VariationalAnsatz {
    /// All-zero parameters (the identity circuit up to the CNOT chains).
    pub fn new(n_qubits: usize, n_layers: usize) -> Self {
        Self {
            n_qubits,
            n_layers,
            theta: vec![0.0; n_layers * n_qubits * 2],
        }
    }

    pub fn with_theta(
        n_qubits: usize,
        n_layers: usize,
        theta: Vec<f64>,
    ) -> Result<Self, DqcError> {
        let want = n_layers * n_qubits * 2;
        if theta.len() != want || !theta.iter().all(|t| t.is_finite()) {
            return Err(DqcError::ThetaLength { got: theta.len(), want });
        }
        Ok(Self { n_qubits, n_layers, theta })
    }

    /// Seeded uniform draw in [−0.5, 0.5] rad, the initialization the
    /// training experiments use.
    pub fn with_random_theta(n_qubits: usize, n_layers: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = (0..n_layers * n_qubits * 2)
            .map(|_| rng.gen_range(-0.5..0.5))
            .collect();
        Self { n_qubits, n_layers, theta }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn n_parameters(&self) -> usize {
        self.theta.len()
    }
}

/// Feature map + ansatz + the Σσ_z readout.
#[derive(Clone, Debug)]
pub struct QuantumModel {
    feature_map: FeatureMap,
    ansatz: VariationalAnsatz,
    observable: DiagonalObservable,
}

impl QuantumModel {
    pub fn new(feature_map: FeatureMap, ansatz: VariationalAnsatz) -> Result<Self, DqcError> {
        if feature_map.n_qubits() != ansatz.n_qubits() {
            return Err(DqcError::QubitMismatch {
                feature_map: feature_map.n_qubits(),
                ansatz: ansatz.n_qubits(),
            });
        }
        let n = feature_map.n_qubits();
        // Total magnetization: basis state i carries n − 2·popcount(i).
        let observable =
            DiagonalObservable::from_fn(n, |i| n as f64 - 2.0 * (i.count_ones() as f64))?;
        Ok(Self { feature_map, ansatz, observable })
    }

    pub fn n_qubits(&self) -> usize {
        self.feature_map.n_qubits()
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.feature_map
    }

    pub fn ansatz(&self) -> &VariationalAnsatz {
        &self.ansatz
    }

    pub fn theta(&self) -> &[f64] {
        self.ansatz.theta()
    }

    /// Same circuit with different trainable parameters.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self, DqcError> {
        let ansatz =
            VariationalAnsatz::with_theta(self.ansatz.n_qubits(), self.ansatz.n_layers(), theta)?;
        Ok(Self {
            feature_map: self.feature_map.clone(),
            ansatz,
            observable: self.observable.clone(),
        })
    }

    /// Core evaluator on explicit encoding angles and parameters. All angle
    /// vectors are finite by construction, so state errors cannot occur.
    fn eval_raw(&self, encoding_angles: &[f64], theta: &[f64]) -> f64 {
        let n = self.n_qubits();
        let mut state = StateVector::zero_state(n).expect("validated qubit count");
        for (q, &angle) in encoding_angles.iter().enumerate() {
            state = state.axis_rotation(q, Axis::Y, angle).expect("finite angle");
        }
        let mut k = 0;
        for _ in 0..self.ansatz.n_layers() {
            for q in 0..n {
                state = state.axis_rotation(q, Axis::Y, theta[k]).expect("finite angle");
                state = state.axis_rotation(q, Axis::Z, theta[k + 1]).expect("finite angle");
                k += 2;
            }
            for q in 0..n.saturating_sub(1) {
                state = state.cnot(q, q + 1).expect("valid wires");
            }
        }
        state
            .expectation_diagonal(&self.observable)
            .expect("dimensions agree")
    }
}

/// f(x) = ⟨Σσ_z⟩ of the encoded and reshaped state; always in [−n, n].
pub fn evaluate_model(model: &QuantumModel, x: f64) -> Result<f64, DqcError> {
    let angles = model.feature_map.encoding_angles(x)?;
    Ok(model.eval_raw(&angles, model.theta()))
}

/// What to differentiate with respect to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    /// d/dx through the feature map (chain rule over every encoding qubit).
    Data,
    /// ∂/∂θ_k for one trainable angle.
    Theta(usize),
}

/// ∂f/∂(encoding angle of qubit j) via the two-point shift rule.
fn shift_encoding(model: &QuantumModel, angles: &[f64], theta: &[f64], j: usize) -> f64 {
    let mut plus = angles.to_vec();
    let mut minus = angles.to_vec();
    plus[j] += FRAC_PI_2;
    minus[j] -= FRAC_PI_2;
    (model.eval_raw(&plus, theta) - model.eval_raw(&minus, theta)) / 2.0
}

/// ∂f/∂θ_k via the two-point shift rule.
fn shift_theta(model: &QuantumModel, angles: &[f64], theta: &[f64], k: usize) -> f64 {
    let mut plus = theta.to_vec();
    let mut minus = theta.to_vec();
    plus[k] += FRAC_PI_2;
    minus[k] -= FRAC_PI_2;
    (model.eval_raw(angles, &plus) - model.eval_raw(angles, &minus)) / 2.0
}

/// Exact first derivative by parameter shifting. Data derivatives apply the
/// chain factor dα_j/dx = 2 w_j φ′(x) per qubit; θ derivatives shift a single
/// rotation.
pub fn parameter_shift_derivative(
    model: &QuantumModel,
    x: f64,
    wrt: Derivative,
) -> Result<f64, DqcError> {
    let angles = model.feature_map.encoding_angles(x)?;
    let theta = model.theta();
    match wrt {
        Derivative::Data => {
            let phi_prime = model.feature_map.phi_prime(x)?;
            let mut total = 0.0;
            for (j, w) in model.feature_map.weights().iter().enumerate() {
                total += shift_encoding(model, &angles, theta, j) * 2.0 * w * phi_prime;
            }
            Ok(total)
        }
        Derivative::Theta(k) => {
            if k >= theta.len() {
                return Err(DqcError::ThetaIndexOutOfRange { index: k, len: theta.len() });
            }
            Ok(shift_theta(model, &angles, theta, k))
        }
    }
}

/// Exact second data derivative by nested shifts:
/// d²f/dx² = Σ_{j,k} ∂²f/∂α_j∂α_k α_j′ α_k′ + Σ_j ∂f/∂α_j α_j″.
pub fn second_derivative(model: &QuantumModel, x: f64) -> Result<f64, DqcError> {
    let fm = &model.feature_map;
    let angles = fm.encoding_angles(x)?;
    let theta = model.theta();
    let phi_prime = fm.phi_prime(x)?;
    let phi_second = fm.phi_double_prime(x)?;
    let n = model.n_qubits();

    let alpha_prime: Vec<f64> = fm.weights().iter().map(|w| 2.0 * w * phi_prime).collect();
    let alpha_second: Vec<f64> = fm.weights().iter().map(|w| 2.0 * w * phi_second).collect();

    let f0 = model.eval_raw(&angles, theta);
    let mut total = 0.0;
    for j in 0..n {
        // Diagonal: second shift of the same angle collapses to ±π shifts.
        let mut plus = angles.clone();
        let mut minus = angles.clone();
        plus[j] += 2.0 * FRAC_PI_2;
        minus[j] -= 2.0 * FRAC_PI_2;
        let d2_jj =
            (model.eval_raw(&plus, theta) - 2.0 * f0 + model.eval_raw(&minus, theta)) / 4.0;
        total += d2_jj * alpha_prime[j] * alpha_prime[j];
        total += shift_encoding(model, &angles, theta, j) * alpha_second[j];

        for k in (j + 1)..n {
            let mut pp = angles.clone();
            let mut pm = angles.clone();
            let mut mp = angles.clone();
            let mut mm = angles.clone();
            pp[j] += FRAC_PI_2;
            pp[k] += FRAC_PI_2;
            pm[j] += FRAC_PI_2;
            pm[k] -= FRAC_PI_2;
            mp[j] -= FRAC_PI_2;
            mp[k] += FRAC_PI_2;
            mm[j] -= FRAC_PI_2;
            mm[k] -= FRAC_PI_2;
            let d2_jk = (model.eval_raw(&pp, theta) - model.eval_raw(&pm, theta)
                - model.eval_raw(&mp, theta)
                + model.eval_raw(&mm, theta))
                / 4.0;
            // The mixed partial enters twice (j,k) and (k,j).
            total += 2.0 * d2_jk * alpha_prime[j] * alpha_prime[k];
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// ODE problems, loss, and training
// ---------------------------------------------------------------------------

/// A first-order ODE posed in residual form `residual(x, f, f′) = 0` with
/// boundary pins, over a domain carrying fixed collocation points.
pub struct OdeProblem {
    residual: Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
    boundary: Vec<(f64, f64)>,
    domain: (f64, f64),
    collocation: Vec<f64>,
}

impl OdeProblem {
    pub fn new(
        residual: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        boundary: Vec<(f64, f64)>,
        domain: (f64, f64),
        collocation: Vec<f64>,
    ) -> Result<Self, DqcError> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(DqcError::EmptyDomain { a, b });
        }
        if collocation.is_empty() {
            return Err(DqcError::EmptyCollocation);
        }
        if boundary.is_empty() {
            return Err(DqcError::NoBoundaryPins);
        }
        for &x in &collocation {
            if !(a..=b).contains(&x) {
                return Err(DqcError::CollocationOutsideDomain(x));
            }
        }
        Ok(Self {
            residual: Box::new(residual),
            boundary,
            domain,
            collocation,
        })
    }

    /// df/dx = −f with f(0) = 1 on [0, 0.9], the crate's reference training
    /// problem (solution e^{−x}), with uniformly spaced collocation points.
    pub fn exponential_decay(n_collocation: usize) -> Self {
        let n = n_collocation.max(2);
        let collocation = (0..n).map(|i| 0.9 * i as f64 / (n - 1) as f64).collect();
        Self::new(|_x, f, fp| fp + f, vec![(0.0, 1.0)], (0.0, 0.9), collocation)
            .expect("static construction is valid")
    }

    pub fn residual(&self, x: f64, f: f64, fp: f64) -> f64 {
        (self.residual)(x, f, fp)
    }

    pub fn boundary(&self) -> &[(f64, f64)] {
        &self.boundary
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn collocation(&self) -> &[f64] {
        &self.collocation
    }
}

/// Mean squared residual over the collocation points plus
/// [`BOUNDARY_WEIGHT`] · Σ (f(x₀) − y₀)²; zero exactly when the model solves
/// the ODE at every point and meets every pin.
pub fn ode_loss(model: &QuantumModel, problem: &OdeProblem) -> Result<f64, DqcError> {
    let mut residual_sum = 0.0;
    for &x in problem.collocation() {
        let f = evaluate_model(model, x)?;
        let fp = parameter_shift_derivative(model, x, Derivative::Data)?;
        residual_sum += problem.residual(x, f, fp).powi(2);
    }
    let mut loss = residual_sum / problem.collocation().len() as f64;
    for &(x0, y0) in problem.boundary() {
        let f = evaluate_model(model, x0)?;
        loss += BOUNDARY_WEIGHT * (f - y0).powi(2);
    }
    Ok(loss)
}

/// Loss and its full gradient in θ. Residual sensitivities ∂r/∂f and ∂r/∂f′
/// come from central differences on the classical residual closure; the
/// quantum factors ∂f/∂θ and ∂f′/∂θ are exact parameter shifts.
fn loss_and_gradient(
    model: &QuantumModel,
    theta: &[f64],
    problem: &OdeProblem,
) -> Result<(f64, Vec<f64>), DqcError> {
    let fm = &model.feature_map;
    let n = model.n_qubits();
    let n_params = theta.len();
    let mut loss = 0.0;
    let mut grad = vec![0.0; n_params];
    let n_colloc = problem.collocation().len() as f64;

    for &x in problem.collocation() {
        let angles = fm.encoding_angles(x)?;
        let phi_prime = fm.phi_prime(x)?;
        let chain: Vec<f64> = fm.weights().iter().map(|w| 2.0 * w * phi_prime).collect();

        let f = model.eval_raw(&angles, theta);
        let fp: f64 = (0..n)
            .map(|j| shift_encoding(model, &angles, theta, j) * chain[j])
            .sum();
        let r = problem.residual(x, f, fp);
        loss += r * r / n_colloc;

        // Classical sensitivities of the residual.
        let h = 1e-6 * (1.0 + f.abs().max(fp.abs()));
        let dr_df = (problem.residual(x, f + h, fp) - problem.residual(x, f - h, fp)) / (2.0 * h);
        let dr_dfp = (problem.residual(x, f, fp + h) - problem.residual(x, f, fp - h)) / (2.0 * h);

        for k in 0..n_params {
            let df_dk = shift_theta(model, &angles, theta, k);
            // ∂f′/∂θ_k: mixed second partials over every encoding qubit.
            let mut dfp_dk = 0.0;
            for j in 0..n {
                let mut pp = angles.clone();
                let mut pm = angles.clone();
                pp[j] += FRAC_PI_2;
                pm[j] -= FRAC_PI_2;
                let mut tp = theta.to_vec();
                let mut tm = theta.to_vec();
                tp[k] += FRAC_PI_2;
                tm[k] -= FRAC_PI_2;
                let mixed = (model.eval_raw(&pp, &tp) - model.eval_raw(&pp, &tm)
                    - model.eval_raw(&pm, &tp)
                    + model.eval_raw(&pm, &tm))
                    / 4.0;
                dfp_dk += mixed * chain[j];
            }
            grad[k] += 2.0 * r * (dr_df * df_dk + dr_dfp * dfp_dk) / n_colloc;
        }
    }

    for &(x0, y0) in problem.boundary() {
        let angles = fm.encoding_angles(x0)?;
        let f = model.eval_raw(&angles, theta);
        loss += BOUNDARY_WEIGHT * (f - y0).powi(2);
        for (k, g) in grad.iter_mut().enumerate() {
            let df_dk = shift_theta(model, &angles, theta, k);
            *g += 2.0 * BOUNDARY_WEIGHT * (f - y0) * df_dk;
        }
    }
    Ok((loss, grad))
}

/// Full-batch gradient descent with momentum 0.9 on the ODE loss, recording
/// the loss every iteration and returning the best parameters seen (the raw
/// trace need not be monotone; the running best is). Aborts with
/// [`DqcError::Diverged`] if the loss exceeds 10³ × its initial value.
///
/// The descent is deterministic: initial parameters come from the model
/// itself (see [`VariationalAnsatz::with_random_theta`] for seeded draws).
/// The `seed` argument is reserved for stochastic variants such as
/// collocation mini-batching and is currently unused.
pub fn train(
    model: &QuantumModel,
    problem: &OdeProblem,
    max_iters: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<(QuantumModel, Vec<f64>), DqcError> {
    train_with_observer(model, problem, max_iters, learning_rate, seed, |_, _, _| {})
}

/// [`train`] with a per-iteration callback `(iteration, theta, loss)`,
/// which the experiment layer uses to track solution error alongside loss.
pub fn train_with_observer(
    model: &QuantumModel,
    problem: &OdeProblem,
    max_iters: usize,
    learning_rate: f64,
    _seed: u64,
    mut observer: impl FnMut(usize, &[f64], f64),
) -> Result<(QuantumModel, Vec<f64>), DqcError> {
    const MOMENTUM: f64 = 0.9;
    let mut theta = model.theta().to_vec();
    let mut velocity = vec![0.0; theta.len()];
    let mut trace = Vec::with_capacity(max_iters);
    let mut best_theta = theta.clone();
    let mut best_loss = f64::INFINITY;
    let mut initial_loss = None;

    for iter in 0..max_iters.max(1) {
        let (loss, grad) = loss_and_gradient(model, &theta, problem)?;
        trace.push(loss);
        observer(iter, &theta, loss);
        if loss < best_loss {
            best_loss = loss;
            best_theta = theta.clone();
        }
        let initial = *initial_loss.get_or_insert(loss);
        if loss > 1e3 * initial.max(1e-12) || !loss.is_finite() {
            return Err(DqcError::Diverged { at_iteration: iter, loss, trace });
        }
        for ((t, v), g) in theta.iter_mut().zip(&mut velocity).zip(&grad) {
            *v = MOMENTUM * *v - learning_rate * g;
            *t += *v;
        }
        if !theta.iter().all(|t| t.is_finite()) {
            return Err(DqcError::Diverged {
                at_iteration: iter,
                loss: f64::INFINITY,
                trace,
            });
        }
    }
    Ok((model.with_theta(best_theta)?, trace))
}
