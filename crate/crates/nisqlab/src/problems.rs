//! Problem encoders: every combinatorial objective handled by the crate
//! becomes a [`QuboProblem`], an [`IsingHamiltonian`], or a
//! [`DiagonalObservable`], all interconvertible.
//!
//! Energy conventions, shared by every encoder:
//!
//! * QUBO energy is the full quadratic form `xᵀQx + cᵀx + offset` over binary
//!   `x` — `Q` is symmetric with zero diagonal, so each unordered variable
//!   pair is counted twice, matching the Σ_{n≠m} Q_nm x_n x_m form.
//! * Ising energy is `−(Σ_n a_n σ_n + Σ_{n≠m} J_nm σ_n σ_m) + offset` over
//!   spins σ ∈ {−1, +1}, with symmetric zero-diagonal `J` (again both
//!   orderings of a pair are summed).
//! * The bit ↔ spin dictionary is `σ = 2b − 1`: bit 1 encodes spin +1. Note
//!   this is the *variable encoding*, not an operator statement; the spin
//!   value of qubit `n` therefore equals −⟨σ_z^n⟩ under the simulator's
//!   `σ_z|0⟩ = +|0⟩` convention (see [`IsingHamiltonian::to_pauli_terms`]).
//! * `energy` always includes the stored offset, so converted problems have
//!   identical energy tables, not just identical argmins. Each encoder
//!   documents what its energy means (−cut, −satisfied count, paint changes,
//!   tour length); smaller is always better.

use crate::statevector::{Axis, DiagonalObservable, PauliTerm, StateError, MAX_QUBITS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Assignment of binary variables; entry `i` is 0 or 1.
pub type BitString = Vec<u8>;

/// Bits of `index`, least significant first, padded to `n` entries.
pub fn index_to_bits(index: usize, n: usize) -> BitString {
    (0..n).map(|q| ((index >> q) & 1) as u8).collect()
}

/// Inverse of [`index_to_bits`].
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (q, &b)| acc | ((b as usize & 1) << q))
}

/// Spin value encoded by a bit: σ = 2b − 1.
pub fn spin_of_bit(bit: u8) -> i8 {
    2 * (bit as i8) - 1
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("self-loop on node {0} cannot be encoded")]
    SelfLoop(usize),
    #[error("node index {node} out of range for {n_nodes} nodes")]
    NodeOutOfRange { node: usize, n_nodes: usize },
    #[error("matrix of length {len} is not {n}×{n}")]
    BadMatrixShape { len: usize, n: usize },
    #[error("matrix is not symmetric: entry ({i},{j}) = {a} vs ({j},{i}) = {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("quadratic matrix has nonzero diagonal entry at {0}; linear terms belong in c")]
    NonzeroDiagonal(usize),
    #[error("vector length {got} does not match {want} variables")]
    BadVectorLength { got: usize, want: usize },
    #[error("non-finite coefficient encountered")]
    NonFiniteCoefficient,
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("literal {literal} out of range for {n_vars} variables")]
    LiteralOutOfRange { literal: i32, n_vars: usize },
    #[error("clause {clause} contains variable {var} and its negation")]
    TautologicalClause { clause: usize, var: usize },
    #[error("clause width k = {k} exceeds variable count {n_vars}")]
    KTooLarge { k: usize, n_vars: usize },
    #[error("clause of width {0} exceeds the 3-literal QUBO expansion limit")]
    ClauseTooWide(usize),
    #[error("car {0} does not appear exactly twice in the sequence")]
    NotExactlyTwice(usize),
    #[error("{n} cities need {vars} one-hot variables; the supported maximum is 6 cities")]
    TooManyCities { n: usize, vars: usize },
    #[error("{0} variables exceed the {MAX_QUBITS}-qubit diagonal bound")]
    DiagonalTooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("QUBO JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    State(#[from] StateError),
}

// ---------------------------------------------------------------------------
// QUBO and Ising forms
// ---------------------------------------------------------------------------

/// Quadratic unconstrained binary optimization problem:
/// minimize `xᵀQx + cᵀx + offset` over x ∈ {0,1}ⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    n_vars: usize,
    q: Vec<f64>, // row-major n×n, symmetric, zero diagonal
    c: Vec<f64>,
    offset: f64,
}

impl QuboProblem {
    /// All-zero problem on `n_vars` variables.
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            q: vec![0.0; n_vars * n_vars],
            c: vec![0.0; n_vars],
            offset: 0.0,
        }
    }

    /// Builds from explicit coefficients; `q` is row-major n×n and must be
    /// symmetric (1e-12) with zero diagonal.
    pub fn from_parts(
        n_vars: usize,
        q: Vec<f64>,
        c: Vec<f64>,
        offset: f64,
    ) -> Result<Self, ProblemError> {
        if q.len() != n_vars * n_vars {
            return Err(ProblemError::BadMatrixShape { len: q.len(), n: n_vars });
        }
        if c.len() != n_vars {
            return Err(ProblemError::BadVectorLength { got: c.len(), want: n_vars });
        }
        if !q.iter().chain(c.iter()).chain([&offset]).all(|v| v.is_finite()) {
            return Err(ProblemError::NonFiniteCoefficient);
        }
        for i in 0..n_vars {
            if q[i * n_vars + i] != 0.0 {
                return Err(ProblemError::NonzeroDiagonal(i));
            }
            for j in (i + 1)..n_vars {
                let (a, b) = (q[i * n_vars + j], q[j * n_vars + i]);
                if (a - b).abs() > 1e-12 {
                    return Err(ProblemError::NotSymmetric { i, j, a, b });
                }
            }
        }
        Ok(Self { n_vars, q, c, offset })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Matrix entry Q[i][j]. The monomial x_i·x_j (i ≠ j) carries total
    /// coefficient Q[i][j] + Q[j][i] = 2·Q[i][j].
    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n_vars + j]
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn linear_terms(&self) -> &[f64] {
        &self.c
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Adds `coefficient · x_i · x_j` to the energy (split across the two
    /// symmetric matrix entries). `i` and `j` must differ.
    pub fn add_interaction(&mut self, i: usize, j: usize, coefficient: f64) {
        assert_ne!(i, j, "interaction needs two distinct variables");
        self.q[i * self.n_vars + j] += coefficient / 2.0;
        self.q[j * self.n_vars + i] += coefficient / 2.0;
    }

    /// Adds `coefficient · x_i` to the energy.
    pub fn add_linear(&mut self, i: usize, coefficient: f64) {
        self.c[i] += coefficient;
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    /// Full energy `xᵀQx + cᵀx + offset` of an assignment.
    pub fn energy(&self, bits: &[u8]) -> f64 {
        assert_eq!(bits.len(), self.n_vars, "assignment length mismatch");
        let ones: Vec<usize> = (0..self.n_vars).filter(|&i| bits[i] != 0).collect();
        let mut e = self.offset;
        for &i in &ones {
            e += self.c[i];
            for &j in &ones {
                e += self.q[i * self.n_vars + j];
            }
        }
        e
    }

    /// Energy change from flipping bit `flip` of `bits` (without applying it).
    ///
    /// Exact: with the diagonal of Q zero, E(x with x_k→1−x_k) − E(x) =
    /// s·(c_k + 2 Σ_j Q_kj x_j) where s = +1 for a 0→1 flip and −1 otherwise.
    pub fn flip_delta(&self, bits: &[u8], flip: usize) -> f64 {
        let row = &self.q[flip * self.n_vars..(flip + 1) * self.n_vars];
        let cross: f64 = row
            .iter()
            .zip(bits)
            .map(|(&qv, &b)| if b != 0 { qv } else { 0.0 })
            .sum();
        let s = if bits[flip] == 0 { 1.0 } else { -1.0 };
        s * (self.c[flip] + 2.0 * cross)
    }

    /// Tabulates the energy of every assignment (needs `n_vars ≤ 14`).
    pub fn to_diagonal(&self) -> Result<DiagonalObservable, ProblemError> {
        if self.n_vars > MAX_QUBITS {
            return Err(ProblemError::DiagonalTooLarge(self.n_vars));
        }
        Ok(DiagonalObservable::from_fn(self.n_vars, |i| {
            self.energy(&index_to_bits(i, self.n_vars))
        })?)
    }
}

/// Diagonal spin Hamiltonian `−(Σ_n a_n σ_n + Σ_{n≠m} J_nm σ_n σ_m) + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingHamiltonian {
    n_spins: usize,
    a: Vec<f64>,
    j: Vec<f64>, // row-major n×n, symmetric, zero diagonal
    offset: f64,
}

impl IsingHamiltonian {
    pub fn new(n_spins: usize) -> Self {
        Self {
            n_spins,
            a: vec![0.0; n_spins],
            j: vec![0.0; n_spins * n_spins],
            offset: 0.0,
        }
    }

    /// Builds from explicit fields and couplings; `j` must be symmetric with
    /// zero diagonal, like the QUBO quadratic matrix.
    pub fn from_parts(
        n_spins: usize,
        a: Vec<f64>,
        j: Vec<f64>,
        offset: f64,
    ) -> Result<Self, ProblemError> {
        // Reuse the QUBO validator: identical matrix shape rules.
        let checked = QuboProblem::from_parts(n_spins, j, a, offset)?;
        Ok(Self {
            n_spins,
            a: checked.c,
            j: checked.q,
            offset,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn field(&self, n: usize) -> f64 {
        self.a[n]
    }

    pub fn fields(&self) -> &[f64] {
        &self.a
    }

    pub fn coupling(&self, n: usize, m: usize) -> f64 {
        self.j[n * self.n_spins + m]
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_field(&mut self, n: usize, value: f64) {
        self.a[n] = value;
    }

    /// Sets J[n][m] = J[m][n] = value (n ≠ m).
    pub fn set_coupling(&mut self, n: usize, m: usize, value: f64) {
        assert_ne!(n, m, "coupling needs two distinct spins");
        self.j[n * self.n_spins + m] = value;
        self.j[m * self.n_spins + n] = value;
    }

    pub fn set_offset(&mut self, value: f64) {
        self.offset = value;
    }

    /// Energy of a spin configuration (entries ±1).
    pub fn energy(&self, spins: &[i8]) -> f64 {
        assert_eq!(spins.len(), self.n_spins, "spin configuration length mismatch");
        let mut field = 0.0;
        for (n, &s) in spins.iter().enumerate() {
            field += self.a[n] * s as f64;
        }
        let mut pair = 0.0;
        for n in 0..self.n_spins {
            for m in 0..self.n_spins {
                pair += self.j[n * self.n_spins + m] * (spins[n] * spins[m]) as f64;
            }
        }
        -(field + pair) + self.offset
    }

    /// Energy of the spin configuration encoded by a bit string (σ = 2b − 1).
    pub fn energy_bits(&self, bits: &[u8]) -> f64 {
        let spins: Vec<i8> = bits.iter().map(|&b| spin_of_bit(b)).collect();
        self.energy(&spins)
    }

    /// Expresses the Hamiltonian as Pauli terms for the simulator.
    ///
    /// Because bit `b` encodes spin `2b − 1` while `σ_z|0⟩ = +|0⟩`, each spin
    /// variable is the *negated* Z operator: σ_n = −σ_z^n. The energy operator
    /// is therefore `Σ_n a_n Z_n − Σ_{n<m} 2 J_nm Z_n Z_m + offset·I`.
    pub fn to_pauli_terms(&self) -> Vec<PauliTerm> {
        let mut terms = Vec::new();
        if self.offset != 0.0 {
            terms.push(PauliTerm::new(self.offset, vec![]).expect("identity term"));
        }
        for n in 0..self.n_spins {
            if self.a[n] != 0.0 {
                terms.push(PauliTerm::new(self.a[n], vec![(n, Axis::Z)]).expect("single Z"));
            }
        }
        for n in 0..self.n_spins {
            for m in (n + 1)..self.n_spins {
                let j = self.j[n * self.n_spins + m];
                if j != 0.0 {
                    terms.push(
                        PauliTerm::new(-2.0 * j, vec![(n, Axis::Z), (m, Axis::Z)])
                            .expect("ZZ term"),
                    );
                }
            }
        }
        terms
    }
}

/// Change of variables σ = 2x − 1: coefficient identities
/// `J_nm = −Q_nm/4`, `a_n = −(Σ_m Q_nm + c_n)/2`, with the offset adjusted so
/// the energy *tables* (not just argmins) coincide.
pub fn qubo_to_ising(q: &QuboProblem) -> IsingHamiltonian {
    let n = q.n_vars;
    let mut ising = IsingHamiltonian::new(n);
    let mut coupling_sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let jij = -q.quadratic(i, j) / 4.0;
            if i != j {
                ising.j[i * n + j] = jij;
                coupling_sum += jij;
            }
        }
        let row_sum: f64 = (0..n).map(|j| q.quadratic(i, j)).sum();
        ising.a[i] = -(row_sum + q.linear(i)) / 2.0;
    }
    let field_sum: f64 = ising.a.iter().sum();
    ising.offset = q.offset - field_sum + coupling_sum;
    ising
}

/// Tabulates the Ising energy over all basis states under the bit convention
/// σ = 2b − 1 (needs `n_spins ≤ 14`).
pub fn ising_to_diagonal(h: &IsingHamiltonian) -> Result<DiagonalObservable, ProblemError> {
    if h.n_spins > MAX_QUBITS {
        return Err(ProblemError::DiagonalTooLarge(h.n_spins));
    }
    Ok(DiagonalObservable::from_fn(h.n_spins, |i| {
        h.energy_bits(&index_to_bits(i, h.n_spins))
    })?)
}

// ---------------------------------------------------------------------------
// Encoders
// ---------------------------------------------------------------------------

/// MaxCut as a QUBO: `energy(x) = −cut(x)`, so the brute-force minimum is the
/// maximum cut negated. Offset is zero.
pub fn maxcut_qubo(edges: &[(usize, usize)], n_nodes: usize) -> Result<QuboProblem, ProblemError> {
    let mut q = QuboProblem::new(n_nodes);
    for &(u, v) in edges {
        if u == v {
            return Err(ProblemError::SelfLoop(u));
        }
        for node in [u, v] {
            if node >= n_nodes {
                return Err(ProblemError::NodeOutOfRange { node, n_nodes });
            }
        }
        // An edge is cut iff x_u ≠ x_v, i.e. x_u + x_v − 2 x_u x_v = 1.
        q.add_interaction(u, v, 2.0);
        q.add_linear(u, -1.0);
        q.add_linear(v, -1.0);
    }
    Ok(q)
}

/// Cut size of a bipartition, straight from the definition.
pub fn cut_size(edges: &[(usize, usize)], bits: &[u8]) -> usize {
    edges.iter().filter(|&&(u, v)| bits[u] != bits[v]).count()
}

// ---------------------------------------------------------------------------
// k-SAT
// ---------------------------------------------------------------------------

/// CNF formula. Literals are signed 1-based variable indices (DIMACS style):
/// `3` means x₃, `-3` means ¬x₃.
#[derive(Clone, Debug, PartialEq)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, ProblemError> {
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(ProblemError::EmptyClause(ci));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > n_vars {
                    return Err(ProblemError::LiteralOutOfRange { literal: lit, n_vars });
                }
            }
            for &lit in clause {
                if clause.contains(&-lit) {
                    return Err(ProblemError::TautologicalClause {
                        clause: ci,
                        var: lit.unsigned_abs() as usize,
                    });
                }
            }
        }
        Ok(Self { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Clause-to-variable ratio m/n.
    pub fn ratio(&self) -> f64 {
        self.clauses.len() as f64 / self.n_vars as f64
    }

    /// Truth value of a literal under an assignment (bit i ↔ variable i+1).
    fn literal_true(lit: i32, bits: &[u8]) -> bool {
        let value = bits[(lit.unsigned_abs() - 1) as usize] != 0;
        if lit > 0 {
            value
        } else {
            !value
        }
    }

    pub fn clause_satisfied(&self, clause_index: usize, bits: &[u8]) -> bool {
        self.clauses[clause_index]
            .iter()
            .any(|&lit| Self::literal_true(lit, bits))
    }

    /// Number of satisfied clauses under an assignment.
    pub fn satisfied_count(&self, bits: &[u8]) -> usize {
        (0..self.clauses.len())
            .filter(|&ci| self.clause_satisfied(ci, bits))
            .count()
    }

    pub fn is_satisfied(&self, bits: &[u8]) -> bool {
        self.satisfied_count(bits) == self.clauses.len()
    }

    /// Parses DIMACS CNF text (`c` comments, `p cnf <n> <m>` header, clauses
    /// terminated by 0; clauses may span lines).
    pub fn from_dimacs(text: &str) -> Result<Self, ProblemError> {
        let mut n_vars = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 4 || fields[1] != "cnf" {
                    return Err(ProblemError::Parse {
                        line: lineno + 1,
                        msg: format!("bad problem line: {line}"),
                    });
                }
                n_vars = Some(fields[2].parse::<usize>().map_err(|e| ProblemError::Parse {
                    line: lineno + 1,
                    msg: format!("bad variable count: {e}"),
                })?);
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|e| ProblemError::Parse {
                    line: lineno + 1,
                    msg: format!("bad literal {tok:?}: {e}"),
                })?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let n_vars = n_vars.ok_or(ProblemError::Parse {
            line: 0,
            msg: "missing `p cnf` header".into(),
        })?;
        Self::new(n_vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Uniform random k-SAT: each clause picks k distinct variables uniformly and
/// signs them with independent fair coins; clauses are drawn independently
/// (duplicate clauses allowed). Reproducible per seed.
pub fn random_ksat(
    n_vars: usize,
    n_clauses: usize,
    k: usize,
    seed: u64,
) -> Result<CnfFormula, ProblemError> {
    if k > n_vars || k == 0 {
        return Err(ProblemError::KTooLarge { k, n_vars });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(n_clauses);
    for _ in 0..n_clauses {
        let mut vars: Vec<usize> = Vec::with_capacity(k);
        while vars.len() < k {
            let v = rng.gen_range(1..=n_vars);
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let clause: Vec<i32> = vars
            .into_iter()
            .map(|v| if rng.gen_bool(0.5) { v as i32 } else { -(v as i32) })
            .collect();
        clauses.push(clause);
    }
    CnfFormula::new(n_vars, clauses)
}

/// MaxSAT as a diagonal observable for quantum backends:
/// `values[i] = −(satisfied clause count of assignment i)`, so minimizing the
/// energy maximizes satisfaction. No ancillas involved.
pub fn maxsat_diagonal(f: &CnfFormula) -> Result<DiagonalObservable, ProblemError> {
    if f.n_vars > MAX_QUBITS {
        return Err(ProblemError::DiagonalTooLarge(f.n_vars));
    }
    Ok(DiagonalObservable::from_fn(f.n_vars, |i| {
        -(f.satisfied_count(&index_to_bits(i, f.n_vars)) as f64)
    })?)
}

/// MaxSAT as a QUBO for annealer-format interchange, clauses of ≤ 3 literals.
///
/// Energy at ancilla-optimal settings equals `−(satisfied clause count)`.
/// Each 3-literal clause contributes one ancilla variable `w = x_a·x_b`
/// (enforced by a penalty that any violation pays more than the clause could
/// gain); ancillas occupy indices `n_vars..`. Assignments are extended over
/// ancillas when evaluating: minimize over them or set `w = x_a·x_b` directly.
pub fn maxsat_objective(f: &CnfFormula) -> Result<QuboProblem, ProblemError> {
    let n = f.n_vars;
    // Deduplicate repeated literals per clause: (x ∨ x ∨ y) ≡ (x ∨ y).
    let deduped: Vec<Vec<i32>> = f
        .clauses
        .iter()
        .map(|cl| {
            let mut lits = cl.clone();
            lits.sort_unstable();
            lits.dedup();
            lits
        })
        .collect();
    let n_ancillas = deduped.iter().filter(|lits| lits.len() > 2).count();
    let mut q = QuboProblem::new(n + n_ancillas);
    let mut next_ancilla = n;

    for lits in &deduped {
        if lits.len() > 3 {
            return Err(ProblemError::ClauseTooWide(lits.len()));
        }

        // Unsatisfied indicator Π(1 − v_i) expanded into monomials over the
        // clause variables; v = x for a positive literal, 1 − x for negative,
        // so each factor is x or 1 − x. Represent a monomial set by indices.
        // The clause contributes −satisfied = (indicator − 1) to the energy.
        let factors: Vec<(usize, bool)> = lits
            .iter()
            .map(|&l| ((l.unsigned_abs() - 1) as usize, l > 0))
            .collect();
        // Expand Π f_i where f_i = (1 − x) for positive literals, x for negative.
        let mut monomials: Vec<(Vec<usize>, f64)> = vec![(vec![], 1.0)];
        for &(var, positive) in &factors {
            let mut expanded = Vec::with_capacity(monomials.len() * 2);
            for (vars, coef) in &monomials {
                if positive {
                    // 1 − x: constant copy and negated-with-var copy.
                    expanded.push((vars.clone(), *coef));
                    let mut with = vars.clone();
                    with.push(var);
                    expanded.push((with, -coef));
                } else {
                    let mut with = vars.clone();
                    with.push(var);
                    expanded.push((with, *coef));
                }
            }
            monomials = expanded;
        }

        // −satisfied = indicator − 1.
        q.add_offset(-1.0);
        let cubic_present = monomials.iter().any(|(vars, _)| vars.len() == 3);
        let ancilla = if cubic_present {
            let w = next_ancilla;
            next_ancilla += 1;
            // Pick the pair (a, b) = first two clause variables; enforce
            // w = x_a x_b with Rosenberg's penalty 2·(x_a x_b − 2w(x_a+x_b) + 3w),
            // which is 0 when consistent and ≥ 2 otherwise — more than the
            // single unit the cubic monomial could gain.
            let (a, b) = (factors[0].0, factors[1].0);
            q.add_interaction(a, b, 2.0);
            q.add_interaction(w, a, -4.0);
            q.add_interaction(w, b, -4.0);
            q.add_linear(w, 6.0);
            Some((w, a, b))
        } else {
            None
        };

        for (vars, coef) in monomials {
            match vars.len() {
                0 => q.add_offset(coef),
                1 => q.add_linear(vars[0], coef),
                2 => q.add_interaction(vars[0], vars[1], coef),
                3 => {
                    let (w, a, b) = ancilla.expect("ancilla allocated for cubic clause");
                    // Substitute x_a x_b → w; the third variable remains.
                    let c_var = *vars
                        .iter()
                        .find(|v| **v != a && **v != b)
                        .expect("cubic monomial has a third variable");
                    q.add_interaction(w, c_var, coef);
                }
                _ => unreachable!("clause width limited to 3"),
            }
        }
    }
    Ok(q)
}

/// Extends a base assignment over the ancillas of [`maxsat_objective`]
/// (setting each `w = x_a·x_b` is optimal, so this evaluates the true count).
pub fn maxsat_extend_assignment(f: &CnfFormula, bits: &[u8]) -> BitString {
    let mut full = bits.to_vec();
    for clause in &f.clauses {
        let mut lits = clause.clone();
        lits.sort_unstable();
        lits.dedup();
        if lits.len() > 2 {
            let a = (lits[0].unsigned_abs() - 1) as usize;
            let b = (lits[1].unsigned_abs() - 1) as usize;
            full.push(bits[a] & bits[b]);
        }
    }
    full
}

// ---------------------------------------------------------------------------
// Sherrington–Kirkpatrick spin glass
// ---------------------------------------------------------------------------

/// All-to-all couplings drawn i.i.d. standard normal and scaled by 1/√n; zero
/// local fields. Because the energy convention sums both orderings of each
/// pair, the objective is −(2/√n)·Σ_{i<k} a_ik σ_i σ_k — twice the textbook
/// cost, which leaves optima and approximation ratios untouched.
pub fn sherrington_kirkpatrick(n: usize, seed: u64) -> IsingHamiltonian {
    assert!(n >= 2, "a spin glass needs at least two spins");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let mut h = IsingHamiltonian::new(n);
    for i in 0..n {
        for k in (i + 1)..n {
            let draw: f64 = StandardNormal.sample(&mut rng);
            h.set_coupling(i, k, draw * scale);
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Binary paint shop
// ---------------------------------------------------------------------------

/// A manufacturing sequence of 2n car bodies in which every car appears
/// exactly twice and the two occurrences must receive different colors.
#[derive(Clone, Debug, PartialEq)]
pub struct PaintShopSequence {
    /// Car labels in canonical form: cars are numbered 0.. in order of first
    /// appearance.
    sequence: Vec<usize>,
    n_cars: usize,
}

impl PaintShopSequence {
    /// Accepts arbitrary labels and canonicalizes them by first appearance.
    pub fn new(raw: &[usize]) -> Result<Self, ProblemError> {
        let mut order: Vec<usize> = Vec::new();
        let mut sequence = Vec::with_capacity(raw.len());
        for &label in raw {
            let car = match order.iter().position(|&l| l == label) {
                Some(idx) => idx,
                None => {
                    order.push(label);
                    order.len() - 1
                }
            };
            sequence.push(car);
        }
        let n_cars = order.len();
        for (car, &label) in order.iter().enumerate() {
            let count = sequence.iter().filter(|&&c| c == car).count();
            if count != 2 {
                return Err(ProblemError::NotExactlyTwice(label));
            }
        }
        Ok(Self { sequence, n_cars })
    }

    /// Parses letter form, e.g. `"ABAB"`.
    pub fn from_letters(letters: &str) -> Result<Self, ProblemError> {
        let raw: Vec<usize> = letters.chars().map(|ch| ch as usize).collect();
        Self::new(&raw)
    }

    /// Random sequence on `n_cars` cars: a seeded shuffle of the multiset
    /// {0,0,1,1,…}.
    pub fn random(n_cars: usize, seed: u64) -> Self {
        let mut seq: Vec<usize> = (0..n_cars).flat_map(|c| [c, c]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..seq.len()).rev() {
            seq.swap(i, rng.gen_range(0..=i));
        }
        Self::new(&seq).expect("shuffled multiset keeps the exactly-twice property")
    }

    pub fn n_cars(&self) -> usize {
        self.n_cars
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Canonical car index at each position.
    pub fn cars(&self) -> &[usize] {
        &self.sequence
    }

    /// Paint color at every position given each car's first-occurrence color
    /// (`coloring[c]` ∈ {0,1}); second occurrences get the complement.
    pub fn position_colors(&self, coloring: &[u8]) -> Vec<u8> {
        let mut seen = vec![false; self.n_cars];
        self.sequence
            .iter()
            .map(|&car| {
                if seen[car] {
                    1 - coloring[car]
                } else {
                    seen[car] = true;
                    coloring[car]
                }
            })
            .collect()
    }

    /// Number of adjacent color changes under a coloring.
    pub fn change_count(&self, coloring: &[u8]) -> usize {
        let colors = self.position_colors(coloring);
        colors.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Paint shop as a QUBO over one variable per car (the color of its first
/// occurrence): `energy(coloring) = number of adjacent color changes`.
pub fn paintshop_qubo(s: &PaintShopSequence) -> QuboProblem {
    let mut q = QuboProblem::new(s.n_cars());
    // Position i's color is affine in its car variable: color = s·x + t with
    // (s, t) = (1, 0) at a first occurrence and (−1, 1) at the second.
    let mut seen = vec![false; s.n_cars()];
    let affine: Vec<(usize, f64, f64)> = s
        .cars()
        .iter()
        .map(|&car| {
            let st = if seen[car] { (-1.0, 1.0) } else { (1.0, 0.0) };
            seen[car] = true;
            (car, st.0, st.1)
        })
        .collect();
    // A change between adjacent positions is a + b − 2ab for binary colors
    // a, b; expand with a = s₁x + t₁, b = s₂y + t₂.
    for pair in affine.windows(2) {
        let (x, s1, t1) = pair[0];
        let (y, s2, t2) = pair[1];
        let quad = -2.0 * s1 * s2;
        let lin_x = s1 * (1.0 - 2.0 * t2);
        let lin_y = s2 * (1.0 - 2.0 * t1);
        let constant = t1 + t2 - 2.0 * t1 * t2;
        if x == y {
            // Same car twice in a row: x² = x folds into the linear term.
            q.add_linear(x, quad + lin_x + lin_y);
        } else {
            q.add_interaction(x, y, quad);
            q.add_linear(x, lin_x);
            q.add_linear(y, lin_y);
        }
        q.add_offset(constant);
    }
    q
}

// ---------------------------------------------------------------------------
// Travelling salesman (one-hot)
// ---------------------------------------------------------------------------

/// Cyclic TSP in the standard one-hot position×city encoding: variable
/// `p·n + c` means "position p holds city c". Feasible assignments (valid
/// permutations) have `energy = tour length`; the penalty (default
/// `2·n·max distance`, applied to the row/column one-hot constraints) makes
/// every infeasible assignment cost more than any tour.
///
/// `distances` is row-major n×n and must be symmetric; n ≤ 6 so the n²
/// variables stay within classical-solver reach (n ≤ 3 for 14-qubit quantum
/// backends).
pub fn tsp_qubo(
    distances: &[f64],
    n_cities: usize,
    penalty: Option<f64>,
) -> Result<QuboProblem, ProblemError> {
    if distances.len() != n_cities * n_cities {
        return Err(ProblemError::BadMatrixShape { len: distances.len(), n: n_cities });
    }
    if n_cities > 6 {
        return Err(ProblemError::TooManyCities { n: n_cities, vars: n_cities * n_cities });
    }
    for i in 0..n_cities {
        for j in (i + 1)..n_cities {
            let (a, b) = (distances[i * n_cities + j], distances[j * n_cities + i]);
            if (a - b).abs() > 1e-12 {
                return Err(ProblemError::NotSymmetric { i, j, a, b });
            }
        }
    }
    let max_d = distances.iter().copied().fold(0.0_f64, f64::max);
    let penalty = penalty.unwrap_or(2.0 * n_cities as f64 * max_d);
    let var = |p: usize, c: usize| p * n_cities + c;
    let mut q = QuboProblem::new(n_cities * n_cities);

    // Tour length: consecutive positions (cyclically) contribute d(c, c').
    for p in 0..n_cities {
        let p_next = (p + 1) % n_cities;
        for c in 0..n_cities {
            for c2 in 0..n_cities {
                if c != c2 {
                    let d = distances[c * n_cities + c2];
                    if d != 0.0 {
                        q.add_interaction(var(p, c), var(p_next, c2), d);
                    }
                }
            }
        }
    }

    // One-hot constraints: (Σx − 1)² = 2·Σ_{pairs} x x' − Σx + 1 per group.
    let mut add_one_hot = |vars: Vec<usize>| {
        for (idx, &v1) in vars.iter().enumerate() {
            q.add_linear(v1, -penalty);
            for &v2 in &vars[idx + 1..] {
                q.add_interaction(v1, v2, 2.0 * penalty);
            }
        }
        q.add_offset(penalty);
    };
    for p in 0..n_cities {
        add_one_hot((0..n_cities).map(|c| var(p, c)).collect());
    }
    for c in 0..n_cities {
        add_one_hot((0..n_cities).map(|p| var(p, c)).collect());
    }
    Ok(q)
}

/// Length of the cyclic tour visiting cities in `order`.
pub fn tour_length(distances: &[f64], n_cities: usize, order: &[usize]) -> f64 {
    (0..order.len())
        .map(|i| {
            let a = order[i];
            let b = order[(i + 1) % order.len()];
            distances[a * n_cities + b]
        })
        .sum()
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct QuboJson {
    n: usize,
    c: Vec<f64>,
    /// Sparse upper-triangular entries `[i, j, coefficient]` where
    /// `coefficient` is the full weight of the monomial x_i·x_j.
    q: Vec<(usize, usize, f64)>,
    offset: f64,
}

impl QuboProblem {
    /// Serializes to the interchange JSON
    /// `{n, c: [...], q: [[i, j, coeff], ...], offset}` with `q` listing
    /// upper-triangular monomial coefficients.
    pub fn to_json(&self) -> String {
        let mut entries = Vec::new();
        for i in 0..self.n_vars {
            for j in (i + 1)..self.n_vars {
                let coeff = 2.0 * self.quadratic(i, j);
                if coeff != 0.0 {
                    entries.push((i, j, coeff));
                }
            }
        }
        serde_json::to_string_pretty(&QuboJson {
            n: self.n_vars,
            c: self.c.clone(),
            q: entries,
            offset: self.offset,
        })
        .expect("QUBO JSON serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let parsed: QuboJson = serde_json::from_str(text)?;
        if parsed.c.len() != parsed.n {
            return Err(ProblemError::BadVectorLength { got: parsed.c.len(), want: parsed.n });
        }
        let mut q = QuboProblem::new(parsed.n);
        q.c = parsed.c;
        q.offset = parsed.offset;
        for (i, j, coeff) in parsed.q {
            if i >= parsed.n || j >= parsed.n {
                return Err(ProblemError::NodeOutOfRange {
                    node: i.max(j),
                    n_nodes: parsed.n,
                });
            }
            if i == j {
                return Err(ProblemError::NonzeroDiagonal(i));
            }
            q.add_interaction(i, j, coeff);
        }
        if !q.q.iter().chain(q.c.iter()).chain([&q.offset]).all(|v| v.is_finite()) {
            return Err(ProblemError::NonFiniteCoefficient);
        }
        Ok(q)
    }
}

/// Parses a whitespace-separated, 0-indexed edge list (`#` starts a comment).
/// Returns the edges and the node count (largest index + 1).
pub fn parse_edge_list(text: &str) -> Result<(Vec<(usize, usize)>, usize), ProblemError> {
    let mut tokens: Vec<usize> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            tokens.push(tok.parse().map_err(|e| ProblemError::Parse {
                line: lineno + 1,
                msg: format!("bad node index {tok:?}: {e}"),
            })?);
        }
    }
    if !tokens.len().is_multiple_of(2) {
        return Err(ProblemError::Parse {
            line: 0,
            msg: format!("odd token count {}: dangling endpoint", tokens.len()),
        });
    }
    let edges: Vec<(usize, usize)> = tokens.chunks(2).map(|p| (p[0], p[1])).collect();
    let n_nodes = edges
        .iter()
        .map(|&(u, v)| u.max(v) + 1)
        .max()
        .unwrap_or(0);
    Ok((edges, n_nodes))
}

/// Writes an edge list in the format accepted by [`parse_edge_list`].
pub fn format_edge_list(edges: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for &(u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
