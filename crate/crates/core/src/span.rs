//! The null-homology span program, its witness sizes, the dense Szegedy
//! workspace with its structural checks, and a classical simulation of the
//! phase-estimation evaluation with query accounting.

use std::cell::Cell;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chain::Chain;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::flow::{self, EnergyValue};
use crate::linalg;
use crate::snf::rat_to_f64;
use crate::spectra;
use crate::Rat;

/// Cap on the tensor-space dimension `n_{d-1} * n_d` of a workspace.
pub const TENSOR_CAP: usize = 4096;

/// Phase-estimation window multiplier: the window is this over
/// `sqrt(W+ W-)`. Calibrated once on the instance corpus so that negative
/// instances keep no mass in the window while positive instances retain
/// their `1/(1+R)` share.
pub const PRECISION_MULTIPLIER: f64 = 0.25;

/// Decision threshold as a fraction of the guaranteed positive overlap
/// `1/(1+W+)`; calibrated together with [`PRECISION_MULTIPLIER`].
pub const DECISION_FRACTION: f64 = 0.5;

/// The span program deciding null-homology of a fixed cycle over
/// subcomplexes selected by bitstrings.
pub struct SpanProgram {
    pub complex: SimplicialComplex,
    pub gamma: Chain,
    pub dimension: usize,
    /// Ordering of the `d`-simplices indexed by instance bits.
    pub cells: Vec<Simplex>,
}

/// Builds the program; the target cycle must be a `(d-1)`-cycle of `K`.
pub fn build_span_program(complex: &SimplicialComplex, gamma: &Chain) -> Result<SpanProgram> {
    for s in gamma.support() {
        if !complex.contains(s) {
            return Err(Error::Membership(format!("{:?} not in complex", s)));
        }
    }
    if gamma.dimension() >= 1 && !complex.apply_boundary(gamma)?.is_zero() {
        return Err(Error::Domain("target is not a cycle".into()));
    }
    let d = (gamma.dimension() + 1) as usize;
    Ok(SpanProgram {
        complex: complex.clone(),
        gamma: gamma.clone(),
        dimension: d,
        cells: complex.simplices(d),
    })
}

impl SpanProgram {
    /// The subcomplex selected by a bitstring: the full `(d-1)`-skeleton
    /// plus the chosen `d`-simplices.
    pub fn subcomplex(&self, x: &[bool]) -> Result<SimplicialComplex> {
        if x.len() != self.cells.len() {
            return Err(Error::Domain(format!(
                "instance length {} != n_d = {}",
                x.len(),
                self.cells.len()
            )));
        }
        let skeleton = self.complex.skeleton(self.dimension.saturating_sub(1));
        let chosen = self
            .cells
            .iter()
            .zip(x)
            .filter(|(_, &b)| b)
            .map(|(s, _)| s.clone());
        Ok(SimplicialComplex::from_simplex_set(
            skeleton.iter_all().cloned().chain(chosen),
        ))
    }

    /// Classical ground truth for an instance.
    pub fn decide_classically(&self, x: &[bool]) -> Result<bool> {
        flow::is_null_homologous(&self.subcomplex(x)?, &self.gamma)
    }
}

/// Positive and negative witness sizes of an instance: the effective
/// resistance in `K(x)` and the effective capacitance of `(K(x), K)`.
/// Exactly one is finite.
pub fn witness_sizes(
    program: &SpanProgram,
    x: &[bool],
) -> Result<(EnergyValue, EnergyValue)> {
    let sub = program.subcomplex(x)?;
    let r = flow::effective_resistance(&sub, &program.gamma)?;
    let c = flow::effective_capacitance(&sub, &program.complex, &program.gamma)?;
    if r.resistance.is_finite() == c.capacitance.is_finite() {
        return Err(Error::Numeric(
            "exactly one witness size must be finite".into(),
        ));
    }
    Ok((r.resistance, c.capacitance))
}

/// Dense Szegedy workspace on `C_{d-1} (x) C_d` with its verification
/// results.
pub struct SzegedyWorkspace {
    pub dimension: usize,
    /// Row basis: `(sigma, tau)` pairs flattened as `sigma * n_d + tau`.
    pub face_basis: Vec<Simplex>,
    pub cell_basis: Vec<Simplex>,
    /// Isometry spanning the boundary-like subspace B.
    pub boundary_isometry: DMatrix<f64>,
    /// Isometry spanning the coboundary-like subspace C (zero-degree faces
    /// excluded).
    pub coboundary_isometry: DMatrix<f64>,
    pub excluded_faces: Vec<Simplex>,
    /// The walk operator `U = R_C R_B`.
    pub walk: DMatrix<f64>,
    /// Singular values of `M_C^dagger M_B`.
    pub singular_values: Vec<f64>,
    /// Interior eigenphases of `U` (excluding the 0 and pi spaces), sorted.
    pub interior_phases: Vec<f64>,
    pub checks: Vec<spectra::IdentityCheck>,
    /// Phase gap of `-U`.
    pub reflection_phase_gap: f64,
    /// Qubits to hold the tensor space plus the phase register.
    pub qubit_estimate: u32,
}

fn reflection(pi: &DMatrix<f64>) -> DMatrix<f64> {
    let n = pi.nrows();
    2.0 * pi - DMatrix::identity(n, n)
}

/// Builds and verifies the workspace: `ker M_C^T M_B = ker d`, the
/// closed-form entries, the Szegedy eigenphase structure, the kernel
/// reflection, and the phase-gap bound.
pub fn build_szegedy_workspace(
    complex: &SimplicialComplex,
    gamma: &Chain,
) -> Result<SzegedyWorkspace> {
    let d = (gamma.dimension() + 1) as usize;
    let faces = complex.simplices(d - 1);
    let cells = complex.simplices(d);
    let (nf, nc) = (faces.len(), cells.len());
    if nf * nc > TENSOR_CAP {
        return Err(Error::Resource(format!(
            "tensor dimension {} exceeds cap {}",
            nf * nc,
            TENSOR_CAP
        )));
    }
    if nf == 0 || nc == 0 {
        return Err(Error::Domain("workspace needs simplices in both dimensions".into()));
    }
    let n = nf * nc;
    let idx = |i: usize, j: usize| i * nc + j;

    let boundary = complex.boundary_matrix(d)?;
    let bmat = boundary.to_f64();
    let weights: Vec<f64> = cells.iter().map(|s| rat_to_f64(&complex.weight(s))).collect();
    let degrees: Vec<f64> = faces.iter().map(|s| rat_to_f64(&complex.degree(s))).collect();
    let excluded: Vec<Simplex> = faces
        .iter()
        .zip(&degrees)
        .filter(|(_, &dg)| dg <= 0.0)
        .map(|(s, _)| s.clone())
        .collect();

    // M_B column per d-simplex: |d tau>|tau> / sqrt(d+1)
    let mut mb = DMatrix::zeros(n, nc);
    let scale = 1.0 / ((d as f64 + 1.0).sqrt());
    for (j, col) in (0..nc).map(|j| (j, boundary.column_entries(j))) {
        for &(i, s) in col {
            mb[(idx(i, j), j)] = s as f64 * scale;
        }
    }
    // M_C column per (d-1)-simplex of positive degree:
    // sum over cofacets tau of sqrt(w(tau)/deg(sigma)) |sigma>|tau>
    let kept: Vec<usize> = (0..nf).filter(|&i| degrees[i] > 0.0).collect();
    let mut mc = DMatrix::zeros(n, kept.len());
    for (cidx, &i) in kept.iter().enumerate() {
        for j in 0..nc {
            if bmat[(i, j)] != 0.0 {
                mc[(idx(i, j), cidx)] = (weights[j] / degrees[i]).sqrt();
            }
        }
    }

    let mut checks = Vec::new();

    // closed form: M_C^T M_B = (1/sqrt(d+1)) D^{-1/2} dB sqrt(W), entrywise
    let product = mc.transpose() * &mb;
    let mut max_err = 0.0f64;
    for (cidx, &i) in kept.iter().enumerate() {
        for j in 0..nc {
            let expect = scale * bmat[(i, j)] * weights[j].sqrt() / degrees[i].sqrt();
            max_err = max_err.max((product[(cidx, j)] - expect).abs());
        }
    }
    checks.push(spectra::IdentityCheck {
        name: "product_closed_form".into(),
        passed: max_err <= 1e-12,
        detail: format!("max entry error {:.3e}", max_err),
    });

    // kernel agreement: nullity of the product equals nullity of dB, the
    // latter exact over the rationals
    let svd_product = nalgebra::SVD::new(product.clone(), true, true);
    let smax = svd_product
        .singular_values
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let rank_tol = 1e-10 * smax.max(1.0);
    let rank_product = svd_product
        .singular_values
        .iter()
        .filter(|&&s| s > rank_tol)
        .count();
    let rank_exact = linalg::rank(&boundary.to_rational());
    checks.push(spectra::IdentityCheck {
        name: "kernel_matches_boundary_kernel".into(),
        passed: rank_product == rank_exact,
        detail: format!("rank {} vs exact {}", rank_product, rank_exact),
    });

    // the walk operator
    let rb = reflection(&(&mb * mb.transpose()));
    let rc = reflection(&(&mc * mc.transpose()));
    let walk = &rc * &rb;

    // eigenphase structure from the symmetric part: cos(phase) spectrum
    let sym = nalgebra::SymmetricEigen::new((&walk + walk.transpose()) * 0.5);
    let mut cosines: Vec<f64> = sym.eigenvalues.iter().cloned().collect();
    cosines.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let phase_tol = 1e-9;
    let interior_phases: Vec<f64> = {
        let mut p: Vec<f64> = cosines
            .iter()
            .filter(|&&c| c < 1.0 - phase_tol && c > -1.0 + phase_tol)
            .map(|&c| c.clamp(-1.0, 1.0).acos())
            .collect();
        p.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        p
    };
    let singular_values: Vec<f64> = svd_product.singular_values.iter().cloned().collect();
    // predicted interior phases: 2 arccos(sigma) twice per singular value
    // strictly inside (0, 1)
    let mut predicted: Vec<f64> = Vec::new();
    for &s in &singular_values {
        if s > phase_tol && s < 1.0 - phase_tol {
            let th = 2.0 * s.clamp(0.0, 1.0).acos();
            predicted.push(th);
            predicted.push(th);
        }
    }
    predicted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let phases_match = predicted.len() == interior_phases.len()
        && predicted
            .iter()
            .zip(&interior_phases)
            .all(|(a, b)| (a - b).abs() <= 1e-9);
    checks.push(spectra::IdentityCheck {
        name: "eigenphases_match_singular_values".into(),
        passed: phases_match,
        detail: format!(
            "{} interior phases vs {} predicted",
            interior_phases.len(),
            predicted.len()
        ),
    });

    // eigenspace dimensions per the two-reflection decomposition
    let dim_b = nc;
    let dim_c = kept.len();
    let mut concat = DMatrix::zeros(n, dim_b + dim_c);
    concat.view_mut((0, 0), (n, dim_b)).copy_from(&mb);
    concat.view_mut((0, dim_b), (n, dim_c)).copy_from(&mc);
    let rank_concat = float_rank(&concat);
    let plus_expected = (dim_b + dim_c - rank_concat) + (n - rank_concat);
    let minus_expected = (dim_b - rank_product) + (dim_c - rank_product);
    let plus_dim = cosines.iter().filter(|&&c| c >= 1.0 - phase_tol).count();
    let minus_dim = cosines.iter().filter(|&&c| c <= -1.0 + phase_tol).count();
    checks.push(spectra::IdentityCheck {
        name: "plus_minus_eigenspace_dimensions".into(),
        passed: plus_dim == plus_expected && minus_dim == minus_expected,
        detail: format!(
            "+1: {} vs {}, -1: {} vs {}",
            plus_dim, plus_expected, minus_dim, minus_expected
        ),
    });

    // kernel reflection: V = M_B^T R_{U-} M_B equals the reflection about
    // ker dB
    let minus_projector = eigenspace_projector(&walk, -1.0, 1e-7)?;
    let v = mb.transpose() * reflection(&minus_projector) * &mb;
    let kernel_projector = exact_kernel_projector(&boundary.to_rational())?;
    let r_ker = reflection(&kernel_projector);
    let v_err = (&v - &r_ker).norm();
    checks.push(spectra::IdentityCheck {
        name: "kernel_reflection".into(),
        passed: v_err <= 1e-8,
        detail: format!("|V - R_ker| = {:.3e}", v_err),
    });

    // phase gap of -U: distance of the spectrum from pi, excluding pi
    let reflection_phase_gap = interior_phases
        .iter()
        .map(|&p| std::f64::consts::PI - p)
        .fold(std::f64::consts::PI, f64::min);
    let sigma_min_nonzero = singular_values
        .iter()
        .cloned()
        .filter(|&s| s > phase_tol)
        .fold(f64::INFINITY, f64::min);
    if sigma_min_nonzero.is_finite() {
        checks.push(spectra::IdentityCheck {
            name: "phase_gap_lower_bound".into(),
            passed: reflection_phase_gap >= 2.0 * sigma_min_nonzero - 1e-9,
            detail: format!(
                "gap {} vs 2 sigma_min = {}",
                reflection_phase_gap,
                2.0 * sigma_min_nonzero
            ),
        });
        // and against the normalized Laplacian form 2 sqrt(lambda/(d+1))
        let norm_lap = spectra::laplacian(complex, d - 1, spectra::LaplacianKind::NormalizedUp)?;
        let rep = spectra::spectrum(&norm_lap, spectra::DEFAULT_ZERO_TOL)?;
        if let Some(lam) = rep.spectral_gap {
            let bound = 2.0 * (lam / (d as f64 + 1.0)).sqrt();
            checks.push(spectra::IdentityCheck {
                name: "phase_gap_vs_normalized_gap".into(),
                passed: reflection_phase_gap >= bound - 1e-7,
                detail: format!("gap {} vs 2 sqrt(gap/(d+1)) = {}", reflection_phase_gap, bound),
            });
        }
    }

    let qubit_estimate = (n as f64).log2().ceil() as u32;
    Ok(SzegedyWorkspace {
        dimension: d,
        face_basis: faces,
        cell_basis: cells,
        boundary_isometry: mb,
        coboundary_isometry: mc,
        excluded_faces: excluded,
        walk,
        singular_values,
        interior_phases,
        checks,
        reflection_phase_gap,
        qubit_estimate,
    })
}

fn float_rank(m: &DMatrix<f64>) -> usize {
    let svd = nalgebra::SVD::new(m.clone(), false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-10 * smax.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}

/// Projector onto the eigenspace of an orthogonal matrix at `value` by
/// nullspace extraction from `U - value I`.
fn eigenspace_projector(u: &DMatrix<f64>, value: f64, tol: f64) -> Result<DMatrix<f64>> {
    let n = u.nrows();
    let shifted = u - DMatrix::identity(n, n) * value;
    let svd = nalgebra::SVD::new(shifted, false, true);
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Numeric("svd failed".into()))?;
    let mut proj = DMatrix::zeros(n, n);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            let row = vt.row(k);
            for i in 0..n {
                for j in 0..n {
                    proj[(i, j)] += row[i] * row[j];
                }
            }
        }
    }
    Ok(proj)
}

/// Exact rational projector onto the kernel of a matrix, floated at the
/// end: `N (N^T N)^{-1} N^T` over a kernel basis `N`.
fn exact_kernel_projector(a: &linalg::RatMat) -> Result<DMatrix<f64>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let basis = linalg::nullspace(a);
    let mut proj = DMatrix::zeros(cols, cols);
    if basis.is_empty() {
        return Ok(proj);
    }
    let k = basis.len();
    let mut gram = linalg::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = linalg::dot(&basis[i], &basis[j]);
        }
    }
    // G^-1 N^T solved exactly column by column, then N times that
    let mut gi_nt = linalg::zeros(k, cols);
    for c in 0..cols {
        let rhs: Vec<Rat> = (0..k).map(|r| basis[r][c].clone()).collect();
        let col = linalg::solve(&gram, &rhs)
            .ok_or_else(|| Error::Numeric("gram matrix singular".into()))?;
        for r in 0..k {
            gi_nt[r][c] = col[r].clone();
        }
    }
    for i in 0..cols {
        for j in 0..cols {
            let mut acc = Rat::from_integer(0.into());
            for r in 0..k {
                acc += &basis[r][i] * &gi_nt[r][j];
            }
            proj[(i, j)] = rat_to_f64(&acc);
        }
    }
    Ok(proj)
}

/// Accounting record for one simulated evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct EvaluationRecord {
    pub decision: bool,
    pub zero_phase_overlap: f64,
    pub precision: f64,
    /// Walk-operator applications charged for the phase estimation.
    pub walk_applications: u64,
    /// Input-oracle queries: two per membership reflection.
    pub input_oracle_queries: u64,
    /// Incidence-array queries charged through the oracle model.
    pub incidence_queries: u64,
    /// Amplitude-amplification rounds for the initial state.
    pub amplification_rounds: u64,
    pub qubit_estimate: u32,
    /// Sampled measurement transcript (seed-dependent, decision is not).
    pub sampled_hits: u64,
    pub repetitions: u64,
}

/// Exact initial state `w0 = pinv(dB) gamma` with the appended-column
/// construction; returns the state, `R = |w0|^2`, and the norm of the
/// extended state, all exact.
pub struct InitialState {
    pub state: Chain,
    pub resistance: Rat,
    /// `|w0'|^2` for the extended matrix `[dB | gamma]`.
    pub extended_norm_sq: Rat,
    pub amplification_rounds: u64,
}

pub fn prepare_initial_state(
    complex: &SimplicialComplex,
    gamma: &Chain,
) -> Result<InitialState> {
    if !flow::is_null_homologous(complex, gamma)? {
        return Err(Error::Domain(
            "initial state requires a null-homologous cycle".into(),
        ));
    }
    let d = (gamma.dimension() + 1) as usize;
    let b = complex.boundary_matrix(d)?;
    let a = b.to_rational();
    let rhs = gamma.to_vector(b.row_simplices());
    let w0 = linalg::min_norm_solution(&a, &rhs)
        .ok_or_else(|| Error::Numeric("no preimage for a null-homologous cycle".into()))?;
    let resistance: Rat = w0.iter().map(|x| x * x).sum();

    // extended matrix with the cycle as an extra column
    let mut ext = a.clone();
    for (i, row) in ext.iter_mut().enumerate() {
        row.push(rhs[i].clone());
    }
    let w0_ext = linalg::min_norm_solution(&ext, &rhs)
        .ok_or_else(|| Error::Numeric("extended system inconsistent".into()))?;
    let extended_norm_sq: Rat = w0_ext.iter().map(|x| x * x).sum();

    let r = rat_to_f64(&resistance);
    let amplification_rounds = (r.sqrt() + (1.0 / r.max(f64::MIN_POSITIVE)).sqrt()).ceil() as u64;
    Ok(InitialState {
        state: Chain::from_vector(b.col_simplices(), &w0, d as i64),
        resistance,
        extended_norm_sq,
        amplification_rounds,
    })
}

/// Query-counted functional simulators for the input oracles.
pub struct OracleModels {
    pub complex: SimplicialComplex,
    pub dimension: usize,
    list_queries: Cell<u64>,
    membership_queries: Cell<u64>,
    down_incidence_queries: Cell<u64>,
    up_incidence_queries: Cell<u64>,
}

impl OracleModels {
    pub fn new(complex: &SimplicialComplex, d: usize) -> Self {
        Self {
            complex: complex.clone(),
            dimension: d,
            list_queries: Cell::new(0),
            membership_queries: Cell::new(0),
            down_incidence_queries: Cell::new(0),
            up_incidence_queries: Cell::new(0),
        }
    }

    /// `i -> sigma_i` in the canonical order.
    pub fn list_oracle(&self, i: usize) -> Option<Simplex> {
        self.list_queries.set(self.list_queries.get() + 1);
        self.complex.simplices(self.dimension).get(i).cloned()
    }

    pub fn membership_oracle(&self, s: &Simplex) -> bool {
        self.membership_queries.set(self.membership_queries.get() + 1);
        self.complex.contains(s)
    }

    /// `(tau, j) -> (tau minus its j-th vertex, (-1)^j)`.
    pub fn down_incidence(&self, tau: &Simplex, j: usize) -> Option<(Simplex, i64)> {
        self.down_incidence_queries
            .set(self.down_incidence_queries.get() + 1);
        if j > tau.dimension() {
            return None;
        }
        Some((tau.facet(j), if j % 2 == 0 { 1 } else { -1 }))
    }

    /// `(sigma, j) -> j`-th cofacet of `sigma` in canonical order.
    pub fn up_incidence(&self, sigma: &Simplex, j: usize) -> Option<Simplex> {
        self.up_incidence_queries
            .set(self.up_incidence_queries.get() + 1);
        self.complex.cofacets(sigma).get(j).cloned()
    }

    /// Superposition-preparation charge over `m` items.
    pub fn superposition_charge(m: usize) -> u64 {
        (m as f64).sqrt().ceil() as u64
    }

    /// Down-incidence queries charged per boundary-isometry application.
    pub fn boundary_isometry_charge(&self) -> u64 {
        Self::superposition_charge(self.dimension + 1)
    }

    /// Up-incidence queries charged per coboundary-isometry application
    /// (unweighted rule).
    pub fn coboundary_isometry_charge(&self) -> u64 {
        let d_max = self
            .complex
            .simplices(self.dimension - 1)
            .iter()
            .map(|s| self.complex.cofacets(s).len())
            .max()
            .unwrap_or(0);
        Self::superposition_charge(d_max)
    }

    pub fn tallies(&self) -> (u64, u64, u64, u64) {
        (
            self.list_queries.get(),
            self.membership_queries.get(),
            self.down_incidence_queries.get(),
            self.up_incidence_queries.get(),
        )
    }
}

/// Simulates the span-program evaluation on one instance by exact
/// eigenstructure. A phantom cell with the target cycle as its boundary is
/// appended to the boundary matrix; the initial state is that cell's basis
/// vector and the walk operator is the membership reflection (phantom cell
/// always present) times the reflection through the kernel of the extended
/// matrix. Positive instances keep squared overlap at least `1/(1+R_x)`
/// with the zero-phase space (the minimum-energy cycle through the phantom
/// cell); negative instances keep no mass inside the phase window. The
/// decision thresholds the windowed overlap at [`DECISION_FRACTION`] of
/// `1/(1+W+)`; seeds only vary the sampled measurement transcript.
pub fn simulate_evaluation(
    program: &SpanProgram,
    x: &[bool],
    error_budget: f64,
    seed: u64,
) -> Result<(bool, EvaluationRecord)> {
    use rand::Rng;
    use rand::SeedableRng;
    if !(0.0..1.0).contains(&error_budget) || error_budget <= 0.0 {
        return Err(Error::Domain("error budget must be in (0, 1)".into()));
    }
    let d = program.dimension;
    let n_d = program.cells.len();
    if x.len() != n_d {
        return Err(Error::Domain("instance length mismatch".into()));
    }

    // witness-size bounds: exhaustive for small programs
    let (w_plus, w_minus) = if n_d <= 10 {
        max_witness_sizes(program)?
    } else {
        (None, None)
    };
    let w_plus = w_plus.unwrap_or(1.0).max(1.0);
    let w_minus = w_minus.unwrap_or(1.0).max(1.0);
    let precision = PRECISION_MULTIPLIER / (w_plus * w_minus).sqrt();
    if precision < 1e-14 {
        return Err(Error::Resource(
            "phase-estimation precision underflows the float backend".into(),
        ));
    }

    // the initial-state preparation accounting for the full program
    let init = prepare_initial_state(&program.complex, &program.gamma)?;

    // extended boundary matrix with the phantom column
    let b = program.complex.boundary_matrix(d)?;
    let mut ext = b.to_rational();
    let rhs = program.gamma.to_vector(b.row_simplices());
    for (i, row) in ext.iter_mut().enumerate() {
        row.push(rhs[i].clone());
    }
    let kernel_proj = exact_kernel_projector(&ext)?;
    let n = n_d + 1;
    let mut u = 2.0 * &kernel_proj - DMatrix::identity(n, n);
    // membership reflection: negate rows of absent cells (the phantom cell
    // is always present)
    for (j, &bit) in x.iter().enumerate() {
        if !bit {
            for i in 0..n {
                u[(j, i)] = -u[(j, i)];
            }
        }
    }
    let mut w0 = DVector::zeros(n);
    w0[n - 1] = 1.0;

    // squared overlap with the small-phase invariant subspace, via the
    // singular subspaces of U - I (sigma = 2 |sin(phase/2)|)
    let shifted = &u - DMatrix::identity(n, n);
    let svd = nalgebra::SVD::new(shifted, false, true);
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Numeric("svd failed".into()))?;
    let window = 2.0 * (precision / 2.0).sin();
    let mut overlap = 0.0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= window {
            let c = vt.row(k).transpose().dot(&w0);
            overlap += c * c;
        }
    }
    let threshold = DECISION_FRACTION / (1.0 + w_plus);
    let decision = overlap >= threshold;

    // accounting
    let repetitions = (1.0 / error_budget).log2().ceil().max(1.0) as u64;
    let walk_applications = (1.0 / precision).ceil() as u64 * repetitions;
    let oracles = OracleModels::new(&program.complex, d);
    let incidence_per_walk =
        oracles.boundary_isometry_charge() + oracles.coboundary_isometry_charge();
    let record = EvaluationRecord {
        decision,
        zero_phase_overlap: overlap,
        precision,
        walk_applications,
        input_oracle_queries: 2 * walk_applications,
        incidence_queries: walk_applications * incidence_per_walk,
        amplification_rounds: init.amplification_rounds,
        qubit_estimate: ((program.complex.count(d - 1).max(1) * n_d.max(1)) as f64)
            .log2()
            .ceil() as u32
            + (1.0 / precision).log2().ceil() as u32,
        sampled_hits: {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..repetitions)
                .filter(|_| rng.gen_bool(overlap.clamp(0.0, 1.0)))
                .count() as u64
        },
        repetitions,
    };
    Ok((decision, record))
}

/// Null-homology tester backed by the simulated span-program evaluation.
///
/// The cycle handed over by the incremental algorithm is the boundary of a
/// simplex outside the prefix complex; the program is built over the
/// prefix extended by that simplex, with the instance bit for it off, so
/// the target is always null-homologous in the program complex.
pub struct SpanSimTester {
    pub error_budget: f64,
    pub seed: u64,
    /// Largest prefix (cell count) the dense simulation accepts.
    pub cell_cap: usize,
}

impl Default for SpanSimTester {
    fn default() -> Self {
        Self {
            error_budget: 0.01,
            seed: 0,
            cell_cap: 10,
        }
    }
}

impl crate::betti::NullHomologyTester for SpanSimTester {
    fn id(&self) -> &'static str {
        "span-sim"
    }

    fn test(
        &self,
        prefix: &SimplicialComplex,
        gamma: &Chain,
    ) -> Result<crate::betti::TesterOutcome> {
        if gamma.is_zero() {
            return Ok(crate::betti::TesterOutcome {
                null_homologous: true,
                simulated_queries: 0,
            });
        }
        // reconstruct the simplex whose boundary the cycle is
        let mut verts: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
        for s in gamma.support() {
            verts.extend(s.vertices().iter().copied());
        }
        let sigma = Simplex::new(verts.iter().copied())?;
        if sigma.dimension() as i64 != gamma.dimension() + 1 {
            return Err(Error::Domain(
                "span tester expects the boundary of a single simplex".into(),
            ));
        }
        let extended = SimplicialComplex::from_simplex_set(
            prefix.iter_all().cloned().chain(std::iter::once(sigma.clone())),
        );
        let program = build_span_program(&extended, gamma)?;
        if program.cells.len() > self.cell_cap {
            return Err(Error::Resource(format!(
                "span tester cap: {} cells > {}",
                program.cells.len(),
                self.cell_cap
            )));
        }
        let x: Vec<bool> = program.cells.iter().map(|c| *c != sigma).collect();
        let (decision, record) = simulate_evaluation(&program, &x, self.error_budget, self.seed)?;
        Ok(crate::betti::TesterOutcome {
            null_homologous: decision,
            simulated_queries: record.input_oracle_queries + record.incidence_queries,
        })
    }
}

/// Maximum finite witness sizes over all instances (exhaustive; programs
/// with more than 10 cells are rejected).
pub fn max_witness_sizes(program: &SpanProgram) -> Result<(Option<f64>, Option<f64>)> {
    let n_d = program.cells.len();
    if n_d > 10 {
        return Err(Error::Resource("exhaustive witness scan capped at 10 cells".into()));
    }
    let mut w_plus: Option<f64> = None;
    let mut w_minus: Option<f64> = None;
    for mask in 0..(1u32 << n_d) {
        let x: Vec<bool> = (0..n_d).map(|i| mask & (1 << i) != 0).collect();
        let (wp, wm) = witness_sizes(program, &x)?;
        if let Some(v) = wp.to_f64() {
            w_plus = Some(w_plus.map_or(v, |p: f64| p.max(v)));
        }
        if let Some(v) = wm.to_f64() {
            w_minus = Some(w_minus.map_or(v, |p: f64| p.max(v)));
        }
    }
    Ok((w_plus, w_minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn boundary_of(verts: &[usize]) -> Chain {
        let s = Simplex::new(verts.iter().copied()).unwrap();
        let mut c = Chain::zero(s.dimension() as i64 - 1);
        for (f, sign) in s.boundary_faces() {
            c.add_term(f, rat(sign));
        }
        c
    }

    fn tetra_boundary() -> SimplicialComplex {
        SimplicialComplex::build(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn closed_triangle_instances() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let gamma = boundary_of(&[0, 1, 2]);
        let p = build_span_program(&k, &gamma).unwrap();
        assert!(p.decide_classically(&[true]).unwrap());
        assert!(!p.decide_classically(&[false]).unwrap());
        let (wp, wm) = witness_sizes(&p, &[true]).unwrap();
        assert_eq!(wp.exact(), Some(&rat(1)));
        assert_eq!(wm, EnergyValue::Infinite);
    }

    #[test]
    fn sphere_witness_sizes() {
        let k = tetra_boundary();
        let gamma = boundary_of(&[0, 1, 2]);
        let p = build_span_program(&k, &gamma).unwrap();
        let (wp, wm) = witness_sizes(&p, &[true; 4]).unwrap();
        assert_eq!(wp.exact(), Some(&Rat::new(3.into(), 4.into())));
        assert_eq!(wm, EnergyValue::Infinite);
        // dropping every triangle leaves a negative instance
        let (wp0, wm0) = witness_sizes(&p, &[false; 4]).unwrap();
        assert_eq!(wp0, EnergyValue::Infinite);
        assert!(wm0.is_finite());
    }

    #[test]
    fn initial_state_norm_identity() {
        let k = tetra_boundary();
        let gamma = boundary_of(&[0, 1, 2]);
        let init = prepare_initial_state(&k, &gamma).unwrap();
        // R = 3/4 so |w0'|^2 = R/(R+1) = 3/7
        assert_eq!(init.resistance, Rat::new(3.into(), 4.into()));
        assert_eq!(init.extended_norm_sq, Rat::new(3.into(), 7.into()));
    }

    #[test]
    fn workspace_checks_pass_on_sphere() {
        let k = tetra_boundary();
        let gamma = boundary_of(&[0, 1, 2]);
        let ws = build_szegedy_workspace(&k, &gamma).unwrap();
        for c in &ws.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn workspace_checks_pass_on_triangle() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2]], None).unwrap();
        let gamma = boundary_of(&[0, 1, 2]);
        let ws = build_szegedy_workspace(&k, &gamma).unwrap();
        for c in &ws.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn simulated_decisions_match_classical_on_sphere() {
        let k = tetra_boundary();
        let gamma = boundary_of(&[0, 1, 2]);
        let p = build_span_program(&k, &gamma).unwrap();
        for mask in 0..16u32 {
            let x: Vec<bool> = (0..4).map(|i| mask & (1 << i) != 0).collect();
            let truth = p.decide_classically(&x).unwrap();
            let (decision, record) = simulate_evaluation(&p, &x, 0.01, 7).unwrap();
            assert_eq!(decision, truth, "mask {:04b}, record {:?}", mask, record);
        }
    }

    #[test]
    fn oracle_models_count_queries() {
        let k = tetra_boundary();
        let o = OracleModels::new(&k, 2);
        let s = o.list_oracle(0).unwrap();
        assert_eq!(s.dimension(), 2);
        assert!(o.membership_oracle(&s));
        let (f, sign) = o.down_incidence(&s, 1).unwrap();
        assert_eq!(f.dimension(), 1);
        assert_eq!(sign, -1);
        let edge = Simplex::new([0, 1]).unwrap();
        assert!(o.up_incidence(&edge, 0).is_some());
        assert_eq!(o.tallies(), (1, 1, 1, 1));
    }
}
