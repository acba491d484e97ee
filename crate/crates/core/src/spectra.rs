//! Laplacian variants, dense symmetric spectra, Betti numbers via the
//! harmonic kernel, and verifiers for the spectral identities.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::snf::rat_to_f64;

/// Desk-scale cap on the matrix side length for dense eigensolves.
pub const DENSE_CAP: usize = 2000;

/// Default relative zero threshold for separating harmonic eigenvalues.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LaplacianKind {
    Up,
    Down,
    Combinatorial,
    WeightedUp,
    NormalizedUp,
}

/// Dense symmetric Laplacian with provenance.
#[derive(Clone, Debug)]
pub struct LaplacianMatrix {
    pub kind: LaplacianKind,
    pub dimension: usize,
    pub matrix: DMatrix<f64>,
    /// Basis simplices indexing rows/columns (zero-degree simplices are
    /// excluded for the normalized kind and listed separately).
    pub basis: Vec<Simplex>,
    pub excluded_zero_degree: Vec<Simplex>,
    /// Degrees of the basis simplices (normalized kind only).
    pub degrees: Option<Vec<f64>>,
}

/// Assembles the requested Laplacian of `K` at dimension `d`.
pub fn laplacian(
    complex: &SimplicialComplex,
    d: usize,
    kind: LaplacianKind,
) -> Result<LaplacianMatrix> {
    if kind == LaplacianKind::Down && d == 0 {
        return Err(Error::Domain("down Laplacian requires d >= 1".into()));
    }
    let n = complex.count(d);
    if n > DENSE_CAP {
        return Err(Error::Resource(format!(
            "n_d = {} exceeds the dense eigensolve cap {}",
            n, DENSE_CAP
        )));
    }
    let basis = complex.simplices(d);
    let up = |weighted: bool| -> DMatrix<f64> {
        if complex.count(d + 1) == 0 {
            return DMatrix::zeros(n, n);
        }
        let b = complex
            .boundary_matrix(d + 1)
            .expect("d+1 within range")
            .to_f64();
        if weighted {
            let w = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                complex.count(d + 1),
                complex
                    .simplices(d + 1)
                    .iter()
                    .map(|s| rat_to_f64(&complex.weight(s))),
            ));
            &b * w * b.transpose()
        } else {
            &b * b.transpose()
        }
    };
    let down = || -> DMatrix<f64> {
        if d == 0 || n == 0 {
            return DMatrix::zeros(n, n);
        }
        let b = complex.boundary_matrix(d).expect("d within range").to_f64();
        b.transpose() * b
    };

    let matrix = match kind {
        LaplacianKind::Up => up(false),
        LaplacianKind::WeightedUp => up(true),
        LaplacianKind::Down => down(),
        LaplacianKind::Combinatorial => up(false) + down(),
        LaplacianKind::NormalizedUp => {
            let degrees: Vec<f64> = basis.iter().map(|s| rat_to_f64(&complex.degree(s))).collect();
            let keep: Vec<usize> = (0..n).filter(|&i| degrees[i] > 0.0).collect();
            let excluded: Vec<Simplex> = (0..n)
                .filter(|&i| degrees[i] <= 0.0)
                .map(|i| basis[i].clone())
                .collect();
            let lw = up(true);
            let m = keep.len();
            let mut out = DMatrix::zeros(m, m);
            for (a, &i) in keep.iter().enumerate() {
                for (b, &j) in keep.iter().enumerate() {
                    out[(a, b)] = lw[(i, j)] / (degrees[i].sqrt() * degrees[j].sqrt());
                }
            }
            let kept_basis: Vec<Simplex> = keep.iter().map(|&i| basis[i].clone()).collect();
            let kept_deg: Vec<f64> = keep.iter().map(|&i| degrees[i]).collect();
            return Ok(LaplacianMatrix {
                kind,
                dimension: d,
                matrix: out,
                basis: kept_basis,
                excluded_zero_degree: excluded,
                degrees: Some(kept_deg),
            });
        }
    };
    Ok(LaplacianMatrix {
        kind,
        dimension: d,
        matrix,
        basis,
        excluded_zero_degree: Vec::new(),
        degrees: None,
    })
}

/// Eigenvalue summary of a Laplacian.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub zero_threshold: f64,
    /// Smallest eigenvalue above the threshold; `None` for a zero matrix.
    pub spectral_gap: Option<f64>,
    pub lambda_max: f64,
    pub harmonic_dimension: usize,
    /// Betti number; populated when the input is a combinatorial Laplacian.
    pub betti: Option<usize>,
    /// Largest eigenpair residual observed, as a solver health indicator.
    pub max_residual: f64,
    /// Set when eigenvalues crowd the threshold within a factor of 10.
    pub ill_conditioned: bool,
}

/// Dense symmetric eigendecomposition with a relative zero threshold.
pub fn spectrum(m: &LaplacianMatrix, zero_tol: f64) -> Result<SpectralReport> {
    let n = m.matrix.nrows();
    if n == 0 {
        return Ok(SpectralReport {
            eigenvalues: Vec::new(),
            zero_threshold: 0.0,
            spectral_gap: None,
            lambda_max: 0.0,
            harmonic_dimension: 0,
            betti: None,
            max_residual: 0.0,
            ill_conditioned: false,
        });
    }
    for x in m.matrix.iter() {
        if !x.is_finite() {
            return Err(Error::Numeric("non-finite entry in Laplacian".into()));
        }
    }
    let sym = nalgebra::SymmetricEigen::new(m.matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sym.eigenvalues[a]
            .partial_cmp(&sym.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let lambda_max = *eigenvalues.last().expect("nonempty");
    let threshold = zero_tol * lambda_max.max(1.0);

    let mut max_residual = 0.0f64;
    let norm = m.matrix.norm();
    for &i in &order {
        let v = sym.eigenvectors.column(i);
        let r = (&m.matrix * v - sym.eigenvalues[i] * v).norm();
        max_residual = max_residual.max(if norm > 0.0 { r / norm } else { r });
    }

    let harmonic_dimension = eigenvalues.iter().filter(|&&x| x <= threshold).count();
    let spectral_gap = eigenvalues.iter().copied().find(|&x| x > threshold);
    let ill_conditioned = eigenvalues
        .iter()
        .any(|&x| x > threshold && x < threshold * 10.0);
    Ok(SpectralReport {
        eigenvalues,
        zero_threshold: threshold,
        spectral_gap,
        lambda_max,
        harmonic_dimension,
        betti: None,
        max_residual,
        ill_conditioned,
    })
}

/// Betti number from the harmonic kernel of the combinatorial Laplacian.
pub fn betti_via_hodge(complex: &SimplicialComplex, d: usize, zero_tol: f64) -> Result<usize> {
    if complex.count(d) == 0 {
        return Ok(0);
    }
    let l = laplacian(complex, d, LaplacianKind::Combinatorial)?;
    let report = spectrum(&l, zero_tol)?;
    Ok(report.harmonic_dimension)
}

/// Nonzero part of a spectrum at the report's own threshold.
pub fn nonzero_spectrum(report: &SpectralReport) -> Vec<f64> {
    report
        .eigenvalues
        .iter()
        .copied()
        .filter(|&x| x > report.zero_threshold)
        .collect()
}

fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks the stated spectral identities at dimension `d`:
/// up/down nonzero-spectrum equality one dimension apart, the combinatorial
/// gap as the min of the up/down gaps, the normalized-vs-unnormalized gap
/// sandwich (skipped with reason when some `d`-simplex has zero degree),
/// and the `lambda_max <= n_0` ceiling.
pub fn verify_spectrum_identities(complex: &SimplicialComplex, d: usize) -> Result<IdentityReport> {
    let tol = 1e-8;
    let mut checks = Vec::new();

    // (i) spec_NZ(L^up_d) = spec_NZ(L^down_{d+1})
    let up_d = spectrum(&laplacian(complex, d, LaplacianKind::Up)?, DEFAULT_ZERO_TOL)?;
    let down_next = spectrum(
        &laplacian(complex, d + 1, LaplacianKind::Down)?,
        DEFAULT_ZERO_TOL,
    )?;
    let a = nonzero_spectrum(&up_d);
    let b = nonzero_spectrum(&down_next);
    let scale = up_d.lambda_max.max(down_next.lambda_max).max(1.0);
    checks.push(IdentityCheck {
        name: "up_down_nonzero_spectrum".into(),
        passed: multiset_close(&a, &b, tol * scale),
        detail: format!("{} vs {} nonzero eigenvalues", a.len(), b.len()),
    });

    // (ii) combinatorial gap = min of up and down gaps
    let comb = spectrum(
        &laplacian(complex, d, LaplacianKind::Combinatorial)?,
        DEFAULT_ZERO_TOL,
    )?;
    let up_gap = up_d.spectral_gap;
    let down_gap = if d >= 1 {
        spectrum(&laplacian(complex, d, LaplacianKind::Down)?, DEFAULT_ZERO_TOL)?.spectral_gap
    } else {
        None
    };
    let expected = match (up_gap, down_gap) {
        (Some(u), Some(w)) => Some(u.min(w)),
        (Some(u), None) => Some(u),
        (None, Some(w)) => Some(w),
        (None, None) => None,
    };
    let passed = match (comb.spectral_gap, expected) {
        (Some(g), Some(e)) => (g - e).abs() <= tol * e.abs().max(1.0),
        (None, None) => true,
        _ => false,
    };
    checks.push(IdentityCheck {
        name: "combinatorial_gap_min_up_down".into(),
        passed,
        detail: format!("gap {:?} expected {:?}", comb.spectral_gap, expected),
    });

    // (iii) normalized sandwich: gap(up)/d_max <= gap(normalized) <= gap(up)/d_min
    let degrees: Vec<f64> = complex
        .simplices(d)
        .iter()
        .map(|s| rat_to_f64(&complex.degree(s)))
        .collect();
    let d_min = degrees.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = degrees.iter().copied().fold(0.0, f64::max);
    if degrees.is_empty() || d_min <= 0.0 {
        checks.push(IdentityCheck {
            name: "normalized_gap_sandwich".into(),
            passed: true,
            detail: "skipped: a d-simplex has zero degree (hypothesis d_min > 0 fails)".into(),
        });
    } else {
        let norm = spectrum(
            &laplacian(complex, d, LaplacianKind::NormalizedUp)?,
            DEFAULT_ZERO_TOL,
        )?;
        match (up_d.spectral_gap, norm.spectral_gap) {
            (Some(u), Some(g)) => {
                let lo = u / d_max;
                let hi = u / d_min;
                let pad = tol * hi.abs().max(1.0);
                checks.push(IdentityCheck {
                    name: "normalized_gap_sandwich".into(),
                    passed: g >= lo - pad && g <= hi + pad,
                    detail: format!("{} <= {} <= {}", lo, g, hi),
                });
            }
            (None, None) => checks.push(IdentityCheck {
                name: "normalized_gap_sandwich".into(),
                passed: true,
                detail: "both spectra are identically zero".into(),
            }),
            (u, g) => checks.push(IdentityCheck {
                name: "normalized_gap_sandwich".into(),
                passed: false,
                detail: format!("gap presence mismatch: up {:?} normalized {:?}", u, g),
            }),
        }
    }

    // (iv) lambda_max(L_d) <= n_0
    checks.push(IdentityCheck {
        name: "lambda_max_at_most_n0".into(),
        passed: comb.lambda_max <= complex.vertex_count() as f64 + tol,
        detail: format!(
            "lambda_max = {} vs n_0 = {}",
            comb.lambda_max,
            complex.vertex_count()
        ),
    });

    Ok(IdentityReport { checks })
}

/// Compares the nonzero spectrum of a disjoint union with the multiset
/// union of the component spectra.
pub fn union_spectrum_check(
    parts: &[&SimplicialComplex],
    union: &SimplicialComplex,
    d: usize,
    tol: f64,
) -> Result<bool> {
    let mut merged: Vec<f64> = Vec::new();
    for k in parts {
        let rep = spectrum(&laplacian(k, d, LaplacianKind::Combinatorial)?, DEFAULT_ZERO_TOL)?;
        merged.extend(nonzero_spectrum(&rep));
    }
    merged.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let rep = spectrum(
        &laplacian(union, d, LaplacianKind::Combinatorial)?,
        DEFAULT_ZERO_TOL,
    )?;
    let full = nonzero_spectrum(&rep);
    let scale = rep.lambda_max.max(1.0);
    Ok(multiset_close(&merged, &full, tol * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_graph() -> SimplicialComplex {
        SimplicialComplex::build(&[vec![0, 1], vec![0, 2], vec![1, 2]], None).unwrap()
    }

    fn tetra_boundary() -> SimplicialComplex {
        SimplicialComplex::build(
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn complete_graph_laplacian() {
        let k3 = triangle_graph();
        let l = laplacian(&k3, 0, LaplacianKind::Up).unwrap();
        for i in 0..3 {
            assert_eq!(l.matrix[(i, i)], 2.0);
        }
        let rep = spectrum(&l, DEFAULT_ZERO_TOL).unwrap();
        // complete-graph oracle: eigenvalues {0, 3, 3}
        assert!(rep.eigenvalues[0].abs() < 1e-9);
        assert!((rep.eigenvalues[1] - 3.0).abs() < 1e-9);
        assert!((rep.eigenvalues[2] - 3.0).abs() < 1e-9);
        assert_eq!(rep.spectral_gap.map(|g| g.round() as i64), Some(3));
    }

    #[test]
    fn combinatorial_is_up_plus_down() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2, 3]], None).unwrap();
        let up = laplacian(&k, 1, LaplacianKind::Up).unwrap().matrix;
        let down = laplacian(&k, 1, LaplacianKind::Down).unwrap().matrix;
        let comb = laplacian(&k, 1, LaplacianKind::Combinatorial).unwrap().matrix;
        assert!((comb - (up + down)).norm() < 1e-12);
    }

    #[test]
    fn normalized_eigenvalues_bounded_by_d_plus_2() {
        let k = tetra_boundary();
        let l = laplacian(&k, 1, LaplacianKind::NormalizedUp).unwrap();
        let rep = spectrum(&l, DEFAULT_ZERO_TOL).unwrap();
        assert!(rep.lambda_max <= 3.0 + 1e-9, "{}", rep.lambda_max);
    }

    #[test]
    fn hodge_betti_of_sphere() {
        let k = tetra_boundary();
        assert_eq!(betti_via_hodge(&k, 2, DEFAULT_ZERO_TOL).unwrap(), 1);
        assert_eq!(betti_via_hodge(&k, 1, DEFAULT_ZERO_TOL).unwrap(), 0);
        assert_eq!(betti_via_hodge(&k, 0, DEFAULT_ZERO_TOL).unwrap(), 1);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let k = SimplicialComplex::build(&[vec![0], vec![1]], None).unwrap();
        let l = laplacian(&k, 0, LaplacianKind::Up).unwrap();
        let rep = spectrum(&l, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(rep.harmonic_dimension, 2);
        assert!(rep.spectral_gap.is_none());
    }

    #[test]
    fn identities_on_closed_tetrahedron() {
        let k = SimplicialComplex::build(&[vec![0, 1, 2, 3]], None).unwrap();
        let rep = verify_spectrum_identities(&k, 1).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.checks);
    }

    #[test]
    fn union_spectrum() {
        let k = tetra_boundary();
        let union = k.disjoint_union(&k, 10);
        assert!(union_spectrum_check(&[&k, &k], &union, 1, 1e-8).unwrap());
    }

    #[test]
    fn lambda_max_bound_examples() {
        for k in [triangle_graph(), tetra_boundary()] {
            let dmax = k.dim().unwrap();
            for d in 0..=dmax {
                let rep = spectrum(
                    &laplacian(&k, d, LaplacianKind::Combinatorial).unwrap(),
                    DEFAULT_ZERO_TOL,
                )
                .unwrap();
                assert!(rep.lambda_max <= k.vertex_count() as f64 + 1e-8);
            }
        }
    }
}
