//! Iterative pieces for dimensions past the dense limit: symmetric Lanczos
//! with full reorthogonalization, and a projected MINRES for reduced
//! resolvent solves.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Smallest `k` eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalization and the fixed all-ones start vector.
///
/// Returns eigenvalues ascending with their Ritz vectors. Degenerate
/// clusters are a known blind spot of single-vector Lanczos; callers on
/// that path use non-degenerate spectra.
pub fn lanczos_smallest(
    apply: &dyn Fn(&[f64], &mut [f64]),
    dim: usize,
    k: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    assert!(k >= 1 && k <= dim);
    let m_max = max_iter.min(dim);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m_max);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let v0 = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    basis.push(v0);
    let mut work = vec![0.0f64; dim];
    let mut best_residuals = vec![f64::INFINITY; k];

    for j in 0..m_max {
        apply(basis[j].as_slice(), &mut work);
        let mut w = DVector::from_column_slice(&work);
        let alpha = w.dot(&basis[j]);
        alphas.push(alpha);
        w.axpy(-alpha, &basis[j], 1.0);
        if j > 0 {
            let b = betas[j - 1];
            w.axpy(-b, &basis[j - 1], 1.0);
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for v in &basis {
                let c = w.dot(v);
                w.axpy(-c, v, 1.0);
            }
        }
        let beta = w.norm();

        let m = alphas.len();
        let check_now = beta <= 1e-14 || m % 5 == 0 || j + 1 == m_max;
        if check_now && m >= k {
            let (theta, s) = tridiag_eigen(&alphas, &betas);
            let mut converged = true;
            for i in 0..k {
                let est = if beta <= 1e-14 {
                    0.0
                } else {
                    (beta * s[(m - 1, i)]).abs()
                };
                best_residuals[i] = est;
                if est > tol {
                    converged = false;
                }
            }
            if converged || beta <= 1e-14 {
                let mut vecs = DMatrix::<f64>::zeros(dim, k);
                for i in 0..k {
                    let mut col = DVector::zeros(dim);
                    for (l, v) in basis.iter().enumerate() {
                        col.axpy(s[(l, i)], v, 1.0);
                    }
                    let n = col.norm();
                    col /= n;
                    vecs.set_column(i, &col);
                }
                return Ok((theta.iter().take(k).copied().collect(), vecs));
            }
        }
        if beta <= 1e-14 {
            break; // invariant subspace smaller than requested
        }
        betas.push(beta);
        basis.push(w / beta);
    }
    Err(Error::SolverDiverged {
        iterations: m_max,
        residuals: best_residuals,
    })
}

/// Eigen decomposition of the symmetric tridiagonal (alphas, betas),
/// eigenvalues ascending, eigenvectors as columns.
fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<f64>::zeros(m, m);
    for (new, &old) in order.iter().enumerate() {
        vecs.set_column(new, &eig.eigenvectors.column(old));
    }
    (vals, vecs)
}

/// MINRES for `P (H - shift) P x = rhs` on the complement of the unit
/// vector `f0` (`P = I - f0 f0ᵀ`), for symmetric indefinite systems.
pub fn projected_minres(
    apply: &dyn Fn(&[f64], &mut [f64]),
    shift: f64,
    f0: &DVector<f64>,
    rhs: &DVector<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let dim = rhs.len();
    let project = |v: &mut DVector<f64>| {
        let c = v.dot(f0);
        v.axpy(-c, f0, 1.0);
    };
    let op = |v: &DVector<f64>, out: &mut DVector<f64>, work: &mut Vec<f64>| {
        let mut vin = v.clone();
        project(&mut vin);
        apply(vin.as_slice(), work);
        let mut y = DVector::from_column_slice(work);
        y.axpy(-shift, &vin, 1.0);
        project(&mut y);
        *out = y;
    };

    let mut work = vec![0.0f64; dim];
    let mut b = rhs.clone();
    project(&mut b);
    let norm_b = b.norm();
    if norm_b == 0.0 {
        return Ok(DVector::zeros(dim));
    }

    // Paige-Saunders MINRES with Lanczos recurrence
    let mut v_prev = DVector::<f64>::zeros(dim);
    let mut v = &b / norm_b;
    let mut beta = norm_b;
    let (mut c_prev, mut s_prev) = (1.0f64, 0.0f64);
    let (mut c_cur, mut s_cur) = (1.0f64, 0.0f64);
    let mut d_prev = DVector::<f64>::zeros(dim);
    let mut d_prev2 = DVector::<f64>::zeros(dim);
    let mut x = DVector::<f64>::zeros(dim);
    let mut eta = beta;

    for _ in 0..max_iter {
        let mut av = DVector::<f64>::zeros(dim);
        op(&v, &mut av, &mut work);
        let alpha = v.dot(&av);
        av.axpy(-alpha, &v, 1.0);
        av.axpy(-beta, &v_prev, 1.0);
        let beta_next = av.norm();

        // previous rotations applied to the new tridiagonal column
        let delta = c_cur * alpha - c_prev * s_cur * beta;
        let rho2 = s_cur * alpha + c_prev * c_cur * beta;
        let rho3 = s_prev * beta;
        let rho1 = (delta * delta + beta_next * beta_next).sqrt();
        if rho1 == 0.0 {
            break;
        }
        let c_next = delta / rho1;
        let s_next = beta_next / rho1;

        let mut d = v.clone();
        d.axpy(-rho2, &d_prev, 1.0);
        d.axpy(-rho3, &d_prev2, 1.0);
        d /= rho1;
        x.axpy(c_next * eta, &d, 1.0);
        eta = -s_next * eta;

        d_prev2 = std::mem::replace(&mut d_prev, d);
        v_prev = std::mem::replace(&mut v, if beta_next > 0.0 { &av / beta_next } else { av });
        beta = beta_next;
        (c_prev, s_prev) = (c_cur, s_cur);
        (c_cur, s_cur) = (c_next, s_next);

        if eta.abs() <= rel_tol * norm_b || beta_next <= 1e-300 {
            let c = x.dot(f0);
            x.axpy(-c, f0, 1.0);
            return Ok(x);
        }
    }
    Err(Error::SolverDiverged {
        iterations: max_iter,
        residuals: vec![eta.abs() / norm_b],
    })
}
