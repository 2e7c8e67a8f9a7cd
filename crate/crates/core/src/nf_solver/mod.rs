//! Rayleigh-Ritz solution of the normal-form eigenproblem
//! `(-1/2 Δ + E_NF) f = E2 f` in a harmonic-oscillator product basis,
//! plus the reduced resolvent, eigenfunction evaluation, parity labels,
//! and exponential-decay diagnostics.

pub mod assemble;
pub mod basis;
mod lanczos;

pub use assemble::{assemble_hamiltonian, HamiltonianMatrix, DENSE_DIM_LIMIT};
pub use basis::{build_basis, hermite_table, SpectralBasis};

use crate::error::{Error, Result};
use crate::surface::NormalFormCoefficients;
use nalgebra::{DMatrix, DVector};

/// Default absolute residual tolerance of the eigensolver.
pub const SOLVER_TOL: f64 = 1e-10;

/// Default relative-gap tolerance below which a level counts as degenerate
/// for gap-dependent operations.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Lowest-k eigenpairs of an assembled Hamiltonian, with provenance.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    eigenvalues: Vec<f64>,
    /// One column per level, in full basis coefficients.
    vectors: DMatrix<f64>,
    residual_norms: Vec<f64>,
    basis: SpectralBasis,
    coeffs: NormalFormCoefficients,
    operator: HamiltonianMatrix,
}

impl EigenSolution {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn residual_norms(&self) -> &[f64] {
        &self.residual_norms
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &NormalFormCoefficients {
        &self.coeffs
    }

    pub fn operator(&self) -> &HamiltonianMatrix {
        &self.operator
    }

    pub fn levels(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Solve for the lowest `k` eigenpairs.
///
/// Dimensions up to [`DENSE_DIM_LIMIT`] go through a dense symmetric
/// decomposition done per z-parity block (H is exactly block diagonal in
/// the parity split); larger problems use Lanczos with full
/// reorthogonalization and the fixed all-ones start vector. Output is
/// deterministic for identical input. The sign convention makes each
/// vector's largest-magnitude coefficient positive.
pub fn solve_eigen(operator: HamiltonianMatrix, k: usize) -> Result<EigenSolution> {
    let dim = operator.dim();
    if k == 0 || k > dim {
        return Err(Error::invalid(format!(
            "requested {k} levels from a dimension-{dim} problem"
        )));
    }
    let basis = *operator.basis();
    let coeffs = *operator.coeffs();

    let (eigenvalues, mut vectors) = if dim <= DENSE_DIM_LIMIT {
        let (even, odd) = operator.parity_indices();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new(); // (value, block, pos)
        let mut block_vecs: Vec<DMatrix<f64>> = Vec::new();
        for (b, idx) in [&even, &odd].iter().enumerate() {
            if idx.is_empty() {
                block_vecs.push(DMatrix::zeros(0, 0));
                continue;
            }
            let block = operator.dense_block(idx);
            let eig = block.symmetric_eigen();
            for pos in 0..idx.len() {
                pairs.push((eig.eigenvalues[pos], b, pos));
            }
            block_vecs.push(eig.eigenvectors);
        }
        // ascending; ties resolved even block first for determinism
        pairs.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        let mut vals = Vec::with_capacity(k);
        let mut vecs = DMatrix::<f64>::zeros(dim, k);
        for (col, &(val, b, pos)) in pairs.iter().take(k).enumerate() {
            vals.push(val);
            let idx = if b == 0 { &even } else { &odd };
            let bv = &block_vecs[b];
            for (row_local, &row_global) in idx.iter().enumerate() {
                vecs[(row_global, col)] = bv[(row_local, pos)];
            }
        }
        (vals, vecs)
    } else {
        let apply = |x: &[f64], y: &mut [f64]| operator.matvec(x, y);
        let (vals, vecs) = lanczos::lanczos_smallest(&apply, dim, k, SOLVER_TOL, 600)?;
        (vals, vecs)
    };

    // deterministic sign: largest-magnitude coefficient positive
    for col in 0..k {
        let mut best = (0usize, 0.0f64);
        for row in 0..dim {
            let a = vectors[(row, col)].abs();
            if a > best.1 {
                best = (row, a);
            }
        }
        if vectors[(best.0, col)] < 0.0 {
            for row in 0..dim {
                vectors[(row, col)] = -vectors[(row, col)];
            }
        }
    }

    let mut residual_norms = Vec::with_capacity(k);
    let mut work = vec![0.0f64; dim];
    for col in 0..k {
        let x: Vec<f64> = vectors.column(col).iter().copied().collect();
        operator.matvec(&x, &mut work);
        let mut r2 = 0.0;
        for i in 0..dim {
            let r = work[i] - eigenvalues[col] * x[i];
            r2 += r * r;
        }
        residual_norms.push(r2.sqrt());
    }

    Ok(EigenSolution {
        eigenvalues,
        vectors,
        residual_norms,
        basis,
        coeffs,
        operator,
    })
}

/// Solve the lowest `k` levels of the symmetric dense matrix `m`;
/// the plain path without any basis bookkeeping, used by tests and
/// small auxiliary problems.
pub fn dense_lowest_eigenpairs(m: &DMatrix<f64>, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, k);
    for (col, &i) in order.iter().take(k).enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

fn check_level(sol: &EigenSolution, level: usize) -> Result<()> {
    if level >= sol.levels() {
        return Err(Error::invalid(format!(
            "level {level} out of range (computed {})",
            sol.levels()
        )));
    }
    if sol.residual_norms[level] > 10.0 * SOLVER_TOL {
        return Err(Error::SolverDiverged {
            iterations: 0,
            residuals: vec![sol.residual_norms[level]],
        });
    }
    Ok(())
}

fn check_gap(sol: &EigenSolution, level: usize, tol: f64) -> Result<()> {
    let lam = sol.eigenvalues[level];
    let scale = lam.abs().max(1.0);
    for (j, &other) in sol.eigenvalues.iter().enumerate() {
        if j != level {
            let gap = (other - lam).abs() / scale;
            if gap <= tol {
                return Err(Error::DegenerateLevel { level, gap, tol });
            }
        }
    }
    Ok(())
}

/// Apply the reduced resolvent `r_NF(E2)` at `level` to `rhs`: returns the
/// unique `x ⟂ f0` with `(H - E2) x = rhs - f0 ⟨f0, rhs⟩`.
///
/// The dense path solves the bordered system
/// `[[H - E2 I, f0], [f0ᵀ, 0]]`; larger problems use a projected MINRES.
pub fn reduced_resolvent_apply(
    sol: &EigenSolution,
    level: usize,
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let dim = sol.operator.dim();
    if rhs.len() != dim {
        return Err(Error::invalid("rhs length does not match basis dimension"));
    }
    check_level(sol, level)?;
    check_gap(sol, level, DEGENERACY_TOL)?;

    let f0 = sol.vectors.column(level).into_owned();
    let lam = sol.eigenvalues[level];
    let rhs_v = DVector::from_column_slice(rhs);
    let mut rhs_perp = rhs_v.clone();
    let c = rhs_perp.dot(&f0);
    rhs_perp.axpy(-c, &f0, 1.0);

    let mut x = if dim <= DENSE_DIM_LIMIT {
        let mut aug = DMatrix::<f64>::zeros(dim + 1, dim + 1);
        for i in 0..dim {
            for j in 0..dim {
                aug[(i, j)] = sol.operator.entry(i, j);
            }
            aug[(i, i)] -= lam;
            aug[(i, dim)] = f0[i];
            aug[(dim, i)] = f0[i];
        }
        let mut b = DVector::<f64>::zeros(dim + 1);
        for i in 0..dim {
            b[i] = rhs_perp[i];
        }
        let solved = aug
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::invalid("bordered resolvent system is singular"))?;
        DVector::from_fn(dim, |i, _| solved[i])
    } else {
        let apply = |v: &[f64], out: &mut [f64]| sol.operator.matvec(v, out);
        lanczos::projected_minres(&apply, lam, &f0, &rhs_perp, 1e-10, 20 * dim)?
    };

    // enforce orthogonality against roundoff drift
    let c = x.dot(&f0);
    x.axpy(-c, &f0, 1.0);
    Ok(x.as_slice().to_vec())
}

/// Pointwise values of the level's basis expansion at arbitrary `(w, z)`
/// points.
pub fn evaluate_eigenfunction(
    sol: &EigenSolution,
    level: usize,
    points: &[(f64, f64)],
) -> Result<Vec<f64>> {
    check_level(sol, level)?;
    let b = sol.basis;
    let ws: Vec<f64> = points.iter().map(|p| p.0 - b.center_w).collect();
    let zs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let tw = hermite_table(&ws, b.n_w, b.omega_w);
    let tz = hermite_table(&zs, b.n_z, b.omega_z);
    let coef = sol.vectors.column(level);
    let mut out = Vec::with_capacity(points.len());
    for p in 0..points.len() {
        let mut acc = 0.0;
        for n in 0..b.n_w {
            let uw = tw.value[(p, n)];
            if uw == 0.0 {
                continue;
            }
            let row = n * b.n_z;
            let mut inner = 0.0;
            for m in 0..b.n_z {
                inner += coef[row + m] * tz.value[(p, m)];
            }
            acc += uw * inner;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Values and first/second partials of the level on a tensor grid
/// `ws x zs`, as `(len(ws) x len(zs))` matrices. All derivatives come from
/// ladder identities, no finite differencing.
pub struct GridEval {
    pub f: DMatrix<f64>,
    pub fw: DMatrix<f64>,
    pub fz: DMatrix<f64>,
    pub fww: DMatrix<f64>,
    pub fzz: DMatrix<f64>,
}

pub fn evaluate_on_grid(
    sol: &EigenSolution,
    level: usize,
    ws: &[f64],
    zs: &[f64],
) -> Result<GridEval> {
    check_level(sol, level)?;
    let b = sol.basis;
    let ws_c: Vec<f64> = ws.iter().map(|w| w - b.center_w).collect();
    let tw = hermite_table(&ws_c, b.n_w, b.omega_w);
    let tz = hermite_table(zs, b.n_z, b.omega_z);
    // coefficient matrix C with C[(n, m)]; nalgebra column-major (m fast)
    let c = DMatrix::<f64>::from_column_slice(b.n_z, b.n_w, sol.vectors.column(level).as_slice());
    let ct = c.transpose(); // (n_w x n_z)
    let f = &tw.value * &ct * tz.value.transpose();
    let fw = &tw.d1 * &ct * tz.value.transpose();
    let fz = &tw.value * &ct * tz.d1.transpose();
    let fww = &tw.d2 * &ct * tz.value.transpose();
    let fzz = &tw.value * &ct * tz.d2.transpose();
    Ok(GridEval { f, fw, fz, fww, fzz })
}

/// z-parity of the level from basis-index parity content: `+1` even,
/// `-1` odd. Mixed content beyond tolerance reports `ParityUnresolved`.
pub fn parity_of(sol: &EigenSolution, level: usize) -> Result<i8> {
    check_level(sol, level)?;
    let b = sol.basis;
    let coef = sol.vectors.column(level);
    let mut even = 0.0;
    let mut odd = 0.0;
    for n in 0..b.n_w {
        for m in 0..b.n_z {
            let v = coef[n * b.n_z + m];
            if m % 2 == 0 {
                even += v * v;
            } else {
                odd += v * v;
            }
        }
    }
    let off = even.min(odd);
    // || f(w,-z) - sigma f || = 2 sqrt(off-parity weight)
    if 2.0 * off.sqrt() > 1e-8 {
        return Err(Error::ParityUnresolved { level, weight: off });
    }
    Ok(if even >= odd { 1 } else { -1 })
}

/// Which field of the eigenfunction a decay diagnostic probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayTarget {
    Value,
    GradW,
    GradZ,
}

/// Numerical evidence for exponential decay: weighted norms
/// `|| e^{a <(w,z)>} f ||` on expanding grids and the radial log-slope.
#[derive(Debug, Clone)]
pub struct DecayDiagnostic {
    pub level: usize,
    pub a_values: Vec<f64>,
    pub weighted_norms: Vec<f64>,
    /// Per-`a`: relative change of the weighted norm when the grid radius
    /// grows by 25%, and whether it clears the stability threshold.
    pub grid_changes: Vec<f64>,
    pub grid_stable: Vec<bool>,
    /// Largest tested `a` whose weighted norm is grid-stable.
    pub stable_a_max: Option<f64>,
    /// Fitted `d log|f| / d(r^2)` along rays inside the classically
    /// resolved region.
    pub slope_estimate: f64,
}

/// Grid-stability threshold on the relative change under a 25% radius bump.
pub const DECAY_STABILITY_TOL: f64 = 1e-3;

pub fn decay_rate_estimate(
    sol: &EigenSolution,
    level: usize,
    a_list: &[f64],
    target: DecayTarget,
) -> Result<DecayDiagnostic> {
    check_level(sol, level)?;
    let b = sol.basis;
    let kappa = 0.5 * b.omega_w.min(b.omega_z);
    let osc = (2.0 * b.n_w as f64 + 1.0) * b.omega_w;
    let osc_z = (2.0 * b.n_z as f64 + 1.0) * b.omega_z;
    let spacing = (1.0 / osc.max(osc_z).sqrt() * 0.5).min(0.2);

    let weighted_norm = |a: f64, radius: f64| -> Result<f64> {
        let n_side = ((2.0 * radius) / spacing).ceil() as usize + 1;
        let xs: Vec<f64> = (0..n_side)
            .map(|i| -radius + 2.0 * radius * i as f64 / (n_side - 1) as f64)
            .collect();
        let eval = evaluate_on_grid(sol, level, &xs, &xs)?;
        let field = match target {
            DecayTarget::Value => &eval.f,
            DecayTarget::GradW => &eval.fw,
            DecayTarget::GradZ => &eval.fz,
        };
        let h = xs[1] - xs[0];
        let mut acc = 0.0;
        for (i, &w) in xs.iter().enumerate() {
            for (j, &z) in xs.iter().enumerate() {
                let weight = (a * (1.0 + w * w + z * z).sqrt()).exp();
                let v = field[(i, j)] * weight;
                acc += v * v;
            }
        }
        Ok((acc * h * h).sqrt())
    };

    let mut weighted_norms = Vec::with_capacity(a_list.len());
    let mut grid_changes = Vec::with_capacity(a_list.len());
    let mut grid_stable = Vec::with_capacity(a_list.len());
    for &a in a_list {
        if !(a > 0.0) {
            return Err(Error::invalid("decay rates must be positive"));
        }
        // radius where e^{2 a r - 2 kappa r^2} has fallen ~e^{-46} below max
        let r = (a + (a * a + 46.0 * 2.0 * kappa).sqrt()) / (2.0 * kappa);
        let n1 = weighted_norm(a, r)?;
        let n2 = weighted_norm(a, 1.25 * r)?;
        if !(n1.is_finite() && n2.is_finite()) {
            return Err(Error::invalid("weighted norm overflowed"));
        }
        let change = (n2 - n1).abs() / n1.max(f64::MIN_POSITIVE);
        weighted_norms.push(n2);
        grid_changes.push(change);
        grid_stable.push(change <= DECAY_STABILITY_TOL);
    }
    let stable_a_max = a_list
        .iter()
        .zip(&grid_stable)
        .filter(|(_, &s)| s)
        .map(|(&a, _)| a)
        .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |m| m.max(a))));

    // radial log-slope of |f| against r^2 along 8 rays within the region
    // the basis resolves
    let r_turn = ((2.0 * b.n_w as f64 + 1.0) / b.omega_w)
        .sqrt()
        .min(((2.0 * b.n_z as f64 + 1.0) / b.omega_z).sqrt());
    let radii: Vec<f64> = (0..24)
        .map(|i| r_turn * (0.15 + 0.45 * i as f64 / 23.0))
        .collect();
    let mut pts = Vec::new();
    for k in 0..8 {
        let th = std::f64::consts::PI * k as f64 / 4.0;
        for &r in &radii {
            pts.push((r * th.cos(), r * th.sin()));
        }
    }
    let vals = evaluate_eigenfunction(sol, level, &pts)?;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    let vmax = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (p, &v) in pts.iter().zip(&vals) {
        if v.abs() < 1e-10 * vmax {
            continue;
        }
        let x = p.0 * p.0 + p.1 * p.1;
        let y = v.abs().ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        count += 1.0;
    }
    let slope_estimate = (count * sxy - sx * sy) / (count * sxx - sx * sx);

    Ok(DecayDiagnostic {
        level,
        a_values: a_list.to_vec(),
        weighted_norms,
        grid_changes,
        grid_stable,
        stable_a_max,
        slope_estimate,
    })
}
