//! Harmonic-oscillator product basis: frequency selection, pointwise
//! evaluation, and exact 1D operator matrices from ladder algebra.

use crate::error::{Error, Result};
use crate::surface::{classify_stability, NormalFormCoefficients, StabilityClass,
    DEFAULT_MARGINALITY_TOL};
use nalgebra::DMatrix;

/// Parameters of the 2D oscillator product basis.
///
/// The w-basis frequency is the exact harmonic frequency `sqrt(2 a1)`; the
/// z-basis frequency is tuned variationally against the 1D quartic part,
/// which roughly halves the z-mode count needed for the same accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBasis {
    pub n_w: usize,
    pub n_z: usize,
    pub omega_w: f64,
    pub omega_z: f64,
    pub center_w: f64,
}

impl SpectralBasis {
    pub fn dim(&self) -> usize {
        self.n_w * self.n_z
    }

    /// Flat index of the product state `(n, m)`.
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.n_z + m
    }
}

/// Gaussian-trial Rayleigh quotient of `-1/2 d^2/dz^2 + a2 z^2 + a4 z^4`
/// at width parameter `omega`.
fn z_rayleigh_quotient(omega: f64, a2: f64, a4: f64) -> f64 {
    omega / 4.0 + a2 / (2.0 * omega) + 3.0 * a4 / (4.0 * omega * omega)
}

fn golden_section_min(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Variational z-frequency: coarse 50-point scan of the Gaussian Rayleigh
/// quotient, then golden-section refinement. The scan grid is built from
/// scale multiples so the result commutes exactly with the quartic
/// rescaling of the three-parameter reduction.
pub fn variational_omega_z(a2: f64, a4: f64) -> Result<f64> {
    if a4 < 0.0 {
        return Err(Error::invalid("a4 must be non-negative"));
    }
    if a4 == 0.0 {
        if a2 <= 0.0 {
            return Err(Error::invalid(
                "no z confinement: a4 = 0 requires a2 > 0",
            ));
        }
        return Ok((2.0 * a2).sqrt());
    }
    let scale = (2.0 * a2.abs()).sqrt().max((6.0 * a4).cbrt());
    let n_scan = 50;
    let (mult_lo, mult_hi) = (2e-3f64, 2.5f64);
    let log_lo = mult_lo.ln();
    let log_hi = mult_hi.ln();
    let mut best = (0usize, f64::INFINITY);
    let xs: Vec<f64> = (0..n_scan)
        .map(|i| scale * (log_lo + (log_hi - log_lo) * i as f64 / (n_scan - 1) as f64).exp())
        .collect();
    for (i, &x) in xs.iter().enumerate() {
        let v = z_rayleigh_quotient(x, a2, a4);
        if v < best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == n_scan - 1 {
        return Err(Error::invalid(format!(
            "z-frequency search not bracketed at scale {scale:e}"
        )));
    }
    Ok(golden_section_min(
        xs[best.0 - 1],
        xs[best.0 + 1],
        1e-12 * scale,
        |w| z_rayleigh_quotient(w, a2, a4),
    ))
}

/// Build the product basis for a coefficient set. Unbounded coefficients
/// are refused.
pub fn build_basis(c: &NormalFormCoefficients, n_w: usize, n_z: usize) -> Result<SpectralBasis> {
    c.validate()?;
    if n_w < 2 || n_z < 2 {
        return Err(Error::invalid("need at least 2 modes per direction"));
    }
    let report = classify_stability(c, DEFAULT_MARGINALITY_TOL);
    if report.class == StabilityClass::Unbounded {
        return Err(Error::Unbounded {
            excess: -report.margin,
        });
    }
    Ok(SpectralBasis {
        n_w,
        n_z,
        omega_w: (2.0 * c.a1).sqrt(),
        omega_z: variational_omega_z(c.a2, c.a4)?,
        center_w: 0.0,
    })
}

/// Normalized oscillator eigenfunctions `u_n` and their first two
/// derivatives on a set of points, as `(npts x n)` matrices.
pub struct HermiteTable {
    pub value: DMatrix<f64>,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
}

/// Evaluate `u_0..u_{n-1}` with frequency `omega` at `xs`.
///
/// Recurrence on `u_{n+1} = sqrt(2/(n+1)) xi u_n - sqrt(n/(n+1)) u_{n-1}`
/// with `xi = sqrt(omega) x`; derivatives from the ladder identity and the
/// oscillator ODE, so no finite differencing enters anywhere.
pub fn hermite_table(xs: &[f64], n: usize, omega: f64) -> HermiteTable {
    let npts = xs.len();
    let mut value = DMatrix::<f64>::zeros(npts, n);
    let mut d1 = DMatrix::<f64>::zeros(npts, n);
    let mut d2 = DMatrix::<f64>::zeros(npts, n);
    let sq = omega.sqrt();
    let norm0 = (omega / std::f64::consts::PI).powf(0.25);
    for (i, &x) in xs.iter().enumerate() {
        let xi = sq * x;
        value[(i, 0)] = norm0 * (-0.5 * xi * xi).exp();
        if n > 1 {
            value[(i, 1)] = std::f64::consts::SQRT_2 * xi * value[(i, 0)];
        }
        for m in 1..n.saturating_sub(1) {
            value[(i, m + 1)] = (2.0 / (m as f64 + 1.0)).sqrt() * xi * value[(i, m)]
                - (m as f64 / (m as f64 + 1.0)).sqrt() * value[(i, m - 1)];
        }
        for m in 0..n {
            let lower = if m > 0 {
                (2.0 * m as f64).sqrt() * value[(i, m - 1)]
            } else {
                0.0
            };
            d1[(i, m)] = sq * (lower - xi * value[(i, m)]);
            d2[(i, m)] = (omega * omega * x * x - (2.0 * m as f64 + 1.0) * omega) * value[(i, m)];
        }
    }
    HermiteTable { value, d1, d2 }
}

/// Exact matrix of `x^power` in the size-`n` oscillator basis.
///
/// Built by multiplying the ladder matrix of `x` at an enlarged size
/// `n + power` and truncating, which keeps every retained entry exact:
/// intermediate states reached from indices below `n` in `power` steps
/// stay inside the enlarged space.
pub fn position_power_matrix(n: usize, omega: f64, power: usize) -> DMatrix<f64> {
    assert!(power >= 1);
    let big = n + power;
    let mut x = DMatrix::<f64>::zeros(big, big);
    for m in 0..big - 1 {
        let v = ((m as f64 + 1.0) / (2.0 * omega)).sqrt();
        x[(m, m + 1)] = v;
        x[(m + 1, m)] = v;
    }
    let mut acc = x.clone();
    for _ in 1..power {
        acc = &acc * &x;
    }
    acc.view((0, 0), (n, n)).into_owned()
}

/// Exact matrix of `-1/2 d^2/dx^2` in the size-`n` oscillator basis.
pub fn kinetic_matrix(n: usize, omega: f64) -> DMatrix<f64> {
    let mut t = DMatrix::<f64>::zeros(n, n);
    for m in 0..n {
        t[(m, m)] = omega * (2.0 * m as f64 + 1.0) / 4.0;
        if m + 2 < n {
            let v = -omega * ((m as f64 + 1.0) * (m as f64 + 2.0)).sqrt() / 4.0;
            t[(m, m + 2)] = v;
            t[(m + 2, m)] = v;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn omega_w_from_a1() {
        let b = build_basis(&NormalFormCoefficients::paper_like(0.5, 0.5, 0.0, 0.0), 4, 4).unwrap();
        assert_relative_eq!(b.omega_w, 1.0);
        let b = build_basis(&NormalFormCoefficients::paper_like(0.26, 1.22, 1.29, 1.62), 4, 4)
            .unwrap();
        assert_relative_eq!(b.omega_w, 0.52f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(b.omega_w, 0.7211, max_relative = 1e-4);
    }

    #[test]
    fn omega_z_harmonic_limit_is_exact() {
        // with a4 = 0 the Gaussian trial is exact and the minimum sits at
        // sqrt(2 a2)
        let w = variational_omega_z(0.7, 0.0).unwrap();
        assert_relative_eq!(w, (1.4f64).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn omega_z_solves_stationarity_cubic() {
        // interior minimum satisfies w^3 = 2 a2 w + 6 a4
        for &(a2, a4) in &[(0.336, 0.123), (1.22, 1.62), (-1.0, 0.5), (0.0, 1.0)] {
            let w = variational_omega_z(a2, a4).unwrap();
            let lhs = w * w * w;
            let rhs = 2.0 * a2 * w + 6.0 * a4;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }

    #[test]
    fn omega_z_maps_exactly_under_quartic_rescaling() {
        let (a2, a4) = (0.336_22f64, 0.123_039f64);
        let alpha2 = a2 / a4.powf(2.0 / 3.0);
        let w1 = variational_omega_z(a2, a4).unwrap();
        let w2 = variational_omega_z(alpha2, 1.0).unwrap();
        let alpha = a4.powf(-1.0 / 6.0);
        assert_relative_eq!(w2, w1 * alpha * alpha, max_relative = 1e-12);
    }

    #[test]
    fn build_basis_rejects_unbounded() {
        let c = NormalFormCoefficients::paper_like(1.0, 5.0, 2.1, 1.0);
        assert!(matches!(
            build_basis(&c, 10, 10),
            Err(Error::Unbounded { .. })
        ));
    }

    #[test]
    fn hermite_orthonormality_by_quadrature() {
        // Gram matrix of the first 12 modes on a wide fine grid
        let omega = 0.73;
        let n = 12;
        let h = 0.01;
        let xs: Vec<f64> = (-3000..=3000).map(|i| i as f64 * h).collect();
        let t = hermite_table(&xs, n, omega);
        let gram = t.value.transpose() * &t.value * h;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[(i, j)] - want).abs() <= 1e-12,
                    "gram[{i},{j}] = {}",
                    gram[(i, j)]
                );
            }
        }
    }

    #[test]
    fn hermite_derivatives_match_finite_differences() {
        let omega = 1.31;
        let n = 9;
        let h = 1e-5;
        for &x in &[0.0, 0.4, -1.3, 2.2] {
            let t0 = hermite_table(&[x - h, x, x + h], n, omega);
            for m in 0..n {
                let fd1 = (t0.value[(2, m)] - t0.value[(0, m)]) / (2.0 * h);
                let fd2 = (t0.value[(2, m)] - 2.0 * t0.value[(1, m)] + t0.value[(0, m)]) / (h * h);
                assert_relative_eq!(t0.d1[(1, m)], fd1, max_relative = 1e-7, epsilon = 1e-9);
                assert_relative_eq!(t0.d2[(1, m)], fd2, max_relative = 1e-5, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn position_powers_match_closed_forms() {
        let n = 10;
        let omega = 0.67;
        let b = 1.0 / (2.0 * omega);
        let x2 = position_power_matrix(n, omega, 2);
        let x4 = position_power_matrix(n, omega, 4);
        for m in 0..n {
            assert_relative_eq!(x2[(m, m)], b * (2 * m + 1) as f64, max_relative = 1e-13);
            assert_relative_eq!(
                x4[(m, m)],
                3.0 * b * b * (2 * m * m + 2 * m + 1) as f64,
                max_relative = 1e-13
            );
            if m + 2 < n {
                let mf = m as f64;
                assert_relative_eq!(
                    x2[(m, m + 2)],
                    b * ((mf + 1.0) * (mf + 2.0)).sqrt(),
                    max_relative = 1e-13
                );
                assert_relative_eq!(
                    x4[(m, m + 2)],
                    2.0 * b * b * ((mf + 1.0) * (mf + 2.0)).sqrt() * (2.0 * mf + 3.0),
                    max_relative = 1e-13
                );
            }
            if m + 4 < n {
                let mf = m as f64;
                assert_relative_eq!(
                    x4[(m, m + 4)],
                    b * b * ((mf + 1.0) * (mf + 2.0) * (mf + 3.0) * (mf + 4.0)).sqrt(),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn kinetic_matches_ladder_identity() {
        // -1/2 d^2/dx^2 = omega^2/2 x^2 + (H_osc - omega^2 x^2), cross-check
        // the diagonal against the oscillator energies
        let n = 8;
        let omega = 1.9;
        let t = kinetic_matrix(n, omega);
        let x2 = position_power_matrix(n, omega, 2);
        for m in 0..n {
            let h_osc = omega * (m as f64 + 0.5);
            assert_relative_eq!(
                t[(m, m)] + 0.5 * omega * omega * x2[(m, m)],
                h_osc,
                max_relative = 1e-13
            );
        }
    }
}
