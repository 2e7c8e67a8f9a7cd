//! Potential-energy-surface ingestion and the quartic normal-form fit.
//!
//! The fitted model for the ground electronic surface near its symmetric
//! minimum `(W0, 0)` is
//!
//! ```text
//! E(W, Z) = E0 + a1 (W - W0)^2 + (a2 eps - a3 (W - W0)) Z^2 + a4 Z^4
//! ```
//!
//! with the Z^2 coefficient stored eps-factored: `a2` is defined so that the
//! physical Z^2 Taylor coefficient equals `a2 * eps`. Only Z-even monomials
//! enter the design matrix; the surface is even in Z for a symmetric bond.
//! `W0` is a nonlinear parameter, handled by a bracketed golden-section
//! search wrapping a linear least-squares solve of the remaining five
//! coefficients — the direct 6-parameter fit is numerically unstable.

use crate::error::{Error, Result};
use crate::units::{self, Dimension, UnitSystem};
use nalgebra::{DMatrix, DVector};

/// One tabulated electronic energy at a nuclear geometry `(W, Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PesSample {
    pub w: f64,
    pub z: f64,
    pub e: f64,
}

/// A set of surface samples together with the units they are expressed in.
#[derive(Debug, Clone)]
pub struct PesSampleSet {
    samples: Vec<PesSample>,
    units: UnitSystem,
    /// Largest |E(W,Z) - E(W,-Z)| over matched sample pairs, if any exist.
    z_asymmetry: Option<f64>,
}

/// Minimum number of samples for a fit: six parameters plus redundancy.
pub const MIN_SAMPLES: usize = 8;

impl PesSampleSet {
    pub fn new(samples: Vec<PesSample>, units: UnitSystem) -> Result<Self> {
        units.validate()?;
        if samples.len() < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "need at least {MIN_SAMPLES} samples for a fit, got {}",
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.w.is_finite() && s.z.is_finite() && s.e.is_finite()) {
                return Err(Error::invalid(format!("non-finite sample at index {i}")));
            }
        }
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                let (a, b) = (&samples[i], &samples[j]);
                let tol_w = 1e-12 * (1.0 + a.w.abs());
                let tol_z = 1e-12 * (1.0 + a.z.abs());
                if (a.w - b.w).abs() <= tol_w && (a.z - b.z).abs() <= tol_z {
                    return Err(Error::invalid(format!(
                        "duplicate sample geometry at indices {i} and {j}: ({}, {})",
                        a.w, a.z
                    )));
                }
            }
        }
        let z_asymmetry = z_symmetry_defect(&samples);
        Ok(PesSampleSet {
            samples,
            units,
            z_asymmetry,
        })
    }

    /// Parse the plain-text CSV format: one `W,Z,E` per line, `#` comments,
    /// optional `W,Z,E` header, whitespace tolerated.
    pub fn from_csv_str(text: &str, units: UnitSystem) -> Result<Self> {
        let mut samples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let lowered: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            if lowered.eq_ignore_ascii_case("w,z,e") {
                continue; // header
            }
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 3 comma-separated fields, got {}", fields.len()),
                });
            }
            let mut vals = [0.0f64; 3];
            for (k, f) in fields.iter().enumerate() {
                vals[k] = f.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("cannot parse `{f}` as a number"),
                })?;
            }
            samples.push(PesSample {
                w: vals[0],
                z: vals[1],
                e: vals[2],
            });
        }
        if samples.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no samples found in input".into(),
            });
        }
        Self::new(samples, units)
    }

    pub fn samples(&self) -> &[PesSample] {
        &self.samples
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn z_asymmetry(&self) -> Option<f64> {
        self.z_asymmetry
    }

    pub fn w_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.samples {
            lo = lo.min(s.w);
            hi = hi.max(s.w);
        }
        (lo, hi)
    }
}

fn z_symmetry_defect(samples: &[PesSample]) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for (i, a) in samples.iter().enumerate() {
        if a.z == 0.0 {
            continue;
        }
        for b in samples.iter().skip(i + 1) {
            let tol_w = 1e-12 * (1.0 + a.w.abs());
            let tol_z = 1e-12 * (1.0 + a.z.abs());
            if (a.w - b.w).abs() <= tol_w && (a.z + b.z).abs() <= tol_z {
                let d = (a.e - b.e).abs();
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
        }
    }
    worst
}

/// Coefficients of the quartic normal form. `a2` is eps-factored: the
/// physical Z^2 coefficient is `a2 * epsilon_convention`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormCoefficients {
    pub e0: f64,
    pub w0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// The eps value at which `a2` was factored out of the Z^2 term.
    pub epsilon_convention: f64,
}

impl NormalFormCoefficients {
    /// Dimensionless test coefficients with `e0 = w0 = 0` and unit
    /// eps convention.
    pub fn paper_like(a1: f64, a2: f64, a3: f64, a4: f64) -> Self {
        NormalFormCoefficients {
            e0: 0.0,
            w0: 0.0,
            a1,
            a2,
            a3,
            a4,
            epsilon_convention: 1.0,
        }
    }

    /// Reference FHF⁻ table (Angstrom/Hartree units, eps = 0.0821).
    pub fn fhf_reference() -> Self {
        NormalFormCoefficients {
            e0: -200.215,
            w0: 2.287,
            a1: 0.26,
            a2: 1.22,
            a3: 1.29,
            a4: 1.62,
            epsilon_convention: 0.0821,
        }
    }

    /// Basic sanity: finite fields, `a1 > 0`, `a3, a4 >= 0`. Degenerate
    /// configurations with `a3 = a4 = 0` are tolerated for harmonic test
    /// modes; [`Self::is_paper_form`] distinguishes them.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e0", self.e0),
            ("w0", self.w0),
            ("a1", self.a1),
            ("a2", self.a2),
            ("a3", self.a3),
            ("a4", self.a4),
            ("epsilon_convention", self.epsilon_convention),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if self.a1 <= 0.0 {
            return Err(Error::invalid(format!("a1 must be positive, got {}", self.a1)));
        }
        if self.a3 < 0.0 || self.a4 < 0.0 {
            return Err(Error::invalid("a3 and a4 must be non-negative"));
        }
        if self.epsilon_convention <= 0.0 {
            return Err(Error::invalid("epsilon_convention must be positive"));
        }
        Ok(())
    }

    /// Whether the coefficients satisfy the strict sign assumptions
    /// (`a1, a3, a4 > 0`) rather than a degenerate test configuration.
    pub fn is_paper_form(&self) -> bool {
        self.a1 > 0.0 && self.a3 > 0.0 && self.a4 > 0.0
    }

    /// Convert all dimensionful fields from `units` to atomic units.
    pub fn to_atomic(&self, units: &UnitSystem) -> NormalFormCoefficients {
        NormalFormCoefficients {
            e0: units::to_atomic(self.e0, Dimension::Energy, units),
            w0: units::to_atomic(self.w0, Dimension::Length, units),
            a1: units::to_atomic(self.a1, Dimension::EnergyPerLength2, units),
            a2: units::to_atomic(self.a2, Dimension::EnergyPerLength2, units),
            a3: units::to_atomic(self.a3, Dimension::EnergyPerLength3, units),
            a4: units::to_atomic(self.a4, Dimension::EnergyPerLength4, units),
            epsilon_convention: self.epsilon_convention,
        }
    }

    /// Model surface in physical coordinates:
    /// `E0 + a1 dW^2 + (a2 eps - a3 dW) Z^2 + a4 Z^4` with `dW = W - W0`.
    pub fn model_energy(&self, w: f64, z: f64, epsilon: f64) -> f64 {
        let dw = w - self.w0;
        let z2 = z * z;
        self.e0 + self.a1 * dw * dw + (self.a2 * epsilon - self.a3 * dw) * z2 + self.a4 * z2 * z2
    }
}

/// Boundedness classification of the quartic normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    /// `a3^2 < 4 a1 a4`.
    BoundedStrict,
    /// `a3^2 = 4 a1 a4` within tolerance, with `a2 >= 0`.
    BoundedMarginal,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub class: StabilityClass,
    /// `4 a1 a4 - a3^2`; positive for strictly bounded coefficients.
    pub margin: f64,
}

/// Default relative width of the marginality band.
pub const DEFAULT_MARGINALITY_TOL: f64 = 1e-9;

/// Classify boundedness. The band `|a3^2 - 4 a1 a4| <= tol * 4 a1 a4`
/// counts as the marginal case, which is bounded only for `a2 >= 0`.
pub fn classify_stability(c: &NormalFormCoefficients, tol: f64) -> StabilityReport {
    let lhs = c.a3 * c.a3;
    let rhs = 4.0 * c.a1 * c.a4;
    let margin = rhs - lhs;
    let band = tol * rhs.abs();
    let class = if (lhs - rhs).abs() <= band {
        if c.a2 >= 0.0 {
            StabilityClass::BoundedMarginal
        } else {
            StabilityClass::Unbounded
        }
    } else if lhs < rhs {
        StabilityClass::BoundedStrict
    } else {
        StabilityClass::Unbounded
    };
    StabilityReport { class, margin }
}

/// Dimensionless normal-form potential `a1 w^2 + (a2 - a3 w) z^2 + a4 z^4`.
pub fn evaluate_nf_potential(c: &NormalFormCoefficients, w: f64, z: f64) -> f64 {
    let z2 = z * z;
    c.a1 * w * w + (c.a2 - c.a3 * w) * z2 + c.a4 * z2 * z2
}

/// Analytic gradient `(d/dw, d/dz)` of [`evaluate_nf_potential`].
pub fn nf_gradient(c: &NormalFormCoefficients, w: f64, z: f64) -> (f64, f64) {
    let z2 = z * z;
    (
        2.0 * c.a1 * w - c.a3 * z2,
        2.0 * (c.a2 - c.a3 * w) * z + 4.0 * c.a4 * z2 * z,
    )
}

/// Explicit lower bound from the completed square,
/// `E_NF >= min_z [ (a4 - a3^2/(4 a1)) z^4 + a2 z^2 ]`,
/// finite whenever the coefficients are not unbounded.
pub fn nf_lower_bound(c: &NormalFormCoefficients, tol: f64) -> Option<f64> {
    let report = classify_stability(c, tol);
    if report.class == StabilityClass::Unbounded {
        return None;
    }
    let q = c.a4 - c.a3 * c.a3 / (4.0 * c.a1);
    if c.a2 >= 0.0 {
        Some(0.0)
    } else if q > 0.0 {
        // minimum of q z^4 + a2 z^2 at z^2 = -a2 / (2 q)
        Some(-c.a2 * c.a2 / (4.0 * q))
    } else {
        None
    }
}

/// Reduced three-parameter form: `spectrum(H_NF) = alpha^-2 spectrum(H_red)`
/// where `H_red` has quartic coefficient one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeParameterForm {
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

pub fn reduce_to_three_parameters(c: &NormalFormCoefficients) -> Result<ThreeParameterForm> {
    if c.a4 <= 0.0 {
        return Err(Error::invalid(format!(
            "three-parameter reduction needs a4 > 0, got {}",
            c.a4
        )));
    }
    let a4 = c.a4;
    Ok(ThreeParameterForm {
        alpha: a4.powf(-1.0 / 6.0),
        alpha1: c.a1 / a4.powf(2.0 / 3.0),
        alpha2: c.a2 / a4.powf(2.0 / 3.0),
        alpha3: c.a3 / a4.powf(5.0 / 6.0),
    })
}

/// Fit output: coefficients plus residual diagnostics in input units.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub coeffs: NormalFormCoefficients,
    pub rms_residual: f64,
    pub max_residual: f64,
    /// Singular-value condition number of the inner design matrix at the
    /// fitted `W0`.
    pub condition_estimate: f64,
    /// Per-sample `(|residual|, cubic envelope)` with the envelope
    /// `|dW|^3 + dW^2 Z^2 + |dW| Z^4 + Z^6`, for eyeballing whether the
    /// residual behaves like the omitted third-order terms.
    pub residual_order_diagnostic: Vec<(f64, f64)>,
    /// Largest `|E(W,Z) - E(W,-Z)|` among matched sample pairs; odd-Z
    /// content never enters the design matrix, so it shows up here instead.
    pub z_symmetry_defect: Option<f64>,
}

const COLUMN_NAMES: [&str; 5] = ["1", "(W-W0)^2", "Z^2", "(W-W0)*Z^2", "Z^4"];

#[derive(Debug)]
struct InnerFit {
    /// `[e0, a1, a2*eps, -a3, a4]`
    coef: [f64; 5],
    ssr: f64,
    condition: f64,
}

fn inner_least_squares(samples: &[PesSample], w0: f64) -> Result<InnerFit> {
    let n = samples.len();
    let mut a = DMatrix::<f64>::zeros(n, 5);
    let mut b = DVector::<f64>::zeros(n);
    for (i, s) in samples.iter().enumerate() {
        let dw = s.w - w0;
        let z2 = s.z * s.z;
        a[(i, 0)] = 1.0;
        a[(i, 1)] = dw * dw;
        a[(i, 2)] = z2;
        a[(i, 3)] = dw * z2;
        a[(i, 4)] = z2 * z2;
        b[i] = s.e;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let rank_tol = smax * 1e-12 * (n.max(5) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > rank_tol).count();
    if rank < 5 {
        // name the column dominating the null space
        let vt = svd.v_t.as_ref().expect("svd with v requested");
        let mut worst = (0usize, 0.0f64);
        let null_row = vt.nrows() - 1;
        for j in 0..5 {
            let w = vt[(null_row, j)].abs();
            if w > worst.1 {
                worst = (j, w);
            }
        }
        return Err(Error::FitDegenerate {
            rank,
            cols: 5,
            monomial: COLUMN_NAMES[worst.0],
        });
    }
    let x = svd
        .solve(&b, rank_tol)
        .map_err(|e| Error::invalid(format!("svd solve failed: {e}")))?;
    let r = &a * &x - &b;
    let ssr = r.dot(&r);
    Ok(InnerFit {
        coef: [x[0], x[1], x[2], x[3], x[4]],
        ssr,
        condition: smax / smin,
    })
}

fn golden_section_min(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
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

/// Fit the eps-dependent quartic normal form to a sample set.
///
/// `epsilon` is the value used to factor the fitted Z^2 coefficient into
/// `a2 * eps`; it is recorded in the result's `epsilon_convention`.
/// `w0_seed` must lie in the sampled W range. Residuals are reported in the
/// input energy units.
pub fn fit_normal_form(
    samples: &PesSampleSet,
    epsilon: f64,
    w0_seed: f64,
) -> Result<FitResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon must be positive and finite"));
    }
    let (lo, hi) = samples.w_range();
    if hi - lo <= 0.0 {
        return Err(Error::invalid("samples span no W range"));
    }
    if !(w0_seed >= lo && w0_seed <= hi) {
        return Err(Error::invalid(format!(
            "w0_seed {w0_seed} outside the sampled W range [{lo}, {hi}]"
        )));
    }

    // coarse scan for a bracketing triple, then golden-section refinement
    let n_scan = 33;
    let mut best = (0usize, f64::INFINITY);
    let mut ssr_of = |w0: f64| -> f64 {
        inner_least_squares(samples.samples(), w0)
            .map(|f| f.ssr)
            .unwrap_or(f64::INFINITY)
    };
    let xs: Vec<f64> = (0..n_scan)
        .map(|i| lo + (hi - lo) * i as f64 / (n_scan - 1) as f64)
        .collect();
    for (i, &x) in xs.iter().enumerate() {
        let s = ssr_of(x);
        if s < best.1 {
            best = (i, s);
        }
    }
    if best.1.is_infinite() {
        // every scan point failed; surface the representative cause
        return Err(inner_least_squares(samples.samples(), 0.5 * (lo + hi))
            .expect_err("scan reported failure but midpoint solve succeeded"));
    }
    if best.0 == 0 || best.0 == n_scan - 1 {
        return Err(Error::W0NotBracketed {
            w0: xs[best.0],
            lo,
            hi,
        });
    }
    let w0 = golden_section_min(
        xs[best.0 - 1],
        xs[best.0 + 1],
        1e-12 * (hi - lo),
        &mut ssr_of,
    );

    let inner = inner_least_squares(samples.samples(), w0)?;
    let [e0, a1, c2, neg_a3, a4] = inner.coef;
    let coeffs = NormalFormCoefficients {
        e0,
        w0,
        a1,
        a2: c2 / epsilon,
        a3: -neg_a3,
        a4,
        epsilon_convention: epsilon,
    };

    let mut max_res = 0.0f64;
    let mut diag = Vec::with_capacity(samples.len());
    for s in samples.samples() {
        let r = (s.e - coeffs.model_energy(s.w, s.z, epsilon)).abs();
        max_res = max_res.max(r);
        let dw = (s.w - w0).abs();
        let z2 = s.z * s.z;
        let envelope = dw * dw * dw + dw * dw * z2 + dw * z2 * z2 + z2 * z2 * z2;
        diag.push((r, envelope));
    }
    let rms = (inner.ssr / samples.len() as f64).sqrt();

    Ok(FitResult {
        coeffs,
        rms_residual: rms,
        max_residual: max_res,
        condition_estimate: inner.condition,
        residual_order_diagnostic: diag,
        z_symmetry_defect: samples.z_asymmetry(),
    })
}

/// Synthesize samples on a rectangular grid from a coefficient table; used
/// for round-trip tests and the bundled synthetic data set.
pub fn synthesize_grid(
    c: &NormalFormCoefficients,
    epsilon: f64,
    w_half_range: f64,
    z_half_range: f64,
    n_w: usize,
    n_z: usize,
    units: UnitSystem,
) -> Result<PesSampleSet> {
    let mut samples = Vec::with_capacity(n_w * n_z);
    for i in 0..n_w {
        let w = c.w0 - w_half_range + 2.0 * w_half_range * i as f64 / (n_w - 1) as f64;
        for j in 0..n_z {
            let z = -z_half_range + 2.0 * z_half_range * j as f64 / (n_z - 1) as f64;
            samples.push(PesSample {
                w,
                z,
                e: c.model_energy(w, z, epsilon),
            });
        }
    }
    PesSampleSet::new(samples, units)
}
