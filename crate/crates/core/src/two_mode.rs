//! Parameter-space view of the master equation.
//!
//! An antisymmetric `Γ` is fixed by its upper triangle. Ordering the free entries
//! as the mode monotones `ν_j` followed by the cross-mode entries (row-major)
//! turns the master equation into an affine ODE `g′ = 𝒜g + 𝒞`. For two modes
//! the vector is `(ν₁, ν₂, g₁, g₂, g₃, g₄)` with
//!
//! ```text
//!       ⎛  0   ν₁  g₁  g₂ ⎞
//!   Γ = ⎜ −ν₁  0   g₃  g₄ ⎟
//!       ⎜ −g₁ −g₃  0   ν₂ ⎟
//!       ⎝ −g₂ −g₄ −ν₂  0  ⎠
//! ```
//!
//! The catalog lists one canonical two-mode generator per dynamical class, with
//! closed-form spectra and the linear combinations of `g` that diagonalize it.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{classify, DynamicsClass, GeneratorPair};
use crate::linalg::{block_diag, multiset_distance, omega, pauli_x, pauli_z, sorted_eigenvalues, RealMatrix};
use crate::state::CovarianceMatrix;

/// `(ν₁, ν₂, g₁, g₂, g₃, g₄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GVector {
    pub nu1: f64,
    pub nu2: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl GVector {
    pub fn from_array(v: [f64; 6]) -> Self {
        let [nu1, nu2, g1, g2, g3, g4] = v;
        Self { nu1, nu2, g1, g2, g3, g4 }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.nu1, self.nu2, self.g1, self.g2, self.g3, self.g4]
    }

    pub fn dot(self, w: &[f64; 6]) -> f64 {
        self.to_array().iter().zip(w).map(|(a, b)| a * b).sum()
    }
}

pub fn gamma_to_g(gamma: &CovarianceMatrix) -> Result<GVector> {
    if gamma.modes() != 2 {
        return Err(Error::WrongModeCount {
            expected: 2,
            found: gamma.modes(),
        });
    }
    let v = g_vector(gamma.matrix());
    Ok(GVector::from_array([v[0], v[1], v[2], v[3], v[4], v[5]]))
}

pub fn g_to_gamma(g: &GVector) -> CovarianceMatrix {
    CovarianceMatrix::from_computed(&from_g_vector(2, &DVector::from_row_slice(&g.to_array())))
}

/// Index pairs `(i, j)`, `i < j`, in g-vector order for `modes` modes.
pub fn g_index_pairs(modes: usize) -> Vec<(usize, usize)> {
    let d = 2 * modes;
    let mut pairs: Vec<(usize, usize)> = (0..modes).map(|j| (2 * j, 2 * j + 1)).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            if i / 2 != j / 2 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Upper-triangle entries of an antisymmetric matrix in g-vector order.
pub fn g_vector(m: &RealMatrix) -> DVector<f64> {
    let pairs = g_index_pairs(m.nrows() / 2);
    DVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| m[(i, j)]))
}

pub fn from_g_vector(modes: usize, v: &DVector<f64>) -> RealMatrix {
    let mut m = RealMatrix::zeros(2 * modes, 2 * modes);
    for (k, &(i, j)) in g_index_pairs(modes).iter().enumerate() {
        m[(i, j)] = v[k];
        m[(j, i)] = -v[k];
    }
    m
}

/// `g′ = 𝒜g + 𝒞`.
#[derive(Debug, Clone, PartialEq)]
pub struct GSystem {
    pub a: RealMatrix,
    pub c: DVector<f64>,
}

impl GSystem {
    pub fn rhs(&self, g: &DVector<f64>) -> DVector<f64> {
        &self.a * g + &self.c
    }
}

/// Two-mode system; fails for any other mode count.
pub fn build_g_system(gen: &GeneratorPair) -> Result<GSystem> {
    if gen.modes() != 2 {
        return Err(Error::WrongModeCount {
            expected: 2,
            found: gen.modes(),
        });
    }
    Ok(build_g_system_any(gen))
}

/// The same construction for any mode count; dimension `N(2N − 1)`.
pub fn build_g_system_any(gen: &GeneratorPair) -> GSystem {
    let modes = gen.modes();
    let dim = g_index_pairs(modes).len();
    let mut a = RealMatrix::zeros(dim, dim);
    let mut unit = DVector::zeros(dim);
    for col in 0..dim {
        unit[col] = 1.0;
        let gj = from_g_vector(modes, &unit);
        let image = gen.a() * &gj + &gj * gen.a().transpose();
        a.set_column(col, &g_vector(&image));
        unit[col] = 0.0;
    }
    GSystem {
        a,
        c: g_vector(gen.c()),
    }
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Eigenvalues of `𝒜`, sorted by real then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues of `𝒜²`, same ordering.
    pub squared_eigenvalues: Vec<Complex64>,
    /// Orthonormal basis of `{w : wᵀ𝒜 = 0}`. `wᵀg` is constant when also `wᵀ𝒞 = 0`.
    pub kernel: Vec<DVector<f64>>,
}

pub fn spectral_report(sys: &GSystem) -> SpectralReport {
    let a2 = &sys.a * &sys.a;
    SpectralReport {
        eigenvalues: sorted_eigenvalues(&sys.a),
        squared_eigenvalues: sorted_eigenvalues(&a2),
        kernel: left_kernel(&sys.a, 1e-10),
    }
}

fn left_kernel(a: &RealMatrix, tol: f64) -> Vec<DVector<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let scale = a.amax().max(1.0);
    let svd = a.transpose().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    (0..n)
        .filter(|&k| svd.singular_values[k] <= tol * scale)
        .map(|k| v_t.row(k).transpose().into_owned())
        .collect()
}

/// Tunable parameters of the catalog scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct CatalogParams {
    /// Noise strength.
    pub r: f64,
    /// Coupling strength (shielding, rotation).
    pub b: f64,
    /// Affine strength (purifying, correlating).
    pub c: f64,
    pub e1: f64,
    pub e2: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            b: 0.5,
            c: 0.5,
            e1: 1.0,
            e2: 0.7,
        }
    }
}

/// Whether predictions refer to `𝒜` or to `𝒜²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    Linear,
    Squared,
}

/// A left eigenvector `w` with `wᵀM = λwᵀ`, where `M` is `𝒜` or `𝒜²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Combination {
    pub label: String,
    pub weights: [f64; 6],
    pub rate: f64,
}

fn combo(label: &str, weights: [f64; 6], rate: f64) -> Combination {
    Combination {
        label: label.to_string(),
        weights,
        rate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Scenario {
    FreeEvolution,
    Noise,
    Purifying,
    ShieldingX,
    ShieldingZ,
    Rotation,
    CounterRotation,
    ActiveShielding,
    PassiveShielding,
    Correlating,
}

fn id2() -> RealMatrix {
    RealMatrix::identity(2, 2)
}

fn zero2() -> RealMatrix {
    RealMatrix::zeros(2, 2)
}

fn two_mode(b11: RealMatrix, b12: RealMatrix, b21: RealMatrix, b22: RealMatrix) -> RealMatrix {
    let mut m = RealMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&b11);
    m.view_mut((0, 2), (2, 2)).copy_from(&b12);
    m.view_mut((2, 0), (2, 2)).copy_from(&b21);
    m.view_mut((2, 2), (2, 2)).copy_from(&b22);
    m
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::FreeEvolution,
        Scenario::Noise,
        Scenario::Purifying,
        Scenario::ShieldingX,
        Scenario::ShieldingZ,
        Scenario::Rotation,
        Scenario::CounterRotation,
        Scenario::ActiveShielding,
        Scenario::PassiveShielding,
        Scenario::Correlating,
    ];

    pub fn class(self) -> DynamicsClass {
        match self {
            Scenario::FreeEvolution => DynamicsClass::FreeEvolution,
            Scenario::Noise => DynamicsClass::Noise,
            Scenario::Purifying => DynamicsClass::Purifying,
            Scenario::ShieldingX | Scenario::ShieldingZ => DynamicsClass::CorrelationShielding,
            Scenario::Rotation => DynamicsClass::MultiModeRotation,
            Scenario::CounterRotation => DynamicsClass::MultiModeCounterRotation,
            Scenario::ActiveShielding => DynamicsClass::MultiModeActiveShielding,
            Scenario::PassiveShielding => DynamicsClass::MultiModePassiveShielding,
            Scenario::Correlating => DynamicsClass::Correlating,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scenario::ShieldingX => "Correlation Shielding (X)",
            Scenario::ShieldingZ => "Correlation Shielding (Z)",
            other => other.class().name(),
        }
    }

    /// Command-line key, e.g. `shielding-x`.
    pub fn key(self) -> &'static str {
        match self {
            Scenario::FreeEvolution => "free-evolution",
            Scenario::Noise => "noise",
            Scenario::Purifying => "purifying",
            Scenario::ShieldingX => "shielding-x",
            Scenario::ShieldingZ => "shielding-z",
            Scenario::Rotation => "rotation",
            Scenario::CounterRotation => "counter-rotation",
            Scenario::ActiveShielding => "active-shielding",
            Scenario::PassiveShielding => "passive-shielding",
            Scenario::Correlating => "correlating",
        }
    }

    pub fn from_key(key: &str) -> Option<Scenario> {
        Scenario::ALL.iter().copied().find(|s| s.key() == key)
    }

    pub fn generator(self, p: &CatalogParams) -> GeneratorPair {
        let (r, b, c) = (p.r, p.b, p.c);
        let w = omega();
        let x = pauli_x();
        let a = match self {
            Scenario::FreeEvolution => block_diag(&[&w * -p.e1, &w * -p.e2]),
            Scenario::Noise | Scenario::Purifying => block_diag(&[id2() * -r, zero2()]),
            Scenario::ShieldingX => block_diag(&[id2() * -r + &x * b, zero2()]),
            Scenario::ShieldingZ => block_diag(&[id2() * -r + pauli_z() * b, zero2()]),
            Scenario::Rotation => two_mode(zero2(), &w * b, &w * b, zero2()),
            Scenario::CounterRotation => two_mode(zero2(), &x * b, &x * -b, zero2()),
            Scenario::ActiveShielding => two_mode(id2() * -r, &w * b, &w * -b, id2() * -r),
            Scenario::PassiveShielding => two_mode(id2() * -r, &x * b, &x * b, id2() * -r),
            Scenario::Correlating => RealMatrix::identity(4, 4) * -r,
        };
        let cm = match self {
            Scenario::Purifying => block_diag(&[&w * c, zero2()]),
            Scenario::Correlating => correlating_c(&[c, c, c, c]),
            _ => RealMatrix::zeros(4, 4),
        };
        GeneratorPair::new(a, cm).expect("catalog generators are well formed")
    }

    pub fn spectrum_kind(self) -> SpectrumKind {
        match self {
            Scenario::FreeEvolution | Scenario::Rotation | Scenario::CounterRotation => {
                SpectrumKind::Squared
            }
            _ => SpectrumKind::Linear,
        }
    }

    /// Closed-form left eigenvectors of `𝒜` (or `𝒜²`) with their eigenvalues.
    pub fn combinations(self, p: &CatalogParams) -> Vec<Combination> {
        let (r, b) = (p.r, p.b);
        let (dm, dp) = ((p.e1 - p.e2).powi(2), (p.e1 + p.e2).powi(2));
        let b2 = 4.0 * b * b;
        match self {
            Scenario::FreeEvolution => vec![
                combo("ν₁", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("ν₂", [0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("g₁+g₄", [0.0, 0.0, 1.0, 0.0, 0.0, 1.0], -dm),
                combo("g₁−g₄", [0.0, 0.0, 1.0, 0.0, 0.0, -1.0], -dp),
                combo("g₂+g₃", [0.0, 0.0, 0.0, 1.0, 1.0, 0.0], -dp),
                combo("g₂−g₃", [0.0, 0.0, 0.0, 1.0, -1.0, 0.0], -dm),
            ],
            Scenario::Noise | Scenario::Purifying => vec![
                combo("ν₁", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], -2.0 * r),
                combo("ν₂", [0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("g₁", [0.0, 0.0, 1.0, 0.0, 0.0, 0.0], -r),
                combo("g₂", [0.0, 0.0, 0.0, 1.0, 0.0, 0.0], -r),
                combo("g₃", [0.0, 0.0, 0.0, 0.0, 1.0, 0.0], -r),
                combo("g₄", [0.0, 0.0, 0.0, 0.0, 0.0, 1.0], -r),
            ],
            Scenario::ShieldingX => vec![
                combo("ν₁", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], -2.0 * r),
                combo("ν₂", [0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("g₁+g₃", [0.0, 0.0, 1.0, 0.0, 1.0, 0.0], -(r - b)),
                combo("g₁−g₃", [0.0, 0.0, 1.0, 0.0, -1.0, 0.0], -(r + b)),
                combo("g₂+g₄", [0.0, 0.0, 0.0, 1.0, 0.0, 1.0], -(r - b)),
                combo("g₂−g₄", [0.0, 0.0, 0.0, 1.0, 0.0, -1.0], -(r + b)),
            ],
            Scenario::ShieldingZ => vec![
                combo("ν₁", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], -2.0 * r),
                combo("ν₂", [0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("g₁", [0.0, 0.0, 1.0, 0.0, 0.0, 0.0], -(r - b)),
                combo("g₂", [0.0, 0.0, 0.0, 1.0, 0.0, 0.0], -(r - b)),
                combo("g₃", [0.0, 0.0, 0.0, 0.0, 1.0, 0.0], -(r + b)),
                combo("g₄", [0.0, 0.0, 0.0, 0.0, 0.0, 1.0], -(r + b)),
            ],
            Scenario::Rotation => vec![
                combo("ν₁−ν₂", [1.0, -1.0, 0.0, 0.0, 0.0, 0.0], -b2),
                combo("g₁+g₄", [0.0, 0.0, 1.0, 0.0, 0.0, 1.0], -b2),
                combo("ν₁+ν₂", [1.0, 1.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("g₁−g₄", [0.0, 0.0, 1.0, 0.0, 0.0, -1.0], 0.0),
                combo("g₂+g₃", [0.0, 0.0, 0.0, 1.0, 1.0, 0.0], 0.0),
                combo("g₂−g₃", [0.0, 0.0, 0.0, 1.0, -1.0, 0.0], 0.0),
            ],
            Scenario::CounterRotation => vec![
                combo("ν₁+ν₂", [1.0, 1.0, 0.0, 0.0, 0.0, 0.0], -b2),
                combo("g₁−g₄", [0.0, 0.0, 1.0, 0.0, 0.0, -1.0], -b2),
                combo("ν₁−ν₂", [1.0, -1.0, 0.0, 0.0, 0.0, 0.0], 0.0),
                combo("g₁+g₄", [0.0, 0.0, 1.0, 0.0, 0.0, 1.0], 0.0),
                combo("g₂+g₃", [0.0, 0.0, 0.0, 1.0, 1.0, 0.0], 0.0),
                combo("g₂−g₃", [0.0, 0.0, 0.0, 1.0, -1.0, 0.0], 0.0),
            ],
            Scenario::ActiveShielding => vec![
                combo("ν₁+ν₂+g₁+g₄", [1.0, 1.0, 1.0, 0.0, 0.0, 1.0], -2.0 * (r + b)),
                combo("ν₁+ν₂−g₁−g₄", [1.0, 1.0, -1.0, 0.0, 0.0, -1.0], -2.0 * (r - b)),
                combo("ν₁−ν₂", [1.0, -1.0, 0.0, 0.0, 0.0, 0.0], -2.0 * r),
                combo("g₁−g₄", [0.0, 0.0, 1.0, 0.0, 0.0, -1.0], -2.0 * r),
                combo("g₂+g₃", [0.0, 0.0, 0.0, 1.0, 1.0, 0.0], -2.0 * r),
                combo("g₂−g₃", [0.0, 0.0, 0.0, 1.0, -1.0, 0.0], -2.0 * r),
            ],
            Scenario::PassiveShielding => vec![
                combo("ν₁−ν₂+g₁−g₄", [1.0, -1.0, 1.0, 0.0, 0.0, -1.0], -2.0 * (r - b)),
                combo("ν₁−ν₂−g₁+g₄", [1.0, -1.0, -1.0, 0.0, 0.0, 1.0], -2.0 * (r + b)),
                combo("ν₁+ν₂", [1.0, 1.0, 0.0, 0.0, 0.0, 0.0], -2.0 * r),
                combo("g₁+g₄", [0.0, 0.0, 1.0, 0.0, 0.0, 1.0], -2.0 * r),
                combo("g₂+g₃", [0.0, 0.0, 0.0, 1.0, 1.0, 0.0], -2.0 * r),
                combo("g₂−g₃", [0.0, 0.0, 0.0, 1.0, -1.0, 0.0], -2.0 * r),
            ],
            Scenario::Correlating => ["ν₁", "ν₂", "g₁", "g₂", "g₃", "g₄"]
                .iter()
                .enumerate()
                .map(|(k, label)| {
                    let mut w = [0.0; 6];
                    w[k] = 1.0;
                    combo(label, w, -2.0 * r)
                })
                .collect(),
        }
    }

    /// Predicted spectrum of `𝒜` or `𝒜²` (see [`Scenario::spectrum_kind`]).
    pub fn predicted_spectrum(self, p: &CatalogParams) -> Vec<f64> {
        self.combinations(p).iter().map(|c| c.rate).collect()
    }
}

/// Correlating affine term: upper off-diagonal block `[[c₁, c₂], [c₃, c₄]]`,
/// lower block its negative transpose.
pub fn correlating_c(cs: &[f64; 4]) -> RealMatrix {
    let k = RealMatrix::from_row_slice(2, 2, cs);
    two_mode(zero2(), k.clone(), -k.transpose(), zero2())
}

/// A verified catalog row.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub scenario: Scenario,
    pub name: &'static str,
    pub class: DynamicsClass,
    pub params: CatalogParams,
    pub generator: GeneratorPair,
    pub spectrum_kind: SpectrumKind,
    pub predicted_spectrum: Vec<f64>,
    pub computed_spectrum: Vec<Complex64>,
    pub combinations: Vec<Combination>,
    /// Combinations whose rate vanishes at these parameters.
    pub conserved: Vec<Combination>,
    /// Largest discrepancy found while verifying predictions.
    pub max_deviation: f64,
}

/// Tolerance for catalog verification.
pub const TOL_CATALOG: f64 = 1e-10;

pub fn catalog_entry(scenario: Scenario, params: &CatalogParams) -> Result<CatalogEntry> {
    let gen = scenario.generator(params);
    let sys = build_g_system(&gen)?;
    let report = spectral_report(&sys);
    let kind = scenario.spectrum_kind();
    let (matrix, computed) = match kind {
        SpectrumKind::Linear => (sys.a.clone(), report.eigenvalues.clone()),
        SpectrumKind::Squared => (&sys.a * &sys.a, report.squared_eigenvalues.clone()),
    };
    let fail = |detail: String| Error::CatalogMismatch {
        entry: scenario.label().to_string(),
        detail,
    };

    let combinations = scenario.combinations(params);
    let predicted: Vec<f64> = combinations.iter().map(|c| c.rate).collect();
    let predicted_c: Vec<Complex64> = predicted.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut max_deviation = multiset_distance(&computed, &predicted_c)
        .ok_or_else(|| fail("spectrum length differs".into()))?;
    if max_deviation > TOL_CATALOG {
        return Err(fail(format!("spectrum deviates by {max_deviation:.3e}")));
    }
    for cmb in &combinations {
        let w = DVector::from_row_slice(&cmb.weights);
        let resid = (matrix.transpose() * &w - &w * cmb.rate).amax();
        max_deviation = max_deviation.max(resid);
        if resid > TOL_CATALOG {
            return Err(fail(format!("{} is not a left eigenvector (residual {resid:.3e})", cmb.label)));
        }
    }
    if !classify(&gen).present.contains(&scenario.class()) {
        return Err(fail("class absent from partition".into()));
    }
    let conserved: Vec<Combination> = combinations
        .iter()
        .filter(|c| c.rate.abs() <= TOL_CATALOG)
        .cloned()
        .collect();
    if conserved.len() != report.kernel.len() {
        return Err(fail(format!(
            "{} conserved combinations predicted, kernel has dimension {}",
            conserved.len(),
            report.kernel.len()
        )));
    }

    Ok(CatalogEntry {
        scenario,
        name: scenario.label(),
        class: scenario.class(),
        params: *params,
        generator: gen,
        spectrum_kind: kind,
        predicted_spectrum: predicted,
        computed_spectrum: computed,
        combinations,
        conserved,
        max_deviation,
    })
}

/// Every scenario, verified against the computed spectra.
pub fn catalog(params: &CatalogParams) -> Result<Vec<CatalogEntry>> {
    Scenario::ALL
        .iter()
        .map(|&s| catalog_entry(s, params))
        .collect()
}
