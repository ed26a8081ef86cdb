//! Covariance matrices of fermionic Gaussian states.
//!
//! `Γ_nm = i⟨[r_n, r_m]⟩` for the Majorana vector `r = (x₁, p₁, …, x_N, p_N)`.
//! First moments vanish for physical states and are not stored.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_antisymmetric, ensure_phase_space, omega, symplectic_form, HermitianMatrix,
    RealMatrix, TOL_STRUCT,
};

/// Tolerance on `λ_max(ΓΓᵀ) − 1`.
pub const TOL_PHYSICAL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    gamma: RealMatrix,
}

/// Outcome of the physicality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    /// `max(0, λ_max(ΓΓᵀ) − 1)`.
    pub violation: f64,
}

impl CovarianceMatrix {
    /// Validates shape and antisymmetry. Physicality is checked separately.
    pub fn new(gamma: RealMatrix) -> Result<Self> {
        ensure_phase_space(&gamma, "Γ")?;
        check_antisymmetric(&gamma, "Γ", TOL_STRUCT)?;
        Ok(Self {
            gamma: linalg::antisymmetric_part(&gamma),
        })
    }

    /// Antisymmetrizes `gamma` instead of validating it. For computed states.
    pub fn from_computed(gamma: &RealMatrix) -> Self {
        debug_assert!(gamma.is_square() && gamma.nrows().is_multiple_of(2));
        Self {
            gamma: linalg::antisymmetric_part(gamma),
        }
    }

    /// The infinite-temperature state `Γ = 0`.
    pub fn maximally_mixed(modes: usize) -> Self {
        Self {
            gamma: RealMatrix::zeros(2 * modes, 2 * modes),
        }
    }

    /// Block-diagonal `⊕ ν_j ω`.
    pub fn thermal(nus: &[f64]) -> Result<Self> {
        if nus.is_empty() {
            return Err(Error::Empty { what: "ν list" });
        }
        let n = nus.len();
        let mut gamma = RealMatrix::zeros(2 * n, 2 * n);
        for (j, &nu) in nus.iter().enumerate() {
            if !(-1.0..=1.0).contains(&nu) {
                return Err(Error::OutOfRangeNu { mode: j, nu });
            }
            gamma[(2 * j, 2 * j + 1)] = nu;
            gamma[(2 * j + 1, 2 * j)] = -nu;
        }
        Ok(Self { gamma })
    }

    pub fn modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.gamma
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.gamma
    }

    pub fn is_physical(&self) -> Physicality {
        self.physicality_with_tol(TOL_PHYSICAL)
    }

    pub fn physicality_with_tol(&self, tol: f64) -> Physicality {
        let gg = &self.gamma * self.gamma.transpose();
        let lmax = linalg::symmetric_eigenvalues(&gg)
            .last()
            .copied()
            .unwrap_or(0.0);
        Physicality {
            physical: lmax <= 1.0 + tol,
            violation: (lmax - 1.0).max(0.0),
        }
    }

    /// `⟨n̂⟩ = N/2 + ¼·Tr(ΩΓ)`.
    pub fn excitation_number(&self) -> f64 {
        let n = self.modes();
        let omega_big = symplectic_form(n);
        n as f64 / 2.0 + 0.25 * (omega_big * &self.gamma).trace()
    }

    /// `ν_j = Γ[2j, 2j+1]` for 0-based mode `j`.
    pub fn mode_nu(&self, j: usize) -> Result<f64> {
        if j >= self.modes() {
            return Err(Error::IndexOutOfRange {
                index: j,
                modes: self.modes(),
            });
        }
        Ok(self.gamma[(2 * j, 2 * j + 1)])
    }

    pub fn nus(&self) -> Vec<f64> {
        (0..self.modes())
            .map(|j| self.gamma[(2 * j, 2 * j + 1)])
            .collect()
    }

    /// Excitation number of each mode, `½ − ν_j/2`.
    pub fn mode_occupations(&self) -> Vec<f64> {
        self.nus().into_iter().map(|nu| 0.5 - nu / 2.0).collect()
    }

    /// Conjugation `OΓOᵀ`.
    pub fn transformed(&self, o: &RealMatrix) -> Result<Self> {
        if o.nrows() != self.dim() || o.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: o.nrows(),
            });
        }
        Ok(Self::from_computed(&(o * &self.gamma * o.transpose())))
    }

    /// Clamps the spectrum of `iΓ` into `[−1, 1]`. Only applied on request.
    pub fn repaired(&self) -> Self {
        let i_gamma = linalg::to_complex(&self.gamma) * Complex64::new(0.0, 1.0);
        let h = HermitianMatrix::new(i_gamma).expect("iΓ is Hermitian for antisymmetric Γ");
        let mut e = linalg::eig_hermitian(&h);
        for lam in e.eigenvalues.iter_mut() {
            *lam = lam.clamp(-1.0, 1.0);
        }
        let rebuilt = e.reconstruct() * Complex64::new(0.0, -1.0);
        Self::from_computed(&rebuilt.map(|z| z.re))
    }

    /// Upper-triangle entries `Γ_ij`, `i < j`, row-major.
    pub fn upper_triangle(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_iterator(
            n * (n - 1) / 2,
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| self.gamma[(i, j)]),
        )
    }
}

/// `β = (2/E)·atanh(ν)`.
pub fn beta_from_nu(nu: f64, energy: f64) -> Result<f64> {
    if !(nu.abs() < 1.0) {
        return Err(Error::DomainError(format!(
            "|ν| = {} gives infinite inverse temperature",
            nu.abs()
        )));
    }
    if !(energy > 0.0) {
        return Err(Error::DomainError(format!(
            "mode energy must be positive, got {energy}"
        )));
    }
    Ok(2.0 / energy * nu.atanh())
}

/// `ν = tanh(βE/2)`.
pub fn nu_from_beta(beta: f64, energy: f64) -> f64 {
    (beta * energy / 2.0).tanh()
}

/// Single-mode block `ν ω`.
pub fn mode_block(nu: f64) -> RealMatrix {
    omega() * nu
}
