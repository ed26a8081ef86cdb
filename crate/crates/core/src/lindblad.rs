//! Lindblad data of a generator: an effective Hamiltonian matrix and jump channels.
//!
//! `H_eff = A_O` and the Hermitian matrix `−2A_N − iC = Σ_α γ_α ℓ_α ℓ_α†`.
//! Eigenvectors of degenerate rates are only defined up to unitary mixing, so
//! comparisons go through [`LindbladData::spectral_projectors`].

use nalgebra::DVector;
use num_complex::Complex64;

use crate::cp::TOL_CP;
use crate::error::{Error, Result};
use crate::generator::{split_orthogonal, GeneratorPair};
use crate::linalg::{
    self, check_antisymmetric, complex_max_abs, eig_hermitian, ensure_phase_space,
    ComplexMatrix, HermitianMatrix, RealMatrix, TOL_STRUCT,
};

/// Rates at or below this are dropped by [`extract_lindblad`].
pub const TOL_RATE: f64 = 1e-12;
/// Orthonormality tolerance on channel vectors.
pub const TOL_ORTHONORMAL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladChannel {
    pub rate: f64,
    pub vector: DVector<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladData {
    h_eff: RealMatrix,
    channels: Vec<LindbladChannel>,
}

impl LindbladData {
    pub fn new(h_eff: RealMatrix, channels: Vec<LindbladChannel>) -> Result<Self> {
        ensure_phase_space(&h_eff, "H_eff")?;
        check_antisymmetric(&h_eff, "H_eff", TOL_STRUCT)?;
        let dim = h_eff.nrows();
        for (index, ch) in channels.iter().enumerate() {
            let fail = |reason: String| Err(Error::InvalidChannel { index, reason });
            if ch.vector.len() != dim {
                return fail(format!("vector length {} != {dim}", ch.vector.len()));
            }
            if !ch.rate.is_finite() || ch.rate < -TOL_CP {
                return fail(format!("rate {} is negative or non-finite", ch.rate));
            }
            if (ch.vector.norm() - 1.0).abs() > TOL_ORTHONORMAL {
                return fail(format!("vector norm {} is not 1", ch.vector.norm()));
            }
        }
        for i in 0..channels.len() {
            for j in (i + 1)..channels.len() {
                let overlap = channels[i].vector.dotc(&channels[j].vector).norm();
                if overlap > TOL_ORTHONORMAL {
                    return Err(Error::InvalidChannel {
                        index: j,
                        reason: format!("overlap {overlap:.3e} with channel {i}"),
                    });
                }
            }
        }
        Ok(Self {
            h_eff: linalg::antisymmetric_part(&h_eff),
            channels,
        })
    }

    pub fn modes(&self) -> usize {
        self.h_eff.nrows() / 2
    }

    pub fn h_eff(&self) -> &RealMatrix {
        &self.h_eff
    }

    pub fn channels(&self) -> &[LindbladChannel] {
        &self.channels
    }

    pub fn rates(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.rate).collect()
    }

    /// `Σ_α γ_α ℓ_α ℓ_α†`.
    pub fn dissipation_matrix(&self) -> ComplexMatrix {
        let n = self.h_eff.nrows();
        let mut m = ComplexMatrix::zeros(n, n);
        for ch in &self.channels {
            m += &ch.vector * ch.vector.adjoint() * Complex64::new(ch.rate, 0.0);
        }
        m
    }

    /// Projectors onto the eigenspace of each distinct rate, rates ascending.
    /// Rates within `tol` of each other are merged.
    pub fn spectral_projectors(&self, tol: f64) -> Vec<(f64, ComplexMatrix)> {
        let mut sorted: Vec<&LindbladChannel> = self.channels.iter().collect();
        sorted.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        let n = self.h_eff.nrows();
        let mut out: Vec<(f64, ComplexMatrix, usize)> = Vec::new();
        for ch in sorted {
            let proj = &ch.vector * ch.vector.adjoint();
            match out.last_mut() {
                Some((rate, p, count)) if (ch.rate - *rate).abs() <= tol => {
                    *rate = (*rate * *count as f64 + ch.rate) / (*count as f64 + 1.0);
                    *p += proj;
                    *count += 1;
                }
                _ => out.push((ch.rate, proj, 1)),
            }
        }
        debug_assert!(out.iter().all(|(_, p, _)| p.nrows() == n));
        out.into_iter().map(|(r, p, _)| (r, p)).collect()
    }
}

/// Hermitian matrix `−2A_N − iC`.
pub fn dissipation_target(gen: &GeneratorPair) -> HermitianMatrix {
    let (_, a_n) = split_orthogonal(gen.a());
    HermitianMatrix::from_parts(&(a_n * -2.0), &-gen.c())
        .expect("symmetric plus i·antisymmetric is Hermitian")
}

pub fn extract_lindblad(gen: &GeneratorPair) -> Result<LindbladData> {
    let (a_o, _) = split_orthogonal(gen.a());
    let e = eig_hermitian(&dissipation_target(gen));
    if e.min() < -TOL_CP {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: e.min(),
        });
    }
    let channels = e
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > TOL_RATE)
        .map(|(k, &g)| LindbladChannel {
            rate: g,
            vector: e.eigenvectors.column(k).into_owned(),
        })
        .collect();
    Ok(LindbladData {
        h_eff: a_o,
        channels,
    })
}

pub fn rebuild_generator(ld: &LindbladData) -> GeneratorPair {
    let m = ld.dissipation_matrix();
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let a_n = linalg::symmetric_part(&re) * -0.5;
    let c = linalg::antisymmetric_part(&im) * -1.0;
    GeneratorPair::new(&ld.h_eff + a_n, c).expect("shapes come from validated data")
}

/// One term `coefficient · operator` of `Ĥ = (i/2) r̂ᵀ H r̂` in ladder-operator form.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub coefficient: Complex64,
    pub operator: String,
}

impl std::fmt::Display for HamiltonianTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let z = self.coefficient;
        if z.im == 0.0 {
            write!(f, "{} · {}", z.re, self.operator)
        } else {
            write!(f, "({}{:+}i) · {}", z.re, z.im, self.operator)
        }
    }
}

/// Ladder operator symbol for 0-based mode `j`, e.g. `â₁†`.
pub fn ladder_label(j: usize, dagger: bool) -> String {
    format!("â{}{}", subscript(j + 1), if dagger { "†" } else { "" })
}

fn subscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap_or(0) as usize])
        .collect()
}

/// Expands `Ĥ = (i/2) r̂ᵀ H r̂` into number operators, cross-mode ladder pairs
/// (`â_j â_k`, `â_j â_k†`, `â_j† â_k`, `â_j† â_k†` for `j < k`) and a constant.
pub fn effective_hamiltonian_operator(h: &RealMatrix) -> Result<Vec<HamiltonianTerm>> {
    let n = ensure_phase_space(h, "H")?;
    check_antisymmetric(h, "H", TOL_STRUCT)?;
    let cutoff = 1e-15 * h.amax().max(1.0);
    let i = Complex64::new(0.0, 1.0);
    let half_i = Complex64::new(0.0, 0.5);
    let mut terms = Vec::new();
    let mut push = |coefficient: Complex64, operator: String| {
        if coefficient.norm() > cutoff {
            terms.push(HamiltonianTerm {
                coefficient,
                operator,
            });
        }
    };

    let mut constant = 0.0;
    for j in 0..n {
        let hj = h[(2 * j, 2 * j + 1)];
        push(Complex64::new(-hj, 0.0), format!("n̂{}", subscript(j + 1)));
        constant += hj / 2.0;
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let b = h.view((2 * j, 2 * k), (2, 2));
            let (xx, xp, px, pp) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
            let (aj, ajd) = (ladder_label(j, false), ladder_label(j, true));
            let (ak, akd) = (ladder_label(k, false), ladder_label(k, true));
            push(half_i * (xx + i * xp + i * px - pp), format!("{aj} {ak}"));
            push(half_i * (xx - i * xp + i * px + pp), format!("{aj} {akd}"));
            push(half_i * (xx + i * xp - i * px + pp), format!("{ajd} {ak}"));
            push(half_i * (xx - i * xp - i * px - pp), format!("{ajd} {akd}"));
        }
    }
    push(Complex64::new(constant, 0.0), "1".to_string());
    Ok(terms)
}

/// Largest entrywise gap between two Lindblad data sets, compared through
/// `H_eff` and the dissipation matrix.
pub fn data_distance(a: &LindbladData, b: &LindbladData) -> f64 {
    let h = (a.h_eff() - b.h_eff()).amax();
    let m = complex_max_abs(&(a.dissipation_matrix() - b.dissipation_matrix()));
    h.max(m)
}
