//! Brute-force Fock-space oracle for up to three modes.
//!
//! Conventions: basis `|n₁ … n_N⟩` with mode 1 the most significant bit,
//! `σ⁻ = [[0, 1], [0, 0]]` on `(|0⟩, |1⟩)` and `Z = diag(1, −1)`. The
//! Jordan–Wigner string is
//! `â_j = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ 1 ⊗ … ⊗ 1` (σ⁻ at position `j`), with
//! `x̂ = (â + â†)/√2`, `p̂ = i(â − â†)/√2` and parity `P = Z^{⊗N}`.
//!
//! Jump channels `(γ, ℓ)` become `L̂ = (√γ/2)·ℓ†r̂` so that
//! `ρ̇ = −i[Ĥ, ρ] + Σ (2L̂ρL̂† − {L̂†L̂, ρ})` reproduces `dΓ/dt = AΓ + ΓAᵀ + C`
//! with `γ, ℓ` the eigenpairs of `−2A_N − iC`.

use num_complex::Complex64;

use crate::dynamics::{evolve_master, uniform_grid};
use crate::error::{Error, Result};
use crate::generator::GeneratorPair;
use crate::lindblad::{extract_lindblad, LindbladChannel, LindbladData};
use crate::linalg::{
    self, complex_max_abs, eig_hermitian, hermitian_defect, ComplexMatrix, HermitianMatrix,
    RealMatrix,
};
use crate::state::CovarianceMatrix;

pub const MAX_MODES: usize = 3;
/// Oracle step size.
pub const FOCK_STEP: f64 = 1e-3;
/// Agreement required by [`cross_validate`].
pub const TOL_CROSS: f64 = 1e-5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct FockOperators {
    modes: usize,
    pub a: Vec<ComplexMatrix>,
    pub a_dag: Vec<ComplexMatrix>,
    pub x: Vec<ComplexMatrix>,
    pub p: Vec<ComplexMatrix>,
    pub n: Vec<ComplexMatrix>,
    pub parity: ComplexMatrix,
}

impl FockOperators {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim(), self.dim())
    }

    /// `r̂_k` in the interleaved ordering `(x̂₁, p̂₁, x̂₂, …)`.
    pub fn majorana(&self, k: usize) -> &ComplexMatrix {
        if k.is_multiple_of(2) {
            &self.x[k / 2]
        } else {
            &self.p[k / 2]
        }
    }

    /// `Σ_k v_k r̂_k`.
    pub fn linear_form(&self, v: &[Complex64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (k, &c) in v.iter().enumerate() {
            if c != ZERO {
                out += self.majorana(k) * c;
            }
        }
        out
    }
}

fn kron_chain(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

pub fn build_operators(modes: usize) -> Result<FockOperators> {
    if modes == 0 {
        return Err(Error::Empty { what: "mode list" });
    }
    if modes > MAX_MODES {
        return Err(Error::TooManyModes {
            modes,
            max: MAX_MODES,
        });
    }
    let id = ComplexMatrix::identity(2, 2);
    let z = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    let lower = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    let mut a = Vec::with_capacity(modes);
    for j in 0..modes {
        let factors: Vec<ComplexMatrix> = (0..modes)
            .map(|k| match k.cmp(&j) {
                std::cmp::Ordering::Less => z.clone(),
                std::cmp::Ordering::Equal => lower.clone(),
                std::cmp::Ordering::Greater => id.clone(),
            })
            .collect();
        a.push(kron_chain(&factors));
    }
    let a_dag: Vec<ComplexMatrix> = a.iter().map(|m| m.adjoint()).collect();
    let x = a.iter().zip(&a_dag).map(|(a, d)| (a + d) * s).collect();
    let p = a.iter().zip(&a_dag).map(|(a, d)| (a - d) * (I * s)).collect();
    let n = a.iter().zip(&a_dag).map(|(a, d)| d * a).collect();
    let parity = kron_chain(&vec![z; modes]);
    Ok(FockOperators {
        modes,
        a,
        a_dag,
        x,
        p,
        n,
        parity,
    })
}

/// Largest deviation from the canonical anticommutation relations.
pub fn car_residual(ops: &FockOperators) -> f64 {
    let anti = |u: &ComplexMatrix, v: &ComplexMatrix| u * v + v * u;
    let id = ops.identity();
    let mut worst: f64 = 0.0;
    for i in 0..ops.modes {
        for j in 0..ops.modes {
            let delta = if i == j { id.clone() } else { id.clone() * ZERO };
            worst = worst.max(complex_max_abs(&(anti(&ops.a[i], &ops.a_dag[j]) - &delta)));
            worst = worst.max(complex_max_abs(&anti(&ops.a[i], &ops.a[j])));
            worst = worst.max(complex_max_abs(&(anti(&ops.x[i], &ops.x[j]) - &delta)));
            worst = worst.max(complex_max_abs(&(anti(&ops.p[i], &ops.p[j]) - &delta)));
            worst = worst.max(complex_max_abs(&anti(&ops.x[i], &ops.p[j])));
        }
    }
    worst = worst.max(complex_max_abs(&(&ops.parity * &ops.parity - &id)));
    worst
}

/// Health of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDefects {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub parity_commutator: f64,
}

impl DensityDefects {
    pub fn is_physical(&self, tol: f64) -> bool {
        self.hermiticity <= tol
            && self.trace_error <= tol
            && self.min_eigenvalue >= -tol
            && self.parity_commutator <= tol
    }
}

pub fn density_defects(ops: &FockOperators, rho: &ComplexMatrix) -> DensityDefects {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eigenvalue = eig_hermitian(&HermitianMatrix::with_tolerance(herm, f64::INFINITY).expect("symmetrized"))
        .min();
    DensityDefects {
        hermiticity: hermitian_defect(rho),
        trace_error: (rho.trace() - ONE).norm(),
        min_eigenvalue,
        parity_commutator: complex_max_abs(&(&ops.parity * rho - rho * &ops.parity)),
    }
}

/// Density matrix of the Gaussian state with covariance `Γ`.
///
/// The Hermitian eigendecomposition of `iΓ` pairs the Majoranas into modes
/// `(r̃_a, r̃_b)` with monotones `ν_k`; the state is
/// `2^{−N} Π_k (1 + 2iν_k r̃_a r̃_b)`.
pub fn gaussian_to_rho(ops: &FockOperators, gamma: &CovarianceMatrix) -> Result<ComplexMatrix> {
    if gamma.modes() != ops.modes {
        return Err(Error::DimensionMismatch {
            expected: 2 * ops.modes,
            found: gamma.dim(),
        });
    }
    let p = gamma.is_physical();
    if !p.physical {
        return Err(Error::UnphysicalState {
            violation: p.violation,
        });
    }
    let g = gamma.matrix();
    let i_gamma = HermitianMatrix::new(linalg::to_complex(g) * I).expect("iΓ is Hermitian");
    let e = eig_hermitian(&i_gamma);
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut rho = ops.identity();
    for (k, &lam) in e.eigenvalues.iter().enumerate() {
        if lam <= 1e-12 {
            continue;
        }
        let v = e.eigenvectors.column(k);
        let e1 = RealMatrix::from_iterator(g.nrows(), 1, v.iter().map(|z| z.re * sqrt2));
        let e2 = RealMatrix::from_iterator(g.nrows(), 1, v.iter().map(|z| z.im * sqrt2));
        let nu = (e1.transpose() * g * &e2)[(0, 0)];
        let ra = ops.linear_form(&e1.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
        let rb = ops.linear_form(&e2.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
        let factor = ops.identity() + ra * rb * (I * 2.0 * nu);
        rho *= factor;
    }
    Ok(rho / Complex64::new(ops.dim() as f64, 0.0))
}

/// `Γ_nm = i·Tr(ρ[r̂_n, r̂_m])`.
pub fn rho_to_gamma(ops: &FockOperators, rho: &ComplexMatrix) -> CovarianceMatrix {
    let d = 2 * ops.modes;
    let mut g = RealMatrix::zeros(d, d);
    for n in 0..d {
        for m in (n + 1)..d {
            let rn = ops.majorana(n);
            let rm = ops.majorana(m);
            let comm = rn * rm - rm * rn;
            let val = (I * (rho * comm).trace()).re;
            g[(n, m)] = val;
            g[(m, n)] = -val;
        }
    }
    CovarianceMatrix::from_computed(&g)
}

/// `Ĥ = (i/2) Σ H_nm r̂_n r̂_m`.
pub fn quadratic_hamiltonian(ops: &FockOperators, h: &RealMatrix) -> ComplexMatrix {
    let d = 2 * ops.modes;
    let mut out = ComplexMatrix::zeros(ops.dim(), ops.dim());
    for n in 0..d {
        for m in 0..d {
            if h[(n, m)] != 0.0 {
                out += ops.majorana(n) * ops.majorana(m) * (I * (0.5 * h[(n, m)]));
            }
        }
    }
    out
}

/// `L̂ = (√γ/2)·ℓ†r̂`.
pub fn jump_operator(ops: &FockOperators, ch: &LindbladChannel) -> ComplexMatrix {
    let scale = ch.rate.max(0.0).sqrt() / 2.0;
    let coeffs: Vec<Complex64> = ch.vector.iter().map(|z| z.conj() * scale).collect();
    ops.linear_form(&coeffs)
}

/// Lindblad superoperator assembled once for repeated evaluation.
#[derive(Debug, Clone)]
pub struct FockGenerator {
    hamiltonian: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>,
}

impl FockGenerator {
    pub fn new(ops: &FockOperators, ld: &LindbladData) -> Result<Self> {
        if ld.modes() != ops.modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * ops.modes,
                found: 2 * ld.modes(),
            });
        }
        let jumps = ld
            .channels()
            .iter()
            .map(|ch| {
                let l = jump_operator(ops, ch);
                let ld = l.adjoint();
                let ldl = &ld * &l;
                (l, ld, ldl)
            })
            .collect();
        Ok(Self {
            hamiltonian: quadratic_hamiltonian(ops, ld.h_eff()),
            jumps,
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.hamiltonian;
        let mut out = (h * rho - rho * h) * -I;
        for (l, ld, ldl) in &self.jumps {
            out += (l * rho * ld) * Complex64::new(2.0, 0.0) - ldl * rho - rho * ldl;
        }
        out
    }
}

/// `ρ̇` for Lindblad data `ld`.
pub fn lindblad_rhs(ops: &FockOperators, ld: &LindbladData, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(FockGenerator::new(ops, ld)?.rhs(rho))
}

/// Fixed-step RK4 on the density matrix, sampled at `t_grid` (from `t = 0`).
pub fn integrate_density(gen: &FockGenerator, rho0: &ComplexMatrix, t_grid: &[f64]) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(t_grid.len());
    let mut rho = rho0.clone();
    let mut t = 0.0;
    for &target in t_grid {
        let dt = target - t;
        if dt > 0.0 {
            let steps = (dt / FOCK_STEP).ceil().max(1.0) as usize;
            let h = Complex64::new(dt / steps as f64, 0.0);
            let half = h * 0.5;
            for _ in 0..steps {
                let k1 = gen.rhs(&rho);
                let k2 = gen.rhs(&(&rho + &k1 * half));
                let k3 = gen.rhs(&(&rho + &k2 * half));
                let k4 = gen.rhs(&(&rho + &k3 * h));
                rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (h / 6.0);
            }
        }
        t = target;
        out.push(rho.clone());
    }
    out
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// Worst density-matrix defect seen along the oracle trajectory.
    pub worst_defects: DensityDefects,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.max_deviation <= TOL_CROSS
    }
}

/// Runs the phase-space and Fock-space evolutions side by side on
/// `samples` points in `[0, t_max]` and reports `‖Γ_fock(t) − Γ(t)‖_max`.
pub fn cross_validate(
    gen: &GeneratorPair,
    gamma0: &CovarianceMatrix,
    t_max: f64,
    samples: usize,
) -> Result<CrossValidation> {
    let ops = build_operators(gen.modes())?;
    let ld = extract_lindblad(gen)?;
    let p = gamma0.is_physical();
    if !p.physical {
        return Err(Error::UnphysicalInitialState {
            violation: p.violation,
        });
    }
    let grid = uniform_grid(t_max, samples)?;
    let traj = evolve_master(gen, gamma0, &grid)?;
    let fock = FockGenerator::new(&ops, &ld)?;
    let rho0 = gaussian_to_rho(&ops, gamma0)?;
    let rhos = integrate_density(&fock, &rho0, &grid);

    let mut deviations = Vec::with_capacity(grid.len());
    let mut worst = DensityDefects {
        hermiticity: 0.0,
        trace_error: 0.0,
        min_eigenvalue: f64::INFINITY,
        parity_commutator: 0.0,
    };
    for (rho, state) in rhos.iter().zip(&traj.states) {
        let g = rho_to_gamma(&ops, rho);
        deviations.push((g.matrix() - state.matrix()).amax());
        let d = density_defects(&ops, rho);
        worst.hermiticity = worst.hermiticity.max(d.hermiticity);
        worst.trace_error = worst.trace_error.max(d.trace_error);
        worst.min_eigenvalue = worst.min_eigenvalue.min(d.min_eigenvalue);
        worst.parity_commutator = worst.parity_commutator.max(d.parity_commutator);
    }
    let max_deviation = deviations.iter().fold(0.0, |m: f64, &d| m.max(d));
    Ok(CrossValidation {
        times: grid,
        deviations,
        max_deviation,
        worst_defects: worst,
    })
}

/// `max_k ‖i[Ĥ, r̂_k] − Σ_n H_kn r̂_n‖_max` for `Ĥ = (i/2) r̂ᵀHr̂`.
pub fn heisenberg_residual(ops: &FockOperators, h: &RealMatrix) -> f64 {
    let hop = quadratic_hamiltonian(ops, h);
    let d = 2 * ops.modes;
    (0..d)
        .map(|k| {
            let rk = ops.majorana(k);
            let lhs = (&hop * rk - rk * &hop) * I;
            let coeffs: Vec<Complex64> = (0..d).map(|n| Complex64::new(h[(k, n)], 0.0)).collect();
            complex_max_abs(&(lhs - ops.linear_form(&coeffs)))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::noise_deficit;
    use crate::lindblad::effective_hamiltonian_operator;
    use crate::linalg::{expm, omega};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_state(rng: &mut impl Rng, modes: usize) -> CovarianceMatrix {
        let nus: Vec<f64> = (0..modes).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = RealMatrix::from_fn(2 * modes, 2 * modes, |_, _| rng.random_range(-1.0..1.0));
        let o = expm(&(&h - h.transpose()), 1.0).unwrap();
        CovarianceMatrix::thermal(&nus).unwrap().transformed(&o).unwrap()
    }

    #[test]
    fn single_mode_operators() {
        let ops = build_operators(1).unwrap();
        assert_eq!(ops.a[0], ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));
        assert_eq!(ops.n[0], ComplexMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]));
    }

    #[test]
    fn car_holds() {
        for n in 1..=3 {
            let ops = build_operators(n).unwrap();
            assert!(car_residual(&ops) < 1e-12);
            for a in &ops.a {
                assert!(complex_max_abs(&(a * a)) < 1e-15);
            }
        }
        assert!(matches!(build_operators(4), Err(Error::TooManyModes { .. })));
    }

    #[test]
    fn rho_examples() {
        let ops = build_operators(2).unwrap();
        let rho = gaussian_to_rho(&ops, &CovarianceMatrix::maximally_mixed(2)).unwrap();
        assert!(complex_max_abs(&(rho - ops.identity() * c(0.25))) < 1e-15);

        let ops = build_operators(1).unwrap();
        let rho = gaussian_to_rho(&ops, &CovarianceMatrix::thermal(&[1.0]).unwrap()).unwrap();
        let ground = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        assert!(complex_max_abs(&(rho - ground)) < 1e-15);

        let nu = 0.3;
        let rho = gaussian_to_rho(&ops, &CovarianceMatrix::thermal(&[nu]).unwrap()).unwrap();
        assert!((rho[(0, 0)] - c((1.0 + nu) / 2.0)).norm() < 1e-15);
        assert!((rho[(1, 1)] - c((1.0 - nu) / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn rho_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for n in 1..=3 {
            let ops = build_operators(n).unwrap();
            for _ in 0..20 {
                let g = random_state(&mut rng, n);
                let rho = gaussian_to_rho(&ops, &g).unwrap();
                assert!(density_defects(&ops, &rho).is_physical(1e-10));
                let back = rho_to_gamma(&ops, &rho);
                assert!((back.matrix() - g.matrix()).amax() < 1e-9);
            }
        }
        let ops = build_operators(1).unwrap();
        let hot = CovarianceMatrix::new(omega() * 1.3).unwrap();
        assert!(matches!(gaussian_to_rho(&ops, &hot), Err(Error::UnphysicalState { .. })));
    }

    #[test]
    fn heisenberg_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for n in 1..=3 {
            let ops = build_operators(n).unwrap();
            for _ in 0..10 {
                let h = RealMatrix::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-1.0..1.0));
                assert!(heisenberg_residual(&ops, &(&h - h.transpose())) < 1e-10);
            }
        }
    }

    #[test]
    fn hamiltonian_terms_match_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for n in 1..=3 {
            let ops = build_operators(n).unwrap();
            let h = RealMatrix::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-1.0..1.0));
            let h = &h - h.transpose();
            let mut rebuilt = ComplexMatrix::zeros(ops.dim(), ops.dim());
            for term in effective_hamiltonian_operator(&h).unwrap() {
                let op = parse_term(&ops, &term.operator);
                rebuilt += op * term.coefficient;
            }
            assert!(complex_max_abs(&(rebuilt - quadratic_hamiltonian(&ops, &h))) < 1e-12);
        }
    }

    fn parse_term(ops: &FockOperators, label: &str) -> ComplexMatrix {
        if label == "1" {
            return ops.identity();
        }
        let digit = |ch: char| "₀₁₂₃₄₅₆₇₈₉".chars().position(|d| d == ch).unwrap() - 1;
        if let Some(rest) = label.strip_prefix("n̂") {
            return ops.n[digit(rest.chars().next().unwrap())].clone();
        }
        let mut out = ops.identity();
        for factor in label.split(' ') {
            let mut chars = factor.chars().skip(1);
            let j = digit(chars.next().unwrap());
            let dag = chars.next() == Some('†');
            out *= if dag { &ops.a_dag[j] } else { &ops.a[j] };
        }
        out
    }

    #[test]
    fn orthogonal_rhs_is_commutator() {
        let ops = build_operators(1).unwrap();
        let h = omega() * -0.8;
        let ld = extract_lindblad(&GeneratorPair::linear(h.clone()).unwrap()).unwrap();
        let rho = gaussian_to_rho(&ops, &CovarianceMatrix::thermal(&[0.4]).unwrap()).unwrap();
        let hop = quadratic_hamiltonian(&ops, &h);
        let expected = (&hop * &rho - &rho * &hop) * -I;
        let got = lindblad_rhs(&ops, &ld, &rho).unwrap();
        assert!(complex_max_abs(&(got - expected)) < 1e-15);
    }

    #[test]
    fn noise_drives_toward_mixed() {
        let ops = build_operators(1).unwrap();
        let r = 0.5;
        let ld = extract_lindblad(&GeneratorPair::linear(RealMatrix::identity(2, 2) * -r).unwrap()).unwrap();
        let ground = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let d = lindblad_rhs(&ops, &ld, &ground).unwrap();
        // ν′ = −2rν at ν = 1 means ρ₀₀′ = −r and ρ₁₁′ = +r.
        assert!((d[(0, 0)] - c(-r)).norm() < 1e-14);
        assert!((d[(1, 1)] - c(r)).norm() < 1e-14);
        assert!(d.trace().norm() < 1e-14);

        // Unital without C: the maximally mixed state is stationary.
        let mixed = ops.identity() * c(0.5);
        assert!(complex_max_abs(&lindblad_rhs(&ops, &ld, &mixed).unwrap()) < 1e-15);
    }

    #[test]
    fn cross_validate_examples() {
        let free = GeneratorPair::linear(omega() * -1.0).unwrap();
        let cv = cross_validate(&free, &CovarianceMatrix::thermal(&[0.6]).unwrap(), 1.0, 5).unwrap();
        assert!(cv.max_deviation < 1e-12);

        let noise = GeneratorPair::linear(RealMatrix::identity(2, 2) * -0.5).unwrap();
        let cv = cross_validate(&noise, &CovarianceMatrix::thermal(&[1.0]).unwrap(), 2.0, 11).unwrap();
        assert!(cv.passed(), "{}", cv.max_deviation);

        let mut a = RealMatrix::zeros(4, 4);
        a.view_mut((0, 2), (2, 2)).copy_from(&(omega() * 0.5));
        a.view_mut((2, 0), (2, 2)).copy_from(&(omega() * 0.5));
        let rot = GeneratorPair::linear(a).unwrap();
        let g0 = CovarianceMatrix::thermal(&[0.9, -0.2]).unwrap();
        let cv = cross_validate(&rot, &g0, 2.0, 11).unwrap();
        assert!(cv.passed(), "{}", cv.max_deviation);

        let bad = GeneratorPair::new(RealMatrix::zeros(2, 2), omega()).unwrap();
        assert!(matches!(
            cross_validate(&bad, &CovarianceMatrix::maximally_mixed(1), 1.0, 3),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn oracle_preserves_trace_hermiticity_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for n in 1..=2 {
            let d = 2 * n;
            let a = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
            let cm = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
            let g = GeneratorPair::new(a, &cm - cm.transpose()).unwrap();
            let g = g.shifted(-(noise_deficit(&g) + 0.1));
            let cv = cross_validate(&g, &random_state(&mut rng, n), 1.5, 7).unwrap();
            assert!(cv.passed(), "{}", cv.max_deviation);
            let w = cv.worst_defects;
            assert!(w.trace_error < 1e-9 && w.hermiticity < 1e-9);
            assert!(w.parity_commutator < 1e-10);
            assert!(w.min_eigenvalue > -1e-9);
        }
    }
}
