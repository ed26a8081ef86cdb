//! Propagation of covariance matrices.

use crate::cp::{check_generator_cp, GaussianChannel};
use crate::error::{Error, Result};
use crate::generator::GeneratorPair;
use crate::linalg::{check_antisymmetric, ensure_phase_space, expm, lyapunov_particular, lyapunov_solve, symplectic_form, RealMatrix, TOL_STRUCT};
use crate::state::CovarianceMatrix;

/// Violation beyond which a completely positive evolution is aborted.
pub const TOL_TRAJECTORY: f64 = 1e-8;
/// Upper bound on the RK4 step.
pub const RK4_MAX_STEP: f64 = 1e-3;

pub fn apply_channel(ch: &GaussianChannel, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if ch.modes() != gamma.modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * ch.modes(),
            found: gamma.dim(),
        });
    }
    let out = ch.o_a() * gamma.matrix() * ch.o_a().transpose() + ch.r();
    Ok(CovarianceMatrix::from_computed(&out))
}

/// `Γ(t) = e^{Ht} Γ₀ e^{Hᵀt}`.
pub fn evolve_orthogonal(h: &RealMatrix, gamma0: &CovarianceMatrix, t: f64) -> Result<CovarianceMatrix> {
    ensure_phase_space(h, "H")?;
    check_antisymmetric(h, "H", TOL_STRUCT)?;
    if h.nrows() != gamma0.dim() {
        return Err(Error::DimensionMismatch {
            expected: gamma0.dim(),
            found: h.nrows(),
        });
    }
    let o = expm(h, t)?;
    gamma0.transformed(&o)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SteadyState {
    Unique(CovarianceMatrix),
    NoUniqueFixedPoint,
}

impl SteadyState {
    pub fn unique(&self) -> Option<&CovarianceMatrix> {
        match self {
            SteadyState::Unique(s) => Some(s),
            SteadyState::NoUniqueFixedPoint => None,
        }
    }
}

pub fn steady_state(gen: &GeneratorPair) -> SteadyState {
    match lyapunov_solve(gen.a(), gen.c()) {
        Ok(s) => SteadyState::Unique(CovarianceMatrix::from_computed(&s)),
        Err(_) => SteadyState::NoUniqueFixedPoint,
    }
}

/// `d⟨n̂⟩/dt = ¼ Tr((ΩA − (ΩA)ᵀ)Γ + ΩC)`.
pub fn activity_rate(gen: &GeneratorPair, gamma: &CovarianceMatrix) -> Result<f64> {
    if gen.modes() != gamma.modes() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: gamma.dim(),
        });
    }
    let om = symplectic_form(gen.modes());
    let wa = &om * gen.a();
    let lin = (&wa - wa.transpose()) * gamma.matrix();
    Ok(0.25 * (lin.trace() + (&om * gen.c()).trace()))
}

/// `n` points from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidTimeGrid(format!("t_max must be positive, got {t_max}")));
    }
    if samples < 2 {
        return Err(Error::InvalidTimeGrid(format!("need at least 2 samples, got {samples}")));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(|k| t_max * k as f64 / last).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Propagation {
    ClosedForm,
    Rk4,
}

/// How [`evolve_master_with`] propagates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed form when a unique steady state exists, RK4 otherwise.
    Auto,
    Rk4,
}

/// Per-sample observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub nus: Vec<f64>,
    pub excitation: f64,
    pub activity: f64,
    pub physical: bool,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
    pub observables: Vec<Observables>,
    pub propagation: Propagation,
    pub steady_state: Option<CovarianceMatrix>,
}

impl Trajectory {
    pub fn modes(&self) -> usize {
        self.states.first().map_or(0, |s| s.modes())
    }

    pub fn last(&self) -> &CovarianceMatrix {
        self.states.last().expect("trajectories are non-empty")
    }

    pub fn max_violation(&self) -> f64 {
        self.observables.iter().fold(0.0, |m, o| m.max(o.violation))
    }
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidTimeGrid("empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid("non-finite time".into()));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::InvalidTimeGrid("times must be non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid("times must be strictly increasing".into()));
    }
    Ok(())
}

pub fn evolve_master(gen: &GeneratorPair, gamma0: &CovarianceMatrix, t_grid: &[f64]) -> Result<Trajectory> {
    evolve_master_with(gen, gamma0, t_grid, Method::Auto)
}

/// Evolves `Γ₀` from `t = 0` and samples at each time in `t_grid`.
pub fn evolve_master_with(
    gen: &GeneratorPair,
    gamma0: &CovarianceMatrix,
    t_grid: &[f64],
    method: Method,
) -> Result<Trajectory> {
    validate_grid(t_grid)?;
    if gen.modes() != gamma0.modes() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: gamma0.dim(),
        });
    }
    let p0 = gamma0.is_physical();
    if !p0.physical {
        return Err(Error::UnphysicalInitialState {
            violation: p0.violation,
        });
    }
    let cp = check_generator_cp(gen).is_cp;
    let steady = match method {
        Method::Auto => steady_state(gen).unique().cloned(),
        Method::Rk4 => None,
    };

    // The closed form only needs some stationary S, unique or not.
    let particular = match (method, &steady) {
        (Method::Rk4, _) => None,
        (Method::Auto, Some(s)) => Some(s.matrix().clone()),
        (Method::Auto, None) => lyapunov_particular(gen.a(), gen.c()),
    };
    let matrices: Vec<RealMatrix> = match &particular {
        Some(s) => {
            let offset = gamma0.matrix() - s;
            t_grid
                .iter()
                .map(|&t| {
                    let e = expm(gen.a(), t)?;
                    Ok(&e * &offset * e.transpose() + s)
                })
                .collect::<Result<_>>()?
        }
        None => integrate_rk4(gen, gamma0.matrix(), t_grid),
    };

    let mut states = Vec::with_capacity(t_grid.len());
    let mut observables = Vec::with_capacity(t_grid.len());
    for (&t, m) in t_grid.iter().zip(matrices) {
        let state = CovarianceMatrix::from_computed(&m);
        let p = state.is_physical();
        if cp && p.violation > TOL_TRAJECTORY {
            return Err(Error::PhysicalityLost {
                time: t,
                violation: p.violation,
            });
        }
        observables.push(Observables {
            nus: state.nus(),
            excitation: state.excitation_number(),
            activity: activity_rate(gen, &state)?,
            physical: p.physical,
            violation: p.violation,
        });
        states.push(state);
    }
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        observables,
        propagation: if particular.is_some() {
            Propagation::ClosedForm
        } else {
            Propagation::Rk4
        },
        steady_state: steady,
    })
}

/// Fixed-step RK4 from `t = 0`, sampled at `t_grid`. Each interval `Δt` uses
/// `⌈Δt/h⌉` equal steps with `h = min(10⁻³, Δt/100)`.
pub fn integrate_rk4(gen: &GeneratorPair, gamma0: &RealMatrix, t_grid: &[f64]) -> Vec<RealMatrix> {
    let mut out = Vec::with_capacity(t_grid.len());
    let mut g = gamma0.clone();
    let mut t = 0.0;
    for &target in t_grid {
        let dt = target - t;
        if dt > 0.0 {
            let h_max = RK4_MAX_STEP.min(dt / 100.0);
            let steps = (dt / h_max).ceil().max(1.0) as usize;
            let h = dt / steps as f64;
            for _ in 0..steps {
                g = rk4_step(gen, &g, h);
            }
        }
        t = target;
        out.push(g.clone());
    }
    out
}

fn rk4_step(gen: &GeneratorPair, g: &RealMatrix, h: f64) -> RealMatrix {
    let k1 = gen.rhs(g);
    let k2 = gen.rhs(&(g + &k1 * (h / 2.0)));
    let k3 = gen.rhs(&(g + &k2 * (h / 2.0)));
    let k4 = gen.rhs(&(g + &k3 * h));
    g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::{check_channel_cp, dilate, noise_deficit};
    use crate::linalg::{block_diag, omega, pauli_z};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn id(n: usize) -> RealMatrix {
        RealMatrix::identity(n, n)
    }

    fn random_state(rng: &mut impl Rng, modes: usize) -> CovarianceMatrix {
        let nus: Vec<f64> = (0..modes).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = RealMatrix::from_fn(2 * modes, 2 * modes, |_, _| rng.random_range(-1.0..1.0));
        let o = expm(&(&h - h.transpose()), 1.0).unwrap();
        CovarianceMatrix::thermal(&nus).unwrap().transformed(&o).unwrap()
    }

    fn random_cp(rng: &mut impl Rng, modes: usize) -> GeneratorPair {
        let d = 2 * modes;
        let a = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let c = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let g = GeneratorPair::new(a, &c - c.transpose()).unwrap();
        g.shifted(-(noise_deficit(&g) + rng.random_range(0.0..0.3)))
    }

    #[test]
    fn channel_examples() {
        let g = CovarianceMatrix::thermal(&[0.3, -0.2]).unwrap();
        assert_eq!(apply_channel(&GaussianChannel::identity(2), &g).unwrap(), g);

        let env = CovarianceMatrix::thermal(&[0.6]).unwrap();
        let mut swap = RealMatrix::zeros(4, 4);
        swap.view_mut((0, 2), (2, 2)).copy_from(&id(2));
        swap.view_mut((2, 0), (2, 2)).copy_from(&id(2));
        let ch = dilate(&swap, &env).unwrap();
        let out = apply_channel(&ch, &CovarianceMatrix::thermal(&[-0.9]).unwrap()).unwrap();
        assert!((out.matrix() - omega() * 0.6).amax() < 1e-15);

        assert!(matches!(
            apply_channel(&GaussianChannel::identity(1), &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_cp_channels_keep_states_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let h = RealMatrix::from_fn(4, 4, |_, _| rng.random_range(-2.0..2.0));
            let o = expm(&(&h - h.transpose()), 1.0).unwrap();
            let env = random_state(&mut rng, 1);
            let ch = dilate(&o, &env).unwrap();
            assert!(check_channel_cp(&ch).is_cp);
            let out = apply_channel(&ch, &random_state(&mut rng, 1)).unwrap();
            assert!(out.is_physical().physical);
        }
    }

    #[test]
    fn orthogonal_examples() {
        let e = 1.4;
        let g0 = CovarianceMatrix::thermal(&[0.35]).unwrap();
        let g = evolve_orthogonal(&(omega() * -e), &g0, 2.3).unwrap();
        assert!((g.matrix() - g0.matrix()).amax() < 1e-14);
        assert_eq!(evolve_orthogonal(&(omega() * -e), &g0, 0.0).unwrap(), g0);
        assert!(matches!(
            evolve_orthogonal(&pauli_z(), &g0, 1.0),
            Err(Error::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn free_evolution_correlations_beat() {
        let (e1, e2) = (1.0, 0.7);
        let h = block_diag(&[omega() * -e1, omega() * -e2]);
        let mut g0 = RealMatrix::zeros(4, 4);
        g0[(0, 2)] = 0.4;
        g0[(2, 0)] = -0.4;
        let g0 = CovarianceMatrix::new(g0).unwrap();
        for k in 0..20 {
            let t = 0.37 * k as f64;
            let g = evolve_orthogonal(&h, &g0, t).unwrap();
            let m = g.matrix();
            let sum = m[(0, 2)] + m[(1, 3)];
            assert!((sum - 0.4 * ((e1 - e2) * t).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_closed_form() {
        let r = 0.5;
        let gen = GeneratorPair::linear(id(2) * -r).unwrap();
        let tr = evolve_master(&gen, &CovarianceMatrix::thermal(&[1.0]).unwrap(), &[0.0, 1.0]).unwrap();
        assert_eq!(tr.propagation, Propagation::ClosedForm);
        assert!((tr.observables[1].nus[0] - (-1f64).exp()).abs() < 1e-9);
        assert!((tr.last().matrix() - omega() * (-1f64).exp()).amax() < 1e-9);
    }

    #[test]
    fn purifying_boundary_purifies() {
        let gen = GeneratorPair::new(id(2) * -1.0, omega() * 2.0).unwrap();
        let ss = steady_state(&gen);
        assert!((ss.unique().unwrap().matrix() - omega()).amax() < 1e-14);
        let tr = evolve_master(&gen, &CovarianceMatrix::maximally_mixed(1), &[0.0, 40.0]).unwrap();
        assert!((tr.last().mode_nu(0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn steady_state_examples() {
        let gen = GeneratorPair::new(id(2) * -1.0, omega()).unwrap();
        assert!((steady_state(&gen).unique().unwrap().mode_nu(0).unwrap() - 0.5).abs() < 1e-15);

        let free = GeneratorPair::linear(block_diag(&[omega() * -1.0, omega() * -0.7])).unwrap();
        assert_eq!(steady_state(&free), SteadyState::NoUniqueFixedPoint);

        let r = 1.0;
        let shield = GeneratorPair::linear(block_diag(&[id(2) * -r + pauli_z() * r, id(2) * 0.0])).unwrap();
        assert_eq!(steady_state(&shield), SteadyState::NoUniqueFixedPoint);
    }

    #[test]
    fn activity_examples() {
        let om = omega();
        let passive = GeneratorPair::linear(block_diag(&[om.clone() * -1.0, om.clone() * 0.5])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let g = random_state(&mut rng, 2);
            assert!(activity_rate(&passive, &g).unwrap().abs() < 1e-15);
        }
        let noise = GeneratorPair::linear(id(2) * -0.5).unwrap();
        let a = activity_rate(&noise, &CovarianceMatrix::thermal(&[1.0]).unwrap()).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        let c = 0.8;
        let pure_c = GeneratorPair::new(RealMatrix::zeros(2, 2), om * c).unwrap();
        let a = activity_rate(&pure_c, &CovarianceMatrix::maximally_mixed(1)).unwrap();
        assert!((a + c / 2.0).abs() < 1e-15);
    }

    #[test]
    fn activity_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for modes in 1..=2 {
            for _ in 0..10 {
                let gen = random_cp(&mut rng, modes);
                let g0 = random_state(&mut rng, modes);
                let t = rng.random_range(0.1..1.0);
                let h = 1e-4;
                let tr = evolve_master_with(&gen, &g0, &[t - h, t, t + h], Method::Auto).unwrap();
                let fd = (tr.observables[2].excitation - tr.observables[0].excitation) / (2.0 * h);
                assert!((fd - tr.observables[1].activity).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn semigroup_and_rk4_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for modes in 1..=2 {
            for _ in 0..5 {
                let gen = random_cp(&mut rng, modes);
                let g0 = random_state(&mut rng, modes);
                let (t1, t2) = (rng.random_range(0.2..1.5), rng.random_range(0.2..1.5));
                let full = evolve_master(&gen, &g0, &[t1 + t2]).unwrap();
                let half = evolve_master(&gen, &g0, &[t1]).unwrap();
                let two = evolve_master(&gen, half.last(), &[t2]).unwrap();
                assert!((full.last().matrix() - two.last().matrix()).amax() < 1e-8);

                let grid = uniform_grid(5.0, 26).unwrap();
                let cf = evolve_master_with(&gen, &g0, &grid, Method::Auto).unwrap();
                let rk = evolve_master_with(&gen, &g0, &grid, Method::Rk4).unwrap();
                assert_eq!(rk.propagation, Propagation::Rk4);
                for (a, b) in cf.states.iter().zip(&rk.states) {
                    assert!((a.matrix() - b.matrix()).amax() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn singular_generators_use_particular_solution() {
        let r = 0.7;
        let shield = block_diag(&[id(2) * -r + pauli_z() * r, omega() * -0.4]);
        let purify = block_diag(&[omega() * 0.3, RealMatrix::zeros(2, 2)]);
        let gen = GeneratorPair::new(shield, purify).unwrap();
        assert_eq!(steady_state(&gen), SteadyState::NoUniqueFixedPoint);
        let g0 = CovarianceMatrix::thermal(&[0.5, -0.2]).unwrap();
        let grid = uniform_grid(3.0, 7).unwrap();
        let cf = evolve_master(&gen, &g0, &grid).unwrap();
        assert_eq!(cf.propagation, Propagation::ClosedForm);
        assert!(cf.steady_state.is_none());
        let rk = evolve_master_with(&gen, &g0, &grid, Method::Rk4).unwrap();
        for (a, b) in cf.states.iter().zip(&rk.states) {
            assert!((a.matrix() - b.matrix()).amax() < 1e-10);
        }

        // Inconsistent: constant drive along a conserved direction.
        let drift = GeneratorPair::new(RealMatrix::zeros(2, 2), omega() * 0.2).unwrap();
        let tr = evolve_master(&drift, &CovarianceMatrix::maximally_mixed(1), &[0.0, 1.0]).unwrap();
        assert_eq!(tr.propagation, Propagation::Rk4);
    }

    #[test]
    fn cp_trajectories_stay_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let grid = uniform_grid(4.0, 41).unwrap();
        for modes in 1..=3 {
            for _ in 0..5 {
                let gen = random_cp(&mut rng, modes);
                let tr = evolve_master(&gen, &random_state(&mut rng, modes), &grid).unwrap();
                assert!(tr.max_violation() <= TOL_TRAJECTORY);
            }
        }
    }

    #[test]
    fn orthogonal_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..10 {
            let h = RealMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
            let h = &h - h.transpose();
            let g0 = random_state(&mut rng, 3);
            let g = evolve_orthogonal(&h, &g0, rng.random_range(0.0..5.0)).unwrap();
            let s0 = crate::linalg::symmetric_eigenvalues(&(g0.matrix() * g0.matrix().transpose()));
            let s1 = crate::linalg::symmetric_eigenvalues(&(g.matrix() * g.matrix().transpose()));
            for (a, b) in s0.iter().zip(&s1) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let gen = GeneratorPair::linear(id(2) * -1.0).unwrap();
        let hot = CovarianceMatrix::new(omega() * 1.1).unwrap();
        assert!(matches!(
            evolve_master(&gen, &hot, &[1.0]),
            Err(Error::UnphysicalInitialState { .. })
        ));
        let g0 = CovarianceMatrix::maximally_mixed(1);
        assert!(matches!(
            evolve_master(&gen, &g0, &[1.0, 0.5]),
            Err(Error::InvalidTimeGrid(_))
        ));
        assert!(uniform_grid(1.0, 1).is_err());
        assert!(uniform_grid(0.0, 5).is_err());
    }
}
