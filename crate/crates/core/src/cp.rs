//! Complete positivity of Gaussian channels and of master-equation generators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{split_orthogonal, GeneratorPair};
use crate::linalg::{
    self, check_antisymmetric, ensure_phase_space, eig_hermitian, HermitianMatrix, RealMatrix,
    TOL_STRUCT,
};
use crate::state::CovarianceMatrix;

/// Most negative certificate eigenvalue still accepted as completely positive.
pub const TOL_CP: f64 = 1e-10;
/// Orthogonality tolerance for joint transformations in [`dilate`].
pub const TOL_ORTHOGONAL: f64 = 1e-10;

/// The map `Γ ↦ O_A Γ O_Aᵀ + R`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    o_a: RealMatrix,
    r: RealMatrix,
}

impl GaussianChannel {
    pub fn new(o_a: RealMatrix, r: RealMatrix) -> Result<Self> {
        let n = ensure_phase_space(&o_a, "O_A")?;
        let nr = ensure_phase_space(&r, "R")?;
        if n != nr {
            return Err(Error::DimensionMismatch {
                expected: o_a.nrows(),
                found: r.nrows(),
            });
        }
        check_antisymmetric(&r, "R", TOL_STRUCT)?;
        Ok(Self {
            o_a,
            r: linalg::antisymmetric_part(&r),
        })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            o_a: RealMatrix::identity(2 * modes, 2 * modes),
            r: RealMatrix::zeros(2 * modes, 2 * modes),
        }
    }

    /// First-order channel `(I + A·dt, C·dt)` of a generator.
    pub fn infinitesimal(gen: &GeneratorPair, dt: f64) -> Self {
        let n = gen.dim();
        Self {
            o_a: RealMatrix::identity(n, n) + gen.a() * dt,
            r: gen.c() * dt,
        }
    }

    pub fn modes(&self) -> usize {
        self.o_a.nrows() / 2
    }

    pub fn o_a(&self) -> &RealMatrix {
        &self.o_a
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }
}

#[derive(Debug, Clone)]
pub struct CpVerdict {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
    pub certificate: HermitianMatrix,
}

fn verdict(re: RealMatrix, im: RealMatrix, tol: f64) -> CpVerdict {
    let certificate =
        HermitianMatrix::from_parts(&linalg::symmetric_part(&re), &linalg::antisymmetric_part(&im))
            .expect("symmetric real part plus i·antisymmetric is Hermitian");
    let min_eigenvalue = eig_hermitian(&certificate).min();
    CpVerdict {
        is_cp: min_eigenvalue >= -tol,
        min_eigenvalue,
        certificate,
    }
}

/// Certificate `I − O_A O_Aᵀ − iR`.
pub fn check_channel_cp(ch: &GaussianChannel) -> CpVerdict {
    check_channel_cp_with_tol(ch, TOL_CP)
}

pub fn check_channel_cp_with_tol(ch: &GaussianChannel, tol: f64) -> CpVerdict {
    let n = ch.o_a.nrows();
    let re = RealMatrix::identity(n, n) - &ch.o_a * ch.o_a.transpose();
    verdict(re, -&ch.r, tol)
}

/// Certificate `−(A + Aᵀ + iC)`.
pub fn check_generator_cp(gen: &GeneratorPair) -> CpVerdict {
    check_generator_cp_with_tol(gen, TOL_CP)
}

pub fn check_generator_cp_with_tol(gen: &GeneratorPair, tol: f64) -> CpVerdict {
    let re = -(gen.a() + gen.a().transpose());
    verdict(re, -gen.c(), tol)
}

/// Smallest `s ≥ 0` such that `A − s·I` gives a completely positive generator.
pub fn noise_deficit(gen: &GeneratorPair) -> f64 {
    let v = check_generator_cp(gen);
    if v.is_cp {
        0.0
    } else {
        -v.min_eigenvalue / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceDiagnostic {
    /// `Tr((A + Aᵀ)/2)`.
    pub trace_an: f64,
    /// False when a completely positive generator has `A_N ≠ 0` and `Tr(A_N) ≥ 0`.
    pub cp_consistent: bool,
}

pub fn trace_diagnostic(gen: &GeneratorPair) -> TraceDiagnostic {
    let (_, a_n) = split_orthogonal(gen.a());
    let trace_an = a_n.trace();
    let violated = check_generator_cp(gen).is_cp && a_n.norm() > 1e-12 && trace_an >= 0.0;
    TraceDiagnostic {
        trace_an,
        cp_consistent: !violated,
    }
}

/// Channel induced on `N` system modes by the joint orthogonal `O_joint` acting on
/// the system and an uncorrelated environment in state `env`.
pub fn dilate(o_joint: &RealMatrix, env: &CovarianceMatrix) -> Result<GaussianChannel> {
    linalg::ensure_square(o_joint, "O_joint")?;
    let total = o_joint.nrows();
    let m2 = env.dim();
    if total <= m2 || !(total - m2).is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: m2 + 2,
            found: total,
        });
    }
    let residual = (o_joint * o_joint.transpose() - RealMatrix::identity(total, total)).amax();
    if !(residual <= TOL_ORTHOGONAL) {
        return Err(Error::NonOrthogonalJoint { residual });
    }
    let p = env.is_physical();
    if !p.physical {
        return Err(Error::UnphysicalEnvironment {
            violation: p.violation,
        });
    }
    let n2 = total - m2;
    let o_a = o_joint.view((0, 0), (n2, n2)).into_owned();
    let o_ab = o_joint.view((0, n2), (n2, m2)).into_owned();
    let r = &o_ab * env.matrix() * o_ab.transpose();
    Ok(GaussianChannel {
        o_a,
        r: linalg::antisymmetric_part(&r),
    })
}

/// Certificate eigenvalues for a single mode in closed form:
/// `2a_NA ± √(4a_x² + 4a_z² + c²)` for `A = −a_NA·I + a_x X + a_z Z + a_OP ω`, `C = cω`.
pub fn single_mode_certificate_eigenvalues(a_na: f64, a_x: f64, a_z: f64, c: f64) -> [f64; 2] {
    let root = (4.0 * a_x * a_x + 4.0 * a_z * a_z + c * c).sqrt();
    [2.0 * a_na - root, 2.0 * a_na + root]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, omega, pauli_x, pauli_z};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn id(n: usize) -> RealMatrix {
        RealMatrix::identity(n, n)
    }

    #[test]
    fn channel_examples() {
        let o = expm(&omega(), 0.4).unwrap();
        let v = check_channel_cp(&GaussianChannel::new(o, RealMatrix::zeros(2, 2)).unwrap());
        assert!(v.is_cp);
        assert!(linalg::complex_max_abs(v.certificate.matrix()) < 1e-15);

        let v = check_channel_cp(&GaussianChannel::new(RealMatrix::zeros(2, 2), omega()).unwrap());
        assert!(v.is_cp);
        assert!(v.min_eigenvalue.abs() < 1e-14);
        let e = eig_hermitian(&v.certificate);
        assert!((e.max() - 2.0).abs() < 1e-14);

        let v = check_channel_cp(&GaussianChannel::new(id(2), omega()).unwrap());
        assert!(!v.is_cp);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn generator_examples() {
        // Boundary: a_NA = 1, a_x = 0.6, c = 1.6.
        let a = id(2) * -1.0 + pauli_x() * 0.6;
        let v = check_generator_cp(&GeneratorPair::new(a, omega() * 1.6).unwrap());
        assert!(v.is_cp);
        assert!(v.min_eigenvalue.abs() < 1e-12);

        let v = check_generator_cp(&GeneratorPair::linear(omega() * 2.0).unwrap());
        assert!(v.is_cp);
        assert_eq!(v.min_eigenvalue, 0.0);

        let v = check_generator_cp(&GeneratorPair::new(RealMatrix::zeros(2, 2), omega()).unwrap());
        assert!(!v.is_cp);
    }

    #[test]
    fn deficit_examples() {
        assert_eq!(noise_deficit(&GeneratorPair::linear(id(2) * -0.3).unwrap()), 0.0);
        let d = noise_deficit(&GeneratorPair::linear(pauli_x() * 0.5).unwrap());
        assert!((d - 0.5).abs() < 1e-14);
        let d = noise_deficit(&GeneratorPair::new(RealMatrix::zeros(2, 2), omega()).unwrap());
        assert!((d - 0.5).abs() < 1e-14);
    }

    #[test]
    fn trace_examples() {
        let t = trace_diagnostic(&GeneratorPair::linear(id(2) * -1.0).unwrap());
        assert_eq!(t.trace_an, -2.0);
        assert!(t.cp_consistent);
        let t = trace_diagnostic(&GeneratorPair::linear(omega() * 0.3).unwrap());
        assert_eq!(t.trace_an, 0.0);
        assert!(t.cp_consistent);
    }

    #[test]
    fn dilate_examples() {
        let env = CovarianceMatrix::thermal(&[0.4]).unwrap();
        let ch = dilate(&id(4), &env).unwrap();
        assert_eq!(ch.o_a(), &id(2));
        assert_eq!(ch.r().amax(), 0.0);
        assert!(check_channel_cp(&ch).is_cp);

        let mut swap = RealMatrix::zeros(4, 4);
        swap.view_mut((0, 2), (2, 2)).copy_from(&id(2));
        swap.view_mut((2, 0), (2, 2)).copy_from(&id(2));
        let ch = dilate(&swap, &env).unwrap();
        assert_eq!(ch.o_a().amax(), 0.0);
        assert!((ch.r() - omega() * 0.4).amax() < 1e-15);

        let mut bad = id(4);
        bad[(0, 0)] = 1.1;
        assert!(matches!(dilate(&bad, &env), Err(Error::NonOrthogonalJoint { .. })));
        let hot = CovarianceMatrix::new(omega() * 1.2).unwrap();
        assert!(matches!(
            dilate(&id(4), &hot),
            Err(Error::UnphysicalEnvironment { .. })
        ));
    }

    #[test]
    fn closed_form_single_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let (na, x, z, c, op): (f64, f64, f64, f64, f64) = (
                rng.random_range(-1.0..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let a = id(2) * -na + pauli_x() * x + pauli_z() * z + omega() * op;
            let g = GeneratorPair::new(a, omega() * c).unwrap();
            let e = eig_hermitian(&check_generator_cp(&g).certificate);
            let cf = single_mode_certificate_eigenvalues(na, x, z, c);
            assert!((e.eigenvalues[0] - cf[0]).abs() < 1e-12);
            assert!((e.eigenvalues[1] - cf[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let dt = 1e-6;
        for _ in 0..20 {
            let a = RealMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let c = RealMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let g = GeneratorPair::new(a, &c - c.transpose()).unwrap();
            let eg = eig_hermitian(&check_generator_cp(&g).certificate);
            let ec = eig_hermitian(&check_channel_cp(&GaussianChannel::infinitesimal(&g, dt)).certificate);
            let scale = eg.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (x, y) in ec.eigenvalues.iter().zip(&eg.eigenvalues) {
                assert!((x - dt * y).abs() <= 1e-4 * dt * scale);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn deficit_is_monotone(
                a in proptest::collection::vec(-1.0f64..1.0, 16),
                c in proptest::collection::vec(-1.0f64..1.0, 16),
                s in 0.0f64..3.0,
            ) {
                let a = RealMatrix::from_vec(4, 4, a);
                let c = RealMatrix::from_vec(4, 4, c);
                let g = GeneratorPair::new(a, &c - c.transpose()).unwrap();
                let d0 = noise_deficit(&g);
                let d1 = noise_deficit(&g.shifted(-s));
                prop_assert!((d1 - (d0 - s).max(0.0)).abs() < 1e-9);
                prop_assert_eq!(noise_deficit(&g.shifted(-d0)) , 0.0);
            }

            #[test]
            fn cp_with_zero_an_forces_zero_c(
                h in proptest::collection::vec(-1.0f64..1.0, 16),
                c in proptest::collection::vec(-1.0f64..1.0, 16),
                eps in 1e-8f64..1.0,
            ) {
                let h = RealMatrix::from_vec(4, 4, h);
                let c = RealMatrix::from_vec(4, 4, c) * eps;
                let g = GeneratorPair::new(&h - h.transpose(), &c - c.transpose()).unwrap();
                prop_assert!(!check_generator_cp(&g).is_cp);
            }
        }
    }
}
