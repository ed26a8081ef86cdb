//! Generators `(A, C)` of the master equation `dΓ/dt = AΓ + ΓAᵀ + C` and their
//! decomposition into nine dynamical classes.
//!
//! Each 2×2 block of a phase-space matrix expands in `{1, ω, X, Z}`. Three
//! binary splits act on `A`:
//!
//! * orthogonal / non-orthogonal: antisymmetric and symmetric parts;
//! * passive / active: `A_P = ½(A + ΩAᵀΩ)`, `A_A = ½(A − ΩAᵀΩ)`;
//! * single-mode / multi-mode: 2×2 diagonal blocks and the remainder.
//!
//! `C` is always non-orthogonal. Its active part is the `ω` component of the
//! diagonal blocks, which is single-mode by construction. Its passive part
//! is everything else, which is multi-mode since `C` is antisymmetric.
//! Of the sixteen combinations only nine survive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_antisymmetric, ensure_phase_space, mode_block_diagonal, omega, pauli_x, pauli_z,
    symplectic_form, RealMatrix, TOL_STRUCT,
};

/// Threshold on the Frobenius norm above which a class counts as present.
pub const TOL_PRESENCE: f64 = 1e-12;

/// A master-equation generator on `N` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    a: RealMatrix,
    c: RealMatrix,
}

impl GeneratorPair {
    /// Validates shapes and the antisymmetry of `C`.
    pub fn new(a: RealMatrix, c: RealMatrix) -> Result<Self> {
        let n = ensure_phase_space(&a, "A")?;
        let nc = ensure_phase_space(&c, "C")?;
        if n != nc {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: c.nrows(),
            });
        }
        check_antisymmetric(&c, "C", TOL_STRUCT)?;
        Ok(Self {
            a,
            c: linalg::antisymmetric_part(&c),
        })
    }

    /// State-dependent part only.
    pub fn linear(a: RealMatrix) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, RealMatrix::zeros(n, n))
    }

    pub fn zero(modes: usize) -> Self {
        Self {
            a: RealMatrix::zeros(2 * modes, 2 * modes),
            c: RealMatrix::zeros(2 * modes, 2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.a.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    /// `AΓ + ΓAᵀ + C`.
    pub fn rhs(&self, gamma: &RealMatrix) -> RealMatrix {
        &self.a * gamma + gamma * self.a.transpose() + &self.c
    }

    /// Adds `shift·I` to `A`.
    pub fn shifted(&self, shift: f64) -> Self {
        let n = self.dim();
        Self {
            a: &self.a + RealMatrix::identity(n, n) * shift,
            c: self.c.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            a: &self.a + &other.a,
            c: &self.c + &other.c,
        })
    }
}

/// Coefficient matrices of `M = M₁⊗1 + M_w⊗ω + M_x⊗X + M_z⊗Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisExpansion {
    pub one: RealMatrix,
    pub omega: RealMatrix,
    pub x: RealMatrix,
    pub z: RealMatrix,
}

impl BasisExpansion {
    pub fn reassemble(&self) -> RealMatrix {
        self.one.kronecker(&RealMatrix::identity(2, 2))
            + self.omega.kronecker(&omega())
            + self.x.kronecker(&pauli_x())
            + self.z.kronecker(&pauli_z())
    }
}

pub fn expand_basis(m: &RealMatrix) -> Result<BasisExpansion> {
    let n = ensure_phase_space(m, "matrix")?;
    let mut e = BasisExpansion {
        one: RealMatrix::zeros(n, n),
        omega: RealMatrix::zeros(n, n),
        x: RealMatrix::zeros(n, n),
        z: RealMatrix::zeros(n, n),
    };
    for j in 0..n {
        for k in 0..n {
            let b = m.view((2 * j, 2 * k), (2, 2));
            e.one[(j, k)] = (b[(0, 0)] + b[(1, 1)]) / 2.0;
            e.omega[(j, k)] = (b[(0, 1)] - b[(1, 0)]) / 2.0;
            e.x[(j, k)] = (b[(0, 1)] + b[(1, 0)]) / 2.0;
            e.z[(j, k)] = (b[(0, 0)] - b[(1, 1)]) / 2.0;
        }
    }
    Ok(e)
}

/// `(A_O, A_N)`: antisymmetric and symmetric parts.
pub fn split_orthogonal(a: &RealMatrix) -> (RealMatrix, RealMatrix) {
    (linalg::antisymmetric_part(a), linalg::symmetric_part(a))
}

/// `(A_A, A_P)`.
pub fn split_active(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let n = ensure_phase_space(a, "A")?;
    let om = symplectic_form(n);
    let mirrored = &om * a.transpose() * &om;
    Ok(((a - &mirrored) * 0.5, (a + &mirrored) * 0.5))
}

/// The nine classes that the partition can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DynamicsClass {
    FreeEvolution,
    CorrelationShielding,
    Noise,
    Purifying,
    MultiModeRotation,
    MultiModeCounterRotation,
    MultiModeActiveShielding,
    MultiModePassiveShielding,
    Correlating,
}

/// Position of a class in the four binary splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub single_mode: bool,
    pub orthogonal: bool,
    pub passive: bool,
    pub state_dependent: bool,
}

impl Signature {
    /// All sixteen signatures, single-mode first, then orthogonal, passive and
    /// state-dependent, each "yes" before "no".
    pub fn all() -> Vec<Signature> {
        let mut out = Vec::with_capacity(16);
        for single_mode in [true, false] {
            for orthogonal in [true, false] {
                for passive in [true, false] {
                    for state_dependent in [true, false] {
                        out.push(Signature {
                            single_mode,
                            orthogonal,
                            passive,
                            state_dependent,
                        });
                    }
                }
            }
        }
        out
    }

    /// The class realizing this signature, if any.
    pub fn class(self) -> Option<DynamicsClass> {
        DynamicsClass::ALL
            .iter()
            .copied()
            .find(|c| c.signature() == self)
    }
}

impl DynamicsClass {
    pub const ALL: [DynamicsClass; 9] = [
        DynamicsClass::FreeEvolution,
        DynamicsClass::CorrelationShielding,
        DynamicsClass::Noise,
        DynamicsClass::Purifying,
        DynamicsClass::MultiModeRotation,
        DynamicsClass::MultiModeCounterRotation,
        DynamicsClass::MultiModeActiveShielding,
        DynamicsClass::MultiModePassiveShielding,
        DynamicsClass::Correlating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DynamicsClass::FreeEvolution => "Free Evolution",
            DynamicsClass::CorrelationShielding => "Correlation Shielding",
            DynamicsClass::Noise => "Noise",
            DynamicsClass::Purifying => "Purifying",
            DynamicsClass::MultiModeRotation => "Multi-mode Rotation",
            DynamicsClass::MultiModeCounterRotation => "Multi-mode Counter Rotation",
            DynamicsClass::MultiModeActiveShielding => "Multi-mode Active Corr. Shielding",
            DynamicsClass::MultiModePassiveShielding => "Multi-mode Passive Corr. Shielding",
            DynamicsClass::Correlating => "Correlating",
        }
    }

    /// Short label such as `A_OP^S`.
    pub fn symbol(self) -> &'static str {
        match self {
            DynamicsClass::FreeEvolution => "A_OP^S",
            DynamicsClass::CorrelationShielding => "A_NP^S",
            DynamicsClass::Noise => "A_NA^S",
            DynamicsClass::Purifying => "C_NA^S",
            DynamicsClass::MultiModeRotation => "A_OP^M",
            DynamicsClass::MultiModeCounterRotation => "A_OA^M",
            DynamicsClass::MultiModeActiveShielding => "A_NA^M",
            DynamicsClass::MultiModePassiveShielding => "A_NP^M",
            DynamicsClass::Correlating => "C_NP^M",
        }
    }

    pub fn signature(self) -> Signature {
        use DynamicsClass::*;
        let (single_mode, orthogonal, passive, state_dependent) = match self {
            FreeEvolution => (true, true, true, true),
            CorrelationShielding => (true, false, true, true),
            Noise => (true, false, false, true),
            Purifying => (true, false, false, false),
            MultiModeRotation => (false, true, true, true),
            MultiModeCounterRotation => (false, true, false, true),
            MultiModeActiveShielding => (false, false, false, true),
            MultiModePassiveShielding => (false, false, true, true),
            Correlating => (false, false, true, false),
        };
        Signature {
            single_mode,
            orthogonal,
            passive,
            state_dependent,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for DynamicsClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Residual norms of the pieces the partition forces to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralZeros {
    /// Single-mode part of the orthogonal active projection of `A`.
    pub a_oa_single: f64,
    /// Multi-mode part of the active projection of `C`.
    pub c_na_multi: f64,
    /// Single-mode part of the passive projection of `C`.
    pub c_np_single: f64,
}

/// The nine class matrices of a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    modes: usize,
    parts: [RealMatrix; 9],
    pub structural: StructuralZeros,
}

impl PartitionReport {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn part(&self, class: DynamicsClass) -> &RealMatrix {
        &self.parts[class.index()]
    }

    pub fn norm(&self, class: DynamicsClass) -> f64 {
        self.part(class).norm()
    }

    pub fn is_present(&self, class: DynamicsClass) -> bool {
        self.norm(class) > TOL_PRESENCE
    }

    pub fn present(&self) -> Vec<DynamicsClass> {
        DynamicsClass::ALL
            .iter()
            .copied()
            .filter(|&c| self.is_present(c))
            .collect()
    }

    /// Sum of the seven `A` classes.
    pub fn a_sum(&self) -> RealMatrix {
        let mut sum = RealMatrix::zeros(2 * self.modes, 2 * self.modes);
        for c in DynamicsClass::ALL {
            if c.signature().state_dependent {
                sum += self.part(c);
            }
        }
        sum
    }

    /// Sum of the two `C` classes.
    pub fn c_sum(&self) -> RealMatrix {
        self.part(DynamicsClass::Purifying) + self.part(DynamicsClass::Correlating)
    }

    /// Sum of the classes whose signature satisfies `pred`, restricted to `A`.
    pub fn a_sum_where(&self, pred: impl Fn(Signature) -> bool) -> RealMatrix {
        let mut sum = RealMatrix::zeros(2 * self.modes, 2 * self.modes);
        for c in DynamicsClass::ALL {
            let s = c.signature();
            if s.state_dependent && pred(s) {
                sum += self.part(c);
            }
        }
        sum
    }
}

pub fn partition(gen: &GeneratorPair) -> PartitionReport {
    let n = gen.modes();
    let a = gen.a();
    let om = symplectic_form(n);
    let at = a.transpose();
    let w_at_w = &om * &at * &om;
    let w_a_w = &om * a * &om;

    let a_oa = (a - &at - &w_at_w + &w_a_w) * 0.25;
    let a_op = (a + &w_at_w - &at - &w_a_w) * 0.25;
    let a_na = (a - &w_at_w + &at - &w_a_w) * 0.25;
    let a_np = (a + &w_at_w + &at + &w_a_w) * 0.25;

    let a_oa_s = mode_block_diagonal(&a_oa);
    let a_op_s = mode_block_diagonal(&a_op);
    let a_na_s = mode_block_diagonal(&a_na);
    let a_np_s = mode_block_diagonal(&a_np);

    let c = gen.c();
    let c_omega = expand_basis(c).expect("validated generator").omega;
    let c_na = RealMatrix::from_diagonal(&c_omega.diagonal()).kronecker(&omega());
    let c_np = c - &c_na;
    let c_na_s = mode_block_diagonal(&c_na);
    let c_np_s = mode_block_diagonal(&c_np);

    let structural = StructuralZeros {
        a_oa_single: a_oa_s.norm(),
        c_na_multi: (&c_na - &c_na_s).norm(),
        c_np_single: c_np_s.norm(),
    };

    use DynamicsClass::*;
    let mut parts: [RealMatrix; 9] = std::array::from_fn(|_| RealMatrix::zeros(2 * n, 2 * n));
    parts[MultiModeRotation.index()] = &a_op - &a_op_s;
    parts[FreeEvolution.index()] = a_op_s;
    parts[MultiModeCounterRotation.index()] = a_oa;
    parts[MultiModeActiveShielding.index()] = &a_na - &a_na_s;
    parts[Noise.index()] = a_na_s;
    parts[MultiModePassiveShielding.index()] = &a_np - &a_np_s;
    parts[CorrelationShielding.index()] = a_np_s;
    parts[Purifying.index()] = c_na;
    parts[Correlating.index()] = c_np;

    PartitionReport {
        modes: n,
        parts,
        structural,
    }
}

/// Present classes with norms, and the signatures no generator can realize.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub present: Vec<DynamicsClass>,
    pub norms: Vec<(DynamicsClass, f64)>,
    pub impossible: Vec<Signature>,
}

impl Classification {
    pub fn names(&self) -> Vec<&'static str> {
        self.present.iter().map(|c| c.name()).collect()
    }
}

pub fn classify(gen: &GeneratorPair) -> Classification {
    let report = partition(gen);
    Classification {
        present: report.present(),
        norms: DynamicsClass::ALL
            .iter()
            .map(|&c| (c, report.norm(c)))
            .collect(),
        impossible: impossible_signatures(),
    }
}

pub fn impossible_signatures() -> Vec<Signature> {
    Signature::all()
        .into_iter()
        .filter(|s| s.class().is_none())
        .collect()
}
