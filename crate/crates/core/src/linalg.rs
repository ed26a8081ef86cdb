//! Dense matrix primitives shared by every other module.
//!
//! Matrices here are tiny (at most a dozen rows), so everything is dense and
//! allocated on the heap via `nalgebra::DMatrix`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Structural tolerance for symmetry checks, relative to the largest entry.
pub const TOL_STRUCT: f64 = 1e-12;
/// Tolerance on eigenvalue sums in the Lyapunov singularity test.
pub const TOL_EIG: f64 = 1e-10;

/// The single-mode symplectic form `ω = [[0, 1], [-1, 0]]`.
pub fn omega() -> RealMatrix {
    RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
}

pub fn pauli_x() -> RealMatrix {
    RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_z() -> RealMatrix {
    RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `Ω = I_N ⊗ ω`.
pub fn symplectic_form(modes: usize) -> RealMatrix {
    RealMatrix::identity(modes, modes).kronecker(&omega())
}

/// Direct sum of square blocks.
pub fn block_diag(blocks: &[RealMatrix]) -> RealMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RealMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

/// Keeps the 2×2 diagonal blocks of `m` and zeroes everything else.
pub fn mode_block_diagonal(m: &RealMatrix) -> RealMatrix {
    let n = m.nrows();
    let mut out = RealMatrix::zeros(n, n);
    for j in (0..n).step_by(2) {
        out.view_mut((j, j), (2, 2)).copy_from(&m.view((j, j), (2, 2)));
    }
    out
}

pub fn antisymmetric_part(m: &RealMatrix) -> RealMatrix {
    (m - m.transpose()) * 0.5
}

pub fn symmetric_part(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `re + i·im` as a complex matrix.
pub fn complexify(re: &RealMatrix, im: &RealMatrix) -> ComplexMatrix {
    re.zip_map(im, Complex64::new)
}

pub fn ensure_square(m: &RealMatrix, what: &'static str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            what,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub fn ensure_finite(m: &RealMatrix, what: &'static str) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFinite { what, row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Square, finite, non-empty, even dimension. Returns the mode count.
pub fn ensure_phase_space(m: &RealMatrix, what: &'static str) -> Result<usize> {
    ensure_square(m, what)?;
    if m.nrows() == 0 {
        return Err(Error::Empty { what });
    }
    if !m.nrows().is_multiple_of(2) {
        return Err(Error::OddDimension {
            what,
            dim: m.nrows(),
        });
    }
    ensure_finite(m, what)?;
    Ok(m.nrows() / 2)
}

/// Fails on the worst pair `(i, j)` where `|m_ij + m_ji| > tol·max(1, ‖m‖_max)`.
pub fn check_antisymmetric(m: &RealMatrix, what: &'static str, tol: f64) -> Result<()> {
    let scale = m.amax().max(1.0);
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] + m[(j, i)]).abs();
            if d > tol * scale && worst.is_none_or(|w| d > w.2) {
                worst = Some((i, j, d));
            }
        }
    }
    match worst {
        None => Ok(()),
        Some((i, j, _)) => Err(Error::NotAntisymmetric {
            what,
            row: i,
            col: j,
            value: m[(i, j)],
            mirror: m[(j, i)],
        }),
    }
}

pub fn is_antisymmetric(m: &RealMatrix, tol: f64) -> bool {
    m.is_square() && check_antisymmetric(m, "matrix", tol).is_ok()
}

/// Largest complex modulus among the entries.
pub fn complex_max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest `|m_ij − conj(m_ji)|`.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A complex matrix that equals its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity to [`TOL_STRUCT`] relative to the largest entry.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, TOL_STRUCT)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                what: "Hermitian matrix",
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let deviation = hermitian_defect(&m);
        if deviation > tol * complex_max_abs(&m) {
            return Err(Error::NonHermitianInput { deviation });
        }
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self(h))
    }

    /// `re + i·im` for symmetric `re` and antisymmetric `im`.
    pub fn from_parts(re: &RealMatrix, im: &RealMatrix) -> Result<Self> {
        Self::new(complexify(re, im))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(lam);
        }
        scaled * v.adjoint()
    }
}

pub fn eig_hermitian(m: &HermitianMatrix) -> HermitianEigen {
    let n = m.dim();
    if n == 0 {
        return HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let se = SymmetricEigen::new(m.0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors
            .column_mut(dst)
            .copy_from(&se.eigenvectors.column(src));
    }
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = symmetric_part(m);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a general real matrix, sorted by real part then imaginary part.
pub fn sorted_eigenvalues(m: &RealMatrix) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<Complex64> = m.clone().complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut ev);
    ev
}

pub fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Greedy multiset distance: the largest gap after pairing each expected value
/// with its nearest unused computed value. `None` when lengths differ.
pub fn multiset_distance(computed: &[Complex64], expected: &[Complex64]) -> Option<f64> {
    if computed.len() != expected.len() {
        return None;
    }
    let mut used = vec![false; computed.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let (k, d) = computed
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, c)| (k, (c - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        used[k] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

fn one_norm(m: &RealMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^{Mt}` by scaling and squaring with a diagonal Padé approximant.
pub fn expm(m: &RealMatrix, t: f64) -> Result<RealMatrix> {
    ensure_square(m, "exponent")?;
    Ok(expm_unscaled(&(m * t)))
}

fn expm_unscaled(a: &RealMatrix) -> RealMatrix {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    for (order, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match order {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let (u, v) = pade_low(a, coeffs);
            return pade_quotient(&u, &v);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-s);
    let (u, v) = pade_13(&scaled);
    let mut r = pade_quotient(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_low(a: &RealMatrix, b: &[f64]) -> (RealMatrix, RealMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut even_power = RealMatrix::identity(n, n);
    let mut u_inner = RealMatrix::zeros(n, n);
    let mut v = RealMatrix::zeros(n, n);
    for k in (0..b.len()).step_by(2) {
        v += &even_power * b[k];
        u_inner += &even_power * b[k + 1];
        even_power = &even_power * &a2;
    }
    (a * u_inner, v)
}

fn pade_13(a: &RealMatrix) -> (RealMatrix, RealMatrix) {
    let b = &PADE_13;
    let n = a.nrows();
    let id = RealMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (u_hi + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let v_hi = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = v_hi + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

fn pade_quotient(u: &RealMatrix, v: &RealMatrix) -> RealMatrix {
    let num = v + u;
    let den = v - u;
    den.lu()
        .solve(&num)
        .expect("Padé denominator is nonsingular within the θ bounds")
}

/// Solves `AS + SAᵀ + C = 0` for antisymmetric `S`.
pub fn lyapunov_solve(a: &RealMatrix, c: &RealMatrix) -> Result<RealMatrix> {
    lyapunov_solve_with_tol(a, c, TOL_EIG)
}

pub fn lyapunov_solve_with_tol(a: &RealMatrix, c: &RealMatrix, tol: f64) -> Result<RealMatrix> {
    ensure_square(a, "A")?;
    ensure_square(c, "C")?;
    if a.nrows() != c.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: c.nrows(),
        });
    }
    check_antisymmetric(c, "C", TOL_STRUCT)?;
    let n = a.nrows();
    if n < 2 {
        return Ok(RealMatrix::zeros(n, n));
    }

    let ev = sorted_eigenvalues(a);
    let scale = a.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (ev[i] + ev[j]).norm() <= tol * scale {
                return Err(Error::SingularLyapunov {
                    lhs: format_complex(ev[i]),
                    rhs: format_complex(ev[j]),
                });
            }
        }
    }

    let (pairs, op, rhs) = lyapunov_system(a, c);
    let sol = op.lu().solve(&rhs).ok_or_else(|| Error::SingularLyapunov {
        lhs: "?".into(),
        rhs: "?".into(),
    })?;
    Ok(from_pairs(n, &pairs, &sol))
}

/// Some antisymmetric `S` with `AS + SAᵀ + C = 0`, found by least squares, or
/// `None` when the equation is inconsistent. Unlike [`lyapunov_solve`] this
/// also succeeds for singular `A` as long as `C` lies in the range.
pub fn lyapunov_particular(a: &RealMatrix, c: &RealMatrix) -> Option<RealMatrix> {
    let n = a.nrows();
    if c.nrows() != n || !is_antisymmetric(c, TOL_STRUCT) {
        return None;
    }
    if n < 2 {
        return Some(RealMatrix::zeros(n, n));
    }
    let (pairs, op, rhs) = lyapunov_system(a, c);
    let scale = op.amax().max(1.0);
    let sol = op.clone().svd(true, true).solve(&rhs, TOL_EIG * scale).ok()?;
    let residual = (&op * &sol - &rhs).amax();
    (residual <= TOL_EIG * scale * rhs.amax().max(1.0)).then(|| from_pairs(n, &pairs, &sol))
}

type LyapunovSystem = (Vec<(usize, usize)>, RealMatrix, nalgebra::DVector<f64>);

/// `S ↦ AS + SAᵀ` restricted to the upper triangle, with right-hand side `−C`.
fn lyapunov_system(a: &RealMatrix, c: &RealMatrix) -> LyapunovSystem {
    let n = a.nrows();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    let mut op = RealMatrix::zeros(m, m);
    let mut basis = RealMatrix::zeros(n, n);
    for (col, &(k, l)) in pairs.iter().enumerate() {
        basis[(k, l)] = 1.0;
        basis[(l, k)] = -1.0;
        let image = a * &basis + &basis * a.transpose();
        for (row, &(i, j)) in pairs.iter().enumerate() {
            op[(row, col)] = image[(i, j)];
        }
        basis[(k, l)] = 0.0;
        basis[(l, k)] = 0.0;
    }
    let rhs = nalgebra::DVector::from_iterator(m, pairs.iter().map(|&(i, j)| -c[(i, j)]));
    (pairs, op, rhs)
}

fn from_pairs(n: usize, pairs: &[(usize, usize)], sol: &nalgebra::DVector<f64>) -> RealMatrix {
    let mut s = RealMatrix::zeros(n, n);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        s[(i, j)] = sol[k];
        s[(j, i)] = -sol[k];
    }
    s
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6e}", z.re)
    } else {
        format!("{:.6e}{:+.6e}i", z.re, z.im)
    }
}
