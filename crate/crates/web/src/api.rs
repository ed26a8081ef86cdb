use fermigauss::cp::{check_generator_cp, noise_deficit, single_mode_certificate_eigenvalues};
use fermigauss::dynamics::{evolve_master, steady_state, uniform_grid, Propagation};
use fermigauss::generator::classify;
use fermigauss::lindblad::extract_lindblad;
use fermigauss::linalg::{expm, omega, pauli_x, pauli_z, sorted_eigenvalues};
use fermigauss::two_mode::{build_g_system, gamma_to_g, CatalogParams, Scenario, SpectrumKind};
use fermigauss::{CovarianceMatrix, GeneratorPair, RealMatrix};
use serde::Serialize;

pub const MAX_GRID: usize = 201;
pub const MAX_SAMPLES: usize = 2001;
pub const MAX_T: f64 = 200.0;
pub const MAX_STEPS: usize = 401;

/// `A = −a_NA·I + a_x X + a_z Z + a_OP ω`, `C = cω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleMode {
    pub a_na: f64,
    pub a_x: f64,
    pub a_z: f64,
    pub a_op: f64,
    pub c: f64,
}

impl SingleMode {
    pub fn generator(&self) -> GeneratorPair {
        let a = -RealMatrix::identity(2, 2) * self.a_na
            + pauli_x() * self.a_x
            + pauli_z() * self.a_z
            + omega() * self.a_op;
        GeneratorPair::new(a, omega() * self.c).expect("2×2 with antisymmetric C")
    }
}

/// Thermal `(ν₁, ν₂)` rotated by a passive beam splitter of angle `mix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub nu1: f64,
    pub nu2: f64,
    pub mix: f64,
}

impl InitialState {
    pub fn state(&self) -> Result<CovarianceMatrix, String> {
        let thermal = CovarianceMatrix::thermal(&[self.nu1, self.nu2]).map_err(|e| e.to_string())?;
        let mut h = RealMatrix::zeros(4, 4);
        h[(0, 2)] = 1.0;
        h[(1, 3)] = 1.0;
        h[(2, 0)] = -1.0;
        h[(3, 1)] = -1.0;
        let o = expm(&h, self.mix).map_err(|e| e.to_string())?;
        thermal.transformed(&o).map_err(|e| e.to_string())
    }
}

pub fn params(r: f64, b: f64, c: f64) -> CatalogParams {
    CatalogParams {
        r,
        b,
        c,
        ..CatalogParams::default()
    }
}

fn finite(values: &[(&str, f64)]) -> Result<(), String> {
    match values.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, v)) => Err(format!("{name} must be finite, got {v}")),
        None => Ok(()),
    }
}

fn in_range(name: &str, n: usize, lo: usize, hi: usize) -> Result<(), String> {
    if (lo..=hi).contains(&n) {
        Ok(())
    } else {
        Err(format!("{name} must be between {lo} and {hi}, got {n}"))
    }
}

fn scenario(key: &str) -> Result<Scenario, String> {
    Scenario::from_key(key).ok_or_else(|| format!("unknown scenario {key:?}"))
}

fn check_params(p: &CatalogParams) -> Result<(), String> {
    finite(&[("r", p.r), ("b", p.b), ("c", p.c)])
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Channel {
    pub rate: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Region {
    pub extent: f64,
    pub grid: usize,
    /// Smallest certificate eigenvalue, row-major with `c` along rows and `a_x` along columns.
    pub min_eig: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SingleModeReport {
    pub is_cp: bool,
    pub min_eig: f64,
    pub noise_deficit: f64,
    pub classes: Vec<&'static str>,
    pub steady_nu: Option<f64>,
    pub channels: Vec<Channel>,
    pub region: Region,
}

pub fn explore_single_mode(m: &SingleMode, extent: f64, grid: usize) -> Result<String, String> {
    finite(&[("a_na", m.a_na), ("a_x", m.a_x), ("a_z", m.a_z), ("a_op", m.a_op), ("c", m.c), ("extent", extent)])?;
    if extent <= 0.0 {
        return Err("extent must be positive".into());
    }
    in_range("grid", grid, 2, MAX_GRID)?;

    let gen = m.generator();
    let verdict = check_generator_cp(&gen);
    let channels = if verdict.is_cp {
        extract_lindblad(&gen)
            .map_err(|e| e.to_string())?
            .channels()
            .iter()
            .map(|ch| Channel {
                rate: ch.rate,
                re: ch.vector.iter().map(|z| z.re).collect(),
                im: ch.vector.iter().map(|z| z.im).collect(),
            })
            .collect()
    } else {
        Vec::new()
    };
    let steady_nu = steady_state(&gen).unique().map(|s| s.nus()[0]);

    let step = 2.0 * extent / (grid - 1) as f64;
    let mut min_eig = Vec::with_capacity(grid * grid);
    for row in 0..grid {
        let c = -extent + row as f64 * step;
        for col in 0..grid {
            let a_x = -extent + col as f64 * step;
            min_eig.push(single_mode_certificate_eigenvalues(m.a_na, a_x, m.a_z, c)[0]);
        }
    }

    json(&SingleModeReport {
        is_cp: verdict.is_cp,
        min_eig: verdict.min_eigenvalue,
        noise_deficit: noise_deficit(&gen),
        classes: classify(&gen).names(),
        steady_nu,
        channels,
        region: Region { extent, grid, min_eig },
    })
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct TrajectoryReport {
    pub key: &'static str,
    pub name: &'static str,
    pub classes: Vec<&'static str>,
    pub is_cp: bool,
    pub closed_form: bool,
    pub times: Vec<f64>,
    /// `ν₁, ν₂, g₁ … g₄`.
    pub series: Vec<Series>,
    pub excitation: Vec<f64>,
    /// Combinations with zero rate, evaluated along the trajectory.
    pub conserved: Vec<Series>,
    pub max_violation: f64,
}

pub fn catalog_trajectory(
    key: &str,
    p: &CatalogParams,
    init: &InitialState,
    t_max: f64,
    samples: usize,
) -> Result<String, String> {
    let sc = scenario(key)?;
    check_params(p)?;
    finite(&[("nu1", init.nu1), ("nu2", init.nu2), ("mix", init.mix), ("t_max", t_max)])?;
    if !(t_max > 0.0 && t_max <= MAX_T) {
        return Err(format!("t_max must be in (0, {MAX_T}], got {t_max}"));
    }
    in_range("samples", samples, 2, MAX_SAMPLES)?;

    let gen = sc.generator(p);
    let gamma0 = init.state()?;
    let grid = uniform_grid(t_max, samples).map_err(|e| e.to_string())?;
    let traj = evolve_master(&gen, &gamma0, &grid).map_err(|e| e.to_string())?;
    let gs = traj
        .states
        .iter()
        .map(|s| gamma_to_g(s).map(|g| g.to_array()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;

    let labels = ["ν₁", "ν₂", "g₁", "g₂", "g₃", "g₄"];
    let series = labels
        .iter()
        .enumerate()
        .map(|(k, l)| Series {
            label: l.to_string(),
            values: gs.iter().map(|g| g[k]).collect(),
        })
        .collect();

    let sys = build_g_system(&gen).map_err(|e| e.to_string())?;
    let conserved = sc
        .combinations(p)
        .into_iter()
        .filter(|cmb| {
            let residual = (0..6)
                .map(|j| (0..6).map(|i| cmb.weights[i] * sys.a[(i, j)]).sum::<f64>().abs())
                .fold(0.0, f64::max);
            residual <= 1e-10 * sys.a.amax().max(1.0)
        })
        .map(|cmb| Series {
            values: gs
                .iter()
                .map(|g| g.iter().zip(&cmb.weights).map(|(a, b)| a * b).sum())
                .collect(),
            label: cmb.label,
        })
        .collect();

    json(&TrajectoryReport {
        key: sc.key(),
        name: sc.label(),
        classes: classify(&gen).names(),
        is_cp: check_generator_cp(&gen).is_cp,
        closed_form: traj.propagation == Propagation::ClosedForm,
        times: traj.times.clone(),
        series,
        excitation: traj.observables.iter().map(|o| o.excitation).collect(),
        conserved,
        max_violation: traj.max_violation(),
    })
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub key: &'static str,
    pub param: String,
    pub values: Vec<f64>,
    /// Eigenvalues of the rate matrix as `[re, im]`, sorted, one list per value.
    pub eigenvalues: Vec<Vec<[f64; 2]>>,
    /// Closed-form rates, present when they refer to the rate matrix itself.
    pub predicted: Option<Vec<Vec<f64>>>,
}

pub fn rate_sweep(key: &str, p: &CatalogParams, param: &str, from: f64, to: f64, steps: usize) -> Result<String, String> {
    let sc = scenario(key)?;
    check_params(p)?;
    finite(&[("from", from), ("to", to)])?;
    in_range("steps", steps, 2, MAX_STEPS)?;
    let set: fn(&mut CatalogParams, f64) = match param {
        "r" => |p, v| p.r = v,
        "b" => |p, v| p.b = v,
        "c" => |p, v| p.c = v,
        other => return Err(format!("unknown parameter {other:?}; expected r, b or c")),
    };

    let mut values = Vec::with_capacity(steps);
    let mut eigenvalues = Vec::with_capacity(steps);
    let mut predicted = Vec::with_capacity(steps);
    for k in 0..steps {
        let v = from + (to - from) * k as f64 / (steps - 1) as f64;
        let mut q = *p;
        set(&mut q, v);
        let sys = build_g_system(&sc.generator(&q)).map_err(|e| e.to_string())?;
        values.push(v);
        eigenvalues.push(sorted_eigenvalues(&sys.a).iter().map(|z| [z.re, z.im]).collect());
        predicted.push(sc.predicted_spectrum(&q));
    }
    json(&SweepReport {
        key: sc.key(),
        param: param.to_string(),
        values,
        eigenvalues,
        predicted: (sc.spectrum_kind() == SpectrumKind::Linear).then_some(predicted),
    })
}

#[derive(Debug, Serialize)]
struct ScenarioInfo {
    key: &'static str,
    name: &'static str,
}

pub fn scenarios() -> String {
    let list: Vec<ScenarioInfo> = Scenario::ALL
        .iter()
        .map(|s| ScenarioInfo {
            key: s.key(),
            name: s.label(),
        })
        .collect();
    serde_json::to_string(&list).expect("static data serializes")
}
