//! File formats: JSON for states, generators and reports, CSV for trajectories,
//! markdown for the class table.
//!
//! Floats are written at 12 significant digits. JSON documents round their
//! values on construction, so a document re-parses into an equal value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cp::{check_generator_cp_with_tol, noise_deficit, trace_diagnostic, TOL_CP};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::generator::{classify, partition, DynamicsClass, GeneratorPair, Signature};
use crate::lindblad::{extract_lindblad, LindbladChannel, LindbladData};
use crate::linalg::RealMatrix;
use crate::state::CovarianceMatrix;
use crate::two_mode::{CatalogEntry, CatalogParams, SpectrumKind};

pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("float literal")
}

/// Text form used in CSV cells.
pub fn fmt_sig(x: f64) -> String {
    format!("{:.*e}", SIG_DIGITS - 1, round_sig(x))
}

fn rows_of(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| round_sig(m[(i, j)])).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], modes: usize, what: &str) -> Result<RealMatrix> {
    let d = 2 * modes;
    if rows.len() != d {
        return Err(Error::Parse(format!(
            "{what}: expected {d} rows for N = {modes}, found {}",
            rows.len()
        )));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(Error::Parse(format!(
            "{what}: row {} has {} entries, expected {d}",
            i + 1,
            r.len()
        )));
    }
    Ok(RealMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn ensure_modes(modes: usize) -> Result<()> {
    if modes == 0 {
        Err(Error::Parse("N must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    #[serde(rename = "N")]
    pub modes: usize,
    pub gamma: Vec<Vec<f64>>,
}

impl StateJson {
    pub fn from_state(s: &CovarianceMatrix) -> Self {
        Self {
            modes: s.modes(),
            gamma: rows_of(s.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<CovarianceMatrix> {
        ensure_modes(self.modes)?;
        CovarianceMatrix::new(matrix_from_rows(&self.gamma, self.modes, "gamma")?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    #[serde(rename = "N")]
    pub modes: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

impl GeneratorJson {
    pub fn from_generator(g: &GeneratorPair) -> Self {
        Self {
            modes: g.modes(),
            a: rows_of(g.a()),
            c: rows_of(g.c()),
        }
    }

    pub fn to_generator(&self) -> Result<GeneratorPair> {
        ensure_modes(self.modes)?;
        GeneratorPair::new(
            matrix_from_rows(&self.a, self.modes, "A")?,
            matrix_from_rows(&self.c, self.modes, "C")?,
        )
    }
}

pub fn parse_state(text: &str) -> Result<CovarianceMatrix> {
    serde_json::from_str::<StateJson>(text)?.to_state()
}

pub fn parse_generator(text: &str) -> Result<GeneratorPair> {
    serde_json::from_str::<GeneratorJson>(text)?.to_generator()
}

pub fn state_to_json(s: &CovarianceMatrix) -> String {
    to_json(&StateJson::from_state(s))
}

pub fn generator_to_json(g: &GeneratorPair) -> String {
    to_json(&GeneratorJson::from_generator(g))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub is_cp: bool,
    pub min_eig: f64,
    pub noise_deficit: f64,
    #[serde(rename = "trace_AN")]
    pub trace_an: f64,
}

impl VerdictJson {
    pub fn from_generator(g: &GeneratorPair) -> Self {
        Self::with_tol(g, TOL_CP)
    }

    pub fn with_tol(g: &GeneratorPair, tol: f64) -> Self {
        let v = check_generator_cp_with_tol(g, tol);
        Self {
            is_cp: v.is_cp,
            min_eig: round_sig(v.min_eigenvalue),
            noise_deficit: round_sig(if v.is_cp { 0.0 } else { noise_deficit(g) }),
            trace_an: round_sig(trace_diagnostic(g).trace_an),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub gamma: f64,
    pub ell_re: Vec<f64>,
    pub ell_im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindbladJson {
    #[serde(rename = "H_eff")]
    pub h_eff: Vec<Vec<f64>>,
    pub channels: Vec<ChannelJson>,
}

impl LindbladJson {
    pub fn from_data(ld: &LindbladData) -> Self {
        Self {
            h_eff: rows_of(ld.h_eff()),
            channels: ld
                .channels()
                .iter()
                .map(|ch| ChannelJson {
                    gamma: round_sig(ch.rate),
                    ell_re: ch.vector.iter().map(|z| round_sig(z.re)).collect(),
                    ell_im: ch.vector.iter().map(|z| round_sig(z.im)).collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds validated Lindblad data; rounding may leave vectors orthonormal
    /// only to about 1e-12.
    pub fn to_data(&self) -> Result<LindbladData> {
        let d = self.h_eff.len();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::Parse(format!("H_eff: bad dimension {d}")));
        }
        let h = matrix_from_rows(&self.h_eff, d / 2, "H_eff")?;
        let channels = self
            .channels
            .iter()
            .enumerate()
            .map(|(k, ch)| {
                if ch.ell_re.len() != d || ch.ell_im.len() != d {
                    return Err(Error::Parse(format!("channel {}: vector length differs from {d}", k + 1)));
                }
                Ok(LindbladChannel {
                    rate: ch.gamma,
                    vector: nalgebra::DVector::from_iterator(
                        d,
                        ch.ell_re
                            .iter()
                            .zip(&ch.ell_im)
                            .map(|(&re, &im)| num_complex::Complex64::new(re, im)),
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LindbladData::new(h, channels)
    }
}

/// Output of the `classify` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    #[serde(rename = "N")]
    pub modes: usize,
    pub classes: Vec<String>,
    pub norms: BTreeMap<String, f64>,
    pub verdict: VerdictJson,
    /// Present only for completely positive generators.
    pub lindblad: Option<LindbladJson>,
}

impl ClassifyReport {
    pub fn new(g: &GeneratorPair, tol: f64) -> Self {
        let report = partition(g);
        let verdict = VerdictJson::with_tol(g, tol);
        let lindblad = if verdict.is_cp {
            extract_lindblad(g).ok().map(|ld| LindbladJson::from_data(&ld))
        } else {
            None
        };
        Self {
            modes: g.modes(),
            classes: classify(g).names().iter().map(|s| s.to_string()).collect(),
            norms: DynamicsClass::ALL
                .iter()
                .map(|&c| (c.name().to_string(), round_sig(report.norm(c))))
                .collect(),
            verdict,
            lindblad,
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("# Classification (N = {})\n\n", self.modes);
        s.push_str(&format!("Classes present: {}\n\n", join_or_none(&self.classes)));
        s.push_str("| Class | Norm |\n|---|---|\n");
        for c in DynamicsClass::ALL {
            let v = self.norms.get(c.name()).copied().unwrap_or(0.0);
            s.push_str(&format!("| {} | {} |\n", c.name(), fmt_sig(v)));
        }
        let v = &self.verdict;
        s.push_str(&format!(
            "\nCP: {}; min eigenvalue {}; noise deficit {}; Tr(A_N) {}\n",
            v.is_cp,
            fmt_sig(v.min_eig),
            fmt_sig(v.noise_deficit),
            fmt_sig(v.trace_an)
        ));
        if let Some(ld) = &self.lindblad {
            s.push_str("\n| Channel | Rate |\n|---|---|\n");
            for (k, ch) in ld.channels.iter().enumerate() {
                s.push_str(&format!("| {} | {} |\n", k + 1, fmt_sig(ch.gamma)));
            }
        }
        s
    }
}

fn join_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".into()
    } else {
        items.join(", ")
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationJson {
    pub label: String,
    pub weights: Vec<f64>,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntryJson {
    pub key: String,
    pub scenario: String,
    pub class: String,
    pub symbol: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    /// `"A"` or `"A^2"`.
    pub spectrum_of: String,
    pub predicted_spectrum: Vec<f64>,
    /// `[re, im]` pairs of the eigenvalues of `𝒜`.
    pub computed_spectrum: Vec<[f64; 2]>,
    pub combinations: Vec<CombinationJson>,
    pub conserved: Vec<String>,
    pub max_deviation: f64,
}

impl CatalogEntryJson {
    pub fn from_entry(e: &CatalogEntry) -> Self {
        Self {
            key: e.scenario.key().into(),
            scenario: e.name.into(),
            class: e.class.name().into(),
            symbol: e.class.symbol().into(),
            a: rows_of(e.generator.a()),
            c: rows_of(e.generator.c()),
            spectrum_of: match e.spectrum_kind {
                SpectrumKind::Linear => "A".into(),
                SpectrumKind::Squared => "A^2".into(),
            },
            predicted_spectrum: e.predicted_spectrum.iter().map(|&x| round_sig(x)).collect(),
            computed_spectrum: e
                .computed_spectrum
                .iter()
                .map(|z| [round_sig(z.re), round_sig(z.im)])
                .collect(),
            combinations: e
                .combinations
                .iter()
                .map(|c| CombinationJson {
                    label: c.label.clone(),
                    weights: c.weights.iter().map(|&w| round_sig(w)).collect(),
                    rate: round_sig(c.rate),
                })
                .collect(),
            conserved: e.conserved.iter().map(|c| c.label.clone()).collect(),
            max_deviation: round_sig(e.max_deviation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRowJson {
    pub single_mode: bool,
    pub orthogonal: bool,
    pub passive: bool,
    pub state_dependent: bool,
    /// `None` for impossible signatures.
    pub class: Option<String>,
    pub symbol: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogJson {
    pub params: CatalogParams,
    pub table: Vec<TableRowJson>,
    pub entries: Vec<CatalogEntryJson>,
}

impl CatalogJson {
    pub fn new(params: &CatalogParams, entries: &[CatalogEntry]) -> Self {
        Self {
            params: *params,
            table: Signature::all()
                .into_iter()
                .map(|s| {
                    let class = s.class();
                    TableRowJson {
                        single_mode: s.single_mode,
                        orthogonal: s.orthogonal,
                        passive: s.passive,
                        state_dependent: s.state_dependent,
                        class: class.map(|c| c.name().to_string()),
                        symbol: class.map(|c| c.symbol().to_string()),
                    }
                })
                .collect(),
            entries: entries.iter().map(CatalogEntryJson::from_entry).collect(),
        }
    }

    pub fn to_markdown(&self) -> String {
        let p = &self.params;
        let mut s = String::from("# Dynamics classes\n\n");
        s.push_str(
            "| Single-mode | Orthogonal | Passive | State-dependent | Class |\n|---|---|---|---|---|\n",
        );
        for row in &self.table {
            let name = match (&row.class, &row.symbol) {
                (Some(c), Some(sym)) => format!("{sym}: {c}"),
                _ => "Not Possible".into(),
            };
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                yes_no(row.single_mode),
                yes_no(row.orthogonal),
                yes_no(row.passive),
                yes_no(row.state_dependent),
                name
            ));
        }
        s.push_str(&format!(
            "\n# Two-mode scenarios (r = {}, b = {}, c = {}, E1 = {}, E2 = {})\n\n",
            p.r, p.b, p.c, p.e1, p.e2
        ));
        s.push_str("| Scenario | Class | Spectrum of | Eigenvalues | Conserved |\n|---|---|---|---|---|\n");
        for e in &self.entries {
            let eig: Vec<String> = e.predicted_spectrum.iter().map(|&x| fmt_short(x)).collect();
            let conserved = if e.conserved.is_empty() {
                "none".to_string()
            } else {
                e.conserved.join(", ")
            };
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                e.scenario,
                e.class,
                e.spectrum_of,
                eig.join(", "),
                conserved
            ));
        }
        s.push_str("\n# Eigen-combinations\n\n| Scenario | Combination | Rate |\n|---|---|---|\n");
        for e in &self.entries {
            for c in &e.combinations {
                s.push_str(&format!("| {} | {} | {} |\n", e.scenario, c.label, fmt_short(c.rate)));
            }
        }
        s
    }
}

fn fmt_short(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Trajectory header: `t`, `gamma_i_j` for `i < j` (1-based), `nu_1..nu_N`,
/// `n_total`, `activity`.
pub fn trajectory_header(modes: usize) -> Vec<String> {
    let d = 2 * modes;
    let mut h = vec!["t".to_string()];
    for i in 0..d {
        for j in (i + 1)..d {
            h.push(format!("gamma_{}_{}", i + 1, j + 1));
        }
    }
    h.extend((1..=modes).map(|j| format!("nu_{j}")));
    h.push("n_total".into());
    h.push("activity".into());
    h
}

pub fn trajectory_to_csv(traj: &Trajectory) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trajectory_header(traj.modes()))?;
    for ((t, s), o) in traj.times.iter().zip(&traj.states).zip(&traj.observables) {
        let mut rec = vec![fmt_sig(*t)];
        rec.extend(s.upper_triangle().iter().map(|&x| fmt_sig(x)));
        rec.extend(o.nus.iter().map(|&x| fmt_sig(x)));
        rec.push(fmt_sig(o.excitation));
        rec.push(fmt_sig(o.activity));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Parsed trajectory table, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn parse_trajectory_csv(text: &str) -> Result<TrajectoryTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("{f}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(TrajectoryTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_master, uniform_grid};
    use crate::linalg::omega;
    use crate::two_mode::catalog;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.0e-20 / 3.0), -6.66666666667e-21);
        assert!(round_sig(-0.0).is_sign_positive());
        assert_eq!(fmt_sig(-0.0), "0.00000000000e0");
        assert_eq!(fmt_sig(0.5), "5.00000000000e-1");
    }

    #[test]
    fn state_round_trip() {
        let s = CovarianceMatrix::thermal(&[0.3, -0.7]).unwrap();
        let text = state_to_json(&s);
        assert!(text.contains("\"N\": 2"));
        let back = parse_state(&text).unwrap();
        assert_eq!(back, s);
        let again: StateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(again, StateJson::from_state(&s));
    }

    #[test]
    fn state_rejects_bad_shapes() {
        assert!(matches!(parse_state(r#"{"N":1,"gamma":[[0,1]]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_state(r#"{"N":1,"gamma":[[0,1],[0,0]]}"#), Err(Error::NotAntisymmetric { .. })));
        assert!(matches!(parse_state(r#"{"N":1,"gamma":[[0,1],[-1]]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_state("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn generator_error_names_entry() {
        let text = r#"{"N":2,"A":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
                       "C":[[0,0,0,0],[0,0,0,0.3],[0,0,0,0],[0,0,0,0]]}"#;
        match parse_generator(text) {
            Err(Error::NotAntisymmetric { row, col, .. }) => assert_eq!((row, col), (1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verdict_json_keys() {
        let g = GeneratorPair::new(RealMatrix::identity(2, 2) * -0.1, omega()).unwrap();
        let v = VerdictJson::from_generator(&g);
        assert!(!v.is_cp);
        assert!((v.noise_deficit - 0.4).abs() < 1e-12);
        let text = to_json(&v);
        for key in ["is_cp", "min_eig", "noise_deficit", "trace_AN"] {
            assert!(text.contains(key));
        }
        assert_eq!(serde_json::from_str::<VerdictJson>(&text).unwrap(), v);
    }

    #[test]
    fn lindblad_json_round_trip() {
        let g = GeneratorPair::new(RealMatrix::identity(2, 2) * -1.0, omega() * 0.5).unwrap();
        let ld = extract_lindblad(&g).unwrap();
        let j = LindbladJson::from_data(&ld);
        let text = to_json(&j);
        assert!(text.contains("H_eff") && text.contains("ell_re"));
        let back: LindbladJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        let data = back.to_data().unwrap();
        assert_eq!(data.channels().len(), 2);
    }

    #[test]
    fn classify_report_round_trip() {
        let g = GeneratorPair::linear(RealMatrix::identity(2, 2) * -0.5).unwrap();
        let rep = ClassifyReport::new(&g, TOL_CP);
        assert_eq!(rep.classes, vec!["Noise".to_string()]);
        assert!(rep.verdict.is_cp);
        let back: ClassifyReport = serde_json::from_str(&to_json(&rep)).unwrap();
        assert_eq!(back, rep);
        assert!(rep.to_markdown().contains("| Noise |"));
    }

    #[test]
    fn catalog_outputs() {
        let p = CatalogParams::default();
        let entries = catalog(&p).unwrap();
        let cj = CatalogJson::new(&p, &entries);
        assert_eq!(cj.table.len(), 16);
        assert_eq!(cj.table.iter().filter(|r| r.class.is_none()).count(), 7);
        let back: CatalogJson = serde_json::from_str(&to_json(&cj)).unwrap();
        assert_eq!(back, cj);
        let md = cj.to_markdown();
        assert_eq!(md.matches("Not Possible").count(), 7);
        assert!(md.contains("Correlating"));
    }

    #[test]
    fn trajectory_csv_layout() {
        let g = GeneratorPair::linear(RealMatrix::identity(2, 2) * -0.5).unwrap();
        let grid = uniform_grid(2.0, 5).unwrap();
        let traj = evolve_master(&g, &CovarianceMatrix::thermal(&[1.0]).unwrap(), &grid).unwrap();
        let text = trajectory_to_csv(&traj).unwrap();
        assert!(text.starts_with("t,gamma_1_2,nu_1,n_total,activity\n"));
        let table = parse_trajectory_csv(&text).unwrap();
        assert_eq!(table.rows.len(), 5);
        for (t, nu) in table.column("t").unwrap().iter().zip(table.column("nu_1").unwrap()) {
            assert!((nu - (-t).exp()).abs() < 1e-11);
        }
        assert_eq!(trajectory_header(2).len(), 1 + 6 + 2 + 2);
    }
}
