//! Wall-clock suites for per-gate cost, register-size scaling and
//! gate-count scaling, with least-squares fits.
//!
//! Every point is the median of [`SAMPLES`] timed samples after one
//! discarded warm-up round; samples of a suite are taken round-robin. State resets are never timed. All timing is
//! single-threaded.

use std::f64::consts::FRAC_PI_3;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use qaccel_core::gates::{apply_gate, GateInstance, GateKind};
use qaccel_core::statecore::{StateError, StateVector, MAX_QUBITS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SAMPLES: usize = 5;

/// Minimum gate applications per sample in the per-gate suite.
pub const GATE_REPS: usize = 100_000;

/// Gate counts of the depth suite.
pub const DEFAULT_DEPTHS: [usize; 11] = [100, 1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000];

/// Gate kinds of the depth suite.
pub const DEPTH_KINDS: [GateKind; 3] = [GateKind::X, GateKind::H, GateKind::Cnot];

/// Qubits used by the depth suite.
pub const DEPTH_QUBITS: usize = 2;

/// Target amplitude updates per sample; small registers repeat the
/// circuit so each sample is long enough to time.
const WORK_PER_SAMPLE: usize = 1 << 18;

/// Gate applications per depth-suite sample.
const DEPTH_WORK: usize = 10_000;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid range: {0}")]
    Range(String),
    #[error(transparent)]
    Capacity(#[from] StateError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Capacity(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `time = intercept + slope · x`
    Linear,
    /// `log₂ time = intercept + slope · x`
    Log2Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

/// Ordinary least squares of `ys` on `xs`. Needs at least two distinct `xs`;
/// standard errors need at least three points and are `NaN` otherwise.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let (se_slope, se_intercept) = if n > 2 {
        let s2 = sse / (nf - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / nf + mx * mx / sxx)).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    Some((slope, intercept, r_squared, se_slope, se_intercept))
}

impl Fit {
    pub fn of(model: FitModel, points: &[Point]) -> Option<Self> {
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = match model {
            FitModel::Linear => points.iter().map(|p| p.time_ns).collect(),
            FitModel::Log2Linear => points.iter().map(|p| p.time_ns.log2()).collect(),
        };
        let (slope, intercept, r_squared, slope_stderr, intercept_stderr) = fit_linear(&xs, &ys)?;
        Some(Self {
            model,
            slope,
            intercept,
            r_squared,
            slope_stderr,
            intercept_stderr,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    /// CSV `variable` column.
    pub label: String,
    pub x: f64,
    pub time_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<Point>,
    pub fit: Option<Fit>,
}

impl Series {
    fn fitted(name: impl Into<String>, points: Vec<Point>, model: Option<FitModel>) -> Self {
        let fit = model.and_then(|m| Fit::of(m, &points));
        Self {
            name: name.into(),
            points,
            fit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub suite: String,
    pub series: Vec<Series>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    variable: &'a str,
    time_ns: f64,
}

impl BenchResult {
    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Pointwise `numerator / denominator` time ratios over shared labels.
    pub fn ratios(&self, numerator: &str, denominator: &str) -> Vec<(String, f64)> {
        let (Some(a), Some(b)) = (self.series(numerator), self.series(denominator)) else {
            return Vec::new();
        };
        a.points
            .iter()
            .filter_map(|p| {
                let q = b.points.iter().find(|q| q.label == p.label)?;
                Some((p.label.clone(), p.time_ns / q.time_ns))
            })
            .collect()
    }

    /// Writes `<suite>_<series>.csv` per series; returns the paths.
    pub fn write_csv(&self, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
        std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths = Vec::new();
        for s in &self.series {
            let path = dir.join(format!("{}_{}.csv", self.suite, s.name));
            let csv_err = |source| BenchError::Csv {
                path: path.clone(),
                source,
            };
            let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
            for p in &s.points {
                w.serialize(CsvRow {
                    variable: &p.label,
                    time_ns: p.time_ns,
                })
                .map_err(csv_err)?;
            }
            w.flush().map_err(|source| BenchError::Io {
                path: path.clone(),
                source,
            })?;
            paths.push(path);
        }
        Ok(paths)
    }
}

impl fmt::Display for BenchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.series {
            writeln!(f, "[{}/{}]", self.suite, s.name)?;
            for p in &s.points {
                writeln!(f, "  {:>10}  {:>16.1} ns", p.label, p.time_ns)?;
            }
            if let Some(fit) = &s.fit {
                writeln!(
                    f,
                    "  fit {:?}: slope {:.6e} ± {:.2e}, intercept {:.6e} ± {:.2e}, R² {:.5}",
                    fit.model, fit.slope, fit.slope_stderr, fit.intercept, fit.intercept_stderr, fit.r_squared
                )?;
            }
        }
        Ok(())
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

type Sampler<'a> = Box<dyn FnMut() -> f64 + 'a>;

/// Median of [`SAMPLES`] calls per sampler after one discarded round.
/// Rounds visit every sampler in turn, so a burst of host load lands on
/// one sample of each point rather than on a run of neighbouring points.
fn interleaved_medians(mut samplers: Vec<Sampler<'_>>) -> Vec<f64> {
    samplers.iter_mut().for_each(|s| {
        s();
    });
    let mut samples = vec![Vec::with_capacity(SAMPLES); samplers.len()];
    for _ in 0..SAMPLES {
        for (s, out) in samplers.iter_mut().zip(&mut samples) {
            out.push(s());
        }
    }
    samples.into_iter().map(median).collect()
}

fn run(state: &mut StateVector, gates: &[GateInstance]) {
    for g in gates {
        apply_gate(state, g).expect("benchmark gates are in range");
    }
}

fn timed_gate(kind: GateKind) -> GateInstance {
    let qubits: Vec<usize> = (0..kind.arity()).collect();
    let angle = kind.takes_angle().then_some(FRAC_PI_3);
    GateInstance::new(kind, qubits, angle).expect("valid benchmark gate")
}

/// Mean time of one application of each timed gate kind, on as many qubits
/// as the gate acts on, starting from the uniform superposition.
pub fn bench_gates() -> BenchResult {
    let samplers = GateKind::TIMED
        .iter()
        .map(|&kind| {
            let gate = timed_gate(kind);
            let n = kind.arity();
            let prepare: Vec<GateInstance> = (0..n).map(GateInstance::h).collect();
            let mut state = StateVector::new(n).expect("small register");
            Box::new(move || {
                state.reset();
                run(&mut state, &prepare);
                let t = Instant::now();
                for _ in 0..GATE_REPS {
                    apply_gate(&mut state, &gate).expect("in range");
                }
                t.elapsed().as_nanos() as f64 / GATE_REPS as f64
            }) as Sampler
        })
        .collect();
    let points = GateKind::TIMED
        .iter()
        .zip(interleaved_medians(samplers))
        .map(|(kind, time_ns)| Point {
            label: kind.mnemonic().to_string(),
            x: kind.arity() as f64,
            time_ns,
        })
        .collect();
    BenchResult {
        suite: "gates".into(),
        series: vec![Series::fitted("per_gate", points, None)],
    }
}

/// `H` on qubit 0 then a CNOT chain: `(|0…0⟩ + |1…1⟩)/√2`.
pub fn epr_chain(n: usize) -> Vec<GateInstance> {
    std::iter::once(GateInstance::h(0))
        .chain((1..n).map(|q| GateInstance::cnot(q - 1, q)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkipMode {
    On,
    Off,
    #[default]
    Both,
}

impl SkipMode {
    fn settings(self) -> &'static [bool] {
        match self {
            SkipMode::On => &[true],
            SkipMode::Off => &[false],
            SkipMode::Both => &[true, false],
        }
    }
}

impl FromStr for SkipMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "on" => Ok(SkipMode::On),
            "off" => Ok(SkipMode::Off),
            "both" => Ok(SkipMode::Both),
            other => Err(format!("expected on, off or both, got {other:?}")),
        }
    }
}

/// Series name for one zero-skip setting.
pub fn skip_series(enabled: bool) -> &'static str {
    if enabled {
        "skip_on"
    } else {
        "skip_off"
    }
}

/// Time of the EPR chain for each `n` in `n_min..=n_max`, with a log₂-time
/// fit per zero-skip setting.
pub fn bench_qubit_scaling(n_min: usize, n_max: usize, mode: SkipMode) -> Result<BenchResult, BenchError> {
    if n_min == 0 || n_min > n_max {
        return Err(BenchError::Range(format!("need 1 <= n_min <= n_max, got {n_min}..={n_max}")));
    }
    if n_max > MAX_QUBITS {
        StateVector::new(n_max)?;
    }
    let settings = mode.settings();
    let mut samplers: Vec<Sampler> = Vec::new();
    for n in n_min..=n_max {
        for &skip in settings {
            let gates = epr_chain(n);
            let mut state = StateVector::new(n)?;
            state.set_zero_skip(skip);
            let reps = ((WORK_PER_SAMPLE >> n) / n).max(1);
            samplers.push(Box::new(move || {
                let mut total = 0.0;
                for _ in 0..reps {
                    state.reset();
                    let t = Instant::now();
                    run(&mut state, &gates);
                    total += t.elapsed().as_nanos() as f64;
                }
                total / reps as f64
            }));
        }
    }
    let times = interleaved_medians(samplers);
    let series = settings
        .iter()
        .enumerate()
        .map(|(k, &skip)| {
            let points = (n_min..=n_max)
                .zip(times.iter().skip(k).step_by(settings.len()))
                .map(|(n, &time_ns)| Point {
                    label: n.to_string(),
                    x: n as f64,
                    time_ns,
                })
                .collect();
            Series::fitted(skip_series(skip), points, Some(FitModel::Log2Linear))
        })
        .collect();
    Ok(BenchResult {
        suite: "qubits".into(),
        series,
    })
}

/// Time of `g` repeated gates on [`DEPTH_QUBITS`] qubits for each `g` in
/// `depths`, with an independent linear fit per kind.
pub fn bench_depth_scaling(depths: &[usize], kinds: &[GateKind]) -> Result<BenchResult, BenchError> {
    if depths.is_empty() {
        return Err(BenchError::Range("no gate counts given".into()));
    }
    let mut series = Vec::new();
    for &kind in kinds {
        if kind.arity() > DEPTH_QUBITS || !kind.is_unitary() {
            return Err(BenchError::Range(format!("{} does not fit the depth suite", kind.mnemonic())));
        }
        let gate = timed_gate(kind);
        let samplers = depths
            .iter()
            .map(|&g| {
                let circuit = vec![gate.clone(); g];
                let reps = (DEPTH_WORK / g.max(1)).max(1);
                let mut state = StateVector::new(DEPTH_QUBITS)?;
                run(&mut state, &[GateInstance::h(0), GateInstance::h(1)]);
                Ok(Box::new(move || {
                    let t = Instant::now();
                    for _ in 0..reps {
                        run(&mut state, &circuit);
                    }
                    t.elapsed().as_nanos() as f64 / reps as f64
                }) as Sampler)
            })
            .collect::<Result<Vec<_>, BenchError>>()?;
        let points = depths
            .iter()
            .zip(interleaved_medians(samplers))
            .map(|(&g, time_ns)| Point {
                label: g.to_string(),
                x: g as f64,
                time_ns,
            })
            .collect();
        series.push(Series::fitted(kind.mnemonic(), points, Some(FitModel::Linear)));
    }
    Ok(BenchResult {
        suite: "depth".into(),
        series,
    })
}
