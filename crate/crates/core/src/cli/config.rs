//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{NonlinearScheme, StepperConfig};
use crate::error::{MzkError, Result};
use crate::fields::{read_checkpoint, ComplexField2D, Grid2D, RealField2D, SystemState, VectorField2D};
use crate::groundstate::{reference_q, REFERENCE_R_MAX};
use crate::selfsimilar::{seeded_profile, solve_profile, ExplicitSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum E2Mode {
    Zero,
    MinusIE1,
}

/// Initial ion density for Gaussian data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NMode {
    Zero,
    /// `n0 = -(|E1|² + |E2|²)`
    MinusDensity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Gaussian {
        amplitude: f64,
        width: f64,
        center: (f64, f64),
        e2_mode: E2Mode,
        n_mode: NMode,
    },
    Selfsimilar {
        omega: f64,
        #[serde(rename = "T")]
        t_blow: f64,
        theta: f64,
    },
    Checkpoint {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "L")]
    pub side: f64,
    pub eta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub lambda_cap: f64,
    pub output_dir: PathBuf,
    pub checkpoint_interval: Option<f64>,
    pub initial_data: InitialData,
    pub seed: u64,
    pub adaptive: bool,
    pub drift_tolerance: f64,
    pub nonlinear: NonlinearScheme,
    /// Declared radial symmetry, used only by classification.
    pub radial: bool,
}

const COMMON_KEYS: &[&str] = &[
    "nx",
    "ny",
    "L",
    "eta",
    "dt",
    "horizon",
    "lambda_cap",
    "output_dir",
    "checkpoint_interval",
    "initial_data",
    "seed",
    "adaptive",
    "drift_tolerance",
    "nonlinear",
    "rk4_substeps",
    "radial",
];
const GAUSSIAN_KEYS: &[&str] = &["amplitude", "width", "center_x", "center_y", "e2_mode", "n_mode"];
const SELFSIMILAR_KEYS: &[&str] = &["omega", "T", "theta"];
const CHECKPOINT_KEYS: &[&str] = &["path"];

struct Entry {
    line: usize,
    value: String,
}

struct Entries(BTreeMap<String, Entry>);

fn err(line: usize, message: impl Into<String>) -> MzkError {
    MzkError::Config {
        line,
        message: message.into(),
    }
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(err(line, "empty key"));
            }
            if v.is_empty() {
                return Err(err(line, format!("missing value for '{k}'")));
            }
            let known = COMMON_KEYS.contains(&k)
                || GAUSSIAN_KEYS.contains(&k)
                || SELFSIMILAR_KEYS.contains(&k)
                || CHECKPOINT_KEYS.contains(&k);
            if !known {
                return Err(err(line, format!("unknown key '{k}'")));
            }
            if let Some(prev) = map.get(k) {
                let prev: &Entry = prev;
                return Err(err(line, format!("duplicate key '{k}' (first set on line {})", prev.line)));
            }
            map.insert(
                k.to_string(),
                Entry {
                    line,
                    value: v.to_string(),
                },
            );
        }
        Ok(Self(map))
    }

    fn last_line(&self) -> usize {
        self.0.values().map(|e| e.line).max().unwrap_or(0)
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        self.0.get(key)
    }

    fn required(&self, key: &str) -> Result<&Entry> {
        self.raw(key)
            .ok_or_else(|| err(self.last_line() + 1, format!("missing required key '{key}'")))
    }

    fn number(e: &Entry, key: &str) -> Result<f64> {
        e.value
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| err(e.line, format!("'{key}': malformed number '{}'", e.value)))
    }

    /// A real that must satisfy `ok`; violations are reported as domain errors.
    fn real(&self, key: &str, default: Option<f64>, ok: fn(f64) -> bool, what: &str) -> Result<f64> {
        let Some(e) = self.raw(key) else {
            return default.ok_or_else(|| err(self.last_line() + 1, format!("missing required key '{key}'")));
        };
        let x = Self::number(e, key)?;
        if !ok(x) {
            return Err(err(e.line, format!("domain error: {key} = {x} ({what})")));
        }
        Ok(x)
    }

    fn count(&self, key: &str, default: Option<u64>) -> Result<u64> {
        let Some(e) = self.raw(key) else {
            return default.ok_or_else(|| err(self.last_line() + 1, format!("missing required key '{key}'")));
        };
        e.value
            .parse::<u64>()
            .map_err(|_| err(e.line, format!("'{key}': expected a non-negative integer, got '{}'", e.value)))
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                v => Err(err(e.line, format!("'{key}': expected true or false, got '{v}'"))),
            },
        }
    }

    fn choice<'a>(&'a self, key: &str, default: Option<&'a str>, allowed: &[&str]) -> Result<&'a str> {
        let v = match self.raw(key) {
            Some(e) => {
                if !allowed.contains(&e.value.as_str()) {
                    return Err(err(
                        e.line,
                        format!("'{key}': expected one of {}, got '{}'", allowed.join("|"), e.value),
                    ));
                }
                e.value.as_str()
            }
            None => default.ok_or_else(|| err(self.last_line() + 1, format!("missing required key '{key}'")))?,
        };
        Ok(v)
    }

    fn reject_foreign(&self, variant: &str, allowed: &[&str]) -> Result<()> {
        for (k, e) in &self.0 {
            if !COMMON_KEYS.contains(&k.as_str()) && !allowed.contains(&k.as_str()) {
                return Err(err(e.line, format!("key '{k}' does not apply to initial_data = {variant}")));
            }
        }
        Ok(())
    }
}

fn positive(x: f64) -> bool {
    x > 0.0
}

fn power_of_two(e: &Entry, key: &str, n: u64) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(err(e.line, format!("domain error: {key} = {n} (must be a power of two >= 2)")));
    }
    Ok(n as usize)
}

/// Parse and validate a configuration file's text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let e = Entries::parse(text)?;
    let nx = power_of_two(e.required("nx")?, "nx", e.count("nx", None)?)?;
    let ny = power_of_two(e.required("ny")?, "ny", e.count("ny", None)?)?;
    let side = e.real("L", None, positive, "box side must be > 0")?;
    let eta = e.real("eta", None, positive, "coupling must be > 0")?;
    let dt = e.real("dt", None, positive, "time step must be > 0")?;
    let horizon = e.real("horizon", None, positive, "must be > 0")?;
    let lambda_cap = e.real("lambda_cap", Some(1e6), positive, "must be > 0")?;
    let output_dir = PathBuf::from(&e.required("output_dir")?.value);
    let checkpoint_interval = match e.raw("checkpoint_interval") {
        Some(_) => Some(e.real("checkpoint_interval", None, positive, "must be > 0")?),
        None => None,
    };
    let seed = e.count("seed", Some(0))?;
    let adaptive = e.flag("adaptive", true)?;
    let drift_tolerance = e.real("drift_tolerance", Some(1e-8), positive, "must be > 0")?;
    let nonlinear = match e.choice("nonlinear", Some("exact"), &["exact", "rk4"])? {
        "exact" => {
            if let Some(x) = e.raw("rk4_substeps") {
                return Err(err(x.line, "'rk4_substeps' requires nonlinear = rk4"));
            }
            NonlinearScheme::Exact
        }
        _ => {
            let substeps = e.count("rk4_substeps", Some(4))?;
            if substeps < 4 {
                let line = e.raw("rk4_substeps").map_or(0, |x| x.line);
                return Err(err(line, format!("domain error: rk4_substeps = {substeps} (must be >= 4)")));
            }
            NonlinearScheme::Rk4 {
                substeps: substeps as usize,
            }
        }
    };
    let radial = e.flag("radial", false)?;

    let initial_data = match e.choice("initial_data", None, &["gaussian", "selfsimilar", "checkpoint"])? {
        "gaussian" => {
            e.reject_foreign("gaussian", GAUSSIAN_KEYS)?;
            let any = |_: f64| true;
            InitialData::Gaussian {
                amplitude: e.real("amplitude", None, |x| x >= 0.0, "must be >= 0")?,
                width: e.real("width", None, positive, "must be > 0")?,
                center: (
                    e.real("center_x", Some(0.0), any, "")?,
                    e.real("center_y", Some(0.0), any, "")?,
                ),
                e2_mode: match e.choice("e2_mode", Some("zero"), &["zero", "minus_i_e1"])? {
                    "zero" => E2Mode::Zero,
                    _ => E2Mode::MinusIE1,
                },
                n_mode: match e.choice("n_mode", Some("zero"), &["zero", "minus_density"])? {
                    "zero" => NMode::Zero,
                    _ => NMode::MinusDensity,
                },
            }
        }
        "selfsimilar" => {
            e.reject_foreign("selfsimilar", SELFSIMILAR_KEYS)?;
            InitialData::Selfsimilar {
                omega: e.real("omega", None, positive, "must be > 0")?,
                t_blow: e.real("T", None, positive, "blow-up time must be > 0")?,
                theta: e.real("theta", Some(0.0), |_| true, "")?,
            }
        }
        _ => {
            e.reject_foreign("checkpoint", CHECKPOINT_KEYS)?;
            InitialData::Checkpoint {
                path: PathBuf::from(&e.required("path")?.value),
            }
        }
    };

    Ok(RunConfig {
        nx,
        ny,
        side,
        eta,
        dt,
        horizon,
        lambda_cap,
        output_dir,
        checkpoint_interval,
        initial_data,
        seed,
        adaptive,
        drift_tolerance,
        nonlinear,
        radial,
    })
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.nx, self.ny, self.side)
    }

    pub fn stepper(&self) -> StepperConfig {
        StepperConfig {
            dt: self.dt,
            eta: self.eta,
            adaptive: self.adaptive,
            lambda_cap: self.lambda_cap,
            drift_tolerance: self.drift_tolerance,
            nonlinear: self.nonlinear,
        }
    }

    /// The explicit solution for `initial_data = selfsimilar`: the solved profile
    /// when `ω` clears the radial domain, the limit profile otherwise.
    pub fn explicit_solution(&self) -> Result<Option<ExplicitSolution>> {
        let InitialData::Selfsimilar { omega, t_blow, theta } = self.initial_data else {
            return Ok(None);
        };
        let q = reference_q();
        let profile = if omega > REFERENCE_R_MAX {
            solve_profile(omega, self.eta, q, 1e-8)?
        } else {
            seeded_profile(q, omega, self.eta)?
        };
        Ok(Some(ExplicitSolution::new(profile, t_blow, theta)?))
    }

    pub fn initial_state(&self) -> Result<SystemState> {
        let grid = self.grid()?;
        match &self.initial_data {
            InitialData::Gaussian {
                amplitude,
                width,
                center,
                e2_mode,
                n_mode,
            } => {
                let (a, w, (cx, cy)) = (*amplitude, *width, *center);
                let e1 = ComplexField2D::from_fn(grid, |x, y| {
                    let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                    Complex64::new(a * (-r2 / (2.0 * w * w)).exp(), 0.0)
                });
                let e2 = match e2_mode {
                    E2Mode::Zero => ComplexField2D::zeros(grid),
                    E2Mode::MinusIE1 => e1.map(|z| Complex64::new(0.0, -1.0) * z),
                };
                let mut st = SystemState::new(e1, e2, RealField2D::zeros(grid), VectorField2D::zeros(grid), 0.0)?;
                if *n_mode == NMode::MinusDensity {
                    st.n = RealField2D::new(grid, st.density().into_iter().map(|d| -d).collect())?;
                }
                Ok(st)
            }
            InitialData::Selfsimilar { .. } => {
                let sol = self.explicit_solution()?.expect("selfsimilar variant");
                sol.evaluate(0.0, grid)
            }
            InitialData::Checkpoint { path } => {
                let st = read_checkpoint(std::io::BufReader::new(File::open(path)?))?;
                if st.grid().nx() != self.nx || st.grid().ny() != self.ny {
                    return Err(MzkError::Contract(format!(
                        "checkpoint grid {}x{} does not match nx = {}, ny = {}",
                        st.grid().nx(),
                        st.grid().ny(),
                        self.nx,
                        self.ny
                    )));
                }
                Ok(st)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# smallest valid file
nx = 32
ny = 32
L = 20
eta = 1
dt = 0.01
horizon = 1
output_dir = out
initial_data = gaussian
amplitude = 0.5
width = 1.5
";

    #[test]
    fn minimal_file() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!((c.nx, c.ny, c.side, c.eta), (32, 32, 20.0, 1.0));
        assert!(c.adaptive && !c.radial);
        assert_eq!(c.nonlinear, NonlinearScheme::Exact);
        assert!(matches!(
            c.initial_data,
            InitialData::Gaussian { e2_mode: E2Mode::Zero, n_mode: NMode::Zero, .. }
        ));
        let st = c.initial_state().unwrap();
        assert_eq!(st.grid().nx(), 32);
    }

    fn line_of(e: MzkError) -> (usize, String) {
        match e {
            MzkError::Config { line, message } => (line, message),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_eta_names_key_and_line() {
        let text = MINIMAL.replace("eta = 1", "eta = -1");
        let (line, msg) = line_of(parse_config(&text).unwrap_err());
        assert_eq!(line, 5);
        assert!(msg.contains("eta") && msg.contains("domain"), "{msg}");
    }

    #[test]
    fn duplicates_are_rejected() {
        let text = format!("{MINIMAL}dt = 0.02\n");
        let (line, msg) = line_of(parse_config(&text).unwrap_err());
        assert_eq!(line, 12);
        assert!(msg.contains("duplicate"), "{msg}");
    }

    #[test]
    fn unknown_missing_malformed() {
        let (line, msg) = line_of(parse_config(&format!("{MINIMAL}colour = red\n")).unwrap_err());
        assert_eq!(line, 12);
        assert!(msg.contains("unknown key"));
        let (_, msg) = line_of(parse_config(&MINIMAL.replace("dt = 0.01\n", "")).unwrap_err());
        assert!(msg.contains("missing required key 'dt'"), "{msg}");
        let (line, msg) = line_of(parse_config(&MINIMAL.replace("dt = 0.01", "dt = 0.0.1")).unwrap_err());
        assert_eq!(line, 6);
        assert!(msg.contains("malformed"));
        let (_, msg) = line_of(parse_config(&MINIMAL.replace("nx = 32", "nx = 30")).unwrap_err());
        assert!(msg.contains("power of two"));
    }

    #[test]
    fn keys_are_case_sensitive_and_variant_specific() {
        assert!(parse_config(&MINIMAL.replace("L = 20", "l = 20")).is_err());
        let (_, msg) = line_of(parse_config(&format!("{MINIMAL}omega = 3\n")).unwrap_err());
        assert!(msg.contains("does not apply"), "{msg}");
    }
}
