//! Flat `key = value` configuration and the study description built from it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{builtin_curve, Curve, FourierMode, SamplingOptions, Vec2};
use crate::operators::NormalConvention;
use crate::potentials::{Clearance, Lattice};
use crate::solvers::{BmScaling, Method, ProblemSpec};

pub const DEFAULT_LADDER: [usize; 7] = [10, 20, 40, 80, 160, 320, 640];
pub const DEFAULT_EPS: f64 = 1.0 / 6.0;
pub const DEFAULT_X0: Vec2 = Vec2::new(0.1, 0.2);
pub const INTERIOR_POINTS: [Vec2; 2] = [Vec2::new(0.2, 0.4), Vec2::new(-0.2, -0.4)];
pub const EXTERIOR_POINTS: [Vec2; 2] = [Vec2::new(4.0, 1.0), Vec2::new(-1.0, 3.0)];

pub fn default_direction() -> Vec2 {
    Vec2::new(1.0, 1.0) * std::f64::consts::FRAC_1_SQRT_2
}

const KEYS: &[&str] = &[
    "curve",
    "k",
    "eps",
    "N",
    "method",
    "coupling",
    "c",
    "alpha",
    "x0",
    "d",
    "observe",
    "bm_scaling",
    "unstable_eps",
    "normals",
    "lattice",
    "clearance",
    "sequential",
];

/// Raw settings: config-file entries, later overridden by command-line flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
    /// Directory for resolving relative paths (Fourier coefficient files).
    pub base_dir: Option<PathBuf>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if s.values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut s = Self::parse(&text)?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    /// Set or replace a key (command-line overrides).
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    /// Canonical `key = value` text, sorted by key.
    pub fn echo(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!("{key}: `{v}` is not finite")))
    }
}

fn numbers(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_f64(key, t))
        .collect()
}

fn point(key: &str, v: &str) -> Result<Vec2> {
    match numbers(key, v)?.as_slice() {
        [x, y] => Ok(Vec2::new(*x, *y)),
        _ => Err(Error::Config(format!("{key}: expected two numbers `x y`, got `{v}`"))),
    }
}

/// Complex numbers as `re,im`, `a+bi`, `a-bi`, `bi` or `a`.
pub fn parse_complex(key: &str, v: &str) -> Result<Complex64> {
    let t: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("{key}: `{v}` is not a complex number"));
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex64::new(parse_f64(key, re)?, parse_f64(key, im)?));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(parse_f64(key, &t)?, 0.0));
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    let re: f64 = parse_f64(key, re).map_err(|_| bad())?;
    let im: f64 = parse_f64(key, im).map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Parse `m x_cos x_sin y_cos y_sin` lines.
pub fn parse_fourier(text: &str) -> Result<Vec<FourierMode>> {
    let mut modes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::Config(format!(
                "fourier line {}: expected `m x_cos x_sin y_cos y_sin`",
                lineno + 1
            )));
        }
        let m: u32 = f[0]
            .parse()
            .map_err(|_| Error::Config(format!("fourier line {}: bad mode `{}`", lineno + 1, f[0])))?;
        let c: Vec<f64> = f[1..].iter().map(|t| parse_f64("fourier", t)).collect::<Result<_>>()?;
        modes.push(FourierMode {
            m,
            x_cos: c[0],
            x_sin: c[1],
            y_cos: c[2],
            y_sin: c[3],
        });
    }
    if modes.is_empty() {
        return Err(Error::Config("fourier file has no modes".into()));
    }
    Ok(modes)
}

fn parse_curve(v: &str, base: Option<&Path>) -> Result<Curve> {
    let mut parts = v.split_whitespace();
    let name = parts.next().ok_or_else(|| Error::Config("curve: empty".into()))?;
    if name == "fourier" {
        let path = parts
            .next()
            .ok_or_else(|| Error::Config("curve: `fourier <path>` needs a path".into()))?;
        let mut p = PathBuf::from(path);
        if p.is_relative() {
            if let Some(b) = base {
                p = b.join(p);
            }
        }
        let text = std::fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        return Ok(Curve::fourier(parse_fourier(&text)?));
    }
    let params: Vec<f64> = parts.map(|t| parse_f64("curve", t)).collect::<Result<_>>()?;
    builtin_curve(name, &params).map_err(|e| Error::Config(e.to_string()))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got `{v}`"))),
    }
}

/// A fully resolved convergence study.
#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub curve: Curve,
    pub curve_label: String,
    pub problem: ProblemSpec,
    pub eps: f64,
    pub ladder: Vec<usize>,
    /// Point source of the exterior manufactured solution.
    pub x0: Vec2,
    /// Plane-wave direction (interior field or incident wave).
    pub d: Vec2,
    /// Points where field errors are measured.
    pub observe: Vec<Vec2>,
    pub sampling: SamplingOptions,
    pub normals: NormalConvention,
    pub exec: Execution,
    /// Clearance for field export.
    pub clearance: Clearance,
    pub lattice: Option<Lattice>,
    /// Settings the study was built from, for echoing in reports.
    pub echo: String,
}

/// Serializable summary of the study parameters.
#[derive(Clone, Debug, Serialize)]
pub struct StudyEcho {
    pub curve: String,
    pub problem: ProblemSpec,
    pub eps: f64,
    pub ladder: Vec<usize>,
    pub x0: Vec2,
    pub d: Vec2,
    pub observe: Vec<Vec2>,
}

impl StudyConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let curve_label = s.get("curve").unwrap_or("paper_ellipse").to_string();
        let curve = parse_curve(&curve_label, s.base_dir.as_deref())?;
        let method = s.get("method").unwrap_or("dD01");
        let problem = match method {
            "transmission" => ProblemSpec::Transmission {
                k: s.float("k")?.unwrap_or(3.0),
                c: s.float("c")?.unwrap_or(2.0 / 3.0),
                alpha: s.float("alpha")?.unwrap_or(1.5),
            },
            "burton_miller" | "burton-miller" | "bm" => {
                let k = s.float("k")?.unwrap_or(2.0);
                let coupling = match s.get("coupling") {
                    Some(v) => parse_complex("coupling", v)?,
                    None => Complex64::new(0.0, -k),
                };
                let scaling = match s.get("bm_scaling").unwrap_or("unscaled") {
                    "unscaled" => BmScaling::Unscaled,
                    "mesh" | "mesh_scaled" => BmScaling::MeshScaled,
                    other => return Err(Error::Config(format!("bm_scaling: unknown `{other}`"))),
                };
                ProblemSpec::BurtonMiller { k, coupling, scaling }
            }
            other => ProblemSpec::Boundary {
                method: other
                    .parse::<Method>()
                    .map_err(|_| Error::Config(format!("method: unknown `{other}`")))?,
                k: s.float("k")?.unwrap_or(3.0),
            },
        };
        for (key, used) in [
            ("c", matches!(problem, ProblemSpec::Transmission { .. })),
            ("alpha", matches!(problem, ProblemSpec::Transmission { .. })),
            ("coupling", matches!(problem, ProblemSpec::BurtonMiller { .. })),
            ("bm_scaling", matches!(problem, ProblemSpec::BurtonMiller { .. })),
        ] {
            if !used && s.get(key).is_some() {
                return Err(Error::Config(format!("`{key}` does not apply to method {}", problem.label())));
            }
        }
        problem.validate().map_err(|e| Error::Config(e.to_string()))?;

        let eps = s.float("eps")?.unwrap_or(DEFAULT_EPS);
        let ladder = match s.get("N") {
            Some(v) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Config(format!("N: `{t}` is not a positive integer")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => DEFAULT_LADDER.to_vec(),
        };
        if ladder.is_empty() {
            return Err(Error::Config("N: empty ladder".into()));
        }
        if ladder.iter().any(|&n| n < 4) {
            return Err(Error::Config("N: every entry must be at least 4".into()));
        }
        if ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("N: ladder must be strictly increasing".into()));
        }
        let x0 = s.get("x0").map(|v| point("x0", v)).transpose()?.unwrap_or(DEFAULT_X0);
        let d = match s.get("d") {
            Some(v) => {
                let d = point("d", v)?;
                let n = d.norm();
                if n == 0.0 {
                    return Err(Error::Config("d: direction must be nonzero".into()));
                }
                d * (1.0 / n)
            }
            None => default_direction(),
        };
        let observe = match s.get("observe") {
            Some(v) => v
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(|t| point("observe", t))
                .collect::<Result<Vec<_>>>()?,
            None => match problem {
                ProblemSpec::Boundary { .. } => EXTERIOR_POINTS.to_vec(),
                _ => INTERIOR_POINTS.to_vec(),
            },
        };
        if observe.is_empty() {
            return Err(Error::Config("observe: no points".into()));
        }
        let sampling = SamplingOptions {
            allow_unstable_half: s.get("unstable_eps").map(|v| parse_bool("unstable_eps", v)).transpose()?.unwrap_or(false),
        };
        let normals = match s.get("normals").unwrap_or("kernel") {
            "kernel" => NormalConvention::Kernel,
            "as_printed" => NormalConvention::AsPrinted,
            other => return Err(Error::Config(format!("normals: unknown `{other}`"))),
        };
        let exec = if s.get("sequential").map(|v| parse_bool("sequential", v)).transpose()?.unwrap_or(false) {
            Execution::Sequential
        } else {
            Execution::Parallel
        };
        let clearance = match s.float("clearance")? {
            Some(f) if f >= 0.0 => Clearance::Scaled(f),
            Some(f) => return Err(Error::Config(format!("clearance: {f} must be >= 0"))),
            None => Clearance::default(),
        };
        let lattice = match s.get("lattice") {
            Some(v) => {
                let n = numbers("lattice", v)?;
                if n.len() != 6 || n[4].fract() != 0.0 || n[5].fract() != 0.0 || n[4] < 1.0 || n[5] < 1.0 {
                    return Err(Error::Config("lattice: expected `xmin xmax ymin ymax nx ny`".into()));
                }
                Some(Lattice::new(n[0], n[1], n[2], n[3], n[4] as usize, n[5] as usize).map_err(|e| Error::Config(e.to_string()))?)
            }
            None => None,
        };
        // reject bad eps before any study runs
        crate::geometry::sample_grids(&[(curve.clone(), ladder[0])], eps, sampling)
            .map_err(|e| Error::Config(e.to_string()))?;

        Ok(StudyConfig {
            curve,
            curve_label,
            problem,
            eps,
            ladder,
            x0,
            d,
            observe,
            sampling,
            normals,
            exec,
            clearance,
            lattice,
            echo: s.echo(),
        })
    }

    pub fn echo(&self) -> StudyEcho {
        StudyEcho {
            curve: self.curve_label.clone(),
            problem: self.problem,
            eps: self.eps,
            ladder: self.ladder.clone(),
            x0: self.x0,
            d: self.d,
            observe: self.observe.clone(),
        }
    }
}
