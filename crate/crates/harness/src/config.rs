//! Run configuration: a flat `key = value` file plus command-line overrides.
//!
//! Recognised keys: `alpha`, `beta`, `epsilon` (one value or a comma list),
//! `shape` (`square`, `rectangle`, `octagon`, `vertices`), `l0`, `l1`, `l2`,
//! `straight`, `steps`, `vertex_file`, `alignment` (`cell_corner` or
//! `offset`), `dx`, `dy`, `t_max`, `dt_out`, `t_compare`, `output`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chessflow::geometry::Point;
use chessflow::{Medium, Polyrectangle};

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Syntax {
        line: usize,
        text: String,
    },
    UnknownKey(String),
    Missing(&'static str),
    Invalid {
        field: String,
        reason: String,
    },
    VertexFile {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            ConfigError::Syntax { line, text } => write!(
                f,
                "config line {line}: expected `key = value`, got `{text}`"
            ),
            ConfigError::UnknownKey(k) => write!(f, "unknown config key `{k}`"),
            ConfigError::Missing(k) => write!(f, "missing required field `{k}`"),
            ConfigError::Invalid { field, reason } => write!(f, "invalid `{field}`: {reason}"),
            ConfigError::VertexFile { path, line, reason } => {
                write!(f, "{} line {line}: {reason}", path.display())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

type Res<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Square {
        l0: f64,
    },
    Rectangle {
        l1: f64,
        l2: f64,
    },
    /// Staircase octagon with straight edges of `straight` and `steps` stair
    /// steps of one half-cell at each corner.
    Octagon {
        straight: f64,
        steps: usize,
    },
    Vertices {
        path: PathBuf,
        points: Vec<Point<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alignment {
    CellCorner,
    /// The cell-corner placement translated by `(dx, dy)`.
    Offset(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub epsilons: Vec<f64>,
    pub shape: ShapeSpec,
    pub alignment: Alignment,
    pub t_max: f64,
    pub dt_out: f64,
    /// Comparison window `[0, t_compare]`; defaults to `t_max`.
    pub t_compare: Option<f64>,
    pub output: PathBuf,
}

const KEYS: [&str; 17] = [
    "alpha",
    "beta",
    "epsilon",
    "shape",
    "l0",
    "l1",
    "l2",
    "straight",
    "steps",
    "vertex_file",
    "alignment",
    "dx",
    "dy",
    "t_max",
    "dt_out",
    "t_compare",
    "output",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Res<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: k + 1,
            text: line.to_string(),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &'static str) -> Res<Option<f64>> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>().map_err(|e| ConfigError::Invalid {
                field: key.into(),
                reason: format!("`{v}`: {e}"),
            })
        })
        .transpose()
}

fn required(map: &BTreeMap<String, String>, key: &'static str) -> Res<f64> {
    number(map, key)?.ok_or(ConfigError::Missing(key))
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    /// Reads `path` (if any) and applies `overrides` (`key=value`) on top.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Res<Self> {
        let mut map = match path {
            Some(p) => {
                let text =
                    fs::read_to_string(p).map_err(|e| ConfigError::Io(p.to_path_buf(), e))?;
                parse_pairs(&text)?
            }
            None => BTreeMap::new(),
        };
        map.extend(parse_pairs(&overrides.join("\n"))?);
        Self::from_pairs(&map)
    }

    pub fn from_pairs(map: &BTreeMap<String, String>) -> Res<Self> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        let alpha = required(map, "alpha")?;
        let beta = required(map, "beta")?;
        let epsilons = map
            .get("epsilon")
            .ok_or(ConfigError::Missing("epsilon"))?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid("epsilon", format!("`{s}`: {e}")))
            })
            .collect::<Res<Vec<f64>>>()?;
        let shape = match map.get("shape").map(String::as_str).unwrap_or("square") {
            "square" => ShapeSpec::Square {
                l0: required(map, "l0")?,
            },
            "rectangle" => ShapeSpec::Rectangle {
                l1: required(map, "l1")?,
                l2: required(map, "l2")?,
            },
            "octagon" => {
                let steps = required(map, "steps")?;
                if steps < 0.0 || steps.fract() != 0.0 {
                    return Err(invalid("steps", "must be a non-negative integer"));
                }
                ShapeSpec::Octagon {
                    straight: required(map, "straight")?,
                    steps: steps as usize,
                }
            }
            "vertices" => {
                let path = PathBuf::from(
                    map.get("vertex_file")
                        .ok_or(ConfigError::Missing("vertex_file"))?,
                );
                let points = read_vertex_file(&path)?;
                ShapeSpec::Vertices { path, points }
            }
            other => return Err(invalid("shape", format!("unknown shape `{other}`"))),
        };
        let alignment = match map
            .get("alignment")
            .map(String::as_str)
            .unwrap_or("cell_corner")
        {
            "cell_corner" => Alignment::CellCorner,
            "offset" => Alignment::Offset(
                number(map, "dx")?.unwrap_or(0.0),
                number(map, "dy")?.unwrap_or(0.0),
            ),
            other => return Err(invalid("alignment", format!("unknown alignment `{other}`"))),
        };
        let cfg = RunConfig {
            alpha,
            beta,
            epsilons,
            shape,
            alignment,
            t_max: required(map, "t_max")?,
            dt_out: number(map, "dt_out")?.unwrap_or(0.01),
            t_compare: number(map, "t_compare")?,
            output: PathBuf::from(map.get("output").map(String::as_str).unwrap_or("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Res<()> {
        if !(self.alpha < 0.0) {
            return Err(invalid("alpha", "must be negative"));
        }
        if !(self.beta > 0.0) {
            return Err(invalid("beta", "must be positive"));
        }
        if self.epsilons.is_empty() {
            return Err(ConfigError::Missing("epsilon"));
        }
        let cap = 8.0 / (self.beta - self.alpha);
        for &e in &self.epsilons {
            if !(e > 0.0 && e < cap) {
                return Err(invalid(
                    "epsilon",
                    format!("{e} outside (0, 8/(beta-alpha) = {cap})"),
                ));
            }
        }
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("{v} must be positive")))
            }
        };
        match &self.shape {
            ShapeSpec::Square { l0 } => positive("l0", *l0)?,
            ShapeSpec::Rectangle { l1, l2 } => {
                positive("l1", *l1)?;
                positive("l2", *l2)?;
            }
            ShapeSpec::Octagon { straight, .. } => positive("straight", *straight)?,
            ShapeSpec::Vertices { .. } => {}
        }
        positive("t_max", self.t_max)?;
        positive("dt_out", self.dt_out)?;
        if let Some(t) = self.t_compare {
            positive("t_compare", t)?;
        }
        Ok(())
    }

    /// The single ε of a simulate/effective run.
    pub fn epsilon(&self) -> Res<f64> {
        match self.epsilons.as_slice() {
            [e] => Ok(*e),
            _ => Err(invalid("epsilon", "this command takes a single value")),
        }
    }

    pub fn medium(&self, epsilon: f64) -> Res<Medium> {
        Medium::new(self.alpha, self.beta, epsilon).map_err(|e| invalid("epsilon", e.to_string()))
    }

    fn shift(&self) -> (f64, f64) {
        match self.alignment {
            Alignment::CellCorner => (0.0, 0.0),
            Alignment::Offset(dx, dy) => (dx, dy),
        }
    }

    /// The ε-approximation of the configured shape and the point its
    /// effective counterpart is centred on.
    pub fn initial(&self, epsilon: f64) -> Res<(Polyrectangle, Point<f64>)> {
        let h = epsilon / 2.0;
        let (dx, dy) = self.shift();
        let poly = match &self.shape {
            ShapeSpec::Square { l0 } => {
                let s = odd_cells(*l0, h);
                Polyrectangle::rectangle(dx, dy, s, s)
            }
            ShapeSpec::Rectangle { l1, l2 } => {
                Polyrectangle::rectangle(dx, dy, odd_cells(*l1, h), odd_cells(*l2, h))
            }
            ShapeSpec::Octagon { straight, steps } => {
                let m = (straight / h).round().max(1.0);
                // the bottom edge starts at (steps·h, y0); its first cell is α
                // when steps + y0/h is even
                let lift = if steps % 2 == 1 { h } else { 0.0 };
                Polyrectangle::staircase_octagon(dx, dy + lift, m * h, *steps, h)
                    .map_err(|e| invalid("straight", e.to_string()))?
            }
            ShapeSpec::Vertices { points, .. } => {
                let moved: Vec<Point<f64>> = points
                    .iter()
                    .map(|p| Point::new(p.x + dx, p.y + dy))
                    .collect();
                Polyrectangle::from_vertices(&moved)
                    .map_err(|e| invalid("vertex_file", e.to_string()))?
            }
        };
        let vs = poly.vertices();
        let (lo, hi) = vs.iter().fold(
            (
                Point::new(f64::INFINITY, f64::INFINITY),
                Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), v| {
                (
                    Point::new(lo.x.min(v.x), lo.y.min(v.y)),
                    Point::new(hi.x.max(v.x), hi.y.max(v.y)),
                )
            },
        );
        Ok((poly, Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y))))
    }
}

/// Nearest odd multiple of `h` to `l` (ties go up): a side whose two end
/// cells share the colour of the corner cell.
pub fn odd_cells(l: f64, h: f64) -> f64 {
    let k = ((l / h - 1.0) / 2.0 + 0.5).floor().max(0.0);
    (2.0 * k + 1.0) * h
}

/// Reads one `x y` (or `x,y`) pair per line; blank lines and `#` comments
/// are skipped.
pub fn read_vertex_file(path: &Path) -> Res<Vec<Point<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
    let mut points = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| ConfigError::VertexFile {
            path: path.to_path_buf(),
            line: k + 1,
            reason,
        };
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected two coordinates, got `{line}`")));
        }
        let x = fields[0]
            .parse::<f64>()
            .map_err(|e| bad(format!("`{}`: {e}", fields[0])))?;
        let y = fields[1]
            .parse::<f64>()
            .map_err(|e| bad(format!("`{}`: {e}", fields[1])))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(bad("non-finite coordinate".into()));
        }
        points.push(Point::new(x, y));
    }
    if points.len() < 4 {
        return Err(ConfigError::VertexFile {
            path: path.to_path_buf(),
            line: text.lines().count(),
            reason: format!("{} vertices; need at least 4", points.len()),
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &str) -> BTreeMap<String, String> {
        parse_pairs(s).unwrap()
    }

    #[test]
    fn odd_cell_rounding() {
        assert!((odd_cells(2.0, 0.1) - 2.1).abs() < 1e-12);
        assert!((odd_cells(2.0, 0.05) - 2.05).abs() < 1e-12);
        assert!((odd_cells(2.0, 0.025) - 2.025).abs() < 1e-12);
        assert!((odd_cells(1.5, 0.1) - 1.5).abs() < 1e-12);
        assert!((odd_cells(0.01, 0.1) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn parses_and_overrides() {
        let base = "alpha = -3\nbeta = 1 # forcing\nepsilon = 0.2, 0.1\nl0 = 1.5\nt_max = 1\n";
        let mut map = pairs(base);
        map.extend(pairs("alignment=offset\ndx=0.05"));
        let cfg = RunConfig::from_pairs(&map).unwrap();
        assert_eq!(cfg.epsilons, vec![0.2, 0.1]);
        assert_eq!(cfg.alignment, Alignment::Offset(0.05, 0.0));
        assert!(cfg.epsilon().is_err());
        let (p, c) = cfg.initial(0.2).unwrap();
        assert_eq!(p.vertices()[0], Point::new(0.05, 0.0));
        assert!((c.x - 0.8).abs() < 1e-12 && (c.y - 0.75).abs() < 1e-12);
    }

    #[test]
    fn validation_names_the_field() {
        let bad = |s: &str| RunConfig::from_pairs(&pairs(s)).unwrap_err().to_string();
        assert!(bad("alpha=1\nbeta=1\nepsilon=0.1\nl0=1\nt_max=1").contains("alpha"));
        assert!(bad("alpha=-3\nbeta=1\nepsilon=2.5\nl0=1\nt_max=1").contains("epsilon"));
        assert!(bad("alpha=-3\nbeta=1\nepsilon=0.1\nl0=-1\nt_max=1").contains("l0"));
        assert!(bad("alpha=-3\nbeta=1\nepsilon=0.1\nl0=1").contains("t_max"));
        assert!(bad("alpha=-3\nbeta=1\nepsilon=0.1\nl0=1\nt_max=1\ncolour=red").contains("colour"));
        assert!(parse_pairs("alpha -3").is_err());
    }

    #[test]
    fn octagon_corner_cells_are_alpha() {
        for steps in 0..4 {
            let map = pairs(&format!(
                "alpha=-3\nbeta=1\nepsilon=0.5\nshape=octagon\nstraight=1.75\nsteps={steps}\nt_max=1"
            ));
            let cfg = RunConfig::from_pairs(&map).unwrap();
            let m = cfg.medium(0.5).unwrap();
            let (p, _) = cfg.initial(0.5).unwrap();
            let (st, setup) = chessflow::flow::FlowState::new(&p, &m).unwrap();
            assert!(
                setup.is_empty() && st.pinned.iter().all(|&x| x),
                "steps {steps}"
            );
        }
    }
}
