//! Line-oriented `section.key = value` run configuration.

use std::collections::HashMap;
use std::path::PathBuf;

use rankone::scalar::parse_rational;
use rankone::space::SpaceParams;
use rankone::spectral::default_tau;
use rankone::verify::{Perturbation, SuiteConfig, Tolerances};
use rankone::{make_space, ComplexRational, PowerSeries, Rational, SpaceKind, WeightSequence};
use serde::Serialize;

/// A config problem, tied to a line when it came from one.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Numeric {
    pub n: usize,
    pub n_max: usize,
    pub k: usize,
    pub grid: usize,
    pub grid_radius: Option<f64>,
    pub tau: Option<f64>,
    pub gap: f64,
    pub exact_n: usize,
    pub exact_powers: usize,
}

impl Default for Numeric {
    fn default() -> Self {
        Numeric { n: 256, n_max: 32, k: 12, grid: 201, grid_radius: None, tau: None, gap: 10.0, exact_n: 16, exact_powers: 6 }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spaces: Vec<WeightSequence>,
    pub perturbations: Vec<Perturbation>,
    pub numeric: Numeric,
    pub tolerances: Tolerances,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn tau(&self) -> f64 {
        self.numeric.tau.unwrap_or_else(|| default_tau(self.numeric.n))
    }

    pub fn suite(&self) -> SuiteConfig {
        let n = &self.numeric;
        SuiteConfig {
            n: n.n,
            n_max: n.n_max,
            k: n.k,
            grid_resolution: n.grid,
            grid_radius: n.grid_radius,
            tau: n.tau,
            gap: n.gap,
            exact_n: n.exact_n,
            exact_powers: n.exact_powers,
            tolerances: self.tolerances,
            ..SuiteConfig::new(self.spaces.clone(), self.perturbations.clone())
        }
    }
}

impl Default for RunConfig {
    /// Hardy space with the default perturbation set.
    fn default() -> Self {
        RunConfig {
            spaces: vec![make_space(SpaceKind::Hardy, SpaceParams::default()).expect("hardy is valid")],
            perturbations: SuiteConfig::default_perturbations(),
            numeric: Numeric::default(),
            tolerances: Tolerances::default(),
            output_dir: None,
        }
    }
}

const REPEATABLE: [&str; 3] = ["perturbation.f", "perturbation.g", "perturbation.preset"];

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| ConfigError::at(line, format!("{key}: expected a non-negative integer, got {v:?}")))
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(ConfigError::at(line, format!("{key}: expected a finite number, got {v:?}"))),
    }
}

fn parse_q(line: usize, key: &str, v: &str) -> Result<Rational, ConfigError> {
    parse_rational(v).map_err(|e| ConfigError::at(line, format!("{key}: {e}")))
}

#[derive(Default)]
struct SpaceBlock {
    kinds: Option<(usize, Vec<SpaceKind>)>,
    table: Option<(usize, Vec<Rational>)>,
    rho_min: Option<(usize, Rational)>,
    rho_max: Option<(usize, Rational)>,
}

impl SpaceBlock {
    fn build(self) -> Result<Vec<WeightSequence>, ConfigError> {
        let (kind_line, kinds) = self.kinds.unwrap_or((0, vec![SpaceKind::Hardy]));
        let custom_line = |l: usize| if l > 0 { Some(l) } else { None };
        let has_custom = kinds.contains(&SpaceKind::Custom);
        for (line, key) in [
            (self.table.as_ref().map(|t| t.0), "space.table"),
            (self.rho_min.as_ref().map(|t| t.0), "space.rho_min"),
            (self.rho_max.as_ref().map(|t| t.0), "space.rho_max"),
        ] {
            if let (Some(line), false) = (line, has_custom) {
                return Err(ConfigError::at(line, format!("{key} only applies to space.kind = custom")));
            }
        }
        let line = self.table.as_ref().map(|t| t.0).unwrap_or(kind_line);
        let params = SpaceParams {
            table: self.table.map(|t| t.1).unwrap_or_default(),
            rho_min: self.rho_min.map(|t| t.1),
            rho_max: self.rho_max.map(|t| t.1),
        };
        kinds
            .into_iter()
            .map(|kind| {
                make_space(kind, params.clone()).map_err(|e| ConfigError { line: custom_line(line), message: e.to_string() })
            })
            .collect()
    }
}

/// Parses and validates a configuration; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut space = SpaceBlock::default();
    let mut perturbations: Vec<Perturbation> = Vec::new();
    let mut numeric = Numeric::default();
    let mut tol = Tolerances::default();
    let mut output_dir = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected `section.key = value`, got {content:?}")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("{key}: missing value")));
        }
        if !REPEATABLE.contains(&key) {
            if let Some(first) = seen.insert(key.to_string(), line) {
                return Err(ConfigError::at(line, format!("{key} already set on line {first}")));
            }
        }
        match key {
            "space.kind" => {
                let kinds = value
                    .split(',')
                    .map(|s| SpaceKind::parse(s).map_err(|e| ConfigError::at(line, e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(dup) = kinds.iter().enumerate().find_map(|(i, k)| kinds[..i].contains(k).then_some(k)) {
                    return Err(ConfigError::at(line, format!("space {dup} listed twice")));
                }
                space.kinds = Some((line, kinds));
            }
            "space.table" => {
                let table = value.split(',').map(|v| parse_q(line, key, v)).collect::<Result<Vec<_>, _>>()?;
                space.table = Some((line, table));
            }
            "space.rho_min" => space.rho_min = Some((line, parse_q(line, key, value)?)),
            "space.rho_max" => space.rho_max = Some((line, parse_q(line, key, value)?)),
            "perturbation.f" => {
                let f = PowerSeries::parse_coeffs(value).map_err(|e| ConfigError::at(line, format!("{key}: {e}")))?;
                perturbations.push(Perturbation::constant(f, ComplexRational::one()));
            }
            "perturbation.g" => {
                let gamma = ComplexRational::parse(value).map_err(|e| ConfigError::at(line, format!("{key}: {e}")))?;
                let Some(last) = perturbations.last_mut() else {
                    return Err(ConfigError::at(line, "perturbation.g must follow a perturbation.f"));
                };
                last.g = PowerSeries::constant(gamma);
            }
            "perturbation.preset" => match value {
                "default" => perturbations.extend(SuiteConfig::default_perturbations()),
                other => return Err(ConfigError::at(line, format!("unknown preset {other:?}"))),
            },
            "numeric.n" => numeric.n = parse_usize(line, key, value)?,
            "numeric.n_max" => numeric.n_max = parse_usize(line, key, value)?,
            "numeric.k" => numeric.k = parse_usize(line, key, value)?,
            "numeric.grid" => numeric.grid = parse_usize(line, key, value)?,
            "numeric.grid_radius" => numeric.grid_radius = Some(parse_f64(line, key, value)?),
            "numeric.tau" => numeric.tau = Some(parse_f64(line, key, value)?),
            "numeric.gap" => numeric.gap = parse_f64(line, key, value)?,
            "numeric.exact_n" => numeric.exact_n = parse_usize(line, key, value)?,
            "numeric.exact_powers" => numeric.exact_powers = parse_usize(line, key, value)?,
            "tolerance.eigen" => tol.eigen_residual = parse_f64(line, key, value)?,
            "tolerance.radius" => tol.radius = parse_f64(line, key, value)?,
            "tolerance.angle" => tol.angle = parse_f64(line, key, value)?,
            "tolerance.wandering" => tol.wandering = parse_f64(line, key, value)?,
            "output.dir" => output_dir = Some(PathBuf::from(value)),
            other => return Err(ConfigError::at(line, format!("unknown key {other:?}"))),
        }
    }

    let at = |key: &str| seen.get(key).copied();
    let check = |ok: bool, key: &str, what: &str| -> Result<(), ConfigError> {
        if ok {
            Ok(())
        } else {
            Err(ConfigError { line: at(key), message: format!("{key} {what}") })
        }
    };
    check(numeric.n >= 32, "numeric.n", "must be at least 32")?;
    check(numeric.n_max >= 1, "numeric.n_max", "must be positive")?;
    check(numeric.k >= 2, "numeric.k", "must be at least 2")?;
    check(numeric.grid >= 3 && numeric.grid % 2 == 1, "numeric.grid", "must be odd and at least 3 so the origin is a grid point")?;
    check(numeric.grid_radius.is_none_or(|r| r > 0.0), "numeric.grid_radius", "must be positive")?;
    check(numeric.tau.is_none_or(|t| t > 0.0), "numeric.tau", "must be positive")?;
    check(numeric.gap > 1.0, "numeric.gap", "must exceed 1")?;
    check(numeric.exact_n >= 5, "numeric.exact_n", "must be at least 5")?;
    check(numeric.exact_powers >= 1, "numeric.exact_powers", "must be positive")?;
    for (key, v) in [
        ("tolerance.eigen", tol.eigen_residual),
        ("tolerance.radius", tol.radius),
        ("tolerance.angle", tol.angle),
        ("tolerance.wandering", tol.wandering),
    ] {
        check(v >= 0.0, key, "must be non-negative")?;
    }

    Ok(RunConfig { spaces: space.build()?, perturbations, numeric, tolerances: tol, output_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# header\n\nspace.kind = bergman  # trailing\nperturbation.f = 0, -1\n").unwrap();
        assert_eq!(cfg.spaces[0].kind(), SpaceKind::Bergman);
        assert_eq!(cfg.perturbations.len(), 1);
    }

    #[test]
    fn g_sets_gamma_of_last_f() {
        let cfg = parse_config("perturbation.f = 1\nperturbation.f = 2\nperturbation.g = 1/3 i\n").unwrap();
        assert_eq!(cfg.perturbations[0].g, PowerSeries::constant(ComplexRational::one()));
        assert_eq!(cfg.perturbations[1].g.coeff(0), ComplexRational::parse("1/3 i").unwrap());
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let err = parse_config("numeric.n = 64\nnumeric.n = 128\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: numeric.n already set on line 1");
    }

    #[test]
    fn table_without_custom_is_rejected() {
        let err = parse_config("space.table = 1, 2\n").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn default_tau() {
        let cfg = parse_config("numeric.n = 400\n").unwrap();
        assert!((cfg.tau() - 0.5).abs() < 1e-15);
    }
}
