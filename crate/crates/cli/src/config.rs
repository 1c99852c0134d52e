//! Run configuration: a TOML file with `[params]`, `[profile]` and
//! `[command]` tables. Unknown keys are rejected so typos surface with their
//! location instead of silently falling back to defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use refraction_billiard::{BoundaryState, MapMethod, PerturbationProfile, PhysParams};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ParamsReport,
    ShiftProfile,
    Section,
    Orbit,
    Periodic,
    Twist,
    Caustics,
    OracleCheck,
}

impl Command {
    pub const ALL: [(&'static str, Command); 8] = [
        ("params-report", Command::ParamsReport),
        ("shift-profile", Command::ShiftProfile),
        ("section", Command::Section),
        ("orbit", Command::Orbit),
        ("periodic", Command::Periodic),
        ("twist", Command::Twist),
        ("caustics", Command::Caustics),
        ("oracle-check", Command::OracleCheck),
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
    }

    pub fn names() -> String {
        Self::ALL.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "energy_E")]
    energy: f64,
    offset_h: f64,
    mass_mu: f64,
    #[serde(rename = "stiffness_om")]
    stiffness: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(default)]
    epsilon: f64,
    #[serde(default)]
    fourier_cos: Vec<f64>,
    #[serde(default)]
    fourier_sin: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommand {
    #[serde(default)]
    command: String,
    #[serde(default)]
    seeds: Vec<[f64; 2]>,
    iterations: Option<usize>,
    tol: Option<f64>,
    method: Option<String>,
    grid: Option<usize>,
    m: Option<i64>,
    n: Option<usize>,
    action: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    #[serde(default)]
    profile: RawProfile,
    command: RawCommand,
}

/// Validated configuration; `command` is `None` for an empty command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PhysParams,
    pub profile: PerturbationProfile,
    pub command: Option<Command>,
    /// Initial `(xi, I)` pairs; empty means the command's default grid.
    pub seeds: Vec<BoundaryState>,
    pub iterations: usize,
    pub tol: f64,
    pub method: MapMethod,
    pub grid: usize,
    pub m: i64,
    pub n: usize,
    pub action: f64,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        let params = PhysParams::new(raw.params.energy, raw.params.offset_h, raw.params.mass_mu, raw.params.stiffness)
            .context("[params]")?;
        let p = raw.profile;
        let profile = PerturbationProfile::new(p.epsilon, p.fourier_cos, p.fourier_sin).context("[profile]")?;
        let c = raw.command;
        let command = match c.command.trim() {
            "" => None,
            name => match Command::from_name(name) {
                Some(cmd) => Some(cmd),
                None => bail!("[command] command: unknown command {name:?}; expected one of {}", Command::names()),
            },
        };
        let iterations = c.iterations.unwrap_or(500);
        if iterations == 0 {
            bail!("[command] iterations: must be at least 1");
        }
        let tol = c.tol.unwrap_or(1e-8);
        if !(tol > 0.0 && tol.is_finite()) {
            bail!("[command] tol: must be positive, got {tol}");
        }
        let grid = c.grid.unwrap_or(64);
        if grid < 2 {
            bail!("[command] grid: must be at least 2");
        }
        let method = match c.method.as_deref().unwrap_or("auto") {
            "auto" => MapMethod::Auto,
            "closed-form" => MapMethod::ClosedForm,
            "numeric" => MapMethod::Numeric,
            other => bail!("[command] method: unknown method {other:?}; expected auto, closed-form or numeric"),
        };
        if method == MapMethod::ClosedForm && !profile.is_circular() {
            bail!("[command] method: closed-form requires epsilon = 0");
        }
        let n = c.n.unwrap_or(1);
        if n == 0 {
            bail!("[command] n: period must be at least 1");
        }
        let seeds = c.seeds.iter().map(|[xi, i]| BoundaryState::new(*xi, *i)).collect::<Vec<_>>();
        for (k, s) in seeds.iter().enumerate() {
            let lim = BoundaryState::action_limit(s.xi, &profile, &params);
            if !(s.action.abs() < lim) {
                bail!("[command] seeds[{k}]: |I| = {} must be below {lim} at xi = {}", s.action.abs(), s.xi);
            }
        }
        let action = c.action.unwrap_or(1.0);
        if !(action.abs() < params.action_bound()) {
            bail!("[command] action: |I| must be below I_c = {}", params.action_bound());
        }
        Ok(Self { params, profile, command, seeds, iterations, tol, method, grid, m: c.m.unwrap_or(0), n, action })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[params]\nenergy_E = 2.5\noffset_h = 2.0\nmass_mu = 2.0\nstiffness_om = 1.0\n";

    #[test]
    fn parses_full_config() {
        let text = format!(
            "{BASE}[profile]\nepsilon = 0.01\nfourier_cos = [0.0, 0.0, 1.0]\nfourier_sin = []\n\
             [command]\ncommand = \"section\"\nseeds = [[0.0, 0.5], [1.0, -0.3]]\niterations = 10\ntol = 1e-9\n"
        );
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.command, Some(Command::Section));
        assert_eq!(c.seeds.len(), 2);
        assert_eq!(c.iterations, 10);
        assert_eq!(c.params.energy, 2.5);
        assert!(!c.profile.is_circular());
    }

    #[test]
    fn empty_command_is_none() {
        let c = RunConfig::parse(&format!("{BASE}[command]\ncommand = \"\"\n")).unwrap();
        assert_eq!(c.command, None);
        assert!(c.profile.is_circular());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = RunConfig::parse(&format!("{BASE}[command]\ncommand = \"section\"\niterations = 0\n")).unwrap_err();
        assert!(format!("{e:#}").contains("iterations"));
        let e = RunConfig::parse(&format!("{BASE}[command]\ncommand = \"sectoin\"\n")).unwrap_err();
        assert!(format!("{e:#}").contains("unknown command"));
        let e = RunConfig::parse(&format!("{BASE}energy = 3\n[command]\n")).unwrap_err();
        assert!(format!("{e:#}").contains("line 6"), "{e:#}");
        let e = RunConfig::parse(&format!("{BASE}[command]\ncommand = \"orbit\"\nseeds = [[0.0, 9.0]]\n")).unwrap_err();
        assert!(format!("{e:#}").contains("seeds[0]"));
        let e = RunConfig::parse("[params]\nenergy_E = 1.0\noffset_h = 2.0\nmass_mu = 2.0\nstiffness_om = 1.0\n[command]\n")
            .unwrap_err();
        assert!(format!("{e:#}").contains("[params]"));
    }
}
