//! Run configuration: a single TOML file with nested blocks.
//!
//! Defaults mirror the base system (N=16, J1=1, J2=−1, E0=0.01,
//! t_max=1000, P=20). Validation happens before any computation and
//! reports the offending block and field; TOML syntax errors carry
//! line/column positions from the parser.

use serde::Deserialize;

use helichain::{
    default_e1_grid, default_tau_grid, ChainSpec, EnvironmentSpec, ImpurityKind, ImpuritySpec,
    Model, SweepGrid, XxzSpec,
};

/// A configuration problem: parse failure or semantic validation error.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub protocol: ProtocolBlock,
    #[serde(default)]
    pub kick: Option<KickBlock>,
    #[serde(default)]
    pub environment: Option<EnvironmentBlock>,
    #[serde(default)]
    pub impurity: Option<ImpurityBlock>,
    #[serde(default)]
    pub compare: Option<CompareBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default = "default_kind")]
    pub kind: String,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub e0: Option<f64>,
    pub jx: Option<f64>,
    pub jz: Option<f64>,
}

fn default_kind() -> String {
    "multiferroic".to_string()
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            kind: default_kind(),
            j1: None,
            j2: None,
            e0: None,
            jx: None,
            jz: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolBlock {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_n() -> usize {
    16
}
fn default_t_max() -> f64 {
    1000.0
}
fn default_dt() -> f64 {
    0.05
}

impl Default for ProtocolBlock {
    fn default() -> Self {
        ProtocolBlock {
            n: default_n(),
            t_max: default_t_max(),
            dt: default_dt(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KickBlock {
    pub tau: Option<f64>,
    pub e1: Option<f64>,
    pub n_max: Option<usize>,
    pub tau_values: Option<Vec<f64>>,
    pub e1_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentBlock {
    #[serde(default = "default_p")]
    pub p: usize,
    pub g: f64,
}

fn default_p() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpurityBlock {
    pub kind: String,
    #[serde(default = "default_sites")]
    pub sites: Vec<usize>,
    pub kappa: Option<f64>,
    pub kappa_values: Option<Vec<f64>>,
}

fn default_sites() -> Vec<usize> {
    vec![4, 13]
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    pub jx: Option<f64>,
    pub jz_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
    pub evolve_csv: Option<String>,
    pub surface_csv: Option<String>,
    pub summary_json: Option<String>,
    pub impurity_csv: Option<String>,
    pub compare_csv: Option<String>,
    pub compare_json: Option<String>,
    pub report_txt: Option<String>,
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.model.kind.as_str() {
            "multiferroic" => {
                if self.model.jx.is_some() || self.model.jz.is_some() {
                    return Err(ConfigError(
                        "[model]: jx/jz belong to kind = \"xxz\"".into(),
                    ));
                }
            }
            "xxz" => {
                if self.model.j1.is_some() || self.model.j2.is_some() || self.model.e0.is_some() {
                    return Err(ConfigError(
                        "[model]: j1/j2/e0 belong to kind = \"multiferroic\"".into(),
                    ));
                }
                if self.kick.as_ref().is_some_and(|k| k.tau.is_some() || k.e1.is_some()) {
                    return Err(ConfigError(
                        "[kick]: the xxz model has no field coupling to kick".into(),
                    ));
                }
            }
            other => {
                return Err(ConfigError(format!(
                    "[model].kind must be \"multiferroic\" or \"xxz\", got \"{other}\""
                )))
            }
        }
        if self.protocol.n < 4 || self.protocol.n % 2 != 0 {
            return Err(ConfigError(format!(
                "[protocol].n must be even and >= 4, got {}",
                self.protocol.n
            )));
        }
        if !(self.protocol.t_max > 0.0) {
            return Err(ConfigError(format!(
                "[protocol].t_max must be positive, got {}",
                self.protocol.t_max
            )));
        }
        if !(self.protocol.dt > 0.0) {
            return Err(ConfigError(format!(
                "[protocol].dt must be positive, got {}",
                self.protocol.dt
            )));
        }
        if let Some(kick) = &self.kick {
            if kick.tau.is_some() != kick.e1.is_some() {
                return Err(ConfigError(
                    "[kick]: tau and e1 must be given together".into(),
                ));
            }
            if let Some(tau) = kick.tau {
                if !(tau > 0.0) {
                    return Err(ConfigError(format!("[kick].tau must be positive, got {tau}")));
                }
            }
            for (name, values) in [("tau_values", &kick.tau_values), ("e1_values", &kick.e1_values)]
            {
                if let Some(vs) = values {
                    if vs.is_empty() {
                        return Err(ConfigError(format!("[kick].{name} must not be empty")));
                    }
                    if vs.iter().any(|&v| !(v > 0.0)) {
                        return Err(ConfigError(format!("[kick].{name} must be positive")));
                    }
                }
            }
            if let Some(e1s) = &kick.e1_values {
                if e1s.iter().any(|&v| v > 5.0) {
                    return Err(ConfigError(
                        "[kick].e1_values must lie in (0, 5]".into(),
                    ));
                }
            }
        }
        if let Some(env) = &self.environment {
            if env.p < 1 {
                return Err(ConfigError(format!(
                    "[environment].p must be >= 1, got {}",
                    env.p
                )));
            }
            if !env.g.is_finite() {
                return Err(ConfigError("[environment].g must be finite".into()));
            }
        }
        if let Some(imp) = &self.impurity {
            if !matches!(imp.kind.as_str(), "type_i" | "type_ii") {
                return Err(ConfigError(format!(
                    "[impurity].kind must be \"type_i\" or \"type_ii\", got \"{}\"",
                    imp.kind
                )));
            }
            if imp.sites.is_empty() {
                return Err(ConfigError("[impurity].sites must not be empty".into()));
            }
            for &s in &imp.sites {
                if s < 2 || s + 2 > self.protocol.n {
                    return Err(ConfigError(format!(
                        "[impurity].sites: site {s} needs 2 <= site <= n-2 for n = {}",
                        self.protocol.n
                    )));
                }
            }
            let kappas = imp.kappa.iter().copied().chain(
                imp.kappa_values.iter().flatten().copied(),
            );
            for k in kappas {
                if !(k >= 1.0) || !k.is_finite() {
                    return Err(ConfigError(format!(
                        "[impurity]: strengths must be >= 1, got {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The multiferroic chain spec (with impurities applied), or an error
    /// for the xxz model.
    pub fn chain_spec(&self) -> Result<ChainSpec, ConfigError> {
        if self.model.kind != "multiferroic" {
            return Err(ConfigError(
                "this command needs [model].kind = \"multiferroic\"".into(),
            ));
        }
        let mut spec = ChainSpec::new(self.protocol.n).with_couplings(
            self.model.j1.unwrap_or(1.0),
            self.model.j2.unwrap_or(-1.0),
            self.model.e0.unwrap_or(0.01),
        );
        if let Some(imp) = &self.impurity {
            let kappa = match (imp.kappa, &imp.kappa_values) {
                (Some(k), _) => k,
                (None, Some(_)) => {
                    return Err(ConfigError(
                        "[impurity].kappa_values only drives the `impurity` command; \
                         single-run commands need [impurity].kappa"
                            .into(),
                    ))
                }
                (None, None) => {
                    return Err(ConfigError("[impurity] needs kappa or kappa_values".into()))
                }
            };
            for &site in &imp.sites {
                spec = spec
                    .with_impurity(&ImpuritySpec {
                        site,
                        kind: self.impurity_kind()?,
                        strength: kappa,
                    })
                    .map_err(|e| ConfigError(format!("[impurity]: {e}")))?;
            }
        }
        Ok(spec)
    }

    pub fn impurity_kind(&self) -> Result<ImpurityKind, ConfigError> {
        match self.impurity.as_ref().map(|i| i.kind.as_str()) {
            Some("type_i") => Ok(ImpurityKind::TypeI),
            Some("type_ii") => Ok(ImpurityKind::TypeII),
            _ => Err(ConfigError("[impurity].kind missing".into())),
        }
    }

    pub fn model(&self) -> Result<Model, ConfigError> {
        match self.model.kind.as_str() {
            "multiferroic" => Ok(Model::Multiferroic(self.chain_spec()?)),
            "xxz" => Ok(Model::Xxz(XxzSpec {
                n_sites: self.protocol.n,
                jx: self.model.jx.unwrap_or(1.0),
                jz: self.model.jz.unwrap_or(0.0),
            })),
            _ => unreachable!("validated"),
        }
    }

    pub fn environment(&self) -> Result<Option<EnvironmentSpec>, ConfigError> {
        self.environment
            .as_ref()
            .map(|e| EnvironmentSpec::new(e.p, e.g).map_err(|err| ConfigError(err.to_string())))
            .transpose()
    }

    /// Assemble the sweep grid from the kick block (defaults where absent).
    pub fn sweep_grid(&self) -> Result<SweepGrid, ConfigError> {
        let tau_values = self
            .kick
            .as_ref()
            .and_then(|k| k.tau_values.clone())
            .unwrap_or_else(default_tau_grid);
        let e1_values = self
            .kick
            .as_ref()
            .and_then(|k| k.e1_values.clone())
            .unwrap_or_else(default_e1_grid);
        let grid = SweepGrid {
            model: self.model()?,
            env: self.environment()?,
            t_max: self.protocol.t_max,
            dt_unkicked: self.protocol.dt,
            tau_values,
            e1_values,
        };
        grid.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(grid)
    }
}
