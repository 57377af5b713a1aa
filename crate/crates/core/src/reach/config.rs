use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::models::{LotkaParams, LotkaVolterra, Traffic, TrafficParams, VanDerPol};
use super::{mc_check, run, CellQuery, Dynamics, McReport};
use crate::error::{Error, Result};
use crate::mixedenc::{encode, Encoding, EncodingSpec};
use crate::polynotope::Polynotope;
use crate::symbols::Flavor;

/// Bundled models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    VanDerPol,
    Traffic,
    LotkaVolterra,
    LotkaFilter,
}

impl ModelKind {
    pub fn dim(self) -> usize {
        match self {
            ModelKind::Traffic => 3,
            _ => 2,
        }
    }

    /// Recognized parameter names with their defaults.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            ModelKind::VanDerPol => &[("mu", 1.0)],
            ModelKind::Traffic => &[
                ("T", 30.0),
                ("c", 40.0),
                ("v", 0.5),
                ("x_bar", 320.0),
                ("w", 1.0 / 6.0),
                ("p_lo", 4.0 / 3.0),
                ("p_hi", 2.0),
            ],
            ModelKind::LotkaVolterra => &[("a", 2.0), ("b", 0.4), ("c", 1.0), ("d", 0.1), ("u", 0.0)],
            ModelKind::LotkaFilter => &[
                ("a", 2.0),
                ("b", 0.4),
                ("c", 1.0),
                ("d", 0.1),
                ("e", 3e-3),
                ("f", 1.5),
                ("u_on", 2.0),
                ("u_start", 250.0),
                ("u_stop", 500.0),
                ("x1_true", 22.0),
                ("x2_true", 8.0),
            ],
        }
    }
}

/// Mixed encoding of `center ± radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeSpec {
    pub center: f64,
    pub radius: f64,
    pub level: u32,
    pub flavor: Flavor,
}

/// Initial set of one state component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `[lo, hi]` on one fresh interval symbol.
    Interval([f64; 2]),
    Encode(EncodeSpec),
}

impl InitialSpec {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            InitialSpec::Interval([lo, hi]) => (lo, hi),
            InitialSpec::Encode(e) => (e.center - e.radius, e.center + e.radius),
        }
    }

    pub fn level(&self) -> u32 {
        match self {
            InitialSpec::Interval(_) => 0,
            InitialSpec::Encode(e) => e.level,
        }
    }
}

fn default_mc_samples() -> usize {
    1000
}

/// JSON scenario description. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub dim: usize,
    pub h: f64,
    pub steps: usize,
    pub order: usize,
    pub initial: Vec<InitialSpec>,
    pub model: ModelKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.h > 0.0) || !self.h.is_finite() {
            return fail(format!("step size h must be positive, got {}", self.h));
        }
        if self.dim != self.model.dim() {
            return fail(format!("model {:?} has dimension {}, config says {}", self.model, self.model.dim(), self.dim));
        }
        if self.initial.len() != self.dim {
            return fail(format!("{} initial specs for dimension {}", self.initial.len(), self.dim));
        }
        if self.order < self.dim {
            return fail(format!("order {} is below the state dimension {}", self.order, self.dim));
        }
        for spec in &self.initial {
            let (lo, hi) = spec.bounds();
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return fail(format!("invalid initial interval [{lo}, {hi}]"));
            }
            if spec.level() > 30 {
                return fail(format!("encoding level {} is too large", spec.level()));
            }
        }
        let known = self.model.defaults();
        if let Some(key) = self.params.keys().find(|k| !known.iter().any(|(n, _)| n == k)) {
            return fail(format!("unknown parameter {key:?} for model {:?}", self.model));
        }
        if let Some((key, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return fail(format!("parameter {key:?} is not finite: {v}"));
        }
        Ok(())
    }

    /// Parameter value, falling back to the model default.
    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or_else(|| {
            self.model
                .defaults()
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, v)| *v)
                .unwrap_or_else(|| panic!("model {:?} has no parameter {name}", self.model))
        })
    }

    /// Sets the level of every encoded initial component.
    pub fn set_level(&mut self, level: u32) {
        for spec in &mut self.initial {
            if let InitialSpec::Encode(e) = spec {
                e.level = level;
            }
        }
    }

    /// Largest encoding level among the initial components.
    pub fn level(&self) -> u32 {
        self.initial.iter().map(InitialSpec::level).max().unwrap_or(0)
    }
}

/// Builds the initial polynotope on fresh symbols, one encoding per state.
pub fn initial_set(specs: &[InitialSpec]) -> Result<(Polynotope, Vec<Encoding>)> {
    let parts = specs
        .iter()
        .map(|s| match *s {
            InitialSpec::Interval([lo, hi]) => encode(EncodingSpec::signed(0), lo, hi),
            InitialSpec::Encode(e) => encode(
                EncodingSpec::new(e.level, e.flavor),
                e.center - e.radius,
                e.center + e.radius,
            ),
        })
        .collect::<Result<Vec<_>>>()?;
    let polys: Vec<Polynotope> = parts.iter().map(|e| e.poly.clone()).collect();
    Ok((Polynotope::stack(&polys), parts))
}

/// A validated reachability scenario.
pub struct Scenario {
    pub config: ScenarioConfig,
    dynamics: Box<dyn Dynamics>,
}

/// Result of [`Scenario::run`]: the states and the initial encodings.
pub struct ReachRun {
    pub states: Vec<Polynotope>,
    pub encodings: Vec<Encoding>,
}

impl Scenario {
    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let h = config.h;
        let dynamics: Box<dyn Dynamics> = match config.model {
            ModelKind::VanDerPol => Box::new(VanDerPol {
                h,
                mu: config.param("mu"),
            }),
            ModelKind::Traffic => {
                let (lo, hi) = (config.param("p_lo"), config.param("p_hi"));
                if !(lo <= hi) {
                    return Err(Error::Config(format!("invalid inflow bounds [{lo}, {hi}]")));
                }
                let params = TrafficParams {
                    t: config.param("T"),
                    c: config.param("c"),
                    v: config.param("v"),
                    x_bar: config.param("x_bar"),
                    w: config.param("w"),
                    inflow: (lo, hi),
                };
                Box::new(Traffic::new(h, params)?)
            }
            ModelKind::LotkaVolterra => Box::new(LotkaVolterra {
                h,
                params: LotkaParams {
                    a: config.param("a"),
                    b: config.param("b"),
                    c: config.param("c"),
                    d: config.param("d"),
                },
                input: config.param("u"),
            }),
            ModelKind::LotkaFilter => {
                return Err(Error::Config("lotka_filter is a filtering scenario, not a reach one".into()))
            }
        };
        Ok(Scenario { config, dynamics })
    }

    pub fn dynamics(&self) -> &dyn Dynamics {
        self.dynamics.as_ref()
    }

    /// Encodes the initial set on fresh symbols and iterates the dynamics.
    pub fn run(&self) -> Result<ReachRun> {
        let (x0, encodings) = initial_set(&self.config.initial)?;
        let states = run(self.dynamics(), x0, self.config.steps, self.config.order)?;
        Ok(ReachRun { states, encodings })
    }

    pub fn mc_check(&self, states: &[Polynotope], query: &CellQuery, samples: usize, seed: u64) -> Result<McReport> {
        mc_check(self.dynamics(), states, query, samples, seed)
    }
}

impl ReachRun {
    /// Query fixing the leading discrete symbols of each state's encoding;
    /// `signs[i]` applies to state `i`.
    pub fn cell(&self, signs: &[&[bool]]) -> Result<CellQuery> {
        let mut q = CellQuery::default();
        for (enc, s) in self.encodings.iter().zip(signs) {
            q = q.and(CellQuery::from_signs(&enc.discrete, s)?);
        }
        Ok(q)
    }
}
