//! Lotka-Volterra state estimation with the polynotopic Kalman filter.

use nalgebra::{dvector, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{initial_set, ModelKind, ScenarioConfig};
use super::models::{lotka_field, lotka_field_set, LotkaParams};
use super::{blow_up, check_finite, uniform, McReport, CONTAINMENT_TOL};
use crate::error::{Error, Result};
use crate::mixedenc::{encode_unit, EncodingSpec};
use crate::pkf::{pkf_step, PkfConfig, PkfModel};
use crate::polynotope::{IntervalVec, Polynotope, Weighting};

/// Prediction `x + f(x, u) h + E v̄` with the product `x1 x2` reduced, and
/// innovation `x1 + F w̄ - y`, where `v = [v̄; w̄]`.
#[derive(Debug, Clone)]
pub struct LotkaFilter {
    pub h: f64,
    pub params: LotkaParams,
    pub e: f64,
    pub f: f64,
    pub product_order: usize,
}

impl PkfModel for LotkaFilter {
    fn predict(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope) -> Result<Polynotope> {
        let f = lotka_field_set(&self.params, x, u, Some(self.product_order))?;
        let process = v.select_rows(&[0, 1]).scale(self.e);
        x.add(&f.scale(self.h))?.add(&process)
    }

    fn innovate(&self, x: &Polynotope, _u: &Polynotope, v: &Polynotope, y: &Polynotope) -> Result<Polynotope> {
        x.row(0).add(&v.row(2).scale(self.f))?.sub(y)
    }
}

/// A simulated state trajectory with its measurements.
#[derive(Debug, Clone)]
pub struct Measurements {
    /// States `x_0 ..= x_N`.
    pub states: Vec<DVector<f64>>,
    /// Measurements `y_0 .. y_{N-1}` of the first state.
    pub y: Vec<f64>,
}

/// Filter output: the estimated sets `x_0 ..= x_N` and the gains.
#[derive(Debug, Clone)]
pub struct FilterRun {
    pub states: Vec<Polynotope>,
    pub gains: Vec<DMatrix<f64>>,
}

/// A validated `lotka_filter` scenario.
#[derive(Debug, Clone)]
pub struct FilterScenario {
    pub config: ScenarioConfig,
    pub model: LotkaFilter,
    pub x_true: DVector<f64>,
    u_on: f64,
    u_window: (usize, usize),
}

impl FilterScenario {
    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        if config.model != ModelKind::LotkaFilter {
            return Err(Error::Config(format!("{:?} is not a filtering model", config.model)));
        }
        let window = |name: &str| {
            let v = config.param(name);
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("{name} must be a step index, got {v}")))
            }
        };
        let u_window = (window("u_start")?, window("u_stop")?);
        let model = LotkaFilter {
            h: config.h,
            params: LotkaParams {
                a: config.param("a"),
                b: config.param("b"),
                c: config.param("c"),
                d: config.param("d"),
            },
            e: config.param("e"),
            f: config.param("f"),
            product_order: config.order,
        };
        if !(model.f > 0.0) || model.e < 0.0 {
            return Err(Error::Config("noise gains must satisfy e >= 0 and f > 0".into()));
        }
        Ok(FilterScenario {
            x_true: dvector![config.param("x1_true"), config.param("x2_true")],
            u_on: config.param("u_on"),
            u_window,
            model,
            config,
        })
    }

    /// Input `u_k`: `u_on` inside the window `[u_start, u_stop)`, zero outside.
    pub fn input(&self, k: usize) -> f64 {
        if (self.u_window.0..self.u_window.1).contains(&k) {
            self.u_on
        } else {
            0.0
        }
    }

    /// `v = [Z_s^0; Z_s^0; Z_s^g]` on fresh symbols, `g` being the
    /// encoding level of the initial states.
    pub fn noise(&self) -> Polynotope {
        let g = self.config.level();
        Polynotope::stack(&[
            encode_unit(EncodingSpec::signed(0)),
            encode_unit(EncodingSpec::signed(0)),
            encode_unit(EncodingSpec::signed(g)),
        ])
    }

    /// Noise-free system integrated with Heun's method, measured with
    /// uniform noise `F w̄`, `w̄ ∈ [-1, 1]`.
    pub fn heun_truth(&self, seed: u64) -> Measurements {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, h) = (&self.model.params, self.model.h);
        let mut x = self.x_true.clone();
        let mut states = vec![x.clone()];
        let mut y = Vec::new();
        for k in 0..self.config.steps {
            y.push(x[0] + self.model.f * uniform(&mut rng, -1.0, 1.0));
            let u = self.input(k);
            let k1 = lotka_field(p, &x, u);
            let k2 = lotka_field(p, &(&x + &k1 * h), u);
            x = &x + (k1 + k2) * (h / 2.0);
            states.push(x.clone());
        }
        Measurements { states, y }
    }

    /// Trajectory of the filter's own model, `x+ = x + f(x, u) h + E v̄`,
    /// with `v̄` uniform in `[-1, 1]²` and measurement noise drawn in
    /// `[-F/2, F/2]`, so that nearby trajectories stay consistent with `y`.
    pub fn euler_reference(&self, seed: u64) -> Measurements {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = self.x_true.clone();
        let mut states = vec![x.clone()];
        let mut y = Vec::new();
        for k in 0..self.config.steps {
            y.push(x[0] + self.model.f * uniform(&mut rng, -0.5, 0.5));
            let v = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
            x = self.euler_step(&x, k, v);
            states.push(x.clone());
        }
        Measurements { states, y }
    }

    fn euler_step(&self, x: &DVector<f64>, k: usize, v: [f64; 2]) -> DVector<f64> {
        let m = &self.model;
        x + lotka_field(&m.params, x, self.input(k)) * m.h + dvector![v[0], v[1]] * m.e
    }

    /// Runs the filter on the measurements `y`, producing `y.len() + 1` sets.
    pub fn run(&self, y: &[f64]) -> Result<FilterRun> {
        let (x0, _) = initial_set(&self.config.initial)?;
        let cfg = PkfConfig {
            weighting: Weighting::Identity,
            order: self.config.order,
            lambda: None,
        };
        let mut states = Vec::with_capacity(y.len() + 1);
        let mut gains = Vec::with_capacity(y.len());
        states.push(x0);
        for (k, &yk) in y.iter().enumerate() {
            let step = pkf_step(
                &states[k],
                &Polynotope::scalar(self.input(k)),
                &self.noise(),
                &Polynotope::scalar(yk),
                &self.model,
                &cfg,
            )
            .map_err(|e| blow_up(e, k + 1))?;
            check_finite(&step.state, k + 1)?;
            states.push(step.state);
            gains.push(step.gain);
        }
        Ok(FilterRun { states, gains })
    }

    /// Containment of one given trajectory.
    pub fn check_trajectory(&self, run: &FilterRun, states: &[DVector<f64>]) -> McReport {
        let hulls: Vec<IntervalVec> = run.states.iter().map(Polynotope::box_hull).collect();
        let mut report = McReport {
            samples: 1,
            ..McReport::default()
        };
        for (k, (x, hull)) in states.iter().zip(&hulls).enumerate() {
            report.record(0, k, x.as_slice(), hull, CONTAINMENT_TOL);
        }
        report
    }

    /// Samples trajectories of the filter model that are consistent with
    /// the measurements of `reference` and checks that each stays in the
    /// box hulls of `run`.
    ///
    /// Candidates start near the reference initial state (inside the initial
    /// box) with process noise uniform in its bounds; a candidate is kept when
    /// every measurement residual `|y_k - x1_k|` is within `F`. Sampling stops
    /// after `samples` accepted trajectories or `200 · samples` attempts, and
    /// the report counts accepted trajectories only.
    pub fn mc_check(&self, run: &FilterRun, reference: &Measurements, samples: usize, seed: u64) -> McReport {
        const RADII: [f64; 5] = [2.0, 1.0, 0.5, 0.25, 0.1];
        let hulls: Vec<IntervalVec> = run.states.iter().map(Polynotope::box_hull).collect();
        let (lo, hi): (Vec<f64>, Vec<f64>) = self.config.initial.iter().map(|s| s.bounds()).unzip();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = McReport::default();
        let x_ref = &reference.states[0];
        let mut traj = Vec::with_capacity(reference.y.len() + 1);
        for attempt in 0..samples.saturating_mul(200) {
            if report.samples == samples {
                break;
            }
            let r = RADII[attempt % RADII.len()];
            let mut x = DVector::from_fn(2, |i, _| {
                uniform(&mut rng, (x_ref[i] - r).max(lo[i]), (x_ref[i] + r).min(hi[i]))
            });
            traj.clear();
            let mut consistent = true;
            for (k, &yk) in reference.y.iter().enumerate() {
                if (yk - x[0]).abs() > self.model.f {
                    consistent = false;
                    break;
                }
                traj.push(x.clone());
                let v = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
                x = self.euler_step(&x, k, v);
            }
            if !consistent {
                continue;
            }
            traj.push(x.clone());
            let sample = report.samples;
            for (k, (xk, hull)) in traj.iter().zip(&hulls).enumerate() {
                report.record(sample, k, xk.as_slice(), hull, CONTAINMENT_TOL);
            }
            report.samples += 1;
        }
        report
    }
}
