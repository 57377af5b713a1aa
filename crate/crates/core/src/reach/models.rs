use nalgebra::{dvector, DVector};

use super::Dynamics;
use crate::error::{Error, Result};
use crate::mixedenc::{encode_bounds, EncodingSpec};
use crate::nonlinear::{min, min_n};
use crate::polynotope::Polynotope;

/// Euler-sampled Van der Pol oscillator `ẋ1 = x2, ẋ2 = μ(1 - x1²)x2 - x1`.
///
/// The square `x1²` and the product `x1² x2` are reduced inside the step.
#[derive(Debug, Clone)]
pub struct VanDerPol {
    pub h: f64,
    pub mu: f64,
}

impl Dynamics for VanDerPol {
    fn dim(&self) -> usize {
        2
    }

    fn step(&self, x: &Polynotope, _k: usize, order: usize) -> Result<Polynotope> {
        let x1 = x.row(0);
        let x2 = x.row(1);
        let sq = x1.square().reduce(order);
        let cubic = sq.multiply(&x2)?.reduce(order);
        let dx2 = x2.sub(&cubic)?.scale(self.mu).sub(&x1)?;
        let next1 = x1.add(&x2.scale(self.h))?;
        let next2 = x2.add(&dx2.scale(self.h))?;
        Ok(next1.vcat(&next2))
    }

    fn step_point(&self, x: &DVector<f64>, _k: usize, _theta: &[f64]) -> DVector<f64> {
        let (x1, x2) = (x[0], x[1]);
        let dx2 = self.mu * (x2 - x1 * x1 * x2) - x1;
        dvector![x1 + self.h * x2, x2 + self.h * dx2]
    }
}

/// Parameters of the three-link diverge junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficParams {
    pub t: f64,
    pub c: f64,
    pub v: f64,
    pub x_bar: f64,
    pub w: f64,
    pub inflow: (f64, f64),
}

impl Default for TrafficParams {
    fn default() -> Self {
        TrafficParams {
            t: 30.0,
            c: 40.0,
            v: 0.5,
            x_bar: 320.0,
            w: 1.0 / 6.0,
            inflow: (4.0 / 3.0, 2.0),
        }
    }
}

/// Euler-sampled traffic network
/// `ẋ1 = -k/T + p`, `ẋi = k/2 - min(c, v xi)` for `i = 2, 3`, with
/// `k = min(c, v x1, 2w(x̄ - x2), 2w(x̄ - x3))`.
///
/// The inflow `p` is encoded once at construction and shared by all steps.
#[derive(Debug, Clone)]
pub struct Traffic {
    pub h: f64,
    pub params: TrafficParams,
    inflow: Polynotope,
}

impl Traffic {
    pub fn new(h: f64, params: TrafficParams) -> Result<Self> {
        let (lo, hi) = params.inflow;
        let inflow = encode_bounds(lo, hi, EncodingSpec::signed(0))?;
        Ok(Traffic { h, params, inflow })
    }

    /// The persistent inflow polynotope.
    pub fn inflow(&self) -> &Polynotope {
        &self.inflow
    }
}

impl Dynamics for Traffic {
    fn dim(&self) -> usize {
        3
    }

    fn step(&self, x: &Polynotope, _k: usize, _order: usize) -> Result<Polynotope> {
        let p = &self.params;
        let cap = Polynotope::scalar(p.c);
        let rows: Vec<Polynotope> = (0..3).map(|i| x.row(i)).collect();
        let room = |xi: &Polynotope| xi.neg().add_scalar(p.x_bar).scale(2.0 * p.w);
        let k = min_n(&[cap.clone(), rows[0].scale(p.v), room(&rows[1]), room(&rows[2])])?;
        let dx1 = k.scale(-1.0 / p.t).add(&self.inflow)?;
        let mut next = vec![rows[0].add(&dx1.scale(self.h))?];
        for xi in &rows[1..] {
            let out = min(&cap, &xi.scale(p.v))?;
            let dxi = k.scale(0.5).sub(&out)?;
            next.push(xi.add(&dxi.scale(self.h))?);
        }
        Ok(Polynotope::stack(&next))
    }

    fn step_point(&self, x: &DVector<f64>, _k: usize, theta: &[f64]) -> DVector<f64> {
        let p = &self.params;
        let inflow = theta[0];
        let room = |xi: f64| 2.0 * p.w * (p.x_bar - xi);
        let k = p.c.min(p.v * x[0]).min(room(x[1]).min(room(x[2])));
        let mut next = x.clone();
        next[0] += self.h * (-k / p.t + inflow);
        for i in 1..3 {
            next[i] += self.h * (k / 2.0 - p.c.min(p.v * x[i]));
        }
        next
    }

    fn parameter_box(&self) -> Vec<(f64, f64)> {
        vec![self.params.inflow]
    }
}

/// Coefficients of `f(x, u) = [a x1 - b x1 x2; -c x2 + d x1 x2 + u]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LotkaParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for LotkaParams {
    fn default() -> Self {
        LotkaParams {
            a: 2.0,
            b: 0.4,
            c: 1.0,
            d: 0.1,
        }
    }
}

/// Pointwise Lotka-Volterra vector field.
pub fn lotka_field(p: &LotkaParams, x: &DVector<f64>, u: f64) -> DVector<f64> {
    let prod = x[0] * x[1];
    dvector![p.a * x[0] - p.b * prod, -p.c * x[1] + p.d * prod + u]
}

/// Set-valued vector field; `product_order` reduces `x1 x2` when given.
pub(crate) fn lotka_field_set(
    p: &LotkaParams,
    x: &Polynotope,
    u: &Polynotope,
    product_order: Option<usize>,
) -> Result<Polynotope> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            op: "lotka",
            expected: 2,
            found: x.dim(),
        });
    }
    let x1 = x.row(0);
    let x2 = x.row(1);
    let mut prod = x1.multiply(&x2)?;
    if let Some(q) = product_order {
        prod = prod.reduce(q);
    }
    let f1 = x1.scale(p.a).sub(&prod.scale(p.b))?;
    let f2 = x2.scale(-p.c).add(&prod.scale(p.d))?.add(u)?;
    Ok(f1.vcat(&f2))
}

/// Euler-sampled Lotka-Volterra model `x+ = x + f(x, u) h` with constant input.
#[derive(Debug, Clone)]
pub struct LotkaVolterra {
    pub h: f64,
    pub params: LotkaParams,
    pub input: f64,
}

impl Dynamics for LotkaVolterra {
    fn dim(&self) -> usize {
        2
    }

    fn step(&self, x: &Polynotope, _k: usize, _order: usize) -> Result<Polynotope> {
        let f = lotka_field_set(&self.params, x, &Polynotope::scalar(self.input), None)?;
        x.add(&f.scale(self.h))
    }

    fn step_point(&self, x: &DVector<f64>, _k: usize, _theta: &[f64]) -> DVector<f64> {
        x + lotka_field(&self.params, x, self.input) * self.h
    }
}
