//! Polynotopic Kalman filter.
//!
//! One iteration reduces the state, predicts with an inclusion function `f̃`,
//! forms the innovation polynotope with `g̃` (an image set containing zero
//! for the true state), aligns both on a common monomial basis and removes
//! `G e` from the prediction. The gain minimizes the trace of the weighted
//! covariation of the result.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::polynotope::{check_weighting, covariation_of, Polynotope, Weighting};
use crate::symbols::{self, SymbolType};

/// Filter settings.
#[derive(Debug, Clone)]
pub struct PkfConfig {
    pub weighting: Weighting,
    /// Reduction order applied to the state before prediction.
    pub order: usize,
    /// Tikhonov term added to the innovation covariation; `None` uses
    /// `1e-12 · tr(R_e Φ R_eᵀ) / rows`.
    pub lambda: Option<f64>,
}

impl PkfConfig {
    pub fn new(order: usize) -> Self {
        PkfConfig {
            weighting: Weighting::Identity,
            order,
            lambda: None,
        }
    }
}

/// Prediction and innovation maps of a filtering problem.
pub trait PkfModel {
    /// `f̃(x̄, u, v)`.
    fn predict(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope) -> Result<Polynotope>;

    /// `g̃(x̄, u, v, y)`: an inclusion whose image contains `0` at the true
    /// state. An empty (zero-row) result means no measurement.
    fn innovate(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope, y: &Polynotope) -> Result<Polynotope>;
}

/// Outcome of one filter iteration.
#[derive(Debug, Clone)]
pub struct PkfStep {
    pub state: Polynotope,
    pub prediction: Polynotope,
    pub innovation: Polynotope,
    pub gain: DMatrix<f64>,
}

/// One filter iteration.
pub fn pkf_step(
    x: &Polynotope,
    u: &Polynotope,
    v: &Polynotope,
    y: &Polynotope,
    model: &dyn PkfModel,
    cfg: &PkfConfig,
) -> Result<PkfStep> {
    let reduced = x.reduce(cfg.order);
    let p = model.predict(&reduced, u, v)?;
    let e = model.innovate(&reduced, u, v, y)?;
    let (state, gain) = correct(&p, &e, cfg)?;
    Ok(PkfStep {
        state,
        prediction: p,
        innovation: e,
        gain,
    })
}

/// `p - G e` with the optimal gain for the aligned generator blocks.
pub fn correct(p: &Polynotope, e: &Polynotope, cfg: &PkfConfig) -> Result<(Polynotope, DMatrix<f64>)> {
    let n = p.dim();
    if e.dim() == 0 {
        return Ok((p.clone(), DMatrix::zeros(n, 0)));
    }
    let z = p.vcat(e);
    let r = z.generators();
    let rp = r.rows(0, n).into_owned();
    let re = r.rows(n, e.dim()).into_owned();
    let gain = optimal_gain(&rp, &re, &cfg.weighting, cfg.lambda)?;
    let mut t = DMatrix::zeros(n, n + e.dim());
    t.view_mut((0, 0), (n, n)).fill_with_identity();
    t.view_mut((0, n), (n, e.dim())).copy_from(&(-&gain));
    Ok((z.linear_image(&t)?, gain))
}

/// `G = (R_p Φ R_eᵀ)(R_e Φ R_eᵀ + λ I)⁻¹`.
///
/// Solved by Cholesky; a pseudo-inverse is used (with a warning) when the
/// regularized innovation covariation is not positive definite.
pub fn optimal_gain(
    rp: &DMatrix<f64>,
    re: &DMatrix<f64>,
    phi: &Weighting,
    lambda: Option<f64>,
) -> Result<DMatrix<f64>> {
    if rp.ncols() != re.ncols() {
        return Err(Error::DimensionMismatch {
            op: "optimal_gain",
            expected: rp.ncols(),
            found: re.ncols(),
        });
    }
    let (cross, mut s) = match phi {
        Weighting::Identity => (rp * re.transpose(), re * re.transpose()),
        Weighting::Matrix(w) => {
            check_weighting(w, re.ncols())?;
            (rp * w * re.transpose(), re * w * re.transpose())
        }
    };
    let rows = s.nrows();
    let lambda = lambda.unwrap_or_else(|| 1e-12 * s.trace() / rows as f64);
    if lambda < 0.0 {
        return Err(Error::Config(format!("negative gain regularization {lambda}")));
    }
    for i in 0..rows {
        s[(i, i)] += lambda;
    }
    if let Some(chol) = s.clone().cholesky() {
        return Ok(chol.solve(&cross.transpose()).transpose());
    }
    log::warn!("innovation covariation is singular; using a pseudo-inverse for the gain");
    let eps = 1e-14 * s.amax().max(f64::MIN_POSITIVE);
    let pinv = s
        .pseudo_inverse(eps)
        .map_err(|e| Error::NonFinite(e.to_string()))?;
    Ok(cross * pinv)
}

/// `tr((R_p - G R_e) Φ (R_p - G R_e)ᵀ)`, the cost minimized by the gain.
pub fn gain_cost(rp: &DMatrix<f64>, re: &DMatrix<f64>, g: &DMatrix<f64>, phi: &Weighting) -> Result<f64> {
    let r = rp - g * re;
    Ok(covariation_of(&r, phi)?.trace())
}

/// Model built from two closures.
pub struct FnModel<F, G> {
    pub predict: F,
    pub innovate: G,
}

impl<F, G> PkfModel for FnModel<F, G>
where
    F: Fn(&Polynotope, &Polynotope, &Polynotope) -> Result<Polynotope>,
    G: Fn(&Polynotope, &Polynotope, &Polynotope, &Polynotope) -> Result<Polynotope>,
{
    fn predict(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope) -> Result<Polynotope> {
        (self.predict)(x, u, v)
    }

    fn innovate(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope, y: &Polynotope) -> Result<Polynotope> {
        (self.innovate)(x, u, v, y)
    }
}

/// `x+ = A x + B u + E w`, `y = C x + D u + F v` with `w`, `v` in unit boxes.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
}

impl LinearSystem {
    fn check(&self) -> Result<()> {
        let n = self.a.nrows();
        let m = self.c.nrows();
        let checks = [
            ("linear_system.a", self.a.ncols(), n),
            ("linear_system.b", self.b.nrows(), n),
            ("linear_system.c", self.c.ncols(), n),
            ("linear_system.d", self.d.nrows(), m),
            ("linear_system.d", self.d.ncols(), self.b.ncols()),
            ("linear_system.e", self.e.nrows(), n),
            ("linear_system.f", self.f.nrows(), m),
        ];
        for (op, found, expected) in checks {
            if found != expected {
                return Err(Error::DimensionMismatch { op, expected, found });
            }
        }
        Ok(())
    }
}

impl PkfModel for LinearSystem {
    fn predict(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope) -> Result<Polynotope> {
        let w = v.select_rows(&(0..self.e.ncols()).collect::<Vec<_>>());
        x.linear_image(&self.a)?
            .add(&u.linear_image(&self.b)?)?
            .add(&w.linear_image(&self.e)?)
    }

    fn innovate(&self, x: &Polynotope, u: &Polynotope, v: &Polynotope, y: &Polynotope) -> Result<Polynotope> {
        let k = self.e.ncols();
        let meas = v.select_rows(&(k..k + self.f.ncols()).collect::<Vec<_>>());
        x.linear_image(&self.c)?
            .add(&u.linear_image(&self.d)?)?
            .add(&meas.linear_image(&self.f)?)?
            .sub(y)
    }
}

/// Runs the filter on a linear system, the case where it coincides with the
/// zonotopic Kalman filter. Every polynotope on this path stays affine.
///
/// The initial set must be a zonotope over interval symbols. Process and
/// measurement noises get fresh interval symbols at every step.
pub fn zkf_path(
    sys: &LinearSystem,
    x0: &Polynotope,
    inputs: &[DVector<f64>],
    outputs: &[DVector<f64>],
    order: usize,
) -> Result<Vec<PkfStep>> {
    sys.check()?;
    if let Some(id) = x0.ids().iter().find(|id| id.ty() != SymbolType::Interval) {
        return Err(Error::FlavorMismatch {
            id: *id,
            expected: SymbolType::Interval,
            found: id.ty(),
        });
    }
    if !x0.is_affine() {
        return Err(Error::Config("the linear filter path needs a zonotopic initial set".into()));
    }
    if inputs.len() != outputs.len() {
        return Err(Error::DimensionMismatch {
            op: "zkf_path",
            expected: inputs.len(),
            found: outputs.len(),
        });
    }
    let cfg = PkfConfig::new(order);
    let nv = sys.e.ncols() + sys.f.ncols();
    let mut x = x0.clone();
    let mut steps = Vec::with_capacity(inputs.len());
    for (u, y) in inputs.iter().zip(outputs) {
        let noise = symbols::fresh(nv, SymbolType::Interval);
        let v = Polynotope::affine(DVector::zeros(nv), DMatrix::identity(nv, nv), &noise)?;
        let step = pkf_step(
            &x,
            &Polynotope::constant(u.clone()),
            &v,
            &Polynotope::constant(y.clone()),
            sys,
            &cfg,
        )?;
        x = step.state.clone();
        steps.push(step);
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use nalgebra::{dmatrix, dvector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn scalar_lti() -> LinearSystem {
        LinearSystem {
            a: dmatrix![1.0],
            b: dmatrix![0.0],
            c: dmatrix![1.0],
            d: dmatrix![0.0],
            e: DMatrix::zeros(1, 0),
            f: dmatrix![1.0],
        }
    }

    #[test]
    fn scalar_gain_is_one_half() {
        let x0 = Polynotope::from_box(&[-1.0], &[1.0]).unwrap();
        let steps = zkf_path(&scalar_lti(), &x0, &[dvector![0.0]], &[dvector![0.0]], 10).unwrap();
        assert!((steps[0].gain[(0, 0)] - 0.5).abs() < 1e-11);
        assert!(steps[0].state.is_affine());
    }

    #[test]
    fn empty_innovation_returns_prediction() {
        let p = Polynotope::from_box(&[0.0, 1.0], &[1.0, 2.0]).unwrap();
        let (x, g) = correct(&p, &Polynotope::zeros(0), &PkfConfig::new(10)).unwrap();
        assert_eq!(x, p);
        assert_eq!(g.ncols(), 0);
    }

    #[test]
    fn deterministic_system_follows_observer_recursion() {
        let sys = LinearSystem {
            a: dmatrix![0.9, 0.1; 0.0, 0.8],
            b: dmatrix![1.0; 0.5],
            c: dmatrix![1.0, 0.0],
            d: dmatrix![0.0],
            e: DMatrix::zeros(2, 0),
            f: DMatrix::zeros(1, 0),
        };
        let x0 = Polynotope::constant(dvector![1.0, -1.0]);
        let us = vec![dvector![0.3]; 4];
        let ys = vec![dvector![0.7]; 4];
        let steps = zkf_path(&sys, &x0, &us, &ys, 10).unwrap();
        let mut c = dvector![1.0, -1.0];
        for (s, (u, _y)) in steps.iter().zip(us.iter().zip(&ys)) {
            assert!(s.gain.iter().all(|g| *g == 0.0));
            c = &sys.a * &c + &sys.b * u;
            assert!((s.state.center() - &c).amax() < 1e-14);
        }
    }

    #[test]
    fn gain_minimizes_the_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rp = DMatrix::from_fn(5, 8, |_, _| rng.random_range(-1.0..1.0));
        let re = DMatrix::from_fn(3, 8, |_, _| rng.random_range(-1.0..1.0));
        let g = optimal_gain(&rp, &re, &Weighting::Identity, Some(0.0)).unwrap();
        let best = gain_cost(&rp, &re, &g, &Weighting::Identity).unwrap();
        for _ in 0..100 {
            let dg = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-0.1..0.1));
            let c = gain_cost(&rp, &re, &(&g + dg), &Weighting::Identity).unwrap();
            assert!(c - best >= -1e-12);
        }
    }

    #[test]
    fn singular_innovation_falls_back() {
        let rp = dmatrix![1.0, 2.0];
        let re = dmatrix![1.0, 0.0; 1.0, 0.0];
        let g = optimal_gain(&rp, &re, &Weighting::Identity, Some(0.0)).unwrap();
        let expected = dmatrix![0.5, 0.5];
        assert!((g - expected).amax() < 1e-12);
    }

    #[test]
    fn weighting_size_is_checked() {
        let rp = dmatrix![1.0, 2.0];
        let re = dmatrix![1.0, 0.0];
        let w = Weighting::Matrix(DMatrix::identity(3, 3));
        assert!(matches!(optimal_gain(&rp, &re, &w, None), Err(Error::InvalidWeighting(_))));
    }

    #[test]
    fn non_interval_initial_set_is_rejected() {
        let s = symbols::fresh_one(SymbolType::Signed);
        let x0 = Polynotope::symbol(s);
        assert!(zkf_path(&scalar_lti(), &x0, &[dvector![0.0]], &[dvector![0.0]], 10).is_err());
    }
}
