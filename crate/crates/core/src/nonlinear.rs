//! Enclosures of non-polynomial scalar functions.
//!
//! On a box `[lo, hi] = mid ± rad` the input is rewritten as `x = mid + rad δ`
//! with `δ ∈ [-1, 1]`, and `f(x)` is enclosed by `g0 + g1 δ + g2 ε` where `ε`
//! is a fresh interval symbol. Because `δ` is affine in the input polynotope,
//! the output keeps every dependency of the input and only adds one new
//! symbol per component.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::polynotope::{Monomial, Polynotope};
use crate::symbols::{self, SymbolType};

const BISECTION_TOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

/// Affine bijection between `[lo, hi]` and `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMap {
    pub mid: f64,
    pub rad: f64,
}

impl UnitMap {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(UnitMap {
            mid: (hi + lo) / 2.0,
            rad: (hi - lo) / 2.0,
        })
    }

    pub fn is_punctual(&self) -> bool {
        self.rad == 0.0
    }

    /// `δ = (x - mid) / rad`, or `0` for a punctual box.
    pub fn to_unit(&self, x: f64) -> f64 {
        if self.rad > 0.0 {
            (x - self.mid) / self.rad
        } else {
            0.0
        }
    }

    pub fn from_unit(&self, delta: f64) -> f64 {
        self.mid + self.rad * delta
    }

    pub fn lo(&self) -> f64 {
        self.mid - self.rad
    }

    pub fn hi(&self) -> f64 {
        self.mid + self.rad
    }
}

/// `g0 + g1 δ + g2 ε` with `g2 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
}

impl Enclosure {
    /// Hull of the enclosure for a fixed `δ`, with `ε` free.
    pub fn slice(&self, delta: f64) -> (f64, f64) {
        let c = self.g0 + self.g1 * delta;
        (c - self.g2, c + self.g2)
    }
}

/// A user-supplied C¹ function, convex or concave on the queried boxes.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub convex: bool,
}

impl CustomFn {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        convex: bool,
    ) -> Self {
        CustomFn {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            convex,
        }
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("name", &self.name)
            .field("convex", &self.convex)
            .finish()
    }
}

/// Convex or concave C¹ functions with a known enclosure.
#[derive(Debug, Clone)]
pub enum ConvexFn {
    Exp,
    Log,
    Sqrt,
    Custom(CustomFn),
}

impl ConvexFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ConvexFn::Exp => x.exp(),
            ConvexFn::Log => x.ln(),
            ConvexFn::Sqrt => x.sqrt(),
            ConvexFn::Custom(c) => (c.f)(x),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ConvexFn::Exp => true,
            ConvexFn::Log | ConvexFn::Sqrt => false,
            ConvexFn::Custom(c) => c.convex,
        }
    }

    fn check_domain(&self, lo: f64) -> Result<()> {
        match self {
            ConvexFn::Log if !(lo > 0.0) => Err(Error::FunctionDomain(format!("log needs a positive box, got lower bound {lo}"))),
            ConvexFn::Sqrt if !(lo >= 0.0) => Err(Error::FunctionDomain(format!("sqrt needs a nonnegative box, got lower bound {lo}"))),
            _ => Ok(()),
        }
    }

    /// Point where the slope of `f` equals `slope`, when known in closed form.
    fn tangent_point(&self, slope: f64) -> Option<f64> {
        match self {
            ConvexFn::Exp => Some(slope.ln()),
            ConvexFn::Log => Some(1.0 / slope),
            ConvexFn::Sqrt => Some(0.25 / (slope * slope)),
            ConvexFn::Custom(_) => None,
        }
    }
}

/// Secant-plus-remainder enclosure of a convex or concave C¹ function.
///
/// The secant through both endpoints is `ymid + yrad δ`; the remainder
/// `r(δ) = f(mid + rad δ) - ymid - yrad δ` vanishes at `δ = ±1` and keeps one
/// sign in between, reaching its extreme value `r*` where the slope of `f`
/// matches the secant. The enclosure centers the remainder range
/// `[min(r*, 0), max(r*, 0)]`.
pub fn enclose_c1(f: &ConvexFn, lo: f64, hi: f64) -> Result<Enclosure> {
    let u = UnitMap::new(lo, hi)?;
    f.check_domain(lo)?;
    if u.is_punctual() {
        let y = finite(f.eval(u.mid), "function value")?;
        return Ok(Enclosure { g0: y, g1: 0.0, g2: 0.0 });
    }
    let yl = finite(f.eval(lo), "function value at the lower bound")?;
    let yu = finite(f.eval(hi), "function value at the upper bound")?;
    let ymid = (yu + yl) / 2.0;
    let yrad = (yu - yl) / 2.0;
    let slope = yrad / u.rad;
    let delta = match f.tangent_point(slope) {
        Some(x) if x.is_finite() => u.to_unit(x).clamp(-1.0, 1.0),
        _ => bisect_tangent(f, &u, slope)?,
    };
    let r = finite(f.eval(u.from_unit(delta)), "function value")? - (ymid + yrad * delta);
    Ok(Enclosure {
        g0: ymid + r / 2.0,
        g1: yrad,
        g2: r.abs() / 2.0,
    })
}

/// Solves `f'(mid + rad δ) = slope` on `[-1, 1]`; the derivative is monotone
/// because `f` is convex or concave.
fn bisect_tangent(f: &ConvexFn, u: &UnitMap, slope: f64) -> Result<f64> {
    let df = match f {
        ConvexFn::Custom(c) => c.df.clone(),
        ConvexFn::Exp => Arc::new(f64::exp) as Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        ConvexFn::Log => Arc::new(|x: f64| 1.0 / x),
        ConvexFn::Sqrt => Arc::new(|x: f64| 0.5 / x.sqrt()),
    };
    let sign = if f.is_convex() { 1.0 } else { -1.0 };
    let h = |d: f64| sign * (df(u.from_unit(d)) - slope);
    let (mut a, mut b) = (-1.0f64, 1.0f64);
    if h(a) >= 0.0 {
        return Ok(a);
    }
    if h(b) <= 0.0 {
        return Ok(b);
    }
    for _ in 0..BISECTION_MAX_ITER {
        if b - a <= BISECTION_TOL {
            break;
        }
        let m = 0.5 * (a + b);
        let v = h(m);
        if !v.is_finite() {
            return Err(Error::NonFinite("derivative during bisection".into()));
        }
        if v < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Enclosure of `|x|` on `[lo, hi]`; exact when the box does not straddle 0.
pub fn enclose_abs(lo: f64, hi: f64) -> Result<Enclosure> {
    let u = UnitMap::new(lo, hi)?;
    let (mid, rad) = (u.mid, u.rad);
    if hi <= 0.0 {
        return Ok(Enclosure { g0: -mid, g1: -rad, g2: 0.0 });
    }
    if lo >= 0.0 {
        return Ok(Enclosure { g0: mid, g1: rad, g2: 0.0 });
    }
    let g0 = (rad * rad + mid * mid) / (2.0 * rad);
    Ok(Enclosure { g0, g1: mid, g2: rad - g0 })
}

/// Scalar functions that can be lifted to polynotopes.
#[derive(Debug, Clone)]
pub enum ScalarFn {
    Exp,
    Log,
    Sqrt,
    Abs,
    Custom(CustomFn),
}

impl ScalarFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Abs => x.abs(),
            other => other.as_convex().expect("not abs").eval(x),
        }
    }

    fn as_convex(&self) -> Option<ConvexFn> {
        match self {
            ScalarFn::Exp => Some(ConvexFn::Exp),
            ScalarFn::Log => Some(ConvexFn::Log),
            ScalarFn::Sqrt => Some(ConvexFn::Sqrt),
            ScalarFn::Abs => None,
            ScalarFn::Custom(c) => Some(ConvexFn::Custom(c.clone())),
        }
    }

    pub fn enclose(&self, lo: f64, hi: f64) -> Result<Enclosure> {
        match self.as_convex() {
            Some(f) => enclose_c1(&f, lo, hi),
            None => enclose_abs(lo, hi),
        }
    }
}

/// Component-wise enclosure `g0 + g1 μ(x) + g2 ε` of `f(x)`, with one fresh
/// interval symbol per component whose remainder is nonzero.
pub fn apply_scalar(f: &ScalarFn, x: &Polynotope) -> Result<Polynotope> {
    let hull = x.box_hull();
    let n = x.dim();
    let mut slope = DVector::zeros(n);
    let mut offset = DVector::zeros(n);
    let mut remainder = vec![0.0; n];
    for i in 0..n {
        let (lo, hi) = (hull.lo()[i], hull.hi()[i]);
        let u = UnitMap::new(lo, hi)?;
        let e = f.enclose(lo, hi)?;
        if u.rad > 0.0 {
            slope[i] = e.g1 / u.rad;
            offset[i] = e.g0 - slope[i] * u.mid;
        } else {
            offset[i] = e.g0;
        }
        remainder[i] = e.g2;
    }
    let linear = x.scale_rows(&slope)?.translate(&offset)?;
    let rows: Vec<usize> = (0..n).filter(|&i| remainder[i] > 0.0).collect();
    let eps = symbols::fresh(rows.len(), SymbolType::Interval);
    let terms = rows.iter().zip(eps).map(|(&i, id)| {
        let mut col = DVector::zeros(n);
        col[i] = remainder[i];
        (Monomial::symbol(id), col)
    });
    linear.add(&Polynotope::from_terms(DVector::zeros(n), terms)?)
}

pub fn abs(x: &Polynotope) -> Result<Polynotope> {
    apply_scalar(&ScalarFn::Abs, x)
}

/// `(x + y)/2 + |x - y|/2`.
pub fn max(x: &Polynotope, y: &Polynotope) -> Result<Polynotope> {
    let half_sum = x.add(y)?.scale(0.5);
    half_sum.add(&abs(&x.sub(y)?)?.scale(0.5))
}

/// `(x + y)/2 - |x - y|/2`.
pub fn min(x: &Polynotope, y: &Polynotope) -> Result<Polynotope> {
    let half_sum = x.add(y)?.scale(0.5);
    half_sum.sub(&abs(&x.sub(y)?)?.scale(0.5))
}

/// Minimum of several operands as a balanced tree of pairwise minima.
pub fn min_n(args: &[Polynotope]) -> Result<Polynotope> {
    fold_balanced(args, &min)
}

/// Maximum of several operands as a balanced tree of pairwise maxima.
pub fn max_n(args: &[Polynotope]) -> Result<Polynotope> {
    fold_balanced(args, &max)
}

fn fold_balanced(
    args: &[Polynotope],
    op: &dyn Fn(&Polynotope, &Polynotope) -> Result<Polynotope>,
) -> Result<Polynotope> {
    match args.len() {
        0 => Err(Error::DimensionMismatch {
            op: "fold",
            expected: 1,
            found: 0,
        }),
        1 => Ok(args[0].clone()),
        len => {
            let (l, r) = args.split_at(len.div_ceil(2));
            op(&fold_balanced(l, op)?, &fold_balanced(r, op)?)
        }
    }
}

/// `(lo + hi + |lo - x| - |x - hi|) / 2` with real bounds.
pub fn sat(x: &Polynotope, lo: f64, hi: f64) -> Result<Polynotope> {
    if !(lo <= hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let below = abs(&x.neg().add_scalar(lo))?;
    let above = abs(&x.add_scalar(-hi))?;
    Ok(below.sub(&above)?.add_scalar(lo + hi).scale(0.5))
}

/// `x - sat(x, lo, hi)`.
pub fn deadzone(x: &Polynotope, lo: f64, hi: f64) -> Result<Polynotope> {
    x.sub(&sat(x, lo, hi)?)
}

/// `(x + |x|) / 2`.
pub fn relu(x: &Polynotope) -> Result<Polynotope> {
    Ok(x.add(&abs(x)?)?.scale(0.5))
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}
