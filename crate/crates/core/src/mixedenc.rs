//! Mixed discrete/continuous encodings of intervals.
//!
//! An `n`-level encoding writes an interval as a dyadic sum of `n` discrete
//! symbols plus one interval remainder symbol. Fixing the discrete symbols
//! selects one of `2^n` cells that tile the interval, so a single polynotope
//! carries the whole partition without any bisection.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynotope::{Monomial, Polynotope};
use crate::symbols::{self, Flavor, SymbolId, SymbolType};

/// Level and discrete flavor of an encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub level: u32,
    pub flavor: Flavor,
}

impl EncodingSpec {
    pub fn new(level: u32, flavor: Flavor) -> Self {
        EncodingSpec { level, flavor }
    }

    pub fn signed(level: u32) -> Self {
        Self::new(level, Flavor::Signed)
    }

    pub fn boolean(level: u32) -> Self {
        Self::new(level, Flavor::Boolean)
    }
}

/// `[1/2, 1/4, …, (1/2)^n, (1/2)^n]`, whose entries sum to one.
pub fn rho(n: u32) -> Vec<f64> {
    let mut w: Vec<f64> = (1..=n).map(|j| 0.5f64.powi(j as i32)).collect();
    w.push(0.5f64.powi(n as i32));
    w
}

/// An encoded interval together with the symbols it was built from.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub poly: Polynotope,
    /// Discrete symbols, most significant first.
    pub discrete: Vec<SymbolId>,
    pub remainder: SymbolId,
}

/// Encodes `[lo, hi]` on fresh symbols.
///
/// Signed flavor: `mid + rad (Σ_j 2^-j σ_j + 2^-n ι)`.
/// Boolean flavor: `lo + (hi - lo) (Σ_j 2^-j β_j + 2^-(n+1) (1 + ι))`, whose
/// remainder is shifted onto `[0, 2^-n]` so the unit encoding covers `[0, 1]`.
pub fn encode(spec: EncodingSpec, lo: f64, hi: f64) -> Result<Encoding> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let n = spec.level as usize;
    let discrete = symbols::fresh(n, spec.flavor.symbol_type());
    let remainder = symbols::fresh_one(SymbolType::Interval);
    let w = rho(spec.level);
    let (offset, scale, rem) = match spec.flavor {
        Flavor::Signed => ((lo + hi) / 2.0, (hi - lo) / 2.0, w[n]),
        Flavor::Boolean => (lo + (hi - lo) * w[n] / 2.0, hi - lo, w[n] / 2.0),
    };
    let mut terms: Vec<(Monomial, DVector<f64>)> = discrete
        .iter()
        .zip(&w)
        .map(|(id, wj)| (Monomial::symbol(*id), DVector::from_element(1, scale * wj)))
        .collect();
    terms.push((Monomial::symbol(remainder), DVector::from_element(1, scale * rem)));
    let poly = Polynotope::from_terms(DVector::from_element(1, offset), terms)?;
    Ok(Encoding {
        poly,
        discrete,
        remainder,
    })
}

/// Encoding of the unit domain: `[-1, 1]` (signed) or `[0, 1]` (boolean).
pub fn encode_unit(spec: EncodingSpec) -> Polynotope {
    let (lo, hi) = match spec.flavor {
        Flavor::Signed => (-1.0, 1.0),
        Flavor::Boolean => (0.0, 1.0),
    };
    encode(spec, lo, hi).expect("unit bounds are valid").poly
}

/// Encoding of `c ± r`.
pub fn encode_interval(c: f64, r: f64, spec: EncodingSpec) -> Result<Polynotope> {
    if !(r >= 0.0) {
        return Err(Error::InvalidInterval { lo: c - r, hi: c + r });
    }
    Ok(encode(spec, c - r, c + r)?.poly)
}

/// Encoding of `[a, b]`.
pub fn encode_bounds(a: f64, b: f64, spec: EncodingSpec) -> Result<Polynotope> {
    Ok(encode(spec, a, b)?.poly)
}

/// Encodes each component of a box independently and stacks the results.
pub fn encode_box(lo: &[f64], hi: &[f64], spec: EncodingSpec) -> Result<(Polynotope, Vec<Encoding>)> {
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch {
            op: "encode_box",
            expected: lo.len(),
            found: hi.len(),
        });
    }
    let parts = lo
        .iter()
        .zip(hi)
        .map(|(&l, &h)| encode(spec, l, h))
        .collect::<Result<Vec<_>>>()?;
    let polys: Vec<Polynotope> = parts.iter().map(|e| e.poly.clone()).collect();
    Ok((Polynotope::stack(&polys), parts))
}

/// Generator weights of the unit encoding as a `1 × (n+1)` matrix.
pub fn rho_matrix(n: u32) -> DMatrix<f64> {
    DMatrix::from_row_slice(1, n as usize + 1, &rho(n))
}
