use nalgebra::DMatrix;

use super::{Builder, Monomial, Polynotope};
use crate::error::{Error, Result};
use crate::symbols::{self, SymbolProvider, SymbolType};

/// Range of a canonical monomial over the symbol domains.
pub fn monomial_range(m: &Monomial) -> (f64, f64) {
    m.range()
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalVec {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl IntervalVec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                op: "interval",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if let Some((l, h)) = lo.iter().zip(&hi).find(|(l, h)| !(l <= h)) {
            return Err(Error::InvalidInterval { lo: *l, hi: *h });
        }
        Ok(IntervalVec { lo, hi })
    }

    pub fn point(x: &[f64]) -> Self {
        IntervalVec {
            lo: x.to_vec(),
            hi: x.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn mid(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (l + h) / 2.0).collect()
    }

    pub fn rad(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l) / 2.0).collect()
    }

    pub fn width(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    /// Membership of `x` with absolute slack `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.len()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    /// Whether `other ⊆ self` up to `tol`.
    pub fn contains_box(&self, other: &IntervalVec, tol: f64) -> bool {
        other.len() == self.len()
            && (0..self.len())
                .all(|i| other.lo[i] >= self.lo[i] - tol && other.hi[i] <= self.hi[i] + tol)
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &IntervalVec) -> IntervalVec {
        IntervalVec {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }
}

/// Weighting matrix `Φ` of the covariation `R Φ Rᵀ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Weighting {
    #[default]
    Identity,
    Matrix(DMatrix<f64>),
}

impl Polynotope {
    /// Interval enclosure of the image set.
    pub fn box_hull(&self) -> IntervalVec {
        let n = self.dim();
        let mut lo: Vec<f64> = self.center.iter().copied().collect();
        let mut hi = lo.clone();
        for (j, m) in self.monomials.iter().enumerate() {
            let (a, b) = m.range();
            for i in 0..n {
                let g = self.generators[(i, j)];
                let (x, y) = (g * a, g * b);
                lo[i] += x.min(y);
                hi[i] += x.max(y);
            }
        }
        IntervalVec { lo, hi }
    }

    /// Mixed-zonotope enclosure using the global replacement tables.
    pub fn zono_hull(&self) -> Polynotope {
        self.zono_hull_with(symbols::global())
    }

    /// Mixed-zonotope enclosure: boolean symbols become `1/2 + σ/2` and every
    /// non-affine monomial `m` becomes `mid(m) + rad(m) ι_m`, where `σ` and
    /// `ι_m` come from the provider's replacement tables.
    pub fn zono_hull_with(&self, provider: &SymbolProvider) -> Polynotope {
        let mut b = Builder::new(self.center.clone());
        for (j, m) in self.monomials.iter().enumerate() {
            let g = self.generators.column(j);
            if m.is_affine() {
                let id = m.factors()[0].0;
                if id.ty() == SymbolType::Boolean {
                    let s = provider.signed_for_boolean(id);
                    b.add_column(Monomial::one(), 0, g.iter().copied(), 0.5);
                    b.add_column(Monomial::symbol(s), 0, g.iter().copied(), 0.5);
                } else {
                    b.add_column(m.clone(), 0, g.iter().copied(), 1.0);
                }
            } else {
                let (lo, hi) = m.range();
                let (mid, rad) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
                b.add_column(Monomial::one(), 0, g.iter().copied(), mid);
                if rad != 0.0 {
                    let iota = provider.interval_for_monomial(m);
                    b.add_column(Monomial::symbol(iota), 0, g.iter().copied(), rad);
                }
            }
        }
        b.finish()
    }

    /// Weighted covariation `R Φ Rᵀ`.
    pub fn covariation(&self, phi: &Weighting) -> Result<DMatrix<f64>> {
        covariation_of(&self.generators, phi)
    }
}

/// `R Φ Rᵀ` for a raw generator matrix.
pub(crate) fn covariation_of(r: &DMatrix<f64>, phi: &Weighting) -> Result<DMatrix<f64>> {
    match phi {
        Weighting::Identity => Ok(r * r.transpose()),
        Weighting::Matrix(w) => {
            check_weighting(w, r.ncols())?;
            Ok(r * w * r.transpose())
        }
    }
}

pub(crate) fn check_weighting(w: &DMatrix<f64>, m: usize) -> Result<()> {
    if w.nrows() != m || w.ncols() != m {
        return Err(Error::InvalidWeighting(format!(
            "expected {m}x{m}, found {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    let scale = w.amax().max(1.0);
    if (w - w.transpose()).amax() > 1e-12 * scale {
        return Err(Error::InvalidWeighting("matrix is not symmetric".into()));
    }
    Ok(())
}
