use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::symbols::{SymbolId, SymbolType};

/// Exponent reduction implied by the symbol domain: `s^n = s^(n mod 2)` for
/// signed symbols and `b^n = b` (n ≥ 1) for boolean ones.
pub fn reduced_power(ty: SymbolType, exp: u32) -> u32 {
    match ty {
        SymbolType::Signed => exp % 2,
        SymbolType::Boolean => exp.min(1),
        SymbolType::Interval | SymbolType::Unspecified => exp,
    }
}

/// A monomial `Π s_i^{e_i}`, stored as `(symbol, exponent)` factors sorted by
/// symbol with every exponent positive and already reduced for the symbol's
/// type. The empty monomial is the constant `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[(SymbolId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    /// `s^1`.
    pub fn symbol(id: SymbolId) -> Self {
        Monomial(smallvec::smallvec![(id, 1)])
    }

    /// Builds a monomial from arbitrary factors: merges repeated symbols,
    /// applies the typed power rules and drops zero exponents.
    pub fn from_factors<I: IntoIterator<Item = (SymbolId, u32)>>(factors: I) -> Self {
        let mut raw: SmallVec<[(SymbolId, u32); 4]> = factors.into_iter().collect();
        raw.sort_unstable_by_key(|f| f.0);
        let mut out: SmallVec<[(SymbolId, u32); 4]> = SmallVec::with_capacity(raw.len());
        for (id, exp) in raw {
            match out.last_mut() {
                Some(last) if last.0 == id => last.1 += exp,
                _ => out.push((id, exp)),
            }
        }
        out.retain(|f| {
            f.1 = reduced_power(f.0.ty(), f.1);
            f.1 > 0
        });
        Monomial(out)
    }

    pub fn factors(&self) -> &[(SymbolId, u32)] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// A single symbol to the first power.
    pub fn is_affine(&self) -> bool {
        self.0.len() == 1 && self.0[0].1 == 1
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|f| f.1).sum()
    }

    pub fn exponent_of(&self, id: SymbolId) -> u32 {
        self.0
            .binary_search_by_key(&id, |f| f.0)
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    /// Product with the typed power rules applied.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[(SymbolId, u32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let id = a[i].0;
                    let exp = reduced_power(id.ty(), a[i].1 + b[j].1);
                    if exp > 0 {
                        out.push((id, exp));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Value for the given symbol assignment; `None` if a symbol is missing.
    pub fn evaluate(&self, values: &HashMap<SymbolId, f64>) -> Option<f64> {
        self.0.iter().try_fold(1.0, |acc, (id, exp)| {
            values.get(id).map(|v| acc * v.powi(*exp as i32))
        })
    }

    /// Range of the monomial over the symbol domains.
    pub fn range(&self) -> (f64, f64) {
        self.0.iter().fold((1.0, 1.0), |acc, &(id, exp)| {
            interval_mul(acc, factor_range(id.ty(), exp))
        })
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (id, exp)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{id:?}")?;
            if *exp > 1 {
                write!(f, "^{exp}")?;
            }
        }
        Ok(())
    }
}

/// Range of `s^exp` for a symbol of type `ty` (exp > 0).
pub fn factor_range(ty: SymbolType, exp: u32) -> (f64, f64) {
    match ty {
        SymbolType::Boolean => (0.0, 1.0),
        SymbolType::Signed => {
            if exp.is_multiple_of(2) {
                (1.0, 1.0)
            } else {
                (-1.0, 1.0)
            }
        }
        SymbolType::Interval | SymbolType::Unspecified => {
            if exp.is_multiple_of(2) {
                (0.0, 1.0)
            } else {
                (-1.0, 1.0)
            }
        }
    }
}

pub(crate) fn interval_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I1: SymbolId = SymbolId(5);
    const I2: SymbolId = SymbolId(9);
    const S1: SymbolId = SymbolId(6);
    const B1: SymbolId = SymbolId(7);
    const B2: SymbolId = SymbolId(11);

    #[test]
    fn typed_powers() {
        assert_eq!(Monomial::from_factors([(S1, 2)]), Monomial::one());
        assert_eq!(Monomial::from_factors([(S1, 3)]), Monomial::symbol(S1));
        assert_eq!(Monomial::from_factors([(B1, 3)]), Monomial::symbol(B1));
        assert_eq!(Monomial::from_factors([(I1, 2)]).degree(), 2);
    }

    #[test]
    fn product_merges_factors() {
        let a = Monomial::from_factors([(I1, 1), (S1, 1)]);
        let b = Monomial::from_factors([(S1, 1), (I2, 2)]);
        assert_eq!(a.mul(&b), Monomial::from_factors([(I1, 1), (I2, 2)]));
        let bb = Monomial::symbol(B1).mul(&Monomial::symbol(B1));
        assert_eq!(bb, Monomial::symbol(B1));
    }

    #[test]
    fn ranges() {
        assert_eq!(Monomial::from_factors([(I1, 2), (I2, 1)]).range(), (-1.0, 1.0));
        assert_eq!(Monomial::from_factors([(S1, 1), (B2, 1)]).range(), (-1.0, 1.0));
        assert_eq!(Monomial::from_factors([(B1, 1), (B2, 1)]).range(), (0.0, 1.0));
        assert_eq!(Monomial::from_factors([(I1, 2), (I2, 4)]).range(), (0.0, 1.0));
        assert_eq!(Monomial::one().range(), (1.0, 1.0));
    }
}
