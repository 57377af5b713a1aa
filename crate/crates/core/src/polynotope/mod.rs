//! Mixed polynotopes `x = c + R s_I^E`.
//!
//! A [`Polynotope`] stores its generator columns keyed by [`Monomial`]. Every
//! constructor and operation returns the canonical form: typed power rules
//! applied, duplicate monomials merged, the constant monomial folded into the
//! center, all-zero generator columns dropped and the symbol list `I` reduced
//! to the symbols that still occur, sorted ascending. Columns keep the order
//! in which their monomials first appeared; equality ignores column order.

mod hull;
mod json;
mod monomial;
mod reduce;

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mlc::Mlc;
use crate::symbols::{self, SymbolId, SymbolType};

pub use hull::{monomial_range, IntervalVec, Weighting};
pub(crate) use hull::{check_weighting, covariation_of};
pub use monomial::{factor_range, reduced_power, Monomial};

/// A polynomial function of typed symbols, `c + Σ_j R[:, j] · m_j(s)`.
#[derive(Clone, Debug)]
pub struct Polynotope {
    center: DVector<f64>,
    generators: DMatrix<f64>,
    monomials: Vec<Monomial>,
    ids: Vec<SymbolId>,
}

impl Polynotope {
    /// Canonical polynotope from the raw `(c, R, I, E)` record.
    ///
    /// `exponents` lists the nonzero entries of `E` as `(row, column, power)`
    /// triplets, rows indexing `ids` and columns indexing `R`.
    pub fn new(
        center: DVector<f64>,
        generators: DMatrix<f64>,
        ids: Vec<SymbolId>,
        exponents: &[(usize, usize, u32)],
    ) -> Result<Self> {
        if generators.nrows() != center.len() {
            return Err(Error::DimensionMismatch {
                op: "make",
                expected: center.len(),
                found: generators.nrows(),
            });
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSymbol(w[0]));
        }
        let m = generators.ncols();
        let mut factors: Vec<Vec<(SymbolId, u32)>> = vec![Vec::new(); m];
        for &(row, col, exp) in exponents {
            if row >= ids.len() {
                return Err(Error::DimensionMismatch {
                    op: "make",
                    expected: ids.len(),
                    found: row + 1,
                });
            }
            if col >= m {
                return Err(Error::DimensionMismatch {
                    op: "make",
                    expected: m,
                    found: col + 1,
                });
            }
            if exp > 0 {
                factors[col].push((ids[row], exp));
            }
        }
        let mut b = Builder::new(center);
        for (j, f) in factors.into_iter().enumerate() {
            b.add_column(Monomial::from_factors(f), 0, generators.column(j).iter().copied(), 1.0);
        }
        Ok(b.finish())
    }

    /// Same as [`Polynotope::new`] with a dense `p × m` exponent matrix.
    pub fn from_dense(
        center: DVector<f64>,
        generators: DMatrix<f64>,
        ids: Vec<SymbolId>,
        exponents: &DMatrix<u32>,
    ) -> Result<Self> {
        if exponents.nrows() != ids.len() || exponents.ncols() != generators.ncols() {
            return Err(Error::DimensionMismatch {
                op: "make",
                expected: ids.len() * generators.ncols(),
                found: exponents.len(),
            });
        }
        let triplets: Vec<_> = (0..exponents.ncols())
            .flat_map(|j| (0..exponents.nrows()).map(move |i| (i, j)))
            .filter(|&(i, j)| exponents[(i, j)] > 0)
            .map(|(i, j)| (i, j, exponents[(i, j)]))
            .collect();
        Self::new(center, generators, ids, &triplets)
    }

    /// Canonical polynotope from `(monomial, column)` pairs.
    pub fn from_terms<I>(center: DVector<f64>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, DVector<f64>)>,
    {
        let n = center.len();
        let mut b = Builder::new(center);
        for (m, col) in terms {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "from_terms",
                    expected: n,
                    found: col.len(),
                });
            }
            b.add_column(m, 0, col.iter().copied(), 1.0);
        }
        Ok(b.finish())
    }

    /// The zero function in dimension `n`.
    pub fn zeros(n: usize) -> Self {
        Self::constant(DVector::zeros(n))
    }

    /// A punctual polynotope.
    pub fn constant(c: DVector<f64>) -> Self {
        let n = c.len();
        Polynotope {
            center: c,
            generators: DMatrix::zeros(n, 0),
            monomials: Vec::new(),
            ids: Vec::new(),
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self::constant(DVector::from_element(1, value))
    }

    /// The scalar polynotope `s` for symbol `id`.
    pub fn symbol(id: SymbolId) -> Self {
        Polynotope {
            center: DVector::zeros(1),
            generators: DMatrix::from_element(1, 1, 1.0),
            monomials: vec![Monomial::symbol(id)],
            ids: vec![id],
        }
    }

    /// Affine form `c + G s` where column `j` of `G` multiplies `ids[j]`.
    pub fn affine(center: DVector<f64>, generators: DMatrix<f64>, ids: &[SymbolId]) -> Result<Self> {
        if generators.ncols() != ids.len() {
            return Err(Error::DimensionMismatch {
                op: "affine",
                expected: generators.ncols(),
                found: ids.len(),
            });
        }
        Self::from_terms(
            center,
            ids.iter()
                .zip(generators.column_iter())
                .map(|(id, g)| (Monomial::symbol(*id), g.into_owned())),
        )
    }

    /// The box `[lo, hi]` as a zonotope over fresh interval symbols.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                op: "from_box",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (&l, &h) in lo.iter().zip(hi) {
            if !(l <= h) {
                return Err(Error::InvalidInterval { lo: l, hi: h });
            }
        }
        let n = lo.len();
        let mid = DVector::from_iterator(n, lo.iter().zip(hi).map(|(l, h)| (l + h) / 2.0));
        let ids = symbols::fresh(n, SymbolType::Interval);
        let terms: Vec<_> = (0..n)
            .map(|i| {
                let mut col = DVector::zeros(n);
                col[i] = (hi[i] - lo[i]) / 2.0;
                (Monomial::symbol(ids[i]), col)
            })
            .collect();
        Self::from_terms(mid, terms)
    }

    /// Lifts a labeled linear form `c + M s` to a polynotope.
    pub fn from_mlc(center: DVector<f64>, m: &Mlc) -> Result<Self> {
        if center.len() != m.nrows() {
            return Err(Error::DimensionMismatch {
                op: "from_mlc",
                expected: center.len(),
                found: m.nrows(),
            });
        }
        Self::affine(center, m.matrix().clone(), m.labels())
    }

    /// Generator block as a labeled matrix; `None` unless every monomial is a
    /// single symbol to the first power.
    pub fn to_mlc(&self) -> Option<Mlc> {
        if !self.is_affine() {
            return None;
        }
        let labels = self.monomials.iter().map(|m| m.factors()[0].0).collect();
        Mlc::new(self.generators.clone(), labels).ok()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Number of generator columns (distinct non-constant monomials).
    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Symbols that occur in at least one monomial, ascending.
    pub fn ids(&self) -> &[SymbolId] {
        &self.ids
    }

    /// Nonzero entries of `E` as `(row, column, power)`, column by column.
    pub fn exponent_triplets(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (j, m) in self.monomials.iter().enumerate() {
            for &(id, exp) in m.factors() {
                let row = self.ids.binary_search(&id).expect("canonical symbol list");
                out.push((row, j, exp));
            }
        }
        out
    }

    /// Dense `E` (rows follow [`Polynotope::ids`]).
    pub fn exponent_matrix(&self) -> DMatrix<u32> {
        let mut e = DMatrix::zeros(self.ids.len(), self.monomials.len());
        for (row, col, exp) in self.exponent_triplets() {
            e[(row, col)] = exp;
        }
        e
    }

    pub fn max_degree(&self) -> u32 {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_punctual(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Zonotope test: `E` is an identity (every monomial a distinct symbol).
    pub fn is_affine(&self) -> bool {
        self.monomials.iter().all(Monomial::is_affine)
    }

    /// Generator column attached to `monomial`, if present.
    pub fn column_of(&self, monomial: &Monomial) -> Option<DVector<f64>> {
        self.monomials
            .iter()
            .position(|m| m == monomial)
            .map(|j| self.generators.column(j).into_owned())
    }

    /// Value of the function at a full symbol valuation.
    pub fn evaluate(&self, values: &HashMap<SymbolId, f64>) -> Result<DVector<f64>> {
        let mut out = self.center.clone();
        for (j, m) in self.monomials.iter().enumerate() {
            let v = match m.evaluate(values) {
                Some(v) => v,
                None => {
                    let missing = m
                        .factors()
                        .iter()
                        .find(|f| !values.contains_key(&f.0))
                        .map(|f| f.0)
                        .expect("a factor is missing");
                    return Err(Error::MissingSymbol(missing));
                }
            };
            out.axpy(v, &self.generators.column(j), 1.0);
        }
        Ok(out)
    }

    /// `P + Q`.
    pub fn add(&self, other: &Polynotope) -> Result<Polynotope> {
        self.check_dim("add", other)?;
        let mut b = Builder::new(&self.center + &other.center);
        b.extend_from(self, 0, 1.0);
        b.extend_from(other, 0, 1.0);
        Ok(b.finish())
    }

    /// `P - Q`.
    pub fn sub(&self, other: &Polynotope) -> Result<Polynotope> {
        self.check_dim("sub", other)?;
        let mut b = Builder::new(&self.center - &other.center);
        b.extend_from(self, 0, 1.0);
        b.extend_from(other, 0, -1.0);
        Ok(b.finish())
    }

    pub fn neg(&self) -> Polynotope {
        self.scale(-1.0)
    }

    /// `a P` for a real `a`.
    pub fn scale(&self, a: f64) -> Polynotope {
        Self::assemble(&self.center * a, &self.generators * a, self.monomials.clone())
    }

    /// `T P`.
    pub fn linear_image(&self, t: &DMatrix<f64>) -> Result<Polynotope> {
        if t.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "linear_image",
                expected: self.dim(),
                found: t.ncols(),
            });
        }
        Ok(Self::assemble(t * &self.center, t * &self.generators, self.monomials.clone()))
    }

    /// `diag(d) P`, a row-wise rescaling.
    pub fn scale_rows(&self, d: &DVector<f64>) -> Result<Polynotope> {
        if d.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "scale_rows",
                expected: self.dim(),
                found: d.len(),
            });
        }
        let mut g = self.generators.clone();
        for (i, mut row) in g.row_iter_mut().enumerate() {
            row *= d[i];
        }
        Ok(Self::assemble(self.center.component_mul(d), g, self.monomials.clone()))
    }

    /// `P + d`.
    pub fn translate(&self, d: &DVector<f64>) -> Result<Polynotope> {
        if d.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "translate",
                expected: self.dim(),
                found: d.len(),
            });
        }
        let mut out = self.clone();
        out.center += d;
        Ok(out)
    }

    /// `P + a` for a scalar added to every component.
    pub fn add_scalar(&self, a: f64) -> Polynotope {
        let mut out = self.clone();
        out.center.add_scalar_mut(a);
        out
    }

    /// `[P; Q]` with monomial-aligned generator columns.
    pub fn vcat(&self, other: &Polynotope) -> Polynotope {
        let n = self.dim();
        let mut center = DVector::zeros(n + other.dim());
        center.rows_mut(0, n).copy_from(&self.center);
        center.rows_mut(n, other.dim()).copy_from(&other.center);
        let mut b = Builder::new(center);
        b.extend_from(self, 0, 1.0);
        b.extend_from(other, n, 1.0);
        b.finish()
    }

    /// Stacks several polynotopes vertically.
    pub fn stack(parts: &[Polynotope]) -> Polynotope {
        let n: usize = parts.iter().map(Polynotope::dim).sum();
        let mut center = DVector::zeros(n);
        let mut offset = 0;
        for p in parts {
            center.rows_mut(offset, p.dim()).copy_from(&p.center);
            offset += p.dim();
        }
        let mut b = Builder::new(center);
        offset = 0;
        for p in parts {
            b.extend_from(p, offset, 1.0);
            offset += p.dim();
        }
        b.finish()
    }

    /// Component `i` as a scalar polynotope.
    pub fn row(&self, i: usize) -> Polynotope {
        self.select_rows(&[i])
    }

    /// Components `rows` in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Polynotope {
        let center = DVector::from_iterator(rows.len(), rows.iter().map(|&i| self.center[i]));
        let generators = self.generators.select_rows(rows.iter());
        Self::assemble(center, generators, self.monomials.clone())
    }

    /// Element-wise product. A scalar operand is broadcast over the rows of
    /// the other one.
    pub fn multiply(&self, other: &Polynotope) -> Result<Polynotope> {
        let n = if self.dim() == other.dim() || other.dim() == 1 {
            self.dim()
        } else if self.dim() == 1 {
            other.dim()
        } else {
            return Err(Error::DimensionMismatch {
                op: "multiply",
                expected: self.dim(),
                found: other.dim(),
            });
        };
        let ri = |p: &Polynotope, i: usize| if p.dim() == 1 { 0 } else { i };
        let center = DVector::from_fn(n, |i, _| self.center[ri(self, i)] * other.center[ri(other, i)]);
        let mut b = Builder::new(center);
        let mut col = vec![0.0; n];
        for (j, mj) in self.monomials.iter().enumerate() {
            for (i, v) in col.iter_mut().enumerate() {
                *v = self.generators[(ri(self, i), j)] * other.center[ri(other, i)];
            }
            b.add_column_ref(mj, 0, &col);
        }
        for (k, mk) in other.monomials.iter().enumerate() {
            for (i, v) in col.iter_mut().enumerate() {
                *v = other.generators[(ri(other, i), k)] * self.center[ri(self, i)];
            }
            b.add_column_ref(mk, 0, &col);
        }
        for (j, mj) in self.monomials.iter().enumerate() {
            let gj = self.generators.column(j);
            for (k, mk) in other.monomials.iter().enumerate() {
                let gk = other.generators.column(k);
                let mut any = false;
                for (i, v) in col.iter_mut().enumerate() {
                    *v = gj[ri(self, i)] * gk[ri(other, i)];
                    any |= *v != 0.0;
                }
                if any {
                    b.add_column(mj.mul(mk), 0, col.iter().copied(), 1.0);
                }
            }
        }
        Ok(b.finish())
    }

    /// `P ⊙ P`.
    pub fn square(&self) -> Polynotope {
        self.multiply(self).expect("same dimension")
    }

    /// Replaces the symbols in `assignment` by their values.
    pub fn substitute(&self, assignment: &HashMap<SymbolId, f64>) -> Result<Polynotope> {
        for (&id, &value) in assignment {
            if !in_domain(id.ty(), value) {
                return Err(Error::OutOfDomain {
                    id,
                    ty: id.ty(),
                    value,
                });
            }
        }
        let mut b = Builder::new(self.center.clone());
        for (j, m) in self.monomials.iter().enumerate() {
            let mut scale = 1.0;
            let mut rest = Vec::with_capacity(m.factors().len());
            for &(id, exp) in m.factors() {
                match assignment.get(&id) {
                    Some(v) => scale *= v.powi(exp as i32),
                    None => rest.push((id, exp)),
                }
            }
            if scale != 0.0 {
                b.add_column(
                    Monomial::from_factors(rest),
                    0,
                    self.generators.column(j).iter().copied(),
                    scale,
                );
            }
        }
        Ok(b.finish())
    }

    fn check_dim(&self, op: &'static str, other: &Polynotope) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Builds from already distinct, non-constant monomials, dropping
    /// all-zero generator columns.
    fn assemble(center: DVector<f64>, generators: DMatrix<f64>, monomials: Vec<Monomial>) -> Self {
        let keep: Vec<usize> = (0..monomials.len())
            .filter(|&j| generators.column(j).iter().any(|v| *v != 0.0))
            .collect();
        if keep.len() == monomials.len() {
            let ids = collect_ids(&monomials);
            return Polynotope {
                center,
                generators,
                monomials,
                ids,
            };
        }
        let generators = generators.select_columns(keep.iter());
        let monomials: Vec<Monomial> = keep.iter().map(|&j| monomials[j].clone()).collect();
        let ids = collect_ids(&monomials);
        Polynotope {
            center,
            generators,
            monomials,
            ids,
        }
    }
}

impl PartialEq for Polynotope {
    /// Structural equality up to a permutation of generator columns.
    fn eq(&self, other: &Self) -> bool {
        if self.center != other.center
            || self.ids != other.ids
            || self.monomials.len() != other.monomials.len()
            || self.generators.nrows() != other.generators.nrows()
        {
            return false;
        }
        let index: HashMap<&Monomial, usize> =
            other.monomials.iter().enumerate().map(|(k, m)| (m, k)).collect();
        self.monomials.iter().enumerate().all(|(j, m)| {
            index
                .get(m)
                .is_some_and(|&k| self.generators.column(j) == other.generators.column(k))
        })
    }
}

/// Symbol domains used for substitution. Untyped symbols range over
/// `[-1, 1]` like interval symbols.
fn in_domain(ty: SymbolType, v: f64) -> bool {
    match ty {
        SymbolType::Interval | SymbolType::Unspecified => (-1.0..=1.0).contains(&v),
        SymbolType::Signed => v == 1.0 || v == -1.0,
        SymbolType::Boolean => (0.0..=1.0).contains(&v),
    }
}

fn collect_ids(monomials: &[Monomial]) -> Vec<SymbolId> {
    let set: BTreeSet<SymbolId> = monomials
        .iter()
        .flat_map(|m| m.factors().iter().map(|f| f.0))
        .collect();
    set.into_iter().collect()
}

/// Accumulates generator columns keyed by monomial, merging duplicates and
/// folding the constant monomial into the center.
pub(crate) struct Builder {
    center: DVector<f64>,
    index: IndexMap<Monomial, usize>,
    data: Vec<f64>,
}

impl Builder {
    pub(crate) fn new(center: DVector<f64>) -> Self {
        Builder {
            center,
            index: IndexMap::new(),
            data: Vec::new(),
        }
    }

    fn slot(&mut self, m: &Monomial) -> usize {
        let n = self.center.len();
        if let Some(&k) = self.index.get(m) {
            return k;
        }
        let k = self.index.len();
        self.index.insert(m.clone(), k);
        self.data.resize(self.data.len() + n, 0.0);
        k
    }

    /// Adds `scale · col` at rows `offset..` of the column for `m`.
    pub(crate) fn add_column<I: IntoIterator<Item = f64>>(
        &mut self,
        m: Monomial,
        offset: usize,
        col: I,
        scale: f64,
    ) {
        if m.is_constant() {
            for (i, v) in col.into_iter().enumerate() {
                self.center[offset + i] += scale * v;
            }
            return;
        }
        let n = self.center.len();
        let k = match self.index.get(&m) {
            Some(&k) => k,
            None => {
                let k = self.index.len();
                self.index.insert(m, k);
                self.data.resize(self.data.len() + n, 0.0);
                k
            }
        };
        let dst = &mut self.data[k * n..(k + 1) * n];
        for (i, v) in col.into_iter().enumerate() {
            dst[offset + i] += scale * v;
        }
    }

    fn add_column_ref(&mut self, m: &Monomial, offset: usize, col: &[f64]) {
        if col.iter().all(|v| *v == 0.0) {
            return;
        }
        if m.is_constant() {
            for (i, v) in col.iter().enumerate() {
                self.center[offset + i] += v;
            }
            return;
        }
        let n = self.center.len();
        let k = self.slot(m);
        let dst = &mut self.data[k * n..(k + 1) * n];
        for (i, v) in col.iter().enumerate() {
            dst[offset + i] += v;
        }
    }

    /// Adds every generator column of `p`, scaled, at row `offset`.
    pub(crate) fn extend_from(&mut self, p: &Polynotope, offset: usize, scale: f64) {
        let n = self.center.len();
        for (j, m) in p.monomials.iter().enumerate() {
            let k = self.slot(m);
            let dst = &mut self.data[k * n..(k + 1) * n];
            for (i, v) in p.generators.column(j).iter().enumerate() {
                dst[offset + i] += scale * v;
            }
        }
    }

    pub(crate) fn finish(self) -> Polynotope {
        let n = self.center.len();
        let m = self.index.len();
        let generators = DMatrix::from_vec(n, m, self.data);
        let monomials: Vec<Monomial> = self.index.into_keys().collect();
        Polynotope::assemble(self.center, generators, monomials)
    }
}
