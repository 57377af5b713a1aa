use nalgebra::DVector;

use super::{Builder, Polynotope};
use crate::symbols::{self, SymbolProvider, SymbolType};

impl Polynotope {
    /// Order reduction to at most `q` generator columns, using the global
    /// symbol provider.
    pub fn reduce(&self, q: usize) -> Polynotope {
        self.reduce_with(q, symbols::global())
    }

    /// Keeps the `q - n` generator columns of largest Euclidean norm and
    /// encloses the others row-wise by a box over fresh interval symbols.
    ///
    /// Ties in norm are broken by lower degree, then by monomial order, so the
    /// result does not depend on the column order of `self`.
    pub fn reduce_with(&self, q: usize, provider: &SymbolProvider) -> Polynotope {
        let m = self.monomial_count();
        if m <= q {
            return self.clone();
        }
        let n = self.dim();
        let norms: Vec<f64> = self.generators.column_iter().map(|c| c.norm()).collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            norms[b]
                .total_cmp(&norms[a])
                .then_with(|| self.monomials[a].degree().cmp(&self.monomials[b].degree()))
                .then_with(|| self.monomials[a].cmp(&self.monomials[b]))
        });
        let keep = q.saturating_sub(n).min(m);
        let (kept, dropped) = order.split_at(keep);

        let mut lo = DVector::<f64>::zeros(n);
        let mut hi = DVector::<f64>::zeros(n);
        for &j in dropped {
            let (a, b) = self.monomials[j].range();
            for i in 0..n {
                let g = self.generators[(i, j)];
                let (x, y) = (g * a, g * b);
                lo[i] += x.min(y);
                hi[i] += x.max(y);
            }
        }
        let mid = (&lo + &hi) / 2.0;
        let rad = (&hi - &lo) / 2.0;

        let mut kept_sorted = kept.to_vec();
        kept_sorted.sort_unstable();
        let mut b = Builder::new(&self.center + mid);
        for &j in &kept_sorted {
            b.add_column(self.monomials[j].clone(), 0, self.generators.column(j).iter().copied(), 1.0);
        }
        let rows: Vec<usize> = (0..n).filter(|&i| rad[i] > 0.0).collect();
        let fresh = provider.fresh(rows.len(), SymbolType::Interval);
        for (&i, id) in rows.iter().zip(fresh) {
            b.add_column(super::Monomial::symbol(id), i, std::iter::once(rad[i]), 1.0);
        }
        b.finish()
    }
}
