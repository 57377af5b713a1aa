//! Discrete-time reachability.
//!
//! A [`Dynamics`] provides two views of the same recursion: a set-valued step
//! built from polynotope operators and a pointwise step used to simulate
//! concrete trajectories. [`run`] iterates the set step with a reduction after
//! every step; [`mc_check`] samples concrete trajectories and checks that they
//! stay inside the computed hulls.

mod config;
mod filter;
mod models;

use std::collections::HashMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polynotope::{IntervalVec, Polynotope};
use crate::symbols::{SymbolId, SymbolType};

pub use config::{initial_set, EncodeSpec, InitialSpec, ModelKind, ReachRun, Scenario, ScenarioConfig};
pub use filter::{FilterRun, FilterScenario, LotkaFilter, Measurements};
pub use models::{lotka_field, LotkaParams, LotkaVolterra, Traffic, TrafficParams, VanDerPol};

/// Absolute slack used for box membership in containment checks.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// One step of a discrete-time system, as a set map and as a point map.
pub trait Dynamics: Send + Sync {
    fn dim(&self) -> usize;

    /// Set-valued step `x_k -> x_{k+1}` before the outer reduction.
    /// `order` is available for reductions inside the step.
    fn step(&self, x: &Polynotope, k: usize, order: usize) -> Result<Polynotope>;

    /// The same recursion evaluated at a point, with persistent parameters
    /// `theta` drawn from [`Dynamics::parameter_box`].
    fn step_point(&self, x: &DVector<f64>, k: usize, theta: &[f64]) -> DVector<f64>;

    /// Bounds of the persistent uncertain parameters.
    fn parameter_box(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
}

/// Iterates `x_{k+1} = reduce(step(x_k, k), order)` and returns `x_0 ..= x_steps`.
///
/// A non-finite center or generator aborts with the index of the offending step.
pub fn run(dynamics: &dyn Dynamics, x0: Polynotope, steps: usize, order: usize) -> Result<Vec<Polynotope>> {
    if x0.dim() != dynamics.dim() {
        return Err(Error::DimensionMismatch {
            op: "reach::run",
            expected: dynamics.dim(),
            found: x0.dim(),
        });
    }
    check_finite(&x0, 0)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0);
    for k in 0..steps {
        let next = dynamics
            .step(&states[k], k, order)
            .map_err(|e| blow_up(e, k + 1))?
            .reduce(order);
        check_finite(&next, k + 1)?;
        states.push(next);
    }
    Ok(states)
}

pub(crate) fn check_finite(x: &Polynotope, step: usize) -> Result<()> {
    let finite = x.center().iter().chain(x.generators().iter()).all(|v| v.is_finite());
    if finite {
        Ok(())
    } else {
        Err(Error::NumericAbort { step })
    }
}

/// Hull computations on infinite or NaN data surface as interval or
/// non-finite errors; both mean the iteration diverged.
pub(crate) fn blow_up(e: Error, step: usize) -> Error {
    match e {
        Error::NonFinite(_) => Error::NumericAbort { step },
        Error::InvalidInterval { lo, hi } if !(lo.is_finite() && hi.is_finite()) => Error::NumericAbort { step },
        other => other,
    }
}

/// Assignment of signed symbols to `±1`, selecting a cell (or a group of
/// cells) of a mixed encoding.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellQuery {
    assignment: Vec<(SymbolId, f64)>,
}

impl CellQuery {
    pub fn new(assignment: Vec<(SymbolId, f64)>) -> Result<Self> {
        for &(id, value) in &assignment {
            if id.ty() != SymbolType::Signed {
                return Err(Error::FlavorMismatch {
                    id,
                    expected: SymbolType::Signed,
                    found: id.ty(),
                });
            }
            if value != 1.0 && value != -1.0 {
                return Err(Error::OutOfDomain {
                    id,
                    ty: SymbolType::Signed,
                    value,
                });
            }
        }
        Ok(CellQuery { assignment })
    }

    /// Pairs `ids[j]` with the sign `signs[j]` (`true` is `+1`).
    pub fn from_signs(ids: &[SymbolId], signs: &[bool]) -> Result<Self> {
        if ids.len() < signs.len() {
            return Err(Error::DimensionMismatch {
                op: "cell query",
                expected: ids.len(),
                found: signs.len(),
            });
        }
        Self::new(
            ids.iter()
                .zip(signs)
                .map(|(id, s)| (*id, if *s { 1.0 } else { -1.0 }))
                .collect(),
        )
    }

    /// Parses `"+-+"` style sign strings.
    pub fn parse_signs(s: &str) -> Result<Vec<bool>> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(true),
                '-' => Ok(false),
                other => Err(Error::Config(format!("invalid sign character {other:?}"))),
            })
            .collect()
    }

    /// Union of two queries over disjoint symbols.
    pub fn and(mut self, other: CellQuery) -> Self {
        self.assignment.extend(other.assignment);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[(SymbolId, f64)] {
        &self.assignment
    }

    fn as_map(&self) -> HashMap<SymbolId, f64> {
        self.assignment.iter().copied().collect()
    }
}

/// Zonotopic enclosure of `x` restricted to a cell.
pub fn cell_zono(x: &Polynotope, query: &CellQuery) -> Result<Polynotope> {
    Ok(x.substitute(&query.as_map())?.zono_hull())
}

/// Box enclosure of `x` restricted to a cell. The empty query gives the
/// global box hull.
pub fn cell_hull(x: &Polynotope, query: &CellQuery) -> Result<IntervalVec> {
    Ok(x.substitute(&query.as_map())?.box_hull())
}

/// First containment failure found by [`mc_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub sample: usize,
    pub step: usize,
    pub state: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Outcome of a Monte-Carlo containment check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct McReport {
    pub samples: usize,
    pub checks: usize,
    pub violations: usize,
    /// Largest distance from a sample to its box, zero when all are inside.
    pub worst_excess: f64,
    pub first: Option<Violation>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub(crate) fn record(&mut self, sample: usize, step: usize, x: &[f64], hull: &IntervalVec, tol: f64) {
        for (i, &v) in x.iter().enumerate() {
            self.checks += 1;
            let (lo, hi) = (hull.lo()[i], hull.hi()[i]);
            let excess = (lo - v).max(v - hi).max(0.0);
            let bad = !(v >= lo - tol && v <= hi + tol);
            if bad {
                self.violations += 1;
                if self.first.is_none() {
                    self.first = Some(Violation {
                        sample,
                        step,
                        state: i,
                        value: v,
                        lo,
                        hi,
                    });
                }
            }
            if excess > self.worst_excess || excess.is_nan() {
                self.worst_excess = if excess.is_nan() { f64::INFINITY } else { excess };
            }
        }
    }
}

/// Samples initial states uniformly in the (cell) hull of `states[0]` and
/// persistent parameters in their box, iterates the point recursion and
/// checks membership in the (cell) hull of every `states[k]`.
///
/// The first `2^n` samples (when `n ≤ 10`) are the corners of the initial
/// box, with parameters at their bounds alternately.
pub fn mc_check(
    dynamics: &dyn Dynamics,
    states: &[Polynotope],
    query: &CellQuery,
    samples: usize,
    seed: u64,
) -> Result<McReport> {
    let hulls = states
        .iter()
        .map(|x| cell_hull(x, query))
        .collect::<Result<Vec<_>>>()?;
    let mut report = McReport {
        samples,
        ..McReport::default()
    };
    let Some(initial) = hulls.first() else {
        return Ok(report);
    };
    let n = initial.len();
    let params = dynamics.parameter_box();
    let corners = if n <= 10 { 1usize << n } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let (x0, theta): (Vec<f64>, Vec<f64>) = if s < corners {
            let x = (0..n)
                .map(|i| if s >> i & 1 == 1 { initial.hi()[i] } else { initial.lo()[i] })
                .collect();
            let t = params.iter().map(|&(lo, hi)| if s % 2 == 0 { lo } else { hi }).collect();
            (x, t)
        } else {
            let x = (0..n).map(|i| uniform(&mut rng, initial.lo()[i], initial.hi()[i])).collect();
            let t = params.iter().map(|&(lo, hi)| uniform(&mut rng, lo, hi)).collect();
            (x, t)
        };
        let mut x = DVector::from_vec(x0);
        report.record(s, 0, x.as_slice(), initial, CONTAINMENT_TOL);
        for (k, hull) in hulls.iter().enumerate().skip(1) {
            x = dynamics.step_point(&x, k - 1, &theta);
            report.record(s, k, x.as_slice(), hull, CONTAINMENT_TOL);
        }
    }
    Ok(report)
}

pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::dvector;

    use super::*;
    use crate::mixedenc::{encode, EncodingSpec};
    use crate::symbols;

    struct Identity(usize);

    impl Dynamics for Identity {
        fn dim(&self) -> usize {
            self.0
        }
        fn step(&self, x: &Polynotope, _: usize, _: usize) -> Result<Polynotope> {
            Ok(x.clone())
        }
        fn step_point(&self, x: &DVector<f64>, _: usize, _: &[f64]) -> DVector<f64> {
            x.clone()
        }
    }

    struct Doubling;

    impl Dynamics for Doubling {
        fn dim(&self) -> usize {
            1
        }
        fn step(&self, x: &Polynotope, _: usize, _: usize) -> Result<Polynotope> {
            Ok(x.multiply(x)?.scale(1e200))
        }
        fn step_point(&self, x: &DVector<f64>, _: usize, _: &[f64]) -> DVector<f64> {
            x * x[0] * 1e200
        }
    }

    #[test]
    fn identity_dynamics_is_constant() {
        let x0 = Polynotope::from_box(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        let states = run(&Identity(2), x0.clone(), 5, 10).unwrap();
        assert_eq!(states.len(), 6);
        assert!(states.iter().all(|s| *s == x0));
    }

    #[test]
    fn blow_up_reports_the_step() {
        let x0 = Polynotope::constant(dvector![10.0]);
        match run(&Doubling, x0, 10, 10) {
            Err(Error::NumericAbort { step }) => assert_eq!(step, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn punctual_set_is_contained_exactly() {
        let x0 = Polynotope::constant(dvector![1.0, 2.0]);
        let states = run(&Identity(2), x0, 3, 10).unwrap();
        let r = mc_check(&Identity(2), &states, &CellQuery::default(), 5, 1).unwrap();
        assert!(r.passed());
        assert_eq!(r.worst_excess, 0.0);
        assert_eq!(r.checks, 5 * 4 * 2);
    }

    #[test]
    fn empty_query_is_the_global_hull() {
        let x = Polynotope::from_box(&[-1.0], &[2.0]).unwrap();
        assert_eq!(cell_hull(&x, &CellQuery::default()).unwrap(), x.box_hull());
    }

    #[test]
    fn queries_reject_non_signed_symbols() {
        let i = symbols::fresh_one(SymbolType::Interval);
        assert!(CellQuery::new(vec![(i, 1.0)]).is_err());
        let s = symbols::fresh_one(SymbolType::Signed);
        assert!(CellQuery::new(vec![(s, 0.5)]).is_err());
        assert!(CellQuery::parse_signs("+x").is_err());
        assert_eq!(CellQuery::parse_signs("+-+").unwrap(), vec![true, false, true]);
    }

    #[test]
    fn complementary_cells_tile_the_initial_box() {
        let e = encode(EncodingSpec::signed(2), 14.0, 16.0).unwrap();
        let mut cells = Vec::new();
        for a in [false, true] {
            for b in [false, true] {
                let q = CellQuery::from_signs(&e.discrete, &[a, b]).unwrap();
                let h = cell_hull(&e.poly, &q).unwrap();
                assert!(e.poly.box_hull().contains_box(&h, 0.0));
                cells.push((h.lo()[0], h.hi()[0]));
            }
        }
        cells.sort_by(|x, y| x.0.total_cmp(&y.0));
        assert_eq!(cells, vec![(14.0, 14.5), (14.5, 15.0), (15.0, 15.5), (15.5, 16.0)]);
        let group = CellQuery::from_signs(&e.discrete, &[true]).unwrap();
        let h = cell_hull(&e.poly, &group).unwrap();
        assert_eq!((h.lo()[0], h.hi()[0]), (15.0, 16.0));
    }

    #[test]
    fn report_flags_points_outside() {
        let mut r = McReport::default();
        let hull = IntervalVec::new(vec![0.0], vec![1.0]).unwrap();
        r.record(3, 7, &[1.5], &hull, 1e-9);
        r.record(3, 8, &[0.5], &hull, 1e-9);
        assert_eq!(r.violations, 1);
        assert_eq!(r.worst_excess, 0.5);
        assert_eq!(r.first.as_ref().unwrap().step, 7);
    }
}
