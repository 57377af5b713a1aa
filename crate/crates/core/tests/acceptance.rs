//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary so that every criterion reports even when an
//! earlier one fails; the process exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use nalgebra::{dvector, DMatrix, DVector};
use polynotope_core::logic::{adder, decompose_with, gate, GateKind, TruthTable};
use polynotope_core::mixedenc::{encode, EncodingSpec};
use polynotope_core::nonlinear::{self, enclose_abs, enclose_c1, ConvexFn, ScalarFn};
use polynotope_core::pkf::{gain_cost, optimal_gain, zkf_path, LinearSystem};
use polynotope_core::reach::{
    CellQuery, EncodeSpec, FilterRun, FilterScenario, InitialSpec, ModelKind, Scenario, ScenarioConfig,
};
use polynotope_core::symbols::{self, Flavor, SymbolId, SymbolType};
use polynotope_core::{Mlc, Monomial, Polynotope, Weighting};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("adder monomial census", adder_census),
        ("labeled-column sum", mlc_sum),
        ("logic truth tables", gate_truth_tables),
        ("functional completeness", functional_completeness),
        ("linear filter equivalence", kf_equivalence),
        ("gain optimality", gain_optimality),
        ("inclusion suites", inclusion_suites),
        ("enclosure tightness", enclosure_tightness),
        ("mixed-encoding partition", encoding_partition),
        ("filter degree outcomes", filter_degrees),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.2} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2} s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn adder_census() -> Outcome {
    let expected = [
        (Flavor::Signed, vec![5, 11, 23, 47, 95, 191, 383, 767]),
        (Flavor::Boolean, vec![8, 23, 65, 188, 554, 1649]),
    ];
    let mut slowest = Duration::ZERO;
    for (flavor, counts) in expected {
        for (i, &want) in counts.iter().enumerate() {
            let n = i + 1;
            let start = Instant::now();
            let got = adder(n, flavor).map_err(|e| e.to_string())?.census();
            let t = start.elapsed();
            slowest = slowest.max(t);
            ensure(got == want, || format!("{flavor:?} n={n}: {got} monomials, expected {want}"))?;
            ensure(t < Duration::from_secs(60), || format!("{flavor:?} n={n} took {t:?}"))?;
        }
    }
    Ok(format!("14 counts exact, slowest case {:.2} s", slowest.as_secs_f64()))
}

fn mlc_sum() -> Outcome {
    let id = |k: u64| SymbolId(k);
    let m = Mlc::new(
        DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]),
        vec![id(2), id(1), id(5)],
    )
    .map_err(|e| e.to_string())?;
    let n = Mlc::new(
        DMatrix::from_row_slice(2, 4, &[2.0, 0.0, 4.0, 6.0, 0.0, 3.0, 5.0, 7.0]),
        vec![id(3), id(5), id(2), id(8)],
    )
    .map_err(|e| e.to_string())?;
    let p = m.add(&n).map_err(|e| e.to_string())?;
    let labels: Vec<u64> = p.labels().iter().map(|l| l.0).collect();
    ensure(labels == vec![1, 2, 3, 5, 8], || format!("labels {labels:?}"))?;
    let expected = [(1, [0.0, 1.0]), (2, [5.0, 5.0]), (3, [2.0, 0.0]), (5, [1.0, 4.0]), (8, [6.0, 7.0])];
    for (l, col) in expected {
        let got = p.column(id(l)).ok_or(format!("missing label {l}"))?;
        ensure(got.as_slice() == col, || format!("label {l}: {got:?}"))?;
    }
    Ok("labels [1,2,3,5,8] and all entries exact".into())
}

fn gate_truth_tables() -> Outcome {
    let mut checks = 0;
    for flavor in [Flavor::Signed, Flavor::Boolean] {
        let ids = symbols::fresh(2, flavor.symbol_type());
        let (a, b) = (Polynotope::symbol(ids[0]), Polynotope::symbol(ids[1]));
        for kind in GateKind::OPERATORS {
            let poly = if kind.arity() == 1 {
                gate(kind, &a, None, flavor)
            } else {
                gate(kind, &a, Some(&b), flavor)
            }
            .map_err(|e| e.to_string())?;
            for (va, vb) in [(false, false), (false, true), (true, false), (true, true)] {
                let values = HashMap::from([(ids[0], flavor.value(va)), (ids[1], flavor.value(vb))]);
                let got = poly.substitute(&values).map_err(|e| e.to_string())?;
                let want = flavor.value(kind.truth(va, vb));
                ensure(got.is_punctual() && got.center()[0] == want, || {
                    format!("{flavor:?} {} ({va}, {vb}) = {:?}", kind.name(), got.center())
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("8 gates x 2 flavors, {checks} exact evaluations"))
}

fn functional_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = 0;
    for flavor in [Flavor::Signed, Flavor::Boolean] {
        for t in 0..100 {
            let p = rng.random_range(1..=4);
            let tt = TruthTable::random(p, &mut rng);
            let ids = symbols::fresh(p, flavor.symbol_type());
            let poly = decompose_with(&tt, flavor, &ids).map_err(|e| e.to_string())?;
            for k in 0..1usize << p {
                let inputs = TruthTable::inputs_of(p, k);
                let values: HashMap<SymbolId, f64> =
                    ids.iter().zip(&inputs).map(|(id, b)| (*id, flavor.value(*b))).collect();
                let got = poly.evaluate(&values).map_err(|e| e.to_string())?[0];
                let want = flavor.value(tt.eval(&inputs));
                ensure((got - want).abs() <= 1e-12, || format!("{flavor:?} table {t} row {k}: {got} vs {want}"))?;
                points += 1;
            }
        }
    }
    Ok(format!("200 random tables (100 per flavor), {points} points"))
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

fn rel_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).amax() <= tol * b.amax().max(1.0)
}

fn kf_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for sys_index in 0..50 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=n);
        let nu = rng.random_range(1..=2);
        let nw = rng.random_range(1..=n);
        let sys = LinearSystem {
            a: random_matrix(&mut rng, n, n),
            b: random_matrix(&mut rng, n, nu),
            c: random_matrix(&mut rng, m, n),
            d: random_matrix(&mut rng, m, nu),
            e: random_matrix(&mut rng, n, nw) * 0.3,
            f: random_matrix(&mut rng, m, m) + DMatrix::identity(m, m) * 1.5,
        };
        let ids = symbols::fresh(n, SymbolType::Interval);
        let r0 = random_matrix(&mut rng, n, n);
        let c0 = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        let x0 = Polynotope::affine(c0, r0.clone(), &ids).map_err(|e| e.to_string())?;
        let steps = 6;
        let us: Vec<DVector<f64>> = (0..steps).map(|_| DVector::from_fn(nu, |_, _| rng.random_range(-1.0..1.0))).collect();
        let ys: Vec<DVector<f64>> = (0..steps).map(|_| DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0))).collect();
        let path = zkf_path(&sys, &x0, &us, &ys, 10_000).map_err(|e| e.to_string())?;

        let mut p = &r0 * r0.transpose();
        let mut center = x0.center().clone();
        for (k, step) in path.iter().enumerate() {
            let s = &sys.c * &p * sys.c.transpose() + &sys.f * sys.f.transpose();
            let s_inv = s.clone().try_inverse().ok_or("singular innovation covariance")?;
            let gain = &sys.a * &p * sys.c.transpose() * &s_inv;
            let p_next = &sys.a * &p * sys.a.transpose() + &sys.e * sys.e.transpose()
                - &sys.a * &p * sys.c.transpose() * &s_inv * &sys.c * &p * sys.a.transpose();
            let c_next = (&sys.a - &gain * &sys.c) * &center + (&sys.b - &gain * &sys.d) * &us[k] + &gain * &ys[k];

            let cov = step.state.covariation(&Weighting::Identity).map_err(|e| e.to_string())?;
            let c_got = DMatrix::from_column_slice(n, 1, step.state.center().as_slice());
            let c_want = DMatrix::from_column_slice(n, 1, c_next.as_slice());
            for (what, got, want) in [("gain", &step.gain, &gain), ("covariation", &cov, &p_next), ("center", &c_got, &c_want)] {
                ensure(rel_close(got, want, 1e-9), || format!("system {sys_index} step {k}: {what} differs"))?;
                worst = worst.max((got - want).amax() / want.amax().max(1.0));
            }
            ensure(step.prediction.is_affine() && step.innovation.is_affine() && step.state.is_affine(), || {
                format!("system {sys_index} step {k}: a set left the zonotope class")
            })?;
            p = p_next;
            center = c_next;
        }
    }
    Ok(format!("50 systems x 6 steps, worst relative deviation {worst:.1e}"))
}

fn gain_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    for case in 0..50 {
        let rows_p = rng.random_range(1..=5);
        let rows_e = rng.random_range(1..=4);
        let cols = rng.random_range(rows_e..=10);
        let rp = random_matrix(&mut rng, rows_p, cols);
        let re = random_matrix(&mut rng, rows_e, cols);
        let g = optimal_gain(&rp, &re, &Weighting::Identity, None).map_err(|e| e.to_string())?;
        let best = gain_cost(&rp, &re, &g, &Weighting::Identity).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let scale = 10f64.powf(rng.random_range(-6.0..0.0));
            let dg = random_matrix(&mut rng, rows_p, rows_e) * scale;
            let c = gain_cost(&rp, &re, &(&g + dg), &Weighting::Identity).map_err(|e| e.to_string())?;
            worst = worst.min(c - best);
            ensure(c - best >= -1e-12, || format!("case {case}: perturbed cost {c} below optimum {best}"))?;
        }
    }
    Ok(format!("5000 perturbations, smallest margin {worst:.2e}"))
}

/// Random polynotope of dimension `n` over a pool of mixed-type symbols.
fn random_poly(rng: &mut ChaCha8Rng, n: usize, pool: &[SymbolId]) -> Polynotope {
    let terms: Vec<(Monomial, DVector<f64>)> = (0..rng.random_range(1..=6))
        .map(|_| {
            let factors: Vec<(SymbolId, u32)> = (0..rng.random_range(1..=2))
                .map(|_| (pool[rng.random_range(0..pool.len())], rng.random_range(1..=2)))
                .collect();
            let col = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            (Monomial::from_factors(factors), col)
        })
        .collect();
    let c = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    Polynotope::from_terms(c, terms).expect("valid terms")
}

fn random_valuation(rng: &mut ChaCha8Rng, ids: &[SymbolId]) -> HashMap<SymbolId, f64> {
    ids.iter()
        .map(|&id| {
            let v = match id.ty() {
                SymbolType::Signed => {
                    if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                }
                SymbolType::Boolean => f64::from(u8::from(rng.random_bool(0.5))),
                _ => rng.random_range(-1.0..=1.0),
            };
            (id, v)
        })
        .collect()
}

type SetOp = Box<dyn Fn(&[Polynotope]) -> polynotope_core::Result<Polynotope>>;
type PointOp = Box<dyn Fn(&[DVector<f64>]) -> DVector<f64>>;

/// Checks `point(x(s))` against `box_hull(set(x))` for random operands and
/// valuations; returns the number of samples.
fn op_inclusion(name: &str, arity: usize, dim: usize, set: SetOp, point: PointOp, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = 0;
    for _ in 0..20 {
        let mut pool = symbols::fresh(2, SymbolType::Interval);
        pool.extend(symbols::fresh(2, SymbolType::Signed));
        pool.extend(symbols::fresh(1, SymbolType::Boolean));
        let operands: Vec<Polynotope> = (0..arity).map(|_| random_poly(&mut rng, dim, &pool)).collect();
        let result = set(&operands).map_err(|e| format!("{name}: {e}"))?;
        let hull = result.box_hull();
        for _ in 0..50 {
            let values = random_valuation(&mut rng, &pool);
            let points: Vec<DVector<f64>> = operands
                .iter()
                .map(|p| p.evaluate(&values).expect("pool covers operands"))
                .collect();
            let y = point(&points);
            ensure(hull.contains(y.as_slice(), 1e-9), || format!("{name}: {y:?} outside {hull:?}"))?;
            samples += 1;
        }
    }
    Ok(samples)
}

fn scalar_op(f: fn(f64) -> f64) -> PointOp {
    Box::new(move |x: &[DVector<f64>]| x[0].map(f))
}

fn inclusion_suites() -> Outcome {
    let mut lines = Vec::new();
    let t = ChaCha8Rng::seed_from_u64(77).random_range(0.5..2.0);
    let ops: Vec<(&str, usize, usize, SetOp, PointOp)> = vec![
        ("add", 2, 2, Box::new(|p| p[0].add(&p[1])), Box::new(|x| &x[0] + &x[1])),
        ("sub", 2, 2, Box::new(|p| p[0].sub(&p[1])), Box::new(|x| &x[0] - &x[1])),
        ("multiply", 2, 2, Box::new(|p| p[0].multiply(&p[1])), Box::new(|x| x[0].component_mul(&x[1]))),
        ("square", 1, 2, Box::new(|p| Ok(p[0].square())), Box::new(|x| x[0].component_mul(&x[0]))),
        (
            "linear_image",
            1,
            2,
            Box::new(move |p| p[0].linear_image(&DMatrix::from_row_slice(2, 2, &[1.0, t, -t, 0.5]))),
            Box::new(move |x| DMatrix::from_row_slice(2, 2, &[1.0, t, -t, 0.5]) * &x[0]),
        ),
        ("vcat", 2, 1, Box::new(|p| Ok(p[0].vcat(&p[1]))), Box::new(|x| dvector![x[0][0], x[1][0]])),
        ("zono_hull", 1, 2, Box::new(|p| Ok(p[0].zono_hull())), Box::new(|x| x[0].clone())),
        ("reduce", 1, 2, Box::new(|p| Ok(p[0].reduce(3))), Box::new(|x| x[0].clone())),
        ("exp", 1, 1, Box::new(|p| nonlinear::apply_scalar(&ScalarFn::Exp, &p[0])), scalar_op(f64::exp)),
        ("abs", 1, 2, Box::new(|p| nonlinear::abs(&p[0])), scalar_op(f64::abs)),
        ("max", 2, 1, Box::new(|p| nonlinear::max(&p[0], &p[1])), Box::new(|x| x[0].zip_map(&x[1], f64::max))),
        ("min", 2, 1, Box::new(|p| nonlinear::min(&p[0], &p[1])), Box::new(|x| x[0].zip_map(&x[1], f64::min))),
        (
            "min_n",
            3,
            1,
            Box::new(nonlinear::min_n),
            Box::new(|x| dvector![x[0][0].min(x[1][0]).min(x[2][0])]),
        ),
        (
            "max_n",
            3,
            1,
            Box::new(nonlinear::max_n),
            Box::new(|x| dvector![x[0][0].max(x[1][0]).max(x[2][0])]),
        ),
        ("sat", 1, 1, Box::new(|p| nonlinear::sat(&p[0], -0.5, 0.7)), scalar_op(|v| v.clamp(-0.5, 0.7))),
        (
            "deadzone",
            1,
            1,
            Box::new(|p| nonlinear::deadzone(&p[0], -0.5, 0.7)),
            scalar_op(|v| v - v.clamp(-0.5, 0.7)),
        ),
        ("relu", 1, 1, Box::new(|p| nonlinear::relu(&p[0])), scalar_op(|v| v.max(0.0))),
    ];
    let mut total = 0;
    let count = ops.len() + 2;
    for (i, (name, arity, dim, set, point)) in ops.into_iter().enumerate() {
        total += op_inclusion(name, arity, dim, set, point, 100 + i as u64)?;
    }
    total += shifted_inclusion("log", ScalarFn::Log, f64::ln, 200)?;
    total += shifted_inclusion("sqrt", ScalarFn::Sqrt, f64::sqrt, 201)?;
    lines.push(format!("{count} operators, {total} samples"));

    let reach = [
        ("van der pol", ModelKind::VanDerPol, 0.005, 1360, 50, vec![iv(1.23, 1.57), iv(2.34, 2.46)]),
        (
            "traffic",
            ModelKind::Traffic,
            1.0,
            30,
            20,
            vec![iv(150.0, 200.0), iv(180.0, 300.0), iv(100.0, 220.0)],
        ),
        ("lotka reach", ModelKind::LotkaVolterra, 0.15, 5, 50, vec![enc(15.0, 1.0, 3), enc(15.0, 1.0, 3)]),
    ];
    for (label, model, h, steps, order, initial) in reach {
        let start = Instant::now();
        let s = Scenario::from_config(config(model, h, steps, order, initial)).map_err(|e| e.to_string())?;
        let r = s.run().map_err(|e| format!("{label}: {e}"))?;
        let mut queries = vec![("global", CellQuery::default())];
        if model == ModelKind::LotkaVolterra {
            let red = r
                .cell(&[&[true, false, true], &[false, false, true]])
                .map_err(|e| e.to_string())?;
            let green = r.cell(&[&[false], &[true, false]]).map_err(|e| e.to_string())?;
            queries.push(("red cell", red));
            queries.push(("green cells", green));
        }
        for (qname, q) in &queries {
            let rep = s.mc_check(&r.states, q, 1000, 11).map_err(|e| e.to_string())?;
            ensure(rep.passed() && rep.samples >= 1000, || format!("{label} {qname}: {rep:?}"))?;
        }
        let t = start.elapsed();
        ensure(t < Duration::from_secs(120), || format!("{label} took {t:?}"))?;
        lines.push(format!("{label} {} x 1000 samples in {:.2} s", queries.len(), t.as_secs_f64()));
    }

    for (q, g) in [(50, 0), (50, 2), (100, 0), (100, 2)] {
        let start = Instant::now();
        let (s, reference, run) = filter_run(q, g)?;
        let rep = s.mc_check(&run, &reference, 1000, 13);
        ensure(rep.passed() && rep.samples >= 1000, || format!("filter q={q} g={g}: {rep:?}"))?;
        let t = start.elapsed();
        ensure(t < Duration::from_secs(120), || format!("filter q={q} g={g} took {t:?}"))?;
        lines.push(format!("filter q={q} g={g} 1000 samples in {:.2} s", t.as_secs_f64()));
    }
    Ok(lines.join("; "))
}

/// Inclusion check for a function defined on positive reals, applied to a
/// random operand shifted onto `[0.05, ...]`.
fn shifted_inclusion(name: &str, f: ScalarFn, point: fn(f64) -> f64, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = 0;
    for _ in 0..20 {
        let mut pool = symbols::fresh(2, SymbolType::Interval);
        pool.extend(symbols::fresh(2, SymbolType::Signed));
        let operand = random_poly(&mut rng, 1, &pool);
        let shifted = operand.add_scalar(0.05 - operand.box_hull().lo()[0]);
        let hull = nonlinear::apply_scalar(&f, &shifted)
            .map_err(|e| format!("{name}: {e}"))?
            .box_hull();
        for _ in 0..50 {
            let values = random_valuation(&mut rng, &pool);
            let y = point(shifted.evaluate(&values).expect("pool covers operand")[0]);
            ensure(hull.contains(&[y], 1e-9), || format!("{name}: {y} outside {hull:?}"))?;
            samples += 1;
        }
    }
    Ok(samples)
}

fn iv(lo: f64, hi: f64) -> InitialSpec {
    InitialSpec::Interval([lo, hi])
}

fn enc(center: f64, radius: f64, level: u32) -> InitialSpec {
    InitialSpec::Encode(EncodeSpec {
        center,
        radius,
        level,
        flavor: Flavor::Signed,
    })
}

fn config(model: ModelKind, h: f64, steps: usize, order: usize, initial: Vec<InitialSpec>) -> ScenarioConfig {
    ScenarioConfig {
        name: format!("{model:?}"),
        dim: model.dim(),
        h,
        steps,
        order,
        initial,
        model,
        params: Default::default(),
        seed: 1,
        mc_samples: 1000,
    }
}

fn filter_run(q: usize, g: u32) -> Result<(FilterScenario, polynotope_core::reach::Measurements, FilterRun), String> {
    let cfg = config(ModelKind::LotkaFilter, 0.04, 750, q, vec![enc(15.0, 10.0, g), enc(15.0, 10.0, g)]);
    let s = FilterScenario::from_config(cfg).map_err(|e| e.to_string())?;
    let reference = s.euler_reference(1);
    let run = s.run(&reference.y).map_err(|e| format!("filter q={q} g={g}: {e}"))?;
    ensure(run.states.len() == 751, || format!("{} filter states", run.states.len()))?;
    Ok((s, reference, run))
}

fn enclosure_tightness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = 10_000;
    let mut worst_gap: f64 = 0.0;
    for (f, lo_range, max_width) in [
        (ConvexFn::Exp, (-2.0, 2.0), 2.0),
        (ConvexFn::Log, (0.1, 5.0), 5.0),
        (ConvexFn::Sqrt, (0.0, 10.0), 10.0),
    ] {
        for b in 0..100 {
            let lo: f64 = rng.random_range(lo_range.0..lo_range.1);
            let hi = lo + rng.random_range(1e-3..max_width);
            let e = enclose_c1(&f, lo, hi).map_err(|e| e.to_string())?;
            let (yl, yu) = (f.eval(lo), f.eval(hi));
            let (ymid, yrad) = ((yu + yl) / 2.0, (yu - yl) / 2.0);
            let r_star = 2.0 * (e.g0 - ymid);
            let (rmin, rmax) = (r_star.min(0.0), r_star.max(0.0));
            let (mid, rad) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
            let mut extreme: f64 = 0.0;
            for i in 0..=grid {
                let d = -1.0 + 2.0 * i as f64 / grid as f64;
                let r = f.eval(mid + rad * d) - ymid - yrad * d;
                ensure(r >= rmin - 1e-12 && r <= rmax + 1e-12, || {
                    format!("{f:?} box {b} [{lo}, {hi}]: r({d}) = {r} outside [{rmin}, {rmax}]")
                })?;
                extreme = extreme.max(r.abs());
            }
            let gap = r_star.abs() - extreme;
            worst_gap = worst_gap.max(gap);
            ensure(gap <= 1e-6 * (1.0 + r_star.abs()), || format!("{f:?} box {b}: remainder bound not attained ({gap})"))?;
        }
    }
    for b in 0..100 {
        let lo = -f64::from(rng.random_range(1..=64u32)) / 8.0;
        let hi = f64::from(rng.random_range(1..=64u32)) / 8.0;
        let e = enclose_abs(lo, hi).map_err(|e| e.to_string())?;
        let (_, upper_lo) = e.slice(-1.0);
        let (_, upper_hi) = e.slice(1.0);
        ensure(upper_lo == lo.abs() && upper_hi == hi.abs(), || {
            format!("abs box {b} [{lo}, {hi}]: upper hull {upper_lo}, {upper_hi}")
        })?;
        let mid = (lo + hi) / 2.0;
        let rad = (hi - lo) / 2.0;
        for i in 0..=1000 {
            let d = -1.0 + 2.0 * f64::from(i) / 1000.0;
            let (l, u) = e.slice(d);
            let v = (mid + rad * d).abs();
            ensure(v >= l - 1e-12 && v <= u + 1e-12, || format!("abs box {b}: |x({d})| = {v} outside [{l}, {u}]"))?;
        }
    }
    Ok(format!(
        "300 convex/concave boxes on 10^4-point grids, bound attained within {worst_gap:.1e}; 100 abs boxes touch at both endpoints"
    ))
}

fn encoding_partition() -> Outcome {
    let mut cases = 0;
    for flavor in [Flavor::Signed, Flavor::Boolean] {
        for n in 0..=4u32 {
            for (lo, hi) in [(14.0, 16.0), (-3.0, 5.0), (0.0, 1.0)] {
                let e = encode(EncodingSpec::new(n, flavor), lo, hi).map_err(|e| e.to_string())?;
                let mut cells = Vec::new();
                for code in 0..1u32 << n {
                    let values: HashMap<SymbolId, f64> = e
                        .discrete
                        .iter()
                        .enumerate()
                        .map(|(j, id)| (*id, flavor.value(code >> (n as usize - 1 - j) & 1 == 1)))
                        .collect();
                    let h = e.poly.substitute(&values).map_err(|e| e.to_string())?.box_hull();
                    cells.push((h.lo()[0], h.hi()[0]));
                }
                cells.sort_by(|a, b| a.0.total_cmp(&b.0));
                let width = (hi - lo) * 0.5f64.powi(n as i32);
                ensure(cells[0].0 == lo && cells[cells.len() - 1].1 == hi, || format!("{flavor:?} n={n}: ends {cells:?}"))?;
                ensure(cells.windows(2).all(|w| w[0].1 == w[1].0), || format!("{flavor:?} n={n}: gap in {cells:?}"))?;
                ensure(cells.iter().all(|c| c.1 - c.0 == width), || format!("{flavor:?} n={n}: widths {cells:?}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} encodings, all cells adjacent with exact dyadic widths"))
}

fn filter_degrees() -> Outcome {
    let mut parts = Vec::new();
    for q in [50, 100] {
        let (_, _, run) = filter_run(q, 2)?;
        let max = run.states.iter().map(Polynotope::max_degree).max().unwrap_or(0);
        ensure(max <= 4, || format!("g=2 q={q}: max degree {max}"))?;
        parts.push(format!("g=2 q={q} max degree {max}"));
    }
    for q in [50, 100] {
        let (_, _, run) = filter_run(q, 0)?;
        let max = run.states.iter().map(Polynotope::max_degree).max().unwrap_or(0);
        if q == 50 {
            ensure(max >= 6, || format!("g=0 q=50: max degree only {max}"))?;
        }
        parts.push(format!("g=0 q={q} max degree {max}"));
    }
    Ok(parts.join(", "))
}
