use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use polynotope_core::logic::{adder, gate, GateKind};
use polynotope_core::reach::{cell_hull, CellQuery, FilterScenario, McReport, ModelKind, Scenario, ScenarioConfig};
use polynotope_core::symbols::{self, SymbolId};
use polynotope_core::{Error, Flavor, Polynotope};

use crate::args::{AdderArgs, Cli, Command, DumpArgs, GatesArgs, ReachArgs, ScenarioArgs};
use crate::emit;

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Reach(a) => reach(&a),
        Command::Filter(a) => filter(&a),
        Command::Adder(a) => adder_cmd(&a),
        Command::Gates(a) => gates(&a),
        Command::Dump(a) => dump(&a),
    }
}

struct Overrides {
    steps: Option<usize>,
    dt: Option<f64>,
    order: Option<usize>,
    level: Option<u32>,
    seed: Option<u64>,
}

fn load_config(path: &Path, o: Overrides) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(n) = o.steps {
        cfg.steps = n;
    }
    if let Some(h) = o.dt {
        cfg.h = h;
    }
    if let Some(q) = o.order {
        cfg.order = q;
    }
    if let Some(g) = o.level {
        cfg.set_level(g);
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn scenario_config(a: &ScenarioArgs) -> Result<ScenarioConfig> {
    load_config(
        &a.config,
        Overrides {
            steps: a.steps,
            dt: a.dt,
            order: a.order,
            level: a.level,
            seed: a.seed,
        },
    )
}

/// Progress and reports go to standard output unless it carries the trace.
fn say(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn describe(report: &McReport) -> String {
    let mut s = format!(
        "containment: {} samples, {} checks, {} violations, worst excess {:.3e}",
        report.samples, report.checks, report.violations, report.worst_excess
    );
    if let Some(v) = &report.first {
        let _ = write!(
            s,
            " (first: sample {} step {} state {}: {} outside [{}, {}])",
            v.sample, v.step, v.state, v.value, v.lo, v.hi
        );
    }
    s
}

fn parse_cell(spec: &str) -> Result<Vec<Vec<bool>>> {
    spec.split(',')
        .map(|part| CellQuery::parse_signs(part.trim()).map_err(Into::into))
        .collect()
}

fn reach(a: &ReachArgs) -> Result<()> {
    let s = &a.scenario;
    let cfg = scenario_config(s)?;
    if cfg.model == ModelKind::LotkaFilter {
        return Err(Error::Config("lotka_filter configs run with the filter subcommand".into()).into());
    }
    let scenario = Scenario::from_config(cfg)?;
    let start = Instant::now();
    let run = scenario.run()?;
    let elapsed = start.elapsed();
    let query = match &a.cell {
        Some(spec) => {
            let signs = parse_cell(spec)?;
            if signs.len() > run.encodings.len() {
                return Err(Error::Config(format!("cell has {} entries for {} states", signs.len(), run.encodings.len())).into());
            }
            let slices: Vec<&[bool]> = signs.iter().map(Vec::as_slice).collect();
            run.cell(&slices)?
        }
        None => CellQuery::default(),
    };
    let hulls = run
        .states
        .iter()
        .map(|x| cell_hull(x, &query))
        .collect::<polynotope_core::Result<Vec<_>>>()?;
    emit::write_output(s.out.as_deref(), &emit::reach_csv(&hulls, &run.states, scenario.config.dim))?;
    let loud = s.out.is_some();
    if s.census {
        let last = run.states.last().expect("at least the initial state");
        say(loud, &format!("monomials: {}", last.monomial_count()));
        say(loud, &format!("time: {:.3} s", elapsed.as_secs_f64()));
    }
    if s.verify || s.mc.is_some() {
        let samples = s.mc.unwrap_or(scenario.config.mc_samples);
        let report = scenario.mc_check(&run.states, &query, samples, scenario.config.seed)?;
        say(loud, &describe(&report));
        if !report.passed() {
            bail!("containment check failed");
        }
    }
    Ok(())
}

fn filter(s: &ScenarioArgs) -> Result<()> {
    let cfg = scenario_config(s)?;
    let seed = cfg.seed;
    let scenario = FilterScenario::from_config(cfg)?;
    let truth = scenario.heun_truth(seed);
    let start = Instant::now();
    let run = scenario.run(&truth.y)?;
    let elapsed = start.elapsed();
    let mut csv = emit::filter_header(2);
    csv.push('\n');
    for (k, x) in run.states.iter().enumerate() {
        csv.push_str(&emit::filter_row(k, x, truth.states[k].as_slice(), truth.y.get(k).copied()));
        csv.push('\n');
    }
    emit::write_output(s.out.as_deref(), &csv)?;
    let loud = s.out.is_some();
    if s.census {
        let last = run.states.last().expect("at least the initial state");
        let degree = run.states.iter().map(Polynotope::max_degree).max().unwrap_or(0);
        say(loud, &format!("monomials: {}", last.monomial_count()));
        say(loud, &format!("max degree: {degree}"));
        say(loud, &format!("time: {:.3} s", elapsed.as_secs_f64()));
    }
    if s.verify || s.mc.is_some() {
        let heun = scenario.check_trajectory(&run, &truth.states);
        say(loud, &format!("heun truth {}", describe(&heun)));
        if !heun.passed() {
            log::warn!("the Heun trajectory left the estimate; it is not a trajectory of the Euler filter model");
        }
        let samples = s.mc.unwrap_or(scenario.config.mc_samples);
        let reference = scenario.euler_reference(seed);
        let model_run = scenario.run(&reference.y)?;
        let report = scenario.mc_check(&model_run, &reference, samples, seed.wrapping_add(1));
        say(loud, &format!("model-consistent {}", describe(&report)));
        if !report.passed() || report.samples < samples {
            bail!("containment check failed");
        }
    }
    Ok(())
}

fn adder_cmd(a: &AdderArgs) -> Result<()> {
    let flavor: Flavor = a.flavor.into();
    let start = Instant::now();
    let circuit = adder(a.bits, flavor)?;
    let elapsed = start.elapsed();
    println!("monomials: {}", circuit.census());
    if a.census {
        println!("time: {:.3} s", elapsed.as_secs_f64());
    }
    if a.verify {
        if a.bits > 10 {
            bail!("exhaustive verification is limited to 10 bits");
        }
        let n = a.bits;
        for code in 0u64..1 << (2 * n + 1) {
            let bit = |j: usize| code >> j & 1 == 1;
            let mut values: HashMap<SymbolId, f64> = HashMap::new();
            let (mut x, mut y) = (0u64, 0u64);
            for i in 0..n {
                values.insert(circuit.a[i], flavor.value(bit(i)));
                values.insert(circuit.b[i], flavor.value(bit(n + i)));
                x |= u64::from(bit(i)) << i;
                y |= u64::from(bit(n + i)) << i;
            }
            let cin = bit(2 * n);
            values.insert(circuit.carry_in, flavor.value(cin));
            let sum = x + y + u64::from(cin);
            let out = circuit.output.evaluate(&values)?;
            for (i, v) in out.iter().enumerate() {
                if *v != flavor.value(sum >> i & 1 == 1) {
                    bail!("adder output {i} is wrong for input code {code}");
                }
            }
        }
        println!("verified: {} input combinations", 1u64 << (2 * n + 1));
    }
    if let Some(path) = &a.out {
        emit::write_output(Some(path), &(circuit.output.to_json() + "\n"))?;
    }
    Ok(())
}

fn gates(a: &GatesArgs) -> Result<()> {
    let flavors: Vec<Flavor> = match a.flavor {
        Some(f) => vec![f.into()],
        None => vec![Flavor::Signed, Flavor::Boolean],
    };
    let mut out = String::new();
    for flavor in flavors {
        let ids = symbols::fresh(2, flavor.symbol_type());
        let (x, y) = (Polynotope::symbol(ids[0]), Polynotope::symbol(ids[1]));
        let _ = writeln!(out, "# {flavor:?} flavor, a = {:?}, b = {:?}", ids[0], ids[1]);
        for kind in GateKind::ALL {
            let p = match kind.arity() {
                0 | 1 => gate(kind, &x, None, flavor)?,
                _ => gate(kind, &x, Some(&y), flavor)?,
            };
            let table: Vec<String> = [(false, false), (false, true), (true, false), (true, true)]
                .iter()
                .map(|&(va, vb)| u8::from(kind.truth(va, vb)).to_string())
                .collect();
            let _ = writeln!(out, "{:<5} = {}    [ab=00,01,10,11 -> {}]", kind.name(), emit::render_scalar(&p), table.join(""));
        }
    }
    emit::write_output(a.out.as_deref(), &out)
}

fn dump(a: &DumpArgs) -> Result<()> {
    let poly = match (&a.config, &a.input) {
        (_, Some(input)) => {
            let text = std::fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
            Polynotope::from_json(&text)?
        }
        (Some(config), None) => {
            let cfg = load_config(
                config,
                Overrides {
                    steps: a.steps,
                    dt: a.dt,
                    order: a.order,
                    level: a.level,
                    seed: a.seed,
                },
            )?;
            let seed = cfg.seed;
            let states = if cfg.model == ModelKind::LotkaFilter {
                let s = FilterScenario::from_config(cfg)?;
                s.run(&s.heun_truth(seed).y)?.states
            } else {
                Scenario::from_config(cfg)?.run()?.states
            };
            let k = a.at.unwrap_or(states.len() - 1);
            match states.get(k) {
                Some(x) => x.clone(),
                None => return Err(Error::Config(format!("step {k} is beyond the {} computed states", states.len())).into()),
            }
        }
        (None, None) => unreachable!("clap requires --config or --input"),
    };
    emit::write_output(a.out.as_deref(), &(poly.to_json() + "\n"))
}
