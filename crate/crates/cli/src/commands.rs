//! One adapter per subcommand: call the library, lay the result out as tables.

use homoclinic::oracle::IntegratorConfig;
use homoclinic::{
    build_orbits, level_set_consistency, portrait, solve_equilibria, sweep, three_root_condition, Branch, PortraitGrid,
    SweepAxis, SweepSpec, SystemParams, VerifyConfig,
};

use crate::config::{BranchSel, Command, RunConfig};
use crate::output::{Cell, Table};
use crate::{CliError, EXIT_NONEXISTENCE, EXIT_OK, EXIT_VERIFY};

/// What a command produced: data tables, lines for stderr, and the exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub code: i32,
}

fn params_meta(t: &mut Table, p: &SystemParams) {
    t.meta("A", p.amp_a).meta("B", p.amp_b).meta("J", p.detuning).meta("gamma", p.gamma).meta("C", p.nonlinearity);
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Equilibria => cmd_equilibria(cfg),
        Command::Orbit => cmd_orbit(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Portrait => cmd_portrait(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}

pub fn cmd_equilibria(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let eqs = solve_equilibria(p)?;
    let mut t =
        Table::new(&["a", "b", "rho", "theta", "eig1_re", "eig1_im", "eig2_re", "eig2_im", "class", "residual"]);
    t.meta("command", "equilibria");
    params_meta(&mut t, p);
    t.meta("D", p.derived_d()).meta("three_root_condition", three_root_condition(p)).meta("count", eqs.len());
    for e in &eqs {
        let [l1, l2] = e.eigenvalues;
        t.push(vec![
            e.cart.a.into(),
            e.cart.b.into(),
            e.polar.rho.into(),
            e.polar.theta.into(),
            l1.re.into(),
            l1.im.into(),
            l2.re.into(),
            l2.im.into(),
            e.stability.to_string().into(),
            e.residual.into(),
        ]);
    }
    Ok(Outcome { tables: vec![t], ..Default::default() })
}

pub fn cmd_orbit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let set = build_orbits(p)?;
    let mut out = Outcome::default();
    for &branch in cfg.branch.branches() {
        let Some(orbit) = set.get(branch) else {
            let reason = set
                .omitted
                .iter()
                .find(|(b, _)| *b == branch)
                .map_or_else(|| "not constructed".to_string(), |(_, r)| r.clone());
            if cfg.branch != BranchSel::Both {
                return Err(CliError::new(EXIT_NONEXISTENCE, format!("no {branch} homoclinic orbit: {reason}")));
            }
            out.notes.push(format!("skipping {branch} branch: {reason}"));
            continue;
        };
        let samples = orbit.sample(cfg.t_min, cfg.t_max, cfg.samples)?;
        let mut t = Table::new(&["t", "rho", "theta", "a", "b", "energy_err", "ode_residual"]);
        t.tag = (cfg.branch == BranchSel::Both).then(|| branch.to_string());
        t.meta("command", "orbit");
        params_meta(&mut t, p);
        t.meta("branch", branch.to_string())
            .meta("rho_star", orbit.rho_star)
            .meta("theta_star", orbit.theta_star)
            .meta("q_coeff", orbit.q_coeff)
            .meta("energy", orbit.energy)
            .meta("turning_time", orbit.turning_time())
            .meta("turning_rho", orbit.turning_rho());
        for s in samples {
            t.push(vec![
                s.t.into(),
                s.rho.into(),
                s.theta.into(),
                s.a.into(),
                s.b.into(),
                s.energy_err.into(),
                s.ode_residual.into(),
            ]);
        }
        out.tables.push(t);
    }
    if out.tables.is_empty() {
        return Err(CliError::new(EXIT_NONEXISTENCE, "no homoclinic orbit exists for these parameters"));
    }
    Ok(out)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let vcfg = VerifyConfig {
        seed: cfg.seed,
        t_min: cfg.t_min,
        t_max: cfg.t_max,
        samples: cfg.samples,
        integrator: IntegratorConfig { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, ..Default::default() },
        rho_star_scale: cfg.rho_star_scale,
        branch: match cfg.branch {
            BranchSel::Lower => Some(Branch::Lower),
            BranchSel::Upper => Some(Branch::Upper),
            BranchSel::Both => None,
        },
        ..Default::default()
    };
    let rep = homoclinic::verify(p, &vcfg)?;
    let mut t = Table::new(&["check", "value", "tolerance", "passed"]);
    t.meta("command", "verify");
    params_meta(&mut t, p);
    t.meta("seed", rep.seed)
        .meta("rho_star", rep.rho_star)
        .meta("rho_star_scale", rep.rho_star_scale)
        .meta("passed", rep.passed);
    let mut notes = Vec::new();
    for (b, reason) in &rep.omitted {
        t.meta(&format!("omitted_{b}"), reason.clone());
        notes.push(format!("skipped {b} branch: {reason}"));
    }
    for c in &rep.checks {
        t.push(vec![c.name.clone().into(), c.value.into(), c.tolerance.into(), c.passed.into()]);
        notes.push(format!(
            "{} {:<32} {:>12.3e} < {:.0e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        ));
    }
    let failed = rep.failures().count();
    notes.push(if failed == 0 {
        format!("verify: all {} checks passed", rep.checks.len())
    } else {
        format!("verify: {failed} of {} checks failed", rep.checks.len())
    });
    Ok(Outcome { tables: vec![t], notes, code: if rep.passed { EXIT_OK } else { EXIT_VERIFY } })
}

pub fn cmd_portrait(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let (a_min, a_max, b_min, b_max) = cfg.portrait_bounds();
    let grid = PortraitGrid { nx: cfg.grid_nx, ny: cfg.grid_ny, a_min, a_max, b_min, b_max };
    let pt = portrait(p, &grid)?;
    let mut t = Table::new(&["a", "b", "h", "da", "db"]);
    t.meta("command", "portrait");
    params_meta(&mut t, p);
    t.meta("nx", grid.nx)
        .meta("ny", grid.ny)
        .meta("a_min", a_min)
        .meta("a_max", a_max)
        .meta("b_min", b_min)
        .meta("b_max", b_max)
        .meta("saddle_level", pt.saddle_level)
        .meta("saddle_a", pt.saddle.map(|s| s.a))
        .meta("saddle_b", pt.saddle.map(|s| s.b));
    let mut notes = Vec::new();
    if let Ok(set) = build_orbits(p) {
        if let Ok(chk) = level_set_consistency(&pt, &set) {
            t.meta("level_set_consistent", chk.consistent);
            if !chk.consistent {
                let mut bad: Vec<String> = chk.lobes.iter().filter(|l| !l.ok).map(|l| l.branch.to_string()).collect();
                if !chk.passes_through_saddle {
                    bad.insert(0, "saddle".into());
                }
                notes.push(format!(
                    "note: level-set check failed for {} on this grid; widen --bounds to include both lobes",
                    bad.join(" and ")
                ));
            }
        }
    }
    for r in &pt.rows {
        t.push(vec![r.a.into(), r.b.into(), r.h.into(), r.da.into(), r.db.into()]);
    }
    Ok(Outcome { tables: vec![t], notes, code: EXIT_OK })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let x = SweepAxis { param: cfg.sweep_x, min: cfg.bounds[0], max: cfg.bounds[1], n: cfg.grid_nx };
    let y = cfg.sweep_y.map(|param| SweepAxis { param, min: cfg.bounds[2], max: cfg.bounds[3], n: cfg.grid_ny });
    let spec = SweepSpec { base: cfg.params, x, y };
    let cells = sweep(&spec).map_err(|e| CliError::config(e.to_string()))?;
    let mut t =
        Table::new(&["ix", "iy", "x", "y", "D", "condition", "equilibrium_count", "saddle", "lower", "upper", "error"]);
    t.meta("command", "sweep");
    params_meta(&mut t, &cfg.params);
    t.meta("x_param", x.param.to_string()).meta("x_min", x.min).meta("x_max", x.max).meta("nx", x.n);
    if let Some(y) = y {
        t.meta("y_param", y.param.to_string()).meta("y_min", y.min).meta("y_max", y.max).meta("ny", y.n);
    }
    for c in cells {
        t.push(vec![
            c.ix.into(),
            c.iy.into(),
            c.x.into(),
            c.y.into(),
            c.d.into(),
            c.condition.into(),
            c.equilibrium_count.into(),
            c.saddle.into(),
            c.lower.into(),
            c.upper.into(),
            Cell::from(c.error),
        ]);
    }
    Ok(Outcome { tables: vec![t], ..Default::default() })
}
