//! Scenario runners. Each produces a [`TimeSeries`] plus summary lines.

use std::f64::consts::PI;

use dotspin::analysis::oscillation_period;
use dotspin::optimizer::{gamma_opt, rate_scale, scan_optimum, tau_inv_sq_pure, PureStateParam, ScanGrid};
use dotspin::oracle::{BathState, FullSystem, OracleMode};
use dotspin::series::linspace;
use dotspin::{
    BathDistribution, CommonBathSystem, Complex64, Moment, NamedState, SeparateBathSystem, TimeSeries, TwoQubitState,
};
use rayon::prelude::*;

use crate::config::{OracleKind, Plan, ScenarioKind};
use crate::error::CliError;

pub struct Outcome {
    pub series: TimeSeries,
    pub summary: Vec<String>,
    /// Set when a numerical assertion of the scenario failed.
    pub failure: Option<String>,
}

const STATE_COLUMNS: [&str; 18] = [
    "t",
    "p_a_x",
    "p_a_y",
    "p_a_z",
    "p_b_x",
    "p_b_y",
    "p_b_z",
    "pi_xx",
    "pi_xy",
    "pi_xz",
    "pi_yx",
    "pi_yy",
    "pi_yz",
    "pi_zx",
    "pi_zy",
    "pi_zz",
    "decoherence",
    "concurrence",
];

fn state_row(t: f64, s: &TwoQubitState) -> Vec<f64> {
    let mut row = vec![t];
    row.extend(s.p_a.iter());
    row.extend(s.p_b.iter());
    for m in 0..3 {
        for n in 0..3 {
            row.push(s.pi[(m, n)]);
        }
    }
    row.push(s.decoherence());
    row.push(s.concurrence());
    row
}

fn series<S: Into<String>>(plan: &Plan, columns: impl IntoIterator<Item = S>, bath: &BathDistribution) -> Result<TimeSeries, CliError> {
    let mut ts = TimeSeries::new(columns)?;
    ts.set_meta("scenario", plan.kind.name());
    ts.set_meta("version", env!("CARGO_PKG_VERSION"));
    ts.set_meta("k_a", plan.couplings.k_a);
    ts.set_meta("k_b", plan.couplings.k_b);
    ts.set_meta("j", plan.couplings.j);
    ts.set_meta("bath_n", plan.bath.n);
    ts.set_meta("bath_distribution", plan.bath.name());
    ts.set_meta("moment_casimir", bath.moment(Moment::Casimir));
    ts.set_meta("moment_spin_squared", bath.moment(Moment::SpinSquared));
    ts.set_meta("time_unit", "1/Kbar with Kbar = (k_a + k_b)/2, hbar = 1");
    Ok(ts)
}

fn times(plan: &Plan) -> Vec<f64> {
    linspace(plan.time.t_max, plan.time.samples)
}

fn push_rows(ts: &mut TimeSeries, rows: Vec<Vec<f64>>) -> Result<(), CliError> {
    for row in rows {
        ts.push(row)?;
    }
    Ok(())
}

pub fn run(plan: &Plan) -> Result<Outcome, CliError> {
    match plan.kind {
        ScenarioKind::Separate => separate(plan),
        ScenarioKind::CommonSymmetric | ScenarioKind::CommonAsymmetric => common(plan),
        ScenarioKind::Optimize => optimize(plan),
        ScenarioKind::OracleCompare => oracle_compare(plan),
        ScenarioKind::Fig(1) => fig1(plan),
        ScenarioKind::Fig(2) => fig2(plan),
        ScenarioKind::Fig(3) => fig3(plan),
        ScenarioKind::Fig(4) => fig4(plan),
        ScenarioKind::Fig(5) => fig5(plan),
        ScenarioKind::Fig(_) => fig6(plan),
    }
}

fn done(series: TimeSeries, summary: Vec<String>) -> Result<Outcome, CliError> {
    Ok(Outcome { series, summary, failure: None })
}

fn separate(plan: &Plan) -> Result<Outcome, CliError> {
    let bath = plan.bath.build()?;
    let c = plan.couplings;
    let sys = SeparateBathSystem::new(c.k_a, c.k_b, bath.clone(), bath.clone())?;
    let s0 = plan.state.state()?;
    let mut ts = series(plan, STATE_COLUMNS, &bath)?;
    ts.set_meta("state", &plan.state_label);
    let mut summary = Vec::new();
    let p0 = s0.p_a.norm();
    if c.k_a == c.k_b && s0.is_pure(1e-10) && (p0 - s0.p_b.norm()).abs() < 1e-10 {
        let tau = sys.tau_d(p0)?;
        ts.set_meta("tau_d", tau);
        summary.push(format!("tau_D = {tau}"));
    }
    let rows = times(plan).par_iter().map(|&t| state_row(t, &sys.evolve(&s0, t))).collect();
    push_rows(&mut ts, rows)?;
    done(ts, summary)
}

fn common(plan: &Plan) -> Result<Outcome, CliError> {
    let bath = plan.bath.build()?;
    let c = plan.couplings;
    let sys = CommonBathSystem::new(c.k_a, c.k_b, c.j, bath.clone())?;
    let s0 = plan.state.state()?;
    let mut ts = series(plan, STATE_COLUMNS, &bath)?;
    ts.set_meta("state", &plan.state_label);
    let mut summary = Vec::new();
    if s0.is_pure(1e-10) {
        let rate = sys.short_time_rate(&s0)?;
        ts.set_meta("short_time_rate", rate);
        summary.push(format!("1/tau_D^2 = {rate}"));
    }
    let symmetric = plan.kind == ScenarioKind::CommonSymmetric;
    ts.set_meta("method", if symmetric { "closed-form" } else { "sector-exact" });
    let rows: Vec<Result<Vec<f64>, CliError>> = times(plan)
        .par_iter()
        .map(|&t| {
            let s = if symmetric { sys.evolve_symmetric(&s0, t)? } else { sys.evolve_asymmetric(&s0, t) };
            Ok(state_row(t, &s))
        })
        .collect();
    push_rows(&mut ts, rows.into_iter().collect::<Result<_, _>>()?)?;
    done(ts, summary)
}

fn optimize(plan: &Plan) -> Result<Outcome, CliError> {
    let bath = plan.bath.build()?;
    let mut ts = series(
        plan,
        ["delta", "gamma_opt", "rate_opt", "scan_gamma_re", "scan_gamma_im", "scan_theta", "rate_scan"],
        &bath,
    )?;
    let grid = ScanGrid { points: plan.grid_points, ..ScanGrid::default() };
    ts.set_meta("scan_grid_points", grid.points);
    ts.set_meta("rate_unit", "<I^2>(K_A^2 + K_B^2)/3");
    let mut worst: f64 = 0.0;
    let n = plan.delta_points;
    for k in 0..n {
        let delta = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
        let g = gamma_opt(delta);
        let opt = tau_inv_sq_pure(&PureStateParam::new(Complex64::new(g, 0.0), 0.0, 0.0), delta, 1.0);
        let scan = scan_optimum(delta, &grid);
        worst = worst.max((scan.param.gamma.re - g).abs());
        ts.push(vec![delta, g, opt, scan.param.gamma.re, scan.param.gamma.im, scan.param.theta, scan.value])?;
    }
    let c = plan.couplings;
    let mut summary = vec![format!("max |scan gamma - gamma_opt| = {worst:e}")];
    if let Ok(delta) = dotspin::optimizer::delta_from_couplings(c.k_a, c.k_b) {
        let scale = rate_scale(c.k_a, c.k_b, bath.moment(Moment::Casimir));
        let g = gamma_opt(delta);
        let rate = tau_inv_sq_pure(&PureStateParam::new(Complex64::new(g, 0.0), 0.0, 0.0), delta, scale);
        ts.set_meta("config_delta", delta);
        ts.set_meta("config_gamma_opt", g);
        ts.set_meta("config_rate_opt", rate);
        summary.push(format!("configured couplings: delta = {delta}, gamma_opt = {g}, 1/tau^2 = {rate}"));
    }
    ts.set_meta("max_gamma_deviation", worst);
    done(ts, summary)
}

fn oracle_compare(plan: &Plan) -> Result<Outcome, CliError> {
    let c = plan.couplings;
    let n = plan.bath.n as usize;
    let s0 = plan.state.state()?;
    let times = times(plan);
    let (oracle, model_traj, bath) = match plan.oracle_kind {
        OracleKind::Common => {
            let bath = plan.bath.build()?;
            let oracle = FullSystem::new(OracleMode::Common { k_a: c.k_a, k_b: c.k_b, j: c.j }, n)?;
            let model = CommonBathSystem::new(c.k_a, c.k_b, c.j, bath.clone())?;
            (oracle, model.trajectory(&s0, &times), bath)
        }
        OracleKind::Separate => {
            let half = BathDistribution::unpolarized_exact(plan.bath.n / 2)?;
            let oracle = FullSystem::new(OracleMode::Separate { k_a: c.k_a, k_b: c.k_b, n_a: n / 2 }, n)?;
            let model = SeparateBathSystem::new(c.k_a, c.k_b, half.clone(), half.clone())?;
            let traj = times.par_iter().map(|&t| model.evolve(&s0, t)).collect();
            (oracle, traj, half)
        }
    };
    let oracle_traj = oracle.trajectory(&s0, BathState::FullyMixed, &times)?;
    let mut ts = series(plan, ["t", "max_deviation", "decoherence_oracle", "decoherence_model"], &bath)?;
    ts.set_meta("state", &plan.state_label);
    ts.set_meta("oracle_mode", if plan.oracle_kind == OracleKind::Common { "common" } else { "separate" });
    ts.set_meta("oracle_dimension", oracle.dim());
    ts.set_meta("tolerance", plan.tolerance);
    let mut worst: f64 = 0.0;
    for ((t, o), m) in times.iter().zip(&oracle_traj).zip(&model_traj) {
        let dev = o.max_abs_diff(m);
        worst = worst.max(dev);
        ts.push(vec![*t, dev, o.decoherence(), m.decoherence()])?;
    }
    ts.set_meta("max_deviation", worst);
    let summary = vec![format!("max deviation {worst:e} (tolerance {:e})", plan.tolerance)];
    let failure = (worst > plan.tolerance || worst.is_nan())
        .then(|| format!("oracle deviation {worst:e} exceeds tolerance {:e}", plan.tolerance));
    Ok(Outcome { series: ts, summary, failure })
}

fn fig1(plan: &Plan) -> Result<Outcome, CliError> {
    let bath = plan.bath.build()?;
    let c = plan.couplings;
    let sys = SeparateBathSystem::new(c.k_a, c.k_b, bath.clone(), bath.clone())?;
    // (|up,down> + r|down,up>) has C = 2r/(1 + r^2)
    let rs = [0.0, 1.0 / 3.0, 0.5, 1.0];
    let states: Vec<TwoQubitState> =
        rs.iter().map(|&r| NamedState::UpDownSuperposition { r }.state()).collect::<Result<_, _>>()?;
    let mut columns = vec!["t".to_string()];
    for s in &states {
        columns.push(format!("purity_c{:.1}", s.concurrence()));
    }
    columns.push("concurrence_c1.0".into());
    let mut ts = series(plan, columns, &bath)?;
    ts.set_meta("states", "|up,down> + r |down,up> with r = 0, 1/3, 1/2, 1");
    let bell = &states[3];
    let mut summary = Vec::new();
    if let Some(t_sd) = sys.sudden_death_time(bell, plan.time.t_max, plan.time.samples)? {
        ts.set_meta("sudden_death_time", t_sd);
        summary.push(format!("Bell-state concurrence vanishes at t = {t_sd}"));
    }
    let rows = times(plan)
        .par_iter()
        .map(|&t| {
            let mut row = vec![t];
            row.extend(states.iter().map(|s| sys.evolve(s, t).purity()));
            row.push(sys.evolve(bell, t).concurrence());
            row
        })
        .collect();
    push_rows(&mut ts, rows)?;
    done(ts, summary)
}

fn common_system(plan: &Plan) -> Result<(CommonBathSystem, BathDistribution), CliError> {
    let bath = plan.bath.build()?;
    let c = plan.couplings;
    Ok((CommonBathSystem::new(c.k_a, c.k_b, c.j, bath.clone())?, bath))
}

fn common_trajectory(plan: &Plan, sys: &CommonBathSystem) -> Result<(Vec<f64>, Vec<TwoQubitState>), CliError> {
    let s0 = plan.state.state()?;
    let times = times(plan);
    let traj = sys.trajectory(&s0, &times);
    Ok((times, traj))
}

fn fig2(plan: &Plan) -> Result<Outcome, CliError> {
    let (sys, bath) = common_system(plan)?;
    let mut ts = series(plan, ["t", "p_a_z", "pi_xx", "pi_zz", "pi_xy", "concurrence"], &bath)?;
    ts.set_meta("state", &plan.state_label);
    let (times, traj) = common_trajectory(plan, &sys)?;
    let start = plan.time.t_max / 4.0;
    let (late_t, late_p): (Vec<f64>, Vec<f64>) =
        times.iter().zip(&traj).filter(|(t, _)| **t >= start).map(|(t, s)| (*t, s.p_a[2])).unzip();
    let mut summary = Vec::new();
    let bound = late_p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ts.set_meta("late_window_start", start);
    ts.set_meta("late_max_abs_p_a_z", bound);
    summary.push(format!("max |P^z_A| for t >= {start}: {bound}"));
    let c = plan.couplings;
    if let Some(period) = oscillation_period(&late_t, &late_p)? {
        ts.set_meta("measured_period", period);
        if c.j != 0.0 {
            ts.set_meta("period_2pi_over_j", 2.0 * PI / c.j);
        }
        summary.push(format!("measured P^z_A period {period} (2 pi/J = {})", 2.0 * PI / c.j));
    }
    let k_bar = 0.5 * (c.k_a + c.k_b);
    if c.j != k_bar {
        ts.set_meta("period_2pi_over_j_minus_kbar", 2.0 * PI / (c.j - k_bar).abs());
    }
    for (t, s) in times.iter().zip(&traj) {
        ts.push(vec![*t, s.p_a[2], s.pi[(0, 0)], s.pi[(2, 2)], s.pi[(0, 1)], s.concurrence()])?;
    }
    done(ts, summary)
}

fn fig3(plan: &Plan) -> Result<Outcome, CliError> {
    let (sys, bath) = common_system(plan)?;
    let mut ts = series(plan, ["t", "D", "D_A"], &bath)?;
    ts.set_meta("state", &plan.state_label);
    ts.set_meta("D_A", "(1 - |P_A|^2)/2, single-qubit linear entropy");
    let (times, traj) = common_trajectory(plan, &sys)?;
    for (t, s) in times.iter().zip(&traj) {
        ts.push(vec![*t, s.decoherence(), 0.5 * (1.0 - s.p_a.norm_squared())])?;
    }
    done(ts, Vec::new())
}

fn fig4(plan: &Plan) -> Result<Outcome, CliError> {
    let (sys, bath) = common_system(plan)?;
    let mut ts = series(plan, ["t", "pi_xx", "pi_zz", "concurrence", "D"], &bath)?;
    ts.set_meta("state", &plan.state_label);
    let mut summary = Vec::new();
    if sys.is_symmetric() {
        let (xx, zz) = sys.transverse_longitudinal_rates()?;
        ts.set_meta("rate_xx", xx);
        ts.set_meta("rate_zz", zz);
        summary.push(format!("short-time Pi^xx, Pi^zz coefficients {xx}, {zz}"));
    }
    let (times, traj) = common_trajectory(plan, &sys)?;
    for (t, s) in times.iter().zip(&traj) {
        ts.push(vec![*t, s.pi[(0, 0)], s.pi[(2, 2)], s.concurrence(), s.decoherence()])?;
    }
    done(ts, summary)
}

fn fig5(plan: &Plan) -> Result<Outcome, CliError> {
    let bath = plan.bath.build()?;
    let c = plan.couplings;
    let js = [0.0, c.j];
    let systems: Vec<CommonBathSystem> =
        js.iter().map(|&j| CommonBathSystem::new(c.k_a, c.k_b, j, bath.clone())).collect::<Result<_, _>>()?;
    let rs = [0.5, -0.5];
    let mut columns = vec!["t".to_string()];
    for j in js {
        for r in rs {
            columns.push(format!("D_r{r}_J{j}"));
        }
    }
    let mut ts = series(plan, columns, &bath)?;
    ts.set_meta("states", "singlet/triplet superposition with r = 0.5, -0.5");
    ts.set_meta("large_j_ratio", systems[1].large_j_ratio());
    let rows = times(plan)
        .par_iter()
        .map(|&t| {
            let mut row = vec![t];
            for sys in &systems {
                for r in rs {
                    let rho = sys.bell_class_coefficients(r, t).density();
                    row.push(rho.polarizations().decoherence());
                }
            }
            row
        })
        .collect();
    push_rows(&mut ts, rows)?;
    done(ts, Vec::new())
}

fn fig6(plan: &Plan) -> Result<Outcome, CliError> {
    let bath = plan.bath.build()?;
    let mut ts = series(plan, ["delta", "separable", "singlet", "triplet", "optimal", "gamma_opt"], &bath)?;
    ts.set_meta("rate_unit", "<I^2>(K_A^2 + K_B^2)/3");
    let real = |g: f64| PureStateParam::new(Complex64::new(g, 0.0), 0.0, 0.0);
    let n = plan.delta_points;
    let mut ordered = true;
    for k in 0..n {
        let d = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
        let g = gamma_opt(d);
        let row = vec![
            d,
            tau_inv_sq_pure(&real(0.0), d, 1.0),
            tau_inv_sq_pure(&real(1.0), d, 1.0),
            tau_inv_sq_pure(&real(-1.0), d, 1.0),
            tau_inv_sq_pure(&real(g), d, 1.0),
            g,
        ];
        ordered &= row[4] <= row[1].min(row[2]).min(row[3]) + 1e-15;
        ts.push(row)?;
    }
    ts.set_meta("optimal_is_lowest", ordered);
    let failure = (!ordered).then(|| "optimal curve exceeds a named curve".to_string());
    Ok(Outcome { series: ts, summary: vec![format!("optimal curve lowest everywhere: {ordered}")], failure })
}
