//! Scenario configuration: raw TOML shape and its validation into a [`Plan`].

use std::path::{Path, PathBuf};

use dotspin::oracle::MAX_BATH_SPINS;
use dotspin::optimizer::{delta_from_couplings, gamma_opt};
use dotspin::{BathDistribution, CommonBathSystem, Complex64, GaussianVariant, Moment, NamedState, SeparateBathSystem};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<String>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub couplings: RawCouplings,
    pub bath: Option<RawBath>,
    pub state: Option<RawState>,
    pub time: Option<RawTime>,
    #[serde(default)]
    pub optimize: RawOptimize,
    #[serde(default)]
    pub oracle: RawOracle,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCouplings {
    pub k_a: Option<f64>,
    pub k_b: Option<f64>,
    pub j: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBath {
    pub n: Option<u32>,
    pub distribution: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawState {
    pub name: Option<String>,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub gamma_re: Option<f64>,
    pub gamma_im: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTime {
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptimize {
    pub delta_points: Option<usize>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOracle {
    pub mode: Option<String>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Separate,
    CommonSymmetric,
    CommonAsymmetric,
    Optimize,
    OracleCompare,
    Fig(u8),
}

pub const SCENARIOS: [(&str, &str); 11] = [
    ("separate", "each qubit coupled to its own bath (J = 0): polarizations, D and C over time"),
    ("common-symmetric", "shared bath with K_A = K_B: closed-form polarization map"),
    ("common-asymmetric", "shared bath, any K_A, K_B, J: sector-exact evolution"),
    ("optimize", "short-time rate minimized over pure states across the inhomogeneity delta"),
    ("oracle-compare", "closed forms against full Hilbert-space evolution (N <= 12); exit 2 on mismatch"),
    ("fig1", "separate baths: purity for several initial concurrences, Bell-state concurrence"),
    ("fig2", "common symmetric bath, |up,down>: P^z_A, Pi^xx, Pi^zz, Pi^xy and C"),
    ("fig3", "common symmetric bath, |up,down>: two-qubit D against single-qubit D_A"),
    ("fig4", "common symmetric bath, T0 Bell state: Pi^xx, Pi^zz, C and D"),
    ("fig5", "asymmetric couplings, r = +-0.5 states, D for J = 0 and large J"),
    ("fig6", "short-time rate against delta for separable, singlet, triplet and optimal states"),
];

impl ScenarioKind {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "separate" => ScenarioKind::Separate,
            "common-symmetric" => ScenarioKind::CommonSymmetric,
            "common-asymmetric" => ScenarioKind::CommonAsymmetric,
            "optimize" => ScenarioKind::Optimize,
            "oracle-compare" => ScenarioKind::OracleCompare,
            "fig1" => ScenarioKind::Fig(1),
            "fig2" => ScenarioKind::Fig(2),
            "fig3" => ScenarioKind::Fig(3),
            "fig4" => ScenarioKind::Fig(4),
            "fig5" => ScenarioKind::Fig(5),
            "fig6" => ScenarioKind::Fig(6),
            _ => return None,
        })
    }

    pub fn name(self) -> String {
        match self {
            ScenarioKind::Separate => "separate".into(),
            ScenarioKind::CommonSymmetric => "common-symmetric".into(),
            ScenarioKind::CommonAsymmetric => "common-asymmetric".into(),
            ScenarioKind::Optimize => "optimize".into(),
            ScenarioKind::OracleCompare => "oracle-compare".into(),
            ScenarioKind::Fig(n) => format!("fig{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub k_a: f64,
    pub k_b: f64,
    pub j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Exact,
    Gaussian(GaussianVariant),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BathSpec {
    pub n: u32,
    pub distribution: Distribution,
}

impl BathSpec {
    pub fn build(&self) -> dotspin::Result<BathDistribution> {
        match self.distribution {
            Distribution::Exact => BathDistribution::unpolarized_exact(self.n),
            Distribution::Gaussian(v) => BathDistribution::gaussian(self.n, v),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.distribution {
            Distribution::Exact => "exact",
            Distribution::Gaussian(v) => v.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Common,
    Separate,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub kind: ScenarioKind,
    pub output: PathBuf,
    pub couplings: Couplings,
    pub bath: BathSpec,
    pub state: NamedState,
    pub state_label: String,
    pub time: TimeGrid,
    pub delta_points: usize,
    pub grid_points: usize,
    pub oracle_kind: OracleKind,
    pub tolerance: f64,
}

/// Per-scenario defaults; `None` means the field is required.
struct Defaults {
    k_a: Option<f64>,
    k_b: Option<f64>,
    j: Option<f64>,
    bath: Option<BathSpec>,
    state: Option<&'static str>,
    time: Option<TimeGrid>,
}

const EXACT_100: BathSpec = BathSpec { n: 100, distribution: Distribution::Exact };
const NARROW_100: BathSpec = BathSpec { n: 100, distribution: Distribution::Gaussian(GaussianVariant::Narrow) };

fn defaults(kind: ScenarioKind) -> Defaults {
    let required = Defaults { k_a: None, k_b: None, j: None, bath: None, state: None, time: None };
    let fig = |j, bath, state, t_max, samples| Defaults {
        k_a: Some(1.0),
        k_b: Some(1.0),
        j: Some(j),
        bath: Some(bath),
        state: Some(state),
        time: Some(TimeGrid { t_max, samples }),
    };
    match kind {
        ScenarioKind::Separate => Defaults { j: Some(0.0), ..required },
        ScenarioKind::CommonSymmetric | ScenarioKind::CommonAsymmetric | ScenarioKind::OracleCompare => required,
        ScenarioKind::Optimize | ScenarioKind::Fig(6) => Defaults {
            k_a: Some(1.0),
            k_b: Some(1.0),
            j: Some(0.0),
            bath: Some(EXACT_100),
            state: Some("singlet"),
            time: Some(TimeGrid { t_max: 1.0, samples: 2 }),
        },
        ScenarioKind::Fig(1) => fig(0.0, EXACT_100, "singlet", 0.6, 301),
        ScenarioKind::Fig(2) => fig(200.0, EXACT_100, "up-down", 4.0, 8001),
        ScenarioKind::Fig(3) => fig(10.0, EXACT_100, "up-down", 2.0, 401),
        ScenarioKind::Fig(4) => fig(0.0, EXACT_100, "triplet0", 1.0, 401),
        ScenarioKind::Fig(5) => Defaults { k_a: Some(1.2), k_b: Some(0.8), j: Some(50.0), ..fig(50.0, NARROW_100, "singlet", 5.0, 501) },
        ScenarioKind::Fig(_) => required,
    }
}

const STATE_NAMES: &str =
    "singlet, triplet0, bell-t1, bell-t2, up-down, up-down-superposition, singlet-triplet-mix, werner, general-pure";

fn parse_state(raw: &RawState, errors: &mut Vec<String>) -> Option<(NamedState, String)> {
    let Some(name) = raw.name.as_deref() else {
        errors.push("state.name: missing".into());
        return None;
    };
    let need = |v: Option<f64>, field: &str, errors: &mut Vec<String>| {
        if v.is_none() {
            errors.push(format!("state.{field}: missing (required by state '{name}')"));
        }
        v
    };
    let state = match name {
        "singlet" => NamedState::Singlet,
        "triplet0" => NamedState::Triplet0,
        "bell-t1" => NamedState::BellT1,
        "bell-t2" => NamedState::BellT2,
        "up-down" => NamedState::UpDown,
        "up-down-superposition" => NamedState::UpDownSuperposition { r: need(raw.r, "r", errors)? },
        "singlet-triplet-mix" => NamedState::SingletTripletMix { r: need(raw.r, "r", errors)? },
        "werner" => NamedState::Werner { p: need(raw.p, "p", errors)? },
        "general-pure" => NamedState::GeneralPure {
            gamma: Complex64::new(raw.gamma_re.unwrap_or(0.0), raw.gamma_im.unwrap_or(0.0)),
            theta: raw.theta.unwrap_or(0.0),
            phi: raw.phi.unwrap_or(0.0),
        },
        other => {
            errors.push(format!("state.name: unknown state '{other}' (expected one of {STATE_NAMES})"));
            return None;
        }
    };
    if let Err(e) = state.state() {
        errors.push(format!("state: {e}"));
        return None;
    }
    let mut label = name.to_string();
    for (key, v) in [("r", raw.r), ("p", raw.p), ("gamma_re", raw.gamma_re), ("gamma_im", raw.gamma_im), ("theta", raw.theta), ("phi", raw.phi)] {
        if let Some(v) = v {
            label.push_str(&format!(" {key}={v}"));
        }
    }
    Some((state, label))
}

fn default_output(config_path: &Path) -> PathBuf {
    config_path.with_extension("csv")
}

/// Checks `raw` against the requirements of its scenario. On failure returns every
/// violation, each prefixed with the offending field.
pub fn validate(raw: &RawConfig, config_path: &Path) -> Result<Plan, Vec<String>> {
    let mut errors = Vec::new();
    let Some(name) = raw.scenario.as_deref() else {
        return Err(vec!["scenario: missing".into()]);
    };
    let Some(kind) = ScenarioKind::parse(name) else {
        let known: Vec<&str> = SCENARIOS.iter().map(|s| s.0).collect();
        return Err(vec![format!("scenario: unknown scenario '{name}' (expected one of {})", known.join(", "))]);
    };
    let d = defaults(kind);
    let scenario = kind.name();

    let mut coupling = |v: Option<f64>, dflt: Option<f64>, field: &str| match v.or(dflt) {
        Some(x) if x.is_finite() => x,
        Some(x) => {
            errors.push(format!("couplings.{field}: must be finite (got {x})"));
            0.0
        }
        None => {
            errors.push(format!("couplings.{field}: missing (required by {scenario})"));
            0.0
        }
    };
    let couplings = Couplings {
        k_a: coupling(raw.couplings.k_a, d.k_a, "k_a"),
        k_b: coupling(raw.couplings.k_b, d.k_b, "k_b"),
        j: coupling(raw.couplings.j, d.j, "j"),
    };
    if kind == ScenarioKind::Separate && couplings.j != 0.0 {
        errors.push(format!("couplings.j: separate baths require J = 0 (got {})", couplings.j));
    }
    if kind == ScenarioKind::CommonSymmetric && couplings.k_a != couplings.k_b {
        errors.push(format!(
            "couplings.k_b: common-symmetric requires k_a = k_b (got {} and {}); use common-asymmetric",
            couplings.k_a, couplings.k_b
        ));
    }

    let bath = match (&raw.bath, d.bath) {
        (None, Some(b)) => Some(b),
        (None, None) => {
            errors.push(format!("bath: missing (required by {scenario})"));
            None
        }
        (Some(rb), dflt) => {
            let n = rb.n.or(dflt.map(|b| b.n));
            let dist = match rb.distribution.as_deref() {
                None => Some(dflt.map(|b| b.distribution).unwrap_or(Distribution::Exact)),
                Some("exact") => Some(Distribution::Exact),
                Some("gaussian-wide") => Some(Distribution::Gaussian(GaussianVariant::Wide)),
                Some("gaussian-narrow") => Some(Distribution::Gaussian(GaussianVariant::Narrow)),
                Some(other) => {
                    errors.push(format!(
                        "bath.distribution: unknown distribution '{other}' (expected exact, gaussian-wide or gaussian-narrow)"
                    ));
                    None
                }
            };
            match (n, dist) {
                (None, _) => {
                    errors.push("bath.n: missing".into());
                    None
                }
                (Some(n), Some(distribution)) => {
                    let spec = BathSpec { n, distribution };
                    match spec.build() {
                        Ok(_) => Some(spec),
                        Err(e) => {
                            errors.push(format!("bath.n: {e}"));
                            None
                        }
                    }
                }
                _ => None,
            }
        }
    };

    let state = match (&raw.state, d.state) {
        (Some(rs), _) => parse_state(rs, &mut errors),
        (None, Some(name)) => parse_state(&RawState { name: Some(name.into()), ..Default::default() }, &mut errors),
        (None, None) => {
            errors.push(format!("state: missing (required by {scenario})"));
            None
        }
    };

    let time = match (&raw.time, d.time) {
        (None, Some(t)) => Some(t),
        (None, None) => {
            errors.push(format!("time: missing (required by {scenario})"));
            None
        }
        (Some(rt), dflt) => {
            let t_max = rt.t_max.or(dflt.map(|t| t.t_max));
            let samples = rt.samples.or(dflt.map(|t| t.samples));
            match (t_max, samples) {
                (None, _) => {
                    errors.push("time.t_max: missing".into());
                    None
                }
                (_, None) => {
                    errors.push("time.samples: missing".into());
                    None
                }
                (Some(t_max), Some(samples)) => {
                    let mut ok = true;
                    if !(t_max.is_finite() && t_max > 0.0) {
                        errors.push(format!("time.t_max: must be positive and finite (got {t_max})"));
                        ok = false;
                    }
                    if samples < 2 {
                        errors.push(format!("time.samples: need at least 2 samples (got {samples})"));
                        ok = false;
                    }
                    ok.then_some(TimeGrid { t_max, samples })
                }
            }
        }
    };

    let delta_points = raw.optimize.delta_points.unwrap_or(if kind == ScenarioKind::Fig(6) { 201 } else { 101 });
    let grid_points = raw.optimize.grid_points.unwrap_or(41);
    if delta_points < 2 {
        errors.push(format!("optimize.delta_points: need at least 2 (got {delta_points})"));
    }
    if grid_points < 3 {
        errors.push(format!("optimize.grid_points: need at least 3 (got {grid_points})"));
    }

    let oracle_kind = match raw.oracle.mode.as_deref() {
        None | Some("common") => OracleKind::Common,
        Some("separate") => OracleKind::Separate,
        Some(other) => {
            errors.push(format!("oracle.mode: unknown mode '{other}' (expected common or separate)"));
            OracleKind::Common
        }
    };
    let tolerance = raw.oracle.tolerance.unwrap_or(1e-10);
    if !(tolerance > 0.0) {
        errors.push(format!("oracle.tolerance: must be positive (got {tolerance})"));
    }
    if kind == ScenarioKind::OracleCompare {
        if let Some(b) = bath {
            if b.distribution != Distribution::Exact {
                errors.push("bath.distribution: oracle-compare needs the exact distribution".into());
            }
            if b.n as usize > MAX_BATH_SPINS {
                let dim = 4u128 << b.n;
                errors.push(format!(
                    "bath.n: oracle dimension {dim} exceeds the cap of {} (N <= {MAX_BATH_SPINS})",
                    4usize << MAX_BATH_SPINS
                ));
            }
        }
        if oracle_kind == OracleKind::Separate && couplings.j != 0.0 {
            errors.push(format!("couplings.j: separate baths require J = 0 (got {})", couplings.j));
        }
        if oracle_kind == OracleKind::Separate && bath.is_some_and(|b| b.n % 2 != 0) {
            errors.push("bath.n: separate oracle splits the bath in halves and needs an even N".into());
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let (state, state_label) = state.expect("validated");
    Ok(Plan {
        kind,
        output: raw.output.clone().unwrap_or_else(|| default_output(config_path)),
        couplings,
        bath: bath.expect("validated"),
        state,
        state_label,
        time: time.expect("validated"),
        delta_points,
        grid_points,
        oracle_kind,
        tolerance,
    })
}

/// Derived quantities printed by `validate`.
pub fn report(plan: &Plan) -> dotspin::Result<Vec<String>> {
    let c = plan.couplings;
    let bath = plan.bath.build()?;
    let mut lines = vec![
        format!("scenario: {}", plan.kind.name()),
        format!("output: {}", plan.output.display()),
        format!("couplings: k_a = {}, k_b = {}, J = {}", c.k_a, c.k_b, c.j),
        format!("bath: N = {}, {}", plan.bath.n, plan.bath.name()),
        format!("<I(I+1)> = {}, <I^2> = {}", bath.moment(Moment::Casimir), bath.moment(Moment::SpinSquared)),
        format!("state: {}", plan.state_label),
        format!("time: t_max = {}, samples = {}", plan.time.t_max, plan.time.samples),
    ];
    if let Ok(delta) = delta_from_couplings(c.k_a, c.k_b) {
        lines.push(format!("delta = {delta}, gamma_opt = {}", gamma_opt(delta)));
    }
    let s0 = plan.state.state()?;
    if s0.is_pure(1e-10) {
        if c.j == 0.0 && plan.kind == ScenarioKind::Separate {
            let sys = SeparateBathSystem::new(c.k_a, c.k_b, bath.clone(), bath.clone())?;
            if c.k_a == c.k_b && (s0.p_a.norm() - s0.p_b.norm()).abs() < 1e-10 {
                lines.push(format!("tau_D = {}", sys.tau_d(s0.p_a.norm())?));
            }
        } else if let Ok(sys) = CommonBathSystem::new(c.k_a, c.k_b, c.j, bath) {
            if let Ok(tau) = sys.short_time_tau(&s0) {
                lines.push(format!("short-time tau_D = {tau}"));
            }
        }
    }
    if plan.kind == ScenarioKind::OracleCompare {
        let dim = 4usize << plan.bath.n;
        lines.push(format!("oracle dimension = {dim}, tolerance = {:e}", plan.tolerance));
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Plan, Vec<String>> {
        let raw: RawConfig = toml::from_str(text).unwrap();
        validate(&raw, Path::new("cfg.toml"))
    }

    #[test]
    fn missing_j_is_named() {
        let errs = parse(
            "scenario = \"common-asymmetric\"\n[couplings]\nk_a = 1.0\nk_b = 0.4\n[bath]\nn = 6\n[state]\nname = \"singlet\"\n[time]\nt_max = 1.0\nsamples = 5\n",
        )
        .unwrap_err();
        assert_eq!(errs, vec!["couplings.j: missing (required by common-asymmetric)".to_string()]);
    }

    #[test]
    fn separate_rejects_exchange() {
        let errs = parse(
            "scenario = \"separate\"\n[couplings]\nk_a = 1.0\nk_b = 1.0\nj = 2.0\n[bath]\nn = 6\n[state]\nname = \"singlet\"\n[time]\nt_max = 1.0\nsamples = 5\n",
        )
        .unwrap_err();
        assert!(errs[0].starts_with("couplings.j: separate baths require J = 0"));
    }

    #[test]
    fn oracle_compare_respects_dimension_cap() {
        let errs = parse(
            "scenario = \"oracle-compare\"\n[couplings]\nk_a = 1.0\nk_b = 0.4\nj = 1.0\n[bath]\nn = 20\n[state]\nname = \"singlet\"\n[time]\nt_max = 1.0\nsamples = 5\n",
        )
        .unwrap_err();
        assert!(errs.iter().any(|e| e.starts_with("bath.n: oracle dimension")), "{errs:?}");
    }

    #[test]
    fn figure_defaults_fill_everything() {
        let plan = parse("scenario = \"fig2\"\n").unwrap();
        assert_eq!(plan.couplings, Couplings { k_a: 1.0, k_b: 1.0, j: 200.0 });
        assert_eq!(plan.bath, EXACT_100);
        assert_eq!(plan.output, PathBuf::from("cfg.csv"));
        let plan = parse("scenario = \"fig5\"\n[couplings]\nj = 30.0\n").unwrap();
        assert_eq!(plan.couplings.j, 30.0);
        assert_eq!(plan.couplings.k_a, 1.2);
    }

    #[test]
    fn state_parameters_are_checked() {
        let errs = parse("scenario = \"fig4\"\n[state]\nname = \"werner\"\n").unwrap_err();
        assert_eq!(errs, vec!["state.p: missing (required by state 'werner')".to_string()]);
        let errs = parse("scenario = \"fig4\"\n[state]\nname = \"werner\"\np = 2.0\n").unwrap_err();
        assert!(errs[0].starts_with("state:"));
        let errs = parse("scenario = \"fig4\"\n[time]\nt_max = -1.0\nsamples = 1\n").unwrap_err();
        assert_eq!(errs.len(), 2);
    }

    #[test]
    fn unknown_scenario() {
        let errs = parse("scenario = \"fig9\"\n").unwrap_err();
        assert!(errs[0].starts_with("scenario: unknown scenario 'fig9'"));
    }
}
