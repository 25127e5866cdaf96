//! Explicit time stepping of the normalized flow `uₜ = −f rᵅ K + u` and the
//! raw flow `uₜ = −f rᵅ K` in support-function form.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::FlowError;
use crate::geometry::{BodySnapshot, NormalFrame, SupportFn};
use crate::measures::{self, q_exponent, AnisotropyF, Q_ZERO_TOL};

/// Maximum number of step-size halvings before a step is declared collapsed.
pub const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    Normalized,
    Raw,
}

/// How the initial dilation constant `φ₀` is chosen in normalized mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiRule {
    /// `exp((1/oₙ) ∫ log r₀ dξ)`, for `α = n + 1`.
    Aleksandrov,
    /// `√(min r₀ · max r₀)`, for `α > n + 1`.
    Bracket,
    /// `(∫ r₀^q dξ / ∫ f dx)^{1/q}`, for `α ≠ n + 1`.
    IqMatching,
    Explicit(f64),
    /// Rescale to the volume of the unit ball.
    UnitVolume,
}

impl PhiRule {
    /// The rule the theory uses for the given regime.
    pub fn default_for(dim: usize, alpha: f64) -> Self {
        let q = q_exponent(dim, alpha);
        if q.abs() < Q_ZERO_TOL {
            PhiRule::Aleksandrov
        } else if q < 0.0 {
            PhiRule::Bracket
        } else {
            PhiRule::IqMatching
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub alpha: f64,
    pub f: AnisotropyF,
    pub mode: FlowMode,
    pub phi0_rule: PhiRule,
    pub cfl: f64,
    pub t_max: f64,
    pub residual_tol: f64,
    pub blowup_ratio: f64,
    pub min_u_floor: f64,
    pub record_every: usize,
}

impl FlowConfig {
    /// Normalized flow with default tolerances and the regime's φ₀ rule.
    pub fn new(dim: usize, alpha: f64, f: AnisotropyF) -> Self {
        Self {
            alpha,
            f,
            mode: FlowMode::Normalized,
            phi0_rule: PhiRule::default_for(dim, alpha),
            cfl: 0.2,
            t_max: 15.0,
            residual_tol: 1e-6,
            blowup_ratio: 1e3,
            min_u_floor: 1e-6,
            record_every: 100,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), FlowError> {
        let bad = |msg: String| Err(FlowError::Config(msg));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !self.alpha.is_finite() {
            return bad(format!("alpha must be finite, got {}", self.alpha));
        }
        for (name, v) in [
            ("t_max", self.t_max),
            ("residual_tol", self.residual_tol),
            ("blowup_ratio", self.blowup_ratio),
            ("min_u_floor", self.min_u_floor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if self.phi0_rule == PhiRule::IqMatching && q_exponent(dim, self.alpha).abs() < Q_ZERO_TOL {
            return bad("iq_matching requires alpha != n+1".into());
        }
        if let PhiRule::Explicit(v) = self.phi0_rule {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("explicit phi0 must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Chooses `φ₀` for the initial body. Direction integrals are evaluated in
/// normal coordinates, see [`crate::measures`].
pub fn select_phi0(body: &BodySnapshot, f: &AnisotropyF, config: &FlowConfig) -> Result<f64, FlowError> {
    let grid = body.grid();
    let frame = body.frame();
    match config.phi0_rule {
        PhiRule::Aleksandrov => Ok((measures::log_r(grid, frame) / grid.sphere_measure()).exp()),
        PhiRule::Bracket => Ok((frame.radius_min() * frame.radius_max()).sqrt()),
        PhiRule::IqMatching => {
            let q = q_exponent(grid.dim(), config.alpha);
            if q.abs() < Q_ZERO_TOL {
                return Err(FlowError::Config("iq_matching requires alpha != n+1".into()));
            }
            let fs = f.sample(grid).map_err(FlowError::Config)?;
            let total: f64 = grid.weights().iter().zip(&fs).map(|(w, f)| w * f).sum();
            Ok((measures::i_q(grid, frame, q) / total).powf(1.0 / q))
        }
        PhiRule::Explicit(v) => Ok(v),
        PhiRule::UnitVolume => {
            let ball = grid.sphere_measure() / (grid.dim() + 1) as f64;
            let vol = crate::geometry::volume(body);
            Ok((vol / ball).powf(1.0 / (grid.dim() + 1) as f64))
        }
    }
}

/// `r ↦ r^α`, using integer powers and square roots where possible.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Power {
    Int(i32),
    Half(i32),
    Real(f64),
}

impl Power {
    pub(crate) fn new(alpha: f64) -> Self {
        let twice = 2.0 * alpha;
        if twice.fract() == 0.0 && twice.abs() <= 64.0 {
            let k = twice as i32;
            if k % 2 == 0 {
                Power::Int(k / 2)
            } else {
                Power::Half(k.div_euclid(2))
            }
        } else {
            Power::Real(alpha)
        }
    }

    #[inline]
    pub(crate) fn apply(self, r: f64) -> f64 {
        match self {
            Power::Int(k) => r.powi(k),
            Power::Half(k) => r.powi(k) * r.sqrt(),
            Power::Real(a) => r.powf(a),
        }
    }
}

fn rhs_from_frame(u: &[f64], frame: &NormalFrame, f: &[f64], alpha: f64, mode: FlowMode) -> Vec<f64> {
    let pow = Power::new(alpha);
    let speed = u
        .iter()
        .zip(f)
        .zip(frame.radius.iter().zip(&frame.gauss))
        .map(|((_, f), (r, k))| -f * pow.apply(*r) * k);
    match mode {
        FlowMode::Normalized => speed.zip(u).map(|(s, u)| s + u).collect(),
        FlowMode::Raw => speed.collect(),
    }
}

/// Right-hand side of the flow at the grid nodes.
pub fn rhs(u: &SupportFn, f: &AnisotropyF, alpha: f64, mode: FlowMode) -> Result<Vec<f64>, FlowError> {
    let frame = NormalFrame::new(u)?;
    let fs = f.sample(u.grid()).map_err(FlowError::Config)?;
    Ok(rhs_from_frame(u.values(), &frame, &fs, alpha, mode))
}

/// One row of the diagnostics history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub j_alpha: f64,
    pub i_q: f64,
    pub log_r_integral: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub ratio_r: f64,
    pub residual_max: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub dt: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str = "t,J_alpha,I_q,log_r_integral,u_min,u_max,r_min,r_max,ratio_R,residual_max,kappa_min,kappa_max,dt";

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        for (i, v) in [
            self.t,
            self.j_alpha,
            self.i_q,
            self.log_r_integral,
            self.u_min,
            self.u_max,
            self.r_min,
            self.r_max,
            self.ratio_r,
            self.residual_max,
            self.kappa_min,
            self.kappa_max,
            self.dt,
        ]
        .iter()
        .enumerate()
        {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:.16e}");
        }
        s
    }
}

/// Writes a history as CSV with a header row.
pub fn history_csv(history: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(history.len() * 300);
    out.push_str(DiagnosticsRecord::CSV_HEADER);
    out.push('\n');
    for rec in history {
        out.push_str(&rec.csv_row());
        out.push('\n');
    }
    out
}

/// State of a flow run. In normalized mode `t` is the normalized time `τ`.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub u: SupportFn,
    pub step_index: usize,
    pub dt_last: f64,
    pub history: Vec<DiagnosticsRecord>,
    frame: NormalFrame,
    f_values: Arc<Vec<f64>>,
}

impl FlowState {
    pub fn new(u: SupportFn, f: &AnisotropyF) -> Result<Self, FlowError> {
        let frame = NormalFrame::new(&u)?;
        let f_values = Arc::new(f.sample(u.grid()).map_err(FlowError::Config)?);
        Ok(Self {
            t: 0.0,
            u,
            step_index: 0,
            dt_last: 0.0,
            history: Vec::new(),
            frame,
            f_values,
        })
    }

    pub fn frame(&self) -> &NormalFrame {
        &self.frame
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f_values
    }

    /// `𝒥_α` of the current state.
    pub fn functional_j(&self, alpha: f64) -> f64 {
        measures::functional_j_sampled(
            self.u.grid(),
            self.u.values(),
            &self.frame,
            &self.f_values,
            alpha,
        )
    }

    /// `max |f rᵅ K − u|`.
    pub fn residual_max(&self, alpha: f64) -> f64 {
        measures::soliton_residual_sampled(self.u.values(), &self.frame, &self.f_values, alpha)
            .iter()
            .fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn ratio_r(&self) -> f64 {
        self.frame.radius_max() / self.frame.radius_min()
    }

    /// `(1/(n+1)) ∫ u/K dx`.
    pub fn volume(&self) -> f64 {
        let grid = self.u.grid();
        let s: f64 = grid
            .weights()
            .iter()
            .zip(self.u.values().iter().zip(&self.frame.gauss))
            .map(|(w, (u, k))| w * u / k)
            .sum();
        s / (grid.dim() + 1) as f64
    }

    pub fn diagnostics(&self, alpha: f64) -> DiagnosticsRecord {
        let grid = self.u.grid();
        let q = q_exponent(grid.dim(), alpha);
        let n = self.u.values().len();
        let mut kappa_min = f64::INFINITY;
        let mut kappa_max = f64::NEG_INFINITY;
        for i in 0..n {
            kappa_min = kappa_min.min(1.0 / self.frame.radii.max_at(i));
            kappa_max = kappa_max.max(1.0 / self.frame.radii.min_at(i));
        }
        let r_min = self.frame.radius_min();
        let r_max = self.frame.radius_max();
        DiagnosticsRecord {
            t: self.t,
            j_alpha: self.functional_j(alpha),
            i_q: measures::i_q(grid, &self.frame, q),
            log_r_integral: measures::log_r(grid, &self.frame),
            u_min: self.u.min(),
            u_max: self.u.max(),
            r_min,
            r_max,
            ratio_r: r_max / r_min,
            residual_max: self.residual_max(alpha),
            kappa_min,
            kappa_max,
            dt: self.dt_last,
        }
    }

    /// Stable step size `cfl · h² · minᵢ b_min/(f rᵅ K)`.
    pub fn stable_dt(&self, config: &FlowConfig) -> f64 {
        let h = self.u.grid().spacing();
        let pow = Power::new(config.alpha);
        let mut ratio = f64::INFINITY;
        for i in 0..self.f_values.len() {
            let coef = self.f_values[i] * pow.apply(self.frame.radius[i]) * self.frame.gauss[i];
            ratio = ratio.min(self.frame.radii.min_at(i) / coef);
        }
        config.cfl * h * h * ratio
    }
}

/// One forward-Euler step with reject-and-halve on loss of positivity or
/// convexity. The step is clipped so that `t` does not pass `t_max`. On
/// error the state is left untouched.
pub fn step(state: &mut FlowState, config: &FlowConfig) -> Result<(), FlowError> {
    let v = rhs_from_frame(
        state.u.values(),
        &state.frame,
        &state.f_values,
        config.alpha,
        config.mode,
    );
    let remaining = config.t_max - state.t;
    let mut dt = state.stable_dt(config).min(remaining);
    if !(dt > 0.0) {
        return Err(FlowError::StepCollapse {
            t: state.t,
            halvings: 0,
        });
    }
    let grid = state.u.shared_grid().clone();
    for halvings in 0..=MAX_HALVINGS {
        let trial: Vec<f64> = state.u.values().iter().zip(&v).map(|(u, v)| u + dt * v).collect();
        match SupportFn::new_with_frame(grid.clone(), trial) {
            Ok((u, frame)) => {
                state.t = if dt == remaining { config.t_max } else { state.t + dt };
                state.u = u;
                state.frame = frame;
                state.step_index += 1;
                state.dt_last = dt;
                return Ok(());
            }
            Err(_) if halvings < MAX_HALVINGS => dt *= 0.5,
            Err(_) => break,
        }
    }
    Err(FlowError::StepCollapse {
        t: state.t,
        halvings: MAX_HALVINGS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    TimeOut,
    /// `collapsed` is set when the step size collapsed rather than the ratio
    /// or floor test firing.
    Blowup { collapsed: bool },
    Extinct,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::TimeOut => "timeout",
            Outcome::Blowup { .. } => "blowup",
            Outcome::Extinct => "extinct",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: FlowState,
    pub outcome: Outcome,
    /// Dilation applied to the initial data (1 in raw mode).
    pub phi0: f64,
    pub initial_ratio: f64,
}

fn stop_reason(state: &FlowState, config: &FlowConfig) -> Option<Outcome> {
    if state.u.max() < config.min_u_floor {
        return Some(Outcome::Extinct);
    }
    if state.ratio_r() > config.blowup_ratio {
        return Some(Outcome::Blowup { collapsed: false });
    }
    if config.mode == FlowMode::Raw && state.u.min() < config.min_u_floor {
        return Some(Outcome::Blowup { collapsed: false });
    }
    if config.mode == FlowMode::Normalized && state.residual_max(config.alpha) < config.residual_tol {
        return Some(Outcome::Converged);
    }
    if state.t >= config.t_max {
        return Some(Outcome::TimeOut);
    }
    None
}

/// Runs the flow to a stopping condition, recording diagnostics every
/// `record_every` steps and at the final state.
pub fn run(u0: SupportFn, config: &FlowConfig) -> Result<RunResult, FlowError> {
    run_observed(u0, config, |_| {})
}

/// As [`run`], calling `observe` on the initial state and after every
/// accepted step.
pub fn run_observed(
    u0: SupportFn,
    config: &FlowConfig,
    mut observe: impl FnMut(&FlowState),
) -> Result<RunResult, FlowError> {
    let (mut state, phi0) = initial_state(u0, config)?;
    let initial_ratio = state.ratio_r();
    let record = |state: &mut FlowState| {
        let rec = state.diagnostics(config.alpha);
        state.history.push(rec);
    };
    record(&mut state);
    observe(&state);
    let outcome = loop {
        if let Some(outcome) = stop_reason(&state, config) {
            break outcome;
        }
        match step(&mut state, config) {
            Ok(()) => {}
            Err(FlowError::StepCollapse { .. }) => break Outcome::Blowup { collapsed: true },
            Err(e) => return Err(e),
        }
        if state.step_index % config.record_every == 0 {
            record(&mut state);
        }
        observe(&state);
    };
    if state.history.last().map(|r| r.t) != Some(state.t) {
        record(&mut state);
    }
    Ok(RunResult {
        final_state: state,
        outcome,
        phi0,
        initial_ratio,
    })
}

/// Validates the config, applies the `φ₀` dilation in normalized mode and
/// builds the initial state.
pub fn initial_state(u0: SupportFn, config: &FlowConfig) -> Result<(FlowState, f64), FlowError> {
    config.validate(u0.grid().dim())?;
    let phi0 = match config.mode {
        FlowMode::Raw => 1.0,
        FlowMode::Normalized => {
            let body = BodySnapshot::from_support(u0.clone())?;
            select_phi0(&body, &config.f, config)?
        }
    };
    let u = if phi0 == 1.0 { u0 } else { u0.scaled(1.0 / phi0) };
    Ok((FlowState::new(u, &config.f)?, phi0))
}

/// The comparison solutions `u₁(t), u₂(t) = [1 − (1 − c^q) e^{qt}]^{1/q}`
/// with `c = a, b`, valid for `q < 0` and `a ≤ 1 ≤ b`.
pub fn barrier_envelope(a: f64, b: f64, q: f64, t: f64) -> Result<(f64, f64), FlowError> {
    if !(q < 0.0) {
        return Err(FlowError::Config(format!("barriers need q < 0, got {q}")));
    }
    if !(a > 0.0 && a <= 1.0 && 1.0 <= b) {
        return Err(FlowError::Config(format!(
            "barriers need 0 < a <= 1 <= b, got a = {a}, b = {b}"
        )));
    }
    let g = |c: f64| (1.0 - (1.0 - c.powf(q)) * (q * t).exp()).powf(1.0 / q);
    Ok((g(a), g(b)))
}

/// Dilation `φ` relating the normalized body to the raw one at normalized
/// time `τ`: `𝓜_t = φ 𝓜̃_τ`.
pub fn scale_factor(phi0: f64, tau: f64) -> f64 {
    phi0 * (-tau).exp()
}

/// Raw time `t` corresponding to normalized time `τ`.
pub fn raw_time(phi0: f64, q: f64, tau: f64) -> f64 {
    if q.abs() < Q_ZERO_TOL {
        tau
    } else {
        phi0.powf(q) * (1.0 - (-q * tau).exp()) / q
    }
}

/// Normalized time `τ` corresponding to raw time `t`.
pub fn normalized_time(phi0: f64, q: f64, t: f64) -> f64 {
    if q.abs() < Q_ZERO_TOL {
        t
    } else {
        let p = phi0.powf(q);
        (p / (p - q * t)).ln() / q
    }
}

/// Defect `max |u(x) − u(x + π)|` (n = 1) or `max |u(θ) − u(π − θ)|` (n = 2).
pub fn symmetry_defect(u: &SupportFn) -> f64 {
    let grid = u.grid();
    let v = u.values();
    (0..v.len())
        .map(|i| (v[i] - v[grid.antipode(i)]).abs())
        .fold(0.0, f64::max)
}
