//! Plain Rust side of the demo, testable natively.

use std::sync::Arc;

use aniflow::flow::{self, FlowConfig, FlowMode, FlowState};
use aniflow::FlowError;
use aniflow::geometry::{self, BodySnapshot, SupportFn};
use aniflow::grid::SphericalGrid;
use aniflow::measures::AnisotropyF;
use aniflow::subsolution::Profile;

/// Boundary points `u ν + u' ν⊥`, interleaved as `x0, y0, x1, y1, …`.
pub fn boundary_points(grid: &SphericalGrid, u: &[f64], du: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * u.len());
    for ((t, u), d) in grid.nodes().iter().zip(u).zip(du) {
        out.push(u * t.cos() - d * t.sin());
        out.push(u * t.sin() + d * t.cos());
    }
    out
}

pub fn initial_body(shape: &str, param: f64, nodes: usize) -> Result<SupportFn, String> {
    let grid = Arc::new(SphericalGrid::circle(nodes).map_err(|e| e.to_string())?);
    let u = match shape {
        "ellipse" => SupportFn::ellipse(grid, param, 1.0),
        "shifted_disk" => SupportFn::shifted_disk(grid, param),
        "fourier" => SupportFn::fourier(grid, 1.0, &[(0.0, 0.0), (param, 0.3 * param), (0.0, 0.0), (0.1 * param, 0.0)]),
        other => return Err(format!("unknown shape '{other}'")),
    };
    u.map_err(|e| e.to_string())
}

/// A flow advanced a few steps at a time.
pub struct Demo {
    state: FlowState,
    config: FlowConfig,
    stopped: bool,
}

impl Demo {
    /// `aniso` is the amplitude of `cos 2θ` in `f = 1 + aniso·cos 2θ`.
    pub fn new(shape: &str, param: f64, alpha: f64, aniso: f64, raw: bool, nodes: usize) -> Result<Self, String> {
        let u0 = initial_body(shape, param, nodes)?;
        let mut config = FlowConfig::new(1, alpha, AnisotropyF::cosine(1.0, vec![0.0, aniso], vec![]));
        if raw {
            config.mode = FlowMode::Raw;
        }
        let (state, _) = flow::initial_state(u0, &config).map_err(|e| e.to_string())?;
        Ok(Self {
            state,
            config,
            stopped: false,
        })
    }

    /// Takes up to `steps` steps. Returns false once the flow has stopped.
    pub fn advance(&mut self, steps: u32) -> Result<bool, String> {
        for _ in 0..steps {
            if self.stopped {
                break;
            }
            match flow::step(&mut self.state, &self.config) {
                Ok(()) => {}
                Err(FlowError::StepCollapse { .. }) => self.stopped = true,
                Err(e) => return Err(e.to_string()),
            }
            let s = &self.state;
            if s.ratio_r() > self.config.blowup_ratio || s.u.min() < self.config.min_u_floor {
                self.stopped = true;
            }
        }
        Ok(!self.stopped)
    }

    pub fn boundary(&self) -> Vec<f64> {
        boundary_points(self.state.u.grid(), self.state.u.values(), &self.state.frame().du)
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn ratio(&self) -> f64 {
        self.state.ratio_r()
    }

    pub fn residual(&self) -> f64 {
        self.state.residual_max(self.config.alpha)
    }

    pub fn functional(&self) -> f64 {
        self.state.functional_j(self.config.alpha)
    }
}

/// Boundary of a body followed by the boundary of its polar dual.
pub fn polar_pair(shape: &str, param: f64, nodes: usize) -> Result<Vec<f64>, String> {
    let body = BodySnapshot::from_support(initial_body(shape, param, nodes)?).map_err(|e| e.to_string())?;
    let dual = geometry::polar_dual(&body).map_err(|e| e.to_string())?;
    let mut out = boundary_points(body.grid(), body.support().values(), &body.frame().du);
    out.extend(boundary_points(dual.grid(), dual.support().values(), &dual.frame().du));
    Ok(out)
}

/// `(ρ, φ(ρ, t))` pairs for `ρ ∈ [−1, 1]`, mirrored through the axis.
pub fn subsolution_curve(theta: f64, q: f64, t: f64, samples: usize) -> Result<Vec<f64>, String> {
    let p = Profile::new(theta, q, 1).map_err(|e| e.to_string())?;
    let m = samples.max(2);
    let mut out = Vec::with_capacity(2 * m);
    for k in 0..m {
        let rho = -1.0 + 2.0 * k as f64 / (m - 1) as f64;
        out.push(rho);
        out.push(p.value(t, rho.abs().min(1.0)).map_err(|e| e.to_string())?);
    }
    Ok(out)
}
