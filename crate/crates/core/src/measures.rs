//! Functionals, conserved integrals, dual curvature measures, soliton
//! residuals and the Aleksandrov admissibility conditions.
//!
//! Integrals over direction angles `ξ` are never evaluated on the resampled
//! radial grid. They are pulled back to normal angles with the Jacobian
//! `|dξ/dx| = u/(r^{n+1}K)` and integrated with the grid weights. This keeps
//! every functional a smooth function of the support values.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::geometry::{BodySnapshot, NormalFrame};
use crate::grid::{integrate_interval, interpolate, SphericalGrid};

/// Tolerance for the evenness flag of [`AnisotropyF`].
pub const EVENNESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum AnisotropyKind {
    Constant(f64),
    /// `c₀ + Σₖ cos[k-1]·cos kθ + sin[k-1]·sin kθ`.
    Cosine {
        c0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    /// Samples on a uniform grid of the given dimension (periodic for n = 1,
    /// poles included for n = 2), evaluated by cubic interpolation.
    Tabulated { grid: SphericalGrid, values: Vec<f64> },
    /// Total mass `|S¹|`, of which `fraction` sits in a narrow Gaussian bump of
    /// the given width around `center` and the rest is spread uniformly.
    Spike {
        center: f64,
        width: f64,
        fraction: f64,
    },
}

/// The anisotropy `f > 0` on Sⁿ, as a function of the normal angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyF {
    kind: AnisotropyKind,
    even: bool,
}

impl AnisotropyF {
    pub fn constant(c: f64) -> Self {
        Self {
            kind: AnisotropyKind::Constant(c),
            even: true,
        }
    }

    /// Trigonometric polynomial. The evenness flag is set when every odd
    /// harmonic vanishes.
    pub fn cosine(c0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let odd_free = |c: &[f64]| c.iter().step_by(2).all(|&v| v == 0.0);
        let even = odd_free(&cos) && odd_free(&sin);
        Self {
            kind: AnisotropyKind::Cosine { c0, cos, sin },
            even,
        }
    }

    pub fn tabulated(grid: SphericalGrid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "table size must match its grid");
        Self {
            kind: AnisotropyKind::Tabulated { grid, values },
            even: false,
        }
    }

    /// Concentrated density on S¹, see [`AnisotropyKind::Spike`].
    pub fn spike(center: f64, width: f64, fraction: f64) -> Self {
        assert!(width > 0.0 && width < 2.0 * PI, "spike width must lie in (0, 2π)");
        assert!((0.0..1.0).contains(&fraction), "spike fraction must lie in [0, 1)");
        Self {
            kind: AnisotropyKind::Spike {
                center,
                width,
                fraction,
            },
            even: false,
        }
    }

    /// Overrides the evenness flag. [`AnisotropyF::sample`] verifies it.
    pub fn with_even(mut self, even: bool) -> Self {
        self.even = even;
        self
    }

    pub fn kind(&self) -> &AnisotropyKind {
        &self.kind
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match &self.kind {
            AnisotropyKind::Constant(c) => *c,
            AnisotropyKind::Cosine { c0, cos, sin } => {
                let mut v = *c0;
                for (k, c) in cos.iter().enumerate() {
                    v += c * ((k + 1) as f64 * theta).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    v += s * ((k + 1) as f64 * theta).sin();
                }
                v
            }
            AnisotropyKind::Tabulated { grid, values } => interpolate(values, grid, theta),
            AnisotropyKind::Spike {
                center,
                width,
                fraction,
            } => {
                let d = (theta - center + PI).rem_euclid(2.0 * PI) - PI;
                // Gaussian with standard deviation w/8, essentially all of
                // its mass inside the arc
                let sd = width / 8.0;
                let bump = (-0.5 * (d / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt());
                (1.0 - fraction) + 2.0 * PI * fraction * bump
            }
        }
    }

    /// Samples `f` at the grid nodes, checking positivity and, when the
    /// evenness flag is set, `f(x) = f(−x)` at antipodal node pairs.
    pub fn sample(&self, grid: &SphericalGrid) -> Result<Vec<f64>, String> {
        let values: Vec<f64> = grid.nodes().iter().map(|&t| self.eval(t)).collect();
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(format!(
                "anisotropy f is not positive at node {i} (theta = {:.6}): {v:e}",
                grid.nodes()[i]
            ));
        }
        if self.even && (grid.dim() == 2 || grid.len().is_multiple_of(2)) {
            for i in 0..grid.len() {
                let j = grid.antipode(i);
                if (values[i] - values[j]).abs() > EVENNESS_TOL {
                    return Err(format!(
                        "anisotropy f is flagged even but f(theta_{i}) != f(theta_{j})"
                    ));
                }
            }
        }
        Ok(values)
    }
}

/// `q = n + 1 − α`.
pub fn q_exponent(dim: usize, alpha: f64) -> f64 {
    (dim + 1) as f64 - alpha
}

/// Below this `|q|` the `α = n + 1` branch of the functional is used.
pub const Q_ZERO_TOL: f64 = 1e-12;

/// Compensated (Neumaier) sum. The functionals are compared between
/// consecutive time steps, where plain summation noise would dominate.
pub(crate) fn accurate_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `∫ r^q dξ`, pulled back to normal angles.
pub fn i_q(grid: &SphericalGrid, frame: &NormalFrame, q: f64) -> f64 {
    let pow = crate::flow::Power::new(q);
    accurate_sum(
        grid.weights()
            .iter()
            .zip(frame.radius.iter().zip(&frame.jacobian))
            .map(|(w, (r, j))| w * pow.apply(*r) * j),
    )
}

/// `∫ log r dξ`, pulled back to normal angles.
pub fn log_r(grid: &SphericalGrid, frame: &NormalFrame) -> f64 {
    accurate_sum(
        grid.weights()
            .iter()
            .zip(frame.radius.iter().zip(&frame.jacobian))
            .map(|(w, (r, j))| w * r.ln() * j),
    )
}

/// The functional `𝒥_α` from sampled data.
pub fn functional_j_sampled(
    grid: &SphericalGrid,
    u: &[f64],
    frame: &NormalFrame,
    f: &[f64],
    alpha: f64,
) -> f64 {
    let q = q_exponent(grid.dim(), alpha);
    let first = accurate_sum(
        grid.weights()
            .iter()
            .zip(f.iter().zip(u))
            .map(|(w, (f, u))| w * f * u.ln()),
    );
    if q.abs() < Q_ZERO_TOL {
        first - log_r(grid, frame)
    } else {
        first - i_q(grid, frame, q) / q
    }
}

/// `𝒥_α = ∫ f log u dx − ∫ log r dξ` (α = n+1) or
/// `∫ f log u dx − (1/q) ∫ r^q dξ` (α ≠ n+1).
pub fn functional_j(body: &BodySnapshot, f: &AnisotropyF, alpha: f64) -> Result<f64, String> {
    let f = f.sample(body.grid())?;
    Ok(functional_j_sampled(
        body.grid(),
        body.support().values(),
        body.frame(),
        &f,
        alpha,
    ))
}

pub fn integral_i_q(body: &BodySnapshot, q: f64) -> f64 {
    i_q(body.grid(), body.frame(), q)
}

pub fn log_r_integral(body: &BodySnapshot) -> f64 {
    log_r(body.grid(), body.frame())
}

/// `f rᵅ K − u` per node from sampled data.
pub fn soliton_residual_sampled(u: &[f64], frame: &NormalFrame, f: &[f64], alpha: f64) -> Vec<f64> {
    let pow = crate::flow::Power::new(alpha);
    u.iter()
        .zip(f)
        .zip(frame.radius.iter().zip(&frame.gauss))
        .map(|((u, f), (r, k))| f * pow.apply(*r) * k - u)
        .collect()
}

/// Residual of the soliton equation `u / (rᵅ K) = f`, written as
/// `f rᵅ K − u` so that it vanishes exactly at stationary points of the
/// normalized flow.
pub fn soliton_residual(body: &BodySnapshot, f: &AnisotropyF, alpha: f64) -> Result<Vec<f64>, String> {
    let f = f.sample(body.grid())?;
    Ok(soliton_residual_sampled(
        body.support().values(),
        body.frame(),
        &f,
        alpha,
    ))
}

/// `(max |g|, (∫ g²)^{1/2})`.
pub fn residual_norms(residual: &[f64], grid: &SphericalGrid) -> (f64, f64) {
    let max = residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let l2 = grid
        .weights()
        .iter()
        .zip(residual)
        .map(|(w, r)| w * r * r)
        .sum::<f64>()
        .sqrt();
    (max, l2)
}

/// Dual curvature measure `C̃_q(ω) = ∫_{𝒜*(ω)} r^q dξ`, computed in normal
/// coordinates as `∫_ω r^{q−n−1} u/K dx`. `omega` is a union of normal-angle
/// intervals `[a, b]`.
pub fn dual_curvature_measure(body: &BodySnapshot, q: f64, omega: &[(f64, f64)]) -> f64 {
    let frame = body.frame();
    let integrand: Vec<f64> = frame
        .radius
        .iter()
        .zip(&frame.jacobian)
        .map(|(r, j)| r.powf(q) * j)
        .collect();
    omega
        .iter()
        .map(|&(a, b)| integrate_interval(&integrand, body.grid(), a, b))
        .sum()
}

/// Integral Gauss curvature `|𝒜(ω)|` of a direction arc `ω = [a, b)` for
/// n = 1: the length of the set of normals whose boundary point has radial
/// direction in `ω`. The map `x ↦ ξ(x)` is inverted piecewise linearly.
pub fn integral_gauss_curvature(body: &BodySnapshot, omega: (f64, f64)) -> f64 {
    let grid = body.grid();
    assert_eq!(grid.dim(), 1, "integral Gauss curvature is implemented for curves");
    let xi = body.xi_of_x();
    let h = grid.spacing();
    let n = xi.len();
    let (a, b) = omega;
    let mut total = 0.0;
    for i in 0..n {
        let c = xi[i];
        let mut d = xi[(i + 1) % n];
        if i + 1 == n {
            d += 2.0 * PI;
        }
        // overlap of [c, d] with [a, b) shifted by multiples of 2π
        let k0 = ((c - b) / (2.0 * PI)).floor() as i64;
        let k1 = ((d - a) / (2.0 * PI)).ceil() as i64;
        for k in k0..=k1 {
            let shift = 2.0 * PI * k as f64;
            let lo = c.max(a + shift);
            let hi = d.min(b + shift);
            if hi > lo {
                total += h * (hi - lo) / (d - c);
            }
        }
    }
    total
}

/// Scalar summary of one body under a given `(f, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalReport {
    pub j_alpha: f64,
    pub i_q: f64,
    pub log_r_integral: f64,
    pub residual_max: f64,
    pub residual_l2: f64,
}

impl FunctionalReport {
    pub const CSV_HEADER: &'static str = "t,J_alpha,I_q,log_r_integral,residual_max,residual_l2";

    pub fn evaluate(body: &BodySnapshot, f: &AnisotropyF, alpha: f64) -> Result<Self, String> {
        let grid = body.grid();
        let fs = f.sample(grid)?;
        let u = body.support().values();
        let frame = body.frame();
        let residual = soliton_residual_sampled(u, frame, &fs, alpha);
        let (residual_max, residual_l2) = residual_norms(&residual, grid);
        Ok(Self {
            j_alpha: functional_j_sampled(grid, u, frame, &fs, alpha),
            i_q: i_q(grid, frame, q_exponent(grid.dim(), alpha)),
            log_r_integral: log_r(grid, frame),
            residual_max,
            residual_l2,
        })
    }

    pub fn csv_row(&self, t: f64) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t, self.j_alpha, self.i_q, self.log_r_integral, self.residual_max, self.residual_l2
        );
        s
    }
}

/// Outcome of the Aleksandrov admissibility checks on `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct AleksandrovReport {
    /// `|∫ f − |Sⁿ||`.
    pub cdt1_error: f64,
    /// Every tested window satisfied `∫_ω f < |Sⁿ| − |ω*|`.
    pub cdt2_ok: bool,
    /// Window with the smallest margin, as a normal-angle interval.
    pub worst_window: (f64, f64),
    /// `|Sⁿ| − |ω*| − ∫_ω f` on the worst window.
    pub worst_margin: f64,
    /// Set for n = 2, where only polar caps are tested.
    pub partial: bool,
}

/// Checks `∫ f = |Sⁿ|` and `∫_ω f < |Sⁿ| − |ω*|`.
///
/// For n = 1 every grid arc of length `ℓ < π` is tested (its dual is an arc
/// of length `π − ℓ`). For n = 2 only caps centred at either pole are tested
/// (the dual of a cap of radius `β < π/2` is a cap of radius `π/2 − β`),
/// which makes the check necessary-only.
pub fn aleksandrov_check(f: &AnisotropyF, grid: &SphericalGrid) -> Result<AleksandrovReport, String> {
    let fs = f.sample(grid)?;
    let total: f64 = grid.weights().iter().zip(&fs).map(|(w, f)| w * f).sum();
    let cdt1_error = (total - grid.sphere_measure()).abs();
    let h = grid.spacing();
    let n = grid.len();

    let mut worst_margin = f64::INFINITY;
    let mut worst_window = (0.0, 0.0);
    if grid.dim() == 1 {
        // cell integrals by the trapezoid rule, prefix-summed over two periods
        let mut prefix = vec![0.0; 2 * n + 1];
        for k in 0..2 * n {
            let cell = 0.5 * h * (fs[k % n] + fs[(k + 1) % n]);
            prefix[k + 1] = prefix[k] + cell;
        }
        // arcs of m cells, with m h < π
        let max_cells = (0..n).take_while(|&m| (m as f64) * h < PI - 1e-12).last().unwrap_or(0);
        for start in 0..n {
            for m in 1..=max_cells {
                let len = m as f64 * h;
                let mass = prefix[start + m] - prefix[start];
                let margin = PI + len - mass;
                if margin < worst_margin {
                    worst_margin = margin;
                    worst_window = (grid.nodes()[start], grid.nodes()[start] + len);
                }
            }
        }
    } else {
        let w = grid.weights();
        let cap_mass = |range: &mut dyn Iterator<Item = usize>| {
            let mut acc = Vec::with_capacity(n);
            let mut running = 0.0;
            let mut prev: Option<usize> = None;
            for i in range {
                // trapezoid on 2π sin θ f, grid weights already carry h·2π sin θ
                if let Some(p) = prev {
                    running += 0.5 * (w_full(grid, p) * fs[p] + w_full(grid, i) * fs[i]);
                }
                acc.push((i, running));
                prev = Some(i);
            }
            acc
        };
        let _ = w;
        let north = cap_mass(&mut (0..n));
        let south = cap_mass(&mut (0..n).rev());
        for (from_north, caps) in [(true, north), (false, south)] {
            for (i, mass) in caps {
                let beta = if from_north {
                    grid.nodes()[i]
                } else {
                    PI - grid.nodes()[i]
                };
                if beta <= 0.0 || beta >= PI / 2.0 - 1e-12 {
                    continue;
                }
                let margin = 2.0 * PI * (1.0 + beta.sin()) - mass;
                if margin < worst_margin {
                    worst_margin = margin;
                    worst_window = if from_north { (0.0, beta) } else { (PI - beta, PI) };
                }
            }
        }
    }
    Ok(AleksandrovReport {
        cdt1_error,
        cdt2_ok: worst_margin > 0.0,
        worst_window,
        worst_margin,
        partial: grid.dim() == 2,
    })
}

/// `2π sin θᵢ · h`, the interior trapezoid weight without end halving.
fn w_full(grid: &SphericalGrid, i: usize) -> f64 {
    2.0 * PI * grid.nodes()[i].sin() * grid.spacing()
}
