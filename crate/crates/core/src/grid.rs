//! Uniform grids on S¹ and on the axisymmetric S², with finite-difference
//! operators and quadrature.
//!
//! For `n = 1` the grid is periodic: `θᵢ = 2πi/N` on `[0, 2π)`. For `n = 2`
//! the nodes are polar angles `θᵢ = πi/(N−1)` on `[0, π]`, both endpoints are
//! poles, and node values describe a profile that is even across each pole.
//! Derivative stencils reach past the ends through ghost values obtained by
//! wraparound (n = 1) or even reflection (n = 2).

use std::f64::consts::PI;

use crate::error::GridError;

/// Smallest accepted node count.
pub const MIN_NODES: usize = 16;

/// Order of the centered finite-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Three-point (first derivative: two-point) centered stencils, error O(h²).
    Second,
    /// Five-point centered stencils, error O(h⁴).
    Fourth,
}

/// Discretization of Sⁿ, `n ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
}

impl SphericalGrid {
    pub fn new(dim: usize, node_count: usize) -> Result<Self, GridError> {
        match dim {
            1 => Self::circle(node_count),
            2 => Self::axisymmetric_sphere(node_count),
            other => Err(GridError::UnsupportedDimension(other)),
        }
    }

    /// Periodic grid on the unit circle.
    pub fn circle(node_count: usize) -> Result<Self, GridError> {
        if node_count < MIN_NODES {
            return Err(GridError::TooFewNodes(node_count));
        }
        let spacing = 2.0 * PI / node_count as f64;
        let nodes = (0..node_count).map(|i| i as f64 * spacing).collect();
        let weights = vec![spacing; node_count];
        Ok(Self {
            dim: 1,
            nodes,
            weights,
            spacing,
        })
    }

    /// Polar-angle grid on `[0, π]` for rotationally symmetric data on S².
    ///
    /// Weights are the trapezoid rule applied to `2π sin θ`, so they vanish at
    /// the poles and sum to `4π` up to O(h²).
    pub fn axisymmetric_sphere(node_count: usize) -> Result<Self, GridError> {
        if node_count < MIN_NODES {
            return Err(GridError::TooFewNodes(node_count));
        }
        let spacing = PI / (node_count - 1) as f64;
        let nodes: Vec<f64> = (0..node_count).map(|i| i as f64 * spacing).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, &theta)| {
                let end = if i == 0 || i == node_count - 1 { 0.5 } else { 1.0 };
                end * spacing * 2.0 * PI * theta.sin()
            })
            .collect();
        Ok(Self {
            dim: 2,
            nodes,
            weights,
            spacing,
        })
    }

    /// The sphere dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Uniform node spacing `h`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn is_periodic(&self) -> bool {
        self.dim == 1
    }

    /// Exact area `|Sⁿ|` (2π or 4π).
    pub fn sphere_measure(&self) -> f64 {
        if self.dim == 1 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    /// Length of the angular domain covered by the nodes (2π or π).
    pub fn period(&self) -> f64 {
        if self.dim == 1 {
            2.0 * PI
        } else {
            PI
        }
    }

    /// Index of the node paired with `i` under the antipodal map
    /// (`θ ↦ θ + π` on S¹, `θ ↦ π − θ` on the axisymmetric S²).
    pub fn antipode(&self, i: usize) -> usize {
        let n = self.len();
        if self.dim == 1 {
            assert!(n.is_multiple_of(2), "antipodal pairing needs an even node count");
            (i + n / 2) % n
        } else {
            n - 1 - i
        }
    }

    /// Maps a possibly out-of-range index to a node, using wraparound or
    /// even reflection across the poles.
    pub fn ghost_index(&self, i: isize) -> usize {
        let n = self.len() as isize;
        if self.dim == 1 {
            i.rem_euclid(n) as usize
        } else {
            let m = n - 1;
            let mut j = i.rem_euclid(2 * m);
            if j > m {
                j = 2 * m - j;
            }
            j as usize
        }
    }

    /// Value of `g` at a ghost-extended index.
    #[inline]
    pub fn ghost(&self, g: &[f64], i: isize) -> f64 {
        g[self.ghost_index(i)]
    }

    fn check_len(&self, g: &[f64]) {
        assert_eq!(
            g.len(),
            self.len(),
            "node value count does not match the grid"
        );
    }
}

/// Centered second-order first derivative.
pub fn deriv1(g: &[f64], grid: &SphericalGrid) -> Vec<f64> {
    deriv1_with(g, grid, Stencil::Second)
}

/// Centered second-order second derivative.
pub fn deriv2(g: &[f64], grid: &SphericalGrid) -> Vec<f64> {
    deriv2_with(g, grid, Stencil::Second)
}

pub fn deriv1_with(g: &[f64], grid: &SphericalGrid, stencil: Stencil) -> Vec<f64> {
    let h = grid.spacing();
    match stencil {
        Stencil::Second => apply_stencil(g, grid, [0.0, -0.5, 0.0, 0.5, 0.0], 1.0 / h),
        Stencil::Fourth => apply_stencil(g, grid, [1.0, -8.0, 0.0, 8.0, -1.0], 1.0 / (12.0 * h)),
    }
}

pub fn deriv2_with(g: &[f64], grid: &SphericalGrid, stencil: Stencil) -> Vec<f64> {
    let h2 = grid.spacing() * grid.spacing();
    match stencil {
        Stencil::Second => apply_stencil(g, grid, [0.0, 1.0, -2.0, 1.0, 0.0], 1.0 / h2),
        Stencil::Fourth => {
            apply_stencil(g, grid, [-1.0, 16.0, -30.0, 16.0, -1.0], 1.0 / (12.0 * h2))
        }
    }
}

/// `scale · Σₖ c[k] g[i+k−2]` with ghost values near the ends.
///
/// The coefficients sum to zero, so the stencil is evaluated on differences
/// from the centre value. Those differences are exact in floating point for
/// nearby values, which keeps the rounding error of second differences at
/// the size of the differences instead of the size of `g`.
fn apply_stencil(g: &[f64], grid: &SphericalGrid, c: [f64; 5], scale: f64) -> Vec<f64> {
    grid.check_len(g);
    debug_assert_eq!(c.iter().sum::<f64>(), 0.0);
    let n = g.len();
    let mut out = vec![0.0; n];
    let combine = |p: [f64; 5]| {
        let m = p[2];
        scale * (c[0] * (p[0] - m) + c[1] * (p[1] - m) + c[3] * (p[3] - m) + c[4] * (p[4] - m))
    };
    for (i, w) in g.windows(5).enumerate() {
        out[i + 2] = combine([w[0], w[1], w[2], w[3], w[4]]);
    }
    for i in [0, 1, n - 2, n - 1] {
        let at = |k: isize| grid.ghost(g, i as isize + k);
        out[i] = combine([at(-2), at(-1), at(0), at(1), at(2)]);
    }
    out
}

/// `Σ wᵢ gᵢ`, the quadrature of `g` over Sⁿ.
pub fn integrate(g: &[f64], grid: &SphericalGrid) -> f64 {
    grid.check_len(g);
    g.iter().zip(grid.weights()).map(|(g, w)| g * w).sum()
}

/// Cubic (four-point Lagrange) interpolation of node values at angle `theta`.
///
/// On S¹ the angle is taken modulo 2π; on the axisymmetric S² it is reflected
/// into `[0, π]`.
pub fn interpolate(g: &[f64], grid: &SphericalGrid, theta: f64) -> f64 {
    grid.check_len(g);
    let h = grid.spacing();
    let s = theta / h;
    let base = s.floor();
    let t = s - base;
    let i = base as isize;
    let p = [
        grid.ghost(g, i - 1),
        grid.ghost(g, i),
        grid.ghost(g, i + 1),
        grid.ghost(g, i + 2),
    ];
    lagrange4(p, t)
}

#[inline]
fn lagrange4(p: [f64; 4], t: f64) -> f64 {
    // nodes at -1, 0, 1, 2
    let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    p[0] * l0 + p[1] * l1 + p[2] * l2 + p[3] * l3
}

/// Integral of `g` over the angular interval `[a, b]` (`a ≤ b`) against the
/// sphere's measure (`dθ` on S¹, `2π sin θ dθ` on the axisymmetric S²).
///
/// Each cell is integrated with three-point Gauss–Legendre applied to the
/// local cubic interpolant, so partial cells at the interval ends keep
/// fourth-order accuracy. On S¹ intervals may wrap past 2π.
pub fn integrate_interval(g: &[f64], grid: &SphericalGrid, a: f64, b: f64) -> f64 {
    grid.check_len(g);
    assert!(b >= a, "interval must satisfy a <= b");
    let (a, b) = if grid.is_periodic() {
        (a, b.min(a + 2.0 * PI))
    } else {
        (a.clamp(0.0, PI), b.clamp(0.0, PI))
    };
    if b <= a {
        return 0.0;
    }
    const GL_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const GL_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let h = grid.spacing();
    let first = (a / h).floor() as isize;
    let last = (b / h).ceil() as isize;
    let mut total = 0.0;
    for cell in first..last {
        let lo = (cell as f64 * h).max(a);
        let hi = ((cell + 1) as f64 * h).min(b);
        if hi <= lo {
            continue;
        }
        let p = [
            grid.ghost(g, cell - 1),
            grid.ghost(g, cell),
            grid.ghost(g, cell + 1),
            grid.ghost(g, cell + 2),
        ];
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (x, w) in GL_X.iter().zip(GL_W) {
            let theta = mid + half * x;
            let t = theta / h - cell as f64;
            let density = if grid.is_periodic() {
                1.0
            } else {
                2.0 * PI * theta.sin()
            };
            total += w * half * lagrange4(p, t) * density;
        }
    }
    total
}
