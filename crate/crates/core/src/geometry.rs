//! Support-function and radial-function representations of convex bodies.
//!
//! A body enclosing the origin is stored by its support function `u(x)` on
//! the normal-angle grid. Everything else (principal radii, Gauss curvature,
//! boundary points, the radial function, the polar dual) is derived from it.
//!
//! Derivatives of `u` use the fourth-order stencils of [`crate::grid`]; the
//! quantities below enter quadratures whose accuracy targets are far below
//! what second-order differences deliver at practical resolutions.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::GeometryError;
use crate::grid::{deriv1_with, deriv2_with, integrate, interpolate, SphericalGrid, Stencil};

/// Stencil used for every derivative of `u` and `r`.
pub const GEOMETRY_STENCIL: Stencil = Stencil::Fourth;

/// Support function samples `u(xᵢ)` of a uniformly convex body that contains
/// the origin in its interior.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFn {
    grid: Arc<SphericalGrid>,
    values: Vec<f64>,
}

impl SupportFn {
    /// Validates positivity of `u` and of every principal radius.
    pub fn new(grid: Arc<SphericalGrid>, values: Vec<f64>) -> Result<Self, GeometryError> {
        if values.len() != grid.len() {
            return Err(GeometryError::SizeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let radii = radii_unchecked(&grid, &values);
        check_positive(&grid, &values, &radii)?;
        Ok(Self { grid, values })
    }

    /// As [`SupportFn::new`], also returning the normal frame computed
    /// during validation.
    pub fn new_with_frame(
        grid: Arc<SphericalGrid>,
        values: Vec<f64>,
    ) -> Result<(Self, NormalFrame), GeometryError> {
        if values.len() != grid.len() {
            return Err(GeometryError::SizeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let frame = NormalFrame::from_values(&grid, &values)?;
        Ok((Self { grid, values }, frame))
    }

    pub fn from_fn(
        grid: Arc<SphericalGrid>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GeometryError> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    /// Sphere of radius `rho` centred at the origin.
    pub fn sphere(grid: Arc<SphericalGrid>, rho: f64) -> Result<Self, GeometryError> {
        Self::from_fn(grid, |_| rho)
    }

    /// Ellipse with semi-axes `a` (along θ = 0) and `b` for n = 1. For n = 2
    /// the spheroid of revolution with equatorial semi-axis `a` and polar
    /// semi-axis `b`.
    pub fn ellipse(grid: Arc<SphericalGrid>, a: f64, b: f64) -> Result<Self, GeometryError> {
        if grid.dim() == 1 {
            Self::from_fn(grid, |t| (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt())
        } else {
            Self::from_fn(grid, |t| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt())
        }
    }

    /// Unit disk (ball) translated by `c` along the θ = 0 axis: `u = 1 + c cos θ`.
    pub fn shifted_disk(grid: Arc<SphericalGrid>, c: f64) -> Result<Self, GeometryError> {
        Self::from_fn(grid, |t| 1.0 + c * t.cos())
    }

    /// `u = c₀ + Σₖ aₖ cos kθ + bₖ sin kθ`, with `coeffs[k-1] = (aₖ, bₖ)`.
    pub fn fourier(
        grid: Arc<SphericalGrid>,
        c0: f64,
        coeffs: &[(f64, f64)],
    ) -> Result<Self, GeometryError> {
        Self::from_fn(grid, |t| fourier_eval(c0, coeffs, t))
    }

    pub fn grid(&self) -> &SphericalGrid {
        &self.grid
    }

    pub fn shared_grid(&self) -> &Arc<SphericalGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Dilation by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0, "dilation factor must be positive");
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|u| u * lambda).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn fourier_eval(c0: f64, coeffs: &[(f64, f64)], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .fold(c0, |acc, (k, (a, b))| {
            let k = (k + 1) as f64;
            acc + a * (k * t).cos() + b * (k * t).sin()
        })
}

/// Principal radii per node. `second` is present only for n = 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Radii {
    pub first: Vec<f64>,
    pub second: Option<Vec<f64>>,
}

impl Radii {
    /// Smallest principal radius at node `i`.
    pub fn min_at(&self, i: usize) -> f64 {
        match &self.second {
            Some(s) => self.first[i].min(s[i]),
            None => self.first[i],
        }
    }

    /// `det(∇²u + u I)` at node `i`.
    pub fn det_at(&self, i: usize) -> f64 {
        match &self.second {
            Some(s) => self.first[i] * s[i],
            None => self.first[i],
        }
    }

    pub fn max_at(&self, i: usize) -> f64 {
        match &self.second {
            Some(s) => self.first[i].max(s[i]),
            None => self.first[i],
        }
    }
}

fn radii_from_derivs(grid: &SphericalGrid, u: &[f64], du: &[f64], d2u: &[f64]) -> Radii {
    let first: Vec<f64> = u.iter().zip(d2u).map(|(u, d2)| d2 + u).collect();
    let second = (grid.dim() == 2).then(|| {
        let last = grid.len() - 1;
        grid.nodes()
            .iter()
            .enumerate()
            .map(|(i, &theta)| {
                if i == 0 || i == last {
                    // limit of u' cot θ + u at a pole
                    first[i]
                } else {
                    du[i] / theta.tan() + u[i]
                }
            })
            .collect()
    });
    Radii { first, second }
}

fn radii_unchecked(grid: &SphericalGrid, u: &[f64]) -> Radii {
    let du = deriv1_with(u, grid, GEOMETRY_STENCIL);
    let d2u = deriv2_with(u, grid, GEOMETRY_STENCIL);
    radii_from_derivs(grid, u, &du, &d2u)
}

fn check_positive(grid: &SphericalGrid, u: &[f64], radii: &Radii) -> Result<(), GeometryError> {
    let mut worst: Option<(usize, &'static str, f64)> = None;
    let mut consider = |i: usize, what: &'static str, v: f64| {
        if !(v > 0.0) && worst.is_none_or(|(_, _, w)| v < w || v.is_nan()) {
            worst = Some((i, what, v));
        }
    };
    for i in 0..u.len() {
        consider(i, "u", u[i]);
        consider(i, "b11", radii.first[i]);
        if let Some(s) = &radii.second {
            consider(i, "b22", s[i]);
        }
    }
    match worst {
        None => Ok(()),
        Some((node, what, value)) => Err(GeometryError::ConvexityLost {
            node,
            theta: grid.nodes()[node],
            what,
            value,
        }),
    }
}

/// Principal radii `b = ∇²u + u I` (n = 1: `u'' + u`; n = 2 axisymmetric:
/// `u'' + u` and `u' cot θ + u`, the latter replaced by `u'' + u` at the poles).
pub fn principal_radii(u: &SupportFn) -> Result<Radii, GeometryError> {
    let radii = radii_unchecked(u.grid(), u.values());
    check_positive(u.grid(), u.values(), &radii)?;
    Ok(radii)
}

/// Gauss curvature `K = 1 / det(∇²u + u I)` per node.
pub fn gauss_curvature(u: &SupportFn) -> Result<Vec<f64>, GeometryError> {
    let radii = principal_radii(u)?;
    Ok((0..u.values().len()).map(|i| 1.0 / radii.det_at(i)).collect())
}

/// Everything that is computed pointwise at the normal-angle nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFrame {
    /// `∂u/∂θ`.
    pub du: Vec<f64>,
    pub radii: Radii,
    /// Gauss curvature at the boundary point with normal `xᵢ`.
    pub gauss: Vec<f64>,
    /// Distance `√(u² + |∇u|²)` from the origin to that boundary point.
    pub radius: Vec<f64>,
    /// `|dξ/dx| = u / (r^{n+1} K)`.
    pub jacobian: Vec<f64>,
}

impl NormalFrame {
    pub fn new(u: &SupportFn) -> Result<Self, GeometryError> {
        Self::from_values(u.grid(), u.values())
    }

    fn from_values(grid: &SphericalGrid, values: &[f64]) -> Result<Self, GeometryError> {
        let du = deriv1_with(values, grid, GEOMETRY_STENCIL);
        let d2u = deriv2_with(values, grid, GEOMETRY_STENCIL);
        let radii = radii_from_derivs(grid, values, &du, &d2u);
        check_positive(grid, values, &radii)?;
        let power = (grid.dim() + 1) as i32;
        let mut gauss = Vec::with_capacity(values.len());
        let mut radius = Vec::with_capacity(values.len());
        let mut jacobian = Vec::with_capacity(values.len());
        for (i, (&u, &d)) in values.iter().zip(&du).enumerate() {
            let det = radii.det_at(i);
            let r = (u * u + d * d).sqrt();
            gauss.push(1.0 / det);
            radius.push(r);
            jacobian.push(u * det / r.powi(power));
        }
        Ok(Self {
            du,
            radii,
            gauss,
            radius,
            jacobian,
        })
    }

    /// Direction angle `ξ = x + atan2(u', u)` of each boundary point.
    pub fn directions(&self, grid: &SphericalGrid, u: &[f64]) -> Vec<f64> {
        grid.nodes()
            .iter()
            .zip(u.iter().zip(&self.du))
            .map(|(x, (u, d))| x + d.atan2(*u))
            .collect()
    }

    /// `∫_{Sⁿ} g(r(ξ)) dξ` pulled back to the normal parametrization.
    pub fn integrate_over_directions(
        &self,
        grid: &SphericalGrid,
        g: impl Fn(f64) -> f64,
    ) -> f64 {
        grid.weights()
            .iter()
            .zip(self.radius.iter().zip(&self.jacobian))
            .map(|(w, (&r, &j))| w * g(r) * j)
            .sum()
    }

    pub fn radius_min(&self) -> f64 {
        self.radius.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn radius_max(&self) -> f64 {
        self.radius.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Radial function samples `r(ξⱼ)` at the grid nodes read as direction angles.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFn {
    grid: Arc<SphericalGrid>,
    values: Vec<f64>,
}

impl RadialFn {
    /// Validates `r > 0` and convexity of the radial graph.
    pub fn new(grid: Arc<SphericalGrid>, values: Vec<f64>) -> Result<Self, GeometryError> {
        if values.len() != grid.len() {
            return Err(GeometryError::SizeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let r = Self { grid, values };
        r.check_convex()?;
        Ok(r)
    }

    pub fn from_fn(
        grid: Arc<SphericalGrid>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GeometryError> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &SphericalGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Evaluates `r² + 2r'² − r r''` (and for n = 2 also `r − r' cot ξ`),
    /// the numerators of the principal curvatures of the radial graph.
    fn check_convex(&self) -> Result<(), GeometryError> {
        let grid = &*self.grid;
        let r = &self.values;
        let dr = deriv1_with(r, grid, GEOMETRY_STENCIL);
        let d2r = deriv2_with(r, grid, GEOMETRY_STENCIL);
        let last = grid.len() - 1;
        for i in 0..r.len() {
            let fail = |what, value| GeometryError::ConvexityLost {
                node: i,
                theta: grid.nodes()[i],
                what,
                value,
            };
            if !(r[i] > 0.0) {
                return Err(fail("r", r[i]));
            }
            let meridian = r[i] * r[i] + 2.0 * dr[i] * dr[i] - r[i] * d2r[i];
            if !(meridian > 0.0) {
                return Err(fail("r^2+2r'^2-rr''", meridian));
            }
            if grid.dim() == 2 {
                let azimuthal = if i == 0 || i == last {
                    r[i] - d2r[i]
                } else {
                    r[i] - dr[i] / grid.nodes()[i].tan()
                };
                if !(azimuthal > 0.0) {
                    return Err(fail("r-r'cot", azimuthal));
                }
            }
        }
        Ok(())
    }
}

/// Derived snapshot of one body: the support function together with its
/// normal-frame data and radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct BodySnapshot {
    support: SupportFn,
    radial: RadialFn,
    frame: NormalFrame,
    xi: Vec<f64>,
    kappa_min: f64,
    kappa_max: f64,
}

impl BodySnapshot {
    pub fn from_support(support: SupportFn) -> Result<Self, GeometryError> {
        let frame = NormalFrame::new(&support)?;
        let xi = frame.directions(support.grid(), support.values());
        let radial = resample_radial(&support, &frame.radius, &xi)?;
        let n = support.values().len();
        let mut kappa_min = f64::INFINITY;
        let mut kappa_max = f64::NEG_INFINITY;
        for i in 0..n {
            kappa_min = kappa_min.min(1.0 / frame.radii.max_at(i));
            kappa_max = kappa_max.max(1.0 / frame.radii.min_at(i));
        }
        Ok(Self {
            support,
            radial,
            frame,
            xi,
            kappa_min,
            kappa_max,
        })
    }

    pub fn grid(&self) -> &SphericalGrid {
        self.support.grid()
    }

    pub fn support(&self) -> &SupportFn {
        &self.support
    }

    pub fn radial(&self) -> &RadialFn {
        &self.radial
    }

    pub fn frame(&self) -> &NormalFrame {
        &self.frame
    }

    /// Gauss curvature as a function of the normal angle.
    pub fn gauss(&self) -> &[f64] {
        &self.frame.gauss
    }

    /// Direction angle `ξ = 𝒜*(x)` per node.
    pub fn xi_of_x(&self) -> &[f64] {
        &self.xi
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappa_min
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    /// Writes the plain-text node table: a header with `n`, `N`, `t`, then
    /// one line `theta u r K b11 [b22]` per node.
    pub fn to_table(&self, t: f64) -> String {
        let grid = self.grid();
        let mut out = String::new();
        let _ = writeln!(out, "# n {} N {} t {:.16e}", grid.dim(), grid.len(), t);
        if grid.dim() == 1 {
            out.push_str("# theta u r K b11\n");
        } else {
            out.push_str("# theta u r K b11 b22\n");
        }
        for i in 0..grid.len() {
            let _ = write!(
                out,
                "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                grid.nodes()[i],
                self.support.values()[i],
                self.radial.values()[i],
                self.frame.gauss[i],
                self.frame.radii.first[i]
            );
            if let Some(s) = &self.frame.radii.second {
                let _ = write!(out, " {:.16e}", s[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Contents of a snapshot table read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotTable {
    pub dim: usize,
    pub node_count: usize,
    pub t: f64,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
}

/// Parses a table written by [`BodySnapshot::to_table`].
pub fn parse_table(text: &str) -> Result<SnapshotTable, String> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or("empty snapshot table")?;
    let fields: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let (dim, node_count, t) = match fields.as_slice() {
        ["n", n, "N", big_n, "t", t] => (
            n.parse::<usize>().map_err(|e| format!("line 1: bad n: {e}"))?,
            big_n.parse::<usize>().map_err(|e| format!("line 1: bad N: {e}"))?,
            t.parse::<f64>().map_err(|e| format!("line 1: bad t: {e}"))?,
        ),
        _ => return Err("line 1: expected header '# n <n> N <N> t <t>'".into()),
    };
    let mut theta = Vec::with_capacity(node_count);
    let mut u = Vec::with_capacity(node_count);
    for (k, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() < 2 {
            return Err(format!("line {}: expected at least theta and u", k + 1));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| format!("line {}: {e}: '{s}'", k + 1))
        };
        theta.push(parse(cols[0])?);
        u.push(parse(cols[1])?);
    }
    if u.len() != node_count {
        return Err(format!(
            "header announces {node_count} nodes, table has {}",
            u.len()
        ));
    }
    Ok(SnapshotTable {
        dim,
        node_count,
        t,
        theta,
        u,
    })
}

/// Number of nodes on each side used by the local resampling interpolant.
const RESAMPLE_HALF_WIDTH: usize = 3;

/// Scattered `(ξᵢ, rᵢ)` pairs extended past the ends of the domain by
/// periodicity (n = 1) or reflection across the poles (n = 2).
fn extended_pairs(
    grid: &SphericalGrid,
    xi: &[f64],
    r: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = xi.len();
    let pad = RESAMPLE_HALF_WIDTH + 1;
    let mut xs = Vec::with_capacity(n + 2 * pad);
    let mut ys = Vec::with_capacity(n + 2 * pad);
    if grid.is_periodic() {
        // ξ is shifted from the node angles, so keep adding wrapped copies
        // until `pad` of them lie beyond each end of [0, 2π)
        let margin = pad as f64 * grid.spacing();
        let mut front = pad;
        while front < n && xi[n - front] - 2.0 * PI > -margin {
            front += 1;
        }
        for k in (n - front)..n {
            xs.push(xi[k] - 2.0 * PI);
            ys.push(r[k]);
        }
        xs.extend_from_slice(xi);
        ys.extend_from_slice(r);
        let mut back = pad;
        while back < n && xi[back - 1] < margin {
            back += 1;
        }
        for k in 0..back {
            xs.push(xi[k] + 2.0 * PI);
            ys.push(r[k]);
        }
    } else {
        for k in (1..=pad).rev() {
            xs.push(-xi[k]);
            ys.push(r[k]);
        }
        xs.extend_from_slice(xi);
        ys.extend_from_slice(r);
        for k in 1..=pad {
            xs.push(2.0 * PI - xi[n - 1 - k]);
            ys.push(r[n - 1 - k]);
        }
    }
    (xs, ys)
}

/// Local Lagrange interpolation through the `2·RESAMPLE_HALF_WIDTH` nodes
/// surrounding `x` (quintic for the default width).
fn lagrange_local(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let j = xs.partition_point(|&v| v <= x);
    let lo = j.saturating_sub(RESAMPLE_HALF_WIDTH);
    let hi = (lo + 2 * RESAMPLE_HALF_WIDTH).min(xs.len());
    let lo = hi - 2 * RESAMPLE_HALF_WIDTH;
    let mut total = 0.0;
    for a in lo..hi {
        let mut basis = 1.0;
        for b in lo..hi {
            if a != b {
                basis *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        total += basis * ys[a];
    }
    total
}

fn resample_radial(support: &SupportFn, radius: &[f64], xi: &[f64]) -> Result<RadialFn, GeometryError> {
    let grid = support.grid();
    let n = xi.len();
    // ξ(x) must be strictly increasing for the radial graph to be single valued
    for i in 0..n {
        let gap = if i + 1 < n {
            xi[i + 1] - xi[i]
        } else if grid.is_periodic() {
            xi[0] + 2.0 * PI - xi[i]
        } else {
            break;
        };
        if !(gap > 0.0) {
            return Err(GeometryError::ConvexityLost {
                node: i,
                theta: grid.nodes()[i],
                what: "xi increment",
                value: gap,
            });
        }
    }
    let (xs, ys) = extended_pairs(grid, xi, radius);
    let values = grid
        .nodes()
        .iter()
        .map(|&theta| lagrange_local(&xs, &ys, theta))
        .collect();
    RadialFn::new(Arc::clone(support.shared_grid()), values)
}

/// Radial function of the body: boundary points `u x + ∇u` located at their
/// direction angles, then resampled onto the grid nodes.
pub fn radial_from_support(u: &SupportFn) -> Result<RadialFn, GeometryError> {
    let frame = NormalFrame::new(u)?;
    let xi = frame.directions(u.grid(), u.values());
    resample_radial(u, &frame.radius, &xi)
}

/// Discrete Legendre transform `u(x) = max_ξ r(ξ)⟨x, ξ⟩`, with a three-point
/// parabolic refinement of the discrete maximum.
pub fn support_from_radial(r: &RadialFn) -> Result<SupportFn, GeometryError> {
    let grid = r.grid();
    let nodes = grid.nodes();
    let rv = r.values();
    let n = nodes.len() as isize;
    let values = nodes
        .iter()
        .map(|&x| {
            let sample = |j: isize| {
                let k = grid.ghost_index(j);
                // ghost directions keep their true angular offset from x
                let xi = j as f64 * grid.spacing();
                rv[k] * (x - xi).cos()
            };
            let (best, best_val) = (0..n)
                .map(|j| (j, sample(j)))
                .fold((0, f64::NEG_INFINITY), |acc, (j, v)| {
                    if v > acc.1 {
                        (j, v)
                    } else {
                        acc
                    }
                });
            let (gm, g0, gp) = (sample(best - 1), best_val, sample(best + 1));
            let curvature = 2.0 * g0 - gm - gp;
            if curvature > 0.0 {
                g0 + (gp - gm).powi(2) / (8.0 * curvature)
            } else {
                g0
            }
        })
        .collect();
    SupportFn::new(Arc::clone(&r.grid), values)
}

/// Polar dual body: its support function is `u*(ξ) = 1 / r(ξ)`.
pub fn polar_dual(body: &BodySnapshot) -> Result<BodySnapshot, GeometryError> {
    let values = body.radial().values().iter().map(|r| 1.0 / r).collect();
    BodySnapshot::from_support(SupportFn::new(
        Arc::clone(body.support().shared_grid()),
        values,
    )?)
}

/// Largest deviation from 1 of `u^{n+2} (u*)^{n+2} / (K K*)` over paired
/// points `p ∈ M`, `p* ∈ M*` with `p·p* = 1`.
pub fn duality_product_check(body: &BodySnapshot) -> Result<f64, GeometryError> {
    let dual = polar_dual(body)?;
    Ok(duality_product_deviation(body, &dual))
}

/// As [`duality_product_check`] with a precomputed dual. The dual quantities
/// are interpolated at the direction angles `ξ(xᵢ)`, which are the normals
/// of the dual body at the paired points.
pub fn duality_product_deviation(body: &BodySnapshot, dual: &BodySnapshot) -> f64 {
    let grid = body.grid();
    let power = (grid.dim() + 2) as i32;
    let u = body.support().values();
    (0..grid.len())
        .map(|i| {
            let xi = body.xi_of_x()[i];
            let u_dual = interpolate(dual.support().values(), dual.grid(), xi);
            let k_dual = interpolate(dual.gauss(), dual.grid(), xi);
            let product = (u[i] * u_dual).powi(power) / (body.gauss()[i] * k_dual);
            (product - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Enclosed volume `(1/(n+1)) ∫ u/K dx`.
pub fn volume(body: &BodySnapshot) -> f64 {
    let grid = body.grid();
    let integrand: Vec<f64> = body
        .support()
        .values()
        .iter()
        .zip(body.gauss())
        .map(|(u, k)| u / k)
        .collect();
    integrate(&integrand, grid) / (grid.dim() + 1) as f64
}

/// Enclosed volume from the radial function, `(1/(n+1)) ∫ r^{n+1} dξ`.
pub fn volume_from_radial(r: &RadialFn) -> f64 {
    let grid = r.grid();
    let power = (grid.dim() + 1) as i32;
    let integrand: Vec<f64> = r.values().iter().map(|r| r.powi(power)).collect();
    integrate(&integrand, grid) / (grid.dim() + 1) as f64
}
