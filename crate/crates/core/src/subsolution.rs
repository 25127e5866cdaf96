//! The rotationally symmetric comparison profile that pinches a flowing body
//! at the origin when `α < n + 1` and no symmetry is imposed.
//!
//! Near its vertex the body is the graph of `φ(ρ, t)` over the ρ-ball,
//! `t ∈ (−1, 0)`, with a quadratic cap for `ρ < |t|^θ` glued in C¹ fashion to
//! a `ρ^{1+σ}` profile, `σ = (qθ − 1)/(nθ)`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("subsolution parameters out of range: {0}")]
pub struct DomainError(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub theta: f64,
    pub q: f64,
    pub n: usize,
    pub sigma: f64,
}

impl Profile {
    pub fn new(theta: f64, q: f64, n: usize) -> Result<Self, DomainError> {
        if n == 0 {
            return Err(DomainError("n must be at least 1".into()));
        }
        if !(q > 0.0) {
            return Err(DomainError(format!("need q = n+1-alpha > 0, got {q}")));
        }
        if !(theta > 1.0 / q) {
            return Err(DomainError(format!("need theta > 1/q, got theta = {theta}, q = {q}")));
        }
        let sigma = (q * theta - 1.0) / (n as f64 * theta);
        Ok(Self { theta, q, n, sigma })
    }

    pub fn alpha(&self) -> f64 {
        (self.n + 1) as f64 - self.q
    }

    /// Radius `|t|^θ` where the two branches meet.
    pub fn switch_radius(&self, t: f64) -> f64 {
        t.abs().powf(self.theta)
    }

    fn check(&self, t: f64, rho: f64) -> Result<(), DomainError> {
        if !(t > -1.0 && t < 0.0) {
            return Err(DomainError(format!("need t in (-1, 0), got {t}")));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(DomainError(format!("need rho in [0, 1], got {rho}")));
        }
        Ok(())
    }

    fn inner(&self, s: f64, rho: f64) -> [f64; 4] {
        // value, ∂ρ, ∂ρρ, ∂t  (s = |t|, ∂t = −∂s)
        let (th, sg) = (self.theta, self.sigma);
        let c = s.powf(th * (sg - 1.0));
        [
            -s.powf(th) + c * rho * rho,
            2.0 * c * rho,
            2.0 * c,
            th * s.powf(th - 1.0) - th * (sg - 1.0) * s.powf(th * (sg - 1.0) - 1.0) * rho * rho,
        ]
    }

    fn outer(&self, s: f64, rho: f64) -> [f64; 4] {
        let (th, sg) = (self.theta, self.sigma);
        let c = (1.0 - sg) / (1.0 + sg);
        [
            -s.powf(th) - c * s.powf(th * (1.0 + sg)) + 2.0 / (1.0 + sg) * rho.powf(1.0 + sg),
            2.0 * rho.powf(sg),
            2.0 * sg * rho.powf(sg - 1.0),
            th * s.powf(th - 1.0) + c * th * (1.0 + sg) * s.powf(th * (1.0 + sg) - 1.0),
        ]
    }

    fn eval_all(&self, t: f64, rho: f64) -> [f64; 4] {
        let s = t.abs();
        if rho < self.switch_radius(t) {
            self.inner(s, rho)
        } else {
            self.outer(s, rho)
        }
    }

    pub fn value(&self, t: f64, rho: f64) -> Result<f64, DomainError> {
        self.check(t, rho)?;
        Ok(self.eval_all(t, rho)[0])
    }

    /// `r^α K` of the graph at `(ρ, φ(ρ, t))`, where `K` is the Gauss
    /// curvature of the rotation graph and `r` the distance to the origin.
    pub fn speed(&self, t: f64, rho: f64) -> Result<f64, DomainError> {
        self.check(t, rho)?;
        let [phi, d1, d2, _] = self.eval_all(t, rho);
        let n = self.n as i32;
        let rotational = if rho > 0.0 { d1 / rho } else { d2 };
        let k = d2 * rotational.powi(n - 1) / (1.0 + d1 * d1).powf((n + 2) as f64 / 2.0);
        let r = rho.hypot(phi);
        Ok(r.powf(self.alpha()) * k)
    }

    /// `|∂ₜ φ|`, the normal-direction speed of the graph point.
    pub fn time_derivative(&self, t: f64, rho: f64) -> Result<f64, DomainError> {
        self.check(t, rho)?;
        Ok(self.eval_all(t, rho)[3].abs())
    }

    /// Largest mismatch in value or slope between the two branches at the
    /// switch radius.
    pub fn c1_defect(&self, t: f64) -> f64 {
        let s = t.abs();
        let rho = self.switch_radius(t);
        let a = self.inner(s, rho);
        let b = self.outer(s, rho);
        (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
    }
}

/// Two-branch profile value `φ(ρ, t)`.
pub fn subsolution_profile(theta: f64, q: f64, n: usize, t: f64, rho: f64) -> Result<f64, DomainError> {
    Profile::new(theta, q, n)?.value(t, rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolutionReport {
    /// `min r^α K / |t|^{θ−1}` over samples with `ρ < |t|^θ`.
    pub inner_margin: f64,
    /// `min r^α K / |t|^{θ−1}` over samples with `ρ ≥ |t|^θ`: the constant
    /// the outer inequality holds with.
    pub outer_constant: f64,
    /// Largest C¹ mismatch at the switch radius over the sampled times.
    pub c1_defect: f64,
    /// `max |∂ₜφ| / (θ|t|^{θ−1})` over all samples.
    pub speed_ratio: f64,
    pub inner_samples: usize,
    pub outer_samples: usize,
}

/// Evaluates the subsolution inequalities at `(ρ, t)` samples.
pub fn verify_subsolution(
    theta: f64,
    q: f64,
    n: usize,
    samples: &[(f64, f64)],
) -> Result<SubsolutionReport, DomainError> {
    let p = Profile::new(theta, q, n)?;
    let mut rep = SubsolutionReport {
        inner_margin: f64::INFINITY,
        outer_constant: f64::INFINITY,
        c1_defect: 0.0,
        speed_ratio: 0.0,
        inner_samples: 0,
        outer_samples: 0,
    };
    for &(rho, t) in samples {
        let scale = t.abs().powf(theta - 1.0);
        let ratio = p.speed(t, rho)? / scale;
        if rho < p.switch_radius(t) {
            rep.inner_margin = rep.inner_margin.min(ratio);
            rep.inner_samples += 1;
        } else {
            rep.outer_constant = rep.outer_constant.min(ratio);
            rep.outer_samples += 1;
        }
        rep.c1_defect = rep.c1_defect.max(p.c1_defect(t));
        rep.speed_ratio = rep.speed_ratio.max(p.time_derivative(t, rho)? / (theta * scale));
    }
    Ok(rep)
}

/// `times × (inner + outer)` grid of samples: `times` values of `t` spread
/// evenly over `[t_lo, t_hi]` and, for each, `inner` radii inside the cap and
/// `outer` radii across `[|t|^θ, 1]`.
pub fn sample_grid(
    theta: f64,
    t_lo: f64,
    t_hi: f64,
    times: usize,
    inner: usize,
    outer: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(times * (inner + outer));
    for i in 0..times {
        let t = if times == 1 {
            t_lo
        } else {
            t_lo + (t_hi - t_lo) * i as f64 / (times - 1) as f64
        };
        let s = t.abs().powf(theta);
        for j in 0..inner {
            out.push((s * j as f64 / inner as f64, t));
        }
        for j in 0..outer {
            let rho = if outer == 1 {
                s
            } else if j + 1 == outer {
                1.0
            } else {
                s + (1.0 - s) * j as f64 / (outer - 1) as f64
            };
            out.push((rho, t));
        }
    }
    out
}
