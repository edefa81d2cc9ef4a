//! Directional cost model for driving on inclined surfaces.
//!
//! The cost of moving one meter at a node depends on the local steepness
//! `alpha` and the relative heading `beta` (signed angle from the downhill
//! aspect to the vehicle heading, so `beta = 0` is straight descent and
//! `beta = ±pi` straight ascent). The model combines:
//!
//! - drawbar-pull resistance: rolling resistance `rho` plus the gravity
//!   component along the pitch axis;
//! - a quadratic Bezier replacement of the near-zero cost region around
//!   `alpha = arctan(rho)`, where gravity would otherwise cancel rolling
//!   resistance and the cost of braked descent would hit zero;
//! - steepness-dependent slip: a longitudinal slip ratio inflating the
//!   ascent/descent component and a slip angle inflating the lateral one;
//! - an optional roll weight `1 + k*tan(alpha)` multiplying the lateral
//!   component to penalize side-slope traverses.
//!
//! The reciprocal of the cost over all headings traces a displaced ellipse
//! with axes parallel to the aspect frame, so the whole directional profile
//! at one steepness is captured by four anchor costs (descent, ascent, and
//! the two laterals). [`ellipse_from_anchors`] builds that conic and
//! [`CostEllipse::eval_cost`] evaluates it at any heading; planners consume
//! the ellipse, its anisotropy ratio, and the equal-area isotropic
//! equivalent.
//!
//! All costs are per meter of 2D-projected travel: the `m*g/v` factor is
//! folded in, so integrating cost along the planar path yields the total.

use crate::error::Error;
use crate::geom::Vec2;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Physical parameters of the vehicle-terrain interaction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Rolling-resistance coefficient, dimensionless, in (0, 1).
    pub rho: f64,
    /// Effective mass (cost-unit * s^2 / m).
    pub mass: f64,
    /// Gravity, m/s^2.
    pub gravity: f64,
    /// Commanded speed, m/s.
    pub speed: f64,
    /// Half-width of the braking band around `arctan(rho)`, radians.
    pub alpha_margin: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            rho: 0.45,
            mass: 2.43,
            gravity: 9.8,
            speed: 0.5,
            alpha_margin: 15f64.to_radians(),
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("rho must be in (0, 1), got {}", self.rho)));
        }
        for (name, v) in [("mass", self.mass), ("gravity", self.gravity), ("speed", self.speed)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let limit = self.rho.atan() + PI / 4.0;
        if !(self.alpha_margin > 0.0 && self.alpha_margin < limit) {
            return Err(Error::Config(format!(
                "alpha margin must be in (0, {limit:.4}) rad, got {}",
                self.alpha_margin
            )));
        }
        Ok(())
    }

    /// Cost-per-meter scale factor `m * g / v`.
    pub fn unit_scale(&self) -> f64 {
        self.mass * self.gravity / self.speed
    }

    /// Braking band `(alpha_lo, alpha_hi)` around `arctan(rho)`.
    pub fn braking_band(&self) -> (f64, f64) {
        let pivot = self.rho.atan();
        ((pivot - self.alpha_margin).max(0.0), pivot + self.alpha_margin)
    }
}

/// Parametric slip-curve families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlipFamily {
    None,
    Linear,
    Exponential,
}

/// Steepness-dependent slip: ratio `s_r(alpha)` (longitudinal) and angle
/// `s_a(alpha)` (lateral), both zero on flat ground and non-decreasing.
///
/// The linear family clamps below the singular values (`s_r = 1`,
/// `s_a = pi/2`) with a safety gap `epsilon`; the exponential family
/// saturates below them by construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlipModel {
    pub family: SlipFamily,
    pub c_r: f64,
    pub c_a: f64,
    pub epsilon: f64,
}

impl Default for SlipModel {
    fn default() -> Self {
        SlipModel { family: SlipFamily::None, c_r: 0.0, c_a: 0.0, epsilon: 0.05 }
    }
}

impl SlipModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn linear(c_r: f64, c_a: f64) -> Self {
        SlipModel { family: SlipFamily::Linear, c_r, c_a, epsilon: 0.05 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!(
                "slip epsilon must be in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        if self.c_r < 0.0 || self.c_a < 0.0 {
            return Err(Error::Config("slip coefficients must be non-negative".into()));
        }
        Ok(())
    }

    /// Slip ratio `s_r(alpha)`, clamped to `[0, 1 - epsilon]`.
    pub fn ratio(&self, alpha: f64) -> f64 {
        let cap = 1.0 - self.epsilon;
        match self.family {
            SlipFamily::None => 0.0,
            SlipFamily::Linear => (self.c_r * alpha.tan()).min(cap),
            SlipFamily::Exponential => cap * (1.0 - (-self.c_r * alpha.tan()).exp()),
        }
    }

    /// Slip angle `s_a(alpha)` in radians, clamped to `[0, pi/2 - epsilon]`.
    pub fn angle(&self, alpha: f64) -> f64 {
        let cap = FRAC_PI_2 - self.epsilon;
        match self.family {
            SlipFamily::None => 0.0,
            SlipFamily::Linear => (self.c_a * alpha).min(cap),
            SlipFamily::Exponential => cap * (1.0 - (-self.c_a * alpha).exp()),
        }
    }

    /// True when the ratio curve has saturated at its clamp for this alpha.
    pub fn ratio_clamped(&self, alpha: f64) -> bool {
        matches!(self.family, SlipFamily::Linear) && self.c_r * alpha.tan() >= 1.0 - self.epsilon
    }

    /// True when the angle curve has saturated at its clamp for this alpha.
    pub fn angle_clamped(&self, alpha: f64) -> bool {
        matches!(self.family, SlipFamily::Linear) && self.c_a * alpha >= FRAC_PI_2 - self.epsilon
    }
}

/// Lateral-cost multiplier `w(alpha) = 1 + k * tan(alpha)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RollWeight {
    pub k: f64,
}

impl Default for RollWeight {
    fn default() -> Self {
        RollWeight { k: 0.0 }
    }
}

impl RollWeight {
    pub fn new(k: f64) -> Self {
        RollWeight { k }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 0.0 {
            return Err(Error::Config(format!("roll weight gain must be >= 0, got {}", self.k)));
        }
        Ok(())
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        1.0 + self.k * alpha.tan()
    }
}

/// The four axis-direction anchor costs at one steepness, cost per meter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalCosts {
    /// Cost at `beta = 0` (straight descent).
    pub descent: f64,
    /// Cost at `beta = ±pi` (straight ascent).
    pub ascent: f64,
    /// Cost at `beta = +pi/2`.
    pub lateral1: f64,
    /// Cost at `beta = -pi/2`.
    pub lateral2: f64,
}

impl DirectionalCosts {
    pub fn uniform(c: f64) -> Self {
        DirectionalCosts { descent: c, ascent: c, lateral1: c, lateral2: c }
    }

    pub fn min(&self) -> f64 {
        self.descent.min(self.ascent).min(self.lateral1).min(self.lateral2)
    }

    pub fn max(&self) -> f64 {
        self.descent.max(self.ascent).max(self.lateral1).max(self.lateral2)
    }
}

/// Signed relative heading: counter-clockwise rotation from the aspect
/// `gamma` to the heading `psi`, in `[-pi, pi]`.
pub fn beta(psi: Vec2, gamma: Vec2) -> Result<f64> {
    for (name, v) in [("psi", psi), ("gamma", gamma)] {
        if (v.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Contract(format!(
                "{name} must be a unit vector, |{name}| = {}",
                v.norm()
            )));
        }
    }
    Ok(gamma.wedge(psi).atan2(gamma.dot(psi)))
}

/// Pitch angle for steepness `alpha` and relative heading `beta`.
///
/// Descent (`beta = 0`) gives `+alpha`, ascent gives `-alpha`.
pub fn pitch(alpha: f64, beta: f64) -> f64 {
    (beta.cos() * alpha.tan()).atan()
}

/// Roll angle for steepness `alpha` and relative heading `beta`.
pub fn roll(alpha: f64, beta: f64) -> f64 {
    (beta.sin() * alpha.tan()).atan()
}

/// Drawbar-pull resistance per meter (times `v`): rolling resistance plus
/// the gravity pull, projected for 2D planning.
pub fn rowe_resistance(alpha: f64, theta: f64, p: &PhysicalParams) -> f64 {
    p.mass * p.gravity * (p.rho * alpha.cos() / theta.cos() - theta.tan())
}

/// Braking cost bridge across the band where gravity cancels rolling
/// resistance.
///
/// A quadratic Bezier in the `(alpha, cost)` plane through
/// `P0 = (alpha_lo, rho - tan(alpha_lo))`, `P1 = (arctan(rho), 0)`, and
/// `P2 = (alpha_hi, tan(alpha_hi) - rho)`; strictly positive inside the
/// band and matching the unbraked cost at both edges.
pub fn bezier_braking(alpha: f64, p: &PhysicalParams) -> Result<f64> {
    let (lo, hi) = p.braking_band();
    let tol = 1e-12;
    if alpha < lo - tol || alpha > hi + tol {
        return Err(Error::Contract(format!(
            "alpha {alpha} outside braking band ({lo}, {hi})"
        )));
    }
    let mid = p.rho.atan();
    let y0 = p.rho - lo.tan();
    let y2 = hi.tan() - p.rho;

    // Solve the (monotone) quadratic alpha(t) = alpha for t in [0, 1].
    let a_q = lo - 2.0 * mid + hi;
    let b_q = 2.0 * (mid - lo);
    let c_q = lo - alpha;
    let t = if a_q.abs() < 1e-14 {
        -c_q / b_q
    } else {
        let disc = b_q * b_q - 4.0 * a_q * c_q;
        if disc < 0.0 {
            return Err(Error::Contract(format!("no Bezier parameter for alpha {alpha}")));
        }
        if disc == 0.0 {
            0.5
        } else {
            let sq = disc.sqrt();
            let t1 = (-b_q + sq) / (2.0 * a_q);
            let t2 = (-b_q - sq) / (2.0 * a_q);
            if (-tol..=1.0 + tol).contains(&t1) {
                t1
            } else {
                t2
            }
        }
    }
    .clamp(0.0, 1.0);

    // The middle control point has zero cost, so its term vanishes.
    Ok((1.0 - t) * (1.0 - t) * y0 + t * t * y2)
}

/// The displaced-ellipse representation of the reciprocal cost at one
/// steepness.
///
/// Normalized conic coefficients (the cross term is zero by construction,
/// keeping the axes parallel to the aspect frame):
///
/// ```text
/// q1*u^2 + q3*v^2 + q4*u + q5*v + 1 = 0,   (u, v) = (r cos b, r sin b),  r = 1/C
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEllipse {
    pub q1: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
    pub anchors: DirectionalCosts,
    /// Half-chord along the aspect axis: `(1/C(0) + 1/C(pi)) / 2`.
    pub a: f64,
    /// Half-chord along the lateral axis: `(1/C(pi/2) + 1/C(-pi/2)) / 2`.
    pub b: f64,
}

/// Build the displaced ellipse interpolating four positive anchor costs.
pub fn ellipse_from_anchors(d: DirectionalCosts) -> Result<CostEllipse> {
    for (name, v) in [
        ("descent", d.descent),
        ("ascent", d.ascent),
        ("lateral1", d.lateral1),
        ("lateral2", d.lateral2),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Contract(format!("anchor {name} must be positive, got {v}")));
        }
    }
    Ok(CostEllipse {
        q1: -d.ascent * d.descent,
        q3: -d.lateral2 * d.lateral1,
        q4: d.ascent - d.descent,
        q5: d.lateral2 - d.lateral1,
        anchors: d,
        a: (1.0 / d.descent + 1.0 / d.ascent) / 2.0,
        b: (1.0 / d.lateral1 + 1.0 / d.lateral2) / 2.0,
    })
}

impl CostEllipse {
    /// Cost per meter at relative heading `beta`: the reciprocal of the
    /// positive radius where the ray at `beta` crosses the ellipse.
    pub fn eval_cost(&self, beta: f64) -> Result<f64> {
        let (c, s) = (beta.cos(), beta.sin());
        let quad = self.q1 * c * c + self.q3 * s * s;
        let lin = self.q4 * c + self.q5 * s;
        // quad < 0 for positive anchors, so the discriminant is positive and
        // exactly one root is positive.
        let disc = lin * lin - 4.0 * quad;
        if disc < 0.0 || quad >= 0.0 {
            return Err(Error::Contract(format!(
                "conic has no positive radius at beta {beta}"
            )));
        }
        let r = (lin + disc.sqrt()) / (-2.0 * quad);
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Contract(format!(
                "conic has no positive radius at beta {beta}"
            )));
        }
        Ok(1.0 / r)
    }

    /// Center of the conic in the `(u, v)` plane.
    fn center(&self) -> (f64, f64) {
        (-self.q4 / (2.0 * self.q1), -self.q5 / (2.0 * self.q3))
    }

    /// True semi-axes of the conic (along u and v).
    fn semi_axes(&self) -> (f64, f64) {
        let k = self.q4 * self.q4 / (4.0 * self.q1) + self.q5 * self.q5 / (4.0 * self.q3) - 1.0;
        ((k / self.q1).sqrt(), (k / self.q3).sqrt())
    }

    /// Anisotropy ratio: max over headings of the cost divided by the min.
    ///
    /// For laterally symmetric ellipses (`q5 = 0`) the extreme radii have a
    /// closed form: the two crossings of the displaced axis plus, when the
    /// ellipse is eccentric enough, one off-axis critical radius. Otherwise
    /// the extrema are located by dense sampling refined with a local
    /// golden-section search.
    pub fn anisotropy(&self) -> f64 {
        if self.q5 == 0.0 {
            let (u0, _) = self.center();
            let (at, bt) = self.semi_axes();
            let r_descent = 1.0 / self.anchors.descent;
            let r_ascent = 1.0 / self.anchors.ascent;
            let mut r_min = r_descent.min(r_ascent);
            let mut r_max = r_descent.max(r_ascent);
            let denom = at * at - bt * bt;
            if denom.abs() > 1e-15 {
                let c_star = -at * u0 / denom;
                if c_star.abs() < 1.0 {
                    let d2 = u0 * u0
                        + bt * bt
                        + 2.0 * at * u0 * c_star
                        + denom * c_star * c_star;
                    let d = d2.max(0.0).sqrt();
                    r_min = r_min.min(d);
                    r_max = r_max.max(d);
                }
            }
            r_max / r_min
        } else {
            let f = |beta: f64| self.eval_cost(beta).unwrap_or(f64::INFINITY);
            let step = 1f64.to_radians();
            let mut arg_max = 0.0;
            let mut arg_min = 0.0;
            let (mut c_max, mut c_min) = (f64::MIN, f64::MAX);
            let mut beta = -PI;
            while beta <= PI {
                let c = f(beta);
                if c > c_max {
                    c_max = c;
                    arg_max = beta;
                }
                if c < c_min {
                    c_min = c;
                    arg_min = beta;
                }
                beta += step;
            }
            let c_max = -golden_min(|b| -f(b), arg_max - step, arg_max + step, 1e-10);
            let c_min = golden_min(f, arg_min - step, arg_min + step, 1e-10);
            c_max / c_min
        }
    }

    /// Equal-area isotropic cost: the circle with area `pi * a * b` has
    /// radius `sqrt(a * b)`, so the equivalent cost is its reciprocal.
    pub fn isotropic_equivalent(&self) -> f64 {
        1.0 / (self.a * self.b).sqrt()
    }
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (lo, hi);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.5 * (lo + hi))
}

/// The full directional cost model: physics, slip, roll weight, and the
/// compatibility switch for the squared-resistance variant of the unbraked
/// longitudinal term.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CamisModel {
    pub params: PhysicalParams,
    pub slip: SlipModel,
    pub roll_weight: RollWeight,
    /// Evaluate the unbraked longitudinal term with `rho^2` instead of
    /// `rho` (kept for side-by-side study; breaks continuity at the band
    /// edges and the flat-ground limit).
    pub compat_rho_squared: bool,
}

impl Default for CamisModel {
    fn default() -> Self {
        CamisModel {
            params: PhysicalParams::default(),
            slip: SlipModel::default(),
            roll_weight: RollWeight::default(),
            compat_rho_squared: false,
        }
    }
}

/// Per-node planning quantities derived from the model at one steepness.
#[derive(Debug, Clone, Copy)]
pub struct PreparedCost {
    pub ellipse: CostEllipse,
    /// Anisotropy ratio before clamping.
    pub upsilon_raw: f64,
    /// Anisotropy ratio clamped to [`ANISOTROPY_CAP`].
    pub upsilon: f64,
    /// Equal-area isotropic cost.
    pub iso: f64,
}

/// Stencil-radius clamp: larger anisotropy risks local minima in the
/// total-cost field, so the update radius stops growing here and a warning
/// is surfaced instead.
pub const ANISOTROPY_CAP: f64 = 10.0;

impl CamisModel {
    pub fn new(params: PhysicalParams, slip: SlipModel, roll_weight: RollWeight) -> Result<Self> {
        params.validate()?;
        slip.validate()?;
        roll_weight.validate()?;
        Ok(CamisModel { params, slip, roll_weight, compat_rho_squared: false })
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.slip.validate()?;
        self.roll_weight.validate()
    }

    fn check_slip(&self, alpha: f64) -> Result<()> {
        if self.slip.ratio_clamped(alpha) {
            return Err(Error::SlipSingularity {
                curve: "slip ratio",
                alpha_deg: alpha.to_degrees(),
            });
        }
        if self.slip.angle_clamped(alpha) {
            return Err(Error::SlipSingularity {
                curve: "slip angle",
                alpha_deg: alpha.to_degrees(),
            });
        }
        Ok(())
    }

    /// Direct evaluation of the cost at `(alpha, beta)`, cost per meter.
    pub fn cost(&self, alpha: f64, beta: f64) -> Result<f64> {
        self.check_slip(alpha)?;
        let p = &self.params;
        let s_r = self.slip.ratio(alpha);
        let s_a = self.slip.angle(alpha);
        let w = self.roll_weight.eval(alpha);
        let (lo, hi) = p.braking_band();
        let (cb, sb) = (beta.cos(), beta.sin());
        let lateral = p.rho * alpha.cos() * w * sb / s_a.cos();
        let raw = if alpha > lo && alpha < hi {
            let r_b = bezier_braking(alpha, p)?;
            let lon = (p.rho + alpha.tan() + r_b) * cb / (2.0 * (1.0 - s_r));
            (lon * lon + lateral * lateral).sqrt() - (p.rho + alpha.tan() - r_b) / 2.0 * cb
        } else {
            let rho_eff = if self.compat_rho_squared { p.rho * p.rho } else { p.rho };
            let lon = rho_eff * cb / (1.0 - s_r);
            (lon * lon + lateral * lateral).sqrt() - alpha.tan() * cb
        };
        Ok(raw.abs() * p.unit_scale())
    }

    /// The four anchor costs at one steepness.
    pub fn directional_costs(&self, alpha: f64) -> Result<DirectionalCosts> {
        Ok(DirectionalCosts {
            descent: self.cost(alpha, 0.0)?,
            ascent: self.cost(alpha, PI)?,
            lateral1: self.cost(alpha, FRAC_PI_2)?,
            lateral2: self.cost(alpha, -FRAC_PI_2)?,
        })
    }

    /// The displaced-ellipse form of the cost at one steepness.
    pub fn ellipse(&self, alpha: f64) -> Result<CostEllipse> {
        ellipse_from_anchors(self.directional_costs(alpha)?)
    }

    /// Everything the planner needs at one steepness.
    pub fn prepare(&self, alpha: f64) -> Result<PreparedCost> {
        let ellipse = self.ellipse(alpha)?;
        let upsilon_raw = ellipse.anisotropy();
        Ok(PreparedCost {
            ellipse,
            upsilon_raw,
            upsilon: upsilon_raw.min(ANISOTROPY_CAP),
            iso: ellipse.isotropic_equivalent(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_model(rho: f64) -> CamisModel {
        CamisModel {
            params: PhysicalParams {
                rho,
                mass: 1.0,
                gravity: 1.0,
                speed: 1.0,
                alpha_margin: 15f64.to_radians(),
            },
            ..CamisModel::default()
        }
    }

    #[test]
    fn beta_descent_is_zero() {
        let g = Vec2::new(0.6, 0.8);
        assert!(beta(g, g).unwrap().abs() < 1e-12);
    }

    #[test]
    fn beta_quarter_turn() {
        let b = beta(Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((b - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn beta_ascent_is_pi() {
        let b = beta(Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((b.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn beta_rejects_non_unit() {
        assert!(beta(Vec2::new(2.0, 0.0), Vec2::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn pitch_aligned_cases() {
        let a = 0.3;
        assert!((pitch(a, 0.0) - a).abs() < 1e-12);
        assert!(pitch(a, FRAC_PI_2).abs() < 1e-12);
        let th = pitch(20f64.to_radians(), PI);
        assert!((th + 20f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn roll_aligned_cases() {
        assert_eq!(roll(0.3, 0.0), 0.0);
        let a = 15f64.to_radians();
        assert!((roll(a, FRAC_PI_2) - a).abs() < 1e-12);
        assert_eq!(roll(0.0, 1.234), 0.0);
    }

    #[test]
    fn tilt_reconstruction_from_pitch_and_roll() {
        // tan^2(theta) + tan^2(phi) = tan^2(alpha) for every heading.
        for alpha_deg in [5.0, 15.0, 30.0] {
            let alpha = (alpha_deg as f64).to_radians();
            for k in 0..36 {
                let b = -PI + k as f64 * PI / 18.0;
                let th = pitch(alpha, b);
                let ph = roll(alpha, b);
                let rec = (th.tan().powi(2) + ph.tan().powi(2)).sqrt().atan();
                assert!((rec - alpha).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rowe_flat_is_rolling_resistance() {
        let p = PhysicalParams { mass: 1.0, gravity: 1.0, ..PhysicalParams::default() };
        assert!((rowe_resistance(0.0, 0.0, &p) - p.rho).abs() < 1e-12);
    }

    #[test]
    fn rowe_descent_hand_value() {
        let p = PhysicalParams {
            rho: 0.45,
            mass: 1.0,
            gravity: 1.0,
            ..PhysicalParams::default()
        };
        let a = 10f64.to_radians();
        let r = rowe_resistance(a, a, &p);
        assert!((r - 0.27367).abs() < 1e-5, "{r}");
    }

    #[test]
    fn rowe_free_rolling_onset() {
        let p = PhysicalParams {
            rho: 0.45,
            mass: 1.0,
            gravity: 1.0,
            ..PhysicalParams::default()
        };
        let a = p.rho.atan();
        assert!(rowe_resistance(a, a, &p).abs() < 1e-12);
    }

    #[test]
    fn bezier_endpoints() {
        let p = PhysicalParams { rho: 0.3, mass: 1.0, gravity: 1.0, speed: 1.0, alpha_margin: 15f64.to_radians() };
        let (lo, hi) = p.braking_band();
        assert!((bezier_braking(lo, &p).unwrap() - (p.rho - lo.tan())).abs() < 1e-12);
        assert!((bezier_braking(hi, &p).unwrap() - (hi.tan() - p.rho)).abs() < 1e-12);
    }

    #[test]
    fn bezier_positive_at_pivot() {
        let p = PhysicalParams { rho: 0.3, mass: 1.0, gravity: 1.0, speed: 1.0, alpha_margin: 15f64.to_radians() };
        let v = bezier_braking(0.3f64.atan(), &p).unwrap();
        assert!(v > 0.0, "braking cost at the pivot must stay positive, got {v}");
    }

    #[test]
    fn bezier_outside_band_is_contract_violation() {
        let p = PhysicalParams::default();
        let (lo, _) = p.braking_band();
        assert!(bezier_braking(lo - 0.05, &p).is_err());
    }

    #[test]
    fn bezier_positive_across_band() {
        for rho in [0.1, 0.3, 0.45, 0.6] {
            let p = PhysicalParams { rho, mass: 1.0, gravity: 1.0, speed: 1.0, alpha_margin: 15f64.to_radians() };
            let (lo, hi) = p.braking_band();
            for k in 0..=200 {
                let a = lo + (hi - lo) * k as f64 / 200.0;
                assert!(bezier_braking(a, &p).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn flat_ground_anchors_equal_rho() {
        let m = unit_model(0.45);
        let d = m.directional_costs(0.0).unwrap();
        for v in [d.descent, d.ascent, d.lateral1, d.lateral2] {
            assert!((v - 0.45).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn ascent_anchor_telescopes_in_band() {
        let m = unit_model(0.45);
        let a = 15f64.to_radians();
        let d = m.directional_costs(a).unwrap();
        assert!((d.ascent - (0.45 + a.tan())).abs() < 1e-9, "{}", d.ascent);
        assert!((d.ascent - 0.7179).abs() < 1e-4);
    }

    #[test]
    fn roll_weight_scales_laterals_only() {
        let a = 15f64.to_radians();
        let base = unit_model(0.45);
        let mut weighted = base;
        weighted.roll_weight = RollWeight::new(6.0);
        let d0 = base.directional_costs(a).unwrap();
        let d6 = weighted.directional_costs(a).unwrap();
        let w = 1.0 + 6.0 * a.tan();
        assert!((d6.lateral1 / d0.lateral1 - w).abs() < 1e-9);
        assert!((d6.lateral2 / d0.lateral2 - w).abs() < 1e-9);
        assert_eq!(d6.ascent, d0.ascent);
        assert_eq!(d6.descent, d0.descent);
    }

    #[test]
    fn ellipse_coefficients_hand_values() {
        let d = DirectionalCosts { descent: 0.2, ascent: 0.8, lateral1: 0.4, lateral2: 0.4 };
        let e = ellipse_from_anchors(d).unwrap();
        assert!((e.q1 + 0.16).abs() < 1e-12);
        assert!((e.q4 - 0.6).abs() < 1e-12);
        assert!((e.q3 + 0.16).abs() < 1e-12);
        assert_eq!(e.q5, 0.0);
    }

    #[test]
    fn isotropic_anchors_give_circle() {
        let e = ellipse_from_anchors(DirectionalCosts::uniform(0.7)).unwrap();
        assert_eq!(e.q4, 0.0);
        assert_eq!(e.q5, 0.0);
        assert!((e.a - 1.0 / 0.7).abs() < 1e-12);
        assert!((e.b - 1.0 / 0.7).abs() < 1e-12);
        assert!((e.anisotropy() - 1.0).abs() < 1e-12);
        assert!((e.isotropic_equivalent() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ellipse_recovers_anchors() {
        let d = DirectionalCosts { descent: 0.2, ascent: 0.8, lateral1: 0.4, lateral2: 0.4 };
        let e = ellipse_from_anchors(d).unwrap();
        assert!((e.eval_cost(0.0).unwrap() - 0.2).abs() < 1e-9 * 0.2);
        assert!((e.eval_cost(PI).unwrap() - 0.8).abs() < 1e-9 * 0.8);
        assert!((e.eval_cost(FRAC_PI_2).unwrap() - 0.4).abs() < 1e-9 * 0.4);
        assert!((e.eval_cost(-FRAC_PI_2).unwrap() - 0.4).abs() < 1e-9 * 0.4);
    }

    #[test]
    fn ellipse_rejects_non_positive_anchor() {
        let d = DirectionalCosts { descent: 0.0, ascent: 0.8, lateral1: 0.4, lateral2: 0.4 };
        assert!(ellipse_from_anchors(d).is_err());
    }

    #[test]
    fn eval_matches_direct_model_at_oblique_heading() {
        let m = unit_model(0.45);
        let a = 15f64.to_radians();
        let e = m.ellipse(a).unwrap();
        let b = PI / 3.0;
        let from_ellipse = e.eval_cost(b).unwrap();
        let direct = m.cost(a, b).unwrap();
        assert!(
            (from_ellipse - direct).abs() < 1e-6 * direct,
            "{from_ellipse} vs {direct}"
        );
    }

    #[test]
    fn anisotropy_hand_value() {
        let d = DirectionalCosts { descent: 0.2, ascent: 0.8, lateral1: 0.4, lateral2: 0.4 };
        let e = ellipse_from_anchors(d).unwrap();
        let ups = e.anisotropy();
        assert!((ups - 4.0).abs() < 1e-9, "{ups}");
        // Dense sampling confirms the closed form.
        let mut c_max = f64::MIN;
        let mut c_min = f64::MAX;
        for k in 0..720 {
            let b = -PI + k as f64 * PI / 360.0;
            let c = e.eval_cost(b).unwrap();
            c_max = c_max.max(c);
            c_min = c_min.min(c);
        }
        assert!((c_max / c_min - ups).abs() < 1e-4);
    }

    #[test]
    fn anisotropy_closed_form_matches_sampling_with_offaxis_extremum() {
        // Expensive laterals push the cost maximum off the displaced axis.
        let d = DirectionalCosts { descent: 0.05, ascent: 0.9, lateral1: 1.5, lateral2: 1.5 };
        let e = ellipse_from_anchors(d).unwrap();
        let ups = e.anisotropy();
        let mut c_max = f64::MIN;
        let mut c_min = f64::MAX;
        for k in 0..=72000 {
            let b = -PI + k as f64 * 2.0 * PI / 72000.0;
            let c = e.eval_cost(b).unwrap();
            c_max = c_max.max(c);
            c_min = c_min.min(c);
        }
        let sampled = c_max / c_min;
        assert!((ups - sampled).abs() < 1e-4 * sampled, "{ups} vs {sampled}");
        assert!(c_max > 1.5, "max must exceed the lateral anchor, got {c_max}");
    }

    #[test]
    fn anisotropy_general_q5_branch() {
        let d = DirectionalCosts { descent: 0.3, ascent: 0.7, lateral1: 0.45, lateral2: 0.55 };
        let e = ellipse_from_anchors(d).unwrap();
        assert!(e.q5 != 0.0);
        let ups = e.anisotropy();
        assert!(ups > 1.0 && ups.is_finite());
        // Anchors are recovered even with lateral asymmetry.
        assert!((e.eval_cost(FRAC_PI_2).unwrap() - 0.45).abs() < 1e-9);
        assert!((e.eval_cost(-FRAC_PI_2).unwrap() - 0.55).abs() < 1e-9);
    }

    #[test]
    fn anisotropy_monotone_in_alpha_for_low_rho() {
        let m = unit_model(0.3);
        let mut last = 0.0;
        for k in 0..=40 {
            let alpha = (k as f64 * 0.5).to_radians();
            let ups = m.prepare(alpha).unwrap().upsilon_raw;
            assert!(ups >= last - 1e-9, "upsilon dipped at {}", k as f64 * 0.5);
            last = ups;
        }
    }

    #[test]
    fn equal_area_equivalent_from_cached_axes() {
        let d = DirectionalCosts { descent: 0.2, ascent: 0.8, lateral1: 0.4, lateral2: 0.4 };
        let e = ellipse_from_anchors(d).unwrap();
        assert!((e.a - 3.125).abs() < 1e-12);
        assert!((e.b - 2.5).abs() < 1e-12);
        let c_n = e.isotropic_equivalent();
        assert!((c_n - 1.0 / (3.125f64 * 2.5).sqrt()).abs() < 1e-12);
        // Always between the extreme directional costs.
        assert!(c_n >= d.min() && c_n <= d.max());
    }

    #[test]
    fn braking_continuity_at_band_edges() {
        // No slip: the in-band and out-of-band branches coincide at both
        // edges by construction of the Bezier endpoints.
        let m = unit_model(0.3);
        let (lo, hi) = m.params.braking_band();
        for edge in [lo, hi] {
            let below = m.cost(edge - 1e-7, 0.0).unwrap();
            let above = m.cost(edge + 1e-7, 0.0).unwrap();
            assert!((below - above).abs() < 1e-6, "jump at edge {edge}: {below} vs {above}");
        }
    }

    #[test]
    fn descent_cost_positive_through_pivot() {
        let m = unit_model(0.3);
        for k in 0..=4500 {
            let alpha = (k as f64 * 0.01).to_radians();
            let c = m.cost(alpha, 0.0).unwrap();
            assert!(c > 0.0, "cost vanished at {} deg", k as f64 * 0.01);
        }
    }

    #[test]
    fn model_agreement_over_alpha_beta_grid() {
        // The four-anchor ellipse reproduces the direct evaluation at every
        // heading: the direct form is itself a displaced-ellipse polar form.
        for rho in [0.3, 0.6, 0.9] {
            for slip in [SlipModel::none(), SlipModel::linear(0.6, 0.8)] {
                let mut m = unit_model(rho);
                m.slip = slip;
                let mut alpha_deg = 0.0;
                while alpha_deg <= 25.0 {
                    let alpha = (alpha_deg as f64).to_radians();
                    let e = m.ellipse(alpha).unwrap();
                    for k in 0..360 {
                        let b = -PI + k as f64 * 2.0 * PI / 360.0;
                        let direct = m.cost(alpha, b).unwrap();
                        let interp = e.eval_cost(b).unwrap();
                        assert!(
                            (interp - direct).abs() <= 1e-6 * direct.abs(),
                            "rho {rho} alpha {alpha_deg} beta {b}: {interp} vs {direct}"
                        );
                    }
                    alpha_deg += 0.5;
                }
            }
        }
    }

    #[test]
    fn speed_profile_polygon_is_convex() {
        for rho in [0.3, 0.45] {
            let m = unit_model(rho);
            for alpha_deg in [0.0, 5.0, 15.0, 24.0] {
                let alpha = (alpha_deg as f64).to_radians();
                let e = m.ellipse(alpha).unwrap();
                let pts: Vec<Vec2> = (0..360)
                    .map(|k| {
                        let b = k as f64 * 2.0 * PI / 360.0;
                        let r = 1.0 / e.eval_cost(b).unwrap();
                        Vec2::new(r * b.cos(), r * b.sin())
                    })
                    .collect();
                for k in 0..pts.len() {
                    let p0 = pts[k];
                    let p1 = pts[(k + 1) % pts.len()];
                    let p2 = pts[(k + 2) % pts.len()];
                    let cross = (p1 - p0).wedge(p2 - p1);
                    assert!(cross > -1e-12, "non-convex at sample {k} (alpha {alpha_deg})");
                }
            }
        }
    }

    #[test]
    fn flat_terrain_isotropy_is_exact() {
        let m = unit_model(0.45);
        let p = m.prepare(0.0).unwrap();
        assert_eq!(p.upsilon_raw, 1.0);
    }

    #[test]
    fn slip_monotonicity_on_ascent() {
        let alpha = 12f64.to_radians();
        let mut last = 0.0;
        for c_r in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let mut m = unit_model(0.45);
            m.slip = SlipModel::linear(c_r, 0.0);
            let c = m.cost(alpha, PI).unwrap();
            assert!(c >= last, "ascent cost decreased with slip");
            last = c;
        }
    }

    #[test]
    fn slip_curves_non_decreasing_and_zero_at_flat() {
        for family in [SlipFamily::Linear, SlipFamily::Exponential] {
            let s = SlipModel { family, c_r: 1.5, c_a: 2.0, epsilon: 0.05 };
            assert_eq!(s.ratio(0.0), 0.0);
            assert_eq!(s.angle(0.0), 0.0);
            let mut last = (0.0, 0.0);
            for k in 0..=60 {
                let alpha = (k as f64).to_radians();
                let cur = (s.ratio(alpha), s.angle(alpha));
                assert!(cur.0 >= last.0 && cur.1 >= last.1);
                assert!(cur.0 <= 1.0 - s.epsilon + 1e-12);
                assert!(cur.1 <= FRAC_PI_2 - s.epsilon + 1e-12);
                last = cur;
            }
        }
    }

    #[test]
    fn clamped_slip_is_singularity_error() {
        let mut m = unit_model(0.45);
        m.slip = SlipModel::linear(3.0, 0.0);
        // tan(alpha) * 3 >= 0.95 around 17.6 degrees.
        let err = m.directional_costs(25f64.to_radians()).unwrap_err();
        assert!(matches!(err, Error::SlipSingularity { curve: "slip ratio", .. }), "{err}");
    }

    #[test]
    fn unit_scaling_preserves_shape() {
        let a = 15f64.to_radians();
        let base = unit_model(0.45);
        let mut scaled = base;
        scaled.params.mass = 2.43;
        scaled.params.gravity = 9.8;
        scaled.params.speed = 0.5;
        let lam = scaled.params.unit_scale();
        let (pb, ps) = (base.prepare(a).unwrap(), scaled.prepare(a).unwrap());
        for b in [0.0, 0.7, 2.1, PI] {
            let cb = pb.ellipse.eval_cost(b).unwrap();
            let cs = ps.ellipse.eval_cost(b).unwrap();
            assert!((cs - lam * cb).abs() < 1e-9 * cs);
        }
        assert!((pb.upsilon_raw - ps.upsilon_raw).abs() < 1e-9);
        assert!((ps.iso - lam * pb.iso).abs() < 1e-9 * ps.iso);
    }

    #[test]
    fn compat_flag_changes_flat_cost() {
        let mut m = unit_model(0.45);
        m.compat_rho_squared = true;
        let c = m.cost(0.0, 0.0).unwrap();
        assert!((c - 0.45 * 0.45).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_params() {
        let mut p = PhysicalParams::default();
        p.rho = 1.5;
        assert!(p.validate().is_err());
        let mut p = PhysicalParams::default();
        p.alpha_margin = 2.0;
        assert!(p.validate().is_err());
        assert!(RollWeight::new(-1.0).validate().is_err());
    }
}
