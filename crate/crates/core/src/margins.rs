//! Marginal loss distributions and their VaR / ES.
//!
//! Everything downstream of the `ω` solver only needs a marginal VaR and ES
//! at some level, so each margin implements [`Margin`]. The analytic margins
//! are Student-t (location/scale family, not variance-standardised), normal and
//! a generalized Pareto tail beyond a threshold quantile; the empirical margin
//! is a sorted [`LossSample`] with the historical estimators.

use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use statrs::function::beta::{beta_reg, inv_beta_reg, ln_beta};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_es_level, check_open_unit};
use crate::{Error, Result};

/// Below this the GPD formulas switch to their `ξ → 0` logarithmic limit.
pub const XI_ZERO_CUTOFF: f64 = 1e-10;

/// A marginal loss distribution with a quantile (VaR) and a tail mean (ES).
pub trait Margin {
    /// `VaR_p`, the `p`-quantile of the loss.
    fn var(&self, p: f64) -> Result<f64>;
    /// `ES_p = E[Y | Y ≥ VaR_p]`.
    fn es(&self, p: f64) -> Result<f64>;
}

// ---------------------------------------------------------------------------
// Student-t
// ---------------------------------------------------------------------------

/// Location-scale Student-t with `nu` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudentT {
    nu: f64,
    loc: f64,
    scale: f64,
}

impl StudentT {
    pub fn new(nu: f64, loc: f64, scale: f64) -> Result<Self> {
        if !(nu > 0.0) || nu.is_nan() {
            return Err(Error::domain("nu", nu, "degrees of freedom > 0"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::domain("scale", scale, "a finite scale > 0"));
        }
        if !loc.is_finite() {
            return Err(Error::domain("loc", loc, "a finite location"));
        }
        Ok(Self { nu, loc, scale })
    }

    /// Location 0, scale 1.
    pub fn standard(nu: f64) -> Result<Self> {
        Self::new(nu, 0.0, 1.0)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn loc(&self) -> f64 {
        self.loc
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_open_unit("p", p)?;
        Ok(self.loc + self.scale * std_t_quantile(self.nu, p))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        if z.is_nan() {
            return f64::NAN;
        }
        let tail = std_t_upper_tail(self.nu, z.abs());
        if z >= 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }

    /// `P(Y > x)`, accurate far in the right tail.
    pub fn sf(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        let tail = std_t_upper_tail(self.nu, z.abs());
        if z >= 0.0 {
            tail
        } else {
            1.0 - tail
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        std_t_pdf(self.nu, (x - self.loc) / self.scale) / self.scale
    }

    /// Density evaluated at the `p`-quantile.
    pub fn density_at_quantile(&self, p: f64) -> Result<f64> {
        Ok(self.pdf(self.quantile(p)?))
    }

    /// Closed-form tail mean `E[Y | Y ≥ VaR_p]`; needs `nu > 1`.
    pub fn expected_shortfall(&self, p: f64) -> Result<f64> {
        check_es_level("p", p)?;
        if self.nu <= 1.0 {
            return Err(Error::UndefinedEs(format!(
                "Student-t with nu = {} has no finite mean",
                self.nu
            )));
        }
        if p == 0.0 {
            return Ok(self.loc);
        }
        let z = std_t_quantile(self.nu, p);
        let tail_mean = std_t_pdf(self.nu, z) / (1.0 - p) * (self.nu + z * z) / (self.nu - 1.0);
        Ok(self.loc + self.scale * tail_mean)
    }
}

impl Margin for StudentT {
    fn var(&self, p: f64) -> Result<f64> {
        self.quantile(p)
    }

    fn es(&self, p: f64) -> Result<f64> {
        self.expected_shortfall(p)
    }
}

/// `loc + scale · T⁻¹_ν(p)`.
pub fn t_quantile(p: f64, params: &StudentT) -> Result<f64> {
    params.quantile(p)
}

/// Tail mean of the Student-t beyond its `p`-quantile.
pub fn t_es(p: f64, params: &StudentT) -> Result<f64> {
    params.expected_shortfall(p)
}

fn std_t_pdf(nu: f64, z: f64) -> f64 {
    let ln_norm =
        ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
    (ln_norm - 0.5 * (nu + 1.0) * (z * z / nu).ln_1p()).exp()
}

/// `P(T > z)` for `z ≥ 0`.
fn std_t_upper_tail(nu: f64, z: f64) -> f64 {
    if z == f64::INFINITY {
        return 0.0;
    }
    let z2 = z * z;
    if z2 < nu {
        // x = ν/(ν + z²) is near 1 here; use y = 1 − x directly
        0.5 * (1.0 - beta_reg(0.5, 0.5 * nu, z2 / (nu + z2)))
    } else {
        0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + z2))
    }
}

/// Standard t quantile through the inverse regularized incomplete beta, with a
/// safeguarded Newton polish. In the tails it solves `I_x(ν/2, ½) = 2·tail`
/// for `x = ν/(ν + z²)`; near the centre it solves `I_y(½, ν/2) = 1 − 2·tail`
/// for `y = 1 − x`, which avoids cancellation when `ν` is large.
fn std_t_quantile(nu: f64, p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let tail = if p > 0.5 { 1.0 - p } else { p };
    let a = 0.5 * nu;
    let z2 = if 2.0 * tail < 0.5 {
        let x = polish_inv_beta(a, 0.5, 2.0 * tail);
        nu * (1.0 - x) / x
    } else {
        let y = polish_inv_beta(0.5, a, 1.0 - 2.0 * tail);
        nu * y / (1.0 - y)
    };
    let t = z2.sqrt();
    if p > 0.5 {
        t
    } else {
        -t
    }
}

/// Root of `I_x(a, b) = target`, started from statrs and refined by Newton
/// steps kept inside a shrinking bracket.
fn polish_inv_beta(a: f64, b: f64, target: f64) -> f64 {
    let ln_b = ln_beta(a, b);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = inv_beta_reg(a, b, target);
    if !(x > 0.0 && x < 1.0) {
        x = 0.5;
    }
    for _ in 0..100 {
        let g = beta_reg(a, b, x) - target;
        if g == 0.0 {
            break;
        }
        // I_x is increasing in x
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dens = ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp();
        let mut next = x - g / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x || hi - lo <= f64::MIN_POSITIVE {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Normal
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalParams {
    mean: f64,
    sd: f64,
}

impl NormalParams {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::domain("sd", sd, "a finite standard deviation > 0"));
        }
        if !mean.is_finite() {
            return Err(Error::domain("mean", mean, "a finite mean"));
        }
        Ok(Self { mean, sd })
    }

    pub fn standard() -> Self {
        Self { mean: 0.0, sd: 1.0 }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_open_unit("p", p)?;
        Ok(self.mean + self.sd * std_normal_quantile(p))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        std_normal().pdf((x - self.mean) / self.sd) / self.sd
    }

    pub fn expected_shortfall(&self, p: f64) -> Result<f64> {
        check_es_level("p", p)?;
        if p == 0.0 {
            return Ok(self.mean);
        }
        let z = std_normal_quantile(p);
        Ok(self.mean + self.sd * std_normal().pdf(z) / (1.0 - p))
    }
}

impl Margin for NormalParams {
    fn var(&self, p: f64) -> Result<f64> {
        self.quantile(p)
    }

    fn es(&self, p: f64) -> Result<f64> {
        self.expected_shortfall(p)
    }
}

fn std_normal() -> Normal {
    Normal::standard()
}

pub(crate) fn std_normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

pub(crate) fn std_normal_pdf(z: f64) -> f64 {
    std_normal().pdf(z)
}

// ---------------------------------------------------------------------------
// Generalized Pareto tail beyond a threshold quantile
// ---------------------------------------------------------------------------

/// Loss distribution whose exceedances over `u = VaR_γ` follow a GPD with
/// scale `s` and tail index `xi ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GpdTail {
    gamma: f64,
    u: f64,
    s: f64,
    xi: f64,
}

impl GpdTail {
    pub fn new(gamma: f64, u: f64, s: f64, xi: f64) -> Result<Self> {
        if !(gamma > 0.5 && gamma < 1.0) {
            return Err(Error::domain(
                "gamma",
                gamma,
                "a threshold quantile in (0.5, 1)",
            ));
        }
        if !u.is_finite() {
            return Err(Error::domain("u", u, "a finite threshold"));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain("s", s, "a finite scale > 0"));
        }
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::domain("xi", xi, "a finite tail index >= 0"));
        }
        Ok(Self { gamma, u, s, xi })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn threshold(&self) -> f64 {
        self.u
    }

    pub fn scale(&self) -> f64 {
        self.s
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    fn check_level(&self, alpha: f64) -> Result<()> {
        if alpha >= self.gamma && alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::domain("alpha", alpha, "a level in [gamma, 1)"))
        }
    }

    /// `((1 − α)/(1 − γ))^{−ξ}`, the relative tail-probability factor.
    pub(crate) fn tail_factor(&self, alpha: f64) -> f64 {
        ((1.0 - alpha) / (1.0 - self.gamma)).powf(-self.xi)
    }

    /// `(factor − 1)/ξ`, or `ln((1 − γ)/(1 − α))` at `ξ = 0`.
    pub(crate) fn excess_term(&self, alpha: f64) -> f64 {
        if self.xi.abs() < XI_ZERO_CUTOFF {
            ((1.0 - self.gamma) / (1.0 - alpha)).ln()
        } else {
            (self.tail_factor(alpha) - 1.0) / self.xi
        }
    }

    pub fn var_beyond(&self, alpha: f64) -> Result<f64> {
        self.check_level(alpha)?;
        if alpha == self.gamma {
            return Ok(self.u);
        }
        Ok(self.u + self.s * self.excess_term(alpha))
    }

    pub fn es_beyond(&self, alpha: f64) -> Result<f64> {
        self.check_level(alpha)?;
        if self.xi >= 1.0 {
            return Err(Error::UndefinedEs(format!(
                "GPD tail with xi = {} >= 1 has an infinite mean",
                self.xi
            )));
        }
        let excess = if alpha == self.gamma {
            0.0
        } else {
            self.excess_term(alpha)
        };
        Ok(self.u + self.s * (self.tail_factor(alpha) / (1.0 - self.xi) + excess))
    }
}

impl Margin for GpdTail {
    fn var(&self, p: f64) -> Result<f64> {
        self.var_beyond(p)
    }

    fn es(&self, p: f64) -> Result<f64> {
        self.es_beyond(p)
    }
}

pub fn gpd_var_beyond(alpha: f64, tail: &GpdTail) -> Result<f64> {
    tail.var_beyond(alpha)
}

pub fn gpd_es_beyond(alpha: f64, tail: &GpdTail) -> Result<f64> {
    tail.es_beyond(alpha)
}

// ---------------------------------------------------------------------------
// Historical estimators
// ---------------------------------------------------------------------------

/// Immutable loss sample kept sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSample {
    sorted: Vec<f64>,
}

impl LossSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `Y_(i)` with 1-based `i`.
    pub fn order_statistic(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|k| self.sorted.get(k)).copied()
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    /// Empirical quantile `Y_(⌈np⌉)`.
    pub fn hist_var(&self, p: f64) -> Result<f64> {
        check_open_unit("p", p)?;
        let n = self.sorted.len();
        let k = ceil_count(n, p).clamp(1, n);
        Ok(self.sorted[k - 1])
    }

    /// Mean of the top `n − ⌊np⌋` order statistics; the sample mean at `p = 0`.
    pub fn hist_es(&self, p: f64) -> Result<f64> {
        check_es_level("p", p)?;
        let n = self.sorted.len();
        let below = floor_count(n, p);
        if below >= n {
            return Err(Error::InsufficientTail { level: p, n });
        }
        let tail = &self.sorted[below..];
        Ok(tail.iter().sum::<f64>() / tail.len() as f64)
    }

    /// Number of observations entering [`hist_es`](Self::hist_es) at level `p`.
    pub fn tail_count(&self, p: f64) -> usize {
        self.sorted.len() - floor_count(self.sorted.len(), p).min(self.sorted.len())
    }
}

impl Margin for LossSample {
    fn var(&self, p: f64) -> Result<f64> {
        self.hist_var(p)
    }

    fn es(&self, p: f64) -> Result<f64> {
        self.hist_es(p)
    }
}

pub fn hist_var(sample: &LossSample, p: f64) -> Result<f64> {
    sample.hist_var(p)
}

pub fn hist_es(sample: &LossSample, p: f64) -> Result<f64> {
    sample.hist_es(p)
}

// `n·p` products that should be integral (n = 10, p = 0.8) come out a few ulps
// off; snap them before taking ceil/floor.
fn snapped(n: usize, p: f64) -> (f64, bool) {
    let x = n as f64 * p;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        (r, true)
    } else {
        (x, false)
    }
}

fn ceil_count(n: usize, p: f64) -> usize {
    let (x, exact) = snapped(n, p);
    if exact {
        x as usize
    } else {
        x.ceil() as usize
    }
}

fn floor_count(n: usize, p: f64) -> usize {
    let (x, exact) = snapped(n, p);
    if exact {
        x as usize
    } else {
        x.floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn t3() -> StudentT {
        StudentT::standard(3.0).unwrap()
    }

    #[test]
    fn t3_reference_quantiles() {
        let t = t3();
        assert_eq!(t.quantile(0.5).unwrap(), 0.0);
        for (p, q) in [
            (0.95, 2.353363),
            (0.975, 3.182446),
            (0.99, 4.540703),
            (0.9975, 7.453319),
        ] {
            assert_abs_diff_eq!(t.quantile(p).unwrap(), q, epsilon = 5e-7);
        }
    }

    #[test]
    fn t_quantile_inverts_cdf() {
        for nu in [1.0, 2.5, 3.0, 10.0, 1e4] {
            let t = StudentT::new(nu, 0.3, 1.7).unwrap();
            for p in [1e-7, 0.01, 0.3, 0.5, 0.77, 0.95, 0.9975, 1.0 - 1e-9] {
                let x = t.quantile(p).unwrap();
                let back = if p > 0.5 { 1.0 - t.sf(x) } else { t.cdf(x) };
                assert!(
                    (back - p).abs() < 1e-11 * p.max(1e-3),
                    "nu {nu} p {p} err {}",
                    back - p
                );
            }
        }
    }

    #[test]
    fn t_quantile_rejects_boundaries() {
        assert!(t3().quantile(0.0).is_err());
        assert!(t3().quantile(1.0).is_err());
        assert!(t3().quantile(f64::NAN).is_err());
    }

    #[test]
    fn t_es_needs_finite_mean() {
        let cauchy = StudentT::standard(1.0).unwrap();
        assert!(matches!(
            cauchy.expected_shortfall(0.9),
            Err(Error::UndefinedEs(_))
        ));
    }

    #[test]
    fn t_es_tends_to_mean_at_low_levels() {
        assert_abs_diff_eq!(t3().expected_shortfall(1e-12).unwrap(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn gpd_threshold_identities() {
        let tail = GpdTail::new(0.95, 1.3, 0.8, 0.25).unwrap();
        assert_eq!(tail.var_beyond(0.95).unwrap(), 1.3);
        assert_abs_diff_eq!(
            tail.es_beyond(0.95).unwrap(),
            1.3 + 0.8 / 0.75,
            epsilon = 1e-15
        );
        assert!(tail.var_beyond(0.9).is_err());
    }

    #[test]
    fn gpd_hand_values() {
        let tail = GpdTail::new(0.95, 0.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(
            tail.var_beyond(0.99).unwrap(),
            2.0 * (5f64.sqrt() - 1.0),
            epsilon = 1e-12
        );
        let exp_tail = GpdTail::new(0.95, 0.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            exp_tail.var_beyond(0.99).unwrap(),
            5f64.ln(),
            epsilon = 1e-12
        );
        for a in [0.95, 0.96, 0.99, 0.9999] {
            let gap = exp_tail.es_beyond(a).unwrap() - exp_tail.var_beyond(a).unwrap();
            assert_abs_diff_eq!(gap, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gpd_infinite_mean() {
        let tail = GpdTail::new(0.9, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(tail.es_beyond(0.95), Err(Error::UndefinedEs(_))));
        assert!(tail.var_beyond(0.95).unwrap().is_finite());
    }

    #[test]
    fn gpd_rejects_bad_parameters() {
        assert!(GpdTail::new(0.5, 0.0, 1.0, 0.1).is_err());
        assert!(GpdTail::new(0.9, 0.0, 0.0, 0.1).is_err());
        assert!(GpdTail::new(0.9, 0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn historical_conventions() {
        let s = LossSample::new((1..=10).map(f64::from).rev().collect()).unwrap();
        assert_eq!(s.hist_var(0.8).unwrap(), 8.0);
        assert_eq!(s.hist_es(0.8).unwrap(), 9.5);
        assert_eq!(s.hist_var(1e-9).unwrap(), 1.0);
        assert_abs_diff_eq!(s.hist_es(1e-9).unwrap(), 5.5, epsilon = 1e-15);
        assert_eq!(s.order_statistic(1), Some(1.0));
        assert_eq!(s.order_statistic(0), None);
    }

    #[test]
    fn historical_constant_sample() {
        let s = LossSample::new(vec![2.5; 7]).unwrap();
        for p in [0.01, 0.5, 0.9, 0.99] {
            assert_eq!(s.hist_var(p).unwrap(), 2.5);
            assert_eq!(s.hist_es(p).unwrap(), 2.5);
        }
    }

    #[test]
    fn historical_errors() {
        assert!(matches!(LossSample::new(vec![]), Err(Error::EmptySample)));
        assert!(matches!(
            LossSample::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
        let s = LossSample::new(vec![1.0, 2.0]).unwrap();
        assert!(s.hist_es(1.0).is_err());
        // n·p snaps to n
        assert!(matches!(
            s.hist_es(1.0 - 1e-12),
            Err(Error::InsufficientTail { .. })
        ));
    }
}
