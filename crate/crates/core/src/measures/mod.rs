//! Conditional risk measures via the `ω` quantile.
//!
//! With `ω = ω(α, β, C)` from [`solve_omega`]:
//!
//! - `CoVaR = VaR_ω(Y)`, `ΔCoVaR = VaR_ω(Y) − VaR_β(Y)`
//! - `CoES = ES_ω(Y)`, `ΔCoES = ES_ω(Y) − ES_β(Y)`
//! - `MES = ES_{ω(α, 0, C)}(Y)`
//! - `ξ̂ = (r − 1)/r` with `r = ΔCoES/ΔCoVaR`.
//!
//! The margin may be analytic or a [`LossSample`], which turns the same code
//! into the historical estimators.

mod eqcond;
mod gpd;
mod omega;
mod sensitivity;

use serde::Serialize;

use crate::copula::{fit_beta_copula, pseudo_observations, Copula};
use crate::error::check_open_unit;
use crate::margins::{LossSample, Margin};
use crate::{Error, Result};

pub use eqcond::{analytic_normal_eqcond, analytic_t_eqcond, EqCondMeasures};
pub use gpd::gpd_corisk_closed_forms;
pub use omega::{gumbel_omega_equation, solve_omega, OmegaSolution, BRACKET_PAD, OMEGA_TOL};
pub use sensitivity::{sensitivity_coes, sensitivity_covar, sensitivity_dcoes, SensitivityInput};

/// `|ΔCoVaR|` below which the ratio and `ξ̂` are reported as undefined.
pub const DCOV_EPS: f64 = 1e-12;

/// Distress level `α` of `X` and risk level `β` of `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskLevels {
    alpha: f64,
    beta: f64,
}

impl RiskLevels {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::domain("beta", beta, "a level in [0, 1)"));
        }
        Ok(Self { alpha, beta })
    }

    /// Levels `(α, 0)` used by MES.
    pub fn mes(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `α + β − αβ`, the comonotone value of `ω`.
    pub fn omega_upper(&self) -> f64 {
        self.alpha + self.beta - self.alpha * self.beta
    }
}

impl Default for RiskLevels {
    fn default() -> Self {
        Self {
            alpha: 0.95,
            beta: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoRiskEstimates {
    pub omega: f64,
    pub covar: f64,
    pub coes: f64,
    pub dcov: f64,
    pub dcoes: f64,
    pub mes: Option<f64>,
    /// `ΔCoES/ΔCoVaR`; `None` when `|ΔCoVaR| < 1e-12` or ES is infinite.
    pub ratio: Option<f64>,
    pub xi_hat: Option<f64>,
}

impl CoRiskEstimates {
    /// All measures at a given `ω` (MES left empty).
    pub fn at_omega(omega: f64, levels: RiskLevels, margin: &dyn Margin) -> Result<Self> {
        let covar = covar(margin, omega)?;
        let coes = coes(margin, omega)?;
        let dcov = covar - margin.var(levels.beta())?;
        let dcoes = coes - margin.es(levels.beta())?;
        Ok(Self::from_parts(omega, covar, coes, dcov, dcoes))
    }

    pub(crate) fn from_parts(omega: f64, covar: f64, coes: f64, dcov: f64, dcoes: f64) -> Self {
        let ratio = if dcov.abs() < DCOV_EPS || !dcoes.is_finite() {
            None
        } else {
            Some(dcoes / dcov)
        };
        Self {
            omega,
            covar,
            coes,
            dcov,
            dcoes,
            mes: None,
            ratio,
            xi_hat: ratio.and_then(|r| xi_from_ratio(r).ok()),
        }
    }
}

/// `VaR_ω(Y)`.
pub fn covar(margin: &dyn Margin, omega: f64) -> Result<f64> {
    margin.var(omega)
}

/// `ES_ω(Y)`.
pub fn coes(margin: &dyn Margin, omega: f64) -> Result<f64> {
    margin.es(omega)
}

/// Solves for `ω` and evaluates every measure, MES included.
pub fn delta_measures(
    levels: RiskLevels,
    model: &dyn Copula,
    margin: &dyn Margin,
) -> Result<CoRiskEstimates> {
    let sol = solve_omega(levels, model)?;
    let mut est = CoRiskEstimates::at_omega(sol.omega, levels, margin)?;
    est.mes = Some(mes(levels.alpha(), model, margin)?);
    Ok(est)
}

/// `MES_α = CoES_{α,0}`.
pub fn mes(alpha: f64, model: &dyn Copula, margin: &dyn Margin) -> Result<f64> {
    let sol = solve_omega(RiskLevels::mes(alpha)?, model)?;
    coes(margin, sol.omega)
}

/// `ξ̂ = (r − 1)/r`.
pub fn xi_from_ratio(ratio: f64) -> Result<f64> {
    if ratio == 0.0 || !ratio.is_finite() {
        return Err(Error::Undefined(
            "tail index for a zero or non-finite ratio",
        ));
    }
    Ok((ratio - 1.0) / ratio)
}

/// `(1 − λ)·CoVaR + λ·CoES`.
pub fn slide_covar(covar: f64, coes: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain("lambda", lambda, "a weight in [0, 1]"));
    }
    Ok((1.0 - lambda) * covar + lambda * coes)
}

/// Historical estimates from paired losses: pseudo-observations, empirical
/// beta copula, `ω̂`, then the historical VaR/ES of `ys`.
pub fn estimate_from_pairs(xs: &[f64], ys: &[f64], levels: RiskLevels) -> Result<CoRiskEstimates> {
    let pobs = pseudo_observations(xs, ys)?;
    let copula = fit_beta_copula(&pobs);
    let sample = LossSample::new(ys.to_vec())?;
    delta_measures(levels, &copula, &sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{Comonotone, GumbelParam, Independence};
    use crate::margins::StudentT;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gumbel_t3_reference_values() {
        let th = GumbelParam::from_kendall_tau(0.55).unwrap();
        let t3 = StudentT::standard(3.0).unwrap();
        let e = delta_measures(RiskLevels::default(), &th, &t3).unwrap();
        assert_abs_diff_eq!(e.omega, 0.9974727, epsilon = 1e-6);
        assert_abs_diff_eq!(e.dcov, 5.071827, epsilon = 1e-3);
        assert_abs_diff_eq!(e.dcoes, 7.383257, epsilon = 1e-3);
        assert_abs_diff_eq!(e.ratio.unwrap(), 1.455739, epsilon = 1e-4);
        assert_abs_diff_eq!(e.xi_hat.unwrap(), 0.3130637, epsilon = 1e-4);
        assert!(e.coes >= e.covar);
    }

    #[test]
    fn independence_and_comonotone_extremes() {
        let t3 = StudentT::standard(3.0).unwrap();
        let ind = delta_measures(RiskLevels::default(), &Independence, &t3).unwrap();
        assert!(ind.dcov.abs() < 1e-6 && ind.dcoes.abs() < 1e-6);
        let com = delta_measures(RiskLevels::default(), &Comonotone, &t3).unwrap();
        assert_abs_diff_eq!(com.covar, 7.453319, epsilon = 1e-5);
        assert_abs_diff_eq!(
            com.mes.unwrap(),
            t3.expected_shortfall(0.95).unwrap(),
            epsilon = 1e-6
        );
        let th = GumbelParam::new(3.0).unwrap();
        let mid = delta_measures(RiskLevels::default(), &th, &t3).unwrap();
        assert!(mid.dcov < com.dcov && mid.dcoes < com.dcoes);
    }

    #[test]
    fn tiny_delta_leaves_ratio_undefined() {
        let e = CoRiskEstimates::from_parts(0.95, 1.0, 2.0, 0.0, 0.0);
        assert_eq!(e.ratio, None);
        assert_eq!(e.xi_hat, None);
    }

    #[test]
    fn xi_and_slide() {
        assert_eq!(xi_from_ratio(1.0).unwrap(), 0.0);
        assert_eq!(xi_from_ratio(2.0).unwrap(), 0.5);
        assert_abs_diff_eq!(xi_from_ratio(1.455739).unwrap(), 0.3130637, epsilon = 1e-7);
        assert!(xi_from_ratio(0.0).is_err());
        assert_eq!(slide_covar(1.0, 3.0, 0.0).unwrap(), 1.0);
        assert_eq!(slide_covar(1.0, 3.0, 1.0).unwrap(), 3.0);
        assert_eq!(slide_covar(1.0, 3.0, 0.5).unwrap(), 2.0);
        assert!(slide_covar(1.0, 3.0, 1.5).is_err());
    }

    #[test]
    fn levels_validation() {
        assert!(RiskLevels::new(0.0, 0.5).is_err());
        assert!(RiskLevels::new(0.5, 1.0).is_err());
        assert!(RiskLevels::new(0.5, -0.1).is_err());
        assert_abs_diff_eq!(
            RiskLevels::new(0.95, 0.95).unwrap().omega_upper(),
            0.9975,
            epsilon = 1e-15
        );
    }
}
