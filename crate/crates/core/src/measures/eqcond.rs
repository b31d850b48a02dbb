//! Equality-conditioned baselines: CoVaR and CoES of the system given that an
//! institution sits exactly at its VaR, `X = VaR_α(X)`, under bivariate
//! normal or bivariate Student-t losses with correlation `ρ`.

use serde::Serialize;

use super::RiskLevels;
use crate::margins::{std_normal_pdf, std_normal_quantile, StudentT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqCondMeasures {
    pub covar: f64,
    pub coes: f64,
    /// Difference to the same measure with `X` at its median.
    pub dcovar_med: f64,
    pub dcoes_med: f64,
}

fn check_inputs(sigma_sys: f64, rho: f64) -> Result<()> {
    if !(sigma_sys > 0.0 && sigma_sys.is_finite()) {
        return Err(Error::domain("sigma_sys", sigma_sys, "a positive scale"));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::domain("rho", rho, "a correlation in [-1, 1]"));
    }
    Ok(())
}

/// `Y | X = x ~ N(xσρ, (1 − ρ²)σ²)` evaluated at `x = Φ⁻¹(α)`.
pub fn analytic_normal_eqcond(
    levels: RiskLevels,
    sigma_sys: f64,
    rho: f64,
) -> Result<EqCondMeasures> {
    check_inputs(sigma_sys, rho)?;
    let beta = levels.beta();
    if beta <= 0.0 {
        return Err(Error::domain("beta", beta, "a level in (0, 1)"));
    }
    let z_beta = std_normal_quantile(beta);
    let spread = (1.0 - rho * rho).sqrt() * sigma_sys;
    let shift = std_normal_quantile(levels.alpha()) * sigma_sys * rho;
    let var_part = z_beta * spread;
    let es_part = spread * std_normal_pdf(z_beta) / (1.0 - beta);
    Ok(EqCondMeasures {
        covar: var_part + shift,
        coes: es_part + shift,
        dcovar_med: (var_part + shift) - var_part,
        dcoes_med: (es_part + shift) - es_part,
    })
}

/// Bivariate Student-t version: `Y | X = x` is t with `ν + 1` degrees of
/// freedom, location `xσρ` and squared scale `(ν + d₁)/(ν + 1)·(1 − ρ²)σ²`,
/// where `d₁ = x²` and `x = T_ν⁻¹(α)`.
pub fn analytic_t_eqcond(
    levels: RiskLevels,
    sigma_sys: f64,
    rho: f64,
    nu: f64,
) -> Result<EqCondMeasures> {
    check_inputs(sigma_sys, rho)?;
    if !(nu > 1.0) {
        return Err(Error::domain("nu", nu, "degrees of freedom > 1"));
    }
    let beta = levels.beta();
    if beta <= 0.0 {
        return Err(Error::domain("beta", beta, "a level in (0, 1)"));
    }
    let t_nu = StudentT::standard(nu)?;
    let t_cond = StudentT::standard(nu + 1.0)?;
    let x = t_nu.quantile(levels.alpha())?;
    let d1 = x * x;
    let spread = ((nu + d1) / (nu + 1.0) * (1.0 - rho * rho)).sqrt() * sigma_sys;
    let shift = x * sigma_sys * rho;
    let q = t_cond.quantile(beta)?;
    let var_part = q * spread;
    let es_part = t_cond.pdf(q) * ((nu + 1.0 + q * q) / (nu * (1.0 - beta))) * spread;
    Ok(EqCondMeasures {
        covar: var_part + shift,
        coes: es_part + shift,
        dcovar_med: (var_part + shift) - var_part,
        dcoes_med: (es_part + shift) - es_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const Z95: f64 = 1.6448536269514722;

    #[test]
    fn normal_special_cases() {
        let l = RiskLevels::new(0.95, 0.95).unwrap();
        let r0 = analytic_normal_eqcond(l, 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(r0.covar, Z95 * 2.0, epsilon = 1e-12);
        let r1 = analytic_normal_eqcond(RiskLevels::new(0.99, 0.95).unwrap(), 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(r1.covar, std_normal_quantile(0.99) * 2.0, epsilon = 1e-12);
        let r = analytic_normal_eqcond(l, 1.5, 0.4).unwrap();
        assert_abs_diff_eq!(r.dcovar_med, Z95 * 1.5 * 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(r.dcoes_med, Z95 * 1.5 * 0.4, epsilon = 1e-12);
        assert!(r.coes > r.covar);
    }

    #[test]
    fn t_converges_to_normal() {
        let l = RiskLevels::new(0.9, 0.95).unwrap();
        let n = analytic_normal_eqcond(l, 1.3, 0.6).unwrap();
        let t = analytic_t_eqcond(l, 1.3, 0.6, 1e6).unwrap();
        assert_abs_diff_eq!(n.covar, t.covar, epsilon = 1e-3);
        assert_abs_diff_eq!(n.coes, t.coes, epsilon = 1e-3);
    }

    #[test]
    fn t_median_difference() {
        let l = RiskLevels::new(0.95, 0.95).unwrap();
        let t = analytic_t_eqcond(l, 1.0, 0.5, 4.0).unwrap();
        let q = StudentT::standard(4.0).unwrap().quantile(0.95).unwrap();
        assert_abs_diff_eq!(t.dcovar_med, q * 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t.dcoes_med, q * 0.5, epsilon = 1e-12);
        assert!(analytic_t_eqcond(l, 1.0, 0.5, 1.0).is_err());
    }
}
