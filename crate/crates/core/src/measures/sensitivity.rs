//! Closed-form sensitivity functions of the historical CoVaR, CoES and ΔCoES
//! estimators to a point mass at loss `l`.

use serde::Serialize;

use crate::margins::StudentT;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityInput {
    pub l: f64,
    pub omega: f64,
    pub beta: f64,
    pub var_omega: f64,
    pub var_beta: f64,
    pub es_omega: f64,
    pub es_beta: f64,
    /// `f_Y(VaR_ω(Y))`; only S1 uses it.
    pub density_at_var_omega: f64,
}

impl SensitivityInput {
    /// Fills in the VaR/ES/density terms from a Student-t margin.
    pub fn from_t(l: f64, omega: f64, beta: f64, margin: &StudentT) -> Result<Self> {
        Ok(Self {
            l,
            omega,
            beta,
            var_omega: margin.quantile(omega)?,
            var_beta: margin.quantile(beta)?,
            es_omega: margin.expected_shortfall(omega)?,
            es_beta: margin.expected_shortfall(beta)?,
            density_at_var_omega: margin.density_at_quantile(omega)?,
        })
    }

    /// Same terms with a different contamination point.
    pub fn at(self, l: f64) -> Self {
        Self { l, ..self }
    }
}

/// S1: `ω/f` above `VaR_ω`, 0 at it, `(ω − 1)/f` below.
pub fn sensitivity_covar(input: &SensitivityInput) -> Result<f64> {
    let f = input.density_at_var_omega;
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::Undefined("CoVaR sensitivity at a zero density"));
    }
    let v = input.var_omega;
    Ok(if input.l > v {
        input.omega / f
    } else if input.l == v {
        0.0
    } else {
        (input.omega - 1.0) / f
    })
}

/// S2: linear with slope `1/(1 − ω)` from `VaR_ω` upward, constant below.
pub fn sensitivity_coes(input: &SensitivityInput) -> Result<f64> {
    let SensitivityInput {
        l,
        omega,
        var_omega,
        es_omega,
        ..
    } = *input;
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::domain("omega", omega, "a level in (0, 1)"));
    }
    Ok(if l >= var_omega {
        l / (1.0 - omega) - omega / (1.0 - omega) * var_omega + es_omega
    } else {
        var_omega + es_omega
    })
}

/// S3, three branches split at `VaR_β ≤ VaR_ω`. At a breakpoint the upper
/// branch is used; the branches agree there.
pub fn sensitivity_dcoes(input: &SensitivityInput) -> Result<f64> {
    let SensitivityInput {
        l,
        omega,
        beta,
        var_omega,
        var_beta,
        es_omega,
        es_beta,
        ..
    } = *input;
    if omega < beta {
        return Err(Error::domain("omega", omega, "a level at or above beta"));
    }
    if !(omega < 1.0 && beta > 0.0) {
        return Err(Error::domain(
            "omega",
            omega,
            "levels with 0 < beta <= omega < 1",
        ));
    }
    let tail_b = beta / (1.0 - beta);
    Ok(if l >= var_omega {
        l * (omega - beta) / ((1.0 - omega) * (1.0 - beta)) - omega / (1.0 - omega) * var_omega
            + tail_b * var_beta
            + es_omega
            - es_beta
    } else if l >= var_beta {
        var_omega + es_omega - l / (1.0 - beta) + tail_b * var_beta - es_beta
    } else {
        var_omega - var_beta + es_omega - es_beta
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fixture() -> SensitivityInput {
        let t3 = StudentT::standard(3.0).unwrap();
        SensitivityInput::from_t(0.0, 0.9974727, 0.95, &t3).unwrap()
    }

    #[test]
    fn s1_branches() {
        let s = fixture();
        let f = s.density_at_var_omega;
        assert_eq!(sensitivity_covar(&s.at(s.var_omega)).unwrap(), 0.0);
        assert_eq!(
            sensitivity_covar(&s.at(s.var_omega + 1.0)).unwrap(),
            s.omega / f
        );
        assert!(sensitivity_covar(&s.at(s.var_omega - 1.0)).unwrap() < 0.0);
        let zero = SensitivityInput {
            density_at_var_omega: 0.0,
            ..s
        };
        assert!(sensitivity_covar(&zero).is_err());
    }

    #[test]
    fn s2_continuity_and_slope() {
        let s = fixture();
        let v = s.var_omega;
        let above = v / (1.0 - s.omega) - s.omega / (1.0 - s.omega) * v + s.es_omega;
        assert_abs_diff_eq!(
            above,
            sensitivity_coes(&s.at(v - 1e-12)).unwrap(),
            epsilon = 1e-10
        );
        let (a, b) = (v + 1.0, v + 3.0);
        let slope =
            (sensitivity_coes(&s.at(b)).unwrap() - sensitivity_coes(&s.at(a)).unwrap()) / 2.0;
        assert_abs_diff_eq!(slope, 1.0 / (1.0 - s.omega), epsilon = 1e-8);
        assert_eq!(
            sensitivity_coes(&s.at(v - 5.0)).unwrap(),
            sensitivity_coes(&s.at(v - 1.0)).unwrap()
        );
    }

    #[test]
    fn s3_vanishes_without_dependence() {
        let t3 = StudentT::standard(3.0).unwrap();
        let s = SensitivityInput::from_t(0.0, 0.95, 0.95, &t3).unwrap();
        for l in [-3.0, 0.0, s.var_beta, 2.5, 10.0, 100.0] {
            assert_abs_diff_eq!(sensitivity_dcoes(&s.at(l)).unwrap(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn s3_rejects_omega_below_beta() {
        let t3 = StudentT::standard(3.0).unwrap();
        let s = SensitivityInput::from_t(0.0, 0.9, 0.95, &t3).unwrap();
        assert!(sensitivity_dcoes(&s).is_err());
    }
}
