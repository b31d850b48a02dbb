use super::{CoRiskEstimates, RiskLevels};
use crate::margins::{GpdTail, XI_ZERO_CUTOFF};
use crate::{Error, Result};

/// Closed-form co-risk measures when `Y` has a GPD tail beyond level `γ`.
///
/// With `R(p) = ((1 − p)/(1 − γ))^{−ξ}`:
/// `ΔCoVaR = s(R(ω) − R(β))/ξ` and
/// `ΔCoES = s(R(ω) − R(β))·(1/(1 − ξ) + 1/ξ)`, so the ratio is `1/(1 − ξ)`.
/// At `ξ = 0` both differences reduce to `s·ln((1 − β)/(1 − ω))`. For
/// `ξ ≥ 1` the ES terms are infinite and are returned as `f64::INFINITY`.
pub fn gpd_corisk_closed_forms(
    levels: RiskLevels,
    omega: f64,
    tail: &GpdTail,
) -> Result<CoRiskEstimates> {
    let beta = levels.beta();
    if beta < tail.gamma() {
        return Err(Error::domain(
            "beta",
            beta,
            "a level at or above the GPD threshold gamma",
        ));
    }
    if !(omega >= beta && omega < 1.0) {
        return Err(Error::domain("omega", omega, "a level in [beta, 1)"));
    }
    let (s, xi) = (tail.scale(), tail.xi());
    let covar = tail.var_beyond(omega)?;
    let dcov = if xi.abs() < XI_ZERO_CUTOFF {
        s * ((1.0 - beta) / (1.0 - omega)).ln()
    } else {
        s * (tail.tail_factor(omega) - tail.tail_factor(beta)) / xi
    };
    let (coes, dcoes) = if xi >= 1.0 {
        (f64::INFINITY, f64::INFINITY)
    } else if xi.abs() < XI_ZERO_CUTOFF {
        (tail.es_beyond(omega)?, dcov)
    } else {
        let spread = tail.tail_factor(omega) - tail.tail_factor(beta);
        (
            tail.es_beyond(omega)?,
            s * spread * (1.0 / (1.0 - xi) + 1.0 / xi),
        )
    };
    Ok(CoRiskEstimates::from_parts(omega, covar, coes, dcov, dcoes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn ratio_matches_tail_index() {
        let tail = GpdTail::new(0.9, 1.5, 0.8, 1.0 / 3.0).unwrap();
        let e = gpd_corisk_closed_forms(RiskLevels::new(0.95, 0.95).unwrap(), 0.99, &tail).unwrap();
        assert_relative_eq!(e.ratio.unwrap(), 1.5, max_relative = 1e-12);
        assert_relative_eq!(e.xi_hat.unwrap(), 1.0 / 3.0, max_relative = 1e-12);
        // differences agree with the threshold formulas
        assert_relative_eq!(
            e.dcov,
            tail.var_beyond(0.99).unwrap() - tail.var_beyond(0.95).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            e.dcoes,
            tail.es_beyond(0.99).unwrap() - tail.es_beyond(0.95).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn exponential_tail_gap_is_scale() {
        let tail = GpdTail::new(0.9, 0.0, 2.0, 0.0).unwrap();
        let e = gpd_corisk_closed_forms(RiskLevels::new(0.95, 0.95).unwrap(), 0.99, &tail).unwrap();
        assert_abs_diff_eq!(e.coes - e.covar, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.dcoes - e.dcov, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.dcov, 2.0 * 5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn independence_has_no_contribution() {
        let tail = GpdTail::new(0.9, 0.0, 1.0, 0.4).unwrap();
        let e = gpd_corisk_closed_forms(RiskLevels::new(0.95, 0.95).unwrap(), 0.95, &tail).unwrap();
        assert_eq!(e.dcov, 0.0);
        assert_eq!(e.dcoes - e.dcov, 0.0);
        assert_eq!(e.ratio, None);
    }

    #[test]
    fn infinite_mean_is_flagged() {
        let tail = GpdTail::new(0.9, 0.0, 1.0, 1.2).unwrap();
        let e = gpd_corisk_closed_forms(RiskLevels::new(0.95, 0.95).unwrap(), 0.99, &tail).unwrap();
        assert!(e.coes.is_infinite() && e.dcoes.is_infinite());
        assert!(e.dcov.is_finite());
        assert_eq!(e.ratio, None);
    }

    #[test]
    fn levels_below_threshold_are_rejected() {
        let tail = GpdTail::new(0.96, 0.0, 1.0, 0.2).unwrap();
        let l = RiskLevels::new(0.95, 0.95).unwrap();
        assert!(gpd_corisk_closed_forms(l, 0.99, &tail).is_err());
        let tail = GpdTail::new(0.9, 0.0, 1.0, 0.2).unwrap();
        assert!(gpd_corisk_closed_forms(l, 0.94, &tail).is_err());
    }
}
