use serde::Serialize;

use super::RiskLevels;
use crate::copula::{gumbel_cdf, Copula, GumbelParam};
use crate::{Error, Result};

/// Absolute tolerance on `ω` for the bisection solver.
pub const OMEGA_TOL: f64 = 1e-8;

/// Padding added around the theoretical bracket `[β, α + β − αβ]`.
pub const BRACKET_PAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaSolution {
    pub omega: f64,
    /// `C̄(α, ω) − (1 − α)(1 − β)` at the returned `ω`.
    pub residual: f64,
    pub bracket: [f64; 2],
}

/// Largest `ω` with `C̄(α, ω) = (1 − α)(1 − β)`.
///
/// `C̄(α, ·)` is nonincreasing, so the solutions form an interval and the
/// rightmost point where `C̄(α, ω) ≥ (1 − α)(1 − β)` is found by bisection.
/// The returned `ω` is the largest point found that still satisfies the
/// inequality, so it lies within [`OMEGA_TOL`] below the root and never
/// leaves `[β, α + β − αβ]` for a positively dependent copula.
/// If `C̄(α, ·)` is already below the target at `β − ε` (a negatively
/// dependent or noisy estimate) the bracket is widened to 0, where the
/// survival function always equals `1 − α`, and the resulting `ω < β` is
/// returned as is.
pub fn solve_omega(levels: RiskLevels, model: &dyn Copula) -> Result<OmegaSolution> {
    let (alpha, beta) = (levels.alpha(), levels.beta());
    let target = (1.0 - alpha) * (1.0 - beta);
    let f = |w: f64| model.survival(alpha, w) - target;

    let upper = levels.omega_upper();
    let mut hi = if f(upper) < 0.0 {
        upper
    } else {
        (upper + BRACKET_PAD).min(1.0)
    };
    let f_hi = f(hi);
    if !(f_hi < 0.0) {
        let lo = (beta - BRACKET_PAD).max(0.0);
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: f(lo),
            f_hi,
        });
    }
    let mut lo = if f(beta) >= 0.0 {
        beta
    } else if f((beta - BRACKET_PAD).max(0.0)) >= 0.0 {
        (beta - BRACKET_PAD).max(0.0)
    } else {
        log::debug!("omega bracket widened to 0");
        0.0
    };
    let bracket = [lo, hi];
    while hi - lo > OMEGA_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(OmegaSolution {
        omega: lo,
        residual: f(lo),
        bracket,
    })
}

/// Solves the explicit Gumbel equation
/// `1 − α − ω + exp(−((−ln α)^θ + (−ln ω)^θ)^{1/θ}) = (1 − α)(1 − β)`
/// by Illinois regula falsi, independent of the [`Copula`] trait path.
pub fn gumbel_omega_equation(levels: RiskLevels, theta: GumbelParam) -> Result<OmegaSolution> {
    let (alpha, beta) = (levels.alpha(), levels.beta());
    let target = (1.0 - alpha) * (1.0 - beta);
    let g = |w: f64| 1.0 - alpha - w + gumbel_cdf(alpha, w, theta) - target;

    if theta.theta() == 1.0 {
        return Ok(OmegaSolution {
            omega: beta,
            residual: g(beta),
            bracket: [beta, beta],
        });
    }
    let upper = levels.omega_upper();
    if theta.theta().is_infinite() {
        return Ok(OmegaSolution {
            omega: upper,
            residual: g(upper),
            bracket: [upper, upper],
        });
    }

    // g is strictly decreasing on (0, 1) for 1 < θ < ∞, with g(β) ≥ 0 ≥ g(upper)
    let (mut a, mut b) = (beta, upper);
    let (mut ga, mut gb) = (g(a), g(b));
    if !(ga.is_finite() && gb.is_finite()) {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: ga,
            f_hi: gb,
        });
    }
    // the other sign is only reachable through rounding next to the bounds
    if gb >= 0.0 {
        return Ok(OmegaSolution {
            omega: b,
            residual: gb,
            bracket: [a, b],
        });
    }
    if ga <= 0.0 {
        return Ok(OmegaSolution {
            omega: a,
            residual: ga,
            bracket: [a, b],
        });
    }
    let bracket = [a, b];
    let mut side = 0i8;
    for _ in 0..200 {
        if gb == 0.0 {
            a = b;
            break;
        }
        if ga == 0.0 {
            b = a;
            break;
        }
        if b - a <= 1e-14 {
            break;
        }
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c);
        if gc > 0.0 {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    let omega = 0.5 * (a + b);
    Ok(OmegaSolution {
        omega,
        residual: g(omega),
        bracket,
    })
}
