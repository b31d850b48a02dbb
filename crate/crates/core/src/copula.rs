//! Bivariate copulas.
//!
//! Only the joint exceedance `C̄(u, v) = 1 − u − v + C(u, v)` matters for the
//! `ω` solver, so the [`Copula`] trait is deliberately small: a CDF and a
//! survival function derived from it by inclusion–exclusion.
//!
//! The empirical beta copula mixes products of Beta CDFs over the rank pairs,
//! `Ĉ(u, v) = n⁻¹ Σᵢ B(u; Rᵢ, n + 1 − Rᵢ)·B(v; Sᵢ, n + 1 − Sᵢ)`. For integer
//! ranks `B(u; r, n + 1 − r) = P(Bin(n, u) ≥ r)`, so one binomial tail table
//! per argument evaluates the whole sum in `O(n)`.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::beta_reg;

use crate::{Error, Result};

pub trait Copula: Send + Sync {
    fn cdf(&self, u: f64, v: f64) -> f64;

    /// Joint exceedance probability `P(U > u, V > v)`.
    fn survival(&self, u: f64, v: f64) -> f64 {
        1.0 - u - v + self.cdf(u, v)
    }
}

impl<C: Copula + ?Sized> Copula for &C {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        (**self).cdf(u, v)
    }

    fn survival(&self, u: f64, v: f64) -> f64 {
        (**self).survival(u, v)
    }
}

/// `C̄(u, v)` of any copula.
pub fn survival(u: f64, v: f64, model: &dyn Copula) -> f64 {
    model.survival(u, v)
}

/// Lower Fréchet–Hoeffding bound `W(u, v) = max(u + v − 1, 0)`.
pub fn frechet_lower(u: f64, v: f64) -> f64 {
    (u + v - 1.0).max(0.0)
}

/// Upper Fréchet–Hoeffding bound `M(u, v) = min(u, v)`.
pub fn frechet_upper(u: f64, v: f64) -> f64 {
    u.min(v)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Independence;

impl Copula for Independence {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        u * v
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Comonotone;

impl Copula for Comonotone {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        frechet_upper(u, v)
    }

    fn survival(&self, u: f64, v: f64) -> f64 {
        1.0 - u.max(v)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Countermonotone;

impl Copula for Countermonotone {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        frechet_lower(u, v)
    }
}

// ---------------------------------------------------------------------------
// Gumbel
// ---------------------------------------------------------------------------

/// Gumbel dependence parameter `θ ∈ [1, ∞]`; `θ = ∞` is the comonotone limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
pub struct GumbelParam(f64);

impl GumbelParam {
    pub fn new(theta: f64) -> Result<Self> {
        if theta >= 1.0 {
            Ok(Self(theta))
        } else {
            Err(Error::domain("theta", theta, "a Gumbel parameter >= 1"))
        }
    }

    pub fn independence() -> Self {
        Self(1.0)
    }

    /// Inverts Kendall's `τ = 1 − 1/θ`.
    pub fn from_kendall_tau(tau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::domain(
                "tau",
                tau,
                "a Kendall tau in [0, 1) (Gumbel has no negative dependence)",
            ));
        }
        Ok(Self(1.0 / (1.0 - tau)))
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    pub fn kendall_tau(self) -> f64 {
        1.0 - 1.0 / self.0
    }
}

pub fn tau_to_theta(tau: f64) -> Result<GumbelParam> {
    GumbelParam::from_kendall_tau(tau)
}

/// `exp(−((−ln u)^θ + (−ln v)^θ)^{1/θ})`.
pub fn gumbel_cdf(u: f64, v: f64, theta: GumbelParam) -> f64 {
    if u <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return v.min(1.0);
    }
    if v >= 1.0 {
        return u;
    }
    let (a, b) = ((-u.ln()), (-v.ln()));
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    // big·(1 + (small/big)^θ)^{1/θ}; stays finite for huge θ
    let th = theta.0;
    let norm = if th.is_infinite() {
        big
    } else {
        big * ((small / big).powf(th).ln_1p() / th).exp()
    };
    (-norm).exp()
}

impl Copula for GumbelParam {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        gumbel_cdf(u, v, *self)
    }
}

/// Marshall–Olkin sampler: a positive-stable frailty `V` with Laplace
/// transform `exp(−t^{1/θ})` drawn by the Chambers–Mallows–Stuck (Kanter)
/// construction, then `Uᵢ = exp(−(Eᵢ/V)^{1/θ})`.
#[derive(Debug, Clone, Copy)]
pub struct GumbelSampler {
    theta: GumbelParam,
}

impl GumbelSampler {
    pub fn new(theta: GumbelParam) -> Self {
        Self { theta }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let th = self.theta.0;
        let e1 = -rng.sample::<f64, _>(Open01).ln();
        let e2 = -rng.sample::<f64, _>(Open01).ln();
        if th == 1.0 {
            return (to_unit(e1), to_unit(e2));
        }
        let a = 1.0 / th;
        let frailty = positive_stable(a, rng);
        (
            to_unit((e1 / frailty).powf(a)),
            to_unit((e2 / frailty).powf(a)),
        )
    }
}

/// `exp(−w)` kept strictly inside (0, 1).
fn to_unit(w: f64) -> f64 {
    (-w).exp()
        .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Positive stable variate with `E[e^{−tS}] = e^{−t^a}`, `0 < a < 1`.
fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let angle = std::f64::consts::PI * rng.sample::<f64, _>(Open01);
    let w = -rng.sample::<f64, _>(Open01).ln();
    let zolotarev = ((a * angle).sin().powf(a) * ((1.0 - a) * angle).sin().powf(1.0 - a)
        / angle.sin())
    .powf(1.0 / (1.0 - a));
    (zolotarev / w).powf((1.0 - a) / a)
}

/// The ChaCha stream used for dataset `stream` of an experiment keyed by `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` i.i.d. pairs from the Gumbel copula; stream 0 of `seed`.
pub fn sample_gumbel(n: usize, theta: GumbelParam, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = seeded_rng(seed, 0);
    let sampler = GumbelSampler::new(theta);
    (0..n).map(|_| sampler.draw(&mut rng)).collect()
}

// ---------------------------------------------------------------------------
// Ranks and pseudo-observations
// ---------------------------------------------------------------------------

/// 1-based ranks, ties receiving the average of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Rank-transformed sample `(rank(xᵢ)/(n + 1), rank(yᵢ)/(n + 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservations {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl PseudoObservations {
    /// Takes already-uniform values as given, e.g. read back from a file.
    pub fn from_uniform(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::InsufficientData(format!(
                "pseudo-observation columns differ in length ({} vs {})",
                u.len(),
                v.len()
            )));
        }
        if u.len() < 2 {
            return Err(Error::InsufficientData(
                "need at least 2 pseudo-observations".into(),
            ));
        }
        if let Some(bad) = u.iter().chain(&v).find(|x| !(**x > 0.0 && **x < 1.0)) {
            return Err(Error::domain(
                "pseudo-observation",
                *bad,
                "a value in (0, 1)",
            ));
        }
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.v.iter().copied())
    }
}

pub fn pseudo_observations(xs: &[f64], ys: &[f64]) -> Result<PseudoObservations> {
    if xs.len() != ys.len() {
        return Err(Error::InsufficientData(format!(
            "paired series differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 paired observations, got {n}"
        )));
    }
    if let Some(i) = xs.iter().chain(ys).position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i % n));
    }
    let scale = (n + 1) as f64;
    let u = average_ranks(xs).into_iter().map(|r| r / scale).collect();
    let v = average_ranks(ys).into_iter().map(|r| r / scale).collect();
    Ok(PseudoObservations { u, v })
}

// ---------------------------------------------------------------------------
// Empirical beta copula
// ---------------------------------------------------------------------------

/// Mixture of products of Beta CDF kernels over the rank pairs. Margins are
/// exactly uniform when ranks are untied; averaged ranks under ties keep it
/// monotone and bounded but not margin-exact.
#[derive(Debug, Clone)]
pub struct EmpiricalBetaCopula {
    n: usize,
    ranks_u: Vec<f64>,
    ranks_v: Vec<f64>,
    has_ties: bool,
}

pub fn fit_beta_copula(pobs: &PseudoObservations) -> EmpiricalBetaCopula {
    let n = pobs.len();
    let scale = (n + 1) as f64;
    // ranks are integers or, under ties, half-integers
    let to_rank = |x: &f64| ((x * scale) * 2.0).round() / 2.0;
    let ranks_u: Vec<f64> = pobs.u.iter().map(to_rank).collect();
    let ranks_v: Vec<f64> = pobs.v.iter().map(to_rank).collect();
    let has_ties = ranks_u.iter().chain(&ranks_v).any(|r| r.fract() != 0.0);
    EmpiricalBetaCopula {
        n,
        ranks_u,
        ranks_v,
        has_ties,
    }
}

impl EmpiricalBetaCopula {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    /// `B(x; r, n + 1 − r)` for every rank in `ranks`.
    fn kernel(&self, ranks: &[f64], x: f64) -> Vec<f64> {
        if x <= 0.0 {
            return vec![0.0; ranks.len()];
        }
        if x >= 1.0 {
            return vec![1.0; ranks.len()];
        }
        let tails = binomial_upper_tails(self.n, x);
        let b_total = (self.n + 1) as f64;
        ranks
            .iter()
            .map(|&r| {
                if r.fract() == 0.0 {
                    tails[r as usize]
                } else {
                    beta_reg(r, b_total - r, x)
                }
            })
            .collect()
    }
}

impl Copula for EmpiricalBetaCopula {
    fn cdf(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        let ku = self.kernel(&self.ranks_u, u);
        let kv = self.kernel(&self.ranks_v, v);
        let sum: f64 = ku.iter().zip(&kv).map(|(a, b)| a * b).sum();
        sum / self.n as f64
    }
}

/// `tails[r] = P(Bin(n, p) ≥ r)` for `r = 0..=n + 1`.
pub(crate) fn binomial_upper_tails(n: usize, p: f64) -> Vec<f64> {
    let mut tails = vec![0.0; n + 2];
    if p <= 0.0 {
        tails[0] = 1.0;
        return tails;
    }
    if p >= 1.0 {
        for t in &mut tails[..=n] {
            *t = 1.0;
        }
        return tails;
    }
    let q = 1.0 - p;
    let odds = p / q;
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n);
    let mut pmf = vec![0.0; n + 1];
    pmf[mode] = 1.0;
    const NEGLIGIBLE: f64 = 1e-20;
    let mut k = mode;
    while k < n {
        let next = pmf[k] * (n - k) as f64 / (k + 1) as f64 * odds;
        if next < NEGLIGIBLE {
            break;
        }
        pmf[k + 1] = next;
        k += 1;
    }
    let mut k = mode;
    while k > 0 {
        let next = pmf[k] * k as f64 / (n - k + 1) as f64 / odds;
        if next < NEGLIGIBLE {
            break;
        }
        pmf[k - 1] = next;
        k -= 1;
    }
    let total: f64 = pmf.iter().sum();
    let mut acc = 0.0;
    for r in (0..=n).rev() {
        acc += pmf[r] / total;
        tails[r] = acc;
    }
    tails[0] = 1.0;
    tails
}

// ---------------------------------------------------------------------------
// Kendall's tau
// ---------------------------------------------------------------------------

/// Kendall's τ_b in `O(n log n)` (Knight's merge-sort algorithm).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "kendall_tau needs paired samples");
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]).then(y[i].total_cmp(&y[j])));

    let pairs = |len: u64| len * len.saturating_sub(1) / 2;
    let mut x_ties = 0u64;
    let mut joint_ties = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        x_ties += pairs((j - i) as u64);
        let mut k = i;
        while k < j {
            let mut l = k + 1;
            while l < j && y[idx[l]] == y[idx[k]] {
                l += 1;
            }
            joint_ties += pairs((l - k) as u64);
            k = l;
        }
        i = j;
    }

    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut y_ties = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ys[j] == ys[i] {
            j += 1;
        }
        y_ties += pairs((j - i) as u64);
        i = j;
    }

    let total = pairs(n as u64) as f64;
    let numer = total - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * swaps as f64;
    let denom = ((total - x_ties as f64) * (total - y_ties as f64)).sqrt();
    numer / denom
}

fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}
