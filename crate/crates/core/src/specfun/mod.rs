//! Special functions: modified Bessel `I_m`, Bessel `J_m` and its zeros, Gamma.
//!
//! Large orders are handled through log-scaled values and the ratio
//! `I_m'(x)/I_m(x)`, which is all the disc model consumes.

pub mod quad;

use thiserror::Error;

/// Largest order accepted by the `I_m` routines.
pub const MAX_I_ORDER: u32 = 10_000;
/// Largest argument accepted by the `I_m` routines.
pub const MAX_I_ARG: f64 = 1.0e3;
/// Largest order accepted by [`bessel_j_zero`].
pub const MAX_J_ZERO_ORDER: u32 = 200;
/// Largest zero index accepted by [`bessel_j_zero`].
pub const MAX_J_ZERO_INDEX: u32 = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("I_{order}({x}) overflows f64 (ln I = {ln_value})")]
    Overflow { order: u32, x: f64, ln_value: f64 },
    #[error("I_{order}({x}) underflows f64 (ln I = {ln_value})")]
    Underflow { order: u32, x: f64, ln_value: f64 },
    #[error("continued fraction for I_{order}({x}) did not converge")]
    NoConvergence { order: u32, x: f64 },
    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, SpecfunError>;

/// `I_m(x)` and `I_m'(x)` in ordinary floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: u32,
    pub argument: f64,
    pub value: f64,
    pub derivative: f64,
}

/// Overflow-safe representation: `ln I_m(x)` and `I_m'(x)/I_m(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBesselI {
    pub order: u32,
    pub argument: f64,
    pub ln_value: f64,
    pub log_derivative: f64,
}

/// A positive zero `j_{m,k}` of `J_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselZero {
    pub order: u32,
    pub index: u32,
    pub value: f64,
}

fn check_i_args(m: u32, x: f64) -> Result<()> {
    if m > MAX_I_ORDER {
        return Err(SpecfunError::Domain(format!("order {m} exceeds {MAX_I_ORDER}")));
    }
    if !(x > 0.0 && x <= MAX_I_ARG) {
        return Err(SpecfunError::Domain(format!("argument {x} outside (0, {MAX_I_ARG}]")));
    }
    Ok(())
}

/// Normalized series `S_m(y) = sum_k (y^2/4)^k m! / (k! (k+m)!)`, so that
/// `I_m(y) = (y/2)^m / m! * S_m(y)`. Returns `ln S_m(y)`.
///
/// Terms are rescaled on the fly so large arguments do not overflow.
pub fn ln_series_sum(m: u32, y: f64) -> f64 {
    let z = 0.25 * y * y;
    let mf = f64::from(m);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut ln_scale = 0.0_f64;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        term *= z / (k * (k + mf));
        sum += term;
        if sum > 1e280 {
            sum *= 1e-280;
            term *= 1e-280;
            ln_scale += 280.0 * std::f64::consts::LN_10;
        }
        // terms decrease once k(k+m) > z
        if k * (k + mf) > z && term <= sum * 1e-17 {
            break;
        }
    }
    sum.ln() + ln_scale
}

/// `ln Gamma(m+1)` for integer `m`, exact summation for small `m`.
fn ln_factorial(m: u32) -> f64 {
    if m < 30 {
        (1..=m).map(|k| f64::from(k).ln()).sum()
    } else {
        statrs::function::gamma::ln_gamma(f64::from(m) + 1.0)
    }
}

/// `I_{m+1}(x)/I_m(x)` by the modified Lentz continued fraction.
pub fn bessel_i_ratio_next(m: u32, x: f64) -> Result<f64> {
    check_i_args(m, x)?;
    let nu = f64::from(m);
    let tiny = 1e-300;
    let mut f = 2.0 * (nu + 1.0) / x;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..200_000 {
        let b = 2.0 * (nu + 1.0 + j as f64) / x;
        d += b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + 1.0 / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(1.0 / f);
        }
    }
    Err(SpecfunError::NoConvergence { order: m, x })
}

/// `I_m'(x)/I_m(x) = m/x + I_{m+1}(x)/I_m(x)`.
pub fn bessel_i_log_derivative(m: u32, x: f64) -> Result<f64> {
    Ok(f64::from(m) / x + bessel_i_ratio_next(m, x)?)
}

/// Log-scaled `I_m(x)` together with `I_m'/I_m`. Never overflows.
pub fn bessel_i_scaled(m: u32, x: f64) -> Result<ScaledBesselI> {
    check_i_args(m, x)?;
    let ln_value = f64::from(m) * (0.5 * x).ln() - ln_factorial(m) + ln_series_sum(m, x);
    Ok(ScaledBesselI { order: m, argument: x, ln_value, log_derivative: bessel_i_log_derivative(m, x)? })
}

/// `I_m(x)` and `I_m'(x)`.
///
/// Returns [`SpecfunError::Overflow`] or [`SpecfunError::Underflow`] when the
/// value leaves the normal `f64` range; use [`bessel_i_scaled`] there.
pub fn bessel_i(m: u32, x: f64) -> Result<BesselEval> {
    let s = bessel_i_scaled(m, x)?;
    if s.ln_value > f64::MAX.ln() - 1.0 {
        return Err(SpecfunError::Overflow { order: m, x, ln_value: s.ln_value });
    }
    if s.ln_value < f64::MIN_POSITIVE.ln() + 1.0 {
        return Err(SpecfunError::Underflow { order: m, x, ln_value: s.ln_value });
    }
    let value = s.ln_value.exp();
    Ok(BesselEval { order: m, argument: x, value, derivative: value * s.log_derivative })
}

/// Normalized radial profile `I_m(x r)/I_m(x)` for `r` in `[0, 1]`.
pub fn bessel_i_profile(m: u32, x: f64, r: f64) -> Result<f64> {
    check_i_args(m, x)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(SpecfunError::Domain(format!("radius {r} outside [0, 1]")));
    }
    if r == 0.0 {
        return Ok(if m == 0 { (-ln_series_sum(0, x)).exp() } else { 0.0 });
    }
    let ln = f64::from(m) * r.ln() + ln_series_sum(m, x * r) - ln_series_sum(m, x);
    Ok(ln.exp())
}

/// `J_m(x)` and `J_{m+1}(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 sum J_{2k} = 1`.
fn bessel_j_pair(m: u32, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if m == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    let ax = x.abs();
    let top = f64::from(m + 1).max(ax);
    let mut start = (top.ceil() as u64) + 60 + 12 * (top.cbrt().ceil() as u64);
    if start % 2 == 1 {
        start += 1;
    }
    let mut jp1 = 0.0_f64;
    let mut j = 1e-300_f64;
    let mut norm = 0.0_f64;
    let mut want_m = 0.0;
    let mut want_m1 = 0.0;
    let mut k = start;
    loop {
        if k == u64::from(m) {
            want_m = j;
        }
        if k == u64::from(m) + 1 {
            want_m1 = j;
        }
        if k == 0 {
            norm += j;
            break;
        }
        if k % 2 == 0 {
            norm += 2.0 * j;
        }
        let jm1 = 2.0 * k as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        k -= 1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            want_m *= 1e-250;
            want_m1 *= 1e-250;
        }
    }
    let mut jm = want_m / norm;
    let mut jm1 = want_m1 / norm;
    if x < 0.0 {
        if m % 2 == 1 {
            jm = -jm;
        } else {
            jm1 = -jm1;
        }
    }
    (jm, jm1)
}

/// Bessel function of the first kind `J_m(x)`.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    bessel_j_pair(m, x).0
}

/// `J_m'(x) = (m/x) J_m(x) - J_{m+1}(x)`.
pub fn bessel_j_derivative(m: u32, x: f64) -> f64 {
    let (jm, jm1) = bessel_j_pair(m, x);
    if x == 0.0 {
        return if m == 1 { 0.5 } else { 0.0 };
    }
    f64::from(m) / x * jm - jm1
}

/// The first `count` positive zeros of `J_m`, ascending.
///
/// Brackets come from sign changes on a fine scan starting at `x = m`
/// (no zero lies below the order), refined by bisection and one Newton step.
pub fn bessel_j_zeros(m: u32, count: u32) -> Result<Vec<BesselZero>> {
    if m > MAX_J_ZERO_ORDER {
        return Err(SpecfunError::Domain(format!("order {m} exceeds {MAX_J_ZERO_ORDER}")));
    }
    if count == 0 || count > MAX_J_ZERO_INDEX {
        return Err(SpecfunError::Domain(format!("zero count {count} outside 1..={MAX_J_ZERO_INDEX}")));
    }
    let step = 0.25;
    let mut zeros = Vec::with_capacity(count as usize);
    let mut a = f64::from(m).max(0.5);
    let mut fa = bessel_j(m, a);
    while zeros.len() < count as usize {
        let b = a + step;
        let fb = bessel_j(m, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            zeros.push(refine_zero(m, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    Ok(zeros.into_iter().enumerate().map(|(i, value)| BesselZero { order: m, index: i as u32 + 1, value }).collect())
}

fn refine_zero(m: u32, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 4.0 * f64::EPSILON * b {
        let c = 0.5 * (a + b);
        let fc = bessel_j(m, c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    let x = 0.5 * (a + b);
    let d = bessel_j_derivative(m, x);
    let newton = x - bessel_j(m, x) / d;
    if newton.is_finite() && (newton - x).abs() <= (b - a).max(f64::EPSILON * x) {
        newton
    } else {
        x
    }
}

/// The `k`-th positive zero `j_{m,k}` of `J_m` (`k >= 1`).
pub fn bessel_j_zero(m: u32, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(SpecfunError::Domain("zero index starts at 1".into()));
    }
    Ok(bessel_j_zeros(m, k)?[k as usize - 1].value)
}

/// `Gamma(x)` for `0 < x <= 50`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 50.0) {
        return Err(SpecfunError::Domain(format!("gamma argument {x} outside (0, 50]")));
    }
    Ok(statrs::function::gamma::gamma(x))
}
