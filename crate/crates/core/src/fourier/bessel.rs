//! Modified Bessel functions K₀ and K₁ of the second kind for real x > 0.
//!
//! For x ≤ 2 the ascending series are summed; above that Steed's method
//! on the Temme continued fraction (CF2) is used. Both branches reach close
//! to double precision.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Series below, continued fraction above.
pub const CROSSOVER: f64 = 2.0;

/// K_j(x) for j ∈ {0, 1}.
pub fn bessel_k(j: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Precondition(format!("K_j needs a finite x > 0, got {x}")));
    }
    let (k0, k1) = bessel_k01(x);
    match j {
        0 => Ok(k0),
        1 => Ok(k1),
        _ => Err(Error::Precondition(format!("only K_0 and K_1 are implemented, got order {j}"))),
    }
}

/// (K₀(x), K₁(x)) for x > 0; NaN outside the domain.
pub fn bessel_k01(x: f64) -> (f64, f64) {
    if !(x > 0.0) {
        return (f64::NAN, f64::NAN);
    }
    if x <= CROSSOVER {
        series(x)
    } else {
        continued_fraction(x)
    }
}

fn series(x: f64) -> (f64, f64) {
    let y = x * x / 4.0;
    let l = (x / 2.0).ln();
    // K0 = −(ln(x/2) + γ) I0 + Σ_{k≥1} H_k y^k/(k!)²
    // K1 = 1/x + ln(x/2) I1 − (x/4) Σ_{k≥0} (ψ(k+1) + ψ(k+2)) y^k/(k!(k+1)!)
    let mut term = 1.0; // y^k/(k!)²
    let mut i0 = 1.0;
    let mut s0 = 0.0;
    let mut harmonic = 0.0;
    let mut term1 = 1.0; // y^k/(k!(k+1)!)
    let mut i1 = 1.0;
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA; // k = 0: ψ(1) + ψ(2) = 1 − 2γ
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        term1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += term;
        s0 += harmonic * term;
        i1 += term1;
        s1 += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * term1;
        if term < 1e-18 * i0 && term1 < 1e-18 * i1 {
            break;
        }
    }
    let k0 = -(l + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + l * (x / 2.0) * i1 - (x / 4.0) * s1;
    (k0, k1)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_crossover() {
        let (a0, a1) = series(CROSSOVER);
        let (b0, b1) = continued_fraction(CROSSOVER);
        assert!((a0 - b0).abs() < 1e-14 * a0);
        assert!((a1 - b1).abs() < 1e-14 * a1);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -1.0).is_err());
        assert!(bessel_k(2, 1.0).is_err());
        assert!(bessel_k(0, f64::NAN).is_err());
    }
}
