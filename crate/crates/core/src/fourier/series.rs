//! Evaluation of F(z, t) = Σ_α a_α t² 𝐊_α(4π|α|t/√|D|) ψ(αz/√D) on ℍ₃ and
//! the weight-2 automorphy residual.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::bessel::bessel_k01;
use super::FourierTable;
use crate::error::{Error, Result};
use crate::hecke::in_delta;
use crate::ring::{FieldId, Mat2, QuadInt};

type C = Complex64;

/// A point (z, t) of hyperbolic 3-space, t > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H3Point {
    pub z: C,
    pub t: f64,
}

impl H3Point {
    pub fn new(z: C, t: f64) -> Result<H3Point> {
        if !(t > 0.0) || !t.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Precondition(format!("({z}, {t}) is not a point of ℍ₃")));
        }
        Ok(H3Point { z, t })
    }

    /// γ·w = ((az + b)·conj(cz + d) + a·c̄·t², t) / (|cz + d|² + |c|²t²),
    /// for det γ = 1.
    pub fn act(&self, g: &[C; 4]) -> H3Point {
        let [a, b, c, d] = *g;
        let czd = c * self.z + d;
        let t2 = self.t * self.t;
        let den = czd.norm_sqr() + c.norm_sqr() * t2;
        let z = ((a * self.z + b) * czd.conj() + a * c.conj() * t2) / den;
        H3Point { z, t: self.t / den }
    }

    pub fn to_json(&self) -> Value {
        json!({"z": [self.z.re, self.z.im], "t": self.t})
    }
}

/// The vector 𝐊 attached to α.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelPhase {
    /// (−(i/2)K₁, K₀, (i/2)K₁) for every α; not automorphic for γ with c ≠ 0
    Literal,
    /// (−(i/2)(α/|α|)K₁, K₀, (i/2)(ᾱ/|α|)K₁)
    #[default]
    Unit,
}

impl KernelPhase {
    pub fn parse(s: &str) -> Result<KernelPhase> {
        match s {
            "literal" => Ok(KernelPhase::Literal),
            "unit" => Ok(KernelPhase::Unit),
            _ => Err(Error::Parse(format!("unknown kernel phase {s:?} (literal | unit)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelPhase::Literal => "literal",
            KernelPhase::Unit => "unit",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: [C; 3],
    /// estimated contribution of the omitted α with N(α) > norm_bound
    pub tail_bound: f64,
    /// floating-point error estimate for the summed terms
    pub roundoff: f64,
    pub terms: usize,
}

impl SeriesValue {
    pub fn norm(&self) -> f64 {
        vec_norm(&self.value)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "tail_bound": self.tail_bound,
            "roundoff": self.roundoff,
            "terms": self.terms,
        })
    }
}

fn vec_norm(v: &[C; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn sqrt_abs_disc(f: FieldId) -> f64 {
    (f.disc().abs() as f64).sqrt()
}

fn kernel_vector(phase: KernelPhase, unit: C, k0: f64, k1: f64) -> [C; 3] {
    let i = C::new(0.0, 1.0);
    match phase {
        KernelPhase::Literal => [-i * 0.5 * k1, C::new(k0, 0.0), i * 0.5 * k1],
        KernelPhase::Unit => [-i * 0.5 * unit * k1, C::new(k0, 0.0), i * 0.5 * unit.conj() * k1],
    }
}

/// One term a t² 𝐊(4π|α|t/√|D|) ψ(αz/√D), with ψ(w) = e^{2πi(w + w̄)} and
/// √D = i√|D|, so that ψ(αz/√D) = exp(4πi·Im(αz)/√|D|).
fn term(f: FieldId, alpha: &QuadInt, a: f64, w: &H3Point, phase: KernelPhase) -> [C; 3] {
    let (re, im) = f.to_complex(alpha);
    let al = C::new(re, im);
    let abs = al.norm();
    let s = sqrt_abs_disc(f);
    let (k0, k1) = bessel_k01(4.0 * PI * abs * w.t / s);
    let psi = C::from_polar(1.0, 4.0 * PI * (al * w.z).im / s);
    let scale = psi * (a * w.t * w.t);
    let k = kernel_vector(phase, al / abs, k0, k1);
    [k[0] * scale, k[1] * scale, k[2] * scale]
}

/// Estimated size of Σ_{N(α) > B} |a_α| t²‖𝐊‖, assuming |a_α| ≤ A·N(α)
/// with A the largest ratio in the table and about 2π/√|D| elements per
/// unit of norm; doubled for safety.
fn tail_estimate(table: &FourierTable, t: f64) -> f64 {
    let f = table.field();
    let mut amax: f64 = 0.0;
    for e in &table.entries {
        let n = f.norm(&e.alpha).to_i64().unwrap_or(1).max(1) as f64;
        amax = amax.max(e.exact.to_f64().unwrap_or(f64::INFINITY).abs() / n);
    }
    if amax == 0.0 {
        return 0.0;
    }
    let s = sqrt_abs_disc(f);
    let density = 2.0 * PI / s;
    let mut total = 0.0;
    let mut m = table.norm_bound as f64 + 1.0;
    let mut step = 1.0;
    loop {
        let x = 4.0 * PI * m.sqrt() * t / s;
        let (k0, k1) = bessel_k01(x);
        let kn = (k0 * k0 + 0.5 * k1 * k1).sqrt();
        let piece = density * amax * m * t * t * kn * step;
        total += piece;
        if piece < 1e-18 * total || (kn == 0.0) || m > 1e12 {
            break;
        }
        m += step;
        if m > 4.0 * (table.norm_bound as f64 + 1.0) * step {
            step *= 2.0;
        }
    }
    2.0 * total
}

fn pairwise_sum(parts: &[[C; 3]]) -> [C; 3] {
    match parts.len() {
        0 => [C::new(0.0, 0.0); 3],
        1 => parts[0],
        n => {
            let (l, r) = (pairwise_sum(&parts[..n / 2]), pairwise_sum(&parts[n / 2..]));
            [l[0] + r[0], l[1] + r[1], l[2] + r[2]]
        }
    }
}

/// The truncated series at w, summed pairwise in table order.
pub fn eval_series(table: &FourierTable, w: &H3Point, phase: KernelPhase) -> SeriesValue {
    let f = table.field();
    let parts: Vec<[C; 3]> = table
        .entries
        .par_iter()
        .map(|e| term(f, &e.alpha, e.exact.to_f64().unwrap_or(f64::NAN), w, phase))
        .collect();
    let value = pairwise_sum(&parts);
    let magnitude: f64 = parts.iter().map(vec_norm).sum();
    SeriesValue {
        value,
        tail_bound: tail_estimate(table, w.t),
        roundoff: 4.0 * f64::EPSILON * magnitude * (parts.len().max(1) as f64).sqrt(),
        terms: parts.len(),
    }
}

/// j(γ, w) = [[cz + d, −ct], [c̄t, conj(cz + d)]]; its determinant is
/// |cz + d|² + |c|²t² > 0 and j(γδ, w) = j(γ, δw)·j(δ, w).
pub fn j_factor(g: &[C; 4], w: &H3Point) -> [C; 4] {
    let [_, _, c, d] = *g;
    let czd = c * w.z + d;
    [czd, -c * w.t, c.conj() * w.t, czd.conj()]
}

/// The symmetric square of m = [[a, b], [c, d]] in the basis matching 𝐊:
/// D·S·D⁻¹ with D = diag(1, i, −1) and S the matrix of
/// v₀X² + v₁XY + v₂Y² ↦ v(aX + cY, bX + dY) on coefficient vectors.
/// A homomorphism: sym2(mn) = sym2(m)·sym2(n).
pub fn sym2(m: &[C; 4]) -> [[C; 3]; 3] {
    let [a, b, c, d] = *m;
    let s = [
        [a * a, a * b, b * b],
        [a * c * 2.0, a * d + b * c, b * d * 2.0],
        [c * c, c * d, d * d],
    ];
    let dg = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0)];
    let mut out = s;
    for r in 0..3 {
        for k in 0..3 {
            out[r][k] = s[r][k] * dg[r] / dg[k];
        }
    }
    out
}

fn inverse(m: &[C; 4]) -> [C; 4] {
    let [a, b, c, d] = *m;
    let det = a * d - b * c;
    [d / det, -b / det, -c / det, a / det]
}

fn apply3(m: &[[C; 3]; 3], v: &[C; 3]) -> [C; 3] {
    let mut out = [C::new(0.0, 0.0); 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

fn operator_norm_bound(m: &[[C; 3]; 3]) -> f64 {
    m.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct AutomorphyReport {
    /// ‖σ²(j(γ,w)⁻¹)F(γw) − F(w)‖ / ‖F(w)‖
    pub residual: f64,
    /// truncation plus roundoff allowance on the same relative scale
    pub budget: f64,
    pub image: H3Point,
    pub at_w: SeriesValue,
    pub at_image: SeriesValue,
}

impl AutomorphyReport {
    pub fn within_budget(&self) -> bool {
        self.residual <= self.budget
    }

    pub fn to_json(&self) -> Value {
        json!({
            "residual": self.residual,
            "budget": self.budget,
            "within_budget": self.within_budget(),
            "image": self.image.to_json(),
            "F_w": self.at_w.to_json(),
            "F_gamma_w": self.at_image.to_json(),
        })
    }
}

pub(crate) fn complex_matrix(f: FieldId, g: &Mat2) -> [C; 4] {
    let c = |x: &QuadInt| {
        let (re, im) = f.to_complex(x);
        C::new(re, im)
    };
    [c(&g.a), c(&g.b), c(&g.c), c(&g.d)]
}

/// Relative residual of F|γ = F at w for γ ∈ Γ₁(n), acting through
/// σ²(ĵ⁻¹) with ĵ = j(γ, w)/√det j(γ, w) ∈ SU(2).
pub fn automorphy_residual(table: &FourierTable, gamma: &Mat2, w: &H3Point, phase: KernelPhase) -> Result<AutomorphyReport> {
    let f = table.field();
    if !gamma.det(f).is_one() || !in_delta(&table.level, &QuadInt::one(), gamma) {
        return Err(Error::Precondition(format!("{gamma} is not in Γ₁({})", table.level.generator)));
    }
    let g = complex_matrix(f, gamma);
    let image = w.act(&g);
    let at_w = eval_series(table, w, phase);
    let at_image = eval_series(table, &image, phase);
    let j = j_factor(&g, w);
    let root = (j[0] * j[3] - j[1] * j[2]).sqrt();
    let s = sym2(&inverse(&j.map(|x| x / root)));
    let moved = apply3(&s, &at_image.value);
    let diff = [moved[0] - at_w.value[0], moved[1] - at_w.value[1], moved[2] - at_w.value[2]];
    let scale = at_w.norm();
    let (residual, budget) = if scale == 0.0 {
        (if vec_norm(&diff) == 0.0 { 0.0 } else { f64::INFINITY }, 0.0)
    } else {
        let err = at_w.tail_bound + at_w.roundoff + operator_norm_bound(&s) * (at_image.tail_bound + at_image.roundoff);
        (vec_norm(&diff) / scale, err / scale)
    };
    Ok(AutomorphyReport { residual, budget, image, at_w, at_image })
}
