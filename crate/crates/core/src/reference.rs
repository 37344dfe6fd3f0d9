//! Closed-form reference results: WKB levels of `D|p|^α + q²|x|^β`, the
//! fractional infinite well, and the special functions they need.

use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Euler Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Parameters of the power-law oscillator `D (-ħ²Δ)^{α/2} + q² |x|^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbModel {
    pub alpha: f64,
    pub beta: f64,
    pub diffusion: f64,
    pub strength: f64,
    pub hbar: f64,
}

impl WkbModel {
    pub fn new(alpha: f64, beta: f64, diffusion: f64, strength: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("D", diffusion),
            ("q", strength),
            ("hbar", hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(WkbModel {
            alpha,
            beta,
            diffusion,
            strength,
            hbar,
        })
    }

    /// Unit model `D = q = ħ = 1`.
    pub fn unit(alpha: f64, beta: f64) -> Result<Self> {
        WkbModel::new(alpha, beta, 1.0, 1.0, 1.0)
    }

    /// `αβ / (α + β)`.
    pub fn exponent(&self) -> f64 {
        self.alpha * self.beta / (self.alpha + self.beta)
    }

    /// Level-independent factor, so that `E_n = scale · (n + 1/2)^exponent`.
    pub fn scale(&self) -> f64 {
        let b = beta(1.0 / self.beta, 1.0 / self.alpha + 1.0);
        let base =
            PI * self.hbar * self.beta * self.diffusion.powf(1.0 / self.alpha) * self.strength.powf(2.0 / self.beta)
                / (2.0 * b);
        base.powf(self.exponent())
    }
}

pub fn wkb_energy(model: &WkbModel, n: usize) -> f64 {
    model.scale() * (n as f64 + 0.5).powf(model.exponent())
}

/// `E_n = D (ħ n π / 2a)^α` for the well `|x| < a`.
pub fn exact_box_energy(alpha: f64, diffusion: f64, hbar: f64, half_width: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", "box modes start at n = 1"));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::domain("a", format!("need a > 0, got {half_width}")));
    }
    Ok(diffusion * (hbar * n as f64 * PI / (2.0 * half_width)).powf(alpha))
}

/// `ψ_n(x) = sin(nπ(x + a)/2a) / √a`.
pub fn box_eigenfunction(half_width: f64, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", "box modes start at n = 1"));
    }
    if x.abs() > half_width {
        return Err(Error::Evaluation {
            x,
            reason: format!("outside the well |x| <= {half_width}"),
        });
    }
    Ok((n as f64 * PI * (x + half_width) / (2.0 * half_width)).sin() / half_width.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    // ln Γ values from a 30-digit evaluation
    const LN_GAMMA_TABLE: [(f64, f64); 8] = [
        (0.1, 2.252_712_651_734_206),
        (0.5, 0.572_364_942_924_700_1),
        (1.0, 0.0),
        (1.5, -0.120_782_237_635_245_22),
        (2.5, 0.284_682_870_472_919_16),
        (7.25, 7.052_185_450_738_539),
        (15.0, 25.191_221_182_738_68),
        (29.5, 69.569_080_920_823_63),
    ];

    #[test]
    fn ln_gamma_table() {
        for (x, want) in LN_GAMMA_TABLE {
            let got = ln_gamma(x);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "lnΓ({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn beta_values() {
        assert!((beta(0.5, 1.5) - PI / 2.0).abs() < 1e-14);
        assert!((beta(0.25, 1.75) - 3.332_162_203_618_774_7).abs() < 1e-13);
        assert!((beta(0.5, 5.0 / 3.0) - 1.478_348_319_559_880_3).abs() < 1e-13);
    }

    #[test]
    fn harmonic_oscillator_is_exact() {
        let m = WkbModel::unit(2.0, 2.0).unwrap();
        for n in 0..10 {
            assert!((wkb_energy(&m, n) - (2 * n + 1) as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn quartic_four_thirds_spacing() {
        let m = WkbModel::unit(4.0 / 3.0, 4.0).unwrap();
        assert!((m.exponent() - 1.0).abs() < 1e-15);
        let slope = wkb_energy(&m, 1) - wkb_energy(&m, 0);
        // 2π / (Γ(1/4) Γ(7/4)) to 30 digits: 1.88561808316412673...
        assert!((slope - 1.885_618_083_164_126_7).abs() < 1e-13);
        assert!((wkb_energy(&m, 0) - 0.942_809_041_582_063_4).abs() < 1e-13);
    }

    #[test]
    fn three_halves_oscillator_against_high_precision() {
        let m = WkbModel::unit(1.5, 2.0).unwrap();
        let oracle = [1.053_367_232_177_200_5, 2.701_101_348_959_353, 4.185_014_344_429_885];
        for (n, want) in oracle.iter().enumerate() {
            assert!((wkb_energy(&m, n) - want).abs() < 1e-13);
        }
        // collocation result for E_1 is 2.7081; WKB is approximate
        assert!((wkb_energy(&m, 1) - 2.708_181_518).abs() / 2.708 < 0.01);
    }

    #[test]
    fn wkb_rejects_nonpositive() {
        assert!(WkbModel::new(0.0, 2.0, 1.0, 1.0, 1.0).is_err());
        assert!(WkbModel::new(1.5, 2.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn box_energies() {
        assert!((exact_box_energy(2.0, 1.0, 1.0, 1.0, 1).unwrap() - PI * PI / 4.0).abs() < 1e-15);
        assert!((exact_box_energy(1.0, 1.0, 1.0, PI / 2.0, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!(exact_box_energy(1.5, 1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn box_eigenfunction_values() {
        assert!((box_eigenfunction(1.0, 1, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for n in 1..6 {
            assert!(box_eigenfunction(2.0, n, 2.0).unwrap().abs() < 1e-15);
            assert!(box_eigenfunction(2.0, n, -2.0).unwrap().abs() < 1e-15);
        }
        assert!(box_eigenfunction(1.0, 1, 1.5).is_err());
    }

    #[test]
    fn box_eigenfunction_unit_norm() {
        let a = 1.3;
        let panels = 10_000;
        let h = 2.0 * a / panels as f64;
        for n in 1..5 {
            let mut acc = 0.0;
            for i in 0..=panels {
                let x = (-a + i as f64 * h).clamp(-a, a);
                let w = if i == 0 || i == panels { 0.5 } else { 1.0 };
                acc += w * box_eigenfunction(a, n, x).unwrap().powi(2);
            }
            assert!((acc * h - 1.0).abs() < 1e-8);
        }
    }
}
