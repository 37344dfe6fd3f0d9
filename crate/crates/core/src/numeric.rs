//! Small floating-point helpers shared by the matrix builders.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Reduce `num / den` (a multiple of π) into `[0, 2)` using exact integer
/// arithmetic, so large harmonics keep full precision.
#[inline]
fn reduced_ratio(num: i64, den: i64) -> f64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(2 * den);
    r as f64 / den as f64
}

/// `cos(π num / den)`.
#[inline]
pub(crate) fn cos_pi_ratio(num: i64, den: i64) -> f64 {
    (PI * reduced_ratio(num, den)).cos()
}

/// `sin(π num / den)`.
#[inline]
pub(crate) fn sin_pi_ratio(num: i64, den: i64) -> f64 {
    (PI * reduced_ratio(num, den)).sin()
}

/// `exp(iπ num / den)`.
#[inline]
pub(crate) fn cis_pi_ratio(num: i64, den: i64) -> Complex64 {
    let (s, c) = (PI * reduced_ratio(num, den)).sin_cos();
    Complex64::new(c, s)
}

/// `i^m` for any integer `m`.
#[inline]
pub(crate) fn i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(-1)^n`.
#[inline]
pub(crate) fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Dot product accumulated in doubled working precision (TwoProduct via FMA
/// plus TwoSum).
pub(crate) fn dot_compensated(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0f64;
    let mut err = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let t = sum + p;
        let z = t - sum;
        let se = (sum - (t - z)) + (p - z);
        sum = t;
        err += pe + se;
    }
    sum + err
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2` (double-double).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    pub(crate) hi: f64,
    pub(crate) lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

const PI_DD: Dd = Dd {
    hi: PI,
    lo: 1.224_646_799_147_353_2e-16,
};

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub(crate) fn new(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    pub(crate) fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    pub(crate) fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub(crate) fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub(crate) fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let (s, e) = two_sum(self.hi, -p);
        let r = s + (e - pe + self.lo);
        let (hi, lo) = quick_two_sum(q1, r / b);
        Dd { hi, lo }
    }

    /// `sqrt(v)` for `v >= 0`, one Newton correction on the double root.
    pub(crate) fn sqrt_f64(v: f64) -> Dd {
        if v == 0.0 {
            return Dd::ZERO;
        }
        let s = v.sqrt();
        let r = (-s).mul_add(s, v);
        let (hi, lo) = quick_two_sum(s, r / (2.0 * s));
        Dd { hi, lo }
    }

    pub(crate) fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::new(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }
}

/// `n^α` for a nonnegative integer `n`: exact to double-double when `2α` is a
/// small integer, otherwise rounded to double.
pub(crate) fn int_pow_dd(n: u64, alpha: f64) -> Dd {
    let twice = 2.0 * alpha;
    if twice.fract() == 0.0 && twice > 0.0 && twice < 64.0 {
        let whole = Dd::new(n as f64).powi((alpha.floor()) as u32);
        if alpha.fract() == 0.0 {
            whole
        } else {
            whole.mul(Dd::sqrt_f64(n as f64))
        }
    } else {
        Dd::new((n as f64).powf(alpha))
    }
}

/// `cos(π r / den)` for `r = 0..2den`, in double-double.
pub(crate) fn cos_pi_table_dd(den: i64) -> Vec<Dd> {
    // Taylor series for the unit step, then successive rotations
    let theta = PI_DD.div_f64(den as f64);
    let theta2 = theta.mul(theta);
    let (mut c, mut s) = (Dd::new(1.0), theta);
    let (mut tc, mut ts) = (Dd::new(1.0), theta);
    for k in 1..40u32 {
        let k = k as f64;
        tc = tc.mul(theta2).div_f64(-(2.0 * k - 1.0) * (2.0 * k));
        ts = ts.mul(theta2).div_f64(-(2.0 * k) * (2.0 * k + 1.0));
        c = c.add(tc);
        s = s.add(ts);
        if tc.hi.abs() < 1e-40 && ts.hi.abs() < 1e-40 {
            break;
        }
    }
    let count = (2 * den) as usize;
    let mut out = Vec::with_capacity(count);
    let (mut re, mut im) = (Dd::new(1.0), Dd::ZERO);
    for _ in 0..count {
        out.push(re);
        let nre = re.mul(c).add(im.mul(s).neg());
        let nim = re.mul(s).add(im.mul(c));
        re = nre;
        im = nim;
    }
    out
}
