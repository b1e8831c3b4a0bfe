//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving about 106 bits of significand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Relative rounding error of one double-double operation (a safe overestimate).
pub const UNIT: f64 = 4.0 * f64::EPSILON * f64::EPSILON;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Dd::new(hi, self.lo.floor())
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    /// Nearest integer, ties away from zero.
    pub fn round(self) -> Self {
        (self + Dd::from(0.5)).floor()
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = Dd::from(self.hi.sqrt());
        x + (self - x * x) / (Dd::from(2.0) * x)
    }

    pub fn powi(self, n: u32) -> Self {
        let mut result = Dd::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl From<u32> for Dd {
    fn from(x: u32) -> Self {
        Dd { hi: x as f64, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from(q2);
        let q3 = r.hi / o.hi;
        Dd::new(q1, q2) + Dd::from(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&o.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for Dd {
    /// Up to 30 significant decimal digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi == 0.0 {
            return write!(f, "0");
        }
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut exp = x.hi.log10().floor() as i32;
        let ten = Dd::from(10.0);
        let scale = ten.powi(exp.unsigned_abs());
        x = if exp >= 0 { x / scale } else { x * scale };
        if x.hi >= 10.0 {
            x = x / ten;
            exp += 1;
        } else if x.hi < 1.0 {
            x = x * ten;
            exp -= 1;
        }
        let mut digits = Vec::with_capacity(31);
        for _ in 0..31 {
            let d = x.floor().hi.clamp(0.0, 9.0);
            digits.push(d as u8);
            x = (x - Dd::from(d)) * ten;
        }
        if digits[30] >= 5 {
            let mut i = 29;
            loop {
                if digits[i] < 9 {
                    digits[i] += 1;
                    break;
                }
                digits[i] = 0;
                if i == 0 {
                    digits.insert(0, 1);
                    exp += 1;
                    break;
                }
                i -= 1;
            }
        }
        digits.truncate(30);
        while digits.len() > 1 && *digits.last().expect("nonempty") == 0 {
            digits.pop();
        }
        let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        let sign = if neg { "-" } else { "" };
        if (0..30).contains(&exp) {
            let point = exp as usize + 1;
            if text.len() <= point {
                write!(f, "{sign}{text}{}", "0".repeat(point - text.len()))
            } else {
                write!(f, "{sign}{}.{}", &text[..point], &text[point..])
            }
        } else {
            write!(f, "{sign}{}.{}e{exp}", &text[..1], &text[1..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golden_ratio_identity() {
        let phi = (Dd::ONE + Dd::from(5.0).sqrt()) / Dd::from(2.0);
        let r = phi * phi - phi - Dd::ONE;
        assert!(r.abs().to_f64() < 1e-30, "{r:?}");
        assert_eq!(phi.to_string(), "1.61803398874989484820458683437");
    }

    #[test]
    fn one_third_has_extra_precision() {
        let t = Dd::ONE / Dd::from(3.0);
        let back = t * Dd::from(3.0) - Dd::ONE;
        assert!(back.abs().to_f64() < 1e-31);
        assert!(t.lo() != 0.0);
    }

    #[test]
    fn floor_handles_low_part() {
        assert_eq!(Dd::new(2.0, -1e-20).floor().to_f64(), 1.0);
        assert_eq!(Dd::new(2.0, 1e-20).floor().to_f64(), 2.0);
        assert_eq!(Dd::from(-0.5).floor().to_f64(), -1.0);
    }

    proptest! {
        #[test]
        fn add_sub_roundtrip(a in -1e6f64..1e6, b in -1e6f64..1e6, c in -1e-10f64..1e-10) {
            let x = Dd::new(a, c * a.abs().max(1.0) * 1e-7);
            let y = Dd::from(b);
            let z = (x + y) - y;
            prop_assert!((z - x).abs().to_f64() <= 1e-28 * (a.abs() + b.abs() + 1.0));
        }

        #[test]
        fn div_mul_roundtrip(a in 0.1f64..1e3, b in 0.1f64..1e3) {
            let q = Dd::from(a) / Dd::from(b);
            let back = q * Dd::from(b);
            prop_assert!((back - Dd::from(a)).abs().to_f64() <= 1e-29 * a);
        }
    }
}
