//! Thin arithmetic wrapper over `astro_float::BigFloat` that carries its own
//! working precision, so solver code reads like ordinary arithmetic.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl Real {
    pub fn from_f64(x: f64, p: usize) -> Self {
        Real { v: BigFloat::from_f64(x, p), p }
    }

    pub fn from_u64(n: u64, p: usize) -> Self {
        Real { v: BigFloat::from_u64(n, p), p }
    }

    pub fn zero(p: usize) -> Self {
        Self::from_u64(0, p)
    }

    pub fn one(p: usize) -> Self {
        Self::from_u64(1, p)
    }

    /// `2^e`.
    pub fn pow2(e: i32, p: usize) -> Self {
        let mut v = BigFloat::from_u64(1, p);
        // 1 = 0.1b × 2^1
        v.set_exponent(e + 1);
        Real { v, p }
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn half(&self) -> Self {
        match self.v.exponent() {
            Some(e) if !self.v.is_zero() => {
                let mut v = self.v.clone();
                v.set_exponent(e - 1);
                Real { v, p: self.p }
            }
            _ => self.clone(),
        }
    }

    pub fn powi(&self, n: usize) -> Self {
        Real { v: self.v.powi(n, self.p, RM), p: self.p }
    }

    pub fn sqrt(&self) -> Self {
        Real { v: self.v.sqrt(self.p, RM), p: self.p }
    }

    pub fn abs(&self) -> Self {
        Real { v: self.v.abs(), p: self.p }
    }

    /// Binary exponent `e` with `2^(e-1) ≤ |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        if self.v.is_zero() || !self.is_finite() {
            None
        } else {
            self.v.exponent()
        }
    }

    /// Leading mantissa bits as a float in `[0.5, 1)`.
    fn leading_fraction(&self) -> f64 {
        let words = self.v.mantissa_digits().unwrap_or(&[]);
        let n = words.len();
        let hi = words.last().copied().unwrap_or(0) as f64;
        let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        (hi + lo / 18446744073709551616.0) / 18446744073709551616.0
    }

    /// Nearest `f64`; underflows to zero and overflows to infinity.
    pub fn to_f64(&self) -> f64 {
        let Some(e) = self.exponent() else {
            return if self.is_finite() { 0.0 } else { f64::NAN };
        };
        let sign = if self.v.is_negative() { -1.0 } else { 1.0 };
        if e < -1100 {
            return 0.0 * sign;
        }
        if e > 1100 {
            return f64::INFINITY * sign;
        }
        let h = e / 2;
        sign * self.leading_fraction() * 2f64.powi(h) * 2f64.powi(e - h)
    }

    /// `log2 |x|` as an `f64`, usable far outside the `f64` exponent range.
    pub fn log2_abs(&self) -> f64 {
        match self.exponent() {
            Some(e) => e as f64 + self.leading_fraction().log2(),
            None => f64::NEG_INFINITY,
        }
    }

    /// Shortest faithful decimal rendering: plain notation for moderate
    /// magnitudes, scientific otherwise.
    pub fn to_decimal_string(&self) -> String {
        if self.v.is_zero() {
            return "0".into();
        }
        let mut cc = Consts::new().expect("constant cache");
        let raw = self.v.format(Radix::Dec, RM, &mut cc).unwrap_or_else(|_| "NaN".into());
        let Some((mant, exp)) = raw.split_once('e') else {
            return raw;
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mant),
        };
        let mut exp: i64 = exp.parse().unwrap_or(0);
        let mut digits: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
        // Mantissa of p bits carries about p·log10(2) significant digits.
        let keep = ((self.p as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize;
        if digits.len() > keep {
            let round_up = digits[keep] >= 5;
            digits.truncate(keep);
            if round_up {
                let mut i = keep;
                loop {
                    if i == 0 {
                        digits.insert(0, 1);
                        digits.truncate(keep);
                        exp += 1;
                        break;
                    }
                    i -= 1;
                    if digits[i] == 9 {
                        digits[i] = 0;
                    } else {
                        digits[i] += 1;
                        break;
                    }
                }
            }
        }
        while digits.len() > 1 && digits.last() == Some(&0) {
            digits.pop();
        }
        let body: String = digits.iter().map(|d| (b'0' + d) as char).collect();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if (-7..21).contains(&exp) {
            if exp < 0 {
                out.push_str("0.");
                out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
                out.push_str(&body);
            } else {
                let int_len = exp as usize + 1;
                if body.len() <= int_len {
                    out.push_str(&body);
                    out.extend(std::iter::repeat_n('0', int_len - body.len()));
                } else {
                    out.push_str(&body[..int_len]);
                    out.push('.');
                    out.push_str(&body[int_len..]);
                }
            }
        } else {
            out.push_str(&body[..1]);
            if body.len() > 1 {
                out.push('.');
                out.push_str(&body[1..]);
            }
            out.push_str(&format!("e{exp}"));
        }
        out
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.p.max(rhs.p);
                Real { v: self.v.$method(&rhs.v, p, RM), p }
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}
