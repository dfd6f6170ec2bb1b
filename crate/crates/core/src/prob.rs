//! Exact probabilities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Prob = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Prob {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Prob {
    Prob::zero()
}

pub fn one() -> Prob {
    Prob::one()
}

pub fn half() -> Prob {
    ratio(1, 2)
}

/// `base^exp` for a small non-negative exponent.
pub fn pow(base: &Prob, exp: u32) -> Prob {
    let mut acc = one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Parses `7`, `0.7`, `.7` or `7/10` into an exact rational.
pub fn parse_prob(text: &str) -> Option<Prob> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = parse_digits(n.trim())?;
        let d: BigInt = parse_digits(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let int_part: BigInt = if int.is_empty() {
        BigInt::zero()
    } else {
        parse_digits(int)?
    };
    if frac.is_empty() {
        return Some(BigRational::from_integer(int_part));
    }
    let frac_part: BigInt = parse_digits(frac)?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(int_part * &scale + frac_part, scale))
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Exact textual form: a terminating decimal when one exists, else `n/d`.
pub fn render_exact(p: &Prob) -> String {
    if p.is_integer() {
        return p.numer().to_string();
    }
    let mut d = p.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return render_fraction(p);
    }
    let digits = twos.max(fives);
    let scaled = p * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    debug_assert!(scaled.is_integer());
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits - s.len() + 1), s)
    } else {
        s
    };
    let (i, f) = s.split_at(s.len() - digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, i, f)
}

/// `n/d`, or just `n` for integers.
pub fn render_fraction(p: &Prob) -> String {
    if p.is_integer() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with six significant digits, trailing zeros trimmed.
pub fn render_decimal(p: &Prob) -> String {
    let x = to_f64(p);
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_prob("0.7"), Some(ratio(7, 10)));
        assert_eq!(parse_prob("0.01"), Some(ratio(1, 100)));
        assert_eq!(parse_prob("7/10"), Some(ratio(7, 10)));
        assert_eq!(parse_prob("1"), Some(one()));
        assert_eq!(parse_prob(".5"), Some(half()));
        assert_eq!(parse_prob("1/0"), None);
        assert_eq!(parse_prob("0.x"), None);
        assert_eq!(parse_prob(""), None);
    }

    #[test]
    fn exact_rendering() {
        assert_eq!(render_exact(&ratio(7, 10)), "0.7");
        assert_eq!(render_exact(&ratio(1, 100)), "0.01");
        assert_eq!(render_exact(&ratio(14, 25)), "0.56");
        assert_eq!(render_exact(&ratio(1, 3)), "1/3");
        assert_eq!(render_exact(&one()), "1");
        assert_eq!(render_exact(&ratio(3, 8)), "0.375");
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(render_decimal(&ratio(14, 25)), "0.56");
        assert_eq!(render_decimal(&ratio(1, 3)), "0.333333");
        assert_eq!(render_decimal(&zero()), "0");
        assert_eq!(render_decimal(&one()), "1");
        assert_eq!(render_decimal(&ratio(2, 3000)), "0.000666667");
    }
}
