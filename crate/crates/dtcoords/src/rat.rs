//! Exact rational scalars and their string forms.
//!
//! Coordinates are arbitrary-precision rationals throughout. JSON carries
//! them as strings ("3", "-7/2"), and user input may also use decimal or
//! scientific notation ("0.25", "1e-9"), which parses exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(numer: i64, denom: i64) -> Rat {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn half(x: &Rat) -> Rat {
    x / rat(2)
}

/// `x v 0` in the transformation formulas.
pub fn max0(x: &Rat) -> Rat {
    if x.is_negative() {
        Rat::zero()
    } else {
        x.clone()
    }
}

/// `x ^ 0` in the transformation formulas.
pub fn min0(x: &Rat) -> Rat {
    if x.is_positive() {
        Rat::zero()
    } else {
        x.clone()
    }
}

pub fn rmin(a: &Rat, b: &Rat) -> Rat {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn rmax(a: &Rat, b: &Rat) -> Rat {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Sign with the convention sgn(0) = -1.
pub fn sgn_zero_neg(x: &Rat) -> Rat {
    if x.is_positive() {
        rat(1)
    } else {
        rat(-1)
    }
}

/// Canonical string form: integer as "n", otherwise "n/d".
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses "n", "n/d", decimal ("0.25"), or scientific ("2.5e-3") exactly.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.is_empty() && int_part.trim_start_matches(['+', '-']).is_empty() {
        return None;
    }
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let e = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if e >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-e) as usize))
    })
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_integer_and_fraction() {
        assert_eq!(parse_rat("3").unwrap(), rat(3));
        assert_eq!(parse_rat("-7/2").unwrap(), ratio(-7, 2));
        assert_eq!(parse_rat(" 4 / 6 ").unwrap(), ratio(2, 3));
        assert_eq!(parse_rat("1/0"), None);
    }

    #[test]
    fn parse_decimal_is_exact() {
        assert_eq!(parse_rat("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rat("-.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rat("1e-9").unwrap(), ratio(1, 1_000_000_000));
        assert_eq!(parse_rat("2.5e3").unwrap(), rat(2500));
        assert_eq!(parse_rat("1.0E2").unwrap(), rat(100));
    }

    #[test]
    fn parse_rejects_junk() {
        assert_eq!(parse_rat(""), None);
        assert_eq!(parse_rat("."), None);
        assert_eq!(parse_rat("1.2.3"), None);
        assert_eq!(parse_rat("0x10"), None);
        assert_eq!(parse_rat("1/2/3"), None);
    }

    #[test]
    fn format_round_trips() {
        for s in ["0", "5", "-5", "3/2", "-11/7"] {
            let x = parse_rat(s).unwrap();
            assert_eq!(format_rat(&x), s);
        }
    }

    #[test]
    fn lattice_helpers() {
        assert_eq!(max0(&rat(-3)), rat(0));
        assert_eq!(max0(&rat(3)), rat(3));
        assert_eq!(min0(&rat(3)), rat(0));
        assert_eq!(min0(&rat(-3)), rat(-3));
        assert_eq!(rmin(&rat(2), &rat(5)), rat(2));
        assert_eq!(rmax(&rat(2), &rat(5)), rat(5));
        assert_eq!(sgn_zero_neg(&rat(0)), rat(-1));
        assert_eq!(sgn_zero_neg(&rat(7)), rat(1));
        assert_eq!(sgn_zero_neg(&rat(-7)), rat(-1));
    }
}
