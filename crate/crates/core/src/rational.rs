//! Exact rational helpers shared by every module.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational number used for actions and exponents.
pub type Q = Ratio<i128>;

/// Default snapping grid for floating-point inputs: 2^-40.
pub const GRID_BITS: u32 = 40;

/// Rounds a float to the nearest multiple of 2^-bits.
pub fn snap(x: f64, bits: u32) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let scale = (1i128 << bits) as f64;
    let n = (x * scale).round();
    if n.abs() > 1e36 {
        return None;
    }
    Some(Q::new(n as i128, 1i128 << bits))
}

/// Snaps to the default grid. Panics on non-finite input.
pub fn snap_default(x: f64) -> Q {
    snap(x, GRID_BITS).expect("finite value")
}

pub fn to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// Greatest common divisor of two positive rationals.
pub fn gcd(a: &Q, b: &Q) -> Q {
    let n = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Q::new(n, a.denom() * b.denom())
}

/// Parses `7`, `-3/4` or a plain decimal such as `0.125` or `-1e-3` exactly.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let mut n: i128 = if all.is_empty() { 0 } else { all.parse().ok()? };
    if neg {
        n = -n;
    }
    let shift = exp - frac_part.len() as i32;
    if shift.unsigned_abs() > 36 {
        return None;
    }
    let p = 10i128.pow(shift.unsigned_abs());
    Some(if shift >= 0 { Q::from_integer(n.checked_mul(p)?) } else { Q::new(n, p) })
}

/// Writes `n` or `n/d`; the inverse of [`parse`].
pub fn format(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Reduces `a` into `[0, g)`.
pub fn rem_period(a: &Q, g: &Q) -> Q {
    let r = a - g * (a / g).floor();
    if r.is_negative() {
        r + g
    } else {
        r
    }
}

/// Returns whether `x` is an integer multiple of `g` (always true for `x = 0`).
pub fn is_multiple(x: &Q, g: &Q) -> bool {
    if g.is_zero() {
        x.is_zero()
    } else {
        (x / g).is_integer()
    }
}

/// Best rational approximation with denominator at most `max_den`, by continued fractions.
pub fn approximate(x: f64, max_den: i128) -> Option<(i128, i128)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e30 {
            break;
        }
        let a = a as i128;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        None
    } else {
        Some((h1, k1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/4"), Some(Q::new(3, 4)));
        assert_eq!(parse("-0.125"), Some(Q::new(-1, 8)));
        assert_eq!(parse("2"), Some(Q::from_integer(2)));
        assert_eq!(parse("1.5e2"), Some(Q::from_integer(150)));
        assert_eq!(parse("1e-3"), Some(Q::new(1, 1000)));
        assert_eq!(parse(".5"), Some(Q::new(1, 2)));
        assert_eq!(parse("abc"), None);
        assert_eq!(parse("1/0"), None);
    }

    #[test]
    fn format_round_trip() {
        for q in [Q::new(-7, 3), Q::from_integer(0), Q::new(5, 1 << 40)] {
            assert_eq!(parse(&format(&q)), Some(q));
        }
    }

    #[test]
    fn rational_gcd() {
        assert_eq!(gcd(&Q::new(1, 2), &Q::new(3, 4)), Q::new(1, 4));
        assert_eq!(gcd(&Q::from_integer(6), &Q::from_integer(4)), Q::from_integer(2));
    }

    #[test]
    fn reduce_mod_period() {
        let g = Q::from_integer(1);
        assert_eq!(rem_period(&Q::new(-1, 5), &g), Q::new(4, 5));
        assert_eq!(rem_period(&Q::new(12, 5), &g), Q::new(2, 5));
    }

    #[test]
    fn continued_fraction() {
        assert_eq!(approximate(0.75, 1000), Some((3, 4)));
        let (h, k) = approximate(1.618033988749895, 10_000).unwrap();
        assert!(k > 1000, "{h}/{k}");
    }

    #[test]
    fn snapping_is_exact_on_dyadics() {
        assert_eq!(snap_default(0.375), Q::new(3, 8));
    }
}
