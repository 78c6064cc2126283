//! Exact rational helpers: parsing, float enclosures, and serde adapters that
//! store rationals as `"p/q"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `-3`, `3/4`, `1.25`, `2.5e-3` exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = |msg: &str| Error::Parse {
        offset: 0,
        msg: format!("{msg}: {t:?}"),
    };
    if t.is_empty() {
        return Err(bad("empty number"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (
            &t[..i],
            t[i + 1..].parse::<i32>().map_err(|_| bad("bad exponent"))?,
        ),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad("no digits"));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("not a number"));
    }
    let digits: BigInt = format!("{ip}{fp}0").parse().map_err(|_| bad("bad digits"))?;
    let scale = exp - fp.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut v = Q::from_integer(digits);
    if scale >= 0 {
        v *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

/// Nearest f64 (correctly rounded by num-rational); infinities on overflow.
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// An f64 interval guaranteed to contain `x`.
pub fn enclose(x: &Q) -> (f64, f64) {
    if x.is_integer() {
        if let Some(v) = x.numer().to_i64() {
            if v.unsigned_abs() < (1u64 << 53) {
                let f = v as f64;
                return (f, f);
            }
        }
    }
    let f = to_f64(x);
    (f.next_down(), f.next_up())
}

/// Exact rational value of a finite float.
pub fn from_f64(f: f64) -> Q {
    Q::from_float(f).expect("finite float")
}

/// Smallest power of two `2^e` with `2^e >= x` (x > 0).
pub fn pow2_at_least(x: &Q) -> Q {
    assert!(x.is_positive());
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut p = pow2(e);
    while &p < x {
        e += 1;
        p = pow2(e);
    }
    while e > i64::MIN / 2 && &pow2(e - 1) >= x {
        e -= 1;
        p = pow2(e);
    }
    p
}

pub fn pow2(e: i64) -> Q {
    let one = BigInt::one();
    if e >= 0 {
        Q::from_integer(one << e as usize)
    } else {
        Q::new(one.clone(), one << (-e) as usize)
    }
}

/// Rounds `f` to a dyadic rational with `bits` bits after the binary point.
pub fn dyadic_round(f: f64, bits: i32) -> Q {
    let scaled = (f * 2f64.powi(bits)).round();
    from_f64(scaled) / pow2(bits as i64)
}

pub fn fmt_point(x: &[Q]) -> String {
    let parts: Vec<String> = x.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub mod ser {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod ser_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(x.len()))?;
        for v in x {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod ser_mat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = x
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}
