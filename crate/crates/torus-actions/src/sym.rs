//! Exact scalars of the form `q_0 + q_1*α_1 + ... + q_k*α_k` where the
//! `q_i` are rationals and the `α_j` are formal translation amplitudes.
//!
//! The torus maps built in [`crate::analytic`] are linear in the amplitudes,
//! so this small linear symbolic type is all the construction needs; the
//! amplitudes only ever acquire numeric values in the explicitly approximate
//! helpers.  Values are kept canonical (no trailing zero coefficients), so
//! derived equality is semantic equality.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::matrix::{bigint_to_number, number_to_bigint};

/// A rational number plus a rational linear combination of the formal
/// amplitudes `α_1, α_2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymScalar {
    constant: BigRational,
    /// `alpha[j]` is the coefficient of `α_{j+1}`; no trailing zeros.
    alpha: Vec<BigRational>,
}

impl SymScalar {
    /// Builds a scalar and trims trailing zero coefficients.
    pub fn new(constant: BigRational, mut alpha: Vec<BigRational>) -> Self {
        while alpha.last().is_some_and(Zero::is_zero) {
            alpha.pop();
        }
        SymScalar { constant, alpha }
    }

    pub fn zero() -> Self {
        SymScalar::default()
    }

    pub fn from_rational(r: BigRational) -> Self {
        SymScalar::new(r, vec![])
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        SymScalar::from_rational(BigRational::from_integer(n.into()))
    }

    /// The rational `num / den`.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        SymScalar::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// The amplitude `α_j` itself (1-based).
    pub fn alpha(j: usize) -> Self {
        Self::alpha_scaled(j, BigRational::from_integer(BigInt::from(1)))
    }

    /// `coeff * α_j` (1-based).
    pub fn alpha_scaled(j: usize, coeff: BigRational) -> Self {
        assert!(j >= 1, "amplitudes are numbered from 1");
        let mut alpha = vec![BigRational::zero(); j];
        alpha[j - 1] = coeff;
        SymScalar::new(BigRational::zero(), alpha)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.alpha.is_empty()
    }

    /// The constant term.
    pub fn constant_part(&self) -> &BigRational {
        &self.constant
    }

    /// Coefficients of `α_1, ..., α_k` (the trailing ones are implicitly 0).
    pub fn alpha_coeffs(&self) -> &[BigRational] {
        &self.alpha
    }

    /// `Some(constant)` when no amplitude occurs.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.alpha.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    /// True for an amplitude-free integer.
    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_integer())
    }

    /// True for an amplitude-free half-integer (denominator 1 or 2).
    pub fn is_half_integer(&self) -> bool {
        self.as_rational()
            .is_some_and(|r| (r * BigRational::from_integer(BigInt::from(2))).is_integer())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return SymScalar::zero();
        }
        SymScalar::new(
            &self.constant * k,
            self.alpha.iter().map(|c| c * k).collect(),
        )
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    /// Numeric value once the amplitudes are given values; `alpha` must be
    /// at least as long as the coefficient list.
    pub fn eval(&self, alpha: &[f64]) -> f64 {
        assert!(
            alpha.len() >= self.alpha.len(),
            "need {} amplitude values, got {}",
            self.alpha.len(),
            alpha.len()
        );
        let mut acc = self
            .constant
            .to_f64()
            .expect("rational coefficient fits in f64");
        for (c, a) in self.alpha.iter().zip(alpha) {
            acc += c.to_f64().expect("rational coefficient fits in f64") * a;
        }
        acc
    }
}

impl Add for &SymScalar {
    type Output = SymScalar;

    fn add(self, rhs: &SymScalar) -> SymScalar {
        let len = self.alpha.len().max(rhs.alpha.len());
        let mut alpha = Vec::with_capacity(len);
        for j in 0..len {
            let a = self.alpha.get(j).cloned().unwrap_or_else(BigRational::zero);
            let b = rhs.alpha.get(j).cloned().unwrap_or_else(BigRational::zero);
            alpha.push(a + b);
        }
        SymScalar::new(&self.constant + &rhs.constant, alpha)
    }
}

impl Sub for &SymScalar {
    type Output = SymScalar;

    fn sub(self, rhs: &SymScalar) -> SymScalar {
        self + &(-rhs)
    }
}

impl Neg for &SymScalar {
    type Output = SymScalar;

    fn neg(self) -> SymScalar {
        SymScalar {
            constant: -&self.constant,
            alpha: self.alpha.iter().map(|c| -c).collect(),
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for SymScalar {
    /// Renders e.g. `1/2 + 3/4*α1 - α2`; the zero scalar renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() {
            write_rational(f, &self.constant)?;
            first = false;
        }
        for (idx, c) in self.alpha.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if !mag.is_integer() || *mag.numer() != BigInt::from(1) {
                write_rational(f, &mag)?;
                write!(f, "*")?;
            }
            write!(f, "α{}", idx + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// --- serde ---------------------------------------------------------------

/// Wire form of a rational: `{"num": ..., "den": ...}` with exact integers.
#[derive(Serialize, Deserialize)]
struct RatWire {
    num: serde_json::Number,
    den: serde_json::Number,
}

pub(crate) fn rational_to_wire<S: Serializer>(
    r: &BigRational,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    RatWire {
        num: bigint_to_number(r.numer()),
        den: bigint_to_number(r.denom()),
    }
    .serialize(serializer)
}

pub(crate) fn rational_from_wire<'de, D: Deserializer<'de>>(
    deserializer: D,
) -> Result<BigRational, D::Error> {
    let wire = RatWire::deserialize(deserializer)?;
    let num = number_to_bigint(&wire.num).map_err(de::Error::custom)?;
    let den = number_to_bigint(&wire.den).map_err(de::Error::custom)?;
    if den.is_zero() {
        return Err(de::Error::custom("rational with zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

#[derive(Serialize, Deserialize)]
struct SymWire {
    #[serde(rename = "const", serialize_with = "rational_to_wire", deserialize_with = "rational_from_wire")]
    constant: BigRational,
    alpha: Vec<RatWire>,
}

impl Serialize for SymScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymWire {
            constant: self.constant.clone(),
            alpha: self
                .alpha
                .iter()
                .map(|c| RatWire {
                    num: bigint_to_number(c.numer()),
                    den: bigint_to_number(c.denom()),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = SymWire::deserialize(deserializer)?;
        let mut alpha = Vec::with_capacity(wire.alpha.len());
        for c in &wire.alpha {
            let num = number_to_bigint(&c.num).map_err(de::Error::custom)?;
            let den = number_to_bigint(&c.den).map_err(de::Error::custom)?;
            if den.is_zero() {
                return Err(de::Error::custom("rational with zero denominator"));
            }
            alpha.push(BigRational::new(num, den));
        }
        Ok(SymScalar::new(wire.constant, alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_keeps_canonical_form() {
        let x = &SymScalar::ratio(1, 2) + &SymScalar::alpha(2);
        let y = &x - &SymScalar::alpha(2);
        assert_eq!(y, SymScalar::ratio(1, 2));
        assert!(y.as_rational().is_some());
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn half_integer_and_integer_predicates() {
        assert!(SymScalar::ratio(3, 2).is_half_integer());
        assert!(!SymScalar::ratio(3, 2).is_integer());
        assert!(SymScalar::from_int(-4).is_integer());
        assert!(!SymScalar::ratio(1, 3).is_half_integer());
        assert!(!SymScalar::alpha(1).is_half_integer());
    }

    #[test]
    fn eval_is_linear_in_the_amplitudes() {
        // 1/2 + 2*α1 - α2 at (0.25, 3.0).
        let s = &(&SymScalar::ratio(1, 2) + &SymScalar::alpha(1).scale_int(&BigInt::from(2)))
            - &SymScalar::alpha(2);
        let v = s.eval(&[0.25, 3.0]);
        assert!((v - (0.5 + 0.5 - 3.0)).abs() < 1e-15);
    }

    #[test]
    fn display_formats_terms_readably() {
        let s = &(&SymScalar::ratio(1, 2) + &SymScalar::alpha_scaled(1, BigRational::new(3.into(), 4.into())))
            - &SymScalar::alpha(2);
        assert_eq!(s.to_string(), "1/2 + 3/4*α1 - α2");
        assert_eq!(SymScalar::zero().to_string(), "0");
        assert_eq!((-&SymScalar::alpha(1)).to_string(), "-α1");
    }

    #[test]
    fn serde_round_trip() {
        let s = &SymScalar::ratio(-7, 3) + &SymScalar::alpha_scaled(3, BigRational::new(1.into(), 2.into()));
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"num\""), "wire format uses num/den: {text}");
        let back: SymScalar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn deserialize_rejects_zero_denominator() {
        let err = serde_json::from_str::<SymScalar>(
            r#"{"const": {"num": 1, "den": 0}, "alpha": []}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("zero denominator"));
    }
}
