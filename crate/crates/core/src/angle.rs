//! Rotation angles with exactness guarantees.
//!
//! An [`Angle`] stores `θ/2π` (turns) in `(0,1) \ {1/2}`, matching the
//! admissible range `θ ∈ (0,π)∪(π,2π)` of the basic normal forms. Three
//! representations are supported: exact rationals `p/q`, exact algebraic
//! values (square-root expressions), and plain floats carrying a
//! declared-irrational flag. Floor and fractional-part evaluations of
//! `m·θ/2π` are exact for the first two kinds; for floats they are guarded
//! by a precision budget and fail rather than round near a boundary.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SympathError};
use crate::exact::{parse_pi_expr, SurdSum, TurnsCursor};

#[derive(Clone, Debug, PartialEq)]
enum AngleRepr {
    Rational { p: u64, q: u64 },
    Algebraic(SurdSum),
    Float { value: f64, declared_irrational: bool },
}

/// An angle in `(0,2π) \ {π}` stored as turns `θ/2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct Angle {
    repr: AngleRepr,
    // certified outward bounds on turns, for the fast floor path
    lo: f64,
    hi: f64,
}

/// Result of resolving `m·θ/2π` against the integer lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledParts {
    pub floor: i64,
    pub is_integer: bool,
}

impl ScaledParts {
    /// `E(m·θ/2π)`: smallest integer ≥ the value.
    pub fn e_value(&self) -> i64 {
        if self.is_integer {
            self.floor
        } else {
            self.floor + 1
        }
    }

    /// `φ(m·θ/2π) = E - [·]`, either 0 or 1.
    pub fn phi(&self) -> i64 {
        i64::from(!self.is_integer)
    }
}

const HALF_EXCLUSION: f64 = 1e-12;

impl Angle {
    /// Exact rational angle `θ = 2π·p/q`, reduced to lowest terms.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(SympathError::Domain("rational angle with q = 0".into()));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if p == 0 || p >= q {
            return Err(SympathError::Domain(format!(
                "turns {p}/{q} outside (0,1)"
            )));
        }
        if 2 * p == q {
            return Err(SympathError::Domain("θ = π is excluded".into()));
        }
        let lo = p as f64 / q as f64;
        Ok(Angle {
            repr: AngleRepr::Rational { p, q },
            lo,
            hi: lo,
        })
    }

    /// Exact algebraic angle given as turns `θ/2π`.
    pub fn algebraic_turns(turns: SurdSum) -> Result<Self> {
        use std::cmp::Ordering;
        if turns.sign()? != Ordering::Greater {
            return Err(SympathError::Domain("turns must be positive".into()));
        }
        if turns.sub(&SurdSum::from_integer(1)).sign()? != Ordering::Less {
            return Err(SympathError::Domain("turns must be below 1".into()));
        }
        if turns.sub(&SurdSum::from_ratio(1, 2)).is_zero() {
            return Err(SympathError::Domain("θ = π is excluded".into()));
        }
        if turns.is_rational() {
            let r = turns.as_rational().unwrap();
            let p = r.numer().to_u64().ok_or_else(|| {
                SympathError::Domain("rational turns numerator out of range".into())
            })?;
            let q = r.denom().to_u64().ok_or_else(|| {
                SympathError::Domain("rational turns denominator out of range".into())
            })?;
            return Angle::rational(p, q);
        }
        let (lo, hi) = turns.f64_bounds();
        Ok(Angle {
            repr: AngleRepr::Algebraic(turns),
            lo,
            hi,
        })
    }

    /// Float angle given as turns, declared irrational (or at least not
    /// resolvable as exact data). All floor evaluations are guarded.
    pub fn float_turns(value: f64, declared_irrational: bool) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(SympathError::Domain(format!(
                "turns {value} outside (0,1)"
            )));
        }
        if (value - 0.5).abs() < HALF_EXCLUSION {
            return Err(SympathError::Domain("θ = π is excluded".into()));
        }
        Ok(Angle {
            repr: AngleRepr::Float {
                value,
                declared_irrational,
            },
            lo: value,
            hi: value,
        })
    }

    /// Parses an exact radians expression such as `2*pi*(sqrt(2)-1)`.
    pub fn from_radians_expr(expr: &str) -> Result<Self> {
        let e = parse_pi_expr(expr)?;
        if !e.constant.is_zero() {
            return Err(SympathError::Parse(
                "angle expression must be an exact multiple of pi".into(),
            ));
        }
        // θ = c·π  ⇒  turns = c/2
        let turns = e.pi_coeff.scale(&crate::exact::Rat::new(
            num_bigint::BigInt::from(1),
            num_bigint::BigInt::from(2),
        ));
        Angle::algebraic_turns(turns)
    }

    pub fn turns_f64(&self) -> f64 {
        match &self.repr {
            AngleRepr::Rational { p, q } => *p as f64 / *q as f64,
            AngleRepr::Algebraic(s) => s.to_f64(),
            AngleRepr::Float { value, .. } => *value,
        }
    }

    pub fn radians_f64(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.turns_f64()
    }

    /// Exact turns, when the representation is exact.
    pub fn turns_exact(&self) -> Option<SurdSum> {
        match &self.repr {
            AngleRepr::Rational { p, q } => {
                Some(SurdSum::from_ratio(*p as i64, *q as i64))
            }
            AngleRepr::Algebraic(s) => Some(s.clone()),
            AngleRepr::Float { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.repr, AngleRepr::Float { .. })
    }

    /// θ < π, i.e. turns < 1/2. Exact for exact kinds.
    pub fn is_upper_half(&self) -> bool {
        match &self.repr {
            AngleRepr::Rational { p, q } => 2 * p < *q,
            AngleRepr::Algebraic(s) => {
                matches!(
                    s.sub(&SurdSum::from_ratio(1, 2)).sign(),
                    Ok(std::cmp::Ordering::Less)
                )
            }
            AngleRepr::Float { value, .. } => *value < 0.5,
        }
    }

    /// Resolves `[m·θ/2π]` and integrality, exactly for exact kinds.
    pub fn scaled_parts(&self, m: u64) -> Result<ScaledParts> {
        match &self.repr {
            AngleRepr::Rational { p, q } => {
                let mp = (m as u128) * (*p as u128);
                let q = *q as u128;
                let floor = (mp / q) as i64;
                Ok(ScaledParts {
                    floor,
                    is_integer: mp % q == 0,
                })
            }
            AngleRepr::Algebraic(s) => {
                // Fast certified path via f64 bounds, exact fallback.
                let mf = m as f64;
                let eps = mf * 1e-14 + 1e-11;
                let a = (mf * self.lo - eps).floor();
                let b = (mf * self.hi + eps).floor();
                if a == b && a.abs() < 9.0e15 {
                    return Ok(ScaledParts {
                        floor: a as i64,
                        is_integer: false,
                    });
                }
                let fl = s.floor_scaled(m)?;
                let floor = fl.to_i64().ok_or_else(|| {
                    SympathError::Precision("scaled floor overflows i64".into())
                })?;
                Ok(ScaledParts {
                    floor,
                    is_integer: false,
                })
            }
            AngleRepr::Float { value, .. } => {
                let x = (m as f64) * value;
                let err = (m as f64) * 2.0_f64.powi(-52) * (1.0 + x.abs());
                let nearest = x.round();
                let dist = (x - nearest).abs();
                let budget = (8.0 * err).max(1e-9);
                if dist <= budget {
                    return Err(SympathError::Precision(format!(
                        "m·θ/2π = {x} within {dist:.3e} of an integer; \
                         budget {budget:.3e} cannot resolve the floor"
                    )));
                }
                Ok(ScaledParts {
                    floor: x.floor() as i64,
                    is_integer: false,
                })
            }
        }
    }

    /// Incremental floor-sequence cursor over `m = 1, 2, …`.
    pub fn cursor(&self) -> Result<TurnsCursor> {
        match &self.repr {
            AngleRepr::Rational { p, q } => Ok(TurnsCursor::new_rational(*p, *q)),
            AngleRepr::Algebraic(s) => TurnsCursor::new_surd(s),
            AngleRepr::Float { .. } => Err(SympathError::Precision(
                "float angles have no exact floor sequence; use scaled_parts per m".into(),
            )),
        }
    }
}

// --- JSON schema -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AngleJson {
    /// turns p/q, i.e. θ = 2π·p/q
    Rational { p: u64, q: u64 },
    /// exact radians expression, linear in pi
    SqrtExpr { expr: String },
    /// radians as a plain float
    Float { value: f64, irrational: bool },
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match &self.repr {
            AngleRepr::Rational { p, q } => AngleJson::Rational { p: *p, q: *q },
            AngleRepr::Algebraic(s) => AngleJson::SqrtExpr {
                expr: format!("2*pi*({s})"),
            },
            AngleRepr::Float {
                value,
                declared_irrational,
            } => AngleJson::Float {
                value: 2.0 * std::f64::consts::PI * value,
                irrational: *declared_irrational,
            },
        };
        j.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = AngleJson::deserialize(de)?;
        let angle = match j {
            AngleJson::Rational { p, q } => Angle::rational(p, q),
            AngleJson::SqrtExpr { expr } => Angle::from_radians_expr(&expr),
            AngleJson::Float { value, irrational } => {
                Angle::float_turns(value / (2.0 * std::f64::consts::PI), irrational)
            }
        };
        angle.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_angle_floor_sequence() {
        let a = Angle::rational(3, 7).unwrap();
        let s = a.scaled_parts(7).unwrap();
        assert_eq!(s.floor, 3);
        assert!(s.is_integer);
        assert_eq!(s.phi(), 0);
        assert_eq!(s.e_value(), 3);
        let s = a.scaled_parts(5).unwrap();
        assert_eq!(s.floor, 2); // 15/7
        assert_eq!(s.e_value(), 3);
    }

    #[test]
    fn rejects_pi_and_out_of_range() {
        assert!(Angle::rational(1, 2).is_err());
        assert!(Angle::rational(2, 4).is_err());
        assert!(Angle::rational(5, 5).is_err());
        assert!(Angle::rational(0, 3).is_err());
        assert!(Angle::float_turns(0.5, true).is_err());
        let half = SurdSum::from_ratio(1, 2);
        assert!(Angle::algebraic_turns(half).is_err());
    }

    #[test]
    fn algebraic_floor_matches_expected() {
        // turns = √2 - 1: m=3 → [1.2426] = 1
        let a = Angle::from_radians_expr("2*pi*(sqrt(2)-1)").unwrap();
        let s = a.scaled_parts(3).unwrap();
        assert_eq!(s.floor, 1);
        assert!(!s.is_integer);
        assert_eq!(s.e_value(), 2);
        assert_eq!(s.phi(), 1);
    }

    #[test]
    fn float_guard_refuses_boundary() {
        // 0.25 turns: m=4 lands exactly on an integer — must refuse.
        let a = Angle::float_turns(0.25, true).unwrap();
        assert!(a.scaled_parts(4).is_err());
        assert!(a.scaled_parts(3).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let angles = vec![
            Angle::rational(3, 7).unwrap(),
            Angle::from_radians_expr("2*pi*(sqrt(2)-1)").unwrap(),
            Angle::float_turns(0.123456, true).unwrap(),
        ];
        for a in angles {
            let s = serde_json::to_string(&a).unwrap();
            let b: Angle = serde_json::from_str(&s).unwrap();
            assert!((a.turns_f64() - b.turns_f64()).abs() < 1e-12, "{s}");
            assert_eq!(a.is_exact(), b.is_exact());
        }
    }

    #[test]
    fn sqrt_expr_rational_collapse() {
        // 2*pi*(3/7) should come back as the rational kind
        let a = Angle::from_radians_expr("2*pi*3/7").unwrap();
        assert_eq!(a, Angle::rational(3, 7).unwrap());
    }
}
