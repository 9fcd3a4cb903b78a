//! Exact arithmetic over the rationals extended by square roots.
//!
//! A [`SurdSum`] is `r + Σ c_d·√d` with rational `r`, rational coefficients
//! `c_d` and distinct squarefree radicands `d ≥ 2`. Distinct squarefree
//! radicals are linearly independent over Q, so the canonical form is unique:
//! a `SurdSum` with a nonempty radical part is irrational, and equality,
//! sign, floor and ceiling are all exactly decidable. Sign and floor use
//! adaptive-precision interval evaluation with `BigInt` bounds; the precision
//! budget doubles until the interval stops straddling the decision boundary.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SympathError};

pub type Rat = Ratio<BigInt>;

const PREC_START: u32 = 64;
const PREC_CAP: u32 = 1 << 14;

/// `r + Σ c_d·√d` in canonical form (squarefree `d`, nonzero `c_d`).
#[derive(Clone, PartialEq, Eq)]
pub struct SurdSum {
    rational: Rat,
    terms: BTreeMap<u64, Rat>,
}

fn rat_i64(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Splits `d = s²·f` with `f` squarefree, returning `(s, f)`.
fn square_split(d: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = d;
    let mut p = 2u64;
    while p * p <= f {
        while f % (p * p) == 0 {
            f /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, f)
}

impl SurdSum {
    pub fn zero() -> Self {
        SurdSum {
            rational: Rat::zero(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        SurdSum {
            rational: rat_i64(n, 1),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        SurdSum {
            rational: rat_i64(num, den),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_rational(r: Rat) -> Self {
        SurdSum {
            rational: r,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff·√radicand`, canonicalized (square factors pulled out).
    pub fn sqrt_term(coeff: Rat, radicand: u64) -> Self {
        if coeff.is_zero() || radicand == 0 {
            return SurdSum::zero();
        }
        let (s, f) = square_split(radicand);
        let c = coeff * Rat::from_integer(BigInt::from(s));
        if f == 1 {
            return SurdSum::from_rational(c);
        }
        let mut terms = BTreeMap::new();
        terms.insert(f, c);
        SurdSum {
            rational: Rat::zero(),
            terms,
        }
    }

    /// Convenience: `(num/den)·√radicand`.
    pub fn sqrt(num: i64, den: i64, radicand: u64) -> Self {
        Self::sqrt_term(rat_i64(num, den), radicand)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.rational.is_zero()
    }

    /// Exact: canonical form has no radical part.
    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.terms.is_empty() {
            Some(&self.rational)
        } else {
            None
        }
    }

    /// Exact integrality test.
    pub fn is_integer(&self) -> bool {
        self.terms.is_empty() && self.rational.is_integer()
    }

    pub fn neg(&self) -> Self {
        SurdSum {
            rational: -self.rational.clone(),
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (*d, -c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (d, c) in &other.terms {
            let entry = terms.entry(*d).or_insert_with(Rat::zero);
            *entry += c.clone();
            if entry.is_zero() {
                terms.remove(d);
            }
        }
        SurdSum {
            rational: self.rational.clone() + other.rational.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, by: &Rat) -> Self {
        if by.is_zero() {
            return SurdSum::zero();
        }
        SurdSum {
            rational: self.rational.clone() * by.clone(),
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (*d, c.clone() * by.clone()))
                .collect(),
        }
    }

    pub fn scale_int(&self, by: i64) -> Self {
        self.scale(&rat_i64(by, 1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = SurdSum::zero();
        // rational × other
        out = out.add(&other.scale(&self.rational));
        for (d1, c1) in &self.terms {
            // c1·√d1 × other.rational
            out = out.add(&SurdSum::sqrt_term(
                c1.clone() * other.rational.clone(),
                *d1,
            ));
            for (d2, c2) in &other.terms {
                // c1 c2 √(d1 d2)
                out = out.add(&SurdSum::sqrt_term(c1.clone() * c2.clone(), d1 * d2));
            }
        }
        out
    }

    /// Interval `[lo, hi]` containing the value, with √d resolved to
    /// `prec` fractional bits.
    fn interval(&self, prec: u32) -> (Rat, Rat) {
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (d, c) in &self.terms {
            let scaled = BigUint::from(*d) << (2 * prec);
            let s = scaled.sqrt();
            let denom = BigInt::one() << prec;
            let rlo = Rat::new(BigInt::from(s.clone()), denom.clone());
            let rhi = Rat::new(BigInt::from(s + 1u32), denom);
            if c.is_positive() {
                lo += c.clone() * rlo;
                hi += c.clone() * rhi;
            } else {
                lo += c.clone() * rhi;
                hi += c.clone() * rlo;
            }
        }
        (lo, hi)
    }

    /// Exact floor. Adaptive precision; errs only past the precision cap.
    pub fn floor(&self) -> Result<BigInt> {
        if self.terms.is_empty() {
            return Ok(self.rational.floor().to_integer());
        }
        let mut prec = PREC_START;
        while prec <= PREC_CAP {
            let (lo, hi) = self.interval(prec);
            let fl = lo.floor().to_integer();
            let fh = hi.floor().to_integer();
            if fl == fh {
                return Ok(fl);
            }
            prec *= 2;
        }
        Err(SympathError::Precision(format!(
            "floor of {self} unresolved at {PREC_CAP} bits"
        )))
    }

    pub fn ceil(&self) -> Result<BigInt> {
        Ok(-self.neg().floor()?)
    }

    /// Exact sign. A canonical nonzero value separates from 0 at finite
    /// precision, so this terminates for every representable input.
    pub fn sign(&self) -> Result<std::cmp::Ordering> {
        use std::cmp::Ordering;
        if self.terms.is_empty() {
            return Ok(self.rational.numer().cmp(&BigInt::zero()));
        }
        let mut prec = PREC_START;
        while prec <= PREC_CAP {
            let (lo, hi) = self.interval(prec);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            prec *= 2;
        }
        Err(SympathError::Precision(format!(
            "sign of {self} unresolved at {PREC_CAP} bits"
        )))
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<std::cmp::Ordering> {
        self.sub(other).sign()
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.interval(80);
        let mid = (lo + hi) / Rat::from_integer(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Certified outward-rounded `f64` bounds.
    pub fn f64_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.interval(80);
        let l = lo.to_f64().unwrap_or(f64::NEG_INFINITY);
        let h = hi.to_f64().unwrap_or(f64::INFINITY);
        let slack = 1e-13 * (1.0 + l.abs().max(h.abs()));
        (l - slack, h + slack)
    }

    /// Floor of `m·self` (exact).
    pub fn floor_scaled(&self, m: u64) -> Result<BigInt> {
        self.scale(&rat_i64(m as i64, 1)).floor()
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.rational.is_zero() || self.terms.is_empty() {
            write!(f, "{}", self.rational)?;
            first = false;
        }
        for (d, c) in &self.terms {
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
            let a = c.abs();
            if a.is_one() {
                write!(f, "sqrt({d})")?;
            } else {
                write!(f, "{a}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurdSum({self})")
    }
}

/// Incremental, exact evaluator of the floor sequence `m ↦ ⌊m·x⌋` for
/// `x ∈ (0,1)`, used by the scan loops where millions of consecutive floors
/// are needed.
///
/// Rational `x = p/q` walks `m·p mod q` in integer arithmetic. Irrational
/// algebraic `x` walks a Q96 fixed-point accumulator whose cumulative drift
/// (`≤ m·2⁻⁹⁶`) is far below the guard band; whenever the accumulator enters
/// the band around a floor boundary the state is re-anchored from the exact
/// value, so the emitted floors are exact for every step.
pub enum TurnsCursor {
    Rational {
        p: u64,
        q: u64,
        acc: u64,
        m: u64,
        floors: i64,
    },
    Fixed {
        step: u128,
        acc: u128,
        m: u64,
        floors: i64,
        exact: SurdSum,
    },
}

const MASK96: u128 = (1u128 << 96) - 1;
const GUARD: u128 = 1u128 << 48;

/// One step of a [`TurnsCursor`]: state after advancing to iterate `m`.
#[derive(Debug, Clone, Copy)]
pub struct CursorStep {
    pub m: u64,
    pub floor_total: i64,
    pub frac_is_zero: bool,
}

impl TurnsCursor {
    pub fn new_rational(p: u64, q: u64) -> Self {
        TurnsCursor::Rational {
            p,
            q,
            acc: 0,
            m: 0,
            floors: 0,
        }
    }

    pub fn new_surd(x: &SurdSum) -> Result<Self> {
        let scaled = x.scale(&Rat::from_integer(BigInt::one() << 96));
        let step_big = scaled.floor()?;
        let step = step_big
            .to_u128()
            .ok_or_else(|| SympathError::Domain("turns outside (0,1)".into()))?;
        Ok(TurnsCursor::Fixed {
            step,
            acc: 0,
            m: 0,
            floors: 0,
            exact: x.clone(),
        })
    }

    pub fn advance(&mut self) -> Result<CursorStep> {
        match self {
            TurnsCursor::Rational { p, q, acc, m, floors } => {
                *m += 1;
                *acc += *p;
                if *acc >= *q {
                    *acc -= *q;
                    *floors += 1;
                }
                Ok(CursorStep {
                    m: *m,
                    floor_total: *floors,
                    frac_is_zero: *acc == 0,
                })
            }
            TurnsCursor::Fixed {
                step,
                acc,
                m,
                floors,
                exact,
            } => {
                *m += 1;
                let sum = *acc + *step;
                if sum > MASK96 {
                    *floors += 1;
                }
                *acc = sum & MASK96;
                if *acc < GUARD || *acc > MASK96 - GUARD {
                    // Re-anchor from the exact value.
                    let true_floor = exact.floor_scaled(*m)?;
                    let fl = true_floor
                        .to_i64()
                        .ok_or_else(|| SympathError::Precision("floor overflow".into()))?;
                    let frac = exact
                        .scale(&rat_i64(*m as i64, 1))
                        .sub(&SurdSum::from_rational(Rat::from_integer(true_floor)));
                    let frac_scaled = frac
                        .scale(&Rat::from_integer(BigInt::one() << 96))
                        .floor()?;
                    *floors = fl;
                    *acc = frac_scaled.to_u128().unwrap_or(0) & MASK96;
                }
                Ok(CursorStep {
                    m: *m,
                    floor_total: *floors,
                    frac_is_zero: false,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Expression parser for exact angle input such as "2*pi*(sqrt(2)-1)".
// ---------------------------------------------------------------------------

/// Value of a parsed expression: `c + pi_coeff·π`, both exact.
#[derive(Clone, Debug)]
pub struct PiLinear {
    pub constant: SurdSum,
    pub pi_coeff: SurdSum,
}

impl PiLinear {
    fn rational(r: Rat) -> Self {
        PiLinear {
            constant: SurdSum::from_rational(r),
            pi_coeff: SurdSum::zero(),
        }
    }

    fn add(&self, o: &Self) -> Self {
        PiLinear {
            constant: self.constant.add(&o.constant),
            pi_coeff: self.pi_coeff.add(&o.pi_coeff),
        }
    }

    fn neg(&self) -> Self {
        PiLinear {
            constant: self.constant.neg(),
            pi_coeff: self.pi_coeff.neg(),
        }
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        if !self.pi_coeff.is_zero() && !o.pi_coeff.is_zero() {
            return Err(SympathError::Parse(
                "expression is quadratic in pi".into(),
            ));
        }
        Ok(PiLinear {
            constant: self.constant.mul(&o.constant),
            pi_coeff: self
                .constant
                .mul(&o.pi_coeff)
                .add(&self.pi_coeff.mul(&o.constant)),
        })
    }

    fn div(&self, o: &Self) -> Result<Self> {
        if !o.pi_coeff.is_zero() {
            return Err(SympathError::Parse("division by pi not supported".into()));
        }
        let r = o.constant.as_rational().ok_or_else(|| {
            SympathError::Parse("division only by rational values".into())
        })?;
        if r.is_zero() {
            return Err(SympathError::Parse("division by zero".into()));
        }
        let inv = r.recip();
        Ok(PiLinear {
            constant: self.constant.scale(&inv),
            pi_coeff: self.pi_coeff.scale(&inv),
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            got => Err(SympathError::Parse(format!(
                "expected '{}' at byte {}, got {:?}",
                c as char,
                self.pos,
                got.map(|g| g as char)
            ))),
        }
    }

    fn parse_expr(&mut self) -> Result<PiLinear> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<PiLinear> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(&self.parse_factor()?)?;
                }
                Some(b'/') => {
                    self.bump();
                    acc = acc.div(&self.parse_factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<PiLinear> {
        match self.peek() {
            Some(b'-') => {
                self.bump();
                Ok(self.parse_factor()?.neg())
            }
            Some(b'(') => {
                self.bump();
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_u64()?;
                Ok(PiLinear::rational(rat_i64(n as i64, 1)))
            }
            Some(b'p') | Some(b'P') => {
                self.parse_word("pi")?;
                Ok(PiLinear {
                    constant: SurdSum::zero(),
                    pi_coeff: SurdSum::from_integer(1),
                })
            }
            Some(b's') | Some(b'S') => {
                self.parse_word("sqrt")?;
                self.expect(b'(')?;
                let n = self.parse_u64()?;
                self.expect(b')')?;
                Ok(PiLinear {
                    constant: SurdSum::sqrt(1, 1, n),
                    pi_coeff: SurdSum::zero(),
                })
            }
            got => Err(SympathError::Parse(format!(
                "unexpected token {:?} at byte {}",
                got.map(|g| g as char),
                self.pos
            ))),
        }
    }

    fn parse_word(&mut self, word: &str) -> Result<()> {
        self.skip_ws();
        let end = self.pos + word.len();
        if end <= self.src.len()
            && self.src[self.pos..end].eq_ignore_ascii_case(word.as_bytes())
        {
            self.pos = end;
            Ok(())
        } else {
            Err(SympathError::Parse(format!(
                "expected '{word}' at byte {}",
                self.pos
            )))
        }
    }

    fn parse_u64(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(SympathError::Parse(format!(
                "expected integer at byte {start}"
            )));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|e| SympathError::Parse(format!("integer literal: {e}")))
    }
}

/// Parses an exact expression linear in `pi` (e.g. `2*pi*(sqrt(2)-1)`).
pub fn parse_pi_expr(src: &str) -> Result<PiLinear> {
    let mut p = Parser::new(src);
    let e = p.parse_expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(SympathError::Parse(format!(
            "trailing input at byte {}",
            p.pos
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn canonicalizes_square_factors() {
        // √8 = 2√2, √9 = 3
        let a = SurdSum::sqrt(1, 1, 8);
        let b = SurdSum::sqrt(2, 1, 2);
        assert_eq!(a, b);
        assert!(SurdSum::sqrt(1, 1, 9).is_rational());
    }

    #[test]
    fn surd_cancellation_is_exact() {
        // (√2-1) + (√3-1) + (4-√2-√3) = 2
        let x = SurdSum::sqrt(1, 1, 2).add(&SurdSum::from_integer(-1));
        let y = SurdSum::sqrt(1, 1, 3).add(&SurdSum::from_integer(-1));
        let z = SurdSum::from_integer(4)
            .sub(&SurdSum::sqrt(1, 1, 2))
            .sub(&SurdSum::sqrt(1, 1, 3));
        let s = x.add(&y).add(&z);
        assert!(s.is_rational());
        assert_eq!(s, SurdSum::from_integer(2));
    }

    #[test]
    fn floors_match_high_precision_values() {
        // 3(√2-1) = 1.2426…
        let x = SurdSum::sqrt(1, 1, 2).add(&SurdSum::from_integer(-1));
        assert_eq!(x.floor_scaled(3).unwrap(), BigInt::from(1));
        assert_eq!(x.floor_scaled(1).unwrap(), BigInt::from(0));
        // floor(-√2) = -2
        assert_eq!(
            SurdSum::sqrt(-1, 1, 2).floor().unwrap(),
            BigInt::from(-2)
        );
    }

    #[test]
    fn sign_of_tiny_differences() {
        // 8119/5741 is a continued-fraction convergent of √2 from below,
        // within ~6e-9; the exact sign test must still resolve it.
        let x = SurdSum::sqrt(1, 1, 2).sub(&SurdSum::from_ratio(8119, 5741));
        assert_eq!(x.sign().unwrap(), Ordering::Greater);
        let y = SurdSum::sqrt(1, 1, 2).sub(&SurdSum::from_ratio(19601, 13860));
        assert_eq!(y.sign().unwrap(), Ordering::Less);
    }

    #[test]
    fn multiplication_merges_radicands() {
        let x = SurdSum::sqrt(1, 1, 2).mul(&SurdSum::sqrt(1, 1, 3));
        assert_eq!(x, SurdSum::sqrt(1, 1, 6));
        let y = SurdSum::sqrt(1, 1, 2).mul(&SurdSum::sqrt(1, 1, 2));
        assert_eq!(y, SurdSum::from_integer(2));
    }

    #[test]
    fn cursor_matches_direct_floor_rational() {
        let mut c = TurnsCursor::new_rational(3, 7);
        for m in 1..=200u64 {
            let s = c.advance().unwrap();
            assert_eq!(s.floor_total as u64, 3 * m / 7);
            assert_eq!(s.frac_is_zero, (3 * m) % 7 == 0);
        }
    }

    #[test]
    fn cursor_matches_direct_floor_surd() {
        let x = SurdSum::sqrt(1, 1, 2).add(&SurdSum::from_integer(-1));
        let mut c = TurnsCursor::new_surd(&x).unwrap();
        for m in 1..=500u64 {
            let s = c.advance().unwrap();
            let direct = x.floor_scaled(m).unwrap().to_i64().unwrap();
            assert_eq!(s.floor_total, direct, "m={m}");
            assert!(!s.frac_is_zero);
        }
    }

    #[test]
    fn parses_pi_expressions() {
        let e = parse_pi_expr("2*pi*(sqrt(2)-1)").unwrap();
        assert!(e.constant.is_zero());
        let turns2 = e.pi_coeff; // θ/π
        let expect = SurdSum::sqrt(2, 1, 2).add(&SurdSum::from_integer(-2));
        assert_eq!(turns2, expect);

        let e = parse_pi_expr("pi/3").unwrap();
        assert_eq!(e.pi_coeff, SurdSum::from_ratio(1, 3));

        assert!(parse_pi_expr("pi*pi").is_err());
        assert!(parse_pi_expr("1/sqrt(2)").is_err());
    }
}
