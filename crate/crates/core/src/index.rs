//! Exact evaluation of the index iteration formulas.
//!
//! Given an [`IndexSeed`] (half-dimension `n`, base index `i(γ,1)` and the
//! normal-form invariants), this module computes the Maslov-type index
//! `i(γ,m)` and nullity `ν(γ,m)` of every iterate, the mean index, parity
//! and good-iterate classification, the Viterbo dictionary `i(yᵐ) = i(γ,m) - n`,
//! and the grading offset `d(K)`.
//!
//! All floor/ceiling evaluations go through [`Angle::scaled_parts`], so the
//! results are exact for rational and algebraic angles and guarded (never
//! silently rounded) for float angles.

use serde::{Deserialize, Serialize};


use crate::error::{Result, SympathError};
use crate::exact::SurdSum;
use crate::forms::IndexSeed;

/// Input to [`int_parts`]: a real number in one of the supported
/// representations.
#[derive(Clone, Debug)]
pub enum ExactReal {
    Integer(i64),
    Rational(i64, i64),
    Surd(SurdSum),
    Float(f64),
}

/// `([a], {a}, E(a), φ(a))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntParts {
    pub floor: i64,
    pub frac: f64,
    pub ceil: i64,
    pub phi: i64,
}

/// The four integer-part functions evaluated together:
/// `[a] = max{k ≤ a}`, `{a} = a - [a]`, `E(a) = min{k ≥ a}`,
/// `φ(a) = E(a) - [a]`.
pub fn int_parts(a: &ExactReal) -> Result<IntParts> {
    let (floor, is_int, frac) = match a {
        ExactReal::Integer(v) => (*v, true, 0.0),
        ExactReal::Rational(num, den) => {
            if *den == 0 {
                return Err(SympathError::Domain("zero denominator".into()));
            }
            let (num, den) = if *den < 0 { (-*num, -*den) } else { (*num, *den) };
            let fl = num.div_euclid(den);
            let is_int = num.rem_euclid(den) == 0;
            (fl, is_int, num as f64 / den as f64 - fl as f64)
        }
        ExactReal::Surd(s) => {
            use num_traits::ToPrimitive;
            let fl = s
                .floor()?
                .to_i64()
                .ok_or_else(|| SympathError::Precision("floor overflows i64".into()))?;
            let is_int = s.is_integer();
            (fl, is_int, s.to_f64() - fl as f64)
        }
        ExactReal::Float(x) => {
            let nearest = x.round();
            let dist = (x - nearest).abs();
            if dist <= 1e-9 && *x != nearest {
                return Err(SympathError::Precision(format!(
                    "float {x} is within {dist:.2e} of an integer; cannot resolve [a]"
                )));
            }
            let is_int = *x == nearest;
            (x.floor() as i64, is_int, x - x.floor())
        }
    };
    let ceil = if is_int { floor } else { floor + 1 };
    Ok(IntParts {
        floor,
        frac,
        ceil,
        phi: ceil - floor,
    })
}

fn even_factor(m: u64) -> i64 {
    // (1 + (-1)^m) / 2
    i64::from(m % 2 == 0)
}

/// Maslov-type index of the m-th iterate:
///
/// `i(γ,m) = m(i(γ,1)+p₋+p₀-r) + 2Σⱼ E(mθⱼ/2π) - r - p₋ - p₀
///           - ((1+(-1)ᵐ)/2)(q₀+q₊) + 2(Σⱼ φ(mαⱼ/2π) - r*)`.
pub fn iterate_index(seed: &IndexSeed, m: u64) -> Result<i64> {
    if m == 0 {
        return Err(SympathError::Domain("iterate m must be ≥ 1".into()));
    }
    let c = &seed.counts;
    let mut sum_e = 0i64;
    for theta in &c.theta_list {
        sum_e += theta.scaled_parts(m)?.e_value();
    }
    let mut sum_phi = 0i64;
    for alpha in &c.alpha_list {
        sum_phi += alpha.scaled_parts(m)?.phi();
    }
    let (p_minus, p_zero, r, r_star) = (
        i64::from(c.p_minus),
        i64::from(c.p_zero),
        i64::from(c.r),
        i64::from(c.r_star),
    );
    Ok((m as i64) * (seed.i1 + p_minus + p_zero - r) + 2 * sum_e
        - r
        - p_minus
        - p_zero
        - even_factor(m) * i64::from(c.q_zero + c.q_plus)
        + 2 * (sum_phi - r_star))
}

/// Nullity of the m-th iterate:
///
/// `ν(γ,m) = ν(γ,1) + ((1+(-1)ᵐ)/2)(q₋+2q₀+q₊) + 2(r+r*+r₀)
///           - 2(Σ φ(mθⱼ/2π) + Σ φ(mαⱼ/2π) + Σ φ(mβⱼ/2π))`.
pub fn iterate_nullity(seed: &IndexSeed, m: u64) -> Result<i64> {
    if m == 0 {
        return Err(SympathError::Domain("iterate m must be ≥ 1".into()));
    }
    let c = &seed.counts;
    let mut sum_phi = 0i64;
    for angle in c
        .theta_list
        .iter()
        .chain(c.alpha_list.iter())
        .chain(c.beta_list.iter())
    {
        sum_phi += angle.scaled_parts(m)?.phi();
    }
    Ok(i64::from(seed.nu_one())
        + even_factor(m) * i64::from(c.q_minus + 2 * c.q_zero + c.q_plus)
        + 2 * i64::from(c.r + c.r_star + c.r_zero)
        - 2 * sum_phi)
}

/// Mean index `î(γ,1) = i(γ,1) + p₋ + p₀ - r + Σⱼ θⱼ/π` as a float.
pub fn mean_index(seed: &IndexSeed) -> f64 {
    let c = &seed.counts;
    let base =
        (seed.i1 + i64::from(c.p_minus) + i64::from(c.p_zero) - i64::from(c.r)) as f64;
    base + c.theta_list.iter().map(|t| 2.0 * t.turns_f64()).sum::<f64>()
}

/// Exact mean index when every `R(θ)` angle is exact.
pub fn mean_index_exact(seed: &IndexSeed) -> Option<SurdSum> {
    let c = &seed.counts;
    let mut acc = SurdSum::from_integer(
        seed.i1 + i64::from(c.p_minus) + i64::from(c.p_zero) - i64::from(c.r),
    );
    for t in &c.theta_list {
        acc = acc.add(&t.turns_exact()?.scale_int(2));
    }
    Some(acc)
}

/// Viterbo index from the Maslov-type index: `i(yᵐ) = i(y,m) - n`.
pub fn viterbo_from_maslov(i_maslov: i64, n: u32) -> i64 {
    i_maslov - i64::from(n)
}

/// Inverse dictionary: `i(y,m) = i(yᵐ) + n`.
pub fn maslov_from_viterbo(i_viterbo: i64, n: u32) -> i64 {
    i_viterbo + i64::from(n)
}

/// Parity class of `i(γ,1)` forced by the block multiset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    Even,
    Odd,
    Unconstrained,
}

/// Block-wise parity of the base index: odd contributions from N₁(1,1),
/// I₂, N₁(-1,±1), -I₂ and R(θ); even from N₁(1,-1) and N₂. A nonempty
/// hyperbolic tail makes the parity unconstrained.
pub fn block_parity(seed: &IndexSeed) -> ParityClass {
    if seed.counts.s >= 1 {
        return ParityClass::Unconstrained;
    }
    if seed.counts.odd_block_count() % 2 == 1 {
        ParityClass::Odd
    } else {
        ParityClass::Even
    }
}

/// An iterate is good when `i(γ,m) ≡ i(γ,1) (mod 2)`.
pub fn is_good_iterate(seed: &IndexSeed, m: u64) -> Result<bool> {
    let im = iterate_index(seed, m)?;
    Ok((im - seed.i1).rem_euclid(2) == 0)
}

/// Grading offset `d(K) = 2n([KT/2π] + 1)`, defined for `KT ∉ 2πZ`.
pub fn grading_offset(k: f64, t: f64, n: u32) -> Result<i64> {
    let x = k * t / (2.0 * std::f64::consts::PI);
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        return Err(SympathError::Domain(format!(
            "KT/2π = {x} lies on the excluded lattice 2πZ"
        )));
    }
    Ok(2 * i64::from(n) * (x.floor() as i64 + 1))
}

/// One row of an iteration table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub m: u64,
    pub i_maslov: i64,
    pub nullity: i64,
    pub i_viterbo: i64,
    pub good: bool,
}

/// Evaluates iterates `1..=m_max`.
pub fn iteration_table(seed: &IndexSeed, m_max: u64) -> Result<Vec<IterationResult>> {
    let mut rows = Vec::with_capacity(m_max as usize);
    let characteristic = seed.counts.p_minus >= 1;
    for m in 1..=m_max {
        let i_maslov = iterate_index(seed, m)?;
        let nullity = iterate_nullity(seed, m)?;
        if characteristic && !(1..=2 * i64::from(seed.n) - 1).contains(&nullity) {
            return Err(SympathError::InconsistentSeed(format!(
                "nullity {nullity} escapes [1, 2n-1] at m = {m}"
            )));
        }
        rows.push(IterationResult {
            m,
            i_maslov,
            nullity,
            i_viterbo: viterbo_from_maslov(i_maslov, seed.n),
            good: (i_maslov - seed.i1).rem_euclid(2) == 0,
        });
    }
    Ok(rows)
}

/// A prime closed characteristic: period, seed and derived mean index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacteristicRecord {
    pub label: String,
    pub tau: f64,
    pub seed: IndexSeed,
    pub mean_index: f64,
}

impl CharacteristicRecord {
    pub fn new(label: impl Into<String>, tau: f64, seed: IndexSeed) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(SympathError::Domain(format!("period τ = {tau} must be > 0")));
        }
        let mean_index = mean_index(&seed);
        Ok(CharacteristicRecord {
            label: label.into(),
            tau,
            seed,
            mean_index,
        })
    }
}
