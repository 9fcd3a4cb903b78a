//! Deterministic random generators for seeds, angles and symplectic
//! conjugators, shared by the verification suites and the CLI's oracle
//! subcommand.

use nalgebra::DMatrix;
use rand::Rng;

use crate::angle::Angle;
use crate::error::Result;
use crate::exact::SurdSum;
use crate::forms::{HyperbolicTail, IndexSeed, NormalFormCounts};

const SURD_RADICANDS: [u64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];

/// A random exact algebraic angle with turns in (0,1), kept away from the
/// excluded θ = π and from 0/2π so block realizations stay well conditioned.
pub fn random_algebraic_angle<R: Rng>(rng: &mut R) -> Angle {
    loop {
        let d = SURD_RADICANDS[rng.gen_range(0..SURD_RADICANDS.len())];
        let b = rng.gen_range(1..=4i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let c = rng.gen_range(8..=32i64);
        let x = SurdSum::sqrt(b, c, d);
        let v = x.to_f64();
        // shift into range with an integer numerator offset
        let a = ((0.5 - v) * c as f64).round() as i64 + rng.gen_range(-c / 3..=c / 3);
        let turns = x.add(&SurdSum::from_ratio(a, c));
        let t = turns.to_f64();
        if t > 0.04 && t < 0.96 && (t - 0.5).abs() > 0.04 {
            if let Ok(angle) = Angle::algebraic_turns(turns) {
                return angle;
            }
        }
    }
}

/// A random exact rational angle `p/q` (in lowest terms, `p/q ≠ 1/2`),
/// kept away from 0 and 1.
pub fn random_rational_angle<R: Rng>(rng: &mut R) -> Angle {
    loop {
        let q = rng.gen_range(5..=48u64);
        let p = rng.gen_range(1..q);
        let t = p as f64 / q as f64;
        if t < 0.04 || t > 0.96 || (t - 0.5).abs() < 0.04 {
            continue;
        }
        if let Ok(angle) = Angle::rational(p, q) {
            return angle;
        }
    }
}

/// Profile for random seed generation.
#[derive(Clone, Debug)]
pub struct SeedProfile {
    /// maximum half-dimension
    pub max_n: u32,
    /// force the characteristic shape: p₋ = 1, p₀ = p₊ = 0
    pub characteristic: bool,
    /// admit rational angles (otherwise all angles are algebraic surds)
    pub rational_angles: bool,
    /// half-width of the i(γ,1) sampling window around 0
    pub i1_spread: i64,
}

impl Default for SeedProfile {
    fn default() -> Self {
        SeedProfile {
            max_n: 5,
            characteristic: false,
            rational_angles: true,
            i1_spread: 6,
        }
    }
}

fn random_angle<R: Rng>(rng: &mut R, rational_ok: bool) -> Angle {
    if rational_ok && rng.gen_bool(0.5) {
        random_rational_angle(rng)
    } else {
        random_algebraic_angle(rng)
    }
}

/// Random normal-form counts filling half-dimension `n`.
pub fn random_counts<R: Rng>(
    rng: &mut R,
    n: u32,
    characteristic: bool,
    rational_ok: bool,
) -> NormalFormCounts {
    let mut c = NormalFormCounts {
        p_minus: 0,
        p_zero: 0,
        p_plus: 0,
        q_minus: 0,
        q_zero: 0,
        q_plus: 0,
        r: 0,
        r_star: 0,
        r_zero: 0,
        s: 0,
        hyperbolic_tail: HyperbolicTail::AllPositive,
        theta_list: vec![],
        alpha_list: vec![],
        beta_list: vec![],
    };
    let mut remaining = n;
    if characteristic {
        c.p_minus = 1;
        remaining -= 1;
    }
    while remaining > 0 {
        // slots: 0..=2 = p's (non-characteristic only), 3..=5 = q's,
        // 6 = R, 7 = N₂ nontrivial, 8 = N₂ trivial, 9 = D
        let slot = if characteristic {
            rng.gen_range(3..=9u8)
        } else {
            rng.gen_range(0..=9u8)
        };
        match slot {
            0 => c.p_minus += 1,
            1 => c.p_zero += 1,
            2 => c.p_plus += 1,
            3 => c.q_minus += 1,
            4 => c.q_zero += 1,
            5 => c.q_plus += 1,
            6 => {
                c.r += 1;
                c.theta_list.push(random_angle(rng, rational_ok));
            }
            7 | 8 if remaining >= 2 => {
                if slot == 7 {
                    c.r_star += 1;
                    c.alpha_list.push(random_angle(rng, rational_ok));
                } else {
                    c.r_zero += 1;
                    c.beta_list.push(random_angle(rng, rational_ok));
                }
                remaining -= 2;
                continue;
            }
            7 | 8 => continue,
            _ => c.s += 1,
        }
        remaining -= 1;
    }
    if c.s >= 1 && rng.gen_bool(0.3) {
        c.hyperbolic_tail = HyperbolicTail::OneNegative;
    }
    c
}

/// Random valid seed under a profile; `i1` is sampled in the admissible
/// parity class.
pub fn random_seed<R: Rng>(rng: &mut R, profile: &SeedProfile) -> Result<IndexSeed> {
    let n_min = if profile.characteristic { 2 } else { 1 };
    let n = rng.gen_range(n_min..=profile.max_n.max(n_min));
    let counts = random_counts(rng, n, profile.characteristic, profile.rational_angles);
    let mut i1 = rng.gen_range(-profile.i1_spread..=profile.i1_spread);
    if counts.s == 0 {
        let parity = i64::from(counts.odd_block_count() % 2);
        if i1.rem_euclid(2) != parity {
            i1 += 1;
        }
    }
    IndexSeed::new(n, i1, counts)
}

/// Random seed safe for the crossing oracle: N₂ angles are algebraic
/// surds (never resonant at integer iterates), R angles may be rational.
pub fn random_crossing_seed<R: Rng>(rng: &mut R, max_n: u32) -> Result<IndexSeed> {
    loop {
        let profile = SeedProfile {
            max_n,
            characteristic: rng.gen_bool(0.5),
            rational_angles: true,
            i1_spread: 4,
        };
        let mut seed = random_seed(rng, &profile)?;
        // replace N₂ angles with surds
        let c = &mut seed.counts;
        for a in c.alpha_list.iter_mut().chain(c.beta_list.iter_mut()) {
            *a = random_algebraic_angle(rng);
        }
        return Ok(seed);
    }
}

// --- random symplectic conjugators ------------------------------------------

fn shear_upper(n: usize, s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).copy_from(s);
    m
}

fn shear_lower(n: usize, s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    m.view_mut((n, 0), (n, n)).copy_from(s);
    m
}

fn gl_factor(n: usize, a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let a_inv_t = a.clone().try_inverse()?.transpose();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((n, n), (n, n)).copy_from(&a_inv_t);
    Some(m)
}

fn random_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-scale..scale);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Random symplectic matrix with condition number ≤ `cond_max`, built as a
/// product of exactly-symplectic generators (shears, GL factors, and plane
/// rotations), exact up to rounding.
pub fn random_symplectic<R: Rng>(rng: &mut R, n: usize, cond_max: f64) -> DMatrix<f64> {
    loop {
        let mut p = DMatrix::identity(2 * n, 2 * n);
        let factors = rng.gen_range(4..=8);
        for _ in 0..factors {
            let f = match rng.gen_range(0..4u8) {
                0 => shear_upper(n, &random_symmetric(rng, n, 0.4)),
                1 => shear_lower(n, &random_symmetric(rng, n, 0.4)),
                2 => {
                    let mut a = DMatrix::identity(n, n);
                    for i in 0..n {
                        for j in 0..n {
                            a[(i, j)] += rng.gen_range(-0.25..0.25);
                        }
                    }
                    match gl_factor(n, &a) {
                        Some(g) => g,
                        None => continue,
                    }
                }
                _ => {
                    // rotation in the (q_i, p_i) plane
                    let i = rng.gen_range(0..n);
                    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let mut g = DMatrix::identity(2 * n, 2 * n);
                    g[(i, i)] = phi.cos();
                    g[(i, n + i)] = -phi.sin();
                    g[(n + i, i)] = phi.sin();
                    g[(n + i, n + i)] = phi.cos();
                    g
                }
            };
            p = p * f;
        }
        let svd = p.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smax / smin <= cond_max {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{is_symplectic, symplectic_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_seeds_are_valid_and_realize() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let profile = SeedProfile::default();
        for _ in 0..100 {
            let seed = random_seed(&mut rng, &profile).unwrap();
            let m = seed.realize().unwrap();
            assert!(is_symplectic(m.matrix(), 1e-9));
        }
    }

    #[test]
    fn random_conjugators_are_symplectic_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4usize {
            for _ in 0..20 {
                let p = random_symplectic(&mut rng, n, 1e3);
                assert!(
                    symplectic_residual(&p) < 1e-10 * (1.0 + p.norm_squared()),
                    "residual {}",
                    symplectic_residual(&p)
                );
                let svd = p.clone().svd(false, false);
                let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
                let smin = svd
                    .singular_values
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                assert!(smax / smin <= 1e3);
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_rng_seed() {
        let profile = SeedProfile::default();
        let a = random_seed(&mut ChaCha8Rng::seed_from_u64(5), &profile).unwrap();
        let b = random_seed(&mut ChaCha8Rng::seed_from_u64(5), &profile).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn angles_stay_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_algebraic_angle(&mut rng);
            let t = a.turns_f64();
            assert!(t > 0.0 && t < 1.0 && (t - 0.5).abs() > 0.03);
            let r = random_rational_angle(&mut rng);
            let t = r.turns_f64();
            assert!(t > 0.0 && t < 1.0 && (t - 0.5).abs() > 0.02);
        }
    }
}
