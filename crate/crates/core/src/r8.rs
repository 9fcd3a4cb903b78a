//! Exhaustive index combinatorics in R⁸ (n = 4, forced N₁(1,1) factor).
//!
//! A characteristic monodromy in Sp(8) leaves a 6-dimensional budget
//! `r + s + 2r* + 2r₀ = 3` for the remaining blocks. This module enumerates
//! all such configurations, evaluates the specialized Viterbo index formula
//!
//! `i(yᵐ) = m(i(y)+5-r) + 2Σⱼ[mθⱼ/2π] + r - 5`,
//!
//! and replicates two facts by exhaustive scan:
//!
//! * no good iterate has Viterbo index −5 once prime characteristics with
//!   `i(y) = -5` are excluded (with the intermediate inequalities checked
//!   pointwise, every arithmetic near-solution forced to `r = 3`, and that
//!   case killed by parity);
//! * for zero-mean-index families, good iterates are pinched into
//!   `{-6, -4}`: `r = 1` is infeasible, `r ∈ {0, 2}` families produce the
//!   constant value −5 (the hypothesis-contradiction hook), and `r = 3`
//!   families have fractional-part sums exactly in `{1, 2}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Result, SympathError};
use crate::exact::SurdSum;
use crate::forms::{HyperbolicTail, IndexSeed, NormalFormCounts};
use crate::index::{iterate_index, mean_index_exact, viterbo_from_maslov};
use crate::seedgen::random_algebraic_angle;

/// Budget tuple `(r, s, r*, r₀)` with `r + s + 2r* + 2r₀ = 3`.
pub type ConfigTuple = (u32, u32, u32, u32);

/// All non-negative solutions of `r + s + 2r* + 2r₀ = 3`, each exactly
/// once, in a stable order.
pub fn enumerate_configs() -> Vec<ConfigTuple> {
    let mut out = Vec::new();
    for r_zero in 0..=1u32 {
        for r_star in 0..=1u32 {
            let rest = 3i64 - 2 * i64::from(r_star) - 2 * i64::from(r_zero);
            if rest < 0 {
                continue;
            }
            for r in 0..=rest as u32 {
                let s = rest as u32 - r;
                out.push((r, s, r_star, r_zero));
            }
        }
    }
    out.sort();
    out
}

/// One R⁸ configuration: block budget, angle tuples, and the prime
/// Viterbo index `i(y)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct R8Config {
    pub r: u32,
    pub s: u32,
    pub r_star: u32,
    pub r_zero: u32,
    pub thetas: Vec<Angle>,
    pub alphas: Vec<Angle>,
    pub betas: Vec<Angle>,
    pub i_viterbo: i64,
}

impl R8Config {
    pub fn new(
        tuple: ConfigTuple,
        thetas: Vec<Angle>,
        alphas: Vec<Angle>,
        betas: Vec<Angle>,
        i_viterbo: i64,
    ) -> Result<Self> {
        let (r, s, r_star, r_zero) = tuple;
        if r + s + 2 * r_star + 2 * r_zero != 3 {
            return Err(SympathError::InconsistentSeed(format!(
                "budget r+s+2r*+2r₀ = {} ≠ 3",
                r + s + 2 * r_star + 2 * r_zero
            )));
        }
        if thetas.len() != r as usize
            || alphas.len() != r_star as usize
            || betas.len() != r_zero as usize
        {
            return Err(SympathError::InconsistentSeed(
                "angle list lengths do not match the configuration".into(),
            ));
        }
        if s == 0 && !viterbo_parity_ok(i_viterbo, r) {
            return Err(SympathError::InconsistentSeed(format!(
                "i(y) = {i_viterbo} has the wrong parity for r = {r} with s = 0"
            )));
        }
        Ok(R8Config {
            r,
            s,
            r_star,
            r_zero,
            thetas,
            alphas,
            betas,
            i_viterbo,
        })
    }

    pub fn tuple(&self) -> ConfigTuple {
        (self.r, self.s, self.r_star, self.r_zero)
    }

    /// The full index seed: `n = 4`, `p₋ = 1`, `i(γ,1) = i(y) + 4`.
    pub fn seed(&self) -> Result<IndexSeed> {
        let counts = NormalFormCounts {
            p_minus: 1,
            p_zero: 0,
            p_plus: 0,
            q_minus: 0,
            q_zero: 0,
            q_plus: 0,
            r: self.r,
            r_star: self.r_star,
            r_zero: self.r_zero,
            s: self.s,
            hyperbolic_tail: HyperbolicTail::AllPositive,
            theta_list: self.thetas.clone(),
            alpha_list: self.alphas.clone(),
            beta_list: self.betas.clone(),
        };
        IndexSeed::new(4, self.i_viterbo + 4, counts)
    }
}

/// With `s = 0` the block parity pins `i(y) ≡ r + 1 (mod 2)`.
pub fn viterbo_parity_ok(i_viterbo: i64, r: u32) -> bool {
    i_viterbo.rem_euclid(2) == i64::from(r + 1).rem_euclid(2)
}

/// Specialized Viterbo index of the m-th iterate:
/// `i(yᵐ) = m(i(y)+5-r) + 2Σⱼ[mθⱼ/2π] + r - 5`.
pub fn r8_index(config: &R8Config, m: u64) -> Result<i64> {
    if m == 0 {
        return Err(SympathError::Domain("iterate m must be ≥ 1".into()));
    }
    let mut floor_sum = 0i64;
    for theta in &config.thetas {
        floor_sum += theta.scaled_parts(m)?.floor;
    }
    let r = i64::from(config.r);
    Ok((m as i64) * (config.i_viterbo + 5 - r) + 2 * floor_sum + r - 5)
}

/// Exact equality of the specialized formula against the generic
/// iteration formula composed with the Viterbo dictionary, for all
/// `m ≤ m_max`.
pub fn two_path_agreement(config: &R8Config, m_max: u64) -> Result<bool> {
    let seed = config.seed()?;
    for m in 1..=m_max {
        if r8_index(config, m)? != viterbo_from_maslov(iterate_index(&seed, m)?, 4) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Lemma-style scan: no good iterate of Viterbo index -5
// ---------------------------------------------------------------------------

/// Grid parameters for [`lemma31_scan`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanGrid {
    pub i_min: i64,
    pub i_max: i64,
    pub m_max: u64,
    pub angle_tuples: usize,
    pub rng_seed: u64,
    /// exclude `i(y) = -5` (the theorem hypothesis) when true
    pub enforce_hypothesis: bool,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            i_min: -15,
            i_max: 15,
            m_max: 1000,
            angle_tuples: 100,
            rng_seed: 12345,
            enforce_hypothesis: true,
        }
    }
}

/// A scanned point where a good iterate hits Viterbo index −5.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanHit {
    pub config: ConfigTuple,
    pub i_viterbo: i64,
    pub tuple_index: usize,
    pub m: u64,
    pub index: i64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScanReport {
    /// logical grid cells: configs × admissible i values × angle tuples
    pub configs_scanned: u64,
    /// evaluated (config, tuple, m) points
    pub points_checked: u64,
    /// good iterates with index −5 under the enforced hypothesis
    pub violations: Vec<ScanHit>,
    /// counterexamples found when the hypothesis is relaxed
    pub witnesses: Vec<ScanHit>,
    /// precision failures, surfaced per point
    pub precision_errors: Vec<String>,
    /// inequality `|(m-1)r - 2Σ[mθ/2π]| ≤ (m-1)r` verified instances
    pub a5_checked: u64,
    /// floor bound `0 ≤ [mθ/2π] ≤ m-1` verified instances
    pub floor_bound_checked: u64,
    /// `|i(y)+5| ≥ 2` instances over parity-eligible odd i ≠ -5
    pub a1_checked: u64,
    /// points whose arithmetic admits `|(m-1)r - 2Σ| ≥ 2m`
    pub near_solutions: u64,
    /// distinct r values over near-solutions (must be {3})
    pub near_solution_r: Vec<u32>,
    /// near-solutions excluded by the parity of r = 3 configurations
    pub parity_excluded: u64,
    /// wall time; excluded from serialized reports so identical grids
    /// produce byte-identical output
    #[serde(skip)]
    pub runtime_seconds: f64,
}

fn cell_rng(seed: u64, config_idx: usize, tuple_idx: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ (config_idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
            ^ (tuple_idx as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9),
    )
}

/// Scans every configuration × admissible `i(y)` × sampled angle tuple ×
/// iterate for good iterates of Viterbo index −5, checking the
/// intermediate inequalities pointwise.
pub fn lemma31_scan(grid: &ScanGrid) -> Result<ScanReport> {
    let start = std::time::Instant::now();
    let configs = enumerate_configs();

    let cells: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..grid.angle_tuples).map(move |t| (c, t)))
        .collect();

    let partials: Vec<Result<ScanReport>> = cells
        .par_iter()
        .map(|&(config_idx, tuple_idx)| {
            scan_cell(grid, &configs, config_idx, tuple_idx)
        })
        .collect();

    let mut report = ScanReport::default();
    for partial in partials {
        let p = partial?;
        report.configs_scanned += p.configs_scanned;
        report.points_checked += p.points_checked;
        report.violations.extend(p.violations);
        report.witnesses.extend(p.witnesses);
        report.precision_errors.extend(p.precision_errors);
        report.a5_checked += p.a5_checked;
        report.floor_bound_checked += p.floor_bound_checked;
        report.a1_checked += p.a1_checked;
        report.near_solutions += p.near_solutions;
        for r in p.near_solution_r {
            if !report.near_solution_r.contains(&r) {
                report.near_solution_r.push(r);
            }
        }
        report.parity_excluded += p.parity_excluded;
    }
    report.near_solution_r.sort();
    report.violations.sort_by_key(|v| (v.config, v.i_viterbo, v.tuple_index, v.m));
    report.witnesses.sort_by_key(|v| (v.config, v.i_viterbo, v.tuple_index, v.m));
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn admissible_i(grid: &ScanGrid, tuple: ConfigTuple) -> Vec<i64> {
    let (r, s, _, _) = tuple;
    (grid.i_min..=grid.i_max)
        .filter(|i| s >= 1 || viterbo_parity_ok(*i, r))
        .filter(|i| !(grid.enforce_hypothesis && *i == -5))
        .collect()
}

fn scan_cell(
    grid: &ScanGrid,
    configs: &[ConfigTuple],
    config_idx: usize,
    tuple_idx: usize,
) -> Result<ScanReport> {
    let tuple = configs[config_idx];
    let (r, s, _, _) = tuple;
    let mut rng = cell_rng(grid.rng_seed, config_idx, tuple_idx);
    let angles: Vec<Angle> = (0..r).map(|_| random_algebraic_angle(&mut rng)).collect();

    let i_values = admissible_i(grid, tuple);
    let mut report = ScanReport {
        configs_scanned: i_values.len() as u64,
        ..Default::default()
    };

    let mut cursors = Vec::with_capacity(angles.len());
    for a in &angles {
        cursors.push(a.cursor()?);
    }

    let r_i = i64::from(r);
    for m in 1..=grid.m_max {
        let m_i = m as i64;
        let mut floor_sum = 0i64;
        let mut ok = true;
        for cursor in cursors.iter_mut() {
            match cursor.advance() {
                Ok(step) => {
                    // the per-angle floor over one iterate: totals are
                    // cumulative, so the bound is on the running value
                    if step.floor_total < 0 || step.floor_total > m_i - 1 {
                        return Err(SympathError::InconsistentSeed(format!(
                            "floor bound violated: [mθ/2π] = {} at m = {m}",
                            step.floor_total
                        )));
                    }
                    report.floor_bound_checked += 1;
                    floor_sum += step.floor_total;
                }
                Err(e) => {
                    report.precision_errors.push(format!(
                        "config {tuple:?} tuple {tuple_idx} m {m}: {e}"
                    ));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        report.points_checked += 1;

        // (A5): |(m-1)r - 2Σ[mθ/2π]| ≤ (m-1)r, a consequence of the floor
        // bounds; checked explicitly at every point.
        let l = ((m_i - 1) * r_i - 2 * floor_sum).abs();
        if l > (m_i - 1) * r_i {
            return Err(SympathError::InconsistentSeed(format!(
                "A5 violated at config {tuple:?}, m = {m}: L = {l}"
            )));
        }
        report.a5_checked += 1;

        // arithmetic near-solutions: the chain forces r = 3 there, and
        // parity (i(y) even for r = 3, s = 0) excludes a good −5 iterate.
        if m >= 2 && l >= 2 * m_i {
            report.near_solutions += 1;
            if !report.near_solution_r.contains(&r) {
                report.near_solution_r.push(r);
            }
            if r == 3 {
                report.parity_excluded += 1;
            } else {
                return Err(SympathError::InconsistentSeed(format!(
                    "near-solution with r = {r} ≠ 3 at m = {m}"
                )));
            }
        }

        // A good iterate with i(yᵐ) = -5 requires m(i+5-r) + 2Σ + r = 0;
        // solve for i and check membership in the scanned grid.
        let numer = 2 * floor_sum + r_i;
        if numer % m_i == 0 {
            let i_candidate = r_i - 5 - numer / m_i;
            // goodness of a −5 iterate forces i(y) odd
            let good = (i_candidate - (-5i64)).rem_euclid(2) == 0;
            if good && i_candidate != -5 {
                // (A1): parity-eligible odd i ≠ -5 keeps |i+5| ≥ 2
                if (i_candidate + 5).abs() < 2 {
                    return Err(SympathError::InconsistentSeed(format!(
                        "A1 violated: odd i(y) = {i_candidate} with |i+5| < 2"
                    )));
                }
                report.a1_checked += 1;
            }
            let eligible = s >= 1 || viterbo_parity_ok(i_candidate, r);
            let in_range = i_candidate >= grid.i_min && i_candidate <= grid.i_max;
            if good && eligible && in_range {
                let hit = ScanHit {
                    config: tuple,
                    i_viterbo: i_candidate,
                    tuple_index: tuple_idx,
                    m,
                    index: -5,
                };
                if i_candidate == -5 {
                    if !grid.enforce_hypothesis {
                        report.witnesses.push(hit);
                    }
                } else {
                    report.violations.push(hit);
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Zero-mean-index families: the {-6, -4} pinching
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyExpectation {
    /// r ∈ {0, 2}: the index is identically −5 (contradiction hook)
    ConstantMinusFive,
    /// r = 3: good iterates pinched into {-6, -4}, fractional sums in {1, 2}
    PinchedEven,
}

/// A constructed zero-mean-index family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim1Family {
    pub label: String,
    pub config: R8Config,
    pub expected: FamilyExpectation,
}

fn surd_angle(terms: &[(i64, i64, u64)], constant: (i64, i64)) -> Angle {
    let mut s = SurdSum::from_ratio(constant.0, constant.1);
    for (num, den, d) in terms {
        s = s.add(&SurdSum::sqrt(*num, *den, *d));
    }
    Angle::algebraic_turns(s).expect("family angle in range")
}

/// The built-in zero-mean-index families covering every feasible r.
pub fn default_claim1_families() -> Result<Vec<Claim1Family>> {
    let mut out = Vec::new();

    // r = 0: î = 0 forces i(y) = -5 outright.
    for (label, tuple, alphas, betas) in [
        ("r0-hyperbolic", (0, 3, 0, 0), vec![], vec![]),
        (
            "r0-n2-nontrivial",
            (0, 1, 1, 0),
            vec![surd_angle(&[(1, 3, 2)], (0, 1))],
            vec![],
        ),
        (
            "r0-n2-trivial",
            (0, 1, 0, 1),
            vec![],
            vec![surd_angle(&[(1, 4, 3)], (0, 1))],
        ),
    ] {
        out.push(Claim1Family {
            label: label.into(),
            config: R8Config::new(tuple, vec![], alphas, betas, -5)?,
            expected: FamilyExpectation::ConstantMinusFive,
        });
    }

    // r = 2 with θ₁ + θ₂ = 2π: fractional parts pair up to exactly 1.
    for (label, x) in [
        ("r2-sqrt2", surd_angle(&[(1, 1, 2)], (-1, 1))), // √2-1
        ("r2-sqrt3", surd_angle(&[(-1, 1, 3)], (2, 1))), // 2-√3
    ] {
        let one_minus = {
            let t = x.turns_exact().expect("exact family angle");
            Angle::algebraic_turns(SurdSum::from_integer(1).sub(&t))?
        };
        out.push(Claim1Family {
            label: label.into(),
            config: R8Config::new((2, 1, 0, 0), vec![x, one_minus], vec![], vec![], -5)?,
            expected: FamilyExpectation::ConstantMinusFive,
        });
    }

    // r = 3, Σθ/2π = 2 (i(y) = -6) and Σθ/2π = 1 (i(y) = -4).
    let k4 = vec![
        surd_angle(&[(1, 1, 2)], (-1, 1)),            // √2-1
        surd_angle(&[(1, 1, 3)], (-1, 1)),            // √3-1
        surd_angle(&[(-1, 1, 2), (-1, 1, 3)], (4, 1)), // 4-√2-√3
    ];
    out.push(Claim1Family {
        label: "r3-sum2".into(),
        config: R8Config::new((3, 0, 0, 0), k4, vec![], vec![], -6)?,
        expected: FamilyExpectation::PinchedEven,
    });
    let k2 = vec![
        surd_angle(&[(1, 1, 2)], (-1, 1)),             // √2-1
        surd_angle(&[(-1, 1, 3)], (2, 1)),             // 2-√3
        surd_angle(&[(1, 1, 3), (-1, 1, 2)], (0, 1)),  // √3-√2
    ];
    out.push(Claim1Family {
        label: "r3-sum1".into(),
        config: R8Config::new((3, 0, 0, 0), k2, vec![], vec![], -4)?,
        expected: FamilyExpectation::PinchedEven,
    });

    Ok(out)
}

/// `r = 1` cannot satisfy î = 0: a single algebraic-irrational θ/π is
/// never an integer. Checked exactly on the supplied sample angles.
pub fn r1_infeasible(sample_angles: &[Angle]) -> Result<bool> {
    for a in sample_angles {
        let turns = a
            .turns_exact()
            .ok_or_else(|| SympathError::Precision("need exact angles".into()))?;
        // î = 0 requires θ/π = 2·turns ∈ Z
        if turns.scale_int(2).is_integer() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyResult {
    pub label: String,
    pub mean_index_exactly_zero: bool,
    pub checked_m: u64,
    /// distinct good-iterate Viterbo indices observed
    pub good_values: Vec<i64>,
    /// distinct fractional-part sums Σ{mθⱼ/2π} over good iterates (exact)
    pub frac_sums: Vec<i64>,
    pub satisfied: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim1Report {
    pub families: Vec<FamilyResult>,
    pub r1_infeasible: bool,
    /// r = 3 forces i(y) even while a good −5 iterate would force it odd
    pub r3_parity_contradiction: bool,
    #[serde(skip)]
    pub runtime_seconds: f64,
}

/// Verifies the pinching on constructed zero-mean-index families.
pub fn claim1_scan(families: &[Claim1Family], m_max: u64) -> Result<Claim1Report> {
    let start = std::time::Instant::now();
    let mut results = Vec::new();
    for family in families {
        results.push(scan_family(family, m_max)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let samples: Vec<Angle> = (0..50).map(|_| random_algebraic_angle(&mut rng)).collect();
    let r1 = r1_infeasible(&samples)?;

    // the parity contradiction: r = 3 configurations have s = 0 and even
    // i(y); a good iterate of index −5 needs i(y) odd
    let r3_parity = !viterbo_parity_ok(-5, 3);

    Ok(Claim1Report {
        families: results,
        r1_infeasible: r1,
        r3_parity_contradiction: r3_parity,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn scan_family(family: &Claim1Family, m_max: u64) -> Result<FamilyResult> {
    let config = &family.config;
    let seed = config.seed()?;
    let mut violations = Vec::new();

    // the construction constraint î = 0, checked exactly
    let mean = mean_index_exact(&seed).ok_or_else(|| {
        SympathError::Precision("family angles must be exact".into())
    })?;
    let mean_zero = mean.is_zero();
    if !mean_zero {
        return Err(SympathError::InconsistentSeed(format!(
            "family {} violates the zero-mean construction: î = {mean}",
            family.label
        )));
    }

    // exact turn sum drives the exact fractional-part sums
    let turn_sum = config
        .thetas
        .iter()
        .map(|a| a.turns_exact().expect("exact"))
        .fold(SurdSum::zero(), |acc, t| acc.add(&t));
    let turn_sum_rational = turn_sum.as_rational().cloned();

    let mut good_values = Vec::new();
    let mut frac_sums = Vec::new();
    let mut cursors = Vec::new();
    for a in &config.thetas {
        cursors.push(a.cursor()?);
    }

    for m in 1..=m_max {
        let mut floor_sum = 0i64;
        for c in cursors.iter_mut() {
            floor_sum += c.advance()?.floor_total;
        }
        let r = i64::from(config.r);
        let v = (m as i64) * (config.i_viterbo + 5 - r) + 2 * floor_sum + r - 5;
        let good = (v - config.i_viterbo).rem_euclid(2) == 0;
        if !good {
            continue;
        }
        if !good_values.contains(&v) {
            good_values.push(v);
        }
        if config.r >= 2 {
            // Σ{mθⱼ/2π} = m·Σturns - Σfloors; exact when Σturns ∈ Q
            let sum_rat = turn_sum_rational.as_ref().ok_or_else(|| {
                SympathError::Precision("turn sum must be rational for the family".into())
            })?;
            use num_traits::ToPrimitive;
            let scaled = sum_rat * num_rational::Ratio::from_integer(num_bigint::BigInt::from(m));
            if !scaled.is_integer() {
                violations.push(format!("m = {m}: m·Σturns not an integer"));
                continue;
            }
            let frac = scaled.to_integer().to_i64().unwrap() - floor_sum;
            if !frac_sums.contains(&frac) {
                frac_sums.push(frac);
            }
        }
        match family.expected {
            FamilyExpectation::ConstantMinusFive => {
                if v != -5 {
                    violations.push(format!("m = {m}: index {v} ≠ -5"));
                }
            }
            FamilyExpectation::PinchedEven => {
                if v != -6 && v != -4 {
                    violations.push(format!("m = {m}: good index {v} ∉ {{-6,-4}}"));
                }
            }
        }
    }

    good_values.sort();
    frac_sums.sort();
    if family.expected == FamilyExpectation::PinchedEven {
        for f in &frac_sums {
            if *f != 1 && *f != 2 {
                violations.push(format!("fractional-part sum {f} ∉ {{1,2}}"));
            }
        }
    }

    Ok(FamilyResult {
        label: family.label.clone(),
        mean_index_exactly_zero: mean_zero,
        checked_m: m_max,
        good_values,
        frac_sums,
        satisfied: violations.is_empty(),
        violations,
    })
}

// ---------------------------------------------------------------------------
// Mean-index dichotomy
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanDichotomy {
    DivergesUp,
    DivergesDown,
    ZeroFamily,
}

/// Classifies a configuration by the sign of its mean index, spot-checking
/// divergence of the index sequence at `m_probe`.
pub fn mean_index_dichotomy(config: &R8Config, m_probe: u64) -> Result<MeanDichotomy> {
    let seed = config.seed()?;
    let mean = mean_index_exact(&seed).ok_or_else(|| {
        SympathError::Precision("dichotomy requires exact angles".into())
    })?;
    if mean.is_zero() {
        return Ok(MeanDichotomy::ZeroFamily);
    }
    let sign = mean.sign()?;
    let at_probe = r8_index(config, m_probe)?;
    match sign {
        std::cmp::Ordering::Greater => {
            if at_probe <= 0 {
                return Err(SympathError::InconsistentSeed(format!(
                    "î > 0 but i(y^{m_probe}) = {at_probe} ≤ 0"
                )));
            }
            Ok(MeanDichotomy::DivergesUp)
        }
        std::cmp::Ordering::Less => {
            if at_probe >= 0 {
                return Err(SympathError::InconsistentSeed(format!(
                    "î < 0 but i(y^{m_probe}) = {at_probe} ≥ 0"
                )));
            }
            Ok(MeanDichotomy::DivergesDown)
        }
        std::cmp::Ordering::Equal => Ok(MeanDichotomy::ZeroFamily),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_is_eight_and_stable() {
        let configs = enumerate_configs();
        assert_eq!(configs.len(), 8);
        assert!(configs.contains(&(3, 0, 0, 0)));
        assert!(configs.contains(&(0, 1, 0, 1)));
        assert!(!configs.contains(&(0, 0, 1, 1)));
        assert_eq!(configs, enumerate_configs());
        // exactly once each
        let mut dedup = configs.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 8);
    }

    fn surd_config_k4(i_viterbo: i64) -> R8Config {
        let thetas = vec![
            surd_angle(&[(1, 1, 2)], (-1, 1)),
            surd_angle(&[(1, 1, 3)], (-1, 1)),
            surd_angle(&[(-1, 1, 2), (-1, 1, 3)], (4, 1)),
        ];
        R8Config::new((3, 0, 0, 0), thetas, vec![], vec![], i_viterbo).unwrap()
    }

    #[test]
    fn r8_index_examples() {
        // r = 0, i(y) = -5: constant -5
        let c = R8Config::new((0, 3, 0, 0), vec![], vec![], vec![], -5).unwrap();
        for m in 1..=100 {
            assert_eq!(r8_index(&c, m).unwrap(), -5);
        }

        // the surd family with i(y) = -6: m = 3 gives -4
        let c = surd_config_k4(-6);
        assert_eq!(r8_index(&c, 3).unwrap(), -4);
        assert_eq!(r8_index(&c, 2).unwrap(), -6);

        // m = 1 identity through the dictionary
        for i in [-6i64, -4, -2, 0] {
            let c = surd_config_k4(i);
            assert_eq!(r8_index(&c, 1).unwrap(), i);
        }
    }

    #[test]
    fn two_path_agreement_on_examples() {
        let c = surd_config_k4(-6);
        assert!(two_path_agreement(&c, 200).unwrap());
        let c = R8Config::new((0, 3, 0, 0), vec![], vec![], vec![], -5).unwrap();
        assert!(two_path_agreement(&c, 200).unwrap());
    }

    #[test]
    fn lemma_scan_small_grid_clean() {
        let grid = ScanGrid {
            m_max: 200,
            angle_tuples: 10,
            ..Default::default()
        };
        let report = lemma31_scan(&grid).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(report.witnesses.is_empty());
        assert!(report.near_solution_r.iter().all(|r| *r == 3));
        assert!(report.points_checked > 0);
    }

    #[test]
    fn lemma_scan_relaxed_finds_witness() {
        let grid = ScanGrid {
            m_max: 50,
            angle_tuples: 5,
            enforce_hypothesis: false,
            ..Default::default()
        };
        let report = lemma31_scan(&grid).unwrap();
        assert!(!report.witnesses.is_empty());
        assert!(report
            .witnesses
            .iter()
            .all(|w| w.i_viterbo == -5 && w.index == -5));
        // the r = 0 constant family is among them
        assert!(report.witnesses.iter().any(|w| w.config == (0, 3, 0, 0)));
    }

    #[test]
    fn claim1_families_hold() {
        let families = default_claim1_families().unwrap();
        let report = claim1_scan(&families, 2000).unwrap();
        assert!(report.r1_infeasible);
        assert!(report.r3_parity_contradiction);
        for f in &report.families {
            assert!(f.satisfied, "{}: {:?}", f.label, f.violations);
            assert!(f.mean_index_exactly_zero);
            if f.label.starts_with("r0") || f.label.starts_with("r2") {
                assert_eq!(f.good_values, vec![-5], "{}", f.label);
            } else {
                assert!(f.good_values.iter().all(|v| *v == -6 || *v == -4));
                assert!(f.frac_sums.iter().all(|s| *s == 1 || *s == 2));
            }
        }
    }

    #[test]
    fn dichotomy_examples() {
        // r = 0, i(y) = 0: î = 5 → diverges up
        let c = R8Config::new((0, 3, 0, 0), vec![], vec![], vec![], 0).unwrap();
        assert_eq!(
            mean_index_dichotomy(&c, 10_000).unwrap(),
            MeanDichotomy::DivergesUp
        );
        // r = 0, i(y) = -5: zero family
        let c = R8Config::new((0, 3, 0, 0), vec![], vec![], vec![], -5).unwrap();
        assert_eq!(
            mean_index_dichotomy(&c, 10_000).unwrap(),
            MeanDichotomy::ZeroFamily
        );
        // surd family with i(y) = -8: î = -2 → diverges down
        let c = surd_config_k4(-8);
        assert_eq!(
            mean_index_dichotomy(&c, 10_000).unwrap(),
            MeanDichotomy::DivergesDown
        );
    }

    #[test]
    fn config_validation() {
        assert!(R8Config::new((1, 1, 1, 0), vec![], vec![], vec![], 0).is_err()); // budget 4
        // parity: r = 3, s = 0 needs even i(y)
        let thetas = vec![
            surd_angle(&[(1, 1, 2)], (-1, 1)),
            surd_angle(&[(1, 1, 3)], (-1, 1)),
            surd_angle(&[(-1, 1, 2), (-1, 1, 3)], (4, 1)),
        ];
        assert!(R8Config::new((3, 0, 0, 0), thetas, vec![], vec![], -5).is_err());
    }
}
