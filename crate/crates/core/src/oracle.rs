//! Independent verification engines.
//!
//! Two oracles check the iteration formulas without using them:
//!
//! * [`NullityOracle`] computes `dim ker(Mᵐ - I)` from the matrix itself.
//!   It evaluates the kernel as `Σ_{ωᵐ=1} dim_C ker(M - ωI)` — the same
//!   quantity, but numerically stable for hyperbolic blocks whose powers
//!   overflow the useful range of a direct `Mᵐ - I` factorization. The
//!   direct power route is kept as [`direct_power_nullity`] and
//!   cross-checked on bounded-norm inputs.
//!
//! * [`CrossingOracle`] counts eigenvalue-1 crossings of a generated path
//!   `γ` with quadratic-form weights. Every block of a seed gets a smooth
//!   one-period generator ending at its normal-form matrix; windings (full
//!   turns multiplied into one block) tune the base index to `i(γ,1)`. The
//!   count is: half the signature of the start form at `t = 0`, the full
//!   signature at interior crossings, zero at defective-pair passages
//!   (isotropic kernel, vanishing form), and minus the negative index of
//!   the endpoint form at `t = m`. A single calibration constant, fixed on
//!   one reference seed, is added to every result thereafter.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SympathError};
use crate::forms::{
    canonical_n2_b, diamond_fold, rotation2, standard_j, HyperbolicTail, IndexSeed,
    SymplecticMatrix,
};
use crate::index::iterate_index;

/// Relative SVD rank tolerance for kernel dimensions.
pub const RANK_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Nullity oracle
// ---------------------------------------------------------------------------

/// Nullity value plus an optional borderline-precision warning.
#[derive(Clone, Debug)]
pub struct OracleNullity {
    pub value: i64,
    pub warning: Option<String>,
}

/// Kernel-dimension oracle for the iterates of one matrix.
pub struct NullityOracle {
    mat: DMatrix<f64>,
    eigs: Vec<Complex64>,
    cache: HashMap<(u64, u64), (usize, Option<String>)>,
}

impl NullityOracle {
    pub fn new(m: &SymplecticMatrix) -> Self {
        let mat = m.matrix().clone();
        let eigs = mat.complex_eigenvalues().iter().copied().collect();
        NullityOracle {
            mat,
            eigs,
            cache: HashMap::new(),
        }
    }

    /// `dim_C ker(M^power - I)`.
    pub fn nullity(&mut self, power: u64) -> Result<OracleNullity> {
        if power == 0 {
            return Err(SympathError::Domain("power must be ≥ 1".into()));
        }
        let mut total = 0usize;
        let mut warning = None;
        for k in 0..power {
            let g = num_integer::gcd(k, power);
            let key = (k / g, power / g);
            if !self.cache.contains_key(&key) {
                let entry = self.kernel_at_root(key.0, key.1);
                self.cache.insert(key, entry);
            }
            let (dim, warn) = &self.cache[&key];
            total += dim;
            if warning.is_none() {
                warning.clone_from(warn);
            }
        }
        Ok(OracleNullity {
            value: total as i64,
            warning,
        })
    }

    /// `dim_C ker(M - ωI)` at `ω = e^{2πik/d}`, with an eigenvalue prefilter
    /// so only plausible roots pay for an SVD.
    fn kernel_at_root(&self, k: u64, d: u64) -> (usize, Option<String>) {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64);
        let omega = Complex64::new(angle.cos(), angle.sin());
        let near = self
            .eigs
            .iter()
            .any(|l| (l - omega).norm() < 1e-3);
        if !near {
            return (0, None);
        }
        let shifted = realified_shift(&self.mat, omega);
        let svd = shifted.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let thr = RANK_TOL * smax.max(1.0);
        let mut dim_r = 0usize;
        let mut warning = None;
        for s in svd.singular_values.iter() {
            if *s < thr {
                dim_r += 1;
            }
            if *s > thr / 10.0 && *s < thr * 10.0 {
                warning = Some(format!(
                    "singular value {s:.3e} within a factor 10 of rank threshold {thr:.3e}"
                ));
            }
        }
        (dim_r / 2, warning)
    }
}

/// One-shot convenience wrapper.
pub fn nullity_oracle(m: &SymplecticMatrix, power: u64) -> Result<OracleNullity> {
    NullityOracle::new(m).nullity(power)
}

/// Direct route: rank-deficiency of `M^power - I` by SVD. Overflows its
/// useful range once `‖M^power‖` swamps the unit-scale kernel directions,
/// so callers must keep `power·log‖M‖` small.
pub fn direct_power_nullity(m: &SymplecticMatrix, power: u64) -> Result<i64> {
    if power == 0 {
        return Err(SympathError::Domain("power must be ≥ 1".into()));
    }
    let d = m.matrix().nrows();
    let mut acc = DMatrix::<f64>::identity(d, d);
    for _ in 0..power {
        acc = &acc * m.matrix();
    }
    let shifted = acc - DMatrix::identity(d, d);
    let svd = shifted.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let thr = RANK_TOL * smax.max(1.0);
    Ok(svd.singular_values.iter().filter(|s| **s < thr).count() as i64)
}

fn realified_shift(m: &DMatrix<f64>, lambda: Complex64) -> DMatrix<f64> {
    let d = m.nrows();
    let mut r = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = m[(i, j)] - if i == j { lambda.re } else { 0.0 };
            r[(i, j)] = v;
            r[(d + i, d + j)] = v;
        }
        r[(i, d + i)] = lambda.im;
        r[(d + i, i)] = -lambda.im;
    }
    r
}

// ---------------------------------------------------------------------------
// Block generators and the seed path
// ---------------------------------------------------------------------------

/// Closed-form one-period generator for a single block.
#[derive(Clone, Debug)]
enum BlockGen {
    /// `R(φ(t))` with `φ(t) = speed·t + amp·sin(2πt)`.
    Rotation { speed: f64, amp: f64 },
    /// `R(φ(t))·N₁(1, b·t)`.
    RotShear { speed: f64, amp: f64, b: f64 },
    /// `R(speed·t)·diag(e^{μt}, e^{-μt})`.
    Hyperbolic { speed: f64, mu: f64 },
    /// Two-segment N₂ path: rotate both planes to θ, then switch on the
    /// Jordan coupling `[[I, σK],[0, I]]`; `loops` multiplies a plane-1
    /// rotation loop for winding adjustments.
    Jordan {
        theta: f64,
        k: [[f64; 2]; 2],
        loops: i64,
        split: f64,
    },
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn phi_amp(speed: f64) -> f64 {
    // keeps φ'(0) = π when a winding choice zeroes the linear speed
    if speed == 0.0 {
        0.5
    } else {
        0.0
    }
}

/// `Rot₂(a, b)`: rotation by `a` in plane (u₁,v₁) and `b` in plane (u₂,v₂)
/// of the 4×4 N₂ coordinates; the U(2) embedding `[[X,-Y],[Y,X]]`.
fn rot2_diag(a: f64, b: f64) -> DMatrix<f64> {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            ca, 0.0, -sa, 0.0, //
            0.0, cb, 0.0, -sb, //
            sa, 0.0, ca, 0.0, //
            0.0, sb, 0.0, cb,
        ],
    )
}

fn rot2_diag_da(a: f64) -> DMatrix<f64> {
    let (sa, ca) = a.sin_cos();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            -sa, 0.0, -ca, 0.0, //
            0.0, 0.0, 0.0, 0.0, //
            ca, 0.0, -sa, 0.0, //
            0.0, 0.0, 0.0, 0.0,
        ],
    )
}

/// `Θ(c) = [[R(c), 0],[0, R(c)]]`, the rotation factor of an N₂ block.
fn theta_rot(c: f64) -> DMatrix<f64> {
    let r = rotation2(c);
    let mut m = DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&r);
    m.view_mut((2, 2), (2, 2)).copy_from(&r);
    m
}

fn theta_rot_deriv(c: f64, cdot: f64) -> DMatrix<f64> {
    let j2 = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let jr = j2 * rotation2(c) * cdot;
    let mut m = DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&jr);
    m.view_mut((2, 2), (2, 2)).copy_from(&jr);
    m
}

impl BlockGen {
    fn dim(&self) -> usize {
        match self {
            BlockGen::Jordan { .. } => 4,
            _ => 2,
        }
    }

    fn value(&self, t: f64) -> DMatrix<f64> {
        match self {
            BlockGen::Rotation { speed, amp } => {
                rotation2(speed * t + amp * (TWO_PI * t).sin())
            }
            BlockGen::RotShear { speed, amp, b } => {
                let shear = DMatrix::from_row_slice(2, 2, &[1.0, b * t, 0.0, 1.0]);
                rotation2(speed * t + amp * (TWO_PI * t).sin()) * shear
            }
            BlockGen::Hyperbolic { speed, mu } => {
                let u = (mu * t).exp();
                let d = DMatrix::from_row_slice(2, 2, &[u, 0.0, 0.0, 1.0 / u]);
                rotation2(speed * t) * d
            }
            BlockGen::Jordan {
                theta,
                k,
                loops,
                split,
            } => {
                let base = if t <= *split {
                    theta_rot(theta * t / split)
                } else {
                    let sigma = (t - split) / (1.0 - split);
                    let mut u = DMatrix::identity(4, 4);
                    for i in 0..2 {
                        for j in 0..2 {
                            u[(i, 2 + j)] = sigma * k[i][j];
                        }
                    }
                    theta_rot(*theta) * u
                };
                if *loops == 0 {
                    base
                } else {
                    rot2_diag(TWO_PI * (*loops as f64) * t, 0.0) * base
                }
            }
        }
    }

    fn deriv(&self, t: f64) -> DMatrix<f64> {
        let j2 = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        match self {
            BlockGen::Rotation { speed, amp } => {
                let phi = speed * t + amp * (TWO_PI * t).sin();
                let dphi = speed + amp * TWO_PI * (TWO_PI * t).cos();
                j2 * rotation2(phi) * dphi
            }
            BlockGen::RotShear { speed, amp, b } => {
                let phi = speed * t + amp * (TWO_PI * t).sin();
                let dphi = speed + amp * TWO_PI * (TWO_PI * t).cos();
                let shear = DMatrix::from_row_slice(2, 2, &[1.0, b * t, 0.0, 1.0]);
                let dshear = DMatrix::from_row_slice(2, 2, &[0.0, *b, 0.0, 0.0]);
                let r = rotation2(phi);
                (&j2 * &r * dphi) * shear + r * dshear
            }
            BlockGen::Hyperbolic { speed, mu } => {
                let u = (mu * t).exp();
                let d = DMatrix::from_row_slice(2, 2, &[u, 0.0, 0.0, 1.0 / u]);
                let dd = DMatrix::from_row_slice(2, 2, &[mu * u, 0.0, 0.0, -mu / u]);
                let r = rotation2(speed * t);
                (&j2 * &r * *speed) * d + r * dd
            }
            BlockGen::Jordan {
                theta,
                k,
                loops,
                split,
            } => {
                let (base, dbase) = if t <= *split {
                    let c = theta * t / split;
                    (theta_rot(c), theta_rot_deriv(c, theta / split))
                } else {
                    let sigma = (t - split) / (1.0 - split);
                    let mut u = DMatrix::identity(4, 4);
                    let mut du = DMatrix::zeros(4, 4);
                    for i in 0..2 {
                        for j in 0..2 {
                            u[(i, 2 + j)] = sigma * k[i][j];
                            du[(i, 2 + j)] = k[i][j] / (1.0 - split);
                        }
                    }
                    let th = theta_rot(*theta);
                    (&th * &u, th * du)
                };
                if *loops == 0 {
                    dbase
                } else {
                    let a = TWO_PI * (*loops as f64);
                    let l = rot2_diag(a * t, 0.0);
                    let dl = rot2_diag_da(a * t) * a;
                    dl * &base + l * dbase
                }
            }
        }
    }

    /// Full windings added by multiplying a one-plane loop into the block.
    fn add_loops(&mut self, extra: i64) {
        match self {
            BlockGen::Rotation { speed, amp } => {
                *speed += TWO_PI * extra as f64;
                *amp = phi_amp(*speed);
            }
            BlockGen::RotShear { speed, amp, .. } => {
                *speed += TWO_PI * extra as f64;
                *amp = phi_amp(*speed);
            }
            BlockGen::Hyperbolic { speed, .. } => {
                *speed += TWO_PI * extra as f64;
            }
            BlockGen::Jordan { loops, .. } => {
                *loops += extra;
            }
        }
    }
}

/// Analytic path for a seed, extended over `max_period` periods by the
/// iterate law `γᵐ(t) = γ(t - j)·γ(1)ʲ`.
pub struct SeedPath {
    seed: IndexSeed,
    gens: Vec<BlockGen>,
    powers: Vec<DMatrix<f64>>,
    max_period: u32,
    n: usize,
    tail_flipped: bool,
}

impl SeedPath {
    /// Builds the generator path for a seed, tuning windings so that the
    /// crossing count at `m = 1` equals `seed.i1`.
    pub fn build(seed: &IndexSeed, max_period: u32) -> Result<SeedPath> {
        let mut gens = Self::base_gens(seed, false)?;
        let params = CrossingParams::default();
        let mut path = Self::assemble(seed.clone(), gens.clone(), 1, false)?;
        let mut base = raw_crossing_index(&path, 1, &params)?.index;
        let mut tail_flipped = false;
        if (seed.i1 - base).rem_euclid(2) != 0 {
            // The two hyperbolic tail variants land in opposite components
            // of the non-degenerate region, carrying opposite path parity.
            // The iteration formulas do not see the tail, so realizing the
            // opposite variant loses nothing.
            if seed.counts.s >= 1 {
                gens = Self::base_gens(seed, true)?;
                path = Self::assemble(seed.clone(), gens.clone(), 1, true)?;
                base = raw_crossing_index(&path, 1, &params)?.index;
                tail_flipped = true;
            }
            if (seed.i1 - base).rem_euclid(2) != 0 {
                return Err(SympathError::ParityInfeasible(format!(
                    "no winding offset reaches i(γ,1) = {} from base {base}",
                    seed.i1
                )));
            }
        }
        let delta = (seed.i1 - base) / 2;
        if delta != 0 {
            let carrier = Self::carrier_index(&gens);
            gens[carrier].add_loops(delta);
        }
        let path = Self::assemble(seed.clone(), gens, max_period, tail_flipped)?;
        let got = raw_crossing_index(&path, 1, &params)?.index;
        if got != seed.i1 {
            return Err(SympathError::ParityInfeasible(format!(
                "winding by {delta} produced index {got}, wanted {}",
                seed.i1
            )));
        }
        Ok(path)
    }

    fn carrier_index(gens: &[BlockGen]) -> usize {
        gens.iter()
            .position(|g| matches!(g, BlockGen::Rotation { .. }))
            .or_else(|| {
                gens.iter()
                    .position(|g| !matches!(g, BlockGen::Jordan { .. }))
            })
            .unwrap_or(0)
    }

    fn base_gens(seed: &IndexSeed, flip_tail: bool) -> Result<Vec<BlockGen>> {
        let c = &seed.counts;
        c.validate()?;
        let mut gens = Vec::new();
        for _ in 0..c.p_minus {
            gens.push(BlockGen::RotShear {
                speed: TWO_PI,
                amp: 0.0,
                b: 1.0,
            });
        }
        for _ in 0..c.p_zero {
            gens.push(BlockGen::Rotation {
                speed: TWO_PI,
                amp: 0.0,
            });
        }
        for _ in 0..c.p_plus {
            gens.push(BlockGen::RotShear {
                speed: TWO_PI,
                amp: 0.0,
                b: -1.0,
            });
        }
        for _ in 0..c.q_minus {
            // endpoint R(π)·N₁(1,-1) = N₁(-1,1)
            gens.push(BlockGen::RotShear {
                speed: std::f64::consts::PI,
                amp: 0.0,
                b: -1.0,
            });
        }
        for _ in 0..c.q_zero {
            gens.push(BlockGen::Rotation {
                speed: std::f64::consts::PI,
                amp: 0.0,
            });
        }
        for _ in 0..c.q_plus {
            gens.push(BlockGen::RotShear {
                speed: std::f64::consts::PI,
                amp: 0.0,
                b: 1.0,
            });
        }
        for theta in &c.theta_list {
            gens.push(BlockGen::Rotation {
                speed: theta.radians_f64(),
                amp: 0.0,
            });
        }
        for (angles, trivial) in [(&c.alpha_list, false), (&c.beta_list, true)] {
            for angle in angles.iter() {
                let th = angle.radians_f64();
                let b = canonical_n2_b(angle, trivial);
                // K = R(-θ)·B, the symmetric coupling
                let (s, co) = th.sin_cos();
                let k = [
                    [co * b[0][0] + s * b[1][0], co * b[0][1] + s * b[1][1]],
                    [-s * b[0][0] + co * b[1][0], -s * b[0][1] + co * b[1][1]],
                ];
                gens.push(BlockGen::Jordan {
                    theta: th,
                    k,
                    loops: 0,
                    split: 0.75,
                });
            }
        }
        let negative_first = (c.hyperbolic_tail == HyperbolicTail::OneNegative) != flip_tail;
        for idx in 0..c.s {
            let negative = idx == 0 && negative_first && c.s >= 1;
            gens.push(BlockGen::Hyperbolic {
                speed: if negative { std::f64::consts::PI } else { 0.0 },
                mu: 2.0f64.ln(),
            });
        }
        Ok(gens)
    }

    fn assemble(
        seed: IndexSeed,
        gens: Vec<BlockGen>,
        max_period: u32,
        tail_flipped: bool,
    ) -> Result<SeedPath> {
        let n = gens.iter().map(|g| g.dim() / 2).sum::<usize>();
        if n != seed.n as usize {
            return Err(SympathError::InconsistentSeed(format!(
                "generators cover dimension {n}, seed has n = {}",
                seed.n
            )));
        }
        let blocks: Vec<DMatrix<f64>> = gens.iter().map(|g| g.value(1.0)).collect();
        let monodromy = diamond_fold(&blocks)?;
        let mut powers = Vec::with_capacity(max_period as usize + 1);
        powers.push(DMatrix::identity(2 * n, 2 * n));
        for j in 1..=max_period as usize {
            let next = &powers[j - 1] * &monodromy;
            powers.push(next);
        }
        Ok(SeedPath {
            seed,
            gens,
            powers,
            max_period,
            n,
            tail_flipped,
        })
    }

    pub fn seed(&self) -> &IndexSeed {
        &self.seed
    }

    pub fn dim_half(&self) -> usize {
        self.n
    }

    pub fn max_period(&self) -> u32 {
        self.max_period
    }

    pub fn monodromy(&self) -> &DMatrix<f64> {
        &self.powers[1]
    }

    /// Whether the opposite hyperbolic tail variant had to be realized to
    /// reach the requested base-index parity.
    pub fn tail_flipped(&self) -> bool {
        self.tail_flipped
    }

    fn gen_value(&self, local: f64) -> DMatrix<f64> {
        let blocks: Vec<DMatrix<f64>> = self.gens.iter().map(|g| g.value(local)).collect();
        diamond_fold(&blocks).expect("block dims validated at build")
    }

    fn gen_deriv(&self, local: f64) -> DMatrix<f64> {
        let blocks: Vec<DMatrix<f64>> = self.gens.iter().map(|g| g.deriv(local)).collect();
        diamond_fold(&blocks).expect("block dims validated at build")
    }

    /// `γᵐ(t)` for `t ∈ [0, max_period]`.
    pub fn value(&self, t: f64) -> DMatrix<f64> {
        let (j, local) = self.split_time(t);
        self.gen_value(local) * &self.powers[j]
    }

    /// One-sided derivative of `γᵐ` (right-sided except at `t = max`).
    pub fn derivative(&self, t: f64) -> DMatrix<f64> {
        let (j, local) = self.split_time(t);
        self.gen_deriv(local) * &self.powers[j]
    }

    fn split_time(&self, t: f64) -> (usize, f64) {
        let t = t.clamp(0.0, self.max_period as f64);
        let mut j = t.floor() as usize;
        if j >= self.max_period as usize {
            j = self.max_period as usize - 1;
        }
        (j, t - j as f64)
    }
}

// ---------------------------------------------------------------------------
// Sampled paths (the wire-format view of a generated path)
// ---------------------------------------------------------------------------

/// A sampled symplectic path with its generator retained for refinement.
pub struct SampledPath {
    pub n: usize,
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
    pub generator: String,
    source: SeedPath,
}

impl SampledPath {
    pub fn source(&self) -> &SeedPath {
        &self.source
    }
}

/// Builds the generator path for a seed and samples it over `periods`
/// periods; validates `γ(0) = I`, per-sample symplecticity, and the
/// iterate extension law at period boundaries.
pub fn build_path(
    seed: &IndexSeed,
    samples_per_period: usize,
    periods: u32,
) -> Result<SampledPath> {
    if samples_per_period < 2 || periods == 0 {
        return Err(SympathError::Domain(
            "need ≥ 2 samples per period and ≥ 1 period".into(),
        ));
    }
    let path = SeedPath::build(seed, periods)?;
    let mut times = Vec::new();
    let mut matrices = Vec::new();
    for j in 0..periods as usize {
        for i in 0..samples_per_period {
            let t = j as f64 + i as f64 / samples_per_period as f64;
            times.push(t);
            matrices.push(path.value(t));
        }
    }
    times.push(periods as f64);
    matrices.push(path.value(periods as f64));

    let id = DMatrix::identity(2 * path.n, 2 * path.n);
    if (&matrices[0] - &id).norm() > 1e-12 {
        return Err(SympathError::InconsistentSeed("γ(0) ≠ I".into()));
    }
    for m in &matrices {
        if crate::forms::symplectic_residual(m) > 1e-9 * (1.0 + m.norm()) {
            return Err(SympathError::InconsistentSeed(
                "path sample exceeds symplecticity tolerance".into(),
            ));
        }
    }
    let monodromy = path.monodromy().clone();
    let mut power = id.clone();
    for j in 0..=periods as usize {
        let boundary = path.value(j as f64);
        if (&boundary - &power).norm() > 1e-8 * (1.0 + power.norm()) {
            return Err(SympathError::InconsistentSeed(format!(
                "iterate law violated at period boundary {j}"
            )));
        }
        power = &power * &monodromy;
    }
    let generator = format!(
        "blocks={:?} windings-tuned i1={} tail_flipped={}",
        path.gens.len(),
        seed.i1,
        path.tail_flipped
    );
    Ok(SampledPath {
        n: path.n,
        times,
        matrices,
        generator,
        source: path,
    })
}

// ---------------------------------------------------------------------------
// Crossing-form index oracle
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CrossingParams {
    pub samples_per_period: usize,
    /// normalized |det| threshold for touch candidates
    pub candidate_rel: f64,
    /// singular values below this (scaled) are kernel directions
    pub sigma_crossing: f64,
    /// form eigenvalues below this are treated as exactly zero
    pub form_null: f64,
    /// form eigenvalues above this are treated as genuinely nonzero
    pub form_genuine: f64,
    /// refinement budget per period
    pub max_evals_per_period: u32,
}

impl Default for CrossingParams {
    fn default() -> Self {
        CrossingParams {
            samples_per_period: 512,
            candidate_rel: 3e-3,
            sigma_crossing: 1e-4,
            form_null: 1e-6,
            form_genuine: 1e-3,
            max_evals_per_period: 1 << 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingKind {
    Start,
    Interior,
    JordanPassage,
    Endpoint,
}

#[derive(Clone, Debug)]
pub struct CrossingEvent {
    pub t: f64,
    pub kernel_dim: usize,
    pub contribution: i64,
    pub kind: CrossingKind,
}

#[derive(Clone, Debug)]
pub struct RawCrossing {
    pub index: i64,
    pub events: Vec<CrossingEvent>,
}

fn sigma_min(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Kernel basis (right singular vectors with σ below threshold).
fn kernel_basis(a: &DMatrix<f64>, thr: f64) -> Vec<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let vt = svd.v_t.expect("svd vectors");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < thr {
            out.push(vt.row(i).transpose());
        }
    }
    out
}

/// Counts eigenvalue-1 crossings of `γᵐ` with quadratic-form weights.
pub fn raw_crossing_index(path: &SeedPath, m: u32, params: &CrossingParams) -> Result<RawCrossing> {
    let profile = raw_crossing_profile(path, m, params)?;
    Ok(profile.into_iter().next_back().expect("m ≥ 1 validated"))
}

/// The crossing counts of every iterate `1..=m_max` from one detection
/// pass: interior events are shared, only the endpoint rule is applied
/// per iterate.
pub fn raw_crossing_profile(
    path: &SeedPath,
    m_max: u32,
    params: &CrossingParams,
) -> Result<Vec<RawCrossing>> {
    let m = m_max;
    if m == 0 || m > path.max_period() {
        return Err(SympathError::Domain(format!(
            "m = {m} outside the built range 1..={}",
            path.max_period()
        )));
    }
    let dim = 2 * path.dim_half();
    let j_t = standard_j(path.dim_half()).transpose();
    let id = DMatrix::<f64>::identity(dim, dim);
    let end = m as f64;
    let k = params.samples_per_period;
    let total = k * m as usize;

    let g_at = |t: f64| -> f64 { (path.value(t) - &id).determinant() };

    // sample pass
    let mut ts = Vec::with_capacity(total + 1);
    let mut gs = Vec::with_capacity(total + 1);
    let mut rs = Vec::with_capacity(total + 1);
    for i in 0..=total {
        let t = end * (i as f64) / (total as f64);
        ts.push(t);
        let a = path.value(t) - &id;
        let det = a.determinant();
        gs.push(det);
        rs.push(det.abs() / (1.0 + a.norm()).powi(dim as i32 - 1));
    }

    let mut evals: u32 = 0;
    let budget = params
        .max_evals_per_period
        .saturating_mul(m.max(1));
    let mut candidates: Vec<f64> = Vec::new();

    // sign changes → bisection on g
    for i in 0..total {
        if gs[i] == 0.0 {
            candidates.push(ts[i]);
            continue;
        }
        if gs[i] * gs[i + 1] < 0.0 {
            let (mut lo, mut hi) = (ts[i], ts[i + 1]);
            let mut glo = gs[i];
            for _ in 0..80 {
                evals += 1;
                let mid = 0.5 * (lo + hi);
                let gm = g_at(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo * gm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            candidates.push(0.5 * (lo + hi));
        }
    }

    // touch candidates → golden-section on σ_min (V-shaped at a crossing)
    let golden = |mut a: f64, mut b: f64, evals: &mut u32| -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let path_sig = |t: f64| sigma_min(&(path.value(t) - &id));
        let mut fc = path_sig(c);
        let mut fd = path_sig(d);
        *evals += 2;
        while b - a > 1e-13 && *evals < budget {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = path_sig(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = path_sig(d);
            }
            *evals += 1;
        }
        0.5 * (a + b)
    };

    for i in 0..=total {
        let is_min = (i == 0 || rs[i] <= rs[i - 1]) && (i == total || rs[i] <= rs[i + 1]);
        if !is_min || rs[i] > params.candidate_rel {
            continue;
        }
        let lo = if i == 0 { ts[0] } else { ts[i - 1] };
        let hi = if i == total { ts[total] } else { ts[i + 1] };
        candidates.push(golden(lo, hi, &mut evals));
    }
    if evals >= budget {
        return Err(SympathError::DegenerateCrossing(format!(
            "refinement budget {budget} exhausted; a zero of det(γ(t)-I) is not isolated"
        )));
    }

    // merge and drop the endpoints (handled separately)
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<f64> = Vec::new();
    for c in candidates {
        if c < 1e-9 || c > end - 1e-9 {
            continue;
        }
        if let Some(last) = merged.last() {
            if (c - last).abs() < 1e-7 {
                continue;
            }
        }
        merged.push(c);
    }

    let form_on = |basis: &[DVector<f64>], deriv: &DMatrix<f64>| -> DMatrix<f64> {
        let kdim = basis.len();
        let images: Vec<DVector<f64>> = basis.iter().map(|v| deriv * v).collect();
        let mut f = DMatrix::zeros(kdim, kdim);
        for p in 0..kdim {
            for q in 0..kdim {
                let a = (basis[p].transpose() * &j_t * &images[q])[(0, 0)];
                let b = (basis[q].transpose() * &j_t * &images[p])[(0, 0)];
                f[(p, q)] = 0.5 * (a + b);
            }
        }
        f
    };

    let mut events = Vec::new();

    // t = 0: half the signature of the start form on the full space
    {
        let deriv = path.derivative(0.0);
        let mut f = DMatrix::zeros(dim, dim);
        let jd = &j_t * &deriv;
        for p in 0..dim {
            for q in 0..dim {
                f[(p, q)] = 0.5 * (jd[(p, q)] + jd[(q, p)]);
            }
        }
        let eig = f.symmetric_eigen();
        let pos = eig.eigenvalues.iter().filter(|v| **v > params.form_null).count() as i64;
        let neg = eig.eigenvalues.iter().filter(|v| **v < -params.form_null).count() as i64;
        if (pos + neg) as usize != dim {
            return Err(SympathError::DegenerateCrossing(
                "start form is degenerate; generator construction broken".into(),
            ));
        }
        let sig = pos - neg;
        if sig % 2 != 0 {
            return Err(SympathError::DegenerateCrossing(
                "start form signature is odd".into(),
            ));
        }
        events.push(CrossingEvent {
            t: 0.0,
            kernel_dim: dim,
            contribution: sig / 2,
            kind: CrossingKind::Start,
        });
    }

    // interior crossings
    for t0 in merged {
        let a = path.value(t0) - &id;
        let svd = a.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let thr = params.sigma_crossing * (1.0 + smax);
        let basis = kernel_basis(&a, thr);
        if basis.is_empty() {
            continue; // false candidate
        }
        let deriv = path.derivative(t0);
        let f = form_on(&basis, &deriv);
        let eig = f.symmetric_eigen();
        let max_abs = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_abs < params.form_null {
            // defective-pair passage: isotropic kernel, no sign change
            let mut iso = 0.0f64;
            for x in &basis {
                for y in &basis {
                    iso = iso.max(omega_abs(&j_t, x, y));
                }
            }
            let h = 0.5 / k as f64;
            let gl = g_at((t0 - h).max(0.0));
            let gr = g_at((t0 + h).min(end));
            if iso < 1e-6 && gl * gr > 0.0 {
                events.push(CrossingEvent {
                    t: t0,
                    kernel_dim: basis.len(),
                    contribution: 0,
                    kind: CrossingKind::JordanPassage,
                });
                continue;
            }
            return Err(SympathError::DegenerateCrossing(format!(
                "vanishing crossing form at t = {t0:.9} without the defective-pair \
                 structure (isotropy {iso:.2e})"
            )));
        }
        let pos = eig
            .eigenvalues
            .iter()
            .filter(|v| **v > params.form_genuine)
            .count() as i64;
        let neg = eig
            .eigenvalues
            .iter()
            .filter(|v| **v < -params.form_genuine)
            .count() as i64;
        if (pos + neg) as usize != basis.len() {
            return Err(SympathError::DegenerateCrossing(format!(
                "crossing form at t = {t0:.9} has eigenvalues between the null \
                 ({:.1e}) and genuine ({:.1e}) thresholds",
                params.form_null, params.form_genuine
            )));
        }
        events.push(CrossingEvent {
            t: t0,
            kernel_dim: basis.len(),
            contribution: pos - neg,
            kind: CrossingKind::Interior,
        });
    }

    // per-iterate assembly: shared interior events, endpoint rule per m
    // (minus the negative index of the endpoint form when γ(m) has a
    // kernel)
    let mut profile = Vec::with_capacity(m as usize);
    for m_cur in 1..=m {
        let end_cur = m_cur as f64;
        let mut evs: Vec<CrossingEvent> = events
            .iter()
            .filter(|e| e.t < end_cur - 1e-9)
            .cloned()
            .collect();
        let mut idx = evs.iter().map(|e| e.contribution).sum::<i64>();
        let a = path.value(end_cur) - &id;
        let svd = a.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let thr = params.sigma_crossing * (1.0 + smax);
        let basis = kernel_basis(&a, thr);
        if !basis.is_empty() {
            let deriv = path.derivative(end_cur);
            let f = form_on(&basis, &deriv);
            let eig = f.symmetric_eigen();
            let neg = eig
                .eigenvalues
                .iter()
                .filter(|v| **v < -params.form_genuine)
                .count() as i64;
            let pos = eig
                .eigenvalues
                .iter()
                .filter(|v| **v > params.form_genuine)
                .count() as i64;
            if (pos + neg) as usize != basis.len() {
                return Err(SympathError::DegenerateCrossing(
                    "degenerate endpoint form (resonant defective pair?); \
                     choose never-resonant angles for crossing seeds"
                        .into(),
                ));
            }
            idx -= neg;
            evs.push(CrossingEvent {
                t: end_cur,
                kernel_dim: basis.len(),
                contribution: -neg,
                kind: CrossingKind::Endpoint,
            });
        }
        profile.push(RawCrossing {
            index: idx,
            events: evs,
        });
    }
    Ok(profile)
}

fn omega_abs(j_t: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * j_t * y)[(0, 0)].abs()
}

/// The crossing-count index oracle, normalized by one calibration point.
pub struct CrossingOracle {
    calibration: i64,
    params: CrossingParams,
}

impl CrossingOracle {
    /// Fixes the additive constant by matching `iterate_index(reference, 1)`.
    pub fn calibrate(reference: &IndexSeed, params: CrossingParams) -> Result<Self> {
        let path = SeedPath::build(reference, 1)?;
        let raw = raw_crossing_index(&path, 1, &params)?.index;
        let expected = iterate_index(reference, 1)?;
        Ok(CrossingOracle {
            calibration: expected - raw,
            params,
        })
    }

    pub fn calibration(&self) -> i64 {
        self.calibration
    }

    pub fn params(&self) -> &CrossingParams {
        &self.params
    }

    /// Calibrated crossing count of the m-th iterate of a generated path.
    pub fn crossing_index(&self, path: &SampledPath, m: u32) -> Result<i64> {
        Ok(raw_crossing_index(path.source(), m, &self.params)?.index + self.calibration)
    }

    /// Same, operating directly on the analytic path.
    pub fn crossing_index_analytic(&self, path: &SeedPath, m: u32) -> Result<i64> {
        Ok(raw_crossing_index(path, m, &self.params)?.index + self.calibration)
    }

    /// Calibrated counts for every iterate `1..=m_max` from one detection
    /// pass over the path.
    pub fn crossing_profile(&self, path: &SeedPath, m_max: u32) -> Result<Vec<i64>> {
        Ok(raw_crossing_profile(path, m_max, &self.params)?
            .into_iter()
            .map(|rc| rc.index + self.calibration)
            .collect())
    }
}

/// `i(γ, m_max)/m_max`, the finite-m mean-index estimate.
pub fn mean_index_limit(seed: &IndexSeed, m_max: u64) -> Result<f64> {
    if m_max < 1000 {
        return Err(SympathError::Domain(
            "mean-index limit needs m_max ≥ 1000".into(),
        ));
    }
    Ok(iterate_index(seed, m_max)? as f64 / m_max as f64)
}
