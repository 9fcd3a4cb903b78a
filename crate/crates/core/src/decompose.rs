//! Recovery of normal-form invariants from a numeric symplectic matrix.
//!
//! The spectrum of a symplectic matrix is symmetric under conjugation and
//! inversion; eigenvalues are clustered (single linkage), symmetrized, and
//! classified into the unit-circle / hyperbolic locations. For a
//! characteristic-shaped matrix (eigenvalue 1 of algebraic multiplicity
//! exactly 2 with a one-dimensional kernel) the full block multiset is
//! recovered:
//!
//! * eigenvalue 1 → the forced `N₁(1,1)` factor (`p₋ = 1`), detected by the
//!   sign of the rank-one form `u ↦ ω((M-I)u, u)` on the generalized
//!   eigenspace;
//! * eigenvalue −1 → `q₋/q₀/q₊` from kernel dimension and the signature of
//!   `u ↦ ω((M+I)u, u)`;
//! * elliptic pairs → `R(θ)` vs `N₂` split via geometric multiplicity; the
//!   rotation side (θ vs 2π−θ) from the Krein sign of each eigenvector, and
//!   N₂ triviality from the phase of the invariant `i·ω(ζ̄, η)` of a
//!   defective eigenvector ζ and its Jordan partner η;
//! * everything off the unit circle → the hyperbolic count `s`, with the
//!   tail variant read off the parity of negative real pairs.
//!
//! N₂ angles are reported in `(0,π)`: conjugating by `diag(1,-1) ⊕ diag(1,-1)`
//! (a symplectic matrix) maps `N₂(e^{iθ},B)` to `N₂(e^{i(2π-θ)},B')` with the
//! same triviality, so the angle side is not an invariant for N₂ blocks —
//! the iteration formulas only consume those angles through φ, which is
//! side-insensitive.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Result, SympathError};
use crate::forms::{standard_j, HyperbolicTail, NormalFormCounts, SymplecticMatrix};

pub use crate::forms::{triviality_sign, Triviality};

/// Where an eigenvalue cluster sits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    UnitOne,
    UnitMinusOne,
    Elliptic { theta: f64 },
    HyperbolicReal { lambda: f64 },
    HyperbolicQuad { re: f64, im: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenCluster {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub location: Location,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloquetType {
    NonDegenerate,
    Hyperbolic,
    Elliptic,
    Mixed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralClassification {
    pub clusters: Vec<EigenCluster>,
    pub floquet_type: FloquetType,
}

/// Counts plus the spectrally recovered angle data (always float angles —
/// rationality is not an endpoint invariant).
#[derive(Clone, Debug)]
pub struct ExtractedCounts {
    pub counts: NormalFormCounts,
    pub classification: SpectralClassification,
}

fn cdist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

struct Cluster {
    center: Complex64,
    multiplicity: usize,
}

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    if parent[i] != i {
        let root = find(parent, parent[i]);
        parent[i] = root;
    }
    parent[i]
}

/// Single-linkage clustering with radius `tol`, plus the ambiguity check:
/// two surviving clusters closer than `2·tol` cannot be told apart.
fn cluster_eigenvalues(eigs: &[Complex64], tol: f64) -> Result<Vec<Cluster>> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if cdist(eigs[i], eigs[j]) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut clusters: Vec<Cluster> = groups
        .values()
        .map(|idxs| {
            let sum: Complex64 = idxs.iter().map(|&i| eigs[i]).sum();
            Cluster {
                center: sum / idxs.len() as f64,
                multiplicity: idxs.len(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        (a.center.re, a.center.im)
            .partial_cmp(&(b.center.re, b.center.im))
            .unwrap()
    });
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let d = cdist(clusters[i].center, clusters[j].center);
            if d < 2.0 * tol {
                return Err(SympathError::Ambiguity(format!(
                    "clusters at {:.6}{:+.6}i and {:.6}{:+.6}i are {d:.3e} apart \
                     (< 2·tol = {:.3e}); candidates: keep them split, or merge into \
                     one cluster of multiplicity {}",
                    clusters[i].center.re,
                    clusters[i].center.im,
                    clusters[j].center.re,
                    clusters[j].center.im,
                    2.0 * tol,
                    clusters[i].multiplicity + clusters[j].multiplicity,
                )));
            }
        }
    }
    Ok(clusters)
}

/// Snaps a cluster center onto the symmetry loci it is tol-close to.
fn snap_center(c: Complex64, tol: f64) -> Complex64 {
    let mut z = c;
    if z.im.abs() <= tol {
        z.im = 0.0;
    }
    if (z.norm() - 1.0).abs() <= tol {
        z /= z.norm();
    }
    z
}

/// Spectral classification of a symplectic matrix.
pub fn classify_spectrum(m: &SymplecticMatrix, tol: f64) -> Result<SpectralClassification> {
    let eigs: Vec<Complex64> = m.matrix().complex_eigenvalues().iter().copied().collect();
    let clusters = cluster_eigenvalues(&eigs, tol)?;

    // Symmetry check: conjugation and inversion act on the cluster multiset.
    let centers: Vec<(Complex64, usize)> = clusters
        .iter()
        .map(|c| (snap_center(c.center, tol), c.multiplicity))
        .collect();
    for (z, mult) in &centers {
        for partner in [z.conj(), 1.0 / z, 1.0 / z.conj()] {
            let found = centers
                .iter()
                .find(|(w, _)| cdist(*w, partner) <= 10.0 * tol + 1e-12);
            match found {
                Some((_, pm)) if pm == mult => {}
                _ => {
                    return Err(SympathError::Ambiguity(format!(
                        "spectrum not symmetric at tolerance: no multiplicity-{mult} \
                         partner for {:.6}{:+.6}i at {:.6}{:+.6}i",
                        z.re, z.im, partner.re, partner.im
                    )))
                }
            }
        }
    }

    let mut out = Vec::new();
    let mut all_unit = true;
    let mut mult_one = 0usize;
    let mut off_unit = 0usize;
    for (z, mult) in &centers {
        let on_unit = (z.norm() - 1.0).abs() <= tol;
        if !on_unit {
            all_unit = false;
        }
        let location = if on_unit && cdist(*z, Complex64::new(1.0, 0.0)) <= tol {
            mult_one += mult;
            Location::UnitOne
        } else if on_unit && cdist(*z, Complex64::new(-1.0, 0.0)) <= tol {
            Location::UnitMinusOne
        } else if on_unit {
            Location::Elliptic {
                theta: z.im.atan2(z.re).rem_euclid(2.0 * std::f64::consts::PI),
            }
        } else if z.im == 0.0 {
            off_unit += mult;
            Location::HyperbolicReal { lambda: z.re }
        } else {
            off_unit += mult;
            Location::HyperbolicQuad { re: z.re, im: z.im }
        };
        out.push(EigenCluster {
            re: z.re,
            im: z.im,
            multiplicity: *mult,
            location,
        });
    }

    let dim = 2 * m.dim_half();
    let floquet_type = if mult_one == 2 && off_unit == dim - 2 {
        FloquetType::Hyperbolic
    } else if all_unit {
        FloquetType::Elliptic
    } else if mult_one == 2 {
        FloquetType::NonDegenerate
    } else {
        FloquetType::Mixed
    };

    Ok(SpectralClassification {
        clusters: out,
        floquet_type,
    })
}

// --- linear-algebra helpers --------------------------------------------------

/// Real kernel basis of `a` at threshold `ktol` (right singular vectors).
fn real_kernel(a: &DMatrix<f64>, ktol: f64) -> Vec<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let vt = svd.v_t.expect("svd with vectors");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < ktol {
            out.push(vt.row(i).transpose());
        }
    }
    out
}

/// Realification of `M - λI` for complex kernel computations:
/// `(M-λ)(x+iy) = 0` iff `[[M-aI, bI],[-bI, M-aI]]·[x;y] = 0`.
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

/// Complex kernel basis of `M - λI`.
fn complex_kernel(m: &DMatrix<f64>, lambda: Complex64, ktol: f64) -> Vec<DVector<Complex64>> {
    let d = m.nrows();
    let real_basis = real_kernel(&realified_shift(m, lambda), ktol);
    // Complexify and Gram-Schmidt over C; the real kernel double-counts
    // (v and iv), so half the candidates survive.
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for rb in &real_basis {
        let mut z = DVector::from_fn(d, |i, _| Complex64::new(rb[i], rb[d + i]));
        for b in &basis {
            let proj: Complex64 = b.iter().zip(z.iter()).map(|(a, c)| a.conj() * c).sum();
            z -= DVector::from_fn(d, |i, _| b[i] * proj);
        }
        let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.3 {
            z /= Complex64::new(norm, 0.0);
            basis.push(z);
        }
    }
    basis
}

/// `ω(x, y) = ⟨Jx, y⟩ = xᵀ Jᵀ y`, complex-bilinear extension (no conjugation).
fn omega_c(j_t: &DMatrix<f64>, x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    let d = x.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..d {
        let mut row = Complex64::new(0.0, 0.0);
        for c in 0..d {
            if j_t[(r, c)] != 0.0 {
                row += Complex64::new(j_t[(r, c)], 0.0) * y[c];
            }
        }
        acc += x[r] * row;
    }
    acc
}

fn omega_r(j_t: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * j_t * y)[(0, 0)]
}

/// Signature of the symmetrized form `u ↦ ω(Au, u)` on the span of `basis`.
fn form_signature(
    j_t: &DMatrix<f64>,
    a: &DMatrix<f64>,
    basis: &[DVector<f64>],
    rank_tol: f64,
) -> (usize, usize) {
    let k = basis.len();
    let images: Vec<DVector<f64>> = basis.iter().map(|b| a * b).collect();
    let mut f = DMatrix::zeros(k, k);
    for p in 0..k {
        for q in 0..k {
            f[(p, q)] =
                0.5 * (omega_r(j_t, &images[p], &basis[q]) + omega_r(j_t, &images[q], &basis[p]));
        }
    }
    let eig = f.symmetric_eigen();
    let pos = eig.eigenvalues.iter().filter(|v| **v > rank_tol).count();
    let neg = eig.eigenvalues.iter().filter(|v| **v < -rank_tol).count();
    (pos, neg)
}

// --- counts extraction ---------------------------------------------------------

/// Recovers the normal-form invariants of a characteristic-shaped
/// symplectic matrix. Integer data is exact; angles come back as float
/// angles.
pub fn extract_counts(m: &SymplecticMatrix, tol: f64) -> Result<ExtractedCounts> {
    let classification = classify_spectrum(m, tol)?;
    let mat = m.matrix();
    let dim = mat.nrows();
    let n = m.dim_half() as u32;
    let j_t = standard_j(m.dim_half()).transpose();
    let scale = 1.0 + mat.norm();
    let ktol = (tol * 10.0).max(1e-7) * scale;
    let rank_tol = ktol;

    let ident = DMatrix::identity(dim, dim);

    let mut counts = NormalFormCounts {
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

    // eigenvalue 1: the forced N₁(1,1)
    let mult_one: usize = classification
        .clusters
        .iter()
        .filter(|c| c.location == Location::UnitOne)
        .map(|c| c.multiplicity)
        .sum();
    if mult_one != 2 {
        return Err(SympathError::NotACharacteristic(format!(
            "eigenvalue 1 has algebraic multiplicity {mult_one}, need exactly 2"
        )));
    }
    let shifted = mat - &ident;
    let ker_one = real_kernel(&shifted, ktol);
    if ker_one.len() != 1 {
        return Err(SympathError::NotACharacteristic(format!(
            "eigenvalue 1 has kernel dimension {}, need exactly 1",
            ker_one.len()
        )));
    }
    let gen_one = real_kernel(&(&shifted * &shifted), ktol);
    if gen_one.len() != 2 {
        return Err(SympathError::NotACharacteristic(format!(
            "generalized eigenspace at 1 has dimension {}, need 2",
            gen_one.len()
        )));
    }
    match form_signature(&j_t, &shifted, &gen_one, rank_tol) {
        (1, 0) => counts.p_minus = 1,
        (0, 1) => {
            return Err(SympathError::NotACharacteristic(
                "eigenvalue-1 block has N₁(1,-1) sign, not the star-shaped N₁(1,1)".into(),
            ))
        }
        other => {
            return Err(SympathError::Ambiguity(format!(
                "rank-one sign form at eigenvalue 1 has signature {other:?}"
            )))
        }
    }

    // eigenvalue -1: split q₋ / q₀ / q₊
    let mult_neg: usize = classification
        .clusters
        .iter()
        .filter(|c| c.location == Location::UnitMinusOne)
        .map(|c| c.multiplicity)
        .sum();
    if mult_neg > 0 {
        if mult_neg % 2 != 0 {
            return Err(SympathError::Ambiguity(format!(
                "odd algebraic multiplicity {mult_neg} at eigenvalue -1"
            )));
        }
        let shifted_neg = mat + &ident;
        let g = real_kernel(&shifted_neg, ktol).len();
        let half = mult_neg / 2;
        if g < half || g > mult_neg {
            return Err(SympathError::Ambiguity(format!(
                "kernel dimension {g} at -1 incompatible with multiplicity {mult_neg}"
            )));
        }
        let jordan = mult_neg - g; // N₁(-1,±1) blocks
        let minus_identity = g - half; // -I₂ blocks
        let mut power = ident.clone();
        for _ in 0..mult_neg {
            power = &power * &shifted_neg;
        }
        let gen_basis = real_kernel(&power, ktol);
        if gen_basis.len() != mult_neg {
            return Err(SympathError::Ambiguity(format!(
                "generalized eigenspace at -1 has dimension {}, expected {mult_neg}",
                gen_basis.len()
            )));
        }
        let (pos, neg) = form_signature(&j_t, &shifted_neg, &gen_basis, rank_tol);
        if pos + neg != jordan {
            return Err(SympathError::Ambiguity(format!(
                "sign form at -1 has rank {}, expected {jordan}",
                pos + neg
            )));
        }
        counts.q_minus = pos as u32;
        counts.q_plus = neg as u32;
        counts.q_zero = minus_identity as u32;
    }

    // elliptic pairs: R(θ) vs N₂, rotation side, N₂ triviality
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut elliptic_reps: Vec<(Complex64, usize)> = classification
        .clusters
        .iter()
        .filter_map(|c| match c.location {
            Location::Elliptic { .. } if c.im > 0.0 => {
                Some((Complex64::new(c.re, c.im), c.multiplicity))
            }
            _ => None,
        })
        .collect();
    elliptic_reps.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());

    for (lambda, alg_mult) in elliptic_reps {
        let phi = lambda.im.atan2(lambda.re).rem_euclid(two_pi); // ∈ (0,π)
        let kernel = complex_kernel(mat, lambda, ktol);
        let geo = kernel.len();
        if geo == 0 || geo > alg_mult || alg_mult > 2 * geo {
            return Err(SympathError::Ambiguity(format!(
                "elliptic cluster at angle {phi:.6}: algebraic {alg_mult} vs geometric {geo}"
            )));
        }
        let n2_count = alg_mult - geo;
        let r_count = 2 * geo - alg_mult;

        // Krein form on the eigenspace: ±-definite directions are the R(θ)
        // blocks (sign = rotation side), null directions belong to N₂.
        let mut krein = DMatrix::<Complex64>::zeros(geo, geo);
        for p in 0..geo {
            let conj_p = kernel[p].map(|z| z.conj());
            for q in 0..geo {
                krein[(p, q)] = Complex64::i() * omega_c(&j_t, &conj_p, &kernel[q]);
            }
        }
        let (kr_pos, kr_neg, kr_null_vecs) = hermitian_signature(&krein, 0.2);
        if kr_pos + kr_neg != r_count || kr_null_vecs.len() != n2_count {
            return Err(SympathError::Ambiguity(format!(
                "Krein signature ({kr_pos},{kr_neg},{}) at angle {phi:.6} does not match \
                 R-count {r_count} and N₂-count {n2_count}",
                kr_null_vecs.len()
            )));
        }
        for _ in 0..kr_pos {
            counts.r += 1;
            counts
                .theta_list
                .push(Angle::float_turns(phi / two_pi, false)?);
        }
        for _ in 0..kr_neg {
            counts.r += 1;
            counts
                .theta_list
                .push(Angle::float_turns(1.0 - phi / two_pi, false)?);
        }

        // Defective directions: Jordan partner and the phase invariant
        // arg(i·ω(ζ̄,η)) = π/2 - φ for nontrivial, shifted by π for trivial.
        for null_combo in &kr_null_vecs {
            let mut zeta = DVector::<Complex64>::zeros(dim);
            for (k, c) in null_combo.iter().enumerate() {
                zeta += kernel[k].map(|z| z * *c);
            }
            let eta = jordan_partner(mat, lambda, &zeta, ktol)?;
            let conj_zeta = zeta.map(|z| z.conj());
            let c_inv = Complex64::i() * omega_c(&j_t, &conj_zeta, &eta);
            let expected_nontrivial = std::f64::consts::FRAC_PI_2 - phi;
            let mut e = (c_inv.arg() - expected_nontrivial).rem_euclid(two_pi);
            if e > std::f64::consts::PI {
                e -= two_pi;
            }
            let turn = phi / two_pi;
            if e.abs() < 0.5 {
                counts.r_star += 1;
                counts.alpha_list.push(Angle::float_turns(turn, false)?);
            } else if (e.abs() - std::f64::consts::PI).abs() < 0.5 {
                counts.r_zero += 1;
                counts.beta_list.push(Angle::float_turns(turn, false)?);
            } else {
                return Err(SympathError::Ambiguity(format!(
                    "N₂ triviality phase {e:.3} at angle {phi:.6} is neither 0 nor π"
                )));
            }
        }
    }

    // hyperbolic part
    let mut neg_real_pairs = 0u32;
    for c in &classification.clusters {
        match c.location {
            Location::HyperbolicReal { lambda } => {
                // count each (λ, 1/λ) pair once, at the |λ| > 1 member
                if lambda.abs() > 1.0 {
                    counts.s += c.multiplicity as u32;
                    if lambda < 0.0 {
                        neg_real_pairs += c.multiplicity as u32;
                    }
                }
            }
            Location::HyperbolicQuad { re, im } => {
                // quadruple counted at its |λ|>1, im>0 member; contributes 2
                let z = Complex64::new(re, im);
                if z.norm() > 1.0 && im > 0.0 {
                    counts.s += 2 * c.multiplicity as u32;
                }
            }
            _ => {}
        }
    }
    if neg_real_pairs % 2 == 1 {
        counts.hyperbolic_tail = HyperbolicTail::OneNegative;
    }

    if counts.half_dim_sum() != n {
        return Err(SympathError::Ambiguity(format!(
            "recovered block budget {} ≠ n = {n}",
            counts.half_dim_sum()
        )));
    }
    counts.validate()?;

    Ok(ExtractedCounts {
        counts,
        classification,
    })
}

/// Eigen-decomposition of a small Hermitian matrix via its real symmetric
/// embedding; returns (positive count, negative count, null-space combos).
fn hermitian_signature(
    h: &DMatrix<Complex64>,
    null_tol: f64,
) -> (usize, usize, Vec<Vec<Complex64>>) {
    let g = h.nrows();
    // [[Re H, -Im H],[Im H, Re H]] is symmetric with each eigenvalue doubled.
    let mut real = DMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        for j in 0..g {
            real[(i, j)] = h[(i, j)].re;
            real[(g + i, g + j)] = h[(i, j)].re;
            real[(i, g + j)] = -h[(i, j)].im;
            real[(g + i, j)] = h[(i, j)].im;
        }
    }
    let eig = real.symmetric_eigen();
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut null_vecs: Vec<Vec<Complex64>> = Vec::new();
    for (k, v) in eig.eigenvalues.iter().enumerate() {
        if *v > null_tol {
            pos += 1;
        } else if *v < -null_tol {
            neg += 1;
        } else {
            let col = eig.eigenvectors.column(k);
            let z: Vec<Complex64> = (0..g).map(|i| Complex64::new(col[i], col[g + i])).collect();
            // deduplicate the doubled copy (v and iv span the same C-line)
            let dup = null_vecs.iter().any(|w| {
                let inner: Complex64 =
                    w.iter().zip(z.iter()).map(|(a, b)| a.conj() * b).sum();
                inner.norm() > 0.7
            });
            if !dup {
                null_vecs.push(z);
            }
        }
    }
    (pos / 2, neg / 2, null_vecs)
}

/// Solves `(M - λI)η = ζ` in the least-squares sense and validates the
/// residual, confirming ζ really has a Jordan partner.
fn jordan_partner(
    m: &DMatrix<f64>,
    lambda: Complex64,
    zeta: &DVector<Complex64>,
    ktol: f64,
) -> Result<DVector<Complex64>> {
    let d = m.nrows();
    let shifted = realified_shift(m, lambda);
    let rhs = DVector::from_fn(2 * d, |i, _| {
        if i < d {
            zeta[i].re
        } else {
            zeta[i - d].im
        }
    });
    let svd = shifted.clone().svd(true, true);
    let eta_real = svd
        .solve(&rhs, ktol)
        .map_err(|e| SympathError::Ambiguity(format!("Jordan partner solve failed: {e}")))?;
    let residual = (&shifted * &eta_real - &rhs).norm();
    if residual > 1e-4 * (1.0 + rhs.norm()) {
        return Err(SympathError::Ambiguity(format!(
            "defective eigenvector has no Jordan partner (residual {residual:.3e})"
        )));
    }
    Ok(DVector::from_fn(d, |i, _| {
        Complex64::new(eta_real[i], eta_real[d + i])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{BasicBlock, IndexSeed};

    fn counts_zero() -> NormalFormCounts {
        NormalFormCounts {
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
        }
    }

    #[test]
    fn classify_d2_hyperbolic_pair() {
        let m = BasicBlock::d(2.0).unwrap().realize_checked().unwrap();
        let c = classify_spectrum(&m, 1e-6).unwrap();
        let lambdas: Vec<f64> = c
            .clusters
            .iter()
            .map(|cl| match cl.location {
                Location::HyperbolicReal { lambda } => lambda,
                ref other => panic!("unexpected location {other:?}"),
            })
            .collect();
        assert!(lambdas.iter().any(|l| (l - 2.0).abs() < 1e-9));
        assert!(lambdas.iter().any(|l| (l - 0.5).abs() < 1e-9));
    }

    #[test]
    fn classify_rotation_elliptic_pair() {
        let m = BasicBlock::r(Angle::rational(2, 7).unwrap())
            .realize_checked()
            .unwrap();
        let c = classify_spectrum(&m, 1e-6).unwrap();
        assert_eq!(c.floquet_type, FloquetType::Elliptic);
        assert_eq!(c.clusters.len(), 2);
        for cl in &c.clusters {
            match cl.location {
                Location::Elliptic { theta } => {
                    let expect = 2.0 * std::f64::consts::PI * 2.0 / 7.0;
                    assert!(
                        (theta - expect).abs() < 1e-9
                            || (theta - (2.0 * std::f64::consts::PI - expect)).abs() < 1e-9
                    );
                }
                ref other => panic!("unexpected location {other:?}"),
            }
        }
    }

    #[test]
    fn classify_characteristic_seed() {
        let mut c = counts_zero();
        c.p_minus = 1;
        c.r = 3;
        c.theta_list = vec![
            Angle::rational(1, 5).unwrap(),
            Angle::rational(2, 7).unwrap(),
            Angle::rational(3, 11).unwrap(),
        ];
        let seed = IndexSeed::new(4, 0, c).unwrap();
        let m = seed.realize().unwrap();
        let cls = classify_spectrum(&m, 1e-6).unwrap();
        assert_eq!(cls.floquet_type, FloquetType::Elliptic);
        let mult_one: usize = cls
            .clusters
            .iter()
            .filter(|cl| cl.location == Location::UnitOne)
            .map(|cl| cl.multiplicity)
            .sum();
        assert_eq!(mult_one, 2);
    }

    #[test]
    fn extract_identity_is_rejected() {
        let m = SymplecticMatrix::new(DMatrix::identity(2, 2), 1e-9).unwrap();
        match extract_counts(&m, 1e-6) {
            Err(SympathError::NotACharacteristic(msg)) => {
                assert!(msg.contains("kernel dimension 2"), "{msg}");
            }
            other => panic!("expected NotACharacteristic, got {other:?}"),
        }
    }

    #[test]
    fn extract_hyperbolic_budget() {
        let mut c = counts_zero();
        c.p_minus = 1;
        c.s = 3;
        let seed = IndexSeed::new(4, -1, c).unwrap();
        let m = seed.realize().unwrap();
        let ex = extract_counts(&m, 1e-6).unwrap();
        assert_eq!(ex.counts.p_minus, 1);
        assert_eq!(ex.counts.s, 3);
        assert_eq!(ex.counts.r + ex.counts.r_star + ex.counts.r_zero, 0);
        assert_eq!(ex.counts.hyperbolic_tail, HyperbolicTail::AllPositive);
    }

    #[test]
    fn extract_negative_tail() {
        let mut c = counts_zero();
        c.p_minus = 1;
        c.s = 2;
        c.hyperbolic_tail = HyperbolicTail::OneNegative;
        let seed = IndexSeed::new(3, 0, c).unwrap();
        let m = seed.realize().unwrap();
        let ex = extract_counts(&m, 1e-6).unwrap();
        assert_eq!(ex.counts.s, 2);
        assert_eq!(ex.counts.hyperbolic_tail, HyperbolicTail::OneNegative);
    }

    #[test]
    fn extract_rotations_and_sides() {
        let mut c = counts_zero();
        c.p_minus = 1;
        c.r = 2;
        // one angle in (0,π), one in (π,2π)
        c.theta_list = vec![
            Angle::rational(1, 5).unwrap(),
            Angle::rational(5, 7).unwrap(),
        ];
        let seed = IndexSeed::new(3, 1, c).unwrap();
        let m = seed.realize().unwrap();
        let ex = extract_counts(&m, 1e-6).unwrap();
        assert_eq!(ex.counts.r, 2);
        let mut turns: Vec<f64> = ex
            .counts
            .theta_list
            .iter()
            .map(|a| a.turns_f64())
            .collect();
        turns.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((turns[0] - 0.2).abs() < 1e-7, "{turns:?}");
        assert!((turns[1] - 5.0 / 7.0).abs() < 1e-7, "{turns:?}");
    }

    #[test]
    fn extract_n2_triviality() {
        for trivial in [true, false] {
            let mut c = counts_zero();
            c.p_minus = 1;
            if trivial {
                c.r_zero = 1;
                c.beta_list = vec![Angle::rational(1, 6).unwrap()];
            } else {
                c.r_star = 1;
                c.alpha_list = vec![Angle::rational(1, 6).unwrap()];
            }
            let seed = IndexSeed::new(3, 1, c).unwrap();
            let m = seed.realize().unwrap();
            let ex = extract_counts(&m, 1e-6).unwrap();
            if trivial {
                assert_eq!((ex.counts.r_star, ex.counts.r_zero), (0, 1), "trivial");
                assert!((ex.counts.beta_list[0].turns_f64() - 1.0 / 6.0).abs() < 1e-7);
            } else {
                assert_eq!((ex.counts.r_star, ex.counts.r_zero), (1, 0), "nontrivial");
                assert!((ex.counts.alpha_list[0].turns_f64() - 1.0 / 6.0).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn extract_q_blocks() {
        let mut c = counts_zero();
        c.p_minus = 1;
        c.q_minus = 1;
        c.q_zero = 1;
        c.q_plus = 1;
        let seed = IndexSeed::new(4, 0, c).unwrap();
        let m = seed.realize().unwrap();
        let ex = extract_counts(&m, 1e-6).unwrap();
        assert_eq!(
            (ex.counts.q_minus, ex.counts.q_zero, ex.counts.q_plus),
            (1, 1, 1)
        );
    }
}
