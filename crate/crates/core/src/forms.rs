//! Basic symplectic normal forms and their assembly.
//!
//! The building blocks are the 2×2 matrices `N₁(λ,b)`, `D(λ)`, `R(θ)` and
//! the 4×4 blocks `N₂(e^{iθ},B)`, combined with the ⋄-sum (the symplectic
//! direct sum with interleaved block layout). A full normal form is
//! described by [`NormalFormCounts`] plus angle lists, and an [`IndexSeed`]
//! couples those invariants with the base index `i(γ,1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Result, SympathError};

/// Symplecticity tolerance for matrices assembled from exact blocks.
pub const EPS_SYM_ASSEMBLED: f64 = 1e-9;
/// Symplecticity tolerance for user-supplied matrices.
pub const EPS_SYM_USER: f64 = 1e-6;

/// The standard symplectic structure `J = [[0, -I], [I, 0]]`.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// `‖MᵀJM − J‖_max`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let j = standard_j(n);
    let r = m.transpose() * &j * m - j;
    r.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// True iff `M` is square of even dimension and `‖MᵀJM − J‖_max ≤ tol`.
pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return false;
    }
    symplectic_residual(m) <= tol
}

/// ⋄-sum of two even-dimensional square matrices.
///
/// For `A = [[A₁,B₁],[C₁,D₁]]` (2i×2i) and `B = [[A₂,B₂],[C₂,D₂]]` (2j×2j)
/// the result is the 2(i+j)-dimensional matrix
/// `[[A₁,0,B₁,0],[0,A₂,0,B₂],[C₁,0,D₁,0],[0,C₂,0,D₂]]`.
pub fn diamond_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    for (m, name) in [(a, "left"), (b, "right")] {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
            return Err(SympathError::Dimension(format!(
                "{name} operand of ⋄ must be even-dimensional square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let i = a.nrows() / 2;
    let j = b.nrows() / 2;
    let n = i + j;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    // quadrant offsets: row/col block = [0..i | i..i+j] × [A | B sections]
    for (bi, bj, sr, sc) in [
        (0, 0, 0, 0),
        (0, 1, 0, n),
        (1, 0, n, 0),
        (1, 1, n, n),
    ] {
        for r in 0..i {
            for c in 0..i {
                out[(sr + r, sc + c)] = a[(bi * i + r, bj * i + c)];
            }
        }
        for r in 0..j {
            for c in 0..j {
                out[(sr + i + r, sc + i + c)] = b[(bi * j + r, bj * j + c)];
            }
        }
    }
    Ok(out)
}

/// Folds a list of blocks with [`diamond_sum`].
pub fn diamond_fold(blocks: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let mut it = blocks.iter();
    let first = it
        .next()
        .ok_or_else(|| SympathError::Dimension("empty ⋄-sum".into()))?;
    let mut acc = first.clone();
    for b in it {
        acc = diamond_sum(&acc, b)?;
    }
    Ok(acc)
}

/// A validated symplectic matrix with its half-dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    mat: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() % 2 != 0 || mat.nrows() == 0 {
            return Err(SympathError::Dimension(format!(
                "symplectic matrix must be even square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let res = symplectic_residual(&mat);
        if res > tol {
            return Err(SympathError::Domain(format!(
                "‖MᵀJM − J‖_max = {res:.3e} exceeds tolerance {tol:.1e}"
            )));
        }
        // det M = 1 is a consequence; checked independently with a looser,
        // dimension-aware bound.
        let det = mat.determinant();
        if (det - 1.0).abs() > 1e4 * tol.max(1e-12) * (1.0 + mat.norm()) {
            return Err(SympathError::Domain(format!(
                "det M = {det} is not 1 within tolerance"
            )));
        }
        Ok(SymplecticMatrix {
            n: mat.nrows() / 2,
            mat,
        })
    }

    pub fn dim_half(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.mat
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for SymplecticMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = (0..self.mat.nrows())
            .map(|r| (0..self.mat.ncols()).map(|c| self.mat[(r, c)]).collect())
            .collect();
        MatrixJson { n: self.n, rows }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SymplecticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = MatrixJson::deserialize(de)?;
        let dim = 2 * j.n;
        if j.rows.len() != dim || j.rows.iter().any(|r| r.len() != dim) {
            return Err(D::Error::custom(format!(
                "matrix must be {dim}x{dim} for n = {}",
                j.n
            )));
        }
        let mat = DMatrix::from_fn(dim, dim, |r, c| j.rows[r][c]);
        SymplecticMatrix::new(mat, EPS_SYM_USER).map_err(D::Error::custom)
    }
}

/// N₂ block classification by the sign of `(b₂-b₃)·sinθ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Triviality {
    Trivial,
    Nontrivial,
}

/// Sign test `(b₂-b₃)sinθ > 0 → trivial`, `< 0 → nontrivial`.
pub fn triviality_sign(b: &[[f64; 2]; 2], theta: &Angle) -> Result<Triviality> {
    let diff = b[0][1] - b[1][0];
    if diff == 0.0 {
        return Err(SympathError::Domain("N₂ requires b₂ ≠ b₃".into()));
    }
    let s = theta.radians_f64().sin();
    if s == 0.0 {
        return Err(SympathError::Domain("sin θ = 0 is excluded for N₂".into()));
    }
    if diff * s > 0.0 {
        Ok(Triviality::Trivial)
    } else {
        Ok(Triviality::Nontrivial)
    }
}

/// Canonical `B` realizing the requested triviality for an N₂ block:
/// `b₂ = t`, `b₃ = -t`, `b₁ = b₄ = -t·cotθ` with `t = ±1`, which satisfies
/// the symplectic compatibility `(b₂-b₃)cosθ + (b₁+b₄)sinθ = 0`.
pub fn canonical_n2_b(theta: &Angle, trivial: bool) -> [[f64; 2]; 2] {
    let th = theta.radians_f64();
    let s = th.sin();
    let t = if trivial { s.signum() } else { -s.signum() };
    let diag = -t * th.cos() / s;
    [[diag, t], [-t, diag]]
}

/// One basic normal-form block.
#[derive(Clone, Debug, PartialEq)]
pub enum BasicBlock {
    /// `N₁(λ,b) = [[λ,b],[0,λ]]`, λ = ±1.
    N1 { lambda: i8, b: f64 },
    /// `D(λ) = diag(λ, 1/λ)`, |λ| ∉ {0,1}.
    D { lambda: f64 },
    /// Planar rotation `R(θ)`.
    R { theta: Angle },
    /// `N₂(e^{iθ},B) = [[R(θ),B],[0,R(θ)]]` with `b₂ ≠ b₃`.
    N2 {
        theta: Angle,
        b: [[f64; 2]; 2],
        trivial: bool,
    },
}

impl BasicBlock {
    pub fn n1(lambda: i8, b: f64) -> Result<Self> {
        if lambda != 1 && lambda != -1 {
            return Err(SympathError::Domain(format!(
                "N₁ requires λ = ±1, got {lambda}"
            )));
        }
        Ok(BasicBlock::N1 { lambda, b })
    }

    pub fn d(lambda: f64) -> Result<Self> {
        if lambda == 0.0 || lambda == 1.0 || lambda == -1.0 || !lambda.is_finite() {
            return Err(SympathError::Domain(format!(
                "D(λ) requires λ ∉ {{0, ±1}}, got {lambda}"
            )));
        }
        Ok(BasicBlock::D { lambda })
    }

    pub fn r(theta: Angle) -> Self {
        BasicBlock::R { theta }
    }

    /// N₂ block; the declared triviality must match the sign invariant and
    /// `B` must be compatible with the symplectic structure.
    pub fn n2(theta: Angle, b: [[f64; 2]; 2], trivial: bool) -> Result<Self> {
        let sign = triviality_sign(&b, &theta)?;
        let declared = if trivial {
            Triviality::Trivial
        } else {
            Triviality::Nontrivial
        };
        if sign != declared {
            return Err(SympathError::Domain(format!(
                "declared {declared:?} N₂ but (b₂-b₃)sinθ sign says {sign:?}"
            )));
        }
        let th = theta.radians_f64();
        let compat = (b[0][1] - b[1][0]) * th.cos() + (b[0][0] + b[1][1]) * th.sin();
        if compat.abs() > 1e-9 {
            return Err(SympathError::Domain(format!(
                "B is not symplectically compatible: (b₂-b₃)cosθ + (b₁+b₄)sinθ = {compat:.3e}"
            )));
        }
        Ok(BasicBlock::N2 { theta, b, trivial })
    }

    /// N₂ block with the canonical `B` for the requested triviality.
    pub fn n2_canonical(theta: Angle, trivial: bool) -> Result<Self> {
        let b = canonical_n2_b(&theta, trivial);
        Self::n2(theta, b, trivial)
    }

    pub fn dim_half(&self) -> usize {
        match self {
            BasicBlock::N2 { .. } => 2,
            _ => 1,
        }
    }

    /// The literal block matrix.
    pub fn realize(&self) -> DMatrix<f64> {
        match self {
            BasicBlock::N1 { lambda, b } => {
                let l = f64::from(*lambda);
                DMatrix::from_row_slice(2, 2, &[l, *b, 0.0, l])
            }
            BasicBlock::D { lambda } => {
                DMatrix::from_row_slice(2, 2, &[*lambda, 0.0, 0.0, 1.0 / *lambda])
            }
            BasicBlock::R { theta } => rotation2(theta.radians_f64()),
            BasicBlock::N2 { theta, b, .. } => {
                let th = theta.radians_f64();
                let (s, c) = th.sin_cos();
                DMatrix::from_row_slice(
                    4,
                    4,
                    &[
                        c, -s, b[0][0], b[0][1], //
                        s, c, b[1][0], b[1][1], //
                        0.0, 0.0, c, -s, //
                        0.0, 0.0, s, c,
                    ],
                )
            }
        }
    }

    /// `realize` wrapped in the validated type.
    pub fn realize_checked(&self) -> Result<SymplecticMatrix> {
        SymplecticMatrix::new(self.realize(), EPS_SYM_ASSEMBLED)
    }
}

pub fn rotation2(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Which variant of the hyperbolic tail `M_s` a seed uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicTail {
    /// `M_s = D(2)^{⋄s}`
    AllPositive,
    /// `M_s = D(-2) ⋄ D(2)^{⋄(s-1)}`, requires `s ≥ 1`
    OneNegative,
}

impl Default for HyperbolicTail {
    fn default() -> Self {
        HyperbolicTail::AllPositive
    }
}

/// The integer invariants of a normal form plus its angle lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormCounts {
    pub p_minus: u32,
    pub p_zero: u32,
    pub p_plus: u32,
    pub q_minus: u32,
    pub q_zero: u32,
    pub q_plus: u32,
    pub r: u32,
    pub r_star: u32,
    pub r_zero: u32,
    pub s: u32,
    #[serde(default)]
    pub hyperbolic_tail: HyperbolicTail,
    /// angles of the `R(θ)` blocks
    pub theta_list: Vec<Angle>,
    /// angles of the non-trivial N₂ blocks
    pub alpha_list: Vec<Angle>,
    /// angles of the trivial N₂ blocks
    pub beta_list: Vec<Angle>,
}

impl NormalFormCounts {
    pub fn validate(&self) -> Result<()> {
        if self.theta_list.len() != self.r as usize {
            return Err(SympathError::InconsistentSeed(format!(
                "theta_list has {} angles but r = {}",
                self.theta_list.len(),
                self.r
            )));
        }
        if self.alpha_list.len() != self.r_star as usize {
            return Err(SympathError::InconsistentSeed(format!(
                "alpha_list has {} angles but r_star = {}",
                self.alpha_list.len(),
                self.r_star
            )));
        }
        if self.beta_list.len() != self.r_zero as usize {
            return Err(SympathError::InconsistentSeed(format!(
                "beta_list has {} angles but r_zero = {}",
                self.beta_list.len(),
                self.r_zero
            )));
        }
        if self.hyperbolic_tail == HyperbolicTail::OneNegative && self.s == 0 {
            return Err(SympathError::InconsistentSeed(
                "D(-2) tail variant requires s ≥ 1".into(),
            ));
        }
        Ok(())
    }

    /// Left-hand side of the dimension budget:
    /// `p₋+p₀+p₊+q₋+q₀+q₊+r+2r*+2r₀+s`.
    pub fn half_dim_sum(&self) -> u32 {
        self.p_minus
            + self.p_zero
            + self.p_plus
            + self.q_minus
            + self.q_zero
            + self.q_plus
            + self.r
            + 2 * self.r_star
            + 2 * self.r_zero
            + self.s
    }

    /// Number of blocks forcing odd parity of `i(γ,1)`:
    /// N₁(1,1), I₂, N₁(-1,±1), -I₂ and R(θ). N₁(1,-1) and N₂ are even.
    pub fn odd_block_count(&self) -> u32 {
        self.p_minus + self.p_zero + self.q_minus + self.q_zero + self.q_plus + self.r
    }

    /// `ν(γ,1) = p₋ + 2p₀ + p₊`, the eigenvalue-1 kernel dimension.
    pub fn nu_one(&self) -> u32 {
        self.p_minus + 2 * self.p_zero + self.p_plus
    }

    /// All blocks in the canonical display order.
    pub fn blocks(&self) -> Result<Vec<BasicBlock>> {
        self.validate()?;
        let mut out = Vec::new();
        for _ in 0..self.p_minus {
            out.push(BasicBlock::n1(1, 1.0)?);
        }
        for _ in 0..self.p_zero {
            // I₂ is realized via N₁(1,0); it is listed separately in the
            // normal form but is the same matrix.
            out.push(BasicBlock::n1(1, 0.0)?);
        }
        for _ in 0..self.p_plus {
            out.push(BasicBlock::n1(1, -1.0)?);
        }
        for _ in 0..self.q_minus {
            out.push(BasicBlock::n1(-1, 1.0)?);
        }
        for _ in 0..self.q_zero {
            out.push(BasicBlock::n1(-1, 0.0)?);
        }
        for _ in 0..self.q_plus {
            out.push(BasicBlock::n1(-1, -1.0)?);
        }
        for theta in &self.theta_list {
            out.push(BasicBlock::r(theta.clone()));
        }
        for alpha in &self.alpha_list {
            out.push(BasicBlock::n2_canonical(alpha.clone(), false)?);
        }
        for beta in &self.beta_list {
            out.push(BasicBlock::n2_canonical(beta.clone(), true)?);
        }
        for k in 0..self.s {
            let lambda = if k == 0 && self.hyperbolic_tail == HyperbolicTail::OneNegative {
                -2.0
            } else {
                2.0
            };
            out.push(BasicBlock::d(lambda)?);
        }
        Ok(out)
    }
}

/// Everything the iteration formulas need: half-dimension `n`, the base
/// index `i(γ,1)` and the normal-form invariants.
///
/// The JSON schema is flat: `n`, `i1`, and the `NormalFormCounts` fields
/// side by side. Deserialization re-validates the budget and parity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexSeed {
    pub n: u32,
    pub i1: i64,
    #[serde(flatten)]
    pub counts: NormalFormCounts,
}

impl<'de> Deserialize<'de> for IndexSeed {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct SeedJson {
            n: u32,
            i1: i64,
            #[serde(flatten)]
            counts: NormalFormCounts,
        }
        let raw = SeedJson::deserialize(de)?;
        IndexSeed::new(raw.n, raw.i1, raw.counts).map_err(D::Error::custom)
    }
}

impl IndexSeed {
    pub fn new(n: u32, i1: i64, counts: NormalFormCounts) -> Result<Self> {
        counts.validate()?;
        if counts.half_dim_sum() != n {
            return Err(SympathError::InconsistentSeed(format!(
                "block budget {} ≠ n = {n}",
                counts.half_dim_sum()
            )));
        }
        if counts.s == 0 {
            let parity = i64::from(counts.odd_block_count() % 2);
            if i1.rem_euclid(2) != parity {
                return Err(SympathError::InconsistentSeed(format!(
                    "i(γ,1) = {i1} has the wrong parity for this block multiset \
                     (expected parity {parity})"
                )));
            }
        }
        Ok(IndexSeed { n, i1, counts })
    }

    /// `ν(γ,1)`, derived from the counts (never user-supplied).
    pub fn nu_one(&self) -> u32 {
        self.counts.nu_one()
    }

    /// ⋄-sum of all blocks in canonical order.
    pub fn realize(&self) -> Result<SymplecticMatrix> {
        let blocks = self.counts.blocks()?;
        let mats: Vec<DMatrix<f64>> = blocks.iter().map(|b| b.realize()).collect();
        let total = diamond_fold(&mats)?;
        if total.nrows() != 2 * self.n as usize {
            return Err(SympathError::InconsistentSeed(format!(
                "assembled dimension {} ≠ 2n = {}",
                total.nrows(),
                2 * self.n
            )));
        }
        SymplecticMatrix::new(total, EPS_SYM_ASSEMBLED)
    }
}

/// Realizes a seed's normal form (the `realize_seed` operation).
pub fn realize_seed(seed: &IndexSeed) -> Result<SymplecticMatrix> {
    seed.realize()
}
