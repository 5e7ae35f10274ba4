//! SVD-derived factorizations and Schatten norms.
//!
//! All decompositions route through a single thin SVD so that the polar
//! factor, `|M†|` and the partial isometry on the support of `M` are mutually
//! consistent.

use nalgebra::linalg::SVD;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{HackError, Result};

/// Thin singular value decomposition `A = left · diag(singulars) · right†`.
///
/// `left` is `rows x r`, `right` is `cols x r` with `r = min(rows, cols)`;
/// both have orthonormal columns and singular values are non-increasing.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub left: ComplexMatrix,
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let scaled =
            ComplexMatrix::from_fn(self.left.rows(), self.left.cols(), |i, j| self.left[(i, j)] * self.singulars[j]);
        &scaled * &self.right.adjoint()
    }

    /// Number of singular values above `rel_cutoff · σ_max`.
    pub fn rank(&self, rel_cutoff: f64) -> usize {
        let smax = self.singulars.first().copied().unwrap_or(0.0);
        self.singulars.iter().filter(|&&s| s > rel_cutoff * smax).count()
    }
}

// Tighter than 5·ε makes the bidiagonal sweeps misconverge on rank-deficient
// input (reconstruction error O(‖m‖)).
const SVD_EPS: f64 = 5.0 * f64::EPSILON;

fn max_sweeps(rows: usize, cols: usize) -> usize {
    200 * rows.max(cols) + 1000
}

fn convergence_failure(m: &ComplexMatrix) -> HackError {
    HackError::Numeric(format!(
        "SVD did not converge on a {}x{} matrix (frobenius norm {:.6e}, max |entry| {:.6e})",
        m.rows(),
        m.cols(),
        m.frobenius_norm(),
        m.max_abs()
    ))
}

pub fn svd(m: &ComplexMatrix) -> Result<SvdFactors> {
    let dec = SVD::try_new(m.to_nalgebra(), true, true, SVD_EPS, max_sweeps(m.rows(), m.cols()))
        .ok_or_else(|| convergence_failure(m))?;
    let u = dec.u.as_ref().ok_or_else(|| convergence_failure(m))?;
    let v_t = dec.v_t.as_ref().ok_or_else(|| convergence_failure(m))?;
    let r = dec.singular_values.len();

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));

    let left = ComplexMatrix::from_fn(m.rows(), r, |i, j| u[(i, order[j])]);
    let right = ComplexMatrix::from_fn(m.cols(), r, |i, j| v_t[(order[j], i)].conj());
    let singulars = order.iter().map(|&k| dec.singular_values[k].max(0.0)).collect();
    Ok(SvdFactors { left, singulars, right })
}

/// Singular values only, non-increasing.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let dec = SVD::try_new(m.to_nalgebra(), false, false, SVD_EPS, max_sweeps(m.rows(), m.cols()))
        .ok_or_else(|| convergence_failure(m))?;
    let mut s: Vec<f64> = dec.singular_values.iter().map(|x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Nuclear norm `‖m‖₁`.
pub fn nuclear_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
}

impl TryFrom<f64> for SchattenP {
    type Error = HackError;

    fn try_from(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Self::One)
        } else if p == 2.0 {
            Ok(Self::Two)
        } else {
            Err(HackError::Argument(format!("unsupported Schatten exponent p = {p}; only 1 and 2 are available")))
        }
    }
}

/// Schatten p-norm for p ∈ {1, 2}. The 2-norm is the Frobenius norm taken
/// directly from the entries.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    match SchattenP::try_from(p)? {
        SchattenP::One => nuclear_norm(m),
        SchattenP::Two => Ok(m.frobenius_norm()),
    }
}

/// Unitary `W` with `m = W†·|m|`, so that `Tr(W·m) = ‖m‖₁`.
///
/// On the kernel of `m` the completion comes from the SVD factors: null
/// directions of row and column space are paired in singular-value order.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(HackError::Shape(format!("polar_unitary needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let f = svd(m)?;
    Ok(&f.right * &f.left.adjoint())
}

/// Coisometry `C` (`cols x rows`) maximizing `Re Tr(C·m)` for a tall or square `m`,
/// or isometry for a wide `m`; either way `Tr(C·m) = ‖m‖₁`.
pub fn polar_contraction(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let f = svd(m)?;
    Ok(&f.right * &f.left.adjoint())
}

/// `|m†| = sqrt(m·m†)` together with `|m†|⁻¹·m` restricted to the support of `m`.
#[derive(Clone, Debug)]
pub struct AbsPolarParts {
    pub absdag: ComplexMatrix,
    pub isometry_part: ComplexMatrix,
    /// `Tr|m†| = ‖m‖₁`.
    pub trace_norm: f64,
    pub rank: usize,
}

/// Default relative cutoff used for numerical rank decisions.
pub fn default_cutoff(m: &ComplexMatrix) -> f64 {
    1e-12 * m.rows().max(m.cols()) as f64
}

pub fn abs_polar_parts(m: &ComplexMatrix, rel_cutoff: f64) -> Result<AbsPolarParts> {
    if rel_cutoff.is_nan() || rel_cutoff <= 0.0 {
        return Err(HackError::Argument(format!("rel_cutoff must be positive, got {rel_cutoff}")));
    }
    let f = svd(m)?;
    let smax = f.singulars[0];
    if smax == 0.0 {
        return Err(HackError::Degenerate("all singular values vanish".into()));
    }
    let rank = f.rank(rel_cutoff);
    let (rows, cols) = m.shape();

    let mut absdag = ComplexMatrix::zeros(rows, rows);
    let mut isometry_part = ComplexMatrix::zeros(rows, cols);
    for k in 0..rank {
        let s = f.singulars[k];
        for i in 0..rows {
            let u_ik = f.left[(i, k)];
            if u_ik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..rows {
                absdag[(i, j)] += u_ik * s * f.left[(j, k)].conj();
            }
            for j in 0..cols {
                isometry_part[(i, j)] += u_ik * f.right[(j, k)].conj();
            }
        }
    }
    let trace_norm = f.singulars.iter().sum();
    Ok(AbsPolarParts { absdag, isometry_part, trace_norm, rank })
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(HackError::Shape(format!("psd_sqrt needs a square matrix, got {:?}", h.shape())));
    }
    // For PSD h = V S V†, the SVD coincides with the eigendecomposition.
    let f = svd(h)?;
    let scaled = ComplexMatrix::from_fn(f.left.rows(), f.left.cols(), |i, j| f.left[(i, j)] * f.singulars[j].sqrt());
    Ok(&scaled * &f.left.adjoint())
}
