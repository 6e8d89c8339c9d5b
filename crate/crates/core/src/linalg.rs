//! Dense complex linear algebra used throughout the crate: sorted SVDs,
//! numerical rank decisions with gap reporting, null spaces, characteristic
//! polynomials and hermitian exponentials.
//!
//! Every routine accepts zero-sized matrices; empty dimensions show up
//! naturally (a datum with `c' = 0`, a quotient with `c'' = 0`).

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative singular-value cut used for every rank decision unless a caller
/// overrides it.
pub const DEFAULT_RTOL: f64 = 1e-9;

/// Minimum accepted ratio between the last kept and the first discarded
/// singular value.
pub const MIN_GAP_RATIO: f64 = 1e3;

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_sqr(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|k| m[(k, k)]).sum()
}

/// Column-major flattening.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize(rows: usize, cols: usize, data: &[C64]) -> CMat {
    CMat::from_column_slice(rows, cols, data)
}

/// Serializes non-finite floats (infinite gap ratios) as `null`.
pub fn serialize_finite<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// Outcome of a numerical rank decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankDecision {
    pub rank: usize,
    /// Singular values at or below this value count as zero.
    pub threshold: f64,
    pub sigma_max: f64,
    /// `σ_rank / σ_{rank+1}`; when nothing is discarded the denominator is the
    /// threshold itself. Infinite when the discarded values are exact zeros.
    #[serde(serialize_with = "serialize_finite")]
    pub gap_ratio: f64,
}

impl RankDecision {
    pub fn is_reliable(&self) -> bool {
        self.gap_ratio >= MIN_GAP_RATIO
    }
}

pub fn decide_rank(sigma: &[f64], rows: usize, cols: usize, rtol: f64) -> RankDecision {
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let threshold = rtol * sigma_max * rows.max(cols) as f64;
    let rank = sigma.iter().take_while(|&&s| s > threshold).count();
    let gap_ratio = if rank == 0 {
        f64::INFINITY
    } else {
        let kept = sigma[rank - 1];
        let next = if rank < sigma.len() { sigma[rank] } else { threshold };
        if next > 0.0 {
            kept / next
        } else {
            f64::INFINITY
        }
    };
    RankDecision {
        rank,
        threshold,
        sigma_max,
        gap_ratio,
    }
}

/// Thin SVD with singular values sorted in decreasing order:
/// `m = u · diag(sigma) · v^†` with `u: rows×k`, `v: cols×k`, `k = min(rows, cols)`.
pub fn svd_sorted(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return (zeros(rows, 0), Vec::new(), zeros(cols, 0));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v = svd.v_t.expect("right vectors requested").adjoint();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMat::from_fn(rows, k, |r, j| u[(r, order[j])]);
    let v = CMat::from_fn(cols, k, |r, j| v[(r, order[j])]);
    (u, sigma, v)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rank(m: &CMat, rtol: f64) -> RankDecision {
    decide_rank(&singular_values(m), m.nrows(), m.ncols(), rtol)
}

/// Full set of right singular vectors (`cols×cols`, unitary) together with the
/// `min(rows, cols)` genuine singular values.
fn right_vectors_full(m: &CMat) -> (Vec<f64>, CMat) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    if rows == 0 {
        return (Vec::new(), eye(cols));
    }
    if rows >= cols {
        let (_, s, v) = svd_sorted(m);
        (s, v)
    } else {
        let mut padded = zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        let (_, mut s, v) = svd_sorted(&padded);
        s.truncate(rows);
        (s, v)
    }
}

/// Orthonormal basis of the numerical null space, as columns.
pub fn null_space(m: &CMat, rtol: f64) -> (CMat, RankDecision) {
    let (rows, cols) = m.shape();
    let (sigma, v) = right_vectors_full(m);
    let decision = decide_rank(&sigma, rows, cols, rtol);
    let basis = v.columns(decision.rank, cols - decision.rank).into_owned();
    (basis, decision)
}

/// Null space with an absolute singular-value cut.
pub fn null_space_abs(m: &CMat, cut: f64) -> CMat {
    let (sigma, v) = right_vectors_full(m);
    let keep = sigma.iter().filter(|&&s| s > cut).count();
    v.columns(keep, m.ncols() - keep).into_owned()
}

/// Orthonormal basis of the numerical column space, as columns.
pub fn column_space(m: &CMat, rtol: f64) -> (CMat, RankDecision) {
    let (u, sigma, _) = svd_sorted(m);
    let decision = decide_rank(&sigma, m.nrows(), m.ncols(), rtol);
    (u.columns(0, decision.rank).into_owned(), decision)
}

/// Orthonormal basis of the orthogonal complement of the column space.
pub fn column_complement(m: &CMat, rtol: f64) -> (CMat, RankDecision) {
    null_space(&m.adjoint(), rtol)
}

/// Reciprocal 2-norm condition number of a square matrix (0 for singular).
pub fn rcond(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        (None, None) => 1.0,
        _ => 0.0,
    }
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    if m.nrows() == 0 {
        return Some(zeros(0, 0));
    }
    m.clone().try_inverse()
}

pub fn determinant(m: &CMat) -> C64 {
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.determinant()
}

/// Coefficients of `det(λ·1 − m)` in decreasing degree, leading 1 included
/// (Faddeev–LeVerrier recursion).
pub fn char_poly(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    let mut mk = zeros(n, n);
    let id = eye(n);
    let mut last = C64::new(1.0, 0.0);
    for k in 1..=n {
        mk = m * &mk + &id * last;
        let am = m * &mk;
        last = -trace(&am) / k as f64;
        coeffs.push(last);
    }
    coeffs
}

/// `exp(t·h)` for hermitian `h`, via its spectral decomposition.
pub fn hermitian_exp(h: &CMat, t: f64) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let q = &eig.eigenvectors;
    let d = CMat::from_diagonal(&DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| C64::new((t * l).exp(), 0.0)),
    ));
    q * d * q.adjoint()
}

/// Largest absolute eigenvalue of a hermitian matrix.
pub fn hermitian_spectral_norm(h: &CMat) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, l| acc.max(l.abs()))
}

/// Complex Schur form `m = q · t · q^†` with `t` upper triangular.
pub fn schur(m: &CMat) -> (CMat, CMat) {
    if m.nrows() == 0 {
        return (zeros(0, 0), zeros(0, 0));
    }
    Schur::new(m.clone()).unpack()
}

/// Frobenius mass strictly below the diagonal.
pub fn lower_mass(m: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in (j + 1)..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Matrix of a linear map `C^cols -> C^rows` given by its action on the
/// standard basis.
pub fn linear_map_matrix(rows: usize, cols: usize, mut f: impl FnMut(&[C64]) -> CVec) -> CMat {
    let mut m = zeros(rows, cols);
    let mut e = vec![C64::new(0.0, 0.0); cols];
    for k in 0..cols {
        e[k] = C64::new(1.0, 0.0);
        let col = f(&e);
        assert_eq!(col.len(), rows, "linear map returned a vector of the wrong length");
        m.set_column(k, &col);
        e[k] = C64::new(0.0, 0.0);
    }
    m
}

/// Stacks matrices with equal row counts side by side.
pub fn hstack(blocks: &[&CMat]) -> CMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Stacks matrices with equal column counts on top of each other.
pub fn vstack(blocks: &[&CMat]) -> CMat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}
