// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix kernel.
//!
//! All rank, span, square-root and least-squares decisions made elsewhere in
//! the crate go through this module and its [`TolerancePolicy`]. Orthonormal
//! bases are produced with a fixed convention: directions ordered by
//! descending singular value (or eigenvalue), and each column rotated so that
//! its first non-negligible component is real and positive.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Dense complex matrix.
pub type CMat<R> = DMatrix<C<R>>;

/// Thresholds that realize operator equality, order and rank numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy<R> {
    /// Singular values below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: R,
    /// Eigenvalues down to `-psd_tol * ||M||` count as non-negative.
    pub psd_tol: R,
    /// Absolute entrywise bound for operator equalities.
    pub eq_abs_tol: R,
}

impl<R: Real> Default for TolerancePolicy<R> {
    fn default() -> Self {
        Self {
            rank_rel_tol: R::lit(R::RANK_REL_TOL),
            psd_tol: R::lit(R::PSD_TOL),
            eq_abs_tol: R::lit(R::EQ_ABS_TOL),
        }
    }
}

impl<R: Real> TolerancePolicy<R> {
    pub fn new(rank_rel_tol: R, psd_tol: R, eq_abs_tol: R) -> Result<Self> {
        let ok = |t: R| t > R::zero() && t.is_finite();
        if ok(rank_rel_tol) && ok(psd_tol) && ok(eq_abs_tol) {
            Ok(Self {
                rank_rel_tol,
                psd_tol,
                eq_abs_tol,
            })
        } else {
            Err(Error::InvalidTolerance)
        }
    }

    /// Policy with the given equality bound; the other two thresholds keep
    /// their default ratio to it.
    pub fn from_eq_abs_tol(eq_abs_tol: R) -> Result<Self> {
        let d = Self::default();
        let ratio = eq_abs_tol / d.eq_abs_tol;
        Self::new(d.rank_rel_tol * ratio, d.psd_tol * ratio, eq_abs_tol)
    }

    /// Entrywise comparison within `eq_abs_tol`. Shapes must agree.
    pub fn approx_eq(&self, a: &CMat<R>, b: &CMat<R>) -> bool {
        a.shape() == b.shape() && max_abs_diff(a, b) <= self.eq_abs_tol
    }
}

// ---------------------------------------------------------------------------
// small helpers

pub fn zeros<R: Real>(rows: usize, cols: usize) -> CMat<R> {
    CMat::zeros(rows, cols)
}

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    CMat::identity(n, n)
}

/// `rows x cols` matrix unit with a one at 0-based `(i, j)`.
pub fn matrix_unit<R: Real>(rows: usize, cols: usize, i: usize, j: usize) -> CMat<R> {
    let mut e = CMat::zeros(rows, cols);
    e[(i, j)] = C::new(R::one(), R::zero());
    e
}

/// Real matrix lifted to complex entries, from row-major data.
pub fn from_real_rows<R: Real>(rows: usize, cols: usize, data: &[f64]) -> CMat<R> {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| C::new(R::lit(data[i * cols + j]), R::zero()))
}

pub fn scale<R: Real>(m: &CMat<R>, s: R) -> CMat<R> {
    m.map(|z| z * s)
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs<R: Real>(m: &CMat<R>) -> R {
    m.iter().fold(R::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn max_abs_diff<R: Real>(a: &CMat<R>, b: &CMat<R>) -> R {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(R::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

/// Spectral norm (largest singular value).
pub fn op_norm<R: Real>(m: &CMat<R>) -> R {
    if m.is_empty() {
        return R::zero();
    }
    m.clone().singular_values().iter().fold(R::zero(), |acc, s| acc.max(*s))
}

pub fn frobenius<R: Real>(m: &CMat<R>) -> R {
    m.iter().fold(R::zero(), |acc, z| acc + z.modulus_squared()).sqrt()
}

/// Horizontal concatenation. All blocks must have `rows` rows.
pub fn hcat<R: Real>(rows: usize, blocks: &[CMat<R>]) -> CMat<R> {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat row mismatch");
        out.view_mut((0, at), b.shape()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation. All blocks must have `cols` columns.
pub fn vcat<R: Real>(cols: usize, blocks: &[CMat<R>]) -> CMat<R> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vcat column mismatch");
        out.view_mut((at, 0), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Block-diagonal direct sum `a ⊕ b`.
pub fn direct_sum<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Maximum deviation from Hermiticity.
pub fn hermitian_defect<R: Real>(m: &CMat<R>) -> R {
    if m.nrows() != m.ncols() {
        return R::max_value().unwrap_or_else(R::one);
    }
    max_abs_diff(m, &m.adjoint())
}

/// `max(|U*U - I|, |UU* - I|)`; infinite for non-square input.
pub fn unitarity_defect<R: Real>(u: &CMat<R>) -> R {
    if u.nrows() != u.ncols() {
        return R::max_value().unwrap_or_else(R::one);
    }
    let id = identity::<R>(u.nrows());
    max_abs_diff(&(u.adjoint() * u), &id).max(max_abs_diff(&(u * u.adjoint()), &id))
}

fn check_hermitian<R: Real>(m: &CMat<R>, tol: &TolerancePolicy<R>) -> Result<CMat<R>> {
    let defect = hermitian_defect(m);
    if defect > tol.eq_abs_tol {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    Ok((m + m.adjoint()).map(|z| z * R::lit(0.5)))
}

/// Rotate a column so its first non-negligible entry is real positive.
fn fix_phase<R: Real>(m: &mut CMat<R>, col: usize) {
    let mut column = m.column_mut(col);
    let big = column.iter().fold(R::zero(), |acc, z| acc.max(z.modulus()));
    if big == R::zero() {
        return;
    }
    let cut = big * R::lit(1e-6);
    if let Some(z) = column.iter().find(|z| z.modulus() > cut).copied() {
        let phase = z.conj() / C::new(z.modulus(), R::zero());
        column.iter_mut().for_each(|w| *w *= phase);
    }
}

// ---------------------------------------------------------------------------
// decompositions

/// Hermitian eigendecomposition with eigenvalues in descending order.
pub(crate) struct Eigh<R: Real> {
    pub values: Vec<R>,
    pub vectors: CMat<R>,
}

/// Eigendecomposition of the Hermitian part of `m`.
pub(crate) fn eigh<R: Real>(m: &CMat<R>) -> Eigh<R> {
    let n = m.nrows();
    if n == 0 {
        return Eigh {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        };
    }
    let h = (m + m.adjoint()).map(|z| z * R::lit(0.5));
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        fix_phase(&mut vectors, dst);
    }
    Eigh { values, vectors }
}

/// Thin SVD with singular values in descending order.
pub(crate) struct Svd<R: Real> {
    pub u: CMat<R>,
    pub values: Vec<R>,
    pub v_t: CMat<R>,
}

pub(crate) fn svd<R: Real>(m: &CMat<R>) -> Svd<R> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd {
            u: CMat::zeros(r, 0),
            values: Vec::new(),
            v_t: CMat::zeros(0, c),
        };
    }
    let (u_raw, raw_values, v_raw) = R::thin_svd(m);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        raw_values[b]
            .partial_cmp(&raw_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut u = CMat::zeros(r, k);
    let mut v_t = CMat::zeros(k, c);
    let mut values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &u_raw.column(src));
        v_t.set_row(dst, &v_raw.column(src).adjoint());
        values.push(raw_values[src]);
    }
    Svd { u, values, v_t }
}

/// Number of singular values above the relative rank threshold.
fn numerical_rank<R: Real>(values: &[R], tol: &TolerancePolicy<R>) -> usize {
    let top = values.first().copied().unwrap_or_else(R::zero);
    if top <= R::zero() {
        return 0;
    }
    let cut = tol.rank_rel_tol * top;
    values.iter().take_while(|&&s| s > cut).count()
}

/// Numerical rank of the column set of `m`.
pub fn rank<R: Real>(m: &CMat<R>, tol: &TolerancePolicy<R>) -> usize {
    numerical_rank(&svd(m).values, tol)
}

/// Moore-Penrose pseudo-inverse with the policy's rank threshold.
pub fn pinv<R: Real>(m: &CMat<R>, tol: &TolerancePolicy<R>) -> CMat<R> {
    let dec = svd(m);
    let r = numerical_rank(&dec.values, tol);
    let mut out = CMat::zeros(m.ncols(), m.nrows());
    for i in 0..r {
        let inv = C::new(R::one() / dec.values[i], R::zero());
        let v = dec.v_t.row(i).adjoint();
        let u = dec.u.column(i).adjoint();
        out += (v * u) * inv;
    }
    out
}

// ---------------------------------------------------------------------------
// operations

/// Square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-psd_tol * ||M||, 0)` are clamped to zero, as are
/// positive eigenvalues at the roundoff level of the eigensolver.
pub fn hermitian_sqrt<R: Real>(m: &CMat<R>, tol: &TolerancePolicy<R>) -> Result<CMat<R>> {
    psd_function(m, tol, |l| l.sqrt())
}

/// Apply a real function to the spectrum of a Hermitian PSD matrix.
pub(crate) fn psd_function<R: Real>(m: &CMat<R>, tol: &TolerancePolicy<R>, f: impl Fn(R) -> R) -> Result<CMat<R>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let h = check_hermitian(m, tol)?;
    let eig = eigh(&h);
    let norm = eig.values.iter().fold(R::zero(), |acc, l| acc.max(l.abs()));
    if let Some(&low) = eig.values.last() {
        if low < -tol.psd_tol * norm {
            return Err(Error::NotPSD(low.as_f64()));
        }
    }
    // roundoff-level eigenvalues of either sign are zero; otherwise the
    // square root would lift noise of size ε to √ε
    let floor = roundoff_floor::<R>(m.nrows()) * norm;
    Ok(spectral_rebuild(&eig, |l| f(if l <= floor { R::zero() } else { l })))
}

/// Relative size `64 n ε` of eigenvalue noise for an `n × n` matrix.
pub(crate) fn roundoff_floor<R: Real>(n: usize) -> R {
    R::default_epsilon() * R::lit(64.0 * n.max(1) as f64)
}

/// `U diag(f(λ)) U*` from an eigendecomposition.
pub(crate) fn spectral_rebuild<R: Real>(eig: &Eigh<R>, f: impl Fn(R) -> R) -> CMat<R> {
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (j, &l) in eig.values.iter().enumerate() {
        let w = C::new(f(l), R::zero());
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
    }
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    scaled * eig.vectors.adjoint()
}

/// Orthonormal basis (as columns) of the span of the columns of `vectors`.
///
/// Directions are ordered by descending singular value, with the phase
/// convention of this module. A zero-rank input yields a zero-column result.
pub fn orthonormal_span<R: Real>(vectors: &CMat<R>, tol: &TolerancePolicy<R>) -> CMat<R> {
    let n = vectors.nrows();
    let dec = svd(vectors);
    let r = numerical_rank(&dec.values, tol);
    let mut basis = CMat::zeros(n, r);
    for j in 0..r {
        basis.set_column(j, &dec.u.column(j));
        fix_phase(&mut basis, j);
    }
    basis
}

/// Orthogonal projector onto the span of the columns of `vectors`.
pub fn projector_onto_span<R: Real>(vectors: &CMat<R>, tol: &TolerancePolicy<R>) -> CMat<R> {
    let b = orthonormal_span(vectors, tol);
    &b * b.adjoint()
}

/// Result of [`least_squares_intertwiner`].
#[derive(Debug, Clone)]
pub struct Intertwiner<R: Real> {
    /// Minimal-norm least-squares operator.
    pub map: CMat<R>,
    /// `sqrt(Σ_i ||L from_i - to_i||^2)`.
    pub residual: R,
}

/// Minimal-norm `L` minimizing `Σ_i ||L from_i - to_i||²` over paired columns.
///
/// When the correspondence is consistent this is the linear extension of
/// `from_i -> to_i`, vanishing on the orthogonal complement of the span of
/// the `from` columns.
pub fn least_squares_intertwiner<R: Real>(
    from: &CMat<R>,
    to: &CMat<R>,
    tol: &TolerancePolicy<R>,
) -> Result<Intertwiner<R>> {
    if from.ncols() != to.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} source vectors vs {} target vectors",
            from.ncols(),
            to.ncols()
        )));
    }
    let map = to * pinv(from, tol);
    let residual = frobenius(&(&map * from - to));
    Ok(Intertwiner { map, residual })
}

/// Smallest eigenvalue of the Hermitian part (zero for empty matrices).
pub fn min_eigenvalue<R: Real>(m: &CMat<R>) -> R {
    eigh(m).values.last().copied().unwrap_or_else(R::zero)
}

/// Operator order `A ≤ B`: `λ_min(B - A) ≥ -psd_tol * max(||A||, ||B||, 1)`.
pub fn psd_order_leq<R: Real>(a: &CMat<R>, b: &CMat<R>, tol: &TolerancePolicy<R>) -> Result<bool> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "order comparison of {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    check_hermitian(a, tol)?;
    check_hermitian(b, tol)?;
    Ok(psd_margin(a, b) >= -tol.psd_tol * order_scale(a, b))
}

/// `λ_min(B - A)`.
pub(crate) fn psd_margin<R: Real>(a: &CMat<R>, b: &CMat<R>) -> R {
    min_eigenvalue(&(b - a))
}

pub(crate) fn order_scale<R: Real>(a: &CMat<R>, b: &CMat<R>) -> R {
    op_norm(a).max(op_norm(b)).max(R::one())
}

/// Projector onto the eigenvectors of `M` with eigenvalue `≤ rank_rel_tol * ||M||`.
pub fn kernel_projector<R: Real>(m: &CMat<R>, tol: &TolerancePolicy<R>) -> Result<CMat<R>> {
    let h = check_hermitian(m, tol)?;
    let eig = eigh(&h);
    let cut = kernel_cut(&eig.values, tol);
    Ok(spectral_rebuild(&eig, |l| if l <= cut { R::one() } else { R::zero() }))
}

pub(crate) fn kernel_cut<R: Real>(values: &[R], tol: &TolerancePolicy<R>) -> R {
    let norm = values.iter().fold(R::zero(), |acc, l| acc.max(l.abs()));
    tol.rank_rel_tol * norm
}

/// Factorization `G = F* F` of a PSD Gram matrix with `F` of full row rank.
///
/// The rows of `factor` realize the range of `G` (the quotient by its null
/// space); `pinv` is the right inverse `F⁺` with `F F⁺ = I`.
#[derive(Debug, Clone)]
pub struct GramFactor<R: Real> {
    pub factor: CMat<R>,
    pub pinv: CMat<R>,
}

impl<R: Real> GramFactor<R> {
    pub fn rank(&self) -> usize {
        self.factor.nrows()
    }
}

/// Factor a PSD Gram matrix. Eigenvalues at most `rank_rel_tol * λ_max`
/// are treated as the null space.
pub fn gram_factor<R: Real>(g: &CMat<R>, tol: &TolerancePolicy<R>) -> Result<GramFactor<R>> {
    let h = check_hermitian(g, tol)?;
    let eig = eigh(&h);
    let top = eig.values.first().copied().unwrap_or_else(R::zero);
    if let Some(&low) = eig.values.last() {
        if low < -tol.psd_tol * top.abs().max(low.abs()) {
            return Err(Error::NotPSD(low.as_f64()));
        }
    }
    let cut = tol.rank_rel_tol * top;
    let r = if top > R::zero() {
        eig.values.iter().take_while(|&&l| l > cut).count()
    } else {
        0
    };
    let n = g.nrows();
    let mut factor = CMat::zeros(r, n);
    let mut pinv = CMat::zeros(n, r);
    for j in 0..r {
        let s = eig.values[j].sqrt();
        let col = eig.vectors.column(j);
        pinv.set_column(j, &(col * C::new(R::one() / s, R::zero())));
        factor.set_row(j, &(col.adjoint() * C::new(s, R::zero())));
    }
    Ok(GramFactor { factor, pinv })
}

/// Orthonormal basis of the common null space of a family of linear maps on
/// `C^n`, each given as a coefficient block with `n` columns.
///
/// Blocks are absorbed one at a time: the current basis `N` is replaced by
/// `N Z`, with `Z` spanning the null space of `block * N`. A singular value
/// counts as zero when it is at most `rank_rel_tol * scale`, where `scale`
/// is the largest block Frobenius norm.
pub fn common_null_space<R: Real>(n: usize, blocks: &[CMat<R>], tol: &TolerancePolicy<R>) -> CMat<R> {
    let scale = blocks.iter().fold(R::zero(), |acc, b| acc.max(frobenius(b)));
    let mut basis = identity::<R>(n);
    if scale == R::zero() {
        return basis;
    }
    let cut = tol.rank_rel_tol * scale;
    for block in blocks {
        assert_eq!(block.ncols(), n, "constraint block width");
        let width = basis.ncols();
        if width == 0 {
            break;
        }
        let reduced = block * &basis;
        // pad to at least square so the SVD exposes the full right basis
        let reduced = if reduced.nrows() < width {
            vcat(width, &[reduced.clone(), zeros(width - reduced.nrows(), width)])
        } else {
            reduced
        };
        let dec = svd(&reduced);
        let keep: Vec<usize> = (0..width).filter(|&i| dec.values[i] <= cut).collect();
        if keep.len() == width {
            continue;
        }
        let mut z = CMat::zeros(width, keep.len());
        for (dst, &src) in keep.iter().enumerate() {
            z.set_column(dst, &dec.v_t.row(src).adjoint());
        }
        basis = &basis * z;
    }
    for j in 0..basis.ncols() {
        fix_phase(&mut basis, j);
    }
    basis
}

/// Kronecker product.
pub fn kron<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMat<f64>;

    fn tol() -> TolerancePolicy<f64> {
        TolerancePolicy::default()
    }

    #[test]
    fn svd_recomposes_rank_deficient_products() {
        use crate::oracle::{gaussian_matrix, rng};
        for seed in 0..4000u64 {
            let mut g = rng(seed);
            let s = seed as usize;
            let (r, c, k) = (1 + s % 7, 1 + (s / 7) % 7, 1 + (s / 49) % 4);
            let a: M = gaussian_matrix(&mut g, r, k);
            let b: M = gaussian_matrix(&mut g, k, c);
            let m = &a * &b;
            let d = svd(&m);
            let sigma = M::from_diagonal(&nalgebra::DVector::from_iterator(
                d.values.len(),
                d.values.iter().map(|&x| C::new(x, 0.0)),
            ));
            let back = &d.u * sigma * &d.v_t;
            assert!(max_abs_diff(&back, &m) <= 1e-12 * op_norm(&m).max(1.0), "seed {seed}");
            assert!(d.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    fn diag(v: &[f64]) -> M {
        let n = v.len();
        M::from_fn(n, n, |i, j| if i == j { C::new(v[i], 0.0) } else { C::new(0.0, 0.0) })
    }

    fn col(v: &[f64]) -> M {
        from_real_rows(v.len(), 1, v)
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let r = hermitian_sqrt(&identity::<f64>(3), &tol()).unwrap();
        assert!(max_abs_diff(&r, &identity(3)) < 1e-14);
        let r = hermitian_sqrt(&diag(&[4.0, 9.0]), &tol()).unwrap();
        assert!(max_abs_diff(&r, &diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_non_hermitian_and_negative() {
        let m = from_real_rows::<f64>(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(hermitian_sqrt(&m, &tol()), Err(Error::NotHermitian(_))));
        assert!(matches!(
            hermitian_sqrt(&diag(&[1.0, -0.5]), &tol()),
            Err(Error::NotPSD(_))
        ));
    }

    #[test]
    fn sqrt_clamps_roundoff_negatives() {
        let r = hermitian_sqrt(&diag(&[1.0, -1e-13]), &tol()).unwrap();
        assert!(max_abs_diff(&r, &diag(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn span_of_zero_vector_is_empty() {
        let b = orthonormal_span(&col(&[0.0, 0.0, 0.0]), &tol());
        assert_eq!(b.shape(), (3, 0));
        assert_eq!(projector_onto_span(&col(&[0.0, 0.0]), &tol()), zeros::<f64>(2, 2));
    }

    #[test]
    fn span_drops_duplicated_direction() {
        let v = from_real_rows::<f64>(3, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let b = orthonormal_span(&v, &tol());
        assert_eq!(b.ncols(), 2);
        let p = &b * b.adjoint();
        assert!(max_abs_diff(&p, &diag(&[1.0, 1.0, 0.0])) < 1e-14);
        // phase convention
        for j in 0..b.ncols() {
            let first = b.column(j).iter().find(|z| z.norm() > 1e-6).copied().unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn projector_examples() {
        let p = projector_onto_span(&col(&[1.0, 0.0]), &tol());
        assert!(max_abs_diff(&p, &diag(&[1.0, 0.0])) < 1e-15);
        let full = from_real_rows::<f64>(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        assert!(max_abs_diff(&projector_onto_span(&full, &tol()), &identity(2)) < 1e-14);
    }

    #[test]
    fn intertwiner_examples() {
        let e = identity::<f64>(2);
        let lsq = least_squares_intertwiner(&e, &e, &tol()).unwrap();
        assert!(max_abs_diff(&lsq.map, &e) < 1e-14 && lsq.residual < 1e-14);

        let lsq = least_squares_intertwiner(&col(&[1.0, 0.0]), &col(&[2.0, 0.0]), &tol()).unwrap();
        assert!(max_abs_diff(&lsq.map, &diag(&[2.0, 0.0])) < 1e-14);

        // from {e1, e1} to {e1, e2}: normal equations give L e1 = (e1 + e2)/2,
        // L e2 = 0, total squared residual 1/4 + 1/4 + 1/4 + 1/4 = 1.
        let from = from_real_rows::<f64>(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let lsq = least_squares_intertwiner(&from, &e, &tol()).unwrap();
        assert!(max_abs_diff(&lsq.map, &from_real_rows(2, 2, &[0.5, 0.0, 0.5, 0.0])) < 1e-14);
        assert!((lsq.residual - 1.0).abs() < 1e-14);

        assert!(matches!(
            least_squares_intertwiner(&e, &col(&[1.0, 0.0]), &tol()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn order_examples() {
        let z = zeros::<f64>(2, 2);
        let i = identity::<f64>(2);
        assert!(psd_order_leq(&z, &i, &tol()).unwrap());
        assert!(!psd_order_leq(&i, &scale(&i, 0.5), &tol()).unwrap());
        let bad = from_real_rows::<f64>(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(psd_order_leq(&bad, &i, &tol()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn kernel_projector_examples() {
        assert!(max_abs_diff(&kernel_projector(&zeros::<f64>(3, 3), &tol()).unwrap(), &identity(3)) < 1e-15);
        assert!(max_abs(&kernel_projector(&identity::<f64>(3), &tol()).unwrap()) < 1e-15);
        let k = kernel_projector(&diag(&[1.0, 0.0, 3.0]), &tol()).unwrap();
        assert!(max_abs_diff(&k, &diag(&[0.0, 1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn gram_factor_reproduces_gram() {
        let b = M::from_fn(2, 4, |i, j| C::new((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        let g = b.adjoint() * &b;
        let f = gram_factor(&g, &tol()).unwrap();
        assert_eq!(f.rank(), 2);
        assert!(max_abs_diff(&(f.factor.adjoint() * &f.factor), &g) < 1e-12);
        assert!(max_abs_diff(&(&f.factor * &f.pinv), &identity(2)) < 1e-12);
        let empty = gram_factor(&zeros::<f64>(3, 3), &tol()).unwrap();
        assert_eq!(empty.factor.shape(), (0, 3));
    }

    #[test]
    fn null_space_of_commuting_constraint() {
        // X commuting with diag(1, 2): null space is the diagonal matrices
        let d = diag(&[1.0, 2.0]);
        let i2 = identity::<f64>(2);
        let block = kron(&i2, &d) - kron(&d.transpose(), &i2);
        let n = common_null_space(4, &[block], &tol());
        assert_eq!(n.ncols(), 2);
    }

    #[test]
    fn tolerance_policy_validation() {
        assert!(TolerancePolicy::new(0.0, 1e-9, 1e-8).is_err());
        assert!(TolerancePolicy::new(1e-9, f64::NAN, 1e-8).is_err());
        let t = TolerancePolicy::<f64>::from_eq_abs_tol(1e-6).unwrap();
        assert!((t.rank_rel_tol - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn single_precision_kernel() {
        let r = hermitian_sqrt(
            &(CMat::<f32>::identity(2, 2) * C::new(4.0f32, 0.0)),
            &TolerancePolicy::default(),
        )
        .unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-5);
    }
}
