// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Real scalar abstraction.
//!
//! Every matrix in the crate has entries in `Complex<R>` for a real field `R`.
//! `f64` is the working precision; `f32` is supported with looser default
//! tolerances.

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real field the complex matrix kernel is built over: `f32` or `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default + Send + Sync + 'static {
    /// Default relative rank threshold (fraction of the largest singular value).
    const RANK_REL_TOL: f64;
    /// Default PSD slack (fraction of the operator norm).
    const PSD_TOL: f64;
    /// Default absolute entrywise equality bound.
    const EQ_ABS_TOL: f64;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Thin SVD `m = U diag(s) V*` with `min(rows, cols)` columns in `U` and `V`.
    #[doc(hidden)]
    fn thin_svd(m: &DMatrix<Complex<Self>>) -> (DMatrix<Complex<Self>>, Vec<Self>, DMatrix<Complex<Self>>);
}

// nalgebra's complex SVD loses accuracy on some rank-deficient inputs; faer's does not.
macro_rules! faer_svd {
    ($t:ty) => {
        fn thin_svd(m: &DMatrix<Complex<$t>>) -> (DMatrix<Complex<$t>>, Vec<$t>, DMatrix<Complex<$t>>) {
            let (r, c) = m.shape();
            let k = r.min(c);
            let f = faer::Mat::<Complex<$t>>::from_fn(r, c, |i, j| m[(i, j)]);
            match f.thin_svd() {
                Ok(d) => {
                    let (u, s, v) = (d.U(), d.S().column_vector(), d.V());
                    (
                        DMatrix::from_fn(r, k, |i, j| u[(i, j)]),
                        (0..k).map(|i| s[i].re).collect(),
                        DMatrix::from_fn(c, k, |i, j| v[(i, j)]),
                    )
                }
                Err(_) => {
                    let d = m.clone().svd(true, true);
                    let v = d.v_t.expect("requested V^T").adjoint();
                    (
                        d.u.expect("requested U"),
                        d.singular_values.iter().copied().collect(),
                        v,
                    )
                }
            }
        }
    };
}

impl Real for f64 {
    const RANK_REL_TOL: f64 = 1e-9;
    const PSD_TOL: f64 = 1e-9;
    const EQ_ABS_TOL: f64 = 1e-8;

    faer_svd!(f64);
}

impl Real for f32 {
    const RANK_REL_TOL: f64 = 1e-4;
    const PSD_TOL: f64 = 1e-4;
    const EQ_ABS_TOL: f64 = 1e-3;

    faer_svd!(f32);
}

/// Complex scalar over `R`.
pub type C<R> = Complex<R>;
