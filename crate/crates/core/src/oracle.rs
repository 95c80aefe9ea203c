// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Sampled verifiers and random instance generators.
//!
//! The verifiers evaluate the defining identities on random module elements
//! directly from basis images, without going through the comparison code.
//!
//! Sampling contract: a `ChaCha8Rng` seeded with `seed_from_u64(seed)`
//! produces, for each sample in turn, the entries of a `k × m` matrix in
//! row-major order, each as a real part followed by an imaginary part drawn
//! from the standard normal distribution and multiplied by `scale`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::compare::{CommutantBasis, CommutantElement};
use crate::cpmaps::ModuleCPMap;
use crate::dilation::ModuleStinespring;
use crate::error::{Error, Result};
use crate::modspace::{HilbertModule, ModuleElement};
use crate::numerics::{eigh, kron, matrix_unit, op_norm, spectral_rebuild, CMat};
use crate::scalar::{Real, C};

/// Seed, sample count and entry scale of a sampled check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    seed: u64,
    samples: usize,
    scale: f64,
}

impl Eq for SampleConfig {}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 64,
            scale: 1.0,
        }
    }
}

impl SampleConfig {
    pub fn new(seed: u64, samples: usize, scale: f64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidConfig("at least one sample is required".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("sample scale {scale} must be positive")));
        }
        Ok(Self { seed, samples, scale })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Pseudo-random elements of `X` following the sampling contract.
pub fn sample_module_elements<R: Real>(module: &HilbertModule, cfg: &SampleConfig) -> Vec<ModuleElement<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples)
        .map(|_| {
            let mut x = CMat::zeros(module.k(), module.m());
            for r in 0..module.k() {
                for s in 0..module.m() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    x[(r, s)] = C::new(R::lit(re * cfg.scale), R::lit(im * cfg.scale));
                }
            }
            module.element(x).expect("sample has the module shape")
        })
        .collect()
}

/// `max ‖Φ(x)*Φ(x) - Ψ(x)*Ψ(x)‖` (spectral norm) over sampled `x`.
pub fn verify_equivalence_pointwise<R: Real>(
    phi: &ModuleCPMap<R>,
    psi: &ModuleCPMap<R>,
    cfg: &SampleConfig,
) -> Result<R> {
    phi.check_same_shape(psi)?;
    Ok(sample_module_elements::<R>(&phi.module(), cfg)
        .iter()
        .fold(R::zero(), |acc, x| {
            let a = phi.eval(x.value());
            let b = psi.eval(x.value());
            acc.max(op_norm(&(a.adjoint() * &a - b.adjoint() * &b)))
        }))
}

/// `max ‖Φ(x) - W* π_Φ(x) V‖` (spectral norm) over sampled `x`. Infinite when
/// the quintuple does not match the shape of `Φ`.
pub fn verify_factorization<R: Real>(q: &ModuleStinespring<R>, phi: &ModuleCPMap<R>, cfg: &SampleConfig) -> R {
    if q.module() != phi.module() || q.p() != phi.p() || q.q() != phi.q() {
        return R::max_value().unwrap_or_else(R::one);
    }
    let w_star = q.w().adjoint();
    sample_module_elements::<R>(&phi.module(), cfg)
        .iter()
        .fold(R::zero(), |acc, x| {
            let direct = phi.eval(x.value());
            let dilated = &w_star * q.pi_x_of(x.value()) * q.v();
            acc.max(op_norm(&(direct - dilated)))
        })
}

// ---------------------------------------------------------------------------
// random instances

fn normal<R: Real, G: Rng + ?Sized>(rng: &mut G) -> C<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(R::lit(re), R::lit(im))
}

/// Matrix of independent standard complex Gaussian entries.
pub fn gaussian_matrix<R: Real, G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize) -> CMat<R> {
    CMat::from_fn(rows, cols, |_, _| normal(rng))
}

/// `rows × cols` matrix with orthonormal columns (`cols ≤ rows`), from the QR
/// factorization of a Gaussian matrix.
pub fn random_isometry<R: Real, G: Rng + ?Sized>(rng: &mut G, rows: usize, cols: usize) -> CMat<R> {
    assert!(cols <= rows, "an isometry C^{cols} -> C^{rows} needs cols <= rows");
    if cols == 0 {
        return CMat::zeros(rows, 0);
    }
    gaussian_matrix::<R, G>(rng, rows, cols).qr().q()
}

pub fn random_unitary<R: Real, G: Rng + ?Sized>(rng: &mut G, n: usize) -> CMat<R> {
    random_isometry(rng, n, n)
}

/// Valid module CP map `Φ(x) = W* (x ⊗ I_n) V` with Gaussian `V: C^p -> C^m ⊗ C^n`
/// and a random isometry `W*: C^k ⊗ C^n -> C^q`. Requires `k n ≤ q`.
pub fn random_module_map<R: Real, G: Rng + ?Sized>(
    rng: &mut G,
    module: HilbertModule,
    p: usize,
    q: usize,
    n: usize,
) -> Result<ModuleCPMap<R>> {
    let (k, m) = (module.k(), module.m());
    if k * n > q {
        return Err(Error::ShapeMismatch(format!("k·n = {} exceeds q = {q}", k * n)));
    }
    let norm = R::lit(1.0 / ((m * n) as f64).sqrt());
    let v = gaussian_matrix::<R, G>(rng, m * n, p).map(|z| z * norm);
    let w_star = random_isometry::<R, G>(rng, q, k * n);
    let id = CMat::identity(n, n);
    let images = (0..module.dim())
        .map(|i| {
            let (r, s) = module.basis_pair(i);
            &w_star * kron(&matrix_unit::<R>(k, m, r, s), &id) * &v
        })
        .collect();
    ModuleCPMap::new(module, p, q, images)
}

/// Hermitian element `(E + E*)/2` for `E` a Gaussian combination of the basis.
pub fn random_hermitian_element<R: Real, G: Rng + ?Sized>(
    rng: &mut G,
    basis: &CommutantBasis<R>,
) -> CommutantElement<R> {
    let coeffs: Vec<C<R>> = (0..basis.dim()).map(|_| normal(rng)).collect();
    let e = basis.combine(&coeffs);
    let half = C::new(R::lit(0.5), R::zero());
    CommutantElement::new((&e.t + e.t.adjoint()) * half, (&e.s + e.s.adjoint()) * half)
}

/// `f(T) ⊕ f(S)` for a Hermitian element. Since both parts are evaluated on
/// the joint spectrum, the result stays in the commutant.
pub fn hermitian_function<R: Real>(e: &CommutantElement<R>, f: impl Fn(R) -> R) -> CommutantElement<R> {
    CommutantElement::new(spectral_rebuild(&eigh(&e.t), &f), spectral_rebuild(&eigh(&e.s), &f))
}

fn joint_spectrum<R: Real>(e: &CommutantElement<R>) -> Vec<R> {
    let mut values = eigh(&e.t).values;
    values.extend(eigh(&e.s).values);
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values
}

/// Random `T ⊕ S` in the commutant with spectrum in `[floor, 1]`.
///
/// A random Hermitian element is mapped affinely onto `[floor, 1]`; when its
/// spectrum is a single point the result is a random scalar in that range.
pub fn random_contraction<R: Real, G: Rng + ?Sized>(
    rng: &mut G,
    basis: &CommutantBasis<R>,
    floor: f64,
) -> CommutantElement<R> {
    assert!((0.0..=1.0).contains(&floor), "floor must lie in [0, 1]");
    let h = random_hermitian_element(rng, basis);
    let spec = joint_spectrum(&h);
    let (lo, hi) = (spec[0], spec[spec.len() - 1]);
    let f0 = R::lit(floor);
    if hi - lo <= R::lit(1e-6) * R::one().max(hi.abs()) {
        let c = R::lit(floor + (1.0 - floor) * rng.random::<f64>());
        return hermitian_function(&h, |_| c);
    }
    hermitian_function(&h, |x| f0 + (R::one() - f0) * (x - lo) / (hi - lo))
}

/// Random contraction with a nontrivial kernel: the joint spectrum is split
/// at its widest gap, the lower part sent to `0` and the upper part affinely
/// onto `[0.3, 1]`. `None` when the spectrum is a single cluster.
pub fn random_rank_deficient<R: Real, G: Rng + ?Sized>(
    rng: &mut G,
    basis: &CommutantBasis<R>,
) -> Option<CommutantElement<R>> {
    let h = random_hermitian_element(rng, basis);
    let spec = joint_spectrum(&h);
    let (lo, hi) = (spec[0], spec[spec.len() - 1]);
    if hi - lo <= R::lit(1e-6) * R::one().max(hi.abs()) {
        return None;
    }
    let (at, _) = spec
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i, w[1] - w[0]))
        .fold((0, R::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
    let (below, above) = (spec[at], spec[at + 1]);
    let cut = (below + above) * R::lit(0.5);
    let low = R::lit(0.3);
    let flat = hi - above <= R::lit(1e-6) * (hi - lo);
    Some(hermitian_function(&h, move |x| {
        if x < cut {
            R::zero()
        } else if flat {
            R::one()
        } else {
            low + (R::one() - low) * (x - above) / (hi - above)
        }
    }))
}

/// Deterministic generator for tests and examples.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpmaps::validate_module_cp;
    use crate::dilation::construct;
    use crate::fixtures;
    use crate::numerics::{max_abs_diff, unitarity_defect, TolerancePolicy};

    fn tol() -> TolerancePolicy<f64> {
        TolerancePolicy::default()
    }

    #[test]
    fn sample_config_validation() {
        assert!(SampleConfig::new(1, 0, 1.0).is_err());
        assert!(SampleConfig::new(1, 1, 0.0).is_err());
        assert!(SampleConfig::new(1, 1, f64::NAN).is_err());
        assert_eq!(SampleConfig::default().samples(), 64);
    }

    #[test]
    fn sampling_is_deterministic() {
        let x = HilbertModule::new(2, 3).unwrap();
        let one = SampleConfig::new(5, 1, 1.0).unwrap();
        assert_eq!(sample_module_elements::<f64>(&x, &one).len(), 1);
        let cfg = SampleConfig::new(5, 8, 2.0).unwrap();
        let a = sample_module_elements::<f64>(&x, &cfg);
        assert_eq!(a, sample_module_elements::<f64>(&x, &cfg));
        let other = SampleConfig::new(6, 8, 2.0).unwrap();
        assert_ne!(a, sample_module_elements::<f64>(&x, &other));
    }

    #[test]
    fn pointwise_equivalence_residuals() {
        let cfg = SampleConfig::default();
        let phi = fixtures::flip_phi::<f64>();
        let psi = fixtures::flip_psi::<f64>();
        assert!(verify_equivalence_pointwise(&phi, &psi, &cfg).unwrap() <= 1e-10);
        assert_eq!(verify_equivalence_pointwise(&phi, &phi, &cfg).unwrap(), 0.0);

        // ‖4 Φ(x)*Φ(x) - Φ(x)*Φ(x)‖ = 3 ‖Φ(x)*Φ(x)‖
        let r = verify_equivalence_pointwise(&phi, &phi.scaled(2.0), &cfg).unwrap();
        let largest = sample_module_elements::<f64>(&phi.module(), &cfg)
            .iter()
            .map(|x| {
                let a = phi.eval(x.value());
                op_norm(&(a.adjoint() * a))
            })
            .fold(0.0, f64::max);
        assert!((r - 3.0 * largest).abs() < 1e-9 * largest);
    }

    #[test]
    fn factorization_residuals() {
        let cfg = SampleConfig::default();
        let phi = fixtures::flip_phi::<f64>();
        let q = construct(&phi, &tol()).unwrap();
        assert!(verify_factorization(&q, &phi, &cfg) <= 1e-9);
        let id = fixtures::identity_m2::<f64>();
        assert!(verify_factorization(&construct(&id, &tol()).unwrap(), &id, &cfg) <= 1e-12);

        let mut w = q.w().clone();
        w[(0, 0)] += C::new(0.1, 0.0);
        let bent = ModuleStinespring::from_parts(q.module(), q.pi_phi().clone(), q.pi_x_images().to_vec(), w).unwrap();
        assert!(verify_factorization(&bent, &phi, &cfg) > 1e-3);
    }

    #[test]
    fn random_maps_are_valid() {
        let mut g = rng(3);
        for (k, m, p, q, n) in [(1, 1, 1, 1, 1), (2, 3, 2, 4, 2), (3, 2, 4, 3, 1)] {
            let x = HilbertModule::new(k, m).unwrap();
            let map = random_module_map::<f64, _>(&mut g, x, p, q, n).unwrap();
            assert!(validate_module_cp(&map, &tol()).is_valid);
        }
        let x = HilbertModule::new(3, 2).unwrap();
        assert!(random_module_map::<f64, _>(&mut g, x, 2, 4, 2).is_err());
        assert!(unitarity_defect(&random_unitary::<f64, _>(&mut g, 5)) < 1e-12);
    }

    #[test]
    fn random_contractions_lie_in_the_interval() {
        let mut g = rng(11);
        let q = construct(&fixtures::block_doubled_m2::<f64>(), &tol()).unwrap();
        let basis = crate::compare::commutant(&q, &tol());
        for _ in 0..5 {
            let e = random_contraction(&mut g, &basis, 0.0);
            assert!(e.is_contraction(&tol()));
            assert!(e.residual(&q) < 1e-10);
            let d = random_rank_deficient(&mut g, &basis).unwrap();
            assert!(d.is_contraction(&tol()));
            assert!(d.residual(&q) < 1e-10);
            assert!(crate::numerics::min_eigenvalue(&d.t).abs() < 1e-12);
            assert!(max_abs_diff(&d.t, &CMat::zeros(4, 4)) > 0.2);
        }
    }
}
