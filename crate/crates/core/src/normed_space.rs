//! Norm specifications over finite-dimensional coefficient spaces.
//!
//! A [`NormSpec`] describes a computable norm on `C^dim` (or `R^dim` for
//! polyhedral variants). Vectors are [`CVec`]; functionals pair bilinearly:
//! `phi(v) = sum_i phi_i * v_i` with no conjugation, so point evaluations of a
//! function-space model are plain basis rows.

use nalgebra::linalg::Cholesky;
use nalgebra::Dyn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMat, CVec, RMat, STRUCT_TOL};

mod faces;
mod lipschitz;
pub(crate) mod serde_repr;

pub use faces::{face_dimension, sphere_face_dimension, support_face, FaceDescription};

/// Maximum allowed condition number for Gram matrices.
pub const GRAM_COND_LIMIT: f64 = 1e12;

type C64 = Complex64;

/// Scalar field a norm is defined over. Polyhedral norms act on real vectors
/// and admit only real scalars in line searches; every other variant is
/// complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarField {
    Complex,
    Real,
}

/// Outer combiner for block-sum norms: a monotone norm on the vector of
/// block norms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum RhoCombiner {
    /// `(sum_b u_b^p)^(1/p)`, `p` in `[1, inf]` (`inf` encoded as `"inf"` or
    /// any `p >= 1e308`).
    OuterLp { p: f64 },
    /// `(sum_b w_b u_b^p)^(1/p)`, positive weights, `p` in `[1, inf)`.
    WeightedOuterLp { p: f64, weights: Vec<f64> },
}

/// A computable norm on a finite-dimensional coefficient space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum NormSpec {
    /// Complex `l^p`, `p` in `[1, inf]`.
    Lp { p: f64, dim: usize },
    /// `||v|| = sqrt(v^H G v)` for a Hermitian positive-definite `G`.
    HilbertGram {
        #[serde(with = "serde_repr::cmat")]
        gram: CMat,
    },
    /// `||v|| = max_j <v, c_j>` over a finite facet set symmetric under
    /// negation and spanning `R^dim`. Acts on real vectors.
    Polyhedral { dim: usize, facets: Vec<Vec<f64>> },
    /// Lipschitz norm over a finite metric space. With
    /// `penalize_basepoint = true` the space is all value vectors with
    /// `||f|| = dil f + |f(z)|` (coefficient dim = point count); otherwise
    /// functions vanish at the basepoint, `||f|| = dil f`, and the basepoint
    /// coordinate is dropped from the coefficient space.
    LipschitzFin {
        #[serde(with = "serde_repr::rmat")]
        metric: RMat,
        basepoint: usize,
        penalize_basepoint: bool,
    },
    /// Direct sum of blocks combined by an outer norm on block norms.
    BlockSum {
        blocks: Vec<NormSpec>,
        combiner: RhoCombiner,
    },
}

/// A linear functional given by its coefficient vector; acts bilinearly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Functional {
    #[serde(with = "serde_repr::cvec")]
    pub coeffs: CVec,
}

impl Functional {
    pub fn new(coeffs: CVec) -> Self {
        Functional { coeffs }
    }

    /// Bilinear pairing `sum_i coeffs_i * v_i`.
    pub fn apply(&self, v: &CVec) -> C64 {
        self.coeffs.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
    }
}

impl NormSpec {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        let spec = NormSpec::Lp { p, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hilbert(gram: CMat) -> Result<Self> {
        let spec = NormSpec::HilbertGram { gram };
        spec.validate()?;
        Ok(spec)
    }

    pub fn polyhedral(dim: usize, facets: Vec<Vec<f64>>) -> Result<Self> {
        let spec = NormSpec::Polyhedral { dim, facets };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lipschitz(metric: RMat, basepoint: usize, penalize_basepoint: bool) -> Result<Self> {
        let spec = NormSpec::LipschitzFin {
            metric,
            basepoint,
            penalize_basepoint,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn block_sum(blocks: Vec<NormSpec>, combiner: RhoCombiner) -> Result<Self> {
        let spec = NormSpec::BlockSum { blocks, combiner };
        spec.validate()?;
        Ok(spec)
    }

    /// Coefficient-space dimension the norm acts on.
    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Lp { dim, .. } => *dim,
            NormSpec::HilbertGram { gram } => gram.nrows(),
            NormSpec::Polyhedral { dim, .. } => *dim,
            NormSpec::LipschitzFin {
                metric,
                penalize_basepoint,
                ..
            } => {
                if *penalize_basepoint {
                    metric.nrows()
                } else {
                    metric.nrows().saturating_sub(1)
                }
            }
            NormSpec::BlockSum { blocks, .. } => blocks.iter().map(NormSpec::dim).sum(),
        }
    }

    pub fn scalar_field(&self) -> ScalarField {
        match self {
            NormSpec::Polyhedral { .. } => ScalarField::Real,
            NormSpec::BlockSum { blocks, .. } => {
                if blocks.iter().any(|b| b.scalar_field() == ScalarField::Real) {
                    ScalarField::Real
                } else {
                    ScalarField::Complex
                }
            }
            _ => ScalarField::Complex,
        }
    }

    /// Structural validation; called by every constructor and after
    /// deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::Lp { p, dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidNorm("lp dimension must be positive".into()));
                }
                if p.is_nan() || *p < 1.0 {
                    return Err(Error::InvalidNorm(format!("lp exponent {p} must be >= 1")));
                }
                Ok(())
            }
            NormSpec::HilbertGram { gram } => validate_gram(gram),
            NormSpec::Polyhedral { dim, facets } => validate_polyhedral(*dim, facets),
            NormSpec::LipschitzFin {
                metric, basepoint, ..
            } => {
                validate_metric(metric)?;
                if *basepoint >= metric.nrows() {
                    return Err(Error::InvalidMetric(format!(
                        "basepoint {basepoint} out of range for {} points",
                        metric.nrows()
                    )));
                }
                if metric.nrows() < 2 {
                    return Err(Error::InvalidMetric(
                        "lipschitz norm needs at least two points".into(),
                    ));
                }
                Ok(())
            }
            NormSpec::BlockSum { blocks, combiner } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidNorm("block sum needs at least one block".into()));
                }
                for b in blocks {
                    b.validate()?;
                }
                match combiner {
                    RhoCombiner::OuterLp { p } => {
                        if p.is_nan() || *p < 1.0 {
                            return Err(Error::InvalidNorm(format!(
                                "outer exponent {p} must be >= 1"
                            )));
                        }
                    }
                    RhoCombiner::WeightedOuterLp { p, weights } => {
                        if p.is_nan() || *p < 1.0 || p.is_infinite() {
                            return Err(Error::InvalidNorm(format!(
                                "weighted outer exponent {p} must be in [1, inf)"
                            )));
                        }
                        if weights.len() != blocks.len() {
                            return Err(Error::DimensionMismatch {
                                expected: blocks.len(),
                                got: weights.len(),
                            });
                        }
                        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
                            return Err(Error::InvalidNorm(
                                "outer weights must be positive and finite".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn validate_gram(gram: &CMat) -> Result<()> {
    let n = gram.nrows();
    if n == 0 || gram.ncols() != n {
        return Err(Error::InvalidNorm("gram matrix must be square and nonempty".into()));
    }
    if gram.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = gram.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if (gram - gram.adjoint()).norm() > STRUCT_TOL * scale.max(1.0) * (n as f64) {
        return Err(Error::NotPositiveDefinite);
    }
    let eig = gram.clone().symmetric_eigen().eigenvalues;
    let (emax, emin) = (eig.max(), eig.min());
    if emin <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let cond = emax / emin;
    if cond > GRAM_COND_LIMIT {
        return Err(Error::IllConditioned {
            cond,
            limit: GRAM_COND_LIMIT,
        });
    }
    Ok(())
}

fn validate_polyhedral(dim: usize, facets: Vec2Ref) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidNorm("polyhedral dimension must be positive".into()));
    }
    if facets.is_empty() {
        return Err(Error::UnboundedBall);
    }
    let mut scale = 0.0_f64;
    for f in facets {
        if f.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: f.len(),
            });
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        scale = scale.max(f.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    }
    if scale == 0.0 {
        return Err(Error::UnboundedBall);
    }
    // symmetric under negation
    for f in facets {
        let has_neg = facets.iter().any(|g| {
            f.iter()
                .zip(g.iter())
                .all(|(a, b)| (a + b).abs() <= STRUCT_TOL * scale.max(1.0))
        });
        if !has_neg {
            return Err(Error::AsymmetricFacets);
        }
    }
    // spanning => bounded unit ball
    let mat = RMat::from_fn(facets.len(), dim, |i, j| facets[i][j]);
    let rank = real_rank(&mat, STRUCT_TOL.max(1e-10));
    if rank < dim {
        return Err(Error::UnboundedBall);
    }
    Ok(())
}

type Vec2Ref<'a> = &'a [Vec<f64>];

pub(crate) fn validate_metric(metric: &RMat) -> Result<()> {
    let m = metric.nrows();
    if m == 0 || metric.ncols() != m {
        return Err(Error::InvalidMetric("metric matrix must be square".into()));
    }
    if metric.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidMetric("metric has non-finite entries".into()));
    }
    let scale = metric.iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(1.0);
    let tol = STRUCT_TOL * scale;
    for i in 0..m {
        if metric[(i, i)].abs() > tol {
            return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
        }
        for j in 0..m {
            if i != j && metric[(i, j)] <= 0.0 {
                return Err(Error::InvalidMetric(format!(
                    "non-positive distance between distinct points {i}, {j}"
                )));
            }
            if (metric[(i, j)] - metric[(j, i)]).abs() > tol {
                return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j})")));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if metric[(i, j)] > metric[(i, k)] + metric[(k, j)] + tol {
                    return Err(Error::InvalidMetric(format!(
                        "triangle inequality fails at ({i}, {j}, {k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn ensure_finite(v: &CVec) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Err(Error::NonFinite)
    } else {
        Ok(())
    }
}

pub(crate) fn ensure_dim(spec: &NormSpec, v: &CVec) -> Result<()> {
    if v.len() != spec.dim() {
        Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: v.len(),
        })
    } else {
        Ok(())
    }
}

/// Real part extraction for polyhedral vectors; rejects genuinely complex
/// input.
pub(crate) fn ensure_real(v: &CVec) -> Result<Vec<f64>> {
    let scale = v.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    for (i, z) in v.iter().enumerate() {
        if z.im.abs() > 1e-9 * scale {
            return Err(Error::NotReal {
                index: i,
                imag: z.im,
            });
        }
    }
    Ok(v.iter().map(|z| z.re).collect())
}

/// `l^p` norm of a modulus vector with overflow-safe scaling.
fn lp_of_moduli(m: &[f64], p: f64) -> f64 {
    let mx = m.iter().fold(0.0_f64, |a, b| a.max(*b));
    if mx == 0.0 {
        return 0.0;
    }
    if p.is_infinite() || p >= 1e308 {
        return mx;
    }
    if p == 1.0 {
        return m.iter().sum();
    }
    let s: f64 = m.iter().map(|x| (x / mx).powf(p)).sum();
    mx * s.powf(1.0 / p)
}

/// Rank of a real matrix at relative tolerance `tol`.
pub(crate) fn real_rank(m: &RMat, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let cutoff = sv.max() * tol.max(f64::EPSILON);
    sv.iter().filter(|s| **s > cutoff).count()
}

/// Rank of a complex matrix at relative tolerance `tol`.
pub(crate) fn complex_rank(m: &CMat, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let cutoff = sv.max() * tol.max(f64::EPSILON);
    sv.iter().filter(|s| **s > cutoff).count()
}

/// Splits a block-sum vector into per-block slices.
pub(crate) fn split_blocks<'a>(blocks: &[NormSpec], v: &'a CVec) -> Vec<CVec> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut off = 0;
    for b in blocks {
        let d = b.dim();
        out.push(CVec::from_iterator(d, (0..d).map(|i| v[off + i])));
        off += d;
    }
    out
}

/// Lifts a Lipschitz coefficient vector to the full value vector over all
/// points (inserting a zero at the basepoint when it is constrained away).
pub(crate) fn lipschitz_values(spec: &NormSpec, v: &CVec) -> Result<CVec> {
    let NormSpec::LipschitzFin {
        metric,
        basepoint,
        penalize_basepoint,
    } = spec
    else {
        return Err(Error::Invalid("not a lipschitz norm".into()));
    };
    let m = metric.nrows();
    if *penalize_basepoint {
        Ok(v.clone())
    } else {
        let mut vals = CVec::zeros(m);
        let mut k = 0;
        for i in 0..m {
            if i != *basepoint {
                vals[i] = v[k];
                k += 1;
            }
        }
        Ok(vals)
    }
}

/// Evaluates the norm described by `spec` at `v`.
pub fn norm_eval(spec: &NormSpec, v: &CVec) -> Result<f64> {
    ensure_dim(spec, v)?;
    ensure_finite(v)?;
    match spec {
        NormSpec::Lp { p, .. } => {
            let m: Vec<f64> = v.iter().map(|z| z.norm()).collect();
            Ok(lp_of_moduli(&m, *p))
        }
        NormSpec::HilbertGram { gram } => {
            let gv = gram * v;
            let q = v.dotc(&gv).re;
            Ok(q.max(0.0).sqrt())
        }
        NormSpec::Polyhedral { facets, .. } => {
            let x = ensure_real(v)?;
            let mut best = f64::NEG_INFINITY;
            for f in facets {
                let s: f64 = f.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                best = best.max(s);
            }
            Ok(best.max(0.0))
        }
        NormSpec::LipschitzFin {
            metric,
            basepoint,
            penalize_basepoint,
        } => {
            let vals = lipschitz_values(spec, v)?;
            let d = dil_values(metric, &vals);
            Ok(if *penalize_basepoint {
                d + vals[*basepoint].norm()
            } else {
                d
            })
        }
        NormSpec::BlockSum { blocks, combiner } => {
            let parts = split_blocks(blocks, v);
            let mut norms = Vec::with_capacity(blocks.len());
            for (b, part) in blocks.iter().zip(parts.iter()) {
                norms.push(norm_eval(b, part)?);
            }
            Ok(combiner_eval(combiner, &norms))
        }
    }
}

/// Dilation seminorm `max_{x != y} |f(x) - f(y)| / d(x, y)` of a full value
/// vector over the metric of a `LipschitzFin` spec.
pub fn dil(spec: &NormSpec, values: &CVec) -> Result<f64> {
    let NormSpec::LipschitzFin { metric, .. } = spec else {
        return Err(Error::ApproximateOnly {
            op: "dil",
            supported: "LipschitzFin",
        });
    };
    if values.len() != metric.nrows() {
        return Err(Error::DimensionMismatch {
            expected: metric.nrows(),
            got: values.len(),
        });
    }
    ensure_finite(values)?;
    Ok(dil_values(metric, values))
}

pub(crate) fn dil_values(metric: &RMat, values: &CVec) -> f64 {
    let m = metric.nrows();
    let mut best = 0.0_f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let r = (values[i] - values[j]).norm() / metric[(i, j)];
            best = best.max(r);
        }
    }
    best
}

pub(crate) fn combiner_eval(c: &RhoCombiner, block_norms: &[f64]) -> f64 {
    match c {
        RhoCombiner::OuterLp { p } => lp_of_moduli(block_norms, *p),
        RhoCombiner::WeightedOuterLp { p, weights } => {
            let scaled: Vec<f64> = block_norms
                .iter()
                .zip(weights.iter())
                .map(|(u, w)| w.powf(1.0 / p) * u)
                .collect();
            lp_of_moduli(&scaled, *p)
        }
    }
}

/// Norm of the dual combiner applied to block dual norms.
pub(crate) fn combiner_dual_eval(c: &RhoCombiner, block_duals: &[f64]) -> f64 {
    match c {
        RhoCombiner::OuterLp { p } => lp_of_moduli(block_duals, conjugate_exponent(*p)),
        RhoCombiner::WeightedOuterLp { p, weights } => {
            if *p == 1.0 {
                block_duals
                    .iter()
                    .zip(weights.iter())
                    .map(|(v, w)| v / w)
                    .fold(0.0_f64, f64::max)
            } else {
                let q = conjugate_exponent(*p);
                // dual of (sum w u^p)^(1/p) is (sum w^(1-q) v^q)^(1/q)
                let scaled: Vec<f64> = block_duals
                    .iter()
                    .zip(weights.iter())
                    .map(|(v, w)| w.powf((1.0 - q) / q) * v)
                    .collect();
                lp_of_moduli(&scaled, q)
            }
        }
    }
}

pub(crate) fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() || p >= 1e308 {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Evaluates the dual norm `sup { |phi(f)| : norm(f) <= 1 }` of the
/// functional with coefficient vector `phi`.
///
/// Closed forms: `l^q` for `Lp`, `sqrt(conj(phi)^H G^-1 conj(phi))` for
/// `HilbertGram` (bilinear pairing), recursive conjugate combiner for
/// `BlockSum`. Polyhedral duals solve the gauge linear program over the
/// facet hull; Lipschitz duals use an exact flow form for functionals
/// supported on at most two non-basepoint points and a cutting-plane linear
/// program otherwise. `tol` controls the iterative paths.
pub fn dual_norm_eval(spec: &NormSpec, phi: &CVec, tol: f64) -> Result<f64> {
    ensure_dim(spec, phi)?;
    ensure_finite(phi)?;
    dual_norm_inner(spec, phi, tol, None)
}

fn dual_norm_inner(
    spec: &NormSpec,
    phi: &CVec,
    tol: f64,
    chol: Option<&Cholesky<C64, Dyn>>,
) -> Result<f64> {
    match spec {
        NormSpec::Lp { p, .. } => {
            let m: Vec<f64> = phi.iter().map(|z| z.norm()).collect();
            Ok(lp_of_moduli(&m, conjugate_exponent(*p)))
        }
        NormSpec::HilbertGram { gram } => {
            let psi = phi.map(|z| z.conj());
            let x = match chol {
                Some(c) => c.solve(&psi),
                None => gram
                    .clone()
                    .cholesky()
                    .ok_or(Error::NotPositiveDefinite)?
                    .solve(&psi),
            };
            Ok(psi.dotc(&x).re.max(0.0).sqrt())
        }
        NormSpec::Polyhedral { facets, .. } => {
            let target = ensure_real(phi)?;
            crate::lp::polyhedral_gauge(facets, &target)
        }
        NormSpec::LipschitzFin { .. } => lipschitz::dual_norm(spec, phi, tol),
        NormSpec::BlockSum { blocks, combiner } => {
            let parts = split_blocks(blocks, phi);
            let mut duals = Vec::with_capacity(blocks.len());
            for (b, part) in blocks.iter().zip(parts.iter()) {
                duals.push(dual_norm_inner(b, part, tol, None)?);
            }
            Ok(combiner_dual_eval(combiner, &duals))
        }
    }
}

/// Norm evaluation abstraction shared by the primal norm and its dual view.
/// The orthogonality line search operates through this trait.
pub trait NormEvaluator {
    fn dim(&self) -> usize;
    fn scalar_field(&self) -> ScalarField;
    fn eval(&self, v: &CVec) -> Result<f64>;
}

impl NormEvaluator for NormSpec {
    fn dim(&self) -> usize {
        NormSpec::dim(self)
    }
    fn scalar_field(&self) -> ScalarField {
        NormSpec::scalar_field(self)
    }
    fn eval(&self, v: &CVec) -> Result<f64> {
        norm_eval(self, v)
    }
}

/// Dual-norm view of a spec: `eval(phi) = dual_norm_eval(spec, phi, tol)`.
/// Caches the Gram factorization for Hilbert specs.
pub struct DualView<'a> {
    spec: &'a NormSpec,
    tol: f64,
    chol: Option<Cholesky<C64, Dyn>>,
}

impl<'a> DualView<'a> {
    pub fn new(spec: &'a NormSpec, tol: f64) -> Result<Self> {
        let chol = match spec {
            NormSpec::HilbertGram { gram } => Some(
                gram.clone()
                    .cholesky()
                    .ok_or(Error::NotPositiveDefinite)?,
            ),
            _ => None,
        };
        Ok(DualView { spec, tol, chol })
    }

    pub fn spec(&self) -> &NormSpec {
        self.spec
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

impl NormEvaluator for DualView<'_> {
    fn dim(&self) -> usize {
        self.spec.dim()
    }
    fn scalar_field(&self) -> ScalarField {
        self.spec.scalar_field()
    }
    fn eval(&self, phi: &CVec) -> Result<f64> {
        ensure_dim(self.spec, phi)?;
        ensure_finite(phi)?;
        dual_norm_inner(self.spec, phi, self.tol, self.chol.as_ref())
    }
}

pub(crate) fn csign(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;

    fn cv(entries: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(entries.len(), entries.iter().map(|(a, b)| C64::new(*a, *b)))
    }

    fn rv(entries: &[f64]) -> CVec {
        CVec::from_iterator(entries.len(), entries.iter().map(|a| C64::new(*a, 0.0)))
    }

    #[test]
    fn lp_norms_match_hand_values() {
        let l2 = NormSpec::lp(2.0, 2).unwrap();
        assert!((norm_eval(&l2, &cv(&[(3.0, 0.0), (0.0, 4.0)])).unwrap() - 5.0).abs() < 1e-15);
        let l1 = NormSpec::lp(1.0, 2).unwrap();
        assert!((norm_eval(&l1, &cv(&[(3.0, 4.0), (1.0, 0.0)])).unwrap() - 6.0).abs() < 1e-15);
        let linf = NormSpec::lp(f64::INFINITY, 3).unwrap();
        assert!(
            (norm_eval(&linf, &rv(&[1.0, -7.0, 2.0])).unwrap() - 7.0).abs() < 1e-15
        );
    }

    #[test]
    fn hilbert_diag_gram() {
        let gram = CMat::from_diagonal(&cv(&[(4.0, 0.0), (1.0, 0.0)]));
        let spec = NormSpec::hilbert(gram).unwrap();
        let v = rv(&[1.0, 1.0]);
        assert!((norm_eval(&spec, &v).unwrap() - 5.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hilbert_dual_diag_gram() {
        // maximize |phi(f)| over 4|f1|^2 + |f2|^2 <= 1 at phi = (1, 0): 1/2
        let gram = CMat::from_diagonal(&cv(&[(4.0, 0.0), (1.0, 0.0)]));
        let spec = NormSpec::hilbert(gram).unwrap();
        let d = dual_norm_eval(&spec, &rv(&[1.0, 0.0]), DEFAULT_TOL).unwrap();
        assert!((d - 0.5).abs() < 1e-14, "{d}");
    }

    #[test]
    fn linf_dual_is_l1() {
        let spec = NormSpec::lp(f64::INFINITY, 2).unwrap();
        let d = dual_norm_eval(&spec, &rv(&[1.0, 2.0]), DEFAULT_TOL).unwrap();
        assert!((d - 3.0).abs() < 1e-15);
    }

    #[test]
    fn block_sum_outer_l2() {
        let b = NormSpec::block_sum(
            vec![
                NormSpec::lp(f64::INFINITY, 2).unwrap(),
                NormSpec::lp(f64::INFINITY, 2).unwrap(),
            ],
            RhoCombiner::OuterLp { p: 2.0 },
        )
        .unwrap();
        let v = rv(&[1.0, 1.0, 0.0, 0.0]);
        assert!((norm_eval(&b, &v).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_norm_two_points() {
        // points {z, x}, d = 2, penalized basepoint
        let metric = RMat::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]);
        let spec = NormSpec::lipschitz(metric, 0, true).unwrap();
        // f = (1, 3): dil = 1, |f(z)| = 1
        assert!((norm_eval(&spec, &rv(&[1.0, 3.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dil_rejects_other_variants() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        assert!(matches!(
            dil(&spec, &rv(&[1.0, 0.0])),
            Err(Error::ApproximateOnly { .. })
        ));
    }

    #[test]
    fn gram_validation_rejects_bad_matrices() {
        let not_herm = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(NormSpec::hilbert(not_herm).is_err());
        let indefinite = CMat::from_diagonal(&cv(&[(1.0, 0.0), (-1.0, 0.0)]));
        assert!(NormSpec::hilbert(indefinite).is_err());
        let ill = CMat::from_diagonal(&cv(&[(1.0, 0.0), (1e-14, 0.0)]));
        assert!(matches!(
            NormSpec::hilbert(ill),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn polyhedral_validation() {
        // missing negation
        assert!(matches!(
            NormSpec::polyhedral(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            Err(Error::AsymmetricFacets)
        ));
        // not spanning
        assert!(matches!(
            NormSpec::polyhedral(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]),
            Err(Error::UnboundedBall)
        ));
        let ok = NormSpec::polyhedral(
            2,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn polyhedral_rejects_complex_vectors() {
        let spec = NormSpec::polyhedral(
            2,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        )
        .unwrap();
        assert!(matches!(
            norm_eval(&spec, &cv(&[(1.0, 0.5), (0.0, 0.0)])),
            Err(Error::NotReal { .. })
        ));
    }

    #[test]
    fn metric_validation_catches_violations() {
        let zero_dist = RMat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0]);
        assert!(validate_metric(&zero_dist).is_err());
        let triangle = RMat::from_row_slice(3, 3, &[0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0]);
        assert!(validate_metric(&triangle).is_err());
    }

    #[test]
    fn norm_spec_json_round_trip() {
        let spec = NormSpec::block_sum(
            vec![
                NormSpec::lp(1.5, 2).unwrap(),
                NormSpec::hilbert(CMat::identity(2, 2)).unwrap(),
            ],
            RhoCombiner::WeightedOuterLp {
                p: 2.0,
                weights: vec![1.0, 3.0],
            },
        )
        .unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        let back: NormSpec = serde_json::from_str(&s).unwrap();
        back.validate().unwrap();
        let v = rv(&[0.3, -0.2, 0.9, 0.1]);
        assert_eq!(norm_eval(&spec, &v).unwrap(), norm_eval(&back, &v).unwrap());
    }

    #[test]
    fn weighted_outer_dual_closed_form() {
        // two 1-dim Hilbert blocks, weighted l2 outer: norm = sqrt(w1|v1|^2 + w2|v2|^2)
        // dual must be sqrt(|p1|^2/w1 + |p2|^2/w2)
        let spec = NormSpec::block_sum(
            vec![
                NormSpec::hilbert(CMat::identity(1, 1)).unwrap(),
                NormSpec::hilbert(CMat::identity(1, 1)).unwrap(),
            ],
            RhoCombiner::WeightedOuterLp {
                p: 2.0,
                weights: vec![4.0, 1.0],
            },
        )
        .unwrap();
        let d = dual_norm_eval(&spec, &rv(&[1.0, 0.0]), DEFAULT_TOL).unwrap();
        assert!((d - 0.5).abs() < 1e-12, "{d}");
    }
}
