//! Supporting faces of norm balls.
//!
//! For a nonzero vector `e`, the supporting face is the set of norming
//! functionals `nu` with `nu(e) = ||e||` and dual norm 1. Smooth norms have a
//! unique norming functional; polyhedral norms have a polytope of them
//! spanned by active facets; the remaining variants are described by finite
//! samples.
//!
//! All dimensions reported by this module are *real* affine dimensions
//! (a complex disk of coefficients counts as 2).

use num_complex::Complex64;

use super::{
    csign, dil_values, ensure_dim, ensure_finite, ensure_real, lipschitz_values, norm_eval,
    real_rank, split_blocks, Functional, NormSpec, RhoCombiner,
};
use crate::error::{Error, Result};
use crate::{CVec, RMat};

type C64 = Complex64;

/// Description of the supporting face of a vector.
#[derive(Clone, Debug)]
pub enum FaceDescription {
    /// The unique norming functional (smooth point).
    Singleton(Functional),
    /// Active facet functionals of a polyhedral norm; the face is their
    /// convex hull.
    ActiveFacets(Vec<Functional>),
    /// Finite set of norming functionals. `approximate = false` means the
    /// list is the complete set of extreme points of the face; otherwise it
    /// is a sample.
    Sampled {
        samples: Vec<Functional>,
        approximate: bool,
    },
}

impl FaceDescription {
    /// Norming functionals carried by the description.
    pub fn representatives(&self) -> Vec<&Functional> {
        match self {
            FaceDescription::Singleton(f) => vec![f],
            FaceDescription::ActiveFacets(v) => v.iter().collect(),
            FaceDescription::Sampled { samples, .. } => samples.iter().collect(),
        }
    }

    /// Whether the description is guaranteed complete (every extreme norming
    /// functional is listed or implied).
    pub fn is_exact(&self) -> bool {
        match self {
            FaceDescription::Singleton(_) => true,
            FaceDescription::ActiveFacets(_) => true,
            FaceDescription::Sampled { approximate, .. } => !approximate,
        }
    }
}

/// Computes the supporting face of `e`.
pub fn support_face(spec: &NormSpec, e: &CVec, tol: f64) -> Result<FaceDescription> {
    ensure_dim(spec, e)?;
    ensure_finite(e)?;
    let norm = norm_eval(spec, e)?;
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    match spec {
        NormSpec::Lp { p, dim } => lp_face(*p, *dim, e, norm, tol),
        NormSpec::HilbertGram { gram } => {
            let nu = (gram * e).map(|z| z.conj() / norm);
            Ok(FaceDescription::Singleton(Functional::new(nu)))
        }
        NormSpec::Polyhedral { facets, .. } => {
            let x = ensure_real(e)?;
            let mut active = Vec::new();
            for f in facets {
                let s: f64 = f.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                if s >= norm * (1.0 - tol) {
                    let coeffs = CVec::from_iterator(x.len(), f.iter().map(|c| C64::new(*c, 0.0)));
                    active.push(Functional::new(coeffs));
                }
            }
            Ok(FaceDescription::ActiveFacets(active))
        }
        NormSpec::LipschitzFin {
            metric,
            basepoint,
            penalize_basepoint,
        } => lipschitz_face(spec, metric, *basepoint, *penalize_basepoint, e, tol),
        NormSpec::BlockSum { blocks, combiner } => {
            block_sum_face(blocks, combiner, e, norm, tol)
        }
    }
}

fn lp_face(p: f64, dim: usize, e: &CVec, norm: f64, tol: f64) -> Result<FaceDescription> {
    let emax = e.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if p == 1.0 {
        let off: Vec<usize> = (0..dim).filter(|i| e[*i].norm() <= tol * emax).collect();
        let base = CVec::from_iterator(
            dim,
            (0..dim).map(|i| {
                if e[i].norm() <= tol * emax {
                    C64::new(0.0, 0.0)
                } else {
                    csign(e[i]).conj()
                }
            }),
        );
        if off.is_empty() {
            return Ok(FaceDescription::Singleton(Functional::new(base)));
        }
        // sample extreme completions: unimodular phases on the zero set
        let mut samples = vec![Functional::new(base.clone())];
        for k in 0..8usize {
            let mut nu = base.clone();
            for (t, i) in off.iter().enumerate() {
                let th = std::f64::consts::FRAC_PI_4 * ((k + t) % 8) as f64;
                nu[*i] = C64::new(th.cos(), th.sin());
            }
            samples.push(Functional::new(nu));
        }
        Ok(FaceDescription::Sampled {
            samples,
            approximate: true,
        })
    } else if p.is_infinite() || p >= 1e308 {
        let peaks: Vec<usize> = (0..dim)
            .filter(|i| e[*i].norm() >= emax * (1.0 - tol))
            .collect();
        let samples: Vec<Functional> = peaks
            .iter()
            .map(|j| {
                let mut nu = CVec::zeros(dim);
                nu[*j] = csign(e[*j]).conj();
                Functional::new(nu)
            })
            .collect();
        if samples.len() == 1 {
            return Ok(FaceDescription::Singleton(samples.into_iter().next().unwrap()));
        }
        // the extreme points of the face are exactly the aligned deltas on
        // peak coordinates
        Ok(FaceDescription::Sampled {
            samples,
            approximate: false,
        })
    } else {
        let nu = CVec::from_iterator(
            dim,
            (0..dim).map(|i| {
                let r = e[i].norm();
                if r == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    csign(e[i]).conj() * (r / norm).powf(p - 1.0)
                }
            }),
        );
        Ok(FaceDescription::Singleton(Functional::new(nu)))
    }
}

fn lipschitz_face(
    spec: &NormSpec,
    metric: &RMat,
    z: usize,
    penalize: bool,
    e: &CVec,
    tol: f64,
) -> Result<FaceDescription> {
    let m = metric.nrows();
    let vals = lipschitz_values(spec, e)?;
    let d = dil_values(metric, &vals);
    let scale = vals.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);

    // value-space generators of the dilation subdifferential: aligned
    // difference quotients over pairs achieving the dilation
    let mut pair_gens: Vec<CVec> = Vec::new();
    if d > 1e-14 * scale {
        'outer: for i in 0..m {
            for j in (i + 1)..m {
                let diff = vals[i] - vals[j];
                if diff.norm() / metric[(i, j)] >= d * (1.0 - tol) {
                    let mut g = CVec::zeros(m);
                    let s = csign(diff).conj() / metric[(i, j)];
                    g[i] = s;
                    g[j] = -s;
                    pair_gens.push(g);
                    if pair_gens.len() >= 24 {
                        break 'outer;
                    }
                }
            }
        }
    }
    let project = |v: &CVec| -> CVec {
        if penalize {
            v.clone()
        } else {
            CVec::from_iterator(m - 1, (0..m).filter(|i| *i != z).map(|i| v[i]))
        }
    };
    let mut samples: Vec<Functional> = Vec::new();
    if penalize {
        let mut base = CVec::zeros(m);
        base[z] = csign(vals[z]).conj();
        if vals[z].norm() <= 1e-14 * scale && pair_gens.is_empty() {
            // degenerate: e = 0 is excluded, so this cannot happen
            return Err(Error::ZeroVector);
        }
        if pair_gens.is_empty() {
            samples.push(Functional::new(project(&base)));
        } else if vals[z].norm() <= 1e-14 * scale {
            // the basepoint term contributes nothing to the norm; pair
            // generators alone are norming, with or without a basepoint part
            for g in &pair_gens {
                samples.push(Functional::new(project(g)));
            }
            samples.push(Functional::new(project(&(&pair_gens[0] + &base))));
        } else {
            for g in &pair_gens {
                samples.push(Functional::new(project(&(g + &base))));
            }
        }
    } else {
        for g in &pair_gens {
            samples.push(Functional::new(project(g)));
        }
    }
    if samples.is_empty() {
        return Err(Error::ZeroVector);
    }
    Ok(FaceDescription::Sampled {
        samples,
        approximate: true,
    })
}

fn block_sum_face(
    blocks: &[NormSpec],
    combiner: &RhoCombiner,
    e: &CVec,
    norm: f64,
    tol: f64,
) -> Result<FaceDescription> {
    let parts = split_blocks(blocks, e);
    let mut norms = Vec::with_capacity(blocks.len());
    for (b, part) in blocks.iter().zip(parts.iter()) {
        norms.push(norm_eval(b, part)?);
    }
    let lambda = outer_subgradient(combiner, &norms, norm);
    let mut block_lists: Vec<Vec<CVec>> = Vec::with_capacity(blocks.len());
    for ((b, part), (l, r)) in blocks
        .iter()
        .zip(parts.iter())
        .zip(lambda.iter().zip(norms.iter()))
    {
        if *r == 0.0 || *l == 0.0 {
            block_lists.push(vec![CVec::zeros(b.dim())]);
        } else {
            let face = support_face(b, part, tol)?;
            let reps: Vec<CVec> = face
                .representatives()
                .into_iter()
                .map(|f| f.coeffs.clone())
                .collect();
            block_lists.push(reps);
        }
    }
    let k_max = block_lists.iter().map(Vec::len).max().unwrap_or(1).min(8);
    let dim: usize = blocks.iter().map(NormSpec::dim).sum();
    let mut samples = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let mut nu = CVec::zeros(dim);
        let mut off = 0;
        for (bi, b) in blocks.iter().enumerate() {
            let list = &block_lists[bi];
            let rep = &list[k % list.len()];
            for i in 0..b.dim() {
                nu[off + i] = lambda[bi] * rep[i];
            }
            off += b.dim();
        }
        samples.push(Functional::new(nu));
    }
    Ok(FaceDescription::Sampled {
        samples,
        approximate: true,
    })
}

/// Subgradient of the outer combiner at the block-norm vector, normalized so
/// that `sum_b lambda_b r_b = rho(r)` and the dual combiner norm of `lambda`
/// is 1.
fn outer_subgradient(c: &RhoCombiner, r: &[f64], rho: f64) -> Vec<f64> {
    match c {
        RhoCombiner::OuterLp { p } => {
            if *p == 1.0 {
                vec![1.0; r.len()]
            } else if p.is_infinite() || *p >= 1e308 {
                let mut l = vec![0.0; r.len()];
                if let Some(k) = (0..r.len()).max_by(|a, b| r[*a].total_cmp(&r[*b])) {
                    l[k] = 1.0;
                }
                l
            } else {
                r.iter().map(|x| (x / rho).powf(p - 1.0)).collect()
            }
        }
        RhoCombiner::WeightedOuterLp { p, weights } => {
            if *p == 1.0 {
                weights.clone()
            } else {
                r.iter()
                    .zip(weights.iter())
                    .map(|(x, w)| w * (x / rho).powf(p - 1.0))
                    .collect()
            }
        }
    }
}

/// Real affine dimension of the supporting face of `e` (the set of norming
/// functionals in the dual ball). Exact for `Lp`, `HilbertGram`, and
/// `Polyhedral`; other variants report [`Error::ApproximateOnly`].
pub fn face_dimension(spec: &NormSpec, e: &CVec, tol: f64) -> Result<usize> {
    ensure_dim(spec, e)?;
    ensure_finite(e)?;
    let norm = norm_eval(spec, e)?;
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    match spec {
        NormSpec::Lp { p, dim } => {
            let emax = e.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
            if *p == 1.0 {
                let zeros = (0..*dim).filter(|i| e[*i].norm() <= tol * emax).count();
                Ok(2 * zeros)
            } else if p.is_infinite() || *p >= 1e308 {
                let peaks = (0..*dim)
                    .filter(|i| e[*i].norm() >= emax * (1.0 - tol))
                    .count();
                Ok(peaks - 1)
            } else {
                Ok(0)
            }
        }
        NormSpec::HilbertGram { .. } => Ok(0),
        NormSpec::Polyhedral { facets, .. } => {
            let x = ensure_real(e)?;
            let active: Vec<&Vec<f64>> = facets
                .iter()
                .filter(|f| {
                    let s: f64 = f.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                    s >= norm * (1.0 - tol)
                })
                .collect();
            Ok(affine_rank(&active))
        }
        _ => Err(Error::ApproximateOnly {
            op: "face_dimension",
            supported: "Lp, HilbertGram, Polyhedral",
        }),
    }
}

/// Affine rank (dimension of the affine hull) of a set of real vectors.
fn affine_rank(rows: &[&Vec<f64>]) -> usize {
    if rows.len() <= 1 {
        return 0;
    }
    let d = rows[0].len();
    let diffs = RMat::from_fn(rows.len() - 1, d, |i, j| rows[i + 1][j] - rows[0][j]);
    real_rank(&diffs, 1e-9)
}

/// Real affine dimension of the largest convex subset of the unit sphere
/// containing `e`. Requires `||e|| = 1` within `tol` ([`Error::OffSphere`]
/// otherwise). Exact for `Lp`, `HilbertGram`, `Polyhedral`, and block sums of
/// such pieces with a finite outer exponent; `LipschitzFin` and outer-sup
/// combiners report [`Error::ApproximateOnly`].
pub fn sphere_face_dimension(spec: &NormSpec, e: &CVec, tol: f64) -> Result<usize> {
    ensure_dim(spec, e)?;
    ensure_finite(e)?;
    let norm = norm_eval(spec, e)?;
    if (norm - 1.0).abs() > tol {
        return Err(Error::OffSphere { norm });
    }
    max_face_through(spec, e, norm, tol)
}

fn max_face_through(spec: &NormSpec, e: &CVec, norm: f64, tol: f64) -> Result<usize> {
    match spec {
        NormSpec::HilbertGram { .. } => Ok(0),
        NormSpec::Lp { p, dim } => {
            if *p == 1.0 {
                Ok(dim - 1)
            } else if p.is_infinite() || *p >= 1e308 {
                Ok(2 * (dim - 1))
            } else {
                Ok(0)
            }
        }
        NormSpec::Polyhedral { facets, .. } => {
            let x = ensure_real(e)?;
            let mut best = 0usize;
            let mut any = false;
            for (j, f) in facets.iter().enumerate() {
                let s: f64 = f.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                if s >= norm * (1.0 - tol) {
                    best = best.max(facet_face_dim(facets, j)?);
                    any = true;
                }
            }
            if !any {
                return Err(Error::OffSphere { norm });
            }
            Ok(best)
        }
        NormSpec::LipschitzFin { .. } => Err(Error::ApproximateOnly {
            op: "sphere_face_dimension",
            supported: "Lp, HilbertGram, Polyhedral, finite-exponent BlockSum",
        }),
        NormSpec::BlockSum { blocks, combiner } => {
            let p = match combiner {
                RhoCombiner::OuterLp { p } => *p,
                RhoCombiner::WeightedOuterLp { p, .. } => *p,
            };
            if p.is_infinite() || p >= 1e308 {
                return Err(Error::ApproximateOnly {
                    op: "sphere_face_dimension",
                    supported: "finite outer exponents",
                });
            }
            let parts = split_blocks(blocks, e);
            let mut norms = Vec::with_capacity(blocks.len());
            for (b, part) in blocks.iter().zip(parts.iter()) {
                norms.push(norm_eval(b, part)?);
            }
            if p == 1.0 {
                // faces are joins of cones over block faces
                let mut total = 0usize;
                for ((b, part), r) in blocks.iter().zip(parts.iter()).zip(norms.iter()) {
                    let cone_dim = if *r > 0.0 {
                        max_face_through(b, &part.unscale(*r), 1.0, tol)? + 1
                    } else {
                        global_max_face(b)? + 1
                    };
                    total += cone_dim;
                }
                Ok(total - 1)
            } else {
                // a strictly convex outer norm pins the block-norm allocation,
                // so faces are products of block faces
                let mut total = 0usize;
                for ((b, part), r) in blocks.iter().zip(parts.iter()).zip(norms.iter()) {
                    if *r > 0.0 {
                        total += max_face_through(b, &part.unscale(*r), 1.0, tol)?;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Largest face dimension anywhere on the unit sphere of `spec`.
fn global_max_face(spec: &NormSpec) -> Result<usize> {
    match spec {
        NormSpec::HilbertGram { .. } => Ok(0),
        NormSpec::Lp { p, dim } => {
            if *p == 1.0 {
                Ok(dim - 1)
            } else if p.is_infinite() || *p >= 1e308 {
                Ok(2 * (dim - 1))
            } else {
                Ok(0)
            }
        }
        NormSpec::Polyhedral { facets, .. } => {
            let mut best = 0usize;
            for j in 0..facets.len() {
                best = best.max(facet_face_dim(facets, j)?);
            }
            Ok(best)
        }
        NormSpec::LipschitzFin { .. } => Err(Error::ApproximateOnly {
            op: "sphere_face_dimension",
            supported: "Lp, HilbertGram, Polyhedral, finite-exponent BlockSum",
        }),
        NormSpec::BlockSum { blocks, combiner } => {
            let p = match combiner {
                RhoCombiner::OuterLp { p } => *p,
                RhoCombiner::WeightedOuterLp { p, .. } => *p,
            };
            if p.is_infinite() || p >= 1e308 {
                return Err(Error::ApproximateOnly {
                    op: "sphere_face_dimension",
                    supported: "finite outer exponents",
                });
            }
            let mut total = 0usize;
            if p == 1.0 {
                for b in blocks {
                    total += global_max_face(b)? + 1;
                }
                Ok(total - 1)
            } else {
                for b in blocks {
                    total += global_max_face(b)?;
                }
                Ok(total)
            }
        }
    }
}

/// Affine dimension of the face cut out by facet `j`: the facet hyperplane
/// intersected with every constraint forced to equality on it.
fn facet_face_dim(facets: &[Vec<f64>], j: usize) -> Result<usize> {
    let d = facets[j].len();
    let mut forced: Vec<&Vec<f64>> = vec![&facets[j]];
    for (k, f) in facets.iter().enumerate() {
        if k != j {
            let mn = crate::lp::facet_face_min(facets, j, k)?;
            if mn >= 1.0 - 1e-7 {
                forced.push(f);
            }
        }
    }
    let mat = RMat::from_fn(forced.len(), d, |i, c| forced[i][c]);
    Ok(d - real_rank(&mat, 1e-9))
}
