//! Birkhoff orthogonality.
//!
//! A vector `e` is Birkhoff orthogonal to `f` (written `e ⊢ f`) when
//! `||e|| <= ||e + t f||` for every scalar `t` — complex `t` in general,
//! real `t` for norms over real scalars. The relation is not symmetric.
//!
//! Two independent decision routes are provided and kept separate on
//! purpose:
//!
//! * the *primal* route minimizes `||e + t f||` over `t` by nested
//!   golden-section search (the map `t -> ||e + t f||` is convex, so every
//!   line restriction is unimodal) and carries an explicit error
//!   certificate from the bracket width and the Lipschitz bound
//!   `| ||e + t1 f|| - ||e + t2 f|| | <= |t1 - t2| ||f||`;
//! * the *dual* route decides `e ⊢ f` by checking whether some norming
//!   functional of `e` annihilates `f`, using exact descriptions of the
//!   supporting face. It never calls the line search.

use std::cell::{Cell, RefCell};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::normed_space::{csign, ensure_real, norm_eval, NormEvaluator, NormSpec, ScalarField};
use crate::{CMat, CVec};

type C64 = Complex64;

/// Outcome of minimizing `||e + t f||` over scalars `t`.
#[derive(Clone, Copy, Debug)]
pub struct LineMinResult {
    /// Minimizing scalar found.
    pub t_star: C64,
    /// Minimum norm value found.
    pub value: f64,
    /// `value / ||e||` (1.0 when `||e|| = 0`).
    pub ratio: f64,
    /// Rigorous bound on how far `value` can sit above the true minimum.
    pub error_bound: f64,
    /// Whether `error_bound <= tol * ||e||`.
    pub certified: bool,
    /// Number of norm evaluations spent.
    pub evals: usize,
}

/// Tri-state orthogonality decision. `Indeterminate` marks ratios within
/// ten tolerances below the decision threshold, where the numerical margin
/// is too thin to trust either answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthoVerdict {
    Orthogonal,
    Indeterminate,
    NotOrthogonal,
}

/// Minimizes `||e + t f||` over scalars `t` through the evaluator `space`
/// (primal norm or dual view).
///
/// The minimizer satisfies `|t| <= 2 ||e|| / ||f||` (beyond that the reverse
/// triangle inequality forces `||e + t f|| > ||e||`), which brackets the
/// search. Complex scalars use a nested search: the partial minimum over the
/// imaginary part is itself convex in the real part.
pub fn min_norm_over_line<S: NormEvaluator + ?Sized>(
    space: &S,
    e: &CVec,
    f: &CVec,
    tol: f64,
) -> Result<LineMinResult> {
    if e.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: e.len(),
        });
    }
    if f.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: f.len(),
        });
    }
    let norm_e = space.eval(e)?;
    let norm_f = space.eval(f)?;
    if norm_f == 0.0 || norm_e == 0.0 {
        return Ok(LineMinResult {
            t_star: C64::new(0.0, 0.0),
            value: norm_e,
            ratio: 1.0,
            error_bound: 0.0,
            certified: true,
            evals: 2,
        });
    }
    let radius = 2.0 * norm_e / norm_f;

    let evals = Cell::new(2usize);
    let best_val = Cell::new(f64::INFINITY);
    let best_t = Cell::new(C64::new(0.0, 0.0));
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let buf = RefCell::new(e.clone());
    let g = |t: C64| -> f64 {
        if failure.borrow().is_some() {
            return f64::INFINITY;
        }
        let mut b = buf.borrow_mut();
        b.copy_from(e);
        b.axpy(t, f, C64::new(1.0, 0.0));
        evals.set(evals.get() + 1);
        match space.eval(&b) {
            Ok(v) => {
                if v < best_val.get() {
                    best_val.set(v);
                    best_t.set(t);
                }
                v
            }
            Err(err) => {
                *failure.borrow_mut() = Some(err);
                f64::INFINITY
            }
        }
    };

    // iterations to shrink a bracket of width `span` down to `target`
    let iters_for = |span: f64, target: f64| -> usize {
        let mut k = ((target / span).ln() / 0.618_033_988_749_894_9_f64.ln()).ceil();
        if !k.is_finite() || k < 0.0 {
            k = 0.0;
        }
        (k as usize + 2).min(140)
    };

    let err_bound;
    match space.scalar_field() {
        ScalarField::Real => {
            let span = 2.0 * radius;
            let target = 0.45 * tol * norm_e / norm_f;
            let it = iters_for(span, target);
            golden(|x| g(C64::new(x, 0.0)), -radius, radius, it);
            err_bound = span * 0.618_033_988_749_894_9_f64.powi(it as i32) * norm_f;
        }
        ScalarField::Complex => {
            // the inner minimizer at fixed real part stays within twice the
            // outer radius (same reverse-triangle argument against the value
            // at b = 0)
            let inner_radius = 2.0 * radius;
            let outer_span = 2.0 * radius;
            let inner_span = 2.0 * inner_radius;
            let target = 0.22 * tol * norm_e / norm_f;
            let it_outer = iters_for(outer_span, target);
            let it_inner = iters_for(inner_span, target);
            let h = |a: f64| {
                golden(|b| g(C64::new(a, b)), -inner_radius, inner_radius, it_inner).1
            };
            golden(h, -radius, radius, it_outer);
            let shrink = |span: f64, it: usize| span * 0.618_033_988_749_894_9_f64.powi(it as i32);
            err_bound =
                (shrink(outer_span, it_outer) + shrink(inner_span, it_inner)) * norm_f;
        }
    }
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let value = best_val.get().min(norm_e); // t = 0 is always admissible
    let t_star = if value < norm_e {
        best_t.get()
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(LineMinResult {
        t_star,
        value,
        ratio: value / norm_e,
        error_bound: err_bound,
        certified: err_bound <= tol * norm_e,
        evals: evals.get(),
    })
}

/// Golden-section minimization of a unimodal function; returns the best
/// probed point and value.
fn golden(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const IPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - IPHI * (hi - lo);
    let mut x2 = lo + IPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - IPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + IPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Primal-route tri-state decision for `e ⊢ f`, with the line-search
/// evidence.
pub fn birkhoff_verdict<S: NormEvaluator + ?Sized>(
    space: &S,
    e: &CVec,
    f: &CVec,
    tol: f64,
) -> Result<(OrthoVerdict, LineMinResult)> {
    let r = min_norm_over_line(space, e, f, tol)?;
    let v = if r.ratio >= 1.0 - tol {
        OrthoVerdict::Orthogonal
    } else if r.ratio >= 1.0 - 11.0 * tol {
        OrthoVerdict::Indeterminate
    } else {
        OrthoVerdict::NotOrthogonal
    };
    Ok((v, r))
}

/// Primal-route boolean decision for `e ⊢ f`.
pub fn is_birkhoff_orthogonal<S: NormEvaluator + ?Sized>(
    space: &S,
    e: &CVec,
    f: &CVec,
    tol: f64,
) -> Result<bool> {
    Ok(matches!(
        birkhoff_verdict(space, e, f, tol)?.0,
        OrthoVerdict::Orthogonal
    ))
}

/// Dual-route decision for `e ⊢ f`: does some norming functional of `e`
/// annihilate `f`?
///
/// Exact for norms with an exactly described supporting face: `Lp`,
/// `HilbertGram`, and `Polyhedral`. Other variants report
/// [`Error::ApproximateOnly`]. This route never evaluates `||e + t f||`.
pub fn is_birkhoff_orthogonal_dual(
    spec: &NormSpec,
    e: &CVec,
    f: &CVec,
    tol: f64,
) -> Result<bool> {
    let norm_e = norm_eval(spec, e)?;
    let norm_f = norm_eval(spec, f)?;
    if norm_e == 0.0 || norm_f == 0.0 {
        return Ok(true);
    }
    match spec {
        NormSpec::HilbertGram { gram } => {
            // unique norming functional conj(G e)/||e||
            let nu = (gram * e).map(|z| z.conj() / norm_e);
            let pairing: C64 = nu.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
            Ok(pairing.norm() <= tol * norm_f)
        }
        NormSpec::Lp { p, dim } => {
            if *p == 1.0 {
                // face: conj-sign on the support, any unit-disk values off
                // it; the pairing sweeps a disk centred at the support sum
                // with radius sum of |f| off the support
                let emax = e.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
                let mut centre = C64::new(0.0, 0.0);
                let mut radius = 0.0;
                for i in 0..*dim {
                    if e[i].norm() > tol * emax {
                        centre += f[i] * csign(e[i]).conj();
                    } else {
                        radius += f[i].norm();
                    }
                }
                Ok(centre.norm() <= radius + tol * norm_f)
            } else if p.is_infinite() || *p >= 1e308 {
                // extreme norming functionals are aligned deltas on peak
                // coordinates; zero must lie in the convex hull of the
                // pairings q_j = f_j conj(sign e_j)
                let emax = e.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
                let qs: Vec<C64> = (0..*dim)
                    .filter(|i| e[*i].norm() >= emax * (1.0 - tol))
                    .map(|i| f[i] * csign(e[i]).conj())
                    .collect();
                Ok(zero_in_hull(&qs, tol * norm_f))
            } else {
                let nu = CVec::from_iterator(
                    *dim,
                    (0..*dim).map(|i| {
                        let r = e[i].norm();
                        if r == 0.0 {
                            C64::new(0.0, 0.0)
                        } else {
                            csign(e[i]).conj() * (r / norm_e).powf(p - 1.0)
                        }
                    }),
                );
                let pairing: C64 = nu.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
                Ok(pairing.norm() <= tol * norm_f)
            }
        }
        NormSpec::Polyhedral { facets, .. } => {
            let x = ensure_real(e)?;
            let y = ensure_real(f)?;
            // pairings of f against active facets form a real interval;
            // zero must lie in it
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for c in facets {
                let s: f64 = c.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                if s >= norm_e * (1.0 - tol) {
                    let v: f64 = c.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            let scale = lo.abs().max(hi.abs()).max(norm_f);
            Ok(lo <= tol * scale && hi >= -tol * scale)
        }
        _ => Err(Error::ApproximateOnly {
            op: "dual-route orthogonality",
            supported: "Lp, HilbertGram, Polyhedral",
        }),
    }
}

/// Whether `0` lies in the convex hull of the given planar points, allowing
/// slack `eps`: true when some point is within `eps` of the origin or when
/// the points do not fit in an open half-plane.
fn zero_in_hull(qs: &[C64], eps: f64) -> bool {
    let live: Vec<C64> = qs.iter().copied().filter(|q| q.norm() > eps).collect();
    if live.len() < qs.len() {
        return true; // a pairing is already (numerically) zero
    }
    if live.is_empty() {
        return true;
    }
    if live.len() == 1 {
        return false;
    }
    let mut angles: Vec<f64> = live.iter().map(|q| q.im.atan2(q.re)).collect();
    angles.sort_by(f64::total_cmp);
    let mut max_gap = 0.0_f64;
    for w in angles.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap = max_gap.max(angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1]);
    max_gap <= std::f64::consts::PI + 1e-9
}

/// Evidence that two eigenvectors of an isometry with distinct unimodular
/// eigenvalues are mutually Birkhoff orthogonal.
#[derive(Clone, Copy, Debug)]
pub struct EigenOrthReport {
    pub alpha: C64,
    pub beta: C64,
    pub e_orth_f: OrthoVerdict,
    pub f_orth_e: OrthoVerdict,
    /// Line-search ratios backing the two verdicts.
    pub ratios: (f64, f64),
}

/// Checks mutual Birkhoff orthogonality of eigenvectors of an isometry.
///
/// Asserts that `e` and `f` are eigenvectors of `t_mat` (residual within
/// `tol` relative to the vector norm), that both eigenvalues are unimodular
/// within `tol`, and that they differ; then decides `e ⊢ f` and `f ⊢ e` by
/// the primal route. For a genuine isometry both verdicts must be
/// `Orthogonal`.
pub fn isometric_eigenvector_orthogonality(
    spec: &NormSpec,
    t_mat: &CMat,
    e: &CVec,
    f: &CVec,
    tol: f64,
) -> Result<EigenOrthReport> {
    let alpha = eigenvalue_of(spec, t_mat, e, tol)?;
    let beta = eigenvalue_of(spec, t_mat, f, tol)?;
    if (alpha.norm() - 1.0).abs() > tol || (beta.norm() - 1.0).abs() > tol {
        return Err(Error::NotIsometric(format!(
            "eigenvalues {alpha} and {beta} are not unimodular"
        )));
    }
    if (alpha - beta).norm() <= tol {
        return Err(Error::Invalid(
            "eigenvalues coincide; mutual orthogonality is not implied".into(),
        ));
    }
    let (v_ef, r_ef) = birkhoff_verdict(spec, e, f, tol)?;
    let (v_fe, r_fe) = birkhoff_verdict(spec, f, e, tol)?;
    Ok(EigenOrthReport {
        alpha,
        beta,
        e_orth_f: v_ef,
        f_orth_e: v_fe,
        ratios: (r_ef.ratio, r_fe.ratio),
    })
}

/// Eigenvalue of `t_mat` at eigenvector `v` (largest-modulus coordinate as
/// pivot), verifying the residual in the norm of `spec`.
fn eigenvalue_of(spec: &NormSpec, t_mat: &CMat, v: &CVec, tol: f64) -> Result<C64> {
    if t_mat.nrows() != v.len() || t_mat.ncols() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: t_mat.nrows().max(t_mat.ncols()),
        });
    }
    let tv = t_mat * v;
    let pivot = (0..v.len())
        .max_by(|a, b| v[*a].norm().total_cmp(&v[*b].norm()))
        .ok_or(Error::ZeroVector)?;
    if v[pivot].norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let lambda = tv[pivot] / v[pivot];
    let residual = norm_eval(spec, &(&tv - v * lambda))?;
    let scale = norm_eval(spec, v)?;
    if residual > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotAnEigenvector {
            point: pivot,
            residual,
        });
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normed_space::DualView;
    use crate::{CMat, DEFAULT_TOL};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(entries: &[f64]) -> CVec {
        CVec::from_iterator(entries.len(), entries.iter().map(|a| C64::new(*a, 0.0)))
    }

    fn cv(entries: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(entries.len(), entries.iter().map(|(a, b)| C64::new(*a, *b)))
    }

    fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
        CVec::from_iterator(
            n,
            (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)),
        )
    }

    /// Independent oracle: in a Hilbert space the minimum of ||e + t f||
    /// over complex t is sqrt(||e||^2 - |<e, f>|^2 / ||f||^2) with the
    /// G-inner product — no line search involved.
    #[test]
    fn line_search_matches_hilbert_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let n = 2 + (rng.random::<u32>() % 3) as usize;
            let a = CMat::from_fn(n, n, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let gram = &a * a.adjoint() + CMat::identity(n, n).scale(0.5);
            let spec = NormSpec::hilbert(gram.clone()).unwrap();
            let e = random_cvec(&mut rng, n);
            let f = random_cvec(&mut rng, n);
            let ip = |u: &CVec, v: &CVec| -> C64 { v.dotc(&(&gram * u)) };
            let ne2 = ip(&e, &e).re;
            let nf2 = ip(&f, &f).re;
            let cross = ip(&e, &f);
            let oracle = (ne2 - cross.norm_sqr() / nf2).max(0.0).sqrt();
            let got = min_norm_over_line(&spec, &e, &f, DEFAULT_TOL).unwrap();
            assert!(got.certified, "not certified");
            assert!(
                (got.value - oracle).abs() <= 1e-6 * ne2.sqrt().max(1.0),
                "{} vs {oracle}",
                got.value
            );
        }
    }

    #[test]
    fn sup_norm_asymmetry_witness() {
        let spec = NormSpec::lp(f64::INFINITY, 2).unwrap();
        let e = rv(&[1.0, 1.0]);
        let f = rv(&[0.0, 1.0]);
        // e ⊢ f: the first coordinate stays 1
        let (v1, r1) = birkhoff_verdict(&spec, &e, &f, DEFAULT_TOL).unwrap();
        assert_eq!(v1, OrthoVerdict::Orthogonal);
        assert!((r1.value - 1.0).abs() < 1e-7);
        // f not ⊢ e: minimum 1/2 at t = -1/2
        let (v2, r2) = birkhoff_verdict(&spec, &f, &e, DEFAULT_TOL).unwrap();
        assert_eq!(v2, OrthoVerdict::NotOrthogonal);
        assert!((r2.value - 0.5).abs() < 1e-7, "{}", r2.value);
        assert!((r2.t_star - C64::new(-0.5, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn primal_and_dual_agree_on_curated_cases() {
        let cases: Vec<(NormSpec, CVec, CVec, bool)> = vec![
            (
                NormSpec::lp(2.0, 2).unwrap(),
                rv(&[1.0, 0.0]),
                rv(&[0.0, 1.0]),
                true,
            ),
            (
                NormSpec::lp(2.0, 2).unwrap(),
                rv(&[1.0, 0.0]),
                rv(&[1.0, 1.0]),
                false,
            ),
            (
                NormSpec::lp(f64::INFINITY, 2).unwrap(),
                rv(&[1.0, 1.0]),
                rv(&[1.0, -1.0]),
                true,
            ),
            (
                NormSpec::lp(f64::INFINITY, 2).unwrap(),
                rv(&[1.0, 1.0]),
                rv(&[1.0, 1.0]),
                false,
            ),
            (
                NormSpec::lp(1.0, 2).unwrap(),
                rv(&[1.0, -2.0]),
                rv(&[1.0, 1.0]),
                true,
            ),
            (
                NormSpec::lp(1.0, 2).unwrap(),
                rv(&[1.0, 0.0]),
                rv(&[0.0, 1.0]),
                true,
            ),
            (
                NormSpec::lp(1.0, 2).unwrap(),
                rv(&[1.0, 2.0]),
                rv(&[1.0, 1.0]),
                false,
            ),
            (
                NormSpec::lp(1.5, 3).unwrap(),
                cv(&[(1.0, 0.5), (0.0, -1.0), (0.3, 0.0)]),
                cv(&[(0.2, 0.1), (-0.4, 0.0), (1.0, 1.0)]),
                false,
            ),
        ];
        for (i, (spec, e, f, expect)) in cases.iter().enumerate() {
            let primal = is_birkhoff_orthogonal(spec, e, f, DEFAULT_TOL).unwrap();
            let dual = is_birkhoff_orthogonal_dual(spec, e, f, DEFAULT_TOL).unwrap();
            assert_eq!(primal, *expect, "case {i} primal");
            assert_eq!(dual, *expect, "case {i} dual");
        }
        // polyhedral square, real scalars
        let sq = NormSpec::polyhedral(
            2,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        )
        .unwrap();
        let e = rv(&[1.0, 1.0]);
        let f = rv(&[1.0, -1.0]);
        assert!(is_birkhoff_orthogonal(&sq, &e, &f, DEFAULT_TOL).unwrap());
        assert!(is_birkhoff_orthogonal_dual(&sq, &e, &f, DEFAULT_TOL).unwrap());
        assert!(!is_birkhoff_orthogonal(&sq, &e, &e, DEFAULT_TOL).unwrap());
        assert!(!is_birkhoff_orthogonal_dual(&sq, &e, &e, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn dual_view_line_search_works() {
        // in the dual of l^inf (= l^1), (1,1) is orthogonal to nothing like
        // (1,-1)... sanity: dual view evaluates the l^1 norm
        let spec = NormSpec::lp(f64::INFINITY, 2).unwrap();
        let dual = DualView::new(&spec, DEFAULT_TOL).unwrap();
        let e = rv(&[1.0, 0.0]);
        let f = rv(&[0.0, 1.0]);
        let r = min_norm_over_line(&dual, &e, &f, DEFAULT_TOL).unwrap();
        // min over t of |1| + |t| = 1 = ||e||_1
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!(r.certified);
    }

    #[test]
    fn grid_oracle_agrees_on_random_lp_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for &p in &[1.0, 1.7, 3.0, f64::INFINITY] {
            let spec = NormSpec::lp(p, 3).unwrap();
            for _ in 0..5 {
                let e = random_cvec(&mut rng, 3);
                let f = random_cvec(&mut rng, 3);
                let got = min_norm_over_line(&spec, &e, &f, DEFAULT_TOL).unwrap();
                // coarse independent grid search with local refinement
                let ne = norm_eval(&spec, &e).unwrap();
                let nf = norm_eval(&spec, &f).unwrap();
                let r = 2.0 * ne / nf;
                let mut best = f64::INFINITY;
                let mut tb = C64::new(0.0, 0.0);
                let m = 60;
                for i in 0..=m {
                    for j in 0..=m {
                        let t = C64::new(
                            -r + 2.0 * r * i as f64 / m as f64,
                            -r + 2.0 * r * j as f64 / m as f64,
                        );
                        let v = norm_eval(&spec, &(&e + &f * t)).unwrap();
                        if v < best {
                            best = v;
                            tb = t;
                        }
                    }
                }
                let mut h = 2.0 * r / m as f64;
                while h > 1e-9 {
                    let mut improved = false;
                    for k in 0..16 {
                        let th = std::f64::consts::TAU * k as f64 / 16.0;
                        let d = C64::new(h * th.cos(), h * th.sin());
                        let v = norm_eval(&spec, &(&e + &f * (tb + d))).unwrap();
                        if v < best {
                            best = v;
                            tb += d;
                            improved = true;
                        }
                    }
                    if !improved {
                        h *= 0.5;
                    }
                }
                // both values upper-bound the true minimum m*; the search is
                // certified within error_bound of m*, while the coarse grid
                // guarantees a probe within half a cell diagonal of the true
                // minimizer, hence best <= m* + ||f|| * sqrt(2) * (2r/m) / 2.
                assert!(
                    got.value <= best + got.error_bound + 1e-9,
                    "p={p}: search {} exceeds grid {best}",
                    got.value
                );
                let grid_slack = nf * std::f64::consts::SQRT_2 * r / m as f64;
                assert!(
                    best <= got.value + got.error_bound + grid_slack + 1e-9,
                    "p={p}: grid {best} far above search {}",
                    got.value
                );
            }
        }
    }

    #[test]
    fn eigenvector_orthogonality_for_coordinate_swap() {
        // T swaps the two coordinates of l^inf: eigenvectors (1,1) and
        // (1,-1) with eigenvalues 1 and -1 must be mutually orthogonal
        let spec = NormSpec::lp(f64::INFINITY, 2).unwrap();
        let t_mat = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let e = rv(&[1.0, 1.0]);
        let f = rv(&[1.0, -1.0]);
        let rep = isometric_eigenvector_orthogonality(&spec, &t_mat, &e, &f, DEFAULT_TOL).unwrap();
        assert_eq!(rep.e_orth_f, OrthoVerdict::Orthogonal);
        assert_eq!(rep.f_orth_e, OrthoVerdict::Orthogonal);
        assert!((rep.alpha - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((rep.beta - C64::new(-1.0, 0.0)).norm() < 1e-12);
        // same-eigenvalue pairs are rejected
        let err = isometric_eigenvector_orthogonality(&spec, &t_mat, &e, &e, DEFAULT_TOL);
        assert!(err.is_err());
    }

    #[test]
    fn non_eigenvector_is_rejected() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        let t_mat = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 1.0),
            ],
        );
        let not_eig = rv(&[1.0, 1.0]);
        let f = rv(&[0.0, 1.0]);
        assert!(matches!(
            isometric_eigenvector_orthogonality(&spec, &t_mat, &not_eig, &f, DEFAULT_TOL),
            Err(Error::NotAnEigenvector { .. })
        ));
    }

    #[test]
    fn zero_vectors_are_trivially_orthogonal() {
        let spec = NormSpec::lp(2.0, 2).unwrap();
        let z = rv(&[0.0, 0.0]);
        let f = rv(&[1.0, 0.0]);
        assert!(is_birkhoff_orthogonal(&spec, &z, &f, DEFAULT_TOL).unwrap());
        assert!(is_birkhoff_orthogonal(&spec, &f, &z, DEFAULT_TOL).unwrap());
    }
}
