//! Rigidity of multiplication operators.
//!
//! A multiplication operator multiplies functions pointwise by a weight
//! `ω`; on a model it is a matrix `T` on coefficient space with
//! `diag(ω) B = B T`. Equivalently every point evaluation is an eigenvector
//! of the transpose action, with `ω(x)` its eigenvalue. When such an
//! operator is unitary (isometric and invertible) and the Birkhoff graph is
//! connected, the weight is forced to be a single unimodular constant: the
//! eigenvalues propagate across graph edges because eigenvectors of an
//! isometry with distinct unimodular eigenvalues are mutually Birkhoff
//! orthogonal — so adjacent (non-orthogonal) evaluations must share their
//! eigenvalue.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::birkhoff_graph::{build_graph, BirkhoffGraph};
use crate::error::{Error, Result};
use crate::function_space::FunctionSpaceModel;
use crate::normed_space::{complex_rank, norm_eval, NormEvaluator, NormSpec};
use crate::{CMat, CVec};

type C64 = Complex64;

/// Condition-number ceiling for "invertible at working precision".
pub const INVERTIBILITY_COND_LIMIT: f64 = 1e8;

/// Outcome of testing whether an operator acts as multiplication by a
/// pointwise weight.
#[derive(Clone, Debug, PartialEq)]
pub enum MoDetection {
    /// Per-point weight values. Points whose evaluation functional vanishes
    /// do not constrain the weight; they carry the neutral value 1.
    Weight(Vec<C64>),
    /// First point whose evaluation is not an eigenvector of the transpose
    /// action, with the relative residual.
    NotMo { point: usize, residual: f64 },
}

/// Tests whether `T` is a multiplication operator on the model: each point
/// evaluation `x_F` must be an eigenvector of the transpose action
/// `x_F ∘ T`, and the eigenvalue is the weight at `x`.
///
/// Collinearity uses the largest-modulus coordinate as pivot and requires
/// the residual to be at most `tol` relative to the evaluation's dual norm.
pub fn detect_mo(model: &FunctionSpaceModel, t_mat: &CMat, tol: f64) -> Result<MoDetection> {
    let k = model.coeff_dim();
    if t_mat.nrows() != k || t_mat.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: t_mat.nrows().max(t_mat.ncols()),
        });
    }
    let dual = model.dual_space_view(tol)?;
    let mut weight = Vec::with_capacity(model.num_points());
    for x in 0..model.num_points() {
        let phi = model.point_evaluation_at(x).coeffs;
        let scale = phi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale <= 1e-12 {
            weight.push(C64::new(1.0, 0.0));
            continue;
        }
        // bilinear transpose action: (phi ∘ T)(c) = phi(Tc) = (T^T phi)(c)
        let tphi = t_mat.transpose() * &phi;
        let pivot = (0..k)
            .max_by(|a, b| phi[*a].norm().total_cmp(&phi[*b].norm()))
            .unwrap();
        let w = tphi[pivot] / phi[pivot];
        let residual_vec = &tphi - &phi * w;
        let denom = dual.eval(&phi)?;
        let residual = dual.eval(&residual_vec)? / denom.max(f64::MIN_POSITIVE);
        if residual > tol {
            return Ok(MoDetection::NotMo { point: x, residual });
        }
        weight.push(w);
    }
    Ok(MoDetection::Weight(weight))
}

/// Builds the multiplication-operator matrix for a pointwise weight, if the
/// weight is a multiplier of the model: solves `B T = diag(ω) B` by least
/// squares and accepts when the residual is at most `tol · ||B||`.
///
/// Returns `None` when the weight is not a multiplier (the least-squares
/// residual certifies that `ω·f` leaves the span of the basis).
pub fn mo_from_weight(
    model: &FunctionSpaceModel,
    omega: &[C64],
    tol: f64,
) -> Result<Option<CMat>> {
    let m = model.num_points();
    let k = model.coeff_dim();
    if omega.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: omega.len(),
        });
    }
    let rank = complex_rank(&model.basis, 1e-10);
    if rank < k {
        return Err(Error::RankDeficientBasis { rank, cols: k });
    }
    // target: row x of B scaled by omega(x)
    let target = CMat::from_fn(m, k, |i, j| omega[i] * model.basis[(i, j)]);
    let svd = model.basis.clone().svd(true, true);
    let t_mat = svd
        .solve(&target, 1e-12)
        .map_err(|e| Error::Invalid(format!("least squares failed: {e}")))?;
    let residual = (&model.basis * &t_mat - &target).norm();
    let scale = model.basis.norm();
    if residual <= tol * scale.max(f64::MIN_POSITIVE) {
        Ok(Some(t_mat))
    } else {
        Ok(None)
    }
}

/// How isometry was checked, and how sure the check is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsometryEvidence {
    /// Gram identity `T^H G T = G` verified entrywise — a proof at working
    /// precision (Hilbert norms only).
    Exact,
    /// The matrix is a phase-scaled permutation, which preserves every
    /// `l^p` norm exactly — structural proof.
    Structural,
    /// `n` random unit vectors all mapped to norm `1` within `tol`;
    /// evidence, not proof.
    Sampled { n: usize, max_deviation: f64 },
}

/// Isometry check mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryMode {
    /// Entrywise Gram identity; requires a Hilbert coefficient norm.
    ExactHilbert,
    /// Random unit vectors, seeded for reproducibility.
    Sampled { n: usize, seed: u64 },
    /// Pick the strongest check the norm admits: exact for Hilbert,
    /// structural for phase-permutations on `l^p`, else sampled.
    Auto { n: usize, seed: u64 },
}

/// Whether `t_mat` is a phase-scaled permutation matrix: exactly one
/// nonzero unimodular entry per row and per column (within `tol`).
fn is_phase_permutation(t_mat: &CMat, tol: f64) -> bool {
    let k = t_mat.nrows();
    if t_mat.ncols() != k {
        return false;
    }
    let mut col_used = vec![false; k];
    for i in 0..k {
        let mut found = None;
        for j in 0..k {
            let r = t_mat[(i, j)].norm();
            if r > tol {
                if found.is_some() || (r - 1.0).abs() > tol {
                    return false;
                }
                found = Some(j);
            }
        }
        match found {
            Some(j) if !col_used[j] => col_used[j] = true,
            _ => return false,
        }
    }
    true
}

/// Verifies that `t_mat` preserves the model's coefficient norm.
///
/// Errors with the failure evidence when it does not; otherwise reports how
/// the isometry was certified.
pub fn is_isometry(
    model: &FunctionSpaceModel,
    t_mat: &CMat,
    mode: IsometryMode,
    tol: f64,
) -> Result<IsometryEvidence> {
    use rand::Rng;
    use rand::SeedableRng;
    let k = model.coeff_dim();
    if t_mat.nrows() != k || t_mat.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: t_mat.nrows().max(t_mat.ncols()),
        });
    }
    let exact_hilbert = || -> Result<IsometryEvidence> {
        let NormSpec::HilbertGram { gram } = &model.coeff_norm else {
            return Err(Error::Invalid(
                "entrywise Gram isometry check requires a Hilbert coefficient norm".into(),
            ));
        };
        let lhs = t_mat.adjoint() * gram * t_mat;
        let dev = (&lhs - gram).norm() / gram.norm();
        if dev <= tol {
            Ok(IsometryEvidence::Exact)
        } else {
            Err(Error::NotIsometric(format!(
                "Gram identity violated: relative deviation {dev:.3e}"
            )))
        }
    };
    let sampled = |n: usize, seed: u64| -> Result<IsometryEvidence> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut max_deviation = 0.0_f64;
        for _ in 0..n {
            let v = CVec::from_iterator(
                k,
                (0..k).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)),
            );
            let nv = norm_eval(&model.coeff_norm, &v)?;
            if nv <= 1e-12 {
                continue;
            }
            let unit = v.unscale(nv);
            let mapped = norm_eval(&model.coeff_norm, &(t_mat * &unit))?;
            max_deviation = max_deviation.max((mapped - 1.0).abs());
        }
        if max_deviation <= tol {
            Ok(IsometryEvidence::Sampled { n, max_deviation })
        } else {
            Err(Error::NotIsometric(format!(
                "sampled deviation {max_deviation:.3e} exceeds tolerance on {n} unit vectors"
            )))
        }
    };
    match mode {
        IsometryMode::ExactHilbert => exact_hilbert(),
        IsometryMode::Sampled { n, seed } => sampled(n, seed),
        IsometryMode::Auto { n, seed } => match &model.coeff_norm {
            NormSpec::HilbertGram { .. } => exact_hilbert(),
            NormSpec::Lp { .. } if is_phase_permutation(t_mat, tol) => {
                Ok(IsometryEvidence::Structural)
            }
            _ => sampled(n, seed),
        },
    }
}

/// Condition number of `t_mat`; errors when it exceeds the invertibility
/// ceiling (surjectivity at finite dimension).
pub fn invertibility(t_mat: &CMat) -> Result<f64> {
    let sv = t_mat.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let cond = if smin <= 0.0 { f64::INFINITY } else { smax / smin };
    if cond > INVERTIBILITY_COND_LIMIT {
        return Err(Error::NotInvertible {
            cond,
            limit: INVERTIBILITY_COND_LIMIT,
        });
    }
    Ok(cond)
}

/// Rigidity verdict: either the weight is a single scalar or two components
/// witness different values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RigidityVerdict {
    Scalar {
        #[serde(with = "c64_repr")]
        lambda: C64,
    },
    NonScalarWitness {
        component_a: usize,
        component_b: usize,
        #[serde(with = "c64_repr")]
        lambda_a: C64,
        #[serde(with = "c64_repr")]
        lambda_b: C64,
    },
}

mod c64_repr {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Propagates per-point eigenvalues over the Birkhoff graph: within each
/// component all values must agree (an isometric multiplication operator
/// cannot have distinct eigenvalues across a non-orthogonal pair), and the
/// verdict compares the per-component values.
///
/// Errors with [`Error::ComponentDisagreement`] naming an offending edge
/// when adjacent points carry different values — either the input is not
/// actually isometric or the edge was soft (check the graph margins).
pub fn propagate_eigenvalues(
    graph: &BirkhoffGraph,
    omega: &[C64],
    tol: f64,
) -> Result<(Vec<(usize, C64)>, RigidityVerdict)> {
    let n = graph.num_vertices();
    if omega.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: omega.len(),
        });
    }
    let scale = omega.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for (a, b) in &graph.edges {
        let deviation = (omega[*a] - omega[*b]).norm();
        if deviation > tol * scale {
            return Err(Error::ComponentDisagreement {
                x: *a,
                y: *b,
                deviation,
                limit: tol * scale,
            });
        }
    }
    let mut labels: Vec<usize> = graph.components.clone();
    labels.sort_unstable();
    labels.dedup();
    let lambdas: Vec<(usize, C64)> = labels
        .iter()
        .map(|l| {
            let members: Vec<usize> = (0..n).filter(|v| graph.components[*v] == *l).collect();
            // transitive consistency inside the component (edge checks above
            // bound adjacent pairs; this bounds the whole class)
            let mean =
                members.iter().map(|v| omega[*v]).sum::<C64>() / members.len() as f64;
            (*l, mean)
        })
        .collect();
    for (l, lam) in &lambdas {
        for v in 0..n {
            if graph.components[v] == *l && (omega[v] - lam).norm() > tol * scale {
                // find an edge inside this component with the worst spread
                let worst = graph
                    .edges
                    .iter()
                    .filter(|(a, _)| graph.components[*a] == *l)
                    .max_by(|(a1, b1), (a2, b2)| {
                        (omega[*a1] - omega[*b1])
                            .norm()
                            .total_cmp(&(omega[*a2] - omega[*b2]).norm())
                    });
                let (x, y) = worst.copied().unwrap_or((v, v));
                return Err(Error::ComponentDisagreement {
                    x,
                    y,
                    deviation: (omega[v] - lam).norm(),
                    limit: tol * scale,
                });
            }
        }
    }
    let verdict = match lambdas.as_slice() {
        [] => RigidityVerdict::Scalar {
            lambda: C64::new(1.0, 0.0),
        },
        [(_, first), rest @ ..] => {
            let disagree = rest.iter().find(|(_, lam)| (lam - first).norm() > tol * scale);
            match disagree {
                None => RigidityVerdict::Scalar { lambda: *first },
                Some((l2, lam2)) => RigidityVerdict::NonScalarWitness {
                    component_a: lambdas[0].0,
                    component_b: *l2,
                    lambda_a: *first,
                    lambda_b: *lam2,
                },
            }
        }
    };
    Ok((lambdas, verdict))
}

/// Full rigidity report for a weight on a model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidityReport {
    /// The weight, as `[re, im]` per point.
    pub omega: Vec<[f64; 2]>,
    /// Component label per point.
    pub components: Vec<usize>,
    /// Per-component propagated eigenvalue.
    pub lambda_per_component: Vec<(usize, [f64; 2])>,
    pub verdict: RigidityVerdict,
    pub isometry_evidence: IsometryEvidence,
    /// Condition number of the operator (surjectivity evidence).
    pub condition_number: f64,
}

/// Renders the rigidity verdict for a weight: checks it is a multiplier,
/// that the operator is unitary (isometric + invertible), builds the
/// Birkhoff graph, and propagates eigenvalues. Scalar verdicts renormalize
/// the constant to unit modulus (isometric weights are unimodular).
pub fn rigidity_verdict(
    model: &FunctionSpaceModel,
    omega: &[C64],
    tol: f64,
) -> Result<RigidityReport> {
    let t_mat = mo_from_weight(model, omega, tol)?.ok_or_else(|| {
        // recompute the residual for the error report
        let target = CMat::from_fn(model.num_points(), model.coeff_dim(), |i, j| {
            omega[i] * model.basis[(i, j)]
        });
        let svd = model.basis.clone().svd(true, true);
        let residual = svd
            .solve(&target, 1e-12)
            .map(|t| (&model.basis * &t - &target).norm() / model.basis.norm())
            .unwrap_or(f64::INFINITY);
        Error::NotAMultiplier {
            residual,
            limit: tol,
        }
    })?;
    let evidence = is_isometry(
        model,
        &t_mat,
        IsometryMode::Auto { n: 200, seed: 2718 },
        tol.max(1e-9),
    )?;
    let condition_number = invertibility(&t_mat)?;
    let graph = build_graph(model, tol)?;
    let (lambdas, verdict) = propagate_eigenvalues(&graph, omega, tol)?;
    let unit = |z: C64| if z.norm() > 0.0 { z / z.norm() } else { z };
    let verdict = match verdict {
        RigidityVerdict::Scalar { lambda } => RigidityVerdict::Scalar {
            lambda: unit(lambda),
        },
        other => other,
    };
    Ok(RigidityReport {
        omega: omega.iter().map(|z| [z.re, z.im]).collect(),
        components: graph.components.clone(),
        lambda_per_component: lambdas
            .iter()
            .map(|(l, z)| {
                let u = unit(*z);
                (*l, [u.re, u.im])
            })
            .collect(),
        verdict,
        isometry_evidence: evidence,
        condition_number,
    })
}

/// Verdict of comparing two weighted composition operators that differ by
/// an isometric factor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WcoComparison {
    /// Ratio `υ/ω` per component of the restricted Birkhoff graph.
    pub lambda_per_component: Vec<(usize, [f64; 2])>,
    /// Whether the graph restricted to the composition image is connected.
    pub restricted_connected: bool,
    /// The single unimodular ratio, when the restriction is connected (or
    /// all components agree).
    pub lambda: Option<[f64; 2]>,
}

/// Compares the weights of two composition operators `f ↦ ω·(f∘Φ)` and
/// `f ↦ υ·(f∘Φ)` linked by an isometric factor `S` on the source model:
/// when `W_ω = W_υ · S` holds and the Birkhoff graph restricted to the
/// image of `Φ` is connected, the ratio `υ/ω` is a single unimodular
/// constant.
///
/// `phi` maps target-model point indices to source-model point indices;
/// `omega`/`upsilon` are per-target-point weights.
pub fn wco_compare(
    source: &FunctionSpaceModel,
    target_points: usize,
    phi: &[usize],
    omega: &[C64],
    upsilon: &[C64],
    s_mat: &CMat,
    tol: f64,
) -> Result<WcoComparison> {
    let k = source.coeff_dim();
    if phi.len() != target_points || omega.len() != target_points || upsilon.len() != target_points
    {
        return Err(Error::DimensionMismatch {
            expected: target_points,
            got: phi.len().min(omega.len()).min(upsilon.len()),
        });
    }
    for x in phi {
        if *x >= source.num_points() {
            return Err(Error::BadPhaseMap(*x));
        }
    }
    for (y, u) in upsilon.iter().enumerate() {
        if u.norm() <= 1e-14 {
            return Err(Error::VanishingWeight(y));
        }
    }
    for (y, w) in omega.iter().enumerate() {
        if w.norm() <= 1e-14 {
            return Err(Error::VanishingWeight(y));
        }
    }
    is_isometry(
        source,
        s_mat,
        IsometryMode::Auto { n: 100, seed: 31 },
        tol.max(1e-9),
    )?;
    // rows of the two composition matrices: ω(y)·B_{Φ(y)} vs υ(y)·(B S)_{Φ(y)}
    let bs = &source.basis * s_mat;
    let mut worst = 0.0_f64;
    for y in 0..target_points {
        for j in 0..k {
            let lhs = omega[y] * source.basis[(phi[y], j)];
            let rhs = upsilon[y] * bs[(phi[y], j)];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    let scale = source.basis.norm().max(1.0);
    if worst > tol * scale {
        return Err(Error::Invalid(format!(
            "the two composition operators differ by more than the isometric factor allows \
             (entry deviation {worst:.3e})"
        )));
    }

    let graph = build_graph(source, tol)?;
    let image: Vec<usize> = {
        let mut v: Vec<usize> = phi.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    // components of the graph restricted to the image
    let restricted_edges: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .filter(|(a, b)| image.binary_search(a).is_ok() && image.binary_search(b).is_ok())
        .map(|(a, b)| {
            (
                image.binary_search(a).unwrap(),
                image.binary_search(b).unwrap(),
            )
        })
        .collect();
    let restricted_labels =
        crate::birkhoff_graph::connected_components(image.len(), &restricted_edges);

    // ratio per source image point (consistent across preimages)
    let mut ratio: Vec<Option<C64>> = vec![None; image.len()];
    for y in 0..target_points {
        let xi = image.binary_search(&phi[y]).unwrap();
        let r = upsilon[y] / omega[y];
        match ratio[xi] {
            None => ratio[xi] = Some(r),
            Some(prev) => {
                if (prev - r).norm() > tol * prev.norm().max(1.0) {
                    return Err(Error::Invalid(format!(
                        "two preimages of source point {} carry inconsistent weight ratios",
                        image[xi]
                    )));
                }
            }
        }
    }
    let ratios: Vec<C64> = ratio.into_iter().map(|r| r.unwrap()).collect();
    let (lambdas, verdict) = {
        // reuse propagation over the restricted structure
        let g = BirkhoffGraph {
            vertices: image.iter().map(|i| source.phase.points[*i].id.clone()).collect(),
            edges: restricted_edges,
            components: restricted_labels.clone(),
            margins: Vec::new(),
        };
        propagate_eigenvalues(&g, &ratios, tol)?
    };
    let mut labels = restricted_labels;
    labels.sort_unstable();
    labels.dedup();
    let restricted_connected = labels.len() <= 1;
    let lambda = match &verdict {
        RigidityVerdict::Scalar { lambda } => {
            let u = if lambda.norm() > 0.0 {
                lambda / lambda.norm()
            } else {
                *lambda
            };
            Some([u.re, u.im])
        }
        RigidityVerdict::NonScalarWitness { .. } => None,
    };
    Ok(WcoComparison {
        lambda_per_component: lambdas
            .iter()
            .map(|(l, z)| (*l, [z.re, z.im]))
            .collect(),
        restricted_connected,
        lambda,
    })
}

/// Orthonormal basis (columns) of `range(M^n)` stabilized over `n`, plus
/// the step at which the chain `range(M) ⊇ range(M²) ⊇ …` stopped
/// shrinking. The chain stabilizes no later than the dimension.
pub fn invariant_core(m_mat: &CMat, n_max: usize) -> Result<(CMat, usize)> {
    if n_max == 0 {
        return Err(Error::Invalid("need at least one power".into()));
    }
    let k = m_mat.nrows();
    if m_mat.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: m_mat.ncols(),
        });
    }
    let orth = |a: &CMat| -> CMat {
        if a.ncols() == 0 {
            return CMat::zeros(k, 0);
        }
        let svd = a.clone().svd(true, false);
        let u = svd.u.as_ref().unwrap();
        let smax = svd.singular_values.max();
        let cutoff = smax * 1e-10;
        let cols: Vec<usize> = (0..svd.singular_values.len())
            .filter(|i| svd.singular_values[*i] > cutoff)
            .collect();
        let mut q = CMat::zeros(k, cols.len());
        for (t, i) in cols.iter().enumerate() {
            q.set_column(t, &u.column(*i));
        }
        q
    };
    let mut q = orth(m_mat);
    let mut n_star = 1;
    for n in 1..n_max {
        let next = orth(&(m_mat * &q));
        if next.ncols() == q.ncols() {
            n_star = n;
            q = next;
            return Ok((q, n_star));
        }
        q = next;
        n_star = n + 1;
    }
    Ok((q, n_star))
}

/// Report of rigidity restricted to the invariant core.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoreRigidityReport {
    pub core_dim: usize,
    /// Power at which the range chain stabilized.
    pub n_star: usize,
    pub report: RigidityReport,
}

/// Rigidity for an isometric but possibly non-invertible multiplication
/// operator: restricts the model to the stabilized range `⋂ range(M^n)`
/// and renders the verdict there.
///
/// The restriction re-derives the coefficient norm on the core, which is
/// only possible in closed form for Hilbert norms; other norms report
/// [`Error::UnsupportedRestriction`]. An empty core is reported as
/// [`Error::VacuousCore`]: the truncation retains no rigidity content.
pub fn isometry_rigidity(
    model: &FunctionSpaceModel,
    omega: &[C64],
    tol: f64,
    n_max: usize,
) -> Result<CoreRigidityReport> {
    let t_mat = mo_from_weight(model, omega, tol)?.ok_or(Error::NotAMultiplier {
        residual: f64::INFINITY,
        limit: tol,
    })?;
    is_isometry(
        model,
        &t_mat,
        IsometryMode::Auto { n: 200, seed: 99 },
        tol.max(1e-9),
    )?;
    let (q, n_star) = invariant_core(&t_mat, n_max)?;
    let core_dim = q.ncols();
    if core_dim == 0 {
        return Err(Error::VacuousCore);
    }
    let NormSpec::HilbertGram { gram } = &model.coeff_norm else {
        return Err(Error::UnsupportedRestriction);
    };
    let gram_core = q.adjoint() * gram * &q;
    let gram_core = (&gram_core + gram_core.adjoint()).scale(0.5);
    let basis_core = &model.basis * &q;
    let restricted = FunctionSpaceModel {
        phase: model.phase.clone(),
        basis: basis_core,
        coeff_norm: NormSpec::hilbert(gram_core)?,
    };
    restricted.validate_shape()?;
    let report = rigidity_verdict(&restricted, omega, tol)?;
    Ok(CoreRigidityReport {
        core_dim,
        n_star,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::{PhaseSpace, PointRecord};
    use crate::{DEFAULT_TOL, RMat};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn delta_model(gram: CMat) -> FunctionSpaceModel {
        let m = gram.nrows();
        let points: Vec<PointRecord> = (0..m)
            .map(|i| PointRecord {
                id: format!("p{i}"),
                coord: None,
            })
            .collect();
        let metric = RMat::from_fn(m, m, |i, j| (i as f64 - j as f64).abs());
        let phase = PhaseSpace::metric(points, metric, 1.5).unwrap();
        FunctionSpaceModel::new(phase, CMat::identity(m, m), NormSpec::hilbert(gram).unwrap())
            .unwrap()
    }

    fn poly_model() -> FunctionSpaceModel {
        // basis {1, z} on points {0, 1, 2}
        let points: Vec<PointRecord> = (0..3)
            .map(|i| PointRecord {
                id: format!("p{i}"),
                coord: Some([i as f64, 0.0]),
            })
            .collect();
        let metric = RMat::from_fn(3, 3, |i, j| (i as f64 - j as f64).abs());
        let phase = PhaseSpace::metric(points, metric, 1.5).unwrap();
        let basis = CMat::from_fn(3, 2, |i, j| {
            if j == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(i as f64, 0.0)
            }
        });
        FunctionSpaceModel::new(phase, basis, NormSpec::lp(2.0, 2).unwrap()).unwrap()
    }

    fn cvec(zs: &[C64]) -> Vec<C64> {
        zs.to_vec()
    }

    #[test]
    fn detect_mo_on_delta_basis() {
        let model = delta_model(CMat::identity(2, 2));
        let t = CMat::from_diagonal(&CVec::from_iterator(
            2,
            [C64::new(2.0, 0.0), C64::new(0.0, 3.0)],
        ));
        match detect_mo(&model, &t, DEFAULT_TOL).unwrap() {
            MoDetection::Weight(w) => {
                assert_eq!(w[0], C64::new(2.0, 0.0));
                assert_eq!(w[1], C64::new(0.0, 3.0));
            }
            other => panic!("{other:?}"),
        }
        // a shear is not a multiplication operator; the first evaluation fails
        let shear = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        match detect_mo(&model, &shear, DEFAULT_TOL).unwrap() {
            MoDetection::NotMo { point, residual } => {
                assert_eq!(point, 0);
                assert!(residual > 0.1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detect_mo_constant_on_polynomial_basis() {
        let model = poly_model();
        let t = CMat::identity(2, 2).scale(5.0);
        match detect_mo(&model, &t, DEFAULT_TOL).unwrap() {
            MoDetection::Weight(w) => {
                for v in w {
                    assert!((v - C64::new(5.0, 0.0)).norm() < 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mo_from_weight_delta_and_polynomial() {
        let model = delta_model(CMat::identity(2, 2));
        let w = cvec(&[C64::new(2.0, 1.0), C64::new(-1.0, 0.5)]);
        let t = mo_from_weight(&model, &w, DEFAULT_TOL).unwrap().unwrap();
        assert!((t[(0, 0)] - w[0]).norm() < 1e-12);
        assert!((t[(1, 1)] - w[1]).norm() < 1e-12);
        assert!(t[(0, 1)].norm() < 1e-12 && t[(1, 0)].norm() < 1e-12);

        // multiplying {1, z} by z leaves the span (z² escapes): not a multiplier
        let model = poly_model();
        let z_values = cvec(&[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]);
        assert!(mo_from_weight(&model, &z_values, DEFAULT_TOL)
            .unwrap()
            .is_none());
        // a constant is always a multiplier
        let c = cvec(&[C64::new(0.0, 2.0); 3]);
        let t = mo_from_weight(&model, &c, DEFAULT_TOL).unwrap().unwrap();
        assert!((&t - CMat::identity(2, 2).scale(2.0) * C64::new(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn weight_round_trip_on_random_delta_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let m = 2 + (rng.random::<u32>() % 4) as usize;
            let a = CMat::from_fn(m, m, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let gram = &a * a.adjoint() + CMat::identity(m, m).scale(0.5);
            let model = delta_model(gram);
            let w: Vec<C64> = (0..m)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let t = mo_from_weight(&model, &w, DEFAULT_TOL).unwrap().unwrap();
            match detect_mo(&model, &t, DEFAULT_TOL).unwrap() {
                MoDetection::Weight(got) => {
                    for i in 0..m {
                        assert!((got[i] - w[i]).norm() <= 1e-9 * w[i].norm().max(1.0));
                    }
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn isometry_checks() {
        // unitary w.r.t. the identity Gram from QR
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMat::from_fn(3, 3, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let qr = a.qr();
        let q = qr.q();
        let model = delta_model(CMat::identity(3, 3));
        assert_eq!(
            is_isometry(&model, &q, IsometryMode::ExactHilbert, 1e-10).unwrap(),
            IsometryEvidence::Exact
        );
        let double = CMat::identity(3, 3).scale(2.0);
        assert!(matches!(
            is_isometry(&model, &double, IsometryMode::ExactHilbert, 1e-10),
            Err(Error::NotIsometric(_))
        ));

        // signed-phase permutation on sup norm: structural certificate
        let points: Vec<PointRecord> = (0..3)
            .map(|i| PointRecord {
                id: format!("p{i}"),
                coord: None,
            })
            .collect();
        let metric = RMat::from_fn(3, 3, |i, j| (i as f64 - j as f64).abs());
        let phase = PhaseSpace::metric(points, metric, 1.5).unwrap();
        let model_inf = FunctionSpaceModel::new(
            phase,
            CMat::identity(3, 3),
            NormSpec::lp(f64::INFINITY, 3).unwrap(),
        )
        .unwrap();
        let mut perm = CMat::zeros(3, 3);
        perm[(0, 1)] = C64::from_polar(1.0, 0.7);
        perm[(1, 2)] = C64::from_polar(1.0, -1.1);
        perm[(2, 0)] = C64::new(-1.0, 0.0);
        assert_eq!(
            is_isometry(
                &model_inf,
                &perm,
                IsometryMode::Auto { n: 50, seed: 1 },
                1e-10
            )
            .unwrap(),
            IsometryEvidence::Structural
        );
        // sampled mode on the same matrix
        match is_isometry(&model_inf, &perm, IsometryMode::Sampled { n: 50, seed: 1 }, 1e-9)
            .unwrap()
        {
            IsometryEvidence::Sampled { n: 50, max_deviation } => {
                assert!(max_deviation <= 1e-12);
            }
            other => panic!("{other:?}"),
        }
        // invertibility
        assert!(invertibility(&perm).unwrap() < 1.0 + 1e-9);
        let singular = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            invertibility(&singular),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn propagation_and_verdicts() {
        use crate::birkhoff_graph::BirkhoffGraph;
        // connected path on 3 vertices, constant weight 3i
        let g = BirkhoffGraph {
            vertices: vec!["a".into(), "b".into(), "c".into()],
            edges: vec![(0, 1), (1, 2)],
            components: vec![0, 0, 0],
            margins: Vec::new(),
        };
        let w = cvec(&[C64::new(0.0, 3.0); 3]);
        let (lams, verdict) = propagate_eigenvalues(&g, &w, DEFAULT_TOL).unwrap();
        assert_eq!(lams.len(), 1);
        assert_eq!(
            verdict,
            RigidityVerdict::Scalar {
                lambda: C64::new(0.0, 3.0)
            }
        );
        // two components with +1 / -1
        let g2 = BirkhoffGraph {
            vertices: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            edges: vec![(0, 1), (2, 3)],
            components: vec![0, 0, 2, 2],
            margins: Vec::new(),
        };
        let w2 = cvec(&[
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(-1.0, 0.0),
        ]);
        let (lams, verdict) = propagate_eigenvalues(&g2, &w2, DEFAULT_TOL).unwrap();
        assert_eq!(lams.len(), 2);
        assert!(matches!(
            verdict,
            RigidityVerdict::NonScalarWitness {
                component_a: 0,
                component_b: 2,
                ..
            }
        ));
        // disagreement across an edge is an error naming the edge
        let w3 = cvec(&[
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        match propagate_eigenvalues(&g2, &w3, DEFAULT_TOL) {
            Err(Error::ComponentDisagreement { x: 0, y: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rigidity_verdict_scalar_on_connected_hilbert_model() {
        // dual Gram with nonzero entries => connected graph
        let w = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let gram = w.clone().try_inverse().unwrap();
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let model = delta_model(gram);
        let lam = C64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let report = rigidity_verdict(&model, &[lam, lam], DEFAULT_TOL).unwrap();
        match report.verdict {
            RigidityVerdict::Scalar { lambda } => {
                assert!((lambda - lam).norm() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(report.isometry_evidence, IsometryEvidence::Exact);
        assert!(report.condition_number < 1.0 + 1e-9);

        // nonconstant unimodular weight on the same connected model: the
        // operator is not isometric (the Gram mixes the points)
        let w_bad = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        assert!(matches!(
            rigidity_verdict(&model, &w_bad, DEFAULT_TOL),
            Err(Error::NotIsometric(_))
        ));
    }

    #[test]
    fn rigidity_verdict_nonscalar_on_disconnected_model() {
        // identity Gram: evaluations mutually orthogonal, graph edgeless
        let model = delta_model(CMat::identity(2, 2));
        let w = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        let report = rigidity_verdict(&model, &w, DEFAULT_TOL).unwrap();
        assert!(matches!(
            report.verdict,
            RigidityVerdict::NonScalarWitness { .. }
        ));
        assert_eq!(report.components, vec![0, 1]);
    }

    #[test]
    fn wco_detects_global_phase() {
        let w = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.4, 0.0),
                C64::new(0.4, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let gram = w.clone().try_inverse().unwrap();
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let model = delta_model(gram);
        let omega = [C64::from_polar(1.0, 0.3), C64::from_polar(1.0, 0.3)];
        // identical weights, S = I
        let s = CMat::identity(2, 2);
        let cmp = wco_compare(&model, 2, &[0, 1], &omega, &omega, &s, DEFAULT_TOL).unwrap();
        assert!(cmp.restricted_connected);
        let lam = cmp.lambda.unwrap();
        assert!((lam[0] - 1.0).abs() < 1e-9 && lam[1].abs() < 1e-9);
        // upsilon = e^{iθ}ω with S = e^{-iθ}I
        let theta = 0.8;
        let upsilon: Vec<C64> = omega.iter().map(|z| z * C64::from_polar(1.0, theta)).collect();
        let s2 = CMat::identity(2, 2) * C64::from_polar(1.0, -theta);
        let cmp = wco_compare(&model, 2, &[0, 1], &omega, &upsilon, &s2, DEFAULT_TOL).unwrap();
        let lam = cmp.lambda.unwrap();
        let expect = C64::from_polar(1.0, theta);
        assert!((C64::new(lam[0], lam[1]) - expect).norm() < 1e-9);
        // violating the matrix identity is an error
        let s3 = CMat::identity(2, 2);
        assert!(wco_compare(&model, 2, &[0, 1], &omega, &upsilon, &s3, DEFAULT_TOL).is_err());
        // vanishing upsilon is rejected
        let ups0 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        assert!(matches!(
            wco_compare(&model, 2, &[0, 1], &omega, &ups0, &s, DEFAULT_TOL),
            Err(Error::VanishingWeight(0))
        ));
    }

    #[test]
    fn invariant_core_cases() {
        // invertible: full space at the first power
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = CMat::from_fn(3, 3, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        }) + CMat::identity(3, 3).scale(2.0);
        let (q, n_star) = invariant_core(&a, 10).unwrap();
        assert_eq!(q.ncols(), 3);
        assert_eq!(n_star, 1);
        // nilpotent: zero subspace
        let mut nil = CMat::zeros(3, 3);
        nil[(0, 1)] = C64::new(1.0, 0.0);
        nil[(1, 2)] = C64::new(2.0, 0.0);
        let (q, n_star) = invariant_core(&nil, 10).unwrap();
        assert_eq!(q.ncols(), 0);
        assert!(n_star <= 3 + 1);
        // monotonicity: core of successive powers shrinks and is nested
        let b = CMat::from_fn(4, 4, |i, j| {
            if j == i + 1 {
                C64::new(1.0, 0.0)
            } else if i == 3 && j == 3 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        // b maps e1->e0, e2->e1, e3->e2+e3... ranges shrink to a fixed space
        let (q, n_star) = invariant_core(&b, 10).unwrap();
        assert!(q.ncols() >= 1);
        assert!(n_star <= 4);
        // projector test: M q stays inside the core
        let mq = &b * &q;
        let resid = &mq - &q * (q.adjoint() * &mq);
        assert!(resid.norm() < 1e-9);
    }

    #[test]
    fn isometry_rigidity_paths() {
        // constant weight on a connected Hilbert model: core = everything,
        // same verdict as the direct pipeline
        let w = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let gram = w.clone().try_inverse().unwrap();
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let model = delta_model(gram);
        let lam = C64::from_polar(1.0, 1.1);
        let rep = isometry_rigidity(&model, &[lam, lam], DEFAULT_TOL, 8).unwrap();
        assert_eq!(rep.core_dim, 2);
        assert_eq!(rep.n_star, 1);
        assert!(matches!(rep.report.verdict, RigidityVerdict::Scalar { .. }));

        // truncated shift: isometric on nothing... construct directly on a
        // Hilbert delta model: the shift matrix is NOT a multiplication
        // operator there, so instead check the vacuous-core path with a
        // weight whose operator is nilpotent — impossible for genuine
        // multipliers on delta bases (diagonal), so the vacuous-core path
        // is exercised by kernel models elsewhere. Here: a non-multiplier
        // weight is reported as such.
        let model_poly = poly_model();
        let z_vals = [
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ];
        assert!(matches!(
            isometry_rigidity(&model_poly, &z_vals, DEFAULT_TOL, 5),
            Err(Error::NotAMultiplier { .. })
        ));
    }
}
