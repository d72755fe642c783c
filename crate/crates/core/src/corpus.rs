//! Scenario corpus: end-to-end reproductions of the constructions that
//! motivate the library, each returning a structured claims report.
//!
//! Every scenario is deterministic given its seed, states each claim's
//! tolerance inside the claim text, and runs independently of the others.
//! The whole suite is sized to finish in seconds.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::birkhoff_graph::{build_graph, export_dot};
use crate::error::{Error, Result};
use crate::function_space::{
    default_eps, kernel_closed_form, kernel_partial_sum, lipschitz_space, omega,
    rkhs_from_kernel, FunctionSpaceModel, KernelChoice, PhaseSpace, PointRecord,
};
use crate::normed_space::{
    norm_eval, sphere_face_dimension, NormEvaluator, NormSpec, RhoCombiner,
};
use crate::rigidity::{
    detect_mo, invariant_core, is_isometry, mo_from_weight, rigidity_verdict, IsometryMode,
    MoDetection, RigidityVerdict,
};
use crate::{CMat, CVec, RMat, DEFAULT_TOL};

type C64 = Complex64;

/// One checked statement inside a scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim {
    pub description: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

/// Structured result of one scenario run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusReport {
    pub scenario: String,
    pub claims: Vec<Claim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifacts: Option<serde_json::Value>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    /// First claim whose description starts with `prefix`.
    pub fn claim(&self, prefix: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.description.starts_with(prefix))
    }
}

/// All scenario names, in canonical order.
pub const SCENARIOS: &[&str] = &[
    "lipschitz_mo",
    "rkhs_shift",
    "rkhs_bilateral",
    "disjoint_sum",
    "cinfty_nonrigidity",
    "hilbert_rigidity",
    "lip_components",
    "nsc_probe",
];

/// Runs one scenario by name at its default size.
pub fn run_scenario(name: &str, seed: u64) -> Result<CorpusReport> {
    match name {
        "lipschitz_mo" => run_lipschitz_mo(40, seed),
        "rkhs_shift" => run_rkhs_shift(50, 20),
        "rkhs_bilateral" => run_rkhs_bilateral(3),
        "disjoint_sum" => run_disjoint_sum(seed),
        "cinfty_nonrigidity" => run_cinfty_nonrigidity(6, seed),
        "hilbert_rigidity" => run_hilbert_rigidity(seed),
        "lip_components" => run_lip_components(seed),
        "nsc_probe" => run_nsc_probe(),
        other => Err(Error::Invalid(format!("unknown scenario {other:?}"))),
    }
}

/// Runs the full corpus in canonical order.
pub fn run_all(seed: u64) -> Result<Vec<CorpusReport>> {
    SCENARIOS.iter().map(|s| run_scenario(s, seed)).collect()
}

// ---------------------------------------------------------------- helpers

fn claim_le(description: &str, observed: f64, bound: f64) -> Claim {
    Claim {
        description: description.into(),
        expected: format!("<= {bound:.6e}"),
        observed: format!("{observed:.6e}"),
        pass: observed <= bound,
    }
}

fn claim_ge(description: &str, observed: f64, bound: f64) -> Claim {
    Claim {
        description: description.into(),
        expected: format!(">= {bound:.6e}"),
        observed: format!("{observed:.6e}"),
        pass: observed >= bound,
    }
}

fn claim_near(description: &str, observed: f64, expected: f64, tol: f64) -> Claim {
    Claim {
        description: description.into(),
        expected: format!("{expected:.12} ± {tol:.1e}"),
        observed: format!("{observed:.12}"),
        pass: (observed - expected).abs() <= tol,
    }
}

fn claim_bool(description: &str, observed: &str, pass: bool) -> Claim {
    Claim {
        description: description.into(),
        expected: "true".into(),
        observed: observed.into(),
        pass,
    }
}

fn claim_count(description: &str, observed: usize, expected: usize) -> Claim {
    Claim {
        description: description.into(),
        expected: format!("{expected}"),
        observed: format!("{observed}"),
        pass: observed == expected,
    }
}

fn distinct_count(mut labels: Vec<usize>) -> usize {
    labels.sort_unstable();
    labels.dedup();
    labels.len()
}

fn random_unit(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
}

fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_iterator(
        n,
        (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)),
    )
}

/// Delta-basis Hilbert model over `n` points on a line whose evaluation
/// inner products are the strictly positive values of a Gaussian kernel, so
/// every pair of evaluations is non-orthogonal and the Birkhoff graph is
/// complete. Reused by the rigidity scenarios and the acceptance suite.
pub fn gaussian_kernel_model(coords: &[f64]) -> Result<FunctionSpaceModel> {
    let m = coords.len();
    let kernel = RMat::from_fn(m, m, |i, j| (-0.5 * (coords[i] - coords[j]).powi(2)).exp());
    let kernel_c = kernel.map(|x| C64::new(x, 0.0));
    let gram = kernel_c
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite)?;
    let gram = (&gram + gram.adjoint()).scale(0.5);
    let points: Vec<PointRecord> = (0..m)
        .map(|i| PointRecord {
            id: format!("p{i}"),
            coord: Some([coords[i], 0.0]),
        })
        .collect();
    let metric = RMat::from_fn(m, m, |i, j| (coords[i] - coords[j]).abs());
    let eps = default_eps(&metric);
    let phase = PhaseSpace::metric(points, metric, eps)?;
    FunctionSpaceModel::new(phase, CMat::identity(m, m), NormSpec::hilbert(gram)?)
}

/// Same model family with randomized line spacing.
pub fn random_gaussian_kernel_model(n: usize, rng: &mut ChaCha8Rng) -> Result<FunctionSpaceModel> {
    let mut coords = vec![0.0_f64];
    for i in 1..n {
        coords.push(coords[i - 1] + 0.3 + 0.2 * rng.random::<f64>());
    }
    gaussian_kernel_model(&coords)
}

// ------------------------------------------------------------- scenarios

/// Multiplication by the radial phase `ω(z) = z/|z|` on the space of
/// Lipschitz functions over sampled disk points vanishing at the origin:
/// the multiplication ratio never exceeds 2, the bound is active (a witness
/// reaches ≥ 1.5), and the inverse weight obeys the same bound.
pub fn run_lipschitz_mo(n_points: usize, seed: u64) -> Result<CorpusReport> {
    if n_points < 3 {
        return Err(Error::Invalid("need at least three sample points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Origin (the basepoint), one close boundary pair that activates the
    // bound, and a low-discrepancy golden-angle spiral for the rest.
    let mut zs: Vec<C64> = vec![
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, 0.3),
        C64::from_polar(1.0, 0.4),
    ];
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    for k in 0..n_points - 3 {
        let r = 0.999 * (((k + 1) as f64) / ((n_points - 2) as f64)).sqrt();
        zs.push(C64::from_polar(r, 0.05 + golden_angle * k as f64));
    }
    let m = zs.len();
    let metric = RMat::from_fn(m, m, |i, j| (zs[i] - zs[j]).norm());
    let model = lipschitz_space(metric, 0, false)?;
    let spec = &model.coeff_norm;
    let w: Vec<C64> = zs.iter().map(|z| omega(*z)).collect();

    // Coefficients are values at the non-basepoint points (indices 1..m).
    let ratio = |coeffs: &CVec, weight: &[C64]| -> Result<f64> {
        let scaled = CVec::from_iterator(m - 1, (0..m - 1).map(|i| weight[i + 1] * coeffs[i]));
        Ok(norm_eval(spec, &scaled)? / norm_eval(spec, coeffs)?)
    };
    let w_conj: Vec<C64> = w.iter().map(|z| z.conj()).collect();

    let mut max_fwd = 0.0_f64;
    let mut max_inv = 0.0_f64;
    for _ in 0..200 {
        let f = random_cvec(&mut rng, m - 1);
        max_fwd = max_fwd.max(ratio(&f, &w)?);
        max_inv = max_inv.max(ratio(&f, &w_conj)?);
    }
    let f_linear = CVec::from_iterator(m - 1, (1..m).map(|i| zs[i]));
    let witness = ratio(&f_linear, &w)?;
    max_fwd = max_fwd.max(witness);
    let f_radial = CVec::from_iterator(m - 1, (1..m).map(|i| C64::new(zs[i].norm(), 0.0)));
    let radial = ratio(&f_radial, &w)?;
    let multiplier = mo_from_weight(&model, &w, DEFAULT_TOL)?;

    let claims = vec![
        claim_le(
            "multiplication ratio bound: max dil(w*f)/dil(f) over 200 random functions and the linear witness stays <= 2 + 1e-9",
            max_fwd,
            2.0 + 1e-9,
        ),
        claim_ge(
            "the bound is active: the linear witness f(z)=z reaches ratio >= 1.5 on the close boundary pair",
            witness,
            1.5,
        ),
        claim_near(
            "radial witness f(z)=|z| has ratio 1 (weight turns it into f(z)=z, both of dilation 1); tolerance 1e-9",
            radial,
            1.0,
            1e-9,
        ),
        claim_le(
            "inverse weight (conjugate phase) obeys the same bound: max ratio over 200 random functions <= 2 + 1e-9",
            max_inv,
            2.0 + 1e-9,
        ),
        claim_bool(
            "the phase weight is a multiplier of the sampled model (operator matrix recovered at tolerance 1e-7)",
            if multiplier.is_some() { "recovered" } else { "rejected" },
            multiplier.is_some(),
        ),
    ];
    Ok(CorpusReport {
        scenario: "lipschitz_mo".into(),
        claims,
        artifacts: Some(json!({
            "n_points": m,
            "max_ratio": max_fwd,
            "witness_ratio": witness,
            "max_inverse_ratio": max_inv,
        })),
    })
}

/// The truncated unilateral-shift model: half the phase multiplication acts
/// on the orthonormal columns as an exact shift, the operator has norm
/// exactly 2 on its domain, and the truncated kernel matches its closed
/// form on the unit circle.
pub fn run_rkhs_shift(order: usize, sample_points: usize) -> Result<CorpusReport> {
    if order < 2 {
        return Err(Error::Invalid("truncation order must be at least 2".into()));
    }
    let points: Vec<C64> = (0..sample_points)
        .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / sample_points as f64))
        .collect();
    let (model, flagged) = rkhs_from_kernel(&points, KernelChoice::Unilateral { n: order })?;
    debug_assert!(flagged.is_empty());
    let b = &model.basis;
    let m = model.num_points();
    let k = model.coeff_dim(); // order + 1 columns
    let w: Vec<C64> = points.iter().map(|z| omega(*z)).collect();

    // (a) half the weight multiplication shifts the sampled columns exactly.
    let mut shift_mismatches = 0usize;
    for n in 0..order {
        for i in 0..m {
            if w[i] * b[(i, n)] * 0.5 != b[(i, n + 1)] {
                shift_mismatches += 1;
            }
        }
    }

    // (b) the coefficient shift preserves the Gram exactly on its domain.
    let mut s_mat = CMat::zeros(k, k);
    for n in 0..order {
        s_mat[(n + 1, n)] = C64::new(1.0, 0.0);
    }
    let sts = s_mat.adjoint() * &s_mat;
    let mut gram_dev = 0.0_f64;
    for i in 0..k {
        for j in 0..k {
            let want = if i == j && i < order { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((sts[(i, j)] - C64::new(want, 0.0)).norm());
        }
    }

    // (c) the multiplication norm is exactly 2 on the truncation.
    let e0 = CVec::from_fn(k, |i, _| if i == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let me0 = (&s_mat * &e0).scale(2.0);
    let ratio0 = norm_eval(&model.coeff_norm, &me0)? / norm_eval(&model.coeff_norm, &e0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_ratio_dev = 0.0_f64;
    for _ in 0..50 {
        let mut v = random_cvec(&mut rng, k);
        v[k - 1] = C64::new(0.0, 0.0); // stay inside the domain span
        let r = norm_eval(&model.coeff_norm, &(&s_mat * &v).scale(2.0))?
            / norm_eval(&model.coeff_norm, &v)?;
        worst_ratio_dev = worst_ratio_dev.max((r - 2.0).abs());
    }

    // (d) truncated kernel vs closed form on unit-modulus pairs.
    let tol_rel = (4.0 * 2.0_f64.powi(-2 * order as i32)).max(1e-12);
    let mut worst_rel = 0.0_f64;
    for i in 0..sample_points.min(20) {
        let got = kernel_partial_sum(&model, i, 0);
        let want = kernel_closed_form(points[i], points[0]);
        worst_rel = worst_rel.max((got - want).norm() / want.norm());
    }
    let at_one = kernel_partial_sum(&model, 0, 0);
    let four_thirds = (at_one - C64::new(4.0 / 3.0, 0.0)).norm();

    // (e) the truncation's invariant core is trivial: the finite surrogate
    // keeps the shift's isometry but loses its surjectivity content.
    let (core, _) = invariant_core(&s_mat, k + 1)?;

    let claims = vec![
        claim_count(
            "half the weight multiplication maps e_n to e_{n+1} with zero bitwise mismatches across all samples and n < order",
            shift_mismatches,
            0,
        ),
        claim_le(
            "the coefficient shift preserves the Gram exactly on its domain (max entry deviation of S*S from the domain projector, tolerance 0)",
            gram_dev,
            0.0,
        ),
        claim_near(
            "norm ratio of the multiplication on e_0 is exactly 2 (tolerance 0)",
            ratio0,
            2.0,
            0.0,
        ),
        claim_le(
            "norm ratio is 2 across 50 random domain vectors (max deviation, tolerance 1e-12)",
            worst_ratio_dev,
            1e-12,
        ),
        claim_le(
            &format!(
                "truncated kernel matches the closed form on 20 unit-modulus pairs within {tol_rel:.1e} relative (truncation bound 4*2^(-2*order) floored at the floating-point limit 1e-12)"
            ),
            worst_rel,
            tol_rel,
        ),
        claim_le(
            "kernel value at z = w = 1 equals 4/3 within 1e-12",
            four_thirds,
            1e-12,
        ),
        claim_count(
            "the truncated shift's invariant core is trivial (dimension 0): the finite model keeps no subspace on which the shift is surjective",
            core.ncols(),
            0,
        ),
    ];
    Ok(CorpusReport {
        scenario: "rkhs_shift".into(),
        claims,
        artifacts: Some(json!({
            "order": order,
            "sample_points": sample_points,
            "kernel_at_one": [at_one.re, at_one.im],
        })),
    })
}

/// The bilateral-shift model: the phase multiplication scales column `n`
/// into column `n+1` by `2^(|n+1|-|n|)`, so the ratio set contains both 2
/// and 1/2 — an invertible multiplication operator that is not a scalar
/// multiple of an isometry — while staying injective on its domain.
pub fn run_rkhs_bilateral(order: usize) -> Result<CorpusReport> {
    if order < 1 {
        return Err(Error::Invalid("truncation order must be at least 1".into()));
    }
    let n_pts = (4 * order).max(8);
    let points: Vec<C64> = (0..n_pts)
        .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n_pts as f64))
        .collect();
    let (model, _) = rkhs_from_kernel(&points, KernelChoice::Bilateral { n: order })?;
    let b = &model.basis;
    let m = model.num_points();
    let w: Vec<C64> = points.iter().map(|z| omega(*z)).collect();
    let col = |n: i64| (n + order as i64) as usize;
    let factor = |n: i64| 2.0_f64.powi(((n + 1).abs() - n.abs()) as i32);

    let mut worst_abs = 0.0_f64;
    let mut up_mismatches = 0usize;
    for n in -(order as i64)..(order as i64) {
        let fac = factor(n);
        for i in 0..m {
            let got = w[i] * b[(i, col(n))];
            let want = b[(i, col(n + 1))] * fac;
            worst_abs = worst_abs.max((got - want).norm());
            if n >= 0 && got != want {
                up_mismatches += 1;
            }
        }
    }

    // observed scaling factors per column (identical across samples)
    let observed_factor = |n: i64| -> f64 {
        (0..m)
            .map(|i| (w[i] * b[(i, col(n))]).norm() / b[(i, col(n + 1))].norm())
            .fold(0.0_f64, f64::max)
    };
    let up_ratio = observed_factor(0);
    let down_ratio = observed_factor(-1);

    // injectivity of the domain-to-range map
    let dom = 2 * order; // columns e_{-order}..e_{order-1}
    let mut t = CMat::zeros(2 * order + 1, dom);
    for (idx, n) in (-(order as i64)..(order as i64)).enumerate() {
        t[(col(n + 1), idx)] = C64::new(factor(n), 0.0);
    }
    let smin = t
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let claims = vec![
        claim_le(
            "the weight multiplication scales e_n into e_{n+1} by 2^(|n+1|-|n|) (max entry deviation across all columns, tolerance 1e-12)",
            worst_abs,
            1e-12,
        ),
        claim_count(
            "for n >= 0 the scaling identity is bitwise (zero mismatches)",
            up_mismatches,
            0,
        ),
        claim_near(
            "norm ratio at n = 0 is 2 within 1e-12",
            up_ratio,
            2.0,
            1e-12,
        ),
        claim_near(
            "norm ratio at n = -1 is 1/2 within 1e-12: the ratio set contains both 2 and 1/2, so the operator is not a scalar multiple of an isometry",
            down_ratio,
            0.5,
            1e-12,
        ),
        claim_ge(
            "the operator is injective on its domain: smallest singular value >= 1/2 - 1e-12",
            smin,
            0.5 - 1e-12,
        ),
    ];
    Ok(CorpusReport {
        scenario: "rkhs_bilateral".into(),
        claims,
        artifacts: Some(json!({ "order": order, "ratio_up": up_ratio, "ratio_down": down_ratio })),
    })
}

/// Two Hilbert blocks with complete Birkhoff graphs, joined as an l2 block
/// sum over a disjoint phase union: the sign weight +1/-1 per block is an
/// exactly unitary multiplication operator, the joint Birkhoff graph splits
/// into exactly the two blocks, and the rigidity verdict is a non-scalar
/// witness — connectivity is what rigidity needs, and it fails here.
pub fn run_disjoint_sum(seed: u64) -> Result<CorpusReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = |rng: &mut ChaCha8Rng| 0.05 * rng.random::<f64>();
    let coords_x = [0.0, 0.3 + jitter(&mut rng), 0.6 + jitter(&mut rng)];
    let coords_y = [10.0, 10.3 + jitter(&mut rng), 10.6 + jitter(&mut rng)];

    let block_gram = |coords: &[f64]| -> Result<CMat> {
        let n = coords.len();
        let kernel = CMat::from_fn(n, n, |i, j| {
            C64::new((-0.5 * (coords[i] - coords[j]).powi(2)).exp(), 0.0)
        });
        let g = kernel.try_inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok((&g + g.adjoint()).scale(0.5))
    };
    let gx = block_gram(&coords_x)?;
    let gy = block_gram(&coords_y)?;
    let coeff_norm = NormSpec::block_sum(
        vec![NormSpec::hilbert(gx.clone())?, NormSpec::hilbert(gy.clone())?],
        RhoCombiner::OuterLp { p: 2.0 },
    )?;

    let all: Vec<f64> = coords_x.iter().chain(coords_y.iter()).copied().collect();
    let m = all.len();
    let points: Vec<PointRecord> = (0..m)
        .map(|i| PointRecord {
            id: if i < 3 { format!("x{i}") } else { format!("y{}", i - 3) },
            coord: Some([all[i], 0.0]),
        })
        .collect();
    let metric = RMat::from_fn(m, m, |i, j| (all[i] - all[j]).abs());
    let phase = PhaseSpace::metric(points, metric, 1.0)?;
    let model = FunctionSpaceModel::new(phase, CMat::identity(m, m), coeff_norm)?;

    let w: Vec<C64> = (0..m)
        .map(|i| C64::new(if i < 3 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let t = mo_from_weight(&model, &w, DEFAULT_TOL)?.ok_or(Error::NotAMultiplier {
        residual: f64::INFINITY,
        limit: DEFAULT_TOL,
    })?;

    // involution and exact Gram-identity unitarity on the joint Hilbert form
    let inv_dev = (&t * &t - CMat::identity(m, m)).norm();
    let mut gj = CMat::zeros(m, m);
    gj.view_mut((0, 0), (3, 3)).copy_from(&gx);
    gj.view_mut((3, 3), (3, 3)).copy_from(&gy);
    let gram_dev = (t.adjoint() * &gj * &t - &gj).norm();

    let graph = build_graph(&model, DEFAULT_TOL)?;
    let comps = graph.component_sets();
    let split_clean = comps.len() == 2
        && comps.iter().any(|c| c == &[0, 1, 2])
        && comps.iter().any(|c| c == &[3, 4, 5]);

    let report = rigidity_verdict(&model, &w, DEFAULT_TOL)?;
    let (is_witness, lam_dev) = match report.verdict {
        RigidityVerdict::NonScalarWitness {
            lambda_a, lambda_b, ..
        } => (
            true,
            (lambda_a - C64::new(1.0, 0.0))
                .norm()
                .max((lambda_b - C64::new(-1.0, 0.0)).norm()),
        ),
        _ => (false, f64::INFINITY),
    };

    let claims = vec![
        claim_le(
            "the sign weight squares to the identity exactly (max entry deviation of T*T from I, tolerance 0)",
            inv_dev,
            0.0,
        ),
        claim_le(
            "the sign weight is exactly unitary for the joint Hilbert form (Gram identity deviation, tolerance 0)",
            gram_dev,
            0.0,
        ),
        claim_count(
            "the Birkhoff graph has exactly 2 components",
            graph.num_components(),
            2,
        ),
        claim_bool(
            "the components are exactly the two blocks (cross-pairs are orthogonal both ways by the Pythagorean split of the l2-sum dual)",
            if split_clean { "blocks separated" } else { "unexpected split" },
            split_clean,
        ),
        claim_bool(
            "rigidity verdict is NonScalarWitness with per-component values 1 and -1 (within 1e-9)",
            if is_witness { "non-scalar witness" } else { "unexpected verdict" },
            is_witness && lam_dev <= 1e-9,
        ),
    ];
    Ok(CorpusReport {
        scenario: "disjoint_sum".into(),
        claims,
        artifacts: Some(json!({
            "edges": graph.edges.len(),
            "components": graph.num_components(),
            "dot": export_dot(&graph),
        })),
    })
}

/// The sup-norm space over a metrically connected sample: every unimodular
/// weight gives an exactly unitary multiplication operator, yet the
/// Birkhoff graph is edgeless — non-rigidity is diagnosed through the
/// graph, and nonconstant weights never receive a Scalar verdict.
pub fn run_cinfty_nonrigidity(n_points: usize, seed: u64) -> Result<CorpusReport> {
    if n_points < 2 {
        return Err(Error::Invalid("need at least two sample points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n_points;
    let points: Vec<PointRecord> = (0..m)
        .map(|i| PointRecord {
            id: format!("p{i}"),
            coord: Some([0.5 * i as f64, 0.0]),
        })
        .collect();
    let metric = RMat::from_fn(m, m, |i, j| 0.5 * (i as f64 - j as f64).abs());
    let phase = PhaseSpace::metric(points, metric, 0.6)?;
    let metric_components = distinct_count(phase.proximity_components());
    let model = FunctionSpaceModel::new(
        phase,
        CMat::identity(m, m),
        NormSpec::lp(f64::INFINITY, m)?,
    )?;

    let graph = build_graph(&model, DEFAULT_TOL)?;

    let mut all_structural = true;
    let mut false_scalars = 0usize;
    let mut nonconstant_runs = 0usize;
    for _ in 0..5 {
        let mut w: Vec<C64> = (0..m).map(|_| random_unit(&mut rng)).collect();
        w[1] = -w[0]; // force nonconstant
        let t = mo_from_weight(&model, &w, DEFAULT_TOL)?.ok_or(Error::NotAMultiplier {
            residual: f64::INFINITY,
            limit: DEFAULT_TOL,
        })?;
        let evidence = is_isometry(&model, &t, IsometryMode::Auto { n: 50, seed: 5 }, 1e-9)?;
        if evidence != crate::rigidity::IsometryEvidence::Structural {
            all_structural = false;
        }
        nonconstant_runs += 1;
        if let Ok(rep) = rigidity_verdict(&model, &w, DEFAULT_TOL) {
            if matches!(rep.verdict, RigidityVerdict::Scalar { .. }) {
                false_scalars += 1;
            }
        }
    }

    let lam = C64::from_polar(1.0, 0.4);
    let const_report = rigidity_verdict(&model, &vec![lam; m], DEFAULT_TOL)?;
    let const_dev = match const_report.verdict {
        RigidityVerdict::Scalar { lambda } => (lambda - lam).norm(),
        _ => f64::INFINITY,
    };

    let claims = vec![
        claim_count(
            "the sampled phase space is metrically connected (one proximity component)",
            metric_components,
            1,
        ),
        claim_bool(
            "every sampled unimodular weight is an exactly unitary multiplication operator (structural phase-permutation certificate)",
            if all_structural { "structural certificates" } else { "weaker evidence" },
            all_structural,
        ),
        claim_count(
            "the Birkhoff graph is edgeless: sup-norm point evaluations are mutually orthogonal",
            graph.edges.len(),
            0,
        ),
        claim_count(
            &format!(
                "no false Scalar verdict across {nonconstant_runs} nonconstant unimodular weights"
            ),
            false_scalars,
            0,
        ),
        claim_le(
            "a constant unimodular weight still gets verdict Scalar (deviation from the constant, tolerance 1e-9)",
            const_dev,
            1e-9,
        ),
    ];
    Ok(CorpusReport {
        scenario: "cinfty_nonrigidity".into(),
        claims,
        artifacts: Some(json!({
            "points": m,
            "graph_components": graph.num_components(),
        })),
    })
}

/// A Hilbert kernel model with everywhere-nonzero evaluation inner
/// products: the Birkhoff graph is complete, every nonconstant unimodular
/// weight fails exact unitarity, constants pass and get Scalar verdicts,
/// and a search hook records (rather than asserts away) any nontrivial
/// unitary multiplication candidate on connected strictly convex models.
pub fn run_hilbert_rigidity(seed: u64) -> Result<CorpusReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<f64> = (0..6).map(|i| 0.4 * i as f64).collect();
    let model = gaussian_kernel_model(&coords)?;
    let m = model.num_points();

    let graph = build_graph(&model, DEFAULT_TOL)?;

    // nonconstant unimodular weights are all rejected as non-isometric
    let mut rejected = 0usize;
    let trials = 20usize;
    for _ in 0..trials {
        let mut w: Vec<C64> = (0..m).map(|_| random_unit(&mut rng)).collect();
        w[0] = w[1] * C64::from_polar(1.0, 1.0 + rng.random::<f64>());
        match rigidity_verdict(&model, &w, DEFAULT_TOL) {
            Err(Error::NotIsometric(_)) => rejected += 1,
            _ => {}
        }
    }

    // constant weight i
    let wi: Vec<C64> = vec![C64::new(0.0, 1.0); m];
    let report_i = rigidity_verdict(&model, &wi, DEFAULT_TOL)?;
    let dev_i = match report_i.verdict {
        RigidityVerdict::Scalar { lambda } => (lambda - C64::new(0.0, 1.0)).norm(),
        _ => f64::INFINITY,
    };

    // every operator passing multiplication detection + exact unitarity
    // renders Scalar
    let mut candidates: Vec<CMat> = vec![
        CMat::from_diagonal(&CVec::from_element(m, C64::new(0.0, 1.0))),
        CMat::from_diagonal(&CVec::from_element(
            m,
            C64::from_polar(1.0, std::f64::consts::FRAC_PI_3),
        )),
    ];
    for _ in 0..3 {
        let a = CMat::from_fn(m, m, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        candidates.push(a.qr().q()); // unitary for the identity form, not for the Gram
    }
    for _ in 0..5 {
        let w: Vec<C64> = (0..m).map(|_| random_unit(&mut rng)).collect();
        candidates.push(CMat::from_diagonal(&CVec::from_iterator(m, w)));
    }
    let mut survivors = 0usize;
    let mut scalar_failures = 0usize;
    let mut max_weight_dev = 0.0_f64;
    for t in &candidates {
        let MoDetection::Weight(w) = detect_mo(&model, t, DEFAULT_TOL)? else {
            continue;
        };
        if is_isometry(&model, t, IsometryMode::ExactHilbert, 1e-9).is_err() {
            continue;
        }
        survivors += 1;
        match rigidity_verdict(&model, &w, DEFAULT_TOL) {
            Ok(rep) => match rep.verdict {
                RigidityVerdict::Scalar { lambda } => {
                    max_weight_dev = max_weight_dev.max((lambda - w[0]).norm());
                }
                _ => scalar_failures += 1,
            },
            Err(_) => scalar_failures += 1,
        }
    }

    // two-point forced-equality example: with evaluation inner product 1/2,
    // a phase offset between the two weights breaks exact unitarity
    let eval_gram = CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(1.0, 0.0),
        ],
    );
    let g2 = eval_gram.try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let g2 = (&g2 + g2.adjoint()).scale(0.5);
    let pts2 = vec![
        PointRecord { id: "a".into(), coord: Some([0.0, 0.0]) },
        PointRecord { id: "b".into(), coord: Some([1.0, 0.0]) },
    ];
    let metric2 = RMat::from_fn(2, 2, |i, j| (i as f64 - j as f64).abs());
    let model2 = FunctionSpaceModel::new(
        PhaseSpace::metric(pts2, metric2, 1.5)?,
        CMat::identity(2, 2),
        NormSpec::hilbert(g2)?,
    )?;
    let mut offsets_ok = true;
    for phase in [0.0, 0.7, 1.9, std::f64::consts::PI] {
        let t = CMat::from_diagonal(&CVec::from_iterator(
            2,
            [C64::new(1.0, 0.0), C64::from_polar(1.0, phase)],
        ));
        let accepted = is_isometry(&model2, &t, IsometryMode::ExactHilbert, 1e-9).is_ok();
        if accepted != (phase == 0.0) {
            offsets_ok = false;
        }
    }

    // search hook: record nontrivial unitary candidates on connected models
    let mut checked = 0usize;
    let mut recorded: Vec<String> = Vec::new();
    let mut hard_failure = false;
    for trial in 0..5 {
        let probe = random_gaussian_kernel_model(4, &mut rng)?;
        let pm = probe.num_points();
        for c in 0..10 {
            let mut w: Vec<C64> = (0..pm).map(|_| random_unit(&mut rng)).collect();
            w[0] = w[1] * C64::from_polar(1.0, 0.8 + rng.random::<f64>());
            checked += 1;
            let Some(t) = mo_from_weight(&probe, &w, DEFAULT_TOL)? else {
                continue;
            };
            if is_isometry(&probe, &t, IsometryMode::ExactHilbert, 1e-9).is_ok() {
                let g = build_graph(&probe, DEFAULT_TOL)?;
                recorded.push(format!(
                    "trial {trial} candidate {c}: graph components {}",
                    g.num_components()
                ));
                if g.is_connected() {
                    if let Ok(rep) = rigidity_verdict(&probe, &w, DEFAULT_TOL) {
                        if matches!(rep.verdict, RigidityVerdict::Scalar { .. }) {
                            hard_failure = true;
                        }
                    }
                }
            }
        }
    }

    let claims = vec![
        claim_bool(
            "the Birkhoff graph is connected (all evaluation inner products nonzero)",
            if graph.is_connected() { "connected" } else { "disconnected" },
            graph.is_connected(),
        ),
        claim_count(
            &format!("all {trials} nonconstant unimodular weights are rejected as not isometric"),
            rejected,
            trials,
        ),
        claim_le(
            "constant weight i gets verdict Scalar(i) (deviation, tolerance 1e-9)",
            dev_i,
            1e-9,
        ),
        claim_bool(
            &format!(
                "every candidate passing multiplication detection and exact unitarity renders Scalar ({survivors} survivors, max weight deviation <= 1e-7)"
            ),
            if scalar_failures == 0 && survivors >= 2 { "all scalar" } else { "failures" },
            scalar_failures == 0 && survivors >= 2 && max_weight_dev <= 1e-7,
        ),
        claim_bool(
            "two-point model with evaluation inner product 1/2: exact unitarity forces equal weights (every nonzero phase offset rejected, zero offset accepted)",
            if offsets_ok { "forced equal" } else { "not forced" },
            offsets_ok,
        ),
        claim_bool(
            &format!(
                "search hook records nontrivial unitary candidates on connected strictly convex models without asserting none exist (checked {checked}, recorded {})",
                recorded.len()
            ),
            if hard_failure { "hard failure: false Scalar" } else { "no hard failure" },
            !hard_failure,
        ),
    ];
    Ok(CorpusReport {
        scenario: "hilbert_rigidity".into(),
        claims,
        artifacts: Some(json!({ "recorded_candidates": recorded })),
    })
}

/// A metrically disconnected space whose components sit closer than 1:
/// point-evaluation norms are all 1 while cross-component evaluation
/// distances stay below 1, which kills orthogonality across the gap — the
/// Birkhoff graph is connected and rigidity holds despite the metric split.
pub fn run_lip_components(seed: u64) -> Result<CorpusReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = |rng: &mut ChaCha8Rng| 0.02 * rng.random::<f64>();
    let coords = [
        0.0,
        0.1 + jitter(&mut rng),
        0.6 + jitter(&mut rng),
        0.7 + jitter(&mut rng),
    ];
    let m = coords.len();
    let metric = RMat::from_fn(m, m, |i, j| (coords[i] - coords[j]).abs());
    let model = lipschitz_space_with_eps(&metric, 0, true, 0.15)?;
    let metric_components = distinct_count(model.phase.proximity_components());

    // the certifying inequality at w = point 2 (far cluster), y = point 1
    let dual = model.dual_space_view(1e-6)?;
    let phi_w = model.point_evaluation_at(2).coeffs;
    let phi_y = model.point_evaluation_at(1).coeffs;
    let norm_w = dual.eval(&phi_w)?;
    let norm_diff = dual.eval(&(&phi_w - &phi_y))?;
    let d_wy = metric[(2, 1)];

    let graph = build_graph(&model, 1e-6)?;

    let lam = C64::from_polar(1.0, 1.2);
    let const_report = rigidity_verdict(&model, &vec![lam; m], 1e-6)?;
    let const_dev = match const_report.verdict {
        RigidityVerdict::Scalar { lambda } => (lambda - lam).norm(),
        _ => f64::INFINITY,
    };

    let split: Vec<C64> = vec![
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(-1.0, 0.0),
    ];
    let split_result = rigidity_verdict(&model, &split, 1e-6);
    let split_rejected = matches!(
        split_result,
        Err(Error::NotIsometric(_)) | Err(Error::ComponentDisagreement { .. })
    );

    let claims = vec![
        claim_count(
            "the metric sample has two proximity components (the space is metrically disconnected)",
            metric_components,
            2,
        ),
        claim_near(
            "cross-component evaluation norm: a far-cluster point has evaluation norm max(1, distance to basepoint) = 1 (tolerance 1e-5)",
            norm_w,
            1.0,
            1e-5,
        ),
        claim_near(
            &format!(
                "cross-component evaluation distance equals the metric distance {d_wy:.6} (tolerance 1e-5)"
            ),
            norm_diff,
            d_wy,
            1e-5,
        ),
        claim_bool(
            "the certifying inequality holds: evaluation distance < evaluation norm, so the far evaluation is not orthogonal to the near one",
            if norm_diff < norm_w - 0.25 { "strict inequality" } else { "no margin" },
            norm_diff < norm_w - 0.25,
        ),
        claim_count(
            "the Birkhoff graph is connected across the metric gap (one component)",
            graph.num_components(),
            1,
        ),
        claim_le(
            "a constant unimodular weight renders Scalar (deviation from the constant, tolerance 1e-6)",
            const_dev,
            1e-6,
        ),
        claim_bool(
            "the per-cluster sign weight is rejected (not isometric, or eigenvalue propagation fails across a bridging edge)",
            if split_rejected { "rejected" } else { "accepted" },
            split_rejected,
        ),
    ];
    Ok(CorpusReport {
        scenario: "lip_components".into(),
        claims,
        artifacts: Some(json!({
            "coords": coords.to_vec(),
            "edges": graph.edges.len(),
        })),
    })
}

/// `lipschitz_space` with an explicit proximity radius instead of the
/// derived default (which would otherwise bridge the deliberate gap).
fn lipschitz_space_with_eps(
    metric: &RMat,
    basepoint: usize,
    penalize: bool,
    eps: f64,
) -> Result<FunctionSpaceModel> {
    let base = lipschitz_space(metric.clone(), basepoint, penalize)?;
    let points = base.phase.points.clone();
    let phase = PhaseSpace::metric(points, metric.clone(), eps)?;
    FunctionSpaceModel::new(phase, base.basis.clone(), base.coeff_norm.clone())
}

/// Near-strict-convexity probe: strictly convex norms have zero-dimensional
/// sphere faces; the truncated product of shrinking sup-norm squares keeps
/// a face of affine dimension exactly N; and the l1 sum of a Hilbert space
/// with a line keeps faces of dimension at most 1.
pub fn run_nsc_probe() -> Result<CorpusReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut claims = Vec::new();

    // (a) strictly convex spaces: all sampled sphere faces are points
    let lp2 = NormSpec::lp(2.0, 4)?;
    let mut max_face = 0usize;
    for _ in 0..50 {
        let v = random_cvec(&mut rng, 4);
        let e = v.unscale(norm_eval(&lp2, &v)?);
        max_face = max_face.max(sphere_face_dimension(&lp2, &e, 1e-9)?);
    }
    claims.push(claim_count(
        "l2 sphere faces are zero-dimensional across 50 samples (max observed)",
        max_face,
        0,
    ));
    let a = CMat::from_fn(3, 3, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let hg = NormSpec::hilbert(&a * a.adjoint() + CMat::identity(3, 3).scale(0.5))?;
    let mut max_face_h = 0usize;
    for _ in 0..50 {
        let v = random_cvec(&mut rng, 3);
        let e = v.unscale(norm_eval(&hg, &v)?);
        max_face_h = max_face_h.max(sphere_face_dimension(&hg, &e, 1e-9)?);
    }
    claims.push(claim_count(
        "Hilbert sphere faces are zero-dimensional across 50 samples (max observed)",
        max_face_h,
        0,
    ));

    // (b) truncated product of shrinking real sup-norm squares under an
    // outer l2 norm: the block faces through (1/n, t) multiply up to a
    // face of affine dimension exactly N
    let linf2 = || {
        NormSpec::polyhedral(
            2,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
    };
    let mut face_dims = Vec::new();
    for n_blocks in [2usize, 3, 4] {
        let spec = NormSpec::block_sum(
            (0..n_blocks).map(|_| linf2()).collect::<Result<Vec<_>>>()?,
            RhoCombiner::OuterLp { p: 2.0 },
        )?;
        let dim = 2 * n_blocks;
        let rho = (1..=n_blocks)
            .map(|n| (1.0 / n as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        let point = |ts: &[f64]| -> CVec {
            CVec::from_fn(dim, |i, _| {
                let block = i / 2;
                if i % 2 == 0 {
                    C64::new(1.0 / (block + 1) as f64, 0.0)
                } else {
                    C64::new(ts[block], 0.0)
                }
            })
        };
        let mut samples = vec![point(&vec![0.0; n_blocks])];
        for b in 0..n_blocks {
            for s in [-1.0, 1.0] {
                let mut ts = vec![0.0; n_blocks];
                ts[b] = s * 0.9 / (b + 1) as f64;
                samples.push(point(&ts));
            }
        }
        for _ in 0..20 {
            let ts: Vec<f64> = (0..n_blocks)
                .map(|b| (2.0 * rng.random::<f64>() - 1.0) * 0.9 / (b + 1) as f64)
                .collect();
            samples.push(point(&ts));
        }

        let mut worst_norm_dev = 0.0_f64;
        for s in &samples {
            worst_norm_dev = worst_norm_dev.max((norm_eval(&spec, s)? - rho).abs());
        }
        let mut worst_mid_dev = 0.0_f64;
        for i in 0..samples.len().min(8) {
            for j in i + 1..samples.len().min(8) {
                let mid = (&samples[i] + &samples[j]).scale(0.5);
                worst_mid_dev = worst_mid_dev.max((norm_eval(&spec, &mid)? - rho).abs());
            }
        }
        let mut face_min = usize::MAX;
        let mut face_max = 0usize;
        for s in &samples {
            let f = sphere_face_dimension(&spec, &s.unscale(rho), 1e-9)?;
            face_min = face_min.min(f);
            face_max = face_max.max(f);
        }
        // affine dimension of the sampled face
        let rows = samples.len() - 1;
        let diffs = RMat::from_fn(rows, dim, |r, c| (samples[r + 1][c] - samples[0][c]).re);
        let sv = diffs.svd(false, false).singular_values;
        let cutoff = sv.max() * 1e-9;
        let affine_rank = sv.iter().filter(|s| **s > cutoff).count();

        claims.push(claim_le(
            &format!(
                "shrinking-squares product, N = {n_blocks}: every sampled face point has total norm rho = {rho:.9} (max deviation, tolerance 1e-12)"
            ),
            worst_norm_dev,
            1e-12,
        ));
        claims.push(claim_le(
            &format!(
                "shrinking-squares product, N = {n_blocks}: midpoints stay on the sphere — the sampled set is a convex sphere subset (max deviation, tolerance 1e-12)"
            ),
            worst_mid_dev,
            1e-12,
        ));
        claims.push(claim_bool(
            &format!(
                "shrinking-squares product, N = {n_blocks}: sphere face dimension is exactly {n_blocks} at every sample"
            ),
            &format!("min {face_min}, max {face_max}"),
            face_min == n_blocks && face_max == n_blocks,
        ));
        claims.push(claim_count(
            &format!(
                "shrinking-squares product, N = {n_blocks}: affine dimension of the sampled face grows with the truncation (finite surrogate of an infinite-dimensional face)"
            ),
            affine_rank,
            n_blocks,
        ));
        face_dims.push(json!({ "n": n_blocks, "face_dim": face_max, "affine_rank": affine_rank }));
    }

    // (c) Hilbert plus line under an outer l1 norm: faces are segments
    let hplus = NormSpec::block_sum(
        vec![NormSpec::hilbert(CMat::identity(2, 2))?, NormSpec::lp(2.0, 1)?],
        RhoCombiner::OuterLp { p: 1.0 },
    )?;
    let mut face_lo = usize::MAX;
    let mut face_hi = 0usize;
    for _ in 0..50 {
        let mut v = random_cvec(&mut rng, 3);
        v[0] += C64::new(0.3, 0.0); // keep the Hilbert part away from zero
        v[2] += C64::new(0.3, 0.0); // keep the line part away from zero
        let e = v.unscale(norm_eval(&hplus, &v)?);
        let f = sphere_face_dimension(&hplus, &e, 1e-9)?;
        face_lo = face_lo.min(f);
        face_hi = face_hi.max(f);
    }
    claims.push(claim_bool(
        "Hilbert-plus-line l1 sum: sphere face dimension is at most 1 across 50 samples with both parts nonzero (observed exactly 1: the face is the segment trading mass between the parts)",
        &format!("min {face_lo}, max {face_hi}"),
        face_hi <= 1,
    ));

    Ok(CorpusReport {
        scenario: "nsc_probe".into(),
        claims,
        artifacts: Some(json!({ "product_faces": face_dims })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all_pass(report: &CorpusReport) {
        for c in &report.claims {
            assert!(
                c.pass,
                "scenario {} claim failed: {} (expected {}, observed {})",
                report.scenario, c.description, c.expected, c.observed
            );
        }
    }

    #[test]
    fn lipschitz_mo_passes() {
        let report = run_lipschitz_mo(40, 11).unwrap();
        assert_all_pass(&report);
        let witness: f64 = report.claims[1].observed.parse().unwrap();
        assert!(witness >= 1.9 && witness <= 2.0 + 1e-9);
    }

    #[test]
    fn rkhs_shift_passes() {
        let report = run_rkhs_shift(50, 20).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn rkhs_bilateral_passes() {
        let report = run_rkhs_bilateral(3).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn disjoint_sum_passes() {
        let report = run_disjoint_sum(23).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn cinfty_nonrigidity_passes() {
        let report = run_cinfty_nonrigidity(6, 31).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn hilbert_rigidity_passes() {
        let report = run_hilbert_rigidity(41).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn lip_components_passes() {
        let report = run_lip_components(53).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn nsc_probe_passes() {
        let report = run_nsc_probe().unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn dispatcher_and_serialization() {
        assert!(matches!(run_scenario("no_such", 0), Err(Error::Invalid(_))));
        let report = run_rkhs_bilateral(2).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: CorpusReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.scenario, report.scenario);
        assert_eq!(back.claims.len(), report.claims.len());
        assert!(back.passed());
    }

    #[test]
    fn full_corpus_is_deterministic() {
        let a = run_all(9).unwrap();
        let b = run_all(9).unwrap();
        assert_eq!(a.len(), SCENARIOS.len());
        for (ra, rb) in a.iter().zip(b.iter()) {
            assert!(ra.passed(), "scenario {} failed", ra.scenario);
            for (ca, cb) in ra.claims.iter().zip(rb.claims.iter()) {
                assert_eq!(ca.observed, cb.observed, "{}: {}", ra.scenario, ca.description);
            }
        }
    }
}
