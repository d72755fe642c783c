//! Finite models of normed spaces of continuous functions.
//!
//! A model consists of a *phase space* (named sample points with a proximity
//! structure that serves as connectivity ground truth), a *basis* matrix `B`
//! whose column `j` holds the values of basis function `j` at every sample
//! point, and a norm on the coefficient space. A function is a coefficient
//! vector `c`; its values are `B c`, and the point evaluation at sample `x`
//! is the functional given by row `x` of `B` (bilinear pairing).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normed_space::{
    complex_rank, serde_repr, validate_metric, DualView, Functional, NormSpec,
};
use crate::{CMat, CVec, RMat};

type C64 = Complex64;

/// A named sample point, optionally carrying a complex coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: String,
    /// `[re, im]` coordinate, when the point lives in the complex plane.
    pub coord: Option<[f64; 2]>,
}

impl PointRecord {
    pub fn coord_c64(&self) -> Option<C64> {
        self.coord.map(|[a, b]| C64::new(a, b))
    }
}

/// Ground-truth proximity: either a metric with a nearness threshold or an
/// explicit symmetric adjacency list. Connectivity claims about a model are
/// judged against this structure, never against the Birkhoff graph itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Proximity {
    Metric {
        #[serde(with = "serde_repr::rmat")]
        matrix: RMat,
        /// Two points are near when their distance is `<= eps`.
        eps: f64,
    },
    Adjacency {
        /// Unordered pairs of point indices, stored with the smaller first.
        pairs: Vec<(usize, usize)>,
    },
}

/// Finite sample of a phase space: named points plus proximity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseSpace {
    pub points: Vec<PointRecord>,
    pub proximity: Proximity,
}

impl PhaseSpace {
    /// Phase space over a metric sample; points within `eps` count as near.
    pub fn metric(points: Vec<PointRecord>, matrix: RMat, eps: f64) -> Result<Self> {
        let space = PhaseSpace {
            points,
            proximity: Proximity::Metric { matrix, eps },
        };
        space.validate()?;
        Ok(space)
    }

    /// Phase space with explicit adjacency (pairs are normalized and
    /// deduplicated; self-loops are rejected).
    pub fn adjacency(points: Vec<PointRecord>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        norm.sort_unstable();
        norm.dedup();
        let space = PhaseSpace {
            points,
            proximity: Proximity::Adjacency { pairs: norm },
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Invalid("phase space needs at least one point".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &self.points {
            if !seen.insert(p.id.as_str()) {
                return Err(Error::DuplicatePoint(p.id.clone()));
            }
        }
        match &self.proximity {
            Proximity::Metric { matrix, eps } => {
                if matrix.nrows() != self.points.len() {
                    return Err(Error::DimensionMismatch {
                        expected: self.points.len(),
                        got: matrix.nrows(),
                    });
                }
                validate_metric(matrix)?;
                if !eps.is_finite() || *eps <= 0.0 {
                    return Err(Error::Invalid(format!("nearness threshold {eps} invalid")));
                }
            }
            Proximity::Adjacency { pairs } => {
                for (a, b) in pairs {
                    if *a == *b {
                        return Err(Error::Invalid(format!("self-loop at point {a}")));
                    }
                    if *a >= self.points.len() || *b >= self.points.len() {
                        return Err(Error::UnknownPoint(format!("adjacency index {}", a.max(b))));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point with the given id.
    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Whether points `i` and `j` are near under the proximity structure.
    pub fn near(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        match &self.proximity {
            Proximity::Metric { matrix, eps } => matrix[(i, j)] <= *eps,
            Proximity::Adjacency { pairs } => {
                let key = (i.min(j), i.max(j));
                pairs.binary_search(&key).is_ok()
            }
        }
    }

    /// Metric matrix, when the proximity structure is metric.
    pub fn metric_matrix(&self) -> Option<&RMat> {
        match &self.proximity {
            Proximity::Metric { matrix, .. } => Some(matrix),
            Proximity::Adjacency { .. } => None,
        }
    }

    /// Component label per point of the proximity graph — the ground truth
    /// for connectivity claims. Labels are the smallest point index in each
    /// component.
    pub fn proximity_components(&self) -> Vec<usize> {
        let n = self.len();
        let mut label: Vec<usize> = (0..n).collect();
        // iterate to fixed point (small n; clarity over asymptotics)
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    if self.near(i, j) {
                        let m = label[i].min(label[j]);
                        if label[i] != m || label[j] != m {
                            label[i] = m;
                            label[j] = m;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return label;
            }
        }
    }
}

/// Default nearness threshold for metric samples: slightly above the largest
/// nearest-neighbor distance, so every point has at least one neighbor and a
/// sample drawn from a connected set yields a connected proximity graph.
pub fn default_eps(matrix: &RMat) -> f64 {
    let n = matrix.nrows();
    if n < 2 {
        return 1.0;
    }
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut nearest = f64::INFINITY;
        for j in 0..n {
            if i != j {
                nearest = nearest.min(matrix[(i, j)]);
            }
        }
        worst = worst.max(nearest);
    }
    worst * 1.01
}

/// A finite-scale model of a normed space of functions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionSpaceModel {
    #[serde(flatten)]
    pub phase: PhaseSpace,
    /// `m x k`: column `j` = values of basis function `j` at all `m` points.
    #[serde(with = "serde_repr::cmat")]
    pub basis: CMat,
    #[serde(rename = "norm")]
    pub coeff_norm: NormSpec,
}

impl FunctionSpaceModel {
    pub fn new(phase: PhaseSpace, basis: CMat, coeff_norm: NormSpec) -> Result<Self> {
        let model = FunctionSpaceModel {
            phase,
            basis,
            coeff_norm,
        };
        model.validate()?;
        Ok(model)
    }

    /// Full validation, including independence of the basis columns as
    /// functions on the sample.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        let k = self.basis.ncols();
        let rank = complex_rank(&self.basis, 1e-10);
        if rank < k {
            return Err(Error::RankDeficientBasis { rank, cols: k });
        }
        Ok(())
    }

    /// Validation without the column-rank requirement. Kernel models carry
    /// an orthonormal basis of the ambient space whose restriction to a
    /// small sample may legitimately be column-rank deficient (fewer points
    /// than basis functions); everything else must still hold.
    pub fn validate_shape(&self) -> Result<()> {
        self.phase.validate()?;
        self.coeff_norm.validate()?;
        let (m, k) = self.basis.shape();
        if m != self.phase.len() {
            return Err(Error::DimensionMismatch {
                expected: self.phase.len(),
                got: m,
            });
        }
        if k == 0 {
            return Err(Error::Invalid("basis needs at least one column".into()));
        }
        if self.coeff_norm.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: self.coeff_norm.dim(),
            });
        }
        if !self.basis.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.phase.len()
    }

    pub fn coeff_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Point evaluation functional at the point with the given id: row of
    /// the basis matrix, acting bilinearly on coefficient vectors.
    pub fn point_evaluation(&self, id: &str) -> Result<Functional> {
        Ok(self.point_evaluation_at(self.phase.index_of(id)?))
    }

    /// Point evaluation functional by point index.
    pub fn point_evaluation_at(&self, index: usize) -> Functional {
        Functional::new(self.basis.row(index).transpose().into_owned())
    }

    /// Values `B c` of the function with coefficients `c` at all points.
    pub fn evaluate(&self, c: &CVec) -> Result<CVec> {
        if c.len() != self.coeff_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.coeff_dim(),
                got: c.len(),
            });
        }
        Ok(&self.basis * c)
    }

    /// 1-independence: no point evaluation vanishes. Returns the violating
    /// point indices (empty iff 1-independent). Vanishing is judged at
    /// absolute tolerance `1e-12` on the largest row entry.
    pub fn is_1_independent(&self) -> (bool, Vec<usize>) {
        let mut bad = Vec::new();
        for i in 0..self.num_points() {
            let mx = self.basis.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if mx <= 1e-12 {
                bad.push(i);
            }
        }
        (bad.is_empty(), bad)
    }

    /// 2-independence: every pair of point evaluations is linearly
    /// independent. Returns the first violating pair, if any. Dependence is
    /// judged by all 2x2 minors of the row pair vanishing relative to the
    /// row magnitudes.
    pub fn is_2_independent(&self) -> (bool, Option<(usize, usize)>) {
        let m = self.num_points();
        let k = self.coeff_dim();
        for x in 0..m {
            for y in (x + 1)..m {
                let u = self.basis.row(x);
                let v = self.basis.row(y);
                let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max)
                    * v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let mut top = 0.0_f64;
                for a in 0..k {
                    for b in (a + 1)..k {
                        top = top.max((u[a] * v[b] - u[b] * v[a]).norm());
                    }
                }
                if top <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return (false, Some((x, y)));
                }
            }
        }
        (true, None)
    }

    /// Evaluator for the dual norm on functionals over the coefficient
    /// space; point evaluations are compared through this view.
    pub fn dual_space_view(&self, tol: f64) -> Result<DualView<'_>> {
        DualView::new(&self.coeff_norm, tol)
    }
}

/// Kernel family for [`rkhs_from_kernel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KernelChoice {
    /// Basis `e_0 .. e_N`, `e_n(z) = z ω(z)^n / 2^n`.
    Unilateral { n: usize },
    /// Basis `e_{-N} .. e_N`, `e_n(z) = z ω(z)^n / 2^{|n|}`.
    Bilateral { n: usize },
}

/// Phase direction `ω(z) = z/|z|`, with `ω(0) = 1` by convention.
pub fn omega(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Reproducing-kernel model on the given complex sample points.
///
/// Columns are built recursively — `e_{n+1} = ω ⊙ e_n / 2` going up and
/// `e_{n-1} = conj(ω) ⊙ e_n / 2` going down — so multiplication by `ω`
/// maps basis columns onto each other exactly (no rounding): the weighted
/// shift structure holds bitwise. The basis is orthonormal, so the
/// coefficient norm is Euclidean (identity Gram).
///
/// Returns the model plus the indices of sample points at the origin, where
/// the `ω(0) = 1` convention was applied (the phase function is
/// discontinuous there).
pub fn rkhs_from_kernel(
    points: &[C64],
    kernel: KernelChoice,
) -> Result<(FunctionSpaceModel, Vec<usize>)> {
    let m = points.len();
    if m == 0 {
        return Err(Error::Invalid("need at least one sample point".into()));
    }
    let order = match kernel {
        KernelChoice::Unilateral { n } | KernelChoice::Bilateral { n } => n,
    };
    if order == 0 {
        return Err(Error::Invalid("kernel truncation order must be >= 1".into()));
    }
    for z in points {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::Invalid(format!(
                "sample point {z} outside the closed unit disk"
            )));
        }
    }
    let flagged: Vec<usize> = (0..m).filter(|i| points[*i].norm() == 0.0).collect();
    let w: Vec<C64> = points.iter().map(|z| omega(*z)).collect();
    let e0: Vec<C64> = points.to_vec();

    let cols: Vec<Vec<C64>> = match kernel {
        KernelChoice::Unilateral { n } => {
            let mut cols = vec![e0];
            for _ in 0..n {
                let prev = cols.last().unwrap();
                cols.push((0..m).map(|i| w[i] * prev[i] * 0.5).collect());
            }
            cols
        }
        KernelChoice::Bilateral { n } => {
            let mut up = vec![e0.clone()];
            for _ in 0..n {
                let prev = up.last().unwrap();
                up.push((0..m).map(|i| w[i] * prev[i] * 0.5).collect());
            }
            let mut down = Vec::with_capacity(n);
            let mut prev = e0;
            for _ in 0..n {
                prev = (0..m).map(|i| w[i].conj() * prev[i] * 0.5).collect();
                down.push(prev.clone());
            }
            down.reverse();
            down.into_iter().chain(up).collect()
        }
    };
    let k = cols.len();
    let basis = CMat::from_fn(m, k, |i, j| cols[j][i]);

    let records: Vec<PointRecord> = points
        .iter()
        .enumerate()
        .map(|(i, z)| PointRecord {
            id: format!("z{i}"),
            coord: Some([z.re, z.im]),
        })
        .collect();
    let matrix = RMat::from_fn(m, m, |i, j| (points[i] - points[j]).norm());
    let eps = default_eps(&matrix);
    let phase = PhaseSpace::metric(records, matrix, eps)?;
    let model = FunctionSpaceModel {
        phase,
        basis,
        coeff_norm: NormSpec::hilbert(CMat::identity(k, k))?,
    };
    model.validate_shape()?;
    Ok((model, flagged))
}

/// Truncated kernel `Σ_n e_n(z_i) conj(e_n(z_j))` from the model's columns.
pub fn kernel_partial_sum(model: &FunctionSpaceModel, i: usize, j: usize) -> C64 {
    (0..model.coeff_dim())
        .map(|n| model.basis[(i, n)] * model.basis[(j, n)].conj())
        .sum()
}

/// Closed form `4 z w̄ / (4|z||w| − z w̄)` the truncated kernel converges to
/// on the unit circle.
pub fn kernel_closed_form(z: C64, w: C64) -> C64 {
    let zw = z * w.conj();
    4.0 * zw / (C64::new(4.0 * z.norm() * w.norm(), 0.0) - zw)
}

/// Lipschitz function-space model over a finite metric space: delta-function
/// basis on the sample points, Lipschitz coefficient norm. With
/// `penalize = true` the norm is `dil f + |f(basepoint)|` on all value
/// vectors; with `penalize = false` functions vanish at the basepoint, whose
/// delta function is dropped from the basis (its row is zero — the one
/// point where 1-independence fails).
pub fn lipschitz_space(metric: RMat, basepoint: usize, penalize: bool) -> Result<FunctionSpaceModel> {
    let m = metric.nrows();
    if basepoint >= m {
        return Err(Error::UnknownPoint(format!("basepoint {basepoint}")));
    }
    let coeff_norm = NormSpec::lipschitz(metric.clone(), basepoint, penalize)?;
    let k = coeff_norm.dim();
    let basis = if penalize {
        CMat::identity(m, m)
    } else {
        CMat::from_fn(m, k, |i, j| {
            let col_point = if j < basepoint { j } else { j + 1 };
            if i == col_point {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let records: Vec<PointRecord> = (0..m)
        .map(|i| PointRecord {
            id: format!("x{i}"),
            coord: None,
        })
        .collect();
    let eps = default_eps(&metric);
    let phase = PhaseSpace::metric(records, metric, eps)?;
    FunctionSpaceModel::new(phase, basis, coeff_norm)
}
