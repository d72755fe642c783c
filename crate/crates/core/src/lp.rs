//! Small dense linear programs backing polyhedral dual norms and face
//! analysis. Problems are tiny (tens of variables); they are rebuilt from
//! scratch per solve.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

/// Gauge of `conv(facets)` at `target`: `min sum(mu)` subject to
/// `sum_j mu_j * facet_j = target`, `mu >= 0`. With a negation-symmetric,
/// spanning facet set this equals the dual norm of `target`.
pub(crate) fn polyhedral_gauge(facets: &[Vec<f64>], target: &[f64]) -> Result<f64> {
    let dim = target.len();
    if target.iter().all(|x| x.abs() == 0.0) {
        return Ok(0.0);
    }
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let mu: Vec<Variable> = facets
        .iter()
        .map(|_| p.add_var(1.0, (0.0, f64::INFINITY)))
        .collect();
    for d in 0..dim {
        let row: Vec<(Variable, f64)> = mu
            .iter()
            .zip(facets.iter())
            .map(|(v, f)| (*v, f[d]))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        p.add_constraint(row, ComparisonOp::Eq, target[d]);
    }
    let sol = p
        .solve()
        .map_err(|e| Error::LpFailure(format!("polyhedral gauge: {e:?}")))?;
    Ok(sol.objective())
}

/// Minimum of `<c_k, v>` over the facet face `{ v : <c_j, v> = 1,
/// <c_l, v> <= 1 for all l }`. Used to detect constraints forced to equality
/// on the face.
pub(crate) fn facet_face_min(facets: &[Vec<f64>], j: usize, k: usize) -> Result<f64> {
    let dim = facets[j].len();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let v: Vec<Variable> = (0..dim)
        .map(|d| p.add_var(facets[k][d], (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (l, f) in facets.iter().enumerate() {
        let row: Vec<(Variable, f64)> = v
            .iter()
            .zip(f.iter())
            .map(|(var, c)| (*var, *c))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        let op = if l == j { ComparisonOp::Eq } else { ComparisonOp::Le };
        p.add_constraint(row, op, 1.0);
    }
    let sol = p
        .solve()
        .map_err(|e| Error::LpFailure(format!("facet face: {e:?}")))?;
    Ok(sol.objective())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_of_linf_ball_facets_is_l1() {
        // facets of the max-norm ball in 2d; their hull is the cross-polytope,
        // whose gauge is the 1-norm
        let facets = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let g = polyhedral_gauge(&facets, &[1.0, 2.0]).unwrap();
        assert!((g - 3.0).abs() < 1e-9, "{g}");
        let g2 = polyhedral_gauge(&facets, &[-0.3, 0.1]).unwrap();
        assert!((g2 - 0.4).abs() < 1e-9, "{g2}");
    }

    #[test]
    fn facet_face_min_detects_forced_equalities() {
        // square: on the face {v1 = 1}, v2 ranges over [-1, 1]
        let facets = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let min_v2 = facet_face_min(&facets, 0, 2).unwrap();
        assert!((min_v2 + 1.0).abs() < 1e-9, "{min_v2}");
        // degenerate facet (1,1)/sqrt2-style: add redundant corner cut at 45 degrees
        let mut with_cut = facets.clone();
        let s = 0.5_f64.sqrt();
        with_cut.push(vec![s, s]);
        with_cut.push(vec![-s, -s]);
        // on the corner-cut face v1 + v2 = sqrt(2), so v1 ranges over
        // [sqrt(2) - 1, 1]
        let m = facet_face_min(&with_cut, 4, 0).unwrap();
        assert!((m - (2.0_f64.sqrt() - 1.0)).abs() < 1e-9, "{m}");
    }
}
