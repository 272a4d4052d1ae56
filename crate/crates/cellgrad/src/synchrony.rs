//! Classification of synchronous and 2-colour critical points.
//!
//! A synchronous point has every cell at the same value x0; it is critical
//! exactly when (x0, x0) is a critical point of the coupling. On regular
//! graphs the Hessian spectrum there has the closed form
//! mu_i = (alpha + beta) d - beta lambda_i, which drives the verdicts.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::admissible::AdmissibleFunction;
use crate::coupling::CouplingFunction;
use crate::graph::CellGraph;
use crate::spectra::{
    self, dm_two_colour_hessian, dm_two_colour_min_eigenvalue, dm_two_colour_positive, Inertia,
};
use crate::{Error, Result};

/// Nature of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Minimum,
    /// Saddle with the given number of negative eigenvalues.
    Saddle { index: usize },
    Maximum,
    /// Some eigenvalue is numerically zero; left unclassified.
    Degenerate,
}

/// Classification of a synchronous or 2-colour critical point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SyncClassification {
    /// Coupling second partial phi_11 at the point.
    pub alpha: f64,
    /// Mixed partial phi_12 at the point.
    pub beta: f64,
    /// phi_11 with arguments swapped (2-colour points only).
    pub gamma: Option<f64>,
    pub verdict: Verdict,
    pub inertia: Inertia,
    /// Whether (alpha, beta) lies in the wedge: network minimum without a
    /// coupling minimum. Always false for 2-colour points.
    pub wedge: bool,
}

fn verdict_from_inertia(i: Inertia) -> Verdict {
    if i.n_zero > 0 {
        Verdict::Degenerate
    } else if i.n_minus == 0 {
        Verdict::Minimum
    } else if i.n_plus == 0 {
        Verdict::Maximum
    } else {
        Verdict::Saddle { index: i.n_minus }
    }
}

/// Synchronous critical values of a coupling in a search interval.
#[derive(Debug, Clone)]
pub struct SynchronousCriticalSet {
    pub roots: Vec<f64>,
    /// The diagonal derivative vanishes identically on the sample grid:
    /// every synchronous point is critical.
    pub continuum: bool,
}

const GRID: usize = 512;

/// Finds all roots of g(t) = phi_1(t,t) + phi_2(t,t) in [lo, hi] by grid
/// scan plus bisection, polished to |g| <= 1e-10. A coupling for which g
/// vanishes identically is reported with the `continuum` flag instead.
pub fn find_synchronous_critical(
    phi: &CouplingFunction,
    lo: f64,
    hi: f64,
) -> Result<SynchronousCriticalSet> {
    if !(hi > lo) {
        return Err(Error::Precondition("empty search interval".into()));
    }
    let g = |t: f64| phi.d10(t, t) + phi.d01(t, t);
    let ts: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let gmax = gs.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let fscale = ts.iter().map(|&t| phi.value(t, t).abs()).fold(1.0_f64, f64::max);
    if gmax <= 1e-10 * fscale {
        return Ok(SynchronousCriticalSet { roots: Vec::new(), continuum: true });
    }

    let mut roots: Vec<f64> = Vec::new();
    let mut push = |r: f64| {
        if !roots.iter().any(|&x| (x - r).abs() < 1e-8) {
            roots.push(r);
        }
    };
    for i in 0..GRID {
        let (a, b) = (ts[i], ts[i + 1]);
        let (ga, gb) = (gs[i], gs[i + 1]);
        if ga == 0.0 {
            push(a);
            continue;
        }
        if ga.signum() == gb.signum() {
            continue;
        }
        let (mut a, mut b, mut ga) = (a, b, ga);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let gm = g(m);
            if gm == 0.0 || (b - a) < 1e-15 * (1.0 + m.abs()) {
                a = m;
                b = m;
                break;
            }
            if gm.signum() == ga.signum() {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        let r = 0.5 * (a + b);
        if g(r).abs() <= 1e-10 * fscale.max(1.0) {
            push(r);
        }
    }
    if gs[GRID] == 0.0 {
        push(ts[GRID]);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    Ok(SynchronousCriticalSet { roots, continuum: false })
}

/// Half-plane description of the wedge of a regular graph: parameter
/// pairs (alpha, beta) where the synchronous point is a network minimum
/// but not a coupling minimum.
#[derive(Debug, Clone, Copy)]
pub struct WedgeRegion {
    pub d: usize,
    pub lambda_max: f64,
}

impl WedgeRegion {
    /// Membership: alpha - beta < 0 and alpha + (1 - lambda/d) beta > 0.
    pub fn contains(&self, alpha: f64, beta: f64) -> bool {
        alpha - beta < 0.0 && alpha + (1.0 - self.lambda_max / self.d as f64) * beta > 0.0
    }

    /// Empty exactly when lambda_max = 2d (bipartite graphs).
    pub fn is_empty(&self) -> bool {
        (self.lambda_max - 2.0 * self.d as f64).abs() <= 1e-9
    }

    /// Maximal opening exactly when lambda_max = d + 1 (complete graphs).
    pub fn is_maximal(&self) -> bool {
        (self.lambda_max - (self.d as f64 + 1.0)).abs() <= 1e-9
    }

    /// Slope coefficient 1 - lambda/d of the lower boundary.
    pub fn slope(&self) -> f64 {
        1.0 - self.lambda_max / self.d as f64
    }
}

pub fn wedge_region(g: &CellGraph) -> Result<WedgeRegion> {
    let d = g
        .is_regular()
        .ok_or_else(|| Error::Precondition("wedge region requires a regular graph".into()))?;
    let lambda_max = *spectra::laplacian_spectrum(g).last().unwrap();
    Ok(WedgeRegion { d, lambda_max })
}

/// Whether the inequalities of the closed-form criterion classify the
/// synchronous point of a d-regular graph as a minimum:
/// alpha + beta > 0 and alpha + (1 - lambda/d) beta > 0.
pub fn synchronous_minimum_by_inequalities(
    d: usize,
    lambda_max: f64,
    alpha: f64,
    beta: f64,
) -> bool {
    alpha + beta > 0.0 && alpha + (1.0 - lambda_max / d as f64) * beta > 0.0
}

/// Classifies the synchronous point x0 of a regular graph via the
/// closed-form spectrum; fails if x0 is not critical for the coupling.
pub fn classify_synchronous(
    g: &CellGraph,
    phi: &CouplingFunction,
    x0: f64,
) -> Result<SyncClassification> {
    let resid = (phi.d10(x0, x0) + phi.d01(x0, x0)).abs();
    if resid > 1e-8 * (1.0 + phi.value(x0, x0).abs()) {
        return Err(Error::Precondition(format!(
            "x0 = {x0} is not a synchronous critical point (residual {resid:.3e})"
        )));
    }
    let alpha = phi.d20(x0, x0);
    let beta = phi.d11(x0, x0);
    let mu = spectra::synchronous_hessian_spectrum(g, alpha, beta)?;
    let inertia = spectra::inertia_of_eigenvalues(&mu, None);
    let wedge = wedge_region(g)?.contains(alpha, beta);
    Ok(SyncClassification {
        alpha,
        beta,
        gamma: None,
        verdict: verdict_from_inertia(inertia),
        inertia,
        wedge,
    })
}

/// A 2-colour pattern: part-1 cells at x0, part-2 cells at y0.
#[derive(Debug, Clone)]
pub struct TwoColourPattern {
    pub x0: f64,
    pub y0: f64,
    /// Full state vector following the bipartition.
    pub state: Vec<f64>,
}

impl TwoColourPattern {
    pub fn new(g: &CellGraph, x0: f64, y0: f64) -> Result<Self> {
        let bip = g
            .bipartition()
            .ok_or_else(|| Error::Precondition("2-colour pattern requires a bipartite graph".into()))?;
        let state =
            (1..=g.n()).map(|v| if bip.part_of(v) == 1 { x0 } else { y0 }).collect();
        Ok(TwoColourPattern { x0, y0, state })
    }
}

/// Finds 2-colour critical patterns: pairs (x0, y0), x0 != y0, with
/// grad phi(x0, y0) = 0, by Newton iteration from grid seeds. Returns the
/// empty list for non-bipartite graphs (2-colour equilibria require a
/// bipartition).
pub fn find_two_colour_critical(
    g: &CellGraph,
    phi: &CouplingFunction,
    lo: f64,
    hi: f64,
) -> Result<Vec<TwoColourPattern>> {
    if g.bipartition().is_none() {
        return Ok(Vec::new());
    }
    let seeds = 48;
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 0..=seeds {
        for j in 0..=seeds {
            let mut p = Vector2::new(
                lo + (hi - lo) * i as f64 / seeds as f64,
                lo + (hi - lo) * j as f64 / seeds as f64,
            );
            let mut ok = false;
            for _ in 0..80 {
                let grad = Vector2::new(phi.d10(p.x, p.y), phi.d01(p.x, p.y));
                if grad.amax() <= 1e-10 {
                    ok = true;
                    break;
                }
                let h = Matrix2::new(
                    phi.d20(p.x, p.y),
                    phi.d11(p.x, p.y),
                    phi.d11(p.x, p.y),
                    phi.d02(p.x, p.y),
                );
                // Least-squares step handles the singular Hessians of
                // difference couplings, whose critical sets are lines.
                let svd = h.svd(true, true);
                let mut step = svd.solve(&grad, 1e-12).unwrap_or(grad);
                let norm = step.norm();
                if !norm.is_finite() {
                    break;
                }
                if norm > 0.5 {
                    step *= 0.5 / norm;
                }
                p -= step;
                if !(p.x.is_finite() && p.y.is_finite()) {
                    break;
                }
            }
            if ok
                && p.x >= lo - 1e-9
                && p.x <= hi + 1e-9
                && p.y >= lo - 1e-9
                && p.y <= hi + 1e-9
                && (p.x - p.y).abs() > 1e-8
                && !found.iter().any(|&(a, b)| (a - p.x).abs() < 1e-6 && (b - p.y).abs() < 1e-6)
            {
                found.push((p.x, p.y));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    found.into_iter().map(|(x0, y0)| TwoColourPattern::new(g, x0, y0)).collect()
}

/// Classifies a 2-colour critical pattern on a (d,m)-graph through the
/// closed-form minimum eigenvalue plus a full eigensolve of the assembled
/// Hessian.
pub fn classify_two_colour(
    g: &CellGraph,
    phi: &CouplingFunction,
    x0: f64,
    y0: f64,
) -> Result<SyncClassification> {
    let (d, _m) = g
        .is_dm_graph()
        .ok_or_else(|| Error::Precondition("2-colour classification requires a (d,m)-graph".into()))?;
    let resid = phi.d10(x0, y0).abs().max(phi.d01(x0, y0).abs());
    if resid > 1e-8 * (1.0 + phi.value(x0, y0).abs()) {
        return Err(Error::Precondition(format!(
            "({x0}, {y0}) is not a critical point of the coupling (residual {resid:.3e})"
        )));
    }
    let alpha = phi.d20(x0, y0);
    let gamma = phi.d20(y0, x0);
    let beta = phi.d11(x0, y0);
    let h = dm_two_colour_hessian(g, alpha, gamma, beta)?;
    let ev = spectra::symmetric_eigenvalues(&h);
    let inertia = spectra::inertia_of_eigenvalues(&ev, None);
    // Closed form and eigensolve must agree on the smallest eigenvalue.
    let xi = dm_two_colour_min_eigenvalue(d, alpha, gamma, beta);
    if (xi - ev[0]).abs() > 1e-7 * (1.0 + ev[0].abs()) {
        return Err(Error::Numerical(format!(
            "closed-form minimum eigenvalue {xi} disagrees with eigensolve {}",
            ev[0]
        )));
    }
    let verdict = verdict_from_inertia(inertia);
    if inertia.n_zero == 0 {
        debug_assert_eq!(
            matches!(verdict, Verdict::Minimum),
            dm_two_colour_positive(alpha, gamma, beta)
        );
    }
    Ok(SyncClassification { alpha, beta, gamma: Some(gamma), verdict, inertia, wedge: false })
}

/// Multistart Newton search on the full gradient of the symmetric
/// admissible function built from `phi`, keeping converged points whose
/// coordinates take exactly two distinct values (v, w) forming a
/// genuine 2-colour pattern: (v, w) is a critical point of the coupling
/// and neither diagonal point (v, v), (w, w) is critical. Without the
/// diagonal condition two-valued critical points exist on any graph
/// (e.g. all cells at a diagonal critical value except one), so they
/// carry no bipartiteness information. Used to confirm that
/// non-bipartite graphs carry no 2-colour equilibria.
pub fn two_valued_critical_search(
    g: &CellGraph,
    phi: &CouplingFunction,
    starts: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let f = AdmissibleFunction::symmetric(g.clone(), phi.clone(), Default::default())?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits: Vec<Vec<f64>> = Vec::new();
    for _ in 0..starts {
        let mut x = DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.5..1.5)));
        let mut converged = false;
        for _ in 0..60 {
            let grad = DVector::from_vec(f.gradient(x.as_slice())?);
            if grad.amax() <= 1e-10 {
                converged = true;
                break;
            }
            let h: DMatrix<f64> = f.hessian(x.as_slice())?;
            let svd = h.svd(true, true);
            let mut step = svd.solve(&grad, 1e-12).map_err(|e| Error::Numerical(e.into()))?;
            let norm = step.norm();
            if !norm.is_finite() {
                break;
            }
            if norm > 1.0 {
                step *= 1.0 / norm;
            }
            x -= step;
            if x.iter().any(|v| !v.is_finite() || v.abs() > 1e6) {
                break;
            }
        }
        if !converged {
            continue;
        }
        // Cluster the coordinates; keep points with exactly two values.
        let mut values: Vec<f64> = Vec::new();
        for &v in x.iter() {
            if !values.iter().any(|&w| (w - v).abs() < 1e-6) {
                values.push(v);
            }
        }
        if values.len() == 2 {
            let (v, w) = (values[0], values[1]);
            let scale = 1.0 + phi.value(v, w).abs();
            let pair_critical =
                phi.d10(v, w).abs() <= 1e-7 * scale && phi.d10(w, v).abs() <= 1e-7 * scale;
            let diagonals_generic =
                phi.d10(v, v).abs() > 1e-6 * scale && phi.d10(w, w).abs() > 1e-6 * scale;
            if !(pair_critical && diagonals_generic) {
                continue;
            }
            let pt = x.as_slice().to_vec();
            if !hits
                .iter()
                .any(|h| h.iter().zip(&pt).all(|(a, b)| (a - b).abs() < 1e-6))
            {
                hits.push(pt);
            }
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{polynomial_coupling, PhaseCoupling};
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn continuum_of_difference_coupling() {
        let phi = polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, -2.0)], true).unwrap();
        let s = find_synchronous_critical(&phi, -1.0, 1.0).unwrap();
        assert!(s.continuum);
        assert!(s.roots.is_empty());
    }

    #[test]
    fn single_root_quadratic() {
        let phi = polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0)], true).unwrap();
        let s = find_synchronous_critical(&phi, -1.0, 1.0).unwrap();
        assert!(!s.continuum);
        assert_eq!(s.roots.len(), 1);
        assert!(s.roots[0].abs() < 1e-10);
    }

    #[test]
    fn root_of_phase_plus_confinement() {
        const TAU: f64 = std::f64::consts::TAU;
        let phi = CouplingFunction::from_fn(
            |x, y| (TAU * (x - y)).cos() + x * x + y * y,
            true,
        )
        .unwrap();
        let s = find_synchronous_critical(&phi, -0.9, 0.9).unwrap();
        assert_eq!(s.roots.len(), 1);
        assert!(s.roots[0].abs() < 1e-9, "{}", s.roots[0]);
    }

    #[test]
    fn wedge_interior_point_on_triangle() {
        // phi = x^2/2 + y^2/2 + 3xy/2: alpha = 1, beta = 1.5 at the origin.
        let phi =
            polynomial_coupling(&[(2, 0, 0.5), (0, 2, 0.5), (1, 1, 1.5)], true).unwrap();
        let k3 = CellGraph::complete(3).unwrap();
        let c = classify_synchronous(&k3, &phi, 0.0).unwrap();
        assert_eq!(c.verdict, Verdict::Minimum);
        assert!(c.wedge);
        // The coupling itself is a saddle at (0,0).
        let phess = Matrix2::new(c.alpha, c.beta, c.beta, c.alpha);
        assert!(phess.determinant() < 0.0);
        // Network spectrum is {0.5, 0.5, 5}.
        let mu = spectra::synchronous_hessian_spectrum(&k3, c.alpha, c.beta).unwrap();
        assert_relative_eq!(mu[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(mu[2], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_negative_diagonal_is_maximum() {
        // phi = -(x^2 + y^2)/2: alpha = -1, beta = 0.
        let phi = polynomial_coupling(&[(2, 0, -0.5), (0, 2, -0.5)], true).unwrap();
        for g in [CellGraph::ring(5).unwrap(), fixtures::petersen()] {
            let c = classify_synchronous(&g, &phi, 0.0).unwrap();
            assert_eq!(c.verdict, Verdict::Maximum);
            assert!(!c.wedge);
        }
    }

    #[test]
    fn non_critical_point_is_rejected() {
        let phi = polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0)], true).unwrap();
        assert!(classify_synchronous(&CellGraph::ring(4).unwrap(), &phi, 0.3).is_err());
    }

    #[test]
    fn wedge_shapes() {
        let w = wedge_region(&fixtures::cube_q3()).unwrap();
        assert!(w.is_empty() && !w.is_maximal());
        let w = wedge_region(&CellGraph::complete(5).unwrap()).unwrap();
        assert!(w.is_maximal() && !w.is_empty());
        let w = wedge_region(&fixtures::petersen()).unwrap();
        assert!(!w.is_empty() && !w.is_maximal());
        assert_relative_eq!(w.slope(), -2.0 / 3.0, epsilon = 1e-9);
        // Wedge: beta > alpha but alpha - (2/3) beta still positive.
        assert!(w.contains(1.0, 1.2));
        assert!(!w.contains(1.0, 2.0));
        assert!(!w.contains(1.0, 0.5));
        assert!(wedge_region(&fixtures::figure1_star()).is_err());
    }

    #[test]
    fn bipartite_wedge_matches_coupling_hessian() {
        // On a bipartite regular graph (lambda = 2d) the network minimum
        // criterion degenerates to the coupling's own minimum criterion.
        let w = wedge_region(&CellGraph::ring(4).unwrap()).unwrap();
        assert!(w.is_empty());
        for i in -10..=10 {
            for j in -10..=10 {
                let (a, b) = (i as f64 / 5.0, j as f64 / 5.0);
                let net = synchronous_minimum_by_inequalities(w.d, w.lambda_max, a, b);
                let phi_min = a + b > 0.0 && a - b > 0.0;
                assert_eq!(net, phi_min, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn two_colour_empty_on_triangle() {
        let phi = polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0)], true).unwrap();
        let k3 = CellGraph::complete(3).unwrap();
        assert!(find_two_colour_critical(&k3, &phi, -1.0, 1.0).unwrap().is_empty());
    }

    #[test]
    fn two_colour_phase_pairs_on_ring4() {
        let phi = PhaseCoupling::cosine(1.0).as_coupling();
        let r4 = CellGraph::ring(4).unwrap();
        let pats = find_two_colour_critical(&r4, &phi, -0.6, 0.6).unwrap();
        assert!(!pats.is_empty());
        let mut saw_half = false;
        for p in &pats {
            // Every critical pair differs by a multiple of a half period
            // (pairs a full period apart are synchronous as phases).
            let diff = (p.x0 - p.y0).rem_euclid(0.5);
            assert!(
                diff.min(0.5 - diff) < 1e-7,
                "diff {diff} from ({}, {})",
                p.x0,
                p.y0
            );
            let phase_diff = (p.x0 - p.y0).rem_euclid(1.0);
            if (phase_diff - 0.5).abs() < 1e-7 {
                saw_half = true;
            }
            assert_eq!(p.state, vec![p.x0, p.y0, p.x0, p.y0]);
        }
        assert!(saw_half);
    }

    #[test]
    fn two_colour_quadratic_pair() {
        // phi = (x - y - 1)^2 has a line of critical points x - y = 1;
        // confine with a small coercive term to isolate (0.5, -0.5).
        let phi = CouplingFunction::from_fn(
            |x, y| (x - y - 1.0) * (x - y - 1.0) + 0.01 * (x + y) * (x + y),
            false,
        )
        .unwrap();
        let r4 = CellGraph::ring(4).unwrap();
        let pats = find_two_colour_critical(&r4, &phi, -1.0, 1.0).unwrap();
        assert!(pats.iter().any(|p| (p.x0 - 0.5).abs() < 1e-6 && (p.y0 + 0.5).abs() < 1e-6));
    }

    #[test]
    fn classify_two_colour_examples() {
        // Coupling with a strict minimum at (0.5, -0.5):
        // phi = (x - 0.5)^2 + (y + 0.5)^2 + 0.5 (x - 0.5)(y + 0.5).
        let phi = CouplingFunction::from_fn(
            |x, y| {
                let (u, v) = (x - 0.5, y + 0.5);
                u * u + v * v + 0.5 * u * v
            },
            false,
        )
        .unwrap();
        let q3 = fixtures::cube_q3();
        let c = classify_two_colour(&q3, &phi, 0.5, -0.5).unwrap();
        assert_eq!(c.verdict, Verdict::Minimum);
        assert!(c.gamma.is_some());

        // Dominant mixed term: alpha gamma - beta^2 < 0.
        let saddle = CouplingFunction::from_fn(
            |x, y| 0.5 * x * x + 0.5 * y * y + 2.0 * x * y,
            true,
        )
        .unwrap();
        let c = classify_two_colour(&q3, &saddle, 0.0, 0.0).unwrap();
        assert!(matches!(c.verdict, Verdict::Saddle { .. }));

        assert!(classify_two_colour(&fixtures::petersen(), &phi, 0.5, -0.5).is_err());
    }

    #[test]
    fn two_valued_search_confirms_sync_only_on_triangle() {
        let phi =
            polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, 0.3), (2, 2, 0.1)], true)
                .unwrap();
        let k3 = CellGraph::complete(3).unwrap();
        let hits = two_valued_critical_search(&k3, &phi, 100, 42).unwrap();
        assert!(hits.is_empty(), "{hits:?}");
    }
}
