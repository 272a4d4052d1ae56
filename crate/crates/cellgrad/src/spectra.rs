//! Laplacians, weighted Laplacians, inertia and closed-form Hessian spectra.
//!
//! All eigensolves are dense symmetric; the target scale is a few hundred
//! cells. The Laplacian is the standard D - A.

use nalgebra::DMatrix;

use crate::graph::CellGraph;
use crate::{Error, Result};

/// Adjacency matrix (0-indexed rows/columns for 1-indexed vertices).
pub fn adjacency_matrix(g: &CellGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u - 1, v - 1)] = 1.0;
        a[(v - 1, u - 1)] = 1.0;
    }
    a
}

/// Standard graph Laplacian D - A.
pub fn standard_laplacian(g: &CellGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = -adjacency_matrix(g);
    for v in 1..=n {
        l[(v - 1, v - 1)] = g.degree(v).unwrap() as f64;
    }
    l
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Standard Laplacian spectrum, ascending; first entry is 0 for any
/// connected graph.
pub fn laplacian_spectrum(g: &CellGraph) -> Vec<f64> {
    symmetric_eigenvalues(&standard_laplacian(g))
}

/// Relative zero threshold: 1e-9 times the spectral radius, floored.
pub fn default_tau0(eigenvalues: &[f64]) -> f64 {
    let radius = eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    (1e-9 * radius).max(1e-12)
}

/// Counts of negative / zero / positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Inertia {
    pub n_minus: usize,
    pub n_zero: usize,
    pub n_plus: usize,
}

impl Inertia {
    pub fn total(&self) -> usize {
        self.n_minus + self.n_zero + self.n_plus
    }
}

/// Inertia of a list of eigenvalues with zero threshold `tau0`
/// (default: relative threshold from the spectral radius).
pub fn inertia_of_eigenvalues(eigenvalues: &[f64], tau0: Option<f64>) -> Inertia {
    let t = tau0.unwrap_or_else(|| default_tau0(eigenvalues));
    let mut i = Inertia { n_minus: 0, n_zero: 0, n_plus: 0 };
    for &e in eigenvalues {
        if e < -t {
            i.n_minus += 1;
        } else if e > t {
            i.n_plus += 1;
        } else {
            i.n_zero += 1;
        }
    }
    i
}

/// Inertia of a symmetric matrix.
pub fn matrix_inertia(m: &DMatrix<f64>, tau0: Option<f64>) -> Inertia {
    inertia_of_eigenvalues(&symmetric_eigenvalues(m), tau0)
}

/// Hessian of an admissible function at a synchronous point of a
/// d-regular graph: d*alpha on the diagonal plus beta times the adjacency
/// matrix, where alpha and beta are the second partials of the coupling
/// at the synchronous value (self-connection curvature folded into alpha).
pub fn synchronous_hessian(g: &CellGraph, alpha: f64, beta: f64) -> Result<DMatrix<f64>> {
    let d = g
        .is_regular()
        .ok_or_else(|| Error::Precondition("synchronous Hessian requires a regular graph".into()))?;
    let n = g.n();
    let mut h = adjacency_matrix(g) * beta;
    for v in 0..n {
        h[(v, v)] += d as f64 * alpha;
    }
    Ok(h)
}

/// Closed-form synchronous Hessian spectrum for a d-regular graph:
/// mu_i = (alpha + beta) d - beta lambda_i over the standard Laplacian
/// eigenvalues lambda_i. Sorted ascending.
pub fn synchronous_hessian_spectrum(g: &CellGraph, alpha: f64, beta: f64) -> Result<Vec<f64>> {
    let d = g
        .is_regular()
        .ok_or_else(|| Error::Precondition("closed-form spectrum requires a regular graph".into()))?
        as f64;
    let mut mu: Vec<f64> =
        laplacian_spectrum(g).iter().map(|l| (alpha + beta) * d - beta * l).collect();
    mu.sort_by(|a, b| a.total_cmp(b));
    Ok(mu)
}

/// Synchronous Hessian of K_{m,n}: diagonal n*alpha on the m-part and
/// m*alpha on the n-part, beta on bipartite edges.
pub fn kmn_hessian(m: usize, n: usize, alpha: f64, beta: f64) -> DMatrix<f64> {
    let t = m + n;
    let mut h = DMatrix::zeros(t, t);
    for i in 0..m {
        h[(i, i)] = n as f64 * alpha;
    }
    for j in m..t {
        h[(j, j)] = m as f64 * alpha;
    }
    for i in 0..m {
        for j in m..t {
            h[(i, j)] = beta;
            h[(j, i)] = beta;
        }
    }
    h
}

/// Closed-form spectrum of the K_{m,n} synchronous Hessian:
/// n*alpha with multiplicity m-1, m*alpha with multiplicity n-1, and the
/// pair ((m+n)alpha +- sqrt((m-n)^2 alpha^2 + 4 m n beta^2)) / 2.
/// Sorted ascending. Requires m != n (the regular case K_{n,n} goes
/// through [`synchronous_hessian_spectrum`]).
pub fn kmn_hessian_spectrum(m: usize, n: usize, alpha: f64, beta: f64) -> Result<Vec<f64>> {
    if m < 2 || n < 2 {
        return Err(Error::Precondition("kmn_hessian_spectrum requires m, n >= 2".into()));
    }
    if m == n {
        return Err(Error::Precondition(
            "kmn_hessian_spectrum requires m != n; K_{n,n} is regular, use the regular-graph spectrum"
                .into(),
        ));
    }
    let (mf, nf) = (m as f64, n as f64);
    let disc = ((mf - nf) * (mf - nf) * alpha * alpha + 4.0 * mf * nf * beta * beta).sqrt();
    let mut ev = Vec::with_capacity(m + n);
    ev.extend(std::iter::repeat(nf * alpha).take(m - 1));
    ev.extend(std::iter::repeat(mf * alpha).take(n - 1));
    ev.push(0.5 * ((mf + nf) * alpha - disc));
    ev.push(0.5 * ((mf + nf) * alpha + disc));
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// Whether the K_{m,n} synchronous Hessian is positive definite; holds
/// exactly when the coupling itself has a minimum there.
pub fn kmn_positive(alpha: f64, beta: f64) -> bool {
    alpha + beta > 0.0 && alpha - beta > 0.0
}

/// Two-colour Hessian on a (d,m)-graph: d*alpha on one part's diagonal,
/// d*gamma on the other, beta on edges.
pub fn dm_two_colour_hessian(
    g: &CellGraph,
    alpha: f64,
    gamma: f64,
    beta: f64,
) -> Result<DMatrix<f64>> {
    let (d, _m) = g
        .is_dm_graph()
        .ok_or_else(|| Error::Precondition("two-colour Hessian requires a (d,m)-graph".into()))?;
    let bip = g.bipartition().expect("(d,m)-graph is bipartite");
    let n = g.n();
    let mut h = adjacency_matrix(g) * beta;
    for v in 1..=n {
        h[(v - 1, v - 1)] = d as f64 * if bip.part_of(v) == 1 { alpha } else { gamma };
    }
    Ok(h)
}

/// Minimum eigenvalue of the two-colour Hessian on any (d,m)-graph:
/// (d/2) ((alpha+gamma) - sqrt((alpha-gamma)^2 + 4 beta^2)).
pub fn dm_two_colour_min_eigenvalue(d: usize, alpha: f64, gamma: f64, beta: f64) -> f64 {
    let disc = ((alpha - gamma) * (alpha - gamma) + 4.0 * beta * beta).sqrt();
    0.5 * d as f64 * ((alpha + gamma) - disc)
}

/// Whether the two-colour Hessian is positive definite.
pub fn dm_two_colour_positive(alpha: f64, gamma: f64, beta: f64) -> bool {
    alpha > 0.0 && alpha * gamma - beta * beta > 0.0
}

/// Symmetric matrix with one real weight per edge: off-diagonal -w_uv,
/// diagonal the sum of incident weights. Row sums vanish, so the all-ones
/// vector is always in the kernel.
#[derive(Debug, Clone)]
pub struct WeightedLaplacian {
    graph: CellGraph,
    weights: Vec<f64>,
}

impl WeightedLaplacian {
    /// One weight per edge, in the order of `graph.edges()`.
    pub fn new(graph: CellGraph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: graph.edges().len(),
                got: weights.len(),
            });
        }
        Ok(WeightedLaplacian { graph, weights })
    }

    pub fn graph(&self) -> &CellGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.graph.n();
        let mut l = DMatrix::zeros(n, n);
        for (&(u, v), &w) in self.graph.edges().iter().zip(&self.weights) {
            l[(u - 1, v - 1)] -= w;
            l[(v - 1, u - 1)] -= w;
            l[(u - 1, u - 1)] += w;
            l[(v - 1, v - 1)] += w;
        }
        l
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.matrix())
    }

    pub fn inertia(&self, tau0: Option<f64>) -> Inertia {
        inertia_of_eigenvalues(&self.eigenvalues(), tau0)
    }

    /// Signs of the edge weights with zero threshold `eps`.
    pub fn weight_signs(&self, eps: f64) -> Vec<i8> {
        self.weights
            .iter()
            .map(|&w| {
                if w > eps {
                    1
                } else if w < -eps {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }
}

/// Convenience constructor mirroring [`WeightedLaplacian::new`].
pub fn weighted_laplacian(g: &CellGraph, weights: &[f64]) -> Result<WeightedLaplacian> {
    WeightedLaplacian::new(g.clone(), weights.to_vec())
}

/// Inertia bounds for a weighted Laplacian from edge-weight signs alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct InertiaBounds {
    pub n_minus: (usize, usize),
    pub n_zero: (usize, usize),
    pub n_plus: (usize, usize),
}

impl InertiaBounds {
    pub fn contains(&self, i: &Inertia) -> bool {
        self.n_minus.0 <= i.n_minus
            && i.n_minus <= self.n_minus.1
            && self.n_zero.0 <= i.n_zero
            && i.n_zero <= self.n_zero.1
            && self.n_plus.0 <= i.n_plus
            && i.n_plus <= self.n_plus.1
    }
}

/// Number of connected components of the spanning subgraph keeping only
/// the selected edges; isolated vertices count as components.
fn component_count(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for (u, v) in edges {
        let (ru, rv) = (find(&mut parent, u - 1), find(&mut parent, v - 1));
        if ru != rv {
            parent[ru] = rv;
            comps -= 1;
        }
    }
    comps
}

/// Bounds on the inertia of a weighted Laplacian from the signs of its
/// edge weights (one sign in {-1, 0, 1} per edge; zero-sign edges are
/// dropped). With c+ components of the positive-edge subgraph and c- of
/// the negative-edge subgraph, on n vertices:
/// c+ - 1 <= n_minus <= n - c-,  c- - 1 <= n_plus <= n - c+,
/// 1 <= n_zero <= n + 2 - c- - c+.
pub fn inertia_bounds(g: &CellGraph, signs: &[i8]) -> Result<InertiaBounds> {
    if signs.len() != g.edges().len() {
        return Err(Error::DimensionMismatch { expected: g.edges().len(), got: signs.len() });
    }
    let n = g.n();
    let pick = |want: i8| {
        g.edges()
            .iter()
            .zip(signs)
            .filter(move |(_, &s)| s == want)
            .map(|(&e, _)| e)
    };
    let c_plus = component_count(n, pick(1));
    let c_minus = component_count(n, pick(-1));
    Ok(InertiaBounds {
        n_minus: (c_plus.saturating_sub(1), n - c_minus),
        n_plus: (c_minus.saturating_sub(1), n - c_plus),
        n_zero: (1, n + 2 - c_minus - c_plus),
    })
}
