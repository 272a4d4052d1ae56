//! Assembly of admissible functions on cell graphs, their gradients and
//! Hessians, and sampled admissibility validation of black-box functions.
//!
//! An admissible function is a sum of one coupling term per edge plus one
//! self-connection term per vertex, where the self-connection depends only
//! on the vertex degree (and, in the bipartite general form, on the part).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::coupling::{central_diff_mixed, CouplingFunction, SelfConnection};
use crate::graph::{Bipartition, CellGraph};
use crate::{Error, Result};

/// Structural form of an admissible function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormTag {
    /// Complete graph; couplings and self-connections make the function
    /// invariant under all cell permutations.
    AllToAll,
    /// Z2-invariant coupling, one self-connection per degree.
    Symmetric,
    /// Bipartite graph with possibly non-symmetric coupling; edges are
    /// always evaluated with the part-1 endpoint in the first argument,
    /// and the two parts carry separate self-connection tables.
    BipartiteGeneral,
}

/// Admissible function on a cell graph.
#[derive(Clone)]
pub struct AdmissibleFunction {
    graph: CellGraph,
    form: FormTag,
    coupling: CouplingFunction,
    /// degree -> self-connection for part 1 (or for all vertices).
    self1: BTreeMap<usize, SelfConnection>,
    /// degree -> self-connection for part 2 (bipartite general only).
    self2: BTreeMap<usize, SelfConnection>,
    bipartition: Option<Bipartition>,
}

impl AdmissibleFunction {
    /// Symmetric form: requires a Z2-invariant coupling. Missing degrees
    /// in the self-connection table mean a zero self-connection.
    pub fn symmetric(
        graph: CellGraph,
        coupling: CouplingFunction,
        self_connections: BTreeMap<usize, SelfConnection>,
    ) -> Result<Self> {
        if !coupling.is_z2() {
            return Err(Error::Precondition(
                "symmetric form requires a Z2-invariant coupling".into(),
            ));
        }
        Ok(AdmissibleFunction {
            graph,
            form: FormTag::Symmetric,
            coupling,
            self1: self_connections,
            self2: BTreeMap::new(),
            bipartition: None,
        })
    }

    /// All-to-all form on a complete graph.
    pub fn all_to_all(
        graph: CellGraph,
        coupling: CouplingFunction,
        self_connections: BTreeMap<usize, SelfConnection>,
    ) -> Result<Self> {
        if !graph.is_complete() {
            return Err(Error::Precondition("all-to-all form requires a complete graph".into()));
        }
        let mut f = Self::symmetric(graph, coupling, self_connections)?;
        f.form = FormTag::AllToAll;
        Ok(f)
    }

    /// Bipartite general form: the coupling need not be Z2-invariant;
    /// every edge is evaluated as coupling(x at part-1 endpoint, x at
    /// part-2 endpoint). If the two parts share a degree, the symmetric
    /// form is the only admissible assembly and this constructor refuses.
    pub fn bipartite_general(
        graph: CellGraph,
        coupling: CouplingFunction,
        self_part1: BTreeMap<usize, SelfConnection>,
        self_part2: BTreeMap<usize, SelfConnection>,
    ) -> Result<Self> {
        let bip = graph.bipartition().ok_or_else(|| {
            Error::Precondition("bipartite general form requires a bipartite graph".into())
        })?;
        let deg1: std::collections::BTreeSet<usize> =
            bip.part1.iter().map(|&v| graph.degree(v).unwrap()).collect();
        let deg2: std::collections::BTreeSet<usize> =
            bip.part2.iter().map(|&v| graph.degree(v).unwrap()).collect();
        if deg1.intersection(&deg2).next().is_some() {
            return Err(Error::Precondition(
                "parts share a degree; the coupling must be Z2-invariant (use the symmetric form)"
                    .into(),
            ));
        }
        Ok(AdmissibleFunction {
            graph,
            form: FormTag::BipartiteGeneral,
            coupling,
            self1: self_part1,
            self2: self_part2,
            bipartition: Some(bip),
        })
    }

    pub fn graph(&self) -> &CellGraph {
        &self.graph
    }
    pub fn form(&self) -> FormTag {
        self.form
    }
    pub fn coupling(&self) -> &CouplingFunction {
        &self.coupling
    }

    /// Each edge as an oriented pair: in the bipartite general form the
    /// part-1 endpoint comes first, otherwise the canonical (min, max).
    fn oriented_edges(&self) -> Vec<(usize, usize)> {
        match (&self.bipartition, self.form) {
            (Some(bip), FormTag::BipartiteGeneral) => self
                .graph
                .edges()
                .iter()
                .map(|&(u, v)| if bip.part_of(u) == 1 { (u, v) } else { (v, u) })
                .collect(),
            _ => self.graph.edges().to_vec(),
        }
    }

    fn self_connection(&self, v: usize) -> Option<&SelfConnection> {
        let d = self.graph.degree(v).unwrap();
        match (&self.bipartition, self.form) {
            (Some(bip), FormTag::BipartiteGeneral) if bip.part_of(v) == 2 => self.self2.get(&d),
            _ => self.self1.get(&d),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.graph.n() {
            return Err(Error::DimensionMismatch { expected: self.graph.n(), got: x.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut acc = 0.0;
        for (a, b) in self.oriented_edges() {
            acc += self.coupling.value(x[a - 1], x[b - 1]);
        }
        // Loops contribute through the self-connection tables only; a
        // vertex with no table entry for its degree contributes zero.
        for v in 1..=self.graph.n() {
            if let Some(s) = self.self_connection(v) {
                acc += s.value(x[v - 1]);
            }
        }
        Ok(acc)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut g = vec![0.0; x.len()];
        for (a, b) in self.oriented_edges() {
            g[a - 1] += self.coupling.d10(x[a - 1], x[b - 1]);
            g[b - 1] += self.coupling.d01(x[a - 1], x[b - 1]);
        }
        for v in 1..=self.graph.n() {
            if let Some(s) = self.self_connection(v) {
                g[v - 1] += s.d1(x[v - 1]);
            }
        }
        Ok(g)
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        let n = x.len();
        let mut h = DMatrix::zeros(n, n);
        for (a, b) in self.oriented_edges() {
            let (xa, xb) = (x[a - 1], x[b - 1]);
            h[(a - 1, a - 1)] += self.coupling.d20(xa, xb);
            h[(b - 1, b - 1)] += self.coupling.d02(xa, xb);
            let m = self.coupling.d11(xa, xb);
            h[(a - 1, b - 1)] += m;
            h[(b - 1, a - 1)] += m;
        }
        for v in 1..=n {
            if let Some(s) = self.self_connection(v) {
                h[(v - 1, v - 1)] += s.d2(x[v - 1]);
            }
        }
        Ok(h)
    }
}

/// One flagged violation in an admissibility report.
#[derive(Debug, Clone)]
pub struct Violation {
    pub check: &'static str,
    pub vertices: Vec<usize>,
    pub point_index: usize,
    pub magnitude: f64,
}

/// Result of sampled admissibility validation.
#[derive(Debug, Clone, Default)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
    pub samples: usize,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const VALIDATE_STEP: f64 = 1e-3;

fn third_partial(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let h = VALIDATE_STEP;
    let mut acc = 0.0;
    let mut y = x.to_vec();
    for si in [-1.0, 1.0] {
        for sj in [-1.0, 1.0] {
            for sk in [-1.0, 1.0] {
                y.copy_from_slice(x);
                y[i] += si * h;
                y[j] += sj * h;
                y[k] += sk * h;
                acc += si * sj * sk * f(&y);
            }
        }
    }
    acc / (8.0 * h * h * h)
}

/// Checks, at `samples` random points, the derivative obstructions that
/// every admissible function on `g` must satisfy:
/// (a) the mixed second partial across every non-edge vanishes;
/// (b) the mixed third partial over every distinct vertex triple vanishes
///     unless the graph is complete;
/// (c) at synchronized points, same-degree vertices have equal gradient
///     components.
/// Values are flagged when |value| > 1e-4 * (1 + |f|).
pub fn validate_admissibility(
    g: &CellGraph,
    f: &dyn Fn(&[f64]) -> f64,
    samples: usize,
    seed: u64,
) -> AdmissibilityReport {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AdmissibilityReport { violations: Vec::new(), samples };
    let h = VALIDATE_STEP;

    for s in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tol = 1e-4 * (1.0 + f(&x).abs());

        // (a) mixed second partials across non-edges.
        for u in 1..=n {
            for v in (u + 1)..=n {
                if g.has_edge(u, v) {
                    continue;
                }
                let m = central_diff_mixed(
                    |a, b| {
                        let mut y = x.clone();
                        y[u - 1] = a;
                        y[v - 1] = b;
                        f(&y)
                    },
                    x[u - 1],
                    x[v - 1],
                    h,
                );
                if m.abs() > tol {
                    report.violations.push(Violation {
                        check: "nonedge_mixed_partial",
                        vertices: vec![u, v],
                        point_index: s,
                        magnitude: m.abs(),
                    });
                }
            }
        }

        // (b) third partials over vertex triples, unless all-to-all.
        if !g.is_complete() {
            for i in 1..=n {
                for j in (i + 1)..=n {
                    for k in (j + 1)..=n {
                        let m = third_partial(f, &x, i - 1, j - 1, k - 1);
                        if m.abs() > tol {
                            report.violations.push(Violation {
                                check: "triple_third_partial",
                                vertices: vec![i, j, k],
                                point_index: s,
                                magnitude: m.abs(),
                            });
                        }
                    }
                }
            }
        }
    }

    // (c) same-degree gradient symmetry at synchronized points.
    let degrees = g.degrees();
    for (s, t) in [-0.7, 0.2, 0.9].iter().enumerate() {
        let x = vec![*t; n];
        let tol = 1e-4 * (1.0 + f(&x).abs());
        let grad: Vec<f64> = (0..n)
            .map(|v| {
                crate::coupling::central_diff1(
                    |a| {
                        let mut y = x.clone();
                        y[v] = a;
                        f(&y)
                    },
                    x[v],
                    h,
                )
            })
            .collect();
        for u in 1..=n {
            for v in (u + 1)..=n {
                if degrees[u - 1] == degrees[v - 1] {
                    let m = (grad[u - 1] - grad[v - 1]).abs();
                    if m > tol {
                        report.violations.push(Violation {
                            check: "same_degree_gradient",
                            vertices: vec![u, v],
                            point_index: s,
                            magnitude: m,
                        });
                    }
                }
            }
        }
    }

    report
}
