//! S^1-invariant admissible functions on an n-ring: energy, equilibrium
//! enumeration by isotropy class, stability rules and ground states.
//!
//! Phases live on the torus [0,1)^n and the energy is
//! h(theta) = sum_i delta(theta_i - theta_{i-1}) with a 1-periodic even
//! coupling delta. Working in the difference variables
//! x_i = theta_{i+1} - theta_i, an equilibrium needs all delta'(x_i)
//! equal and sum x_i an integer m, 0 <= m <= n/2 up to symmetry.

use crate::coupling::{check_c1_c4, PhaseCoupling};
use crate::graph::CellGraph;
use crate::spectra::{Inertia, WeightedLaplacian};
use crate::{Error, Result};

fn wrap(u: f64) -> f64 {
    u.rem_euclid(1.0)
}

/// Torus distance between two phases in [0,1).
pub fn torus_distance(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

/// Energy function of a ring of n phase cells.
#[derive(Clone)]
pub struct RingFunction {
    n: usize,
    delta: PhaseCoupling,
    graph: CellGraph,
}

impl RingFunction {
    pub fn new(n: usize, delta: PhaseCoupling) -> Result<Self> {
        if n < 3 {
            return Err(Error::Precondition(format!("ring needs n >= 3, got {n}")));
        }
        if !delta.is_even() {
            return Err(Error::Precondition(
                "ring energy requires an even phase coupling".into(),
            ));
        }
        let graph = CellGraph::ring(n)?;
        Ok(RingFunction { n, delta, graph })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn delta(&self) -> &PhaseCoupling {
        &self.delta
    }
    pub fn graph(&self) -> &CellGraph {
        &self.graph
    }

    fn check_dim(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: theta.len() });
        }
        Ok(())
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        self.check_dim(theta)?;
        let n = self.n;
        Ok((0..n).map(|i| self.delta.value(theta[i] - theta[(i + n - 1) % n])).sum())
    }

    pub fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        let n = self.n;
        Ok((0..n)
            .map(|i| {
                self.delta.d1(theta[i] - theta[(i + n - 1) % n])
                    - self.delta.d1(theta[(i + 1) % n] - theta[i])
            })
            .collect())
    }

    /// Hessian: weighted ring Laplacian with weight delta''(theta_u -
    /// theta_v) on each edge.
    pub fn hessian(&self, theta: &[f64]) -> Result<WeightedLaplacian> {
        self.check_dim(theta)?;
        let weights: Vec<f64> = self
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| self.delta.d2(theta[u - 1] - theta[v - 1]))
            .collect();
        WeightedLaplacian::new(self.graph.clone(), weights)
    }

    /// Phases from a difference vector, gauge-fixed at theta_1 = 0.
    pub fn theta_from_diffs(&self, diffs: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.n];
        for i in 1..self.n {
            theta[i] = wrap(theta[i - 1] + diffs[i - 1]);
        }
        theta
    }

    /// Difference vector x_i = theta_{i+1} - theta_i (indices mod n).
    pub fn diffs(&self, theta: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| wrap(theta[(i + 1) % self.n] - theta[i])).collect()
    }
}

/// Isotropy class of a ring equilibrium.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum Isotropy {
    /// Fully synchronous state, m = 0.
    Dihedral,
    /// Uniform phase shift m/n between consecutive cells.
    Cyclic { m: usize },
    /// Two difference values: xi (the larger) p times, eta q times.
    Trivial { xi: f64, eta: f64, p: usize, q: usize },
}

/// One enumerated equilibrium (or a one-parameter family of them).
#[derive(Debug, Clone)]
pub struct RingEquilibrium {
    pub isotropy: Isotropy,
    /// Representative phases, theta_1 = 0.
    pub theta: Vec<f64>,
    pub energy: f64,
    /// Laplacian weights delta''(x_i) per ring edge.
    pub weights: Vec<f64>,
    pub inertia: Inertia,
    /// The (xi, eta) constraint holds identically: a continuum of
    /// equilibria through this representative (beyond the phase shift).
    pub continuum_family: bool,
}

/// Stability prediction from the closed-form rules alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RulePrediction {
    Stable,
    Unstable,
    /// The rules give only a necessary condition, which holds; the
    /// verdict comes from the eigensolver.
    NoRule,
}

/// Rule prediction combined with the spectral verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StabilityVerdict {
    pub rule: RulePrediction,
    /// Spectral stability: no negative eigenvalue and exactly the one
    /// forced zero mode.
    pub stable: bool,
    /// More zero modes than the forced one.
    pub degenerate: bool,
    pub inertia: Inertia,
}

const RESID_TOL: f64 = 1e-10;

fn build_equilibrium(
    rf: &RingFunction,
    diffs: &[f64],
    isotropy: Isotropy,
    continuum_family: bool,
) -> Result<RingEquilibrium> {
    let theta = rf.theta_from_diffs(diffs);
    let grad = rf.gradient(&theta)?;
    let resid = grad.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if resid > RESID_TOL {
        return Err(Error::Numerical(format!(
            "enumerated point has gradient residual {resid:.3e} ({isotropy:?})"
        )));
    }
    let hess = rf.hessian(&theta)?;
    Ok(RingEquilibrium {
        isotropy,
        energy: rf.energy(&theta)?,
        weights: hess.weights().to_vec(),
        inertia: hess.inertia(None),
        theta,
        continuum_family,
    })
}

/// Lexicographically canonical rotation of a difference vector together
/// with its reversed-and-negated images (the dihedral action on
/// differences).
fn canonical_diffs(diffs: &[f64]) -> Vec<f64> {
    let n = diffs.len();
    let mut best: Option<Vec<f64>> = None;
    let reversed_neg: Vec<f64> = diffs.iter().rev().map(|&x| wrap(-x)).collect();
    for base in [diffs.to_vec(), reversed_neg] {
        for r in 0..n {
            let cand: Vec<f64> = (0..n).map(|i| base[(i + r) % n]).collect();
            let better = match &best {
                None => true,
                Some(b) => {
                    cand.iter().zip(b).find(|(c, b)| *c != *b).map(|(c, b)| c < b).unwrap_or(false)
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.unwrap()
}

/// Distance between two ring states modulo the dihedral and phase-shift
/// symmetries: the smallest sup-norm torus distance between difference
/// vectors over all 2n symmetry images.
pub fn ring_state_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    let da: Vec<f64> = (0..n).map(|i| wrap(a[(i + 1) % n] - a[i])).collect();
    let db: Vec<f64> = (0..n).map(|i| wrap(b[(i + 1) % n] - b[i])).collect();
    let db_rev: Vec<f64> = db.iter().rev().map(|&x| wrap(-x)).collect();
    let mut best = f64::INFINITY;
    for base in [&db, &db_rev] {
        for r in 0..n {
            let d = (0..n)
                .map(|i| torus_distance(da[i], base[(i + r) % n]))
                .fold(0.0_f64, f64::max);
            best = best.min(d);
        }
    }
    best
}

/// All cyclic-rotation classes of arrangements of p copies of `hi` and
/// n - p copies of `lo` around the ring.
fn necklaces(n: usize, p: usize, hi: f64, lo: f64, dihedral: bool) -> Vec<Vec<f64>> {
    let mut seen: Vec<Vec<u8>> = Vec::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != p {
            continue;
        }
        let word: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        let mut canon: Vec<u8> = word.clone();
        let consider = |w: &[u8], canon: &mut Vec<u8>| {
            for r in 0..n {
                let cand: Vec<u8> = (0..n).map(|i| w[(i + r) % n]).collect();
                if cand < *canon {
                    *canon = cand;
                }
            }
        };
        consider(&word, &mut canon);
        if dihedral {
            let rev: Vec<u8> = word.iter().rev().copied().collect();
            consider(&rev, &mut canon);
        }
        if !seen.contains(&canon) {
            seen.push(canon.clone());
            out.push(canon.iter().map(|&b| if b == 1 { hi } else { lo }).collect());
        }
    }
    out
}

/// Unique zero of delta'' in (0, 1/2) (exists and is unique under
/// C3 and C4).
fn curvature_turning_point(delta: &PhaseCoupling) -> Result<f64> {
    let (mut a, mut b) = (0.0, 0.5);
    if !(delta.d2(a) < 0.0 && delta.d2(b) > 0.0) {
        return Err(Error::Precondition("coupling violates the endpoint curvature signs".into()));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if delta.d2(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// For a in (0, ustar), the matching larger difference b in (ustar, 1/2)
/// with delta'(b) = delta'(a).
fn matching_branch(delta: &PhaseCoupling, ustar: f64, a: f64) -> f64 {
    let target = delta.d1(a);
    // delta' increases from its minimum at ustar back to 0 at 1/2.
    let (mut lo, mut hi) = (ustar, 0.5);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if delta.d1(m) < target {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Enumerates all equilibria of the ring energy up to the dihedral and
/// phase-shift symmetries, requiring the coupling conditions C1-C4.
///
/// Classes emitted: the synchronous state; the uniformly twisted states
/// with shift m/n for 1 <= m <= n/2; the {0, 1/2} two-value patterns
/// (even count of 1/2 differences); and the interior two-value patterns
/// xi, eta in (0, 1/2) with delta'(xi) = delta'(eta) and p xi + q eta
/// integer. When that constraint holds identically in xi (a continuum of
/// equilibria), one representative is emitted with the flag set.
pub fn enumerate_equilibria(rf: &RingFunction) -> Result<Vec<RingEquilibrium>> {
    let report = check_c1_c4(rf.delta(), 1024)?;
    if !report.all() {
        return Err(Error::Precondition(format!(
            "coupling fails the ring conditions: {report:?}"
        )));
    }
    let n = rf.n();
    if n > 16 {
        return Err(Error::Precondition("equilibrium enumeration supports n <= 16".into()));
    }
    let delta = rf.delta().clone();
    let mut out: Vec<RingEquilibrium> = Vec::new();

    // Synchronous state and uniformly twisted states.
    out.push(build_equilibrium(rf, &vec![0.0; n], Isotropy::Dihedral, false)?);
    for m in 1..=(n / 2) {
        let diffs = vec![m as f64 / n as f64; n];
        out.push(build_equilibrium(rf, &diffs, Isotropy::Cyclic { m }, false)?);
    }

    // {0, 1/2} patterns: p halves (even, for an integer difference sum),
    // q zeros, p and q both nonzero, up to dihedral symmetry. Negation
    // fixes both values, so reflection dedup applies.
    for p in (2..n).step_by(2) {
        for diffs in necklaces(n, p, 0.5, 0.0, true) {
            out.push(build_equilibrium(
                rf,
                &diffs,
                Isotropy::Trivial { xi: 0.5, eta: 0.0, p, q: n - p },
                false,
            )?);
        }
    }

    // Interior two-value patterns. delta' < 0 on (0, 1/2) dips to its
    // minimum at ustar; each level is hit at eta < ustar and xi > ustar.
    let ustar = curvature_turning_point(&delta)?;
    let eps = 1e-7;
    let samples = 200;
    for p in 1..n {
        let q = n - p;
        for m in 1..=(n / 2) {
            let g = |a: f64| {
                p as f64 * matching_branch(&delta, ustar, a) + q as f64 * a - m as f64
            };
            let gs: Vec<(f64, f64)> = (0..=samples)
                .map(|i| {
                    let a = eps + (ustar - 2.0 * eps) * i as f64 / samples as f64;
                    (a, g(a))
                })
                .collect();
            let gmax = gs.iter().fold(0.0_f64, |acc, &(_, v)| acc.max(v.abs()));
            if gmax <= 1e-9 {
                // Constraint holds along the whole branch: a continuum
                // family. Emit the midpoint as representative, in its
                // simplest arrangement.
                let a = ustar / 2.0;
                let b = matching_branch(&delta, ustar, a);
                let mut diffs = vec![b; p];
                diffs.extend(std::iter::repeat(a).take(q));
                out.push(build_equilibrium(
                    rf,
                    &diffs,
                    Isotropy::Trivial { xi: b, eta: a, p, q },
                    true,
                )?);
                continue;
            }
            for w in gs.windows(2) {
                let ((a0, g0), (a1, g1)) = (w[0], w[1]);
                if g0 == 0.0 || g0.signum() == g1.signum() {
                    continue;
                }
                let (mut lo, mut hi, glo) = (a0, a1, g0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid).signum() == glo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let eta = 0.5 * (lo + hi);
                let xi = matching_branch(&delta, ustar, eta);
                if eta < 2.0 * eps || xi > 0.5 - eps || (xi - eta).abs() < 1e-6 {
                    continue;
                }
                // Reflection maps these to the mirrored values outside
                // (0, 1/2), so arrangements dedupe by rotation only.
                for diffs in necklaces(n, p, xi, eta, false) {
                    out.push(build_equilibrium(
                        rf,
                        &diffs,
                        Isotropy::Trivial { xi, eta, p, q },
                        false,
                    )?);
                }
            }
        }
    }

    // Dedup by canonical difference vector (within tolerance).
    let mut kept: Vec<RingEquilibrium> = Vec::new();
    let mut canons: Vec<Vec<f64>> = Vec::new();
    for eq in out {
        let c = canonical_diffs(&rf.diffs(&eq.theta));
        if !canons
            .iter()
            .any(|k| k.iter().zip(&c).all(|(a, b)| torus_distance(*a, *b) < 1e-9))
        {
            canons.push(c);
            kept.push(eq);
        }
    }
    Ok(kept)
}

/// Applies the stability rules for the equilibrium's isotropy class and
/// confirms against the weighted-Laplacian inertia.
pub fn classify_stability(rf: &RingFunction, eq: &RingEquilibrium) -> StabilityVerdict {
    let n = rf.n();
    let delta = rf.delta();
    let rule = match &eq.isotropy {
        Isotropy::Dihedral => {
            if delta.d2(0.0) > 0.0 {
                RulePrediction::Stable
            } else {
                RulePrediction::Unstable
            }
        }
        Isotropy::Cyclic { m } if 2 * m == n => RulePrediction::Stable,
        Isotropy::Cyclic { m } => {
            if delta.d2(*m as f64 / n as f64) > 0.0 {
                RulePrediction::Stable
            } else {
                RulePrediction::Unstable
            }
        }
        Isotropy::Trivial { eta, q, p, .. } => {
            if (*eta).abs() < 1e-12 || (eta - 0.5).abs() < 1e-12 {
                // {0, 1/2} pattern: stable only if at most one pair of
                // neighbours shares a value, i.e. at most one zero
                // difference.
                let zeros = rf
                    .diffs(&eq.theta)
                    .iter()
                    .filter(|&&x| torus_distance(x, 0.0) < 1e-9)
                    .count();
                if zeros <= 1 {
                    RulePrediction::NoRule
                } else {
                    RulePrediction::Unstable
                }
            } else {
                // Interior pattern: stable only if the larger difference
                // fills all but one slot.
                if *p == n - 1 && *q == 1 {
                    RulePrediction::NoRule
                } else {
                    RulePrediction::Unstable
                }
            }
        }
    };
    let stable = eq.inertia.n_minus == 0 && eq.inertia.n_zero == 1;
    let degenerate = eq.inertia.n_zero > 1;
    StabilityVerdict { rule, stable, degenerate, inertia: eq.inertia }
}

/// Closed-form ground state: for even n the alternating pattern with all
/// differences 1/2 and energy n delta(1/2); for odd n (stated in the
/// source analysis for sufficiently large n) the uniformly twisted state
/// with differences 1/2 - 1/(2n).
pub fn ground_state_formula(rf: &RingFunction) -> Result<RingEquilibrium> {
    let n = rf.n();
    if n % 2 == 0 {
        let diffs = vec![0.5; n];
        build_equilibrium(rf, &diffs, Isotropy::Cyclic { m: n / 2 }, false)
    } else {
        let m = (n - 1) / 2;
        let diffs = vec![m as f64 / n as f64; n];
        build_equilibrium(rf, &diffs, Isotropy::Cyclic { m }, false)
    }
}

/// S^1-invariant Hessian on a general graph: weighted Laplacian with
/// weight delta''(theta_u - theta_v) per edge, oriented from part 1 for
/// bipartite graphs. A non-even coupling requires a bipartite graph.
pub fn bipartite_s1_hessian(
    g: &CellGraph,
    delta: &PhaseCoupling,
    theta: &[f64],
) -> Result<WeightedLaplacian> {
    if theta.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: theta.len() });
    }
    let bip = g.bipartition();
    if !delta.is_even() && bip.is_none() {
        return Err(Error::Precondition(
            "a non-even phase coupling requires a bipartite graph".into(),
        ));
    }
    let weights: Vec<f64> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = match &bip {
                Some(bp) if bp.part_of(u) != 1 => (v, u),
                _ => (u, v),
            };
            delta.d2(theta[a - 1] - theta[b - 1])
        })
        .collect();
    WeightedLaplacian::new(g.clone(), weights)
}
