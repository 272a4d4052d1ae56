//! Gradient-flow integration x' = -grad f(x) and multistart empirical
//! minimization, used as the oracle for ground-state and completeness
//! checks.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::admissible::AdmissibleFunction;
use crate::ring::RingFunction;
use crate::{Error, Result};

/// Anything that can be flowed downhill.
pub trait GradientSystem {
    fn dim(&self) -> usize;
    fn energy(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// Coordinate wrap applied after each step (identity by default;
    /// phase systems wrap to the torus).
    fn wrap(&self, _x: &mut [f64]) {}
}

impl GradientSystem for AdmissibleFunction {
    fn dim(&self) -> usize {
        self.graph().n()
    }
    fn energy(&self, x: &[f64]) -> Result<f64> {
        self.evaluate(x)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        AdmissibleFunction::gradient(self, x)
    }
}

impl GradientSystem for RingFunction {
    fn dim(&self) -> usize {
        self.n()
    }
    fn energy(&self, x: &[f64]) -> Result<f64> {
        RingFunction::energy(self, x)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        RingFunction::gradient(self, x)
    }
    fn wrap(&self, x: &mut [f64]) {
        for v in x {
            *v = v.rem_euclid(1.0);
        }
    }
}

/// Integration parameters.
#[derive(Debug, Clone, Copy)]
pub struct FlowConfig {
    /// Base RK4 step size.
    pub step: f64,
    /// Give up once this much flow time has elapsed.
    pub max_time: f64,
    /// Convergence tolerance on the sup norm of the gradient.
    pub tol: f64,
    /// Record every k-th accepted step in the trajectory.
    pub sample_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { step: 1e-2, max_time: 1e4, tol: 1e-10, sample_every: 100 }
    }
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Terminal {
    Converged { time: f64 },
    MaxTime,
    Diverged,
}

/// One recorded trajectory point.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal: Terminal,
    /// Final state.
    pub x: Vec<f64>,
}

/// Allowed uphill slack per accepted step (integrator roundoff).
const ENERGY_SLACK: f64 = 1e-9;

fn rk4_step(sys: &dyn GradientSystem, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = x.len();
    let f = |y: &[f64]| -> Result<Vec<f64>> {
        Ok(sys.gradient(y)?.into_iter().map(|g| -g).collect())
    };
    let k1 = f(x)?;
    let y2: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * k1[i]).collect();
    let k2 = f(&y2)?;
    let y3: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * k2[i]).collect();
    let k3 = f(&y3)?;
    let y4: Vec<f64> = (0..n).map(|i| x[i] + h * k3[i]).collect();
    let k4 = f(&y4)?;
    Ok((0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Integrates the gradient flow with fixed-step RK4, halving the step
/// whenever a step would raise the energy. Stops on gradient convergence,
/// time-out, or numerical blow-up.
pub fn integrate(sys: &dyn GradientSystem, x0: &[f64], cfg: &FlowConfig) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: x0.len() });
    }
    if !(cfg.step > 0.0 && cfg.tol > 0.0) {
        return Err(Error::Precondition("step and tolerance must be positive".into()));
    }
    let mut x = x0.to_vec();
    sys.wrap(&mut x);
    let mut t = 0.0;
    let mut h = cfg.step;
    let mut energy = sys.energy(&x)?;
    let mut samples = Vec::new();
    let mut accepted: usize = 0;

    let record = |samples: &mut Vec<Sample>, t: f64, x: &[f64], e: f64, g: f64| {
        samples.push(Sample { t, x: x.to_vec(), energy: e, grad_norm: g });
    };

    loop {
        let grad = sys.gradient(&x)?;
        let gnorm = grad.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if accepted % cfg.sample_every == 0 {
            record(&mut samples, t, &x, energy, gnorm);
        }
        if !gnorm.is_finite() || !energy.is_finite() {
            return Ok(Trajectory { samples, terminal: Terminal::Diverged, x });
        }
        if gnorm <= cfg.tol {
            record(&mut samples, t, &x, energy, gnorm);
            return Ok(Trajectory { samples, terminal: Terminal::Converged { time: t }, x });
        }
        if t >= cfg.max_time {
            record(&mut samples, t, &x, energy, gnorm);
            return Ok(Trajectory { samples, terminal: Terminal::MaxTime, x });
        }

        let mut trial_h = h;
        loop {
            let mut y = rk4_step(sys, &x, trial_h)?;
            sys.wrap(&mut y);
            match sys.energy(&y) {
                Ok(e) if e.is_finite() && e <= energy + ENERGY_SLACK => {
                    x = y;
                    energy = e;
                    t += trial_h;
                    // Recover the base step gradually after halvings.
                    h = (trial_h * 2.0).min(cfg.step);
                    break;
                }
                Ok(e) if !e.is_finite() => {
                    return Ok(Trajectory { samples, terminal: Terminal::Diverged, x });
                }
                _ => {
                    trial_h *= 0.5;
                    if trial_h < 1e-14 {
                        // Cannot descend further at floating precision;
                        // treat the current point as terminal.
                        record(&mut samples, t, &x, energy, gnorm);
                        let terminal = if gnorm <= cfg.tol * 10.0 {
                            Terminal::Converged { time: t }
                        } else {
                            Terminal::MaxTime
                        };
                        return Ok(Trajectory { samples, terminal, x });
                    }
                }
            }
        }
        accepted += 1;
    }
}

/// A cluster of converged multistart terminals.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub representative: Vec<f64>,
    pub energy: f64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct MultistartResult {
    /// Clusters sorted by energy, lowest first.
    pub clusters: Vec<Cluster>,
    pub converged: usize,
    pub starts: usize,
}

impl MultistartResult {
    pub fn best(&self) -> &Cluster {
        &self.clusters[0]
    }
}

/// Merge radius for clustering terminals (in the caller's metric).
pub const CLUSTER_RADIUS: f64 = 1e-5;

/// Runs `starts` seeded gradient flows from uniform random points in
/// [lo, hi]^n and clusters the converged terminals under the supplied
/// symmetry-aware distance. Start i uses an RNG seeded with seed + i, so
/// results are reproducible and independent of scheduling.
pub fn multistart_minimize(
    sys: &dyn GradientSystem,
    lo: f64,
    hi: f64,
    starts: usize,
    seed: u64,
    cfg: &FlowConfig,
    distance: &dyn Fn(&[f64], &[f64]) -> f64,
) -> Result<MultistartResult> {
    if starts == 0 {
        return Err(Error::Precondition("multistart needs at least one start".into()));
    }
    let n = sys.dim();
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut converged = 0;
    for i in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        let traj = integrate(sys, &x0, cfg)?;
        if !matches!(traj.terminal, Terminal::Converged { .. }) {
            continue;
        }
        converged += 1;
        let e = sys.energy(&traj.x)?;
        match clusters.iter_mut().find(|c| distance(&c.representative, &traj.x) < CLUSTER_RADIUS)
        {
            Some(c) => {
                c.count += 1;
                if e < c.energy {
                    c.energy = e;
                    c.representative = traj.x;
                }
            }
            None => clusters.push(Cluster { representative: traj.x, energy: e, count: 1 }),
        }
    }
    if converged == 0 {
        return Err(Error::Numerical("no multistart trajectory converged".into()));
    }
    clusters.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(MultistartResult { clusters, converged, starts })
}

/// Euclidean sup distance, for systems without configuration symmetry.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{polynomial_coupling, PhaseCoupling};
    use crate::graph::CellGraph;
    use crate::ring::ring_state_distance;
    use approx::assert_relative_eq;

    fn cosine_ring(n: usize) -> RingFunction {
        RingFunction::new(n, PhaseCoupling::cosine(1.0)).unwrap()
    }

    #[test]
    fn converges_to_alternating_state() {
        let rf = cosine_ring(4);
        let cfg = FlowConfig::default();
        let traj = integrate(&rf, &[0.02, 0.51, 0.97, 0.48], &cfg).unwrap();
        assert!(matches!(traj.terminal, Terminal::Converged { .. }), "{:?}", traj.terminal);
        assert_relative_eq!(rf.energy(&traj.x).unwrap(), -4.0, epsilon = 1e-8);
        assert!(ring_state_distance(&traj.x, &[0.0, 0.5, 0.0, 0.5]) < 1e-5);
    }

    #[test]
    fn synchronous_start_is_invariant() {
        let rf = cosine_ring(5);
        let traj = integrate(&rf, &[0.3; 5], &FlowConfig::default()).unwrap();
        assert!(matches!(traj.terminal, Terminal::Converged { .. }));
        for v in &traj.x {
            assert_relative_eq!(*v, 0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn energy_monotone_along_trajectory() {
        let rf = cosine_ring(6);
        let traj = integrate(&rf, &[0.13, 0.8, 0.44, 0.27, 0.91, 0.6], &FlowConfig::default())
            .unwrap();
        for w in traj.samples.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-9);
        }
        // Terminal passes the residual test.
        let g = rf.gradient(&traj.x).unwrap();
        assert!(g.iter().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn multistart_finds_ground_state() {
        let rf = cosine_ring(4);
        let r = multistart_minimize(
            &rf,
            0.0,
            1.0,
            50,
            9,
            &FlowConfig::default(),
            &ring_state_distance,
        )
        .unwrap();
        assert!(r.converged >= 45);
        assert_relative_eq!(r.best().energy, -4.0, epsilon = 1e-8);
    }

    #[test]
    fn convex_network_converges_to_origin() {
        // phi = x^2 + y^2 + xy on a 4-ring: strictly convex total energy
        // with its unique minimum at the origin.
        let phi = polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0)], true).unwrap();
        let f = AdmissibleFunction::symmetric(CellGraph::ring(4).unwrap(), phi, Default::default())
            .unwrap();
        let r = multistart_minimize(
            &f,
            -1.0,
            1.0,
            20,
            4,
            &FlowConfig::default(),
            &sup_distance,
        )
        .unwrap();
        assert_eq!(r.converged, 20);
        assert_eq!(r.clusters.len(), 1);
        assert!(r.best().representative.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn random_starts_never_beat_ground_state() {
        let rf = cosine_ring(5);
        let bound = 5.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        let r = multistart_minimize(
            &rf,
            0.0,
            1.0,
            30,
            21,
            &FlowConfig::default(),
            &ring_state_distance,
        )
        .unwrap();
        for c in &r.clusters {
            assert!(c.energy >= bound - 1e-6, "{}", c.energy);
        }
        assert_relative_eq!(r.best().energy, bound, epsilon = 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let rf = cosine_ring(4);
        assert!(integrate(&rf, &[0.0; 3], &FlowConfig::default()).is_err());
    }
}
