//! Coupling, self-connection and phase-coupling functions.
//!
//! Couplings are smooth maps phi: R x R -> R with first and second partial
//! derivatives, either analytic (supplied) or approximated by central
//! finite differences. All closed-form classification in this crate
//! assumes one-dimensional cell states.

use std::sync::Arc;

use serde_json::Value;

use crate::{Error, Result};

type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Step for first-order central differences.
pub const FD_STEP_1: f64 = 1e-5;
/// Step for second-order (nested central) differences.
pub const FD_STEP_2: f64 = 1e-4;

/// Central difference df/dx at x.
pub fn central_diff1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central difference d2f/dx2 at x.
pub fn central_diff2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Central difference d2f/dxdy at (x, y).
pub fn central_diff_mixed(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h)
}

/// Two-cell coupling function with derivative access.
#[derive(Clone)]
pub struct CouplingFunction {
    eval: Fn2,
    d10: Option<Fn2>,
    d01: Option<Fn2>,
    d20: Option<Fn2>,
    d11: Option<Fn2>,
    d02: Option<Fn2>,
    z2_invariant: bool,
}

impl CouplingFunction {
    /// Coupling from a plain evaluator; all derivatives fall back to
    /// central finite differences. The Z2 claim is verified on a sample
    /// grid at construction.
    pub fn from_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, z2: bool) -> Result<Self> {
        let c = CouplingFunction {
            eval: Arc::new(f),
            d10: None,
            d01: None,
            d20: None,
            d11: None,
            d02: None,
            z2_invariant: z2,
        };
        c.verify()?;
        Ok(c)
    }

    /// Coupling with analytic first and second partials. Derivatives are
    /// checked against finite differences on a sample grid.
    #[allow(clippy::too_many_arguments)]
    pub fn with_derivatives(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d10: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d01: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d20: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d11: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d02: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        z2: bool,
    ) -> Result<Self> {
        let c = CouplingFunction {
            eval: Arc::new(f),
            d10: Some(Arc::new(d10)),
            d01: Some(Arc::new(d01)),
            d20: Some(Arc::new(d20)),
            d11: Some(Arc::new(d11)),
            d02: Some(Arc::new(d02)),
            z2_invariant: z2,
        };
        c.verify()?;
        Ok(c)
    }

    fn sample_points() -> Vec<f64> {
        vec![-1.3, -0.7, -0.2, 0.0, 0.31, 0.9, 1.4]
    }

    fn verify(&self) -> Result<()> {
        let pts = Self::sample_points();
        if self.z2_invariant {
            for &x in &pts {
                for &y in &pts {
                    if (self.value(x, y) - self.value(y, x)).abs() > 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "coupling claimed Z2-invariant but phi({x},{y}) != phi({y},{x})"
                        )));
                    }
                }
            }
        }
        // Analytic derivatives must agree with finite differences.
        let scale = |v: f64| 1.0 + v.abs();
        for &x in &pts {
            for &y in &pts {
                if self.d10.is_some() {
                    let fd = central_diff1(|t| self.value(t, y), x, FD_STEP_1);
                    if (self.d10(x, y) - fd).abs() > 1e-6 * scale(fd) {
                        return Err(Error::InvalidInput(
                            "analytic d10 disagrees with finite differences".into(),
                        ));
                    }
                }
                if self.d11.is_some() {
                    let fd = central_diff_mixed(|a, b| self.value(a, b), x, y, FD_STEP_2);
                    if (self.d11(x, y) - fd).abs() > 1e-6 * scale(fd) {
                        return Err(Error::InvalidInput(
                            "analytic d11 disagrees with finite differences".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_z2(&self) -> bool {
        self.z2_invariant
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    /// phi_1 = d phi / d x.
    pub fn d10(&self, x: f64, y: f64) -> f64 {
        match &self.d10 {
            Some(f) => f(x, y),
            None => central_diff1(|t| self.value(t, y), x, FD_STEP_1),
        }
    }

    /// phi_2 = d phi / d y.
    pub fn d01(&self, x: f64, y: f64) -> f64 {
        match &self.d01 {
            Some(f) => f(x, y),
            None => central_diff1(|t| self.value(x, t), y, FD_STEP_1),
        }
    }

    /// phi_11.
    pub fn d20(&self, x: f64, y: f64) -> f64 {
        match &self.d20 {
            Some(f) => f(x, y),
            None => central_diff2(|t| self.value(t, y), x, FD_STEP_2),
        }
    }

    /// phi_12 = phi_21.
    pub fn d11(&self, x: f64, y: f64) -> f64 {
        match &self.d11 {
            Some(f) => f(x, y),
            None => central_diff_mixed(|a, b| self.value(a, b), x, y, FD_STEP_2),
        }
    }

    /// phi_22.
    pub fn d02(&self, x: f64, y: f64) -> f64 {
        match &self.d02 {
            Some(f) => f(x, y),
            None => central_diff2(|t| self.value(x, t), y, FD_STEP_2),
        }
    }
}

/// Bivariate polynomial coupling: sum of c * x^i * y^j monomials, with
/// exact analytic derivatives.
pub fn polynomial_coupling(terms: &[(u32, u32, f64)], z2: bool) -> Result<CouplingFunction> {
    if z2 {
        // The coefficient table must be symmetric in (i, j).
        for &(i, j, c) in terms {
            let mate: f64 = terms.iter().filter(|t| t.0 == j && t.1 == i).map(|t| t.2).sum();
            let own: f64 = terms.iter().filter(|t| t.0 == i && t.1 == j).map(|t| t.2).sum();
            if (own - mate).abs() > 1e-14 * (1.0 + own.abs()) {
                return Err(Error::InvalidInput(format!(
                    "z2 flag set but coefficient of x^{i} y^{j} ({c}) is not matched by x^{j} y^{i}"
                )));
            }
        }
    }
    fn eval(terms: &[(u32, u32, f64)], x: f64, y: f64, dx: u32, dy: u32) -> f64 {
        let mut acc = 0.0;
        for &(i, j, c) in terms {
            if i < dx || j < dy {
                continue;
            }
            let mut coef = c;
            for k in 0..dx {
                coef *= (i - k) as f64;
            }
            for k in 0..dy {
                coef *= (j - k) as f64;
            }
            acc += coef * x.powi((i - dx) as i32) * y.powi((j - dy) as i32);
        }
        acc
    }
    let t: Vec<(u32, u32, f64)> = terms.to_vec();
    let mk = |dx: u32, dy: u32| {
        let t = t.clone();
        move |x: f64, y: f64| eval(&t, x, y, dx, dy)
    };
    CouplingFunction::with_derivatives(mk(0, 0), mk(1, 0), mk(0, 1), mk(2, 0), mk(1, 1), mk(0, 2), z2)
}

/// Per-vertex self-connection function alpha_d with derivative access.
#[derive(Clone)]
pub struct SelfConnection {
    eval: Fn1,
    d1: Fn1,
    d2: Fn1,
}

impl SelfConnection {
    pub fn zero() -> Self {
        SelfConnection {
            eval: Arc::new(|_| 0.0),
            d1: Arc::new(|_| 0.0),
            d2: Arc::new(|_| 0.0),
        }
    }

    /// Univariate polynomial c0 + c1 t + c2 t^2 + ...
    pub fn polynomial(coeffs: &[f64]) -> Self {
        fn horner(c: &[f64], t: f64) -> f64 {
            c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
        }
        fn deriv(c: &[f64]) -> Vec<f64> {
            c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck).collect()
        }
        let c0 = coeffs.to_vec();
        let c1 = deriv(&c0);
        let c2 = deriv(&c1);
        let (e0, e1, e2) = (c0.clone(), c1.clone(), c2.clone());
        SelfConnection {
            eval: Arc::new(move |t| horner(&e0, t)),
            d1: Arc::new(move |t| horner(&e1, t)),
            d2: Arc::new(move |t| horner(&e2, t)),
        }
    }

    pub fn from_fns(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SelfConnection { eval: Arc::new(f), d1: Arc::new(d1), d2: Arc::new(d2) }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
    pub fn d1(&self, t: f64) -> f64 {
        (self.d1)(t)
    }
    pub fn d2(&self, t: f64) -> f64 {
        (self.d2)(t)
    }
}

/// Built-in phase coupling families.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseFamily {
    /// delta(u) = a cos(2 pi u)
    Cosine { a: f64 },
    /// delta(u) = a cos(2 pi u) + b cos(4 pi u)
    TwoHarmonic { a: f64, b: f64 },
    Custom,
}

/// 1-periodic phase coupling delta: [0,1) -> R with analytic derivatives.
#[derive(Clone)]
pub struct PhaseCoupling {
    eval: Fn1,
    d1: Fn1,
    d2: Fn1,
    even: bool,
    pub family: PhaseFamily,
}

const TAU: f64 = std::f64::consts::TAU;

impl PhaseCoupling {
    pub fn cosine(a: f64) -> Self {
        PhaseCoupling {
            eval: Arc::new(move |u| a * (TAU * u).cos()),
            d1: Arc::new(move |u| -a * TAU * (TAU * u).sin()),
            d2: Arc::new(move |u| -a * TAU * TAU * (TAU * u).cos()),
            even: true,
            family: PhaseFamily::Cosine { a },
        }
    }

    pub fn two_harmonic(a: f64, b: f64) -> Self {
        PhaseCoupling {
            eval: Arc::new(move |u| a * (TAU * u).cos() + b * (2.0 * TAU * u).cos()),
            d1: Arc::new(move |u| {
                -a * TAU * (TAU * u).sin() - 2.0 * b * TAU * (2.0 * TAU * u).sin()
            }),
            d2: Arc::new(move |u| {
                -a * TAU * TAU * (TAU * u).cos() - 4.0 * b * TAU * TAU * (2.0 * TAU * u).cos()
            }),
            even: true,
            family: PhaseFamily::TwoHarmonic { a, b },
        }
    }

    pub fn from_fns(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        even: bool,
    ) -> Self {
        PhaseCoupling {
            eval: Arc::new(f),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            even,
            family: PhaseFamily::Custom,
        }
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    fn wrap(u: f64) -> f64 {
        u.rem_euclid(1.0)
    }

    pub fn value(&self, u: f64) -> f64 {
        (self.eval)(Self::wrap(u))
    }
    pub fn d1(&self, u: f64) -> f64 {
        (self.d1)(Self::wrap(u))
    }
    pub fn d2(&self, u: f64) -> f64 {
        (self.d2)(Self::wrap(u))
    }

    /// View the phase coupling as a two-cell coupling beta(x, y) = delta(x - y).
    pub fn as_coupling(&self) -> CouplingFunction {
        let (e, d1, d2) = (self.clone(), self.clone(), self.clone());
        let (d2b, d2c) = (self.clone(), self.clone());
        CouplingFunction {
            eval: Arc::new(move |x, y| e.value(x - y)),
            d10: Some(Arc::new({
                let s = self.clone();
                move |x, y| s.d1(x - y)
            })),
            d01: Some(Arc::new(move |x, y| -d1.d1(x - y))),
            d20: Some(Arc::new(move |x, y| d2.d2(x - y))),
            d11: Some(Arc::new(move |x, y| -d2b.d2(x - y))),
            d02: Some(Arc::new(move |x, y| d2c.d2(x - y))),
            z2_invariant: self.even,
        }
    }
}

/// Looks up a built-in family by name with JSON parameters.
///
/// Known families: `cosine` (params `a`, default 1) and `two_harmonic`
/// (params `a`, `b`).
pub fn builtin_phase_family(name: &str, params: &Value) -> Result<PhaseCoupling> {
    let num = |key: &str, default: Option<f64>| -> Result<f64> {
        match params.get(key) {
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::InvalidInput(format!("parameter {key} must be a number"))),
            None => default
                .ok_or_else(|| Error::InvalidInput(format!("missing parameter {key} for {name}"))),
        }
    };
    match name {
        "cosine" => Ok(PhaseCoupling::cosine(num("a", Some(1.0))?)),
        "two_harmonic" => Ok(PhaseCoupling::two_harmonic(num("a", Some(1.0))?, num("b", None)?)),
        _ => Err(Error::InvalidInput(format!("unknown phase coupling family '{name}'"))),
    }
}

/// Sampled report on the ring-coupling conditions C1-C4.
///
/// A grid check cannot prove the conditions; treat `true` as "holds on the
/// sample grid".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    /// delta even and 1-periodic.
    pub c1: bool,
    /// delta' vanishes only at 0 and 1/2.
    pub c2: bool,
    /// delta'' monotone on (0, 1/2).
    pub c3: bool,
    /// delta''(0) < 0 and delta''(1/2) > 0.
    pub c4: bool,
    pub grid_size: usize,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4
    }
}

/// Checks C1-C4 on a uniform grid with bisection refinement of delta'
/// sign changes.
pub fn check_c1_c4(delta: &PhaseCoupling, grid_size: usize) -> Result<ConditionReport> {
    if grid_size < 64 {
        return Err(Error::Precondition(format!("grid_size must be >= 64, got {grid_size}")));
    }
    let m = grid_size;
    let scale = (0..m)
        .map(|i| delta.value(i as f64 / m as f64).abs())
        .fold(0.0_f64, f64::max)
        .max(1.0);

    // C1: evenness and periodicity by sampling.
    let mut c1 = delta.is_even();
    for i in 0..m {
        let u = i as f64 / m as f64;
        if (delta.value(u) - delta.value(1.0 - u)).abs() > 1e-9 * scale
            || (delta.value(u + 1.0) - delta.value(u)).abs() > 1e-9 * scale
        {
            c1 = false;
            break;
        }
    }

    // C2: no zero of delta' strictly inside (0, 1/2). Detect sign changes
    // on the grid and refine by bisection to rule out grazing artifacts.
    let d1scale = (0..=m)
        .map(|i| delta.d1(0.5 * i as f64 / m as f64).abs())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let margin = 1e-7 * d1scale;
    let mut c2 = true;
    let lo_idx = 1;
    let mut prev_u = 0.5 * lo_idx as f64 / m as f64;
    let mut prev = delta.d1(prev_u);
    for i in (lo_idx + 1)..m {
        let u = 0.5 * i as f64 / m as f64;
        let cur = delta.d1(u);
        if prev == 0.0 || prev.signum() != cur.signum() {
            // Candidate interior zero; bisection confirms it is a genuine
            // crossing rather than roundoff near the endpoints.
            let (mut a, mut b) = (prev_u, u);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if delta.d1(a).signum() == delta.d1(mid).signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let root = 0.5 * (a + b);
            if root > 1e-6 && root < 0.5 - 1e-6 && delta.d1(root).abs() < margin {
                c2 = false;
                break;
            }
        }
        prev_u = u;
        prev = cur;
    }
    // delta' must also actually vanish at the endpoints.
    if delta.d1(0.0).abs() > 1e-9 * d1scale || delta.d1(0.5).abs() > 1e-9 * d1scale {
        c2 = false;
    }

    // C3: delta'' monotone on (0, 1/2), sampled.
    let d2s: Vec<f64> = (1..m).map(|i| delta.d2(0.5 * i as f64 / m as f64)).collect();
    let d2scale = d2s.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-12);
    let tol = 1e-9 * d2scale;
    let nondec = d2s.windows(2).all(|w| w[1] >= w[0] - tol);
    let noninc = d2s.windows(2).all(|w| w[1] <= w[0] + tol);
    let c3 = nondec || noninc;

    // C4: signs of delta'' at 0 and 1/2.
    let c4 = delta.d2(0.0) < 0.0 && delta.d2(0.5) > 0.0;

    Ok(ConditionReport { c1, c2, c3, c4, grid_size })
}

/// Parses a coupling spec of the form
/// `{"family": "cosine"|"two_harmonic"|"polynomial", "params": {...}, "z2": bool}`.
///
/// Phase families return `Ok(Either::Phase)`, polynomial returns a plain
/// coupling; see [`CouplingSpec`].
pub enum CouplingSpec {
    Phase(PhaseCoupling),
    Plain(CouplingFunction),
}

pub fn coupling_from_json(v: &Value) -> Result<CouplingSpec> {
    let family = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidInput("coupling spec missing \"family\"".into()))?;
    let params = v.get("params").cloned().unwrap_or(Value::Object(Default::default()));
    match family {
        "polynomial" => {
            let z2 = v.get("z2").and_then(Value::as_bool).unwrap_or(false);
            let coeffs = params
                .get("coeffs")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidInput("polynomial coupling needs params.coeffs".into()))?;
            let mut terms = Vec::new();
            for c in coeffs {
                let arr = c.as_array().filter(|a| a.len() == 3).ok_or_else(|| {
                    Error::InvalidInput("each coeff must be [i, j, c]".into())
                })?;
                let i = arr[0].as_u64().ok_or_else(|| Error::InvalidInput("bad exponent".into()))?;
                let j = arr[1].as_u64().ok_or_else(|| Error::InvalidInput("bad exponent".into()))?;
                let c = arr[2].as_f64().ok_or_else(|| Error::InvalidInput("bad coefficient".into()))?;
                terms.push((i as u32, j as u32, c));
            }
            Ok(CouplingSpec::Plain(polynomial_coupling(&terms, z2)?))
        }
        other => Ok(CouplingSpec::Phase(builtin_phase_family(other, &params)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn cosine_family_values() {
        let d = builtin_phase_family("cosine", &serde_json::json!({"a": 1.0})).unwrap();
        assert_relative_eq!(d.value(0.0), 1.0);
        assert_relative_eq!(d.d1(0.0), 0.0);
        assert_relative_eq!(d.d2(0.0), -4.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(d.value(0.5), -1.0);
        assert_relative_eq!(d.d1(0.5), 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.d2(0.5), 4.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(d.d1(0.25), -2.0 * PI, max_relative = 1e-14);
        assert!(builtin_phase_family("sawtooth", &Value::Null).is_err());
    }

    #[test]
    fn phase_derivatives_match_finite_differences() {
        for d in [PhaseCoupling::cosine(1.3), PhaseCoupling::two_harmonic(1.0, 0.05)] {
            for i in 0..17 {
                let u = i as f64 / 17.0;
                let fd1 = central_diff1(|t| d.value(t), u, 1e-5);
                let fd2 = central_diff2(|t| d.value(t), u, 1e-4);
                assert!((d.d1(u) - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()), "d1 at {u}");
                assert!((d.d2(u) - fd2).abs() <= 1e-5 * (1.0 + fd2.abs()), "d2 at {u}");
            }
        }
    }

    #[test]
    fn even_symmetry_kills_d1_at_half_integers() {
        for d in [PhaseCoupling::cosine(2.0), PhaseCoupling::two_harmonic(1.0, 0.05)] {
            assert!(d.d1(0.0).abs() <= 1e-12);
            assert!(d.d1(0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn c1_c4_examples() {
        let r = check_c1_c4(&PhaseCoupling::cosine(1.0), 1024).unwrap();
        assert!(r.c1 && r.c2 && r.c3 && r.c4, "{r:?}");

        let neg = PhaseCoupling::cosine(-1.0);
        let r = check_c1_c4(&neg, 1024).unwrap();
        assert!(!r.c4);

        // Strong second harmonic: delta' gains an interior zero at
        // cos(2 pi u) = -1/2.
        let two = PhaseCoupling::two_harmonic(1.0, 0.5);
        let r = check_c1_c4(&two, 1024).unwrap();
        assert!(!r.c2, "{r:?}");
    }

    #[test]
    fn c3_boundary_of_two_harmonic() {
        // delta'' of cos(2 pi u) + b cos(4 pi u) is monotone on (0, 1/2)
        // iff |b| <= 1/16.
        let ok = check_c1_c4(&PhaseCoupling::two_harmonic(1.0, 0.05), 2048).unwrap();
        assert!(ok.all(), "{ok:?}");
        let bad = check_c1_c4(&PhaseCoupling::two_harmonic(1.0, 0.1), 2048).unwrap();
        assert!(!bad.c3, "{bad:?}");
        assert!(bad.c1 && bad.c2 && bad.c4, "{bad:?}");
    }

    #[test]
    fn polynomial_examples() {
        let p = polynomial_coupling(&[(2, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0)], true).unwrap();
        assert_relative_eq!(p.d20(0.3, -0.7), 2.0);
        assert_relative_eq!(p.d11(0.3, -0.7), 1.0);

        let q = polynomial_coupling(&[(2, 2, 1.0)], true).unwrap();
        assert_relative_eq!(q.d11(1.0, 1.0), 4.0);

        assert!(polynomial_coupling(&[(3, 1, 1.0)], true).is_err());
        assert!(polynomial_coupling(&[(3, 1, 1.0)], false).is_ok());
    }

    #[test]
    fn z2_claim_verified_on_samples() {
        assert!(CouplingFunction::from_fn(|x, y| x * y * y, true).is_err());
        assert!(CouplingFunction::from_fn(|x, y| x * y, true).is_ok());
    }

    #[test]
    fn z2_partial_symmetry() {
        let p = polynomial_coupling(
            &[(2, 0, 1.0), (0, 2, 1.0), (1, 1, -0.5), (3, 1, 0.25), (1, 3, 0.25)],
            true,
        )
        .unwrap();
        for &(a, b) in &[(0.4, -1.1), (0.0, 0.7), (-0.3, -0.9)] {
            assert_relative_eq!(p.d20(a, b), p.d02(b, a), max_relative = 1e-12);
            assert_relative_eq!(p.d11(a, b), p.d11(b, a), max_relative = 1e-12);
        }
    }
}
