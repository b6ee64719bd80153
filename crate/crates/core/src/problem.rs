//! Volterra integral equations `u(t) - ∫_a^t k(t,s) u(s) ds = g(t)` on `[a, b]`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::transforms::{MeshParameters, TransformKind};

pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A validated problem instance. Cloning is cheap; the callables are shared.
///
/// Kernel and right-hand side must be safe to call concurrently.
#[derive(Clone)]
pub struct VolterraProblem {
    a: f64,
    b: f64,
    kernel: Kernel,
    rhs: ScalarFn,
    mesh_se: MeshParameters,
    mesh_de: MeshParameters,
    exact: Option<ScalarFn>,
}

impl fmt::Debug for VolterraProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VolterraProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("mesh_se", &self.mesh_se)
            .field("mesh_de", &self.mesh_de)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

const SAMPLE_POINTS: usize = 5;

impl VolterraProblem {
    pub fn new<K, G>(
        a: f64,
        b: f64,
        kernel: K,
        rhs: G,
        mesh_se: MeshParameters,
        mesh_de: MeshParameters,
    ) -> Result<Self>
    where
        K: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Problem(format!(
                "interval must satisfy a < b, got [{a}, {b}]"
            )));
        }
        mesh_se.validate_for(TransformKind::Se)?;
        mesh_de.validate_for(TransformKind::De)?;

        // Totality is only spot-checked on interior points.
        let samples: Vec<f64> = (1..=SAMPLE_POINTS)
            .map(|i| a + (b - a) * i as f64 / (SAMPLE_POINTS + 1) as f64)
            .collect();
        for &t in &samples {
            if !rhs(t).is_finite() {
                return Err(Error::Problem(format!(
                    "right-hand side is not finite at t = {t}"
                )));
            }
            for &s in &samples {
                if !kernel(t, s).is_finite() {
                    return Err(Error::Problem(format!(
                        "kernel is not finite at ({t}, {s})"
                    )));
                }
            }
        }

        Ok(Self {
            a,
            b,
            kernel: Arc::new(kernel),
            rhs: Arc::new(rhs),
            mesh_se,
            mesh_de,
            exact: None,
        })
    }

    /// Attaches a closed-form solution, used only for error measurement.
    pub fn with_exact<U>(mut self, exact: U) -> Self
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn kernel(&self, t: f64, s: f64) -> f64 {
        (self.kernel)(t, s)
    }

    pub fn rhs(&self, t: f64) -> f64 {
        (self.rhs)(t)
    }

    pub fn exact(&self, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|u| u(t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn mesh(&self, kind: TransformKind) -> MeshParameters {
        match kind {
            TransformKind::Se => self.mesh_se,
            TransformKind::De => self.mesh_de,
        }
    }

    /// Replaces the mesh parameters for one transform kind.
    pub fn with_mesh(mut self, kind: TransformKind, mesh: MeshParameters) -> Result<Self> {
        mesh.validate_for(kind)?;
        match kind {
            TransformKind::Se => self.mesh_se = mesh,
            TransformKind::De => self.mesh_de = mesh,
        }
        Ok(self)
    }
}

/// Rewrites `u'(t) = k̃(t)u(t) + g̃(t)`, `u(a) = u_a` as
/// `u(t) - ∫_a^t k̃(s)u(s) ds = u_a + G(t)`, where `G` is an antiderivative of
/// `g̃` supplied by the caller with `G(a) = 0`.
pub fn reduce_ivp<K, G>(
    a: f64,
    b: f64,
    coefficient: K,
    u_a: f64,
    antiderivative: G,
    mesh_se: MeshParameters,
    mesh_de: MeshParameters,
) -> Result<VolterraProblem>
where
    K: Fn(f64) -> f64 + Send + Sync + 'static,
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let at_start = antiderivative(a);
    if at_start.is_nan() || at_start.abs() > 1e-12 {
        return Err(Error::Problem(format!(
            "antiderivative must vanish at a, got G(a) = {at_start}"
        )));
    }
    VolterraProblem::new(
        a,
        b,
        move |_t, s| coefficient(s),
        move |t| u_a + antiderivative(t),
        mesh_se,
        mesh_de,
    )
}

/// Identifiers of the built-in benchmark problems.
pub const BUILTIN_PROBLEMS: [&str; 2] = ["rz4", "pm45"];

/// `u(t) + ∫_0^t t s u(s) ds = e^{-t²} + (t/2)(1 - e^{-t²})` on `[0, 1]`, with `u(t) = e^{-t²}`.
#[allow(clippy::approx_constant)]
pub fn rz4() -> VolterraProblem {
    VolterraProblem::new(
        0.0,
        1.0,
        |t, s| -t * s,
        |t| {
            let e = (-t * t).exp();
            e + 0.5 * t * (1.0 - e)
        },
        MeshParameters {
            d: 3.14,
            alpha: 1.0,
        },
        MeshParameters {
            d: 1.57,
            alpha: 1.0,
        },
    )
    .expect("built-in problem is valid")
    .with_exact(|t| (-t * t).exp())
}

/// `u(t) - 6∫_0^t (√t - √s) u(s) ds = 1 + √t - 2t√t - t²` on `[0, 1]`, with `u(t) = 1 + √t`.
#[allow(clippy::approx_constant)]
pub fn pm45() -> VolterraProblem {
    VolterraProblem::new(
        0.0,
        1.0,
        |t, s| 6.0 * (t.sqrt() - s.sqrt()),
        |t| {
            let r = t.sqrt();
            1.0 + r - 2.0 * t * r - t * t
        },
        MeshParameters {
            d: 3.14,
            alpha: 0.5,
        },
        MeshParameters {
            d: 1.57,
            alpha: 0.5,
        },
    )
    .expect("built-in problem is valid")
    .with_exact(|t| 1.0 + t.sqrt())
}

pub fn builtin(id: &str) -> Option<VolterraProblem> {
    match id {
        "rz4" => Some(rz4()),
        "pm45" => Some(pm45()),
        _ => None,
    }
}
