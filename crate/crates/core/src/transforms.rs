//! Variable transformations from the real line onto a finite interval `(a, b)`.
//!
//! * SE (tanh): `t = (b-a)/2 · tanh(x/2) + (b+a)/2`
//! * DE: `t = (b-a)/2 · tanh(π/2 · sinh x) + (b+a)/2`
//!
//! Both maps are evaluated in the form `a + (b-a)/(1 + e^{-2u})` (or its
//! mirror image about the midpoint), which keeps the distance to the nearer
//! endpoint accurate to full relative precision.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::sinc_core::SincGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Se,
    De,
}

impl TransformKind {
    pub fn label(self) -> &'static str {
        match self {
            TransformKind::Se => "SE",
            TransformKind::De => "DE",
        }
    }

    /// Supremum of admissible strip widths `d`.
    pub fn max_strip_width(self) -> f64 {
        match self {
            TransformKind::Se => PI,
            TransformKind::De => FRAC_PI_2,
        }
    }
}

/// Strip width `d` and endpoint Hölder exponent `alpha` of a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParameters {
    pub d: f64,
    pub alpha: f64,
}

impl MeshParameters {
    pub fn new(d: f64, alpha: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Parameter(format!(
                "strip width d must be positive, got {d}"
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self { d, alpha })
    }

    /// Checks `d` against the strip limit of `kind`.
    pub fn validate_for(&self, kind: TransformKind) -> Result<()> {
        Self::new(self.d, self.alpha)?;
        if self.d >= kind.max_strip_width() {
            return Err(Error::Parameter(format!(
                "{} transform requires d < {}, got {}",
                kind.label(),
                kind.max_strip_width(),
                self.d
            )));
        }
        Ok(())
    }
}

/// Mesh size `h` for `N` that balances discretization and truncation error.
///
/// SE: `h = sqrt(π d / (α N))`. DE: `h = log(2 d N / α) / N`.
pub fn mesh_size(kind: TransformKind, truncation: usize, params: MeshParameters) -> Result<f64> {
    if truncation == 0 {
        return Err(Error::Parameter("truncation index N must be >= 1".into()));
    }
    params.validate_for(kind)?;
    let n = truncation as f64;
    let MeshParameters { d, alpha } = params;
    match kind {
        TransformKind::Se => Ok((PI * d / (alpha * n)).sqrt()),
        TransformKind::De => {
            let arg = 2.0 * d * n / alpha;
            if arg <= 1.0 {
                return Err(Error::Parameter(format!(
                    "DE mesh size needs 2dN/alpha > 1, got {arg}"
                )));
            }
            Ok(arg.ln() / n)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariableTransform {
    kind: TransformKind,
    a: f64,
    b: f64,
}

impl VariableTransform {
    pub fn new(kind: TransformKind, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Parameter(format!(
                "interval must satisfy a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { kind, a, b })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    // Half of the tanh argument: t = a + (b-a)/(1 + e^{-2u}).
    fn half_argument(&self, x: f64) -> f64 {
        match self.kind {
            TransformKind::Se => 0.5 * x,
            TransformKind::De => FRAC_PI_2 * x.sinh(),
        }
    }

    /// Maps `x ∈ ℝ` into the open interval `(a, b)`.
    pub fn forward(&self, x: f64) -> f64 {
        let u = self.half_argument(x);
        let width = self.b - self.a;
        let t = if u <= 0.0 {
            self.a + width / (1.0 + (-2.0 * u).exp())
        } else {
            self.b - width / (1.0 + (2.0 * u).exp())
        };
        t.clamp(self.a.next_up(), self.b.next_down())
    }

    /// Derivative of [`forward`](Self::forward), using `sech²(u) = 4e^{-2|u|}/(1+e^{-2|u|})²`.
    pub fn derivative(&self, x: f64) -> f64 {
        let u = self.half_argument(x);
        let e = (-2.0 * u.abs()).exp();
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        if sech2 == 0.0 {
            return 0.0;
        }
        let width = self.b - self.a;
        match self.kind {
            TransformKind::Se => 0.25 * width * sech2,
            TransformKind::De => 0.25 * PI * width * x.cosh() * sech2,
        }
    }

    /// Inverse map; requires `a < t < b`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(t > self.a && t < self.b) {
            return Err(Error::Domain(format!(
                "inverse transform needs a < t < b, got t = {t} on [{}, {}]",
                self.a, self.b
            )));
        }
        let log_ratio = ((t - self.a) / (self.b - t)).ln();
        Ok(match self.kind {
            TransformKind::Se => log_ratio,
            // artanh((2t-a-b)/(b-a)) = log_ratio / 2
            TransformKind::De => (log_ratio / PI).asinh(),
        })
    }

    /// Sinc nodes `forward(jh)` for `j = -N..=N`.
    pub fn nodes(&self, grid: &SincGrid) -> Vec<f64> {
        let h = grid.step();
        grid.indices().map(|j| self.forward(j as f64 * h)).collect()
    }

    /// `forward'(jh) · h` for `j = -N..=N`, the Sinc indefinite-integration weights.
    pub fn node_weights(&self, grid: &SincGrid) -> Vec<f64> {
        let h = grid.step();
        grid.indices()
            .map(|j| self.derivative(j as f64 * h) * h)
            .collect()
    }

    /// `(b - t) / (b - a)`: linear blend carrying the left boundary value.
    pub fn blend_left(&self, t: f64) -> f64 {
        (self.b - t) / (self.b - self.a)
    }

    /// `(t - a) / (b - a)`: linear blend carrying the right boundary value.
    pub fn blend_right(&self, t: f64) -> f64 {
        (t - self.a) / (self.b - self.a)
    }

    /// Whether `t` lies within one ulp of the left endpoint (or beyond it).
    pub(crate) fn at_left_end(&self, t: f64) -> bool {
        t <= self.a.next_up()
    }

    pub(crate) fn at_right_end(&self, t: f64) -> bool {
        t >= self.b.next_down()
    }

    pub(crate) fn check_closed(&self, t: f64) -> Result<()> {
        if t >= self.a && t <= self.b {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "evaluation point {t} outside [{}, {}]",
                self.a, self.b
            )))
        }
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(kind: TransformKind) -> VariableTransform {
        VariableTransform::new(kind, 0.0, 1.0).unwrap()
    }

    #[test]
    fn forward_values() {
        assert_eq!(unit(TransformKind::Se).forward(0.0), 0.5);
        assert_eq!(unit(TransformKind::De).forward(0.0), 0.5);
        let x = 2.0 * 0.8f64.atanh();
        assert!((unit(TransformKind::Se).forward(x) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn forward_saturates_inside_interval() {
        let de = VariableTransform::new(TransformKind::De, -1.0, 2.0).unwrap();
        assert_eq!(de.forward(50.0), 2.0f64.next_down());
        assert_eq!(de.forward(-50.0), (-1.0f64).next_up());
        assert!(de.forward(1e308) < 2.0);
    }

    #[test]
    fn derivative_values() {
        assert_eq!(unit(TransformKind::Se).derivative(0.0), 0.25);
        assert!((unit(TransformKind::De).derivative(0.0) - PI / 4.0).abs() < 1e-16);
        let se = unit(TransformKind::Se);
        let expected = 0.25 / 0.5f64.cosh().powi(2);
        assert!((se.derivative(1.0) - expected).abs() < 1e-16);
        assert!((expected - 0.196_611_933_2).abs() < 1e-10);
        let fd = (se.forward(1.0 + 1e-6) - se.forward(1.0 - 1e-6)) / 2e-6;
        assert!((fd - se.derivative(1.0)).abs() < 1e-9);
    }

    #[test]
    fn inverse_values() {
        let se = unit(TransformKind::Se);
        assert_eq!(se.inverse(0.5).unwrap(), 0.0);
        assert!((se.inverse(0.9).unwrap() - 9f64.ln()).abs() < 1e-15);
        assert!((9f64.ln() - 2.197_224_577_3).abs() < 1e-10);
        assert!((se.forward(se.inverse(0.9).unwrap()) - 0.9).abs() < 1e-15);
        assert_eq!(unit(TransformKind::De).inverse(0.5).unwrap(), 0.0);
        for t in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(se.inverse(t), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn inverse_near_endpoints_is_finite() {
        let de = unit(TransformKind::De);
        assert!(de.inverse(1e-300).unwrap().is_finite());
        assert!(de.inverse(1.0f64.next_down()).unwrap().is_finite());
    }

    #[test]
    fn mesh_size_values() {
        let se = MeshParameters::new(3.14, 1.0).unwrap();
        let h = mesh_size(TransformKind::Se, 40, se).unwrap();
        assert!((h - (PI * 3.14 / 40.0).sqrt()).abs() <= 1e-15);
        assert!((h - 0.496_603_5).abs() < 1e-7);

        let de = MeshParameters::new(1.57, 1.0).unwrap();
        let h = mesh_size(TransformKind::De, 30, de).unwrap();
        assert!((h - 94.2f64.ln() / 30.0).abs() <= 1e-15);
        assert!((h - 0.151_514_0).abs() < 1e-7);

        let unit_params = MeshParameters::new(1.0, 1.0).unwrap();
        let h = mesh_size(TransformKind::Se, 1, unit_params).unwrap();
        assert!((h - PI.sqrt()).abs() <= 1e-15);
    }

    #[test]
    fn mesh_size_errors() {
        let small = MeshParameters::new(0.2, 1.0).unwrap();
        assert!(mesh_size(TransformKind::De, 2, small).is_err());
        assert!(mesh_size(TransformKind::De, 3, small).is_ok());
        let wide = MeshParameters::new(2.0, 1.0).unwrap();
        assert!(mesh_size(TransformKind::De, 10, wide).is_err());
        assert!(mesh_size(TransformKind::Se, 10, wide).is_ok());
        assert!(mesh_size(TransformKind::Se, 0, wide).is_err());
        assert!(MeshParameters::new(1.0, 1.5).is_err());
        assert!(MeshParameters::new(1.0, 0.0).is_err());
        assert!(MeshParameters::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn node_sets() {
        let se = unit(TransformKind::Se);
        let g = SincGrid::new(1, 1.0).unwrap();
        let nodes = se.nodes(&g);
        assert_eq!(nodes.len(), 3);
        assert_eq!(nodes[1], 0.5);
        let expected = (0.5f64.tanh() + 1.0) / 2.0;
        assert!((nodes[2] - expected).abs() < 1e-15);
        assert!((expected - 0.731_058_578_6).abs() < 1e-10);

        let de_nodes = unit(TransformKind::De).nodes(&g);
        assert!((de_nodes[0] + de_nodes[2] - 1.0).abs() < 1e-15);

        let g = SincGrid::new(25, 0.1).unwrap();
        for kind in [TransformKind::Se, TransformKind::De] {
            let t = VariableTransform::new(kind, -2.0, 3.0).unwrap();
            let nodes = t.nodes(&g);
            assert_eq!(nodes[25], 0.5);
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(nodes.iter().all(|&x| x > -2.0 && x < 3.0));
        }
    }

    #[test]
    fn blends_partition_unity() {
        let t = VariableTransform::new(TransformKind::Se, 1.0, 4.0).unwrap();
        assert_eq!(t.blend_left(1.0), 1.0);
        assert_eq!(t.blend_right(1.0), 0.0);
        assert_eq!(t.blend_left(4.0), 0.0);
        assert_eq!(t.blend_right(4.0), 1.0);
        for k in 0..=30 {
            let s = 1.0 + 0.1 * k as f64;
            assert!((t.blend_left(s) + t.blend_right(s) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_interval() {
        assert!(VariableTransform::new(TransformKind::Se, 1.0, 1.0).is_err());
        assert!(VariableTransform::new(TransformKind::De, 2.0, 1.0).is_err());
        assert!(VariableTransform::new(TransformKind::De, 0.0, f64::INFINITY).is_err());
    }

    fn kind_strategy() -> impl Strategy<Value = TransformKind> {
        prop_oneof![Just(TransformKind::Se), Just(TransformKind::De)]
    }

    proptest! {
        #[test]
        fn round_trip_well_resolved(kind in kind_strategy(), x in -20.0f64..20.0) {
            // The round trip is limited by the spacing of doubles near b: an
            // ulp of t corresponds to ulp(t) / forward'(x) in x.
            let t = unit(kind);
            let fx = t.forward(x);
            let back = t.inverse(fx).unwrap();
            let resolution = (fx - fx.next_down()) / t.derivative(x);
            prop_assert!((back - x).abs() <= 1e-10 + 4.0 * resolution,
                "x={} back={} resolution={}", x, back, resolution);
        }

        #[test]
        fn round_trip_strict(x in -13.0f64..13.0, y in -2.0f64..2.0) {
            let se = unit(TransformKind::Se);
            prop_assert!((se.inverse(se.forward(x)).unwrap() - x).abs() <= 1e-10);
            let de = unit(TransformKind::De);
            prop_assert!((de.inverse(de.forward(y)).unwrap() - y).abs() <= 1e-10);
        }

        #[test]
        fn left_side_round_trip_is_strict(kind in kind_strategy(), x in -20.0f64..0.0) {
            let t = VariableTransform::new(kind, 0.0, 2.0).unwrap();
            let x = if kind == TransformKind::De { x / 5.0 } else { x };
            prop_assert!((t.inverse(t.forward(x)).unwrap() - x).abs() <= 1e-10);
        }

        #[test]
        fn derivative_matches_finite_difference(kind in kind_strategy(), x in -5.0f64..5.0) {
            let t = VariableTransform::new(kind, -1.0, 2.5).unwrap();
            let step = 1e-6;
            let fd = (t.forward(x + step) - t.forward(x - step)) / (2.0 * step);
            let d = t.derivative(x);
            prop_assert!(d > 0.0);
            prop_assert!((fd - d).abs() <= 1e-6 * d.max(1.0));
        }

        #[test]
        fn forward_is_symmetric(kind in kind_strategy(), x in -30.0f64..30.0) {
            let t = VariableTransform::new(kind, -1.0, 2.5).unwrap();
            prop_assert!((t.forward(-x) + t.forward(x) - 1.5).abs() <= 1e-14);
        }

        #[test]
        fn forward_is_monotone(kind in kind_strategy(), x in -2.5f64..2.5, dx in 1e-6f64..1.0) {
            let t = unit(kind);
            prop_assert!(t.forward(x) < t.forward(x + dx));
        }
    }
}
