//! The five Sinc solution methods and continuous evaluation of their approximants.
//!
//! | method        | transform | linear system  | approximant                                  |
//! |---------------|-----------|----------------|----------------------------------------------|
//! | `se-nystrom`  | SE        | `(I - V) u = g` | `g + Σ k(t,t_j) u_j ψ'(jh) J(j,h)(φ(t))`     |
//! | `de-nystrom`  | DE        | `(I - V) u = g` | same, DE nodes                               |
//! | `se-colloc`   | SE        | `(I - V) u = g` | generalized Sinc interpolant of the `u_j`    |
//! | `rz-colloc`   | SE        | `(E - V) c = g` | `c_{-N} ω_a + Σ_{|j|<N} c_j S(j,h)(φ) + c_N ω_b` |
//! | `de-colloc`   | DE        | `(I - V) u = g` | generalized Sinc interpolant of the `u_j`    |
//!
//! The collocation approximants need no sine integrals at evaluation time,
//! whereas the Nyström extension needs one per node.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_system::{assemble_nystrom, assemble_rz, lu_solve, relative_residual};
use crate::problem::VolterraProblem;
use crate::sinc_core::{indefinite_basis, sinc_sum, SincGrid};
use crate::transforms::{mesh_size, TransformKind, VariableTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "&'static str")]
pub enum Method {
    SeNystrom,
    DeNystrom,
    SeCollocation,
    RzCollocation,
    DeCollocation,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SeNystrom,
        Method::DeNystrom,
        Method::SeCollocation,
        Method::RzCollocation,
        Method::DeCollocation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SeNystrom => "se-nystrom",
            Method::DeNystrom => "de-nystrom",
            Method::SeCollocation => "se-colloc",
            Method::RzCollocation => "rz-colloc",
            Method::DeCollocation => "de-colloc",
        }
    }

    pub fn kind(self) -> TransformKind {
        match self {
            Method::DeNystrom | Method::DeCollocation => TransformKind::De,
            _ => TransformKind::Se,
        }
    }

    pub fn is_nystrom(self) -> bool {
        matches!(self, Method::SeNystrom | Method::DeNystrom)
    }
}

impl From<Method> for &'static str {
    fn from(m: Method) -> Self {
        m.as_str()
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown method '{s}'")))
    }
}

/// Transform and grid for `problem` with `N = truncation`, using the problem's mesh parameters.
pub fn discretize(
    problem: &VolterraProblem,
    kind: TransformKind,
    truncation: usize,
) -> Result<(VariableTransform, SincGrid)> {
    let h = mesh_size(kind, truncation, problem.mesh(kind))?;
    let transform = VariableTransform::new(kind, problem.a(), problem.b())?;
    Ok((transform, SincGrid::new(truncation, h)?))
}

fn check_len(grid: &SincGrid, found: usize) -> Result<()> {
    if grid.len() != found {
        return Err(Error::Dimension {
            expected: grid.len(),
            found,
        });
    }
    Ok(())
}

fn finite_image(transform: &VariableTransform, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "transformed variable must be finite, got {x}"
        )));
    }
    Ok(transform.forward(x))
}

enum Location {
    Left,
    Right,
    Interior(f64),
}

fn locate(transform: &VariableTransform, t: f64) -> Result<Location> {
    transform.check_closed(t)?;
    if transform.at_left_end(t) {
        Ok(Location::Left)
    } else if transform.at_right_end(t) {
        Ok(Location::Right)
    } else {
        Ok(Location::Interior(transform.inverse(t)?))
    }
}

/// Node values of the Sinc-Nyström system, extended to `[a, b]` through the
/// discretized equation itself.
#[derive(Debug, Clone)]
pub struct NystromSolution {
    problem: VolterraProblem,
    transform: VariableTransform,
    grid: SincGrid,
    nodes: Vec<f64>,
    derivatives: Vec<f64>,
    coeffs: Vec<f64>,
}

impl NystromSolution {
    /// Packages node values `coeffs` obtained from the Nyström system.
    pub fn from_coefficients(
        problem: &VolterraProblem,
        transform: VariableTransform,
        grid: SincGrid,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        let h = grid.step();
        Ok(Self {
            problem: problem.clone(),
            nodes: transform.nodes(&grid),
            derivatives: grid
                .indices()
                .map(|j| transform.derivative(j as f64 * h))
                .collect(),
            transform,
            grid,
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn grid(&self) -> SincGrid {
        self.grid
    }

    pub fn transform(&self) -> VariableTransform {
        self.transform
    }

    pub fn problem(&self) -> &VolterraProblem {
        &self.problem
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let h = self.grid.step();
        let p = &self.problem;
        let terms = self.nodes.iter().zip(&self.coeffs).zip(&self.derivatives);
        match locate(&self.transform, t)? {
            Location::Left => Ok(p.rhs(p.a())),
            Location::Right => {
                let b = p.b();
                let sum: f64 = terms
                    .map(|((&tj, &uj), &dj)| p.kernel(b, tj) * uj * dj * h)
                    .sum();
                Ok(p.rhs(b) + sum)
            }
            Location::Interior(x) => {
                let sum: f64 = self
                    .grid
                    .indices()
                    .zip(terms)
                    .map(|(j, ((&tj, &uj), &dj))| {
                        p.kernel(t, tj) * uj * dj * indefinite_basis(j, h, x)
                    })
                    .sum();
                Ok(p.rhs(t) + sum)
            }
        }
    }

    /// Relative residual of the node values in the re-assembled system.
    pub fn system_residual(&self) -> Result<f64> {
        let sys = assemble_nystrom(&self.problem, &self.transform, &self.grid)?;
        relative_residual(&sys.matrix, &self.coeffs, &sys.rhs)
    }
}

pub fn solve_nystrom(
    problem: &VolterraProblem,
    kind: TransformKind,
    truncation: usize,
) -> Result<NystromSolution> {
    let (transform, grid) = discretize(problem, kind, truncation)?;
    let sys = assemble_nystrom(problem, &transform, &grid)?;
    let coeffs = lu_solve(&sys.matrix, &sys.rhs)?;
    NystromSolution::from_coefficients(problem, transform, grid, coeffs)
}

/// Generalized Sinc approximation: Sinc interpolation of the samples after
/// removing the linear blend through the two extreme node values.
#[derive(Debug, Clone)]
pub struct GeneralizedSinc {
    transform: VariableTransform,
    grid: SincGrid,
    node_values: Vec<f64>,
    boundary_left: f64,
    boundary_right: f64,
    sinc_coeffs: Vec<f64>,
}

impl GeneralizedSinc {
    /// Builds the approximant from values at the nodes `transform.nodes(&grid)`.
    pub fn from_samples(
        transform: VariableTransform,
        grid: SincGrid,
        node_values: Vec<f64>,
    ) -> Result<Self> {
        check_len(&grid, node_values.len())?;
        let nodes = transform.nodes(&grid);
        let boundary_left = node_values[0];
        let boundary_right = node_values[node_values.len() - 1];
        let sinc_coeffs = nodes
            .iter()
            .zip(&node_values)
            .map(|(&t, &v)| {
                v - boundary_left * transform.blend_left(t)
                    - boundary_right * transform.blend_right(t)
            })
            .collect();
        Ok(Self {
            transform,
            grid,
            node_values,
            boundary_left,
            boundary_right,
            sinc_coeffs,
        })
    }

    /// Samples `f` at the nodes and builds the approximant.
    pub fn interpolate<F: Fn(f64) -> f64>(
        transform: VariableTransform,
        grid: SincGrid,
        f: F,
    ) -> Result<Self> {
        let values = transform.nodes(&grid).into_iter().map(f).collect();
        Self::from_samples(transform, grid, values)
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match locate(&self.transform, t)? {
            Location::Left => Ok(self.boundary_left),
            Location::Right => Ok(self.boundary_right),
            Location::Interior(x) => Ok(sinc_sum(self.grid.step(), x, &self.sinc_coeffs)
                + self.boundary_left * self.transform.blend_left(t)
                + self.boundary_right * self.transform.blend_right(t)),
        }
    }

    /// Value at `t = forward(x)`, taking `x` directly so that nodes
    /// `x = jh` are hit exactly even where `t` cannot resolve them.
    pub fn evaluate_transformed(&self, x: f64) -> Result<f64> {
        let t = finite_image(&self.transform, x)?;
        Ok(sinc_sum(self.grid.step(), x, &self.sinc_coeffs)
            + self.boundary_left * self.transform.blend_left(t)
            + self.boundary_right * self.transform.blend_right(t))
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn boundary_left(&self) -> f64 {
        self.boundary_left
    }

    pub fn boundary_right(&self) -> f64 {
        self.boundary_right
    }

    pub fn sinc_coeffs(&self) -> &[f64] {
        &self.sinc_coeffs
    }

    pub fn grid(&self) -> SincGrid {
        self.grid
    }

    pub fn transform(&self) -> VariableTransform {
        self.transform
    }
}

/// SE- or DE-Sinc-collocation solution: the generalized Sinc approximation of
/// the Sinc-Nyström node values.
#[derive(Debug, Clone)]
pub struct CollocationSolution {
    approx: GeneralizedSinc,
}

impl CollocationSolution {
    /// Reuses the node values of an existing Nyström solve; no further linear algebra.
    pub fn from_nystrom(nystrom: &NystromSolution) -> Self {
        let approx =
            GeneralizedSinc::from_samples(nystrom.transform, nystrom.grid, nystrom.coeffs.clone())
                .expect("Nyström solution has one value per node");
        Self { approx }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.approx.evaluate(t)
    }

    pub fn evaluate_transformed(&self, x: f64) -> Result<f64> {
        self.approx.evaluate_transformed(x)
    }

    pub fn node_values(&self) -> &[f64] {
        self.approx.node_values()
    }

    pub fn boundary_left(&self) -> f64 {
        self.approx.boundary_left()
    }

    pub fn boundary_right(&self) -> f64 {
        self.approx.boundary_right()
    }

    pub fn sinc_coeffs(&self) -> &[f64] {
        self.approx.sinc_coeffs()
    }

    pub fn grid(&self) -> SincGrid {
        self.approx.grid()
    }

    pub fn transform(&self) -> VariableTransform {
        self.approx.transform()
    }
}

pub fn solve_collocation(
    problem: &VolterraProblem,
    kind: TransformKind,
    truncation: usize,
) -> Result<CollocationSolution> {
    let nystrom = solve_nystrom(problem, kind, truncation)?;
    Ok(CollocationSolution::from_nystrom(&nystrom))
}

/// Bordered SE-Sinc-collocation solution with coefficients `c_{-N}..c_N`.
#[derive(Debug, Clone)]
pub struct RzSolution {
    transform: VariableTransform,
    grid: SincGrid,
    coeffs: Vec<f64>,
    // coeffs with both border entries zeroed, for the Sinc part
    interior: Vec<f64>,
}

impl RzSolution {
    pub fn from_coefficients(
        transform: VariableTransform,
        grid: SincGrid,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        if transform.kind() != TransformKind::Se {
            return Err(Error::Parameter(
                "bordered collocation uses the SE transform".into(),
            ));
        }
        let mut interior = coeffs.clone();
        let last = interior.len() - 1;
        interior[0] = 0.0;
        interior[last] = 0.0;
        Ok(Self {
            transform,
            grid,
            coeffs,
            interior,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn grid(&self) -> SincGrid {
        self.grid
    }

    pub fn transform(&self) -> VariableTransform {
        self.transform
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let first = self.coeffs[0];
        let last = self.coeffs[self.coeffs.len() - 1];
        match locate(&self.transform, t)? {
            Location::Left => Ok(first),
            Location::Right => Ok(last),
            Location::Interior(x) => Ok(first * self.transform.blend_left(t)
                + sinc_sum(self.grid.step(), x, &self.interior)
                + last * self.transform.blend_right(t)),
        }
    }

    /// Value at `t = forward(x)`, taking `x` directly.
    pub fn evaluate_transformed(&self, x: f64) -> Result<f64> {
        let t = finite_image(&self.transform, x)?;
        Ok(self.coeffs[0] * self.transform.blend_left(t)
            + sinc_sum(self.grid.step(), x, &self.interior)
            + self.coeffs[self.coeffs.len() - 1] * self.transform.blend_right(t))
    }
}

pub fn solve_rz(problem: &VolterraProblem, truncation: usize) -> Result<RzSolution> {
    let (transform, grid) = discretize(problem, TransformKind::Se, truncation)?;
    let sys = assemble_rz(problem, &transform, &grid)?;
    let coeffs = lu_solve(&sys.matrix, &sys.rhs)?;
    RzSolution::from_coefficients(transform, grid, coeffs)
}

/// Any of the five approximate solutions.
#[derive(Debug, Clone)]
pub enum Approximant {
    Nystrom(NystromSolution),
    Collocation(CollocationSolution),
    Rz(RzSolution),
}

impl Approximant {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match self {
            Approximant::Nystrom(s) => s.evaluate(t),
            Approximant::Collocation(s) => s.evaluate(t),
            Approximant::Rz(s) => s.evaluate(t),
        }
    }

    pub fn grid(&self) -> SincGrid {
        match self {
            Approximant::Nystrom(s) => s.grid(),
            Approximant::Collocation(s) => s.grid(),
            Approximant::Rz(s) => s.grid(),
        }
    }
}

pub fn solve(problem: &VolterraProblem, method: Method, truncation: usize) -> Result<Approximant> {
    Ok(match method {
        Method::SeNystrom | Method::DeNystrom => {
            Approximant::Nystrom(solve_nystrom(problem, method.kind(), truncation)?)
        }
        Method::SeCollocation | Method::DeCollocation => {
            Approximant::Collocation(solve_collocation(problem, method.kind(), truncation)?)
        }
        Method::RzCollocation => Approximant::Rz(solve_rz(problem, truncation)?),
    })
}
