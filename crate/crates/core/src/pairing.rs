//! Symplectic pairings of matrix Laurent cocycles against a renormalized
//! kernel, by three independent routes.
//!
//! With `K(z, t) = sum a_{n,m} z^n conj(t)^m` the pairing of two cocycles is
//!
//! ```text
//! omega(f1, f2) = (2 pi)^2 Re sum_{n,m} a_{n,m} tr(adj(f1_{n-1}) f2_{m-1}),
//! ```
//!
//! the series route. The quadrature route evaluates the same contraction as
//! a double contour sum over product circles without ever reading series
//! coefficients; on circles of radius `rho` each `(n, m)` term picks up the
//! factor `rho^{2(n+m)}`, which [`omega_series_weighted`] mirrors on the
//! series side. The de Rham route smooths both cocycles into global fields
//! with an annular bump and integrates them over the surface; it carries its
//! own normalization, which callers compare by ratio rather than absolutely.
//!
//! [`reduce_cocycle`] is the smoothing step in isolation: it trades a
//! cocycle for a global field by integrating the kernel against the bump
//! derivative, and on constant-kernel surfaces the result is constant.

use crate::coeffs::KernelCoefficients;
use crate::green::{SurfaceKernel, TorusGreen};
use crate::mls::{trace_pair, ComplexMatrix, MatrixLaurentSeries};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smooth radial cutoff: identically one inside `r0`, zero outside `r1`,
/// a smoothstep of the requested smoothness order in between.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpProfile {
    r0: f64,
    r1: f64,
    order: usize,
}

impl BumpProfile {
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        Self::with_order(r0, r1, 2)
    }

    /// `order = N` gives a `C^N` profile; at least `C^2` is required so the
    /// smoothed fields have continuous derivatives.
    pub fn with_order(r0: f64, r1: f64, order: usize) -> Result<Self> {
        if !(r0 > 0.0 && r1 > r0 && r0.is_finite() && r1.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "bump",
                reason: format!("need 0 < r0 < r1, got [{r0}, {r1}]"),
            });
        }
        if order < 2 {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: format!("bump must be at least C^2, got order {order}"),
            });
        }
        Ok(Self { r0, r1, order })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn value(&self, s: f64) -> f64 {
        if s <= self.r0 {
            1.0
        } else if s >= self.r1 {
            0.0
        } else {
            1.0 - smoothstep(self.order, (s - self.r0) / (self.r1 - self.r0))
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        if s <= self.r0 || s >= self.r1 {
            0.0
        } else {
            -smoothstep_prime(self.order, (s - self.r0) / (self.r1 - self.r0)) / (self.r1 - self.r0)
        }
    }
}

/// `S_N(x) = x^{N+1} sum_{k=0}^{N} C(N+k, k) C(2N+1, N-k) (-x)^k`, the
/// unique degree-`2N+1` polynomial joining 0 to 1 with `N` flat derivatives
/// at both ends.
fn smoothstep(order: usize, x: f64) -> f64 {
    let n = order as i64;
    let mut s = 0.0;
    for k in 0..=n {
        s += binomial(n + k, k) * binomial(2 * n + 1, n - k) * (-x).powi(k as i32);
    }
    x.powi(n as i32 + 1) * s
}

fn smoothstep_prime(order: usize, x: f64) -> f64 {
    let n = order as i64;
    let mut s = 0.0;
    for k in 0..=n {
        let c = binomial(n + k, k) * binomial(2 * n + 1, n - k);
        s += c * ((n + 1 + k) as f64) * (-1.0f64).powi(k as i32) * x.powi((n + k) as i32);
    }
    s
}

fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// `sum_j exp(i 2 pi j p / nodes)` over one sampled circle: `nodes` when
/// `p = 0 mod nodes`, zero otherwise (up to roundoff).
pub(crate) fn circle_power_sum(p: i64, nodes: usize) -> Complex64 {
    let pm = p.rem_euclid(nodes as i64) as usize;
    let step = 2.0 * PI / nodes as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        // keep the phase inside one turn so large exponents lose no accuracy
        s += Complex64::from_polar(1.0, step * ((j * pm) % nodes) as f64);
    }
    s
}

/// Discretized orthogonality integral of the contour quadrature: monomial
/// data `z^r`, `t^l` against kernel term `z^n conj(t)^m` on unit product
/// circles, with the same nodes and weights [`omega_quadrature`] uses.
/// Equals `(2 pi)^2` exactly when `n = r + 1` and `m = l + 1` (mod `nodes`),
/// and vanishes otherwise.
pub fn moment_integral(n: i32, m: i32, r: i32, l: i32, nodes: usize) -> Result<Complex64> {
    if nodes < 4 {
        return Err(Error::Insufficient {
            what: "moment integral",
            unit: "angular nodes",
            needed: 4,
            got: nodes,
        });
    }
    let w = (2.0 * PI / nodes as f64).powi(2);
    let zs = circle_power_sum((n - r - 1) as i64, nodes);
    let ts = circle_power_sum(-((m - l - 1) as i64), nodes);
    Ok(w * zs * ts)
}

/// How a pairing value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingMethod {
    Series,
    Quadrature,
    Derham,
}

/// A pairing value: the real symplectic number, the complex contraction it
/// is the real part of (scaled by `(2 pi)^2`), and a nonnegative estimate
/// of the truncation or discretization error in `trunc`. The estimate is
/// route-specific: a kernel tail bound for the series sum, a resolution
/// comparison for the quadrature and de Rham routes. It is zero when the
/// route is exact (finite sums fully inside the window, zero inputs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: f64,
    #[serde(with = "crate::jsonutil")]
    pub complex: Complex64,
    pub trunc: f64,
    pub method: PairingMethod,
}

impl PairingResult {
    fn zero(method: PairingMethod) -> Self {
        Self {
            value: 0.0,
            complex: Complex64::new(0.0, 0.0),
            trunc: 0.0,
            method,
        }
    }
}

fn check_ranks(f1: &MatrixLaurentSeries, f2: &MatrixLaurentSeries) -> Result<()> {
    if f1.rank() != f2.rank() {
        return Err(Error::RankMismatch {
            left: f1.rank(),
            right: f2.rank(),
        });
    }
    Ok(())
}

/// Series route: contract stored kernel coefficients against series
/// coefficients.
///
/// Terms are accumulated in row-major window order; zero coefficients
/// contribute exact floating zeros, so enlarging the window with zeros
/// reproduces the identical value.
pub fn omega_series(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    table: &KernelCoefficients,
) -> Result<PairingResult> {
    omega_series_weighted(f1, f2, table, 1.0)
}

/// Series route with each `(n, m)` term weighted by `rho^{2(n+m)}`, the
/// reference value for a contour quadrature on circles of radius `rho`.
pub fn omega_series_weighted(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    table: &KernelCoefficients,
    rho: f64,
) -> Result<PairingResult> {
    check_ranks(f1, f2)?;
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("weighting radius must be positive, got {rho}"),
        });
    }
    if f1.is_zero() || f2.is_zero() {
        return Ok(PairingResult::zero(PairingMethod::Series));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for n in table.nmin()..=table.nmax() {
        for m in table.mmin()..=table.mmax() {
            let a = table.get(n, m);
            let weight = if rho == 1.0 {
                1.0
            } else {
                rho.powi(2 * (n + m))
            };
            acc += a * weight * trace_pair(&f1.coefficient(n - 1), &f2.coefficient(m - 1))?;
        }
    }
    let complex = (2.0 * PI).powi(2) * acc;
    if !complex.is_finite() {
        return Err(Error::NonFinite {
            context: "series pairing accumulation",
        });
    }
    Ok(PairingResult {
        value: complex.re,
        complex,
        trunc: series_tail_estimate(f1, f2, table),
        method: PairingMethod::Series,
    })
}

/// Bound on what the window leaves out. Exactly zero when the window covers
/// both series' shifted exponent ranges (the discarded kernel terms then all
/// multiply zero coefficients); otherwise the fitted kernel tail bound (its
/// peak magnitude when the fit finds no decay) times the largest coefficient
/// norms, under the `(2 pi)^2` prefactor.
fn series_tail_estimate(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    table: &KernelCoefficients,
) -> f64 {
    let (n_lo, n_hi) = (f1.lead() + 1, f1.max_exponent() + 1);
    let (m_lo, m_hi) = (f2.lead() + 1, f2.max_exponent() + 1);
    if table.nmin() <= n_lo && table.nmax() >= n_hi && table.mmin() <= m_lo && table.mmax() >= m_hi
    {
        return 0.0;
    }
    let scale = table
        .decay_report()
        .tail_bound
        .unwrap_or_else(|| table.max_abs());
    let est = (2.0 * PI).powi(2) * scale * f1.max_coeff_norm() * f2.max_coeff_norm();
    est.min(f64::MAX)
}

/// Node counts and circle radius for [`omega_quadrature`].
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub nodes: usize,
    pub radius: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            nodes: 256,
            radius: 1.0,
        }
    }
}

/// Quadrature route: the double contour sum
///
/// ```text
/// (2 pi / N)^2 sum_{j,k} tr(adj(f1(z_j)) f2(t_k)) K(z_j, t_k) conj(z_j) t_k
/// ```
///
/// over `N`-point product circles of the grid radius. Never touches series
/// coefficients of the kernel; on analytic kernels it reads the closed-form
/// mixed derivative, on synthetic ones the stored double series evaluated
/// pointwise. Node aliasing couples exponents `N` apart, so `N` must exceed
/// the combined kernel and cocycle index span.
///
/// `trunc` carries a node-variation error indicator: the magnitude of the
/// change when the sum is re-run at `N/2` nodes (or `2N` when half would
/// alias).
pub fn omega_quadrature(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    kernel: &SurfaceKernel,
    grid: &QuadratureGrid,
) -> Result<PairingResult> {
    check_ranks(f1, f2)?;
    if !(grid.radius > 0.0 && grid.radius.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "radius",
            reason: format!("contour radius must be positive, got {}", grid.radius),
        });
    }
    let span = kernel.effective_degree()
        + f1.max_exponent()
            .unsigned_abs()
            .max(f1.lead().unsigned_abs()) as usize
        + f2.max_exponent()
            .unsigned_abs()
            .max(f2.lead().unsigned_abs()) as usize;
    let needed = span + 2;
    if grid.nodes < needed {
        return Err(Error::Insufficient {
            what: "contour quadrature",
            unit: "nodes per circle",
            needed,
            got: grid.nodes,
        });
    }
    if f1.is_zero() || f2.is_zero() {
        return Ok(PairingResult::zero(PairingMethod::Quadrature));
    }

    let complex = contour_sum(f1, f2, kernel, grid.nodes, grid.radius)?;
    if !complex.is_finite() {
        return Err(Error::NonFinite {
            context: "contour quadrature",
        });
    }
    let alt = if grid.nodes / 2 >= needed {
        grid.nodes / 2
    } else {
        grid.nodes * 2
    };
    let other = contour_sum(f1, f2, kernel, alt, grid.radius)?;
    let trunc = (complex - other).norm();
    if !trunc.is_finite() {
        return Err(Error::NonFinite {
            context: "contour quadrature error indicator",
        });
    }
    Ok(PairingResult {
        value: complex.re,
        complex,
        trunc,
        method: PairingMethod::Quadrature,
    })
}

fn contour_sum(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    kernel: &SurfaceKernel,
    n: usize,
    rho: f64,
) -> Result<Complex64> {
    let step = 2.0 * PI / n as f64;
    let znodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(rho, step * j as f64))
        .collect();
    let mut f1_vals = Vec::with_capacity(n);
    let mut f2_vals = Vec::with_capacity(n);
    for &z in &znodes {
        f1_vals.push(f1.evaluate(z)?);
        f2_vals.push(f2.evaluate(z)?);
    }

    let kval = |z: Complex64, t: Complex64| -> Result<Complex64> {
        match kernel {
            SurfaceKernel::Synthetic(table) => Ok(table.synthesize(z, t)),
            _ => kernel.mixed_offdiagonal(z, t),
        }
    };

    use rayon::prelude::*;
    let rows: Vec<Result<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let tr = trace_pair(&f1_vals[j], &f2_vals[k])?;
                row += tr * kval(znodes[j], znodes[k])? * znodes[j].conj() * znodes[k];
            }
            Ok(row)
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for row in rows {
        acc += row?;
    }
    Ok((step * step) * acc)
}

/// The node-variation error indicator of [`omega_quadrature`] on its own:
/// `|omega(N) - omega(N')|` with `N'` the halved (or, near the aliasing
/// floor, doubled) node count.
pub fn quadrature_error_estimate(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    kernel: &SurfaceKernel,
    grid: &QuadratureGrid,
) -> Result<f64> {
    Ok(omega_quadrature(f1, f2, kernel, grid)?.trunc)
}

/// A cocycle reduced to a global field, sampled at the requested targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCocycle {
    pub targets: Vec<Complex64>,
    pub values: Vec<ComplexMatrix>,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

/// Smooth a cocycle into a global field:
///
/// ```text
/// phi(Q) = i int int f(s e^{i a}) rho'(s) e^{i a} K(s e^{i a}, Q) s ds da
/// ```
///
/// with Gauss-Legendre nodes radially across the bump shell and equispaced
/// angular nodes. The angular sum selects the `z^{-1}` component of `f`
/// exactly once the node count clears the exponent span, and the radial
/// integral telescopes the bump, so on constant-kernel surfaces the field is
/// the same constant matrix at every admissible target. Targets must avoid
/// the closed annulus (modulo the lattice on a torus), where the kernel's
/// diagonal delta would contribute.
pub fn reduce_cocycle(
    f: &MatrixLaurentSeries,
    kernel: &SurfaceKernel,
    bump: &BumpProfile,
    targets: &[Complex64],
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<ReducedCocycle> {
    if matches!(kernel, SurfaceKernel::Synthetic(_) | SurfaceKernel::Flat) {
        return Err(Error::UnsupportedKernel {
            op: "reduce_cocycle",
            kernel: kernel.kind_name(),
        });
    }
    check_annulus_embeds(kernel, bump)?;
    let span = (f.max_exponent() - f.lead()).unsigned_abs() as usize;
    if angular_nodes < span + 2 {
        return Err(Error::Insufficient {
            what: "cocycle reduction",
            unit: "angular nodes",
            needed: span + 2,
            got: angular_nodes,
        });
    }
    if radial_nodes < 2 {
        return Err(Error::Insufficient {
            what: "cocycle reduction",
            unit: "radial nodes",
            needed: 2,
            got: radial_nodes,
        });
    }
    for &q in targets {
        if target_meets_annulus(kernel, q, bump) {
            return Err(Error::TargetInsideAnnulus {
                point: q,
                r0: bump.r0(),
                r1: bump.r1(),
            });
        }
    }

    let rule =
        gauss_quad::GaussLegendre::new(radial_nodes).map_err(|e| Error::InvalidParameter {
            name: "radial_nodes",
            reason: e.to_string(),
        })?;
    let astep = 2.0 * PI / angular_nodes as f64;
    let mut values = Vec::with_capacity(targets.len());
    for &q in targets {
        let mut acc = ComplexMatrix::zeros(f.rank());
        for (xi, w) in rule.as_node_weight_pairs() {
            // map [-1, 1] onto [r0, r1]
            let s = 0.5 * (bump.r1() - bump.r0()) * xi + 0.5 * (bump.r0() + bump.r1());
            let ws = 0.5 * (bump.r1() - bump.r0()) * w;
            let rho_prime = bump.derivative(s);
            if rho_prime == 0.0 {
                continue;
            }
            for j in 0..angular_nodes {
                let phase = Complex64::from_polar(1.0, astep * j as f64);
                let p = s * phase;
                let k = kernel.mixed_offdiagonal(p, q)?;
                let weight = Complex64::new(0.0, 1.0) * phase * k * (rho_prime * s * ws * astep);
                acc.add_assign_scaled(&f.evaluate(p)?, weight);
            }
        }
        values.push(acc);
    }
    Ok(ReducedCocycle {
        targets: targets.to_vec(),
        values,
        radial_nodes,
        angular_nodes,
    })
}

fn shortest_lattice_vector(tau: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for n in -2i32..=2 {
        for m in -2i32..=2 {
            if n == 0 && m == 0 {
                continue;
            }
            let v = Complex64::new(m as f64, 0.0) + tau * n as f64;
            best = best.min(v.norm());
        }
    }
    best
}

fn check_annulus_embeds(kernel: &SurfaceKernel, bump: &BumpProfile) -> Result<()> {
    let limit = match kernel {
        SurfaceKernel::Torus(g) => 0.5 * shortest_lattice_vector(g.tau()),
        _ => 1.0,
    };
    if bump.r1() >= limit {
        return Err(Error::InvalidParameter {
            name: "bump",
            reason: format!(
                "outer radius {} does not embed in the surface (limit {limit})",
                bump.r1()
            ),
        });
    }
    Ok(())
}

fn target_meets_annulus(kernel: &SurfaceKernel, q: Complex64, bump: &BumpProfile) -> bool {
    let in_shell = |p: Complex64| -> bool {
        let s = p.norm();
        s >= bump.r0() && s <= bump.r1()
    };
    match kernel {
        SurfaceKernel::Torus(g) => {
            let qr = g.reduce(q);
            for n in -2i32..=2 {
                for m in -2i32..=2 {
                    let shift = Complex64::new(m as f64, 0.0) + g.tau() * n as f64;
                    if in_shell(qr + shift) {
                        return true;
                    }
                }
            }
            false
        }
        _ => in_shell(q),
    }
}

/// De Rham route on the torus: smooth both cocycles with the bump, treat the
/// reduced fields as global data on an `n x n` fundamental-domain grid, fill
/// the annulus band by harmonic extension from outside (for the constant
/// fields produced here that is their mean), and integrate the Hermitian
/// density `Re tr(adj(phi1) phi2)` over the surface.
///
/// This route carries its own normalization relative to [`omega_series`];
/// the ratio is a reported constant, independent of the inputs, the modulus,
/// the bump, and the grid, and tests pin its stability rather than its
/// value.
///
/// `trunc` reports the change under halving the radial resolution of the
/// reduction step, the route's dominant discretization.
pub fn omega_derham(
    f1: &MatrixLaurentSeries,
    f2: &MatrixLaurentSeries,
    kernel: &SurfaceKernel,
    bump: &BumpProfile,
    grid_n: usize,
) -> Result<PairingResult> {
    check_ranks(f1, f2)?;
    let SurfaceKernel::Torus(g) = kernel else {
        return Err(Error::UnsupportedKernel {
            op: "omega_derham",
            kernel: kernel.kind_name(),
        });
    };
    if grid_n < 8 {
        return Err(Error::Insufficient {
            what: "de Rham pairing",
            unit: "grid points per axis",
            needed: 8,
            got: grid_n,
        });
    }
    if f1.is_zero() || f2.is_zero() {
        return Ok(PairingResult::zero(PairingMethod::Derham));
    }

    // One reduction per cocycle: on the torus the reduced field is constant,
    // so a single exterior target determines it.
    let probe = pick_exterior_point(g.tau(), bump);
    let span = |f: &MatrixLaurentSeries| (f.max_exponent() - f.lead()).unsigned_abs() as usize;
    let angular = (span(f1).max(span(f2)) + 2).max(64);
    let phi1 = reduce_cocycle(f1, kernel, bump, &[probe], 32, angular)?;
    let phi2 = reduce_cocycle(f2, kernel, bump, &[probe], 32, angular)?;
    let complex = derham_grid_sum(g, bump, &phi1.values[0], &phi2.values[0], grid_n)?;
    if !complex.is_finite() {
        return Err(Error::NonFinite {
            context: "de Rham grid integration",
        });
    }

    let lo1 = reduce_cocycle(f1, kernel, bump, &[probe], 16, angular)?;
    let lo2 = reduce_cocycle(f2, kernel, bump, &[probe], 16, angular)?;
    let coarse = derham_grid_sum(g, bump, &lo1.values[0], &lo2.values[0], grid_n)?;
    let trunc = (complex - coarse).norm();
    if !trunc.is_finite() {
        return Err(Error::NonFinite {
            context: "de Rham error indicator",
        });
    }
    Ok(PairingResult {
        value: complex.re,
        complex,
        trunc,
        method: PairingMethod::Derham,
    })
}

/// Integrate `tr(adj(v1) v2)` over an `n x n` fundamental-domain grid, with
/// cells meeting the bump annulus filled by the mean of the exterior cells.
fn derham_grid_sum(
    g: &TorusGreen,
    bump: &BumpProfile,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    n: usize,
) -> Result<Complex64> {
    let tau = g.tau();
    let cell = (tau.im / n as f64).hypot(1.0 / n as f64);
    let mut field1: Vec<Option<ComplexMatrix>> = Vec::with_capacity(n * n);
    let mut field2: Vec<Option<ComplexMatrix>> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = Complex64::new(
                i as f64 / n as f64 + j as f64 / n as f64 * tau.re,
                j as f64 / n as f64 * tau.im,
            );
            let s = g.reduce(u).norm();
            if s >= bump.r0() - cell && s <= bump.r1() + cell {
                field1.push(None);
                field2.push(None);
            } else {
                field1.push(Some(v1.clone()));
                field2.push(Some(v2.clone()));
            }
        }
    }
    let fill = |field: &mut Vec<Option<ComplexMatrix>>, rank: usize| {
        let mut mean = ComplexMatrix::zeros(rank);
        let mut count = 0usize;
        for v in field.iter().flatten() {
            mean.add_assign_scaled(v, Complex64::new(1.0, 0.0));
            count += 1;
        }
        let mean = mean.scaled(Complex64::new(1.0 / count.max(1) as f64, 0.0));
        for v in field.iter_mut() {
            if v.is_none() {
                *v = Some(mean.clone());
            }
        }
    };
    fill(&mut field1, v1.rank());
    fill(&mut field2, v2.rank());

    let area_cell = g.area() / (n * n) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in field1.iter().zip(field2.iter()) {
        acc += trace_pair(a.as_ref().unwrap(), b.as_ref().unwrap())?;
    }
    Ok(acc * area_cell)
}

fn pick_exterior_point(tau: Complex64, bump: &BumpProfile) -> Complex64 {
    // midpoint of the fundamental cell, pushed off the annulus if needed
    let mut q = 0.5 * (Complex64::new(1.0, 0.0) + tau);
    let mut shrink = 1.0;
    while q.norm() >= bump.r0() * 0.9 && q.norm() <= bump.r1() * 1.1 {
        shrink *= 0.5;
        q *= shrink;
    }
    q
}

// --- wire format for reduced cocycles -------------------------------------

#[derive(Serialize, Deserialize)]
struct ReducedWire {
    targets: Vec<[f64; 2]>,
    values: Vec<ComplexMatrix>,
    radial_nodes: usize,
    angular_nodes: usize,
}

impl Serialize for ReducedCocycle {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ReducedWire {
            targets: self.targets.iter().map(|q| [q.re, q.im]).collect(),
            values: self.values.clone(),
            radial_nodes: self.radial_nodes,
            angular_nodes: self.angular_nodes,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ReducedCocycle {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = ReducedWire::deserialize(de)?;
        use serde::de::Error as _;
        if wire.targets.len() != wire.values.len() {
            return Err(D::Error::custom("targets and values must align"));
        }
        Ok(ReducedCocycle {
            targets: wire
                .targets
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
            values: wire.values,
            radial_nodes: wire.radial_nodes,
            angular_nodes: wire.angular_nodes,
        })
    }
}
