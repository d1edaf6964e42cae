//! Double-series coefficient tables for renormalized kernels.
//!
//! A kernel analytic in `z` and anti-analytic in `t` on a bidisc expands as
//!
//! ```text
//! K(z, t) = sum_{n, m} a_{n,m} z^n conj(t)^m,
//! ```
//!
//! and this module recovers the window `a_{n,m}`, `nmin <= n <= nmax`,
//! `mmin <= m <= mmax`, from point samples of `K` on a product of circles
//! `|z| = rho_z`, `|t| = rho_t`. Sampling on `N x N` equispaced angles turns
//! the double series into a 2D DFT, so one forward FFT yields every window
//! coefficient at once:
//!
//! ```text
//! a_{n,m} = X[n mod N, (-m) mod N] / (N^2 rho_z^n rho_t^m).
//! ```
//!
//! Indices congruent mod `N` share a bin, so `N` must exceed the index span;
//! for an infinite series the residual aliasing carries the weight of the
//! tail at degree `N` minus the window edge, which the radii control.

use crate::green::{fft2_inplace, SurfaceKernel};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};

/// Rectangular window of series coefficients, with the sampling metadata
/// that produced it (`rho_z = rho_t = 0`, `samples = 0` for hand-built
/// tables).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    nmin: i32,
    mmin: i32,
    n_count: usize,
    m_count: usize,
    a: Vec<Complex64>,
    rho_z: f64,
    rho_t: f64,
    samples: usize,
}

impl KernelCoefficients {
    pub fn zeros(nmin: i32, mmin: i32, n_count: usize, m_count: usize) -> Self {
        Self {
            nmin,
            mmin,
            n_count,
            m_count,
            a: vec![Complex64::new(0.0, 0.0); n_count * m_count],
            rho_z: 0.0,
            rho_t: 0.0,
            samples: 0,
        }
    }

    pub fn nmin(&self) -> i32 {
        self.nmin
    }

    pub fn nmax(&self) -> i32 {
        self.nmin + self.n_count as i32 - 1
    }

    pub fn mmin(&self) -> i32 {
        self.mmin
    }

    pub fn mmax(&self) -> i32 {
        self.mmin + self.m_count as i32 - 1
    }

    pub fn sample_radii(&self) -> (f64, f64) {
        (self.rho_z, self.rho_t)
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Coefficient `a_{n,m}`; zero outside the stored window.
    pub fn get(&self, n: i32, m: i32) -> Complex64 {
        if n < self.nmin || n > self.nmax() || m < self.mmin || m > self.mmax() {
            return Complex64::new(0.0, 0.0);
        }
        let i = (n - self.nmin) as usize;
        let j = (m - self.mmin) as usize;
        self.a[i * self.m_count + j]
    }

    /// Store `a_{n,m}`. The index must lie inside the window.
    pub fn set(&mut self, n: i32, m: i32, value: Complex64) {
        assert!(
            n >= self.nmin && n <= self.nmax() && m >= self.mmin && m <= self.mmax(),
            "coefficient index ({n}, {m}) outside window"
        );
        let i = (n - self.nmin) as usize;
        let j = (m - self.mmin) as usize;
        self.a[i * self.m_count + j] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute index in either direction.
    pub fn max_index_magnitude(&self) -> usize {
        let edges = [self.nmin, self.nmax(), self.mmin, self.mmax()];
        edges
            .iter()
            .map(|e| e.unsigned_abs() as usize)
            .max()
            .unwrap()
    }

    /// Evaluate the double series at a point of the bidisc. Tables with
    /// negative indices are singular at vanishing arguments.
    pub fn synthesize(&self, z: Complex64, t: Complex64) -> Complex64 {
        let z_pows = index_powers(z, self.nmin, self.n_count);
        let t_pows = index_powers(t.conj(), self.mmin, self.m_count);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, zp) in z_pows.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, tp) in t_pows.iter().enumerate() {
                row += self.a[i * self.m_count + j] * tp;
            }
            acc += row * zp;
        }
        acc
    }

    /// Termwise antiderivative `sum a_{n,m} P_n(z) conj(P_m(t))` with
    /// `P_n' = z^n`: powers integrate to `z^{n+1}/(n+1)`, index -1 to a
    /// logarithm whose branch cut is rotated away from the reference
    /// argument, so stencils near the reference never cross it. Its mixed
    /// `d_z d_tbar` derivative recovers [`Self::synthesize`].
    pub fn antiderivative(
        &self,
        z: Complex64,
        t: Complex64,
        zref_arg: f64,
        tref_arg: f64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in self.nmin..=self.nmax() {
            let pz = primitive(z, n, zref_arg);
            for m in self.mmin..=self.mmax() {
                let a = self.get(n, m);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                acc += a * pz * primitive(t, m, tref_arg).conj();
            }
        }
        acc
    }

    /// Largest coefficient magnitude on each antidiagonal `n + m = d`, a
    /// least-squares geometric decay rate fitted to them, and the implied
    /// bound on everything past the window. Fewer than two populated
    /// antidiagonals give no rate and a zero tail.
    pub fn decay_report(&self) -> DecayReport {
        let d_lo = self.nmin as i64 + self.mmin as i64;
        let d_hi = self.nmax() as i64 + self.mmax() as i64;
        let mut degrees = Vec::new();
        for d in d_lo..=d_hi {
            let mut max_abs: f64 = 0.0;
            for n in self.nmin..=self.nmax() {
                let m = d - n as i64;
                if m >= self.mmin as i64 && m <= self.mmax() as i64 {
                    max_abs = max_abs.max(self.get(n, m as i32).norm());
                }
            }
            degrees.push(DegreeDecay { degree: d, max_abs });
        }
        let populated: Vec<&DegreeDecay> = degrees.iter().filter(|g| g.max_abs > 1e-300).collect();
        if populated.len() < 2 {
            return DecayReport {
                degrees,
                rate: None,
                tail_bound: Some(0.0),
            };
        }
        // least squares on log(max_abs) against degree
        let k = populated.len() as f64;
        let sx: f64 = populated.iter().map(|g| g.degree as f64).sum();
        let sy: f64 = populated.iter().map(|g| g.max_abs.ln()).sum();
        let sxx: f64 = populated.iter().map(|g| (g.degree as f64).powi(2)).sum();
        let sxy: f64 = populated
            .iter()
            .map(|g| g.degree as f64 * g.max_abs.ln())
            .sum();
        let denom = k * sxx - sx * sx;
        if denom.abs() < 1e-30 {
            return DecayReport {
                degrees,
                rate: None,
                tail_bound: Some(0.0),
            };
        }
        let slope = (k * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / k;
        let rate = slope.exp();
        let tail_bound = if rate < 1.0 {
            let next = intercept + slope * (d_hi + 1) as f64;
            Some(next.exp() / (1.0 - rate))
        } else {
            None // growing antidiagonals admit no geometric tail bound
        };
        DecayReport {
            degrees,
            rate: Some(rate),
            tail_bound,
        }
    }
}

fn index_powers(base: Complex64, lo: i32, count: usize) -> Vec<Complex64> {
    let mut pows = Vec::with_capacity(count);
    let mut p = base.powi(lo);
    for _ in 0..count {
        pows.push(p);
        p *= base;
    }
    pows
}

fn primitive(z: Complex64, n: i32, ref_arg: f64) -> Complex64 {
    if n == -1 {
        (z * Complex64::from_polar(1.0, -ref_arg)).ln() + Complex64::new(0.0, ref_arg)
    } else {
        z.powi(n + 1) / (n + 1) as f64
    }
}

/// Max magnitude on one antidiagonal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeDecay {
    pub degree: i64,
    pub max_abs: f64,
}

/// Output of [`KernelCoefficients::decay_report`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayReport {
    pub degrees: Vec<DegreeDecay>,
    pub rate: Option<f64>,
    pub tail_bound: Option<f64>,
}

/// Sampling grid for [`extract`]: circle radii and angular sample count.
#[derive(Debug, Clone)]
pub struct ExtractGrid {
    pub radius_z: f64,
    pub radius_t: f64,
    pub samples: usize,
}

impl Default for ExtractGrid {
    fn default() -> Self {
        Self {
            radius_z: 0.5,
            radius_t: 0.5,
            samples: 256,
        }
    }
}

/// Extract the window `[nlo, nmax] x [mlo, mmax]` where the lower edges are
/// zero, except that a synthetic source automatically extends them to cover
/// its own negative indices.
pub fn extract(
    kernel: &SurfaceKernel,
    nmax: usize,
    mmax: usize,
    grid: &ExtractGrid,
) -> Result<KernelCoefficients> {
    let (mut nmin, mut mmin) = (0i32, 0i32);
    if let SurfaceKernel::Synthetic(src) = kernel {
        nmin = nmin.min(src.nmin());
        mmin = mmin.min(src.mmin());
    }
    extract_window(kernel, nmin, nmax as i32, mmin, mmax as i32, grid)
}

/// Extract an explicit index window from circle samples of the kernel.
pub fn extract_window(
    kernel: &SurfaceKernel,
    nmin: i32,
    nmax: i32,
    mmin: i32,
    mmax: i32,
    grid: &ExtractGrid,
) -> Result<KernelCoefficients> {
    if nmax < nmin || mmax < mmin {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("empty index window [{nmin},{nmax}] x [{mmin},{mmax}]"),
        });
    }
    for (name, rho) in [("radius_z", grid.radius_z), ("radius_t", grid.radius_t)] {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("sampling radius must lie in (0, 1), got {rho}"),
            });
        }
    }
    let n = grid.samples;
    let n_span = (nmax - nmin + 1) as usize;
    let m_span = (mmax - mmin + 1) as usize;
    let mut needed = 2 * n_span.max(m_span).max(8);
    if let SurfaceKernel::Synthetic(src) = kernel {
        let src_n = (src.nmax() - src.nmin() + 1) as usize;
        let src_m = (src.mmax() - src.mmin() + 1) as usize;
        needed = needed.max(src_n + 1).max(src_m + 1);
    }
    if n < needed {
        return Err(Error::Insufficient {
            what: "coefficient extraction",
            unit: "angular samples",
            needed,
            got: n,
        });
    }

    use rayon::prelude::*;
    use std::f64::consts::PI;
    let step = 2.0 * PI / n as f64;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let z = Complex64::from_polar(grid.radius_z, step * j as f64);
            (0..n)
                .map(|k| {
                    let t = Complex64::from_polar(grid.radius_t, step * k as f64);
                    kernel.derivative_kernel(z, t).expect("nodes inside chart")
                })
                .collect()
        })
        .collect();
    let mut data: Vec<Complex64> = rows.into_iter().flatten().collect();
    if data.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            context: "kernel samples",
        });
    }
    fft2_inplace(&mut data, n, false);

    let mut out = KernelCoefficients::zeros(nmin, mmin, n_span, m_span);
    out.rho_z = grid.radius_z;
    out.rho_t = grid.radius_t;
    out.samples = n;
    let norm = 1.0 / (n * n) as f64;
    for nn in nmin..=nmax {
        let bi = nn.rem_euclid(n as i32) as usize;
        for mm in mmin..=mmax {
            let bj = (-mm).rem_euclid(n as i32) as usize;
            let c = data[bi * n + bj] * (norm * grid.radius_z.powi(-nn) * grid.radius_t.powi(-mm));
            out.set(nn, mm, c);
        }
    }
    if out.a.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            context: "extracted coefficients",
        });
    }
    Ok(out)
}

// --- wire format ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TableWire {
    nmin: i32,
    mmin: i32,
    a: Vec<Vec<[f64; 2]>>,
    rho_z: f64,
    rho_t: f64,
    samples: usize,
}

impl Serialize for KernelCoefficients {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let a = (0..self.n_count)
            .map(|i| {
                (0..self.m_count)
                    .map(|j| {
                        let c = self.a[i * self.m_count + j];
                        [c.re, c.im]
                    })
                    .collect()
            })
            .collect();
        TableWire {
            nmin: self.nmin,
            mmin: self.mmin,
            a,
            rho_z: self.rho_z,
            rho_t: self.rho_t,
            samples: self.samples,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for KernelCoefficients {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = TableWire::deserialize(de)?;
        let n_count = wire.a.len();
        if n_count == 0 {
            return Err(D::Error::custom("coefficient table must not be empty"));
        }
        let m_count = wire.a[0].len();
        if m_count == 0 {
            return Err(D::Error::custom("coefficient rows must not be empty"));
        }
        let mut a = Vec::with_capacity(n_count * m_count);
        for row in &wire.a {
            if row.len() != m_count {
                return Err(D::Error::custom(format!(
                    "ragged coefficient table: row of {} in table of width {}",
                    row.len(),
                    m_count
                )));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(D::Error::custom("coefficients must be finite"));
                }
                a.push(Complex64::new(re, im));
            }
        }
        Ok(KernelCoefficients {
            nmin: wire.nmin,
            mmin: wire.mmin,
            n_count,
            m_count,
            a,
            rho_z: wire.rho_z,
            rho_t: wire.rho_t,
            samples: wire.samples,
        })
    }
}
