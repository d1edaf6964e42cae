//! Matrix-valued Laurent series with a finite coefficient window.
//!
//! A series is stored as a lead exponent `q` and a dense run of `rank x rank`
//! coefficient matrices for exponents `q, q+1, ...`. The constructor trims
//! all-zero matrices from both ends so equal series have equal storage; the
//! zero series is canonically `lead = 0` with a single zero matrix.

use crate::{Complex64, Error, Result};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rank: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rank: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParameter {
                name: "rank",
                reason: "rank must be at least 1".into(),
            });
        }
        if entries.len() != rank * rank {
            return Err(Error::BadMatrixShape {
                rank,
                got: entries.len(),
            });
        }
        Ok(Self { rank, entries })
    }

    pub fn zeros(rank: usize) -> Self {
        Self {
            rank,
            entries: vec![Complex64::new(0.0, 0.0); rank * rank],
        }
    }

    pub fn identity(rank: usize) -> Self {
        let mut m = Self::zeros(rank);
        for i in 0..rank {
            m.entries[i * rank + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// 1x1 matrix holding a single scalar.
    pub fn scalar(c: Complex64) -> Self {
        Self {
            rank: 1,
            entries: vec![c],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.rank + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.rank);
        for i in 0..self.rank {
            for j in 0..self.rank {
                out.entries[j * self.rank + i] = self.entries[i * self.rank + j].conj();
            }
        }
        out
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: Complex64) {
        debug_assert_eq!(self.rank, other.rank);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += s * b;
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().map(|c| s * c).collect(),
        }
    }
}

/// Frobenius pairing `tr(adj(a) b) = sum conj(a_ij) b_ij`.
///
/// Conjugate-symmetric in its arguments and positive on the diagonal:
/// `trace_pair(a, a)` is `|a|_F^2`.
pub fn trace_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch {
            left: a.rank,
            right: b.rank,
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.entries.iter().zip(&b.entries) {
        acc += x.conj() * y;
    }
    Ok(acc)
}

/// Finite-window matrix Laurent series `sum_r f_r z^r`, canonically trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLaurentSeries {
    rank: usize,
    lead: i32,
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixLaurentSeries {
    /// Build a series from the lead exponent and the coefficient run.
    ///
    /// All matrices must share `rank`; zero matrices at either end are
    /// trimmed (interior zeros stay). An all-zero input collapses to the
    /// canonical zero series with lead 0.
    pub fn new(rank: usize, lead: i32, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        for c in &coeffs {
            if c.rank != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: c.rank,
                });
            }
        }
        let first_nz = coeffs.iter().position(|c| !c.is_zero());
        let Some(first_nz) = first_nz else {
            return Ok(Self {
                rank,
                lead: 0,
                coeffs: vec![ComplexMatrix::zeros(rank)],
            });
        };
        let last_nz = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
        let lead = lead + first_nz as i32;
        let coeffs = coeffs[first_nz..=last_nz].to_vec();
        Ok(Self { rank, lead, coeffs })
    }

    /// Scalar (rank-1) monomial `c z^r`.
    pub fn monomial(c: Complex64, r: i32) -> Self {
        Self::new(1, r, vec![ComplexMatrix::scalar(c)]).unwrap()
    }

    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            lead: 0,
            coeffs: vec![ComplexMatrix::zeros(rank)],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lead(&self) -> i32 {
        self.lead
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest exponent with a stored coefficient.
    pub fn max_exponent(&self) -> i32 {
        self.lead + self.coeffs.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ComplexMatrix::is_zero)
    }

    /// Coefficient of `z^r`; zero matrix outside the stored window.
    pub fn coefficient(&self, r: i32) -> ComplexMatrix {
        let idx = r - self.lead;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            ComplexMatrix::zeros(self.rank)
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn coefficients(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    /// Evaluate at `z` by a single power walk up the window.
    pub fn evaluate(&self, z: Complex64) -> Result<ComplexMatrix> {
        if z.re == 0.0 && z.im == 0.0 && self.lead < 0 && !self.is_zero() {
            return Err(Error::PoleAtOrigin { lead: self.lead });
        }
        let mut acc = ComplexMatrix::zeros(self.rank);
        let mut zp = if z.re == 0.0 && z.im == 0.0 {
            // only the constant term can contribute
            Complex64::new(0.0, 0.0)
        } else {
            z.powi(self.lead)
        };
        for (i, c) in self.coeffs.iter().enumerate() {
            let r = self.lead + i as i32;
            let w = if z.re == 0.0 && z.im == 0.0 {
                if r == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                zp
            };
            acc.add_assign_scaled(c, w);
            zp *= z;
        }
        Ok(acc)
    }

    /// Sum of two series; windows are merged and the result re-trimmed.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let lead = self.lead.min(other.lead);
        let hi = self.max_exponent().max(other.max_exponent());
        let mut coeffs = Vec::with_capacity((hi - lead + 1) as usize);
        for r in lead..=hi {
            let mut m = self.coefficient(r);
            m.add_assign_scaled(&other.coefficient(r), Complex64::new(1.0, 0.0));
            coeffs.push(m);
        }
        Self::new(self.rank, lead, coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(
            self.rank,
            self.lead,
            self.coeffs.iter().map(|c| c.scaled(s)).collect(),
        )
        .unwrap()
    }

    /// Largest Frobenius norm over the stored coefficients.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(ComplexMatrix::frobenius_norm)
            .fold(0.0, f64::max)
    }
}

// --- JSON wire format -------------------------------------------------------
//
// {"rank": n, "lead": q, "coeffs": [ [[ [re,im], ... ] x rank ] x rank, ... ]}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = ser.serialize_seq(Some(self.rank))?;
        for i in 0..self.rank {
            let row: Vec<[f64; 2]> = (0..self.rank)
                .map(|j| {
                    let c = self.get(i, j);
                    [c.re, c.im]
                })
                .collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(de)?;
        let rank = rows.len();
        if rank == 0 {
            return Err(D::Error::custom("matrix must have at least one row"));
        }
        let mut entries = Vec::with_capacity(rank * rank);
        for row in &rows {
            if row.len() != rank {
                return Err(D::Error::custom(format!(
                    "matrix row has {} entries, expected {rank}",
                    row.len()
                )));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(D::Error::custom("matrix entries must be finite"));
                }
                entries.push(Complex64::new(re, im));
            }
        }
        ComplexMatrix::new(rank, entries).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    rank: usize,
    lead: i32,
    coeffs: Vec<ComplexMatrix>,
}

impl Serialize for MatrixLaurentSeries {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesWire {
            rank: self.rank,
            lead: self.lead,
            coeffs: self.coeffs.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MatrixLaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = SeriesWire::deserialize(de)?;
        MatrixLaurentSeries::new(w.rank, w.lead, w.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trims_trailing_zeros_keeps_interior() {
        let s = MatrixLaurentSeries::new(
            1,
            -1,
            vec![
                ComplexMatrix::scalar(c(1.0, 0.0)),
                ComplexMatrix::scalar(c(0.0, 0.0)),
                ComplexMatrix::scalar(c(1.0, 0.0)),
                ComplexMatrix::scalar(c(0.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.lead(), -1);
        assert_eq!(s.len(), 3);
        assert!(s.coefficient(0).is_zero());
    }

    #[test]
    fn trims_leading_zeros_adjusts_lead() {
        let s = MatrixLaurentSeries::new(
            1,
            -2,
            vec![
                ComplexMatrix::scalar(c(0.0, 0.0)),
                ComplexMatrix::scalar(c(3.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.lead(), -1);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn zero_input_collapses_to_canonical_zero() {
        let s = MatrixLaurentSeries::new(2, 3, vec![ComplexMatrix::zeros(2)]).unwrap();
        assert_eq!(s.lead(), 0);
        assert_eq!(s.len(), 1);
        assert_eq!(s.rank(), 2);
        assert!(s.is_zero());
    }

    #[test]
    fn empty_coefficients_rejected() {
        assert!(matches!(
            MatrixLaurentSeries::new(1, 0, vec![]),
            Err(Error::EmptyCoefficients)
        ));
    }

    #[test]
    fn mixed_rank_rejected() {
        let r =
            MatrixLaurentSeries::new(2, 0, vec![ComplexMatrix::zeros(2), ComplexMatrix::zeros(3)]);
        assert!(matches!(r, Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn coefficient_outside_window_is_zero() {
        let s = MatrixLaurentSeries::monomial(c(2.0, 1.0), 4);
        assert!(s.coefficient(3).is_zero());
        assert!(s.coefficient(5).is_zero());
        assert_eq!(s.coefficient(4).get(0, 0), c(2.0, 1.0));
    }

    #[test]
    fn evaluate_laurent_scalar() {
        // z^-1 + z at z = 2 -> 2.5
        let s = MatrixLaurentSeries::new(
            1,
            -1,
            vec![
                ComplexMatrix::scalar(c(1.0, 0.0)),
                ComplexMatrix::scalar(c(0.0, 0.0)),
                ComplexMatrix::scalar(c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let v = s.evaluate(c(2.0, 0.0)).unwrap().get(0, 0);
        assert_abs_diff_eq!(v.re, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_pole_at_origin_errors() {
        let s = MatrixLaurentSeries::monomial(c(1.0, 0.0), -1);
        assert!(matches!(
            s.evaluate(c(0.0, 0.0)),
            Err(Error::PoleAtOrigin { lead: -1 })
        ));
        // nonnegative lead is fine at the origin
        let t = MatrixLaurentSeries::monomial(c(5.0, 0.0), 0);
        assert_eq!(t.evaluate(c(0.0, 0.0)).unwrap().get(0, 0), c(5.0, 0.0));
    }

    #[test]
    fn evaluate_matches_termwise_on_circle() {
        let mut coeffs = Vec::new();
        for k in 0..7 {
            let mut m = ComplexMatrix::zeros(2);
            m.set(0, 0, c(0.3 * k as f64, -0.1));
            m.set(0, 1, c(-0.2, 0.05 * k as f64));
            m.set(1, 0, c(0.11, 0.7));
            m.set(1, 1, c(-0.4 * k as f64, 0.2));
            coeffs.push(m);
        }
        let s = MatrixLaurentSeries::new(2, -3, coeffs).unwrap();
        for i in 0..16 {
            let th = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
            let z = Complex64::from_polar(1.0, th);
            let fast = s.evaluate(z).unwrap();
            let mut slow = ComplexMatrix::zeros(2);
            for r in s.lead()..=s.max_exponent() {
                slow.add_assign_scaled(&s.coefficient(r), z.powi(r));
            }
            for i in 0..2 {
                for j in 0..2 {
                    let d = (fast.get(i, j) - slow.get(i, j)).norm();
                    let scale = slow.get(i, j).norm().max(1.0);
                    assert!(d / scale < 1e-12, "termwise mismatch {d}");
                }
            }
        }
    }

    #[test]
    fn trace_pair_scalar_example() {
        let a = ComplexMatrix::scalar(c(2.0, 1.0));
        let b = ComplexMatrix::scalar(c(3.0, 0.0));
        assert_eq!(trace_pair(&a, &b).unwrap(), c(6.0, -3.0));
    }

    #[test]
    fn trace_pair_rank_mismatch() {
        let a = ComplexMatrix::zeros(2);
        let b = ComplexMatrix::zeros(3);
        assert!(matches!(
            trace_pair(&a, &b),
            Err(Error::RankMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn trace_pair_conjugate_symmetry_and_positivity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let rank = rng.gen_range(1..=4);
            let rand_mat = |rng: &mut rand_chacha::ChaCha8Rng| {
                ComplexMatrix::new(
                    rank,
                    (0..rank * rank)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                )
                .unwrap()
            };
            let a = rand_mat(&mut rng);
            let b = rand_mat(&mut rng);
            let ab = trace_pair(&a, &b).unwrap();
            let ba = trace_pair(&b, &a).unwrap();
            assert_abs_diff_eq!(ab.re, ba.conj().re, epsilon = 1e-12);
            assert_abs_diff_eq!(ab.im, ba.conj().im, epsilon = 1e-12);
            let aa = trace_pair(&a, &a).unwrap();
            assert!(aa.im.abs() < 1e-12);
            assert_abs_diff_eq!(aa.re, a.frobenius_norm().powi(2), epsilon = 1e-10);
        }
    }

    #[test]
    fn add_and_scale_canonicalize() {
        let s = MatrixLaurentSeries::monomial(c(1.0, 0.0), 2);
        let t = MatrixLaurentSeries::monomial(c(-1.0, 0.0), 2);
        let sum = s.add(&t).unwrap();
        assert!(sum.is_zero());
        assert_eq!(sum.lead(), 0);
        let sc = s.scale(c(0.0, 0.0));
        assert!(sc.is_zero());
    }

    #[test]
    fn json_roundtrip_series() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, c(1.5, -2.0));
        m.set(1, 1, c(0.0, 3.0));
        let s = MatrixLaurentSeries::new(2, -2, vec![m]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: MatrixLaurentSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        // wire shape is {"rank":2,"lead":-2,"coeffs":[[[..],[..]]]}
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rank"], 2);
        assert_eq!(v["lead"], -2);
        assert_eq!(v["coeffs"][0][0][0][0], 1.5);
    }

    #[test]
    fn json_rejects_ragged_matrix() {
        let text = r#"{"rank":2,"lead":0,"coeffs":[[[[1,0],[0,0]],[[0,0]]]]}"#;
        let r: std::result::Result<MatrixLaurentSeries, _> = serde_json::from_str(text);
        assert!(r.is_err());
    }

    proptest::proptest! {
        #[test]
        fn coefficient_roundtrip(lead in -6i32..6, n in 1usize..6, seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<ComplexMatrix> = (0..n)
                .map(|_| ComplexMatrix::scalar(c(rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0f64))))
                .collect();
            let s = MatrixLaurentSeries::new(1, lead, coeffs.clone()).unwrap();
            // every exponent of the original input is reproduced exactly
            for (i, m) in coeffs.iter().enumerate() {
                let r = lead + i as i32;
                proptest::prop_assert_eq!(s.coefficient(r), m.clone());
            }
        }
    }
}
