//! Fourier-series coefficients, transforms and dealiased products.
//!
//! A field is represented as `v(x) = sum_k c_k e^{i k . x}` with one complex
//! coefficient per retained wavevector. `forward` is the normalized DFT of
//! the nodal samples and satisfies Parseval's identity
//! `sum_x |v(x)|^2 (L/n)^3 = L^3 sum_k |c_k|^2` exactly (to rounding).
//!
//! Products of band-limited fields are computed by zero-padding to `2n` per
//! axis, multiplying nodally, transforming back and truncating to the dealias
//! band, so the retained coefficients of a product are the exact convolution
//! of the inputs.

use crate::fft::fft3;
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::report::CheckReport;
use crate::units::Dimension;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftDirection;

/// Relative imaginary residue allowed when realizing a spectral field.
pub const REALITY_TOL: f64 = 1e-12;

/// Absolute residue floor: fields at or below accumulated rounding noise
/// are realized without complaint (their imaginary parts are noise too).
pub const REALITY_ABS_FLOOR: f64 = 1e-14;

/// Spectral coefficients of a scalar field.
#[derive(Debug, Clone)]
pub struct SpectralScalar {
    pub grid: GridSpec,
    /// Full `n^3` cube of coefficients in DFT (wrapped-mode) order.
    pub coeffs: Vec<Complex64>,
    pub units: Dimension,
    /// Set when the field is known to represent real nodal data.
    pub real_flagged: bool,
}

/// Spectral coefficients of a 3-component field.
#[derive(Debug, Clone)]
pub struct SpectralVector {
    pub grid: GridSpec,
    pub comps: [Vec<Complex64>; 3],
    pub units: Dimension,
    pub real_flagged: bool,
}

impl SpectralScalar {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralScalar {
            grid,
            coeffs: vec![Complex64::default(); grid.node_count()],
            units: Dimension::DIMENSIONLESS,
            real_flagged: true,
        }
    }

    pub fn with_units(mut self, units: Dimension) -> Self {
        self.units = units;
        self
    }

    /// Coefficient at signed mode `m`, zero when out of range.
    pub fn coeff(&self, m: [i64; 3]) -> Complex64 {
        let n2 = (self.grid.n() / 2) as i64;
        if m.iter().any(|c| *c <= -n2 || *c > n2) {
            return Complex64::default();
        }
        let (i, j, l) = (
            self.grid.dft_index(m[0]),
            self.grid.dft_index(m[1]),
            self.grid.dft_index(m[2]),
        );
        self.coeffs[self.grid.idx(i, j, l)]
    }

    pub fn set_coeff(&mut self, m: [i64; 3], c: Complex64) {
        let (i, j, l) = (
            self.grid.dft_index(m[0]),
            self.grid.dft_index(m[1]),
            self.grid.dft_index(m[2]),
        );
        let idx = self.grid.idx(i, j, l);
        self.coeffs[idx] = c;
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()))
    }

    /// Largest coefficient magnitude with any `|m_i| > dealias_limit`.
    pub fn out_of_band_mass(&self) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..self.coeffs.len() {
            if !self.grid.in_band(self.grid.modes_of(idx)) {
                m = m.max(self.coeffs[idx].norm());
            }
        }
        m
    }
}

impl SpectralVector {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![Complex64::default(); grid.node_count()];
        SpectralVector {
            grid,
            comps: [z.clone(), z.clone(), z],
            units: Dimension::DIMENSIONLESS,
            real_flagged: true,
        }
    }

    pub fn with_units(mut self, units: Dimension) -> Self {
        self.units = units;
        self
    }

    pub fn component(&self, c: usize) -> SpectralScalar {
        SpectralScalar {
            grid: self.grid,
            coeffs: self.comps[c].clone(),
            units: self.units,
            real_flagged: self.real_flagged,
        }
    }

    pub fn from_components(comps: [SpectralScalar; 3]) -> Result<Self> {
        comps[0].grid.same_as(&comps[1].grid)?;
        comps[0].grid.same_as(&comps[2].grid)?;
        let real = comps.iter().all(|c| c.real_flagged);
        let [a, b, c] = comps;
        Ok(SpectralVector {
            grid: a.grid,
            units: a.units,
            comps: [a.coeffs, b.coeffs, c.coeffs],
            real_flagged: real,
        })
    }

    pub fn coeff(&self, m: [i64; 3]) -> [Complex64; 3] {
        let n2 = (self.grid.n() / 2) as i64;
        if m.iter().any(|c| *c <= -n2 || *c > n2) {
            return [Complex64::default(); 3];
        }
        let (i, j, l) = (
            self.grid.dft_index(m[0]),
            self.grid.dft_index(m[1]),
            self.grid.dft_index(m[2]),
        );
        let idx = self.grid.idx(i, j, l);
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set_coeff(&mut self, m: [i64; 3], c: [Complex64; 3]) {
        let (i, j, l) = (
            self.grid.dft_index(m[0]),
            self.grid.dft_index(m[1]),
            self.grid.dft_index(m[2]),
        );
        let idx = self.grid.idx(i, j, l);
        for (comp, val) in self.comps.iter_mut().zip(c) {
            comp[idx] = val;
        }
    }

    pub fn max_coeff_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..self.grid.node_count() {
            let s = self.comps[0][idx].norm_sqr()
                + self.comps[1][idx].norm_sqr()
                + self.comps[2][idx].norm_sqr();
            m = m.max(s.sqrt());
        }
        m
    }

    /// max_k |k . c_k|, the divergence residual in coefficient space.
    pub fn divergence_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.grid.node_count() {
            let k = self.grid.wavevector_of(idx);
            let dot =
                self.comps[0][idx] * k[0] + self.comps[1][idx] * k[1] + self.comps[2][idx] * k[2];
            worst = worst.max(dot.norm());
        }
        worst
    }

    /// max_k |k| |c_k|, the natural scale for the divergence residual.
    pub fn gradient_scale(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.grid.node_count() {
            let k = self.grid.wavevector_of(idx);
            let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let cn = (self.comps[0][idx].norm_sqr()
                + self.comps[1][idx].norm_sqr()
                + self.comps[2][idx].norm_sqr())
            .sqrt();
            worst = worst.max(kn * cn);
        }
        worst
    }

    /// True when the divergence residual is below `1e-10` of the gradient
    /// scale (fields below that threshold are treated as divergence-free).
    pub fn is_divergence_free(&self) -> bool {
        let scale = self.gradient_scale();
        scale == 0.0 || self.divergence_residual() <= 1e-10 * scale
    }
}

fn ensure_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(
            "field samples must be finite".to_string(),
        ))
    }
}

/// Nodal samples -> Fourier coefficients (`c_k = DFT / n^3`).
pub fn forward_scalar(field: &ScalarField) -> Result<SpectralScalar> {
    ensure_finite(&field.values)?;
    let n = field.grid.n();
    let mut data: Vec<Complex64> = field
        .values
        .iter()
        .map(|v| Complex64::new(*v, 0.0))
        .collect();
    fft3(&mut data, n, FftDirection::Forward);
    let scale = 1.0 / (n * n * n) as f64;
    for c in &mut data {
        *c *= scale;
    }
    Ok(SpectralScalar {
        grid: field.grid,
        coeffs: data,
        units: field.units,
        real_flagged: true,
    })
}

pub fn forward_vector(field: &VectorField) -> Result<SpectralVector> {
    let comps = [
        forward_scalar(&ScalarField {
            grid: field.grid,
            values: field.comps[0].clone(),
            units: field.units,
        })?,
        forward_scalar(&ScalarField {
            grid: field.grid,
            values: field.comps[1].clone(),
            units: field.units,
        })?,
        forward_scalar(&ScalarField {
            grid: field.grid,
            values: field.comps[2].clone(),
            units: field.units,
        })?,
    ];
    SpectralVector::from_components(comps)
}

/// Coefficients -> nodal samples. Fails if the imaginary residue exceeds
/// `REALITY_TOL` of the field magnitude.
pub fn inverse_scalar(w: &SpectralScalar) -> Result<ScalarField> {
    let n = w.grid.n();
    let mut data = w.coeffs.clone();
    fft3(&mut data, n, FftDirection::Inverse);
    let mut max_abs = 0.0f64;
    let mut max_imag = 0.0f64;
    for c in &data {
        max_abs = max_abs.max(c.norm());
        max_imag = max_imag.max(c.im.abs());
    }
    if max_imag > REALITY_TOL * max_abs && max_imag > REALITY_ABS_FLOOR {
        return Err(Error::InvalidInput(format!(
            "inverse transform is not real: imaginary residue {max_imag:.3e} vs magnitude {max_abs:.3e}"
        )));
    }
    Ok(ScalarField {
        grid: w.grid,
        values: data.iter().map(|c| c.re).collect(),
        units: w.units,
    })
}

pub fn inverse_vector(w: &SpectralVector) -> Result<VectorField> {
    let c0 = inverse_scalar(&w.component(0))?;
    let c1 = inverse_scalar(&w.component(1))?;
    let c2 = inverse_scalar(&w.component(2))?;
    Ok(VectorField {
        grid: w.grid,
        comps: [c0.values, c1.values, c2.values],
        units: w.units,
    })
}

/// Checks the reality condition `c_{-k} = conj(c_k)` (equivalently: the real
/// part of the coefficient table is even in k and the imaginary part odd).
pub fn check_reality_scalar(w: &SpectralScalar, field_id: &str) -> CheckReport {
    let mut worst = 0.0f64;
    for idx in 0..w.coeffs.len() {
        let m = w.grid.modes_of(idx);
        // Modes at the Nyquist plane have no distinct mirror; (-m) wraps back.
        let mirror = [-m[0], -m[1], -m[2]];
        let n2 = (w.grid.n() / 2) as i64;
        if mirror.iter().any(|c| *c <= -n2) {
            continue;
        }
        let diff = (w.coeff(mirror) - w.coeff(m).conj()).norm();
        worst = worst.max(diff);
    }
    let scale = w.max_coeff_abs().max(f64::MIN_POSITIVE);
    CheckReport::residual(
        "reality",
        "hermitian-coefficient-symmetry",
        field_id,
        &format!("n={}", w.grid.n()),
        worst / scale,
        REALITY_TOL,
    )
}

pub fn check_reality_vector(w: &SpectralVector, field_id: &str) -> CheckReport {
    let mut worst: f64 = 0.0;
    for c in 0..3 {
        let r = check_reality_scalar(&w.component(c), field_id);
        worst = worst.max(r.residual);
    }
    CheckReport::residual(
        "reality",
        "hermitian-coefficient-symmetry",
        field_id,
        &format!("n={}", w.grid.n()),
        worst,
        REALITY_TOL,
    )
}

/// All integer modes with coefficient magnitude strictly above `threshold`,
/// sorted lexicographically. `threshold = 0` returns the exact nonzero
/// support.
pub fn spectrum_support_scalar(w: &SpectralScalar, threshold: f64) -> Result<Vec<[i64; 3]>> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold must be nonnegative, got {threshold}"
        )));
    }
    let mut out = Vec::new();
    for idx in 0..w.coeffs.len() {
        if w.coeffs[idx].norm() > threshold {
            out.push(w.grid.modes_of(idx));
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn spectrum_support_vector(w: &SpectralVector, threshold: f64) -> Result<Vec<[i64; 3]>> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold must be nonnegative, got {threshold}"
        )));
    }
    let mut out = Vec::new();
    for idx in 0..w.grid.node_count() {
        let mag = (self::SpectralVector::coeff(w, w.grid.modes_of(idx))
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>())
        .sqrt();
        if mag > threshold {
            out.push(w.grid.modes_of(idx));
        }
    }
    out.sort_unstable();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dealiased products
// ---------------------------------------------------------------------------

/// Nodal samples of a band-limited field on the doubled (2n per axis) grid.
/// Products of `Padded` values are exact convolutions for inputs within the
/// dealias band.
#[derive(Debug, Clone)]
pub struct Padded {
    grid: GridSpec,
    units: Dimension,
    vals: Vec<Complex64>,
}

impl Padded {
    pub fn of_scalar(w: &SpectralScalar) -> Padded {
        let n = w.grid.n();
        let n2 = 2 * n;
        let mut big = vec![Complex64::default(); n2 * n2 * n2];
        let half = (n / 2) as i64;
        for idx in 0..w.coeffs.len() {
            let c = w.coeffs[idx];
            if c == Complex64::default() {
                continue;
            }
            let m = w.grid.modes_of(idx);
            // Modes live in (-n/2, n/2]; on the doubled grid they are all
            // interior, so placement is unambiguous.
            debug_assert!(m.iter().all(|v| v.abs() <= half));
            let wrap = |k: i64| -> usize { ((k + n2 as i64) % n2 as i64) as usize };
            big[wrap(m[0]) + n2 * (wrap(m[1]) + n2 * wrap(m[2]))] = c;
        }
        fft3(&mut big, n2, FftDirection::Inverse);
        Padded {
            grid: w.grid,
            units: w.units,
            vals: big,
        }
    }

    pub fn of_vector(w: &SpectralVector) -> [Padded; 3] {
        [
            Padded::of_scalar(&w.component(0)),
            Padded::of_scalar(&w.component(1)),
            Padded::of_scalar(&w.component(2)),
        ]
    }

    pub fn mul(&self, other: &Padded) -> Padded {
        debug_assert_eq!(self.vals.len(), other.vals.len());
        Padded {
            grid: self.grid,
            units: self.units * other.units,
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Padded) -> Padded {
        Padded {
            grid: self.grid,
            units: self.units,
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Padded) -> Padded {
        Padded {
            grid: self.grid,
            units: self.units,
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Padded {
        Padded {
            grid: self.grid,
            units: self.units,
            vals: self.vals.iter().map(|a| a * s).collect(),
        }
    }

    /// Transform back and truncate to the dealias band of the original grid.
    pub fn to_spectral(&self) -> SpectralScalar {
        let n = self.grid.n();
        let n2 = 2 * n;
        let mut big = self.vals.clone();
        fft3(&mut big, n2, FftDirection::Forward);
        let scale = 1.0 / (n2 * n2 * n2) as f64;
        let mut out = SpectralScalar::zeros(self.grid).with_units(self.units);
        let d = self.grid.dealias_limit() as i64;
        let wrap = |k: i64| -> usize { ((k + n2 as i64) % n2 as i64) as usize };
        for k3 in -d..=d {
            for k2 in -d..=d {
                for k1 in -d..=d {
                    let c = big[wrap(k1) + n2 * (wrap(k2) + n2 * wrap(k3))] * scale;
                    out.set_coeff([k1, k2, k3], c);
                }
            }
        }
        out
    }
}

/// Dealiased product of two scalar fields, truncated to the dealias band.
pub fn mul_dealiased(a: &SpectralScalar, b: &SpectralScalar) -> Result<SpectralScalar> {
    a.grid.same_as(&b.grid)?;
    let mut out = Padded::of_scalar(a)
        .mul(&Padded::of_scalar(b))
        .to_spectral();
    out.real_flagged = a.real_flagged && b.real_flagged;
    Ok(out)
}

/// Dealiased dot product of two vector fields.
pub fn dot_dealiased(a: &SpectralVector, b: &SpectralVector) -> Result<SpectralScalar> {
    a.grid.same_as(&b.grid)?;
    let pa = Padded::of_vector(a);
    let pb = Padded::of_vector(b);
    let mut acc = pa[0].mul(&pb[0]);
    acc = acc.add(&pa[1].mul(&pb[1]));
    acc = acc.add(&pa[2].mul(&pb[2]));
    let mut out = acc.to_spectral();
    out.real_flagged = a.real_flagged && b.real_flagged;
    out.units = a.units * b.units;
    Ok(out)
}

/// Dealiased cross product of two vector fields.
pub fn cross_dealiased(a: &SpectralVector, b: &SpectralVector) -> Result<SpectralVector> {
    a.grid.same_as(&b.grid)?;
    let pa = Padded::of_vector(a);
    let pb = Padded::of_vector(b);
    let c0 = pa[1].mul(&pb[2]).sub(&pa[2].mul(&pb[1])).to_spectral();
    let c1 = pa[2].mul(&pb[0]).sub(&pa[0].mul(&pb[2])).to_spectral();
    let c2 = pa[0].mul(&pb[1]).sub(&pa[1].mul(&pb[0])).to_spectral();
    let mut out = SpectralVector::from_components([c0, c1, c2])?;
    out.real_flagged = a.real_flagged && b.real_flagged;
    out.units = a.units * b.units;
    Ok(out)
}

/// Dealiased squared magnitude `|v|^2`.
pub fn magnitude_sq_dealiased(v: &SpectralVector) -> Result<SpectralScalar> {
    dot_dealiased(v, v)
}

/// Dealiased outer product `T_{jl} = a_j b_l` as nine scalar fields,
/// row-major (`tensor[j][l]`).
pub fn outer_dealiased(a: &SpectralVector, b: &SpectralVector) -> Result<[[SpectralScalar; 3]; 3]> {
    a.grid.same_as(&b.grid)?;
    let pa = Padded::of_vector(a);
    let pb = Padded::of_vector(b);
    let make = |j: usize, l: usize| -> SpectralScalar {
        let mut out = pa[j].mul(&pb[l]).to_spectral();
        out.real_flagged = a.real_flagged && b.real_flagged;
        out
    };
    Ok([
        [make(0, 0), make(0, 1), make(0, 2)],
        [make(1, 0), make(1, 1), make(1, 2)],
        [make(2, 0), make(2, 1), make(2, 2)],
    ])
}

// ---------------------------------------------------------------------------
// Coefficient-space linear arithmetic
// ---------------------------------------------------------------------------

pub fn scalar_axpy(y: &mut SpectralScalar, alpha: f64, x: &SpectralScalar) {
    for (yc, xc) in y.coeffs.iter_mut().zip(&x.coeffs) {
        *yc += alpha * xc;
    }
}

pub fn vector_axpy(y: &mut SpectralVector, alpha: f64, x: &SpectralVector) {
    for c in 0..3 {
        for (yc, xc) in y.comps[c].iter_mut().zip(&x.comps[c]) {
            *yc += alpha * xc;
        }
    }
}

pub fn vector_lin(alpha: f64, x: &SpectralVector, beta: f64, y: &SpectralVector) -> SpectralVector {
    let mut out = x.clone();
    for c in 0..3 {
        for (oc, yc) in out.comps[c].iter_mut().zip(&y.comps[c]) {
            *oc = alpha * *oc + beta * yc;
        }
    }
    out.real_flagged = x.real_flagged && y.real_flagged;
    out
}

pub fn scalar_lin(alpha: f64, x: &SpectralScalar, beta: f64, y: &SpectralScalar) -> SpectralScalar {
    let mut out = x.clone();
    for (oc, yc) in out.coeffs.iter_mut().zip(&y.coeffs) {
        *oc = alpha * *oc + beta * yc;
    }
    out.real_flagged = x.real_flagged && y.real_flagged;
    out
}

/// Bare 3D FFT entry point for benchmarks.
pub fn bench_fft3(data: &mut [Complex64], n: usize) {
    fft3(data, n, FftDirection::Forward);
}

// ---------------------------------------------------------------------------
// Spectral dumps
// ---------------------------------------------------------------------------

/// CSV dump with columns `k1,k2,k3,component,re,im`, rows sorted by signed
/// mode then component. Zero coefficients are skipped.
pub fn spectral_csv(comps: &[&SpectralScalar]) -> String {
    let mut rows: Vec<([i64; 3], usize, Complex64)> = Vec::new();
    for (ci, w) in comps.iter().enumerate() {
        for idx in 0..w.coeffs.len() {
            let c = w.coeffs[idx];
            if c != Complex64::default() {
                rows.push((w.grid.modes_of(idx), ci, c));
            }
        }
    }
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out = String::from("k1,k2,k3,component,re,im\n");
    for (m, ci, c) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            m[0], m[1], m[2], ci, c.re, c.im
        ));
    }
    out
}
