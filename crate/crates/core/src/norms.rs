//! Lattice norms and measures: Lp Riemann sums, Wiener and weighted Wiener
//! coefficient sums, the `(2 + |k|^2)^{s/2}`-weighted scale, homogeneous
//! Sobolev norms, and the superlevel-set measure.
//!
//! Conventions: the zero mode is excluded from the homogeneous sums
//! (`hdot_norm`, `weighted_wiener`) and included in the inhomogeneous ones
//! (`wiener_norm`, `vsw_norm`). Vector coefficients enter through their
//! Euclidean magnitude per mode. All reductions use pairwise summation.

use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::quad::pairwise_sum;
use crate::spectral::{SpectralScalar, SpectralVector};
use crate::units::{Dimension, Rational};
use crate::{Error, Result};

/// A nonnegative norm value with provenance.
#[derive(Debug, Clone)]
pub struct NormValue {
    pub value: f64,
    pub norm_id: String,
    pub units: Dimension,
}

impl NormValue {
    fn new(value: f64, norm_id: String, units: Dimension) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "norm {norm_id} is not a finite nonnegative value: {value}"
            )));
        }
        Ok(NormValue {
            value,
            norm_id,
            units,
        })
    }
}

/// Nodal data with a per-node magnitude (scalar absolute value or vector
/// Euclidean magnitude).
pub trait NodalField {
    fn grid(&self) -> &GridSpec;
    fn magnitude_at(&self, idx: usize) -> f64;
    fn units(&self) -> Dimension;
}

impl NodalField for ScalarField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn magnitude_at(&self, idx: usize) -> f64 {
        self.values[idx].abs()
    }
    fn units(&self) -> Dimension {
        self.units
    }
}

impl NodalField for VectorField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn magnitude_at(&self, idx: usize) -> f64 {
        let v = self.at(idx);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }
    fn units(&self) -> Dimension {
        self.units
    }
}

/// Coefficient data with a per-mode magnitude.
pub trait ModalField {
    fn grid(&self) -> &GridSpec;
    fn mode_magnitude(&self, idx: usize) -> f64;
    fn units(&self) -> Dimension;
}

impl ModalField for SpectralScalar {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn mode_magnitude(&self, idx: usize) -> f64 {
        self.coeffs[idx].norm()
    }
    fn units(&self) -> Dimension {
        self.units
    }
}

impl ModalField for SpectralVector {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn mode_magnitude(&self, idx: usize) -> f64 {
        (self.comps[0][idx].norm_sqr()
            + self.comps[1][idx].norm_sqr()
            + self.comps[2][idx].norm_sqr())
        .sqrt()
    }
    fn units(&self) -> Dimension {
        self.units
    }
}

/// Riemann-sum Lp norm, `(sum_x |v(x)|^p (L/n)^3)^{1/p}`; `p = inf` gives
/// the nodal maximum. Exact for band-limited integrands whose total degree
/// stays below the grid.
pub fn lp_norm<T: NodalField>(field: &T, p: f64) -> Result<NormValue> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "Lp norm needs p >= 1, got {p}"
        )));
    }
    let g = field.grid();
    let value = if p.is_infinite() {
        (0..g.node_count()).fold(0.0f64, |a, i| a.max(field.magnitude_at(i)))
    } else {
        let terms: Vec<f64> = (0..g.node_count())
            .map(|i| field.magnitude_at(i).powf(p))
            .collect();
        (pairwise_sum(&terms) * g.cell_volume()).powf(1.0 / p)
    };
    let units = if p.is_infinite() {
        field.units()
    } else {
        // [ ||u||_p ] = [u] L^{3/p}
        lp_units_dimension(field.units(), p)
    };
    NormValue::new(value, format!("L{p}"), units)
}

// Lp norms are taken at small rational p (1, 6/5, 3/2, 2, 9/4, 3, 9/2, 6, ...);
// the unit bookkeeping uses the nearest rational with denominator <= 4.
fn approx_rational_p(p: f64) -> i64 {
    (p * 4.0).round() as i64
}

/// Dimension of an Lp(R^3) norm of a quantity with dimension `units`.
pub fn lp_units_dimension(units: Dimension, p: f64) -> Dimension {
    units * Dimension::new(Rational::new(12, approx_rational_p(p)), Rational::ZERO)
}

/// Wiener norm: `sum_k |c_k|` (zero mode included).
pub fn wiener_norm<M: ModalField>(w: &M) -> Result<NormValue> {
    let g = w.grid();
    let terms: Vec<f64> = (0..g.node_count()).map(|i| w.mode_magnitude(i)).collect();
    NormValue::new(pairwise_sum(&terms), "wiener".to_string(), w.units())
}

/// Weighted Wiener scale: `sum_k (2 + |k|^2)^{s/2} |c_k|`. At `s = 0` this
/// is the Wiener norm.
pub fn vsw_norm<M: ModalField>(w: &M, s: f64) -> Result<NormValue> {
    let g = w.grid();
    let terms: Vec<f64> = (0..g.node_count())
        .map(|i| {
            let k = g.wavevector_of(i);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            (2.0 + k2).powf(0.5 * s) * w.mode_magnitude(i)
        })
        .collect();
    NormValue::new(pairwise_sum(&terms), format!("vsw[s={s}]"), w.units())
}

/// Homogeneous Sobolev norm: `(L^3 sum_{k != 0} |k|^{2s} |c_k|^2)^{1/2}`.
/// Agrees with the L2 norm of the s-th gradient for integer s.
pub fn hdot_norm<M: ModalField>(w: &M, s: f64) -> Result<NormValue> {
    let g = w.grid();
    let terms: Vec<f64> = (0..g.node_count())
        .map(|i| {
            let k = g.wavevector_of(i);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                0.0
            } else {
                k2.powf(s) * w.mode_magnitude(i).powi(2)
            }
        })
        .collect();
    let value = (g.volume() * pairwise_sum(&terms)).sqrt();
    // [c_k] = [v]; the L^3 factor and |k|^s weight give [v] L^{3/2 - s}.
    let units = w.units()
        * Dimension::new(
            Rational::new(3, 2) - Rational::new((2.0 * s).round() as i64, 2),
            Rational::ZERO,
        );
    NormValue::new(value, format!("hdot[s={s}]"), units)
}

/// Kappa-weighted Wiener integral: `sum_{k != 0} |k|^kappa |c_k|`.
pub fn weighted_wiener<M: ModalField>(w: &M, kappa: f64) -> Result<NormValue> {
    let g = w.grid();
    let terms: Vec<f64> = (0..g.node_count())
        .map(|i| {
            let k = g.wavevector_of(i);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                0.0
            } else {
                k2.powf(0.5 * kappa) * w.mode_magnitude(i)
            }
        })
        .collect();
    NormValue::new(
        pairwise_sum(&terms),
        format!("weighted-wiener[kappa={kappa}]"),
        w.units(),
    )
}

/// Lattice measure of the superlevel set `{ |f| > t }`:
/// `(L/n)^3 . #{ nodes with |f| > t }`. Monotone nonincreasing in `t`.
pub fn superlevel_measure(f: &ScalarField, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "superlevel threshold must be nonnegative, got {t}"
        )));
    }
    let count = f.values.iter().filter(|v| v.abs() > t).count();
    Ok(count as f64 * f.grid.cell_volume())
}

/// Norm-table row for the CSV interface `(field_id, norm_id, s_or_p, value)`.
pub fn norm_csv_row(field_id: &str, norm_id: &str, s_or_p: f64, value: f64) -> String {
    format!("{field_id},{norm_id},{s_or_p},{value}\n")
}
