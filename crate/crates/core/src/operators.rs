//! Fourier-multiplier operators: curl and its powers, gradient, divergence,
//! Laplacian and its mean-zero pseudo-inverse, Leray projectors, Riesz-type
//! singular integrals, and generic bounded-multiplier application.
//!
//! Every operator acts coefficientwise: `(m(D) v)^(k) = m(k) v^(k)`, with an
//! explicit convention at `k = 0` where the symbol would be singular.
//! Conventions: the Leray projector takes `P(0) = I` (constants are
//! divergence-free), its complement takes `0`; `|D|^{-2}` and the Riesz forms
//! take `0` (mean-zero pseudo-inverses).

use crate::grid::GridSpec;
use crate::report::CheckReport;
use crate::spectral::{Padded, SpectralScalar, SpectralVector};
use crate::units::Dimension;
use crate::{Error, Result};
use num_complex::Complex64;

/// Parity class of a multiplier symbol, which decides whether it maps real
/// fields to real fields: even real symmetric symbols and odd purely
/// imaginary antisymmetric symbols both preserve reality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    RealEvenSymmetric,
    ImaginaryOddAntisymmetric,
    Other,
}

type MatrixSymbol = dyn Fn([f64; 3]) -> [[Complex64; 3]; 3] + Sync + Send;

/// A matrix-valued function of the wavevector defining a Fourier-multiplier
/// operator, with an explicit zero-mode value.
pub struct MultiplierSpec {
    pub name: String,
    symbol: Box<MatrixSymbol>,
    zero_mode: [[Complex64; 3]; 3],
    pub parity: Parity,
}

fn zero_matrix() -> [[Complex64; 3]; 3] {
    [[Complex64::default(); 3]; 3]
}

fn identity_matrix() -> [[Complex64; 3]; 3] {
    let mut m = zero_matrix();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

impl MultiplierSpec {
    pub fn matrix(
        name: &str,
        symbol: impl Fn([f64; 3]) -> [[Complex64; 3]; 3] + Sync + Send + 'static,
        zero_mode: [[Complex64; 3]; 3],
        parity: Parity,
    ) -> Self {
        MultiplierSpec {
            name: name.to_string(),
            symbol: Box::new(symbol),
            zero_mode,
            parity,
        }
    }

    /// Scalar symbol, applied componentwise.
    pub fn scalar(
        name: &str,
        symbol: impl Fn([f64; 3]) -> Complex64 + Sync + Send + 'static,
        zero_mode: Complex64,
        parity: Parity,
    ) -> Self {
        let sym = move |k: [f64; 3]| {
            let s = symbol(k);
            let mut m = zero_matrix();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = s;
            }
            m
        };
        let mut z = zero_matrix();
        for (i, row) in z.iter_mut().enumerate() {
            row[i] = zero_mode;
        }
        MultiplierSpec {
            name: name.to_string(),
            symbol: Box::new(sym),
            zero_mode: z,
            parity,
        }
    }

    pub fn identity() -> Self {
        MultiplierSpec::matrix(
            "identity",
            |_| identity_matrix(),
            identity_matrix(),
            Parity::RealEvenSymmetric,
        )
    }

    #[inline]
    pub fn eval(&self, k: [f64; 3]) -> [[Complex64; 3]; 3] {
        if k == [0.0; 3] {
            self.zero_mode
        } else {
            (self.symbol)(k)
        }
    }

    /// Checks the declared parity class and symbol boundedness over the
    /// retained band of `grid`.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let d = grid.dealias_limit() as i64;
        let ku = grid.k_unit();
        let mut sup = 0.0f64;
        for k3 in -d..=d {
            for k2 in -d..=d {
                for k1 in -d..=d {
                    if (k1, k2, k3) == (0, 0, 0) {
                        continue;
                    }
                    let k = [ku * k1 as f64, ku * k2 as f64, ku * k3 as f64];
                    let mk = self.eval(k);
                    let mmk = self.eval([-k[0], -k[1], -k[2]]);
                    for r in 0..3 {
                        for c in 0..3 {
                            let v = mk[r][c];
                            if !v.re.is_finite() || !v.im.is_finite() {
                                return Err(Error::InvalidInput(format!(
                                    "multiplier {} unbounded at k = {k:?}",
                                    self.name
                                )));
                            }
                            sup = sup.max(v.norm());
                            let fail = match self.parity {
                                Parity::RealEvenSymmetric => {
                                    (mmk[r][c] - v).norm() > 1e-12 * (1.0 + v.norm())
                                        || v.im.abs() > 1e-12 * (1.0 + v.norm())
                                        || (mk[c][r] - v).norm() > 1e-12 * (1.0 + v.norm())
                                }
                                Parity::ImaginaryOddAntisymmetric => {
                                    (mmk[r][c] + v).norm() > 1e-12 * (1.0 + v.norm())
                                        || v.re.abs() > 1e-12 * (1.0 + v.norm())
                                        || (mk[c][r] + v).norm() > 1e-12 * (1.0 + v.norm())
                                }
                                Parity::Other => false,
                            };
                            if fail {
                                return Err(Error::InvalidInput(format!(
                                    "multiplier {} violates its declared parity class at k = {k:?}",
                                    self.name
                                )));
                            }
                        }
                    }
                }
            }
        }
        if !sup.is_finite() {
            return Err(Error::InvalidInput(format!(
                "multiplier {} has unbounded symbol on the band",
                self.name
            )));
        }
        Ok(())
    }
}

/// Applies a matrix multiplier to a vector field.
pub fn apply_multiplier(m: &MultiplierSpec, v: &SpectralVector) -> SpectralVector {
    let mut out = SpectralVector::zeros(v.grid).with_units(v.units);
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let mk = m.eval(k);
        let c = [v.comps[0][idx], v.comps[1][idx], v.comps[2][idx]];
        for r in 0..3 {
            out.comps[r][idx] = mk[r][0] * c[0] + mk[r][1] * c[1] + mk[r][2] * c[2];
        }
    }
    out.real_flagged = v.real_flagged && m.parity != Parity::Other;
    out
}

/// Applies a scalar multiplier (the diagonal of a `MultiplierSpec`) to a
/// scalar field.
pub fn apply_scalar_multiplier(m: &MultiplierSpec, f: &SpectralScalar) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(f.grid).with_units(f.units);
    for idx in 0..f.grid.node_count() {
        let k = f.grid.wavevector_of(idx);
        out.coeffs[idx] = m.eval(k)[0][0] * f.coeffs[idx];
    }
    out.real_flagged = f.real_flagged && m.parity != Parity::Other;
    out
}

// ---------------------------------------------------------------------------
// Concrete differential operators (direct coefficient loops)
// ---------------------------------------------------------------------------

/// `grad f`: `(i k_j f^)`.
pub fn grad(f: &SpectralScalar) -> SpectralVector {
    let mut out = SpectralVector::zeros(f.grid).with_units(f.units * Dimension::lt(-1, 0));
    for idx in 0..f.grid.node_count() {
        let k = f.grid.wavevector_of(idx);
        let c = f.coeffs[idx];
        for (j, comp) in out.comps.iter_mut().enumerate() {
            comp[idx] = Complex64::i() * k[j] * c;
        }
    }
    out.real_flagged = f.real_flagged;
    out
}

/// `div v`: `sum_j i k_j v_j^`.
pub fn div(v: &SpectralVector) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(v.grid).with_units(v.units * Dimension::lt(-1, 0));
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        out.coeffs[idx] = Complex64::i()
            * (k[0] * v.comps[0][idx] + k[1] * v.comps[1][idx] + k[2] * v.comps[2][idx]);
    }
    out.real_flagged = v.real_flagged;
    out
}

/// One partial derivative `d/dx_axis`.
pub fn partial(f: &SpectralScalar, axis: usize) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(f.grid).with_units(f.units * Dimension::lt(-1, 0));
    for idx in 0..f.grid.node_count() {
        let k = f.grid.wavevector_of(idx);
        out.coeffs[idx] = Complex64::i() * k[axis] * f.coeffs[idx];
    }
    out.real_flagged = f.real_flagged;
    out
}

/// `curl v` via the purely imaginary skew-symmetric (hence Hermitian) matrix
/// symbol `C(k)`, `(C v)^ = i k x v^`.
pub fn curl(v: &SpectralVector) -> SpectralVector {
    let mut out = SpectralVector::zeros(v.grid).with_units(v.units * Dimension::lt(-1, 0));
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let c = [v.comps[0][idx], v.comps[1][idx], v.comps[2][idx]];
        out.comps[0][idx] = Complex64::i() * (k[1] * c[2] - k[2] * c[1]);
        out.comps[1][idx] = Complex64::i() * (k[2] * c[0] - k[0] * c[2]);
        out.comps[2][idx] = Complex64::i() * (k[0] * c[1] - k[1] * c[0]);
    }
    out.real_flagged = v.real_flagged;
    out
}

/// `curl^2 v` via the exact symbol `C(k)^2 = |k|^2 I - k (x) k`
/// (equal to `-Lap v` on divergence-free fields).
pub fn curl2(v: &SpectralVector) -> SpectralVector {
    let mut out = SpectralVector::zeros(v.grid).with_units(v.units * Dimension::lt(-2, 0));
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let c = [v.comps[0][idx], v.comps[1][idx], v.comps[2][idx]];
        let kdotc = k[0] * c[0] + k[1] * c[1] + k[2] * c[2];
        for (r, comp) in out.comps.iter_mut().enumerate() {
            comp[idx] = k2 * c[r] - k[r] * kdotc;
        }
    }
    out.real_flagged = v.real_flagged;
    out
}

/// Scalar Laplacian, symbol `-|k|^2`.
pub fn laplacian(f: &SpectralScalar) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(f.grid).with_units(f.units * Dimension::lt(-2, 0));
    for idx in 0..f.grid.node_count() {
        let k = f.grid.wavevector_of(idx);
        out.coeffs[idx] = -(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * f.coeffs[idx];
    }
    out.real_flagged = f.real_flagged;
    out
}

/// Vector Laplacian, componentwise `-|k|^2`.
pub fn laplacian_vec(v: &SpectralVector) -> SpectralVector {
    let mut out = SpectralVector::zeros(v.grid).with_units(v.units * Dimension::lt(-2, 0));
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let k2 = -(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        for (c, comp) in out.comps.iter_mut().enumerate() {
            comp[idx] = k2 * v.comps[c][idx];
        }
    }
    out.real_flagged = v.real_flagged;
    out
}

/// Mean-zero pseudo-inverse of `-Lap`: symbol `|k|^{-2}`, zero mode `0`.
pub fn inv_neg_laplacian(f: &SpectralScalar) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(f.grid).with_units(f.units * Dimension::lt(2, 0));
    for idx in 0..f.grid.node_count() {
        let k = f.grid.wavevector_of(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        out.coeffs[idx] = if k2 > 0.0 {
            f.coeffs[idx] / k2
        } else {
            Complex64::default()
        };
    }
    out.real_flagged = f.real_flagged;
    out
}

/// Leray projection onto divergence-free fields: symbol
/// `I - k (x) k / |k|^2`, zero mode `I` (constants are divergence-free).
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let mut out = v.clone();
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let c = [v.comps[0][idx], v.comps[1][idx], v.comps[2][idx]];
        let kdotc = (k[0] * c[0] + k[1] * c[1] + k[2] * c[2]) / k2;
        for (r, comp) in out.comps.iter_mut().enumerate() {
            comp[idx] = c[r] - k[r] * kdotc;
        }
    }
    out
}

/// Complement projection onto gradients: symbol `k (x) k / |k|^2`, zero
/// mode `0`.
pub fn leray_complement(v: &SpectralVector) -> SpectralVector {
    let mut out = SpectralVector::zeros(v.grid).with_units(v.units);
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let c = [v.comps[0][idx], v.comps[1][idx], v.comps[2][idx]];
        let kdotc = (k[0] * c[0] + k[1] * c[1] + k[2] * c[2]) / k2;
        for (r, comp) in out.comps.iter_mut().enumerate() {
            comp[idx] = k[r] * kdotc;
        }
    }
    out.real_flagged = v.real_flagged;
    out
}

/// The scalar Riesz-type singular integral
/// `R0(T) = sum_{j,l} |D|^{-2} d_j d_l T_{jl}`, symbol
/// `-k_j k_l / |k|^2`, zero mode `0`.
pub fn riesz_r0(tensor: &[[SpectralScalar; 3]; 3]) -> SpectralScalar {
    let grid = tensor[0][0].grid;
    let mut out = SpectralScalar::zeros(grid).with_units(tensor[0][0].units);
    for idx in 0..grid.node_count() {
        let k = grid.wavevector_of(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let mut acc = Complex64::default();
        for (j, row) in tensor.iter().enumerate() {
            for (l, t) in row.iter().enumerate() {
                acc -= k[j] * k[l] / k2 * t.coeffs[idx];
            }
        }
        out.coeffs[idx] = acc;
    }
    out.real_flagged = tensor.iter().flatten().all(|t| t.real_flagged);
    out
}

/// The three columns `u_l = P(v_l v - |v|^2 e_l / 2)` of the stress-form
/// decomposition, with the zero mode of each column set to zero (the
/// underlying symbol is a singular integral, undefined at the origin).
///
/// For divergence-free `v` these satisfy
/// `P(curl v x v) = sum_l d_l u_l`.
pub fn s0_map(v: &SpectralVector) -> Result<[SpectralVector; 3]> {
    let pv = Padded::of_vector(v);
    s0_map_from_pads(v, &pv)
}

/// `s0_map` reusing caller-supplied padded transforms of `v`.
pub fn s0_map_from_pads(v: &SpectralVector, pv: &[Padded; 3]) -> Result<[SpectralVector; 3]> {
    let vsq = pv[0]
        .mul(&pv[0])
        .add(&pv[1].mul(&pv[1]))
        .add(&pv[2].mul(&pv[2]))
        .to_spectral();
    let mut cols: Vec<SpectralVector> = Vec::with_capacity(3);
    for l in 0..3 {
        // v_l v as three dealiased scalar products sharing the padded data.
        let comps = [
            pv[l].mul(&pv[0]).to_spectral(),
            pv[l].mul(&pv[1]).to_spectral(),
            pv[l].mul(&pv[2]).to_spectral(),
        ];
        let mut stress = SpectralVector::from_components(comps)?;
        stress.real_flagged = v.real_flagged;
        // subtract |v|^2 e_l / 2
        for (idx, c) in vsq.coeffs.iter().enumerate() {
            stress.comps[l][idx] -= 0.5 * c;
        }
        let mut col = leray_project(&stress);
        col.set_coeff([0, 0, 0], [Complex64::default(); 3]);
        col.units = v.units * v.units;
        cols.push(col);
    }
    let [a, b, c] = <[SpectralVector; 3]>::try_from(cols).expect("three columns");
    Ok([a, b, c])
}

/// `sum_l d_l u_l` for a triple of columns.
pub fn divergence_of_columns(cols: &[SpectralVector; 3]) -> SpectralVector {
    let grid = cols[0].grid;
    let mut out = SpectralVector::zeros(grid).with_units(cols[0].units * Dimension::lt(-1, 0));
    for idx in 0..grid.node_count() {
        let k = grid.wavevector_of(idx);
        for r in 0..3 {
            let mut acc = Complex64::default();
            for (l, col) in cols.iter().enumerate() {
                acc += Complex64::i() * k[l] * col.comps[r][idx];
            }
            out.comps[r][idx] = acc;
        }
    }
    out.real_flagged = cols.iter().all(|c| c.real_flagged);
    out
}

// ---------------------------------------------------------------------------
// Symbol-level checks
// ---------------------------------------------------------------------------

/// Verifies `C(k)^* = C(k)` (purely imaginary skew-symmetric matrices are
/// Hermitian) exactly over the retained band.
pub fn curl_symbol_hermitian_check(grid: &GridSpec) -> CheckReport {
    let d = grid.dealias_limit() as i64;
    let ku = grid.k_unit();
    let mut worst = 0.0f64;
    for k3 in -d..=d {
        for k2 in -d..=d {
            for k1 in -d..=d {
                let k = [ku * k1 as f64, ku * k2 as f64, ku * k3 as f64];
                let c = curl_matrix(k);
                for r in 0..3 {
                    for s in 0..3 {
                        worst = worst.max((c[r][s].conj() - c[s][r]).norm());
                    }
                }
            }
        }
    }
    CheckReport::residual(
        "curl-symbol-hermitian",
        "curl-matrix-hermitian",
        "symbol",
        &format!("n={}", grid.n()),
        worst,
        0.0,
    )
}

/// The curl matrix symbol `C(k)`.
pub fn curl_matrix(k: [f64; 3]) -> [[Complex64; 3]; 3] {
    let i = Complex64::i();
    [
        [Complex64::default(), -i * k[2], i * k[1]],
        [i * k[2], Complex64::default(), -i * k[0]],
        [-i * k[1], i * k[0], Complex64::default()],
    ]
}

/// A `MultiplierSpec` for the curl operator (for the generic-multiplier
/// path; `curl` is the direct implementation).
pub fn curl_multiplier() -> MultiplierSpec {
    MultiplierSpec::matrix(
        "curl",
        curl_matrix,
        zero_matrix(),
        Parity::ImaginaryOddAntisymmetric,
    )
}

/// A `MultiplierSpec` for the Leray projector.
pub fn leray_multiplier() -> MultiplierSpec {
    MultiplierSpec::matrix(
        "leray-projection",
        |k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let mut m = identity_matrix();
            for (r, row) in m.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v -= Complex64::new(k[r] * k[c] / k2, 0.0);
                }
            }
            m
        },
        identity_matrix(),
        Parity::RealEvenSymmetric,
    )
}

/// Verifies that the Leray projector factors through
/// `|D|^{-2} curl^2` away from the zero mode.
pub fn leray_factorization_check(v: &SpectralVector, field_id: &str) -> CheckReport {
    let p = leray_project(v);
    let c2 = curl2(v);
    let mut via_curl = SpectralVector::zeros(v.grid);
    for idx in 0..v.grid.node_count() {
        let k = v.grid.wavevector_of(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        for c in 0..3 {
            via_curl.comps[c][idx] = c2.comps[c][idx] / k2;
        }
    }
    let mut worst = 0.0f64;
    for idx in 0..v.grid.node_count() {
        if v.grid.modes_of(idx) == [0, 0, 0] {
            continue;
        }
        for c in 0..3 {
            worst = worst.max((p.comps[c][idx] - via_curl.comps[c][idx]).norm());
        }
    }
    let scale = v.max_coeff_abs().max(f64::MIN_POSITIVE);
    CheckReport::residual(
        "leray-curl-factorization",
        "leray-equals-invlap-curlsq",
        field_id,
        &format!("n={}", v.grid.n()),
        worst / scale,
        1e-12,
    )
}
