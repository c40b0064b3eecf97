//! Periodic-box discretization and physical (nodal) fields.
//!
//! The box is `[0, L)^3` sampled on `n` uniform nodes per axis, `n` a power
//! of two. Wavevectors are `k = (2 pi / L) m` with integer modes
//! `m_i in (-n/2, n/2]`. Storage is x-fastest: `idx = i + n (j + n l)`.

use crate::units::Dimension;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Periodic box discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_per_axis: usize,
    box_length: f64,
    dealias_limit: usize,
}

impl GridSpec {
    /// A validated grid. `n_per_axis` must be a power of two, at least 4;
    /// `dealias_limit` is the largest retained `|m_i|` after a product and
    /// must stay below the Nyquist mode, `dealias_limit <= n/2 - 1`.
    pub fn new(n_per_axis: usize, box_length: f64, dealias_limit: usize) -> Result<Self> {
        if n_per_axis < 4 || !n_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis must be a power of two >= 4, got {n_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive, got {box_length}"
            )));
        }
        if dealias_limit == 0 || dealias_limit > n_per_axis / 2 - 1 {
            return Err(Error::InvalidGrid(format!(
                "dealias_limit must satisfy 1 <= d <= n/2 - 1, got {dealias_limit} for n {n_per_axis}"
            )));
        }
        Ok(GridSpec {
            n_per_axis,
            box_length,
            dealias_limit,
        })
    }

    /// The default desk-scale grid: 32 nodes per axis on `[0, 2 pi)^3`,
    /// products retained up to `|m_i| <= 10`.
    pub fn desk_default() -> Self {
        GridSpec::new(32, std::f64::consts::TAU, 10).expect("static parameters are valid")
    }

    pub fn n(&self) -> usize {
        self.n_per_axis
    }

    pub fn length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias_limit(&self) -> usize {
        self.dealias_limit
    }

    /// Number of nodes, `n^3`.
    pub fn node_count(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    /// Grid spacing `L / n`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_per_axis as f64
    }

    /// Quadrature weight of one node, `(L / n)^3`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Box volume `L^3`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Wavevector spacing `2 pi / L`.
    pub fn k_unit(&self) -> f64 {
        std::f64::consts::TAU / self.box_length
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, l: usize) -> usize {
        i + self.n_per_axis * (j + self.n_per_axis * l)
    }

    /// Physical coordinates of node `(i, j, l)`.
    pub fn node(&self, i: usize, j: usize, l: usize) -> [f64; 3] {
        let h = self.spacing();
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    /// Signed integer mode of DFT index `m`, in `(-n/2, n/2]`.
    #[inline]
    pub fn signed_mode(&self, m: usize) -> i64 {
        let n = self.n_per_axis as i64;
        let m = m as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// DFT index of signed integer mode `k in (-n/2, n/2]`.
    #[inline]
    pub fn dft_index(&self, k: i64) -> usize {
        let n = self.n_per_axis as i64;
        debug_assert!(-n / 2 < k && k <= n / 2);
        ((k + n) % n) as usize
    }

    /// Integer mode triple of a storage index.
    #[inline]
    pub fn modes_of(&self, idx: usize) -> [i64; 3] {
        let n = self.n_per_axis;
        let i = idx % n;
        let j = (idx / n) % n;
        let l = idx / (n * n);
        [
            self.signed_mode(i),
            self.signed_mode(j),
            self.signed_mode(l),
        ]
    }

    /// Physical wavevector of a storage index, `(2 pi / L) m`.
    #[inline]
    pub fn wavevector_of(&self, idx: usize) -> [f64; 3] {
        let ku = self.k_unit();
        let m = self.modes_of(idx);
        [ku * m[0] as f64, ku * m[1] as f64, ku * m[2] as f64]
    }

    /// True if all components satisfy `|m_i| <= dealias_limit`.
    #[inline]
    pub fn in_band(&self, m: [i64; 3]) -> bool {
        let d = self.dealias_limit as i64;
        m.iter().all(|c| c.abs() <= d)
    }

    pub fn same_as(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Real scalar samples on the grid nodes.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub units: Dimension,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.node_count()],
            units: Dimension::DIMENSIONLESS,
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let n = grid.n();
        let mut values = vec![0.0; grid.node_count()];
        for l in 0..n {
            for j in 0..n {
                for i in 0..n {
                    values[grid.idx(i, j, l)] = f(grid.node(i, j, l));
                }
            }
        }
        ScalarField {
            grid,
            values,
            units: Dimension::DIMENSIONLESS,
        }
    }

    pub fn with_units(mut self, units: Dimension) -> Self {
        self.units = units;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

/// Real 3-component samples on the grid nodes.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub grid: GridSpec,
    pub comps: [Vec<f64>; 3],
    pub units: Dimension,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![0.0; grid.node_count()];
        VectorField {
            grid,
            comps: [z.clone(), z.clone(), z],
            units: Dimension::DIMENSIONLESS,
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let n = grid.n();
        let mut comps = [
            vec![0.0; grid.node_count()],
            vec![0.0; grid.node_count()],
            vec![0.0; grid.node_count()],
        ];
        for l in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let v = f(grid.node(i, j, l));
                    let idx = grid.idx(i, j, l);
                    comps[0][idx] = v[0];
                    comps[1][idx] = v[1];
                    comps[2][idx] = v[2];
                }
            }
        }
        VectorField {
            grid,
            comps,
            units: Dimension::DIMENSIONLESS,
        }
    }

    pub fn with_units(mut self, units: Dimension) -> Self {
        self.units = units;
        self
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..self.grid.node_count() {
            let v = self.at(idx);
            m = m.max((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        }
        m
    }
}

/// Header written next to raw little-endian f64 dumps.
#[derive(Debug, Serialize, Deserialize)]
pub struct RawDumpHeader {
    pub field_id: String,
    pub n_per_axis: usize,
    pub box_length: f64,
    pub dealias_limit: usize,
    pub components: usize,
    pub layout: String,
}

/// Serializes nodal data as raw little-endian f64 in x-fastest order
/// (components concatenated), plus a JSON header naming the grid.
pub fn raw_dump(field_id: &str, grid: &GridSpec, comps: &[&[f64]]) -> (RawDumpHeader, Vec<u8>) {
    let mut bytes = Vec::with_capacity(8 * grid.node_count() * comps.len());
    for c in comps {
        for v in c.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let header = RawDumpHeader {
        field_id: field_id.to_string(),
        n_per_axis: grid.n(),
        box_length: grid.length(),
        dealias_limit: grid.dealias_limit(),
        components: comps.len(),
        layout: "x-fastest".to_string(),
    };
    (header, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(32, 1.0, 15).is_ok());
        assert!(GridSpec::new(32, 1.0, 16).is_err()); // hits Nyquist
        assert!(GridSpec::new(12, 1.0, 3).is_err()); // not a power of two
        assert!(GridSpec::new(2, 1.0, 1).is_err()); // too small
        assert!(GridSpec::new(32, -1.0, 10).is_err());
        assert!(GridSpec::new(32, 1.0, 0).is_err());
    }

    #[test]
    fn signed_modes_cover_half_open_range() {
        let g = GridSpec::new(8, 1.0, 3).unwrap();
        let modes: Vec<i64> = (0..8).map(|m| g.signed_mode(m)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        for m in 0..8 {
            assert_eq!(g.dft_index(g.signed_mode(m)), m);
        }
    }

    #[test]
    fn raw_dump_roundtrip_bytes() {
        let g = GridSpec::new(4, 1.0, 1).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] + 2.0 * x[1]);
        let (h, bytes) = raw_dump("t", &g, &[&f.values]);
        assert_eq!(h.components, 1);
        assert_eq!(bytes.len(), 8 * 64);
        let back = f64::from_le_bytes(bytes[0..8].try_into().unwrap());
        assert_eq!(back, f.values[0]);
    }
}
