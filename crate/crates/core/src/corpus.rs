//! Deterministic test-field corpora described by a JSON manifest.
//!
//! A corpus entry names a generator and its parameters; building the same
//! manifest with the same seeds is bitwise reproducible. Grid-based entries
//! produce manufactured stationary states; analytic entries produce the
//! harmonic-gradient exact solutions, which never touch a grid.

use crate::grid::GridSpec;
use crate::nse::NseState;
use crate::solutions::{
    make_harmonic_gradient, make_random_divfree, make_shear, HarmonicGradientSolution, Poly3,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Unidirectional shear `v = (g(x_dep), 0, 0)`-type; `profile` lists
    /// `(mode, sine amplitude)` pairs.
    Shear {
        profile: Vec<(i64, f64)>,
        axes: (usize, usize),
        nu: f64,
    },
    /// Seeded band-limited divergence-free field with manufactured forcing.
    RandomDivfree {
        seed: u64,
        band: (f64, f64),
        amplitude: f64,
        nu: f64,
    },
    /// Gradient of a harmonic polynomial (analytic, grid-free).
    HarmonicGradient { terms: Vec<((u32, u32, u32), f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub field_id: String,
    pub generator: GeneratorSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub entries: Vec<CorpusEntry>,
}

/// A built corpus item: either a grid state or an analytic solution.
pub enum CorpusItem {
    Grid(Box<NseState>),
    Analytic(Box<HarmonicGradientSolution>),
}

impl CorpusItem {
    pub fn field_id(&self) -> &str {
        match self {
            CorpusItem::Grid(s) => &s.field_id,
            CorpusItem::Analytic(a) => &a.provenance,
        }
    }
}

pub fn build_entry(grid: GridSpec, entry: &CorpusEntry) -> Result<CorpusItem> {
    match &entry.generator {
        GeneratorSpec::Shear { profile, axes, nu } => {
            let mut state = make_shear(grid, profile, *axes, *nu)?;
            state.field_id = entry.field_id.clone();
            Ok(CorpusItem::Grid(Box::new(state)))
        }
        GeneratorSpec::RandomDivfree {
            seed,
            band,
            amplitude,
            nu,
        } => {
            let mut state = make_random_divfree(grid, *seed, *band, *amplitude, *nu)?;
            state.field_id = entry.field_id.clone();
            Ok(CorpusItem::Grid(Box::new(state)))
        }
        GeneratorSpec::HarmonicGradient { terms } => {
            let poly = Poly3::from_terms(terms);
            let sol = make_harmonic_gradient(poly, &entry.field_id)?;
            Ok(CorpusItem::Analytic(Box::new(sol)))
        }
    }
}

pub fn build_corpus(grid: GridSpec, manifest: &CorpusManifest) -> Result<Vec<CorpusItem>> {
    let mut ids = std::collections::BTreeSet::new();
    for e in &manifest.entries {
        if !ids.insert(e.field_id.clone()) {
            return Err(Error::InvalidInput(format!(
                "duplicate field_id {} in corpus manifest",
                e.field_id
            )));
        }
    }
    manifest
        .entries
        .iter()
        .map(|e| build_entry(grid, e))
        .collect()
}

/// The default desk-scale corpus: `n_random` seeded random states, the
/// shear family, and five harmonic-gradient analytic solutions.
pub fn default_manifest(n_random: usize, base_seed: u64) -> CorpusManifest {
    let mut entries = Vec::new();
    let nus = [1.0, 0.5, 2.0];
    for i in 0..n_random {
        entries.push(CorpusEntry {
            field_id: format!("random-{:02}", i + 1),
            generator: GeneratorSpec::RandomDivfree {
                seed: base_seed + i as u64,
                band: (2.0, 5.0),
                amplitude: 1.0,
                nu: nus[i % nus.len()],
            },
        });
    }
    entries.push(CorpusEntry {
        field_id: "shear-sine".to_string(),
        generator: GeneratorSpec::Shear {
            profile: vec![(1, 1.0)],
            axes: (0, 1),
            nu: 1.0,
        },
    });
    entries.push(CorpusEntry {
        field_id: "shear-two-mode".to_string(),
        generator: GeneratorSpec::Shear {
            profile: vec![(1, 1.0), (3, 0.5)],
            axes: (0, 1),
            nu: 0.7,
        },
    });
    entries.push(CorpusEntry {
        field_id: "shear-cross-axis".to_string(),
        generator: GeneratorSpec::Shear {
            profile: vec![(2, 0.8)],
            axes: (2, 0),
            nu: 1.3,
        },
    });
    let harmonics: [(&str, Vec<((u32, u32, u32), f64)>); 5] = [
        ("harmonic-saddle", vec![((2, 0, 0), 1.0), ((0, 2, 0), -1.0)]),
        ("harmonic-xyz", vec![((1, 1, 1), 1.0)]),
        ("harmonic-cubic", vec![((3, 0, 0), 1.0), ((1, 2, 0), -3.0)]),
        ("harmonic-drift", vec![((1, 0, 0), 1.0)]),
        (
            "harmonic-axisymmetric",
            vec![((0, 0, 2), 2.0), ((2, 0, 0), -1.0), ((0, 2, 0), -1.0)],
        ),
    ];
    for (id, terms) in harmonics {
        entries.push(CorpusEntry {
            field_id: id.to_string(),
            generator: GeneratorSpec::HarmonicGradient { terms },
        });
    }
    CorpusManifest { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn manifest_roundtrips_through_json() {
        let m = default_manifest(3, 1);
        let s = serde_json::to_string_pretty(&m).unwrap();
        let back: CorpusManifest = serde_json::from_str(&s).unwrap();
        assert_eq!(back.entries.len(), m.entries.len());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"entries": [{"field_id": "x", "generator": {"kind": "shear",
            "profile": [[1, 1.0]], "axes": [0, 1], "nu": 1.0}, "bogus": 3}]}"#;
        assert!(serde_json::from_str::<CorpusManifest>(bad).is_err());
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut m = default_manifest(2, 1);
        let dup = m.entries[0].clone();
        m.entries.push(dup);
        let g = GridSpec::new(16, TAU, 7).unwrap();
        assert!(build_corpus(g, &m).is_err());
    }

    #[test]
    fn default_corpus_builds_on_a_small_grid() {
        let g = GridSpec::new(16, TAU, 7).unwrap();
        let items = build_corpus(g, &default_manifest(2, 1)).unwrap();
        assert_eq!(items.len(), 2 + 3 + 5);
        let grid_states = items
            .iter()
            .filter(|i| matches!(i, CorpusItem::Grid(_)))
            .count();
        assert_eq!(grid_states, 5);
    }
}
