//! Suite manifest: one JSON document describing the grid, the corpus, the
//! suites to run, tolerance overrides and output paths. Unknown keys are
//! rejected. CLI flags override manifest scalars.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use torus_nse_core::corpus::CorpusManifest;
use torus_nse_core::grid::GridSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub n_per_axis: usize,
    pub box_length: f64,
    pub dealias_limit: usize,
}

impl GridParams {
    pub fn desk_default() -> Self {
        let g = GridSpec::desk_default();
        GridParams {
            n_per_axis: g.n(),
            box_length: g.length(),
            dealias_limit: g.dealias_limit(),
        }
    }

    pub fn build(&self) -> anyhow::Result<GridSpec> {
        Ok(GridSpec::new(
            self.n_per_axis,
            self.box_length,
            self.dealias_limit,
        )?)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identity,
    Certify,
    Bands,
    Bootstrap,
    Units,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identity => "identity",
            Suite::Certify => "certify",
            Suite::Bands => "bands",
            Suite::Bootstrap => "bootstrap",
            Suite::Units => "units",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub reports: Option<String>,
    #[serde(default)]
    pub summary: Option<String>,
    #[serde(default)]
    pub norms: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct SuiteManifest {
    #[serde(default)]
    pub grid: Option<GridParams>,
    #[serde(default)]
    pub corpus: Option<CorpusManifest>,
    #[serde(default)]
    pub suites: Option<Vec<Suite>>,
    /// Per-suite tolerance overrides applied to every hard assertion of the
    /// suite (diagnostics are unaffected).
    #[serde(default)]
    pub tolerance_overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputPaths,
    /// Base seed for the default corpus (ignored when `corpus` is given).
    #[serde(default)]
    pub seed: Option<u64>,
    /// Number of seeded random states in the default corpus.
    #[serde(default)]
    pub random_states: Option<usize>,
}

impl SuiteManifest {
    pub fn from_path(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let manifest: SuiteManifest = serde_json::from_str(&text)?;
        Ok(manifest)
    }

    pub fn selected_suites(&self) -> Vec<Suite> {
        let listed = self.suites.clone().unwrap_or_else(|| vec![Suite::All]);
        if listed.contains(&Suite::All) {
            vec![
                Suite::Identity,
                Suite::Certify,
                Suite::Bands,
                Suite::Bootstrap,
                Suite::Units,
            ]
        } else {
            let mut out = listed;
            out.sort();
            out.dedup();
            out
        }
    }
}
