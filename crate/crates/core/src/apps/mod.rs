//! Application pipelines: seam-aware decimation, remeshing of a surface
//! embedded in a tet mesh, and periodic remeshing of a tile.

mod embedded;
mod periodic;
mod seam;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::Mesh;
use crate::scalar::Scalar;
use crate::scheduler::PassStats;
use crate::simplex::VertexId;

pub use embedded::{embedded_multimesh, embedded_remesh, embedded_scheduler, EmbeddedParams};
pub use periodic::{periodic2d_remesh, periodic_multimesh, periodic_scheduler, tile_congruent, PeriodicParams, Tile};
pub use seam::{seam_decimate, seam_multimesh, seam_scheduler, seam_survivor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    SeamDecimate,
    EmbeddedRemesh,
    Periodic2d,
}

/// Parameters of one pipeline run, as read from a JSON config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub kind: PipelineKind,
    #[serde(default)]
    pub target_faces: Option<usize>,
    #[serde(default)]
    pub target_length: Option<f64>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub envelope_eps: Option<f64>,
    #[serde(default)]
    pub smoothing_weight: Option<f64>,
    #[serde(default)]
    pub period: Option<[f64; 2]>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("pipeline `{kind:?}` requires `{field}`")]
    Missing { kind: PipelineKind, field: &'static str },
    #[error("`{0}` must be positive")]
    NotPositive(&'static str),
}

impl PipelineConfig {
    pub fn new(kind: PipelineKind) -> Self {
        PipelineConfig {
            kind,
            target_faces: None,
            target_length: None,
            iterations: None,
            envelope_eps: None,
            smoothing_weight: None,
            period: None,
            seed: None,
        }
    }

    /// Checks that dimensional parameters are positive and that the
    /// parameters the kind needs are present.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |v: Option<f64>, name| match v {
            Some(x) if !(x > 0.0) => Err(ConfigError::NotPositive(name)),
            _ => Ok(()),
        };
        positive(self.target_length, "target_length")?;
        positive(self.envelope_eps, "envelope_eps")?;
        positive(self.smoothing_weight, "smoothing_weight")?;
        if let Some(p) = self.period {
            positive(Some(p[0].min(p[1])), "period")?;
        }
        if self.iterations == Some(0) {
            return Err(ConfigError::NotPositive("iterations"));
        }
        let need = |present: bool, field| {
            if present {
                Ok(())
            } else {
                Err(ConfigError::Missing { kind: self.kind, field })
            }
        };
        match self.kind {
            PipelineKind::SeamDecimate => need(self.target_faces.is_some(), "target_faces"),
            PipelineKind::EmbeddedRemesh => need(self.target_length.is_some(), "target_length"),
            PipelineKind::Periodic2d => {
                need(self.target_length.is_some(), "target_length")?;
                need(self.period.is_some(), "period")
            }
        }
    }
}

/// Statistics of an isotropic remeshing run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RemeshStats {
    pub iterations: usize,
    pub split: PassStats,
    pub collapse: PassStats,
    pub swap: PassStats,
    pub moves_accepted: usize,
    pub moves_rejected: usize,
}

impl RemeshStats {
    pub fn total(&self) -> PassStats {
        let mut t = self.split;
        t.merge(&self.collapse);
        t.merge(&self.swap);
        t
    }
}

pub(crate) fn edge_length<T: Scalar>(m: &Mesh<T>, a: VertexId, b: VertexId) -> f64 {
    match (m.position(a), m.position(b)) {
        (Some(p), Some(q)) => crate::geometry::dist2(p, q).as_f64().sqrt(),
        _ => f64::NAN,
    }
}

/// Mean length of the edges of a mesh with positions.
pub fn mean_edge_length<T: Scalar>(m: &Mesh<T>) -> f64 {
    let edges = m.edges();
    if edges.is_empty() {
        return 0.0;
    }
    edges.iter().map(|e| edge_length(m, e.vertices()[0], e.vertices()[1])).sum::<f64>() / edges.len() as f64
}

/// Valence excess `Σ (deg - 6)²` around `{a, b}` before and after flipping
/// the edge to `{c, d}`; returns the reduction.
pub(crate) fn flip_gain(deg: [usize; 4], target: [usize; 4]) -> i64 {
    let dev = |d: usize, t: usize| (d as i64 - t as i64).pow(2);
    let before: i64 = (0..4).map(|i| dev(deg[i], target[i])).sum();
    let after = dev(deg[0] - 1, target[0]) + dev(deg[1] - 1, target[1]) + dev(deg[2] + 1, target[2]) + dev(deg[3] + 1, target[3]);
    before - after
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_validation() {
        let text = r#"{"kind":"periodic2d","target_length":0.2,"period":[1.0,1.0],"iterations":3}"#;
        let cfg: PipelineConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.kind, PipelineKind::Periodic2d);
        assert_eq!(cfg.validate(), Ok(()));
        let back: PipelineConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let mut bad = cfg.clone();
        bad.period = None;
        assert!(matches!(bad.validate(), Err(ConfigError::Missing { field: "period", .. })));
        bad = cfg;
        bad.target_length = Some(-1.0);
        assert_eq!(bad.validate(), Err(ConfigError::NotPositive("target_length")));
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"kind":"seam_decimate","bogus":1}"#).is_err());
    }

    #[test]
    fn flip_gain_prefers_regular_valence() {
        assert!(flip_gain([7, 7, 5, 5], [6; 4]) > 0);
        assert!(flip_gain([6, 6, 6, 6], [6; 4]) < 0);
    }
}
