//! Scenario files and catalog resolution.
//!
//! A scenario names a ray geometry (by key or inline), a generating map or
//! an explicit family, the direction of the dynamics, and optional blocks
//! for the limit-set, orbit and properness analyses. The environment
//! variable `NILGEO_CATALOG_DIR` points at a directory whose `<key>.json`
//! files override the built-in algebra and geometry catalogs.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use nilgeo::dynamics::{ConvexBody, Direction, Family};
use nilgeo::lie::{builtin_algebra, GradedNilpotentAlgebra};
use nilgeo::nilaffine::{builtin_ray_geometry, MapSpec, NilAffineMap, RayGeometry, RayGeometrySpec};
use nilgeo::scalar::{Scalar, ScalarMode};
use nilgeo::{Error, Result};

pub const CATALOG_DIR_ENV: &str = "NILGEO_CATALOG_DIR";

fn catalog_file(key: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(CATALOG_DIR_ENV)?;
    let path = PathBuf::from(dir).join(format!("{key}.json"));
    path.is_file().then_some(path)
}

/// Resolve a nilpotent-algebra key: external catalog first, built-ins second.
pub fn resolve_algebra(key: &str) -> Result<Arc<GradedNilpotentAlgebra>> {
    if let Some(path) = catalog_file(key) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let spec: nilgeo::lie::AlgebraSpec = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        return Ok(Arc::new(GradedNilpotentAlgebra::from_spec(&spec)?));
    }
    builtin_algebra(key)
}

/// Resolve a ray-geometry key the same way.
pub fn resolve_ray_geometry(key: &str) -> Result<RayGeometry> {
    if let Some(path) = catalog_file(key) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let spec: RayGeometrySpec = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        return RayGeometry::from_spec(&spec, &resolve_algebra);
    }
    builtin_ray_geometry(key, ScalarMode::Exact)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeometryRef {
    Key(String),
    Inline(RayGeometrySpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub start: Vec<Scalar>,
    #[serde(default = "default_orbit_budget")]
    pub n_max: usize,
}

fn default_orbit_budget() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeSpec {
    /// Sample base points; seeded points around the orbit start are used
    /// when empty.
    #[serde(default)]
    pub samples: Vec<Vec<Scalar>>,
    #[serde(default = "default_probe_powers")]
    pub powers: usize,
    #[serde(default = "default_witness_budget")]
    pub witness_budget: usize,
}

fn default_probe_powers() -> usize {
    40
}

fn default_witness_budget() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Budgets {
    #[serde(default = "default_j_max")]
    pub j_max: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_j_max() -> usize {
    60
}

fn default_samples() -> usize {
    100
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { j_max: default_j_max(), samples: default_samples() }
    }
}

/// A dynamics scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub ray_geometry: GeometryRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<MapSpec>,
    /// Explicit maps `T_{j,0}` for `j = 1..`, when no single generator fits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<MapSpec>>,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<ConvexBody>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSpec>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn geometry(&self) -> Result<RayGeometry> {
        match &self.ray_geometry {
            GeometryRef::Key(key) => resolve_ray_geometry(key),
            GeometryRef::Inline(spec) => RayGeometry::from_spec(spec, &resolve_algebra),
        }
    }

    /// Build the cocycle exactly as declared in the file.
    pub fn cocycle(&self, geometry: &RayGeometry) -> Result<nilgeo::dynamics::Cocycle> {
        let alg = geometry.algebra().clone();
        match (&self.generator, &self.family) {
            (Some(gen), None) => {
                let generator = NilAffineMap::from_spec(alg, gen)?;
                Ok(nilgeo::dynamics::Cocycle::power(geometry.clone(), generator))
            }
            (None, Some(specs)) if !specs.is_empty() => {
                // entries are T_{j,0}; fill the table with T_{ji} = T_{j0} T_{i0}^{-1}
                let mut base: Vec<NilAffineMap> = Vec::with_capacity(specs.len());
                for spec in specs {
                    base.push(NilAffineMap::from_spec(alg.clone(), spec)?);
                }
                let size = base.len();
                let mut maps = BTreeMap::new();
                for j in 1..=size {
                    for i in 0..j {
                        let t = if i == 0 {
                            base[j - 1].clone()
                        } else {
                            base[j - 1].compose(&base[i - 1].invert()?)?
                        };
                        maps.insert((j, i), t);
                    }
                }
                Ok(nilgeo::dynamics::Cocycle {
                    geometry: geometry.clone(),
                    family: Family::Table { size, maps },
                })
            }
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "scenario declares both a generator and a family".into(),
            )),
            _ => Err(Error::InvalidInput(
                "scenario needs a generator or a nonempty family".into(),
            )),
        }
    }
}
