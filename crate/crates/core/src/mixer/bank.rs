use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, SCHEMA_VERSION};
use crate::room::{
    sample_scene_geometry, simulate_rir, AmbisonicRir, MaterialBank, Room, SceneGeometry, SimConfig,
    SourcePlacement,
};
use crate::seed::{stream_rng, Domain};
use crate::sh::Direction;

/// Sources simulated per room.
pub const SOURCES_PER_SCENE: usize = 4;

/// One simulated room: geometry plus one RIR per source.
#[derive(Debug, Clone, PartialEq)]
pub struct BankScene {
    pub index: usize,
    /// Global index of this scene's first RIR.
    pub first_rir: usize,
    pub geometry: SceneGeometry,
    pub rirs: Vec<AmbisonicRir>,
}

impl BankScene {
    pub fn rir_ref(&self, source: usize) -> String {
        format!("rir_{:06}", self.first_rir + source)
    }
}

/// A set of simulated scenes, in memory or loaded from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RirBank {
    pub seed: u64,
    pub config: SimConfig,
    pub scenes: Vec<BankScene>,
}

impl RirBank {
    /// Simulates `count` RIRs grouped into rooms of [`SOURCES_PER_SCENE`]
    /// sources (the last room holds the remainder). Rooms are simulated in
    /// parallel, each from its own counter-derived stream.
    pub fn simulate(count: usize, seed: u64, config: &SimConfig) -> Result<Self> {
        let materials = MaterialBank::presets(config.sample_rate);
        let n_scenes = count.div_ceil(SOURCES_PER_SCENE);
        let scenes = (0..n_scenes)
            .into_par_iter()
            .map(|s| {
                let n_src = SOURCES_PER_SCENE.min(count - s * SOURCES_PER_SCENE);
                let mut rng = stream_rng(seed, Domain::RirScene, s as u64);
                let geometry = sample_scene_geometry(&mut rng, n_src)?;
                let rirs = geometry
                    .sources
                    .iter()
                    .map(|src| {
                        simulate_rir(&geometry.room, src.position, geometry.receiver, config, &materials, &mut rng)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(BankScene {
                    index: s,
                    first_rir: s * SOURCES_PER_SCENE,
                    geometry,
                    rirs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            seed,
            config: config.clone(),
            scenes,
        })
    }

    pub fn rir_count(&self) -> usize {
        self.scenes.iter().map(|s| s.rirs.len()).sum()
    }

    /// Scenes that hold at least `n` sources.
    pub fn complete_scenes(&self, n: usize) -> Vec<&BankScene> {
        self.scenes.iter().filter(|s| s.rirs.len() >= n).collect()
    }

    /// Writes `rir_<index>.wav` + `rir_<index>.json` per RIR and a `manifest.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        io::create_dir(dir)?;
        let mut entries = Vec::with_capacity(self.rir_count());
        for scene in &self.scenes {
            for (k, rir) in scene.rirs.iter().enumerate() {
                let name = scene.rir_ref(k);
                let wav = format!("{name}.wav");
                let sidecar = format!("{name}.json");
                io::write_foa_wav(&dir.join(&wav), rir.signal())?;
                let meta = RirSidecar {
                    schema_version: SCHEMA_VERSION,
                    index: scene.first_rir + k,
                    scene: scene.index,
                    source: k,
                    seed: self.seed,
                    stream: scene.index as u64,
                    sample_rate: rir.sample_rate(),
                    length: rir.len(),
                    room: scene.geometry.room.clone(),
                    receiver: scene.geometry.receiver,
                    sources: scene.geometry.sources.iter().map(SourceRecord::from).collect(),
                };
                io::write_json(&dir.join(&sidecar), &meta)?;
                entries.push(ManifestEntry {
                    index: scene.first_rir + k,
                    scene: scene.index,
                    source: k,
                    wav,
                    sidecar,
                });
            }
        }
        let manifest = BankManifest {
            schema_version: SCHEMA_VERSION,
            seed: self.seed,
            count: self.rir_count(),
            scenes: self.scenes.len(),
            sources_per_scene: SOURCES_PER_SCENE,
            sim: self.config.clone(),
            entries,
        };
        io::write_json(&dir.join("manifest.json"), &manifest)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: BankManifest = io::read_json(&dir.join("manifest.json"))?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(Error::Integrity(format!(
                "RIR manifest schema {} (expected {SCHEMA_VERSION})",
                manifest.schema_version
            )));
        }
        let mut scenes: Vec<BankScene> = Vec::new();
        for entry in &manifest.entries {
            let sidecar: RirSidecar = io::read_json(&dir.join(&entry.sidecar))?;
            let rir = AmbisonicRir::new(io::read_foa_wav(&dir.join(&entry.wav))?);
            match scenes.last_mut() {
                Some(s) if s.index == entry.scene => s.rirs.push(rir),
                _ => {
                    let sources = sidecar
                        .sources
                        .iter()
                        .map(SourcePlacement::try_from)
                        .collect::<Result<Vec<_>>>()?;
                    scenes.push(BankScene {
                        index: entry.scene,
                        first_rir: entry.index - entry.source,
                        geometry: SceneGeometry {
                            room: sidecar.room,
                            receiver: sidecar.receiver,
                            sources,
                        },
                        rirs: vec![rir],
                    });
                }
            }
        }
        Ok(Self {
            seed: manifest.seed,
            config: manifest.sim,
            scenes,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BankManifest {
    pub schema_version: u32,
    pub seed: u64,
    pub count: usize,
    pub scenes: usize,
    pub sources_per_scene: usize,
    pub sim: SimConfig,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub scene: usize,
    pub source: usize,
    pub wav: String,
    pub sidecar: String,
}

/// Per-RIR JSON sidecar.
#[derive(Debug, Serialize, Deserialize)]
pub struct RirSidecar {
    pub schema_version: u32,
    pub index: usize,
    pub scene: usize,
    /// Which of `sources` this RIR belongs to.
    pub source: usize,
    pub seed: u64,
    pub stream: u64,
    pub sample_rate: u32,
    pub length: usize,
    pub room: Room,
    pub receiver: [f64; 3],
    pub sources: Vec<SourceRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SourceRecord {
    pub position: [f64; 3],
    pub distance: f64,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub is_target: bool,
}

impl From<&SourcePlacement> for SourceRecord {
    fn from(s: &SourcePlacement) -> Self {
        Self {
            position: s.position,
            distance: s.distance,
            azimuth_deg: s.direction.azimuth_deg(),
            elevation_deg: s.direction.elevation_deg(),
            is_target: s.is_target,
        }
    }
}

impl TryFrom<&SourceRecord> for SourcePlacement {
    type Error = Error;

    fn try_from(r: &SourceRecord) -> Result<Self> {
        Ok(Self {
            position: r.position,
            distance: r.distance,
            direction: Direction::from_degrees(r.azimuth_deg, r.elevation_deg)?,
            is_target: r.is_target,
        })
    }
}
