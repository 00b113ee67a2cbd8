//! Partitions of the center cluster's sectors into virtual CoMP clusters.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SectorId;

const C2_FILE: &str = include_str!("../data/c2.toml");
const C3_FILE: &str = include_str!("../data/c3.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    C1,
    C2,
    C3,
    #[serde(rename = "none")]
    NoComp,
    Custom,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::C1 => "C1",
            Preset::C2 => "C2",
            Preset::C3 => "C3",
            Preset::NoComp => "none",
            Preset::Custom => "custom",
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterFile {
    #[serde(default)]
    name: Option<String>,
    clusters: Vec<Vec<usize>>,
}

/// Virtual clusters `S_k` covering every center sector exactly once.
#[derive(Debug, Clone, PartialEq)]
pub struct CompConfiguration {
    preset: Preset,
    name: String,
    clusters: Vec<Vec<SectorId>>,
}

impl CompConfiguration {
    /// Builds a configuration over `center_sectors`. Sectors not named in
    /// `groups` become singleton clusters.
    pub fn new(
        preset: Preset,
        name: impl Into<String>,
        groups: Vec<Vec<SectorId>>,
        center_sectors: &[SectorId],
    ) -> Result<Self> {
        let allowed: HashSet<SectorId> = center_sectors.iter().copied().collect();
        let mut seen = HashSet::new();
        for g in &groups {
            if g.is_empty() {
                return Err(Error::CompConfig("empty virtual cluster".into()));
            }
            for s in g {
                if !allowed.contains(s) {
                    return Err(Error::CompConfig(format!(
                        "sector {s} is not in the center cluster"
                    )));
                }
                if !seen.insert(*s) {
                    return Err(Error::CompConfig(format!("sector {s} appears twice")));
                }
            }
        }
        let mut clusters: Vec<Vec<SectorId>> = groups
            .into_iter()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        clusters.extend(
            center_sectors
                .iter()
                .filter(|s| !seen.contains(s))
                .map(|&s| vec![s]),
        );
        Ok(CompConfiguration {
            preset,
            name: name.into(),
            clusters,
        })
    }

    /// Every sector on its own: no CoMP at all.
    pub fn no_comp(center_sectors: &[SectorId]) -> Self {
        CompConfiguration::new(Preset::NoComp, "none", Vec::new(), center_sectors)
            .expect("singletons always form a partition")
    }

    /// Sectors sharing the same boresight are grouped together, giving
    /// three virtual clusters of one sector per BS.
    pub fn c1(center_sectors: &[SectorId]) -> Self {
        let groups = (0..3)
            .map(|o| {
                center_sectors
                    .iter()
                    .copied()
                    .filter(|s| s.local_index() == o)
                    .collect()
            })
            .collect();
        CompConfiguration::new(Preset::C1, "C1", groups, center_sectors)
            .expect("orientation groups always form a partition")
    }

    pub fn c2(center_sectors: &[SectorId]) -> Result<Self> {
        Self::from_toml_str(C2_FILE, Preset::C2, "C2", center_sectors)
    }

    pub fn c3(center_sectors: &[SectorId]) -> Result<Self> {
        Self::from_toml_str(C3_FILE, Preset::C3, "C3", center_sectors)
    }

    pub fn from_preset(preset: Preset, center_sectors: &[SectorId]) -> Result<Self> {
        match preset {
            Preset::C1 => Ok(Self::c1(center_sectors)),
            Preset::C2 => Self::c2(center_sectors),
            Preset::C3 => Self::c3(center_sectors),
            Preset::NoComp => Ok(Self::no_comp(center_sectors)),
            Preset::Custom => Err(Error::CompConfig("custom configurations need a file".into())),
        }
    }

    /// Parses `clusters = [[..], ..]` with 1-based sector labels.
    pub fn from_toml_str(
        text: &str,
        preset: Preset,
        name: &str,
        center_sectors: &[SectorId],
    ) -> Result<Self> {
        let file: ClusterFile =
            toml::from_str(text).map_err(|e| Error::CompConfig(e.to_string()))?;
        let groups = file
            .clusters
            .into_iter()
            .map(|g| {
                g.into_iter()
                    .map(|l| {
                        SectorId::from_label(l)
                            .ok_or_else(|| Error::CompConfig("sector labels start at 1".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CompConfiguration::new(preset, file.name.unwrap_or_else(|| name.to_string()), groups, center_sectors)
    }

    /// Resolves `C1`, `C2`, `C3`, `none` (case-insensitive) or a file path.
    pub fn load(spec: &str, center_sectors: &[SectorId]) -> Result<Self> {
        match spec.to_ascii_lowercase().as_str() {
            "c1" => Self::from_preset(Preset::C1, center_sectors),
            "c2" => Self::from_preset(Preset::C2, center_sectors),
            "c3" => Self::from_preset(Preset::C3, center_sectors),
            "none" => Self::from_preset(Preset::NoComp, center_sectors),
            _ => {
                let path = Path::new(spec);
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| spec.to_string());
                Self::from_toml_str(&text, Preset::Custom, &name, center_sectors)
            }
        }
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn clusters(&self) -> &[Vec<SectorId>] {
        &self.clusters
    }

    pub fn is_joint(&self, k: usize) -> bool {
        self.clusters[k].len() > 1
    }

    /// Virtual-cluster index of every sector, `None` outside the center cluster.
    pub fn sector_lookup(&self, num_sectors: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; num_sectors];
        for (k, c) in self.clusters.iter().enumerate() {
            for s in c {
                if s.0 < num_sectors {
                    out[s.0] = Some(k);
                }
            }
        }
        out
    }
}
