//! Link budget, channel gains and SINR.
//!
//! All SINR arithmetic is done on linear powers. Decibels appear only at the
//! boundaries (path loss, antenna pattern, shadowing, MCS thresholds).

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BsId, NetworkLayout, Point, SectorId, SECTORS_PER_BS};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    pub p_bs_dbm: f64,
    pub num_subchannels: usize,
    /// Noise power per subchannel in watts.
    pub noise_power_w: f64,
    pub penetration_loss_db: f64,
    pub user_antenna_gain_dbi: f64,
    pub shadowing_std_db: f64,
    pub pl_intercept_db: f64,
    pub pl_slope_db: f64,
    pub subcarriers_per_subchannel: usize,
    pub symbols_per_subcarrier: usize,
    pub subframe_s: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            p_bs_dbm: 46.0,
            num_subchannels: 99,
            noise_power_w: 2.2661e-15,
            penetration_loss_db: 20.0,
            user_antenna_gain_dbi: 0.0,
            shadowing_std_db: 8.0,
            pl_intercept_db: 136.8245,
            pl_slope_db: 39.086,
            subcarriers_per_subchannel: 12,
            symbols_per_subcarrier: 14,
            subframe_s: 1e-3,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Sector antenna directivity in dB for an offset angle in degrees.
pub fn directivity_gain_db(offset_deg: f64) -> f64 {
    25.0 - (12.0 * (offset_deg / 70.0).powi(2)).min(20.0)
}

/// Linear channel gain from its decibel components.
pub fn channel_gain(
    path_loss_db: f64,
    antenna_gain_db: f64,
    user_gain_dbi: f64,
    penetration_db: f64,
    shadowing_db: f64,
) -> f64 {
    db_to_linear(-path_loss_db + antenna_gain_db + user_gain_dbi - penetration_db - shadowing_db)
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("noise_power_w", self.noise_power_w),
            ("subframe_s", self.subframe_s),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Channel(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.p_bs_dbm.is_finite() {
            return Err(Error::Channel("p_bs_dbm must be finite".into()));
        }
        if self.num_subchannels == 0
            || self.subcarriers_per_subchannel == 0
            || self.symbols_per_subcarrier == 0
        {
            return Err(Error::Channel("subchannel dimensions must be at least 1".into()));
        }
        if !(self.shadowing_std_db.is_finite() && self.shadowing_std_db >= 0.0) {
            return Err(Error::Channel("shadowing_std_db must be non-negative".into()));
        }
        Ok(())
    }

    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        self.pl_intercept_db + self.pl_slope_db * (distance_m.log10() - 3.0)
    }

    /// Power per sector per subchannel: the BS budget split over three
    /// sectors and all subchannels.
    pub fn per_subchannel_power_w(&self) -> f64 {
        dbm_to_watts(self.p_bs_dbm) / (SECTORS_PER_BS * self.num_subchannels) as f64
    }

    /// Link rate in bit/s for a spectral efficiency in bits/symbol.
    pub fn link_rate_bps(&self, efficiency: f64) -> f64 {
        efficiency
            * (self.subcarriers_per_subchannel * self.symbols_per_subcarrier * self.num_subchannels)
                as f64
            / self.subframe_s
    }
}

/// Fading-independent part of every user-sector link gain, in dB.
#[derive(Debug, Clone)]
pub struct MeanGains {
    n_sectors: usize,
    gain_db: Vec<f64>,
}

impl MeanGains {
    pub fn compute(layout: &NetworkLayout, params: &ChannelParams, users: &[Point]) -> Self {
        let n_sectors = layout.num_sectors();
        let mut gain_db = Vec::with_capacity(users.len() * n_sectors);
        for &u in users {
            for b in 0..layout.num_bs() {
                let bs = BsId(b);
                let (image, d) = layout.nearest_image(bs, u);
                let d = d.max(crate::geometry::MIN_LINK_DISTANCE_M);
                let pl = params.path_loss_db(d);
                let bearing = image.bearing_to(u);
                for s in bs.sectors() {
                    let offset =
                        crate::geometry::wrap_degrees(bearing - layout.sector_boresight(s));
                    gain_db.push(
                        -pl + directivity_gain_db(offset) + params.user_antenna_gain_dbi
                            - params.penetration_loss_db,
                    );
                }
            }
        }
        MeanGains { n_sectors, gain_db }
    }

    pub fn num_users(&self) -> usize {
        self.gain_db.len() / self.n_sectors.max(1)
    }

    pub fn num_sectors(&self) -> usize {
        self.n_sectors
    }
}

/// Linear channel gains `h[u][s]` for one fading realization.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    n_users: usize,
    n_sectors: usize,
    h: Vec<f64>,
    seed: Option<u64>,
}

impl GainMatrix {
    /// Draws i.i.d. log-normal shadowing on every link.
    pub fn draw(mean: &MeanGains, params: &ChannelParams, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let normal = Normal::new(0.0, params.shadowing_std_db)
            .expect("shadowing std validated as finite and non-negative");
        let h = mean
            .gain_db
            .iter()
            .map(|&g| db_to_linear(g - normal.sample(&mut rng)))
            .collect();
        GainMatrix {
            n_users: mean.num_users(),
            n_sectors: mean.n_sectors,
            h,
            seed: Some(seed),
        }
    }

    /// Wraps explicit linear gains, row-major `users × sectors`.
    pub fn from_linear(n_users: usize, n_sectors: usize, h: Vec<f64>) -> Result<Self> {
        if h.len() != n_users * n_sectors {
            return Err(Error::Channel(format!(
                "gain matrix needs {} entries, got {}",
                n_users * n_sectors,
                h.len()
            )));
        }
        if let Some(bad) = h.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::Channel(format!("gains must be positive and finite, got {bad}")));
        }
        Ok(GainMatrix {
            n_users,
            n_sectors,
            h,
            seed: None,
        })
    }

    pub fn num_users(&self) -> usize {
        self.n_users
    }

    pub fn num_sectors(&self) -> usize {
        self.n_sectors
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn get(&self, user: usize, sector: SectorId) -> f64 {
        self.h[user * self.n_sectors + sector.0]
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.h[user * self.n_sectors..(user + 1) * self.n_sectors]
    }
}

/// On/off state of every BS in the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveMask(Vec<bool>);

impl ActiveMask {
    pub fn all_on(num_bs: usize) -> Self {
        ActiveMask(vec![true; num_bs])
    }

    pub fn switch_off(&mut self, bs: BsId) {
        self.0[bs.0] = false;
    }

    pub fn is_on(&self, bs: BsId) -> bool {
        self.0[bs.0]
    }

    pub fn sector_on(&self, sector: SectorId) -> bool {
        self.0[sector.bs().0]
    }

    pub fn any_on(&self) -> bool {
        self.0.iter().any(|&b| b)
    }
}

/// SINR of a user served by a single sector, interference summed over every
/// other active sector of the field.
pub fn sinr_single(
    gains: &GainMatrix,
    params: &ChannelParams,
    active: &ActiveMask,
    user: usize,
    sector: SectorId,
) -> Result<f64> {
    if !active.sector_on(sector) {
        return Err(Error::InactiveSector {
            sector: sector.label(),
            bs: sector.bs().label(),
        });
    }
    sinr_comp(gains, params, active, user, &[sector])
}

/// Joint-transmission SINR: received powers of the active sectors in
/// `cluster` add up, everything else active is interference.
pub fn sinr_comp(
    gains: &GainMatrix,
    params: &ChannelParams,
    active: &ActiveMask,
    user: usize,
    cluster: &[SectorId],
) -> Result<f64> {
    if !cluster.iter().any(|&s| active.sector_on(s)) {
        return Err(Error::NoActiveSector);
    }
    let p = params.per_subchannel_power_w();
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (s, &h) in gains.row(user).iter().enumerate() {
        let sector = SectorId(s);
        if !active.sector_on(sector) {
            continue;
        }
        if cluster.contains(&sector) {
            signal += p * h;
        } else {
            interference += p * h;
        }
    }
    Ok(signal / (interference + params.noise_power_w))
}
