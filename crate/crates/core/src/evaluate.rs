//! Per-realization evaluation of a BSS pattern: SINRs under the pattern's
//! active set, re-association, CoMP classification, closed-form scheduling
//! and the resulting user rates.
//!
//! Only the center cluster switches. A [`Snapshot`] therefore keeps the
//! received power from each center sector plus the fixed power from every
//! other sector, which makes evaluating one pattern `O(|V_q| |W_q|)`.

use serde::{Deserialize, Serialize};

use crate::channel::{linear_to_db, ActiveMask, ChannelParams, GainMatrix};
use crate::comp::CompConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{BsId, NetworkLayout, SectorId};
use crate::mcs::McsTable;
use crate::scheduler::{self, SchedulerParams, SchedulingSolution, UserLink};

/// Received powers of the center-cluster users for one fading realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    users: Vec<usize>,
    center: Vec<SectorId>,
    center_bss: Vec<BsId>,
    /// Index into `center_bss` of each center sector.
    bs_index: Vec<usize>,
    /// Row-major `|V_q| × |W_q|` received powers in watts.
    rx: Vec<f64>,
    /// Power from all sectors outside the center cluster plus noise.
    outside: Vec<f64>,
}

impl Snapshot {
    /// Keeps the users whose all-on best sector lies in the center cluster.
    pub fn build(layout: &NetworkLayout, gains: &GainMatrix, channel: &ChannelParams) -> Result<Self> {
        let center = layout.center_sectors();
        let p = channel.per_subchannel_power_w();
        let mut is_center = vec![false; layout.num_sectors()];
        for s in &center {
            is_center[s.0] = true;
        }
        let mut users = Vec::new();
        let mut rx = Vec::new();
        let mut outside = Vec::new();
        for u in 0..gains.num_users() {
            let row = gains.row(u);
            // With every sector on, all SINRs share one total-power term, so
            // the best sector is the one with the largest gain.
            let mut best = 0;
            for (s, &h) in row.iter().enumerate() {
                if h > row[best] {
                    best = s;
                }
            }
            if !is_center[best] {
                continue;
            }
            users.push(u);
            rx.extend(center.iter().map(|s| p * row[s.0]));
            let out: f64 = row
                .iter()
                .enumerate()
                .filter(|(s, _)| !is_center[*s])
                .map(|(_, &h)| p * h)
                .sum();
            outside.push(out + channel.noise_power_w);
        }
        if users.is_empty() {
            return Err(Error::EmptyDrop);
        }
        Self::from_parts(users, center, rx, outside)
    }

    /// Assembles a snapshot from explicit powers. `outside` must already
    /// include the noise power.
    pub fn from_parts(
        users: Vec<usize>,
        center: Vec<SectorId>,
        rx: Vec<f64>,
        outside: Vec<f64>,
    ) -> Result<Self> {
        if center.is_empty() || rx.len() != users.len() * center.len() || outside.len() != users.len() {
            return Err(Error::Channel("snapshot dimensions do not match".into()));
        }
        if users.is_empty() {
            return Err(Error::EmptyDrop);
        }
        let mut center_bss: Vec<BsId> = center.iter().map(|s| s.bs()).collect();
        center_bss.sort();
        center_bss.dedup();
        let bs_index = center
            .iter()
            .map(|s| center_bss.binary_search(&s.bs()).expect("bs collected above"))
            .collect();
        Ok(Snapshot {
            users,
            center,
            center_bss,
            bs_index,
            rx,
            outside,
        })
    }

    /// Indices (into the drop) of the users in `V_q`.
    pub fn users(&self) -> &[usize] {
        &self.users
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn center_sectors(&self) -> &[SectorId] {
        &self.center
    }

    pub fn center_bss(&self) -> &[BsId] {
        &self.center_bss
    }

    pub fn received(&self, user: usize) -> &[f64] {
        let n = self.center.len();
        &self.rx[user * n..(user + 1) * n]
    }

    pub fn outside_plus_noise(&self, user: usize) -> f64 {
        self.outside[user]
    }
}

/// Fixed inputs shared by every pattern evaluation of a campaign point.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub config: &'a CompConfiguration,
    pub scheduler: SchedulerParams,
    pub channel: &'a ChannelParams,
    pub mcs: &'a McsTable,
    pub rate_threshold_bps: f64,
    pub feasibility: Feasibility,
}

/// Which users the rate threshold applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feasibility {
    /// Users in coverage; outage users are reported through coverage only.
    #[default]
    Served,
    /// Every user of the cluster, so a single outage user makes a pattern
    /// infeasible for any `R > 0`.
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternEvaluation {
    /// Scheduled rate `λ_u` of every user in `V_q`, outage users at 0.
    pub rates: Vec<f64>,
    /// Smallest rate over all users.
    pub min_rate: f64,
    /// Smallest rate over users in coverage, 0 when nobody is covered.
    pub min_served_rate: f64,
    pub feasible: bool,
    /// Serving-sector SINR, or the joint SINR for CoMP users (linear).
    pub effective_sinr: Vec<f64>,
    pub covered: Vec<bool>,
    pub solution: SchedulingSolution,
}

impl PatternEvaluation {
    pub fn n_outage(&self) -> usize {
        self.covered.iter().filter(|&&c| !c).count()
    }

    /// Whether every user in scope reaches `rate_bps`.
    pub fn meets(&self, rate_bps: f64, scope: Feasibility) -> bool {
        match scope {
            Feasibility::Served => self.min_served_rate >= rate_bps,
            Feasibility::All => self.min_rate >= rate_bps,
        }
    }
}

/// Evaluates one on/off assignment of the center BSs. `off[i]` refers to
/// `snapshot.center_bss()[i]`.
pub fn evaluate_off_flags(snapshot: &Snapshot, off: &[bool], ctx: &EvalContext<'_>) -> Result<PatternEvaluation> {
    if off.len() != snapshot.center_bss.len() {
        return Err(Error::Pattern(format!(
            "pattern has {} flags but the cluster has {} BSs",
            off.len(),
            snapshot.center_bss.len()
        )));
    }
    let n_bs = snapshot.center_bss.last().map_or(0, |b| b.0 + 1);
    let mut mask = ActiveMask::all_on(n_bs);
    for (i, &o) in off.iter().enumerate() {
        if o {
            mask.switch_off(snapshot.center_bss[i]);
        }
    }
    let n_local = snapshot.center.len();
    let max_sector = snapshot.center.iter().map(|s| s.0 + 1).max().unwrap_or(0);
    let mut local_of = vec![usize::MAX; max_sector];
    for (j, s) in snapshot.center.iter().enumerate() {
        local_of[s.0] = j;
    }
    let active: Vec<bool> = (0..n_local).map(|j| !off[snapshot.bs_index[j]]).collect();

    let n = snapshot.num_users();
    let totals: Vec<f64> = (0..n)
        .map(|u| {
            snapshot
                .received(u)
                .iter()
                .zip(&active)
                .filter(|(_, &a)| a)
                .map(|(&r, _)| r)
                .sum()
        })
        .collect();
    let sinr = |u: usize, j: usize| {
        let r = snapshot.received(u)[j];
        r / (snapshot.outside[u] + (totals[u] - r).max(0.0))
    };

    let serving = scheduler::associate_max_sinr(n, &snapshot.center, &mask, |u, s| sinr(u, local_of[s.0]))?;
    let serving_sinr: Vec<f64> = serving.iter().enumerate().map(|(u, s)| sinr(u, local_of[s.0])).collect();
    let comp = scheduler::classify_comp(&serving, &serving_sinr, ctx.config, ctx.scheduler.gamma_d_db);

    let lookup = ctx.config.sector_lookup(max_sector);
    let mut effective_sinr = serving_sinr.clone();
    for u in (0..n).filter(|&u| comp[u]) {
        let k = lookup[serving[u].0].expect("CoMP users sit in a configured cluster");
        let signal: f64 = ctx.config.clusters()[k]
            .iter()
            .map(|s| local_of[s.0])
            .filter(|&j| active[j])
            .map(|j| snapshot.received(u)[j])
            .sum();
        effective_sinr[u] = signal / (snapshot.outside[u] + (totals[u] - signal).max(0.0));
    }

    let min_db = ctx.mcs.min_threshold_db();
    let mut covered = Vec::with_capacity(n);
    let links: Vec<UserLink> = (0..n)
        .map(|u| {
            let db = linear_to_db(effective_sinr[u]);
            covered.push(db >= min_db);
            UserLink {
                sector: serving[u],
                comp: comp[u],
                rate_bps: ctx.channel.link_rate_bps(ctx.mcs.efficiency(db)),
            }
        })
        .collect();
    let solution = scheduler::schedule(&links, ctx.config, ctx.scheduler.alpha)?;
    let rates = solution.lambda.clone();
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let min_served_rate = rates
        .iter()
        .zip(&covered)
        .filter(|(_, &c)| c)
        .map(|(&r, _)| r)
        .reduce(f64::min)
        .unwrap_or(0.0);
    let mut eval = PatternEvaluation {
        feasible: false,
        min_rate,
        min_served_rate,
        rates,
        effective_sinr,
        covered,
        solution,
    };
    eval.feasible = eval.meets(ctx.rate_threshold_bps, ctx.feasibility);
    Ok(eval)
}
