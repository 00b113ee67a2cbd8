//! Monte-Carlo sweeps: configuration, the drop/fading loop and result export.
//!
//! Every (density, drop, fading) realization draws its randomness from a
//! substream of the master seed, so results do not depend on thread count
//! or on which other sweep points are present.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bss::{energy_saving, heuristic_select, PatternList};
use crate::channel::{ChannelParams, GainMatrix, MeanGains};
use crate::comp::CompConfiguration;
use crate::error::{Error, Result};
use crate::evaluate::{evaluate_off_flags, EvalContext, Feasibility, PatternEvaluation, Snapshot};
use crate::geometry::{build_layout, drop_users, LayoutConfig, NetworkLayout};
use crate::mcs::McsTable;
use crate::metrics::{self, aggregate, Summary};
use crate::par::{self, Execution};
use crate::scheduler::SchedulerParams;
use crate::seed;

pub const DESK_DROPS: usize = 50;
pub const DESK_FADING: usize = 10;
pub const FULL_DROPS: usize = 500;
pub const FULL_FADING: usize = 50;

/// Label of the pseudo-pattern row holding the heuristic's choice.
pub const HEURISTIC_LABEL: &str = "heuristic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub densities_per_km2: Vec<f64>,
    pub n_drops: usize,
    pub n_fading: usize,
    pub alphas: Vec<f64>,
    pub gamma_d_db: Vec<f64>,
    /// Admissible range `[ξ_min, ξ_max]` for the CoMP threshold.
    pub gamma_d_range_db: [f64; 2],
    pub rate_thresholds_bps: Vec<f64>,
    pub feasibility: Feasibility,
    /// Preset names (`C1`, `C2`, `C3`, `none`) or paths to cluster files.
    pub comp: Vec<String>,
    pub patterns: Option<PathBuf>,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub figure: Option<String>,
    /// Density per time step for the traffic-profile run.
    pub traffic_profile: Vec<f64>,
    pub mcs_table: Option<PathBuf>,
    pub layout: LayoutConfig,
    pub channel: ChannelParams,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            densities_per_km2: vec![60.0],
            n_drops: DESK_DROPS,
            n_fading: DESK_FADING,
            alphas: vec![1.0],
            gamma_d_db: vec![-1.0],
            gamma_d_range_db: [-6.5, 10.0],
            rate_thresholds_bps: vec![0.2e6],
            feasibility: Feasibility::Served,
            comp: vec!["none".into(), "C1".into(), "C2".into(), "C3".into()],
            patterns: None,
            master_seed: 1,
            output: None,
            format: OutputFormat::Csv,
            figure: None,
            traffic_profile: Vec::new(),
            mcs_table: None,
            layout: LayoutConfig::default(),
            channel: ChannelParams::default(),
        }
    }
}

impl CampaignConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::Config(format!("`{name}` must not be empty")))
            } else {
                Ok(())
            }
        };
        nonempty("densities_per_km2", self.densities_per_km2.len())?;
        nonempty("alphas", self.alphas.len())?;
        nonempty("gamma_d_db", self.gamma_d_db.len())?;
        nonempty("rate_thresholds_bps", self.rate_thresholds_bps.len())?;
        nonempty("comp", self.comp.len())?;
        if self.n_drops == 0 || self.n_fading == 0 {
            return Err(Error::Config("n_drops and n_fading must be at least 1".into()));
        }
        for &mu in self.densities_per_km2.iter().chain(&self.traffic_profile) {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(Error::Config(format!("densities must be positive, got {mu}")));
            }
        }
        for &a in &self.alphas {
            SchedulerParams::new(a, 0.0)?;
        }
        let [lo, hi] = self.gamma_d_range_db;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Config("gamma_d_range_db must be [min, max]".into()));
        }
        for &g in &self.gamma_d_db {
            if !(lo..=hi).contains(&g) {
                return Err(Error::Config(format!(
                    "gamma_d {g} dB lies outside [{lo}, {hi}] dB"
                )));
            }
        }
        for &r in &self.rate_thresholds_bps {
            if r.is_nan() || r < 0.0 {
                return Err(Error::Config(format!("rate thresholds must be >= 0, got {r}")));
            }
        }
        self.layout.validate()?;
        self.channel.validate()?;
        Ok(())
    }
}

/// A validated campaign with every input resolved.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub config: CampaignConfig,
    pub layout: NetworkLayout,
    pub comp: Vec<CompConfiguration>,
    pub patterns: PatternList,
    pub mcs: McsTable,
    pub execution: Execution,
}

impl Campaign {
    pub fn new(config: CampaignConfig) -> Result<Self> {
        config.validate()?;
        let layout = build_layout(&config.layout)?;
        let center = layout.center_sectors();
        let comp = config
            .comp
            .iter()
            .map(|c| CompConfiguration::load(c, &center))
            .collect::<Result<Vec<_>>>()?;
        let patterns = match &config.patterns {
            Some(p) => PatternList::load(p)?,
            None => PatternList::default(),
        };
        if patterns.cluster_size() != layout.cluster_size() {
            return Err(Error::Pattern(format!(
                "patterns have {} flags but the cluster has {} BSs",
                patterns.cluster_size(),
                layout.cluster_size()
            )));
        }
        let mcs = match &config.mcs_table {
            Some(p) => McsTable::from_csv(File::open(p).map_err(|e| Error::io(p, e))?)?,
            None => McsTable::default(),
        };
        Ok(Campaign {
            config,
            layout,
            comp,
            patterns,
            mcs,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Rows in output order: density, configuration, Γ_d, α, R, then the
    /// patterns followed by the heuristic row.
    pub fn row_keys(&self) -> Vec<RowKey> {
        let c = &self.config;
        let mut keys = Vec::new();
        for &density in &c.densities_per_km2 {
            for comp in 0..self.comp.len() {
                for &gamma_d_db in &c.gamma_d_db {
                    for &alpha in &c.alphas {
                        for &rate in &c.rate_thresholds_bps {
                            for pattern in 0..=self.patterns.len() {
                                keys.push(RowKey {
                                    density_per_km2: density,
                                    comp,
                                    gamma_d_db,
                                    alpha,
                                    rate_threshold_bps: rate,
                                    pattern: (pattern < self.patterns.len()).then_some(pattern),
                                });
                            }
                        }
                    }
                }
            }
        }
        keys
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowKey {
    pub density_per_km2: f64,
    pub comp: usize,
    pub gamma_d_db: f64,
    pub alpha: f64,
    pub rate_threshold_bps: f64,
    /// `None` marks the heuristic row.
    pub pattern: Option<usize>,
}

/// Metrics of one drop, averaged over its fading realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DropStats {
    pub t_alpha: f64,
    pub sinr_coverage: f64,
    pub rate_coverage: f64,
    pub energy_saving: f64,
    pub theta_star: f64,
    pub feasible: f64,
    pub a1: f64,
    pub n_users: f64,
    pub n_outage: f64,
}

#[derive(Default)]
struct Acc {
    n: usize,
    t_alpha: (f64, usize),
    theta: (f64, usize),
    sinr_coverage: f64,
    rate_coverage: f64,
    energy: f64,
    feasible: f64,
    a1: f64,
    users: f64,
    outage: f64,
}

impl Acc {
    #[allow(clippy::too_many_arguments)]
    fn add(&mut self, eval: &PatternEvaluation, comp: &CompConfiguration, key: &RowKey, a1: usize, a2: usize, feasible: bool, min_sinr_db: f64) {
        self.n += 1;
        if let Some(t) = metrics::alpha_fair_throughput(&eval.rates, key.alpha) {
            self.t_alpha.0 += t;
            self.t_alpha.1 += 1;
        }
        if let Some(th) = mean_joint_theta(eval, comp) {
            self.theta.0 += th;
            self.theta.1 += 1;
        }
        self.sinr_coverage += metrics::sinr_coverage(&eval.effective_sinr, min_sinr_db);
        self.rate_coverage += metrics::rate_coverage(&eval.rates, key.rate_threshold_bps);
        self.energy += a1 as f64 / a2 as f64 * 100.0;
        self.feasible += f64::from(u8::from(feasible));
        self.a1 += a1 as f64;
        self.users += eval.rates.len() as f64;
        self.outage += eval.n_outage() as f64;
    }

    fn finish(&self) -> Option<DropStats> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        let ratio = |(s, k): (f64, usize)| if k == 0 { f64::NAN } else { s / k as f64 };
        Some(DropStats {
            t_alpha: ratio(self.t_alpha),
            sinr_coverage: self.sinr_coverage / n,
            rate_coverage: self.rate_coverage / n,
            energy_saving: self.energy / n,
            theta_star: ratio(self.theta),
            feasible: self.feasible / n,
            a1: self.a1 / n,
            n_users: self.users / n,
            n_outage: self.outage / n,
        })
    }
}

/// Mean `θ*` over the multi-sector virtual clusters that serve anyone.
pub fn mean_joint_theta(eval: &PatternEvaluation, comp: &CompConfiguration) -> Option<f64> {
    let s = &eval.solution;
    let v: Vec<f64> = (0..s.theta.len())
        .filter(|&k| comp.is_joint(k) && s.n_comp[k] + s.n_noncomp[k] > 0)
        .map(|k| s.theta[k])
        .collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn drop_seed(master: u64, density: f64, drop: usize) -> u64 {
    seed::derive(master, &[seed::DROP_STREAM, density.to_bits(), drop as u64])
}

fn fading_seed(master: u64, density: f64, drop: usize, fading: usize) -> u64 {
    seed::derive(
        master,
        &[seed::FADING_STREAM, density.to_bits(), drop as u64, fading as u64],
    )
}

/// Center-cluster snapshots of every fading realization of one drop. Empty
/// realizations are skipped.
pub fn drop_snapshots(campaign: &Campaign, density: f64, drop: usize, n_fading: usize) -> Result<Vec<Snapshot>> {
    let c = &campaign.config;
    let users = drop_users(&campaign.layout, density, drop_seed(c.master_seed, density, drop))?;
    let mean = MeanGains::compute(&campaign.layout, &c.channel, &users.positions);
    let mut out = Vec::with_capacity(n_fading);
    for f in 0..n_fading {
        let gains = GainMatrix::draw(&mean, &c.channel, fading_seed(c.master_seed, density, drop, f));
        match Snapshot::build(&campaign.layout, &gains, &c.channel) {
            Ok(s) => out.push(s),
            Err(Error::EmptyDrop) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Per-drop statistics for every key with the given density.
fn run_drop(campaign: &Campaign, keys: &[RowKey], density: f64, drop: usize) -> Result<Vec<Option<DropStats>>> {
    let c = &campaign.config;
    let snaps = drop_snapshots(campaign, density, drop, c.n_fading)?;
    let a2 = campaign.patterns.cluster_size();
    let min_db = campaign.mcs.min_threshold_db();
    let mut accs: Vec<Acc> = keys.iter().map(|_| Acc::default()).collect();
    for snap in &snaps {
        // Evaluations depend on (config, Γ_d, α, pattern) but not on R.
        let mut cache: Vec<(usize, u64, u64, Vec<PatternEvaluation>)> = Vec::new();
        for (key, acc) in keys.iter().zip(accs.iter_mut()) {
            let comp = &campaign.comp[key.comp];
            let ctx = EvalContext {
                config: comp,
                scheduler: SchedulerParams::new(key.alpha, key.gamma_d_db)?,
                channel: &c.channel,
                mcs: &campaign.mcs,
                rate_threshold_bps: key.rate_threshold_bps,
                feasibility: c.feasibility,
            };
            match key.pattern {
                Some(j) => {
                    let id = (key.comp, key.gamma_d_db.to_bits(), key.alpha.to_bits());
                    let pos = match cache.iter().position(|e| (e.0, e.1, e.2) == id) {
                        Some(p) => p,
                        None => {
                            let evals = campaign
                                .patterns
                                .patterns()
                                .iter()
                                .map(|p| evaluate_off_flags(snap, p.off_flags(), &ctx))
                                .collect::<Result<Vec<_>>>()?;
                            cache.push((id.0, id.1, id.2, evals));
                            cache.len() - 1
                        }
                    };
                    let eval = &cache[pos].3[j];
                    let pattern = &campaign.patterns.patterns()[j];
                    let feasible = eval.meets(key.rate_threshold_bps, c.feasibility);
                    acc.add(eval, comp, key, pattern.a1(), a2, feasible, min_db);
                }
                None => {
                    let h = heuristic_select(&campaign.patterns, snap, &ctx)?;
                    acc.add(&h.evaluation, comp, key, h.selected.a1(), a2, h.feasible, min_db);
                }
            }
        }
    }
    Ok(accs.iter().map(Acc::finish).collect())
}

/// One tidy output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub config: String,
    pub pattern: String,
    pub a1: f64,
    pub gamma_d_db: f64,
    pub alpha: f64,
    pub rate_threshold_bps: f64,
    pub density_per_km2: f64,
    pub n_drops: usize,
    pub energy_saving_pct: f64,
    pub t_alpha_mean: f64,
    pub t_alpha_ci_low: f64,
    pub t_alpha_ci_high: f64,
    pub sinr_coverage_mean: f64,
    pub sinr_coverage_ci_low: f64,
    pub sinr_coverage_ci_high: f64,
    pub rate_coverage_mean: f64,
    pub rate_coverage_ci_low: f64,
    pub rate_coverage_ci_high: f64,
    pub theta_star_mean: f64,
    pub theta_star_ci_low: f64,
    pub theta_star_ci_high: f64,
    pub feasible_fraction: f64,
    pub users_mean: f64,
    pub outage_mean: f64,
}

/// Traffic-profile output: the heuristic's choice at each time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub step: usize,
    pub density_per_km2: f64,
    pub a1: f64,
    pub energy_saving_pct: f64,
    pub t_alpha: f64,
    pub feasible_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct CampaignResults {
    pub keys: Vec<RowKey>,
    pub rows: Vec<ResultRow>,
    /// Per row, one entry per drop (`None` for drops without center users).
    pub samples: Vec<Vec<Option<DropStats>>>,
    pub profile: Vec<ProfileRow>,
}

impl CampaignResults {
    /// Index of the row matching the given labels.
    pub fn find(&self, config: &str, pattern: &str, gamma_d_db: f64, alpha: f64, rate: f64, density: f64) -> Option<usize> {
        self.rows.iter().position(|r| {
            r.config == config
                && r.pattern == pattern
                && r.gamma_d_db == gamma_d_db
                && r.alpha == alpha
                && r.rate_threshold_bps == rate
                && r.density_per_km2 == density
        })
    }

    /// Per-drop values of one metric for two rows, restricted to drops
    /// where both are defined.
    pub fn paired(&self, a: usize, b: usize, metric: impl Fn(&DropStats) -> f64) -> Vec<(f64, f64)> {
        self.samples[a]
            .iter()
            .zip(&self.samples[b])
            .filter_map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => Some((metric(x), metric(y))),
                _ => None,
            })
            .filter(|(x, y)| !x.is_nan() && !y.is_nan())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.rows)?;
        Ok(())
    }

    pub fn write_profile_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.profile {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

fn summarize(samples: &[Option<DropStats>], metric: impl Fn(&DropStats) -> f64) -> Summary {
    let v: Vec<f64> = samples.iter().flatten().map(metric).collect();
    aggregate(&v)
}

pub fn run_campaign(campaign: &Campaign) -> Result<CampaignResults> {
    let c = &campaign.config;
    let keys = campaign.row_keys();
    let densities = &c.densities_per_km2;
    let per_density = keys.len() / densities.len();

    let jobs = densities.len() * c.n_drops;
    let per_drop = par::map_indexed(campaign.execution, jobs, |i| {
        let m = i / c.n_drops;
        let d = i % c.n_drops;
        let ks = &keys[m * per_density..(m + 1) * per_density];
        run_drop(campaign, ks, densities[m], d)
    });

    let mut samples: Vec<Vec<Option<DropStats>>> = vec![Vec::with_capacity(c.n_drops); keys.len()];
    for (i, res) in per_drop.into_iter().enumerate() {
        let m = i / c.n_drops;
        for (j, s) in res?.into_iter().enumerate() {
            samples[m * per_density + j].push(s);
        }
    }

    let rows = keys
        .iter()
        .zip(&samples)
        .map(|(k, s)| {
            let t = summarize(s, |d| d.t_alpha);
            let sc = summarize(s, |d| d.sinr_coverage);
            let rc = summarize(s, |d| d.rate_coverage);
            let th = summarize(s, |d| d.theta_star);
            let (pattern, a1, energy) = match k.pattern {
                Some(j) => {
                    let p = &campaign.patterns.patterns()[j];
                    (p.label().to_string(), p.a1() as f64, energy_saving(p))
                }
                None => (
                    HEURISTIC_LABEL.to_string(),
                    summarize(s, |d| d.a1).mean,
                    summarize(s, |d| d.energy_saving).mean,
                ),
            };
            ResultRow {
                config: campaign.comp[k.comp].name().to_string(),
                pattern,
                a1,
                gamma_d_db: k.gamma_d_db,
                alpha: k.alpha,
                rate_threshold_bps: k.rate_threshold_bps,
                density_per_km2: k.density_per_km2,
                n_drops: s.iter().flatten().count(),
                energy_saving_pct: energy,
                t_alpha_mean: t.mean,
                t_alpha_ci_low: t.ci_low,
                t_alpha_ci_high: t.ci_high,
                sinr_coverage_mean: sc.mean,
                sinr_coverage_ci_low: sc.ci_low,
                sinr_coverage_ci_high: sc.ci_high,
                rate_coverage_mean: rc.mean,
                rate_coverage_ci_low: rc.ci_low,
                rate_coverage_ci_high: rc.ci_high,
                theta_star_mean: th.mean,
                theta_star_ci_low: th.ci_low,
                theta_star_ci_high: th.ci_high,
                feasible_fraction: summarize(s, |d| d.feasible).mean,
                users_mean: summarize(s, |d| d.n_users).mean,
                outage_mean: summarize(s, |d| d.n_outage).mean,
            }
        })
        .collect();

    let profile = run_profile(campaign)?;
    Ok(CampaignResults {
        keys,
        rows,
        samples,
        profile,
    })
}

/// Runs the heuristic once per drop at each step of the traffic profile,
/// using the first configuration, Γ_d, α and R of the sweep.
fn run_profile(campaign: &Campaign) -> Result<Vec<ProfileRow>> {
    let c = &campaign.config;
    if c.traffic_profile.is_empty() {
        return Ok(Vec::new());
    }
    let comp = &campaign.comp[0];
    let ctx = EvalContext {
        config: comp,
        scheduler: SchedulerParams::new(c.alphas[0], c.gamma_d_db[0])?,
        channel: &c.channel,
        mcs: &campaign.mcs,
        rate_threshold_bps: c.rate_thresholds_bps[0],
        feasibility: c.feasibility,
    };
    let steps = c.traffic_profile.len();
    let per = par::map_indexed(campaign.execution, steps * c.n_drops, |i| -> Result<Option<(f64, f64, bool)>> {
        let (t, d) = (i / c.n_drops, i % c.n_drops);
        // Each step gets its own drop stream so repeated densities differ.
        let density = c.traffic_profile[t];
        let snaps = drop_snapshots(campaign, density, t * c.n_drops + d, 1)?;
        let Some(snap) = snaps.first() else { return Ok(None) };
        let h = heuristic_select(&campaign.patterns, snap, &ctx)?;
        let tput = metrics::alpha_fair_throughput(&h.evaluation.rates, c.alphas[0]).unwrap_or(f64::NAN);
        Ok(Some((h.selected.a1() as f64, tput, h.feasible)))
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    let a2 = campaign.patterns.cluster_size() as f64;
    Ok((0..steps)
        .map(|t| {
            let chunk: Vec<(f64, f64, bool)> = per[t * c.n_drops..(t + 1) * c.n_drops].iter().flatten().copied().collect();
            let n = chunk.len().max(1) as f64;
            let a1 = chunk.iter().map(|x| x.0).sum::<f64>() / n;
            ProfileRow {
                step: t,
                density_per_km2: c.traffic_profile[t],
                a1,
                energy_saving_pct: a1 / a2 * 100.0,
                t_alpha: aggregate(&chunk.iter().map(|x| x.1).collect::<Vec<_>>()).mean,
                feasible_fraction: chunk.iter().filter(|x| x.2).count() as f64 / n,
            }
        })
        .collect())
}

/// Run description written next to the results.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub master_seed: u64,
    pub parallel: bool,
    pub rows: usize,
    pub output: Option<&'a Path>,
    pub config: &'a CampaignConfig,
    pub comp_clusters: Vec<(String, Vec<Vec<usize>>)>,
    pub patterns: Vec<(String, Vec<u8>)>,
}

impl<'a> Manifest<'a> {
    pub fn new(campaign: &'a Campaign, results: &CampaignResults, output: Option<&'a Path>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            master_seed: campaign.config.master_seed,
            parallel: campaign.execution.is_parallel(),
            rows: results.rows.len(),
            output,
            config: &campaign.config,
            comp_clusters: campaign
                .comp
                .iter()
                .map(|c| {
                    (
                        c.name().to_string(),
                        c.clusters()
                            .iter()
                            .map(|g| g.iter().map(|s| s.label()).collect())
                            .collect(),
                    )
                })
                .collect(),
            patterns: campaign
                .patterns
                .patterns()
                .iter()
                .map(|p| (p.label().to_string(), p.off_flags().iter().map(|&o| u8::from(o)).collect()))
                .collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}
