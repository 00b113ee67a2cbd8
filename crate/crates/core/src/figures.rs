//! Figure-specific projections of campaign results and matching sweep presets.

use std::io::Write;

use serde::Serialize;

use crate::campaign::{CampaignConfig, CampaignResults, ResultRow, HEURISTIC_LABEL};
use crate::error::{Error, Result};

pub const FIGURES: [&str; 8] = ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"];

/// Sweep settings that produce the data behind `tag`, on top of `base`.
pub fn preset(tag: &str, base: CampaignConfig) -> Result<CampaignConfig> {
    let gamma_sweep = vec![-6.0, -4.0, -2.0, 0.0, 2.0, 4.0];
    let all_comp = vec!["none".into(), "C1".into(), "C2".into(), "C3".into()];
    let rates: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1e6).collect();
    Ok(match tag {
        "fig4" => CampaignConfig {
            gamma_d_db: gamma_sweep,
            alphas: vec![1.0, 2.0, 3.0],
            comp: vec!["C3".into()],
            ..base
        },
        "fig5" => CampaignConfig {
            gamma_d_db: gamma_sweep,
            comp: all_comp,
            ..base
        },
        "fig6" | "fig7" | "fig8" => CampaignConfig {
            comp: all_comp,
            ..base
        },
        "fig9" => CampaignConfig {
            rate_thresholds_bps: rates,
            comp: vec!["C3".into()],
            ..base
        },
        "fig10" => CampaignConfig {
            rate_thresholds_bps: rates,
            alphas: vec![0.5, 1.0, 2.0, 3.0],
            comp: vec!["C3".into()],
            ..base
        },
        "fig11" => CampaignConfig {
            traffic_profile: vec![
                20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 140.0, 120.0, 100.0, 80.0, 60.0,
                40.0, 20.0,
            ],
            comp: vec!["C3".into()],
            rate_thresholds_bps: vec![0.2e6],
            ..base
        },
        other => return Err(unknown(other)),
    })
}

fn unknown(tag: &str) -> Error {
    Error::Config(format!("unknown figure `{tag}`, expected one of {}", FIGURES.join(", ")))
}

fn distinct(rows: &[ResultRow], f: impl Fn(&ResultRow) -> String) -> usize {
    let mut v: Vec<String> = rows.iter().map(f).collect();
    v.sort();
    v.dedup();
    v.len()
}

fn need(tag: &str, axis: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::MissingAxis {
            figure: tag.into(),
            axis: axis.into(),
        })
    }
}

#[derive(Serialize)]
struct Fig4 {
    gamma_d_db: f64,
    alpha: f64,
    config: String,
    theta_star_mean: f64,
}

#[derive(Serialize)]
struct Fig5 {
    gamma_d_db: f64,
    pattern: String,
    config: String,
    t_alpha: f64,
}

#[derive(Serialize)]
struct Fig678 {
    config: String,
    pattern: String,
    sinr_coverage: f64,
    t_alpha: f64,
    energy_pct: f64,
}

#[derive(Serialize)]
struct Fig910 {
    rate_threshold_bps: f64,
    pattern: String,
    alpha: f64,
    rate_coverage: f64,
}

#[derive(Serialize)]
struct Fig11 {
    step: usize,
    density_per_km2: f64,
    a1: f64,
    energy_pct: f64,
    t_alpha: f64,
}

/// Rows sharing the first value of every axis the figure does not plot.
fn first_slice(
    rows: &[ResultRow],
    keep_gamma: bool,
    keep_alpha: bool,
    keep_rate: bool,
) -> Vec<&ResultRow> {
    let Some(first) = rows.first() else { return Vec::new() };
    rows.iter()
        .filter(|r| r.pattern != HEURISTIC_LABEL)
        .filter(|r| r.density_per_km2 == first.density_per_km2)
        .filter(|r| keep_gamma || r.gamma_d_db == first.gamma_d_db)
        .filter(|r| keep_alpha || r.alpha == first.alpha)
        .filter(|r| keep_rate || r.rate_threshold_bps == first.rate_threshold_bps)
        .collect()
}

/// The projected rows of one figure.
enum Table {
    Fig4(Vec<Fig4>),
    Fig5(Vec<Fig5>),
    Fig678(Vec<Fig678>),
    Fig910(Vec<Fig910>),
    Fig11(Vec<Fig11>),
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))
}

impl Table {
    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        match self {
            Table::Fig4(r) => write_rows(r, out),
            Table::Fig5(r) => write_rows(r, out),
            Table::Fig678(r) => write_rows(r, out),
            Table::Fig910(r) => write_rows(r, out),
            Table::Fig11(r) => write_rows(r, out),
        }
    }

    fn write_json<W: Write>(&self, out: W) -> Result<()> {
        match self {
            Table::Fig4(r) => serde_json::to_writer_pretty(out, r)?,
            Table::Fig5(r) => serde_json::to_writer_pretty(out, r)?,
            Table::Fig678(r) => serde_json::to_writer_pretty(out, r)?,
            Table::Fig910(r) => serde_json::to_writer_pretty(out, r)?,
            Table::Fig11(r) => serde_json::to_writer_pretty(out, r)?,
        }
        Ok(())
    }
}

fn project(results: &CampaignResults, tag: &str) -> Result<Table> {
    let rows = &results.rows;
    Ok(match tag {
        "fig4" => {
            need(tag, "gamma_d_db", distinct(rows, |r| r.gamma_d_db.to_string()) > 1)?;
            let first_cfg = rows
                .iter()
                .find(|r| r.config != "none")
                .map(|r| r.config.clone())
                .ok_or_else(|| Error::MissingAxis {
                    figure: tag.into(),
                    axis: "comp".into(),
                })?;
            Table::Fig4(
                first_slice(rows, true, true, false)
                    .into_iter()
                    .filter(|r| r.config == first_cfg && r.a1 == 0.0)
                    .map(|r| Fig4 {
                        gamma_d_db: r.gamma_d_db,
                        alpha: r.alpha,
                        config: r.config.clone(),
                        theta_star_mean: r.theta_star_mean,
                    })
                    .collect(),
            )
        }
        "fig5" => {
            need(tag, "gamma_d_db", distinct(rows, |r| r.gamma_d_db.to_string()) > 1)?;
            Table::Fig5(
                first_slice(rows, true, false, false)
                    .into_iter()
                    .map(|r| Fig5 {
                        gamma_d_db: r.gamma_d_db,
                        pattern: r.pattern.clone(),
                        config: r.config.clone(),
                        t_alpha: r.t_alpha_mean,
                    })
                    .collect(),
            )
        }
        "fig6" | "fig7" | "fig8" => {
            need(tag, "comp", distinct(rows, |r| r.config.clone()) > 1)?;
            Table::Fig678(
                first_slice(rows, false, false, false)
                    .into_iter()
                    .map(|r| Fig678 {
                        config: r.config.clone(),
                        pattern: r.pattern.clone(),
                        sinr_coverage: r.sinr_coverage_mean,
                        t_alpha: r.t_alpha_mean,
                        energy_pct: r.energy_saving_pct,
                    })
                    .collect(),
            )
        }
        "fig9" | "fig10" => {
            need(tag, "rate_thresholds_bps", distinct(rows, |r| r.rate_threshold_bps.to_string()) > 1)?;
            Table::Fig910(
                first_slice(rows, false, true, true)
                    .into_iter()
                    .map(|r| Fig910 {
                        rate_threshold_bps: r.rate_threshold_bps,
                        pattern: r.pattern.clone(),
                        alpha: r.alpha,
                        rate_coverage: r.rate_coverage_mean,
                    })
                    .collect(),
            )
        }
        "fig11" => {
            need(tag, "traffic_profile", !results.profile.is_empty())?;
            Table::Fig11(
                results
                    .profile
                    .iter()
                    .map(|p| Fig11 {
                        step: p.step,
                        density_per_km2: p.density_per_km2,
                        a1: p.a1,
                        energy_pct: p.energy_saving_pct,
                        t_alpha: p.t_alpha,
                    })
                    .collect(),
            )
        }
        other => return Err(unknown(other)),
    })
}

/// Writes the columns behind one figure as CSV.
pub fn emit_figure_data<W: Write>(results: &CampaignResults, tag: &str, out: W) -> Result<()> {
    project(results, tag)?.write_csv(out)
}

/// Same projection as [`emit_figure_data`], as a JSON array of records.
pub fn emit_figure_json<W: Write>(results: &CampaignResults, tag: &str, out: W) -> Result<()> {
    project(results, tag)?.write_json(out)
}
