//! User association, CoMP classification and closed-form α-fair time
//! fractions inside each virtual cluster.
//!
//! Inside a virtual cluster `k` the joint-transmission phase gets a share
//! `θ_k` of the subframe and every sector serves its own non-CoMP users in
//! the remaining `1 − θ_k`. Singleton clusters never run CoMP, so their
//! `θ` is fixed at 0.

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, ActiveMask};
use crate::comp::CompConfiguration;
use crate::error::{Error, Result};
use crate::geometry::SectorId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerParams {
    pub alpha: f64,
    /// CoMP SINR threshold `Γ_d` in dB.
    pub gamma_d_db: f64,
}

impl SchedulerParams {
    pub fn new(alpha: f64, gamma_d_db: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if gamma_d_db.is_nan() {
            return Err(Error::Config("gamma_d must be a number".into()));
        }
        Ok(SchedulerParams { alpha, gamma_d_db })
    }
}

/// Max-SINR association over the active subset of `candidates`.
///
/// `sinr(user, sector)` is only called for active sectors. Ties go to the
/// lowest sector index.
pub fn associate_max_sinr<F>(
    n_users: usize,
    candidates: &[SectorId],
    active: &ActiveMask,
    mut sinr: F,
) -> Result<Vec<SectorId>>
where
    F: FnMut(usize, SectorId) -> f64,
{
    let mut order: Vec<SectorId> = candidates
        .iter()
        .copied()
        .filter(|&s| active.sector_on(s))
        .collect();
    if order.is_empty() {
        return Err(Error::NoActiveSector);
    }
    order.sort();
    Ok((0..n_users)
        .map(|u| {
            let mut best = order[0];
            let mut best_v = sinr(u, best);
            for &s in &order[1..] {
                let v = sinr(u, s);
                if v > best_v {
                    best = s;
                    best_v = v;
                }
            }
            best
        })
        .collect())
}

/// CoMP flags: a user is CoMP when its serving SINR (linear) is at most
/// `Γ_d` and its sector belongs to a multi-sector virtual cluster.
pub fn classify_comp(
    serving: &[SectorId],
    serving_sinr: &[f64],
    config: &CompConfiguration,
    gamma_d_db: f64,
) -> Vec<bool> {
    let threshold = db_to_linear(gamma_d_db);
    let n_sectors = serving.iter().map(|s| s.0 + 1).max().unwrap_or(0);
    let lookup = config.sector_lookup(n_sectors);
    serving
        .iter()
        .zip(serving_sinr)
        .map(|(s, &g)| match lookup[s.0] {
            Some(k) => config.is_joint(k) && g <= threshold,
            None => false,
        })
        .collect()
}

/// α-fair time fractions for users sharing one resource.
///
/// Non-positive rates are outage users: they get 0 and do not take part in
/// the normalization. The remaining fractions sum to 1.
pub fn optimal_beta(rates: &[f64], alpha: f64) -> Vec<f64> {
    let r_max = rates.iter().copied().fold(0.0, f64::max);
    if r_max <= 0.0 {
        return vec![0.0; rates.len()];
    }
    let exponent = (1.0 - alpha) / alpha;
    let t: Vec<f64> = rates
        .iter()
        .map(|&r| if r > 0.0 { (r / r_max).powf(exponent) } else { 0.0 })
        .collect();
    let sum: f64 = t.iter().sum();
    t.into_iter().map(|x| x / sum).collect()
}

/// Fractions for the non-CoMP users of one sector.
pub fn optimal_beta_noncomp(rates: &[f64], alpha: f64) -> Vec<f64> {
    optimal_beta(rates, alpha)
}

/// Fractions for all CoMP users of one virtual cluster, normalized jointly.
pub fn optimal_beta_comp(rates: &[f64], alpha: f64) -> Vec<f64> {
    optimal_beta(rates, alpha)
}

/// Scheduling input of one virtual cluster. Rates are the full-time link
/// rates `r_{u,s}` (per sector) and `r_{u,k}` (joint).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterProblem {
    pub noncomp: Vec<Vec<f64>>,
    pub comp: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSchedule {
    pub beta_nc: Vec<Vec<f64>>,
    pub beta_c: Vec<f64>,
    pub theta: f64,
    pub n_comp: usize,
    pub n_noncomp: usize,
}

fn served(rates: &[f64]) -> usize {
    rates.iter().filter(|&&r| r > 0.0).count()
}

fn weight_sum(rates: &[f64], betas: &[f64], alpha: f64, scale: f64) -> f64 {
    rates
        .iter()
        .zip(betas)
        .filter(|(&r, _)| r > 0.0)
        .map(|(&r, &b)| (r * b / scale).powf(1.0 - alpha))
        .sum()
}

/// Optimal CoMP share `θ*` given the optimal fractions.
pub fn optimal_theta(problem: &ClusterProblem, beta_nc: &[Vec<f64>], beta_c: &[f64], alpha: f64) -> f64 {
    let n_c = served(&problem.comp);
    let n_nc: usize = problem.noncomp.iter().map(|r| served(r)).sum();
    if n_c == 0 {
        return 0.0;
    }
    if n_nc == 0 {
        return 1.0;
    }
    if alpha == 1.0 {
        return n_c as f64 / (n_c + n_nc) as f64;
    }
    let scale = problem
        .comp
        .iter()
        .chain(problem.noncomp.iter().flatten())
        .copied()
        .fold(0.0, f64::max);
    let c = weight_sum(&problem.comp, beta_c, alpha, scale);
    let a: f64 = problem
        .noncomp
        .iter()
        .zip(beta_nc)
        .map(|(r, b)| weight_sum(r, b, alpha, scale))
        .sum();
    let delta = (c / a).powf(1.0 / alpha);
    if delta.is_infinite() {
        1.0
    } else {
        delta / (1.0 + delta)
    }
}

/// Solves one virtual cluster in closed form.
pub fn solve(problem: &ClusterProblem, alpha: f64) -> ClusterSchedule {
    let beta_nc: Vec<Vec<f64>> = problem
        .noncomp
        .iter()
        .map(|r| optimal_beta_noncomp(r, alpha))
        .collect();
    let beta_c = optimal_beta_comp(&problem.comp, alpha);
    let theta = optimal_theta(problem, &beta_nc, &beta_c, alpha);
    ClusterSchedule {
        n_comp: served(&problem.comp),
        n_noncomp: problem.noncomp.iter().map(|r| served(r)).sum(),
        beta_nc,
        beta_c,
        theta,
    }
}

/// Largest relative violation of the first-order conditions.
///
/// Within each sector (and within the CoMP set) the marginal utilities
/// `((1−θ) r)^{1−α} β^{−α}` must be equal; when `0 < θ < 1` the derivative
/// of the objective in `θ` must vanish.
pub fn stationarity_residual(problem: &ClusterProblem, sched: &ClusterSchedule, alpha: f64) -> f64 {
    let scale = problem
        .comp
        .iter()
        .chain(problem.noncomp.iter().flatten())
        .copied()
        .fold(0.0, f64::max);
    if scale <= 0.0 {
        return 0.0;
    }
    let spread = |rates: &[f64], betas: &[f64], share: f64| -> f64 {
        let m: Vec<f64> = rates
            .iter()
            .zip(betas)
            .filter(|(&r, _)| r > 0.0)
            .map(|(&r, &b)| (share * r / scale).powf(1.0 - alpha) * b.powf(-alpha))
            .collect();
        let hi = m.iter().copied().fold(f64::MIN, f64::max);
        let lo = m.iter().copied().fold(f64::MAX, f64::min);
        if m.len() < 2 {
            0.0
        } else {
            (hi - lo) / hi
        }
    };
    let theta = sched.theta;
    let mut worst: f64 = 0.0;
    if theta < 1.0 {
        for (r, b) in problem.noncomp.iter().zip(&sched.beta_nc) {
            worst = worst.max(spread(r, b, 1.0 - theta));
        }
    }
    if theta > 0.0 {
        worst = worst.max(spread(&problem.comp, &sched.beta_c, theta));
    }
    if theta > 0.0 && theta < 1.0 {
        let c = weight_sum(&problem.comp, &sched.beta_c, alpha, scale);
        let a: f64 = problem
            .noncomp
            .iter()
            .zip(&sched.beta_nc)
            .map(|(r, b)| weight_sum(r, b, alpha, scale))
            .sum();
        let down = a * (1.0 - theta).powf(-alpha);
        let up = c * theta.powf(-alpha);
        worst = worst.max((up - down).abs() / up.max(down));
    }
    worst
}

/// α-fair utility of the positive rates; returns the value and how many
/// zero-rate users were left out.
pub fn utility(lambda: &[f64], alpha: f64) -> (f64, usize) {
    let excluded = lambda.iter().filter(|&&l| l <= 0.0).count();
    let value = lambda
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| {
            if alpha == 1.0 {
                l.ln()
            } else {
                l.powf(1.0 - alpha) / (1.0 - alpha)
            }
        })
        .sum();
    (value, excluded)
}

/// Per-user link state fed to [`schedule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLink {
    pub sector: SectorId,
    pub comp: bool,
    /// `r_{u,k}` for CoMP users, `r_{u,s}` otherwise, in bit/s.
    pub rate_bps: f64,
}

/// Scheduling outcome for every user of the center cluster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchedulingSolution {
    pub sector: Vec<SectorId>,
    pub comp: Vec<bool>,
    /// `β_{u,s}` for non-CoMP users, `β_{u,k}` for CoMP users.
    pub beta: Vec<f64>,
    /// `θ_k` per virtual cluster.
    pub theta: Vec<f64>,
    pub n_comp: Vec<usize>,
    pub n_noncomp: Vec<usize>,
    pub lambda: Vec<f64>,
}

impl SchedulingSolution {
    pub fn virtual_cluster_of(&self, config: &CompConfiguration, user: usize) -> Option<usize> {
        config
            .clusters()
            .iter()
            .position(|c| c.contains(&self.sector[user]))
    }
}

/// Solves every virtual cluster of `config` for the given links.
pub fn schedule(links: &[UserLink], config: &CompConfiguration, alpha: f64) -> Result<SchedulingSolution> {
    let n_sectors = links
        .iter()
        .map(|l| l.sector.0 + 1)
        .chain(config.clusters().iter().flatten().map(|s| s.0 + 1))
        .max()
        .unwrap_or(0);
    let lookup = config.sector_lookup(n_sectors);
    let n_k = config.clusters().len();

    // Member user indices per (cluster, local sector) and per cluster CoMP set.
    let mut nc_members: Vec<Vec<Vec<usize>>> = config
        .clusters()
        .iter()
        .map(|c| vec![Vec::new(); c.len()])
        .collect();
    let mut c_members: Vec<Vec<usize>> = vec![Vec::new(); n_k];
    for (u, l) in links.iter().enumerate() {
        let k = lookup[l.sector.0].ok_or_else(|| {
            Error::CompConfig(format!("sector {} is not covered by the configuration", l.sector))
        })?;
        if l.comp {
            if !config.is_joint(k) {
                return Err(Error::CompConfig(format!(
                    "user on singleton sector {} flagged as CoMP",
                    l.sector
                )));
            }
            c_members[k].push(u);
        } else {
            let pos = config.clusters()[k]
                .iter()
                .position(|&s| s == l.sector)
                .expect("lookup agrees with cluster membership");
            nc_members[k][pos].push(u);
        }
    }

    let mut beta = vec![0.0; links.len()];
    let mut theta = vec![0.0; n_k];
    let mut n_comp = vec![0; n_k];
    let mut n_noncomp = vec![0; n_k];
    for k in 0..n_k {
        let problem = ClusterProblem {
            noncomp: nc_members[k]
                .iter()
                .map(|m| m.iter().map(|&u| links[u].rate_bps).collect())
                .collect(),
            comp: c_members[k].iter().map(|&u| links[u].rate_bps).collect(),
        };
        let sched = solve(&problem, alpha);
        for (m, b) in nc_members[k].iter().zip(&sched.beta_nc) {
            for (&u, &x) in m.iter().zip(b) {
                beta[u] = x;
            }
        }
        for (&u, &x) in c_members[k].iter().zip(&sched.beta_c) {
            beta[u] = x;
        }
        theta[k] = sched.theta;
        n_comp[k] = sched.n_comp;
        n_noncomp[k] = sched.n_noncomp;
    }

    let sector: Vec<SectorId> = links.iter().map(|l| l.sector).collect();
    let comp: Vec<bool> = links.iter().map(|l| l.comp).collect();
    let rates: Vec<f64> = links.iter().map(|l| l.rate_bps).collect();
    let user_theta: Vec<f64> = sector
        .iter()
        .map(|s| lookup[s.0].map_or(0.0, |k| theta[k]))
        .collect();
    let lambda = user_rates(&comp, &beta, &user_theta, &rates);
    Ok(SchedulingSolution {
        sector,
        comp,
        beta,
        theta,
        n_comp,
        n_noncomp,
        lambda,
    })
}

/// `λ_u = θ β r` for CoMP users and `(1 − θ) β r` otherwise, with `θ` the
/// share of the user's virtual cluster.
pub fn user_rates(comp: &[bool], beta: &[f64], theta: &[f64], rates: &[f64]) -> Vec<f64> {
    comp.iter()
        .zip(beta)
        .zip(theta)
        .zip(rates)
        .map(|(((&c, &b), &t), &r)| if c { t * b * r } else { (1.0 - t) * b * r })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn beta_examples() {
        assert_eq!(optimal_beta_noncomp(&[3.0, 5.0, 7.0, 9.0], 1.0), vec![0.25; 4]);
        let b = optimal_beta_noncomp(&[4.0, 1.0], 2.0);
        assert_relative_eq!(b[0], 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(b[1], 2.0 / 3.0, max_relative = 1e-12);
        let b = optimal_beta_comp(&[9.0, 1.0], 2.0);
        assert_relative_eq!(b[0], 0.25, max_relative = 1e-12);
        assert_relative_eq!(b[1], 0.75, max_relative = 1e-12);
        assert_eq!(optimal_beta_comp(&[2.0; 5], 1.0), vec![0.2; 5]);
        assert_eq!(optimal_beta(&[1e6], 3.0), vec![1.0]);
        assert_eq!(optimal_beta(&[0.0, 2.0], 2.0), vec![0.0, 1.0]);
        assert!(optimal_beta(&[], 2.0).is_empty());
    }

    #[test]
    fn theta_examples() {
        let p = ClusterProblem {
            noncomp: vec![vec![1.0; 3], vec![1.0; 4]],
            comp: vec![1.0; 3],
        };
        assert_eq!(solve(&p, 1.0).theta, 3.0 / 10.0);

        let p = ClusterProblem {
            noncomp: vec![vec![2.0], vec![]],
            comp: vec![2.0],
        };
        assert_relative_eq!(solve(&p, 2.0).theta, 0.5, max_relative = 1e-12);

        let none = ClusterProblem {
            noncomp: vec![vec![1.0]],
            comp: vec![],
        };
        assert_eq!(solve(&none, 2.0).theta, 0.0);
        let all = ClusterProblem {
            noncomp: vec![vec![], vec![0.0]],
            comp: vec![5.0],
        };
        assert_eq!(solve(&all, 0.5).theta, 1.0);
    }

    #[test]
    fn utility_examples() {
        assert_eq!(utility(&[1.0, 1.0], 1.0), (0.0, 0));
        assert_relative_eq!(utility(&[1.0, 2.0], 2.0).0, -1.5);
        assert_eq!(utility(&[0.0, 1.0], 1.0), (0.0, 1));
    }

    #[test]
    fn comp_rate_product() {
        let l = user_rates(&[true], &[1.0], &[0.3], &[16.632e6]);
        assert_relative_eq!(l[0], 4.9896e6, max_relative = 1e-12);
        let l = user_rates(&[false], &[0.5], &[0.0], &[8.0]);
        assert_eq!(l[0], 4.0);
    }

    #[test]
    fn association_ties_and_switch_off() {
        let sectors: Vec<SectorId> = (0..6).map(SectorId).collect();
        let mut mask = ActiveMask::all_on(2);
        let table = [[1.0, 5.0, 5.0, 2.0, 9.0, 0.0]];
        let x = associate_max_sinr(1, &sectors, &mask, |u, s| table[u][s.0]).unwrap();
        assert_eq!(x, vec![SectorId(4)]);
        mask.switch_off(crate::geometry::BsId(1));
        let x = associate_max_sinr(1, &sectors, &mask, |u, s| table[u][s.0]).unwrap();
        assert_eq!(x, vec![SectorId(1)]);
        mask.switch_off(crate::geometry::BsId(0));
        assert!(associate_max_sinr(1, &sectors, &mask, |_, _| 1.0).is_err());
    }

    fn c3() -> CompConfiguration {
        CompConfiguration::c3(&(0..21).map(SectorId).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn classification_rules() {
        let cfg = c3();
        // sector 2 (0-based 1) is in a triple, sector 1 (0-based 0) is a singleton
        let x = vec![SectorId(1), SectorId(0), SectorId(1)];
        let g = vec![db_to_linear(-3.0), db_to_linear(-10.0), db_to_linear(5.0)];
        assert_eq!(classify_comp(&x, &g, &cfg, 0.0), vec![true, false, false]);
        assert_eq!(classify_comp(&x, &g, &cfg, -20.0), vec![false; 3]);
        assert_eq!(classify_comp(&x, &g, &cfg, 1e3), vec![true, false, true]);
    }

    #[test]
    fn schedule_counts_partition_users() {
        let cfg = c3();
        let links = vec![
            UserLink { sector: SectorId(1), comp: true, rate_bps: 2e6 },
            UserLink { sector: SectorId(8), comp: false, rate_bps: 4e6 },
            UserLink { sector: SectorId(9), comp: false, rate_bps: 1e6 },
            UserLink { sector: SectorId(9), comp: false, rate_bps: 3e6 },
            UserLink { sector: SectorId(0), comp: false, rate_bps: 5e6 },
        ];
        let sol = schedule(&links, &cfg, 1.0).unwrap();
        assert_eq!(sol.n_comp[0], 1);
        assert_eq!(sol.n_noncomp[0], 3);
        assert_eq!(sol.theta[0], 0.25);
        assert_relative_eq!(sol.lambda[0], 0.25 * 2e6);
        assert_relative_eq!(sol.lambda[2], 0.75 * 0.5 * 1e6);
        let k_single = sol.virtual_cluster_of(&cfg, 4).unwrap();
        assert_eq!(sol.theta[k_single], 0.0);
        assert_eq!(sol.lambda[4], 5e6);

        let bad = [UserLink { sector: SectorId(0), comp: true, rate_bps: 1.0 }];
        assert!(schedule(&bad, &cfg, 1.0).is_err());
    }

    fn problem_strategy() -> impl Strategy<Value = ClusterProblem> {
        let rate = 1e5..5e7f64;
        (
            prop::collection::vec(prop::collection::vec(rate.clone(), 0..3), 1..4),
            prop::collection::vec(rate, 0..3),
        )
            .prop_map(|(noncomp, comp)| ClusterProblem { noncomp, comp })
    }

    proptest! {
        #[test]
        fn fractions_normalize(p in problem_strategy(), alpha in 0.3..4.0f64) {
            let s = solve(&p, alpha);
            for b in s.beta_nc.iter().filter(|b| !b.is_empty()) {
                prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            if !s.beta_c.is_empty() {
                prop_assert!((s.beta_c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            prop_assert!((0.0..=1.0).contains(&s.theta));
        }

        #[test]
        fn closed_form_is_stationary(p in problem_strategy(), alpha in 0.3..4.0f64) {
            let s = solve(&p, alpha);
            prop_assert!(stationarity_residual(&p, &s, alpha) < 1e-9);
        }
    }
}
