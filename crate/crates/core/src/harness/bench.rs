//! Evaluation cost of the theories.

use std::hint::black_box;
use std::time::Instant;

use crate::classic_theory::initialize_classic;
use crate::eps_theory::initialize;
use crate::error::Result;

use super::campaign::eps_options;
use super::config::CampaignConfig;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsCost {
    pub order: u32,
    /// Wall time per ephemeris at a given τ (s).
    pub at_tau: f64,
    /// Wall time per ephemeris at a given t, including the Newton iteration (s).
    pub at_time: f64,
    /// Theory evaluations per t-ephemeris over those per τ-ephemeris.
    pub evaluation_ratio: f64,
    pub mean_iterations: f64,
    pub max_iterations: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub epochs: usize,
    /// Wall time per classic ephemeris at a given t (s).
    pub classic: f64,
    pub eps: Vec<EpsCost>,
}

/// Times `epochs` evaluations spread uniformly over the campaign horizon.
pub fn benchmark_evaluation(cfg: &CampaignConfig, epochs: usize) -> Result<CostReport> {
    cfg.validate()?;
    let epochs = epochs.max(1);
    let x0 = cfg.elements.to_cartesian(&cfg.model)?;
    let h = cfg.horizon();
    let times: Vec<f64> = (0..epochs)
        .map(|k| h * (k as f64 + 0.5) / epochs as f64)
        .collect();

    let classic = initialize_classic(&x0, &cfg.model, cfg.calibrate)?;
    let start = Instant::now();
    for &t in &times {
        black_box(classic.propagate(black_box(t))?);
    }
    let classic_cost = start.elapsed().as_secs_f64() / epochs as f64;

    let mut eps = Vec::new();
    for &order in &cfg.eps_orders {
        let theory = initialize(&x0, &cfg.model, eps_options(cfg, order))?;
        // τ values that land on the same physical times
        let taus: Vec<f64> = times
            .iter()
            .map(|&t| theory.initial_tau(t).to_f64())
            .collect();
        let start = Instant::now();
        for &tau in &taus {
            black_box(theory.osculating_at_tau(black_box(tau))?);
        }
        let at_tau = start.elapsed().as_secs_f64() / epochs as f64;
        let (mut total, mut max) = (0u64, 0u32);
        let start = Instant::now();
        for &t in &times {
            let e = theory.ephemeris_at_time(black_box(t))?;
            total += u64::from(e.iterations);
            max = max.max(e.iterations);
        }
        let at_time = start.elapsed().as_secs_f64() / epochs as f64;
        let mean = total as f64 / epochs as f64;
        eps.push(EpsCost {
            order,
            at_tau,
            at_time,
            // every Newton pass evaluates the theory once, plus the final ephemeris
            evaluation_ratio: mean + 2.0,
            mean_iterations: mean,
            max_iterations: max,
        });
    }
    Ok(CostReport {
        epochs,
        classic: classic_cost,
        eps,
    })
}

impl CostReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} epochs\nclassic at t      {:.3} us/ephemeris\n",
            self.epochs,
            self.classic * 1e6
        );
        for c in &self.eps {
            s += &format!(
                "eps order {} at τ  {:.3} us/ephemeris\neps order {} at t  {:.3} us/ephemeris ({:.2}x, {:.2} evaluations per τ-ephemeris, newton mean {:.2} max {})\n",
                c.order,
                c.at_tau * 1e6,
                c.order,
                c.at_time * 1e6,
                c.at_time / c.at_tau,
                c.evaluation_ratio,
                c.mean_iterations,
                c.max_iterations
            );
        }
        s
    }
}
