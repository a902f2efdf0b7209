//! ε-flow versus effective flow, and ε-flow versus a shifted copy of itself.

use std::fmt::Write as _;

use chessflow::effective::{rectangle_states, square_states, EffectiveState, Shape};
use chessflow::flow::{run, FlowTrajectory, Termination};
use chessflow::geometry::{hausdorff_polygons, Point};
use rayon::prelude::*;

use crate::config::{Alignment, RunConfig, ShapeSpec};
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDistance {
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub sup: f64,
    /// `sup / sup(previous ε)`.
    pub ratio: Option<f64>,
    pub extinction: Option<f64>,
    pub samples: Vec<SampleDistance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<EpsilonRow>,
}

impl ComparisonReport {
    /// `epsilon,sup_dh,ratio`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,sup_dh,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", r.epsilon, r.sup, ratio);
        }
        s
    }

    /// `epsilon,time,dh` per compared sample.
    pub fn samples_csv(&self) -> String {
        let mut s = String::from("epsilon,time,dh\n");
        for r in &self.rows {
            for d in &r.samples {
                let _ = writeln!(s, "{},{},{}", r.epsilon, d.time, d.distance);
            }
        }
        s
    }
}

/// Effective states of the configured square or rectangle at `times`.
pub fn effective_states(
    cfg: &RunConfig,
    times: &[f64],
) -> Result<Vec<EffectiveState<f64>>, HarnessError> {
    let (a, b) = (cfg.alpha, cfg.beta);
    Ok(match cfg.shape {
        ShapeSpec::Square { l0 } => square_states(l0, a, b, times)?,
        ShapeSpec::Rectangle { l1, l2 } if l1 == l2 => square_states(l1, a, b, times)?,
        ShapeSpec::Rectangle { l1, l2 } => rectangle_states(l1, l2, a, b, times)?,
        _ => {
            return Err(HarnessError::Unsupported(
                "effective flow needs a square or rectangle shape",
            ))
        }
    })
}

fn placed(shape: &Shape<f64>, c: Point<f64>) -> Vec<Point<f64>> {
    match shape {
        Shape::Point => vec![c],
        s => s
            .vertices()
            .into_iter()
            .map(|v| Point::new(v.x + c.x, v.y + c.y))
            .collect(),
    }
}

/// Flow boundary at time `t`: the last snapshot at or before `t`, or the
/// centre once the flow has gone extinct.
fn flow_at(tr: &FlowTrajectory<f64>, t: f64, c: Point<f64>) -> Vec<Point<f64>> {
    match tr.termination {
        Termination::Extinct { time } if t >= time => vec![c],
        _ => tr
            .snapshot_at(t)
            .map(|s| s.polyrect.vertices())
            .unwrap_or_else(|| vec![c]),
    }
}

fn window(cfg: &RunConfig) -> f64 {
    cfg.t_compare.unwrap_or(cfg.t_max).min(cfg.t_max)
}

/// Output grid `k·dt_out` up to `t_end`.
fn grid(dt: f64, t_end: f64) -> Vec<f64> {
    let n = (t_end / dt + 1e-9).floor() as usize;
    (0..=n).map(|k| (k as f64 * dt).min(t_end)).collect()
}

/// One row of the convergence table (without the ratio).
pub fn compare_one(cfg: &RunConfig, epsilon: f64) -> Result<EpsilonRow, HarnessError> {
    let m = cfg.medium(epsilon)?;
    let (poly, c) = cfg.initial(epsilon)?;
    let tr = run(&poly, &m, cfg.t_max, cfg.dt_out)?;
    let times = grid(cfg.dt_out, window(cfg));
    let eff = effective_states(cfg, &times)?;
    let samples: Vec<SampleDistance> = times
        .iter()
        .zip(&eff)
        .map(|(&t, st)| SampleDistance {
            time: t,
            distance: hausdorff_polygons(&flow_at(&tr, t, c), &placed(&st.shape, c)),
        })
        .collect();
    let sup = samples.iter().fold(0.0f64, |a, s| a.max(s.distance));
    Ok(EpsilonRow {
        epsilon,
        sup,
        ratio: None,
        extinction: tr.extinction_time(),
        samples,
    })
}

/// Convergence table over the configured ε list (runs in parallel).
pub fn compare(cfg: &RunConfig) -> Result<ComparisonReport, HarnessError> {
    if cfg.epsilons.windows(2).any(|w| w[1] > w[0]) {
        return Err(HarnessError::Config(crate::config::ConfigError::Invalid {
            field: "epsilon".into(),
            reason: "compare needs a non-increasing list".into(),
        }));
    }
    let mut rows = cfg
        .epsilons
        .par_iter()
        .map(|&e| compare_one(cfg, e))
        .collect::<Result<Vec<_>, _>>()?;
    for k in 1..rows.len() {
        let prev = rows[k - 1].sup;
        rows[k].ratio = (prev > 0.0).then(|| rows[k].sup / prev);
    }
    Ok(ComparisonReport { rows })
}

/// Sup over the output grid of the distance between the ε-flows of the
/// cell-corner placement and of the same placement shifted by `(dx, dy)`.
pub fn alignment_distance(
    cfg: &RunConfig,
    epsilon: f64,
    dx: f64,
    dy: f64,
) -> Result<f64, HarnessError> {
    let m = cfg.medium(epsilon)?;
    let base = RunConfig {
        alignment: Alignment::CellCorner,
        ..cfg.clone()
    };
    let moved = RunConfig {
        alignment: Alignment::Offset(dx, dy),
        ..cfg.clone()
    };
    let (pa, ca) = base.initial(epsilon)?;
    let (pb, cb) = moved.initial(epsilon)?;
    let (ta, tb) = rayon::join(
        || run(&pa, &m, cfg.t_max, cfg.dt_out),
        || run(&pb, &m, cfg.t_max, cfg.dt_out),
    );
    let (ta, tb) = (ta?, tb?);
    Ok(grid(cfg.dt_out, window(cfg))
        .into_iter()
        .map(|t| hausdorff_polygons(&flow_at(&ta, t, ca), &flow_at(&tb, t, cb)))
        .fold(0.0, f64::max))
}
