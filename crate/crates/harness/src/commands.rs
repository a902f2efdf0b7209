//! The four subcommands. Each writes fixed file names under `cfg.output`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chessflow::effective::{
    classify_rectangle, classify_square, phase_portrait_svg, shapes_svg, states_csv, CaseTag, Shape,
};
use chessflow::flow::{run, FlowTrajectory, Termination};
use rayon::prelude::*;

use crate::compare::{alignment_distance, compare, effective_states, ComparisonReport};
use crate::config::{RunConfig, ShapeSpec};
use crate::svg::{frame, View};
use crate::HarnessError;

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn termination_label(t: &Termination<f64>) -> String {
    match t {
        Termination::Extinct { time } => format!("extinct,{time}"),
        Termination::Stationary { time } => format!("stationary,{time}"),
        Termination::ReachedTmax => "reached_t_max,".into(),
    }
}

/// Runs one ε-flow and writes `trajectory.csv`, `events.log` and
/// `frames/NNNN.svg` under `dir`.
fn simulate_into(
    cfg: &RunConfig,
    epsilon: f64,
    dir: &Path,
) -> Result<FlowTrajectory<f64>, HarnessError> {
    let m = cfg.medium(epsilon)?;
    let (poly, _) = cfg.initial(epsilon)?;
    let tr = run(&poly, &m, cfg.t_max, cfg.dt_out)?;
    write(&dir.join("trajectory.csv"), &tr.to_csv())?;
    write(&dir.join("events.log"), &tr.event_log())?;
    let view = View::around(&poly.vertices(), epsilon);
    let end = match tr.termination {
        Termination::Extinct { time } => time,
        _ => cfg.t_max,
    };
    let frames = dir.join("frames");
    let mut k = 0usize;
    loop {
        let t = k as f64 * cfg.dt_out;
        if t > end + 1e-12 {
            break;
        }
        if let Some(s) = tr.snapshot_at(t.min(cfg.t_max)) {
            write(
                &frames.join(format!("{k:04}.svg")),
                &frame(s, &m, &view, 480.0),
            )?;
        }
        k += 1;
    }
    Ok(tr)
}

pub fn simulate(cfg: &RunConfig) -> Result<FlowTrajectory<f64>, HarnessError> {
    simulate_into(cfg, cfg.epsilon()?, &cfg.output)
}

/// Writes `effective.csv`, `case.txt`, `shapes.svg` and, for rectangles,
/// `phase.svg`.
pub fn effective(cfg: &RunConfig) -> Result<String, HarnessError> {
    let (a, b) = (cfg.alpha, cfg.beta);
    let n = (cfg.t_max / cfg.dt_out).round() as usize;
    let times: Vec<f64> = (0..=n)
        .map(|k| (k as f64 * cfg.dt_out).min(cfg.t_max))
        .collect();
    let states = effective_states(cfg, &times)?;
    let (tag, lmax) = match cfg.shape {
        ShapeSpec::Square { l0 } => (classify_square(l0, a, b), l0),
        ShapeSpec::Rectangle { l1, l2 } if l1 == l2 => (classify_square(l1, a, b), l1),
        ShapeSpec::Rectangle { l1, l2 } => (classify_rectangle(l1, l2, a, b)?, l1.max(l2)),
        _ => {
            return Err(HarnessError::Unsupported(
                "effective flow needs a square or rectangle shape",
            ))
        }
    };
    let last = states.last().expect("time grid is never empty");
    let mut case = format!("case,{}\n", tag.label());
    let _ = writeln!(case, "final_time,{}", last.time);
    let _ = writeln!(case, "final_shape,{}", last.shape.label());
    match last.shape {
        Shape::Square { l } => {
            let _ = writeln!(case, "l,{l}");
        }
        Shape::Rectangle { l1, l2 } => {
            let _ = writeln!(case, "l1,{l1}\nl2,{l2}");
        }
        Shape::Octagon { radius, l1, l2 } => {
            let _ = writeln!(case, "radius,{radius}\nl1,{l1}\nl2,{l2}");
        }
        Shape::StationaryOctagon { radius, l } => {
            let _ = writeln!(case, "radius,{radius}\nl,{l}");
        }
        Shape::Point => {}
    }
    if tag == CaseTag::SquareConfine {
        let _ = writeln!(case, "limit_straight_edge,{}", -4.0 / (a + b));
    }
    if let Some(t) = last.extinction_time {
        let _ = writeln!(case, "extinction_time,{t}");
    }
    if let Some(t) = last.switch_time {
        let _ = writeln!(case, "switch_time,{t}");
    }
    write(
        &cfg.output.join("effective.csv"),
        &states_csv(&states, a, b),
    )?;
    write(&cfg.output.join("case.txt"), &case)?;
    let step = (states.len() / 10).max(1);
    let shown: Vec<Shape<f64>> = states.iter().step_by(step).map(|s| s.shape).collect();
    write(&cfg.output.join("shapes.svg"), &shapes_svg(&shown, 480))?;
    if matches!(cfg.shape, ShapeSpec::Rectangle { l1, l2 } if l1 != l2) {
        write(
            &cfg.output.join("phase.svg"),
            &phase_portrait_svg(a, b, 1.5 * lmax, 480)?,
        )?;
    }
    Ok(tag.label().to_string())
}

/// Writes `report.csv` (ε, sup d_H, ratio), `samples.csv` and
/// `alignment.csv` (ε, sup d_H between the cell-corner and the
/// (ε/4, ε/4)-shifted runs, and that distance over ε).
pub fn compare_cmd(cfg: &RunConfig) -> Result<ComparisonReport, HarnessError> {
    let report = compare(cfg)?;
    write(&cfg.output.join("report.csv"), &report.to_csv())?;
    write(&cfg.output.join("samples.csv"), &report.samples_csv())?;
    let rows = cfg
        .epsilons
        .par_iter()
        .map(|&e| alignment_distance(cfg, e, e / 4.0, e / 4.0).map(|d| (e, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::from("epsilon,sup_dh,constant\n");
    for (e, d) in rows {
        let _ = writeln!(s, "{e},{d},{}", d / e);
    }
    write(&cfg.output.join("alignment.csv"), &s)?;
    Ok(report)
}

/// One simulation per ε in parallel, each under `eps_<ε>/`, plus a
/// `sweep.csv` summary.
pub fn sweep(cfg: &RunConfig) -> Result<String, HarnessError> {
    let rows = cfg
        .epsilons
        .par_iter()
        .map(|&e| {
            let dir = cfg.output.join(format!("eps_{e}"));
            simulate_into(cfg, e, &dir).map(|tr| {
                format!(
                    "{e},{},{},{}",
                    termination_label(&tr.termination),
                    tr.events.len(),
                    tr.final_state.polyrect().len()
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = String::from("epsilon,termination,time,events,final_edges\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    write(&cfg.output.join("sweep.csv"), &s)?;
    Ok(s)
}
