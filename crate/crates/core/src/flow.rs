//! Event-driven evolution of a polyrectangle.
//!
//! Between events every edge keeps its regime: held edges stay put, moving
//! edges travel with the normal velocity `(2χ + ∫_p^q g)/ℓ` computed on the
//! strip of the medium they move in. Velocities are inward-positive and an
//! offset changes by `sign(normal)·v`.

use std::fmt::Write as _;

use crate::calibrability::field_on;
use crate::cracking::{boundary_velocities, breaking_configuration, BreakingConfiguration, Regime};
use crate::error::{Error, Result};
use crate::geometry::Polyrectangle;
use crate::medium::ChessboardMedium;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    EdgeVanished,
    HitGridLine,
    Unpinned,
    CalibrabilityLost,
    Recracked,
    NonuniqueBranch,
    Extinct,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::EdgeVanished => "edge_vanished",
            EventKind::HitGridLine => "hit_grid_line",
            EventKind::Unpinned => "unpinned",
            EventKind::CalibrabilityLost => "calibrability_lost",
            EventKind::Recracked => "recracked",
            EventKind::NonuniqueBranch => "nonunique_branch",
            EventKind::Extinct => "extinct",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEvent<T> {
    pub time: T,
    pub kind: EventKind,
    /// Edge indices in the configuration the event happened to.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T> {
    pub config: BreakingConfiguration<T>,
    pub time: T,
    pub pinned: Vec<bool>,
    pub non_unique: bool,
}

impl<T: Scalar> FlowState<T> {
    /// Breaking configuration of `initial` at time zero, with the events it
    /// implies (`recracked`, `nonunique_branch`).
    pub fn new(
        initial: &Polyrectangle<T>,
        medium: &ChessboardMedium<T>,
    ) -> Result<(Self, Vec<FlowEvent<T>>)> {
        let mut poly = initial.clone();
        snap_all(&mut poly, medium);
        let mut events = Vec::new();
        let config = rebuild(&poly, medium, T::zero(), &mut events)?;
        let state = FlowState {
            pinned: config.pinned_flags(),
            non_unique: !config.unique,
            config,
            time: T::zero(),
        };
        Ok((state, events))
    }

    pub fn polyrect(&self) -> &Polyrectangle<T> {
        &self.config.polyrect
    }
}

/// Admissible normal velocities per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FilippovIntervals<T> {
    pub intervals: Vec<(T, T)>,
}

impl<T: Scalar> FilippovIntervals<T> {
    pub fn contains_zero(&self, i: usize) -> bool {
        let (lo, hi) = self.intervals[i];
        lo <= T::zero() && T::zero() <= hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions<T> {
    /// Smallest admissible step before the run is aborted.
    pub dt_min: T,
    /// Events closer than this (in units of ε) count as simultaneous.
    pub tol_event: T,
    /// Largest offset change per step, in units of the half cell.
    pub max_move: T,
    /// Consecutive events without time advance before aborting.
    pub max_cascade: usize,
}

impl<T: Scalar> Default for FlowOptions<T> {
    fn default() -> Self {
        Self {
            dt_min: lit(1e-15),
            tol_event: lit(1e-10),
            max_move: lit(1.0 / 32.0),
            max_cascade: 200,
        }
    }
}

/// Result of [`advance_to_next_event`].
#[derive(Debug, Clone, PartialEq)]
pub enum Advance<T> {
    Events(Vec<FlowEvent<T>>),
    /// The stop time was reached without events.
    Reached,
    Extinct(FlowEvent<T>),
}

/// Frozen data of one integration step.
struct Frame<T> {
    poly: Polyrectangle<T>,
    /// Reference line of each moving edge.
    lines: Vec<Option<T>>,
    /// Strip `(lo, hi)` of each moving edge and whether it starts on `lo`
    /// or on `hi`.
    strips: Vec<Option<(T, T, bool, bool)>>,
    start_len: Vec<T>,
    regimes: Vec<Regime>,
}

fn tiny<T: Scalar>(medium: &ChessboardMedium<T>) -> T {
    medium.tol_grid()
}

impl<T: Scalar> Frame<T> {
    fn new(state: &FlowState<T>, medium: &ChessboardMedium<T>) -> Self {
        let poly = state.config.polyrect.clone();
        let h = medium.half_cell();
        let tol = tiny(medium);
        let m = poly.len();
        let mut lines = vec![None; m];
        let mut strips = vec![None; m];
        let start_len: Vec<T> = (0..m).map(|i| poly.signed_length(i)).collect();
        for i in 0..m {
            let r = state.config.regimes[i];
            if r.is_pinned() || start_len[i] <= tol {
                continue;
            }
            let s = poly.offset(i);
            let line = if medium.is_on_grid(s) {
                let shift = match r {
                    Regime::Outward => -1,
                    Regime::Inward => 1,
                    _ => continue,
                };
                medium.snap(s) + h * lit(0.5 * (shift * poly.normal(i).sign()) as f64)
            } else {
                ((s / h).floor() + lit(0.5)) * h
            };
            let lo = (line / h).floor() * h;
            let hi = lo + h;
            lines[i] = Some(line);
            strips[i] = Some((lo, hi, (s - lo).abs() <= tol, (s - hi).abs() <= tol));
        }
        Self {
            poly,
            lines,
            strips,
            start_len,
            regimes: state.config.regimes.clone(),
        }
    }

    fn at(&self, y: &[T]) -> Polyrectangle<T> {
        let mut p = self.poly.clone();
        p.offsets_mut().copy_from_slice(y);
        p
    }

    /// `(p, q)` of edge `i` for offsets `y`, possibly with `q < p`.
    fn ends(&self, y: &[T], i: usize) -> (T, T) {
        let (a, b) = (y[self.poly.prev(i)], y[self.poly.next(i)]);
        if self.poly.normal(i).travel_sign() > 0 {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn velocity(&self, y: &[T], i: usize, medium: &ChessboardMedium<T>) -> T {
        let Some(line) = self.lines[i] else {
            return T::zero();
        };
        let n = self.poly.normal(i);
        let trace = medium.trace(n.edge_axis(), line);
        let (p, q) = self.ends(y, i);
        let chi = lit::<T>(self.poly.chi(i) as f64);
        let ell = q - p;
        if ell.abs() <= tiny(medium) * lit(1e-3) {
            let g = medium.value_of(medium.phase_at(&trace, p));
            return chi * lit(2.0) / ell.abs().max(tiny(medium) * lit(1e-3)) + g;
        }
        (chi * lit(2.0) + medium.integral(&trace, p, q)) / ell
    }

    fn velocities(&self, y: &[T], medium: &ChessboardMedium<T>) -> Vec<T> {
        (0..y.len()).map(|i| self.velocity(y, i, medium)).collect()
    }

    fn derivative(&self, y: &[T], medium: &ChessboardMedium<T>) -> Vec<T> {
        (0..y.len())
            .map(|i| lit::<T>(self.poly.normal(i).sign() as f64) * self.velocity(y, i, medium))
            .collect()
    }

    fn rk4(&self, y: &[T], dt: T, medium: &ChessboardMedium<T>) -> Vec<T> {
        let add = |y: &[T], k: &[T], f: T| -> Vec<T> {
            y.iter().zip(k).map(|(a, b)| *a + *b * f).collect()
        };
        let half = dt * lit(0.5);
        let k1 = self.derivative(y, medium);
        let k2 = self.derivative(&add(y, &k1, half), medium);
        let k3 = self.derivative(&add(y, &k2, half), medium);
        let k4 = self.derivative(&add(y, &k3, dt), medium);
        let six = dt / lit(6.0);
        (0..y.len())
            .map(|i| y[i] + six * (k1[i] + lit::<T>(2.0) * (k2[i] + k3[i]) + k4[i]))
            .collect()
    }

    /// Events that have happened by the time the offsets are `y`.
    fn fired(&self, y: &[T], medium: &ChessboardMedium<T>) -> Result<Vec<(EventKind, usize)>> {
        let tol = tiny(medium);
        let poly = self.at(y);
        let mut out = Vec::new();
        for i in 0..y.len() {
            let len = poly.signed_length(i);
            if (self.start_len[i] > tol && len <= tol) || (self.start_len[i] <= tol && len < -tol) {
                out.push((EventKind::EdgeVanished, i));
                continue;
            }
            if let Some((lo, hi, on_lo, on_hi)) = self.strips[i] {
                let s = y[i];
                let below = if on_lo { s < lo - tol } else { s <= lo + tol };
                let above = if on_hi { s > hi + tol } else { s >= hi - tol };
                if below || above {
                    out.push((EventKind::HitGridLine, i));
                    continue;
                }
            }
            if len <= tol {
                continue;
            }
            if self.regimes[i].is_pinned() {
                let bv = boundary_velocities(&poly.edge(i, medium), medium)?;
                if !bv.regime().is_pinned() {
                    out.push((EventKind::Unpinned, i));
                }
            } else if let Some(line) = self.lines[i] {
                let (p, q) = self.ends(y, i);
                let (n_p, n_q) = poly.boundary_values(i);
                let trace = medium.trace(poly.normal(i).edge_axis(), line);
                let peak = field_on(&trace, p, q, n_p, n_q, medium)?.max_abs().1.abs();
                if peak > T::one() + T::tol(1e-9) {
                    out.push((EventKind::CalibrabilityLost, i));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

fn snap_all<T: Scalar>(poly: &mut Polyrectangle<T>, medium: &ChessboardMedium<T>) {
    for s in poly.offsets_mut() {
        *s = medium.snap(*s);
    }
}

/// Breaking configuration of `poly`, appending `recracked` and
/// `nonunique_branch` events.
fn rebuild<T: Scalar>(
    poly: &Polyrectangle<T>,
    medium: &ChessboardMedium<T>,
    time: T,
    events: &mut Vec<FlowEvent<T>>,
) -> Result<BreakingConfiguration<T>> {
    let bc = breaking_configuration(poly, medium)?;
    if bc.polyrect.len() > poly.len() {
        let mut counts = vec![0usize; poly.len()];
        for &o in &bc.origin_map {
            counts[o] += 1;
        }
        let edges = (0..poly.len()).filter(|&i| counts[i] > 1).collect();
        events.push(FlowEvent {
            time,
            kind: EventKind::Recracked,
            edges,
        });
    }
    if !bc.unique {
        let edges = (0..bc.regimes.len())
            .filter(|&i| bc.regimes[i] == Regime::Ambiguous)
            .collect();
        events.push(FlowEvent {
            time,
            kind: EventKind::NonuniqueBranch,
            edges,
        });
    }
    if !bc.polyrect.is_simple() {
        return Err(Error::Topology {
            time: time.to_f64().unwrap_or(f64::NAN),
            reason: "boundary portions collided".into(),
        });
    }
    Ok(bc)
}

fn extinct<T: Scalar>(poly: &Polyrectangle<T>, medium: &ChessboardMedium<T>) -> bool {
    let floor = medium.epsilon() * T::tol(1e-5);
    poly.len() < 4 || poly.area() <= T::zero() || (0..poly.len()).all(|i| poly.length(i) < floor)
}

/// Remaining life `A / (−dA/dt)` of a collapsing shape.
fn remaining_life<T: Scalar>(poly: &Polyrectangle<T>, v: &[T]) -> T {
    let rate = (0..poly.len()).fold(T::zero(), |acc, i| acc + v[i] * poly.length(i));
    if rate > T::zero() {
        poly.area().max(T::zero()) / rate
    } else {
        T::zero()
    }
}

/// Removes vanished edges by merging their collinear neighbours. Returns
/// `false` when the shape collapsed altogether.
fn merge_vanished<T: Scalar>(
    poly: &mut Polyrectangle<T>,
    mut flags: Vec<bool>,
    time: T,
) -> Result<bool> {
    while let Some(i) = flags.iter().position(|&f| f) {
        flags[i] = false;
        let m = poly.len();
        if m <= 4 {
            return Ok(false);
        }
        let (a, b) = (poly.prev(i), poly.next(i));
        if poly.normal(a) != poly.normal(b) {
            if poly.area() <= T::zero() {
                return Ok(false);
            }
            return Err(Error::Topology {
                time: time.to_f64().unwrap_or(f64::NAN),
                reason: format!("edge {i} vanished between opposite edges"),
            });
        }
        let merged = (poly.offset(a) + poly.offset(b)) * lit(0.5);
        let mut normals = Vec::with_capacity(m - 2);
        let mut offsets = Vec::with_capacity(m - 2);
        let mut kept = Vec::with_capacity(m - 2);
        for k in 0..m {
            if k == i || k == b {
                continue;
            }
            normals.push(poly.normal(k));
            offsets.push(if k == a { merged } else { poly.offset(k) });
            kept.push(flags[k]);
        }
        *poly = Polyrectangle::new(normals, offsets)?;
        flags = kept;
    }
    Ok(true)
}

fn check_calibrable<T: Scalar>(frame: &Frame<T>, medium: &ChessboardMedium<T>) -> Result<()> {
    let y = frame.poly.offsets().to_vec();
    for (kind, i) in frame.fired(&y, medium)? {
        if kind == EventKind::CalibrabilityLost {
            return Err(Error::NotCalibrable(i));
        }
    }
    Ok(())
}

/// Inward normal velocity of every edge; held edges get zero.
pub fn velocity_field<T: Scalar>(
    state: &FlowState<T>,
    medium: &ChessboardMedium<T>,
) -> Result<Vec<T>> {
    let frame = Frame::new(state, medium);
    check_calibrable(&frame, medium)?;
    Ok(frame.velocities(frame.poly.offsets(), medium))
}

pub fn filippov_intervals<T: Scalar>(
    state: &FlowState<T>,
    medium: &ChessboardMedium<T>,
) -> Result<FilippovIntervals<T>> {
    let frame = Frame::new(state, medium);
    let poly = &frame.poly;
    let tol = tiny(medium);
    let mut intervals = Vec::with_capacity(poly.len());
    for i in 0..poly.len() {
        let e = poly.edge(i, medium);
        let iv = if e.on_grid && poly.length(i) <= tol {
            (medium.alpha(), medium.beta())
        } else if e.on_grid {
            let bv = boundary_velocities(&e, medium)?;
            (bv.v_in.min(bv.v_out), bv.v_in.max(bv.v_out))
        } else {
            let v = frame.velocity(poly.offsets(), i, medium);
            (v, v)
        };
        intervals.push(iv);
    }
    Ok(FilippovIntervals { intervals })
}

/// Integrates until the first event or until `t_stop`.
pub fn advance_to_next_event<T: Scalar>(
    state: &FlowState<T>,
    medium: &ChessboardMedium<T>,
    t_stop: T,
) -> Result<(FlowState<T>, Advance<T>)> {
    advance_with(state, medium, t_stop, &FlowOptions::default())
}

pub fn advance_with<T: Scalar>(
    state: &FlowState<T>,
    medium: &ChessboardMedium<T>,
    t_stop: T,
    opts: &FlowOptions<T>,
) -> Result<(FlowState<T>, Advance<T>)> {
    if t_stop < state.time {
        return Err(Error::TimeReversed {
            time: state.time.to_f64().unwrap_or(f64::NAN),
            t_max: t_stop.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut st = state.clone();
    let h = medium.half_cell();
    let tol_event = opts.tol_event * medium.epsilon();
    loop {
        if st.time >= t_stop {
            return Ok((st, Advance::Reached));
        }
        let frame = Frame::new(&st, medium);
        let y0 = frame.poly.offsets().to_vec();
        let v0 = frame.velocities(&y0, medium);
        let life = remaining_life(&frame.poly, &v0);
        if extinct(&frame.poly, medium) || (life > T::zero() && life <= tol_event) {
            let time = st.time + life;
            let ev = FlowEvent {
                time,
                kind: EventKind::Extinct,
                edges: Vec::new(),
            };
            return Ok((st, Advance::Extinct(ev)));
        }
        let vmax = v0.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        if vmax == T::zero() {
            st.time = t_stop;
            return Ok((st, Advance::Reached));
        }
        let mut dt = (t_stop - st.time).min(opts.max_move * h / vmax);
        for i in 0..y0.len() {
            if frame.lines[i].is_some() && frame.poly.chi(i) > 0 {
                dt = dt.min(lit::<T>(0.1) * frame.start_len[i] / vmax);
            }
        }
        if dt < opts.dt_min * (T::one() + st.time.abs()) {
            return Err(Error::StepCollapse {
                time: st.time.to_f64().unwrap_or(f64::NAN),
                dt_min: opts.dt_min.to_f64().unwrap_or(f64::NAN),
            });
        }
        let y1 = frame.rk4(&y0, dt, medium);
        if frame.fired(&y1, medium)?.is_empty() {
            let mut poly = frame.at(&y1);
            // edges that have left their grid line move freely from now on
            for i in 0..poly.len() {
                let r = st.config.regimes[i];
                if matches!(r, Regime::Inward | Regime::Outward)
                    && !medium.is_on_grid(poly.offset(i))
                {
                    st.config.regimes[i] = Regime::Free;
                }
            }
            std::mem::swap(&mut st.config.polyrect, &mut poly);
            // land exactly on t_stop so output samples sit on the grid
            st.time = if dt >= t_stop - st.time {
                t_stop
            } else {
                st.time + dt
            };
            continue;
        }
        let (mut lo, mut hi) = (T::zero(), dt);
        while hi - lo > tol_event {
            let mid = (lo + hi) * lit(0.5);
            if frame
                .fired(&frame.rk4(&y0, mid, medium), medium)?
                .is_empty()
            {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tw = (hi + tol_event).min(dt);
        let yw = frame.rk4(&y0, tw, medium);
        let fired = frame.fired(&yw, medium)?;
        st.time = st.time + tw;
        return finish_event(st, &frame, yw, fired, medium);
    }
}

fn finish_event<T: Scalar>(
    mut st: FlowState<T>,
    frame: &Frame<T>,
    yw: Vec<T>,
    fired: Vec<(EventKind, usize)>,
    medium: &ChessboardMedium<T>,
) -> Result<(FlowState<T>, Advance<T>)> {
    let time = st.time;
    let mut events: Vec<FlowEvent<T>> = Vec::new();
    for &(kind, i) in &fired {
        match events.last_mut() {
            Some(e) if e.kind == kind => e.edges.push(i),
            _ => events.push(FlowEvent {
                time,
                kind,
                edges: vec![i],
            }),
        }
    }
    let mut poly = frame.at(&yw);
    for &(kind, i) in &fired {
        if kind == EventKind::HitGridLine {
            let s = medium.nearest_grid(poly.offset(i)).1;
            poly.offsets_mut()[i] = s;
        }
    }
    snap_all(&mut poly, medium);
    let mut flags = vec![false; poly.len()];
    for &(kind, i) in &fired {
        if kind == EventKind::EdgeVanished {
            flags[i] = true;
        }
    }
    let alive = merge_vanished(&mut poly, flags, time)?;
    if !alive || extinct(&poly, medium) {
        let v = frame.velocities(&yw, medium);
        let t_end = time + remaining_life(&frame.at(&yw), &v);
        st.config.polyrect = frame.at(&yw);
        return Ok((
            st,
            Advance::Extinct(FlowEvent {
                time: t_end,
                kind: EventKind::Extinct,
                edges: Vec::new(),
            }),
        ));
    }
    let config = rebuild(&poly, medium, time, &mut events)?;
    st.pinned = config.pinned_flags();
    st.non_unique |= !config.unique;
    st.config = config;
    Ok((st, Advance::Events(events)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub time: T,
    pub polyrect: Polyrectangle<T>,
    pub pinned: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination<T> {
    Extinct {
        time: T,
    },
    /// Every edge held from `time` on.
    Stationary {
        time: T,
    },
    ReachedTmax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory<T> {
    pub samples: Vec<Snapshot<T>>,
    pub events: Vec<FlowEvent<T>>,
    pub termination: Termination<T>,
    pub final_state: FlowState<T>,
}

impl<T: Scalar> FlowTrajectory<T> {
    /// Last snapshot taken at or before `t`.
    pub fn snapshot_at(&self, t: T) -> Option<&Snapshot<T>> {
        self.samples.iter().take_while(|s| s.time <= t).last()
    }

    pub fn extinction_time(&self) -> Option<T> {
        match self.termination {
            Termination::Extinct { time } => Some(time),
            _ => None,
        }
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// `time,edge_index,normal,offset,length,pinned` per edge and snapshot.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,edge_index,normal,offset,length,pinned\n");
        for snap in &self.samples {
            let p = &snap.polyrect;
            for i in 0..p.len() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    snap.time,
                    i,
                    p.normal(i).label(),
                    p.offset(i),
                    p.length(i),
                    snap.pinned.get(i).copied().unwrap_or(false)
                );
            }
        }
        s
    }

    /// One `time kind indices` line per event.
    pub fn event_log(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let idx: Vec<String> = e.edges.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "{} {} {}", e.time, e.kind.label(), idx.join(","));
        }
        s
    }
}

fn snapshot<T: Scalar>(st: &FlowState<T>, time: T) -> Snapshot<T> {
    Snapshot {
        time,
        polyrect: st.config.polyrect.clone(),
        pinned: st.pinned.clone(),
    }
}

/// Evolves `initial` up to `t_max`, sampling every `dt_out`.
pub fn run<T: Scalar>(
    initial: &Polyrectangle<T>,
    medium: &ChessboardMedium<T>,
    t_max: T,
    dt_out: T,
) -> Result<FlowTrajectory<T>> {
    run_with(initial, medium, t_max, dt_out, &FlowOptions::default())
}

pub fn run_with<T: Scalar>(
    initial: &Polyrectangle<T>,
    medium: &ChessboardMedium<T>,
    t_max: T,
    dt_out: T,
    opts: &FlowOptions<T>,
) -> Result<FlowTrajectory<T>> {
    if !(dt_out > T::zero()) || t_max < T::zero() {
        return Err(Error::TimeReversed {
            time: 0.0,
            t_max: t_max.to_f64().unwrap_or(f64::NAN),
        });
    }
    for i in 0..initial.len() {
        if initial.chi(i) < 0 {
            return Err(Error::NegativeCurvature(i));
        }
    }
    let (mut st, mut events) = FlowState::new(initial, medium)?;
    let mut samples = vec![snapshot(&st, T::zero())];
    let mut k = 1usize;
    let out_time = |k: usize| (dt_out * lit(k as f64)).min(t_max);
    let tol_event = opts.tol_event * medium.epsilon();
    let (mut cascade, mut last_event) = (0usize, T::zero());
    let termination = loop {
        if st.time >= t_max {
            break Termination::ReachedTmax;
        }
        let frame = Frame::new(&st, medium);
        if frame.lines.iter().all(Option::is_none) {
            let since = st.time;
            while out_time(k) <= t_max && samples.last().is_some_and(|s| s.time < t_max) {
                samples.push(snapshot(&st, out_time(k)));
                k += 1;
            }
            st.time = t_max;
            break Termination::Stationary { time: since };
        }
        let stop = out_time(k);
        let (next, adv) = advance_with(&st, medium, stop, opts)?;
        st = next;
        match adv {
            Advance::Reached => {
                samples.push(snapshot(&st, st.time));
                k += 1;
            }
            Advance::Events(evs) => {
                if st.time - last_event <= tol_event * lit(4.0) {
                    cascade += 1;
                    if cascade > opts.max_cascade {
                        return Err(Error::Topology {
                            time: st.time.to_f64().unwrap_or(f64::NAN),
                            reason: "events do not advance in time".into(),
                        });
                    }
                } else {
                    cascade = 0;
                }
                last_event = st.time;
                events.extend(evs);
                samples.push(snapshot(&st, st.time));
                if st.time >= stop {
                    k += 1;
                }
            }
            Advance::Extinct(ev) => {
                let time = ev.time;
                events.push(ev);
                samples.push(snapshot(&st, st.time));
                break Termination::Extinct { time };
            }
        }
    };
    Ok(FlowTrajectory {
        samples,
        events,
        termination,
        final_state: st,
    })
}
