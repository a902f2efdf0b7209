//! Homogenized motion of squares and rectangles.
//!
//! With `c = α + β`, a rectangle `R(ℓ1, ℓ2)` centred at the origin either
//! shrinks under
//!
//! ```text
//! ℓ1' = −4/ℓ2 − c,   ℓ2' = −4/ℓ1 − c
//! ```
//!
//! or, when its long sides get pinned, turns into the octagon
//! `{|x| + |y| ≤ r} ∩ R(L1, L2)` whose axis-parallel edges have lengths
//! `ℓi` with `ℓi' = 4/ℓi + c`, `L1 = 2r − ℓ2` and `L2 = 2r − ℓ1`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    SquareShrink,
    SquareConfine,
    RectShrink,
    RectConfine,
    RectMixedJZero,
    RectMixedJNeg,
    RectMixedJPos,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::SquareShrink => "square_shrink",
            CaseTag::SquareConfine => "square_confine",
            CaseTag::RectShrink => "rect_shrink",
            CaseTag::RectConfine => "rect_confine",
            CaseTag::RectMixedJZero => "rect_mixed_J_zero",
            CaseTag::RectMixedJNeg => "rect_mixed_J_neg",
            CaseTag::RectMixedJPos => "rect_mixed_J_pos",
        }
    }
}

/// Limit shape, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape<T> {
    Square {
        l: T,
    },
    /// `l1` horizontal, `l2` vertical.
    Rectangle {
        l1: T,
        l2: T,
    },
    /// `{|x| + |y| ≤ radius}` cut by a rectangle; `l1`, `l2` are the lengths
    /// of its horizontal and vertical edges.
    Octagon {
        radius: T,
        l1: T,
        l2: T,
    },
    /// Equilibrium octagon reached as `t → ∞`.
    StationaryOctagon {
        radius: T,
        l: T,
    },
    Point,
}

impl<T: Scalar> Shape<T> {
    /// Counterclockwise vertices (empty for a point).
    pub fn vertices(&self) -> Vec<Point<T>> {
        let half = lit::<T>(0.5);
        let rect = |w: T, h: T| {
            let (x, y) = (w * half, h * half);
            vec![
                Point::new(-x, -y),
                Point::new(x, -y),
                Point::new(x, y),
                Point::new(-x, y),
            ]
        };
        let oct = |r: T, l1: T, l2: T| {
            let (a, b) = (l1 * half, l2 * half);
            let (x, y) = (r - b, r - a);
            vec![
                Point::new(-a, -y),
                Point::new(a, -y),
                Point::new(x, -b),
                Point::new(x, b),
                Point::new(a, y),
                Point::new(-a, y),
                Point::new(-x, b),
                Point::new(-x, -b),
            ]
        };
        match *self {
            Shape::Square { l } => rect(l, l),
            Shape::Rectangle { l1, l2 } => rect(l1, l2),
            Shape::Octagon { radius, l1, l2 } => oct(radius, l1, l2),
            Shape::StationaryOctagon { radius, l } => oct(radius, l, l),
            Shape::Point => Vec::new(),
        }
    }

    /// Width and height of the bounding box.
    pub fn extent(&self) -> (T, T) {
        let two = lit::<T>(2.0);
        match *self {
            Shape::Square { l } => (l, l),
            Shape::Rectangle { l1, l2 } => (l1, l2),
            Shape::Octagon { radius, l1, l2 } => (two * radius - l2, two * radius - l1),
            Shape::StationaryOctagon { radius, l } => (two * radius - l, two * radius - l),
            Shape::Point => (T::zero(), T::zero()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Shape::Square { .. } => "square",
            Shape::Rectangle { .. } => "rectangle",
            Shape::Octagon { .. } => "octagon",
            Shape::StationaryOctagon { .. } => "stationary_octagon",
            Shape::Point => "point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveState<T> {
    pub time: T,
    pub shape: Shape<T>,
    pub case: CaseTag,
    pub extinction_time: Option<T>,
    /// Mixed rectangles: time at which the shape becomes an octagon (J > 0)
    /// or the long side drops below `−4/(α+β)` (J < 0).
    pub switch_time: Option<T>,
}

pub fn classify_square<T: Scalar>(l0: T, alpha: T, beta: T) -> CaseTag {
    let c = alpha + beta;
    if c >= T::zero() || l0 <= -lit::<T>(4.0) / c {
        CaseTag::SquareShrink
    } else {
        CaseTag::SquareConfine
    }
}

/// `(U, J)` at `(ℓ1, ℓ2)`.
pub fn invariants<T: Scalar>(l1: T, l2: T, alpha: T, beta: T) -> Result<(T, T)> {
    if !(l1 > T::zero() && l2 > T::zero()) {
        return Err(Error::InvalidEffective("lengths must be positive".into()));
    }
    let c = alpha + beta;
    let four = lit::<T>(4.0);
    let u = l1.recip() + l2.recip() + c / lit(2.0);
    let j = four * (l2.ln() - l1.ln()) + c * (l2 - l1);
    Ok((u, j))
}

/// Tolerance below which `J` counts as zero.
fn j_tolerance<T: Scalar>(l1: T, l2: T) -> T {
    T::tol(1e-12) * (T::one() + l1.abs() + l2.abs())
}

pub fn classify_rectangle<T: Scalar>(l1: T, l2: T, alpha: T, beta: T) -> Result<CaseTag> {
    let (l1, l2) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
    let c = alpha + beta;
    let two = lit::<T>(2.0);
    let v1 = two / l1 + c / two;
    let v2 = two / l2 + c / two;
    let z = T::zero();
    Ok(if v1 >= z && v2 >= z {
        CaseTag::RectShrink
    } else if v2 < z || v1 + v2 <= z {
        CaseTag::RectConfine
    } else {
        let (_, j) = invariants(l1, l2, alpha, beta)?;
        if j.abs() <= j_tolerance(l1, l2) {
            CaseTag::RectMixedJZero
        } else if j < z {
            CaseTag::RectMixedJNeg
        } else {
            CaseTag::RectMixedJPos
        }
    })
}

type State<T> = [T; 2];

/// Dormand–Prince 5(4) step; returns the fifth-order solution and an error
/// estimate.
fn dopri_step<T: Scalar, F: Fn(State<T>) -> State<T>>(f: &F, y: State<T>, h: T) -> (State<T>, T) {
    let c = |x: f64| lit::<T>(x);
    let add = |y: State<T>, ks: &[(f64, State<T>)]| {
        let mut out = y;
        for &(a, k) in ks {
            for i in 0..2 {
                out[i] = out[i] + h * c(a) * k[i];
            }
        }
        out
    };
    let k1 = f(y);
    let k2 = f(add(y, &[(1.0 / 5.0, k1)]));
    let k3 = f(add(y, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]));
    let k4 = f(add(
        y,
        &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
    ));
    let k5 = f(add(
        y,
        &[
            (19372.0 / 6561.0, k1),
            (-25360.0 / 2187.0, k2),
            (64448.0 / 6561.0, k3),
            (-212.0 / 729.0, k4),
        ],
    ));
    let k6 = f(add(
        y,
        &[
            (9017.0 / 3168.0, k1),
            (-355.0 / 33.0, k2),
            (46732.0 / 5247.0, k3),
            (49.0 / 176.0, k4),
            (-5103.0 / 18656.0, k5),
        ],
    ));
    let y5 = add(
        y,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = f(y5);
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let ks = [k1, k2, k3, k4, k5, k6, k7];
    let mut err = T::zero();
    for i in 0..2 {
        let mut d = T::zero();
        for (w, k) in e.iter().zip(ks.iter()) {
            d = d + c(*w) * k[i];
        }
        let scale = lit::<T>(1e-12) + rtol::<T>() * y[i].abs().max(y5[i].abs());
        err = err.max((h * d).abs() / scale);
    }
    (y5, err)
}

const RTOL_F64: f64 = 1e-9;

fn rtol<T: Scalar>() -> T {
    T::tol(RTOL_F64)
}

/// Outcome of an integration leg.
enum Stop<T> {
    Reached(State<T>),
    Extinct { time: T },
    Event { time: T, state: State<T> },
}

/// Integrates `y' = f(y)` from `t0` to `t1`. Stops at extinction (some
/// component below `floor`) or at the first zero of `event` from positive to
/// non-positive values.
fn integrate<T: Scalar, F, G>(
    f: &F,
    y0: State<T>,
    t0: T,
    t1: T,
    floor: T,
    event: Option<&G>,
) -> Result<Stop<T>>
where
    F: Fn(State<T>) -> State<T>,
    G: Fn(State<T>) -> T,
{
    let mut t = t0;
    let mut y = y0;
    if t1 <= t0 {
        return Ok(Stop::Reached(y));
    }
    let mut h = (t1 - t0) * lit(1e-3);
    let safety = lit::<T>(0.9);
    for _ in 0..10_000_000 {
        if y[0].min(y[1]) < floor {
            return Ok(Stop::Extinct {
                time: t + remaining_life(y, f),
            });
        }
        if t >= t1 {
            return Ok(Stop::Reached(y));
        }
        h = h.min(t1 - t);
        let (yn, err) = dopri_step(f, y, h);
        let bad = yn.iter().any(|v| !v.is_finite() || *v <= T::zero());
        if bad || err > T::one() {
            let shrink = if bad {
                lit(0.25)
            } else {
                (safety * err.powf(lit(-0.2))).max(lit(0.1))
            };
            h = h * shrink;
            if h <= t.abs().max(T::one()) * T::epsilon() * lit(4.0) {
                // the step can no longer resolve the collapse
                return Ok(Stop::Extinct {
                    time: t + remaining_life(y, f),
                });
            }
            continue;
        }
        if let Some(g) = event {
            if g(y) > T::zero() && g(yn) <= T::zero() {
                let (mut lo, mut hi) = (T::zero(), h);
                let ttol = lit::<T>(1e-10).max(t.abs() * T::epsilon() * lit(8.0));
                while hi - lo > ttol {
                    let mid = (lo + hi) * lit(0.5);
                    if g(dopri_step(f, y, mid).0) > T::zero() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(Stop::Event {
                    time: t + hi,
                    state: dopri_step(f, y, hi).0,
                });
            }
        }
        t = t + h;
        y = yn;
        let grow = if err > T::zero() {
            (safety * err.powf(lit(-0.2))).min(lit(5.0))
        } else {
            lit(5.0)
        };
        h = h * grow;
    }
    Err(Error::InvalidEffective(
        "integration did not terminate".into(),
    ))
}

/// Time left before extinction, from `d(ℓ1ℓ2)/dt ≈ −8` near the collapse.
fn remaining_life<T: Scalar, F: Fn(State<T>) -> State<T>>(y: State<T>, f: &F) -> T {
    let d = f(y);
    let rate = -(y[0] * d[1] + y[1] * d[0]);
    if rate > T::zero() {
        y[0] * y[1] / rate
    } else {
        T::zero()
    }
}

fn check_time<T: Scalar>(t: T) -> Result<()> {
    if t < T::zero() || !t.is_finite() {
        return Err(Error::InvalidEffective(format!(
            "time {t} must be non-negative"
        )));
    }
    Ok(())
}

fn extinction_floor<T: Scalar>(l: T) -> T {
    T::tol(1e-6) * l
}

/// Square states at the given (non-decreasing) times.
pub fn square_states<T: Scalar>(
    l0: T,
    alpha: T,
    beta: T,
    times: &[T],
) -> Result<Vec<EffectiveState<T>>> {
    if !(l0 > T::zero()) {
        return Err(Error::InvalidEffective("side must be positive".into()));
    }
    let case = classify_square(l0, alpha, beta);
    let c = alpha + beta;
    let four = lit::<T>(4.0);
    let sign = if case == CaseTag::SquareShrink {
        -T::one()
    } else {
        T::one()
    };
    let f = move |y: State<T>| {
        let d = sign * (four / y[0] + c);
        [d, d]
    };
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut y) = (T::zero(), [l0, l0]);
    let mut dead: Option<T> = None;
    let floor = extinction_floor(l0);
    for &tt in times {
        check_time(tt)?;
        if tt < t {
            return Err(Error::InvalidEffective(
                "times must be non-decreasing".into(),
            ));
        }
        if dead.is_none() {
            match integrate::<T, _, fn(State<T>) -> T>(&f, y, t, tt, floor, None)? {
                Stop::Reached(yn) => y = yn,
                Stop::Extinct { time } => dead = Some(time),
                Stop::Event { .. } => unreachable!(),
            }
            t = tt;
        }
        let shape = match (case, dead) {
            (_, Some(te)) if tt >= te => Shape::Point,
            (_, Some(_)) => Shape::Square { l: T::zero() },
            (CaseTag::SquareShrink, None) => Shape::Square { l: y[0] },
            _ => Shape::Octagon {
                radius: l0,
                l1: y[0],
                l2: y[0],
            },
        };
        out.push(EffectiveState {
            time: tt,
            shape,
            case,
            extinction_time: dead,
            switch_time: None,
        });
    }
    Ok(out)
}

pub fn integrate_square<T: Scalar>(l0: T, alpha: T, beta: T, t: T) -> Result<EffectiveState<T>> {
    Ok(square_states(l0, alpha, beta, &[t])?[0])
}

/// Closed-form extinction time of a shrinking square.
pub fn square_extinction_time<T: Scalar>(l0: T, alpha: T, beta: T) -> Option<T> {
    let c = alpha + beta;
    let four = lit::<T>(4.0);
    if c == T::zero() {
        return Some(l0 * l0 / lit(8.0));
    }
    if c < T::zero() && l0 >= -four / c {
        return None;
    }
    Some(l0 / c - four / (c * c) * (T::one() + c * l0 / four).ln())
}

/// Rectangle states at the given (non-decreasing) times. `l1` is the
/// horizontal side.
pub fn rectangle_states<T: Scalar>(
    l10: T,
    l20: T,
    alpha: T,
    beta: T,
    times: &[T],
) -> Result<Vec<EffectiveState<T>>> {
    invariants(l10, l20, alpha, beta)?;
    let case = classify_rectangle(l10, l20, alpha, beta)?;
    let c = alpha + beta;
    let four = lit::<T>(4.0);
    let shrink = move |y: State<T>| [-four / y[1] - c, -four / y[0] - c];
    let confine = move |y: State<T>| [four / y[0] + c, four / y[1] + c];
    // mixed J > 0: first zero of U; mixed J < 0: long side reaches −4/c
    let star = -four / c;
    let event = move |y: State<T>| match case {
        CaseTag::RectMixedJPos => y[0].recip() + y[1].recip() + c / lit(2.0),
        _ => y[0] - star,
    };
    let floor = extinction_floor(l10.max(l20));
    // integrate with the long side first
    let flip = l10 < l20;
    let (l10, l20) = if flip { (l20, l10) } else { (l10, l20) };

    // frame radius once the octagon phase has started
    let mut octagon: Option<T> = match case {
        CaseTag::RectConfine => Some((l10 + l20) / lit(2.0)),
        _ => None,
    };
    let mut switch_time = None;
    let mut dead: Option<T> = None;
    let (mut t, mut y) = (T::zero(), [l10, l20]);
    let mut out = Vec::with_capacity(times.len());
    for &tt in times {
        check_time(tt)?;
        if tt < t {
            return Err(Error::InvalidEffective(
                "times must be non-decreasing".into(),
            ));
        }
        while dead.is_none() && t < tt {
            if octagon.is_some() {
                match integrate::<T, _, fn(State<T>) -> T>(&confine, y, t, tt, floor, None)? {
                    Stop::Reached(yn) => y = yn,
                    _ => return Err(Error::InvalidEffective("octagon edge collapsed".into())),
                }
                t = tt;
            } else {
                let mixed = matches!(case, CaseTag::RectMixedJPos | CaseTag::RectMixedJNeg);
                let ev = (mixed && switch_time.is_none()).then_some(&event);
                match integrate(&shrink, y, t, tt, floor, ev)? {
                    Stop::Reached(yn) => {
                        y = yn;
                        t = tt;
                    }
                    Stop::Extinct { time } => dead = Some(time),
                    Stop::Event { time, state } => {
                        if case == CaseTag::RectMixedJPos {
                            octagon = Some((state[0] + state[1]) / lit(2.0));
                        }
                        switch_time = Some(time);
                        t = time;
                        y = state;
                    }
                }
            }
        }
        let (a, b) = if flip { (y[1], y[0]) } else { (y[0], y[1]) };
        let shape = match (dead, octagon) {
            (Some(_), _) => Shape::Point,
            (None, Some(radius)) => Shape::Octagon {
                radius,
                l1: a,
                l2: b,
            },
            (None, None) if a == b => Shape::Square { l: a },
            (None, None) => Shape::Rectangle { l1: a, l2: b },
        };
        out.push(EffectiveState {
            time: tt,
            shape,
            case,
            extinction_time: dead,
            switch_time,
        });
    }
    Ok(out)
}

/// Solutions of the shrinking-rectangle system alone (no regime switch) at
/// the given non-decreasing times; `None` once it has collapsed.
pub fn shrink_system_states<T: Scalar>(
    l10: T,
    l20: T,
    alpha: T,
    beta: T,
    times: &[T],
) -> Result<Vec<Option<(T, T)>>> {
    invariants(l10, l20, alpha, beta)?;
    let c = alpha + beta;
    let four = lit::<T>(4.0);
    let f = move |y: State<T>| [-four / y[1] - c, -four / y[0] - c];
    let floor = extinction_floor(l10.max(l20));
    let (mut t, mut y) = (T::zero(), [l10, l20]);
    let mut alive = true;
    let mut out = Vec::with_capacity(times.len());
    for &tt in times {
        check_time(tt)?;
        if tt < t {
            return Err(Error::InvalidEffective(
                "times must be non-decreasing".into(),
            ));
        }
        if alive {
            match integrate::<T, _, fn(State<T>) -> T>(&f, y, t, tt, floor, None)? {
                Stop::Reached(yn) => y = yn,
                _ => alive = false,
            }
            t = tt;
        }
        out.push(alive.then_some((y[0], y[1])));
    }
    Ok(out)
}

pub fn integrate_rectangle<T: Scalar>(
    l10: T,
    l20: T,
    alpha: T,
    beta: T,
    t: T,
) -> Result<EffectiveState<T>> {
    Ok(rectangle_states(l10, l20, alpha, beta, &[t])?[0])
}

/// The `t → ∞` limit of a confined square.
pub fn square_limit<T: Scalar>(l0: T, alpha: T, beta: T) -> Shape<T> {
    match classify_square(l0, alpha, beta) {
        CaseTag::SquareConfine => Shape::StationaryOctagon {
            radius: l0,
            l: -lit::<T>(4.0) / (alpha + beta),
        },
        _ => Shape::Point,
    }
}

/// One line per state: `t,l1,l2,U,J,shape` (moving-edge lengths for
/// octagons).
pub fn states_csv<T: Scalar>(states: &[EffectiveState<T>], alpha: T, beta: T) -> String {
    let mut s = String::from("t,l1,l2,U,J,shape\n");
    for st in states {
        let (l1, l2) = match st.shape {
            Shape::Square { l } => (l, l),
            Shape::Rectangle { l1, l2 } | Shape::Octagon { l1, l2, .. } => (l1, l2),
            Shape::StationaryOctagon { l, .. } => (l, l),
            Shape::Point => (T::zero(), T::zero()),
        };
        let (u, j) = invariants(l1, l2, alpha, beta).unwrap_or((T::nan(), T::nan()));
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            st.time,
            l1,
            l2,
            u,
            j,
            st.shape.label()
        );
    }
    s
}

/// SVG of one or more limit shapes drawn on a common scale.
pub fn shapes_svg<T: Scalar>(shapes: &[Shape<T>], size: u32) -> String {
    let extent = shapes
        .iter()
        .map(|s| {
            let (w, h) = s.extent();
            w.max(h).to_f64().unwrap_or(0.0)
        })
        .fold(1e-9, f64::max);
    let scale = 0.45 * size as f64 / (0.5 * extent);
    let mid = size as f64 / 2.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    for (k, shape) in shapes.iter().enumerate() {
        let pts: Vec<String> = shape
            .vertices()
            .iter()
            .map(|p| {
                let x = mid + scale * p.x.to_f64().unwrap_or(0.0);
                let y = mid - scale * p.y.to_f64().unwrap_or(0.0);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let shade = 30 + (k * 40) % 200;
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"rgb({shade},{shade},{shade})\" stroke-width=\"1\"/>",
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Phase portrait of the rectangle system on `[0, lmax]²`: trajectories from
/// a grid of initial data, with the region `{U > 0} ∩ {ℓ2 ≤ −4/c ≤ ℓ1}`
/// shaded.
pub fn phase_portrait_svg<T: Scalar>(alpha: T, beta: T, lmax: T, size: u32) -> Result<String> {
    let c = (alpha + beta).to_f64().unwrap_or(0.0);
    let lm = lmax.to_f64().unwrap_or(1.0);
    let px = |v: f64| 20.0 + (size as f64 - 40.0) * v / lm;
    let py = |v: f64| size as f64 - 20.0 - (size as f64 - 40.0) * v / lm;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    if c < 0.0 {
        let star = -4.0 / c;
        // A: ℓ1 ≥ ℓ*, ℓ2 ≤ ℓ*, 1/ℓ1 + 1/ℓ2 > −c/2
        let mut pts = Vec::new();
        let n = 200;
        for i in 0..=n {
            let l1 = star + (lm - star) * i as f64 / n as f64;
            let lim = 1.0 / (-c / 2.0 - 1.0 / l1);
            let top = if lim > 0.0 { lim.min(star) } else { star };
            pts.push(format!("{:.2},{:.2}", px(l1), py(top)));
        }
        pts.push(format!("{:.2},{:.2}", px(lm), py(0.0)));
        pts.push(format!("{:.2},{:.2}", px(star), py(0.0)));
        let _ = writeln!(
            s,
            "<polygon points=\"{}\" fill=\"#dde\" stroke=\"none\"/>",
            pts.join(" ")
        );
    }
    let _ = writeln!(
        s,
        "<path d=\"M{:.1},{:.1} L{:.1},{:.1} L{:.1},{:.1}\" stroke=\"black\" fill=\"none\"/>",
        px(0.0),
        py(lm),
        px(0.0),
        py(0.0),
        px(lm),
        py(0.0)
    );
    let k = 6;
    for i in 1..=k {
        for j in 1..=k {
            let (a, b) = (
                lm * i as f64 / (k as f64 + 1.0),
                lm * j as f64 / (k as f64 + 1.0),
            );
            let times: Vec<f64> = (0..=60).map(|n| n as f64 * 0.05).collect();
            let shrink = |y: State<f64>| [-4.0 / y[1] - c, -4.0 / y[0] - c];
            let mut y = [a, b];
            let mut pts = vec![format!("{:.2},{:.2}", px(a), py(b))];
            for w in times.windows(2) {
                match integrate::<f64, _, fn(State<f64>) -> f64>(
                    &shrink, y, w[0], w[1], 1e-6, None,
                )? {
                    Stop::Reached(yn) if yn[0] <= lm && yn[1] <= lm => y = yn,
                    _ => break,
                }
                pts.push(format!("{:.2},{:.2}", px(y[0]), py(y[1])));
            }
            let _ = writeln!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.7\"/>",
                pts.join(" ")
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_cases() {
        assert_eq!(classify_square(5.0, -1.0, 1.0), CaseTag::SquareShrink);
        assert_eq!(classify_square(3.0, -3.0, 1.0), CaseTag::SquareConfine);
        assert_eq!(classify_square(2.0, -3.0, 1.0), CaseTag::SquareShrink);
    }

    #[test]
    fn balanced_square_extinction() {
        let st = integrate_square(2.0f64, -1.0, 1.0, 0.25).unwrap();
        match st.shape {
            Shape::Square { l } => assert!((l - (4.0f64 - 2.0).sqrt()).abs() < 1e-8),
            s => panic!("{s:?}"),
        }
        let end = integrate_square(2.0f64, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(end.shape, Shape::Point);
        let te = end.extinction_time.unwrap();
        assert!((te - 0.5).abs() < 1e-7, "{te}");
    }

    #[test]
    fn shrinking_square_matches_closed_form() {
        for &(l0, a, b) in &[(1.0f64, -3.0, 1.0), (3.0, -1.0, 2.0), (1.5, -2.0, 1.0)] {
            let te = square_extinction_time(l0, a, b).unwrap();
            let st = integrate_square(l0, a, b, te + 1.0).unwrap();
            assert!(
                (st.extinction_time.unwrap() - te).abs() < 1e-8 * (1.0 + te),
                "{l0} {a} {b}"
            );
        }
    }

    #[test]
    fn identity_at_time_zero() {
        assert_eq!(
            integrate_square(1.3, -1.0, 1.0, 0.0).unwrap().shape,
            Shape::Square { l: 1.3 }
        );
        assert_eq!(
            integrate_rectangle(4.0, 1.3, -3.0, 1.0, 0.0).unwrap().shape,
            Shape::Rectangle { l1: 4.0, l2: 1.3 }
        );
    }

    #[test]
    fn confined_square_approaches_equilibrium() {
        let st = integrate_square(3.0f64, -3.0, 1.0, 60.0).unwrap();
        match st.shape {
            Shape::Octagon { radius, l1, .. } => {
                assert_eq!(radius, 3.0);
                assert!((l1 - 2.0).abs() < 1e-6);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn rectangle_cases_and_invariants() {
        assert_eq!(
            classify_rectangle(3.0, 1.0, -1.0, 1.0).unwrap(),
            CaseTag::RectShrink
        );
        // v1 + v2 = 0 exactly: the boundary belongs to the confining case
        assert_eq!(
            classify_rectangle(3.0, 1.5, -3.0, 1.0).unwrap(),
            CaseTag::RectConfine
        );
        assert_eq!(
            classify_rectangle(4.0, 1.3, -3.0, 1.0).unwrap(),
            CaseTag::RectMixedJPos
        );
        assert_eq!(
            classify_rectangle(3.0, 1.2, -3.0, 1.0).unwrap(),
            CaseTag::RectMixedJNeg
        );
        let (u, j) = invariants(3.0, 1.5, -3.0, 1.0).unwrap();
        assert!((j - (3.0 - 4.0 * 2f64.ln())).abs() < 1e-12);
        assert!((u - (1.0 / 3.0 + 1.0 / 1.5 - 1.0)).abs() < 1e-15);
        assert_eq!(invariants(2.0, 2.0, -3.0, 1.0).unwrap(), (0.0, 0.0));
        assert!(invariants(0.0, 1.0, -3.0, 1.0).is_err());
        assert_eq!(
            classify_rectangle(4.0, 3.0, -3.0, 1.0).unwrap(),
            CaseTag::RectConfine
        );
    }

    #[test]
    fn mixed_positive_switches_to_octagon() {
        let st = integrate_rectangle(4.0f64, 1.3, -3.0, 1.0, 40.0).unwrap();
        let ts = st.switch_time.expect("switch");
        assert!(ts > 0.0);
        match st.shape {
            Shape::Octagon { l1, l2, .. } => {
                assert!((l1 - 2.0).abs() < 1e-3 && (l2 - 2.0).abs() < 1e-3);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn shrink_system_keeps_j() {
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
        let (_, j0) = invariants(3.0, 1.5, -3.0, 1.0).unwrap();
        for s in shrink_system_states(3.0, 1.5, -3.0, 1.0, &times).unwrap() {
            let (a, b) = s.unwrap();
            let (_, j) = invariants(a, b, -3.0, 1.0).unwrap();
            assert!((j - j0).abs() < 1e-8);
        }
        let late = shrink_system_states(1.0f64, 0.8, -1.0, 1.0, &[0.0, 5.0]).unwrap();
        assert!(late[0].is_some() && late[1].is_none());
    }

    #[test]
    fn octagon_vertices_lie_on_frame() {
        let s = Shape::Octagon {
            radius: 3.0f64,
            l1: 2.0,
            l2: 1.0,
        };
        let v = s.vertices();
        assert_eq!(v.len(), 8);
        for p in v {
            assert!(p.x.abs() + p.y.abs() <= 3.0 + 1e-12);
        }
        assert_eq!(s.extent(), (5.0, 4.0));
    }

    #[test]
    fn exports() {
        let states = rectangle_states(3.0, 1.5, -3.0, 1.0, &[0.0, 0.5, 1.0]).unwrap();
        let csv = states_csv(&states, -3.0, 1.0);
        assert_eq!(csv.lines().count(), 4);
        assert!(shapes_svg(&[states[0].shape, states[2].shape], 200).contains("<polygon"));
        assert!(phase_portrait_svg(-3.0, 1.0, 5.0, 300)
            .unwrap()
            .contains("polyline"));
    }
}
