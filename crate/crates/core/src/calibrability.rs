//! Calibrability of single edges lying off the discontinuity grid.
//!
//! Along an edge `[p, q]` the candidate Cahn–Hoffmann field is the
//! piecewise-affine function
//!
//! ```text
//! n(s) = n(p) + (s − p)·v − ∫_p^s γ
//! ```
//!
//! where `γ` is the trace of the forcing and `v = (2χ + ∫_p^q γ)/ℓ` is the only
//! velocity compatible with both endpoint values. The edge is calibrable when
//! `|n| ≤ 1` on `[p, q]`; since `n` is affine between jumps of `γ` it is enough
//! to look at `p`, `q` and the jumps.

use crate::error::{Error, Result};
use crate::geometry::EdgeView;
use crate::medium::{ChessboardMedium, EndpointState, JumpKind, LineTrace, Phase};
use crate::scalar::{lit, Scalar};

/// The field sampled at its breakpoints, with the facet velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateField<T> {
    /// `(position, value)` at `p`, every interior jump, and `q`.
    pub breakpoints: Vec<(T, T)>,
    pub velocity: T,
}

impl<T: Scalar> CandidateField<T> {
    /// Breakpoint where `|n|` is largest.
    pub fn max_abs(&self) -> (T, T) {
        self.breakpoints
            .iter()
            .copied()
            .fold((T::zero(), T::zero()), |best, bp| {
                if bp.1.abs() > best.1.abs() {
                    bp
                } else {
                    best
                }
            })
    }

    /// Value at `s` by linear interpolation between breakpoints.
    pub fn value_at(&self, s: T) -> T {
        let bp = &self.breakpoints;
        if s <= bp[0].0 {
            return bp[0].1;
        }
        for w in bp.windows(2) {
            let ((a, na), (b, nb)) = (w[0], w[1]);
            if s <= b {
                if b == a {
                    return nb;
                }
                return na + (nb - na) * (s - a) / (b - a);
            }
        }
        bp[bp.len() - 1].1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrabilityVerdict<T> {
    pub calibrable: bool,
    /// Facet velocity; meaningful only for calibrable edges (the formal value
    /// is kept otherwise).
    pub velocity: T,
    /// Breakpoint `(position, value)` with `|value| > 1`.
    pub violation: Option<(T, T)>,
}

/// Thresholds of the positive-curvature case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakingThresholds<T> {
    pub sigma_tilde: T,
    pub sigma_star: T,
    pub m: T,
    pub h: T,
    /// Length between the first `β → α` and last `α → β` jumps after the
    /// end runs are removed.
    pub ell_tilde: T,
    pub ell_star: T,
}

/// Slack allowed on `|n| ≤ 1`.
pub fn field_tolerance<T: Scalar>() -> T {
    T::tol(1e-12)
}

fn check_edge<T: Scalar>(edge: &EdgeView<T>, medium: &ChessboardMedium<T>) -> Result<LineTrace<T>> {
    if edge.on_grid || medium.is_on_grid(edge.line_offset) {
        return Err(Error::EdgeOnGrid(edge.index));
    }
    if edge.length() <= T::zero() {
        return Err(Error::DegenerateEdge(edge.index));
    }
    Ok(medium.trace(edge.axis(), edge.line_offset))
}

/// Jumps strictly between `p` and `q` (endpoints sitting on a jump excluded).
fn interior_jumps<T: Scalar>(
    trace: &LineTrace<T>,
    p: T,
    q: T,
    medium: &ChessboardMedium<T>,
) -> Result<Vec<(T, JumpKind)>> {
    let tol = medium.tol_grid();
    Ok(medium
        .jumps_in(trace, p, q)?
        .into_iter()
        .filter(|&(s, _)| s > p + tol && s < q - tol)
        .collect())
}

/// Velocity `χ·2/ℓ + (α+β)/2 + ((β−α)/(2ℓ))(ℓ_β − ℓ_α)` for a sub-interval.
pub fn facet_velocity<T: Scalar>(
    chi: i8,
    trace: &LineTrace<T>,
    p: T,
    q: T,
    medium: &ChessboardMedium<T>,
) -> Result<T> {
    let d = medium.phase_decomposition(trace, p, q)?;
    let two = lit::<T>(2.0);
    Ok(lit::<T>(chi as f64) * two / d.ell
        + medium.mean()
        + medium.contrast() / (two * d.ell) * (d.ell_beta - d.ell_alpha))
}

pub fn candidate_field<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CandidateField<T>> {
    let trace = check_edge(edge, medium)?;
    field_on(&trace, edge.p, edge.q, edge.n_p, edge.n_q, medium)
}

/// Candidate field on `[p, q]` of the line `trace` with prescribed endpoint
/// values.
pub fn field_on<T: Scalar>(
    trace: &LineTrace<T>,
    p: T,
    q: T,
    n_p: i8,
    n_q: i8,
    medium: &ChessboardMedium<T>,
) -> Result<CandidateField<T>> {
    if q <= p {
        return Err(Error::EmptyInterval);
    }
    let chi = (n_q - n_p) / 2;
    let v = facet_velocity(chi, trace, p, q, medium)?;
    let np = lit::<T>(n_p as f64);
    let mut breakpoints = vec![(p, np)];
    for (s, _) in interior_jumps(trace, p, q, medium)? {
        breakpoints.push((s, np + (s - p) * v - medium.integral(trace, p, s)));
    }
    breakpoints.push((q, np + (q - p) * v - medium.integral(trace, p, q)));
    Ok(CandidateField {
        breakpoints,
        velocity: v,
    })
}

fn verdict_from_field<T: Scalar>(field: &CandidateField<T>) -> CalibrabilityVerdict<T> {
    let (s, n) = field.max_abs();
    let calibrable = n.abs() <= T::one() + field_tolerance::<T>();
    CalibrabilityVerdict {
        calibrable,
        velocity: field.velocity,
        violation: (!calibrable).then_some((s, n)),
    }
}

/// Exhaustive check of `|n| ≤ 1` at every breakpoint.
pub fn oracle_is_calibrable<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CalibrabilityVerdict<T>> {
    Ok(verdict_from_field(&candidate_field(edge, medium)?))
}

/// Same as [`oracle_is_calibrable`] on an arbitrary sub-interval.
pub fn oracle_on<T: Scalar>(
    trace: &LineTrace<T>,
    p: T,
    q: T,
    n_p: i8,
    n_q: i8,
    medium: &ChessboardMedium<T>,
) -> Result<CalibrabilityVerdict<T>> {
    Ok(verdict_from_field(&field_on(
        trace, p, q, n_p, n_q, medium,
    )?))
}

/// Witness for a closed-form negative verdict: the field's worst breakpoint.
fn rejected<T: Scalar>(
    trace: &LineTrace<T>,
    edge: &EdgeView<T>,
    v: T,
    medium: &ChessboardMedium<T>,
) -> Result<CalibrabilityVerdict<T>> {
    let f = field_on(trace, edge.p, edge.q, edge.n_p, edge.n_q, medium)?;
    Ok(CalibrabilityVerdict {
        calibrable: false,
        velocity: v,
        violation: Some(f.max_abs()),
    })
}

fn accepted<T: Scalar>(v: T) -> CalibrabilityVerdict<T> {
    CalibrabilityVerdict {
        calibrable: true,
        velocity: v,
        violation: None,
    }
}

/// Closed-form verdict for edges with zero curvature.
pub fn classify_zero_curvature<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CalibrabilityVerdict<T>> {
    if edge.chi != 0 {
        return Err(Error::WrongCurvature(edge.chi, "zero"));
    }
    let trace = check_edge(edge, medium)?;
    let v = facet_velocity(0, &trace, edge.p, edge.q, medium)?;
    if interior_jumps(&trace, edge.p, edge.q, medium)?.is_empty() {
        return Ok(accepted(v));
    }
    let sp = medium.endpoint_state(&trace, edge.p);
    let sq = medium.endpoint_state(&trace, edge.q);
    let (first, last) = (sp.right_phase(), sq.left_phase());
    // n0 = +1 needs the field to dip first (β) and recover last (α);
    // n0 = −1 is the mirror image.
    let (lead, trail, kind) = if edge.n_p > 0 {
        (Phase::Beta, Phase::Alpha, JumpKind::AlphaToBeta)
    } else {
        (Phase::Alpha, Phase::Beta, JumpKind::BetaToAlpha)
    };
    let ok = first == lead
        && last == trail
        && (edge.length() < medium.epsilon() - medium.tol_grid()
            || (sp == EndpointState::Jump(kind) && sq == EndpointState::Jump(kind)));
    if ok {
        Ok(accepted(v))
    } else {
        rejected(&trace, edge, v, medium)
    }
}

/// Length of the run of the end cell at `p` (resp. `q`) inside the edge.
fn end_runs<T: Scalar>(jumps: &[(T, JumpKind)], p: T, q: T) -> (T, T) {
    match (jumps.first(), jumps.last()) {
        (Some(&(a, _)), Some(&(b, _))) => (a - p, q - b),
        _ => (q - p, q - p),
    }
}

fn threshold_formulas<T: Scalar>(
    ell_tilde: T,
    ell_star: T,
    medium: &ChessboardMedium<T>,
) -> BreakingThresholds<T> {
    let (eps, d) = (medium.epsilon(), medium.contrast());
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let half = eps / two;
    let plus = d * (ell_tilde + half) + four;
    let minus = d * (ell_tilde + half) - four;
    BreakingThresholds {
        sigma_tilde: eps * minus / (two * (d * (ell_tilde - half) + four)),
        sigma_star: eps * (d * (ell_star + half) - four) / (two * (d * (ell_star - half) + four)),
        m: eps * d / plus,
        h: eps * minus / (two * plus),
        ell_tilde,
        ell_star,
    }
}

/// Thresholds from explicit `ℓ̃` and `ℓ*`, without checking any hypothesis.
pub fn thresholds_for_lengths<T: Scalar>(
    ell_tilde: T,
    ell_star: T,
    medium: &ChessboardMedium<T>,
) -> BreakingThresholds<T> {
    threshold_formulas(ell_tilde, ell_star, medium)
}

/// `ℓ + ℓ_α − ℓ_β`, compared with `4/(β−α)` by the sufficient condition.
pub fn excess_length<T: Scalar>(edge: &EdgeView<T>, medium: &ChessboardMedium<T>) -> Result<T> {
    let trace = check_edge(edge, medium)?;
    let d = medium.phase_decomposition(&trace, edge.p, edge.q)?;
    Ok(d.ell + d.ell_alpha - d.ell_beta)
}

fn sufficient_condition<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<bool> {
    let lhs = excess_length(edge, medium)?;
    Ok(lhs <= lit::<T>(4.0) / medium.contrast() + medium.tol_grid())
}

pub fn thresholds<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<BreakingThresholds<T>> {
    if edge.chi != 1 {
        return Err(Error::WrongCurvature(edge.chi, "positive"));
    }
    let trace = check_edge(edge, medium)?;
    if sufficient_condition(edge, medium)? {
        return Err(Error::ThresholdHypothesis(
            "edge satisfies the sufficient calibrability condition".into(),
        ));
    }
    let jumps = interior_jumps(&trace, edge.p, edge.q, medium)?;
    let sp = medium.endpoint_state(&trace, edge.p);
    let sq = medium.endpoint_state(&trace, edge.q);
    let (r1, r2) = end_runs(&jumps, edge.p, edge.q);
    let s1 = if sp == EndpointState::InAlpha {
        r1
    } else {
        T::zero()
    };
    let s2 = if sq == EndpointState::InAlpha {
        r2
    } else {
        T::zero()
    };
    let eps = medium.epsilon();
    let sigma = if sp == EndpointState::InAlpha { s1 } else { s2 };
    let ell = edge.length();
    Ok(threshold_formulas(
        ell - eps - s1 - s2,
        ell - eps / lit(2.0) - sigma,
        medium,
    ))
}

/// Closed-form verdict for edges with positive curvature.
pub fn classify_positive_curvature<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CalibrabilityVerdict<T>> {
    if edge.chi != 1 {
        return Err(Error::WrongCurvature(edge.chi, "positive"));
    }
    let trace = check_edge(edge, medium)?;
    let v = facet_velocity(1, &trace, edge.p, edge.q, medium)?;
    let sp = medium.endpoint_state(&trace, edge.p);
    let sq = medium.endpoint_state(&trace, edge.q);
    use EndpointState::*;
    use JumpKind::*;
    if sufficient_condition(edge, medium)? || (sp == Jump(BetaToAlpha) && sq == Jump(AlphaToBeta)) {
        return Ok(accepted(v));
    }
    let jumps = interior_jumps(&trace, edge.p, edge.q, medium)?;
    if jumps.is_empty() && sp.right_phase() == Phase::Alpha {
        return Ok(accepted(v));
    }
    if sp == InBeta || sq == InBeta || sp == Jump(AlphaToBeta) || sq == Jump(BetaToAlpha) {
        return rejected(&trace, edge, v, medium);
    }
    let th = thresholds(edge, medium)?;
    let tol = medium.tol_grid();
    let (s1, s2) = end_runs(&jumps, edge.p, edge.q);
    let ok = if sp == InAlpha && sq == InAlpha {
        s1 >= th.m * s2 + th.h - tol && s1 <= s2 / th.m - th.h / th.m + tol
    } else {
        let sigma = if sp == InAlpha { s1 } else { s2 };
        sigma >= th.sigma_star - tol
    };
    if ok {
        Ok(accepted(v))
    } else {
        rejected(&trace, edge, v, medium)
    }
}

/// Dispatches to the closed-form classifier matching the edge's curvature.
pub fn classify<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CalibrabilityVerdict<T>> {
    match edge.chi {
        0 => classify_zero_curvature(edge, medium),
        1 => classify_positive_curvature(edge, medium),
        _ => Err(Error::NegativeCurvature(edge.index)),
    }
}
