//! Splitting of non-calibrable edges and the velocities of edges lying on
//! discontinuity lines.
//!
//! A non-calibrable edge `[p, q]` is cut at breaking points `p_b ≤ q_b` into
//! `L⁻ = [p, p_b]`, `Lᶜ = [p_b, q_b]` and `L⁺ = [q_b, q]`. In the polygon the
//! pieces stay on the same line and are joined by zero-length connectors lying
//! on grid lines; each connector's inner normal points along the edge towards
//! the adjacent piece that moves inward more slowly, so that it gains positive
//! length as the pieces separate.

use crate::calibrability::{classify, facet_velocity, oracle_on};
use crate::error::{Error, Result};
use crate::geometry::{Direction, EdgeView, Polyrectangle};
use crate::medium::{Axis, ChessboardMedium, JumpKind, LineTrace};
use crate::scalar::{lit, Scalar};

/// How an edge moves at the start of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Off the grid; velocity from the edge's own line.
    Free,
    /// On a grid line, leaving it inward; velocity from the line shifted by
    /// `+ε/4`.
    Inward,
    /// On a grid line, leaving it outward; velocity from the line shifted by
    /// `−ε/4`.
    Outward,
    /// Held on its grid line (sliding mode).
    Pinned,
    /// `v_in > 0 > v_out`: held on its grid line, but other branches exist.
    Ambiguous,
}

impl Regime {
    pub fn is_pinned(self) -> bool {
        matches!(self, Regime::Pinned | Regime::Ambiguous)
    }

    /// Shift (in units of `ε/4`, along the inner normal) of the line on which
    /// the velocity is evaluated.
    pub fn reference_shift(self) -> i8 {
        match self {
            Regime::Inward => 1,
            Regime::Outward => -1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdgeVelocities<T> {
    pub v_in: T,
    pub v_out: T,
}

impl<T: Scalar> BoundaryEdgeVelocities<T> {
    pub fn regime(&self) -> Regime {
        let z = T::zero();
        match (self.v_in > z, self.v_out < z) {
            (true, false) => Regime::Inward,
            (false, true) => Regime::Outward,
            (false, false) => Regime::Pinned,
            (true, true) => Regime::Ambiguous,
        }
    }
}

/// One piece of a cracked edge, in the coordinate along the edge line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubEdge<T> {
    pub p: T,
    pub q: T,
    pub n_p: i8,
    pub n_q: i8,
    pub velocity: T,
}

impl<T: Scalar> SubEdge<T> {
    pub fn chi(&self) -> i8 {
        (self.n_q - self.n_p) / 2
    }

    pub fn length(&self) -> T {
        self.q - self.p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrackingSetup<T> {
    pub multiplicity: u8,
    pub p: T,
    pub q: T,
    pub p_b: T,
    pub q_b: T,
    pub minus: Option<SubEdge<T>>,
    /// `None` only when both breaking points coincide (short zero-curvature
    /// edges), in which case `minus` and `plus` share one connector.
    pub center: Option<SubEdge<T>>,
    pub plus: Option<SubEdge<T>>,
    /// Connector positions in increasing order, each with the sign (`±1`) of
    /// its inner normal along the edge line.
    pub connectors: Vec<(T, i8)>,
    pub regime: Regime,
}

impl<T: Scalar> CrackingSetup<T> {
    fn whole(edge: &EdgeView<T>, velocity: T, regime: Regime) -> Self {
        Self {
            multiplicity: 1,
            p: edge.p,
            q: edge.q,
            p_b: edge.p,
            q_b: edge.q,
            minus: None,
            center: Some(SubEdge {
                p: edge.p,
                q: edge.q,
                n_p: edge.n_p,
                n_q: edge.n_q,
                velocity,
            }),
            plus: None,
            connectors: Vec::new(),
            regime,
        }
    }

    /// Pieces in increasing coordinate order.
    pub fn pieces(&self) -> Vec<SubEdge<T>> {
        [self.minus, self.center, self.plus]
            .into_iter()
            .flatten()
            .collect()
    }
}

/// Trace of the line of `edge` moved by `quarters·ε/4` along its inner normal.
fn shifted_trace<T: Scalar>(
    edge: &EdgeView<T>,
    quarters: i8,
    medium: &ChessboardMedium<T>,
) -> LineTrace<T> {
    let d = medium.epsilon() / lit(4.0) * lit((quarters * edge.normal.sign()) as f64);
    medium.trace(edge.axis(), edge.line_offset + d)
}

pub fn boundary_velocities<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<BoundaryEdgeVelocities<T>> {
    if !edge.on_grid {
        return Err(Error::EdgeOffGrid(edge.index));
    }
    if edge.length() <= T::zero() {
        return Err(Error::DegenerateEdge(edge.index));
    }
    let v = |k: i8| {
        facet_velocity(
            edge.chi,
            &shifted_trace(edge, k, medium),
            edge.p,
            edge.q,
            medium,
        )
    };
    Ok(BoundaryEdgeVelocities {
        v_in: v(1)?,
        v_out: v(-1)?,
    })
}

/// Setup of an off-grid edge, evaluated on `trace` (the edge's own line or
/// a shifted copy of a grid edge).
fn setup_on_trace<T: Scalar>(
    edge: &EdgeView<T>,
    trace: &LineTrace<T>,
    regime: Regime,
    medium: &ChessboardMedium<T>,
) -> Result<CrackingSetup<T>> {
    if edge.chi < 0 {
        return Err(Error::NegativeCurvature(edge.index));
    }
    let probe = EdgeView {
        line_offset: trace.offset,
        on_grid: false,
        ..*edge
    };
    let verdict = classify(&probe, medium)?;
    if verdict.calibrable {
        return Ok(CrackingSetup::whole(edge, verdict.velocity, regime));
    }
    let jumps = medium.jumps_in(trace, edge.p, edge.q)?;
    let of_kind = |k: JumpKind| jumps.iter().filter(move |j| j.1 == k).map(|j| j.0);
    let (first, last, dir) = match (edge.chi, edge.n_p) {
        (1, _) => (
            of_kind(JumpKind::BetaToAlpha).next(),
            of_kind(JumpKind::AlphaToBeta).last(),
            0,
        ),
        (_, n) => {
            let k = if n > 0 {
                JumpKind::AlphaToBeta
            } else {
                JumpKind::BetaToAlpha
            };
            (of_kind(k).next(), of_kind(k).last(), -n)
        }
    };
    // Largest calibrable sub-interval whose ends are either the edge's own
    // endpoints or the outermost jumps of the matching kind: an end that does
    // not violate the constraint is not cut.
    let tol = medium.tol_grid();
    let mut best: Option<(T, T)> = None;
    for a in [Some(edge.p), first].into_iter().flatten() {
        for b in [Some(edge.q), last].into_iter().flatten() {
            if b - a <= tol || best.is_some_and(|(x, y)| y - x >= b - a) {
                continue;
            }
            if oracle_on(trace, a, b, edge.n_p, edge.n_q, medium)?.calibrable {
                best = Some((a, b));
            }
        }
    }
    let (p_b, q_b) = match (best, first, last) {
        (Some(ab), _, _) => ab,
        (None, Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NotCalibrable(edge.index)),
    };
    if q_b < p_b - tol {
        return Err(Error::NotCalibrable(edge.index));
    }
    let piece = |a: T, b: T, n_p: i8, n_q: i8| -> Result<Option<SubEdge<T>>> {
        if b - a <= tol {
            return Ok(None);
        }
        let velocity = facet_velocity((n_q - n_p) / 2, trace, a, b, medium)?;
        Ok(Some(SubEdge {
            p: a,
            q: b,
            n_p,
            n_q,
            velocity,
        }))
    };
    let minus = piece(edge.p, p_b, edge.n_p, edge.n_p)?;
    let plus = piece(q_b, edge.q, edge.n_q, edge.n_q)?;
    let center = piece(p_b, q_b, edge.n_p, edge.n_q)?;
    let mut connectors = Vec::new();
    match center {
        Some(_) => {
            // χ = 1: both connectors face the slower centre piece; χ = 0: both
            // face the same way, towards increasing s when n0 = −1.
            let (a, b) = if dir == 0 { (1, -1) } else { (dir, dir) };
            if minus.is_some() {
                connectors.push((p_b, a));
            }
            if plus.is_some() {
                connectors.push((q_b, b));
            }
        }
        None if minus.is_some() && plus.is_some() => connectors.push((p_b, dir)),
        None => return Err(Error::NotCalibrable(edge.index)),
    }
    let pieces = [minus, center, plus].iter().filter(|x| x.is_some()).count();
    let multiplicity = (pieces + connectors.len()) as u8;
    Ok(CrackingSetup {
        multiplicity,
        p: edge.p,
        q: edge.q,
        p_b,
        q_b,
        minus,
        center,
        plus,
        connectors,
        regime,
    })
}

/// Cracking setup of an edge lying off the grid.
pub fn cracking_setup<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CrackingSetup<T>> {
    if edge.on_grid {
        return Err(Error::EdgeOnGrid(edge.index));
    }
    let trace = medium.trace(edge.axis(), edge.line_offset);
    setup_on_trace(edge, &trace, Regime::Free, medium)
}

/// Cracking setup of an edge lying on a grid line, selected by the signs of
/// `v_in` and `v_out`.
pub fn cracking_setup_on_grid<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CrackingSetup<T>> {
    let bv = boundary_velocities(edge, medium)?;
    match bv.regime() {
        r @ (Regime::Inward | Regime::Outward) => {
            let trace = shifted_trace(edge, r.reference_shift(), medium);
            setup_on_trace(edge, &trace, r, medium)
        }
        r => Ok(CrackingSetup::whole(edge, T::zero(), r)),
    }
}

/// Setup of any edge; zero-length edges are left whole and pinned.
pub fn setup_for<T: Scalar>(
    edge: &EdgeView<T>,
    medium: &ChessboardMedium<T>,
) -> Result<CrackingSetup<T>> {
    if edge.chi < 0 {
        return Err(Error::NegativeCurvature(edge.index));
    }
    if edge.length() <= medium.tol_grid() {
        return Ok(CrackingSetup::whole(edge, T::zero(), Regime::Pinned));
    }
    if edge.on_grid {
        cracking_setup_on_grid(edge, medium)
    } else {
        cracking_setup(edge, medium)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakingConfiguration<T> {
    pub polyrect: Polyrectangle<T>,
    pub regimes: Vec<Regime>,
    /// Index of the source edge for every expanded edge.
    pub origin_map: Vec<usize>,
    /// False when some edge fell in the ambiguous sign case.
    pub unique: bool,
}

impl<T: Scalar> BreakingConfiguration<T> {
    pub fn pinned_flags(&self) -> Vec<bool> {
        self.regimes.iter().map(|r| r.is_pinned()).collect()
    }
}

fn connector_normal(axis: Axis, sign: i8) -> Direction {
    match (axis, sign > 0) {
        (Axis::Horizontal, true) => Direction::E1,
        (Axis::Horizontal, false) => Direction::MinusE1,
        (Axis::Vertical, true) => Direction::E2,
        (Axis::Vertical, false) => Direction::MinusE2,
    }
}

/// Expands every edge into its pieces and connectors.
pub fn breaking_configuration<T: Scalar>(
    poly: &Polyrectangle<T>,
    medium: &ChessboardMedium<T>,
) -> Result<BreakingConfiguration<T>> {
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    let mut regimes = Vec::new();
    let mut origin_map = Vec::new();
    let mut unique = true;
    for e in poly.edges(medium) {
        if e.chi < 0 {
            return Err(Error::NegativeCurvature(e.index));
        }
        let setup = setup_for(&e, medium)?;
        unique &= setup.regime != Regime::Ambiguous;
        // interleave pieces and connectors in coordinate order, then follow
        // the direction of travel
        let mut items: Vec<(Direction, T, Regime)> = Vec::new();
        let pieces = setup.pieces();
        let connectors = &setup.connectors;
        for (k, _) in pieces.iter().enumerate() {
            items.push((e.normal, e.line_offset, setup.regime));
            if let Some(&(s, sign)) = connectors.get(k) {
                items.push((connector_normal(e.axis(), sign), s, Regime::Pinned));
            }
        }
        if e.normal.travel_sign() < 0 {
            items.reverse();
        }
        for (n, s, r) in items {
            normals.push(n);
            offsets.push(s);
            regimes.push(r);
            origin_map.push(e.index);
        }
    }
    Ok(BreakingConfiguration {
        polyrect: Polyrectangle::new(normals, offsets)?,
        regimes,
        origin_map,
        unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn med() -> ChessboardMedium<f64> {
        ChessboardMedium::new(-3.0, 1.0, 0.5).unwrap()
    }

    fn edge(off: f64, p: f64, q: f64, n_p: i8, n_q: i8) -> EdgeView<f64> {
        EdgeView::detached(Direction::E2, off, p, q, n_p, n_q, &med())
    }

    #[test]
    fn octagon_edge_velocities() {
        let m = med();
        // bottom edge of an α-cornered staircase, ℓ = 2.25, α cell inside
        let e = edge(0.0, 0.0, 2.25, -1, 1);
        let bv = boundary_velocities(&e, &m).unwrap();
        let l: f64 = 2.25;
        let expect_in = 2.0 / l + m.mean() - m.contrast() * 0.5 / (4.0 * l);
        let expect_out = 2.0 / l + m.mean() + m.contrast() * 0.5 / (4.0 * l);
        assert!((bv.v_in - expect_in).abs() < 1e-12);
        assert!((bv.v_out - expect_out).abs() < 1e-12);
        assert!(bv.v_in < 0.0 && bv.v_out > 0.0);
        let s = cracking_setup_on_grid(&e, &m).unwrap();
        assert_eq!((s.multiplicity, s.regime), (1, Regime::Pinned));
    }

    #[test]
    fn half_cell_step_is_pinned() {
        let m = med();
        let e = edge(0.0, 0.0, 0.25, -1, -1);
        let bv = boundary_velocities(&e, &m).unwrap();
        assert_eq!((bv.v_in, bv.v_out), (m.alpha(), m.beta()));
    }

    #[test]
    fn short_convex_grid_edge_moves_inward() {
        let m = med();
        let e = edge(0.0, 0.0, 0.75, -1, 1);
        let bv = boundary_velocities(&e, &m).unwrap();
        assert!(bv.v_in > 0.0 && bv.v_out > 0.0);
        let s = cracking_setup_on_grid(&e, &m).unwrap();
        assert_eq!((s.multiplicity, s.regime), (1, Regime::Inward));
    }

    #[test]
    fn calibrable_edge_is_whole() {
        let s = cracking_setup(&edge(0.1, 0.1, 0.4, -1, 1), &med()).unwrap();
        assert_eq!(s.multiplicity, 1);
        assert_eq!((s.p_b, s.q_b), (0.1, 0.4));
    }

    #[test]
    fn long_convex_edge_cracks_into_five() {
        let m = med();
        // both ends inside α cells, σ1 = σ2 = 0.05 < σ̃
        let e = edge(0.1, 0.2, 3.05, -1, 1);
        let s = cracking_setup(&e, &m).unwrap();
        assert_eq!(s.multiplicity, 5);
        assert!((s.p_b - 0.5).abs() < 1e-12 && (s.q_b - 2.75).abs() < 1e-12);
        assert!((s.p_b - s.p - (0.25 + 0.05)).abs() < 1e-12);
        let c = s.center.unwrap();
        assert!(s.minus.unwrap().velocity > c.velocity);
        assert!(s.plus.unwrap().velocity > c.velocity);
        let tr = m.trace(Axis::Horizontal, 0.1);
        for piece in s.pieces() {
            assert!(
                oracle_on(&tr, piece.p, piece.q, piece.n_p, piece.n_q, &m)
                    .unwrap()
                    .calibrable
            );
        }
        assert_eq!(s.connectors, vec![(0.5, 1), (2.75, -1)]);
    }

    #[test]
    fn convex_edge_starting_on_jump_cracks_into_three() {
        let m = med();
        let e = edge(0.1, 0.0, 3.1, -1, 1);
        let s = cracking_setup(&e, &m).unwrap();
        assert_eq!(s.multiplicity, 3);
        assert!(s.minus.is_none());
        assert_eq!(s.p_b, 0.0);
    }

    #[test]
    fn staircase_orderings() {
        let m = med();
        let neg = cracking_setup(&edge(0.1, 0.3, 1.7, -1, -1), &m).unwrap();
        let (a, c, b) = (neg.minus.unwrap(), neg.center.unwrap(), neg.plus.unwrap());
        assert!(a.velocity > c.velocity && c.velocity > b.velocity);
        assert_eq!(
            neg.connectors.iter().map(|c| c.1).collect::<Vec<_>>(),
            vec![1, 1]
        );
        let pos = cracking_setup(&edge(0.1, 0.05, 1.45, 1, 1), &m).unwrap();
        let (a, c, b) = (pos.minus.unwrap(), pos.center.unwrap(), pos.plus.unwrap());
        assert!(a.velocity < c.velocity && c.velocity < b.velocity);
        assert_eq!(
            pos.connectors.iter().map(|c| c.1).collect::<Vec<_>>(),
            vec![-1, -1]
        );
    }

    #[test]
    fn short_staircase_splits_once() {
        let m = med();
        // α then β with n0 = +1: rises first, not calibrable
        let s = cracking_setup(&edge(0.1, 0.1, 0.4, 1, 1), &m).unwrap();
        assert_eq!(s.multiplicity, 3);
        assert_eq!(s.connectors, vec![(0.25, -1)]);
        assert_eq!(s.pieces().len(), 2);
    }

    #[test]
    fn configurations() {
        let m = med();
        let sq = Polyrectangle::rectangle(0.1, 0.1, 0.3, 0.3);
        let bc = breaking_configuration(&sq, &m).unwrap();
        assert_eq!(bc.polyrect.len(), 4);
        assert!(bc.unique);
        let big = Polyrectangle::rectangle(0.2, 0.2, 2.85, 2.85);
        let bc = breaking_configuration(&big, &m).unwrap();
        assert_eq!(bc.polyrect.len(), 20);
        assert!((bc.polyrect.area() - big.area()).abs() < 1e-12);
        assert_eq!(bc.polyrect.vertices().len(), 20);
        assert!(bc.polyrect.hausdorff_distance(&big) < 1e-12);
        for i in 0..bc.polyrect.len() {
            assert!(bc.polyrect.chi(i) >= 0);
        }
    }
}
