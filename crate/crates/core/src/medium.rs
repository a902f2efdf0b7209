//! The two-valued chessboard forcing and its one-dimensional traces.
//!
//! The plane is tiled by open cells of side `ε/2`. The cell with lower-left
//! corner `(i·ε/2, j·ε/2)` carries the value `α` when `i + j` is even and `β`
//! otherwise, so the cell `]0, ε/2[²` touching the origin is an `α`-cell.
//! Values on cell boundaries are left undefined (the forcing is set-valued
//! there, `[α, β]`).

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Which of the two forcing values a cell carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Alpha,
    Beta,
}

impl Phase {
    pub fn flip(self) -> Self {
        match self {
            Phase::Alpha => Phase::Beta,
            Phase::Beta => Phase::Alpha,
        }
    }

    fn from_parity(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Phase::Alpha
        } else {
            Phase::Beta
        }
    }
}

/// Orientation of a straight line. A horizontal line `y = c` is parametrised
/// by `x`, a vertical line `x = c` by `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn other(self) -> Self {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

/// Kind of a discontinuity point `s` of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpKind {
    /// The trace equals `α` on `(s, s + ε/2)`.
    BetaToAlpha,
    /// The trace equals `β` on `(s, s + ε/2)`.
    AlphaToBeta,
}

impl JumpKind {
    /// Phase immediately to the right of the jump.
    pub fn right_phase(self) -> Phase {
        match self {
            JumpKind::BetaToAlpha => Phase::Alpha,
            JumpKind::AlphaToBeta => Phase::Beta,
        }
    }

    fn from_right_phase(p: Phase) -> Self {
        match p {
            Phase::Alpha => JumpKind::BetaToAlpha,
            Phase::Beta => JumpKind::AlphaToBeta,
        }
    }
}

/// Where a point of a trace sits relative to the cell structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndpointState {
    InAlpha,
    InBeta,
    Jump(JumpKind),
}

impl EndpointState {
    /// Phase just to the right of the point.
    pub fn right_phase(self) -> Phase {
        match self {
            EndpointState::InAlpha => Phase::Alpha,
            EndpointState::InBeta => Phase::Beta,
            EndpointState::Jump(k) => k.right_phase(),
        }
    }

    /// Phase just to the left of the point.
    pub fn left_phase(self) -> Phase {
        match self {
            EndpointState::InAlpha => Phase::Alpha,
            EndpointState::InBeta => Phase::Beta,
            EndpointState::Jump(k) => k.right_phase().flip(),
        }
    }
}

/// Value of the forcing at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing<T> {
    Value(T),
    OnDiscontinuity,
}

/// Restriction of the forcing to one straight axis-parallel line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineTrace<T> {
    pub axis: Axis,
    pub offset: T,
    pub on_grid: bool,
    row: i64,
}

/// Lengths entering the closed-form calibrability formulas for an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition<T> {
    pub ell: T,
    pub ell_alpha: T,
    pub ell_beta: T,
    pub integral: T,
}

/// Periodic chessboard forcing `g_ε` with values `α < 0 < β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChessboardMedium<T> {
    alpha: T,
    beta: T,
    epsilon: T,
}

impl<T: Scalar> ChessboardMedium<T> {
    pub fn new(alpha: T, beta: T, epsilon: T) -> Result<Self> {
        if !(alpha < T::zero() && beta > T::zero()) {
            return Err(Error::InvalidMedium(format!(
                "need alpha < 0 < beta, got alpha={alpha}, beta={beta}"
            )));
        }
        let bound = lit::<T>(8.0) / (beta - alpha);
        if !(epsilon > T::zero() && epsilon < bound) {
            return Err(Error::InvalidMedium(format!(
                "need 0 < epsilon < 8/(beta-alpha) = {bound}, got {epsilon}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            epsilon,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Side of one chessboard cell, `ε/2`.
    pub fn half_cell(&self) -> T {
        self.epsilon * lit(0.5)
    }

    /// Mean value `(α + β)/2`.
    pub fn mean(&self) -> T {
        (self.alpha + self.beta) * lit(0.5)
    }

    /// Contrast `β − α`.
    pub fn contrast(&self) -> T {
        self.beta - self.alpha
    }

    pub fn value_of(&self, phase: Phase) -> T {
        match phase {
            Phase::Alpha => self.alpha,
            Phase::Beta => self.beta,
        }
    }

    /// Absolute tolerance used to decide membership of the `(ε/2)ℤ` grid.
    pub fn tol_grid(&self) -> T {
        self.epsilon * T::tol(1e-9)
    }

    fn cell_index(&self, s: T) -> i64 {
        (s / self.half_cell())
            .floor()
            .to_i64()
            .expect("coordinate in range")
    }

    /// Nearest grid coordinate to `s` and its index.
    pub fn nearest_grid(&self, s: T) -> (i64, T) {
        let k = (s / self.half_cell()).round();
        (
            k.to_i64().expect("coordinate in range"),
            k * self.half_cell(),
        )
    }

    pub fn is_on_grid(&self, s: T) -> bool {
        let (_, g) = self.nearest_grid(s);
        (s - g).abs() <= self.tol_grid()
    }

    /// `s` snapped onto the grid when within tolerance, unchanged otherwise.
    pub fn snap(&self, s: T) -> T {
        let (_, g) = self.nearest_grid(s);
        if (s - g).abs() <= self.tol_grid() {
            g
        } else {
            s
        }
    }

    /// Phase of the open cell with integer indices `(i, j)`.
    pub fn cell_phase(&self, i: i64, j: i64) -> Phase {
        Phase::from_parity(i + j)
    }

    pub fn value_at(&self, x: T, y: T) -> Forcing<T> {
        if self.is_on_grid(x) || self.is_on_grid(y) {
            return Forcing::OnDiscontinuity;
        }
        Forcing::Value(self.value_of(self.cell_phase(self.cell_index(x), self.cell_index(y))))
    }

    /// The trace of the forcing along the line `axis` at `offset`.
    pub fn trace(&self, axis: Axis, offset: T) -> LineTrace<T> {
        LineTrace {
            axis,
            offset,
            on_grid: self.is_on_grid(offset),
            row: self.cell_index(offset),
        }
    }

    fn require_off_grid(&self, trace: &LineTrace<T>) -> Result<()> {
        if trace.on_grid {
            Err(Error::TraceOnGrid)
        } else {
            Ok(())
        }
    }

    /// Phase of the trace on the open cell containing `s` (for a grid point,
    /// the cell to its right).
    pub fn phase_at(&self, trace: &LineTrace<T>, s: T) -> Phase {
        let i = if self.is_on_grid(s) {
            self.nearest_grid(s).0
        } else {
            self.cell_index(s)
        };
        self.cell_phase(i, trace.row)
    }

    /// Cell-structure classification of a point of an off-grid trace.
    pub fn endpoint_state(&self, trace: &LineTrace<T>, s: T) -> EndpointState {
        if self.is_on_grid(s) {
            EndpointState::Jump(JumpKind::from_right_phase(self.phase_at(trace, s)))
        } else {
            match self.phase_at(trace, s) {
                Phase::Alpha => EndpointState::InAlpha,
                Phase::Beta => EndpointState::InBeta,
            }
        }
    }

    /// All discontinuity points of the trace in `[a, b]`, in increasing order.
    pub fn jumps_in(&self, trace: &LineTrace<T>, a: T, b: T) -> Result<Vec<(T, JumpKind)>> {
        self.require_off_grid(trace)?;
        if a > b {
            return Err(Error::EmptyInterval);
        }
        let h = self.half_cell();
        let tol = self.tol_grid();
        let first = ((a - tol) / h)
            .ceil()
            .to_i64()
            .expect("coordinate in range");
        let last = ((b + tol) / h)
            .floor()
            .to_i64()
            .expect("coordinate in range");
        Ok((first..=last)
            .map(|k| {
                let s = T::from_i64(k).unwrap() * h;
                (s, JumpKind::from_right_phase(self.cell_phase(k, trace.row)))
            })
            .collect())
    }

    /// `∫_0^s` of the trace of row `row`, reduced modulo one period.
    fn antiderivative(&self, row: i64, s: T) -> T {
        let h = self.half_cell();
        let k = self.cell_index(s);
        let frac = s - T::from_i64(k).unwrap() * h;
        let pairs = k.div_euclid(2);
        let mut acc = T::from_i64(pairs).unwrap() * (self.alpha + self.beta) * h;
        if k.rem_euclid(2) == 1 {
            acc = acc + self.value_of(self.cell_phase(k - 1, row)) * h;
        }
        acc + self.value_of(self.cell_phase(k, row)) * frac
    }

    /// Exact `∫_p^q γ_ε` along an off-grid trace.
    pub fn integral(&self, trace: &LineTrace<T>, p: T, q: T) -> T {
        // γ_ε has period ε along any line; shift to keep the antiderivative small.
        let shift = (p / self.epsilon).floor() * self.epsilon;
        self.antiderivative(trace.row, q - shift) - self.antiderivative(trace.row, p - shift)
    }

    /// Remainder lengths `ℓ_α, ℓ_β` and the integral of the trace over `[p, q]`.
    pub fn phase_decomposition(
        &self,
        trace: &LineTrace<T>,
        p: T,
        q: T,
    ) -> Result<PhaseDecomposition<T>> {
        self.require_off_grid(trace)?;
        if p > q {
            return Err(Error::EmptyInterval);
        }
        let ell = q - p;
        let periods = (ell / self.epsilon).floor();
        let rem = (ell - periods * self.epsilon).max(T::zero());
        let rem_integral = self.integral(trace, p, p + rem);
        let h = self.half_cell();
        let ell_beta = ((rem_integral - self.alpha * rem) / self.contrast())
            .max(T::zero())
            .min(h);
        let ell_alpha = (rem - ell_beta).max(T::zero()).min(h);
        Ok(PhaseDecomposition {
            ell,
            ell_alpha,
            ell_beta,
            integral: self.integral(trace, p, q),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn med() -> ChessboardMedium<f64> {
        ChessboardMedium::new(-3.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ChessboardMedium::new(1.0, 2.0, 0.1).is_err());
        assert!(ChessboardMedium::new(-3.0, 1.0, 2.0).is_err());
        assert!(ChessboardMedium::new(-3.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn point_values() {
        let m = med();
        assert_eq!(m.value_at(0.1, 0.1), Forcing::Value(-3.0));
        assert_eq!(m.value_at(0.25, 0.1), Forcing::OnDiscontinuity);
        assert_eq!(m.value_at(0.35, 0.1), Forcing::Value(1.0));
        assert_eq!(m.value_at(0.35, 0.35), Forcing::Value(-3.0));
        assert_eq!(m.value_at(-0.1, 0.1), Forcing::Value(1.0));
    }

    #[test]
    fn jumps_along_a_row() {
        let m = med();
        let tr = m.trace(Axis::Horizontal, 0.1);
        let j = m.jumps_in(&tr, 0.0, 0.6).unwrap();
        assert_eq!(
            j,
            vec![
                (0.0, JumpKind::BetaToAlpha),
                (0.25, JumpKind::AlphaToBeta),
                (0.5, JumpKind::BetaToAlpha)
            ]
        );
        assert!(m.jumps_in(&tr, 0.3, 0.3).unwrap().is_empty());
        assert_eq!(m.jumps_in(&tr, 0.1, 0.6).unwrap().len(), 2);
        assert_eq!(m.jumps_in(&tr, 0.0, 0.5).unwrap().len(), 3);
        let on = m.trace(Axis::Horizontal, 0.25);
        assert!(matches!(m.jumps_in(&on, 0.0, 1.0), Err(Error::TraceOnGrid)));
    }

    #[test]
    fn decomposition_examples() {
        let m = med();
        let tr = m.trace(Axis::Horizontal, 0.1);
        let d = m.phase_decomposition(&tr, 0.1, 0.4).unwrap();
        assert!((d.ell - 0.3).abs() < 1e-14);
        assert!((d.ell_alpha - 0.15).abs() < 1e-14);
        assert!((d.ell_beta - 0.15).abs() < 1e-14);
        assert!((d.integral + 0.3).abs() < 1e-14);

        let d = m.phase_decomposition(&tr, 0.37, 0.87).unwrap();
        assert!(d.ell_alpha.abs() < 1e-14 && d.ell_beta.abs() < 1e-14);
        assert!((d.integral - -0.5).abs() < 1e-14);

        let d = m.phase_decomposition(&tr, 0.02, 0.22).unwrap();
        assert!((d.ell_alpha - 0.2).abs() < 1e-14 && d.ell_beta.abs() < 1e-14);
        assert!((d.integral + 0.6).abs() < 1e-14);
    }

    #[test]
    fn endpoint_states() {
        let m = med();
        let tr = m.trace(Axis::Vertical, 0.6);
        // column 2 at x = 0.6: cell (2, 0) is alpha
        assert_eq!(m.endpoint_state(&tr, 0.1), EndpointState::InAlpha);
        assert_eq!(m.endpoint_state(&tr, 0.3), EndpointState::InBeta);
        assert_eq!(
            m.endpoint_state(&tr, 0.25),
            EndpointState::Jump(JumpKind::AlphaToBeta)
        );
        assert_eq!(
            m.endpoint_state(&tr, 0.5),
            EndpointState::Jump(JumpKind::BetaToAlpha)
        );
    }

    #[test]
    fn generic_over_f32() {
        let m = ChessboardMedium::<f32>::new(-3.0, 1.0, 0.5).unwrap();
        let tr = m.trace(Axis::Horizontal, 0.1);
        let d = m.phase_decomposition(&tr, 0.1, 0.4).unwrap();
        assert!((d.integral + 0.3).abs() < 1e-5);
    }
}
