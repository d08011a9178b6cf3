//! Compactly supported eigenfunctions on simply closed loops of the
//! hexagonal lattice.
//!
//! A lattice cell `gamma = (g1, g2)` carries two vertices, `r0(gamma)` and
//! `r1(gamma) = r0(gamma) + (1/2, sqrt(3)/2)`, with `r0(gamma) = g1 b1 + g2 b2`,
//! `b1 = (3/2, sqrt(3)/2)` and `b2 = (0, sqrt(3))`. The three edges leaving
//! `r0(gamma)` end at `r1(gamma)` (f), `r1(gamma - e1)` (g) and
//! `r1(gamma - e2)` (h). Magnetic phases are moved into the vertex conditions
//! at terminal vertices: f and g carry phase 0, `h(gamma)` carries `-Phi g1`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::SVD;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hill::HillSolver;
use crate::linalg::{cis, numerical_rank, CMatrix, CVector};

pub type Cell = (i64, i64);

/// Relative singular-value threshold for the numerical rank of `T_Phi`.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Largest accepted residual `|T a - y|` for a constructed state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Largest accepted `|s_lambda(1)|` for `lambda` to count as a Dirichlet eigenvalue.
pub const DIRICHLET_TOLERANCE: f64 = 1e-9;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const HEXAGON_AREA: f64 = 1.5 * SQRT3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    F,
    G,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    /// `r0(gamma)`, initial vertex of every edge of the cell.
    Initial(Cell),
    /// `r1(gamma)`.
    Terminal(Cell),
}

impl Vertex {
    pub fn position(&self) -> (f64, f64) {
        let (c, shift) = match *self {
            Vertex::Initial(c) => (c, (0.0, 0.0)),
            Vertex::Terminal(c) => (c, (0.5, 0.5 * SQRT3)),
        };
        let (g1, g2) = (c.0 as f64, c.1 as f64);
        (1.5 * g1 + shift.0, 0.5 * SQRT3 * g1 + SQRT3 * g2 + shift.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub kind: EdgeKind,
    pub cell: Cell,
}

impl Edge {
    pub const fn new(kind: EdgeKind, cell: Cell) -> Self {
        Self { kind, cell }
    }

    pub fn initial(&self) -> Vertex {
        Vertex::Initial(self.cell)
    }

    pub fn terminal(&self) -> Vertex {
        let (g1, g2) = self.cell;
        Vertex::Terminal(match self.kind {
            EdgeKind::F => (g1, g2),
            EdgeKind::G => (g1 - 1, g2),
            EdgeKind::H => (g1, g2 - 1),
        })
    }

    pub fn beta_tilde(&self, phi: f64) -> f64 {
        match self.kind {
            EdgeKind::H => -phi * self.cell.0 as f64,
            _ => 0.0,
        }
    }
}

fn shift(c: Cell, d1: i64, d2: i64) -> Cell {
    (c.0 + d1, c.1 + d2)
}

/// A simply closed loop `e_1, ..., e_n`, listed so that `e_j` and `e_{j+1}`
/// share their terminal vertex for odd `j` and their initial vertex for even
/// `j` (and `e_n`, `e_1` share the initial vertex). Loops run clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    edges: Vec<Edge>,
    enclosed: usize,
}

impl LoopSpec {
    /// Validates the edge sequence and counts enclosed hexagons from the
    /// signed area.
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        let n = edges.len();
        if n < 6 || n % 2 != 0 {
            return Err(Error::Domain("a loop needs an even number of at least 6 edges"));
        }
        let mut seen_edges = edges.clone();
        seen_edges.sort();
        seen_edges.dedup();
        if seen_edges.len() != n {
            return Err(Error::Domain("loop repeats an edge"));
        }
        let mut corners = Vec::with_capacity(n);
        for j in 0..n {
            let (a, b) = (edges[j], edges[(j + 1) % n]);
            let v = if j % 2 == 0 {
                (a.terminal() == b.terminal()).then(|| a.terminal())
            } else {
                (a.initial() == b.initial()).then(|| a.initial())
            };
            corners.push(v.ok_or(Error::Domain("consecutive loop edges do not meet"))?);
        }
        let mut seen = corners.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::Domain("loop is not simple"));
        }
        let mut twice_area = 0.0;
        for j in 0..n {
            let (x0, y0) = corners[j].position();
            let (x1, y1) = corners[(j + 1) % n].position();
            twice_area += x0 * y1 - x1 * y0;
        }
        if twice_area >= 0.0 {
            return Err(Error::Domain("loop must run clockwise"));
        }
        let hexagons = -0.5 * twice_area / HEXAGON_AREA;
        let enclosed = hexagons.round();
        if (hexagons - enclosed).abs() > 1e-9 || enclosed < 1.0 {
            return Err(Error::Consistency {
                what: "enclosed area is not a whole number of hexagons",
                deviation: (hexagons - enclosed).abs(),
            });
        }
        Ok(Self {
            edges,
            enclosed: enclosed as usize,
        })
    }

    /// Outer boundary of `q` hexagons stacked along `b1`, starting from the
    /// hexagon whose lowest-right vertex is `r0(gamma)`. Has `4q + 2` edges.
    pub fn hexagon_strip(gamma: Cell, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("a strip needs at least one hexagon"));
        }
        let q = q as i64;
        let (f, g, h) = (EdgeKind::F, EdgeKind::G, EdgeKind::H);
        let mut e = Vec::with_capacity(4 * q as usize + 2);
        e.push(Edge::new(f, shift(gamma, -1, 1)));
        e.push(Edge::new(g, shift(gamma, 0, 1)));
        for k in 0..q - 1 {
            e.push(Edge::new(f, shift(gamma, k, 1)));
            e.push(Edge::new(g, shift(gamma, k + 1, 1)));
        }
        e.push(Edge::new(h, shift(gamma, q - 1, 1)));
        e.push(Edge::new(f, shift(gamma, q - 1, 0)));
        e.push(Edge::new(g, shift(gamma, q - 1, 0)));
        for k in (0..q - 1).rev() {
            e.push(Edge::new(f, shift(gamma, k, 0)));
            e.push(Edge::new(g, shift(gamma, k, 0)));
        }
        e.push(Edge::new(h, shift(gamma, -1, 1)));
        Self::new(e)
    }

    pub fn single_hexagon(gamma: Cell) -> Self {
        Self::hexagon_strip(gamma, 1).expect("strip of one hexagon is a valid loop")
    }

    /// Outer loop of the two hexagons at `gamma` and `gamma + e1`.
    pub fn double_hexagon(gamma: Cell) -> Self {
        Self::hexagon_strip(gamma, 2).expect("strip of two hexagons is a valid loop")
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn enclosed_hexagons(&self) -> usize {
        self.enclosed
    }

    pub fn beta_tilde(&self, phi: f64) -> Vec<f64> {
        self.edges.iter().map(|e| e.beta_tilde(phi)).collect()
    }

    /// `sum_j (-1)^j beta_j` with 1-based `j`.
    pub fn alternating_phase_sum(&self, phi: f64) -> f64 {
        alternating_sum(&self.beta_tilde(phi))
    }
}

pub fn alternating_sum(beta: &[f64]) -> f64 {
    beta.iter()
        .enumerate()
        .map(|(j, b)| if j % 2 == 0 { -b } else { *b })
        .sum()
}

/// Derivative-condition matrix of a loop with phases `beta`: odd rows hold
/// `e^{i beta_j}, e^{i beta_{j+1}}` on the diagonal and superdiagonal, even
/// rows hold `1, 1`, and the last row closes the loop with ones in the
/// first and last column.
pub fn t_phi_from_phases(beta: &[f64]) -> CMatrix {
    let n = beta.len();
    let one = Complex64::new(1.0, 0.0);
    let mut t = CMatrix::zeros(n, n);
    for r in 0..n - 1 {
        if r % 2 == 0 {
            t[(r, r)] = cis(beta[r]);
            t[(r, r + 1)] = cis(beta[r + 1]);
        } else {
            t[(r, r)] = one;
            t[(r, r + 1)] = one;
        }
    }
    t[(n - 1, 0)] = one;
    t[(n - 1, n - 1)] = one;
    t
}

pub fn build_t_phi(lp: &LoopSpec, phi: f64) -> CMatrix {
    t_phi_from_phases(&lp.beta_tilde(phi))
}

pub fn rank_t_phi(lp: &LoopSpec, phi: f64) -> usize {
    numerical_rank(build_t_phi(lp, phi), RANK_THRESHOLD)
}

/// The edge splitting the double hexagon at `gamma` into its two hexagons.
pub fn slicing_edge(gamma: Cell) -> Edge {
    Edge::new(EdgeKind::H, shift(gamma, 0, 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateBranch {
    /// `T_Phi(10)` is singular; the state lives on the outer loop only.
    Kernel,
    /// `T_Phi(10) a = y` solved with unit amplitude on the slicing edge.
    Solved,
}

/// Eigenfunction `a_j s_lambda` on the outer edges and `slicing s_lambda` on
/// the slicing edge of a double hexagon.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleHexState {
    pub outer: Vec<Complex64>,
    pub slicing: Complex64,
    pub dirichlet_lambda: f64,
    pub phi: f64,
    pub gamma: Cell,
    pub branch: StateBranch,
    /// `|T a - y|` for the returned coefficients.
    pub residual: f64,
}

impl DoubleHexState {
    /// Every edge of the double hexagon with its coefficient.
    pub fn edge_coefficients(&self) -> Vec<(Edge, Complex64)> {
        let lp = LoopSpec::double_hexagon(self.gamma);
        let mut out: Vec<(Edge, Complex64)> =
            lp.edges().iter().copied().zip(self.outer.iter().copied()).collect();
        out.push((slicing_edge(self.gamma), self.slicing));
        out
    }
}

fn max_abs(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Builds a double-hexagon eigenstate at the Dirichlet eigenvalue
/// `dirichlet_lambda` of `solver`'s edge potential.
pub fn double_hexagon_state(
    solver: &HillSolver,
    phi: f64,
    dirichlet_lambda: f64,
    gamma: Cell,
) -> Result<DoubleHexState> {
    if !phi.is_finite() {
        return Err(Error::InvalidFlux("flux must be finite"));
    }
    let (s1, _) = solver.sine_endpoint(dirichlet_lambda)?;
    if s1.abs() > DIRICHLET_TOLERANCE {
        return Err(Error::Domain("lambda is not a Dirichlet eigenvalue of the edge potential"));
    }
    let lp = LoopSpec::double_hexagon(gamma);
    let t = build_t_phi(&lp, phi);
    let n = lp.n_edges();
    let zero = Complex64::new(0.0, 0.0);

    if numerical_rank(t.clone(), RANK_THRESHOLD) < n {
        let svd = SVD::new(t.clone(), false, true);
        let v_t = svd.v_t.ok_or(Error::Consistency {
            what: "SVD did not return right singular vectors",
            deviation: f64::INFINITY,
        })?;
        let k = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut a: CVector = v_t.row(k).adjoint();
        // fix the free scale so that a_1 = 1
        let a0 = a[0];
        if a0.norm() == 0.0 {
            return Err(Error::Consistency {
                what: "kernel vector vanishes on the first edge",
                deviation: 0.0,
            });
        }
        a.iter_mut().for_each(|z| *z /= a0);
        let residual = max_abs(&(&t * &a));
        if residual > RESIDUAL_TOLERANCE {
            return Err(Error::Consistency {
                what: "kernel vector residual",
                deviation: residual,
            });
        }
        return Ok(DoubleHexState {
            outer: a.iter().copied().collect(),
            slicing: zero,
            dirichlet_lambda,
            phi,
            gamma,
            branch: StateBranch::Kernel,
            residual,
        });
    }

    let mut y = CVector::zeros(n);
    y[1] = Complex64::new(-1.0, 0.0);
    y[6] = -cis(slicing_edge(gamma).beta_tilde(phi));
    let singular = Error::Consistency {
        what: "T_Phi(10) is numerically singular",
        deviation: 0.0,
    };
    let a = t.clone().lu().solve(&y).ok_or(singular.clone())?;
    let a_qr = t.clone().qr().solve(&y).ok_or(singular)?;
    let disagreement = max_abs(&(&a - &a_qr)) / max_abs(&a).max(1.0);
    if disagreement > 1e-10 {
        return Err(Error::Consistency {
            what: "LU and QR solutions disagree",
            deviation: disagreement,
        });
    }
    let residual = max_abs(&(&t * &a - &y));
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Consistency {
            what: "solution residual",
            deviation: residual,
        });
    }
    Ok(DoubleHexState {
        outer: a.iter().copied().collect(),
        slicing: Complex64::new(1.0, 0.0),
        dirichlet_lambda,
        phi,
        gamma,
        branch: StateBranch::Solved,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexReport {
    pub vertices: usize,
    /// Largest `|psi(v)|` over loop vertices; edges outside the loop vanish,
    /// so continuity forces every boundary value to be zero.
    pub max_continuity: f64,
    /// Largest derivative-sum violation.
    pub max_derivative: f64,
}

impl VertexReport {
    pub fn max_violation(&self) -> f64 {
        self.max_continuity.max(self.max_derivative)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Evaluates continuity and derivative sums at every vertex touched by the
/// edges, with `psi_e = c_e s_lambda` and phases for flux `phi`.
pub fn vertex_report(
    solver: &HillSolver,
    edges: &[(Edge, Complex64)],
    lambda: f64,
    phi: f64,
) -> Result<VertexReport> {
    // s(0) = 0 and s'(0) = 1 by construction
    let (s1, s1p) = solver.sine_endpoint(lambda)?;
    #[derive(Default)]
    struct Acc {
        values: Vec<Complex64>,
        derivative: Complex64,
    }
    let mut at: BTreeMap<Vertex, Acc> = BTreeMap::new();
    for &(e, c) in edges {
        let start = at.entry(e.initial()).or_default();
        start.values.push(c * 0.0);
        start.derivative += c;
        let phase = cis(e.beta_tilde(phi));
        let end = at.entry(e.terminal()).or_default();
        end.values.push(phase * c * s1);
        end.derivative += phase * c * s1p;
    }
    let (mut cont, mut der) = (0.0f64, 0.0f64);
    for acc in at.values() {
        for v in &acc.values {
            cont = cont.max(v.norm());
        }
        der = der.max(acc.derivative.norm());
    }
    Ok(VertexReport {
        vertices: at.len(),
        max_continuity: cont,
        max_derivative: der,
    })
}

pub fn verify_vertex_conditions(
    solver: &HillSolver,
    state: &DoubleHexState,
    phi: f64,
) -> Result<VertexReport> {
    vertex_report(solver, &state.edge_coefficients(), state.dirichlet_lambda, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use alloc::vec;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn zero_solver() -> HillSolver {
        HillSolver::with_default_steps(&PotentialSpec::Zero).unwrap()
    }

    #[test]
    fn strip_sizes_and_areas() {
        for q in 1..=6 {
            let lp = LoopSpec::hexagon_strip((2, -1), q).unwrap();
            assert_eq!(lp.n_edges(), 4 * q + 2);
            assert_eq!(lp.enclosed_hexagons(), q);
        }
    }

    #[test]
    fn counterclockwise_loop_is_rejected() {
        let mut e = LoopSpec::single_hexagon((0, 0)).edges().to_vec();
        e.reverse();
        assert_eq!(LoopSpec::new(e), Err(Error::Domain("loop must run clockwise")));
    }

    #[test]
    fn broken_loop_is_rejected() {
        let mut e = LoopSpec::single_hexagon((0, 0)).edges().to_vec();
        e[2] = Edge::new(EdgeKind::F, (5, 5));
        assert!(LoopSpec::new(e).is_err());
    }

    #[test]
    fn zero_flux_pattern_is_all_ones() {
        let t = build_t_phi(&LoopSpec::single_hexagon((0, 0)), 0.0);
        let n = 6;
        for r in 0..n {
            for c in 0..n {
                let expected = if (r < n - 1 && (c == r || c == r + 1)) || (r == n - 1 && (c == 0 || c == n - 1)) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(t[(r, c)], Complex64::new(expected, 0.0), "({r},{c})");
            }
        }
    }

    #[test]
    fn double_hexagon_phases_at_quarter_flux() {
        // outer edges at gamma = (0, 0), with their cells enumerated by hand
        let expected = [
            (EdgeKind::F, (-1, 1)),
            (EdgeKind::G, (0, 1)),
            (EdgeKind::F, (0, 1)),
            (EdgeKind::G, (1, 1)),
            (EdgeKind::H, (1, 1)),
            (EdgeKind::F, (1, 0)),
            (EdgeKind::G, (1, 0)),
            (EdgeKind::F, (0, 0)),
            (EdgeKind::G, (0, 0)),
            (EdgeKind::H, (-1, 1)),
        ];
        let lp = LoopSpec::double_hexagon((0, 0));
        for (e, (k, c)) in lp.edges().iter().zip(expected) {
            assert_eq!((e.kind, e.cell), (k, c));
        }
        let phi = PI / 2.0;
        let t = build_t_phi(&lp, phi);
        // only h edges carry phase, -Phi g1: e_5 at g1 = 1 (odd row 5, column 5)
        // and e_10 at g1 = -1 (odd row 9, column 10)
        assert!((t[(4, 4)] - cis(-phi)).norm() < 1e-15);
        assert!((t[(8, 9)] - cis(phi)).norm() < 1e-15);
        let ones = [(0, 0), (0, 1), (2, 2), (2, 3), (6, 6), (6, 7), (8, 8), (4, 5)];
        for (r, c) in ones {
            assert_eq!(t[(r, c)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn slicing_edge_meets_second_and_seventh_corner() {
        let gamma = (3, -2);
        let lp = LoopSpec::double_hexagon(gamma);
        let e = lp.edges();
        let s = slicing_edge(gamma);
        assert_eq!(e[1].initial(), s.initial());
        assert_eq!(e[2].initial(), s.initial());
        assert_eq!(e[6].terminal(), s.terminal());
        assert_eq!(e[7].terminal(), s.terminal());
    }

    /// Eliminates the closing row against the bidiagonal rows above it.
    fn reduced_corner(t: &CMatrix) -> Complex64 {
        let n = t.nrows();
        let mut last: Vec<Complex64> = (0..n).map(|c| t[(n - 1, c)]).collect();
        for r in 0..n - 1 {
            let f = last[r] / t[(r, r)];
            for c in r..n {
                last[c] -= f * t[(r, c)];
            }
        }
        last[n - 1]
    }

    #[test]
    fn row_reduction_ends_in_flux_factor() {
        for (lp, q) in [(LoopSpec::single_hexagon((1, 2)), 1.0), (LoopSpec::double_hexagon((-2, 0)), 2.0)] {
            for phi in [0.3, 1.0, PI / 2.0, 2.5] {
                let d = reduced_corner(&build_t_phi(&lp, phi));
                let expected = Complex64::new(1.0, 0.0) - cis(q * phi);
                assert!((d - expected).norm() < 1e-12, "{d} vs {expected}");
            }
        }
    }

    #[test]
    fn rank_examples() {
        let dh = LoopSpec::double_hexagon((0, 0));
        assert_eq!(rank_t_phi(&dh, PI), 9);
        assert_eq!(rank_t_phi(&dh, PI / 2.0), 10);
        assert_eq!(rank_t_phi(&LoopSpec::single_hexagon((0, 0)), 0.0), 5);
    }

    #[test]
    fn rank_dichotomy_on_grid() {
        let dh = LoopSpec::double_hexagon((0, 0));
        for k in 0..100 {
            let phi = 2.0 * PI * k as f64 / 100.0;
            let expected = if k % 50 == 0 { 9 } else { 10 };
            assert_eq!(rank_t_phi(&dh, phi), expected, "k = {k}");
        }
    }

    #[test]
    fn branches() {
        let solver = zero_solver();
        let lambda = solver.first_dirichlet_eigenvalues(1).unwrap()[0];
        let s = double_hexagon_state(&solver, PI, lambda, (0, 0)).unwrap();
        assert_eq!(s.branch, StateBranch::Kernel);
        assert_eq!(s.slicing, Complex64::new(0.0, 0.0));
        let s = double_hexagon_state(&solver, PI / 2.0, lambda, (0, 0)).unwrap();
        assert_eq!(s.branch, StateBranch::Solved);
        assert!(s.residual <= RESIDUAL_TOLERANCE);
    }

    #[test]
    fn states_satisfy_vertex_conditions() {
        for pot in [PotentialSpec::Zero, PotentialSpec::Mathieu { amplitude: 20.0 }] {
            let solver = HillSolver::with_default_steps(&pot).unwrap();
            for lambda in solver.first_dirichlet_eigenvalues(3).unwrap() {
                for phi in [0.0, PI / 2.0, PI, 1.1] {
                    for gamma in [(0, 0), (4, -3)] {
                        let s = double_hexagon_state(&solver, phi, lambda, gamma).unwrap();
                        let r = verify_vertex_conditions(&solver, &s, phi).unwrap();
                        assert_eq!(r.vertices, 10);
                        assert!(r.passes(1e-10), "{pot:?} {lambda} {phi}: {r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_flux_state_has_vanishing_sums() {
        let solver = zero_solver();
        let lambda = solver.first_dirichlet_eigenvalues(2).unwrap()[1];
        let s = double_hexagon_state(&solver, 0.0, lambda, (0, 0)).unwrap();
        assert_eq!(s.branch, StateBranch::Kernel);
        // without flux every vertex pairs a_j with -a_j
        for (j, a) in s.outer.iter().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - Complex64::new(sign, 0.0)).norm() < 1e-12, "{j}: {a}");
        }
        assert!(verify_vertex_conditions(&solver, &s, 0.0).unwrap().passes(1e-12));
    }

    #[test]
    fn detector_sees_perturbations() {
        let solver = zero_solver();
        let lambda = solver.first_dirichlet_eigenvalues(1).unwrap()[0];
        let mut s = double_hexagon_state(&solver, PI / 2.0, lambda, (0, 0)).unwrap();
        s.outer[3] += Complex64::new(1e-3, 0.0);
        let r = verify_vertex_conditions(&solver, &s, PI / 2.0).unwrap();
        assert!(r.max_violation() >= 1e-4);
    }

    #[test]
    fn wrong_flux_is_detected() {
        let solver = zero_solver();
        let lambda = solver.first_dirichlet_eigenvalues(1).unwrap()[0];
        let s = double_hexagon_state(&solver, PI / 2.0, lambda, (0, 0)).unwrap();
        let r = verify_vertex_conditions(&solver, &s, PI / 3.0).unwrap();
        assert!(r.max_violation() > 1e-3);
    }

    #[test]
    fn zero_coefficients_pass_trivially() {
        let solver = zero_solver();
        let mut s = double_hexagon_state(&solver, 1.0, PI * PI, (0, 0)).unwrap();
        s.outer = vec![Complex64::new(0.0, 0.0); 10];
        s.slicing = Complex64::new(0.0, 0.0);
        assert_eq!(verify_vertex_conditions(&solver, &s, 1.0).unwrap().max_violation(), 0.0);
    }

    #[test]
    fn non_dirichlet_lambda_is_rejected() {
        let solver = zero_solver();
        assert!(matches!(
            double_hexagon_state(&solver, 1.0, 10.0, (0, 0)),
            Err(Error::Domain(_))
        ));
    }

    fn wrapped(x: f64) -> f64 {
        let r = x.rem_euclid(2.0 * PI);
        r.min(2.0 * PI - r)
    }

    proptest! {
        #[test]
        fn alternating_sum_counts_enclosed_flux(
            q in 1usize..8, g1 in -20i64..20, g2 in -20i64..20, phi in -10.0f64..10.0,
        ) {
            let lp = LoopSpec::hexagon_strip((g1, g2), q).unwrap();
            let s = lp.alternating_phase_sum(phi);
            prop_assert!(wrapped(s - q as f64 * phi) < 1e-9);
        }

        #[test]
        fn rank_is_full_off_the_flux_lattice(
            q in 1usize..6, g1 in -5i64..5, phi in 0.0f64..(2.0 * PI),
        ) {
            let lp = LoopSpec::hexagon_strip((g1, 0), q).unwrap();
            let dist = wrapped(q as f64 * phi);
            prop_assume!(dist > 1e-6);
            prop_assert_eq!(rank_t_phi(&lp, phi), lp.n_edges());
        }

        #[test]
        fn rank_drops_on_the_flux_lattice(q in 1usize..6, k in 0i64..12, g1 in -5i64..5) {
            let lp = LoopSpec::hexagon_strip((g1, 1), q).unwrap();
            let phi = 2.0 * PI * k as f64 / q as f64;
            prop_assert_eq!(rank_t_phi(&lp, phi), lp.n_edges() - 1);
        }
    }
}
