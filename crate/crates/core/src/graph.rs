//! Spectrum of the magnetic graph Hamiltonian at rational flux: the
//! preimage of `sigma(Q)` under the discriminant on each Hill band, plus the
//! flux-independent Dirichlet eigenvalues.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

use crate::bands::{BandList, Interval};
use crate::error::{Error, Result};
use crate::flux::{gcd, Flux};
use crate::hill::{BandTable, HillBand, HillSolver};
use crate::jacobi::rational_spectrum;
use crate::qlambda::{q_spectrum, QSpectrum};

/// Discriminant samples per Hill band used to bracket inversions.
pub const TABLE_NODES: usize = 256;

/// Dirichlet eigenvalues within this distance of a band are attached to it.
const DIRICHLET_ATTACH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpectrum {
    pub hill_band_index: usize,
    pub hill_band: HillBand,
    pub continuous_bands: BandList,
    pub dirichlet_points: Vec<f64>,
    pub dirac_point: f64,
}

/// One band of the butterfly: flux `p / q`, Hill band index and interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButterflyRow {
    pub p: u64,
    pub q: u64,
    pub hill_band: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyDataset {
    pub rows: Vec<ButterflyRow>,
    pub dirichlet_lines: Vec<f64>,
    pub dirac_points: Vec<f64>,
    pub hill_bands: Vec<HillBand>,
    pub potential: String,
}

/// Everything that does not depend on the flux: Hill bands, discriminant
/// tables, Dirac points and the Dirichlet spectrum.
#[derive(Debug, Clone)]
pub struct GraphContext {
    solver: HillSolver,
    tables: Vec<BandTable>,
    dirac: Vec<f64>,
    dirichlet: Vec<f64>,
}

impl GraphContext {
    pub fn new(solver: HillSolver, n_bands: usize) -> Result<Self> {
        if n_bands == 0 {
            return Err(Error::Domain("at least one Hill band is required"));
        }
        let bands = solver.first_bands(n_bands)?;
        let tables = bands
            .iter()
            .map(|b| solver.band_table(*b, TABLE_NODES))
            .collect::<Result<Vec<_>>>()?;
        let dirac = tables
            .iter()
            .map(|t| solver.invert_tabulated(t, 0.0))
            .collect::<Result<Vec<_>>>()?;
        let top = bands.last().map(|b| b.beta).unwrap_or(0.0);
        let dirichlet = solver
            .dirichlet_eigenvalues(top + DIRICHLET_ATTACH)?
            .into_iter()
            .filter(|&l| l <= top + DIRICHLET_ATTACH)
            .collect();
        Ok(Self {
            solver,
            tables,
            dirac,
            dirichlet,
        })
    }

    pub fn solver(&self) -> &HillSolver {
        &self.solver
    }

    pub fn hill_bands(&self) -> Vec<HillBand> {
        self.tables.iter().map(|t| *t.band()).collect()
    }

    pub fn n_bands(&self) -> usize {
        self.tables.len()
    }

    pub fn dirac_points(&self) -> &[f64] {
        &self.dirac
    }

    pub fn dirichlet_eigenvalues(&self) -> &[f64] {
        &self.dirichlet
    }

    /// Preimage of each band of `q_spec` inside Hill band `index` (1-based).
    pub fn pull_back(&self, q_spec: &QSpectrum, index: usize) -> Result<BandList> {
        let table = self
            .tables
            .get(index.wrapping_sub(1))
            .ok_or(Error::Domain("Hill band index out of range"))?;
        // touching Q-bands share endpoints; invert each level once
        let mut cache: Vec<(f64, f64)> = Vec::new();
        let mut invert = |w: f64| -> Result<f64> {
            if w == 0.0 {
                return Ok(self.dirac[index - 1]);
            }
            if let Some(&(_, l)) = cache.iter().find(|(x, _)| *x == w) {
                return Ok(l);
            }
            let l = self.solver.invert_tabulated(table, w.clamp(-1.0, 1.0))?;
            cache.push((w, l));
            Ok(l)
        };
        let mut out = Vec::with_capacity(q_spec.bands.len());
        for b in q_spec.bands.iter() {
            let (x, y) = (invert(b.lo)?, invert(b.hi)?);
            out.push(Interval::new(x.min(y), x.max(y)));
        }
        Ok(BandList::new(out))
    }

    pub fn graph_spectrum(&self, p: u64, q: u64) -> Result<Vec<GraphSpectrum>> {
        let q_spec = q_spectrum(&rational_spectrum(p, q)?)?;
        (1..=self.n_bands())
            .map(|index| {
                let band = *self.tables[index - 1].band();
                let dirichlet_points = self
                    .dirichlet
                    .iter()
                    .copied()
                    .filter(|&l| l >= band.alpha - DIRICHLET_ATTACH && l <= band.beta + DIRICHLET_ATTACH)
                    .collect();
                Ok(GraphSpectrum {
                    hill_band_index: index,
                    hill_band: band,
                    continuous_bands: self.pull_back(&q_spec, index)?,
                    dirichlet_points,
                    dirac_point: self.dirac[index - 1],
                })
            })
            .collect()
    }

    /// Butterfly rows of a single flux column, ordered by band index then energy.
    pub fn column(&self, p: u64, q: u64) -> Result<Vec<ButterflyRow>> {
        let q_spec = q_spectrum(&rational_spectrum(p, q)?)?;
        let mut rows = Vec::new();
        for index in 1..=self.n_bands() {
            for b in self.pull_back(&q_spec, index)?.iter() {
                rows.push(ButterflyRow {
                    p,
                    q,
                    hill_band: index,
                    lo: b.lo,
                    hi: b.hi,
                });
            }
        }
        Ok(rows)
    }

    /// Assembles a dataset from precomputed columns given in column order.
    pub fn dataset(&self, columns: Vec<Vec<ButterflyRow>>) -> ButterflyDataset {
        ButterflyDataset {
            rows: columns.into_iter().flatten().collect(),
            dirichlet_lines: self.dirichlet.clone(),
            dirac_points: self.dirac.clone(),
            hill_bands: self.hill_bands(),
            potential: self.solver.potential().descriptor(),
        }
    }

    pub fn butterfly(&self, q_max: u64) -> Result<ButterflyDataset> {
        let columns = butterfly_fluxes(q_max)
            .into_iter()
            .map(|(p, q)| self.column(p, q))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.dataset(columns))
    }

    /// Checks that the discriminant image of the graph bands in Hill band
    /// `index` is symmetric under negation.
    pub fn local_symmetry_check(&self, p: u64, q: u64, index: usize) -> Result<SymmetryReport> {
        let q_spec = q_spectrum(&rational_spectrum(p, q)?)?;
        let bands = self.pull_back(&q_spec, index)?;
        let mut image = Vec::with_capacity(bands.len());
        for b in bands.iter() {
            let (x, y) = (self.solver.discriminant(b.lo)?, self.solver.discriminant(b.hi)?);
            image.push(Interval::new(x.min(y), x.max(y)));
        }
        image.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let n = image.len();
        let defect = (0..n)
            .map(|i| {
                let j = n - 1 - i;
                (image[i].lo + image[j].hi).abs().max((image[i].hi + image[j].lo).abs())
            })
            .fold(0.0, f64::max);
        Ok(SymmetryReport {
            max_defect: defect,
            symmetric: defect <= SYMMETRY_TOLERANCE,
            image: BandList::new(image),
        })
    }
}

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub max_defect: f64,
    pub symmetric: bool,
    pub image: BandList,
}

/// Reduced `p / q` with `q <= q_max` and `0 <= p < q`, ordered by `q` then `p`.
pub fn butterfly_fluxes(q_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for q in 1..=q_max {
        for p in 0..q {
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

fn require_rational(flux: &Flux) -> Result<(u64, u64)> {
    flux.as_rational()
        .ok_or(Error::InvalidFlux("graph spectra need a rational flux; use covers for irrational flux"))
}

pub fn graph_spectrum(solver: &HillSolver, flux: &Flux, n_bands: usize) -> Result<Vec<GraphSpectrum>> {
    let (p, q) = require_rational(flux)?;
    GraphContext::new(solver.clone(), n_bands)?.graph_spectrum(p, q)
}

pub fn dirac_points(solver: &HillSolver, n_bands: usize) -> Result<Vec<f64>> {
    solver
        .first_bands(n_bands)?
        .iter()
        .map(|b| solver.dirac_point(b))
        .collect()
}

pub fn butterfly(solver: &HillSolver, q_max: u64, n_bands: usize) -> Result<ButterflyDataset> {
    if q_max == 0 {
        return Err(Error::Domain("q_max must be at least 1"));
    }
    GraphContext::new(solver.clone(), n_bands)?.butterfly(q_max)
}

pub fn local_symmetry_check(
    solver: &HillSolver,
    flux: &Flux,
    band_index: usize,
) -> Result<SymmetryReport> {
    let (p, q) = require_rational(flux)?;
    GraphContext::new(solver.clone(), band_index)?.local_symmetry_check(p, q, band_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use core::f64::consts::PI;

    fn zero_context(n: usize) -> GraphContext {
        GraphContext::new(HillSolver::with_default_steps(&PotentialSpec::Zero).unwrap(), n).unwrap()
    }

    #[test]
    fn half_flux_first_band() {
        let ctx = zero_context(1);
        let g = ctx.graph_spectrum(1, 2).unwrap();
        let bands = g[0].continuous_bands.intervals();
        assert_eq!(bands.len(), 4);
        let w1 = (2.0f64 / 3.0).sqrt().acos();
        let w2 = (1.0f64 / 3.0).sqrt().acos();
        let expected = [
            w1 * w1,
            w2 * w2,
            (PI / 2.0).powi(2),
            (PI - w2).powi(2),
            (PI - w1).powi(2),
        ];
        assert!((bands[0].lo - expected[0]).abs() < 1e-9);
        for k in 0..4 {
            assert!((bands[k].hi - expected[k + 1]).abs() < 1e-9, "{k}");
            if k > 0 {
                assert_eq!(bands[k].lo, bands[k - 1].hi);
            }
        }
        assert!((expected[0] - 0.37886).abs() < 1e-4);
        assert!((expected[4] - 6.38124).abs() < 1e-5);
    }

    #[test]
    fn zero_flux_fills_hill_bands() {
        let ctx = zero_context(3);
        for g in ctx.graph_spectrum(0, 1).unwrap() {
            let m = g.continuous_bands.merged(1e-12);
            assert_eq!(m.len(), 1);
            let k = g.hill_band_index as f64;
            assert!((m.intervals()[0].lo - PI * PI * (k - 1.0).powi(2)).abs() < 1e-8);
            assert!((m.intervals()[0].hi - PI * PI * k * k).abs() < 1e-8);
        }
    }

    #[test]
    fn third_flux_leaves_gaps_at_hill_edges() {
        let ctx = zero_context(2);
        for g in ctx.graph_spectrum(1, 3).unwrap() {
            let lo = g.continuous_bands.min().unwrap();
            let hi = g.continuous_bands.max().unwrap();
            assert!(lo > g.hill_band.alpha + 1e-3);
            assert!(hi < g.hill_band.beta - 1e-3);
        }
    }

    #[test]
    fn free_dirac_points() {
        let s = HillSolver::with_default_steps(&PotentialSpec::Zero).unwrap();
        let d = dirac_points(&s, 4).unwrap();
        for (k, x) in d.iter().enumerate() {
            let expected = ((2 * k + 1) as f64 * PI / 2.0).powi(2);
            assert!((x - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn small_butterfly() {
        let s = HillSolver::with_default_steps(&PotentialSpec::Zero).unwrap();
        let data = butterfly(&s, 2, 1).unwrap();
        let zero: Vec<_> = data.rows.iter().filter(|r| r.q == 1).collect();
        let half: Vec<_> = data.rows.iter().filter(|r| r.q == 2).collect();
        // the zero-flux column is the full Hill band, split at the Dirac point
        assert_eq!(zero.len(), 2);
        assert_eq!(half.len(), 4);
        assert_eq!(data.dirichlet_lines.len(), 1);
        assert!((data.dirichlet_lines[0] - PI * PI).abs() < 1e-9);
    }

    #[test]
    fn flux_enumeration() {
        assert_eq!(butterfly_fluxes(3), alloc::vec![(0, 1), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn symmetry_examples() {
        let ctx = zero_context(1);
        assert!(ctx.local_symmetry_check(1, 2, 1).unwrap().symmetric);
        assert!(ctx.local_symmetry_check(0, 1, 1).unwrap().symmetric);
        let m = GraphContext::new(
            HillSolver::with_default_steps(&PotentialSpec::Mathieu { amplitude: 20.0 }).unwrap(),
            2,
        )
        .unwrap();
        let r = m.local_symmetry_check(2, 5, 2).unwrap();
        assert!(r.symmetric, "{}", r.max_defect);
    }

    #[test]
    fn irrational_flux_is_rejected() {
        let s = HillSolver::with_default_steps(&PotentialSpec::Zero).unwrap();
        assert!(graph_spectrum(&s, &Flux::golden(), 1).is_err());
    }
}
