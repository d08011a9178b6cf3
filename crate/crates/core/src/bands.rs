//! Finite unions of closed intervals.

use alloc::vec::Vec;

/// Default tolerance used when merging intervals.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// Sorted closed intervals. Overlapping intervals are merged on
/// construction; intervals that merely touch are kept apart so that band
/// structure survives. [`BandList::merged`] gives the set-level view.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BandList {
    intervals: Vec<Interval>,
}

impl BandList {
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                // strict overlap beyond the tolerance
                Some(last) if iv.lo < last.hi - MERGE_TOLERANCE => {
                    last.hi = last.hi.max(iv.hi);
                }
                // duplicates of a point or a repeated interval
                Some(last)
                    if (iv.lo - last.lo).abs() <= MERGE_TOLERANCE
                        && (iv.hi - last.hi).abs() <= MERGE_TOLERANCE =>
                {
                    last.hi = last.hi.max(iv.hi);
                }
                _ => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.lo)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.iter().map(|i| i.hi).reduce(f64::max)
    }

    /// Also fuses intervals whose gap is at most `tol`.
    pub fn merged(&self, tol: f64) -> BandList {
        let mut out: Vec<Interval> = Vec::with_capacity(self.intervals.len());
        for iv in &self.intervals {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi + tol => last.hi = last.hi.max(iv.hi),
                _ => out.push(*iv),
            }
        }
        BandList { intervals: out }
    }

    /// Lebesgue measure of the union.
    pub fn measure(&self) -> f64 {
        self.merged(0.0).intervals.iter().map(Interval::width).sum()
    }

    pub fn union(&self, other: &BandList) -> BandList {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        BandList::new(all)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x, tol))
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|i| i.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Every interval widened by `radius` on both sides.
    pub fn inflate(&self, radius: f64) -> BandList {
        BandList::new(
            self.intervals
                .iter()
                .map(|i| Interval::new(i.lo - radius, i.hi + radius))
                .collect(),
        )
        .merged(0.0)
    }

    /// Whether every interval of `self` lies inside the union of `other`.
    pub fn is_subset_of(&self, other: &BandList, tol: f64) -> bool {
        let target = other.merged(tol);
        self.intervals.iter().all(|i| {
            target
                .intervals
                .iter()
                .any(|t| i.lo >= t.lo - tol && i.hi <= t.hi + tol)
        })
    }
}

impl FromIterator<Interval> for BandList {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        BandList::new(iter.into_iter().collect())
    }
}

pub fn spectrum_measure(bands: &BandList) -> f64 {
    bands.measure()
}
