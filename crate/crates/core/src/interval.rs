//! Exact rational intervals with individually open or closed endpoints.
//!
//! The solvers propagate feasibility sets through affine relations; strict
//! ordering constraints make those sets half-open, so endpoint flags have to
//! be tracked exactly.

use crate::rational::{midpoint, Rat};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QInterval {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl QInterval {
    pub fn closed(lo: Rat, hi: Rat) -> Self {
        QInterval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn point(x: Rat) -> Self {
        QInterval::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = if self.lo_open { *x > self.lo } else { *x >= self.lo };
        let below = if self.hi_open { *x < self.hi } else { *x <= self.hi };
        above && below
    }

    pub fn intersect(&self, other: &QInterval) -> QInterval {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_open),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_open),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_open),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_open),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        QInterval { lo, hi, lo_open, hi_open }
    }

    /// Restrict to `{x : c*x < d}` (or `<=` when `strict` is false).
    pub fn constrain_linear(&mut self, c: &Rat, d: &Rat, strict: bool) {
        if c.is_zero() {
            let ok = if strict { d > &Rat::zero() } else { d >= &Rat::zero() };
            if !ok {
                // unsatisfiable: force emptiness
                self.lo = Rat::zero();
                self.hi = -Rat::from_integer(1.into());
            }
            return;
        }
        let bound = d / c;
        if c > &Rat::zero() {
            // x < bound
            if bound < self.hi || (bound == self.hi && strict && !self.hi_open) {
                self.hi = bound;
                self.hi_open = strict;
            }
        } else {
            // x > bound
            if bound > self.lo || (bound == self.lo && strict && !self.lo_open) {
                self.lo = bound;
                self.lo_open = strict;
            }
        }
    }

    /// `{x ∈ self : a*x + b ∈ target}` for affine `a*x + b`.
    pub fn affine_preimage(&self, a: &Rat, b: &Rat, target: &QInterval) -> QInterval {
        if a.is_zero() {
            return if target.contains(b) {
                self.clone()
            } else {
                QInterval { lo: Rat::zero(), hi: -Rat::from_integer(1.into()), lo_open: false, hi_open: false }
            };
        }
        let lo = (&target.lo - b) / a;
        let hi = (&target.hi - b) / a;
        let pulled = if a > &Rat::zero() {
            QInterval { lo, hi, lo_open: target.lo_open, hi_open: target.hi_open }
        } else {
            QInterval { lo: hi, hi: lo, lo_open: target.hi_open, hi_open: target.lo_open }
        };
        self.intersect(&pulled)
    }

    /// A deterministic element: the largest attained endpoint when closed,
    /// otherwise the exact midpoint. `None` when empty.
    pub fn pick_max(&self) -> Option<Rat> {
        if self.is_empty() {
            return None;
        }
        if !self.hi_open {
            return Some(self.hi.clone());
        }
        // hi open; lo < hi here
        if !self.lo_open {
            // any point in (lo, hi] won't do; take midpoint of (lo, hi)
            Some(midpoint(&self.lo, &self.hi))
        } else {
            Some(midpoint(&self.lo, &self.hi))
        }
    }

    /// Deterministic interior-leaning element: midpoint unless degenerate.
    pub fn pick_mid(&self) -> Option<Rat> {
        if self.is_empty() {
            return None;
        }
        if self.lo == self.hi {
            return Some(self.lo.clone());
        }
        Some(midpoint(&self.lo, &self.hi))
    }
}
