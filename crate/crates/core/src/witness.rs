//! Executable proof constructions producing exact rational traces.
//!
//! Each construction consumes an orbit of a specific template type on an
//! arbitrary PL self-map, re-enacts the corresponding interval-chain
//! argument, and returns the resulting orbit together with every auxiliary
//! point, so the whole trace can be re-verified by exact evaluation.

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::patterns::{classify, from_orbit, Pattern, TypeTag};
use crate::plmap::solver::itinerary_solutions;
use crate::plmap::PLMap;
use crate::properties::{BackwardChainWitness, Side};
use crate::rational::{fmt_rat, midpoint, Rat};
use std::fmt;

/// A periodic orbit listed in time order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiniteOrbit {
    points: Vec<Rat>,
}

impl FiniteOrbit {
    pub fn new(points: Vec<Rat>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPattern("empty orbit".into()));
        }
        let mut sorted = points.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint);
        }
        Ok(FiniteOrbit { points })
    }

    pub fn points(&self) -> &[Rat] {
        &self.points
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn pattern(&self) -> Result<Pattern> {
        from_orbit(&self.points)
    }

    /// Same orbit rotated to start at its leftmost point.
    pub fn leftmost_rotation(&self) -> FiniteOrbit {
        let k = self
            .points
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.cmp(b))
            .map(|(i, _)| i)
            .unwrap();
        let mut pts = self.points[k..].to_vec();
        pts.extend_from_slice(&self.points[..k]);
        FiniteOrbit { points: pts }
    }

    /// Exact check that this is an orbit of `f^k` of least period `len`.
    pub fn verify_on(&self, f: &PLMap, k: u32) -> Result<()> {
        let n = self.points.len();
        for i in 0..n {
            let next = f.eval_k(&self.points[i], k)?;
            if next != self.points[(i + 1) % n] {
                return Err(Error::TypeMismatch(format!(
                    "point {} does not map to its successor",
                    fmt_rat(&self.points[i])
                )));
            }
        }
        // distinctness (checked at construction) gives least period = n
        Ok(())
    }

    pub fn reflect(&self, c: &Rat) -> FiniteOrbit {
        FiniteOrbit { points: self.points.iter().map(|p| c - p).collect() }
    }
}

impl fmt::Display for FiniteOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self.points.iter().map(fmt_rat).collect::<Vec<_>>().join(", ");
        write!(f, "({body})")
    }
}

/// Closed intervals `J_0, …, J_N` with the cyclic covering property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalChain {
    pub intervals: Vec<(Rat, Rat)>,
}

impl IntervalChain {
    pub fn new(intervals: Vec<(Rat, Rat)>) -> Result<Self> {
        for (lo, hi) in &intervals {
            if lo > hi {
                return Err(Error::CoverageViolation(format!(
                    "interval [{}, {}] is inverted",
                    fmt_rat(lo),
                    fmt_rat(hi)
                )));
            }
        }
        Ok(IntervalChain { intervals })
    }

    /// Exact check of `f(J_i) ⊇ J_{i+1}` cyclically.
    pub fn verify_covering(&self, f: &PLMap) -> Result<()> {
        let n = self.intervals.len();
        for i in 0..n {
            let (lo, hi) = &self.intervals[i];
            let (nlo, nhi) = &self.intervals[(i + 1) % n];
            let (min, max) = f.span(lo, hi)?;
            if &min > nlo || &max < nhi {
                return Err(Error::CoverageViolation(format!(
                    "f(J_{i}) = [{}, {}] does not cover [{}, {}]",
                    fmt_rat(&min),
                    fmt_rat(&max),
                    fmt_rat(nlo),
                    fmt_rat(nhi)
                )));
            }
        }
        Ok(())
    }
}

/// Full record of one chain construction.
///
/// `map_power` says on which iterate the chain and result live (1 for the
/// two-parameter extension, 2 for the period-3 construction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub z: Rat,
    pub w: Rat,
    pub aux_fixed: Option<(Rat, Rat, Rat)>,
    pub chain: IntervalChain,
    pub result: FiniteOrbit,
    pub map_power: u32,
}

/// A fixed point of `f` inside `J` (leftmost when several).
///
/// When `f(J) ⊇ J` one exists by the intermediate value theorem; the error
/// is reported only when the covering fails and no fixed point is present.
pub fn fixed_in_interval(f: &PLMap, j: &(Rat, Rat)) -> Result<Rat> {
    let (lo, hi) = j;
    if lo > hi {
        return Err(Error::CoverageViolation("inverted interval".into()));
    }
    let fixed = f.fixed_sets();
    for (a, b) in &fixed.components {
        if b >= lo && a <= hi {
            return Ok(if a >= lo { a.clone() } else { lo.clone() });
        }
    }
    let (min, max) = f.span(lo, hi)?;
    if &min <= lo && &max >= hi {
        Err(Error::CoverageViolation(
            "covering holds but no fixed point found (internal error)".into(),
        ))
    } else {
        Err(Error::CoverageViolation(format!(
            "f([{}, {}]) = [{}, {}] does not cover the interval",
            fmt_rat(lo),
            fmt_rat(hi),
            fmt_rat(&min),
            fmt_rat(&max)
        )))
    }
}

/// Leftmost `y` with `f^i(y) ∈ J_i` for all `i` and `f^{N+1}(y) = y`.
pub fn solve_itinerary(f: &PLMap, chain: &IntervalChain, cfg: &EngineConfig) -> Result<Rat> {
    chain.verify_covering(f)?;
    let sols = itinerary_solutions(f, &chain.intervals, cfg)?;
    sols.first()
        .map(|(lo, _)| lo.clone())
        .ok_or_else(|| Error::CoverageViolation("itinerary has no periodic solution".into()))
}

/// Leftmost itinerary solution whose least period is exactly `chain.len()`.
fn solve_itinerary_least(f: &PLMap, chain: &IntervalChain, cfg: &EngineConfig) -> Result<Rat> {
    chain.verify_covering(f)?;
    let n = chain.intervals.len();
    let sols = itinerary_solutions(f, &chain.intervals, cfg)?;
    let divisors: Vec<usize> = (1..n).filter(|d| n % d == 0).collect();
    for (lo, hi) in sols {
        let mut cands = vec![lo.clone()];
        if hi > lo {
            // segment of solutions: lower-period points are finitely many
            cands.push(hi.clone());
            let mut left = lo.clone();
            for _ in 0..=divisors.len() {
                let m = midpoint(&left, &hi);
                cands.push(m.clone());
                left = m;
            }
            cands.sort();
        }
        for x in cands {
            let least = divisors.iter().all(|&d| match f.eval_k(&x, d as u32) {
                Ok(v) => v != x,
                Err(_) => false,
            });
            if least {
                return Ok(x);
            }
        }
    }
    Err(Error::CoverageViolation(
        "no itinerary solution of full least period (internal error)".into(),
    ))
}

/// Fixed point of `f` in the open interval `(lo, hi)` nearest to `hi`.
fn fixed_nearest_right(f: &PLMap, lo: &Rat, hi: &Rat) -> Option<Rat> {
    let fixed = f.fixed_sets();
    let mut best: Option<Rat> = None;
    for (a, b) in &fixed.components {
        let cand = if b < hi {
            b.clone()
        } else if a < hi {
            // plateau reaching past hi: take an interior point
            midpoint(if a > lo { a } else { lo }, hi)
        } else {
            continue;
        };
        if cand > *lo && cand < *hi && best.as_ref().map_or(true, |cur| cand > *cur) {
            best = Some(cand);
        }
    }
    best
}

/// Fixed point of `f` in the open interval `(lo, hi)` nearest to `lo`.
fn fixed_nearest_left(f: &PLMap, lo: &Rat, hi: &Rat) -> Option<Rat> {
    let fixed = f.fixed_sets();
    let mut best: Option<Rat> = None;
    for (a, b) in &fixed.components {
        let cand = if a > lo {
            a.clone()
        } else if b > lo {
            midpoint(lo, if b < hi { b } else { hi })
        } else {
            continue;
        };
        if cand > *lo && cand < *hi && best.as_ref().map_or(true, |cur| cand < *cur) {
            best = Some(cand);
        }
    }
    best
}

/// Preimage of `y` in the open interval `(lo, hi)` nearest to `hi`.
fn preimage_nearest_right(f: &PLMap, y: &Rat, lo: &Rat, hi: &Rat) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for (a, b) in f.preimages(y) {
        let cand = if b < *hi {
            b
        } else if a < *hi {
            midpoint(if a > *lo { &a } else { lo }, hi)
        } else {
            continue;
        };
        if cand > *lo && cand < *hi && best.as_ref().map_or(true, |cur| cand > *cur) {
            best = Some(cand);
        }
    }
    best
}

/// Smallest preimage of `y` in the open interval `(lo, hi)`.
fn preimage_smallest(f: &PLMap, y: &Rat, lo: &Rat, hi: &Rat) -> Option<Rat> {
    for (a, b) in f.preimages(y) {
        if b <= *lo {
            continue;
        }
        let cand = if a > *lo {
            a.clone()
        } else {
            midpoint(lo, if b < hi { &b } else { hi })
        };
        if cand > *lo && cand < *hi {
            return Some(cand);
        }
    }
    None
}

/// Time-relabeling of an orbit so that the point of spatial rank
/// `anchor_rank` becomes `x_0`.
fn relabel_from_rank(orbit: &FiniteOrbit, anchor_rank: usize) -> Vec<Rat> {
    let pts = orbit.points();
    let n = pts.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| pts[i].cmp(&pts[j]));
    let anchor_time = order[anchor_rank];
    (0..n).map(|i| pts[(anchor_time + i) % n].clone()).collect()
}

/// The unique two-parameter tag of an orbit's pattern, if any.
fn two_param_tag(pat: &Pattern) -> Option<(usize, usize)> {
    classify(pat).into_iter().find_map(|tag| match tag {
        TypeTag::TwoParam(m, n) => Some((m, n)),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendSide {
    Right,
    Left,
}

/// One step of the two-parameter extension: from an orbit of type
/// `TwoParam(m, n)` build a least-period-`(m+n+1)` orbit of type
/// `TwoParam(m, n+1)` (side right) or `TwoParam(m+1, n)` (side left).
pub fn extend_two_param(
    f: &PLMap,
    orbit: &FiniteOrbit,
    side: ExtendSide,
    cfg: &EngineConfig,
) -> Result<ConstructionTrace> {
    orbit.verify_on(f, 1)?;
    let pat = orbit.pattern()?;
    let (a, b) = two_param_tag(&pat)
        .ok_or_else(|| Error::TypeMismatch(format!("{pat} is not a two-parameter pattern")))?;
    if a < 2 || b < 2 {
        return Err(Error::TypeMismatch(format!(
            "TwoParam({a},{b}) has a parameter below 2"
        )));
    }
    // the template with swapped parameters is the mirror image, so the orbit
    // matches exactly one parameter ordering in the plain orientation
    let plain = if pat == TypeTag::two_param_template(a, b) { (a, b) } else { (b, a) };
    let target = match side {
        ExtendSide::Right => (a, b + 1),
        ExtendSide::Left => (a + 1, b),
    };
    let direct_result = (plain.0.min(plain.1 + 1), plain.0.max(plain.1 + 1));
    if direct_result == target {
        extend_plain(f, orbit, plain.0, plain.1, cfg)
    } else {
        let (lo, hi) = f.domain();
        let c = lo + hi;
        let rf = f.reflect();
        let rorbit = orbit.reflect(&c);
        let rplain = (plain.1, plain.0);
        let trace = extend_plain(&rf, &rorbit, rplain.0, rplain.1, cfg)?;
        Ok(reflect_trace(trace, &c))
    }
}

fn reflect_trace(t: ConstructionTrace, c: &Rat) -> ConstructionTrace {
    ConstructionTrace {
        z: c - &t.z,
        w: c - &t.w,
        aux_fixed: t.aux_fixed.map(|(a, b, d)| (c - &a, c - &b, c - &d)),
        chain: IntervalChain {
            intervals: t.chain.intervals.into_iter().map(|(lo, hi)| (c - &hi, c - &lo)).collect(),
        },
        result: t.result.reflect(c),
        map_power: t.map_power,
    }
}

fn extend_plain(
    f: &PLMap,
    orbit: &FiniteOrbit,
    m: usize,
    n: usize,
    cfg: &EngineConfig,
) -> Result<ConstructionTrace> {
    let x = relabel_from_rank(orbit, m);
    let z = fixed_nearest_right(f, &x[n], &x[0]).ok_or_else(|| {
        Error::CoverageViolation("no fixed point between x_n and x_0 (internal error)".into())
    })?;
    let w = preimage_nearest_right(f, &x[0], &z, &x[0]).ok_or_else(|| {
        Error::CoverageViolation("no preimage of x_0 in (z, x_0) (internal error)".into())
    })?;
    let mut intervals = Vec::with_capacity(m + n + 1);
    intervals.push((z.clone(), w.clone()));
    intervals.push((w.clone(), x[0].clone()));
    for i in 2..=n {
        intervals.push((x[i - 2].clone(), x[i - 1].clone()));
    }
    intervals.push((x[n].clone(), z.clone()));
    for i in n + 2..=m + n {
        intervals.push((x[i - 1].clone(), x[i - 2].clone()));
    }
    let chain = IntervalChain::new(intervals)?;
    let y = solve_itinerary_least(f, &chain, cfg)?;
    let mut pts = Vec::with_capacity(m + n + 1);
    let mut cur = y;
    for _ in 0..=m + n {
        pts.push(cur.clone());
        cur = f.eval(&cur)?;
    }
    let result = FiniteOrbit::new(pts)?;
    let tag = TypeTag::two_param(m, n + 1);
    if !classify(&result.pattern()?).contains(&tag) {
        return Err(Error::CoverageViolation(format!(
            "extension produced an orbit not of type {tag} (internal error)"
        )));
    }
    Ok(ConstructionTrace { z, w, aux_fixed: None, chain, result, map_power: 1 })
}

/// The period-3 construction: from a Štefan 3-orbit of `f`, a period-4
/// orbit of `g = f^2` of type `TwoParam(2,2)`, together with the fixed
/// points `a < b < c` of `g` interleaving the data.
pub fn stefan3_to_l22(f: &PLMap, orbit: &FiniteOrbit, cfg: &EngineConfig) -> Result<ConstructionTrace> {
    orbit.verify_on(f, 1)?;
    let pat = orbit.pattern()?;
    if !classify(&pat).contains(&TypeTag::Stefan(3)) {
        return Err(Error::TypeMismatch(format!("{pat} is not a Štefan 3-pattern")));
    }
    if pat == TypeTag::Stefan(3).template() {
        stefan3_plain(f, orbit, cfg)
    } else {
        let (lo, hi) = f.domain();
        let c = lo + hi;
        let trace = stefan3_plain(&f.reflect(), &orbit.reflect(&c), cfg)?;
        Ok(reflect_trace(trace, &c))
    }
}

fn stefan3_plain(f: &PLMap, orbit: &FiniteOrbit, cfg: &EngineConfig) -> Result<ConstructionTrace> {
    // displayed ordering x_2 < x_0 < x_1: the anchor is the middle rank
    let x = relabel_from_rank(orbit, 1);
    let w = preimage_nearest_right(f, &x[0], &x[0], &x[1]).ok_or_else(|| {
        Error::CoverageViolation("no preimage of x_0 in (x_0, x_1) (internal error)".into())
    })?;
    let g = f.iterate(2, cfg.piece_cap)?;
    let a = fixed_nearest_right(&g, &x[2], &x[0])
        .ok_or_else(|| Error::CoverageViolation("missing fixed point a (internal error)".into()))?;
    let b = fixed_nearest_left(&g, &x[0], &w)
        .ok_or_else(|| Error::CoverageViolation("missing fixed point b (internal error)".into()))?;
    let c = fixed_nearest_left(&g, &w, &x[1])
        .ok_or_else(|| Error::CoverageViolation("missing fixed point c (internal error)".into()))?;
    let chain = IntervalChain::new(vec![
        (x[0].clone(), b.clone()),
        (x[2].clone(), a.clone()),
        (w.clone(), c.clone()),
        (c.clone(), x[1].clone()),
    ])?;
    let y = solve_itinerary_least(&g, &chain, cfg)?;
    let mut pts = Vec::with_capacity(4);
    let mut cur = y;
    for _ in 0..4 {
        pts.push(cur.clone());
        cur = g.eval(&cur)?;
    }
    let result = FiniteOrbit::new(pts)?;
    if !classify(&result.pattern()?).contains(&TypeTag::TwoParam(2, 2)) {
        return Err(Error::CoverageViolation(
            "period-3 construction missed TwoParam(2,2) (internal error)".into(),
        ));
    }
    Ok(ConstructionTrace {
        z: b.clone(),
        w,
        aux_fixed: Some((a, b, c)),
        chain,
        result,
        map_power: 2,
    })
}

/// Reindex a Štefan `(2n+1)`-orbit of `f` as an orbit of `f^2`; the result
/// classifies as `TwoParam(n, n+1)`.
pub fn stefan_to_two_param(f: &PLMap, orbit: &FiniteOrbit) -> Result<FiniteOrbit> {
    orbit.verify_on(f, 1)?;
    let pat = orbit.pattern()?;
    let q = pat.period();
    if !classify(&pat).contains(&TypeTag::Stefan(q)) {
        return Err(Error::TypeMismatch(format!("{pat} is not a Štefan pattern")));
    }
    let n = (q - 1) / 2;
    // the anchor rank n (orbit center) is mirror-invariant
    let x = relabel_from_rank(orbit, n);
    let pts: Vec<Rat> = (0..q).map(|j| x[(2 * j) % q].clone()).collect();
    let result = FiniteOrbit::new(pts)?;
    result.verify_on(f, 2)?;
    if !classify(&result.pattern()?).contains(&TypeTag::two_param(n, n + 1)) {
        return Err(Error::TypeMismatch(
            "reindexed orbit is not of the expected two-parameter type (internal error)".into(),
        ));
    }
    Ok(result)
}

/// The backward-orbit construction: exact chain `z_{-1}, z_{-2}, …` behind
/// the fixed point of a two-parameter orbit, following the gap pattern of
/// the displayed ordering and then descending to `z` from above.
pub fn backward_prefix(f: &PLMap, orbit: &FiniteOrbit, depth: usize) -> Result<BackwardChainWitness> {
    orbit.verify_on(f, 1)?;
    let pat = orbit.pattern()?;
    let (a, b) = two_param_tag(&pat)
        .ok_or_else(|| Error::TypeMismatch(format!("{pat} is not a two-parameter pattern")))?;
    if a < 2 || b < 2 {
        return Err(Error::TypeMismatch(format!(
            "TwoParam({a},{b}) has a parameter below 2"
        )));
    }
    let (m, n) = if pat == TypeTag::two_param_template(a, b) { (a, b) } else { (b, a) };
    let x = relabel_from_rank(orbit, m);
    let z = fixed_nearest_right(f, &x[n], &x[0]).ok_or_else(|| {
        Error::CoverageViolation("no fixed point between x_n and x_0 (internal error)".into())
    })?;
    let mut prefix: Vec<Rat> = Vec::with_capacity(depth);
    let mut prev = z.clone();
    for i in 1..=depth {
        let (glo, ghi) = if i <= m - 1 {
            (x[m + n - i].clone(), x[m + n - i - 1].clone())
        } else if i == m {
            (x[n].clone(), z.clone())
        } else if i <= m + n - 1 {
            (x[m + n - i - 1].clone(), x[m + n - i].clone())
        } else {
            (z.clone(), prev.clone())
        };
        let next = preimage_smallest(f, &prev, &glo, &ghi).ok_or_else(|| {
            Error::DepthUnreachable(format!(
                "no preimage of {} in ({}, {}) at depth {i}",
                fmt_rat(&prev),
                fmt_rat(&glo),
                fmt_rat(&ghi)
            ))
        })?;
        prefix.push(next.clone());
        prev = next;
    }
    let entry = if depth > m { Some(prefix[m].clone()) } else { None };
    Ok(BackwardChainWitness {
        z: z.clone(),
        side: Side::Right,
        limit: z,
        entry,
        prefix,
        certified: false,
    })
}
