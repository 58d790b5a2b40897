//! Periodic-orbit search by itinerary DFS over monotone pieces.
//!
//! The solver never materializes `f^n`. A branch is a sequence of pieces
//! `(i_0, …, i_{n-1})`; along a branch `f^n` is a single affine map, tracked
//! exactly together with the feasible starting interval. Closing a branch
//! solves one linear equation. Branches whose composite slope is 1 on the
//! diagonal carry a whole segment of period-`n` points and are reported as
//! an `OrbitFamily`.

use super::{PLMap, Piece};
use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::interval::QInterval;
use crate::patterns::{from_orbit, Pattern};
use crate::rational::{midpoint, rat_int, Rat};
use crate::witness::FiniteOrbit;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

/// A one-parameter segment of period-`n` points (composite slope 1 on the
/// diagonal). `interval` is the maximal range of leftmost orbit points;
/// `excluded` lists the finitely many parameter values whose orbit has a
/// smaller least period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitFamily {
    pub interval: (Rat, Rat),
    pub excluded: Vec<Rat>,
    pub representative: FiniteOrbit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodicItem {
    Orbit(FiniteOrbit),
    Family(OrbitFamily),
}

struct Dfs<'a> {
    f: &'a PLMap,
    n: usize,
    visited: usize,
    cap: usize,
    clips: Option<&'a [(Rat, Rat)]>,
}

enum Candidate {
    Isolated(Rat),
    Family { lo: Rat, hi: Rat },
}

impl<'a> Dfs<'a> {
    fn run<V>(&mut self, visit: &mut V) -> Result<ControlFlow<()>>
    where
        V: FnMut(Candidate, &[(Rat, Rat)]) -> ControlFlow<()>,
    {
        let pieces: Vec<Piece> = self.f.pieces().to_vec();
        let mut affines: Vec<(Rat, Rat)> = vec![(rat_int(1), rat_int(0))];
        let (dlo, dhi) = self.f.domain();
        let start = (dlo.clone(), dhi.clone());
        self.step(&pieces, 0, &start.0, &start.1, &mut affines, visit)
    }

    fn step<V>(
        &mut self,
        pieces: &[Piece],
        t: usize,
        lo: &Rat,
        hi: &Rat,
        affines: &mut Vec<(Rat, Rat)>,
        visit: &mut V,
    ) -> Result<ControlFlow<()>>
    where
        V: FnMut(Candidate, &[(Rat, Rat)]) -> ControlFlow<()>,
    {
        if t == self.n {
            let (a, b) = affines.last().unwrap().clone();
            let one = rat_int(1);
            if a != one {
                let x = &b / (&one - &a);
                if x >= *lo && x <= *hi {
                    return Ok(visit(Candidate::Isolated(x), affines));
                }
            } else if b.is_zero() {
                if lo == hi {
                    return Ok(visit(Candidate::Isolated(lo.clone()), affines));
                }
                return Ok(visit(Candidate::Family { lo: lo.clone(), hi: hi.clone() }, affines));
            }
            return Ok(ControlFlow::Continue(()));
        }

        let (a, b) = affines.last().unwrap().clone();
        // image of [lo, hi] under a*x + b
        let ia = &a * lo + &b;
        let ib = &a * hi + &b;
        let (u, v) = if ia <= ib { (ia, ib) } else { (ib, ia) };
        for piece in pieces {
            self.visited += 1;
            if self.visited > self.cap {
                return Err(Error::BranchCapExceeded(self.visited));
            }
            let mut clo = if u > piece.lo { u.clone() } else { piece.lo.clone() };
            let mut chi = if v < piece.hi { v.clone() } else { piece.hi.clone() };
            if let Some(clips) = self.clips {
                let (jlo, jhi) = &clips[t];
                if *jlo > clo {
                    clo = jlo.clone();
                }
                if *jhi < chi {
                    chi = jhi.clone();
                }
            }
            if clo > chi {
                continue;
            }
            let (nlo, nhi) = if a.is_zero() {
                // constant image; the clipped window must contain it
                if b < clo || b > chi {
                    continue;
                }
                (lo.clone(), hi.clone())
            } else {
                let p = (&clo - &b) / &a;
                let q = (&chi - &b) / &a;
                if p <= q {
                    (p, q)
                } else {
                    (q, p)
                }
            };
            affines.push((&piece.a * &a, &piece.a * &b + &piece.b));
            let flow = self.step(pieces, t + 1, &nlo, &nhi, affines, visit)?;
            affines.pop();
            if flow.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

fn proper_divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|d| n % d == 0).collect()
}

fn orbit_points(f: &PLMap, x: &Rat, n: usize) -> Result<Vec<Rat>> {
    let mut pts = Vec::with_capacity(n);
    let mut y = x.clone();
    for _ in 0..n {
        pts.push(y.clone());
        y = f.eval(&y)?;
    }
    debug_assert_eq!(&y, x);
    Ok(pts)
}

/// Exact least period of a point already known to satisfy `f^n(x) = x`.
fn least_period_is(f: &PLMap, x: &Rat, n: usize) -> Result<bool> {
    for d in proper_divisors(n) {
        if f.eval_k(x, d as u32)? == *x {
            return Ok(false);
        }
    }
    Ok(true)
}

fn leftmost_rotation(points: Vec<Rat>) -> Vec<Rat> {
    let k = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(i, _)| i)
        .unwrap();
    let mut out = points[k..].to_vec();
    out.extend_from_slice(&points[..k]);
    out
}

/// `min_t (A_t x + B_t)` over the branch prefix affines.
fn leftmost_value(affines: &[(Rat, Rat)], n: usize, x: &Rat) -> Rat {
    (0..n)
        .map(|t| &affines[t].0 * x + &affines[t].1)
        .min()
        .unwrap()
}

fn family_from_branch(
    f: &PLMap,
    n: usize,
    lo: &Rat,
    hi: &Rat,
    affines: &[(Rat, Rat)],
) -> Result<Option<OrbitFamily>> {
    let one = rat_int(1);
    // sub-period degeneracies
    let mut excluded_x: Vec<Rat> = Vec::new();
    for d in proper_divisors(n) {
        let (ad, bd) = &affines[d];
        if *ad == one {
            if bd.is_zero() {
                return Ok(None); // whole branch already periodic with period d
            }
        } else {
            let xd = bd / (&one - ad);
            if xd >= *lo && xd <= *hi {
                excluded_x.push(xd);
            }
        }
    }
    // parameter interval of leftmost orbit points; the minimum of affine
    // functions is concave, so extremes sit at endpoints and crossings
    let mut candidates = vec![lo.clone(), hi.clone()];
    for t in 0..n {
        for s in (t + 1)..n {
            let (at, bt) = &affines[t];
            let (as_, bs) = &affines[s];
            if at != as_ {
                let xc = (bs - bt) / (at - as_);
                if xc > *lo && xc < *hi {
                    candidates.push(xc);
                }
            }
        }
    }
    let l_lo = leftmost_value(affines, n, lo);
    let l_hi = leftmost_value(affines, n, hi);
    let plo = if l_lo <= l_hi { l_lo.clone() } else { l_hi.clone() };
    let mut phi = if l_lo <= l_hi { l_hi } else { l_lo };
    for c in &candidates {
        let v = leftmost_value(affines, n, c);
        if v > phi {
            phi = v;
        }
    }
    let excluded: BTreeSet<Rat> = excluded_x
        .iter()
        .map(|x| leftmost_value(affines, n, x))
        .collect();

    // representative: the orbit whose leftmost point is the parameter-interval
    // midpoint, dodging excluded parameters deterministically
    let mut param_candidates = vec![midpoint(&plo, &phi)];
    for _ in 0..=excluded.len() {
        let last = param_candidates.last().unwrap().clone();
        param_candidates.push(midpoint(&plo, &last));
    }
    for m in &param_candidates {
        if excluded.contains(m) {
            continue;
        }
        for t in 0..n {
            let (at, bt) = &affines[t];
            if at.is_zero() {
                continue;
            }
            let x = (m - bt) / at;
            if x < *lo || x > *hi || leftmost_value(affines, n, &x) != *m {
                continue;
            }
            if !least_period_is(f, &x, n)? {
                continue;
            }
            let points = leftmost_rotation(orbit_points(f, &x, n)?);
            let representative = FiniteOrbit::new(points)?;
            return Ok(Some(OrbitFamily {
                interval: (plo, phi),
                excluded: excluded.into_iter().collect(),
                representative,
            }));
        }
    }
    Ok(None)
}

/// All orbits of least period exactly `n`, deduplicated, orbits listed from
/// their leftmost point; identity branches appear as families.
pub fn periodic_orbits(f: &PLMap, n: usize, cfg: &EngineConfig) -> Result<Vec<PeriodicItem>> {
    if n == 0 {
        return Err(Error::InvalidPattern("period 0".into()));
    }
    let mut orbits: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut families: BTreeMap<(Rat, Rat), OrbitFamily> = BTreeMap::new();
    let mut err: Option<Error> = None;
    {
        let mut dfs = Dfs { f, n, visited: 0, cap: cfg.branch_cap, clips: None };
        let mut visit = |cand: Candidate, affines: &[(Rat, Rat)]| {
            let outcome: Result<()> = (|| {
                match cand {
                    Candidate::Isolated(x) => {
                        if least_period_is(f, &x, n)? {
                            orbits.insert(leftmost_rotation(orbit_points(f, &x, n)?));
                        }
                    }
                    Candidate::Family { lo, hi } => {
                        if let Some(fam) = family_from_branch(f, n, &lo, &hi, affines)? {
                            families.entry(fam.interval.clone()).or_insert(fam);
                        }
                    }
                }
                Ok(())
            })();
            match outcome {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            }
        };
        dfs.run(&mut visit)?;
    }
    if let Some(e) = err {
        return Err(e);
    }
    let mut out: Vec<PeriodicItem> = orbits
        .into_iter()
        .map(|pts| Ok(PeriodicItem::Orbit(FiniteOrbit::new(pts)?)))
        .collect::<Result<_>>()?;
    out.extend(families.into_values().map(PeriodicItem::Family));
    Ok(out)
}

/// Early-exit existence: some orbit of least period exactly `n`, if any.
pub fn has_period(f: &PLMap, n: usize, cfg: &EngineConfig) -> Result<Option<FiniteOrbit>> {
    if n == 0 {
        return Err(Error::InvalidPattern("period 0".into()));
    }
    let mut found: Option<FiniteOrbit> = None;
    let mut err: Option<Error> = None;
    {
        let mut dfs = Dfs { f, n, visited: 0, cap: cfg.branch_cap, clips: None };
        let mut visit = |cand: Candidate, affines: &[(Rat, Rat)]| {
            let outcome: Result<Option<FiniteOrbit>> = (|| match cand {
                Candidate::Isolated(x) => {
                    if least_period_is(f, &x, n)? {
                        let pts = leftmost_rotation(orbit_points(f, &x, n)?);
                        Ok(Some(FiniteOrbit::new(pts)?))
                    } else {
                        Ok(None)
                    }
                }
                Candidate::Family { lo, hi } => {
                    Ok(family_from_branch(f, n, &lo, &hi, affines)?.map(|fam| fam.representative))
                }
            })();
            match outcome {
                Ok(Some(orbit)) => {
                    found = Some(orbit);
                    ControlFlow::Break(())
                }
                Ok(None) => ControlFlow::Continue(()),
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            }
        };
        dfs.run(&mut visit)?;
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(found)
}

/// Solutions of the cyclic itinerary `f^i(y) ∈ J_i`, `f^N(y) = y` where
/// `N = chain.len()`: isolated points and parameter segments, sorted.
pub(crate) fn itinerary_solutions(
    f: &PLMap,
    chain: &[(Rat, Rat)],
    cfg: &EngineConfig,
) -> Result<Vec<(Rat, Rat)>> {
    let n = chain.len();
    let mut sols: BTreeSet<(Rat, Rat)> = BTreeSet::new();
    {
        let mut dfs = Dfs { f, n, visited: 0, cap: cfg.branch_cap, clips: Some(chain) };
        let mut visit = |cand: Candidate, _affines: &[(Rat, Rat)]| {
            match cand {
                Candidate::Isolated(x) => {
                    sols.insert((x.clone(), x));
                }
                Candidate::Family { lo, hi } => {
                    sols.insert((lo, hi));
                }
            }
            ControlFlow::Continue(())
        };
        dfs.run(&mut visit)?;
    }
    Ok(sols.into_iter().collect())
}

/// Search for an orbit whose pattern equals `target` exactly.
///
/// The DFS walks the target cycle in time order starting from the leftmost
/// point; the target's spatial order is enforced as strict affine
/// constraints on the start value, which keeps the search confined to
/// branches compatible with the pattern.
pub fn orbit_with_pattern(
    f: &PLMap,
    target: &Pattern,
    cfg: &EngineConfig,
) -> Result<Option<FiniteOrbit>> {
    let n = target.period();
    let mut rho = vec![0usize; n];
    for t in 1..n {
        rho[t] = target.image(rho[t - 1]);
    }
    let pieces: Vec<Piece> = f.pieces().to_vec();
    let mut affines: Vec<(Rat, Rat)> = vec![(rat_int(1), rat_int(0))];
    let mut chosen: Vec<usize> = Vec::new();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut visited = 0usize;

    struct Ctx<'a> {
        f: &'a PLMap,
        target: &'a Pattern,
        n: usize,
        rho: &'a [usize],
        pieces: &'a [Piece],
        cap: usize,
    }

    fn close(ctx: &Ctx, x: &Rat) -> Result<Option<FiniteOrbit>> {
        let points = orbit_points(ctx.f, x, ctx.n)?;
        match from_orbit(&points) {
            Ok(p) if p == *ctx.target => Ok(Some(FiniteOrbit::new(points)?)),
            _ => Ok(None),
        }
    }

    fn go(
        ctx: &Ctx,
        t: usize,
        x_set: &QInterval,
        affines: &mut Vec<(Rat, Rat)>,
        chosen: &mut Vec<usize>,
        seen: &mut BTreeMap<usize, usize>,
        visited: &mut usize,
    ) -> Result<Option<FiniteOrbit>> {
        if t == ctx.n {
            let (a, b) = affines.last().unwrap().clone();
            let one = rat_int(1);
            if a != one {
                let x = &b / (&one - &a);
                if x_set.contains(&x) {
                    return close(ctx, &x);
                }
            } else if b.is_zero() {
                if let Some(x) = x_set.pick_mid() {
                    return close(ctx, &x);
                }
            }
            return Ok(None);
        }
        let rank = ctx.rho[t];
        let pred = seen.range(..rank).next_back().map(|(_, &time)| time);
        let succ = seen.range(rank + 1..).next().map(|(_, &time)| time);
        let j_lo = pred.map_or(0, |time| chosen[time]);
        let j_hi = succ.map_or(ctx.pieces.len() - 1, |time| chosen[time]);
        let (a, b) = affines.last().unwrap().clone();
        for j in j_lo..=j_hi {
            *visited += 1;
            if *visited > ctx.cap {
                return Err(Error::BranchCapExceeded(*visited));
            }
            let piece = &ctx.pieces[j];
            let mut xs = x_set.affine_preimage(
                &a,
                &b,
                &QInterval::closed(piece.lo.clone(), piece.hi.clone()),
            );
            if let Some(p) = pred {
                // y_pred < y_t
                let (ap, bp) = &affines[p];
                xs.constrain_linear(&(ap - &a), &(&b - bp), true);
            }
            if let Some(s) = succ {
                // y_t < y_succ
                let (as_, bs) = &affines[s];
                xs.constrain_linear(&(&a - as_), &(bs - &b), true);
            }
            if xs.is_empty() {
                continue;
            }
            affines.push((&piece.a * &a, &piece.a * &b + &piece.b));
            chosen.push(j);
            seen.insert(rank, t);
            let got = go(ctx, t + 1, &xs, affines, chosen, seen, visited)?;
            seen.remove(&rank);
            chosen.pop();
            affines.pop();
            if got.is_some() {
                return Ok(got);
            }
        }
        Ok(None)
    }

    let ctx = Ctx { f, target, n, rho: &rho, pieces: &pieces, cap: cfg.branch_cap };
    let (dlo, dhi) = f.domain();
    let whole = QInterval::closed(dlo.clone(), dhi.clone());
    go(&ctx, 0, &whole, &mut affines, &mut chosen, &mut seen, &mut visited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{classify, TypeTag};
    use crate::plmap::connect_the_dots;
    use crate::rational::rat;

    fn map(p: &str) -> PLMap {
        connect_the_dots(&Pattern::parse(p).unwrap())
    }

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn three_cycle_period_two_orbit() {
        let f = map("1,2,0");
        let got = periodic_orbits(&f, 2, &cfg()).unwrap();
        assert_eq!(got.len(), 1);
        match &got[0] {
            PeriodicItem::Orbit(o) => assert_eq!(o.points(), &[rat(2, 3), rat(5, 3)]),
            other => panic!("expected isolated orbit, got {other:?}"),
        }
    }

    #[test]
    fn involution_family() {
        let f = map("1,0");
        let got = periodic_orbits(&f, 2, &cfg()).unwrap();
        assert_eq!(got.len(), 1);
        match &got[0] {
            PeriodicItem::Family(fam) => {
                assert_eq!(fam.interval, (rat(0, 1), rat(1, 2)));
                assert_eq!(fam.excluded, vec![rat(1, 2)]);
                assert_eq!(fam.representative.points(), &[rat(1, 4), rat(3, 4)]);
            }
            other => panic!("expected family, got {other:?}"),
        }
    }

    #[test]
    fn identity_fixed_family() {
        let id = PLMap::parse("0:0,1:1").unwrap();
        let got = periodic_orbits(&id, 1, &cfg()).unwrap();
        assert_eq!(got.len(), 1);
        match &got[0] {
            PeriodicItem::Family(fam) => {
                assert_eq!(fam.interval, (rat(0, 1), rat(1, 1)));
                assert!(fam.excluded.is_empty());
                assert_eq!(fam.representative.points(), &[rat(1, 2)]);
            }
            other => panic!("expected family, got {other:?}"),
        }
        assert!(periodic_orbits(&id, 2, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn stefan_five_has_no_period_three() {
        let f = map("2,4,3,1,0");
        assert!(periodic_orbits(&f, 3, &cfg()).unwrap().is_empty());
        // independent route: fixed points of the materialized cube are
        // exactly the fixed points of the map itself
        let f3 = f.iterate(3, 1_000_000).unwrap();
        assert_eq!(f3.fixed_sets(), f.fixed_sets());
    }

    #[test]
    fn returned_orbits_validate_exactly() {
        let f = map("2,0,3,1");
        for n in 1..=6usize {
            for item in periodic_orbits(&f, n, &cfg()).unwrap() {
                let orbit = match item {
                    PeriodicItem::Orbit(o) => o,
                    PeriodicItem::Family(fam) => fam.representative,
                };
                assert_eq!(orbit.period(), n);
                for (i, p) in orbit.points().iter().enumerate() {
                    let next = &orbit.points()[(i + 1) % n];
                    assert_eq!(&f.eval(p).unwrap(), next);
                }
                assert!(least_period_is(&f, &orbit.points()[0], n).unwrap());
            }
        }
    }

    #[test]
    fn grid_orbit_is_found() {
        for text in ["1,2,0", "2,0,3,1", "2,4,3,1,0", "2,3,1,0", "1,3,0,2"] {
            let p = Pattern::parse(text).unwrap();
            let f = connect_the_dots(&p);
            let n = p.period();
            let grid: Vec<Rat> = {
                let mut pts = vec![rat_int(0)];
                for _ in 1..n {
                    let next = f.eval(pts.last().unwrap()).unwrap();
                    pts.push(next);
                }
                leftmost_rotation(pts)
            };
            let found = periodic_orbits(&f, n, &cfg()).unwrap();
            assert!(
                found.iter().any(|item| matches!(item, PeriodicItem::Orbit(o) if o.points() == grid.as_slice())),
                "grid orbit of {text} missing"
            );
        }
    }

    #[test]
    fn has_period_agrees_with_enumeration() {
        let f = map("2,3,1,0");
        for n in 1..=8usize {
            let all = periodic_orbits(&f, n, &cfg()).unwrap();
            let one = has_period(&f, n, &cfg()).unwrap();
            assert_eq!(all.is_empty(), one.is_none(), "n={n}");
        }
    }

    #[test]
    fn pattern_search_finds_grid_patterns() {
        for text in ["1,2,0", "2,0,3,1", "2,4,3,1,0"] {
            let p = Pattern::parse(text).unwrap();
            let f = connect_the_dots(&p);
            let got = orbit_with_pattern(&f, &p, &cfg()).unwrap().unwrap();
            assert_eq!(from_orbit(got.points()).unwrap(), p);
        }
    }

    #[test]
    fn pattern_search_respects_absence() {
        // the Štefan-5 map has no monotone 4-orbit and no 3-orbit at all
        let f = map("2,4,3,1,0");
        let m3 = TypeTag::Monotone(3).template();
        assert!(orbit_with_pattern(&f, &m3, &cfg()).unwrap().is_none());
        assert!(orbit_with_pattern(&f, &m3.mirror(), &cfg()).unwrap().is_none());
        // but it does carry a two-parameter (2,3) orbit for f^2
        let f2 = f.iterate(2, 1_000_000).unwrap();
        let t23 = TypeTag::two_param_template(2, 3);
        let found = orbit_with_pattern(&f2, &t23, &cfg())
            .unwrap()
            .or_else(|| orbit_with_pattern(&f2, &t23.mirror(), &cfg()).unwrap());
        let orbit = found.expect("TwoParam(2,3) orbit of f^2");
        assert!(classify(&from_orbit(orbit.points()).unwrap()).contains(&TypeTag::TwoParam(2, 3)));
    }

    #[test]
    fn branch_cap_is_reported() {
        let f = map("1,2,0");
        let tight = EngineConfig { branch_cap: 3, ..EngineConfig::default() };
        assert!(matches!(
            periodic_orbits(&f, 5, &tight),
            Err(Error::BranchCapExceeded(_))
        ));
    }
}
