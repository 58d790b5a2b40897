//! Exact piecewise-linear self-maps of a compact rational interval.
//!
//! A map is stored as its node list `(x_j, v_j)` with strictly increasing
//! `x_j`; between nodes the map interpolates linearly. All values must stay
//! inside the domain `[x_0, x_M]` (extremes of a PL map occur at nodes, so
//! checking nodes suffices), which is exactly the self-map condition the
//! fixed-point machinery relies on.

mod solver;

pub use solver::{has_period, orbit_with_pattern, periodic_orbits, OrbitFamily, PeriodicItem};

use crate::error::{Error, Result};
use crate::patterns::Pattern;
use crate::rational::{fmt_rat, parse_rat, rat_int, Rat};
use num_traits::Zero;
use std::fmt;

/// One linear piece: `x ↦ a*x + b` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rat,
    pub hi: Rat,
    pub a: Rat,
    pub b: Rat,
}

impl Piece {
    pub fn value(&self, x: &Rat) -> Rat {
        &self.a * x + &self.b
    }

    /// Solutions of `a*x + b = y` within the piece: `None` for no solution,
    /// a degenerate pair for one point, the full piece for a plateau hit.
    fn solve(&self, y: &Rat) -> Option<(Rat, Rat)> {
        if self.a.is_zero() {
            if self.b == *y {
                Some((self.lo.clone(), self.hi.clone()))
            } else {
                None
            }
        } else {
            let x = (y - &self.b) / &self.a;
            if x >= self.lo && x <= self.hi {
                Some((x.clone(), x))
            } else {
                None
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLMap {
    nodes: Vec<(Rat, Rat)>,
    pieces: Vec<Piece>,
}

impl PLMap {
    pub fn new(nodes: Vec<(Rat, Rat)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMap("need at least two nodes".into()));
        }
        for w in nodes.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidMap(format!(
                    "breakpoints not strictly increasing at x = {}",
                    fmt_rat(&w[1].0)
                )));
            }
        }
        let lo = nodes[0].0.clone();
        let hi = nodes[nodes.len() - 1].0.clone();
        for (x, v) in &nodes {
            if *v < lo || *v > hi {
                return Err(Error::InvalidMap(format!(
                    "not a self-map: value {} at x = {} leaves [{}, {}]",
                    fmt_rat(v),
                    fmt_rat(x),
                    fmt_rat(&lo),
                    fmt_rat(&hi)
                )));
            }
        }
        let pieces = nodes
            .windows(2)
            .map(|w| {
                let (x0, v0) = &w[0];
                let (x1, v1) = &w[1];
                let a = (v1 - v0) / (x1 - x0);
                let b = v0 - &a * x0;
                Piece { lo: x0.clone(), hi: x1.clone(), a, b }
            })
            .collect();
        Ok(PLMap { nodes, pieces })
    }

    /// Parse the node list format `"x:y,x:y,..."` with rational literals.
    pub fn parse(text: &str) -> Result<Self> {
        let nodes = text
            .split(',')
            .map(|tok| {
                let (x, v) = tok
                    .split_once(':')
                    .ok_or_else(|| Error::ParseError(format!("invalid node {tok:?}")))?;
                Ok((parse_rat(x)?, parse_rat(v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        PLMap::new(nodes)
    }

    pub fn to_text(&self) -> String {
        self.nodes
            .iter()
            .map(|(x, v)| format!("{}:{}", fmt_rat(x), fmt_rat(v)))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn nodes(&self) -> &[(Rat, Rat)] {
        &self.nodes
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (&Rat, &Rat) {
        (&self.nodes[0].0, &self.nodes[self.nodes.len() - 1].0)
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(Error::OutOfDomain);
        }
        let idx = self.piece_index(x);
        Ok(self.pieces[idx].value(x))
    }

    /// Index of a piece containing `x` (the left one at shared nodes).
    fn piece_index(&self, x: &Rat) -> usize {
        let mut i = self.pieces.partition_point(|p| p.hi < *x);
        if i >= self.pieces.len() {
            i = self.pieces.len() - 1;
        }
        i
    }

    /// `k`-fold evaluation without materializing the iterate.
    pub fn eval_k(&self, x: &Rat, k: u32) -> Result<Rat> {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.eval(&y)?;
        }
        Ok(y)
    }

    /// Exact range of the map over `[lo, hi] ⊆ domain`.
    pub fn span(&self, lo: &Rat, hi: &Rat) -> Result<(Rat, Rat)> {
        if lo > hi {
            return Err(Error::InvalidMap("empty interval".into()));
        }
        let mut min = self.eval(lo)?;
        let mut max = min.clone();
        let mut consider = |v: Rat| {
            if v < min {
                min = v.clone();
            }
            if v > max {
                max = v;
            }
        };
        consider(self.eval(hi)?);
        for (x, v) in &self.nodes {
            if x > lo && x < hi {
                consider(v.clone());
            }
        }
        Ok((min, max))
    }

    /// Exact PL representation of the `k`-fold composition.
    pub fn iterate(&self, k: u32, piece_cap: usize) -> Result<PLMap> {
        if k == 0 {
            return Err(Error::InvalidMap("iterate needs k >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = compose(self, &out, piece_cap)?;
        }
        Ok(out)
    }

    /// Maximal closed intervals on which the map is the identity.
    pub fn fixed_sets(&self) -> FixedSet {
        let one = rat_int(1);
        let mut raw: Vec<(Rat, Rat)> = Vec::new();
        for p in &self.pieces {
            if p.a == one {
                if p.b.is_zero() {
                    raw.push((p.lo.clone(), p.hi.clone()));
                }
            } else {
                let x = &p.b / (&one - &p.a);
                if x >= p.lo && x <= p.hi {
                    raw.push((x.clone(), x));
                }
            }
        }
        FixedSet { components: merge_components(raw) }
    }

    /// Exact solution set of `f(x) = y` as sorted disjoint closed intervals
    /// (degenerate intervals are points; plateaus at height `y` contribute
    /// full segments).
    pub fn preimages(&self, y: &Rat) -> Vec<(Rat, Rat)> {
        let raw: Vec<(Rat, Rat)> = self.pieces.iter().filter_map(|p| p.solve(y)).collect();
        merge_components(raw)
    }

    /// Conjugation by the reflection `x ↦ lo + hi − x` of the domain.
    pub fn reflect(&self) -> PLMap {
        let (lo, hi) = self.domain();
        let c = lo + hi;
        let nodes = self
            .nodes
            .iter()
            .rev()
            .map(|(x, v)| (&c - x, &c - v))
            .collect();
        PLMap::new(nodes).expect("reflection preserves validity")
    }
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn merge_components(mut raw: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    raw.sort();
    let mut out: Vec<(Rat, Rat)> = Vec::new();
    for (lo, hi) in raw {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// The solution set of `f(x) = x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSet {
    pub components: Vec<(Rat, Rat)>,
}

impl FixedSet {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.components.iter().any(|(lo, hi)| lo <= x && x <= hi)
    }

    /// Leftmost fixed point, if any.
    pub fn leftmost(&self) -> Option<&Rat> {
        self.components.first().map(|(lo, _)| lo)
    }
}

/// `outer ∘ inner`, exact, with breakpoints refined at the preimages of the
/// outer map's nodes.
pub fn compose(outer: &PLMap, inner: &PLMap, piece_cap: usize) -> Result<PLMap> {
    let mut xs: Vec<Rat> = inner.nodes.iter().map(|(x, _)| x.clone()).collect();
    for p in &inner.pieces {
        if p.a.is_zero() {
            continue;
        }
        let va = p.value(&p.lo);
        let vb = p.value(&p.hi);
        let (vmin, vmax) = if va < vb { (va, vb) } else { (vb, va) };
        for (gx, _) in outer.nodes.iter() {
            if *gx > vmin && *gx < vmax {
                let t = (gx - &p.b) / &p.a;
                if t > p.lo && t < p.hi {
                    xs.push(t);
                }
            }
        }
    }
    xs.sort();
    xs.dedup();
    if xs.len() > piece_cap {
        return Err(Error::PieceCapExceeded(xs.len()));
    }
    let mut nodes: Vec<(Rat, Rat)> = Vec::with_capacity(xs.len());
    for x in xs {
        let v = outer.eval(&inner.eval(&x)?)?;
        nodes.push((x, v));
    }
    // drop collinear middle nodes; the function is unchanged
    let mut compact: Vec<(Rat, Rat)> = Vec::with_capacity(nodes.len());
    for node in nodes {
        while compact.len() >= 2 {
            let (x0, v0) = &compact[compact.len() - 2];
            let (x1, v1) = &compact[compact.len() - 1];
            let lhs = (v1 - v0) * (&node.0 - x0);
            let rhs = (&node.1 - v0) * (x1 - x0);
            if lhs == rhs {
                compact.pop();
            } else {
                break;
            }
        }
        compact.push(node);
    }
    PLMap::new(compact)
}

/// The standard model map of a pattern: node `(i, sigma[i])` at every grid
/// point, linear in between.
pub fn connect_the_dots(p: &Pattern) -> PLMap {
    let nodes = p
        .sigma()
        .iter()
        .enumerate()
        .map(|(i, &s)| (rat_int(i as i64), rat_int(s as i64)))
        .collect();
    PLMap::new(nodes).expect("grid nodes of a pattern form a valid self-map")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::from_orbit;
    use crate::rational::rat;

    fn three_cycle() -> PLMap {
        connect_the_dots(&Pattern::parse("1,2,0").unwrap())
    }

    fn tent() -> PLMap {
        PLMap::parse("0:0,1/2:1,1:0").unwrap()
    }

    #[test]
    fn connect_the_dots_examples() {
        let f = three_cycle();
        assert_eq!(f.to_text(), "0:1,1:2,2:0");
        let g = connect_the_dots(&Pattern::parse("2,0,3,1").unwrap());
        assert_eq!(g.to_text(), "0:2,1:0,2:3,3:1");
    }

    #[test]
    fn grid_orbit_round_trips_through_from_orbit() {
        for text in ["1,2,0", "2,0,3,1", "2,4,3,1,0", "2,3,1,0"] {
            let p = Pattern::parse(text).unwrap();
            let f = connect_the_dots(&p);
            let n = p.period();
            let mut orbit = vec![rat_int(0)];
            for _ in 1..n {
                let next = f.eval(orbit.last().unwrap()).unwrap();
                orbit.push(next);
            }
            assert_eq!(f.eval(orbit.last().unwrap()).unwrap(), rat_int(0));
            assert_eq!(from_orbit(&orbit).unwrap(), p);
        }
    }

    #[test]
    fn eval_examples() {
        let f = three_cycle();
        assert_eq!(f.eval(&rat(4, 3)).unwrap(), rat(4, 3));
        assert_eq!(f.eval(&rat(1, 3)).unwrap(), rat(4, 3));
        assert_eq!(f.eval(&rat(1, 1)).unwrap(), rat(2, 1));
        assert_eq!(f.eval(&rat(-1, 2)), Err(Error::OutOfDomain));
        assert_eq!(f.eval(&rat(5, 2)), Err(Error::OutOfDomain));
    }

    #[test]
    fn iterate_examples() {
        let f = three_cycle();
        let f2 = f.iterate(2, 1_000_000).unwrap();
        assert_eq!(f2.to_text(), "0:2,1:0,3/2:2,2:1");
        assert_eq!(f2.eval(&rat(7, 5)).unwrap(), rat(8, 5));
        assert_eq!(f.eval_k(&rat(7, 5), 2).unwrap(), rat(8, 5));
        assert_eq!(f.iterate(1, 1_000_000).unwrap(), f);
        assert!(f.iterate(0, 1_000_000).is_err());
    }

    #[test]
    fn self_map_validation() {
        assert!(PLMap::parse("0:0,1:2").is_err()); // value above domain
        assert!(PLMap::parse("0:0,0:1,1:0").is_err()); // duplicate breakpoint
        assert!(PLMap::parse("0:0").is_err());
    }

    #[test]
    fn fixed_sets_examples() {
        let f = three_cycle();
        assert_eq!(f.fixed_sets().components, vec![(rat(4, 3), rat(4, 3))]);

        let id = PLMap::parse("0:0,1:1").unwrap();
        assert_eq!(id.fixed_sets().components, vec![(rat(0, 1), rat(1, 1))]);

        let swap = connect_the_dots(&Pattern::parse("1,0").unwrap());
        let swap2 = swap.iterate(2, 1_000_000).unwrap();
        assert_eq!(swap2.fixed_sets().components, vec![(rat(0, 1), rat(1, 1))]);
    }

    #[test]
    fn preimages_examples() {
        let f = three_cycle();
        assert_eq!(
            f.preimages(&rat(4, 3)),
            vec![(rat(1, 3), rat(1, 3)), (rat(4, 3), rat(4, 3))]
        );
        assert_eq!(tent().preimages(&rat(1, 1)), vec![(rat(1, 2), rat(1, 2))]);
        let plateau = PLMap::parse("0:1,1:1,2:0").unwrap();
        assert_eq!(plateau.preimages(&rat(1, 1)), vec![(rat(0, 1), rat(1, 1))]);
    }

    #[test]
    fn reflect_is_exact_conjugation() {
        for f in [three_cycle(), tent(), connect_the_dots(&Pattern::parse("2,4,3,1,0").unwrap())] {
            let r = f.reflect();
            let (lo, hi) = f.domain();
            let c = lo + hi;
            let mut probes: Vec<Rat> = f.nodes().iter().map(|(x, _)| x.clone()).collect();
            for w in f.nodes().windows(2) {
                probes.push((&w[0].0 + &w[1].0) / rat(2, 1));
            }
            for x in probes {
                assert_eq!(r.eval(&(&c - &x)).unwrap(), &c - &f.eval(&x).unwrap());
            }
            assert_eq!(r.reflect(), f);
        }
    }

    #[test]
    fn span_is_exact() {
        let f = three_cycle();
        assert_eq!(f.span(&rat(0, 1), &rat(2, 1)).unwrap(), (rat(0, 1), rat(2, 1)));
        assert_eq!(f.span(&rat(0, 1), &rat(1, 2)).unwrap(), (rat(1, 1), rat(3, 2)));
    }
}
