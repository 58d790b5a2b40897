//! Decision procedures for the orbit-type property families.
//!
//! Finite-parameter properties are decided by targeted periodic-orbit
//! search; the infinite families reduce to an exact criterion on the
//! running maximum of the map near a fixed point (see [`tail`]). Resource
//! caps surface as `Unknown`, never as a silent wrong answer.

mod tail;

pub use tail::decide_tail;

use crate::config::CheckConfig;
use crate::error::{Error, Result};
use crate::patterns::TypeTag;
use crate::plmap::{has_period, orbit_with_pattern, OrbitFamily, PLMap};
use crate::rational::{fmt_rat, Rat};
use crate::witness::FiniteOrbit;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// A finite parameter or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Finite(u32),
    Inf,
}

impl Param {
    pub fn finite(self) -> Option<u32> {
        match self {
            Param::Finite(n) => Some(n),
            Param::Inf => None,
        }
    }
}

impl PartialOrd for Param {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Param {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Param::Finite(a), Param::Finite(b)) => a.cmp(b),
            (Param::Finite(_), Param::Inf) => Ordering::Less,
            (Param::Inf, Param::Finite(_)) => Ordering::Greater,
            (Param::Inf, Param::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Finite(n) => write!(f, "{n}"),
            Param::Inf => write!(f, "inf"),
        }
    }
}

/// One property of a map: `P(n)`, `L(k,n)`, `S(k,q)` or `L2(k,m,n)`, with
/// `n`, `m` possibly infinite. `L2` parameters are normalized to `m <= n`
/// because the swapped property is equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyDescriptor {
    P(u32),
    L { k: u32, n: Param },
    S { k: u32, q: u32 },
    L2 { k: u32, m: Param, n: Param },
}

impl PropertyDescriptor {
    pub fn p(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ParseError("P(n) needs n >= 1".into()));
        }
        Ok(PropertyDescriptor::P(n))
    }

    pub fn l(k: u32, n: Param) -> Result<Self> {
        if k == 0 || n == Param::Finite(0) {
            return Err(Error::ParseError("L(k,n) needs k,n >= 1".into()));
        }
        Ok(PropertyDescriptor::L { k, n })
    }

    pub fn s(k: u32, q: u32) -> Result<Self> {
        if k == 0 || q < 3 || q % 2 == 0 {
            return Err(Error::ParseError("S(k,q) needs k >= 1 and odd q >= 3".into()));
        }
        Ok(PropertyDescriptor::S { k, q })
    }

    pub fn l2(k: u32, m: Param, n: Param) -> Result<Self> {
        if k == 0 || m == Param::Finite(0) || n == Param::Finite(0) {
            return Err(Error::ParseError("L2(k,m,n) needs k,m,n >= 1".into()));
        }
        let (m, n) = if m <= n { (m, n) } else { (n, m) };
        Ok(PropertyDescriptor::L2 { k, m, n })
    }

    fn sort_key(&self) -> (u8, u32, Param, Param) {
        match *self {
            PropertyDescriptor::P(n) => (0, 0, Param::Finite(n), Param::Finite(0)),
            PropertyDescriptor::L { k, n } => (1, k, n, Param::Finite(0)),
            PropertyDescriptor::S { k, q } => (2, k, Param::Finite(q), Param::Finite(0)),
            PropertyDescriptor::L2 { k, m, n } => (3, k, m, n),
        }
    }
}

impl PartialOrd for PropertyDescriptor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PropertyDescriptor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for PropertyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyDescriptor::P(n) => write!(f, "P({n})"),
            PropertyDescriptor::L { k, n } => write!(f, "L(k={k},n={n})"),
            PropertyDescriptor::S { k, q } => write!(f, "S(k={k},q={q})"),
            PropertyDescriptor::L2 { k, m, n } => write!(f, "L2(k={k},m={m},n={n})"),
        }
    }
}

impl FromStr for PropertyDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::ParseError(format!("invalid property descriptor {s:?}"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = &s[..open];
        let body = &s[open + 1..s.len() - 1];
        let fields: BTreeMap<&str, &str> = body
            .split(',')
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        let param = |v: &str| -> Result<Param> {
            if v.eq_ignore_ascii_case("inf") {
                Ok(Param::Inf)
            } else {
                v.parse::<u32>().map(Param::Finite).map_err(|_| bad())
            }
        };
        let int = |key: &str| -> Result<u32> {
            fields.get(key).ok_or_else(bad)?.parse::<u32>().map_err(|_| bad())
        };
        match name {
            "P" => PropertyDescriptor::p(body.trim().parse::<u32>().map_err(|_| bad())?),
            "L" => PropertyDescriptor::l(int("k")?, param(fields.get("n").ok_or_else(bad)?)?),
            "S" => PropertyDescriptor::s(int("k")?, int("q")?),
            "L2" => PropertyDescriptor::l2(
                int("k")?,
                param(fields.get("m").ok_or_else(bad)?)?,
                param(fields.get("n").ok_or_else(bad)?)?,
            ),
            _ => Err(bad()),
        }
    }
}

/// Which side of the fixed point an infinite backward chain lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Exact evidence for an infinite-type property.
///
/// `prefix` lists the chain points `x_{-1}, x_{-2}, …` to the recorded
/// depth; `limit` is a fixed point bounding the chain on the tail side, and
/// `certified` says the infinite continuation was established by the
/// running-max criterion (not just constructed to finite depth).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardChainWitness {
    pub z: Rat,
    pub side: Side,
    pub limit: Rat,
    pub entry: Option<Rat>,
    pub prefix: Vec<Rat>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Orbit(FiniteOrbit),
    Family(OrbitFamily),
    FixedPoint(Rat),
    Chain(BackwardChainWitness),
    DoubleChain(Box<BackwardChainWitness>, Box<BackwardChainWitness>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyStatus {
    Holds(Witness),
    Fails,
    Unknown(String),
}

impl PropertyStatus {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyStatus::Holds(_))
    }

    pub fn fails(&self) -> bool {
        matches!(self, PropertyStatus::Fails)
    }

    pub fn unknown(&self) -> bool {
        matches!(self, PropertyStatus::Unknown(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            PropertyStatus::Holds(_) => "holds",
            PropertyStatus::Fails => "fails",
            PropertyStatus::Unknown(_) => "unknown",
        }
    }
}

/// Grid of statuses in deterministic descriptor order.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub entries: Vec<(PropertyDescriptor, PropertyStatus)>,
}

impl PropertyReport {
    pub fn get(&self, d: &PropertyDescriptor) -> Option<&PropertyStatus> {
        self.entries.iter().find(|(e, _)| e == d).map(|(_, s)| s)
    }
}

/// Decide one property. Resource caps map to `Unknown`.
pub fn check(f: &PLMap, d: &PropertyDescriptor, cfg: &CheckConfig) -> PropertyStatus {
    let mut cache = BTreeMap::new();
    check_cached(f, d, cfg, &mut cache)
}

fn check_cached(
    f: &PLMap,
    d: &PropertyDescriptor,
    cfg: &CheckConfig,
    cache: &mut BTreeMap<u32, PLMap>,
) -> PropertyStatus {
    match run_check(f, d, cfg, cache) {
        Ok(status) => status,
        Err(e) if e.is_resource_cap() => PropertyStatus::Unknown(e.to_string()),
        Err(e) => PropertyStatus::Unknown(format!("internal error: {e}")),
    }
}

fn iterate_cached<'c>(
    f: &PLMap,
    k: u32,
    cfg: &CheckConfig,
    cache: &'c mut BTreeMap<u32, PLMap>,
) -> Result<&'c PLMap> {
    if !cache.contains_key(&k) {
        let g = if k == 1 { f.clone() } else { f.iterate(k, cfg.engine.piece_cap)? };
        cache.insert(k, g);
    }
    Ok(cache.get(&k).unwrap())
}

fn template_orbit(g: &PLMap, tag: TypeTag, cfg: &CheckConfig) -> Result<Option<FiniteOrbit>> {
    let t = tag.template();
    if let Some(o) = orbit_with_pattern(g, &t, &cfg.engine)? {
        return Ok(Some(o));
    }
    let m = t.mirror();
    if m != t {
        orbit_with_pattern(g, &m, &cfg.engine)
    } else {
        Ok(None)
    }
}

fn run_check(
    f: &PLMap,
    d: &PropertyDescriptor,
    cfg: &CheckConfig,
    cache: &mut BTreeMap<u32, PLMap>,
) -> Result<PropertyStatus> {
    let status = match *d {
        PropertyDescriptor::P(n) => match has_period(f, n as usize, &cfg.engine)? {
            Some(orbit) => PropertyStatus::Holds(Witness::Orbit(orbit)),
            None => PropertyStatus::Fails,
        },
        PropertyDescriptor::L { k, n } => {
            let g = iterate_cached(f, k, cfg, cache)?;
            match n {
                Param::Finite(1) => {
                    // every continuous self-map of a compact interval has a
                    // fixed point, but compute it rather than assume it
                    match g.fixed_sets().leftmost() {
                        Some(p) => PropertyStatus::Holds(Witness::FixedPoint(p.clone())),
                        None => PropertyStatus::Fails,
                    }
                }
                Param::Finite(n) => match template_orbit(g, TypeTag::Monotone(n as usize), cfg)? {
                    Some(o) => PropertyStatus::Holds(Witness::Orbit(o)),
                    None => PropertyStatus::Fails,
                },
                Param::Inf => match tail::decide_l_inf(g)? {
                    Some(w) => PropertyStatus::Holds(Witness::Chain(w)),
                    None => PropertyStatus::Fails,
                },
            }
        }
        PropertyDescriptor::S { k, q } => {
            let g = iterate_cached(f, k, cfg, cache)?;
            match template_orbit(g, TypeTag::Stefan(q as usize), cfg)? {
                Some(o) => PropertyStatus::Holds(Witness::Orbit(o)),
                None => PropertyStatus::Fails,
            }
        }
        PropertyDescriptor::L2 { k, m, n } => {
            let g = iterate_cached(f, k, cfg, cache)?;
            match (m, n) {
                (Param::Finite(m), Param::Finite(n)) => {
                    let tag = TypeTag::two_param(m as usize, n as usize);
                    match template_orbit(g, tag, cfg)? {
                        Some(o) => PropertyStatus::Holds(Witness::Orbit(o)),
                        None => PropertyStatus::Fails,
                    }
                }
                (Param::Finite(m), Param::Inf) => {
                    if m > cfg.max_chain_prefix {
                        return Err(Error::BranchCapExceeded(m as usize));
                    }
                    match tail::decide_l2_m_inf(g, m as usize, &cfg.engine)? {
                        Some(w) => PropertyStatus::Holds(Witness::Chain(w)),
                        None => PropertyStatus::Fails,
                    }
                }
                (Param::Inf, _) => match tail::decide_l2_inf_inf(g)? {
                    Some((left, right)) => {
                        PropertyStatus::Holds(Witness::DoubleChain(Box::new(left), Box::new(right)))
                    }
                    None => PropertyStatus::Fails,
                },
            }
        }
    };
    Ok(status)
}

/// The default descriptor grid for a configuration, in canonical order.
pub fn grid(cfg: &CheckConfig) -> Vec<PropertyDescriptor> {
    let mut out = Vec::new();
    for n in 1..=cfg.max_period {
        out.push(PropertyDescriptor::P(n));
    }
    for &k in &cfg.ks {
        for n in 1..=cfg.max_period {
            out.push(PropertyDescriptor::L { k, n: Param::Finite(n) });
        }
        out.push(PropertyDescriptor::L { k, n: Param::Inf });
        for q in (3..=cfg.max_period).step_by(2) {
            out.push(PropertyDescriptor::S { k, q });
        }
        for m in 1..=cfg.max_mn {
            for n in m..=cfg.max_mn {
                out.push(PropertyDescriptor::L2 { k, m: Param::Finite(m), n: Param::Finite(n) });
            }
        }
        for m in 1..=cfg.max_mn.min(cfg.max_chain_prefix) {
            out.push(PropertyDescriptor::L2 { k, m: Param::Finite(m), n: Param::Inf });
        }
        out.push(PropertyDescriptor::L2 { k, m: Param::Inf, n: Param::Inf });
    }
    out.sort();
    out.dedup();
    out
}

/// Evaluate the whole grid; one status per descriptor.
pub fn check_all(f: &PLMap, cfg: &CheckConfig) -> PropertyReport {
    check_descriptors(f, &grid(cfg), cfg)
}

/// Evaluate an explicit descriptor set (sorted, deduplicated).
pub fn check_descriptors(
    f: &PLMap,
    descriptors: &[PropertyDescriptor],
    cfg: &CheckConfig,
) -> PropertyReport {
    let mut ds = descriptors.to_vec();
    ds.sort();
    ds.dedup();
    let mut cache = BTreeMap::new();
    let entries = ds
        .into_iter()
        .map(|d| {
            let s = check_cached(f, &d, cfg, &mut cache);
            (d, s)
        })
        .collect();
    PropertyReport { entries }
}

/// Machine-check a `Holds` witness by exact evaluation.
pub fn verify_holds_witness(
    f: &PLMap,
    d: &PropertyDescriptor,
    status: &PropertyStatus,
    cfg: &CheckConfig,
) -> Result<bool> {
    let witness = match status {
        PropertyStatus::Holds(w) => w,
        _ => return Ok(true),
    };
    let k = match *d {
        PropertyDescriptor::P(_) => 1,
        PropertyDescriptor::L { k, .. }
        | PropertyDescriptor::S { k, .. }
        | PropertyDescriptor::L2 { k, .. } => k,
    };
    let g = if k == 1 { f.clone() } else { f.iterate(k, cfg.engine.piece_cap)? };
    let wanted_tag: Option<TypeTag> = match *d {
        PropertyDescriptor::P(_) => None,
        PropertyDescriptor::L { n: Param::Finite(n), .. } if n >= 2 => {
            Some(TypeTag::Monotone(n as usize))
        }
        PropertyDescriptor::S { q, .. } => Some(TypeTag::Stefan(q as usize)),
        PropertyDescriptor::L2 { m: Param::Finite(m), n: Param::Finite(n), .. } => {
            Some(TypeTag::two_param(m as usize, n as usize))
        }
        _ => None,
    };
    match witness {
        Witness::Orbit(o) => {
            let expected_period = match *d {
                PropertyDescriptor::P(n) => n as usize,
                _ => o.period(),
            };
            if o.period() != expected_period {
                return Ok(false);
            }
            if o.verify_on(&g, 1).is_err() {
                return Ok(false);
            }
            // least period: no proper divisor may return to the start
            for dstep in 1..o.period() {
                if o.period() % dstep == 0 && g.eval_k(&o.points()[0], dstep as u32)? == o.points()[0] {
                    return Ok(false);
                }
            }
            if let Some(tag) = wanted_tag {
                if !crate::patterns::classify(&o.pattern()?).contains(&tag) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Witness::Family(fam) => Ok(fam.representative.verify_on(&g, 1).is_ok()),
        Witness::FixedPoint(p) => Ok(g.eval(p)? == *p),
        Witness::Chain(w) => tail::verify_chain(&g, w),
        Witness::DoubleChain(left, right) => {
            Ok(tail::verify_chain(&g, left)? && tail::verify_chain(&g, right)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::Pattern;
    use crate::plmap::connect_the_dots;
    use crate::rational::rat;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    fn map(p: &str) -> PLMap {
        connect_the_dots(&Pattern::parse(p).unwrap())
    }

    fn d(s: &str) -> PropertyDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn descriptor_text_round_trip() {
        for text in [
            "P(5)",
            "L(k=2,n=inf)",
            "L(k=1,n=4)",
            "S(k=1,q=5)",
            "L2(k=2,m=2,n=3)",
            "L2(k=1,m=2,n=inf)",
            "L2(k=1,m=inf,n=inf)",
        ] {
            assert_eq!(d(text).to_string(), text);
        }
        assert_eq!(d("L2(k=1,m=3,n=2)"), d("L2(k=1,m=2,n=3)"));
        assert_eq!(d("L2(k=1,m=inf,n=2)"), d("L2(k=1,m=2,n=inf)"));
        assert!("S(k=1,q=4)".parse::<PropertyDescriptor>().is_err());
        assert!("P(0)".parse::<PropertyDescriptor>().is_err());
        assert!("Q(3)".parse::<PropertyDescriptor>().is_err());
    }

    #[test]
    fn three_cycle_examples() {
        let f = map("1,2,0");
        assert!(check(&f, &d("L(k=1,n=inf)"), &cfg()).fails());
        let status = check(&f, &d("L(k=2,n=inf)"), &cfg());
        match &status {
            PropertyStatus::Holds(Witness::Chain(w)) => {
                assert_eq!(w.z, rat(4, 3));
                assert_eq!(w.entry, Some(rat(11, 6)));
                assert_eq!(w.prefix, vec![rat(11, 6), rat(35, 24), rat(131, 96)]);
                assert!(w.certified);
            }
            other => panic!("expected chain witness, got {other:?}"),
        }
        assert!(verify_holds_witness(&f, &d("L(k=2,n=inf)"), &status, &cfg()).unwrap());
        assert!(check(&f, &d("P(7)"), &cfg()).holds());
    }

    #[test]
    fn tent_and_stefan_examples() {
        let tent = PLMap::parse("0:0,1/2:1,1:0").unwrap();
        assert!(check(&tent, &d("L2(k=1,m=inf,n=inf)"), &cfg()).fails());
        match check(&tent, &d("L(k=1,n=inf)"), &cfg()) {
            PropertyStatus::Holds(Witness::Chain(w)) => {
                assert_eq!(w.z, rat(0, 1));
                assert_eq!(w.limit, rat(0, 1));
                assert_eq!(w.entry, Some(rat(1, 1)));
            }
            other => panic!("expected chain witness, got {other:?}"),
        }
        let stefan5 = map("2,4,3,1,0");
        assert!(check(&stefan5, &d("P(3)"), &cfg()).fails());
    }

    #[test]
    fn grid_orbit_witnesses_two_param() {
        let f = map("2,0,3,1");
        let status = check(&f, &d("L2(k=1,m=2,n=2)"), &cfg());
        match &status {
            PropertyStatus::Holds(Witness::Orbit(o)) => {
                let mut pts = o.points().to_vec();
                pts.sort();
                assert_eq!(pts, vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1)]);
            }
            other => panic!("expected grid orbit, got {other:?}"),
        }
    }

    #[test]
    fn identity_grid_is_trivial() {
        let id = PLMap::parse("0:0,1:1").unwrap();
        let report = check_all(&id, &cfg());
        for (desc, status) in &report.entries {
            let expect_holds = matches!(
                desc,
                PropertyDescriptor::P(1) | PropertyDescriptor::L { n: Param::Finite(1), .. }
            );
            assert_eq!(status.holds(), expect_holds, "{desc} on identity");
            assert!(!status.unknown(), "{desc} unknown on identity");
        }
    }

    #[test]
    fn three_cycle_has_all_periods() {
        let f = map("1,2,0");
        for n in 1..=9u32 {
            assert!(check(&f, &PropertyDescriptor::P(n), &cfg()).holds(), "P({n})");
        }
    }

    #[test]
    fn mirror_conjugation_invariance() {
        let small = CheckConfig { ks: vec![1, 2], max_period: 6, max_mn: 3, ..cfg() };
        for text in ["1,2,0", "2,0,3,1", "2,3,1,0"] {
            let f = map(text);
            let r = f.reflect();
            let a = check_all(&f, &small);
            let b = check_all(&r, &small);
            for ((da, sa), (db, sb)) in a.entries.iter().zip(b.entries.iter()) {
                assert_eq!(da, db);
                assert_eq!(sa.label(), sb.label(), "{da} differs under reflection of {text}");
            }
        }
    }

    #[test]
    fn monotone_ladder_is_consistent() {
        // L(k,n+1) => L(k,n) and L(k,inf) => L(k,n), exercised on one map
        let f = map("1,2,0");
        let c = cfg();
        for k in [1u32, 2] {
            let inf = check(&f, &PropertyDescriptor::L { k, n: Param::Inf }, &c).holds();
            let mut prev = None;
            for n in (1..=7u32).rev() {
                let cur = check(&f, &PropertyDescriptor::L { k, n: Param::Finite(n) }, &c).holds();
                if let Some(higher) = prev {
                    assert!(!higher || cur, "L(k={k},n={}) held but L(k={k},n={n}) failed", n + 1);
                }
                if inf {
                    assert!(cur || n > 6, "L(k={k},inf) holds but L(k={k},n={n}) fails");
                }
                prev = Some(cur);
            }
        }
    }

    #[test]
    fn all_witnesses_verify_on_small_corpus() {
        let small = CheckConfig { ks: vec![1, 2], max_period: 7, max_mn: 3, ..cfg() };
        for text in ["1,2,0", "2,0,3,1", "2,4,3,1,0"] {
            let f = map(text);
            let report = check_all(&f, &small);
            for (desc, status) in &report.entries {
                assert!(
                    verify_holds_witness(&f, desc, status, &small).unwrap(),
                    "witness for {desc} on {text} failed re-verification"
                );
            }
        }
    }
}
