//! Orbit patterns: cyclic permutations on spatial ranks.
//!
//! A periodic orbit of an interval map induces a permutation of its points'
//! spatial ranks; that permutation (the *pattern*) is the combinatorial type
//! of the orbit. Patterns are compared up to the left-right mirror symmetry,
//! and three template families are recognized: monotone cycles, Štefan
//! cycles, and the two-parameter cycles.

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::rational::Rat;
use std::collections::BTreeSet;
use std::fmt;

/// A single-cycle permutation on spatial ranks `0..n`.
///
/// `sigma[r]` is the rank of the image of the orbit point at rank `r`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    sigma: Vec<usize>,
}

impl Pattern {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let n = sigma.len();
        if n < 2 {
            return Err(Error::InvalidPattern(format!("period {n} < 2")));
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(Error::InvalidPattern(format!(
                    "{} is not a permutation of 0..{n}",
                    join(&sigma)
                )));
            }
            seen[s] = true;
        }
        // single n-cycle: iterating from rank 0 must visit all ranks
        let mut r = 0usize;
        for _ in 0..n - 1 {
            r = sigma[r];
            if r == 0 {
                return Err(Error::InvalidPattern(format!(
                    "{} is not a single {n}-cycle",
                    join(&sigma)
                )));
            }
        }
        Ok(Pattern { sigma })
    }

    /// Parse the comma-separated image list, e.g. `"2,0,3,1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let sigma = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::ParseError(format!("invalid pattern entry {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(sigma)
    }

    pub fn period(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn image(&self, rank: usize) -> usize {
        self.sigma[rank]
    }

    /// Left-right reflection: `sigma'[r] = (n-1) - sigma[(n-1)-r]`. Involution.
    pub fn mirror(&self) -> Pattern {
        let n = self.sigma.len();
        let sigma = (0..n).map(|r| (n - 1) - self.sigma[(n - 1) - r]).collect();
        Pattern { sigma }
    }

    /// Lexicographic minimum of the pattern and its mirror; idempotent.
    pub fn canonical(&self) -> Pattern {
        let m = self.mirror();
        if m.sigma < self.sigma {
            m
        } else {
            self.clone()
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.sigma <= self.mirror().sigma
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join(&self.sigma))
    }
}

fn join(sigma: &[usize]) -> String {
    sigma.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

/// One representative per mirror-equivalence class of `n`-cycles, in
/// lexicographic order.
pub fn enumerate(n: usize, cfg: &EngineConfig) -> Result<Vec<Pattern>> {
    if n < 2 {
        return Err(Error::InvalidPattern(format!("period {n} < 2")));
    }
    if n > cfg.enumerate_cap {
        return Err(Error::EnumerationCap(n));
    }
    // Every n-cycle corresponds to exactly one visiting order
    // 0 -> v[0] -> v[1] -> ... -> v[n-2] -> 0 over the nonzero ranks.
    let mut classes = BTreeSet::new();
    let mut visit: Vec<usize> = (1..n).collect();
    permute(&mut visit, 0, &mut |order| {
        let mut sigma = vec![0usize; n];
        let mut prev = 0usize;
        for &v in order.iter() {
            sigma[prev] = v;
            prev = v;
        }
        sigma[prev] = 0;
        let p = Pattern { sigma };
        classes.insert(p.canonical());
    });
    Ok(classes.into_iter().collect())
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Pattern of a time-ordered periodic orbit given by its points.
pub fn from_orbit(points: &[Rat]) -> Result<Pattern> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidPattern(format!("orbit of length {n} < 2")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| points[i].cmp(&points[j]));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::DuplicatePoint);
        }
    }
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut sigma = vec![0usize; n];
    for i in 0..n {
        sigma[rank[i]] = rank[(i + 1) % n];
    }
    Pattern::new(sigma)
}

/// Template classification of a pattern.
///
/// `TwoParam` is stored with `m <= n`; the two-parameter templates with
/// swapped parameters are mirror images of each other, so one normalized tag
/// names both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTag {
    Monotone(usize),
    Stefan(usize),
    TwoParam(usize, usize),
}

impl TypeTag {
    pub fn two_param(m: usize, n: usize) -> TypeTag {
        TypeTag::TwoParam(m.min(n), m.max(n))
    }

    pub fn period(&self) -> usize {
        match *self {
            TypeTag::Monotone(n) => n,
            TypeTag::Stefan(q) => q,
            TypeTag::TwoParam(m, n) => m + n,
        }
    }

    /// The template permutation realizing the tag.
    pub fn template(&self) -> Pattern {
        let sigma = match *self {
            TypeTag::Monotone(n) => {
                assert!(n >= 2);
                (0..n).map(|r| (r + 1) % n).collect()
            }
            TypeTag::Stefan(q) => {
                assert!(q >= 3 && q % 2 == 1);
                let n = (q - 1) / 2;
                let mut sigma = vec![0usize; q];
                sigma[0] = n;
                for j in 1..n {
                    sigma[j] = 2 * n + 1 - j;
                }
                sigma[n] = n + 1;
                for k in 1..n {
                    sigma[n + k] = n - k;
                }
                sigma[2 * n] = 0;
                sigma
            }
            TypeTag::TwoParam(m, n) => {
                assert!(m >= 1 && n >= 1);
                let mut sigma = vec![0usize; m + n];
                sigma[0] = m;
                for r in 1..m {
                    sigma[r] = r - 1;
                }
                for s in 0..n.saturating_sub(1) {
                    sigma[m + s] = m + s + 1;
                }
                sigma[m + n - 1] = m - 1;
                sigma
            }
        };
        Pattern { sigma }
    }

    /// Raw template for explicitly ordered parameters (not normalized);
    /// `two_param_template(n, m)` is the mirror of `two_param_template(m, n)`.
    pub fn two_param_template(m: usize, n: usize) -> Pattern {
        let tag = TypeTag::TwoParam(m, n); // bypass normalization on purpose
        tag.template()
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TypeTag::Monotone(n) => write!(f, "Monotone({n})"),
            TypeTag::Stefan(q) => write!(f, "Stefan({q})"),
            TypeTag::TwoParam(m, n) => write!(f, "TwoParam({m},{n})"),
        }
    }
}

/// All template tags carried by the pattern or its mirror.
pub fn classify(p: &Pattern) -> BTreeSet<TypeTag> {
    let n = p.period();
    let mirror = p.mirror();
    let matches = |t: &Pattern| *p == *t || mirror == *t;
    let mut tags = BTreeSet::new();
    if matches(&TypeTag::Monotone(n).template()) {
        tags.insert(TypeTag::Monotone(n));
    }
    if n >= 3 && n % 2 == 1 && matches(&TypeTag::Stefan(n).template()) {
        tags.insert(TypeTag::Stefan(n));
    }
    for m in 1..n {
        if matches(&TypeTag::two_param_template(m, n - m)) {
            tags.insert(TypeTag::two_param(m, n - m));
        }
    }
    tags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use proptest::prelude::*;

    fn pat(s: &[usize]) -> Pattern {
        Pattern::new(s.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_cycles() {
        assert!(Pattern::new(vec![0, 1]).is_err()); // two fixed points
        assert!(Pattern::new(vec![1, 0, 2]).is_err()); // 2 is fixed
        assert!(Pattern::new(vec![1, 1, 0]).is_err()); // not a permutation
        assert!(Pattern::new(vec![0]).is_err()); // period 1 excluded
        assert!(Pattern::new(vec![1, 0, 3, 2]).is_err()); // two 2-cycles
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(pat(&[1, 2, 0]).mirror(), pat(&[2, 0, 1]));
        assert_eq!(pat(&[2, 0, 3, 1]).mirror(), pat(&[2, 0, 3, 1]));
        assert_eq!(pat(&[1, 3, 0, 2]).mirror().mirror(), pat(&[1, 3, 0, 2]));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(pat(&[2, 0, 1]).canonical(), pat(&[1, 2, 0]));
        assert_eq!(pat(&[3, 0, 1, 2]).canonical(), pat(&[1, 2, 3, 0]));
        assert_eq!(pat(&[2, 0, 3, 1]).canonical(), pat(&[2, 0, 3, 1]));
    }

    #[test]
    fn enumerate_small_periods() {
        let cfg = EngineConfig::default();
        assert_eq!(enumerate(2, &cfg).unwrap(), vec![pat(&[1, 0])]);
        assert_eq!(enumerate(3, &cfg).unwrap(), vec![pat(&[1, 2, 0])]);
        assert_eq!(
            enumerate(4, &cfg).unwrap(),
            vec![
                pat(&[1, 2, 3, 0]),
                pat(&[1, 3, 0, 2]),
                pat(&[2, 0, 3, 1]),
                pat(&[2, 3, 1, 0]),
            ]
        );
        assert_eq!(enumerate(5, &cfg).unwrap().len(), 12);
        assert!(enumerate(1, &cfg).is_err());
        assert_eq!(enumerate(11, &cfg), Err(Error::EnumerationCap(11)));
    }

    /// Independent count: all permutations of 0..n, kept when they are a
    /// single cycle, paired off by the mirror formula.
    fn brute_force_class_count(n: usize) -> usize {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut items: Vec<usize> = (0..n).collect();
            fn go(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
                if k == items.len() {
                    out.push(items.clone());
                    return;
                }
                for i in k..items.len() {
                    items.swap(k, i);
                    go(items, k + 1, out);
                    items.swap(k, i);
                }
            }
            go(&mut items, 0, &mut out);
            out
        }
        let cycles: Vec<Vec<usize>> = perms(n)
            .into_iter()
            .filter(|s| Pattern::new(s.clone()).is_ok())
            .collect();
        let mut remaining: BTreeSet<Vec<usize>> = cycles.into_iter().collect();
        let mut count = 0;
        while let Some(s) = remaining.iter().next().cloned() {
            remaining.remove(&s);
            let m = Pattern::new(s).unwrap().mirror();
            remaining.remove(m.sigma());
            count += 1;
        }
        count
    }

    #[test]
    fn enumerate_matches_brute_force_pairing() {
        let cfg = EngineConfig::default();
        for n in 2..=6 {
            assert_eq!(enumerate(n, &cfg).unwrap().len(), brute_force_class_count(n), "n={n}");
        }
    }

    #[test]
    fn enumerate_entries_are_canonical_distinct_cycles() {
        let cfg = EngineConfig::default();
        for n in 2..=7 {
            let classes = enumerate(n, &cfg).unwrap();
            let mut seen = BTreeSet::new();
            for p in &classes {
                assert!(p.is_canonical());
                assert_eq!(p.period(), n);
                assert!(seen.insert(p.clone()));
                assert!(!seen.contains(&p.mirror()) || p.mirror() == *p);
            }
            let factorial_half = (1..n).product::<usize>() / 2;
            assert!(classes.len() >= factorial_half.max(1));
        }
    }

    #[test]
    fn from_orbit_examples() {
        let pts = |v: &[i64]| v.iter().map(|&x| rat_int(x)).collect::<Vec<_>>();
        assert_eq!(from_orbit(&pts(&[2, 3, 1, 0])).unwrap(), pat(&[2, 0, 3, 1]));
        assert_eq!(
            from_orbit(&[rat(1, 2), rat(17, 10), rat(1, 10)]).unwrap(),
            pat(&[1, 2, 0])
        );
        assert_eq!(from_orbit(&pts(&[0, 1, 0])), Err(Error::DuplicatePoint));
    }

    #[test]
    fn classify_examples() {
        let tags = classify(&pat(&[1, 2, 0]));
        assert_eq!(
            tags.into_iter().collect::<Vec<_>>(),
            vec![
                TypeTag::Monotone(3),
                TypeTag::Stefan(3),
                TypeTag::TwoParam(1, 2)
            ]
        );
        let tags = classify(&pat(&[2, 4, 3, 1, 0]));
        assert_eq!(tags.into_iter().collect::<Vec<_>>(), vec![TypeTag::Stefan(5)]);
        let tags = classify(&pat(&[2, 0, 3, 1]));
        assert_eq!(tags.into_iter().collect::<Vec<_>>(), vec![TypeTag::TwoParam(2, 2)]);
    }

    #[test]
    fn templates_round_trip_up_to_period_12() {
        let mut tags: Vec<TypeTag> = (2..=12).map(TypeTag::Monotone).collect();
        tags.extend((1..=5).map(|n| TypeTag::Stefan(2 * n + 1)));
        for m in 1..=11usize {
            for n in m..=11usize {
                if m + n <= 12 {
                    tags.push(TypeTag::TwoParam(m, n));
                }
            }
        }
        for tag in tags {
            let t = tag.template();
            assert!(classify(&t).contains(&tag), "{tag} not recovered from {t}");
        }
    }

    #[test]
    fn two_param_swap_is_mirror() {
        for m in 1..=5usize {
            for n in 1..=5usize {
                assert_eq!(
                    TypeTag::two_param_template(m, n).mirror(),
                    TypeTag::two_param_template(n, m)
                );
            }
        }
    }

    #[test]
    fn parse_display_round_trip() {
        for text in ["1,2,0", "2,0,3,1", "2,4,3,1,0"] {
            assert_eq!(Pattern::parse(text).unwrap().to_string(), text);
        }
        assert!(Pattern::parse("1,0,2").is_err());
        assert!(Pattern::parse("a,b").is_err());
    }

    fn arb_pattern(max_n: usize) -> impl Strategy<Value = Pattern> {
        (2..=max_n)
            .prop_flat_map(|n| Just((1..n).collect::<Vec<usize>>()).prop_shuffle())
            .prop_map(|order| {
                let n = order.len() + 1;
                let mut sigma = vec![0usize; n];
                let mut prev = 0usize;
                for &v in &order {
                    sigma[prev] = v;
                    prev = v;
                }
                sigma[prev] = 0;
                Pattern::new(sigma).unwrap()
            })
    }

    proptest! {
        #[test]
        fn mirror_is_involution(p in arb_pattern(8)) {
            prop_assert_eq!(p.mirror().mirror(), p);
        }

        #[test]
        fn canonical_is_idempotent_and_mirror_invariant(p in arb_pattern(8)) {
            let c = p.canonical();
            prop_assert_eq!(c.canonical(), c.clone());
            prop_assert_eq!(p.mirror().canonical(), c);
        }

        #[test]
        fn classify_is_mirror_invariant(p in arb_pattern(8)) {
            prop_assert_eq!(classify(&p), classify(&p.mirror()));
        }
    }
}
