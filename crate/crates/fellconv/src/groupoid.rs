//! Finite groupoids and their inverse semigroup of bisections.
//!
//! A groupoid here is given extensionally: elements are indices
//! `0..n_elements`, units are ordinary elements flagged as such, and the
//! partial composition is a table defined exactly on composable pairs.
//! Every finite groupoid is discrete, so a bisection is any subset on
//! which both the range and the source map are injective.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("element index {index} out of range (groupoid has {n} elements)")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("subset is not a bisection")]
    NotABisection,
    #[error("bisection product violated the bisection invariant; inputs are not valid bisections")]
    ProductNotABisection,
}

/// A finite groupoid: elements, units, range/source maps, a partial
/// composition table and the inversion map.
///
/// Values are immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    n_elements: usize,
    units: Vec<usize>,
    is_unit: Vec<bool>,
    range_of: Vec<usize>,
    source_of: Vec<usize>,
    inverse_of: Vec<usize>,
    /// Dense n x n table; `None` marks non-composable pairs.
    table: Vec<Option<usize>>,
}

impl FiniteGroupoid {
    /// Assemble a groupoid from raw tables without validating the groupoid
    /// laws; run [`FiniteGroupoid::validate`] to check them.
    ///
    /// Panics if array lengths are inconsistent with `n_elements`.
    pub fn from_parts(
        n_elements: usize,
        units: Vec<usize>,
        range_of: Vec<usize>,
        source_of: Vec<usize>,
        inverse_of: Vec<usize>,
        compose_pairs: &[(usize, usize, usize)],
    ) -> Self {
        assert_eq!(range_of.len(), n_elements, "range array length");
        assert_eq!(source_of.len(), n_elements, "source array length");
        assert_eq!(inverse_of.len(), n_elements, "inverse array length");
        let mut is_unit = vec![false; n_elements];
        for &u in &units {
            if u < n_elements {
                is_unit[u] = true;
            }
        }
        let mut table = vec![None; n_elements * n_elements];
        for &(g, h, gh) in compose_pairs {
            assert!(g < n_elements && h < n_elements, "compose pair out of range");
            table[g * n_elements + h] = Some(gh);
        }
        let mut units = units;
        units.sort_unstable();
        units.dedup();
        FiniteGroupoid {
            n_elements,
            units,
            is_unit,
            range_of,
            source_of,
            inverse_of,
            table,
        }
    }

    /// The one-element (trivial) group.
    pub fn trivial_group() -> Self {
        Self::from_parts(1, vec![0], vec![0], vec![0], vec![0], &[(0, 0, 0)])
    }

    /// The cyclic group Z/m on elements `0..m`, unit 0.
    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1);
        let mut pairs = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                pairs.push((a, b, (a + b) % m));
            }
        }
        Self::from_parts(
            m,
            vec![0],
            vec![0; m],
            vec![0; m],
            (0..m).map(|a| (m - a) % m).collect(),
            &pairs,
        )
    }

    /// The pair groupoid on `n` points: elements are pairs `(i, j)`,
    /// indexed `i * n + j`, composing as `(i, j)(j, k) = (i, k)`.
    pub fn pair(n: usize) -> Self {
        assert!(n >= 1);
        let idx = |i: usize, j: usize| i * n + j;
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    pairs.push((idx(i, j), idx(j, k), idx(i, k)));
                }
            }
        }
        let mut range_of = vec![0; n * n];
        let mut source_of = vec![0; n * n];
        let mut inverse_of = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                range_of[idx(i, j)] = idx(i, i);
                source_of[idx(i, j)] = idx(j, j);
                inverse_of[idx(i, j)] = idx(j, i);
            }
        }
        Self::from_parts(
            n * n,
            (0..n).map(|i| idx(i, i)).collect(),
            range_of,
            source_of,
            inverse_of,
            &pairs,
        )
    }

    /// Disjoint union, with the elements of each part shifted past the
    /// previous parts.
    pub fn disjoint_union(parts: &[FiniteGroupoid]) -> Self {
        let n: usize = parts.iter().map(|g| g.n_elements).sum();
        let mut units = Vec::new();
        let mut range_of = Vec::with_capacity(n);
        let mut source_of = Vec::with_capacity(n);
        let mut inverse_of = Vec::with_capacity(n);
        let mut pairs = Vec::new();
        let mut offset = 0;
        for g in parts {
            units.extend(g.units.iter().map(|&u| u + offset));
            range_of.extend(g.range_of.iter().map(|&r| r + offset));
            source_of.extend(g.source_of.iter().map(|&s| s + offset));
            inverse_of.extend(g.inverse_of.iter().map(|&i| i + offset));
            for a in 0..g.n_elements {
                for b in 0..g.n_elements {
                    if let Some(c) = g.table[a * g.n_elements + b] {
                        pairs.push((a + offset, b + offset, c + offset));
                    }
                }
            }
            offset += g.n_elements;
        }
        Self::from_parts(n, units, range_of, source_of, inverse_of, &pairs)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.is_unit[g]
    }

    pub fn range_of(&self, g: usize) -> usize {
        self.range_of[g]
    }

    pub fn source_of(&self, g: usize) -> usize {
        self.source_of[g]
    }

    fn check_index(&self, g: usize) -> Result<(), GroupoidError> {
        if g >= self.n_elements {
            Err(GroupoidError::IndexOutOfRange {
                index: g,
                n: self.n_elements,
            })
        } else {
            Ok(())
        }
    }

    /// Composition: `Some(gh)` when `source(g) = range(h)`, `None`
    /// otherwise.
    pub fn compose(&self, g: usize, h: usize) -> Result<Option<usize>, GroupoidError> {
        self.check_index(g)?;
        self.check_index(h)?;
        Ok(self.table[g * self.n_elements + h])
    }

    /// Composition assuming valid indices; `None` marks non-composable.
    pub fn compose_unchecked(&self, g: usize, h: usize) -> Option<usize> {
        self.table[g * self.n_elements + h]
    }

    pub fn inverse(&self, g: usize) -> Result<usize, GroupoidError> {
        self.check_index(g)?;
        Ok(self.inverse_of[g])
    }

    pub fn inverse_unchecked(&self, g: usize) -> usize {
        self.inverse_of[g]
    }

    pub fn composable(&self, g: usize, h: usize) -> bool {
        self.source_of[g] == self.range_of[h]
    }

    /// All composable pairs, lexicographically.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for g in 0..self.n_elements {
            for h in 0..self.n_elements {
                if self.composable(g, h) {
                    out.push((g, h));
                }
            }
        }
        out
    }

    /// Check every groupoid law and report each violation with a witness.
    pub fn validate(&self) -> GroupoidReport {
        let mut violations = Vec::new();
        let n = self.n_elements;

        for &u in &self.units {
            if u >= n {
                violations.push(GroupoidViolation::UnitOutOfRange { unit: u });
            }
        }
        for g in 0..n {
            for (name, v) in [
                ("range", self.range_of[g]),
                ("source", self.source_of[g]),
                ("inverse", self.inverse_of[g]),
            ] {
                if v >= n {
                    violations.push(GroupoidViolation::MapOutOfRange {
                        map: name,
                        element: g,
                        value: v,
                    });
                }
            }
        }
        if !violations.is_empty() {
            // index errors make the remaining laws unevaluable
            return GroupoidReport { violations };
        }
        for g in 0..n {
            if !self.is_unit[self.range_of[g]] {
                violations.push(GroupoidViolation::RangeNotUnit { element: g });
            }
            if !self.is_unit[self.source_of[g]] {
                violations.push(GroupoidViolation::SourceNotUnit { element: g });
            }
        }

        // composition defined exactly on composable pairs, with the
        // range/source bookkeeping laws
        for g in 0..n {
            for h in 0..n {
                let entry = self.table[g * n + h];
                match (self.composable(g, h), entry) {
                    (true, None) => {
                        violations.push(GroupoidViolation::MissingComposition { g, h })
                    }
                    (false, Some(_)) => {
                        violations.push(GroupoidViolation::SpuriousComposition { g, h })
                    }
                    (true, Some(gh)) => {
                        if gh >= n {
                            violations.push(GroupoidViolation::MapOutOfRange {
                                map: "compose",
                                element: g,
                                value: gh,
                            });
                            continue;
                        }
                        if self.range_of[gh] != self.range_of[g] {
                            violations.push(GroupoidViolation::RangeOfProduct { g, h, gh });
                        }
                        if self.source_of[gh] != self.source_of[h] {
                            violations.push(GroupoidViolation::SourceOfProduct { g, h, gh });
                        }
                    }
                    (false, None) => {}
                }
            }
        }

        // associativity on triply-composable triples
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = self.table[a * n + b] else { continue };
                if ab >= n {
                    continue;
                }
                for c in 0..n {
                    let Some(bc) = self.table[b * n + c] else { continue };
                    if bc >= n {
                        continue;
                    }
                    let left = self.table[ab * n + c];
                    let right = self.table[a * n + bc];
                    if left != right || left.is_none() {
                        violations.push(GroupoidViolation::Associativity { a, b, c });
                    }
                }
            }
        }

        // inverse laws
        for g in 0..n {
            let gi = self.inverse_of[g];
            if self.inverse_of[gi] != g {
                violations.push(GroupoidViolation::InverseNotInvolutive { element: g });
            }
            if self.range_of[gi] != self.source_of[g] || self.source_of[gi] != self.range_of[g] {
                violations.push(GroupoidViolation::InverseSwapsRangeSource { element: g });
            }
            if self.table[g * n + gi] != Some(self.range_of[g]) {
                violations.push(GroupoidViolation::InverseLaw {
                    element: g,
                    side: "right",
                });
            }
            if self.table[gi * n + g] != Some(self.source_of[g]) {
                violations.push(GroupoidViolation::InverseLaw {
                    element: g,
                    side: "left",
                });
            }
        }

        // unit laws
        for &u in &self.units {
            if self.range_of[u] != u || self.source_of[u] != u {
                violations.push(GroupoidViolation::UnitRangeSource { unit: u });
            }
            if self.inverse_of[u] != u {
                violations.push(GroupoidViolation::UnitNotSelfInverse { unit: u });
            }
        }
        for g in 0..n {
            if self.table[self.range_of[g] * n + g] != Some(g) {
                violations.push(GroupoidViolation::UnitIdentityLaw {
                    element: g,
                    side: "left",
                });
            }
            if self.table[g * n + self.source_of[g]] != Some(g) {
                violations.push(GroupoidViolation::UnitIdentityLaw {
                    element: g,
                    side: "right",
                });
            }
        }

        GroupoidReport { violations }
    }

    /// True iff both range and source are injective on the subset.
    pub fn is_bisection(&self, subset: &[usize]) -> bool {
        let mut ranges = BTreeSet::new();
        let mut sources = BTreeSet::new();
        let mut seen = BTreeSet::new();
        for &g in subset {
            assert!(g < self.n_elements, "element index out of range");
            if !seen.insert(g) {
                continue;
            }
            if !ranges.insert(self.range_of[g]) || !sources.insert(self.source_of[g]) {
                return false;
            }
        }
        true
    }

    /// Pointwise product `UV = { uv : u in U, v in V, composable }`.
    ///
    /// The bisection invariant of the result is asserted rather than
    /// assumed; a failure indicates the inputs were not bisections.
    pub fn bisection_product(
        &self,
        u: &Bisection,
        v: &Bisection,
    ) -> Result<Bisection, GroupoidError> {
        let mut elements = BTreeSet::new();
        for &a in &u.elements {
            for &b in &v.elements {
                if let Some(ab) = self.compose_unchecked(a, b) {
                    elements.insert(ab);
                }
            }
        }
        let elements: Vec<usize> = elements.into_iter().collect();
        if !self.is_bisection(&elements) {
            return Err(GroupoidError::ProductNotABisection);
        }
        Ok(Bisection { elements })
    }

    /// Elementwise inverse of a bisection.
    pub fn bisection_inverse(&self, u: &Bisection) -> Bisection {
        let mut elements: Vec<usize> =
            u.elements.iter().map(|&g| self.inverse_of[g]).collect();
        elements.sort_unstable();
        Bisection { elements }
    }

    /// The singleton cover: one bisection per element. The members are
    /// pairwise disjoint and exhaust the groupoid.
    pub fn singleton_cover(&self) -> Vec<Bisection> {
        (0..self.n_elements)
            .map(|g| Bisection { elements: vec![g] })
            .collect()
    }
}

/// A subset of a groupoid on which range and source are injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    elements: Vec<usize>,
}

impl Bisection {
    pub fn new(groupoid: &FiniteGroupoid, mut elements: Vec<usize>) -> Result<Self, GroupoidError> {
        for &g in &elements {
            if g >= groupoid.n_elements() {
                return Err(GroupoidError::IndexOutOfRange {
                    index: g,
                    n: groupoid.n_elements(),
                });
            }
        }
        elements.sort_unstable();
        elements.dedup();
        if !groupoid.is_bisection(&elements) {
            return Err(GroupoidError::NotABisection);
        }
        Ok(Bisection { elements })
    }

    pub fn singleton(g: usize) -> Self {
        Bisection { elements: vec![g] }
    }

    pub fn empty() -> Self {
        Bisection { elements: Vec::new() }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Validation outcome: empty iff every groupoid law holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidReport {
    pub violations: Vec<GroupoidViolation>,
}

impl GroupoidReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for GroupoidReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            writeln!(f, "groupoid: all laws hold")
        } else {
            for v in &self.violations {
                writeln!(f, "groupoid violation: {v}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupoidViolation {
    UnitOutOfRange { unit: usize },
    MapOutOfRange { map: &'static str, element: usize, value: usize },
    RangeNotUnit { element: usize },
    SourceNotUnit { element: usize },
    MissingComposition { g: usize, h: usize },
    SpuriousComposition { g: usize, h: usize },
    RangeOfProduct { g: usize, h: usize, gh: usize },
    SourceOfProduct { g: usize, h: usize, gh: usize },
    Associativity { a: usize, b: usize, c: usize },
    InverseNotInvolutive { element: usize },
    InverseSwapsRangeSource { element: usize },
    InverseLaw { element: usize, side: &'static str },
    UnitRangeSource { unit: usize },
    UnitNotSelfInverse { unit: usize },
    UnitIdentityLaw { element: usize, side: &'static str },
}

impl fmt::Display for GroupoidViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroupoidViolation::*;
        match self {
            UnitOutOfRange { unit } => write!(f, "unit {unit} out of range"),
            MapOutOfRange { map, element, value } => {
                write!(f, "{map} of element {element} is {value}, out of range")
            }
            RangeNotUnit { element } => write!(f, "range of {element} is not a unit"),
            SourceNotUnit { element } => write!(f, "source of {element} is not a unit"),
            MissingComposition { g, h } => {
                write!(f, "composable pair ({g},{h}) has no composition entry")
            }
            SpuriousComposition { g, h } => {
                write!(f, "non-composable pair ({g},{h}) has a composition entry")
            }
            RangeOfProduct { g, h, gh } => {
                write!(f, "range({g}*{h}) = range({gh}) differs from range({g})")
            }
            SourceOfProduct { g, h, gh } => {
                write!(f, "source({g}*{h}) = source({gh}) differs from source({h})")
            }
            Associativity { a, b, c } => {
                write!(f, "associativity fails at witness triple ({a},{b},{c})")
            }
            InverseNotInvolutive { element } => {
                write!(f, "inverse of inverse of {element} is not {element}")
            }
            InverseSwapsRangeSource { element } => {
                write!(f, "inverse of {element} does not swap range and source")
            }
            InverseLaw { element, side } => {
                write!(f, "{side} inverse law fails at witness element {element}")
            }
            UnitRangeSource { unit } => {
                write!(f, "unit {unit} is not its own range and source")
            }
            UnitNotSelfInverse { unit } => write!(f, "unit {unit} is not self-inverse"),
            UnitIdentityLaw { element, side } => {
                write!(f, "{side} unit identity fails at witness element {element}")
            }
        }
    }
}

/// Small named groupoids used by exhaustive suites: every catalog entry
/// has at most `max_elements` elements.
pub fn small_groupoids(max_elements: usize) -> Vec<(String, FiniteGroupoid)> {
    let mut out: Vec<(String, FiniteGroupoid)> = Vec::new();
    out.push(("trivial".into(), FiniteGroupoid::trivial_group()));
    for m in 2..=6 {
        out.push((format!("z{m}"), FiniteGroupoid::cyclic(m)));
    }
    out.push(("pair2".into(), FiniteGroupoid::pair(2)));
    out.push((
        "pair2+trivial".into(),
        FiniteGroupoid::disjoint_union(&[FiniteGroupoid::pair(2), FiniteGroupoid::trivial_group()]),
    ));
    out.push((
        "z2+z3".into(),
        FiniteGroupoid::disjoint_union(&[FiniteGroupoid::cyclic(2), FiniteGroupoid::cyclic(3)]),
    ));
    out.into_iter()
        .filter(|(_, g)| g.n_elements() <= max_elements)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_are_valid() {
        for (name, g) in small_groupoids(9) {
            let report = g.validate();
            assert!(report.is_valid(), "{name}: {report}");
        }
        assert!(FiniteGroupoid::pair(3).validate().is_valid());
    }

    #[test]
    fn mutated_pair_groupoid_cites_inverse_law() {
        // pair(2) with compose((0,1),(1,0)) redirected to (1,1)
        let g = FiniteGroupoid::pair(2);
        let mut pairs = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                if let Some(c) = g.compose_unchecked(a, b) {
                    pairs.push((a, b, if (a, b) == (1, 2) { 3 } else { c }));
                }
            }
        }
        let mutated = FiniteGroupoid::from_parts(
            4,
            vec![0, 3],
            (0..4).map(|e| g.range_of(e)).collect(),
            (0..4).map(|e| g.source_of(e)).collect(),
            (0..4).map(|e| g.inverse_unchecked(e)).collect(),
            &pairs,
        );
        let report = mutated.validate();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, GroupoidViolation::InverseLaw { element: 1, .. })));
    }

    #[test]
    fn compose_examples() {
        let pair = FiniteGroupoid::pair(2);
        // (0,1) = 1, (1,1) = 3, (0,1)(1,1) = (0,1)
        assert_eq!(pair.compose(1, 3).unwrap(), Some(1));
        assert_eq!(pair.compose(1, 1).unwrap(), None);
        assert!(pair.compose(9, 0).is_err());
        let z2 = FiniteGroupoid::cyclic(2);
        assert_eq!(z2.compose(1, 1).unwrap(), Some(0));
    }

    #[test]
    fn inverse_examples() {
        let pair = FiniteGroupoid::pair(2);
        assert_eq!(pair.inverse(1).unwrap(), 2); // (0,1) -> (1,0)
        for &u in pair.units() {
            assert_eq!(pair.inverse(u).unwrap(), u);
        }
        let z2 = FiniteGroupoid::cyclic(2);
        assert_eq!(z2.inverse(1).unwrap(), 1);
        assert!(pair.inverse(99).is_err());
        for g in 0..4 {
            assert_eq!(pair.inverse(pair.inverse(g).unwrap()).unwrap(), g);
        }
    }

    #[test]
    fn bisection_examples() {
        let pair = FiniteGroupoid::pair(2);
        for g in 0..4 {
            assert!(pair.is_bisection(&[g]));
        }
        assert!(pair.is_bisection(&[1, 2])); // {(0,1),(1,0)}
        assert!(!pair.is_bisection(&[1, 0])); // {(0,1),(0,0)}: range collides at 0
    }

    #[test]
    fn bisection_product_examples() {
        let pair = FiniteGroupoid::pair(2);
        let u = Bisection::new(&pair, vec![1]).unwrap();
        let v = Bisection::new(&pair, vec![2]).unwrap();
        assert_eq!(pair.bisection_product(&u, &v).unwrap().elements(), &[0]);
        assert!(pair
            .bisection_product(&u, &Bisection::empty())
            .unwrap()
            .is_empty());

        // U U^{-1} = r(U) for the diagonal-free bisection {(0,1),(1,0)}
        let w = Bisection::new(&pair, vec![1, 2]).unwrap();
        let wi = pair.bisection_inverse(&w);
        let prod = pair.bisection_product(&w, &wi).unwrap();
        let ranges: Vec<usize> = {
            let mut r: Vec<usize> = w.elements().iter().map(|&g| pair.range_of(g)).collect();
            r.sort_unstable();
            r
        };
        assert_eq!(prod.elements(), ranges.as_slice());
    }

    #[test]
    fn bisection_inverse_examples() {
        let pair = FiniteGroupoid::pair(2);
        let u = Bisection::new(&pair, vec![1]).unwrap();
        assert_eq!(pair.bisection_inverse(&u).elements(), &[2]);
        let units = Bisection::new(&pair, vec![0, 3]).unwrap();
        assert_eq!(pair.bisection_inverse(&units), units);
        let w = Bisection::new(&pair, vec![1, 2]).unwrap();
        assert_eq!(pair.bisection_inverse(&pair.bisection_inverse(&w)), w);
    }

    #[test]
    fn singleton_cover_examples() {
        assert_eq!(FiniteGroupoid::trivial_group().singleton_cover().len(), 1);
        let pair = FiniteGroupoid::pair(2);
        let cover = pair.singleton_cover();
        assert_eq!(cover.len(), 4);
        let mut all: Vec<usize> = cover.iter().flat_map(|b| b.elements().to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    /// Enumerate all subsets that are bisections of a small groupoid.
    fn all_bisections(g: &FiniteGroupoid) -> Vec<Bisection> {
        let n = g.n_elements();
        assert!(n <= 6);
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if g.is_bisection(&subset) {
                out.push(Bisection { elements: subset });
            }
        }
        out
    }

    #[test]
    fn inverse_semigroup_law_exhaustive() {
        for (name, g) in small_groupoids(6) {
            for u in all_bisections(&g) {
                let ui = g.bisection_inverse(&u);
                let uui = g.bisection_product(&u, &ui).unwrap();
                let uuiu = g.bisection_product(&uui, &u).unwrap();
                assert_eq!(uuiu, u, "{name}: U U^-1 U != U");
            }
        }
    }

    #[test]
    fn product_inverse_antihomomorphism_exhaustive() {
        for (name, g) in small_groupoids(5) {
            let bisections = all_bisections(&g);
            for u in &bisections {
                for v in &bisections {
                    let uv = g.bisection_product(u, v).unwrap();
                    let lhs = g.bisection_inverse(&uv);
                    let rhs = g
                        .bisection_product(&g.bisection_inverse(v), &g.bisection_inverse(u))
                        .unwrap();
                    assert_eq!(lhs, rhs, "{name}: (UV)^-1 != V^-1 U^-1");
                }
            }
        }
    }

    #[test]
    fn range_source_of_products() {
        for (_, g) in small_groupoids(6) {
            for (a, b) in g.composable_pairs() {
                let ab = g.compose_unchecked(a, b).unwrap();
                assert_eq!(g.range_of(ab), g.range_of(a));
                assert_eq!(g.source_of(ab), g.source_of(b));
            }
        }
    }
}
