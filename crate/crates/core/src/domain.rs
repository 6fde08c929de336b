//! Core data model: binary cause vectors with their componentwise partial
//! order, outcome events as interval unions, evidence, the causal graph, and
//! the dataset with stratum machinery shared by every estimator.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Guard on suffix enumeration: `enumerate_leq`/`enumerate_geq` refuse suffixes
/// longer than this (the candidate set is exponential in the suffix length).
pub const MAX_SUFFIX_LEN: usize = 20;

/// A point x in {0,1}^p, coordinates in the declared topological order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CauseVector {
    bits: Vec<u8>,
}

impl CauseVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        for &b in &bits {
            if b > 1 {
                return Err(Error::NonBinaryBit { value: b });
            }
        }
        Ok(CauseVector { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Coordinates before the pivot `k` (0-based): the prefix A_k.
    pub fn prefix(&self, k: usize) -> &[u8] {
        &self.bits[..k]
    }

    /// Coordinates after the pivot `k` (0-based): the suffix D_k.
    pub fn suffix(&self, k: usize) -> &[u8] {
        &self.bits[k + 1..]
    }

    /// Replaces the block starting at the pivot: (prefix, v, suffix).
    pub fn with_pivot_and_suffix(&self, k: usize, v: u8, suffix: &[u8]) -> CauseVector {
        let mut bits = Vec::with_capacity(self.bits.len());
        bits.extend_from_slice(&self.bits[..k]);
        bits.push(v);
        bits.extend_from_slice(suffix);
        CauseVector { bits }
    }
}

impl fmt::Display for CauseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Componentwise partial order: a ⪯ b iff a_i ≤ b_i for all i.
pub fn partial_order_leq(a: &CauseVector, b: &CauseVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(slice_leq(a.bits(), b.bits()))
}

pub(crate) fn slice_leq(a: &[u8], b: &[u8]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// All vectors d* with d* ⪯ d, in lexicographic order (first coordinate most
/// significant). The count is 2^(number of ones in d).
pub fn enumerate_leq(d: &[u8]) -> Result<Vec<Vec<u8>>> {
    enumerate_cone(d, 1)
}

/// All vectors d* with d ⪯ d*, in lexicographic order.
pub fn enumerate_geq(d: &[u8]) -> Result<Vec<Vec<u8>>> {
    enumerate_cone(d, 0)
}

/// Positions holding `free_value` may take either value; the rest are fixed.
fn enumerate_cone(d: &[u8], free_value: u8) -> Result<Vec<Vec<u8>>> {
    if d.len() > MAX_SUFFIX_LEN {
        return Err(Error::SuffixTooLong {
            len: d.len(),
            max: MAX_SUFFIX_LEN,
        });
    }
    let free: Vec<usize> = d
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == free_value)
        .map(|(i, _)| i)
        .collect();
    let m = free.len();
    let mut out = Vec::with_capacity(1 << m);
    for code in 0u32..(1u32 << m) {
        let mut v = d.to_vec();
        for (j, &pos) in free.iter().enumerate() {
            // first free position is the most significant bit of the code
            v[pos] = ((code >> (m - 1 - j)) & 1) as u8;
        }
        out.push(v);
    }
    out.sort();
    Ok(out)
}

/// A finite union of disjoint intervals on the outcome axis.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeEvent {
    intervals: Vec<Interval>,
}

/// One interval with open/closed endpoints; infinite endpoints are open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        Interval {
            lo,
            lo_closed: lo_closed && lo.is_finite(),
            hi,
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn greater_than(c: f64) -> Self {
        Interval::new(c, false, f64::INFINITY, false)
    }

    pub fn at_least(c: f64) -> Self {
        Interval::new(c, true, f64::INFINITY, false)
    }

    pub fn less_than(c: f64) -> Self {
        Interval::new(f64::NEG_INFINITY, false, c, false)
    }

    pub fn at_most(c: f64) -> Self {
        Interval::new(f64::NEG_INFINITY, false, c, true)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lo_closed { y >= self.lo } else { y > self.lo };
        let below = if self.hi_closed { y <= self.hi } else { y < self.hi };
        above && below
    }

    /// True when the union of the two intervals is itself an interval.
    fn merges_with(&self, next: &Interval) -> bool {
        // assumes self.lo <= next.lo after sorting
        if next.lo < self.hi {
            return true;
        }
        next.lo == self.hi && (self.hi_closed || next.lo_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lb = if self.lo_closed { '[' } else { '(' };
        let rb = if self.hi_closed { ']' } else { ')' };
        write!(f, "{lb}{}, {}{rb}", self.lo, self.hi)
    }
}

impl OutcomeEvent {
    /// Normalizes to a sorted union of disjoint intervals; empty unions are an
    /// error.
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        let mut parts: Vec<Interval> = intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
        if parts.is_empty() {
            return Err(Error::EmptyEvent);
        }
        parts.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap()
                .then(b.lo_closed.cmp(&a.lo_closed))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match merged.last_mut() {
                Some(last) if last.merges_with(&iv) => {
                    if iv.hi > last.hi || (iv.hi == last.hi && iv.hi_closed) {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    }
                }
                _ => merged.push(iv),
            }
        }
        Ok(OutcomeEvent { intervals: merged })
    }

    pub fn greater_than(c: f64) -> Self {
        OutcomeEvent {
            intervals: vec![Interval::greater_than(c)],
        }
    }

    pub fn less_than(c: f64) -> Self {
        OutcomeEvent {
            intervals: vec![Interval::less_than(c)],
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(y))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }
}

impl fmt::Display for OutcomeEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " or ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Observed evidence: a full cause assignment plus an outcome event.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub x: CauseVector,
    pub event: OutcomeEvent,
}

impl Evidence {
    pub fn new(x: CauseVector, event: OutcomeEvent) -> Self {
        Evidence { x, event }
    }
}

/// Parent structure of the causes and of the outcome. Indices are 0-based and
/// must respect the topological order (parents strictly precede children).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    p: usize,
    parents_of_cause: Vec<Vec<usize>>,
    parents_of_outcome: Vec<usize>,
}

impl CausalGraph {
    pub fn new(
        p: usize,
        parents_of_cause: Vec<Vec<usize>>,
        parents_of_outcome: Vec<usize>,
    ) -> Result<Self> {
        if parents_of_cause.len() != p {
            return Err(Error::InvalidGraph(format!(
                "expected {p} cause parent sets, got {}",
                parents_of_cause.len()
            )));
        }
        let mut parents_of_cause = parents_of_cause;
        for (k, pars) in parents_of_cause.iter_mut().enumerate() {
            pars.sort_unstable();
            pars.dedup();
            if pars.iter().any(|&j| j >= k) {
                return Err(Error::InvalidGraph(format!(
                    "parents of cause {} must precede it in topological order",
                    k + 1
                )));
            }
        }
        let mut parents_of_outcome = parents_of_outcome;
        parents_of_outcome.sort_unstable();
        parents_of_outcome.dedup();
        if parents_of_outcome.iter().any(|&j| j >= p) {
            return Err(Error::InvalidGraph(
                "outcome parent index out of range".into(),
            ));
        }
        Ok(CausalGraph {
            p,
            parents_of_cause,
            parents_of_outcome,
        })
    }

    /// The saturated default: Pa_k = {1..k-1}, Pa_Y = {1..p}.
    pub fn full_order(p: usize) -> Self {
        CausalGraph {
            p,
            parents_of_cause: (0..p).map(|k| (0..k).collect()).collect(),
            parents_of_outcome: (0..p).collect(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn parents_of_cause(&self, k: usize) -> &[usize] {
        &self.parents_of_cause[k]
    }

    pub fn parents_of_outcome(&self) -> &[usize] {
        &self.parents_of_outcome
    }

    /// True iff every parent set equals the full-order default.
    pub fn is_full_order(&self) -> bool {
        self.parents_of_outcome.len() == self.p
            && self
                .parents_of_cause
                .iter()
                .enumerate()
                .all(|(k, pars)| pars.len() == k)
    }

    /// Indices that are outcome parents or have a directed path into one.
    pub fn ancestors_of_outcome(&self) -> Vec<usize> {
        let mut reach = vec![false; self.p];
        for &j in &self.parents_of_outcome {
            reach[j] = true;
        }
        // parents precede children, so one reverse sweep closes the set
        for k in (0..self.p).rev() {
            if reach[k] {
                for &j in &self.parents_of_cause[k] {
                    reach[j] = true;
                }
            }
        }
        (0..self.p).filter(|&k| reach[k]).collect()
    }
}

/// Stratum key: a full cause pattern or a partial assignment over a subset of
/// coordinates (sorted by index).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StratumKey {
    Full(CauseVector),
    Partial(Vec<(usize, u8)>),
}

impl StratumKey {
    /// Projects a full vector onto the given coordinate subset.
    pub fn projection(x: &CauseVector, indices: &[usize]) -> StratumKey {
        let mut entries: Vec<(usize, u8)> = indices.iter().map(|&i| (i, x.bit(i))).collect();
        entries.sort_unstable();
        StratumKey::Partial(entries)
    }

    /// Partial assignment from explicit (index, value) pairs.
    pub fn partial(mut entries: Vec<(usize, u8)>) -> StratumKey {
        entries.sort_unstable();
        entries.dedup();
        StratumKey::Partial(entries)
    }

    pub fn matches(&self, row: &[u8]) -> bool {
        match self {
            StratumKey::Full(x) => x.bits() == row,
            StratumKey::Partial(entries) => entries.iter().all(|&(i, v)| row[i] == v),
        }
    }

    /// Human-readable form using the dataset's cause names.
    pub fn describe(&self, names: &[String]) -> String {
        match self {
            StratumKey::Full(x) => names
                .iter()
                .zip(x.bits())
                .map(|(n, b)| format!("{n}={b}"))
                .collect::<Vec<_>>()
                .join(","),
            StratumKey::Partial(entries) => entries
                .iter()
                .map(|&(i, v)| format!("{}={v}", names[i]))
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

impl fmt::Display for StratumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumKey::Full(x) => write!(f, "X={x}"),
            StratumKey::Partial(entries) => {
                for (i, &(idx, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "X{}={v}", idx + 1)?;
                }
                Ok(())
            }
        }
    }
}

/// Row indices matching a stratum key (and optionally an outcome event).
#[derive(Debug, Clone)]
pub struct Stratum {
    pub key: StratumKey,
    pub rows: Vec<usize>,
}

/// Observational data: n rows of (cause pattern, outcome), stored flat.
#[derive(Debug, Clone)]
pub struct Dataset {
    p: usize,
    cause_names: Vec<String>,
    outcome_name: String,
    causes: Vec<u8>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(
        cause_names: Vec<String>,
        outcome_name: String,
        rows: Vec<(Vec<u8>, f64)>,
    ) -> Result<Self> {
        let p = cause_names.len();
        if rows.is_empty() {
            return Err(Error::InvalidData("dataset has no rows".into()));
        }
        let mut causes = Vec::with_capacity(rows.len() * p);
        let mut y = Vec::with_capacity(rows.len());
        for (i, (bits, outcome)) in rows.into_iter().enumerate() {
            if bits.len() != p {
                return Err(Error::InvalidData(format!(
                    "row {} has {} causes, expected {p}",
                    i + 1,
                    bits.len()
                )));
            }
            for &b in &bits {
                if b > 1 {
                    return Err(Error::NonBinaryBit { value: b });
                }
            }
            if !outcome.is_finite() {
                return Err(Error::InvalidData(format!(
                    "row {} outcome is not finite",
                    i + 1
                )));
            }
            causes.extend_from_slice(&bits);
            y.push(outcome);
        }
        Ok(Dataset {
            p,
            cause_names,
            outcome_name,
            causes,
            y,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn cause_names(&self) -> &[String] {
        &self.cause_names
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.causes[i * self.p..(i + 1) * self.p]
    }

    pub fn outcome(&self, i: usize) -> f64 {
        self.y[i]
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.y
    }

    /// Rows bucketed by full cause pattern, keys in lexicographic order.
    pub fn pattern_index(&self) -> BTreeMap<Vec<u8>, Vec<usize>> {
        let mut idx: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
        for i in 0..self.n() {
            idx.entry(self.row(i).to_vec()).or_default().push(i);
        }
        idx
    }

    /// A new dataset with the same columns built from the given row indices.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut causes = Vec::with_capacity(indices.len() * self.p);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            causes.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Dataset {
            p: self.p,
            cause_names: self.cause_names.clone(),
            outcome_name: self.outcome_name.clone(),
            causes,
            y,
        }
    }

    /// Adds a constant to every outcome (used by location-equivariance checks).
    pub fn shift_outcomes(&self, c: f64) -> Dataset {
        let mut shifted = self.clone();
        for v in &mut shifted.y {
            *v += c;
        }
        shifted
    }
}

/// Rows matching the key on all keyed coordinates, optionally filtered by the
/// outcome event. An empty result is representable; downstream estimators
/// reject it where positivity is required.
pub fn stratum_rows(data: &Dataset, key: &StratumKey, event: Option<&OutcomeEvent>) -> Stratum {
    let rows = (0..data.n())
        .filter(|&i| {
            key.matches(data.row(i)) && event.is_none_or(|e| e.contains(data.outcome(i)))
        })
        .collect();
    Stratum {
        key: key.clone(),
        rows,
    }
}

/// Outcome values of a stratum, in row order.
pub fn stratum_outcomes(data: &Dataset, stratum: &Stratum) -> Vec<f64> {
    stratum.rows.iter().map(|&i| data.outcome(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(bits: &[u8]) -> CauseVector {
        CauseVector::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn partial_order_basics() {
        assert!(partial_order_leq(&cv(&[0, 0]), &cv(&[1, 1])).unwrap());
        assert!(!partial_order_leq(&cv(&[1, 0]), &cv(&[0, 1])).unwrap());
        let x = cv(&[1, 0, 1]);
        assert!(partial_order_leq(&x, &x).unwrap());
        assert!(matches!(
            partial_order_leq(&cv(&[1]), &cv(&[1, 0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn enumerate_leq_examples() {
        assert_eq!(
            enumerate_leq(&[1, 1]).unwrap(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(enumerate_leq(&[0, 0]).unwrap(), vec![vec![0, 0]]);
        assert_eq!(enumerate_leq(&[1, 0]).unwrap(), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(enumerate_leq(&[]).unwrap(), vec![Vec::<u8>::new()]);
    }

    #[test]
    fn enumerate_leq_contains_bounds() {
        let d = [1u8, 0, 1, 1];
        let all = enumerate_leq(&d).unwrap();
        let ones = d.iter().filter(|&&b| b == 1).count();
        assert_eq!(all.len(), 1 << ones);
        assert!(all.contains(&d.to_vec()));
        assert!(all.contains(&vec![0, 0, 0, 0]));
        for v in &all {
            assert!(slice_leq(v, &d));
        }
    }

    #[test]
    fn enumerate_geq_mirrors_leq() {
        let d = [0u8, 1, 0];
        let all = enumerate_geq(&d).unwrap();
        assert_eq!(all.len(), 4);
        for v in &all {
            assert!(slice_leq(&d, v));
        }
        assert!(all.contains(&vec![1, 1, 1]));
    }

    #[test]
    fn enumerate_guard() {
        let long = vec![1u8; MAX_SUFFIX_LEN + 1];
        assert!(matches!(
            enumerate_leq(&long),
            Err(Error::SuffixTooLong { .. })
        ));
    }

    #[test]
    fn event_normalization() {
        let ev = OutcomeEvent::new(vec![Interval::greater_than(5.0), Interval::less_than(1.0)])
            .unwrap();
        assert_eq!(ev.intervals().len(), 2);
        assert!(ev.contains(0.5));
        assert!(ev.contains(6.0));
        assert!(!ev.contains(3.0));
        assert!(!ev.contains(5.0));

        let merged = OutcomeEvent::new(vec![
            Interval::new(0.0, true, 2.0, true),
            Interval::new(2.0, false, 3.0, false),
        ])
        .unwrap();
        assert_eq!(merged.intervals().len(), 1);
        assert!(merged.contains(2.5));

        // (1,2) and (2,3) do not merge: 2 itself is excluded
        let gap = OutcomeEvent::new(vec![
            Interval::new(1.0, false, 2.0, false),
            Interval::new(2.0, false, 3.0, false),
        ])
        .unwrap();
        assert_eq!(gap.intervals().len(), 2);
        assert!(!gap.contains(2.0));

        assert!(matches!(
            OutcomeEvent::new(vec![Interval::new(5.0, false, 2.0, true)]),
            Err(Error::EmptyEvent)
        ));
    }

    #[test]
    fn graph_validation_and_defaults() {
        let g = CausalGraph::new(3, vec![vec![], vec![0], vec![0, 1]], vec![2]).unwrap();
        assert_eq!(g.parents_of_cause(2), &[0, 1]);
        assert!(!g.is_full_order());
        assert!(CausalGraph::full_order(4).is_full_order());
        assert!(CausalGraph::new(2, vec![vec![], vec![1]], vec![0]).is_err());
        assert_eq!(g.ancestors_of_outcome(), vec![0, 1, 2]);

        let g2 = CausalGraph::new(3, vec![vec![], vec![], vec![1]], vec![1]).unwrap();
        assert_eq!(g2.ancestors_of_outcome(), vec![1]);
    }

    fn toy_dataset() -> Dataset {
        let rows = vec![
            (vec![0, 0], 1.0),
            (vec![0, 1], 2.0),
            (vec![1, 0], 3.0),
            (vec![1, 1], 4.0),
            (vec![1, 1], 5.0),
        ];
        Dataset::new(vec!["A".into(), "B".into()], "Y".into(), rows).unwrap()
    }

    #[test]
    fn stratum_matching() {
        let data = toy_dataset();
        let full = stratum_rows(
            &data,
            &StratumKey::Full(cv(&[1, 1])),
            None,
        );
        assert_eq!(full.rows, vec![3, 4]);

        let partial = stratum_rows(&data, &StratumKey::partial(vec![(1, 1)]), None);
        assert_eq!(partial.rows, vec![1, 3, 4]);

        let with_event = stratum_rows(
            &data,
            &StratumKey::Full(cv(&[1, 1])),
            Some(&OutcomeEvent::greater_than(4.5)),
        );
        assert_eq!(with_event.rows, vec![4]);
    }

    #[test]
    fn stratum_refilter_is_identity() {
        let data = toy_dataset();
        let key = StratumKey::partial(vec![(0, 1)]);
        let s = stratum_rows(&data, &key, None);
        let sub = data.subset(&s.rows);
        let again = stratum_rows(&sub, &key, None);
        assert_eq!(again.rows.len(), s.rows.len());
        assert!(again.rows.iter().enumerate().all(|(i, &r)| i == r));
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec!["A".into()], "Y".into(), vec![]).is_err());
        assert!(Dataset::new(vec!["A".into()], "Y".into(), vec![(vec![2], 1.0)]).is_err());
        assert!(Dataset::new(vec!["A".into()], "Y".into(), vec![(vec![1], f64::NAN)]).is_err());
    }

    proptest! {
        #[test]
        fn partial_order_is_a_partial_order(
            a in proptest::collection::vec(0u8..=1, 6),
            b in proptest::collection::vec(0u8..=1, 6),
            c in proptest::collection::vec(0u8..=1, 6),
        ) {
            let (a, b, c) = (cv(&a), cv(&b), cv(&c));
            // reflexive
            prop_assert!(partial_order_leq(&a, &a).unwrap());
            // antisymmetric
            if partial_order_leq(&a, &b).unwrap() && partial_order_leq(&b, &a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            // transitive
            if partial_order_leq(&a, &b).unwrap() && partial_order_leq(&b, &c).unwrap() {
                prop_assert!(partial_order_leq(&a, &c).unwrap());
            }
        }

        #[test]
        fn enumerate_leq_is_exactly_the_cone(d in proptest::collection::vec(0u8..=1, 0..8)) {
            let all = enumerate_leq(&d).unwrap();
            let ones = d.iter().filter(|&&b| b == 1).count();
            prop_assert_eq!(all.len(), 1 << ones);
            let mut sorted = all.clone();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), all.len());
            for v in &all {
                prop_assert!(slice_leq(v, &d));
            }
        }
    }
}
