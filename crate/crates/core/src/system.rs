//! Set systems behind a membership oracle, and the counting wrapper the
//! algorithms use to account for oracle calls.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// A finite set system: elements `0..num_elements()` and ranges
/// `0..num_ranges()`, accessed only through [`SetSystem::contains`].
///
/// `contains` must be pure: the same inputs always give the same answer.
pub trait SetSystem: Sync {
    fn num_elements(&self) -> usize;

    fn num_ranges(&self) -> usize;

    /// Raw membership test. Not counted; algorithms go through [`Oracle`].
    fn contains(&self, range: usize, element: usize) -> bool;

    fn range_size(&self, range: usize) -> usize {
        (0..self.num_elements())
            .filter(|&x| self.contains(range, x))
            .count()
    }

    /// Membership indicator of `range` over an arbitrary list of elements.
    fn indicator(&self, range: usize, elements: &[usize]) -> Vec<bool> {
        elements.iter().map(|&x| self.contains(range, x)).collect()
    }
}

impl<S: SetSystem + ?Sized> SetSystem for &S {
    fn num_elements(&self) -> usize {
        (**self).num_elements()
    }
    fn num_ranges(&self) -> usize {
        (**self).num_ranges()
    }
    fn contains(&self, range: usize, element: usize) -> bool {
        (**self).contains(range, element)
    }
    fn range_size(&self, range: usize) -> usize {
        (**self).range_size(range)
    }
}

impl<S: SetSystem + ?Sized> SetSystem for Box<S> {
    fn num_elements(&self) -> usize {
        (**self).num_elements()
    }
    fn num_ranges(&self) -> usize {
        (**self).num_ranges()
    }
    fn contains(&self, range: usize, element: usize) -> bool {
        (**self).contains(range, element)
    }
    fn range_size(&self, range: usize) -> usize {
        (**self).range_size(range)
    }
}

/// An unordered pair of elements, stored with `u <= v`. `u == v` is a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Self { u: a, v: b }
        } else {
            Self { u: b, v: a }
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// True iff exactly one endpoint lies in `range`. Uncounted.
    pub fn crossed_by<S: SetSystem + ?Sized>(&self, sys: &S, range: usize) -> bool {
        !self.is_loop() && sys.contains(range, self.u) != sys.contains(range, self.v)
    }
}

impl From<(usize, usize)> for Edge {
    fn from((a, b): (usize, usize)) -> Self {
        Edge::new(a, b)
    }
}

/// Oracle-call tallies for one algorithm run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCalls {
    /// Individual membership evaluations.
    pub membership: u64,
    /// Edge/range incidence evaluations; the unit reported as "oracle calls".
    pub incidence: u64,
}

impl std::ops::AddAssign for OracleCalls {
    fn add_assign(&mut self, rhs: Self) {
        self.membership += rhs.membership;
        self.incidence += rhs.incidence;
    }
}

/// Counting view of a set system.
///
/// Every `incidence` adds one incidence call and two membership calls (one
/// for a loop). Algorithms that evaluate many incidences against a shared
/// membership column record them in bulk through [`Oracle::record_incidences`];
/// the tallies always reflect the logical evaluations the algorithm made.
pub struct Oracle<'a, S: SetSystem + ?Sized> {
    system: &'a S,
    calls: OracleCalls,
}

impl<'a, S: SetSystem + ?Sized> Oracle<'a, S> {
    pub fn new(system: &'a S) -> Self {
        Self {
            system,
            calls: OracleCalls::default(),
        }
    }

    pub fn system(&self) -> &'a S {
        self.system
    }

    pub fn calls(&self) -> OracleCalls {
        self.calls
    }

    pub fn membership(&mut self, element: usize, range: usize) -> bool {
        assert!(
            element < self.system.num_elements(),
            "element {element} out of range"
        );
        assert!(range < self.system.num_ranges(), "range {range} out of range");
        self.calls.membership += 1;
        self.system.contains(range, element)
    }

    pub fn incidence(&mut self, edge: Edge, range: usize) -> bool {
        assert!(
            edge.v < self.system.num_elements(),
            "edge {edge:?} out of range"
        );
        assert!(range < self.system.num_ranges(), "range {range} out of range");
        self.calls.incidence += 1;
        if edge.is_loop() {
            self.calls.membership += 1;
            // Evaluated for the tally; a loop is never crossed.
            let _ = self.system.contains(range, edge.u);
            return false;
        }
        self.calls.membership += 2;
        self.system.contains(range, edge.u) != self.system.contains(range, edge.v)
    }

    /// Record `count` incidence evaluations between non-loop edges and a range
    /// that were answered from a shared membership column.
    pub fn record_incidences(&mut self, count: u64) {
        self.calls.incidence += count;
        self.calls.membership += 2 * count;
    }
}

/// A set system with ranges given as explicit element lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitSystem {
    n: usize,
    ranges: Vec<Vec<usize>>,
    bits: Vec<BitSet>,
}

#[derive(Serialize, Deserialize)]
struct ExplicitSystemJson {
    n: usize,
    ranges: Vec<Vec<usize>>,
}

impl ExplicitSystem {
    /// Build from range lists. Each list is sorted and must hold distinct
    /// indices below `n`.
    pub fn new(n: usize, ranges: Vec<Vec<usize>>) -> Result<Self> {
        let mut sorted = Vec::with_capacity(ranges.len());
        let mut bits = Vec::with_capacity(ranges.len());
        for (r, mut members) in ranges.into_iter().enumerate() {
            members.sort_unstable();
            if members.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Data(format!("range {r} repeats an element")));
            }
            if let Some(&last) = members.last() {
                if last >= n {
                    return Err(Error::Data(format!(
                        "range {r} contains element {last} but n = {n}"
                    )));
                }
            }
            let mut b = BitSet::new(n);
            for &x in &members {
                b.set(x, true);
            }
            sorted.push(members);
            bits.push(b);
        }
        Ok(Self {
            n,
            ranges: sorted,
            bits,
        })
    }

    /// Materialize any set system into explicit form.
    pub fn from_system<S: SetSystem + ?Sized>(sys: &S) -> Self {
        let n = sys.num_elements();
        let ranges = (0..sys.num_ranges())
            .map(|r| (0..n).filter(|&x| sys.contains(r, x)).collect())
            .collect();
        Self::new(n, ranges).expect("members of a set system are valid")
    }

    pub fn range(&self, r: usize) -> &[usize] {
        &self.ranges[r]
    }

    pub fn ranges(&self) -> &[Vec<usize>] {
        &self.ranges
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ExplicitSystemJson =
            serde_json::from_str(text).map_err(|e| Error::Data(format!("set system: {e}")))?;
        Self::new(raw.n, raw.ranges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ExplicitSystemJson {
            n: self.n,
            ranges: self.ranges.clone(),
        })
        .expect("plain data serializes")
    }
}

impl SetSystem for ExplicitSystem {
    fn num_elements(&self) -> usize {
        self.n
    }

    fn num_ranges(&self) -> usize {
        self.ranges.len()
    }

    #[inline]
    fn contains(&self, range: usize, element: usize) -> bool {
        self.bits[range].get(element)
    }

    fn range_size(&self, range: usize) -> usize {
        self.ranges[range].len()
    }
}

/// The restriction of a parent system to a subset of its elements.
///
/// Local element `i` is parent element `elements[i]`; ranges keep their ids.
#[derive(Debug, Clone)]
pub struct Restricted<S> {
    parent: S,
    elements: Vec<usize>,
}

impl<S: SetSystem> Restricted<S> {
    pub fn new(parent: S, elements: Vec<usize>) -> Self {
        let n = parent.num_elements();
        assert!(
            elements.iter().all(|&x| x < n),
            "restriction references a missing element"
        );
        Self { parent, elements }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn parent(&self) -> &S {
        &self.parent
    }

    /// Map a local element id back to the parent's id.
    pub fn to_parent(&self, local: usize) -> usize {
        self.elements[local]
    }
}

impl<S: SetSystem> SetSystem for Restricted<S> {
    fn num_elements(&self) -> usize {
        self.elements.len()
    }

    fn num_ranges(&self) -> usize {
        self.parent.num_ranges()
    }

    #[inline]
    fn contains(&self, range: usize, element: usize) -> bool {
        self.parent.contains(range, self.elements[element])
    }
}
