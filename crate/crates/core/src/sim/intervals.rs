//! Disjoint integer interval sets.
//!
//! The simulated superposition stores, per vertex and counter family, a set
//! of positive integers. The only mutations the dynamics need are "shift
//! everything up by `r` and insert `1..=r`" and removal of arithmetic
//! progressions, so the sets stay unions of a few intervals.

/// A set of `u64` values kept as sorted, disjoint, non-adjacent half-open
/// intervals `[lo, hi)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntSet {
    runs: Vec<(u64, u64)>,
}

impl IntSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary half-open intervals (empties dropped, overlaps
    /// and adjacencies merged).
    pub fn from_intervals(intervals: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut runs: Vec<(u64, u64)> = intervals.into_iter().filter(|(lo, hi)| lo < hi).collect();
        runs.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(runs.len());
        for (lo, hi) in runs {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => *last_hi = (*last_hi).max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Self { runs: merged }
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn runs(&self) -> &[(u64, u64)] {
        &self.runs
    }

    pub fn contains(&self, x: u64) -> bool {
        let idx = self.runs.partition_point(|&(lo, _)| lo <= x);
        idx > 0 && x < self.runs[idx - 1].1
    }

    /// The counter update: replace the set `E` with `{ i + r : i in E } ∪
    /// {1, ..., r}`.
    pub fn inc(&mut self, r: u64) {
        if r == 0 {
            return;
        }
        for (lo, hi) in &mut self.runs {
            *lo += r;
            *hi += r;
        }
        if let Some(&(lo, _)) = self.runs.first() {
            if lo == r + 1 {
                self.runs[0].0 = 1;
                return;
            }
        }
        self.runs.insert(0, (1, r + 1));
    }

    /// Removes a single value if present; reports whether it was present.
    pub fn remove(&mut self, x: u64) -> bool {
        let idx = self.runs.partition_point(|&(lo, _)| lo <= x);
        if idx == 0 || x >= self.runs[idx - 1].1 {
            return false;
        }
        let (lo, hi) = self.runs[idx - 1];
        match (lo == x, x + 1 == hi) {
            (true, true) => {
                self.runs.remove(idx - 1);
            }
            (true, false) => self.runs[idx - 1] = (x + 1, hi),
            (false, true) => self.runs[idx - 1] = (lo, x),
            (false, false) => {
                self.runs[idx - 1] = (lo, x);
                self.runs.insert(idx, (x + 1, hi));
            }
        }
        true
    }

    /// Present members of the arithmetic progression `start, start + step,
    /// ...`, ascending. `step >= 1`.
    pub fn progression_members(&self, start: u64, step: u64) -> Vec<u64> {
        debug_assert!(step >= 1);
        let mut out = Vec::new();
        for &(lo, hi) in &self.runs {
            if hi <= start {
                continue;
            }
            let first = if lo <= start {
                start
            } else {
                start + (lo - start).div_ceil(step) * step
            };
            let mut x = first;
            while x < hi {
                out.push(x);
                x += step;
            }
        }
        out
    }

    /// Removes every member of the progression; returns how many were
    /// present.
    pub fn remove_progression(&mut self, start: u64, step: u64) -> u64 {
        let members = self.progression_members(start, step);
        for &x in &members {
            let removed = self.remove(x);
            debug_assert!(removed);
        }
        members.len() as u64
    }

    pub fn iter_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.runs.iter().flat_map(|&(lo, hi)| lo..hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn inc_matches_definition() {
        // {2, 5} with r = 3 -> {1, 2, 3, 5, 8}
        let mut s = IntSet::from_intervals([(2, 3), (5, 6)]);
        s.inc(3);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1, 2, 3, 5, 8]);

        let mut s = IntSet::new();
        s.inc(1);
        assert_eq!(s.iter_values().collect::<Vec<_>>(), vec![1]);

        // [1..4] shifted by 1 merges with the inserted {1}
        let mut s = IntSet::from_intervals([(1, 5)]);
        s.inc(1);
        assert_eq!(s.runs(), &[(1, 6)]);
    }

    #[test]
    fn remove_splits_runs() {
        let mut s = IntSet::from_intervals([(1, 6)]);
        assert!(s.remove(3));
        assert_eq!(s.runs(), &[(1, 3), (4, 6)]);
        assert!(!s.remove(3));
        assert!(s.remove(1));
        assert!(s.remove(5));
        assert_eq!(s.runs(), &[(2, 3), (4, 5)]);
    }

    #[test]
    fn progression_members_and_removal() {
        let s = IntSet::from_intervals([(1, 10), (14, 18)]);
        assert_eq!(s.progression_members(2, 4), vec![2, 6, 14]);
        assert_eq!(s.progression_members(3, 100), vec![3]);
        assert_eq!(s.progression_members(30, 2), Vec::<u64>::new());

        let mut s = s;
        assert_eq!(s.remove_progression(2, 4), 3);
        assert!(!s.contains(2) && !s.contains(6) && !s.contains(14));
        assert!(s.contains(5) && s.contains(15));
    }

    proptest! {
        #[test]
        fn behaves_like_a_btreeset(ops in proptest::collection::vec((0u8..4, 1u64..40), 0..60)) {
            let mut fast = IntSet::new();
            let mut slow: BTreeSet<u64> = BTreeSet::new();
            for (op, arg) in ops {
                match op {
                    0 => {
                        fast.inc(arg % 5 + 1);
                        let r = arg % 5 + 1;
                        slow = slow.iter().map(|x| x + r).chain(1..=r).collect();
                    }
                    1 => {
                        prop_assert_eq!(fast.remove(arg), slow.remove(&arg));
                    }
                    2 => {
                        let step = arg % 7 + 1;
                        let start = arg % 11 + 1;
                        let removed = fast.remove_progression(start, step);
                        let mut count = 0;
                        let mut x = start;
                        while x <= slow.last().copied().unwrap_or(0) {
                            if slow.remove(&x) {
                                count += 1;
                            }
                            x += step;
                        }
                        prop_assert_eq!(removed, count);
                    }
                    _ => {
                        prop_assert_eq!(fast.contains(arg), slow.contains(&arg));
                    }
                }
                prop_assert_eq!(fast.len(), slow.len() as u64);
                prop_assert_eq!(fast.iter_values().collect::<Vec<_>>(),
                                slow.iter().copied().collect::<Vec<_>>());
                // runs stay normalized: sorted, disjoint, non-adjacent
                for w in fast.runs().windows(2) {
                    prop_assert!(w[0].1 < w[1].0);
                }
            }
        }
    }
}
