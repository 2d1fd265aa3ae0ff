//! Choice functions stored as explicit tables, preference lists that induce
//! them, the structural validators, and the Blair comparison.

use crate::set::{AgentSet, MAX_SIDE};

/// Strict ranking of subsets of the opposite side. Subsets that are not listed
/// are never chosen.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreferenceList {
    ranking: Vec<AgentSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreferenceError {
    Duplicate(AgentSet),
    MissingEmptySet,
}

impl PreferenceList {
    pub fn new(ranking: Vec<AgentSet>) -> Result<Self, PreferenceError> {
        let mut seen = std::collections::HashSet::new();
        for &s in &ranking {
            if !seen.insert(s) {
                return Err(PreferenceError::Duplicate(s));
            }
        }
        if !seen.contains(&AgentSet::EMPTY) {
            return Err(PreferenceError::MissingEmptySet);
        }
        Ok(PreferenceList { ranking })
    }

    pub fn ranking(&self) -> &[AgentSet] {
        &self.ranking
    }

    /// Position in the ranking, 0 being the most preferred.
    pub fn rank(&self, set: AgentSet) -> Option<usize> {
        self.ranking.iter().position(|&s| s == set)
    }

    /// Whether every listed nonempty set is a singleton.
    pub fn is_singleton_list(&self) -> bool {
        self.ranking.iter().all(|s| s.len() <= 1)
    }

    /// Entries ranked above the empty set.
    pub fn acceptable(&self) -> impl Iterator<Item = AgentSet> + '_ {
        self.ranking.iter().copied().take_while(|s| !s.is_empty())
    }
}

/// Problems found while assembling a choice table from explicit entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableError {
    Missing(AgentSet),
    Duplicate(AgentSet),
    OutOfRange(AgentSet),
    NotSubset { subset: AgentSet, chosen: AgentSet },
    TooLarge(usize),
}

/// A choice function over the subsets of a side with `size` agents, as a total
/// table indexed by the subset bitmask.
#[derive(Clone, Debug)]
pub struct ChoiceFunction {
    size: usize,
    table: Vec<AgentSet>,
    induced_from: Option<PreferenceList>,
}

// Two choice functions are the same if their tables agree; the ranking they
// may have been induced from is presentation only.
impl PartialEq for ChoiceFunction {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.table == other.table
    }
}

impl Eq for ChoiceFunction {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubstitutabilityViolation {
    pub larger: AgentSet,
    pub smaller: AgentSet,
    pub element: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsistencyViolation {
    pub larger: AgentSet,
    pub smaller: AgentSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathIndependenceViolation {
    pub first: AgentSet,
    pub second: AgentSet,
}

/// Outcome of comparing two sets under the Blair order of one agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlairVerdict {
    StrictlyPrefers,
    Equal,
    StrictlyDispreferred,
    Incomparable,
}

impl ChoiceFunction {
    /// Builds a table from `(T, C(T))` entries; every subset must appear exactly once.
    pub fn from_table<I>(size: usize, entries: I) -> Result<Self, TableError>
    where
        I: IntoIterator<Item = (AgentSet, AgentSet)>,
    {
        if size > MAX_SIDE {
            return Err(TableError::TooLarge(size));
        }
        let full = AgentSet::full(size);
        let mut table: Vec<Option<AgentSet>> = vec![None; 1 << size];
        for (subset, chosen) in entries {
            if !subset.is_subset(full) {
                return Err(TableError::OutOfRange(subset));
            }
            if !chosen.is_subset(subset) {
                return Err(TableError::NotSubset { subset, chosen });
            }
            let slot = &mut table[subset.bits() as usize];
            if slot.is_some() {
                return Err(TableError::Duplicate(subset));
            }
            *slot = Some(chosen);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(bits, c)| c.ok_or(TableError::Missing(AgentSet::from_bits(bits as u32))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ChoiceFunction {
            size,
            table,
            induced_from: None,
        })
    }

    /// C(T) is the highest-ranked listed set contained in T.
    pub fn induced(size: usize, pref: &PreferenceList) -> Self {
        assert!(size <= MAX_SIDE, "side too large for a choice table");
        let table = AgentSet::full(size)
            .subsets()
            .map(|t| {
                pref.ranking()
                    .iter()
                    .copied()
                    .find(|s| s.is_subset(t))
                    .unwrap_or(AgentSet::EMPTY)
            })
            .collect();
        ChoiceFunction {
            size,
            table,
            induced_from: Some(pref.clone()),
        }
    }

    /// The function that never chooses anybody.
    pub fn constant_empty(size: usize) -> Self {
        ChoiceFunction {
            size,
            table: vec![AgentSet::EMPTY; 1 << size],
            induced_from: None,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn domain(&self) -> AgentSet {
        AgentSet::full(self.size)
    }

    pub fn induced_from(&self) -> Option<&PreferenceList> {
        self.induced_from.as_ref()
    }

    pub fn choose(&self, t: AgentSet) -> AgentSet {
        self.table[t.bits() as usize]
    }

    /// `(T, C(T))` pairs ascending by T.
    pub fn entries(&self) -> impl Iterator<Item = (AgentSet, AgentSet)> + '_ {
        self.table
            .iter()
            .enumerate()
            .map(|(bits, &c)| (AgentSet::from_bits(bits as u32), c))
    }

    /// First `(T, T', x)` with `T' ⊆ T`, `x ∈ C(T) ∩ T'` and `x ∉ C(T')`.
    pub fn substitutability_violation(&self) -> Option<SubstitutabilityViolation> {
        for t in self.domain().canonical_subsets() {
            let chosen = self.choose(t);
            for sub in t.canonical_subsets() {
                let missing = (chosen & sub) - self.choose(sub);
                if let Some(element) = missing.iter().next() {
                    return Some(SubstitutabilityViolation {
                        larger: t,
                        smaller: sub,
                        element,
                    });
                }
            }
        }
        None
    }

    pub fn is_substitutable(&self) -> bool {
        self.substitutability_violation().is_none()
    }

    /// First `(T, T')` with `C(T) ⊆ T' ⊆ T` and `C(T') ≠ C(T)`.
    pub fn consistency_violation(&self) -> Option<ConsistencyViolation> {
        for t in self.domain().canonical_subsets() {
            let chosen = self.choose(t);
            for sub in t.canonical_subsets() {
                if chosen.is_subset(sub) && self.choose(sub) != chosen {
                    return Some(ConsistencyViolation {
                        larger: t,
                        smaller: sub,
                    });
                }
            }
        }
        None
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency_violation().is_none()
    }

    /// First `(T, T')` with `C(T ∪ T') ≠ C(C(T) ∪ T')`.
    pub fn path_independence_violation(&self) -> Option<PathIndependenceViolation> {
        let order = self.domain().canonical_subsets();
        for &first in &order {
            let staged = self.choose(first);
            for &second in &order {
                if self.choose(first | second) != self.choose(staged | second) {
                    return Some(PathIndependenceViolation { first, second });
                }
            }
        }
        None
    }

    pub fn is_path_independent(&self) -> bool {
        self.path_independence_violation().is_none()
    }

    pub fn blair_compare(&self, t: AgentSet, other: AgentSet) -> BlairVerdict {
        if t == other {
            return BlairVerdict::Equal;
        }
        let joint = self.choose(t | other);
        if joint == t {
            BlairVerdict::StrictlyPrefers
        } else if joint == other {
            BlairVerdict::StrictlyDispreferred
        } else {
            BlairVerdict::Incomparable
        }
    }

    /// `T ⪰ T'` under the Blair order (identical sets count as equal).
    pub fn blair_weakly_prefers(&self, t: AgentSet, other: AgentSet) -> bool {
        matches!(
            self.blair_compare(t, other),
            BlairVerdict::StrictlyPrefers | BlairVerdict::Equal
        )
    }
}

/// Raw list order `T ≥ T'` for a many-to-one worker whose list ranks single
/// firms and the empty set. Sets missing from the list rank below every
/// listed one.
pub fn worker_prefers_m21(
    pref: &PreferenceList,
    t: AgentSet,
    other: AgentSet,
) -> Result<bool, crate::Error> {
    if t.len() > 1 || other.len() > 1 {
        return Err(crate::Error::NotSingleton);
    }
    if t == other {
        return Ok(true);
    }
    Ok(match (pref.rank(t), pref.rank(other)) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> AgentSet {
        AgentSet::from_indices(ix.iter().copied())
    }

    fn list(sets: &[&[usize]]) -> PreferenceList {
        PreferenceList::new(sets.iter().map(|s| set(s)).collect()).unwrap()
    }

    // >_{w1} from the three-by-three market: {f1f2},{f2f3},{f1},{f2},{f3},∅
    fn w1_m69() -> ChoiceFunction {
        ChoiceFunction::induced(3, &list(&[&[0, 1], &[1, 2], &[0], &[1], &[2], &[]]))
    }

    // >_{f1}: {w1w2},{w2w3},{w1},{w2},{w3},∅
    fn f1_m69() -> ChoiceFunction {
        ChoiceFunction::induced(3, &list(&[&[0, 1], &[1, 2], &[0], &[1], &[2], &[]]))
    }

    fn non_substitutable() -> ChoiceFunction {
        ChoiceFunction::induced(3, &list(&[&[0, 1], &[2], &[]]))
    }

    #[test]
    fn induced_table_matches_printed_values() {
        let c = w1_m69();
        let expected = [
            (&[0, 1, 2][..], &[0, 1][..]),
            (&[0, 1], &[0, 1]),
            (&[1, 2], &[1, 2]),
            (&[0, 2], &[0]),
            (&[0], &[0]),
            (&[1], &[1]),
            (&[2], &[2]),
            (&[], &[]),
        ];
        for (t, chosen) in expected {
            assert_eq!(c.choose(set(t)), set(chosen), "C({t:?})");
        }
    }

    #[test]
    fn choose_empty_is_empty() {
        assert_eq!(w1_m69().choose(AgentSet::EMPTY), AgentSet::EMPTY);
        assert_eq!(
            ChoiceFunction::constant_empty(4).choose(AgentSet::EMPTY),
            AgentSet::EMPTY
        );
    }

    #[test]
    fn f1_picks_w1_from_w1_w3() {
        assert_eq!(f1_m69().choose(set(&[0, 2])), set(&[0]));
    }

    #[test]
    fn ranking_of_only_empty_gives_constant_empty() {
        let c = ChoiceFunction::induced(3, &list(&[&[]]));
        assert_eq!(c, ChoiceFunction::constant_empty(3));
    }

    #[test]
    fn rule_application_on_pair_over_single() {
        let c = non_substitutable();
        assert_eq!(c.choose(set(&[0, 1, 2])), set(&[0, 1]));
        assert_eq!(c.choose(set(&[0, 2])), set(&[2]));
    }

    #[test]
    fn substitutability_counterexample_is_reported() {
        let v = non_substitutable().substitutability_violation().unwrap();
        assert_eq!(v.larger, set(&[0, 1, 2]));
        assert_eq!(v.smaller, set(&[0, 2]));
        assert_eq!(v.element, 0);
    }

    #[test]
    fn constant_empty_passes_everything() {
        let c = ChoiceFunction::constant_empty(3);
        assert!(c.is_substitutable());
        assert!(c.is_consistent());
        assert!(c.is_path_independent());
    }

    #[test]
    fn consistency_counterexample() {
        let c = ChoiceFunction::from_table(
            2,
            [
                (set(&[]), set(&[])),
                (set(&[0]), set(&[])),
                (set(&[1]), set(&[])),
                (set(&[0, 1]), set(&[0])),
            ],
        )
        .unwrap();
        let v = c.consistency_violation().unwrap();
        assert_eq!((v.larger, v.smaller), (set(&[0, 1]), set(&[0])));
    }

    #[test]
    fn non_substitutable_table_is_not_path_independent() {
        let c = non_substitutable();
        assert!(!c.is_path_independent());
        // C({w1,w3} ∪ {w2}) = {w1,w2} but C(C({w1,w3}) ∪ {w2}) = C({w2,w3}) = {w3}.
        assert_ne!(
            c.choose(set(&[0, 2]) | set(&[1])),
            c.choose(c.choose(set(&[0, 2])) | set(&[1]))
        );
        // The pair ({w1,w2}, {w3}) happens to agree.
        assert_eq!(
            c.choose(set(&[0, 1]) | set(&[2])),
            c.choose(c.choose(set(&[0, 1])) | set(&[2]))
        );
    }

    #[test]
    fn table_rejects_choice_outside_argument() {
        let err = ChoiceFunction::from_table(
            2,
            [
                (set(&[]), set(&[])),
                (set(&[0]), set(&[0, 1])),
                (set(&[1]), set(&[1])),
                (set(&[0, 1]), set(&[0, 1])),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            TableError::NotSubset {
                subset: set(&[0]),
                chosen: set(&[0, 1])
            }
        );
        let err = ChoiceFunction::from_table(1, [(set(&[]), set(&[]))]).unwrap_err();
        assert_eq!(err, TableError::Missing(set(&[0])));
    }

    #[test]
    fn blair_examples() {
        assert_eq!(
            f1_m69().blair_compare(set(&[0, 1]), set(&[1, 2])),
            BlairVerdict::StrictlyPrefers
        );
        assert_eq!(
            f1_m69().blair_compare(set(&[1, 2]), set(&[0, 1])),
            BlairVerdict::StrictlyDispreferred
        );
        assert_eq!(
            f1_m69().blair_compare(set(&[2]), set(&[2])),
            BlairVerdict::Equal
        );
        // ∅ > {f1} > {f2}: the choice from {f1,f2} is ∅.
        let w = ChoiceFunction::induced(2, &list(&[&[], &[0], &[1]]));
        assert_eq!(w.choose(set(&[0, 1])), AgentSet::EMPTY);
        assert_eq!(
            w.blair_compare(set(&[0]), set(&[1])),
            BlairVerdict::Incomparable
        );
    }

    #[test]
    fn raw_worker_order() {
        let accepts = list(&[&[0], &[]]);
        let refuses = list(&[&[], &[0]]);
        assert!(worker_prefers_m21(&accepts, set(&[0]), AgentSet::EMPTY).unwrap());
        assert!(!worker_prefers_m21(&refuses, set(&[0]), AgentSet::EMPTY).unwrap());
        assert!(worker_prefers_m21(&refuses, set(&[0]), set(&[0])).unwrap());
        assert_eq!(
            worker_prefers_m21(&accepts, set(&[0, 1]), AgentSet::EMPTY),
            Err(crate::Error::NotSingleton)
        );
        // Unacceptable firms stay comparable under the raw order.
        let below = list(&[&[], &[0], &[1]]);
        assert!(worker_prefers_m21(&below, set(&[0]), set(&[1])).unwrap());
    }

    #[test]
    fn preference_list_validation() {
        assert_eq!(
            PreferenceList::new(vec![set(&[0])]),
            Err(PreferenceError::MissingEmptySet)
        );
        assert_eq!(
            PreferenceList::new(vec![set(&[0]), set(&[0]), AgentSet::EMPTY]),
            Err(PreferenceError::Duplicate(set(&[0])))
        );
    }
}
