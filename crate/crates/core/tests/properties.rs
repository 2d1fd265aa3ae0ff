use proptest::prelude::*;

use matchkit::choice::{ChoiceFunction, PreferenceList};
use matchkit::domination::{DominationKind, Search};
use matchkit::stability::{
    is_firm_quasi_stable, is_firm_quasi_stable_definitional, is_worker_quasi_stable,
    is_worker_quasi_stable_definitional,
};
use matchkit::{
    dominates, enumerate_matchings, format_matching, gen_market, parse_market, parse_matching,
    serialize_market, setwise_dominates, AgentSet, Caps, GenConfig, Market, Matching, Mode,
    Strategy as Build,
};

fn config() -> impl Strategy<Value = GenConfig> {
    (
        any::<u64>(),
        1usize..=3,
        1usize..=3,
        prop_oneof![Just(Mode::ManyToOne), Just(Mode::ManyToMany)],
        prop_oneof![Just(Build::QuotaPriority), Just(Build::SubsetRejection)],
        1u32..=4,
        1usize..=3,
    )
        .prop_map(
            |(seed, n_firms, n_workers, mode, strategy, accept, quota)| GenConfig {
                seed,
                n_firms,
                n_workers,
                mode,
                quota_min: 1,
                quota_max: match mode {
                    Mode::ManyToOne => quota.min(n_workers),
                    Mode::ManyToMany => quota.min(n_firms).min(n_workers),
                },
                acceptability: num_rational::Ratio::new(accept, 4),
                strategy,
            },
        )
}

fn market() -> impl Strategy<Value = Market> {
    config().prop_map(|c| gen_market(&c).expect("small configs always generate"))
}

/// A strict ranking of a random family of subsets of a 3-agent side.
fn ranking() -> impl Strategy<Value = PreferenceList> {
    (
        proptest::sample::subsequence((1u32..8).collect::<Vec<_>>(), 0..=7),
        any::<u64>(),
    )
        .prop_map(|(mut family, salt)| {
            // Deterministic shuffle driven by the salt.
            let mut rng = matchkit::SplitMix64::new(salt);
            rng.shuffle(&mut family);
            let cut = rng.below(family.len() as u64 + 1) as usize;
            let mut ranking: Vec<AgentSet> =
                family.iter().map(|&b| AgentSet::from_bits(b)).collect();
            ranking.insert(cut, AgentSet::EMPTY);
            PreferenceList::new(ranking).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn substitutable_and_consistent_tables_are_path_independent(pref in ranking()) {
        let c = ChoiceFunction::induced(3, &pref);
        if c.is_substitutable() && c.is_consistent() {
            prop_assert!(c.is_path_independent());
        }
    }

    #[test]
    fn generated_markets_pass_validators(m in market()) {
        for a in m.agents() {
            let c = m.choice_of(a);
            prop_assert!(c.is_substitutable() && c.is_consistent() && c.is_path_independent());
        }
    }

    #[test]
    fn serialization_round_trips(m in market()) {
        let text = serialize_market(&m);
        prop_assert_eq!(parse_market(&text).unwrap(), m);
    }

    #[test]
    fn enumeration_is_complete_and_distinct(m in market()) {
        let all = enumerate_matchings(&m, &Caps::default()).unwrap();
        let (nf, nw) = (m.firm_count() as u32, m.worker_count() as u32);
        let expected = match m.mode() {
            Mode::ManyToMany => 1usize << (nf * nw),
            Mode::ManyToOne => (nf as usize + 1).pow(nw),
        };
        prop_assert_eq!(all.len(), expected);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), all.len());
        for x in &all {
            prop_assert_eq!(&Matching::from_edge_mask(nf as usize, nw as usize, x.edge_mask()), x);
            prop_assert_eq!(&parse_matching(&m, &format_matching(&m, x)).unwrap(), x);
            if m.mode() == Mode::ManyToOne {
                prop_assert!((0..nw as usize).all(|w| x.worker_partners(w).len() <= 1));
            }
        }
    }

    #[test]
    fn quasi_stability_shortcut_matches_definition(m in market()) {
        let caps = Caps::default();
        for x in enumerate_matchings(&m, &caps).unwrap() {
            prop_assert_eq!(is_worker_quasi_stable(&m, &x), is_worker_quasi_stable_definitional(&m, &x, &caps).unwrap());
            prop_assert_eq!(is_firm_quasi_stable(&m, &x), is_firm_quasi_stable_definitional(&m, &x, &caps).unwrap());
        }
    }

    #[test]
    fn memberships_respect_the_inclusion_rules(m in market()) {
        let search = Search::new(&m, &Caps::default()).unwrap();
        for (x, membership) in search.stability_sets().rows {
            let broken = membership.implication_violations(m.mode());
            prop_assert!(broken.is_empty(), "{} breaks {:?}", format_matching(&m, &x), broken);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_domination_is_a_setwise_domination(m in market()) {
        let search = Search::new(&m, &Caps::default()).unwrap();
        for x in search.matchings() {
            for w in search.find_dominations(x, DominationKind::Domination) {
                prop_assert!(dominates(&m, &w.dominating, x, &w.coalition).unwrap());
                prop_assert!(setwise_dominates(&m, &w.dominating, x, &w.coalition).unwrap());
            }
        }
    }
}
