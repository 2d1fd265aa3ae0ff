//! Seeded generation of valid markets.
//!
//! # Random stream
//!
//! All randomness comes from SplitMix64 (64-bit state). Each step adds
//! `0x9E37_79B9_7F4A_7C15` to the state and returns it mixed by
//! `z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9`,
//! `z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB`, `z ^ (z >> 31)`.
//!
//! Derived draws:
//! * `below(n)`: draw `r`, reject while `r >= u64::MAX - u64::MAX % n`, return `r % n`.
//! * Bernoulli `p = a/b`: `below(b) < a`.
//! * Shuffle: Fisher-Yates from the last position down, swapping `i` with `below(i + 1)`.
//! * Corpus member `i` of seed `s` uses seed `SplitMix64(s + (i + 1) * 0x9E37_79B9_7F4A_7C15).next()`.
//!
//! Agents are generated in order: firms `f1..`, then workers `w1..`.

use num_rational::Ratio;

use crate::choice::{ChoiceFunction, PreferenceList};
use crate::model::{Caps, Market, Mode, WorkerSide};
use crate::set::AgentSet;
use crate::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Attempts per agent for [`Strategy::SubsetRejection`].
pub const MAX_REJECTION_ATTEMPTS: u32 = 10_000;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let limit = u64::MAX - u64::MAX % n;
        loop {
            let r = self.next_u64();
            if r < limit {
                return r % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: Ratio<u32>) -> bool {
        self.below(*p.denom() as u64) < *p.numer() as u64
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Seed of corpus member `index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    SplitMix64::new(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN))).next_u64()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Responsive choice: a priority order over acceptable partners and a quota.
    QuotaPriority,
    /// Random ranking over a random family of subsets, kept only if the
    /// induced choice function passes both validators.
    SubsetRejection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub n_firms: usize,
    pub n_workers: usize,
    pub mode: Mode,
    pub quota_min: usize,
    pub quota_max: usize,
    pub acceptability: Ratio<u32>,
    pub strategy: Strategy,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            n_firms: 2,
            n_workers: 2,
            mode: Mode::ManyToOne,
            quota_min: 1,
            quota_max: 2,
            acceptability: Ratio::new(3, 4),
            strategy: Strategy::QuotaPriority,
        }
    }
}

impl GenConfig {
    pub fn validate(&self, caps: &Caps) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.n_firms == 0 || self.n_workers == 0 {
            return bad("both sides need at least one agent".into());
        }
        if *self.acceptability.denom() == 0 || self.acceptability > Ratio::from_integer(1) {
            return bad(format!(
                "acceptability {} is not in [0, 1]",
                self.acceptability
            ));
        }
        if self.quota_min > self.quota_max {
            return bad(format!(
                "empty quota range {}..{}",
                self.quota_min, self.quota_max
            ));
        }
        // Quotas bound firm choices over workers and, many-to-many, worker choices over firms.
        let limit = match self.mode {
            Mode::ManyToOne => self.n_workers,
            Mode::ManyToMany => self.n_workers.min(self.n_firms),
        };
        if self.quota_max > limit {
            return bad(format!(
                "quota {} exceeds the opposite side size {limit}",
                self.quota_max
            ));
        }
        let probe = Market::new(
            (1..=self.n_firms).map(|i| format!("f{i}")).collect(),
            (1..=self.n_workers).map(|i| format!("w{i}")).collect(),
            self.mode,
            vec![ChoiceFunction::constant_empty(self.n_workers); self.n_firms],
            match self.mode {
                Mode::ManyToOne => {
                    WorkerSide::Preferences(vec![
                        PreferenceList::new(vec![AgentSet::EMPTY]).unwrap();
                        self.n_workers
                    ])
                }
                Mode::ManyToMany => {
                    WorkerSide::Choices(vec![
                        ChoiceFunction::constant_empty(self.n_firms);
                        self.n_workers
                    ])
                }
            },
        )?;
        caps.check(&probe)
            .map_err(|e| Error::ConfigInvalid(e.to_string()))
    }
}

struct Generator<'c> {
    config: &'c GenConfig,
    rng: SplitMix64,
}

impl Generator<'_> {
    fn quota(&mut self) -> usize {
        let span = (self.config.quota_max - self.config.quota_min + 1) as u64;
        self.config.quota_min + self.rng.below(span) as usize
    }

    /// Acceptable partners in priority order.
    fn priority(&mut self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        self.rng.shuffle(&mut order);
        order
            .into_iter()
            .filter(|_| self.rng.bernoulli(self.config.acceptability))
            .collect()
    }

    fn responsive(&mut self, n: usize) -> ChoiceFunction {
        let priority = self.priority(n);
        let quota = self.quota();
        let entries = AgentSet::full(n).subsets().map(|t| {
            let chosen = priority
                .iter()
                .copied()
                .filter(|&i| t.contains(i))
                .take(quota)
                .collect();
            (t, chosen)
        });
        ChoiceFunction::from_table(n, entries).expect("responsive table is total")
    }

    fn subset_rejection(&mut self, n: usize, owner: &str) -> Result<ChoiceFunction> {
        for _ in 0..MAX_REJECTION_ATTEMPTS {
            let mut family: Vec<AgentSet> = AgentSet::full(n)
                .subsets()
                .filter(|t| t.is_empty() || self.rng.bernoulli(self.config.acceptability))
                .collect();
            self.rng.shuffle(&mut family);
            let pref = PreferenceList::new(family).expect("family lists the empty set once");
            let c = ChoiceFunction::induced(n, &pref);
            if c.is_substitutable() && c.is_consistent() {
                return Ok(c);
            }
        }
        Err(Error::RetriesExhausted {
            agent: owner.to_string(),
            attempts: MAX_REJECTION_ATTEMPTS,
        })
    }

    fn choice(&mut self, n: usize, owner: &str) -> Result<ChoiceFunction> {
        match self.config.strategy {
            Strategy::QuotaPriority => Ok(self.responsive(n)),
            Strategy::SubsetRejection => self.subset_rejection(n, owner),
        }
    }

    /// Many-to-one worker list: acceptable firms in priority order, then `{}`.
    fn singleton_list(&mut self, n: usize) -> PreferenceList {
        let mut ranking: Vec<AgentSet> = self
            .priority(n)
            .into_iter()
            .map(AgentSet::singleton)
            .collect();
        ranking.push(AgentSet::EMPTY);
        PreferenceList::new(ranking).expect("distinct singletons and the empty set")
    }
}

/// A random valid market for the configuration; identical configurations give
/// identical markets.
pub fn gen_market(config: &GenConfig) -> Result<Market> {
    gen_market_with_caps(config, &Caps::default())
}

pub fn gen_market_with_caps(config: &GenConfig, caps: &Caps) -> Result<Market> {
    config.validate(caps)?;
    let mut g = Generator {
        config,
        rng: SplitMix64::new(config.seed),
    };
    let firms: Vec<String> = (1..=config.n_firms).map(|i| format!("f{i}")).collect();
    let workers: Vec<String> = (1..=config.n_workers).map(|i| format!("w{i}")).collect();
    let mut firm_choices = Vec::with_capacity(firms.len());
    for f in &firms {
        firm_choices.push(g.choice(config.n_workers, f)?);
    }
    let worker_side = match config.mode {
        Mode::ManyToOne => WorkerSide::Preferences(
            (0..config.n_workers)
                .map(|_| g.singleton_list(config.n_firms))
                .collect(),
        ),
        Mode::ManyToMany => {
            let mut cs = Vec::with_capacity(workers.len());
            for w in &workers {
                cs.push(g.choice(config.n_firms, w)?);
            }
            WorkerSide::Choices(cs)
        }
    };
    Market::new(firms, workers, config.mode, firm_choices, worker_side)
}

/// `count` markets with seeds derived from `(config.seed, index)`.
pub fn gen_corpus(config: &GenConfig, count: usize) -> Result<Vec<Market>> {
    (0..count)
        .map(|i| {
            gen_market(&GenConfig {
                seed: derive_seed(config.seed, i as u64),
                ..config.clone()
            })
        })
        .collect()
}

/// Like [`gen_corpus`], but even members use [`Strategy::QuotaPriority`] and
/// odd members [`Strategy::SubsetRejection`], whatever `config.strategy` says.
pub fn gen_mixed_corpus(config: &GenConfig, count: usize) -> Result<Vec<Market>> {
    (0..count)
        .map(|i| {
            gen_market(&GenConfig {
                seed: derive_seed(config.seed, i as u64),
                strategy: if i % 2 == 0 {
                    Strategy::QuotaPriority
                } else {
                    Strategy::SubsetRejection
                },
                ..config.clone()
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // Reference outputs of SplitMix64 seeded with 0.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(r.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = SplitMix64::new(42);
        for n in 1..20 {
            for _ in 0..50 {
                assert!(r.below(n) < n);
            }
        }
    }

    #[test]
    fn generated_tables_pass_validators() {
        let config = GenConfig {
            seed: 1,
            ..GenConfig::default()
        };
        let market = gen_market(&config).unwrap();
        for c in market.firm_choices() {
            assert!(c.is_substitutable() && c.is_consistent());
        }
    }

    #[test]
    fn deterministic() {
        let config = GenConfig {
            seed: 9,
            n_firms: 3,
            n_workers: 3,
            mode: Mode::ManyToMany,
            strategy: Strategy::SubsetRejection,
            ..GenConfig::default()
        };
        assert_eq!(gen_market(&config).unwrap(), gen_market(&config).unwrap());
        let a = gen_corpus(&config, 5).unwrap();
        assert_eq!(a, gen_corpus(&config, 5).unwrap());
        assert!(gen_corpus(&config, 0).unwrap().is_empty());
    }

    #[test]
    fn quota_bound_holds() {
        let config = GenConfig {
            seed: 7,
            n_firms: 3,
            n_workers: 3,
            mode: Mode::ManyToMany,
            quota_min: 1,
            quota_max: 2,
            strategy: Strategy::QuotaPriority,
            ..GenConfig::default()
        };
        let market = gen_market(&config).unwrap();
        let worker_tables = (0..3).map(|w| market.worker_choice(w).unwrap());
        for c in market.firm_choices().iter().chain(worker_tables) {
            assert!(c.entries().all(|(_, chosen)| chosen.len() <= 2));
        }
    }

    #[test]
    fn invalid_configs() {
        let too_big = GenConfig {
            n_firms: 5,
            n_workers: 5,
            mode: Mode::ManyToMany,
            ..GenConfig::default()
        };
        assert!(matches!(gen_market(&too_big), Err(Error::ConfigInvalid(_))));
        let bad_quota = GenConfig {
            quota_max: 3,
            ..GenConfig::default()
        };
        assert!(matches!(
            gen_market(&bad_quota),
            Err(Error::ConfigInvalid(_))
        ));
        let bad_p = GenConfig {
            acceptability: Ratio::new(5, 4),
            ..GenConfig::default()
        };
        assert!(matches!(gen_market(&bad_p), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn unit_quota_many_to_one_is_hospital_resident_shaped() {
        let config = GenConfig {
            seed: 3,
            n_firms: 3,
            n_workers: 3,
            quota_min: 1,
            quota_max: 1,
            ..GenConfig::default()
        };
        let market = gen_market(&config).unwrap();
        for w in 0..3 {
            assert!(market.worker_preference(w).unwrap().is_singleton_list());
        }
        for c in market.firm_choices() {
            assert!(c.entries().all(|(_, chosen)| chosen.len() <= 1));
        }
    }
}
