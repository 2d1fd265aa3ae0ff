//! Stability notions for two-sided matching markets between firms and
//! workers whose choice functions are substitutable and consistent.
//!
//! Markets are small enough to enumerate every matching and every coalition,
//! so each notion (individual rationality, pairwise stability, the core, the
//! quasi-cores, quasi-stability and the setwise variants) is computed exactly
//! and the inclusions between them are checked as set identities.
//!
//! ```
//! use matchkit::{fixtures, Caps, Search};
//!
//! let market = fixtures::m69();
//! let search = Search::new(&market, &Caps::default()).unwrap();
//! let record = search.classify(&fixtures::mu3());
//! assert!(record.membership.core);
//! assert!(!record.membership.worker_quasi_stable);
//! ```

pub mod choice;
pub mod domination;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod gen;
pub mod model;
pub mod report;
pub mod set;
pub mod stability;
pub mod witness;

pub use choice::{BlairVerdict, ChoiceFunction, PreferenceList};
pub use domination::{
    classify, dominates, find_dominations, setwise_dominates, stability_sets, ClassificationRecord,
    DominationKind, DominationOptions, DominationWitness, Membership, Notion, Search,
    StabilitySets,
};
pub use error::{Error, Result};
pub use format::{format_matching, parse_market, parse_matching, serialize_market};
pub use gen::{gen_corpus, gen_market, GenConfig, SplitMix64, Strategy};
pub use model::{
    enumerate_matchings, make_market, make_matching, matching_count, AgentId, Caps, ChoiceSpec,
    Coalition, Market, Matching, Mode, Side, WorkerSide,
};
pub use set::AgentSet;
pub use stability::{blocking_pairs, individually_rational, is_pairwise_stable, BlockingPair};
pub use witness::ConstructionReport;
