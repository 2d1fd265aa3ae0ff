//! Individual rationality, blocking pairs, desire sets and the quasi-stability
//! predicates.
//!
//! Many-to-one workers are handled through their preference list: a worker
//! blocks when `∅ >_w µ(w)` and accepts firm `f` when `{f} >_w µ(w)`.

use crate::choice::worker_prefers_m21;
use crate::model::{AgentId, Caps, Market, Matching, Mode, Side};
use crate::set::AgentSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockingPair {
    pub firm: usize,
    pub worker: usize,
}

/// Which agents want to add whom, given a matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesireSets {
    /// Per firm: `W_f^µ = {w : {f} >_w µ(w)}` in many-to-one markets,
    /// `W̃_f^µ = {w : f ∈ C_w(µ(w) ∪ {f})}` in many-to-many markets.
    pub firm: Vec<AgentSet>,
    /// Per worker: `F̃_w^µ = {f : w ∈ C_f(µ(f) ∪ {w})}`.
    pub worker: Vec<AgentSet>,
}

/// `µ(a) ⊄ C_a(µ(a) ∪ added)`: agent `a` would drop a current partner if the
/// partners in `added` became available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuasiViolation {
    pub agent: AgentId,
    pub added: AgentSet,
    pub chosen: AgentSet,
}

fn m21_pref(market: &Market, w: usize) -> &crate::choice::PreferenceList {
    market
        .worker_preference(w)
        .expect("many-to-one market stores worker preference lists")
}

/// Raw order on a many-to-one worker's singleton sets; both arguments have at
/// most one element by construction.
fn m21_prefers(market: &Market, w: usize, t: AgentSet, other: AgentSet) -> bool {
    worker_prefers_m21(m21_pref(market, w), t, other).unwrap_or(false)
}

/// `∅ >_w µ(w)`, else `µ(a) ≠ C_a(µ(a))`.
pub fn blocked_by_agent(market: &Market, m: &Matching, a: AgentId) -> Result<bool> {
    market.check_agent(a)?;
    Ok(blocked_by(market, m, a))
}

fn blocked_by(market: &Market, m: &Matching, a: AgentId) -> bool {
    let current = m.partners(a);
    match (a.side, market.mode()) {
        (Side::Firm, _) => market.firm_choice(a.index).choose(current) != current,
        (Side::Worker, Mode::ManyToMany) => {
            market.worker_choice(a.index).unwrap().choose(current) != current
        }
        (Side::Worker, Mode::ManyToOne) => {
            !current.is_empty() && m21_prefers(market, a.index, AgentSet::EMPTY, current)
        }
    }
}

/// First agent (firms first) that blocks the matching.
pub fn blocking_agent(market: &Market, m: &Matching) -> Option<AgentId> {
    market.agents().find(|&a| blocked_by(market, m, a))
}

pub fn individually_rational(market: &Market, m: &Matching) -> bool {
    blocking_agent(market, m).is_none()
}

/// Firm side of the pair condition: `w ∈ C_f(µ(f) ∪ {w})`.
pub(crate) fn firm_wants(market: &Market, m: &Matching, f: usize, w: usize) -> bool {
    market
        .firm_choice(f)
        .choose(m.firm_partners(f).with(w))
        .contains(w)
}

/// Worker side of the pair condition: `f ∈ C_w(µ(w) ∪ {f})`, or `{f} >_w µ(w)`
/// for many-to-one workers.
pub(crate) fn worker_wants(market: &Market, m: &Matching, f: usize, w: usize) -> bool {
    match market.mode() {
        Mode::ManyToMany => market
            .worker_choice(w)
            .unwrap()
            .choose(m.worker_partners(w).with(f))
            .contains(f),
        Mode::ManyToOne => {
            let current = m.worker_partners(w);
            let offer = AgentSet::singleton(f);
            offer != current && m21_prefers(market, w, offer, current)
        }
    }
}

/// All blocking pairs, ordered by (firm, worker).
pub fn blocking_pairs(market: &Market, m: &Matching) -> Vec<BlockingPair> {
    let mut out = Vec::new();
    for f in 0..market.firm_count() {
        for w in 0..market.worker_count() {
            if !m.is_linked(f, w) && firm_wants(market, m, f, w) && worker_wants(market, m, f, w) {
                out.push(BlockingPair { firm: f, worker: w });
            }
        }
    }
    out
}

pub fn is_blocking_pair(market: &Market, m: &Matching, pair: BlockingPair) -> bool {
    pair.firm < market.firm_count()
        && pair.worker < market.worker_count()
        && !m.is_linked(pair.firm, pair.worker)
        && firm_wants(market, m, pair.firm, pair.worker)
        && worker_wants(market, m, pair.firm, pair.worker)
}

pub fn is_pairwise_stable(market: &Market, m: &Matching) -> bool {
    individually_rational(market, m) && blocking_pairs(market, m).is_empty()
}

pub fn desire_sets(market: &Market, m: &Matching) -> DesireSets {
    let (nf, nw) = (market.firm_count(), market.worker_count());
    let firm = (0..nf)
        .map(|f| {
            (0..nw)
                .filter(|&w| match market.mode() {
                    Mode::ManyToOne => {
                        let offer = AgentSet::singleton(f);
                        let current = m.worker_partners(w);
                        offer != current && m21_prefers(market, w, offer, current)
                    }
                    Mode::ManyToMany => worker_wants(market, m, f, w),
                })
                .collect()
        })
        .collect();
    let worker = (0..nw)
        .map(|w| (0..nf).filter(|&f| firm_wants(market, m, f, w)).collect())
        .collect();
    DesireSets { firm, worker }
}

/// Checks `µ(a) ⊆ C_a(µ(a) ∪ D_a)` for the maximal desire set of every agent on
/// `side`. Substitutability makes this single check equivalent to checking
/// every subset of `D_a`.
fn maximal_quasi_violation(
    market: &Market,
    m: &Matching,
    side: Side,
    desire: &[AgentSet],
) -> Option<QuasiViolation> {
    (0..market.side_size(side)).find_map(|i| {
        let agent = AgentId { side, index: i };
        let current = m.partners(agent);
        let added = desire[i] - current;
        let chosen = market.choice_of(agent).choose(current | added);
        (!current.is_subset(chosen)).then_some(QuasiViolation {
            agent,
            added,
            chosen,
        })
    })
}

/// Literal quantification over every subset of each desire set.
fn definitional_quasi_violation(
    market: &Market,
    m: &Matching,
    side: Side,
    desire: &[AgentSet],
    caps: &Caps,
) -> Result<Option<QuasiViolation>> {
    for (i, &wanted) in desire.iter().enumerate().take(market.side_size(side)) {
        if wanted.len() as u32 > caps.max_desire_set {
            return Err(Error::SizeLimitExceeded {
                what: "desire set",
                size: wanted.len() as u64,
                cap: caps.max_desire_set as u64,
            });
        }
        let agent = AgentId { side, index: i };
        let choice = market.choice_of(agent);
        let current = m.partners(agent);
        for k in wanted.subsets() {
            let chosen = choice.choose(current | k);
            if !current.is_subset(chosen) {
                return Ok(Some(QuasiViolation {
                    agent,
                    added: k,
                    chosen,
                }));
            }
        }
    }
    Ok(None)
}

/// A blocking pair whose worker is matched, in many-to-one markets.
pub fn matched_worker_blocking_pair(market: &Market, m: &Matching) -> Option<BlockingPair> {
    blocking_pairs(market, m)
        .into_iter()
        .find(|p| !m.worker_partners(p.worker).is_empty())
}

/// Why an individually rational matching fails worker-quasi-stability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkerQuasiFailure {
    /// Many-to-one: a blocking pair involving an employed worker.
    MatchedWorkerBlocks(BlockingPair),
    /// Many-to-many: a worker would resign from a current firm.
    Resigns(QuasiViolation),
}

pub fn worker_quasi_failure(market: &Market, m: &Matching) -> Option<WorkerQuasiFailure> {
    match market.mode() {
        Mode::ManyToOne => {
            matched_worker_blocking_pair(market, m).map(WorkerQuasiFailure::MatchedWorkerBlocks)
        }
        Mode::ManyToMany => {
            let d = desire_sets(market, m);
            maximal_quasi_violation(market, m, Side::Worker, &d.worker)
                .map(WorkerQuasiFailure::Resigns)
        }
    }
}

/// Firm `f` would fire someone to hire workers from its desire set.
pub fn firm_quasi_failure(market: &Market, m: &Matching) -> Option<QuasiViolation> {
    let d = desire_sets(market, m);
    maximal_quasi_violation(market, m, Side::Firm, &d.firm)
}

pub fn is_worker_quasi_stable(market: &Market, m: &Matching) -> bool {
    individually_rational(market, m) && worker_quasi_failure(market, m).is_none()
}

/// Oracle for [`is_worker_quasi_stable`]: in many-to-many markets every
/// `K ⊆ F̃_w^µ` is tried. Many-to-one markets use the blocking-pair
/// definition directly.
pub fn is_worker_quasi_stable_definitional(
    market: &Market,
    m: &Matching,
    caps: &Caps,
) -> Result<bool> {
    if !individually_rational(market, m) {
        return Ok(false);
    }
    match market.mode() {
        Mode::ManyToOne => Ok(blocking_pairs(market, m)
            .iter()
            .all(|p| m.worker_partners(p.worker).is_empty())),
        Mode::ManyToMany => {
            let d = desire_sets(market, m);
            Ok(definitional_quasi_violation(market, m, Side::Worker, &d.worker, caps)?.is_none())
        }
    }
}

pub fn is_firm_quasi_stable(market: &Market, m: &Matching) -> bool {
    individually_rational(market, m) && firm_quasi_failure(market, m).is_none()
}

/// Oracle for [`is_firm_quasi_stable`], quantifying over every `T` in the
/// firm's desire set.
pub fn is_firm_quasi_stable_definitional(
    market: &Market,
    m: &Matching,
    caps: &Caps,
) -> Result<bool> {
    if !individually_rational(market, m) {
        return Ok(false);
    }
    let d = desire_sets(market, m);
    Ok(definitional_quasi_violation(market, m, Side::Firm, &d.firm, caps)?.is_none())
}
