//! Executable versions of the constructive steps behind the characterization
//! results: blocking structures become explicit dominating matchings and
//! quasi-core violations become blocking pairs. Every construction re-checks
//! its own output before returning it.
//!
//! Constructions prescribe `µ'` only on the coalition. The rest of `µ'` is
//! obtained from `µ` by dropping exactly the links that contradict the
//! prescribed partner sets and keeping everything else.

use crate::domination::{dominates, setwise_dominates, DominationKind};
use crate::model::{AgentId, Coalition, Market, Matching, Mode};
use crate::set::AgentSet;
use crate::stability::{desire_sets, individually_rational, is_blocking_pair, BlockingPair};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionReport {
    pub description: String,
    pub dominating: Matching,
    pub coalition: Coalition,
    pub kind: DominationKind,
    pub verified: bool,
}

fn require_mode(market: &Market, mode: Mode) -> Result<()> {
    if market.mode() == mode {
        Ok(())
    } else {
        Err(Error::PreconditionFailed(format!(
            "construction needs a {} market",
            mode.keyword()
        )))
    }
}

fn coalition_of(market: &Market, firms: AgentSet, workers: AgentSet) -> Result<Coalition> {
    Coalition::new(
        market,
        firms
            .iter()
            .map(AgentId::firm)
            .chain(workers.iter().map(AgentId::worker)),
    )
}

fn finish(
    market: &Market,
    description: String,
    dominating: Matching,
    m: &Matching,
    coalition: Coalition,
    kind: DominationKind,
) -> Result<ConstructionReport> {
    let ok = match kind {
        DominationKind::Domination => dominates(market, &dominating, m, &coalition),
        DominationKind::SetwiseDomination => setwise_dominates(market, &dominating, m, &coalition),
    };
    match ok {
        Ok(true) => Ok(ConstructionReport {
            description,
            dominating,
            coalition,
            kind,
            verified: true,
        }),
        Ok(false) | Err(_) => Err(Error::Internal(format!(
            "constructed matching does not re-verify ({description})"
        ))),
    }
}

/// Firm `f` takes `µ'(f) = new_set`; in a many-to-one market each newly hired
/// worker leaves their previous firm.
fn reassign_firm(market: &Market, m: &Matching, f: usize, new_set: AgentSet) -> Matching {
    let mut out = m.clone();
    out.set_firm_partners(f, new_set);
    if market.mode() == Mode::ManyToOne {
        for w in new_set.iter() {
            for other in m.worker_partners(w).without(f).iter() {
                out.unlink(other, w);
            }
        }
    }
    out
}

/// Many-to-one: a blocking pair `(f, w')` yields `µ'` with
/// `µ'(f) = C_f(µ(f) ∪ {w'})` dominating `µ` via `{f} ∪ C_f(µ(f) ∪ {w'})`.
pub fn domination_from_blocking_pair_m21(
    market: &Market,
    m: &Matching,
    pair: BlockingPair,
) -> Result<ConstructionReport> {
    require_mode(market, Mode::ManyToOne)?;
    if !is_blocking_pair(market, m, pair) {
        return Err(Error::NotABlockingPair {
            firm: label_or_index(market, AgentId::firm(pair.firm)),
            worker: label_or_index(market, AgentId::worker(pair.worker)),
        });
    }
    let f = pair.firm;
    let hired = market
        .firm_choice(f)
        .choose(m.firm_partners(f).with(pair.worker));
    let dominating = reassign_firm(market, m, f, hired);
    let coalition = coalition_of(market, AgentSet::singleton(f), hired)?;
    finish(
        market,
        format!(
            "blocking pair ({}, {})",
            market.label(AgentId::firm(f)),
            market.label(AgentId::worker(pair.worker))
        ),
        dominating,
        m,
        coalition,
        DominationKind::Domination,
    )
}

/// Many-to-one: firm `f` hires from `µ(f) ∪ T` for a nonempty `T ⊆ W_f^µ`.
pub fn domination_from_firm_block_m21(
    market: &Market,
    m: &Matching,
    f: usize,
    t: AgentSet,
) -> Result<ConstructionReport> {
    require_mode(market, Mode::ManyToOne)?;
    market.check_agent(AgentId::firm(f))?;
    if t.is_empty() {
        return Err(Error::EmptyT);
    }
    if !t.is_subset(desire_sets(market, m).firm[f]) {
        return Err(Error::TNotInDesireSet);
    }
    let hired = market.firm_choice(f).choose(m.firm_partners(f) | t);
    if hired == m.firm_partners(f) {
        return Err(Error::PreconditionFailed(format!(
            "{} keeps its current workers when offered {}",
            market.label(AgentId::firm(f)),
            market.render_set(crate::model::Side::Worker, t)
        )));
    }
    let dominating = reassign_firm(market, m, f, hired);
    let coalition = coalition_of(market, AgentSet::singleton(f), hired)?;
    finish(
        market,
        format!(
            "{} hires from {}",
            market.label(AgentId::firm(f)),
            market.render_set(crate::model::Side::Worker, t)
        ),
        dominating,
        m,
        coalition,
        DominationKind::Domination,
    )
}

/// Many-to-one: a domination whose coalition contains a worker `w` who was
/// employed and changes firm gives the blocking pair `(f, w)` with
/// `µ'(w) = {f}`.
pub fn blocking_pair_from_quasi_core_violation_m21(
    market: &Market,
    m: &Matching,
    dominating: &Matching,
    coalition: &Coalition,
    w: usize,
) -> Result<BlockingPair> {
    require_mode(market, Mode::ManyToOne)?;
    market.check_agent(AgentId::worker(w))?;
    let fail = |why: &str| Err(Error::PreconditionFailed(why.to_string()));
    if !individually_rational(market, m) {
        return fail("matching is not individually rational");
    }
    if !matches!(dominates(market, dominating, m, coalition), Ok(true)) {
        return fail("the given matching does not dominate via the coalition");
    }
    if !coalition.contains(AgentId::worker(w)) {
        return fail("worker is not in the coalition");
    }
    let (old, new) = (m.worker_partners(w), dominating.worker_partners(w));
    if old == new || old.is_empty() {
        return fail("worker must be employed and change partners");
    }
    let f = new
        .iter()
        .next()
        .ok_or_else(|| Error::Internal("dominating matching leaves the worker unmatched".into()))?;
    let pair = BlockingPair { firm: f, worker: w };
    if is_blocking_pair(market, m, pair) {
        Ok(pair)
    } else {
        Err(Error::Internal(format!(
            "({}, {}) does not block",
            market.label(AgentId::firm(f)),
            market.label(AgentId::worker(w))
        )))
    }
}

/// Many-to-many: if `µ(w) ⊄ C_w(µ(w) ∪ K)` for some `K ⊆ F̃_w^µ`, then
/// `µ'(w) = C_w(µ(w) ∪ K)` with `µ'(f) = C_f(µ(f) ∪ {w})` for the newly chosen
/// firms setwise dominates `µ` via `{w} ∪ (C_w(µ(w) ∪ K) \ µ(w))`.
pub fn setwise_domination_from_qw_violation_m2m(
    market: &Market,
    m: &Matching,
    w: usize,
    k: AgentSet,
) -> Result<ConstructionReport> {
    require_mode(market, Mode::ManyToMany)?;
    market.check_agent(AgentId::worker(w))?;
    if !individually_rational(market, m) {
        return Err(Error::PreconditionFailed(
            "matching is not individually rational".into(),
        ));
    }
    if !k.is_subset(desire_sets(market, m).worker[w]) {
        return Err(Error::PreconditionFailed(
            "K is not contained in the worker's desire set".into(),
        ));
    }
    let current = m.worker_partners(w);
    let chosen = market.worker_choice(w).unwrap().choose(current | k);
    if current.is_subset(chosen) {
        return Err(Error::PreconditionFailed(format!(
            "{} keeps every current firm",
            market.label(AgentId::worker(w))
        )));
    }
    let new_firms = chosen - current;
    let mut dominating = m.clone();
    dominating.set_worker_partners(w, chosen);
    for f in new_firms.iter() {
        let keep = market.firm_choice(f).choose(m.firm_partners(f).with(w));
        dominating.set_firm_partners(f, keep);
    }
    let coalition = coalition_of(market, new_firms, AgentSet::singleton(w))?;
    finish(
        market,
        format!(
            "{} resigns when offered {}",
            market.label(AgentId::worker(w)),
            market.render_set(crate::model::Side::Firm, k)
        ),
        dominating,
        m,
        coalition,
        DominationKind::SetwiseDomination,
    )
}

/// Many-to-many: a matching that is both worker- and firm-quasi-stable with a
/// blocking pair `(f, w)` is dominated, via everybody, by adding that link.
pub fn domination_from_double_quasi_m2m(
    market: &Market,
    m: &Matching,
    pair: BlockingPair,
) -> Result<ConstructionReport> {
    require_mode(market, Mode::ManyToMany)?;
    if !crate::stability::is_worker_quasi_stable(market, m) {
        return Err(Error::PreconditionFailed(
            "matching is not worker-quasi-stable".into(),
        ));
    }
    if !crate::stability::is_firm_quasi_stable(market, m) {
        return Err(Error::PreconditionFailed(
            "matching is not firm-quasi-stable".into(),
        ));
    }
    if !is_blocking_pair(market, m, pair) {
        return Err(Error::PreconditionFailed(format!(
            "({}, {}) does not block",
            label_or_index(market, AgentId::firm(pair.firm)),
            label_or_index(market, AgentId::worker(pair.worker))
        )));
    }
    let mut dominating = m.clone();
    dominating.link(pair.firm, pair.worker);
    finish(
        market,
        format!(
            "add link ({}, {})",
            market.label(AgentId::firm(pair.firm)),
            market.label(AgentId::worker(pair.worker))
        ),
        dominating,
        m,
        Coalition::grand(market),
        DominationKind::Domination,
    )
}

fn label_or_index(market: &Market, a: AgentId) -> String {
    if market.contains(a) {
        market.label(a).to_string()
    } else {
        format!("#{}", a.index)
    }
}
