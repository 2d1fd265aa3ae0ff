//! Markets, matchings, coalitions and the exhaustive enumeration of matchings.

use std::collections::HashSet;

use crate::choice::{ChoiceFunction, PreferenceError, PreferenceList, TableError};
use crate::set::{AgentSet, MAX_SIDE};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Firm,
    Worker,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Firm => Side::Worker,
            Side::Worker => Side::Firm,
        }
    }
}

/// An agent, identified by its side and its position on that side.
/// Firms order before workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId {
    pub side: Side,
    pub index: usize,
}

impl AgentId {
    pub fn firm(index: usize) -> Self {
        AgentId {
            side: Side::Firm,
            index,
        }
    }

    pub fn worker(index: usize) -> Self {
        AgentId {
            side: Side::Worker,
            index,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    ManyToOne,
    ManyToMany,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::ManyToOne => "many-to-one",
            Mode::ManyToMany => "many-to-many",
        }
    }
}

/// How the worker side of a market expresses its choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorkerSide {
    /// Many-to-many: a substitutable, consistent choice table per worker.
    Choices(Vec<ChoiceFunction>),
    /// Many-to-one: a strict ranking of single firms and the empty set.
    Preferences(Vec<PreferenceList>),
}

/// Input form of one agent's choice behaviour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoiceSpec {
    Preference(Vec<AgentSet>),
    Table(Vec<(AgentSet, AgentSet)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    firms: Vec<String>,
    workers: Vec<String>,
    mode: Mode,
    firm_choices: Vec<ChoiceFunction>,
    worker_side: WorkerSide,
}

impl Market {
    /// Assembles a market from already-built choice machinery and runs every
    /// construction-time check.
    pub fn new(
        firms: Vec<String>,
        workers: Vec<String>,
        mode: Mode,
        firm_choices: Vec<ChoiceFunction>,
        worker_side: WorkerSide,
    ) -> Result<Self> {
        check_labels(&firms, &workers)?;
        let market = Market {
            firms,
            workers,
            mode,
            firm_choices,
            worker_side,
        };
        market.validate()?;
        Ok(market)
    }

    fn validate(&self) -> Result<()> {
        let (nf, nw) = (self.firms.len(), self.workers.len());
        if self.firm_choices.len() != nf {
            return Err(Error::MissingChoiceEntry {
                agent: "firms".into(),
                detail: format!(
                    "expected {nf} choice functions, got {}",
                    self.firm_choices.len()
                ),
            });
        }
        for (f, c) in self.firm_choices.iter().enumerate() {
            if c.size() != nw {
                return Err(Error::MissingChoiceEntry {
                    agent: self.firms[f].clone(),
                    detail: format!("table covers {} workers, market has {nw}", c.size()),
                });
            }
            self.check_choice(AgentId::firm(f), c)?;
        }
        match (&self.worker_side, self.mode) {
            (WorkerSide::Choices(cs), Mode::ManyToMany) => {
                if cs.len() != nw {
                    return Err(Error::MissingChoiceEntry {
                        agent: "workers".into(),
                        detail: format!("expected {nw} choice functions, got {}", cs.len()),
                    });
                }
                for (w, c) in cs.iter().enumerate() {
                    if c.size() != nf {
                        return Err(Error::MissingChoiceEntry {
                            agent: self.workers[w].clone(),
                            detail: format!("table covers {} firms, market has {nf}", c.size()),
                        });
                    }
                    self.check_choice(AgentId::worker(w), c)?;
                }
            }
            (WorkerSide::Preferences(ps), Mode::ManyToOne) => {
                if ps.len() != nw {
                    return Err(Error::MissingChoiceEntry {
                        agent: "workers".into(),
                        detail: format!("expected {nw} preference lists, got {}", ps.len()),
                    });
                }
                for (w, p) in ps.iter().enumerate() {
                    let full = AgentSet::full(nf);
                    if !p.is_singleton_list() || p.ranking().iter().any(|s| !s.is_subset(full)) {
                        return Err(Error::InvalidPreference {
                            agent: self.workers[w].clone(),
                            reason: "many-to-one workers rank single firms and {} only".into(),
                        });
                    }
                }
            }
            (_, mode) => {
                return Err(Error::InvalidPreference {
                    agent: "workers".into(),
                    reason: format!(
                        "worker choice data does not fit a {} market",
                        mode.keyword()
                    ),
                })
            }
        }
        Ok(())
    }

    fn check_choice(&self, owner: AgentId, c: &ChoiceFunction) -> Result<()> {
        let side = owner.side.opposite();
        if let Some(v) = c.substitutability_violation() {
            return Err(Error::SubstitutabilityViolation {
                agent: self.label(owner).to_string(),
                larger: self.render_set(side, v.larger),
                smaller: self.render_set(side, v.smaller),
                element: self
                    .label(AgentId {
                        side,
                        index: v.element,
                    })
                    .to_string(),
            });
        }
        if let Some(v) = c.consistency_violation() {
            return Err(Error::ConsistencyViolation {
                agent: self.label(owner).to_string(),
                larger: self.render_set(side, v.larger),
                smaller: self.render_set(side, v.smaller),
            });
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    pub fn agent_count(&self) -> usize {
        self.firms.len() + self.workers.len()
    }

    pub fn firm_labels(&self) -> &[String] {
        &self.firms
    }

    pub fn worker_labels(&self) -> &[String] {
        &self.workers
    }

    pub fn side_size(&self, side: Side) -> usize {
        match side {
            Side::Firm => self.firms.len(),
            Side::Worker => self.workers.len(),
        }
    }

    /// Firms first, then workers.
    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.firms.len())
            .map(AgentId::firm)
            .chain((0..self.workers.len()).map(AgentId::worker))
    }

    pub fn contains(&self, a: AgentId) -> bool {
        a.index < self.side_size(a.side)
    }

    pub fn check_agent(&self, a: AgentId) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::UnknownAgent(format!("{:?} #{}", a.side, a.index)))
        }
    }

    pub fn label(&self, a: AgentId) -> &str {
        match a.side {
            Side::Firm => &self.firms[a.index],
            Side::Worker => &self.workers[a.index],
        }
    }

    pub fn find(&self, label: &str) -> Option<AgentId> {
        if let Some(i) = self.firms.iter().position(|l| l == label) {
            return Some(AgentId::firm(i));
        }
        self.workers
            .iter()
            .position(|l| l == label)
            .map(AgentId::worker)
    }

    /// `{a b c}` with the labels of `side`.
    pub fn render_set(&self, side: Side, set: AgentSet) -> String {
        let names: Vec<&str> = set
            .iter()
            .map(|index| self.label(AgentId { side, index }))
            .collect();
        format!("{{{}}}", names.join(" "))
    }

    pub fn firm_choice(&self, f: usize) -> &ChoiceFunction {
        &self.firm_choices[f]
    }

    pub fn firm_choices(&self) -> &[ChoiceFunction] {
        &self.firm_choices
    }

    pub fn worker_side(&self) -> &WorkerSide {
        &self.worker_side
    }

    /// Worker choice table; `None` in many-to-one markets.
    pub fn worker_choice(&self, w: usize) -> Option<&ChoiceFunction> {
        match &self.worker_side {
            WorkerSide::Choices(cs) => Some(&cs[w]),
            WorkerSide::Preferences(_) => None,
        }
    }

    /// Worker preference list; `None` in many-to-many markets.
    pub fn worker_preference(&self, w: usize) -> Option<&PreferenceList> {
        match &self.worker_side {
            WorkerSide::Preferences(ps) => Some(&ps[w]),
            WorkerSide::Choices(_) => None,
        }
    }

    /// Choice table of any agent. Many-to-one workers get the table induced
    /// from their list.
    pub fn choice_of(&self, a: AgentId) -> std::borrow::Cow<'_, ChoiceFunction> {
        use std::borrow::Cow;
        match a.side {
            Side::Firm => Cow::Borrowed(&self.firm_choices[a.index]),
            Side::Worker => match &self.worker_side {
                WorkerSide::Choices(cs) => Cow::Borrowed(&cs[a.index]),
                WorkerSide::Preferences(ps) => {
                    Cow::Owned(ChoiceFunction::induced(self.firms.len(), &ps[a.index]))
                }
            },
        }
    }
}

fn check_labels(firms: &[String], workers: &[String]) -> Result<()> {
    if firms.len() > MAX_SIDE || workers.len() > MAX_SIDE {
        return Err(Error::SizeLimitExceeded {
            what: "agents per side",
            size: firms.len().max(workers.len()) as u64,
            cap: MAX_SIDE as u64,
        });
    }
    let mut seen = HashSet::new();
    for label in firms.iter().chain(workers) {
        if label.is_empty() || !seen.insert(label.as_str()) {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Builds and validates a market from labelled choice data, one entry per agent.
pub fn make_market(
    firms: Vec<String>,
    workers: Vec<String>,
    mode: Mode,
    choice_data: Vec<(String, ChoiceSpec)>,
) -> Result<Market> {
    check_labels(&firms, &workers)?;
    let mut firm_specs: Vec<Option<ChoiceSpec>> = vec![None; firms.len()];
    let mut worker_specs: Vec<Option<ChoiceSpec>> = vec![None; workers.len()];
    for (label, spec) in choice_data {
        let slot = if let Some(i) = firms.iter().position(|l| *l == label) {
            &mut firm_specs[i]
        } else if let Some(i) = workers.iter().position(|l| *l == label) {
            &mut worker_specs[i]
        } else {
            return Err(Error::UnknownAgent(label));
        };
        if slot.is_some() {
            return Err(Error::DuplicateLabel(label));
        }
        *slot = Some(spec);
    }

    let labels_of = |side: Side| match side {
        Side::Firm => &firms,
        Side::Worker => &workers,
    };
    let render = |side: Side, set: AgentSet| {
        let names: Vec<&str> = set
            .iter()
            .map(|i| labels_of(side).get(i).map_or("?", |s| s.as_str()))
            .collect();
        format!("{{{}}}", names.join(" "))
    };
    let build = |owner: &str, side: Side, spec: ChoiceSpec| -> Result<ChoiceFunction> {
        let n = labels_of(side).len();
        match spec {
            ChoiceSpec::Preference(ranking) => {
                if let Some(bad) = ranking.iter().find(|s| !s.is_subset(AgentSet::full(n))) {
                    return Err(Error::InvalidPreference {
                        agent: owner.into(),
                        reason: format!("set {bad:?} mentions unknown agents"),
                    });
                }
                let pref = PreferenceList::new(ranking)
                    .map_err(|e| preference_error(owner, e, |s| render(side, s)))?;
                Ok(ChoiceFunction::induced(n, &pref))
            }
            ChoiceSpec::Table(entries) => {
                ChoiceFunction::from_table(n, entries).map_err(|e| match e {
                    TableError::Missing(s) => Error::MissingChoiceEntry {
                        agent: owner.into(),
                        detail: format!("no entry for {}", render(side, s)),
                    },
                    TableError::Duplicate(s) => Error::MissingChoiceEntry {
                        agent: owner.into(),
                        detail: format!("two entries for {}", render(side, s)),
                    },
                    TableError::OutOfRange(s) => Error::MissingChoiceEntry {
                        agent: owner.into(),
                        detail: format!("entry {s:?} mentions unknown agents"),
                    },
                    TableError::TooLarge(n) => Error::SizeLimitExceeded {
                        what: "choice table side",
                        size: n as u64,
                        cap: MAX_SIDE as u64,
                    },
                    TableError::NotSubset { subset, chosen } => Error::InvalidChoice {
                        agent: owner.into(),
                        subset: render(side, subset),
                        chosen: render(side, chosen),
                    },
                })
            }
        }
    };

    let mut firm_choices = Vec::with_capacity(firms.len());
    for (f, spec) in firm_specs.into_iter().enumerate() {
        let spec = spec.ok_or_else(|| Error::MissingChoiceEntry {
            agent: firms[f].clone(),
            detail: "no preference or choice block".into(),
        })?;
        firm_choices.push(build(&firms[f], Side::Worker, spec)?);
    }
    let worker_side = match mode {
        Mode::ManyToMany => {
            let mut cs = Vec::with_capacity(workers.len());
            for (w, spec) in worker_specs.into_iter().enumerate() {
                let spec = spec.ok_or_else(|| Error::MissingChoiceEntry {
                    agent: workers[w].clone(),
                    detail: "no preference or choice block".into(),
                })?;
                cs.push(build(&workers[w], Side::Firm, spec)?);
            }
            WorkerSide::Choices(cs)
        }
        Mode::ManyToOne => {
            let mut ps = Vec::with_capacity(workers.len());
            for (w, spec) in worker_specs.into_iter().enumerate() {
                let owner = &workers[w];
                match spec {
                    None => {
                        return Err(Error::MissingChoiceEntry {
                            agent: owner.clone(),
                            detail: "no preference block".into(),
                        })
                    }
                    Some(ChoiceSpec::Table(_)) => {
                        return Err(Error::InvalidPreference {
                            agent: owner.clone(),
                            reason: "many-to-one workers need a preference list, not a table"
                                .into(),
                        })
                    }
                    Some(ChoiceSpec::Preference(ranking)) => {
                        let pref = PreferenceList::new(ranking)
                            .map_err(|e| preference_error(owner, e, |s| render(Side::Firm, s)))?;
                        ps.push(pref);
                    }
                }
            }
            WorkerSide::Preferences(ps)
        }
    };
    Market::new(firms, workers, mode, firm_choices, worker_side)
}

fn preference_error(owner: &str, e: PreferenceError, render: impl Fn(AgentSet) -> String) -> Error {
    let reason = match e {
        PreferenceError::Duplicate(s) => format!("{} listed twice", render(s)),
        PreferenceError::MissingEmptySet => "the empty set {} must be listed".into(),
    };
    Error::InvalidPreference {
        agent: owner.into(),
        reason,
    }
}

/// A symmetric correspondence between firms and workers, stored from both
/// sides with partner sets as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    firms: Vec<AgentSet>,
    workers: Vec<AgentSet>,
}

impl Matching {
    pub fn empty(n_firms: usize, n_workers: usize) -> Self {
        Matching {
            firms: vec![AgentSet::EMPTY; n_firms],
            workers: vec![AgentSet::EMPTY; n_workers],
        }
    }

    /// Matching with the links set in `mask`, bit `f * n_workers + w` for `(f, w)`.
    pub fn from_edge_mask(n_firms: usize, n_workers: usize, mask: u64) -> Self {
        let mut m = Matching::empty(n_firms, n_workers);
        for f in 0..n_firms {
            for w in 0..n_workers {
                if mask >> (f * n_workers + w) & 1 == 1 {
                    m.link(f, w);
                }
            }
        }
        m
    }

    pub fn firm_partners(&self, f: usize) -> AgentSet {
        self.firms[f]
    }

    pub fn worker_partners(&self, w: usize) -> AgentSet {
        self.workers[w]
    }

    /// µ(a).
    pub fn partners(&self, a: AgentId) -> AgentSet {
        match a.side {
            Side::Firm => self.firms[a.index],
            Side::Worker => self.workers[a.index],
        }
    }

    pub fn is_linked(&self, f: usize, w: usize) -> bool {
        self.firms[f].contains(w)
    }

    pub fn is_empty(&self) -> bool {
        self.firms.iter().all(|s| s.is_empty())
    }

    /// Links as `(firm, worker)` pairs, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.firms
            .iter()
            .enumerate()
            .flat_map(|(f, ws)| ws.iter().map(move |w| (f, w)))
            .collect()
    }

    pub fn edge_mask(&self) -> u64 {
        let nw = self.workers.len();
        self.edges()
            .into_iter()
            .fold(0u64, |m, (f, w)| m | 1 << (f * nw + w))
    }

    pub(crate) fn link(&mut self, f: usize, w: usize) {
        self.firms[f] = self.firms[f].with(w);
        self.workers[w] = self.workers[w].with(f);
    }

    pub(crate) fn unlink(&mut self, f: usize, w: usize) {
        self.firms[f] = self.firms[f].without(w);
        self.workers[w] = self.workers[w].without(f);
    }

    /// Replaces every link of worker `w` so that µ(w) = `firms`.
    pub(crate) fn set_worker_partners(&mut self, w: usize, firms: AgentSet) {
        for f in self.workers[w].iter() {
            self.unlink(f, w);
        }
        for f in firms.iter() {
            self.link(f, w);
        }
    }

    /// Replaces every link of firm `f` so that µ(f) = `workers`.
    pub(crate) fn set_firm_partners(&mut self, f: usize, workers: AgentSet) {
        for w in self.firms[f].iter() {
            self.unlink(f, w);
        }
        for w in workers.iter() {
            self.link(f, w);
        }
    }
}

/// Builds the matching containing exactly the given `(firm, worker)` links.
pub fn make_matching<I>(market: &Market, pairs: I) -> Result<Matching>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut m = Matching::empty(market.firm_count(), market.worker_count());
    for (f, w) in pairs {
        market.check_agent(AgentId::firm(f))?;
        market.check_agent(AgentId::worker(w))?;
        if market.mode() == Mode::ManyToOne
            && !(m.worker_partners(w) - AgentSet::singleton(f)).is_empty()
        {
            return Err(Error::ManyToOneCapacityViolation {
                worker: market.label(AgentId::worker(w)).to_string(),
            });
        }
        m.link(f, w);
    }
    Ok(m)
}

pub fn matched(market: &Market, m: &Matching, a: AgentId) -> Result<bool> {
    market.check_agent(a)?;
    Ok(!m.partners(a).is_empty())
}

pub fn unmatched(market: &Market, m: &Matching, a: AgentId) -> Result<bool> {
    matched(market, m, a).map(|b| !b)
}

/// A nonempty set of agents, as a bitmask with firms in the low bits and
/// workers after them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    bits: u64,
    n_firms: usize,
}

impl Coalition {
    pub fn new<I>(market: &Market, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = AgentId>,
    {
        let mut bits = 0u64;
        for a in members {
            market.check_agent(a)?;
            bits |= 1 << agent_bit(market.firm_count(), a);
        }
        Coalition::from_bits(market, bits)
    }

    pub fn from_bits(market: &Market, bits: u64) -> Result<Self> {
        if bits == 0 {
            return Err(Error::EmptyCoalition);
        }
        if market.agent_count() < 64 && bits >> market.agent_count() != 0 {
            return Err(Error::UnknownAgent(format!("coalition bit mask {bits:#x}")));
        }
        Ok(Coalition {
            bits,
            n_firms: market.firm_count(),
        })
    }

    /// Every agent of the market.
    pub fn grand(market: &Market) -> Self {
        Coalition {
            bits: full_mask(market.agent_count()),
            n_firms: market.firm_count(),
        }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, a: AgentId) -> bool {
        self.bits >> agent_bit(self.n_firms, a) & 1 == 1
    }

    pub fn firms(&self) -> AgentSet {
        AgentSet::from_bits((self.bits & full_mask(self.n_firms)) as u32)
    }

    pub fn workers(&self) -> AgentSet {
        AgentSet::from_bits((self.bits >> self.n_firms) as u32)
    }

    pub fn members(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.firms()
            .iter()
            .map(AgentId::firm)
            .chain(self.workers().iter().map(AgentId::worker))
    }
}

pub(crate) fn agent_bit(n_firms: usize, a: AgentId) -> usize {
    match a.side {
        Side::Firm => a.index,
        Side::Worker => n_firms + a.index,
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Limits on exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Many-to-many: maximum `|F|·|W|`.
    pub max_edges: u32,
    /// Many-to-one: maximum `|W|·log2(|F|+1)`.
    pub max_m21_bits: u32,
    /// Maximum desire-set size for the literal quasi-stability quantification.
    pub max_desire_set: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_edges: 16,
            max_m21_bits: 20,
            max_desire_set: 16,
        }
    }
}

pub const MAX_EDGES_ENV: &str = "MATCHKIT_MAX_EDGES";

impl Caps {
    /// Defaults, with the edge cap taken from `MATCHKIT_MAX_EDGES` when set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Ok(v) = std::env::var(MAX_EDGES_ENV) {
            caps.max_edges = v.trim().parse().map_err(|_| {
                Error::ConfigInvalid(format!("{MAX_EDGES_ENV}={v} is not a nonnegative integer"))
            })?;
        }
        Ok(caps)
    }

    pub fn check(&self, market: &Market) -> Result<()> {
        let (nf, nw) = (market.firm_count() as u64, market.worker_count() as u64);
        match market.mode() {
            Mode::ManyToMany => {
                let edges = nf * nw;
                if edges > self.max_edges as u64 || edges >= 63 {
                    return Err(Error::SizeLimitExceeded {
                        what: "many-to-many edge count",
                        size: edges,
                        cap: self.max_edges as u64,
                    });
                }
            }
            Mode::ManyToOne => {
                let bits = (nw as f64 * ((nf + 1) as f64).log2()).ceil() as u64;
                if bits > self.max_m21_bits as u64 || bits >= 63 {
                    return Err(Error::SizeLimitExceeded {
                        what: "many-to-one assignment bits",
                        size: bits,
                        cap: self.max_m21_bits as u64,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Number of matchings of a market: `2^(|F|·|W|)` or `(|F|+1)^|W|`.
pub fn matching_count(market: &Market) -> u128 {
    let (nf, nw) = (market.firm_count() as u32, market.worker_count() as u32);
    match market.mode() {
        Mode::ManyToMany => 1u128 << (nf * nw),
        Mode::ManyToOne => (nf as u128 + 1).pow(nw),
    }
}

/// Every matching of the market exactly once. Many-to-many matchings come in
/// ascending edge-bitmask order; many-to-one matchings in lexicographic order of
/// the worker assignment vector (0 = unmatched, `k` = firm `k-1`, last worker
/// varying fastest).
pub fn enumerate_matchings(market: &Market, caps: &Caps) -> Result<Vec<Matching>> {
    caps.check(market)?;
    let (nf, nw) = (market.firm_count(), market.worker_count());
    Ok(match market.mode() {
        Mode::ManyToMany => (0..1u64 << (nf * nw))
            .map(|mask| Matching::from_edge_mask(nf, nw, mask))
            .collect(),
        Mode::ManyToOne => {
            let total = matching_count(market) as usize;
            let mut out = Vec::with_capacity(total);
            let mut assignment = vec![0usize; nw];
            for _ in 0..total {
                let mut m = Matching::empty(nf, nw);
                for (w, &a) in assignment.iter().enumerate() {
                    if a > 0 {
                        m.link(a - 1, w);
                    }
                }
                out.push(m);
                for slot in assignment.iter_mut().rev() {
                    *slot += 1;
                    if *slot <= nf {
                        break;
                    }
                    *slot = 0;
                }
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn enumeration_counts() {
        let caps = Caps::default();
        assert_eq!(
            enumerate_matchings(&fixtures::ex1(), &caps).unwrap().len(),
            2
        );
        assert_eq!(
            enumerate_matchings(&fixtures::m69(), &caps).unwrap().len(),
            512
        );
        let two_by_two = crate::format::parse_market(
            "market many-to-one\nfirms: f1 f2\nworkers: w1 w2\n\
             pref f1: {w1} > {}\npref f2: {w2} > {}\n\
             pref w1: {f1} > {}\npref w2: {f2} > {f1} > {}\n",
        )
        .unwrap();
        let all = enumerate_matchings(&two_by_two, &caps).unwrap();
        assert_eq!(all.len(), 9);
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 9);
    }

    #[test]
    fn enumeration_respects_caps() {
        let caps = Caps {
            max_edges: 8,
            ..Caps::default()
        };
        assert!(matches!(
            enumerate_matchings(&fixtures::m69(), &caps),
            Err(Error::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn make_matching_examples() {
        let ex1 = fixtures::ex1();
        let mu1 = make_matching(&ex1, [(0, 0)]).unwrap();
        assert_eq!(mu1.firm_partners(0), AgentSet::singleton(0));
        assert_eq!(mu1.worker_partners(0), AgentSet::singleton(0));
        assert!(matched(&ex1, &mu1, AgentId::worker(0)).unwrap());

        let empty = make_matching(&ex1, []).unwrap();
        assert!(empty.is_empty());
        assert!(unmatched(&ex1, &empty, AgentId::firm(0)).unwrap());

        let m69 = fixtures::m69();
        let mu3 = fixtures::mu3();
        assert_eq!(mu3.firm_partners(0), AgentSet::from_indices([1, 2]));
        assert_eq!(mu3.worker_partners(0), AgentSet::from_indices([1, 2]));
        assert!(matched(&m69, &mu3, AgentId::firm(0)).unwrap());
    }

    #[test]
    fn make_matching_errors() {
        let two_firms = crate::format::parse_market(
            "market many-to-one\nfirms: f1 f2\nworkers: w\n\
             pref f1: {w} > {}\npref f2: {w} > {}\npref w: {f1} > {f2} > {}\n",
        )
        .unwrap();
        assert_eq!(
            make_matching(&two_firms, [(0, 0), (1, 0)]),
            Err(Error::ManyToOneCapacityViolation { worker: "w".into() })
        );
        assert!(matches!(
            make_matching(&two_firms, [(2, 0)]),
            Err(Error::UnknownAgent(_))
        ));
        assert!(matches!(
            matched(&two_firms, &Matching::empty(2, 1), AgentId::worker(3)),
            Err(Error::UnknownAgent(_))
        ));
    }

    #[test]
    fn make_market_errors() {
        let labels = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let w = |i: &[usize]| AgentSet::from_indices(i.iter().copied());
        // C({w1}) = {w1, w2} is not a subset of {w1}.
        let err = make_market(
            labels(&["f1"]),
            labels(&["w1", "w2"]),
            Mode::ManyToOne,
            vec![
                (
                    "f1".into(),
                    ChoiceSpec::Table(vec![
                        (w(&[]), w(&[])),
                        (w(&[0]), w(&[0, 1])),
                        (w(&[1]), w(&[1])),
                        (w(&[0, 1]), w(&[0, 1])),
                    ]),
                ),
                ("w1".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
                ("w2".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidChoice { .. }), "{err}");

        let err = make_market(labels(&["a"]), labels(&["a"]), Mode::ManyToOne, vec![]).unwrap_err();
        assert_eq!(err, Error::DuplicateLabel("a".into()));

        let err = make_market(
            labels(&["f"]),
            labels(&["w"]),
            Mode::ManyToOne,
            vec![("f".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])]))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingChoiceEntry { .. }));

        let err = make_market(
            labels(&["f"]),
            labels(&["w1", "w2", "w3"]),
            Mode::ManyToOne,
            vec![
                (
                    "f".into(),
                    ChoiceSpec::Preference(vec![w(&[0, 1]), w(&[2]), w(&[])]),
                ),
                ("w1".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
                ("w2".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
                ("w3".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::SubstitutabilityViolation {
                agent: "f".into(),
                larger: "{w1 w2 w3}".into(),
                smaller: "{w1 w3}".into(),
                element: "w1".into(),
            }
        );

        // Non-singleton entry in a many-to-one worker list.
        let err = make_market(
            labels(&["f1", "f2"]),
            labels(&["w"]),
            Mode::ManyToOne,
            vec![
                ("f1".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
                ("f2".into(), ChoiceSpec::Preference(vec![w(&[0]), w(&[])])),
                ("w".into(), ChoiceSpec::Preference(vec![w(&[0, 1]), w(&[])])),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidPreference { .. }));
    }

    #[test]
    fn coalition_bits() {
        let m69 = fixtures::m69();
        let s = Coalition::new(&m69, [AgentId::worker(0), AgentId::firm(0)]).unwrap();
        assert_eq!(s.bits(), 0b001001);
        assert_eq!(
            s.members().collect::<Vec<_>>(),
            vec![AgentId::firm(0), AgentId::worker(0)]
        );
        assert_eq!(Coalition::new(&m69, []), Err(Error::EmptyCoalition));
        assert_eq!(Coalition::grand(&m69).bits(), 0b111111);
    }
}
