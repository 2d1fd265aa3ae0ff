//! Domination and setwise domination between matchings, the exhaustive search
//! for dominating pairs `(µ', S)`, and membership in the core-like sets.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::choice::worker_prefers_m21;
use crate::model::{
    agent_bit, enumerate_matchings, AgentId, Caps, Coalition, Market, Matching, Mode, Side,
};
use crate::set::AgentSet;
use crate::stability::{
    blocking_agent, blocking_pairs, firm_quasi_failure, worker_quasi_failure, BlockingPair,
    QuasiViolation, WorkerQuasiFailure,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DominationKind {
    /// `µ'(S) ⊆ S`.
    Domination,
    /// Every member's new partners lie in the coalition:
    /// `µ'(a) \ µ(a) ⊆ S` for each `a ∈ S`.
    SetwiseDomination,
}

/// Extra constraints on the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DominationOptions {
    /// Also require every link between two agents outside the coalition to be
    /// the same in `µ` and `µ'`.
    pub preserve_outside: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationWitness {
    pub dominating: Matching,
    pub coalition: Coalition,
    pub strict_agent: AgentId,
    pub kind: DominationKind,
}

/// `T ⪰_a T'` as used inside domination: the Blair order for firms and for
/// many-to-many workers, the raw list order for many-to-one workers.
pub fn prefers(market: &Market, a: AgentId, t: AgentSet, other: AgentSet) -> bool {
    match (a.side, market.mode()) {
        (Side::Worker, Mode::ManyToOne) => {
            let pref = market
                .worker_preference(a.index)
                .expect("many-to-one worker list");
            worker_prefers_m21(pref, t, other).unwrap_or(false)
        }
        (Side::Worker, Mode::ManyToMany) => market
            .worker_choice(a.index)
            .expect("many-to-many worker table")
            .blair_weakly_prefers(t, other),
        (Side::Firm, _) => market.firm_choice(a.index).blair_weakly_prefers(t, other),
    }
}

/// `(∪_{a∈S} µ(a))` as coalition bits.
fn partner_bits(n_firms: usize, side: Side, set: AgentSet) -> u64 {
    match side {
        // a firm's partners are workers
        Side::Firm => (set.bits() as u64) << n_firms,
        Side::Worker => set.bits() as u64,
    }
}

fn bit_agent(n_firms: usize, bit: usize) -> AgentId {
    if bit < n_firms {
        AgentId::firm(bit)
    } else {
        AgentId::worker(bit - n_firms)
    }
}

/// Picks one clause mask out of a profile.
type ClauseBits = fn(&Profile) -> u64;

/// Per-agent comparison of a candidate `µ'` against the current `µ`.
struct Profile {
    weak: u64,
    strict: u64,
    new_partners: Vec<u64>,
    /// `µ'(a) \ µ(a)` per agent.
    gained_partners: Vec<u64>,
    /// Agents whose clause "keep every current partner" fails.
    worker_clause: u64,
    firm_clause: u64,
    /// Links that differ, each as the bits of its two endpoints.
    changed_links: Vec<u64>,
}

impl Profile {
    fn new(
        market: &Market,
        current: &Matching,
        candidate: &Matching,
        opts: DominationOptions,
    ) -> Self {
        let nf = market.firm_count();
        let n = market.agent_count();
        let mut p = Profile {
            weak: 0,
            strict: 0,
            new_partners: vec![0; n],
            gained_partners: vec![0; n],
            worker_clause: 0,
            firm_clause: 0,
            changed_links: Vec::new(),
        };
        for a in market.agents() {
            let bit = agent_bit(nf, a);
            let (old, new) = (current.partners(a), candidate.partners(a));
            if prefers(market, a, new, old) {
                p.weak |= 1 << bit;
                if new != old {
                    p.strict |= 1 << bit;
                }
            }
            p.new_partners[bit] = partner_bits(nf, a.side, new);
            p.gained_partners[bit] = partner_bits(nf, a.side, new - old);
            let clause_fails = match (a.side, market.mode()) {
                (Side::Worker, Mode::ManyToOne) => old != new && !old.is_empty(),
                _ => !old.is_subset(new),
            };
            if clause_fails {
                match a.side {
                    Side::Firm => p.firm_clause |= 1 << bit,
                    Side::Worker => p.worker_clause |= 1 << bit,
                }
            }
        }
        if opts.preserve_outside {
            for f in 0..nf {
                let diff = current.firm_partners(f).bits() ^ candidate.firm_partners(f).bits();
                for w in AgentSet::from_bits(diff).iter() {
                    p.changed_links.push(1 << f | 1 << (nf + w));
                }
            }
        }
        p
    }

    fn admits(&self, kind: DominationKind, coalition: u64) -> bool {
        if coalition & !self.weak != 0 || coalition & self.strict == 0 {
            return false;
        }
        let partners = match kind {
            DominationKind::Domination => &self.new_partners,
            DominationKind::SetwiseDomination => &self.gained_partners,
        };
        let mut reached = 0u64;
        let mut rest = coalition;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            reached |= partners[bit];
        }
        reached & !coalition == 0 && self.changed_links.iter().all(|&l| l & coalition != 0)
    }
}

fn check_pair(dominating: &Matching, m: &Matching) -> Result<()> {
    if dominating == m {
        Err(Error::IdenticalMatchings)
    } else {
        Ok(())
    }
}

/// Whether `dominating` dominates `m` via `s` under `kind`.
pub fn dominates_with(
    market: &Market,
    kind: DominationKind,
    opts: DominationOptions,
    dominating: &Matching,
    m: &Matching,
    s: &Coalition,
) -> Result<bool> {
    check_pair(dominating, m)?;
    if s.bits() == 0 {
        return Err(Error::EmptyCoalition);
    }
    Ok(Profile::new(market, m, dominating, opts).admits(kind, s.bits()))
}

/// `µ'(S) ⊆ S`, everyone in `S` weakly better off, someone strictly.
pub fn dominates(
    market: &Market,
    dominating: &Matching,
    m: &Matching,
    s: &Coalition,
) -> Result<bool> {
    dominates_with(
        market,
        DominationKind::Domination,
        DominationOptions::default(),
        dominating,
        m,
        s,
    )
}

/// Every member's new partners lie in `S`, everyone in `S` weakly better
/// off, someone strictly.
pub fn setwise_dominates(
    market: &Market,
    dominating: &Matching,
    m: &Matching,
    s: &Coalition,
) -> Result<bool> {
    dominates_with(
        market,
        DominationKind::SetwiseDomination,
        DominationOptions::default(),
        dominating,
        m,
        s,
    )
}

/// The stability notions, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Notion {
    IndividuallyRational,
    PairwiseStable,
    Core,
    WorkerQuasiCore,
    FirmQuasiCore,
    WorkerQuasiStable,
    FirmQuasiStable,
    SetwiseStable,
    WorkerQuasiSetwise,
    FirmQuasiSetwise,
}

impl Notion {
    pub const ALL: [Notion; 10] = [
        Notion::IndividuallyRational,
        Notion::PairwiseStable,
        Notion::Core,
        Notion::WorkerQuasiCore,
        Notion::FirmQuasiCore,
        Notion::WorkerQuasiStable,
        Notion::FirmQuasiStable,
        Notion::SetwiseStable,
        Notion::WorkerQuasiSetwise,
        Notion::FirmQuasiSetwise,
    ];

    /// Short set name: I, S, C, CQW, CQF, QW, QF, SW, SWQW, SWQF.
    pub fn short(self) -> &'static str {
        match self {
            Notion::IndividuallyRational => "I",
            Notion::PairwiseStable => "S",
            Notion::Core => "C",
            Notion::WorkerQuasiCore => "CQW",
            Notion::FirmQuasiCore => "CQF",
            Notion::WorkerQuasiStable => "QW",
            Notion::FirmQuasiStable => "QF",
            Notion::SetwiseStable => "SW",
            Notion::WorkerQuasiSetwise => "SWQW",
            Notion::FirmQuasiSetwise => "SWQF",
        }
    }

    pub fn from_short(s: &str) -> Option<Notion> {
        Notion::ALL
            .into_iter()
            .find(|n| n.short().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// Membership of one matching in every notion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Membership {
    pub individually_rational: bool,
    pub pairwise_stable: bool,
    pub core: bool,
    pub worker_quasi_core: bool,
    pub firm_quasi_core: bool,
    pub worker_quasi_stable: bool,
    pub firm_quasi_stable: bool,
    pub setwise_stable: bool,
    pub worker_quasi_setwise: bool,
    pub firm_quasi_setwise: bool,
}

impl Membership {
    pub fn get(&self, n: Notion) -> bool {
        match n {
            Notion::IndividuallyRational => self.individually_rational,
            Notion::PairwiseStable => self.pairwise_stable,
            Notion::Core => self.core,
            Notion::WorkerQuasiCore => self.worker_quasi_core,
            Notion::FirmQuasiCore => self.firm_quasi_core,
            Notion::WorkerQuasiStable => self.worker_quasi_stable,
            Notion::FirmQuasiStable => self.firm_quasi_stable,
            Notion::SetwiseStable => self.setwise_stable,
            Notion::WorkerQuasiSetwise => self.worker_quasi_setwise,
            Notion::FirmQuasiSetwise => self.firm_quasi_setwise,
        }
    }

    /// Inclusions every record must satisfy in a market of the given mode.
    /// Returns the names of the ones that fail.
    pub fn implication_violations(&self, mode: Mode) -> Vec<&'static str> {
        let m = self;
        let mut rules: Vec<(&'static str, bool)> = vec![
            ("C => CQW", !m.core || m.worker_quasi_core),
            ("C => CQF", !m.core || m.firm_quasi_core),
            ("S => QW", !m.pairwise_stable || m.worker_quasi_stable),
            ("S => QF", !m.pairwise_stable || m.firm_quasi_stable),
            ("S => I", !m.pairwise_stable || m.individually_rational),
            ("QW => I", !m.worker_quasi_stable || m.individually_rational),
            ("QF => I", !m.firm_quasi_stable || m.individually_rational),
            ("SW => C", !m.setwise_stable || m.core),
            ("SW => SWQW", !m.setwise_stable || m.worker_quasi_setwise),
            ("SW => SWQF", !m.setwise_stable || m.firm_quasi_setwise),
            (
                "SWQW => I",
                !m.worker_quasi_setwise || m.individually_rational,
            ),
            (
                "SWQF => I",
                !m.firm_quasi_setwise || m.individually_rational,
            ),
        ];
        match mode {
            Mode::ManyToOne => rules.extend([
                ("C <=> S", m.core == m.pairwise_stable),
                ("C => I", !m.core || m.individually_rational),
                (
                    "I & CQW <=> QW",
                    (m.individually_rational && m.worker_quasi_core) == m.worker_quasi_stable,
                ),
                (
                    "I & CQF <=> QF",
                    (m.individually_rational && m.firm_quasi_core) == m.firm_quasi_stable,
                ),
            ]),
            Mode::ManyToMany => rules.extend([
                (
                    "QW => I & CQW",
                    !m.worker_quasi_stable || m.worker_quasi_core,
                ),
                ("QF => I & CQF", !m.firm_quasi_stable || m.firm_quasi_core),
                (
                    "SWQW <=> QW",
                    m.worker_quasi_setwise == m.worker_quasi_stable,
                ),
                ("SWQF <=> QF", m.firm_quasi_setwise == m.firm_quasi_stable),
                (
                    "QW & QF => S | not C",
                    !(m.worker_quasi_stable && m.firm_quasi_stable) || m.pairwise_stable || !m.core,
                ),
            ]),
        }
        rules
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n)
            .collect()
    }
}

/// Evidence that a matching is outside one of the sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    BlockingAgent(AgentId),
    BlockingPair(BlockingPair),
    Quasi(QuasiViolation),
    Domination(DominationWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub matching: Matching,
    pub membership: Membership,
    pub witnesses: BTreeMap<Notion, Witness>,
}

/// Membership of every matching of a market.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilitySets {
    pub rows: Vec<(Matching, Membership)>,
}

impl StabilitySets {
    pub fn members(&self, n: Notion) -> Vec<&Matching> {
        self.rows
            .iter()
            .filter(|(_, m)| m.get(n))
            .map(|(x, _)| x)
            .collect()
    }

    pub fn count(&self, n: Notion) -> usize {
        self.rows.iter().filter(|(_, m)| m.get(n)).count()
    }

    pub fn as_map(&self) -> BTreeMap<Notion, Vec<Matching>> {
        Notion::ALL
            .into_iter()
            .map(|n| (n, self.members(n).into_iter().cloned().collect()))
            .collect()
    }
}

/// Exhaustive search context: a market together with all of its matchings.
pub struct Search<'m> {
    market: &'m Market,
    matchings: Vec<Matching>,
    options: DominationOptions,
}

impl<'m> Search<'m> {
    pub fn new(market: &'m Market, caps: &Caps) -> Result<Self> {
        Ok(Search {
            market,
            matchings: enumerate_matchings(market, caps)?,
            options: DominationOptions::default(),
        })
    }

    pub fn with_options(mut self, options: DominationOptions) -> Self {
        self.options = options;
        self
    }

    pub fn market(&self) -> &'m Market {
        self.market
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    /// Visits every `(µ', S)` of the given kind against `m`, in enumeration
    /// order of `µ'` and ascending coalition bits.
    fn scan<F>(&self, m: &Matching, kind: DominationKind, mut visit: F)
    where
        F: FnMut(&Matching, u64, &Profile) -> ControlFlow<()>,
    {
        for candidate in &self.matchings {
            if candidate == m {
                continue;
            }
            let profile = Profile::new(self.market, m, candidate, self.options);
            if profile.strict == 0 {
                continue;
            }
            let allowed = profile.weak;
            let mut s = 0u64;
            loop {
                s = s.wrapping_sub(allowed) & allowed;
                if s == 0 {
                    break;
                }
                if profile.admits(kind, s) && visit(candidate, s, &profile).is_break() {
                    return;
                }
            }
        }
    }

    fn witness(
        &self,
        candidate: &Matching,
        s: u64,
        p: &Profile,
        kind: DominationKind,
    ) -> DominationWitness {
        let nf = self.market.firm_count();
        DominationWitness {
            dominating: candidate.clone(),
            coalition: Coalition::from_bits(self.market, s).expect("nonempty coalition"),
            strict_agent: bit_agent(nf, (s & p.strict).trailing_zeros() as usize),
            kind,
        }
    }

    /// Every `(µ', S)` pair of the given kind, in canonical order.
    pub fn find_dominations(&self, m: &Matching, kind: DominationKind) -> Vec<DominationWitness> {
        let mut out = Vec::new();
        self.scan(m, kind, |c, s, p| {
            out.push(self.witness(c, s, p, kind));
            ControlFlow::Continue(())
        });
        out
    }

    /// First witness whose coalition meets `clause` (a profile field), or the
    /// first witness at all when `clause` is `None`.
    fn first_witness(
        &self,
        m: &Matching,
        kind: DominationKind,
        clause: Option<fn(&Profile) -> u64>,
    ) -> Option<DominationWitness> {
        let mut found = None;
        self.scan(m, kind, |c, s, p| {
            if clause.is_none_or(|f| f(p) & s != 0) {
                found = Some(self.witness(c, s, p, kind));
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        found
    }

    pub fn in_core(&self, m: &Matching) -> bool {
        self.first_witness(m, DominationKind::Domination, None)
            .is_none()
    }

    pub fn in_worker_quasi_core(&self, m: &Matching) -> bool {
        self.first_witness(m, DominationKind::Domination, Some(|p| p.worker_clause))
            .is_none()
    }

    pub fn in_firm_quasi_core(&self, m: &Matching) -> bool {
        self.first_witness(m, DominationKind::Domination, Some(|p| p.firm_clause))
            .is_none()
    }

    pub fn in_setwise_stable(&self, m: &Matching) -> bool {
        crate::stability::individually_rational(self.market, m)
            && self
                .first_witness(m, DominationKind::SetwiseDomination, None)
                .is_none()
    }

    pub fn in_worker_quasi_setwise(&self, m: &Matching) -> bool {
        crate::stability::individually_rational(self.market, m)
            && self
                .first_witness(
                    m,
                    DominationKind::SetwiseDomination,
                    Some(|p| p.worker_clause),
                )
                .is_none()
    }

    pub fn in_firm_quasi_setwise(&self, m: &Matching) -> bool {
        crate::stability::individually_rational(self.market, m)
            && self
                .first_witness(
                    m,
                    DominationKind::SetwiseDomination,
                    Some(|p| p.firm_clause),
                )
                .is_none()
    }

    /// Three flags per kind: dominated at all, dominated by a witness that
    /// breaks the worker clause, dominated by one that breaks the firm clause.
    fn domination_flags(&self, m: &Matching, kind: DominationKind) -> (bool, bool, bool) {
        let (mut any, mut worker, mut firm) = (false, false, false);
        self.scan(m, kind, |_, s, p| {
            any = true;
            worker |= p.worker_clause & s != 0;
            firm |= p.firm_clause & s != 0;
            if worker && firm {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        (any, worker, firm)
    }

    pub fn membership(&self, m: &Matching) -> Membership {
        let market = self.market;
        let ir = blocking_agent(market, m).is_none();
        let pairs_free = blocking_pairs(market, m).is_empty();
        let (dominated, dom_w, dom_f) = self.domination_flags(m, DominationKind::Domination);
        let (sw_dominated, sw_w, sw_f) =
            self.domination_flags(m, DominationKind::SetwiseDomination);
        Membership {
            individually_rational: ir,
            pairwise_stable: ir && pairs_free,
            core: !dominated,
            worker_quasi_core: !dom_w,
            firm_quasi_core: !dom_f,
            worker_quasi_stable: ir && worker_quasi_failure(market, m).is_none(),
            firm_quasi_stable: ir && firm_quasi_failure(market, m).is_none(),
            setwise_stable: ir && !sw_dominated,
            worker_quasi_setwise: ir && !sw_w,
            firm_quasi_setwise: ir && !sw_f,
        }
    }

    pub fn classify(&self, m: &Matching) -> ClassificationRecord {
        let market = self.market;
        let membership = self.membership(m);
        let mut witnesses = BTreeMap::new();
        let blocker = blocking_agent(market, m);
        let not_ir = blocker.map(Witness::BlockingAgent);
        if let Some(w) = &not_ir {
            witnesses.insert(Notion::IndividuallyRational, w.clone());
        }
        if !membership.pairwise_stable {
            let w = not_ir.clone().or_else(|| {
                blocking_pairs(market, m)
                    .first()
                    .copied()
                    .map(Witness::BlockingPair)
            });
            if let Some(w) = w {
                witnesses.insert(Notion::PairwiseStable, w);
            }
        }
        let dom = DominationKind::Domination;
        let sw = DominationKind::SetwiseDomination;
        let searches: [(Notion, DominationKind, Option<ClauseBits>, bool); 6] = [
            (Notion::Core, dom, None, false),
            (
                Notion::WorkerQuasiCore,
                dom,
                Some(|p| p.worker_clause),
                false,
            ),
            (Notion::FirmQuasiCore, dom, Some(|p| p.firm_clause), false),
            (Notion::SetwiseStable, sw, None, true),
            (
                Notion::WorkerQuasiSetwise,
                sw,
                Some(|p| p.worker_clause),
                true,
            ),
            (Notion::FirmQuasiSetwise, sw, Some(|p| p.firm_clause), true),
        ];
        for (notion, kind, clause, needs_ir) in searches {
            if membership.get(notion) {
                continue;
            }
            let w = match (&not_ir, needs_ir) {
                (Some(w), true) => Some(w.clone()),
                _ => self.first_witness(m, kind, clause).map(Witness::Domination),
            };
            if let Some(w) = w {
                witnesses.insert(notion, w);
            }
        }
        if !membership.worker_quasi_stable {
            let w = not_ir.clone().or_else(|| {
                worker_quasi_failure(market, m).map(|f| match f {
                    WorkerQuasiFailure::MatchedWorkerBlocks(p) => Witness::BlockingPair(p),
                    WorkerQuasiFailure::Resigns(v) => Witness::Quasi(v),
                })
            });
            if let Some(w) = w {
                witnesses.insert(Notion::WorkerQuasiStable, w);
            }
        }
        if !membership.firm_quasi_stable {
            let w = not_ir.or_else(|| firm_quasi_failure(market, m).map(Witness::Quasi));
            if let Some(w) = w {
                witnesses.insert(Notion::FirmQuasiStable, w);
            }
        }
        ClassificationRecord {
            matching: m.clone(),
            membership,
            witnesses,
        }
    }

    /// Membership of every matching, in enumeration order.
    pub fn stability_sets(&self) -> StabilitySets {
        let rows = self
            .matchings
            .par_iter()
            .map(|m| (m.clone(), self.membership(m)))
            .collect();
        StabilitySets { rows }
    }
}

pub fn find_dominations(
    market: &Market,
    m: &Matching,
    kind: DominationKind,
    caps: &Caps,
) -> Result<Vec<DominationWitness>> {
    Ok(Search::new(market, caps)?.find_dominations(m, kind))
}

pub fn in_core(market: &Market, m: &Matching, caps: &Caps) -> Result<bool> {
    Ok(Search::new(market, caps)?.in_core(m))
}

pub fn in_worker_quasi_core(market: &Market, m: &Matching, caps: &Caps) -> Result<bool> {
    Ok(Search::new(market, caps)?.in_worker_quasi_core(m))
}

pub fn in_firm_quasi_core(market: &Market, m: &Matching, caps: &Caps) -> Result<bool> {
    Ok(Search::new(market, caps)?.in_firm_quasi_core(m))
}

pub fn in_setwise_stable(market: &Market, m: &Matching, caps: &Caps) -> Result<bool> {
    Ok(Search::new(market, caps)?.in_setwise_stable(m))
}

pub fn in_worker_quasi_setwise(market: &Market, m: &Matching, caps: &Caps) -> Result<bool> {
    Ok(Search::new(market, caps)?.in_worker_quasi_setwise(m))
}

pub fn in_firm_quasi_setwise(market: &Market, m: &Matching, caps: &Caps) -> Result<bool> {
    Ok(Search::new(market, caps)?.in_firm_quasi_setwise(m))
}

pub fn classify(market: &Market, m: &Matching, caps: &Caps) -> Result<ClassificationRecord> {
    Ok(Search::new(market, caps)?.classify(m))
}

pub fn stability_sets(market: &Market, caps: &Caps) -> Result<StabilitySets> {
    Ok(Search::new(market, caps)?.stability_sets())
}
