//! Set materialization, the inclusion theorems checked against it, and the
//! human and TSV renderings used by the command line.
//!
//! # TSV schemas
//!
//! Sets (`matchkit sets --tsv`): a header row, then one row per matching in
//! enumeration order.
//!
//! ```text
//! matching  I  S  C  CQW  CQF  QW  QF  SW  SWQW  SWQF
//! f1:w1     1  1  1  1    1    1   1   1   1     1
//! ```
//!
//! Theorems (`matchkit verify --tsv`): a header row, then one row per selected
//! theorem.
//!
//! ```text
//! theorem  mode  statement  status  markets  market  matching
//! ```
//!
//! `mode` is `many-to-one`, `many-to-many` or `both`. `status` is `HOLDS`,
//! `HOLDS_STRICT`, `FAILS` or `NOT_APPLICABLE`; `markets` counts the markets
//! the theorem was checked on. `market` and `matching` name the witness
//! (strictness for `HOLDS_STRICT`, counterexample for `FAILS`) and are `-`
//! otherwise.

use std::fmt::Write as _;

use crate::domination::{
    ClassificationRecord, DominationKind, Membership, Notion, Search, StabilitySets, Witness,
};
use crate::format::format_matching;
use crate::model::{AgentId, Caps, Coalition, Market, Matching, Mode};
use crate::stability::{blocking_pairs, desire_sets, BlockingPair};
use crate::witness::{
    blocking_pair_from_quasi_core_violation_m21, domination_from_blocking_pair_m21,
    domination_from_double_quasi_m2m, domination_from_firm_block_m21,
    setwise_domination_from_qw_violation_m2m, ConstructionReport,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Relation {
    Subset,
    Equal,
}

/// One inclusion between stability sets, checked row by row.
#[derive(Clone, Copy, Debug)]
pub struct Theorem {
    pub id: &'static str,
    /// `None` when the statement holds in both kinds of market.
    pub mode: Option<Mode>,
    pub statement: &'static str,
    relation: Relation,
    lhs: fn(&Membership) -> bool,
    rhs: fn(&Membership) -> bool,
}

impl PartialEq for Theorem {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Theorem {}

impl Theorem {
    pub fn applies_to(&self, mode: Mode) -> bool {
        self.mode.is_none_or(|m| m == mode)
    }

    fn mode_keyword(&self) -> &'static str {
        self.mode.map_or("both", Mode::keyword)
    }

    /// First matching that breaks the statement.
    fn counterexample<'a>(&self, sets: &'a StabilitySets) -> Option<&'a Matching> {
        sets.rows
            .iter()
            .find(|(_, m)| {
                let (l, r) = ((self.lhs)(m), (self.rhs)(m));
                match self.relation {
                    Relation::Subset => l && !r,
                    Relation::Equal => l != r,
                }
            })
            .map(|(x, _)| x)
    }

    /// First matching on the right but not the left of a proper inclusion.
    fn strictness<'a>(&self, sets: &'a StabilitySets) -> Option<&'a Matching> {
        if self.relation == Relation::Equal {
            return None;
        }
        sets.rows
            .iter()
            .find(|(_, m)| (self.rhs)(m) && !(self.lhs)(m))
            .map(|(x, _)| x)
    }
}

macro_rules! theorem {
    ($id:literal, $mode:expr, $stmt:literal, $rel:ident, |$m:ident| $lhs:expr, $rhs:expr) => {
        Theorem {
            id: $id,
            mode: $mode,
            statement: $stmt,
            relation: Relation::$rel,
            lhs: |$m| $lhs,
            rhs: |$m| $rhs,
        }
    };
}

const M21: Option<Mode> = Some(Mode::ManyToOne);
const M2M: Option<Mode> = Some(Mode::ManyToMany);

/// Every theorem with a stable id, in report order.
pub const THEOREMS: [Theorem; 12] = [
    theorem!(
        "core-eq-stable",
        M21,
        "C == S",
        Equal,
        |m| m.core,
        m.pairwise_stable
    ),
    theorem!(
        "core-in-ir",
        M21,
        "C ⊆ I",
        Subset,
        |m| m.core,
        m.individually_rational
    ),
    theorem!(
        "qw-core-char",
        M21,
        "I∩C^QW == QW",
        Equal,
        |m| m.individually_rational && m.worker_quasi_core,
        m.worker_quasi_stable
    ),
    theorem!(
        "qf-core-char",
        M21,
        "I∩C^QF == QF",
        Equal,
        |m| m.individually_rational && m.firm_quasi_core,
        m.firm_quasi_stable
    ),
    theorem!(
        "stable-in-quasi",
        None,
        "S ⊆ QW∩QF",
        Subset,
        |m| m.pairwise_stable,
        m.worker_quasi_stable && m.firm_quasi_stable
    ),
    theorem!(
        "core-in-quasi-cores",
        None,
        "C ⊆ C^QW∩C^QF",
        Subset,
        |m| m.core,
        m.worker_quasi_core && m.firm_quasi_core
    ),
    theorem!(
        "qw-in-ir-core",
        M2M,
        "QW ⊆ I∩C^QW",
        Subset,
        |m| m.worker_quasi_stable,
        m.individually_rational && m.worker_quasi_core
    ),
    theorem!(
        "qf-in-ir-core",
        M2M,
        "QF ⊆ I∩C^QF",
        Subset,
        |m| m.firm_quasi_stable,
        m.individually_rational && m.firm_quasi_core
    ),
    theorem!(
        "sw-qw-char",
        M2M,
        "SW^QW == QW",
        Equal,
        |m| m.worker_quasi_setwise,
        m.worker_quasi_stable
    ),
    theorem!(
        "sw-qf-char",
        M2M,
        "SW^QF == QF",
        Equal,
        |m| m.firm_quasi_setwise,
        m.firm_quasi_stable
    ),
    theorem!(
        "sw-in-core",
        M2M,
        "SW ⊆ C",
        Subset,
        |m| m.setwise_stable,
        m.core
    ),
    theorem!(
        "double-quasi-core",
        M2M,
        "QW∩QF ⊆ S∪C^c",
        Subset,
        |m| m.worker_quasi_stable && m.firm_quasi_stable,
        m.pairwise_stable || !m.core
    ),
];

pub fn theorem(id: &str) -> Option<&'static Theorem> {
    THEOREMS.iter().find(|t| t.id == id)
}

/// Resolves `all`, `m21`, `m2m` or a comma-separated list of ids.
pub fn select_theorems(spec: &str) -> Result<Vec<&'static Theorem>> {
    let by_mode = |mode| THEOREMS.iter().filter(|t| t.applies_to(mode)).collect();
    match spec.trim() {
        "all" => Ok(THEOREMS.iter().collect()),
        "m21" => Ok(by_mode(Mode::ManyToOne)),
        "m2m" => Ok(by_mode(Mode::ManyToMany)),
        list => {
            let mut out: Vec<&Theorem> = Vec::new();
            for id in list.split(',').map(str::trim) {
                let t = theorem(id)
                    .ok_or_else(|| Error::ConfigInvalid(format!("unknown theorem `{id}`")))?;
                if !out.contains(&t) {
                    out.push(t);
                }
            }
            Ok(out)
        }
    }
}

/// A matching of a named market, rendered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub market: String,
    pub matching: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InclusionStatus {
    /// `strict_witness` shows the inclusion is proper, when one was seen.
    Holds {
        strict_witness: Option<Located>,
    },
    Fails(Located),
    NotApplicable,
}

impl InclusionStatus {
    pub fn is_failure(&self) -> bool {
        matches!(self, InclusionStatus::Fails(_))
    }

    fn keyword(&self) -> &'static str {
        match self {
            InclusionStatus::Holds {
                strict_witness: None,
            } => "HOLDS",
            InclusionStatus::Holds {
                strict_witness: Some(_),
            } => "HOLDS_STRICT",
            InclusionStatus::Fails(_) => "FAILS",
            InclusionStatus::NotApplicable => "NOT_APPLICABLE",
        }
    }

    fn located(&self) -> Option<&Located> {
        match self {
            InclusionStatus::Holds { strict_witness } => strict_witness.as_ref(),
            InclusionStatus::Fails(l) => Some(l),
            InclusionStatus::NotApplicable => None,
        }
    }
}

/// Status of one theorem over a list of markets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremOutcome {
    pub theorem: &'static Theorem,
    pub status: InclusionStatus,
    pub markets: usize,
}

/// Everything computed for one market.
pub struct MarketReport {
    pub name: String,
    pub market: Market,
    pub sets: StabilitySets,
}

impl MarketReport {
    pub fn build(name: impl Into<String>, market: Market, caps: &Caps) -> Result<Self> {
        let sets = Search::new(&market, caps)?.stability_sets();
        Ok(MarketReport {
            name: name.into(),
            market,
            sets,
        })
    }

    pub fn status(&self, t: &Theorem) -> InclusionStatus {
        let locate = |m: &Matching| Located {
            market: self.name.clone(),
            matching: format_matching(&self.market, m),
        };
        if !t.applies_to(self.market.mode()) {
            InclusionStatus::NotApplicable
        } else if let Some(m) = t.counterexample(&self.sets) {
            InclusionStatus::Fails(locate(m))
        } else {
            InclusionStatus::Holds {
                strict_witness: t.strictness(&self.sets).map(locate),
            }
        }
    }

    pub fn render_sets(&self) -> String {
        let market = &self.market;
        let mut out = format!(
            "market {} ({}): {} firms, {} workers, {} matchings\n",
            self.name,
            market.mode().keyword(),
            market.firm_count(),
            market.worker_count(),
            self.sets.rows.len()
        );
        out.push_str("counts:");
        for n in Notion::ALL {
            let _ = write!(out, " {}={}", n, self.sets.count(n));
        }
        out.push('\n');
        for n in Notion::ALL {
            let members: Vec<String> = self
                .sets
                .members(n)
                .into_iter()
                .map(|m| format!("[{}]", format_matching(market, m)))
                .collect();
            let _ = writeln!(out, "{:<5}{}", n.short(), members.join(" "));
        }
        out
    }

    pub fn render_sets_tsv(&self) -> String {
        let mut out = String::from("matching");
        for n in Notion::ALL {
            let _ = write!(out, "\t{n}");
        }
        out.push('\n');
        for (m, membership) in &self.sets.rows {
            out.push_str(&format_matching(&self.market, m));
            for n in Notion::ALL {
                out.push_str(if membership.get(n) { "\t1" } else { "\t0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Combines per-market statuses: the first failure wins, otherwise the first
/// strictness witness is kept.
pub fn aggregate(reports: &[MarketReport], theorems: &[&'static Theorem]) -> Vec<TheoremOutcome> {
    theorems
        .iter()
        .map(|&t| {
            let mut status = InclusionStatus::NotApplicable;
            let mut markets = 0;
            for r in reports {
                let s = r.status(t);
                if s == InclusionStatus::NotApplicable {
                    continue;
                }
                markets += 1;
                status = match (status, s) {
                    (f @ InclusionStatus::Fails(_), _) => f,
                    (_, f @ InclusionStatus::Fails(_)) => f,
                    (
                        InclusionStatus::Holds {
                            strict_witness: Some(w),
                        },
                        _,
                    ) => InclusionStatus::Holds {
                        strict_witness: Some(w),
                    },
                    (_, s) => s,
                };
            }
            TheoremOutcome {
                theorem: t,
                status,
                markets,
            }
        })
        .collect()
}

pub fn render_outcomes(outcomes: &[TheoremOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let t = o.theorem;
        let _ = write!(out, "{:<20} {}: ", t.id, t.statement);
        match &o.status {
            InclusionStatus::Holds {
                strict_witness: None,
            } => out.push_str("HOLDS"),
            InclusionStatus::Holds {
                strict_witness: Some(w),
            } => {
                let _ = write!(out, "HOLDS (strict; witness {} [{}])", w.market, w.matching);
            }
            InclusionStatus::Fails(w) => {
                let _ = write!(out, "FAILS (counterexample {} [{}])", w.market, w.matching);
            }
            InclusionStatus::NotApplicable => out.push_str("NOT APPLICABLE"),
        }
        if o.status != InclusionStatus::NotApplicable {
            let _ = write!(
                out,
                " over {} market{}",
                o.markets,
                if o.markets == 1 { "" } else { "s" }
            );
        }
        out.push('\n');
    }
    out
}

pub fn render_outcomes_tsv(outcomes: &[TheoremOutcome]) -> String {
    let mut out = String::from("theorem\tmode\tstatement\tstatus\tmarkets\tmarket\tmatching\n");
    for o in outcomes {
        let (market, matching) = o
            .status
            .located()
            .map_or(("-", "-"), |l| (l.market.as_str(), l.matching.as_str()));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{market}\t{matching}",
            o.theorem.id,
            o.theorem.mode_keyword(),
            o.theorem.statement,
            o.status.keyword(),
            o.markets
        );
    }
    out
}

pub fn render_coalition(market: &Market, c: &Coalition) -> String {
    let names: Vec<&str> = c.members().map(|a| market.label(a)).collect();
    format!("{{{}}}", names.join(" "))
}

fn render_witness(market: &Market, m: &Matching, w: &Witness) -> String {
    match w {
        Witness::BlockingAgent(a) => format!("blocked by {}", market.label(*a)),
        Witness::BlockingPair(p) => format!("blocking pair {}", pair_label(market, *p)),
        Witness::Quasi(v) => {
            let side = v.agent.side.opposite();
            format!(
                "C_{}({} ∪ {}) = {}",
                market.label(v.agent),
                market.render_set(side, m.partners(v.agent)),
                market.render_set(side, v.added),
                market.render_set(side, v.chosen)
            )
        }
        Witness::Domination(d) => format!(
            "{} by [{}] via {} (strict for {})",
            match d.kind {
                DominationKind::Domination => "dominated",
                DominationKind::SetwiseDomination => "setwise dominated",
            },
            format_matching(market, &d.dominating),
            render_coalition(market, &d.coalition),
            market.label(d.strict_agent)
        ),
    }
}

fn notion_name(n: Notion) -> &'static str {
    match n {
        Notion::IndividuallyRational => "individually rational",
        Notion::PairwiseStable => "pairwise stable",
        Notion::Core => "core",
        Notion::WorkerQuasiCore => "worker-quasi-core",
        Notion::FirmQuasiCore => "firm-quasi-core",
        Notion::WorkerQuasiStable => "worker-quasi-stable",
        Notion::FirmQuasiStable => "firm-quasi-stable",
        Notion::SetwiseStable => "setwise stable",
        Notion::WorkerQuasiSetwise => "worker-quasi-setwise stable",
        Notion::FirmQuasiSetwise => "firm-quasi-setwise stable",
    }
}

/// One line per notion: short name, long name, yes/no, and the witness
/// against membership when there is one.
pub fn render_classification(market: &Market, record: &ClassificationRecord) -> String {
    let mut out = format!("matching {}\n", format_matching(market, &record.matching));
    for n in Notion::ALL {
        let member = record.membership.get(n);
        let _ = write!(
            out,
            "{:<5} {:<28} {}",
            n.short(),
            notion_name(n),
            if member { "yes" } else { "no" }
        );
        if let Some(w) = record.witnesses.get(&n) {
            let _ = write!(out, "  {}", render_witness(market, &record.matching, w));
        }
        out.push('\n');
    }
    out
}

pub fn render_construction(market: &Market, r: &ConstructionReport) -> String {
    format!(
        "construction {}\nkind         {}\ncoalition    {}\ndominating   {}\nverified     {}\n",
        r.description,
        match r.kind {
            DominationKind::Domination => "domination",
            DominationKind::SetwiseDomination => "setwise domination",
        },
        render_coalition(market, &r.coalition),
        format_matching(market, &r.dominating),
        if r.verified { "yes" } else { "no" }
    )
}

/// Tally of the constructive witnesses built from one market's matchings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessAudit {
    /// Construction reports returned, and how many re-verified.
    pub reports: usize,
    pub verified: usize,
    /// Quasi-core violations turned into a blocking pair and back.
    pub round_trips: usize,
    /// Matchings in both quasi-stable sets but not pairwise stable, each
    /// shown to be dominated.
    pub double_quasi: usize,
    pub failures: Vec<String>,
}

impl WitnessAudit {
    pub fn merge(&mut self, other: WitnessAudit) {
        self.reports += other.reports;
        self.verified += other.verified;
        self.round_trips += other.round_trips;
        self.double_quasi += other.double_quasi;
        self.failures.extend(other.failures);
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.reports == self.verified
    }

    fn record(&mut self, what: String, r: Result<ConstructionReport>) -> bool {
        match r {
            Ok(report) => {
                self.reports += 1;
                if report.verified {
                    self.verified += 1;
                    true
                } else {
                    self.failures.push(format!("{what}: unverified report"));
                    false
                }
            }
            Err(e) => {
                self.failures.push(format!("{what}: {e}"));
                false
            }
        }
    }
}

/// Runs every applicable construction on every matching of a market.
pub fn audit_witnesses(report: &MarketReport, caps: &Caps) -> Result<WitnessAudit> {
    let market = &report.market;
    let mut audit = WitnessAudit::default();
    match market.mode() {
        Mode::ManyToOne => {
            let search = Search::new(market, caps)?;
            for (m, membership) in &report.sets.rows {
                if !membership.individually_rational {
                    continue;
                }
                let here = format!("{} [{}]", report.name, format_matching(market, m));
                for pair in blocking_pairs(market, m) {
                    let r = domination_from_blocking_pair_m21(market, m, pair);
                    let ok = matches!(&r, Ok(c) if c.verified);
                    audit.record(
                        format!("{here} pair {}", pair_label(market, pair)),
                        r.clone(),
                    );
                    if ok && !m.worker_partners(pair.worker).is_empty() {
                        let c = r.expect("checked");
                        if !breaks_worker_clause(market, m, &c.dominating, &c.coalition) {
                            audit.failures.push(format!(
                                "{here}: domination from {} keeps the worker clause",
                                pair_label(market, pair)
                            ));
                        }
                    }
                }
                let desire = desire_sets(market, m);
                for (f, &t) in desire.firm.iter().enumerate() {
                    if t.is_empty() {
                        continue;
                    }
                    match domination_from_firm_block_m21(market, m, f, t) {
                        Err(Error::PreconditionFailed(_)) => {}
                        r => {
                            audit.record(
                                format!("{here} firm {}", market.label(AgentId::firm(f))),
                                r,
                            );
                        }
                    }
                }
                if membership.worker_quasi_core {
                    continue;
                }
                for d in search.find_dominations(m, DominationKind::Domination) {
                    for w in d.coalition.workers().iter() {
                        let (old, new) = (m.worker_partners(w), d.dominating.worker_partners(w));
                        if old == new || old.is_empty() {
                            continue;
                        }
                        let what =
                            format!("{here} via [{}]", format_matching(market, &d.dominating));
                        match blocking_pair_from_quasi_core_violation_m21(
                            market,
                            m,
                            &d.dominating,
                            &d.coalition,
                            w,
                        ) {
                            Ok(pair) if !m.worker_partners(pair.worker).is_empty() => {
                                if audit.record(
                                    what,
                                    domination_from_blocking_pair_m21(market, m, pair),
                                ) {
                                    audit.round_trips += 1;
                                }
                            }
                            Ok(pair) => audit.failures.push(format!(
                                "{what}: pair {} has an unmatched worker",
                                pair_label(market, pair)
                            )),
                            Err(e) => audit.failures.push(format!("{what}: {e}")),
                        }
                    }
                }
            }
        }
        Mode::ManyToMany => {
            for (m, membership) in &report.sets.rows {
                if !membership.individually_rational {
                    continue;
                }
                let here = format!("{} [{}]", report.name, format_matching(market, m));
                let desire = desire_sets(market, m);
                for (w, &k) in desire.worker.iter().enumerate() {
                    let current = m.worker_partners(w);
                    let chosen = market
                        .worker_choice(w)
                        .expect("many-to-many")
                        .choose(current | k);
                    if current.is_subset(chosen) {
                        continue;
                    }
                    let r = setwise_domination_from_qw_violation_m2m(market, m, w, k);
                    audit.record(
                        format!("{here} worker {}", market.label(AgentId::worker(w))),
                        r,
                    );
                }
                if membership.worker_quasi_stable
                    && membership.firm_quasi_stable
                    && !membership.pairwise_stable
                {
                    let mut dominated = false;
                    for pair in blocking_pairs(market, m) {
                        let r = domination_from_double_quasi_m2m(market, m, pair);
                        dominated |=
                            audit.record(format!("{here} pair {}", pair_label(market, pair)), r);
                    }
                    if dominated {
                        audit.double_quasi += 1;
                    } else {
                        audit.failures.push(format!(
                            "{here}: quasi-stable on both sides yet undominated"
                        ));
                    }
                }
            }
        }
    }
    Ok(audit)
}

fn pair_label(market: &Market, pair: BlockingPair) -> String {
    format!(
        "({}, {})",
        market.label(AgentId::firm(pair.firm)),
        market.label(AgentId::worker(pair.worker))
    )
}

/// Whether some coalition worker loses a partner (many-to-many) or, in a
/// many-to-one market, was employed and moves.
pub fn breaks_worker_clause(
    market: &Market,
    m: &Matching,
    dominating: &Matching,
    coalition: &Coalition,
) -> bool {
    coalition.workers().iter().any(|w| {
        let (old, new) = (m.worker_partners(w), dominating.worker_partners(w));
        match market.mode() {
            Mode::ManyToOne => old != new && !old.is_empty(),
            Mode::ManyToMany => !old.is_subset(new),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn report(name: &str, market: Market) -> MarketReport {
        MarketReport::build(name, market, &Caps::default()).unwrap()
    }

    #[test]
    fn theorem_ids_are_unique_and_selectable() {
        for (i, t) in THEOREMS.iter().enumerate() {
            assert!(THEOREMS[..i].iter().all(|u| u.id != t.id));
        }
        assert_eq!(select_theorems("all").unwrap().len(), 12);
        assert_eq!(select_theorems("m21").unwrap().len(), 6);
        assert_eq!(select_theorems("m2m").unwrap().len(), 8);
        let picked = select_theorems("sw-qw-char, qw-core-char,sw-qw-char").unwrap();
        assert_eq!(
            picked.iter().map(|t| t.id).collect::<Vec<_>>(),
            ["sw-qw-char", "qw-core-char"]
        );
        assert!(matches!(
            select_theorems("nope"),
            Err(Error::ConfigInvalid(_))
        ));
    }

    #[test]
    fn m69_inclusions_hold_with_mu3_showing_strictness() {
        let r = report("m69", fixtures::m69());
        let outcomes = aggregate(std::slice::from_ref(&r), &select_theorems("all").unwrap());
        assert!(outcomes.iter().all(|o| !o.status.is_failure()));
        let qw = outcomes
            .iter()
            .find(|o| o.theorem.id == "qw-in-ir-core")
            .unwrap();
        assert!(matches!(
            qw.status,
            InclusionStatus::Holds {
                strict_witness: Some(_)
            }
        ));
        // µ3 is one of the matchings that make the inclusion proper.
        let (_, mu3) = r
            .sets
            .rows
            .iter()
            .find(|(m, _)| *m == fixtures::mu3())
            .unwrap();
        assert!(mu3.individually_rational && mu3.worker_quasi_core && !mu3.worker_quasi_stable);
        let core_eq = outcomes
            .iter()
            .find(|o| o.theorem.id == "core-eq-stable")
            .unwrap();
        assert_eq!(core_eq.status, InclusionStatus::NotApplicable);
        let text = render_outcomes(&outcomes);
        assert!(text.contains("SW^QW == QW: HOLDS"));
        assert!(text.contains("QW ⊆ I∩C^QW: HOLDS (strict; witness m69 ["));
    }

    #[test]
    fn failing_inclusion_reports_counterexample() {
        // Core and pairwise stability part ways in many-to-many markets, so the
        // many-to-one equality fails when forced onto M69.
        let r = report("m69", fixtures::m69());
        let forced = Theorem {
            mode: None,
            ..*theorem("core-eq-stable").unwrap()
        };
        match r.status(&forced) {
            InclusionStatus::Fails(l) => assert_eq!(l.market, "m69"),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn tsv_shapes() {
        let r = report("ex1", fixtures::ex1());
        let tsv = r.render_sets_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(
            lines[0],
            "matching\tI\tS\tC\tCQW\tCQF\tQW\tQF\tSW\tSWQW\tSWQF"
        );
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "-\t1\t1\t1\t1\t1\t1\t1\t1\t1\t1");
        assert!(lines[2].starts_with("f:w\t0\t0\t0\t1\t"));
        let outcomes = aggregate(&[r], &select_theorems("m21").unwrap());
        let tsv = render_outcomes_tsv(&outcomes);
        assert!(tsv.lines().skip(1).all(|l| l.split('\t').count() == 7));
    }

    #[test]
    fn fixture_witnesses_audit_clean() {
        for (name, market) in [
            ("ex1", fixtures::ex1()),
            ("ex2", fixtures::ex2()),
            ("m69", fixtures::m69()),
            ("m69b", fixtures::m69b()),
        ] {
            let r = report(name, market);
            let audit = audit_witnesses(&r, &Caps::default()).unwrap();
            assert!(audit.is_clean(), "{name}: {:?}", audit.failures);
        }
    }
}
