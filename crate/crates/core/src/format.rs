//! The line-oriented market file format and the command-line matching syntax.
//!
//! ```text
//! # comment
//! market many-to-many
//! firms: f1 f2
//! workers: w1 w2
//! pref f1: {w1 w2} > {w1} > {w2} > {}
//! choice f2:
//!   {} -> {}
//!   {w1} -> {w1}
//!   {w2} -> {}
//!   {w1 w2} -> {w1}
//! pref w1: {f1 f2} > {f2} > {f1} > {}
//! pref w2: {f1} > {}
//! ```
//!
//! A `pref` block induces a choice function from its ranking. A `choice` block
//! lists every subset of the opposite side with its choice. Many-to-one
//! workers always use `pref` with single firms and `{}`.

use std::collections::HashSet;

use crate::choice::ChoiceFunction;
use crate::model::{
    make_market, make_matching, ChoiceSpec, Market, Matching, Mode, Side, WorkerSide,
};
use crate::set::AgentSet;
use crate::{Error, Result};

fn syntax(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// One physical line with its comment removed and its 1-based number.
struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    fn indented(&self) -> bool {
        self.text.starts_with([' ', '\t'])
    }

    /// 1-based column of a subslice of this line.
    fn col_of(&self, part: &str) -> usize {
        part.as_ptr() as usize - self.text.as_ptr() as usize + 1
    }

    fn err(&self, part: &str, message: impl Into<String>) -> Error {
        syntax(self.number, self.col_of(part), message)
    }
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, raw)| Line {
                number: i + 1,
                text: raw.split('#').next().unwrap_or("").trim_end(),
            })
            .filter(|l| !l.text.trim().is_empty())
            .collect();
        Parser { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos)?;
        self.pos += 1;
        Some(l)
    }

    fn peek_indented(&self) -> bool {
        self.lines.get(self.pos).is_some_and(Line::indented)
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.number)
    }
}

/// Splits `keyword rest` and requires the keyword.
fn after_keyword<'a>(line: &Line<'a>, keyword: &str) -> Result<&'a str> {
    let t = line.text.trim_start();
    match t.strip_prefix(keyword) {
        Some(rest) if rest.is_empty() || rest.starts_with([' ', '\t', ':']) => Ok(rest),
        _ => Err(line.err(t, format!("expected `{keyword}`"))),
    }
}

fn roster<'a>(line: &Line<'a>, keyword: &str) -> Result<Vec<String>> {
    let rest = after_keyword(line, keyword)?;
    let rest = rest
        .trim_start()
        .strip_prefix(':')
        .ok_or_else(|| line.err(rest, format!("expected `:` after `{keyword}`")))?;
    let labels: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
    if labels.is_empty() {
        return Err(line.err(rest, format!("`{keyword}` lists no agents")));
    }
    for word in rest.split_whitespace() {
        if word.contains(['{', '}', '>', ':', ';']) {
            return Err(line.err(word, format!("`{word}` is not a valid label")));
        }
    }
    Ok(labels)
}

/// Parses one `{a b}` set starting at the beginning of `s` and returns it with
/// the remaining text.
fn parse_set<'a>(line: &Line<'a>, s: &'a str, labels: &[String]) -> Result<(AgentSet, &'a str)> {
    let s = s.trim_start();
    let body = s
        .strip_prefix('{')
        .ok_or_else(|| line.err(s, "expected `{`"))?;
    let close = body.find('}').ok_or_else(|| line.err(s, "unclosed `{`"))?;
    let mut set = AgentSet::EMPTY;
    let inner = &body[..close];
    for word in inner.split_whitespace() {
        // Recover the word's slice inside the line for its column.
        let offset = word.as_ptr() as usize - inner.as_ptr() as usize;
        let part = &inner[offset..];
        let i = labels.iter().position(|l| l == word).ok_or_else(|| {
            line.err(
                part,
                format!("`{word}` is not an agent of the opposite side"),
            )
        })?;
        if set.contains(i) {
            return Err(line.err(part, format!("`{word}` repeated in a set")));
        }
        set = set.with(i);
    }
    Ok((set, &body[close + 1..]))
}

struct Header {
    mode: Mode,
    firms: Vec<String>,
    workers: Vec<String>,
}

fn parse_header(p: &mut Parser) -> Result<Header> {
    let end = p.last_line();
    let line = p.next().ok_or_else(|| syntax(1, 1, "empty market file"))?;
    let rest = after_keyword(line, "market")?;
    let mode = match rest.trim() {
        "many-to-one" => Mode::ManyToOne,
        "many-to-many" => Mode::ManyToMany,
        other => {
            let part = if other.is_empty() {
                rest
            } else {
                rest.trim_start()
            };
            return Err(line.err(part, "expected `many-to-one` or `many-to-many`"));
        }
    };
    let line = p
        .next()
        .ok_or_else(|| syntax(end, 1, "missing `firms:` line"))?;
    let firms = roster(line, "firms")?;
    let line = p
        .next()
        .ok_or_else(|| syntax(end, 1, "missing `workers:` line"))?;
    let workers = roster(line, "workers")?;
    Ok(Header {
        mode,
        firms,
        workers,
    })
}

/// Parses and validates a market file.
pub fn parse_market(text: &str) -> Result<Market> {
    let mut p = Parser::new(text);
    let header = parse_header(&mut p)?;
    let mut seen = HashSet::new();
    let mut data = Vec::new();
    while let Some(line) = p.next() {
        if line.indented() {
            return Err(line.err(
                line.text.trim_start(),
                "indented line outside a `choice` block",
            ));
        }
        let (is_pref, rest) = if let Ok(rest) = after_keyword(line, "pref") {
            (true, rest)
        } else if let Ok(rest) = after_keyword(line, "choice") {
            (false, rest)
        } else {
            return Err(line.err(line.text, "expected a `pref` or `choice` block"));
        };
        let (owner, body) = rest
            .split_once(':')
            .ok_or_else(|| line.err(rest, "expected `:` after the agent label"))?;
        let owner_part = owner.trim_start();
        let owner = owner.trim();
        if owner.is_empty() {
            return Err(line.err(rest, "missing agent label"));
        }
        if !seen.insert(owner.to_string()) {
            return Err(line.err(owner_part, format!("second block for `{owner}`")));
        }
        // Unknown owners are reported by market construction; the side only
        // decides which roster the sets refer to.
        let opposite = if header.workers.iter().any(|w| w == owner) {
            &header.firms
        } else {
            &header.workers
        };
        let spec = if is_pref {
            let mut ranking = Vec::new();
            let mut rest = body;
            loop {
                let (set, after) = parse_set(line, rest, opposite)?;
                ranking.push(set);
                let after = after.trim_start();
                if after.is_empty() {
                    break;
                }
                rest = after
                    .strip_prefix('>')
                    .ok_or_else(|| line.err(after, "expected `>` between sets"))?;
            }
            ChoiceSpec::Preference(ranking)
        } else {
            if !body.trim().is_empty() {
                return Err(line.err(
                    body.trim_start(),
                    "table rows go on the following indented lines",
                ));
            }
            let mut rows = Vec::new();
            while p.peek_indented() {
                let row = p.next().expect("peeked");
                let (t, after) = parse_set(row, row.text, opposite)?;
                let after = after.trim_start();
                let after = after
                    .strip_prefix("->")
                    .ok_or_else(|| row.err(after, "expected `->`"))?;
                let (chosen, tail) = parse_set(row, after, opposite)?;
                if !tail.trim().is_empty() {
                    return Err(row.err(tail.trim_start(), "unexpected text after the row"));
                }
                rows.push((t, chosen));
            }
            ChoiceSpec::Table(rows)
        };
        data.push((owner.to_string(), spec));
    }
    make_market(header.firms, header.workers, header.mode, data)
}

fn pref_line(market: &Market, owner: &str, side: Side, ranking: &[AgentSet]) -> String {
    let sets: Vec<String> = ranking
        .iter()
        .map(|&s| market.render_set(side, s))
        .collect();
    format!("pref {owner}: {}\n", sets.join(" > "))
}

fn choice_block(market: &Market, owner: &str, side: Side, c: &ChoiceFunction) -> String {
    if let Some(pref) = c.induced_from() {
        return pref_line(market, owner, side, pref.ranking());
    }
    let mut out = format!("choice {owner}:\n");
    for (t, chosen) in c.entries() {
        out.push_str(&format!(
            "  {} -> {}\n",
            market.render_set(side, t),
            market.render_set(side, chosen)
        ));
    }
    out
}

/// Renders a market in the file format; [`parse_market`] reads it back to an
/// equal market.
pub fn serialize_market(market: &Market) -> String {
    let mut out = format!(
        "market {}\nfirms: {}\nworkers: {}\n",
        market.mode().keyword(),
        market.firm_labels().join(" "),
        market.worker_labels().join(" ")
    );
    for (f, c) in market.firm_choices().iter().enumerate() {
        out.push_str(&choice_block(
            market,
            &market.firm_labels()[f],
            Side::Worker,
            c,
        ));
    }
    for (w, owner) in market.worker_labels().iter().enumerate() {
        match market.worker_side() {
            WorkerSide::Choices(cs) => {
                out.push_str(&choice_block(market, owner, Side::Firm, &cs[w]))
            }
            WorkerSide::Preferences(ps) => {
                out.push_str(&pref_line(market, owner, Side::Firm, ps[w].ranking()))
            }
        }
    }
    out
}

/// Parses `f1:w2 w3; f2:w1`. Each entry names an agent and some partners on
/// the other side; unlisted agents are unmatched. `""` and `-` are the empty
/// matching.
pub fn parse_matching(market: &Market, spec: &str) -> Result<Matching> {
    let mut pairs = Vec::new();
    if spec.trim() != "-" {
        let line = Line {
            number: 1,
            text: spec,
        };
        for entry in spec.split(';') {
            if entry.trim().is_empty() {
                continue;
            }
            let (head, partners) = entry
                .split_once(':')
                .ok_or_else(|| line.err(entry.trim_start(), "expected `agent:partners`"))?;
            let a = market
                .find(head.trim())
                .ok_or_else(|| Error::UnknownAgent(head.trim().to_string()))?;
            for label in partners.split_whitespace() {
                let b = market
                    .find(label)
                    .filter(|b| b.side != a.side)
                    .ok_or_else(|| Error::UnknownAgent(label.to_string()))?;
                pairs.push(match a.side {
                    Side::Firm => (a.index, b.index),
                    Side::Worker => (b.index, a.index),
                });
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    make_matching(market, pairs)
}

/// Firm-led rendering accepted by [`parse_matching`]; `-` for the empty matching.
pub fn format_matching(market: &Market, m: &Matching) -> String {
    let entries: Vec<String> = (0..market.firm_count())
        .filter(|&f| !m.firm_partners(f).is_empty())
        .map(|f| {
            let names: Vec<&str> = m
                .firm_partners(f)
                .iter()
                .map(|w| market.worker_labels()[w].as_str())
                .collect();
            format!("{}:{}", market.firm_labels()[f], names.join(" "))
        })
        .collect();
    if entries.is_empty() {
        "-".into()
    } else {
        entries.join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_fixture_files() {
        let ex1 = parse_market(fixtures::EX1).unwrap();
        assert_eq!(ex1.mode(), Mode::ManyToOne);
        assert_eq!(
            ex1.firm_choice(0).choose(AgentSet::full(1)),
            AgentSet::EMPTY
        );
        let m69 = parse_market(fixtures::M69).unwrap();
        let c = m69.worker_choice(0).unwrap();
        assert_eq!(c.choose(AgentSet::full(3)), AgentSet::from_indices([0, 1]));
        assert_eq!(
            c.choose(AgentSet::from_indices([0, 2])),
            AgentSet::from_indices([0])
        );
    }

    #[test]
    fn duplicate_block_is_a_syntax_error() {
        let text = "market many-to-one\nfirms: f1\nworkers: w1\npref f1: {w1} > {}\npref f1: {} \npref w1: {f1} > {}\n";
        assert_eq!(
            parse_market(text).unwrap_err(),
            Error::Syntax {
                line: 5,
                col: 6,
                message: "second block for `f1`".into()
            }
        );
    }

    #[test]
    fn positions_point_at_the_offending_token() {
        let text = "market many-to-one\nfirms: f1\nworkers: w1\npref f1: {w1 w9} > {}\n";
        match parse_market(text).unwrap_err() {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (4, 14)),
            e => panic!("{e}"),
        }
        let text = "market one-to-one\n";
        match parse_market(text).unwrap_err() {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (1, 8)),
            e => panic!("{e}"),
        }
        let text =
            "# header comment\n\nmarket many-to-one\nfirms: f1\nworkers: w1\npref f1: {w1} {}\n";
        match parse_market(text).unwrap_err() {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (6, 15)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn semantic_errors_come_from_market_construction() {
        let text = "market many-to-one\nfirms: f1\nworkers: w1\npref f1: {w1} > {}\n";
        assert!(matches!(
            parse_market(text),
            Err(Error::MissingChoiceEntry { .. })
        ));
        let text = "market many-to-one\nfirms: f1\nworkers: w1\npref f1: {w1} > {}\npref w1: {f1} > {}\npref x: {}\n";
        assert_eq!(
            parse_market(text).unwrap_err(),
            Error::UnknownAgent("x".into())
        );
    }

    #[test]
    fn choice_tables_round_trip() {
        let text = "\
market many-to-many
firms: f1 f2
workers: w1 w2
pref f1: {w1 w2} > {w1} > {w2} > {}
choice f2:
  {} -> {}
  {w1} -> {w1}
  {w2} -> {}
  {w1 w2} -> {w1}
pref w1: {f1 f2} > {f2} > {f1} > {}
pref w2: {f1} > {}
";
        let market = parse_market(text).unwrap();
        assert_eq!(
            market.firm_choice(1).choose(AgentSet::full(2)),
            AgentSet::singleton(0)
        );
        let again = serialize_market(&market);
        assert_eq!(parse_market(&again).unwrap(), market);
        assert_eq!(again, text);
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let text =
            "market many-to-many\nfirms: f1\nworkers: w1\nchoice f1:\n  {} -> {}\npref w1: {} \n";
        assert!(matches!(
            parse_market(text),
            Err(Error::MissingChoiceEntry { .. })
        ));
    }

    #[test]
    fn fixtures_round_trip() {
        for text in [fixtures::EX1, fixtures::EX2, fixtures::M69, fixtures::M69B] {
            let market = parse_market(text).unwrap();
            assert_eq!(parse_market(&serialize_market(&market)).unwrap(), market);
        }
    }

    #[test]
    fn matching_syntax() {
        let m69 = fixtures::m69();
        let mu3 = parse_matching(&m69, "f1:w2 w3; f2:w1 w3; f3:w1 w2").unwrap();
        assert_eq!(mu3, fixtures::mu3());
        let by_workers = parse_matching(&m69, "w1:f2 f3; w2:f1 f3; w3:f1 f2").unwrap();
        assert_eq!(by_workers, mu3);
        assert_eq!(format_matching(&m69, &mu3), "f1:w2 w3; f2:w1 w3; f3:w1 w2");
        assert!(parse_matching(&m69, "-").unwrap().is_empty());
        assert!(parse_matching(&m69, "").unwrap().is_empty());
        assert_eq!(format_matching(&m69, &Matching::empty(3, 3)), "-");
        assert_eq!(
            parse_matching(&m69, "f1:w7").unwrap_err(),
            Error::UnknownAgent("w7".into())
        );
        assert_eq!(
            parse_matching(&m69, "f1:f2").unwrap_err(),
            Error::UnknownAgent("f2".into())
        );
        assert!(matches!(
            parse_matching(&m69, "f1 w2"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn many_to_one_capacity_in_matching_syntax() {
        let market = parse_market(
            "market many-to-one\nfirms: f1 f2\nworkers: w1\npref f1: {w1} > {}\npref f2: {w1} > {}\npref w1: {f1} > {f2} > {}\n",
        )
        .unwrap();
        assert!(matches!(
            parse_matching(&market, "w1:f1 f2"),
            Err(Error::ManyToOneCapacityViolation { .. })
        ));
    }
}
