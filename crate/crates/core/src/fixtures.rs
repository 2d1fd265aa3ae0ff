//! Small hand-built markets and matchings that exercise each notion.
//!
//! * `EX1`: one firm that rejects its only worker, who wants the firm.
//! * `EX2`: the mirror image, where the worker rejects the firm.
//! * `M69`: a 3×3 many-to-many market with pairwise rankings.
//! * `M69B`: `M69` with `f3` and every worker ranking the full triple first.

use crate::format::parse_market;
use crate::model::{make_matching, Market, Matching};

pub const EX1: &str = include_str!("../fixtures/ex1.market");
pub const EX2: &str = include_str!("../fixtures/ex2.market");
pub const M69: &str = include_str!("../fixtures/m69.market");
pub const M69B: &str = include_str!("../fixtures/m69b.market");

/// Every fixture file with its name.
pub const ALL: [(&str, &str); 4] = [("ex1", EX1), ("ex2", EX2), ("m69", M69), ("m69b", M69B)];

fn load(text: &str) -> Market {
    parse_market(text).expect("fixture parses")
}

pub fn ex1() -> Market {
    load(EX1)
}

pub fn ex2() -> Market {
    load(EX2)
}

pub fn m69() -> Market {
    load(M69)
}

pub fn m69b() -> Market {
    load(M69B)
}

fn pairs(market: &Market, rows: &[&[usize]]) -> Matching {
    let edges = rows
        .iter()
        .enumerate()
        .flat_map(|(f, ws)| ws.iter().map(move |&w| (f, w)));
    make_matching(market, edges).expect("fixture matching is valid")
}

/// `f` matched to `w` in `EX1`.
pub fn mu1() -> Matching {
    pairs(&ex1(), &[&[0]])
}

/// `f` matched to `w` in `EX2`.
pub fn mu2() -> Matching {
    pairs(&ex2(), &[&[0]])
}

/// In `M69`: f1 with w2 w3, f2 with w1 w3, f3 with w1 w2.
pub fn mu3() -> Matching {
    pairs(&m69(), &[&[1, 2], &[0, 2], &[0, 1]])
}

/// In `M69B`: as `mu3` but f3 also takes w3.
pub fn mu4() -> Matching {
    pairs(&m69b(), &[&[1, 2], &[0, 2], &[0, 1, 2]])
}
