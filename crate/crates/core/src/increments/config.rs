//! Text form of increment specs.
//!
//! ```text
//! family = right-continuous
//! up_prob = 2/3
//! neg_head = 0/1
//! neg_tail_first = 1/6
//! neg_tail_ratio = 1/2
//! ```
//!
//! Rationals are written `num/den`, reals in shortest round-trip form,
//! `neg_head` as a comma-separated list starting at `P(S_1 = 0)`.

use std::collections::BTreeMap;

use super::{Family, GeometricTail, NegativeLattice, NegativePart};
use crate::error::{Error, Result};
use crate::kv;
use crate::rational::{self, Rational};

pub const SPEC_KEYS: &[&str] = &[
    "family",
    "stay_prob",
    "up_prob",
    "neg_head",
    "neg_tail_first",
    "neg_tail_ratio",
    "pos_prob",
    "rate",
    "neg_law",
    "neg_rate",
    "neg_width",
    "alpha",
    "k0",
];

pub(super) fn render(family: &Family) -> String {
    let mut e: Vec<(&str, String)> = vec![("family", family.name().to_string())];
    match family {
        Family::SimpleWalk => {}
        Family::LazySimpleWalk { stay } => e.push(("stay_prob", rational::format(stay))),
        Family::RightContinuousLattice { up, neg } => {
            e.push(("up_prob", rational::format(up)));
            let head: Vec<String> = neg.head.iter().map(rational::format).collect();
            e.push(("neg_head", head.join(", ")));
            if let Some(t) = &neg.tail {
                e.push(("neg_tail_first", rational::format(&t.first)));
                e.push(("neg_tail_ratio", rational::format(&t.ratio)));
            }
        }
        Family::RightExponential { pos_prob, rate, neg } => {
            e.push(("pos_prob", pos_prob.to_string()));
            e.push(("rate", rate.to_string()));
            match neg {
                NegativePart::Exponential { rate } => {
                    e.push(("neg_law", "exponential".into()));
                    e.push(("neg_rate", rate.to_string()));
                }
                NegativePart::Uniform { width } => {
                    e.push(("neg_law", "uniform".into()));
                    e.push(("neg_width", width.to_string()));
                }
            }
        }
        Family::HeavyTailRightContinuous { alpha, k0 } => {
            e.push(("alpha", alpha.to_string()));
            e.push(("k0", k0.to_string()));
        }
    }
    kv::render(e)
}

fn get_rational(map: &BTreeMap<String, String>, key: &str) -> Result<Rational> {
    rational::parse(kv::require(map, key)?)
}

fn get_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    kv::parse_f64(key, kv::require(map, key)?)
}

/// Reads a family from already-parsed keys. Keys unrelated to the chosen
/// family are ignored here; callers reject unknown keys.
pub(super) fn family_from_map(map: &BTreeMap<String, String>) -> Result<Family> {
    let family = kv::require(map, "family")?;
    Ok(match family {
        "simple" => Family::SimpleWalk,
        "lazy" => Family::LazySimpleWalk { stay: get_rational(map, "stay_prob")? },
        "right-continuous" => {
            let head = match map.get("neg_head") {
                Some(list) if !list.trim().is_empty() => {
                    list.split(',').map(rational::parse).collect::<Result<Vec<_>>>()?
                }
                _ => Vec::new(),
            };
            let tail = match (map.get("neg_tail_first"), map.get("neg_tail_ratio")) {
                (Some(f), Some(r)) => Some(GeometricTail { first: rational::parse(f)?, ratio: rational::parse(r)? }),
                (None, None) => None,
                _ => return Err(Error::Parse("neg_tail_first and neg_tail_ratio must be given together".into())),
            };
            Family::RightContinuousLattice { up: get_rational(map, "up_prob")?, neg: NegativeLattice { head, tail } }
        }
        "right-exponential" | "laplace" => {
            let rate = get_f64(map, "rate")?;
            let neg = match map.get("neg_law").map(String::as_str).unwrap_or("exponential") {
                "exponential" => NegativePart::Exponential {
                    rate: match map.get("neg_rate") {
                        Some(v) => kv::parse_f64("neg_rate", v)?,
                        None => rate,
                    },
                },
                "uniform" => NegativePart::Uniform { width: get_f64(map, "neg_width")? },
                other => return Err(Error::Parse(format!("unknown neg_law {other:?}"))),
            };
            let pos_prob = match map.get("pos_prob") {
                Some(v) => kv::parse_f64("pos_prob", v)?,
                None => 0.5,
            };
            Family::RightExponential { pos_prob, rate, neg }
        }
        "heavy-tail" => Family::HeavyTailRightContinuous {
            alpha: get_f64(map, "alpha")?,
            k0: match map.get("k0") {
                Some(v) => kv::parse_u64("k0", v)?,
                None => 1,
            },
        },
        other => return Err(Error::Parse(format!("unknown family {other:?}"))),
    })
}
