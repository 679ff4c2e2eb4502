//! Experiment configuration: a flat `key = value` map merged from an
//! optional config file and command-line flags, validated per subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use persistence_core::increments::SPEC_KEYS;
use persistence_core::{kv, IncrementSpec};

use crate::Failure;

const COMMON: &[&str] = &["command", "version", "seed", "shards", "output", "assert"];
const SAMPLED: &[&str] = &["samples"];

/// Keys accepted by a subcommand besides the common ones.
pub fn keys_for(command: &str) -> Option<Vec<&'static str>> {
    let spec = SPEC_KEYS.iter().copied();
    let mut keys: Vec<&'static str> = match command {
        "exact-p" => spec.chain(["n", "grid", "budget"]).collect(),
        "exact-bridge" => spec.chain(["n", "grid"]).collect(),
        "enumerate" => spec.chain(["n"]).collect(),
        "cycle-law" | "symmetry-audit" => spec.chain(["horizon", "convention"]).collect(),
        "spitzer" => spec.chain(["probs", "n", "mode"]).collect(),
        "series-diagnostic" => spec.chain(["n"]).collect(),
        "prop2" => vec!["bspec", "n"],
        "corollary-check" | "key-identity" => spec.chain(["n", "cap"]).chain(SAMPLED.iter().copied()).collect(),
        "mc-p" => spec.chain(["n", "grid"]).chain(SAMPLED.iter().copied()).collect(),
        "mc-cycle-tail" => spec.chain(["n", "grid", "cap"]).chain(SAMPLED.iter().copied()).collect(),
        "eta-scaling" => spec.chain(["n"]).chain(SAMPLED.iter().copied()).collect(),
        "positivity-limit" => spec.chain(["n", "tolerance"]).chain(SAMPLED.iter().copied()).collect(),
        "fit-exponent" => vec!["input"],
        "estimate-constant" => vec!["input", "alpha", "slope_tolerance"],
        "scaling-report" => spec.chain(["grid", "exact", "slope_tolerance"]).chain(SAMPLED.iter().copied()).collect(),
        _ => return None,
    };
    keys.extend_from_slice(COMMON);
    Some(keys)
}

pub const SEED_VAR: &str = "PERSISTLAB_SEED";

/// Resolved configuration of one run.
#[derive(Debug, Clone)]
pub struct Config {
    pub command: String,
    pub map: BTreeMap<String, String>,
}

impl Config {
    /// Merges `file` (if any) with `flags`; flags win. `command` may be empty
    /// when the file names it.
    pub fn resolve(command: Option<&str>, file: Option<&Path>, flags: Vec<(&str, String)>) -> Result<Self, Failure> {
        let mut map = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
                kv::parse(&text).map_err(Failure::from)?
            }
            None => BTreeMap::new(),
        };
        for (k, v) in flags {
            map.insert(k.to_string(), v);
        }
        let command = match (command, map.get("command")) {
            (Some(c), Some(f)) if c != f => {
                return Err(Failure::config(format!("config is for {f:?}, not {c:?}")));
            }
            (Some(c), _) => c.to_string(),
            (None, Some(f)) => f.clone(),
            (None, None) => return Err(Failure::config("no command given and the config has no `command` key")),
        };
        let allowed = keys_for(&command).ok_or_else(|| Failure::config(format!("unknown command {command:?}")))?;
        kv::check_keys(&map, &allowed).map_err(|e| Failure::config(format!("{command}: {e}")))?;
        map.insert("command".into(), command.clone());
        map.insert("version".into(), persistence_core::VERSION.into());
        if !map.contains_key("seed") {
            let seed = match std::env::var(SEED_VAR) {
                Ok(v) => v,
                Err(_) => "0".into(),
            };
            map.insert("seed".into(), seed);
        }
        map.entry("shards".into()).or_insert_with(|| "1".into());
        map.entry("output".into()).or_insert_with(|| format!("{command}.csv"));
        let cfg = Config { command, map };
        cfg.seed()?;
        cfg.shards()?;
        cfg.asserting()?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, Failure> {
        self.get(key).ok_or_else(|| Failure::config(format!("{}: missing key {key:?}", self.command)))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, Failure> {
        match self.get(key) {
            Some(v) => kv::parse_u64(key, v).map_err(Failure::from),
            None => Ok(default),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, Failure> {
        Ok(kv::parse_u64(key, self.require(key)?).map_err(Failure::from)? as usize)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, Failure> {
        match self.get(key) {
            Some(v) => kv::parse_f64(key, v).map_err(Failure::from),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, Failure> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Failure::config(format!("key {key:?}: {v:?} is not a boolean"))),
        }
    }

    pub fn seed(&self) -> Result<u64, Failure> {
        kv::parse_u64("seed", self.require("seed")?).map_err(Failure::from)
    }

    pub fn shards(&self) -> Result<usize, Failure> {
        let s = kv::parse_u64("shards", self.require("shards")?).map_err(Failure::from)?;
        if s == 0 {
            return Err(Failure::config("shards must be positive"));
        }
        Ok(s as usize)
    }

    /// Assertions are on unless `assert = false`.
    pub fn asserting(&self) -> Result<bool, Failure> {
        self.bool_or("assert", true)
    }

    /// Either `grid` or a single `n`.
    pub fn grid(&self) -> Result<Vec<usize>, Failure> {
        match (self.get("grid"), self.get("n")) {
            (Some(_), Some(_)) => Err(Failure::config("give either `n` or `grid`, not both")),
            (Some(g), None) => parse_grid(g),
            (None, Some(_)) => Ok(vec![self.usize("n")?]),
            (None, None) => Err(Failure::config(format!("{}: missing key \"n\" or \"grid\"", self.command))),
        }
    }

    pub fn output(&self) -> PathBuf {
        PathBuf::from(self.get("output").unwrap_or_default())
    }

    /// Spec keys present in the config, with family shorthands expanded.
    pub fn spec(&self) -> Result<(String, IncrementSpec), Failure> {
        let family = self.require("family")?.to_string();
        let mut map: BTreeMap<String, String> = self
            .map
            .iter()
            .filter(|(k, _)| SPEC_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let spec = match family.as_str() {
            "geometric" => IncrementSpec::geometric_right_continuous(),
            "laplace" => {
                map.entry("rate".into()).or_insert_with(|| "1".into());
                IncrementSpec::from_map(&map).map_err(Failure::from)?
            }
            _ => IncrementSpec::from_map(&map).map_err(Failure::from)?,
        };
        Ok((family, spec))
    }

    pub fn manifest(&self) -> String {
        kv::render(self.map.iter().map(|(k, v)| (k.as_str(), v.clone())))
    }
}

/// `16,32,64` or `geom:lo:hi:count` (rounded geometric spacing).
pub fn parse_grid(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::config(format!("bad grid {text:?}"));
    let grid: Vec<usize> = if let Some(rest) = text.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, count] = parts[..] else { return Err(bad()) };
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if count < 2 || lo < 1.0 || hi <= lo {
            return Err(bad());
        }
        (0..count).map(|i| (lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).round() as usize).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::config(format!("grid {text:?} is not strictly increasing")));
    }
    Ok(grid)
}
