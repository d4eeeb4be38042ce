//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. `include = <path>` splices
//! another file (relative to the including one) and `include = preset:<name>`
//! splices a builtin function preset. Keys may be prefixed with a verb name
//! (`search.n_to = 50000`) to apply to that verb only.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hardy_core::lexpr::{EvalConfig, GrowthClass, LEFunction};
use hardy_core::SearchBudget;

pub const PRESETS: [(&str, &str); 4] = [
    ("x5_2", "function = x^(5/2)\ngrowth = super:3\nM = 6\n"),
    ("sqrt2x2", "function = sqrt(2)*x^2\ngrowth = exact:3:1.4142135623730951\nD = 800\n"),
    ("x3_2", "function = x^(3/2)\ngrowth = near\nM = 8\n"),
    ("x2_3", "function = x^(2/3)\ngrowth = sub:1/2\n"),
];

pub fn preset(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| anyhow!("unknown preset '{name}' (known: {})", PRESETS.map(|p| p.0).join(", ")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything a verb needs, after merging config files and flags.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub function_text: Option<String>,
    pub growth: Option<GrowthClass>,
    pub precision_cap_bits: u32,
    pub budget: SearchBudget,
    pub format: Format,
    pub seed: u64,
    pub threads: usize,
    /// Default range of unbounded formula quantifiers.
    pub bound: i64,
    pub closed: bool,
    /// Scale for the exactly-polynomial multiplication predicate.
    pub big_d: Option<i64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            function_text: None,
            growth: None,
            precision_cap_bits: 4096,
            budget: SearchBudget::default(),
            format: Format::Text,
            seed: 0,
            threads: 1,
            bound: 1000,
            closed: false,
            big_d: None,
        }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let int = || v.parse::<i64>().with_context(|| format!("{key}: expected an integer, got '{v}'"));
        match key {
            "function" => self.function_text = Some(v.to_string()),
            "growth" => self.growth = Some(v.parse().map_err(|e| anyhow!("{key}: {e}"))?),
            "precision_cap" => self.precision_cap_bits = int()?.try_into().context("precision_cap out of range")?,
            "n_from" => self.budget.n_from = int()?,
            "n_to" => self.budget.n_to = int()?,
            "M" => self.budget.m = Some(int()?.try_into().context("M must be non-negative")?),
            "budget" => self.budget.candidate_cap = int()?.try_into().context("budget must be positive")?,
            "wall_clock" => self.budget.wall_clock_cap = Some(v.parse().with_context(|| format!("{key}: bad number"))?),
            "format" => {
                self.format = <Format as clap::ValueEnum>::from_str(v, true).map_err(|e| anyhow!("{key}: {e}"))?
            }
            "seed" => self.seed = v.parse().with_context(|| format!("{key}: bad seed"))?,
            "threads" => self.threads = v.parse().with_context(|| format!("{key}: bad thread count"))?,
            "bound" => self.bound = int()?,
            "closed" => self.closed = v.parse().with_context(|| format!("{key}: expected true or false"))?,
            "D" => self.big_d = Some(int()?),
            _ => bail!("unknown config key '{key}'"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_cap_bits < 64 {
            bail!("precision cap must be at least 64 bits, got {}", self.precision_cap_bits);
        }
        if self.threads == 0 {
            bail!("threads must be positive");
        }
        self.budget.validate()?;
        Ok(())
    }

    pub fn function(&self) -> Result<LEFunction> {
        let text = self.function_text.as_deref().ok_or_else(|| anyhow!("no function given (use --function or --preset)"))?;
        let f = LEFunction::parse(text)?;
        let cfg = EvalConfig { max_bits: self.precision_cap_bits, ..*f.config() };
        Ok(f.with_eval_config(cfg))
    }
}

/// Parsed `(key, value)` pairs in file order, includes expanded.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    read_into(path, &mut out, &mut stack)?;
    Ok(out)
}

pub fn parse_text(text: &str, origin: &str, base: Option<&Path>, out: &mut Vec<(String, String)>) -> Result<()> {
    let mut stack = Vec::new();
    parse_into(text, origin, base, out, &mut stack)
}

fn read_into(path: &Path, out: &mut Vec<(String, String)>, stack: &mut Vec<PathBuf>) -> Result<()> {
    let canon = path.canonicalize().with_context(|| format!("cannot open config {}", path.display()))?;
    if stack.contains(&canon) {
        bail!("include cycle through {}", path.display());
    }
    let text = std::fs::read_to_string(&canon).with_context(|| format!("cannot read {}", path.display()))?;
    stack.push(canon.clone());
    parse_into(&text, &path.display().to_string(), canon.parent(), out, stack)?;
    stack.pop();
    Ok(())
}

fn parse_into(
    text: &str,
    origin: &str,
    base: Option<&Path>,
    out: &mut Vec<(String, String)>,
    stack: &mut Vec<PathBuf>,
) -> Result<()> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("{origin}:{}: expected 'key = value'", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "include" {
            if let Some(name) = v.strip_prefix("preset:") {
                parse_into(preset(name)?, &format!("preset:{name}"), None, out, stack)?;
            } else {
                let p = match base {
                    Some(b) => b.join(v),
                    None => PathBuf::from(v),
                };
                read_into(&p, out, stack)?;
            }
        } else {
            out.push((k.to_string(), v.to_string()));
        }
    }
    Ok(())
}

/// Apply pairs for `verb`: unprefixed keys first, then `verb.`-prefixed ones.
pub fn apply(cfg: &mut RunConfig, pairs: &[(String, String)], verb: &str) -> Result<()> {
    for (k, v) in pairs.iter().filter(|(k, _)| !k.contains('.')) {
        cfg.set(k, v)?;
    }
    let prefix = format!("{verb}.");
    for (k, v) in pairs {
        if let Some(rest) = k.strip_prefix(&prefix) {
            cfg.set(rest, v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            let mut pairs = Vec::new();
            parse_text(&format!("include = preset:{name}"), "t", None, &mut pairs).unwrap();
            let mut c = RunConfig::default();
            apply(&mut c, &pairs, "eval").unwrap();
            c.function().unwrap();
            assert!(c.growth.is_some());
        }
    }

    #[test]
    fn verb_prefixes_override() {
        let mut pairs = Vec::new();
        parse_text("n_to = 10\nsearch.n_to = 20 # scan further\n", "t", None, &mut pairs).unwrap();
        let mut c = RunConfig::default();
        apply(&mut c, &pairs, "search").unwrap();
        assert_eq!(c.budget.n_to, 20);
        let mut c = RunConfig::default();
        apply(&mut c, &pairs, "mult").unwrap();
        assert_eq!(c.budget.n_to, 10);
    }

    #[test]
    fn bad_lines_are_rejected() {
        let mut pairs = Vec::new();
        assert!(parse_text("nonsense", "t", None, &mut pairs).is_err());
        let mut c = RunConfig::default();
        assert!(c.set("colour", "blue").is_err());
        c.set("precision_cap", "32").unwrap();
        assert!(c.validate().is_err());
    }
}
