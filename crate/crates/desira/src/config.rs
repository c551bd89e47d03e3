//! Plain-text configuration documents.
//!
//! The format is flat key-value lines under `[section]` headers, with `#`
//! comments. Desirability transforms are declared inline as
//! `[desirability.<name>]` sections (variant name plus parameters), the
//! same format [`write_desirability`] emits.
//!
//! ```text
//! [desirability.conversion]
//! kind = max
//! low = 80
//! high = 97
//!
//! [sbo]
//! objective = chemical
//! bounds = -1.7:1.7 -1.7:1.7 -1.7:1.7
//! seed = 126
//! ```

use std::collections::BTreeMap;
use std::io::Write;

use crate::desirability::{Desirability, MissingPolicy, Transform};
use crate::error::{Error, Result};
use crate::io::fmt_full;

/// One parsed `[section]` with its entries and source lines.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    pub fn line_of(&self, key: &str) -> usize {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, _, l)| *l)
            .unwrap_or(self.line)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            Error::config(
                self.line,
                format!("section [{}] is missing key `{key}`", self.name),
            )
        })
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    Error::config(self.line_of(key), format!("`{key}` is not a number: `{v}`"))
                })
            })
            .transpose()
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.require(key)?;
        Ok(self.get_f64(key)?.expect("checked presence"))
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    Error::config(
                        self.line_of(key),
                        format!("`{key}` is not a non-negative integer: `{v}`"),
                    )
                })
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| {
                    Error::config(
                        self.line_of(key),
                        format!("`{key}` is not a non-negative integer: `{v}`"),
                    )
                })
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::config(
                    self.line_of(key),
                    format!("`{key}` is not a boolean: `{v}`"),
                )),
            })
            .transpose()
    }

    /// Whitespace-separated float list.
    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split_whitespace()
                    .map(|cell| {
                        cell.parse::<f64>().map_err(|_| {
                            Error::config(
                                self.line_of(key),
                                format!("`{key}` contains a non-number: `{cell}`"),
                            )
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// Whitespace-separated `low:high` pairs.
    pub fn get_bounds(&self, key: &str) -> Result<Option<Vec<(f64, f64)>>> {
        let Some(raw) = self.get(key) else {
            return Ok(None);
        };
        let line = self.line_of(key);
        let mut out = Vec::new();
        for pair in raw.split_whitespace() {
            let (lo, hi) = pair.split_once(':').ok_or_else(|| {
                Error::config(
                    line,
                    format!("`{key}` entries must be `low:high`, got `{pair}`"),
                )
            })?;
            let lo: f64 = lo.parse().map_err(|_| {
                Error::config(line, format!("`{key}` has a non-numeric bound `{lo}`"))
            })?;
            let hi: f64 = hi.parse().map_err(|_| {
                Error::config(line, format!("`{key}` has a non-numeric bound `{hi}`"))
            })?;
            out.push((lo, hi));
        }
        if out.is_empty() {
            return Err(Error::config(line, format!("`{key}` lists no bounds")));
        }
        Ok(Some(out))
    }

    fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _, _)| k.as_str())
    }
}

/// A parsed configuration document.
#[derive(Debug, Clone, Default)]
pub struct ConfigDoc {
    sections: Vec<Section>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let name = header.strip_suffix(']').ok_or_else(|| {
                    Error::config(lineno, "unterminated section header".to_string())
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::config(lineno, "empty section name".to_string()));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(Error::config(lineno, format!("duplicate section [{name}]")));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line: lineno,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(lineno, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::config(lineno, "empty key".to_string()));
            }
            let section = sections.last_mut().ok_or_else(|| {
                Error::config(lineno, "entry before any [section] header".to_string())
            })?;
            if section.get(&key).is_some() {
                return Err(Error::config(
                    lineno,
                    format!("duplicate key `{key}` in section [{}]", section.name),
                ));
            }
            section.entries.push((key, value, lineno));
        }
        Ok(ConfigDoc { sections })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require_section(&self, name: &str) -> Result<&Section> {
        self.section(name)
            .ok_or_else(|| Error::config(0, format!("missing section [{name}]")))
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    /// Resolve a `[desirability.<name>]` section into a transform.
    pub fn desirability(&self, name: &str) -> Result<Desirability> {
        let section = self
            .section(&format!("desirability.{name}"))
            .ok_or_else(|| Error::config(0, format!("no desirability spec named `{name}`")))?;
        desirability_from_section(section)
    }
}

const MAX_KEYS: &[&str] = &["kind", "low", "high", "scale", "tol", "missing"];
const TARGET_KEYS: &[&str] = &[
    "kind",
    "low",
    "target",
    "high",
    "low_scale",
    "high_scale",
    "tol",
    "missing",
];
const ARB_KEYS: &[&str] = &["kind", "x", "d", "tol", "missing"];
const BOX_KEYS: &[&str] = &["kind", "low", "high", "tol", "missing"];
const CATEGORICAL_KEYS: &[&str] = &["kind", "categories", "tol", "missing"];

/// Build a desirability transform from one config section.
pub fn desirability_from_section(section: &Section) -> Result<Desirability> {
    let kind = section.require("kind")?.to_string();
    let allowed = match kind.as_str() {
        "max" | "min" => MAX_KEYS,
        "target" => TARGET_KEYS,
        "arb" => ARB_KEYS,
        "box" => BOX_KEYS,
        "categorical" => CATEGORICAL_KEYS,
        other => {
            return Err(Error::config(
                section.line_of("kind"),
                format!("unknown desirability kind `{other}`"),
            ))
        }
    };
    for key in section.keys() {
        if !allowed.contains(&key) {
            return Err(Error::config(
                section.line_of(key),
                format!("key `{key}` is not valid for kind `{kind}`"),
            ));
        }
    }

    let lift = |r: Result<Desirability>| r.map_err(|e| Error::config(section.line, e.to_string()));
    let mut spec = match kind.as_str() {
        "max" => lift(Desirability::max_with_scale(
            section.require_f64("low")?,
            section.require_f64("high")?,
            section.get_f64("scale")?.unwrap_or(1.0),
        ))?,
        "min" => lift(Desirability::min_with_scale(
            section.require_f64("low")?,
            section.require_f64("high")?,
            section.get_f64("scale")?.unwrap_or(1.0),
        ))?,
        "target" => lift(Desirability::target_with_scales(
            section.require_f64("low")?,
            section.require_f64("target")?,
            section.require_f64("high")?,
            section.get_f64("low_scale")?.unwrap_or(1.0),
            section.get_f64("high_scale")?.unwrap_or(1.0),
        ))?,
        "arb" => {
            let x = section
                .get_f64_list("x")?
                .ok_or_else(|| Error::config(section.line, "arb needs `x`".to_string()))?;
            let d = section
                .get_f64_list("d")?
                .ok_or_else(|| Error::config(section.line, "arb needs `d`".to_string()))?;
            lift(Desirability::arbitrary(x, d))?
        }
        "box" => lift(Desirability::box_constraint(
            section.require_f64("low")?,
            section.require_f64("high")?,
        ))?,
        "categorical" => {
            let raw = section.require("categories")?;
            let line = section.line_of("categories");
            let mut map = BTreeMap::new();
            for item in raw.split_whitespace() {
                let (label, value) = item.split_once(':').ok_or_else(|| {
                    Error::config(
                        line,
                        format!("categories must be `label:value`, got `{item}`"),
                    )
                })?;
                let value: f64 = value.parse().map_err(|_| {
                    Error::config(line, format!("category `{label}` has a bad value"))
                })?;
                map.insert(label.to_string(), value);
            }
            lift(Desirability::categorical(map))?
        }
        _ => unreachable!(),
    };

    if let Some(tol) = section.get_f64("tol")? {
        spec = spec
            .with_tol(tol)
            .map_err(|e| Error::config(section.line_of("tol"), e.to_string()))?;
    }
    if let Some(missing) = section.get("missing") {
        if missing == "propagate" {
            spec = spec.with_missing_propagated();
        } else {
            let value: f64 = missing.parse().map_err(|_| {
                Error::config(
                    section.line_of("missing"),
                    "`missing` must be a number or `propagate`".to_string(),
                )
            })?;
            spec = spec
                .with_missing(value)
                .map_err(|e| Error::config(section.line_of("missing"), e.to_string()))?;
        }
    }
    Ok(spec)
}

/// Serialize a desirability transform as a `[desirability.<name>]`
/// section in the same format the parser reads.
pub fn write_desirability(
    w: &mut impl Write,
    name: &str,
    spec: &Desirability,
) -> std::io::Result<()> {
    writeln!(w, "[desirability.{name}]")?;
    match spec.transform() {
        Transform::Max { low, high, scale } => {
            writeln!(w, "kind = max")?;
            writeln!(w, "low = {}", fmt_full(*low))?;
            writeln!(w, "high = {}", fmt_full(*high))?;
            writeln!(w, "scale = {}", fmt_full(*scale))?;
        }
        Transform::Min { low, high, scale } => {
            writeln!(w, "kind = min")?;
            writeln!(w, "low = {}", fmt_full(*low))?;
            writeln!(w, "high = {}", fmt_full(*high))?;
            writeln!(w, "scale = {}", fmt_full(*scale))?;
        }
        Transform::Target {
            low,
            target,
            high,
            low_scale,
            high_scale,
        } => {
            writeln!(w, "kind = target")?;
            writeln!(w, "low = {}", fmt_full(*low))?;
            writeln!(w, "target = {}", fmt_full(*target))?;
            writeln!(w, "high = {}", fmt_full(*high))?;
            writeln!(w, "low_scale = {}", fmt_full(*low_scale))?;
            writeln!(w, "high_scale = {}", fmt_full(*high_scale))?;
        }
        Transform::Arb { x, d } => {
            writeln!(w, "kind = arb")?;
            let xs: Vec<String> = x.iter().map(|v| fmt_full(*v)).collect();
            let ds: Vec<String> = d.iter().map(|v| fmt_full(*v)).collect();
            writeln!(w, "x = {}", xs.join(" "))?;
            writeln!(w, "d = {}", ds.join(" "))?;
        }
        Transform::Box { low, high } => {
            writeln!(w, "kind = box")?;
            writeln!(w, "low = {}", fmt_full(*low))?;
            writeln!(w, "high = {}", fmt_full(*high))?;
        }
        Transform::Categorical(map) => {
            writeln!(w, "kind = categorical")?;
            let items: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{k}:{}", fmt_full(*v)))
                .collect();
            writeln!(w, "categories = {}", items.join(" "))?;
        }
    }
    if let Some(tol) = spec.tol() {
        writeln!(w, "tol = {}", fmt_full(tol))?;
    }
    match spec.missing_policy() {
        MissingPolicy::Propagate => writeln!(w, "missing = propagate")?,
        MissingPolicy::Substitute(v) => {
            // only written when it differs from the derived default
            if v != spec.non_informative() {
                writeln!(w, "missing = {}", fmt_full(v))?;
            }
        }
    }
    Ok(())
}
