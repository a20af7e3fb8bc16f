use std::fmt;

use super::schema::{AttributeSchema, ItemCode};
use crate::error::{Error, Result};

/// Per-attribute constraint: a fixed value index or a wildcard (`None`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TargetDefinition {
    constraints: Vec<Option<u32>>,
}

impl TargetDefinition {
    /// The all-wildcard target `G`.
    pub fn global(k: usize) -> Self {
        TargetDefinition { constraints: vec![None; k] }
    }

    pub fn from_constraints(constraints: Vec<Option<u32>>) -> Self {
        TargetDefinition { constraints }
    }

    /// Builds a target fixing exactly the given items.
    ///
    /// Fails if two items share an attribute or an attribute index is out of range.
    pub fn from_items(k: usize, items: &[ItemCode]) -> Result<Self> {
        let mut constraints = vec![None; k];
        for it in items {
            let slot = constraints
                .get_mut(it.attr as usize)
                .ok_or_else(|| Error::InvalidTarget(format!("attribute index {} out of range", it.attr)))?;
            if slot.is_some() {
                return Err(Error::InvalidTarget(format!(
                    "attribute index {} constrained twice",
                    it.attr
                )));
            }
            *slot = Some(it.value);
        }
        Ok(TargetDefinition { constraints })
    }

    /// Parses `attr=value,attr=value`; omitted attributes are wildcards.
    /// An empty string (or `*`) yields the global target.
    pub fn parse(schema: &AttributeSchema, s: &str) -> Result<Self> {
        let s = s.trim();
        let mut constraints = vec![None; schema.k()];
        if s.is_empty() || s == "*" {
            return Ok(TargetDefinition { constraints });
        }
        for part in s.split(',') {
            let item = schema.parse_item(part.trim())?;
            let slot = &mut constraints[item.attr as usize];
            if slot.is_some() {
                return Err(Error::InvalidTarget(format!(
                    "attribute {:?} constrained twice",
                    schema.attr_name(item.attr as usize)
                )));
            }
            *slot = Some(item.value);
        }
        Ok(TargetDefinition { constraints })
    }

    pub fn k(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Option<u32>] {
        &self.constraints
    }

    pub fn constraint(&self, attr: usize) -> Option<u32> {
        self.constraints[attr]
    }

    /// Fixed items in attribute order. This is the itemset the target corresponds to.
    pub fn items(&self) -> Vec<ItemCode> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(a, c)| c.map(|v| ItemCode::new(a as u32, v)))
            .collect()
    }

    pub fn arity(&self) -> usize {
        self.constraints.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_global(&self) -> bool {
        self.arity() == 0
    }

    /// True iff every non-wildcard position matches `values` (one value index per attribute).
    pub fn matches(&self, values: &[u32]) -> bool {
        self.constraints
            .iter()
            .zip(values)
            .all(|(c, v)| c.is_none_or(|want| want == *v))
    }

    pub fn relax(&self, attr: usize) -> Self {
        let mut t = self.clone();
        t.constraints[attr] = None;
        t
    }

    pub fn render(&self, schema: &AttributeSchema) -> String {
        if self.is_global() {
            return "*".to_string();
        }
        self.items()
            .into_iter()
            .map(|it| schema.render_item(it))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for TargetDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .constraints
            .iter()
            .map(|c| c.map_or_else(|| "*".to_string(), |v| v.to_string()))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}
