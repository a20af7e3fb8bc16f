use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// One categorical item: a value of one attribute.
///
/// Items order first by attribute, then by value; miners rely on this order
/// when generating candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemCode {
    pub attr: u32,
    pub value: u32,
}

impl ItemCode {
    pub fn new(attr: u32, value: u32) -> Self {
        ItemCode { attr, value }
    }
}

impl fmt::Display for ItemCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.attr, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
}

/// Ordered attributes with ordered value labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    attributes: Vec<Attribute>,
    name_index: HashMap<String, usize>,
    value_index: Vec<HashMap<String, u32>>,
}

/// Characters that would break one of the text formats (CSV, FIS store, target strings).
const RESERVED: &[char] = &[',', ';', '=', '\t', '\n', '\r'];

fn check_label(kind: &str, label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::InvalidSchema(format!("empty {kind} label")));
    }
    if let Some(c) = label.chars().find(|c| RESERVED.contains(c)) {
        return Err(Error::InvalidSchema(format!(
            "{kind} label {label:?} contains reserved character {c:?}"
        )));
    }
    Ok(())
}

impl AttributeSchema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::InvalidSchema("at least one attribute required".into()));
        }
        let mut name_index = HashMap::with_capacity(attributes.len());
        let mut value_index = Vec::with_capacity(attributes.len());
        for (i, attr) in attributes.iter().enumerate() {
            check_label("attribute", &attr.name)?;
            if name_index.insert(attr.name.clone(), i).is_some() {
                return Err(Error::InvalidSchema(format!("duplicate attribute {:?}", attr.name)));
            }
            if attr.values.is_empty() {
                return Err(Error::InvalidSchema(format!("attribute {:?} has no values", attr.name)));
            }
            let mut vi = HashMap::with_capacity(attr.values.len());
            for (j, v) in attr.values.iter().enumerate() {
                check_label("value", v)?;
                if vi.insert(v.clone(), j as u32).is_some() {
                    return Err(Error::InvalidSchema(format!(
                        "duplicate value {v:?} in attribute {:?}",
                        attr.name
                    )));
                }
            }
            value_index.push(vi);
        }
        Ok(AttributeSchema { attributes, name_index, value_index })
    }

    /// Convenience constructor from `(name, [values])` pairs.
    pub fn from_pairs<N, V, I>(pairs: I) -> Result<Self>
    where
        N: Into<String>,
        V: Into<String>,
        I: IntoIterator<Item = (N, Vec<V>)>,
    {
        let attributes = pairs
            .into_iter()
            .map(|(n, vs)| Attribute {
                name: n.into(),
                values: vs.into_iter().map(Into::into).collect(),
            })
            .collect();
        Self::new(attributes)
    }

    /// Attribute count `k`.
    pub fn k(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attr_name(&self, attr: usize) -> &str {
        &self.attributes[attr].name
    }

    pub fn value_label(&self, item: ItemCode) -> &str {
        &self.attributes[item.attr as usize].values[item.value as usize]
    }

    pub fn cardinality(&self, attr: usize) -> usize {
        self.attributes[attr].values.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(|a| a.values.len()).collect()
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn value_code(&self, attr: usize, label: &str) -> Option<u32> {
        self.value_index[attr].get(label).copied()
    }

    pub fn is_valid(&self, item: ItemCode) -> bool {
        (item.attr as usize) < self.k() && (item.value as usize) < self.cardinality(item.attr as usize)
    }

    /// Resolves `attr=value` to an item code.
    pub fn item(&self, attr_name: &str, value: &str) -> Result<ItemCode> {
        let a = self
            .attr_index(attr_name)
            .ok_or_else(|| Error::InvalidTarget(format!("unknown attribute {attr_name:?}")))?;
        let v = self.value_code(a, value).ok_or_else(|| {
            Error::InvalidTarget(format!("unknown value {value:?} for attribute {attr_name:?}"))
        })?;
        Ok(ItemCode::new(a as u32, v))
    }

    /// Renders an item as `attrname=value`.
    pub fn render_item(&self, item: ItemCode) -> String {
        format!("{}={}", self.attr_name(item.attr as usize), self.value_label(item))
    }

    /// Parses `attrname=value`.
    pub fn parse_item(&self, s: &str) -> Result<ItemCode> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidTarget(format!("expected attr=value, got {s:?}")))?;
        self.item(name.trim(), value.trim())
    }

    /// Size of the brute-force search space: product of `(|V_l| + 1)`.
    pub fn search_space(&self) -> u128 {
        self.attributes.iter().map(|a| a.values.len() as u128 + 1).product()
    }
}
