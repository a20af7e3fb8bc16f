//! FIS store file: `attr=value;attr=value<TAB>support` per line, lines
//! sorted lexicographically (bytewise).

use std::fs;
use std::path::Path;

use super::{FISRecord, Itemset};
use crate::data::AttributeSchema;
use crate::error::{Error, Result};

pub fn render_fis(records: &[FISRecord], schema: &AttributeSchema) -> String {
    let mut lines: Vec<String> =
        records.iter().map(|r| format!("{}\t{}", r.itemset.render(schema), r.support)).collect();
    lines.sort_unstable();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

pub fn write_fis(path: impl AsRef<Path>, records: &[FISRecord], schema: &AttributeSchema) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_fis(records, schema)).map_err(|e| Error::io(path, e))
}

pub fn parse_fis(text: &str, schema: &AttributeSchema) -> Result<Vec<FISRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::StoreFormat { line: i + 1, msg };
        let (items, support) = line.split_once('\t').ok_or_else(|| bad("missing TAB separator".into()))?;
        let support: u64 = support.trim().parse().map_err(|_| bad(format!("bad support {support:?}")))?;
        let codes = items
            .split(';')
            .map(|s| schema.parse_item(s).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let itemset = Itemset::new(codes);
        if itemset.is_empty() {
            return Err(bad("empty itemset".into()));
        }
        out.push(FISRecord { itemset, support });
    }
    out.sort_unstable_by(|a, b| a.itemset.cmp(&b.itemset));
    Ok(out)
}

pub fn read_fis(path: impl AsRef<Path>, schema: &AttributeSchema) -> Result<Vec<FISRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fis(&text, schema)
}
