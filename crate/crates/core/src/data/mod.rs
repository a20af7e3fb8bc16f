//! Event-log data model: schema, item encoding, targets, windows and counting.

mod log;
mod schema;
mod series;
mod target;
mod window;

pub use log::{LogView, SchemaMode, Transaction, TransactionLog};
pub use schema::{Attribute, AttributeSchema, ItemCode};
pub use series::HourlySeries;
pub use target::TargetDefinition;
pub use window::{hour_of, TimeWindow, DAY, HOUR};

/// True iff every non-wildcard position of `target` matches the transaction.
pub fn satisfies(d: &Transaction, target: &TargetDefinition) -> bool {
    d.items.len() == target.k()
        && d.items
            .iter()
            .zip(target.constraints())
            .all(|(it, c)| c.is_none_or(|v| v == it.value))
}
