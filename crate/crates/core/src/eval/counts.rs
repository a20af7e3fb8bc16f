use crate::data::{hour_of, LogView, TargetDefinition, TimeWindow};
use crate::error::Result;
use crate::mining::VerticalIndex;

/// Hourly counts of arbitrary targets over one hour-aligned span.
///
/// Each target is counted by walking the tidlist of its rarest item and
/// checking the remaining constraints row by row.
#[derive(Debug)]
pub struct SeriesSource<'a> {
    view: LogView<'a>,
    span: TimeWindow,
    index: VerticalIndex,
    hour_of_row: Vec<u32>,
}

impl<'a> SeriesSource<'a> {
    pub fn new(db: impl Into<LogView<'a>>, span: TimeWindow) -> Result<Self> {
        span.require_hour_aligned()?;
        let view = db.into().window(span);
        let index = VerticalIndex::build(&view);
        let start = span.start_hour();
        let hour_of_row = view.timestamps().iter().map(|&t| (hour_of(t) - start) as u32).collect();
        Ok(SeriesSource { view, span, index, hour_of_row })
    }

    pub fn span(&self) -> TimeWindow {
        self.span
    }

    pub fn view(&self) -> LogView<'a> {
        self.view
    }

    /// One value per hour of the span.
    pub fn hourly(&self, target: &TargetDefinition) -> Vec<f64> {
        let mut out = vec![0.0; self.span.hour_count()];
        let items = target.items();
        let Some(rarest) = items.iter().copied().min_by_key(|&it| (self.index.support(it), it)) else {
            for &h in &self.hour_of_row {
                out[h as usize] += 1.0;
            }
            return out;
        };
        for tid in self.index.tidlist(rarest).iter() {
            if target.matches(self.view.row(tid as usize)) {
                out[self.hour_of_row[tid as usize] as usize] += 1.0;
            }
        }
        out
    }
}
