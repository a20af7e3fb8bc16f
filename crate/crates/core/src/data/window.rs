use crate::error::{Error, Result};

pub const HOUR: i64 = 3600;
pub const DAY: i64 = 24 * HOUR;

/// Half-open interval `[start, end)` in UTC epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    start: i64,
    end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidWindow(format!("start {start} must precede end {end}")));
        }
        Ok(TimeWindow { start, end })
    }

    /// Window of `hours` whole hours starting at `start_hour` (an epoch hour index).
    pub fn hours(start_hour: i64, hours: i64) -> Result<Self> {
        Self::new(start_hour * HOUR, (start_hour + hours) * HOUR)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn contains(&self, ts: i64) -> bool {
        self.start <= ts && ts < self.end
    }

    pub fn is_hour_aligned(&self) -> bool {
        self.start.rem_euclid(HOUR) == 0 && self.end.rem_euclid(HOUR) == 0
    }

    pub fn require_hour_aligned(&self) -> Result<()> {
        if self.is_hour_aligned() {
            Ok(())
        } else {
            Err(Error::Unaligned { start: self.start, end: self.end })
        }
    }

    /// Epoch hour index of the first hour; only meaningful when aligned.
    pub fn start_hour(&self) -> i64 {
        self.start.div_euclid(HOUR)
    }

    /// Number of whole hours covered; only meaningful when aligned.
    pub fn hour_count(&self) -> usize {
        ((self.end - self.start) / HOUR) as usize
    }
}

/// Epoch hour index containing `ts`.
pub fn hour_of(ts: i64) -> i64 {
    ts.div_euclid(HOUR)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_validation() {
        assert!(TimeWindow::new(10, 10).is_err());
        assert!(TimeWindow::new(11, 10).is_err());
        let w = TimeWindow::new(0, 7200).unwrap();
        assert!(w.is_hour_aligned());
        assert_eq!(w.hour_count(), 2);
        assert!(w.contains(0) && w.contains(7199) && !w.contains(7200));
        assert!(TimeWindow::new(1, 7200).unwrap().require_hour_aligned().is_err());
    }

    #[test]
    fn negative_timestamps_bucket_downwards() {
        assert_eq!(hour_of(-1), -1);
        assert_eq!(hour_of(3599), 0);
        assert!(TimeWindow::new(-3600, 0).unwrap().is_hour_aligned());
    }
}
