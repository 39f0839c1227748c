use serde::{Deserialize, Serialize};

/// A sampled observable `(t, value)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: f64, value: f64) {
        self.times.push(t);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Value recorded at exactly time `t`, if any.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.iter().find(|&(s, _)| s == t).map(|(_, v)| v)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    /// Sub-series restricted to `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> TimeSeries {
        let mut out = TimeSeries::new();
        for (t, v) in self.iter().filter(|&(t, _)| t >= lo && t <= hi) {
            out.push(t, v);
        }
        out
    }
}

impl FromIterator<(f64, f64)> for TimeSeries {
    fn from_iter<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        let mut out = TimeSeries::new();
        for (t, v) in iter {
            out.push(t, v);
        }
        out
    }
}
