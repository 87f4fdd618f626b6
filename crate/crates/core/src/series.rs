//! Sampled time series with named real channels, and their CSV form.

use std::io::{self, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Self {
        TimeSeries { times, channels: Vec::new() }
    }

    /// Appends a channel; its length must match the time axis.
    pub fn push_channel(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.times.len() {
            return Err(Error::Dimension(format!(
                "channel `{name}` has {} samples, time axis has {}",
                values.len(),
                self.times.len()
            )));
        }
        if self.channels.iter().any(|(n, _)| *n == name) {
            return Err(Error::param("channel", format!("duplicate channel name `{name}`")));
        }
        self.channels.push((name, values));
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Writes `t,<channel>...` rows with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for (name, _) in &self.channels {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, t) in self.times.iter().enumerate() {
            write!(w, "{}", fmt_sci(*t))?;
            for (_, v) in &self.channels {
                write!(w, ",{}", fmt_sci(v[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Scientific notation with 12 significant digits, e.g. `1.00000000000e-3`.
pub fn fmt_sci(x: f64) -> String {
    // normalise negative zero so reruns never differ in sign of an exact zero
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}
