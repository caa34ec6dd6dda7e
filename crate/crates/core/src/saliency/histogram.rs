use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::log::EpisodeLog;

pub const HISTOGRAM_HEADER: [&str; 4] = ["bin_lo_ms", "bin_hi_ms", "count", "mass"];

/// Frame-duration histogram: `bin_width` wide bins from `first_edge` up to
/// `last_edge`, plus one tail bin for everything at or beyond `last_edge`.
#[derive(Clone, Debug, PartialEq)]
pub struct DurationHistogram {
    pub first_edge: f64,
    pub bin_width: f64,
    pub last_edge: f64,
    counts: Vec<u64>,
}

impl Default for DurationHistogram {
    fn default() -> Self {
        Self::new(50.0, 50.0, 500.0).expect("default binning is valid")
    }
}

impl DurationHistogram {
    pub fn new(first_edge: f64, bin_width: f64, last_edge: f64) -> Result<Self> {
        if !(bin_width > 0.0) || !(last_edge > first_edge) {
            return Err(Error::Config(format!(
                "invalid histogram binning {first_edge}..{last_edge} step {bin_width}"
            )));
        }
        let regular = ((last_edge - first_edge) / bin_width).round();
        if (first_edge + regular * bin_width - last_edge).abs() > 1e-9 {
            return Err(Error::Config("histogram range must be a whole number of bins".into()));
        }
        Ok(Self {
            first_edge,
            bin_width,
            last_edge,
            counts: vec![0; regular as usize + 1],
        })
    }

    pub fn from_durations(durations: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut h = Self::default();
        for d in durations {
            h.add(d)?;
        }
        Ok(h)
    }

    pub fn from_log(log: &EpisodeLog) -> Result<Self> {
        Self::from_durations(log.frame_durations())
    }

    pub fn add(&mut self, duration_ms: f64) -> Result<()> {
        if !(duration_ms >= self.first_edge) {
            return Err(Error::data(
                None,
                format!("frame duration {duration_ms} ms is below {} ms", self.first_edge),
            ));
        }
        let tail = self.counts.len() - 1;
        let bin = if duration_ms >= self.last_edge {
            tail
        } else {
            (((duration_ms - self.first_edge) / self.bin_width).floor() as usize).min(tail - 1)
        };
        self.counts[bin] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &DurationHistogram) -> Result<()> {
        self.check_binning(other)?;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    /// Lower and upper edge of bin `i`; the tail has no upper edge.
    pub fn bin_edges(&self, i: usize) -> (f64, Option<f64>) {
        let lo = self.first_edge + i as f64 * self.bin_width;
        if i + 1 == self.counts.len() {
            (self.last_edge, None)
        } else {
            (lo, Some(lo + self.bin_width))
        }
    }

    pub fn masses(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Usage("histogram is empty".into()));
        }
        Ok(self.counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    fn check_binning(&self, other: &DurationHistogram) -> Result<()> {
        if self.first_edge != other.first_edge
            || self.bin_width != other.bin_width
            || self.last_edge != other.last_edge
        {
            return Err(Error::Usage("histograms use different binning".into()));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let masses = self.masses().unwrap_or_else(|_| vec![0.0; self.counts.len()]);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(HISTOGRAM_HEADER)?;
        for (i, (&c, m)) in self.counts.iter().zip(masses).enumerate() {
            let (lo, hi) = self.bin_edges(i);
            w.write_record([
                lo.to_string(),
                hi.map(|h| h.to_string()).unwrap_or_default(),
                c.to_string(),
                m.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<histogram>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    /// Reads the CSV layout written by [`write_csv`](Self::write_csv). Bins must be
    /// contiguous with equal width and end in a single open tail row.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(input);
        if r.headers()?.iter().ne(HISTOGRAM_HEADER.iter().copied()) {
            return Err(Error::data(Some(1), "histogram header mismatch"));
        }
        let mut rows: Vec<(f64, Option<f64>, u64)> = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                let s = rec.get(k).unwrap_or("");
                s.parse().map_err(|_| Error::data(Some(line), format!("bad number {s:?}")))
            };
            let hi = match rec.get(1).unwrap_or("") {
                "" => None,
                _ => Some(num(1)?),
            };
            let count_s = rec.get(2).unwrap_or("");
            let count = count_s
                .parse()
                .map_err(|_| Error::data(Some(line), format!("bad count {count_s:?}")))?;
            rows.push((num(0)?, hi, count));
        }
        let data_err = |m: &str| Err(Error::data(None, m.to_string()));
        if rows.len() < 2 {
            return data_err("histogram needs at least one regular bin and a tail");
        }
        let (first, width) = match rows[0] {
            (lo, Some(hi), _) => (lo, hi - lo),
            _ => return data_err("first histogram bin has no upper edge"),
        };
        let last = rows[rows.len() - 1].0;
        let mut h = Self::new(first, width, last)?;
        if h.num_bins() != rows.len() {
            return data_err("histogram rows do not match their edges");
        }
        for (i, &(lo, hi, c)) in rows.iter().enumerate() {
            let (elo, ehi) = h.bin_edges(i);
            let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
            let edges_ok = close(lo, elo)
                && match (hi, ehi) {
                    (None, None) => true,
                    (Some(a), Some(b)) => close(a, b),
                    _ => false,
                };
            if !edges_ok {
                return Err(Error::data(Some(i + 2), format!("bin {lo}..{hi:?} breaks the regular binning")));
            }
            h.counts[i] = c;
        }
        Ok(h)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }
}

/// L1 distance between the normalized histograms, in [0, 2].
pub fn histogram_distance(a: &DurationHistogram, b: &DurationHistogram) -> Result<f64> {
    a.check_binning(b)?;
    let (p, q) = (a.masses()?, b.masses()?);
    Ok(p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_binning() {
        let h = DurationHistogram::default();
        assert_eq!(h.num_bins(), 10);
        assert_eq!(h.bin_edges(0), (50.0, Some(100.0)));
        assert_eq!(h.bin_edges(8), (450.0, Some(500.0)));
        assert_eq!(h.bin_edges(9), (500.0, None));
    }

    #[test]
    fn binning_examples() {
        let h = DurationHistogram::from_durations(vec![50.0; 100]).unwrap();
        assert_eq!(h.counts()[0], 100);
        assert_eq!(h.total(), 100);

        let h = DurationHistogram::from_durations([275.0]).unwrap();
        assert_eq!(h.counts()[4], 1);

        let h = DurationHistogram::from_durations([60.0, 10_000.0]).unwrap();
        assert_eq!(h.counts()[0], 1);
        assert_eq!(h.counts()[9], 1);

        let h = DurationHistogram::from_durations([99.999, 100.0, 499.9, 500.0]).unwrap();
        assert_eq!(h.counts(), &[1, 1, 0, 0, 0, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn short_durations_are_data_errors() {
        assert!(matches!(
            DurationHistogram::from_durations([49.0]),
            Err(Error::Data { .. })
        ));
        assert!(DurationHistogram::from_durations([f64::NAN]).is_err());
    }

    fn two_bin(a: u64, b: u64) -> DurationHistogram {
        let mut h = DurationHistogram::new(50.0, 50.0, 100.0).unwrap();
        h.counts = vec![a, b];
        h
    }

    #[test]
    fn distance_examples() {
        let h = DurationHistogram::from_durations([60.0, 260.0, 900.0]).unwrap();
        assert_eq!(histogram_distance(&h, &h).unwrap(), 0.0);
        let a = DurationHistogram::from_durations([60.0]).unwrap();
        let b = DurationHistogram::from_durations([160.0]).unwrap();
        assert_eq!(histogram_distance(&a, &b).unwrap(), 2.0);
        assert_eq!(histogram_distance(&two_bin(1, 1), &two_bin(3, 1)).unwrap(), 0.5);
        assert!(matches!(histogram_distance(&a, &two_bin(1, 1)), Err(Error::Usage(_))));
    }

    #[test]
    fn csv_round_trip() {
        let h = DurationHistogram::from_durations([60.0, 70.0, 260.0, 900.0]).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("bin_lo_ms,bin_hi_ms,count,mass\n50,100,2,0.5\n"));
        assert!(text.ends_with("500,,1,0.25\n"));
        assert_eq!(DurationHistogram::read_csv(buf.as_slice()).unwrap(), h);
    }

    #[test]
    fn irregular_csv_rejected() {
        let text = "bin_lo_ms,bin_hi_ms,count,mass\n50,100,1,1\n100,175,0,0\n175,,0,0\n";
        assert!(matches!(
            DurationHistogram::read_csv(text.as_bytes()),
            Err(Error::Config(_) | Error::Data { .. })
        ));
        let text = "bin_lo_ms,bin_hi_ms,count,mass\n50,100,x,1\n100,,0,0\n";
        assert!(matches!(DurationHistogram::read_csv(text.as_bytes()), Err(Error::Data { line: Some(2), .. })));
    }
}
