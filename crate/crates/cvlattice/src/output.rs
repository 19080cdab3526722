//! Run-directory layout and CSV / raw serialization.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use cvlattice_core::ObservableSeries;
use num_complex::Complex64;

use crate::config::ExperimentConfig;

/// Shortest decimal form that reads back to the identical `f64`
/// (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Named scalar results, kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    entries: Vec<(String, f64)>,
}

impl Metrics {
    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

/// One output directory per run.
#[derive(Debug, Clone)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_config_echo(&self, cfg: &ExperimentConfig) -> io::Result<()> {
        fs::write(self.file("config-echo.toml"), cfg.to_toml())
    }

    /// `field.csv`, `energy.csv` and `norms.csv`.
    pub fn write_series(&self, series: &ObservableSeries) -> io::Result<()> {
        write_site_table(&self.file("field.csv"), &series.times, &series.field_vev)?;
        write_site_table(&self.file("energy.csv"), &series.times, &series.energy_density)?;
        let rows = series.times.iter().zip(&series.norm_drift).map(|(t, d)| vec![fmt_f64(*t), fmt_f64(*d)]);
        self.write_table("norms.csv", &["t", "max_drift"], rows)
    }

    pub fn write_metrics(&self, metrics: &Metrics) -> io::Result<()> {
        let rows = metrics.entries.iter().map(|(n, v)| vec![n.clone(), fmt_f64(*v)]);
        self.write_table("metrics.csv", &["name", "value"], rows)
    }

    pub fn write_table(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(self.file(name))?);
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    }
}

fn write_site_table(path: &Path, times: &[f64], values: &[Vec<f64>]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,site,value")?;
    for (t, row) in times.iter().zip(values) {
        let t = fmt_f64(*t);
        for (site, v) in row.iter().enumerate() {
            writeln!(w, "{t},{site},{}", fmt_f64(*v))?;
        }
    }
    w.flush()
}

/// Header plus rows of a CSV written by this module.
pub fn read_table(path: &Path) -> io::Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = match lines.next() {
        Some(h) => h?.split(',').map(str::to_string).collect(),
        None => return Err(io::Error::new(io::ErrorKind::InvalidData, "empty table")),
    };
    let rows = lines
        .map(|l| l.map(|l| l.split(',').map(str::to_string).collect()))
        .collect::<io::Result<_>>()?;
    Ok((header, rows))
}

pub const PSI_HEADER_BYTES: usize = 64;

/// `psi.raw`: a 64-byte ASCII header `cvlattice-psi N=<n> M=<m> snapshots=<k>`
/// padded with spaces and ending in a newline, then per snapshot the
/// row-major `site x grid` amplitudes as little-endian `(re, im)` f64 pairs.
pub struct PsiWriter {
    out: BufWriter<File>,
    per_snapshot: usize,
}

impl PsiWriter {
    pub fn create(path: &Path, n_sites: usize, m_points: usize, snapshots: usize) -> io::Result<Self> {
        let mut header = format!("cvlattice-psi N={n_sites} M={m_points} snapshots={snapshots}");
        if header.len() >= PSI_HEADER_BYTES {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "psi header does not fit"));
        }
        while header.len() < PSI_HEADER_BYTES - 1 {
            header.push(' ');
        }
        header.push('\n');
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(header.as_bytes())?;
        Ok(Self {
            out,
            per_snapshot: n_sites * m_points,
        })
    }

    pub fn write_snapshot(&mut self, amplitudes: &[Complex64]) -> io::Result<()> {
        if amplitudes.len() != self.per_snapshot {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "snapshot size does not match header"));
        }
        for a in amplitudes {
            self.out.write_all(&a.re.to_le_bytes())?;
            self.out.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
