//! CSV files with a commented config header, and plain-text tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::Config;

/// Comment lines echoing the command, master seed and full resolved config.
pub fn header(command: &str, cfg: &Config) -> String {
    header_with(command, cfg, &[])
}

pub fn header_with(command: &str, cfg: &Config, extra: &[String]) -> String {
    let mut s = format!("# hohl {command}\n# master seed: {}\n", cfg.seed);
    for e in extra {
        s.push_str("# ");
        s.push_str(e);
        s.push('\n');
    }
    for line in cfg.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    s
}

pub struct CsvOut {
    pub path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, header: &str, columns: &[&str]) -> Result<CsvOut> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        let mut file = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        file.write_all(header.as_bytes())?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(columns)?;
        Ok(CsvOut { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.digits$}"),
        _ => "NA".into(),
    }
}

/// Mean and population standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aligned plain-text table; the first column is left aligned, the rest right aligned.
pub fn render_table(head: &[String], rows: &[Vec<String>]) -> String {
    let cols = head.len();
    let mut width = vec![0; cols];
    for r in std::iter::once(head).chain(rows.iter().map(|r| r.as_slice())) {
        for (c, cell) in r.iter().enumerate() {
            width[c] = width[c].max(cell.chars().count());
        }
    }
    let line = |r: &[String]| {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = width[c])
                } else {
                    format!("{cell:>w$}", w = width[c])
                }
            })
            .collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(head);
    s.push_str(&"-".repeat(width.iter().sum::<usize>() + 2 * (cols.saturating_sub(1))));
    s.push('\n');
    for r in rows {
        s.push_str(&line(r));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_and_table() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        assert!(mean_std(&[]).0.is_nan());
        let t = render_table(
            &["rate".into(), "a".into()],
            &[vec!["0.05".into(), "39.80 (0.00)".into()]],
        );
        assert_eq!(t, "rate             a\n------------------\n0.05  39.80 (0.00)\n");
        assert_eq!(fmt_opt(None, 3), "NA");
        assert_eq!(fmt_opt(Some(1.23456), 2), "1.23");
    }

    #[test]
    fn header_lines_are_comments() {
        let h = header("rates", &Config::default());
        assert!(h.lines().all(|l| l.starts_with('#')));
        assert!(h.contains("# seed = 42"));
        assert!(h.contains("tau0"));
    }
}
