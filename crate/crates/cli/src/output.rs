use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        self != Format::Json
    }

    pub fn json(self) -> bool {
        self != Format::Csv
    }
}

/// Envelope for every JSON file: tool version, full configuration and result.
#[derive(Debug, Serialize)]
pub struct RunReport<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub result: R,
}

impl<'a, C: Serialize, R: Serialize> RunReport<'a, C, R> {
    pub fn new(command: &'static str, config: &'a C, result: R) -> Self {
        Self { tool: "dimlab", version: env!("CARGO_PKG_VERSION"), command, config, result }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// Files of one run, written together once the run has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|f| f.0.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_str())
    }

    /// Each file goes to a temporary name first and is renamed into place.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let target = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, contents)?;
            fs::rename(&tmp, &target)?;
            written.push(target);
        }
        Ok(written)
    }
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv_text<R, I, S>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

/// `(log10_r, log10_value)` rows for a scaling series.
pub fn loglog_csv(points: &[(f64, f64)]) -> String {
    csv_text(&["log10_r", "log10_value"], points.iter().map(|&(r, v)| [r.log10().to_string(), v.log10().to_string()]))
}

/// `(n, value)` rows for a sequence series.
pub fn series_csv(column: &str, points: &[(u64, f64)]) -> String {
    csv_text(&["n", column], points.iter().map(|&(n, v)| [n.to_string(), v.to_string()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layouts() {
        assert_eq!(loglog_csv(&[(0.01, 1000.0), (1.0, 0.0)]), "log10_r,log10_value\n-2,3\n0,-inf\n");
        assert_eq!(series_csv("tv_distance", &[(2, 0.5)]), "n,tv_distance\n2,0.5\n");
        assert_eq!(csv_text(&["a"], [["x, y"]]), "a\n\"x, y\"\n");
    }

    #[test]
    fn atomic_writes() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::default();
        out.add("a.csv", "n\n1\n".into());
        out.add("b.json", "{}\n".into());
        let paths = out.write_to(&dir.path().join("run")).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(fs::read_to_string(&paths[0]).unwrap(), "n\n1\n");
        let names: Vec<_> = fs::read_dir(dir.path().join("run")).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 2);
    }
}
