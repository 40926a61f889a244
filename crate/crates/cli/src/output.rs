use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// A finished report: JSON document or CSV table.
pub struct Report {
    pub name: String,
    pub body: Body,
    pub pass: bool,
    /// Diagnostics printed to stderr.
    pub notes: Vec<String>,
}

pub enum Body {
    Json(serde_json::Value),
    Csv(Vec<u8>),
}

impl Report {
    pub fn json(name: &str, value: serde_json::Value, pass: bool) -> Self {
        Report { name: name.into(), body: Body::Json(value), pass, notes: Vec::new() }
    }

    pub fn csv<T: serde::Serialize>(name: &str, rows: &[T], pass: bool) -> eqindex::Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| eqindex::Error::Parse(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| eqindex::Error::Parse(e.to_string()))?;
        Ok(Report { name: name.into(), body: Body::Csv(bytes), pass, notes: Vec::new() })
    }
}

/// Write the report into `dir` and echo it to stdout unless `quiet`.
pub fn emit(r: &Report, dir: &Path, quiet: bool) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (ext, bytes) = match &r.body {
        Body::Json(v) => {
            let mut s = serde_json::to_vec_pretty(v).map_err(io::Error::other)?;
            s.push(b'\n');
            ("json", s)
        }
        Body::Csv(b) => ("csv", b.clone()),
    };
    let path = dir.join(format!("{}.{ext}", r.name));
    fs::write(&path, &bytes)?;
    if !quiet {
        io::stdout().write_all(&bytes)?;
    }
    Ok(path)
}
