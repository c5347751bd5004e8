//! Output plumbing: every artifact embeds the run id, tool version, and the
//! full configuration, so a result file is traceable to the exact invocation
//! that produced it. CSV bodies are a deterministic function of the
//! configuration (wall time lives only in the JSON summary).

use serde::Serialize;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// FNV-1a over the config string: a stable, platform-independent run id.
fn run_id(name: &str, config: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes().chain(config.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

pub struct RunContext {
    pub name: String,
    pub out_dir: PathBuf,
    pub run_id: String,
    config: serde_json::Value,
    started: Instant,
}

impl RunContext {
    pub fn new(name: &str, out_dir: &Path, config: serde_json::Value) -> std::io::Result<Self> {
        fs::create_dir_all(out_dir)?;
        let cfg_str = serde_json::to_string(&config).expect("config serializes");
        Ok(RunContext {
            name: name.to_string(),
            out_dir: out_dir.to_path_buf(),
            run_id: run_id(name, &cfg_str),
            config,
            started: Instant::now(),
        })
    }

    fn provenance_comments(&self) -> String {
        format!(
            "# run_id={}\n# version={}\n# config={}\n",
            self.run_id,
            VERSION,
            serde_json::to_string(&self.config).expect("config serializes")
        )
    }

    /// Writes `<out>/<name><suffix>.csv`: provenance comment lines, a header
    /// row, then one record per row.
    pub fn write_csv(
        &self,
        suffix: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> std::io::Result<PathBuf> {
        let path = self.out_dir.join(format!("{}{suffix}.csv", self.name));
        let mut f = File::create(&path)?;
        f.write_all(self.provenance_comments().as_bytes())?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Writes `<out>/<name>.json` with the run id, version, config echo, the
    /// command-specific summary, and elapsed wall time.
    pub fn write_json<S: Serialize>(&self, summary: &S) -> std::io::Result<PathBuf> {
        let path = self.out_dir.join(format!("{}.json", self.name));
        let doc = serde_json::json!({
            "run_id": self.run_id,
            "version": VERSION,
            "config": self.config,
            "summary": serde_json::to_value(summary).expect("summary serializes"),
            "wall_time_secs": self.started.elapsed().as_secs_f64(),
        });
        fs::write(&path, serde_json::to_string_pretty(&doc).expect("doc serializes") + "\n")?;
        Ok(path)
    }

    /// Writes `<out>/<name>.svg` with a provenance comment baked in.
    pub fn write_svg(&self, svg: &str) -> std::io::Result<PathBuf> {
        let path = self.out_dir.join(format!("{}.svg", self.name));
        let annotated = format!(
            "<!-- run_id={} version={} config={} -->\n{svg}",
            self.run_id,
            VERSION,
            serde_json::to_string(&self.config).expect("config serializes")
        );
        fs::write(&path, annotated)?;
        Ok(path)
    }
}

/// Shorthand for formatting a float with full round-trip precision so CSV
/// output is bit-stable across runs.
pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}
