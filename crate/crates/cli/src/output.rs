use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::commands::{Command, Outcome};
use crate::config::RunConfig;

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("report");
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

pub struct Written {
    pub report: PathBuf,
    pub meta: PathBuf,
    pub fields: Vec<PathBuf>,
}

/// The deterministic report body: config echo, results and certificates.
pub fn render(command: Command, cfg: &RunConfig, outcome: &Outcome) -> String {
    let doc = json!({
        "command": command.name(),
        "config": cfg,
        "pass": outcome.pass(),
        "certificates": outcome.certificates,
        "results": outcome.results,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_run(
    dir: &Path,
    name: &str,
    command: Command,
    cfg: &RunConfig,
    outcome: &Outcome,
    elapsed: Duration,
    csv: bool,
) -> std::io::Result<Written> {
    let report = dir.join(format!("{name}.json"));
    write_atomic(&report, render(command, cfg, outcome).as_bytes())?;
    let finished = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    let meta_doc = json!({
        "report": report.file_name().and_then(|n| n.to_str()),
        "wall_time_seconds": elapsed.as_secs_f64(),
        "finished_unix_seconds": finished.as_secs(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let meta = dir.join(format!("{name}.meta.json"));
    write_atomic(&meta, serde_json::to_string_pretty(&meta_doc).expect("meta serializes").as_bytes())?;
    let mut fields = Vec::new();
    if csv {
        for (label, field) in &outcome.fields {
            let path = dir.join(format!("{name}.{label}.csv"));
            let mut buf = Vec::new();
            field.write_csv(&mut buf)?;
            write_atomic(&path, &buf)?;
            fields.push(path);
        }
    }
    Ok(Written { report, meta, fields })
}
