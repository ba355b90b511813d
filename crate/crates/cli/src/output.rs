use std::io::Write;
use std::path::Path;

/// Writes every artifact through a temporary file in `dir` and renames it into place, so
/// a failing command leaves no truncated files behind. Contents are computed before any
/// file is touched.
pub fn write_artifacts(dir: &Path, files: &[(&str, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, content) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(content.as_bytes())?;
        tmp.flush()?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dest) in staged {
        tmp.persist(dest).map_err(|e| e.error)?;
    }
    Ok(())
}

pub fn energy_csv(times: &[f64], energy: &[f64]) -> String {
    let mut out = String::from("t, energy\n");
    for (t, e) in times.iter().zip(energy) {
        out.push_str(&format!("{t:?}, {e:?}\n"));
    }
    out
}

pub fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize") + "\n"
}
