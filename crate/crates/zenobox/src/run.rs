//! Running an experiment and writing its files.

use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::experiments::{dispatch, RunOutput};
use crate::record::{records_to_csv, series_to_csv, write_bytes};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ZENOBOX_OUT";
pub const DEFAULT_OUT: &str = "zenobox-out";

/// Runs `config` on a dedicated pool of `threads` workers (all cores when
/// None). Results do not depend on the thread count.
pub fn run_experiment(config: &Config, threads: Option<usize>) -> Result<RunOutput> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(Error::config("thread count must be at least 1"));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config(format!("cannot start {threads:?} worker threads: {e}")))?;
    pool.install(|| dispatch(config))
}

/// `flag`, else `$ZENOBOX_OUT`, else `./zenobox-out`.
pub fn resolve_out_dir(flag: Option<&Path>, env: Option<&str>) -> PathBuf {
    match (flag, env) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(e)) if !e.is_empty() => PathBuf::from(e),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}

/// Writes `<name>.csv`, `<name>-summary.csv` (sweeps only),
/// `<name>-series.csv` and `<name>-report.txt`; returns the paths.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = out.experiment.name();
    let mut files = vec![(
        dir.join(format!("{name}.csv")),
        records_to_csv(&out.records)?,
    )];
    if !out.summary.is_empty() {
        files.push((
            dir.join(format!("{name}-summary.csv")),
            records_to_csv(&out.summary)?,
        ));
    }
    files.push((
        dir.join(format!("{name}-series.csv")),
        series_to_csv(&out.series)?,
    ));
    files.push((
        dir.join(format!("{name}-report.txt")),
        out.report.clone().into_bytes(),
    ));
    for (path, bytes) in &files {
        write_bytes(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_env_beats_default() {
        let flag = Path::new("/tmp/a");
        assert_eq!(
            resolve_out_dir(Some(flag), Some("/tmp/b")),
            PathBuf::from("/tmp/a")
        );
        assert_eq!(
            resolve_out_dir(None, Some("/tmp/b")),
            PathBuf::from("/tmp/b")
        );
        assert_eq!(resolve_out_dir(None, Some("")), PathBuf::from(DEFAULT_OUT));
        assert_eq!(resolve_out_dir(None, None), PathBuf::from(DEFAULT_OUT));
    }
}
