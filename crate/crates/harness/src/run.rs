use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{merge_params, Context, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::experiments::{find, Experiment};
use crate::record::{Check, RunRecord, Table, Tolerance, Verdict, RECORD_SCHEMA, ROWS_SCHEMA};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Check the configuration against the experiment and fill in defaults.
pub fn resolve(config: &ExperimentConfig) -> Result<(&'static Experiment, Context, ExperimentConfig)> {
    let exp = find(&config.id)?;
    let params = merge_params(exp.id, (exp.defaults)(), &config.params)?;
    let n = match (exp.default_n, config.n_samples) {
        (None, Some(_)) => {
            return Err(HarnessError::Param {
                experiment: exp.id.into(),
                name: "n".into(),
                reason: "this experiment is exact and takes no sample count".into(),
            })
        }
        (_, Some(0)) => {
            return Err(HarnessError::Param {
                experiment: exp.id.into(),
                name: "n".into(),
                reason: "must be positive".into(),
            })
        }
        (default, given) => given.or(default),
    };
    let snapshot = ExperimentConfig {
        id: exp.id.to_string(),
        params: params.clone(),
        seed: config.seed,
        n_samples: n,
        out: config.out.clone(),
    };
    let ctx = Context {
        id: exp.id,
        seed: config.seed,
        n,
        params,
    };
    Ok((exp, ctx, snapshot))
}

/// Run one experiment and write `<id>.csv` and `<id>.json` under
/// `config.out`. Nothing is left behind if the run or a write fails.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunRecord> {
    let (exp, ctx, snapshot) = resolve(config)?;
    let start = Instant::now();
    let outcome = (exp.run)(&ctx)?;
    let wall = start.elapsed().as_secs_f64();
    let mut checks = outcome.checks;
    if let Some(budget) = exp.budget_secs {
        checks.push(Check::new("wall time in seconds", budget, Some(wall), Tolerance::Below));
    }
    let verdict = Verdict::combine(checks.iter().map(|c| c.verdict));
    let csv_path = snapshot.csv_path();
    let record = RunRecord {
        schema: RECORD_SCHEMA.to_string(),
        criterion: exp.criterion,
        claim: exp.claim.to_string(),
        code_version: CODE_VERSION.to_string(),
        wall_time_secs: wall,
        rows_file: csv_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        n_rows: outcome.rows.len(),
        summary: outcome.summary,
        checks,
        verdict,
        rows: outcome.rows,
        config: snapshot,
    };
    let json_path = record.config.json_path();
    let written = fs::create_dir_all(&record.config.out)
        .map_err(|source| HarnessError::Io {
            path: record.config.out.clone(),
            source,
        })
        .and_then(|_| write_rows(&csv_path, &record))
        .and_then(|_| write_json(&json_path, &record));
    if let Err(e) = written {
        for p in [&csv_path, &json_path] {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }
    Ok(record)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn rows_header(record: &RunRecord) -> String {
    format!(
        "# schema={ROWS_SCHEMA} experiment={} seed={}\n",
        record.config.id, record.config.seed
    )
}

fn write_rows(path: &Path, record: &RunRecord) -> Result<()> {
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(rows_header(record).as_bytes()).map_err(io_err(path))?;
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&record.rows.columns).map_err(csv_err)?;
    for r in &record.rows.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json(path: &Path, record: &RunRecord) -> Result<()> {
    let mut text = serde_json::to_string_pretty(record).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Read a rows file back, checking its schema line.
pub fn read_rows(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (first, body) = text.split_once('\n').unwrap_or((&text, ""));
    let schema = first
        .strip_prefix("# ")
        .and_then(|s| s.split_whitespace().find_map(|kv| kv.strip_prefix("schema=")))
        .unwrap_or("<none>");
    if schema != ROWS_SCHEMA {
        return Err(HarnessError::SchemaMismatch {
            context: path.display().to_string(),
            expected: ROWS_SCHEMA.into(),
            found: schema.into(),
        });
    }
    let csv_err = |source| HarnessError::Csv {
        path: PathBuf::from(path),
        source,
    };
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let columns = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)?;
    Ok(Table { columns, rows })
}
