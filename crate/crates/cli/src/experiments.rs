use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use outcrop_core::pipeline::{extract_prepared, prepare};
use outcrop_core::synth::bench_specs;
use outcrop_core::{generate_synthetic, GrowParams, PointCloud};

use crate::extract::{report_stage, RunConfig};

/// Point counts of the five reference scans, smallest first.
pub const PAPER_SIZES: [usize; 5] = [134_067, 323_562, 484_658, 684_866, 1_096_948];

/// Detected plane count per threshold value.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub theta: Vec<(f64, usize)>,
    pub t: Vec<(f64, usize)>,
}

/// Counts fractures for each `theta_th` (with `base.t_th` fixed) and each
/// `t_th` (with `base.theta_th` fixed). Features are computed once.
pub fn sweep_counts(
    cloud: &PointCloud,
    base: &GrowParams,
    thetas: &[f64],
    ts: &[f64],
) -> Result<SweepTable> {
    if thetas.is_empty() || ts.is_empty() {
        bail!("config: sweep ranges must not be empty");
    }
    let variants = |values: &[f64], set: fn(&mut GrowParams, f64)| -> Result<Vec<GrowParams>> {
        values
            .iter()
            .map(|&v| {
                let mut p = *base;
                set(&mut p, v);
                p.validate().context("config")?;
                Ok(p)
            })
            .collect()
    };
    let theta_params = variants(thetas, |p, v| p.theta_th = v)?;
    let t_params = variants(ts, |p, v| p.t_th = v)?;

    let prepared = prepare(cloud, base.k).context("features")?;
    let count = |p: &GrowParams| -> Result<usize> {
        Ok(extract_prepared(cloud, &prepared, p, false)
            .context("grow")?
            .fractures
            .len())
    };
    Ok(SweepTable {
        theta: theta_params
            .iter()
            .map(|p| Ok((p.theta_th, count(p)?)))
            .collect::<Result<_>>()?,
        t: t_params
            .iter()
            .map(|p| Ok((p.t_th, count(p)?)))
            .collect::<Result<_>>()?,
    })
}

pub fn run_sweep(cfg: &RunConfig, thetas: &[f64], ts: &[f64]) -> Result<SweepTable> {
    let started = Instant::now();
    let cloud = cfg.load()?;
    let table = sweep_counts(&cloud, &cfg.params, thetas, ts)?;
    write_table(
        &cfg.out_dir.join("sweep_theta.csv"),
        "theta_th",
        &table.theta,
    )?;
    write_table(&cfg.out_dir.join("sweep_t.csv"), "t_th", &table.t)?;
    report_stage("sweep", started.elapsed());
    Ok(table)
}

fn write_table(path: &Path, column: &str, rows: &[(f64, usize)]) -> Result<()> {
    let write = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{column},planes")?;
        for (v, n) in rows {
            writeln!(w, "{v},{n}")?;
        }
        w.flush()
    };
    write().with_context(|| format!("write: {}", path.display()))
}

/// Wall times for one synthetic scene, in milliseconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub points: usize,
    pub build_ms: f64,
    pub features_ms: f64,
    pub grow_ms: f64,
    /// Index, features, growth, classification and summary.
    pub total_ms: f64,
}

pub fn bench_row(target: usize, seed: u64, params: &GrowParams) -> Result<BenchRow> {
    let scene = generate_synthetic(&bench_specs(target, seed), seed).context("synth")?;
    let prepared = prepare(&scene.cloud, params.k).context("features")?;
    let ex = extract_prepared(&scene.cloud, &prepared, params, false).context("grow")?;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    Ok(BenchRow {
        points: scene.cloud.len(),
        build_ms: ms(ex.timings.build),
        features_ms: ms(ex.timings.features),
        grow_ms: ms(ex.timings.grow),
        total_ms: ms(ex.timings.total()),
    })
}

pub fn run_bench(
    sizes: &[usize],
    seed: u64,
    params: &GrowParams,
    out_dir: &Path,
) -> Result<Vec<BenchRow>> {
    params.validate().context("config")?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("write: cannot create {}", out_dir.display()))?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let row = bench_row(size, seed, params)?;
        eprintln!("{:>9} points: {:10.1} ms", row.points, row.total_ms);
        rows.push(row);
    }
    let path = out_dir.join("bench.csv");
    let write = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "points,build_ms,features_ms,grow_ms,total_ms")?;
        for r in &rows {
            writeln!(
                w,
                "{},{:.3},{:.3},{:.3},{:.3}",
                r.points, r.build_ms, r.features_ms, r.grow_ms, r.total_ms
            )?;
        }
        w.flush()
    };
    write().with_context(|| format!("write: {}", path.display()))?;
    Ok(rows)
}
