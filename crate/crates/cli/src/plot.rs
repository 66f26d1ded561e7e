//! Plot-ready projections of a finished run directory.
//!
//! Each output starts with `# column: meaning` legend lines, then the header
//! row, then data rows copied verbatim from the source table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Experiment;
use crate::error::{HarnessError, Result};
use crate::manifest::Manifest;

pub const PLOT_DIR: &str = "plot";

struct PlotSpec {
    output: &'static str,
    source: &'static str,
    /// `(source column, output column, legend)`
    columns: &'static [(&'static str, &'static str, &'static str)],
}

fn specs(experiment: Experiment) -> &'static [PlotSpec] {
    match experiment {
        Experiment::Evolve => &[PlotSpec {
            output: "density_snapshots",
            source: "density.csv",
            columns: &[("t", "t", "time"), ("x", "x", "position"), ("rho", "rho", "|psi|^2")],
        }],
        Experiment::Sample => &[
            PlotSpec {
                output: "trajectory_scatter",
                source: "trajectory.csv",
                columns: &[("t", "t", "time of the draw"), ("x", "x", "particle position")],
            },
            PlotSpec {
                output: "density_overlay",
                source: "density.csv",
                columns: &[
                    ("t_start", "t", "start of the time slab"),
                    ("x", "x", "bin centre"),
                    ("rho_hat", "rho_hat", "ensemble mean of the empirical density"),
                    ("psi2", "psi2", "|psi|^2 averaged over the bin and slab"),
                    ("stderr", "stderr", "standard error of rho_hat"),
                ],
            },
        ],
        Experiment::Reconstruct => &[PlotSpec {
            output: "reconstruction_overlay",
            source: "reconstruction.csv",
            columns: &[
                ("x", "x", "position"),
                ("rho", "rho", "|psi|^2"),
                ("re_psi", "re_psi", "real part of the evolved state"),
                ("im_psi", "im_psi", "imaginary part of the evolved state"),
                ("re_rec", "re_rec", "real part of the reconstruction"),
                ("im_rec", "im_rec", "imaginary part of the reconstruction"),
            ],
        }],
        Experiment::Fourbox => &[PlotSpec {
            output: "box_centers",
            source: "centers.csv",
            columns: &[
                ("t", "t", "time"),
                ("center_A1", "center_A1", "mean position of particle A in box A1"),
                ("center_A2", "center_A2", "mean position of particle A in box A2"),
                ("center_B1", "center_B1", "mean position of particle B in box B1"),
                ("center_B2", "center_B2", "mean position of particle B in box B2"),
            ],
        }],
        Experiment::Contrast => &[PlotSpec {
            output: "contrast",
            source: "contrast.csv",
            columns: &[
                ("lambda", "lambda", "self coupling"),
                ("displacement_dx", "displacement_dx", "largest packet-centre drift in grid cells"),
            ],
        }],
        Experiment::Convergence => &[PlotSpec {
            output: "residual_ladder",
            source: "convergence.csv",
            columns: &[
                ("dx", "dx", "grid spacing"),
                ("spacing", "spacing", "snapshot spacing"),
                ("residual", "residual", "largest continuity residual L2 norm"),
            ],
        }],
    }
}

fn project(dir: &Path, out_dir: &Path, spec: &PlotSpec) -> Result<PathBuf> {
    let src = dir.join(spec.source);
    if !src.is_file() {
        return Err(HarnessError::MissingArtifact(src));
    }
    let malformed = |message: String| HarnessError::MalformedArtifact {
        path: src.clone(),
        message,
    };
    let mut reader = csv::Reader::from_path(&src).map_err(|e| malformed(e.to_string()))?;
    let headers = reader.headers().map_err(|e| malformed(e.to_string()))?.clone();
    let idx = spec
        .columns
        .iter()
        .map(|(c, _, _)| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| malformed(format!("no column `{c}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    let path = out_dir.join(format!("{}.csv", spec.output));
    let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
    for (_, name, legend) in spec.columns {
        writeln!(out, "# {name}: {legend}")?;
    }
    let names: Vec<&str> = spec.columns.iter().map(|(_, n, _)| *n).collect();
    writeln!(out, "{}", names.join(","))?;
    for record in reader.records() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let row: Vec<&str> = idx.iter().map(|&i| &record[i]).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(path)
}

/// Writes the plot tables of the run in `dir` into `dir/plot`.
pub fn emit_plot_data(dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest = Manifest::load(dir)?;
    let out_dir = dir.join(PLOT_DIR);
    fs::create_dir_all(&out_dir)?;
    specs(manifest.experiment).iter().map(|s| project(dir, &out_dir, s)).collect()
}
