//! Cartesian parameter sweeps evaluated on a worker pool and written as CSV.

use rayon::prelude::*;

use crate::config::{ParameterPath, RunConfig, SweepQuantity, SweepSpec};
use crate::error::{Error, Result};
use crate::fmt_sci;
use crate::propagation::{group_velocities, phase_table, Velocity};
use crate::report::gate_entanglement;
use crate::susceptibility::{analytic_susceptibilities, SusceptibilitySet};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SweepTable {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.header)?;
        for r in &self.rows {
            wtr.write_record(r)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn quantity_columns(q: SweepQuantity) -> Vec<String> {
    match q {
        SweepQuantity::Velocities => ["vg_p", "vg_s", "vg_t", "mismatch"].map(String::from).to_vec(),
        SweepQuantity::Susceptibilities => SusceptibilitySet::NAMES
            .iter()
            .flat_map(|n| [format!("re_{n}"), format!("im_{n}")])
            .collect(),
        SweepQuantity::Phases => ["phi_ps", "phi_pt", "phi_pst", "phi_sp", "phi_st", "phi_spt", "phi_tps", "total_nonlinear", "conditional", "zeta"]
            .map(String::from)
            .to_vec(),
    }
}

fn velocity_cell(v: Velocity) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

fn evaluate(cfg: &RunConfig, q: SweepQuantity, paths: &[ParameterPath], point: &[f64]) -> Result<Vec<f64>> {
    let (mut atom, mut drive, mut geom) = (cfg.atom, cfg.drive, cfg.geometry);
    for (p, v) in paths.iter().zip(point) {
        p.set(&mut atom, &mut drive, &mut geom, *v);
    }
    atom.validate()?;
    drive.validate()?;
    geom.validate()?;
    Ok(match q {
        SweepQuantity::Velocities => {
            let g = group_velocities(&drive, &atom);
            vec![velocity_cell(g.vg_p), velocity_cell(g.vg_s), velocity_cell(g.vg_t), g.mismatch()]
        }
        SweepQuantity::Susceptibilities => analytic_susceptibilities(&drive, &atom)?
            .as_array()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect(),
        SweepQuantity::Phases => {
            let t = phase_table(&drive, &atom, &geom, cfg.options.chi_st)?;
            let s = t.shifts;
            vec![
                s.ps,
                s.pt,
                s.pst,
                s.sp,
                s.st,
                s.spt,
                s.tps,
                t.total_nonlinear_phase()?,
                t.conditional_phase()?,
                gate_entanglement(&t)?,
            ]
        }
    })
}

/// Grid points in lexicographic order, the first axis varying slowest.
fn grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, values| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect()
    })
}

/// Evaluates every grid point; failures become empty cells with the error in
/// the `status` column.
pub fn run_sweep(cfg: &RunConfig, spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepTable> {
    spec.validate()?;
    let paths = spec.axes.iter().map(|a| ParameterPath::parse(&a.parameter)).collect::<Result<Vec<_>>>()?;
    let points = grid(&spec.axes.iter().map(|a| a.values()).collect::<Vec<_>>());
    let columns = quantity_columns(spec.quantity);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter { name: "jobs", reason: e.to_string() })?;
    let results: Vec<Result<Vec<f64>>> =
        pool.install(|| points.par_iter().map(|p| evaluate(cfg, spec.quantity, &paths, p)).collect());

    let mut header: Vec<String> = spec.axes.iter().map(|a| a.parameter.clone()).collect();
    header.extend(columns.iter().cloned());
    header.push("status".into());
    let rows = points
        .iter()
        .zip(results)
        .map(|(p, r)| {
            let mut row: Vec<String> = p.iter().map(|v| fmt_sci(*v)).collect();
            match r {
                Ok(values) => {
                    row.extend(values.iter().map(|v| fmt_sci(*v)));
                    row.push("ok".into());
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), columns.len()));
                    row.push(e.to_string());
                }
            }
            row
        })
        .collect();
    Ok(SweepTable { header, rows })
}
