//! The driver loop and trajectory persistence.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::integrators::Stepper;
use super::picard::{picard_iterate, PICARD_ITERATIONS};
use super::{conserved, ConservedQuantities, NlsParams};
use crate::error::{LnlsError, Result};
use crate::lattice::{read_grid_binary, write_grid_binary, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Strang,
    Rk4,
    DuhamelPicard,
}

impl std::str::FromStr for Integrator {
    type Err = LnlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Integrator::Strang),
            "rk4" => Ok(Integrator::Rk4),
            "duhamel_picard" => Ok(Integrator::DuhamelPicard),
            other => Err(LnlsError::domain(format!(
                "unknown integrator {other:?} (expected strang, rk4 or duhamel_picard)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    /// Requested step; the step actually used is `t_final / ceil(t_final / dt)`.
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    /// Steps between stored snapshots.
    pub record_stride: usize,
}

impl EvolutionConfig {
    pub fn strang(dt: f64, t_final: f64) -> Self {
        EvolutionConfig { dt, t_final, integrator: Integrator::Strang, record_stride: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LnlsError::domain(format!("dt > 0 required, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(LnlsError::domain(format!("t_final ≥ 0 required, got {}", self.t_final)));
        }
        if self.record_stride == 0 {
            return Err(LnlsError::domain("record_stride must be at least 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        if self.t_final == 0.0 {
            0
        } else {
            (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize
        }
    }

    pub fn effective_dt(&self) -> f64 {
        match self.n_steps() {
            0 => self.dt,
            n => self.t_final / n as f64,
        }
    }
}

/// Snapshots of one run together with their conserved quantities.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: NlsParams,
    pub config: EvolutionConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<GridFunction>,
    pub conserved: Vec<ConservedQuantities>,
}

impl Trajectory {
    pub fn last(&self) -> &GridFunction {
        self.snapshots.last().expect("trajectories hold at least the initial state")
    }

    /// Largest relative deviation of the mass from its initial value.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.conserved[0].mass;
        self.conserved
            .iter()
            .map(|c| (c.mass - m0).abs() / m0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Largest absolute deviation of the energy from its initial value.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.conserved[0].energy;
        self.conserved.iter().map(|c| (c.energy - e0).abs()).fold(0.0, f64::max)
    }
}

/// Runs the integrator, storing every `record_stride`-th state and the final one.
pub fn evolve(u0: &GridFunction, params: &NlsParams, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    let mut cons = Vec::new();
    let n = cfg.n_steps();
    evolve_with(u0, params, cfg, |step, t, u| {
        if step % cfg.record_stride == 0 || step == n {
            times.push(t);
            cons.push(conserved(u, params));
            snapshots.push(u.clone());
        }
    })?;
    Ok(Trajectory { params: *params, config: *cfg, times, snapshots, conserved: cons })
}

/// Runs the integrator and hands every state `(step, t, u)` to `observe`, starting with step 0.
pub fn evolve_with(
    u0: &GridFunction,
    params: &NlsParams,
    cfg: &EvolutionConfig,
    mut observe: impl FnMut(usize, f64, &GridFunction),
) -> Result<GridFunction> {
    cfg.validate()?;
    let lat = *u0.lattice();
    let n = cfg.n_steps();
    let dt = cfg.effective_dt();
    let mut u = u0.clone();
    observe(0, 0.0, &u);
    if n == 0 {
        return Ok(u);
    }
    let stepper = match cfg.integrator {
        Integrator::Strang => Some(Stepper::strang(lat, *params, dt)?),
        Integrator::Rk4 => Some(Stepper::rk4(lat, *params, dt)?),
        Integrator::DuhamelPicard => None,
    };
    let mut values = u.into_values();
    for step in 1..=n {
        match &stepper {
            Some(s) => s.step_in_place(&mut values)?,
            None => {
                let cur = GridFunction::from_raw(lat, values);
                values = picard_iterate(&cur, params, dt, PICARD_ITERATIONS)?.into_values();
            }
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LnlsError::Instability(format!("non-finite state at step {step}")));
        }
        let cur = GridFunction::from_raw(lat, values);
        observe(step, step as f64 * dt, &cur);
        values = cur.into_values();
    }
    u = GridFunction::from_raw(lat, values);
    Ok(u)
}

/// JSON manifest stored next to the snapshot binaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub d: usize,
    #[serde(rename = "M")]
    pub half_size: usize,
    pub params: NlsParams,
    pub config: EvolutionConfig,
    pub times: Vec<f64>,
    pub files: Vec<String>,
    pub conserved: Vec<ConservedQuantities>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn write_trajectory(traj: &Trajectory, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(traj.snapshots.len());
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:05}.bin");
        write_grid_binary(snap, BufWriter::new(File::create(dir.join(&name))?))?;
        files.push(name);
    }
    let lat = traj.last().lattice();
    let manifest = TrajectoryManifest {
        d: lat.dim(),
        half_size: lat.half_size(),
        params: traj.params,
        config: traj.config,
        times: traj.times.clone(),
        files,
        conserved: traj.conserved.clone(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join(MANIFEST_NAME))?), &manifest)?;
    Ok(())
}

pub fn read_trajectory(dir: &Path) -> Result<Trajectory> {
    let manifest: TrajectoryManifest =
        serde_json::from_reader(BufReader::new(File::open(dir.join(MANIFEST_NAME))?))?;
    let snapshots = manifest
        .files
        .iter()
        .map(|f| read_grid_binary(BufReader::new(File::open(dir.join(f))?)))
        .collect::<Result<Vec<_>>>()?;
    if snapshots.len() != manifest.times.len() || snapshots.len() != manifest.conserved.len() {
        return Err(LnlsError::Format("manifest tables have inconsistent lengths".into()));
    }
    Ok(Trajectory {
        params: manifest.params,
        config: manifest.config,
        times: manifest.times,
        snapshots,
        conserved: manifest.conserved,
    })
}
