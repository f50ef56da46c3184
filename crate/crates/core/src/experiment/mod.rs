//! Config-driven experiments behind the `hmfp` binary.
//!
//! Every command writes into `<output.dir>/<command>-<hash>`, where the hash
//! is taken over the canonical config text, and returns the directory.

mod config;
mod perturb;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{sweep_variants, ExperimentConfig, RawConfig};
pub use perturb::{Perturbation, PerturbationKind};

use crate::error::{HmfError, Result};
use crate::functionals::{casimir_integral, free_energy_J, hamiltonian, orbital_distance, DiagnosticsRecord};
use crate::grid::{integrate, DistributionField, Potential};
use crate::interaction::solve_potential;
use crate::rearrangement::{decreasing_profile, equimeasurability_defect, rearrange_with_energy};
use crate::snapshot::Snapshot;
use crate::steady_states::{renormalize_to_constraints, self_consistent_solve, SteadyStateResult};
use crate::vlasov::evolve;

pub const STEADY_SNAPSHOT: &str = "steady.snap";
pub const FINAL_SNAPSHOT: &str = "final.snap";
pub const REARRANGED_SNAPSHOT: &str = "rearranged.snap";
pub const REPORT: &str = "report.txt";
pub const DIAGNOSTICS: &str = "diagnostics.csv";
pub const STABILITY: &str = "stability.csv";
pub const SUMMARY: &str = "summary.txt";
pub const PROFILE: &str = "profile.csv";
pub const STABILITY_HEADER: &str = "t,orbital_distance,shift,mass,hamiltonian,casimir";

/// Process exit status for an error: 1 config or I/O, 2 nonconvergence,
/// 3 solver abort.
pub fn exit_code(err: &HmfError) -> i32 {
    match err {
        HmfError::NonConvergence { .. } | HmfError::BracketFailure(_) => 2,
        HmfError::SolverAbort { .. } | HmfError::BlowUp { .. } => 3,
        _ => 1,
    }
}

/// Where the potential used by [`cmd_rearrange`] comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiSource {
    SelfConsistent,
    Zero,
}

impl std::str::FromStr for PhiSource {
    type Err = HmfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self" => Ok(Self::SelfConsistent),
            "zero" => Ok(Self::Zero),
            other => Err(HmfError::InvalidArgument(format!("--phi must be `self` or `zero`, got {other:?}"))),
        }
    }
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn solve_steady(cfg: &ExperimentConfig) -> Result<SteadyStateResult> {
    let grid = cfg.grid()?;
    let spec = cfg.casimir()?;
    let constraints = cfg.constraints()?;
    let eps = cfg.seed_amplitude;
    let seed = Potential::from_fn(grid, |t| eps * t.cos())?;
    self_consistent_solve(&spec, &constraints, &seed, &cfg.solver)
}

fn steady_report(cfg: &ExperimentConfig, r: &SteadyStateResult) -> Result<String> {
    let spec = cfg.casimir()?;
    let mut s = String::new();
    writeln!(s, "casimir = {spec}").unwrap();
    writeln!(s, "lambda = {}", r.multipliers.lambda).unwrap();
    match r.multipliers.mu {
        Some(mu) => writeln!(s, "mu = {mu}").unwrap(),
        None => writeln!(s, "mu = none").unwrap(),
    }
    writeln!(s, "iterations = {}", r.iterations).unwrap();
    writeln!(s, "fixed_point_residual = {}", r.fixed_point_residual).unwrap();
    writeln!(s, "mass = {}", integrate(&r.field)).unwrap();
    writeln!(s, "casimir_value = {}", casimir_integral(&r.field, &spec)).unwrap();
    writeln!(s, "hamiltonian = {}", hamiltonian(&r.field)).unwrap();
    writeln!(s, "free_energy = {}", free_energy_J(&r.field, &spec)).unwrap();
    writeln!(s, "potential_min = {}", r.potential.min()).unwrap();
    writeln!(s, "potential_max = {}", r.potential.max()).unwrap();
    writeln!(s, "discarded_tail_mass = {}", r.discarded_tail_mass).unwrap();
    Ok(s)
}

/// Builds the ground state; writes `steady.snap` and `report.txt`.
pub fn cmd_steady(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let r = solve_steady(cfg)?;
    let dir = cfg.run_dir("steady");
    prepare(&dir)?;
    Snapshot::new(r.field.clone(), 0.0).save(dir.join(STEADY_SNAPSHOT))?;
    fs::write(dir.join(REPORT), steady_report(cfg, &r)?)?;
    Ok(dir)
}

/// Evolves a snapshot; writes `diagnostics.csv`, `final.snap` and, with
/// `evolve.snapshot_every = k > 0`, `snap-<step>.snap` every `k` records.
pub fn cmd_evolve(cfg: &ExperimentConfig, input: &Path) -> Result<PathBuf> {
    let start = Snapshot::load(input)?;
    let spec = cfg.casimir()?;
    let dir = cfg.run_dir("evolve");
    prepare(&dir)?;
    let mut csv = String::from(DiagnosticsRecord::CSV_HEADER);
    csv.push('\n');
    let mut records = 0usize;
    let every = cfg.snapshot_every;
    let t0 = start.time;
    let out = evolve(&start.field, &cfg.evolve, &spec, |step, rec, f| {
        let rec = DiagnosticsRecord { time: t0 + rec.time, ..*rec };
        csv.push_str(&rec.csv_row());
        csv.push('\n');
        if every > 0 && records % every == 0 {
            Snapshot::new(f.clone(), rec.time).save(dir.join(format!("snap-{step:06}.snap")))?;
        }
        records += 1;
        Ok(())
    })?;
    fs::write(dir.join(DIAGNOSTICS), csv)?;
    let final_time = if out.steps == 0 { t0 } else { t0 + out.time };
    let final_field = if out.steps == 0 { start.field } else { out.field };
    Snapshot::new(final_field, final_time).save(dir.join(FINAL_SNAPSHOT))?;
    Ok(dir)
}

/// Result of a stability run.
#[derive(Clone, Debug)]
pub struct StabilitySummary {
    pub dir: PathBuf,
    pub sup_distance: f64,
    pub initial_distance: f64,
}

/// Perturbs the steady state (read from `input` or built in-run), evolves it
/// and records the orbital distance to the unperturbed state.
pub fn cmd_stability(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<StabilitySummary> {
    let spec = cfg.casimir()?;
    let f0 = match input {
        Some(p) => Snapshot::load(p)?.field,
        None => solve_steady(cfg)?.field,
    };
    let mut init = cfg.perturbation.apply(&f0);
    if cfg.perturbation.renormalize {
        let mut constraints = cfg.constraints().unwrap_or(crate::steady_states::ConstraintSet::one(integrate(&f0))?);
        if constraints.mj.is_some() {
            constraints.mj = Some(casimir_integral(&f0, &spec));
        }
        constraints.m1 = integrate(&f0);
        init = renormalize_to_constraints(&init, &spec, &constraints)?;
    }
    let dir = cfg.run_dir("stability");
    prepare(&dir)?;
    let mut csv = String::from(STABILITY_HEADER);
    csv.push('\n');
    let mut sup: f64 = 0.0;
    let mut first = f64::NAN;
    evolve(&init, &cfg.evolve, &spec, |_, rec, f| {
        let (d, shift) = orbital_distance(f, &f0)?;
        if first.is_nan() {
            first = d;
        }
        sup = sup.max(d);
        writeln!(csv, "{},{},{},{},{},{}", rec.time, d, shift, rec.mass, rec.hamiltonian, rec.casimir).unwrap();
        Ok(())
    })?;
    fs::write(dir.join(STABILITY), csv)?;
    Snapshot::new(f0, 0.0).save(dir.join(STEADY_SNAPSHOT))?;
    let summary = format!(
        "sup_distance = {sup}\ninitial_distance = {first}\namplitude = {}\nkind = {:?}\n",
        cfg.perturbation.amplitude, cfg.perturbation.kind
    );
    fs::write(dir.join(SUMMARY), summary)?;
    Ok(StabilitySummary { dir, sup_distance: sup, initial_distance: first })
}

/// Rearranges a snapshot with respect to the microscopic energy.
pub fn cmd_rearrange(cfg: &ExperimentConfig, input: &Path, phi: PhiSource) -> Result<PathBuf> {
    let snap = Snapshot::load(input)?;
    let f = &snap.field;
    let potential = match phi {
        PhiSource::SelfConsistent => solve_potential(f),
        PhiSource::Zero => Potential::zero(*f.grid()),
    };
    let g = rearrange_with_energy(f, &potential)?;
    let defect = equimeasurability_defect(f, &g)?;
    let grid = f.grid();
    let dir = cfg.run_dir(match phi {
        PhiSource::SelfConsistent => "rearrange-self",
        PhiSource::Zero => "rearrange-zero",
    });
    prepare(&dir)?;
    Snapshot::new(g.clone(), snap.time).save(dir.join(REARRANGED_SNAPSHOT))?;
    fs::write(dir.join(PROFILE), decreasing_profile(f).to_csv())?;
    let mut s = String::new();
    writeln!(s, "equimeasurability_defect = {defect}").unwrap();
    writeln!(s, "defect_tolerance = {}", 4.0 * grid.n_theta() as f64 * grid.cell_area()).unwrap();
    writeln!(s, "mass_in = {}", integrate(f)).unwrap();
    writeln!(s, "mass_out = {}", integrate(&g)).unwrap();
    writeln!(s, "hamiltonian_in = {}", hamiltonian(f)).unwrap();
    writeln!(s, "hamiltonian_out = {}", hamiltonian(&g)).unwrap();
    fs::write(dir.join(REPORT), s)?;
    Ok(dir)
}

/// Diagnostics of a single snapshot.
pub fn cmd_diag(cfg: &ExperimentConfig, input: &Path) -> Result<(PathBuf, DiagnosticsRecord)> {
    let snap = Snapshot::load(input)?;
    let rec = DiagnosticsRecord::compute(&snap.field, &cfg.casimir()?, snap.time);
    let dir = cfg.run_dir("diag");
    prepare(&dir)?;
    fs::write(dir.join(DIAGNOSTICS), format!("{}\n{}\n", DiagnosticsRecord::CSV_HEADER, rec.csv_row()))?;
    Ok((dir, rec))
}

/// Reads a diagnostics CSV written by [`cmd_evolve`] or [`cmd_diag`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(DiagnosticsRecord::CSV_HEADER) {
        return Err(HmfError::InvalidArgument(format!("{}: unexpected header", path.display())));
    }
    lines.filter(|l| !l.is_empty()).map(DiagnosticsRecord::parse_csv_row).collect()
}

/// Convenience for tests and scripts: a field from a snapshot file.
pub fn load_field(path: &Path) -> Result<DistributionField> {
    Ok(Snapshot::load(path)?.field)
}
