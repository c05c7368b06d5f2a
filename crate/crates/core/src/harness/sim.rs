//! A single seeded simulation run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::assembly::{Assembly, AssemblyHandler, Wire};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::harness::config::SimConfig;
use crate::physics::{Molecule, MoleculeState, PhysicsError, World};

/// Identifier of the random generator, recorded with every run.
pub const GENERATOR_ID: &str = "ChaCha20 (rand_chacha 0.9 ChaCha20Rng::seed_from_u64)";

pub const TRANSMITTER_ID: usize = 0;
pub const RECEIVER_ID: usize = 1;

/// Placement attempts per molecule before giving up.
const PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// Time (min).
    pub t: f64,
    /// Last assembled molecule (transmitter if none) projected on the transmitter-receiver axis (μm).
    pub tip_axial_position: f64,
    /// Number of wire members, transmitter included.
    pub wire_length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub formation_time: Option<f64>,
    pub final_wire_length: usize,
    pub seed: u64,
    pub completed: bool,
}

/// Live simulation state: mechanics, wire and the run's only random generator.
pub struct Simulation {
    config: SimConfig,
    world: World,
    assembly: Assembly,
    rng: ChaCha20Rng,
    frame: u64,
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        let molecules = place_molecules(config, &mut rng)?;
        let world = World::new(molecules, config.bounds);
        let axis = config.axis_direction().expect("validated");
        let wire = Wire::new(TRANSMITTER_ID, config.transmitter_center, axis);
        let assembly = Assembly::new(wire, config.assembly, RECEIVER_ID, config.lateral_half_width());
        Ok(Simulation {
            config: config.clone(),
            world,
            assembly,
            rng,
            frame: 0,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn assembly(&self) -> &Assembly {
        &self.assembly
    }

    pub fn time(&self) -> f64 {
        self.world.time
    }

    /// Advances one frame of length `dt`.
    pub fn step(&mut self) -> Result<(), PhysicsError> {
        self.world.apply_velocity_kick(&mut self.rng, self.config.velocity_kick);
        let mut handler = AssemblyHandler {
            assembly: &mut self.assembly,
            rng: &mut self.rng,
        };
        self.world.step(self.config.strategy, self.config.dt, &mut handler)?;
        self.frame += 1;
        // Frame count times dt avoids drift from repeated addition.
        self.world.time = self.frame as f64 * self.config.dt;
        Ok(())
    }

    pub fn record(&self) -> TraceRecord {
        let wire = &self.assembly.wire;
        // Once complete the receiver closes the wire; report the last assembled molecule.
        let last = if wire.complete { wire.members[wire.len() - 2] } else { wire.tip() };
        let tip = &self.world.molecules[last];
        TraceRecord {
            t: self.world.time,
            tip_axial_position: wire.axial(tip.position),
            wire_length: wire.len(),
        }
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            formation_time: self.assembly.formation_time,
            final_wire_length: self.assembly.wire.len(),
            seed: self.config.seed,
            completed: self.assembly.wire.complete,
        }
    }

    /// Runs until the wire completes or `t_max` is reached, sampling the trace.
    pub fn run(mut self) -> Result<(Vec<TraceRecord>, RunSummary)> {
        let total_frames = (self.config.t_max / self.config.dt - 1e-9).ceil() as u64;
        let mut trace = vec![self.record()];
        let mut samples = 1u64;
        while self.frame < total_frames && !self.assembly.wire.complete {
            self.step()?;
            let next_sample = samples as f64 * self.config.trace_interval;
            if self.assembly.wire.complete || self.world.time >= next_sample - 1e-9 * self.config.dt {
                trace.push(self.record());
                while samples as f64 * self.config.trace_interval <= self.world.time + 1e-9 * self.config.dt {
                    samples += 1;
                }
            }
        }
        let summary = self.summary();
        Ok((trace, summary))
    }
}

/// Executes one full run for `config`.
pub fn run_simulation(config: &SimConfig) -> Result<(Vec<TraceRecord>, RunSummary)> {
    Simulation::new(config)?.run()
}

fn place_molecules<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Vec<Molecule>> {
    let r = config.molecule_radius;
    let anchor_mass = |radius: f64| config.molecule_mass * (radius / r).powi(3);
    let mut molecules = Vec::with_capacity(config.n_molecules + 2);
    molecules.push(Molecule {
        id: TRANSMITTER_ID,
        position: config.transmitter_center,
        velocity: Vec3::ZERO,
        radius: config.transmitter_radius,
        mass: anchor_mass(config.transmitter_radius),
        state: MoleculeState::TransmitterAnchor,
    });
    molecules.push(Molecule {
        id: RECEIVER_ID,
        position: config.receiver_center,
        velocity: Vec3::ZERO,
        radius: config.receiver_radius,
        mass: anchor_mass(config.receiver_radius),
        state: MoleculeState::ReceiverAnchor,
    });

    let lo = config.bounds.min_corner;
    let hi = config.bounds.max_corner;
    for k in 0..3 {
        if hi[k] - lo[k] < 2.0 * r {
            return Err(Error::invalid("box is too small for a single molecule"));
        }
    }
    let speed = Normal::new(0.0, config.sigma_v).map_err(|e| Error::invalid(format!("sigma_v: {e}")))?;
    for id in 2..config.n_molecules + 2 {
        let mut placed = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let p = Vec3::new(
                rng.random_range(lo.x + r..=hi.x - r),
                rng.random_range(lo.y + r..=hi.y - r),
                rng.random_range(lo.z + r..=hi.z - r),
            );
            let clear = molecules.iter().all(|m| p.distance(m.position) > m.radius + r);
            if clear {
                placed = Some(p);
                break;
            }
        }
        let Some(position) = placed else {
            return Err(Error::invalid(format!(
                "could not place molecule {id} without overlap after {PLACEMENT_ATTEMPTS} attempts; reduce n_molecules"
            )));
        };
        let velocity = Vec3::new(speed.sample(rng), speed.sample(rng), speed.sample(rng));
        molecules.push(Molecule::new_free(id, position, velocity, r, config.molecule_mass));
    }
    Ok(molecules)
}
