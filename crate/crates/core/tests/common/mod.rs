#![allow(dead_code)]

use nanowire::harness::Simulation;
use nanowire::physics::MoleculeState;

/// Contact-chain tolerance (μm).
pub const CHAIN_TOL: f64 = 1e-9;

/// Checks the growing-wire invariants of a live simulation.
///
/// Axial order is checked over the transmitter and bound members; the receiver
/// is a fixed anchor whose centre may sit behind the tip it touches. Contact
/// distances are checked over every consecutive pair, receiver included.
pub fn check_wire(sim: &Simulation) -> Result<(), String> {
    let wire = &sim.assembly().wire;
    let mol = &sim.world().molecules;
    let grown: Vec<usize> = wire
        .members
        .iter()
        .copied()
        .filter(|&id| id == wire.members[0] || mol[id].state == MoleculeState::Bound)
        .collect();
    for w in grown.windows(2) {
        let (a, b) = (wire.axial(mol[w[0]].position), wire.axial(mol[w[1]].position));
        if b <= a {
            return Err(format!("axial order broken between {} ({a}) and {} ({b})", w[0], w[1]));
        }
    }
    for w in wire.members.windows(2) {
        let (a, b) = (&mol[w[0]], &mol[w[1]]);
        let gap = a.position.distance(b.position) - a.radius - b.radius;
        if gap.abs() > CHAIN_TOL {
            return Err(format!("members {} and {} are {gap:e} μm from contact", w[0], w[1]));
        }
    }
    Ok(())
}
