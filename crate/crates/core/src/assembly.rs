//! Nanowire growth: deciding whether a molecule that strikes the wire tip sticks.
//!
//! The wire starts as the transmitter alone and grows one molecule at a time,
//! always at its last member (the tip). A striking free molecule attaches only
//! if it passes four gates:
//!
//! * **angle**: it lies within `angle_range` of the current growth direction;
//! * **progress**: its axial coordinate exceeds the tip's (growth moves toward
//!   the receiver);
//! * **field**: with a non-zero field intensity `M`, its radial distance from
//!   the transmitter-receiver line is at most `z0 / (1 + beta * M)`;
//! * **enzyme**: a Bernoulli draw succeeding with probability `C`.
//!
//! An attached molecule is frozen (zero velocity, state `Bound`) and snapped to
//! exact contact with the tip.

use rand::Rng;

use crate::geometry::Vec3;
use crate::physics::{CollisionEvent, ContactHandler, ContactResponse, Molecule, MoleculeState};

/// Tolerance used for the angle tie rule (an angle of exactly `angle_range` is accepted).
const ANGLE_TIE_TOLERANCE: f64 = 1e-12;
/// Slack on the tip-receiver contact test, absorbing rounding in snapped positions.
const CONTACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyParams {
    /// Magnetic field intensity `M` (dimensionless, >= 0).
    pub field_intensity: f64,
    /// Enzyme concentration `C` in `[0, 1]`, used directly as binding probability.
    pub enzyme_concentration: f64,
    /// Maximum deviation from the growth direction (radians, in `(0, pi]`).
    pub angle_range: f64,
    /// Gain `beta` in the lateral window `z0 / (1 + beta * M)`.
    pub field_gain: f64,
    /// When false, the progress gate is skipped for a zero field.
    pub progress_in_zero_field: bool,
    /// Surface gap (μm) within which a molecule attaching next to the receiver
    /// is placed in contact with both the tip and the receiver.
    pub capture_gap: f64,
}

impl Default for AssemblyParams {
    fn default() -> Self {
        AssemblyParams {
            field_intensity: 20.0,
            enzyme_concentration: 1.0,
            angle_range: 5.0 * std::f64::consts::PI / 12.0,
            field_gain: 0.065,
            progress_in_zero_field: true,
            capture_gap: 0.5,
        }
    }
}

impl AssemblyParams {
    /// Human-readable list of every violated parameter constraint.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.field_intensity >= 0.0 && self.field_intensity.is_finite()) {
            out.push(format!(
                "field_intensity must be finite and >= 0 (got {})",
                self.field_intensity
            ));
        }
        if !(0.0..=1.0).contains(&self.enzyme_concentration) {
            out.push(format!(
                "enzyme_concentration must lie in [0, 1] (got {})",
                self.enzyme_concentration
            ));
        }
        if !(self.angle_range > 0.0 && self.angle_range <= std::f64::consts::PI) {
            out.push(format!("angle_range must lie in (0, pi] (got {})", self.angle_range));
        }
        if !(self.field_gain > 0.0 && self.field_gain.is_finite()) {
            out.push(format!("field_gain must be finite and > 0 (got {})", self.field_gain));
        }
        if !(self.capture_gap >= 0.0 && self.capture_gap.is_finite()) {
            out.push(format!(
                "capture_gap must be finite and >= 0 (got {})",
                self.capture_gap
            ));
        }
        out
    }
}

/// The growing chain of molecules, transmitter first.
#[derive(Debug, Clone, PartialEq)]
pub struct Wire {
    pub members: Vec<usize>,
    /// Transmitter centre.
    pub axis_origin: Vec3,
    /// Unit vector from transmitter to receiver.
    pub axis_direction: Vec3,
    pub complete: bool,
}

impl Wire {
    pub fn new(transmitter: usize, axis_origin: Vec3, axis_direction: Vec3) -> Self {
        Wire {
            members: vec![transmitter],
            axis_origin,
            axis_direction: axis_direction.normalized().expect("non-zero axis direction"),
            complete: false,
        }
    }

    pub fn tip(&self) -> usize {
        *self.members.last().expect("wire always holds the transmitter")
    }

    pub fn previous(&self) -> Option<usize> {
        self.members.len().checked_sub(2).map(|k| self.members[k])
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Signed distance of `p` along the axis, measured from the transmitter centre.
    pub fn axial(&self, p: Vec3) -> f64 {
        (p - self.axis_origin).dot(self.axis_direction)
    }

    /// Distance of `p` from the transmitter-receiver line.
    pub fn radial(&self, p: Vec3) -> f64 {
        let d = p - self.axis_origin;
        (d - self.axis_direction * d.dot(self.axis_direction)).norm()
    }
}

/// A contact between the current tip and a free molecule on an incomplete wire.
pub fn is_tip_collision(event: &CollisionEvent, wire: &Wire, molecules: &[Molecule]) -> bool {
    if wire.complete {
        return false;
    }
    let tip = wire.tip();
    let other = if event.id_a == tip {
        event.id_b
    } else if event.id_b == tip {
        event.id_a
    } else {
        return false;
    };
    molecules[other].is_free()
}

/// True iff the angle between the growth direction and `candidate - tip` is at
/// most `angle_range`. Without a previous member the growth direction is the axis.
pub fn angle_gate(
    candidate: &Molecule,
    tip: &Molecule,
    prev: Option<&Molecule>,
    axis_direction: Vec3,
    angle_range: f64,
) -> bool {
    let growth = prev.map_or(axis_direction, |p| tip.position - p.position);
    let offset = candidate.position - tip.position;
    growth.angle_to(offset) <= angle_range + ANGLE_TIE_TOLERANCE
}

/// True iff the candidate's axial coordinate strictly exceeds the tip's.
pub fn progress_gate(candidate: &Molecule, tip: &Molecule, wire: &Wire) -> bool {
    wire.axial(candidate.position) > wire.axial(tip.position)
}

/// Radius of the lateral admission window for a given field.
pub fn lateral_window(half_width: f64, params: &AssemblyParams) -> f64 {
    half_width / (1.0 + params.field_gain * params.field_intensity)
}

/// Zero field admits everything; otherwise the candidate must sit within
/// [`lateral_window`] of the transmitter-receiver line.
pub fn field_gate(candidate: &Molecule, wire: &Wire, params: &AssemblyParams, half_width: f64) -> bool {
    if params.field_intensity == 0.0 {
        return true;
    }
    wire.radial(candidate.position) <= lateral_window(half_width, params)
}

/// Bernoulli trial with success probability `C`.
pub fn enzyme_gate<R: Rng + ?Sized>(params: &AssemblyParams, rng: &mut R) -> bool {
    rng.random::<f64>() < params.enzyme_concentration
}

/// Outcome of evaluating the gates for one tip collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateOutcome {
    pub angle: bool,
    pub progress: bool,
    pub field: bool,
    /// `None` when the draw was skipped because a geometric gate already failed.
    pub enzyme: Option<bool>,
}

impl GateOutcome {
    pub fn all_pass(&self) -> bool {
        self.angle && self.progress && self.field && self.enzyme == Some(true)
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyCounters {
    pub tip_collisions: u64,
    pub angle_pass: u64,
    pub progress_pass: u64,
    pub field_pass: u64,
    pub enzyme_draws: u64,
    pub enzyme_pass: u64,
    pub conjunction_pass: u64,
    pub attachments: u64,
    pub captures: u64,
}

/// Everything the growth rules need that is not per-collision.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub wire: Wire,
    pub params: AssemblyParams,
    pub receiver: usize,
    /// Half-width of the box perpendicular to the axis (`z0`).
    pub half_width: f64,
    pub counters: AssemblyCounters,
    /// Absolute time at which the wire reached the receiver.
    pub formation_time: Option<f64>,
}

impl Assembly {
    pub fn new(wire: Wire, params: AssemblyParams, receiver: usize, half_width: f64) -> Self {
        Assembly {
            wire,
            params,
            receiver,
            half_width,
            counters: AssemblyCounters::default(),
            formation_time: None,
        }
    }

    /// Evaluates the gates for `candidate` against the current tip.
    pub fn evaluate_gates<R: Rng + ?Sized>(
        &self,
        molecules: &[Molecule],
        candidate: usize,
        rng: &mut R,
    ) -> GateOutcome {
        let cand = &molecules[candidate];
        let tip = &molecules[self.wire.tip()];
        let prev = self.wire.previous().map(|p| &molecules[p]);
        let angle = angle_gate(cand, tip, prev, self.wire.axis_direction, self.params.angle_range);
        let progress = if self.params.field_intensity == 0.0 && !self.params.progress_in_zero_field {
            true
        } else {
            progress_gate(cand, tip, &self.wire)
        };
        let field = field_gate(cand, &self.wire, &self.params, self.half_width);
        let enzyme = (angle && progress && field).then(|| enzyme_gate(&self.params, rng));
        GateOutcome {
            angle,
            progress,
            field,
            enzyme,
        }
    }

    /// Attaches `candidate` to the tip if all gates pass.
    ///
    /// On success the candidate is frozen, snapped to contact with the tip and
    /// appended to the wire. Returns whether it attached.
    pub fn try_attach<R: Rng + ?Sized>(&mut self, molecules: &mut [Molecule], candidate: usize, rng: &mut R) -> bool {
        let gates = self.evaluate_gates(molecules, candidate, rng);
        let c = &mut self.counters;
        c.tip_collisions += 1;
        c.angle_pass += u64::from(gates.angle);
        c.progress_pass += u64::from(gates.progress);
        c.field_pass += u64::from(gates.field);
        if let Some(pass) = gates.enzyme {
            c.enzyme_draws += 1;
            c.enzyme_pass += u64::from(pass);
        }
        if !gates.all_pass() {
            return false;
        }
        c.conjunction_pass += 1;

        let tip = molecules[self.wire.tip()];
        let cand = molecules[candidate];
        let position = match self.capture_position(molecules, &tip, &cand) {
            Some(p) => {
                self.counters.captures += 1;
                p
            }
            None => snap_to_contact(&tip, &cand),
        };
        let m = &mut molecules[candidate];
        m.position = position;
        m.velocity = Vec3::ZERO;
        m.state = MoleculeState::Bound;
        self.wire.members.push(candidate);
        self.counters.attachments += 1;
        true
    }

    /// Contact position touching both the tip and the receiver, when the
    /// candidate is within `capture_gap` of the receiver surface and the
    /// adjusted position keeps axial progress without overlapping anything.
    fn capture_position(&self, molecules: &[Molecule], tip: &Molecule, cand: &Molecule) -> Option<Vec3> {
        let receiver = &molecules[self.receiver];
        let gap = cand.position.distance(receiver.position) - receiver.radius - cand.radius;
        if gap > self.params.capture_gap {
            return None;
        }
        let p = bridge_point(
            tip.position,
            tip.radius + cand.radius,
            receiver.position,
            receiver.radius + cand.radius,
            cand.position,
        )?;
        if self.wire.axial(p) <= self.wire.axial(tip.position) {
            return None;
        }
        let clear = molecules.iter().all(|m| {
            m.id == cand.id
                || m.id == tip.id
                || m.id == receiver.id
                || p.distance(m.position) >= m.radius + cand.radius - 1e-12
        });
        clear.then_some(p)
    }

    /// Marks the wire complete if the tip touches the receiver.
    pub fn check_completion(&mut self, molecules: &[Molecule]) -> bool {
        if self.wire.complete {
            return true;
        }
        let tip = &molecules[self.wire.tip()];
        let receiver = &molecules[self.receiver];
        if tip.position.distance(receiver.position) <= tip.radius + receiver.radius + CONTACT_TOLERANCE {
            self.wire.members.push(self.receiver);
            self.wire.complete = true;
        }
        self.wire.complete
    }
}

/// Position of `cand` moved along the tip-candidate line to exact contact.
pub fn snap_to_contact(tip: &Molecule, cand: &Molecule) -> Vec3 {
    let n = (cand.position - tip.position).normalized().unwrap_or(Vec3::UNIT_X);
    tip.position + n * (tip.radius + cand.radius)
}

/// Point at distance `ra` from `a` and `rb` from `b` closest to `near`.
fn bridge_point(a: Vec3, ra: f64, b: Vec3, rb: f64, near: Vec3) -> Option<Vec3> {
    let d = b.distance(a);
    if d == 0.0 || d > ra + rb || d < (ra - rb).abs() {
        return None;
    }
    let axis = (b - a) / d;
    let along = (d * d + ra * ra - rb * rb) / (2.0 * d);
    let ring = (ra * ra - along * along).max(0.0).sqrt();
    let centre = a + axis * along;
    let rel = near - centre;
    let lateral = rel - axis * rel.dot(axis);
    let dir = lateral.normalized().or_else(|| {
        let helper = if axis.x.abs() < 0.9 {
            Vec3::UNIT_X
        } else {
            Vec3::new(0.0, 1.0, 0.0)
        };
        axis.cross(helper).normalized()
    })?;
    Some(centre + dir * ring)
}

/// Contact handler that applies the growth rules for one simulation instance.
pub struct AssemblyHandler<'a, R: Rng + ?Sized> {
    pub assembly: &'a mut Assembly,
    pub rng: &'a mut R,
}

impl<R: Rng + ?Sized> ContactHandler for AssemblyHandler<'_, R> {
    fn on_contact(&mut self, molecules: &mut [Molecule], event: &CollisionEvent) -> ContactResponse {
        if !is_tip_collision(event, &self.assembly.wire, molecules) {
            return ContactResponse::Bounce;
        }
        // The tip may already touch the receiver (degenerate geometry).
        if self.assembly.check_completion(molecules) {
            self.assembly.formation_time.get_or_insert(event.time);
            return ContactResponse::Bounce;
        }
        let candidate = if event.id_a == self.assembly.wire.tip() {
            event.id_b
        } else {
            event.id_a
        };
        if !self.assembly.try_attach(molecules, candidate, self.rng) {
            return ContactResponse::Bounce;
        }
        if self.assembly.check_completion(molecules) {
            self.assembly.formation_time.get_or_insert(event.time);
        }
        ContactResponse::Absorbed
    }
}
