//! Hard-sphere kinematics in a reflecting box.
//!
//! Two collision-detection strategies are provided:
//!
//! * [`Strategy::Pit`] (periodic interference test) advances every free molecule
//!   ballistically by a whole frame and then resolves every pair that both
//!   overlaps and is approaching. Nothing is checked between frames, so bodies
//!   may interpenetrate or tunnel.
//! * [`Strategy::Pic`] (predicted instant of collision) is event driven: inside
//!   each frame it solves for the exact contact instants, advances the system to
//!   the earliest one, resolves it and continues until the frame is consumed.
//!   Bodies never interpenetrate beyond floating-point noise.
//!
//! Only [`MoleculeState::Free`] molecules move. Anchors and bound molecules are
//! immovable obstacles; a free molecule striking one is reflected as if the
//! obstacle had infinite mass.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::geometry::{SimBox, Vec3};

/// Upper bound on processed events inside a single PIC frame.
pub const MAX_EVENTS_PER_FRAME: usize = 1_000_000;

/// Events closer than this (in minutes) are treated as simultaneous and
/// processed in ascending `(id_a, id_b)` order.
pub const SIMULTANEITY_WINDOW: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("coincident centers for molecules {a} and {b}")]
    CoincidentCenters { a: usize, b: usize },
    #[error("event storm: more than {limit} events within one frame starting at t = {frame_start} min")]
    EventStorm { limit: usize, frame_start: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoleculeState {
    Free,
    Bound,
    TransmitterAnchor,
    ReceiverAnchor,
}

impl MoleculeState {
    #[inline]
    pub fn is_free(self) -> bool {
        self == MoleculeState::Free
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Molecule {
    pub id: usize,
    pub position: Vec3,
    pub velocity: Vec3,
    pub radius: f64,
    pub mass: f64,
    pub state: MoleculeState,
}

impl Molecule {
    pub fn new_free(id: usize, position: Vec3, velocity: Vec3, radius: f64, mass: f64) -> Self {
        Molecule {
            id,
            position,
            velocity,
            radius,
            mass,
            state: MoleculeState::Free,
        }
    }

    pub fn is_free(&self) -> bool {
        self.state.is_free()
    }

    pub fn momentum(&self) -> Vec3 {
        self.velocity * self.mass
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.velocity.norm_squared()
    }
}

/// A detected contact between two molecules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub id_a: usize,
    pub id_b: usize,
    /// Absolute simulation time of the contact (min).
    pub time: f64,
    /// Unit vector from `a`'s centre to `b`'s centre at contact.
    pub normal: Vec3,
}

/// True iff the two centres are getting closer: `(pb - pa) . (vb - va) < 0`.
pub fn approaching(a: &Molecule, b: &Molecule) -> bool {
    (b.position - a.position).dot(b.velocity - a.velocity) < 0.0
}

/// True iff the spheres touch or overlap. Exact contact counts.
pub fn interfere(a: &Molecule, b: &Molecule) -> bool {
    let reach = a.radius + b.radius;
    (b.position - a.position).norm_squared() <= reach * reach
}

/// Centre-line unit normal from `a` to `b`.
pub fn contact_normal(a: &Molecule, b: &Molecule) -> Result<Vec3, PhysicsError> {
    (b.position - a.position)
        .normalized()
        .ok_or(PhysicsError::CoincidentCenters { a: a.id, b: b.id })
}

/// Two-body elastic outcome for smooth spheres.
///
/// The velocity components along the centre line are exchanged according to the
/// masses; tangential components are untouched.
pub fn resolve_elastic(a: &Molecule, b: &Molecule) -> Result<(Vec3, Vec3), PhysicsError> {
    let n = contact_normal(a, b)?;
    let closing = (a.velocity - b.velocity).dot(n);
    let total = a.mass + b.mass;
    let va = a.velocity - n * (2.0 * b.mass / total * closing);
    let vb = b.velocity + n * (2.0 * a.mass / total * closing);
    Ok((va, vb))
}

/// Velocity of `mobile` after bouncing off an immovable sphere.
pub fn reflect_off_static(mobile: &Molecule, fixed: &Molecule) -> Result<Vec3, PhysicsError> {
    let n = contact_normal(fixed, mobile)?;
    let vn = mobile.velocity.dot(n);
    Ok(mobile.velocity - n * (2.0 * vn))
}

/// Earliest `t >= 0` at which the two spheres touch, assuming straight-line motion.
///
/// Receding or relatively static pairs yield `None`; an approaching pair that
/// already overlaps yields `Some(0.0)`.
pub fn time_to_collision(a: &Molecule, b: &Molecule) -> Option<f64> {
    let dp = b.position - a.position;
    let dv = b.velocity - a.velocity;
    let half_b = dp.dot(dv);
    if half_b >= 0.0 {
        return None;
    }
    let reach = a.radius + b.radius;
    let c = dp.norm_squared() - reach * reach;
    if c <= 0.0 {
        return Some(0.0);
    }
    let a2 = dv.norm_squared();
    let disc = half_b * half_b - a2 * c;
    if disc < 0.0 {
        return None;
    }
    // Smaller root of a2 t^2 + 2 half_b t + c = 0, written to avoid cancellation.
    Some(c / (-half_b + disc.sqrt()))
}

/// A wall of the box, identified by axis and side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wall {
    pub axis: usize,
    pub upper: bool,
}

/// Earliest instant at which a free molecule's surface reaches a wall.
pub fn time_to_wall(m: &Molecule, bounds: &SimBox) -> Option<(f64, Wall)> {
    let mut best: Option<(f64, Wall)> = None;
    for axis in 0..3 {
        let v = m.velocity[axis];
        let p = m.position[axis];
        let candidate = if v > 0.0 {
            let hi = bounds.max_corner[axis] - m.radius;
            Some(((hi - p) / v, Wall { axis, upper: true }))
        } else if v < 0.0 {
            let lo = bounds.min_corner[axis] + m.radius;
            Some(((lo - p) / v, Wall { axis, upper: false }))
        } else {
            None
        };
        if let Some((t, wall)) = candidate {
            let t = t.max(0.0);
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, wall));
            }
        }
    }
    best
}

/// Specular reflection of the coordinate `p` (and velocity `v`) into `[lo, hi]`.
fn reflect_into(p: &mut f64, v: &mut f64, lo: f64, hi: f64) -> bool {
    let mut bounced = false;
    loop {
        if *p < lo {
            *p = 2.0 * lo - *p;
            *v = -*v;
        } else if *p > hi {
            *p = 2.0 * hi - *p;
            *v = -*v;
        } else {
            return bounced;
        }
        bounced = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Pit,
    Pic,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Pit => "PIT",
            Strategy::Pic => "PIC",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PIT" => Ok(Strategy::Pit),
            "PIC" => Ok(Strategy::Pic),
            other => Err(format!("unknown collision strategy '{other}' (expected PIT or PIC)")),
        }
    }
}

/// What a [`ContactHandler`] did with a contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactResponse {
    /// Fall back to the default elastic resolution.
    Bounce,
    /// The handler changed the molecules itself (for example by freezing one).
    Absorbed,
}

/// Hook consulted for every molecule-molecule contact before elastic resolution.
pub trait ContactHandler {
    fn on_contact(&mut self, molecules: &mut [Molecule], event: &CollisionEvent) -> ContactResponse;
}

/// Handler that always bounces.
#[derive(Debug, Default, Clone, Copy)]
pub struct ElasticOnly;

impl ContactHandler for ElasticOnly {
    fn on_contact(&mut self, _: &mut [Molecule], _: &CollisionEvent) -> ContactResponse {
        ContactResponse::Bounce
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StepStats {
    pub pair_contacts: u64,
    pub elastic_resolutions: u64,
    pub static_reflections: u64,
    pub absorbed: u64,
    pub wall_bounces: u64,
    pub pic_events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoggedKind {
    Pair { a: usize, b: usize },
    Wall { id: usize, wall: Wall },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoggedEvent {
    pub time: f64,
    pub kind: LoggedKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Partner {
    Molecule(usize),
    Wall(Wall),
}

#[derive(Debug, Clone, Copy)]
struct Scheduled {
    /// Frame-local time of the event.
    time: f64,
    a: usize,
    partner: Partner,
    version_a: u64,
    version_b: u64,
}

impl Scheduled {
    fn key(&self) -> (usize, usize) {
        match self.partner {
            Partner::Molecule(b) => (self.a, b),
            Partner::Wall(w) => (self.a, usize::MAX - (2 * w.axis + usize::from(w.upper))),
        }
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| self.key().cmp(&other.key()))
    }
}

/// The full mechanical state: molecules indexed by id, box, and clock.
#[derive(Debug, Clone)]
pub struct World {
    pub molecules: Vec<Molecule>,
    pub bounds: SimBox,
    /// Simulation time (min).
    pub time: f64,
    pub stats: StepStats,
    event_log: Option<Vec<LoggedEvent>>,
    /// Sweep order from the previous frame; nearly sorted, so re-sorting is cheap.
    sweep_order: Vec<usize>,
}

impl World {
    /// Builds a world. Molecule ids must equal their index.
    pub fn new(molecules: Vec<Molecule>, bounds: SimBox) -> Self {
        assert!(
            molecules.iter().enumerate().all(|(i, m)| m.id == i),
            "molecule ids must match their index"
        );
        World {
            molecules,
            bounds,
            time: 0.0,
            stats: StepStats::default(),
            event_log: None,
            sweep_order: Vec::new(),
        }
    }

    /// Enables or disables recording of every processed contact.
    pub fn record_events(&mut self, on: bool) {
        self.event_log = on.then(Vec::new);
    }

    pub fn event_log(&self) -> &[LoggedEvent] {
        self.event_log.as_deref().unwrap_or(&[])
    }

    pub fn total_momentum(&self) -> Vec3 {
        self.molecules
            .iter()
            .filter(|m| m.is_free())
            .fold(Vec3::ZERO, |acc, m| acc + m.momentum())
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.molecules
            .iter()
            .filter(|m| m.is_free())
            .map(Molecule::kinetic_energy)
            .sum()
    }

    /// Adds an independent zero-mean Gaussian increment to every free velocity component.
    pub fn apply_velocity_kick<R: Rng + ?Sized>(&mut self, rng: &mut R, sigma: f64) {
        if sigma <= 0.0 {
            return;
        }
        let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
        for m in self.molecules.iter_mut().filter(|m| m.is_free()) {
            m.velocity += Vec3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng));
        }
    }

    pub fn step<H: ContactHandler>(
        &mut self,
        strategy: Strategy,
        dt: f64,
        handler: &mut H,
    ) -> Result<(), PhysicsError> {
        match strategy {
            Strategy::Pit => self.step_pit(dt, handler),
            Strategy::Pic => self.step_pic(dt, handler),
        }
    }

    /// Largest pairwise interpenetration depth (μm) among pairs involving a free molecule.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, j) in self.sweep_pairs(|m| m.radius) {
            let (a, b) = (&self.molecules[i], &self.molecules[j]);
            if !a.is_free() && !b.is_free() {
                continue;
            }
            let depth = a.radius + b.radius - a.position.distance(b.position);
            worst = worst.max(depth);
        }
        worst
    }

    /// Pairs `(i, j)`, `i < j`, whose x-intervals `[x - r, x + r]` overlap, for `r = reach(m)`.
    fn sweep_pairs<F: Fn(&Molecule) -> f64>(&self, reach: F) -> Vec<(usize, usize)> {
        self.sweep_pairs_from(&mut Vec::new(), reach)
    }

    /// Sweep and prune along x, then a bounding-sphere test. Candidate pairs
    /// are those whose reach spheres intersect. `order` is reused between calls.
    fn sweep_pairs_from<F: Fn(&Molecule) -> f64>(&self, order: &mut Vec<usize>, reach: F) -> Vec<(usize, usize)> {
        let n = self.molecules.len();
        let r: Vec<f64> = self.molecules.iter().map(reach).collect();
        let lo: Vec<f64> = self.molecules.iter().zip(&r).map(|(m, r)| m.position.x - r).collect();
        let before = |a: usize, b: usize| lo[a].total_cmp(&lo[b]).then(a.cmp(&b)).is_lt();
        if order.len() == n {
            for k in 1..n {
                let cur = order[k];
                let mut h = k;
                while h > 0 && before(cur, order[h - 1]) {
                    order[h] = order[h - 1];
                    h -= 1;
                }
                order[h] = cur;
            }
        } else {
            *order = (0..n).collect();
            order.sort_unstable_by(|&a, &b| lo[a].total_cmp(&lo[b]).then(a.cmp(&b)));
        }
        let mut pairs = Vec::new();
        for (k, &i) in order.iter().enumerate() {
            let pi = self.molecules[i].position;
            let hi = pi.x + r[i];
            for &j in &order[k + 1..] {
                if lo[j] > hi {
                    break;
                }
                let limit = r[i] + r[j];
                if (self.molecules[j].position - pi).norm_squared() <= limit * limit {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
        pairs
    }

    /// Default resolution of a molecule-molecule contact after consulting the handler.
    fn dispatch_contact<H: ContactHandler>(
        &mut self,
        a: usize,
        b: usize,
        time: f64,
        handler: &mut H,
    ) -> Result<(), PhysicsError> {
        let normal = contact_normal(&self.molecules[a], &self.molecules[b])?;
        let event = CollisionEvent {
            id_a: a,
            id_b: b,
            time,
            normal,
        };
        self.stats.pair_contacts += 1;
        if let Some(log) = self.event_log.as_mut() {
            log.push(LoggedEvent {
                time,
                kind: LoggedKind::Pair { a, b },
            });
        }
        if handler.on_contact(&mut self.molecules, &event) == ContactResponse::Absorbed {
            self.stats.absorbed += 1;
            return Ok(());
        }
        let (ma, mb) = (self.molecules[a], self.molecules[b]);
        match (ma.is_free(), mb.is_free()) {
            (true, true) => {
                let (va, vb) = resolve_elastic(&ma, &mb)?;
                self.molecules[a].velocity = va;
                self.molecules[b].velocity = vb;
                self.stats.elastic_resolutions += 1;
            }
            (true, false) => {
                self.molecules[a].velocity = reflect_off_static(&ma, &mb)?;
                self.stats.static_reflections += 1;
            }
            (false, true) => {
                self.molecules[b].velocity = reflect_off_static(&mb, &ma)?;
                self.stats.static_reflections += 1;
            }
            (false, false) => {}
        }
        Ok(())
    }

    /// Periodic interference test: ballistic advance, wall reflection, then one
    /// resolution per approaching-and-overlapping pair in ascending id order.
    pub fn step_pit<H: ContactHandler>(&mut self, dt: f64, handler: &mut H) -> Result<(), PhysicsError> {
        debug_assert!(dt > 0.0);
        let bounds = self.bounds;
        for m in self.molecules.iter_mut().filter(|m| m.is_free()) {
            m.position += m.velocity * dt;
            for axis in 0..3 {
                let lo = bounds.min_corner[axis] + m.radius;
                let hi = bounds.max_corner[axis] - m.radius;
                if reflect_into(&mut m.position[axis], &mut m.velocity[axis], lo, hi) {
                    self.stats.wall_bounces += 1;
                }
            }
        }
        let t_end = self.time + dt;
        let mut order = std::mem::take(&mut self.sweep_order);
        let mut pairs = self.sweep_pairs_from(&mut order, |m| m.radius);
        self.sweep_order = order;
        pairs.retain(|&(i, j)| self.molecules[i].is_free() || self.molecules[j].is_free());
        pairs.sort_unstable();
        for (i, j) in pairs {
            let (a, b) = (&self.molecules[i], &self.molecules[j]);
            if (a.is_free() || b.is_free()) && approaching(a, b) && interfere(a, b) {
                self.dispatch_contact(i, j, t_end, handler)?;
            }
        }
        self.time = t_end;
        Ok(())
    }

    /// Predicted instant of collision: exact event-driven advance over one frame.
    pub fn step_pic<H: ContactHandler>(&mut self, dt: f64, handler: &mut H) -> Result<(), PhysicsError> {
        debug_assert!(dt > 0.0);
        let n = self.molecules.len();
        let mut version = vec![0u64; n];
        let mut queue: BinaryHeap<Reverse<Scheduled>> = BinaryHeap::new();
        let mut speed: Vec<f64> = self.molecules.iter().map(|m| m.velocity.norm()).collect();

        let mut order = std::mem::take(&mut self.sweep_order);
        let candidates = self.sweep_pairs_from(&mut order, |m| m.radius + m.velocity.norm() * dt);
        self.sweep_order = order;
        for (i, j) in candidates {
            self.schedule_pair(&mut queue, &version, i, j, 0.0, dt);
        }
        for i in 0..n {
            self.schedule_wall(&mut queue, &version, i, 0.0, dt);
        }

        let mut now = 0.0;
        let mut processed = 0usize;
        while let Some(event) = pop_next(&mut queue, &version) {
            processed += 1;
            if processed > MAX_EVENTS_PER_FRAME {
                return Err(PhysicsError::EventStorm {
                    limit: MAX_EVENTS_PER_FRAME,
                    frame_start: self.time,
                });
            }
            self.stats.pic_events += 1;
            self.advance_free(event.time - now);
            now = event.time;
            let absolute = self.time + now;
            let a = event.a;
            match event.partner {
                Partner::Wall(wall) => {
                    let m = &mut self.molecules[a];
                    m.position[wall.axis] = if wall.upper {
                        self.bounds.max_corner[wall.axis] - m.radius
                    } else {
                        self.bounds.min_corner[wall.axis] + m.radius
                    };
                    m.velocity[wall.axis] = -m.velocity[wall.axis];
                    self.stats.wall_bounces += 1;
                    if let Some(log) = self.event_log.as_mut() {
                        log.push(LoggedEvent {
                            time: absolute,
                            kind: LoggedKind::Wall { id: a, wall },
                        });
                    }
                    version[a] += 1;
                    self.reschedule(&mut queue, &version, &speed, a, None, now, dt);
                }
                Partner::Molecule(b) => {
                    self.dispatch_contact(a, b, absolute, handler)?;
                    version[a] += 1;
                    version[b] += 1;
                    speed[a] = self.molecules[a].velocity.norm();
                    speed[b] = self.molecules[b].velocity.norm();
                    self.reschedule(&mut queue, &version, &speed, a, None, now, dt);
                    self.reschedule(&mut queue, &version, &speed, b, Some(a), now, dt);
                }
            }
        }
        self.advance_free(dt - now);
        self.time += dt;
        Ok(())
    }

    fn advance_free(&mut self, span: f64) {
        if span <= 0.0 {
            return;
        }
        for m in self.molecules.iter_mut().filter(|m| m.is_free()) {
            m.position += m.velocity * span;
        }
    }

    fn schedule_pair(
        &self,
        queue: &mut BinaryHeap<Reverse<Scheduled>>,
        version: &[u64],
        i: usize,
        j: usize,
        now: f64,
        dt: f64,
    ) {
        let (a, b) = (&self.molecules[i], &self.molecules[j]);
        if !a.is_free() && !b.is_free() {
            return;
        }
        if let Some(t) = time_to_collision(a, b) {
            let at = now + t;
            if at <= dt {
                let (lo, hi) = (i.min(j), i.max(j));
                queue.push(Reverse(Scheduled {
                    time: at,
                    a: lo,
                    partner: Partner::Molecule(hi),
                    version_a: version[lo],
                    version_b: version[hi],
                }));
            }
        }
    }

    fn schedule_wall(&self, queue: &mut BinaryHeap<Reverse<Scheduled>>, version: &[u64], i: usize, now: f64, dt: f64) {
        let m = &self.molecules[i];
        if !m.is_free() {
            return;
        }
        if let Some((t, wall)) = time_to_wall(m, &self.bounds) {
            let at = now + t;
            if at <= dt {
                queue.push(Reverse(Scheduled {
                    time: at,
                    a: i,
                    partner: Partner::Wall(wall),
                    version_a: version[i],
                    version_b: 0,
                }));
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn reschedule(
        &self,
        queue: &mut BinaryHeap<Reverse<Scheduled>>,
        version: &[u64],
        speed: &[f64],
        i: usize,
        skip: Option<usize>,
        now: f64,
        dt: f64,
    ) {
        let remaining = dt - now;
        let mi = &self.molecules[i];
        for (j, mj) in self.molecules.iter().enumerate() {
            if j == i || Some(j) == skip {
                continue;
            }
            // Cheap rejection: the gap cannot close within the rest of the frame.
            let reach = mi.radius + mj.radius + (speed[i] + speed[j]) * remaining + 1e-9;
            if (mj.position - mi.position).norm_squared() > reach * reach {
                continue;
            }
            self.schedule_pair(queue, version, i, j, now, dt);
        }
        self.schedule_wall(queue, version, i, now, dt);
    }
}

fn is_current(event: &Scheduled, version: &[u64]) -> bool {
    event.version_a == version[event.a]
        && match event.partner {
            Partner::Molecule(b) => event.version_b == version[b],
            Partner::Wall(_) => true,
        }
}

/// Pops the earliest still-valid event; among events within the simultaneity
/// window of it, the one with the smallest `(id_a, id_b)` wins.
fn pop_next(queue: &mut BinaryHeap<Reverse<Scheduled>>, version: &[u64]) -> Option<Scheduled> {
    let first = loop {
        let Reverse(event) = queue.pop()?;
        if is_current(&event, version) {
            break event;
        }
    };
    let mut best = first;
    let mut held = Vec::new();
    while let Some(Reverse(next)) = queue.peek() {
        if next.time > first.time + SIMULTANEITY_WINDOW {
            break;
        }
        let Reverse(next) = queue.pop().expect("peeked");
        if !is_current(&next, version) {
            continue;
        }
        if next.key() < best.key() {
            held.push(best);
            best = next;
        } else {
            held.push(next);
        }
    }
    queue.extend(held.into_iter().map(Reverse));
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn free(id: usize, p: Vec3, v: Vec3) -> Molecule {
        Molecule::new_free(id, p, v, 1.0, 1.0)
    }

    fn big_box() -> SimBox {
        SimBox::new(Vec3::new(-1000.0, -1000.0, -1000.0), Vec3::new(1000.0, 1000.0, 1000.0))
    }

    #[test]
    fn approaching_cases() {
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(3.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0));
        assert!(approaching(&a, &b));

        let a = free(0, Vec3::ZERO, Vec3::new(-1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(3.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0));
        assert!(!approaching(&a, &b));

        let v = Vec3::new(0.3, -2.0, 1.0);
        let a = free(0, Vec3::new(1.0, 2.0, 3.0), v);
        let b = free(1, Vec3::new(-4.0, 0.5, 9.0), v);
        assert!(!approaching(&a, &b));
    }

    #[test]
    fn interfere_boundary_counts() {
        let at = |d: f64| {
            interfere(
                &free(0, Vec3::ZERO, Vec3::ZERO),
                &free(1, Vec3::new(d, 0.0, 0.0), Vec3::ZERO),
            )
        };
        assert!(at(1.9));
        assert!(at(2.0));
        assert!(!at(2.1));
    }

    #[test]
    fn equal_mass_head_on_swaps() {
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(2.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0));
        let (va, vb) = resolve_elastic(&a, &b).unwrap();
        assert_eq!(va, Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(vb, Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn heavy_partner_acts_as_wall() {
        let a = free(0, Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0));
        let mut b = free(1, Vec3::new(2.0, 0.0, 0.0), Vec3::ZERO);
        b.mass = 1e9;
        let (va, vb) = resolve_elastic(&a, &b).unwrap();
        assert!((va - Vec3::new(-2.0, 0.0, 0.0)).norm() < 1e-6);
        assert!(vb.norm() < 1e-6);
    }

    #[test]
    fn coincident_centers_is_an_error() {
        let a = free(3, Vec3::ZERO, Vec3::UNIT_X);
        let b = free(7, Vec3::ZERO, Vec3::ZERO);
        assert_eq!(
            resolve_elastic(&a, &b),
            Err(PhysicsError::CoincidentCenters { a: 3, b: 7 })
        );
    }

    #[test]
    fn toi_head_on() {
        let mut a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let mut b = free(1, Vec3::new(3.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0));
        a.radius = 0.5;
        b.radius = 0.5;
        assert_eq!(time_to_collision(&a, &b), Some(1.0));
        b.velocity = Vec3::new(5.0, 0.0, 0.0);
        assert_eq!(time_to_collision(&a, &b), None);
    }

    #[test]
    fn toi_overlapping_is_zero_only_when_approaching() {
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(1.5, 0.0, 0.0), Vec3::ZERO);
        assert_eq!(time_to_collision(&a, &b), Some(0.0));
        let b = free(1, Vec3::new(1.5, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(time_to_collision(&a, &b), None);
    }

    #[test]
    fn toi_misses_with_large_offset() {
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(10.0, 2.5, 0.0), Vec3::ZERO);
        assert_eq!(time_to_collision(&a, &b), None);
    }

    #[test]
    fn pit_free_flight_is_exact() {
        let mut w = World::new(
            vec![free(0, Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.5, -0.25, 2.0))],
            big_box(),
        );
        w.step_pit(0.1, &mut ElasticOnly).unwrap();
        let expected = Vec3::new(1.0, 2.0, 3.0) + Vec3::new(0.5, -0.25, 2.0) * 0.1;
        assert_eq!(w.molecules[0].position, expected);
    }

    #[test]
    fn pit_wall_mirrors_position() {
        let bounds = SimBox::new(Vec3::ZERO, Vec3::new(10.0, 10.0, 10.0));
        let mut w = World::new(
            vec![free(0, Vec3::new(8.5, 5.0, 5.0), Vec3::new(1.0, 0.0, 0.0))],
            bounds,
        );
        w.step_pit(1.0, &mut ElasticOnly).unwrap();
        let m = w.molecules[0];
        // Centre limit is 9.0; travelled 1.0 from 8.5, so mirrored to 8.5.
        assert!((m.position.x - 8.5).abs() < 1e-12);
        assert_eq!(m.velocity, Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(w.stats.wall_bounces, 1);
    }

    #[test]
    fn pit_resolves_overlapping_pair_once() {
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(1.95, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0));
        let mut w = World::new(vec![a, b], big_box());
        w.step_pit(0.01, &mut ElasticOnly).unwrap();
        assert_eq!(w.stats.pair_contacts, 1);
        assert_eq!(w.stats.elastic_resolutions, 1);
        // Still overlapping but receding now: the next frame does nothing.
        w.step_pit(0.01, &mut ElasticOnly).unwrap();
        assert_eq!(w.stats.pair_contacts, 1);
    }

    #[test]
    fn pic_without_contact_matches_ballistic() {
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(0.0, 10.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
        let mut pic = World::new(vec![a, b], big_box());
        let mut pit = pic.clone();
        pic.step_pic(0.5, &mut ElasticOnly).unwrap();
        pit.step_pit(0.5, &mut ElasticOnly).unwrap();
        for (p, q) in pic.molecules.iter().zip(&pit.molecules) {
            assert!((p.position - q.position).norm() < 1e-15);
        }
        assert_eq!(pic.stats.pic_events, 0);
    }

    #[test]
    fn pic_resolves_at_contact_distance() {
        // Gap of 1.0 closing at 2 per minute: contact at t = 0.5 inside a frame of 1.0.
        let a = free(0, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let b = free(1, Vec3::new(3.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0));
        struct Probe(Vec<f64>);
        impl ContactHandler for Probe {
            fn on_contact(&mut self, m: &mut [Molecule], e: &CollisionEvent) -> ContactResponse {
                self.0.push(m[e.id_a].position.distance(m[e.id_b].position));
                ContactResponse::Bounce
            }
        }
        let mut probe = Probe(Vec::new());
        let mut w = World::new(vec![a, b], big_box());
        w.record_events(true);
        w.step_pic(1.0, &mut probe).unwrap();
        assert_eq!(probe.0.len(), 1);
        assert!((probe.0[0] - 2.0).abs() < 1e-12);
        assert_eq!(w.event_log()[0].time, 0.5);
        assert!((w.molecules[0].position.x - 0.0).abs() < 1e-12);
        assert!((w.molecules[1].position.x - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pic_newton_cradle_events_monotone() {
        let mols = vec![
            free(0, Vec3::ZERO, Vec3::new(3.0, 0.0, 0.0)),
            free(1, Vec3::new(2.5, 0.0, 0.0), Vec3::ZERO),
            free(2, Vec3::new(4.5, 0.0, 0.0), Vec3::ZERO),
            free(3, Vec3::new(6.5, 0.0, 0.0), Vec3::ZERO),
        ];
        let mut w = World::new(mols, big_box());
        w.record_events(true);
        w.step_pic(2.0, &mut ElasticOnly).unwrap();
        let times: Vec<f64> = w.event_log().iter().map(|e| e.time).collect();
        assert!(times.len() >= 3);
        assert!(times.windows(2).all(|p| p[0] <= p[1]));
        // Momentum ends up in the last ball.
        assert!((w.molecules[3].velocity.x - 3.0).abs() < 1e-12);
        assert!(w.molecules[0].velocity.norm() < 1e-12);
        assert!(w.max_overlap() <= 1e-9);
    }

    #[test]
    fn pic_simultaneous_events_ordered_by_ids() {
        // Two independent head-on pairs that collide at the same instant.
        let mols = vec![
            free(0, Vec3::new(0.0, 10.0, 0.0), Vec3::new(1.0, 0.0, 0.0)),
            free(1, Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)),
            free(2, Vec3::new(3.0, 10.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)),
            free(3, Vec3::new(3.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)),
        ];
        let mut w = World::new(mols, big_box());
        w.record_events(true);
        w.step_pic(1.0, &mut ElasticOnly).unwrap();
        let kinds: Vec<LoggedKind> = w.event_log().iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![LoggedKind::Pair { a: 0, b: 2 }, LoggedKind::Pair { a: 1, b: 3 }]
        );
    }

    #[test]
    fn pic_static_obstacle_reflects() {
        let mut wall = free(0, Vec3::new(5.0, 0.0, 0.0), Vec3::ZERO);
        wall.state = MoleculeState::TransmitterAnchor;
        wall.radius = 2.0;
        let m = free(1, Vec3::ZERO, Vec3::new(4.0, 0.0, 0.0));
        let mut w = World::new(vec![wall, m], big_box());
        w.step_pic(1.0, &mut ElasticOnly).unwrap();
        // Contact at x = 2.0 after 0.5 min, then back for 0.5 min.
        assert!((w.molecules[1].position.x - 0.0).abs() < 1e-12);
        assert_eq!(w.molecules[1].velocity, Vec3::new(-4.0, 0.0, 0.0));
        assert_eq!(w.molecules[0].position, Vec3::new(5.0, 0.0, 0.0));
        assert_eq!(w.stats.static_reflections, 1);
    }

    #[test]
    fn pic_wall_reflection_preserves_speed() {
        let bounds = SimBox::new(Vec3::ZERO, Vec3::new(10.0, 10.0, 10.0));
        let v = Vec3::new(7.0, -3.0, 11.0);
        let mut w = World::new(vec![free(0, Vec3::new(5.0, 5.0, 5.0), v)], bounds);
        for _ in 0..50 {
            w.step_pic(0.1, &mut ElasticOnly).unwrap();
        }
        let m = w.molecules[0];
        assert!(((m.velocity.norm() - v.norm()) / v.norm()).abs() < 1e-12);
        assert!(bounds.contains_sphere(m.position, m.radius, 1e-9));
    }

    #[test]
    fn kick_is_seeded() {
        let base = World::new(vec![free(0, Vec3::ZERO, Vec3::ZERO)], big_box());
        let mut w1 = base.clone();
        let mut w2 = base.clone();
        w1.apply_velocity_kick(&mut ChaCha20Rng::seed_from_u64(9), 1.0);
        w2.apply_velocity_kick(&mut ChaCha20Rng::seed_from_u64(9), 1.0);
        assert_eq!(w1.molecules[0].velocity, w2.molecules[0].velocity);
        assert!(w1.molecules[0].velocity.norm() > 0.0);
    }

    #[test]
    fn strategy_parses() {
        assert_eq!("pic".parse::<Strategy>(), Ok(Strategy::Pic));
        assert_eq!(" PIT ".parse::<Strategy>(), Ok(Strategy::Pit));
        assert!("euler".parse::<Strategy>().is_err());
    }
}
