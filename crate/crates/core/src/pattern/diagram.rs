//! Synthesis of the genus-1 bordered diagram for the (p, q) torus pattern.
//!
//! The diagram lives in a sheared plane model of the torus with one boundary
//! puncture. The deck group is the lattice generated by
//! `T1 = (1, -q)` and `T2 = (0, p)`.
//!
//! * The puncture lifts to a family of small removed squares ("disks") of
//!   L-infinity radius `rho`, centered at every lattice point
//!   `(m, -q*m + p*n)`.
//! * One alpha arc lifts to the lines of slope `-q` through the disk centers
//!   (idempotent 0), the other to the vertical lines through them
//!   (idempotent 1).
//! * The pattern curve beta lifts to a piecewise-linear weave through `p`
//!   stations per fundamental domain, one in each horizontal strip, built by
//!   the strand-permutation recurrence below. Each weave step rises by
//!   exactly one unit and moves right by roughly `y` (an "A" step) or left by
//!   roughly `x` (a "B" step), where `x = q^{-1} mod p` and `y = p - x`.
//!   Stations are staggered horizontally by multiples of a tiny offset
//!   `sigma`; without the stagger, distinct generators would collapse onto
//!   single lattice orbits.
//! * Four marked points sit on each disk boundary where the two alpha lines
//!   enter and leave; boundary chords of the algebra are realized as paths
//!   between them along the square's edge. The arc facing east (through the
//!   northeast and southeast corners) carries the boundary basepoint and is
//!   never traversed.
//! * The interior basepoint `w` sits on the initial station row, east of
//!   station 0; the forbidden basepoint region is marked by query points
//!   just east of every disk.
//!
//! The one free knob is the global horizontal position `gamma` of the
//! stations. The builder enumerates the finitely many "walls" where the
//! combinatorics can change (a weave segment hitting a disk center, or a
//! station hitting an alpha line), and tries chamber midpoints between the
//! walls; each candidate is validated against exact counting anchors before
//! being accepted. Everything is exact rational arithmetic.

use super::arithmetic::CableParams;
use super::geom::{is_integer, qfloor_i64, qi, qmod, qr, Pt, Q};
use crate::algebra::{Chord, Idem};
use num::{One, Signed, Zero};

/// A or B weave step (right-up or left-up).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepType {
    A,
    B,
}

/// Which alpha line a generator sits on, for its fundamental lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineId {
    /// Vertical line `xi = m`.
    Vertical(i64),
    /// Sloped line `eta + q*xi = p*n`.
    Sloped(i64),
}

/// One intersection point of the beta weave with an alpha line.
#[derive(Debug, Clone)]
pub struct GenSite {
    pub idem: Idem,
    /// Index of the weave step carrying this point (fundamental lift).
    pub step: usize,
    /// Parameter along that step, in (0, 1).
    pub t: Q,
    /// Position of the fundamental lift (on the weave polyline).
    pub pos: Pt,
    /// Canonical representative: position reduced into `[0,1) x [0,p)`.
    pub canon: Pt,
    /// Alpha line of the fundamental lift.
    pub line: LineId,
}

/// The synthesized diagram for one `(p, q)` pattern at one chamber choice.
#[derive(Debug, Clone)]
pub struct Diagram {
    pub params: CableParams,
    pub gamma: Q,
    pub sigma: Q,
    pub rho: Q,
    /// Stations `X(0)..X(p)` inclusive; `X(p) = X(0) + T2`.
    pub stations: Vec<Pt>,
    /// Step types, one per weave step `X(r) -> X(r+1)`.
    pub step_type: Vec<StepType>,
    /// All generators, sorted by canonical position (idempotent 0 first).
    pub gens: Vec<GenSite>,
    /// Interior basepoint representative (chosen by the pattern builder).
    pub w: Pt,
}

/// Direction of travel along an alpha line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ADir {
    Up,
    Down,
    UpLeft,
    DownRight,
}

/// An alpha line in the plane (translates resolved to absolute indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneLine {
    /// `xi = m`.
    V(i64),
    /// `eta + q*xi = p*n`.
    S(i64),
}

/// Marked point on a disk boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marked {
    N,
    S,
    UL,
    DR,
}

/// Next thing met while walking along an alpha line.
#[derive(Debug, Clone)]
pub enum AlphaEvent {
    /// A beta crossing: generator lift `gen + a*T1 + b*T2` at `pos`.
    Gen { gen: usize, a: i64, b: i64, pos: Pt },
    /// A disk boundary, entered at the given marked point.
    Disk { center: Pt, entry: Marked },
}

/// Position on the beta weave: parameter `t` along step `seg` of the
/// fundamental polyline translated by `a*T1 + b*T2`.
#[derive(Debug, Clone)]
pub struct BetaPos {
    pub seg: usize,
    pub a: i64,
    pub b: i64,
    pub t: Q,
}

/// Station stagger: small enough that no combinatorial gap is crossed.
pub fn sigma_for(params: &CableParams) -> Q {
    qr(1, 8 * params.q * (params.p + 4))
}

/// Height of station r above grid row r.
///
/// Must be small: the crossing of the weave with a sloped line nearest the
/// rightmost station has to land to the right of the last vertical grid
/// line, which forces `delta < gamma / y` in the widest chambers.  1/8
/// satisfies this for every supported parameter pair while keeping stations
/// clear of the disk rows.
pub fn station_delta() -> Q {
    qr(1, 8)
}

/// Weave recurrence: stations `X(0)..X(p)` and the step types.
fn weave(params: &CableParams, gamma: &Q, sigma: &Q) -> (Vec<Pt>, Vec<StepType>) {
    let (p, x, y) = (params.p, params.x, params.y);
    let mut stations = Vec::with_capacity(p as usize + 1);
    let mut types = Vec::with_capacity(p as usize);
    let mut s = p; // strand label in 1..=p
    let mut c = 0i64; // accumulated horizontal offset
    for r in 0..=p {
        stations.push(Pt::new(
            qi(c) + gamma + qi(s) * sigma,
            qi(r) + station_delta(),
        ));
        if r == p {
            break;
        }
        let ty = if s > y { StepType::A } else { StepType::B };
        types.push(ty);
        c += match ty {
            StepType::A => y,
            StepType::B => -x,
        };
        s -= y;
        if s < 1 {
            s += p;
        }
    }
    assert_eq!(c, 0, "weave must close up horizontally");
    assert_eq!(s, p, "strand permutation must have order p");
    (stations, types)
}

/// All gamma values in (0, 1) where the diagram combinatorics can change.
fn critical_gammas(params: &CableParams, sigma: &Q) -> Vec<Q> {
    let (p, q) = (params.p, params.q);
    // Run the weave once with gamma = 0 to recover the offsets c(r), s(r).
    let (st0, _) = weave(params, &Q::zero(), sigma);
    let mut walls: Vec<Q> = Vec::new();
    let mut push = |v: Q| {
        let m = qmod(&v, 1);
        if !m.is_zero() {
            walls.push(m);
        }
    };
    for r in 0..(p as usize) {
        let xr = &st0[r].x; // c(r) + s(r)*sigma
        let xr1 = &st0[r + 1].x;
        // Weave step through a disk center: the step from station r spans
        // heights (r+delta, r+1+delta) and crosses row r+1 at parameter
        // 1-delta, i.e. at x = delta*x_r + (1-delta)*x_{r+1}.
        let delta = station_delta();
        push(-(xr * &delta + xr1 * (Q::one() - &delta)));
        // Station r on a vertical line.
        push(-xr.clone());
        // Station r on a sloped line: eta + q*(xi + gamma0) = p*n.
        for n in 0..q {
            let eta = qi(r as i64) + station_delta();
            push((qi(p * n) - eta) / qi(q) - xr);
        }
    }
    walls.sort();
    walls.dedup();
    walls
}

/// Chamber midpoints for gamma, widest chamber first (ties: smaller gamma).
pub fn chamber_midpoints(params: &CableParams) -> Vec<Q> {
    let sigma = sigma_for(params);
    let walls = critical_gammas(params, &sigma);
    let mut bounds = vec![Q::zero()];
    bounds.extend(walls);
    bounds.push(Q::one());
    let mut chambers: Vec<(Q, Q)> = Vec::new(); // (width, midpoint)
    for w in bounds.windows(2) {
        let width = &w[1] - &w[0];
        if width.is_positive() {
            chambers.push((width, (&w[0] + &w[1]) / qi(2)));
        }
    }
    chambers.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    chambers.into_iter().map(|(_, m)| m).collect()
}

/// Smallest element of `base + p*Z` strictly greater than `bound`.
fn next_above(base: &Q, period: i64, bound: &Q) -> Q {
    let k = ((bound - base) / qi(period)).floor();
    let mut v = base + (k * qi(period));
    while v <= *bound {
        v += qi(period);
    }
    // One catch-up step suffices, but stay safe against floor edge cases.
    debug_assert!(v > *bound && &v - qi(period) <= *bound);
    v
}

/// Largest element of `base + p*Z` strictly less than `bound`.
fn next_below(base: &Q, period: i64, bound: &Q) -> Q {
    let k = ((bound - base) / qi(period)).ceil();
    let mut v = base + (k * qi(period));
    while v >= *bound {
        v -= qi(period);
    }
    debug_assert!(v < *bound && &v + qi(period) >= *bound);
    v
}

/// L-infinity distance from a point to a closed segment, exactly.
fn linf_point_segment(c: &Pt, a: &Pt, b: &Pt) -> Q {
    let dx = &b.x - &a.x;
    let dy = &b.y - &a.y;
    let ex = &a.x - &c.x; // offset at t = 0
    let ey = &a.y - &c.y;
    // f(t) = max(|ex + t dx|, |ey + t dy|) is piecewise linear; its minimum
    // over [0,1] is attained at an endpoint or a breakpoint.
    let mut ts: Vec<Q> = vec![Q::zero(), Q::one()];
    if !dx.is_zero() {
        ts.push(-&ex / &dx);
    }
    if !dy.is_zero() {
        ts.push(-&ey / &dy);
    }
    // |ex + t dx| = |ey + t dy| : two sign combinations.
    let d1 = &dx - &dy;
    if !d1.is_zero() {
        ts.push((&ey - &ex) / d1);
    }
    let d2 = &dx + &dy;
    if !d2.is_zero() {
        ts.push((-&ey - &ex) / d2);
    }
    let mut best: Option<Q> = None;
    for t in ts {
        if t < Q::zero() || t > Q::one() {
            continue;
        }
        let vx = (&ex + &t * &dx).abs();
        let vy = (&ey + &t * &dy).abs();
        let v = if vx >= vy { vx } else { vy };
        best = Some(match best {
            None => v,
            Some(b) if v < b => v,
            Some(b) => b,
        });
    }
    best.expect("t = 0 and t = 1 are always candidates")
}

impl Diagram {
    pub fn t1(&self) -> Pt {
        Pt::new(qi(1), qi(-self.params.q))
    }

    pub fn t2(&self) -> Pt {
        Pt::new(qi(0), qi(self.params.p))
    }

    /// `pt + a*T1 + b*T2`.
    pub fn translate(&self, pt: &Pt, a: i64, b: i64) -> Pt {
        Pt::new(
            &pt.x + qi(a),
            &pt.y + qi(-self.params.q * a + self.params.p * b),
        )
    }

    /// Reduce to the canonical representative; `pt = canon + a*T1 + b*T2`.
    pub fn reduce(&self, pt: &Pt) -> (Pt, i64, i64) {
        let (p, q) = (self.params.p, self.params.q);
        let a = qfloor_i64(&pt.x);
        let y1 = &pt.y + qi(q * a);
        let b = qfloor_i64(&(&y1 / qi(p)));
        let canon = Pt::new(&pt.x - qi(a), y1 - qi(p * b));
        (canon, a, b)
    }

    /// Which generator lift sits at `pt`, if any.
    pub fn lift_at(&self, pt: &Pt) -> Option<(usize, i64, i64)> {
        let (canon, a, b) = self.reduce(pt);
        self.gens
            .iter()
            .position(|g| g.canon == canon)
            .map(|i| (i, a, b))
    }

    /// Endpoints of weave step `seg` translated by `a*T1 + b*T2`.
    pub fn beta_segment(&self, seg: usize, a: i64, b: i64) -> (Pt, Pt) {
        (
            self.translate(&self.stations[seg], a, b),
            self.translate(&self.stations[seg + 1], a, b),
        )
    }

    /// Beta position of a generator lift.
    pub fn gen_beta_pos(&self, gen: usize, a: i64, b: i64) -> BetaPos {
        BetaPos {
            seg: self.gens[gen].step,
            a,
            b,
            t: self.gens[gen].t.clone(),
        }
    }

    /// Position in the plane of a beta position.
    pub fn beta_point(&self, bp: &BetaPos) -> Pt {
        let (s, e) = self.beta_segment(bp.seg, bp.a, bp.b);
        Pt::new(&s.x + &bp.t * (&e.x - &s.x), &s.y + &bp.t * (&e.y - &s.y))
    }

    /// Walk along beta from `from` for up to `max_steps` weave stretches,
    /// recording the station vertices passed (in walk order) and every
    /// generator lift met strictly beyond the start: `(gen, b, k)` means the
    /// lift `gen + from.a*T1 + b*T2` sits after the first `k` stations.
    /// One scan answers every closing-arc query towards `from` from that
    /// side: the arc from the lift back to `from` is the reversed `k`-prefix.
    pub fn beta_scan(
        &self,
        from: &BetaPos,
        up: bool,
        max_steps: usize,
    ) -> (Vec<Pt>, Vec<(usize, i64, usize)>) {
        let p = self.params.p as usize;
        let mut by_step: Vec<Vec<(Q, usize)>> = vec![Vec::new(); p];
        for (g, gen) in self.gens.iter().enumerate() {
            by_step[gen.step].push((gen.t.clone(), g));
        }
        for list in &mut by_step {
            list.sort();
        }
        let mut stations = Vec::new();
        let mut lifts = Vec::new();
        let mut seg = from.seg;
        let mut b = from.b;
        for step in 0..max_steps {
            for (t, g) in &by_step[seg] {
                let beyond = if step > 0 {
                    true // full stretch: every generator on it counts
                } else if up {
                    *t > from.t
                } else {
                    *t < from.t
                };
                if beyond {
                    lifts.push((*g, b, stations.len()));
                }
            }
            let (s, e) = self.beta_segment(seg, from.a, b);
            stations.push(if up { e } else { s });
            if up {
                if seg + 1 == p {
                    seg = 0;
                    b += 1;
                } else {
                    seg += 1;
                }
            } else if seg == 0 {
                seg = p - 1;
                b -= 1;
            } else {
                seg -= 1;
            }
        }
        (stations, lifts)
    }

    /// The alpha line carrying the lift `gen + a*T1 + b*T2`.
    pub fn line_of_lift(&self, gen: usize, a: i64, b: i64) -> PlaneLine {
        match self.gens[gen].line {
            LineId::Vertical(m) => PlaneLine::V(m + a),
            LineId::Sloped(n) => PlaneLine::S(n + b),
        }
    }

    /// Disk center residue: centers on vertical `m` have heights
    /// `-q*m mod p` plus multiples of `p`.
    fn center_res_on_vertical(&self, m: i64) -> i64 {
        (-self.params.q * m).rem_euclid(self.params.p)
    }

    /// Marked point of the disk centered at `c`.
    pub fn marked(&self, center: &Pt, which: Marked) -> Pt {
        let r = &self.rho;
        let rq = r / qi(self.params.q);
        match which {
            Marked::N => Pt::new(center.x.clone(), &center.y + r),
            Marked::S => Pt::new(center.x.clone(), &center.y - r),
            Marked::UL => Pt::new(&center.x - &rq, &center.y + r),
            Marked::DR => Pt::new(&center.x + &rq, &center.y - r),
        }
    }

    /// Boundary path realizing a chord on the disk centered at `c`,
    /// from its starting marked point to its ending marked point.
    pub fn chord_path(&self, center: &Pt, chord: Chord) -> Vec<Pt> {
        let r = &self.rho;
        let n = self.marked(center, Marked::N);
        let s = self.marked(center, Marked::S);
        let ul = self.marked(center, Marked::UL);
        let dr = self.marked(center, Marked::DR);
        let sw = Pt::new(&center.x - r, &center.y - r);
        let nw = Pt::new(&center.x - r, &center.y + r);
        match chord {
            Chord::C1 => vec![dr, s],
            Chord::C2 => vec![s, sw, nw, ul],
            Chord::C3 => vec![ul, n],
            Chord::C12 => vec![dr, s, sw, nw, ul],
            Chord::C23 => vec![s, sw, nw, n],
            Chord::C123 => vec![dr, s, sw, nw, n],
        }
    }

    /// Forbidden-basepoint query point east of the disk centered at `c`.
    pub fn z_query(&self, center: &Pt) -> Pt {
        Pt::new(&center.x + qr(3, 2) * &self.rho, center.y.clone())
    }

    /// Query point inside the disk centered at `c` (polygons must not
    /// cover any disk).
    pub fn hole_query(&self, center: &Pt) -> Pt {
        Pt::new(&center.x + &self.rho / qi(2), center.y.clone())
    }

    /// Next event along an alpha line.
    ///
    /// Positions of generators and disk entry points along a line are all
    /// distinct (generators keep at least four times `rho` away from
    /// centers), so the nearest event is unique.
    pub fn next_event(&self, line: PlaneLine, pos: &Pt, dir: ADir) -> AlphaEvent {
        let p = self.params.p;
        let q = self.params.q;
        match (line, dir) {
            (PlaneLine::V(m), ADir::Up) | (PlaneLine::V(m), ADir::Down) => {
                let up = dir == ADir::Up;
                // Nearest disk entry: the first S point above (or N point
                // below) the current position.
                let res = self.center_res_on_vertical(m);
                let c = if up {
                    next_above(&(qi(res) - &self.rho), p, &pos.y) + &self.rho
                } else {
                    next_below(&(qi(res) + &self.rho), p, &pos.y) - &self.rho
                };
                let center = Pt::new(qi(m), c);
                debug_assert!(is_integer(&center.y));
                let entry = if up { Marked::S } else { Marked::N };
                let entry_pos = self.marked(&center, entry);
                // Nearest generator lift.
                let mut best: Option<(Q, usize, i64, i64)> = None;
                for (gi, g) in self.gens.iter().enumerate() {
                    let mg = match g.line {
                        LineId::Vertical(mg) => mg,
                        LineId::Sloped(_) => continue,
                    };
                    let a = m - mg;
                    let base = &g.pos.y - qi(q * a);
                    let h = if up {
                        next_above(&base, p, &pos.y)
                    } else {
                        next_below(&base, p, &pos.y)
                    };
                    let b = &h - &base;
                    let b = (b / qi(p)).to_integer();
                    let b = num::ToPrimitive::to_i64(&b).expect("translate in range");
                    let better = match &best {
                        None => true,
                        Some((bh, ..)) => {
                            if up {
                                h < *bh
                            } else {
                                h > *bh
                            }
                        }
                    };
                    if better {
                        best = Some((h, gi, a, b));
                    }
                }
                if let Some((h, gi, a, b)) = best {
                    let closer = if up { h < entry_pos.y } else { h > entry_pos.y };
                    assert_ne!(h, entry_pos.y, "generator at a marked point");
                    if closer {
                        return AlphaEvent::Gen {
                            gen: gi,
                            a,
                            b,
                            pos: Pt::new(qi(m), h),
                        };
                    }
                }
                AlphaEvent::Disk { center, entry }
            }
            (PlaneLine::S(n), ADir::UpLeft) | (PlaneLine::S(n), ADir::DownRight) => {
                let left = dir == ADir::UpLeft;
                let rq = &self.rho / qi(q);
                // Disk entries: DR points (x = m + rho/q) when moving left,
                // UL points (x = m - rho/q) when moving right.
                let m = if left {
                    let v = next_below(&rq.clone(), 1, &pos.x); // m + rho/q < pos.x
                    v - &rq
                } else {
                    let v = next_above(&(-rq.clone()), 1, &pos.x); // m - rho/q > pos.x
                    v + &rq
                };
                debug_assert!(is_integer(&m));
                let mi = qfloor_i64(&m);
                let center = Pt::new(qi(mi), qi(p * n - q * mi));
                let entry = if left { Marked::DR } else { Marked::UL };
                let entry_pos = self.marked(&center, entry);
                // Generator lifts on this sloped line.
                let mut best: Option<(Q, usize, i64, i64)> = None;
                for (gi, g) in self.gens.iter().enumerate() {
                    let ng = match g.line {
                        LineId::Sloped(ng) => ng,
                        LineId::Vertical(_) => continue,
                    };
                    let b = n - ng;
                    let xx = if left {
                        next_below(&g.pos.x, 1, &pos.x)
                    } else {
                        next_above(&g.pos.x, 1, &pos.x)
                    };
                    let a = &xx - &g.pos.x;
                    debug_assert!(is_integer(&a));
                    let a = qfloor_i64(&a);
                    let better = match &best {
                        None => true,
                        Some((bx, ..)) => {
                            if left {
                                xx > *bx
                            } else {
                                xx < *bx
                            }
                        }
                    };
                    if better {
                        best = Some((xx, gi, a, b));
                    }
                }
                if let Some((xx, gi, a, b)) = best {
                    let closer = if left {
                        xx > entry_pos.x
                    } else {
                        xx < entry_pos.x
                    };
                    assert_ne!(xx, entry_pos.x, "generator at a marked point");
                    if closer {
                        let yy = qi(p * n) - qi(q) * &xx;
                        return AlphaEvent::Gen {
                            gen: gi,
                            a,
                            b,
                            pos: Pt::new(xx, yy),
                        };
                    }
                }
                AlphaEvent::Disk { center, entry }
            }
            _ => unreachable!("direction does not match line type"),
        }
    }

    /// Disk transition table: arriving at a marked point from a travel
    /// direction, the boundary can continue along these chords, leaving at
    /// the chord's endpoint in the stated direction. Arriving at N moving
    /// down is a dead end (only the basepoint arc continues from there).
    pub fn disk_transitions(dir: ADir, entry: Marked) -> &'static [(Chord, Marked, ADir)] {
        match (dir, entry) {
            (ADir::UpLeft, Marked::DR) => &[
                (Chord::C1, Marked::S, ADir::Down),
                (Chord::C12, Marked::UL, ADir::UpLeft),
                (Chord::C123, Marked::N, ADir::Up),
            ],
            (ADir::DownRight, Marked::UL) => &[(Chord::C3, Marked::N, ADir::Up)],
            (ADir::Up, Marked::S) => &[
                (Chord::C2, Marked::UL, ADir::UpLeft),
                (Chord::C23, Marked::N, ADir::Up),
            ],
            (ADir::Down, Marked::N) => &[],
            _ => unreachable!("impossible disk entry"),
        }
    }

    /// Line on which a marked point's exit direction travels.
    pub fn exit_line(&self, center: &Pt, exit: Marked) -> PlaneLine {
        let m = qfloor_i64(&center.x);
        match exit {
            Marked::N | Marked::S => PlaneLine::V(m),
            Marked::UL | Marked::DR => {
                let f = &center.y + qi(self.params.q) * &center.x;
                debug_assert!(is_integer(&f));
                PlaneLine::S(qfloor_i64(&f) / self.params.p)
            }
        }
    }

    /// Is `pt` on any alpha line?
    pub fn on_alpha(&self, pt: &Pt) -> bool {
        if is_integer(&pt.x) {
            return true;
        }
        let f = &pt.y + qi(self.params.q) * &pt.x;
        if is_integer(&f) && qfloor_i64(&f).rem_euclid(self.params.p) == 0 {
            return true;
        }
        false
    }

    /// Is `pt` on the beta weave (any lattice translate)?
    pub fn on_beta(&self, pt: &Pt) -> bool {
        let p = self.params.p;
        for seg in 0..(p as usize) {
            // Need r + delta + p*b <= pt.y <= r + 1 + delta + p*b for a
            // translate b.
            let lo = qi(seg as i64) + station_delta();
            let b = qfloor_i64(&((&pt.y - &lo) / qi(p)));
            for bb in [b, b + 1] {
                let (s, e) = self.beta_segment(seg, 0, bb);
                let xmax = s.x.clone().max(e.x.clone());
                let xmin = s.x.clone().min(e.x.clone());
                // Horizontal reach of a step is less than p; try the few
                // horizontal translates that could contain pt.x.
                let a_lo = qfloor_i64(&(&pt.x - xmax)) - 1;
                let a_hi = qfloor_i64(&(&pt.x - xmin)) + 1;
                for a in a_lo..=a_hi {
                    let (s, e) = self.beta_segment(seg, a, bb);
                    if super::geom::on_segment(&s, &e, pt) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Candidate interior basepoint positions, in deterministic order.
    ///
    /// All sit just east of station 0 on its row, between the station and
    /// the next vertical line; the exact spot is settled by the
    /// operation-count anchors.
    pub fn w_candidates(&self) -> Vec<Pt> {
        let x0 = &self.stations[0].x;
        let gap = qi(1) - x0;
        let mut out = Vec::new();
        for k in 1..=3i64 {
            for e in [Q::zero(), self.sigma.clone(), -self.sigma.clone()] {
                let pt = Pt::new(x0 + &gap * qr(k, 4), qr(1, 2) + e);
                if !self.on_alpha(&pt) && !self.on_beta(&pt) {
                    out.push(pt);
                }
            }
        }
        out
    }

    /// All disk centers within the closed rectangle `[x0,x1] x [y0,y1]`.
    pub fn centers_in_rect(&self, x0: &Q, x1: &Q, y0: &Q, y1: &Q) -> Vec<Pt> {
        let (p, q) = (self.params.p, self.params.q);
        let mut out = Vec::new();
        let m0 = qfloor_i64(x0);
        let m1 = qfloor_i64(x1) + 1;
        for m in m0..=m1 {
            if qi(m) < *x0 || qi(m) > *x1 {
                continue;
            }
            let res = (-q * m).rem_euclid(p);
            let c0 = qfloor_i64(y0);
            let mut c = c0 - (c0 - res).rem_euclid(p);
            debug_assert_eq!((c + q * m).rem_euclid(p), 0);
            while qi(c) < *y0 {
                c += p;
            }
            while qi(c) <= *y1 {
                out.push(Pt::new(qi(m), qi(c)));
                c += p;
            }
        }
        out
    }

    /// All lattice translates of `base` within the closed rectangle.
    pub fn orbit_in_rect(&self, base: &Pt, x0: &Q, x1: &Q, y0: &Q, y1: &Q) -> Vec<Pt> {
        let (p, q) = (self.params.p, self.params.q);
        let mut out = Vec::new();
        let a0 = qfloor_i64(&(x0 - &base.x));
        let a1 = qfloor_i64(&(x1 - &base.x)) + 1;
        for a in a0..=a1 {
            let xx = &base.x + qi(a);
            if xx < *x0 || xx > *x1 {
                continue;
            }
            let yy = &base.y - qi(q * a);
            let b0 = qfloor_i64(&((y0 - &yy) / qi(p)));
            for b in b0..=(qfloor_i64(&((y1 - &yy) / qi(p))) + 1) {
                let y = &yy + qi(p * b);
                if y >= *y0 && y <= *y1 {
                    out.push(Pt::new(xx.clone(), y));
                }
            }
        }
        out
    }
}

/// Build the geometry for one gamma choice. Soft errors (a rejected
/// chamber) come back as strings; the caller collects them as diagnostics.
pub fn build_geometry(params: &CableParams, gamma: Q) -> Result<Diagram, String> {
    let p = params.p;
    let q = params.q;
    let sigma = sigma_for(params);
    let (stations, step_type) = weave(params, &gamma, &sigma);

    // Stations must avoid all alpha lines.
    for (r, st) in stations.iter().enumerate().take(p as usize) {
        if is_integer(&st.x) {
            return Err(format!("station {r} on a vertical line"));
        }
        let f = &st.y + qi(q) * &st.x;
        if is_integer(&f) && qfloor_i64(&f).rem_euclid(p) == 0 {
            return Err(format!("station {r} on a sloped line"));
        }
    }

    // Crossings of each weave step with the alpha lines.
    let mut gens: Vec<GenSite> = Vec::new();
    for r in 0..(p as usize) {
        let a = &stations[r];
        let b = &stations[r + 1];
        let dx = &b.x - &a.x;
        // Verticals strictly between the endpoints.
        let (lo, hi) = if a.x < b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
        let mut m = qfloor_i64(lo) + 1;
        while qi(m) < *hi {
            if qi(m) > *lo {
                let t = (qi(m) - &a.x) / &dx;
                let pos = Pt::new(qi(m), &a.y + &t * (&b.y - &a.y));
                gens.push(GenSite {
                    idem: Idem::I1,
                    step: r,
                    t,
                    pos,
                    canon: Pt::new(Q::zero(), Q::zero()),
                    line: LineId::Vertical(m),
                });
            }
            m += 1;
        }
        // Sloped lines strictly between the endpoint levels of f = eta + q xi.
        let fa = &a.y + qi(q) * &a.x;
        let fb = &b.y + qi(q) * &b.x;
        let (flo, fhi) = if fa < fb { (&fa, &fb) } else { (&fb, &fa) };
        let mut n = qfloor_i64(&(flo / qi(p))) + 1;
        while qi(p * n) < *fhi {
            if qi(p * n) > *flo {
                let t = (qi(p * n) - &fa) / (&fb - &fa);
                let pos = Pt::new(&a.x + &t * &dx, &a.y + &t * (&b.y - &a.y));
                gens.push(GenSite {
                    idem: Idem::I0,
                    step: r,
                    t,
                    pos,
                    canon: Pt::new(Q::zero(), Q::zero()),
                    line: LineId::Sloped(n),
                });
            }
            n += 1;
        }
    }

    let n0 = gens.iter().filter(|g| g.idem == Idem::I0).count() as i64;
    let n1 = gens.iter().filter(|g| g.idem == Idem::I1).count() as i64;
    if n0 != params.rank_iota0() || n1 != params.rank_iota1() {
        return Err(format!(
            "crossing counts ({n0}, {n1}) differ from ({}, {})",
            params.rank_iota0(),
            params.rank_iota1()
        ));
    }

    // Clearance between the weave and the disk centers fixes rho.
    let mut clearance: Option<Q> = None;
    for r in 0..(p as usize) {
        let a = &stations[r];
        let b = &stations[r + 1];
        let (xlo, xhi) = if a.x < b.x {
            (&a.x - qi(1), &b.x + qi(1))
        } else {
            (&b.x - qi(1), &a.x + qi(1))
        };
        for m in qfloor_i64(&xlo)..=(qfloor_i64(&xhi) + 1) {
            for c in (r as i64 - 1)..=(r as i64 + 3) {
                if (c + q * m).rem_euclid(p) != 0 {
                    continue;
                }
                let d = linf_point_segment(&Pt::new(qi(m), qi(c)), a, b);
                clearance = Some(match clearance {
                    None => d,
                    Some(e) if d < e => d,
                    Some(e) => e,
                });
            }
        }
    }
    let clearance = clearance.expect("every step passes near some center");
    if !clearance.is_positive() {
        return Err("weave touches a disk center".into());
    }
    let rho = {
        let cap = qr(1, 8);
        let c4 = &clearance / qi(4);
        if c4 < cap {
            c4
        } else {
            cap
        }
    };

    let mut d = Diagram {
        params: *params,
        gamma,
        sigma,
        rho,
        stations,
        step_type,
        gens,
        w: Pt::new(Q::zero(), Q::zero()),
    };

    // Canonical representatives; generators must be pairwise distinct and
    // stay away from station heights.
    let canons: Vec<Pt> = d.gens.iter().map(|g| d.reduce(&g.pos).0).collect();
    for (g, c) in d.gens.iter_mut().zip(canons) {
        g.canon = c;
    }
    for g in &d.gens {
        if is_integer(&(&g.pos.y - station_delta())) {
            return Err("generator at a station height".into());
        }
    }
    for i in 0..d.gens.len() {
        for j in (i + 1)..d.gens.len() {
            if d.gens[i].canon == d.gens[j].canon {
                return Err(format!("generators {i} and {j} share an orbit"));
            }
        }
    }

    // Deterministic order: idempotent 0 block first, then by canonical
    // position (height, then x).
    d.gens.sort_by(|a, b| {
        (a.idem != Idem::I0, &a.canon.y, &a.canon.x).cmp(&(
            b.idem != Idem::I0,
            &b.canon.y,
            &b.canon.x,
        ))
    });

    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::arithmetic::decompose_pq;

    #[test]
    fn weave_closes_for_known_pairs() {
        for (p, q) in [(3, 2), (5, 2), (5, 3), (7, 5), (7, 2)] {
            let params = decompose_pq(p, q).unwrap();
            let sigma = sigma_for(&params);
            let (st, ty) = weave(&params, &qr(3, 5), &sigma);
            assert_eq!(st.len() as i64, p + 1);
            assert_eq!(ty.len() as i64, p);
            let a_count = ty.iter().filter(|t| **t == StepType::A).count() as i64;
            assert_eq!(a_count, params.x, "A steps == x for ({p},{q})");
            // Closure: X(p) = X(0) + (0, p).
            assert_eq!(st[p as usize].x, st[0].x);
            assert_eq!(st[p as usize].y, &st[0].y + qi(p));
        }
    }

    #[test]
    fn geometry_counts_at_some_chamber() {
        for (p, q) in [(3, 2), (5, 2), (5, 3)] {
            let params = decompose_pq(p, q).unwrap();
            let mids = chamber_midpoints(&params);
            assert!(!mids.is_empty());
            let ok = mids
                .iter()
                .any(|g| build_geometry(&params, g.clone()).is_ok());
            assert!(ok, "no chamber with correct counts for ({p},{q})");
        }
    }

    #[test]
    fn reduction_roundtrip() {
        let params = decompose_pq(3, 2).unwrap();
        let mids = chamber_midpoints(&params);
        let d = mids
            .iter()
            .find_map(|g| build_geometry(&params, g.clone()).ok())
            .unwrap();
        for g in &d.gens {
            let (canon, a, b) = d.reduce(&g.pos);
            assert_eq!(d.translate(&canon, a, b), g.pos);
            assert!(canon.x >= Q::zero() && canon.x < qi(1));
            assert!(canon.y >= Q::zero() && canon.y < qi(3));
        }
    }
}
