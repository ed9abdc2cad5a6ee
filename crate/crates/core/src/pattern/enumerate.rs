//! Polygon enumeration in the universal cover.
//!
//! A structure operation `m(x, c_1, ..., c_k) = U^u * y` of the pattern's
//! type-A module is counted by convex embedded polygons in the plane:
//! the boundary leaves the input generator `x` along its alpha line, travels
//! along alpha lines, detouring around each disk it meets via a boundary
//! chord (contributing `c_1, ..., c_k` in traversal order), arrives at the
//! output generator `y`, and returns to `x` along the beta weave. The
//! polygon is traversed counterclockwise, both generator corners are convex,
//! the boundary is simple, the interior avoids every disk and every
//! forbidden-basepoint query point, and `u` counts the lattice translates of
//! the interior basepoint it contains.
//!
//! Enumeration itself never looks at the interior basepoint: the polygon set
//! depends only on the curve geometry. Basepoint multiplicities are counted
//! afterwards, which lets the builder choose the basepoint position against
//! the counting constraints the distinguished operations must satisfy.
//!
//! The search is a depth-first walk over alpha paths: at every beta crossing
//! it may stop (close the polygon) or pass through; at every disk it
//! branches over the admissible chords. Caps bound the chord count and how
//! far the boundary may wander; a global budget guards against blowups.

use super::diagram::{ADir, AlphaEvent, Diagram, LineId, PlaneLine};
use super::geom::{
    compress_cycle, is_simple, orient, point_in_polygon, qi, qr, shoelace2, Pt, Q,
};
use crate::algebra::{Chord, Idem};
use crate::{CfError, Result};
use num::Signed;
use std::collections::HashMap;

/// Enumeration caps, settable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumCaps {
    /// Maximum number of boundary chords per operation.
    pub max_chords: usize,
    /// How far a polygon may wander vertically, in fundamental domains;
    /// also bounds the beta arc length. The default is consistent with
    /// `max_chords`: every polygon within the chord cap fits the window.
    pub w_mult: i64,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps {
            max_chords: 8,
            w_mult: 9,
        }
    }
}

impl EnumCaps {
    fn eta_window(&self, p: i64) -> Q {
        qi((self.w_mult + 2) * p)
    }

    fn beta_steps(&self, p: i64) -> usize {
        ((self.w_mult + 2) * p) as usize
    }
}

/// One validated polygon: a candidate monomial of a structure operation,
/// with its basepoint multiplicity not yet counted.
#[derive(Debug, Clone)]
pub struct Polygon {
    /// Input generator (the corner the beta arc arrives at).
    pub input: usize,
    /// Boundary chords in traversal order.
    pub chords: Vec<Chord>,
    /// Output generator (the corner the beta arc leaves from).
    pub output: usize,
    /// Compressed counterclockwise vertex cycle.
    pub verts: Vec<Pt>,
}

impl Polygon {
    /// Count lattice translates of `w` inside this polygon. `None` if some
    /// translate lands exactly on the boundary (the basepoint candidate is
    /// then too degenerate to use).
    pub fn basepoint_count(&self, d: &Diagram, w: &Pt) -> Option<i64> {
        let (x0, x1, y0, y1) = bbox(&self.verts);
        let mut u = 0i64;
        for pt in d.orbit_in_rect(w, &x0, &x1, &y0, &y1) {
            match point_in_polygon(&pt, &self.verts) {
                Some(true) => u += 1,
                Some(false) => {}
                None => return None,
            }
        }
        Some(u)
    }

    /// Interior sample points on a coarse grid, for basepoint placement.
    pub fn interior_samples(&self, per_axis: i64) -> Vec<Pt> {
        let (x0, x1, y0, y1) = bbox(&self.verts);
        let dx = &x1 - &x0;
        let dy = &y1 - &y0;
        let mut out = Vec::new();
        for i in 1..=per_axis {
            for j in 1..=per_axis {
                let pt = Pt {
                    x: &x0 + &dx * qr(i, per_axis + 1),
                    y: &y0 + &dy * qr(j, per_axis + 1),
                };
                if point_in_polygon(&pt, &self.verts) == Some(true) {
                    out.push(pt);
                }
            }
        }
        out
    }
}

fn bbox(verts: &[Pt]) -> (Q, Q, Q, Q) {
    let mut x0 = verts[0].x.clone();
    let mut x1 = x0.clone();
    let mut y0 = verts[0].y.clone();
    let mut y1 = y0.clone();
    for v in verts {
        if v.x < x0 {
            x0 = v.x.clone();
        }
        if v.x > x1 {
            x1 = v.x.clone();
        }
        if v.y < y0 {
            y0 = v.y.clone();
        }
        if v.y > y1 {
            y1 = v.y.clone();
        }
    }
    (x0, x1, y0, y1)
}

/// One precomputed alpha-line event, keyed by its height on the line.
#[derive(Debug, Clone)]
enum CEvent {
    Gen { gen: usize, a: i64, b: i64, pos: Pt },
    Disk { center: Pt },
}

/// Events along one alpha line within the working window: `up` ascending in
/// height (valid walking up / up-left), `down` descending (valid walking
/// down / down-right). Alpha walks revisit the same lines constantly, so
/// materializing each line once pays for itself many times over.
struct LineCache {
    up: Vec<(Q, CEvent)>,
    down: Vec<(Q, CEvent)>,
}

fn line_point_at(d: &Diagram, line: PlaneLine, y: &Q) -> Pt {
    match line {
        PlaneLine::V(m) => Pt {
            x: qi(m),
            y: y.clone(),
        },
        PlaneLine::S(n) => Pt {
            x: (qi(d.params.p * n) - y) / qi(d.params.q),
            y: y.clone(),
        },
    }
}

fn build_line_cache(d: &Diagram, line: PlaneLine, lo: &Q, hi: &Q) -> LineCache {
    let sweep = |start_y: &Q, dir: ADir, ascending: bool| {
        let mut events = Vec::new();
        let mut pos = line_point_at(d, line, start_y);
        loop {
            let (y, cev, next) = match d.next_event(line, &pos, dir) {
                AlphaEvent::Gen { gen, a, b, pos: gpos } => (
                    gpos.y.clone(),
                    CEvent::Gen {
                        gen,
                        a,
                        b,
                        pos: gpos.clone(),
                    },
                    gpos,
                ),
                AlphaEvent::Disk { center, entry } => {
                    let ep = d.marked(&center, entry);
                    (ep.y.clone(), CEvent::Disk { center }, ep)
                }
            };
            if (ascending && y > *hi) || (!ascending && y < *lo) {
                break;
            }
            events.push((y, cev));
            pos = next;
        }
        events
    };
    let (up_dir, down_dir) = match line {
        PlaneLine::V(_) => (ADir::Up, ADir::Down),
        PlaneLine::S(_) => (ADir::UpLeft, ADir::DownRight),
    };
    LineCache {
        up: sweep(lo, up_dir, true),
        down: sweep(hi, down_dir, false),
    }
}


/// One side of the root's beta scan: which generator lifts of the root's
/// weave strand lie on this side within the step cap, and the station path
/// towards them. `lifts[(gen, b)] = k` means the beta arc from that lift
/// back to the root is `stations[..k]` reversed.
struct BetaSide {
    lifts: HashMap<(usize, i64), usize>,
    stations: Vec<Pt>,
}

fn beta_side(d: &Diagram, root: usize, up: bool, max_steps: usize) -> BetaSide {
    let from = d.gen_beta_pos(root, 0, 0);
    let (stations, lifts) = d.beta_scan(&from, up, max_steps);
    BetaSide {
        lifts: lifts.into_iter().map(|(g, b, k)| ((g, b), k)).collect(),
        stations,
    }
}

struct Dfs<'a> {
    d: &'a Diagram,
    caps: EnumCaps,
    prefix: Option<&'a [Chord]>,
    root: usize,
    root_pos: Pt,
    /// Lifts reachable walking down along beta from the root (the closing
    /// arc from such a lift runs upward), and walking up.
    below: BetaSide,
    above: BetaSide,
    budget: i64,
    cache: &'a mut HashMap<PlaneLine, LineCache>,
    win_lo: Q,
    win_hi: Q,
    out: Vec<Polygon>,
}

impl<'a> Dfs<'a> {
    fn spend(&mut self) -> Result<()> {
        self.budget -= 1;
        if self.budget <= 0 {
            return Err(CfError::Unsupported(format!(
                "enumeration budget exceeded for the ({}, {}) pattern; \
                 retry with smaller caps",
                self.d.params.p, self.d.params.q
            )));
        }
        Ok(())
    }

    /// Next event on `line` beyond `pos` in direction `dir`, with its index
    /// in the per-line event list. `hint` short-circuits the binary search
    /// when the caller knows the index (continuing past a crossing).
    fn cached_next(
        &mut self,
        line: PlaneLine,
        pos: &Pt,
        dir: ADir,
        hint: Option<usize>,
    ) -> Option<(AlphaEvent, usize)> {
        let d = self.d;
        let (lo, hi) = (&self.win_lo, &self.win_hi);
        let lc = self
            .cache
            .entry(line)
            .or_insert_with(|| build_line_cache(d, line, lo, hi));
        let upward = matches!(dir, ADir::Up | ADir::UpLeft);
        let list = if upward { &lc.up } else { &lc.down };
        let idx = match hint {
            Some(i) => i,
            None if upward => list.partition_point(|(y, _)| *y <= pos.y),
            None => list.partition_point(|(y, _)| *y >= pos.y),
        };
        let (_, cev) = list.get(idx)?;
        let event = match cev {
            CEvent::Gen { gen, a, b, pos } => AlphaEvent::Gen {
                gen: *gen,
                a: *a,
                b: *b,
                pos: pos.clone(),
            },
            CEvent::Disk { center } => {
                let entry = match (line, dir) {
                    (PlaneLine::V(_), ADir::Up) => super::diagram::Marked::S,
                    (PlaneLine::V(_), ADir::Down) => super::diagram::Marked::N,
                    (PlaneLine::S(_), ADir::UpLeft) => super::diagram::Marked::DR,
                    (PlaneLine::S(_), ADir::DownRight) => super::diagram::Marked::UL,
                    _ => unreachable!("direction does not match line type"),
                };
                AlphaEvent::Disk {
                    center: center.clone(),
                    entry,
                }
            }
        };
        Some((event, idx))
    }

    fn walk(
        &mut self,
        line: PlaneLine,
        pos: Pt,
        dir: ADir,
        hint: Option<usize>,
        verts: &mut Vec<Pt>,
        chords: &mut Vec<Chord>,
    ) -> Result<()> {
        self.spend()?;
        if (&pos.y - &self.root_pos.y).abs() > self.caps.eta_window(self.d.params.p) {
            return Ok(());
        }
        let Some((event, idx)) = self.cached_next(line, &pos, dir, hint) else {
            return Ok(());
        };
        match event {
            AlphaEvent::Gen { gen, a, b, pos: gpos } => {
                if gpos == self.root_pos {
                    // The boundary would pass through the input corner again;
                    // no simple polygon can come of it.
                    return Ok(());
                }
                self.try_close(gen, a, b, &gpos, verts, chords)?;
                self.walk(line, gpos, dir, Some(idx + 1), verts, chords)
            }
            AlphaEvent::Disk { center, entry } => {
                for &(chord, exit, exit_dir) in Diagram::disk_transitions(dir, entry) {
                    if chords.len() >= self.caps.max_chords {
                        continue;
                    }
                    if let Some(pref) = self.prefix {
                        if chords.len() >= pref.len() || pref[chords.len()] != chord {
                            continue;
                        }
                    }
                    let path = self.d.chord_path(&center, chord);
                    let added = path.len();
                    verts.extend(path);
                    chords.push(chord);
                    let exit_pos = self.d.marked(&center, exit);
                    let exit_line = self.d.exit_line(&center, exit);
                    self.walk(exit_line, exit_pos, exit_dir, None, verts, chords)?;
                    chords.pop();
                    verts.truncate(verts.len() - added);
                }
                Ok(())
            }
        }
    }

    fn try_close(
        &mut self,
        gen: usize,
        a: i64,
        b: i64,
        gpos: &Pt,
        verts: &[Pt],
        chords: &[Chord],
    ) -> Result<()> {
        if let Some(pref) = self.prefix {
            if chords != pref {
                return Ok(());
            }
        }
        // Beta arc from the candidate output corner back to the input. Only
        // lifts on the root's own weave strand (a = 0) and within the step
        // cap can close; the precomputed scan answers both in one lookup.
        let up = self.root_pos.y > gpos.y;
        if a != 0 {
            return Ok(());
        }
        let side = if up { &self.below } else { &self.above };
        let Some(&plen) = side.lifts.get(&(gen, b)) else {
            return Ok(());
        };

        // Both corners must be convex in the counterclockwise traversal.
        // The incident edge directions are already known, so this exact
        // test runs before any cycle is materialized.
        let out_next = if plen > 0 {
            &side.stations[plen - 1]
        } else {
            &self.root_pos
        };
        let out_prev = verts.last().expect("path holds at least the root");
        if orient(out_prev, gpos, out_next) <= 0 {
            return Ok(());
        }
        let root_prev = if plen > 0 { &side.stations[0] } else { gpos };
        let root_next = if verts.len() > 1 { &verts[1] } else { gpos };
        if orient(root_prev, &self.root_pos, root_next) <= 0 {
            return Ok(());
        }

        let mut cycle: Vec<Pt> = verts.to_vec();
        cycle.push(gpos.clone());
        cycle.extend(side.stations[..plen].iter().rev().cloned());
        let Some(cycle) = compress_cycle(cycle) else {
            return Ok(());
        };
        if !shoelace2(&cycle).is_positive() {
            return Ok(());
        }
        let n = cycle.len();
        let find = |pt: &Pt| cycle.iter().position(|v| v == pt);
        let (Some(ci), Some(ri)) = (find(gpos), find(&self.root_pos)) else {
            return Err(CfError::Internal(
                "polygon corner merged with the boundary".into(),
            ));
        };
        for idx in [ci, ri] {
            let prev = &cycle[(idx + n - 1) % n];
            let next = &cycle[(idx + 1) % n];
            if orient(prev, &cycle[idx], next) <= 0 {
                return Ok(());
            }
        }
        if !is_simple(&cycle) {
            return Ok(());
        }

        // Interior exclusions: no disk and no forbidden-basepoint query
        // point may sit inside the polygon.
        let (x0, x1, y0, y1) = bbox(&cycle);
        let inside = |pt: &Pt| -> Result<bool> {
            point_in_polygon(pt, &cycle).ok_or_else(|| {
                CfError::Internal("interior query point on a polygon boundary".into())
            })
        };
        for center in self
            .d
            .centers_in_rect(&(&x0 - qi(2)), &(&x1 + qi(2)), &(&y0 - qi(2)), &(&y1 + qi(2)))
        {
            if inside(&self.d.z_query(&center))? || inside(&self.d.hole_query(&center))? {
                return Ok(());
            }
        }

        // The geometry forces idempotent coherence; check it anyway, since a
        // violation would mean the model itself is broken.
        let gi = self.d.gens[self.root].idem;
        let go = self.d.gens[gen].idem;
        let coherent = if chords.is_empty() {
            gi == go
        } else {
            let mut ok = gi == chords[0].left_idem();
            for pair in chords.windows(2) {
                ok &= pair[0].right_idem() == pair[1].left_idem();
            }
            ok && chords[chords.len() - 1].right_idem() == go
        };
        if !coherent {
            return Err(CfError::Internal(format!(
                "idempotent mismatch along chords {:?}",
                chords
            )));
        }

        self.out.push(Polygon {
            input: self.root,
            chords: chords.to_vec(),
            output: gen,
            verts: cycle,
        });
        Ok(())
    }
}

/// Enumerate polygons rooted at the given input generators (all generators
/// if `roots` is `None`). `prefix` restricts the search to one exact chord
/// sequence, which makes targeted probes cheap.
pub fn enumerate_polygons(
    d: &Diagram,
    caps: &EnumCaps,
    roots: Option<&[usize]>,
    prefix: Option<&[Chord]>,
) -> Result<Vec<Polygon>> {
    let all: Vec<usize> = (0..d.gens.len()).collect();
    let roots = roots.unwrap_or(&all);
    // Line events are shared by every root: any walk stays within the eta
    // window of its own root, so one window covering all roots suffices.
    let window = caps.eta_window(d.params.p);
    let ys = || d.gens.iter().map(|g| g.pos.y.clone());
    let win_lo = ys().min().unwrap() - &window - qi(d.params.p);
    let win_hi = ys().max().unwrap() + &window + qi(d.params.p);
    let mut cache: HashMap<PlaneLine, LineCache> = HashMap::new();
    let mut out = Vec::new();
    for &root in roots {
        let steps = caps.beta_steps(d.params.p);
        let mut dfs = Dfs {
            d,
            caps: *caps,
            prefix,
            root,
            root_pos: d.gens[root].pos.clone(),
            below: beta_side(d, root, false, steps),
            above: beta_side(d, root, true, steps),
            budget: 4_000_000,
            cache: &mut cache,
            win_lo: win_lo.clone(),
            win_hi: win_hi.clone(),
            out: Vec::new(),
        };
        let dirs: [ADir; 2] = match d.gens[root].line {
            LineId::Vertical(_) => [ADir::Up, ADir::Down],
            LineId::Sloped(_) => [ADir::UpLeft, ADir::DownRight],
        };
        let line = d.line_of_lift(root, 0, 0);
        for dir in dirs {
            let mut verts = vec![d.gens[root].pos.clone()];
            let mut chords = Vec::new();
            let pos = d.gens[root].pos.clone();
            dfs.walk(line, pos, dir, None, &mut verts, &mut chords)?;
        }
        out.append(&mut dfs.out);
    }
    Ok(out)
}

/// Structural anchors of a polygon set: the distinguished generator `a`
/// (unique carrier of a (rho3, rho2) self-operation), the generator `b1`
/// (target of the unique (rho3, rho2, rho1) operation from `a`), and the
/// indices of those two polygons. Soft failures reject the chamber.
pub struct Anchors {
    pub a: usize,
    pub b1: usize,
    pub self_op: usize,
    pub quad_op: usize,
}

pub fn find_anchors(d: &Diagram, polys: &[Polygon]) -> std::result::Result<Anchors, String> {
    let selfs: Vec<usize> = (0..polys.len())
        .filter(|&i| {
            polys[i].chords == [Chord::C3, Chord::C2] && polys[i].input == polys[i].output
        })
        .collect();
    let &[self_op] = selfs.as_slice() else {
        return Err(format!(
            "expected one distinguished self-operation, found {}",
            selfs.len()
        ));
    };
    let a = polys[self_op].input;
    if d.gens[a].idem != Idem::I0 {
        return Err("distinguished generator has the wrong idempotent".into());
    }
    let quads: Vec<usize> = (0..polys.len())
        .filter(|&i| polys[i].chords == [Chord::C3, Chord::C2, Chord::C1] && polys[i].input == a)
        .collect();
    let &[quad_op] = quads.as_slice() else {
        return Err(format!(
            "expected one length-three operation from the distinguished generator, found {}",
            quads.len()
        ));
    };
    let b1 = polys[quad_op].output;
    if d.gens[b1].idem != Idem::I1 {
        return Err("length-three operation lands in the wrong idempotent".into());
    }
    Ok(Anchors {
        a,
        b1,
        self_op,
        quad_op,
    })
}

/// Choose the interior basepoint: a position off every curve for which the
/// distinguished self-operation counts `v*x + 1`, the length-three operation
/// counts exactly one, and the operations touching `b1` keep the
/// certification argument sound. The argument needs exactly two properties
/// of `b1`: every operation consuming it carries a positive power of `U`
/// (so `b1` cannot leak out of a cycle after setting `U = 0`), and no
/// `U`-free operation produces it through a final `rho1` or `rho123` chord
/// (the two chord types whose paired module arrows reach a witness target).
/// Operations into `b1` ending in other chords may be `U`-free: they pair
/// with arrows that never land on a witness.
/// Returns the basepoint and the per-polygon multiplicities.
pub fn select_basepoint(
    d: &Diagram,
    polys: &[Polygon],
    anchors: &Anchors,
) -> std::result::Result<(Pt, Vec<i64>), String> {
    let mut candidates = d.w_candidates();
    for (i, poly) in polys.iter().enumerate() {
        if (poly.input == anchors.b1 || poly.output == anchors.b1) && i != anchors.quad_op {
            candidates.extend(
                poly.interior_samples(6)
                    .into_iter()
                    .filter(|pt| !d.on_alpha(pt) && !d.on_beta(pt)),
            );
        }
    }
    let mut reasons: Vec<String> = Vec::new();
    'cand: for w in candidates {
        let mut counts = Vec::with_capacity(polys.len());
        for poly in polys {
            match poly.basepoint_count(d, &w) {
                Some(u) => counts.push(u),
                None => {
                    reasons.push("basepoint translate on a polygon boundary".into());
                    continue 'cand;
                }
            }
        }
        if counts[anchors.self_op] != d.params.n_w() {
            reasons.push(format!(
                "self-operation multiplicity {} instead of {}",
                counts[anchors.self_op],
                d.params.n_w()
            ));
            continue;
        }
        if counts[anchors.quad_op] != 1 {
            reasons.push(format!(
                "length-three operation multiplicity {} instead of 1",
                counts[anchors.quad_op]
            ));
            continue;
        }
        for (i, poly) in polys.iter().enumerate() {
            if counts[i] != 0 {
                continue;
            }
            if poly.input == anchors.b1 {
                reasons.push(format!(
                    "operation consuming b1 without basepoint (chords {:?})",
                    poly.chords
                ));
                continue 'cand;
            }
            if poly.output == anchors.b1
                && matches!(poly.chords.last(), Some(Chord::C1) | Some(Chord::C123))
            {
                reasons.push(format!(
                    "basepoint-free operation into b1 ends in a witness chord (chords {:?})",
                    poly.chords
                ));
                continue 'cand;
            }
        }
        return Ok((w, counts));
    }
    reasons.sort();
    reasons.dedup();
    Err(format!("no admissible basepoint: {}", reasons.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::arithmetic::decompose_pq;
    use crate::pattern::diagram::{build_geometry, chamber_midpoints};

    fn solved(p: i64, q: i64) -> (Diagram, Vec<Polygon>, Anchors, Vec<i64>) {
        let params = decompose_pq(p, q).unwrap();
        let caps = EnumCaps::default();
        for gamma in chamber_midpoints(&params) {
            let Ok(mut d) = build_geometry(&params, gamma) else {
                continue;
            };
            let Ok(polys) = enumerate_polygons(&d, &caps, None, None) else {
                continue;
            };
            let Ok(anchors) = find_anchors(&d, &polys) else {
                continue;
            };
            let Ok((w, counts)) = select_basepoint(&d, &polys, &anchors) else {
                continue;
            };
            d.w = w;
            return (d, polys, anchors, counts);
        }
        panic!("no admissible diagram for ({p},{q})");
    }

    fn check_distinguished(p: i64, q: i64) {
        let (d, polys, anchors, counts) = solved(p, q);
        assert_eq!(d.gens[anchors.a].idem, Idem::I0);
        assert_eq!(d.gens[anchors.b1].idem, Idem::I1);
        assert_eq!(counts[anchors.self_op], d.params.n_w());
        assert_eq!(counts[anchors.quad_op], 1);
        for (i, poly) in polys.iter().enumerate() {
            if poly.input == anchors.b1 {
                assert!(
                    counts[i] >= 1,
                    "operation consuming b1 {:?} has no basepoint",
                    poly.chords
                );
            }
            if poly.output == anchors.b1 && counts[i] == 0 {
                assert!(
                    !matches!(poly.chords.last(), Some(Chord::C1) | Some(Chord::C123)),
                    "basepoint-free operation into b1 {:?} ends in a witness chord",
                    poly.chords
                );
            }
        }
    }

    #[test]
    fn distinguished_generators_3_2() {
        check_distinguished(3, 2);
    }

    #[test]
    fn distinguished_generators_5_2() {
        check_distinguished(5, 2);
    }

    #[test]
    fn distinguished_generators_5_3() {
        check_distinguished(5, 3);
    }
}
