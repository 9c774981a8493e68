//! Strand-level model of an integral multicurve and its component count.
//!
//! An integral, parity-consistent coordinate vector describes a disjoint
//! union of simple closed curves and (in full scope) arcs to the boundary.
//! To count its connected components the multicurve is rebuilt strand by
//! strand: every pants curve with measure m contributes a window of m
//! crossing points on each of its (one or two) slots, the arc weights of
//! each pants pair up crossing points inside the pants, and the twisting
//! measure dictates how windows match across each interior curve. The
//! resulting graph has degree at most two, so its components are exactly
//! the cycles and paths of the multicurve. Curves with measure zero and
//! twist w contribute |w| parallel copies of the pants curve itself.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::coords::{m_to_lambda, DTCoords, IntegralMulticurve, Scope};
use crate::rat::Rat;
use crate::surface::{CurveEnds, PantsDecomposition, SlotBinding, SlotRef};
use crate::{Error, Result};

/// One window of crossing points: `size` strand ends on a given slot.
#[derive(Debug, Clone)]
pub struct Window {
    pub slot: SlotRef,
    pub curve: usize,
    pub size: usize,
    /// First node id of this window in the flat node numbering.
    pub base: usize,
}

/// The assembled strand graph of one integral multicurve.
#[derive(Debug, Clone)]
pub struct StrandModel {
    windows: Vec<Window>,
    node_count: usize,
    /// Strand segments inside pants and across gluings; each node appears
    /// in at most two edges.
    edges: Vec<(usize, usize)>,
    /// Components that never enter a pants: |t| copies per measure-zero curve.
    parallel_components: u64,
}

impl StrandModel {
    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn parallel_components(&self) -> u64 {
        self.parallel_components
    }

    /// Cycles plus boundary-to-boundary paths plus parallel copies.
    pub fn component_count(&self) -> u64 {
        let mut uf = UnionFind::new(self.node_count);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut roots = vec![false; self.node_count];
        let mut traced = 0u64;
        for v in 0..self.node_count {
            let r = uf.find(v);
            if !roots[r] {
                roots[r] = true;
                traced += 1;
            }
        }
        traced + self.parallel_components
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn to_usize(x: &Rat, what: &str) -> Result<usize> {
    x.numer()
        .to_usize()
        .ok_or_else(|| Error::Coords(format!("{what} is too large to trace")))
}

/// In-scope integral measure of the curve in a slot, 0 otherwise.
fn slot_size(coords: &DTCoords, binding: SlotBinding) -> Result<usize> {
    let m = match binding {
        SlotBinding::Interior(c) => coords.get(c).map(|(m, _)| m.clone()),
        SlotBinding::Boundary(c) => match coords.scope() {
            Scope::MF => coords.get(c).map(|(m, _)| m.clone()),
            Scope::MF0 => None,
        },
        SlotBinding::Puncture => None,
    }
    .unwrap_or_else(Rat::zero);
    to_usize(&m, "an intersection measure")
}

/// Builds the strand graph of an integral multicurve.
pub fn build_strand_model(
    pd: &PantsDecomposition,
    mc: &IntegralMulticurve,
) -> Result<StrandModel> {
    let coords = mc.coords();
    coords.check_fresh(pd)?;

    // windows, one per slot that carries a positive in-scope measure
    let mut windows = Vec::new();
    let mut window_at = vec![[usize::MAX; 3]; pd.pants_count()];
    let mut base = 0usize;
    for p in 0..pd.pants_count() {
        for s in 0..3 {
            let binding = pd.slots(p)[s];
            let size = slot_size(coords, binding)?;
            if size > 0 {
                window_at[p][s] = windows.len();
                windows.push(Window {
                    slot: SlotRef::new(p, s),
                    curve: binding.curve().expect("positive measure implies a curve"),
                    size,
                    base,
                });
                base += size;
            }
        }
    }
    let node_count = base;
    let mut edges = Vec::new();

    // pants-interior segments: positions inside the window of slot i are
    // laid out following the cyclic orientation of the pants, as
    // [arcs to slot i+1][loop left ends][arcs to slot i+2]
    // [loop right ends, innermost first], slot arithmetic mod 3; a loop on
    // slot i wraps around leg i+2, so its right ends sit past those arcs
    for p in 0..pd.pants_count() {
        let sizes: Vec<Rat> = (0..3)
            .map(|s| slot_size(coords, pd.slots(p)[s]).map(|v| Rat::from_integer(v.into())))
            .collect::<Result<_>>()?;
        let w = m_to_lambda(&sizes[0], &sizes[1], &sizes[2])?;
        let lam = |i: usize, j: usize| -> Result<usize> {
            let v = match (i.min(j), i.max(j)) {
                (0, 0) => &w.l11,
                (1, 1) => &w.l22,
                (2, 2) => &w.l33,
                (0, 1) => &w.l12,
                (0, 2) => &w.l13,
                (1, 2) => &w.l23,
                _ => unreachable!(),
            };
            if !v.is_integer() {
                return Err(Error::Internal(
                    "parity-consistent measures gave fractional arc weights".into(),
                ));
            }
            to_usize(v, "an arc weight")
        };

        // node id of the a-th point in slot i's block of arcs toward slot o
        let arc_node = |i: usize, o: usize, a: usize| -> Result<usize> {
            let mut off = a;
            if o == (i + 2) % 3 {
                off += lam(i, (i + 1) % 3)? + lam(i, i)?;
            }
            let win = &windows[window_at[p][i]];
            Ok(win.base + off)
        };
        let loop_left = |i: usize, a: usize| -> Result<usize> {
            let win = &windows[window_at[p][i]];
            Ok(win.base + lam(i, (i + 1) % 3)? + a)
        };
        let loop_right = |i: usize, a: usize| -> Result<usize> {
            let win = &windows[window_at[p][i]];
            let base = lam(i, (i + 1) % 3)? + lam(i, i)? + lam(i, (i + 2) % 3)?;
            // nesting: the a-th loop from the outside closes innermost-last
            Ok(win.base + base + (lam(i, i)? - 1 - a))
        };

        for i in 0..3 {
            for j in (i + 1)..3 {
                let lij = lam(i, j)?;
                for a in 0..lij {
                    edges.push((arc_node(i, j, a)?, arc_node(j, i, lij - 1 - a)?));
                }
            }
            let lii = lam(i, i)?;
            for a in 0..lii {
                edges.push((loop_left(i, a)?, loop_right(i, a)?));
            }
        }
    }

    // gluing segments across each interior curve with positive measure
    for (c, rec) in pd.curves() {
        let CurveEnds::Interior(ends) = rec.ends else {
            continue;
        };
        let Some((m, t)) = coords.get(c) else {
            continue;
        };
        if m.is_zero() {
            continue;
        }
        let m_int = m.numer().clone();
        let shift = t.numer().mod_floor(&m_int);
        let m_us = to_usize(m, "an intersection measure")?;
        let shift = shift.to_usize().ok_or_else(|| {
            Error::Coords("a twisting measure is too large to trace".into())
        })?;
        let wx = &windows[window_at[ends[0].pants][ends[0].slot]];
        let wy = &windows[window_at[ends[1].pants][ends[1].slot]];
        for pos in 0..m_us {
            let other = (m_us - 1 + shift - pos) % m_us;
            edges.push((wx.base + pos, wy.base + other));
        }
    }

    // measure-zero curves with twist w: |w| disjoint parallel copies
    let mut parallel = 0u64;
    for e in coords.entries() {
        if e.m.is_zero() && !e.t.is_zero() {
            parallel += e
                .t
                .numer()
                .abs()
                .to_u64()
                .ok_or_else(|| Error::Coords("a twisting measure is too large".into()))?;
        }
    }

    Ok(StrandModel {
        windows,
        node_count,
        edges,
        parallel_components: parallel,
    })
}

/// Number of connected components of an integral multicurve.
pub fn count_components(pd: &PantsDecomposition, mc: &IntegralMulticurve) -> Result<u64> {
    Ok(build_strand_model(pd, mc)?.component_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::{validate_integral, DTCoords};
    use crate::rat::rat;
    use crate::surface::preset;

    fn multicurve(
        pd: &PantsDecomposition,
        scope: Scope,
        triples: &[(usize, i64, i64)],
    ) -> IntegralMulticurve {
        let triples: Vec<(usize, Rat, Rat)> = triples
            .iter()
            .map(|(c, m, t)| (*c, rat(*m), rat(*t)))
            .collect();
        let coords = DTCoords::bind(pd, scope, &triples)
            .unwrap()
            .normalize()
            .unwrap();
        validate_integral(pd, &coords).unwrap()
    }

    fn gcd64(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd64(b, a % b)
        }
    }

    #[test]
    fn torus_counts_are_gcds() {
        let pd = preset("once-punctured-torus").unwrap();
        for m in 0..=30i64 {
            for t in -30..=30i64 {
                if m == 0 && t < 0 {
                    continue;
                }
                let mc = multicurve(&pd, Scope::MF0, &[(0, m, t)]);
                let expected = gcd64(m as u64, t.unsigned_abs());
                assert_eq!(
                    count_components(&pd, &mc).unwrap(),
                    expected,
                    "(m,t)=({m},{t})"
                );
            }
        }
    }

    #[test]
    fn zero_vector_has_no_components() {
        for name in crate::surface::PRESET_NAMES {
            let pd = preset(name).unwrap();
            let mc = validate_integral(&pd, &DTCoords::zero(&pd, Scope::MF0)).unwrap();
            assert_eq!(count_components(&pd, &mc).unwrap(), 0, "{name}");
        }
    }

    #[test]
    fn measure_zero_twists_count_parallel_copies() {
        let pd = preset("four-holed-sphere").unwrap();
        for t in 0..6i64 {
            let mc = multicurve(&pd, Scope::MF0, &[(0, 0, t)]);
            assert_eq!(count_components(&pd, &mc).unwrap(), t as u64);
        }
    }

    #[test]
    fn four_holed_sphere_small_cases() {
        let pd = preset("four-holed-sphere").unwrap();
        // one curve around two holes
        let mc = multicurve(&pd, Scope::MF0, &[(0, 2, 0)]);
        assert_eq!(count_components(&pd, &mc).unwrap(), 1);
        // twisting does not split it
        let mc = multicurve(&pd, Scope::MF0, &[(0, 2, -2)]);
        assert_eq!(count_components(&pd, &mc).unwrap(), 1);
        // two parallel copies
        let mc = multicurve(&pd, Scope::MF0, &[(0, 4, 0)]);
        assert_eq!(count_components(&pd, &mc).unwrap(), 2);

        // an arc from boundary 1 to boundary 2, plus the loop around the
        // far pants it has to thread through
        let mc = multicurve(
            &pd,
            Scope::MF,
            &[(0, 2, 0), (1, 1, 0), (2, 1, 0), (3, 0, 0), (4, 0, 0)],
        );
        assert_eq!(count_components(&pd, &mc).unwrap(), 1);
    }

    #[test]
    fn boundary_twists_do_not_change_counts() {
        let pd = preset("one-holed-torus").unwrap();
        let base = multicurve(&pd, Scope::MF, &[(0, 2, 3), (1, 2, 0)]);
        let twisted = multicurve(&pd, Scope::MF, &[(0, 2, 3), (1, 2, 7)]);
        assert_eq!(
            count_components(&pd, &base).unwrap(),
            count_components(&pd, &twisted).unwrap()
        );
    }

    #[test]
    fn counts_survive_moves_when_the_glued_slots_differ() {
        use crate::coords::sample;
        use crate::moves::{apply_generator, Generator};
        use crate::surface::{GluingDescription, SlotRef};

        // a four-holed sphere whose interior curve sits in slot 0 of one
        // pants but slot 1 of the other, so the second move has to read the
        // free-slot roles off the cyclic order rather than off raw indices
        let pd = PantsDecomposition::from_description(&GluingDescription {
            genus: 0,
            boundary: 4,
            punctures: 0,
            pants: 2,
            interior: vec![[SlotRef::new(0, 0), SlotRef::new(1, 1)]],
            boundary_slots: vec![
                SlotRef::new(0, 1),
                SlotRef::new(0, 2),
                SlotRef::new(1, 0),
                SlotRef::new(1, 2),
            ],
            punctures_at: vec![],
        })
        .unwrap();

        for scope in [Scope::MF0, Scope::MF] {
            for site in pd.move_sites() {
                let gen = Generator::Move(site);
                for k in 0..60u64 {
                    let s = 0x5EEDu64.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                    let mc = sample(&pd, scope, 6, s);
                    let before = count_components(&pd, &mc).unwrap();
                    let (moved, pd1) = apply_generator(&pd, mc.coords(), &gen).unwrap();
                    let moved = validate_integral(&pd1, &moved).unwrap();
                    let after = count_components(&pd1, &moved).unwrap();
                    assert_eq!(before, after, "{scope:?} {} seed {s}", gen);
                }
            }
        }
    }

    #[test]
    fn model_shape_is_consistent() {
        let pd = preset("genus-two-closed").unwrap();
        let mc = multicurve(&pd, Scope::MF0, &[(0, 2, 1), (1, 2, 0), (2, 4, -3)]);
        let model = build_strand_model(&pd, &mc).unwrap();
        // every node lies on exactly one pants segment and one gluing segment
        let mut degree = vec![0u32; model.node_count()];
        for &(a, b) in model.edges() {
            degree[a] += 1;
            degree[b] += 1;
        }
        assert!(degree.iter().all(|&d| d == 2));
        let total: usize = model.windows().iter().map(|w| w.size).sum();
        assert_eq!(total, model.node_count());
    }
}
