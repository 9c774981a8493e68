//! Dehn-Thurston coordinate vectors and per-pants arc weights.
//!
//! Each pants curve i carries an intersection measure m_i >= 0 and a
//! twisting measure t_i; the pair lives in the quotient of the half-plane
//! by (m, t) ~ (-m, -t), and the canonical representative has m >= 0 with
//! t >= 0 whenever m = 0. Two scopes exist: `MF` carries entries for every
//! pants curve including boundary curves, `MF0` only for interior curves
//! (boundary measures are pinned to zero).
//!
//! Inside a single pants with boundary measures (m_1, m_2, m_3), the arcs
//! sort into six types: lambda_ij joining boundaries i != j, and lambda_ii
//! returning to boundary i after looping around the rest of the pants. The
//! conversions between boundary measures and arc weights live here too.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rat::{format_rat, half, max0, parse_rat, rat, rmin, Rat};
use crate::surface::{CurveEnds, PantsDecomposition, SlotBinding};
use crate::{Error, Result};

/// Which pants curves carry coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    /// All pants curves, boundary curves included.
    MF,
    /// Interior curves only; boundary measures are zero.
    MF0,
}

impl Scope {
    pub fn curve_count(&self, pd: &PantsDecomposition) -> usize {
        match self {
            Scope::MF => pd.curve_count(),
            Scope::MF0 => pd.interior_curve_count(),
        }
    }

    pub fn contains(&self, pd: &PantsDecomposition, curve: usize) -> bool {
        curve < self.curve_count(pd)
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub curve: usize,
    pub generation: u32,
    pub m: Rat,
    pub t: Rat,
}

/// A coordinate vector over the in-scope curves of one decomposition state.
///
/// Entries are stamped with the curve generations they were written
/// against; operations reject stale vectors. Equality compares values only
/// (scope and per-curve measures), not generations.
#[derive(Debug, Clone)]
pub struct DTCoords {
    scope: Scope,
    entries: Vec<Entry>,
}

impl PartialEq for DTCoords {
    fn eq(&self, other: &Self) -> bool {
        self.scope == other.scope
            && self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.curve == b.curve && a.m == b.m && a.t == b.t)
    }
}

impl Eq for DTCoords {}

impl DTCoords {
    /// Binds (curve, m, t) triples to a decomposition. Every in-scope curve
    /// must appear exactly once; out-of-scope or unknown curves are errors.
    pub fn bind(
        pd: &PantsDecomposition,
        scope: Scope,
        triples: &[(usize, Rat, Rat)],
    ) -> Result<Self> {
        let n = scope.curve_count(pd);
        let mut slots: Vec<Option<(Rat, Rat)>> = vec![None; n];
        for (curve, m, t) in triples {
            if *curve >= pd.curve_count() {
                return Err(Error::Coords(format!(
                    "unknown curve {curve} (surface has {})",
                    pd.curve_count()
                )));
            }
            if !scope.contains(pd, *curve) {
                return Err(Error::Scope(format!(
                    "curve {curve} is a boundary curve, outside scope MF0"
                )));
            }
            if slots[*curve].replace((m.clone(), t.clone())).is_some() {
                return Err(Error::Coords(format!("curve {curve} listed twice")));
            }
        }
        let mut entries = Vec::with_capacity(n);
        for (curve, slot) in slots.into_iter().enumerate() {
            let (m, t) = slot.ok_or_else(|| {
                Error::Coords(format!("missing entry for in-scope curve {curve}"))
            })?;
            entries.push(Entry {
                curve,
                generation: pd.generation(curve),
                m,
                t,
            });
        }
        Ok(DTCoords { scope, entries })
    }

    pub fn zero(pd: &PantsDecomposition, scope: Scope) -> Self {
        let entries = (0..scope.curve_count(pd))
            .map(|curve| Entry {
                curve,
                generation: pd.generation(curve),
                m: Rat::zero(),
                t: Rat::zero(),
            })
            .collect();
        DTCoords { scope, entries }
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, curve: usize) -> Option<(&Rat, &Rat)> {
        self.entries.get(curve).map(|e| (&e.m, &e.t))
    }

    pub(crate) fn entry_mut(&mut self, curve: usize) -> &mut Entry {
        &mut self.entries[curve]
    }

    /// Canonical representative: errors on m < 0, flips (0, t < 0) to
    /// (0, -t). Other entries pass through unchanged.
    pub fn normalize(mut self) -> Result<Self> {
        for e in &mut self.entries {
            if e.m.is_negative() {
                return Err(Error::Coords(format!(
                    "curve {}: intersection measure {} is negative",
                    e.curve,
                    format_rat(&e.m)
                )));
            }
            if e.m.is_zero() && e.t.is_negative() {
                e.t = -e.t.clone();
            }
        }
        Ok(self)
    }

    pub fn is_normalized(&self) -> bool {
        self.entries
            .iter()
            .all(|e| !e.m.is_negative() && !(e.m.is_zero() && e.t.is_negative()))
    }

    /// Rejects vectors written against an older framing of any curve.
    pub fn check_fresh(&self, pd: &PantsDecomposition) -> Result<()> {
        for e in &self.entries {
            let current = pd.generation(e.curve);
            if e.generation != current {
                return Err(Error::Stale {
                    curve: e.curve,
                    stamped: e.generation,
                    current,
                });
            }
        }
        Ok(())
    }

    /// Restamps entries with the decomposition's current generations.
    /// Only sound when the caller knows the framings agree (e.g. after a
    /// word that returns to the base state combinatorially).
    pub fn restamp(&mut self, pd: &PantsDecomposition) {
        for e in &mut self.entries {
            e.generation = pd.generation(e.curve);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.m.is_zero() && e.t.is_zero())
    }

    /// Largest |m| or |t| over all entries.
    pub fn max_abs(&self) -> Rat {
        let mut best = Rat::zero();
        for e in &self.entries {
            for v in [&e.m, &e.t] {
                let a = v.abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }

    /// Entrywise scaling; positive factors preserve the canonical form.
    pub fn scale(&self, factor: &Rat) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| Entry {
                curve: e.curve,
                generation: e.generation,
                m: &e.m * factor,
                t: &e.t * factor,
            })
            .collect();
        DTCoords {
            scope: self.scope,
            entries,
        }
    }

    /// Sup distance in the per-curve quotient by (m, t) ~ (-m, -t):
    /// each curve contributes min(|a - b|, |a + b|) in the sup norm of the
    /// pair, and the total is the max over curves.
    pub fn quotient_distance(&self, other: &Self) -> Result<Rat> {
        if self.scope != other.scope || self.entries.len() != other.entries.len() {
            return Err(Error::Coords(
                "cannot compare coordinates of different scopes".into(),
            ));
        }
        let mut best = Rat::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            let diff = rmax_pair(&(&a.m - &b.m).abs(), &(&a.t - &b.t).abs());
            let sum = rmax_pair(&(&a.m + &b.m).abs(), &(&a.t + &b.t).abs());
            let d = rmin(&diff, &sum);
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }
}

fn rmax_pair(a: &Rat, b: &Rat) -> Rat {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// JSON form of one entry; measures travel as exact strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryJson {
    pub curve: usize,
    pub m: String,
    pub t: String,
}

/// JSON form of a coordinate vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoordsJson {
    pub scope: Scope,
    pub entries: Vec<EntryJson>,
}

impl DTCoords {
    pub fn to_json(&self) -> CoordsJson {
        CoordsJson {
            scope: self.scope,
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    curve: e.curve,
                    m: format_rat(&e.m),
                    t: format_rat(&e.t),
                })
                .collect(),
        }
    }

    pub fn from_json(pd: &PantsDecomposition, json: &CoordsJson) -> Result<Self> {
        let mut triples = Vec::with_capacity(json.entries.len());
        for e in &json.entries {
            let m = parse_rat(&e.m)
                .ok_or_else(|| Error::Coords(format!("curve {}: bad rational '{}'", e.curve, e.m)))?;
            let t = parse_rat(&e.t)
                .ok_or_else(|| Error::Coords(format!("curve {}: bad rational '{}'", e.curve, e.t)))?;
            triples.push((e.curve, m, t));
        }
        DTCoords::bind(pd, json.scope, &triples)
    }
}

/// Arc weights inside one pants: lambda_ij between boundaries i and j.
/// At most one loop weight lambda_ii can be positive, and a positive
/// lambda_ii forces lambda_jk = 0 for the opposite pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PantsWeights {
    pub l11: Rat,
    pub l22: Rat,
    pub l33: Rat,
    pub l12: Rat,
    pub l13: Rat,
    pub l23: Rat,
}

/// Arc weights realizing boundary measures (m_1, m_2, m_3) >= 0.
///
/// 2 lambda_ii = (m_i - m_j - m_k) v 0 and
/// 2 lambda_ij = ((m_i + m_j - m_k) ^ 2m_i ^ 2m_j) v 0; the inner cap by
/// 2m_i and 2m_j keeps the weights consistent when one measure dominates.
pub fn m_to_lambda(m1: &Rat, m2: &Rat, m3: &Rat) -> Result<PantsWeights> {
    for (i, m) in [(1, m1), (2, m2), (3, m3)] {
        if m.is_negative() {
            return Err(Error::Coords(format!(
                "boundary measure m_{i} = {} is negative",
                format_rat(m)
            )));
        }
    }
    let loop_w = |mi: &Rat, mj: &Rat, mk: &Rat| half(&max0(&(mi - mj - mk)));
    let arc_w = |mi: &Rat, mj: &Rat, mk: &Rat| {
        let base = mi + mj - mk;
        let capped = rmin(&rmin(&base, &(mi * rat(2))), &(mj * rat(2)));
        half(&max0(&capped))
    };
    Ok(PantsWeights {
        l11: loop_w(m1, m2, m3),
        l22: loop_w(m2, m1, m3),
        l33: loop_w(m3, m1, m2),
        l12: arc_w(m1, m2, m3),
        l13: arc_w(m1, m3, m2),
        l23: arc_w(m2, m3, m1),
    })
}

/// Boundary measures from arc weights: m_i = 2 lambda_ii + lambda_ij +
/// lambda_ik. Errors if the weights are negative or violate the loop
/// constraints (at most one positive loop; a loop at i excludes arcs jk).
pub fn lambda_to_m(w: &PantsWeights) -> Result<(Rat, Rat, Rat)> {
    for (name, v) in [
        ("lambda_11", &w.l11),
        ("lambda_22", &w.l22),
        ("lambda_33", &w.l33),
        ("lambda_12", &w.l12),
        ("lambda_13", &w.l13),
        ("lambda_23", &w.l23),
    ] {
        if v.is_negative() {
            return Err(Error::Coords(format!(
                "{name} = {} is negative",
                format_rat(v)
            )));
        }
    }
    let loops_positive = [&w.l11, &w.l22, &w.l33]
        .iter()
        .filter(|v| v.is_positive())
        .count();
    if loops_positive > 1 {
        return Err(Error::Coords(
            "more than one positive loop weight".into(),
        ));
    }
    for (name, lii, ljk) in [
        ("lambda_11 with lambda_23", &w.l11, &w.l23),
        ("lambda_22 with lambda_13", &w.l22, &w.l13),
        ("lambda_33 with lambda_12", &w.l33, &w.l12),
    ] {
        if lii.is_positive() && ljk.is_positive() {
            return Err(Error::Coords(format!("incompatible weights: {name}")));
        }
    }
    let m1 = &w.l11 * rat(2) + &w.l12 + &w.l13;
    let m2 = &w.l22 * rat(2) + &w.l12 + &w.l23;
    let m3 = &w.l33 * rat(2) + &w.l13 + &w.l23;
    Ok((m1, m2, m3))
}

/// An integral, parity-consistent multicurve: the wrapped coordinates are
/// canonical, integer valued, and every pants sees an even total measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralMulticurve {
    coords: DTCoords,
}

impl IntegralMulticurve {
    pub fn coords(&self) -> &DTCoords {
        &self.coords
    }

    pub fn into_coords(self) -> DTCoords {
        self.coords
    }
}

/// The measure a slot contributes to its pants' parity sum; out-of-scope
/// curves and punctures contribute zero.
fn slot_measure(coords: &DTCoords, binding: SlotBinding) -> Rat {
    match binding {
        SlotBinding::Interior(c) => coords.get(c).map(|(m, _)| m.clone()).unwrap_or_default(),
        SlotBinding::Boundary(c) => match coords.scope() {
            Scope::MF => coords.get(c).map(|(m, _)| m.clone()).unwrap_or_default(),
            Scope::MF0 => Rat::zero(),
        },
        SlotBinding::Puncture => Rat::zero(),
    }
}

/// Checks integrality and the per-pants parity condition, returning the
/// canonical integral multicurve. Accepts any representative; the wrapped
/// copy is normalized.
pub fn validate_integral(pd: &PantsDecomposition, coords: &DTCoords) -> Result<IntegralMulticurve> {
    coords.check_fresh(pd)?;
    let coords = coords.clone().normalize()?;
    for e in coords.entries() {
        for (what, v) in [("m", &e.m), ("t", &e.t)] {
            if !v.is_integer() {
                return Err(Error::Coords(format!(
                    "curve {}: {what} = {} is not an integer",
                    e.curve,
                    format_rat(v)
                )));
            }
        }
    }
    for p in 0..pd.pants_count() {
        let mut sum = Rat::zero();
        for binding in pd.slots(p) {
            sum += slot_measure(&coords, *binding);
        }
        if sum.numer().is_odd() {
            return Err(Error::Coords(format!(
                "pants {p}: boundary measures sum to the odd value {}",
                format_rat(&sum)
            )));
        }
    }
    Ok(IntegralMulticurve { coords })
}

/// Samples a random integral multicurve with measures bounded by `bound`.
///
/// Intersection measures are drawn uniformly from 0..=bound and then
/// repaired to satisfy the per-pants parity condition by walking a spanning
/// tree of the pants adjacency graph and adjusting tree-edge measures by
/// one; twisting measures are uniform on -bound..=bound. Deterministic in
/// `seed`.
pub fn sample(
    pd: &PantsDecomposition,
    scope: Scope,
    bound: u32,
    seed: u64,
) -> IntegralMulticurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = scope.curve_count(pd);
    let mut m: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=bound as i64)).collect();

    // spanning tree over pants, edges = non-self-glued interior curves
    let np = pd.pants_count();
    let mut parent_edge: Vec<Option<(usize, usize)>> = vec![None; np]; // (parent pants, curve)
    let mut order = Vec::with_capacity(np);

    // root at a pants with an in-scope boundary slot when one exists, so a
    // leftover odd root can be absorbed by a boundary curve
    let mut root = 0;
    let mut root_boundary: Option<usize> = None;
    if matches!(scope, Scope::MF) {
        'outer: for p in 0..np {
            for binding in pd.slots(p) {
                if let SlotBinding::Boundary(c) = binding {
                    root = p;
                    root_boundary = Some(*c);
                    break 'outer;
                }
            }
        }
    }

    let mut seen = vec![false; np];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        order.push(p);
        for binding in pd.slots(p) {
            if let SlotBinding::Interior(c) = binding {
                if let CurveEnds::Interior(ends) = pd.curve(*c).expect("interior curve").ends {
                    for end in ends {
                        if !seen[end.pants] {
                            seen[end.pants] = true;
                            parent_edge[end.pants] = Some((p, *c));
                            queue.push_back(end.pants);
                        }
                    }
                }
            }
        }
    }
    debug_assert!(seen.iter().all(|&v| v), "pants graph is connected");

    let parity_of = |m: &[i64], p: usize| -> i64 {
        let mut sum = 0i64;
        for binding in pd.slots(p) {
            if let Some(c) = binding.curve() {
                if c < n {
                    sum += m[c];
                }
            }
        }
        sum & 1
    };

    // children before parents: flipping the parent edge repairs this pants
    // and forwards the deficiency upward
    for &p in order.iter().rev() {
        if parity_of(&m, p) == 1 {
            match parent_edge[p] {
                Some((_, c)) => m[c] = if m[c] > 0 { m[c] - 1 } else { m[c] + 1 },
                None => {
                    // root: absorb with a boundary curve if the scope has one
                    if let Some(c) = root_boundary {
                        m[c] = if m[c] > 0 { m[c] - 1 } else { m[c] + 1 };
                    }
                }
            }
        }
    }
    debug_assert!((0..np).all(|p| parity_of(&m, p) == 0));

    let triples: Vec<(usize, Rat, Rat)> = (0..n)
        .map(|c| {
            let t = if m[c] == 0 {
                rng.gen_range(0..=bound as i64)
            } else {
                rng.gen_range(-(bound as i64)..=bound as i64)
            };
            (c, rat(m[c]), rat(t))
        })
        .collect();
    let coords = DTCoords::bind(pd, scope, &triples)
        .and_then(|c| c.normalize())
        .expect("sampled coordinates are well formed");
    validate_integral(pd, &coords).expect("sampled coordinates satisfy parity")
}
