//! Surfaces, pants decompositions, and move sites.
//!
//! A surface of genus g with r boundary components and s punctures that
//! satisfies 2g - 2 + r + s > 0 decomposes into 2g - 2 + r + s pairs of
//! pants along 3g - 3 + r + s interior curves; together with the r boundary
//! curves this gives 3g - 3 + 2r + s pants curves total. Each pants has
//! three boundary slots, and every slot is either glued to another slot
//! along an interior curve, left free along a boundary curve, or closed off
//! by a puncture.
//!
//! Curve ids are assigned interior-first: interior curves get 0..k, then
//! boundary curves k..k+r. Each curve carries a generation counter that is
//! bumped whenever an elementary move changes its annular framing, so that
//! coordinate vectors produced before the move are rejected afterwards.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::{Error, Result};

/// Topological type: genus, boundary components, punctures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub boundary: u32,
    pub punctures: u32,
}

impl SurfaceSpec {
    pub fn new(genus: u32, boundary: u32, punctures: u32) -> Result<Self> {
        let spec = SurfaceSpec {
            genus,
            boundary,
            punctures,
        };
        if spec.complexity() <= 0 {
            return Err(Error::Hypothesis {
                genus,
                boundary,
                punctures,
            });
        }
        Ok(spec)
    }

    /// 2g - 2 + r + s; positive iff the surface has a pants decomposition.
    pub fn complexity(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.boundary as i64 + self.punctures as i64
    }

    pub fn pants_count(&self) -> usize {
        self.complexity() as usize
    }

    /// Interior pants curves: 3g - 3 + r + s.
    pub fn interior_curve_count(&self) -> usize {
        (3 * self.genus as i64 - 3 + self.boundary as i64 + self.punctures as i64) as usize
    }

    /// All pants curves, boundary included: 3g - 3 + 2r + s.
    pub fn curve_count(&self) -> usize {
        self.interior_curve_count() + self.boundary as usize
    }
}

/// One of the three boundary slots of a pants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotRef {
    pub pants: usize,
    pub slot: usize,
}

impl SlotRef {
    pub fn new(pants: usize, slot: usize) -> Self {
        SlotRef { pants, slot }
    }
}

/// What a pants slot is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotBinding {
    /// Glued to the other slot carrying the same interior curve.
    Interior(usize),
    /// Free slot along the given boundary curve.
    Boundary(usize),
    /// Closed off by a puncture.
    Puncture,
}

impl SlotBinding {
    /// The curve bound here, if any.
    pub fn curve(&self) -> Option<usize> {
        match self {
            SlotBinding::Interior(c) | SlotBinding::Boundary(c) => Some(*c),
            SlotBinding::Puncture => None,
        }
    }
}

/// Where a curve meets the pants decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveEnds {
    /// Interior curve: the two slots glued along it (self-gluing allowed,
    /// in which case the two slots lie on the same pants).
    Interior([SlotRef; 2]),
    /// Boundary curve: the single free slot.
    Boundary(SlotRef),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub ends: CurveEnds,
    /// Bumped by every elementary move that rebuilds this curve's annulus.
    pub generation: u32,
}

/// A pants decomposition with named slots and framed pants curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PantsDecomposition {
    spec: SurfaceSpec,
    pants: Vec<[SlotBinding; 3]>,
    curves: Vec<CurveRecord>,
}

/// Serializable gluing data; the JSON interchange form of a decomposition.
///
/// `interior[i]` lists the two slots glued along interior curve i,
/// `boundary_slots[j]` the free slot of boundary curve (k + j) where k is
/// the number of interior curves, and `punctures_at` the punctured slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDescription {
    pub genus: u32,
    pub boundary: u32,
    pub punctures: u32,
    pub pants: usize,
    pub interior: Vec<[SlotRef; 2]>,
    #[serde(default)]
    pub boundary_slots: Vec<SlotRef>,
    #[serde(default)]
    pub punctures_at: Vec<SlotRef>,
}

impl PantsDecomposition {
    /// Validates and assembles a decomposition from raw gluing data.
    pub fn from_description(desc: &GluingDescription) -> Result<Self> {
        let spec = SurfaceSpec::new(desc.genus, desc.boundary, desc.punctures)?;
        if desc.pants != spec.pants_count() {
            return Err(Error::Gluing(format!(
                "expected {} pants for this surface, got {}",
                spec.pants_count(),
                desc.pants
            )));
        }
        if desc.interior.len() != spec.interior_curve_count() {
            return Err(Error::Gluing(format!(
                "expected {} interior curves, got {}",
                spec.interior_curve_count(),
                desc.interior.len()
            )));
        }
        if desc.boundary_slots.len() != spec.boundary as usize {
            return Err(Error::Gluing(format!(
                "expected {} boundary slots, got {}",
                spec.boundary,
                desc.boundary_slots.len()
            )));
        }
        if desc.punctures_at.len() != spec.punctures as usize {
            return Err(Error::Gluing(format!(
                "expected {} puncture slots, got {}",
                spec.punctures,
                desc.punctures_at.len()
            )));
        }

        let mut pants = vec![[SlotBinding::Puncture; 3]; desc.pants];
        let mut seen: BTreeMap<SlotRef, &'static str> = BTreeMap::new();
        let mut claim = |slot: SlotRef, what: &'static str| -> Result<()> {
            if slot.pants >= desc.pants || slot.slot >= 3 {
                return Err(Error::Gluing(format!(
                    "slot ({}, {}) out of range",
                    slot.pants, slot.slot
                )));
            }
            if let Some(prev) = seen.insert(slot, what) {
                return Err(Error::Gluing(format!(
                    "slot ({}, {}) bound twice ({} and {})",
                    slot.pants, slot.slot, prev, what
                )));
            }
            Ok(())
        };

        let mut curves = Vec::with_capacity(spec.curve_count());
        for (i, ends) in desc.interior.iter().enumerate() {
            claim(ends[0], "interior")?;
            claim(ends[1], "interior")?;
            pants[ends[0].pants][ends[0].slot] = SlotBinding::Interior(i);
            pants[ends[1].pants][ends[1].slot] = SlotBinding::Interior(i);
            curves.push(CurveRecord {
                ends: CurveEnds::Interior(*ends),
                generation: 0,
            });
        }
        let k = desc.interior.len();
        for (j, slot) in desc.boundary_slots.iter().enumerate() {
            claim(*slot, "boundary")?;
            pants[slot.pants][slot.slot] = SlotBinding::Boundary(k + j);
            curves.push(CurveRecord {
                ends: CurveEnds::Boundary(*slot),
                generation: 0,
            });
        }
        for slot in &desc.punctures_at {
            claim(*slot, "puncture")?;
            // already SlotBinding::Puncture by initialization
        }
        if seen.len() != 3 * desc.pants {
            return Err(Error::Gluing(format!(
                "{} of {} slots bound",
                seen.len(),
                3 * desc.pants
            )));
        }

        let pd = PantsDecomposition {
            spec,
            pants,
            curves,
        };
        if !pd.is_connected() {
            return Err(Error::Gluing("decomposition is not connected".into()));
        }
        Ok(pd)
    }

    /// The gluing data of the current state; round-trips through JSON.
    pub fn description(&self) -> GluingDescription {
        let mut interior = Vec::new();
        let mut boundary_slots = Vec::new();
        for rec in &self.curves {
            match rec.ends {
                CurveEnds::Interior(ends) => interior.push(ends),
                CurveEnds::Boundary(slot) => boundary_slots.push(slot),
            }
        }
        let mut punctures_at = Vec::new();
        for (p, slots) in self.pants.iter().enumerate() {
            for (s, binding) in slots.iter().enumerate() {
                if matches!(binding, SlotBinding::Puncture) {
                    punctures_at.push(SlotRef::new(p, s));
                }
            }
        }
        GluingDescription {
            genus: self.spec.genus,
            boundary: self.spec.boundary,
            punctures: self.spec.punctures,
            pants: self.pants.len(),
            interior,
            boundary_slots,
            punctures_at,
        }
    }

    fn is_connected(&self) -> bool {
        let n = self.pants.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for binding in &self.pants[p] {
                if let SlotBinding::Interior(c) = binding {
                    if let CurveEnds::Interior(ends) = self.curves[*c].ends {
                        for end in ends {
                            if !seen[end.pants] {
                                seen[end.pants] = true;
                                stack.push(end.pants);
                            }
                        }
                    }
                }
            }
        }
        seen.into_iter().all(|v| v)
    }

    pub fn spec(&self) -> SurfaceSpec {
        self.spec
    }

    pub fn pants_count(&self) -> usize {
        self.pants.len()
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn interior_curve_count(&self) -> usize {
        self.spec.interior_curve_count()
    }

    pub fn is_interior(&self, curve: usize) -> bool {
        curve < self.interior_curve_count()
    }

    pub fn slots(&self, pants: usize) -> &[SlotBinding; 3] {
        &self.pants[pants]
    }

    pub fn binding(&self, slot: SlotRef) -> SlotBinding {
        self.pants[slot.pants][slot.slot]
    }

    pub fn curve(&self, id: usize) -> Option<&CurveRecord> {
        self.curves.get(id)
    }

    pub fn generation(&self, curve: usize) -> u32 {
        self.curves[curve].generation
    }

    pub fn curves(&self) -> impl Iterator<Item = (usize, &CurveRecord)> {
        self.curves.iter().enumerate()
    }

    /// Equality of the underlying marked decomposition, ignoring framing
    /// generations but keeping pants indices.
    pub fn combinatorially_eq(&self, other: &PantsDecomposition) -> bool {
        self.spec == other.spec
            && self.pants == other.pants
            && self.curves.len() == other.curves.len()
            && self
                .curves
                .iter()
                .zip(&other.curves)
                .all(|(a, b)| a.ends == b.ends)
    }

    /// Equality of the coordinate chart: the same decomposition up to
    /// renaming pants and the slots within each pants. A slot row records
    /// everything attached to a pants, so two states present the same chart
    /// exactly when their rows agree as a multiset of binding multisets.
    /// A double elementary move returns here even though it may leave the
    /// two affected pants with swapped indices and permuted slots.
    pub fn chart_eq(&self, other: &PantsDecomposition) -> bool {
        if self.spec != other.spec || self.pants.len() != other.pants.len() {
            return false;
        }
        let rows = |pants: &[[SlotBinding; 3]]| -> Vec<[SlotBinding; 3]> {
            let mut rows: Vec<[SlotBinding; 3]> = pants
                .iter()
                .map(|row| {
                    let mut row = *row;
                    row.sort();
                    row
                })
                .collect();
            rows.sort();
            rows
        };
        rows(&self.pants) == rows(&other.pants)
    }

    /// All sites where an elementary move applies, in deterministic order.
    pub fn move_sites(&self) -> Vec<MoveSite> {
        let mut sites = Vec::new();
        for c in 0..self.interior_curve_count() {
            if let Some(site) = self.first_site_at(c) {
                sites.push(site);
            }
            for labeling in 0..2 {
                if let Some(site) = self.second_site_at(c, labeling) {
                    sites.push(site);
                }
            }
        }
        sites
    }

    /// The first-move site at `curve`, if its two ends share one pants.
    pub fn first_site_at(&self, curve: usize) -> Option<MoveSite> {
        let rec = self.curves.get(curve)?;
        let ends = match rec.ends {
            CurveEnds::Interior(ends) => ends,
            CurveEnds::Boundary(_) => return None,
        };
        if ends[0].pants != ends[1].pants {
            return None;
        }
        let pants = ends[0].pants;
        let (a, b) = (
            ends[0].slot.min(ends[1].slot),
            ends[0].slot.max(ends[1].slot),
        );
        let third = 3 - a - b;
        Some(MoveSite::First {
            curve,
            pants,
            self_slots: [a, b],
            third_slot: third,
        })
    }

    /// The second-move site at `curve` for one of the two labelings, if
    /// the curve joins two distinct pants and the four surrounding slots
    /// carry pairwise distinct curves, none equal to `curve`.
    ///
    /// The labeling picks which pants plays "bottom" (0: the one with the
    /// smaller id). Within each pants the two free slots take their roles
    /// from the cyclic order of its slots, so the move respects the
    /// orientation of the surface; assigning them the other way around
    /// would describe a reflected move, which is not a mapping class here.
    pub fn second_site_at(&self, curve: usize, labeling: u8) -> Option<MoveSite> {
        if labeling > 1 {
            return None;
        }
        let rec = self.curves.get(curve)?;
        let ends = match rec.ends {
            CurveEnds::Interior(ends) => ends,
            CurveEnds::Boundary(_) => return None,
        };
        if ends[0].pants == ends[1].pants {
            return None;
        }
        let lo = ends[0].pants.min(ends[1].pants);
        let hi = ends[0].pants.max(ends[1].pants);
        let (bottom, top) = if labeling == 0 { (lo, hi) } else { (hi, lo) };

        let slots_of = |p: usize| -> SecondSlots {
            let b1 = if ends[0].pants == p {
                ends[0].slot
            } else {
                ends[1].slot
            };
            SecondSlots {
                b1,
                b2: (b1 + 2) % 3,
                b3: (b1 + 1) % 3,
            }
        };
        let bottom_slots = slots_of(bottom);
        let top_slots = slots_of(top);

        // the four surrounding curves must be pairwise distinct and != curve
        let mut surrounding = Vec::new();
        for (p, sl) in [
            (bottom, bottom_slots.b2),
            (bottom, bottom_slots.b3),
            (top, top_slots.b2),
            (top, top_slots.b3),
        ] {
            if let Some(c) = self.pants[p][sl].curve() {
                if c == curve || surrounding.contains(&c) {
                    return None;
                }
                surrounding.push(c);
            }
        }

        Some(MoveSite::Second {
            curve,
            bottom,
            top,
            bottom_slots,
            top_slots,
            labeling,
        })
    }

    /// Whether `site` matches the current state of the decomposition.
    pub fn site_is_valid(&self, site: &MoveSite) -> bool {
        match site {
            MoveSite::First {
                curve,
                pants,
                self_slots,
                third_slot,
            } => match self.first_site_at(*curve) {
                Some(MoveSite::First {
                    pants: p,
                    self_slots: ss,
                    third_slot: ts,
                    ..
                }) => p == *pants && ss == *self_slots && ts == *third_slot,
                _ => false,
            },
            MoveSite::Second {
                curve,
                bottom,
                top,
                bottom_slots,
                top_slots,
                labeling,
            } => match self.second_site_at(*curve, *labeling) {
                Some(MoveSite::Second {
                    bottom: b,
                    top: t,
                    bottom_slots: bs,
                    top_slots: ts,
                    ..
                }) => b == *bottom && t == *top && bs == *bottom_slots && ts == *top_slots,
                _ => false,
            },
        }
    }

    pub(crate) fn bump_generation(&mut self, curve: usize) {
        self.curves[curve].generation += 1;
    }

    pub(crate) fn set_binding(&mut self, slot: SlotRef, binding: SlotBinding) {
        self.pants[slot.pants][slot.slot] = binding;
    }

    pub(crate) fn move_curve_end(&mut self, binding: SlotBinding, from: SlotRef, to: SlotRef) {
        if let Some(c) = binding.curve() {
            match &mut self.curves[c].ends {
                CurveEnds::Interior(ends) => {
                    for end in ends.iter_mut() {
                        if *end == from {
                            *end = to;
                            return;
                        }
                    }
                    unreachable!("curve {c} has no end at ({}, {})", from.pants, from.slot);
                }
                CurveEnds::Boundary(end) => {
                    debug_assert_eq!(*end, from);
                    *end = to;
                }
            }
        }
    }
}

/// The two free slots of a pants at a second-move site, plus the slot b1
/// carrying the moved curve. Indices are slot positions 0..3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondSlots {
    pub b1: usize,
    pub b2: usize,
    pub b3: usize,
}

/// A place where an elementary move applies.
///
/// `First`: the curve meets one pants twice; the move replaces it with the
/// dual curve through the one-holed torus those two slots form.
///
/// `Second`: the curve joins two distinct pants whose four other slots carry
/// four distinct curves; the move replaces it with the dual curve through
/// the four-holed sphere. Two labelings fix which pants is "bottom"; they
/// change the framing of the result, so each labeling is its own site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveSite {
    First {
        curve: usize,
        pants: usize,
        self_slots: [usize; 2],
        third_slot: usize,
    },
    Second {
        curve: usize,
        bottom: usize,
        top: usize,
        bottom_slots: SecondSlots,
        top_slots: SecondSlots,
        labeling: u8,
    },
}

impl MoveSite {
    pub fn curve(&self) -> usize {
        match self {
            MoveSite::First { curve, .. } | MoveSite::Second { curve, .. } => *curve,
        }
    }

    /// Token form used by the word DSL.
    pub fn token(&self) -> String {
        match self {
            MoveSite::First { curve, .. } => format!("M1@{curve}"),
            MoveSite::Second {
                curve, labeling, ..
            } => {
                if *labeling == 0 {
                    format!("M2@{curve}")
                } else {
                    format!("M2@{curve}:{labeling}")
                }
            }
        }
    }
}

pub const PRESET_NAMES: [&str; 4] = [
    "once-punctured-torus",
    "one-holed-torus",
    "four-holed-sphere",
    "genus-two-closed",
];

/// A built-in decomposition by name; see [`PRESET_NAMES`].
pub fn preset(name: &str) -> Result<PantsDecomposition> {
    let desc = match name {
        "once-punctured-torus" => GluingDescription {
            genus: 1,
            boundary: 0,
            punctures: 1,
            pants: 1,
            interior: vec![[SlotRef::new(0, 0), SlotRef::new(0, 1)]],
            boundary_slots: vec![],
            punctures_at: vec![SlotRef::new(0, 2)],
        },
        "one-holed-torus" => GluingDescription {
            genus: 1,
            boundary: 1,
            punctures: 0,
            pants: 1,
            interior: vec![[SlotRef::new(0, 0), SlotRef::new(0, 1)]],
            boundary_slots: vec![SlotRef::new(0, 2)],
            punctures_at: vec![],
        },
        "four-holed-sphere" => GluingDescription {
            genus: 0,
            boundary: 4,
            punctures: 0,
            pants: 2,
            interior: vec![[SlotRef::new(0, 0), SlotRef::new(1, 0)]],
            boundary_slots: vec![
                SlotRef::new(0, 1),
                SlotRef::new(0, 2),
                SlotRef::new(1, 1),
                SlotRef::new(1, 2),
            ],
            punctures_at: vec![],
        },
        "genus-two-closed" => GluingDescription {
            genus: 2,
            boundary: 0,
            punctures: 0,
            pants: 2,
            interior: vec![
                [SlotRef::new(0, 0), SlotRef::new(0, 1)],
                [SlotRef::new(0, 2), SlotRef::new(1, 2)],
                [SlotRef::new(1, 0), SlotRef::new(1, 1)],
            ],
            boundary_slots: vec![],
            punctures_at: vec![],
        },
        other => {
            return Err(Error::Gluing(format!(
                "unknown preset '{other}' (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    PantsDecomposition::from_description(&desc)
}
