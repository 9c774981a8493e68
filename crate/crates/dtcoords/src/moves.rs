//! Twists and elementary moves acting on coordinate vectors.
//!
//! Three kinds of generators act here:
//!
//! - half twists around a pants curve, which add or subtract the curve's
//!   intersection measure from its twisting measure and leave everything
//!   else alone;
//! - the first elementary move, which replaces a curve meeting one pants
//!   twice by its dual through the resulting one-holed torus;
//! - the second elementary move, which replaces a curve joining two pants
//!   by its dual through the resulting four-holed sphere.
//!
//! Both moves are written as literal lattice-algebra blocks over exact
//! rationals (v is max, ^ is min), fed by the arc weights of the affected
//! pants. Each move bumps the moved curve's generation, so coordinate
//! vectors computed before the move no longer apply after it.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coords::{m_to_lambda, DTCoords, PantsWeights, Scope};
use crate::rat::{half, max0, min0, rat, rmax, rmin, sgn_zero_neg, Rat};
use crate::surface::{MoveSite, PantsDecomposition, SlotBinding, SlotRef};
use crate::{Error, Result};

/// Twist direction; `Plus` adds the intersection measure to the twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One generator of the action: a twist or an elementary move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Twist { curve: usize, sign: Sign },
    Move(MoveSite),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Twist {
                curve,
                sign: Sign::Plus,
            } => write!(f, "T+{curve}"),
            Generator::Twist {
                curve,
                sign: Sign::Minus,
            } => write!(f, "T-{curve}"),
            Generator::Move(site) => write!(f, "{}", site.token()),
        }
    }
}

fn require_normalized(coords: &DTCoords) -> Result<()> {
    if !coords.is_normalized() {
        return Err(Error::Coords(
            "coordinates must be in canonical form (m >= 0, and t >= 0 where m = 0)".into(),
        ));
    }
    Ok(())
}

/// Twist around a pants curve: t := t +/- m on that curve only.
pub fn twist(
    pd: &PantsDecomposition,
    coords: &DTCoords,
    curve: usize,
    sign: Sign,
) -> Result<DTCoords> {
    coords.check_fresh(pd)?;
    require_normalized(coords)?;
    if curve >= pd.curve_count() {
        return Err(Error::Coords(format!(
            "unknown curve {curve} (surface has {})",
            pd.curve_count()
        )));
    }
    if !coords.scope().contains(pd, curve) {
        return Err(Error::Scope(format!(
            "cannot twist along curve {curve}: it carries no coordinates in scope MF0"
        )));
    }
    let mut out = coords.clone();
    let e = out.entry_mut(curve);
    let delta = match sign {
        Sign::Plus => e.m.clone(),
        Sign::Minus => -e.m.clone(),
    };
    e.t = &e.t + delta;
    Ok(out)
}

/// Inputs of the first move in the frame of the affected pants: boundary 1
/// carries the third curve, boundaries 2 and 3 the two sides of the moved
/// curve, so r = lambda_12 = lambda_13 while lambda_22 = lambda_33 = 0.
/// Subscript 1 on t refers to the moved curve, 2 to the third curve.
struct FirstIn {
    r: Rat,
    l11: Rat,
    l23: Rat,
    t1: Rat,
    t2: Rat,
}

struct FirstOut {
    lp11: Rat,
    lp12: Rat,
    lp23: Rat,
    t1p: Rat,
    t2p: Rat,
}

/// The first elementary transformation as one literal formula block.
fn first_block(x: &FirstIn) -> FirstOut {
    let abs_t1 = x.t1.abs();
    let lp11 = max0(&(&x.r - &abs_t1));
    let l = &x.r - &lp11;
    let lp12 = &l + &x.l11;
    let lp23 = &abs_t1 - &l;
    let t2p = &x.t2 + &x.l11 + max0(&rmin(&l, &x.t1));
    let t1p = -(sgn_zero_neg(&x.t1) * (&x.l23 + &l));
    FirstOut {
        lp11,
        lp12,
        lp23,
        t1p,
        t2p,
    }
}

/// Inputs of the second move: lambda weights of the bottom pants, kappa
/// weights of the top pants, both indexed so that boundary 1 is the moved
/// curve. t_1 belongs to the moved curve; t_2, t_3 to the bottom pants'
/// boundaries 3 and 2; t_4, t_5 to the top pants' boundaries 2 and 3.
struct SecondIn {
    l: PantsWeights,
    k: PantsWeights,
    t1: Rat,
    t2: Rat,
    t3: Rat,
    t4: Rat,
    t5: Rat,
}

struct SecondOut {
    lp: PantsWeights,
    kp: PantsWeights,
    t1p: Rat,
    t2p: Rat,
    t3p: Rat,
    t4p: Rat,
    t5p: Rat,
}

/// The second elementary transformation as one literal formula block.
fn second_block(x: &SecondIn) -> SecondOut {
    let two = rat(2);
    let big_l = &x.l.l11 + &x.t1;
    let big_k = &x.k.l11 + &x.t1;

    let kp11 = &x.k.l22 + &x.l.l33 + max0(&(&big_l - &x.k.l13)) + max0(&(-&big_l - &x.l.l12));
    let kp22 = max0(&rmin(
        &rmin(&big_l, &x.l.l11),
        &(&x.k.l13 - &x.l.l12 - &big_l),
    ));
    let kp33 = max0(&rmin(
        &rmin(&-&big_l, &x.k.l11),
        &(&x.l.l12 - &x.k.l13 + &big_l),
    ));
    let kp23 = max0(&rmin(
        &rmin(&x.k.l13, &x.l.l12),
        &rmin(&(&x.k.l13 - &big_l), &(&x.l.l12 + &big_l)),
    ));
    let kp12 = -(&kp22 * &two) - &kp23 + &x.k.l13 + &x.k.l23 + &x.k.l33 * &two;
    let kp13 = -(&kp33 * &two) - &kp23 + &x.l.l12 + &x.l.l23 + &x.l.l22 * &two;

    let lp11 = &x.l.l22 + &x.k.l33 + max0(&(&big_k - &x.l.l13)) + max0(&(-&big_k - &x.k.l12));
    let lp22 = max0(&rmin(
        &rmin(&big_k, &x.k.l11),
        &(&x.l.l13 - &x.k.l12 - &big_k),
    ));
    let lp33 = max0(&rmin(
        &rmin(&-&big_k, &x.l.l11),
        &(&x.k.l12 - &x.l.l13 + &big_k),
    ));
    let lp23 = max0(&rmin(
        &rmin(&x.l.l13, &x.k.l12),
        &rmin(&(&x.l.l13 - &big_k), &(&x.k.l12 + &big_k)),
    ));
    let lp12 = -(&lp22 * &two) - &lp23 + &x.l.l13 + &x.l.l23 + &x.l.l33 * &two;
    let lp13 = -(&lp33 * &two) - &lp23 + &x.k.l12 + &x.k.l23 + &x.k.l22 * &two;

    let t2p = &x.t2
        + &x.l.l33
        + max0(&rmin(
            &(&x.l.l13 - &lp23 - &lp22 * &two),
            &(&big_k + &lp33 - &lp22),
        ));
    let t3p = &x.t3 - &kp33
        + min0(&rmax(
            &(&big_l + &kp33 - &kp22),
            &(&kp23 + &kp33 * &two - &x.l.l12),
        ));
    let t4p = &x.t4 - &lp33
        + min0(&rmax(
            &(&big_k + &lp33 - &lp22),
            &(&lp23 + &lp33 * &two - &x.k.l12),
        ));
    let t5p = &x.t5
        + &x.k.l33
        + max0(&rmin(
            &(&x.k.l13 - &kp23 - &kp22 * &two),
            &(&big_l + &kp33 - &kp22),
        ));

    // sign of (L + K + lp33 - lp22 + kp33 - kp22), where a zero argument
    // counts as + exactly when lambda_12 - 2 kp33 - kp23 is nonzero
    let arg = &big_l + &big_k + &lp33 - &lp22 + &kp33 - &kp22;
    let sg = if arg.is_positive() {
        rat(1)
    } else if arg.is_negative() {
        rat(-1)
    } else if !(&x.l.l12 - &kp33 * &two - &kp23).is_zero() {
        rat(1)
    } else {
        rat(-1)
    };
    let t1p = &x.k.l22 + &x.l.l22 + &x.k.l33 + &x.l.l33
        - (&lp11 + &kp11 + (&t2p - &x.t2) + (&t5p - &x.t5))
        + sg * (&x.t1 + &lp33 + &kp33);

    SecondOut {
        lp: PantsWeights {
            l11: lp11,
            l22: lp22,
            l33: lp33,
            l12: lp12,
            l13: lp13,
            l23: lp23,
        },
        kp: PantsWeights {
            l11: kp11,
            l22: kp22,
            l33: kp33,
            l12: kp12,
            l13: kp13,
            l23: kp23,
        },
        t1p,
        t2p,
        t3p,
        t4p,
        t5p,
    }
}

/// Advances only the combinatorial state (slot bindings, curve ends,
/// generations) past a move. Used to validate words without coordinates;
/// the coordinate-level moves share it.
pub(crate) fn advance_pd(pd: &PantsDecomposition, site: &MoveSite) -> Result<PantsDecomposition> {
    if !pd.site_is_valid(site) {
        return Err(Error::Move(format!(
            "site {} does not match the current decomposition",
            site.token()
        )));
    }
    let mut out = pd.clone();
    match site {
        MoveSite::First { curve, .. } => {
            out.bump_generation(*curve);
        }
        MoveSite::Second {
            curve,
            bottom,
            top,
            bottom_slots,
            top_slots,
            ..
        } => {
            out.bump_generation(*curve);
            // the four surrounding curves rotate one step around the square:
            // bottom-b3 -> bottom-b2, top-b2 -> bottom-b3,
            // top-b3 -> top-b2, bottom-b2 -> top-b3
            let s_b2 = SlotRef::new(*bottom, bottom_slots.b2);
            let s_b3 = SlotRef::new(*bottom, bottom_slots.b3);
            let s_t2 = SlotRef::new(*top, top_slots.b2);
            let s_t3 = SlotRef::new(*top, top_slots.b3);
            let b_b2 = out.binding(s_b2);
            let b_b3 = out.binding(s_b3);
            let b_t2 = out.binding(s_t2);
            let b_t3 = out.binding(s_t3);
            out.set_binding(s_b2, b_b3);
            out.set_binding(s_b3, b_t2);
            out.set_binding(s_t2, b_t3);
            out.set_binding(s_t3, b_b2);
            out.move_curve_end(b_b3, s_b3, s_b2);
            out.move_curve_end(b_t2, s_t2, s_b3);
            out.move_curve_end(b_t3, s_t3, s_t2);
            out.move_curve_end(b_b2, s_b2, s_t3);
        }
    }
    Ok(out)
}

/// Measure and twist of whatever sits in a slot, as the move formulas see
/// it: out-of-scope curves and punctures read as (0, 0).
fn slot_mt(coords: &DTCoords, binding: SlotBinding, scope: Scope, pd: &PantsDecomposition) -> (Rat, Rat, Option<usize>) {
    match binding {
        SlotBinding::Interior(c) => {
            let (m, t) = coords.get(c).expect("interior curve in scope");
            (m.clone(), t.clone(), Some(c))
        }
        SlotBinding::Boundary(c) if matches!(scope, Scope::MF) && scope.contains(pd, c) => {
            let (m, t) = coords.get(c).expect("boundary curve in scope");
            (m.clone(), t.clone(), Some(c))
        }
        _ => (Rat::zero(), Rat::zero(), None),
    }
}

fn internal_check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Internal(what.to_string()))
    }
}

/// First elementary move at `site`; returns the new coordinates and the
/// advanced decomposition.
pub fn move_first(
    pd: &PantsDecomposition,
    coords: &DTCoords,
    site: &MoveSite,
) -> Result<(DTCoords, PantsDecomposition)> {
    let MoveSite::First {
        curve,
        pants,
        third_slot,
        ..
    } = site
    else {
        return Err(Error::Move("expected a first-move site".into()));
    };
    coords.check_fresh(pd)?;
    require_normalized(coords)?;
    let new_pd = advance_pd(pd, site)?;

    let scope = coords.scope();
    let (m1, t1) = {
        let (m, t) = coords.get(*curve).expect("moved curve in scope");
        (m.clone(), t.clone())
    };
    let third = pd.slots(*pants)[*third_slot];
    let (m2, t2, third_curve) = slot_mt(coords, third, scope, pd);

    // in this frame the pants weights collapse to three numbers
    let half_m2 = half(&m2);
    let r = rmin(&half_m2, &m1);
    let l11 = max0(&(&half_m2 - &m1));
    let l23 = max0(&(&m1 - &half_m2));

    let out = first_block(&FirstIn {
        r,
        l11,
        l23,
        t1,
        t2: t2.clone(),
    });

    // recompose boundary measures from the new weights
    let m1_new = &out.lp12 + &out.lp23;
    let m2_new = &out.lp11 * rat(2) + &out.lp12 * rat(2);
    internal_check(m2_new == m2, "first move must preserve the third measure")?;

    let mut result = coords.clone();
    {
        let e = result.entry_mut(*curve);
        e.m = m1_new;
        e.t = out.t1p;
        e.generation = new_pd.generation(*curve);
    }
    match third_curve {
        Some(c) => result.entry_mut(c).t = out.t2p,
        None => internal_check(
            out.t2p == t2,
            "first move must fix the twist of an out-of-scope third curve",
        )?,
    }
    Ok((result.normalize()?, new_pd))
}

/// Second elementary move at `site`; returns the new coordinates and the
/// advanced decomposition.
pub fn move_second(
    pd: &PantsDecomposition,
    coords: &DTCoords,
    site: &MoveSite,
) -> Result<(DTCoords, PantsDecomposition)> {
    let MoveSite::Second {
        curve,
        bottom,
        top,
        bottom_slots,
        top_slots,
        ..
    } = site
    else {
        return Err(Error::Move("expected a second-move site".into()));
    };
    coords.check_fresh(pd)?;
    require_normalized(coords)?;
    let new_pd = advance_pd(pd, site)?;

    let scope = coords.scope();
    let (m1, t1) = {
        let (m, t) = coords.get(*curve).expect("moved curve in scope");
        (m.clone(), t.clone())
    };
    // surrounding curves, numbered by the role they play in the formulas:
    // 2 at bottom-b3, 3 at bottom-b2, 4 at top-b2, 5 at top-b3
    let b_role2 = pd.binding(SlotRef::new(*bottom, bottom_slots.b3));
    let b_role3 = pd.binding(SlotRef::new(*bottom, bottom_slots.b2));
    let b_role4 = pd.binding(SlotRef::new(*top, top_slots.b2));
    let b_role5 = pd.binding(SlotRef::new(*top, top_slots.b3));
    let (m_r2, t2, c_r2) = slot_mt(coords, b_role2, scope, pd);
    let (m_r3, t3, c_r3) = slot_mt(coords, b_role3, scope, pd);
    let (m_r4, t4, c_r4) = slot_mt(coords, b_role4, scope, pd);
    let (m_r5, t5, c_r5) = slot_mt(coords, b_role5, scope, pd);

    // weights of both pants, boundary 1 being the moved curve
    let lam = m_to_lambda(&m1, &m_r3, &m_r2)?;
    let kap = m_to_lambda(&m1, &m_r4, &m_r5)?;

    let out = second_block(&SecondIn {
        l: lam,
        k: kap,
        t1,
        t2: t2.clone(),
        t3: t3.clone(),
        t4: t4.clone(),
        t5: t5.clone(),
    });

    let two = rat(2);
    let m1_new = &out.lp.l11 * &two + &out.lp.l12 + &out.lp.l13;
    let m1_new_k = &out.kp.l11 * &two + &out.kp.l12 + &out.kp.l13;
    internal_check(
        m1_new == m1_new_k,
        "second move: the two pants must agree on the new measure",
    )?;
    // the four surrounding measures are preserved; the new weight systems
    // must recompose to them in their new positions
    internal_check(
        &out.lp.l22 * &two + &out.lp.l12 + &out.lp.l23 == m_r2,
        "second move must preserve the measure of the bottom-b3 curve",
    )?;
    internal_check(
        &out.lp.l33 * &two + &out.lp.l13 + &out.lp.l23 == m_r4,
        "second move must preserve the measure of the top-b2 curve",
    )?;
    internal_check(
        &out.kp.l22 * &two + &out.kp.l12 + &out.kp.l23 == m_r5,
        "second move must preserve the measure of the top-b3 curve",
    )?;
    internal_check(
        &out.kp.l33 * &two + &out.kp.l13 + &out.kp.l23 == m_r3,
        "second move must preserve the measure of the bottom-b2 curve",
    )?;

    let mut result = coords.clone();
    {
        let e = result.entry_mut(*curve);
        e.m = m1_new;
        e.t = out.t1p;
        e.generation = new_pd.generation(*curve);
    }
    let updates = [
        (c_r2, out.t2p, t2),
        (c_r3, out.t3p, t3),
        (c_r4, out.t4p, t4),
        (c_r5, out.t5p, t5),
    ];
    for (c, tp, told) in updates {
        match c {
            Some(c) => result.entry_mut(c).t = tp,
            None => internal_check(
                tp == told,
                "second move must fix the twist of an out-of-scope curve",
            )?,
        }
    }
    Ok((result.normalize()?, new_pd))
}

/// Applies a single generator, returning the new coordinates and state.
pub fn apply_generator(
    pd: &PantsDecomposition,
    coords: &DTCoords,
    gen: &Generator,
) -> Result<(DTCoords, PantsDecomposition)> {
    match gen {
        Generator::Twist { curve, sign } => Ok((twist(pd, coords, *curve, *sign)?, pd.clone())),
        Generator::Move(site) => match site {
            MoveSite::First { .. } => move_first(pd, coords, site),
            MoveSite::Second { .. } => move_second(pd, coords, site),
        },
    }
}

/// A validated sequence of generators over a base decomposition.
///
/// Construction simulates the combinatorial state through the whole
/// sequence, so every move site is known to apply when its turn comes.
#[derive(Debug, Clone)]
pub struct MappingWord {
    base: PantsDecomposition,
    gens: Vec<Generator>,
    final_state: PantsDecomposition,
}

impl MappingWord {
    pub fn new(base: PantsDecomposition, gens: Vec<Generator>) -> Result<Self> {
        let mut state = base.clone();
        for (i, g) in gens.iter().enumerate() {
            match g {
                Generator::Twist { curve, .. } => {
                    if *curve >= state.curve_count() {
                        return Err(Error::Word(format!(
                            "step {i} ({g}): unknown curve {curve}"
                        )));
                    }
                }
                Generator::Move(site) => {
                    if !state.site_is_valid(site) {
                        return Err(Error::Word(format!(
                            "step {i} ({g}): move site does not match the decomposition there"
                        )));
                    }
                    state = advance_pd(&state, site)?;
                }
            }
        }
        Ok(MappingWord {
            base,
            gens,
            final_state: state,
        })
    }

    pub fn identity(base: PantsDecomposition) -> Self {
        let final_state = base.clone();
        MappingWord {
            base,
            gens: Vec::new(),
            final_state,
        }
    }

    pub fn base(&self) -> &PantsDecomposition {
        &self.base
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn final_state(&self) -> &PantsDecomposition {
        &self.final_state
    }

    /// Whether the word returns to its base chart (up to renaming pants),
    /// so that it can be iterated on base coordinates.
    pub fn is_closed(&self) -> bool {
        self.base.chart_eq(&self.final_state)
    }

    /// The word in DSL text form.
    pub fn tokens(&self) -> String {
        self.gens
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Concatenation; every site of `other` is revalidated against the
    /// states it actually meets after `self`.
    pub fn then(&self, other: &MappingWord) -> Result<MappingWord> {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        MappingWord::new(self.base.clone(), gens)
    }
}

/// Applies a word to coordinates over its base decomposition.
pub fn apply_word(word: &MappingWord, coords: &DTCoords) -> Result<(DTCoords, PantsDecomposition)> {
    coords.check_fresh(word.base())?;
    let mut state = word.base().clone();
    let mut c = coords.clone();
    for g in word.gens() {
        let (nc, ns) = apply_generator(&state, &c, g)?;
        c = nc;
        state = ns;
    }
    Ok((c, state))
}

/// The inverse word: generators reversed, twist signs flipped, move sites
/// kept (each elementary move undoes itself when reapplied at the same
/// site). Its base is the original word's final state.
pub fn invert_word(word: &MappingWord) -> Result<MappingWord> {
    let gens = word
        .gens()
        .iter()
        .rev()
        .map(|g| match g {
            Generator::Twist { curve, sign } => Generator::Twist {
                curve: *curve,
                sign: sign.flip(),
            },
            Generator::Move(site) => Generator::Move(*site),
        })
        .collect();
    MappingWord::new(word.final_state().clone(), gens)
}
