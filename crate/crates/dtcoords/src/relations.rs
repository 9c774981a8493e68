//! Randomized checks of the relations the generators are supposed to
//! satisfy, run over sampled integral multicurves.
//!
//! Four suites:
//!
//! * `involution`: applying an elementary move twice at the same site gives
//!   back the starting coordinates. For a first move whose pants has a curve
//!   in its third slot the double move acts as a half twist there (t gains
//!   m/2 on that curve when it is in scope), so the check compares against
//!   that exact expectation rather than pretending the drift away.
//! * `braid`: at a first-move site whose third slot holds no interior curve,
//!   the twist A along the pants curve and its dual B (A conjugated by the
//!   move) satisfy ABA = BAB on interior coordinates.
//! * `order-six`: at the same sites, (AB)^6 acts as the identity on interior
//!   coordinates.
//! * `count-invariance`: twists and moves never change the number of
//!   connected components of an integral multicurve.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coords::{sample, validate_integral, DTCoords, Scope};
use crate::dsl::parse_word;
use crate::moves::{apply_generator, apply_word, Generator, Sign};
use crate::multicurve::count_components;
use crate::rat::half;
use crate::surface::{MoveSite, PantsDecomposition, SlotBinding, SlotRef};
use crate::{Error, Result};

/// Which relation suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Involution,
    Braid,
    OrderSix,
    CountInvariance,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 4] = [
        SuiteKind::Involution,
        SuiteKind::Braid,
        SuiteKind::OrderSix,
        SuiteKind::CountInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Involution => "involution",
            SuiteKind::Braid => "braid",
            SuiteKind::OrderSix => "order-six",
            SuiteKind::CountInvariance => "count-invariance",
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "involution" => Ok(SuiteKind::Involution),
            "braid" => Ok(SuiteKind::Braid),
            "order-six" => Ok(SuiteKind::OrderSix),
            "count-invariance" => Ok(SuiteKind::CountInvariance),
            other => Err(Error::Parse {
                column: 1,
                message: format!(
                    "unknown suite {other:?} (expected involution, braid, \
                     order-six, or count-invariance)"
                ),
            }),
        }
    }
}

/// Result of one suite: how many cases ran and how many failed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    suite: &'static str,
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new(suite: &'static str) -> Self {
        Tally {
            suite,
            cases: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            suite: self.suite.to_string(),
            cases: self.cases,
            failures: self.failures,
            first_counterexample: self.first,
        }
    }
}

fn case_seed(seed: u64, counter: &mut u64) -> u64 {
    *counter += 1;
    seed.wrapping_add(counter.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn show(coords: &DTCoords) -> String {
    serde_json::to_string(&coords.to_json()).unwrap_or_else(|_| "<unprintable>".into())
}

/// First-move sites whose third slot holds no interior curve. These are the
/// sites where the conjugated twist genuinely dualizes on interior
/// coordinates, because the residual half twist of the double move lands
/// outside the interior scope.
fn torus_like_first_sites(pd: &PantsDecomposition) -> Vec<MoveSite> {
    pd.move_sites()
        .into_iter()
        .filter(|site| match site {
            MoveSite::First {
                pants, third_slot, ..
            } => !matches!(
                pd.binding(SlotRef::new(*pants, *third_slot)),
                SlotBinding::Interior(_)
            ),
            MoveSite::Second { .. } => false,
        })
        .collect()
}

/// What a double move at `site` should give back, starting from `coords`.
fn double_move_expectation(
    pd: &PantsDecomposition,
    coords: &DTCoords,
    site: &MoveSite,
) -> DTCoords {
    let mut expected = coords.clone();
    if let MoveSite::First {
        pants, third_slot, ..
    } = site
    {
        let binding = pd.binding(SlotRef::new(*pants, *third_slot));
        if let Some(c) = binding.curve() {
            if coords.scope().contains(pd, c) {
                let shift = half(expected.get(c).expect("curve in scope").0);
                let e = expected.entry_mut(c);
                e.t = &e.t + shift;
            }
        }
    }
    expected
}

/// Double application of every move site returns the start, up to the exact
/// half-twist drift of first moves described on [`double_move_expectation`].
pub fn involution_suite(
    pd: &PantsDecomposition,
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("involution");
    let mut counter = 0u64;
    for site in pd.move_sites() {
        let gen = Generator::Move(site);
        for scope in [Scope::MF0, Scope::MF] {
            for _ in 0..samples {
                let s = case_seed(seed, &mut counter);
                let coords = sample(pd, scope, bound, s).into_coords();
                let (once, pd1) = apply_generator(pd, &coords, &gen)?;
                let (twice, pd2) = apply_generator(&pd1, &once, &gen)?;
                let expected = double_move_expectation(pd, &coords, &site);
                let ok = twice == expected && pd2.chart_eq(pd);
                tally.record(ok, || {
                    format!(
                        "{} on {:?} seed {s}: start {} came back as {}",
                        site.token(),
                        scope,
                        show(&coords),
                        show(&twice)
                    )
                });
            }
        }
    }
    Ok(tally.finish())
}

/// ABA = BAB for the twist A along a torus-like pants curve and its dual
/// B = M1 A M1, on interior coordinates.
pub fn braid_suite(
    pd: &PantsDecomposition,
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("braid");
    let mut counter = 0u64;
    for site in torus_like_first_sites(pd) {
        let c = site.curve();
        let aba = parse_word(pd, &format!("T+{c} M1@{c} T+{c} M1@{c} T+{c}"))?;
        let bab = parse_word(
            pd,
            &format!("M1@{c} T+{c} M1@{c} T+{c} M1@{c} T+{c} M1@{c}"),
        )?;
        for _ in 0..samples {
            let s = case_seed(seed, &mut counter);
            let coords = sample(pd, Scope::MF0, bound, s).into_coords();
            let (left, _) = apply_word(&aba, &coords)?;
            let (right, _) = apply_word(&bab, &coords)?;
            let ok = left == right;
            tally.record(ok, || {
                format!(
                    "curve {c} seed {s}: ABA gave {}, BAB gave {}",
                    show(&left),
                    show(&right)
                )
            });
        }
    }
    Ok(tally.finish())
}

/// (AB)^6 acts as the identity on interior coordinates at torus-like sites.
pub fn order_six_suite(
    pd: &PantsDecomposition,
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("order-six");
    let mut counter = 0u64;
    for site in torus_like_first_sites(pd) {
        let c = site.curve();
        let unit = format!("T+{c} M1@{c} ");
        let word = parse_word(pd, &unit.repeat(6))?;
        for _ in 0..samples {
            let s = case_seed(seed, &mut counter);
            let coords = sample(pd, Scope::MF0, bound, s).into_coords();
            let (out, pd_out) = apply_word(&word, &coords)?;
            let ok = out == coords && pd_out.chart_eq(pd);
            tally.record(ok, || {
                format!(
                    "curve {c} seed {s}: start {} ended at {}",
                    show(&coords),
                    show(&out)
                )
            });
        }
    }
    Ok(tally.finish())
}

/// Twists and moves preserve the component count of integral multicurves.
pub fn count_invariance_suite(
    pd: &PantsDecomposition,
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<SuiteOutcome> {
    let mut tally = Tally::new("count-invariance");
    let mut counter = 0u64;
    for scope in [Scope::MF0, Scope::MF] {
        let mut gens = Vec::new();
        for curve in 0..scope.curve_count(pd) {
            gens.push(Generator::Twist {
                curve,
                sign: Sign::Plus,
            });
            gens.push(Generator::Twist {
                curve,
                sign: Sign::Minus,
            });
        }
        gens.extend(pd.move_sites().into_iter().map(Generator::Move));
        for gen in &gens {
            for _ in 0..samples {
                let s = case_seed(seed, &mut counter);
                let mc = sample(pd, scope, bound, s);
                let before = count_components(pd, &mc)?;
                let (moved, pd1) = apply_generator(pd, mc.coords(), gen)?;
                let moved = validate_integral(&pd1, &moved)?;
                let after = count_components(&pd1, &moved)?;
                let ok = before == after;
                tally.record(ok, || {
                    format!(
                        "{gen} on {:?} seed {s}: {} has {before} components, \
                         image {} has {after}",
                        scope,
                        show(mc.coords()),
                        show(moved.coords())
                    )
                });
            }
        }
    }
    Ok(tally.finish())
}

/// Run one suite.
pub fn run_suite(
    pd: &PantsDecomposition,
    kind: SuiteKind,
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<SuiteOutcome> {
    match kind {
        SuiteKind::Involution => involution_suite(pd, samples, bound, seed),
        SuiteKind::Braid => braid_suite(pd, samples, bound, seed),
        SuiteKind::OrderSix => order_six_suite(pd, samples, bound, seed),
        SuiteKind::CountInvariance => count_invariance_suite(pd, samples, bound, seed),
    }
}

/// Run several suites in order. A suite with no eligible sites on `pd`
/// reports zero cases rather than failing.
pub fn verify_relations(
    pd: &PantsDecomposition,
    kinds: &[SuiteKind],
    samples: usize,
    bound: u32,
    seed: u64,
) -> Result<Vec<SuiteOutcome>> {
    kinds
        .iter()
        .map(|k| run_suite(pd, *k, samples, bound, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{preset, PRESET_NAMES};

    #[test]
    fn involution_holds_on_every_preset() {
        for name in PRESET_NAMES {
            let pd = preset(name).unwrap();
            let out = involution_suite(&pd, 6, 8, 7).unwrap();
            assert!(out.cases > 0, "{name}");
            assert_eq!(out.failures, 0, "{name}: {:?}", out.first_counterexample);
        }
    }

    #[test]
    fn braid_holds_where_defined() {
        for name in ["once-punctured-torus", "one-holed-torus"] {
            let pd = preset(name).unwrap();
            let out = braid_suite(&pd, 10, 8, 11).unwrap();
            assert!(out.cases > 0, "{name}");
            assert_eq!(out.failures, 0, "{name}: {:?}", out.first_counterexample);
        }
        // no first-move sites at all
        let pd = preset("four-holed-sphere").unwrap();
        assert_eq!(braid_suite(&pd, 10, 8, 11).unwrap().cases, 0);
        // first-move sites exist but their third slots hold interior curves
        let pd = preset("genus-two-closed").unwrap();
        assert_eq!(braid_suite(&pd, 10, 8, 11).unwrap().cases, 0);
    }

    #[test]
    fn order_six_holds_where_defined() {
        for name in ["once-punctured-torus", "one-holed-torus"] {
            let pd = preset(name).unwrap();
            let out = order_six_suite(&pd, 8, 8, 13).unwrap();
            assert!(out.cases > 0, "{name}");
            assert_eq!(out.failures, 0, "{name}: {:?}", out.first_counterexample);
        }
        let pd = preset("four-holed-sphere").unwrap();
        assert_eq!(order_six_suite(&pd, 8, 8, 13).unwrap().cases, 0);
    }

    #[test]
    fn counts_are_invariant_on_every_preset() {
        for name in PRESET_NAMES {
            let pd = preset(name).unwrap();
            let out = count_invariance_suite(&pd, 3, 6, 17).unwrap();
            assert!(out.cases > 0, "{name}");
            assert_eq!(out.failures, 0, "{name}: {:?}", out.first_counterexample);
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for kind in SuiteKind::ALL {
            assert_eq!(kind.name().parse::<SuiteKind>().unwrap(), kind);
        }
        assert!(matches!(
            "nonsense".parse::<SuiteKind>(),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn dispatcher_runs_all_suites() {
        let pd = preset("once-punctured-torus").unwrap();
        let outs = verify_relations(&pd, &SuiteKind::ALL, 2, 5, 3).unwrap();
        assert_eq!(outs.len(), 4);
        for out in &outs {
            assert!(out.passed(), "{}: {:?}", out.suite, out.first_counterexample);
        }
        let json = serde_json::to_string(&outs).unwrap();
        assert!(json.contains("\"suite\":\"order-six\""));
        assert!(!json.contains("first_counterexample"));
    }
}
