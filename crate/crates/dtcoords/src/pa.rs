//! Twist recipes and exact dilatation estimation.
//!
//! A word built from positive twists along one family of curves and
//! negative twists along another, with every curve used at least once,
//! acts on coordinates with a dominant growth rate when the two families
//! jointly fill the surface. The growth rate is estimated by iterating the
//! word on a seed vector in exact arithmetic, renormalizing by the sup norm
//! each round, and watching the normalized vectors converge in the
//! per-curve quotient metric. All comparisons are exact; floats appear only
//! in the reported estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coords::DTCoords;
use crate::moves::{apply_word, invert_word, Generator, MappingWord, Sign};
use crate::rat::{rat_to_f64, Rat};
use crate::surface::PantsDecomposition;
use crate::{Error, Result};

/// Whether a recipe's filling hypothesis is known to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// Built-in pair, checked by the golden tests.
    VerifiedPreset,
    /// User-supplied pair; nothing is claimed about it.
    Unverified,
}

/// A curve to twist along: either a pants curve of the base decomposition,
/// or one carried there by a prefix word (the twist is conjugated by the
/// prefix, so the whole letter acts on base coordinates).
#[derive(Debug, Clone)]
pub struct CurveExpr {
    pub prefix: Vec<Generator>,
    pub curve: usize,
}

impl CurveExpr {
    pub fn plain(curve: usize) -> Self {
        CurveExpr {
            prefix: Vec::new(),
            curve,
        }
    }

    /// prefix, twist, prefix inverse, as one letter.
    pub fn letter(&self, sign: Sign) -> Vec<Generator> {
        let mut gens = self.prefix.clone();
        gens.push(Generator::Twist {
            curve: self.curve,
            sign,
        });
        for g in self.prefix.iter().rev() {
            gens.push(match g {
                Generator::Twist { curve, sign } => Generator::Twist {
                    curve: *curve,
                    sign: sign.flip(),
                },
                Generator::Move(site) => Generator::Move(*site),
            });
        }
        gens
    }
}

/// Two families of curves: `plus` twisted positively, `minus` negatively.
#[derive(Debug, Clone)]
pub struct RecipeSpec {
    pub plus: Vec<CurveExpr>,
    pub minus: Vec<CurveExpr>,
    pub hypothesis: HypothesisStatus,
}

/// One step of a recipe order: which family, which curve in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecipeStep {
    Plus(usize),
    Minus(usize),
}

/// The built-in recipe for a preset surface. The torus presets pair the
/// interior curve with its dual under the first move; the four-holed
/// sphere pairs it with its dual under the second move. The genus-two
/// recipe twists both handle curves and their duals but leaves the middle
/// curve untouched, so its filling hypothesis stays unverified.
pub fn preset_recipe(pd: &PantsDecomposition, name: &str) -> Result<RecipeSpec> {
    match name {
        "once-punctured-torus" | "one-holed-torus" => {
            let site = pd
                .first_site_at(0)
                .ok_or_else(|| Error::Internal("torus preset lost its move site".into()))?;
            Ok(RecipeSpec {
                plus: vec![CurveExpr::plain(0)],
                minus: vec![CurveExpr {
                    prefix: vec![Generator::Move(site)],
                    curve: 0,
                }],
                hypothesis: HypothesisStatus::VerifiedPreset,
            })
        }
        "four-holed-sphere" => {
            let site = pd
                .second_site_at(0, 0)
                .ok_or_else(|| Error::Internal("sphere preset lost its move site".into()))?;
            Ok(RecipeSpec {
                plus: vec![CurveExpr::plain(0)],
                minus: vec![CurveExpr {
                    prefix: vec![Generator::Move(site)],
                    curve: 0,
                }],
                hypothesis: HypothesisStatus::VerifiedPreset,
            })
        }
        "genus-two-closed" => {
            let s0 = pd
                .first_site_at(0)
                .ok_or_else(|| Error::Internal("genus-two preset lost site 0".into()))?;
            let s2 = pd
                .first_site_at(2)
                .ok_or_else(|| Error::Internal("genus-two preset lost site 2".into()))?;
            Ok(RecipeSpec {
                plus: vec![CurveExpr::plain(0), CurveExpr::plain(2)],
                minus: vec![
                    CurveExpr {
                        prefix: vec![Generator::Move(s0)],
                        curve: 0,
                    },
                    CurveExpr {
                        prefix: vec![Generator::Move(s2)],
                        curve: 2,
                    },
                ],
                hypothesis: HypothesisStatus::Unverified,
            })
        }
        other => Err(Error::Gluing(format!("no built-in recipe for '{other}'"))),
    }
}

/// Assembles a word from a recipe and an order of twist steps. Every curve
/// of both families must be twisted at least once.
pub fn build_recipe(
    base: &PantsDecomposition,
    recipe: &RecipeSpec,
    order: &[RecipeStep],
) -> Result<MappingWord> {
    let mut used_plus = vec![false; recipe.plus.len()];
    let mut used_minus = vec![false; recipe.minus.len()];
    let mut gens = Vec::new();
    for step in order {
        let (expr, sign) = match step {
            RecipeStep::Plus(i) => {
                let expr = recipe.plus.get(*i).ok_or_else(|| {
                    Error::Word(format!("recipe has no positive curve {i}"))
                })?;
                used_plus[*i] = true;
                (expr, Sign::Plus)
            }
            RecipeStep::Minus(i) => {
                let expr = recipe.minus.get(*i).ok_or_else(|| {
                    Error::Word(format!("recipe has no negative curve {i}"))
                })?;
                used_minus[*i] = true;
                (expr, Sign::Minus)
            }
        };
        gens.extend(expr.letter(sign));
    }
    if !used_plus.iter().all(|&u| u) || !used_minus.iter().all(|&u| u) {
        return Err(Error::Word(
            "every curve of both families must be twisted at least once".into(),
        ));
    }
    MappingWord::new(base.clone(), gens)
}

/// The default order: alternate through both families once.
pub fn default_order(recipe: &RecipeSpec) -> Vec<RecipeStep> {
    let mut order = Vec::new();
    let n = recipe.plus.len().max(recipe.minus.len());
    for i in 0..n {
        if i < recipe.plus.len() {
            order.push(RecipeStep::Plus(i));
        }
        if i < recipe.minus.len() {
            order.push(RecipeStep::Minus(i));
        }
    }
    order
}

/// Result of a dilatation run. On convergence `lambda` is the final
/// renormalization factor; otherwise it is the mean of the last few, which
/// smooths the oscillation of periodic and parabolic words. `residual` is
/// the final sup-distance between successive normalized iterates in the
/// quotient metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilatationEstimate {
    pub lambda: f64,
    pub log_lambda: f64,
    pub iterations: u32,
    pub converged: bool,
    pub residual: f64,
}

/// How many trailing renormalization factors enter the mean reported for
/// runs that never converge.
const MEAN_WINDOW: usize = 5;

/// Iterates `word` on `seed`, renormalizing by the sup norm, until the
/// normalized iterates converge to within `tol` in the quotient metric or
/// `max_iter` rounds pass. The word must return to its base decomposition
/// so it can be applied repeatedly; the seed must be nonzero.
pub fn estimate_dilatation(
    word: &MappingWord,
    seed: &DTCoords,
    max_iter: u32,
    tol: &Rat,
) -> Result<DilatationEstimate> {
    if !word.is_closed() {
        return Err(Error::Dilatation(
            "word does not return to its starting decomposition, so it cannot be iterated".into(),
        ));
    }
    if max_iter == 0 {
        return Err(Error::Dilatation("max_iter must be at least 1".into()));
    }
    seed.check_fresh(word.base())?;
    let mut c = seed.clone().normalize()?;
    if c.is_zero() {
        return Err(Error::Dilatation("seed vector is zero".into()));
    }
    c = c.scale(&c.max_abs().recip());

    let mut rhos: Vec<f64> = Vec::new();
    let mut iterations = 0u32;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 1..=max_iter {
        iterations += 1;
        let (mut y, _) = apply_word(word, &c)?;
        y.restamp(word.base());
        let rho = y.max_abs();
        if rho == Rat::from_integer(0.into()) {
            return Err(Error::Internal(
                "a homeomorphism sent a nonzero vector to zero".into(),
            ));
        }
        let y = y.scale(&rho.recip());
        let d = y.quotient_distance(&c)?;
        rhos.push(rat_to_f64(&rho));
        if rhos.len() > MEAN_WINDOW {
            rhos.remove(0);
        }
        residual = rat_to_f64(&d);
        c = y;
        if d <= *tol {
            converged = true;
            break;
        }
    }

    let lambda = if converged {
        *rhos.last().expect("at least one iteration ran")
    } else {
        rhos.iter().sum::<f64>() / rhos.len() as f64
    };
    if lambda <= 0.0 {
        return Err(Error::Internal("nonpositive growth estimate".into()));
    }
    Ok(DilatationEstimate {
        lambda,
        log_lambda: lambda.ln(),
        iterations,
        converged,
        residual,
    })
}

/// One line of a spectrum scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanEntry {
    pub word: String,
    pub lambda: f64,
    pub log_lambda: f64,
    pub converged: bool,
    pub iterations: u32,
}

/// Hard ceiling on scan word length; the search space grows exponentially.
pub const SCAN_LENGTH_CAP: u32 = 8;

/// Estimates the dilatation of every word of length 2..=max_len over the
/// recipe's twist letters that uses every letter at least once, sorted by
/// growth rate and deduplicated to within `tol` of log lambda. Length
/// counts twist letters, not generators. Deterministic: the candidate list,
/// the per-word estimates, and the final ordering are independent of
/// thread scheduling.
pub fn spectrum_scan(
    base: &PantsDecomposition,
    recipe: &RecipeSpec,
    max_len: u32,
    seed: &DTCoords,
    max_iter: u32,
    tol: &Rat,
) -> Result<Vec<ScanEntry>> {
    if max_len > SCAN_LENGTH_CAP {
        return Err(Error::Dilatation(format!(
            "scan length {max_len} exceeds the cap of {SCAN_LENGTH_CAP}"
        )));
    }
    let mut letters: Vec<Vec<Generator>> = Vec::new();
    for expr in &recipe.plus {
        letters.push(expr.letter(Sign::Plus));
    }
    for expr in &recipe.minus {
        letters.push(expr.letter(Sign::Minus));
    }
    let k = letters.len();
    if k < 2 {
        return Err(Error::Dilatation(
            "a scan needs at least one positive and one negative curve".into(),
        ));
    }
    if (max_len as usize) < k {
        return Err(Error::Dilatation(format!(
            "scan length {max_len} cannot use all {k} letters"
        )));
    }

    // every sequence of letter indices that uses each letter at least once
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for len in k..=max_len as usize {
        let mut seq = vec![0usize; len];
        loop {
            let mut present = vec![false; k];
            for &i in &seq {
                present[i] = true;
            }
            if present.into_iter().all(|p| p) {
                candidates.push(seq.clone());
            }
            // odometer increment
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                seq[pos] += 1;
                if seq[pos] < k {
                    break;
                }
                seq[pos] = 0;
            }
            if seq.iter().all(|&i| i == 0) {
                break;
            }
        }
    }

    let mut entries: Vec<ScanEntry> = candidates
        .par_iter()
        .map(|seq| -> Result<ScanEntry> {
            let mut gens = Vec::new();
            for &i in seq {
                gens.extend(letters[i].iter().cloned());
            }
            let word = MappingWord::new(base.clone(), gens)?;
            let est = estimate_dilatation(&word, seed, max_iter, tol)?;
            Ok(ScanEntry {
                word: word.tokens(),
                lambda: est.lambda,
                log_lambda: est.log_lambda,
                converged: est.converged,
                iterations: est.iterations,
            })
        })
        .collect::<Result<_>>()?;

    entries.sort_by(|a, b| {
        a.log_lambda
            .partial_cmp(&b.log_lambda)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.word.cmp(&b.word))
    });
    let tol_f = rat_to_f64(tol);
    let mut kept: Vec<ScanEntry> = Vec::new();
    for e in entries {
        match kept.last() {
            Some(prev) if (e.log_lambda - prev.log_lambda).abs() <= tol_f => {}
            _ => kept.push(e),
        }
    }
    Ok(kept)
}

/// Sanity helper used by tests and the CLI: a word and its inverse must
/// report the same growth rate.
pub fn inverse_estimate(
    word: &MappingWord,
    seed: &DTCoords,
    max_iter: u32,
    tol: &Rat,
) -> Result<(DilatationEstimate, DilatationEstimate)> {
    let fwd = estimate_dilatation(word, seed, max_iter, tol)?;
    let inv = invert_word(word)?;
    let mut seed_inv = seed.clone();
    seed_inv.restamp(inv.base());
    let bwd = estimate_dilatation(&inv, &seed_inv, max_iter, tol)?;
    Ok((fwd, bwd))
}

/// Exact tolerance parser for CLI flags: accepts "1e-9", "0.001", "1/1000".
pub fn parse_tolerance(s: &str) -> Result<Rat> {
    let v = crate::rat::parse_rat(s)
        .ok_or_else(|| Error::Dilatation(format!("bad tolerance '{s}'")))?;
    if !num_traits::Signed::is_positive(&v) {
        return Err(Error::Dilatation(format!(
            "tolerance '{s}' must be positive"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::{sample, Scope};
    use crate::dsl::parse_word;
    use crate::rat::{parse_rat, rat};
    use crate::surface::preset;

    fn tol9() -> Rat {
        parse_rat("1e-9").unwrap()
    }

    fn seed_for(pd: &PantsDecomposition) -> DTCoords {
        // all interior curves at (2, 1): parity-consistent and nonzero
        let triples: Vec<(usize, Rat, Rat)> = (0..pd.interior_curve_count())
            .map(|c| (c, rat(2), rat(1)))
            .collect();
        DTCoords::bind(pd, Scope::MF0, &triples).unwrap()
    }

    #[test]
    fn identity_word_converges_immediately_to_one() {
        let pd = preset("once-punctured-torus").unwrap();
        let word = MappingWord::identity(pd.clone());
        let est = estimate_dilatation(&word, &seed_for(&pd), 500, &tol9()).unwrap();
        assert_eq!(est.lambda, 1.0);
        assert_eq!(est.log_lambda, 0.0);
        assert_eq!(est.iterations, 1);
        assert!(est.converged);
    }

    #[test]
    fn single_twist_grows_subexponentially() {
        let pd = preset("once-punctured-torus").unwrap();
        let word = parse_word(&pd, "T+0").unwrap();
        let est = estimate_dilatation(&word, &seed_for(&pd), 500, &tol9()).unwrap();
        assert!(!est.converged);
        assert!(est.lambda < 1.01, "lambda = {}", est.lambda);
    }

    #[test]
    fn golden_torus_dilatation() {
        let pd = preset("once-punctured-torus").unwrap();
        let word = parse_word(&pd, "T+0 M1@0 T-0 M1@0").unwrap();
        let est = estimate_dilatation(&word, &seed_for(&pd), 500, &tol9()).unwrap();
        let expected = (3.0 + 5.0_f64.sqrt()) / 2.0;
        assert!(est.converged);
        assert!(
            (est.lambda - expected).abs() < 1e-6,
            "lambda = {}, expected {}",
            est.lambda,
            expected
        );
    }

    #[test]
    fn golden_sphere_dilatation() {
        let pd = preset("four-holed-sphere").unwrap();
        let word = parse_word(&pd, "T+0 M2@0 T-0 M2@0").unwrap();
        let est = estimate_dilatation(&word, &seed_for(&pd), 500, &tol9()).unwrap();
        let expected = 3.0 + 2.0 * 2.0_f64.sqrt();
        assert!(est.converged);
        assert!(
            (est.lambda - expected).abs() < 1e-6,
            "lambda = {}, expected {}",
            est.lambda,
            expected
        );
    }

    #[test]
    fn word_and_inverse_agree() {
        let pd = preset("once-punctured-torus").unwrap();
        let word = parse_word(&pd, "T+0 T+0 M1@0 T-0 M1@0").unwrap();
        let (fwd, bwd) = inverse_estimate(&word, &seed_for(&pd), 500, &tol9()).unwrap();
        assert!(fwd.converged && bwd.converged);
        assert!((fwd.lambda - bwd.lambda).abs() < 1e-6);
    }

    #[test]
    fn estimate_is_seed_independent() {
        let pd = preset("once-punctured-torus").unwrap();
        let word = parse_word(&pd, "T+0 M1@0 T-0 M1@0").unwrap();
        let mut lambdas = Vec::new();
        for seed in 0..5 {
            let x = sample(&pd, Scope::MF0, 20, seed);
            if x.coords().is_zero() {
                continue;
            }
            let est = estimate_dilatation(&word, x.coords(), 500, &tol9()).unwrap();
            assert!(est.converged);
            lambdas.push(est.lambda);
        }
        for w in lambdas.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn periodic_words_do_not_converge() {
        // the six-fold product is periodic, so normalized iterates cycle
        let pd = preset("once-punctured-torus").unwrap();
        let word = parse_word(&pd, "T+0 M1@0 T+0 M1@0").unwrap();
        let est = estimate_dilatation(&word, &seed_for(&pd), 100, &tol9()).unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 100);
    }

    #[test]
    fn open_words_and_zero_seeds_are_rejected() {
        let pd = preset("four-holed-sphere").unwrap();
        // a single second move lands in a different chart
        let word = parse_word(&pd, "T+0 M2@0").unwrap();
        assert!(!word.is_closed());
        assert!(matches!(
            estimate_dilatation(&word, &seed_for(&pd), 10, &tol9()),
            Err(Error::Dilatation(_))
        ));
        let closed = parse_word(&pd, "T+0 M2@0 T-0 M2@0").unwrap();
        assert!(closed.is_closed());
        let zero = DTCoords::zero(&pd, Scope::MF0);
        assert!(matches!(
            estimate_dilatation(&closed, &zero, 10, &tol9()),
            Err(Error::Dilatation(_))
        ));
    }

    #[test]
    fn scan_finds_the_golden_minimum() {
        let pd = preset("once-punctured-torus").unwrap();
        let recipe = preset_recipe(&pd, "once-punctured-torus").unwrap();
        let entries = spectrum_scan(&pd, &recipe, 4, &seed_for(&pd), 500, &tol9()).unwrap();
        assert!(!entries.is_empty());
        let expected = ((3.0 + 5.0_f64.sqrt()) / 2.0).ln();
        let min = entries
            .iter()
            .filter(|e| e.converged)
            .map(|e| e.log_lambda)
            .fold(f64::INFINITY, f64::min);
        assert!((min - expected).abs() < 1e-6, "min = {min}");
        // sorted ascending
        for w in entries.windows(2) {
            assert!(w[0].log_lambda <= w[1].log_lambda + 1e-12);
        }
    }

    #[test]
    fn scan_respects_the_cap() {
        let pd = preset("once-punctured-torus").unwrap();
        let recipe = preset_recipe(&pd, "once-punctured-torus").unwrap();
        assert!(matches!(
            spectrum_scan(&pd, &recipe, 9, &seed_for(&pd), 10, &tol9()),
            Err(Error::Dilatation(_))
        ));
    }

    #[test]
    fn recipes_validate_coverage() {
        let pd = preset("once-punctured-torus").unwrap();
        let recipe = preset_recipe(&pd, "once-punctured-torus").unwrap();
        assert!(build_recipe(&pd, &recipe, &[RecipeStep::Plus(0)]).is_err());
        let word = build_recipe(&pd, &recipe, &default_order(&recipe)).unwrap();
        assert_eq!(word.tokens(), "T+0 M1@0 T-0 M1@0");
    }
}
