//! Tiny text format for mapping-class words.
//!
//! A word is a whitespace separated list of tokens, applied left to right:
//!
//! * `T+3` / `T-3`: positive or negative twist along curve 3,
//! * `M1@2`: first elementary move at curve 2,
//! * `M2@1` or `M2@1:1`: second elementary move at curve 1, with an
//!   optional labeling in `0..=1` picking the bottom pants (absent means 0).
//!
//! Moves change which sites exist, so each token is resolved against the
//! decomposition as it stands after the tokens before it. Errors carry the
//! 1-based byte column of the offending token.

use crate::moves::{advance_pd, Generator, MappingWord, Sign};
use crate::surface::PantsDecomposition;
use crate::{Error, Result};

fn parse_index(text: &str, column: usize, what: &str) -> Result<usize> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse {
            column,
            message: format!("expected a {what}, found {text:?}"),
        });
    }
    text.parse::<usize>().map_err(|_| Error::Parse {
        column,
        message: format!("{what} out of range: {text}"),
    })
}

/// Parse a word over `pd` into a validated [`MappingWord`].
pub fn parse_word(pd: &PantsDecomposition, src: &str) -> Result<MappingWord> {
    let mut gens = Vec::new();
    let mut state = pd.clone();
    let mut offset = 0usize;
    while offset < src.len() {
        let tail = &src[offset..];
        offset += tail.len() - tail.trim_start().len();
        if offset >= src.len() {
            break;
        }
        let tail = &src[offset..];
        let len = tail
            .find(char::is_whitespace)
            .unwrap_or(tail.len());
        let tok = &tail[..len];
        let column = offset + 1;
        let gen = parse_token(&state, tok, column)?;
        if let Generator::Move(site) = &gen {
            state = advance_pd(&state, site)?;
        }
        gens.push(gen);
        offset += len;
    }
    MappingWord::new(pd.clone(), gens)
}

fn parse_token(state: &PantsDecomposition, tok: &str, column: usize) -> Result<Generator> {
    if let Some(rest) = tok.strip_prefix("T+") {
        let curve = parse_index(rest, column, "curve index")?;
        check_curve(state, curve, column)?;
        return Ok(Generator::Twist {
            curve,
            sign: Sign::Plus,
        });
    }
    if let Some(rest) = tok.strip_prefix("T-") {
        let curve = parse_index(rest, column, "curve index")?;
        check_curve(state, curve, column)?;
        return Ok(Generator::Twist {
            curve,
            sign: Sign::Minus,
        });
    }
    if let Some(rest) = tok.strip_prefix("M1@") {
        let curve = parse_index(rest, column, "curve index")?;
        check_curve(state, curve, column)?;
        let site = state.first_site_at(curve).ok_or_else(|| Error::Parse {
            column,
            message: format!(
                "no first-move site at curve {curve} in the current decomposition"
            ),
        })?;
        return Ok(Generator::Move(site));
    }
    if let Some(rest) = tok.strip_prefix("M2@") {
        let (curve_text, labeling) = match rest.split_once(':') {
            Some((c, l)) => {
                let labeling = parse_index(l, column, "slot labeling")?;
                if labeling > 1 {
                    return Err(Error::Parse {
                        column,
                        message: format!("slot labeling must be 0..=1, found {labeling}"),
                    });
                }
                (c, labeling as u8)
            }
            None => (rest, 0),
        };
        let curve = parse_index(curve_text, column, "curve index")?;
        check_curve(state, curve, column)?;
        let site = state
            .second_site_at(curve, labeling)
            .ok_or_else(|| Error::Parse {
                column,
                message: format!(
                    "no second-move site at curve {curve} (labeling {labeling}) \
                     in the current decomposition"
                ),
            })?;
        return Ok(Generator::Move(site));
    }
    Err(Error::Parse {
        column,
        message: format!("unknown token {tok:?} (expected T+n, T-n, M1@n, or M2@n[:l])"),
    })
}

fn check_curve(state: &PantsDecomposition, curve: usize, column: usize) -> Result<()> {
    if curve >= state.curve_count() {
        return Err(Error::Parse {
            column,
            message: format!(
                "unknown curve {curve} (surface has {})",
                state.curve_count()
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::invert_word;
    use crate::surface::preset;

    #[test]
    fn parses_twists_and_moves() {
        let pd = preset("four-holed-sphere").unwrap();
        let word = parse_word(&pd, "T+0 M2@0 T-0 M2@0").unwrap();
        assert_eq!(word.len(), 4);
        assert_eq!(word.tokens(), "T+0 M2@0 T-0 M2@0");
        assert!(word.is_closed());
    }

    #[test]
    fn labeled_second_move_round_trips_through_tokens() {
        let pd = preset("four-holed-sphere").unwrap();
        let word = parse_word(&pd, "M2@0:1").unwrap();
        assert_eq!(word.tokens(), "M2@0:1");
        let again = parse_word(&pd, &word.tokens()).unwrap();
        assert_eq!(again.tokens(), word.tokens());
    }

    #[test]
    fn empty_and_whitespace_words_are_identities() {
        let pd = preset("once-punctured-torus").unwrap();
        assert!(parse_word(&pd, "").unwrap().is_empty());
        assert!(parse_word(&pd, "  \t \n ").unwrap().is_empty());
    }

    #[test]
    fn error_columns_point_at_the_bad_token() {
        let pd = preset("once-punctured-torus").unwrap();
        match parse_word(&pd, "T+0 banana") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("expected a parse error, got {other:?}"),
        }
        match parse_word(&pd, "T+9") {
            Err(Error::Parse { column, message }) => {
                assert_eq!(column, 1);
                assert!(message.contains("unknown curve 9"));
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
        match parse_word(&pd, "T+0  M2@0:9") {
            Err(Error::Parse { column, message }) => {
                assert_eq!(column, 6);
                assert!(message.contains("0..=1"));
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn sites_resolve_against_the_running_state() {
        // The torus has a single curve, so M1 resolves before and after
        // another M1; on the four-holed sphere a second move reshuffles
        // which labelings exist, and parsing must follow that.
        let pd = preset("once-punctured-torus").unwrap();
        let word = parse_word(&pd, "M1@0 M1@0").unwrap();
        assert_eq!(word.len(), 2);

        let pd = preset("four-holed-sphere").unwrap();
        let word = parse_word(&pd, "M2@0:1 M2@0:1").unwrap();
        assert_eq!(word.len(), 2);
    }

    #[test]
    fn missing_sites_are_reported() {
        // genus-two middle curve joins two different pants, so it has no
        // first-move site
        let pd = preset("genus-two-closed").unwrap();
        match parse_word(&pd, "M1@1") {
            Err(Error::Parse { column, message }) => {
                assert_eq!(column, 1);
                assert!(message.contains("no first-move site"));
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn inverse_of_parsed_word_echoes_back() {
        let pd = preset("four-holed-sphere").unwrap();
        let word = parse_word(&pd, "T+0 M2@0 T-0 M2@0").unwrap();
        let inv = invert_word(&word).unwrap();
        let echoed = parse_word(&pd, &inv.tokens()).unwrap();
        assert_eq!(echoed.tokens(), inv.tokens());
    }
}
