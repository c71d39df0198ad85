//! Symbol text: the human-readable form of a symbol sequence.
//!
//! Single-character alphabets use contiguous characters (whitespace is
//! ignored on input); alphabets with longer symbols use one
//! whitespace-separated token per line.

use std::collections::HashMap;

use lzhm_core::markov::Alphabet;

use crate::error::{Error, Result};

pub fn parse_symbol_text(text: &str, alphabet: &Alphabet) -> Result<Vec<u16>> {
    let mut out = Vec::new();
    if alphabet.single_char() {
        let map: HashMap<char, u16> = alphabet
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.chars().next().unwrap(), i as u16))
            .collect();
        for (lineno, line) in text.lines().enumerate() {
            for ch in line.chars() {
                if ch.is_whitespace() {
                    continue;
                }
                match map.get(&ch) {
                    Some(&i) => out.push(i),
                    None => {
                        return Err(Error::UnknownSymbol {
                            token: ch.to_string(),
                            line: lineno + 1,
                        })
                    }
                }
            }
        }
    } else {
        let map: HashMap<&str, u16> = alphabet
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u16))
            .collect();
        for (lineno, line) in text.lines().enumerate() {
            for token in line.split_whitespace() {
                match map.get(token) {
                    Some(&i) => out.push(i),
                    None => {
                        return Err(Error::UnknownSymbol {
                            token: token.to_string(),
                            line: lineno + 1,
                        })
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn format_symbol_text(symbols: &[u16], alphabet: &Alphabet) -> String {
    if symbols.is_empty() {
        return String::new();
    }
    if alphabet.single_char() {
        let mut s: String = symbols.iter().map(|&i| alphabet.symbol(i)).collect();
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for &i in symbols {
            s.push_str(alphabet.symbol(i));
            s.push('\n');
        }
        s
    }
}
