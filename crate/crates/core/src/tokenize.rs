//! Tokenizers feeding the overlap metrics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// How text is cut into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizerMode {
    /// One token per CJK codepoint, one per punctuation codepoint, and one per
    /// maximal run of other letters/digits.
    #[default]
    CjkChar,
    /// Split on unicode whitespace only.
    Whitespace,
}

impl TokenizerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TokenizerMode::CjkChar => "cjk-char",
            TokenizerMode::Whitespace => "whitespace",
        }
    }
}

impl fmt::Display for TokenizerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cjk-char" => Ok(TokenizerMode::CjkChar),
            "whitespace" => Ok(TokenizerMode::Whitespace),
            other => Err(Error::invalid(format!("unknown tokenizer mode `{other}`"))),
        }
    }
}

/// Ordered tokens produced by [`tokenize`].
///
/// Tokens are never empty and never contain whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence {
    tokens: Vec<String>,
    mode: TokenizerMode,
}

impl TokenSequence {
    /// Builds a sequence from pre-split tokens, dropping any that are empty or
    /// splitting any that carry whitespace.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let tokens = tokens
            .into_iter()
            .flat_map(|t| {
                t.as_ref()
                    .split_whitespace()
                    .map(str::to_owned)
                    .collect::<Vec<_>>()
            })
            .collect();
        TokenSequence {
            tokens,
            mode: TokenizerMode::Whitespace,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn mode(&self) -> TokenizerMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Han ideographs, kana, hangul and bopomofo.
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF
        | 0x3100..=0x312F
        | 0x31A0..=0x31BF
        | 0x31F0..=0x31FF
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xAC00..=0xD7AF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2EBEF
        | 0x2F800..=0x2FA1F
        | 0x30000..=0x3134F)
}

pub fn tokenize(text: &str, mode: TokenizerMode) -> TokenSequence {
    let tokens = match mode {
        TokenizerMode::Whitespace => text.split_whitespace().map(str::to_owned).collect(),
        TokenizerMode::CjkChar => tokenize_cjk(text),
    };
    TokenSequence { tokens, mode }
}

fn tokenize_cjk(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut run = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() && !is_cjk(c) {
            run.push(c);
            continue;
        }
        if !run.is_empty() {
            tokens.push(std::mem::take(&mut run));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if !run.is_empty() {
        tokens.push(run);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str, mode: TokenizerMode) -> Vec<String> {
        tokenize(text, mode).tokens().to_vec()
    }

    #[test]
    fn cjk_mixed_with_latin() {
        assert_eq!(toks("量子 AI", TokenizerMode::CjkChar), ["量", "子", "AI"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("", TokenizerMode::CjkChar).is_empty());
        assert!(tokenize("   \n", TokenizerMode::Whitespace).is_empty());
    }

    #[test]
    fn whitespace_collapses() {
        assert_eq!(toks("a b  c", TokenizerMode::Whitespace), ["a", "b", "c"]);
    }

    #[test]
    fn punctuation_is_split_per_codepoint() {
        assert_eq!(
            toks("{\"PERSON\":[\"張三\"]}", TokenizerMode::CjkChar),
            ["{", "\"", "PERSON", "\"", ":", "[", "\"", "張", "三", "\"", "]", "}"]
        );
        assert_eq!(toks("GPT-4o，很好。", TokenizerMode::CjkChar), ["GPT", "-", "4o", "，", "很", "好", "。"]);
    }

    #[test]
    fn mode_round_trips_through_str() {
        for mode in [TokenizerMode::CjkChar, TokenizerMode::Whitespace] {
            assert_eq!(mode.as_str().parse::<TokenizerMode>().unwrap(), mode);
        }
        assert!("bpe".parse::<TokenizerMode>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn tokens_are_nonempty_and_whitespace_free(text in "\\PC{0,60}", ws in proptest::bool::ANY) {
            let mode = if ws { TokenizerMode::Whitespace } else { TokenizerMode::CjkChar };
            let seq = tokenize(&text, mode);
            for t in seq.tokens() {
                proptest::prop_assert!(!t.is_empty());
                proptest::prop_assert!(!t.chars().any(char::is_whitespace));
            }
            proptest::prop_assert_eq!(seq, tokenize(&text, mode));
        }
    }
}
