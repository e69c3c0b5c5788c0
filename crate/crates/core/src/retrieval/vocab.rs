//! Greedy longest-match-first sub-word tokenization (WordPiece style).

use std::collections::{BTreeSet, HashSet};

/// Emitted for a character that no vocabulary entry covers.
pub const UNK_TOKEN: &str = "<unk>";

pub const DEFAULT_CONTINUATION_PREFIX: &str = "##";

/// Built-in vocabulary used when no vocabulary file is supplied. Small on
/// purpose: common biomedical word pieces plus the character closure.
const BUILTIN_VOCAB: &str = include_str!("builtin_vocab.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordVocab {
    initial: HashSet<String>,
    /// Continuation pieces, stored without the prefix.
    continuation: HashSet<String>,
    continuation_prefix: String,
    max_piece_chars: usize,
}

impl SubwordVocab {
    /// Builds a vocabulary from entries; entries starting with
    /// `continuation_prefix` are continuation pieces. Every character of every
    /// entry is added both as an initial and as a continuation piece, so any
    /// covered character can be matched at any position of a word.
    pub fn new<I, S>(entries: I, continuation_prefix: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut initial = HashSet::new();
        let mut continuation = HashSet::new();
        for entry in entries {
            let entry = entry.as_ref();
            let piece = match entry.strip_prefix(continuation_prefix) {
                Some(rest) if !continuation_prefix.is_empty() => {
                    if rest.is_empty() {
                        continue;
                    }
                    continuation.insert(rest.to_owned());
                    rest
                }
                _ => {
                    if entry.is_empty() {
                        continue;
                    }
                    initial.insert(entry.to_owned());
                    entry
                }
            };
            for c in piece.chars() {
                initial.insert(c.to_string());
                continuation.insert(c.to_string());
            }
        }
        let max_piece_chars = initial
            .iter()
            .chain(continuation.iter())
            .map(|p| p.chars().count())
            .max()
            .unwrap_or(0);
        Self {
            initial,
            continuation,
            continuation_prefix: continuation_prefix.to_owned(),
            max_piece_chars,
        }
    }

    /// Parses a vocabulary file: one token per line, `##`-prefixed lines are
    /// continuation pieces. Blank lines, `<unk>` and bracketed special tokens
    /// such as `[CLS]` are skipped.
    pub fn from_vocab_text(text: &str) -> Self {
        let entries = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.trim().is_empty())
            .filter(|l| *l != UNK_TOKEN)
            .filter(|l| !(l.len() > 2 && l.starts_with('[') && l.ends_with(']')));
        Self::new(entries, DEFAULT_CONTINUATION_PREFIX)
    }

    pub fn builtin() -> Self {
        Self::from_vocab_text(BUILTIN_VOCAB)
    }

    pub fn continuation_prefix(&self) -> &str {
        &self.continuation_prefix
    }

    pub fn len(&self) -> usize {
        self.initial.len() + self.continuation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_empty() && self.continuation.is_empty()
    }

    /// Entries in vocabulary-file form, sorted.
    pub fn entries(&self) -> Vec<String> {
        let mut out: BTreeSet<String> = self.initial.iter().cloned().collect();
        out.extend(
            self.continuation
                .iter()
                .map(|p| format!("{}{}", self.continuation_prefix, p)),
        );
        out.into_iter().collect()
    }

    /// Tokenizes already-normalized text word by word.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for word in text.split_whitespace() {
            self.tokenize_word(word, &mut out);
        }
        out
    }

    fn tokenize_word(&self, word: &str, out: &mut Vec<String>) {
        let chars: Vec<char> = word.chars().collect();
        let mut start = 0;
        while start < chars.len() {
            let table = if start == 0 {
                &self.initial
            } else {
                &self.continuation
            };
            let longest = (start + 1..=chars.len().min(start + self.max_piece_chars))
                .rev()
                .find_map(|end| {
                    let piece: String = chars[start..end].iter().collect();
                    table.contains(&piece).then_some((end, piece))
                });
            match longest {
                Some((end, piece)) => {
                    if start == 0 {
                        out.push(piece);
                    } else {
                        out.push(format!("{}{}", self.continuation_prefix, piece));
                    }
                    start = end;
                }
                None => {
                    out.push(UNK_TOKEN.to_owned());
                    start += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn headache_vocab() -> SubwordVocab {
        SubwordVocab::new(["head", "##ache", "pain"], "##")
    }

    #[test]
    fn greedy_longest_match() {
        let v = headache_vocab();
        assert_eq!(v.tokenize("headache"), ["head", "##ache"]);
        assert_eq!(v.tokenize("pain"), ["pain"]);
        assert!(v.tokenize("").is_empty());
        assert_eq!(v.tokenize("head pain"), ["head", "pain"]);
    }

    #[test]
    fn character_fallback_and_unknowns() {
        let v = headache_vocab();
        // 'x' is not covered by any entry
        assert_eq!(v.tokenize("headx"), ["head", "<unk>"]);
        assert_eq!(v.tokenize("aches"), ["a", "##c", "##h", "##e", "<unk>"]);
        assert_eq!(v.tokenize("painache"), ["pain", "##ache"]);
    }

    #[test]
    fn vocab_file_parsing() {
        let v = SubwordVocab::from_vocab_text("[PAD]\n[UNK]\n<unk>\nheart\n##itis\n\nvalve\r\n");
        assert_eq!(v.tokenize("heartitis"), ["heart", "##itis"]);
        assert_eq!(v.tokenize("carditis"), ["<unk>", "##a", "##r", "<unk>", "##itis"]);
        assert_eq!(v.tokenize("valve"), ["valve"]);
        assert!(!v.entries().iter().any(|e| e.contains('[')));
    }

    #[test]
    fn builtin_covers_lowercase_ascii() {
        let v = SubwordVocab::builtin();
        for c in 'a'..='z' {
            assert_ne!(v.tokenize(&c.to_string()), [UNK_TOKEN]);
        }
        for c in '0'..='9' {
            assert_ne!(v.tokenize(&c.to_string()), [UNK_TOKEN]);
        }
    }
}
