use std::collections::BTreeMap;
use std::path::Path;

use crate::{Error, Result};

/// Pronunciation dictionary: lowercase word -> phone symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    /// Parse `word<TAB>phone phone ...` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, phones) = line.split_once('\t').ok_or_else(|| {
                Error::Config(format!("lexicon line {}: missing TAB", lineno + 1))
            })?;
            let phones: Vec<String> = phones.split_whitespace().map(str::to_string).collect();
            if phones.is_empty() {
                return Err(Error::Config(format!(
                    "lexicon line {}: no phones for {word}",
                    lineno + 1
                )));
            }
            entries.insert(word.trim().to_lowercase(), phones);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, word: &str, phones: Vec<String>) {
        self.entries.insert(word.to_lowercase(), phones);
    }

    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(w, p)| format!("{w}\t{}\n", p.join(" ")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let lex = Lexicon::parse("a\tAX\nHello\tH EH L OW\n").unwrap();
        assert_eq!(lex.get("hello").unwrap(), &["H", "EH", "L", "OW"]);
        assert_eq!(Lexicon::parse(&lex.to_text()).unwrap(), lex);
        assert!(Lexicon::parse("a AX\n").is_err());
    }
}
