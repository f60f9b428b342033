use super::{DurationLabel, Inventory, Lexicon};
use crate::{Error, Result};

/// One phone of an utterance. `word` is `(word index, position in word,
/// word length)`; silences carry `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneToken {
    pub id: usize,
    pub word: Option<(usize, usize, usize)>,
}

/// Phone sequence bracketed by silences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneSeq {
    pub tokens: Vec<PhoneToken>,
    pub n_words: usize,
}

impl PhoneSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn symbols<'a>(&self, inventory: &'a Inventory) -> Vec<&'a str> {
        self.tokens.iter().map(|t| inventory.symbol(t.id)).collect()
    }

    /// Durations from a label file, checking the phone sequences agree.
    pub fn durations_from_labels(
        &self,
        inventory: &Inventory,
        labels: &[DurationLabel],
    ) -> Result<Vec<usize>> {
        let ours = self.symbols(inventory);
        let theirs: Vec<&str> = labels.iter().map(|l| l.phone.as_str()).collect();
        if ours != theirs {
            return Err(Error::invalid(format!(
                "label phones {theirs:?} do not match text phones {ours:?}"
            )));
        }
        Ok(labels.iter().map(|l| l.frames).collect())
    }
}

enum Item {
    Word(String),
    Pause,
}

fn tokenize(text: &str) -> Vec<Item> {
    let mut items = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '\'' {
            word.extend(ch.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            items.push(Item::Word(std::mem::take(&mut word)));
        }
        if !ch.is_whitespace() {
            items.push(Item::Pause);
        }
    }
    if !word.is_empty() {
        items.push(Item::Word(word));
    }
    items
}

/// Lowercase, split on whitespace and punctuation, look words up in the
/// lexicon (spelling out unknown words letter by letter), and put silence at
/// the utterance edges and at punctuation.
pub fn text_to_phones(text: &str, lexicon: &Lexicon, inventory: &Inventory) -> Result<PhoneSeq> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::invalid("empty text"));
    }
    let sil = inventory.silence();
    let mut tokens = vec![PhoneToken { id: sil, word: None }];
    let mut n_words = 0;
    for item in tokenize(text) {
        match item {
            Item::Pause => {
                if tokens.last().map(|t| t.id) != Some(sil) {
                    tokens.push(PhoneToken { id: sil, word: None });
                }
            }
            Item::Word(w) => {
                let symbols: Vec<String> = match lexicon.get(&w) {
                    Some(p) => p.to_vec(),
                    None => w
                        .chars()
                        .filter(|c| *c != '\'')
                        .map(|c| c.to_uppercase().to_string())
                        .collect(),
                };
                let ids = symbols
                    .iter()
                    .map(|s| {
                        inventory
                            .id(s)
                            .ok_or_else(|| Error::invalid(format!("phone {s} (word {w:?}) is not in the inventory")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if ids.is_empty() {
                    continue;
                }
                let len = ids.len();
                tokens.extend(ids.into_iter().enumerate().map(|(pos, id)| PhoneToken {
                    id,
                    word: Some((n_words, pos, len)),
                }));
                n_words += 1;
            }
        }
    }
    if tokens.last().map(|t| t.id) != Some(sil) {
        tokens.push(PhoneToken { id: sil, word: None });
    }
    Ok(PhoneSeq { tokens, n_words })
}
