use std::collections::HashMap;
use std::path::Path;

use crate::{Error, Result};

/// A small ARPAbet-flavoured inventory: one silence symbol, a handful of
/// two-letter vowels, and the 26 letters (used by the spelling fallback).
pub const TOY_INVENTORY: &str = "\
# symbol flags...
sil silence
AX vowel voiced
IY vowel voiced
UW vowel voiced
AA vowel voiced
EH vowel voiced
OW vowel voiced
A vowel voiced
B consonant voiced
C consonant
D consonant voiced
E vowel voiced
F consonant
G consonant voiced
H consonant
I vowel voiced
J consonant voiced
K consonant
L consonant voiced
M consonant voiced
N consonant voiced
O vowel voiced
P consonant
Q consonant
R consonant voiced
S consonant
T consonant
U vowel voiced
V consonant voiced
W consonant voiced
X consonant
Y consonant voiced
Z consonant voiced
";

/// Phone symbols with attribute flags. Flag names are ordered by first
/// appearance in the inventory file; exactly one symbol carries `silence`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inventory {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    flag_names: Vec<String>,
    flags: Vec<Vec<bool>>,
    silence: usize,
}

impl Inventory {
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut index = HashMap::new();
        let mut flag_names: Vec<String> = Vec::new();
        let mut raw_flags: Vec<Vec<String>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let sym = fields.next().expect("non-empty line").to_string();
            if index.insert(sym.clone(), symbols.len()).is_some() {
                return Err(Error::Config(format!(
                    "inventory line {}: duplicate symbol {sym}",
                    lineno + 1
                )));
            }
            let flags: Vec<String> = fields.map(str::to_string).collect();
            for f in &flags {
                if !flag_names.contains(f) {
                    flag_names.push(f.clone());
                }
            }
            symbols.push(sym);
            raw_flags.push(flags);
        }
        if symbols.is_empty() {
            return Err(Error::Config("inventory is empty".into()));
        }
        let silent: Vec<usize> = raw_flags
            .iter()
            .enumerate()
            .filter(|(_, f)| f.iter().any(|x| x == "silence"))
            .map(|(i, _)| i)
            .collect();
        let [silence] = silent[..] else {
            return Err(Error::Config(format!(
                "inventory needs exactly one silence symbol, found {}",
                silent.len()
            )));
        };
        let flags = raw_flags
            .iter()
            .map(|fs| flag_names.iter().map(|n| fs.contains(n)).collect())
            .collect();
        Ok(Self {
            symbols,
            index,
            flag_names,
            flags,
            silence,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn toy() -> Self {
        Self::parse(TOY_INVENTORY).expect("bundled inventory is valid")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.symbols.iter().enumerate() {
            out.push_str(s);
            for (name, &on) in self.flag_names.iter().zip(&self.flags[i]) {
                if on {
                    out.push(' ');
                    out.push_str(name);
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, id: usize) -> &str {
        &self.symbols[id]
    }

    pub fn id(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn silence(&self) -> usize {
        self.silence
    }

    pub fn flag_names(&self) -> &[String] {
        &self.flag_names
    }

    pub fn flags(&self, id: usize) -> &[bool] {
        &self.flags[id]
    }

    pub fn has_flag(&self, id: usize, name: &str) -> bool {
        self.flag_names
            .iter()
            .position(|n| n == name)
            .is_some_and(|k| self.flags[id][k])
    }

    /// Index of the reserved boundary symbol in one-hot blocks.
    pub fn boundary(&self) -> usize {
        self.symbols.len()
    }
}
