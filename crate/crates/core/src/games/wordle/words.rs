use std::collections::HashSet;
use std::io;
use std::path::Path;

/// Target words plus the wider list of accepted guesses.
#[derive(Debug, Clone, Default)]
pub struct WordLists {
    pub targets: Vec<String>,
    pub allowed: Vec<String>,
    accepted: HashSet<String>,
}

impl WordLists {
    pub fn from_words(targets: Vec<String>, allowed: Vec<String>) -> Self {
        let accepted = targets.iter().chain(allowed.iter()).cloned().collect();
        WordLists { targets, allowed, accepted }
    }

    /// Reads `possible_words.txt` and `allowed_words.txt` from `dir`.
    pub fn load(dir: &Path) -> io::Result<Self> {
        let targets = read_list(&dir.join("possible_words.txt"))?;
        let allowed = read_list(&dir.join("allowed_words.txt"))?;
        Ok(Self::from_words(targets, allowed))
    }

    pub fn is_allowed(&self, word: &str) -> bool {
        self.accepted.contains(word)
    }
}

pub fn read_list(path: &Path) -> io::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect())
}
