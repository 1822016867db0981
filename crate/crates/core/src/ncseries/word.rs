use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

/// Ordered finite alphabet. The position of a letter is its rank in the
/// well-ordering used by the graded lexicographic order.
#[derive(Clone)]
pub struct Alphabet {
    letters: Arc<[String]>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = names.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".to_string()));
        }
        if letters.len() > 256 {
            return Err(Error::InvalidAlphabet("more than 256 letters".to_string()));
        }
        for (i, a) in letters.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidAlphabet("empty letter name".to_string()));
            }
            if letters[..i].contains(a) {
                return Err(Error::InvalidAlphabet(alloc::format!("duplicate letter `{a}`")));
            }
        }
        Ok(Alphabet { letters: letters.into() })
    }

    /// `x0, x1, ..., x{n-1}`.
    pub fn indexed(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| alloc::format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.letters.get(index).map(String::as_str)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.letters.iter().map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<Word> {
        names
            .iter()
            .map(|n| self.index_of(n.as_ref()).map(|i| i as u8))
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }

    pub fn letter_names(&self, w: &Word) -> Vec<&str> {
        w.0.iter().map(|&i| self.letters[i as usize].as_str()).collect()
    }

    pub fn validate(&self, w: &Word) -> Result<()> {
        match w.0.iter().find(|&&i| i as usize >= self.len()) {
            Some(&i) => Err(Error::LetterOutOfRange {
                index: i as usize,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }

    /// Graded lexicographic comparison of two words over this alphabet.
    pub fn compare(&self, u: &Word, v: &Word) -> Result<Ordering> {
        self.validate(u)?;
        self.validate(v)?;
        Ok(u.cmp(v))
    }

    pub fn display_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        self.letter_names(w).join("")
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.letters, &other.letters) || self.letters == other.letters
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.letters.iter()).finish()
    }
}

/// Finite sequence of letter indices; the empty word is the unit of the free
/// monoid. `Ord` is graded lexicographic: shorter words first, then the first
/// differing letter decides.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(index: usize) -> Self {
        Word(alloc::vec![index as u8])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Word(indices.into_iter().map(|i| i as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&i| i as usize)
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().map(|&i| i as usize)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `x w` for a letter `x`.
    pub fn prepend(&self, letter: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(letter as u8);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// `w x` for a letter `x`.
    pub fn append(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter as u8);
        Word(v)
    }

    /// `w` with its first letter removed, if that letter is `letter`.
    pub fn strip_first(&self, letter: usize) -> Option<Word> {
        match self.0.split_first() {
            Some((&x, rest)) if x as usize == letter => Some(Word(rest.to_vec())),
            _ => None,
        }
    }

    /// Number of occurrences of `letter`.
    pub fn count(&self, letter: usize) -> usize {
        self.0.iter().filter(|&&x| x as usize == letter).count()
    }

    /// All words of length exactly `len` over `n` letters, in graded-lex order.
    pub fn all_of_length(n: usize, len: usize) -> Vec<Word> {
        let mut out = alloc::vec![Word::empty()];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|w| (0..n).map(move |x| w.append(x)))
                .collect();
        }
        out
    }

    /// All words of length at most `max_len` over `n` letters.
    pub fn all_up_to(n: usize, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|l| Word::all_of_length(n, l)).collect()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Graded lexicographic comparison: `u < v` iff `|u| < |v|`, or the lengths
/// agree and the first differing letter of `u` is smaller.
pub fn graded_lex_compare(alphabet: &Alphabet, u: &Word, v: &Word) -> Result<Ordering> {
    alphabet.compare(u, v)
}
