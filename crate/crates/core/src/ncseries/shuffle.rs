use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::Word;

/// Shuffle of two words as a multiset of words with multiplicities.
///
/// Dynamic program over prefixes: the shuffles of `u[..i]` and `v[..j]` end
/// either with `u[i-1]` or with `v[j-1]`, which is the recursive definition
/// read from the right.
pub fn shuffle_words(u: &Word, v: &Word) -> BTreeMap<Word, u64> {
    let (a, b) = (u.letters(), v.letters());
    // row[j] holds the shuffles of a[..i] with b[..j] for the current i.
    let mut row: Vec<BTreeMap<Word, u64>> = Vec::with_capacity(b.len() + 1);
    let mut base = BTreeMap::new();
    base.insert(Word::empty(), 1u64);
    row.push(base);
    for j in 1..=b.len() {
        let prev = append_all(&row[j - 1], b[j - 1]);
        row.push(prev);
    }
    for i in 1..=a.len() {
        let mut next: Vec<BTreeMap<Word, u64>> = Vec::with_capacity(b.len() + 1);
        next.push(append_all(&row[0], a[i - 1]));
        for j in 1..=b.len() {
            let mut cell = append_all(&row[j], a[i - 1]);
            for (w, c) in append_all(&next[j - 1], b[j - 1]) {
                *cell.entry(w).or_insert(0) += c;
            }
            next.push(cell);
        }
        row = next;
    }
    row.pop().unwrap_or_default()
}

fn append_all(words: &BTreeMap<Word, u64>, letter: u8) -> BTreeMap<Word, u64> {
    words
        .iter()
        .map(|(w, &c)| (w.append(letter as usize), c))
        .collect()
}
