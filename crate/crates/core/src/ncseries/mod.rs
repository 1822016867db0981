//! Words over a finite ordered alphabet and degree-truncated noncommutative
//! series.
//!
//! Every [`Series`] carries its alphabet and a hard truncation degree `N`;
//! products silently drop words longer than `N`. Terms are stored sparsely in
//! a map keyed by [`Word`], whose `Ord` is the graded lexicographic order, so
//! iteration is deterministic and the last stored word is the leading
//! monomial.

mod series;
mod shuffle;
mod word;

pub use series::{adjoint_multiplier_apply, star_letter_series, AlphaVector, Series};
pub use shuffle::shuffle_words;
pub use word::{graded_lex_compare, Alphabet, Word};
