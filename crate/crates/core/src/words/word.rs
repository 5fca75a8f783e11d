use std::fmt;

use super::WordsError;

/// Letters longer than this are refused; images under long compositions of
/// automorphisms can grow exponentially.
pub const MAX_WORD_LEN: usize = 1_000_000;

/// Freely reduced word in the generators `x_1, ..., x_n`. A letter `g > 0`
/// stands for `x_g`, `-g` for its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn generator(g: i32) -> Word {
        assert!(g != 0, "generator index must be nonzero");
        Word(vec![g])
    }

    /// Freely reduces the given letter sequence.
    pub fn from_letters(letters: &[i32]) -> Result<Word, WordsError> {
        let mut w = Word::identity();
        w.extend(letters)?;
        Ok(w)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends letters with free cancellation at the junction.
    pub fn extend(&mut self, letters: &[i32]) -> Result<(), WordsError> {
        for &l in letters {
            if l == 0 {
                return Err(WordsError::Letter(0));
            }
            if self.0.last() == Some(&-l) {
                self.0.pop();
            } else {
                self.0.push(l);
                if self.0.len() > MAX_WORD_LEN {
                    return Err(WordsError::TooLong(MAX_WORD_LEN));
                }
            }
        }
        Ok(())
    }

    pub fn mul(&self, other: &Word) -> Result<Word, WordsError> {
        let mut w = self.clone();
        w.extend(&other.0)?;
        Ok(w)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|&l| if l > 0 { format!("x{l}") } else { format!("x{}^-1", -l) }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_cancellation() {
        let w = Word::from_letters(&[1, 2, -2, -1, 3]).unwrap();
        assert_eq!(w.letters(), &[3]);
        assert!(Word::from_letters(&[1, -1]).unwrap().is_empty());
    }

    #[test]
    fn inverse_cancels() {
        let w = Word::from_letters(&[1, 2, -3, 2]).unwrap();
        assert!(w.mul(&w.inverse()).unwrap().is_empty());
    }

    #[test]
    fn zero_letter_rejected() {
        assert_eq!(Word::from_letters(&[1, 0]), Err(WordsError::Letter(0)));
    }

    #[test]
    fn length_cap() {
        let big = vec![1; MAX_WORD_LEN + 1];
        assert_eq!(Word::from_letters(&big), Err(WordsError::TooLong(MAX_WORD_LEN)));
    }
}
