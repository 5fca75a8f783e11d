use super::word::Word;
use super::WordsError;

/// Automorphism of the free group of rank `n`, stored as generator images
/// together with the images of its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAut {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

fn substitute(images: &[Word], w: &Word) -> Result<Word, WordsError> {
    let mut out = Word::identity();
    for &l in w.letters() {
        let g = l.unsigned_abs() as usize;
        if g == 0 || g > images.len() {
            return Err(WordsError::Letter(l));
        }
        if l > 0 {
            out.extend(images[g - 1].letters())?;
        } else {
            out.extend(images[g - 1].inverse().letters())?;
        }
    }
    Ok(out)
}

impl FreeAut {
    pub fn identity(rank: usize) -> FreeAut {
        let images: Vec<Word> = (1..=rank as i32).map(Word::generator).collect();
        FreeAut { rank, inverse_images: images.clone(), images }
    }

    /// Builds an automorphism from images and claimed inverse images; the
    /// inverse is checked on generators in both orders.
    pub fn new(rank: usize, images: Vec<Word>, inverse_images: Vec<Word>) -> Result<FreeAut, WordsError> {
        if images.len() != rank || inverse_images.len() != rank {
            return Err(WordsError::Rank { expected: rank, got: images.len().min(inverse_images.len()) });
        }
        let a = FreeAut { rank, images, inverse_images };
        for g in 1..=rank as i32 {
            let x = Word::generator(g);
            if a.apply(&a.apply_inverse(&x)?)? != x || a.apply_inverse(&a.apply(&x)?)? != x {
                return Err(WordsError::NotInvertible);
            }
        }
        Ok(a)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, g: usize) -> &Word {
        &self.images[g - 1]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordsError> {
        substitute(&self.images, w)
    }

    pub fn apply_inverse(&self, w: &Word) -> Result<Word, WordsError> {
        substitute(&self.inverse_images, w)
    }

    pub fn inverse(&self) -> FreeAut {
        FreeAut { rank: self.rank, images: self.inverse_images.clone(), inverse_images: self.images.clone() }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeAut) -> Result<FreeAut, WordsError> {
        if self.rank != other.rank {
            return Err(WordsError::Rank { expected: self.rank, got: other.rank });
        }
        let images = other.images.iter().map(|w| self.apply(w)).collect::<Result<_, _>>()?;
        let inverse_images = self.inverse_images.iter().map(|w| other.apply_inverse(w)).collect::<Result<_, _>>()?;
        Ok(FreeAut { rank: self.rank, images, inverse_images })
    }

    /// Inner automorphism `x ↦ c x c⁻¹`.
    pub fn conjugation(rank: usize, c: &Word) -> Result<FreeAut, WordsError> {
        let conj = |c: &Word, g: i32| c.mul(&Word::generator(g))?.mul(&c.inverse());
        let images = (1..=rank as i32).map(|g| conj(c, g)).collect::<Result<_, _>>()?;
        let ci = c.inverse();
        let inverse_images = (1..=rank as i32).map(|g| conj(&ci, g)).collect::<Result<_, _>>()?;
        Ok(FreeAut { rank, images, inverse_images })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[i32]) -> Word {
        Word::from_letters(l).unwrap()
    }

    #[test]
    fn checked_inverse() {
        // x1 -> x1 x2, x2 -> x2 with inverse x1 -> x1 x2^-1
        let a = FreeAut::new(2, vec![w(&[1, 2]), w(&[2])], vec![w(&[1, -2]), w(&[2])]).unwrap();
        assert_eq!(a.compose(&a.inverse()).unwrap(), FreeAut::identity(2));
        assert_eq!(FreeAut::new(2, vec![w(&[1, 2]), w(&[2])], vec![w(&[1]), w(&[2])]), Err(WordsError::NotInvertible));
    }

    #[test]
    fn conjugation_composes() {
        let c = w(&[1, 2]);
        let a = FreeAut::conjugation(3, &c).unwrap();
        let b = FreeAut::conjugation(3, &c.inverse()).unwrap();
        assert_eq!(a.compose(&b).unwrap(), FreeAut::identity(3));
    }
}
