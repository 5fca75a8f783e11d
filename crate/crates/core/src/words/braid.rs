use std::fmt;

use serde::Serialize;

use super::aut::FreeAut;
use super::word::Word;
use super::WordsError;

/// Braid word on `strands` strands; letter `i > 0` is `σ_i`, `-i` is `σ_i⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidStats {
    pub exponent_sum: i64,
    /// `permutation[i]` is the final position of the strand starting at
    /// position `i` (0-based).
    pub permutation: Vec<usize>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<BraidWord, WordsError> {
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(WordsError::BraidIndex { letter: l, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> BraidWord {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, WordsError> {
        if self.strands != other.strands {
            return Err(WordsError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    pub fn pow(&self, n: usize) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.repeat(n) }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// Word with every letter sign flipped (the mirror braid).
    pub fn mirror(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().map(|l| -l).collect() }
    }

    /// Cyclic rotation starting at letter `k`.
    pub fn rotate(&self, k: usize) -> BraidWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.letters.len());
        }
        BraidWord { strands: self.strands, letters }
    }

    pub fn stats(&self) -> BraidStats {
        braid_stats(self)
    }

    /// Parses strings like `"s1 s2 s1 s2^-1"` or `"(s1 s2)^6 s1^2"`; the
    /// grammar is documented in `docs/grammar.md`.
    pub fn parse(src: &str, strands: usize) -> Result<BraidWord, WordsError> {
        let toks = tokenize(src)?;
        let mut pos = 0;
        let letters = parse_seq(&toks, &mut pos, 0)?;
        if pos != toks.len() {
            return Err(WordsError::Parse(format!("unbalanced ')' at token {pos}")));
        }
        BraidWord::new(strands, letters)
    }

    /// Greedy power notation, e.g. `(s1 s2)^6 s1`. At each position the
    /// repeated block covering the most letters wins, shorter blocks on ties.
    /// Parses back to the same letter sequence.
    pub fn factored(&self) -> String {
        let w = &self.letters;
        if w.is_empty() {
            return "e".into();
        }
        let gen = |l: i32| if l > 0 { format!("s{l}") } else { format!("s{}^-1", -l) };
        let mut parts = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let (mut best_len, mut best_reps) = (1, 1);
            for len in 1..=(w.len() - i) / 2 {
                let block = &w[i..i + len];
                let mut reps = 1;
                while i + (reps + 1) * len <= w.len() && &w[i + reps * len..i + (reps + 1) * len] == block {
                    reps += 1;
                }
                if reps >= 2 && reps * len > best_len * best_reps {
                    (best_len, best_reps) = (len, reps);
                }
            }
            let block = &w[i..i + best_len];
            parts.push(match (best_len, best_reps) {
                (1, 1) => gen(block[0]),
                (1, r) if block[0] > 0 => format!("s{}^{r}", block[0]),
                (1, r) => format!("s{}^-{r}", -block[0]),
                (_, r) => format!("({})^{r}", block.iter().map(|&l| gen(l)).collect::<Vec<_>>().join(" ")),
            });
            i += best_len * best_reps;
        }
        parts.join(" ")
    }

    /// Parses a word and infers the strand count from the largest index.
    pub fn parse_infer(src: &str) -> Result<BraidWord, WordsError> {
        let toks = tokenize(src)?;
        let mut pos = 0;
        let letters = parse_seq(&toks, &mut pos, 0)?;
        if pos != toks.len() {
            return Err(WordsError::Parse(format!("unbalanced ')' at token {pos}")));
        }
        let strands = letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0) + 1;
        BraidWord::new(strands.max(2), letters)
    }
}

impl fmt::Display for BraidWord {
    /// Run-length form, e.g. `s1^2 s2 s1^-1`; the empty word prints as `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i32 * l.signum();
            parts.push(if run == 1 { format!("s{}", l.abs()) } else { format!("s{}^{}", l.abs(), run) });
            i = j;
        }
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Gen(i32),
    Int(i32),
    Caret,
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, WordsError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let read_int = |i: &mut usize| -> Result<i32, WordsError> {
        let start = *i;
        if *i < chars.len() && chars[*i] == '-' {
            *i += 1;
        }
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        let text: String = chars[start..*i].iter().collect();
        text.parse().map_err(|_| WordsError::Parse(format!("bad integer '{text}'")))
    };
    while i < chars.len() {
        match chars[i] {
            c if c.is_whitespace() || c == '*' || c == '.' => i += 1,
            's' | 'σ' => {
                i += 1;
                let g = read_int(&mut i)?;
                out.push(Tok::Gen(g));
            }
            '^' => {
                i += 1;
                out.push(Tok::Caret);
            }
            '(' => {
                i += 1;
                out.push(Tok::Open);
            }
            ')' => {
                i += 1;
                out.push(Tok::Close);
            }
            c if c == '-' || c.is_ascii_digit() => {
                let n = read_int(&mut i)?;
                out.push(Tok::Int(n));
            }
            'e' if out.is_empty() && src.trim() == "e" => i += 1,
            c => return Err(WordsError::Parse(format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

fn parse_seq(toks: &[Tok], pos: &mut usize, depth: usize) -> Result<Vec<i32>, WordsError> {
    let mut out = Vec::new();
    while *pos < toks.len() {
        let base = match &toks[*pos] {
            Tok::Gen(g) => {
                *pos += 1;
                if *g <= 0 {
                    return Err(WordsError::Parse(format!("generator index must be positive, got {g}")));
                }
                vec![*g]
            }
            Tok::Open => {
                *pos += 1;
                let inner = parse_seq(toks, pos, depth + 1)?;
                if toks.get(*pos) != Some(&Tok::Close) {
                    return Err(WordsError::Parse("missing ')'".into()));
                }
                *pos += 1;
                inner
            }
            Tok::Close if depth > 0 => return Ok(out),
            t => return Err(WordsError::Parse(format!("unexpected token {t:?}"))),
        };
        let mut exp = 1;
        if toks.get(*pos) == Some(&Tok::Caret) {
            match toks.get(*pos + 1) {
                Some(Tok::Int(n)) => {
                    exp = *n;
                    *pos += 2;
                }
                _ => return Err(WordsError::Parse("expected integer exponent".into())),
            }
        }
        let unit: Vec<i32> = if exp < 0 { base.iter().rev().map(|l| -l).collect() } else { base };
        for _ in 0..exp.unsigned_abs() {
            out.extend_from_slice(&unit);
        }
    }
    if depth > 0 {
        return Err(WordsError::Parse("missing ')'".into()));
    }
    Ok(out)
}

fn artin_generator(strands: usize, letter: i32) -> FreeAut {
    let i = letter.unsigned_abs() as usize;
    let mut images: Vec<Word> = (1..=strands as i32).map(Word::generator).collect();
    let mut inverse = images.clone();
    let xi = i as i32;
    let xj = xi + 1;
    // σ_i: x_i ↦ x_i x_{i+1} x_i⁻¹, x_{i+1} ↦ x_i
    let fwd_i = Word::from_letters(&[xi, xj, -xi]).expect("short word");
    let fwd_j = Word::generator(xi);
    // σ_i⁻¹: x_i ↦ x_{i+1}, x_{i+1} ↦ x_{i+1}⁻¹ x_i x_{i+1}
    let inv_i = Word::generator(xj);
    let inv_j = Word::from_letters(&[-xj, xi, xj]).expect("short word");
    if letter > 0 {
        images[i - 1] = fwd_i;
        images[i] = fwd_j;
        inverse[i - 1] = inv_i;
        inverse[i] = inv_j;
    } else {
        images[i - 1] = inv_i;
        images[i] = inv_j;
        inverse[i - 1] = fwd_i;
        inverse[i] = fwd_j;
    }
    FreeAut::new(strands, images, inverse).expect("Artin generator is invertible")
}

/// Artin action of the braid on the free group of rank `strands`, with
/// `artin(ab) = artin(a) ∘ artin(b)`.
pub fn artin(b: &BraidWord) -> Result<FreeAut, WordsError> {
    let mut acc = FreeAut::identity(b.strands);
    for &l in &b.letters {
        acc = acc.compose(&artin_generator(b.strands, l))?;
    }
    Ok(acc)
}

/// Equality in the braid group, decided by comparing Artin images.
pub fn braid_equal(a: &BraidWord, b: &BraidWord) -> Result<bool, WordsError> {
    if a.strands != b.strands {
        return Err(WordsError::StrandMismatch(a.strands, b.strands));
    }
    Ok(artin(a)?.images() == artin(b)?.images())
}

pub fn braid_stats(b: &BraidWord) -> BraidStats {
    let exponent_sum = b.letters.iter().map(|l| l.signum() as i64).sum();
    let permutation = (0..b.strands)
        .map(|start| {
            let mut p = start;
            for &l in &b.letters {
                let i = l.unsigned_abs() as usize - 1;
                if p == i {
                    p = i + 1;
                } else if p == i + 1 {
                    p = i;
                }
            }
            p
        })
        .collect();
    BraidStats { exponent_sum, permutation }
}

/// First rotation offset `k` with `a.rotate(k) == b` in the braid group.
pub fn find_cyclic_match(a: &BraidWord, b: &BraidWord) -> Result<Option<usize>, WordsError> {
    if a.strands != b.strands {
        return Err(WordsError::StrandMismatch(a.strands, b.strands));
    }
    let target = artin(b)?;
    for k in 0..a.len().max(1) {
        if artin(&a.rotate(k))?.images() == target.images() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str, n: usize) -> BraidWord {
        BraidWord::parse(s, n).unwrap()
    }

    #[test]
    fn factored_groups_periodic_blocks() {
        assert_eq!(b("s1 s2 s1 s2 s1 s2 s1 s2 s1 s2 s1 s2 s1", 3).factored(), "(s1 s2)^6 s1");
        assert_eq!(b("(s1 s2 s3)^4 s1^2 s3", 4).factored(), "(s1 s2 s3)^4 s1^2 s3");
        assert_eq!(b("s1^-3 s2", 3).factored(), "s1^-3 s2");
        assert_eq!(BraidWord::identity(3).factored(), "e");
        for src in ["s1 s2^-1 s1 s2^-1 s2", "s2 s2 s1 s2 s2 s1", "s1^-1 s2 s1^-1 s2 s1^-1"] {
            let w = b(src, 3);
            assert_eq!(b(&w.factored(), 3), w, "{src}");
        }
    }

    #[test]
    fn empty_word_is_identity() {
        assert_eq!(artin(&BraidWord::identity(3)).unwrap(), FreeAut::identity(3));
    }

    #[test]
    fn braid_relation_b3() {
        assert!(braid_equal(&b("s1 s2 s1", 3), &b("s2 s1 s2", 3)).unwrap());
        assert!(!braid_equal(&b("s1 s2", 3), &b("s2 s1", 3)).unwrap());
        assert!(braid_equal(&b("s1 s1^-1", 3), &BraidWord::identity(3)).unwrap());
    }

    #[test]
    fn full_twist_is_conjugation_by_product() {
        // frozen from brute-force composition: (σ1σ2)^3 acts as x ↦ P x P⁻¹ with P = x1 x2 x3
        let a = artin(&b("(s1 s2)^3", 3)).unwrap();
        let p = Word::from_letters(&[1, 2, 3]).unwrap();
        assert_eq!(a, FreeAut::conjugation(3, &p).unwrap());
    }

    #[test]
    fn central_square_of_full_twist() {
        assert!(braid_equal(&b("(s1 s2)^6 s1", 3), &b("s1 (s1 s2)^6", 3)).unwrap());
    }

    #[test]
    fn stats_examples() {
        let s = b("(s1 s2)^6 s1", 3).stats();
        assert_eq!(s.exponent_sum, 13);
        assert_eq!(s.permutation, vec![1, 0, 2]);
        let e = BraidWord::identity(3).stats();
        assert_eq!(e.exponent_sum, 0);
        assert_eq!(e.permutation, vec![0, 1, 2]);
        let t = b("(s1 s2 s3)^4 s1 s3", 4).stats();
        assert_eq!(t.exponent_sum, 14);
        assert_eq!(t.permutation, vec![1, 0, 3, 2]);
    }

    #[test]
    fn parser_forms() {
        assert_eq!(b("s1 s2 s1 s2^-1", 3).letters(), &[1, 2, 1, -2]);
        assert_eq!(b("(s1 s2)^2 s1^2", 3).letters(), &[1, 2, 1, 2, 1, 1]);
        assert_eq!(b("(s1 s2)^-1", 3).letters(), &[-2, -1]);
        assert_eq!(b("", 3).letters(), &[] as &[i32]);
        assert!(BraidWord::parse("s3", 3).is_err());
        assert!(BraidWord::parse("(s1", 3).is_err());
        assert!(BraidWord::parse("s1)", 3).is_err());
        assert_eq!(BraidWord::parse_infer("s1 s3").unwrap().strands(), 4);
    }

    #[test]
    fn display_run_length() {
        assert_eq!(b("s1 s1 s2 s1^-1 s1^-1", 3).to_string(), "s1^2 s2 s1^-2");
        let w = b("(s1 s2)^2 s1^-3", 3);
        assert_eq!(BraidWord::parse(&w.to_string(), 3).unwrap(), w);
    }

    #[test]
    fn strand_mismatch() {
        assert!(braid_equal(&b("s1", 3), &b("s1", 4)).is_err());
    }

    #[test]
    fn cyclic_match() {
        let target = b("(s1 s2)^6 s1", 3);
        let rotated = target.rotate(5);
        assert!(find_cyclic_match(&rotated, &target).unwrap().is_some());
        assert!(find_cyclic_match(&b("s1 s2", 3), &b("s1^2", 3)).unwrap().is_none());
    }
}
