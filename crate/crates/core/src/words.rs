//! Free-group words, free and cyclic reduction, and length-lexicographic
//! enumeration of reduced words.

use std::fmt;

/// A generator of a presentation: its position and its declared name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub index: usize,
    pub name: String,
}

/// One letter of a free-group word, packed as `2 * generator + inverse_bit`.
///
/// The packed code doubles as the column index of a coset table, and its
/// natural order is the enumeration order `x1 < x1^-1 < x2 < x2^-1 < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn positive(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn negative(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    pub fn from_code(code: u32) -> Self {
        Letter(code)
    }

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn column(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from raw letters, freely reducing them.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        reduce(letters)
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter::positive(index)])
    }

    /// Builds a word from signed generator numbers: `k > 0` is generator
    /// `k - 1`, `k < 0` its inverse.
    ///
    /// # Panics
    ///
    /// Panics on a zero entry.
    pub fn from_signed(letters: &[i32]) -> Self {
        reduce(letters.iter().map(|&k| {
            assert!(k != 0, "signed letter 0 is not a generator");
            Letter::new(k.unsigned_abs() as usize - 1, k < 0)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Free product `self * other`, reduced at the junction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// `self^n`; negative `n` powers the inverse.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// The commutator `u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Exponent sum of each generator, for `ngens` generators.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut sums = vec![0; ngens];
        for l in &self.0 {
            sums[l.generator()] += l.sign();
        }
        sums
    }

    /// Rewrites each letter through `f`, which maps a generator index to a
    /// word; inverse letters map to inverse images.
    pub fn substitute<F: Fn(usize) -> Word>(&self, f: F) -> Word {
        let mut out = Vec::new();
        for l in &self.0 {
            let image = f(l.generator());
            if l.is_inverse() {
                for &m in image.0.iter().rev() {
                    push_reduced(&mut out, m.inverse());
                }
            } else {
                for &m in &image.0 {
                    push_reduced(&mut out, m);
                }
            }
        }
        Word(out)
    }
}

impl From<Word> for Vec<Letter> {
    fn from(w: Word) -> Self {
        w.0
    }
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// Freely reduces a raw letter sequence.
pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out = Vec::new();
    for l in letters {
        push_reduced(&mut out, l);
    }
    Word(out)
}

/// Strips a conjugating prefix/suffix pair so that the first and last
/// letters are not mutually inverse.
pub fn cyclic_reduce(w: &Word) -> Word {
    let letters = w.letters();
    let (mut lo, mut hi) = (0, letters.len());
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    Word(letters[lo..hi].to_vec())
}

/// Canonical representative of the cyclic word of `w` up to rotation and
/// inversion. Two cyclically reduced relators with the same key have the
/// same normal closure.
pub fn cyclic_class_key(w: &Word) -> Vec<u32> {
    let w = cyclic_reduce(w);
    let fwd: Vec<u32> = w.letters().iter().map(|l| l.code()).collect();
    let inv: Vec<u32> = w.inverse().letters().iter().map(|l| l.code()).collect();
    let a = least_rotation(&fwd);
    let b = least_rotation(&inv);
    a.min(b)
}

fn least_rotation(s: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut best = 0;
    for k in 1..n {
        let cand = s[k..].iter().chain(&s[..k]);
        let cur = s[best..].iter().chain(&s[..best]);
        if cand.lt(cur) {
            best = k;
        }
    }
    s[best..].iter().chain(&s[..best]).copied().collect()
}

/// All freely reduced words of length at most `bound` over `ngens`
/// generators, in length-lexicographic order starting with the identity.
pub fn enumerate_words(ngens: usize, bound: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    if ngens == 0 {
        return out;
    }
    let mut layer_start = 0;
    for _ in 0..bound {
        let layer_end = out.len();
        for i in layer_start..layer_end {
            for code in 0..(2 * ngens) as u32 {
                let l = Letter::from_code(code);
                let prev = &out[i];
                if prev.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut next = prev.0.clone();
                next.push(l);
                out.push(Word(next));
            }
        }
        layer_start = layer_end;
    }
    out
}

/// Displays a word with the given generator names, grouping runs into
/// powers (`x^3`, `y^-1`). The identity prints as `1`.
pub struct WordDisplay<'a> {
    pub word: &'a Word,
    pub names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.word.letters();
        if letters.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let l = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let name = &self.names[l.generator()];
            let exp = run as i64 * l.sign();
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
            i += run;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &[i32]) -> Word {
        Word::from_signed(s)
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w(&[1, -1]), Word::identity());
        assert_eq!(w(&[1, 2, -2, 1]), w(&[1, 1]));
        assert_eq!(w(&[1, 2, -1]).len(), 3);
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(cyclic_reduce(&w(&[1, 2, -1])), w(&[2]));
        let comm = w(&[1, 2, -1, -2]);
        assert_eq!(cyclic_reduce(&comm), comm);
        assert_eq!(cyclic_reduce(&Word::identity()), Word::identity());
        assert_eq!(cyclic_reduce(&w(&[1, 2, 2, -1])), w(&[2, 2]));
    }

    #[test]
    fn enumerate_small() {
        let one = enumerate_words(1, 1);
        assert_eq!(one, vec![Word::identity(), w(&[1]), w(&[-1])]);
        let two = enumerate_words(2, 1);
        assert_eq!(
            two,
            vec![Word::identity(), w(&[1]), w(&[-1]), w(&[2]), w(&[-2])]
        );
        assert_eq!(enumerate_words(2, 2).len(), 17);
    }

    #[test]
    fn enumeration_counts_match_brute_force() {
        // Brute force: all sequences over 2d letters, keep the reduced ones.
        for d in 1..=3usize {
            for len in 1..=5u32 {
                let alphabet = 2 * d;
                let mut count = 0usize;
                for mut n in 0..alphabet.pow(len) {
                    let mut seq = Vec::new();
                    for _ in 0..len {
                        seq.push(Letter::from_code((n % alphabet) as u32));
                        n /= alphabet;
                    }
                    if seq.windows(2).all(|p| p[0] != p[1].inverse()) {
                        count += 1;
                    }
                }
                let words = enumerate_words(d, len as usize);
                let exact = words.iter().filter(|x| x.len() == len as usize).count();
                assert_eq!(exact, count, "d={d} len={len}");
                assert_eq!(count, 2 * d * (2 * d - 1).pow(len - 1));
            }
        }
    }

    #[test]
    fn enumeration_is_length_lex() {
        let words = enumerate_words(2, 4);
        for pair in words.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert!(a.len() < b.len() || (a.len() == b.len() && a < b));
        }
    }

    #[test]
    fn class_key_identifies_rotations_and_inverses() {
        let r = w(&[1, 1, 2, -1, 2]);
        let rot = w(&[2, -1, 2, 1, 1]);
        assert_eq!(cyclic_class_key(&r), cyclic_class_key(&rot));
        assert_eq!(cyclic_class_key(&r), cyclic_class_key(&r.inverse()));
        assert_ne!(cyclic_class_key(&r), cyclic_class_key(&w(&[1, 2, 1, -1, 2])));
    }

    #[test]
    fn display_groups_runs() {
        let names = vec!["x".to_string(), "y".to_string()];
        let word = w(&[1, 1, 1, -2, 1]);
        assert_eq!(WordDisplay { word: &word, names: &names }.to_string(), "x^3 y^-1 x");
    }
}
