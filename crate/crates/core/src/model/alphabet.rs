//! Alphabets and letters.
//!
//! An alphabet is either an explicit list of named letters or generated from
//! a list of named bits, in which case the letters are all bit evaluations.
//! For bit alphabets the first declared bit is the most significant one, so
//! `r1=1,r2=0` over bits `[r1, r2]` has index `0b10 = 2`.

use std::fmt;

use crate::error::Error;

/// Index of a letter within its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite alphabet with symbolic letter names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    bits: Vec<String>,
    letters: Vec<String>,
}

impl Alphabet {
    /// Alphabet of all evaluations of the given bits.
    pub fn from_bits<S: Into<String>>(bits: Vec<S>) -> Self {
        let bits: Vec<String> = bits.into_iter().map(Into::into).collect();
        let n = 1usize << bits.len();
        let letters = (0..n)
            .map(|idx| {
                bits.iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let v = (idx >> (bits.len() - 1 - i)) & 1;
                        format!("{b}={v}")
                    })
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        Alphabet { bits, letters }
    }

    /// Alphabet of explicitly named letters.
    pub fn from_letters<S: Into<String>>(letters: Vec<S>) -> Self {
        Alphabet {
            bits: Vec::new(),
            letters: letters.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Bit names, empty for enumerated alphabets.
    pub fn bits(&self) -> &[String] {
        &self.bits
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letters
    }

    pub fn letter_name(&self, letter: Letter) -> &str {
        &self.letters[letter.0]
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.0 < self.letters.len()
    }

    /// Value of the `bit`-th declared bit in `letter`.
    pub fn bit_value(&self, letter: Letter, bit: usize) -> bool {
        debug_assert!(!self.bits.is_empty());
        (letter.0 >> (self.bits.len() - 1 - bit)) & 1 == 1
    }

    /// The letter with the given bit evaluation.
    pub fn letter_of_bits(&self, values: &[bool]) -> Letter {
        debug_assert_eq!(values.len(), self.bits.len());
        let mut idx = 0usize;
        for &v in values {
            idx = (idx << 1) | usize::from(v);
        }
        Letter(idx)
    }

    pub fn letter_by_name(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|n| n == name).map(Letter)
    }

    /// Concatenation of two bit alphabets; bit names must be disjoint.
    pub fn concat(&self, other: &Alphabet) -> Result<Alphabet, Error> {
        if self.bits.is_empty() || other.bits.is_empty() {
            return Err(Error::AlphabetMismatch(
                "only bit-structured alphabets can be composed".into(),
            ));
        }
        for b in &other.bits {
            if self.bits.contains(b) {
                return Err(Error::AlphabetMismatch(format!(
                    "bit `{b}` declared in both alphabets"
                )));
            }
        }
        let mut bits = self.bits.clone();
        bits.extend(other.bits.iter().cloned());
        Ok(Alphabet::from_bits(bits))
    }

    /// Split a letter of `self.concat(other)` back into component letters.
    /// `self` is the high component.
    pub fn split_concat(&self, other: &Alphabet, letter: Letter) -> (Letter, Letter) {
        let low = letter.0 & (other.len() - 1);
        let high = letter.0 >> other.bits.len();
        (Letter(high), Letter(low))
    }
}

/// Joint input/output alphabet of a specification automaton. A joint letter
/// pairs an input letter with an output letter; the index is row-major with
/// the input component outermost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointAlphabet {
    pub input: Alphabet,
    pub output: Alphabet,
}

impl JointAlphabet {
    pub fn new(input: Alphabet, output: Alphabet) -> Self {
        JointAlphabet { input, output }
    }

    pub fn len(&self) -> usize {
        self.input.len() * self.output.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty() || self.output.is_empty()
    }

    pub fn joint(&self, input: Letter, output: Letter) -> Letter {
        Letter(input.0 * self.output.len() + output.0)
    }

    pub fn split(&self, joint: Letter) -> (Letter, Letter) {
        (
            Letter(joint.0 / self.output.len()),
            Letter(joint.0 % self.output.len()),
        )
    }

    pub fn joint_name(&self, joint: Letter) -> String {
        let (l, a) = self.split(joint);
        format!(
            "({}, {})",
            self.input.letter_name(l),
            self.output.letter_name(a)
        )
    }
}
