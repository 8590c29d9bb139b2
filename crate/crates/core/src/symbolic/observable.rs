use super::stream::SymbolStream;
use super::word::Word;
use crate::error::{domain, Result};
use crate::num::{int, Rat};
use num_traits::{One, Zero};

/// Indicator that the stream reads `word` starting `offset - 1` coordinates
/// after the evaluation index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderObservable {
    pub word: Word,
    pub offset: usize,
}

impl CylinderObservable {
    pub fn new(word: Word, offset: usize) -> Result<Self> {
        if offset == 0 {
            return domain("cylinder offsets start at 1");
        }
        Ok(Self { word, offset })
    }

    pub fn at_start(word: Word) -> Self {
        Self { word, offset: 1 }
    }

    /// Number of coordinates (counted from the evaluation index) it reads.
    pub fn depth(&self) -> usize {
        self.offset - 1 + self.word.len()
    }

    /// 1 if x matches the word at coordinates at+offset-1 onward.
    pub fn evaluate(&self, x: &SymbolStream, at: i64) -> Result<u8> {
        let start = int(at + self.offset as i64 - 1);
        let w = x.window(&start, self.word.len())?;
        Ok(u8::from(w == self.word.0))
    }
}

/// A finite linear combination of cylinder indicators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    pub terms: Vec<(Rat, CylinderObservable)>,
}

impl Observable {
    pub fn cylinder(word: Word) -> Self {
        Observable { terms: vec![(Rat::one(), CylinderObservable::at_start(word))] }
    }

    pub fn depth(&self) -> usize {
        self.terms.iter().map(|(_, c)| c.depth()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &SymbolStream, at: i64) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (c, cyl) in &self.terms {
            if cyl.evaluate(x, at)? == 1 {
                acc += c;
            }
        }
        Ok(acc)
    }

    /// Equivalent combination of offset-1 cylinders of length `depth()`:
    /// each indicator is expanded over all extensions.
    pub fn expanded(&self, alphabet: usize) -> Vec<(Rat, Word)> {
        let d = self.depth();
        let mut out: Vec<(Rat, Word)> = Vec::new();
        for (c, cyl) in &self.terms {
            let before = cyl.offset - 1;
            let after = d - before - cyl.word.len();
            let al = super::word::Alphabet::new(alphabet.max(1)).unwrap();
            for pre in al.words(before) {
                for post in al.words(after) {
                    let w = pre.concat(&cyl.word).concat(&post);
                    match out.iter_mut().find(|(_, x)| *x == w) {
                        Some(e) => e.0 += c,
                        None => out.push((c.clone(), w)),
                    }
                }
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        out
    }

    /// Lipschitz-type bound: largest absolute value.
    pub fn sup_norm(&self) -> Rat {
        self.terms.iter().map(|(c, _)| if c < &Rat::zero() { -c.clone() } else { c.clone() }).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::symbolic::stream::Side;

    #[test]
    fn indicator_examples() {
        let x = SymbolStream::periodic(Side::OneSided, &Word::from("01")).unwrap();
        let phi = CylinderObservable::at_start(Word::from("1"));
        assert_eq!(phi.evaluate(&x, 1).unwrap(), 0);
        assert_eq!(phi.evaluate(&x, 2).unwrap(), 1);
        let ones = SymbolStream::periodic(Side::OneSided, &Word::from("1")).unwrap();
        let combo = Observable {
            terms: vec![
                (rat(1, 4), CylinderObservable::at_start(Word::from("0"))),
                (rat(3, 4), CylinderObservable::at_start(Word::from("1"))),
            ],
        };
        for i in 1..20 {
            assert_eq!(combo.evaluate(&ones, i).unwrap(), rat(3, 4));
        }
    }

    #[test]
    fn expansion_preserves_values() {
        let phi = Observable {
            terms: vec![
                (rat(1, 2), CylinderObservable::new(Word::from("1"), 2).unwrap()),
                (rat(1, 3), CylinderObservable::at_start(Word::from("0"))),
            ],
        };
        let x = SymbolStream::eventually_periodic(&Word::from("0110"), &Word::from("01")).unwrap();
        let ex = phi.expanded(2);
        for i in 1..12 {
            let direct = phi.evaluate(&x, i).unwrap();
            let w = x.word(i, phi.depth()).unwrap();
            let via: Rat = ex.iter().filter(|(_, u)| *u == w).map(|(c, _)| c.clone()).sum();
            assert_eq!(direct, via);
        }
    }
}
