//! Sofic shifts presented by labeled graphs.

use crate::error::{domain, Result};
use crate::symbolic::{Alphabet, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoficModel {
    alphabet: Alphabet,
    vertices: usize,
    edges: Vec<(usize, usize, Symbol)>,
    // vertices on some bi-infinite path
    essential: Vec<bool>,
}

type States = Vec<bool>;

impl SoficModel {
    pub fn new(alphabet_size: usize, edges: Vec<(usize, usize, Symbol)>) -> Result<Self> {
        let alphabet = Alphabet::new(alphabet_size)?;
        if edges.is_empty() {
            return domain("sofic presentation needs at least one edge");
        }
        if edges.iter().any(|e| e.2 as usize >= alphabet_size) {
            return domain("edge label outside the alphabet");
        }
        let vertices = edges.iter().map(|e| e.0.max(e.1)).max().unwrap() + 1;
        let mut essential = vec![true; vertices];
        loop {
            let mut changed = false;
            for v in 0..vertices {
                if !essential[v] {
                    continue;
                }
                let out = edges.iter().any(|e| e.0 == v && essential[e.1]);
                let inc = edges.iter().any(|e| e.1 == v && essential[e.0]);
                if !out || !inc {
                    essential[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !essential.iter().any(|&b| b) {
            return domain("sofic presentation has no bi-infinite path");
        }
        Ok(Self { alphabet, vertices, edges, essential })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn edges(&self) -> &[(usize, usize, Symbol)] {
        &self.edges
    }

    fn step(&self, from: &States, a: Symbol) -> States {
        let mut out = vec![false; self.vertices];
        for &(s, t, l) in &self.edges {
            if l == a && from[s] && self.essential[t] {
                out[t] = true;
            }
        }
        out
    }

    fn read(&self, from: States, w: &[Symbol]) -> States {
        w.iter().fold(from, |acc, &a| self.step(&acc, a))
    }

    fn all(&self) -> States {
        self.essential.clone()
    }

    pub fn admissible(&self, w: &Word) -> bool {
        self.read(self.all(), w.symbols()).iter().any(|&b| b)
    }

    /// Lexicographically least w with |w| = L and uwv admissible.
    pub fn bridge(&self, u: &Word, v: &Word, len: usize) -> Option<Word> {
        let start = self.read(self.all(), u.symbols());
        if !start.iter().any(|&b| b) {
            return None;
        }
        // good[k]: states from which k free symbols followed by v can be read
        let mut good: Vec<States> = Vec::with_capacity(len + 1);
        let fin: States = (0..self.vertices)
            .map(|s| {
                let mut one = vec![false; self.vertices];
                one[s] = self.essential[s];
                self.read(one, v.symbols()).iter().any(|&b| b)
            })
            .collect();
        good.push(fin);
        for k in 1..=len {
            let prev = &good[k - 1];
            let row = (0..self.vertices)
                .map(|s| self.edges.iter().any(|&(a, b, _)| a == s && self.essential[b] && prev[b]))
                .collect();
            good.push(row);
        }
        let mut cur = start;
        let mut out = Vec::with_capacity(len);
        for k in (1..=len).rev() {
            let mut chosen = None;
            for a in 0..self.alphabet.size() as Symbol {
                let next = self.step(&cur, a);
                if next.iter().zip(&good[k - 1]).any(|(&x, &g)| x && g) {
                    chosen = Some((a, next));
                    break;
                }
            }
            let (a, next) = chosen?;
            out.push(a);
            cur = next;
        }
        if !cur.iter().zip(&good[0]).any(|(&x, &g)| x && g) {
            return None;
        }
        Some(Word(out))
    }
}
