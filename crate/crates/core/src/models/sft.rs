//! One-step shifts of finite type given by a 0/1 transition matrix, with
//! bridging, primitivity, period and cyclic classes.

use std::collections::VecDeque;

use crate::error::{domain, Error, Result};
use crate::num::gcd_u;
use crate::symbolic::{Alphabet, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    alphabet: Alphabet,
    matrix: Vec<Vec<bool>>,
    // symbols from which an infinite forward path exists
    forward: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Primitivity {
    Index(usize),
    NotPrimitive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicDecomposition {
    pub classes: Vec<Vec<Symbol>>,
    pub period: usize,
}

impl TransitionSystem {
    pub fn new(matrix: Vec<Vec<u8>>) -> Result<Self> {
        let n = matrix.len();
        let alphabet = Alphabet::new(n)?;
        if matrix.iter().any(|r| r.len() != n) {
            return domain("transition matrix must be square");
        }
        if matrix.iter().flatten().any(|&v| v > 1) {
            return domain("transition matrix entries must be 0 or 1");
        }
        let matrix: Vec<Vec<bool>> = matrix.iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect();
        let mut forward = vec![true; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if forward[i] && !(0..n).any(|j| matrix[i][j] && forward[j]) {
                    forward[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !forward.iter().any(|&f| f) {
            return domain("the transition matrix admits no infinite path");
        }
        Ok(Self { alphabet, matrix, forward })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![vec![1; n]; n])
    }

    pub fn golden_mean() -> Self {
        Self::new(vec![vec![1, 1], vec![1, 0]]).unwrap()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        self.matrix[a as usize][b as usize]
    }

    pub fn matrix_u8(&self) -> Vec<Vec<u8>> {
        self.matrix.iter().map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect()
    }

    pub fn is_full(&self) -> bool {
        self.matrix.iter().flatten().all(|&b| b)
    }

    /// Usable symbols: those lying on a bi-infinite path.
    pub fn usable(&self) -> Vec<bool> {
        let n = self.size();
        let mut keep = self.forward.clone();
        loop {
            let mut changed = false;
            for j in 0..n {
                if keep[j] && !(0..n).any(|i| keep[i] && self.matrix[i][j]) {
                    keep[j] = false;
                    changed = true;
                }
            }
            if !changed {
                return keep;
            }
        }
    }

    /// w is a path and its last symbol continues forever.
    pub fn admissible(&self, w: &Word) -> bool {
        let s = w.symbols();
        if s.iter().any(|&a| a as usize >= self.size()) {
            return false;
        }
        match s.last() {
            None => true,
            Some(&last) => self.forward[last as usize] && s.windows(2).all(|p| self.allows(p[0], p[1])),
        }
    }

    /// Lexicographically least w with |w| = L and uwv admissible.
    pub fn bridge(&self, u: &Word, v: &Word, len: usize) -> Option<Word> {
        if !self.admissible(u) || !self.admissible(v) {
            return None;
        }
        let n = self.size();
        // ok[k][s]: from symbol s (already placed) the remaining k free symbols
        // and then v can follow.
        let target: Vec<bool> = match v.symbols().first() {
            Some(&f) => (0..n).map(|s| self.allows(s as Symbol, f)).collect(),
            None => self.forward.clone(),
        };
        let mut ok = vec![target];
        for k in 1..=len {
            let prev = &ok[k - 1];
            let row: Vec<bool> = (0..n).map(|s| (0..n).any(|t| self.matrix[s][t] && prev[t])).collect();
            ok.push(row);
        }
        let mut out = Vec::with_capacity(len);
        let mut cur: Option<Symbol> = u.symbols().last().copied();
        for k in (1..=len).rev() {
            let next = (0..n).find(|&t| cur.is_none_or(|c| self.allows(c, t as Symbol)) && ok[k - 1][t])?;
            out.push(next as Symbol);
            cur = Some(next as Symbol);
        }
        if let Some(c) = cur {
            if !ok[0][c as usize] {
                return None;
            }
        }
        let w = Word(out);
        debug_assert!(self.admissible(&u.concat(&w).concat(v)));
        Some(w)
    }

    pub fn power(&self, k: usize) -> Vec<Vec<bool>> {
        let n = self.size();
        let mut acc: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for _ in 0..k {
            acc = bool_mul(&acc, &self.matrix);
        }
        acc
    }

    pub fn primitivity_index(&self, cap: usize) -> Primitivity {
        let mut p = self.matrix.clone();
        for k in 1..=cap {
            if p.iter().flatten().all(|&b| b) {
                return Primitivity::Index(k);
            }
            p = bool_mul(&p, &self.matrix);
        }
        Primitivity::NotPrimitive
    }

    /// Default cap: Wielandt's bound (n-1)^2 + 1.
    pub fn primitivity(&self) -> Primitivity {
        let n = self.size();
        self.primitivity_index((n - 1) * (n - 1) + 1)
    }

    /// Strong connectivity among usable symbols (and every symbol usable).
    pub fn is_transitive(&self) -> bool {
        let usable = self.usable();
        if usable.iter().any(|&u| !u) {
            return false;
        }
        let n = self.size();
        let reach = |rev: bool| {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut q = VecDeque::from([0usize]);
            while let Some(s) = q.pop_front() {
                for t in 0..n {
                    let e = if rev { self.matrix[t][s] } else { self.matrix[s][t] };
                    if e && !seen[t] {
                        seen[t] = true;
                        q.push_back(t);
                    }
                }
            }
            seen.iter().all(|&b| b)
        };
        reach(false) && reach(true)
    }

    fn levels(&self) -> Result<Vec<usize>> {
        if !self.is_transitive() {
            return Err(Error::Domain("transition system is not transitive".into()));
        }
        let n = self.size();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(s) = q.pop_front() {
            for t in 0..n {
                if self.matrix[s][t] && level[t] == usize::MAX {
                    level[t] = level[s] + 1;
                    q.push_back(t);
                }
            }
        }
        Ok(level)
    }

    /// gcd of cycle lengths, from BFS level differences along edges.
    pub fn period(&self) -> Result<usize> {
        let level = self.levels()?;
        let n = self.size();
        let mut g = 0usize;
        for s in 0..n {
            for t in 0..n {
                if self.matrix[s][t] {
                    let diff = (level[s] + 1).abs_diff(level[t]);
                    g = gcd_u(g, diff);
                }
            }
        }
        Ok(g)
    }

    pub fn cyclic_classes(&self) -> Result<PeriodicDecomposition> {
        let p = self.period()?;
        let level = self.levels()?;
        let mut classes = vec![Vec::new(); p];
        for (s, l) in level.iter().enumerate() {
            classes[l % p].push(s as Symbol);
        }
        Ok(PeriodicDecomposition { classes, period: p })
    }

    /// Matrix restricted to the given symbols (in the given order).
    pub fn restrict(matrix: &[Vec<bool>], symbols: &[Symbol]) -> Vec<Vec<u8>> {
        symbols
            .iter()
            .map(|&a| symbols.iter().map(|&b| u8::from(matrix[a as usize][b as usize])).collect())
            .collect()
    }

    /// All admissible words of the given length.
    pub fn words(&self, len: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                for a in 0..self.size() as Symbol {
                    if w.symbols().last().is_none_or(|&l| self.allows(l, a)) {
                        let mut v = w.0.clone();
                        v.push(a);
                        next.push(Word(v));
                    }
                }
            }
            out = next;
        }
        out.retain(|w| self.admissible(w));
        out
    }

    /// Lexicographically least admissible continuation of w to length `len`.
    pub fn extend(&self, w: &Word, len: usize) -> Option<Word> {
        if w.len() >= len {
            return Some(Word(w.0[..len].to_vec()));
        }
        let tail = self.bridge(w, &Word::empty(), len - w.len())?;
        Some(w.concat(&tail))
    }
}

impl PeriodicDecomposition {
    pub fn class_of(&self, s: Symbol) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&s))
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> TransitionSystem {
        TransitionSystem::new(vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn ring3() -> TransitionSystem {
        // 6 symbols, class of s is s mod 3, edges advance the class
        let mut m = vec![vec![0u8; 6]; 6];
        for s in 0..6 {
            m[s][(s + 1) % 6] = 1;
        }
        m[0][4] = 1;
        m[2][3] = 1;
        TransitionSystem::new(m).unwrap()
    }

    #[test]
    fn admissibility_and_bridges() {
        let g = TransitionSystem::golden_mean();
        assert!(!g.admissible(&Word::from("0110")));
        assert!(g.admissible(&Word::from("0100")));
        assert_eq!(g.bridge(&Word::from("1"), &Word::from("1"), 1), Some(Word::from("0")));
        assert_eq!(g.bridge(&Word::from("1"), &Word::from("1"), 0), None);
        let f = TransitionSystem::full(2).unwrap();
        assert_eq!(f.bridge(&Word::from("1"), &Word::from("0"), 0), Some(Word::empty()));
        assert_eq!(f.bridge(&Word::from("1"), &Word::from("0"), 3), Some(Word::from("000")));
    }

    #[test]
    fn primitivity_examples() {
        assert_eq!(TransitionSystem::golden_mean().primitivity_index(10), Primitivity::Index(2));
        assert_eq!(TransitionSystem::full(3).unwrap().primitivity_index(10), Primitivity::Index(1));
        assert_eq!(two_cycle().primitivity_index(50), Primitivity::NotPrimitive);
    }

    #[test]
    fn periods_and_classes() {
        assert_eq!(two_cycle().period().unwrap(), 2);
        assert_eq!(TransitionSystem::golden_mean().period().unwrap(), 1);
        let r = ring3();
        assert_eq!(r.period().unwrap(), 3);
        let d = r.cyclic_classes().unwrap();
        assert_eq!(d.classes, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        let d2 = two_cycle().cyclic_classes().unwrap();
        assert_eq!(d2.classes, vec![vec![0], vec![1]]);
        let reducible = TransitionSystem::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(reducible.period().is_err());
    }
}
