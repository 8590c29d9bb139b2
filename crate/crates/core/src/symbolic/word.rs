use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::error::{domain, Result};

pub type Symbol = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > 256 {
            return domain(format!("alphabet size {size} outside 1..=256"));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// All words of the given length in lexicographic order.
    pub fn words(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * self.size);
            for w in &out {
                for a in 0..self.size {
                    let mut v = w.0.clone();
                    v.push(a as Symbol);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        match self.0.iter().find(|&&s| s as usize >= alphabet.size()) {
            Some(s) => domain(format!("symbol {s} outside alphabet of size {}", alphabet.size())),
            None => Ok(()),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// Digit string for alphabets of size at most 10, comma-separated otherwise.
    pub fn render(&self, alphabet_size: usize) -> String {
        if alphabet_size <= 10 {
            self.0.iter().map(|s| char::from(b'0' + s)).collect()
        } else {
            self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse(s: &str, alphabet_size: usize) -> Result<Word> {
        let s = s.trim();
        let syms: Option<Vec<Symbol>> = if s.contains(',') || alphabet_size > 10 {
            if s.is_empty() {
                Some(Vec::new())
            } else {
                s.split(',').map(|t| t.trim().parse::<Symbol>().ok()).collect()
            }
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as Symbol)).collect()
        };
        let w = match syms {
            Some(v) => Word(v),
            None => return domain(format!("cannot parse word {s:?}")),
        };
        w.check(Alphabet::new(alphabet_size)?)?;
        Ok(w)
    }

    /// Smallest p with w[i] = w[i+p] cyclically; |w| when w is primitive.
    pub fn cyclic_period(&self) -> usize {
        let n = self.len();
        (1..=n)
            .find(|&p| n % p == 0 && (0..n).all(|i| self.0[i] == self.0[(i + p) % n]))
            .unwrap_or(n)
    }

    pub fn rotate(&self, k: usize) -> Word {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        Word((0..n).map(|i| self.0[(i + k) % n]).collect())
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.bytes().map(|b| b - b'0').collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = self.0.iter().copied().max().unwrap_or(0) as usize;
        f.write_str(&self.render(max + 1))
    }
}

/// A nonempty word used as one period of a periodic piece. Cyclic window
/// counts are cached per window length.
pub struct Cycle {
    symbols: Vec<Symbol>,
    grams: RwLock<HashMap<(usize, usize), Arc<Vec<u64>>>>,
    // prefix counts of cyclic occurrences, per word
    occ: RwLock<HashMap<Vec<Symbol>, Arc<Vec<u32>>>>,
    prefix: RwLock<HashMap<(usize, usize), Arc<Vec<u32>>>>,
}

const OCC_CACHE_LEN: usize = 1 << 20;
const OCC_CACHE_WORDS: usize = 16;
const GRAM_PREFIX_CELLS: usize = 1 << 24;

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cycle({})", Word(self.symbols.clone()))
    }
}

impl PartialEq for Cycle {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Cycle {}

impl Cycle {
    pub fn new(symbols: Vec<Symbol>) -> Arc<Cycle> {
        assert!(!symbols.is_empty(), "cycle words are nonempty");
        Arc::new(Cycle { symbols, grams: RwLock::new(HashMap::new()), occ: RwLock::new(HashMap::new()), prefix: RwLock::new(HashMap::new()) })
    }

    pub fn from_word(w: &Word) -> Arc<Cycle> {
        Cycle::new(w.0.clone())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn at(&self, r: usize) -> Symbol {
        self.symbols[r % self.symbols.len()]
    }

    pub fn word(&self) -> Word {
        Word(self.symbols.clone())
    }

    /// Counts of cyclic windows of length `len`, indexed by base-`base` code.
    /// Returns None when the table would be too large to cache.
    pub fn gram_counts(&self, len: usize, base: usize) -> Option<Arc<Vec<u64>>> {
        let size = (base as u128).checked_pow(len as u32)?;
        if size > 1 << 20 {
            return None;
        }
        if let Some(t) = self.grams.read().get(&(len, base)) {
            return Some(t.clone());
        }
        let n = self.symbols.len();
        let mut table = vec![0u64; size as usize];
        for r in 0..n {
            let mut code = 0usize;
            for k in 0..len {
                code = code * base + self.symbols[(r + k) % n] as usize;
            }
            table[code] += 1;
        }
        let t = Arc::new(table);
        self.grams.write().insert((len, base), t.clone());
        Some(t)
    }

    /// Window-code counts over the `len` cyclic residues r0, r0+1, … (len ≤ |cycle|),
    /// from a cached prefix table when it fits.
    pub fn gram_range(&self, m: usize, base: usize, r0: usize, len: usize) -> Option<Vec<(u64, u64)>> {
        let n = self.symbols.len();
        let codes = (base as u128).checked_pow(m as u32)? as usize;
        if codes.saturating_mul(n + 1) > GRAM_PREFIX_CELLS {
            return None;
        }
        let key = (m, base);
        let table = match self.prefix.read().get(&key) {
            Some(t) => Some(t.clone()),
            None => None,
        };
        let table = match table {
            Some(t) => t,
            None => {
                let mut t = vec![0u32; codes * (n + 1)];
                for r in 0..n {
                    let c = (0..m).fold(0usize, |c, k| c * base + self.symbols[(r + k) % n] as usize);
                    let (prev, next) = t.split_at_mut((r + 1) * codes);
                    next[..codes].copy_from_slice(&prev[r * codes..]);
                    next[c] += 1;
                }
                let t = Arc::new(t);
                self.prefix.write().insert(key, t.clone());
                t
            }
        };
        let at = |r: usize, c: usize| table[r * codes + c] as u64;
        let r0 = r0 % n;
        let end = r0 + len;
        let mut out = Vec::new();
        for c in 0..codes {
            let v = if end <= n { at(end, c) - at(r0, c) } else { at(n, c) - at(r0, c) + at(end - n, c) };
            if v > 0 {
                out.push((c as u64, v));
            }
        }
        Some(out)
    }

    /// Number of residues r in [r0, r1) (r1 ≤ |cycle|) where `u` starts cyclically.
    pub fn occurrences_in(&self, u: &[Symbol], r0: usize, r1: usize) -> u64 {
        let n = self.symbols.len();
        (r0..r1)
            .filter(|&r| u.iter().enumerate().all(|(k, &s)| self.symbols[(r + k) % n] == s))
            .count() as u64
    }

    fn occurs_at(&self, u: &[Symbol], r: usize) -> bool {
        let n = self.symbols.len();
        u.iter().enumerate().all(|(k, &s)| self.symbols[(r + k) % n] == s)
    }

    fn occurrence_prefix(&self, u: &[Symbol]) -> Option<Arc<Vec<u32>>> {
        let n = self.symbols.len();
        if n > OCC_CACHE_LEN {
            return None;
        }
        if let Some(t) = self.occ.read().get(u) {
            return Some(t.clone());
        }
        let mut pre = Vec::with_capacity(n + 1);
        pre.push(0u32);
        let mut acc = 0u32;
        for r in 0..n {
            acc += u32::from(self.occurs_at(u, r));
            pre.push(acc);
        }
        let t = Arc::new(pre);
        let mut m = self.occ.write();
        if m.len() < OCC_CACHE_WORDS {
            m.insert(u.to_vec(), t.clone());
        }
        Some(t)
    }

    /// Occurrences of `u` at the `len` cyclic residues r0, r0+1, ….
    pub fn count_range(&self, u: &[Symbol], r0: usize, len: usize) -> u64 {
        let n = self.symbols.len();
        debug_assert!(len <= n);
        if len == 0 {
            return 0;
        }
        if len <= 64 {
            return (0..len).filter(|&k| self.occurs_at(u, (r0 + k) % n)).count() as u64;
        }
        match self.occurrence_prefix(u) {
            Some(pre) => {
                let r0 = r0 % n;
                let end = r0 + len;
                if end <= n {
                    (pre[end] - pre[r0]) as u64
                } else {
                    (pre[n] - pre[r0] + pre[end - n]) as u64
                }
            }
            None => (0..len).filter(|&k| self.occurs_at(u, (r0 + k) % n)).count() as u64,
        }
    }

    /// Number of cyclic occurrences of `u` over one full period.
    pub fn cyclic_occurrences(&self, u: &[Symbol], base: usize) -> u64 {
        if u.is_empty() {
            return self.symbols.len() as u64;
        }
        if u.iter().any(|&s| s as usize >= base) {
            return 0;
        }
        match self.gram_counts(u.len(), base) {
            Some(t) => {
                let code = u.iter().fold(0usize, |c, &s| c * base + s as usize);
                t[code]
            }
            None => self.occurrences_in(u, 0, self.symbols.len()),
        }
    }
}
