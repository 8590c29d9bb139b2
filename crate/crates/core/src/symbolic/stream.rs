//! Symbol streams. A stream is either block-structured (a contiguous list of
//! periodic pieces with big-integer coordinates, total by construction) or
//! lazily generated symbol by symbol with a memoized realized window.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use parking_lot::RwLock;

use super::word::{Cycle, Symbol, Word};
use crate::error::{domain, Error, Result};
use crate::num::{int, modulo, to_i64, Int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    OneSided,
    TwoSided,
}

impl Side {
    /// First legal coordinate.
    pub fn first(&self) -> Option<Int> {
        match self {
            Side::OneSided => Some(Int::one()),
            Side::TwoSided => None,
        }
    }
}

/// Coordinates in [start, end) carry `cycle[(c - anchor) mod |cycle|]`.
/// A missing bound is infinite.
#[derive(Clone, Debug)]
pub struct Piece {
    pub start: Option<Int>,
    pub end: Option<Int>,
    pub cycle: Arc<Cycle>,
    pub anchor: Int,
}

impl Piece {
    pub fn symbol(&self, c: &Int) -> Symbol {
        self.cycle.at(modulo(&(c - &self.anchor), self.cycle.len()))
    }

    /// Residue of coordinate c inside the cycle.
    pub fn residue(&self, c: &Int) -> usize {
        modulo(&(c - &self.anchor), self.cycle.len())
    }

    fn contains(&self, c: &Int) -> bool {
        self.start.as_ref().is_none_or(|s| s <= c) && self.end.as_ref().is_none_or(|e| c < e)
    }

    fn translate(&self, by: &Int) -> Piece {
        Piece {
            start: self.start.as_ref().map(|s| s + by),
            end: self.end.as_ref().map(|e| e + by),
            cycle: self.cycle.clone(),
            anchor: &self.anchor + by,
        }
    }

    fn clip(&self, lo: &Int, hi: &Int) -> Piece {
        let start = match &self.start {
            Some(s) if s > lo => s.clone(),
            _ => lo.clone(),
        };
        let end = match &self.end {
            Some(e) if e < hi => e.clone(),
            _ => hi.clone(),
        };
        Piece { start: Some(start), end: Some(end), cycle: self.cycle.clone(), anchor: self.anchor.clone() }
    }

    /// Same symbols as `other` wherever both are defined.
    pub fn same_pattern(&self, other: &Piece) -> bool {
        let n = self.cycle.len();
        if n != other.cycle.len() {
            return false;
        }
        let shift = modulo(&(&other.anchor - &self.anchor), n);
        if Arc::ptr_eq(&self.cycle, &other.cycle) && shift == 0 {
            return true;
        }
        let a = self.cycle.symbols();
        let b = other.cycle.symbols();
        (0..n).all(|r| a[(r + shift) % n] == b[r])
    }
}

type Forward = Box<dyn Fn(i64, &[Symbol]) -> Result<Symbol> + Send + Sync>;
type Backward = Box<dyn Fn(i64) -> Result<Symbol> + Send + Sync>;

struct Lazy {
    forward: Forward,
    backward: Option<Backward>,
    // forward memo holds coordinates base, base+1, ...; backward holds base-1, base-2, ...
    base: i64,
    memo: RwLock<(Vec<Symbol>, Vec<Symbol>)>,
}

enum Repr {
    Blocks(Vec<Piece>),
    Lazy(Lazy),
}

/// An immutable view σ^offset of a shared representation.
#[derive(Clone)]
pub struct SymbolStream {
    repr: Arc<Repr>,
    side: Side,
    offset: Int,
}

impl fmt::Debug for SymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = self.side.first().unwrap_or_else(|| int(0));
        let head = self.window(&first, 16).map(|w| Word(w).to_string()).unwrap_or_default();
        write!(f, "SymbolStream({:?}, {}…)", self.side, head)
    }
}

/// Largest window a lazy stream will materialize in one request.
pub const LAZY_WINDOW_LIMIT: usize = 1 << 24;

impl SymbolStream {
    pub fn from_pieces(side: Side, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return domain("a stream needs at least one piece");
        }
        match (side, &pieces[0].start) {
            (Side::OneSided, Some(s)) if s.is_one() => {}
            (Side::TwoSided, None) => {}
            _ => return domain("first piece must start at the first coordinate of the side"),
        }
        if pieces.last().unwrap().end.is_some() {
            return domain("last piece must be unbounded");
        }
        for w in pieces.windows(2) {
            match (&w[0].end, &w[1].start) {
                (Some(e), Some(s)) if e == s => {}
                _ => return domain("pieces must be contiguous"),
            }
            if w[1].end.as_ref().is_some_and(|e| e <= w[1].start.as_ref().unwrap()) {
                return domain("pieces must be nonempty");
            }
        }
        Ok(SymbolStream { repr: Arc::new(Repr::Blocks(pieces)), side, offset: Int::zero() })
    }

    /// w^∞; coordinate 1 (one-sided) or 0 (two-sided) carries w[0].
    pub fn periodic(side: Side, w: &Word) -> Result<Self> {
        if w.is_empty() {
            return domain("periodic stream needs a nonempty word");
        }
        let anchor = match side {
            Side::OneSided => int(1),
            Side::TwoSided => int(0),
        };
        let start = side.first();
        SymbolStream::from_pieces(side, vec![Piece { start, end: None, cycle: Cycle::from_word(w), anchor }])
    }

    /// One-sided stream `prefix` followed by `cycle`^∞.
    pub fn eventually_periodic(prefix: &Word, cycle: &Word) -> Result<Self> {
        let mut b = StreamBuilder::one_sided();
        b.push_word(prefix);
        b.finish(Cycle::from_word(cycle))
    }

    /// Lazily generated one-sided stream; `rule(i, realized)` returns the
    /// symbol at coordinate i given coordinates 1..i-1.
    pub fn lazy_one_sided(rule: impl Fn(i64, &[Symbol]) -> Result<Symbol> + Send + Sync + 'static) -> Self {
        let lazy = Lazy { forward: Box::new(rule), backward: None, base: 1, memo: RwLock::new((Vec::new(), Vec::new())) };
        SymbolStream { repr: Arc::new(Repr::Lazy(lazy)), side: Side::OneSided, offset: Int::zero() }
    }

    /// Lazily generated two-sided stream with independent rules for
    /// coordinates ≥ 0 and < 0.
    pub fn lazy_two_sided(
        forward: impl Fn(i64, &[Symbol]) -> Result<Symbol> + Send + Sync + 'static,
        backward: impl Fn(i64) -> Result<Symbol> + Send + Sync + 'static,
    ) -> Self {
        let lazy = Lazy {
            forward: Box::new(forward),
            backward: Some(Box::new(backward)),
            base: 0,
            memo: RwLock::new((Vec::new(), Vec::new())),
        };
        SymbolStream { repr: Arc::new(Repr::Lazy(lazy)), side: Side::TwoSided, offset: Int::zero() }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_blocks(&self) -> bool {
        matches!(*self.repr, Repr::Blocks(_))
    }

    /// σ^k. One-sided streams only shift forward.
    pub fn shift(&self, k: &Int) -> Result<Self> {
        if self.side == Side::OneSided && k.is_negative() {
            return domain("negative shift of a one-sided stream");
        }
        Ok(SymbolStream { repr: self.repr.clone(), side: self.side, offset: &self.offset + k })
    }

    pub fn shift_by(&self, k: i64) -> Result<Self> {
        self.shift(&int(k))
    }

    fn check_index(&self, i: &Int) -> Result<()> {
        if self.side == Side::OneSided && i < &Int::one() {
            return domain(format!("one-sided streams are indexed from 1, got {i}"));
        }
        Ok(())
    }

    pub fn symbol(&self, i: &Int) -> Result<Symbol> {
        self.check_index(i)?;
        let c = i + &self.offset;
        match &*self.repr {
            Repr::Blocks(pieces) => Ok(pieces[locate(pieces, &c)].symbol(&c)),
            Repr::Lazy(l) => l.symbol(to_i64(&c)?),
        }
    }

    pub fn at(&self, i: i64) -> Result<Symbol> {
        self.symbol(&int(i))
    }

    pub fn window(&self, start: &Int, len: usize) -> Result<Vec<Symbol>> {
        self.check_index(start)?;
        let c = start + &self.offset;
        match &*self.repr {
            Repr::Blocks(pieces) => {
                let mut out = Vec::with_capacity(len);
                let mut idx = locate(pieces, &c);
                let mut pos = c;
                while out.len() < len {
                    let p = &pieces[idx];
                    if p.end.as_ref().is_some_and(|e| &pos >= e) {
                        idx += 1;
                        continue;
                    }
                    out.push(p.symbol(&pos));
                    pos += 1;
                }
                Ok(out)
            }
            Repr::Lazy(l) => {
                if len > LAZY_WINDOW_LIMIT {
                    return Err(Error::Budget(format!("lazy window of {len} symbols")));
                }
                let s = to_i64(&c)?;
                (0..len as i64).map(|k| l.symbol(s + k)).collect()
            }
        }
    }

    pub fn word(&self, start: i64, len: usize) -> Result<Word> {
        Ok(Word(self.window(&int(start), len)?))
    }

    /// Largest coordinate materialized so far (lazy) or the end of the last
    /// bounded piece (blocks), in view coordinates.
    pub fn realized_depth(&self) -> Option<Int> {
        match &*self.repr {
            Repr::Blocks(pieces) => {
                let n = pieces.len();
                if n < 2 {
                    None
                } else {
                    pieces[n - 2].end.as_ref().map(|e| e - &self.offset - 1)
                }
            }
            Repr::Lazy(l) => {
                let m = l.memo.read();
                Some(int(l.base + m.0.len() as i64 - 1) - &self.offset)
            }
        }
    }

    /// Coordinates (view-relative) outside of which the stream follows its
    /// unbounded end pieces: (first bounded coordinate, end of last bounded).
    pub fn bounded_extent(&self) -> Option<(Option<Int>, Int)> {
        match &*self.repr {
            Repr::Blocks(pieces) => {
                if pieces.len() < 2 {
                    return None;
                }
                let lo = pieces[1].start.as_ref().map(|s| s - &self.offset);
                let hi = pieces[pieces.len() - 1].start.as_ref().unwrap() - &self.offset;
                Some((lo, hi))
            }
            Repr::Lazy(_) => None,
        }
    }

    /// The unbounded end pieces, translated to view coordinates.
    pub fn end_pieces(&self) -> Option<(Piece, Piece)> {
        match &*self.repr {
            Repr::Blocks(pieces) => {
                let by = -&self.offset;
                Some((pieces[0].translate(&by), pieces[pieces.len() - 1].translate(&by)))
            }
            Repr::Lazy(_) => None,
        }
    }

    /// Pieces covering view coordinates [lo, hi), clipped to that range.
    /// Lazy streams materialize the range as one explicit piece.
    pub fn pieces(&self, lo: &Int, hi: &Int) -> Result<Vec<Piece>> {
        if lo >= hi {
            return Ok(Vec::new());
        }
        self.check_index(lo)?;
        let by = -&self.offset;
        let clo = lo + &self.offset;
        let chi = hi + &self.offset;
        match &*self.repr {
            Repr::Blocks(pieces) => {
                let mut out = Vec::new();
                let mut idx = locate(pieces, &clo);
                while idx < pieces.len() {
                    let p = &pieces[idx];
                    if p.start.as_ref().is_some_and(|s| s >= &chi) {
                        break;
                    }
                    out.push(p.clip(&clo, &chi).translate(&by));
                    idx += 1;
                }
                Ok(out)
            }
            Repr::Lazy(_) => {
                let len = crate::num::to_usize(&(hi - lo))?;
                let w = self.window(lo, len)?;
                Ok(vec![Piece { start: Some(lo.clone()), end: Some(hi.clone()), cycle: Cycle::new(w), anchor: lo.clone() }])
            }
        }
    }
}

fn locate(pieces: &[Piece], c: &Int) -> usize {
    // first piece whose end exceeds c
    let idx = pieces.partition_point(|p| p.end.as_ref().is_some_and(|e| e <= c));
    debug_assert!(idx < pieces.len() && pieces[idx].contains(c) || pieces[0].start.as_ref().is_some_and(|s| c < s));
    idx.min(pieces.len() - 1)
}

impl Lazy {
    fn symbol(&self, c: i64) -> Result<Symbol> {
        if c >= self.base {
            let k = (c - self.base) as usize;
            if let Some(&s) = self.memo.read().0.get(k) {
                return Ok(s);
            }
            if k >= LAZY_WINDOW_LIMIT {
                return Err(Error::Budget(format!("lazy realization to coordinate {c}")));
            }
            let mut m = self.memo.write();
            while m.0.len() <= k {
                let i = self.base + m.0.len() as i64;
                let s = (self.forward)(i, &m.0)?;
                m.0.push(s);
            }
            Ok(m.0[k])
        } else {
            let back = self.backward.as_ref().ok_or_else(|| Error::Domain(format!("coordinate {c} below the first index")))?;
            let k = (self.base - 1 - c) as usize;
            if let Some(&s) = self.memo.read().1.get(k) {
                return Ok(s);
            }
            if k >= LAZY_WINDOW_LIMIT {
                return Err(Error::Budget(format!("lazy realization to coordinate {c}")));
            }
            let mut m = self.memo.write();
            while m.1.len() <= k {
                let i = self.base - 1 - m.1.len() as i64;
                let s = back(i)?;
                m.1.push(s);
            }
            Ok(m.1[k])
        }
    }
}

/// Incremental construction of block streams: explicit words and periodic
/// runs are appended at a cursor, then an unbounded tail closes the stream.
pub struct StreamBuilder {
    side: Side,
    pieces: Vec<Piece>,
    cursor: Int,
}

impl StreamBuilder {
    pub fn one_sided() -> Self {
        StreamBuilder { side: Side::OneSided, pieces: Vec::new(), cursor: int(1) }
    }

    /// Two-sided builder whose coordinates below `from` follow `left`
    /// (anchored so that `left.anchor` is respected).
    pub fn two_sided(left: Arc<Cycle>, left_anchor: Int, from: Int) -> Self {
        let first = Piece { start: None, end: Some(from.clone()), cycle: left, anchor: left_anchor };
        StreamBuilder { side: Side::TwoSided, pieces: vec![first], cursor: from }
    }

    pub fn cursor(&self) -> &Int {
        &self.cursor
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Symbol at the coordinate just before the cursor.
    pub fn last_symbol(&self) -> Option<Symbol> {
        let prev = &self.cursor - 1;
        self.pieces.last().map(|p| p.symbol(&prev))
    }

    pub fn push_word(&mut self, w: &Word) {
        if w.is_empty() {
            return;
        }
        let anchor = self.cursor.clone();
        self.push_periodic(Cycle::from_word(w), &int(w.len() as i64), anchor);
    }

    /// Appends `len` coordinates of the periodic pattern (cycle, anchor).
    pub fn push_periodic(&mut self, cycle: Arc<Cycle>, len: &Int, anchor: Int) {
        if !len.is_positive() {
            return;
        }
        let end = &self.cursor + len;
        if let Some(last) = self.pieces.last_mut() {
            let cand = Piece { start: None, end: None, cycle: cycle.clone(), anchor: anchor.clone() };
            if last.end.as_ref() == Some(&self.cursor) && last.same_pattern(&cand) {
                last.end = Some(end.clone());
                self.cursor = end;
                return;
            }
        }
        self.pieces.push(Piece { start: Some(self.cursor.clone()), end: Some(end.clone()), cycle, anchor });
        self.cursor = end;
    }

    /// Closes the stream with `cycle`^∞ starting at the cursor.
    pub fn finish(self, cycle: Arc<Cycle>) -> Result<SymbolStream> {
        let anchor = self.cursor.clone();
        self.finish_anchored(cycle, anchor)
    }

    pub fn finish_anchored(mut self, cycle: Arc<Cycle>, anchor: Int) -> Result<SymbolStream> {
        self.pieces.push(Piece { start: Some(self.cursor.clone()), end: None, cycle, anchor });
        SymbolStream::from_pieces(self.side, self.pieces)
    }
}
