use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{domain, Result};
use crate::num::{int, rat_int, Int, Rat};
use crate::symbolic::{count_occurrences, window_counts, Alphabet, CylinderObservable, Observable, Side, Symbol, SymbolStream, Word};

/// Window counts of a stream over starts 1..=n at a fixed depth.
#[derive(Clone)]
pub struct EmpiricalData {
    pub stream: SymbolStream,
    pub n: Int,
    pub depth: usize,
    pub base: usize,
    counts: BTreeMap<u64, Int>,
}

/// A probability measure with a finite description.
#[derive(Clone)]
pub enum FiniteMeasure {
    /// Uniform measure on the orbit of w^∞.
    Periodic(Word),
    Convex(Vec<(Rat, FiniteMeasure)>),
    /// E_n(x) = (1/n) Σ_{i<n} δ_{σ^i x}.
    Empirical(Arc<EmpiricalData>),
}

impl fmt::Debug for FiniteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteMeasure::Periodic(w) => write!(f, "per({w})"),
            FiniteMeasure::Convex(ts) => {
                write!(f, "conv[")?;
                for (k, (t, m)) in ts.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}·{m:?}")?;
                }
                write!(f, "]")
            }
            FiniteMeasure::Empirical(e) => write!(f, "E_{}(depth {})", e.n, e.depth),
        }
    }
}

impl PartialEq for FiniteMeasure {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FiniteMeasure::Periodic(a), FiniteMeasure::Periodic(b)) => a == b,
            (FiniteMeasure::Convex(a), FiniteMeasure::Convex(b)) => a == b,
            (FiniteMeasure::Empirical(a), FiniteMeasure::Empirical(b)) => {
                a.n == b.n && a.depth == b.depth && a.base == b.base && a.counts == b.counts
            }
            _ => false,
        }
    }
}

fn encode(w: &[Symbol], base: usize) -> u64 {
    w.iter().fold(0u64, |c, &s| c * base as u64 + s as u64)
}

fn decode(mut code: u64, len: usize, base: usize) -> Word {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = (code % base as u64) as Symbol;
        code /= base as u64;
    }
    Word(out)
}

impl FiniteMeasure {
    pub fn periodic(w: Word) -> Result<Self> {
        if w.is_empty() {
            return domain("periodic measures need a nonempty word");
        }
        Ok(FiniteMeasure::Periodic(w))
    }

    /// Convex combination; weights must be nonnegative and sum to 1.
    pub fn convex(terms: Vec<(Rat, FiniteMeasure)>) -> Result<Self> {
        if terms.is_empty() {
            return domain("empty convex combination");
        }
        if terms.iter().any(|(t, _)| t < &Rat::zero()) {
            return domain("negative convex weight");
        }
        let total: Rat = terms.iter().map(|(t, _)| t.clone()).sum();
        if !total.is_one() {
            return domain(format!("convex weights sum to {total}"));
        }
        Ok(FiniteMeasure::Convex(terms))
    }

    /// θμ₁ + (1−θ)μ₂, collapsing degenerate weights.
    pub fn mix(theta: &Rat, mu1: &FiniteMeasure, mu2: &FiniteMeasure) -> Result<Self> {
        if theta < &Rat::zero() || theta > &Rat::one() {
            return domain("mixing weight outside [0, 1]");
        }
        if theta.is_one() {
            return Ok(mu1.clone());
        }
        if theta.is_zero() {
            return Ok(mu2.clone());
        }
        FiniteMeasure::convex(vec![(theta.clone(), mu1.clone()), (Rat::one() - theta, mu2.clone())])
    }

    /// E_n(x) on cylinders of length ≤ depth, over starts 1..=n.
    pub fn empirical(x: &SymbolStream, n: &Int, depth: usize, alphabet: Alphabet) -> Result<Self> {
        if n < &Int::one() {
            return domain("empirical measures need n ≥ 1");
        }
        let base = alphabet.size();
        if (base as f64).powi(depth as i32) >= 1.8e19 {
            return domain("empirical depth too large for the alphabet");
        }
        let counts = window_counts(x, depth, base, &int(1), &(n + 1))?;
        let counts: BTreeMap<u64, Int> = counts.into_iter().collect();
        Ok(FiniteMeasure::Empirical(Arc::new(EmpiricalData { stream: x.clone(), n: n.clone(), depth, base, counts })))
    }

    /// From precomputed depth-m counts over starts 1..=n.
    pub fn empirical_from_counts(x: &SymbolStream, n: &Int, depth: usize, base: usize, counts: BTreeMap<u64, Int>) -> Self {
        FiniteMeasure::Empirical(Arc::new(EmpiricalData { stream: x.clone(), n: n.clone(), depth, base, counts }))
    }

    /// ⟨cyl(u), μ⟩ for many words at once; periodic words are scanned once per length.
    pub fn values(&self, words: &[Word]) -> Result<Vec<Rat>> {
        match self {
            FiniteMeasure::Periodic(w) if w.len() > 64 => {
                let n = w.len();
                let s = w.symbols();
                let base = s.iter().chain(words.iter().flat_map(|u| u.symbols())).max().map_or(1, |&m| m as usize + 1);
                let mut tables: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
                let mut out = Vec::with_capacity(words.len());
                for u in words {
                    let l = u.len();
                    if l == 0 {
                        out.push(Rat::one());
                        continue;
                    }
                    if (base as f64).powi(l as i32) > (1u64 << 22) as f64 {
                        out.push(self.value(u)?);
                        continue;
                    }
                    let t = tables.entry(l).or_insert_with(|| {
                        let mut t = vec![0u64; base.pow(l as u32)];
                        for r in 0..n {
                            let c = (0..l).fold(0usize, |c, k| c * base + s[(r + k) % n] as usize);
                            t[c] += 1;
                        }
                        t
                    });
                    let c = encode(u.symbols(), base) as usize;
                    out.push(Rat::new(int(t[c] as i64), int(n as i64)));
                }
                Ok(out)
            }
            FiniteMeasure::Convex(ts) => {
                let mut acc = vec![Rat::zero(); words.len()];
                for (t, m) in ts {
                    if !t.is_zero() {
                        for (a, v) in acc.iter_mut().zip(m.values(words)?) {
                            *a += t * v;
                        }
                    }
                }
                Ok(acc)
            }
            _ => words.iter().map(|u| self.value(u)).collect(),
        }
    }

    /// ⟨cyl(u), μ⟩ for the cylinder at offset 1.
    pub fn value(&self, u: &Word) -> Result<Rat> {
        match self {
            FiniteMeasure::Periodic(w) => {
                let n = w.len();
                let s = w.symbols();
                let hits = (0..n).filter(|&r| u.symbols().iter().enumerate().all(|(k, &a)| s[(r + k) % n] == a)).count();
                Ok(Rat::new(int(hits as i64), int(n as i64)))
            }
            FiniteMeasure::Convex(ts) => {
                let mut acc = Rat::zero();
                for (t, m) in ts {
                    if !t.is_zero() {
                        acc += t * m.value(u)?;
                    }
                }
                Ok(acc)
            }
            FiniteMeasure::Empirical(e) => {
                if u.symbols().iter().any(|&a| a as usize >= e.base) {
                    return Ok(Rat::zero());
                }
                if u.len() <= e.depth {
                    let scale = (e.base as u64).pow((e.depth - u.len()) as u32);
                    let lo = encode(u.symbols(), e.base) * scale;
                    let total: Int = e.counts.range(lo..lo + scale).map(|(_, v)| v.clone()).sum();
                    Ok(Rat::new(total, e.n.clone()))
                } else {
                    let c = count_occurrences(&e.stream, u.symbols(), &int(1), &(&e.n + 1))?;
                    Ok(Rat::new(c, e.n.clone()))
                }
            }
        }
    }

    /// ⟨cyl, μ⟩ for a cylinder at any offset. Invariant kinds ignore the
    /// offset; empirical measures count starts offset..offset+n−1.
    pub fn cylinder_value(&self, c: &CylinderObservable) -> Result<Rat> {
        match self {
            FiniteMeasure::Empirical(e) if c.offset != 1 => {
                let o = int(c.offset as i64);
                let cnt = count_occurrences(&e.stream, c.word.symbols(), &o, &(&o + &e.n))?;
                Ok(Rat::new(cnt, e.n.clone()))
            }
            FiniteMeasure::Convex(ts) => {
                let mut acc = Rat::zero();
                for (t, m) in ts {
                    if !t.is_zero() {
                        acc += t * m.cylinder_value(c)?;
                    }
                }
                Ok(acc)
            }
            _ => self.value(&c.word),
        }
    }

    /// ⟨φ, μ⟩ for a finite combination of cylinders.
    pub fn integrate(&self, phi: &Observable) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (a, c) in &phi.terms {
            acc += a * self.cylinder_value(c)?;
        }
        Ok(acc)
    }

    /// Depth-`depth` words of positive mass.
    pub fn support(&self, depth: usize) -> Result<BTreeSet<Word>> {
        if depth == 0 {
            return domain("support depth must be at least 1");
        }
        let mut out = BTreeSet::new();
        match self {
            FiniteMeasure::Periodic(w) => {
                let n = w.len();
                for r in 0..n {
                    out.insert(Word((0..depth).map(|k| w.symbols()[(r + k) % n]).collect()));
                }
            }
            FiniteMeasure::Convex(ts) => {
                for (t, m) in ts {
                    if !t.is_zero() {
                        out.extend(m.support(depth)?);
                    }
                }
            }
            FiniteMeasure::Empirical(e) => {
                if depth <= e.depth {
                    let scale = (e.base as u64).pow((e.depth - depth) as u32);
                    for (c, v) in &e.counts {
                        if !v.is_zero() {
                            out.insert(decode(c / scale, depth, e.base));
                        }
                    }
                } else {
                    let deeper = window_counts(&e.stream, depth, e.base, &int(1), &(&e.n + 1))?;
                    for (c, v) in deeper {
                        if !v.is_zero() {
                            out.insert(decode(c, depth, e.base));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Simple description for reports.
    pub fn describe(&self) -> String {
        format!("{self:?}")
    }
}

/// Explicit bound on the distance between E_n(w^∞) and the periodic measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicConvergence {
    pub period: usize,
}

impl PeriodicConvergence {
    /// 2|w|/n.
    pub fn bound(&self, n: &Int) -> Rat {
        Rat::new(int(2 * self.period as i64), n.clone())
    }

    /// N(ε) = ⌈2|w|/ε⌉: the bound is ≤ ε from there on.
    pub fn threshold(&self, eps: &Rat) -> Result<Int> {
        if eps <= &Rat::zero() {
            return domain("eps must be positive");
        }
        Ok(crate::num::ceil_rat(&(rat_int(&int(2 * self.period as i64)) / eps)).max(Int::one()))
    }
}

pub fn periodic_convergence(w: &Word) -> Result<PeriodicConvergence> {
    if w.is_empty() {
        return domain("empty cycle word");
    }
    Ok(PeriodicConvergence { period: w.len() })
}

/// The one-sided stream w^∞.
pub fn periodic_stream(w: &Word) -> Result<SymbolStream> {
    SymbolStream::periodic(Side::OneSided, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn per(w: &str) -> FiniteMeasure {
        FiniteMeasure::periodic(Word::from(w)).unwrap()
    }

    #[test]
    fn periodic_and_convex_values() {
        let m = per("011");
        assert_eq!(m.value(&Word::from("1")).unwrap(), rat(2, 3));
        assert_eq!(m.value(&Word::from("11")).unwrap(), rat(1, 3));
        assert_eq!(m.value(&Word::from("1101")).unwrap(), rat(1, 3));
        let c = FiniteMeasure::mix(&rat(1, 2), &per("0"), &per("1")).unwrap();
        assert_eq!(c.value(&Word::from("0")).unwrap(), rat(1, 2));
        assert_eq!(c.value(&Word::from("01")).unwrap(), rat(0, 1));
        assert!(FiniteMeasure::convex(vec![(rat(1, 3), per("0"))]).is_err());
    }

    #[test]
    fn empirical_examples() {
        let a2 = Alphabet::new(2).unwrap();
        let x = periodic_stream(&Word::from("01")).unwrap();
        let e3 = FiniteMeasure::empirical(&x, &int(3), 1, a2).unwrap();
        assert_eq!(e3.value(&Word::from("0")).unwrap(), rat(2, 3));
        assert_eq!(e3.value(&Word::from("1")).unwrap(), rat(1, 3));
        let e4 = FiniteMeasure::empirical(&x, &int(4), 2, a2).unwrap();
        let s: Vec<String> = e4.support(2).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(s, vec!["01", "10"]);
        // longer words fall back to the stream
        assert_eq!(e4.value(&Word::from("010")).unwrap(), rat(1, 2));
        let off = CylinderObservable::new(Word::from("1"), 2).unwrap();
        assert_eq!(e3.cylinder_value(&off).unwrap(), rat(2, 3));
    }

    #[test]
    fn supports() {
        let s = per("01").support(2).unwrap();
        assert_eq!(s.len(), 2);
        let c = FiniteMeasure::mix(&rat(1, 2), &per("0"), &per("1")).unwrap();
        assert_eq!(c.support(1).unwrap().len(), 2);
    }

    #[test]
    fn convergence_threshold() {
        let b = periodic_convergence(&Word::from("01")).unwrap();
        assert_eq!(b.bound(&int(8)), rat(1, 2));
        assert_eq!(b.threshold(&rat(1, 10)).unwrap(), int(40));
        assert_eq!(periodic_convergence(&Word::from("0")).unwrap().threshold(&rat(3, 1)).unwrap(), int(1));
    }
}
