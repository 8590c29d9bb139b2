//! β-shifts through the Parry criterion on the quasi-greedy expansion of 1,
//! with exact arithmetic for rational and real quadratic β.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::num::{int, parse_rat, Int, Rat};
use crate::symbolic::{Symbol, Word};

/// p + q·√d with d a positive non-square (q = 0 when d = 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    pub p: Rat,
    pub q: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadField {
    pub d: u64,
}

impl QuadField {
    pub fn rational(&self, v: Rat) -> Quad {
        Quad { p: v, q: Rat::zero() }
    }

    pub fn add(&self, a: &Quad, b: &Quad) -> Quad {
        Quad { p: &a.p + &b.p, q: &a.q + &b.q }
    }

    pub fn sub(&self, a: &Quad, b: &Quad) -> Quad {
        Quad { p: &a.p - &b.p, q: &a.q - &b.q }
    }

    pub fn mul(&self, a: &Quad, b: &Quad) -> Quad {
        let d = Rat::from_integer(int(self.d as i64));
        Quad { p: &a.p * &b.p + &a.q * &b.q * d, q: &a.p * &b.q + &a.q * &b.p }
    }

    pub fn inv(&self, a: &Quad) -> Result<Quad> {
        let d = Rat::from_integer(int(self.d as i64));
        let norm = &a.p * &a.p - &a.q * &a.q * d;
        if norm.is_zero() {
            return domain("division by zero in quadratic field");
        }
        Ok(Quad { p: &a.p / &norm, q: -&a.q / &norm })
    }

    /// Exact sign of p + q√d.
    pub fn sign(&self, a: &Quad) -> i32 {
        let sp = sgn(&a.p);
        let sq = sgn(&a.q);
        if sq == 0 || self.d == 1 {
            return sgn(&(&a.p + &a.q));
        }
        if sp == 0 {
            return sq;
        }
        if sp == sq {
            return sp;
        }
        // opposite signs: compare p^2 with q^2 d
        let lhs = &a.p * &a.p;
        let rhs = &a.q * &a.q * Rat::from_integer(int(self.d as i64));
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sp,
            std::cmp::Ordering::Less => sq,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self, a: &Quad) -> f64 {
        a.p.to_f64().unwrap_or(0.0) + a.q.to_f64().unwrap_or(0.0) * (self.d as f64).sqrt()
    }

    pub fn floor(&self, a: &Quad) -> Int {
        let mut k = Int::from(self.to_f64(a).floor() as i64);
        loop {
            let diff = self.sub(a, &self.rational(Rat::from_integer(k.clone())));
            if self.sign(&diff) < 0 {
                k -= 1;
                continue;
            }
            let next = self.sub(&diff, &self.rational(Rat::one()));
            if self.sign(&next) >= 0 {
                k += 1;
                continue;
            }
            return k;
        }
    }
}

fn sgn(v: &Rat) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// An exactly represented β > 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaValue {
    pub field: QuadField,
    pub value: Quad,
}

impl BetaValue {
    pub fn rational(v: Rat) -> Result<Self> {
        if v <= Rat::one() {
            return domain("β must exceed 1");
        }
        Ok(BetaValue { field: QuadField { d: 1 }, value: Quad { p: v, q: Rat::zero() } })
    }

    /// p + q√d.
    pub fn quadratic(p: Rat, q: Rat, d: u64) -> Result<Self> {
        let r = (d as f64).sqrt().round() as u64;
        if r * r == d {
            return Self::rational(p + q * Rat::from_integer(int(r as i64)));
        }
        let b = BetaValue { field: QuadField { d }, value: Quad { p, q } };
        if b.field.sign(&b.field.sub(&b.value, &b.field.rational(Rat::one()))) <= 0 {
            return domain("β must exceed 1");
        }
        Ok(b)
    }

    pub fn golden() -> Self {
        Self::quadratic(Rat::new(int(1), int(2)), Rat::new(int(1), int(2)), 5).unwrap()
    }

    /// Accepts "golden", "p/q", decimals, or "p+q*sqrt(d)" with rational p, q.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().replace(' ', "");
        if t == "golden" {
            return Ok(Self::golden());
        }
        if let Some(idx) = t.find("sqrt(") {
            let close = t[idx..].find(')').map(|c| c + idx).ok_or_else(|| Error::Domain(format!("bad β {s:?}")))?;
            let d: u64 = t[idx + 5..close].parse().map_err(|_| Error::Domain(format!("bad β {s:?}")))?;
            let head = &t[..idx];
            let (p, q) = match head.rfind(['+', '-']).filter(|&k| k > 0) {
                Some(k) => {
                    let p = parse_rat(&head[..k])?;
                    let coef = head[k..].trim_end_matches('*');
                    let q = match coef {
                        "+" => Rat::one(),
                        "-" => -Rat::one(),
                        c => parse_rat(c)?,
                    };
                    (p, q)
                }
                None => {
                    let coef = head.trim_end_matches('*');
                    (Rat::zero(), if coef.is_empty() { Rat::one() } else { parse_rat(coef)? })
                }
            };
            return Self::quadratic(p, q, d);
        }
        Self::rational(parse_rat(&t)?)
    }

    pub fn to_f64(&self) -> f64 {
        self.field.to_f64(&self.value)
    }

    /// Largest digit: ⌊β⌋, or β-1 when β is an integer.
    pub fn max_digit(&self) -> usize {
        let f = self.field.floor(&self.value);
        let frac = self.field.sub(&self.value, &self.field.rational(Rat::from_integer(f.clone())));
        let f = f.to_usize().unwrap();
        if self.field.sign(&frac) == 0 {
            f - 1
        } else {
            f
        }
    }
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.d == 1 {
            write!(f, "{}", crate::num::fmt_rat(&self.value.p))
        } else {
            write!(
                f,
                "{}+{}*sqrt({})",
                crate::num::fmt_rat(&self.value.p),
                crate::num::fmt_rat(&self.value.q),
                self.field.d
            )
        }
    }
}

/// Greedy digits of x ∈ [0,1): i_n = j when f^(n-1)(x) ∈ [j/β, (j+1)/β).
pub fn beta_expand(beta: &BetaValue, x: &Rat, depth: usize) -> Result<Word> {
    beta_expand_in_field(beta, &beta.field.rational(x.clone()), depth)
}

/// Same for x in β's quadratic field (e.g. x = β - 1).
pub fn beta_expand_in_field(beta: &BetaValue, x: &Quad, depth: usize) -> Result<Word> {
    let f = beta.field;
    if f.sign(x) < 0 || f.sign(&f.sub(x, &f.rational(Rat::one()))) >= 0 {
        return domain("x must lie in [0,1)");
    }
    let mut r = x.clone();
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let y = f.mul(&beta.value, &r);
        let j = f.floor(&y);
        r = f.sub(&y, &f.rational(Rat::from_integer(j.clone())));
        out.push(j.to_u8().ok_or_else(|| Error::Precision("digit overflow".into()))?);
    }
    Ok(Word(out))
}

/// Exact residual x - Σ i_n β^-n and the bound β^-depth, in β's field.
pub fn reconstruction(beta: &BetaValue, x: &Rat, digits: &Word) -> Result<(Quad, Quad)> {
    let f = beta.field;
    let inv = f.inv(&beta.value)?;
    let mut pow = f.rational(Rat::one());
    let mut sum = f.rational(Rat::zero());
    for &d in digits.symbols() {
        pow = f.mul(&pow, &inv);
        sum = f.add(&sum, &f.mul(&pow, &f.rational(Rat::from_integer(int(d as i64)))));
    }
    Ok((f.sub(&f.rational(x.clone()), &sum), pow))
}

/// Digits of the quasi-greedy expansion i*(1,β).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneExpansion {
    /// prefix followed by cycle^∞
    Eventually { prefix: Vec<Symbol>, cycle: Vec<Symbol> },
    /// known only to the listed depth
    Truncated(Vec<Symbol>),
}

impl OneExpansion {
    pub fn digits(&self, k: usize) -> Result<Vec<Symbol>> {
        match self {
            OneExpansion::Eventually { prefix, cycle } => {
                let mut v: Vec<Symbol> = prefix.iter().copied().take(k).collect();
                let mut i = 0;
                while v.len() < k {
                    v.push(cycle[i % cycle.len()]);
                    i += 1;
                }
                Ok(v)
            }
            OneExpansion::Truncated(d) => {
                if k > d.len() {
                    return Err(Error::Precision(format!("expansion of 1 known to {} digits, {k} needed", d.len())));
                }
                Ok(d[..k].to_vec())
            }
        }
    }

    /// Longest run of zeros (None when unbounded or unknown).
    pub fn max_zero_run(&self) -> Option<usize> {
        match self {
            OneExpansion::Eventually { prefix, cycle } => {
                if cycle.iter().all(|&c| c == 0) {
                    return None;
                }
                let seq: Vec<Symbol> = prefix.iter().chain(cycle.iter()).chain(cycle.iter()).copied().collect();
                let mut best = 0;
                let mut run = 0;
                for &s in &seq {
                    run = if s == 0 { run + 1 } else { 0 };
                    best = best.max(run);
                }
                Some(best)
            }
            OneExpansion::Truncated(_) => None,
        }
    }
}

/// β-shift model. Either β is exact (and i*(1,β) is derived) or the model is
/// defined directly by a purely periodic i*(1,β).
#[derive(Clone, Debug, PartialEq)]
pub struct BetaModel {
    pub beta: Option<BetaValue>,
    pub approx: f64,
    pub max_digit: usize,
    pub one: OneExpansion,
}

impl BetaModel {
    /// `precision` caps the number of expansion digits computed.
    pub fn new(beta: BetaValue, precision: usize) -> Result<Self> {
        let f = beta.field;
        let b = beta.max_digit();
        let mut r = f.rational(Rat::one());
        let mut greedy: Vec<Symbol> = Vec::new();
        let mut seen: HashMap<Quad, usize> = HashMap::new();
        let one = loop {
            if greedy.len() >= precision {
                break OneExpansion::Truncated(greedy);
            }
            let y = f.mul(&beta.value, &r);
            let j = f.floor(&y);
            r = f.sub(&y, &f.rational(Rat::from_integer(j.clone())));
            greedy.push(j.to_u8().unwrap());
            if f.sign(&r) == 0 {
                // finite greedy expansion: i* = (d1 .. d_{n-1} (d_n - 1))^∞
                let mut c = greedy.clone();
                *c.last_mut().unwrap() -= 1;
                break OneExpansion::Eventually { prefix: Vec::new(), cycle: c };
            }
            if let Some(&at) = seen.get(&r) {
                let prefix = greedy[..at].to_vec();
                let cycle = greedy[at..].to_vec();
                break OneExpansion::Eventually { prefix, cycle };
            }
            seen.insert(r.clone(), greedy.len());
        };
        let approx = beta.to_f64();
        Ok(Self { beta: Some(beta), approx, max_digit: b, one })
    }

    /// Model whose i*(1,β) is `cycle`^∞; the cycle must satisfy Parry's
    /// self-admissibility and encode some β > 1.
    pub fn from_periodic_expansion(cycle: Vec<Symbol>) -> Result<Self> {
        if cycle.is_empty() || cycle.iter().all(|&c| c == 0) {
            return domain("expansion of 1 must have a nonzero digit");
        }
        let p = cycle.len();
        let rot = |k: usize| -> Vec<Symbol> { (0..p).map(|i| cycle[(i + k) % p]).collect() };
        if (1..p).any(|k| rot(k) > cycle) {
            return domain("digit sequence is not the expansion of 1 of any β");
        }
        let value = |beta: f64| -> f64 {
            // Σ d_k β^-k over the infinite periodic sequence
            let mut s = 0.0;
            let mut w = 1.0;
            for &d in &cycle {
                w /= beta;
                s += d as f64 * w;
            }
            s / (1.0 - w)
        };
        let max_digit = *cycle.iter().max().unwrap() as usize;
        let (mut lo, mut hi) = (1.0 + 1e-12, max_digit as f64 + 2.0);
        if value(lo) < 1.0 {
            return domain("digit sequence encodes β ≤ 1");
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if value(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Self { beta: None, approx: 0.5 * (lo + hi), max_digit, one: OneExpansion::Eventually { prefix: Vec::new(), cycle } })
    }

    pub fn alphabet_size(&self) -> usize {
        self.max_digit + 1
    }

    /// Parry criterion on every suffix of w.
    pub fn admissible(&self, w: &Word) -> Result<bool> {
        let s = w.symbols();
        if s.iter().any(|&d| d as usize > self.max_digit) {
            return Ok(false);
        }
        let star = self.one.digits(s.len())?;
        Ok((0..s.len()).all(|k| s[k..] <= star[..s.len() - k]))
    }

    /// uwv admissible with |w| = L; zeros first, then lexicographic search.
    pub fn bridge(&self, u: &Word, v: &Word, len: usize) -> Result<Option<Word>> {
        let zeros = Word(vec![0; len]);
        if self.admissible(&u.concat(&zeros).concat(v))? {
            return Ok(Some(zeros));
        }
        if len > 20 {
            return Ok(None);
        }
        let mut cur = u.0.clone();
        let target = u.len() + len;
        self.search(&mut cur, target, v)
    }

    fn search(&self, cur: &mut Vec<Symbol>, target: usize, v: &Word) -> Result<Option<Word>> {
        if cur.len() == target {
            let mut full = cur.clone();
            full.extend_from_slice(v.symbols());
            if self.admissible(&Word(full))? {
                return Ok(Some(Word(Vec::new())));
            }
            return Ok(None);
        }
        for d in 0..=self.max_digit as Symbol {
            cur.push(d);
            if self.admissible(&Word(cur.clone()))? {
                if let Some(mut rest) = self.search(cur, target, v)? {
                    rest.0.insert(0, d);
                    cur.pop();
                    return Ok(Some(rest));
                }
            }
            cur.pop();
        }
        Ok(None)
    }

    /// Gap length after which any admissible continuation is allowed.
    pub fn zero_gap(&self) -> Option<usize> {
        self.one.max_zero_run().map(|r| r + 1)
    }
}

/// Increasing β_1 < … < β_count < β whose quasi-greedy expansions are the
/// purely periodic truncations (i*_1 … i*_{N-1} (i*_N − 1))^∞, N ≤ 12.
pub fn nested_beta_family(model: &BetaModel, count: usize) -> Result<Vec<BetaModel>> {
    let mut out: Vec<BetaModel> = Vec::new();
    if count == 0 {
        return Ok(out);
    }
    let star = model.one.digits(12)?;
    for n in 1..=12 {
        if star[n - 1] == 0 {
            continue;
        }
        let mut c = star[..n].to_vec();
        c[n - 1] -= 1;
        if let Ok(m) = BetaModel::from_periodic_expansion(c) {
            if m.approx < model.approx && out.last().is_none_or(|l: &BetaModel| l.approx < m.approx) {
                out.push(m);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
    }
    Err(Error::Budget(format!("only {} specification parameters below β with period ≤ 12", out.len())))
}

/// All admissible words of length `len`.
pub fn beta_words(model: &BetaModel, len: usize) -> Result<Vec<Word>> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for d in 0..=model.max_digit as Symbol {
                let mut v = w.0.clone();
                v.push(d);
                let v = Word(v);
                if model.admissible(&v)? {
                    next.push(v);
                }
            }
        }
        out = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn golden_expansion_of_one() {
        let m = BetaModel::new(BetaValue::golden(), 64).unwrap();
        assert_eq!(m.one, OneExpansion::Eventually { prefix: vec![], cycle: vec![1, 0] });
        assert!(!m.admissible(&Word::from("11")).unwrap());
        assert!(m.admissible(&Word::from("1010")).unwrap());
        assert_eq!(m.max_digit, 1);
    }

    #[test]
    fn expansions() {
        let two = BetaValue::rational(rat(2, 1)).unwrap();
        assert_eq!(beta_expand(&two, &rat(1, 2), 4).unwrap(), Word::from("1000"));
        assert_eq!(beta_expand(&two, &rat(1, 3), 6).unwrap(), Word::from("010101"));
        let g = BetaValue::golden();
        let f = g.field;
        // β·(β-1) = 1 lands exactly on the left end of J_1
        let x = f.sub(&g.value, &f.rational(Rat::one()));
        assert_eq!(beta_expand_in_field(&g, &x, 3).unwrap(), Word::from("100"));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(BetaValue::parse("golden").unwrap(), BetaValue::golden());
        assert_eq!(BetaValue::parse("1/2+1/2*sqrt(5)").unwrap(), BetaValue::golden());
        assert_eq!(BetaValue::parse("1.5").unwrap().max_digit(), 1);
        assert_eq!(BetaValue::parse("3").unwrap().max_digit(), 2);
        assert!(BetaValue::parse("1").is_err());
    }

    #[test]
    fn nested_family_for_two() {
        let m = BetaModel::new(BetaValue::rational(rat(2, 1)).unwrap(), 64).unwrap();
        assert_eq!(m.one, OneExpansion::Eventually { prefix: vec![], cycle: vec![1] });
        let fam = nested_beta_family(&m, 3).unwrap();
        assert_eq!(fam.len(), 3);
        assert!((fam[0].approx - 1.618033988).abs() < 1e-6);
        assert!(fam.windows(2).all(|w| w[0].approx < w[1].approx));
        assert!(nested_beta_family(&m, 0).unwrap().is_empty());
    }
}
