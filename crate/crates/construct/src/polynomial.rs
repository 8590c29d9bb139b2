//! α-DC1 pairs for the polynomial metric d₁ on {0,1}^ℤ: long runs of 0s let
//! the cumulative distance stay below α(i)·2^-k on most of [1, b_k], while
//! ξ-dependent constant blocks separate members.

use num_traits::{One, Zero};

use shiftlab_core::analyze::{AlphaFunction, Checkpoint};
use shiftlab_core::error::{Error, Result};
use shiftlab_core::num::{int, neg_pow, pow_int, rat, rat_int, Int, Rat};
use shiftlab_core::symbolic::stream::StreamBuilder;
use shiftlab_core::symbolic::{Cycle, SymbolStream, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialStage {
    pub k: usize,
    /// d^{k−1}_{k−1} (0 before the first stage).
    pub prev: Int,
    pub a: Int,
    pub b: Int,
    pub c: Int,
    /// d^1 … d^k.
    pub d: Vec<Int>,
}

#[derive(Clone, Debug)]
pub struct PolynomialFamily {
    pub alpha: AlphaFunction,
    pub stages: Vec<PolynomialStage>,
}

/// S(i) on [prev, b] is at most prev + 1 + ln b, and ln b ≤ (7/10)·bits(b).
fn budget(prev: &Int, b: &Int) -> Rat {
    rat_int(&(prev + 1)) + rat(7, 10) * rat_int(&int(b.bits() as i64))
}

/// Least a ≥ prev + 1 with α(a)·2^-k > budget(prev, 2^k·a).
fn least_a(alpha: &AlphaFunction, k: usize, prev: &Int) -> Result<Int> {
    let t = neg_pow(2, k);
    let scale = pow_int(2, k);
    let holds = |a: &Int| -> Result<bool> { Ok(rat_int(&alpha.eval(a)?) * &t > budget(prev, &(a * &scale))) };
    let start = prev + 1;
    if holds(&start)? {
        return Ok(start);
    }
    let mut step = Int::one();
    let mut steps = 0;
    while !holds(&(&start + &step))? {
        step *= 2;
        steps += 1;
        if steps > 4096 {
            return Err(Error::Budget(format!("stage {k}: α never clears the closeness budget")));
        }
    }
    // !holds(start + step/2), holds(start + step)
    let (mut lo, mut hi) = (&start + (&step / 2), &start + &step);
    while &hi - &lo > Int::one() {
        let mid: Int = (&lo + &hi) / 2;
        if holds(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn polynomial_construction(alpha: &AlphaFunction, stages: usize, horizon: Option<&Int>) -> Result<PolynomialFamily> {
    alpha.liminf_log_proxy()?;
    if stages == 0 {
        return Err(Error::Domain("stages must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut prev = Int::zero();
    for k in 1..=stages {
        let a = least_a(alpha, k, &prev)?;
        let scale = pow_int(2, k);
        let b = &a * &scale;
        let c: Int = &b * 2 + 1;
        let mut d = vec![&c * &scale];
        for _ in 1..k {
            let next = d.last().unwrap() * &scale;
            d.push(next);
        }
        let last = d.last().unwrap().clone();
        if horizon.is_some_and(|h| &last > h) {
            break;
        }
        out.push(PolynomialStage { k, prev: prev.clone(), a, b, c, d });
        prev = last;
    }
    if out.is_empty() {
        return Err(Error::Domain("the horizon ends before the first stage".into()));
    }
    Ok(PolynomialFamily { alpha: alpha.clone(), stages: out })
}

impl PolynomialFamily {
    pub fn end(&self) -> Int {
        self.stages.last().unwrap().d.last().unwrap().clone()
    }

    /// x_ξ: 0 on negative coordinates and on (prev, c_k]; symbol ξ_l on
    /// (d^{l−1}, d^l] with d^0 = c_k; the final block's symbol continues.
    pub fn member(&self, xi: &[u8]) -> Result<SymbolStream> {
        let zero = Cycle::from_word(&Word::from("0"));
        let one = Cycle::from_word(&Word::from("1"));
        let mut b = StreamBuilder::two_sided(zero.clone(), int(0), int(1));
        let mut last = zero.clone();
        for st in &self.stages {
            b.push_periodic(zero.clone(), &(&st.c - &st.prev), int(0));
            let mut lo = st.c.clone();
            for (l, d) in st.d.iter().enumerate() {
                let cyc = if xi.get(l).is_some_and(|&v| v != 0) { one.clone() } else { zero.clone() };
                b.push_periodic(cyc.clone(), &(d - &lo), int(0));
                lo = d.clone();
                last = cyc;
            }
        }
        // the last block continues, so pairs differing there stay apart
        b.finish(last)
    }

    /// Φ(t, α) ≥ 1 − 2^-k at b_k for t = 2^-k.
    pub fn closeness(&self) -> Vec<Checkpoint> {
        self.stages.iter().map(|s| Checkpoint::above(s.b.clone(), neg_pow(2, s.k), neg_pow(2, s.k))).collect()
    }

    /// Ends d^l_k of blocks where ξ and η differ; the block fills all but
    /// 2^-k of [1, d^l_k].
    pub fn separation(&self, xi: &[u8], eta: &[u8]) -> Vec<Checkpoint> {
        let bit = |v: &[u8], l: usize| v.get(l).is_some_and(|&b| b != 0);
        let mut out = Vec::new();
        for s in &self.stages {
            for (l, d) in s.d.iter().enumerate() {
                if bit(xi, l) != bit(eta, l) {
                    out.push(Checkpoint::new(d.clone(), neg_pow(2, s.k) * rat_int(&int(2))));
                }
            }
        }
        out
    }

    /// Exact re-check of the stage inequalities.
    pub fn verify(&self) -> Result<bool> {
        let mut prev = Int::zero();
        for s in &self.stages {
            let scale = pow_int(2, s.k);
            let t = neg_pow(2, s.k);
            let ok = s.prev == prev
                && s.a > prev
                && s.b == &s.a * &scale
                && s.c == &s.b * 2 + 1
                && rat_int(&self.alpha.eval(&s.a)?) * &t > budget(&prev, &s.b)
                && s.d.len() == s.k
                && s.d.iter().enumerate().all(|(l, d)| *d == if l == 0 { &s.c * &scale } else { &s.d[l - 1] * &scale });
            if !ok {
                return Ok(false);
            }
            prev = s.d.last().unwrap().clone();
        }
        Ok(true)
    }
}
