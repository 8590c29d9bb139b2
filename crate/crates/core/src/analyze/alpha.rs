//! Weight functions α: nondecreasing, unbounded and o(n).

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive};

use crate::error::{domain, Error, Result};
use crate::num::{ceil_sqrt, int, ln_int, pow_int, rat_int, Int, Rat};

#[derive(Clone)]
pub enum AlphaRule {
    /// ⌈√n⌉
    Sqrt,
    /// ⌈ln(n+1)⌉
    LogCeil,
    /// ⌈n^(p/q)⌉ with 0 < p < q
    Power(u32, u32),
    /// Explicit values α(1), α(2), …; the last value is held beyond the table.
    Table(Arc<Vec<Int>>),
}

#[derive(Clone)]
pub struct AlphaFunction {
    pub name: String,
    pub rule: AlphaRule,
}

impl fmt::Debug for AlphaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α[{}]", self.name)
    }
}

/// Outcome of the finite checks on the test grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaCertificate {
    pub nondecreasing: bool,
    /// Still growing between the grid levels 2^8, 2^32 and 2^64.
    pub unbounded: bool,
    /// α(N)/N ≤ envelope on the grid.
    pub sublinear: bool,
}

impl AlphaFunction {
    pub fn sqrt() -> Self {
        AlphaFunction { name: "sqrt".into(), rule: AlphaRule::Sqrt }
    }

    pub fn log_ceil() -> Self {
        AlphaFunction { name: "logceil".into(), rule: AlphaRule::LogCeil }
    }

    pub fn power(p: u32, q: u32) -> Result<Self> {
        if p == 0 || p >= q {
            return domain("power exponent must lie in (0, 1)");
        }
        Ok(AlphaFunction { name: format!("pow{p}/{q}"), rule: AlphaRule::Power(p, q) })
    }

    pub fn table(values: Vec<Int>) -> Result<Self> {
        if values.is_empty() {
            return domain("empty α table");
        }
        if values.iter().any(|v| v.is_negative()) {
            return domain("α values must be nonnegative");
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return domain("α table is not nondecreasing");
        }
        Ok(AlphaFunction { name: "table".into(), rule: AlphaRule::Table(Arc::new(values)) })
    }

    /// "sqrt", "logceil", "pow<p>/<q>".
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "sqrt" => Ok(Self::sqrt()),
            "logceil" | "log" => Ok(Self::log_ceil()),
            s if s.starts_with("pow") => {
                let (p, q) = s[3..].split_once('/').ok_or_else(|| Error::Domain(format!("bad power α {s:?}")))?;
                let p = p.parse().map_err(|_| Error::Domain(format!("bad power α {s:?}")))?;
                let q = q.parse().map_err(|_| Error::Domain(format!("bad power α {s:?}")))?;
                Self::power(p, q)
            }
            s => domain(format!("unknown α {s:?}")),
        }
    }

    pub fn eval(&self, n: &Int) -> Result<Int> {
        if !n.is_positive() {
            return domain("α is evaluated at n ≥ 1");
        }
        match &self.rule {
            AlphaRule::Sqrt => Ok(ceil_sqrt(n)),
            AlphaRule::LogCeil => ceil_ln(&(n + 1)),
            AlphaRule::Power(p, q) => {
                let v = num_traits::pow(n.clone(), *p as usize);
                let r = v.nth_root(*q);
                Ok(if num_traits::pow(r.clone(), *q as usize) == v { r } else { r + 1 })
            }
            AlphaRule::Table(t) => {
                let i = n.to_usize().unwrap_or(usize::MAX).min(t.len());
                Ok(t[i - 1].clone())
            }
        }
    }

    pub fn eval_u(&self, n: u64) -> Result<Int> {
        self.eval(&Int::from(n))
    }

    /// Finite checks of membership in the weight family on n = 2^j, j ≤ 64:
    /// monotone samples, α(2^64) ≥ 2·α(2^8) (growth), α(N)/N ≤ 2^-j/2
    /// from j = 16 on.
    pub fn certify(&self) -> Result<AlphaCertificate> {
        let grid: Vec<Int> = (0..=64).map(|j| pow_int(2, j)).collect();
        let vals: Vec<Int> = grid.iter().map(|n| self.eval(n)).collect::<Result<_>>()?;
        let nondecreasing = vals.windows(2).all(|w| w[0] <= w[1]);
        let unbounded = vals[64] >= &vals[8] * 2 && vals[64] > vals[32];
        let sublinear = (16..=64).all(|j| {
            let lhs = rat_int(&vals[j]) / rat_int(&grid[j]);
            lhs <= Rat::new(Int::one(), pow_int(2, j / 2))
        });
        Ok(AlphaCertificate { nondecreasing, unbounded, sublinear })
    }

    /// Finite proxy of liminf α(n)/ln n = ∞: α(n_j)/ln n_j ≥ j on n_j = 2^(8j),
    /// j = 1..8. Returns the first violating n.
    pub fn liminf_log_proxy(&self) -> Result<()> {
        for j in 1..=8u32 {
            let n = pow_int(2, 8 * j as usize);
            let a = self.eval(&n)?;
            let ratio = a.to_f64().unwrap_or(f64::INFINITY) / ln_int(&n);
            if ratio < j as f64 {
                return domain(format!("α fails the liminf α(n)/ln n proxy at n = {n} (ratio {ratio:.3} < {j})"));
            }
        }
        Ok(())
    }
}

/// ⌈ln v⌉ for v ≥ 1: the least k with e^k ≥ v.
fn ceil_ln(v: &Int) -> Result<Int> {
    let l = ln_int(v);
    let k = l.ceil();
    if (l - l.round()).abs() < 1e-12 * (1.0 + l.abs()) {
        return Err(Error::Precision(format!("ln({v}) is too close to an integer")));
    }
    Ok(int(k as i64))
}

/// α(i)·t as an exact rational.
pub fn alpha_threshold(alpha: &AlphaFunction, i: &Int, t: &Rat) -> Result<Rat> {
    Ok(rat_int(&alpha.eval(i)?) * t)
}
