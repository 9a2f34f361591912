//! Rational functions t^s · n(t)/d(t) over F_p, an exact model of Λ^Γ entries for Γ = gℤ with t = T^g.

use crate::novikov::PrimeField;

/// Polynomial over F_p, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<u32>);

impl Poly {
    fn trim(mut v: Vec<u32>) -> Poly {
        while v.last() == Some(&0) {
            v.pop();
        }
        Poly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> u32 {
        *self.0.last().unwrap_or(&0)
    }

    fn mul(&self, o: &Poly, f: PrimeField) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![0u32; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(*a, *b));
            }
        }
        Poly::trim(out)
    }

    /// self - t^k · o
    fn sub_shifted(&self, o: &Poly, k: usize, f: PrimeField) -> Poly {
        let mut out = self.0.clone();
        if out.len() < o.0.len() + k {
            out.resize(o.0.len() + k, 0);
        }
        for (j, b) in o.0.iter().enumerate() {
            out[j + k] = f.sub(out[j + k], *b);
        }
        Poly::trim(out)
    }

    fn scale(&self, c: u32, f: PrimeField) -> Poly {
        Poly::trim(self.0.iter().map(|a| f.mul(*a, c)).collect())
    }

    fn divrem(&self, d: &Poly, f: PrimeField) -> (Poly, Poly) {
        let inv = f.inv(d.lead());
        let mut r = self.0.clone();
        let mut qv = vec![0u32; self.0.len().saturating_sub(d.degree()).max(1)];
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = f.mul(*r.last().unwrap(), inv);
            qv[k] = c;
            for (j, b) in d.0.iter().enumerate() {
                r[j + k] = f.sub(r[j + k], f.mul(c, *b));
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        (Poly::trim(qv), Poly(r))
    }

    fn gcd(&self, o: &Poly, f: PrimeField) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, f);
            a = b;
            b = r;
        }
        let c = f.inv(a.lead());
        a.scale(c, f)
    }

    fn low_zeros(&self) -> usize {
        self.0.iter().take_while(|c| **c == 0).count()
    }

    fn drop_low(&self, k: usize) -> Poly {
        Poly(self.0[k..].to_vec())
    }
}

/// t^shift · num / den in lowest terms with num(0), den(0) nonzero and den monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly,
    shift: i64,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: Poly(Vec::new()), den: Poly(vec![1]), shift: 0 }
    }

    pub fn monomial(c: u32, shift: i64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            RatFn { num: Poly(vec![c]), den: Poly(vec![1]), shift }
        }
    }

    /// Σ c_k t^{e_k} with arbitrary integer exponents.
    pub fn from_terms(terms: &[(i64, u32)], f: PrimeField) -> Self {
        let Some(lo) = terms.iter().filter(|t| t.1 != 0).map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(lo);
        let mut v = vec![0u32; (hi - lo + 1) as usize];
        for (e, c) in terms {
            let k = (e - lo) as usize;
            v[k] = f.add(v[k], *c);
        }
        Self::normalize(Poly::trim(v), Poly(vec![1]), lo, f)
    }

    fn normalize(num: Poly, den: Poly, shift: i64, f: PrimeField) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let zn = num.low_zeros();
        let zd = den.low_zeros();
        let num = num.drop_low(zn);
        let den = den.drop_low(zd);
        let shift = shift + zn as i64 - zd as i64;
        let g = num.gcd(&den, f);
        let (num, den) = if g.degree() > 0 { (num.divrem(&g, f).0, den.divrem(&g, f).0) } else { (num, den) };
        let c = f.inv(den.lead());
        RatFn { num: num.scale(c, f), den: den.scale(c, f), shift }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// t-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.shift)
    }

    pub fn mul(&self, o: &RatFn, f: PrimeField) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::normalize(self.num.mul(&o.num, f), self.den.mul(&o.den, f), self.shift + o.shift, f)
    }

    pub fn div(&self, o: &RatFn, f: PrimeField) -> RatFn {
        assert!(!o.is_zero(), "division by zero rational function");
        if self.is_zero() {
            return Self::zero();
        }
        Self::normalize(self.num.mul(&o.den, f), self.den.mul(&o.num, f), self.shift - o.shift, f)
    }

    pub fn sub(&self, o: &RatFn, f: PrimeField) -> RatFn {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.neg(f);
        }
        let (s, k) = (self.shift.min(o.shift), (self.shift - o.shift).unsigned_abs() as usize);
        let a = self.num.mul(&o.den, f);
        let b = o.num.mul(&self.den, f);
        let num = if self.shift <= o.shift {
            a.sub_shifted(&b, k, f)
        } else {
            Poly(Vec::new()).sub_shifted(&b, 0, f).sub_shifted(&a.scale(f.neg(1), f), k, f)
        };
        Self::normalize(num, self.den.mul(&o.den, f), s, f)
    }

    pub fn neg(&self, f: PrimeField) -> RatFn {
        RatFn { num: self.num.scale(f.neg(1), f), den: self.den.clone(), shift: self.shift }
    }

    /// Laurent expansion: all terms t^e with e < `below`, as (e, coefficient).
    pub fn expand(&self, below: i64, f: PrimeField) -> Vec<(i64, u32)> {
        if self.is_zero() || self.shift >= below {
            return Vec::new();
        }
        let n = (below - self.shift) as usize;
        let d0inv = f.inv(self.den.0[0]);
        let mut q = vec![0u32; n];
        for k in 0..n {
            let mut c = *self.num.0.get(k).unwrap_or(&0);
            for j in 1..self.den.0.len().min(k + 1) {
                c = f.sub(c, f.mul(self.den.0[j], q[k - j]));
            }
            q[k] = f.mul(c, d0inv);
        }
        q.into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (self.shift + k as i64, c))
            .collect()
    }
}
