use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Exact;

/// Default number of digits.
pub const DEFAULT_PRECISION: usize = 16;

/// `p^l · Σ digits[i] p^i`, known modulo `p^(l + digits.len())`.
///
/// Stored canonically: `l ≤ 0`, and a negative `l` comes with a nonzero
/// leading digit unless no digit is known at all. Numbers of nonnegative
/// valuation therefore always sit in the `l = 0` form, leading zeros kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u32,
    l: i64,
    digits: Vec<u32>,
}

/// `‖x‖_p`, with a flag for numbers that vanish to the known precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Norm {
    pub value: Exact,
    pub zero_to_precision: bool,
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{p} is not prime")))
    }
}

impl PAdic {
    /// Builds and canonicalizes `p^l · Σ digits[i] p^i`.
    pub fn from_digits(p: u32, l: i64, digits: Vec<u32>) -> Result<PAdic> {
        check_prime(p)?;
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::Domain(format!("digit {d} out of range for p = {p}")));
        }
        Ok(PAdic::canonical(p, l, digits))
    }

    fn canonical(p: u32, mut l: i64, mut digits: Vec<u32>) -> PAdic {
        if l > 0 {
            let mut d = vec![0; l as usize];
            d.extend(digits);
            digits = d;
            l = 0;
        }
        let lead = digits.iter().take_while(|&&d| d == 0).count() as i64;
        if l < 0 {
            let strip = lead.min(-l);
            if strip == digits.len() as i64 && strip < -l {
                // Nothing significant known below p^0.
                return PAdic { p, l: l + strip, digits: Vec::new() };
            }
            digits.drain(..strip as usize);
            l += strip;
        }
        PAdic { p, l, digits }
    }

    /// `n mod p^prec`, in the `l = 0` form.
    pub fn from_int(p: u32, n: impl Into<BigInt>, prec: usize) -> Result<PAdic> {
        check_prime(p)?;
        Ok(PAdic { p, l: 0, digits: digits_of(&n.into(), p, prec) })
    }

    /// The rational `num/den` with `prec` significant digits.
    pub fn from_ratio(p: u32, num: impl Into<BigInt>, den: impl Into<BigInt>, prec: usize) -> Result<PAdic> {
        check_prime(p)?;
        let (mut num, mut den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(PAdic { p, l: 0, digits: vec![0; prec] });
        }
        let pb = BigInt::from(p);
        let mut v = 0i64;
        while num.is_multiple_of(&pb) {
            num /= &pb;
            v += 1;
        }
        while den.is_multiple_of(&pb) {
            den /= &pb;
            v -= 1;
        }
        let modulus = pb.pow(prec as u32);
        let inv = mod_inverse(&den, &modulus)
            .ok_or_else(|| Error::Internal("denominator not invertible".into()))?;
        let unit = (num * inv).mod_floor(&modulus);
        Ok(PAdic::canonical(p, v, digits_of(&unit, p, prec)))
    }

    pub fn from_exact(p: u32, x: &Exact, prec: usize) -> Result<PAdic> {
        PAdic::from_ratio(p, x.numer().clone(), x.denom().clone(), prec)
    }

    /// The zero of `Z_p` known to `prec` digits.
    pub fn zero(p: u32, prec: usize) -> Result<PAdic> {
        PAdic::from_int(p, 0, prec)
    }

    /// Uniform on `Z_p / p^prec Z_p`.
    pub fn random_zp<R: Rng + ?Sized>(p: u32, prec: usize, rng: &mut R) -> Result<PAdic> {
        check_prime(p)?;
        Ok(PAdic { p, l: 0, digits: (0..prec).map(|_| rng.random_range(0..p)).collect() })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// The stored offset `l` (nonpositive).
    pub fn offset(&self) -> i64 {
        self.l
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Number of stored digits.
    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// The value is known modulo `p^absolute_precision()`.
    pub fn absolute_precision(&self) -> i64 {
        self.l + self.digits.len() as i64
    }

    /// Digit at absolute position `t`, if known.
    pub fn digit_at(&self, t: i64) -> Option<u32> {
        if t >= self.absolute_precision() {
            None
        } else if t < self.l {
            Some(0)
        } else {
            Some(self.digits[(t - self.l) as usize])
        }
    }

    /// Least position with a nonzero digit; `None` when zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        self.digits.iter().position(|&d| d != 0).map(|i| self.l + i as i64)
    }

    /// Valuation, or the absolute precision for numbers zero to precision.
    fn effective_valuation(&self) -> i64 {
        self.valuation().unwrap_or_else(|| self.absolute_precision())
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn is_integral(&self) -> bool {
        self.l == 0
    }

    pub fn norm(&self) -> Norm {
        match self.valuation() {
            Some(v) => Norm { value: Exact::pow(self.p as u64, -v), zero_to_precision: false },
            None => Norm { value: Exact::zero(), zero_to_precision: true },
        }
    }

    fn same_prime(&self, other: &PAdic) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::Domain(format!("prime mismatch: {} and {}", self.p, other.p)))
        }
    }

    /// Drops digits at positions `≥ n`.
    pub fn truncate(&self, n: i64) -> PAdic {
        if n >= self.absolute_precision() {
            return self.clone();
        }
        let keep = (n - self.l).max(0) as usize;
        if keep == 0 {
            return PAdic::canonical(self.p, n, Vec::new());
        }
        PAdic::canonical(self.p, self.l, self.digits[..keep].to_vec())
    }

    /// Schoolbook addition from the lowest known position upwards.
    pub fn add(&self, other: &PAdic) -> Result<PAdic> {
        self.same_prime(other)?;
        let n = self.absolute_precision().min(other.absolute_precision());
        let lo = self.l.min(other.l);
        let p = self.p as u64;
        let mut out = Vec::with_capacity((n - lo).max(0) as usize);
        let mut carry = 0u64;
        for t in lo..n {
            let s = self.digit_at(t).unwrap() as u64 + other.digit_at(t).unwrap() as u64 + carry;
            out.push((s % p) as u32);
            carry = s / p;
        }
        Ok(PAdic::canonical(self.p, lo, out))
    }

    pub fn neg(&self) -> PAdic {
        let p = self.p;
        let mut out = self.digits.clone();
        if let Some(i) = out.iter().position(|&d| d != 0) {
            out[i] = p - out[i];
            for d in &mut out[i + 1..] {
                *d = p - 1 - *d;
            }
        }
        PAdic { p, l: self.l, digits: out }
    }

    pub fn sub(&self, other: &PAdic) -> Result<PAdic> {
        self.add(&other.neg())
    }

    /// Schoolbook product. The result is known to
    /// `min(N_x + v_y, N_y + v_x)` absolute digits, capped at the larger
    /// input precision.
    pub fn mul(&self, other: &PAdic) -> Result<PAdic> {
        self.same_prime(other)?;
        let (nx, ny) = (self.absolute_precision(), other.absolute_precision());
        let n = (nx + other.effective_valuation())
            .min(ny + self.effective_valuation())
            .min(nx.max(ny));
        let base = self.l + other.l;
        let len = (n - base).max(0) as usize;
        let p = self.p as u128;
        let mut acc = vec![0u128; len];
        for (i, &a) in self.digits.iter().enumerate().take(len) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.digits.iter().enumerate().take(len - i) {
                acc[i + j] += a as u128 * b as u128;
            }
        }
        let mut carry = 0u128;
        let out = acc
            .into_iter()
            .map(|s| {
                let s = s + carry;
                carry = s / p;
                (s % p) as u32
            })
            .collect();
        if len == 0 {
            return Ok(PAdic::canonical(self.p, n, Vec::new()));
        }
        Ok(PAdic::canonical(self.p, base, out))
    }

    /// `p^l · r` with `0 ≤ r < p^precision`.
    pub fn to_residue(&self) -> (i64, BigInt) {
        let p = BigInt::from(self.p);
        let r = self.digits.iter().rev().fold(BigInt::zero(), |acc, &d| acc * &p + d);
        (self.l, r)
    }

    /// Least nonnegative integer congruent to an integral number, modulo
    /// `p^absolute_precision`.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integral().then(|| self.to_residue().1)
    }
}

/// Distance `‖x − y‖_p`. Numbers agreeing to the known precision are at
/// distance 0, which makes this the metric of the truncated quotient.
pub fn padic_dist(x: &PAdic, y: &PAdic) -> Result<Exact> {
    Ok(x.sub(y)?.norm().value)
}

fn digits_of(n: &BigInt, p: u32, prec: usize) -> Vec<u32> {
    let pb = BigInt::from(p);
    let mut r = n.mod_floor(&pb.pow(prec as u32));
    let mut out = Vec::with_capacity(prec);
    for _ in 0..prec {
        let (q, d) = r.div_mod_floor(&pb);
        out.push(d.to_u32().unwrap());
        r = q;
    }
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() && !(m.is_one()) {
        return None;
    }
    Some(e.x.mod_floor(m))
}

impl PartialOrd for PAdic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An arbitrary total order (by prime, offset, then digits read from the
/// top), used only to make enumerations deterministic.
impl Ord for PAdic {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.l, self.digits.len())
            .cmp(&(other.p, other.l, other.digits.len()))
            .then_with(|| self.digits.iter().rev().cmp(other.digits.iter().rev()))
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        let sep = if self.p > 10 { "," } else { "" };
        write!(f, "p={};l={};digits={}", self.p, self.l, digits.join(sep))
    }
}

impl FromStr for PAdic {
    type Err = Error;

    /// `p=<prime>;l=<offset>;digits=<d0d1...>`, lowest digit first. For
    /// primes above 10 the digits are comma separated.
    fn from_str(s: &str) -> Result<PAdic> {
        let bad = |why: &str| Error::Parse(format!("bad p-adic literal {s:?}: {why}"));
        let (mut p, mut l, mut digits) = (None, None, None);
        for part in s.trim().split(';') {
            let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match k.trim() {
                "p" => p = Some(v.trim().parse::<u32>().map_err(|_| bad("prime"))?),
                "l" => l = Some(v.trim().parse::<i64>().map_err(|_| bad("offset"))?),
                "digits" => digits = Some(v.trim().to_string()),
                other => return Err(bad(&format!("unknown key {other}"))),
            }
        }
        let p = p.ok_or_else(|| bad("missing p"))?;
        let l = l.unwrap_or(0);
        let raw = digits.ok_or_else(|| bad("missing digits"))?;
        let digits: Vec<u32> = if raw.is_empty() {
            Vec::new()
        } else if raw.contains(',') || p > 10 {
            raw.split(',')
                .map(|d| d.trim().parse().map_err(|_| bad("digit")))
                .collect::<Result<_>>()?
        } else {
            raw.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| bad("digit")))
                .collect::<Result<_>>()?
        };
        PAdic::from_digits(p, l, digits)
    }
}

impl Serialize for PAdic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PAdic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<PAdic, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Sign-aware helper for tests and reports: the integer in `(-p^N/2, p^N/2]`
/// congruent to an integral number.
pub fn balanced_integer(x: &PAdic) -> Option<BigInt> {
    let r = x.to_integer()?;
    let m = BigInt::from(x.prime()).pow(x.absolute_precision() as u32);
    let half: BigInt = &m / 2;
    Some(if r > half { r - m } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u32, n: i64) -> PAdic {
        PAdic::from_int(p, n, DEFAULT_PRECISION).unwrap()
    }

    #[test]
    fn addition_carries() {
        let s = z(3, 2).add(&z(3, 2)).unwrap();
        assert_eq!(&s.digits()[..3], &[1, 1, 0]);
        assert_eq!(z(7, 123).add(&z(7, 0)).unwrap(), z(7, 123));
        assert_eq!(z(5, -1).digits(), &[4; 16]);
    }

    #[test]
    fn multiplication_by_p_shifts() {
        let x = z(3, 1 + 2 * 3);
        let y = x.mul(&z(3, 3)).unwrap();
        assert_eq!(y.valuation(), Some(1));
        assert_eq!(&y.digits()[..4], &[0, 1, 2, 0]);
        assert_eq!(y.absolute_precision(), 16);
    }

    #[test]
    fn norms() {
        assert_eq!(z(3, 9).norm().value, Exact::new(1, 9));
        let zero = z(3, 0).norm();
        assert!(zero.zero_to_precision && zero.value.is_zero());
        let x = PAdic::from_digits(5, -1, vec![2, 1]).unwrap();
        assert_eq!(x.norm().value, Exact::from_int(5));
        assert_eq!(padic_dist(&z(3, 1), &z(3, 4)).unwrap(), Exact::new(1, 3));
    }

    #[test]
    fn prime_mismatch() {
        assert!(matches!(z(3, 1).add(&z(5, 1)), Err(Error::Domain(_))));
        assert!(PAdic::from_int(4, 1, 3).is_err());
    }

    #[test]
    fn canonical_forms() {
        let x = PAdic::from_digits(3, 2, vec![1, 0]).unwrap();
        assert_eq!(x, PAdic::from_digits(3, 0, vec![0, 0, 1, 0]).unwrap());
        let y = PAdic::from_digits(3, -2, vec![0, 1, 2]).unwrap();
        assert_eq!((y.offset(), y.digits().to_vec()), (-1, vec![1, 2]));
        let w = PAdic::from_digits(3, -2, vec![0, 0]).unwrap();
        assert!(w.is_zero_to_precision());
        assert_eq!(w.absolute_precision(), 0);
    }

    #[test]
    fn rationals() {
        let half = PAdic::from_ratio(3, 1, 2, 8).unwrap();
        assert_eq!(half.mul(&z(3, 2)).unwrap().truncate(8), z(3, 1).truncate(8));
        let third = PAdic::from_ratio(3, 1, 3, 8).unwrap();
        assert_eq!(third.offset(), -1);
        assert_eq!(third.norm().value, Exact::from_int(3));
        let one = third.mul(&z(3, 3)).unwrap();
        assert_eq!(one.valuation(), Some(0));
        assert_eq!(one.digits()[0], 1);
    }

    #[test]
    fn qp_precision_tracking() {
        let x = PAdic::from_digits(3, -1, vec![1; 8]).unwrap();
        assert_eq!(x.absolute_precision(), 7);
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.valuation(), Some(-2));
        assert_eq!(sq.precision(), 8);
        let s = sq.add(&x).unwrap();
        assert_eq!(s.absolute_precision(), 6);
    }

    #[test]
    fn literals() {
        let x: PAdic = "p=3;l=0;digits=1201".parse().unwrap();
        assert_eq!(x.to_integer().unwrap(), BigInt::from(1 + 2 * 3 + 27));
        assert_eq!(x.to_string(), "p=3;l=0;digits=1201");
        let y: PAdic = "p=13;l=-1;digits=12,0,3".parse().unwrap();
        assert_eq!(y.to_string(), "p=13;l=-1;digits=12,0,3");
        assert!("p=3;digits=3".parse::<PAdic>().is_err());
        assert!("p=3;l=0".parse::<PAdic>().is_err());
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<PAdic>(&j).unwrap(), x);
    }

    #[test]
    fn balanced() {
        assert_eq!(balanced_integer(&z(5, -7)), Some(BigInt::from(-7)));
    }
}
