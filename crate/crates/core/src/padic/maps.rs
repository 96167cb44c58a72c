use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::number::{padic_dist, PAdic};
use crate::error::{Error, Result};
use crate::metric::{checked_pseudo_orbit, Flags, IndexSet, MetricSystem, PseudoOrbit};
use crate::scalar::Exact;

/// Self-maps of `Z_p` / `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PAdicMap {
    /// Integer coefficients, constant term first.
    Polynomial { coeffs: Vec<i64> },
    /// `a·x + b` with rational `a ≠ 0`, `b`.
    Affine { a: Exact, b: Exact },
    /// `Σ a_i p^i ↦ Σ a_{i+1} p^i` on `Z_p`.
    DigitShift,
    /// Replaces `x mod p^width` by `table[x mod p^width]`, keeping the
    /// higher digits.
    Table { width: usize, table: Vec<u64> },
}

impl PAdicMap {
    /// Parses `poly:c0,c1,...`, `affine:a,b`, `shift` or `table:w:t0,t1,...`.
    pub fn parse(s: &str) -> Result<PAdicMap> {
        let bad = |why: &str| Error::Parse(format!("bad map {s:?}: {why}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "poly" => {
                let coeffs = rest
                    .split(',')
                    .map(|c| c.trim().parse::<i64>().map_err(|_| bad("coefficient")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PAdicMap::Polynomial { coeffs })
            }
            "affine" => {
                let (a, b) = rest.split_once(',').ok_or_else(|| bad("expected a,b"))?;
                let a: Exact = a.parse()?;
                if a.is_zero() {
                    return Err(bad("a must be nonzero"));
                }
                Ok(PAdicMap::Affine { a, b: b.parse()? })
            }
            "shift" | "digit_shift" => Ok(PAdicMap::DigitShift),
            "table" => {
                let (w, t) = rest.split_once(':').ok_or_else(|| bad("expected width:table"))?;
                let width = w.trim().parse().map_err(|_| bad("width"))?;
                let table = t
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| bad("table entry")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PAdicMap::Table { width, table })
            }
            _ => Err(bad("unknown kind")),
        }
    }

    pub fn translation(c: i64) -> PAdicMap {
        PAdicMap::Affine { a: Exact::one(), b: Exact::from_int(c) }
    }

    pub fn apply(&self, x: &PAdic) -> Result<PAdic> {
        let p = x.prime();
        match self {
            PAdicMap::Polynomial { coeffs } => {
                // Integer coefficients are exact; give them enough digits
                // that they never limit the result.
                let deg = coeffs.len().max(1) as i64;
                let v = x.valuation().unwrap_or(0).min(0);
                let n = (x.absolute_precision().max(1) - deg * v + 1) as usize;
                let Some((&lead, rest)) = coeffs.split_last() else {
                    return PAdic::from_int(p, 0, n);
                };
                let mut acc = PAdic::from_int(p, lead, n)?;
                for &c in rest.iter().rev() {
                    acc = acc.mul(x)?.add(&PAdic::from_int(p, c, n)?)?;
                }
                Ok(acc)
            }
            PAdicMap::Affine { a, b } => {
                let nx = x.absolute_precision();
                let vx = x.valuation().unwrap_or(nx);
                let va = PAdic::from_exact(p, a, 1)?.valuation().unwrap_or(0);
                let a = PAdic::from_exact(p, a, (nx - vx - va).max(1) as usize + 1)?;
                let ax = a.mul(x)?;
                let b = if b.is_zero() {
                    return Ok(ax);
                } else {
                    let vb = PAdic::from_exact(p, b, 1)?.valuation().unwrap_or(0);
                    PAdic::from_exact(p, b, (ax.absolute_precision() - vb).max(1) as usize)?
                };
                ax.add(&b)
            }
            PAdicMap::DigitShift => {
                if !x.is_integral() {
                    return Err(Error::Domain("digit shift is defined on Z_p only".into()));
                }
                if x.precision() == 0 {
                    return Err(Error::Precision("no digits left to shift".into()));
                }
                PAdic::from_digits(p, 0, x.digits()[1..].to_vec())
            }
            PAdicMap::Table { width, table } => {
                if !x.is_integral() {
                    return Err(Error::Domain("table maps are defined on Z_p only".into()));
                }
                if x.precision() < *width {
                    return Err(Error::Precision(format!("need {width} digits for the table")));
                }
                let pw = (p as u64)
                    .checked_pow(*width as u32)
                    .ok_or_else(|| Error::Config("table width too large".into()))?;
                if table.len() as u64 != pw {
                    return Err(Error::Config(format!("table needs {pw} entries")));
                }
                let r = x.digits()[..*width].iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64);
                let mut t = table[r as usize] % pw;
                let mut digits = x.digits().to_vec();
                for d in digits.iter_mut().take(*width) {
                    *d = (t % p as u64) as u32;
                    t /= p as u64;
                }
                PAdic::from_digits(p, 0, digits)
            }
        }
    }

    /// Global Lipschitz constant where one is known analytically.
    pub fn lipschitz_bound(&self, p: u32) -> Option<Exact> {
        match self {
            PAdicMap::Polynomial { .. } => Some(Exact::one()),
            PAdicMap::Affine { a, .. } => PAdic::from_exact(p, a, 1).ok().map(|a| a.norm().value),
            PAdicMap::DigitShift => Some(Exact::from_int(p)),
            PAdicMap::Table { .. } => None,
        }
    }

    /// The affine inverse, when the map is an affine bijection of `Z_p`.
    pub fn inverse_map(&self, p: u32) -> Option<PAdicMap> {
        match self {
            PAdicMap::Polynomial { coeffs } if coeffs.iter().skip(2).all(|&c| c == 0) => {
                let c = |i: usize| coeffs.get(i).copied().unwrap_or(0);
                PAdicMap::Affine { a: Exact::from_int(c(1)), b: Exact::from_int(c(0)) }.inverse_map(p)
            }
            PAdicMap::Affine { a, b } if self.lipschitz_bound(p) == Some(Exact::one()) => {
                let ai = a.recip();
                Some(PAdicMap::Affine { b: -(&ai * b), a: ai })
            }
            _ => None,
        }
    }
}

/// Outcome of [`classify_map`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum MapClass {
    OneLipschitz,
    /// `‖f x − f y‖ = factor · ‖x − y‖` whenever `‖x − y‖ ≤ radius`.
    LocallyScaling { radius: Exact, factor: Exact },
    /// `‖f x − f y‖ = s · ‖x − y‖` whenever `‖x − y‖ < eps`.
    EventualSimilarity { s: Exact, eps: Exact },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: MapClass,
    /// An analytic argument covers the verdict; otherwise it rests on samples.
    pub certified: bool,
    pub pairs_checked: usize,
    /// Sampled pairs contradicting the verdict.
    pub violations: usize,
}

/// Sampled pairs `(x, y)` in `Z_p` at `prec` digits with `‖x − y‖ ≤ p^-k`.
pub fn close_pairs(p: u32, k: usize, prec: usize, count: usize, seed: u64) -> Result<Vec<(PAdic, PAdic)>> {
    if k >= prec {
        return Err(Error::Config(format!("k = {k} leaves no free digits at precision {prec}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = PAdic::random_zp(p, prec, &mut rng)?;
        let mut digits = x.digits().to_vec();
        for d in digits.iter_mut().skip(k) {
            *d = rng.random_range(0..p);
        }
        let y = PAdic::from_digits(p, 0, digits)?;
        if x != y {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Classifies `f` on `Z_p`. Polynomials, the digit shift and affine maps
/// have analytic certificates; tables fall back to sampling, testing the
/// `(p^-k, p^m)` locally scaling hypothesis first.
///
/// Certified verdicts are still checked on the sample; a violation there
/// is reported as an internal error.
pub fn classify_map(
    f: &PAdicMap,
    p: u32,
    k: usize,
    m: i64,
    prec: usize,
    budget: usize,
    seed: u64,
) -> Result<Classification> {
    let one = Exact::one();
    let pf = Exact::from_int(p);
    let (class, certified) = match f {
        PAdicMap::Polynomial { .. } => (MapClass::OneLipschitz, true),
        PAdicMap::DigitShift => (
            MapClass::LocallyScaling { radius: Exact::pow(p as u64, -1), factor: pf.clone() },
            true,
        ),
        PAdicMap::Affine { .. } => (
            MapClass::EventualSimilarity { s: f.lipschitz_bound(p).unwrap(), eps: one.clone() },
            true,
        ),
        PAdicMap::Table { .. } => (MapClass::Unknown, false),
    };
    let kk = match &class {
        MapClass::LocallyScaling { .. } => k.max(1),
        _ => k,
    };
    let pairs = close_pairs(p, kk, prec, budget, seed)?;
    let mut ratios = Vec::with_capacity(pairs.len());
    for (x, y) in &pairs {
        let (fx, fy) = (f.apply(x)?, f.apply(y)?);
        // Images lose digits under expanding maps; compare at the common precision.
        let n = fx.absolute_precision().min(fy.absolute_precision());
        let d_img = padic_dist(&fx.truncate(n), &fy.truncate(n))?;
        let d = padic_dist(x, y)?;
        if d_img.is_zero() && d > Exact::pow(p as u64, -n) {
            ratios.push(None);
        } else {
            ratios.push(Some(d_img / d));
        }
    }
    let violates = |c: &MapClass, r: &Option<Exact>| -> bool {
        match (c, r) {
            (_, None) => false,
            (MapClass::OneLipschitz, Some(r)) => *r > one,
            (MapClass::LocallyScaling { factor, .. }, Some(r)) => r != factor,
            (MapClass::EventualSimilarity { s, .. }, Some(r)) => r != s,
            (MapClass::Unknown, _) => false,
        }
    };
    if certified {
        let violations = ratios.iter().filter(|r| violates(&class, r)).count();
        if violations > 0 {
            return Err(Error::Internal(format!(
                "certified class {class:?} contradicted by {violations} sampled pairs"
            )));
        }
        return Ok(Classification { class, certified, pairs_checked: pairs.len(), violations });
    }
    let known: Vec<&Exact> = ratios.iter().flatten().collect();
    let radius = Exact::pow(p as u64, -(k as i64));
    let scaling = MapClass::LocallyScaling { radius: radius.clone(), factor: Exact::pow(p as u64, m) };
    let class = if !known.is_empty() && known.iter().all(|r| !violates(&scaling, &Some((*r).clone()))) {
        scaling
    } else if !known.is_empty() && known.iter().all(|r| *r == known[0]) {
        MapClass::EventualSimilarity { s: known[0].clone(), eps: radius }
    } else if known.iter().all(|r| **r <= one) {
        MapClass::OneLipschitz
    } else {
        MapClass::Unknown
    };
    Ok(Classification { class, certified: false, pairs_checked: pairs.len(), violations: 0 })
}

/// An orbit with the absolute precision of each point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<PAdic>,
    pub precision: Vec<i64>,
}

/// `x0, f(x0), ..., f^steps(x0)`. Fails once a point no longer knows its
/// digit at position 0.
pub fn padic_orbit(f: &PAdicMap, x0: &PAdic, steps: usize) -> Result<Orbit> {
    let mut points = vec![x0.clone()];
    for i in 0..steps {
        let next = f.apply(points.last().unwrap())?;
        if next.absolute_precision() < 1 {
            return Err(Error::Precision(format!("all digits lost after {} steps", i + 1)));
        }
        points.push(next);
    }
    if x0.absolute_precision() < 1 {
        return Err(Error::Precision("starting point has no digit at position 0".into()));
    }
    let precision = points.iter().map(|x| x.absolute_precision()).collect();
    Ok(Orbit { points, precision })
}

/// `Z_p / p^prec Z_p` under a map, with the quotient ultrametric.
#[derive(Clone, Debug)]
pub struct PAdicSystem {
    p: u32,
    prec: usize,
    map: PAdicMap,
    inverse: Option<PAdicMap>,
}

impl PAdicSystem {
    pub fn zp(p: u32, prec: usize, map: PAdicMap) -> Result<PAdicSystem> {
        PAdic::zero(p, prec)?;
        if prec == 0 {
            return Err(Error::Domain("precision must be positive".into()));
        }
        if let PAdicMap::Affine { a, .. } = &map {
            if PAdic::from_exact(p, a, 1)?.valuation().unwrap_or(0) < 0 {
                return Err(Error::Domain("affine map does not preserve Z_p".into()));
            }
        }
        let inverse = map.inverse_map(p);
        Ok(PAdicSystem { p, prec, map, inverse })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn map_kind(&self) -> &PAdicMap {
        &self.map
    }

    pub fn point(&self, n: i64) -> PAdic {
        PAdic::from_int(self.p, n, self.prec).expect("prime checked at construction")
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> PAdic {
        PAdic::random_zp(self.p, self.prec, rng).expect("prime checked at construction")
    }

    fn settle(&self, y: PAdic) -> Result<PAdic> {
        if y.absolute_precision() < self.prec as i64 {
            return Err(Error::Precision(format!(
                "image known to {} digits, system needs {}",
                y.absolute_precision(),
                self.prec
            )));
        }
        Ok(y.truncate(self.prec as i64))
    }
}

impl PAdicSystem {
    /// A random element of `p^(m+1) Z_p` at the working precision.
    fn small<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<PAdic> {
        let digits = (0..self.prec).map(|i| if i <= m { 0 } else { rng.random_range(0..self.p) }).collect();
        PAdic::from_digits(self.p, 0, digits)
    }

    /// A `p^-m`-pseudo-orbit of `len` points from `start`: each step adds a
    /// random element of `p^(m+1) Z_p` to the true image.
    pub fn sample_pseudo_orbit<R: Rng + ?Sized>(
        &self,
        start: PAdic,
        len: usize,
        m: usize,
        rng: &mut R,
    ) -> Result<PseudoOrbit<PAdic>> {
        if len == 0 {
            return Err(Error::Domain("length must be positive".into()));
        }
        let mut pts = vec![start];
        while pts.len() < len {
            let fx = self.map(pts.last().unwrap())?;
            pts.push(fx.add(&self.small(m, rng)?)?.truncate(self.prec as i64));
        }
        let delta = Exact::pow(self.p as u64, -(m as i64));
        checked_pseudo_orbit(self, IndexSet::Natural { horizon: len - 1 }, pts, delta)
    }

    /// A `Z`-indexed `p^-m`-pseudo-orbit on `[-horizon, horizon]` through
    /// `start`, perturbing forward images and backward preimages alike.
    pub fn sample_two_sided<R: Rng + ?Sized>(
        &self,
        start: PAdic,
        horizon: usize,
        m: usize,
        rng: &mut R,
    ) -> Result<PseudoOrbit<PAdic>> {
        let mut back = Vec::with_capacity(horizon);
        let mut x = start.clone();
        for _ in 0..horizon {
            x = self.inverse(&x)?.add(&self.small(m, rng)?)?.truncate(self.prec as i64);
            back.push(x.clone());
        }
        back.reverse();
        let fwd = self.sample_pseudo_orbit(start, horizon + 1, m, rng)?;
        back.extend(fwd.points);
        let delta = Exact::pow(self.p as u64, -(m as i64));
        checked_pseudo_orbit(self, IndexSet::Integer { horizon }, back, delta)
    }
}

impl MetricSystem for PAdicSystem {
    type Point = PAdic;

    fn dist(&self, x: &PAdic, y: &PAdic) -> Result<Exact> {
        padic_dist(x, y)
    }

    fn map(&self, x: &PAdic) -> Result<PAdic> {
        self.settle(self.map.apply(x)?)
    }

    fn flags(&self) -> Flags {
        let lip = self.map.lipschitz_bound(self.p);
        let iso = self.inverse.is_some();
        Flags { is_ultrametric: true, lipschitz_bound: lip, is_invertible: iso, is_isometry: iso }
    }

    fn contains(&self, x: &PAdic) -> bool {
        x.prime() == self.p && x.is_integral() && x.precision() == self.prec
    }

    fn inverse(&self, x: &PAdic) -> Result<PAdic> {
        match &self.inverse {
            Some(g) => self.settle(g.apply(x)?),
            None => Err(Error::Unsupported("map has no inverse".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u32, n: i64) -> PAdic {
        PAdic::from_int(p, n, 8).unwrap()
    }

    #[test]
    fn polynomial_is_certified() {
        let f = PAdicMap::parse("poly:0,1,1").unwrap();
        assert_eq!(f.apply(&z(3, 2)).unwrap(), z(3, 6));
        let c = classify_map(&f, 3, 0, 0, 8, 500, 1).unwrap();
        assert_eq!(c.class, MapClass::OneLipschitz);
        assert!(c.certified);
    }

    #[test]
    fn digit_shift_scales() {
        let c = classify_map(&PAdicMap::DigitShift, 3, 1, 1, 10, 500, 2).unwrap();
        assert_eq!(
            c.class,
            MapClass::LocallyScaling { radius: Exact::new(1, 3), factor: Exact::from_int(3) }
        );
        let y = PAdicMap::DigitShift.apply(&z(3, 7)).unwrap();
        assert_eq!(y.to_integer().unwrap(), 2.into());
        assert_eq!(y.absolute_precision(), 7);
    }

    #[test]
    fn translation_is_isometry() {
        let c = classify_map(&PAdicMap::parse("affine:1,5").unwrap(), 3, 0, 0, 8, 200, 3).unwrap();
        assert_eq!(c.class, MapClass::EventualSimilarity { s: Exact::one(), eps: Exact::one() });
    }

    #[test]
    fn table_is_sampled() {
        // Swaps the residues 1 and 2 mod 3: an isometry of Z_3.
        let f = PAdicMap::Table { width: 1, table: vec![0, 2, 1] };
        let c = classify_map(&f, 3, 0, 0, 8, 300, 4).unwrap();
        assert!(!c.certified);
        assert_eq!(c.class, MapClass::LocallyScaling { radius: Exact::one(), factor: Exact::one() });
    }

    #[test]
    fn orbits() {
        let x0 = z(3, 0);
        let o = padic_orbit(&PAdicMap::translation(1), &x0, 4).unwrap();
        let ints: Vec<i64> = o.points.iter().map(|x| x.to_integer().unwrap().try_into().unwrap()).collect();
        assert_eq!(ints, vec![0, 1, 2, 3, 4]);
        let id = padic_orbit(&PAdicMap::parse("poly:0,1").unwrap(), &z(5, 17), 3).unwrap();
        assert!(id.points.iter().all(|x| *x == z(5, 17)));
        let o = padic_orbit(&PAdicMap::parse("poly:0,3").unwrap(), &z(3, 1), 3).unwrap();
        let norms: Vec<Exact> = o.points.iter().map(|x| x.norm().value).collect();
        assert_eq!(norms, vec![Exact::one(), Exact::new(1, 3), Exact::new(1, 9), Exact::new(1, 27)]);
        assert_eq!(o.precision, vec![8, 9, 10, 11]);
    }

    #[test]
    fn shift_runs_out_of_digits() {
        let r = padic_orbit(&PAdicMap::DigitShift, &z(3, 5), 8);
        assert!(matches!(r, Err(Error::Precision(_))));
        assert!(padic_orbit(&PAdicMap::DigitShift, &z(3, 5), 7).is_ok());
    }

    #[test]
    fn qp_growth_keeps_relative_precision() {
        let x = PAdic::from_digits(3, -1, vec![1; 8]).unwrap();
        let o = padic_orbit(&PAdicMap::parse("poly:0,1,1").unwrap(), &x, 2).unwrap();
        assert_eq!(o.precision, vec![7, 6, 4]);
        assert!(padic_orbit(&PAdicMap::parse("poly:0,1,1").unwrap(), &x, 3).is_err());
    }

    #[test]
    fn system_inverse() {
        let s = PAdicSystem::zp(5, 6, PAdicMap::translation(1)).unwrap();
        assert!(s.flags().is_invertible);
        let x = s.point(3);
        assert_eq!(s.inverse(&s.map(&x).unwrap()).unwrap(), x);
        let q = PAdicSystem::zp(3, 6, PAdicMap::parse("poly:0,1,1").unwrap()).unwrap();
        assert!(!q.flags().is_invertible);
        assert!(PAdicSystem::zp(3, 6, PAdicMap::parse("affine:1/3,0").unwrap()).is_err());
    }

    #[test]
    fn affine_with_fractional_coefficients() {
        // x/2 + 1/2 on Z_3.
        let f = PAdicMap::parse("affine:1/2,1/2").unwrap();
        let y = f.apply(&z(3, 5)).unwrap();
        assert_eq!(y.truncate(8), z(3, 3));
    }

    #[test]
    fn sampled_orbits_have_the_right_gaps() {
        let sys = PAdicSystem::zp(3, 12, PAdicMap::parse("poly:0,1,1").unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x0 = sys.random_point(&mut rng);
        let po = sys.sample_pseudo_orbit(x0.clone(), 20, 2, &mut rng).unwrap();
        assert_eq!(po.delta, Exact::new(1, 9));
        assert!(crate::metric::shadows(&sys, &x0, &po, &po.delta).unwrap());

        let t = PAdicSystem::zp(5, 10, PAdicMap::translation(1)).unwrap();
        let po = t.sample_two_sided(t.point(3), 6, 1, &mut rng).unwrap();
        assert_eq!(po.len(), 13);
        assert_eq!(po.at(0), Some(&t.point(3)));
        assert!(crate::metric::shadows(&t, &t.point(3), &po, &po.delta).unwrap());
        let lin = PAdicSystem::zp(5, 10, PAdicMap::parse("poly:1,1").unwrap()).unwrap();
        assert!(lin.flags().is_isometry);
        assert_eq!(lin.inverse(&lin.point(0)).unwrap(), lin.point(-1));
        let sq = PAdicSystem::zp(3, 12, PAdicMap::parse("poly:0,1,1").unwrap()).unwrap();
        assert!(sq.sample_two_sided(sq.point(1), 2, 1, &mut rng).is_err());
    }
}
