//! Oracles for the integration tests. None of them calls into the library's
//! language or order machinery.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;

/// One-sided shift of finite type, decided by brute-force extension.
pub struct LangOracle {
    alpha: u32,
    forbidden: Vec<Vec<u32>>,
    k: usize,
    memo: HashMap<(Vec<u32>, usize), bool>,
}

impl LangOracle {
    pub fn new(alpha: u32, forbidden: &[Vec<u32>]) -> LangOracle {
        let k = forbidden.iter().map(|f| f.len()).max().unwrap_or(1).saturating_sub(1);
        LangOracle { alpha, forbidden: forbidden.to_vec(), k, memo: HashMap::new() }
    }

    /// No forbidden word ends at the last position of `w`.
    fn tail_ok(&self, w: &[u32]) -> bool {
        self.forbidden.iter().all(|f| !w.ends_with(f))
    }

    fn state(&self, w: &[u32]) -> Vec<u32> {
        w[w.len().saturating_sub(self.k)..].to_vec()
    }

    fn extendable(&mut self, state: Vec<u32>, steps: usize) -> bool {
        if steps == 0 {
            return true;
        }
        if let Some(&b) = self.memo.get(&(state.clone(), steps)) {
            return b;
        }
        let mut ok = false;
        for c in 0..self.alpha {
            let mut w = state.clone();
            w.push(c);
            if self.tail_ok(&w) {
                let s = self.state(&w);
                if self.extendable(s, steps - 1) {
                    ok = true;
                    break;
                }
            }
        }
        self.memo.insert((state, steps), ok);
        ok
    }

    /// Steps after which a surviving path must have closed a cycle.
    fn slack(&self) -> usize {
        self.k + (self.alpha as usize).pow(self.k as u32) + 1
    }

    pub fn contains(&mut self, w: &[u32]) -> bool {
        let avoids = (1..=w.len()).all(|i| self.tail_ok(&w[..i]));
        let slack = self.slack();
        avoids && self.extendable(self.state(w), slack)
    }

    /// `L_n`, lexicographic.
    pub fn language(&mut self, n: usize) -> Vec<Vec<u32>> {
        let mut level: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &level {
                for c in 0..self.alpha {
                    let mut x = w.clone();
                    x.push(c);
                    if self.tail_ok(&x) {
                        next.push(x);
                    }
                }
            }
            level = next;
        }
        let slack = self.slack();
        level.into_iter().filter(|w| self.extendable(self.state(w), slack)).collect()
    }
}

/// Whether `X_F` equals `X_{F_p}`, compared through `L_depth`.
pub fn order_by_definition(alpha: u32, forbidden: &[Vec<u32>], p: usize, depth: usize) -> bool {
    let mut x = LangOracle::new(alpha, forbidden);
    let lp = x.language(p);
    let mut all = LangOracle::new(alpha, &[]);
    let fp: Vec<Vec<u32>> = all.language(p).into_iter().filter(|w| lp.binary_search(w).is_err()).collect();
    let mut y = LangOracle::new(alpha, &fp);
    x.language(depth) == y.language(depth)
}

/// Alphabet of 1 to 3 letters, up to 4 forbidden words of length 1 to 3.
pub fn random_presentation<R: Rng>(rng: &mut R) -> (u32, Vec<Vec<u32>>) {
    let alpha = rng.random_range(1..=3u32);
    let count = rng.random_range(0..=4usize);
    let forbidden = (0..count)
        .map(|_| {
            let len = rng.random_range(1..=3usize);
            (0..len).map(|_| rng.random_range(0..alpha)).collect()
        })
        .collect();
    (alpha, forbidden)
}
