//! Brute-force reference implementations used as test oracles.
//!
//! Everything here works on raw bit masks and direct subset enumeration so
//! it shares no code path with the library's transforms or conditioning.

#![allow(dead_code)]

use gcu_core::{Frame, MassFunction, Proposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Oracle {
    pub n: usize,
    pub masses: Vec<(u32, f64)>,
}

pub fn full(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// Submasks of `b` including 0 and `b`.
pub fn submasks(b: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut s = b;
    loop {
        out.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & b;
    }
    out
}

impl Oracle {
    pub fn of(m: &MassFunction) -> Self {
        Self {
            n: m.frame().len(),
            masses: m.iter().map(|(p, v)| (p.bits(), v)).collect(),
        }
    }

    pub fn mass(&self, b: u32) -> f64 {
        self.masses
            .iter()
            .find(|(c, _)| *c == b)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    /// `Bl(B)` by summing `m(C)` over every subset `C` of `B`.
    pub fn bel_by_subsets(&self, b: u32) -> f64 {
        submasks(b).into_iter().map(|c| self.mass(c)).sum()
    }

    /// `Bl(B)` by scanning focal elements.
    pub fn bel(&self, b: u32) -> f64 {
        self.masses
            .iter()
            .filter(|(c, _)| c & !b == 0)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn pl(&self, b: u32) -> f64 {
        if b == 0 {
            return 0.0;
        }
        1.0 - self.bel(!b & full(self.n))
    }

    /// Theorem-1 conditional belief, straight from the formula.
    pub fn fh_bel(&self, a: u32, b: u32) -> f64 {
        let num = self.bel(a & b);
        num / (num + self.pl(a & !b))
    }

    pub fn fh_pl(&self, a: u32, b: u32) -> f64 {
        let num = self.pl(a & b);
        num / (num + self.bel(a & !b))
    }

    /// `m(B|A) = Σ_{C ⊆ B} (−1)^{|B∖C|} Bl(C|A)` for every `B ⊆ Θ`.
    pub fn conditional_masses(&self, a: u32) -> Vec<f64> {
        let size = 1usize << self.n;
        let bel: Vec<f64> = (0..size as u32).map(|c| self.fh_bel(a, c)).collect();
        (0..size as u32)
            .map(|b| {
                submasks(b)
                    .into_iter()
                    .map(|c| {
                        let sign = if (b & !c).count_ones() % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        sign * bel[c as usize]
                    })
                    .sum()
            })
            .collect()
    }

    /// Bayes conditional of a Bayesian BoE, per singleton.
    pub fn bayes_conditional(&self, a: u32) -> Vec<f64> {
        let pa: f64 = self
            .masses
            .iter()
            .filter(|(c, _)| c & a != 0)
            .map(|(_, v)| v)
            .sum();
        (0..self.n)
            .map(|i| {
                if a & (1 << i) != 0 {
                    self.mass(1 << i) / pa
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn pignistic(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.masses
                    .iter()
                    .filter(|(c, _)| c & (1 << i) != 0)
                    .map(|(c, v)| v / c.count_ones() as f64)
                    .sum()
            })
            .collect()
    }
}

pub fn frame(n: usize) -> Frame {
    Frame::new((0..n).map(|i| format!("t{i}"))).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point on the simplex with `k` coordinates.
pub fn simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random Bayesian BoE over `n` singletons; some singletons may get no mass.
pub fn random_bayesian(n: usize, rng: &mut impl Rng) -> MassFunction {
    let support: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.8)).collect();
    let support = if support.is_empty() {
        vec![rng.random_range(0..n)]
    } else {
        support
    };
    let w = simplex(rng, support.len());
    MassFunction::new(
        frame(n),
        support
            .into_iter()
            .zip(w)
            .map(|(i, v)| (Proposition::singleton(i), v)),
    )
    .unwrap()
}
