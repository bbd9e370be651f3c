//! The group ℤ_n with the representation ρ(k) = exp(2πi k m/n), scalar
//! functions of β, and the constants entering the Wilson-loop estimates.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Width bound for irreducible configurations with at most 48 oriented plaquettes.
pub const WIDTH_BOUND_B: i32 = 24;

/// Tolerance for ties when locating the maximizers `G₀`.
pub const TIE_TOLERANCE: f64 = 1e-12;

const STAR_EXHAUSTIVE_MAX_N: u32 = 8;
const STAR_RANDOM_SAMPLES: usize = 200_000;

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A faithful one-dimensional representation of ℤ_n.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Representation {
    n: u32,
    m_rep: u32,
    #[serde(skip)]
    cos: Vec<f64>,
    #[serde(skip)]
    rho: Vec<Complex64>,
}

impl Representation {
    pub fn new(n: u32, m_rep: u32) -> Result<Representation> {
        if n < 2 {
            return domain(format!("modulus {n} < 2"));
        }
        if m_rep == 0 || m_rep >= n || gcd(m_rep, n) != 1 {
            return domain(format!("exponent {m_rep} is not a unit mod {n}"));
        }
        // computed on the folded residue so that ρ(−g) = conj ρ(g) holds exactly
        let rho: Vec<Complex64> = (0..n)
            .map(|g| {
                let r = ((g as u64 * m_rep as u64) % n as u64) as u32;
                let z = Complex64::from_polar(1.0, 2.0 * PI * r.min(n - r) as f64 / n as f64);
                if r > n - r { z.conj() } else { z }
            })
            .collect();
        let cos = rho.iter().map(|z| z.re).collect();
        Ok(Representation { n, m_rep, cos, rho })
    }

    /// The standard choice `m_rep = 1`.
    pub fn standard(n: u32) -> Result<Representation> {
        Representation::new(n, 1)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m_rep(&self) -> u32 {
        self.m_rep
    }

    #[inline]
    pub fn reduce(&self, g: i64) -> u32 {
        g.rem_euclid(self.n as i64) as u32
    }

    #[inline]
    pub fn rho(&self, g: i64) -> Complex64 {
        self.rho[self.reduce(g) as usize]
    }

    /// `Re ρ(g)`.
    #[inline]
    pub fn re_rho(&self, g: i64) -> f64 {
        self.cos[self.reduce(g) as usize]
    }

    pub fn cos_table(&self) -> &[f64] {
        &self.cos
    }

    /// `φ_β(g) = e^{β Re ρ(g)}`.
    pub fn phi(&self, g: i64, beta: f64) -> f64 {
        (beta * self.re_rho(g)).exp()
    }

    /// `ξ = 1 − cos(2π/n)`, the same for every faithful representation.
    pub fn xi(&self) -> f64 {
        1.0 - (2.0 * PI / self.n as f64).cos()
    }

    /// `λ(β) = e^{−βξ}`.
    pub fn lambda(&self, beta: f64) -> f64 {
        (-beta * self.xi()).exp()
    }

    fn theta_weights(&self, beta: f64) -> Vec<f64> {
        self.cos.iter().map(|c| (12.0 * beta * (c - 1.0)).exp()).collect()
    }

    /// `θ(β) = Σ ρ(g) e^{12β Re ρ(g)} / Σ e^{12β Re ρ(g)}`.
    pub fn theta(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            // uniform weights: the characters of a nontrivial representation sum to zero
            return 0.0;
        }
        let w = self.theta_weights(beta);
        let z: f64 = w.iter().sum();
        let s: Complex64 = self.rho.iter().zip(&w).map(|(r, w)| r * w).sum::<Complex64>() / z;
        assert!(s.im.abs() < 1e-14, "theta has imaginary part {}", s.im);
        s.re
    }

    /// `1 − θ(β)` without cancellation.
    pub fn one_minus_theta(&self, beta: f64) -> f64 {
        let w = self.theta_weights(beta);
        let z: f64 = w.iter().sum();
        self.cos.iter().zip(&w).map(|(c, w)| (1.0 - c) * w).sum::<f64>() / z
    }

    /// `(1 − θ(β)) λ(β)^{−12}` evaluated in log-shifted form.
    pub fn theta_gap_ratio(&self, beta: f64) -> f64 {
        let xi = self.xi();
        let z: f64 = self.theta_weights(beta).iter().sum();
        let num: f64 = self
            .cos
            .iter()
            .map(|c| (1.0 - c) * (12.0 * beta * (c - 1.0 + xi)).exp())
            .sum();
        num / z
    }

    /// Leading large-β behaviour `(1 + [n ≥ 3]) ξ e^{−12βξ}` of `1 − θ(β)`.
    pub fn theta_asymptote(&self, beta: f64) -> f64 {
        let mult = if self.n >= 3 { 2.0 } else { 1.0 };
        mult * self.xi() * (-12.0 * beta * self.xi()).exp()
    }

    fn exponents(&self, gs: &[u32], beta: f64) -> Vec<f64> {
        (0..self.n as i64)
            .map(|g| 2.0 * beta * gs.iter().map(|&k| self.re_rho(g + k as i64)).sum::<f64>())
            .collect()
    }

    /// `S_β((g_k)) = Σ_g ρ(g) ∏ φ_β(g+g_k)² / Σ_g ∏ φ_β(g+g_k)²`.
    pub fn s_beta(&self, gs: &[u32], beta: f64) -> Complex64 {
        let e = self.exponents(gs, beta);
        let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = e.iter().map(|x| (x - top).exp()).collect();
        let z: f64 = w.iter().sum();
        self.rho.iter().zip(&w).map(|(r, w)| r * w).sum::<Complex64>() / z
    }

    /// `G₀ = argmax_g ∏ φ_β(g + g_k)`, i.e. the maximizers of `Re(ρ(g) Σ ρ(g_k))`.
    pub fn g0(&self, gs: &[u32]) -> Vec<u32> {
        let s: Complex64 = gs.iter().map(|&k| self.rho[k as usize]).sum();
        if s.norm() < TIE_TOLERANCE {
            return (0..self.n).collect();
        }
        let score: Vec<f64> = self.rho.iter().map(|r| (r * s).re / s.norm()).collect();
        let top = score.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0..self.n).filter(|&g| score[g as usize] >= top - TIE_TOLERANCE).collect()
    }

    /// `∏φ_β(g'+g_k)² / Σ_g ∏φ_β(g+g_k)²` for `g' ∈ G₀`.
    pub fn g0_weight_fraction(&self, gs: &[u32], beta: f64) -> f64 {
        let e = self.exponents(gs, beta);
        let g0 = self.g0(gs)[0] as usize;
        1.0 / e.iter().map(|x| (x - e[g0]).exp()).sum::<f64>()
    }

    /// Residual of the (★) condition: `Σ_{g∉G₀} ∏ φ_β(g+g_k)² / φ_β(g'+g_k)²`.
    pub fn star_residual(&self, gs: &[u32], beta: f64) -> f64 {
        let g0 = self.g0(gs);
        let e = self.exponents(gs, beta);
        let top = e[g0[0] as usize];
        (0..self.n)
            .filter(|g| !g0.contains(g))
            .map(|g| (e[g as usize] - top).exp())
            .sum()
    }

    /// `K₀^{(M)} = 5^M (n−1)^M / (1 − 5(n−1)λ(β)²)`; infinite when the
    /// denominator is not positive.
    pub fn k0(&self, m: u32, beta: f64) -> f64 {
        let nm1 = (self.n - 1) as f64;
        let den = 1.0 - 5.0 * nm1 * self.lambda(beta).powi(2);
        if den <= 0.0 {
            return f64::INFINITY;
        }
        (5.0 * nm1).powi(m as i32) / den
    }

    /// `K_* = ξ/4`.
    pub fn k_lower(&self) -> f64 {
        self.xi() / 4.0
    }
}

/// Visits every tuple in `G^6`, or a random sample of them when `n > 8`.
/// Returns whether the scan was exhaustive.
pub fn for_each_six_tuple(n: u32, seed: u64, mut f: impl FnMut(&[u32; 6])) -> bool {
    if n <= STAR_EXHAUSTIVE_MAX_N {
        let mut t = [0u32; 6];
        loop {
            f(&t);
            let mut i = 0;
            loop {
                if i == 6 {
                    return true;
                }
                t[i] += 1;
                if t[i] < n {
                    break;
                }
                t[i] = 0;
                i += 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..STAR_RANDOM_SAMPLES {
            let t: [u32; 6] = std::array::from_fn(|_| rng.gen_range(0..n));
            f(&t);
        }
        false
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub value: f64,
    pub limit: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub n: u32,
    pub beta0: f64,
    /// `5(n−1)λ(β₀)² < 1`
    pub geometric_series: ConditionCheck,
    /// (★): worst residual over six-tuples against `ξ/8`
    pub star: ConditionCheck,
    pub star_exhaustive: bool,
    /// `2λ(β₀)^{12} ≤ 1`
    pub lambda12: ConditionCheck,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.geometric_series.holds && self.star.holds && self.lambda12.holds
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.geometric_series.holds {
            Some("5(n-1)lambda^2 < 1")
        } else if !self.star.holds {
            Some("(star) residual < xi/8")
        } else if !self.lambda12.holds {
            Some("2 lambda^12 <= 1")
        } else {
            None
        }
    }

    pub fn require(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::Inadmissible { beta0: self.beta0, condition: c.into() }),
        }
    }
}

fn max_star_residual(rep: &Representation, beta: f64) -> (f64, bool) {
    let mut worst = 0.0f64;
    let exhaustive = for_each_six_tuple(rep.n, 0x5eed, |t| worst = worst.max(rep.star_residual(t, beta)));
    (worst, exhaustive)
}

/// Checks the three conditions on `β₀`. Each residual of (★) decreases in
/// β, so holding at `β₀` covers every `β ≥ β₀`.
pub fn beta0_admissible(rep: &Representation, beta0: f64) -> Result<AdmissibilityReport> {
    if !(beta0 > 0.0) {
        return domain(format!("beta0 = {beta0} must be positive"));
    }
    let lam = rep.lambda(beta0);
    let geo = 5.0 * (rep.n - 1) as f64 * lam * lam;
    let (worst, exhaustive) = max_star_residual(rep, beta0);
    let l12 = 2.0 * lam.powi(12);
    Ok(AdmissibilityReport {
        n: rep.n,
        beta0,
        geometric_series: ConditionCheck { value: geo, limit: 1.0, holds: geo < 1.0 },
        star: ConditionCheck { value: worst, limit: rep.xi() / 8.0, holds: worst < rep.xi() / 8.0 },
        star_exhaustive: exhaustive,
        lambda12: ConditionCheck { value: l12, limit: 1.0, holds: l12 <= 1.0 },
    })
}

/// Smallest admissible `β₀` on the grid `0.01 ℤ`.
pub fn minimal_admissible_beta0(rep: &Representation) -> f64 {
    let xi = rep.xi();
    let geo = (5.0 * (rep.n - 1) as f64).ln() / (2.0 * xi);
    let l12 = 2f64.ln() / (12.0 * xi);
    let (mut lo, mut hi) = (0.0, 1.0);
    while max_star_residual(rep, hi).0 >= xi / 8.0 {
        hi *= 2.0;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if max_star_residual(rep, mid).0 < xi / 8.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut b = (geo.max(l12).max(hi) * 100.0).ceil() / 100.0;
    while !beta0_admissible(rep, b).map(|r| r.admissible()).unwrap_or(false) {
        b += 0.01;
    }
    b
}

/// Number of unoriented plaquettes lying in a cube of width `w` together with
/// some point of a fixed unit edge of ℤ⁴.
pub fn plaquettes_near_edge(w: i32) -> u64 {
    let dim = 4;
    // admissible base coordinates along one axis, for plaquette extent `len`
    // and edge extent [0, edge_len]
    let count = |len: i32, edge_len: i32| -> u64 {
        (-w - 2..=w + 2)
            .filter(|&a| {
                (0..=edge_len).any(|x| (a + len).max(x) - a.min(x) <= w)
                    || (edge_len == 1 && a >= 0 && a + len <= 1 && len <= w)
            })
            .count() as u64
    };
    let mut total = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            total += (0..dim)
                .map(|c| {
                    let len = (c == i || c == j) as i32;
                    let edge_len = (c == 0) as i32;
                    count(len, edge_len)
                })
                .product::<u64>();
        }
    }
    total
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Formula,
    ConservativeBound,
    NumericallyMaximized,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
}

fn formula(value: f64) -> Quantity {
    Quantity { value, provenance: Provenance::Formula }
}

/// Constants of the Wilson-loop estimates for given `(n, m_rep, β₀)`.
#[derive(Clone, Debug, Serialize)]
pub struct TheoryConstants {
    pub n: u32,
    pub m_rep: u32,
    pub beta0: f64,
    pub theta: Quantity,
    pub lambda: Quantity,
    pub xi: Quantity,
    /// `K* = sup_{β>β₀} (1−θ)λ^{−12}`
    pub k_star_sup: Quantity,
    pub k_star_grid: f64,
    pub k_star_limit: f64,
    /// `K_* = ξ/4`
    pub k_lower: Quantity,
    /// `K₀^{(M)}` at `β₀` for M = 2, 6, 7, 25
    pub k0: BTreeMap<u32, Quantity>,
    pub k1: Quantity,
    pub b: Quantity,
    pub c_a: Quantity,
    pub k_prime: Quantity,
    pub k_dblprime: Quantity,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..60 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    f(0.5 * (a + b))
}

impl TheoryConstants {
    pub fn new(rep: &Representation, beta0: f64) -> Result<TheoryConstants> {
        beta0_admissible(rep, beta0)?.require()?;
        let f = |b: f64| rep.theta_gap_ratio(b);
        let mut best = (beta0, f(beta0));
        for i in 1..=2000 {
            let b = beta0 + 0.01 * i as f64;
            let v = f(b);
            if v > best.1 {
                best = (b, v);
            }
        }
        let refined = golden_max(f, (best.0 - 0.01).max(beta0), best.0 + 0.01).max(best.1);
        let limit = if rep.n >= 3 { 2.0 } else { 1.0 } * rep.xi();
        let k_star = refined.max(limit);
        let k_lower = rep.k_lower();
        let k0: BTreeMap<u32, Quantity> = [2, 6, 7, 25].into_iter().map(|m| (m, formula(rep.k0(m, beta0)))).collect();
        let k1 = plaquettes_near_edge(WIDTH_BOUND_B + 2) as f64;
        let c_a = 7.0 * k0[&6].value / (2.0 * k_star)
            + 2.0 * k1 * k0[&7].value / k_star
            + 5.0 * k0[&25].value / (8.0 * k_star.powi(4))
            + 4.5;
        let ratio = 4.0 * k_star / k_lower;
        let k_prime = 2f64.sqrt() * ((c_a.ln() + ratio * 2f64.ln()) / (1.0 + ratio)).exp();
        Ok(TheoryConstants {
            n: rep.n,
            m_rep: rep.m_rep,
            beta0,
            theta: formula(rep.theta(beta0)),
            lambda: formula(rep.lambda(beta0)),
            xi: formula(rep.xi()),
            k_star_sup: Quantity { value: k_star, provenance: Provenance::NumericallyMaximized },
            k_star_grid: refined,
            k_star_limit: limit,
            k_lower: formula(k_lower),
            k0,
            k1: Quantity { value: k1, provenance: Provenance::ConservativeBound },
            b: Quantity { value: WIDTH_BOUND_B as f64, provenance: Provenance::ConservativeBound },
            c_a: Quantity { value: c_a, provenance: Provenance::ConservativeBound },
            k_prime: Quantity { value: k_prime, provenance: Provenance::ConservativeBound },
            k_dblprime: formula(1.0 / (1.0 + ratio)),
        })
    }

    /// `K′[√(ℓ_c/ℓ) + λ(β)²]^{K″}`.
    pub fn error_envelope(&self, rep: &Representation, ell: usize, ell_c: usize, beta: f64) -> f64 {
        let base = (ell_c as f64 / ell as f64).sqrt() + rep.lambda(beta).powi(2);
        self.k_prime.value * base.powf(self.k_dblprime.value)
    }

    /// `C_A e^{2K* ℓ λ^{12}} [√(ℓ_c/ℓ) + λ²]`.
    pub fn small_loop_bound(&self, rep: &Representation, ell: usize, ell_c: usize, beta: f64) -> f64 {
        let lam = rep.lambda(beta);
        self.c_a.value
            * (2.0 * self.k_star_sup.value * ell as f64 * lam.powi(12)).exp()
            * ((ell_c as f64 / ell as f64).sqrt() + lam * lam)
    }

    /// The sharper bound on `|E W_γ − θ^ℓ|`, valid when `ℓλ^{12} < 1`.
    pub fn sharp_small_loop_bound(&self, rep: &Representation, ell: usize, ell_c: usize, beta: f64) -> Option<f64> {
        let lam = rep.lambda(beta);
        let x = ell as f64 * lam.powi(12);
        if x >= 1.0 {
            return None;
        }
        let (k6, k7, k25) = (rep.k0(6, beta), rep.k0(7, beta), rep.k0(25, beta));
        let ks = self.k_star_sup.value;
        let pre = (k6 + 2.0 * ks) * ks.exp() + 4.0 * self.k1.value * k7 + 2.0 * k6 + 2.0 * k25;
        Some(pre * ((ell_c as f64 / ell as f64).sqrt() + lam * lam) * x)
    }
}

/// `e^{−ℓ(1−θ(β))}`.
pub fn predicted_wilson(rep: &Representation, ell: usize, beta: f64) -> f64 {
    (-(ell as f64) * rep.one_minus_theta(beta)).exp()
}

/// `e^{−K_*(ℓ−ℓ_c)λ(β)^{12}}`.
pub fn large_beta_envelope(rep: &Representation, ell: usize, ell_c: usize, beta: f64) -> f64 {
    (-rep.k_lower() * (ell as f64 - ell_c as f64) * rep.lambda(beta).powi(12)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_and_phi_examples() {
        let r2 = Representation::standard(2).unwrap();
        assert!((r2.rho(1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((r2.phi(1, 0.7) - (-0.7f64).exp()).abs() < 1e-15);
        let r4 = Representation::standard(4).unwrap();
        assert!((r4.rho(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((r4.phi(1, 3.0) - 1.0).abs() < 1e-15);
        for n in 2..=12 {
            let r = Representation::standard(n).unwrap();
            for g in 0..n as i64 {
                assert_eq!(r.phi(g, 1.3), r.phi(n as i64 - g, 1.3));
            }
        }
        assert!(Representation::new(6, 2).is_err());
        assert!(Representation::new(6, 5).is_ok());
    }

    #[test]
    fn theta_examples() {
        let r2 = Representation::standard(2).unwrap();
        assert!((r2.theta(0.1) - 1.2f64.tanh()).abs() < 1e-14);
        for n in 2..=7 {
            let r = Representation::standard(n).unwrap();
            assert!(r.theta(0.0).abs() < 1e-15);
            assert!((r.theta(40.0) - 1.0).abs() < 1e-12);
            assert!((r.one_minus_theta(0.7) - (1.0 - r.theta(0.7))).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_does_not_depend_on_exponent() {
        let a = Representation::new(5, 1).unwrap();
        let b = Representation::new(5, 3).unwrap();
        assert!((a.theta(0.4) - b.theta(0.4)).abs() < 1e-14);
    }

    #[test]
    fn lambda_and_lower_constant() {
        let r2 = Representation::standard(2).unwrap();
        assert!((r2.lambda(0.8) - (-1.6f64).exp()).abs() < 1e-15);
        assert!((Representation::standard(4).unwrap().lambda(0.8) - (-0.8f64).exp()).abs() < 1e-15);
        assert!((r2.k_lower() - 0.5).abs() < 1e-15);
        assert!((Representation::standard(6).unwrap().k_lower() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn s_beta_and_g0_examples() {
        let r3 = Representation::standard(3).unwrap();
        let z = r3.s_beta(&[0; 6], 0.45);
        assert!((z.re - r3.theta(0.45)).abs() < 1e-14 && z.im.abs() < 1e-14);
        assert_eq!(r3.g0(&[0; 6]), vec![0]);
        let r2 = Representation::standard(2).unwrap();
        assert_eq!(r2.g0(&[0, 0, 0, 1, 1, 1]), vec![0, 1]);
        // G0 for (1,1,1,1,1,1) is {1}: g = 1 gives 1+1 = 0 in Z_2... i.e. ρ(g)Σρ maximal at g = 1
        assert_eq!(r2.g0(&[1; 6]), vec![1]);
    }

    #[test]
    fn k0_formula_value() {
        let r2 = Representation::standard(2).unwrap();
        let direct = 15625.0 / (1.0 - 5.0 * (-4.0f64).exp());
        assert!((r2.k0(6, 1.0) - direct).abs() < 1e-9);
        assert!((r2.k0(6, 1.0) - 17200.1).abs() < 0.1);
    }

    #[test]
    fn admissibility_examples() {
        let r2 = Representation::standard(2).unwrap();
        let ok = beta0_admissible(&r2, 1.0).unwrap();
        assert!(ok.geometric_series.holds && (ok.geometric_series.value - 5.0 * (-4.0f64).exp()).abs() < 1e-14);
        assert!(ok.admissible() && ok.star_exhaustive);
        let bad = beta0_admissible(&r2, 0.3).unwrap();
        assert!(!bad.geometric_series.holds);
        assert!((bad.geometric_series.value - 5.0 * (-1.2f64).exp()).abs() < 1e-14);
        assert!(TheoryConstants::new(&r2, 0.3).is_err());
    }

    #[test]
    fn star_residual_for_n2_matches_closed_form() {
        // the worst n = 2 tuple is a 4:2 split, residual e^{-8β}
        let r2 = Representation::standard(2).unwrap();
        let (worst, _) = max_star_residual(&r2, 0.5);
        assert!((worst - (-4.0f64).exp()).abs() < 1e-15);
        let b = minimal_admissible_beta0(&r2);
        assert!(b >= 5f64.ln() / 4.0 && b < 5f64.ln() / 4.0 + 0.011);
    }

    #[test]
    fn constants_bundle_shape() {
        let r2 = Representation::standard(2).unwrap();
        let c = TheoryConstants::new(&r2, 1.0).unwrap();
        assert!((c.k_star_limit - 2.0).abs() < 1e-15);
        assert!((c.k_dblprime.value - 1.0 / 17.0).abs() < 1e-12);
        assert!(c.k_prime.value >= 2.0 * 2f64.sqrt() && c.c_a.value >= 4.5);
        assert!((predicted_wilson(&r2, 0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k1_counts_the_edge_itself_region() {
        // width 0 cube containing a plaquette is impossible
        assert_eq!(plaquettes_near_edge(0), 0);
        // width 1: plaquettes sharing a point with the edge and fitting a unit cube
        let direct = {
            let mut n = 0;
            for i in 0..4usize {
                for j in i + 1..4 {
                    for a in -3..=3 {
                        for b in -3..=3 {
                            for c in -3..=3 {
                                for d in -3..=3 {
                                    let base = [a, b, c, d];
                                    let fits = (0..4).all(|k| {
                                        let len = (k == i || k == j) as i32;
                                        let (lo, hi) = (base[k], base[k] + len);
                                        if k == 0 {
                                            [0, 1].iter().any(|&x| hi.max(x) - lo.min(x) <= 1)
                                        } else {
                                            hi.max(0) - lo.min(0) <= 1
                                        }
                                    });
                                    n += fits as u64;
                                }
                            }
                        }
                    }
                }
            }
            n
        };
        assert_eq!(plaquettes_near_edge(1), direct);
    }
}
