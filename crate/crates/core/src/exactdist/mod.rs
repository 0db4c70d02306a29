//! Exact laws of the statistics for unconditional trees, and brute-force
//! conditional laws for small sizes.
//!
//! All recursions run on survival values `s_x = P{stat ≥ x}` through the
//! function `φ(u) = f(1 − u) − 1 + u ≥ 0`, which for the critical law behaves
//! like `σ²u²/2` near zero. Near zero `φ` is evaluated from its Taylor
//! coefficients at 1, so no step ever subtracts two numbers close to one and
//! tails that are doubly-exponentially small stay accurate to the working
//! precision.
//!
//! * HS: `q_x = φ(s_x) / φ'(s_x)` for every `x ≥ 0` (with `s_0 = 1`).
//! * rigid: `s_{x+1} = t` solves `φ(t) = Σ_{ℓ≥2} p_ℓ (s_x − t)^ℓ`.
//! * k-ary: `s_{x+1} = t` solves `φ(t) = R_k(s_x − t, 1 − s_x)` with
//!   `R_k(q, F) = Σ_ℓ p_ℓ Σ_{j≥k} C(ℓ,j) q^j F^{ℓ−j}`.
//!
//! The input pmf is lifted to extended precision and projected onto the
//! exactly critical laws (`Σ p = Σ i p = 1`) by a linear tilt, so that the
//! double-precision rounding of the mean does not leak into the tails.

mod real;

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

pub use real::Real;

use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;
use crate::strahler::Statistic;
use crate::tree::enumerate_trees;

pub const DEFAULT_PRECISION_BITS: usize = 256;
pub const MIN_PRECISION_BITS: usize = 64;

/// Exact pmf and survival function of a statistic.
#[derive(Debug, Clone)]
pub struct TailTable {
    pub statistic: String,
    pub dist: String,
    pub x_max: usize,
    /// `q_0..q_{x_max}`.
    pub q: Vec<Real>,
    /// `s_0..s_{x_max+1}` with `s_x = P{stat ≥ x}`.
    pub s: Vec<Real>,
    pub precision_bits: usize,
    pub transform_applied: bool,
    pub truncation_mass: f64,
}

#[derive(Debug, Serialize)]
struct TableMetadata<'a> {
    dist: &'a str,
    statistic: &'a str,
    precision: usize,
    x_max: usize,
    transform_applied: bool,
    truncation_mass: f64,
}

impl TailTable {
    pub fn q_f64(&self) -> Vec<f64> {
        self.q.iter().map(Real::to_f64).collect()
    }

    /// `x,q,survival` rows, `survival` being `P{stat ≥ x}`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,q,survival")?;
        for (x, q) in self.q.iter().enumerate() {
            writeln!(out, "{x},{},{}", q.to_decimal_string(), self.s[x].to_decimal_string())?;
        }
        Ok(())
    }

    pub fn metadata_json(&self) -> serde_json::Value {
        serde_json::to_value(TableMetadata {
            dist: &self.dist,
            statistic: &self.statistic,
            precision: self.precision_bits,
            x_max: self.x_max,
            transform_applied: self.transform_applied,
            truncation_mass: self.truncation_mass,
        })
        .expect("metadata serializes")
    }
}

/// Extended-precision critical pmf plus the Taylor coefficients of `φ` at 0.
struct BigLaw {
    bits: usize,
    p: Vec<Real>,
    /// `c_j = (−1)^j Σ_ℓ p_ℓ C(ℓ, j)`; `φ(u) = Σ_{j≥2} c_j u^j`.
    taylor: Vec<Real>,
    /// Binomial coefficients `C(ℓ, j)`.
    binom: Vec<Vec<Real>>,
    quarter: Real,
}

impl BigLaw {
    fn new(dist: &OffspringDistribution, bits: usize, remove_single_child: bool) -> Result<Self> {
        if bits < MIN_PRECISION_BITS {
            return Err(Error::BadParam(format!("precision must be at least {MIN_PRECISION_BITS} bits")));
        }
        dist.require_critical()?;
        let mut p: Vec<Real> = dist.pmf().iter().map(|&x| Real::from_f64(x, bits)).collect();
        project_critical(&mut p, bits)?;
        if remove_single_child && p.len() > 1 && !p[1].is_zero() {
            let keep = Real::one(bits) - &p[1];
            p[1] = Real::zero(bits);
            for x in p.iter_mut() {
                *x = &*x / &keep;
            }
        }
        while p.len() > 1 && p.last().is_some_and(Real::is_zero) {
            p.pop();
        }

        let len = p.len();
        let mut binom: Vec<Vec<Real>> = Vec::with_capacity(len);
        for l in 0..len {
            let mut row = vec![Real::one(bits); l + 1];
            for j in 1..l {
                row[j] = &binom[l - 1][j - 1] + &binom[l - 1][j];
            }
            binom.push(row);
        }
        let mut taylor = vec![Real::zero(bits); len.max(2)];
        for (j, c) in taylor.iter_mut().enumerate().skip(2) {
            let mut acc = Real::zero(bits);
            for l in j..len {
                acc = acc + &p[l] * &binom[l][j];
            }
            *c = if j % 2 == 1 { -acc } else { acc };
        }
        Ok(BigLaw { bits, p, taylor, binom, quarter: Real::pow2(-2, bits) })
    }

    fn zero(&self) -> Real {
        Real::zero(self.bits)
    }

    fn one(&self) -> Real {
        Real::one(self.bits)
    }

    /// `Σ_{i ≥ from} coef_i u^i` by Horner's rule.
    fn horner(coef: &[Real], from: usize, u: &Real) -> Real {
        let mut acc = Real::zero(u.precision());
        for c in coef.iter().skip(from).rev() {
            acc = &acc * u + c;
        }
        if from > 0 {
            acc = acc * u.powi(from);
        }
        acc
    }

    /// `f(u)`.
    fn pgf(&self, u: &Real) -> Real {
        Self::horner(&self.p, 0, u)
    }

    /// `f'(u)`.
    fn pgf_prime(&self, u: &Real) -> Real {
        let mut acc = self.zero();
        for l in (1..self.p.len()).rev() {
            acc = &acc * u + &self.p[l] * Real::from_u64(l as u64, self.bits);
        }
        acc
    }

    /// `φ(u) = f(1 − u) − 1 + u`.
    fn phi(&self, u: &Real) -> Real {
        if *u < self.quarter {
            Self::horner(&self.taylor, 2, u)
        } else {
            self.pgf(&(self.one() - u)) - self.one() + u
        }
    }

    /// `φ'(u) = 1 − f'(1 − u)`.
    fn phi_prime(&self, u: &Real) -> Real {
        if *u < self.quarter {
            let mut acc = self.zero();
            for j in (2..self.taylor.len()).rev() {
                acc = &acc * u + &self.taylor[j] * Real::from_u64(j as u64, self.bits);
            }
            acc * u
        } else {
            self.one() - self.pgf_prime(&(self.one() - u))
        }
    }

    fn p0_over_one_minus_p1(&self) -> Real {
        let p1 = self.p.get(1).cloned().unwrap_or_else(|| self.zero());
        &self.p[0] / (self.one() - p1)
    }

    /// Coefficients `b_j = Σ_ℓ p_ℓ C(ℓ, j) F^{ℓ−j}` so that
    /// `R_k(q, F) = Σ_{j≥k} b_j q^j`.
    fn rk_coefficients(&self, f: &Real, k: usize) -> Vec<Real> {
        let len = self.p.len();
        let mut fpow = vec![self.one(); len];
        for i in 1..len {
            fpow[i] = &fpow[i - 1] * f;
        }
        (0..len)
            .map(|j| {
                if j < k {
                    return self.zero();
                }
                let mut acc = self.zero();
                for l in j..len {
                    acc = acc + &self.p[l] * &self.binom[l][j] * &fpow[l - j];
                }
                acc
            })
            .collect()
    }
}

/// Multiplies `p_i` by `a + b i` so that the total mass and the mean are
/// both exactly one.
fn project_critical(p: &mut [Real], bits: usize) -> Result<()> {
    let (mut s0, mut s1, mut s2) = (Real::zero(bits), Real::zero(bits), Real::zero(bits));
    for (i, x) in p.iter().enumerate() {
        let i = Real::from_u64(i as u64, bits);
        s0 = s0 + x;
        s1 = s1 + x * &i;
        s2 = s2 + x * &i * &i;
    }
    let det = &s0 * &s2 - &s1 * &s1;
    if !det.is_positive() {
        return Err(Error::DegenerateVariance);
    }
    let a = (&s2 - &s1) / &det;
    let b = (&s0 - &s1) / &det;
    for (i, x) in p.iter_mut().enumerate() {
        let w = &a + &b * Real::from_u64(i as u64, bits);
        *x = &*x * &w;
    }
    Ok(())
}

/// Root of the increasing function `g` on `[0, hi]`, to relative accuracy
/// `2^{-bits/2}`.
///
/// Roots can be astronomically smaller than `hi` (doubly-exponential tails),
/// so the search first gallops down in exponent, then bisects geometrically
/// while the bracket spans more than a factor two, and finishes with plain
/// bisection.
fn bisect(g: impl Fn(&Real) -> Real, hi: &Real, x: usize, bits: usize) -> Result<Real> {
    let mut lo = Real::zero(bits);
    let mut hi = hi.clone();
    let (g_lo, g_hi) = (g(&lo), g(&hi));
    if !g_lo.is_finite() || !g_hi.is_finite() || g_lo.is_positive() || g_hi.is_negative() {
        return Err(Error::NoBracket { x });
    }
    if g_lo.is_zero() {
        return Ok(lo);
    }
    if g_hi.is_zero() {
        return Ok(hi);
    }
    let tol = Real::pow2(-(bits as i32 / 2), bits);
    let two = Real::from_u64(2, bits);
    let mut step: i32 = 1;
    for _ in 0..10 * bits {
        let mid = if lo.is_zero() {
            if step > 1 << 29 {
                break;
            }
            let m = &hi * Real::pow2(-step, bits);
            step = step.saturating_mul(2);
            m
        } else if hi > &lo * &two {
            (&lo * &hi).sqrt()
        } else {
            (&lo + &hi).half()
        };
        let g_mid = g(&mid);
        if g_mid.is_zero() {
            return Ok(mid);
        }
        if g_mid.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
        if lo.is_positive() && (&hi - &lo) <= &tol * &lo {
            return Ok((&lo + &hi).half());
        }
    }
    Err(Error::PrecisionExhausted { x })
}

/// Appends `q_x = s_x − t` and `s_{x+1} = t`, checking the result is sane.
fn push_step(q: &mut Vec<Real>, s: &mut Vec<Real>, t: Real, x: usize) -> Result<()> {
    let sx = s.last().expect("s_0 is set");
    let qx = sx - &t;
    if !qx.is_finite() || qx.is_negative() || t.is_negative() {
        return Err(Error::PrecisionExhausted { x });
    }
    q.push(qx);
    s.push(t);
    Ok(())
}

fn table(
    dist: &OffspringDistribution,
    statistic: String,
    law: &BigLaw,
    transform: bool,
    q: Vec<Real>,
    s: Vec<Real>,
) -> TailTable {
    TailTable {
        statistic,
        dist: dist.label(),
        x_max: q.len() - 1,
        q,
        s,
        precision_bits: law.bits,
        transform_applied: transform,
        truncation_mass: dist.truncation_mass(),
    }
}

fn hs_table(dist: &OffspringDistribution, x_max: usize, bits: usize, transform: bool) -> Result<TailTable> {
    let law = BigLaw::new(dist, bits, transform)?;
    let mut q = Vec::with_capacity(x_max + 1);
    let mut s = vec![law.one()];
    for x in 0..=x_max {
        let sx = s[x].clone();
        if sx.is_zero() {
            return Err(Error::PrecisionExhausted { x });
        }
        let denom = law.phi_prime(&sx);
        if !denom.is_positive() {
            return Err(Error::PrecisionExhausted { x });
        }
        let qx = law.phi(&sx) / denom;
        push_step(&mut q, &mut s, &sx - &qx, x)?;
    }
    Ok(table(dist, "hs".into(), &law, transform, q, s))
}

fn rigid_table(
    dist: &OffspringDistribution,
    x_max: usize,
    bits: usize,
    transform: bool,
) -> Result<TailTable> {
    let law = BigLaw::new(dist, bits, transform)?;
    let mut q = Vec::with_capacity(x_max + 1);
    let mut s = vec![law.one()];
    let q0 = law.p0_over_one_minus_p1();
    push_step(&mut q, &mut s, law.one() - q0, 0)?;
    for x in 1..=x_max {
        let sx = s[x].clone();
        let t = if sx.is_zero() {
            sx.clone()
        } else {
            bisect(|t| law.phi(t) - BigLaw::horner(&law.p, 2, &(&sx - t)), &sx, x, bits)?
        };
        push_step(&mut q, &mut s, t, x)?;
    }
    Ok(table(dist, "rigid".into(), &law, transform, q, s))
}

pub(crate) fn kary_table_unchecked(
    dist: &OffspringDistribution,
    k: usize,
    x_max: usize,
    bits: usize,
) -> Result<TailTable> {
    let law = BigLaw::new(dist, bits, false)?;
    let mut q = Vec::with_capacity(x_max + 1);
    let mut s = vec![law.one()];
    for x in 0..=x_max {
        let sx = s[x].clone();
        let t = if sx.is_zero() {
            sx.clone()
        } else {
            let b = law.rk_coefficients(&(law.one() - &sx), k);
            bisect(|t| law.phi(t) - BigLaw::horner(&b, k, &(&sx - t)), &sx, x, bits)?
        };
        push_step(&mut q, &mut s, t, x)?;
    }
    Ok(table(dist, format!("kary:{k}"), &law, false, q, s))
}

/// Exact law of HS for the unconditional tree, computed after removing
/// single children (which leaves the law unchanged).
pub fn hs_tail_table(dist: &OffspringDistribution, x_max: usize, precision_bits: usize) -> Result<TailTable> {
    hs_table(dist, x_max, precision_bits, true)
}

/// Same law computed directly on the original pmf, single children included.
pub fn hs_tail_table_untransformed(
    dist: &OffspringDistribution,
    x_max: usize,
    precision_bits: usize,
) -> Result<TailTable> {
    hs_table(dist, x_max, precision_bits, false)
}

/// Exact law of the rigid number.
pub fn rigid_tail_table(
    dist: &OffspringDistribution,
    x_max: usize,
    precision_bits: usize,
) -> Result<TailTable> {
    rigid_table(dist, x_max, precision_bits, true)
}

pub fn rigid_tail_table_untransformed(
    dist: &OffspringDistribution,
    x_max: usize,
    precision_bits: usize,
) -> Result<TailTable> {
    rigid_table(dist, x_max, precision_bits, false)
}

/// Exact law of the `k`-ary register function, `k ≥ 3` (use
/// [`hs_tail_table`] for `k = 2`).
pub fn kary_tail_table(
    dist: &OffspringDistribution,
    k: usize,
    x_max: usize,
    precision_bits: usize,
) -> Result<TailTable> {
    if k < 3 {
        return Err(Error::BadK { k, min: 3 });
    }
    kary_table_unchecked(dist, k, x_max, precision_bits)
}

/// Table for any statistic that has an exact recursion.
pub fn tail_table(
    dist: &OffspringDistribution,
    statistic: Statistic,
    x_max: usize,
    precision_bits: usize,
) -> Result<TailTable> {
    match statistic {
        Statistic::Hs => hs_tail_table(dist, x_max, precision_bits),
        Statistic::Rigid => rigid_tail_table(dist, x_max, precision_bits),
        Statistic::Kary(k) => kary_tail_table(dist, k, x_max, precision_bits),
        other => Err(Error::UnsupportedStatistic(other.to_string())),
    }
}

/// Exact law of `statistic` on the tree conditioned to have `n` nodes, by
/// weighting every tree of that size. Also returns `P{|T| = n}`.
pub fn conditional_bruteforce_with_mass(
    dist: &OffspringDistribution,
    n: usize,
    statistic: Statistic,
) -> Result<(BTreeMap<u32, f64>, f64)> {
    let trees = enumerate_trees(dist, n)?;
    if !dist.is_feasible_size(n as u64) {
        return Err(Error::InfeasibleSize { n: n as u64 });
    }
    let mut pmf: BTreeMap<u32, f64> = BTreeMap::new();
    let mut total = 0.0;
    for wt in trees {
        *pmf.entry(statistic.evaluate(&wt.tree)?).or_default() += wt.weight;
        total += wt.weight;
    }
    for w in pmf.values_mut() {
        *w /= total;
    }
    Ok((pmf, total))
}

pub fn conditional_bruteforce(
    dist: &OffspringDistribution,
    n: usize,
    statistic: Statistic,
) -> Result<BTreeMap<u32, f64>> {
    conditional_bruteforce_with_mass(dist, n, statistic).map(|(pmf, _)| pmf)
}

/// Constants governing the rigid number's growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigidConstants {
    /// Smallest `i > 1` with `p_i > 0`.
    pub d: u32,
    /// `1 + √(σ²/(2 p_2))`, only when `d = 2`.
    pub gamma: Option<f64>,
}

pub fn rigid_constants(dist: &OffspringDistribution) -> Result<RigidConstants> {
    let d = dist.d().ok_or(Error::NoBranching)?;
    let gamma = (d == 2).then(|| 1.0 + (dist.variance() / (2.0 * dist.p(2))).sqrt());
    Ok(RigidConstants { d, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin(name: &str) -> OffspringDistribution {
        OffspringDistribution::builtin(name, None).unwrap()
    }

    fn d3() -> OffspringDistribution {
        OffspringDistribution::new_finite(&[2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0]).unwrap()
    }

    fn rel_close(a: &Real, b: &Real, log2_tol: i32) -> bool {
        if a.is_zero() && b.is_zero() {
            return true;
        }
        let diff = (a - b).abs();
        diff <= Real::pow2(log2_tol, a.precision()) * a.abs()
    }

    #[test]
    fn catalan_closed_form() {
        let t = hs_tail_table(&builtin("catalan"), 40, 256).unwrap();
        for (x, q) in t.q.iter().enumerate() {
            let expect = Real::pow2(-(x as i32 + 1), 256);
            assert!((q - &expect).abs() < Real::pow2(-200, 256), "x = {x}");
        }
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,q,survival"));
        assert_eq!(lines.next(), Some("0,0.5,1"));
        assert_eq!(lines.next(), Some("1,0.25,0.5"));
        let meta = t.metadata_json();
        assert_eq!(meta["statistic"], "hs");
        assert_eq!(meta["precision"], 256);
    }

    #[test]
    fn full_binary_equals_catalan() {
        let a = hs_tail_table(&builtin("catalan"), 30, 256).unwrap();
        let b = hs_tail_table(&builtin("full-binary"), 30, 256).unwrap();
        let c = rigid_tail_table(&builtin("full-binary"), 30, 256).unwrap();
        for x in 0..=30 {
            assert!(rel_close(&a.q[x], &b.q[x], -240));
            assert!(rel_close(&b.q[x], &c.q[x], -120));
        }
    }

    #[test]
    fn base_cases() {
        let geo = hs_tail_table(&builtin("geometric-half"), 3, 256).unwrap();
        // tail truncation and the critical projection move this by ~1e-14
        assert!((geo.q[0].to_f64() - 2.0 / 3.0).abs() < 1e-12);
        let rig = rigid_tail_table(&d3(), 3, 256).unwrap();
        assert!((rig.q[0].to_f64() - 2.0 / 3.0).abs() < 1e-15);
        let k3 = kary_tail_table(&d3(), 3, 3, 256).unwrap();
        assert!((k3.q[0].to_f64() - 2.0 / 3.0).abs() < 1e-15);
        let cat = kary_tail_table(&builtin("catalan"), 3, 5, 256).unwrap();
        assert_eq!(cat.q[0].to_f64(), 1.0);
        assert!(cat.q[1..].iter().all(Real::is_zero));
        let bin = kary_tail_table(&OffspringDistribution::builtin("binomial", Some(3)).unwrap(), 3, 2, 256)
            .unwrap();
        let root = (15.0 - 33f64.sqrt()) / 12.0;
        assert!((bin.q[0].to_f64() - root).abs() < 1e-12);
        assert!((bin.q[0].to_f64() - 0.7713).abs() < 1e-4);
        assert!(matches!(kary_tail_table(&d3(), 2, 3, 256), Err(Error::BadK { k: 2, min: 3 })));
        assert!(matches!(hs_tail_table(&d3(), 3, 16), Err(Error::BadParam(_))));
        let sub = OffspringDistribution::new_finite(&[0.5, 0.5]).unwrap();
        assert!(matches!(hs_tail_table(&sub, 3, 256), Err(Error::NotCritical { .. })));
    }

    #[test]
    fn table_invariants() {
        for dist in [builtin("catalan"), builtin("poisson1"), builtin("geometric-half"), d3()] {
            for t in [
                hs_tail_table(&dist, 25, 256).unwrap(),
                rigid_tail_table(&dist, 25, 256).unwrap(),
                kary_tail_table(&dist, 3, 25, 256).unwrap(),
            ] {
                assert_eq!(t.s[0], Real::one(256));
                let mut total = t.s[t.x_max + 1].clone();
                for x in 0..=t.x_max {
                    assert!(!t.q[x].is_negative());
                    assert!(t.s[x + 1] <= t.s[x]);
                    total = total + &t.q[x];
                }
                assert!(rel_close(&total, &Real::one(256), -128), "{} {}", t.dist, t.statistic);
            }
        }
    }

    #[test]
    fn single_child_removal_is_invisible() {
        for name in ["geometric-half", "poisson1"] {
            let d = builtin(name);
            let pairs = [
                (hs_tail_table(&d, 40, 256).unwrap(), hs_tail_table_untransformed(&d, 40, 256).unwrap()),
                (
                    rigid_tail_table(&d, 40, 256).unwrap(),
                    rigid_tail_table_untransformed(&d, 40, 256).unwrap(),
                ),
            ];
            for (a, b) in &pairs {
                assert!(a.transform_applied && !b.transform_applied);
                for x in 0..=40 {
                    assert!(rel_close(&a.q[x], &b.q[x], -110), "{name} {} x = {x}", a.statistic);
                }
            }
        }
    }

    #[test]
    fn binary_specialization_of_kary_is_hs() {
        for dist in [builtin("poisson1"), builtin("geometric-half"), d3()] {
            let hs = hs_tail_table_untransformed(&dist, 30, 256).unwrap();
            let k2 = kary_table_unchecked(&dist, 2, 30, 256).unwrap();
            for x in 0..=30 {
                assert!(rel_close(&hs.q[x], &k2.q[x], -110), "{} x = {x}", dist.label());
            }
        }
    }

    #[test]
    fn enumeration_lower_bounds_the_tables() {
        // Σ_{n ≤ N} P{stat = x, |T| = n} ≤ q_x, and the gap is at most P{|T| > N}.
        let dist = builtin("geometric-half");
        let tables = [
            (Statistic::Hs, hs_tail_table(&dist, 6, 128).unwrap()),
            (Statistic::Rigid, rigid_tail_table(&dist, 6, 128).unwrap()),
            (Statistic::Kary(3), kary_tail_table(&dist, 3, 6, 128).unwrap()),
        ];
        for (stat, table) in tables {
            let mut partial = [0.0; 8];
            let mut mass = 0.0;
            for n in 1..=13 {
                let (pmf, m) = conditional_bruteforce_with_mass(&dist, n, stat).unwrap();
                mass += m;
                for (v, p) in pmf {
                    partial[v as usize] += p * m;
                }
            }
            let q = table.q_f64();
            for x in 0..=6 {
                assert!(partial[x] <= q[x] + 1e-12, "{stat} x = {x}");
                assert!(q[x] - partial[x] <= 1.0 - mass + 1e-12, "{stat} x = {x}");
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        let cat = builtin("catalan");
        let pmf = conditional_bruteforce(&cat, 3, Statistic::Hs).unwrap();
        assert!((pmf[&0] - 0.8).abs() < 1e-12 && (pmf[&1] - 0.2).abs() < 1e-12);
        for stat in [Statistic::Hs, Statistic::French, Statistic::Kary(3), Statistic::HsStar] {
            let one = conditional_bruteforce(&cat, 1, stat).unwrap();
            assert_eq!(one.into_iter().collect::<Vec<_>>(), vec![(0, 1.0)]);
        }
        assert!(matches!(
            conditional_bruteforce(&builtin("full-binary"), 2, Statistic::Hs),
            Err(Error::InfeasibleSize { n: 2 })
        ));
        assert!(matches!(conditional_bruteforce(&cat, 17, Statistic::Hs), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn constants() {
        let c = rigid_constants(&builtin("catalan")).unwrap();
        assert_eq!(c.d, 2);
        assert!((c.gamma.unwrap() - 2.0).abs() < 1e-12);
        let g = rigid_constants(&builtin("geometric-half")).unwrap();
        assert!((g.gamma.unwrap() - (1.0 + 8f64.sqrt())).abs() < 1e-9);
        let p = rigid_constants(&builtin("poisson1")).unwrap();
        assert!((p.gamma.unwrap() - (1.0 + std::f64::consts::E.sqrt())).abs() < 1e-9);
        assert_eq!(rigid_constants(&d3()).unwrap(), RigidConstants { d: 3, gamma: None });
    }
}
