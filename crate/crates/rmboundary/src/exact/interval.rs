//! Certified real intervals with dyadic endpoints.

use super::{floor_rat, rat, ratq, PCElem, QuadElem, Rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

fn pow2(bits: u32) -> Rat {
    Rat::from_integer(BigInt::one() << bits as usize)
}

fn round_down(x: &Rat, bits: u32) -> Rat {
    let s = pow2(bits);
    Rat::from_integer(floor_rat(&(x * &s))) / s
}

fn round_up(x: &Rat, bits: u32) -> Rat {
    -round_down(&-x, bits)
}

fn bit_size(r: &Rat) -> u32 {
    let a = r.abs();
    (floor_rat(&a) + 1u32).bits() as u32
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(r: Rat) -> Interval {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Rat) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn mag_upper(&self) -> Rat {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn mag_lower(&self) -> Rat {
        if self.contains(&Rat::zero()) {
            Rat::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// Widens to dyadic endpoints with the given number of fractional bits.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Interval { lo, hi }
    }

    pub fn scale(&self, r: &Rat) -> Interval {
        self.mul(&Interval::point(r.clone()))
    }

    pub fn square(&self) -> Interval {
        let lo = self.mag_lower();
        let hi = self.mag_upper();
        Interval { lo: &lo * &lo, hi: &hi * &hi }
    }

    pub fn widen(&self, r: &Rat) -> Interval {
        Interval { lo: &self.lo - r, hi: &self.hi + r }
    }

    pub fn clamp(&self, lo: &Rat, hi: &Rat) -> Interval {
        let l = self.lo.clone().max(lo.clone()).min(hi.clone());
        let h = self.hi.clone().min(hi.clone()).max(lo.clone());
        Interval { lo: l, hi: h }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", super::fmt_rat(&self.lo), super::fmt_rat(&self.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    /// sqrt D to the positive root.
    Iota1,
    /// sqrt D to the negative root.
    Iota2,
    /// Projection to the rational component.
    Iota3,
}

/// Certified enclosure of u + v*sqrt(D) under sqrt D -> +-sqrt D, width at most 2^-prec.
pub fn embed_quad(x: &QuadElem, plus: bool, prec: u32) -> Result<Interval> {
    let d = x.disc().value();
    if d < 0 {
        return Err(Error::NegativeDiscriminantForRealEmbedding(d));
    }
    let v = if plus { x.v().clone() } else { -x.v() };
    if v.is_zero() {
        return Ok(Interval::point(x.u().clone()));
    }
    let k = prec + 2 + bit_size(&v);
    let scaled = BigInt::from(d) << (2 * k as usize);
    let s = scaled.sqrt();
    let lo_root = Rat::new(s.clone(), BigInt::one() << k as usize);
    let hi_root = Rat::new(s + 1, BigInt::one() << k as usize);
    let (a, b) = (&v * &lo_root, &v * &hi_root);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let iv = Interval { lo: lo + x.u(), hi: hi + x.u() };
    Ok(iv.round_out(prec + 3))
}

pub fn embed_real(a: &PCElem, which: Embedding, prec: u32) -> Result<Interval> {
    match which {
        Embedding::Iota1 => embed_quad(a.x(), true, prec),
        Embedding::Iota2 => embed_quad(a.x(), false, prec),
        Embedding::Iota3 => Ok(Interval::point(a.q().clone())),
    }
}

/// Enclosure of atan(1/x) for an integer x > 1 by the alternating series.
fn atan_inv(x: i64, prec: u32) -> Interval {
    let x2 = rat(x * x);
    let mut power = ratq(1, x);
    let mut sum = Rat::zero();
    let eps = pow2(prec + 8).recip();
    let mut k = 0i64;
    loop {
        let term = &power / rat(2 * k + 1);
        let next = if k % 2 == 0 { &sum + &term } else { &sum - &term };
        if term < eps {
            let (lo, hi) = if sum <= next { (sum, next) } else { (next, sum) };
            return Interval { lo, hi };
        }
        sum = next;
        power /= &x2;
        k += 1;
    }
}

/// Certified enclosure of pi.
pub fn pi_interval(prec: u32) -> Interval {
    let a = atan_inv(5, prec + 6).scale(&rat(16));
    let b = atan_inv(239, prec + 6).scale(&rat(4));
    a.sub(&b).round_out(prec + 4)
}

fn factorial_series(m: &Rat, start: u32, prec: u32) -> (Rat, Rat) {
    // alternating sum of m^j / j! over j = start, start + 2, ..., with a remainder bound
    let eps = pow2(prec + 12).recip();
    let mut term = Rat::one();
    for j in 1..=start {
        term = term * m / rat(j as i64);
    }
    let mut sum = Rat::zero();
    let mut j = start;
    let mut sign = true;
    let m2 = m * m;
    loop {
        sum = if sign { sum + &term } else { sum - &term };
        let next = &term * &m2 / rat(((j + 1) * (j + 2)) as i64);
        j += 2;
        sign = !sign;
        // |m| <= 4 here, so the terms decrease from j = 8 on
        if next.abs() < eps && j > 8 {
            return (round_down(&sum, prec + 16), next.abs() + pow2(prec + 16).recip());
        }
        term = next;
    }
}

/// Enclosures of (cos 2 pi q, sin 2 pi q).
pub fn cos_sin_turns(q: &Rat, prec: u32) -> (Interval, Interval) {
    let frac = q - Rat::from_integer(floor_rat(q));
    let quarter = &frac * rat(4);
    if quarter.is_integer() {
        let (c, s) = match quarter.to_integer().to_string().as_str() {
            "0" => (1, 0),
            "1" => (0, 1),
            "2" => (-1, 0),
            _ => (0, -1),
        };
        return (Interval::point(rat(c)), Interval::point(rat(s)));
    }
    let centered = if frac > ratq(1, 2) { frac - rat(1) } else { frac };
    let theta = pi_interval(prec + 12).scale(&(centered * rat(2)));
    let mid = round_down(&((&theta.lo + &theta.hi) / rat(2)), prec + 16);
    let rad = (&theta.hi - &mid).max(&mid - &theta.lo);
    let (c, ce) = factorial_series(&mid, 0, prec);
    let (s, se) = factorial_series(&mid, 1, prec);
    let one = Rat::one();
    let cos = Interval::point(c).widen(&(ce + &rad)).round_out(prec + 4).clamp(&-&one, &one);
    let sin = Interval::point(s).widen(&(se + &rad)).round_out(prec + 4).clamp(&-&one, &one);
    (cos, sin)
}
