//! Exact arithmetic in Q, Q(sqrt D), the pseudo-cubic algebra Q(sqrt D) + Q, and
//! linear forms in three period variables.

mod interval;
mod parse;

pub use interval::{cos_sin_turns, embed_quad, embed_real, pi_interval, Embedding, Interval};
pub use parse::{parse_pc, parse_pc_list, parse_quad, parse_rat, split_top_level};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratq(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_big(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of a rational as an integer.
pub fn floor_rat(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// A nonsquare integer congruent to 0 or 1 mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Disc(i64);

impl Disc {
    pub fn new(d: i64) -> Result<Disc> {
        if d == 0 || d.rem_euclid(4) > 1 || (d > 0 && is_square_i64(d)) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(Disc(d))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn rat(self) -> Rat {
        rat(self.0)
    }
}

impl fmt::Display for Disc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_square_i64(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i64;
    (r.saturating_sub(1)..=r + 1).any(|s| s >= 0 && s.checked_mul(s) == Some(n))
}

/// u + v*sqrt(D).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    d: Disc,
    u: Rat,
    v: Rat,
}

impl QuadElem {
    pub fn new(d: Disc, u: Rat, v: Rat) -> QuadElem {
        QuadElem { d, u, v }
    }

    pub fn from_rat(d: Disc, u: Rat) -> QuadElem {
        QuadElem { d, u, v: Rat::zero() }
    }

    pub fn from_int(d: Disc, n: i64) -> QuadElem {
        QuadElem::from_rat(d, rat(n))
    }

    pub fn zero(d: Disc) -> QuadElem {
        QuadElem::from_int(d, 0)
    }

    pub fn one(d: Disc) -> QuadElem {
        QuadElem::from_int(d, 1)
    }

    pub fn sqrt_d(d: Disc) -> QuadElem {
        QuadElem { d, u: Rat::zero(), v: Rat::one() }
    }

    /// (D + sqrt D)/2.
    pub fn gamma(d: Disc) -> QuadElem {
        QuadElem { d, u: ratq(d.0, 2), v: ratq(1, 2) }
    }

    /// s + t*gamma.
    pub fn from_gamma_coords(d: Disc, s: Rat, t: Rat) -> QuadElem {
        let u = &s + &t * ratq(d.0, 2);
        let v = t / rat(2);
        QuadElem { d, u, v }
    }

    /// Coordinates (s, t) with self = s + t*gamma.
    pub fn gamma_coords(&self) -> (Rat, Rat) {
        let t = &self.v * rat(2);
        let s = &self.u - &self.v * self.d.rat();
        (s, t)
    }

    pub fn disc(&self) -> Disc {
        self.d
    }

    pub fn u(&self) -> &Rat {
        &self.u
    }

    pub fn v(&self) -> &Rat {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    /// Membership in Z[gamma].
    pub fn is_integral(&self) -> bool {
        let (s, t) = self.gamma_coords();
        s.is_integer() && t.is_integer()
    }

    pub fn conj(&self) -> QuadElem {
        QuadElem { d: self.d, u: self.u.clone(), v: -&self.v }
    }

    pub fn norm(&self) -> Rat {
        &self.u * &self.u - &self.v * &self.v * self.d.rat()
    }

    pub fn trace(&self) -> Rat {
        &self.u * rat(2)
    }

    pub fn antiinv(&self) -> Rat {
        self.v.clone()
    }

    pub fn scale(&self, r: &Rat) -> QuadElem {
        QuadElem { d: self.d, u: &self.u * r, v: &self.v * r }
    }

    pub fn inv(&self) -> Result<QuadElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn pow(&self, e: i64) -> Result<QuadElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = QuadElem::one(self.d);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn check(&self, o: &QuadElem) -> Result<()> {
        if self.d != o.d {
            return Err(Error::DiscriminantMismatch(self.d.0, o.d.0));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &QuadElem) -> Result<QuadElem> {
        self.check(o)?;
        Ok(QuadElem { d: self.d, u: &self.u + &o.u, v: &self.v + &o.v })
    }

    pub fn checked_sub(&self, o: &QuadElem) -> Result<QuadElem> {
        self.check(o)?;
        Ok(QuadElem { d: self.d, u: &self.u - &o.u, v: &self.v - &o.v })
    }

    pub fn checked_mul(&self, o: &QuadElem) -> Result<QuadElem> {
        self.check(o)?;
        let u = &self.u * &o.u + &self.v * &o.v * self.d.rat();
        let v = &self.u * &o.v + &o.u * &self.v;
        Ok(QuadElem { d: self.d, u, v })
    }

    pub fn checked_div(&self, o: &QuadElem) -> Result<QuadElem> {
        self.check(o)?;
        self.checked_mul(&o.inv()?)
    }
}

fn expect<T>(r: Result<T>) -> T {
    match r {
        Ok(x) => x,
        Err(e) => panic!("{e}"),
    }
}

macro_rules! forward_binop {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, o: &'a $t) -> $t {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<$t> for &'a $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                self.$m(&o)
            }
        }
    };
}

impl<'b> Add<&'b QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn add(self, o: &'b QuadElem) -> QuadElem {
        expect(self.checked_add(o))
    }
}
impl<'b> Sub<&'b QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn sub(self, o: &'b QuadElem) -> QuadElem {
        expect(self.checked_sub(o))
    }
}
impl<'b> Mul<&'b QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn mul(self, o: &'b QuadElem) -> QuadElem {
        expect(self.checked_mul(o))
    }
}
impl<'b> Div<&'b QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn div(self, o: &'b QuadElem) -> QuadElem {
        expect(self.checked_div(o))
    }
}
forward_binop!(QuadElem, Add, add);
forward_binop!(QuadElem, Sub, sub);
forward_binop!(QuadElem, Mul, mul);
forward_binop!(QuadElem, Div, div);

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { d: self.d, u: -&self.u, v: -&self.v }
    }
}
impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = format!("sqrt({})", self.d.0);
        let coef = |v: &Rat| -> String {
            if v.is_one() {
                root.clone()
            } else {
                format!("{}*{}", fmt_rat(v), root)
            }
        };
        if self.v.is_zero() {
            write!(f, "{}", fmt_rat(&self.u))
        } else if self.u.is_zero() {
            if self.v.is_negative() {
                write!(f, "-{}", coef(&-&self.v))
            } else {
                write!(f, "{}", coef(&self.v))
            }
        } else if self.v.is_negative() {
            write!(f, "{} - {}", fmt_rat(&self.u), coef(&-&self.v))
        } else {
            write!(f, "{} + {}", fmt_rat(&self.u), coef(&self.v))
        }
    }
}

/// (x, q) in the pseudo-cubic algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PCElem {
    x: QuadElem,
    q: Rat,
}

impl PCElem {
    pub fn new(x: QuadElem, q: Rat) -> PCElem {
        PCElem { x, q }
    }

    pub fn zero(d: Disc) -> PCElem {
        PCElem { x: QuadElem::zero(d), q: Rat::zero() }
    }

    pub fn one(d: Disc) -> PCElem {
        PCElem { x: QuadElem::one(d), q: Rat::one() }
    }

    /// Element with coordinates c in the basis (1,0), (sqrt D,0), (0,1).
    pub fn from_coords(d: Disc, c: &[Rat]) -> PCElem {
        assert_eq!(c.len(), 3, "pseudo-cubic coordinates have length 3");
        PCElem { x: QuadElem::new(d, c[0].clone(), c[1].clone()), q: c[2].clone() }
    }

    pub fn coords(&self) -> [Rat; 3] {
        [self.x.u.clone(), self.x.v.clone(), self.q.clone()]
    }

    pub fn disc(&self) -> Disc {
        self.x.d
    }

    pub fn x(&self) -> &QuadElem {
        &self.x
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.q.is_zero()
    }

    pub fn sigma(&self) -> PCElem {
        PCElem { x: self.x.conj(), q: self.q.clone() }
    }

    pub fn trp(&self) -> Rat {
        self.x.trace() + &self.q
    }

    pub fn scale(&self, r: &Rat) -> PCElem {
        PCElem { x: self.x.scale(r), q: &self.q * r }
    }

    pub fn is_unit(&self) -> bool {
        !self.x.is_zero() && !self.q.is_zero()
    }

    pub fn inv(&self) -> Result<PCElem> {
        if self.q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(PCElem { x: self.x.inv()?, q: self.q.recip() })
    }

    pub fn checked_add(&self, o: &PCElem) -> Result<PCElem> {
        Ok(PCElem { x: self.x.checked_add(&o.x)?, q: &self.q + &o.q })
    }

    pub fn checked_sub(&self, o: &PCElem) -> Result<PCElem> {
        Ok(PCElem { x: self.x.checked_sub(&o.x)?, q: &self.q - &o.q })
    }

    pub fn checked_mul(&self, o: &PCElem) -> Result<PCElem> {
        Ok(PCElem { x: self.x.checked_mul(&o.x)?, q: &self.q * &o.q })
    }
}

impl<'b> Add<&'b PCElem> for &PCElem {
    type Output = PCElem;
    fn add(self, o: &'b PCElem) -> PCElem {
        expect(self.checked_add(o))
    }
}
impl<'b> Sub<&'b PCElem> for &PCElem {
    type Output = PCElem;
    fn sub(self, o: &'b PCElem) -> PCElem {
        expect(self.checked_sub(o))
    }
}
impl<'b> Mul<&'b PCElem> for &PCElem {
    type Output = PCElem;
    fn mul(self, o: &'b PCElem) -> PCElem {
        expect(self.checked_mul(o))
    }
}
forward_binop!(PCElem, Add, add);
forward_binop!(PCElem, Sub, sub);
forward_binop!(PCElem, Mul, mul);

impl Neg for &PCElem {
    type Output = PCElem;
    fn neg(self) -> PCElem {
        PCElem { x: -&self.x, q: -&self.q }
    }
}
impl Neg for PCElem {
    type Output = PCElem;
    fn neg(self) -> PCElem {
        -&self
    }
}

impl fmt::Display for PCElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ; {})", self.x, fmt_rat(&self.q))
    }
}

/// c0 + c1*z1 + c2*z2 + c3*z3.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZLinForm {
    pub c: [QuadElem; 4],
}

impl ZLinForm {
    pub fn zero(d: Disc) -> ZLinForm {
        let z = QuadElem::zero(d);
        ZLinForm { c: [z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn constant(c: QuadElem) -> ZLinForm {
        let mut f = ZLinForm::zero(c.disc());
        f.c[0] = c;
        f
    }

    /// c*z_i for i in 1..=3.
    pub fn var(i: usize, c: QuadElem) -> ZLinForm {
        assert!((1..=3).contains(&i), "variable index out of range");
        let mut f = ZLinForm::zero(c.disc());
        f.c[i] = c;
        f
    }

    pub fn affine(i: usize, c0: QuadElem, c1: QuadElem) -> ZLinForm {
        let mut f = ZLinForm::var(i, c1);
        f.c[0] = c0;
        f
    }

    pub fn scale(&self, k: &QuadElem) -> ZLinForm {
        ZLinForm { c: self.c.clone().map(|x| &x * k) }
    }

    pub fn scale_rat(&self, k: &Rat) -> ZLinForm {
        ZLinForm { c: self.c.clone().map(|x| x.scale(k)) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(QuadElem::is_zero)
    }
}

impl<'b> Add<&'b ZLinForm> for &ZLinForm {
    type Output = ZLinForm;
    fn add(self, o: &'b ZLinForm) -> ZLinForm {
        ZLinForm { c: std::array::from_fn(|i| &self.c[i] + &o.c[i]) }
    }
}
impl<'b> Sub<&'b ZLinForm> for &ZLinForm {
    type Output = ZLinForm;
    fn sub(self, o: &'b ZLinForm) -> ZLinForm {
        ZLinForm { c: std::array::from_fn(|i| &self.c[i] - &o.c[i]) }
    }
}
forward_binop!(ZLinForm, Add, add);
forward_binop!(ZLinForm, Sub, sub);

impl fmt::Display for ZLinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.c[0].is_zero() {
            parts.push(format!("{}", self.c[0]));
        }
        for i in 1..4 {
            if !self.c[i].is_zero() {
                parts.push(format!("({})*z{}", self.c[i], i));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d5() -> Disc {
        Disc::new(5).unwrap()
    }

    #[test]
    fn disc_validation() {
        assert!(Disc::new(5).is_ok());
        assert!(Disc::new(-12).is_ok());
        assert!(Disc::new(-3).is_ok());
        assert!(Disc::new(4).is_err());
        assert!(Disc::new(6).is_err());
        assert!(Disc::new(0).is_err());
        assert!(Disc::new(-2).is_err());
    }

    #[test]
    fn gamma_norm_trace() {
        for d in [5i64, 8, 12, 13, -3, -12, 200] {
            let Ok(disc) = Disc::new(d) else { continue };
            let g = QuadElem::gamma(disc);
            assert_eq!((&g * &g.conj()).u().clone(), ratq(d * d - d, 4));
            assert_eq!(g.trace(), rat(d));
            assert_eq!(g.norm(), ratq(d * d - d, 4));
        }
        let s = QuadElem::sqrt_d(d5());
        assert_eq!(&s * &s, QuadElem::from_int(d5(), 5));
    }

    #[test]
    fn minus_twelve_example() {
        let d = Disc::new(-12).unwrap();
        // 1 + sqrt(-3) = 1 + sqrt(-12)/2
        let x = QuadElem::new(d, rat(1), ratq(1, 2));
        assert_eq!(x.gamma_coords(), (rat(7), rat(1)));
        assert_eq!(x.norm(), rat(4));
    }

    #[test]
    fn antiinv_values() {
        let d = d5();
        assert_eq!(QuadElem::sqrt_d(d).antiinv(), rat(1));
        assert_eq!(QuadElem::gamma(d).conj().antiinv(), ratq(-1, 2));
        assert_eq!(QuadElem::from_int(d, 7).antiinv(), rat(0));
    }

    #[test]
    fn pc_products() {
        let d = d5();
        let a = PCElem::new(QuadElem::gamma(d), rat(5));
        assert_eq!(&a * &PCElem::one(d), a);
        let x = PCElem::new(QuadElem::gamma(d), rat(0));
        let y = PCElem::new(QuadElem::zero(d), rat(3));
        assert!((&x * &y).is_zero());
        assert_eq!(a.sigma().sigma(), a);
        assert_eq!(PCElem::one(d).trp(), rat(3));
        assert_eq!(PCElem::new(QuadElem::sqrt_d(d), rat(0)).trp(), rat(0));
        assert_eq!(a.trp(), rat(10));
    }

    #[test]
    #[should_panic]
    fn mismatch_panics() {
        let _ = QuadElem::one(d5()) + QuadElem::one(Disc::new(8).unwrap());
    }

    #[test]
    fn checked_errors() {
        let a = QuadElem::one(d5());
        let b = QuadElem::one(Disc::new(8).unwrap());
        assert_eq!(a.checked_mul(&b), Err(Error::DiscriminantMismatch(5, 8)));
        assert_eq!(a.checked_div(&QuadElem::zero(d5())), Err(Error::DivisionByZero));
    }

    #[test]
    fn display_forms() {
        let d = d5();
        assert_eq!(QuadElem::from_int(d, 3).to_string(), "3");
        assert_eq!(QuadElem::sqrt_d(d).to_string(), "sqrt(5)");
        assert_eq!((-QuadElem::sqrt_d(d)).to_string(), "-sqrt(5)");
        assert_eq!(QuadElem::gamma(d).to_string(), "5/2 + 1/2*sqrt(5)");
        assert_eq!(QuadElem::gamma(d).conj().to_string(), "5/2 - 1/2*sqrt(5)");
        let p = PCElem::new(QuadElem::gamma(d), ratq(-1, 3));
        assert_eq!(p.to_string(), "(5/2 + 1/2*sqrt(5) ; -1/3)");
    }

    #[test]
    fn linform_ops() {
        let d = d5();
        let f = ZLinForm::affine(2, QuadElem::one(d), QuadElem::sqrt_d(d));
        let g = f.scale(&QuadElem::sqrt_d(d));
        assert_eq!(g.c[0], QuadElem::sqrt_d(d));
        assert_eq!(g.c[2], QuadElem::from_int(d, 5));
        assert!((&f - &f).is_zero());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-30i64..30, 1i64..8).prop_map(|(p, q)| ratq(p, q))
    }

    fn quad(d: Disc) -> impl Strategy<Value = QuadElem> {
        (small_rat(), small_rat()).prop_map(move |(u, v)| QuadElem::new(d, u, v))
    }

    proptest! {
        #[test]
        fn field_axioms(a in quad(Disc::new(13).unwrap()), b in quad(Disc::new(13).unwrap()), c in quad(Disc::new(13).unwrap())) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
            prop_assert_eq!((&a + &b).trace(), a.trace() + b.trace());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), QuadElem::one(a.disc()));
                prop_assert_eq!(&(&b / &a) * &a, b.clone());
            }
        }

        #[test]
        fn trp_symmetric(a in quad(Disc::new(8).unwrap()), b in quad(Disc::new(8).unwrap()), p in small_rat(), q in small_rat()) {
            let x = PCElem::new(a, p);
            let y = PCElem::new(b, q);
            prop_assert_eq!((&x * &y).trp(), (&y * &x).trp());
        }

        #[test]
        fn gamma_coords_roundtrip(a in quad(Disc::new(-12).unwrap())) {
            let (s, t) = a.gamma_coords();
            prop_assert_eq!(QuadElem::from_gamma_coords(a.disc(), s, t), a);
        }
    }
}
