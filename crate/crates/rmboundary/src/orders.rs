//! Quadratic orders `O_D = Z[gamma]`, their ideals in normal form, prime splitting and
//! smart bases.
//!
//! Elements of `O_D` are handled in coordinates `(s, t)` for `s + t*gamma`, with
//! `gamma = (D + sqrt D)/2`.

use crate::error::{Error, Result};
use crate::exact::{parse_quad, rat_big, split_top_level, Disc, QuadElem, Rat};
use crate::lattices::{hnf, standard_form, symplectic_type, AltGram, QLattice, ZMat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Trial-division factorization into (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QOrder {
    d: Disc,
    f: u64,
    gamma: QuadElem,
}

impl QOrder {
    pub fn new(d: Disc) -> QOrder {
        let dv = d.value();
        let mut f = 1u64;
        let mut g = 1u64;
        while g * g <= dv.unsigned_abs() {
            let sq = (g * g) as i64;
            if dv % sq == 0 && (dv / sq).rem_euclid(4) <= 1 {
                f = g;
            }
            g += 1;
        }
        QOrder { d, f, gamma: QuadElem::gamma(d) }
    }

    pub fn from_value(d: i64) -> Result<QOrder> {
        Ok(QOrder::new(Disc::new(d)?))
    }

    pub fn disc(&self) -> Disc {
        self.d
    }

    pub fn conductor(&self) -> u64 {
        self.f
    }

    pub fn gamma(&self) -> &QuadElem {
        &self.gamma
    }

    /// `N(gamma) = (D^2 - D)/4`.
    pub fn gamma_norm(&self) -> BigInt {
        let d = self.d.big();
        (&d * &d - &d) / 4
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        x.disc() == self.d && x.is_integral()
    }

    pub fn elem(&self, s: &BigInt, t: &BigInt) -> QuadElem {
        QuadElem::from_gamma_coords(self.d, rat_big(s), rat_big(t))
    }

    /// Norm of `s + t*gamma`.
    pub fn norm_st(&self, s: &BigInt, t: &BigInt) -> BigInt {
        s * s + s * t * self.d.big() + t * t * self.gamma_norm()
    }

    /// `(s + t*gamma) * gamma` in coordinates.
    fn times_gamma(&self, s: &BigInt, t: &BigInt) -> (BigInt, BigInt) {
        (-(t * self.gamma_norm()), s + t * self.d.big())
    }

    pub fn unit_ideal(&self) -> QIdeal {
        QIdeal { d: self.d, n: BigInt::one(), a: BigInt::zero(), b: BigInt::one() }
    }

    /// The principal ideal `m O_D` for a positive integer `m`.
    pub fn scalar_ideal(&self, m: &BigInt) -> QIdeal {
        let m = m.abs();
        QIdeal { d: self.d, n: m.clone(), a: BigInt::zero(), b: m }
    }

    fn integral_coords(&self, x: &QuadElem) -> Result<(BigInt, BigInt)> {
        if x.disc() != self.d {
            return Err(Error::DiscriminantMismatch(x.disc().value(), self.d.value()));
        }
        let (s, t) = x.gamma_coords();
        if !s.is_integer() || !t.is_integer() {
            return Err(Error::NotAnIdeal(format!("{x} is not in the order")));
        }
        Ok((s.to_integer(), t.to_integer()))
    }

    /// Ideal with the given Z-basis, if that lattice is closed under multiplication by gamma.
    pub fn ideal_from_z_basis(&self, gens: &[(BigInt, BigInt)]) -> Result<QIdeal> {
        let lat = self.hnf_ideal(gens)?;
        for (s, t) in [(lat.n.clone(), BigInt::zero()), (lat.a.clone(), lat.b.clone())] {
            let (s2, t2) = self.times_gamma(&s, &t);
            if !lat.contains_st(&s2, &t2) {
                return Err(Error::NotAnIdeal(format!("{lat} is not closed under multiplication by gamma")));
            }
        }
        Ok(lat)
    }

    /// HNF of a rank-2 set of integer vectors, read as `<n, a + b*gamma>`.
    fn hnf_ideal(&self, gens: &[(BigInt, BigInt)]) -> Result<QIdeal> {
        if gens.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        let m = ZMat::from_rows(gens.iter().map(|(s, t)| vec![t.clone(), s.clone()]).collect());
        let h = hnf(&m);
        let rank = (0..h.rows()).filter(|&i| !h.row(i).iter().all(Zero::is_zero)).count();
        match rank {
            0 => Err(Error::ZeroIdeal),
            1 => Err(Error::NotAnIdeal("generators span a rank-1 lattice".into())),
            _ => Ok(QIdeal { d: self.d, n: h[(1, 1)].clone(), a: h[(0, 1)].clone(), b: h[(0, 0)].clone() }),
        }
    }

    /// The ideal generated over `O_D` by the given elements.
    pub fn ideal_from_generators(&self, gens: &[QuadElem]) -> Result<QIdeal> {
        let mut z = Vec::new();
        for g in gens {
            let (s, t) = self.integral_coords(g)?;
            let gg = self.times_gamma(&s, &t);
            z.push((s, t));
            z.push(gg);
        }
        self.ideal_from_z_basis(&z)
    }

    /// Parses `<n, a + b*g>` as a Z-basis.
    pub fn parse_ideal(&self, text: &str) -> Result<QIdeal> {
        let inner = text
            .trim()
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| Error::Parse(format!("expected <n, a + b*g>, got {text}")))?;
        let parts = split_top_level(inner, ',');
        if parts.len() != 2 {
            return Err(Error::Parse(format!("expected two generators in {text}")));
        }
        let mut z = Vec::new();
        for p in parts {
            z.push(self.integral_coords(&parse_quad(p, self.d)?)?);
        }
        self.ideal_from_z_basis(&z)
    }

    /// Splitting of a rational prime not dividing the conductor.
    pub fn prime_splitting(&self, p: u64) -> Result<SplitType> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if self.f.is_multiple_of(p) {
            return Err(Error::ConductorDivides(p));
        }
        let dv = self.d.value();
        let tag = if p == 2 {
            match dv.rem_euclid(8) {
                1 => SplitTag::Split,
                5 => SplitTag::Inert,
                _ => SplitTag::Ramified,
            }
        } else if dv.rem_euclid(p as i64) == 0 {
            SplitTag::Ramified
        } else if legendre(dv, p) == 1 {
            SplitTag::Split
        } else {
            SplitTag::Inert
        };
        if tag == SplitTag::Inert {
            return Ok(SplitType { tag, prime_ideal: None });
        }
        let pb = BigInt::from(p);
        let c = (0..p)
            .map(BigInt::from)
            .find(|c| (self.norm_st(c, &BigInt::one()) % &pb).is_zero())
            .expect("split or ramified prime has a root");
        let ideal = self.ideal_from_z_basis(&[(pb, BigInt::zero()), (c, BigInt::one())])?;
        Ok(SplitType { tag, prime_ideal: Some(ideal) })
    }

    /// Prime factor condition for d: no prime of d is inert, ramified primes divide d once.
    pub fn satisfies_pfc(&self, d: u64) -> Result<bool> {
        self.check_coprime(d)?;
        for (p, k) in factorize(d) {
            match self.prime_splitting(p)?.tag {
                SplitTag::Inert => return Ok(false),
                SplitTag::Ramified if k > 1 => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    fn check_coprime(&self, d: u64) -> Result<()> {
        if d == 0 {
            return Err(Error::NotCoprimeToConductor(d, self.f));
        }
        if d.gcd(&self.f) != 1 {
            return Err(Error::NotCoprimeToConductor(d, self.f));
        }
        Ok(())
    }

    /// Number of distinct split primes dividing d.
    pub fn split_prime_count(&self, d: u64) -> Result<u32> {
        self.check_coprime(d)?;
        let mut s = 0;
        for (p, _) in factorize(d) {
            if self.prime_splitting(p)?.tag == SplitTag::Split {
                s += 1;
            }
        }
        Ok(s)
    }

    /// All primitive ideals of norm d, sorted by the residue `a` of `<d, a + gamma>`.
    pub fn primitive_ideals_of_norm(&self, d: u64) -> Result<Vec<QIdeal>> {
        if !self.satisfies_pfc(d)? {
            return Ok(Vec::new());
        }
        let mut acc = vec![self.unit_ideal()];
        for (p, k) in factorize(d) {
            let st = self.prime_splitting(p)?;
            let pr = st.prime_ideal.clone().expect("pfc excludes inert primes");
            let choices = match st.tag {
                SplitTag::Split => vec![pr.pow(k)?, st.conjugate_ideal().expect("split").pow(k)?],
                _ => vec![pr],
            };
            acc = acc.iter().flat_map(|i| choices.iter().map(move |c| i.mul(c))).collect::<Result<Vec<_>>>()?;
        }
        acc.sort_by(|x, y| x.a.cmp(&y.a));
        acc.dedup();
        Ok(acc)
    }

    /// `(eta1, eta2) = (1, a0 + gamma)` with `(eta2^sigma, d*eta1^sigma)` a Z-basis of `ideal`.
    pub fn smart_basis(&self, ideal: &QIdeal, d: u64) -> Result<(QuadElem, QuadElem)> {
        self.check_coprime(d)?;
        if ideal.d != self.d {
            return Err(Error::DiscriminantMismatch(ideal.d.value(), self.d.value()));
        }
        if !ideal.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        if ideal.norm() != BigInt::from(d) {
            return Err(Error::WrongNorm { expected: d, found: ideal.norm().to_string() });
        }
        let db = BigInt::from(d);
        let a0 = (-(&ideal.a + self.d.big())).mod_floor(&db);
        Ok((QuadElem::one(self.d), self.elem(&a0, &BigInt::one())))
    }

    pub fn verify_smart_basis(&self, eta1: &QuadElem, eta2: &QuadElem, ideal: &QIdeal) -> Result<SmartBasisReport> {
        let d = ideal.norm();
        let c1 = self.integral_coords(eta1)?;
        let c2 = self.integral_coords(eta2)?;
        let det = &c1.0 * &c2.1 - &c1.1 * &c2.0;
        let order_basis = det.abs().is_one();
        let e2s = self.integral_coords(&eta2.conj())?;
        let de1s = self.integral_coords(&eta1.conj().scale(&rat_big(&d)))?;
        let ideal_basis = ideal.contains_st(&e2s.0, &e2s.1)
            && ideal.contains_st(&de1s.0, &de1s.1)
            && (&e2s.0 * &de1s.1 - &e2s.1 * &de1s.0).abs() == ideal.norm();
        let sign = (eta1 * &eta2.conj()).antiinv() == Rat::new(BigInt::from(-1), BigInt::from(2));
        let sq = QuadElem::sqrt_d(self.d);
        let vecs = [
            (eta1.clone(), QuadElem::zero(self.d)),
            (eta2.clone(), QuadElem::zero(self.d)),
            (QuadElem::zero(self.d), &eta2.conj() / &sq),
            (QuadElem::zero(self.d), -(&eta1.conj().scale(&rat_big(&d)) / &sq)),
        ];
        let gram = gram_matrix(&vecs);
        let symplectic = gram.as_ref().is_some_and(|g| *g == standard_form(&[BigInt::one(), d.clone()]));
        Ok(SmartBasisReport { order_basis, ideal_basis, sign, symplectic })
    }

    /// The symplectic type of the trace pairing on `I + O^dual` or `O + (1/sqrt D) I`.
    pub fn pairing_type(&self, ideal: &QIdeal, side: PairingSide) -> Result<Vec<BigInt>> {
        let zero = QuadElem::zero(self.d);
        let sq = QuadElem::sqrt_d(self.d);
        let n = self.elem(&ideal.n, &BigInt::zero());
        let w = self.elem(&ideal.a, &ideal.b);
        let g = self.gamma.clone();
        let one = QuadElem::one(self.d);
        let vecs = match side {
            PairingSide::IdealDualOrder => {
                [(n, zero.clone()), (w, zero.clone()), (zero.clone(), &one / &sq), (zero, &g / &sq)]
            }
            PairingSide::OrderScaledIdeal => [(one, zero.clone()), (g, zero.clone()), (zero.clone(), &n / &sq), (zero, &w / &sq)],
        };
        let gram = gram_matrix(&vecs).ok_or_else(|| Error::CheckFailed("trace pairing is not integral".into()))?;
        symplectic_type(&AltGram::new(gram)?)
    }
}

/// Legendre symbol of a modulo an odd prime p, by Euler's criterion.
fn legendre(a: i64, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let r = BigInt::from(a).mod_floor(&pb).modpow(&BigInt::from((p - 1) / 2), &pb);
    if r.is_zero() {
        0
    } else if r.is_one() {
        1
    } else {
        -1
    }
}

/// `tr(x' y - x y')` for pairs `(x, y)` and `(x', y')`.
pub fn trace_pairing(v: &(QuadElem, QuadElem), w: &(QuadElem, QuadElem)) -> Rat {
    (&(&w.0 * &v.1) - &(&v.0 * &w.1)).trace()
}

/// Integer Gram matrix of the trace pairing, or None if some entry is not an integer.
pub fn gram_matrix(vecs: &[(QuadElem, QuadElem)]) -> Option<ZMat> {
    let n = vecs.len();
    let mut g = ZMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = trace_pairing(&vecs[i], &vecs[j]);
            if !x.is_integer() {
                return None;
            }
            g[(i, j)] = x.to_integer();
        }
    }
    Some(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingSide {
    /// `I + (1/sqrt D) O`.
    IdealDualOrder,
    /// `O + (1/sqrt D) I`.
    OrderScaledIdeal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmartBasisReport {
    pub order_basis: bool,
    pub ideal_basis: bool,
    pub sign: bool,
    pub symplectic: bool,
}

impl SmartBasisReport {
    pub fn all(&self) -> bool {
        self.order_basis && self.ideal_basis && self.sign && self.symplectic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitTag {
    Inert,
    Split,
    Ramified,
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SplitTag::Inert => "inert",
            SplitTag::Split => "split",
            SplitTag::Ramified => "ramified",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitType {
    pub tag: SplitTag,
    pub prime_ideal: Option<QIdeal>,
}

impl SplitType {
    /// The other prime above p when p splits.
    pub fn conjugate_ideal(&self) -> Option<QIdeal> {
        match (self.tag, &self.prime_ideal) {
            (SplitTag::Split, Some(i)) => Some(i.conj()),
            _ => None,
        }
    }
}

/// The ideal `<n, a + b*gamma>` in canonical form `0 <= a < n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QIdeal {
    d: Disc,
    n: BigInt,
    a: BigInt,
    b: BigInt,
}

impl QIdeal {
    pub fn disc(&self) -> Disc {
        self.d
    }

    pub fn order(&self) -> QOrder {
        QOrder::new(self.d)
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn norm(&self) -> BigInt {
        &self.n * &self.b
    }

    pub fn is_primitive(&self) -> bool {
        self.b.is_one()
    }

    /// The Z-basis `(n, a + b*gamma)`.
    pub fn basis(&self) -> [QuadElem; 2] {
        let o = self.order();
        [o.elem(&self.n, &BigInt::zero()), o.elem(&self.a, &self.b)]
    }

    fn z_basis(&self) -> [(BigInt, BigInt); 2] {
        [(self.n.clone(), BigInt::zero()), (self.a.clone(), self.b.clone())]
    }

    fn contains_st(&self, s: &BigInt, t: &BigInt) -> bool {
        if !(t % &self.b).is_zero() {
            return false;
        }
        let k = t / &self.b;
        ((s - k * &self.a) % &self.n).is_zero()
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        if x.disc() != self.d {
            return false;
        }
        let (s, t) = x.gamma_coords();
        s.is_integer() && t.is_integer() && self.contains_st(&s.to_integer(), &t.to_integer())
    }

    fn same_order(&self, o: &QIdeal) -> Result<QOrder> {
        if self.d != o.d {
            return Err(Error::DiscriminantMismatch(self.d.value(), o.d.value()));
        }
        Ok(self.order())
    }

    pub fn mul(&self, o: &QIdeal) -> Result<QIdeal> {
        let ord = self.same_order(o)?;
        let mut gens = Vec::new();
        for (s1, t1) in self.z_basis() {
            for (s2, t2) in o.z_basis() {
                // (s1 + t1 g)(s2 + t2 g) = s1 s2 - t1 t2 N(g) + (s1 t2 + s2 t1 + t1 t2 D) g
                let s = &s1 * &s2 - &t1 * &t2 * ord.gamma_norm();
                let t = &s1 * &t2 + &s2 * &t1 + &t1 * &t2 * self.d.big();
                gens.push((s, t));
            }
        }
        ord.hnf_ideal(&gens)
    }

    pub fn pow(&self, k: u32) -> Result<QIdeal> {
        let mut acc = self.order().unit_ideal();
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn conj(&self) -> QIdeal {
        let ord = self.order();
        let w = (&self.a + &self.b * self.d.big(), -&self.b);
        ord.hnf_ideal(&[(self.n.clone(), BigInt::zero()), w]).expect("conjugate of an ideal")
    }

    /// `gcd(N(n), N(a + b gamma), tr(n (a + b gamma)^sigma)) = norm`.
    pub fn is_invertible(&self) -> bool {
        let ord = self.order();
        let nn = &self.n * &self.n;
        let nw = ord.norm_st(&self.a, &self.b);
        let tr = &self.n * (BigInt::from(2) * &self.a + &self.b * self.d.big());
        nn.gcd(&nw).gcd(&tr) == self.norm()
    }

    pub fn to_frac(&self) -> FracIdeal {
        FracIdeal::from_generators(self.d, &self.basis()).expect("rank 2")
    }

    pub fn inverse(&self) -> Result<FracIdeal> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let inv = Rat::new(BigInt::one(), self.norm());
        Ok(self.conj().to_frac().scale(&QuadElem::from_rat(self.d, inv)))
    }

    /// `(1/sqrt D)(1/N) I^sigma`.
    pub fn inverse_different(&self) -> FracIdeal {
        let k = QuadElem::sqrt_d(self.d).scale(&Rat::new(BigInt::one(), self.norm() * self.d.big()));
        self.conj().to_frac().scale(&k)
    }
}

impl fmt::Display for QIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_one() {
            write!(f, "<{}, {} + g>", self.n, self.a)
        } else {
            write!(f, "<{}, {} + {}*g>", self.n, self.a, self.b)
        }
    }
}

/// A rank-2 Z-lattice in K, stored in `(s, t)` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    d: Disc,
    lat: QLattice,
}

impl FracIdeal {
    pub fn from_generators(d: Disc, gens: &[QuadElem]) -> Result<FracIdeal> {
        let mut rows = Vec::new();
        for g in gens {
            if g.disc() != d {
                return Err(Error::DiscriminantMismatch(g.disc().value(), d.value()));
            }
            let (s, t) = g.gamma_coords();
            rows.push(vec![s, t]);
        }
        let lat = QLattice::from_generators(2, &rows);
        if lat.rank() != 2 {
            return Err(Error::RankDeficient);
        }
        Ok(FracIdeal { d, lat })
    }

    pub fn disc(&self) -> Disc {
        self.d
    }

    pub fn gens(&self) -> Vec<QuadElem> {
        self.lat.basis().into_iter().map(|r| QuadElem::from_gamma_coords(self.d, r[0].clone(), r[1].clone())).collect()
    }

    pub fn lattice(&self) -> &QLattice {
        &self.lat
    }

    pub fn coords(&self, x: &QuadElem) -> Option<Vec<BigInt>> {
        if x.disc() != self.d {
            return None;
        }
        let (s, t) = x.gamma_coords();
        self.lat.coords(&[s, t])
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        self.coords(x).is_some()
    }

    pub fn is_subset_of(&self, o: &FracIdeal) -> bool {
        self.lat.is_sublattice_of(&o.lat)
    }

    pub fn scale(&self, k: &QuadElem) -> FracIdeal {
        let g: Vec<QuadElem> = self.gens().iter().map(|x| x * k).collect();
        FracIdeal::from_generators(self.d, &g).expect("nonzero scalar")
    }

    pub fn mul(&self, o: &FracIdeal) -> FracIdeal {
        let mut g = Vec::new();
        for x in self.gens() {
            for y in o.gens() {
                g.push(&x * &y);
            }
        }
        FracIdeal::from_generators(self.d, &g).expect("rank 2")
    }

    pub fn conj(&self) -> FracIdeal {
        let g: Vec<QuadElem> = self.gens().iter().map(QuadElem::conj).collect();
        FracIdeal::from_generators(self.d, &g).expect("rank 2")
    }

    /// The integral ideal with the same lattice, if there is one.
    pub fn to_ideal(&self) -> Option<QIdeal> {
        let ord = QOrder::new(self.d);
        let z: Option<Vec<(BigInt, BigInt)>> = self
            .gens()
            .iter()
            .map(|g| {
                let (s, t) = g.gamma_coords();
                (s.is_integer() && t.is_integer()).then(|| (s.to_integer(), t.to_integer()))
            })
            .collect();
        ord.ideal_from_z_basis(&z?).ok()
    }

    /// Index-type covolume relative to `O_D`: `|det|` of the basis in `(s, t)` coordinates.
    pub fn covolume(&self) -> Rat {
        let b = self.lat.basis();
        (&b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]).abs()
    }
}

impl fmt::Display for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.gens();
        write!(f, "<{}, {}>", g[0], g[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratq};
    use crate::lattices::{preimage, QMat};
    use proptest::prelude::*;

    fn ord(d: i64) -> QOrder {
        QOrder::from_value(d).unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Brute-force list of all ideals of norm at most `bound`.
    fn all_ideals(o: &QOrder, bound: i64) -> Vec<QIdeal> {
        let mut out = Vec::new();
        for n in 1..=bound {
            for b in 1..=bound / n {
                if n % b != 0 {
                    continue;
                }
                for a in (0..n).step_by(b as usize) {
                    if let Ok(i) = o.ideal_from_z_basis(&[(bi(n), bi(0)), (bi(a), bi(b))]) {
                        assert_eq!((i.n.clone(), i.a.clone(), i.b.clone()), (bi(n), bi(a), bi(b)));
                        out.push(i);
                    }
                }
            }
        }
        out
    }

    /// Multiplier ring `{x : x I ⊂ I}` equals `O_D`.
    fn is_proper(i: &QIdeal) -> bool {
        let o = i.order();
        let gens = i.basis();
        let bm = QMat::from_rows(gens.iter().map(|g| { let (s, t) = g.gamma_coords(); vec![s, t] }).collect());
        // x -> coordinates of (x g_0, x g_1) in the basis of I
        let img = |x: &QuadElem| -> Vec<Rat> {
            gens.iter()
                .flat_map(|g| { let (s, t) = (x * g).gamma_coords(); bm.solve_left(&[s, t]).unwrap() })
                .collect()
        };
        let m = QMat::from_rows(vec![img(&QuadElem::one(o.d)), img(&o.gamma)]);
        preimage(&m, &QLattice::standard(4)).unwrap() == QLattice::standard(2)
    }

    #[test]
    fn conductors() {
        assert_eq!(ord(5).conductor(), 1);
        assert_eq!(ord(8).conductor(), 1);
        assert_eq!(ord(-12).conductor(), 2);
        assert_eq!(ord(20).conductor(), 2);
        assert_eq!(ord(45).conductor(), 3);
        assert_eq!(ord(-3 * 36).conductor(), 6);
        assert_eq!(ord(12).conductor(), 1);
    }

    #[test]
    fn generator_examples() {
        let o = ord(-12);
        let s = QuadElem::sqrt_d(o.disc()).scale(&ratq(1, 2));
        let quarter = QuadElem::sqrt_d(o.disc()).scale(&ratq(1, 4));
        let one = QuadElem::one(o.disc());
        let i = o.ideal_from_generators(&[QuadElem::from_int(o.disc(), 2), &one + &s]).unwrap();
        assert_eq!((i.n.clone(), i.a.clone(), i.b.clone()), (bi(2), bi(1), bi(1)));
        assert!(!i.is_invertible());
        assert!(!is_proper(&i));
        assert_eq!(o.ideal_from_generators(std::slice::from_ref(&one)).unwrap(), o.unit_ideal());
        let seven = o.ideal_from_generators(&[QuadElem::from_int(o.disc(), 7)]).unwrap();
        assert_eq!(seven, o.scalar_ideal(&bi(7)));
        assert_eq!(seven.norm(), bi(49));
        assert_eq!(o.ideal_from_generators(&[QuadElem::zero(o.disc())]), Err(Error::ZeroIdeal));
        assert!(matches!(o.ideal_from_generators(&[quarter]), Err(Error::NotAnIdeal(_))));
    }

    #[test]
    fn principal_norm() {
        let o = ord(13);
        let x = o.elem(&bi(3), &bi(-2));
        let i = o.ideal_from_generators(std::slice::from_ref(&x)).unwrap();
        assert_eq!(rat_big(&i.norm()), x.norm().abs());
    }

    #[test]
    fn parse_and_display() {
        let o = ord(5);
        let i = o.parse_ideal("<11, 5 + g>").unwrap();
        assert_eq!(i.to_string(), "<11, 5 + g>");
        assert!(matches!(o.parse_ideal("<11, 4 + g>"), Err(Error::NotAnIdeal(_))));
        let j = o.parse_ideal("<22, 2 + 2*g>").unwrap();
        assert_eq!(j.to_string(), "<22, 2 + 2*g>");
        assert!(o.parse_ideal("11, 5 + g").is_err());
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(ord(5).prime_splitting(2).unwrap().tag, SplitTag::Inert);
        let s = ord(8).prime_splitting(2).unwrap();
        assert_eq!(s.tag, SplitTag::Ramified);
        assert_eq!(s.prime_ideal.unwrap().to_string(), "<2, 0 + g>");
        assert_eq!(ord(5).prime_splitting(5).unwrap().tag, SplitTag::Ramified);
        let s = ord(5).prime_splitting(11).unwrap();
        assert_eq!(s.tag, SplitTag::Split);
        assert_eq!(s.prime_ideal.as_ref().unwrap().norm(), bi(11));
        assert_ne!(s.conjugate_ideal(), s.prime_ideal);
        assert_eq!(ord(20).prime_splitting(2), Err(Error::ConductorDivides(2)));
        assert_eq!(ord(5).prime_splitting(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn splitting_matches_root_count() {
        for d in [5i64, 8, 12, 13, 17, 21, 24, 28, 29, 33, -3, -4, -7, -15] {
            let o = ord(d);
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
                if o.conductor().is_multiple_of(p) {
                    continue;
                }
                let roots = (0..p as i64).filter(|c| (o.norm_st(&bi(*c), &bi(1)) % bi(p as i64)).is_zero()).count();
                let expected = match roots {
                    0 => SplitTag::Inert,
                    1 => SplitTag::Ramified,
                    _ => SplitTag::Split,
                };
                assert_eq!(o.prime_splitting(p).unwrap().tag, expected, "D={d} p={p}");
            }
        }
    }

    #[test]
    fn pfc_examples() {
        assert!(!ord(5).satisfies_pfc(4).unwrap());
        assert!(ord(5).satisfies_pfc(1).unwrap());
        assert!(ord(8).satisfies_pfc(2).unwrap());
        assert!(!ord(8).satisfies_pfc(4).unwrap());
        assert_eq!(ord(20).satisfies_pfc(6), Err(Error::NotCoprimeToConductor(6, 2)));
    }

    #[test]
    fn enumeration_examples() {
        let o = ord(5);
        assert_eq!(o.primitive_ideals_of_norm(1).unwrap(), vec![o.unit_ideal()]);
        let l = o.primitive_ideals_of_norm(11).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l[0].conj(), l[1]);
        assert_eq!(l.iter().map(|i| i.to_string()).collect::<Vec<_>>(), vec!["<11, 1 + g>", "<11, 5 + g>"]);
        assert!(o.primitive_ideals_of_norm(4).unwrap().is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for d in [5i64, 8, 12, 13, 17, 21, 24, 28] {
            let o = ord(d);
            let all = all_ideals(&o, 30);
            for n in 1..=30u64 {
                if n.gcd(&o.conductor()) != 1 {
                    continue;
                }
                let mut brute: Vec<QIdeal> =
                    all.iter().filter(|i| i.is_primitive() && i.norm() == bi(n as i64)).cloned().collect();
                brute.sort_by(|x, y| x.a.cmp(&y.a));
                let got = o.primitive_ideals_of_norm(n).unwrap();
                if o.satisfies_pfc(n).unwrap() {
                    assert_eq!(got, brute, "D={d} n={n}");
                    assert_eq!(got.len(), 1 << o.split_prime_count(n).unwrap());
                } else {
                    assert!(got.is_empty());
                }
            }
        }
    }

    #[test]
    fn smart_basis_examples() {
        let o = ord(5);
        for i in o.primitive_ideals_of_norm(11).unwrap() {
            let (e1, e2) = o.smart_basis(&i, 11).unwrap();
            assert!(o.verify_smart_basis(&e1, &e2, &i).unwrap().all());
        }
        let i = o.parse_ideal("<11, 5 + g>").unwrap();
        let (_, e2) = o.smart_basis(&i, 11).unwrap();
        assert_eq!(e2, o.elem(&bi(1), &bi(1)));
        let (e1, e2) = o.smart_basis(&o.unit_ideal(), 1).unwrap();
        assert_eq!((e1, e2.clone()), (QuadElem::one(o.disc()), o.gamma().clone()));
        assert_eq!(e2.conj().antiinv(), ratq(-1, 2));
        assert_eq!(o.smart_basis(&i, 7), Err(Error::WrongNorm { expected: 7, found: "11".into() }));
        assert_eq!(o.smart_basis(&o.scalar_ideal(&bi(2)), 4), Err(Error::NotPrimitive));
    }

    #[test]
    fn trace_pairing_examples() {
        let o = ord(13);
        let z = QuadElem::zero(o.disc());
        let sq = QuadElem::sqrt_d(o.disc());
        let v = (QuadElem::one(o.disc()), z.clone());
        let w = (z, &o.gamma().conj() / &sq);
        assert_eq!(trace_pairing(&v, &w), rat(1));
        assert_eq!(trace_pairing(&w, &v), rat(-1));
        assert_eq!(trace_pairing(&w, &w), rat(0));
    }

    #[test]
    fn dual_examples() {
        let o = ord(5);
        let sq = QuadElem::sqrt_d(o.disc());
        let dual = o.unit_ideal().inverse_different();
        let expected = FracIdeal::from_generators(o.disc(), &[&QuadElem::one(o.disc()) / &sq, &o.gamma().conj() / &sq]).unwrap();
        assert_eq!(dual, expected);
        // the trace form pairs O and its dual integrally and unimodularly
        let ob = o.unit_ideal().basis();
        let g = dual.gens();
        let m: Vec<Vec<Rat>> = ob.iter().map(|x| g.iter().map(|y| (x * y).trace()).collect()).collect();
        assert!(m.iter().flatten().all(|x| x.is_integer()));
        assert_eq!(QMat::from_rows(m).det().abs(), rat(1));
        assert_eq!(o.unit_ideal().inverse().unwrap(), o.unit_ideal().to_frac());
    }

    #[test]
    fn pairing_type_examples() {
        let o = ord(5);
        let t = |i: &QIdeal, s| o.pairing_type(i, s).unwrap();
        assert_eq!(t(&o.unit_ideal(), PairingSide::IdealDualOrder), vec![bi(1), bi(1)]);
        assert_eq!(t(&o.scalar_ideal(&bi(3)), PairingSide::IdealDualOrder), vec![bi(3), bi(3)]);
        for i in o.primitive_ideals_of_norm(19).unwrap() {
            assert_eq!(t(&i, PairingSide::OrderScaledIdeal), vec![bi(1), bi(19)]);
        }
    }

    #[test]
    fn invertibility_matches_multiplier_ring() {
        for d in [-12i64, -3, 5, 12, 20, 45, -16] {
            let o = ord(d);
            for i in all_ideals(&o, 16) {
                assert_eq!(i.is_invertible(), is_proper(&i), "D={d} I={i}");
                if i.is_primitive() {
                    // gcd(n, N(a + g)/n, tr(a + g)) = 1 for primitive ideals
                    let nw = o.norm_st(&i.a, &bi(1));
                    let tr = bi(2) * &i.a + bi(d);
                    let crit = i.n.gcd(&(&nw / &i.n)).gcd(&tr).is_one();
                    assert_eq!(crit, i.is_invertible(), "D={d} I={i}");
                }
            }
        }
    }

    #[test]
    fn ideal_criterion_matches_closure() {
        for d in [5i64, -12, 21, -7] {
            let o = ord(d);
            for n in 1..=12i64 {
                for b in 1..=n {
                    if n % b != 0 {
                        continue;
                    }
                    for a in (0..n).step_by(b as usize) {
                        let by_norm = (o.norm_st(&bi(a), &bi(b)) / bi(b)) % bi(n) == bi(0);
                        let closed = o.ideal_from_z_basis(&[(bi(n), bi(0)), (bi(a), bi(b))]).is_ok();
                        assert_eq!(by_norm, closed, "D={d} n={n} a={a} b={b}");
                    }
                }
            }
        }
    }

    fn disc_strategy() -> impl Strategy<Value = i64> {
        (-200i64..=200).prop_filter("discriminant", |d| Disc::new(*d).is_ok())
    }

    proptest! {
        #[test]
        fn norm_times_order(d in disc_strategy(), seed in 0usize..1000) {
            let o = ord(d);
            let all = all_ideals(&o, 30);
            let i = &all[seed % all.len()];
            let j = &all[(seed * 7 + 3) % all.len()];
            if i.is_invertible() {
                prop_assert_eq!(i.mul(&i.conj()).unwrap(), o.scalar_ideal(&i.norm()));
                prop_assert_eq!(i.mul(j).unwrap().norm(), i.norm() * j.norm());
                let inv = i.inverse().unwrap();
                prop_assert_eq!(i.to_frac().mul(&inv), o.unit_ideal().to_frac());
            }
            prop_assert_eq!(i.mul(j).unwrap(), j.mul(i).unwrap());
            prop_assert_eq!(i.conj().conj(), i.clone());
        }
    }
}
