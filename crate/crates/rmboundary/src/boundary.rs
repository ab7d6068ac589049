//! Weighted boundary strata: the quadratic map Q, admissibility, dual bases, exponent
//! lattices and cross-ratio equations.

use crate::error::{Error, Result};
use crate::exact::{cos_sin_turns, floor_rat, rat, rat_big, Disc, Interval, PCElem, Rat};
use crate::lattices::{common_denominator, right_kernel, QMat, ZMat};
use crate::pseudocubic::{trp_pairing, FLattice};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type QVec3 = [Rat; 3];

/// Image of a weight under Q: for x = r + s sqrt D, (s^2 D^2 - r^2 D, 2 r q, 2 s D q).
pub fn q_map(w: &PCElem) -> Result<QVec3> {
    let d = w.disc();
    if d.value() < 0 {
        return Err(Error::NegativeDiscriminant(d.value()));
    }
    let dv = d.rat();
    let [r, s, q] = w.coords();
    Ok([&s * &s * &dv * &dv - &r * &r * &dv, rat(2) * &r * &q, rat(2) * &s * &dv * &q])
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Generators of the polyhedral cone {y : c . y >= 0 for every c}.
///
/// Double description: the cone is kept as lines plus rays and cut by one half-space
/// at a time. Redundant rays are kept; they do not affect membership questions.
#[derive(Debug, Clone)]
pub struct Cone {
    pub lines: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
}

impl Cone {
    pub fn from_constraints(dim: usize, constraints: &[Vec<Rat>]) -> Cone {
        let mut lines: Vec<Vec<Rat>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect();
        let mut rays: Vec<Vec<Rat>> = Vec::new();
        for c in constraints {
            if let Some(k) = lines.iter().position(|l| !dot(c, l).is_zero()) {
                let mut l = lines.remove(k);
                if dot(c, &l).is_negative() {
                    l = l.iter().map(|x| -x).collect();
                }
                let cl = dot(c, &l);
                let project = |v: &Vec<Rat>| -> Vec<Rat> {
                    let t = dot(c, v) / &cl;
                    v.iter().zip(&l).map(|(x, y)| x - &t * y).collect()
                };
                lines = lines.iter().map(project).collect();
                rays = rays.iter().map(project).collect();
                rays.push(l);
                continue;
            }
            let (mut pos, mut zero, mut neg) = (Vec::new(), Vec::new(), Vec::new());
            for r in rays {
                let v = dot(c, &r);
                if v.is_positive() {
                    pos.push((r, v));
                } else if v.is_zero() {
                    zero.push(r);
                } else {
                    neg.push((r, v));
                }
            }
            let mut next: Vec<Vec<Rat>> = zero;
            for (p, pv) in &pos {
                for (n, nv) in &neg {
                    let comb: Vec<Rat> = p.iter().zip(n).map(|(a, b)| -nv * a + pv * b).collect();
                    if comb.iter().any(|x| !x.is_zero()) {
                        next.push(comb);
                    }
                }
            }
            next.extend(pos.into_iter().map(|(p, _)| p));
            rays = next;
        }
        Cone { lines, rays }
    }

    pub fn is_trivial(&self) -> bool {
        self.lines.is_empty() && self.rays.is_empty()
    }
}

/// Verdict with a self-checking certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Positive coefficients whose combination of the Q-images is zero.
    Interior(Vec<Rat>),
    /// A functional pairing >= 0 with every image and > 0 with at least one.
    Separating(QVec3),
}

impl Certificate {
    pub fn verify(&self, images: &[QVec3]) -> bool {
        match self {
            Certificate::Interior(l) => {
                l.len() == images.len()
                    && l.iter().all(|x| x.is_positive())
                    && (0..3).all(|k| images.iter().zip(l).fold(Rat::zero(), |acc, (q, c)| acc + c * &q[k]).is_zero())
            }
            Certificate::Separating(v) => {
                let p: Vec<Rat> = images.iter().map(|q| dot(v, q)).collect();
                p.iter().all(|x| !x.is_negative()) && p.iter().any(|x| x.is_positive())
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rat]| v.iter().map(crate::exact::fmt_rat).collect::<Vec<_>>().join(", ");
        match self {
            Certificate::Interior(l) => write!(f, "interior combination ({})", join(l)),
            Certificate::Separating(v) => write!(f, "separating functional ({})", join(v)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Admissibility {
    pub images: Vec<QVec3>,
    pub admissible: bool,
    pub certificate: Certificate,
}

fn span_basis(vs: &[QVec3]) -> Vec<Vec<Rat>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = QMat::from_rows(vs.iter().map(|v| v.to_vec()).collect());
    let (r, piv) = m.rref();
    (0..piv.len()).map(|i| r.row(i)).collect()
}

/// Dual cone of the images intersected with their span, by double description.
pub fn dual_cone_in_span(images: &[QVec3]) -> (Vec<Vec<Rat>>, Cone) {
    let basis = span_basis(images);
    let cons: Vec<Vec<Rat>> = images.iter().map(|q| basis.iter().map(|b| dot(b, q)).collect()).collect();
    let cone = Cone::from_constraints(basis.len(), &cons);
    (basis, cone)
}

/// Admissibility of a set of Q-images: no nonzero functional on their span is
/// nonnegative on all of them.
pub fn admissibility_of_images(images: &[QVec3]) -> Admissibility {
    let (basis, cone) = dual_cone_in_span(images);
    let lift = |y: &[Rat]| -> QVec3 {
        let mut v = [Rat::zero(), Rat::zero(), Rat::zero()];
        for (c, b) in y.iter().zip(&basis) {
            for k in 0..3 {
                v[k] += c * &b[k];
            }
        }
        v
    };
    if !cone.is_trivial() {
        let y = cone.rays.first().or(cone.lines.first()).expect("nontrivial cone has a generator");
        return Admissibility { images: images.to_vec(), admissible: false, certificate: Certificate::Separating(lift(y)) };
    }
    let certificate = Certificate::Interior(interior_combination(images).expect("admissible images admit a positive relation"));
    Admissibility { images: images.to_vec(), admissible: true, certificate }
}

/// A strictly positive relation among the images, if one exists.
pub fn interior_combination(images: &[QVec3]) -> Option<Vec<Rat>> {
    let n = images.len();
    if n == 0 {
        return None;
    }
    let at = QMat::from_fn(3, n, |k, i| images[i][k].clone());
    let kernel = at.right_nullspace();
    let cons: Vec<Vec<Rat>> = (0..n).map(|j| kernel.col(j)).collect();
    let cone = Cone::from_constraints(kernel.rows(), &cons);
    let mut y = vec![Rat::zero(); kernel.rows()];
    for r in &cone.rays {
        for (a, b) in y.iter_mut().zip(r) {
            *a += b;
        }
    }
    let l = kernel.vec_mul(&y);
    if l.iter().all(|x| x.is_positive()) {
        Some(l)
    } else {
        None
    }
}

pub fn admissibility(weights: &[PCElem]) -> Result<Admissibility> {
    let images = weights.iter().map(q_map).collect::<Result<Vec<_>>>()?;
    Ok(admissibility_of_images(&images))
}

pub fn is_admissible_weights(weights: &[PCElem]) -> Result<bool> {
    Ok(admissibility(weights)?.admissible)
}

pub fn is_admissible(w: &Weighting) -> Result<bool> {
    is_admissible_weights(w.weights())
}

/// The two stratum types with explicit cross-ratio coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StratumKind {
    Trinodal,
    NiceNonTrinodal,
}

impl StratumKind {
    pub fn parse(s: &str) -> Result<StratumKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trinodal" | "irreducible" => Ok(StratumKind::Trinodal),
            "nontrinodal" | "nice-nontrinodal" | "nice_nontrinodal" => Ok(StratumKind::NiceNonTrinodal),
            other => Err(Error::UnsupportedStratum(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StratumKind::Trinodal => "trinodal",
            StratumKind::NiceNonTrinodal => "nontrinodal",
        }
    }
}

/// Weights of a stratum. For the non-trinodal kind the components carry (r1, r3) and (r2, r3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weighting {
    kind: StratumKind,
    r: [PCElem; 3],
}

impl Weighting {
    pub fn new(kind: StratumKind, r: [PCElem; 3]) -> Result<Weighting> {
        if r.iter().any(PCElem::is_zero) {
            return Err(Error::ZeroWeight);
        }
        let d = r[0].disc();
        if r.iter().any(|x| x.disc() != d) {
            return Err(Error::DiscriminantMismatch(d.value(), r.iter().find(|x| x.disc() != d).unwrap().disc().value()));
        }
        dual_basis(&r)?;
        Ok(Weighting { kind, r })
    }

    pub fn trinodal(r: [PCElem; 3]) -> Result<Weighting> {
        Weighting::new(StratumKind::Trinodal, r)
    }

    pub fn nice_nontrinodal(r: [PCElem; 3]) -> Result<Weighting> {
        Weighting::new(StratumKind::NiceNonTrinodal, r)
    }

    pub fn kind(&self) -> StratumKind {
        self.kind
    }

    pub fn disc(&self) -> Disc {
        self.r[0].disc()
    }

    pub fn weights(&self) -> &[PCElem; 3] {
        &self.r
    }

    /// Weights per irreducible component.
    pub fn components(&self) -> Vec<Vec<PCElem>> {
        match self.kind {
            StratumKind::Trinodal => vec![self.r.to_vec()],
            StratumKind::NiceNonTrinodal => {
                vec![vec![self.r[0].clone(), self.r[2].clone()], vec![self.r[1].clone(), self.r[2].clone()]]
            }
        }
    }

    pub fn lattice(&self) -> FLattice {
        FLattice::from_generators(self.disc(), &self.r).expect("weights are linearly independent")
    }

    pub fn dual_basis(&self) -> [PCElem; 3] {
        dual_basis(&self.r).expect("checked at construction")
    }
}

/// Dual basis with respect to the pseudo-trace pairing.
pub fn dual_basis(r: &[PCElem; 3]) -> Result<[PCElem; 3]> {
    let d = r[0].disc();
    let g = QMat::from_fn(3, 3, |i, j| trp_pairing(&r[i], &r[j]));
    let gi = g.inverse().ok_or(Error::SingularGram)?;
    let s = |j: usize| -> PCElem {
        let c: Vec<Rat> = (0..3).fold(vec![Rat::zero(); 3], |acc, k| {
            let rk = r[k].coords();
            acc.iter().zip(rk.iter()).map(|(a, x)| a + &gi[(j, k)] * x).collect()
        });
        PCElem::from_coords(d, &c)
    };
    Ok([s(0), s(1), s(2)])
}

/// Z-basis of {a : a1 s2 s3 + a2 s1 s3 + a3 s1 s2 = 0}, rows in Hermite form.
pub fn exponent_lattice(s: &[PCElem; 3]) -> Vec<[BigInt; 3]> {
    let prods = [&s[1] * &s[2], &s[0] * &s[2], &s[0] * &s[1]];
    let cols: Vec<[Rat; 3]> = prods.iter().map(PCElem::coords).collect();
    let rows: Vec<Vec<BigInt>> = (0..3)
        .map(|i| {
            let row: Vec<Rat> = cols.iter().map(|c| c[i].clone()).collect();
            let den = common_denominator(row.iter());
            row.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect()
        })
        .collect();
    let k = right_kernel(&ZMat::from_rows(rows));
    (0..k.rows()).map(|i| [k[(i, 0)].clone(), k[(i, 1)].clone(), k[(i, 2)].clone()]).collect()
}

fn frac(q: &Rat) -> Rat {
    q - rat_big(&floor_rat(q))
}

/// p23^a1 * p13^a2 * p12^a3 = exp(-2 pi i phase), phase in [0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossRatioEq {
    pub exponents: [BigInt; 3],
    pub phase: Rat,
}

impl CrossRatioEq {
    pub fn new(exponents: [BigInt; 3], phase: Rat) -> CrossRatioEq {
        CrossRatioEq { exponents, phase: frac(&phase) }
    }

    /// Same equation with both sides inverted.
    pub fn inverse(&self) -> CrossRatioEq {
        CrossRatioEq::new(self.exponents.clone().map(|a| -a), -&self.phase)
    }

    /// The phase as a linear form in b23, b13, b12, e.g. `b12-b23`.
    pub fn symbolic_phase(&self) -> String {
        linear_form(&self.exponents, &["b23", "b13", "b12"])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "exponents": self.exponents.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "phase_num": self.phase.numer().to_string(),
            "phase_den": self.phase.denom().to_string(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<CrossRatioEq> {
        let bad = || Error::Parse(format!("cross-ratio equation: {v}"));
        let big = |x: &serde_json::Value| -> Result<BigInt> { x.as_str().and_then(|s| s.parse().ok()).ok_or_else(bad) };
        let ex = v["exponents"].as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
        let den = big(&v["phase_den"])?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(CrossRatioEq::new([big(&ex[0])?, big(&ex[1])?, big(&ex[2])?], Rat::new(big(&v["phase_num"])?, den)))
    }
}

/// Renders sum c_i * name_i compactly, e.g. `b12-b23`.
pub fn linear_form(c: &[BigInt; 3], names: &[&str; 3]) -> String {
    let mut out = String::new();
    for (a, n) in c.iter().zip(names).rev() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        let sign = if a.is_negative() { "-" } else if out.is_empty() { "" } else { "+" };
        out.push_str(sign);
        if !mag.is_one() {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(n);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl fmt::Display for CrossRatioEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3] = &self.exponents;
        write!(f, "p23^{a1} * p13^{a2} * p12^{a3} = e(-{})", crate::exact::fmt_rat(&self.phase))
    }
}

fn equations(w: &Weighting, b: &QMat) -> Vec<CrossRatioEq> {
    let (b23, b13, b12) = (&b[(1, 2)], &b[(0, 2)], &b[(0, 1)]);
    exponent_lattice(&w.dual_basis())
        .into_iter()
        .map(|a| {
            let phase = rat_big(&a[0]) * b23 + rat_big(&a[1]) * b13 + rat_big(&a[2]) * b12;
            CrossRatioEq::new(a, phase)
        })
        .collect()
}

/// Equations cutting out S(h) on a trinodal stratum; `b` holds the coefficients of h in
/// the weights (upper triangle is read).
pub fn cross_ratio_equations(w: &Weighting, b: &QMat) -> Result<Vec<CrossRatioEq>> {
    if w.kind != StratumKind::Trinodal {
        return Err(Error::UnsupportedStratum(w.kind.name().into()));
    }
    Ok(equations(w, b))
}

/// Equations on a nice non-trinodal stratum. The third exponent only enters the phase,
/// since Psi(s1 (x) s2) is identically 1 there.
pub fn nontrinodal_equations(w: &Weighting, b: &QMat) -> Result<Vec<CrossRatioEq>> {
    if w.kind != StratumKind::NiceNonTrinodal {
        return Err(Error::UnsupportedStratum(w.kind.name().into()));
    }
    Ok(equations(w, b))
}

pub fn stratum_equations(w: &Weighting, b: &QMat) -> Vec<CrossRatioEq> {
    equations(w, b)
}

/// Gaussian rational x + i y.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> GaussRat {
        GaussRat { re, im }
    }

    pub fn real(re: Rat) -> GaussRat {
        GaussRat { re, im: Rat::zero() }
    }

    pub fn one() -> GaussRat {
        GaussRat::real(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<GaussRat> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(GaussRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn div(&self, o: &GaussRat) -> Result<GaussRat> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: &BigInt) -> Result<GaussRat> {
        let base = if e.is_negative() { self.inv()? } else { self.clone() };
        let mut n = e.abs();
        let (mut acc, mut sq) = (GaussRat::one(), base);
        while !n.is_zero() {
            if n.is_odd() {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            n >>= 1;
        }
        Ok(acc)
    }

    /// exp(-2 pi i q) when it is a Gaussian rational.
    pub fn root_of_unity(q: &Rat) -> Option<GaussRat> {
        let f = frac(q);
        let four = f * rat(4);
        if !four.is_integer() {
            return None;
        }
        let (re, im) = match four.to_integer().to_string().as_str() {
            "0" => (1, 0),
            "1" => (0, -1),
            "2" => (-1, 0),
            _ => (0, 1),
        };
        Some(GaussRat::new(rat(re), rat(im)))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::exact::fmt_rat;
        if self.im.is_zero() {
            write!(f, "{}", fmt_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}*i", fmt_rat(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{} - {}*i", fmt_rat(&self.re), fmt_rat(&-&self.im))
        } else {
            write!(f, "{} + {}*i", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

/// A point of the projective line with Gaussian rational coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Infinity,
    Finite(GaussRat),
}

impl ProjPoint {
    pub fn real(x: Rat) -> ProjPoint {
        ProjPoint::Finite(GaussRat::real(x))
    }

    pub fn gauss(x: Rat, y: Rat) -> ProjPoint {
        ProjPoint::Finite(GaussRat::new(x, y))
    }

    /// Parses `inf`, `x` or `x+y*i` style rationals, e.g. `1/2`, `3-2i`, `i`.
    pub fn parse(s: &str) -> Result<ProjPoint> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "inf" || t == "oo" || t == "∞" {
            return Ok(ProjPoint::Infinity);
        }
        let bad = || Error::Parse(format!("point `{s}`"));
        if !t.ends_with('i') {
            return Ok(ProjPoint::real(crate::exact::parse_rat(&t).map_err(|_| bad())?));
        }
        let body = &t[..t.len() - 1];
        let split = body.char_indices().skip(1).filter(|&(k, c)| (c == '+' || c == '-') && !body[..k].ends_with('/')).map(|(k, _)| k).last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = im.trim_end_matches('*');
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x.trim_start_matches('+'),
        };
        let p = |x: &str| crate::exact::parse_rat(x).map_err(|_| bad());
        Ok(ProjPoint::gauss(p(re)?, p(im)?))
    }

    /// Image under z -> (a z + b) / (c z + d).
    pub fn mobius(&self, m: &[GaussRat; 4]) -> Result<ProjPoint> {
        let [a, b, c, d] = m;
        match self {
            ProjPoint::Infinity => {
                if c.is_zero() {
                    Ok(ProjPoint::Infinity)
                } else {
                    Ok(ProjPoint::Finite(a.div(c)?))
                }
            }
            ProjPoint::Finite(z) => {
                let den = c.mul(z).add(d);
                let num = a.mul(z).add(b);
                if den.is_zero() {
                    Ok(ProjPoint::Infinity)
                } else {
                    Ok(ProjPoint::Finite(num.div(&den)?))
                }
            }
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Infinity => write!(f, "inf"),
            ProjPoint::Finite(z) => write!(f, "{z}"),
        }
    }
}

/// (z1, z2; z3, z4) = (z1 - z3)(z2 - z4) / ((z1 - z4)(z2 - z3)) with the limits at infinity.
pub fn cross_ratio(z1: &ProjPoint, z2: &ProjPoint, z3: &ProjPoint, z4: &ProjPoint) -> Result<GaussRat> {
    let z = [z1, z2, z3, z4];
    for i in 0..4 {
        for j in i + 1..4 {
            if z[i] == z[j] {
                return Err(Error::CoincidentPoints);
            }
        }
    }
    let diff = |i: usize, j: usize| -> Option<GaussRat> {
        match (z[i], z[j]) {
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => Some(a.sub(b)),
            _ => None,
        }
    };
    let prod = |pairs: [(usize, usize); 2]| pairs.iter().filter_map(|&(i, j)| diff(i, j)).fold(GaussRat::one(), |a, x| a.mul(&x));
    prod([(0, 2), (1, 3)]).div(&prod([(0, 3), (1, 2)]))
}

/// p_jk = (p_j, q_j; q_k, p_k) for p = (p1, p2, p3, q1, q2, q3), indices 1-based.
pub fn psi_eval(p: &[ProjPoint; 6], j: usize, k: usize) -> Result<GaussRat> {
    assert!((1..=3).contains(&j) && (1..=3).contains(&k) && j != k, "psi_eval needs distinct indices in 1..=3");
    cross_ratio(&p[j - 1], &p[j + 2], &p[k + 2], &p[k - 1])
}

/// Psi-values (p23, p13, p12) on a trinodal stratum.
pub fn trinodal_psi(p: &[ProjPoint; 6]) -> Result<[GaussRat; 3]> {
    Ok([psi_eval(p, 2, 3)?, psi_eval(p, 1, 3)?, psi_eval(p, 1, 2)?])
}

/// Psi-values on a nice non-trinodal stratum, from the points (p1, q1, p3+, q3-) on the
/// first component and (p2, q2, q3+, p3-) on the second. The s1 (x) s2 value is 1.
pub fn nontrinodal_psi(first: &[ProjPoint; 4], second: &[ProjPoint; 4]) -> Result<[GaussRat; 3]> {
    let p13 = cross_ratio(&first[0], &first[1], &first[3], &first[2])?;
    let p23 = cross_ratio(&second[0], &second[1], &second[2], &second[3])?;
    Ok([p23, p13, GaussRat::one()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    Numeric(u32),
}

fn lhs(values: &[GaussRat; 3], eq: &CrossRatioEq) -> Result<GaussRat> {
    let mut acc = GaussRat::one();
    for (v, a) in values.iter().zip(&eq.exponents) {
        acc = acc.mul(&v.pow(a)?);
    }
    Ok(acc)
}

/// Whether the Psi-values satisfy every equation.
pub fn satisfies_values(values: &[GaussRat; 3], eqs: &[CrossRatioEq], mode: CheckMode) -> Result<bool> {
    for eq in eqs {
        let l = lhs(values, eq)?;
        let ok = match mode {
            CheckMode::Exact => {
                let r = GaussRat::root_of_unity(&eq.phase).ok_or_else(|| Error::PhaseNotRepresentable(crate::exact::fmt_rat(&eq.phase)))?;
                l == r
            }
            CheckMode::Numeric(prec) => {
                let (c, s) = cos_sin_turns(&-&eq.phase, prec);
                let dr = Interval::point(l.re.clone()).sub(&c);
                let di = Interval::point(l.im.clone()).sub(&s);
                let mag2 = dr.square().add(&di.square());
                let bound = Rat::new(BigInt::one(), BigInt::one() << prec as usize);
                mag2.hi < bound
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether six points of a trinodal stratum lie on S(h).
pub fn satisfies_sh(p: &[ProjPoint; 6], eqs: &[CrossRatioEq], mode: CheckMode) -> Result<bool> {
    satisfies_values(&trinodal_psi(p)?, eqs, mode)
}

/// Coefficients c of a = sum c_jk s_j (x) s_k for a1 s2 s3 + a2 s1 s3 + a3 s1 s2.
pub fn exponent_tensor(a: &[BigInt; 3]) -> QMat {
    let mut c = QMat::zeros(3, 3);
    c[(1, 2)] = rat_big(&a[0]);
    c[(0, 2)] = rat_big(&a[1]);
    c[(0, 1)] = rat_big(&a[2]);
    c
}

/// <a, w (x) w> for a = sum c_jk s_j (x) s_k.
pub fn tensor_pairing(s: &[PCElem; 3], c: &QMat, w: &PCElem) -> Rat {
    let f: Vec<Rat> = s.iter().map(|sj| trp_pairing(sj, w)).collect();
    let mut acc = Rat::zero();
    for j in 0..3 {
        for k in 0..3 {
            acc += &c[(j, k)] * &f[j] * &f[k];
        }
    }
    acc
}
