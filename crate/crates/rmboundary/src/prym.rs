//! The S-shaped Prym family T_n: spectral data of the cylinder matrix, Dehn twist traces,
//! residues, weights and the boundary pipeline.
//!
//! All quadratic quantities live in Q(sqrt D) with D = 4(2n+1), so sqrt(2n+1) = sqrt(D)/2.

use crate::boundary::{
    admissibility, cross_ratio_equations, dual_basis, exponent_lattice, is_admissible_weights, q_map, CrossRatioEq,
    QVec3, Weighting,
};
use crate::error::{Error, Result};
use crate::exact::{embed_quad, is_square_i64, rat, ratq, Disc, PCElem, QuadElem, Rat};
use crate::lattices::{QMat, ZMat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::fmt;

fn check_n(n: u64) -> Result<Disc> {
    let m = 2 * n as i64 + 1;
    if n == 0 || is_square_i64(m) {
        return Err(Error::SquareDiscriminant(m as u64));
    }
    Disc::new(4 * m)
}

/// sqrt(2n+1) inside Q(sqrt D).
fn root(d: Disc) -> QuadElem {
    QuadElem::new(d, rat(0), ratq(1, 2))
}

/// alpha + beta * mu with mu^2 = n + 1 + sqrt(2n+1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuElem {
    pub alpha: QuadElem,
    pub beta: QuadElem,
}

impl MuElem {
    pub fn new(alpha: QuadElem, beta: QuadElem) -> MuElem {
        MuElem { alpha, beta }
    }

    pub fn from_k(x: QuadElem) -> MuElem {
        let d = x.disc();
        MuElem { alpha: x, beta: QuadElem::zero(d) }
    }

    pub fn mu(d: Disc) -> MuElem {
        MuElem { alpha: QuadElem::zero(d), beta: QuadElem::one(d) }
    }

    pub fn mu_squared(d: Disc) -> QuadElem {
        let n = (d.value() / 4 - 1) / 2;
        &QuadElem::from_int(d, n + 1) + &root(d)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    pub fn add(&self, o: &MuElem) -> MuElem {
        MuElem { alpha: &self.alpha + &o.alpha, beta: &self.beta + &o.beta }
    }

    pub fn sub(&self, o: &MuElem) -> MuElem {
        MuElem { alpha: &self.alpha - &o.alpha, beta: &self.beta - &o.beta }
    }

    pub fn mul(&self, o: &MuElem) -> MuElem {
        let m2 = MuElem::mu_squared(self.alpha.disc());
        MuElem {
            alpha: &(&self.alpha * &o.alpha) + &(&(&self.beta * &o.beta) * &m2),
            beta: &(&self.alpha * &o.beta) + &(&o.alpha * &self.beta),
        }
    }

    pub fn scale(&self, k: &QuadElem) -> MuElem {
        MuElem { alpha: &self.alpha * k, beta: &self.beta * k }
    }
}

/// The 6x6 cylinder intersection matrix A_n.
pub fn an_matrix(n: u64) -> ZMat {
    let n = n as i64;
    ZMat::from_i64(&[
        vec![0, 0, 0, 0, 1, 1],
        vec![0, 0, 0, 0, n, 0],
        vec![0, 0, 0, 1, 1, 0],
        vec![0, 0, n, 0, 0, 0],
        vec![1, 1, 1, 0, 0, 0],
        vec![n, 0, 0, 0, 0, 0],
    ])
}

/// Coefficients (constant term first) of det(x I - A), by Faddeev-LeVerrier.
pub fn char_poly(a: &ZMat) -> Vec<BigInt> {
    let n = a.rows();
    let aq = a.to_q();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = rat(1);
    let mut m = QMat::zeros(n, n);
    for k in 1..=n {
        m = &(&aq * &m) + &QMat::identity(n).scale(&coeffs[n - k + 1]);
        let am = &aq * &m;
        let tr = (0..n).fold(Rat::zero(), |acc, i| acc + &am[(i, i)]);
        coeffs[n - k] = -tr / rat(k as i64);
    }
    coeffs.iter().map(|c| c.to_integer()).collect()
}

/// Coefficients of (x^2 - n)(x^4 - 2(n+1)x^2 + n^2), constant term first.
pub fn expected_char_poly(n: u64) -> Vec<BigInt> {
    let n = BigInt::from(n);
    let q = [&n * &n, BigInt::zero(), BigInt::from(-2) * (&n + 1), BigInt::zero(), BigInt::from(1)];
    let p = [-n.clone(), BigInt::zero(), BigInt::from(1)];
    let mut out = vec![BigInt::zero(); 7];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn char_poly_check(n: u64) -> bool {
    char_poly(&an_matrix(n)) == expected_char_poly(n)
}

/// The mu-eigenvector (mu/n, sqrt 2, mu/n, 1, sqrt 2 mu/n, 1), with sqrt 2 = (1 + sqrt(2n+1))/mu.
pub fn eigenvector(n: u64) -> Result<[MuElem; 6]> {
    let d = check_n(n)?;
    let t = root(d);
    let one_t = &QuadElem::one(d) + &t;
    let inv_n = QuadElem::new(d, ratq(1, n as i64), rat(0));
    let sqrt2 = MuElem::new(QuadElem::zero(d), &one_t / &MuElem::mu_squared(d));
    let mu_n = MuElem::mu(d).scale(&inv_n);
    let one = MuElem::from_k(QuadElem::one(d));
    Ok([mu_n.clone(), sqrt2.clone(), mu_n, one.clone(), sqrt2.mul(&MuElem::mu(d)).scale(&inv_n), one])
}

/// Exact eigen-equation A_n h = mu h, the identity (1 + sqrt(2n+1))^2 = 2 mu^2, the square
/// of the sqrt 2 representative, and a certified ordering of the spectrum at `precision` bits.
pub fn eigen_checks(n: u64, precision: u32) -> Result<bool> {
    let d = check_n(n)?;
    let h = eigenvector(n)?;
    let a = an_matrix(n);
    let mu = MuElem::mu(d);
    let eigen = (0..6).all(|i| {
        let lhs = (0..6).fold(MuElem::from_k(QuadElem::zero(d)), |acc, j| {
            acc.add(&h[j].scale(&QuadElem::from_rat(d, Rat::from_integer(a[(i, j)].clone()))))
        });
        lhs.sub(&mu.mul(&h[i])).is_zero()
    });
    let t = root(d);
    let one_t = &QuadElem::one(d) + &t;
    let identity = &one_t * &one_t == &QuadElem::from_int(d, 2) * &MuElem::mu_squared(d);
    let two = h[1].mul(&h[1]) == MuElem::from_k(QuadElem::from_int(d, 2));
    // mu^2 = n+1+t exceeds n and n+1-t, so mu is the largest eigenvalue
    let m2 = embed_quad(&MuElem::mu_squared(d), true, precision)?;
    let other = embed_quad(&(&QuadElem::from_int(d, n as i64 + 1) - &t), true, precision)?;
    let largest = m2.lo > rat(n as i64) && m2.lo > other.hi;
    Ok(eigen && identity && two && largest)
}

/// 2x2 matrix over the mu-tower.
type MuMat = [MuElem; 4];

fn mu_mat_mul(a: &MuMat, b: &MuMat) -> MuMat {
    [
        a[0].mul(&b[0]).add(&a[1].mul(&b[2])),
        a[0].mul(&b[1]).add(&a[1].mul(&b[3])),
        a[2].mul(&b[0]).add(&a[3].mul(&b[2])),
        a[2].mul(&b[1]).add(&a[3].mul(&b[3])),
    ]
}

fn mu_mat_pow(m: &MuMat, e: i64, d: Disc) -> MuMat {
    let one = MuElem::from_k(QuadElem::one(d));
    let zero = MuElem::from_k(QuadElem::zero(d));
    let base = if e < 0 {
        // inverse of a unipotent 2x2 matrix with determinant 1
        let neg = |x: &MuElem| MuElem::from_k(QuadElem::zero(d)).sub(x);
        [m[3].clone(), neg(&m[1]), neg(&m[2]), m[0].clone()]
    } else {
        m.clone()
    };
    let mut acc = [one.clone(), zero.clone(), zero, one];
    for _ in 0..e.unsigned_abs() {
        acc = mu_mat_mul(&acc, &base);
    }
    acc
}

/// tr(A_h^k A_v^l) for A_h = [[1, mu], [0, 1]], A_v = [[1, 0], [-mu, 1]].
pub fn dehn_trace(n: u64, k: i64, l: i64) -> Result<QuadElem> {
    let d = check_n(n)?;
    let one = MuElem::from_k(QuadElem::one(d));
    let zero = MuElem::from_k(QuadElem::zero(d));
    let mu = MuElem::mu(d);
    let neg_mu = zero.sub(&mu);
    let ah = [one.clone(), mu, zero.clone(), one.clone()];
    let av = [one.clone(), zero, neg_mu, one];
    let p = mu_mat_mul(&mu_mat_pow(&ah, k, d), &mu_mat_pow(&av, l, d));
    let tr = p[0].add(&p[3]);
    if !tr.beta.is_zero() {
        return Err(Error::CheckFailed("trace left the quadratic field".into()));
    }
    Ok(tr.alpha)
}

/// Whether |tr| > 2 under sqrt(2n+1) -> positive root, decided by certified intervals
/// starting at `precision` bits.
pub fn is_hyperbolic_at(n: u64, k: i64, l: i64, precision: u32) -> Result<bool> {
    let tr = dehn_trace(n, k, l)?;
    if tr.v().is_zero() {
        return Ok(tr.u().abs() > rat(2));
    }
    let mut prec = precision;
    loop {
        let iv = embed_quad(&tr, true, prec)?;
        if iv.lo > rat(2) || iv.hi < rat(-2) {
            return Ok(true);
        }
        if iv.lo > rat(-2) && iv.hi < rat(2) {
            return Ok(false);
        }
        prec *= 2;
    }
}

pub fn is_hyperbolic(n: u64, k: i64, l: i64) -> Result<bool> {
    is_hyperbolic_at(n, k, l, 128)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrymData {
    pub n: u64,
    pub plus: bool,
    pub d: Disc,
    /// Residues at the three node cusps, up to a common factor.
    pub residues: [QuadElem; 3],
    pub weights: [PCElem; 3],
}

pub fn prym_data(n: u64, plus: bool) -> Result<PrymData> {
    let d = check_n(n)?;
    let t = root(d);
    let half = ratq(1, 2);
    let sgn = if plus { rat(1) } else { rat(-1) };
    let res = (&QuadElem::one(d) + &t).scale(&half);
    let x = (&QuadElem::one(d) + &t.scale(&sgn)).scale(&half);
    let weights = [PCElem::new(x.clone(), rat(1)), PCElem::new(QuadElem::one(d), rat(0)), PCElem::new(x, rat(-1))];
    Ok(PrymData { n, plus, d, residues: [res.clone(), QuadElem::one(d), res], weights })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct PrymReport {
    pub data: PrymData,
    pub images: Vec<QVec3>,
    pub dual: [PCElem; 3],
    pub kernel: Vec<[BigInt; 3]>,
    pub checks: Vec<Check>,
    /// The emitted equation, normalized to p12/p23.
    pub equation: Option<CrossRatioEq>,
}

impl PrymReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `p12/p23 = e(-(b12-b23))` when the normalized equation has that shape.
    pub fn equation_line(&self) -> Option<String> {
        let eq = self.equation.as_ref()?;
        let [a1, a2, a3] = &eq.exponents;
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (a, name) in [(a3, "p12"), (a2, "p13"), (a1, "p23")] {
            let s = if a.abs() == BigInt::from(1) { name.to_string() } else { format!("{name}^{}", a.abs()) };
            if a.is_positive() {
                num.push(s);
            } else if a.is_negative() {
                den.push(s);
            }
        }
        let lhs = match (num.is_empty(), den.is_empty()) {
            (_, true) => num.join("*"),
            (true, false) => format!("1/{}", den.join("*")),
            _ => format!("{}/{}", num.join("*"), den.join("*")),
        };
        Some(format!("{lhs} = e(-({}))", eq.symbolic_phase()))
    }
}

impl fmt::Display for PrymReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.data;
        writeln!(f, "n = {}, sign = {}, D = {}", d.n, if d.plus { "+" } else { "-" }, d.d)?;
        for (i, (w, q)) in d.weights.iter().zip(&self.images).enumerate() {
            let q: Vec<String> = q.iter().map(crate::exact::fmt_rat).collect();
            writeln!(f, "r{} = {}   Q = ({})", i + 1, w, q.join(", "))?;
        }
        for (i, s) in self.dual.iter().enumerate() {
            writeln!(f, "s{} = {}", i + 1, s)?;
        }
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail)?;
        }
        match self.equation_line() {
            Some(l) => write!(f, "{l}"),
            None => write!(f, "no equation"),
        }
    }
}

/// Runs every consistency check of the T_n boundary point for one sign branch.
pub fn prym_pipeline(n: u64, plus: bool) -> Result<PrymReport> {
    let data = prym_data(n, plus)?;
    let d = data.d;
    let m = 2 * n as i64 + 1;
    let sg = if plus { 1 } else { -1 };
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| checks.push(Check { name: name.into(), passed, detail });

    push("discriminant", d.value() == 4 * m, format!("D = {}", d.value()));

    let images = data.weights.iter().map(q_map).collect::<Result<Vec<_>>>()?;
    let nn = n as i64;
    let expected: Vec<QVec3> = vec![
        [rat(2 * nn * m), rat(1), rat(sg * 2 * m)],
        [rat(-4 * m), rat(0), rat(0)],
        [rat(2 * nn * m), rat(-1), rat(-sg * 2 * m)],
    ];
    push("q-images", images == expected, "Q(r1), Q(r2), Q(r3) match the closed forms".into());

    let combo: Vec<Rat> = (0..3).map(|k| &images[0][k] + &images[1][k] * rat(nn) + &images[2][k]).collect();
    push("convex-identity", combo.iter().all(Zero::is_zero), "Q(r1) + n Q(r2) + Q(r3) = 0".into());

    let adm = admissibility(&data.weights)?;
    push("admissible", adm.admissible && adm.certificate.verify(&adm.images), adm.certificate.to_string());

    let pairs = [[0, 1], [0, 2], [1, 2]];
    let mut interior = true;
    for p in pairs {
        let sub: Vec<PCElem> = p.iter().map(|&i| data.weights[i].clone()).collect();
        interior &= !is_admissible_weights(&sub)?;
    }
    push("all-weights-needed", interior, "every two-element subset is non-admissible".into());

    let dual = dual_basis(&data.weights)?;
    let a = ratq(sg, 4 * m);
    let s_expected = [
        PCElem::new(QuadElem::new(d, rat(0), a.clone()), ratq(1, 2)),
        PCElem::new(QuadElem::new(d, ratq(1, 2), -&a), rat(0)),
        PCElem::new(QuadElem::new(d, rat(0), a), ratq(-1, 2)),
    ];
    push("dual-basis", dual == s_expected, "s1, s2, s3 match the closed forms".into());

    let kernel = exponent_lattice(&dual);
    let want = vec![[BigInt::from(1), BigInt::from(0), BigInt::from(-1)]];
    push("exponent-lattice", kernel == want, format!("{} generator(s)", kernel.len()));

    let w = Weighting::trinodal(data.weights.clone())?;
    let eqs = cross_ratio_equations(&w, &QMat::zeros(3, 3))?;
    let equation = eqs.first().map(CrossRatioEq::inverse);
    let shape = equation.as_ref().map(|e| e.exponents.clone()) == Some([BigInt::from(-1), BigInt::from(0), BigInt::from(1)])
        && eqs.len() == 1
        && equation.as_ref().map(CrossRatioEq::symbolic_phase).as_deref() == Some("b12-b23");
    push("equation", shape, format!("{} equation(s)", eqs.len()));

    Ok(PrymReport { data, images, dual, kernel, checks, equation })
}
