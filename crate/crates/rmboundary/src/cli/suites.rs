//! Seeded property suites behind `rmb verify`.

use crate::boundary::{admissibility, dual_basis, exponent_lattice, Weighting};
use crate::error::{Error, Result};
use crate::exact::{ratq, Disc, PCElem, Rat};
use crate::lattices::{
    rational_basis_reps, standard_form, sublattice_degree_check, symplectic_basis, symplectic_type, AltGram, QMat,
    ZMat,
};
use crate::modvariety::{in_gamma_tilde_lb, sl2_zd_order, Mat2Z, ModContext};
use crate::orders::QOrder;
use crate::prym::{char_poly_check, prym_pipeline};
use crate::pseudocubic::{
    extension_class_equal, integral_sym_maps, o_h, pair_gram, standard_symplectic_generators, FLattice, HMap,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

pub const SUITES: [&str; 10] =
    ["ideals", "pfc", "smart-bases", "group", "phi", "admissibility", "examples", "prym", "lattices", "pseudocubic"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Runs one suite by name, or every suite for `all`.
pub fn run_named(name: &str, seed: u64) -> Result<Vec<SuiteResult>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_suite(s, seed)).collect();
    }
    Ok(vec![run_suite(name, seed)?])
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (passed, detail) = match name {
        "ideals" => ideals()?,
        "pfc" => pfc()?,
        "smart-bases" => smart_bases()?,
        "group" => group(&mut rng)?,
        "phi" => phi(&mut rng)?,
        "admissibility" => admissibility_suite(&mut rng)?,
        "examples" => examples()?,
        "prym" => prym()?,
        "lattices" => lattices(&mut rng)?,
        "pseudocubic" => pseudocubic(&mut rng)?,
        other => return Err(Error::Parse(format!("unknown suite `{other}`; known: all, {}", SUITES.join(", ")))),
    };
    Ok(SuiteResult { name: name.to_string(), passed, detail })
}

type Verdict = Result<(bool, String)>;

fn tally(checked: usize, failures: &[String]) -> (bool, String) {
    match failures.first() {
        None => (true, format!("{checked} checks")),
        Some(f) => (false, format!("{} of {checked} checks failed, first: {f}", failures.len())),
    }
}

pub const PFC_DISCS: [i64; 10] = [5, 8, 12, 13, 17, 21, 24, 28, 29, 33];

fn nonsquare_discs(bound: i64) -> impl Iterator<Item = i64> {
    (-bound..=bound).filter(|&d| Disc::new(d).is_ok())
}

fn ideals() -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    for dv in nonsquare_discs(60) {
        let o = QOrder::from_value(dv)?;
        for norm in 1..=20u64 {
            let Ok(list) = o.primitive_ideals_of_norm(norm) else { continue };
            for i in list.iter().filter(|i| i.is_invertible()) {
                for k in 1..=2u64 {
                    let scaled = i.mul(&o.scalar_ideal(&BigInt::from(k)))?;
                    n += 1;
                    if scaled.mul(&scaled.conj())? != o.scalar_ideal(&scaled.norm()) {
                        fails.push(format!("D={dv} {scaled}"));
                    }
                }
            }
        }
    }
    let o12 = QOrder::from_value(-12)?;
    n += 1;
    if o12.parse_ideal("<2, 1 + g>").map(|i| i.is_invertible()).unwrap_or(true) {
        fails.push("<2, 1 + g> in O_-12 reported invertible".into());
    }
    Ok(tally(n, &fails))
}

/// Number of distinct primes dividing d that split in O_D.
fn split_count(o: &QOrder, d: u64) -> Result<u32> {
    o.split_prime_count(d)
}

fn pfc() -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    for dv in PFC_DISCS {
        let o = QOrder::from_value(dv)?;
        for d in (1..=30u64).filter(|d| d.gcd(&o.conductor()) == 1) {
            n += 1;
            let p = o.satisfies_pfc(d)?;
            let list = o.primitive_ideals_of_norm(d)?;
            let ok = p == !list.is_empty() && (!p || list.len() as u64 == 1u64 << split_count(&o, d)?);
            if !ok {
                fails.push(format!("D={dv} d={d}: pfc {p}, {} ideals", list.len()));
            }
        }
    }
    Ok(tally(n, &fails))
}

fn smart_bases() -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    for dv in PFC_DISCS {
        let o = QOrder::from_value(dv)?;
        for d in (1..=30u64).filter(|d| d.gcd(&o.conductor()) == 1) {
            if !o.satisfies_pfc(d)? {
                continue;
            }
            for i in o.primitive_ideals_of_norm(d)? {
                n += 1;
                let (e1, e2) = o.smart_basis(&i, d)?;
                if !o.verify_smart_basis(&e1, &e2, &i)?.all() {
                    fails.push(format!("D={dv} {i}"));
                }
            }
        }
    }
    Ok(tally(n, &fails))
}

pub const GROUP_CASES: [(i64, u64); 3] = [(5, 11), (8, 7), (13, 3)];

fn contexts() -> Result<Vec<ModContext>> {
    let mut out = Vec::new();
    for (dv, d) in GROUP_CASES {
        for i in QOrder::from_value(dv)?.primitive_ideals_of_norm(d)? {
            out.push(ModContext::new(&i)?);
        }
    }
    Ok(out)
}

fn group(rng: &mut ChaCha8Rng) -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    for c in contexts()? {
        for _ in 0..25 {
            let g = c.sample_gamma_lb(rng, 6);
            let h = c.sample_gamma_lb(rng, 6);
            n += 1;
            let m = c.m_of(&g);
            let ok = c.in_gamma(&g)
                && m.is_integral()
                && &c.m_of(&h) * &m == c.m_of(&g.mul(&h))
                && c.verify_period_identity(&g)?;
            if !ok {
                fails.push(format!("{}: A = {}", c.ideal(), g.a()));
            }
        }
        n += 1;
        match c.find_nonintegral_witness() {
            Some(w) if c.in_gamma_ub(&w) && !c.in_gamma(&w) && !c.m_of(&w).is_integral() => {}
            _ => fails.push(format!("{}: no upper-bound witness with non-integral M", c.ideal())),
        }
    }
    Ok(tally(n, &fails))
}

fn phi(rng: &mut ChaCha8Rng) -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    for c in contexts()? {
        let d = BigInt::from(c.d());
        let reduce = |m: Mat2Z| m.e.map(|v| v.mod_floor(&d));
        let id = reduce(Mat2Z::identity());
        for _ in 0..20 {
            let a = c.sample_gamma_ub(rng, 6).a().clone();
            let b = c.sample_gamma_ub(rng, 6).a().clone();
            let (pa, pb) = (c.phi_reduction(&a)?, c.phi_reduction(&b)?);
            n += 2;
            if c.phi_reduction(&a.mul(&b))? != reduce(Mat2Z { e: pa.clone() }.mul(&Mat2Z { e: pb })) {
                fails.push(format!("{}: homomorphism", c.ideal()));
            }
            if (pa == id) != in_gamma_tilde_lb(&a, c.ideal()) {
                fails.push(format!("{}: kernel", c.ideal()));
            }
            let lb = c.sample_gamma_lb(rng, 6);
            n += 1;
            if c.phi_reduction(lb.a())? != id {
                fails.push(format!("{}: lower bound element off the kernel", c.ideal()));
            }
        }
    }
    for d in 1..=12u64 {
        n += 1;
        let mut count = 0u128;
        for e in 0..d.pow(4) {
            let (a, b, c, x) = (e % d, (e / d) % d, (e / d / d) % d, e / d / d / d);
            if (a * x + d * d - (b * c) % d) % d == 1 % d {
                count += 1;
            }
        }
        if count != sl2_zd_order(d) {
            fails.push(format!("|SL2(Z/{d})| = {count}, formula {}", sl2_zd_order(d)));
        }
    }
    Ok(tally(n, &fails))
}

fn random_pc(rng: &mut ChaCha8Rng, d: Disc, h: i64) -> PCElem {
    let c: Vec<Rat> = (0..3).map(|_| ratq(rng.gen_range(-h..=h), rng.gen_range(1..=2))).collect();
    PCElem::from_coords(d, &c)
}

fn admissibility_suite(rng: &mut ChaCha8Rng) -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    let mut counts = [0usize; 2];
    for dv in [5, 8, 13, 17] {
        let d = Disc::new(dv)?;
        for _ in 0..60 {
            let ws: Vec<PCElem> = (0..3).map(|_| random_pc(rng, d, 8)).collect();
            let a = admissibility(&ws)?;
            n += 1;
            counts[a.admissible as usize] += 1;
            if !a.certificate.verify(&a.images) {
                fails.push(format!("D={dv}: certificate fails for {}, {}, {}", ws[0], ws[1], ws[2]));
            }
        }
    }
    let (ok, detail) = tally(n, &fails);
    Ok((ok, format!("{detail} ({} admissible, {} not)", counts[1], counts[0])))
}

/// The two rank examples: e-basis weights and a mixed triple.
pub fn rank_examples(dv: i64) -> Result<[[PCElem; 3]; 2]> {
    let d = Disc::new(dv)?;
    let pc = |u: Rat, v: Rat, q: Rat| PCElem::from_coords(d, &[u, v, q]);
    let (o, z) = (Rat::one(), Rat::zero());
    Ok([
        [pc(o.clone(), z.clone(), z.clone()), pc(z.clone(), o.clone(), z.clone()), pc(z.clone(), z.clone(), o.clone())],
        [pc(o.clone(), z.clone(), ratq(dv, 2)), pc(o.clone(), z.clone(), ratq(-dv, 2)), pc(z.clone(), o, z)],
    ])
}

fn examples() -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    let mut ranks = Vec::new();
    for dv in [5, 8, 13, 17] {
        for (k, w) in rank_examples(dv)?.into_iter().enumerate() {
            n += 1;
            let wt = Weighting::trinodal(w.clone())?;
            let adm = admissibility(&w)?;
            let rank = exponent_lattice(&dual_basis(&w)?).len();
            ranks.push(rank);
            if !adm.admissible || wt.dual_basis() != dual_basis(&w)? {
                fails.push(format!("D={dv} example {}: not admissible", k + 1));
            }
        }
        n += 1;
        let one = PCElem::one(Disc::new(dv)?);
        let a = admissibility(&[one.clone(), one.clone(), one])?;
        if a.admissible || !a.certificate.verify(&a.images) {
            fails.push(format!("D={dv}: equal weights should be separated"));
        }
    }
    let (ok, detail) = tally(n, &fails);
    Ok((ok, format!("{detail}; exponent lattice ranks {:?}", &ranks[..2])))
}

fn prym() -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    for k in (1..=20u64).filter(|k| !crate::exact::is_square_i64(2 * *k as i64 + 1)) {
        for plus in [true, false] {
            n += 1;
            let r = prym_pipeline(k, plus)?;
            if !r.all_passed() {
                let bad: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
                fails.push(format!("n={k} {}: {}", if plus { "+" } else { "-" }, bad.join(",")));
            }
        }
    }
    for k in 1..=50 {
        n += 1;
        if !char_poly_check(k) {
            fails.push(format!("char poly n={k}"));
        }
    }
    Ok(tally(n, &fails))
}

fn random_alt(rng: &mut ChaCha8Rng, dim: usize) -> ZMat {
    let mut g = ZMat::zeros(dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let v = BigInt::from(rng.gen_range(-9..=9));
            g[(i, j)] = v.clone();
            g[(j, i)] = -v;
        }
    }
    g
}

/// Random unimodular matrix as a product of elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, dim: usize, steps: usize) -> ZMat {
    let mut u = ZMat::identity(dim);
    for _ in 0..steps {
        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if i != j {
            u.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-2..=2)));
        } else if rng.gen_bool(0.3) {
            u.negate_row(i);
        }
    }
    u
}

fn lattices(rng: &mut ChaCha8Rng) -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    while n < 40 {
        let dim = if n % 2 == 0 { 4 } else { 6 };
        let gram = AltGram::new(random_alt(rng, dim))?;
        if !gram.is_nondegenerate() {
            continue;
        }
        n += 1;
        let (u, delta) = symplectic_basis(&gram)?;
        let m = gram.matrix();
        if !u.is_unimodular() || &(&u * m) * &u.transpose() != standard_form(&delta) || delta != symplectic_type(&gram)? {
            fails.push(format!("symplectic basis, rank {dim}"));
        }
        let mut sub = ZMat::zeros(dim, dim);
        for i in 0..dim {
            sub[(i, i)] = BigInt::from(rng.gen_range(1..=4));
            for j in i + 1..dim {
                sub[(i, j)] = BigInt::from(rng.gen_range(-3..=3));
            }
        }
        let sub = &sub * &random_unimodular(rng, dim, 12);
        n += 1;
        if !sublattice_degree_check(&sub, &gram)?.product_law_holds() {
            fails.push(format!("degree product law, rank {dim}"));
        }
    }
    for _ in 0..40 {
        let dim = rng.gen_range(2..=4);
        let mut orders = Vec::new();
        let mut cur = BigInt::one();
        for _ in 0..dim {
            cur *= BigInt::from(rng.gen_range(1..=3));
            orders.push(cur.clone());
        }
        let w = random_unimodular(rng, dim, 10);
        let diag = ZMat::from_fn(dim, dim, |i, j| if i == j { orders[i].clone() } else { BigInt::zero() });
        let lattice = &random_unimodular(rng, dim, 10) * &(&diag * &w);
        let mut classes = w.clone();
        for i in 0..dim {
            for j in 0..dim {
                let k = BigInt::from(rng.gen_range(-1..=1));
                for c in 0..dim {
                    let add = &k * &lattice[(j, c)];
                    classes[(i, c)] += add;
                }
            }
        }
        n += 1;
        match rational_basis_reps(&lattice, &classes, &orders) {
            Ok(r) if r.verify(&lattice, &classes) => {}
            other => fails.push(format!("basis reps {:?}", other.err())),
        }
    }
    Ok(tally(n, &fails))
}

fn random_lattice(rng: &mut ChaCha8Rng, d: Disc) -> FLattice {
    loop {
        let gens: Vec<PCElem> = (0..3).map(|_| random_pc(rng, d, 6)).collect();
        if let Ok(l) = FLattice::from_generators(d, &gens) {
            return l;
        }
    }
}

fn random_h(rng: &mut ChaCha8Rng, d: Disc) -> Result<HMap> {
    let v: Vec<Rat> = (0..6).map(|_| ratq(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect();
    let q = QMat::from_rows(vec![
        vec![v[0].clone(), v[3].clone(), v[4].clone()],
        vec![v[3].clone(), v[1].clone(), v[5].clone()],
        vec![v[4].clone(), v[5].clone(), v[2].clone()],
    ]);
    HMap::from_sym_tensor(d, &q)
}

fn pseudocubic(rng: &mut ChaCha8Rng) -> Verdict {
    let mut n = 0;
    let mut fails = Vec::new();
    let d = Disc::new(5)?;
    for _ in 0..20 {
        let i = random_lattice(rng, d);
        n += 1;
        if i.dual()?.dual()? != i {
            fails.push("double dual".into());
        }
        let h = random_h(rng, d)?;
        let a = loop {
            let a = random_pc(rng, d, 4);
            if a.is_unit() {
                break a;
            }
        };
        n += 1;
        if o_h(&i.scale(&a)?, &h.twist(&a))? != o_h(&i, &h)? {
            fails.push("O_h equivariance".into());
        }
        let h2 = random_h(rng, d)?;
        let shift = integral_sym_maps(&i)
            .iter()
            .fold(HMap::zero(d), |acc, g| acc.add(&g.scale(&Rat::from_integer(BigInt::from(rng.gen_range(-3..=3))))));
        n += 1;
        let same = extension_class_equal(&h, &h, &i) && extension_class_equal(&h.add(&shift), &h, &i);
        let sym = extension_class_equal(&h, &h2, &i) == extension_class_equal(&h2, &h, &i);
        if !same || !sym {
            fails.push("extension class relation".into());
        }
    }
    for c in contexts()? {
        n += 1;
        let one = BigInt::one();
        if pair_gram(&standard_symplectic_generators(&c)) != Some(standard_form(&[one.clone(), one.clone(), one])) {
            fails.push(format!("standard module Gram for {}", c.ideal()));
        }
    }
    Ok(tally(n, &fails))
}
