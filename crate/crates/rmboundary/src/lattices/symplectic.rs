//! Alternating forms on lattices: type, symplectic bases, degrees, adapted bases of
//! finite quotients.

use super::matrix::{QMat, ZMat};
use super::normal::{hnf_nonzero, snf};
use crate::error::{Error, Result};
use crate::exact::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A square integer matrix with `G^T = -G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltGram {
    g: ZMat,
}

impl AltGram {
    pub fn new(g: ZMat) -> Result<AltGram> {
        if !g.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        let n = g.rows();
        for i in 0..n {
            for j in 0..n {
                if g[(i, j)] != -g[(j, i)].clone() {
                    return Err(Error::Dimension("Gram matrix is not alternating".into()));
                }
            }
        }
        Ok(AltGram { g })
    }

    pub fn matrix(&self) -> &ZMat {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.dim().is_multiple_of(2) && !self.g.det().is_zero()
    }

    fn pair(&self, u: &[BigInt], v: &[BigInt]) -> BigInt {
        let gv = self.g.mul_vec(v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }
}

/// `[[0, Δ], [-Δ, 0]]` with `Δ = diag(delta)`.
pub fn standard_form(delta: &[BigInt]) -> ZMat {
    let g = delta.len();
    let mut m = ZMat::zeros(2 * g, 2 * g);
    for (i, d) in delta.iter().enumerate() {
        m[(i, g + i)] = d.clone();
        m[(g + i, i)] = -d.clone();
    }
    m
}

pub fn is_standard_form(m: &ZMat, delta: &[BigInt]) -> bool {
    *m == standard_form(delta)
}

/// The type (d_1 | ... | d_g) of a nondegenerate alternating form.
pub fn symplectic_type(gram: &AltGram) -> Result<Vec<BigInt>> {
    if !gram.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let inv = snf(gram.matrix()).invariants();
    let ty: Vec<BigInt> = inv.iter().step_by(2).cloned().collect();
    debug_assert!(inv.chunks(2).all(|c| c[0] == c[1]));
    Ok(ty)
}

/// Unimodular `U` with `U G U^T = [[0, Δ], [-Δ, 0]]`, together with the type `Δ`.
///
/// Rows of `U` are the new basis vectors: first the `e_i`, then the matching `f_i`.
pub fn symplectic_basis(gram: &AltGram) -> Result<(ZMat, Vec<BigInt>)> {
    if !gram.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let n = gram.dim();
    let mut vecs: Vec<Vec<BigInt>> = ZMat::identity(n).to_rows();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pairs: Vec<(Vec<BigInt>, Vec<BigInt>, BigInt)> = Vec::new();
    while !remaining.is_empty() {
        let (ei, fi, p) = 'step: loop {
            let mut best: Option<(usize, usize, BigInt)> = None;
            for (a, &i) in remaining.iter().enumerate() {
                for &j in &remaining[a + 1..] {
                    let v = gram.pair(&vecs[i], &vecs[j]);
                    if !v.is_zero() && best.as_ref().is_none_or(|b| v.abs() < b.2.abs()) {
                        best = Some((i, j, v));
                    }
                }
            }
            let (mut i, mut j, mut p) = best.ok_or(Error::Degenerate)?;
            if p.is_negative() {
                std::mem::swap(&mut i, &mut j);
                p = -p;
            }
            // Euclid steps until the pivot divides every pairing with e and f
            for &k in &remaining {
                if k == i || k == j {
                    continue;
                }
                let a = gram.pair(&vecs[i], &vecs[k]);
                if !(&a % &p).is_zero() {
                    let q = a.div_floor(&p);
                    vecs[k] = axpy(&vecs[k], &-q, &vecs[j]);
                    continue 'step;
                }
                let b = gram.pair(&vecs[j], &vecs[k]);
                if !(&b % &p).is_zero() {
                    let q = b.div_floor(&p);
                    vecs[k] = axpy(&vecs[k], &q, &vecs[i]);
                    continue 'step;
                }
            }
            for &k in &remaining {
                if k == i || k == j {
                    continue;
                }
                let a = gram.pair(&vecs[i], &vecs[k]) / &p;
                let b = gram.pair(&vecs[j], &vecs[k]) / &p;
                let t = axpy(&vecs[k], &b, &vecs[i]);
                vecs[k] = axpy(&t, &-a, &vecs[j]);
            }
            let others: Vec<usize> = remaining.iter().copied().filter(|&k| k != i && k != j).collect();
            for (a, &k) in others.iter().enumerate() {
                for &l in &others[a + 1..] {
                    if !(gram.pair(&vecs[k], &vecs[l]) % &p).is_zero() {
                        vecs[i] = axpy(&vecs[i], &BigInt::one(), &vecs[k]);
                        continue 'step;
                    }
                }
            }
            break (i, j, p);
        };
        pairs.push((vecs[ei].clone(), vecs[fi].clone(), p));
        remaining.retain(|&k| k != ei && k != fi);
    }
    let mut rows: Vec<Vec<BigInt>> = pairs.iter().map(|p| p.0.clone()).collect();
    rows.extend(pairs.iter().map(|p| p.1.clone()));
    let delta = pairs.into_iter().map(|p| p.2).collect();
    Ok((ZMat::from_rows(rows), delta))
}

fn axpy(x: &[BigInt], a: &BigInt, y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(u, v)| u + a * v).collect()
}

/// Index of a full-rank sublattice and the degrees of the restricted forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCheck {
    pub index: BigInt,
    pub degree: BigInt,
    pub sub_degree: BigInt,
}

impl DegreeCheck {
    pub fn product_law_holds(&self) -> bool {
        self.sub_degree == &self.index * &self.degree
    }
}

fn pfaffian_abs(g: &ZMat) -> Result<BigInt> {
    let det = g.det().abs();
    let r = det.sqrt();
    if &r * &r != det {
        return Err(Error::Dimension("determinant of an alternating form is not a square".into()));
    }
    Ok(r)
}

/// `sub` has rows expressing a sublattice basis in the basis of the lattice carrying `gram`.
pub fn sublattice_degree_check(sub: &ZMat, gram: &AltGram) -> Result<DegreeCheck> {
    if !sub.is_square() || sub.rows() != gram.dim() {
        return Err(Error::RankDeficient);
    }
    let index = sub.det().abs();
    if index.is_zero() {
        return Err(Error::RankDeficient);
    }
    if !gram.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let degree = pfaffian_abs(gram.matrix())?;
    let restricted = &(sub * gram.matrix()) * &sub.transpose();
    let sub_degree = pfaffian_abs(&restricted)?;
    Ok(DegreeCheck { index, degree, sub_degree })
}

/// Output of [`rational_basis_reps`]: `orders[i] * reps[i] = multipliers[i] * basis[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalBasisReps {
    pub basis: ZMat,
    pub reps: ZMat,
    pub multipliers: Vec<BigInt>,
    pub orders: Vec<BigInt>,
}

impl RationalBasisReps {
    /// Checks the defining equations against the input data by substitution.
    pub fn verify(&self, lattice: &ZMat, classes: &ZMat) -> bool {
        let n = lattice.rows();
        let same_lattice = hnf_nonzero(&self.basis) == hnf_nonzero(lattice);
        let lq = lattice.to_q();
        (0..n).all(|i| {
            let d = &self.orders[i];
            let a = &self.multipliers[i];
            let lhs: Vec<BigInt> = self.reps.row(i).iter().map(|x| x * d).collect();
            let rhs: Vec<BigInt> = self.basis.row(i).iter().map(|x| x * a).collect();
            let diff: Vec<Rat> = self.reps.row(i).iter().zip(classes.row(i)).map(|(x, y)| Rat::from_integer(x - y)).collect();
            let same_class = lq.solve_left(&diff).is_some_and(|c| c.iter().all(|x| x.is_integer()));
            lhs == rhs && a.is_positive() && a <= d && a.gcd(d).is_one() && same_class
        }) && same_lattice
    }
}

fn coords_in(basis: &QMat, v: &[BigInt]) -> Option<Vec<Rat>> {
    let w: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
    basis.solve_left(&w)
}

/// Order of the class of `v` modulo the lattice spanned by the rows of `basis`.
fn class_order(basis: &QMat, v: &[BigInt]) -> BigInt {
    let c = coords_in(basis, v).expect("full-rank lattice");
    c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Adapted bases for a finite quotient `Z^n / Λ`.
///
/// `lattice` has rows spanning `Λ ⊂ Z^n`; `classes` has one row per cyclic summand of
/// `Z^n / Λ`, with the given orders forming a divisor chain.
pub fn rational_basis_reps(lattice: &ZMat, classes: &ZMat, orders: &[BigInt]) -> Result<RationalBasisReps> {
    let n = lattice.cols();
    if lattice.rows() != n || classes.rows() != n || classes.cols() != n || orders.len() != n {
        return Err(Error::Dimension("expected n generators of a rank-n lattice in Z^n".into()));
    }
    let det = lattice.det();
    if det.is_zero() {
        return Err(Error::RankDeficient);
    }
    let lq = lattice.to_q();
    for i in 0..n {
        if !orders[i].is_positive() || class_order(&lq, &classes.row(i)) != orders[i] {
            return Err(Error::WrongOrders);
        }
        if i > 0 && !(&orders[i] % &orders[i - 1]).is_zero() {
            return Err(Error::WrongOrders);
        }
    }
    let product: BigInt = orders.iter().product();
    if product != det.abs() || hnf_nonzero(&lattice.vstack(classes)) != ZMat::identity(n) {
        return Err(Error::NotDirectSum);
    }

    // coordinates of d_i * class_i in the lattice basis, made upper triangular by column operations
    let mut w = ZMat::from_fn(n, n, |i, j| {
        let c = coords_in(&lq, &classes.row(i)).expect("full rank");
        (&c[j] * Rat::from_integer(orders[i].clone())).to_integer()
    });
    let mut v = ZMat::identity(n);
    for i in (0..n).rev() {
        loop {
            let nz: Vec<usize> = (0..=i).filter(|&j| !w[(i, j)].is_zero()).collect();
            if nz.is_empty() || nz == [i] {
                break;
            }
            let j0 = *nz.iter().min_by_key(|&&j| w[(i, j)].abs()).expect("nonempty");
            w.swap_cols(j0, i);
            v.swap_cols(j0, i);
            for j in 0..i {
                if !w[(i, j)].is_zero() {
                    let q = -w[(i, j)].div_floor(&w[(i, i)]);
                    w.add_col_multiple(j, i, &q);
                    v.add_col_multiple(j, i, &q);
                }
            }
        }
    }
    let vinv = v.to_q().inverse().and_then(|m| m.to_z()).expect("unimodular transform");
    let mut mu = &vinv * lattice;

    let targets: Vec<Vec<BigInt>> =
        (0..n).map(|i| classes.row(i).iter().map(|x| x * &orders[i]).collect()).collect();
    let coords_of = |mu: &ZMat, i: usize| -> Vec<BigInt> {
        coords_in(&mu.to_q(), &targets[i]).expect("in lattice").into_iter().map(|x| x.to_integer()).collect()
    };

    // make d_i divide the off-diagonal coefficients
    for i in (0..n).rev() {
        let a = coords_of(&mu, i);
        let d = &orders[i];
        let eg = a[i].extended_gcd(d);
        if !eg.gcd.abs().is_one() {
            return Err(Error::NotDirectSum);
        }
        let y = &eg.x * &eg.gcd;
        for j in i + 1..n {
            let c = &y * &a[j];
            if !c.is_zero() {
                mu.add_row_multiple(i, j, &c);
            }
        }
    }

    let mut reps = ZMat::zeros(n, n);
    let mut multipliers = Vec::with_capacity(n);
    for i in 0..n {
        let a = coords_of(&mu, i);
        let d = &orders[i];
        let ai = (&a[i] - BigInt::one()).mod_floor(d) + BigInt::one();
        let mut rep = classes.row(i);
        for j in 0..n {
            let t = if j == i { (&a[i] - &ai) / d } else { &a[j] / d };
            if !t.is_zero() {
                for (k, r) in rep.iter_mut().enumerate() {
                    *r -= &t * &mu[(j, k)];
                }
            }
        }
        for (k, r) in rep.into_iter().enumerate() {
            reps[(i, k)] = r;
        }
        multipliers.push(ai);
    }
    let out = RationalBasisReps { basis: mu, reps, multipliers, orders: orders.to_vec() };
    if !out.verify(lattice, classes) {
        return Err(Error::NotDirectSum);
    }
    Ok(out)
}
