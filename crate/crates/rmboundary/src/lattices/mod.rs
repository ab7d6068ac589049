//! Integer normal forms, lattices in Q^n and structure theory of alternating forms.

mod matrix;
mod normal;
mod symplectic;

pub use matrix::{Matrix, QMat, ZMat};
pub use normal::{hnf, hnf_nonzero, hnf_with_transform, left_kernel, right_kernel, snf, Snf};
pub use symplectic::{
    is_standard_form, rational_basis_reps, standard_form, sublattice_degree_check, symplectic_basis,
    symplectic_type, AltGram, DegreeCheck, RationalBasisReps,
};

use crate::error::{Error, Result};
use crate::exact::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// A finitely generated subgroup of Q^n: `basis / den`, basis in row Hermite form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QLattice {
    ambient: usize,
    basis: ZMat,
    den: BigInt,
}

impl QLattice {
    pub fn from_generators(ambient: usize, gens: &[Vec<Rat>]) -> QLattice {
        assert!(gens.iter().all(|g| g.len() == ambient), "generator length mismatch");
        let den = common_denominator(gens.iter().flatten());
        let m = ZMat::from_fn(gens.len(), ambient, |i, j| (&gens[i][j] * Rat::from_integer(den.clone())).to_integer());
        QLattice::from_scaled(ambient, &m, den)
    }

    /// Lattice generated by the rows of `m / den`.
    pub fn from_scaled(ambient: usize, m: &ZMat, den: BigInt) -> QLattice {
        assert!(den.is_positive(), "denominator must be positive");
        let h = if m.rows() == 0 { ZMat::empty(ambient) } else { hnf_nonzero(m) };
        if h.rows() == 0 {
            return QLattice { ambient, basis: ZMat::empty(ambient), den: BigInt::one() };
        }
        let mut g = den.clone();
        for i in 0..h.rows() {
            for x in h.row(i) {
                g = g.gcd(&x);
            }
        }
        let basis = h.map(|x| x / &g);
        QLattice { ambient, basis, den: den / g }
    }

    pub fn from_int_rows(m: &ZMat) -> QLattice {
        QLattice::from_scaled(m.cols(), m, BigInt::one())
    }

    /// Z^n.
    pub fn standard(n: usize) -> QLattice {
        QLattice::from_int_rows(&ZMat::identity(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn scaled_basis(&self) -> &ZMat {
        &self.basis
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn basis(&self) -> Vec<Vec<Rat>> {
        let d = Rat::from_integer(self.den.clone());
        (0..self.rank()).map(|i| self.basis.row(i).into_iter().map(|x| Rat::from_integer(x) / &d).collect()).collect()
    }

    pub fn basis_matrix(&self) -> QMat {
        QMat::from_rows(self.basis()).pad_empty(self.ambient)
    }

    /// Integer coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[Rat]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let d = Rat::from_integer(self.den.clone());
        let mut w: Vec<Rat> = v.iter().map(|x| x * &d).collect();
        if !w.iter().all(|x| x.is_integer()) {
            return None;
        }
        let mut c = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let p = (0..self.ambient).find(|&j| !self.basis[(i, j)].is_zero()).expect("nonzero basis row");
            let piv = Rat::from_integer(self.basis[(i, p)].clone());
            let q = &w[p] / &piv;
            if !q.is_integer() {
                return None;
            }
            for (j, wj) in w.iter_mut().enumerate() {
                *wj -= &q * Rat::from_integer(self.basis[(i, j)].clone());
            }
            c.push(q.to_integer());
        }
        if w.iter().all(Zero::is_zero) {
            Some(c)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coords(v).is_some()
    }

    pub fn is_sublattice_of(&self, other: &QLattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    /// Lattice index [other : self] for a full-rank sublattice of an equal-rank lattice.
    pub fn index_in(&self, other: &QLattice) -> Option<BigInt> {
        if self.rank() != other.rank() || !self.is_sublattice_of(other) {
            return None;
        }
        let c = ZMat::from_rows(self.basis().iter().map(|b| other.coords(b).expect("sublattice")).collect());
        Some(c.det().abs())
    }

    pub fn scale(&self, r: &Rat) -> QLattice {
        let gens: Vec<Vec<Rat>> = self.basis().into_iter().map(|b| b.into_iter().map(|x| x * r).collect()).collect();
        QLattice::from_generators(self.ambient, &gens)
    }

    /// Image under the linear map `x -> x * m`.
    pub fn map_right(&self, m: &QMat) -> QLattice {
        let gens: Vec<Vec<Rat>> = self.basis().iter().map(|b| m.vec_mul(b)).collect();
        QLattice::from_generators(m.cols(), &gens)
    }

    pub fn sum(&self, other: &QLattice) -> QLattice {
        let mut gens = self.basis();
        gens.extend(other.basis());
        QLattice::from_generators(self.ambient, &gens)
    }
}

impl QMat {
    fn pad_empty(self, cols: usize) -> QMat {
        if self.rows() == 0 {
            QMat::empty(cols)
        } else {
            self
        }
    }
}

/// Integer basis (rows) of the orthogonal complement of the span of `vs`.
fn perp_basis(ambient: usize, vs: &[Vec<Rat>]) -> ZMat {
    if vs.is_empty() {
        return ZMat::identity(ambient);
    }
    let den = common_denominator(vs.iter().flatten());
    let m = ZMat::from_fn(vs.len(), ambient, |i, j| (&vs[i][j] * Rat::from_integer(den.clone())).to_integer());
    right_kernel(&m)
}

/// The lattice `lat ∩ span_Q(vs)`; saturated in `lat`.
pub fn intersect_subspace(lat: &QLattice, vs: &[Vec<Rat>]) -> QLattice {
    let c = perp_basis(lat.ambient, vs);
    if c.rows() == 0 || lat.rank() == 0 {
        return lat.clone();
    }
    let p = &lat.basis * &c.transpose();
    let k = left_kernel(&p);
    if k.rows() == 0 {
        return QLattice { ambient: lat.ambient, basis: ZMat::empty(lat.ambient), den: BigInt::one() };
    }
    QLattice::from_scaled(lat.ambient, &(&k * &lat.basis), lat.den.clone())
}

/// `{x : x * m ∈ target}` for a matrix `m` of full row rank.
pub fn preimage(m: &QMat, target: &QLattice) -> Result<QLattice> {
    if m.rank() != m.rows() {
        return Err(Error::Dimension("preimage map must be injective".into()));
    }
    let image = intersect_subspace(target, &m.to_rows());
    let gens: Vec<Vec<Rat>> = image
        .basis()
        .iter()
        .map(|y| m.solve_left(y).expect("vector lies in the row space"))
        .collect();
    Ok(QLattice::from_generators(m.rows(), &gens))
}
