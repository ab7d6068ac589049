//! Lattices in F = K + Q, pseudo-cubic orders, self-adjoint maps and extension classes.
//!
//! Coordinates on F are always taken in the basis e = ((1,0), (sqrt D,0), (0,1)), and F^2 is
//! identified with Q^6 by concatenating the coordinates of both factors.

use crate::error::{Error, Result};
use crate::exact::{rat, Disc, PCElem, QuadElem, Rat};
use crate::lattices::{intersect_subspace, preimage, QLattice, QMat, ZMat};
use crate::modvariety::ModContext;
use crate::orders::QIdeal;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// Pseudo-trace Gram matrix diag(2, 2D, 1) in the basis e.
pub fn gram(d: Disc) -> QMat {
    QMat::from_rows(vec![vec![rat(2), rat(0), rat(0)], vec![rat(0), rat(2 * d.value()), rat(0)], vec![rat(0), rat(0), rat(1)]])
}

/// tr_p(x y).
pub fn trp_pairing(x: &PCElem, y: &PCElem) -> Rat {
    (x * y).trp()
}

/// A lattice of rank three in F.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FLattice {
    d: Disc,
    lat: QLattice,
}

impl FLattice {
    pub fn from_generators(d: Disc, gens: &[PCElem]) -> Result<FLattice> {
        let rows: Vec<Vec<Rat>> = gens.iter().map(|g| g.coords().to_vec()).collect();
        let lat = QLattice::from_generators(3, &rows);
        if lat.rank() != 3 {
            return Err(Error::RankDeficient);
        }
        Ok(FLattice { d, lat })
    }

    fn from_lattice(d: Disc, lat: QLattice) -> Result<FLattice> {
        if lat.rank() != 3 {
            return Err(Error::RankDeficient);
        }
        Ok(FLattice { d, lat })
    }

    /// O_D + Z.
    pub fn maximal(d: Disc) -> FLattice {
        let g = PCElem::new(QuadElem::gamma(d), Rat::zero());
        let one = PCElem::new(QuadElem::one(d), Rat::zero());
        let e3 = PCElem::new(QuadElem::zero(d), Rat::one());
        FLattice::from_generators(d, &[one, g, e3]).expect("full rank")
    }

    pub fn disc(&self) -> Disc {
        self.d
    }

    pub fn lattice(&self) -> &QLattice {
        &self.lat
    }

    pub fn basis(&self) -> Vec<PCElem> {
        self.lat.basis().iter().map(|r| PCElem::from_coords(self.d, r)).collect()
    }

    pub fn contains(&self, x: &PCElem) -> bool {
        self.lat.contains(&x.coords())
    }

    pub fn coords(&self, x: &PCElem) -> Option<Vec<BigInt>> {
        self.lat.coords(&x.coords())
    }

    pub fn is_subset_of(&self, o: &FLattice) -> bool {
        self.lat.is_sublattice_of(&o.lat)
    }

    pub fn index_in(&self, o: &FLattice) -> Option<BigInt> {
        self.lat.index_in(&o.lat)
    }

    /// a * I.
    pub fn scale(&self, a: &PCElem) -> Result<FLattice> {
        let gens: Vec<PCElem> = self.basis().iter().map(|b| a * b).collect();
        FLattice::from_generators(self.d, &gens)
    }

    /// Gram matrix tr_p(b_i b_j) of the basis.
    pub fn trace_gram(&self) -> QMat {
        let b = self.basis();
        QMat::from_fn(3, 3, |i, j| trp_pairing(&b[i], &b[j]))
    }

    /// Dual basis s_i with tr_p(s_i b_j) = delta_ij, aligned with `basis()`.
    pub fn dual_basis(&self) -> Result<Vec<PCElem>> {
        let b = self.basis();
        let t = self.trace_gram().inverse().ok_or(Error::SingularGram)?;
        Ok((0..3)
            .map(|i| (0..3).fold(PCElem::zero(self.d), |acc, j| acc + b[j].scale(&t[(i, j)])))
            .collect())
    }

    /// I^dual = {x : tr_p(x I) in Z}.
    pub fn dual(&self) -> Result<FLattice> {
        FLattice::from_generators(self.d, &self.dual_basis()?)
    }
}

impl fmt::Display for FLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.basis().iter().map(|x| x.to_string()).collect();
        write!(f, "<{}>", b.join(", "))
    }
}

/// A subring of F with 1 whose additive group has rank three.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PCOrder {
    lat: FLattice,
}

impl PCOrder {
    pub fn from_lattice(lat: FLattice) -> Result<PCOrder> {
        if !lat.contains(&PCElem::one(lat.disc())) {
            return Err(Error::NotAnOrder("does not contain (1,1)".into()));
        }
        let b = lat.basis();
        for x in &b {
            for y in &b {
                if !lat.contains(&(x * y)) {
                    return Err(Error::NotAnOrder(format!("{x} * {y} leaves the lattice")));
                }
            }
        }
        Ok(PCOrder { lat })
    }

    pub fn lattice(&self) -> &FLattice {
        &self.lat
    }

    pub fn contains(&self, x: &PCElem) -> bool {
        self.lat.contains(x)
    }

    pub fn is_subset_of(&self, o: &PCOrder) -> bool {
        self.lat.is_subset_of(&o.lat)
    }
}

/// O_a = a x {0} + Z (1,1).
pub fn pc_order_from_ideal(ideal: &QIdeal) -> PCOrder {
    let d = ideal.disc();
    let mut gens: Vec<PCElem> = ideal.basis().into_iter().map(|x| PCElem::new(x, Rat::zero())).collect();
    gens.push(PCElem::one(d));
    let lat = FLattice::from_generators(d, &gens).expect("full rank");
    PCOrder::from_lattice(lat).expect("ideal orders are rings")
}

/// Index of the order in O_D + Z, if it is contained there.
pub fn pc_order_degree(o: &PCOrder) -> Option<BigInt> {
    o.lat.index_in(&FLattice::maximal(o.lat.disc()))
}

/// Matrix of multiplication by x in the basis e (columns are images).
pub fn mult_matrix(x: &PCElem) -> QMat {
    let d = x.disc();
    let e: Vec<PCElem> = (0..3).map(|k| basis_vector(d, k)).collect();
    let cols: Vec<[Rat; 3]> = e.iter().map(|b| (x * b).coords()).collect();
    QMat::from_fn(3, 3, |i, j| cols[j][i].clone())
}

fn basis_vector(d: Disc, k: usize) -> PCElem {
    let mut c = vec![Rat::zero(); 3];
    c[k] = Rat::one();
    PCElem::from_coords(d, &c)
}

fn apply(m: &QMat, x: &PCElem) -> PCElem {
    PCElem::from_coords(x.disc(), &m.mul_vec(&x.coords()))
}

/// A tr_p-self-adjoint Q-linear endomorphism of F, as a matrix in the basis e.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HMap {
    d: Disc,
    h: QMat,
}

impl HMap {
    pub fn new(d: Disc, h: QMat) -> Result<HMap> {
        if h.rows() != 3 || h.cols() != 3 {
            return Err(Error::Dimension("HMap must be 3x3".into()));
        }
        let gh = &gram(d) * &h;
        if gh != gh.transpose() {
            return Err(Error::CheckFailed("map is not self-adjoint for the pseudo-trace".into()));
        }
        Ok(HMap { d, h })
    }

    pub fn zero(d: Disc) -> HMap {
        HMap { d, h: QMat::zeros(3, 3) }
    }

    /// The map with matrix Q G for a symmetric tensor Q in the basis e.
    pub fn from_sym_tensor(d: Disc, q: &QMat) -> Result<HMap> {
        if *q != q.transpose() {
            return Err(Error::CheckFailed("tensor is not symmetric".into()));
        }
        HMap::new(d, q * &gram(d))
    }

    /// y -> tr_p(x1 y) x2 + tr_p(x2 y) x1.
    pub fn from_sym_pair(x1: &PCElem, x2: &PCElem) -> HMap {
        let d = x1.disc();
        let (a, b) = (x1.coords(), x2.coords());
        let q = QMat::from_fn(3, 3, |i, j| &a[i] * &b[j] + &b[i] * &a[j]);
        HMap::from_sym_tensor(d, &q).expect("symmetric")
    }

    pub fn mult(x: &PCElem) -> HMap {
        HMap { d: x.disc(), h: mult_matrix(x) }
    }

    pub fn disc(&self) -> Disc {
        self.d
    }

    pub fn matrix(&self) -> &QMat {
        &self.h
    }

    /// The symmetric tensor Q = H G^-1.
    pub fn sym_tensor(&self) -> QMat {
        &self.h * &gram(self.d).inverse().expect("nondegenerate")
    }

    pub fn apply(&self, x: &PCElem) -> PCElem {
        apply(&self.h, x)
    }

    /// x -> a h(a x).
    pub fn twist(&self, a: &PCElem) -> HMap {
        let m = mult_matrix(a);
        HMap { d: self.d, h: &(&m * &self.h) * &m }
    }

    pub fn add(&self, o: &HMap) -> HMap {
        HMap { d: self.d, h: &self.h + &o.h }
    }

    pub fn sub(&self, o: &HMap) -> HMap {
        HMap { d: self.d, h: &self.h - &o.h }
    }

    pub fn scale(&self, r: &Rat) -> HMap {
        HMap { d: self.d, h: self.h.scale(r) }
    }
}

/// [M_x, h] = M_x h - h M_x.
pub fn commutator_action(x: &PCElem, h: &HMap) -> QMat {
    let m = mult_matrix(x);
    &(&m * &h.h) - &(&h.h * &m)
}

/// x.(lambda, mu) = (x lambda + [M_x,h](mu), x mu).
pub fn eh_action(x: &PCElem, v: &(PCElem, PCElem), h: &HMap) -> (PCElem, PCElem) {
    let c = commutator_action(x, h);
    (x * &v.0 + apply(&c, &v.1), x * &v.1)
}

/// <(x1,y1),(x2,y2)>_p = tr_p(x2 y1 - x1 y2).
pub fn symplectic_pairing(v: &(PCElem, PCElem), w: &(PCElem, PCElem)) -> Rat {
    (&w.0 * &v.1 - &v.0 * &w.1).trp()
}

/// Lattice of x with `x -> x * m_k` landing in `targets[k]` for every k.
fn stacked_preimage(d: Disc, maps: &[QMat], targets: &[&FLattice]) -> Result<FLattice> {
    let n = maps.len();
    // row i of the stacked map: images of e_i under every map, concatenated
    let m = QMat::from_fn(3, 3 * n, |i, j| maps[j / 3][(j % 3, i)].clone());
    let mut gens = Vec::new();
    for (k, t) in targets.iter().enumerate() {
        for b in t.lat.basis() {
            let mut v = vec![Rat::zero(); 3 * n];
            v[3 * k..3 * k + 3].clone_from_slice(&b);
            gens.push(v);
        }
    }
    let target = QLattice::from_generators(3 * n, &gens);
    FLattice::from_lattice(d, preimage(&m, &target)?)
}

/// O(I) = {x in F : x I in I}.
pub fn coefficient_ring(i: &FLattice) -> Result<PCOrder> {
    let maps: Vec<QMat> = i.basis().iter().map(mult_matrix).collect();
    let targets = vec![i; maps.len()];
    PCOrder::from_lattice(stacked_preimage(i.d, &maps, &targets)?)
}

/// O_h(I) = {x in O(I) : [M_x,h](I^dual) in I}.
pub fn o_h(i: &FLattice, h: &HMap) -> Result<PCOrder> {
    let d = i.d;
    let mut maps: Vec<QMat> = i.basis().iter().map(mult_matrix).collect();
    // x -> [M_x,h](s) = x h(s) - h(x s) is linear in x with matrix M_{h(s)} - H M_s
    for s in i.dual_basis()? {
        let hs = h.apply(&s);
        maps.push(&mult_matrix(&hs) - &(&h.h * &mult_matrix(&s)));
    }
    let targets = vec![i; maps.len()];
    PCOrder::from_lattice(stacked_preimage(d, &maps, &targets)?)
}

/// Basis of the F-linear maps inside the self-adjoint ones, as symmetric tensors in e.
pub fn lambda_basis(d: Disc) -> [QMat; 3] {
    let dv = d.value();
    let l1 = QMat::from_rows(vec![vec![rat(1), rat(0), rat(0)], vec![rat(0), Rat::new(1.into(), dv.into()), rat(0)], vec![rat(0), rat(0), rat(0)]]);
    let l2 = QMat::from_rows(vec![vec![rat(0), rat(1), rat(0)], vec![rat(1), rat(0), rat(0)], vec![rat(0), rat(0), rat(0)]]);
    let l3 = QMat::from_rows(vec![vec![rat(0), rat(0), rat(0)], vec![rat(0), rat(0), rat(0)], vec![rat(0), rat(0), rat(1)]]);
    [l1, l2, l3]
}

/// Basis of the orthogonal complement, as symmetric tensors in e.
pub fn mu_basis(d: Disc) -> [QMat; 3] {
    let q = |n: i64, m: i64| Rat::new(n.into(), m.into());
    let dv = d.value();
    let z = Rat::zero;
    let m1 = QMat::from_rows(vec![vec![q(-dv, 4), z(), z()], vec![z(), q(1, 4), z()], vec![z(), z(), z()]]);
    let m2 = QMat::from_rows(vec![vec![z(), z(), q(1, 2)], vec![z(), z(), z()], vec![q(1, 2), z(), z()]]);
    let m3 = QMat::from_rows(vec![vec![z(), z(), z()], vec![z(), z(), q(1, 2)], vec![z(), q(1, 2), z()]]);
    [m1, m2, m3]
}

/// Pairing tr_p(x1 y1) tr_p(x2 y2) extended to tensors.
pub fn tensor_pairing(d: Disc, a: &QMat, b: &QMat) -> Rat {
    let g = gram(d);
    let gag = &(&g * a) * &g;
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).fold(Rat::zero(), |acc, (i, j)| acc + &gag[(i, j)] * &b[(i, j)])
}

fn sym_vec(q: &QMat) -> Vec<Rat> {
    vec![q[(0, 0)].clone(), q[(1, 1)].clone(), q[(2, 2)].clone(), q[(0, 1)].clone(), q[(0, 2)].clone(), q[(1, 2)].clone()]
}

/// Coordinates of h modulo the F-linear maps: the mu-coordinates of its tensor.
pub fn project_perp(h: &HMap) -> Vec<Rat> {
    let d = h.d;
    let mut rows: Vec<Vec<Rat>> = lambda_basis(d).iter().map(sym_vec).collect();
    rows.extend(mu_basis(d).iter().map(sym_vec));
    let m = QMat::from_rows(rows);
    let c = m.solve_left(&sym_vec(&h.sym_tensor())).expect("lambda and mu span the symmetric tensors");
    c[3..].to_vec()
}

/// Generators of the self-adjoint maps sending I^dual into I.
pub fn integral_sym_maps(i: &FLattice) -> Vec<HMap> {
    let b = i.basis();
    let mut out = Vec::new();
    for p in 0..3 {
        for q in p..3 {
            let h = HMap::from_sym_pair(&b[p], &b[q]);
            out.push(if p == q { h.scale(&Rat::new(1.into(), 2.into())) } else { h });
        }
    }
    out
}

/// Whether h1 and h2 define the same extension class of I.
pub fn extension_class_equal(h1: &HMap, h2: &HMap, i: &FLattice) -> bool {
    let diff = project_perp(&h1.sub(h2));
    let gens: Vec<Vec<Rat>> = integral_sym_maps(i).iter().map(project_perp).collect();
    QLattice::from_generators(3, &gens).contains(&diff)
}

pub fn baer_sum(h1: &HMap, h2: &HMap) -> HMap {
    h1.add(h2)
}

/// A lattice in F^2 = Q^6.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FPairLattice {
    d: Disc,
    lat: QLattice,
}

fn pair_coords(v: &(PCElem, PCElem)) -> Vec<Rat> {
    let mut c = v.0.coords().to_vec();
    c.extend(v.1.coords());
    c
}

fn pair_from_coords(d: Disc, c: &[Rat]) -> (PCElem, PCElem) {
    (PCElem::from_coords(d, &c[..3]), PCElem::from_coords(d, &c[3..]))
}

impl FPairLattice {
    pub fn from_generators(d: Disc, gens: &[(PCElem, PCElem)]) -> FPairLattice {
        let rows: Vec<Vec<Rat>> = gens.iter().map(pair_coords).collect();
        FPairLattice { d, lat: QLattice::from_generators(6, &rows) }
    }

    pub fn lattice(&self) -> &QLattice {
        &self.lat
    }

    pub fn rank(&self) -> usize {
        self.lat.rank()
    }

    pub fn basis(&self) -> Vec<(PCElem, PCElem)> {
        self.lat.basis().iter().map(|c| pair_from_coords(self.d, c)).collect()
    }

    pub fn contains(&self, v: &(PCElem, PCElem)) -> bool {
        self.lat.contains(&pair_coords(v))
    }
}

/// Generators of the symplectic module O_a-module in F^2 for a smart basis.
pub fn standard_symplectic_generators(ctx: &ModContext) -> Vec<(PCElem, PCElem)> {
    let d = ctx.disc();
    let (e1, e2) = ctx.eta();
    let dd = rat(ctx.d() as i64);
    let sq = QuadElem::sqrt_d(d);
    let z = PCElem::zero(d);
    let k = |x: QuadElem| PCElem::new(x, Rat::zero());
    let r = |q: Rat| PCElem::new(QuadElem::zero(d), q);
    vec![
        (k(e1.clone()), z.clone()),
        (k(e2.clone()), z.clone()),
        (r(rat(1)), z.clone()),
        (z.clone(), k(&e2.conj() / &sq)),
        (r(dd.recip()), k(-(&e1.conj() / &sq))),
        (k(e2.scale(&dd.recip())), r(rat(-1))),
    ]
}

pub fn standard_symplectic_module(ctx: &ModContext) -> FPairLattice {
    FPairLattice::from_generators(ctx.disc(), &standard_symplectic_generators(ctx))
}

/// Gram matrix of the symplectic pseudo-trace pairing, if integral.
pub fn pair_gram(gens: &[(PCElem, PCElem)]) -> Option<ZMat> {
    let n = gens.len();
    QMat::from_fn(n, n, |i, j| symplectic_pairing(&gens[i], &gens[j])).to_z()
}

/// I_L = L cap M for the line L = F (v1, v2).
pub fn cusp_line_lattice(v: &(PCElem, PCElem), m: &FPairLattice) -> Result<QLattice> {
    let d = m.d;
    if (v.0.x().is_zero() && v.1.x().is_zero()) || (v.0.q().is_zero() && v.1.q().is_zero()) {
        return Err(Error::DegenerateLine);
    }
    let span: Vec<Vec<Rat>> = (0..3)
        .map(|k| {
            let a = basis_vector(d, k);
            pair_coords(&(&a * &v.0, &a * &v.1))
        })
        .collect();
    let inter = intersect_subspace(&m.lat, &span);
    if inter.rank() != 3 {
        return Err(Error::DegenerateLine);
    }
    Ok(inter)
}
