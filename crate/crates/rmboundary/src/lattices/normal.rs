//! Hermite and Smith normal forms with transforms.

use super::matrix::ZMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Row Hermite normal form `H = U * M` with `U` unimodular.
///
/// `H` is in upper echelon form, pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, and zero rows come last.
pub fn hnf_with_transform(m: &ZMat) -> (ZMat, ZMat) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = ZMat::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let piv = (r..rows).filter(|&i| !h[(i, c)].is_zero()).min_by_key(|&i| h[(i, c)].abs());
            let Some(p) = piv else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut clean = true;
            for i in r + 1..rows {
                if !h[(i, c)].is_zero() {
                    let q = -h[(i, c)].div_floor(&h[(r, c)]);
                    h.add_row_multiple(i, r, &q);
                    u.add_row_multiple(i, r, &q);
                    clean &= h[(i, c)].is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

pub fn hnf(m: &ZMat) -> ZMat {
    hnf_with_transform(m).0
}

/// Hermite normal form with zero rows removed.
pub fn hnf_nonzero(m: &ZMat) -> ZMat {
    let h = hnf(m);
    let rank = (0..h.rows()).take_while(|&i| !h.row(i).iter().all(Zero::is_zero)).count();
    h.submatrix(0..rank, 0..h.cols())
}

/// Smith normal form `S = U * M * V`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: ZMat,
    pub s: ZMat,
    pub v: ZMat,
}

impl Snf {
    /// Nonzero diagonal entries, each dividing the next.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

pub fn snf(m: &ZMat) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = ZMat::identity(rows);
    let mut v = ZMat::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[(i, j)].is_zero() && best.is_none_or(|(a, b)| s[(i, j)].abs() < s[(a, b)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if !s[(i, t)].is_zero() {
                    let q = -s[(i, t)].div_floor(&s[(t, t)]);
                    s.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    clean &= s[(i, t)].is_zero();
                }
            }
            for j in t + 1..cols {
                if !s[(t, j)].is_zero() {
                    let q = -s[(t, j)].div_floor(&s[(t, t)]);
                    s.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    clean &= s[(t, j)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&s[(i, j)] % &s[(t, t)]).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::from(1);
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, s, v }
}

/// Basis (rows, in Hermite form) of the integer vectors `x` with `x * M = 0`.
pub fn left_kernel(m: &ZMat) -> ZMat {
    let (h, u) = hnf_with_transform(m);
    let rank = (0..h.rows()).take_while(|&i| !h.row(i).iter().all(Zero::is_zero)).count();
    let k = u.submatrix(rank..u.rows(), 0..u.cols());
    if k.rows() == 0 {
        return k;
    }
    hnf_nonzero(&k)
}

/// Basis (rows) of the integer vectors `x` with `M * x = 0`.
pub fn right_kernel(m: &ZMat) -> ZMat {
    left_kernel(&m.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_hnf(h: &ZMat) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let row = h.row(i);
            match row.iter().position(|x| !x.is_zero()) {
                None => seen_zero = true,
                Some(p) => {
                    if seen_zero || last_pivot.is_some_and(|l| p <= l) || !h[(i, p)].is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        if h[(k, p)].is_negative() || h[(k, p)] >= h[(i, p)] {
                            return false;
                        }
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }

    #[test]
    fn snf_examples() {
        let s = snf(&ZMat::from_i64(&[vec![4, 0], vec![0, 6]]));
        assert_eq!(s.invariants(), vec![BigInt::from(2), BigInt::from(12)]);
        let i = snf(&ZMat::identity(3));
        assert_eq!(i.s, ZMat::identity(3));
        let z = snf(&ZMat::zeros(2, 3));
        assert!(z.invariants().is_empty());
    }

    #[test]
    fn kernel_example() {
        let m = ZMat::from_i64(&[vec![1, 2, 3], vec![4, 5, 6]]);
        let k = right_kernel(&m);
        assert_eq!(k.rows(), 1);
        assert_eq!(k.row(0), vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
        assert_eq!(left_kernel(&ZMat::identity(2)).rows(), 0);
    }

    fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = ZMat> {
        proptest::collection::vec(-9i64..10, r * c).prop_map(move |v| {
            ZMat::from_fn(r, c, |i, j| BigInt::from(v[i * c + j]))
        })
    }

    proptest! {
        #[test]
        fn hnf_properties(m in small_matrix(4, 3)) {
            let (h, u) = hnf_with_transform(&m);
            prop_assert!(u.is_unimodular());
            prop_assert_eq!(&u * &m, h.clone());
            prop_assert!(is_hnf(&h));
            let mut p = m.clone();
            p.swap_rows(0, 3);
            p.swap_rows(1, 2);
            prop_assert_eq!(hnf(&p), h);
        }

        #[test]
        fn snf_properties(m in small_matrix(3, 4), w in small_matrix(3, 3)) {
            let s = snf(&m);
            prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
            prop_assert_eq!(&(&s.u * &m) * &s.v, s.s.clone());
            for i in 0..3 {
                for j in 0..4 {
                    if i != j { prop_assert!(s.s[(i, j)].is_zero()); }
                }
            }
            let inv = s.invariants();
            for k in 1..inv.len() {
                prop_assert!((&inv[k] % &inv[k - 1]).is_zero());
            }
            if w.is_unimodular() {
                prop_assert_eq!(snf(&(&w * &m)).invariants(), inv);
            }
        }

        #[test]
        fn kernels_annihilate(m in small_matrix(2, 4)) {
            let k = right_kernel(&m);
            for i in 0..k.rows() {
                prop_assert!(m.mul_vec(&k.row(i)).iter().all(Zero::is_zero));
            }
            prop_assert_eq!(k.rows() + m.to_q().rank(), 4);
        }
    }
}
