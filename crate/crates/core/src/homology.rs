//! First homology of a presentation: the exponent-sum matrix, its Smith
//! normal form over the integers, and mod-p ranks.
//!
//! The Smith form is computed with `i128` entries while they fit and
//! restarts with arbitrary-precision integers on the first overflow.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::presentation::Presentation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// A dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// Relators-by-generators matrix of exponent sums.
pub type ExponentMatrix = IntMatrix;

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// # Panics
    ///
    /// Panics when the rows have different lengths.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Exponent sum of each generator in each relator.
pub fn exponent_matrix(pres: &Presentation) -> ExponentMatrix {
    let d = pres.generator_count();
    let rows: Vec<Vec<i64>> = pres.relators().iter().map(|r| r.exponent_sums(d)).collect();
    IntMatrix::from_rows(d, &rows)
}

/// Elementary divisors and free rank of `Z^cols / rowspace`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    /// Nonzero diagonal entries of the Smith form, `d1 | d2 | ...`,
    /// including any 1s.
    pub divisors: Vec<BigUint>,
    /// Free rank, i.e. the rational first betti number.
    pub rank: usize,
}

impl AbelianInvariants {
    /// Divisors greater than one.
    pub fn torsion(&self) -> Vec<BigUint> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// `dim H_1(-; F_p)`.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigUint::from(p);
        self.rank + self.divisors.iter().filter(|d| (*d % &p).is_zero()).count()
    }

    /// Order of `H_1 (x) Z/q`, i.e. `q^rank * prod gcd(d_i, q)`.
    pub fn order_mod(&self, q: u64) -> BigUint {
        let q = BigUint::from(q);
        let mut out = num_traits::pow(q.clone(), self.rank);
        for d in &self.divisors {
            out *= d.gcd(&q);
        }
        out
    }

    /// Serializable view with `p_rank` evaluated at the given primes.
    pub fn report(&self, primes: &[u64]) -> HomologyReport<'_> {
        HomologyReport { inv: self, primes: primes.to_vec() }
    }
}

pub struct HomologyReport<'a> {
    inv: &'a AbelianInvariants,
    primes: Vec<u64>,
}

impl Serialize for HomologyReport<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let divisors: Vec<serde_json::Value> = self.inv.torsion().iter().map(big_to_json).collect();
        let p_rank: BTreeMap<String, usize> =
            self.primes.iter().map(|&p| (p.to_string(), self.inv.p_rank(p))).collect();
        let mut s = serializer.serialize_struct("AbelianInvariants", 3)?;
        s.serialize_field("rank", &self.inv.rank)?;
        s.serialize_field("divisors", &divisors)?;
        s.serialize_field("p_rank", &p_rank)?;
        s.end()
    }
}

/// Integers that fit in `u64` as JSON numbers, larger ones as strings.
pub fn big_to_json(n: &BigUint) -> serde_json::Value {
    match n.to_u64() {
        Some(v) => v.into(),
        None => n.to_string().into(),
    }
}

pub fn serialize_big<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    big_to_json(n).serialize(s)
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub invariants: AbelianInvariants,
    /// `(U, V, D)` with `U * m * V = D`, present when requested.
    pub transforms: Option<(IntMatrix, IntMatrix, IntMatrix)>,
}

/// Smith normal form of `m`. Pivots are entries of least absolute value,
/// ties broken by (row, column).
pub fn smith_normal_form(m: &IntMatrix, with_transforms: bool) -> SmithForm {
    let small: Option<Vec<i128>> = m.data.iter().map(|x| x.to_i128()).collect();
    if let Some(small) = small {
        if let Some(out) = Snf::new(m.rows, m.cols, small, with_transforms).run() {
            return out.into_form();
        }
    }
    Snf::new(m.rows, m.cols, m.data.clone(), with_transforms)
        .run()
        .expect("big-integer arithmetic cannot overflow")
        .into_form()
}

/// Abelian invariants of the presented group.
pub fn abelian_invariants(pres: &Presentation) -> AbelianInvariants {
    smith_normal_form(&exponent_matrix(pres), false).invariants
}

/// Rational first betti number.
pub fn b1(pres: &Presentation) -> usize {
    abelian_invariants(pres).rank
}

/// `dim H_1(G; F_p)`, by Gaussian elimination over `F_p`.
pub fn b1_mod_p(pres: &Presentation, p: u64) -> Result<usize, HomologyError> {
    if !is_prime(p) {
        return Err(HomologyError::NotPrime(p));
    }
    let d = pres.generator_count();
    let rows: Vec<Vec<u64>> = pres
        .relators()
        .iter()
        .map(|r| r.exponent_sums(d).into_iter().map(|e| e.rem_euclid(p as i64) as u64).collect())
        .collect();
    Ok(d - rank_mod_p(rows, d, p))
}

/// Rank of a matrix over `F_p`.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> usize {
    let p128 = p as u128;
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col], p);
        for x in rows[rank].iter_mut() {
            *x = ((*x as u128 * inv as u128) % p128) as u64;
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col] == 0 {
                continue;
            }
            let f = row[col] as u128;
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = ((*x as u128 + p128 * p128 - f * y as u128) % p128) as u64;
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u64().expect("reduced mod p")
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

trait Entry: Clone + fmt::Debug {
    fn e_zero() -> Self;
    fn e_one() -> Self;
    fn e_is_zero(&self) -> bool;
    fn e_is_negative(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn quotient(&self, d: &Self) -> Self;
    fn is_multiple_of(&self, d: &Self) -> bool;
    /// `self - q * b`, `None` on overflow.
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn negate(&self) -> Option<Self>;
    fn into_big(self) -> BigInt;
}

impl Entry for i128 {
    fn e_zero() -> Self {
        0
    }
    fn e_one() -> Self {
        1
    }
    fn e_is_zero(&self) -> bool {
        *self == 0
    }
    fn e_is_negative(&self) -> bool {
        *self < 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn quotient(&self, d: &Self) -> Self {
        self / d
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        self % d == 0
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn negate(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Entry for BigInt {
    fn e_zero() -> Self {
        Zero::zero()
    }
    fn e_one() -> Self {
        One::one()
    }
    fn e_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn e_is_negative(&self) -> bool {
        self.sign() == Sign::Minus
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn quotient(&self, d: &Self) -> Self {
        self / d
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        Zero::is_zero(&(self % d))
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn negate(&self) -> Option<Self> {
        Some(-self)
    }
    fn into_big(self) -> BigInt {
        self
    }
}

struct Snf<E: Entry> {
    rows: usize,
    cols: usize,
    a: Vec<E>,
    u: Option<Vec<E>>,
    v: Option<Vec<E>>,
}

struct SnfResult<E: Entry>(Snf<E>);

impl<E: Entry> Snf<E> {
    fn new(rows: usize, cols: usize, a: Vec<E>, with_transforms: bool) -> Self {
        let ident = |n: usize| {
            let mut m = vec![E::e_zero(); n * n];
            for i in 0..n {
                m[i * n + i] = E::e_one();
            }
            m
        };
        Snf {
            rows,
            cols,
            a,
            u: with_transforms.then(|| ident(rows)),
            v: with_transforms.then(|| ident(cols)),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> &E {
        &self.a[i * self.cols + j]
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.cols {
            self.a.swap(i * self.cols + j, k * self.cols + j);
        }
        if let Some(u) = self.u.as_mut() {
            for j in 0..self.rows {
                u.swap(i * self.rows + j, k * self.rows + j);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for i in 0..self.rows {
            self.a.swap(i * self.cols + j, i * self.cols + k);
        }
        if let Some(v) = self.v.as_mut() {
            for i in 0..self.cols {
                v.swap(i * self.cols + j, i * self.cols + k);
            }
        }
    }

    /// row_i -= q * row_k
    fn row_sub(&mut self, i: usize, k: usize, q: &E, from: usize) -> Option<()> {
        for j in from..self.cols {
            let b = self.at(k, j).clone();
            if b.e_is_zero() {
                continue;
            }
            let idx = i * self.cols + j;
            self.a[idx] = self.a[idx].sub_mul(q, &b)?;
        }
        if let Some(u) = self.u.as_mut() {
            let n = self.rows;
            for j in 0..n {
                let b = u[k * n + j].clone();
                if !b.e_is_zero() {
                    u[i * n + j] = u[i * n + j].sub_mul(q, &b)?;
                }
            }
        }
        Some(())
    }

    /// col_j -= q * col_k
    fn col_sub(&mut self, j: usize, k: usize, q: &E, from: usize) -> Option<()> {
        for i in from..self.rows {
            let b = self.at(i, k).clone();
            if b.e_is_zero() {
                continue;
            }
            let idx = i * self.cols + j;
            self.a[idx] = self.a[idx].sub_mul(q, &b)?;
        }
        if let Some(v) = self.v.as_mut() {
            let n = self.cols;
            for i in 0..n {
                let b = v[i * n + k].clone();
                if !b.e_is_zero() {
                    v[i * n + j] = v[i * n + j].sub_mul(q, &b)?;
                }
            }
        }
        Some(())
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = self.at(i, j);
                if x.e_is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !x.abs_lt(self.at(bi, bj)) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn run(mut self) -> Option<SnfResult<E>> {
        let steps = self.rows.min(self.cols);
        for t in 0..steps {
            let Some((pi, pj)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let pivot = self.at(t, t).clone();
                let mut clean = true;
                for i in t + 1..self.rows {
                    if self.at(i, t).e_is_zero() {
                        continue;
                    }
                    let q = self.at(i, t).quotient(&pivot);
                    self.row_sub(i, t, &q, t)?;
                    clean &= self.at(i, t).e_is_zero();
                }
                for j in t + 1..self.cols {
                    if self.at(t, j).e_is_zero() {
                        continue;
                    }
                    let q = self.at(t, j).quotient(&pivot);
                    self.col_sub(j, t, &q, t)?;
                    clean &= self.at(t, j).e_is_zero();
                }
                if !clean {
                    let (pi, pj) = self.find_pivot(t).expect("nonzero remainder exists");
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                let bad = (t + 1..self.rows)
                    .find(|&i| (t + 1..self.cols).any(|j| !self.at(i, j).is_multiple_of(&pivot)));
                match bad {
                    Some(i) => {
                        // row_t += row_i, then re-eliminate
                        let minus_one = E::e_one().negate()?;
                        self.row_sub(t, i, &minus_one, t)?;
                    }
                    None => break,
                }
            }
            if self.at(t, t).e_is_negative() {
                for j in t..self.cols {
                    let idx = t * self.cols + j;
                    self.a[idx] = self.a[idx].negate()?;
                }
                if let Some(u) = self.u.as_mut() {
                    let n = self.rows;
                    for j in 0..n {
                        u[t * n + j] = u[t * n + j].negate()?;
                    }
                }
            }
        }
        Some(SnfResult(self))
    }
}

impl<E: Entry> SnfResult<E> {
    fn into_form(self) -> SmithForm {
        let s = self.0;
        let steps = s.rows.min(s.cols);
        let mut divisors = Vec::new();
        for t in 0..steps {
            let x = s.at(t, t).clone().into_big();
            if x.e_is_zero() {
                break;
            }
            divisors.push(x.to_biguint().expect("pivots are made positive"));
        }
        let rank = s.cols - divisors.len();
        let to_matrix = |rows: usize, cols: usize, data: Vec<E>| IntMatrix {
            rows,
            cols,
            data: data.into_iter().map(Entry::into_big).collect(),
        };
        let transforms = match (s.u, s.v) {
            (Some(u), Some(v)) => Some((
                to_matrix(s.rows, s.rows, u),
                to_matrix(s.cols, s.cols, v),
                to_matrix(s.rows, s.cols, s.a),
            )),
            _ => None,
        };
        SmithForm { invariants: AbelianInvariants { divisors, rank }, transforms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn m(cols: usize, rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn divs(inv: &AbelianInvariants) -> Vec<u64> {
        inv.divisors.iter().map(|d| d.to_u64().unwrap()).collect()
    }

    #[test]
    fn exponent_matrices() {
        let p = parse_presentation("<x,y|[x,y]>").unwrap();
        assert_eq!(exponent_matrix(&p), m(2, &[&[0, 0]]));
        let p = parse_presentation("<x|x^5>").unwrap();
        assert_eq!(exponent_matrix(&p), m(1, &[&[5]]));
        let p = parse_presentation("<a,b|a^2,b^2,(a b)^3>").unwrap();
        assert_eq!(exponent_matrix(&p), m(2, &[&[2, 0], &[0, 2], &[3, 3]]));
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&m(2, &[&[2, 4], &[6, 8]]), false).invariants;
        assert_eq!((divs(&s), s.rank), (vec![2, 4], 0));
        let s = smith_normal_form(&m(2, &[&[0, 0]]), false).invariants;
        assert_eq!((divs(&s), s.rank), (vec![], 2));
        let s = smith_normal_form(&IntMatrix::identity(3), false).invariants;
        assert_eq!((divs(&s), s.rank), (vec![1, 1, 1], 0));
        assert!(s.torsion().is_empty());
    }

    #[test]
    fn b1_examples() {
        let b = |s: &str| b1(&parse_presentation(s).unwrap());
        assert_eq!(b("<x,y|[x,y]>"), 2);
        assert_eq!(b("<x|x^7>"), 0);
        assert_eq!(b("<x,y|>"), 2);
    }

    #[test]
    fn b1_mod_p_examples() {
        let bp = |s: &str, p| b1_mod_p(&parse_presentation(s).unwrap(), p).unwrap();
        assert_eq!(bp("<x,y|>", 2), 2);
        assert_eq!(bp("<x|x^4>", 2), 1);
        assert_eq!(bp("<x|x^4>", 3), 0);
        assert_eq!(bp("<a,b|a^2,b^2,(a b)^3>", 2), 1);
        assert_eq!(bp("<a,b|a^2,b^2,(a b)^3>", 3), 0);
        let err = b1_mod_p(&parse_presentation("<x|>").unwrap(), 4).unwrap_err();
        assert_eq!(err, HomologyError::NotPrime(4));
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        // Entries near the i128 limit force the big-integer path.
        let big = i128::MAX / 3;
        let rows = vec![
            vec![BigInt::from(big), BigInt::from(big - 1)],
            vec![BigInt::from(big - 7), BigInt::from(big)],
        ];
        let mat = IntMatrix::from_rows(2, &rows);
        let s = smith_normal_form(&mat, true);
        let (u, v, d) = s.transforms.unwrap();
        assert_eq!(u.mul(&mat).mul(&v), d);
        assert!(d.is_diagonal());
        let det = BigInt::from(big) * BigInt::from(big) - BigInt::from(big - 1) * BigInt::from(big - 7);
        let prod: BigUint = s.invariants.divisors.iter().product();
        assert_eq!(BigInt::from(prod), det.abs());
    }

    #[test]
    fn order_mod_counts_quotient() {
        let inv = abelian_invariants(&parse_presentation("<x,y,z|x^4, y^6>").unwrap());
        // Z/4 x Z/6 x Z tensored with Z/8 has order 4 * 2 * 8.
        assert_eq!(inv.order_mod(8), BigUint::from(64u32));
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-5i64..=5, c), r)
        })
    }

    proptest! {
        #[test]
        fn transforms_diagonalize(rows in arb_matrix()) {
            let mat = IntMatrix::from_rows(rows[0].len(), &rows);
            let s = smith_normal_form(&mat, true);
            let (u, v, d) = s.transforms.unwrap();
            prop_assert_eq!(u.mul(&mat).mul(&v), d.clone());
            prop_assert!(d.is_diagonal());
            for w in s.invariants.divisors.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }

        #[test]
        fn invariant_under_permutation_and_sign(rows in arb_matrix(), seed in any::<u64>()) {
            let base = smith_normal_form(&IntMatrix::from_rows(rows[0].len(), &rows), false).invariants;
            let mut shuffled = rows.clone();
            let n = shuffled.len();
            shuffled.rotate_left((seed as usize) % n);
            for (i, row) in shuffled.iter_mut().enumerate() {
                if (seed >> i) & 1 == 1 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                let c = row.len();
                row.rotate_right((seed as usize >> 8) % c);
            }
            let other = smith_normal_form(&IntMatrix::from_rows(shuffled[0].len(), &shuffled), false).invariants;
            prop_assert_eq!(base, other);
        }

        #[test]
        fn p_rank_agrees_with_mod_p_elimination(rows in arb_matrix(), pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let cols = rows[0].len();
            let inv = smith_normal_form(&IntMatrix::from_rows(cols, &rows), false).invariants;
            let reduced: Vec<Vec<u64>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
                .collect();
            prop_assert_eq!(inv.p_rank(p), cols - rank_mod_p(reduced, cols, p));
            prop_assert!(inv.p_rank(p) >= inv.rank);
        }
    }
}
