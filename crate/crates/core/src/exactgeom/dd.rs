//! Double description method for the extreme rays of a pointed cone
//! {y : A y ≥ 0} with integer A.
//!
//! Rays are kept as primitive integer vectors. Arithmetic runs on checked
//! `i64` first and is restarted on `BigInt` if any intermediate overflows.
//! Adjacency is decided combinatorially from zero sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::linalg::RowSpace;
use super::Budget;
use crate::error::{Error, Result};
use crate::num::{primitive_integer, Q};

pub(crate) trait DdInt: Clone + Sized + Send + Sync {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn signum(&self) -> i8;
    /// a·x − b·y
    fn comb(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn dot(row: &[Self], v: &[Self]) -> Option<Self>;
    fn make_primitive(v: &mut [Self]);
}

impl DdInt for i64 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn signum(&self) -> i8 {
        i64::signum(*self) as i8
    }
    fn comb(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn dot(row: &[Self], v: &[Self]) -> Option<Self> {
        let mut acc: i64 = 0;
        for (a, b) in row.iter().zip(v) {
            if *a != 0 && *b != 0 {
                acc = acc.checked_add(a.checked_mul(*b)?)?;
            }
        }
        Some(acc)
    }
    fn make_primitive(v: &mut [Self]) {
        let g = v.iter().fold(0i64, |g, x| g.gcd(x));
        if g > 1 {
            v.iter_mut().for_each(|x| *x /= g);
        }
    }
}

impl DdInt for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn signum(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn comb(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn dot(row: &[Self], v: &[Self]) -> Option<Self> {
        let mut acc = BigInt::zero();
        for (a, b) in row.iter().zip(v) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        Some(acc)
    }
    fn make_primitive(v: &mut [Self]) {
        let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g > BigInt::from(1) {
            v.iter_mut().for_each(|x| *x = &*x / &g);
        }
    }
}

/// Fixed-width bitset over constraint indices.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn and_count(&self, o: &Bits) -> usize {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray<T> {
    v: Vec<T>,
    zeros: Bits,
}

/// Overflow in the `i64` pass.
struct Overflow;

/// Extreme rays of {y : rows·y ≥ 0} in `n` dimensions, as primitive integer
/// vectors sorted lexicographically. Returns `Unbounded` (used by callers
/// as "not pointed") when the rows have rank below `n`.
pub(crate) fn extreme_rays(
    rows: &[Vec<BigInt>],
    n: usize,
    budget: &Budget,
    stage: &'static str,
) -> Result<Vec<Vec<BigInt>>> {
    let order = initial_order(rows, n)?;
    let small: Option<Vec<Vec<i64>>> = rows
        .iter()
        .map(|r| r.iter().map(i64::from_big).collect())
        .collect();
    if let Some(small) = small {
        match run::<i64>(&small, rows, &order, n, budget, stage) {
            Ok(r) => return r,
            Err(Overflow) => {}
        }
    }
    match run::<BigInt>(rows, rows, &order, n, budget, stage) {
        Ok(r) => r,
        Err(Overflow) => unreachable!("BigInt arithmetic cannot overflow"),
    }
}

/// Initial basis rows first, then the rest in index order.
fn initial_order(rows: &[Vec<BigInt>], n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut space = RowSpace::new(n);
    let mut basis = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        let q: Vec<Q> = r.iter().map(|x| Q::from_integer(x.clone())).collect();
        if space.insert(&q) {
            basis.push(i);
            if space.is_full() {
                break;
            }
        }
    }
    if basis.len() < n {
        return Err(Error::Unbounded);
    }
    let rest = (0..rows.len()).filter(|i| !basis.contains(i)).collect();
    Ok((basis, rest))
}

fn run<T: DdInt>(
    rows: &[Vec<T>],
    big_rows: &[Vec<BigInt>],
    (basis, rest): &(Vec<usize>, Vec<usize>),
    n: usize,
    budget: &Budget,
    stage: &'static str,
) -> std::result::Result<Result<Vec<Vec<BigInt>>>, Overflow> {
    let m = rows.len();
    // Columns of the inverse of the basis rows span the simplicial cone.
    let b: Vec<Vec<Q>> = basis
        .iter()
        .map(|&i| {
            big_rows[i]
                .iter()
                .map(|x| Q::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let inv = super::linalg::inverse(&b).expect("basis rows are independent");
    let mut rays: Vec<Ray<T>> = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<Q> = inv.iter().map(|r| r[j].clone()).collect();
        let v: Option<Vec<T>> = primitive_integer(&col).iter().map(T::from_big).collect();
        let v = v.ok_or(Overflow)?;
        let mut zeros = Bits::new(m);
        for (k, &i) in basis.iter().enumerate() {
            if k != j {
                zeros.set(i);
            }
        }
        rays.push(Ray { v, zeros });
    }

    for (step, &h) in rest.iter().enumerate() {
        let row = &rows[h];
        if row.iter().all(|x| x.signum() == 0) {
            continue;
        }
        let mut vals = Vec::with_capacity(rays.len());
        for r in &rays {
            vals.push(T::dot(row, &r.v).ok_or(Overflow)?);
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].signum() > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].signum() < 0).collect();
        if neg.is_empty() {
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i].signum() == 0 {
                    r.zeros.set(h);
                }
            }
            continue;
        }

        let mut fresh: Vec<Ray<T>> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                if rays[p].zeros.and_count(&rays[q].zeros) + 2 < n {
                    continue;
                }
                let common = rays[p].zeros.and(&rays[q].zeros);
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != q && common.is_subset(&r.zeros));
                if blocked {
                    continue;
                }
                let mut v = Vec::with_capacity(n);
                for (a, b) in rays[q].v.iter().zip(&rays[p].v) {
                    v.push(T::comb(&vals[p], a, &vals[q], b).ok_or(Overflow)?);
                }
                T::make_primitive(&mut v);
                let mut zeros = common;
                zeros.set(h);
                fresh.push(Ray { v, zeros });
            }
        }

        let mut next: Vec<Ray<T>> = Vec::with_capacity(pos.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            match vals[i].signum() {
                1 => next.push(r),
                0 => {
                    r.zeros.set(h);
                    next.push(r);
                }
                _ => {}
            }
        }
        next.extend(fresh);
        rays = next;
        if let Some(limit) = budget.max_rays {
            if rays.len() > limit {
                return Ok(Err(Error::BudgetExceeded {
                    stage,
                    limit,
                    done: step + basis.len(),
                }));
            }
        }
    }

    let mut out: Vec<Vec<BigInt>> = rays
        .into_iter()
        .map(|r| r.v.iter().map(T::to_big).collect())
        .collect();
    out.sort();
    Ok(Ok(out))
}
