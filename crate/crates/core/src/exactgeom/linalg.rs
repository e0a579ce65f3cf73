//! Dense exact linear algebra over Q.

use num_traits::{One, Zero};

use crate::num::Q;

/// Reduces `m` in place to reduced row echelon form and returns the pivot
/// columns. Zero rows are dropped.
pub fn rref(m: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        if !inv.is_one() {
            for v in m[r].iter_mut().skip(c) {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of {x : A x = 0}, one vector per non-pivot column, in RREF basis
/// form (the free coordinate equal to one, other free coordinates zero).
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &p) in m.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[p] = -row[f].clone();
                }
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incrementally maintained row space, used to pick a maximal set of
/// linearly independent rows in a fixed order.
pub struct RowSpace {
    ncols: usize,
    /// Echelon rows with their pivot column; each pivot entry is one.
    basis: Vec<(usize, Vec<Q>)>,
}

impl RowSpace {
    pub fn new(ncols: usize) -> Self {
        RowSpace {
            ncols,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ncols
    }

    /// Adds `row` if it is independent of the rows seen so far.
    pub fn insert(&mut self, row: &[Q]) -> bool {
        let mut v = row.to_vec();
        for (p, b) in &self.basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        self.basis.push((p, v));
        true
    }
}

/// Indices of a maximal linearly independent subset, chosen greedily in
/// order.
pub fn independent_rows(rows: &[Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut space = RowSpace::new(ncols);
    let mut picked = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if space.insert(r) {
            picked.push(i);
            if space.is_full() {
                break;
            }
        }
    }
    picked
}

pub fn mat_vec(a: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    a.iter().map(|row| crate::num::dot(row, x)).collect()
}

/// Affine rank of a point set: the dimension of its affine hull. The empty
/// set has rank -1 by convention, returned here as `None`.
pub fn affine_rank(points: &[Vec<Q>]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<Vec<Q>> = rest
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(&diffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| qi(x)).collect())
            .collect()
    }

    #[test]
    fn rref_small() {
        let mut a = m(&[&[2, 4, 2], &[1, 2, 3], &[3, 6, 5]]);
        let piv = rref(&mut a);
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(a, m(&[&[1, 2, 0], &[0, 0, 1]]));
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(&[&[1, 1, 0, 2], &[0, 1, 1, 1]]);
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        let b = vec![vec![q(1, 2), qi(0)], vec![qi(0), qi(3)]];
        assert_eq!(
            inverse(&b).unwrap(),
            vec![vec![qi(2), qi(0)], vec![qi(0), q(1, 3)]]
        );
    }

    #[test]
    fn affine_rank_simplex() {
        let pts = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(affine_rank(&pts), Some(2));
        assert_eq!(affine_rank(&pts[..1]), Some(0));
        assert_eq!(affine_rank(&[]), None);
    }

    #[test]
    fn independent_rows_greedy() {
        let a = m(&[&[1, 0], &[2, 0], &[1, 1], &[0, 1]]);
        assert_eq!(independent_rows(&a, 2), vec![0, 2]);
    }
}
