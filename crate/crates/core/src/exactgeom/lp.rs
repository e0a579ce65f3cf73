//! Exact revised simplex for convex-hull membership.
//!
//! Decides whether p ∈ conv(V) by Phase I on
//! `Σ_j λ_j v_j = p, Σ_j λ_j = 1, λ ≥ 0`. A zero optimum yields convex
//! weights; a positive optimum yields Farkas multipliers that are turned
//! into a separating inequality.

use num_traits::{One, Signed, Zero};

use super::{AffineFunctional, Budget, MembershipCertificate};
use crate::error::{Error, Result};
use crate::num::{primitive_integer, Q};

/// Consecutive degenerate pivots after which pricing switches from the
/// most negative reduced cost to Bland's rule.
const DEGENERATE_SWITCH: usize = 50;

struct Column {
    entries: Vec<(usize, Q)>,
}

pub(crate) fn membership<V: AsRef<[Q]>>(
    vertices: &[V],
    p: &[Q],
    budget: &Budget,
) -> Result<MembershipCertificate> {
    let d = p.len();
    if vertices.iter().any(|v| v.as_ref().len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: vertices
                .iter()
                .map(|v| v.as_ref().len())
                .find(|&l| l != d)
                .unwrap_or(d),
        });
    }
    if vertices.is_empty() {
        // Every point is separated from the empty set by 0 ≤ -1.
        return Ok(MembershipCertificate::Outside {
            separator: AffineFunctional::new(vec![Q::zero(); d], -Q::one()),
        });
    }
    let r = d + 1;
    // Row signs make the right-hand side nonnegative.
    let mut rhs: Vec<Q> = p.to_vec();
    rhs.push(Q::one());
    let sign: Vec<bool> = rhs.iter().map(|x| x.is_negative()).collect();
    for (x, &s) in rhs.iter_mut().zip(&sign) {
        if s {
            *x = -x.clone();
        }
    }
    let cols: Vec<Column> = vertices
        .iter()
        .map(|v| {
            let mut entries: Vec<(usize, Q)> = v
                .as_ref()
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, if sign[i] { -x } else { x.clone() }))
                .collect();
            entries.push((d, if sign[d] { -Q::one() } else { Q::one() }));
            Column { entries }
        })
        .collect();
    let m = cols.len();

    // Basis variables: j < m are λ_j, m + k is the artificial of row k.
    let mut basis: Vec<usize> = (m..m + r).collect();
    let mut binv: Vec<Vec<Q>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect();
    let mut xb = rhs.clone();
    let mut pivots = 0usize;
    let mut degenerate = 0usize;

    loop {
        // Duals y = c_B B^{-1}, with cost 1 on artificials.
        let mut y = vec![Q::zero(); r];
        for (row, &bv) in basis.iter().enumerate() {
            if bv >= m {
                for (yk, b) in y.iter_mut().zip(&binv[row]) {
                    if !b.is_zero() {
                        *yk += b;
                    }
                }
            }
        }
        let reduced = |j: usize| -> Q {
            if j < m {
                -cols[j]
                    .entries
                    .iter()
                    .fold(Q::zero(), |acc, (i, a)| acc + &y[*i] * a)
            } else {
                Q::one() - &y[j - m]
            }
        };
        let bland = degenerate >= DEGENERATE_SWITCH;
        let mut entering: Option<(usize, Q)> = None;
        let in_basis = {
            let mut f = vec![false; m + r];
            for &b in &basis {
                f[b] = true;
            }
            f
        };
        for j in 0..m + r {
            if in_basis[j] {
                continue;
            }
            let rc = reduced(j);
            if rc.is_negative() {
                if bland {
                    entering = Some((j, rc));
                    break;
                }
                if entering.as_ref().is_none_or(|(_, best)| rc < *best) {
                    entering = Some((j, rc));
                }
            }
        }

        let Some((e, _)) = entering else {
            let obj: Q = basis
                .iter()
                .zip(&xb)
                .filter(|(b, _)| **b >= m)
                .fold(Q::zero(), |acc, (_, x)| acc + x);
            if obj.is_zero() {
                let mut weights: Vec<(usize, Q)> = basis
                    .iter()
                    .zip(&xb)
                    .filter(|(b, x)| **b < m && !x.is_zero())
                    .map(|(b, x)| (*b, x.clone()))
                    .collect();
                weights.sort_by_key(|w| w.0);
                return Ok(MembershipCertificate::Inside { weights });
            }
            // Undo the row signs: z·[v;1] ≤ 0 on every vertex, z·[p;1] > 0.
            let z: Vec<Q> = y
                .iter()
                .zip(&sign)
                .map(|(v, &s)| if s { -v.clone() } else { v.clone() })
                .collect();
            let scaled: Vec<Q> = primitive_integer(&z)
                .into_iter()
                .map(Q::from_integer)
                .collect();
            let bound = -scaled[d].clone();
            let coeffs = scaled[..d].to_vec();
            return Ok(MembershipCertificate::Outside {
                separator: AffineFunctional::new(coeffs, bound),
            });
        };

        // Entering column in the current basis: u = B^{-1} a_e.
        let u: Vec<Q> = if e < m {
            binv.iter()
                .map(|row| {
                    cols[e]
                        .entries
                        .iter()
                        .fold(Q::zero(), |acc, (i, a)| acc + &row[*i] * a)
                })
                .collect()
        } else {
            binv.iter().map(|row| row[e - m].clone()).collect()
        };
        // Ratio test, ties broken by smallest basis index.
        let mut leave: Option<(usize, Q)> = None;
        for (i, ui) in u.iter().enumerate() {
            if !ui.is_positive() {
                continue;
            }
            let ratio = &xb[i] / ui;
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (l, theta) = leave.expect("Phase I objective is bounded below");
        if theta.is_zero() {
            degenerate += 1;
        } else {
            degenerate = 0;
        }

        let piv = u[l].clone();
        for v in binv[l].iter_mut() {
            *v /= &piv;
        }
        xb[l] /= &piv;
        let prow = binv[l].clone();
        let px = xb[l].clone();
        for i in 0..r {
            if i == l || u[i].is_zero() {
                continue;
            }
            let f = &u[i];
            for (v, pv) in binv[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= f * pv;
                }
            }
            xb[i] -= f * &px;
        }
        basis[l] = e;

        pivots += 1;
        if let Some(limit) = budget.max_pivots {
            if pivots >= limit {
                return Err(Error::BudgetExceeded {
                    stage: "lp",
                    limit,
                    done: pivots,
                });
            }
        }
    }
}
