//! Exact polyhedral kernels: convex-hull membership with certificates,
//! vertex enumeration from inequalities, facet enumeration from vertices
//! and affine rank.

mod dd;
pub mod linalg;
mod lp;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{dot, fmt_q, primitive_integer, Q};

pub use linalg::affine_rank;

/// Work caps for the enumeration and LP kernels. `None` is unlimited.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest intermediate ray set allowed in double description.
    pub max_rays: Option<usize>,
    /// Simplex pivots per LP.
    pub max_pivots: Option<usize>,
    /// Candidate bases tried by [`vertices_by_bases`].
    pub max_bases: Option<usize>,
    /// Size cap for vertex sets generated by counting (E and Bell).
    pub max_vertices: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn rays(n: usize) -> Self {
        Budget {
            max_rays: Some(n),
            ..Self::default()
        }
    }
}

/// The inequality `coeffs · x ≤ bound`, or the equality `coeffs · x = bound`
/// inside [`HRep::equalities`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineFunctional {
    pub coeffs: Vec<Q>,
    pub bound: Q,
}

impl fmt::Debug for AffineFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(fmt_q).collect();
        write!(f, "[{}] <= {}", c.join(" "), fmt_q(&self.bound))
    }
}

impl AffineFunctional {
    pub fn new(coeffs: Vec<Q>, bound: Q) -> Self {
        AffineFunctional { coeffs, bound }
    }

    pub fn value(&self, x: &[Q]) -> Q {
        dot(&self.coeffs, x)
    }

    /// `bound − coeffs·x`; nonnegative exactly when satisfied.
    pub fn slack(&self, x: &[Q]) -> Q {
        &self.bound - self.value(x)
    }

    pub fn is_satisfied(&self, x: &[Q]) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn is_tight(&self, x: &[Q]) -> bool {
        self.slack(x).is_zero()
    }

    /// Scales to integer coefficients with gcd one, keeping the direction.
    pub fn normalized(&self) -> Self {
        let mut all = self.coeffs.clone();
        all.push(self.bound.clone());
        let ints = primitive_integer(&all);
        let mut it: Vec<Q> = ints.into_iter().map(Q::from_integer).collect();
        let bound = it.pop().unwrap();
        AffineFunctional { coeffs: it, bound }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

/// {x : E x = e, A x ≤ b}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    pub dim: usize,
    pub equalities: Vec<AffineFunctional>,
    pub inequalities: Vec<AffineFunctional>,
}

impl HRep {
    pub fn contains(&self, x: &[Q]) -> bool {
        x.len() == self.dim
            && self.equalities.iter().all(|e| e.is_tight(x))
            && self.inequalities.iter().all(|h| h.is_satisfied(x))
    }
}

/// A finite point set standing for its convex hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    pub dim: usize,
    pub vertices: Vec<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipCertificate {
    /// Convex weights `(vertex index, λ)` with positive λ summing to one.
    Inside { weights: Vec<(usize, Q)> },
    /// Valid for every vertex and violated by the query point.
    Outside { separator: AffineFunctional },
}

impl MembershipCertificate {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipCertificate::Inside { .. })
    }

    /// Exact re-check against the vertex list and query point.
    pub fn verify<V: AsRef<[Q]>>(&self, vertices: &[V], p: &[Q]) -> Result<()> {
        match self {
            MembershipCertificate::Inside { weights } => {
                let mut acc = vec![Q::zero(); p.len()];
                let mut total = Q::zero();
                for (j, w) in weights {
                    let v = vertices.get(*j).ok_or_else(|| {
                        Error::Verification(format!("vertex index {j} out of range"))
                    })?;
                    if !w.is_positive() {
                        return Err(Error::Verification("nonpositive weight".into()));
                    }
                    total += w;
                    for (a, x) in acc.iter_mut().zip(v.as_ref()) {
                        if !x.is_zero() {
                            *a += w * x;
                        }
                    }
                }
                if !total.is_one() {
                    return Err(Error::Verification("weights do not sum to one".into()));
                }
                if acc != p {
                    return Err(Error::Verification(
                        "weighted sum differs from the point".into(),
                    ));
                }
                Ok(())
            }
            MembershipCertificate::Outside { separator } => {
                if let Some(j) = vertices
                    .iter()
                    .position(|v| !separator.is_satisfied(v.as_ref()))
                {
                    return Err(Error::Verification(format!(
                        "separator violated by vertex {j}"
                    )));
                }
                if separator.is_satisfied(p) {
                    return Err(Error::Verification(
                        "separator does not cut off the point".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Decides p ∈ conv(vertices) exactly. The certificate is verified before
/// it is returned.
pub fn lp_membership<V: AsRef<[Q]>>(
    vertices: &[V],
    p: &[Q],
    budget: &Budget,
) -> Result<MembershipCertificate> {
    let cert = lp::membership(vertices, p, budget)?;
    cert.verify(vertices, p)?;
    Ok(cert)
}

/// The equality system of an `HRep` solved once: x = base + Σ_k t_k dirs[k].
struct Param {
    base: Vec<Q>,
    dirs: Vec<Vec<Q>>,
}

fn parametrize(h: &HRep) -> Result<Param> {
    let d = h.dim;
    let mut m: Vec<Vec<Q>> = h
        .equalities
        .iter()
        .map(|e| {
            let mut r = e.coeffs.clone();
            r.push(e.bound.clone());
            r
        })
        .collect();
    let pivots = linalg::rref(&mut m);
    if pivots.last() == Some(&d) {
        return Err(Error::Infeasible);
    }
    let mut base = vec![Q::zero(); d];
    for (row, &p) in m.iter().zip(&pivots) {
        base[p] = row[d].clone();
    }
    let mut is_pivot = vec![false; d];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let dirs = (0..d)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Q::zero(); d];
            v[f] = Q::one();
            for (row, &p) in m.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[p] = -row[f].clone();
                }
            }
            v
        })
        .collect();
    Ok(Param { base, dirs })
}

/// Inequality rows on the homogenised parameter cone (y0, t) ≥ 0-form:
/// `(b − a·base) y0 − Σ_k (a·dir_k) t_k ≥ 0`, then `y0 ≥ 0`.
fn cone_rows(h: &HRep, par: &Param) -> Vec<Vec<BigInt>> {
    let k = par.dirs.len();
    let mut rows: Vec<Vec<BigInt>> = h
        .inequalities
        .iter()
        .map(|a| {
            let mut r = Vec::with_capacity(k + 1);
            r.push(a.slack(&par.base));
            r.extend(par.dirs.iter().map(|dir| -a.value(dir)));
            primitive_integer(&r)
        })
        .collect();
    let mut y0 = vec![BigInt::zero(); k + 1];
    y0[0] = BigInt::one();
    rows.push(y0);
    rows
}

fn point_from_ray(par: &Param, t: &[Q]) -> Vec<Q> {
    let mut x = par.base.clone();
    for (tk, dir) in t.iter().zip(&par.dirs) {
        if tk.is_zero() {
            continue;
        }
        for (xi, di) in x.iter_mut().zip(dir) {
            if !di.is_zero() {
                *xi += tk * di;
            }
        }
    }
    x
}

/// Vertices of a polytope given by equalities and inequalities, sorted
/// lexicographically. Uses double description on the homogenised cone
/// over the solution space of the equalities.
pub fn vertices_from_hrep(h: &HRep, budget: &Budget) -> Result<VRep> {
    check_dims(h)?;
    let par = parametrize(h)?;
    let k = par.dirs.len();
    let rows = cone_rows(h, &par);
    let rays = dd::extreme_rays(&rows, k + 1, budget, "vertices")?;
    let mut vertices = Vec::with_capacity(rays.len());
    for ray in rays {
        if ray[0].is_zero() {
            return Err(Error::Unbounded);
        }
        let y0 = Q::from_integer(ray[0].clone());
        let t: Vec<Q> = ray[1..]
            .iter()
            .map(|x| Q::from_integer(x.clone()) / &y0)
            .collect();
        vertices.push(point_from_ray(&par, &t));
    }
    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    vertices.sort();
    Ok(VRep {
        dim: h.dim,
        vertices,
    })
}

fn check_dims(h: &HRep) -> Result<()> {
    for f in h.equalities.iter().chain(&h.inequalities) {
        if f.dim() != h.dim {
            return Err(Error::DimensionMismatch {
                expected: h.dim,
                got: f.dim(),
            });
        }
    }
    Ok(())
}

/// Reference vertex enumeration by trying every set of `k` inequalities as
/// the tight set, where `k` is the dimension of the equality solution space.
/// Exponential; intended for small instances and cross-checks.
pub fn vertices_by_bases(h: &HRep, budget: &Budget) -> Result<VRep> {
    check_dims(h)?;
    let par = parametrize(h)?;
    let k = par.dirs.len();
    // Rows on t only: (a·dir) t ≤ b − a·base.
    let lhs: Vec<Vec<Q>> = h
        .inequalities
        .iter()
        .map(|a| par.dirs.iter().map(|dir| a.value(dir)).collect())
        .collect();
    let rhs: Vec<Q> = h.inequalities.iter().map(|a| a.slack(&par.base)).collect();
    let m = lhs.len();
    if k == 0 {
        return if rhs.iter().all(|x| !x.is_negative()) {
            Ok(VRep {
                dim: h.dim,
                vertices: vec![par.base],
            })
        } else {
            Err(Error::Infeasible)
        };
    }
    if m < k {
        return Err(Error::Unbounded);
    }
    let mut found: Vec<Vec<Q>> = Vec::new();
    let mut tried = 0usize;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        tried += 1;
        if let Some(limit) = budget.max_bases {
            if tried > limit {
                return Err(Error::BudgetExceeded {
                    stage: "bases",
                    limit,
                    done: tried - 1,
                });
            }
        }
        let sub: Vec<Vec<Q>> = idx.iter().map(|&i| lhs[i].clone()).collect();
        if let Some(inv) = linalg::inverse(&sub) {
            let b: Vec<Q> = idx.iter().map(|&i| rhs[i].clone()).collect();
            let t = linalg::mat_vec(&inv, &b);
            if lhs.iter().zip(&rhs).all(|(row, r)| dot(row, &t) <= *r) {
                found.push(point_from_ray(&par, &t));
            }
        }
        // Next k-subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                found.sort();
                found.dedup();
                if found.is_empty() {
                    return Err(Error::Infeasible);
                }
                return Ok(VRep {
                    dim: h.dim,
                    vertices: found,
                });
            }
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Equalities describing the affine hull of a point set, in reduced
/// echelon form, integer with gcd one and first nonzero coefficient
/// positive.
pub fn affine_hull(points: &[Vec<Q>]) -> Result<Vec<AffineFunctional>> {
    let d = points
        .first()
        .ok_or_else(|| Error::validation("empty point set"))?
        .len();
    // (c, c0) with c·v + c0 = 0 for all v.
    let rows: Vec<Vec<Q>> = points
        .iter()
        .map(|v| {
            let mut r = v.clone();
            r.push(Q::one());
            r
        })
        .collect();
    let mut ns = linalg::nullspace(&rows, d + 1);
    linalg::rref(&mut ns);
    Ok(ns
        .into_iter()
        .map(|v| {
            let ints = primitive_integer(&v);
            let mut q: Vec<Q> = ints.into_iter().map(Q::from_integer).collect();
            if q.iter()
                .find(|x| !x.is_zero())
                .is_some_and(|x| x.is_negative())
            {
                q.iter_mut().for_each(|x| *x = -x.clone());
            }
            let c0 = q.pop().unwrap();
            AffineFunctional::new(q, -c0)
        })
        .collect())
}

/// Facet description of conv(points): the affine-hull equalities and one
/// inequality per facet.
///
/// Facet inequalities are written in the coordinates that parametrise the
/// hull (the pivot columns of the reduced difference matrix), so each
/// facet has a unique representative: integer coefficients with gcd one,
/// supported on those coordinates. Sorted.
pub fn facets_from_vrep(v: &VRep, budget: &Budget) -> Result<HRep> {
    if v.vertices.is_empty() {
        return Err(Error::validation("empty vertex set"));
    }
    let first = &v.vertices[0];
    let mut diffs: Vec<Vec<Q>> = v.vertices[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    let pivots = linalg::rref(&mut diffs);
    let k = pivots.len();
    let equalities = affine_hull(&v.vertices)?;
    if k == 0 {
        return Ok(HRep {
            dim: v.dim,
            equalities,
            inequalities: vec![],
        });
    }
    // Cone {(c0, c) : c0 + c·t_j ≥ 0} where t_j = vertex j on the pivots.
    let rows: Vec<Vec<BigInt>> = v
        .vertices
        .iter()
        .map(|p| {
            let mut r = Vec::with_capacity(k + 1);
            r.push(Q::one());
            r.extend(pivots.iter().map(|&c| p[c].clone()));
            primitive_integer(&r)
        })
        .collect();
    let rays = dd::extreme_rays(&rows, k + 1, budget, "facets")?;
    let mut inequalities: Vec<AffineFunctional> = rays
        .into_iter()
        .map(|ray| {
            let mut coeffs = vec![Q::zero(); v.dim];
            for (&c, x) in pivots.iter().zip(&ray[1..]) {
                coeffs[c] = -Q::from_integer(x.clone());
            }
            AffineFunctional::new(coeffs, Q::from_integer(ray[0].clone()))
        })
        .collect();
    inequalities.sort();
    Ok(HRep {
        dim: v.dim,
        equalities,
        inequalities,
    })
}

/// Indices of the vertices on which `f` is tight.
pub fn tight_set(f: &AffineFunctional, vertices: &[Vec<Q>]) -> Vec<usize> {
    (0..vertices.len())
        .filter(|&j| f.is_tight(&vertices[j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};
    use proptest::prelude::*;

    fn af(c: &[i64], b: i64) -> AffineFunctional {
        AffineFunctional::new(c.iter().map(|&x| qi(x)).collect(), qi(b))
    }

    fn pts(m: &[&[i64]]) -> Vec<Vec<Q>> {
        m.iter()
            .map(|r| r.iter().map(|&x| qi(x)).collect())
            .collect()
    }

    /// Standard simplex in R^3 written with the equality x+y+z = 1.
    fn simplex() -> HRep {
        HRep {
            dim: 3,
            equalities: vec![af(&[1, 1, 1], 1)],
            inequalities: vec![af(&[-1, 0, 0], 0), af(&[0, -1, 0], 0), af(&[0, 0, -1], 0)],
        }
    }

    #[test]
    fn simplex_vertices_both_ways() {
        let expect = pts(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert_eq!(
            vertices_from_hrep(&simplex(), &Budget::default())
                .unwrap()
                .vertices,
            expect
        );
        assert_eq!(
            vertices_by_bases(&simplex(), &Budget::default())
                .unwrap()
                .vertices,
            expect
        );
    }

    #[test]
    fn simplex_facets() {
        let v = VRep {
            dim: 3,
            vertices: pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        };
        let h = facets_from_vrep(&v, &Budget::default()).unwrap();
        assert_eq!(h.equalities, vec![af(&[1, 1, 1], 1)]);
        assert_eq!(h.inequalities.len(), 3);
        for f in &h.inequalities {
            assert_eq!(tight_set(f, &v.vertices).len(), 2);
        }
    }

    #[test]
    fn unbounded_and_infeasible() {
        let h = HRep {
            dim: 1,
            equalities: vec![],
            inequalities: vec![af(&[-1], 0)],
        };
        assert!(matches!(
            vertices_from_hrep(&h, &Budget::default()),
            Err(Error::Unbounded)
        ));
        let h = HRep {
            dim: 1,
            equalities: vec![af(&[1], 0), af(&[1], 1)],
            inequalities: vec![],
        };
        assert_eq!(
            vertices_from_hrep(&h, &Budget::default()),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn membership_square() {
        let sq = pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let inside = lp_membership(&sq, &[q(1, 2), q(1, 3)], &Budget::default()).unwrap();
        assert!(inside.is_inside());
        let out = lp_membership(&sq, &[qi(2), q(1, 2)], &Budget::default()).unwrap();
        let MembershipCertificate::Outside { separator } = out else {
            panic!()
        };
        assert!(!separator.is_satisfied(&[qi(2), q(1, 2)]));
        // Negative coordinates exercise the row sign flip.
        let out = lp_membership(&sq, &[qi(-1), qi(-1)], &Budget::default()).unwrap();
        assert!(!out.is_inside());
    }

    #[test]
    fn membership_vertex_and_boundary() {
        let tri = pts(&[&[0, 0], &[4, 0], &[0, 4]]);
        let c = lp_membership(&tri, &[qi(4), qi(0)], &Budget::default()).unwrap();
        assert_eq!(
            c,
            MembershipCertificate::Inside {
                weights: vec![(1, qi(1))]
            }
        );
        assert!(lp_membership(&tri, &[qi(2), qi(2)], &Budget::default())
            .unwrap()
            .is_inside());
        assert!(
            !lp_membership(&tri, &[qi(2), q(21, 10)], &Budget::default())
                .unwrap()
                .is_inside()
        );
    }

    #[test]
    fn hull_of_segment() {
        let seg = pts(&[&[0, 0, 1], &[2, 2, 1]]);
        let eq = affine_hull(&seg).unwrap();
        assert_eq!(eq.len(), 2);
        assert_eq!(affine_rank(&seg), Some(1));
        for e in &eq {
            for p in &seg {
                assert!(e.is_tight(p));
            }
        }
    }

    fn cube_h(n: usize) -> HRep {
        let mut ineq = Vec::new();
        for i in 0..n {
            let mut c = vec![0; n];
            c[i] = -1;
            ineq.push(af(&c, 0));
            c[i] = 1;
            ineq.push(af(&c, 1));
        }
        HRep {
            dim: n,
            equalities: vec![],
            inequalities: ineq,
        }
    }

    #[test]
    fn cube_roundtrip() {
        let v = vertices_from_hrep(&cube_h(4), &Budget::default()).unwrap();
        assert_eq!(v.vertices.len(), 16);
        let h = facets_from_vrep(&v, &Budget::default()).unwrap();
        assert_eq!(h.inequalities.len(), 8);
        let mut expect = cube_h(4).inequalities;
        expect.sort();
        assert_eq!(h.inequalities, expect);
    }

    proptest! {
        /// Random points in a box: DD and basis enumeration agree on the
        /// hull's facets' vertices, and every vertex is a member.
        #[test]
        fn hull_roundtrip(raw in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 5..9)) {
            let points: Vec<Vec<Q>> = raw.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
            prop_assume!(affine_rank(&points) == Some(3));
            let h = facets_from_vrep(&VRep { dim: 3, vertices: points.clone() }, &Budget::default()).unwrap();
            let v1 = vertices_from_hrep(&h, &Budget::default()).unwrap();
            let v2 = vertices_by_bases(&h, &Budget::default()).unwrap();
            prop_assert_eq!(&v1, &v2);
            for p in &points {
                prop_assert!(h.contains(p));
                prop_assert!(lp_membership(&v1.vertices, p, &Budget::default()).unwrap().is_inside());
            }
            for v in &v1.vertices {
                prop_assert!(points.contains(v));
            }
        }

        #[test]
        fn certificates_verify(raw in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 1..7),
                               p in prop::collection::vec(-4i64..5, 3)) {
            let points: Vec<Vec<Q>> = raw.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
            let p: Vec<Q> = p.iter().map(|&x| q(x, 2)).collect();
            let c = lp_membership(&points, &p, &Budget::default()).unwrap();
            prop_assert!(c.verify(&points, &p).is_ok());
        }
    }
}
