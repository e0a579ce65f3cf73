//! Joint distributions over all potential outcomes: Fine's product
//! construction for scenarios with one multi-input party, partially
//! deterministic models read off membership certificates, and the
//! partial joints built from those models.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::behaviour::Behaviour;
use crate::error::{Error, Result};
use crate::exactgeom::MembershipCertificate;
use crate::num::Q;
use crate::polytopes::{Family, VertexSet};
use crate::scenario::{rank, tuples, unrank, InputCollection, Restriction, Scenario};

/// P(α, β⃗ | x⃗^⊥): α assigns an outcome to every input of the
/// deterministic block M′, β⃗ is an outcome of the context x⃗^⊥ of S_{|M′⊥}.
/// One table per context of S_{|M′⊥}; a single table when M′ = M.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    pub scenario: Scenario,
    pub collection: InputCollection,
    /// (party, input) of each α slot, in party-then-input order.
    pub slots: Vec<(usize, usize)>,
    /// The subscenario carrying β⃗; `None` when M′ = M.
    pub perp: Option<Restriction>,
    /// `tables[c][rank(α) * |O_c| + rank(β)]`.
    pub tables: Vec<Vec<Q>>,
}

impl JointDistribution {
    fn slot_radices(&self) -> Vec<usize> {
        self.slots
            .iter()
            .map(|&(i, x)| self.scenario.num_outputs(i, x))
            .collect()
    }

    pub fn num_alpha(&self) -> usize {
        self.slot_radices().iter().product()
    }

    fn beta_size(&self, c: usize) -> usize {
        self.perp.as_ref().map_or(1, |r| r.sub.context_size(c))
    }

    /// Probability of `alpha` (slot outcomes) with `beta` (outcome rank) in
    /// context `c` of the β scenario.
    pub fn prob(&self, c: usize, alpha: &[usize], beta: usize) -> &Q {
        let a = rank(alpha, &self.slot_radices());
        &self.tables[c][a * self.beta_size(c) + beta]
    }

    /// The α-marginal of table `c`.
    pub fn alpha_marginal(&self, c: usize) -> Vec<Q> {
        let bs = self.beta_size(c);
        self.tables[c]
            .chunks(bs)
            .map(|ch| ch.iter().sum())
            .collect()
    }
}

fn slots_of(s: &Scenario, m: &InputCollection) -> Vec<(usize, usize)> {
    (0..s.num_parties())
        .flat_map(|i| m.inputs_of(i).map(move |x| (i, x)))
        .collect()
}

/// Fine's joint for a no-signalling behaviour in which at most one party
/// has more than one input:
/// P(α) = ∏_{x_j} wp(α_{j,x_j}, b | x_j) / wp(b)^{|M_j|−1}, with b the
/// outcomes of the single-input parties and P(α) = 0 where wp(b) = 0.
pub fn fine_joint_one_multi_party(wp: &Behaviour) -> Result<JointDistribution> {
    let s = wp.scenario();
    let multi: Vec<usize> = (0..s.num_parties())
        .filter(|&i| s.num_inputs(i) > 1)
        .collect();
    if multi.len() > 1 {
        return Err(Error::validation(format!(
            "{} parties have more than one input",
            multi.len()
        )));
    }
    if let Some(v) = wp.no_signalling_violation() {
        return Err(Error::Signalling(v.to_string()));
    }
    let j = multi.first().copied().unwrap_or(0);
    let mj = s.num_inputs(j);
    let full = s.full_collection();
    let slots = slots_of(s, &full);
    let radices: Vec<usize> = slots.iter().map(|&(i, x)| s.num_outputs(i, x)).collect();
    let others: Vec<usize> = (0..s.num_parties()).filter(|&i| i != j).collect();
    let base_ctx = vec![0; s.num_parties()];
    let others_marg = wp.marginal(&others, &base_ctx);
    let other_radices: Vec<usize> = others.iter().map(|&i| s.num_outputs(i, 0)).collect();
    let mut table = Vec::with_capacity(radices.iter().product());
    for alpha in tuples(&radices) {
        // Slot order is party-major, so party j's slots are contiguous.
        let mut out = vec![0; s.num_parties()];
        let mut pos = 0;
        let mut aj = Vec::with_capacity(mj);
        for i in 0..s.num_parties() {
            if i == j {
                aj.extend_from_slice(&alpha[pos..pos + mj]);
                pos += mj;
            } else {
                out[i] = alpha[pos];
                pos += 1;
            }
        }
        let b: Vec<usize> = others.iter().map(|&i| out[i]).collect();
        let den = &others_marg[rank(&b, &other_radices)];
        if den.is_zero() {
            table.push(Q::zero());
            continue;
        }
        let mut num = Q::one();
        for (x, &a) in aj.iter().enumerate() {
            let mut ctx = base_ctx.clone();
            ctx[j] = x;
            out[j] = a;
            num *= wp.prob(&ctx, &out);
            if num.is_zero() {
                break;
            }
        }
        let mut p = num;
        for _ in 1..mj {
            p /= den;
        }
        table.push(p);
    }
    Ok(JointDistribution {
        scenario: s.clone(),
        collection: full,
        slots,
        perp: None,
        tables: vec![table],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelTerm {
    pub weight: Q,
    /// Index into [`PdModel::det`].
    pub det: Option<usize>,
    /// Index into [`PdModel::free`].
    pub free: Option<usize>,
}

/// wp = Σ t_rk D_r ⊙ P_k with D_r local deterministic on S_{|M′} and P_k
/// no-signalling on S_{|M′⊥}. Either side is absent when M′ is trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdModel {
    pub scenario: Scenario,
    pub collection: InputCollection,
    pub det: Option<Arc<VertexSet>>,
    pub free: Option<Arc<VertexSet>>,
    pub terms: Vec<ModelTerm>,
}

impl PdModel {
    /// Recombines the terms into a behaviour on S.
    pub fn evaluate(&self) -> Result<Behaviour> {
        let s = &self.scenario;
        let layout = match (&self.det, &self.free) {
            (Some(_), Some(_)) => Some(crate::product::ProductLayout::new(s, &self.collection)?),
            _ => None,
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let b = match (t.det, t.free, &layout) {
                (Some(r), Some(k), Some(l)) => l.apply_unchecked(
                    &self.det.as_ref().unwrap().vertices()[r],
                    &self.free.as_ref().unwrap().vertices()[k],
                ),
                (Some(r), None, None) => self.det.as_ref().unwrap().vertices()[r].clone(),
                (None, Some(k), None) => self.free.as_ref().unwrap().vertices()[k].clone(),
                _ => return Err(Error::validation("model term does not match model shape")),
            };
            terms.push((t.weight.clone(), b));
        }
        Behaviour::mix(&terms)
    }
}

/// Turns convex weights over `set` into a partially deterministic model.
/// The result is checked to re-evaluate to `wp`.
pub fn model_from_certificate(
    wp: &Behaviour,
    set: &VertexSet,
    cert: &MembershipCertificate,
) -> Result<PdModel> {
    let MembershipCertificate::Inside { weights } = cert else {
        return Err(Error::validation("an Outside certificate has no model"));
    };
    cert.verify(set.vertices(), wp.as_vector())?;
    let s = set.scenario().clone();
    let model = if let Some(comp) = set.composition() {
        PdModel {
            scenario: s,
            collection: comp.collection.clone(),
            det: Some(comp.left.clone()),
            free: Some(comp.right.clone()),
            terms: weights
                .iter()
                .map(|(j, w)| ModelTerm {
                    weight: w.clone(),
                    det: Some(comp.pairs[*j].0),
                    free: Some(comp.pairs[*j].1),
                })
                .collect(),
        }
    } else {
        let collection = match set.family() {
            Family::Bell => s.full_collection(),
            Family::NoSignalling => s.empty_collection(),
            Family::PartiallyDeterministic(m) if m.is_full(&s) || m.is_empty() => m.clone(),
            other => {
                return Err(Error::validation(format!(
                    "vertex set {other} carries no product structure"
                )))
            }
        };
        let arc = Arc::new(set.clone());
        let is_det = !collection.is_empty();
        PdModel {
            scenario: s,
            collection,
            det: is_det.then(|| arc.clone()),
            free: (!is_det).then_some(arc),
            terms: weights
                .iter()
                .map(|(j, w)| ModelTerm {
                    weight: w.clone(),
                    det: is_det.then_some(*j),
                    free: (!is_det).then_some(*j),
                })
                .collect(),
        }
    };
    if &model.evaluate()? != wp {
        return Err(Error::Verification(
            "model does not reproduce the behaviour".into(),
        ));
    }
    Ok(model)
}

/// Output chosen by a local deterministic behaviour on each (sub-party,
/// sub-input) of its scenario, flattened party-major.
fn strategy_of(d: &Behaviour) -> Result<Vec<usize>> {
    let s = d.scenario();
    let mut out = Vec::new();
    for k in 0..s.num_parties() {
        for j in 0..s.num_inputs(k) {
            let m = d.marginal_partial(&[k], &[j]);
            let a = m
                .iter()
                .position(|p| p.is_one())
                .ok_or_else(|| Error::validation("deterministic factor is not deterministic"))?;
            out.push(a);
        }
    }
    Ok(out)
}

/// P(α, β⃗ | x⃗^⊥) = Σ t_rk P̃_r(α) P_k(β⃗ | x⃗^⊥), where P̃_r is the point
/// mass on the strategy of D_r. For M′ = M this is Fine's joint of a
/// local-deterministic model.
pub fn partial_joint_from_model(model: &PdModel) -> Result<JointDistribution> {
    let s = &model.scenario;
    let slots = slots_of(s, &model.collection);
    let radices: Vec<usize> = slots.iter().map(|&(i, x)| s.num_outputs(i, x)).collect();
    let n_alpha: usize = radices.iter().product();
    let perp = if model.free.is_some() && !model.collection.is_empty() {
        Some(s.restrict(&model.collection.complement(s))?)
    } else if model.free.is_some() {
        Some(s.restrict(&s.full_collection())?)
    } else {
        None
    };
    let n_ctx = perp.as_ref().map_or(1, |r| r.sub.num_contexts());
    let beta = |c: usize| perp.as_ref().map_or(1, |r| r.sub.context_size(c));
    let mut tables: Vec<Vec<Q>> = (0..n_ctx)
        .map(|c| vec![Q::zero(); n_alpha * beta(c)])
        .collect();
    let det_alpha: Vec<usize> = match &model.det {
        Some(set) => set
            .vertices()
            .iter()
            .map(|d| strategy_of(d).map(|st| rank(&st, &radices)))
            .collect::<Result<_>>()?,
        None => vec![],
    };
    for t in &model.terms {
        let a = t.det.map_or(0, |r| det_alpha[r]);
        for (c, table) in tables.iter_mut().enumerate() {
            let bs = beta(c);
            match t.free {
                Some(k) => {
                    let p = &model.free.as_ref().unwrap().vertices()[k];
                    for (b, v) in p.context_dist(c).iter().enumerate() {
                        if !v.is_zero() {
                            table[a * bs + b] += &t.weight * v;
                        }
                    }
                }
                None => table[a] += &t.weight,
            }
        }
    }
    Ok(JointDistribution {
        scenario: s.clone(),
        collection: model.collection.clone(),
        slots,
        perp,
        tables,
    })
}

/// Exact check that `j` is a normalised family with a context-independent
/// α-marginal whose marginals recover every distribution of `wp`.
pub fn check_joint(j: &JointDistribution, wp: &Behaviour) -> Result<()> {
    let s = wp.scenario();
    if &j.scenario != s {
        return Err(Error::validation(
            "joint and behaviour are on different scenarios",
        ));
    }
    let fail = |m: String| Err(Error::Verification(m));
    for (c, t) in j.tables.iter().enumerate() {
        if !t.iter().sum::<Q>().is_one() {
            return fail(format!("table {c} is not normalised"));
        }
    }
    let a0 = j.alpha_marginal(0);
    if (1..j.tables.len()).any(|c| j.alpha_marginal(c) != a0) {
        return fail("α-marginal depends on the context of the free block".into());
    }
    let radices = j.slot_radices();
    for ctx in s.contexts() {
        let part = j.collection.partition(&ctx);
        // Context of the β scenario: the free parties' inputs, first input
        // for parties that are deterministic here.
        let (c, sub_members) = match &j.perp {
            Some(r) => {
                let sub_ctx: Vec<usize> = r
                    .parties
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| r.inputs[k].iter().position(|&y| y == ctx[i]).unwrap_or(0))
                    .collect();
                let members: Vec<Option<usize>> =
                    (0..s.num_parties()).map(|i| r.sub_party(i)).collect();
                (r.sub.context_index(&sub_ctx), Some((sub_ctx, members)))
            }
            None => (0, None),
        };
        let out_radices = s.outcome_radices(&ctx);
        let mut acc = vec![Q::zero(); s.context_size(s.context_index(&ctx))];
        let bs = j.beta_size(c);
        for (a_idx, alpha) in tuples(&radices).enumerate() {
            for b in 0..bs {
                let p = &j.tables[c][a_idx * bs + b];
                if p.is_zero() {
                    continue;
                }
                let mut out = vec![0; s.num_parties()];
                for &i in &part.deterministic {
                    let slot = j.slots.iter().position(|&sl| sl == (i, ctx[i])).unwrap();
                    out[i] = alpha[slot];
                }
                if let Some((sub_ctx, members)) = &sub_members {
                    let r = j.perp.as_ref().unwrap();
                    let digits = unrank(b, &r.sub.outcome_radices(sub_ctx));
                    for &i in &part.rest {
                        out[i] = digits[members[i].unwrap()];
                    }
                }
                acc[rank(&out, &out_radices)] += p;
            }
        }
        if acc != wp.context_dist(s.context_index(&ctx)) {
            return fail(format!(
                "marginal mismatch in context {}",
                s.context_key(&ctx)
            ));
        }
    }
    Ok(())
}

pub fn verify_joint(j: &JointDistribution, wp: &Behaviour) -> bool {
    check_joint(j, wp).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviour::tests::pr_box;
    use crate::exactgeom::Budget;
    use crate::num::{q, qi};
    use crate::polytopes::{bell_vertices, ns_vertices, pd_vertices};

    #[test]
    fn correlated_one_two() {
        // A has one input, B two; B's first input copies A, the second is
        // uniform and independent.
        let s = Scenario::uniform(&[1, 2], 2).unwrap();
        let wp = Behaviour::from_fn(&s, |x, a| match x[1] {
            0 => {
                if a[0] == a[1] {
                    q(1, 2)
                } else {
                    qi(0)
                }
            }
            _ => q(1, 4),
        })
        .unwrap();
        let j = fine_joint_one_multi_party(&wp).unwrap();
        assert!(verify_joint(&j, &wp));
        // Brute-force oracle: P(a, b1, b2) = [a = b1] / 4.
        for alpha in tuples(&[2, 2, 2]) {
            let expect = if alpha[0] == alpha[1] { q(1, 4) } else { qi(0) };
            assert_eq!(j.prob(0, &alpha, 0), &expect);
        }
    }

    #[test]
    fn product_and_deterministic_collapse() {
        let s = Scenario::uniform(&[1, 3], 2).unwrap();
        let u = Behaviour::uniform(&s);
        let j = fine_joint_one_multi_party(&u).unwrap();
        assert!(j.tables[0].iter().all(|p| *p == q(1, 16)));
        let d = Behaviour::local_deterministic(&s, &[vec![1], vec![0, 1, 1]]).unwrap();
        let j = fine_joint_one_multi_party(&d).unwrap();
        assert_eq!(j.tables[0].iter().filter(|p| p.is_one()).count(), 1);
        assert!(verify_joint(&j, &d));
    }

    #[test]
    fn two_multi_parties_rejected() {
        assert!(fine_joint_one_multi_party(&pr_box()).is_err());
    }

    #[test]
    fn uniform_bell_model_roundtrip() {
        let s = Scenario::chsh();
        let set = bell_vertices(&s, &Budget::default()).unwrap();
        let u = Behaviour::uniform(&s);
        let c = set.membership(&u, &Budget::default()).unwrap();
        let m = model_from_certificate(&u, &set, &c).unwrap();
        let j = partial_joint_from_model(&m).unwrap();
        assert!(j.perp.is_none());
        check_joint(&j, &u).unwrap();
    }

    #[test]
    fn pd_model_roundtrip() {
        let s = Scenario::chsh();
        let m = InputCollection::new(&s, &[vec![0], vec![]]).unwrap();
        let set = pd_vertices(&s, &m, &Budget::default()).unwrap();
        let u = Behaviour::uniform(&s);
        let c = set.membership(&u, &Budget::default()).unwrap();
        let model = model_from_certificate(&u, &set, &c).unwrap();
        let j = partial_joint_from_model(&model).unwrap();
        check_joint(&j, &u).unwrap();
    }

    #[test]
    fn ns_model_roundtrip() {
        let s = Scenario::chsh();
        let set = ns_vertices(&s, &Budget::default()).unwrap();
        let wp = Behaviour::mix(&[(q(1, 2), pr_box()), (q(1, 2), Behaviour::uniform(&s))]).unwrap();
        let c = set.membership(&wp, &Budget::default()).unwrap();
        let model = model_from_certificate(&wp, &set, &c).unwrap();
        check_joint(&partial_joint_from_model(&model).unwrap(), &wp).unwrap();
    }

    #[test]
    fn outside_has_no_model() {
        let s = Scenario::chsh();
        let set = bell_vertices(&s, &Budget::default()).unwrap();
        let c = set.membership(&pr_box(), &Budget::default()).unwrap();
        assert!(model_from_certificate(&pr_box(), &set, &c).is_err());
    }

    #[test]
    fn wrong_joint_rejected() {
        let s = Scenario::uniform(&[1, 2], 2).unwrap();
        let u = Behaviour::uniform(&s);
        let mut j = fine_joint_one_multi_party(&u).unwrap();
        j.tables[0][0] += q(1, 8);
        j.tables[0][1] -= q(1, 8);
        assert!(!verify_joint(&j, &u));
    }
}
