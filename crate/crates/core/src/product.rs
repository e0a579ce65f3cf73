//! The behaviour product ⊙ over a bipartition (S_{|M′}, S_{|M′⊥}) and its
//! lift to vertex sets.

use std::sync::Arc;

use crate::behaviour::Behaviour;
use crate::error::{Error, Result};
use crate::num::Q;
use crate::polytopes::{Composition, Family, VertexSet};
use crate::scenario::{rank, tuples, Half, InputCollection, Restriction, Scenario};

/// Precomputed index maps for products over one bipartition.
#[derive(Debug, Clone)]
pub struct ProductLayout {
    scenario: Scenario,
    collection: InputCollection,
    left: Restriction,
    right: Restriction,
    /// Some party keeps part, but not all, of its inputs on each side.
    mixed: bool,
    /// Per parent coordinate: (left rank, right rank) in the marginal tables
    /// of its context.
    coords: Vec<(usize, usize)>,
    /// Per parent context: marginal request on the left and right factor,
    /// as (sub-parties, sub-inputs of those parties).
    requests: Vec<[(Vec<usize>, Vec<usize>); 2]>,
}

impl ProductLayout {
    /// Fails on a redundant bipartition (M′ = ∅ or M′ = M).
    pub fn new(s: &Scenario, m: &InputCollection) -> Result<Self> {
        let (l, r) = s.bipartition(m)?;
        let (Half::Sub(left), Half::Sub(right)) = (l, r) else {
            return Err(Error::validation(
                "behaviour product needs a nonredundant bipartition",
            ));
        };
        let mixed = !m.is_party_block(s);
        let mut coords = Vec::with_capacity(s.ambient_dim());
        let mut requests = Vec::with_capacity(s.num_contexts());
        for ctx in s.contexts() {
            let part = m.partition(&ctx);
            let req = |side: &Restriction, members: &[usize]| -> (Vec<usize>, Vec<usize>) {
                members
                    .iter()
                    .map(|&i| side.sub_input(i, ctx[i]).expect("input lies on this side"))
                    .unzip()
            };
            let lreq = req(&left, &part.deterministic);
            let rreq = req(&right, &part.rest);
            let radices = s.outcome_radices(&ctx);
            let lr: Vec<usize> = part.deterministic.iter().map(|&i| radices[i]).collect();
            let rr: Vec<usize> = part.rest.iter().map(|&i| radices[i]).collect();
            for out in tuples(&radices) {
                let a: Vec<usize> = part.deterministic.iter().map(|&i| out[i]).collect();
                let b: Vec<usize> = part.rest.iter().map(|&i| out[i]).collect();
                coords.push((rank(&a, &lr), rank(&b, &rr)));
            }
            requests.push([lreq, rreq]);
        }
        Ok(ProductLayout {
            scenario: s.clone(),
            collection: m.clone(),
            left,
            right,
            mixed,
            coords,
            requests,
        })
    }

    pub fn left(&self) -> &Restriction {
        &self.left
    }

    pub fn right(&self) -> &Restriction {
        &self.right
    }

    pub fn collection(&self) -> &InputCollection {
        &self.collection
    }

    /// Whether the bipartition splits some party's inputs, which makes the
    /// product require no-signalling factors.
    pub fn is_mixed(&self) -> bool {
        self.mixed
    }

    fn check(&self, p: &Behaviour, q: &Behaviour) -> Result<()> {
        if p.scenario() != &self.left.sub || q.scenario() != &self.right.sub {
            return Err(Error::validation(
                "factor scenarios do not match the bipartition",
            ));
        }
        if self.mixed {
            for (side, b) in [("left", p), ("right", q)] {
                if let Some(v) = b.no_signalling_violation() {
                    return Err(Error::Signalling(format!("{side} factor: {v}")));
                }
            }
        }
        Ok(())
    }

    /// p ⊙ q without the factor checks.
    pub(crate) fn apply_unchecked(&self, p: &Behaviour, q: &Behaviour) -> Behaviour {
        let s = &self.scenario;
        let mut probs = Vec::with_capacity(s.ambient_dim());
        for (c, [lreq, rreq]) in self.requests.iter().enumerate() {
            let pm = marginal_req(p, lreq);
            let qm = marginal_req(q, rreq);
            let off = s.context_offset(c);
            for &(a, b) in &self.coords[off..off + s.context_size(c)] {
                probs.push(&pm[a] * &qm[b]);
            }
        }
        Behaviour::new_unchecked(s.clone(), probs)
    }

    /// (p ⊙ q)(a⃗|x⃗) = p(a⃗_F|x⃗_F) · q(a⃗_{I∖F}|x⃗_{I∖F}) with F = F_x⃗.
    pub fn apply(&self, p: &Behaviour, q: &Behaviour) -> Result<Behaviour> {
        self.check(p, q)?;
        Ok(self.apply_unchecked(p, q))
    }
}

/// Marginal of a factor on the sub-parties `req.0` with inputs `req.1`.
fn marginal_req(b: &Behaviour, req: &(Vec<usize>, Vec<usize>)) -> Vec<Q> {
    b.marginal_partial(&req.0, &req.1)
}

/// p ⊙ q for p on S_{|M′} and q on S_{|M′⊥}.
pub fn behaviour_product(
    s: &Scenario,
    m: &InputCollection,
    p: &Behaviour,
    q: &Behaviour,
) -> Result<Behaviour> {
    ProductLayout::new(s, m)?.apply(p, q)
}

/// P^{S′} ⊙ P^{S′⊥}: every pairwise product, sorted, with the factor pairs
/// recorded so that a point of the product set can be traced back.
pub fn set_product(
    s: &Scenario,
    m: &InputCollection,
    left: &VertexSet,
    right: &VertexSet,
    family: Family,
) -> Result<VertexSet> {
    let layout = ProductLayout::new(s, m)?;
    if left.scenario() != &layout.left.sub || right.scenario() != &layout.right.sub {
        return Err(Error::validation(
            "factor scenarios do not match the bipartition",
        ));
    }
    if layout.mixed {
        for (side, set) in [("left", left), ("right", right)] {
            if let Some(v) = set
                .vertices()
                .iter()
                .find_map(|b| b.no_signalling_violation())
            {
                return Err(Error::Signalling(format!("{side} factor set: {v}")));
            }
        }
    }
    let mut items: Vec<(Behaviour, (usize, usize))> = Vec::with_capacity(left.len() * right.len());
    for (r, p) in left.vertices().iter().enumerate() {
        for (k, q) in right.vertices().iter().enumerate() {
            items.push((layout.apply_unchecked(p, q), (r, k)));
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.dedup_by(|a, b| a.0 == b.0);
    let (vertices, pairs): (Vec<Behaviour>, Vec<(usize, usize)>) = items.into_iter().unzip();
    Ok(VertexSet::from_parts(
        s.clone(),
        family,
        vertices,
        Some(Composition {
            collection: m.clone(),
            left: Arc::new(left.clone()),
            right: Arc::new(right.clone()),
            pairs,
        }),
    ))
}

/// Checks R_{|V}(p ⊙ q) = R_{|V∩M′}(p) ⊙ R_{|V∩M′⊥}(q) for one V, with the
/// degenerate cases V ⊆ M′ and V ⊆ M′⊥ reducing to a single restricted
/// factor. Returns the two sides on failure.
pub fn restriction_distributivity_check(
    s: &Scenario,
    m: &InputCollection,
    p: &Behaviour,
    q: &Behaviour,
    v: &InputCollection,
) -> Result<std::result::Result<(), (Behaviour, Behaviour)>> {
    let layout = ProductLayout::new(s, m)?;
    let prod = layout.apply(p, q)?;
    let lhs = prod.restrict(v)?;
    let vl = v.intersect(m);
    let vr = v.intersect(&m.complement(s));
    // Pull V ∩ M′ back into the left factor's own input indexing.
    let to_sub = |side: &Restriction, w: &InputCollection| -> InputCollection {
        let masks = side
            .parties
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                side.inputs[k]
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| w.contains(i, x))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        InputCollection::from_masks(masks)
    };
    let rhs = if vl.is_empty() {
        q.restrict(&to_sub(&layout.right, &vr))?
    } else if vr.is_empty() {
        p.restrict(&to_sub(&layout.left, &vl))?
    } else {
        let sv = lhs.scenario().clone();
        let r = s.restrict(v)?;
        // V ∩ M′ expressed as a collection of S_{|V}.
        let inner_masks = r
            .parties
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                r.inputs[k]
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| vl.contains(i, x))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let inner = InputCollection::from_masks(inner_masks);
        let pl = p.restrict(&to_sub(&layout.left, &vl))?;
        let qr = q.restrict(&to_sub(&layout.right, &vr))?;
        // The restricted factors live on scenarios equal to the halves of
        // the inner bipartition up to party names; rebuild them there.
        let inner_layout = ProductLayout::new(&sv, &inner)?;
        let pl = Behaviour::new(inner_layout.left.sub.clone(), pl.into_vector())?;
        let qr = Behaviour::new(inner_layout.right.sub.clone(), qr.into_vector())?;
        inner_layout.apply(&pl, &qr)?
    };
    let rhs = Behaviour::new(lhs.scenario().clone(), rhs.into_vector())?;
    Ok(if lhs == rhs { Ok(()) } else { Err((lhs, rhs)) })
}

/// Left fold of binary products over a chain of bipartitions. `steps[k]`
/// is (collection of the accumulated scenario S_k inside S_{k+1}, right
/// factor on the complement); the final scenario is the last step's.
pub fn fold_products(
    first: &VertexSet,
    steps: &[(Scenario, InputCollection, VertexSet)],
    family: Family,
) -> Result<VertexSet> {
    let mut acc = first.clone();
    for (k, (s, m, right)) in steps.iter().enumerate() {
        let fam = if k + 1 == steps.len() {
            family.clone()
        } else {
            Family::Custom("partial product".into())
        };
        acc = set_product(s, m, &acc, right, fam)?;
    }
    Ok(acc)
}
