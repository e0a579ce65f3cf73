//! Behaviours wp(a⃗|x⃗) as exact rational tables in the natural layout of
//! their scenario, with marginals, the restriction map and the
//! predicates (no-signalling, predictable, uncorrelated and their partial
//! versions).

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::num::{fmt_q, Q};
use crate::scenario::{rank, tuples, unrank, InputCollection, Restriction, Scenario};

/// A normalised behaviour. The probability vector is indexed by
/// [`Scenario::coord`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Behaviour {
    scenario: Scenario,
    probs: Vec<Q>,
}

impl fmt::Debug for Behaviour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.probs.iter().map(fmt_q).collect();
        write!(f, "Behaviour[{}]", vals.join(" "))
    }
}

impl AsRef<[Q]> for Behaviour {
    fn as_ref(&self) -> &[Q] {
        &self.probs
    }
}

impl PartialOrd for Behaviour {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: lexicographic on the probability vector, larger
/// entries first. Deterministic points with early outputs sort first.
impl Ord for Behaviour {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.probs.iter().zip(&other.probs) {
            match b.cmp(a) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.probs.len().cmp(&other.probs.len())
    }
}

/// A violated marginal-equality constraint: the marginal of
/// `I ∖ {party}` at outcomes `outcome` differs between inputs `input`
/// and `other_input` of `party`, with the remaining parties' inputs fixed
/// to `rest_inputs` (both tuples skip `party`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsViolation {
    pub party: usize,
    pub input: usize,
    pub other_input: usize,
    pub rest_inputs: Vec<usize>,
    pub outcome: Vec<usize>,
}

impl fmt::Display for NsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "marginal of the other parties at inputs {:?}, outcomes {:?} depends on party {} choosing input {} or {}",
            self.rest_inputs, self.outcome, self.party, self.input, self.other_input
        )
    }
}

impl Behaviour {
    /// Validates length, nonnegativity and normalisation.
    pub fn new(scenario: Scenario, probs: Vec<Q>) -> Result<Self> {
        if probs.len() != scenario.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: scenario.ambient_dim(),
                got: probs.len(),
            });
        }
        if let Some(c) = probs.iter().position(|p| p.is_negative()) {
            return Err(Error::validation(format!(
                "negative probability at {}",
                scenario.coord_name(c)
            )));
        }
        for c in 0..scenario.num_contexts() {
            let off = scenario.context_offset(c);
            let sum: Q = probs[off..off + scenario.context_size(c)].iter().sum();
            if !sum.is_one() {
                return Err(Error::validation(format!(
                    "context {} sums to {}, not 1",
                    scenario.context_key(&scenario.context(c)),
                    fmt_q(&sum)
                )));
            }
        }
        Ok(Behaviour { scenario, probs })
    }

    /// Skips validation. Callers guarantee normalisation.
    pub(crate) fn new_unchecked(scenario: Scenario, probs: Vec<Q>) -> Self {
        debug_assert_eq!(probs.len(), scenario.ambient_dim());
        Behaviour { scenario, probs }
    }

    /// Builds the table from `f(context, outcome)`.
    pub fn from_fn(
        scenario: &Scenario,
        mut f: impl FnMut(&[usize], &[usize]) -> Q,
    ) -> Result<Self> {
        let mut probs = Vec::with_capacity(scenario.ambient_dim());
        for ctx in scenario.contexts() {
            let radices = scenario.outcome_radices(&ctx);
            for out in tuples(&radices) {
                probs.push(f(&ctx, &out));
            }
        }
        Self::new(scenario.clone(), probs)
    }

    /// The local deterministic point with `strategy[i][x]` the output of
    /// party `i` on input `x`.
    pub fn local_deterministic(scenario: &Scenario, strategy: &[Vec<usize>]) -> Result<Self> {
        if strategy.len() != scenario.num_parties() {
            return Err(Error::DimensionMismatch {
                expected: scenario.num_parties(),
                got: strategy.len(),
            });
        }
        for (i, s) in strategy.iter().enumerate() {
            if s.len() != scenario.num_inputs(i)
                || s.iter()
                    .enumerate()
                    .any(|(x, &a)| a >= scenario.num_outputs(i, x))
            {
                return Err(Error::validation(format!("bad strategy for party {i}")));
            }
        }
        let mut probs = vec![Q::zero(); scenario.ambient_dim()];
        for ctx in scenario.contexts() {
            let out: Vec<usize> = ctx
                .iter()
                .enumerate()
                .map(|(i, &x)| strategy[i][x])
                .collect();
            probs[scenario.coord(&ctx, &out)] = Q::one();
        }
        Ok(Behaviour::new_unchecked(scenario.clone(), probs))
    }

    /// A predictable (possibly signalling) point: `choice[c]` is the outcome
    /// tuple rank picked in context `c`.
    pub fn predictable(scenario: &Scenario, choice: &[usize]) -> Result<Self> {
        if choice.len() != scenario.num_contexts() {
            return Err(Error::DimensionMismatch {
                expected: scenario.num_contexts(),
                got: choice.len(),
            });
        }
        let mut probs = vec![Q::zero(); scenario.ambient_dim()];
        for (c, &k) in choice.iter().enumerate() {
            if k >= scenario.context_size(c) {
                return Err(Error::validation("outcome index out of range"));
            }
            probs[scenario.context_offset(c) + k] = Q::one();
        }
        Ok(Behaviour::new_unchecked(scenario.clone(), probs))
    }

    /// Every context uniformly distributed.
    pub fn uniform(scenario: &Scenario) -> Self {
        let mut probs = Vec::with_capacity(scenario.ambient_dim());
        for c in 0..scenario.num_contexts() {
            let k = scenario.context_size(c);
            let p = Q::new(1.into(), (k as i64).into());
            probs.extend(std::iter::repeat_n(p, k));
        }
        Behaviour::new_unchecked(scenario.clone(), probs)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// The vector r⃗ in the natural representation.
    pub fn as_vector(&self) -> &[Q] {
        &self.probs
    }

    pub fn into_vector(self) -> Vec<Q> {
        self.probs
    }

    pub fn prob(&self, ctx: &[usize], out: &[usize]) -> &Q {
        &self.probs[self.scenario.coord(ctx, out)]
    }

    /// The outcome distribution of one context, in outcome-rank order.
    pub fn context_dist(&self, ctx_idx: usize) -> &[Q] {
        let off = self.scenario.context_offset(ctx_idx);
        &self.probs[off..off + self.scenario.context_size(ctx_idx)]
    }

    /// wp(a⃗_V | x⃗): sums out parties outside `parties` (sorted, distinct)
    /// in the full context `ctx`. Indexed by outcome rank over `parties`.
    pub fn marginal(&self, parties: &[usize], ctx: &[usize]) -> Vec<Q> {
        let s = &self.scenario;
        let radices = s.outcome_radices(ctx);
        let sub_radices: Vec<usize> = parties.iter().map(|&i| radices[i]).collect();
        let mut out = vec![Q::zero(); sub_radices.iter().product()];
        let dist = self.context_dist(s.context_index(ctx));
        if parties.len() == ctx.len() {
            out.clone_from_slice(dist);
            return out;
        }
        for (k, p) in dist.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let digits = unrank(k, &radices);
            let sub: Vec<usize> = parties.iter().map(|&i| digits[i]).collect();
            out[rank(&sub, &sub_radices)] += p;
        }
        out
    }

    /// Marginal over `parties` given inputs only for those parties. The
    /// other parties' inputs are set to their first input, which is
    /// harmless for no-signalling behaviours.
    pub fn marginal_partial(&self, parties: &[usize], inputs: &[usize]) -> Vec<Q> {
        let mut ctx = vec![0; self.scenario.num_parties()];
        for (&i, &x) in parties.iter().zip(inputs) {
            ctx[i] = x;
        }
        self.marginal(parties, &ctx)
    }

    /// First violated single-party marginal constraint, if any. The
    /// single-party constraints imply those for every party subset.
    pub fn no_signalling_violation(&self) -> Option<NsViolation> {
        let s = &self.scenario;
        let n = s.num_parties();
        for i in 0..n {
            if s.num_inputs(i) < 2 {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            for ctx in s.contexts().filter(|c| c[i] == 0) {
                let base = self.marginal(&rest, &ctx);
                for x in 1..s.num_inputs(i) {
                    let mut other = ctx.clone();
                    other[i] = x;
                    let m = self.marginal(&rest, &other);
                    if let Some(k) = (0..m.len()).find(|&k| m[k] != base[k]) {
                        let rest_radices: Vec<usize> =
                            rest.iter().map(|&j| s.num_outputs(j, ctx[j])).collect();
                        return Some(NsViolation {
                            party: i,
                            input: 0,
                            other_input: x,
                            rest_inputs: rest.iter().map(|&j| ctx[j]).collect(),
                            outcome: unrank(k, &rest_radices),
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_no_signalling(&self) -> bool {
        self.no_signalling_violation().is_none()
    }

    fn require_ns(&self) -> Result<()> {
        match self.no_signalling_violation() {
            None => Ok(()),
            Some(v) => Err(Error::Signalling(v.to_string())),
        }
    }

    /// R_{|M′}(wp). Defined only on no-signalling behaviours.
    pub fn restrict(&self, m: &InputCollection) -> Result<Behaviour> {
        let r = self.scenario.restrict(m)?;
        self.restrict_to(&r)
    }

    pub fn restrict_to(&self, r: &Restriction) -> Result<Behaviour> {
        if r.parent != self.scenario {
            return Err(Error::validation("restriction belongs to another scenario"));
        }
        self.require_ns()?;
        Ok(self.restrict_unchecked(r))
    }

    /// Restriction without the no-signalling check.
    pub(crate) fn restrict_unchecked(&self, r: &Restriction) -> Behaviour {
        let mut probs = Vec::with_capacity(r.sub.ambient_dim());
        for sub_ctx in r.sub.contexts() {
            let inputs: Vec<usize> = sub_ctx
                .iter()
                .enumerate()
                .map(|(k, &j)| r.inputs[k][j])
                .collect();
            probs.extend(self.marginal_partial(&r.parties, &inputs));
        }
        Behaviour::new_unchecked(r.sub.clone(), probs)
    }

    /// Pointwise convex combination. Weights must be nonnegative and sum to
    /// exactly one; all behaviours must share the scenario.
    pub fn mix(terms: &[(Q, Behaviour)]) -> Result<Behaviour> {
        let first = terms
            .first()
            .ok_or_else(|| Error::validation("empty mixture"))?;
        let s = first.1.scenario.clone();
        let mut total = Q::zero();
        let mut probs = vec![Q::zero(); s.ambient_dim()];
        for (w, b) in terms {
            if w.is_negative() {
                return Err(Error::validation("negative mixture weight"));
            }
            if b.scenario != s {
                return Err(Error::validation(
                    "mixture of behaviours from different scenarios",
                ));
            }
            total += w;
            if w.is_zero() {
                continue;
            }
            for (acc, p) in probs.iter_mut().zip(&b.probs) {
                if !p.is_zero() {
                    *acc += w * p;
                }
            }
        }
        if !total.is_one() {
            return Err(Error::validation(format!(
                "mixture weights sum to {}, not 1",
                fmt_q(&total)
            )));
        }
        Ok(Behaviour::new_unchecked(s, probs))
    }

    /// Every entry is 0 or 1.
    pub fn is_predictable(&self) -> bool {
        self.probs.iter().all(|p| p.is_zero() || p.is_one())
    }

    /// wp(a⃗|x⃗) = ∏_i wp(a_i|x⃗) in every context.
    pub fn is_uncorrelated(&self) -> bool {
        let s = &self.scenario;
        let n = s.num_parties();
        for ctx in s.contexts() {
            let singles: Vec<Vec<Q>> = (0..n).map(|i| self.marginal(&[i], &ctx)).collect();
            let radices = s.outcome_radices(&ctx);
            let dist = self.context_dist(s.context_index(&ctx));
            for (k, p) in dist.iter().enumerate() {
                let digits = unrank(k, &radices);
                let prod = digits
                    .iter()
                    .enumerate()
                    .fold(Q::one(), |acc, (i, &a)| acc * &singles[i][a]);
                if *p != prod {
                    return false;
                }
            }
        }
        true
    }

    /// The marginal on F_x⃗ = {i : x_i ∈ M′_i} is 0/1-valued for every x⃗.
    /// Checking the largest set F_x⃗ suffices, since marginals of a 0/1
    /// distribution are again 0/1.
    pub fn is_partially_predictable(&self, m: &InputCollection) -> bool {
        let s = &self.scenario;
        s.contexts().all(|ctx| {
            let f = m.deterministic_parties(&ctx);
            f.is_empty()
                || self
                    .marginal(&f, &ctx)
                    .iter()
                    .all(|p| p.is_zero() || p.is_one())
        })
    }

    /// wp(a⃗|x⃗) = wp(a⃗_F|x⃗)·wp(a⃗_{I∖F}|x⃗) with F = F_x⃗, for every x⃗.
    pub fn is_partially_uncorrelated(&self, m: &InputCollection) -> bool {
        let s = &self.scenario;
        for ctx in s.contexts() {
            let part = m.partition(&ctx);
            if part.deterministic.is_empty() || part.rest.is_empty() {
                continue;
            }
            let mf = self.marginal(&part.deterministic, &ctx);
            let mr = self.marginal(&part.rest, &ctx);
            let radices = s.outcome_radices(&ctx);
            let rf: Vec<usize> = part.deterministic.iter().map(|&i| radices[i]).collect();
            let rr: Vec<usize> = part.rest.iter().map(|&i| radices[i]).collect();
            let dist = self.context_dist(s.context_index(&ctx));
            for (k, p) in dist.iter().enumerate() {
                let d = unrank(k, &radices);
                let a: Vec<usize> = part.deterministic.iter().map(|&i| d[i]).collect();
                let b: Vec<usize> = part.rest.iter().map(|&i| d[i]).collect();
                if *p != &mf[rank(&a, &rf)] * &mr[rank(&b, &rr)] {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::num::{q, qi};
    use proptest::prelude::*;

    /// p(ab|xy) = 1/2 when a⊕b = x·y (inputs and outputs 0-based).
    pub fn pr_box() -> Behaviour {
        Behaviour::from_fn(&Scenario::chsh(), |x, a| {
            if (a[0] ^ a[1]) == (x[0] & x[1]) {
                q(1, 2)
            } else {
                qi(0)
            }
        })
        .unwrap()
    }

    fn all_strategies(s: &Scenario) -> Vec<Behaviour> {
        let radices: Vec<usize> = (0..s.num_parties())
            .flat_map(|i| (0..s.num_inputs(i)).map(move |x| (i, x)))
            .map(|(i, x)| s.num_outputs(i, x))
            .collect();
        tuples(&radices)
            .map(|flat| {
                let mut it = flat.into_iter();
                let strat: Vec<Vec<usize>> = (0..s.num_parties())
                    .map(|i| (0..s.num_inputs(i)).map(|_| it.next().unwrap()).collect())
                    .collect();
                Behaviour::local_deterministic(s, &strat).unwrap()
            })
            .collect()
    }

    #[test]
    fn pr_marginals_unbiased() {
        let pr = pr_box();
        for ctx in Scenario::chsh().contexts() {
            assert_eq!(pr.marginal(&[0], &ctx), vec![q(1, 2), q(1, 2)]);
            assert_eq!(pr.marginal(&[1], &ctx), vec![q(1, 2), q(1, 2)]);
            assert_eq!(pr.marginal(&[], &ctx), vec![qi(1)]);
            assert_eq!(
                pr.marginal(&[0, 1], &ctx),
                pr.context_dist(Scenario::chsh().context_index(&ctx))
            );
        }
    }

    #[test]
    fn pr_is_ns_not_predictable_not_uncorrelated() {
        let pr = pr_box();
        assert!(pr.is_no_signalling());
        assert!(!pr.is_predictable());
        assert!(!pr.is_uncorrelated());
    }

    #[test]
    fn signalling_witness() {
        // Party A outputs party B's input.
        let s = Scenario::chsh();
        let b = Behaviour::from_fn(&s, |x, a| {
            if a[0] == x[1] && a[1] == 0 {
                qi(1)
            } else {
                qi(0)
            }
        })
        .unwrap();
        let v = b.no_signalling_violation().unwrap();
        assert_eq!(v.party, 1);
        assert_eq!((v.input, v.other_input), (0, 1));
        assert!(b
            .restrict(&InputCollection::new(&s, &[vec![0], vec![]]).unwrap())
            .is_err());
    }

    #[test]
    fn deterministic_points_are_ns_predictable_uncorrelated() {
        let s = Scenario::uniform(&[2, 3], 2).unwrap();
        for b in all_strategies(&s) {
            assert!(b.is_no_signalling());
            assert!(b.is_predictable());
            assert!(b.is_uncorrelated());
        }
    }

    #[test]
    fn uniform_is_uncorrelated_not_predictable() {
        let u = Behaviour::uniform(&Scenario::chsh());
        assert!(u.is_uncorrelated());
        assert!(!u.is_predictable());
    }

    #[test]
    fn restriction_examples() {
        let s = Scenario::chsh();
        let pr = pr_box();
        assert_eq!(pr.restrict(&s.full_collection()).unwrap(), pr);
        let a = pr.restrict(&s.party_collection(&[0]).unwrap()).unwrap();
        assert_eq!(a, Behaviour::uniform(&a.scenario().clone()));
        assert_eq!(a.scenario().input_radices(), vec![2]);
        assert_eq!(
            pr.restrict(&s.empty_collection()).unwrap_err(),
            Error::EmptyRestriction
        );
    }

    #[test]
    fn mixing() {
        let s = Scenario::chsh();
        let pr = pr_box();
        assert_eq!(Behaviour::mix(&[(qi(1), pr.clone())]).unwrap(), pr);
        let pts = all_strategies(&s);
        let half =
            Behaviour::mix(&[(q(1, 2), pts[0].clone()), (q(1, 2), pts[15].clone())]).unwrap();
        assert!(!half.is_uncorrelated());
        assert!(Behaviour::mix(&[(q(1, 3), pr.clone())]).is_err());
        // Oracle: direct summation of the 16 tables divided by 16.
        let n = pts.len() as i64;
        let w = Q::new(1.into(), n.into());
        let uni = Behaviour::mix(
            &pts.iter()
                .map(|p| (w.clone(), p.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mut sum = vec![qi(0); s.ambient_dim()];
        for p in &pts {
            for (acc, v) in sum.iter_mut().zip(p.as_vector()) {
                *acc += v;
            }
        }
        let sum: Vec<Q> = sum.into_iter().map(|v| v / qi(n)).collect();
        assert_eq!(uni.as_vector(), &sum[..]);
        assert_eq!(uni, Behaviour::uniform(&s));
    }

    #[test]
    fn partial_predictability_examples() {
        let s = Scenario::chsh();
        let pr = pr_box();
        assert!(pr.is_partially_predictable(&s.empty_collection()));
        let one = InputCollection::new(&s, &[vec![0], vec![]]).unwrap();
        assert!(!pr.is_partially_predictable(&one));
        assert!(pr.is_partially_uncorrelated(&s.empty_collection()));
    }

    #[test]
    fn validation_errors() {
        let s = Scenario::chsh();
        assert!(Behaviour::new(s.clone(), vec![qi(0); 15]).is_err());
        assert!(Behaviour::new(s.clone(), vec![q(1, 4); 16]).is_ok());
        let mut v = vec![q(1, 4); 16];
        v[0] = q(-1, 4);
        v[1] = q(3, 4);
        assert!(Behaviour::new(s, v).is_err());
    }

    fn random_mixture(s: &Scenario, pts: &[Behaviour], ws: &[u32]) -> Behaviour {
        let total: u32 = ws.iter().sum::<u32>().max(1);
        let mut terms: Vec<(Q, Behaviour)> = ws
            .iter()
            .zip(pts)
            .map(|(&w, p)| (Q::new(w.into(), total.into()), p.clone()))
            .collect();
        if ws.iter().all(|&w| w == 0) {
            terms[0].0 = qi(1);
        }
        let _ = s;
        Behaviour::mix(&terms).unwrap()
    }

    proptest! {
        #[test]
        fn restriction_commutes_with_mixing(ws in prop::collection::vec(0u32..5, 16), mask in 1u64..15) {
            let s = Scenario::chsh();
            let pts = all_strategies(&s);
            let mut terms = vec![(None, pr_box())];
            terms.extend(pts.iter().cloned().map(|p| (None::<()>, p)));
            let members: Vec<Behaviour> = terms.into_iter().map(|t| t.1).collect();
            let mut weights = ws.clone();
            weights.push(1);
            let m = InputCollection::from_masks(vec![mask & 3, mask >> 2]);
            prop_assume!(!m.is_empty());
            let mix = random_mixture(&s, &members, &weights);
            let total: u32 = weights.iter().sum();
            let restricted: Vec<(Q, Behaviour)> = weights
                .iter()
                .zip(&members)
                .map(|(&w, p)| (Q::new(w.into(), total.into()), p.restrict(&m).unwrap()))
                .collect();
            prop_assert_eq!(mix.restrict(&m).unwrap(), Behaviour::mix(&restricted).unwrap());
        }

        #[test]
        fn partial_predictability_monotone(idx in 0usize..16, big in 0u64..16, small in 0u64..16) {
            let s = Scenario::chsh();
            let pts = all_strategies(&s);
            let pr = pr_box();
            let mprime = InputCollection::from_masks(vec![big & 3, big >> 2]);
            let msub = InputCollection::from_masks(vec![big & small & 3, (big & small) >> 2]);
            for b in [pts[idx].clone(), pr] {
                if b.is_partially_predictable(&mprime) {
                    prop_assert!(b.is_partially_predictable(&msub));
                }
            }
        }

        #[test]
        fn bell_vertices_restrict_to_bell_vertices(idx in 0usize..64, mask in 1u64..64) {
            let s = Scenario::uniform(&[2, 2, 2], 2).unwrap();
            let pts = all_strategies(&s);
            let m = InputCollection::from_masks(vec![mask & 3, (mask >> 2) & 3, mask >> 4]);
            prop_assume!(!m.is_empty());
            let r = pts[idx].restrict(&m).unwrap();
            prop_assert!(r.is_predictable() && r.is_uncorrelated() && r.is_no_signalling());
        }
    }
}
