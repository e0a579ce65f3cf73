//! Correlation scenarios S = (I, M, O), input collections M′ ⊆ M and the
//! restrictions and bipartitions they induce.
//!
//! Parties, inputs and outputs keep their insertion order. That order
//! fixes the coordinate layout of every behaviour vector: contexts are
//! enumerated in mixed radix with the first party most significant, and
//! within a context the outcome tuples are enumerated the same way.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Input {
    pub name: String,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Party {
    pub name: String,
    pub inputs: Vec<Input>,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    parties: Vec<Party>,
    // derived layout
    ctx_offsets: Vec<usize>,
    ctx_sizes: Vec<usize>,
    dim: usize,
}

/// A finite correlation scenario. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scenario(Arc<Inner>);

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scenario(")?;
        for (i, p) in self.0.parties.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let outs: Vec<usize> = p.inputs.iter().map(|x| x.outputs.len()).collect();
            write!(f, "{}{:?}", p.name, outs)?;
        }
        write!(f, ")")
    }
}

fn check_unique<'a>(what: &str, names: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::validation(format!(
                "duplicate {what} identifier {n:?}"
            )));
        }
    }
    Ok(())
}

/// Default party names: A, B, C, ... then P27, P28, ...
pub fn default_party_name(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("P{}", i + 1)
    }
}

impl Scenario {
    pub fn new(parties: Vec<Party>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::validation("a scenario needs at least one party"));
        }
        check_unique("party", parties.iter().map(|p| &p.name))?;
        for p in &parties {
            if p.inputs.is_empty() {
                return Err(Error::validation(format!(
                    "party {:?} has no inputs",
                    p.name
                )));
            }
            if p.inputs.len() > 64 {
                return Err(Error::validation(format!(
                    "party {:?} has more than 64 inputs",
                    p.name
                )));
            }
            check_unique("input", p.inputs.iter().map(|x| &x.name))?;
            for x in &p.inputs {
                if x.outputs.is_empty() {
                    return Err(Error::validation(format!(
                        "input {:?} of party {:?} has no outputs",
                        x.name, p.name
                    )));
                }
                check_unique("output", x.outputs.iter())?;
            }
        }
        let radices: Vec<usize> = parties.iter().map(|p| p.inputs.len()).collect();
        let n_ctx = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .ok_or_else(|| Error::validation("too many contexts"))?;
        let mut ctx_offsets = Vec::with_capacity(n_ctx);
        let mut ctx_sizes = Vec::with_capacity(n_ctx);
        let mut dim = 0usize;
        let mut ctx = vec![0usize; parties.len()];
        for _ in 0..n_ctx {
            let size = parties
                .iter()
                .zip(&ctx)
                .try_fold(1usize, |acc, (p, &x)| {
                    acc.checked_mul(p.inputs[x].outputs.len())
                })
                .ok_or_else(|| Error::validation("too many outcomes"))?;
            ctx_offsets.push(dim);
            ctx_sizes.push(size);
            dim = dim
                .checked_add(size)
                .ok_or_else(|| Error::validation("ambient dimension overflow"))?;
            advance(&mut ctx, &radices);
        }
        Ok(Scenario(Arc::new(Inner {
            parties,
            ctx_offsets,
            ctx_sizes,
            dim,
        })))
    }

    /// Scenario where party `i` has `inputs[i]` inputs and every input has
    /// `outputs` outputs. Inputs and outputs are labelled `1, 2, ...`.
    pub fn uniform(inputs: &[usize], outputs: usize) -> Result<Self> {
        let outs: Vec<Vec<usize>> = inputs.iter().map(|&m| vec![outputs; m]).collect();
        Self::from_output_counts(&outs)
    }

    /// `counts[i][x]` is the number of outputs of input `x` of party `i`.
    pub fn from_output_counts(counts: &[Vec<usize>]) -> Result<Self> {
        let parties = counts
            .iter()
            .enumerate()
            .map(|(i, ins)| Party {
                name: default_party_name(i),
                inputs: ins
                    .iter()
                    .enumerate()
                    .map(|(x, &k)| Input {
                        name: (x + 1).to_string(),
                        outputs: (1..=k).map(|a| a.to_string()).collect(),
                    })
                    .collect(),
            })
            .collect();
        Self::new(parties)
    }

    /// Two parties, two inputs each, two outputs per input.
    pub fn chsh() -> Self {
        Self::uniform(&[2, 2], 2).expect("valid")
    }

    pub fn parties(&self) -> &[Party] {
        &self.0.parties
    }

    pub fn num_parties(&self) -> usize {
        self.0.parties.len()
    }

    pub fn party(&self, i: usize) -> &Party {
        &self.0.parties[i]
    }

    pub fn party_index(&self, name: &str) -> Option<usize> {
        self.0.parties.iter().position(|p| p.name == name)
    }

    pub fn num_inputs(&self, i: usize) -> usize {
        self.0.parties[i].inputs.len()
    }

    pub fn num_outputs(&self, i: usize, x: usize) -> usize {
        self.0.parties[i].inputs[x].outputs.len()
    }

    /// `counts[i][x]` = |O_x| for input `x` of party `i`; the shape of the
    /// scenario without names.
    pub fn output_counts(&self) -> Vec<Vec<usize>> {
        self.0
            .parties
            .iter()
            .map(|p| p.inputs.iter().map(|x| x.outputs.len()).collect())
            .collect()
    }

    pub fn input_radices(&self) -> Vec<usize> {
        self.0.parties.iter().map(|p| p.inputs.len()).collect()
    }

    /// Ambient dimension d = Σ_x⃗ |O_x⃗|.
    pub fn ambient_dim(&self) -> usize {
        self.0.dim
    }

    pub fn num_contexts(&self) -> usize {
        self.0.ctx_offsets.len()
    }

    /// D̃ = d − ∏_i |M_i|, the dimension of the set of all behaviours.
    pub fn full_dimension(&self) -> usize {
        self.ambient_dim() - self.num_contexts()
    }

    /// D = Σ_{∅≠V⊆I} ∏_{i∈V} Σ_{x_i} (|O_{x_i}| − 1), which factorises as
    /// ∏_i (1 + c_i) − 1.
    pub fn pironio_dimension(&self) -> usize {
        let prod: usize = self
            .0
            .parties
            .iter()
            .map(|p| 1 + p.inputs.iter().map(|x| x.outputs.len() - 1).sum::<usize>())
            .product();
        prod - 1
    }

    /// Every party has at least two inputs and every input at least two
    /// outputs.
    pub fn is_nontrivial(&self) -> bool {
        self.0
            .parties
            .iter()
            .all(|p| p.inputs.len() >= 2 && p.inputs.iter().all(|x| x.outputs.len() >= 2))
    }

    pub fn context_index(&self, ctx: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &x) in self.0.parties.iter().zip(ctx) {
            idx = idx * p.inputs.len() + x;
        }
        idx
    }

    pub fn context(&self, mut idx: usize) -> Vec<usize> {
        let mut ctx = vec![0; self.num_parties()];
        for i in (0..self.num_parties()).rev() {
            let r = self.num_inputs(i);
            ctx[i] = idx % r;
            idx /= r;
        }
        ctx
    }

    pub fn contexts(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.num_contexts()).map(|c| self.context(c))
    }

    pub fn context_offset(&self, ctx_idx: usize) -> usize {
        self.0.ctx_offsets[ctx_idx]
    }

    pub fn context_size(&self, ctx_idx: usize) -> usize {
        self.0.ctx_sizes[ctx_idx]
    }

    /// Output counts of each party in the given context.
    pub fn outcome_radices(&self, ctx: &[usize]) -> Vec<usize> {
        ctx.iter()
            .enumerate()
            .map(|(i, &x)| self.num_outputs(i, x))
            .collect()
    }

    /// Coordinate of wp(a⃗|x⃗) in the natural representation.
    pub fn coord(&self, ctx: &[usize], outcome: &[usize]) -> usize {
        let c = self.context_index(ctx);
        let mut o = 0;
        for (i, (&x, &a)) in ctx.iter().zip(outcome).enumerate() {
            o = o * self.num_outputs(i, x) + a;
        }
        self.0.ctx_offsets[c] + o
    }

    /// Index (context index, outcome tuple) of a coordinate.
    pub fn coord_label(&self, coord: usize) -> (Vec<usize>, Vec<usize>) {
        let c = match self.0.ctx_offsets.binary_search(&coord) {
            Ok(c) => c,
            Err(c) => c - 1,
        };
        let ctx = self.context(c);
        let radices = self.outcome_radices(&ctx);
        (ctx, unrank(coord - self.0.ctx_offsets[c], &radices))
    }

    /// Human-readable `inputs|outputs` label of a coordinate, identifiers
    /// joined with ":".
    pub fn coord_name(&self, coord: usize) -> String {
        let (ctx, out) = self.coord_label(coord);
        format!(
            "{}|{}",
            self.context_key(&ctx),
            self.outcome_key(&ctx, &out)
        )
    }

    pub fn context_key(&self, ctx: &[usize]) -> String {
        ctx.iter()
            .enumerate()
            .map(|(i, &x)| self.0.parties[i].inputs[x].name.as_str())
            .collect::<Vec<_>>()
            .join(":")
    }

    pub fn outcome_key(&self, ctx: &[usize], out: &[usize]) -> String {
        ctx.iter()
            .zip(out)
            .enumerate()
            .map(|(i, (&x, &a))| self.0.parties[i].inputs[x].outputs[a].as_str())
            .collect::<Vec<_>>()
            .join(":")
    }

    /// Total number of local deterministic strategies ∏_i ∏_{x_i} |O_{x_i}|,
    /// saturating at `usize::MAX`.
    pub fn num_local_strategies(&self) -> usize {
        self.0
            .parties
            .iter()
            .flat_map(|p| p.inputs.iter().map(|x| x.outputs.len()))
            .fold(1usize, |acc, k| acc.saturating_mul(k))
    }

    /// Number of predictable (possibly signalling) behaviours ∏_x⃗ |O_x⃗|,
    /// saturating.
    pub fn num_predictable(&self) -> usize {
        self.0
            .ctx_sizes
            .iter()
            .fold(1usize, |acc, &k| acc.saturating_mul(k))
    }

    pub fn full_collection(&self) -> InputCollection {
        InputCollection {
            masks: self
                .0
                .parties
                .iter()
                .map(|p| full_mask(p.inputs.len()))
                .collect(),
        }
    }

    pub fn empty_collection(&self) -> InputCollection {
        InputCollection {
            masks: vec![0; self.num_parties()],
        }
    }

    /// M^{I′}: all inputs of the parties in `parties`, nothing elsewhere.
    pub fn party_collection(&self, parties: &[usize]) -> Result<InputCollection> {
        let mut m = self.empty_collection();
        for &i in parties {
            if i >= self.num_parties() {
                return Err(Error::validation(format!("party index {i} out of range")));
            }
            m.masks[i] = full_mask(self.num_inputs(i));
        }
        Ok(m)
    }

    /// S_{|M′}: the parties with nonempty M′_i, keeping only inputs in M′_i.
    pub fn restrict(&self, m: &InputCollection) -> Result<Restriction> {
        m.validate(self)?;
        if m.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        let mut parties = Vec::new();
        let mut party_map = Vec::new();
        let mut input_map = Vec::new();
        for (i, p) in self.0.parties.iter().enumerate() {
            let inputs: Vec<usize> = m.inputs_of(i).collect();
            if inputs.is_empty() {
                continue;
            }
            parties.push(Party {
                name: p.name.clone(),
                inputs: inputs.iter().map(|&x| p.inputs[x].clone()).collect(),
            });
            party_map.push(i);
            input_map.push(inputs);
        }
        Ok(Restriction {
            parent: self.clone(),
            sub: Scenario::new(parties)?,
            parties: party_map,
            inputs: input_map,
        })
    }

    /// (S_{|M′}, S_{|M′⊥}). When M′ = M or M′ = ∅ the bipartition is
    /// redundant and the missing side is [`Half::Empty`].
    pub fn bipartition(&self, m: &InputCollection) -> Result<(Half, Half)> {
        m.validate(self)?;
        let c = m.complement(self);
        let left = if m.is_empty() {
            Half::Empty
        } else {
            Half::Sub(self.restrict(m)?)
        };
        let right = if c.is_empty() {
            Half::Empty
        } else {
            Half::Sub(self.restrict(&c)?)
        };
        Ok((left, right))
    }

    /// All ∏_i 2^{|M_i|} collections. Order: each party's subset is a bit
    /// mask over its inputs (input j is bit j); the masks are counted in
    /// mixed radix with the last party varying fastest. With
    /// `include_trivial = false` the all-empty and the full collection are
    /// skipped.
    pub fn all_collections(&self, include_trivial: bool) -> CollectionIter {
        let radices: Vec<u64> = self
            .0
            .parties
            .iter()
            .map(|p| 1u64 << p.inputs.len())
            .collect();
        let total = radices
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r))
            .unwrap_or(u64::MAX);
        CollectionIter {
            radices,
            next: 0,
            total,
            include_trivial,
        }
    }

    pub fn num_collections(&self) -> u64 {
        self.all_collections(true).total
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn advance(ctx: &mut [usize], radices: &[usize]) {
    for i in (0..ctx.len()).rev() {
        ctx[i] += 1;
        if ctx[i] < radices[i] {
            return;
        }
        ctx[i] = 0;
    }
}

/// Mixed-radix decomposition, first digit most significant.
pub fn unrank(mut idx: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = idx % radices[i];
        idx /= radices[i];
    }
    out
}

pub fn rank(digits: &[usize], radices: &[usize]) -> usize {
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

/// Iterates over all tuples of the given mixed radix in rank order.
pub fn tuples(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |k| unrank(k, radices))
}

pub struct CollectionIter {
    radices: Vec<u64>,
    next: u64,
    total: u64,
    include_trivial: bool,
}

impl Iterator for CollectionIter {
    type Item = InputCollection;

    fn next(&mut self) -> Option<InputCollection> {
        loop {
            if self.next >= self.total {
                return None;
            }
            let mut k = self.next;
            self.next += 1;
            let mut masks = vec![0u64; self.radices.len()];
            for i in (0..self.radices.len()).rev() {
                masks[i] = k % self.radices[i];
                k /= self.radices[i];
            }
            let c = InputCollection { masks };
            if !self.include_trivial {
                let full = c.masks.iter().zip(&self.radices).all(|(&m, &r)| m == r - 1);
                if c.is_empty() || full {
                    continue;
                }
            }
            return Some(c);
        }
    }
}

/// A per-party subset M′_i ⊆ M_i of input indices, stored as bit masks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputCollection {
    masks: Vec<u64>,
}

impl fmt::Debug for InputCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.masks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let xs: Vec<String> = (0..64)
                .filter(|b| m >> b & 1 == 1)
                .map(|b| (b + 1).to_string())
                .collect();
            write!(f, "{{{}}}", xs.join(" "))?;
        }
        write!(f, ")")
    }
}

impl InputCollection {
    /// Builds a collection from per-party input index lists.
    pub fn new(s: &Scenario, sets: &[Vec<usize>]) -> Result<Self> {
        if sets.len() != s.num_parties() {
            return Err(Error::DimensionMismatch {
                expected: s.num_parties(),
                got: sets.len(),
            });
        }
        let mut masks = Vec::with_capacity(sets.len());
        for (i, set) in sets.iter().enumerate() {
            let mut m = 0u64;
            for &x in set {
                if x >= s.num_inputs(i) {
                    return Err(Error::validation(format!(
                        "input index {x} out of range for party {:?}",
                        s.party(i).name
                    )));
                }
                m |= 1 << x;
            }
            masks.push(m);
        }
        Ok(InputCollection { masks })
    }

    pub fn from_masks(masks: Vec<u64>) -> Self {
        InputCollection { masks }
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn validate(&self, s: &Scenario) -> Result<()> {
        if self.masks.len() != s.num_parties() {
            return Err(Error::DimensionMismatch {
                expected: s.num_parties(),
                got: self.masks.len(),
            });
        }
        for (i, &m) in self.masks.iter().enumerate() {
            if m & !full_mask(s.num_inputs(i)) != 0 {
                return Err(Error::validation(format!(
                    "collection names inputs that party {:?} does not have",
                    s.party(i).name
                )));
            }
        }
        Ok(())
    }

    pub fn num_parties(&self) -> usize {
        self.masks.len()
    }

    pub fn contains(&self, party: usize, input: usize) -> bool {
        self.masks[party] >> input & 1 == 1
    }

    pub fn inputs_of(&self, party: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.masks[party];
        (0..64).filter(move |b| m >> b & 1 == 1)
    }

    pub fn count(&self, party: usize) -> usize {
        self.masks[party].count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.masks.iter().all(|&m| m == 0)
    }

    pub fn is_full(&self, s: &Scenario) -> bool {
        self.masks
            .iter()
            .enumerate()
            .all(|(i, &m)| m == full_mask(s.num_inputs(i)))
    }

    /// M′⊥_i = M_i ∖ M′_i.
    pub fn complement(&self, s: &Scenario) -> InputCollection {
        InputCollection {
            masks: self
                .masks
                .iter()
                .enumerate()
                .map(|(i, &m)| full_mask(s.num_inputs(i)) & !m)
                .collect(),
        }
    }

    pub fn union(&self, other: &InputCollection) -> InputCollection {
        InputCollection {
            masks: self
                .masks
                .iter()
                .zip(&other.masks)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn intersect(&self, other: &InputCollection) -> InputCollection {
        InputCollection {
            masks: self
                .masks
                .iter()
                .zip(&other.masks)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Componentwise M′_i ⊆ M″_i.
    pub fn is_subset(&self, other: &InputCollection) -> bool {
        self.masks
            .iter()
            .zip(&other.masks)
            .all(|(a, b)| a & !b == 0)
    }

    /// Every party has either all of its inputs or none of them.
    pub fn is_party_block(&self, s: &Scenario) -> bool {
        self.masks
            .iter()
            .enumerate()
            .all(|(i, &m)| m == 0 || m == full_mask(s.num_inputs(i)))
    }

    /// F_x⃗ = {i : x_i ∈ M′_i} as a sorted party list.
    pub fn deterministic_parties(&self, ctx: &[usize]) -> Vec<usize> {
        ctx.iter()
            .enumerate()
            .filter(|&(i, &x)| self.contains(i, x))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn partition(&self, ctx: &[usize]) -> ContextPartition {
        let (f, rest): (Vec<usize>, Vec<usize>) =
            (0..ctx.len()).partition(|&i| self.contains(i, ctx[i]));
        ContextPartition {
            deterministic: f,
            rest,
        }
    }

    /// Collection drawn from the first `counts[i]` inputs of each party.
    pub fn leading(s: &Scenario, counts: &[usize]) -> Result<Self> {
        if counts.len() != s.num_parties() {
            return Err(Error::DimensionMismatch {
                expected: s.num_parties(),
                got: counts.len(),
            });
        }
        let sets: Vec<Vec<usize>> = counts.iter().map(|&k| (0..k).collect()).collect();
        Self::new(s, &sets)
    }
}

/// F_x⃗ and I ∖ F_x⃗ for one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextPartition {
    pub deterministic: Vec<usize>,
    pub rest: Vec<usize>,
}

/// A subscenario together with the index maps back into its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub parent: Scenario,
    pub sub: Scenario,
    /// `parties[k]` is the parent index of sub-party `k`.
    pub parties: Vec<usize>,
    /// `inputs[k][j]` is the parent input index of input `j` of sub-party `k`.
    pub inputs: Vec<Vec<usize>>,
}

impl Restriction {
    /// Position of parent party `i` among the sub-parties, if present.
    pub fn sub_party(&self, i: usize) -> Option<usize> {
        self.parties.iter().position(|&p| p == i)
    }

    /// Position of parent input `x` of parent party `i` in the subscenario.
    pub fn sub_input(&self, i: usize, x: usize) -> Option<(usize, usize)> {
        let k = self.sub_party(i)?;
        let j = self.inputs[k].iter().position(|&y| y == x)?;
        Some((k, j))
    }

    /// The collection of the parent that this restriction keeps.
    pub fn collection(&self) -> InputCollection {
        let mut masks = vec![0u64; self.parent.num_parties()];
        for (k, &i) in self.parties.iter().enumerate() {
            for &x in &self.inputs[k] {
                masks[i] |= 1 << x;
            }
        }
        InputCollection { masks }
    }
}

/// One side of a bipartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Half {
    /// Marker for the missing side of a redundant bipartition.
    Empty,
    Sub(Restriction),
}

impl Half {
    pub fn as_sub(&self) -> Option<&Restriction> {
        match self {
            Half::Empty => None,
            Half::Sub(r) => Some(r),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Half::Empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(s: &Scenario, sets: &[&[usize]]) -> InputCollection {
        let v: Vec<Vec<usize>> = sets.iter().map(|x| x.to_vec()).collect();
        InputCollection::new(s, &v).unwrap()
    }

    #[test]
    fn chsh_dimensions() {
        let s = Scenario::chsh();
        assert_eq!(s.ambient_dim(), 16);
        assert_eq!(s.full_dimension(), 12);
        assert_eq!(s.pironio_dimension(), 8);
        assert!(s.is_nontrivial());
    }

    #[test]
    fn simplex_dimensions() {
        let s = Scenario::uniform(&[1], 3).unwrap();
        assert_eq!(s.ambient_dim(), 3);
        assert_eq!(s.full_dimension(), 2);
        assert_eq!(s.pironio_dimension(), 2);
        assert!(!s.is_nontrivial());
    }

    #[test]
    fn derived_dimensions() {
        // Sum over the seven nonempty party subsets, each party contributing 2.
        let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
        let by_subsets: usize = (1u32..8).map(|v| 2usize.pow(v.count_ones())).sum();
        assert_eq!(by_subsets, 26);
        assert_eq!(t.pironio_dimension(), 26);
        let b = Scenario::uniform(&[3, 3], 2).unwrap();
        assert_eq!(b.ambient_dim(), 9 * 4);
        assert_eq!(b.full_dimension(), 36 - 9);
    }

    #[test]
    fn restriction_examples() {
        let s = Scenario::chsh();
        let r = s.restrict(&col(&s, &[&[], &[0]])).unwrap();
        assert_eq!(r.sub.num_parties(), 1);
        assert_eq!(r.sub.num_inputs(0), 1);
        assert_eq!(r.parties, vec![1]);
        assert_eq!(s.restrict(&s.full_collection()).unwrap().sub, s);
        assert_eq!(
            s.restrict(&s.empty_collection()).unwrap_err(),
            Error::EmptyRestriction
        );
        let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
        let r = t.restrict(&t.party_collection(&[0]).unwrap()).unwrap();
        assert_eq!(r.sub.num_parties(), 1);
        assert_eq!(r.sub.num_inputs(0), 2);
    }

    #[test]
    fn complement_examples() {
        let s = Scenario::chsh();
        let m = col(&s, &[&[0], &[]]);
        assert_eq!(m.complement(&s), col(&s, &[&[1], &[0, 1]]));
        assert!(s.full_collection().complement(&s).is_empty());
    }

    #[test]
    fn bipartition_examples() {
        let s = Scenario::uniform(&[3, 3], 2).unwrap();
        let (l, r) = s.bipartition(&col(&s, &[&[0], &[0]])).unwrap();
        let (l, r) = (l.as_sub().unwrap(), r.as_sub().unwrap());
        assert_eq!(l.sub.input_radices(), vec![1, 1]);
        assert_eq!(r.sub.input_radices(), vec![2, 2]);
        assert_eq!(l.collection().union(&r.collection()), s.full_collection());
        let (l, r) = s.bipartition(&s.empty_collection()).unwrap();
        assert!(l.is_empty());
        assert_eq!(r.as_sub().unwrap().sub, s);
    }

    #[test]
    fn collection_counts() {
        let b = Scenario::uniform(&[3, 3], 2).unwrap();
        assert_eq!(b.all_collections(true).count(), 64);
        assert_eq!(b.all_collections(false).count(), 62);
        let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
        assert_eq!(t.all_collections(true).count(), 64);
        assert_eq!(t.all_collections(false).count(), 62);
        assert_eq!(Scenario::chsh().all_collections(true).count(), 16);
        let all: std::collections::HashSet<_> = b.all_collections(true).collect();
        assert_eq!(all.len(), 64);
    }

    #[test]
    fn coordinates_round_trip() {
        let s = Scenario::from_output_counts(&[vec![2, 3], vec![1, 2, 2]]).unwrap();
        for c in 0..s.ambient_dim() {
            let (ctx, out) = s.coord_label(c);
            assert_eq!(s.coord(&ctx, &out), c);
        }
    }

    #[test]
    fn context_partition() {
        let s = Scenario::chsh();
        let m = col(&s, &[&[0], &[1]]);
        let p = m.partition(&[0, 0]);
        assert_eq!(p.deterministic, vec![0]);
        assert_eq!(p.rest, vec![1]);
    }

    fn small_scenario() -> impl Strategy<Value = Scenario> {
        prop::collection::vec(prop::collection::vec(1usize..4, 1..4), 1..4)
            .prop_map(|c| Scenario::from_output_counts(&c).unwrap())
    }

    proptest! {
        #[test]
        fn restriction_lowers_pironio_dimension(s in small_scenario(), seed in any::<u64>()) {
            let n = s.num_collections();
            let m = s.all_collections(true).nth((seed % n) as usize).unwrap();
            prop_assume!(!m.is_empty());
            let r = s.restrict(&m).unwrap();
            prop_assert!(r.sub.pironio_dimension() <= s.pironio_dimension());
            if m.is_full(&s) {
                prop_assert_eq!(&r.sub, &s);
            }
            // Restricting again with the induced full collection is idempotent.
            let again = r.sub.restrict(&r.sub.full_collection()).unwrap();
            prop_assert_eq!(&again.sub, &r.sub);
            prop_assert_eq!(m.complement(&s).complement(&s), m);
        }

        #[test]
        fn strict_drop_for_nontrivial(m1 in 2usize..4, m2 in 2usize..4, seed in any::<u64>()) {
            let s = Scenario::uniform(&[m1, m2], 2).unwrap();
            let n = s.num_collections();
            let m = s.all_collections(true).nth((seed % n) as usize).unwrap();
            prop_assume!(!m.is_empty() && !m.is_full(&s));
            let r = s.restrict(&m).unwrap();
            prop_assert!(r.sub.pironio_dimension() < s.pironio_dimension());
        }
    }
}
