//! Driving distributions over edits and seeded simulation of the walk.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::edits::{Edit, Sign};
use crate::error::{Error, Result};
use crate::hostgraph::{EdgeSet, HostGraph};
use crate::scalar::Scalar;

/// Default bound on materialized edit families and enumerated state spaces.
pub const DEFAULT_EDIT_CAP: usize = 1 << 20;

/// Largest `m` for which [`empirical_distribution`] builds a dense histogram.
pub const HISTOGRAM_MAX_EDGES: usize = 20;

/// A finite probability distribution over edits.
#[derive(Clone, Debug)]
pub struct WeightedEdits<S: Scalar = f64> {
    m: usize,
    kind: Kind<S>,
    sampler: Sampler,
}

#[derive(Clone, Debug)]
enum Kind<S: Scalar> {
    Explicit(Vec<(Edit, S)>),
    Lazy(IntersectionModel<S>),
}

#[derive(Clone, Debug)]
enum Sampler {
    Explicit(WeightedAliasIndex<f64>),
    Intersection(WeightedAliasIndex<f64>),
}

/// All edits sharing one support, with their total weight.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorClass<S> {
    pub support: EdgeSet,
    pub weight: S,
    /// Some generator with this support.
    pub representative: Edit,
}

/// Vertex-neighbourhood resampling on `K_{n,N}`: pick `v` uniformly, draw a
/// size `k ~ mu`, then reset `v`'s neighbourhood to a uniform `k`-subset.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionModel<S> {
    pub ground: usize,
    pub attributes: usize,
    pub mu: Vec<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectionMode {
    Explicit,
    Lazy,
}

impl<S: Scalar> IntersectionModel<S> {
    pub fn host(&self) -> HostGraph {
        HostGraph::complete_bipartite(self.ground, self.attributes)
    }

    pub fn edge_count(&self) -> usize {
        self.ground * self.attributes
    }

    /// `y_{v,A}`: `+` on `{v,a}` for `a ∈ A`, `-` on the rest of `v`'s edges.
    /// `attrs` is a bitmask over the attribute symbols.
    pub fn edit(&self, v: usize, attrs: u64) -> Edit {
        let n_attr = self.attributes;
        let signs = (0..n_attr).map(|u| {
            (v * n_attr + u, if attrs >> u & 1 == 1 { Sign::Plus } else { Sign::Minus })
        });
        Edit::from_signs(self.edge_count(), signs).expect("intersection edit is well formed")
    }

    /// `w(y_{v,A}) = mu(|A|) / (n * C(N, |A|))`.
    pub fn weight(&self, size: usize) -> S {
        self.mu[size].clone() / (S::from_usize(self.ground) * binomial::<S>(self.attributes, size))
    }

    fn edits(&self) -> Vec<(Edit, S)> {
        let mut out = Vec::new();
        for v in 0..self.ground {
            for attrs in 0..(1u64 << self.attributes) {
                let w = self.weight(attrs.count_ones() as usize);
                if !w.is_zero() {
                    out.push((self.edit(v, attrs), w));
                }
            }
        }
        out
    }

    /// Returns `(v, attrs)` when `edit` is some `y_{v,A}`.
    fn decode(&self, edit: &Edit) -> Option<(usize, u64)> {
        let n_attr = self.attributes;
        let &(first, _) = edit.signs().first()?;
        let v = first / n_attr;
        if edit.signs().len() != n_attr || first != v * n_attr {
            return None;
        }
        let mut attrs = 0u64;
        for (u, &(e, s)) in edit.signs().iter().enumerate() {
            if e != v * n_attr + u {
                return None;
            }
            if s == Sign::Plus {
                attrs |= 1 << u;
            }
        }
        Some((v, attrs))
    }
}

fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    let k = k.min(n - k);
    (0..k).fold(S::one(), |acc, i| acc * S::from_usize(n - i) / S::from_usize(i + 1))
}

fn check_total<S: Scalar>(total: &S) -> Result<()> {
    if !total.close_to(&S::one(), 1e-12) {
        return Err(Error::BadDistribution(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

impl<S: Scalar> WeightedEdits<S> {
    /// Explicit distribution; weights must be positive and sum to one.
    pub fn custom(m: usize, items: Vec<(Edit, S)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::BadDistribution("no edits".into()));
        }
        let mut total = S::zero();
        for (edit, w) in &items {
            if edit.universe() != m {
                return Err(Error::HostMismatch { left: m, right: edit.universe() });
            }
            if !w.is_positive() {
                return Err(Error::BadDistribution(format!("weight {w} of edit {edit:?} is not positive")));
            }
            total = total + w.clone();
        }
        check_total(&total)?;
        let sampler = WeightedAliasIndex::new(items.iter().map(|(_, w)| w.to_f64()).collect())
            .map_err(|e| Error::BadDistribution(e.to_string()))?;
        Ok(Self { m, kind: Kind::Explicit(items), sampler: Sampler::Explicit(sampler) })
    }

    pub fn universe(&self) -> usize {
        self.m
    }

    /// Number of edits with positive weight.
    pub fn len(&self) -> u128 {
        match &self.kind {
            Kind::Explicit(items) => items.len() as u128,
            Kind::Lazy(model) => {
                let sizes: u128 = (0..=model.attributes)
                    .filter(|&k| !model.mu[k].is_zero())
                    .map(|k| binomial::<f64>(model.attributes, k).round() as u128)
                    .sum();
                model.ground as u128 * sizes
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.kind, Kind::Lazy(_))
    }

    pub fn items(&self) -> Option<&[(Edit, S)]> {
        match &self.kind {
            Kind::Explicit(items) => Some(items),
            Kind::Lazy(_) => None,
        }
    }

    pub fn intersection_model(&self) -> Option<&IntersectionModel<S>> {
        match &self.kind {
            Kind::Lazy(model) => Some(model),
            Kind::Explicit(_) => None,
        }
    }

    /// All `(edit, weight)` pairs, materializing a lazy family if it has at
    /// most `cap` members.
    pub fn explicit_items(&self, cap: usize) -> Result<Cow<'_, [(Edit, S)]>> {
        match &self.kind {
            Kind::Explicit(items) => Ok(Cow::Borrowed(items)),
            Kind::Lazy(model) => {
                let needed = self.len();
                if needed > cap as u128 {
                    return Err(Error::CapExceeded { what: "edit family size", needed, cap: cap as u128 });
                }
                Ok(Cow::Owned(model.edits()))
            }
        }
    }

    /// Closed-form weight of `edit` (zero when it is not in the family).
    pub fn weight_of(&self, edit: &Edit) -> S {
        match &self.kind {
            Kind::Explicit(items) => items
                .iter()
                .filter(|(x, _)| x == edit)
                .fold(S::zero(), |acc, (_, w)| acc + w.clone()),
            Kind::Lazy(model) => match model.decode(edit) {
                Some((v, attrs)) if edit.universe() == model.edge_count() && v < model.ground => {
                    model.weight(attrs.count_ones() as usize)
                }
                _ => S::zero(),
            },
        }
    }

    /// Edits grouped by support, sorted by support.
    pub fn classes(&self) -> Vec<GeneratorClass<S>> {
        match &self.kind {
            Kind::Explicit(items) => {
                let mut groups: BTreeMap<EdgeSet, (S, Edit)> = BTreeMap::new();
                for (edit, w) in items {
                    groups
                        .entry(edit.supp())
                        .and_modify(|(total, _)| *total = total.clone() + w.clone())
                        .or_insert_with(|| (w.clone(), edit.clone()));
                }
                groups
                    .into_iter()
                    .map(|(support, (weight, representative))| GeneratorClass { support, weight, representative })
                    .collect()
            }
            Kind::Lazy(model) => {
                let k = (0..=model.attributes).find(|&k| !model.mu[k].is_zero()).unwrap_or(0);
                let attrs = (1u64 << k) - 1;
                let mut out: Vec<_> = (0..model.ground)
                    .map(|v| {
                        let representative = model.edit(v, attrs);
                        GeneratorClass {
                            support: representative.supp(),
                            weight: S::one() / S::from_usize(model.ground),
                            representative,
                        }
                    })
                    .collect();
                out.sort_by(|a, b| a.support.cmp(&b.support));
                out
            }
        }
    }

    pub fn supports(&self) -> Vec<EdgeSet> {
        self.classes().into_iter().map(|c| c.support).collect()
    }

    /// Union of all generator supports.
    pub fn covered_edges(&self) -> EdgeSet {
        self.classes().iter().fold(EdgeSet::empty(self.m), |acc, c| acc.union(&c.support))
    }

    pub fn total_weight(&self) -> S {
        match &self.kind {
            Kind::Explicit(items) => items.iter().fold(S::zero(), |acc, (_, w)| acc + w.clone()),
            Kind::Lazy(_) => self.classes().into_iter().fold(S::zero(), |acc, c| acc + c.weight),
        }
    }

    /// Draws an edit and applies it to `state` in place.
    pub fn step_in_place<R: Rng + ?Sized>(&self, state: &mut EdgeSet, rng: &mut R) {
        match (&self.kind, &self.sampler) {
            (Kind::Explicit(items), Sampler::Explicit(alias)) => {
                items[alias.sample(rng)].0.apply_in_place(state);
            }
            (Kind::Lazy(model), Sampler::Intersection(sizes)) => {
                let v = rng.random_range(0..model.ground);
                let k = sizes.sample(rng);
                let base = v * model.attributes;
                for u in 0..model.attributes {
                    state.remove(base + u);
                }
                for u in index::sample(rng, model.attributes, k) {
                    state.insert(base + u);
                }
            }
            _ => unreachable!("sampler matches distribution kind"),
        }
    }

    /// Draws an edit.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Edit {
        match (&self.kind, &self.sampler) {
            (Kind::Explicit(items), Sampler::Explicit(alias)) => items[alias.sample(rng)].0.clone(),
            (Kind::Lazy(model), Sampler::Intersection(sizes)) => {
                let v = rng.random_range(0..model.ground);
                let k = sizes.sample(rng);
                let attrs = index::sample(rng, model.attributes, k).into_iter().fold(0u64, |a, u| a | 1 << u);
                model.edit(v, attrs)
            }
            _ => unreachable!("sampler matches distribution kind"),
        }
    }
}

/// Simple edit process: `e+` with weight `p_e/m`, `e-` with `(1-p_e)/m`.
pub fn simple_edit_weights<S: Scalar>(g: &HostGraph, p: &[S]) -> Result<WeightedEdits<S>> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    if p.len() != m {
        return Err(Error::LengthMismatch(p.len(), m));
    }
    check_probabilities(p)?;
    let scale = S::from_usize(m);
    let mut items = Vec::with_capacity(2 * m);
    for (e, pe) in p.iter().enumerate() {
        items.push((Edit::simple(m, e, Sign::Plus)?, pe.clone() / scale.clone()));
        items.push((Edit::simple(m, e, Sign::Minus)?, (S::one() - pe.clone()) / scale.clone()));
    }
    WeightedEdits::custom(m, items)
}

pub fn check_probabilities<S: Scalar>(p: &[S]) -> Result<()> {
    for (edge, pe) in p.iter().enumerate() {
        if !(pe.is_positive() && *pe < S::one()) {
            return Err(Error::ProbabilityOutOfRange { edge, value: pe.to_f64() });
        }
    }
    Ok(())
}

/// Moran edit process: for each oriented edge `(u,v)`, clear `N(u)` and add
/// `{u,v}`; all `2m` edits weigh `1/(2m)`.
pub fn moran_weights<S: Scalar>(g: &HostGraph) -> Result<WeightedEdits<S>> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let w = S::from_ratio(1, 2 * m as i64);
    let mut items = Vec::with_capacity(2 * m);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        for (u, _v) in [(a, b), (b, a)] {
            items.push((moran_edit(g, u, e), w.clone()));
        }
    }
    WeightedEdits::custom(m, items)
}

/// `y_(u,v)`: `-` on every edge at `u`, except `+` on `e = {u,v}`.
pub fn moran_edit(g: &HostGraph, u: usize, e: usize) -> Edit {
    let signs = g
        .incident_edges(u)
        .iter()
        .map(|&f| (f, if f == e { Sign::Plus } else { Sign::Minus }));
    Edit::from_signs(g.edge_count(), signs).expect("incident edges are distinct")
}

/// Random-intersection resampling on `K_{n,N}`. Returns the host alongside the
/// distribution. `mu` is a law on neighbourhood sizes `0..=N`.
pub fn intersection_weights<S: Scalar>(
    ground: usize,
    attributes: usize,
    mu: Vec<S>,
    mode: IntersectionMode,
    cap: usize,
) -> Result<(HostGraph, WeightedEdits<S>)> {
    if ground == 0 || attributes == 0 {
        return Err(Error::InvalidArgument("intersection model needs n, N >= 1".into()));
    }
    if attributes > 62 {
        return Err(Error::CapExceeded { what: "attribute symbols", needed: attributes as u128, cap: 62 });
    }
    if mu.len() != attributes + 1 {
        return Err(Error::BadDistribution(format!(
            "mu has {} entries, expected N+1 = {}",
            mu.len(),
            attributes + 1
        )));
    }
    if mu.iter().any(|x| x.is_negative()) {
        return Err(Error::BadDistribution("mu has a negative entry".into()));
    }
    check_total(&mu.iter().fold(S::zero(), |a, x| a + x.clone()))?;
    let model = IntersectionModel { ground, attributes, mu };
    let host = model.host();
    let dist = match mode {
        IntersectionMode::Explicit => {
            let needed = ground as u128 * (1u128 << attributes);
            if needed > cap as u128 {
                return Err(Error::CapExceeded { what: "explicit intersection edits", needed, cap: cap as u128 });
            }
            WeightedEdits::custom(model.edge_count(), model.edits())?
        }
        IntersectionMode::Lazy => {
            let sizes = WeightedAliasIndex::new(model.mu.iter().map(Scalar::to_f64).collect())
                .map_err(|e| Error::BadDistribution(e.to_string()))?;
            WeightedEdits { m: model.edge_count(), kind: Kind::Lazy(model), sampler: Sampler::Intersection(sizes) }
        }
    };
    Ok((host, dist))
}

/// Edge-probability presets whose stationary laws are classical random graphs.
pub mod presets {
    use super::*;

    /// Every edge with probability `p` (`G(n,p)` on `K_n`).
    pub fn erdos_renyi<S: Scalar>(g: &HostGraph, p: S) -> Vec<S> {
        vec![p; g.edge_count()]
    }

    /// Chung–Lu expected-degree model: `p_uv = k_u k_v / sum_w k_w`.
    pub fn chung_lu<S: Scalar>(g: &HostGraph, expected_degrees: &[S]) -> Result<Vec<S>> {
        if expected_degrees.len() != g.vertex_count() {
            return Err(Error::LengthMismatch(expected_degrees.len(), g.vertex_count()));
        }
        let total = expected_degrees.iter().fold(S::zero(), |a, k| a + k.clone());
        if !total.is_positive() {
            return Err(Error::InvalidArgument("expected degrees must have a positive sum".into()));
        }
        let p: Vec<S> = g
            .edges()
            .iter()
            .map(|&(u, v)| expected_degrees[u].clone() * expected_degrees[v].clone() / total.clone())
            .collect();
        check_probabilities(&p)?;
        Ok(p)
    }

    /// Two-block stochastic block model: `p` inside a block, `q` across.
    pub fn stochastic_block<S: Scalar>(g: &HostGraph, in_first_block: &[bool], p: S, q: S) -> Result<Vec<S>> {
        if in_first_block.len() != g.vertex_count() {
            return Err(Error::LengthMismatch(in_first_block.len(), g.vertex_count()));
        }
        Ok(g.edges()
            .iter()
            .map(|&(u, v)| if in_first_block[u] == in_first_block[v] { p.clone() } else { q.clone() })
            .collect())
    }
}

/// Seeded snapshots of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: EdgeSet,
    /// `(t, state)` for every `t` divisible by `thin`, starting at `t = 0`.
    pub snapshots: Vec<(u64, EdgeSet)>,
    pub final_state: EdgeSet,
    pub seed: u64,
    pub steps: u64,
    pub thin: u64,
}

/// RNG stream for chain `chain` of a run seeded with `seed`.
pub fn rng_for(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

/// One transition.
pub fn step<S: Scalar, R: Rng + ?Sized>(dist: &WeightedEdits<S>, state: &EdgeSet, rng: &mut R) -> EdgeSet {
    let mut next = state.clone();
    dist.step_in_place(&mut next, rng);
    next
}

/// Runs `steps` transitions from `initial`, calling `visit(t, state)` for
/// `t = 0..=steps`. Returns the final state.
pub fn run<S, R, F>(dist: &WeightedEdits<S>, initial: &EdgeSet, steps: u64, rng: &mut R, mut visit: F) -> Result<EdgeSet>
where
    S: Scalar,
    R: Rng + ?Sized,
    F: FnMut(u64, &EdgeSet),
{
    initial.check_same_host(&EdgeSet::empty(dist.universe()))?;
    let mut state = initial.clone();
    visit(0, &state);
    for t in 1..=steps {
        dist.step_in_place(&mut state, rng);
        visit(t, &state);
    }
    Ok(state)
}

pub fn simulate<S: Scalar>(
    dist: &WeightedEdits<S>,
    initial: &EdgeSet,
    steps: u64,
    seed: u64,
    thin: u64,
) -> Result<Trajectory> {
    simulate_chain(dist, initial, steps, seed, 0, thin)
}

fn simulate_chain<S: Scalar>(
    dist: &WeightedEdits<S>,
    initial: &EdgeSet,
    steps: u64,
    seed: u64,
    chain: u64,
    thin: u64,
) -> Result<Trajectory> {
    if thin == 0 {
        return Err(Error::InvalidArgument("thin must be at least 1".into()));
    }
    let mut rng = rng_for(seed, chain);
    let mut snapshots = Vec::new();
    let final_state = run(dist, initial, steps, &mut rng, |t, s| {
        if t % thin == 0 {
            snapshots.push((t, s.clone()));
        }
    })?;
    Ok(Trajectory { initial: initial.clone(), snapshots, final_state, seed, steps, thin })
}

/// Independent chains, each on its own stream `(seed, chain index)`.
pub fn simulate_chains<S: Scalar>(
    dist: &WeightedEdits<S>,
    initial: &EdgeSet,
    steps: u64,
    seed: u64,
    chains: u64,
    thin: u64,
) -> Result<Vec<Trajectory>> {
    (0..chains)
        .into_par_iter()
        .map(|c| simulate_chain(dist, initial, steps, seed, c, thin))
        .collect()
}

/// Normalized histogram over all `2^m` states (indexed by bitmask) of
/// `samples` states taken every `stride` steps after `burn_in` steps.
pub fn empirical_distribution<S: Scalar, R: Rng + ?Sized>(
    dist: &WeightedEdits<S>,
    initial: &EdgeSet,
    burn_in: u64,
    samples: u64,
    stride: u64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let m = dist.universe();
    if m > HISTOGRAM_MAX_EDGES {
        return Err(Error::CapExceeded { what: "edges for a dense histogram", needed: m as u128, cap: HISTOGRAM_MAX_EDGES as u128 });
    }
    if samples == 0 || stride == 0 {
        return Err(Error::InvalidArgument("samples and stride must be positive".into()));
    }
    initial.check_same_host(&EdgeSet::empty(m))?;
    let mut counts = vec![0u64; 1 << m];
    let mut state = initial.clone();
    for _ in 0..burn_in {
        dist.step_in_place(&mut state, rng);
    }
    for _ in 0..samples {
        for _ in 0..stride {
            dist.step_in_place(&mut state, rng);
        }
        counts[state.mask() as usize] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / samples as f64).collect())
}
