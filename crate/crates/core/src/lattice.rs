//! Union-closed lattice of generator supports, its Möbius function, and the
//! eigenvalue/multiplicity computation for random walks on its chambers.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::edits::Edit;
use crate::error::{Error, Result};
use crate::hostgraph::EdgeSet;
use crate::process::WeightedEdits;
use crate::scalar::Scalar;

/// Default cap on the number of flats.
pub const DEFAULT_FLAT_CAP: usize = 1 << 20;

/// Möbius rows are filled at construction for lattices up to this size and
/// on first use otherwise.
const EAGER_MOBIUS_FLATS: usize = 1 << 10;

#[derive(Debug)]
pub struct SupportLattice {
    m: usize,
    flats: Vec<EdgeSet>,
    index: HashMap<EdgeSet, usize>,
    generator_supports: Vec<EdgeSet>,
    top: usize,
    // row x: (y, mu(x, y)) for every flat y ⊇ flat x, in flat order
    mobius: Vec<OnceLock<Vec<(usize, i64)>>>,
}

impl Clone for SupportLattice {
    fn clone(&self) -> Self {
        Self::from_flats(self.m, self.flats.clone(), self.generator_supports.clone())
    }
}

impl PartialEq for SupportLattice {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.flats == other.flats
    }
}

fn flat_order(a: &EdgeSet, b: &EdgeSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl SupportLattice {
    pub fn closure(supports: &[EdgeSet]) -> Result<Self> {
        Self::closure_with_cap(supports, DEFAULT_FLAT_CAP)
    }

    /// Smallest union-closed family containing `∅` and every support.
    pub fn closure_with_cap(supports: &[EdgeSet], cap: usize) -> Result<Self> {
        let first = supports
            .first()
            .ok_or_else(|| Error::InvalidArgument("closure needs at least one support".into()))?;
        let m = first.universe();
        for s in supports {
            s.check_same_host(first)?;
        }
        let mut gens: Vec<EdgeSet> = supports.to_vec();
        gens.sort_by(flat_order);
        gens.dedup();

        let mut seen: HashMap<EdgeSet, ()> = HashMap::new();
        let mut frontier = vec![EdgeSet::empty(m)];
        seen.insert(EdgeSet::empty(m), ());
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = x.union(g);
                if !seen.contains_key(&y) {
                    if seen.len() >= cap {
                        return Err(Error::ClosureTooLarge { cap });
                    }
                    seen.insert(y.clone(), ());
                    frontier.push(y);
                }
            }
        }
        let mut flats: Vec<EdgeSet> = seen.into_keys().collect();
        flats.sort_by(flat_order);
        Ok(Self::from_flats(m, flats, gens))
    }

    fn from_flats(m: usize, flats: Vec<EdgeSet>, generator_supports: Vec<EdgeSet>) -> Self {
        let index: HashMap<EdgeSet, usize> = flats.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let top = flats.len() - 1;
        let mobius = (0..flats.len()).map(|_| OnceLock::new()).collect();
        let lattice = Self { m, flats, index, generator_supports, top, mobius };
        if lattice.flats.len() <= EAGER_MOBIUS_FLATS {
            for x in 0..lattice.flats.len() {
                lattice.mobius_row(x);
            }
        }
        lattice
    }

    /// Lattice of the supports of `dist`'s generators.
    pub fn of_distribution<S: Scalar>(dist: &WeightedEdits<S>) -> Result<Self> {
        Self::closure(&dist.supports())
    }

    pub fn universe(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// Flats sorted by cardinality, then numerically.
    pub fn flats(&self) -> &[EdgeSet] {
        &self.flats
    }

    pub fn generator_supports(&self) -> &[EdgeSet] {
        &self.generator_supports
    }

    pub fn top(&self) -> &EdgeSet {
        &self.flats[self.top]
    }

    /// Edges outside every generator support; they never change.
    pub fn frozen_edges(&self) -> EdgeSet {
        self.top().complement()
    }

    pub fn covers_host(&self) -> bool {
        self.top().len() == self.m
    }

    pub fn index_of(&self, x: &EdgeSet) -> Result<usize> {
        self.index.get(x).copied().ok_or_else(|| Error::NotAFlat(x.to_string()))
    }

    pub fn contains(&self, x: &EdgeSet) -> bool {
        self.index.contains_key(x)
    }

    /// `(y, mu(x, y))` over all flats `y ⊇ flats[x]`.
    pub fn mobius_row(&self, x: usize) -> &[(usize, i64)] {
        self.mobius[x].get_or_init(|| {
            let fx = &self.flats[x];
            let mut row: Vec<(usize, i64)> = Vec::new();
            for y in x..self.flats.len() {
                let fy = &self.flats[y];
                if !fx.is_subset(fy) {
                    continue;
                }
                let value = if y == x {
                    1
                } else {
                    // flats are sorted by size, so every proper Z ⊂ Y precedes Y
                    -row.iter()
                        .filter(|&&(z, _)| self.flats[z].is_subset(fy))
                        .map(|&(_, v)| v)
                        .sum::<i64>()
                };
                row.push((y, value));
            }
            row
        })
    }

    pub fn mobius(&self, x: &EdgeSet, y: &EdgeSet) -> Result<i64> {
        let ix = self.index_of(x)?;
        let iy = self.index_of(y)?;
        if !x.is_subset(y) {
            return Err(Error::NotComparable(x.to_string(), y.to_string()));
        }
        let row = self.mobius_row(ix);
        let pos = row.binary_search_by_key(&iy, |&(z, _)| z).expect("superset flat is in the row");
        Ok(row[pos].1)
    }

    /// `λ_X`: total weight of generators whose support lies in `X`.
    pub fn eigenvalue<S: Scalar>(&self, x: &EdgeSet, dist: &WeightedEdits<S>) -> Result<S> {
        self.index_of(x)?;
        Ok(dist
            .classes()
            .into_iter()
            .filter(|c| c.support.is_subset(x))
            .fold(S::zero(), |acc, c| acc + c.weight))
    }

    fn eigenvalues<S: Scalar>(&self, dist: &WeightedEdits<S>) -> Vec<S> {
        let classes = dist.classes();
        self.flats
            .iter()
            .map(|x| {
                classes
                    .iter()
                    .filter(|c| c.support.is_subset(x))
                    .fold(S::zero(), |acc, c| acc + c.weight.clone())
            })
            .collect()
    }

    /// For every flat, the product of all generators whose support lies inside
    /// it. Its support is exactly the flat.
    pub fn representatives(&self, generators: &[Edit]) -> Vec<Edit> {
        self.flats
            .iter()
            .map(|x| {
                generators
                    .iter()
                    .filter(|g| g.supp().is_subset(x))
                    .fold(Edit::identity(self.m), |acc, g| acc.compose(g).expect("same host"))
            })
            .collect()
    }

    /// `c_X`: chambers `y` with `rep_X ⩽ y`.
    pub fn chamber_counts(&self, chambers: &[Edit], reps: &[Edit]) -> Result<Vec<u64>> {
        self.check_reps(reps)?;
        let top = self.top();
        let mut masks = Vec::with_capacity(chambers.len());
        for c in chambers {
            if &c.supp() != top {
                return Err(Error::NotAChamber);
            }
            masks.push(c.plus_edges());
        }
        Ok(reps
            .iter()
            .map(|rep| {
                let plus = rep.plus_edges();
                let minus = rep.minus_edges();
                masks
                    .iter()
                    .filter(|state| plus.is_subset(state) && minus.is_disjoint(state))
                    .count() as u64
            })
            .collect())
    }

    fn check_reps(&self, reps: &[Edit]) -> Result<()> {
        if reps.len() != self.flats.len() {
            return Err(Error::LengthMismatch(reps.len(), self.flats.len()));
        }
        for (x, rep) in self.flats.iter().zip(reps) {
            if &rep.supp() != x {
                return Err(Error::BadRepresentative { flat: x.to_string(), support: rep.supp().to_string() });
            }
        }
        Ok(())
    }

    /// `m_X = Σ_{Y ⊇ X} μ(X, Y) c_Y`.
    pub fn invert_counts(&self, counts: &[u64]) -> Result<Vec<u64>> {
        if counts.len() != self.flats.len() {
            return Err(Error::LengthMismatch(counts.len(), self.flats.len()));
        }
        (0..self.flats.len())
            .map(|x| {
                let value: i128 = self
                    .mobius_row(x)
                    .iter()
                    .map(|&(y, mu)| mu as i128 * counts[y] as i128)
                    .sum();
                u64::try_from(value).map_err(|_| Error::NegativeMultiplicity {
                    flat: self.flats[x].to_string(),
                    value: value as i64,
                })
            })
            .collect()
    }

    /// Eigenvalues and multiplicities from an explicit chamber set.
    pub fn multiplicities<S: Scalar>(
        &self,
        dist: &WeightedEdits<S>,
        chambers: &[Edit],
        reps: &[Edit],
    ) -> Result<SpectrumReport<S>> {
        let counts = self.chamber_counts(chambers, reps)?;
        let mults = self.invert_counts(&counts)?;
        Ok(self.report(dist, mults, chambers.len() as u64))
    }

    fn report<S: Scalar>(&self, dist: &WeightedEdits<S>, mults: Vec<u64>, chambers: u64) -> SpectrumReport<S> {
        let entries = self
            .flats
            .iter()
            .zip(self.eigenvalues(dist))
            .zip(mults)
            .map(|((flat, eigenvalue), multiplicity)| SpectrumEntry { flat: flat.clone(), eigenvalue, multiplicity })
            .collect();
        SpectrumReport { entries, chambers, frozen: self.frozen_edges() }
    }

    /// Spectrum of `dist` on a given set of chamber states (as edge sets).
    /// Frozen edges are ignored when matching states to chambers.
    pub fn spectrum_on_states<S: Scalar>(
        &self,
        dist: &WeightedEdits<S>,
        states: &[EdgeSet],
        cap: usize,
    ) -> Result<SpectrumReport<S>> {
        let generators: Vec<Edit> = dist.explicit_items(cap)?.iter().map(|(e, _)| e.clone()).collect();
        let reps = self.representatives(&generators);
        let top = self.top();
        let chambers: Vec<Edit> = states.iter().map(|s| Edit::chamber_of(s).restrict(top)).collect();
        self.multiplicities(dist, &chambers, &reps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry<S> {
    pub flat: EdgeSet,
    pub eigenvalue: S,
    pub multiplicity: u64,
}

/// Eigenvalues indexed by flats, with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport<S> {
    pub entries: Vec<SpectrumEntry<S>>,
    /// Number of chambers (the dimension of the chain).
    pub chambers: u64,
    /// Edges outside every generator support.
    pub frozen: EdgeSet,
}

impl<S: Scalar> SpectrumReport<S> {
    pub fn total_dimension(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Distinct eigenvalues with summed multiplicities, largest first; zero
    /// multiplicities are dropped.
    pub fn grouped(&self) -> Vec<(S, u64)> {
        let mut out: Vec<(S, u64)> = Vec::new();
        let mut sorted: Vec<&SpectrumEntry<S>> = self.entries.iter().filter(|e| e.multiplicity > 0).collect();
        sorted.sort_by(|a, b| b.eigenvalue.partial_cmp(&a.eigenvalue).expect("eigenvalues are comparable"));
        for e in sorted {
            match out.last_mut() {
                Some((v, k)) if v.close_to(&e.eigenvalue, 1e-12) => *k += e.multiplicity,
                _ => out.push((e.eigenvalue.clone(), e.multiplicity)),
            }
        }
        out
    }

    /// Every eigenvalue repeated by its multiplicity, descending.
    pub fn multiset(&self) -> Vec<S> {
        self.grouped()
            .into_iter()
            .flat_map(|(v, k)| std::iter::repeat_n(v, k as usize))
            .collect()
    }

    /// Largest `λ_X` over flats other than the top.
    pub fn lambda_star(&self) -> Option<S> {
        let (_, below_top) = self.entries.split_last()?;
        below_top
            .iter()
            .map(|e| e.eigenvalue.clone())
            .fold(None, |acc: Option<S>, v| match acc {
                Some(a) if a >= v => Some(a),
                _ => Some(v),
            })
    }

    /// Eigenvalues as `f64`, repeated by multiplicity, descending.
    pub fn multiset_f64(&self) -> Vec<f64> {
        self.multiset().iter().map(Scalar::to_f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edits::Sign;
    use crate::hostgraph::HostGraph;
    use crate::process::{moran_weights, simple_edit_weights};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn singletons(m: usize) -> Vec<EdgeSet> {
        (0..m).map(|e| EdgeSet::from_indices(m, [e]).unwrap()).collect()
    }

    // chambers of the generated semigroup: left multiples of the product of
    // all generators, closed under left multiplication by generators
    fn chambers_by_products(gens: &[Edit]) -> Vec<Edit> {
        let start = gens.iter().fold(Edit::identity(gens[0].universe()), |a, g| a.compose(g).unwrap());
        let mut chambers = vec![start];
        let mut i = 0;
        while i < chambers.len() {
            for x in gens {
                let c = x.compose(&chambers[i]).unwrap();
                if !chambers.contains(&c) {
                    chambers.push(c);
                }
            }
            i += 1;
        }
        chambers
    }

    fn all_states(m: usize) -> Vec<EdgeSet> {
        (0..1u64 << m).map(|s| EdgeSet::from_mask(m, s).unwrap()).collect()
    }

    #[test]
    fn boolean_closure() {
        let l = SupportLattice::closure(&singletons(4)).unwrap();
        assert_eq!(l.len(), 16);
        assert!(l.flats()[0].is_empty());
        assert_eq!(l.top().len(), 4);
        assert!(l.flats().windows(2).all(|w| w[0].len() <= w[1].len()));
    }

    #[test]
    fn k4_moran_flats() {
        let g = HostGraph::complete(4);
        let supports: Vec<_> = (0..4).map(|v| g.neighborhood_edges(v).unwrap()).collect();
        let l = SupportLattice::closure(&supports).unwrap();
        let sizes: Vec<usize> = l.flats().iter().map(EdgeSet::len).collect();
        assert_eq!(sizes, vec![0, 3, 3, 3, 3, 5, 5, 5, 5, 5, 5, 6]);
    }

    #[test]
    fn single_support() {
        let s = EdgeSet::from_indices(3, [0, 2]).unwrap();
        let l = SupportLattice::closure(std::slice::from_ref(&s)).unwrap();
        assert_eq!(l.flats(), &[EdgeSet::empty(3), s.clone()]);
        assert_eq!(l.mobius(&EdgeSet::empty(3), &s).unwrap(), -1);
        assert!(!l.covers_host());
        assert_eq!(l.frozen_edges(), EdgeSet::from_indices(3, [1]).unwrap());
    }

    #[test]
    fn closure_errors() {
        assert!(SupportLattice::closure(&[]).is_err());
        assert_eq!(
            SupportLattice::closure_with_cap(&singletons(5), 10).unwrap_err(),
            Error::ClosureTooLarge { cap: 10 }
        );
    }

    #[test]
    fn boolean_mobius_closed_form() {
        for m in 1..=5 {
            let l = SupportLattice::closure(&singletons(m)).unwrap();
            for x in l.flats() {
                assert_eq!(l.mobius(x, x).unwrap(), 1);
                for y in l.flats().iter().filter(|y| x.is_subset(y)) {
                    let k = y.len() - x.len();
                    assert_eq!(l.mobius(x, y).unwrap(), if k % 2 == 0 { 1 } else { -1 });
                }
            }
        }
        let l = SupportLattice::closure(&singletons(3)).unwrap();
        let a = EdgeSet::from_indices(3, [0]).unwrap();
        let b = EdgeSet::from_indices(3, [1]).unwrap();
        assert!(matches!(l.mobius(&a, &b), Err(Error::NotComparable(..))));
        let l = SupportLattice::closure(&[EdgeSet::from_indices(3, [0, 1]).unwrap()]).unwrap();
        assert!(matches!(l.mobius(&a, &a), Err(Error::NotAFlat(_))));
    }

    #[test]
    fn simple_lattice_spectrum() {
        let m = 4;
        let g = HostGraph::path(m + 1).unwrap();
        let p: Vec<Rational> = [1, 2, 3, 1].iter().map(|&k| Rational::from_ratio(k, 5)).collect();
        let dist = simple_edit_weights(&g, &p).unwrap();
        let l = SupportLattice::of_distribution(&dist).unwrap();
        let report = l.spectrum_on_states(&dist, &all_states(m), 1 << 10).unwrap();
        for e in &report.entries {
            assert_eq!(e.multiplicity, 1);
            assert_eq!(e.eigenvalue, Rational::from_ratio(e.flat.len() as i64, m as i64));
        }
        let grouped = report.grouped();
        let expect: Vec<(Rational, u64)> = (0..=4).rev().map(|k| (Rational::from_ratio(k, 4), [1, 4, 6, 4, 1][k as usize])).collect();
        assert_eq!(grouped, expect);
        assert_eq!(report.total_dimension(), 16);
        assert_eq!(report.lambda_star(), Some(Rational::from_ratio(3, 4)));
    }

    #[test]
    fn un_inverted_counts() {
        let g = HostGraph::complete(4);
        let dist = moran_weights::<f64>(&g).unwrap();
        let l = SupportLattice::of_distribution(&dist).unwrap();
        let gens: Vec<Edit> = dist.items().unwrap().iter().map(|(e, _)| e.clone()).collect();
        let reps = l.representatives(&gens);
        let chambers = chambers_by_products(&gens);
        let counts = l.chamber_counts(&chambers, &reps).unwrap();
        let mults = l.invert_counts(&counts).unwrap();
        for (x, fx) in l.flats().iter().enumerate() {
            let sum: u64 = l
                .flats()
                .iter()
                .enumerate()
                .filter(|(_, fy)| fx.is_subset(fy))
                .map(|(y, _)| mults[y])
                .sum();
            assert_eq!(sum, counts[x]);
        }
        assert_eq!(mults.iter().sum::<u64>(), chambers.len() as u64);
        let report = l.multiplicities(&dist, &chambers, &reps).unwrap();
        let n1 = EdgeSet::from_indices(6, g.incident_edges(0).iter().copied()).unwrap();
        let e = report.entries.iter().find(|e| e.flat == n1).unwrap();
        assert!((e.eigenvalue - 0.25).abs() < 1e-15);
        assert!((report.entries.last().unwrap().eigenvalue - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_support_generator() {
        let x = Edit::from_signs(2, [(0, Sign::Plus), (1, Sign::Minus)]).unwrap();
        let dist = WeightedEdits::custom(2, vec![(x.clone(), 1.0)]).unwrap();
        let l = SupportLattice::of_distribution(&dist).unwrap();
        let reps = l.representatives(std::slice::from_ref(&x));
        let report = l.multiplicities(&dist, &[x], &reps).unwrap();
        let m: Vec<u64> = report.entries.iter().map(|e| e.multiplicity).collect();
        assert_eq!(m, vec![0, 1]);
        assert_eq!(report.grouped(), vec![(1.0, 1)]);
    }

    #[test]
    fn bad_representative() {
        let l = SupportLattice::closure(&singletons(2)).unwrap();
        let reps = vec![Edit::identity(2); 4];
        assert!(matches!(l.chamber_counts(&[], &reps), Err(Error::BadRepresentative { .. })));
    }

    proptest! {
        #[test]
        fn closure_is_idempotent(masks in prop::collection::vec(1u64..64, 1..6)) {
            let supports: Vec<EdgeSet> = masks.iter().map(|&s| EdgeSet::from_mask(6, s).unwrap()).collect();
            let l = SupportLattice::closure(&supports).unwrap();
            let again = SupportLattice::closure(l.flats()).unwrap();
            prop_assert_eq!(again.flats(), l.flats());
            for x in l.flats() {
                for y in l.flats() {
                    prop_assert!(l.contains(&x.union(y)));
                }
            }
        }

        #[test]
        fn counts_do_not_depend_on_representative(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let g = HostGraph::cycle(5).unwrap();
            let dist = moran_weights::<f64>(&g).unwrap();
            let l = SupportLattice::of_distribution(&dist).unwrap();
            let mut gens: Vec<Edit> = dist.items().unwrap().iter().map(|(e, _)| e.clone()).collect();
            let states = chambers_by_products(&gens);
            let a = l.chamber_counts(&states, &l.representatives(&gens)).unwrap();
            gens.shuffle(&mut crate::process::rng_for(seed, 0));
            let b = l.chamber_counts(&states, &l.representatives(&gens)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
