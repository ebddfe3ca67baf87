//! The graph edit semigroup in reduced form.
//!
//! An edit is stored as a partial sign map `edge -> {+, -}` sorted by edge
//! index. The product `xy` means "apply `y`, then `x`", so on edges both touch
//! the left factor wins. Under this product edits form a left regular band:
//! `xx = x` and `xyx = xy`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hostgraph::EdgeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// An element of the edit semigroup over a host with `m` edges.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edit {
    m: usize,
    signs: Vec<(usize, Sign)>,
}

impl Edit {
    /// The identity edit, which acts on no edge.
    pub fn identity(m: usize) -> Self {
        Self { m, signs: Vec::new() }
    }

    /// `e+` or `e-`.
    pub fn simple(m: usize, e: usize, sign: Sign) -> Result<Self> {
        if e >= m {
            return Err(Error::EdgeOutOfRange { edge: e, m });
        }
        Ok(Self { m, signs: vec![(e, sign)] })
    }

    /// Builds an edit from an unordered sign map. Repeating an edge with the
    /// same sign is fine; with opposite signs it is ambiguous and rejected.
    pub fn from_signs<I: IntoIterator<Item = (usize, Sign)>>(m: usize, signs: I) -> Result<Self> {
        let mut signs: Vec<(usize, Sign)> = signs.into_iter().collect();
        signs.sort_unstable();
        signs.dedup();
        for w in signs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::ConflictingSigns(w[0].0));
            }
        }
        if let Some(&(e, _)) = signs.last() {
            if e >= m {
                return Err(Error::EdgeOutOfRange { edge: e, m });
            }
        }
        Ok(Self { m, signs })
    }

    /// `+` on `plus`, `-` on `minus`; the two sets must be disjoint.
    pub fn from_sets(plus: &EdgeSet, minus: &EdgeSet) -> Result<Self> {
        plus.check_same_host(minus)?;
        if let Some(e) = plus.intersection(minus).iter().next() {
            return Err(Error::ConflictingSigns(e));
        }
        Self::from_signs(
            plus.universe(),
            plus.iter().map(|e| (e, Sign::Plus)).chain(minus.iter().map(|e| (e, Sign::Minus))),
        )
    }

    /// Host edge count `m`.
    pub fn universe(&self) -> usize {
        self.m
    }

    pub fn signs(&self) -> &[(usize, Sign)] {
        &self.signs
    }

    pub fn sign_of(&self, e: usize) -> Option<Sign> {
        self.signs.binary_search_by_key(&e, |&(f, _)| f).ok().map(|i| self.signs[i].1)
    }

    pub fn is_identity(&self) -> bool {
        self.signs.is_empty()
    }

    /// Edges on which the edit acts.
    pub fn supp(&self) -> EdgeSet {
        EdgeSet::from_indices(self.m, self.signs.iter().map(|&(e, _)| e))
            .expect("sign map indices are in range")
    }

    pub fn plus_edges(&self) -> EdgeSet {
        self.edges_with(Sign::Plus)
    }

    pub fn minus_edges(&self) -> EdgeSet {
        self.edges_with(Sign::Minus)
    }

    fn edges_with(&self, sign: Sign) -> EdgeSet {
        EdgeSet::from_indices(self.m, self.signs.iter().filter(|s| s.1 == sign).map(|s| s.0))
            .expect("sign map indices are in range")
    }

    fn check_host(&self, m: usize) -> Result<()> {
        if self.m != m {
            return Err(Error::HostMismatch { left: self.m, right: m });
        }
        Ok(())
    }

    /// The product `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Edit) -> Result<Edit> {
        self.check_host(other.m)?;
        let (a, b) = (&self.signs, &other.signs);
        let mut signs = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    signs.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    signs.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    signs.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        signs.extend_from_slice(&a[i..]);
        signs.extend_from_slice(&b[j..]);
        Ok(Edit { m: self.m, signs })
    }

    /// `(E ∪ plus) \ minus`.
    pub fn apply(&self, state: &EdgeSet) -> Result<EdgeSet> {
        self.check_host(state.universe())?;
        let mut out = state.clone();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    /// In-place [`Edit::apply`]; the caller guarantees matching hosts.
    pub fn apply_in_place(&self, state: &mut EdgeSet) {
        debug_assert_eq!(state.universe(), self.m);
        for &(e, s) in &self.signs {
            match s {
                Sign::Plus => state.insert(e),
                Sign::Minus => state.remove(e),
            }
        }
    }

    /// `self ≤ other`, i.e. `self * other = other`: every simple edit of
    /// `self` also occurs in `other`.
    pub fn leq(&self, other: &Edit) -> Result<bool> {
        self.check_host(other.m)?;
        Ok(self.signs.iter().all(|&(e, s)| other.sign_of(e) == Some(s)))
    }

    /// `self ≺ other`, i.e. `other * self = other`: support inclusion.
    pub fn prec(&self, other: &Edit) -> Result<bool> {
        self.check_host(other.m)?;
        Ok(self.signs.iter().all(|&(e, _)| other.sign_of(e).is_some()))
    }

    /// Restriction of the sign map to `edges`.
    pub fn restrict(&self, edges: &EdgeSet) -> Edit {
        Edit {
            m: self.m,
            signs: self.signs.iter().copied().filter(|&(e, _)| edges.contains(e)).collect(),
        }
    }

    pub fn is_chamber(&self) -> bool {
        self.signs.len() == self.m
    }

    /// The chamber identified with state `E`: `+` on `E`, `-` elsewhere.
    pub fn chamber_of(state: &EdgeSet) -> Edit {
        let m = state.universe();
        let signs = (0..m)
            .map(|e| (e, if state.contains(e) { Sign::Plus } else { Sign::Minus }))
            .collect();
        Edit { m, signs }
    }

    /// Inverse of [`Edit::chamber_of`].
    pub fn state_of(&self) -> Result<EdgeSet> {
        if !self.is_chamber() {
            return Err(Error::NotAChamber);
        }
        Ok(self.plus_edges())
    }

    /// Parses the textual notation `"+0 -3 +5"`. Tokens form a product read
    /// left to right, so the rightmost token is applied first.
    pub fn parse(m: usize, text: &str) -> Result<Edit> {
        let mut acc = Edit::identity(m);
        for token in text.split_whitespace() {
            let sign = match token.chars().next() {
                Some('+') => Sign::Plus,
                Some('-') => Sign::Minus,
                _ => return Err(Error::Parse(format!("edit token {token:?} must start with + or -"))),
            };
            let e: usize = token[1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad edge index in edit token {token:?}")))?;
            acc = acc.compose(&Edit::simple(m, e, sign)?)?;
        }
        Ok(acc)
    }

    /// Bitmask form for the enumeration engine (`m <= 64`).
    pub fn to_mask_edit(&self) -> Result<MaskEdit> {
        Ok(MaskEdit { plus: self.plus_edges().try_mask()?, minus: self.minus_edges().try_mask()? })
    }
}

impl fmt::Display for Edit {
    /// Reduced form in ascending edge order; the identity prints as `""`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(e, s)) in self.signs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{e}", s.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "Edit(id)/{}", self.m)
        } else {
            write!(f, "Edit({self})/{}", self.m)
        }
    }
}

/// Bitmask edit used on `u64` state indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MaskEdit {
    pub plus: u64,
    pub minus: u64,
}

impl MaskEdit {
    #[inline]
    pub fn apply(self, state: u64) -> u64 {
        (state | self.plus) & !self.minus
    }

    pub fn support(self) -> u64 {
        self.plus | self.minus
    }
}
