use std::collections::btree_map::{self, BTreeMap};

use crate::{Ring, Scalar};

/// Finite linear combination of keys with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin<K: Ord> {
    ring: Ring,
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero(ring: Ring) -> Self {
        Lin { ring, terms: BTreeMap::new() }
    }

    pub fn single(ring: Ring, key: K, coeff: Scalar) -> Self {
        let mut l = Lin::zero(ring);
        l.add_term(key, &coeff);
        l
    }

    pub fn basis(ring: Ring, key: K) -> Self {
        Lin::single(ring, key, ring.one())
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Scalar> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Scalar> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, key: K, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in other.iter() {
            self.add_term(k.clone(), &(v * c));
        }
    }

    pub fn add_assign(&mut self, other: &Lin<K>) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), v);
        }
    }

    pub fn sub_assign(&mut self, other: &Lin<K>) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), &-v);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Lin<K> {
        let mut out = Lin::zero(self.ring);
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Lin<K> {
        self.scale(&self.ring.sign(1))
    }

    pub fn plus(&self, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    /// Apply a linear map given on keys.
    pub fn map_linear<J: Ord + Clone>(&self, ring: Ring, mut f: impl FnMut(&K) -> Lin<J>) -> Lin<J> {
        let mut out = Lin::zero(ring);
        for (k, v) in self.iter() {
            out.add_scaled(&f(k), v);
        }
        out
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| keep(k));
    }
}

impl<K: Ord> IntoIterator for Lin<K> {
    type Item = (K, Scalar);
    type IntoIter = btree_map::IntoIter<K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, K: Ord> IntoIterator for &'a Lin<K> {
    type Item = (&'a K, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}
