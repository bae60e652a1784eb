//! Attribute set descriptions: interned attributes, entities as bitsets,
//! and the set-of-sets algebra (subsumption, similarity, merge).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttributeId(pub u32);

impl AttributeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned attribute names. Ids are dense and assigned in order of first
/// appearance.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    names: Vec<String>,
    lookup: HashMap<String, AttributeId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Result<AttributeId> {
        if name.trim().is_empty() {
            return Err(Error::Validation("empty attribute name".into()));
        }
        if let Some(&id) = self.lookup.get(name) {
            return Ok(id);
        }
        let id = AttributeId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.lookup.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn get(&self, name: &str) -> Option<AttributeId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, id: AttributeId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Builds an entity from attribute names, interning unseen ones.
    pub fn entity<S: AsRef<str>>(&mut self, names: &[S]) -> Result<Entity> {
        let mut entity = Entity::empty();
        for name in names {
            entity.insert(self.intern(name.as_ref())?);
        }
        Ok(entity)
    }

    /// Builds an ASD from nested attribute-name lists, interning unseen names.
    pub fn asd<S: AsRef<str>, E: AsRef<[S]>>(&mut self, entities: &[E]) -> Result<Asd> {
        let entities = entities
            .iter()
            .map(|e| self.entity(e.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Asd::new(entities))
    }

    /// Attribute names of an ASD in canonical order.
    pub fn asd_names(&self, asd: &Asd) -> Vec<Vec<String>> {
        asd.entities()
            .iter()
            .map(|e| e.ids().map(|id| self.name(id).to_owned()).collect())
            .collect()
    }

    pub fn display_entity(&self, entity: &Entity) -> String {
        let names: Vec<&str> = entity.ids().map(|id| self.name(id)).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn display_asd(&self, asd: &Asd) -> String {
        let parts: Vec<String> = asd
            .entities()
            .iter()
            .map(|e| self.display_entity(e))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// A set of attributes, stored as a bitset over attribute ids.
///
/// Trailing zero words are never stored, so derived equality and hashing
/// agree with set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Entity {
    words: Vec<u64>,
}

impl Entity {
    pub fn empty() -> Self {
        Entity { words: Vec::new() }
    }

    pub fn from_ids<I: IntoIterator<Item = AttributeId>>(ids: I) -> Self {
        let mut entity = Entity::empty();
        for id in ids {
            entity.insert(id);
        }
        entity
    }

    pub fn insert(&mut self, id: AttributeId) {
        let (word, bit) = (id.index() / 64, id.index() % 64);
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1 << bit;
    }

    pub fn contains(&self, id: AttributeId) -> bool {
        let (word, bit) = (id.index() / 64, id.index() % 64);
        self.words.get(word).is_some_and(|w| w & (1 << bit) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_subset(&self, other: &Entity) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Entity) -> Entity {
        let mut words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        Entity { words }
    }

    pub fn intersection_len(&self, other: &Entity) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn union_len(&self, other: &Entity) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }

    /// `|self \ other|`
    pub fn difference_len(&self, other: &Entity) -> usize {
        self.len() - self.intersection_len(other)
    }

    /// Attribute ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = AttributeId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(AttributeId(i as u32 * 64 + bit))
            })
        })
    }
}

/// Size first, then lexicographic on the ascending id sequence.
impl Ord for Entity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.ids().cmp(other.ids()))
    }
}

impl PartialOrd for Entity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ids().map(|id| id.0)).finish()
    }
}

/// Jaccard index of two entities, with `J(∅, ∅) = 1`.
pub fn jaccard(a: &Entity, b: &Entity) -> f64 {
    let union = a.union_len(b);
    if union == 0 {
        return 1.0;
    }
    a.intersection_len(b) as f64 / union as f64
}

/// An attribute set description: a set of entities.
///
/// Always held in canonical form (entities sorted by [`Entity`]'s order,
/// no duplicates). The derived order on `Asd` is the canonical ASD order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Asd {
    entities: Vec<Entity>,
}

impl Asd {
    pub fn new<I: IntoIterator<Item = Entity>>(entities: I) -> Self {
        canonicalize(entities.into_iter().collect())
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn total_attributes(&self) -> usize {
        self.entities.iter().map(Entity::len).sum()
    }

    pub fn has_empty_entity(&self) -> bool {
        self.entities.iter().any(Entity::is_empty)
    }

    /// True for the ASD `{∅}`, which describes every non-empty ASD.
    pub fn is_top(&self) -> bool {
        self.entities.len() == 1 && self.entities[0].is_empty()
    }

    /// True if no entity is a proper subset of another.
    pub fn is_antichain(&self) -> bool {
        let es = &self.entities;
        (0..es.len()).all(|i| (0..es.len()).all(|j| i == j || !es[i].is_subset(&es[j])))
    }

    /// Drops every entity that is a proper subset of another entity.
    pub fn trim(&self) -> Asd {
        // Sorted by size, so a strict superset of entity i can only appear later.
        let es = &self.entities;
        let kept = es
            .iter()
            .enumerate()
            .filter(|(i, e)| {
                !es[i + 1..]
                    .iter()
                    .any(|other| other.len() > e.len() && e.is_subset(other))
            })
            .map(|(_, e)| e.clone())
            .collect();
        Asd { entities: kept }
    }

    /// Whether `self` describes (subsumes) `specific`.
    pub fn subsumes(&self, specific: &Asd) -> bool {
        subsumes(self, specific)
    }
}

impl fmt::Debug for Asd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.entities).finish()
    }
}

/// Sorts and deduplicates raw entities into canonical form.
pub fn canonicalize(mut raw: Vec<Entity>) -> Asd {
    raw.sort();
    raw.dedup();
    Asd { entities: raw }
}

/// `general` subsumes `specific` iff each entity of `general` is contained in
/// some entity of `specific`. Witnesses may be shared.
pub fn subsumes(general: &Asd, specific: &Asd) -> bool {
    general
        .entities
        .iter()
        .all(|g| specific.entities.iter().any(|s| g.is_subset(s)))
}

/// Mutual subsumption.
pub fn equivalent(a: &Asd, b: &Asd) -> bool {
    subsumes(a, b) && subsumes(b, a)
}

/// Entity-averaged, symmetrised best-match Jaccard similarity of two ASDs.
pub fn similarity(z1: &Asd, z2: &Asd) -> Result<f64> {
    if z1.is_empty() || z2.is_empty() {
        return Err(Error::Validation(
            "similarity is undefined for an empty ASD".into(),
        ));
    }
    Ok(similarity_nonempty(z1, z2))
}

pub(crate) fn similarity_nonempty(z1: &Asd, z2: &Asd) -> f64 {
    0.5 * directed_best_match(z1, z2) + 0.5 * directed_best_match(z2, z1)
}

fn directed_best_match(from: &Asd, to: &Asd) -> f64 {
    let sum: f64 = from
        .entities
        .iter()
        .map(|a| {
            to.entities
                .iter()
                .map(|b| jaccard(a, b))
                .fold(0.0, f64::max)
        })
        .sum();
    sum / from.len() as f64
}

/// Most specific generalization of two ASDs: all pairwise entity
/// intersections, trimmed to an antichain.
///
/// When every intersection is empty the result is `{∅}`.
pub fn merge(z1: &Asd, z2: &Asd) -> Asd {
    let mut combined = Vec::with_capacity(z1.len() * z2.len());
    for a in &z1.entities {
        for b in &z2.entities {
            combined.push(a.intersection(b));
        }
    }
    canonicalize(combined).trim()
}
