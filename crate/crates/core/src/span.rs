//! Sparse row reduction over the exact coefficient field.
//!
//! Rows are sparse maps from an ordered column key to scalars. Each inserted
//! row is reduced against the pivots found so far; a row that survives is
//! normalized (leading coefficient 1) and becomes a new pivot. Rows can carry
//! a tag vector that records the combination of original rows they reduce to,
//! which is how kernel witnesses are recovered.

use std::collections::BTreeMap;

use crate::scalar::QuadExtScalar;

type Tag = BTreeMap<usize, QuadExtScalar>;

pub(crate) struct RowEchelon<K: Ord + Clone> {
    rows: Vec<BTreeMap<K, QuadExtScalar>>,
    tags: Vec<Tag>,
    pivots: BTreeMap<K, usize>,
}

pub(crate) enum InsertOutcome {
    NewPivot,
    /// The row was a combination of earlier pivot rows; the tag describes it
    /// in terms of the original inserted rows.
    ReducedToZero(Tag),
}

fn sub_scaled<K: Ord + Clone>(
    target: &mut BTreeMap<K, QuadExtScalar>,
    factor: &QuadExtScalar,
    source: &BTreeMap<K, QuadExtScalar>,
) {
    for (k, v) in source {
        let delta = factor * v;
        match target.get_mut(k) {
            Some(entry) => {
                *entry = &*entry - &delta;
                if entry.is_zero() {
                    target.remove(k);
                }
            }
            None => {
                if !delta.is_zero() {
                    target.insert(k.clone(), -&delta);
                }
            }
        }
    }
}

fn sub_scaled_tag(target: &mut Tag, factor: &QuadExtScalar, source: &Tag) {
    sub_scaled(target, factor, source)
}

impl<K: Ord + Clone> RowEchelon<K> {
    pub(crate) fn new() -> Self {
        RowEchelon {
            rows: Vec::new(),
            tags: Vec::new(),
            pivots: BTreeMap::new(),
        }
    }

    pub(crate) fn pivot_count(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, row: &mut BTreeMap<K, QuadExtScalar>, tag: &mut Tag) {
        loop {
            let Some((lead, coeff)) = row.first_key_value() else {
                return;
            };
            let Some(&idx) = self.pivots.get(lead) else {
                return;
            };
            // pivot rows are normalized, so the factor is just the coefficient
            let factor = coeff.clone();
            sub_scaled(row, &factor, &self.rows[idx]);
            sub_scaled_tag(tag, &factor, &self.tags[idx]);
        }
    }

    /// Inserts a row tagged `tag_index` (its identity among inserted rows).
    pub(crate) fn insert(
        &mut self,
        mut row: BTreeMap<K, QuadExtScalar>,
        tag_index: usize,
    ) -> InsertOutcome {
        let mut tag: Tag = BTreeMap::from([(tag_index, QuadExtScalar::one())]);
        self.reduce(&mut row, &mut tag);
        match row.first_key_value() {
            None => InsertOutcome::ReducedToZero(tag),
            Some((lead, coeff)) => {
                let lead = lead.clone();
                let inv = coeff.inv().expect("leading coefficient is nonzero");
                for v in row.values_mut() {
                    *v = &*v * &inv;
                }
                for v in tag.values_mut() {
                    *v = &*v * &inv;
                }
                self.rows.push(row);
                self.tags.push(tag);
                self.pivots.insert(lead, self.rows.len() - 1);
                InsertOutcome::NewPivot
            }
        }
    }

    /// Whether the row lies in the span of the pivot rows.
    pub(crate) fn contains(&self, row: &BTreeMap<K, QuadExtScalar>) -> bool {
        let mut row = row.clone();
        let mut tag = Tag::new();
        self.reduce(&mut row, &mut tag);
        row.is_empty()
    }
}
