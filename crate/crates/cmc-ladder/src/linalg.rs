//! Incremental sparse Gaussian elimination over [`Gq`].
//!
//! Columns are sparse vectors keyed by any ordered type (usually monomials).
//! Each stored row is normalized so that its largest key has coefficient 1 and
//! remembers which input columns it is built from, so both span membership
//! (with a certificate) and kernel vectors fall out of the same reduction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::scalar::Gq;

pub type SparseVec<K> = BTreeMap<K, Gq>;

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Gq, x: &SparseVec<K>) {
    for (k, v) in x {
        let t = a * v;
        match y.get_mut(k) {
            Some(cur) => {
                *cur += &t;
                if cur.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !t.is_zero() {
                    y.insert(k.clone(), t);
                }
            }
        }
    }
}

struct Row<K> {
    vec: SparseVec<K>,
    comb: SparseVec<usize>,
}

/// Echelon form of the span of the columns inserted so far.
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, Row<K>>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon { rows: BTreeMap::new(), inserted: 0 }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `v` until it vanishes or its leading key is not a pivot.
    fn reduce(&self, v: &mut SparseVec<K>, comb: &mut SparseVec<usize>) {
        while let Some((k, c)) = v.iter().next_back().map(|(k, c)| (k.clone(), -c.clone())) {
            let Some(row) = self.rows.get(&k) else { return };
            axpy(v, &c, &row.vec);
            axpy(comb, &c, &row.comb);
        }
    }

    /// Inserts the next column. Returns a kernel relation `Σ c_i col_i = 0`
    /// when the column is dependent on earlier ones.
    pub fn insert(&mut self, v: SparseVec<K>) -> Option<SparseVec<usize>> {
        let idx = self.inserted;
        self.inserted += 1;
        let mut v = v;
        let mut comb = SparseVec::new();
        comb.insert(idx, Gq::one());
        self.reduce(&mut v, &mut comb);
        match v.iter().next_back() {
            None => Some(comb),
            Some((k, lead)) => {
                let k = k.clone();
                let s = lead.inv().expect("nonzero leading coefficient");
                for x in v.values_mut() {
                    *x = &*x * &s;
                }
                for x in comb.values_mut() {
                    *x = &*x * &s;
                }
                self.rows.insert(k, Row { vec: v, comb });
                None
            }
        }
    }

    /// Writes `target` as a combination of inserted columns, if possible.
    pub fn solve(&self, target: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let mut v = target.clone();
        let mut comb = SparseVec::new();
        self.reduce(&mut v, &mut comb);
        if v.is_empty() {
            // reduce subtracted c·row, so the target is +Σ (−comb)·col
            Some(comb.into_iter().map(|(k, c)| (k, -c)).collect())
        } else {
            None
        }
    }
}

/// Kernel basis of the linear map whose columns are given.
pub fn kernel<K: Ord + Clone>(cols: Vec<SparseVec<K>>) -> Vec<SparseVec<usize>> {
    let mut e = Echelon::new();
    cols.into_iter().filter_map(|c| e.insert(c)).collect()
}
