//! Exact dense linear algebra over a [`Field`].

use std::collections::BTreeMap;

use crate::field::Field;

/// An incrementally built row-echelon basis of a subspace of `F^dim`.
///
/// Each stored row is normalized to have a leading 1 at its pivot and zeros
/// at the pivots of earlier rows. When tracking is enabled every row also
/// remembers its expression in terms of the independent vectors inserted so
/// far, which lets [`Echelon::solve`] return coordinates.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    dim: usize,
    track: bool,
    rows: Vec<Row<F>>,
    inserted: usize,
}

#[derive(Clone, Debug)]
struct Row<F: Field> {
    pivot: usize,
    vec: Vec<F>,
    combo: Vec<F>,
}

impl<F: Field> Echelon<F> {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, track: false, rows: Vec::new(), inserted: 0 }
    }

    /// An echelon basis that records coordinates with respect to the
    /// independent inserted vectors.
    pub fn tracking(dim: usize) -> Self {
        Echelon { dim, track: true, rows: Vec::new(), inserted: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_with(&self, v: &mut [F], combo: &mut Vec<F>) {
        for row in &self.rows {
            let c = v[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (i, x) in row.vec.iter().enumerate().skip(row.pivot) {
                if !x.is_zero() {
                    v[i] = v[i].sub(&c.mul(x));
                }
            }
            if self.track {
                for (j, y) in row.combo.iter().enumerate() {
                    if !y.is_zero() {
                        combo[j] = combo[j].add(&c.mul(y));
                    }
                }
            }
        }
    }

    /// Inserts `v`; returns `true` iff it was independent of the span.
    pub fn insert(&mut self, mut v: Vec<F>) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut combo = if self.track { vec![F::zero(); self.inserted + 1] } else { Vec::new() };
        self.reduce_with(&mut v, &mut combo);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].inv().expect("nonzero pivot");
        for x in v.iter_mut().skip(pivot) {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        if self.track {
            // v_reduced = input - Σ c_i row_i, so row = inv * (input - Σ c_i row_i).
            let idx = self.inserted;
            for y in combo.iter_mut() {
                *y = y.neg().mul(&inv);
            }
            combo[idx] = inv.clone();
            for row in &mut self.rows {
                row.combo.push(F::zero());
            }
        }
        self.inserted += 1;
        self.rows.push(Row { pivot, vec: v, combo });
        true
    }

    /// Whether `v` lies in the span.
    pub fn contains(&self, v: &[F]) -> bool {
        let mut w = v.to_vec();
        for row in &self.rows {
            let c = w[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (i, x) in row.vec.iter().enumerate().skip(row.pivot) {
                if !x.is_zero() {
                    w[i] = w[i].sub(&c.mul(x));
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    /// Coordinates of `v` with respect to the independent inserted vectors,
    /// or `None` if `v` is outside the span. Requires tracking.
    pub fn solve(&self, v: &[F]) -> Option<Vec<F>> {
        assert!(self.track, "solve requires a tracking echelon basis");
        let mut w = v.to_vec();
        let mut coords = vec![F::zero(); self.inserted];
        for row in &self.rows {
            let c = w[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (i, x) in row.vec.iter().enumerate().skip(row.pivot) {
                if !x.is_zero() {
                    w[i] = w[i].sub(&c.mul(x));
                }
            }
            for (j, y) in row.combo.iter().enumerate() {
                if !y.is_zero() {
                    coords[j] = coords[j].add(&c.mul(y));
                }
            }
        }
        w.iter().all(|x| x.is_zero()).then_some(coords)
    }
}

/// Rank of a list of vectors of common length `dim`.
pub fn rank<F: Field>(dim: usize, vectors: impl IntoIterator<Item = Vec<F>>) -> usize {
    let mut e = Echelon::new(dim);
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// A basis of the kernel of the linear map whose columns are `columns`
/// (each of length `dim`), as coefficient vectors of length `columns.len()`.
pub fn kernel<F: Field>(dim: usize, columns: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut e = Echelon::tracking(dim);
    let mut independent = Vec::new();
    let mut out = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        if let Some(coords) = e.solve(c) {
            let mut k = vec![F::zero(); columns.len()];
            k[j] = F::one();
            for (slot, x) in independent.iter().zip(coords) {
                let slot: usize = *slot;
                k[slot] = k[slot].sub(&x);
            }
            out.push(k);
        } else {
            e.insert(c.clone());
            independent.push(j);
        }
    }
    out
}

/// Inverse of a square matrix given by rows, if invertible.
pub fn invert<F: Field>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = x.mul(&inv);
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let c = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x = x.sub(&c.mul(y));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A sparse vector: strictly increasing indices, nonzero values.
pub type SparseVec<F> = Vec<(usize, F)>;

/// Builds a sparse vector from unsorted, possibly repeated entries.
pub fn sparse_from<F: Field>(entries: impl IntoIterator<Item = (usize, F)>) -> SparseVec<F> {
    let mut map: BTreeMap<usize, F> = BTreeMap::new();
    for (i, x) in entries {
        if x.is_zero() {
            continue;
        }
        match map.get_mut(&i) {
            Some(y) => *y = y.add(&x),
            None => {
                map.insert(i, x);
            }
        }
    }
    map.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

fn axpy_sparse<F: Field>(v: &mut BTreeMap<usize, F>, c: &F, row: &[(usize, F)]) {
    for (i, x) in row {
        let d = c.mul(x);
        match v.get_mut(i) {
            Some(y) => {
                *y = y.sub(&d);
                if y.is_zero() {
                    v.remove(i);
                }
            }
            None => {
                v.insert(*i, d.neg());
            }
        }
    }
}

/// Sparse analogue of [`Echelon`]: rows keyed by pivot, each row's pivot is
/// its smallest index and carries coefficient 1.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon<F: Field> {
    track: bool,
    rows: BTreeMap<usize, (SparseVec<F>, SparseVec<F>)>,
    inserted: usize,
}

impl<F: Field> SparseEchelon<F> {
    pub fn new() -> Self {
        SparseEchelon { track: false, rows: BTreeMap::new(), inserted: 0 }
    }

    pub fn tracking() -> Self {
        SparseEchelon { track: true, rows: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of independent vectors inserted so far (coordinates of
    /// [`SparseEchelon::solve`] refer to these in insertion order).
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    fn reduce(&self, v: &[(usize, F)]) -> (BTreeMap<usize, F>, BTreeMap<usize, F>) {
        let mut w: BTreeMap<usize, F> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        let mut combo: BTreeMap<usize, F> = BTreeMap::new();
        let mut cursor = 0usize;
        loop {
            let Some((&i, c)) = w.range(cursor..).find(|(i, _)| self.rows.contains_key(i)) else { break };
            let c = c.clone();
            let (row, rc) = &self.rows[&i];
            axpy_sparse(&mut w, &c, row);
            if self.track {
                for (j, y) in rc {
                    let d = c.mul(y);
                    match combo.get_mut(j) {
                        Some(z) => {
                            *z = z.add(&d);
                            if z.is_zero() {
                                combo.remove(j);
                            }
                        }
                        None => {
                            combo.insert(*j, d);
                        }
                    }
                }
            }
            cursor = i + 1;
        }
        (w, combo)
    }

    /// Inserts `v`; returns `true` iff it was independent of the span.
    pub fn insert(&mut self, v: &[(usize, F)]) -> bool {
        let (w, combo) = self.reduce(v);
        let Some((&pivot, lead)) = w.iter().next() else { return false };
        let inv = lead.inv().expect("nonzero pivot");
        let row: SparseVec<F> = w.iter().map(|(i, x)| (*i, x.mul(&inv))).collect();
        let rc = if self.track {
            let mut rc: SparseVec<F> = combo.iter().map(|(j, y)| (*j, y.neg().mul(&inv))).collect();
            rc.push((self.inserted, inv));
            rc
        } else {
            Vec::new()
        };
        self.inserted += 1;
        self.rows.insert(pivot, (row, rc));
        true
    }

    pub fn contains(&self, v: &[(usize, F)]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coordinates (sparse, over the independent inserted vectors) of `v`.
    pub fn solve(&self, v: &[(usize, F)]) -> Option<SparseVec<F>> {
        assert!(self.track, "solve requires a tracking echelon basis");
        let (w, combo) = self.reduce(v);
        w.is_empty().then(|| combo.into_iter().collect())
    }
}

/// Kernel of the linear map with the given sparse columns, as dense
/// coefficient vectors of length `columns.len()`.
pub fn sparse_kernel<F: Field>(columns: &[SparseVec<F>]) -> Vec<Vec<F>> {
    let mut e = SparseEchelon::tracking();
    let mut independent = Vec::new();
    let mut out = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        if let Some(coords) = e.solve(c) {
            let mut k = vec![F::zero(); columns.len()];
            k[j] = F::one();
            for (slot, x) in coords {
                let col: usize = independent[slot];
                k[col] = k[col].sub(&x);
            }
            out.push(k);
        } else {
            e.insert(c);
            independent.push(j);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, Rational};

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn solve_recovers_coordinates() {
        let a = vec![q(1), q(2), q(0)];
        let b = vec![q(0), q(1), q(1)];
        let mut e = Echelon::tracking(3);
        assert!(e.insert(a.clone()));
        assert!(e.insert(b.clone()));
        assert!(!e.insert(vec![q(2), q(5), q(1)]));
        let target: Vec<Rational> = (0..3).map(|i| a[i].mul(&q(3)).add(&b[i].mul(&q(-2)))).collect();
        assert_eq!(e.solve(&target), Some(vec![q(3), q(-2)]));
        assert_eq!(e.solve(&[q(0), q(0), q(1)]), None);
    }

    #[test]
    fn kernel_of_dependent_columns() {
        let cols = vec![vec![q(1), q(0)], vec![q(2), q(0)], vec![q(0), q(1)]];
        let k = kernel(2, &cols);
        assert_eq!(k, vec![vec![q(-2), q(1), q(0)]]);
    }

    #[test]
    fn sparse_solve_and_kernel() {
        let a: SparseVec<Rational> = vec![(0, q(1)), (5, q(2))];
        let b: SparseVec<Rational> = vec![(5, q(1)), (9, q(1))];
        let mut e = SparseEchelon::tracking();
        assert!(e.insert(&a));
        assert!(e.insert(&b));
        let t = sparse_from(vec![(0, q(3)), (5, q(6)), (5, q(-2)), (9, q(-2))]);
        assert_eq!(e.solve(&t), Some(vec![(0, q(3)), (1, q(-2))]));
        assert!(!e.contains(&[(9, q(1))]));
        let k = sparse_kernel(&[a.clone(), b.clone(), sparse_from(vec![(0, q(1)), (5, q(3)), (9, q(1))])]);
        assert_eq!(k, vec![vec![q(-1), q(-1), q(1)]]);
    }

    #[test]
    fn inverse_of_two_by_two() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert!(invert(&[vec![q(1), q(1)], vec![q(1), q(1)]]).is_none());
    }
}
