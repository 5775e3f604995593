use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde_json::{json, Value};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Sparse vector: (index, value) pairs sorted by index, no stored zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

pub fn sv_from_dense<F: Scalar>(v: &[F]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sv_to_dense<F: Scalar>(v: &SparseVec<F>, n: usize) -> Vec<F> {
    let mut out = vec![F::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// a + c·b
pub fn sv_axpy<F: Scalar>(a: &SparseVec<F>, c: &F, b: &SparseVec<F>) -> SparseVec<F> {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c.mul(&b[j].1)));
            j += 1;
        } else {
            let v = a[i].1.add(&c.mul(&b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sv_scale<F: Scalar>(a: &SparseVec<F>, c: &F) -> SparseVec<F> {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x.mul(c))).collect()
}

pub fn sv_get<F: Scalar>(a: &SparseVec<F>, idx: usize) -> F {
    match a.binary_search_by_key(&idx, |(i, _)| *i) {
        Ok(p) => a[p].1.clone(),
        Err(_) => F::zero(),
    }
}

pub fn sv_dot<F: Scalar>(a: &SparseVec<F>, b: &SparseVec<F>) -> F {
    let mut acc = F::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc = acc.add(&a[i].1.mul(&b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Accumulates (index, value) contributions into a sparse vector.
pub fn sv_collect<F: Scalar>(items: impl IntoIterator<Item = (usize, F)>) -> SparseVec<F> {
    let mut acc: BTreeMap<usize, F> = BTreeMap::new();
    for (i, x) in items {
        if x.is_zero() {
            continue;
        }
        match acc.get_mut(&i) {
            Some(v) => *v = v.add(&x),
            None => {
                acc.insert(i, x);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Row-major sparse matrix. Operators act on column vectors, so column j of
/// an operator matrix is the image of basis vector j.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<F> {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec<F>>,
}

impl<F: Scalar> SparseMat<F> {
    pub fn zeros(rows: usize, cols: usize) -> SparseMat<F> {
        SparseMat { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> SparseMat<F> {
        SparseMat { rows: n, cols: n, data: (0..n).map(|i| vec![(i, F::one())]).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec<F>>) -> SparseMat<F> {
        debug_assert!(rows.iter().all(|r| r.iter().all(|(j, x)| *j < cols && !x.is_zero())));
        SparseMat { rows: rows.len(), cols, data: rows }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec<F>>) -> SparseMat<F> {
        let cols = columns.len();
        let mut data: Vec<SparseVec<F>> = vec![Vec::new(); rows];
        for (j, col) in columns.into_iter().enumerate() {
            for (i, x) in col {
                data[i].push((j, x));
            }
        }
        SparseMat { rows, cols, data }
    }

    pub fn from_dense(d: &[Vec<F>]) -> SparseMat<F> {
        let cols = d.first().map_or(0, |r| r.len());
        SparseMat { rows: d.len(), cols, data: d.iter().map(|r| sv_from_dense(r)).collect() }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        t: impl IntoIterator<Item = (usize, usize, F)>,
    ) -> SparseMat<F> {
        let mut per_row: Vec<Vec<(usize, F)>> = vec![Vec::new(); rows];
        for (i, j, x) in t {
            assert!(i < rows && j < cols, "triplet out of range");
            per_row[i].push((j, x));
        }
        SparseMat { rows, cols, data: per_row.into_iter().map(sv_collect).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec<F> {
        &self.data[i]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &SparseVec<F>> {
        self.data.iter()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        sv_get(&self.data[i], j)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn transpose(&self) -> SparseMat<F> {
        let mut data: Vec<SparseVec<F>> = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r {
                data[*j].push((i, x.clone()));
            }
        }
        SparseMat { rows: self.cols, cols: self.rows, data }
    }

    /// Column j as a sparse vector.
    pub fn column(&self, j: usize) -> SparseVec<F> {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let v = sv_get(r, j);
                (!v.is_zero()).then_some((i, v))
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &SparseVec<F>) -> SparseVec<F> {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let x = sv_dot(r, v);
                (!x.is_zero()).then_some((i, x))
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &SparseVec<F>) -> SparseVec<F> {
        let mut acc: SparseVec<F> = Vec::new();
        for (i, c) in v {
            acc = sv_axpy(&acc, c, &self.data[*i]);
        }
        acc
    }

    pub fn mul(&self, other: &SparseMat<F>) -> SparseMat<F> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = self.data.iter().map(|r| other.vec_mul(r)).collect();
        SparseMat { rows: self.rows, cols: other.cols, data }
    }

    pub fn add(&self, other: &SparseMat<F>) -> SparseMat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| sv_axpy(a, &F::one(), b))
            .collect();
        SparseMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &SparseMat<F>) -> SparseMat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let m1 = F::one().neg();
        let data = self.data.iter().zip(&other.data).map(|(a, b)| sv_axpy(a, &m1, b)).collect();
        SparseMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &F) -> SparseMat<F> {
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| sv_scale(r, c)).collect(),
        }
    }

    pub fn trace(&self) -> F {
        let mut t = F::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t.add(&self.get(i, i));
        }
        t
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        self.data.iter().map(|r| sv_to_dense(r, self.cols)).collect()
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> SparseMat<G> {
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|r| {
                    r.iter()
                        .filter_map(|(j, x)| {
                            let y = f(x);
                            (!y.is_zero()).then_some((*j, y))
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn try_map<G: Scalar>(&self, f: impl Fn(&F) -> Option<G>) -> Option<SparseMat<G>> {
        let mut data = Vec::with_capacity(self.rows);
        for r in &self.data {
            let mut row = Vec::with_capacity(r.len());
            for (j, x) in r {
                let y = f(x)?;
                if !y.is_zero() {
                    row.push((*j, y));
                }
            }
            data.push(row);
        }
        Some(SparseMat { rows: self.rows, cols: self.cols, data })
    }

    /// `{"rows":r,"cols":c,"entries":[[i,j,"p/q"],...]}`
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> =
            self.entries().map(|(i, j, x)| json!([i, j, x.to_string()])).collect();
        json!({"rows": self.rows, "cols": self.cols, "entries": entries})
    }
}

/// Incremental exact row reduction. Rows are reduced against the current
/// pivots as they arrive; the pivot of a new row is its leading column.
pub struct RowReducer<F> {
    cols: usize,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<(usize, SparseVec<F>)>,
}

impl<F: Scalar> RowReducer<F> {
    pub fn new(cols: usize) -> RowReducer<F> {
        RowReducer { cols, pivot_row: vec![None; cols], rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    fn reduce_map(&self, v: &SparseVec<F>, skip: Option<usize>) -> BTreeMap<usize, F> {
        let mut work: BTreeMap<usize, F> = v.iter().cloned().collect();
        let mut heap: BinaryHeap<(Reverse<usize>, usize)> = BinaryHeap::new();
        for (j, _) in v {
            if let Some(r) = self.pivot_row[*j] {
                if Some(r) != skip {
                    heap.push((Reverse(r), *j));
                }
            }
        }
        while let Some((Reverse(r), col)) = heap.pop() {
            let Some(c) = work.get(&col).cloned() else { continue };
            for (j, x) in &self.rows[r].1 {
                let delta = c.mul(x);
                match work.get_mut(j) {
                    Some(w) => {
                        *w = w.sub(&delta);
                        if w.is_zero() {
                            work.remove(j);
                        }
                    }
                    None => {
                        work.insert(*j, delta.neg());
                        if let Some(r2) = self.pivot_row[*j] {
                            if Some(r2) != skip {
                                heap.push((Reverse(r2), *j));
                            }
                        }
                    }
                }
            }
        }
        work
    }

    /// Reduce v modulo the current row space (leaves only non-pivot columns).
    pub fn reduce(&self, v: &SparseVec<F>) -> SparseVec<F> {
        self.reduce_map(v, None).into_iter().collect()
    }

    /// Adds a row; returns true if it was independent of the previous rows.
    pub fn add_row(&mut self, v: &SparseVec<F>) -> bool {
        let work = self.reduce_map(v, None);
        let Some((&p, lead)) = work.iter().next() else { return false };
        let inv = lead.inv();
        let row: SparseVec<F> = work.iter().map(|(j, x)| (*j, x.mul(&inv))).collect();
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push((p, row));
        true
    }

    /// Reduced row echelon form of everything added so far.
    pub fn finish(mut self) -> Echelon<F> {
        for r in (0..self.rows.len()).rev() {
            let reduced = self.reduce_map(&self.rows[r].1, Some(r));
            self.rows[r].1 = reduced.into_iter().collect();
        }
        self.rows.sort_by_key(|(p, _)| *p);
        let pivots = self.rows.iter().map(|(p, _)| *p).collect();
        let rows = self.rows.into_iter().map(|(_, r)| r).collect();
        Echelon { rref: SparseMat::from_rows(self.cols, rows), pivots }
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Echelon<F> {
    pub rref: SparseMat<F>,
    pub pivots: Vec<usize>,
}

impl<F: Scalar> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Non-pivot columns in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.rref.ncols()];
        for p in &self.pivots {
            is_pivot[*p] = true;
        }
        (0..self.rref.ncols()).filter(|j| !is_pivot[*j]).collect()
    }
}

pub fn echelon<F: Scalar>(m: &SparseMat<F>) -> Echelon<F> {
    let mut red = RowReducer::new(m.ncols());
    for r in m.rows_iter() {
        red.add_row(r);
    }
    red.finish()
}

pub fn rank<F: Scalar>(m: &SparseMat<F>) -> usize {
    let mut red = RowReducer::new(m.ncols());
    for r in m.rows_iter() {
        red.add_row(r);
    }
    red.rank()
}

/// Right null space.
pub fn kernel<F: Scalar>(m: &SparseMat<F>) -> Subspace<F> {
    let e = echelon(m);
    let cols = m.ncols();
    let rref_t = e.rref.transpose();
    let mut vecs = Vec::new();
    for f in e.free_columns() {
        let mut v: Vec<(usize, F)> = vec![(f, F::one())];
        for (i, x) in rref_t.row(f) {
            v.push((e.pivots[*i], x.neg()));
        }
        v.sort_by_key(|(j, _)| *j);
        vecs.push(v);
    }
    let k = Subspace::from_vectors(cols, &vecs);
    debug_assert!(k.basis().iter().all(|v| m.mul_vec(v).is_empty()));
    k
}

/// A subspace of F^n held as a basis in reduced row echelon form, which is
/// unique for the subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<SparseVec<F>>,
    pivots: Vec<usize>,
}

impl<F: Scalar> Subspace<F> {
    pub fn from_vectors(ambient: usize, vecs: &[SparseVec<F>]) -> Subspace<F> {
        let mut red = RowReducer::new(ambient);
        for v in vecs {
            red.add_row(v);
        }
        let e = red.finish();
        Subspace { ambient, basis: e.rref.rows_iter().cloned().collect(), pivots: e.pivots }
    }

    pub fn full(n: usize) -> Subspace<F> {
        Subspace {
            ambient: n,
            basis: (0..n).map(|i| vec![(i, F::one())]).collect(),
            pivots: (0..n).collect(),
        }
    }

    pub fn zero(n: usize) -> Subspace<F> {
        Subspace { ambient: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of v in the echelon basis, or None if v ∉ self.
    pub fn coordinates(&self, v: &SparseVec<F>) -> Option<Vec<F>> {
        let coords: Vec<F> = self.pivots.iter().map(|p| sv_get(v, *p)).collect();
        let mut rest = v.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            rest = sv_axpy(&rest, &c.neg(), b);
        }
        rest.is_empty().then_some(coords)
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Vector with the given coordinates in the echelon basis.
    pub fn combine(&self, coords: &[F]) -> SparseVec<F> {
        let mut acc = Vec::new();
        for (c, b) in coords.iter().zip(&self.basis) {
            acc = sv_axpy(&acc, c, b);
        }
        acc
    }

    /// Matrix of a linear map m (acting on column vectors) restricted to this
    /// invariant subspace, in echelon-basis coordinates.
    pub fn restrict(&self, m: &SparseMat<F>) -> Result<SparseMat<F>> {
        if !m.is_square() || m.nrows() != self.ambient {
            return Err(Error::Precondition("restriction needs a square matrix on the ambient space".into()));
        }
        let mut columns = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let img = m.mul_vec(b);
            let c = self
                .coordinates(&img)
                .ok_or_else(|| Error::Precondition("subspace is not invariant".into()))?;
            columns.push(sv_from_dense(&c));
        }
        Ok(SparseMat::from_columns(self.dim(), columns))
    }

    /// Image of a subspace of this subspace's coordinate space.
    pub fn embed(&self, inner: &Subspace<F>) -> Subspace<F> {
        let vecs: Vec<SparseVec<F>> = inner
            .basis
            .iter()
            .map(|c| self.combine(&sv_to_dense(c, self.dim())))
            .collect();
        Subspace::from_vectors(self.ambient, &vecs)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .basis
            .iter()
            .map(|v| Value::Array(v.iter().map(|(j, x)| json!([j, x.to_string()])).collect()))
            .collect();
        json!({"ambient_dim": self.ambient, "dim": self.dim(), "basis": rows})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::{rational, Q};

    fn m(rows: &[&[i64]]) -> SparseMat<Q> {
        let d: Vec<Vec<Q>> =
            rows.iter().map(|r| r.iter().map(|&x| rational(x, 1)).collect()).collect();
        SparseMat::from_dense(&d)
    }

    #[test]
    fn echelon_examples() {
        let e = echelon(&SparseMat::<Q>::identity(3));
        assert_eq!((e.rank(), e.pivots.clone()), (3, vec![0, 1, 2]));
        assert_eq!(echelon(&SparseMat::<Q>::zeros(2, 3)).rank(), 0);
        assert_eq!(echelon(&m(&[&[1, 2], &[2, 4]])).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&SparseMat::<Q>::identity(3)).dim(), 0);
        assert_eq!(kernel(&SparseMat::<Q>::zeros(2, 3)).dim(), 3);
        let k = kernel(&m(&[&[1, 1]]));
        assert_eq!(k.basis(), &[vec![(0, rational(1, 1)), (1, rational(-1, 1))]]);
    }

    #[test]
    fn rref_is_unique_under_row_order() {
        let a = m(&[&[0, 2, 4, 1], &[1, 1, 1, 1], &[1, 3, 5, 2], &[2, 0, -2, 3]]);
        let b = m(&[&[2, 0, -2, 3], &[1, 3, 5, 2], &[0, 2, 4, 1], &[1, 1, 1, 1]]);
        assert_eq!(echelon(&a), echelon(&b));
        let e = echelon(&a);
        assert_eq!(echelon(&e.rref).rref, e.rref);
    }
}
