//! Exact sparse linear algebra over the prime field F_p.
//!
//! Everything downstream (Hochschild slices, slash homology, the acceptance
//! pipelines) reduces to the kernel/image computations in this module. All
//! bases are deterministic for a fixed entry order: columns are processed
//! left to right and pivots are the first nonzero row in row order.

use std::collections::BTreeMap;

use crate::error::Error;

/// An odd prime modulus. Characteristic 2 is rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prime {
    p: u32,
}

impl Prime {
    pub fn new(p: u32) -> Result<Self, Error> {
        if p < 3 || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        Ok(Prime { p })
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero mod {}", self.p);
        // Fermat: a^(p-2)
        let mut base = a as u64 % self.p as u64;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            e >>= 1;
        }
        acc as u32
    }

    /// 1/2 mod p, used by the Cautis normalization and the inverse
    /// isomorphisms of the B ⊗ B splitting.
    pub fn inv2(self) -> u32 {
        (self.p + 1) / 2
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue mod an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    pub value: u32,
    pub p: u32,
}

impl Fp {
    pub fn new(value: i64, prime: Prime) -> Self {
        Fp {
            value: prime.reduce_i64(value),
            p: prime.get(),
        }
    }

    fn prime(&self) -> Prime {
        Prime { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Fp {
        Fp {
            value: self.prime().inv(self.value),
            p: self.p,
        }
    }
}

macro_rules! fp_binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl std::ops::$trait for Fp {
            type Output = Fp;
            fn $method(self, rhs: Fp) -> Fp {
                assert_eq!(self.p, rhs.p, "mismatched moduli");
                Fp {
                    value: self.prime().$op(self.value, rhs.value),
                    p: self.p,
                }
            }
        }
    };
}

fp_binop!(Add, add, add);
fp_binop!(Sub, sub, sub);
fp_binop!(Mul, mul, mul);

impl std::ops::Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: self.prime().neg(self.value),
            p: self.p,
        }
    }
}

/// Sparse matrix over F_p. No duplicate positions, no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrixFp {
    pub rows: usize,
    pub cols: usize,
    prime: Prime,
    /// Column-major: `columns[j]` holds (row, value) sorted by row.
    columns: Vec<Vec<(u32, u32)>>,
}

impl SparseMatrixFp {
    pub fn zero(rows: usize, cols: usize, prime: Prime) -> Self {
        SparseMatrixFp {
            rows,
            cols,
            prime,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize, prime: Prime) -> Self {
        let mut m = Self::zero(n, n, prime);
        for j in 0..n {
            m.columns[j].push((j as u32, 1));
        }
        m
    }

    /// Accumulates triplets mod p; zeros are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        prime: Prime,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Self {
        let mut acc: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry out of bounds");
            let e = acc.entry((r, c)).or_insert(0);
            *e = prime.add(*e, prime.reduce_i64(v));
        }
        let mut m = Self::zero(rows, cols, prime);
        for ((r, c), v) in acc {
            if v != 0 {
                m.columns[c].push((r as u32, v));
            }
        }
        m
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Fp)> + '_ {
        self.columns.iter().enumerate().flat_map(move |(j, col)| {
            col.iter().map(move |&(r, v)| {
                (
                    r as usize,
                    j,
                    Fp {
                        value: v,
                        p: self.prime.get(),
                    },
                )
            })
        })
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn column(&self, j: usize) -> &[(u32, u32)] {
        &self.columns[j]
    }

    pub fn push_entry(&mut self, r: usize, c: usize, v: i64) {
        let v = self.prime.reduce_i64(v);
        if v == 0 {
            return;
        }
        let col = &mut self.columns[c];
        match col.binary_search_by_key(&(r as u32), |e| e.0) {
            Ok(i) => {
                let nv = self.prime.add(col[i].1, v);
                if nv == 0 {
                    col.remove(i);
                } else {
                    col[i].1 = nv;
                }
            }
            Err(i) => col.insert(i, (r as u32, v)),
        }
    }

    /// self * rhs (composition of maps: columns of rhs pushed through self).
    pub fn mul(&self, rhs: &SparseMatrixFp) -> SparseMatrixFp {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        assert_eq!(self.prime, rhs.prime);
        let p = self.prime;
        let mut out = SparseMatrixFp::zero(self.rows, rhs.cols, p);
        let mut scratch = vec![0u32; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        for j in 0..rhs.cols {
            for &(k, v) in &rhs.columns[j] {
                for &(r, w) in &self.columns[k as usize] {
                    if scratch[r as usize] == 0 && p.mul(v, w) != 0 {
                        touched.push(r);
                    }
                    scratch[r as usize] = p.add(scratch[r as usize], p.mul(v, w));
                }
            }
            touched.sort_unstable();
            for &r in &touched {
                if scratch[r as usize] != 0 {
                    out.columns[j].push((r, scratch[r as usize]));
                }
                scratch[r as usize] = 0;
            }
            touched.clear();
        }
        out
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.prime;
        let mut out = vec![0u32; self.rows];
        for (j, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(r, w) in &self.columns[j] {
                out[r as usize] = p.add(out[r as usize], p.mul(x, w));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// Deterministic column echelon data: rank, echelonized kernel basis and
    /// image basis. Pivot rule: columns left to right, first nonzero row.
    pub fn rank_kernel_image(&self) -> RankKernelImage {
        let mut ech = Echelon::new(self.rows, self.prime);
        let mut kernel: Vec<Vec<u32>> = Vec::new();
        for j in 0..self.cols {
            let mut track = vec![0u32; self.cols];
            track[j] = 1;
            if !ech.insert_tracked(sparse_to_dense(&self.columns[j], self.rows), &mut track) {
                kernel.push(track);
            }
        }
        let image_basis = ech.basis_columns();
        // Kernel vectors are echelonized against each other for determinism.
        let kernel_basis = echelonize_rows(kernel, self.prime);
        RankKernelImage {
            rank: ech.rank(),
            kernel_basis,
            image_basis,
        }
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.rows, self.prime);
        for j in 0..self.cols {
            ech.insert(sparse_to_dense(&self.columns[j], self.rows));
        }
        ech.rank()
    }
}

fn sparse_to_dense(col: &[(u32, u32)], rows: usize) -> Vec<u32> {
    let mut v = vec![0u32; rows];
    for &(r, x) in col {
        v[r as usize] = x;
    }
    v
}

fn echelonize_rows(vecs: Vec<Vec<u32>>, prime: Prime) -> Vec<Vec<u32>> {
    if vecs.is_empty() {
        return vecs;
    }
    let n = vecs[0].len();
    let mut ech = Echelon::new(n, prime);
    for v in vecs {
        ech.insert(v);
    }
    ech.basis_columns()
}

#[derive(Debug, Clone)]
pub struct RankKernelImage {
    pub rank: usize,
    pub kernel_basis: Vec<Vec<u32>>,
    pub image_basis: Vec<Vec<u32>>,
}

/// Incremental echelon form over F_p with recorded pivots; supports solving
/// against the inserted columns. Columns are stored reduced, pivot scaled
/// to 1.
pub struct Echelon {
    prime: Prime,
    rows: usize,
    /// (pivot_row, column) pairs in insertion order.
    cols: Vec<(usize, Vec<u32>)>,
    /// pivot_row -> index into `cols`
    pivot_of_row: BTreeMap<usize, usize>,
    /// For tracked inserts, the combination of original vectors giving each
    /// echelon column.
    tracks: Vec<Option<Vec<u32>>>,
}

impl Echelon {
    pub fn new(rows: usize, prime: Prime) -> Self {
        Echelon {
            prime,
            rows,
            cols: Vec::new(),
            pivot_of_row: BTreeMap::new(),
            tracks: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    /// Reduces `v` against the basis; if nonzero remains, installs it and
    /// returns true.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        let mut dummy: Vec<u32> = Vec::new();
        self.insert_inner(v, &mut dummy, false)
    }

    /// As `insert`, but applies the same column operations to `track`.
    pub fn insert_tracked(&mut self, v: Vec<u32>, track: &mut Vec<u32>) -> bool {
        self.insert_inner(v, track, true)
    }

    fn insert_inner(&mut self, mut v: Vec<u32>, track: &mut Vec<u32>, tracked: bool) -> bool {
        let p = self.prime;
        loop {
            let pivot = v.iter().position(|&x| x != 0);
            let Some(r) = pivot else {
                return false;
            };
            match self.pivot_of_row.get(&r) {
                Some(&idx) => {
                    let c = v[r];
                    let col = self.cols[idx].1.clone();
                    for (vi, ci) in v.iter_mut().zip(col.iter()) {
                        *vi = p.sub(*vi, p.mul(c, *ci));
                    }
                    if tracked {
                        // Track columns only record combinations of inserted
                        // vectors, not of the echelon basis; reduction by a
                        // previously-installed pivot corresponds to a linear
                        // combination that we fold in when the pivot itself
                        // was tracked.
                        if let Some(tc) = self.track_of(idx) {
                            for (ti, xi) in track.iter_mut().zip(tc.iter()) {
                                *ti = p.sub(*ti, p.mul(c, *xi));
                            }
                        }
                    }
                }
                None => {
                    let inv = p.inv(v[r]);
                    for x in v.iter_mut() {
                        *x = p.mul(*x, inv);
                    }
                    if tracked {
                        for x in track.iter_mut() {
                            *x = p.mul(*x, inv);
                        }
                        self.tracks.push(Some(track.clone()));
                    } else {
                        self.tracks.push(None);
                    }
                    self.pivot_of_row.insert(r, self.cols.len());
                    self.cols.push((r, v));
                    return true;
                }
            }
        }
    }

    fn track_of(&self, idx: usize) -> Option<&Vec<u32>> {
        self.tracks.get(idx).and_then(|t| t.as_ref())
    }

    /// Expresses `v` as a combination of the inserted basis columns;
    /// None if `v` is not in their span.
    pub fn solve(&self, mut v: Vec<u32>) -> Option<Vec<u32>> {
        let p = self.prime;
        let mut coeffs = vec![0u32; self.cols.len()];
        loop {
            let Some(r) = v.iter().position(|&x| x != 0) else {
                return Some(coeffs);
            };
            let &idx = self.pivot_of_row.get(&r)?;
            let c = v[r];
            coeffs[idx] = c;
            let col = &self.cols[idx].1;
            for (vi, ci) in v.iter_mut().zip(col.iter()) {
                *vi = p.sub(*vi, p.mul(c, *ci));
            }
        }
    }

    pub fn contains(&self, v: Vec<u32>) -> bool {
        self.solve(v).is_some()
    }

    pub fn basis_columns(&self) -> Vec<Vec<u32>> {
        self.cols.iter().map(|(_, c)| c.clone()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

/// Per-degree homology of a homogeneous complex: ker(d_out)/im(d_in).
#[derive(Debug, Clone)]
pub struct HomologySlice {
    pub dim: usize,
    pub representatives: Vec<Vec<u32>>,
}

/// Homology at the middle slot of `d_in` then `d_out`. Fails if the
/// composite is nonzero.
pub fn homology_slice(
    d_in: &SparseMatrixFp,
    d_out: &SparseMatrixFp,
) -> Result<HomologySlice, Error> {
    assert_eq!(d_in.rows, d_out.cols, "incompatible slice shapes");
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::CompositionNonzero);
    }
    let prime = d_in.prime();
    let rki_out = d_out.rank_kernel_image();
    let mut ech = Echelon::new(d_in.rows, prime);
    for j in 0..d_in.cols {
        ech.insert(sparse_to_dense(d_in.column(j), d_in.rows));
    }
    let im_rank = ech.rank();
    let mut reps = Vec::new();
    for k in rki_out.kernel_basis {
        if ech.insert(k.clone()) {
            reps.push(k);
        }
    }
    debug_assert_eq!(reps.len(), (d_in.rows - rki_out.rank) - im_rank);
    Ok(HomologySlice {
        dim: reps.len(),
        representatives: reps,
    })
}

/// Finitely supported assignment of dimensions (and optional labels) to
/// integer multidegrees. Half-integer grades are stored doubled.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradedFpSpace {
    pub slices: BTreeMap<Vec<i32>, GradedSlice>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSlice {
    pub dim: usize,
    pub labels: Option<Vec<String>>,
}

impl GradedFpSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, degree: Vec<i32>, dim: usize) {
        if dim == 0 {
            self.slices.remove(&degree);
        } else {
            self.slices.insert(degree, GradedSlice { dim, labels: None });
        }
    }

    pub fn add(&mut self, degree: Vec<i32>, dim: usize) {
        if dim == 0 {
            return;
        }
        self.slices
            .entry(degree)
            .or_insert(GradedSlice {
                dim: 0,
                labels: None,
            })
            .dim += dim;
    }

    pub fn dim(&self, degree: &[i32]) -> usize {
        self.slices.get(degree).map_or(0, |s| s.dim)
    }

    pub fn total_dim(&self) -> usize {
        self.slices.values().map(|s| s.dim).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn rejects_char_two() {
        assert!(Prime::new(2).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(7).is_ok());
    }

    #[test]
    fn identity_rank() {
        let m = SparseMatrixFp::identity(3, p(5));
        let rki = m.rank_kernel_image();
        assert_eq!(rki.rank, 3);
        assert!(rki.kernel_basis.is_empty());
    }

    #[test]
    fn zero_matrix_kernel() {
        let m = SparseMatrixFp::zero(2, 4, p(3));
        let rki = m.rank_kernel_image();
        assert_eq!(rki.rank, 0);
        assert_eq!(rki.kernel_basis.len(), 4);
    }

    #[test]
    fn dependent_columns_rank_one() {
        // [[1,2],[2,4]] over F_5: second row is twice the first.
        let m = SparseMatrixFp::from_triplets(
            2,
            2,
            p(5),
            vec![(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)],
        );
        let rki = m.rank_kernel_image();
        assert_eq!(rki.rank, 1);
        assert_eq!(rki.kernel_basis.len(), 1);
    }

    #[test]
    fn homology_zero_maps() {
        let d_in = SparseMatrixFp::zero(2, 0, p(3));
        let d_out = SparseMatrixFp::zero(0, 2, p(3));
        let h = homology_slice(&d_in, &d_out).unwrap();
        assert_eq!(h.dim, 2);
    }

    #[test]
    fn homology_identity_contractible() {
        // 1 -> 1 -> 0
        let d_in = SparseMatrixFp::identity(1, p(3));
        let d_out = SparseMatrixFp::zero(0, 1, p(3));
        let h = homology_slice(&d_in, &d_out).unwrap();
        assert_eq!(h.dim, 0);
    }

    #[test]
    fn homology_rejects_nonzero_composite() {
        let d_in = SparseMatrixFp::identity(1, p(3));
        let d_out = SparseMatrixFp::identity(1, p(3));
        assert!(matches!(
            homology_slice(&d_in, &d_out),
            Err(Error::CompositionNonzero)
        ));
    }

    // Koszul slice of k[x] ⊗ k[x] in q-degree 4: multiplication by
    // x⊗1 - 1⊗x from the degree-2 monomials lands in the degree-4 slice
    // spanned by x^a ⊗ x^b with a+b = 2. Reducing by hand leaves one class.
    #[test]
    fn koszul_slice_dimension() {
        // target basis: x^2⊗1, x⊗x, 1⊗x^2 ; source basis: x⊗1, 1⊗x
        let d_in = SparseMatrixFp::from_triplets(
            3,
            2,
            p(5),
            vec![
                (0, 0, 1),
                (1, 0, -1), // (x⊗1-1⊗x)·(x⊗1) = x^2⊗1 - x⊗x
                (1, 1, 1),
                (2, 1, -1), // (x⊗1-1⊗x)·(1⊗x) = x⊗x - 1⊗x^2
            ],
        );
        let d_out = SparseMatrixFp::zero(0, 3, p(5));
        let h = homology_slice(&d_in, &d_out).unwrap();
        assert_eq!(h.dim, 1);
    }

    #[test]
    fn solve_expresses_combinations() {
        let prime = p(7);
        let mut ech = Echelon::new(3, prime);
        ech.insert(vec![1, 2, 0]);
        ech.insert(vec![0, 1, 1]);
        let c = ech.solve(vec![2, 5, 1]).unwrap();
        // 2*(col0 normalized) + ... just verify reconstruction
        let b = ech.basis_columns();
        let mut acc = vec![0u32; 3];
        for (ci, col) in c.iter().zip(b.iter()) {
            for (a, x) in acc.iter_mut().zip(col.iter()) {
                *a = prime.add(*a, prime.mul(*ci, *x));
            }
        }
        assert_eq!(acc, vec![2, 5, 1]);
        assert!(ech.solve(vec![0, 0, 5]).is_none());
    }
}
