//! Exact comparison of computed graded H_q-modules against closed-form
//! descriptions: a description is a free module on generators with a
//! ∂-matrix over R, and equality means an honest degree-0 isomorphism
//! commuting with every variable action and with ∂_q. The isomorphism is
//! found by solving for the generator images.

use std::collections::BTreeMap;

use crate::gflin::{Prime, SparseMatrixFp};
use crate::hochschild::GroupHh;
use crate::poly::Poly;
use crate::soergel::{coefficient_dq_slice, poly_mat_slice, slice_layout, PolyMat, PolyRing};

/// Closed-form description: free module on generators `gens` (q-degrees)
/// with ∂(g_j) = Σ_i dq[i][j]·g_i on top of the coefficient derivation.
#[derive(Debug, Clone)]
pub struct TwistedModuleSpec {
    pub ring: PolyRing,
    pub gens: Vec<i64>,
    pub dq: PolyMat,
}

impl TwistedModuleSpec {
    /// Direct sum of shifted rank-one twists: (q_shift, linear twist as poly).
    pub fn diagonal(ring: PolyRing, parts: &[(i64, Poly)]) -> Self {
        let gens: Vec<i64> = parts.iter().map(|(s, _)| *s).collect();
        let mut dq = PolyMat::zero(ring.prime, parts.len(), parts.len());
        for (i, (_, f)) in parts.iter().enumerate() {
            *dq.at_mut(i, i) = f.clone();
        }
        TwistedModuleSpec { ring, gens, dq }
    }
}

/// A graded module materialized per slice: dimensions, ∂_q and the variable
/// actions (all of degree +2).
pub struct SliceModule {
    pub prime: Prime,
    pub n: usize,
    pub dims: BTreeMap<i64, usize>,
    pub dq: BTreeMap<i64, SparseMatrixFp>,
    pub xact: Vec<BTreeMap<i64, SparseMatrixFp>>,
}

impl SliceModule {
    pub fn dim(&self, d: i64) -> usize {
        *self.dims.get(&d).unwrap_or(&0)
    }

    fn op(&self, table: &BTreeMap<i64, SparseMatrixFp>, d: i64) -> SparseMatrixFp {
        table
            .get(&d)
            .cloned()
            .unwrap_or_else(|| SparseMatrixFp::zero(self.dim(d + 2), self.dim(d), self.prime))
    }

    pub fn dq_at(&self, d: i64) -> SparseMatrixFp {
        self.op(&self.dq, d)
    }

    /// Action of x_m, 1-based.
    pub fn x_at(&self, m: usize, d: i64) -> SparseMatrixFp {
        self.op(&self.xact[m - 1], d)
    }

    /// Materializes the closed-form module on a degree window.
    pub fn from_spec(spec: &TwistedModuleSpec, hi: i64) -> SliceModule {
        let ring = spec.ring;
        let prime = ring.prime;
        let n = ring.n;
        let mut out = SliceModule {
            prime,
            n,
            dims: BTreeMap::new(),
            dq: BTreeMap::new(),
            xact: vec![BTreeMap::new(); n],
        };
        let lo = spec.gens.iter().cloned().min().unwrap_or(0);
        for d in lo..=hi {
            let lay = slice_layout(n, &spec.gens, d);
            if lay.dim > 0 {
                out.dims.insert(d, lay.dim);
            }
        }
        for d in lo..=hi {
            let rows = slice_layout(n, &spec.gens, d + 2).dim;
            let cols = slice_layout(n, &spec.gens, d).dim;
            if cols == 0 {
                continue;
            }
            let mut trips = coefficient_dq_slice(n, &spec.gens, d);
            trips.extend(poly_mat_slice(n, &spec.gens, &spec.gens, &spec.dq, d, 2));
            out.dq
                .insert(d, SparseMatrixFp::from_triplets(rows, cols, prime, trips));
            for m in 1..=n {
                let mut xm = PolyMat::zero(prime, spec.gens.len(), spec.gens.len());
                for g in 0..spec.gens.len() {
                    *xm.at_mut(g, g) = ring.var(m);
                }
                let t = poly_mat_slice(n, &spec.gens, &spec.gens, &xm, d, 2);
                out.xact[m - 1]
                    .insert(d, SparseMatrixFp::from_triplets(rows, cols, prime, t));
            }
        }
        out
    }

    /// Materializes one Hochschild degree of a computed group.
    pub fn from_hh(hh: &GroupHh, j: usize, hi: i64) -> SliceModule {
        let ring = hh.ring;
        let mut out = SliceModule {
            prime: ring.prime,
            n: ring.n,
            dims: BTreeMap::new(),
            dq: BTreeMap::new(),
            xact: vec![BTreeMap::new(); ring.n],
        };
        for (&(jj, d), &dim) in hh.dims().iter() {
            if jj == j && d <= hi && dim > 0 {
                out.dims.insert(d, dim);
            }
        }
        let degrees: Vec<i64> = out.dims.keys().cloned().collect();
        for &d in &degrees {
            if d + 2 > hi {
                continue;
            }
            out.dq.insert(d, hh.induced_dq(j, d));
            for m in 1..=ring.n {
                out.xact[m - 1].insert(d, hh.induced_x(m, j, d));
            }
        }
        out
    }

    /// Multiplication by a polynomial from the slice at `d`, composed from
    /// the variable actions.
    fn apply_poly(&self, f: &Poly, d: i64, v: &[u32]) -> Vec<u32> {
        let prime = self.prime;
        let fd = f.homogeneous_q_degree().unwrap_or(0);
        let target_dim = self.dim(d + fd);
        let mut acc = vec![0u32; target_dim];
        for (m, &c) in &f.terms {
            let mut cur = v.to_vec();
            let mut at = d;
            for (var, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    cur = self.x_at(var + 1, at).apply(&cur);
                    at += 2;
                }
            }
            debug_assert_eq!(at, d + m.q_degree());
            for (a, x) in acc.iter_mut().zip(cur.iter()) {
                *a = prime.add(*a, prime.mul(c, *x));
            }
        }
        acc
    }
}

/// Decides whether the computed module is isomorphic, equivariantly for ∂_q
/// and all variable actions, to the closed-form description on the window
/// [min gen degree, hi]. Degrees above `hi - 2` are not constrained.
pub fn matches_spec(spec: &TwistedModuleSpec, computed: &SliceModule, hi: i64) -> bool {
    let prime = computed.prime;
    let n = computed.n;
    // graded dimensions must agree on the window
    let lo = spec.gens.iter().cloned().min().unwrap_or(0);
    for d in lo..=hi {
        if slice_layout(n, &spec.gens, d).dim != computed.dim(d) {
            return false;
        }
    }
    // unknowns: images of the generators
    let offsets: Vec<usize> = {
        let mut off = 0;
        let mut v = Vec::new();
        for &g in &spec.gens {
            v.push(off);
            off += computed.dim(g);
        }
        v
    };
    let total: usize = spec
        .gens
        .iter()
        .map(|&g| computed.dim(g))
        .sum();
    if total == 0 {
        return computed.dims.values().all(|&d| d == 0);
    }
    // constraints: for every generator j with deg_j + 2 <= hi,
    //   dq_C(u_j) - Σ_i apply(F_ij)(u_i) = 0.
    let mut trips: Vec<(usize, usize, i64)> = Vec::new();
    let mut row_off = 0;
    for (j, &gj) in spec.gens.iter().enumerate() {
        if gj + 2 > hi {
            continue;
        }
        let rows = computed.dim(gj + 2);
        let dqm = computed.dq_at(gj);
        for c in 0..computed.dim(gj) {
            let mut unit = vec![0u32; computed.dim(gj)];
            unit[c] = 1;
            let img = dqm.apply(&unit);
            for (r, &x) in img.iter().enumerate() {
                if x != 0 {
                    trips.push((row_off + r, offsets[j] + c, x as i64));
                }
            }
        }
        for (i, &gi) in spec.gens.iter().enumerate() {
            let f = spec.dq.at(i, j);
            if f.is_zero() {
                continue;
            }
            // deg of f is gj + 2 - gi
            for c in 0..computed.dim(gi) {
                let mut unit = vec![0u32; computed.dim(gi)];
                unit[c] = 1;
                let img = computed.apply_poly(f, gi, &unit);
                for (r, &x) in img.iter().enumerate() {
                    if x != 0 {
                        trips.push((row_off + r, offsets[i] + c, -(x as i64)));
                    }
                }
            }
        }
        row_off += rows;
    }
    let a = SparseMatrixFp::from_triplets(row_off.max(1), total, prime, trips);
    let kernel = a.rank_kernel_image().kernel_basis;
    if kernel.is_empty() {
        return false;
    }
    // search a solution whose induced map is an isomorphism in every degree
    let mut candidates: Vec<Vec<u32>> = kernel.clone();
    for i in 0..kernel.len() {
        for jj in (i + 1)..kernel.len() {
            let mut s = kernel[i].clone();
            for (a, b) in s.iter_mut().zip(kernel[jj].iter()) {
                *a = prime.add(*a, *b);
            }
            candidates.push(s);
        }
    }
    let mut all = vec![0u32; total];
    for k in &kernel {
        for (a, b) in all.iter_mut().zip(k.iter()) {
            *a = prime.add(*a, *b);
        }
    }
    candidates.push(all);
    'cand: for cand in candidates {
        for d in lo..=hi {
            let dim = computed.dim(d);
            let lay = slice_layout(n, &spec.gens, d);
            let mut cols: Vec<Vec<u32>> = Vec::with_capacity(dim);
            for (j, block) in lay.blocks.iter().enumerate() {
                let Some((_, xd)) = block else { continue };
                let monos = crate::poly::monos_of_xdeg(n, *xd);
                let gj = spec.gens[j];
                let u = &cand[offsets[j]..offsets[j] + computed.dim(gj)];
                for m in monos.list.iter() {
                    let f = Poly::monomial(prime, *m, 1);
                    cols.push(computed.apply_poly(&f, gj, u));
                }
            }
            let mut ech = crate::gflin::Echelon::new(dim, prime);
            let mut rank = 0;
            for c in cols {
                if ech.insert(c) {
                    rank += 1;
                }
            }
            if rank != dim {
                continue 'cand;
            }
        }
        return true;
    }
    false
}
