//! Multivariate polynomials over F_p with every variable in q-degree 2,
//! together with the monomial-slice bases used to turn module operators
//! into finite matrices degree by degree.

use std::collections::HashMap;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::gflin::Prime;

pub const MAX_VARS: usize = 8;

/// Monomial as an exponent vector; unused variables stay at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub [u8; MAX_VARS]);

impl Mono {
    pub fn one() -> Self {
        Mono([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Mono(e)
    }

    pub fn xdeg(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn q_degree(&self) -> i64 {
        2 * self.xdeg() as i64
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Mono(e)
    }

    pub fn times_var(&self, i: usize) -> Mono {
        let mut e = self.0;
        e[i] += 1;
        Mono(e)
    }
}

/// Polynomial over F_p. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub p: u32,
    pub terms: BTreeMap<Mono, u32>,
}

impl Poly {
    pub fn zero(prime: Prime) -> Self {
        Poly {
            p: prime.get(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(prime: Prime, c: i64) -> Self {
        let mut f = Self::zero(prime);
        f.add_term(Mono::one(), c);
        f
    }

    pub fn one(prime: Prime) -> Self {
        Self::constant(prime, 1)
    }

    pub fn variable(prime: Prime, i: usize) -> Self {
        let mut f = Self::zero(prime);
        f.add_term(Mono::var(i), 1);
        f
    }

    pub fn monomial(prime: Prime, m: Mono, c: i64) -> Self {
        let mut f = Self::zero(prime);
        f.add_term(m, c);
        f
    }

    fn prime(&self) -> Prime {
        Prime::new(self.p).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: i64) {
        let p = self.prime();
        let c = p.reduce_i64(c);
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0);
        *e = p.add(*e, c);
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c as i64);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> Poly {
        let p = self.prime();
        let c = p.reduce_i64(c);
        let mut out = Poly::zero(p);
        if c == 0 {
            return out;
        }
        for (&m, &v) in &self.terms {
            out.terms.insert(m, p.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.p, other.p);
        let p = self.prime();
        let mut out = Poly::zero(p);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), p.mul(ca, cb) as i64);
            }
        }
        out
    }

    /// The derivation with ∂(x_i) = x_i^2: on a monomial,
    /// ∂(m) = Σ_i e_i · x_i · m.
    pub fn dq(&self) -> Poly {
        let p = self.prime();
        let mut out = Poly::zero(p);
        for (m, &c) in &self.terms {
            for i in 0..MAX_VARS {
                let e = m.0[i];
                if e > 0 {
                    out.add_term(m.times_var(i), p.mul(c, e as u32 % p.get()) as i64);
                }
            }
        }
        out
    }

    /// q-degree if homogeneous, None otherwise (zero counts as any degree).
    pub fn homogeneous_q_degree(&self) -> Option<i64> {
        let mut deg = None;
        for m in self.terms.keys() {
            match deg {
                None => deg = Some(m.q_degree()),
                Some(d) if d == m.q_degree() => {}
                _ => return None,
            }
        }
        deg
    }

    pub fn constant_term(&self) -> u32 {
        *self.terms.get(&Mono::one()).unwrap_or(&0)
    }

    /// Nonzero scalar if the polynomial is a unit constant.
    pub fn as_unit_scalar(&self) -> Option<u32> {
        if self.terms.len() == 1 {
            if let Some(&c) = self.terms.get(&Mono::one()) {
                return Some(c);
            }
        }
        None
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != 1 || m.xdeg() == 0 {
                write!(f, "{}", c)?;
                if m.xdeg() > 0 {
                    write!(f, "*")?;
                }
            }
            let mut needs_sep = false;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    if needs_sep {
                        write!(f, "*")?;
                    }
                    needs_sep = true;
                    if e == 1 {
                        write!(f, "x{}", i + 1)?;
                    } else {
                        write!(f, "x{}^{}", i + 1, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Linear form Σ a_i x_i with coefficients in F_p.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearTwist {
    pub p: u32,
    pub coeffs: Vec<u32>,
}

impl LinearTwist {
    pub fn zero(prime: Prime, n: usize) -> Self {
        LinearTwist {
            p: prime.get(),
            coeffs: vec![0; n],
        }
    }

    pub fn from_coeffs(prime: Prime, coeffs: &[i64]) -> Self {
        LinearTwist {
            p: prime.get(),
            coeffs: coeffs.iter().map(|&c| prime.reduce_i64(c)).collect(),
        }
    }

    pub fn single(prime: Prime, n: usize, i: usize, c: i64) -> Self {
        let mut t = Self::zero(prime, n);
        t.coeffs[i] = prime.reduce_i64(c);
        t
    }

    pub fn add(&self, other: &LinearTwist) -> LinearTwist {
        assert_eq!(self.p, other.p);
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        let p = Prime::new(self.p).unwrap();
        LinearTwist {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(&a, &b)| p.add(a, b))
                .collect(),
        }
    }

    pub fn negate(&self) -> LinearTwist {
        let p = Prime::new(self.p).unwrap();
        LinearTwist {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&a| p.neg(a)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn as_poly(&self) -> Poly {
        let prime = Prime::new(self.p).unwrap();
        let mut f = Poly::zero(prime);
        for (i, &c) in self.coeffs.iter().enumerate() {
            f.add_term(Mono::var(i), c as i64);
        }
        f
    }
}

/// Basis of the monomials of one total x-degree in n variables, with an
/// index lookup. Cached process-wide.
pub struct MonoBasis {
    pub list: Vec<Mono>,
    pub index: HashMap<Mono, u32>,
}

fn mono_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<MonoBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<MonoBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn monos_of_xdeg(n: usize, d: usize) -> Arc<MonoBasis> {
    assert!(n <= MAX_VARS);
    if let Some(b) = mono_cache().lock().unwrap().get(&(n, d)) {
        return b.clone();
    }
    let mut list = Vec::new();
    let mut current = [0u8; MAX_VARS];
    gen_monos(n, d, 0, &mut current, &mut list);
    let index = list
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i as u32))
        .collect();
    let basis = Arc::new(MonoBasis { list, index });
    mono_cache()
        .lock()
        .unwrap()
        .insert((n, d), basis.clone());
    basis
}

fn gen_monos(n: usize, d: usize, var: usize, current: &mut [u8; MAX_VARS], out: &mut Vec<Mono>) {
    if var + 1 == n {
        current[var] = d as u8;
        out.push(Mono(*current));
        current[var] = 0;
        return;
    }
    for e in (0..=d).rev() {
        current[var] = e as u8;
        gen_monos(n, d - e, var + 1, current, out);
    }
    current[var] = 0;
}

pub fn mono_count(n: usize, d: usize) -> usize {
    monos_of_xdeg(n, d).list.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn derivation_power_rule() {
        // ∂(x^k) = k x^{k+1}
        let p = prime(5);
        let x = Poly::variable(p, 0);
        let mut xk = Poly::one(p);
        for k in 1u32..8 {
            xk = xk.mul(&x);
            let d = xk.dq();
            let mut expect = Poly::zero(p);
            expect.add_term(Mono([k as u8 + 1, 0, 0, 0, 0, 0, 0, 0]), k as i64);
            assert_eq!(d, expect, "k={}", k);
        }
    }

    #[test]
    fn derivation_is_leibniz() {
        let p = prime(7);
        let f = Poly::variable(p, 0).add(&Poly::variable(p, 1).scale(3));
        let g = Poly::variable(p, 1).mul(&Poly::variable(p, 2));
        let lhs = f.mul(&g).dq();
        let rhs = f.dq().mul(&g).add(&f.mul(&g.dq()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mono_bases_count() {
        assert_eq!(mono_count(1, 5), 1);
        assert_eq!(mono_count(2, 5), 6);
        assert_eq!(mono_count(3, 4), 15);
        let b = monos_of_xdeg(2, 3);
        for (i, m) in b.list.iter().enumerate() {
            assert_eq!(b.index[m] as usize, i);
            assert_eq!(m.xdeg(), 3);
        }
    }

    #[test]
    fn twist_addition() {
        let p = prime(5);
        let a = LinearTwist::from_coeffs(p, &[1, 2]);
        let b = LinearTwist::from_coeffs(p, &[4, 4]);
        assert_eq!(a.add(&b), LinearTwist::from_coeffs(p, &[0, 1]));
        assert!(a.add(&a.negate()).is_zero());
    }
}
