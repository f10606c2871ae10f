//! Finite fields F_{p^m} with explicit modulus, and Frobenius-inverse roots.
//!
//! Elements are coefficient vectors in the basis 1, t, ..., t^{m-1} of
//! F_p[t]/(modulus). For m = 1 no modulus is stored and elements are single
//! residues mod p.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Specification of a coefficient field F_{p^m}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// Monic modulus of degree m as coefficients c_0..c_m (c_m = 1); empty for m = 1.
    pub modulus: Vec<u32>,
}

/// An element of F_{p^m}: m coefficients mod p in the basis 1, t, ..., t^{m-1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FElem(pub Vec<u32>);

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

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Arc<FieldSpec>> {
        FieldSpec::new(p, 1, Vec::new())
    }

    pub fn new(p: u32, m: u32, modulus: Vec<u32>) -> Result<Arc<FieldSpec>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::BadModulus(m));
        }
        let spec = FieldSpec { p, m, modulus };
        if m > 1 {
            if spec.modulus.len() != m as usize + 1
                || spec.modulus[m as usize] != 1
                || spec.modulus.iter().any(|&c| c >= p)
            {
                return Err(Error::BadModulus(m));
            }
            if !spec.modulus_irreducible() {
                return Err(Error::BadModulus(m));
            }
        } else if !spec.modulus.is_empty() {
            return Err(Error::BadModulus(m));
        }
        Ok(Arc::new(spec))
    }

    /// Number of elements p^m.
    pub fn size(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }

    pub fn zero(&self) -> FElem {
        FElem(vec![0; self.m as usize])
    }

    pub fn one(&self) -> FElem {
        self.from_u32(1)
    }

    pub fn from_u32(&self, n: u32) -> FElem {
        let mut c = vec![0; self.m as usize];
        c[0] = n % self.p;
        FElem(c)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FElem {
        let mut c = vec![0; self.m as usize];
        for (i, &v) in coeffs.iter().enumerate().take(self.m as usize) {
            c[i] = v % self.p;
        }
        FElem(c)
    }

    pub fn is_zero(&self, a: &FElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FElem, b: &FElem) -> FElem {
        FElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FElem) -> FElem {
        FElem(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        let m = self.m as usize;
        let p = self.p as u64;
        // schoolbook product then reduction by the monic modulus
        let mut prod = vec![0u64; 2 * m - 1];
        for i in 0..m {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + a.0[i] as u64 * b.0[j] as u64) % p;
            }
        }
        for k in (m..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &md) in self.modulus.iter().enumerate().take(m) {
                let idx = k - m + i;
                prod[idx] = (prod[idx] + c * (p - md as u64)) % p;
            }
        }
        FElem(prod[..m].iter().map(|&c| c as u32).collect())
    }

    pub fn scalar(&self, a: &FElem, s: u32) -> FElem {
        let s = s % self.p;
        FElem(a.0.iter().map(|&x| (x * s) % self.p).collect())
    }

    pub fn pow(&self, a: &FElem, mut n: u64) -> FElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FElem) -> Result<FElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow(a, self.size() - 2))
    }

    /// Unique c^(1/p^e); Frobenius is bijective so this is c^(p^(k)) with
    /// p^e * p^k = p^(multiple of m) on the multiplicative order.
    pub fn pe_root(&self, c: &FElem, e: u32) -> FElem {
        let m = self.m as u64;
        let k = ((m - (e as u64 % m)) % m) as u32;
        self.pow(c, (self.p as u64).pow(k))
    }

    /// Iterate over all field elements (small fields only; used by tests and parsers).
    pub fn elements(&self) -> Vec<FElem> {
        let mut out = Vec::new();
        let m = self.m as usize;
        let mut cur = vec![0u32; m];
        loop {
            out.push(FElem(cur.clone()));
            let mut i = 0;
            loop {
                if i == m {
                    return out;
                }
                cur[i] += 1;
                if cur[i] < self.p {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    fn modulus_irreducible(&self) -> bool {
        // trial division by all monic polynomials of degree 1..=m/2 over F_p
        let m = self.m as usize;
        let modulus: Vec<u32> = self.modulus.clone();
        for d in 1..=m / 2 {
            let mut div = vec![0u32; d + 1];
            div[d] = 1;
            'divisors: loop {
                if poly_mod_is_zero(&modulus, &div, self.p) {
                    return false;
                }
                // next monic divisor (increment lower coefficients with carry)
                let mut i = 0;
                loop {
                    if i == d {
                        break 'divisors;
                    }
                    div[i] += 1;
                    if div[i] < self.p {
                        break;
                    }
                    div[i] = 0;
                    i += 1;
                }
            }
        }
        true
    }
}

/// Remainder test for univariate polynomials over F_p (divisor monic).
fn poly_mod_is_zero(a: &[u32], b: &[u32], p: u32) -> bool {
    let mut r: Vec<u32> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let k = r.len() - 1 - db;
        if lead != 0 {
            for i in 0..=db {
                let v = (r[k + i] + lead * (p - b[i] % p)) % p;
                r[k + i] = v;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c % p == 0)
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(
                f,
                "[{}]",
                self.0
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_prime() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::prime(1).is_err());
    }

    #[test]
    fn rejects_reducible_modulus() {
        // t^2 + 1 = (t+1)^2 over F_2
        assert!(FieldSpec::new(2, 2, vec![1, 0, 1]).is_err());
        // t^2 + t + 1 is irreducible over F_2
        assert!(FieldSpec::new(2, 2, vec![1, 1, 1]).is_ok());
    }

    #[test]
    fn f4_arithmetic() {
        let f4 = FieldSpec::new(2, 2, vec![1, 1, 1]).unwrap();
        let t = f4.from_coeffs(&[0, 1]);
        let t2 = f4.mul(&t, &t);
        // t^2 = t + 1
        assert_eq!(t2, f4.from_coeffs(&[1, 1]));
        // multiplicative order of t is 3
        assert_eq!(f4.pow(&t, 3), f4.one());
    }

    #[test]
    fn pe_root_identity_cases() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(f2.pe_root(&f2.one(), 3), f2.one());
        let f5 = FieldSpec::prime(5).unwrap();
        for c in f5.elements() {
            let r = f5.pe_root(&c, 2);
            assert_eq!(f5.pow(&r, 25), c);
        }
    }

    #[test]
    fn pe_root_f4_brute_force() {
        // F_4 = F_2[t]/(t^2+t+1), c = t, e = 1 -> t^2 = t + 1
        let f4 = FieldSpec::new(2, 2, vec![1, 1, 1]).unwrap();
        let t = f4.from_coeffs(&[0, 1]);
        let root = f4.pe_root(&t, 1);
        assert_eq!(root, f4.from_coeffs(&[1, 1]));
        // brute force: the unique square root among the 4 elements
        let hits: Vec<_> = f4
            .elements()
            .into_iter()
            .filter(|x| f4.mul(x, x) == t)
            .collect();
        assert_eq!(hits, vec![root]);
    }
}
