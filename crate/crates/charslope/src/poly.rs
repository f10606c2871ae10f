//! Sparse multivariate polynomials over F_{p^m} in canonical graded-lex form.

use crate::error::{Error, Result};
use crate::field::{FElem, FieldSpec};
use crate::order::ExtOrder;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exponent vector with graded-lexicographic ordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn checked_add(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.checked_add(b).expect("exponent overflow"))
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial in canonical form: no zero coefficients, unique
/// exponent vectors, deterministic term order.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    pub field: Arc<FieldSpec>,
    pub nvars: usize,
    pub terms: BTreeMap<Mono, FElem>,
}

impl Poly {
    pub fn zero(field: &Arc<FieldSpec>, nvars: usize) -> Poly {
        Poly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Arc<FieldSpec>, nvars: usize, c: FElem) -> Poly {
        let mut p = Poly::zero(field, nvars);
        if !field.is_zero(&c) {
            p.terms.insert(Mono(vec![0; nvars]), c);
        }
        p
    }

    pub fn one(field: &Arc<FieldSpec>, nvars: usize) -> Poly {
        Poly::constant(field, nvars, field.one())
    }

    /// Single variable x_i.
    pub fn var(field: &Arc<FieldSpec>, nvars: usize, i: usize) -> Poly {
        let mut exp = vec![0; nvars];
        exp[i] = 1;
        Poly::term(field, nvars, field.one(), exp)
    }

    pub fn term(field: &Arc<FieldSpec>, nvars: usize, c: FElem, exp: Vec<u32>) -> Poly {
        assert_eq!(exp.len(), nvars);
        let mut p = Poly::zero(field, nvars);
        if !field.is_zero(&c) {
            p.terms.insert(Mono(exp), c);
        }
        p
    }

    /// Build from (coefficient as integer mod p, exponent vector) pairs.
    pub fn from_terms(field: &Arc<FieldSpec>, nvars: usize, terms: &[(u32, &[u32])]) -> Poly {
        let mut p = Poly::zero(field, nvars);
        for (c, exp) in terms {
            let t = Poly::term(field, nvars, field.from_u32(*c), exp.to_vec());
            p = p.add(&t).unwrap();
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compat(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    fn insert_term(&mut self, m: Mono, c: FElem) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = self.field.add(e.get(), &c);
                if self.field.is_zero(&s) {
                    e.remove();
                } else {
                    e.insert(s);
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.field.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_compat(other)?;
        let mut out = Poly::zero(&self.field, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.checked_add(mb), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn mul_scalar(&self, c: &FElem) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, a) in &self.terms {
            out.insert_term(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn pow(&self, n: u64) -> Poly {
        let mut acc = Poly::one(&self.field, self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).unwrap();
            }
        }
        acc
    }

    /// Order of the polynomial along the coordinate subspace V(x_i : i in vars):
    /// the minimum over terms of the total exponent in the listed variables.
    pub fn order_at(&self, vars: &[usize]) -> ExtOrder {
        match self
            .terms
            .keys()
            .map(|m| vars.iter().map(|&i| m.0[i] as i64).sum::<i64>())
            .min()
        {
            Some(n) => ExtOrder::int(n),
            None => ExtOrder::Infinite,
        }
    }

    /// Sum of the terms achieving the minimal order along the subspace.
    pub fn initial_form(&self, vars: &[usize]) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let ord = |m: &Mono| vars.iter().map(|&i| m.0[i] as i64).sum::<i64>();
        let min = self.terms.keys().map(ord).min().unwrap();
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            if ord(m) == min {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Hasse derivative: the coefficient of T^alpha in g(x + T).
    pub fn hasse_derivative(&self, alpha: &[u32]) -> Poly {
        assert_eq!(alpha.len(), self.nvars);
        let p = self.field.p;
        let mut out = Poly::zero(&self.field, self.nvars);
        'terms: for (m, c) in &self.terms {
            let mut coef = 1u32;
            let mut exp = Vec::with_capacity(self.nvars);
            for i in 0..self.nvars {
                if m.0[i] < alpha[i] {
                    continue 'terms;
                }
                let b = binomial_mod_p(m.0[i] as u64, alpha[i] as u64, p);
                if b == 0 {
                    continue 'terms;
                }
                coef = (coef * b) % p;
                exp.push(m.0[i] - alpha[i]);
            }
            out.insert_term(Mono(exp), self.field.scalar(c, coef));
        }
        out
    }

    /// Exact p^e-th root, when every exponent is divisible by p^e.
    pub fn pe_power_root(&self, e: u32) -> Result<Option<Poly>> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let q = (self.field.p as u64).pow(e);
        if q > u32::MAX as u64 {
            return Ok(None);
        }
        let q32 = q as u32;
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            if m.0.iter().any(|&x| x % q32 != 0) {
                return Ok(None);
            }
            let exp = m.0.iter().map(|&x| x / q32).collect();
            out.terms.insert(Mono(exp), self.field.pe_root(c, e));
        }
        Ok(Some(out))
    }

    /// Substitute each variable x_i by images[i] (all in the same ring).
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: images.len(),
            });
        }
        // memoized powers per variable
        let mut pow_cache: Vec<Vec<Poly>> = images
            .iter()
            .map(|g| vec![Poly::one(&self.field, self.nvars), g.clone()])
            .collect();
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&self.field, self.nvars, c.clone());
            for i in 0..self.nvars {
                let e = m.0[i] as usize;
                if e == 0 {
                    continue;
                }
                while pow_cache[i].len() <= e {
                    let next = pow_cache[i]
                        .last()
                        .unwrap()
                        .mul(&pow_cache[i][1])
                        .unwrap();
                    pow_cache[i].push(next);
                }
                t = t.mul(&pow_cache[i][e])?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Divide by x_i^k, failing unless the division is exact.
    pub fn div_var_power(&self, i: usize, k: u32) -> Result<Poly> {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] < k {
                return Err(Error::DivisionNotExact(format!(
                    "term with x_{} exponent {} < {}",
                    i, m.0[i], k
                )));
            }
            let mut exp = m.0.clone();
            exp[i] -= k;
            out.terms.insert(Mono(exp), c.clone());
        }
        Ok(out)
    }

    /// Exact multivariate division (self = q * divisor); errors if not exact.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        self.check_compat(divisor)?;
        if divisor.is_zero() {
            return Err(Error::ZeroInput);
        }
        let (lm, lc) = divisor.terms.iter().next_back().unwrap();
        let lc_inv = self.field.inv(lc)?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.field, self.nvars);
        while !rem.is_zero() {
            let (rm, rc) = rem.terms.iter().next_back().unwrap();
            if rm.0.iter().zip(&lm.0).any(|(&a, &b)| a < b) {
                return Err(Error::DivisionNotExact("leading term not divisible".into()));
            }
            let qexp: Vec<u32> = rm.0.iter().zip(&lm.0).map(|(&a, &b)| a - b).collect();
            let qc = self.field.mul(rc, &lc_inv);
            let qt = Poly::term(&self.field, self.nvars, qc, qexp);
            quot = quot.add(&qt)?;
            rem = rem.sub(&qt.mul(divisor)?)?;
        }
        Ok(quot)
    }

    /// Evaluate at the origin: the constant term.
    pub fn constant_term(&self) -> FElem {
        self.terms
            .get(&Mono(vec![0; self.nvars]))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Set the listed variables to zero (restriction to the coordinate subspace).
    pub fn set_vars_zero(&self, vars: &[usize]) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            if vars.iter().all(|&i| m.0[i] == 0) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Render with the given variable names, highest term first.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            let one = self.field.one();
            if *c != one || m.degree() == 0 {
                factors.push(format!("{}", c));
            }
            for i in 0..self.nvars {
                match m.0[i] {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    e => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i)).collect();
        write!(f, "{}", self.display(&names))
    }
}

/// Binomial coefficient C(n, k) mod p via Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        acc = (acc * binomial_small(nd, kd)) % p64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

fn binomial_small(n: u64, k: u64) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
