//! Resultants in an eliminated variable, computed from the Sylvester matrix of
//! declared degrees via fraction-free (Bareiss) elimination. Entries live in
//! the coefficient ring, so every division in the elimination is exact.

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::Poly;
use std::sync::Arc;

/// A polynomial in an eliminated variable z with coefficients downstairs.
/// coeffs[i] multiplies z^i; the declared degree is coeffs.len() - 1 and the
/// top coefficient may be zero (degrees can drop in characteristic p).
#[derive(Clone, Debug)]
pub struct ZPoly {
    pub coeffs: Vec<Poly>,
}

impl ZPoly {
    pub fn declared_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }
}

/// Resultant of f and g with respect to z, using declared degrees.
pub fn resultant_z(field: &Arc<FieldSpec>, nvars: usize, f: &ZPoly, g: &ZPoly) -> Result<Poly> {
    let n = f.declared_degree();
    let d = g.declared_degree();
    if n == 0 && d == 0 {
        return Ok(Poly::one(field, nvars));
    }
    let size = n + d;
    let zero = Poly::zero(field, nvars);
    let mut m = vec![vec![zero.clone(); size]; size];
    // d rows of f coefficients, then n rows of g coefficients, highest first
    for r in 0..d {
        for i in 0..=n {
            m[r][r + i] = f.coeffs[n - i].clone();
        }
    }
    for r in 0..n {
        for i in 0..=d {
            m[d + r][r + i] = g.coeffs[d - i].clone();
        }
    }
    bareiss_det(field, nvars, m)
}

/// Fraction-free determinant over the polynomial ring.
fn bareiss_det(field: &Arc<FieldSpec>, nvars: usize, mut m: Vec<Vec<Poly>>) -> Result<Poly> {
    let size = m.len();
    if size == 0 {
        return Ok(Poly::one(field, nvars));
    }
    let mut sign_flip = false;
    let mut prev = Poly::one(field, nvars);
    for k in 0..size - 1 {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Ok(Poly::zero(field, nvars)),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = m[k][k]
                    .mul(&m[i][j])?
                    .sub(&m[i][k].mul(&m[k][j])?)?;
                m[i][j] = if num.is_zero() {
                    num
                } else {
                    num.div_exact(&prev).map_err(|_| {
                        Error::DivisionNotExact("Bareiss pivot division failed".into())
                    })?
                };
            }
            m[i][k] = Poly::zero(field, nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[size - 1][size - 1].clone();
    Ok(if sign_flip { det.neg() } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn zpoly_from(_field: &Arc<FieldSpec>, coeffs: Vec<Poly>) -> ZPoly {
        ZPoly { coeffs }
    }

    #[test]
    fn resultant_common_root_vanishes() {
        // f = z^2 - x^2 = (z-x)(z+x), g = z - x over F_5: resultant must be 0
        let f5 = FieldSpec::prime(5).unwrap();
        let x2 = Poly::from_terms(&f5, 1, &[(4, &[2])]); // -x^2
        let f = zpoly_from(
            &f5,
            vec![x2, Poly::zero(&f5, 1), Poly::one(&f5, 1)],
        );
        let g = zpoly_from(
            &f5,
            vec![
                Poly::from_terms(&f5, 1, &[(4, &[1])]), // -x
                Poly::one(&f5, 1),
            ],
        );
        let r = resultant_z(&f5, 1, &f, &g).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn resultant_linear_pair() {
        // f = z + x, g = z + y: Res = x - y (up to sign)
        let f5 = FieldSpec::prime(5).unwrap();
        let f = zpoly_from(
            &f5,
            vec![Poly::var(&f5, 2, 0), Poly::one(&f5, 2)],
        );
        let g = zpoly_from(
            &f5,
            vec![Poly::var(&f5, 2, 1), Poly::one(&f5, 2)],
        );
        let r = resultant_z(&f5, 2, &f, &g).unwrap();
        let diff = Poly::var(&f5, 2, 0).sub(&Poly::var(&f5, 2, 1)).unwrap();
        assert!(r == diff || r == diff.neg());
    }

    #[test]
    fn resultant_mixed_quadratic() {
        // f = z^2 + x z + y^3 over F_2, g = x (declared degree 1 derivative):
        // Res_z(f, x) with g = x z^0 ... use g = x + 0*z of declared degree 1.
        // Sylvester with declared degrees (2, 1): Res = norm-like x^2 term.
        let f2 = FieldSpec::prime(2).unwrap();
        let f = zpoly_from(
            &f2,
            vec![
                Poly::from_terms(&f2, 2, &[(1, &[0, 3])]), // y^3
                Poly::var(&f2, 2, 0),                      // x
                Poly::one(&f2, 2),
            ],
        );
        let g = zpoly_from(&f2, vec![Poly::var(&f2, 2, 0), Poly::zero(&f2, 2)]);
        let r = resultant_z(&f2, 2, &f, &g).unwrap();
        assert_eq!(r, Poly::from_terms(&f2, 2, &[(1, &[2, 0])]));
    }

    #[test]
    fn bareiss_matches_cofactor_3x3() {
        let f3 = FieldSpec::prime(3).unwrap();
        let e = |c: u32, exp: &[u32]| Poly::from_terms(&f3, 2, &[(c, exp)]);
        let m = vec![
            vec![e(1, &[1, 0]), e(2, &[0, 1]), e(1, &[0, 0])],
            vec![e(1, &[0, 0]), e(1, &[1, 1]), e(0, &[0, 0])],
            vec![e(2, &[0, 0]), e(1, &[0, 2]), e(1, &[1, 0])],
        ];
        let det = bareiss_det(&f3, 2, m.clone()).unwrap();
        // cofactor expansion along the first row
        let minor = |r: &[usize], c: &[usize]| {
            m[r[0]][c[0]]
                .mul(&m[r[1]][c[1]])
                .unwrap()
                .sub(&m[r[1]][c[0]].mul(&m[r[0]][c[1]]).unwrap())
                .unwrap()
        };
        let expect = m[0][0]
            .mul(&minor(&[1, 2], &[1, 2]))
            .unwrap()
            .sub(&m[0][1].mul(&minor(&[1, 2], &[0, 2])).unwrap())
            .unwrap()
            .add(&m[0][2].mul(&minor(&[1, 2], &[0, 1])).unwrap())
            .unwrap();
        assert_eq!(det, expect);
    }
}
