//! p-presentations: a monic polynomial f = z^{p^e} + a_1 z^{p^e-1} + ... +
//! a_{p^e} with coefficients downstairs, together with its elimination
//! algebra. Houses the slope, the adaptation case analysis, cleaning to
//! well-adapted form, v-ord, and singular-locus scans.

use crate::error::{Error, Result};
use crate::field::{FElem, FieldSpec};
use crate::geometry::{enumerate_coord_points, CoordPoint};
use crate::order::{ExtOrder, Rat};
use crate::poly::{binomial_mod_p, Poly};
use crate::rees::{multi_indices, WeightedAlgebra};
use crate::resultant::{resultant_z, ZPoly};
use serde::Serialize;
use std::sync::Arc;

/// Where the slope sits relative to the section: A when the elimination
/// algebra achieves it, B* when the a_{p^e} term does, Z0* when it is zero.
/// Only B3 and Z0_power can be improved by changing the section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdaptationCase {
    A,
    B1,
    B2,
    B3,
    Z0Ord0,
    Z0NotPower,
    Z0Power,
}

impl AdaptationCase {
    pub fn cleanable(self) -> bool {
        matches!(self, AdaptationCase::B3 | AdaptationCase::Z0Power)
    }
}

/// One pass of the cleaning loop: the section shift applied and the slopes
/// around it.
#[derive(Clone, Debug)]
pub struct CleanPass {
    pub case: AdaptationCase,
    pub alpha: Poly,
    pub slope_before: ExtOrder,
    pub slope_after: ExtOrder,
}

/// A p-presentation. Immutable; section changes and transforms build new
/// values. The elimination algebra is computed once from the defining
/// coefficients and then carried through section changes (it depends only on
/// the projection, not on the section) and transformed through blow-ups.
#[derive(Clone, Debug)]
pub struct PPresentation {
    pub field: Arc<FieldSpec>,
    pub e: u32,
    pub nvars: usize,
    /// a_1 ... a_{p^e}
    pub coeffs: Vec<Poly>,
    pub elim: WeightedAlgebra,
}

impl PPresentation {
    pub fn new(field: &Arc<FieldSpec>, e: u32, nvars: usize, coeffs: Vec<Poly>) -> Result<PPresentation> {
        let pe = (field.p as u64).pow(e);
        if coeffs.len() as u64 != pe {
            return Err(Error::ArityMismatch {
                expected: pe as usize,
                got: coeffs.len(),
            });
        }
        for a in &coeffs {
            if a.nvars != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: a.nvars,
                });
            }
        }
        if coeffs.iter().all(|a| a.is_zero()) {
            return Err(Error::Degenerate(
                "f = z^{p^e} is a p^e-th power; the singular locus has a codimension-one component".into(),
            ));
        }
        let elim = elimination_generators(field, nvars, &coeffs, e);
        Ok(PPresentation {
            field: field.clone(),
            e,
            nvars,
            coeffs,
            elim,
        })
    }

    /// For transformed presentations whose elimination algebra is carried.
    pub fn with_elim(
        field: &Arc<FieldSpec>,
        e: u32,
        nvars: usize,
        coeffs: Vec<Poly>,
        elim: WeightedAlgebra,
    ) -> Result<PPresentation> {
        if coeffs.iter().all(|a| a.is_zero()) && elim.is_empty() {
            return Err(Error::Degenerate("cleaned f is a p^e-th power".into()));
        }
        Ok(PPresentation {
            field: field.clone(),
            e,
            nvars,
            coeffs,
            elim,
        })
    }

    pub fn pe(&self) -> u64 {
        (self.field.p as u64).pow(self.e)
    }

    pub fn a_pe(&self) -> &Poly {
        self.coeffs.last().unwrap()
    }

    /// Slope at a coordinate point: min(ord(a_{p^e})/p^e, ord of the
    /// elimination algebra).
    pub fn slope_at(&self, pt: &CoordPoint) -> ExtOrder {
        self.a_term_order(pt).min(self.elim.order_at(pt))
    }

    pub fn a_term_order(&self, pt: &CoordPoint) -> ExtOrder {
        match self.a_pe().order_at(&pt.vars) {
            ExtOrder::Finite(o) => ExtOrder::Finite(o / Rat::from_integer(self.pe() as i64)),
            ExtOrder::Infinite => ExtOrder::Infinite,
        }
    }

    /// min over all coefficients of ord(a_j)/j — the permissibility test
    /// (every a_j must vanish to order >= j along the center for the
    /// transform's exact divisions).
    pub fn full_min_at(&self, pt: &CoordPoint) -> ExtOrder {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| match a.order_at(&pt.vars) {
                ExtOrder::Finite(o) => {
                    ExtOrder::Finite(o / Rat::from_integer((i + 1) as i64))
                }
                ExtOrder::Infinite => ExtOrder::Infinite,
            })
            .min()
            .unwrap()
    }

    pub fn adaptation_case(&self, pt: &CoordPoint) -> Result<AdaptationCase> {
        let a_ord = self.a_term_order(pt);
        let r_ord = self.elim.order_at(pt);
        let slope = a_ord.min(r_ord);
        let zero = ExtOrder::int(0);
        if slope == zero {
            if r_ord == zero {
                return Ok(AdaptationCase::Z0Ord0);
            }
            // a-term order 0 strictly below the elimination order
            let inf = self.a_pe().initial_form(&pt.vars)?;
            return Ok(match inf.pe_power_root(self.e)? {
                Some(_) => AdaptationCase::Z0Power,
                None => AdaptationCase::Z0NotPower,
            });
        }
        if r_ord <= a_ord {
            return Ok(AdaptationCase::A);
        }
        // slope achieved by the a-term alone
        if !a_ord.is_positive_integer() {
            return Ok(AdaptationCase::B1);
        }
        let inf = self.a_pe().initial_form(&pt.vars)?;
        Ok(match inf.pe_power_root(self.e)? {
            Some(_) => AdaptationCase::B3,
            None => AdaptationCase::B2,
        })
    }

    /// Coefficients of f(z + alpha): the section change z -> z - alpha.
    pub fn shift_z(&self, alpha: &Poly) -> Result<PPresentation> {
        if alpha.nvars != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: alpha.nvars,
            });
        }
        let pe = self.pe() as usize;
        let mut alpha_pow = vec![Poly::one(&self.field, self.nvars)];
        for _ in 0..pe {
            alpha_pow.push(alpha_pow.last().unwrap().mul(alpha)?);
        }
        let a = |i: usize| -> Poly {
            if i == 0 {
                Poly::one(&self.field, self.nvars)
            } else {
                self.coeffs[i - 1].clone()
            }
        };
        let mut new_coeffs = Vec::with_capacity(pe);
        for n in 1..=pe {
            // coefficient of z^{p^e - n}: sum_i a_i C(p^e-i, p^e-n) alpha^{n-i}
            let k = pe - n;
            let mut acc = Poly::zero(&self.field, self.nvars);
            for i in 0..=n {
                let m = pe - i;
                let b = binomial_mod_p(m as u64, k as u64, self.field.p);
                if b == 0 {
                    continue;
                }
                acc = acc.add(&a(i).mul(&alpha_pow[n - i])?.mul_scalar(&self.field.from_u32(b)))?;
            }
            new_coeffs.push(acc);
        }
        PPresentation::with_elim(&self.field, self.e, self.nvars, new_coeffs, self.elim.clone())
    }

    /// Replace the section z by u z + alpha (u a nonzero field constant):
    /// coefficients of u^{p^e} f((z - alpha)/u).
    pub fn change_section(&self, u: &FElem, alpha: &Poly) -> Result<PPresentation> {
        if self.field.is_zero(u) {
            return Err(Error::ZeroInput);
        }
        let mut upow = self.field.one();
        let mut scaled = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            upow = self.field.mul(&upow, u);
            scaled.push(a.mul_scalar(&upow));
        }
        let scaled_pres =
            PPresentation::with_elim(&self.field, self.e, self.nvars, scaled, self.elim.clone())?;
        scaled_pres.shift_z(&alpha.neg())
    }

    /// Clean at a point: while the case is B3 or Z0_power, shift the section
    /// by alpha = -(p^e-th root of the initial form of a_{p^e}). The slope
    /// strictly increases on the finite denominator grid, so this terminates.
    pub fn clean_at(&self, pt: &CoordPoint) -> Result<(PPresentation, Vec<CleanPass>)> {
        let mut cur = self.clone();
        let mut log = Vec::new();
        loop {
            if log.len() > 256 {
                return Err(Error::TheoremViolation(
                    "cleaning failed to terminate within the slope grid bound".into(),
                ));
            }
            let case = cur.adaptation_case(pt)?;
            if !case.cleanable() {
                return Ok((cur, log));
            }
            let slope_before = cur.slope_at(pt);
            let inf = cur.a_pe().initial_form(&pt.vars)?;
            let root = inf
                .pe_power_root(cur.e)?
                .expect("cleanable case implies a p^e-th root");
            let alpha = root.neg();
            let next = cur.shift_z(&alpha)?;
            if next.coeffs.iter().all(|a| a.is_zero()) {
                return Err(Error::Degenerate(
                    "cleaning drove f to a p^e-th power (codimension-one singular locus)".into(),
                ));
            }
            if next.a_pe().is_zero() && next.elim.is_empty() {
                return Err(Error::Degenerate(
                    "cleaned a_{p^e} is zero with empty elimination algebra".into(),
                ));
            }
            let slope_after = next.slope_at(pt);
            if slope_after <= slope_before {
                return Err(Error::TheoremViolation(format!(
                    "cleaning pass failed to raise the slope: {} -> {}",
                    slope_before, slope_after
                )));
            }
            log.push(CleanPass {
                case,
                alpha,
                slope_before,
                slope_after,
            });
            cur = next;
        }
    }

    /// Simultaneous adaptation at two nested points (x in the closure of y):
    /// clean at the more generic y first — its shift is supported in the
    /// y-variables, so it cannot spoil x — then finish with an x-pass and
    /// assert y-adaptation survived.
    pub fn clean_simultaneous(
        &self,
        x_pt: &CoordPoint,
        y_pt: &CoordPoint,
    ) -> Result<PPresentation> {
        if !x_pt.specializes(y_pt) {
            return Err(Error::Precondition(
                "simultaneous cleaning requires nested points".into(),
            ));
        }
        let (after_y, _) = self.clean_at(y_pt)?;
        let (after_x, _) = after_y.clean_at(x_pt)?;
        if after_x.adaptation_case(y_pt)?.cleanable() {
            return Err(Error::TheoremViolation(
                "x-pass of simultaneous cleaning broke adaptation at y".into(),
            ));
        }
        Ok(after_x)
    }

    /// A point is singular iff the slope of the cleaned presentation is >= 1.
    pub fn is_singular_at(&self, pt: &CoordPoint) -> Result<bool> {
        let (cleaned, _) = self.clean_at(pt)?;
        Ok(cleaned.slope_at(pt) >= ExtOrder::int(1))
    }

    /// The projection-independent order: slope of a well-adapted presentation
    /// at a singular point.
    pub fn v_ord(&self, pt: &CoordPoint) -> Result<Rat> {
        let (cleaned, _) = self.clean_at(pt)?;
        let slope = cleaned.slope_at(pt);
        if slope < ExtOrder::int(1) {
            return Err(Error::Precondition(format!(
                "v-ord is only defined on the singular locus (slope {})",
                slope
            )));
        }
        match slope {
            ExtOrder::Finite(r) => Ok(r),
            ExtOrder::Infinite => Err(Error::Degenerate(
                "infinite slope: f is a p^e-th power".into(),
            )),
        }
    }

    /// The subset-minimal singular coordinate points (largest singular
    /// subvarieties) and whether the chart origin is singular.
    pub fn sing_locus(&self) -> Result<(Vec<CoordPoint>, bool)> {
        let mut singular = Vec::new();
        for pt in enumerate_coord_points(self.nvars) {
            if self.is_singular_at(&pt)? {
                singular.push(pt);
            }
        }
        let origin_singular = singular.iter().any(|p| p.is_origin(self.nvars));
        let minimal: Vec<CoordPoint> = singular
            .iter()
            .filter(|p| {
                !singular
                    .iter()
                    .any(|q| q.vars.len() < p.vars.len() && p.specializes(q))
            })
            .cloned()
            .collect();
        Ok((minimal, origin_singular))
    }

    /// tau = 1 surrogate: the initial form of f at pt is the pure power
    /// Z^{p^e}, i.e. every coefficient vanishes to order > its index.
    pub fn in_f_is_pure(&self, pt: &CoordPoint) -> Result<bool> {
        if self.adaptation_case(pt)?.cleanable() {
            return Err(Error::Precondition(
                "purity test requires a well-adapted presentation".into(),
            ));
        }
        Ok(self.coeffs.iter().enumerate().all(|(i, a)| {
            a.order_at(&pt.vars) > ExtOrder::int((i + 1) as i64)
        }))
    }
}

/// Hasse derivative of f with respect to z, of order j, as a polynomial in z
/// of declared degree p^e - j with coefficients downstairs.
pub fn hasse_z(field: &Arc<FieldSpec>, nvars: usize, coeffs: &[Poly], e: u32, j: u64) -> ZPoly {
    let pe = (field.p as u64).pow(e);
    let a = |i: u64| -> Poly {
        if i == 0 {
            Poly::one(field, nvars)
        } else {
            coeffs[(i - 1) as usize].clone()
        }
    };
    let mut out = Vec::new();
    for k in 0..=(pe - j) {
        let i = pe - k - j;
        let b = binomial_mod_p(k + j, j, field.p);
        out.push(if b == 0 {
            Poly::zero(field, nvars)
        } else {
            a(i).mul_scalar(&field.from_u32(b))
        });
    }
    ZPoly { coeffs: out }
}

/// The computable elimination algebra: resultants of f against its nonzero
/// relative Hasse derivatives at weight (p^e - j) * p^e, with the purely
/// inseparable fallback { Delta^[alpha] a_{p^e} at weight p^e - |alpha| }
/// when every derivative vanishes, then Hasse saturation. a_{p^e} W^{p^e}
/// itself is never a generator.
pub fn elimination_generators(
    field: &Arc<FieldSpec>,
    nvars: usize,
    coeffs: &[Poly],
    e: u32,
) -> WeightedAlgebra {
    let pe = (field.p as u64).pow(e);
    let f = {
        let mut c = Vec::with_capacity(pe as usize + 1);
        for k in 0..pe {
            c.push(coeffs[(pe - 1 - k) as usize].clone());
        }
        c.push(Poly::one(field, nvars));
        ZPoly { coeffs: c }
    };
    let mut gens = Vec::new();
    for j in 1..pe {
        let d = hasse_z(field, nvars, coeffs, e, j);
        if d.coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let r = resultant_z(field, nvars, &f, &d).expect("exact Bareiss elimination");
        if !r.is_zero() {
            gens.push((r, (pe - j) * pe));
        }
    }
    if gens.is_empty() {
        // purely inseparable: f = z^{p^e} + a_{p^e}
        let a = coeffs.last().unwrap();
        if !a.is_zero() {
            for alpha in multi_indices(nvars, 1, pe - 1) {
                let d = a.hasse_derivative(&alpha);
                if !d.is_zero() {
                    let w = pe - alpha.iter().map(|&x| x as u64).sum::<u64>();
                    gens.push((d, w));
                }
            }
        }
    }
    WeightedAlgebra::new(gens).hasse_saturate()
}
