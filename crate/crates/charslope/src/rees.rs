//! Weighted-generator (Rees) algebras with differential saturation, and the
//! combinatorial layer for monomial algebras supported on the divisor ledger:
//! orders, membership up to integral closure, transforms, and resolution.

use crate::error::{Error, Result};
use crate::geometry::{CoordPoint, DivisorLedger};
use crate::order::{ExtOrder, Rat};
use crate::poly::Poly;

/// The algebra generated by { g W^n } for a finite list of weighted elements.
#[derive(Clone, Debug)]
pub struct WeightedAlgebra {
    pub gens: Vec<(Poly, u64)>,
}

impl WeightedAlgebra {
    pub fn empty() -> WeightedAlgebra {
        WeightedAlgebra { gens: Vec::new() }
    }

    pub fn new(gens: Vec<(Poly, u64)>) -> WeightedAlgebra {
        let gens = gens
            .into_iter()
            .filter(|(g, n)| !g.is_zero() && *n > 0)
            .collect();
        WeightedAlgebra { gens }
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Order of the algebra at a coordinate point: min over generators of
    /// ord(g)/n. Valid because order is a valuation, so power products never
    /// beat single generators.
    pub fn order_at(&self, pt: &CoordPoint) -> ExtOrder {
        self.gens
            .iter()
            .map(|(g, n)| match g.order_at(&pt.vars) {
                ExtOrder::Finite(o) => ExtOrder::Finite(o / Rat::from_integer(*n as i64)),
                ExtOrder::Infinite => ExtOrder::Infinite,
            })
            .min()
            .unwrap_or(ExtOrder::Infinite)
    }

    /// Closure under Hasse derivatives: for each generator g W^n add every
    /// nonzero Delta^[alpha] g at weight n - |alpha| (1 <= |alpha| < n).
    /// One pass over the original generators suffices: a derivative of a
    /// derivative is a binomial multiple of a direct derivative of the same
    /// total order.
    pub fn hasse_saturate(&self) -> WeightedAlgebra {
        let mut out: Vec<(Poly, u64)> = Vec::new();
        for (g, n) in &self.gens {
            out.push((g.clone(), *n));
            for alpha in multi_indices(g.nvars, 1, *n - 1) {
                let d = g.hasse_derivative(&alpha);
                if !d.is_zero() {
                    let w = *n - alpha.iter().map(|&a| a as u64).sum::<u64>();
                    out.push((d, w));
                }
            }
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.terms.keys().next_back().cmp(&b.0.terms.keys().next_back())));
        out.dedup_by(|a, b| a.1 == b.1 && a.0 == b.0);
        WeightedAlgebra { gens: out }
    }
}

/// All multi-indices of length nvars with lo <= |alpha| <= hi.
pub fn multi_indices(nvars: usize, lo: u64, hi: u64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, remaining: u64, lo: u64, used: u64) {
        if i == cur.len() {
            if used >= lo {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=remaining {
            cur[i] = v as u32;
            rec(out, cur, i + 1, remaining - v, lo, used + v);
        }
        cur[i] = 0;
    }
    if hi > 0 || lo == 0 {
        rec(&mut out, &mut cur, 0, hi, lo, 0);
    }
    out
}

/// Order of the monomial algebra M W^s at a coordinate point:
/// (sum of h over visible divisors carried by a variable of the point)/s.
pub fn monomial_order_at(m: &DivisorLedger, pt: &CoordPoint) -> Rat {
    let num: u64 = m
        .visible()
        .filter(|(_, v)| pt.contains_var(*v))
        .map(|(e, _)| e.h)
        .sum();
    Rat::new(num as i64, m.s as i64)
}

/// Membership g W^n in M W^s up to integral closure: for every visible
/// divisor carried by v, s * ord_v(g) >= n * h_v.
pub fn monomial_member(g: &Poly, n: u64, m: &DivisorLedger) -> Result<bool> {
    if g.is_zero() {
        return Err(Error::ZeroInput);
    }
    for (e, v) in m.visible() {
        match g.order_at(&[v]) {
            ExtOrder::Infinite => {}
            ExtOrder::Finite(o) => {
                let lhs = Rat::from_integer(m.s as i64) * o;
                let rhs = Rat::from_integer((n * e.h) as i64);
                if lhs < rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The monomial ideal M^[t]: exponent floor(h_i * t / s) per divisor.
pub fn monomial_truncation(m: &DivisorLedger, t: u64) -> DivisorLedger {
    let mut out = m.clone();
    out.s = t;
    for e in &mut out.entries {
        e.h = e.h * t / m.s;
    }
    out
}

/// Transform of M W^s under the blow-up at the intersection of the divisors
/// carried by center_vars. A codimension-one center (single divisor) is an
/// isomorphism downstairs: h drops by s in place. Otherwise the chart U_{x_i}
/// gains the exceptional divisor with exponent sum(h) - s.
pub fn transform_monomial(
    m: &DivisorLedger,
    center_vars: &[usize],
    chart_var: usize,
) -> Result<DivisorLedger> {
    let carried: Vec<u64> = center_vars
        .iter()
        .map(|&v| {
            m.visible()
                .find(|(_, c)| *c == v)
                .map(|(e, _)| e.h)
                .ok_or_else(|| {
                    Error::Impermissible(format!("center variable {} carries no divisor", v))
                })
        })
        .collect::<Result<_>>()?;
    let sigma: u64 = carried.iter().sum();
    if sigma < m.s {
        return Err(Error::Impermissible(format!(
            "center order {}/{} < 1",
            sigma, m.s
        )));
    }
    if center_vars.len() == 1 {
        let mut out = m.clone();
        for e in &mut out.entries {
            if e.carrier == Some(center_vars[0]) {
                e.h -= m.s;
            }
        }
        return Ok(out);
    }
    if !center_vars.contains(&chart_var) {
        return Err(Error::Precondition("chart variable not in center".into()));
    }
    Ok(m.blowup_update(center_vars, chart_var, sigma - m.s))
}

/// One step of a monomial resolution in one chart.
#[derive(Clone, Debug)]
pub struct MonomialStep {
    pub chart_path: Vec<usize>,
    pub center_vars: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MonomialResolution {
    pub steps: Vec<MonomialStep>,
    pub leaves: Vec<(Vec<usize>, DivisorLedger)>,
}

/// Max order over all coordinate points spanned by visible carriers, with the
/// number of points achieving it — the per-step decreasing invariant.
fn lex_invariant(m: &DivisorLedger) -> (Rat, usize) {
    let carriers: Vec<usize> = m.visible().map(|(_, v)| v).collect();
    let mut best = Rat::from_integer(0);
    let mut count = 0usize;
    for mask in 1u32..(1 << carriers.len()) {
        let pt = CoordPoint::new(
            carriers
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect(),
        );
        let o = monomial_order_at(m, &pt);
        if o > best {
            best = o;
            count = 1;
        } else if o == best && best > Rat::from_integer(0) {
            count += 1;
        }
    }
    (best, count)
}

/// Resolve M W^s combinatorially: first reduce every single divisor with
/// h >= s by repeated codimension-one steps; then, while some coordinate point
/// has order >= 1, blow up the smallest-cardinality, lexicographically least
/// intersection of visible divisors with sum(h) >= s, recursing into every
/// chart. Each step strictly decreases (max point order, #points achieving it).
pub fn resolve_monomial(m: &DivisorLedger) -> Result<MonomialResolution> {
    let mut res = MonomialResolution {
        steps: Vec::new(),
        leaves: Vec::new(),
    };
    let mut work = m.clone();
    let one = Rat::from_integer(1);

    // phase 1: per-divisor codimension-one reductions, in id order
    let ids: Vec<u64> = work.entries.iter().map(|e| e.id).collect();
    for id in ids {
        loop {
            let Some(v) = work.carrier_of(id) else { break };
            let h = work.entries.iter().find(|e| e.id == id).unwrap().h;
            if h < work.s {
                break;
            }
            let before = lex_invariant(&work);
            work = transform_monomial(&work, &[v], v)?;
            let after = lex_invariant(&work);
            if after >= before {
                return Err(Error::TheoremViolation(
                    "monomial invariant failed to decrease on codim-1 step".into(),
                ));
            }
            res.steps.push(MonomialStep {
                chart_path: Vec::new(),
                center_vars: vec![v],
            });
        }
    }

    // phase 2: recursive intersection blow-ups per chart branch
    fn phase2(
        m: DivisorLedger,
        path: Vec<usize>,
        one: Rat,
        res: &mut MonomialResolution,
    ) -> Result<()> {
        let before = lex_invariant(&m);
        if before.0 < one {
            res.leaves.push((path, m));
            return Ok(());
        }
        let carriers: Vec<(u64, usize)> = m.visible().map(|(e, v)| (e.h, v)).collect();
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..(1 << carriers.len()) {
            let sel: Vec<(u64, usize)> = carriers
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x)
                .collect();
            if sel.iter().map(|(h, _)| h).sum::<u64>() < m.s {
                continue;
            }
            let mut vars: Vec<usize> = sel.iter().map(|(_, v)| *v).collect();
            vars.sort_unstable();
            let better = match &best {
                None => true,
                Some(b) => (vars.len(), &vars) < (b.len(), b),
            };
            if better {
                best = Some(vars);
            }
        }
        let center = best.ok_or_else(|| {
            Error::TheoremViolation("point of order >= 1 but no center found".into())
        })?;
        res.steps.push(MonomialStep {
            chart_path: path.clone(),
            center_vars: center.clone(),
        });
        if center.len() == 1 {
            let child = transform_monomial(&m, &center, center[0])?;
            if lex_invariant(&child) >= before {
                return Err(Error::TheoremViolation(
                    "monomial invariant failed to decrease".into(),
                ));
            }
            return phase2(child, path, one, res);
        }
        for &cv in &center {
            let child = transform_monomial(&m, &center, cv)?;
            if lex_invariant(&child) >= before {
                return Err(Error::TheoremViolation(
                    "monomial invariant failed to decrease".into(),
                ));
            }
            let mut cpath = path.clone();
            cpath.push(cv);
            phase2(child, cpath, one, res)?;
        }
        Ok(())
    }

    phase2(work, Vec::new(), one, &mut res)?;
    Ok(res)
}
