//! Affine coordinate charts, coordinate points, divisor ledgers, and blow-up
//! substitutions. All centers, divisors, and evaluation points are coordinate
//! subspaces of the current chart; closed points are chart origins reachable
//! by translation.

use crate::error::{Error, Result};
use crate::field::{FElem, FieldSpec};
use crate::poly::Poly;
use serde::Serialize;
use std::sync::Arc;

/// A coordinate point: the generic point of V(x_i : i in vars). The full
/// variable set denotes the chart origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CoordPoint {
    pub vars: Vec<usize>,
}

impl CoordPoint {
    pub fn new(mut vars: Vec<usize>) -> CoordPoint {
        vars.sort_unstable();
        vars.dedup();
        CoordPoint { vars }
    }

    pub fn origin(nvars: usize) -> CoordPoint {
        CoordPoint {
            vars: (0..nvars).collect(),
        }
    }

    pub fn is_origin(&self, nvars: usize) -> bool {
        self.vars.len() == nvars
    }

    pub fn contains_var(&self, i: usize) -> bool {
        self.vars.binary_search(&i).is_ok()
    }

    /// x lies in the closure of y iff y's defining variables are a subset of x's.
    pub fn specializes(&self, other: &CoordPoint) -> bool {
        other.vars.iter().all(|v| self.contains_var(*v))
    }

    pub fn label(&self, names: &[String]) -> String {
        let parts: Vec<&str> = self.vars.iter().map(|&i| names[i].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// A permissible-center candidate: the ideal <z, x_i : i in vars> upstairs
/// (when include_z) or <x_i : i in vars> downstairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Center {
    pub include_z: bool,
    pub vars: Vec<usize>,
}

impl Center {
    pub fn new(include_z: bool, mut vars: Vec<usize>) -> Center {
        vars.sort_unstable();
        vars.dedup();
        Center { include_z, vars }
    }

    pub fn point(&self) -> CoordPoint {
        CoordPoint::new(self.vars.clone())
    }
}

/// One divisor tracked through the chart tree. `carrier` is the downstairs
/// variable cutting it out in this chart, absent when the divisor does not
/// meet the chart. `h` is the numerator of its exponent over the ledger's s.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorEntry {
    pub id: u64,
    pub carrier: Option<usize>,
    pub h: u64,
}

/// Normal-crossing divisor bookkeeping: exponents h_i over a common
/// denominator s, with per-chart carrier variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorLedger {
    pub s: u64,
    pub entries: Vec<DivisorEntry>,
}

impl DivisorLedger {
    pub fn empty(s: u64) -> DivisorLedger {
        assert!(s > 0);
        DivisorLedger {
            s,
            entries: Vec::new(),
        }
    }

    pub fn visible(&self) -> impl Iterator<Item = (&DivisorEntry, usize)> {
        self.entries.iter().filter_map(|e| e.carrier.map(|v| (e, v)))
    }

    pub fn carrier_of(&self, id: u64) -> Option<usize> {
        self.entries.iter().find(|e| e.id == id).and_then(|e| e.carrier)
    }

    pub fn next_id(&self) -> u64 {
        self.entries.iter().map(|e| e.id + 1).max().unwrap_or(0)
    }

    /// Carrier/visibility update for the blow-up at <x_vars> in chart U_{x_i},
    /// appending the new exceptional divisor with exponent numerator new_h.
    /// Strict transforms of divisors carried by v in the center keep carrier v;
    /// a divisor previously carried by x_i itself leaves the chart.
    pub fn blowup_update(&self, center_vars: &[usize], chart_var: usize, new_h: u64) -> DivisorLedger {
        let mut out = self.clone();
        for e in &mut out.entries {
            if e.carrier == Some(chart_var) {
                e.carrier = None;
            }
        }
        let _ = center_vars; // divisors carried by other center vars keep their carrier
        out.entries.push(DivisorEntry {
            id: self.next_id(),
            carrier: Some(chart_var),
            h: new_h,
        });
        out
    }

    /// Visibility update for a translation: a divisor x_i = 0 misses the new
    /// origin unless c_i = 0.
    pub fn translate_update(&self, field: &Arc<FieldSpec>, c: &[FElem]) -> DivisorLedger {
        let mut out = self.clone();
        for e in &mut out.entries {
            if let Some(v) = e.carrier {
                if !field.is_zero(&c[v]) {
                    e.carrier = None;
                }
            }
        }
        out
    }
}

/// A record of one blow-up applied to reach this chart.
#[derive(Clone, Debug, Serialize)]
pub struct BlowupRecord {
    pub center: Center,
    pub chart_var: usize,
}

/// An affine chart: named downstairs variables, the transversal section's
/// name, and the blow-up history that produced it.
#[derive(Clone, Debug)]
pub struct Chart {
    pub id: u64,
    pub vars: Vec<String>,
    pub z_name: String,
    pub history: Vec<BlowupRecord>,
}

impl Chart {
    pub fn new(id: u64, vars: Vec<String>, z_name: String) -> Result<Chart> {
        let mut all = vars.clone();
        all.push(z_name.clone());
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::Precondition("variable names must be unique".into()));
        }
        Ok(Chart {
            id,
            vars,
            z_name,
            history: Vec::new(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
}

/// Compose each polynomial with x_i -> x_i + c_i.
pub fn translate_origin(field: &Arc<FieldSpec>, polys: &[Poly], c: &[FElem]) -> Result<Vec<Poly>> {
    let nvars = match polys.first() {
        Some(p) => p.nvars,
        None => return Ok(Vec::new()),
    };
    if c.len() != nvars {
        return Err(Error::ArityMismatch {
            expected: nvars,
            got: c.len(),
        });
    }
    let images: Vec<Poly> = (0..nvars)
        .map(|i| {
            Poly::var(field, nvars, i)
                .add(&Poly::constant(field, nvars, c[i].clone()))
                .unwrap()
        })
        .collect();
    polys.iter().map(|p| p.substitute(&images)).collect()
}

/// All nonempty subsets of downstairs variables, largest first, then
/// lexicographic on the sorted index vectors. Size 2^nvars - 1.
pub fn enumerate_coord_points(nvars: usize) -> Vec<CoordPoint> {
    let mut pts: Vec<CoordPoint> = (1u32..(1 << nvars))
        .map(|mask| {
            CoordPoint::new((0..nvars).filter(|i| mask & (1 << i) != 0).collect())
        })
        .collect();
    pts.sort_by(|a, b| b.vars.len().cmp(&a.vars.len()).then_with(|| a.vars.cmp(&b.vars)));
    pts
}

/// The substitution images of the chart U_{x_i} of the blow-up at
/// <x_j : j in center>: x_j -> x_i * x_j for j in center \ {i}, the rest fixed.
/// z (when in the center) is the caller's job via the exact-division transform.
pub fn blowup_substitution(
    field: &Arc<FieldSpec>,
    nvars: usize,
    center: &Center,
    chart_var: usize,
) -> Result<(Vec<Poly>, BlowupRecord)> {
    if !center.vars.contains(&chart_var) {
        return Err(Error::Precondition(format!(
            "chart variable {} not in center", chart_var
        )));
    }
    let xi = Poly::var(field, nvars, chart_var);
    let images: Vec<Poly> = (0..nvars)
        .map(|j| {
            let xj = Poly::var(field, nvars, j);
            if j != chart_var && center.vars.contains(&j) {
                xi.mul(&xj).unwrap()
            } else {
                xj
            }
        })
        .collect();
    let record = BlowupRecord {
        center: center.clone(),
        chart_var,
    };
    Ok((images, record))
}
