//! Canonical conic program: `min c'x` subject to `A x = b` and a list of
//! cone memberships over affine images of `x`.

use serde::{Deserialize, Serialize};

use crate::error::{ConicError, Result};

/// `sum_i coef_i x_i + constant`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(j: usize) -> Self {
        Affine::term(j, 1.0)
    }

    pub fn term(j: usize, coef: f64) -> Self {
        Affine {
            terms: vec![(j, coef)],
            constant: 0.0,
        }
    }

    pub fn linear(terms: Vec<(usize, f64)>) -> Self {
        Affine { terms, constant: 0.0 }
    }

    pub fn plus(mut self, j: usize, coef: f64) -> Self {
        self.terms.push((j, coef));
        self
    }

    pub fn offset(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.1 *= s;
        }
        self.constant *= s;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().fold(self.constant, |acc, &(j, c)| acc + c * x[j])
    }

    fn max_index(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.0).max()
    }
}

/// Cone kinds. Dimensions are implied by the number of rows of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    /// Every row nonnegative.
    Nonneg,
    /// `(t, x)` with `t >= ||x||`.
    Soc,
    /// `(u, v, x)` with `2 u v >= ||x||^2`, `u, v >= 0`.
    Rsoc,
    /// `(x, y, z)` in the closure of `{y > 0, y exp(x / y) <= z}`.
    Exp,
}

impl ConeKind {
    pub fn name(self) -> &'static str {
        match self {
            ConeKind::Nonneg => "nonneg",
            ConeKind::Soc => "soc",
            ConeKind::Rsoc => "rsoc",
            ConeKind::Exp => "exp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nonneg" => Some(ConeKind::Nonneg),
            "soc" => Some(ConeKind::Soc),
            "rsoc" => Some(ConeKind::Rsoc),
            "exp" => Some(ConeKind::Exp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeBlock {
    pub kind: ConeKind,
    pub rows: Vec<Affine>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    /// Equality rows, each constrained to zero.
    pub equalities: Vec<Affine>,
    pub cones: Vec<ConeBlock>,
    /// Optional `(lower, upper)` per variable; infinite entries are ignored.
    pub var_bounds: Option<Vec<(f64, f64)>>,
}

impl ConicProgram {
    pub fn new(n_vars: usize) -> Self {
        ConicProgram {
            n_vars,
            objective: vec![0.0; n_vars],
            ..Default::default()
        }
    }

    /// Append a fresh variable and return its index.
    pub fn add_var(&mut self) -> usize {
        self.n_vars += 1;
        self.objective.push(0.0);
        if let Some(b) = &mut self.var_bounds {
            b.push((f64::NEG_INFINITY, f64::INFINITY));
        }
        self.n_vars - 1
    }

    pub fn add_vars(&mut self, count: usize) -> std::ops::Range<usize> {
        let start = self.n_vars;
        for _ in 0..count {
            self.add_var();
        }
        start..self.n_vars
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.objective[j] = c;
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        let n = self.n_vars;
        let b = self
            .var_bounds
            .get_or_insert_with(|| vec![(f64::NEG_INFINITY, f64::INFINITY); n]);
        b[j] = (lo, hi);
    }

    /// `row = 0`.
    pub fn add_eq(&mut self, row: Affine) {
        self.equalities.push(row);
    }

    /// `row >= 0`.
    pub fn add_nonneg(&mut self, row: Affine) {
        match self.cones.last_mut() {
            Some(ConeBlock {
                kind: ConeKind::Nonneg,
                rows,
            }) => rows.push(row),
            _ => self.cones.push(ConeBlock {
                kind: ConeKind::Nonneg,
                rows: vec![row],
            }),
        }
    }

    /// `lhs <= rhs`.
    pub fn add_le(&mut self, lhs: Affine, rhs: Affine) {
        let mut row = rhs;
        for (j, c) in lhs.terms {
            row.terms.push((j, -c));
        }
        row.constant -= lhs.constant;
        self.add_nonneg(row);
    }

    pub fn add_soc(&mut self, rows: Vec<Affine>) {
        self.cones.push(ConeBlock {
            kind: ConeKind::Soc,
            rows,
        });
    }

    pub fn add_rsoc(&mut self, rows: Vec<Affine>) {
        self.cones.push(ConeBlock {
            kind: ConeKind::Rsoc,
            rows,
        });
    }

    pub fn add_exp(&mut self, x: Affine, y: Affine, z: Affine) {
        self.cones.push(ConeBlock {
            kind: ConeKind::Exp,
            rows: vec![x, y, z],
        });
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn n_cone_rows(&self) -> usize {
        self.cones.iter().map(|c| c.rows.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ConicError::Malformed(m));
        if self.objective.len() != self.n_vars {
            return bad(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.n_vars
            ));
        }
        if let Some(b) = &self.var_bounds {
            if b.len() != self.n_vars {
                return bad("var_bounds length differs from n_vars".into());
            }
            if let Some((j, _)) = b.iter().enumerate().find(|(_, (lo, hi))| lo > hi || lo.is_nan() || hi.is_nan()) {
                return bad(format!("empty bound interval on variable {j}"));
            }
        }
        let rows = self
            .equalities
            .iter()
            .chain(self.cones.iter().flat_map(|c| c.rows.iter()));
        for row in rows {
            if let Some(j) = row.max_index() {
                if j >= self.n_vars {
                    return bad(format!("variable index {j} out of range ({} variables)", self.n_vars));
                }
            }
            if !row.constant.is_finite() || row.terms.iter().any(|t| !t.1.is_finite()) {
                return bad("non-finite coefficient".into());
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return bad("non-finite objective coefficient".into());
        }
        for (i, cone) in self.cones.iter().enumerate() {
            let d = cone.rows.len();
            let ok = match cone.kind {
                ConeKind::Nonneg => d >= 1,
                ConeKind::Soc => d >= 2,
                ConeKind::Rsoc => d >= 3,
                ConeKind::Exp => d == 3,
            };
            if !ok {
                return bad(format!("cone {i} ({}) has invalid dimension {d}", cone.kind.name()));
            }
        }
        Ok(())
    }
}
