//! Plain-text sparse triplet dump of a [`ConicProgram`].
//!
//! ```text
//! conic-dump 1
//! vars <n>
//! c <j> <value>                      # nonzero objective entries
//! eq <row> <j> <value>               # equality coefficients
//! eq_const <row> <value>             # equality constants
//! cone <block> <kind> <dim>          # kind: nonneg | soc | rsoc | exp
//! g <block> <row> <j> <value>        # cone row coefficients
//! h <block> <row> <value>            # cone row constants
//! bound <j> <lower> <upper>          # only finite-or-infinite boxes that are set
//! ```
//!
//! Each equality row reads `sum eq(row, j) x_j + eq_const(row) = 0`, each
//! cone row reads `s = sum g x + h`. Values are written in shortest
//! round-trip form, so `parse_dump(dump(p)) == p` up to term order.

use std::fmt::Write;

use crate::error::{ConicError, Result};
use crate::program::{Affine, ConeBlock, ConeKind, ConicProgram};

pub fn dump(prog: &ConicProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "conic-dump 1");
    let _ = writeln!(out, "vars {}", prog.n_vars);
    for (j, c) in prog.objective.iter().enumerate().filter(|(_, c)| **c != 0.0) {
        let _ = writeln!(out, "c {j} {c:?}");
    }
    let _ = writeln!(out, "equalities {}", prog.equalities.len());
    for (r, row) in prog.equalities.iter().enumerate() {
        for (j, v) in &row.terms {
            let _ = writeln!(out, "eq {r} {j} {v:?}");
        }
        if row.constant != 0.0 {
            let _ = writeln!(out, "eq_const {r} {:?}", row.constant);
        }
    }
    for (b, block) in prog.cones.iter().enumerate() {
        let _ = writeln!(out, "cone {b} {} {}", block.kind.name(), block.rows.len());
        for (r, row) in block.rows.iter().enumerate() {
            for (j, v) in &row.terms {
                let _ = writeln!(out, "g {b} {r} {j} {v:?}");
            }
            if row.constant != 0.0 {
                let _ = writeln!(out, "h {b} {r} {:?}", row.constant);
            }
        }
    }
    if let Some(bounds) = &prog.var_bounds {
        for (j, (lo, hi)) in bounds.iter().enumerate() {
            let _ = writeln!(out, "bound {j} {lo:?} {hi:?}");
        }
    }
    out
}

fn cone_row(prog: &mut ConicProgram, b: usize, r: usize) -> Option<&mut Affine> {
    prog.cones.get_mut(b).and_then(|c| c.rows.get_mut(r))
}

pub fn parse_dump(text: &str) -> Result<ConicProgram> {
    let mut prog = ConicProgram::default();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: &str| ConicError::Dump {
            line,
            msg: msg.to_string(),
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        let int = |i: usize| -> Result<usize> {
            tok.get(i).ok_or_else(|| err("missing field"))?.parse().map_err(|_| err("bad integer"))
        };
        let num = |i: usize| -> Result<f64> {
            tok.get(i).ok_or_else(|| err("missing field"))?.parse().map_err(|_| err("bad number"))
        };
        if !seen_header {
            if tok != ["conic-dump", "1"] {
                return Err(err("expected header `conic-dump 1`"));
            }
            seen_header = true;
            continue;
        }
        match tok[0] {
            "vars" => {
                let n = int(1)?;
                prog.n_vars = n;
                prog.objective = vec![0.0; n];
            }
            "c" => {
                let j = int(1)?;
                *prog.objective.get_mut(j).ok_or_else(|| err("objective index out of range"))? = num(2)?;
            }
            "equalities" => prog.equalities = vec![Affine::default(); int(1)?],
            "eq" => {
                let r = int(1)?;
                let row = prog.equalities.get_mut(r).ok_or_else(|| err("equality row out of range"))?;
                row.terms.push((int(2)?, num(3)?));
            }
            "eq_const" => {
                let r = int(1)?;
                prog.equalities.get_mut(r).ok_or_else(|| err("equality row out of range"))?.constant = num(2)?;
            }
            "cone" => {
                if int(1)? != prog.cones.len() {
                    return Err(err("cone blocks must be numbered consecutively"));
                }
                let kind = ConeKind::parse(tok.get(2).copied().unwrap_or("")).ok_or_else(|| err("unknown cone kind"))?;
                prog.cones.push(ConeBlock {
                    kind,
                    rows: vec![Affine::default(); int(3)?],
                });
            }
            "g" => {
                let (b, r, j, v) = (int(1)?, int(2)?, int(3)?, num(4)?);
                cone_row(&mut prog, b, r).ok_or_else(|| err("cone row out of range"))?.terms.push((j, v));
            }
            "h" => {
                let (b, r, v) = (int(1)?, int(2)?, num(3)?);
                cone_row(&mut prog, b, r).ok_or_else(|| err("cone row out of range"))?.constant = v;
            }
            "bound" => {
                let j = int(1)?;
                if j >= prog.n_vars {
                    return Err(err("bound index out of range"));
                }
                prog.set_bounds(j, num(2)?, num(3)?);
            }
            other => return Err(err(&format!("unknown record `{other}`"))),
        }
    }
    if !seen_header {
        return Err(ConicError::Dump {
            line: 0,
            msg: "empty dump".into(),
        });
    }
    prog.validate()?;
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConicProgram {
        let mut p = ConicProgram::new(3);
        p.set_cost(2, 1.5);
        p.add_eq(Affine::var(0).plus(1, 1.0).offset(-1.0));
        p.add_nonneg(Affine::var(0));
        p.add_rsoc(vec![Affine::var(2), Affine::constant(0.5), Affine::term(1, 0.1)]);
        p.add_exp(Affine::constant(-1.0), Affine::constant(1.0), Affine::term(0, -1.0).offset(1.0));
        p.set_bounds(1, 0.0, f64::INFINITY);
        p
    }

    #[test]
    fn roundtrip() {
        let p = sample();
        let text = dump(&p);
        assert!(text.starts_with("conic-dump 1\n"));
        assert_eq!(parse_dump(&text).unwrap(), p);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_dump("").is_err());
        assert!(parse_dump("conic-dump 2\n").is_err());
        assert!(parse_dump("conic-dump 1\nvars 1\ncone 0 psd 3\n").is_err());
        assert!(parse_dump("conic-dump 1\nvars 1\ncone 0 soc 2\ng 0 5 0 1.0\n").is_err());
        let err = parse_dump("conic-dump 1\nvars 1\nc 0 abc\n").unwrap_err();
        assert!(matches!(err, ConicError::Dump { line: 3, .. }));
    }
}
