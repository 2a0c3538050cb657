//! Plain-text LP-style dump for debugging.
//!
//! Columns appear in model order (`VarId` 0 first); rows in insertion order.
//! Variable names are written as-is, so they should avoid whitespace.

use std::fmt::Write;

use crate::model::{MilpModel, VarKind};

pub fn to_lp_string(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    for v in model.vars.iter().filter(|v| v.objective != 0.0) {
        push_term(&mut out, v.objective, &v.name);
    }
    if model.objective_offset != 0.0 {
        let _ = write!(out, " {:+}", model.objective_offset);
    }
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        for &(v, a) in &row.coeffs {
            push_term(&mut out, a, &model.vars[v.0].name);
        }
        let _ = writeln!(out, " {} {}", row.sense, row.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.vars {
        let _ = writeln!(out, " {} <= {} <= {}", fmt_bound(v.lower), v.name, fmt_bound(v.upper));
    }
    let bins: Vec<&str> = model
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for b in bins {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, coeff: f64, name: &str) {
    let sign = if coeff < 0.0 { '-' } else { '+' };
    let _ = write!(out, " {sign} {} {name}", coeff.abs());
}

fn fmt_bound(b: f64) -> String {
    if b == f64::INFINITY {
        "+inf".into()
    } else if b == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{b}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RowSense;

    #[test]
    fn dump_lists_every_section() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, f64::INFINITY, 2.0);
        let b = m.add_binary("b", -1.0);
        m.add_row("cap", [(x, 1.0), (b, -3.0)], RowSense::Le, 0.0);
        let text = to_lp_string(&m);
        assert!(text.contains("obj: + 2 x - 1 b"));
        assert!(text.contains("cap: + 1 x - 3 b <= 0"));
        assert!(text.contains("0 <= x <= +inf"));
        assert!(text.contains("Binaries\n b\n"));
    }
}
