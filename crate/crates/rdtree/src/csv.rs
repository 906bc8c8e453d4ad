//! CSV emission for sweep curves.
//!
//! Numbers are fixed-point with six fractional digits; strategy names are
//! written verbatim unless they contain a delimiter, in which case they are
//! quoted per RFC 4180.

use std::fmt::Write;

use rdtree_core::voi::{table2_epsilon_column, VoiCurve};

pub fn number(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `lambda,ev:<name>...,choice_ev,evpi,rd:<name>...,choice_rd,rdvpi,epsilon_row`
pub fn render_sweep_csv(curve: &VoiCurve) -> String {
    let names = &curve.strategy_names;
    let mut out = String::from("lambda");
    for n in names {
        out.push(',');
        out.push_str(&field(&format!("ev:{n}")));
    }
    out.push_str(",choice_ev,evpi");
    for n in names {
        out.push(',');
        out.push_str(&field(&format!("rd:{n}")));
    }
    out.push_str(",choice_rd,rdvpi,epsilon_row\n");

    let epsilon = table2_epsilon_column(curve);
    for (row, eps) in curve.rows.iter().zip(&epsilon.values) {
        out.push_str(&number(row.lambda));
        for v in &row.ev_values {
            let _ = write!(out, ",{}", number(*v));
        }
        let _ = write!(
            out,
            ",{},{}",
            field(&names[row.choice_ev]),
            number(row.evpi)
        );
        for v in &row.rd_values {
            let _ = write!(out, ",{}", number(*v));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            field(&names[row.choice_rd]),
            number(row.rdvpi),
            number(*eps)
        );
    }
    out
}

/// `lambda,evpi,rdvpi`
pub fn render_voi_csv(curve: &VoiCurve) -> String {
    let mut out = String::from("lambda,evpi,rdvpi\n");
    for row in &curve.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            number(row.lambda),
            number(row.evpi),
            number(row.rdvpi)
        );
    }
    out
}
