//! Orbit plots: one horizontal copy of the domain per witness, with orbit
//! points as ticks coloured by the component the witness belongs to.

use std::fmt::Write;

use iet_core::{orbit, ComponentKind, ComponentReport, Direction, Iet, Scalar};

use crate::CliError;

const WIDTH: f64 = 900.0;
const MARGIN: f64 = 40.0;
const ROW: f64 = 48.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

pub struct Row {
    pub witness: Scalar,
    /// Index of the component containing the witness, if any.
    pub component: Option<usize>,
    pub points: Vec<f64>,
    /// Breakpoint index where the orbit stopped.
    pub halted_at: Option<usize>,
}

pub fn orbit_rows(
    t: &Iet,
    report: Option<&ComponentReport>,
    witnesses: &[Scalar],
    steps: usize,
) -> Result<Vec<Row>, CliError> {
    let zero = t.zero();
    let c = t.total_length();
    witnesses
        .iter()
        .map(|w| {
            if !(w > &zero && w < c) {
                return Err(CliError::Parse(format!("witness {w} is not inside the domain")));
            }
            let o = orbit(t, w, steps, Direction::Forward).map_err(|e| CliError::Parse(e.to_string()))?;
            let component =
                report.and_then(|r| r.components.iter().position(|comp| comp.support.iter().any(|iv| iv.contains(w))));
            Ok(Row {
                witness: w.clone(),
                component,
                points: o.points.iter().map(Scalar::to_f64).collect(),
                halted_at: o.halted_at,
            })
        })
        .collect()
}

fn label(report: Option<&ComponentReport>, row: &Row) -> String {
    let kind = match (report, row.component) {
        (Some(r), Some(k)) => {
            let comp = &r.components[k];
            match comp.kind {
                ComponentKind::Periodic => format!("periodic, period {}", comp.period.unwrap_or(0)),
                ComponentKind::Minimal => "minimal".to_string(),
            }
        }
        _ => "unclassified".to_string(),
    };
    let mut s = format!("x = {:.6} ({kind}), {} points", row.witness.to_f64(), row.points.len());
    if let Some(j) = row.halted_at {
        let _ = write!(s, ", truncated at x_{j}");
    }
    s
}

/// Deterministic SVG document for the given rows.
pub fn render(t: &Iet, report: Option<&ComponentReport>, rows: &[Row]) -> String {
    let c = t.total_length().to_f64();
    let span = WIDTH - 2.0 * MARGIN;
    let xpos = |x: f64| MARGIN + span * x / c;
    let height = MARGIN * 2.0 + ROW * rows.len() as f64 + 20.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN:.0}" y="20">perm {} on [0, {c:.6}]</text>"#, t.perm());
    for (r, row) in rows.iter().enumerate() {
        let y = MARGIN + 20.0 + ROW * r as f64;
        let color = match row.component {
            Some(k) => PALETTE[k % PALETTE.len()],
            None => "#7f7f7f",
        };
        let _ = writeln!(out, r#"<g class="orbit" data-row="{r}">"#);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000" stroke-width="1"/>"##,
            xpos(0.0),
            xpos(c)
        );
        for x in t.breakpoints()[1..t.n()].iter().map(Scalar::to_f64) {
            let _ =
                writeln!(out, r##"<circle class="singular" cx="{:.2}" cy="{y:.2}" r="2.5" fill="#000"/>"##, xpos(x));
        }
        for &x in &row.points {
            let _ = writeln!(
                out,
                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}" stroke-width="1"/>"#,
                xpos(x),
                y - 8.0,
                y + 8.0
            );
        }
        let _ =
            writeln!(out, r#"<text x="{MARGIN:.0}" y="{:.2}" fill="{color}">{}</text>"#, y + 22.0, label(report, row));
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    out
}
