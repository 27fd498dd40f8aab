//! Human tables, CSV and JSON views of a [`RunRecord`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::record::{Outcome, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub fn render(rec: &RunRecord, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rec)?;
            s.push('\n');
            s
        }
        Format::Csv => csv_text(rec)?,
        Format::Table => table(rec),
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_rows<R: Serialize>(rows: impl IntoIterator<Item = R>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct LadderRow<'a> {
    probe: &'a str,
    permutation: String,
    scale: f64,
    value: f64,
    fitted_slope: f64,
    predicted_slope: f64,
}

#[derive(Serialize)]
struct BoundRow<'a> {
    label: &'a str,
    scan: f64,
    ratio: f64,
}

/// Ladders for probes, the condition trace for checks, one row per tuple
/// for sweeps and one per case for lemma suites.
pub fn csv_text(rec: &RunRecord) -> anyhow::Result<String> {
    match &rec.outcome {
        Outcome::Check { verdict, .. } => write_rows(verdict.trace.conditions().iter().map(|c| {
            (
                &c.id,
                weighted_young::exponent::format_rational(&c.lhs),
                c.relation.symbol(),
                weighted_young::exponent::format_rational(&c.rhs),
                c.satisfied,
                c.strictness_required,
                serde_json::to_value(c.role).ok().and_then(|v| v.as_str().map(String::from)),
            )
        }))
        .map(|body| format!("id,lhs,relation,rhs,satisfied,strictness_required,role\n{body}")),
        Outcome::Probe { reports, bounds, .. } => {
            if reports.is_empty() {
                let rows = bounds.iter().flat_map(|b| {
                    b.scan.iter().zip(&b.ratios).map(move |(s, r)| BoundRow {
                        label: &b.label,
                        scan: *s,
                        ratio: *r,
                    })
                });
                return write_rows(rows);
            }
            let names: Vec<String> = reports
                .iter()
                .map(|r| serde_json::to_value(r.probe).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
                .collect();
            let rows = reports.iter().zip(&names).flat_map(|(r, name)| {
                r.ladder.iter().map(move |pt| LadderRow {
                    probe: name,
                    permutation: format!("{}{}{}", r.permutation[0], r.permutation[1], r.permutation[2]),
                    scale: pt.scale,
                    value: pt.value,
                    fitted_slope: r.fitted_slope,
                    predicted_slope: r.predicted_slope,
                })
            });
            write_rows(rows)
        }
        Outcome::Sweep { rows, .. } => write_rows(rows.iter().map(|r| {
            (
                &r.weights[0],
                &r.weights[1],
                &r.weights[2],
                r.classification.to_string(),
                r.binding.join(" "),
                r.strict.join(" "),
            )
        }))
        .map(|body| format!("w0,w1,w2,classification,binding,strict\n{body}")),
        Outcome::Lemmas { cases } => write_rows(cases.iter().map(|c| (format!("{:?}", c.suite), &c.label, yes(c.pass), &c.detail)))
            .map(|body| format!("suite,label,result,detail\n{body}")),
        Outcome::Error { kind, message } => Ok(format!("error,message\n{kind:?},\"{}\"\n", message.replace('"', "'"))),
    }
}

pub fn table(rec: &RunRecord) -> String {
    let mut out = String::new();
    let sc = &rec.scenario;
    let p = &sc.params;
    let _ = writeln!(out, "{} [{}] d={} flavor={:?} space={:?}", sc.name, sc.kind, p.d, sc.flavor, sc.space);
    let _ = writeln!(
        out,
        "  p=({}, {}, {}) q=({}, {}, {}) s=({}, {}, {}) t=({}, {}, {})",
        p.p[0], p.p[1], p.p[2], p.q[0], p.q[1], p.q[2], p.s[0], p.s[1], p.s[2], p.t[0], p.t[1], p.t[2]
    );
    match &rec.outcome {
        Outcome::Check { verdict, binding } => {
            let _ = writeln!(out, "  verdict: {} ({:?})", verdict.classification, verdict.theorem);
            for c in verdict.trace.conditions() {
                let _ = writeln!(out, "    {c}");
            }
            if !binding.is_empty() {
                let _ = writeln!(out, "  binding: {}", binding.join(", "));
            }
        }
        Outcome::Probe {
            status,
            reports,
            bounds,
            cross_check,
            ..
        } => {
            for r in reports {
                let _ = writeln!(
                    out,
                    "  {:?} perm={:?}: slope {:.4} (predicted {:.4}, r2 {:.4}) growth {:.4} {}{}",
                    r.probe,
                    r.permutation,
                    r.fitted_slope,
                    r.predicted_slope,
                    r.r_squared,
                    r.growth_slope,
                    yes(r.pass),
                    if r.necessity_witnessed { " witnessed" } else { "" }
                );
                for pt in &r.ladder {
                    let _ = writeln!(out, "      {:>12.6e} {:>14.8e}", pt.scale, pt.value);
                }
                for (k, v) in &r.details {
                    let _ = writeln!(out, "    {k} = {v:.6e}");
                }
                for n in &r.notes {
                    let _ = writeln!(out, "    note: {n}");
                }
            }
            for b in bounds {
                let _ = writeln!(out, "  {}: {} ({})", b.label, yes(b.pass), b.notes.join("; "));
            }
            if let Some(x) = cross_check {
                let _ = writeln!(
                    out,
                    "  cross-check: {} margin={} requirement={:?} measured={:?} {}",
                    x.classification,
                    x.margin_exact.as_deref().unwrap_or("-"),
                    x.requirement,
                    x.measured,
                    yes(x.satisfied)
                );
            }
            let _ = writeln!(out, "  status: {status:?}");
        }
        Outcome::Sweep { rows, counts } => {
            for r in rows {
                let _ = writeln!(
                    out,
                    "  {:>6} {:>6} {:>6}  {:<12} {}{}",
                    r.weights[0],
                    r.weights[1],
                    r.weights[2],
                    r.classification.to_string(),
                    r.binding.join(" "),
                    if r.strict.is_empty() { String::new() } else { format!(" strict:{}", r.strict.join(" ")) }
                );
            }
            let _ = writeln!(out, "  counts: {counts:?}");
        }
        Outcome::Lemmas { cases } => {
            for c in cases {
                let _ = writeln!(out, "  {} {:?}: {} ({})", yes(c.pass), c.suite, c.label, c.detail);
            }
        }
        Outcome::Error { kind, message } => {
            let _ = writeln!(out, "  error ({kind:?}): {message}");
        }
    }
    let _ = writeln!(out, "  exit {}", rec.exit_code);
    out
}
