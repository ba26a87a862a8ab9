//! Text, CSV and JSON output. All three print the same decimal strings.

use std::fmt::Write;

use crate::config::OutputFormat;
use crate::job::{ApproximationReport, ConstantsSnapshot, ConstantsUsed, McSnapshot};

pub const CSV_HEADER: &str = "N,lambda_N,bound";

pub fn report(r: &ApproximationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => report_table(r),
        OutputFormat::Csv => report_csv(r),
        OutputFormat::Structured => json(r),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn report_csv(r: &ApproximationReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for row in &r.rows {
        writeln!(out, "{},{},{}", row.n, row.lambda_n, row.bound).unwrap();
    }
    out
}

fn report_table(r: &ApproximationReport) -> String {
    let mut out = String::new();
    let basis = if r.optimize_basis {
        "optimized"
    } else {
        "original"
    };
    writeln!(
        out,
        "precision {} bits, {} digits, {} basis",
        r.precision_bits, r.digits, basis
    )
    .unwrap();
    if r.stochastic_shortcut {
        writeln!(
            out,
            "ensemble is column stochastic in this basis: Lambda = 0 exactly"
        )
        .unwrap();
    }
    out.push('\n');
    let n_width = r
        .rows
        .iter()
        .map(|row| row.n.to_string().len())
        .max()
        .unwrap_or(1)
        .max(1);
    let l_width = r
        .rows
        .iter()
        .map(|row| row.lambda_n.len())
        .max()
        .unwrap_or(0)
        .max(8);
    writeln!(out, "{:>n_width$}  {:<l_width$}  bound", "N", "Lambda_N").unwrap();
    for row in &r.rows {
        writeln!(
            out,
            "{:>n_width$}  {:<l_width$}  {}",
            row.n, row.lambda_n, row.bound
        )
        .unwrap();
    }
    out.push('\n');
    out.push_str(&constants_table(&r.constants_used));
    if let Some(mc) = &r.mc {
        out.push('\n');
        out.push_str(&mc_table(mc));
    }
    out
}

fn snapshot_lines(out: &mut String, k: &ConstantsSnapshot) {
    let list = |v: &[String]| v.join(", ");
    writeln!(out, "  C1     {}", k.c1).unwrap();
    writeln!(out, "  R_i    {}", list(&k.column_ratio)).unwrap();
    writeln!(out, "  r      {}", k.r).unwrap();
    writeln!(out, "  theta  {}", k.theta).unwrap();
    writeln!(out, "  C2     {}", k.c2).unwrap();
    writeln!(out, "  C0     {}", k.c0).unwrap();
    writeln!(out, "  tau_i  {}", list(&k.tau_per_matrix)).unwrap();
    writeln!(out, "  s      {}", k.tau_weighted).unwrap();
    writeln!(out, "  M      {}", k.m).unwrap();
    writeln!(out, "  column stochastic  {}", k.is_all_column_stochastic).unwrap();
}

fn constants_table(k: &ConstantsUsed) -> String {
    let mut out = String::from("constants (original basis)\n");
    snapshot_lines(&mut out, &k.original);
    if let Some(opt) = &k.optimized {
        writeln!(
            out,
            "constants (optimized basis, lambda0 = {})",
            opt.lambda0
        )
        .unwrap();
        writeln!(out, "  ratio bound  {}", opt.ratio_bound).unwrap();
        snapshot_lines(&mut out, &opt.constants);
    }
    out
}

fn mc_table(mc: &McSnapshot) -> String {
    format!(
        "monte carlo: {:.10} +/- {:.3e} (steps {}, trials {}, seed {})\n",
        mc.mean, mc.stderr, mc.steps, mc.trials, mc.seed
    )
}

pub fn constants(k: &ConstantsUsed, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => constants_table(k),
        OutputFormat::Structured => json(k),
        OutputFormat::Csv => {
            let mut out = String::from("basis,c1,r,theta,c2,c0,s,m\n");
            let mut row = |name: &str, s: &ConstantsSnapshot| {
                writeln!(
                    out,
                    "{name},{},{},{},{},{},{},{}",
                    s.c1, s.r, s.theta, s.c2, s.c0, s.tau_weighted, s.m
                )
                .unwrap();
            };
            row("original", &k.original);
            if let Some(opt) = &k.optimized {
                row("optimized", &opt.constants);
            }
            out
        }
    }
}

pub fn mc(m: &McSnapshot, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => mc_table(m),
        OutputFormat::Structured => json(m),
        OutputFormat::Csv => format!(
            "mean,stderr,steps,trials,seed\n{},{},{},{},{}\n",
            m.mean, m.stderr, m.steps, m.trials, m.seed
        ),
    }
}
