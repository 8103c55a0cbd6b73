use std::io::Write;

use nflp::anova_fit_and_test;
use serde::Serialize;

use crate::args::{Format, GroupArgs};
use crate::config::RunConfig;
use crate::data::Table;
use crate::error::{CliError, Result};
use crate::report::{num, sink, write_csv, write_json, Provenance, TextTable};

#[derive(Debug, Serialize)]
struct GroupRow {
    level: String,
    n: usize,
    /// `Σπ` over the group.
    weight: f64,
    mean: f64,
}

#[derive(Debug, Serialize)]
struct TTest {
    statistic: f64,
    df: f64,
    p_value: f64,
    /// Second group mean minus first.
    mean_difference: f64,
}

#[derive(Debug, Serialize)]
struct ObservationRow {
    row: usize,
    line: u64,
    level: String,
    value: f64,
    outlier_probability: f64,
    flagged: bool,
}

#[derive(Debug, Serialize)]
struct GroupReport<'a> {
    provenance: Provenance<'a, RunConfig>,
    groups: Vec<GroupRow>,
    omega_hat: f64,
    sigma_hat: f64,
    ss_tr: f64,
    f_stat: f64,
    df1: usize,
    df2: f64,
    p_value: f64,
    t_test: Option<TTest>,
    observations: Vec<ObservationRow>,
}

pub fn run(args: GroupArgs, two_sample: bool) -> Result<()> {
    let command = if two_sample { "ttest" } else { "anova" };
    let cfg = RunConfig::resolve(&args.common, None, false, args.group)?;
    let group_col = cfg.group.clone().ok_or_else(|| CliError::usage("no group column (use --group)"))?;
    let table = Table::read(&cfg.input)?;
    let labels = table.text_column(&group_col)?;
    let y = table.numeric_columns(&[cfg.response.as_str()])?.remove(0);

    // levels in order of first appearance
    let mut levels: Vec<String> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        match levels.iter().position(|v| v == l) {
            Some(k) => members[k].push(i),
            None => {
                levels.push(l.clone());
                members.push(vec![i]);
            }
        }
    }
    if levels.len() < 2 {
        return Err(CliError::usage(format!("group column '{group_col}' has {} level(s); need at least 2", levels.len())));
    }
    if two_sample && levels.len() != 2 {
        return Err(CliError::usage(format!("a t-test needs exactly 2 groups, '{group_col}' has {}", levels.len())));
    }
    let groups: Vec<Vec<f64>> = members.iter().map(|m| m.iter().map(|&i| y[i]).collect()).collect();
    let rep = anova_fit_and_test(&groups, &cfg.fit)?;

    let mut observations = Vec::with_capacity(y.len());
    let mut k = 0;
    for (g, rows) in members.iter().enumerate() {
        for &i in rows {
            let prob = rep.outlier_probabilities[k];
            observations.push(ObservationRow {
                row: i + 1,
                line: table.line(i),
                level: levels[g].clone(),
                value: y[i],
                outlier_probability: prob,
                flagged: prob > 0.5,
            });
            k += 1;
        }
    }
    observations.sort_by_key(|o| o.row);

    let t_test = rep.t_stat.map(|t| TTest {
        statistic: t,
        df: rep.df2,
        p_value: rep.t_p_value.unwrap_or(rep.p_value),
        mean_difference: rep.group_means[1] - rep.group_means[0],
    });
    let report = GroupReport {
        provenance: Provenance::new(command, cfg.fit.seed, &cfg),
        groups: levels
            .iter()
            .zip(&members)
            .enumerate()
            .map(|(g, (l, m))| GroupRow {
                level: l.clone(),
                n: m.len(),
                weight: rep.group_weights[g],
                mean: rep.group_means[g],
            })
            .collect(),
        omega_hat: rep.omega_hat,
        sigma_hat: rep.sigma_hat,
        ss_tr: rep.ss_tr,
        f_stat: rep.f_stat,
        df1: rep.df1,
        df2: rep.df2,
        p_value: rep.p_value,
        t_test,
        observations,
    };

    let mut out = sink(cfg.output.as_deref())?;
    match (cfg.format, two_sample) {
        (Format::Json, _) => write_json(&mut *out, &report),
        (Format::Csv, false) => write_csv(&mut *out, &report.groups),
        (Format::Csv, true) => write_csv(&mut *out, report.t_test.as_ref()),
        (Format::Text, _) => write_text(&mut *out, &report, two_sample),
    }
}

fn write_text(out: &mut dyn Write, r: &GroupReport<'_>, two_sample: bool) -> Result<()> {
    let mut t = TextTable::new(&["group", "n", "weight", "mean"]);
    for g in &r.groups {
        t.row(vec![g.level.clone(), g.n.to_string(), num(g.weight), num(g.mean)]);
    }
    t.write(out)?;
    writeln!(out)?;
    writeln!(out, "omega = {}  sigma = {}", num(r.omega_hat), num(r.sigma_hat))?;
    match (&r.t_test, two_sample) {
        (Some(t), true) => writeln!(out, "T = {}  df = {}  p = {}", num(t.statistic), num(t.df), num(t.p_value))?,
        _ => writeln!(
            out,
            "SS_tr = {}  F = {}  df = ({}, {})  p = {}",
            num(r.ss_tr),
            num(r.f_stat),
            r.df1,
            num(r.df2),
            num(r.p_value)
        )?,
    }
    let flagged: Vec<String> = r.observations.iter().filter(|o| o.flagged).map(|o| o.row.to_string()).collect();
    if !flagged.is_empty() {
        writeln!(out, "flagged rows: {}", flagged.join(", "))?;
    }
    out.flush()?;
    Ok(())
}
