//! Consolidated human-readable summary of a completed run directory.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::output::parse_manifest;

fn read_csv(dir: &Path, name: &str) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(dir.join(name)).ok()?;
    let mut lines = text.lines();
    let header: Vec<String> = lines.next()?.split(',').map(|s| s.to_string()).collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect::<Vec<_>>())
        .collect();
    Some((header, rows))
}

fn col(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

/// Build `summary.txt` for a run directory; errors if no manifest is found.
pub fn report(run_dir: &Path) -> Result<String, String> {
    let manifest_text = std::fs::read_to_string(run_dir.join("manifest.txt"))
        .map_err(|_| format!("no manifest in {}", run_dir.display()))?;
    let manifest: HashMap<String, String> = parse_manifest(&manifest_text).into_iter().collect();
    let experiment = manifest.get("experiment").cloned().unwrap_or_default();

    let mut out = String::new();
    let _ = writeln!(out, "run summary: experiment '{experiment}'");
    for key in ["density_model", "master_seed", "config_hash", "normal_method", "wall_clock_s"] {
        if let Some(v) = manifest.get(key) {
            let _ = writeln!(out, "  {key} = {v}");
        }
    }
    let _ = writeln!(out);

    let mut checks: Vec<(String, bool, String)> = Vec::new();

    if let Some((header, rows)) = read_csv(run_dir, "identities.csv") {
        let (ci, cv, ct, cp) = (
            col(&header, "check").unwrap_or(0),
            col(&header, "value").unwrap_or(1),
            col(&header, "tolerance").unwrap_or(2),
            col(&header, "pass").unwrap_or(3),
        );
        for r in &rows {
            checks.push((
                r[ci].clone(),
                r[cp] == "true",
                format!("value {} (tolerance {})", r[cv], r[ct]),
            ));
        }
    }

    if let Some((header, rows)) = read_csv(run_dir, "fits.csv") {
        let (cp, cm, cr, c2, cs) = (
            col(&header, "process").unwrap_or(0),
            col(&header, "model").unwrap_or(1),
            col(&header, "rate").unwrap_or(2),
            col(&header, "r2").unwrap_or(5),
            col(&header, "status").unwrap_or(9),
        );
        for r in &rows {
            if r[cs] != "ok" {
                checks.push((
                    format!("fit.{}.{}", r[cp], r[cm]),
                    false,
                    r[cs].clone(),
                ));
            } else {
                checks.push((
                    format!("fit.{}.{}", r[cp], r[cm]),
                    true,
                    format!("rate {} r2 {}", r[cr], r[c2]),
                ));
            }
        }
    }

    if let Some((header, rows)) = read_csv(run_dir, "bound.csv") {
        if let Some((th, tv_rows)) = read_csv(run_dir, "tv.csv") {
            // Envelope comparison line: largest tv/bound ratio past burn-in.
            let (bt, bb) = (col(&header, "t").unwrap_or(0), col(&header, "bound").unwrap_or(1));
            let bounds: HashMap<String, f64> = rows
                .iter()
                .filter_map(|r| Some((r[bt].clone(), r[bb].parse().ok()?)))
                .collect();
            let (pt, ptv, pproc) = (
                col(&th, "t").unwrap_or(1),
                col(&th, "tv").unwrap_or(2),
                col(&th, "process").unwrap_or(0),
            );
            let mut worst: Option<(f64, f64, f64)> = None;
            for r in &tv_rows {
                if r[pproc] != "accelerated_x" {
                    continue;
                }
                let (Ok(t), Ok(tv)) = (r[pt].parse::<f64>(), r[ptv].parse::<f64>()) else {
                    continue;
                };
                if tv >= 0.5 {
                    continue;
                }
                if let Some(&b) = bounds.get(&r[pt]) {
                    let ratio = tv / b;
                    if worst.map(|(wr, _, _)| ratio > wr).unwrap_or(true) {
                        worst = Some((ratio, t, b));
                    }
                }
            }
            if let Some((ratio, t, b)) = worst {
                checks.push((
                    "tv.envelope_domination".into(),
                    ratio <= 1.0,
                    format!("worst tv/bound = {ratio:.3} at t = {t} (bound {b:.4})"),
                ));
            }
        }
    }

    if let Some((header, rows)) = read_csv(run_dir, "hitting_summary.csv") {
        let (cq, co, ce, cs, cb) = (
            col(&header, "quantity").unwrap_or(0),
            col(&header, "order_or_alpha").unwrap_or(1),
            col(&header, "estimate").unwrap_or(2),
            col(&header, "se").unwrap_or(3),
            col(&header, "bound").unwrap_or(4),
        );
        for r in &rows {
            if r[cq] == "moment" || r[cq] == "exp_moment" {
                let est: f64 = r[ce].parse().unwrap_or(f64::NAN);
                let se: f64 = r[cs].parse().unwrap_or(0.0);
                let bound: f64 = r[cb].parse().unwrap_or(f64::INFINITY);
                checks.push((
                    format!("hitting.{}[{}]", r[cq], r[co]),
                    est <= bound + 3.0 * se,
                    format!("{est:.6} +- {se:.6} vs bound {bound:.6}"),
                ));
            }
        }
    }

    if let Some((header, rows)) = read_csv(run_dir, "lln.csv") {
        let (ct, cf) = (col(&header, "t").unwrap_or(0), col(&header, "exceedance").unwrap_or(1));
        if let Some(last) = rows.last() {
            let frac: f64 = last[cf].parse().unwrap_or(1.0);
            checks.push((
                "lln.final_exceedance".into(),
                frac < 0.05,
                format!("{frac} at T = {}", last[ct]),
            ));
        }
    }

    if let Some((header, rows)) = read_csv(run_dir, "uniformity.csv") {
        let (cm, cv) = (col(&header, "metric").unwrap_or(0), col(&header, "value").unwrap_or(1));
        for r in &rows {
            if r[cm] == "collapsed" {
                checks.push((
                    "sweep.final_collapse".into(),
                    r[cv] == "true",
                    String::new(),
                ));
            }
        }
    }

    if checks.is_empty() {
        let _ = writeln!(out, "no checkable outputs found (raw CSVs only)");
    } else {
        let _ = writeln!(out, "{:<42} {:<6} details", "check", "status");
        for (name, ok, detail) in &checks {
            let _ = writeln!(out, "{name:<42} {:<6} {detail}", if *ok { "PASS" } else { "FAIL" });
        }
    }
    Ok(out)
}
