use std::fmt::Write as _;

use anyhow::bail;
use rayon::prelude::*;

use effnoise::concat::critical_rate;
use effnoise::effective::{derive_effective, p_eff_estimate};
use effnoise::entanglement::{curve_crossings, ghz_negativity_fast, lifetime_pcrit};
use effnoise::{Channel, StabilizerCode};

use crate::args::{CodeSelector, NoiseKind, PGrid, Settings, UsageError};

pub const CHANNEL_HEADER: &str = "code,m,p,lambda0,lambda1,lambda2,lambda3,mu0,mu1,mu2,mu3,p_eff";
pub const LIFETIME_HEADER: &str = "encoding,m,N,p_crit,residual";
pub const NEGATIVITY_HEADER: &str = "encoding,m,N,negativity";
pub const CONCAT_HEADER: &str = "m1,m2,p_c,grid_checked";

const DEFAULT_LIFETIME_TOL: f64 = 1e-6;
const DEFAULT_CONCAT_TOL: f64 = 1e-8;
const DEFAULT_NEGATIVITY_P: f64 = 0.95;

/// CSV text for stdout or `--out`, plus notes for stderr.
pub struct Output {
    pub csv: String,
    pub notes: Vec<String>,
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn codes_or(s: &Settings, default: &str) -> Vec<CodeSelector> {
    if s.codes.is_empty() {
        vec![CodeSelector::Builtin {
            name: default.to_string(),
            m: None,
        }]
    } else {
        s.codes.clone()
    }
}

fn instantiate_all(selectors: &[CodeSelector], ms: &[usize]) -> anyhow::Result<Vec<StabilizerCode>> {
    let mut out = Vec::new();
    for sel in selectors {
        out.extend(sel.instantiate(ms)?);
    }
    Ok(out)
}

fn noise_channel(kind: NoiseKind, p: f64, custom: Option<&Channel>) -> effnoise::Result<Channel> {
    match kind {
        NoiseKind::White => Channel::white_noise(p),
        NoiseKind::Phase => Channel::phase_noise(p),
        NoiseKind::Custom => Ok(*custom.expect("custom noise carries a channel")),
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

pub fn channel(s: &Settings) -> anyhow::Result<Output> {
    let ms = s.m.clone().unwrap_or_else(|| vec![3]);
    let codes = instantiate_all(&codes_or(s, "repetition"), &ms)?;
    let custom = s.noise == NoiseKind::Custom;
    let ps: Vec<Option<f64>> = if custom {
        vec![None]
    } else {
        s.p_grid
            .clone()
            .unwrap_or(PGrid {
                start: 0.0,
                stop: 1.0,
                count: 101,
            })
            .points()
            .into_iter()
            .map(Some)
            .collect()
    };
    let tasks: Vec<(usize, usize)> = (0..codes.len())
        .flat_map(|c| (0..ps.len()).map(move |k| (c, k)))
        .collect();
    let mut rows = tasks
        .par_iter()
        .map(|&(c, k)| -> anyhow::Result<(usize, usize, String)> {
            let code = &codes[c];
            let p = ps[k];
            let physical = noise_channel(s.noise, p.unwrap_or(1.0), s.lambda.as_ref())?;
            let eff = derive_effective(code, &physical)?;
            let lam = eff.projected().lambdas();
            let mu = eff.mean().lambdas();
            let p_eff = match p {
                Some(p) if code.label() == "cluster-ring" && code.m() == 5 => num(p_eff_estimate(p)?),
                _ => "NA".to_string(),
            };
            let mut row = format!("{},{},{}", code.label(), code.m(), p.map_or("NA".to_string(), num));
            for v in lam.iter().chain(mu.iter()) {
                write!(row, ",{}", num(*v)).expect("string write");
            }
            write!(row, ",{p_eff}").expect("string write");
            Ok((code.m(), k, row))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.0, r.1));
    Ok(Output {
        csv: csv(CHANNEL_HEADER, rows.into_iter().map(|r| r.2)),
        notes: Vec::new(),
    })
}

pub fn lifetime(s: &Settings) -> anyhow::Result<Output> {
    if s.noise == NoiseKind::Custom {
        bail!(usage("lifetime scans the noise parameter; use --noise white or phase"));
    }
    let ms = s.m.clone().unwrap_or_else(|| vec![1, 3, 5, 7]);
    let codes = instantiate_all(&codes_or(s, "ghz"), &ms)?;
    let ns = s.n_grid.clone().unwrap_or_else(|| vec![4]);
    let tol = s.tol.unwrap_or(DEFAULT_LIFETIME_TOL);
    let tasks: Vec<(&StabilizerCode, usize)> = codes
        .iter()
        .flat_map(|c| ns.iter().map(move |&n| (c, n)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(code, n)| -> anyhow::Result<String> {
            let family = |p: f64| Ok(derive_effective(code, &noise_channel(s.noise, p, None)?)?.projected());
            let r = lifetime_pcrit(family, n, tol)?;
            Ok(format!(
                "{},{},{},{},{}",
                code.label(),
                code.m(),
                n,
                num(r.p_crit),
                num(r.residual)
            ))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Output {
        csv: csv(LIFETIME_HEADER, rows),
        notes: Vec::new(),
    })
}

pub fn negativity(s: &Settings) -> anyhow::Result<Output> {
    let ms = s.m.clone().unwrap_or_else(|| vec![1, 3, 5]);
    let codes = instantiate_all(&codes_or(s, "ghz"), &ms)?;
    let ns = s.n_grid.clone().unwrap_or_else(|| (2..=100).collect());
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        bail!(usage(format!("system sizes must be at least 2, got {n}")));
    }
    let p = s.p.unwrap_or(DEFAULT_NEGATIVITY_P);
    let physical = noise_channel(s.noise, p, s.lambda.as_ref())?;
    let curves = codes
        .par_iter()
        .map(|code| -> anyhow::Result<Vec<(usize, f64)>> {
            let mean = derive_effective(code, &physical)?.mean();
            ns.iter().map(|&n| Ok((n, ghz_negativity_fast(n, &mean)?))).collect()
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (code, curve) in codes.iter().zip(&curves) {
        for (n, v) in curve {
            rows.push(format!("{},{},{},{}", code.label(), code.m(), n, num(*v)));
        }
    }
    let mut notes = Vec::new();
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            if codes[i].m() != codes[j].m() || codes[i].label() == codes[j].label() {
                continue;
            }
            let crossings = curve_crossings(&curves[i], &curves[j])?;
            let found = if crossings.is_empty() {
                "none".to_string()
            } else {
                crossings.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
            };
            notes.push(format!(
                "N_crit {} vs {} (m = {}): {found}",
                codes[i].label(),
                codes[j].label(),
                codes[i].m()
            ));
        }
    }
    Ok(Output {
        csv: csv(NEGATIVITY_HEADER, rows),
        notes,
    })
}

pub fn concat(s: &Settings) -> anyhow::Result<Output> {
    if s.noise != NoiseKind::White {
        bail!(usage("critical rates are defined for white noise only"));
    }
    let m1s = s.m1.clone().unwrap_or_else(|| vec![3, 5, 7]);
    let m2s = s.m2.clone().unwrap_or_else(|| vec![3, 5, 7]);
    let tol = s.tol.unwrap_or(DEFAULT_CONCAT_TOL);
    let cells: Vec<(usize, usize)> = m1s
        .iter()
        .flat_map(|&a| m2s.iter().map(move |&b| (a, b)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(m1, m2)| critical_rate::<f64>(m1, m2, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut notes = Vec::new();
    let rows = results.iter().map(|r| {
        if !r.grid_checked {
            let brackets: Vec<String> = r.crossings.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
            notes.push(format!(
                "({}, {}): {} sign changes on the grid: {}",
                r.m1,
                r.m2,
                r.crossings.len(),
                brackets.join(" ")
            ));
        }
        format!(
            "{},{},{},{}",
            r.m1,
            r.m2,
            r.p_c.map_or("NA".to_string(), num),
            r.grid_checked
        )
    });
    let csv = csv(CONCAT_HEADER, rows.collect::<Vec<_>>());
    Ok(Output { csv, notes })
}

/// The report text and whether every check passed.
pub fn validate(s: &Settings) -> anyhow::Result<(String, bool)> {
    let mut codes = vec![StabilizerCode::trivial()];
    for m in [3, 5, 7] {
        codes.push(StabilizerCode::repetition(m)?);
        codes.push(StabilizerCode::ghz(m)?);
    }
    codes.push(StabilizerCode::cluster_ring(5)?);
    codes.push(StabilizerCode::cluster_ring(7)?);
    for sel in &s.codes {
        if let CodeSelector::File(def) = sel {
            codes.push(def.to_code()?);
        }
    }
    let mut text = String::new();
    let mut ok = true;
    for code in &codes {
        let report = code.validate();
        ok &= report.all_passed();
        write!(text, "{report}").expect("string write");
    }
    writeln!(text, "{}", if ok { "all checks passed" } else { "validation FAILED" }).expect("string write");
    Ok((text, ok))
}
