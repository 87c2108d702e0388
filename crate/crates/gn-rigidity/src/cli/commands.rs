//! Command execution: every run yields a verdict, a result table and a summary record.

use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::*;
use super::table::{Cell, Table};
use crate::constants::{
    c_coefficients, exponents, j_coefficient, prefactor_m, sharp_constant, sigma, zeta_chi,
    GNParams,
};
use crate::error::{Error, Result};
use crate::expansion::{l_series, w_series, SeriesKind, SeriesReport};
use crate::functionals::conformal_invariance_check;
use crate::functionals::profile::{uniform_grid, Boundary, RadialProfile};
use crate::geometry::scalar_curvature_at;
use crate::ranges::range_table;
use crate::specfun::{moment_closed, moment_quad, MomentSpec};
use crate::suite::{run_criterion, CRITERIA};
use crate::symmetrize::{
    dirichlet_check, norms_check, random_source, MeasuredFunction, Rearrangement, LEVELS_PER_BAND,
};
use crate::tolerances::MOMENT_QUAD_TOL;
use crate::varmin::minimize_quotient;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub pass: bool,
    pub table: Table,
    pub summary: Value,
    /// Human-readable lines, when the command has a nicer form than its table.
    pub text: Option<String>,
}

/// Side outputs that are not part of the reproducible config.
#[derive(Debug, Clone, Default)]
pub struct Artifacts<'a> {
    /// CSV dump of the final or rearranged profile.
    pub profile: Option<&'a Path>,
}

pub fn execute(cfg: &RunConfig, art: &Artifacts) -> Result<Report> {
    cfg.validate()?;
    match cfg {
        RunConfig::Constants(c) => constants(c),
        RunConfig::Ranges(c) => ranges(c),
        RunConfig::MomentsVerify(c) => moments(c),
        RunConfig::ExpansionFit(c) => expansion(c),
        RunConfig::Minimize(c) => minimize(c, art),
        RunConfig::Symmetrize(c) => symmetrize(c, art),
        RunConfig::ConformalCheck(c) => conformal(c),
        RunConfig::Suite(c) => suite(c),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

const CONSTANT_HEADERS: [&str; 22] = [
    "n",
    "alpha",
    "regime",
    "m_frak",
    "interp",
    "scale",
    "sharp_constant",
    "sigma",
    "prefactor",
    "zeta1",
    "zeta2",
    "chi",
    "c1",
    "c2",
    "c3",
    "c4",
    "c5",
    "c6",
    "c7",
    "c8",
    "j",
    "note",
];

fn constants(c: &ConstantsConfig) -> Result<Report> {
    let mut t = Table::new(&CONSTANT_HEADERS);
    let mut skipped = Vec::new();
    for &n in &c.n {
        for &a in &c.alpha {
            let p = match (ParamsConfig {
                n,
                alpha: a,
                regime: c.regime,
                m_frak: c.m_frak,
            })
            .params()
            {
                Ok(p) => p,
                Err(e) => {
                    skipped.push(json!({"n": n, "alpha": a, "reason": e.to_string()}));
                    continue;
                }
            };
            t.push(constant_row(&p));
        }
    }
    if t.rows.is_empty() {
        return Err(Error::Config("no (n, alpha) cell lies in a regime".into()));
    }
    Ok(Report {
        pass: true,
        summary: json!({"cells": t.rows.len(), "skipped": skipped}),
        table: t,
        text: None,
    })
}

fn constant_row(p: &GNParams) -> Vec<Cell> {
    let (n, a) = (p.n, p.alpha);
    let e = exponents(p);
    let mut notes = Vec::new();
    let opt = |r: Result<f64>, notes: &mut Vec<String>| match r {
        Ok(x) => Some(x),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let sharp = opt(sharp_constant(n, a, p.regime), &mut notes);
    let sg = opt(sigma(p), &mut notes);
    let pre = opt(prefactor_m(p), &mut notes);
    let (zc, cc) = match (zeta_chi(n, a), c_coefficients(n, a)) {
        (Ok(z), Ok(c)) => (Some(z), Some(c.as_array())),
        (Err(e), _) | (_, Err(e)) => {
            notes.push(e.to_string());
            (None, None)
        }
    };
    let j = opt(j_coefficient(p), &mut notes);
    let mut row: Vec<Cell> = vec![
        n.into(),
        a.into(),
        p.regime.to_string().into(),
        p.m_frak.into(),
        e.interp.into(),
        e.scale.into(),
        sharp.into(),
        sg.into(),
        pre.into(),
        zc.map(|z| z.zeta1).into(),
        zc.map(|z| z.zeta2).into(),
        zc.map(|z| z.chi).into(),
    ];
    row.extend((0..8).map(|i| Cell::from(cc.map(|c| c[i]))));
    row.push(j.into());
    notes.dedup();
    row.push(notes.join("; ").into());
    row
}

fn ranges(c: &RangesConfig) -> Result<Report> {
    let rows = range_table(&c.n)?;
    let mut t = Table::new(&["n", "case", "lo", "hi", "openness", "binding"]);
    for r in &rows {
        t.push(vec![
            r.n.into(),
            r.case.as_str().into(),
            r.lo.into(),
            r.hi.into(),
            r.openness.as_str().into(),
            r.binding.as_str().into(),
        ]);
    }
    // residuals of the root-found endpoints and of κ±
    let mut worst: f64 = 0.0;
    let mut nested = true;
    for &n in &c.n {
        use crate::ranges::{admissible_range, kappa, RangeCase};
        let get = |case| admissible_range(n, case);
        for case in RangeCase::ALL {
            worst = worst.max(get(case)?.residual);
        }
        nested &= get(RangeCase::B3)?.is_subset_of(&get(RangeCase::B2)?)
            && get(RangeCase::B2)?.is_subset_of(&get(RangeCase::B1)?)
            && get(RangeCase::A3)?.is_subset_of(&get(RangeCase::A2)?);
        for regime in [
            crate::constants::Regime::Minus,
            crate::constants::Regime::Plus,
        ] {
            worst = worst.max(kappa(n, regime)?.residual);
        }
    }
    Ok(Report {
        pass: nested && worst <= c.tol,
        summary: json!({"nested": nested, "worst_residual": worst, "tol": c.tol}),
        table: t,
        text: None,
    })
}

fn moments(c: &MomentsConfig) -> Result<Report> {
    let mut cells = Vec::new();
    let mut skipped = 0usize;
    for &n in &c.n {
        for &a in &c.alpha {
            let q2s = if c.q2.is_empty() {
                vec![
                    (a + 1.0) / (1.0 - a),
                    2.0 * a / (1.0 - a),
                    2.0 / (1.0 - a),
                    2.0 * a / (1.0 - a) + 2.0,
                ]
            } else {
                c.q2.clone()
            };
            for &q1 in &c.q1 {
                for &q2 in &q2s {
                    let s = MomentSpec::new(q1, q2);
                    if s.validate(n, a).is_ok() {
                        cells.push((n, a, s));
                    } else {
                        skipped += 1;
                    }
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Config("no convergent moment in the sweep".into()));
    }
    let qtol = (c.tol * 1e-3).clamp(1e-14, MOMENT_QUAD_TOL);
    let vals: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&(n, a, s)| Ok((moment_closed(n, a, s)?, moment_quad(n, a, s, qtol)?)))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "n",
        "alpha",
        "q1",
        "q2",
        "closed",
        "quadrature",
        "rel",
        "pass",
    ]);
    let mut worst: f64 = 0.0;
    for (&(n, a, s), &(cl, qd)) in cells.iter().zip(&vals) {
        let e = rel(qd, cl);
        worst = worst.max(e);
        t.push(vec![
            n.into(),
            a.into(),
            s.q1.into(),
            s.q2.into(),
            cl.into(),
            qd.into(),
            e.into(),
            (e <= c.tol).into(),
        ]);
    }
    Ok(Report {
        pass: worst <= c.tol,
        summary: json!({"cells": cells.len(), "skipped": skipped, "worst_rel": worst, "tol": c.tol}),
        table: t,
        text: None,
    })
}

fn expansion(c: &FitConfig) -> Result<Report> {
    let p = c.params.params()?;
    let m = c.metric.metric(p.n)?;
    let grid = c.grid.grid()?;
    let reports: Vec<SeriesReport> = c
        .series
        .par_iter()
        .map(|k| match k {
            SeriesKind::L => l_series(&p, &m, c.a_choice, grid, c.r0),
            SeriesKind::W => w_series(&p, &m, grid, c.r0),
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "series",
        "c0",
        "c1",
        "c2",
        "predicted_c1",
        "predicted_c2",
        "rel_c1",
        "rel_c2",
        "degree",
        "stability",
        "t_max",
        "t_count",
        "pass",
    ]);
    let mut pass = true;
    for r in &reports {
        let ok = r.rel[0] <= c.tol_c1 && r.rel[1] <= c.tol_c2;
        pass &= ok;
        t.push(vec![
            format!("{:?}", r.kind).into(),
            r.fit.c0.into(),
            r.fit.c1.into(),
            r.fit.c2.into(),
            r.predicted[0].into(),
            r.predicted[1].into(),
            r.rel[0].into(),
            r.rel[1].into(),
            r.fit.degree.into(),
            r.fit.stability.into(),
            r.grid.t_max.into(),
            r.grid.count.into(),
            ok.into(),
        ]);
    }
    let specs: Vec<Value> = reports
        .iter()
        .map(|r| json!({"series": r.kind, "spec": r.spec, "grid": r.grid, "samples": r.fit.t_samples}))
        .collect();
    Ok(Report {
        pass,
        summary: json!({"metric": m.label(), "fits": specs}),
        table: t,
        text: None,
    })
}

fn minimize(c: &MinimizeRun, art: &Artifacts) -> Result<Report> {
    let p = c.params.params()?;
    let m = c.metric.metric(p.n)?;
    let res = minimize_quotient(&m, &p, &c.minimize)?;
    if let Some(path) = art.profile {
        res.profile.to_csv(path)?;
    }
    let sharp = sharp_constant(p.n, p.alpha, p.regime)?;
    let gap = (res.value - sharp) / sharp;
    let pass = if m.is_euclidean() {
        res.converged && gap.abs() <= c.tol
    } else {
        res.converged
    };
    let mut t = Table::new(&[
        "n",
        "alpha",
        "regime",
        "metric",
        "value",
        "sharp_constant",
        "rel_gap",
        "iterations",
        "converged",
        "pass",
    ]);
    t.push(vec![
        p.n.into(),
        p.alpha.into(),
        p.regime.to_string().into(),
        m.label().into(),
        res.value.into(),
        sharp.into(),
        gap.into(),
        res.iterations.into(),
        res.converged.into(),
        pass.into(),
    ]);
    Ok(Report {
        pass,
        summary: json!({"result": res, "sharp_constant": sharp, "rel_gap": gap}),
        table: t,
        text: None,
    })
}

fn symmetrize(c: &SymmetrizeConfig, art: &Artifacts) -> Result<Report> {
    let target = c.target.metric(c.n)?;
    let f = match &c.source {
        SourceConfig::Random { seed, nodes, r_end } => {
            MeasuredFunction::radial(random_source(*seed, *r_end, *nodes)?, c.metric.metric(c.n)?)?
        }
        SourceConfig::Profile { path } => MeasuredFunction::radial(
            RadialProfile::from_csv(Path::new(path))?,
            c.metric.metric(c.n)?,
        )?,
        SourceConfig::Histogram { path } => MeasuredFunction::histogram_from_csv(Path::new(path))?,
    };
    let top = match &f {
        MeasuredFunction::RadialGrid(p, _) => p.values().iter().fold(0.0f64, |a, &b| a.max(b)),
        MeasuredFunction::Histogram(h) => h.iter().fold(0.0f64, |a, e| a.max(e.0)),
    };
    let ub = Rearrangement::new(&f, &target)?;
    if let Some(path) = art.profile {
        ub.profile(LEVELS_PER_BAND)?.to_csv(path)?;
    }
    let mut t = Table::new(&["check", "parameter", "source", "rearranged", "rel", "pass"]);
    let mut pass = true;
    let mut level_worst: f64 = 0.0;
    for k in 0..c.levels {
        let s = top * (k as f64 + 0.5) / c.levels as f64;
        level_worst = level_worst.max(rel(ub.target_distribution(s), ub.distribution(s)));
    }
    pass &= level_worst <= c.tol;
    t.push(vec![
        "levels".into(),
        c.levels.into(),
        None.into(),
        None.into(),
        level_worst.into(),
        (level_worst <= c.tol).into(),
    ]);
    for &q in &c.q {
        let (l, r) = norms_check(&f, &ub, q)?;
        let e = rel(r, l);
        pass &= e <= c.tol;
        t.push(vec![
            "norm".into(),
            q.into(),
            l.into(),
            r.into(),
            e.into(),
            (e <= c.tol).into(),
        ]);
    }
    match dirichlet_check(&f, &ub) {
        Ok((ef, eu)) => {
            let excess = (eu - ef) / ef;
            pass &= excess <= c.tol;
            t.push(vec![
                "energy".into(),
                None.into(),
                ef.into(),
                eu.into(),
                excess.into(),
                (excess <= c.tol).into(),
            ]);
        }
        // histograms and step profiles carry no energy
        Err(Error::Representation(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(Report {
        pass,
        summary: json!({
            "target": target.label(),
            "support_volume": ub.support_volume(),
            "support_radius": ub.support_radius(),
            "top": top,
        }),
        table: t,
        text: None,
    })
}

fn conformal(c: &ConformalConfig) -> Result<Report> {
    let m = c.metric.metric(c.n)?;
    let lo =
        c.lo.unwrap_or_else(|| (m.r_min() * 1.1).max(m.r_max * 1e-3));
    let hi = c.hi.unwrap_or(m.r_max);
    if !(lo >= m.r_min() && hi > lo && hi <= m.r_max) {
        return Err(Error::Config(format!(
            "test support [{lo}, {hi}] must lie in [{}, {}]",
            m.r_min(),
            m.r_max
        )));
    }
    let phi = RadialProfile::sample(
        |r: f64| ((r - lo) * (hi - r)).max(0.0).powf(c.power),
        uniform_grid(lo, hi, c.nodes),
        Boundary::CompactSupport,
    )?;
    let chk = conformal_invariance_check(&phi, &m)?;
    let e = (chk.diff / chk.lhs).abs();
    let sc_max = (0..50)
        .map(|j| scalar_curvature_at(&m, lo + (hi - lo) * (j as f64 + 0.5) / 50.0).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    let mut t = Table::new(&[
        "metric",
        "lo",
        "hi",
        "lhs",
        "rhs",
        "rel",
        "max_abs_sc",
        "pass",
    ]);
    t.push(vec![
        m.label().into(),
        lo.into(),
        hi.into(),
        chk.lhs.into(),
        chk.rhs.into(),
        e.into(),
        sc_max.into(),
        (e <= c.tol).into(),
    ]);
    Ok(Report {
        pass: e <= c.tol,
        summary: json!({"check": chk}),
        table: t,
        text: None,
    })
}

fn suite(c: &SuiteConfig) -> Result<Report> {
    let ids: Vec<usize> = if c.only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        c.only.clone()
    };
    let mut t = Table::new(&[
        "id",
        "name",
        "pass",
        "cells",
        "worst",
        "tolerance",
        "seconds",
        "budget_seconds",
        "detail",
    ]);
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let mut pass = true;
    for id in ids {
        match run_criterion(id, c.quick) {
            Ok(r) => {
                pass &= r.pass;
                lines.push(r.line());
                t.push(vec![
                    r.id.into(),
                    r.name.into(),
                    r.pass.into(),
                    r.cells.into(),
                    r.worst.into(),
                    r.tolerance.into(),
                    r.seconds.into(),
                    r.budget_seconds.into(),
                    r.detail.as_str().into(),
                ]);
                reports.push(serde_json::to_value(&r).expect("report serializes"));
            }
            Err(e) => {
                pass = false;
                let name = CRITERIA.iter().find(|c| c.0 == id).map_or("", |c| c.1);
                lines.push(format!("[FAIL] {id:>2} {name:<28} error: {e}"));
                t.push(vec![
                    id.into(),
                    name.into(),
                    false.into(),
                    0usize.into(),
                    None.into(),
                    None.into(),
                    None.into(),
                    None.into(),
                    e.to_string().into(),
                ]);
                reports.push(json!({"id": id, "error": e.to_string()}));
            }
        }
    }
    let passed = t.rows.iter().filter(|r| r[2] == Cell::Bool(true)).count();
    lines.push(format!("{passed} of {} criteria pass", t.rows.len()));
    Ok(Report {
        pass,
        summary: json!({"criteria": reports}),
        table: t,
        text: Some(lines.join("\n") + "\n"),
    })
}
