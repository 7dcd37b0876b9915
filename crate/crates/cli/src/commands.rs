//! Subcommand bodies. Each returns an `Outcome`; rendering happens in main.

use std::collections::BTreeMap;

use rootshell::exact;
use rootshell::exponent::{
    check_s_identities, check_s_lower_bound, default_spectral_n, exponent_table, log_exponent_from_table, log_exponent_k,
    spectral_integral, verify_power_k,
};
use rootshell::geometry::{
    anker_upper_check, brion_consequence_check, inverse_check, mc_intersection_ratio, triangle_check, ShellSpec,
};
use rootshell::harmonic::{
    gv_decay, spherical_mc, time_average_lower_bound, verify_cx_bound, verify_sph_bound, MajorantParams, Rank1Group,
    SpectralGrid,
};
use rootshell::semidense::{
    check_semidense_capped, extremal_coweights, generators_label, levi_of_nodes, phi0_from_nodes, scan_extremal_classical,
    scan_row, verify_exceptional_failures, weyl_table,
};
use rootshell::subsystems::{classify_type, type_string};
use rootshell::{CartanType, E6Model, Form, RootSystem, SubsystemMask};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{
    Along, Cmd, CliError, E6Arg, ExponentCmd, Expect, FormArg, GroupArg, LeviArgs, McCmd, SemidenseCmd, ShellArgs, SphericalCmd,
    SysArgs, TablesCmd,
};

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
}

pub struct Outcome {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub verdicts: BTreeMap<String, bool>,
    pub summary: Vec<String>,
    pub table: Option<Table>,
}

impl Outcome {
    fn new(command: &str, parameters: Value) -> Self {
        Self {
            command: command.into(),
            parameters,
            results: Value::Null,
            verdicts: BTreeMap::new(),
            summary: Vec::new(),
            table: None,
        }
    }
    fn verdict(&mut self, key: &str, v: bool) {
        self.verdicts.insert(key.into(), v);
    }
}

type Res = Result<Outcome, CliError>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn qstr(v: &[rootshell::Q]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}

fn spread(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

pub fn build_system(a: &SysArgs) -> Result<RootSystem, CliError> {
    let t = CartanType::from_char(a.ty).ok_or_else(|| CliError::Usage(format!("unknown type {}", a.ty)))?;
    let form = match a.form {
        FormArg::Split => Form::Split,
        FormArg::Complex => Form::Complex,
    };
    let e6 = match a.e6_model {
        E6Arg::InE8 => E6Model::InE8,
        E6Arg::TripleA2 => E6Model::TripleA2,
    };
    Ok(RootSystem::with_e6_model(t, a.rank, form, e6)?)
}

/// 1-based node list to 0-based, with range and duplicate checks.
fn zero_based(rs: &RootSystem, nodes: &[usize]) -> Result<Vec<usize>, CliError> {
    let mut out: Vec<usize> = Vec::with_capacity(nodes.len());
    for &n in nodes {
        if n == 0 || n > rs.rank() {
            return Err(CliError::Usage(format!("node {n} outside 1..={}", rs.rank())));
        }
        if out.contains(&(n - 1)) {
            return Err(CliError::Usage(format!("node {n} repeated")));
        }
        out.push(n - 1);
    }
    Ok(out)
}

fn one_based(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|n| n + 1).collect()
}

pub fn dispatch(cmd: &Cmd, seed: u64) -> Res {
    match cmd {
        Cmd::Rootsys(a) => rootsys(a),
        Cmd::Semidense(c) => semidense(c),
        Cmd::Tables(TablesCmd::Weyl { rank }) => tables_weyl(*rank),
        Cmd::Exponent(c) => exponent(c),
        Cmd::Spherical(c) => spherical(c, seed),
        Cmd::Mc(c) => mc(c, seed),
    }
}

fn rootsys(a: &SysArgs) -> Res {
    let rs = build_system(a)?;
    let mut out = Outcome::new("rootsys", to_value(a));
    let w0 = rs.longest_element();
    let extremal = one_based(&extremal_coweights(&rs)?);
    let simple: Vec<Vec<String>> = rs.simple_roots().into_iter().map(|i| qstr(rs.root(i))).collect();
    let coweights: Vec<Vec<String>> = rs.fundamental_coweights().iter().map(|v| qstr(v)).collect();
    let w0_word: Vec<usize> = w0.word.iter().map(|&i| i as usize + 1).collect();
    out.results = json!({
        "label": rs.label(),
        "rank": rs.rank(),
        "ambient_dim": rs.ambient_dim(),
        "roots": rs.num_roots(),
        "positive_roots": rs.num_positive(),
        "weyl_order": rs.weyl_order().to_string(),
        "rho": qstr(&rs.rho()),
        "simple_roots": simple,
        "fundamental_coweights": coweights,
        "w0_word": w0_word,
        "w0_length": w0.word.len(),
        "extremal_nodes": extremal,
    });
    out.verdict("w0_length_is_positive_count", w0.word.len() == rs.num_positive());
    out.verdict("model_valid", rs.validate().is_ok());
    out.summary = vec![
        format!("{}: {} roots, {} positive, |W| = {}", rs.label(), rs.num_roots(), rs.num_positive(), rs.weyl_order()),
        format!("rho = ({})", qstr(&rs.rho()).join(", ")),
        format!("w0 = s{:?} (length {})", w0_word, w0.word.len()),
        format!("extremal coweights at nodes {:?}", extremal),
    ];
    Ok(out)
}

fn semidense(c: &SemidenseCmd) -> Res {
    match c {
        SemidenseCmd::Check { sys, nodes, cap, expect } => {
            let rs = build_system(sys)?;
            let nodes0 = zero_based(&rs, nodes)?;
            let phi0 = phi0_from_nodes(&rs, &nodes0);
            let v = check_semidense_capped(&rs, &phi0, *cap)?;
            let phi0_type = type_string(&classify_type(&rs, &phi0.members)?);
            let mut out = Outcome::new("semidense check", json!({"system": to_value(sys), "nodes": nodes, "cap": cap, "expect": to_value(expect)}));
            out.summary.push(format!(
                "{} with Phi0 = {} ({}, {} roots): {}",
                rs.label(),
                phi0_type,
                generators_label(&phi0),
                phi0.len(),
                if v.holds { "semi-dense" } else { "not semi-dense" }
            ));
            if let Some(w) = &v.witness {
                out.summary.push(format!(
                    "witness: Psi on nodes {:?} (|Psi| = {}, rank {}), |Psi ∩ wPhi0| = {}, w = s{:?}",
                    one_based(&w.psi_nodes),
                    w.psi_size,
                    w.psi_rank,
                    w.intersection,
                    one_based(&w.w_word.iter().map(|&i| i as usize).collect::<Vec<_>>())
                ));
            }
            out.summary.push(format!("orbit {}, {} standard Psi, min slack {}", v.orbit_size, v.psi_count, v.min_slack));
            if let Some(e) = expect {
                out.verdict("expected", v.holds == matches!(e, Expect::Holds));
            }
            out.results = json!({"phi0_type": phi0_type, "phi0_roots": phi0.len(), "verdict": to_value(&v)});
            Ok(out)
        }
        SemidenseCmd::Scan { max_rank, skip_e7 } => {
            if *max_rank < 2 {
                return Err(CliError::Usage("--max-rank must be at least 2".into()));
            }
            let mut rows = scan_extremal_classical(*max_rank)?;
            if !skip_e7 {
                let e7 = RootSystem::split(CartanType::E, 7)?;
                for node in extremal_coweights(&e7)? {
                    rows.push(scan_row(&e7, node)?);
                }
            }
            let mut out = Outcome::new("semidense scan", json!({"max_rank": max_rank, "skip_e7": skip_e7}));
            let mut table = Table::new(&["system", "node", "phi0", "roots", "phi0_roots", "base_inequality", "holds", "orbit", "min_slack"]);
            for r in &rows {
                table.rows.push(vec![
                    r.label.clone(),
                    (r.node + 1).to_string(),
                    r.phi0_type.clone(),
                    r.roots.to_string(),
                    r.phi0_roots.to_string(),
                    r.base_inequality.to_string(),
                    r.holds.to_string(),
                    r.orbit_size.to_string(),
                    r.min_slack.to_string(),
                ]);
                out.summary.push(format!(
                    "{:<4} node {} {:<8} holds={} min_slack={}",
                    r.label,
                    r.node + 1,
                    r.phi0_type,
                    r.holds,
                    r.min_slack
                ));
            }
            out.verdict("all_semidense", rows.iter().all(|r| r.holds));
            out.results = json!({"rows": to_value(&rows)});
            out.table = Some(table);
            Ok(out)
        }
        SemidenseCmd::Exceptional => {
            let rep = verify_exceptional_failures()?;
            let mut out = Outcome::new("semidense exceptional", json!({}));
            let mut table = Table::new(&["system", "phi0", "removed_node", "method", "intersection", "psi_rank", "psi_size", "fails"]);
            for e in &rep.entries {
                table.rows.push(vec![
                    e.system.clone(),
                    e.phi0_type.clone(),
                    (e.removed_node + 1).to_string(),
                    e.method.clone(),
                    e.intersection.to_string(),
                    e.psi_rank.to_string(),
                    e.psi_size.to_string(),
                    e.fails.to_string(),
                ]);
                out.summary.push(format!(
                    "{} / {} ({}): |Psi ∩ wPhi0| = {}, rank {}, |Psi| = {} -> {}",
                    e.system,
                    e.phi0_type,
                    e.method,
                    e.intersection,
                    e.psi_rank,
                    e.psi_size,
                    if e.fails { "fails" } else { "does not fail" }
                ));
            }
            for (sys, phi0, holds, slack) in &rep.full_checks {
                out.summary.push(format!("{sys} / {phi0}: full standard check holds={holds}, min slack {slack}"));
            }
            out.verdict("all_fail", rep.entries.iter().all(|e| e.fails));
            out.results = to_value(&rep);
            out.table = Some(table);
            Ok(out)
        }
    }
}

fn tables_weyl(rank: usize) -> Res {
    let rows = weyl_table(rank)?;
    let mut out = Outcome::new("tables weyl", json!({"rank": rank}));
    let mut table = Table::new(&["system", "node", "W", "W_M", "W/W_M", "roots", "roots_M", "positive_outside", "coset_identity", "matches"]);
    for c in &rows {
        let r = &c.row;
        table.rows.push(vec![
            r.label.clone(),
            (r.node + 1).to_string(),
            r.weyl.to_string(),
            r.weyl_m.to_string(),
            r.cosets.to_string(),
            r.roots.to_string(),
            r.roots_m.to_string(),
            r.positive_outside.to_string(),
            r.coset_identity.to_string(),
            c.matches.to_string(),
        ]);
        out.summary.push(format!(
            "{:<4} node {}  |W| = {:>10}  |W_M| = {:>8}  |W/W_M| = {:>4}  |Phi| = {:>3}  |Phi_M| = {:>3}  {}",
            r.label,
            r.node + 1,
            r.weyl,
            r.weyl_m,
            r.cosets,
            r.roots,
            r.roots_m,
            if c.matches { "ok" } else { "MISMATCH" }
        ));
    }
    out.verdict("reference_values", rows.iter().all(|c| c.matches));
    // |W/W_M| = |Φ⁺ ∖ Φ⁺_M| + 1 holds exactly for the A, B, C and G2 rows.
    let pattern = rows.iter().all(|c| c.row.coset_identity == c.row.label.starts_with(['A', 'B', 'C', 'G']));
    out.verdict("coset_identity_pattern", pattern);
    out.results = json!({"rows": to_value(&rows)});
    out.table = Some(table);
    Ok(out)
}

/// The Levi M and the coweight H0 it centralises.
fn resolve_levi(a: &LeviArgs) -> Result<(RootSystem, SubsystemMask, Vec<f64>), CliError> {
    let rs = build_system(&a.sys)?;
    let removed: Vec<usize> = match (&a.nodes, a.node) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --nodes or --node, not both".into())),
        (Some(nodes), None) => {
            let keep = zero_based(&rs, nodes)?;
            (0..rs.rank()).filter(|i| !keep.contains(i)).collect()
        }
        (None, Some(n)) => zero_based(&rs, &[n])?,
        (None, None) => vec![extremal_coweights(&rs)?[0]],
    };
    if removed.is_empty() {
        return Err(CliError::Usage("M must be a proper Levi".into()));
    }
    let m = levi_of_nodes(&rs, &removed);
    let mut h0 = vec![0.0; rs.ambient_dim()];
    for &i in &removed {
        for (x, c) in h0.iter_mut().zip(exact::to_f64(&rs.fundamental_coweights()[i])) {
            *x += c;
        }
    }
    Ok((rs, m, h0))
}

fn levi_label(rs: &RootSystem, m: &SubsystemMask) -> Result<String, CliError> {
    Ok(type_string(&classify_type(rs, &m.members)?))
}

fn triple_json(t: &(Vec<usize>, usize, usize)) -> Value {
    json!({"sigma": one_based(&t.0), "l": t.1, "w_index": t.2})
}

fn exponent(c: &ExponentCmd) -> Res {
    match c {
        ExponentCmd::K(a) => {
            let (rs, m, _) = resolve_levi(a)?;
            let label = levi_label(&rs, &m)?;
            let mut out = Outcome::new("exponent k", to_value(a));
            match log_exponent_k(&rs, &m) {
                Ok(k) => {
                    out.summary.push(format!("{} with M = {}: k = {} (k# = {})", rs.label(), label, k.k, k.k_sharp));
                    out.results = json!({
                        "system": rs.label(), "m": label, "k": k.k, "k_sharp": k.k_sharp,
                        "argmax": triple_json(&k.argmax), "argmax_sharp": triple_json(&k.argmax_sharp),
                    });
                    out.verdict("semidense", true);
                }
                Err(rootshell::Error::NotSemidense { sigma, i, w }) => {
                    out.summary.push(format!("{} with M = {}: not semi-dense at sigma {:?}, i = {i}, w = {w}", rs.label(), label, one_based(&sigma)));
                    out.results = json!({"system": rs.label(), "m": label, "violation": {"sigma": one_based(&sigma), "i": i, "w_index": w}});
                    out.verdict("semidense", false);
                }
                Err(e) => return Err(e.into()),
            }
            Ok(out)
        }
        ExponentCmd::Table(a) => {
            let (rs, m, _) = resolve_levi(a)?;
            let tbl = exponent_table(&rs, &m)?;
            let ids = check_s_identities(&tbl);
            let lower = check_s_lower_bound(&tbl);
            let mut out = Outcome::new("exponent table", to_value(a));
            let mut table = Table::new(&["sigma", "i_or_l", "w_index", "n", "s", "S", "e"]);
            for row in &tbl.rows {
                let sigma = one_based(&row.sigma).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                for i in 0..=tbl.rank {
                    let (n, s) = if i == 0 { (String::new(), String::new()) } else { (row.n[i - 1].to_string(), row.s[i - 1].to_string()) };
                    table.rows.push(vec![sigma.clone(), i.to_string(), row.w_index.to_string(), n, s, row.big_s[i].to_string(), row.e[i].to_string()]);
                }
            }
            let k = log_exponent_from_table(&tbl).ok();
            let label = levi_label(&rs, &m)?;
            out.summary.push(format!("{} with M = {} ({}): {} rows, {} (sigma, i, w) cells", tbl.label, label, tbl.m_label, tbl.rows.len(), table.rows.len()));
            out.summary.push(format!("identities: {} checks, {} violations", ids.checks, ids.violations.len()));
            out.summary.push(format!("lower bound S + r >= i: {} checks, {} violations", lower.checks, lower.violations.len()));
            if let Some(k) = &k {
                out.summary.push(format!("k = {}, k# = {}", k.k, k.k_sharp));
            }
            out.verdict("identities", ids.pass);
            out.verdict("lower_bound", lower.pass);
            let first = |r: &rootshell::exponent::IdentityReport| to_value(&r.violations.iter().take(20).collect::<Vec<_>>());
            out.results = json!({
                "system": tbl.label, "m": label, "m_generators": tbl.m_label, "rows": tbl.rows.len(), "cells": table.rows.len(),
                "identities": {"checks": ids.checks, "violations": ids.violations.len(), "first": first(&ids)},
                "lower_bound": {"checks": lower.checks, "violations": lower.violations.len(), "first": first(&lower)},
                "k": k.as_ref().map(|k| k.k), "k_sharp": k.as_ref().map(|k| k.k_sharp),
            });
            out.table = Some(table);
            Ok(out)
        }
        ExponentCmd::Verify { levi, t, variation, spectral, spectral_t, h_frac, spread: spread_limit } => {
            let (rs, m, h0) = resolve_levi(levi)?;
            let label = levi_label(&rs, &m)?;
            let mut out = Outcome::new(
                "exponent verify",
                json!({"levi": to_value(levi), "t": t, "variation": variation, "spectral": spectral, "spectral_t": spectral_t, "h_frac": h_frac, "spread": spread_limit}),
            );
            if t.iter().any(|&x| !(x > 1.0)) {
                return Err(CliError::Usage("every t must exceed 1".into()));
            }
            let stated = verify_power_k(&rs, &m, t, false)?;
            let sharp = verify_power_k(&rs, &m, t, true)?;
            let mut table = Table::new(&["kind", "t", "ratio"]);
            for (name, rep) in [("stated", &stated), ("sharp", &sharp)] {
                let ratios: Vec<String> = rep.points.iter().map(|p| format!("{:.4e}", p.max_ratio)).collect();
                out.summary.push(format!("{name}: max I/(log t)^k over t = [{}], variation {:.3}", ratios.join(", "), rep.variation));
                for p in &rep.points {
                    table.rows.push(vec![name.into(), p.t.to_string(), format!("{:e}", p.max_ratio)]);
                }
                out.verdict(&format!("power_k_{name}"), rep.bounded && rep.variation <= *variation);
            }
            let mut results = json!({"system": rs.label(), "m": label, "stated": to_value(&stated), "sharp": to_value(&sharp)});
            if *spectral {
                if rs.rank() > 2 {
                    return Err(CliError::Usage("the spectral integral is available in rank ≤ 2".into()));
                }
                if spectral_t.iter().any(|&x| !(x > 1.0)) {
                    return Err(CliError::Usage("every spectral t must exceed 1".into()));
                }
                let k = log_exponent_k(&rs, &m)?;
                let n = default_spectral_n(&rs);
                let mut pts = Vec::new();
                for &tt in spectral_t {
                    let h: Vec<f64> = h0.iter().map(|x| x * tt * h_frac).collect();
                    let v = spectral_integral(&rs, &h0, tt, &h, n)?;
                    let ratio = v / tt.ln().powi(k.k as i32);
                    table.rows.push(vec!["spectral".into(), tt.to_string(), format!("{ratio:e}")]);
                    pts.push(json!({"t": tt, "value": v, "ratio": ratio}));
                }
                let ratios: Vec<f64> = pts.iter().map(|p| p["ratio"].as_f64().unwrap_or(f64::NAN)).collect();
                let s = spread(&ratios);
                out.summary.push(format!(
                    "spectral integral / (log t)^{}: [{}], spread {:.3}",
                    k.k,
                    ratios.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>().join(", "),
                    s
                ));
                out.verdict("spectral_power_k", s < *spread_limit);
                results["spectral"] = json!({"k": k.k, "n": n, "points": pts, "spread": s});
            }
            out.results = results;
            out.table = Some(table);
            Ok(out)
        }
    }
}

fn rank1(g: GroupArg) -> Result<Rank1Group, CliError> {
    match g {
        GroupArg::Sl2r => Ok(Rank1Group::Sl2r),
        GroupArg::Sl2c => Ok(Rank1Group::Sl2c),
        GroupArg::Sl3 => Err(CliError::Usage("this command supports sl2r and sl2c".into())),
    }
}

fn spherical(c: &SphericalCmd, seed: u64) -> Res {
    match c {
        SphericalCmd::Eval { group, lambda, t, h, samples } => {
            let mut out = Outcome::new(
                "spherical eval",
                json!({"group": to_value(group), "lambda": lambda.iter().map(|l| [l.re, l.im]).collect::<Vec<_>>(), "t": t, "H": h, "samples": samples}),
            );
            let mut table = Table::new(&["lambda_re", "lambda_im", "t", "re", "im", "stderr"]);
            let mut points = Vec::new();
            if *group == GroupArg::Sl3 {
                let h = h.as_ref().ok_or_else(|| CliError::Usage("sl3 needs --H".into()))?;
                if lambda.len() != 3 || h.len() != 3 {
                    return Err(CliError::Usage("sl3 needs three λ entries and three H entries".into()));
                }
                let (v, se) = spherical_mc(3, lambda, h, *samples, seed)?;
                table.rows.push(vec![String::new(), String::new(), String::new(), format!("{:e}", v.re), format!("{:e}", v.im), format!("{se:e}")]);
                out.summary.push(format!("phi_lambda(exp H) = {:.6e} {:+.6e}i (stderr {se:.2e})", v.re, v.im));
                points.push(json!({"value": [v.re, v.im], "stderr": se}));
            } else {
                let g = rank1(*group)?;
                for l in lambda {
                    for &tt in t {
                        let v = g.spherical(*l, tt)?;
                        table.rows.push(vec![l.re.to_string(), l.im.to_string(), tt.to_string(), format!("{:e}", v.re), format!("{:e}", v.im), String::new()]);
                        out.summary.push(format!("lambda = {l}, t = {tt}: {:.12e} {:+.12e}i", v.re, v.im));
                        points.push(json!({"lambda": [l.re, l.im], "t": tt, "value": [v.re, v.im]}));
                    }
                }
            }
            let finite = points.iter().all(|p| p["value"].as_array().is_some_and(|a| a.iter().all(|x| x.as_f64().is_some_and(f64::is_finite))));
            out.verdict("finite", finite);
            out.results = json!({"points": points});
            out.table = Some(table);
            Ok(out)
        }
        SphericalCmd::VerifyBd { group, lambda_grid, im_grid, t_grid, a, kappa, limit } => {
            let g = rank1(*group)?;
            let params = MajorantParams::new(*a, *kappa, *limit)?;
            let grid = SpectralGrid { re: *lambda_grid, im: *im_grid, t: *t_grid };
            let rep = verify_sph_bound(g, &grid, params)?;
            let mut out = Outcome::new("spherical verify-bd", json!({"group": to_value(group), "grid": to_value(&grid), "params": to_value(&params)}));
            out.summary.push(format!(
                "{:?}: sup |phi|/majorant = {:.4} over {} points at (Re λ, Im λ, t) = {:?}, limit {}",
                g, rep.sup_ratio, rep.points, rep.argmax_point, limit
            ));
            out.verdict("bound", rep.pass);
            out.results = to_value(&rep);
            Ok(out)
        }
        SphericalCmd::VerifyCx { lambda_grid, t_grid, lower, upper } => {
            let rep = verify_cx_bound(*lambda_grid, *t_grid, *lower, *upper)?;
            let mut out = Outcome::new("spherical verify-cx", json!({"lambda_grid": to_value(lambda_grid), "t_grid": to_value(t_grid), "lower": lower, "upper": upper}));
            out.summary.push(format!("sup ratio {:.4} at {:?}; inf on tλ ≤ 1: {:.4} at {:?}", rep.sup_ratio, rep.argmax_point, rep.inf_ratio_stationary, rep.argmin_point));
            out.verdict("two_sided", rep.pass);
            out.results = to_value(&rep);
            Ok(out)
        }
        SphericalCmd::Lowerbound { lambda_grid, tau, eps0, threshold } => {
            let lambdas = lambda_grid.values();
            let rep = time_average_lower_bound(&lambdas, tau, *eps0, *threshold)?;
            let mut out = Outcome::new("spherical lowerbound", json!({"lambda_grid": to_value(lambda_grid), "tau": tau, "eps0": eps0, "threshold": threshold}));
            out.summary.push(format!("min time average {:.4e} (threshold {})", rep.min_average, threshold));
            out.summary.push(format!("tau·|off-diagonal| spread {:.3}, ball margin {:.3}", rep.off_diagonal_spread, rep.ball_margin));
            let mut table = Table::new(&["lambda", "tau", "average", "diagonal", "off_diagonal"]);
            for p in &rep.points {
                table.rows.push(vec![p.lambda.to_string(), p.tau.to_string(), format!("{:e}", p.average), format!("{:e}", p.diagonal), format!("{:e}", p.off_diagonal)]);
            }
            out.verdict("lower_bound", rep.pass);
            out.results = to_value(&rep);
            out.table = Some(table);
            Ok(out)
        }
        SphericalCmd::Gv { lambda, t_grid, rate } => {
            let ts = t_grid.values();
            let mut out = Outcome::new("spherical gv", json!({"lambda": lambda, "t_grid": to_value(t_grid), "rate": rate}));
            let mut table = Table::new(&["lambda", "t", "residual", "scaled"]);
            let mut reps = Vec::new();
            for &l in lambda {
                let rep = gv_decay(l, &ts, *rate)?;
                for (term, s) in rep.terms.iter().zip(&rep.scaled) {
                    table.rows.push(vec![l.to_string(), term.t.to_string(), format!("{:e}", term.residual), format!("{s:e}")]);
                }
                let max_scaled = rep.scaled.iter().cloned().fold(0.0, f64::max);
                out.summary.push(format!("lambda = {l}: residual·e^({rate}t) max {max_scaled:.3e}, first {:.3e}", rep.scaled[0]));
                out.verdict(&format!("decay_lambda_{l}"), rep.pass);
                reps.push(rep);
            }
            out.results = json!({"reports": to_value(&reps)});
            out.table = Some(table);
            Ok(out)
        }
    }
}

fn shell_spec(s: &ShellArgs, t: f64) -> Result<ShellSpec, CliError> {
    if !(2..=3).contains(&s.n) {
        return Err(CliError::Usage("--n must be 2 or 3".into()));
    }
    Ok(match &s.h0 {
        Some(h0) => {
            if h0.len() != s.n {
                return Err(CliError::Usage(format!("--H0 needs {} entries", s.n)));
            }
            ShellSpec::new(h0.clone(), s.eps0, t)?
        }
        None => {
            if s.node == 0 || s.node >= s.n {
                return Err(CliError::Usage(format!("--node must lie in 1..={}", s.n - 1)));
            }
            ShellSpec::extremal(s.n, s.node - 1, s.eps0, t)?
        }
    })
}

/// Direction of the H sweep: H0 itself or the apex H0 − w0H0.
fn direction(spec: &ShellSpec, along: Along) -> Vec<f64> {
    match along {
        Along::H0 => spec.h0.clone(),
        Along::Apex => spec.h0.iter().zip(spec.h0.iter().rev()).map(|(a, b)| a - b).collect(),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn mc(c: &McCmd, seed: u64) -> Res {
    match c {
        McCmd::Intersect { shell, t, h, h_frac, along, spread: spread_limit } => {
            let mut out = Outcome::new(
                "mc intersect",
                json!({"shell": to_value(shell), "t": t, "H": h, "h_frac": h_frac, "along": to_value(along), "spread": spread_limit}),
            );
            let families: Vec<Option<f64>> = if h.is_some() { vec![None] } else { h_frac.iter().map(|f| Some(*f)).collect() };
            let mut table = Table::new(&["t", "h_frac", "H", "hits", "ratio", "stderr", "norm_p", "bound_quotient"]);
            let mut reports = Vec::new();
            let mut by_family: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
            for &tt in t {
                let spec = shell_spec(shell, tt)?;
                let dir = direction(&spec, *along);
                for (fi, fam) in families.iter().enumerate() {
                    let hv: Vec<f64> = match (fam, h) {
                        (Some(f), _) => dir.iter().map(|x| x * f * tt).collect(),
                        (None, Some(h)) => h.clone(),
                        (None, None) => unreachable!(),
                    };
                    let rep = mc_intersection_ratio(&spec, &hv, shell.samples, seed)?;
                    table.rows.push(vec![
                        tt.to_string(),
                        fam.map(|f| f.to_string()).unwrap_or_default(),
                        fmt_vec(&hv),
                        rep.hits.to_string(),
                        format!("{:e}", rep.ratio),
                        format!("{:e}", rep.stderr),
                        format!("{:.6}", rep.norm_p),
                        rep.bound_quotient.map(|q| format!("{q:e}")).unwrap_or_default(),
                    ]);
                    out.summary.push(format!(
                        "t = {tt}, H = ({}): ratio {:.4e} ± {:.1e}, ||H||_P = {:.3}, bound quotient {}",
                        fmt_vec(&hv),
                        rep.ratio,
                        rep.stderr,
                        rep.norm_p,
                        rep.bound_quotient.map(|q| format!("{q:.4e}")).unwrap_or_else(|| "n/a".into())
                    ));
                    by_family.entry(fi).or_default().push(rep.bound_quotient.filter(|q| *q > 0.0));
                    reports.push(rep);
                }
            }
            out.verdict("support", reports.iter().all(|r| r.norm_p <= r.t + 1.0 || r.hits == 0));
            let mut spreads = Vec::new();
            if t.len() >= 2 {
                for qs in by_family.values() {
                    let s = if qs.iter().all(Option::is_some) { Some(spread(&qs.iter().flatten().cloned().collect::<Vec<_>>())) } else { None };
                    spreads.push(s);
                }
                if spreads.iter().any(Option::is_some) {
                    out.verdict("bound_spread", spreads.iter().flatten().all(|s| *s <= *spread_limit));
                }
                out.summary.push(format!(
                    "bound quotient spread across t per H: [{}]",
                    spreads.iter().map(|s| s.map(|x| format!("{x:.3}")).unwrap_or_else(|| "n/a".into())).collect::<Vec<_>>().join(", ")
                ));
            }
            out.results = json!({"points": to_value(&reports), "family_spreads": spreads});
            out.table = Some(table);
            Ok(out)
        }
        McCmd::Triangle { n, samples } => {
            let rep = triangle_check(*n, *samples, seed)?;
            let mut out = Outcome::new("mc triangle", json!({"n": n, "samples": samples}));
            out.summary.push(format!("SL{n}: {} triples, {} violations", rep.trials, rep.violations));
            out.verdict("triangle", rep.pass);
            out.results = to_value(&rep);
            Ok(out)
        }
        McCmd::Inverse { n, samples } => {
            let rep = inverse_check(*n, *samples, seed)?;
            let mut out = Outcome::new("mc inverse", json!({"n": n, "samples": samples}));
            out.summary.push(format!("SL{n}: {} draws, max |κ(g⁻¹) + w0κ(g)| = {:.2e}", rep.trials, rep.max_error));
            out.verdict("inverse", rep.pass);
            out.results = to_value(&rep);
            Ok(out)
        }
        McCmd::Brion { sys, node, theta, tau, spread: spread_limit } => {
            let rs = build_system(sys)?;
            let node0 = zero_based(&rs, &[*node])?[0];
            let h0 = rs.fundamental_coweights()[node0].clone();
            let rep = brion_consequence_check(&rs, &h0, *theta, tau)?;
            let mut out = Outcome::new("mc brion", json!({"system": to_value(sys), "node": node, "theta": theta, "tau": tau, "spread": spread_limit}));
            let mut table = Table::new(&["tau", "value", "per_tau"]);
            for p in &rep.points {
                table.rows.push(vec![p.tau.to_string(), format!("{:e}", p.value), format!("{:e}", p.per_tau)]);
                out.summary.push(format!("tau = {}: integral {:.6e}, per tau {:.6e}", p.tau, p.value, p.per_tau));
            }
            out.summary.push(format!("spread of integral/tau: {:.4}", rep.spread));
            let positive = rep.points.iter().all(|p| p.per_tau > 0.0);
            out.verdict("linear_growth", positive && rep.spread < *spread_limit);
            out.results = to_value(&rep);
            out.table = Some(table);
            Ok(out)
        }
        McCmd::Anker { shell, t, h_frac, along } => {
            let mut out = Outcome::new("mc anker", json!({"shell": to_value(shell), "t": t, "h_frac": h_frac, "along": to_value(along)}));
            let mut table = Table::new(&["t", "H", "ratio", "stderr", "bound", "quotient"]);
            let mut reps = Vec::new();
            for &tt in t {
                let spec = shell_spec(shell, tt)?;
                let dir = direction(&spec, *along);
                let grid: Vec<Vec<f64>> = h_frac.iter().map(|f| dir.iter().map(|x| x * f * tt).collect()).collect();
                let rep = anker_upper_check(&spec, &grid, shell.samples, seed)?;
                for p in &rep.points {
                    table.rows.push(vec![tt.to_string(), fmt_vec(&p.h), format!("{:e}", p.ratio), format!("{:e}", p.stderr), format!("{:e}", p.bound), format!("{:e}", p.quotient)]);
                }
                out.summary.push(format!("t = {tt}: max ratio/bound {:.4e} (C = {})", rep.c_max, rep.c_limit));
                out.verdict(&format!("anker_t_{tt}"), rep.pass);
                reps.push(rep);
            }
            out.results = json!({"reports": to_value(&reps)});
            out.table = Some(table);
            Ok(out)
        }
    }
}
