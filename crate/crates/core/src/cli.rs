// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Every experiment command takes the same flag set; a JSON config file
//! (`--config`) may supply any of them, and flags win on conflict. Exit
//! codes: 0 on completion, 2 on invalid input, 3 on numerical failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cosine::{
    cosine_from_generator, cosine_from_group, dalembert_residual, fattorini_series, generator_residual,
    growth_rate, laplace_transform_check, zero_two_profile, CosineFamily, ZeroTwoVerdict, LAPLACE_HORIZON_CAP,
};
use crate::discpoly::{disc_norm, Polynomial};
use crate::error::{Error, Result};
use crate::interp::{
    extrapolation_bench, gaussian_estimate_check, gaussian_kernel, gaussian_matrix, gaussian_square_function_bench,
    lp_logconvexity_check, maximal_domination_check, random_bumps, riesz_thorin_check, InterpolationTriple,
    KernelSpec,
};
use crate::linalg::{op_norm, ComplexMatrix};
use crate::rbound::{r_beurling_profile, r_sector_report, rbound_estimate, RadMode, RademacherConfig};
use crate::report::{write_atomic, Provenance, Quantity, RegularityReport, Series, VerdictLabel};
use crate::rng;
use crate::semigroup::{
    beurling_profile, converse_profile, dichotomy, kato_resolvent_identity_check, log_grid, mild_solution,
    read_matrix_file, sector_report, GeneratorSpec, Verdict, FAIL_THRESHOLD,
};
use crate::space::{parse_exponent, GridSpace};
use crate::zoo::{self, ZooParams, CATALOG};

#[derive(Debug, Parser)]
#[command(name = "semilab", version, about = "Regularity experiments for matrix semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile of ‖f(T(t))‖ near t = 0 (and ‖f^N(T(t))T(Kt)‖ with --k-list).
    Beurling(RunArgs),
    /// Sectoriality constants from a point of the unit circle.
    Sector(RunArgs),
    /// Lower bound for the R-bound of {T(t)} over the t-grid.
    Rbound(RunArgs),
    /// R-bound ladder of {f(T(t))} over shrinking windows.
    RBeurling(RunArgs),
    /// Cosine family generated by the matrix.
    Cosine(RunArgs),
    /// Zero-two profile of ‖C(t) - I‖ across truncation dimensions.
    ZeroTwo(RunArgs),
    /// Fattorini series for the shifted cosine family.
    Fattorini(RunArgs),
    /// Riesz-Thorin and log-convexity checks.
    Interpolate(RunArgs),
    /// Extrapolation chain at the derived exponent.
    Extrapolate(RunArgs),
    /// Gaussian domination, maximal function and square function.
    Gaussian(RunArgs),
    /// Discrete maximal regularity ratio of the mild solution.
    Maxreg(RunArgs),
    /// Generator catalog.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZooAction {
    /// List entries with expected labels.
    List {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write an entry's matrix in the text matrix format.
    Export {
        name: String,
        #[arg(long)]
        dim: usize,
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

/// Flags shared by the experiment commands. Unset flags fall back to the
/// config file and then to the defaults of [`ExperimentConfig`].
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct RunArgs {
    /// JSON config file with any of the fields below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Zoo entry name.
    #[arg(long)]
    pub zoo: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Several truncation dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Zoo parameter `key=value` (value in JSON), repeatable.
    #[arg(long = "param")]
    #[serde(skip)]
    pub params: Vec<String>,
    /// Matrix file: dimension, then dim² `re im` pairs row-major.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Coefficients, lowest degree first, e.g. "[-1,1]".
    #[arg(long)]
    pub poly: Option<String>,
    /// Exponent p (number or "inf").
    #[arg(long)]
    pub p: Option<String>,
    /// Weights file (whitespace separated); unit weights if absent.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub decades: Option<f64>,
    #[arg(long)]
    pub per_decade: Option<usize>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_decades: Option<f64>,
    #[arg(long)]
    pub alpha_per_decade: Option<usize>,
    /// Point of the unit circle as "re,im".
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub zeta: Option<Vec<f64>>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub n_pow: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub n_range: Option<Vec<usize>>,
    #[arg(long)]
    pub mode: Option<RadMode>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub exact_cap: Option<usize>,
    #[arg(long)]
    pub max_selection: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Also run the R-sectoriality report (sector command).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub r_sector: Option<bool>,
    /// Build the cosine family from a group generator B (C = cosh tB).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub from_group: Option<bool>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p1: Option<String>,
    #[arg(long)]
    pub p2: Option<String>,
    #[arg(long)]
    pub ambient_dim: Option<usize>,
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub n_time: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl clap::ValueEnum for RadMode {
    fn value_variants<'a>() -> &'a [Self] {
        &[RadMode::Exact, RadMode::MonteCarlo]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            RadMode::Exact => "exact",
            RadMode::MonteCarlo => "monte_carlo",
        }))
    }
}

/// Fully resolved experiment configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    pub zoo: Option<String>,
    pub dim: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub params: ZooParams,
    pub matrix: Option<PathBuf>,
    pub poly: String,
    #[serde(with = "crate::space::exponent")]
    pub p: f64,
    pub weights: Option<PathBuf>,
    /// Largest grid time; `100/‖A‖₂` when absent.
    pub t_max: Option<f64>,
    pub decades: f64,
    pub per_decade: usize,
    /// Largest |α|; `100·‖A‖₂` when absent.
    pub alpha_max: Option<f64>,
    pub alpha_decades: f64,
    pub alpha_per_decade: usize,
    pub zeta: [f64; 2],
    pub t0: f64,
    pub n_pow: usize,
    pub k_list: Option<Vec<f64>>,
    pub n_range: Vec<usize>,
    pub mode: RadMode,
    pub mc_samples: usize,
    pub exact_cap: usize,
    pub max_selection: usize,
    pub budget: usize,
    pub r_sector: bool,
    pub from_group: bool,
    pub omega: f64,
    pub n_max: usize,
    pub times: Vec<f64>,
    pub quad_nodes: usize,
    pub lambda: Option<f64>,
    #[serde(with = "crate::space::exponent")]
    pub p1: f64,
    #[serde(with = "crate::space::exponent")]
    pub p2: f64,
    pub ambient_dim: usize,
    pub period: f64,
    pub a: f64,
    pub trials: usize,
    pub tau: f64,
    pub n_time: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let rc = RademacherConfig::default();
        Self {
            command: String::new(),
            zoo: None,
            dim: None,
            dims: None,
            params: ZooParams::default(),
            matrix: None,
            poly: "[-1, 1]".into(),
            p: 2.0,
            weights: None,
            t_max: None,
            decades: 2.0,
            per_decade: 20,
            alpha_max: None,
            alpha_decades: 3.0,
            alpha_per_decade: 4,
            zeta: [-1.0, 0.0],
            t0: 1.0,
            n_pow: 4,
            k_list: None,
            n_range: vec![1, 2, 4, 8, 12],
            mode: rc.mode,
            mc_samples: rc.mc_samples,
            exact_cap: rc.exact_cap,
            max_selection: rc.max_selection,
            budget: 64,
            r_sector: false,
            from_group: false,
            omega: 0.5,
            n_max: 8,
            times: vec![0.4, 0.8],
            quad_nodes: 64,
            lambda: None,
            p1: 2.0,
            p2: f64::INFINITY,
            ambient_dim: 1,
            period: std::f64::consts::TAU,
            a: 1.0,
            trials: 50,
            tau: 1.0,
            n_time: 64,
            output: None,
            format: Format::Json,
            seed: 0,
        }
    }
}

fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                if v.is_null() {
                    continue;
                }
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn invalid(e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(e.to_string())
}

impl ExperimentConfig {
    /// Defaults, overlaid by the config file, overlaid by the flags.
    pub fn resolve(command: &str, args: &RunArgs) -> Result<Self> {
        let mut value = serde_json::to_value(Self::default()).map_err(invalid)?;
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)?;
            let file: serde_json::Value = serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            if !file.is_object() {
                return Err(invalid("config file must hold a JSON object"));
            }
            merge(&mut value, file);
        }
        let mut flags = serde_json::to_value(args).map_err(invalid)?;
        if let Some(v) = args.p.as_deref() {
            parse_exponent(v).map_err(Error::InvalidInput)?;
        }
        if let Some(z) = &args.zeta {
            if z.len() != 2 {
                return Err(invalid("--zeta takes two numbers: re,im"));
            }
            flags["zeta"] = serde_json::json!(z);
        }
        merge(&mut value, flags);
        if !args.params.is_empty() {
            let p = serde_json::to_value(ZooParams::parse_assignments(&args.params)?).map_err(invalid)?;
            merge(&mut value["params"], p);
        }
        value["command"] = serde_json::Value::String(command.to_string());
        let cfg: Self = serde_json::from_value(value).map_err(invalid)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults overlaid by a JSON object of config fields.
    pub fn from_json(command: &str, text: &str) -> Result<Self> {
        let mut value = serde_json::to_value(Self::default()).map_err(invalid)?;
        let over: serde_json::Value = serde_json::from_str(text).map_err(invalid)?;
        if !over.is_object() {
            return Err(invalid("config must be a JSON object"));
        }
        merge(&mut value, over);
        value["command"] = serde_json::Value::String(command.to_string());
        let cfg: Self = serde_json::from_value(value).map_err(invalid)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.zoo.is_some() && self.matrix.is_some() {
            return Err(invalid("give either --zoo or --matrix, not both"));
        }
        if !(self.decades > 0.0 && self.alpha_decades > 0.0) || self.per_decade == 0 || self.alpha_per_decade == 0 {
            return Err(invalid("grid specs must be positive"));
        }
        if self.n_range.is_empty() || self.times.is_empty() || self.dims.as_ref().is_some_and(|d| d.is_empty()) {
            return Err(invalid("ranges must be nonempty"));
        }
        if self.k_list.as_ref().is_some_and(|k| k.is_empty()) {
            return Err(invalid("K list must be nonempty"));
        }
        if self.budget == 0 || self.trials == 0 {
            return Err(invalid("budget and trials must be positive"));
        }
        Ok(())
    }

    fn polynomial(&self) -> Result<Polynomial> {
        Polynomial::parse(&self.poly)
    }

    fn rademacher(&self) -> RademacherConfig {
        RademacherConfig {
            p: self.p,
            mode: self.mode,
            mc_samples: self.mc_samples,
            seed: self.seed,
            exact_cap: self.exact_cap,
            max_selection: self.max_selection,
        }
    }

    fn zeta(&self) -> Complex64 {
        Complex64::new(self.zeta[0], self.zeta[1])
    }

    fn dims_or_dim(&self) -> Result<Vec<usize>> {
        match (&self.dims, self.dim) {
            (Some(d), _) => Ok(d.clone()),
            (None, Some(d)) => Ok(vec![d]),
            (None, None) => Err(invalid("--dim or --dims required with --zoo")),
        }
    }

    /// The generators to study: one per dimension for a zoo entry, or the
    /// matrix file.
    fn generators(&self) -> Result<Vec<GeneratorSpec>> {
        match (&self.zoo, &self.matrix) {
            (Some(name), None) => self
                .dims_or_dim()?
                .into_iter()
                .map(|d| zoo::build(name, d, &self.params))
                .collect(),
            (None, Some(path)) => {
                let m = read_matrix_file(path)?;
                Ok(vec![GeneratorSpec::new(m, path.display().to_string())])
            }
            _ => Err(invalid("a generator is required: --zoo NAME --dim N, or --matrix FILE")),
        }
    }

    fn generator(&self) -> Result<GeneratorSpec> {
        let mut g = self.generators()?;
        if g.len() != 1 {
            return Err(invalid("this command takes a single dimension"));
        }
        Ok(g.remove(0))
    }

    fn space(&self, dim: usize, p: f64) -> Result<GridSpace> {
        match &self.weights {
            None => GridSpace::unit(dim, p),
            Some(path) => {
                let w: Vec<f64> = std::fs::read_to_string(path)?
                    .split_whitespace()
                    .map(|s| s.parse::<f64>().map_err(invalid))
                    .collect::<Result<_>>()?;
                GridSpace::new(w, p)
            }
        }
    }

    /// Decreasing t-grid from `t_max` (or `100/scale`) over `decades`.
    fn t_grid(&self, scale: f64) -> Result<Vec<f64>> {
        let t_max = self.t_max.unwrap_or(100.0 / scale.max(1e-12));
        log_grid(t_max, self.decades, grid_points(self.decades, self.per_decade))
    }

    /// Symmetric α-grid: log-spaced magnitudes with both signs.
    fn alpha_grid(&self, scale: f64) -> Result<Vec<f64>> {
        let top = self.alpha_max.unwrap_or(100.0 * scale.max(1.0));
        let mags = log_grid(top, self.alpha_decades, grid_points(self.alpha_decades, self.alpha_per_decade))?;
        Ok(mags.iter().flat_map(|a| [*a, -*a]).collect())
    }
}

fn grid_points(decades: f64, per_decade: usize) -> usize {
    ((decades * per_decade as f64).round() as usize + 1).max(2)
}

fn profile_label(margin: f64) -> VerdictLabel {
    if margin >= FAIL_THRESHOLD {
        VerdictLabel::CriterionHolds
    } else {
        VerdictLabel::FailsInLimit
    }
}

fn dichotomy_label(v: Verdict) -> VerdictLabel {
    match v {
        Verdict::CriterionHolds => VerdictLabel::CriterionHolds,
        Verdict::FailsInLimit => VerdictLabel::FailsInLimit,
        Verdict::Undetermined => VerdictLabel::Undetermined,
    }
}

fn bound_label(ok: bool) -> VerdictLabel {
    if ok {
        VerdictLabel::BoundHolds
    } else {
        VerdictLabel::BoundViolated
    }
}

fn suffix(name: &str, dim: usize, many: bool) -> String {
    if many {
        format!("{name}_dim{dim}")
    } else {
        name.to_string()
    }
}

fn run_beurling(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let f = cfg.polynomial()?;
    let gens = cfg.generators()?;
    let many = gens.len() > 1;
    let dn = disc_norm(&f).value;
    r.constant("disc_norm", Quantity::exact(dn));
    r.tolerance("fail_threshold", FAIL_THRESHOLD);
    let mut series = Series::new("profile", &["dim", "t", "value"], Provenance::Exact);
    let mut conv = Series::new("converse", &["dim", "k", "t", "value", "bound"], Provenance::Exact);
    let mut points = Vec::new();
    let mut details = Vec::new();
    for g in &gens {
        let d = g.dim();
        let space = cfg.space(d, cfg.p)?;
        let grid = cfg.t_grid(g.matrix.norm2())?;
        let prof = beurling_profile(g, &f, &grid, &space)?;
        if prof.lower_bound {
            series.provenance = Provenance::LowerBound;
        }
        for (t, v) in prof.t_grid.iter().zip(&prof.values) {
            series.push(vec![d as f64, *t, *v]);
        }
        r.constant(&suffix("plateau", d, many), Quantity::fitted(prof.empirical_limsup));
        r.margin(&suffix("beurling", d, many), Quantity::fitted(prof.margin));
        points.push((d, prof.empirical_limsup));
        if let Some(ks) = &cfg.k_list {
            for k in ks {
                let c = converse_profile(g, &f, cfg.n_pow, *k, &grid, &space)?;
                for (t, v) in c.t_grid.iter().zip(&c.values) {
                    conv.push(vec![d as f64, *k, *t, *v, c.disc_value]);
                }
                r.margin(&suffix(&format!("converse_k{k}"), d, many), Quantity::fitted(c.margin));
            }
        }
        details.push(prof);
    }
    if many {
        let dich = dichotomy(&points, dn)?;
        r.constant("plateau_limit", Quantity::fitted(dich.fit_limit));
        r.verdict("beurling_dichotomy", dichotomy_label(dich.verdict), dn - FAIL_THRESHOLD, "disc norm minus fail threshold");
    } else {
        let m = details[0].margin;
        r.verdict("beurling", profile_label(m), FAIL_THRESHOLD, "fail threshold on the margin");
    }
    r.series.push(series);
    if !conv.rows.is_empty() {
        r.series.push(conv);
    }
    r.details(&details)?;
    Ok(())
}

fn run_sector(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let space = cfg.space(g.dim(), cfg.p)?;
    let zeta = cfg.zeta();
    let alphas = cfg.alpha_grid(g.matrix.norm2())?;
    let rep = sector_report(&g, zeta, cfg.t0, &space, &alphas)?;
    let prov = if rep.lower_bound { Provenance::LowerBound } else { Provenance::Exact };
    let mut s = Series::new("resolvent", &["alpha", "value", "bound", "kato_residual"], prov);
    for (i, e) in rep.resolvent_sups.iter().enumerate() {
        let t = rep.phases.for_alpha(e.alpha) / e.alpha;
        let kato = kato_resolvent_identity_check(&g, zeta, t, e.alpha).map_err(|err| err.at(i, e.alpha))?;
        s.push(vec![e.alpha, e.value, e.bound, kato.residual]);
    }
    r.complex_constant("zeta", zeta, Provenance::Input);
    r.constant("t0", Quantity::input(cfg.t0))
        .constant("k", Quantity::new(rep.k, prov))
        .constant("m", Quantity::new(rep.m, prov))
        .constant("theta_plus", Quantity::exact(rep.phases.positive))
        .constant("theta_minus", Quantity::exact(rep.phases.negative))
        .constant("alpha0", Quantity::exact(rep.alpha0))
        .constant("c", Quantity::new(rep.c, prov))
        .tolerance("chain_slack", 1e-6);
    r.verdict(
        "sector_chain",
        if rep.chain_holds { VerdictLabel::ChainHolds } else { VerdictLabel::ChainViolated },
        1e-6,
        "absolute slack on |alpha| |R(i alpha)| <= K M |theta|",
    );
    r.series.push(s);
    let mut details = serde_json::json!({ "sector": crate::report::to_value(&rep)? });
    if cfg.r_sector {
        let rs = r_sector_report(&g, zeta, cfg.t0, &space, &cfg.rademacher(), cfg.budget)?;
        r.constant("r_semigroup", Quantity::lower(rs.r_semigroup.value))
            .constant("r_resolvent", Quantity::lower(rs.r_resolvent.value))
            .constant("r_alpha", Quantity::lower(rs.r_alpha.value))
            .constant("r_chain", Quantity::lower(rs.chain_value))
            .tolerance("r_chain_slack", 1e-4);
        r.verdict(
            "r_sector_chain",
            if rs.chain_holds { VerdictLabel::ChainHolds } else { VerdictLabel::ChainViolated },
            1e-4,
            "absolute slack on R{alpha R(i alpha)} <= K theta R{T}",
        );
        details["r_sector"] = crate::report::to_value(&rs)?;
    }
    r.details = details;
    Ok(())
}

fn run_rbound(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let space = cfg.space(g.dim(), cfg.p)?;
    let grid = cfg.t_grid(g.matrix.norm2())?;
    let family: Vec<ComplexMatrix> = grid
        .iter()
        .enumerate()
        .map(|(i, t)| g.at(*t).map_err(|e| e.at(i, *t)))
        .collect::<Result<_>>()?;
    let mut s = Series::new("family", &["t", "norm"], Provenance::Exact);
    let mut sup: f64 = 0.0;
    for (t, m) in grid.iter().zip(&family) {
        let n = op_norm(m, &space)?;
        if n.estimate {
            s.provenance = Provenance::LowerBound;
        }
        sup = sup.max(n.value);
        s.push(vec![*t, n.value]);
    }
    let est = rbound_estimate(&family, &space, &cfg.rademacher(), cfg.budget)?;
    r.constant("sup_norm", Quantity::new(sup, s.provenance))
        .constant("r_bound", Quantity::lower(est.value))
        .constant("ratio_to_sup", Quantity::lower(est.value / sup));
    r.series.push(s);
    r.details(&est)?;
    Ok(())
}

fn run_r_beurling(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let f = cfg.polynomial()?;
    let space = cfg.space(g.dim(), cfg.p)?;
    let grid = cfg.t_grid(g.matrix.norm2())?;
    let prof = r_beurling_profile(&g, &f, &grid, &space, &cfg.rademacher(), cfg.budget)?;
    let mut s = Series::new("ladder", &["eps", "r_bound", "sup_norm"], Provenance::LowerBound);
    for ((e, v), n) in prof.eps.iter().zip(&prof.values).zip(&prof.sup_norms) {
        s.push(vec![*e, *v, *n]);
    }
    r.constant("disc_norm", Quantity::exact(prof.disc_value))
        .constant("r_final", Quantity::lower(prof.final_value))
        .margin("r_beurling", Quantity::lower(prof.margin))
        .tolerance("fail_threshold", FAIL_THRESHOLD);
    r.verdict("r_beurling", profile_label(prof.margin), FAIL_THRESHOLD, "fail threshold on the margin");
    r.series.push(s);
    r.details(&prof)?;
    Ok(())
}

fn family_of(cfg: &ExperimentConfig, g: &GeneratorSpec) -> Result<CosineFamily> {
    if cfg.from_group {
        cosine_from_group(&g.matrix)
    } else {
        cosine_from_generator(&g.matrix)
    }
}

fn cosine_scale(fam: &CosineFamily) -> f64 {
    fam.generator.norm2().sqrt()
}

fn run_cosine(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let fam = family_of(cfg, &g)?;
    let space = cfg.space(g.dim(), cfg.p)?;
    let grid = cfg.t_grid(cosine_scale(&fam))?;
    let id = ComplexMatrix::identity(g.dim());
    let mut s = Series::new("cosine", &["t", "norm", "dist_identity", "generator_residual"], Provenance::Exact);
    for (i, t) in grid.iter().enumerate() {
        let row = (|| -> Result<Vec<f64>> {
            let c = fam.cos(*t)?;
            let n = op_norm(&c, &space)?;
            let d = op_norm(&(&c - &id), &space)?;
            if n.estimate || d.estimate {
                s.provenance = Provenance::LowerBound;
            }
            Ok(vec![*t, n.value, d.value, generator_residual(&fam, *t)?])
        })()
        .map_err(|e| e.at(i, *t))?;
        s.push(row);
    }
    let mut rng = rng::stream(cfg.seed);
    let horizon = grid[0];
    let mut worst: f64 = 0.0;
    let mut all_ok = true;
    for _ in 0..100 {
        let t = rng::uniform(&mut rng, 0.0, horizon);
        let u = rng::uniform(&mut rng, 0.0, horizon);
        let d = dalembert_residual(&fam, t, u)?;
        worst = worst.max(d.residual);
        all_ok &= d.ok;
    }
    let omega = growth_rate(&fam)?;
    let lambda = cfg.lambda.unwrap_or(omega + 1.0);
    let lap = laplace_transform_check(&fam, lambda, LAPLACE_HORIZON_CAP)?;
    r.constant("growth_rate", Quantity::fitted(omega))
        .constant("dalembert_worst", Quantity::exact(worst))
        .constant("laplace_residual", Quantity::exact(lap.residual))
        .constant("lambda", Quantity::input(lambda));
    r.verdict("dalembert", bound_label(all_ok), 1e-8, "relative d'Alembert residual");
    r.series.push(s);
    r.details(&lap)?;
    Ok(())
}

fn run_zero_two(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let gens = cfg.generators()?;
    let fams: Vec<(usize, CosineFamily)> = gens
        .iter()
        .map(|g| Ok((g.dim(), family_of(cfg, g)?)))
        .collect::<Result<_>>()?;
    let scale = fams.iter().map(|(_, f)| cosine_scale(f)).fold(0.0, f64::max);
    let grid = cfg.t_grid(scale)?;
    let d0 = fams[0].0;
    let space = cfg.space(d0, cfg.p)?;
    let rep = zero_two_profile(&fams, &grid, &space)?;
    let mut s = Series::new("profile", &["dim", "t", "dist_identity"], Provenance::Exact);
    for e in &rep.entries {
        for (t, v) in rep.t_grid.iter().zip(&e.values) {
            s.push(vec![e.dim as f64, *t, *v]);
        }
        r.constant(&format!("plateau_dim{}", e.dim), Quantity::fitted(e.plateau));
    }
    r.constant("plateau_limit", Quantity::fitted(rep.fit.fit_limit))
        .tolerance("fail_threshold", FAIL_THRESHOLD);
    let v = match rep.verdict {
        ZeroTwoVerdict::UniformlyContinuous => VerdictLabel::UniformlyContinuous,
        ZeroTwoVerdict::HypothesisFailsInLimit => VerdictLabel::HypothesisFailsInLimit,
        ZeroTwoVerdict::Undetermined => VerdictLabel::Undetermined,
    };
    // families not built from a group are measured only
    if fams.iter().all(|(_, f)| f.group.is_some()) {
        r.verdict("zero_two", v, 2.0 - FAIL_THRESHOLD, "two minus fail threshold");
    }
    r.series.push(s);
    r.details(&rep)?;
    Ok(())
}

fn run_fattorini(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let fam = family_of(cfg, &g)?;
    let mut s = Series::new("terms", &["t", "n", "term_norm", "term_bound"], Provenance::Exact);
    let mut all_ok = true;
    let mut details = Vec::new();
    for (i, t) in cfg.times.iter().enumerate() {
        let res = fattorini_series(&fam, cfg.omega, cfg.n_max, *t, cfg.quad_nodes).map_err(|e| e.at(i, *t))?;
        for (n, (a, b)) in res.term_norms.iter().zip(&res.term_bounds).enumerate() {
            s.push(vec![*t, n as f64, *a, *b]);
        }
        all_ok &= res.bound_ok;
        r.constant(&format!("reference_residual_t{t}"), Quantity::exact(res.reference_residual));
        r.constant("m", Quantity::fitted(res.m));
        details.push(serde_json::json!({
            "t": res.t,
            "omega": res.omega,
            "term_norms": res.term_norms,
            "term_bounds": res.term_bounds,
            "m": res.m,
            "bound_ok": res.bound_ok,
            "nodes": res.nodes,
            "reference_residual": res.reference_residual,
        }));
    }
    r.constant("omega", Quantity::input(cfg.omega));
    r.verdict("term_bounds", bound_label(all_ok), 0.0, "M e^{wt} t^{2n}/(2n)!");
    r.series.push(s);
    r.details = serde_json::Value::Array(details);
    Ok(())
}

/// The triple through `p`; an endpoint `p` (the default 2 against `p1 = 2`)
/// falls back to the midpoint `θ = 1/2`.
fn triple(cfg: &ExperimentConfig) -> Result<InterpolationTriple> {
    if cfg.p == cfg.p1 || cfg.p == cfg.p2 {
        return InterpolationTriple::new(cfg.p1, cfg.p2, 0.5);
    }
    InterpolationTriple::through(cfg.p1, cfg.p2, cfg.p)
}

fn run_interpolate(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let tr = triple(cfg)?;
    let space = cfg.space(g.dim(), tr.p)?;
    let w = space.weights().to_vec();
    let grid = cfg.t_grid(g.matrix.norm2())?;
    let mut s = Series::new("riesz_thorin", &["t", "lhs", "rhs"], Provenance::Exact);
    let mut ok = true;
    for (i, t) in grid.iter().enumerate() {
        let c = riesz_thorin_check(&g.at(*t)?, &tr, &w).map_err(|e| e.at(i, *t))?;
        if !tr.p.is_infinite() && ![1.0, 2.0].contains(&tr.p) {
            s.provenance = Provenance::LowerBound;
        }
        ok &= c.ok;
        s.push(vec![*t, c.lhs, c.rhs]);
    }
    let mut rng = rng::stream(cfg.seed);
    let mut violations = 0usize;
    for _ in 0..cfg.trials {
        let x = rng::complex_vector(&mut rng, g.dim());
        if !lp_logconvexity_check(&x, &tr, &w)?.ok {
            violations += 1;
        }
    }
    r.constant("theta", Quantity::exact(tr.theta))
        .constant("logconvexity_violations", Quantity::exact(violations as f64))
        .tolerance("slack", 1e-9);
    r.verdict("riesz_thorin", bound_label(ok), 1e-9, "absolute slack");
    r.verdict("logconvexity", bound_label(violations == 0), 1e-9, "absolute slack");
    r.series.push(s);
    r.details(&tr)?;
    Ok(())
}

fn run_extrapolate(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let g = cfg.generator()?;
    let f = cfg.polynomial()?;
    let tr = triple(cfg)?;
    let grid = cfg.t_grid(g.matrix.norm2())?;
    let rep = extrapolation_bench(&g, &f, &tr, &grid, &cfg.n_range)?;
    let mut s = Series::new("chain", &["n", "t", "measured", "chain"], Provenance::LowerBound);
    for e in &rep.entries {
        s.push(vec![e.n as f64, e.t, e.measured, e.chain]);
    }
    r.constant("rho", Quantity::fitted(rep.rho))
        .constant("m", Quantity::fitted(rep.m))
        .constant("theta", Quantity::exact(rep.theta_weighting_p1))
        .tolerance("chain_slack", 1e-6);
    if let Some(n) = rep.smallest_n {
        r.constant("smallest_n", Quantity::fitted(n as f64));
    }
    r.verdict(
        "extrapolation_chain",
        if rep.all_ok { VerdictLabel::ChainHolds } else { VerdictLabel::ChainViolated },
        1e-6,
        "absolute slack on the chain bound",
    );
    r.series.push(s);
    r.details(&rep)?;
    Ok(())
}

fn run_gaussian(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let points = cfg.dim.unwrap_or(64);
    let mut spec = KernelSpec::new(cfg.ambient_dim, points, cfg.period)?;
    spec.a = cfg.a;
    spec.validate()?;
    let grid = match cfg.t_max {
        Some(t) => log_grid(t, cfg.decades, grid_points(cfg.decades, cfg.per_decade))?,
        None => log_grid(1.0, cfg.decades, grid_points(cfg.decades, cfg.per_decade))?,
    };
    let probes = |s: &KernelSpec| -> Vec<Vec<f64>> {
        let mut d = vec![0.0; s.len()];
        d[0] = 1.0 / s.cell_volume();
        let b = random_bumps(s, &mut rng::stream(cfg.seed));
        vec![d, b.iter().map(|z| z.norm()).collect()]
    };
    let dom = match &cfg.zoo {
        None => gaussian_estimate_check(gaussian_matrix, &spec, &grid, probes)?,
        Some(name) => {
            if spec.dim_ambient != 1 {
                return Err(invalid("zoo families are one-dimensional; use --ambient-dim 1"));
            }
            let family = |s: &KernelSpec, t: f64| zoo::build(name, s.points, &cfg.params)?.at(t);
            gaussian_estimate_check(family, &spec, &grid, probes)?
        }
    };
    let maxd = maximal_domination_check(&spec, |s| random_bumps(s, &mut rng::stream(cfg.seed)), &grid)?;
    let sq = gaussian_square_function_bench(&spec, cfg.p, cfg.trials, cfg.seed)?;
    let mut s = Series::new("square_function", &["trial", "n", "ratio", "ratio_refined"], Provenance::Fitted);
    for t in &sq.trials {
        s.push(vec![t.trial as f64, t.n as f64, t.ratio, t.ratio_refined]);
    }
    let stable = |b: bool| if b { VerdictLabel::Stable } else { VerdictLabel::Unstable };
    r.constant("kernel_at_zero", Quantity::exact(gaussian_kernel(1.0, &vec![0.0; spec.dim_ambient])))
        .constant("gaussian_c", Quantity::fitted(dom.fitted))
        .constant("gaussian_c_refined", Quantity::fitted(dom.fitted_refined))
        .constant("maximal_c", Quantity::fitted(maxd.fitted))
        .constant("maximal_c_refined", Quantity::fitted(maxd.fitted_refined))
        .constant("square_c", Quantity::fitted(sq.fitted))
        .constant("square_c_refined", Quantity::fitted(sq.fitted_refined))
        .tolerance("stability", 0.1);
    r.verdict("gaussian_estimate", stable(dom.stable), 0.1, "relative change under refinement");
    r.verdict("maximal_domination", stable(maxd.stable), 0.1, "relative change under refinement");
    r.verdict("square_function", stable(sq.stable), 0.1, "relative change under refinement");
    r.series.push(s);
    r.details = serde_json::json!({
        "spec": crate::report::to_value(&spec)?,
        "gaussian_estimate": crate::report::to_value(&dom)?,
        "maximal_domination": crate::report::to_value(&maxd)?,
    });
    Ok(())
}

fn run_maxreg(cfg: &ExperimentConfig, r: &mut RegularityReport) -> Result<()> {
    let gens = cfg.generators()?;
    let many = gens.len() > 1;
    let mut s = Series::new("ratio", &["dim", "ratio", "n_time"], Provenance::Fitted);
    for g in &gens {
        let d = g.dim();
        let mut rng = rng::stream(cfg.seed);
        let v = rng::complex_vector(&mut rng, d);
        let tau = cfg.tau;
        let forcing = |s: f64| -> Vec<Complex64> {
            let w = 1.0 + 0.5 * (std::f64::consts::TAU * s / tau).sin();
            v.iter().map(|z| z * w).collect()
        };
        let sol = mild_solution(g, forcing, tau, cfg.p, cfg.n_time)?;
        s.push(vec![d as f64, sol.maxreg_ratio, sol.n_time as f64]);
        r.constant(&suffix("maxreg_ratio", d, many), Quantity::fitted(sol.maxreg_ratio));
    }
    r.constant("tau", Quantity::input(cfg.tau)).tolerance("refinement", 0.01);
    r.series.push(s);
    Ok(())
}

/// Runs one experiment and returns its report (not yet written).
pub fn run(cfg: &ExperimentConfig) -> Result<RegularityReport> {
    let start = Instant::now();
    let mut r = RegularityReport::new(&cfg.command, cfg.seed, crate::report::to_value(cfg)?);
    match cfg.command.as_str() {
        "beurling" => run_beurling(cfg, &mut r)?,
        "sector" => run_sector(cfg, &mut r)?,
        "rbound" => run_rbound(cfg, &mut r)?,
        "r-beurling" => run_r_beurling(cfg, &mut r)?,
        "cosine" => run_cosine(cfg, &mut r)?,
        "zero-two" => run_zero_two(cfg, &mut r)?,
        "fattorini" => run_fattorini(cfg, &mut r)?,
        "interpolate" => run_interpolate(cfg, &mut r)?,
        "extrapolate" => run_extrapolate(cfg, &mut r)?,
        "gaussian" => run_gaussian(cfg, &mut r)?,
        "maxreg" => run_maxreg(cfg, &mut r)?,
        other => return Err(invalid(format!("unknown command '{other}'"))),
    }
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Writes the report to the configured output, or JSON to stdout.
pub fn emit(cfg: &ExperimentConfig, r: &RegularityReport) -> Result<()> {
    let Some(path) = &cfg.output else {
        print!("{}", r.to_json()?);
        return Ok(());
    };
    let with_ext = |ext: &str| -> PathBuf {
        if cfg.format == Format::Both {
            path.with_extension(ext)
        } else {
            path.clone()
        }
    };
    if matches!(cfg.format, Format::Json | Format::Both) {
        write_atomic(&with_ext("json"), r.to_json()?.as_bytes())?;
    }
    if matches!(cfg.format, Format::Csv | Format::Both) {
        write_atomic(&with_ext("csv"), r.to_csv().as_bytes())?;
    }
    let verdicts: Vec<String> = r
        .verdicts
        .iter()
        .map(|v| format!("{}={}", v.name, serde_json::to_value(v.verdict).unwrap_or_default().as_str().unwrap_or("")))
        .collect();
    println!("{} done in {:.2}s {}", r.command, r.wall_time_s, verdicts.join(" "));
    Ok(())
}

fn zoo_table() -> String {
    let mut out = format!("{:<18} {:<26} {:<40} {}\n", "name", "expected", "params", "notes");
    for e in CATALOG {
        let label = e.expected.map(|x| x.as_str()).unwrap_or("from symbol");
        out.push_str(&format!("{:<18} {:<26} {:<40} {}\n", e.name, label, e.params, e.notes));
    }
    out
}

fn run_zoo(action: &ZooAction) -> Result<()> {
    match action {
        ZooAction::List { output } => {
            print!("{}", zoo_table());
            if let Some(path) = output {
                let mut text = serde_json::to_string_pretty(CATALOG).map_err(invalid)?;
                text.push('\n');
                write_atomic(path, text.as_bytes())?;
            }
        }
        ZooAction::Export {
            name,
            dim,
            params,
            output,
        } => {
            let g = zoo::build(name, *dim, &ZooParams::parse_assignments(params)?)?;
            write_atomic(output, crate::semigroup::format_matrix_text(&g.matrix).as_bytes())?;
        }
    }
    Ok(())
}

fn command_name(c: &Command) -> (&'static str, Option<&RunArgs>) {
    match c {
        Command::Beurling(a) => ("beurling", Some(a)),
        Command::Sector(a) => ("sector", Some(a)),
        Command::Rbound(a) => ("rbound", Some(a)),
        Command::RBeurling(a) => ("r-beurling", Some(a)),
        Command::Cosine(a) => ("cosine", Some(a)),
        Command::ZeroTwo(a) => ("zero-two", Some(a)),
        Command::Fattorini(a) => ("fattorini", Some(a)),
        Command::Interpolate(a) => ("interpolate", Some(a)),
        Command::Extrapolate(a) => ("extrapolate", Some(a)),
        Command::Gaussian(a) => ("gaussian", Some(a)),
        Command::Maxreg(a) => ("maxreg", Some(a)),
        Command::Zoo { .. } => ("zoo", None),
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match command_name(&cli.command) {
        (_, None) => match &cli.command {
            Command::Zoo { action } => run_zoo(action),
            _ => unreachable!(),
        },
        (name, Some(args)) => ExperimentConfig::resolve(name, args).and_then(|cfg| emit(&cfg, &run(&cfg)?)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Reads a config file, for callers that drive experiments from code.
pub fn load_config(path: &Path, command: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::resolve(
        command,
        &RunArgs {
            config: Some(path.to_path_buf()),
            ..RunArgs::default()
        },
    )
}
