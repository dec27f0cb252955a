//! The `analyze` subcommand: one CSV table plus a summary block per method.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use sawtm::analysis::{
    big_ratio, biased_exponent_scan, da_batch, m1_lambda, m2_ratio_of_ratios, p1_subdominant,
    p2_triple_fit, p3_exponent, pade, parity_ratio_of_ratios, predict_coefficients, ratio_estimators, ratio_series,
    scan_crossing, BatchOptions, FitResult, FitSpec, LogSeries, ScanOptions,
};
use sawtm::exact::Series;
use sawtm::tm::{DomainShape, Lattice};
use sawtm::ProblemSpec;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    M1,
    M2,
    P1,
    P2,
    P3,
    Ratio,
    Pade,
    Da,
    BdaScan,
    PredictCheck,
}

impl Method {
    fn name(self) -> String {
        self.to_possible_value().expect("named").get_name().to_string()
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Lattice growth constant (p1, p2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Exponent of the power-law correction (p1).
    #[arg(long)]
    pub g: Option<f64>,
    /// Inverse powers of L in the extrapolation fit.
    #[arg(long, value_delimiter = ',')]
    pub fit_powers: Option<Vec<u32>>,
    /// Points per fit window (default: parameters + 3).
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Use at most this many predicted entries (fit and ratio methods).
    #[arg(long)]
    pub predicted_cap: Option<usize>,
    /// Use the period-2 estimators (default for the hexagonal square domain).
    #[arg(long)]
    pub parity: Option<bool>,
    /// Critical point for the biased ratio estimators.
    #[arg(long)]
    pub critical_point: Option<f64>,
    /// Exponent for the biased growth estimators.
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Padé degrees as NUMERATOR:DENOMINATOR; default is the near-diagonal table.
    #[arg(long = "pade", value_delimiter = ',')]
    pub pade_degrees: Vec<String>,
    /// Differential order of the approximants.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub min_terms: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub spread: usize,
    /// Largest degree of the inhomogeneous polynomial.
    #[arg(long, default_value_t = 6)]
    pub k_max: usize,
    /// Bias grid in λ as START:END:COUNT.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub trim: f64,
    /// Exponent whose crossing the bias scan reports.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub target: f64,
    /// Withheld terms for predict-check.
    #[arg(long, default_value_t = 3)]
    pub terms: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub cutoff: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A table with a trailing summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
}

impl Report {
    fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), ..Default::default() }
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
        out.write_all(config.header().as_bytes())?;
        {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        writeln!(out, "\n# summary")?;
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(["parameter", "value"])?;
        for (k, v) in &self.summary {
            w.write_record([k, v])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Consecutive exact values `C_1..C_n`.
fn exact_counts(series: &Series) -> Result<Vec<BigUint>, CliError> {
    let sizes: Vec<usize> = series.exact().map(|e| e.size).collect();
    if sizes.iter().enumerate().any(|(i, &l)| l != i + 1) {
        return Err(CliError::Invalid("exact entries must be L = 1, 2, … without gaps".into()));
    }
    Ok(series.exact_values())
}

fn fit_spec(args: &AnalyzeArgs, default_powers: &[u32], config: &mut RunConfig) -> FitSpec {
    let spec = FitSpec {
        powers: args.fit_powers.clone().unwrap_or_else(|| default_powers.to_vec()),
        window: args.window,
        stride: args.stride,
    };
    config.set_list("fit_powers", &spec.powers).set("window", spec.window_len()).set("stride", spec.stride);
    spec
}

fn batch_options(args: &AnalyzeArgs, default_order: usize, config: &mut RunConfig) -> BatchOptions {
    let opts = BatchOptions {
        order: args.order.unwrap_or(default_order),
        inhomogeneous: (0..=args.k_max).collect(),
        spread: args.spread,
        min_terms: args.min_terms.unwrap_or(0),
        ..Default::default()
    };
    config
        .set("order", opts.order)
        .set("spread", opts.spread)
        .set("k_max", args.k_max)
        .set("min_terms", opts.min_terms)
        .set("defect_factor", opts.defect_factor);
    opts
}

/// `λ` from a critical point of the ratio series, whose radius is `κ^{-2}`.
fn lambda_from_critical(problem: &ProblemSpec, z: f64) -> f64 {
    z.powf(-1.0 / (2 * problem.vertex_factor()) as f64)
}

fn critical_from_lambda(problem: &ProblemSpec, lambda: f64) -> f64 {
    lambda.powf(-2.0 * problem.vertex_factor() as f64)
}

fn uses_parity(problem: &ProblemSpec, args: &AnalyzeArgs) -> bool {
    args.parity.unwrap_or(problem.lattice == Lattice::Hexagonal && problem.domain == DomainShape::Square)
}

fn fit_report(fit: &FitResult, estimator: &'static str, with_c2: bool) -> Report {
    let mut columns = vec!["L", estimator, "extrapolated"];
    if with_c2 {
        columns.push("c2");
    }
    let mut report = Report::new(&columns);
    for &(l, v) in &fit.raw {
        let window = fit.windows.iter().find(|w| w.last == l);
        let mut cells = vec![l.to_string(), num(v), opt(window.map(|w| w.constant()))];
        if with_c2 {
            cells.push(opt(window.and_then(|w| w.coefficient(&fit.spec, 2))));
        }
        report.row(cells);
    }
    report.note("limit", fit.limit);
    report.note("lambda", fit.lambda);
    report
}

pub fn run(series: &Series, args: &AnalyzeArgs, config: &mut RunConfig) -> Result<Report, CliError> {
    let problem: ProblemSpec = series.problem.parse()?;
    config.set("method", args.method.name()).set("problem", problem.id()).set("vertex_factor", problem.vertex_factor());
    let logs = || -> Result<LogSeries, CliError> { Ok(LogSeries::from_series(series, args.predicted_cap)?) };
    config.set("predicted_cap", args.predicted_cap.map_or("all".to_string(), |c| c.to_string()));
    let vf = problem.vertex_factor();
    let report = match args.method {
        Method::M1 => {
            let spec = fit_spec(args, &[1, 2, 3], config);
            fit_report(&m1_lambda(&logs()?, vf, &spec)?, "root", false)
        }
        Method::M2 => {
            let cap = args.predicted_cap.or(Some(4));
            config.set("predicted_cap", cap.unwrap());
            let logs = LogSeries::from_series(series, cap)?;
            let spec = fit_spec(args, &[2, 3], config);
            let fit = m2_ratio_of_ratios(&logs, vf, &spec)?;
            let mut r = fit_report(&fit, "ratio_of_ratios", true);
            r.note("c2", opt(fit.last_coefficient(2)));
            r
        }
        Method::P3 => {
            let parity = uses_parity(&problem, args);
            config.set("parity", parity);
            let fit = if parity {
                let spec = fit_spec(args, &[2, 4], config);
                parity_ratio_of_ratios(&logs()?, vf, &spec)?
            } else {
                let spec = fit_spec(args, &[2, 3], config);
                m2_ratio_of_ratios(&logs()?, vf, &spec)?
            };
            let mut r = fit_report(&fit, if parity { "averaged_parity_ratio_of_ratios" } else { "ratio_of_ratios" }, true);
            r.note("c2", opt(fit.last_coefficient(2)));
            r.note("g", opt(p3_exponent(&fit)));
            r
        }
        Method::P1 => {
            let lambda = args.lambda.ok_or_else(|| CliError::Invalid("p1 needs --lambda".into()))?;
            let g = args.g.unwrap_or(0.0);
            config.set("lambda", lambda).set("g", g);
            let spec = fit_spec(args, &[1, 2], config);
            let kappa = lambda.powi(vf as i32);
            let sub = p1_subdominant(&logs()?, kappa, g, &spec, &spec)?;
            let mut r = Report::new(&["L", "alpha_estimate", "alpha_extrapolated", "amplitude_estimate", "amplitude_extrapolated"]);
            for &(l, amp) in &sub.amplitude.raw {
                let alpha = sub.alpha.raw.iter().find(|p| p.0 == l).map(|p| p.1);
                let aw = sub.alpha.windows.iter().find(|w| w.last == l).map(|w| w.constant());
                let cw = sub.amplitude.windows.iter().find(|w| w.last == l).map(|w| w.constant());
                r.row(vec![l.to_string(), opt(alpha), opt(aw), num(amp), opt(cw)]);
            }
            r.note("alpha", sub.alpha.limit);
            r.note("b", sub.b);
            r.note("amplitude", sub.amplitude.limit);
            r.note("c", sub.c);
            r
        }
        Method::P2 => {
            let lambda = args.lambda.ok_or_else(|| CliError::Invalid("p2 needs --lambda".into()))?;
            config.set("lambda", lambda);
            let kappa = lambda.powi(vf as i32);
            let triples = p2_triple_fit(&logs()?, kappa)?;
            let mut r = Report::new(&["k", "b_log_kappa", "c_log_kappa", "g"]);
            for t in &triples {
                r.row(vec![t.k.to_string(), num(t.b_log), num(t.c_log), num(t.g)]);
            }
            if let Some(t) = triples.last() {
                r.note("b_log_kappa", t.b_log);
                r.note("c_log_kappa", t.c_log);
                r.note("g", t.g);
            }
            r
        }
        Method::Ratio => {
            config.set_opt("critical_point", args.critical_point).set_opt("exponent", args.exponent);
            let est = ratio_estimators(&logs()?, args.critical_point, args.exponent)?;
            let mut r = Report::new(&["n", "ratio", "intercept", "exponent_unbiased", "exponent_biased", "growth_biased"]);
            for i in 0..est.n.len() {
                r.row(vec![
                    est.n[i].to_string(),
                    num(est.ratio[i]),
                    opt(est.intercept[i]),
                    opt(est.exponent_unbiased[i]),
                    opt(est.exponent_biased[i]),
                    opt(est.growth_biased[i]),
                ]);
            }
            if let Some(&last) = est.ratio.last() {
                r.note("last_ratio", last);
            }
            r
        }
        Method::Pade => pade_report(&problem, series, args, config)?,
        Method::Da => {
            let coeffs = ratio_series(&exact_counts(series)?);
            let opts = batch_options(args, 3, config);
            let batch = da_batch(&coeffs, &opts);
            let mut r = Report::new(&["degrees", "k", "terms", "critical_point", "exponent", "lambda", "defective"]);
            for a in &batch.approximants {
                r.row(vec![
                    a.da.degrees.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"),
                    a.da.inhomogeneous.to_string(),
                    a.da.terms.to_string(),
                    opt(a.critical),
                    opt(a.exponent),
                    opt(a.critical.map(|z| lambda_from_critical(&problem, z))),
                    a.defective.to_string(),
                ]);
            }
            r.note("coefficients", coeffs.len());
            r.note("approximants", batch.approximants.len());
            r.note("usable", batch.usable_count());
            r.note("critical_point", batch.mean_critical);
            r.note("critical_point_std", batch.std_critical);
            r.note("exponent", batch.mean_exponent);
            r.note("exponent_std", batch.std_exponent);
            r.note("lambda", lambda_from_critical(&problem, batch.mean_critical));
            r
        }
        Method::BdaScan => {
            let grid = parse_grid(args.grid.as_deref().ok_or_else(|| CliError::Invalid("bda-scan needs --grid".into()))?)?;
            config.set("grid", args.grid.as_deref().unwrap()).set("trim", args.trim).set("target", args.target);
            let coeffs = ratio_series(&exact_counts(series)?);
            let opts = ScanOptions { batch: batch_options(args, 3, config), trim: args.trim, ..Default::default() };
            let points: Vec<f64> = grid.iter().map(|&l| critical_from_lambda(&problem, l)).collect();
            let scan = biased_exponent_scan(&coeffs, &points, &opts)?;
            let mut r = Report::new(&["lambda", "bias_point", "mean_exponent", "stderr", "count", "unreliable"]);
            for (l, p) in grid.iter().zip(&scan) {
                r.row(vec![num(*l), num(p.bias), num(p.mean), num(p.stderr), p.count.to_string(), p.unreliable.to_string()]);
            }
            let crossing = scan_crossing(&scan, args.target);
            r.note("crossing_bias_point", opt(crossing));
            r.note("crossing_lambda", opt(crossing.map(|z| lambda_from_critical(&problem, z))));
            r
        }
        Method::PredictCheck => {
            let counts = exact_counts(series)?;
            let k = args.terms;
            if counts.len() <= k {
                return Err(sawtm::analysis::AnalysisError::TooFewTerms { needed: k + 1, have: counts.len() }.into());
            }
            let kept = counts.len() - k;
            let opts = match args.order {
                Some(_) => batch_options(args, 2, config),
                None => {
                    let o = BatchOptions::for_prediction(kept + 1);
                    config.set("order", o.order).set("spread", o.spread).set("min_terms", o.min_terms);
                    o
                }
            };
            config.set("withheld", k).set("cutoff", args.cutoff);
            let prediction = predict_coefficients(&counts[..kept], k, args.cutoff, &opts)?;
            let mut r = Report::new(&["L", "exact", "predicted", "relative_error", "relative_spread", "within_spread"]);
            let mut within = 0;
            for t in &prediction.terms {
                let exact = &counts[t.size - 1];
                let err = (big_ratio(&t.value, exact) - 1.0).abs();
                within += usize::from(err < t.rel_spread);
                r.row(vec![
                    t.size.to_string(),
                    exact.to_string(),
                    t.value.to_string(),
                    num(err),
                    num(t.rel_spread),
                    (err < t.rel_spread).to_string(),
                ]);
            }
            r.note("approximants", prediction.approximants);
            r.note("predicted", prediction.terms.len());
            r.note("within_spread", within);
            if let Some(d) = &prediction.diagnostic {
                r.note("diagnostic", d);
            }
            r
        }
    };
    Ok(report)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Invalid(format!("grid {text:?} is not START:END:COUNT"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let end: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(match count {
        0 => return Err(bad()),
        1 => vec![start],
        _ => (0..count).map(|i| start + (end - start) * i as f64 / (count - 1) as f64).collect(),
    })
}

fn pade_report(problem: &ProblemSpec, series: &Series, args: &AnalyzeArgs, config: &mut RunConfig) -> Result<Report, CliError> {
    let coeffs: Vec<BigRational> = ratio_series(&exact_counts(series)?);
    let degrees: Vec<(usize, usize)> = if args.pade_degrees.is_empty() {
        let total = coeffs.len();
        let mut out = Vec::new();
        for den in 1..total {
            for num in den.saturating_sub(2)..=den + 2 {
                if num + den < total {
                    out.push((num, den));
                }
            }
        }
        out
    } else {
        args.pade_degrees
            .iter()
            .map(|d| {
                let (m, n) = d.split_once(':').ok_or_else(|| CliError::Invalid(format!("bad Padé degrees {d:?}")))?;
                let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| CliError::Invalid(format!("bad Padé degrees {d:?}")));
                Ok((parse(m)?, parse(n)?))
            })
            .collect::<Result<_, CliError>>()?
    };
    config.set("pade", degrees.iter().map(|(m, n)| format!("{m}:{n}")).collect::<Vec<_>>().join(","));
    let mut r = Report::new(&["numerator_degree", "denominator_degree", "critical_point", "lambda"]);
    for &(m, n) in &degrees {
        match pade(&coeffs, m, n) {
            Ok(p) => {
                let root = p.root.as_ref().and_then(|x| x.real.as_ref());
                r.row(vec![
                    m.to_string(),
                    n.to_string(),
                    root.map(|x| x.to_decimal(15)).unwrap_or_default(),
                    opt(root.map(|x| lambda_from_critical(problem, x.to_f64()))),
                ]);
            }
            Err(sawtm::analysis::AnalysisError::Singular) => {
                r.row(vec![m.to_string(), n.to_string(), "singular".into(), String::new()]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    r.note("coefficients", coeffs.len());
    Ok(r)
}
