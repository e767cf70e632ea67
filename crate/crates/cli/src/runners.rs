//! One runner per subcommand. Each takes fully merged parameters and returns
//! its CSV tables; trials run in parallel but every row depends only on the
//! seed, so output is identical for any thread count.

use std::path::PathBuf;

use ddl_core::analysis::{mse_curve, optimal_alpha, AnalysisParams};
use ddl_core::data::gen_gaussian_classes;
use ddl_core::discrete::{
    ddl_estimate, kt_posterior_predictor, true_generalization_error, uniform_grid, worst_case_regret_many, Coder,
    Selector,
};
use ddl_core::neural::NnSelectConfig;
use ddl_core::regression::{select, RegGrid, RegMethod};
use ddl_core::report::{format_real, REPORT_CSV_HEADER};
use ddl_core::rng::tags;
use ddl_core::{gen_bernoulli_k, gen_sine, DdlConfig, Seed, SelectionReport};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{AnalysisArgs, BernoulliArgs, MethodName, Mode, ModelSelectArgs, NnArgs, RegressionArgs};
use crate::error::{CliError, Result};
use crate::table::{reals, Table};

/// Tables produced by one run: the main table for `--out` and any side
/// tables with their own paths.
#[derive(Debug)]
pub struct Outputs {
    pub main: Table,
    pub extra: Vec<(PathBuf, Table)>,
}

impl Outputs {
    fn single(main: Table) -> Self {
        Self { main, extra: Vec::new() }
    }
}

fn comment(command: &str, schema: &str, params: serde_json::Value) -> String {
    format!("ddl {command} {} schema={schema} params={params}", env!("CARGO_PKG_VERSION"))
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Sorted copy of `values`; duplicates and non-finite entries are rejected.
fn sorted_unique(values: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(config_err(format!("{what} must be a nonempty list of finite numbers")));
    }
    let mut v = values;
    v.sort_by(f64::total_cmp);
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(config_err(format!("{what} contains duplicates")));
    }
    Ok(v)
}

fn positive(value: usize, what: &str) -> Result<usize> {
    if value == 0 {
        return Err(config_err(format!("{what} must be positive")));
    }
    Ok(value)
}

fn default_alphas() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

pub fn bernoulli_sweep(a: &BernoulliArgs) -> Result<Outputs> {
    let k = positive(a.k.unwrap_or(4), "k")?;
    let n = a.n.unwrap_or(2000);
    let alphas = sorted_unique(a.alphas.clone().unwrap_or_else(default_alphas), "alphas")?;
    let trials = positive(a.trials.unwrap_or(1000), "trials")?;
    let seed = Seed(a.seed.unwrap_or(0));
    let px = a.px.clone().unwrap_or_else(|| vec![1.0 / k as f64; k]);
    let p1 = a.p1.clone().unwrap_or_else(|| (1..=k).map(|i| i as f64 / (k + 1) as f64).collect());
    if px.len() != k || p1.len() != k {
        return Err(config_err(format!("px and p1 need {k} entries each")));
    }
    let splits: Vec<usize> =
        alphas.iter().map(|&al| DdlConfig::alpha(al).resolve(n)).collect::<ddl_core::Result<_>>()?;

    let errors: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let d = gen_bernoulli_k(&px, &p1, n, seed.derive(t).derive(tags::DATA))?;
            let g = true_generalization_error(&px, &p1, &kt_posterior_predictor(&d))?;
            splits.iter().map(|&m| Ok(ddl_estimate(&d, &DdlConfig::index(m), Coder::Sequential)? - g)).collect()
        })
        .collect::<ddl_core::Result<_>>()?;

    let params = json!({"k": k, "n": n, "alphas": alphas, "px": px, "p1": p1, "trials": trials, "seed": seed.0});
    let mut table = Table::new(
        comment("bernoulli-sweep", "ddl_error_v1", params),
        "alpha,n,k,m,trials,mse_bits2,mse_se_bits2,mean_error_bits,first_term_bits",
    );
    let tf = trials as f64;
    for (j, (&alpha, &m)) in alphas.iter().zip(&splits).enumerate() {
        let sq: Vec<f64> = errors.iter().map(|e| e[j] * e[j]).collect();
        let mse = sq.iter().sum::<f64>() / tf;
        let se =
            if trials > 1 { (sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (tf - 1.0) / tf).sqrt() } else { 0.0 };
        let mean = errors.iter().map(|e| e[j]).sum::<f64>() / tf;
        let first = ddl_core::analysis::ddl_bias_term(n as u64, m as u64, k as u32)?;
        table.push(format!("{},{n},{k},{m},{trials},{}", format_real(alpha), reals(&[mse, se, mean, first])));
    }
    Ok(Outputs::single(table))
}

pub fn model_select(a: &ModelSelectArgs) -> Result<Outputs> {
    let n = a.n.unwrap_or(100);
    let step = a.step.unwrap_or(0.05);
    let alphas = sorted_unique(a.alphas.clone().unwrap_or_else(default_alphas), "alphas")?;
    let trials = positive(a.trials.unwrap_or(1000), "trials")?;
    let seed = Seed(a.seed.unwrap_or(0));
    let grid = uniform_grid(step)?;
    let mut selectors = vec![Selector::Mdl];
    selectors.extend(alphas.iter().map(|&alpha| Selector::Ddl { alpha }));
    let results = worst_case_regret_many(&selectors, n, &grid, trials, seed)?;

    let params = json!({"n": n, "step": step, "alphas": alphas, "trials": trials, "seed": seed.0});
    let mut table = Table::new(
        comment("model-select", "worst_regret_v1", params),
        "alpha,n,method,worst_regret_bits,standard_error_bits,p1_given_0,p1_given_1,px1",
    );
    // Full-codelength selection is DDL with an empty prefix: alpha = 0.
    for w in &results {
        let (alpha, method) = match w.selector {
            Selector::Mdl => (0.0, "mdl"),
            Selector::Ddl { alpha } => (alpha, "ddl"),
        };
        table.push(format!(
            "{},{n},{method},{}",
            format_real(alpha),
            reals(&[w.regret, w.standard_error, w.point.p1_given_0, w.point.p1_given_1, w.point.px1])
        ));
    }
    Ok(Outputs::single(table))
}

const REGRET_HEADER: &str = "trial,method,chosen_index,chosen_value,regret_bits";

fn selection_tables(
    command: &str,
    params: serde_json::Value,
    reports: &[SelectionReport],
    scores_out: Option<&PathBuf>,
) -> Outputs {
    let mut main = Table::new(comment(command, "regret_v1", params.clone()), REGRET_HEADER);
    let mut scores = Table::new(comment(command, "scores_v1", params), &format!("trial,{REPORT_CSV_HEADER}"));
    for (t, r) in reports.iter().enumerate() {
        for m in &r.methods {
            main.push(format!(
                "{t},{},{},{},{}",
                m.method,
                m.chosen,
                format_real(r.candidates[m.chosen]),
                format_real(m.regret)
            ));
        }
        for row in r.csv_rows() {
            scores.push(format!("{t},{row}"));
        }
    }
    let extra = scores_out.map(|p| vec![(p.clone(), scores)]).unwrap_or_default();
    Outputs { main, extra }
}

pub fn regression(a: &RegressionArgs) -> Result<Outputs> {
    let mode = a.mode.unwrap_or(Mode::Lambda);
    let n = a.n.unwrap_or(500);
    let noise_variance = match (a.noise_variance, a.noise_std) {
        (Some(_), Some(_)) => return Err(config_err("give the noise as a variance or a standard deviation, not both")),
        (Some(v), None) => v,
        (None, Some(s)) => s * s,
        (None, None) => 0.15,
    };
    let alpha = a.alpha.unwrap_or(0.5);
    let holdout = a.holdout.unwrap_or(0.25);
    let trials = positive(a.trials.unwrap_or(200), "trials")?;
    let seed = Seed(a.seed.unwrap_or(0));
    let (grid, default_methods) = match mode {
        Mode::Lambda => {
            if a.orders.is_some() {
                return Err(config_err("orders apply to order mode"));
            }
            let RegGrid::Lambda { order, lambdas } = RegGrid::default_lambda() else { unreachable!() };
            let grid =
                RegGrid::Lambda { order: a.order.unwrap_or(order), lambdas: a.lambdas.clone().unwrap_or(lambdas) };
            (grid, vec![MethodName::Ddl, MethodName::Cv, MethodName::Bayes])
        }
        Mode::Order => {
            if a.lambdas.is_some() || a.order.is_some() {
                return Err(config_err("order and lambdas apply to lambda mode"));
            }
            let RegGrid::Order { orders } = RegGrid::default_order() else { unreachable!() };
            (RegGrid::Order { orders: a.orders.clone().unwrap_or(orders) }, vec![MethodName::Ddl, MethodName::Mdl])
        }
    };
    let names = a.methods.clone().unwrap_or(default_methods);
    let methods: Vec<RegMethod> = names
        .iter()
        .map(|m| match m {
            MethodName::Ddl => RegMethod::Ddl { alpha },
            MethodName::Cv => RegMethod::Cv { holdout },
            MethodName::Mdl => RegMethod::Mdl,
            MethodName::Bayes => RegMethod::Bayes,
        })
        .collect();

    let reports: Vec<SelectionReport> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = seed.derive(t);
            let data = gen_sine(n, noise_variance, s.derive(tags::DATA))?;
            select(&data, &grid, &methods, s)
        })
        .collect::<ddl_core::Result<_>>()?;

    let params = json!({
        "mode": mode, "n": n, "noise_variance": noise_variance, "grid": grid.values(),
        "methods": names, "alpha": alpha, "holdout": holdout, "trials": trials, "seed": seed.0,
    });
    Ok(selection_tables("regression", params, &reports, a.scores_out.as_ref()))
}

pub fn nn_toy(a: &NnArgs) -> Result<Outputs> {
    let defaults = NnSelectConfig::default();
    let cfg = NnSelectConfig {
        lambdas: a.lambdas.clone().unwrap_or(defaults.lambdas),
        alpha: a.alpha.unwrap_or(defaults.alpha),
        blocks: a.blocks.unwrap_or(defaults.blocks),
        cv_holdout: a.holdout.unwrap_or(defaults.cv_holdout),
        schedule: a.schedule.unwrap_or(defaults.schedule),
    };
    cfg.schedule.validate()?;
    let n = a.n.unwrap_or(2000);
    let dim = a.dim.unwrap_or(10);
    let separation = a.separation.unwrap_or(2.0);
    let test_size = positive(a.test_size.unwrap_or(10_000), "test size")?;
    let trials = positive(a.trials.unwrap_or(50), "trials")?;
    let seed = Seed(a.seed.unwrap_or(0));

    let reports: Vec<SelectionReport> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = seed.derive(t);
            let data = gen_gaussian_classes(n, dim, separation, s.derive(tags::DATA))?;
            let test = gen_gaussian_classes(test_size, dim, separation, s.derive(tags::TEST_DATA))?;
            ddl_core::neural::select_lambda_nn(&data, &test, &cfg, s)
        })
        .collect::<ddl_core::Result<_>>()?;

    let params = json!({
        "n": n, "dim": dim, "separation": separation, "test_size": test_size,
        "config": cfg, "trials": trials, "seed": seed.0,
    });
    Ok(selection_tables("nn-toy", params, &reports, a.scores_out.as_ref()))
}

pub fn analysis_curves(a: &AnalysisArgs) -> Result<Outputs> {
    let mut ks = a.k.clone().unwrap_or_else(|| vec![10]);
    ks.sort_unstable();
    ks.dedup();
    let ns = sorted_unique(a.n.clone().unwrap_or_else(|| vec![1e3, 1e4, 1e5]), "n")?;
    let fk = a.fk.unwrap_or(1.0);
    let points = positive(a.points.unwrap_or(199), "points")?;

    let params = json!({"k": ks, "n": ns, "fk": fk, "points": points});
    let mut curves = Table::new(comment("analysis-curves", "mse_curve_v1", params.clone()), "k,n,fk,alpha,mse_bits2");
    let mut optimum = Table::new(
        comment("analysis-curves", "optimal_alpha_v1", params),
        "k,n,fk,stationary_alpha,closed_form_alpha,leading_order_alpha,saturated",
    );
    for &k in &ks {
        for &n in &ns {
            let p = AnalysisParams::new(k, n, fk)?;
            for (alpha, mse) in mse_curve(&p, points) {
                curves.push(format!("{k},{},{}", reals(&[n, fk]), reals(&[alpha, mse])));
            }
            let o = optimal_alpha(&p)?;
            optimum.push(format!(
                "{k},{},{},{}",
                reals(&[n, fk]),
                reals(&[o.stationary, o.closed_form, o.leading_order]),
                u8::from(o.saturated)
            ));
        }
    }
    let extra = a.optimum_out.clone().map(|p| vec![(p, optimum)]).unwrap_or_default();
    Ok(Outputs { main: curves, extra })
}
