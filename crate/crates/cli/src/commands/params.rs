use kds_core::geometry::roots::real_roots;
use kds_core::geometry::{fredholm_window, mu_polynomial, GeometryError};
use serde::Serialize;

use super::CommandReport;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::VERSION;
use crate::output::OutputDir;

#[derive(Debug, Serialize)]
struct ParamsOutput {
    version: &'static str,
    lambda: f64,
    a: f64,
    mass: f64,
    subextremal: bool,
    /// Real roots of μ in increasing order.
    real_roots: Vec<f64>,
    message: Option<String>,
    horizons: Option<Horizons>,
}

#[derive(Debug, Serialize)]
struct Horizons {
    r_neg: f64,
    r_cauchy: f64,
    r_e: f64,
    r_c: f64,
    kappa_e: f64,
    kappa_c: f64,
    mu_prime_critical: f64,
    delta: f64,
    beta: f64,
    /// Im σ above which the family is Fredholm at s = 1/2.
    fredholm_line_half: f64,
}

pub fn run(config: &RunConfig, out: &mut OutputDir) -> Result<CommandReport, CliError> {
    let sc = &config.spacetime;
    let mut report = CommandReport::default();
    let roots = real_roots(&mu_polynomial(sc.lambda, sc.a, sc.mass), 1e-10);
    let mut output = ParamsOutput {
        version: VERSION,
        lambda: sc.lambda,
        a: sc.a,
        mass: sc.mass,
        subextremal: false,
        real_roots: roots.clone(),
        message: None,
        horizons: None,
    };
    report.summary.push(format!("real roots of mu: {roots:?}"));
    match sc.build() {
        Ok(st) => {
            let h = &st.horizons;
            let beta = st.beta();
            output.subextremal = true;
            output.horizons = Some(Horizons {
                r_neg: h.r_neg,
                r_cauchy: h.r_cauchy,
                r_e: h.r_e,
                r_c: h.r_c,
                kappa_e: h.kappa_e,
                kappa_c: h.kappa_c,
                mu_prime_critical: st.params.mu_prime_root(),
                delta: h.delta,
                beta,
                fredholm_line_half: fredholm_window(beta, 0.5)?,
            });
            report.summary.push(format!(
                "roots r_- = {}, r_C = {}, r_e = {}, r_c = {}",
                h.r_neg, h.r_cauchy, h.r_e, h.r_c
            ));
            report.summary.push(format!("kappa_e = {}, kappa_c = {}, beta = {beta}", h.kappa_e, h.kappa_c));
            report.summary.push("subextremal: yes".into());
            report.verdict("subextremal", true);
        }
        Err(e @ GeometryError::NotSubextremal { .. }) => {
            output.message = Some(e.to_string());
            report.summary.push(format!("subextremal: no ({e})"));
            report.verdict("subextremal", false);
            report.failure = Some(CliError::Precondition(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }
    out.write_json("params.json", &output)?;
    Ok(report)
}
