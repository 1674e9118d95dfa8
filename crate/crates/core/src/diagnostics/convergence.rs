use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// What an observable is expected to do under refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// Self-convergence at `order ± tol`, from consecutive triples
    /// `p = log(|f₁ − f₂| / |f₂ − f₃|) / log(ratio)`.
    Order { order: f64, tol: f64 },
    /// Convergence to a known value at `order ± tol`, from consecutive
    /// pairs of errors.
    OrderTo { exact: f64, order: f64, tol: f64 },
    /// Consecutive values differ by at most `rel_tol` relative.
    Cauchy { rel_tol: f64 },
}

/// An observable the scenario reports and how it is judged.
#[derive(Debug, Clone, PartialEq)]
pub struct Designation {
    pub name: String,
    pub expect: Expectation,
}

impl Designation {
    pub fn new(name: &str, expect: Expectation) -> Self {
        Self { name: String::from(name), expect }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableReport {
    pub name: String,
    pub expect: Expectation,
    /// One value per resolution.
    pub values: Vec<f64>,
    /// Observed orders (or relative differences for `Cauchy`).
    pub measured: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    pub observables: Vec<ObservableReport>,
}

impl ConvergenceReport {
    pub fn pass(&self) -> bool {
        self.observables.iter().all(|o| o.pass)
    }

    /// Names of the observables that missed their expectation.
    pub fn failures(&self) -> Vec<&str> {
        self.observables.iter().filter(|o| !o.pass).map(|o| o.name.as_str()).collect()
    }
}

/// Runs `scenario` at each resolution (coarse to fine, ideally a constant
/// ratio) and judges every designated observable. The scenario returns
/// `(name, value)` pairs; a designated name it does not report is an
/// error. Needs at least three resolutions.
pub fn convergence_runner<F>(
    resolutions: &[usize],
    designations: &[Designation],
    mut scenario: F,
) -> Result<ConvergenceReport>
where
    F: FnMut(usize) -> Result<Vec<(String, f64)>>,
{
    if resolutions.len() < 3 {
        return Err(Error::InvalidParameter { name: "resolutions", reason: "need at least three resolutions" });
    }
    let runs = resolutions.iter().map(|&n| scenario(n)).collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = resolutions.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let mut observables = Vec::with_capacity(designations.len());
    for d in designations {
        let values = runs
            .iter()
            .map(|run| run.iter().find(|(n, _)| *n == d.name).map(|(_, v)| *v))
            .collect::<Option<Vec<f64>>>()
            .ok_or(Error::InvalidParameter { name: "observable", reason: "designated observable not reported" })?;
        let (measured, pass) = judge(&values, &ratios, d.expect);
        observables.push(ObservableReport { name: d.name.clone(), expect: d.expect, values, measured, pass });
    }
    Ok(ConvergenceReport { resolutions: resolutions.to_vec(), observables })
}

fn judge(values: &[f64], ratios: &[f64], expect: Expectation) -> (Vec<f64>, bool) {
    match expect {
        Expectation::Order { order, tol } => {
            let orders: Vec<f64> = (0..values.len() - 2)
                .map(|k| {
                    let (d1, d2) = ((values[k] - values[k + 1]).abs(), (values[k + 1] - values[k + 2]).abs());
                    (d1 / d2).ln() / ratios[k + 1].ln()
                })
                .collect();
            let pass = orders.iter().all(|p| (p - order).abs() <= tol);
            (orders, pass)
        }
        Expectation::OrderTo { exact, order, tol } => {
            let orders: Vec<f64> = (0..values.len() - 1)
                .map(|k| ((values[k] - exact).abs() / (values[k + 1] - exact).abs()).ln() / ratios[k].ln())
                .collect();
            let pass = orders.iter().all(|p| (p - order).abs() <= tol);
            (orders, pass)
        }
        Expectation::Cauchy { rel_tol } => {
            let rel: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs() / w[1].abs()).collect();
            let pass = rel.iter().all(|r| *r <= rel_tol);
            (rel, pass)
        }
    }
}
