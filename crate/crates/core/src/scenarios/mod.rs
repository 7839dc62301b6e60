//! Scenario descriptions: the builtin catalog of charted submanifolds with
//! known geometry, randomized parameter variants, and a line-oriented text
//! format for user scenarios.

mod catalog;
mod format;

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ambient::AmbientSpace;
use crate::crgeom::Distribution;
use crate::error::{GeomError, Result};
use crate::immersion::{ChartFn, ChartedSubmanifold, LeafChart};
use crate::theorems::{Analysis, AnalysisConfig};

pub use catalog::{builtin, builtin_names, family, Family};
pub use format::{parse_scenario, serialize, ScenarioError};

/// One monomial `coef * u_1^{e_1} ... u_k^{e_k}` added to output coordinate `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTerm {
    pub output: usize,
    pub coef: f64,
    pub exponents: Vec<u32>,
}

impl PolyTerm {
    fn eval(&self, u: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(u)
            .fold(self.coef, |acc, (&e, &x)| acc * x.powi(e as i32))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartSpec {
    Builtin { family: String, params: Vec<f64> },
    Polynomial { k: usize, terms: Vec<PolyTerm> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub counts: Vec<usize>,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub verdict: Option<f64>,
    pub identity: Option<f64>,
    pub curvature: Option<f64>,
}

/// A complete, validated description of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub ambient_m: usize,
    pub chart: ChartSpec,
    pub domain: Vec<(f64, f64)>,
    pub grid: GridSpec,
    /// Expected `(rank D, rank D⊥)`, cross-checked against the computed ones.
    pub declared_ranks: Option<(usize, usize)>,
    pub leaf_charts: Vec<LeafChart>,
    pub tolerances: ToleranceOverrides,
}

impl ScenarioSpec {
    pub fn k(&self) -> usize {
        self.domain.len()
    }

    /// Replaces the grid by `n` points per axis.
    pub fn with_samples_per_axis(mut self, n: usize) -> Self {
        self.grid.counts = vec![n; self.k()];
        self
    }

    pub fn chart_fn(&self) -> Result<ChartFn> {
        match &self.chart {
            ChartSpec::Builtin { family: name, params } => {
                let fam = family(name).ok_or_else(|| GeomError::Config(format!("unknown builtin '{name}'")))?;
                if params.len() != fam.params.len() {
                    return Err(GeomError::Config(format!(
                        "builtin '{name}' takes {} parameters, got {}",
                        fam.params.len(),
                        params.len()
                    )));
                }
                let eval = fam.eval;
                let params = params.clone();
                Ok(Arc::new(move |u: &[f64]| eval(&params, u)))
            }
            ChartSpec::Polynomial { terms, .. } => {
                let n = 4 * self.ambient_m;
                let terms = terms.clone();
                Ok(Arc::new(move |u: &[f64]| {
                    let mut v = DVector::zeros(n);
                    for t in &terms {
                        v[t.output] += t.eval(u);
                    }
                    v
                }))
            }
        }
    }

    /// The charted submanifold with its sample grid and leaf charts.
    /// `base` with this scenario's tolerance overrides applied.
    pub fn analysis_config(&self, base: AnalysisConfig) -> AnalysisConfig {
        AnalysisConfig {
            tol: self.tolerances.verdict.unwrap_or(base.tol),
            identity_tol: self.tolerances.identity.unwrap_or(base.identity_tol),
            curvature_tol: self.tolerances.curvature.unwrap_or(base.curvature_tol),
            ..base
        }
    }

    /// Builds the chart and analyses it in the flat model `H^m`.
    pub fn analyse(&self, config: AnalysisConfig) -> Result<Analysis> {
        Analysis::new(self.build()?, AmbientSpace::flat(self.ambient_m)?, config)
    }

    pub fn build(&self) -> Result<ChartedSubmanifold> {
        ChartedSubmanifold::new(self.name.clone(), self.ambient_m, self.domain.clone(), self.chart_fn()?)?
            .with_grid(&self.grid.counts, self.grid.margin)?
            .with_leaf_charts(self.leaf_charts.clone())
    }
}

fn quaternion(params: &[f64], slot: usize) -> [f64; 4] {
    [
        params[4 * slot],
        params[4 * slot + 1],
        params[4 * slot + 2],
        params[4 * slot + 3],
    ]
}

/// Randomized members of the twisted-graph families, alternating between the
/// two-factor and three-factor versions. Every third variant has a constant
/// twist `a(t) = a0`, so that both verdict outcomes are exercised.
pub fn randomized_variants(seed: u64, count: usize) -> Vec<ScenarioSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let wide = i % 2 == 1;
            let constant_twist = i % 3 == 0;
            let mut uniform = |r: f64| -> [f64; 4] { std::array::from_fn(|_| rng.random_range(-r..r)) };
            let a0 = uniform(1.0);
            let (a1, a2) = if constant_twist {
                ([0.0; 4], [0.0; 4])
            } else {
                (uniform(0.1), uniform(0.1))
            };
            let dir = uniform(1.0);
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
            let g1 = dir.map(|x| 1.8 * x / norm);
            let g2 = uniform(0.07);
            let mut params: Vec<f64> = [a0, a1, a2, g1, g2].concat();
            if wide {
                params.extend(uniform(0.5));
                params.extend(uniform(0.5));
            }
            let base = if wide { "twisted-graph-wide" } else { "twisted-graph" };
            let mut spec = builtin(base).expect("catalog family");
            spec.name = format!("variant-{i:02}");
            spec.chart = ChartSpec::Builtin {
                family: base.to_string(),
                params,
            };
            spec.with_samples_per_axis(2)
        })
        .collect()
}

pub(crate) fn leaf(distribution: Distribution, coords: &[usize]) -> LeafChart {
    LeafChart {
        distribution,
        coords: coords.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_chart_evaluates_terms() {
        let spec = ScenarioSpec {
            name: "poly".into(),
            ambient_m: 1,
            chart: ChartSpec::Polynomial {
                k: 2,
                terms: vec![
                    PolyTerm {
                        output: 0,
                        coef: 2.0,
                        exponents: vec![1, 0],
                    },
                    PolyTerm {
                        output: 3,
                        coef: -1.0,
                        exponents: vec![1, 2],
                    },
                ],
            },
            domain: vec![(-1.0, 1.0); 2],
            grid: GridSpec {
                counts: vec![3, 3],
                margin: 0.25,
            },
            declared_ranks: None,
            leaf_charts: vec![],
            tolerances: ToleranceOverrides::default(),
        };
        let f = spec.chart_fn().unwrap();
        let v = f(&[0.5, 2.0]);
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0, -2.0]);
        assert_eq!(spec.build().unwrap().sample_points().len(), 9);
    }

    #[test]
    fn variants_are_reproducible() {
        let a = randomized_variants(7, 4);
        let b = randomized_variants(7, 4);
        assert_eq!(a, b);
        assert_ne!(a, randomized_variants(8, 4));
        assert_eq!(a[1].ambient_m, 3);
        assert_eq!(a[0].grid.counts, vec![2; 5]);
    }
}
