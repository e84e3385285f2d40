//! The four subcommands. Each returns the document to write.

use ionlink::dynamics::{default_time_grid, run_protocol, validate_field_states, ChannelSpec, CoherenceDecay, RunMode};
use ionlink::metrics::{
    closed_form_concurrence, closed_form_fef, max_flight_time_for, metrics_report, MetricsReport,
};
use ionlink::space::DensityMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, Scenario, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::{csv_number, csv_optional, csv_table, json, METRIC_COLUMNS};

/// Row and column order of the serialized two-ion matrix.
const ION_PAIR_BASIS: [&str; 4] = ["e1e2", "e1g2", "g1e2", "g1g2"];
const QUBIT_BASIS: [&str; 2] = ["e", "g"];

#[derive(Debug, Serialize)]
struct MatrixParts {
    basis: Vec<&'static str>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixParts {
    fn new(rho: &DensityMatrix, basis: &[&'static str]) -> Self {
        let m = rho.matrix();
        let n = m.rows();
        Self {
            basis: basis.to_vec(),
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ClosedForm {
    concurrence: f64,
    fef: f64,
}

#[derive(Debug, Serialize)]
struct SimulationDocument {
    mode: RunMode,
    protocol: ionlink::model::EffectiveParams,
    channel: ChannelSpec,
    fidelity_to_bell: f64,
    checkpoints: Vec<ionlink::dynamics::Checkpoint>,
    metrics: MetricsReport,
    /// Closed forms of the flight channel for the same rates. Not
    /// meaningful in ideal mode, where the channel is skipped.
    closed_form: Option<ClosedForm>,
    final_two_ion_state: MatrixParts,
    flying_marginal: MatrixParts,
}

/// Outcome of one protocol run: everything `simulate` prints and the values
/// of one CSV row.
struct Evaluation {
    document: SimulationDocument,
}

impl Evaluation {
    fn metric_cells(&self) -> Vec<String> {
        let m = &self.document.metrics;
        vec![
            csv_number(m.concurrence),
            csv_number(m.fef),
            csv_optional(m.fef_oracle),
            csv_number(m.teleport_fidelity),
            csv_number(self.document.fidelity_to_bell),
        ]
    }
}

/// The single code path behind `simulate` and every `sweep` point.
fn evaluate(s: &Scenario) -> CliResult<Evaluation> {
    let result = run_protocol(&s.effective, &s.channel, s.mode)?;
    let metrics = metrics_report(&result.final_two_ion_state, s.oracle)?;
    let closed_form = (s.mode != RunMode::Ideal).then(|| ClosedForm {
        concurrence: closed_form_concurrence(&s.channel),
        fef: closed_form_fef(&s.channel),
    });
    Ok(Evaluation {
        document: SimulationDocument {
            mode: s.mode,
            protocol: s.effective,
            channel: s.channel,
            fidelity_to_bell: result.fidelity_to_bell(),
            checkpoints: result.checkpoints.clone(),
            metrics,
            closed_form,
            final_two_ion_state: MatrixParts::new(&result.final_two_ion_state, &ION_PAIR_BASIS),
            flying_marginal: MatrixParts::new(&result.flying_marginal, &QUBIT_BASIS),
        },
    })
}

fn metric_header() -> Vec<String> {
    METRIC_COLUMNS.iter().map(|c| c.to_string()).collect()
}

pub fn simulate(config: &ScenarioConfig, format: Format, seed: Option<u64>) -> CliResult<String> {
    let eval = evaluate(&config.scenario_with(&[], seed)?)?;
    match format {
        Format::Json => json(&eval.document),
        Format::Csv => Ok(csv_table(&metric_header(), &[eval.metric_cells()])),
    }
}

/// Cartesian product of the axes, last axis fastest.
fn grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |points, values| {
        points
            .iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect()
    })
}

pub fn sweep(config: &ScenarioConfig, format: Format, seed: Option<u64>) -> CliResult<String> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section with at least one axis".into()))?;
    if format != Format::Csv {
        return Err(CliError::Config("sweep writes CSV only".into()));
    }
    let names: Vec<&str> = sweep.axes.iter().map(|a| a.parameter.as_str()).collect();
    let values = sweep.axes.iter().map(|a| a.values()).collect::<CliResult<Vec<_>>>()?;
    let points = grid(&values);

    // Points run in parallel; collecting an indexed iterator keeps grid order.
    let rows = points
        .par_iter()
        .map(|point| {
            let overrides: Vec<(&str, f64)> = names.iter().copied().zip(point.iter().copied()).collect();
            let eval = evaluate(&config.scenario_with(&overrides, seed)?)?;
            let mut row: Vec<String> = point.iter().map(|&v| csv_number(v)).collect();
            row.extend(eval.metric_cells());
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut header: Vec<String> = names.iter().map(|n| n.to_string()).collect();
    header.extend(metric_header());
    Ok(csv_table(&header, &rows))
}

pub fn validate(config: &ScenarioConfig, format: Format) -> CliResult<String> {
    if format != Format::Json {
        return Err(CliError::Config("validate writes JSON only".into()));
    }
    let (params, fields, thresholds) = config.full_model()?;
    let report = validate_field_states(&params, &fields, &default_time_grid(&params), thresholds)?;
    json(&report)
}

#[derive(Debug, Serialize)]
struct BoundRow {
    gamma: f64,
    gamma_p: f64,
    velocity: Option<f64>,
    /// Seconds, or the string `"inf"`.
    t_max: serde_json::Value,
    /// Metres, or `"inf"`; absent without a velocity.
    distance_max: Option<serde_json::Value>,
}

fn json_number_or_inf(x: f64) -> serde_json::Value {
    if x.is_infinite() {
        serde_json::Value::String("inf".into())
    } else {
        serde_json::json!(x)
    }
}

#[derive(Debug, Serialize)]
struct BoundsDocument {
    coherence: CoherenceDecay,
    bounds: Vec<BoundRow>,
}

pub const BOUNDS_COLUMNS: [&str; 5] = ["gamma", "gamma_p", "velocity", "t_max", "distance_max"];

pub fn bounds(
    gammas: &[f64],
    gamma_ps: &[f64],
    velocity: Option<f64>,
    coherence: CoherenceDecay,
    format: Format,
) -> CliResult<String> {
    let mut results = Vec::new();
    for &g in gammas {
        for &gp in gamma_ps {
            let b = max_flight_time_for(coherence, g, gp, velocity)?;
            results.push((g, gp, b));
        }
    }
    match format {
        Format::Json => json(&BoundsDocument {
            coherence,
            bounds: results
                .iter()
                .map(|&(gamma, gamma_p, b)| BoundRow {
                    gamma,
                    gamma_p,
                    velocity,
                    t_max: json_number_or_inf(b.t_max),
                    distance_max: b.distance_max.map(json_number_or_inf),
                })
                .collect(),
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|&(g, gp, b)| {
                    vec![
                        csv_number(g),
                        csv_number(gp),
                        csv_optional(velocity),
                        csv_number(b.t_max),
                        csv_optional(b.distance_max),
                    ]
                })
                .collect();
            let header: Vec<String> = BOUNDS_COLUMNS.iter().map(|c| c.to_string()).collect();
            Ok(csv_table(&header, &rows))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_lexicographic() {
        let g = grid(&[vec![1.0, 2.0], vec![10.0, 20.0, 30.0]]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![1.0, 10.0]);
        assert_eq!(g[1], vec![1.0, 20.0]);
        assert_eq!(g[3], vec![2.0, 10.0]);
    }

    #[test]
    fn unbounded_prints_inf() {
        let out = bounds(&[0.0], &[0.0], Some(300.0), CoherenceDecay::FullRate, Format::Csv).unwrap();
        assert_eq!(out.lines().nth(1).unwrap(), "0.00000000000e0,0.00000000000e0,3.00000000000e2,inf,inf");
        let out = bounds(&[0.0], &[0.0], None, CoherenceDecay::FullRate, Format::Json).unwrap();
        assert!(out.contains("\"t_max\": \"inf\""));
    }
}
