//! Training by reverse-derivative ascent.
//!
//! A model is a circuit whose leading wires are parameters and whose
//! remaining wires are inputs. One update evaluates the model, maps the
//! prediction and target to an output change with a configurable error map,
//! pulls that change back through the reverse derivative, and adds the
//! parameter block of the result onto the parameters — there is no learning
//! rate, because a semiring has no scalar step sizes. Training is a pure
//! function of its arguments: samples are visited in dataset order and the
//! only randomness is the seeded parameter initializer.
//!
//! [`wrap_around_demo`] reproduces the weight-tying pitfall that motivates
//! saturating carriers: two sub-models share one parameter, their unit
//! gradients meet in the reverse rule for copying, and the reported update is
//! `1 + 1` in the active semiring — `0` modulo two, `1` saturating.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Generator, Shape};
use crate::error::{Error, Result};
use crate::eval::{count_tuples, eval, tuples, DEFAULT_BUDGET};
use crate::rdiff::reverse;
use crate::semiring::Semiring;

/// A circuit together with the split of its wires into parameters and inputs.
#[derive(Debug, Clone)]
pub struct Model {
    pub circuit: Circuit,
    pub param_arity: usize,
    pub input_arity: usize,
}

impl Model {
    /// Wraps a circuit of shape `params + inputs -> outputs`.
    pub fn new(circuit: Circuit, param_arity: usize, input_arity: usize) -> Result<Model> {
        if circuit.arity() != param_arity + input_arity {
            return Err(Error::ShapeMismatch {
                left: circuit.shape(),
                right: Shape::new(param_arity + input_arity, circuit.coarity()),
                context: "model parameter split".into(),
            });
        }
        Ok(Model { circuit, param_arity, input_arity })
    }

    pub fn output_arity(&self) -> usize {
        self.circuit.coarity()
    }
}

/// Supervised samples: pairs of an input tuple and a target tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub input_arity: usize,
    pub output_arity: usize,
    pub samples: Vec<(Vec<u64>, Vec<u64>)>,
}

impl Dataset {
    /// Parses CSV with header `x0,..,x{a-1},y0,..,y{b-1}` and one sample per
    /// row, in file order. Codes must lie in the active carrier; unlike a
    /// function table, rows may repeat and need not cover the input space.
    pub fn from_csv(desc: &Semiring, text: &str) -> Result<Dataset> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Invalid("dataset is empty".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let input_arity = cols.iter().take_while(|c| c.starts_with('x')).count();
        let output_arity = cols.len() - input_arity;
        for (i, c) in cols.iter().enumerate() {
            let expected = if i < input_arity {
                format!("x{i}")
            } else {
                format!("y{}", i - input_arity)
            };
            if *c != expected {
                return Err(Error::Invalid(format!(
                    "dataset header column {} is `{c}`, expected `{expected}`",
                    i + 1
                )));
            }
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != input_arity + output_arity {
                return Err(Error::Invalid(format!(
                    "dataset row {} has {} cells, expected {}",
                    lineno + 1,
                    cells.len(),
                    input_arity + output_arity
                )));
            }
            let parse = |cell: &str| -> Result<u64> {
                let v: u64 = cell.parse().map_err(|_| {
                    Error::Invalid(format!(
                        "dataset row {}: `{cell}` is not a code",
                        lineno + 1
                    ))
                })?;
                desc.check_value(v)?;
                Ok(v)
            };
            let x: Vec<u64> = cells[..input_arity].iter().map(|c| parse(c)).collect::<Result<_>>()?;
            let y: Vec<u64> = cells[input_arity..].iter().map(|c| parse(c)).collect::<Result<_>>()?;
            samples.push((x, y));
        }
        Ok(Dataset { input_arity, output_arity, samples })
    }

    /// CSV with the same header convention as [`Dataset::from_csv`].
    pub fn to_csv(&self) -> Result<String> {
        if self.input_arity == 0 && self.output_arity == 0 {
            return Err(Error::Invalid("a dataset over no wires has no columns to write".into()));
        }
        let mut out = String::new();
        let header: Vec<String> = (0..self.input_arity)
            .map(|i| format!("x{i}"))
            .chain((0..self.output_arity).map(|j| format!("y{j}")))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (x, y) in &self.samples {
            let cells: Vec<String> = x.iter().chain(y.iter()).map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// How the parameter block starts out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamInit {
    Explicit(Vec<u64>),
    /// Each parameter drawn uniformly from the carrier with the run's seed.
    SeededUniform,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Maps `(prediction, target)` to the output change fed to the reverse
    /// derivative; shape `2b -> b`, and it must send `(y, y)` to zero.
    pub error_map: Circuit,
    pub init: ParamInit,
}

/// The stock error map: componentwise addition of prediction and target,
/// which over the integers modulo 2 is exclusive-or. It vanishes on agreeing
/// pairs only where `y + y = 0`, so other carriers need
/// [`difference_error_map`] or a custom circuit.
pub fn default_error_map(output_arity: usize) -> Circuit {
    Circuit::add_n(output_arity)
}

/// The displacement `target - prediction`, available whenever the carrier
/// has additive inverses. It vanishes on agreement and is the unique change
/// with `prediction + change = target`.
pub fn difference_error_map(output_arity: usize) -> Circuit {
    let negate = Circuit::tensor_list((0..output_arity).map(|_| Circuit::gen(Generator::Negate)));
    Circuit::seq_list([
        Circuit::tensor(&negate, &Circuit::id(output_arity)),
        Circuit::add_n(output_arity),
    ])
    .expect("difference map is well-shaped")
}

/// Snapshot after one pass over the dataset: exact-match accuracy and the
/// parameters in force at the end of the pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub accuracy: f64,
    pub params: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub params: Vec<u64>,
    pub epochs: Vec<EpochMetrics>,
}

fn joined(parts: &[&[u64]]) -> Vec<u64> {
    let mut out = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        out.extend_from_slice(p);
    }
    out
}

fn check_sample(m: &Model, params: &[u64], x: &[u64], y: &[u64]) -> Result<()> {
    if params.len() != m.param_arity || x.len() != m.input_arity || y.len() != m.output_arity() {
        return Err(Error::Invalid(format!(
            "sample shape ({}, {}, {}) does not match the model's ({}, {}, {})",
            params.len(),
            x.len(),
            y.len(),
            m.param_arity,
            m.input_arity,
            m.output_arity()
        )));
    }
    Ok(())
}

fn step_once(
    desc: &Semiring,
    m: &Model,
    rev: &Circuit,
    error_map: &Circuit,
    params: &[u64],
    x: &[u64],
    y: &[u64],
) -> Result<Vec<u64>> {
    let predicted = eval(desc, &m.circuit, &joined(&[params, x]))?;
    let change = eval(desc, error_map, &joined(&[&predicted, y]))?;
    let pulled = eval(desc, rev, &joined(&[params, x, &change]))?;
    params
        .iter()
        .zip(&pulled)
        .map(|(&p, &dp)| desc.add(p, dp))
        .collect()
}

/// One ascent update: evaluate, map the prediction and target to an output
/// change, pull it back through the reverse derivative, and add the parameter
/// block of the result onto `params`. The input block is discarded.
pub fn rda_step(
    desc: &Semiring,
    m: &Model,
    error_map: &Circuit,
    params: &[u64],
    x: &[u64],
    y: &[u64],
) -> Result<Vec<u64>> {
    check_error_map(desc, error_map, m.output_arity())?;
    check_sample(m, params, x, y)?;
    step_once(desc, m, &reverse(&m.circuit), error_map, params, x, y)
}

/// Validates an error map against an output arity: the shape must be
/// `2b -> b` and it must vanish on every agreeing pair, so that a perfect
/// prediction leaves the parameters fixed. The vanishing sweep is skipped
/// when the target space exceeds the default evaluation budget.
pub fn check_error_map(desc: &Semiring, error_map: &Circuit, output_arity: usize) -> Result<()> {
    let want = Shape::new(2 * output_arity, output_arity);
    if error_map.shape() != want {
        return Err(Error::ShapeMismatch {
            left: error_map.shape(),
            right: want,
            context: "error map".into(),
        });
    }
    let size = desc.finite_size()?;
    if matches!(count_tuples(size, output_arity), Some(n) if n <= DEFAULT_BUDGET as u128) {
        for y in tuples(size, output_arity) {
            let out = eval(desc, error_map, &joined(&[&y, &y]))?;
            if out.iter().any(|&v| v != desc.zero()) {
                return Err(Error::Invalid(format!(
                    "error map must send an agreeing pair to zero; at target {y:?} it gives {out:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Runs `cfg.epochs` sequential passes over the dataset, updating after every
/// sample, and records exact-match accuracy at the end of each pass. The
/// result is a pure function of the arguments.
pub fn train(desc: &Semiring, m: &Model, data: &Dataset, cfg: &TrainConfig) -> Result<TrainResult> {
    let size = desc.finite_size()?;
    check_error_map(desc, &cfg.error_map, m.output_arity())?;
    let mut params = match &cfg.init {
        ParamInit::Explicit(p) => {
            for &code in p {
                desc.check_value(code)?;
            }
            if p.len() != m.param_arity {
                return Err(Error::Invalid(format!(
                    "{} initial parameters for a model with {}",
                    p.len(),
                    m.param_arity
                )));
            }
            p.clone()
        }
        ParamInit::SeededUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..m.param_arity).map(|_| rng.gen_range(0..size)).collect()
        }
    };
    for (x, y) in &data.samples {
        check_sample(m, &params, x, y)?;
        for &code in x.iter().chain(y.iter()) {
            desc.check_value(code)?;
        }
    }
    let rev = reverse(&m.circuit);
    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        for (x, y) in &data.samples {
            params = step_once(desc, m, &rev, &cfg.error_map, &params, x, y)?;
        }
        let mut correct = 0usize;
        for (x, y) in &data.samples {
            if eval(desc, &m.circuit, &joined(&[&params, x]))? == *y {
                correct += 1;
            }
        }
        let accuracy = if data.samples.is_empty() {
            1.0
        } else {
            correct as f64 / data.samples.len() as f64
        };
        epochs.push(EpochMetrics { epoch, accuracy, params: params.clone() });
    }
    Ok(TrainResult { params, epochs })
}

/// What the weight-tying demo observed over one semiring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrapAroundReport {
    pub semiring: String,
    /// The requested change of the single combined output.
    pub output_change: u64,
    /// The change each sub-model asks of the shared parameter.
    pub sub_gradients: Vec<u64>,
    /// Their semiring sum: the update the parameter actually receives.
    pub param_update: u64,
    pub input_updates: Vec<u64>,
}

/// Demonstrates gradient aggregation under weight tying: one parameter is
/// copied into two single-addition sub-models applied to disjoint inputs and
/// the outputs are summed. Asking for a unit output change makes each
/// sub-gradient `1`, and the reverse rule for copying adds them, so the
/// parameter update is `1 + 1` in the active semiring.
pub fn wrap_around_demo(desc: &Semiring) -> WrapAroundReport {
    let model = Circuit::seq_list([
        Circuit::tensor(&Circuit::gen(Generator::Copy), &Circuit::id(2)),
        Circuit::tensor_list([Circuit::id(1), Circuit::gen(Generator::Twist), Circuit::id(1)]),
        Circuit::tensor(&Circuit::gen(Generator::Add), &Circuit::gen(Generator::Add)),
        Circuit::gen(Generator::Add),
    ])
    .expect("demo model is well-shaped");
    let sub = Circuit::gen(Generator::Add);
    let sub_gradients: Vec<u64> = (0..2)
        .map(|_| {
            eval(desc, &reverse(&sub), &[0, 0, 1]).expect("demo sub-model differentiates")[0]
        })
        .collect();
    let pulled = eval(desc, &reverse(&model), &[0, 0, 0, 1]).expect("demo model differentiates");
    WrapAroundReport {
        semiring: desc.id().to_string(),
        output_change: 1,
        sub_gradients,
        param_update: pulled[0],
        input_updates: pulled[1..].to_vec(),
    }
}
