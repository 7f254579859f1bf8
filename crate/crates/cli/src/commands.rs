use std::path::Path;

use anyhow::{Context, Result};
use nonlocal::bitcore::{parse_function, parse_prior_with, BooleanFunction, PriorDistribution};
use nonlocal::boxes::{
    and_protocol_from_two_boxes, box_success_exact, is_nonsignalling, marginals_uniform,
    monte_carlo_success, noisy_pr_box, perfect_nlc_box, pr_box, protocol_success_exact,
    task_success_exact, BoxProtocol, CorrelationBox, XorTask, DEFAULT_BOX_TOL,
};
use nonlocal::lpsolve::{worst_case_mixture, worst_case_prior};
use nonlocal::nlvalue::{
    brute_force_optimum, classical_optimum, multiparty_strategy, multiparty_value_exact,
    quantum_bound,
};
use nonlocal::xorgame::{
    bell_inequality, game_from_nlc, no_advantage_certificate, seesaw_quantum_bias, GameMatrix,
    SeesawOptions,
};
use nonlocal::Error;
use serde_json::{json, Value};

use crate::output::CommandResult;
use crate::{BoxCommand, Command, TaskArgs};

/// Largest allowed gap between two computations of the same value.
const AGREEMENT_TOL: f64 = 1e-9;

struct Task {
    f: BooleanFunction,
    prior: PriorDistribution,
}

impl Task {
    fn parse(args: &TaskArgs) -> Result<Self> {
        let f = parse_function(&args.function)?;
        let prior = parse_prior_with(&args.prior, f.width(), args.renormalize)?;
        Ok(Task { f, prior })
    }

    fn inputs(&self) -> Value {
        json!({ "function": self.f.to_spec(), "prior": self.prior.probs() })
    }
}

fn bits(table: &[bool]) -> Vec<u8> {
    table.iter().map(|&b| b as u8).collect()
}

pub fn run(command: Command) -> Result<CommandResult> {
    match command {
        Command::Value(args) => value(&Task::parse(&args)?),
        Command::Bruteforce(args) => bruteforce(&Task::parse(&args)?),
        Command::Certificate {
            game,
            function,
            prior,
            renormalize,
            tol,
            seed,
            restarts,
            dim,
        } => {
            let (g, inputs) = match (game, function) {
                (Some(path), _) => {
                    let g = GameMatrix::from_csv_path(&path)
                        .with_context(|| format!("reading game {}", path.display()))?;
                    let inputs = json!({ "game": g.to_rows() });
                    (g, inputs)
                }
                (None, Some(function)) => {
                    let task = Task::parse(&TaskArgs {
                        function,
                        prior: prior.unwrap_or_else(|| "uniform".into()),
                        renormalize,
                    })?;
                    (game_from_nlc(&task.f, &task.prior)?, task.inputs())
                }
                (None, None) => unreachable!("clap requires --game or --fn"),
            };
            let opts = SeesawOptions {
                dim,
                restarts,
                seed,
                ..SeesawOptions::default()
            };
            certificate(&g, inputs, tol, &opts)
        }
        Command::Bell { task, out } => bell(&Task::parse(&task)?, &out),
        Command::Boxes(BoxCommand::Simulate {
            protocol,
            task,
            trials,
            seed,
        }) => simulate(&protocol, &Task::parse(&task)?, trials, seed),
        Command::Boxes(BoxCommand::Analyze { path }) => analyze(&path),
        Command::Minimax { function } => minimax(&parse_function(&function)?),
        Command::Multiparty { task, m } => multiparty(&Task::parse(&task)?, m),
    }
}

fn value(task: &Task) -> Result<CommandResult> {
    let report = classical_optimum(&task.f, &task.prior)?;
    let quantum = quantum_bound(&task.f, &task.prior)?;
    let payload = json!({
        "function": task.f.to_spec(),
        "n": task.f.width(),
        "classical_value": report.value,
        "quantum_bound": quantum,
        "u": report.strategy.u.to_string(),
        "delta": report.strategy.delta,
        "spectrum_argmax": report.spectrum_argmax.to_string(),
        "coefficient": report.coefficient,
    });
    Ok(CommandResult::new("value", &task.inputs(), None, payload))
}

fn bruteforce(task: &Task) -> Result<CommandResult> {
    let brute = brute_force_optimum(&task.f, &task.prior)?;
    let closed = classical_optimum(&task.f, &task.prior)?.value;
    let gap = (brute.value - closed).abs();
    if gap > AGREEMENT_TOL {
        return Err(Error::Numerical(format!(
            "brute force {} disagrees with closed form {closed} by {gap:e}",
            brute.value
        ))
        .into());
    }
    let payload = json!({
        "function": task.f.to_spec(),
        "n": task.f.width(),
        "brute_force_value": brute.value,
        "closed_form_value": closed,
        "difference": gap,
        "alice": bits(brute.best.alice()),
        "bob": bits(brute.best.bob()),
    });
    Ok(CommandResult::new(
        "bruteforce",
        &task.inputs(),
        None,
        payload,
    ))
}

fn certificate(
    g: &GameMatrix,
    inputs: Value,
    tol: f64,
    opts: &SeesawOptions,
) -> Result<CommandResult> {
    let report = no_advantage_certificate(g, tol)?;
    let seesaw = seesaw_quantum_bias(g, opts)?;
    let value = |bias: f64| 0.5 * (1.0 + bias);
    let payload = json!({
        "rows": g.rows(),
        "cols": g.cols(),
        "hadamard_bias": report.hadamard_bias,
        "norm_bound_bias": report.norm_bound_bias,
        "classical_bias": report.classical_bias,
        "seesaw_bias": seesaw.bias,
        "hadamard_value": value(report.hadamard_bias),
        "norm_bound_value": value(report.norm_bound_bias),
        "classical_value": report.classical_bias.map(value),
        "seesaw_value": value(seesaw.bias),
        "witness_u": report.witness_u,
        "witness_v": report.witness_v,
        "tol": report.tol,
        "passes": report.passes,
    });
    let inputs = json!({
        "game": inputs,
        "tol": tol,
        "seesaw": { "dim": opts.dim, "restarts": opts.restarts },
    });
    Ok(CommandResult::new(
        "certificate",
        &inputs,
        Some(opts.seed),
        payload,
    ))
}

fn bell(task: &Task, out: &Path) -> Result<CommandResult> {
    let ineq = bell_inequality(&task.f, &task.prior)?;
    std::fs::write(out, ineq.to_json()).with_context(|| format!("writing {}", out.display()))?;
    let payload = json!({
        "n": ineq.n,
        "K": ineq.bound,
        "out": out.display().to_string(),
        "saturating_u": ineq.saturating.u.to_string(),
        "saturating_delta": ineq.saturating.delta,
    });
    Ok(CommandResult::new("bell", &task.inputs(), None, payload))
}

enum Resource {
    Protocol(BoxProtocol),
    Box(CorrelationBox),
}

fn parse_resource(spec: &str) -> Result<Resource> {
    if spec == "pr-and" {
        return Ok(Resource::Protocol(and_protocol_from_two_boxes(
            &pr_box(),
            &pr_box(),
        )?));
    }
    if let Some(rest) = spec.strip_prefix("noisy-pr-and:") {
        let p: f64 = rest
            .strip_prefix("p=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                Error::Parse(format!("expected noisy-pr-and:p=<float>, got {spec:?}"))
            })?;
        let b = noisy_pr_box(p)?;
        return Ok(Resource::Protocol(and_protocol_from_two_boxes(&b, &b)?));
    }
    if let Some(function) = spec.strip_prefix("perfect:") {
        return Ok(Resource::Box(perfect_nlc_box(&parse_function(function)?)?));
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading protocol {spec}"))?;
    let raw: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
    if raw.get("boxes").is_some() {
        Ok(Resource::Protocol(BoxProtocol::from_json(&text)?))
    } else {
        Ok(Resource::Box(CorrelationBox::from_json(&text)?))
    }
}

fn simulate(spec: &str, task: &Task, trials: u64, seed: u64) -> Result<CommandResult> {
    let resource = parse_resource(spec)?;
    let (estimate, exact, json) = match &resource {
        Resource::Protocol(p) => (
            monte_carlo_success(p, &task.f, &task.prior, trials, seed)?,
            protocol_success_exact(p, &task.f, &task.prior)?,
            serde_json::to_value(p)?,
        ),
        Resource::Box(b) => (
            monte_carlo_success(b, &task.f, &task.prior, trials, seed)?,
            box_success_exact(b, &task.f, &task.prior)?,
            serde_json::to_value(b)?,
        ),
    };
    let payload = json!({
        "protocol": spec,
        "function": task.f.to_spec(),
        "trials": estimate.trials,
        "successes": estimate.successes,
        "estimate": estimate.estimate,
        "std_error": estimate.std_error,
        "exact": exact,
    });
    let mut inputs = task.inputs();
    inputs["resource"] = json;
    inputs["trials"] = json!(trials);
    Ok(CommandResult::new(
        "boxes simulate",
        &inputs,
        Some(seed),
        payload,
    ))
}

fn analyze(path: &Path) -> Result<CommandResult> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading box {}", path.display()))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let inputs = json!({ "box": raw });
    let payload = match CorrelationBox::from_json(&text) {
        Ok(b) => {
            let chsh = if (b.nx(), b.ny()) == (1, 1) {
                Some(task_success_exact(&b, &XorTask::chsh())?)
            } else {
                None
            };
            json!({
                "valid": true,
                "nx": b.nx(),
                "ny": b.ny(),
                "nonsignalling": is_nonsignalling(&b, DEFAULT_BOX_TOL),
                "marginals_uniform": marginals_uniform(&b, DEFAULT_BOX_TOL),
                "tolerance": DEFAULT_BOX_TOL,
                "chsh_success": chsh,
            })
        }
        Err(e) => json!({ "valid": false, "reason": e.to_string() }),
    };
    Ok(CommandResult::new("boxes analyze", &inputs, None, payload))
}

fn minimax(f: &BooleanFunction) -> Result<CommandResult> {
    let primal = worst_case_mixture(f)?;
    let dual = worst_case_prior(f)?;
    let mixture: Vec<Value> = primal
        .support()
        .iter()
        .map(|s| json!({ "u": s.u.to_string(), "delta": s.delta, "weight": s.weight }))
        .collect();
    let payload = json!({
        "function": f.to_spec(),
        "n": f.width(),
        "worst_case_value": primal.worst_case_value,
        "prior_side_value": dual.worst_case_value,
        "duality_gap": primal.duality_gap,
        "worst_prior": dual.worst_prior.probs(),
        "optimal_mixture": mixture,
    });
    Ok(CommandResult::new(
        "minimax",
        &json!({ "function": f.to_spec() }),
        None,
        payload,
    ))
}

fn multiparty(task: &Task, m: usize) -> Result<CommandResult> {
    let report = classical_optimum(&task.f, &task.prior)?;
    let tables = multiparty_strategy(m, &report.strategy.u, report.strategy.delta)?;
    let value = multiparty_value_exact(&tables, &task.f, &task.prior)?;
    let gap = (value - report.value).abs();
    if gap > AGREEMENT_TOL {
        return Err(Error::Numerical(format!(
            "{m}-party value {value} differs from the 2-party optimum {} by {gap:e}",
            report.value
        ))
        .into());
    }
    let payload = json!({
        "function": task.f.to_spec(),
        "m": m,
        "multiparty_value": value,
        "two_party_value": report.value,
        "u": report.strategy.u.to_string(),
        "delta": report.strategy.delta,
    });
    let mut inputs = task.inputs();
    inputs["m"] = json!(m);
    Ok(CommandResult::new("multiparty", &inputs, None, payload))
}
