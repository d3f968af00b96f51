//! One function per subcommand, each producing a [`Report`].

use std::path::Path;

use nmlg_core::{
    atten_approx, atten_exact, compute_in, envelope_1d, exact_terms, mc_atten, mc_in, ml_estimate,
    quadrature_atten_1d, quadrature_atten_2d, AttenuationResult, GaussianClass, SufficientStats, UniversalDensity,
};

use crate::args::{ClassArgs, Cli, Command, GlobalArgs, Group, MethodArg, Scale};
use crate::checks::{run_groups, VerifyOptions};
use crate::error::CliError;
use crate::input::read_sequence;
use crate::obj;
use crate::output::{Report, Table, Val};

/// A rendered-ready report and the exit code to finish with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, exit_code: 0 }
    }
}

type CmdResult = Result<Outcome, CliError>;

pub fn run(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Atten { n, class, method, samples, rel_tol } => atten(g, *n, class, *method, *samples, *rel_tol),
        Command::Scan { class, n_min, n_max, scale } => scan(class, *n_min, *n_max, *scale),
        Command::Verify { only, n, samples } => verify(g, only, *n, *samples),
        Command::Mle { class, input } => mle(class, input.as_deref()),
        Command::Logq { class, mu, sigma, input } => logq(class, *mu, *sigma, input.as_deref()),
        Command::Envelope { class, from, to, points } => envelope(class, *from, *to, *points),
        Command::In { n, samples } => in_cmd(g, *n, *samples),
    }
}

fn make_class(c: &ClassArgs) -> Result<GaussianClass, CliError> {
    Ok(GaussianClass::new(c.alpha, c.sigma_min, c.sigma_max)?)
}

fn class_config(c: &ClassArgs) -> Vec<(String, Val)> {
    vec![
        ("alpha".into(), Val::from(c.alpha)),
        ("sigma_min".into(), Val::from(c.sigma_min)),
        ("sigma_max".into(), Val::from(c.sigma_max)),
    ]
}

fn config(command: &str, mut fields: Vec<(String, Val)>) -> Val {
    fields.insert(0, ("command".into(), Val::from(command)));
    Val::Obj(fields)
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Exact => "exact",
        MethodArg::Approx => "approx",
        MethodArg::Quadrature => "quadrature",
        MethodArg::Mc => "mc",
    }
}

fn attenuation_val(r: &AttenuationResult) -> Val {
    let regions = r.regions.map_or(Val::Null, |g| obj! { "r1" => g.r1, "r2" => g.r2, "r3" => g.r3 });
    obj! {
        "attenuation" => r.value,
        "log_attenuation" => r.log_value,
        "method" => r.method.as_str(),
        "std_error" => r.std_error,
        "regions" => regions,
    }
}

fn atten(g: &GlobalArgs, n: usize, c: &ClassArgs, method: MethodArg, samples: usize, rel_tol: f64) -> CmdResult {
    let class = make_class(c)?;
    let result = match method {
        MethodArg::Exact => atten_exact(n, &class)?,
        MethodArg::Approx => atten_approx(n, &class)?,
        MethodArg::Quadrature => match n {
            1 => quadrature_atten_1d(&class, rel_tol)?.to_attenuation(),
            2 => quadrature_atten_2d(&class, rel_tol)?.to_attenuation(),
            _ => return Err(CliError::Invalid(format!("quadrature supports n = 1 or n = 2, got {n}"))),
        },
        MethodArg::Mc => mc_atten(n, &class, samples, g.seed)?.to_attenuation(),
    };
    let mut fields = vec![("n".to_string(), Val::from(n))];
    fields.extend(class_config(c));
    fields.push(("method".into(), Val::from(method_name(method))));
    let sampled = method == MethodArg::Mc;
    fields.push(("samples".into(), Val::from(sampled.then_some(samples))));
    fields.push(("seed".into(), Val::from(sampled.then_some(g.seed))));
    fields.push(("rel_tol".into(), Val::from((method == MethodArg::Quadrature).then_some(rel_tol))));
    Ok(Outcome::ok(Report {
        config: config("atten", fields),
        result: attenuation_val(&result),
        checks: None,
        table: None,
    }))
}

pub const SCAN_HEADER: [&str; 9] = ["n", "exact", "approx", "t1", "t2", "t3", "i_n", "exact_over_n", "exact_over_sqrt_n"];

fn scan_sizes(n_min: usize, n_max: usize, scale: Scale) -> Result<Vec<usize>, CliError> {
    if n_min == 0 || n_min > n_max {
        return Err(CliError::Invalid(format!("need 1 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    let sizes: Vec<usize> = match scale {
        Scale::Linear => (n_min..=n_max).collect(),
        Scale::Log2 => (0..usize::BITS).map(|k| 1usize << k).filter(|n| (n_min..=n_max).contains(n)).collect(),
    };
    if sizes.is_empty() {
        return Err(CliError::Invalid(format!("no power of two lies in {n_min}..{n_max}")));
    }
    Ok(sizes)
}

fn scan(c: &ClassArgs, n_min: usize, n_max: usize, scale: Scale) -> CmdResult {
    let class = make_class(c)?;
    let mut rows = Vec::new();
    for n in scan_sizes(n_min, n_max, scale)? {
        let terms = exact_terms(n, &class)?;
        let exact = atten_exact(n, &class)?.value;
        let approx = if n >= 2 { Val::from(atten_approx(n, &class)?.value) } else { Val::Null };
        let nf = n as f64;
        rows.push(vec![
            Val::from(n),
            Val::from(exact),
            approx,
            Val::from(terms.t1()),
            Val::from(terms.t2()),
            Val::from(terms.t3()),
            Val::from(terms.i_n),
            Val::from(exact / nf),
            Val::from(exact / nf.sqrt()),
        ]);
    }
    let header: Vec<String> = SCAN_HEADER.iter().map(|s| s.to_string()).collect();
    let objects = rows
        .iter()
        .map(|row| Val::Obj(header.iter().cloned().zip(row.iter().cloned()).collect()))
        .collect();
    let scale_name = match scale {
        Scale::Linear => "linear",
        Scale::Log2 => "log2",
    };
    let mut fields = class_config(c);
    fields.extend([
        ("n_min".to_string(), Val::from(n_min)),
        ("n_max".to_string(), Val::from(n_max)),
        ("scale".to_string(), Val::from(scale_name)),
    ]);
    Ok(Outcome::ok(Report {
        config: config("scan", fields),
        result: obj! { "rows" => Val::List(objects) },
        checks: None,
        table: Some(Table { header, rows }),
    }))
}

pub const CHECK_HEADER: [&str; 10] =
    ["group", "name", "passed", "value", "reference", "error", "tolerance", "std_error", "notes", "detail"];

fn verify(g: &GlobalArgs, only: &[Group], n: usize, samples: usize) -> CmdResult {
    let mut groups: Vec<Group> = if only.is_empty() { Group::ALL.to_vec() } else { only.to_vec() };
    groups.sort();
    groups.dedup();
    let opts = VerifyOptions { in_n: n, samples, seed: g.seed };
    let checks = run_groups(&groups, &opts)?;
    let failed = checks.iter().filter(|c| !c.passed).count();

    let rows = checks
        .iter()
        .map(|c| {
            let notes: Vec<String> =
                c.extra.iter().map(|(k, v)| format!("{k}={}", v.cell(crate::output::STRUCTURED_DIGITS))).collect();
            vec![
                Val::from(c.group),
                Val::from(c.name.as_str()),
                Val::from(c.passed),
                Val::from(c.value),
                Val::from(c.reference),
                Val::from(c.error),
                Val::from(c.tolerance),
                Val::from(c.std_error),
                Val::from(notes.join(";")),
                Val::from(c.detail.clone()),
            ]
        })
        .collect();
    let group_names: Vec<Val> = groups.iter().map(|g| Val::from(g.name())).collect();
    let report = Report {
        config: config(
            "verify",
            vec![
                ("groups".into(), Val::List(group_names)),
                ("n".into(), Val::from(n)),
                ("samples".into(), Val::from(samples)),
                ("seed".into(), Val::from(g.seed)),
            ],
        ),
        result: obj! {
            "total" => checks.len(),
            "passed" => checks.len() - failed,
            "failed" => failed,
            "all_passed" => failed == 0,
        },
        checks: Some(checks.iter().map(|c| c.to_val()).collect()),
        table: Some(Table { header: CHECK_HEADER.iter().map(|s| s.to_string()).collect(), rows }),
    };
    Ok(Outcome { report, exit_code: if failed == 0 { 0 } else { 3 } })
}

fn input_name(input: Option<&Path>) -> Val {
    Val::from(input.map_or("-".to_string(), |p| p.display().to_string()))
}

fn mle(c: &ClassArgs, input: Option<&Path>) -> CmdResult {
    let class = make_class(c)?;
    let xs = read_sequence(input)?;
    let stats = SufficientStats::from_slice(&xs)?;
    let ml = ml_estimate(&stats, &class);
    let mut fields = class_config(c);
    fields.push(("input".into(), input_name(input)));
    Ok(Outcome::ok(Report {
        config: config("mle", fields),
        result: obj! {
            "n" => stats.n(),
            "mean" => stats.mean(),
            "sse" => stats.sse(),
            "mu_hat" => ml.mu_hat,
            "sigma_hat_sq" => ml.sigma_hat_sq,
            "sigma_hat" => ml.sigma_hat(),
            "log_phat" => ml.log_phat,
        },
        checks: None,
        table: None,
    }))
}

fn logq(c: &ClassArgs, mu: Option<f64>, sigma: Option<f64>, input: Option<&Path>) -> CmdResult {
    let class = make_class(c)?;
    let xs = read_sequence(input)?;
    let stats = SufficientStats::from_slice(&xs)?;
    let u = UniversalDensity::new(class, stats.n())?;
    let log_q = u.log_q_star(&stats)?;
    let regret = match (mu, sigma) {
        (Some(m), Some(s)) => Some(u.regret(m, s, &stats)?),
        _ => None,
    };
    let mut fields = class_config(c);
    fields.extend([
        ("mu".to_string(), Val::from(mu)),
        ("sigma".to_string(), Val::from(sigma)),
        ("input".to_string(), input_name(input)),
    ]);
    Ok(Outcome::ok(Report {
        config: config("logq", fields),
        result: obj! {
            "n" => stats.n(),
            "log_q_star" => log_q,
            "bits" => u.codelength_bits(&stats)?,
            "log_phat" => log_q + u.log_atten(),
            "log_attenuation" => u.log_atten(),
            "regret" => regret,
        },
        checks: None,
        table: None,
    }))
}

fn envelope(c: &ClassArgs, from: Option<f64>, to: Option<f64>, points: usize) -> CmdResult {
    let class = make_class(c)?;
    let reach = class.half_alpha() + 4.0 * class.sigma_max();
    let (from, to) = (from.unwrap_or(-reach), to.unwrap_or(reach));
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(CliError::Invalid(format!("need finite from < to, got {from}..{to}")));
    }
    if points < 2 {
        return Err(CliError::Invalid(format!("need at least 2 points, got {points}")));
    }
    let step = (to - from) / (points - 1) as f64;
    let rows: Vec<Vec<Val>> = (0..points)
        .map(|i| {
            let x = if i + 1 == points { to } else { from + step * i as f64 };
            let p = envelope_1d(x, &class);
            vec![Val::from(x), Val::from(p), Val::from(p.ln())]
        })
        .collect();
    let header: Vec<String> = ["x", "envelope", "log_envelope"].iter().map(|s| s.to_string()).collect();
    let objects = rows
        .iter()
        .map(|row| Val::Obj(header.iter().cloned().zip(row.iter().cloned()).collect()))
        .collect();
    let mut fields = class_config(c);
    fields.extend([
        ("from".to_string(), Val::from(from)),
        ("to".to_string(), Val::from(to)),
        ("points".to_string(), Val::from(points)),
    ]);
    Ok(Outcome::ok(Report {
        config: config("envelope", fields),
        result: obj! { "points" => Val::List(objects) },
        checks: None,
        table: Some(Table { header, rows }),
    }))
}

fn in_cmd(g: &GlobalArgs, n: usize, samples: Option<usize>) -> CmdResult {
    let i_n: f64 = compute_in(n)?;
    let mc = samples.map(|s| mc_in(n, s, g.seed)).transpose()?;
    let estimate = match mc {
        Some(m) => obj! {
            "value" => m.value,
            "std_error" => m.std_error,
            "samples" => m.samples,
            "distance_to_one" => (m.value - 1.0).abs(),
            "distance_to_half" => (m.value - 0.5).abs(),
        },
        None => Val::Null,
    };
    Ok(Outcome::ok(Report {
        config: config(
            "in",
            vec![
                ("n".into(), Val::from(n)),
                ("samples".into(), Val::from(samples)),
                ("seed".into(), Val::from(samples.map(|_| g.seed))),
            ],
        ),
        result: obj! { "n" => n, "i_n" => i_n, "monte_carlo" => estimate },
        checks: None,
        table: None,
    }))
}
