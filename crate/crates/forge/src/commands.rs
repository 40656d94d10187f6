use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use forge_core::bounds::{
    chen_roughgarden_reference, chen_roughgarden_threshold, claimed_bounds, fairshare_curve,
    gadget_decompose, BoundCurve, CatalogAssignment, Family, ParamAssignment,
};
use forge_core::experiments::{
    curve_csv, emit_report, generate_instance, parse_lambda_grid, read_rows_csv, run_suite,
    write_rows_csv, Caps, InstanceSpec, LambdaSpec, ReportFormat, SuiteConfig,
};
use forge_core::goodness::{
    check_goodness, fit_goodness, scan_xi, GoodnessParams, WeightDomain, XiObjective,
};
use forge_core::numeric::{q_from_f64, Extended};
use forge_core::potential::{
    certify, minimize_potential_exhaustive, potential_descent, verify_lemma1_conditions,
    EquilibriumCertificate, MoveRule, PotentialConfig,
};
use forge_core::{CostSpec, Game, Mode, Profile, Scalar, Settings, Q};

use crate::args::*;

pub fn run(cli: Cli) -> Result<ExitCode> {
    let mode: Mode = cli.mode.parse()?;
    match cli.command {
        Command::Gen(a) => gen(a, mode),
        Command::Suite(a) => suite(a, mode),
        Command::Report(a) => report(a),
        Command::Goodness(c) => goodness(c),
        Command::Potential(c) => match mode {
            Mode::Rational => potential::<Q>(c, mode),
            Mode::Float => potential::<f64>(c, mode),
        },
        Command::Bounds(c) => bounds(c),
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

/// Writes to stdout; a reader that hung up early is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
        _ => Ok(()),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => emit(text),
    }
}

fn print_json(value: &Value) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn family_of(args: &FamilyArgs) -> Result<Family> {
    Ok(Family::parse(&args.family, args.d)?)
}

fn load_game(path: &Path) -> Result<Game> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Game::from_json(&text)?)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    if let [lo, hi, n] = text.split(':').collect::<Vec<_>>()[..] {
        let (lo, hi): (f64, f64) = (lo.trim().parse()?, hi.trim().parse()?);
        let n: usize = n.trim().parse()?;
        if n < 2 {
            return Ok(vec![lo]);
        }
        return Ok((0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{s}`"))
        })
        .collect()
}

fn parse_profile(text: &str) -> Result<Profile> {
    let choices = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad strategy index `{s}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Profile(choices))
}

fn gen(a: GenArgs, mode: Mode) -> Result<ExitCode> {
    let family = family_of(&a.family)?;
    let caps = Caps::default();
    let exact = mode == Mode::Rational && family != Family::FairShare;
    let mut spec = InstanceSpec::random(family, a.seed, &caps, exact);
    if let Some(n) = a.players {
        spec.n_players = n;
    }
    if let Some(m) = a.resources {
        spec.n_resources = m;
    }
    if let Some(k) = a.strategies {
        spec.strategies_per_player = k;
    }
    let game = generate_instance(&spec, &caps)?;
    let mut text = game.to_json()?;
    text.push('\n');
    write_output(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn suite(a: SuiteArgs, mode: Mode) -> Result<ExitCode> {
    let family = family_of(&a.family)?;
    let lambdas = parse_lambda_grid(&a.lambda_grid)?;
    let config = SuiteConfig::new(family, lambdas, a.count, a.seed, mode);
    let outcome = run_suite(&config)?;
    let mut csv = Vec::new();
    write_rows_csv(&outcome.rows, &mut csv)?;
    write_output(a.out.as_deref(), std::str::from_utf8(&csv)?)?;
    if let Some(path) = &a.failures {
        let mut lines = String::new();
        for f in &outcome.failures {
            lines.push_str(&serde_json::to_string(f)?);
            lines.push('\n');
        }
        fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?;
    }
    eprint!("{}", emit_report(&outcome.rows, ReportFormat::Summary)?);
    if a.strict && !outcome.failures.is_empty() {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn report(a: ReportArgs) -> Result<ExitCode> {
    let format: ReportFormat = a.format.parse()?;
    let text = read_input(&a.input)?;
    let rows = read_rows_csv(text.as_bytes())?;
    if rows.is_empty() {
        bail!("no rows in {}", a.input);
    }
    emit(&emit_report(&rows, format)?)?;
    Ok(ExitCode::SUCCESS)
}

fn domain_of(d: &DomainArgs) -> Result<(CostSpec, WeightDomain)> {
    let cost: CostSpec =
        serde_json::from_str(&read_input(&d.cost)?).context("parsing cost spec")?;
    let domain = match &d.game {
        Some(path) => WeightDomain::of_game(&load_game(path)?),
        None => WeightDomain::new(d.w_min, d.w_max, d.total)?,
    };
    Ok((cost, domain))
}

fn goodness(c: GoodnessCommand) -> Result<ExitCode> {
    match c {
        GoodnessCommand::Fit { domain, xi } => {
            let (cost, dom) = domain_of(&domain)?;
            let fit = fit_goodness(&cost, xi, &dom, domain.density)?;
            print_json(&json!({ "cost": cost, "domain": dom, "fit": fit }))?;
            Ok(ExitCode::SUCCESS)
        }
        GoodnessCommand::Check {
            domain,
            params,
            shortcut,
        } => {
            let (cost, dom) = domain_of(&domain)?;
            let v = parse_list(&params)?;
            let [a1, a2, b1, b2, xi] = v[..] else {
                bail!("--params needs alpha1,alpha2,beta1,beta2,xi");
            };
            let params = GoodnessParams::new(a1, a2, b1, b2, xi)?;
            let report = check_goodness(&cost, &params, &dom, domain.density, shortcut)?;
            let satisfied = report.satisfied;
            print_json(
                &json!({ "cost": cost, "domain": dom, "params": params, "report": report }),
            )?;
            Ok(if satisfied {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        GoodnessCommand::ScanXi {
            domain,
            xi_grid,
            objective,
        } => {
            let (cost, dom) = domain_of(&domain)?;
            let grid = parse_list(&xi_grid)?;
            let objective = match objective {
                Objective::Alpha => XiObjective::Alpha,
                Objective::Beta => XiObjective::Beta,
            };
            let scan = scan_xi(&cost, &dom, &grid, objective, domain.density)?;
            print_json(&json!({ "cost": cost, "domain": dom, "scan": scan }))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn extended<S: Scalar>(v: &Extended<S>) -> Value {
    match v.finite() {
        Some(x) => json!(x.to_f64()),
        None => json!("inf"),
    }
}

fn parse_extended<S: Scalar>(text: &str) -> Result<Extended<S>> {
    if matches!(text.trim(), "inf" | "infinity") {
        return Ok(Extended::Infinite);
    }
    Ok(Extended::Finite(S::from_q(&forge_core::numeric::parse_q(
        text,
    )?)))
}

fn certificate_json<S: Scalar>(c: &EquilibriumCertificate<S>) -> Value {
    json!({
        "profile": c.profile,
        "alpha": extended(&c.alpha),
        "beta": extended(&c.beta),
        "social_cost": c.social_cost.to_f64(),
        "optimum": c.optimum.to_f64(),
        "optimal_profile": c.optimal_profile,
        "deviations_checked": c.deviations_checked,
        "passed": c.passed,
    })
}

/// The game with the family's cap applied, its split form, and the catalog configuration.
struct Catalog<S> {
    family: Family,
    lambda: Q,
    game: Game,
    split: Game,
    config: PotentialConfig<S>,
}

fn catalog<S: Scalar>(a: &CatalogArgs) -> Result<Catalog<S>> {
    let family = family_of(&a.family)?;
    let game = load_game(&a.game)?;
    let lambda = match a.lambda.parse::<LambdaSpec>()? {
        LambdaSpec::Value(q) => q,
        LambdaSpec::LnTotal => q_from_f64(Scalar::to_f64(&game.total_weight()).ln())?,
    };
    let game = if family == Family::FairShare {
        game.with_fairshare_cap(&lambda)
    } else {
        game
    };
    let split = gadget_decompose(&game)?;
    let config = CatalogAssignment::new(family, S::from_q(&lambda))?.config(&split)?;
    Ok(Catalog {
        family,
        lambda,
        game,
        split,
        config,
    })
}

fn header<S: Scalar>(mode: Mode, c: &Catalog<S>) -> Result<(Value, S, S)> {
    let (alpha, beta) = claimed_bounds(c.family, &S::from_q(&c.lambda), &c.game)?;
    let head = json!({
        "mode": format!("{mode:?}").to_lowercase(),
        "family": c.family.to_string(),
        "lambda": Scalar::to_f64(&c.lambda),
        "claimed_alpha": alpha.to_f64(),
        "claimed_beta": beta.to_f64(),
    });
    Ok((head, alpha, beta))
}

fn merge(mut head: Value, tail: Value) -> Value {
    if let (Some(h), Value::Object(t)) = (head.as_object_mut(), tail) {
        h.extend(t);
    }
    head
}

fn potential<S: Scalar>(c: PotentialCommand, mode: Mode) -> Result<ExitCode> {
    let settings = Settings::default();
    let (value, passed) = match c {
        PotentialCommand::Minimize { catalog: a } => {
            let cat = catalog::<S>(&a)?;
            let (head, alpha, beta) = header(mode, &cat)?;
            let (profile, phi) = minimize_potential_exhaustive(&cat.split, &cat.config, &settings)?;
            let cert = certify(
                &cat.game,
                &profile,
                &Extended::Finite(alpha),
                &Extended::Finite(beta),
                &settings,
            )?;
            let body = json!({ "potential": phi.to_f64(), "certificate": certificate_json(&cert) });
            (merge(head, body), cert.passed)
        }
        PotentialCommand::Descend {
            catalog: a,
            start,
            rule,
        } => {
            let cat = catalog::<S>(&a)?;
            let (head, alpha, _) = header(mode, &cat)?;
            let start = match start {
                Some(text) => parse_profile(&text)?,
                None => Profile(vec![0; cat.game.n_players()]),
            };
            let rule = match rule {
                Rule::Best => MoveRule::BestImprovement,
                Rule::First => MoveRule::FirstImprovement,
            };
            let result = potential_descent(&cat.split, &cat.config, &start, rule)?;
            // Only alpha is guaranteed at a local minimum of the potential.
            let cert = certify(
                &cat.game,
                &result.profile,
                &Extended::Finite(alpha),
                &Extended::Infinite,
                &settings,
            )?;
            let body = json!({
                "start": start,
                "moves": result.moves,
                "potential": result.potential.to_f64(),
                "certificate": certificate_json(&cert),
            });
            (merge(head, body), cert.passed)
        }
        PotentialCommand::VerifyLemma1 { catalog: a } => {
            let cat = catalog::<S>(&a)?;
            let (head, _, _) = header(mode, &cat)?;
            let report = verify_lemma1_conditions(&cat.split, &cat.config, &settings)?;
            let params: Vec<GoodnessParams<f64>> =
                cat.config.params().iter().map(|p| p.to_f64()).collect();
            let resources: Vec<&str> = cat
                .split
                .resources()
                .iter()
                .map(|r| r.id.as_str())
                .collect();
            let passed = report.passed;
            let body = json!({ "resources": resources, "params": params, "report": report });
            (merge(head, body), passed)
        }
        PotentialCommand::Certify {
            game,
            profile,
            alpha,
            beta,
        } => {
            let game = load_game(&game)?;
            let profile = parse_profile(&profile)?;
            let cert = certify::<S>(
                &game,
                &profile,
                &parse_extended(&alpha)?,
                &parse_extended(&beta)?,
                &settings,
            )?;
            let head = json!({ "mode": format!("{mode:?}").to_lowercase() });
            (
                merge(head, json!({ "certificate": certificate_json(&cert) })),
                cert.passed,
            )
        }
    };
    print_json(&value)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn csv_of<const N: usize>(headers: [&str; N], rows: &[[String; N]]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn bounds(c: BoundsCommand) -> Result<ExitCode> {
    let text = match c {
        BoundsCommand::Curve {
            family,
            lambda,
            points,
            w_max,
            total,
        } => {
            let family = family_of(&family)?;
            let weights = match (w_max, total) {
                (Some(w), Some(t)) => Some((w, t)),
                (None, None) => None,
                _ => bail!("--w-max and --total go together"),
            };
            let curve = BoundCurve::new(family, weights)?;
            let samples = match lambda {
                Some(list) => parse_list(&list)?
                    .into_iter()
                    .map(|l| curve.at(l).map(|(a, b)| (l, a, b)))
                    .collect::<forge_core::Result<Vec<_>>>()?,
                None => curve.sample(points)?,
            };
            curve_csv(&samples)?
        }
        BoundsCommand::Fig1 {
            panel,
            points,
            w_max_limit,
            w_max,
            total,
            alpha_limit,
        } => match panel {
            Panel::Left => {
                if !(w_max_limit >= 1.0) || points < 2 {
                    bail!("need --w-max-limit >= 1 and at least two points");
                }
                let rows = (0..points)
                    .map(|k| {
                        let w = 1.0 + (w_max_limit - 1.0) * k as f64 / (points - 1) as f64;
                        let (alpha, _) = fairshare_curve(1.0, w, w)?;
                        Ok([
                            w.to_string(),
                            alpha.to_string(),
                            chen_roughgarden_threshold(w).to_string(),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()?;
                csv_of(["w_max", "alpha", "reference_alpha"], &rows)?
            }
            Panel::Right => {
                let mut rows = Vec::new();
                let curve = BoundCurve::new(Family::FairShare, Some((w_max, total)))?;
                let top = alpha_limit - w_max.ln();
                if top > 1.0 {
                    for (_, a, b) in curve.with_range(1.0, top)?.sample(points)? {
                        rows.push(["ours".to_string(), a.to_string(), b.to_string()]);
                    }
                }
                let floor = 2.0 * chen_roughgarden_threshold(w_max);
                for k in 0..points.max(2) {
                    let f = floor
                        + (alpha_limit - floor).max(0.0) * k as f64 / (points.max(2) - 1) as f64;
                    let (a, b) = chen_roughgarden_reference(w_max, total, f)?;
                    rows.push(["reference".to_string(), a.to_string(), b.to_string()]);
                }
                csv_of(["curve", "alpha", "beta"], &rows)?
            }
        },
    };
    emit(&text)?;
    Ok(ExitCode::SUCCESS)
}
