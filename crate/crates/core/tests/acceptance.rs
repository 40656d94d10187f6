//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero when any fails.

use std::process::ExitCode;
use std::time::Instant;

use forge_core::bounds::{
    chen_roughgarden_threshold, compose, fairshare_curve, gadget_decompose, CatalogAssignment,
    Family, ParamAssignment,
};
use forge_core::cost::CostSpec;
use forge_core::experiments::{
    generate_instance, run_suite, Caps, InstanceSpec, LambdaSpec, SuiteConfig,
};
use forge_core::game::{CostTable, Masks, ProfileIter};
use forge_core::goodness::{
    constant_goodness, fairshare_ratio, fit_goodness, monomial_goodness, GoodnessParams,
    WeightDomain, DEFAULT_GRID_DENSITY,
};
use forge_core::numeric::{le_tol, q_from_f64, q_int, q_ratio};
use forge_core::potential::{verify_lemma1_conditions, PotentialConfig, PotentialTable};
use forge_core::{Game, Mode, Player, Resource, Scalar, Settings, Q};

type Outcome = Result<String, String>;

fn lambdas(values: &[Q]) -> Vec<LambdaSpec> {
    values.iter().cloned().map(LambdaSpec::Value).collect()
}

fn suite(
    family: Family,
    grid: Vec<LambdaSpec>,
    seed: u64,
    mode: Mode,
) -> Result<(usize, usize), String> {
    let config = SuiteConfig::new(family, grid, 100, seed, mode);
    let outcome = run_suite(&config).map_err(|e| e.to_string())?;
    if let Some(f) = outcome.failures.first() {
        return Err(format!(
            "{family}: {} of {} rows failed; first: instance {} at lambda {}: {}",
            outcome.failures.len(),
            outcome.rows.len(),
            f.instance_id,
            f.lambda_spec,
            f.reason
        ));
    }
    Ok((outcome.rows.len(), outcome.failures.len()))
}

fn polynomial_suite() -> Outcome {
    let start = Instant::now();
    let mut rows = 0;
    for d in 1..=3u32 {
        let k = d as i64;
        let grid = lambdas(&[q_int(k), q_ratio(2 * k + 1, 2), q_int(k + 1)]);
        rows += suite(Family::Poly { d }, grid, 1_000 * k as u64, Mode::Rational)?.0;
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!(
            "{rows} rows certified but took {secs:.1}s (limit 60s)"
        ));
    }
    Ok(format!(
        "{rows} rows certified, zero violations, {secs:.1}s"
    ))
}

fn concave_suite() -> Outcome {
    let grid = lambdas(&[q_ratio(3, 2), q_ratio(7, 4), q_int(2)]);
    let (rows, _) = suite(Family::Concave, grid, 2_000, Mode::Float)?;
    Ok(format!(
        "{rows} rows certified at (lambda, lambda/(lambda-1))"
    ))
}

fn mixed_suite() -> Outcome {
    let grid = lambdas(&[q_int(2), q_ratio(5, 2), q_int(3)]);
    let (rows, _) = suite(Family::Mixed { d: 2 }, grid, 3_000, Mode::Float)?;
    Ok(format!("{rows} rows certified at (lambda, 1 + 3/lambda)"))
}

fn fairshare_suite() -> Outcome {
    let mut grid = lambdas(&[q_int(1), q_int(2)]);
    grid.push(LambdaSpec::LnTotal);
    let (rows, _) = suite(Family::FairShare, grid, 4_000, Mode::Float)?;
    Ok(format!("{rows} rows certified, w_max <= 5"))
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want} (tol {tol})"))
    }
}

fn goodness_reproduction() -> Outcome {
    let domain = WeightDomain::new(1.0, 2.0, 1e8).map_err(|e| e.to_string())?;
    let mut fits = 0;
    for d in 1..=4u32 {
        let k = d as i64;
        for mu in [q_ratio(1, k + 1), q_ratio(1, k)] {
            let lemma = monomial_goodness(d, mu)
                .map_err(|e| e.to_string())?
                .to_f64();
            let cost = CostSpec::monomial(d, q_int(1));
            let fit = fit_goodness(&cost, lemma.xi, &domain, DEFAULT_GRID_DENSITY)
                .map_err(|e| e.to_string())?;
            let p = fit.params;
            for (name, got, want) in [
                ("alpha1", p.alpha1, lemma.alpha1),
                ("alpha2", p.alpha2, lemma.alpha2),
                ("beta1", p.beta1, lemma.beta1),
                ("beta2", p.beta2, lemma.beta2),
            ] {
                close(&format!("x^{d} xi={} {name}", lemma.xi), got, want, 1e-6)?;
            }
            fits += 1;
        }
    }

    let constant = fit_goodness(
        &CostSpec::constant(q_ratio(7, 3)),
        0.0,
        &domain,
        DEFAULT_GRID_DENSITY,
    )
    .map_err(|e| e.to_string())?
    .params;
    let unit: GoodnessParams<f64> = constant_goodness();
    if (
        constant.alpha1,
        constant.alpha2,
        constant.beta1,
        constant.beta2,
    ) != (unit.alpha1, unit.alpha2, unit.beta1, unit.beta2)
    {
        return Err(format!(
            "constant fit is not exactly (1,1,1,1): {constant:?}"
        ));
    }

    let share = CostSpec::fair_share(q_int(1), q_int(1));
    let unit_domain = WeightDomain::new(1.0, 1.0, 10.0).map_err(|e| e.to_string())?;
    let fit =
        fit_goodness(&share, 0.0, &unit_domain, DEFAULT_GRID_DENSITY).map_err(|e| e.to_string())?;
    close("fair-share alpha2", fit.params.alpha2, 1.386, 1e-3)?;
    Ok(format!(
        "{fits} monomial fits within 1e-6, constant exact, fair-share alpha2 = {:.4}",
        fit.params.alpha2
    ))
}

/// Lambda grid of each family, as used by the certification suites.
fn families() -> Vec<(Family, Vec<LambdaSpec>, Mode)> {
    let mut out = Vec::new();
    for d in 1..=3u32 {
        let k = d as i64;
        out.push((
            Family::Poly { d },
            lambdas(&[q_int(k), q_ratio(2 * k + 1, 2), q_int(k + 1)]),
            Mode::Rational,
        ));
    }
    out.push((
        Family::Concave,
        lambdas(&[q_ratio(3, 2), q_ratio(7, 4), q_int(2)]),
        Mode::Float,
    ));
    out.push((
        Family::Mixed { d: 2 },
        lambdas(&[q_int(2), q_ratio(5, 2), q_int(3)]),
        Mode::Float,
    ));
    let mut fair = lambdas(&[q_int(1), q_int(2)]);
    fair.push(LambdaSpec::LnTotal);
    out.push((Family::FairShare, fair, Mode::Float));
    out
}

fn resolve(spec: &LambdaSpec, game: &Game) -> Result<Q, String> {
    match spec {
        LambdaSpec::Value(q) => Ok(q.clone()),
        LambdaSpec::LnTotal => {
            q_from_f64(game.total_weight().to_f64().ln()).map_err(|e| e.to_string())
        }
    }
}

/// The split game and its catalog configuration at `lambda`.
fn catalog<S: Scalar>(
    family: Family,
    lambda: &Q,
    game: &Game,
) -> Result<(Game, PotentialConfig<S>), String> {
    let game = if family == Family::FairShare {
        game.with_fairshare_cap(lambda)
    } else {
        game.clone()
    };
    let split = gadget_decompose(&game).map_err(|e| e.to_string())?;
    let config = CatalogAssignment::new(family, S::from_q(lambda))
        .and_then(|a| a.config(&split))
        .map_err(|e| e.to_string())?;
    Ok((split, config))
}

fn lemma1_family<S: Scalar>(
    family: Family,
    grid: &[LambdaSpec],
    caps: &Caps,
    exact: bool,
) -> Result<usize, String> {
    let settings = Settings::default();
    let mut tuples = 0;
    for seed in 0..50u64 {
        let spec = InstanceSpec::random(family, 6_000 + seed, caps, exact);
        let game = generate_instance(&spec, caps).map_err(|e| e.to_string())?;
        for lambda in grid {
            let lambda = resolve(lambda, &game)?;
            let (split, config) = catalog::<S>(family, &lambda, &game)?;
            let report =
                verify_lemma1_conditions(&split, &config, &settings).map_err(|e| e.to_string())?;
            if !report.passed {
                return Err(format!(
                    "{family} seed {seed} lambda {lambda}: {} violations, worst {:?}",
                    report.violations, report.worst
                ));
            }
            tuples += report.marginal_tuples + report.total_tuples;
        }
    }
    Ok(tuples)
}

fn affine_exact_potential() -> Result<(), String> {
    // a·x + b with a > 0 split into a monomial and a constant; ξ = 1/2 on the
    // monomial makes the potential exact.
    let players: Vec<Player> = [q_int(1), q_ratio(3, 2), q_ratio(1, 2), q_int(2)]
        .into_iter()
        .enumerate()
        .map(|(i, weight)| Player {
            id: format!("p{i}"),
            weight,
        })
        .collect();
    let resources = vec![
        Resource {
            id: "slope".into(),
            cost: CostSpec::monomial(1, q_ratio(5, 2)),
        },
        Resource {
            id: "offset".into(),
            cost: CostSpec::constant(q_int(3)),
        },
    ];
    let both = vec![vec![0, 1]];
    let game = Game::new(players, resources, vec![both; 4]).map_err(|e| e.to_string())?;
    let params = vec![
        monomial_goodness(1, q_int(1)).map_err(|e| e.to_string())?,
        constant_goodness(),
    ];
    let config = PotentialConfig::<Q>::new(&game, params).map_err(|e| e.to_string())?;
    let report = verify_lemma1_conditions(&game, &config, &Settings::default())
        .map_err(|e| e.to_string())?;
    match report.marginal_range {
        Some((lo, hi)) if (lo - 1.0).abs() <= 1e-12 && (hi - 1.0).abs() <= 1e-12 => Ok(()),
        other => Err(format!(
            "affine marginal ratio range {other:?}, expected identically 1"
        )),
    }
}

fn lemma1_verification() -> Outcome {
    let caps = Caps {
        max_players: 6,
        max_profiles: 4096,
        ..Caps::default()
    };
    let mut tuples = 0;
    for (family, grid, mode) in families() {
        tuples += match mode {
            Mode::Rational => lemma1_family::<Q>(family, &grid, &caps, true)?,
            Mode::Float => lemma1_family::<f64>(family, &grid, &caps, false)?,
        };
    }
    affine_exact_potential()?;
    Ok(format!(
        "{tuples} tuples satisfied; affine xi=1/2 marginal ratio is 1"
    ))
}

fn fairshare_monotonicity() -> Outcome {
    let n = 200;
    let axis: Vec<f64> = (0..n)
        .map(|k| 1.0 + 99.0 * k as f64 / (n - 1) as f64)
        .collect();
    let cap = 1.0;
    let ratio = |w: f64, x: f64| fairshare_ratio(w, x, cap).map_err(|e| e.to_string());
    let mut violations = 0;
    for &x in &axis {
        for pair in axis.windows(2) {
            if ratio(pair[1], x)? < ratio(pair[0], x)? {
                violations += 1;
            }
        }
    }
    for &w in &axis {
        for pair in axis.windows(2) {
            if ratio(w, pair[1])? > ratio(w, pair[0])? {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        return Err(format!(
            "{violations} monotonicity violations on the {n}x{n} grid"
        ));
    }
    for lambda in [1.0, 2.0, 3.5] {
        let at_zero = fairshare_ratio(1.0, 0.0, lambda).map_err(|e| e.to_string())?;
        if at_zero != lambda {
            return Err(format!("R(1,0) = {at_zero} at lambda {lambda}"));
        }
    }
    for &w in &axis {
        let got = ratio(w, 1.0)?;
        let want = (1.0 + 1.0 / w) * w.ln_1p();
        if got != want {
            return Err(format!("R({w},1) = {got}, expected {want}"));
        }
    }
    Ok(format!("zero violations on {n}x{n}; endpoint values exact"))
}

fn prior_work_dominance() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for k in 0..=990 {
        let w_max = 1.0 + k as f64 / 10.0;
        let (alpha, _) = fairshare_curve(1.0, w_max, w_max).map_err(|e| e.to_string())?;
        let threshold = chen_roughgarden_threshold(w_max);
        if alpha > threshold {
            return Err(format!("w_max {w_max}: alpha {alpha} exceeds {threshold}"));
        }
        worst = worst.max(alpha - threshold);
    }
    let (alpha, _) = fairshare_curve(1.0, 10.0, 10.0).map_err(|e| e.to_string())?;
    let threshold = chen_roughgarden_threshold(10.0);
    close("alpha at w_max=10", alpha, 3.303, 1e-3)?;
    close("threshold at w_max=10", threshold, 4.902, 1e-3)?;
    Ok(format!(
        "991 grid points dominated (max alpha - threshold = {worst:.4}); at w_max=10: {alpha:.3} vs {threshold:.3}"
    ))
}

/// Checks the structural identities on every profile of the split game.
fn structural_game<S: Scalar>(
    family: Family,
    lambda: &Q,
    game: &Game,
    settings: &Settings,
) -> Result<usize, String> {
    let err = |e: forge_core::ForgeError| e.to_string();
    let tol = S::tolerance(settings.tolerance);
    let (split, config) = catalog::<S>(family, lambda, game)?;
    let original = if family == Family::FairShare {
        game.with_fairshare_cap(lambda)
    } else {
        game.clone()
    };
    let (alpha, beta) = compose(config.params()).map_err(err)?;
    let n = split.n_players();

    // Weighted-average sandwich over every nonempty player set.
    let weights: Vec<S> = split
        .players()
        .iter()
        .map(|p| S::from_q(&p.weight))
        .collect();
    let w_min = S::from_q(&split.w_min());
    for resource in split.resources() {
        for mask in 1u64..(1 << n) {
            let members: Vec<&S> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &weights[i])
                .collect();
            let load = members.iter().fold(S::zero(), |a, &w| a + w.clone());
            let mut weighted = S::zero();
            for &w in &members {
                weighted = weighted + w.clone() * resource.cost.evaluate(w).map_err(err)?;
            }
            let avg = weighted / load.clone();
            let (low, high) = resource.cost.range_extrema(&w_min, &load).map_err(err)?;
            if !(le_tol(&low, &avg, &tol) && le_tol(&avg, &high, &tol)) {
                return Err(format!(
                    "sandwich fails on {} for set {mask:b}",
                    resource.id
                ));
            }
        }
    }

    let mut costs = CostTable::<S>::new(&split).map_err(err)?;
    let mut phis = PotentialTable::new(&split, &config).map_err(err)?;
    let profiles: Vec<_> = ProfileIter::capped(&split, 256).map_err(err)?.collect();
    let mut values = Vec::with_capacity(profiles.len());
    for profile in &profiles {
        let masks = Masks::of(&split, profile);
        let social = costs.social_cost(&masks).map_err(err)?;
        let mut weighted = S::zero();
        for (i, w) in weights.iter().enumerate() {
            weighted = weighted
                + w.clone()
                    * costs
                        .player_cost(&masks, i, profile.choice(i))
                        .map_err(err)?;
        }
        if !le_tol(&social, &weighted, &tol) || !le_tol(&weighted, &social, &tol) {
            return Err(format!(
                "double formula fails at {profile}: {social} vs {weighted}"
            ));
        }
        let unsplit = original.social_cost::<S>(profile).map_err(err)?;
        for i in 0..n {
            let a: S = original.player_cost(profile, i).map_err(err)?;
            let b: S = split.player_cost(profile, i).map_err(err)?;
            if !le_tol(&a, &b, &tol) || !le_tol(&b, &a, &tol) {
                return Err(format!(
                    "decomposition changes player {i}'s cost at {profile}"
                ));
            }
        }
        if !le_tol(&unsplit, &social, &tol) || !le_tol(&social, &unsplit, &tol) {
            return Err(format!(
                "decomposition changes the social cost at {profile}"
            ));
        }
        values.push((
            profile,
            masks,
            phis.value(&Masks::of(&split, profile)).map_err(err)?,
            social,
        ));
    }

    let mut checked = 0;
    for (profile, masks, phi, _) in &values {
        for i in 0..n {
            let own = costs
                .player_cost(masks, i, profile.choice(i))
                .map_err(err)?;
            for alt in 0..split.strategies(i).len() {
                let moved = profile.with_choice(i, alt);
                let moved_masks = Masks::of(&split, &moved);
                let moved_phi = phis.value(&moved_masks).map_err(err)?;
                if phi.clone() <= moved_phi {
                    let theirs = costs.player_cost(&moved_masks, i, alt).map_err(err)?;
                    if !le_tol(&own, &(alpha.clone() * theirs), &tol) {
                        return Err(format!(
                            "deviation implication fails at {profile}, player {i} -> {alt}"
                        ));
                    }
                }
                checked += 1;
            }
        }
    }
    for (_, _, phi, social) in &values {
        for (_, _, other_phi, other_social) in &values {
            if phi <= other_phi && !le_tol(social, &(beta.clone() * other_social.clone()), &tol) {
                return Err(format!(
                    "global implication fails: {social} > {beta} * {other_social}"
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn structural_suites() -> Outcome {
    let settings = Settings::default();
    let caps = Caps {
        max_profiles: 256,
        ..Caps::default()
    };
    let mut games = 0;
    let mut checked = 0;
    for (family, grid, mode) in families() {
        for seed in 0..50u64 {
            let spec = InstanceSpec::random(family, 9_000 + seed, &caps, mode == Mode::Rational);
            let Ok(game) = generate_instance(&spec, &caps) else {
                continue;
            };
            // The split game has as many profiles as the original.
            for lambda in &grid {
                let lambda = resolve(lambda, &game)?;
                checked += match mode {
                    Mode::Rational => structural_game::<Q>(family, &lambda, &game, &settings)?,
                    Mode::Float => structural_game::<f64>(family, &lambda, &game, &settings)?,
                };
            }
            games += 1;
        }
    }
    let mixed = games_checked_for_mixed(&caps)?;
    Ok(format!(
        "{games} games, {checked} implications and identities; decomposition preserved on {mixed} mixed instances"
    ))
}

/// Decomposition preservation on 50 generated mixed instances, all profiles.
fn games_checked_for_mixed(caps: &Caps) -> Result<usize, String> {
    let family = Family::Mixed { d: 2 };
    let mut done = 0;
    let mut seed = 12_000u64;
    while done < 50 {
        seed += 1;
        let spec = InstanceSpec::random(family, seed, caps, false);
        let Ok(game) = generate_instance(&spec, caps) else {
            continue;
        };
        let split = gadget_decompose(&game).map_err(|e| e.to_string())?;
        for profile in ProfileIter::new(&game) {
            let a: f64 = game.social_cost(&profile).map_err(|e| e.to_string())?;
            let b: f64 = split.social_cost(&profile).map_err(|e| e.to_string())?;
            if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                return Err(format!(
                    "mixed seed {seed}: decomposition changes cost at {profile}"
                ));
            }
        }
        done += 1;
    }
    Ok(done)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("polynomial suite", polynomial_suite),
        ("concave suite", concave_suite),
        ("mixed suite", mixed_suite),
        ("fair-share suite", fairshare_suite),
        ("goodness closed forms", goodness_reproduction),
        ("potential conditions", lemma1_verification),
        ("fair-share ratio monotonicity", fairshare_monotonicity),
        ("prior-work dominance", prior_work_dominance),
        ("structural properties", structural_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
