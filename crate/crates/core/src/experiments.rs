//! Random instance generation and batch certification of the family curves.
//!
//! A suite draws `count` games of one family, and for every game and every
//! `λ` it minimizes the catalog potential exhaustively and certifies the
//! minimizer against the family's claimed `(α, β)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{claimed_bounds, gadget_decompose, CatalogAssignment, Family, ParamAssignment};
use crate::cost::{ConcaveKind, CostSpec};
use crate::error::{input, ForgeError, Result};
use crate::game::{profile_count, Game, Player, Resource, Settings, Strategy};
use crate::numeric::{
    format_q, parse_q, q_from_f64, q_int, transcendental, Extended, Mode, Scalar, Q,
};
use crate::potential::{certify, minimize_potential_exhaustive};

/// Desk-scale limits on generated instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Caps {
    pub max_players: usize,
    pub max_strategies: usize,
    pub max_resources: usize,
    pub max_profiles: u128,
    pub max_denominator: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_players: 5,
            max_strategies: 4,
            max_resources: 6,
            max_profiles: 1024,
            max_denominator: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub n_players: usize,
    pub n_resources: usize,
    pub strategies_per_player: usize,
    /// Weights are drawn as `k/q` with `q ≤ max_denominator` inside this range.
    #[serde(serialize_with = "ser_q_pair")]
    pub weight_range: (Q, Q),
    pub max_denominator: i64,
    /// Restricts concave members to rationally exact ones.
    pub exact: bool,
    pub seed: u64,
}

fn ser_q_pair<Ser: serde::Serializer>(
    pair: &(Q, Q),
    s: Ser,
) -> std::result::Result<Ser::Ok, Ser::Error> {
    (format_q(&pair.0), format_q(&pair.1)).serialize(s)
}

impl InstanceSpec {
    /// Sizes drawn from `seed` within `caps`. Fair-share instances get at
    /// least three players so that `ln W ≥ 1` after rescaling to `w_min = 1`.
    pub fn random(family: Family, seed: u64, caps: &Caps, exact: bool) -> InstanceSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let min_players = if family == Family::FairShare { 3 } else { 2 };
        let n_players = rng.gen_range(min_players..=caps.max_players.max(min_players));
        let weight_range = match family {
            Family::FairShare => (q_int(1), q_int(5)),
            _ => (Q::new(1.into(), 2.into()), q_int(3)),
        };
        InstanceSpec {
            family,
            n_players,
            n_resources: rng.gen_range(1..=caps.max_resources),
            strategies_per_player: rng.gen_range(1..=caps.max_strategies),
            weight_range,
            max_denominator: caps.max_denominator,
            exact,
            seed,
        }
    }

    pub fn validate(&self, caps: &Caps) -> Result<()> {
        if self.n_players == 0 || self.n_resources == 0 || self.strategies_per_player == 0 {
            return input("instance needs at least one player, resource and strategy");
        }
        for (what, required, cap) in [
            ("players", self.n_players, caps.max_players),
            ("resources", self.n_resources, caps.max_resources),
            (
                "strategies per player",
                self.strategies_per_player,
                caps.max_strategies,
            ),
        ] {
            if required > cap {
                return Err(ForgeError::Capacity {
                    what,
                    required: required as u128,
                    cap: cap as u128,
                });
            }
        }
        let (lo, hi) = &self.weight_range;
        if *lo <= Q::zero() || lo > hi {
            return input("weight range must satisfy 0 < lo <= hi");
        }
        if self.max_denominator < 1 {
            return input("max denominator must be at least 1");
        }
        if self.family == Family::FairShare && self.exact {
            return Err(ForgeError::Inexact("fair-share costs".into()));
        }
        Ok(())
    }
}

fn small_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Q {
    let den = rng.gen_range(1..=max_den);
    Q::new(rng.gen_range(1..=max_num * den).into(), den.into())
}

fn random_weight(rng: &mut ChaCha8Rng, lo: &Q, hi: &Q, max_den: i64) -> Q {
    let den = rng.gen_range(1..=max_den);
    let d = Q::from_integer(den.into());
    let low = (lo * &d).ceil().to_integer().to_i64().unwrap_or(1).max(1);
    let high = (hi * &d)
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(low)
        .max(low);
    Q::new(rng.gen_range(low..=high).into(), den.into())
}

fn random_polynomial(rng: &mut ChaCha8Rng, d: u32) -> CostSpec {
    let mut coeffs: Vec<Q> = (0..=d)
        .map(|_| {
            if rng.gen_bool(0.3) {
                Q::zero()
            } else {
                small_rational(rng, 4, 4)
            }
        })
        .collect();
    coeffs[d as usize] = small_rational(rng, 4, 4);
    CostSpec::polynomial(coeffs)
}

fn random_concave(rng: &mut ChaCha8Rng, exact: bool) -> CostSpec {
    let kinds: &[u8] = if exact { &[0, 1, 2] } else { &[0, 1, 2, 3, 4] };
    match *kinds.choose(rng).expect("nonempty") {
        0 => CostSpec::constant(small_rational(rng, 5, 4)),
        1 => CostSpec::concave(
            ConcaveKind::Affine,
            small_rational(rng, 3, 4),
            small_rational(rng, 3, 4) - Q::one() / q_int(8),
        ),
        2 => {
            // Nonincreasing nonnegative slopes on three segments.
            let mut slopes: Vec<Q> = (0..3)
                .map(|_| small_rational(rng, 3, 4) - Q::one() / q_int(4))
                .collect();
            slopes.sort_by(|a, b| b.cmp(a));
            let mut x = Q::zero();
            let mut y = small_rational(rng, 2, 4) - Q::one() / q_int(4);
            let mut points = vec![(x.clone(), y.clone())];
            for s in slopes {
                let step = small_rational(rng, 2, 2);
                y += &s * &step;
                x += step;
                points.push((x.clone(), y.clone()));
            }
            CostSpec::piecewise_linear(points)
        }
        3 => CostSpec::concave(
            ConcaveKind::Sqrt,
            small_rational(rng, 3, 4),
            small_rational(rng, 2, 4) - Q::one() / q_int(4),
        ),
        _ => CostSpec::concave(
            ConcaveKind::Log1p,
            small_rational(rng, 3, 4),
            small_rational(rng, 2, 4) - Q::one() / q_int(4),
        ),
    }
}

fn random_cost(rng: &mut ChaCha8Rng, family: Family, exact: bool) -> CostSpec {
    match family {
        Family::Poly { d } => random_polynomial(rng, d),
        Family::Concave => random_concave(rng, exact),
        Family::Mixed { d } => CostSpec::conical(vec![
            (Q::one(), random_polynomial(rng, d)),
            (small_rational(rng, 2, 4), random_concave(rng, exact)),
        ]),
        Family::FairShare => CostSpec::fair_share(small_rational(rng, 10, 4), Q::one()),
    }
}

fn random_strategies(rng: &mut ChaCha8Rng, n_resources: usize, count: usize) -> Vec<Strategy> {
    let full = 1u64 << n_resources;
    let mut masks: Vec<u64> = Vec::with_capacity(count);
    for _ in 0..count * 8 {
        if masks.len() == count {
            break;
        }
        let m = rng.gen_range(1..full);
        if !masks.contains(&m) {
            masks.push(m);
        }
    }
    masks
        .into_iter()
        .map(|m| (0..n_resources).filter(|e| m >> e & 1 == 1).collect())
        .collect()
}

/// Deterministic game for `spec`; fair-share weights are rescaled to `w_min = 1`.
pub fn generate_instance(spec: &InstanceSpec, caps: &Caps) -> Result<Game> {
    spec.validate(caps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = &spec.weight_range;
    let mut weights: Vec<Q> = (0..spec.n_players)
        .map(|_| random_weight(&mut rng, lo, hi, spec.max_denominator))
        .collect();
    if spec.family == Family::FairShare {
        let w_min = weights.iter().min().expect("at least one player").clone();
        weights.iter_mut().for_each(|w| *w = &*w / &w_min);
    }
    let players = weights
        .into_iter()
        .enumerate()
        .map(|(i, weight)| Player {
            id: format!("p{i}"),
            weight,
        })
        .collect();
    let resources = (0..spec.n_resources)
        .map(|e| Resource {
            id: format!("r{e}"),
            cost: random_cost(&mut rng, spec.family, spec.exact),
        })
        .collect();
    let strategies = (0..spec.n_players)
        .map(|_| random_strategies(&mut rng, spec.n_resources, spec.strategies_per_player))
        .collect();
    let game = Game::new(players, resources, strategies)?;
    profile_count(&game, caps.max_profiles)?;
    Ok(game)
}

/// A `λ` value, or `ln W` of each instance.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSpec {
    Value(Q),
    LnTotal,
}

impl FromStr for LambdaSpec {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<LambdaSpec> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lnw" | "ln_w" | "ln(w)" => Ok(LambdaSpec::LnTotal),
            other => parse_q(other).map(LambdaSpec::Value),
        }
    }
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSpec::Value(q) => f.write_str(&format_q(q)),
            LambdaSpec::LnTotal => f.write_str("lnW"),
        }
    }
}

/// Parses a comma-separated list such as `2,2.5,3` or `1,2,lnW`.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<LambdaSpec>> {
    let grid: Vec<LambdaSpec> = text
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return input("lambda grid is empty");
    }
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub family: Family,
    pub lambdas: Vec<LambdaSpec>,
    pub count: usize,
    pub seed: u64,
    pub caps: Caps,
    pub mode: Mode,
    pub settings: Settings,
}

impl SuiteConfig {
    pub fn new(
        family: Family,
        lambdas: Vec<LambdaSpec>,
        count: usize,
        seed: u64,
        mode: Mode,
    ) -> SuiteConfig {
        SuiteConfig {
            family,
            lambdas,
            count,
            seed,
            caps: Caps::default(),
            mode,
            settings: Settings::default(),
        }
    }

    fn instance_seed(&self, id: usize) -> u64 {
        self.seed.wrapping_add(id as u64)
    }
}

/// One `(instance, λ)` certification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub instance_id: usize,
    pub seed: u64,
    pub family: String,
    pub lambda_spec: String,
    pub lambda: f64,
    pub claimed_alpha: f64,
    pub claimed_beta: f64,
    pub certified_alpha: f64,
    pub certified_beta: f64,
    pub potential: f64,
    pub optimum: f64,
    pub pass: bool,
    pub error: String,
    pub runtime_ms: f64,
}

/// A failed row together with the instance that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureRecord {
    pub instance_id: usize,
    pub seed: u64,
    pub lambda_spec: String,
    pub reason: String,
    pub game_json: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub rows: Vec<ExperimentRow>,
    pub failures: Vec<FailureRecord>,
}

struct Certified {
    lambda: f64,
    claimed: (f64, f64),
    certified: (f64, f64),
    potential: f64,
    optimum: f64,
    pass: bool,
}

fn resolve_lambda<S: Scalar>(spec: &LambdaSpec, game: &Game) -> Result<(S, Q)> {
    match spec {
        LambdaSpec::Value(q) => Ok((S::from_q(q), q.clone())),
        LambdaSpec::LnTotal => {
            let total = S::from_q(&game.total_weight());
            let lambda = transcendental(&total, "ln W", f64::ln)?;
            let exact = q_from_f64(lambda.to_f64())?;
            Ok((lambda, exact))
        }
    }
}

fn run_instance<S: Scalar>(
    game: &Game,
    family: Family,
    spec: &LambdaSpec,
    settings: &Settings,
) -> Result<Certified> {
    let (lambda, lambda_q) = resolve_lambda::<S>(spec, game)?;
    let game = if family == Family::FairShare {
        game.with_fairshare_cap(&lambda_q)
    } else {
        game.clone()
    };
    let split = gadget_decompose(&game)?;
    let config = CatalogAssignment::new(family, lambda.clone())?.config(&split)?;
    let (profile, phi) = minimize_potential_exhaustive(&split, &config, settings)?;
    let (alpha, beta) = claimed_bounds(family, &lambda, &game)?;
    let claimed_alpha = Extended::Finite(alpha.clone());
    let cert = certify(
        &game,
        &profile,
        &claimed_alpha,
        &Extended::Finite(beta.clone()),
        settings,
    )?;
    let tol = S::tolerance(settings.tolerance);
    if cert.passed {
        assert!(
            cert.alpha.le_tol(&claimed_alpha, &tol),
            "certificate passed with alpha {} above the claim {alpha}",
            cert.alpha
        );
    }
    Ok(Certified {
        lambda: lambda.to_f64(),
        claimed: (alpha.to_f64(), beta.to_f64()),
        certified: (cert.alpha.to_f64(), cert.beta.to_f64()),
        potential: phi.to_f64(),
        optimum: cert.optimum.to_f64(),
        pass: cert.passed,
    })
}

/// Runs every `(instance, λ)` pair; rows come back ordered by instance, then `λ`.
///
/// Instance errors become failing rows and failure records; the suite goes on.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    if config.lambdas.is_empty() {
        return input("lambda grid is empty");
    }
    let exact = config.mode == Mode::Rational;
    let jobs: Vec<(usize, usize)> = (0..config.count)
        .flat_map(|id| (0..config.lambdas.len()).map(move |k| (id, k)))
        .collect();
    let results: Vec<(ExperimentRow, Option<FailureRecord>)> = jobs
        .par_iter()
        .map(|&(id, k)| {
            let seed = config.instance_seed(id);
            let spec = InstanceSpec::random(config.family, seed, &config.caps, exact);
            let lambda_spec = &config.lambdas[k];
            let start = Instant::now();
            let generated = generate_instance(&spec, &config.caps);
            let outcome = match &generated {
                Ok(game) => match config.mode {
                    Mode::Rational => {
                        run_instance::<Q>(game, config.family, lambda_spec, &config.settings)
                    }
                    Mode::Float => {
                        run_instance::<f64>(game, config.family, lambda_spec, &config.settings)
                    }
                },
                Err(e) => Err(ForgeError::Input(e.to_string())),
            };
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let mut row = ExperimentRow {
                instance_id: id,
                seed,
                family: config.family.to_string(),
                lambda_spec: lambda_spec.to_string(),
                lambda: f64::NAN,
                claimed_alpha: f64::NAN,
                claimed_beta: f64::NAN,
                certified_alpha: f64::NAN,
                certified_beta: f64::NAN,
                potential: f64::NAN,
                optimum: f64::NAN,
                pass: false,
                error: String::new(),
                runtime_ms,
            };
            let reason = match outcome {
                Ok(c) => {
                    row.lambda = c.lambda;
                    (row.claimed_alpha, row.claimed_beta) = c.claimed;
                    (row.certified_alpha, row.certified_beta) = c.certified;
                    row.potential = c.potential;
                    row.optimum = c.optimum;
                    row.pass = c.pass;
                    (!c.pass).then(|| "certified bounds exceed the claim".to_string())
                }
                Err(e) => {
                    row.error = e.to_string();
                    Some(e.to_string())
                }
            };
            let failure = reason.map(|reason| FailureRecord {
                instance_id: id,
                seed,
                lambda_spec: lambda_spec.to_string(),
                reason,
                game_json: generated
                    .as_ref()
                    .ok()
                    .and_then(|g| g.to_json().ok())
                    .unwrap_or_default(),
            });
            (row, failure)
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (row, failure) in results {
        rows.push(row);
        failures.extend(failure);
    }
    Ok(SuiteOutcome { rows, failures })
}

/// Pass counts and worst slack of one family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySummary {
    pub family: String,
    pub rows: usize,
    pub passed: usize,
    pub errors: usize,
    /// `None` when there are no rows.
    pub pass_rate: Option<f64>,
    /// Largest `certified α − claimed α` over rows with values.
    pub worst_alpha_slack: Option<f64>,
    pub worst_beta_slack: Option<f64>,
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<FamilySummary> {
    let mut families: Vec<String> = rows.iter().map(|r| r.family.clone()).collect();
    families.sort();
    families.dedup();
    families
        .into_iter()
        .map(|family| {
            let mine: Vec<&ExperimentRow> = rows.iter().filter(|r| r.family == family).collect();
            let passed = mine.iter().filter(|r| r.pass).count();
            let slack = |f: fn(&ExperimentRow) -> f64| {
                mine.iter()
                    .map(|r| f(r))
                    .filter(|v| !v.is_nan())
                    .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            };
            FamilySummary {
                rows: mine.len(),
                passed,
                errors: mine.iter().filter(|r| !r.error.is_empty()).count(),
                pass_rate: (!mine.is_empty()).then(|| passed as f64 / mine.len() as f64),
                worst_alpha_slack: slack(|r| r.certified_alpha - r.claimed_alpha),
                worst_beta_slack: slack(|r| r.certified_beta - r.claimed_beta),
                family,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Summary,
}

impl FromStr for ReportFormat {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "summary" | "text" => Ok(ReportFormat::Summary),
            other => input(format!("unknown report format `{other}`")),
        }
    }
}

pub fn write_rows_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: std::io::Read>(input: R) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<ExperimentRow>, _>>()?;
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}"))
}

pub fn emit_report(rows: &[ExperimentRow], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut buf = Vec::new();
            write_rows_csv(rows, &mut buf)?;
            Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
        }
        ReportFormat::Summary => {
            let mut out = String::new();
            for s in summarize(rows) {
                let rate = s
                    .pass_rate
                    .map_or_else(|| "n/a".to_string(), |r| format!("{:.1}%", r * 100.0));
                out.push_str(&format!(
                    "{}: {}/{} passed ({rate}), {} errors, worst alpha slack {}, worst beta slack {}\n",
                    s.family,
                    s.passed,
                    s.rows,
                    s.errors,
                    opt(s.worst_alpha_slack),
                    opt(s.worst_beta_slack),
                ));
            }
            if out.is_empty() {
                out.push_str("no rows\n");
            }
            Ok(out)
        }
    }
}

/// `(λ, α, β)` samples as CSV with header `lambda,alpha,beta`.
pub fn curve_csv(points: &[(f64, f64, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda", "alpha", "beta"])?;
    for (l, a, b) in points {
        w.write_record([l.to_string(), a.to_string(), b.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| ForgeError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_runtime(rows: &[ExperimentRow]) -> String {
        let mut rows = rows.to_vec();
        rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
        emit_report(&rows, ReportFormat::Csv).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let caps = Caps::default();
        let spec = InstanceSpec::random(Family::Poly { d: 2 }, 42, &caps, true);
        let a = generate_instance(&spec, &caps).unwrap();
        let b = generate_instance(&spec, &caps).unwrap();
        assert_eq!(a, b);
        let text = a.to_json().unwrap();
        assert_eq!(Game::from_json(&text).unwrap(), a);
    }

    #[test]
    fn trivial_spec_gives_trivial_game() {
        let caps = Caps::default();
        let spec = InstanceSpec {
            family: Family::Poly { d: 2 },
            n_players: 3,
            n_resources: 1,
            strategies_per_player: 1,
            weight_range: (q_int(1), q_int(1)),
            max_denominator: 1,
            exact: true,
            seed: 7,
        };
        let g = generate_instance(&spec, &caps).unwrap();
        assert_eq!(g.n_resources(), 1);
        assert!(g.all_strategies().iter().all(|s| s == &vec![vec![0]]));
    }

    #[test]
    fn fairshare_instances_have_unit_minimum_weight() {
        let caps = Caps::default();
        for seed in 0..20 {
            let spec = InstanceSpec::random(Family::FairShare, seed, &caps, false);
            let g = generate_instance(&spec, &caps).unwrap();
            assert_eq!(g.w_min(), q_int(1));
            assert!(g.w_max() <= q_int(5));
            assert!(g.n_players() >= 3);
        }
        let spec = InstanceSpec::random(Family::FairShare, 0, &caps, true);
        assert!(generate_instance(&spec, &caps).is_err());
    }

    #[test]
    fn oversized_spec_is_rejected() {
        let caps = Caps::default();
        let mut spec = InstanceSpec::random(Family::Concave, 1, &caps, false);
        spec.n_players = 9;
        assert!(matches!(
            generate_instance(&spec, &caps),
            Err(ForgeError::Capacity { .. })
        ));
    }

    #[test]
    fn small_poly_suite_passes_and_is_deterministic() {
        let lambdas = parse_lambda_grid("2,5/2,3").unwrap();
        let cfg = SuiteConfig::new(Family::Poly { d: 2 }, lambdas, 6, 11, Mode::Rational);
        let a = run_suite(&cfg).unwrap();
        assert_eq!(a.rows.len(), 18);
        assert!(a.failures.is_empty(), "{:?}", a.failures);
        assert!(a.rows.iter().all(|r| r.pass));
        let order: Vec<(usize, String)> = a
            .rows
            .iter()
            .map(|r| (r.instance_id, r.lambda_spec.clone()))
            .collect();
        assert_eq!(
            order[0..3],
            [(0, "2".into()), (0, "2.5".into()), (0, "3".into())]
        );
        let b = run_suite(&cfg).unwrap();
        assert_eq!(strip_runtime(&a.rows), strip_runtime(&b.rows));
    }

    #[test]
    fn bad_lambda_becomes_a_failure_row() {
        let cfg = SuiteConfig::new(
            Family::Poly { d: 1 },
            vec![LambdaSpec::Value(q_int(5))],
            2,
            3,
            Mode::Rational,
        );
        let out = run_suite(&cfg).unwrap();
        assert_eq!(out.failures.len(), 2);
        assert!(!out.rows[0].pass && !out.rows[0].error.is_empty());
        assert!(out.failures[0].game_json.contains("\"players\""));
    }

    #[test]
    fn csv_round_trips_and_summary_reports_slack() {
        let cfg = SuiteConfig::new(
            Family::Concave,
            parse_lambda_grid("2").unwrap(),
            3,
            5,
            Mode::Float,
        );
        let out = run_suite(&cfg).unwrap();
        let text = emit_report(&out.rows, ReportFormat::Csv).unwrap();
        let back = read_rows_csv(text.as_bytes()).unwrap();
        assert_eq!(back.len(), out.rows.len());
        for (a, b) in back.iter().zip(&out.rows) {
            assert_eq!(a.certified_alpha, b.certified_alpha);
            assert_eq!(a.pass, b.pass);
        }
        let s = summarize(&out.rows);
        let expected = out
            .rows
            .iter()
            .map(|r| r.certified_alpha - r.claimed_alpha)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(s[0].worst_alpha_slack, Some(expected));
        assert!(emit_report(&[], ReportFormat::Summary)
            .unwrap()
            .contains("no rows"));
        assert_eq!(summarize(&[]), vec![]);
    }

    #[test]
    fn lambda_grid_parsing() {
        let g = parse_lambda_grid("1, 2.5 ,lnW").unwrap();
        assert_eq!(
            g,
            vec![
                LambdaSpec::Value(q_int(1)),
                LambdaSpec::Value(Q::new(5.into(), 2.into())),
                LambdaSpec::LnTotal
            ]
        );
        assert!(parse_lambda_grid("").is_err());
        assert!(parse_lambda_grid("x").is_err());
    }

    #[test]
    fn curve_csv_has_header() {
        let text = curve_csv(&[(2.0, 2.0, 1.5)]).unwrap();
        assert_eq!(text, "lambda,alpha,beta\n2,2,1.5\n");
    }
}
