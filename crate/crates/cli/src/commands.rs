use serde::Serialize;

use fdside::analysis::{mgain_finite, mgain_point, run_gap_suite, GapSuiteConfig, GapSuiteReport};
use fdside::bounds::{genie_outer, genie_outer_envelope, no_interference_outer};
use fdside::geometry::FrontierSample;
use fdside::optimize::{figure6_sweep, maximize_sum, pareto_frontier, MuRange, NuPolicy, SweepRow};
use fdside::schemes::{bc_region, cc_region, dc_region, ec_region, z_channel_region};
use fdside::verify::{run_suite, SuiteResult, VerifyConfig, DEFAULT_SUITES, EXTRA_SUITES};
use fdside::{db_to_linear, ChannelParams, EcScale, PowerSplit, RatePentagon, Regime, Scheme, Split};

use crate::args::{
    ChannelArgs, Cli, Command, Format, GapArgs, GapScheme, MgainArgs, RegionArgs, RegionScheme,
    SweepArgs, VerifyArgs,
};
use crate::output::{csv, emit, json, num, opt_num};
use crate::Failure;

type Res<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

pub fn run(cli: Cli) -> Res<()> {
    let default_format = match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Json,
    };
    let fmt = cli.format.unwrap_or(default_format);
    let (text, outcome) = match &cli.command {
        Command::Region(a) => (region(a, fmt)?, Ok(())),
        Command::Sweep(a) => (sweep(a, fmt)?, Ok(())),
        Command::Gap(a) => gap(a, cli.seed, fmt)?,
        Command::Mgain(a) => (mgain(a, fmt)?, Ok(())),
        Command::Verify(a) => verify(a, cli.seed, fmt)?,
    };
    emit(cli.out.as_deref(), &text)?;
    outcome
}

fn quantity(lin: Option<f64>, db: Option<f64>, name: &str, default: Option<f64>) -> Res<f64> {
    match (lin, db, default) {
        (Some(x), _, _) => Ok(x),
        (None, Some(d), _) => Ok(db_to_linear(d)),
        (None, None, Some(x)) => Ok(x),
        _ => usage(format!("missing --{name} or --{name}-db")),
    }
}

fn channel(a: &ChannelArgs) -> Res<ChannelParams> {
    let w = a.w.unwrap_or(0.0);
    if let Some(snr_db) = a.snr_db {
        let (Some(mu), Some(nu)) = (a.mu, a.nu) else {
            return usage("--snr-db needs both --mu and --nu");
        };
        return Ok(ChannelParams::from_exponents(db_to_linear(snr_db), mu, nu, w)?);
    }
    Ok(ChannelParams::new(
        quantity(a.snr1, a.snr1_db, "snr1", None)?,
        quantity(a.snr2, a.snr2_db, "snr2", None)?,
        quantity(a.inr, a.inr_db, "inr", None)?,
        quantity(a.snr_side, a.snr_side_db, "snr-side", Some(0.0))?,
        w,
    )?)
}

#[derive(Serialize)]
struct RegionOut {
    command: &'static str,
    scheme: String,
    regime: Regime,
    normalization: &'static str,
    params: ChannelParams,
    split: Option<Split>,
    note: Option<String>,
    pentagon: Option<RatePentagon>,
    frontier: Option<Vec<FrontierSample>>,
}

fn reject(given: &[(bool, &str)], scheme: &str) -> Res<()> {
    for &(set, flag) in given {
        if set {
            return usage(format!("--{flag} does not apply to --scheme {scheme}"));
        }
    }
    Ok(())
}

fn split_columns(s: Option<Split>) -> [String; 3] {
    match s {
        Some(Split::Lambda { lambda }) => [num(lambda), String::new(), String::new()],
        Some(Split::Power { lambda, beta }) => [num(lambda), num(beta), String::new()],
        Some(Split::Scale { k }) => [String::new(), String::new(), num(k)],
        None => Default::default(),
    }
}

fn region(a: &RegionArgs, fmt: Format) -> Res<String> {
    let p = channel(&a.channel)?;
    let name = a.scheme.to_possible_value_name();
    let need_lambda = || match a.lambda {
        Some(l) => Ok(l),
        None => usage(format!("--scheme {name} needs --lambda or --optimize")),
    };
    let mut note = None;
    let mut frontier = None;
    let (split, pentagon): (Option<Split>, Option<RatePentagon>) = match a.scheme {
        RegionScheme::Bc => {
            reject(&[(a.k.is_some(), "k")], &name)?;
            if a.optimize {
                let s = maximize_sum(Scheme::Bc, &p)?.best_split;
                let Split::Power { lambda, beta } = s else { unreachable!() };
                frontier = Some(pareto_frontier(Scheme::Bc, &p, a.resolution)?);
                (Some(s), Some(bc_region(&p, PowerSplit::new(lambda, beta)?)))
            } else {
                let lambda = need_lambda()?;
                let beta = match (p.regime(), a.beta) {
                    (Regime::Weak, Some(b)) => b,
                    (Regime::Weak, None) => {
                        return usage("weak interference: --scheme bc needs --beta (or --optimize)")
                    }
                    (r, b) => {
                        if b.is_some_and(|b| b != 0.0) {
                            note = Some(format!("private fraction forced to 0 in the {r} regime"));
                        }
                        0.0
                    }
                };
                let s = PowerSplit::new(lambda, beta)?;
                (Some(s.into()), Some(bc_region(&p, s)))
            }
        }
        RegionScheme::Cc | RegionScheme::Dc => {
            reject(&[(a.k.is_some(), "k"), (a.beta.is_some(), "beta")], &name)?;
            let scheme = if a.scheme == RegionScheme::Cc { Scheme::Cc } else { Scheme::Dc };
            let lambda = if a.optimize {
                frontier = Some(pareto_frontier(scheme, &p, a.resolution)?);
                maximize_sum(scheme, &p)?.best_split.lambda_or_k()
            } else {
                need_lambda()?
            };
            let pent = if scheme == Scheme::Cc { cc_region(&p, lambda)? } else { dc_region(&p, lambda)? };
            (Some(Split::Lambda { lambda }), Some(pent))
        }
        RegionScheme::Ec => {
            reject(&[(a.lambda.is_some(), "lambda"), (a.beta.is_some(), "beta")], &name)?;
            let k = match (a.optimize, a.k) {
                (true, _) => {
                    let k = maximize_sum(Scheme::Ec, &p)?.best_split.lambda_or_k();
                    frontier = Some(pareto_frontier(Scheme::Ec, &p, a.resolution)?);
                    k
                }
                (false, Some(k)) => k,
                (false, None) => return usage("--scheme ec needs --k or --optimize"),
            };
            let k = EcScale::new(k)?;
            (Some(k.into()), Some(ec_region(&p, k)?))
        }
        RegionScheme::Z => {
            reject(&[(a.lambda.is_some(), "lambda"), (a.k.is_some(), "k")], &name)?;
            let pent = z_channel_region(&p, a.beta)?;
            let beta = match (p.regime(), a.beta) {
                (Regime::Weak, Some(b)) => b,
                (Regime::Weak, None) => fdside::schemes::bc_beta_star(&p.with_w(0.0)?, 0.0)?.beta,
                _ => 0.0,
            };
            (Some(Split::Power { lambda: 0.0, beta }), Some(pent))
        }
        RegionScheme::OuterNointerf => {
            reject(
                &[(a.lambda.is_some(), "lambda"), (a.beta.is_some(), "beta"), (a.k.is_some(), "k"), (a.optimize, "optimize")],
                &name,
            )?;
            (None, Some(no_interference_outer(&p)))
        }
        RegionScheme::OuterGenie => {
            reject(&[(a.beta.is_some(), "beta"), (a.k.is_some(), "k")], &name)?;
            if a.optimize {
                return usage("use --scheme outer-envelope for the union over lambda");
            }
            let g = genie_outer(&p, need_lambda()?)?;
            (Some(Split::Lambda { lambda: g.lambda }), Some(g.pentagon))
        }
        RegionScheme::OuterEnvelope => {
            reject(&[(a.lambda.is_some(), "lambda"), (a.beta.is_some(), "beta"), (a.k.is_some(), "k")], &name)?;
            frontier = Some(genie_outer_envelope(&p, a.resolution)?);
            (None, None)
        }
    };

    let out = RegionOut {
        command: "region",
        scheme: name,
        regime: p.regime(),
        normalization: "per-Wm",
        params: p,
        split,
        note,
        pentagon,
        frontier,
    };
    Ok(match fmt {
        Format::Json => json(&out),
        Format::Csv => {
            let regime = out.regime.to_string();
            let mut rows = Vec::new();
            if let Some(pent) = out.pentagon {
                let [l, b, k] = split_columns(out.split);
                rows.push(vec![
                    "pentagon".into(),
                    regime.clone(),
                    out.normalization.into(),
                    num(pent.r1_max),
                    num(pent.r2_max),
                    num(pent.sum_max),
                    l,
                    b,
                    k,
                ]);
            }
            for s in out.frontier.iter().flatten() {
                let [l, b, k] = split_columns(s.split);
                rows.push(vec![
                    "frontier".into(),
                    regime.clone(),
                    out.normalization.into(),
                    num(s.r1),
                    num(s.r2),
                    String::new(),
                    l,
                    b,
                    k,
                ]);
            }
            csv(&["kind", "regime", "normalization", "r1", "r2", "sum", "lambda", "beta", "k"], &rows)
        }
    })
}

trait PossibleName {
    fn to_possible_value_name(&self) -> String;
}

impl<T: clap::ValueEnum> PossibleName for T {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

pub fn parse_mu_range(s: &str) -> Res<MuRange> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match nums.as_deref() {
        Some(&[a, b, c]) => MuRange::new(a, b, c).or_else(|e| usage(format!("--mu {s}: {e}"))),
        _ => usage(format!("--mu expects start:end:step, got {s:?}")),
    }
}

fn parse_nu(s: &str) -> Res<NuPolicy> {
    if s == "eq-mu" {
        return Ok(NuPolicy::EqMu);
    }
    match s.parse::<f64>() {
        Ok(nu) => Ok(NuPolicy::Const(nu)),
        Err(_) => usage(format!("--nu expects eq-mu or a number, got {s:?}")),
    }
}

#[derive(Serialize)]
struct SweepOut<'a> {
    command: &'static str,
    snr_db: f64,
    w: f64,
    nu: NuPolicy,
    mu: MuRange,
    normalization: &'static str,
    rows: &'a [SweepRow],
}

pub const SWEEP_HEADER: [&str; 6] = ["mu", "scheme", "gain", "gain_ratio_vs_nosc", "optimal_lambda", "sum_rate"];

fn sweep(a: &SweepArgs, fmt: Format) -> Res<String> {
    let range = parse_mu_range(&a.mu)?;
    let nu = parse_nu(&a.nu)?;
    let rows = figure6_sweep(a.snr_db, a.w, nu, range)?;
    Ok(match fmt {
        Format::Json => json(&SweepOut {
            command: "sweep",
            snr_db: a.snr_db,
            w: a.w,
            nu,
            mu: range,
            normalization: "per-Wm",
            rows: &rows,
        }),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.mu),
                        r.scheme.to_string(),
                        num(r.gain),
                        num(r.gain_ratio_vs_nosc),
                        num(r.optimal_lambda),
                        num(r.sum_rate),
                    ]
                })
                .collect();
            csv(&SWEEP_HEADER, &body)
        }
    })
}

fn gap(a: &GapArgs, seed: u64, fmt: Format) -> Res<(String, Res<()>)> {
    let scheme = match a.scheme {
        GapScheme::Bc => Scheme::Bc,
        GapScheme::Dc => Scheme::Dc,
        GapScheme::Ec => Scheme::Ec,
    };
    let draws = a.draws.unwrap_or(if scheme == Scheme::Bc { 10_000 } else { 1000 });
    if draws == 0 {
        return usage("--draws must be positive");
    }
    let rep: GapSuiteReport = run_gap_suite(&GapSuiteConfig {
        scheme,
        draws,
        seed,
        w: a.w,
        constrain_conditions: a.constrain_conditions,
    })?;
    let text = match fmt {
        Format::Json => json(&rep),
        Format::Csv => csv(
            &[
                "scheme",
                "draws",
                "seed",
                "draws_meeting_conditions",
                "max_d_r1",
                "max_d_r2",
                "max_d_sum",
                "violations",
                "analytic_exceedances",
                "strong_sum_expression_exceedances",
                "normalization",
            ],
            &[vec![
                rep.scheme.to_string(),
                rep.draws.to_string(),
                rep.seed.to_string(),
                rep.draws_meeting_conditions.to_string(),
                num(rep.max_d_r1),
                num(rep.max_d_r2),
                opt_num(rep.max_d_sum),
                rep.violations.to_string(),
                rep.analytic_exceedances.to_string(),
                rep.strong_sum_expression_exceedances.to_string(),
                rep.normalization.to_string(),
            ]],
        ),
    };
    let outcome = if rep.violations > 0 || rep.analytic_exceedances > 0 {
        Err(Failure::Verification(format!(
            "{} ceiling violations, {} closed-form exceedances",
            rep.violations, rep.analytic_exceedances
        )))
    } else {
        Ok(())
    };
    Ok((text, outcome))
}

#[derive(Serialize)]
struct MgainRow {
    scheme: Scheme,
    asymptotic: Option<f64>,
    finite: Option<f64>,
    warning: Option<String>,
}

#[derive(Serialize)]
struct MgainOut {
    command: &'static str,
    mu: f64,
    nu: f64,
    w: f64,
    snr_db: Option<f64>,
    rows: Vec<MgainRow>,
}

fn mgain(a: &MgainArgs, fmt: Format) -> Res<String> {
    let asymptotic = a.asymptotic || !a.finite;
    let finite_params = if a.finite {
        let Some(snr_db) = a.snr_db else {
            return usage("--finite needs --snr-db");
        };
        Some(ChannelParams::from_exponents(db_to_linear(snr_db), a.mu, a.nu, a.w)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for s in Scheme::ALL {
        let mut warning = None;
        if s == Scheme::Ec && a.w < 1.0 {
            warning = Some(format!("estimate-and-cancel requires w >= 1, got {}", a.w));
            rows.push(MgainRow { scheme: s, asymptotic: None, finite: None, warning });
            continue;
        }
        let asym = if asymptotic {
            let pt = mgain_point(s, a.mu, a.nu, a.w)?;
            if pt.non_integer_w {
                warning = Some("non-integer w".to_string());
            }
            Some(pt.gain)
        } else {
            None
        };
        let finite = match &finite_params {
            Some(p) => Some(mgain_finite(p, maximize_sum(s, p)?.best_sum)?),
            None => None,
        };
        rows.push(MgainRow { scheme: s, asymptotic: asym, finite, warning });
    }
    let out = MgainOut {
        command: "mgain",
        mu: a.mu,
        nu: a.nu,
        w: a.w,
        snr_db: a.snr_db.filter(|_| a.finite),
        rows,
    };
    Ok(match fmt {
        Format::Json => json(&out),
        Format::Csv => {
            let body: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.scheme.to_string(),
                        opt_num(r.asymptotic),
                        opt_num(r.finite),
                        r.warning.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            csv(&["scheme", "asymptotic", "finite", "warning"], &body)
        }
    })
}

#[derive(Serialize)]
struct VerifyOut {
    command: &'static str,
    seed: u64,
    passed: bool,
    suites: Vec<SuiteResult>,
}

fn verify(a: &VerifyArgs, seed: u64, fmt: Format) -> Res<(String, Res<()>)> {
    let mut names: Vec<String> = Vec::new();
    if a.suite.is_empty() {
        names.extend(DEFAULT_SUITES.iter().map(|s| s.to_string()));
    }
    for s in &a.suite {
        if s == "all" {
            names.extend(DEFAULT_SUITES.iter().chain(EXTRA_SUITES.iter()).map(|s| s.to_string()));
        } else if DEFAULT_SUITES.contains(&s.as_str()) || EXTRA_SUITES.contains(&s.as_str()) {
            names.push(s.clone());
        } else {
            return usage(format!(
                "unknown suite {s:?}; known: {}, {}, all",
                DEFAULT_SUITES.join(", "),
                EXTRA_SUITES.join(", ")
            ));
        }
    }
    if a.draws == Some(0) {
        return usage("--draws must be positive");
    }
    let cfg = VerifyConfig {
        draws: a.draws,
        seed,
        perturb: a.perturb,
    };
    let mut suites = Vec::new();
    for n in &names {
        suites.push(run_suite(n, &cfg)?);
    }
    let passed = suites.iter().all(|s| s.passed);
    let failures: Vec<String> = suites
        .iter()
        .filter(|s| !s.passed)
        .map(|s| {
            let detail = s
                .worst
                .as_ref()
                .map(|w| format!(" at draw {} with {:?}: {}", w.index, w.params, w.detail))
                .unwrap_or_default();
            format!("{} (max error {} > {}){detail}", s.name, num(s.max_error), num(s.threshold))
        })
        .collect();
    let text = match fmt {
        Format::Json => json(&VerifyOut {
            command: "verify",
            seed,
            passed,
            suites,
        }),
        Format::Csv => {
            let body: Vec<Vec<String>> = suites
                .iter()
                .map(|s| {
                    vec![
                        s.name.clone(),
                        s.draws.to_string(),
                        num(s.max_error),
                        num(s.threshold),
                        s.passed.to_string(),
                    ]
                })
                .collect();
            csv(&["suite", "draws", "max_error", "threshold", "passed"], &body)
        }
    };
    let outcome = if passed {
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    };
    Ok((text, outcome))
}
