//! Acceptance criteria, one line per criterion. Exits non-zero if any fail.

use std::process::Command;
use std::time::{Duration, Instant};

use fdside::analysis::{
    mgain_asymptotic, mgain_improvement, run_gap_suite, GapSuiteConfig, ANALYTIC_SLACK,
};
use fdside::bounds::{inr_star, no_interference_outer};
use fdside::geometry::{fm_project_oracle, frontier_gap, pentagon_frontier, DEFAULT_ORACLE_STEP};
use fdside::schemes::{
    bc_beta_star, bc_mac_components, bc_region, bc_sum_rate, cc_quantization_variance,
    cc_reconstructed_r1, cc_region, dc_region, ec_region,
};
use fdside::verify::{beta_grid_oracle, draw_rng, mgain_pair, high_snr_sum_ratio, SUM_RATIO_CONFIGS};
use fdside::{db_to_linear, side_cap, ChannelParams, EcScale, Error, PowerSplit, Regime, Scheme};
use rand::Rng;

const SEED: u64 = 20_240_601;

const FIG6_TOL: f64 = 0.05;
const FIG6_TARGETS: [(&str, f64); 4] = [("bc", 1.57), ("dc", 1.51), ("cc", 1.41), ("ec", 1.22)];
const FIG6_MAX_SECS: u64 = 60;
const MU0_TOL: f64 = 1e-6;
const ONE_BIT_DRAWS: usize = 10_000;
const ONE_BIT_MAX_SECS: u64 = 120;
const HALF_BIT_DRAWS: usize = 1000;
const HALF_BIT_CEILING: f64 = 0.5;
const FM_DRAWS: u64 = 100;
const FM_TOL: f64 = 2.0 * DEFAULT_ORACLE_STEP;
const BETA_DRAWS: u64 = 200;
const BETA_STEP: f64 = 1e-4;
const BETA_TOL: f64 = 1e-5;
const CC_DRAWS: u64 = 1000;
const CC_TOL: f64 = 1e-9;
const MGAIN_TOL: f64 = 0.05;
const MGAIN_MU: [f64; 4] = [0.25, 0.5, 1.0, 1.5];
const MGAIN_WNU: [f64; 3] = [0.25, 0.5, 1.0];
const IDENTITY_TOL: f64 = 1e-12;
const SUM_RATIO_SNR: f64 = 1e9;
const SUM_RATIO_MAX: f64 = 1.01;
const INR_STAR_SNR: f64 = 1e6;
const INR_STAR_BAND: (f64, f64) = (0.99, 1.01);
const DEGENERATE_MAX: Duration = Duration::from_secs(1);

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

fn weak_draw(seed: u64, i: u64) -> (ChannelParams, f64, f64) {
    let mut rng = draw_rng(seed, i);
    let s1 = db_to_linear(rng.gen_range(0.0..60.0));
    let s2_db: f64 = rng.gen_range(1.0..60.0);
    let inr = db_to_linear(rng.gen_range(0.0..s2_db));
    let ss = db_to_linear(rng.gen_range(0.0..60.0));
    let w = [0.0, 0.5, 1.0, 2.0][rng.gen_range(0..4)];
    let lambda = rng.gen_range(0.0..1.0);
    let beta = rng.gen_range(0.0..=1.0);
    let p = ChannelParams::new(s1, db_to_linear(s2_db), inr, ss, w).unwrap();
    assert_eq!(p.regime(), Regime::Weak);
    (p, lambda, beta)
}

fn fig6(r: &mut Report) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_fdside"))
        .args(["sweep", "--snr-db", "15", "--w", "1", "--nu", "eq-mu", "--mu", "0:2:0.01"])
        .output()
        .expect("run sweep");
    let elapsed = start.elapsed();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<(f64, String, f64, f64, f64)> = rd
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            let f = |i: usize| rec[i].parse::<f64>().unwrap();
            (f(0), rec[1].to_string(), f(2), f(3), f(4))
        })
        .collect();

    for (scheme, target) in FIG6_TARGETS {
        let mine: Vec<_> = rows.iter().filter(|x| x.1 == scheme).collect();
        let peak_gain = mine.iter().map(|x| x.2).fold(f64::NEG_INFINITY, f64::max);
        let peak_ratio = mine.iter().map(|x| x.3).fold(f64::NEG_INFINITY, f64::max);
        let ok = (peak_gain - target).abs() <= FIG6_TOL || (peak_ratio - target).abs() <= FIG6_TOL;
        r.line(
            &format!("1-{scheme}"),
            ok,
            format!("peak gain {peak_gain:.4}, peak ratio {peak_ratio:.4}, target {target} +/- {FIG6_TOL}"),
        );
    }
    r.line(
        "1-runtime",
        elapsed < Duration::from_secs(FIG6_MAX_SECS),
        format!("sweep took {:.2} s (limit {FIG6_MAX_SECS} s)", elapsed.as_secs_f64()),
    );

    let at0: Vec<_> = rows.iter().filter(|x| x.0 == 0.0).collect();
    let base = at0.iter().find(|x| x.1 == "no-sc").unwrap().2;
    let worst = at0
        .iter()
        .filter(|x| ["bc", "cc", "ec"].contains(&x.1.as_str()))
        .map(|x| (x.2 - base).abs())
        .fold(0.0, f64::max);
    r.line("1-mu0", worst <= MU0_TOL, format!("mu=0 BC/CC/EC gain deviation from no-SC {worst:.2e}"));
}

fn one_bit(r: &mut Report) {
    let start = Instant::now();
    let rep = run_gap_suite(&GapSuiteConfig {
        scheme: Scheme::Bc,
        draws: ONE_BIT_DRAWS,
        seed: SEED,
        w: None,
        constrain_conditions: false,
    })
    .unwrap();
    let elapsed = start.elapsed();
    r.line(
        "2-thresholds",
        rep.violations == 0 && rep.draws_meeting_conditions == ONE_BIT_DRAWS,
        format!(
            "{} draws, {} violations; max d_r1 {:.4}, d_r2 {:.4}, d_sum {:.4} (per total bandwidth)",
            rep.draws,
            rep.violations,
            rep.max_d_r1,
            rep.max_d_r2,
            rep.max_d_sum.unwrap()
        ),
    );
    r.line(
        "2-closed-form-weak",
        rep.analytic_exceedances == 0,
        format!("{} draws exceed the weak-regime closed forms by more than {ANALYTIC_SLACK:e}", rep.analytic_exceedances),
    );
    r.line(
        "2-closed-form-strong",
        rep.strong_sum_expression_exceedances == 0,
        format!(
            "{} strong-regime draws exceed the genie-term-only sum expression by more than {ANALYTIC_SLACK:e}",
            rep.strong_sum_expression_exceedances
        ),
    );
    r.line(
        "2-runtime",
        elapsed < Duration::from_secs(ONE_BIT_MAX_SECS),
        format!("suite took {:.2} s (limit {ONE_BIT_MAX_SECS} s)", elapsed.as_secs_f64()),
    );
}

fn half_bit(r: &mut Report) {
    for scheme in [Scheme::Dc, Scheme::Ec] {
        let rep = run_gap_suite(&GapSuiteConfig {
            scheme,
            draws: HALF_BIT_DRAWS,
            seed: SEED,
            w: None,
            constrain_conditions: true,
        })
        .unwrap();
        let ok = rep.violations == 0
            && rep.draws_meeting_conditions == HALF_BIT_DRAWS
            && rep.max_d_r1 <= HALF_BIT_CEILING
            && rep.max_d_r2 <= HALF_BIT_CEILING;
        r.line(
            &format!("3-{scheme}"),
            ok,
            format!(
                "{} conditioned draws, {} violations, max d_r1 {:.4}, d_r2 {:.4}",
                rep.draws_meeting_conditions, rep.violations, rep.max_d_r1, rep.max_d_r2
            ),
        );
    }
}

fn fm_oracle(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for i in 0..FM_DRAWS {
        let (p, lambda, beta) = weak_draw(SEED, i);
        let s = PowerSplit::new(lambda, beta).unwrap();
        let oracle = fm_project_oracle(&bc_mac_components(&p, s), DEFAULT_ORACLE_STEP).unwrap();
        let pent = bc_region(&p, s);
        let n = ((pent.r1_corner().0 - pent.r2_corner().0) / DEFAULT_ORACLE_STEP).ceil() as usize + 2;
        let closed = pentagon_frontier(&pent, n);
        worst = worst
            .max(frontier_gap(&oracle, &closed).unwrap())
            .max(frontier_gap(&closed, &oracle).unwrap());
    }
    r.line("4", worst <= FM_TOL, format!("{FM_DRAWS} weak draws, max frontier distance {worst:.3e} (limit {FM_TOL:e})"));
}

fn beta_star(r: &mut Report) {
    let n = (1.0 / BETA_STEP).round() as usize;
    let mut worst: f64 = 0.0;
    let mut grid_above: f64 = f64::NEG_INFINITY;
    let mut refined_gap: f64 = 0.0;
    let mut off_grid = 0;
    for i in 0..BETA_DRAWS {
        let (p, lambda, _) = weak_draw(SEED ^ 0x5eed, i);
        let star = bc_beta_star(&p, lambda).unwrap().beta;
        let at_star = bc_sum_rate(&p, PowerSplit::new(lambda, star).unwrap());
        let grid = (0..=n)
            .map(|j| bc_sum_rate(&p, PowerSplit::new(lambda, j as f64 / n as f64).unwrap()))
            .fold(f64::NEG_INFINITY, f64::max);
        let (_, refined) = beta_grid_oracle(&p, lambda, BETA_STEP);
        if (at_star - grid).abs() > BETA_TOL {
            off_grid += 1;
        }
        worst = worst.max((at_star - grid).abs());
        grid_above = grid_above.max(grid - at_star);
        refined_gap = refined_gap.max((at_star - refined).abs());
    }
    r.line(
        "5",
        worst <= BETA_TOL,
        format!("{BETA_DRAWS} weak draws, max |closed form - grid| {worst:.3e} (limit {BETA_TOL:e}); {off_grid} draws outside"),
    );
    r.line(
        "5-grid-never-better",
        grid_above <= BETA_TOL,
        format!("max (grid - closed form) {grid_above:.3e}"),
    );
    r.line(
        "5-refined-grid",
        refined_gap <= BETA_TOL,
        format!("max |closed form - grid polished around its best point| {refined_gap:.3e}"),
    );
}

fn cc_identity(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for i in 0..CC_DRAWS {
        let mut rng = draw_rng(SEED ^ 0xcc, i);
        let mut db = || db_to_linear(rng.gen_range(0.0..60.0));
        let (s1, s2, inr, ss) = (db(), db(), db(), db());
        let w = rng.gen_range(0.05..3.0);
        let lambda = rng.gen_range(0.01..1.0);
        let p = ChannelParams::new(s1, s2, inr, ss, w).unwrap();
        let q = cc_quantization_variance(&p, lambda).unwrap();
        let direct = cc_region(&p, lambda).unwrap().r1_max;
        worst = worst.max((direct - cc_reconstructed_r1(&p, lambda, q).unwrap()).abs());
    }
    r.line("6", worst <= CC_TOL, format!("{CC_DRAWS} draws, max abs error {worst:.3e} bits (limit {CC_TOL:e})"));
}

fn convergence(r: &mut Report) {
    let mut worst = (0.0f64, String::new());
    for mu in MGAIN_MU {
        for nu in MGAIN_WNU {
            for s in Scheme::ALL {
                let (finite, limit) = mgain_pair(s, mu, nu).unwrap();
                let d = (finite - limit).abs();
                if d > MGAIN_TOL {
                    println!("    {s} mu={mu} w*nu={nu}: finite {finite:.4} vs limit {limit:.4}");
                }
                if d > worst.0 {
                    worst = (d, format!("{s} at mu={mu}, w*nu={nu}"));
                }
            }
        }
    }
    r.line(
        "7-finite-gain",
        worst.0 <= MGAIN_TOL,
        format!("max |finite gain at snr 1e6 - limit| {:.4} ({}), limit {MGAIN_TOL}", worst.0, worst.1),
    );

    let mut id_err: f64 = 0.0;
    for mu in MGAIN_MU {
        for wnu in MGAIN_WNU {
            let lhs = mgain_improvement(mu, wnu, 1.0).unwrap() * mgain_asymptotic(Scheme::NoSc, mu, 0.0, 0.0).unwrap();
            let rhs = mgain_asymptotic(Scheme::Bc, mu, wnu, 1.0).unwrap();
            id_err = id_err.max((lhs - rhs).abs());
        }
    }
    r.line("7-ratio-identity", id_err <= IDENTITY_TOL, format!("max |improvement * no-SC - BC| {id_err:.1e}"));

    let worst_ratio = SUM_RATIO_CONFIGS
        .iter()
        .map(|&(k, beta)| high_snr_sum_ratio(SUM_RATIO_SNR, k, beta).unwrap())
        .fold(0.0, f64::max);
    r.line("7-sum-ratio", worst_ratio <= SUM_RATIO_MAX, format!("max upper/lower sum ratio at snr 1e9 {worst_ratio:.5}"));

    let s = INR_STAR_SNR;
    let q = inr_star(s, s).unwrap() / (s * (1.0 + s));
    r.line(
        "7-inr-star",
        (INR_STAR_BAND.0..=INR_STAR_BAND.1).contains(&q),
        format!("inr*/(snr2(1+snr1)) at snr 1e6 = {q:.5}"),
    );
}

fn degenerate(r: &mut Report) {
    let start = Instant::now();
    let side_ok = [0.0, 1e-12, 1.0, 10.0, 1e6, 1e300].iter().all(|&x| side_cap(0.0, x).unwrap() == 0.0);

    let mut vs_ok = true;
    for (s1, s2) in [(10.0, 10.0), (1.0, 100.0), (1e3, 3.0)] {
        let p = ChannelParams::new(s1, s2, 2.0 * s2 * (1.0 + s1), 50.0, 1.0).unwrap();
        let o = no_interference_outer(&p);
        for l in [0.0, 0.4, 1.0] {
            let b = bc_region(&p, PowerSplit::new(l, 0.7).unwrap());
            vs_ok &= p.regime() == Regime::VeryStrong && b == o;
        }
        let q = p.with_inr(0.0).unwrap();
        vs_ok &= cc_region(&q, 0.0).unwrap().max_sum() == o.r1_max + o.r2_max;
        vs_ok &= dc_region(&q, 0.0).unwrap().r1_max == o.r1_max;
    }

    let p = ChannelParams::new(10.0, 10.0, 5.0, 5.0, 0.5).unwrap();
    let ec_ok = matches!(ec_region(&p, EcScale::half_bit()), Err(Error::Precondition(_)))
        && ec_region(&p.with_w(1.0).unwrap(), EcScale::half_bit()).is_ok();

    let elapsed = start.elapsed();
    r.line("8-side-cap", side_ok, "side_cap(0, x) = 0 on all probes".into());
    r.line("8-very-strong", vs_ok, "very strong BC regions equal the point-to-point rectangle".into());
    r.line("8-ec-width", ec_ok, "estimate-and-cancel rejects w < 1".into());
    r.line("8-runtime", elapsed < DEGENERATE_MAX, format!("checks took {:.3} s", elapsed.as_secs_f64()));
}

fn main() {
    let mut r = Report { failed: Vec::new() };
    fig6(&mut r);
    one_bit(&mut r);
    half_bit(&mut r);
    fm_oracle(&mut r);
    beta_star(&mut r);
    cc_identity(&mut r);
    convergence(&mut r);
    degenerate(&mut r);
    if r.failed.is_empty() {
        println!("all acceptance criteria passed");
    } else {
        println!("failed criteria: {}", r.failed.join(", "));
        std::process::exit(1);
    }
}
