use std::fs;
use std::io::Write;

use gal_core::expsums::{
    annulus_exp_sum_f64, cauchy_schwarz_diagnostic, check_plug_and_also, e3_f3_bound_reports, g_theta_reports,
    lin_bound_rhs, counting_sweep, reduce_kappa, sigma_count, AnnulusSpec, BoundReport, Budget, CoeffSource, FreqBox,
    Phase,
};
use gal_core::harness::{
    corollary_heuristic, corollary_search, equidist_ratio, preset, sweep, type1_check, type2_check, ConfigLayer,
    ExperimentConfig, SweepGrid,
};
use gal_core::hurwitz::{approximation_quality, convergents, expand_from, satisfies_hurwitz_bound, CfError, Convergent};
use gal_core::output::{Cell, Manifest, Table};
use gal_core::primes::{build_sieve, count_annulus, pnt_ratio};
use gal_core::vaaler::{grid_check, VaalerParams};
use gal_core::{Error, GaussianInt, Theta};

use crate::args::{BoundKind, BoundsArgs, Cli, CoeffArg, Command, ConfigArgs, GlobalOpts, PhaseArg};

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn coeff_source(arg: CoeffArg, seed: u64) -> CoeffSource {
    match arg {
        CoeffArg::Zeros => CoeffSource::Zeros,
        CoeffArg::Ones => CoeffSource::Ones,
        CoeffArg::Random => CoeffSource::RandomDisc { seed },
    }
}

fn coeff_name(arg: CoeffArg) -> &'static str {
    match arg {
        CoeffArg::Zeros => "zeros",
        CoeffArg::Ones => "ones",
        CoeffArg::Random => "random",
    }
}

fn parse_gaussian(s: &str) -> Result<GaussianInt, Error> {
    let bad = || Error::Parse(format!("multiplier {s:?}: expected \"re,im\""));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok(GaussianInt::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn write_output(g: &GlobalOpts, payload: &str) -> Outcome<()> {
    match &g.out {
        Some(path) => fs::write(path, payload)?,
        None => std::io::stdout().lock().write_all(payload.as_bytes())?,
    }
    Ok(())
}

fn resolve_config(args: &ConfigArgs, g: &GlobalOpts) -> Outcome<ExperimentConfig> {
    let file = match &args.config {
        Some(path) => ConfigLayer::parse(&fs::read_to_string(path)?)?,
        None => ConfigLayer::default(),
    };
    let flags = ConfigLayer {
        theta: args.theta.clone(),
        x: args.x,
        delta: args.delta,
        m: args.m,
        alpha: args.alpha,
        beta: args.beta,
        j: args.j,
        epsilon: args.epsilon,
        seed: g.seed,
    };
    Ok(file.merge(flags).resolve()?)
}

fn with_config(mut m: Manifest, cfg: &ExperimentConfig) -> Manifest {
    for (k, v) in cfg.pairs().into_iter().filter(|(k, _)| k != "seed") {
        m = m.param(&k, v);
    }
    m
}

fn leading_convergents(theta: &Theta, n: usize, prec: u32) -> Outcome<Vec<Convergent>> {
    let exp = expand_from(theta, n.max(1), prec).map_err(Error::from)?;
    Ok(convergents(&exp))
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let g = &cli.global;
    let budget = Budget { max_lattice_points: g.max_points };
    let seed = g.seed.unwrap_or(0);
    let mut extra_error = None;
    let (manifest, table) = match &cli.command {
        Command::Sieve { x, annulus } => {
            let table = build_sieve((*x).max(2))?;
            let m = Manifest::new("sieve", seed, g.prec).param("x", x).param("annulus", annulus);
            let mut t;
            if *annulus {
                t = Table::new(&["x", "s_x", "pnt_ratio"]);
                t.push(vec![(*x).into(), count_annulus(&table, *x)?.into(), pnt_ratio(&table, *x)?.into()]);
            } else {
                t = Table::new(&["x", "primes_upto"]);
                t.push(vec![(*x).into(), table.count_upto(*x).into()]);
            }
            (m, t)
        }
        Command::Cf { theta, terms } => {
            let th = Theta::parse(theta)?;
            let (exp, stop) = match expand_from(&th, *terms, g.prec) {
                Ok(e) => (e, "complete"),
                Err(CfError::Terminated(e)) => (*e, "terminated"),
                Err(CfError::PrecisionExhausted(e)) => {
                    extra_error = Some(Error::PrecisionExhausted(format!("{} certified terms", e.certified_terms)));
                    (*e, "precision_exhausted")
                }
                Err(CfError::Other(e)) => return Err(e.into()),
            };
            let hp = th.eval(exp.precision_bits)?;
            let mut t = Table::new(&[
                "index", "a_re", "a_im", "p_re", "p_im", "q_re", "q_im", "q_abs", "quality", "hurwitz_ok",
            ]);
            for (a, c) in exp.partial_quotients.iter().zip(convergents(&exp)) {
                let ok = match satisfies_hurwitz_bound(&hp, &c) {
                    Some(v) => Cell::Bool(v),
                    None => Cell::Text("uncertified".into()),
                };
                t.push(vec![
                    c.index.into(),
                    a.re.into(),
                    a.im.into(),
                    c.p.re.into(),
                    c.p.im.into(),
                    c.q.re.into(),
                    c.q.im.into(),
                    c.q_abs().into(),
                    approximation_quality(&hp, &c).to_f64().into(),
                    ok,
                ]);
            }
            let m = Manifest::new("cf", seed, g.prec)
                .param("theta", theta)
                .param("terms", terms)
                .param("stop", stop)
                .param("precision_bits", exp.precision_bits);
            (m, t)
        }
        Command::VaalerCheck { j, grid } => {
            let mut t = Table::new(&["J", "grid", "max_excess", "min_sigma", "max_abs_error", "holds"]);
            for &jj in j {
                let s = grid_check(VaalerParams::new(jj)?, *grid);
                let holds = s.max_excess <= 1e-12 && s.min_sigma >= -1e-12;
                t.push(vec![(s.j as u64).into(), s.grid.into(), s.max_excess.into(), s.min_sigma.into(), s.max_abs_error.into(), holds.into()]);
            }
            let js: Vec<String> = j.iter().map(u32::to_string).collect();
            (Manifest::new("vaaler-check", seed, g.prec).param("J", js.join(",")).param("grid", grid), t)
        }
        Command::Expsum { theta, mult, lo, hi, phase } => {
            let th = Theta::parse(theta)?;
            let gm = parse_gaussian(mult)?;
            let spec = AnnulusSpec::new(*lo, *hi)?;
            let (kre, kim) = reduce_kappa(&th.eval(gal_core::hp::DEFAULT_PREC)?.mul_gaussian(gm));
            let ph = match phase {
                PhaseArg::Im => Phase::Im,
                PhaseArg::Re => Phase::Re,
            };
            let s = annulus_exp_sum_f64(spec, kre, kim, ph, &budget)?;
            let r = BoundReport::new("linear", s.norm(), lin_bound_rhs(spec, kre, kim))
                .with("lo", *lo)
                .with("hi", *hi)
                .with("sum_re", s.re)
                .with("sum_im", s.im)
                .with("kappa_re", kre)
                .with("kappa_im", kim);
            let m = Manifest::new("expsum", seed, g.prec)
                .param("theta", theta)
                .param("mult", mult)
                .param("lo", lo)
                .param("hi", hi)
                .param("phase", format!("{phase:?}").to_lowercase());
            (m, Table::from_reports(&[r]))
        }
        Command::SigmaCount { theta, z, d1, d2 } => {
            let th = Theta::parse(theta)?;
            let c = sigma_count(&th, *z, *d1, *d2, &budget)?;
            let mut t = Table::new(&["z", "d1", "d2", "count"]);
            t.push(vec![(*z).into(), (*d1).into(), (*d2).into(), c.into()]);
            let m = Manifest::new("sigma-count", seed, g.prec).param("theta", theta).param("z", z).param("d1", d1).param("d2", d2);
            (m, t)
        }
        Command::BoundsReport(b) => bounds_report(b, g, seed, &budget)?,
        Command::Equidist { cfg, preset: budget_x } => {
            let mut c = resolve_config(cfg, g)?;
            let mut m = Manifest::new("equidist", c.seed, g.prec);
            if let Some(bx) = budget_x {
                let p = preset(&c.theta()?, *bx)?;
                c.x = p.x;
                m = m.param("preset", bx).param("q", p.conv.q);
            }
            let table = build_sieve(c.x)?;
            let r = equidist_ratio(&c, &table)?;
            (with_config(m, &c), Table::from_ratios(&[r]))
        }
        Command::TypeChecks { cfg, coeffs } => {
            let c = resolve_config(cfg, g)?;
            let src = coeff_source(*coeffs, c.seed);
            let reports = [type1_check(&c, src, &budget)?, type2_check(&c, src, &budget)?];
            let m = with_config(Manifest::new("type-checks", c.seed, g.prec), &c).param("coeffs", coeff_name(*coeffs));
            (m, Table::from_reports(&reports))
        }
        Command::Corollary { theta, gamma, x_max } => {
            let th = Theta::parse(theta)?;
            let table = build_sieve((*x_max).max(2))?;
            let hits = corollary_search(&th, *gamma, *x_max, &table)?;
            eprintln!(
                "# {} hits; heuristic expectation {:.1}",
                hits.len(),
                corollary_heuristic(&table, *gamma, *x_max)
            );
            let mut t = Table::new(&["p_re", "p_im", "norm", "dist", "threshold", "reverified"]);
            for h in &hits {
                t.push(vec![h.p.re.into(), h.p.im.into(), h.norm.into(), h.dist.into(), h.threshold.into(), h.reverified.into()]);
            }
            let m = Manifest::new("corollary", seed, g.prec).param("theta", theta).param("gamma", gamma).param("x_max", x_max);
            (m, t)
        }
        Command::Sweep { theta, xs, deltas } => {
            let th = Theta::parse(theta)?;
            let grid = SweepGrid { xs: xs.clone(), deltas: deltas.clone() };
            let rows = sweep(&th, &grid)?;
            let xs_s: Vec<String> = xs.iter().map(u64::to_string).collect();
            let ds_s: Vec<String> = deltas.iter().map(f64::to_string).collect();
            let m = Manifest::new("sweep", seed, g.prec)
                .param("theta", theta)
                .param("xs", xs_s.join(","))
                .param("deltas", ds_s.join(","));
            (m, Table::from_ratios(&rows))
        }
    };
    write_output(g, &table.render(&manifest, g.json))?;
    match extra_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn bounds_report(b: &BoundsArgs, g: &GlobalOpts, seed: u64, budget: &Budget) -> Outcome<(Manifest, Table)> {
    let th = Theta::parse(&b.theta)?;
    let convs = leading_convergents(&th, b.convergents, g.prec)?;
    let mut m = Manifest::new("bounds-report", seed, g.prec)
        .param("kind", format!("{:?}", b.kind).to_lowercase())
        .param("theta", &b.theta)
        .param("convergents", b.convergents);
    let src = coeff_source(b.coeffs, seed);
    let reports: Vec<BoundReport> = match b.kind {
        BoundKind::Linear => {
            m = m.param("y", b.y);
            let spec = AnnulusSpec::new(0.0, b.y)?;
            let hp = th.eval(gal_core::hp::DEFAULT_PREC)?;
            let mut mults = vec![GaussianInt::new(1, 0)];
            mults.extend(convs.iter().map(|c| c.q).filter(|q| q.norm_u128() > 1));
            let mut out = Vec::new();
            for gm in mults {
                let (kre, kim) = reduce_kappa(&hp.mul_gaussian(gm));
                let s = annulus_exp_sum_f64(spec, kre, kim, Phase::Im, budget)?;
                out.push(
                    BoundReport::new("linear", s.norm(), lin_bound_rhs(spec, kre, kim))
                        .with("mult_re", gm.re as f64)
                        .with("mult_im", gm.im as f64)
                        .with("y", b.y),
                );
            }
            out
        }
        BoundKind::Counting => {
            m = m.param("z_max", b.z_max);
            let usable: Vec<Convergent> = convs.into_iter().filter(|c| c.q_abs() > 1.0).collect();
            let mut out = counting_sweep(&th, &usable, b.z_max as f64, budget)?;
            if usable.is_empty() {
                let one = leading_convergents(&th, 1, g.prec)?;
                out.push(check_plug_and_also(&th, &one[0], b.z, 0.5, 0.5, budget)?);
            }
            out
        }
        BoundKind::Gtheta => {
            m = m.param("y", b.y).param("z", b.z);
            let mut out = Vec::new();
            for c in convs.iter().filter(|c| c.q_abs() > 1.0) {
                out.extend(g_theta_reports(&th, c, b.y, b.z, budget)?);
            }
            out
        }
        BoundKind::E3f3 => {
            m = m
                .param("x", b.x)
                .param("h1", b.h1)
                .param("h2", b.h2)
                .param("m_max", b.m_max)
                .param("alpha", b.alpha)
                .param("beta", b.beta)
                .param("coeffs", coeff_name(b.coeffs));
            let bx = FreqBox::new(b.h1, b.h2)?;
            let mut out = Vec::new();
            for c in convs.iter().filter(|c| c.q_abs() > 1.0) {
                out.extend(e3_f3_bound_reports(&th, c, &bx, b.m_max, b.alpha, b.beta, b.x as f64, src, budget)?);
            }
            out
        }
        BoundKind::Cs => {
            m = m
                .param("x", b.x)
                .param("h1", b.h1)
                .param("h2", b.h2)
                .param("k", b.k)
                .param("kp", b.kp)
                .param("coeffs", coeff_name(b.coeffs));
            let bx = FreqBox::new(b.h1, b.h2)?;
            vec![cauchy_schwarz_diagnostic(&th, &bx, b.k, b.kp, b.x as f64, src, budget)?]
        }
    };
    Ok((m, Table::from_reports(&reports)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_syntax() {
        assert_eq!(parse_gaussian("3,-2").unwrap(), GaussianInt::new(3, -2));
        assert_eq!(parse_gaussian(" 1 , 0 ").unwrap(), GaussianInt::new(1, 0));
        assert!(parse_gaussian("3-2i").is_err());
    }

    #[test]
    fn coefficient_sources() {
        assert_eq!(coeff_source(CoeffArg::Random, 5), CoeffSource::RandomDisc { seed: 5 });
        assert_eq!(coeff_source(CoeffArg::Ones, 5), CoeffSource::Ones);
    }
}
