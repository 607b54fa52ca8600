//! The counting function `Σ_θ(z, Δ1, Δ2)`, the sum `G_θ(y, z)` and the
//! spacing of the points `nθ` modulo Z[i].

use rayon::prelude::*;
use serde::Serialize;

use super::{disk_cost, BoundReport, Budget};
use crate::error::{Error, Result};
use crate::gaussian::{isqrt, GaussianInt};
use crate::hp::{HpReal, DEFAULT_PREC};
use crate::hurwitz::{Convergent, HURWITZ_C};
use crate::probe::MultipleProbe;
use crate::theta::Theta;

/// Runs `f` on each row `m1` of the disk `N(n) <= z` in parallel and returns
/// the per-row results in row order.
fn rows<T: Send>(z: f64, f: impl Fn(i64, i64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let zf = z.max(0.0).floor() as u64;
    let r = isqrt(zf) as i64;
    (-r..=r)
        .into_par_iter()
        .map(|a| f(a, isqrt(zf - (a * a) as u64) as i64))
        .collect()
}

/// `#{0 < N(n) <= z : ||Im nθ|| <= d1, ||Re nθ|| <= d2}` by certified tests.
pub fn sigma_count(theta: &Theta, z: f64, d1: f64, d2: f64, budget: &Budget) -> Result<u64> {
    for d in [d1, d2] {
        if !(0.0..=0.5).contains(&d) {
            return Err(Error::DomainError(format!("window {d} outside [0, 1/2]")));
        }
    }
    budget.check("sigma_count", disk_cost(z))?;
    let probe = MultipleProbe::new(theta, GaussianInt::new(1, 0))?;
    let counts = rows(z, |a, w| {
        let mut c = 0u64;
        for b in -w..=w {
            if (a, b) != (0, 0) && probe.within_box(GaussianInt::new(a, b), d1, d2)? {
                c += 1;
            }
        }
        Ok(c)
    })?;
    Ok(counts.iter().sum())
}

/// Side `|q|/(4C)` of the covering rectangles.
pub fn rectangle_side(conv: &Convergent) -> f64 {
    conv.q_abs() / (4.0 * HURWITZ_C)
}

/// Number of cells `(ks, (k+1)s] × (ls, (l+1)s]` of the grid anchored at the
/// origin that meet the lattice points of the disk `N(n) <= z`.
pub fn covering_rectangles(z: f64, side: f64) -> u64 {
    let zf = z.max(0.0).floor() as u64;
    let r = isqrt(zf) as i64;
    let cell = |v: i64| (v as f64 / side).ceil() as i64 - 1;
    // widest row per column of cells; rows are symmetric intervals [-w, w]
    let mut widest: std::collections::BTreeMap<i64, i64> = Default::default();
    for a in -r..=r {
        let w = isqrt(zf - (a * a) as u64) as i64;
        let e = widest.entry(cell(a)).or_insert(0);
        *e = (*e).max(w);
    }
    widest
        .values()
        .map(|&w| if side >= 1.0 { (cell(w) - cell(-w) + 1) as u64 } else { (2 * w + 1) as u64 })
        .sum()
}

/// `⌈1 + d1/D⌉·⌈1 + d2/D⌉`, a cap on points at mutual distance `>= D` in a
/// `d1 × d2` rectangle.
pub fn counting_cap(d1: f64, d2: f64, dmin: f64) -> f64 {
    (1.0 + d1 / dmin).ceil() * (1.0 + d2 / dmin).ceil()
}

/// Whether `(z, d1, d2)` lies in the regime where `Σ_θ` must vanish.
pub fn in_vanishing_regime(conv: &Convergent, z: f64, d1: f64, d2: f64) -> bool {
    let q = conv.q_abs();
    d1.max(d2) < 1.0 / (8f64.sqrt() * q) && z <= q * q / (8.0 * HURWITZ_C * HURWITZ_C)
}

/// `Σ_θ(z, d1, d2)` against `(1 + z/|q|²)(1 + d1|q|)(1 + d2|q|)`.
///
/// Fails with [`Error::VanishingViolated`] if the count is nonzero although
/// `max(d1, d2) < 1/(√8|q|)` and `z <= |q|²/(8C²)`.
pub fn check_plug_and_also(theta: &Theta, conv: &Convergent, z: f64, d1: f64, d2: f64, budget: &Budget) -> Result<BoundReport> {
    let q = conv.q_abs();
    let measured = sigma_count(theta, z, d1, d2, budget)?;
    let vanishing = in_vanishing_regime(conv, z, d1, d2);
    if vanishing && measured != 0 {
        return Err(Error::VanishingViolated(format!(
            "theta = {theta}, q = {}, z = {z}, d = ({d1}, {d2}): count {measured}",
            conv.q
        )));
    }
    let rhs = (1.0 + z / (q * q)) * (1.0 + d1 * q) * (1.0 + d2 * q);
    let side = rectangle_side(conv);
    let rects = covering_rectangles(z, side);
    let v_d = counting_cap(d1, d2, 1.0 / (8f64.sqrt() * q));
    Ok(BoundReport::new("counting", measured as f64, rhs)
        .with("q_abs", q)
        .with("conv_index", conv.index as f64)
        .with("z", z)
        .with("d1", d1)
        .with("d2", d2)
        .with("vanishing_regime", vanishing as u8 as f64)
        .with("rectangles", rects as f64)
        .with("v_d", v_d)
        .with("counting_cap", 4.0 * rects as f64 * v_d))
}

/// `G_θ(y, z) = Σ_{0<N(n)<=z} min{||Im nθ||⁻¹, √y}^{1/2} min{||Re nθ||⁻¹, √y}^{1/2}`.
pub fn g_theta(theta: &Theta, y: f64, z: f64, budget: &Budget) -> Result<f64> {
    if y.is_nan() || y < 1.0 {
        return Err(Error::DomainError(format!("G_theta needs y >= 1, got {y}")));
    }
    budget.check("g_theta", disk_cost(z))?;
    let probe = MultipleProbe::new(theta, GaussianInt::new(1, 0))?;
    let sy = y.sqrt();
    let cap = |d: f64| if d * sy <= 1.0 { sy } else { 1.0 / d };
    let parts = rows(z, |a, w| {
        let mut s = 0.0;
        for b in -w..=w {
            if (a, b) != (0, 0) {
                let (dre, dim) = probe.dists(GaussianInt::new(a, b));
                s += (cap(dim) * cap(dre)).sqrt();
            }
        }
        Ok(s)
    })?;
    Ok(parts.iter().sum())
}

/// `G_θ(y, z)` against the first-case bound and, when `z <= |q|²/(8C²)`,
/// the second-case bound.
pub fn g_theta_reports(theta: &Theta, conv: &Convergent, y: f64, z: f64, budget: &Budget) -> Result<Vec<BoundReport>> {
    let g = g_theta(theta, y, z, budget)?;
    let q = conv.q_abs();
    let ctx = |r: BoundReport| r.with("y", y).with("z", z).with("q_abs", q).with("conv_index", conv.index as f64);
    let first = (1.0 + z / (q * q)) * (y.sqrt() + q * q) * (2.0 * y).ln().powi(2);
    let mut out = vec![ctx(BoundReport::new("g_general", g, first))];
    if z <= q * q / (8.0 * HURWITZ_C * HURWITZ_C) {
        let second = (q * y.powf(0.25) + q * q) * (2.0 * q).ln().powi(2);
        out.push(ctx(BoundReport::new("g_short", g, second)));
    }
    Ok(out)
}

/// Outcome of the pairwise spacing check on one rectangle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpacingReport {
    pub origin: (f64, f64),
    pub side: f64,
    pub points: u64,
    pub pairs: u64,
    pub differences: u64,
    /// smallest `||(n1 - n2)θ||` seen (from the fast path, not certified)
    pub min_dist: f64,
    pub bound: f64,
    /// certified: every pair is at distance `>= bound`
    pub holds: bool,
}

/// Checks `||(n1 - n2)θ|| >= 1/(2√2|q|)` for all distinct lattice points of
/// `(a1, a1+s] × (a2, a2+s]`, `s = |q|/(4C)`.
///
/// Two pairs with equal difference give equal distances, so each difference
/// `n1 - n2` (up to sign) is tested once.
pub fn spacing_check(theta: &Theta, conv: &Convergent, a1: f64, a2: f64) -> Result<SpacingReport> {
    let side = rectangle_side(conv);
    let span = |a: f64| ((a + side).floor() as i64 - a.floor() as i64).max(0);
    let (wx, wy) = (span(a1), span(a2));
    let points = (wx * wy) as u64;
    let probe = MultipleProbe::new(theta, GaussianInt::new(1, 0))?;
    let bound_hp = HpReal::from_i64(1, DEFAULT_PREC).div(&HpReal::sqrt_u64(8 * conv.q_norm(), DEFAULT_PREC))?;
    let diffs: Vec<(i64, i64)> = (0..wx)
        .flat_map(|dx| ((1 - wy)..wy).map(move |dy| (dx, dy)))
        .filter(|&(dx, dy)| dx > 0 || dy > 0)
        .collect();
    let checked: Vec<(bool, f64)> = diffs
        .par_iter()
        .map(|&(dx, dy)| {
            let d = GaussianInt::new(dx, dy);
            let (re, im) = probe.dists(d);
            Ok((probe.sup_ge(d, &bound_hp)?, re.max(im)))
        })
        .collect::<Result<_>>()?;
    Ok(SpacingReport {
        origin: (a1, a2),
        side,
        points,
        pairs: points * points.saturating_sub(1) / 2,
        differences: diffs.len() as u64,
        min_dist: checked.iter().map(|c| c.1).fold(f64::INFINITY, f64::min),
        bound: bound_hp.to_f64(),
        holds: checked.iter().all(|c| c.0),
    })
}

/// [`check_plug_and_also`] over the given convergents, for
/// `z ∈ {|q|²/(8C²), |q|²/4, |q|², 2|q|²}` up to `z_max` and five window
/// shapes between `1/(4|q|)` and `1/2`.
pub fn counting_sweep(theta: &Theta, convs: &[Convergent], z_max: f64, budget: &Budget) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for conv in convs {
        let q = conv.q_abs();
        let q2 = q * q;
        let zs = [q2 / (8.0 * HURWITZ_C * HURWITZ_C), q2 / 4.0, q2, 2.0 * q2];
        let small = (1.0 / q).min(0.5);
        let ds = [(0.5, 0.5), (0.1, 0.1), (small, small), (0.5, small), (small / 4.0, small / 4.0)];
        for &z in zs.iter().filter(|&&z| z <= z_max) {
            for &(d1, d2) in &ds {
                out.push(check_plug_and_also(theta, conv, z, d1, d2, budget)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::annulus_points;
    use crate::hurwitz::{convergents, expand};

    fn convs(src: &str, n: usize) -> (Theta, Vec<Convergent>) {
        let t = Theta::parse(src).unwrap();
        let c = convergents(&expand(&t, n).unwrap());
        (t, c)
    }

    #[test]
    fn sigma_examples() {
        let b = Budget::default();
        let t = Theta::parse("sqrt:2 + i*sqrt:3").unwrap();
        assert_eq!(sigma_count(&t, 50.0, 0.5, 0.5, &b).unwrap(), annulus_points(0, 50).count() as u64);
        assert_eq!(sigma_count(&t, 500.0, 0.0, 0.0, &b).unwrap(), 0);
        assert_eq!(sigma_count(&t, 0.5, 0.5, 0.5, &b).unwrap(), 0);
        assert!(sigma_count(&t, 10.0, 0.6, 0.1, &b).is_err());
    }

    #[test]
    fn sigma_matches_brute_force() {
        let b = Budget::default();
        let t = Theta::parse("sqrt:2 + i*sqrt:3").unwrap();
        let th = t.eval(256).unwrap();
        for (d1, d2) in [(0.1, 0.1), (0.05, 0.3), (0.5, 0.02)] {
            let brute = annulus_points(0, 1000)
                .filter(|&n| {
                    let z = th.mul_gaussian(n);
                    z.im.dist_to_int().to_f64() <= d1 && z.re.dist_to_int().to_f64() <= d2
                })
                .count() as u64;
            assert_eq!(sigma_count(&t, 1000.0, d1, d2, &b).unwrap(), brute);
        }
    }

    #[test]
    fn rational_theta_hits_zero_window() {
        let b = Budget::default();
        let t = Theta::parse("0.5 + 0.25i").unwrap();
        // nθ ∈ Z[i] exactly when 4 | n
        let expect = annulus_points(0, 100).filter(|n| n.re % 4 == 0 && n.im % 4 == 0).count() as u64;
        assert_eq!(sigma_count(&t, 100.0, 0.0, 0.0, &b).unwrap(), expect);
    }

    #[test]
    fn counting_reports_and_vanishing() {
        let b = Budget::default();
        let (t, cs) = convs("e + i*pi", 12);
        for c in cs.iter().filter(|c| c.q_abs() > 1.0 && c.q_abs() < 200.0) {
            let q = c.q_abs();
            let z = q * q / (8.0 * HURWITZ_C * HURWITZ_C);
            let d = 0.99 / (8f64.sqrt() * q);
            let r = check_plug_and_also(&t, c, z, d, d, &b).unwrap();
            assert_eq!(r.measured, 0.0);
            assert_eq!(r.context["vanishing_regime"], 1.0);
            let r = check_plug_and_also(&t, c, q * q, 0.5, 0.5, &b).unwrap();
            assert!(r.measured <= r.context["counting_cap"]);
            assert!(r.fitted_constant.is_finite() && r.fitted_constant > 0.0);
        }
        let r = check_plug_and_also(&t, &cs[2], 0.5, 0.5, 0.5, &b).unwrap();
        assert_eq!(r.measured, 0.0);
        assert!(r.bound_rhs >= 1.0);
    }

    #[test]
    fn counting_sweep_respects_z_cap() {
        let (t, cs) = convs("sqrt:2 + i*sqrt:3", 6);
        let rows = counting_sweep(&t, &cs[1..5], 2000.0, &Budget::default()).unwrap();
        assert!(!rows.is_empty() && rows.len().is_multiple_of(5));
        assert!(rows.iter().all(|r| r.context["z"] <= 2000.0 && r.fitted_constant.is_finite()));
        assert!(rows.iter().any(|r| r.context["vanishing_regime"] == 1.0));
    }

    #[test]
    fn covering_contains_every_point() {
        for (z, s) in [(100.0, 3.0), (57.0, 0.7), (1000.0, 12.5), (10.0, 100.0)] {
            let mut cells = std::collections::BTreeSet::new();
            for n in annulus_points(0, z as u64).chain([GaussianInt::new(0, 0)]) {
                let c = |v: i64| (v as f64 / s).ceil() as i64 - 1;
                cells.insert((c(n.re), c(n.im)));
            }
            assert_eq!(covering_rectangles(z, s), cells.len() as u64, "z={z} s={s}");
        }
    }

    #[test]
    fn g_theta_examples() {
        let b = Budget::default();
        let t = Theta::parse("sqrt:2 + i*sqrt:3").unwrap();
        let th = t.eval(256).unwrap();
        let y = 50.0f64;
        let direct: f64 = [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .map(|&(a, b)| {
                let z = th.mul_gaussian(GaussianInt::new(a, b));
                let cap = |d: f64| (1.0 / d).min(y.sqrt());
                (cap(z.im.dist_to_int().to_f64()) * cap(z.re.dist_to_int().to_f64())).sqrt()
            })
            .sum();
        assert!((g_theta(&t, y, 1.0, &b).unwrap() - direct).abs() < 1e-12);
        assert!(g_theta(&t, 1.0, 300.0, &b).unwrap() <= annulus_points(0, 300).count() as f64 + 1e-9);
        let (t, cs) = convs("sqrt:2 + i*sqrt:3", 10);
        let c = cs.last().unwrap();
        let reps = g_theta_reports(&t, c, 1e4, 1e3, &b).unwrap();
        assert!(reps[0].fitted_constant <= 10.0, "{reps:?}");
    }

    #[test]
    fn spacing_matches_pairwise_brute_force() {
        let (t, cs) = convs("sqrt:2 + i*sqrt:3", 10);
        let th = t.eval(256).unwrap();
        for c in cs.iter().filter(|c| c.q_abs() > 20.0 && c.q_abs() < 300.0) {
            for &(a1, a2) in &[(0.0, 0.0), (-3.7, 11.2), (40.5, -17.25)] {
                let rep = spacing_check(&t, c, a1, a2).unwrap();
                let s = rep.side;
                let pts: Vec<GaussianInt> = ((a1.floor() as i64 + 1)..=((a1 + s).floor() as i64))
                    .flat_map(|x| ((a2.floor() as i64 + 1)..=((a2 + s).floor() as i64)).map(move |y| GaussianInt::new(x, y)))
                    .collect();
                assert_eq!(rep.points, pts.len() as u64);
                let mut min = f64::INFINITY;
                for i in 0..pts.len() {
                    for j in 0..i {
                        min = min.min(th.mul_gaussian(pts[i] - pts[j]).dist_sup().to_f64());
                    }
                }
                assert!((rep.min_dist - min).abs() < 1e-12);
                assert!(rep.holds && min >= rep.bound);
            }
        }
    }
}
