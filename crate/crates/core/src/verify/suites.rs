use super::{worst, Claim, ClaimReport, Suite, SuiteConfig, TolKind, Value};
use crate::curvature::{
    acs_invariance_residual, action_matrix, conformal_difference_tensor, constant_curvature, four_i_component,
    integrability_residual, random_algebraic_curvature, spectrum_distance, weyl_tensor, TorsionOperator,
};
use crate::error::{Error, Result};
use crate::lie::{
    fiber_metric_index, killing_closed_form, killing_via_ad, random_so, OrthogonalComplexStructure, RANDOM_SCALE,
};
use crate::linalg::{complete_orthonormal_basis, eigen_spectrum_real, DiagonalMetric, EigenOptions, Vector};
use crate::octonion::{
    j6_invariant_residuals, nearly_kahler_polarized, nearly_kahler_residual, tangent_inertia, CrossProductAlgebra,
    DoublingRule, OctonionStructure, SplitQuaternion,
};
use crate::rng::GaussianStream;
use crate::sphere::{
    d_omega_curvature_trace, d_omega_fd, d_omega_nabla_j, fd_curvature, fit_coefficient, nijenhuis, EmbeddedSpace,
    JSection, PseudoSphere,
};
use crate::twistor::{
    ambient_metric, d_omega_closed_form, d_omega_cyclic, d_varpi, d_varpi_type, g_t, horizontal_lift, nominal_t,
    random_sphere_isometry, sigma_cauchy_riemann_residual, solve_t_star, TwistorPoint,
};

use TolKind::{Exact, Fd, Fixed};

type Extra = Vec<(String, Value)>;
type Admits = Box<dyn Fn(usize, usize) -> bool>;

fn kv(k: &str, v: impl Into<Value>) -> (String, Value) {
    (k.to_string(), v.into())
}

/// A suite with the signatures it will run.
pub(crate) struct Plan {
    suite: Suite,
    sigs: Vec<(usize, usize)>,
}

fn all_n(ns: &[usize], max_q: usize) -> Vec<(usize, usize)> {
    ns.iter()
        .flat_map(|&n| (0..=n.min(max_q)).rev().map(move |q| (n - q, q)))
        .collect()
}

pub(crate) fn plan(suite: Suite, cfg: &SuiteConfig) -> Result<Plan> {
    let n_at_least = |k: usize| move |p: usize, q: usize| p + q >= k;
    let (default, ok): (Vec<(usize, usize)>, Admits) = match suite {
        // (k, l) for so(k, l); an explicit (p, q) selects so(2p, 2q)
        Suite::Killing => (vec![(2, 1), (3, 1), (2, 2), (4, 0)], Box::new(|_, _| true)),
        Suite::Index => (all_n(&[2, 3, 4], 4), Box::new(n_at_least(2))),
        Suite::Metric14 => (vec![(1, 0), (1, 1), (2, 0), (2, 1)], Box::new(|_, _| true)),
        Suite::Spectrum => (all_n(&[2, 3], 3), Box::new(|p, q| (2..=4).contains(&(p + q)))),
        Suite::Integrability | Suite::Weyl => (all_n(&[2, 3], 2), Box::new(n_at_least(2))),
        Suite::Conformal => (vec![(2, 0), (1, 1), (2, 1), (1, 2)], Box::new(|_, _| true)),
        Suite::SphereCurvature => (vec![(1, 0), (2, 0), (3, 0), (1, 1), (1, 2)], Box::new(|_, _| true)),
        Suite::DomegaThreeway => (vec![(1, 1), (3, 0)], Box::new(|p, q| p + q >= 2 && p + q <= 3)),
        Suite::DomegaBundle => (vec![(1, 0), (1, 1), (2, 0), (2, 1)], Box::new(|_, _| true)),
        Suite::Tstar | Suite::DvarpiType => (vec![(2, 0), (1, 1), (2, 1)], Box::new(n_at_least(2))),
        Suite::SigmaHolo => (vec![(1, 0), (1, 1), (2, 0), (2, 1)], Box::new(|_, _| true)),
        // S⁶₄ ⊂ R^{3,4} and the round S⁶ ⊂ R⁷
        Suite::S64NearlyKahler => (vec![(1, 2), (3, 0)], Box::new(|p, q| matches!((p, q), (1, 2) | (3, 0)))),
        Suite::All => unreachable!("expanded by run_suite"),
    };
    let sigs = match cfg.signature {
        None => default,
        Some((p, q)) if ok(p, q) => match suite {
            Suite::Killing => vec![(2 * p, 2 * q)],
            _ => vec![(p, q)],
        },
        Some((p, q)) => {
            return Err(Error::UnsupportedDimension(format!(
                "suite {suite} does not support (p,q) = ({p},{q})"
            )));
        }
    };
    Ok(Plan { suite, sigs })
}

impl Plan {
    pub fn run(&self, cfg: &SuiteConfig) -> Vec<ClaimReport> {
        let f: fn(&SuiteConfig, usize, usize) -> Vec<ClaimReport> = match self.suite {
            Suite::Killing => killing,
            Suite::Index => index,
            Suite::Metric14 => metric14,
            Suite::Spectrum => spectrum,
            Suite::Integrability => integrability,
            Suite::Weyl => weyl,
            Suite::Conformal => conformal,
            Suite::SphereCurvature => sphere_curvature,
            Suite::DomegaThreeway => domega_threeway,
            Suite::DomegaBundle => domega_bundle,
            Suite::Tstar => tstar,
            Suite::DvarpiType => dvarpi_type,
            Suite::SigmaHolo => sigma_holo,
            Suite::S64NearlyKahler => s64,
            Suite::All => unreachable!(),
        };
        self.sigs.iter().flat_map(|&(p, q)| f(cfg, p, q)).collect()
    }
}

fn metric(p: usize, q: usize) -> DiagonalMetric {
    DiagonalMetric::from_counts(2 * p, 2 * q)
}

fn killing(cfg: &SuiteConfig, k: usize, l: usize) -> Vec<ClaimReport> {
    let g = DiagonalMetric::from_counts(k, l);
    let claim = Claim::new("killing", "Killing form of so(k,l) equals (k+l-2)Tr(AB)", Exact, 1e-9)
        .param("k", k)
        .param("l", l);
    let r = claim.trials(cfg, cfg.trials, |_, rng| {
        let a = random_so(&g, rng, RANDOM_SCALE);
        let b = random_so(&g, rng, RANDOM_SCALE);
        Ok((killing_via_ad(&g, &a, &b) - killing_closed_form(k, l, &a, &b)).abs())
    });
    vec![claim.judged(cfg, cfg.trials, r.map(worst), vec![])]
}

fn index(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let claim = Claim::new("index", "index of the fiber metric on m_J is q^2-q+2pq", Fixed, 0.0).pq(p, q);
    let mut extra = Extra::new();
    let r = fiber_metric_index(p, q).map(|c| {
        extra = vec![
            kv("computed", c.computed),
            kv("formula", c.formula),
            kv("two_pq", 2 * p * q),
            kv("dim", c.dim),
        ];
        (c.computed as f64 - c.formula as f64).abs()
    });
    vec![claim.judged(cfg, 1, r, extra)]
}

fn metric14(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let n = p + q;
    let t = if n > 1 { nominal_t(n) } else { f64::INFINITY };
    let identity = Claim::new(
        "metric14.identity",
        "ambient metric -2n Tr(AB) splits as 8n<A1,B1> + t(-(2n-2))Tr(A'B') at t = n/(n-1)",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let r = identity.trials(cfg, cfg.trials, |_, rng| {
        let pt = TwistorPoint::random(p, q, rng);
        let space = pt.tangent_space()?;
        let a = space.random_element(rng);
        let b = space.random_element(rng);
        Ok((ambient_metric(&pt, &a, &b) - g_t(&pt, &a, &b, t)).abs())
    });
    let first = identity.judged(cfg, cfg.trials, r.map(worst), vec![]);

    let basis = Claim::new(
        "metric14.basis",
        "horizontal lifts of an orthonormal basis satisfy <A_i,A_j> = 8n e_i d_ij",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let r = basis.trials(cfg, cfg.trials, |_, rng| {
        let pt = TwistorPoint::random(p, q, rng);
        let g = pt.metric();
        let (frame, signs) = complete_orthonormal_basis(g, &[pt.one(), pt.base_point()], 1e-9)?;
        let lifts = frame[2..]
            .iter()
            .map(|e| horizontal_lift(&pt, e).map(|h| h.matrix().clone()))
            .collect::<Result<Vec<_>>>()?;
        let mut out = 0.0f64;
        for (i, hi) in lifts.iter().enumerate() {
            for (j, hj) in lifts.iter().enumerate() {
                let expect = if i == j { 8.0 * n as f64 * signs[i + 2] } else { 0.0 };
                out = out.max((ambient_metric(&pt, hi, hj) - expect).abs());
            }
        }
        Ok(out)
    });
    vec![first, basis.judged(cfg, cfg.trials, r.map(worst), vec![])]
}

fn spectrum(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let claim = Claim::new(
        "spectrum",
        "J-action on curvature-type tensors has eigenvalues in {0, +-2i, +-4i}",
        Exact,
        1e-7,
    )
    .pq(p, q);
    let trials = spectrum_trials(cfg, p + q);
    let r = claim.trials(cfg, trials, |_, rng| {
        let j = OrthogonalComplexStructure::random(p, q, rng);
        let a = action_matrix(&j);
        let opts = EigenOptions {
            max_dim: a.nrows(),
            ..EigenOptions::default()
        };
        eigen_spectrum_real(&a, &opts)
    });
    let mut extra = Extra::new();
    let r = r.map(|all| {
        if let Some(ev) = all.first() {
            for (label, k) in [("mult_0", 0.0), ("mult_2i", 2.0), ("mult_4i", 4.0)] {
                let m = ev
                    .iter()
                    .filter(|z| (z.im.abs() - k).abs() < 1e-3 && z.re.abs() < 1e-3)
                    .count();
                extra.push(kv(label, m));
            }
            extra.push(kv("dim", ev.len()));
        }
        worst(all.iter().flatten().map(|z| spectrum_distance(*z)))
    });
    vec![claim.judged(cfg, trials, r, extra)]
}

/// The action matrix grows like `n⁴`; beyond `2n = 6` one spectrum costs
/// seconds, so the eight-dimensional case samples fewer structures.
fn spectrum_trials(cfg: &SuiteConfig, n: usize) -> usize {
    if n >= 4 {
        cfg.trials.div_ceil(20)
    } else {
        cfg.trials
    }
}

fn integrability(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let g = metric(p, q);
    let r0 = constant_curvature(&g);
    let zero = TorsionOperator::zero(g.dim());

    let four = Claim::new(
        "integrability.four_i",
        "constant curvature has no 4i-component",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let r = four.trials(cfg, cfg.trials, |_, rng| {
        let j = OrthogonalComplexStructure::random(p, q, rng);
        Ok(four_i_component(&j, &r0).max_abs())
    });
    let a = four.judged(cfg, cfg.trials, r.map(worst), vec![]);

    let cond = Claim::new(
        "integrability.condition",
        "integrability: j+T(j-X,j-Y) = 0 and j+R(j-X,j-Y)j- = 0 for constant curvature",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let r = cond.trials(cfg, cfg.trials, |_, rng| {
        let j = OrthogonalComplexStructure::random(p, q, rng);
        let (tor, cur) = integrability_residual(&j, &r0, &zero);
        Ok(tor.max(cur))
    });
    let b = cond.judged(cfg, cfg.trials, r.map(worst), vec![]);

    let generic = Claim::new(
        "integrability.generic",
        "a generic algebraic curvature has a 4i-component",
        Fixed,
        0.0,
    )
    .pq(p, q);
    let r = generic.trials(cfg, cfg.trials, |_, rng| {
        let j = OrthogonalComplexStructure::random(p, q, rng);
        let r = random_algebraic_curvature(&g, rng, 3);
        Ok(four_i_component(&j, &r).max_abs())
    });
    let c = generic.at_least(
        cfg,
        cfg.trials,
        r.map(|v| v.into_iter().fold(f64::INFINITY, f64::min)),
        1e-3,
        vec![],
    );
    vec![a, b, c]
}

fn weyl(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let g = metric(p, q);
    let claim = Claim::new(
        "weyl",
        "the Weyl tensor of a constant-curvature operator vanishes",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let r = weyl_tensor(&constant_curvature(&g)).map(|w| w.max_abs());
    vec![claim.judged(cfg, 1, r, vec![])]
}

fn conformal(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let g = metric(p, q);
    let claim = Claim::new(
        "conformal",
        "conformal difference tensor satisfies j+A_{j-Y}j- = 0",
        Exact,
        1e-12,
    )
    .pq(p, q);
    let r = claim.trials(cfg, cfg.trials, |_, rng| {
        let j = OrthogonalComplexStructure::random(p, q, rng);
        let df = rng.vector(g.dim());
        let a = conformal_difference_tensor(&g, &df, &g.lower(&df))?;
        Ok(acs_invariance_residual(&j, &a))
    });
    vec![claim.judged(cfg, cfg.trials, r.map(worst), vec![])]
}

fn sphere_curvature(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let s = PseudoSphere::with_signature(p, q);
    let g = s.ambient().clone();
    let h = cfg.fd_step;
    let fd = Claim::new(
        "sphere_curvature",
        "pseudo-sphere curvature R(X,Y)Z = <Y,Z>X - <X,Z>Y",
        Fd,
        5e-4,
    )
    .pq(p, q)
    .param("h", h);
    let r = fd.trials(cfg, cfg.trials, |_, rng| {
        let x = s.random_point(rng);
        // R is trilinear, so unit inputs lose no generality
        let [a, b, c] = [0, 1, 2].map(|_| {
            let v = s.random_tangent(&x, rng);
            &v / v.amax()
        });
        let exact = &a * g.ip(&b, &c) - &b * g.ip(&a, &c);
        let coarse = (fd_curvature(&s, &x, &a, &b, &c, h)? - &exact).amax();
        let fine = (fd_curvature(&s, &x, &a, &b, &c, h / 2.0)? - &exact).amax();
        Ok((coarse, fine))
    });
    let (coarse, fine): (Result<f64>, Result<(f64, f64, f64)>) = match r {
        Ok(v) => {
            let c = worst(v.iter().map(|x| x.0));
            let f = worst(v.iter().map(|x| x.1));
            let min_ratio = v.iter().map(|x| x.0 / x.1).fold(f64::INFINITY, f64::min);
            (Ok(c), Ok((c, f, min_ratio)))
        }
        Err(e) => (Err(e.clone()), Err(e)),
    };
    let mut extra = Extra::new();
    if let Ok((_, f, _)) = &fine {
        extra.push(kv("max_residual_half_step", *f));
    }
    let a = fd.judged(cfg, cfg.trials, coarse, extra);

    let conv = Claim::new(
        "sphere_curvature.convergence",
        "second-order convergence of the curvature stencil",
        Fixed,
        0.0,
    )
    .pq(p, q)
    .param("h", h);
    let mut extra = Extra::new();
    let ratio = fine.map(|(c, f, min_ratio)| {
        extra.push(kv("min_trial_ratio", min_ratio));
        c / f
    });
    let b = conv.at_least(cfg, cfg.trials, ratio, 3.5, extra);
    vec![a, b]
}

const SECTION_TWIST: f64 = 0.3;
const SECTION_SPREAD: f64 = 0.3;
const C_STAR_BLOCKS: usize = 5;

fn domega_threeway(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let s = PseudoSphere::with_signature(p, q);
    let h = cfg.fd_step;
    let fd = Claim::new(
        "domega_threeway",
        "d(omega) by finite differences equals the cyclic sum of g((nabla_Z J)X, Y)",
        Fd,
        5e-4,
    )
    .pq(p, q)
    .param("h", h);
    // (d_omega_fd, d_omega_nabla_j, d_omega_curvature_trace at c = 1)
    let r = fd.trials(cfg, cfg.trials, |_, rng| {
        let sec = JSection::random(s.clone(), rng, SECTION_TWIST)?;
        let x = s.random_point_near(sec.base_point(), rng, SECTION_SPREAD)?;
        let [a, b, c] = [0, 1, 2].map(|_| s.random_tangent(&x, rng));
        Ok((
            d_omega_fd(&s, &sec, &x, &a, &b, &c, h)?,
            d_omega_nabla_j(&s, &sec, &x, &a, &b, &c, h)?,
            d_omega_curvature_trace(&s, &sec, &x, &a, &b, &c, h, 1.0)?,
        ))
    });
    let size = r
        .as_ref()
        .map(|v| vec![kv("max_abs_domega", worst(v.iter().map(|t| t.0.abs())))])
        .unwrap_or_default();
    let first = fd.judged(
        cfg,
        cfg.trials,
        r.as_ref()
            .map(|v| worst(v.iter().map(|t| (t.0 - t.1).abs())))
            .map_err(Clone::clone),
        size,
    );

    let fit = Claim::new(
        "domega_threeway.c_star",
        "coefficient c in d(omega) = c * sum Tr(R_{X,Y} nabla_Z J), nominal value 1/8",
        Fixed,
        0.0,
    )
    .pq(p, q)
    .param("h", h);
    let stab = Claim::new(
        "domega_threeway.c_star_stability",
        "fitted c is seed-stable (coefficient of variation)",
        Fixed,
        0.01,
    )
    .pq(p, q)
    .param("h", h);
    let fitted = r.and_then(|v| {
        let pairs: Vec<(f64, f64)> = v.iter().map(|t| (t.2, t.1)).collect();
        let c = fit_coefficient(&pairs)?;
        let blocks = (0..C_STAR_BLOCKS)
            .map(|k| fit_coefficient(&pairs.iter().skip(k).step_by(C_STAR_BLOCKS).copied().collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let mean = blocks.iter().sum::<f64>() / blocks.len() as f64;
        let var = blocks.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (blocks.len() as f64 - 1.0).max(1.0);
        let cv = var.sqrt() / mean.abs();
        let at = |k: f64| worst(pairs.iter().map(|(a, b)| (k * a - b).abs()));
        Ok((c, cv, at(c), at(0.125), at(0.5)))
    });
    let extra = fitted
        .as_ref()
        .map(|&(c, cv, _, at_nominal, at_half)| {
            vec![
                kv("c_star", c),
                kv("nominal_c", 0.125),
                kv("residual_at_nominal_c", at_nominal),
                kv("residual_at_one_half", at_half),
                kv("block_cv", cv),
            ]
        })
        .unwrap_or_default();
    let second = fit.info(cfg.trials, fitted.as_ref().map(|t| t.2).map_err(Clone::clone), extra);
    let third = stab.judged(cfg, cfg.trials, fitted.map(|t| t.1), vec![kv("blocks", C_STAR_BLOCKS)]);
    vec![first, second, third]
}

fn bundle_t(n: usize) -> f64 {
    if n > 1 {
        nominal_t(n)
    } else {
        1.0
    }
}

fn domega_bundle(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let t = bundle_t(p + q);
    let claim = Claim::new(
        "domega_bundle.hhv",
        "d(Omega)(H_X,H_Y,A') by torsion equals the closed form -16n<JA'X,Y> - t(2n-2)Tr(J(R_XY)'A')",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let r = claim.trials(cfg, cfg.trials, |_, rng| {
        let pt = TwistorPoint::random(p, q, rng);
        let x = pt.random_horizontal_vector(rng);
        let y = pt.random_horizontal_vector(rng);
        let z = pt.random_horizontal_vector(rng);
        let [hx, hy, hz] = [&x, &y, &z].map(|v| horizontal_lift(&pt, v).map(|h| h.matrix().clone()));
        let (hx, hy, hz) = (hx?, hy?, hz?);
        let [a, b, c] = [0, 1, 2].map(|_| pt.random_vertical(rng));
        let (a, b, c) = (a?, b?, c?);
        let hhv = (d_omega_cyclic(&pt, &hx, &hy, &a, t) - d_omega_closed_form(&pt, &x, &y, &a, t)).abs();
        let others = [
            d_omega_cyclic(&pt, &hx, &hy, &hz, t),
            d_omega_cyclic(&pt, &hx, &a, &b, t),
            d_omega_cyclic(&pt, &a, &b, &c, t),
        ];
        Ok((hhv, worst(others.map(f64::abs))))
    });
    let hhv = claim.judged(
        cfg,
        cfg.trials,
        r.as_ref().map(|v| worst(v.iter().map(|x| x.0))).map_err(Clone::clone),
        vec![kv("t", t)],
    );
    let other = Claim::new(
        "domega_bundle.other_patterns",
        "d(Omega) vanishes on (H,H,H), (H,V,V) and (V,V,V)",
        Exact,
        1e-9,
    )
    .pq(p, q);
    let other = other.judged(
        cfg,
        cfg.trials,
        r.map(|v| worst(v.iter().map(|x| x.1))),
        vec![kv("t", t)],
    );
    vec![hhv, other]
}

fn tstar(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let n = (p + q) as f64;
    let claim = Claim::new(
        "tstar",
        "t making the twistor metric's Kahler form closed, nominal value n/(n-1)",
        Fixed,
        0.0,
    )
    .pq(p, q);
    let mut rng = claim.rng(cfg);
    let r = solve_t_star(p, q, &mut rng, cfg.trials);
    let extra = r
        .as_ref()
        .map(|s| {
            vec![
                kv("t_star", s.t_star),
                kv("n_over_nm1", n / (n - 1.0)),
                kv("four_n_over_nm1", 4.0 * n / (n - 1.0)),
                kv("residual_at_n_over_nm1", s.residual_at_nominal_t),
                kv("residual_at_4n_over_nm1", s.residual_at_alt_t),
                kv("scale", s.scale),
            ]
        })
        .unwrap_or_default();
    let info = claim.info(
        cfg.trials,
        r.as_ref().map(|s| s.residual_at_t_star).map_err(Clone::clone),
        extra,
    );
    let solve = Claim::new(
        "tstar.solve",
        "d(Omega) vanishes identically at the fitted t",
        Exact,
        1e-8,
    )
    .pq(p, q);
    let solve = solve.judged(cfg, cfg.trials, r.map(|s| s.residual_at_t_star), vec![]);
    vec![info, solve]
}

fn dvarpi_type(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let claim = Claim::new("dvarpi_type.pure", "d(varpi) has no (3,0)+(0,3) part", Exact, 1e-9).pq(p, q);
    let r = claim.trials(cfg, cfg.trials, |_, rng| {
        let pt = TwistorPoint::random(p, q, rng);
        let norms = d_varpi_type(&pt, rng, 1)?;
        let x = pt.random_horizontal_vector(rng);
        let y = pt.random_horizontal_vector(rng);
        let a = pt.random_vertical(rng)?;
        let hx = horizontal_lift(&pt, &x)?.matrix().clone();
        let hy = horizontal_lift(&pt, &y)?.matrix().clone();
        let expect = -2.0 * pt.metric().ip(&(pt.matrix() * &a * &x), &y);
        Ok((norms.pure, norms.mixed, (d_varpi(&pt, &hx, &hy, &a) - expect).abs()))
    });
    let pure = claim.judged(
        cfg,
        cfg.trials,
        r.as_ref().map(|v| worst(v.iter().map(|x| x.0))).map_err(Clone::clone),
        vec![],
    );
    let mixed = Claim::new(
        "dvarpi_type.mixed",
        "d(varpi) has a nonzero (2,1)+(1,2) part",
        Fixed,
        0.0,
    )
    .pq(p, q);
    let min_mixed = r
        .as_ref()
        .map(|v| v.iter().map(|x| x.1).fold(f64::INFINITY, f64::min))
        .map_err(Clone::clone);
    let mixed = mixed.at_least(cfg, cfg.trials, min_mixed, 1e-3, vec![]);
    let ident = Claim::new("dvarpi_type.identity", "d(varpi)(H_X,H_Y,A') = -2<JA'X,Y>", Exact, 1e-9).pq(p, q);
    let ident = ident.judged(cfg, cfg.trials, r.map(|v| worst(v.iter().map(|x| x.2))), vec![]);
    vec![pure, mixed, ident]
}

const ISOMETRY_SCALE: f64 = 0.4;

fn sigma_holo(cfg: &SuiteConfig, p: usize, q: usize) -> Vec<ClaimReport> {
    let claim = Claim::new(
        "sigma_holo",
        "isometries act holomorphically on the twistor space",
        Exact,
        1e-12,
    )
    .pq(p, q);
    let r = claim.trials(cfg, cfg.trials, |_, rng| {
        let pt = TwistorPoint::random(p, q, rng);
        let b = random_sphere_isometry(pt.metric(), rng, ISOMETRY_SCALE);
        sigma_cauchy_riemann_residual(&b, &pt, rng, 1)
    });
    vec![claim.judged(cfg, cfg.trials, r.map(worst), vec![])]
}

/// A tangent vector at `x` whose square has the requested sign, by
/// rejection; definite spheres only have space-like directions.
fn causal_tangent(s: &PseudoSphere, x: &Vector, rng: &mut GaussianStream, timelike: bool) -> Vector {
    let g = s.ambient();
    let timelike = timelike && g.minus_count() > 0;
    loop {
        let u = s.random_tangent(x, rng);
        let n = g.ip(&u, &u);
        if (n < 0.0) == timelike && n.abs() > 1e-3 {
            return u;
        }
    }
}

fn s64(cfg: &SuiteConfig, _p: usize, q: usize) -> Vec<ClaimReport> {
    let alg = if q == 0 {
        CrossProductAlgebra::Definite
    } else {
        CrossProductAlgebra::Split
    };
    let s = alg.sphere();
    let h = cfg.fd_step;
    let label = if q == 0 { "S6" } else { "S6_4" };
    let mut out = Vec::new();

    let quat = Claim::new(
        "s64.quaternion_norm",
        "split-quaternion norm is multiplicative",
        Exact,
        1e-10,
    )
    .param("sphere", label);
    let r = quat.trials(cfg, cfg.trials.max(1000), |_, rng| {
        let [a, b] = [0, 1].map(|_| SplitQuaternion::new(rng.normal(), [rng.normal(), rng.normal(), rng.normal()]));
        let lhs = alg.quat_norm(&alg.quat_mul(&a, &b));
        let rhs = alg.quat_norm(&a) * alg.quat_norm(&b);
        Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
    });
    out.push(quat.judged(cfg, cfg.trials.max(1000), r.map(worst), vec![]));

    for (id, anchor, rule) in [
        ("s64.j6", "J_x(u) = x cross u is an orthogonal almost complex structure", DoublingRule::CayleyDickson),
        (
            "s64.j6_swapped_doubling",
            "J_x(u) = x cross u with the doubled product (a x b - alpha x beta, alpha beta-bar - beta alpha-bar), conjugates swapped",
            DoublingRule::SwappedConjugates,
        ),
    ] {
        let claim = Claim::new(id, anchor, Exact, 1e-10).param("sphere", label);
        let r = claim.trials(cfg, cfg.trials, |t, rng| {
            let x = s.random_point(rng);
            let u = causal_tangent(&s, &x, rng, t % 2 == 0);
            let v = s.random_tangent(&x, rng);
            let (sq, iso, orth) = j6_invariant_residuals(alg, rule, &x, &u, &v)?;
            Ok(sq.max(iso).max(orth))
        });
        out.push(claim.judged(cfg, cfg.trials, r.map(worst), vec![]));
    }

    let sig = Claim::new(
        "s64.tangent_signature",
        "the six-sphere in R^{3,4} has signature (2,4)",
        Fixed,
        0.0,
    )
    .param("sphere", label);
    let expect = if q == 0 { (6, 0) } else { (2, 4) };
    let r = sig.trials(cfg, cfg.trials, |_, rng| {
        let i = tangent_inertia(alg, &s.random_point(rng))?;
        Ok((i.plus.abs_diff(expect.0) + i.minus.abs_diff(expect.1)) as f64)
    });
    out.push(sig.judged(
        cfg,
        cfg.trials,
        r.map(worst),
        vec![kv("plus", expect.0), kv("minus", expect.1)],
    ));

    let nk = Claim::new(
        "s64.nearly_kahler",
        "(nabla_u J)u = 0: the structure is nearly Kahler",
        Fd,
        5e-4,
    )
    .param("sphere", label)
    .param("h", h);
    let r = nk.trials(cfg, cfg.trials, |t, rng| {
        let x = s.random_point(rng);
        let u = causal_tangent(&s, &x, rng, t % 2 == 0);
        let v = s.random_tangent(&x, rng);
        let norm = s.ambient().ip(&u, &u);
        let nu = nearly_kahler_residual(alg, &x, &u, h)?;
        let pol = nearly_kahler_polarized(alg, &x, &u, &v, h)?;
        let n = nijenhuis(&s, &OctonionStructure::new(alg), &x, &u, &v, h)?.amax();
        Ok((nu, pol, n, norm < 0.0))
    });
    let (nk_r, pol_r, nij_r) = match &r {
        Ok(v) => (
            Ok(worst(v.iter().map(|x| x.0))),
            Ok(worst(v.iter().map(|x| x.1))),
            Ok(v.iter()
                .enumerate()
                .map(|(i, x)| (x.2, i))
                .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })),
        ),
        Err(e) => (Err(e.clone()), Err(e.clone()), Err(e.clone())),
    };
    let counts = r
        .as_ref()
        .map(|v| {
            let tl = v.iter().filter(|x| x.3).count();
            vec![kv("timelike_u", tl), kv("spacelike_u", v.len() - tl)]
        })
        .unwrap_or_default();
    out.push(nk.judged(cfg, cfg.trials, nk_r, counts));
    let pol = Claim::new("s64.polarized", "(nabla_u J)v + (nabla_v J)u = 0", Fd, 5e-4)
        .param("sphere", label)
        .param("h", h);
    out.push(pol.judged(cfg, cfg.trials, pol_r, vec![]));
    let nij = Claim::new(
        "s64.nijenhuis",
        "the structure is not integrable: N(u,v) != 0 at a recorded sample",
        Fixed,
        0.0,
    )
    .param("sphere", label)
    .param("h", h);
    let extra = nij_r.as_ref().map(|&(_, i)| vec![kv("trial", i)]).unwrap_or_default();
    out.push(nij.at_least(cfg, cfg.trials, nij_r.map(|x| x.0), 0.05, extra));
    out
}
