//! Sampled records of transformed solutions.

use std::fmt::Write as _;

use schroedsym::residual::{residual_at, transform, GridSpec};
use schroedsym::solutions::{f_pair, g_functions, gaussian_free, theta1, theta_k};
use schroedsym::suite::{check_rng, family_fixture, in_domain_element, RunConfig};
use schroedsym::{re, Error, Family, FamilySpec, GroupElement, Mat2, Point, Result, SmoothFn, C64};

/// Which element to apply.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementChoice {
    Identity,
    /// Seeded in-domain sample.
    Random,
    /// `c, d, a, b, μ, ν`.
    Explicit([f64; 6]),
}

impl std::str::FromStr for ElementChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(ElementChoice::Identity),
            "random" => Ok(ElementChoice::Random),
            _ => {
                let v: Vec<f64> = s
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parameter(format!("element {s:?}: {e}")))?;
                let arr: [f64; 6] = v.try_into().map_err(|_| {
                    Error::Parameter("element needs six numbers c,d,a,b,mu,nu".into())
                })?;
                Ok(ElementChoice::Explicit(arr))
            }
        }
    }
}

/// Solution fixture by name; the theta demo uses the modular `S` matrix.
pub fn solution(name: &str, cfg: &RunConfig) -> Result<(SmoothFn, FamilySpec, GridSpec)> {
    let grid = |spec: &FamilySpec| family_fixture(spec, cfg.nt, cfg.nx).map(|(_, g)| g);
    let lin = cfg.spec(Family::Linear);
    let quad = cfg.spec(Family::Quadratic);
    Ok(match name {
        "f1" => (f_pair(&lin)?.0, lin.clone(), grid(&lin)?),
        "f2" => (
            f_pair(&lin)?.1,
            lin.clone(),
            GridSpec::new((0.5, 1.5), (-1.0, 1.0), cfg.nt, cfg.nx),
        ),
        "g1" => (g_functions(&quad, re(0.4))?.0, quad.clone(), grid(&quad)?),
        "g3" => (g_functions(&quad, re(0.4))?.2, quad.clone(), grid(&quad)?),
        "gaussian" => {
            let free = cfg.spec(Family::Free);
            (gaussian_free(free.k, 2.0)?, free.clone(), grid(&free)?)
        }
        "fixture" => {
            let family = cfg.family.unwrap_or(Family::Linear);
            let spec = cfg.spec(family);
            let (f, g) = family_fixture(&spec, cfg.nt, cfg.nx)?;
            (f, spec, g)
        }
        other => return Err(Error::Parameter(format!("unknown solution {other:?}"))),
    })
}

fn element(
    choice: &ElementChoice,
    f: &SmoothFn,
    spec: &FamilySpec,
    grid: &GridSpec,
    seed: u64,
) -> Result<GroupElement> {
    match choice {
        ElementChoice::Identity => Ok(GroupElement::identity()),
        ElementChoice::Random => {
            in_domain_element(&mut check_rng(seed, "demo-transform"), spec, f, grid)
        }
        ElementChoice::Explicit([c, d, a, b, mu, nu]) => {
            schroedsym::make_element(Mat2::real(*c, *d, *a, *b), re(*mu), re(*nu))
        }
    }
}

fn header(out: &mut String, what: &str) {
    let _ = writeln!(out, "# {what}");
    let _ = writeln!(out, "# t x re_psi im_psi residual re_ratio im_ratio");
}

fn record(out: &mut String, t: f64, x: f64, psi: C64, residual: f64, ratio: C64) {
    let _ = writeln!(
        out,
        "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
        t, x, psi.re, psi.im, residual, ratio.re, ratio.im
    );
}

/// Samples `ψ′ = K ψ(Λ·)` on the fixture grid: `(t, x₁, Re ψ′, Im ψ′,
/// |residual|, ψ′/ψ)`. Returns the records and the worst relative residual.
pub fn demo_transform(
    cfg: &RunConfig,
    choice: &ElementChoice,
    which: &str,
) -> Result<(String, f64)> {
    if which == "theta" {
        return demo_theta(cfg);
    }
    let (f, spec, grid) = solution(which, cfg)?;
    let l = element(choice, &f, &spec, &grid, cfg.seed)?;
    let g = transform(&f, &l, &spec);
    let mut out = String::new();
    header(
        &mut out,
        &format!(
            "{} under c={} d={} a={} b={} mu={} nu={}",
            f.name(),
            l.c(),
            l.d(),
            l.a(),
            l.b(),
            l.mu,
            l.nu
        ),
    );
    let mut worst = 0.0f64;
    for z in grid.points() {
        let psi = g.value(&z)?;
        let r = residual_at(&g, &spec, &z)?.norm();
        worst = worst.max(r / (psi.norm() + 1e-300));
        record(&mut out, z.t.re, z.x[0].re, psi, r, psi / f.value(&z)?);
    }
    Ok((out, worst))
}

/// Theta function under `S: t ↦ −1/t`; `t` is on the imaginary axis and
/// the first column holds `Im t`. The ratio column is the constant `ε`.
fn demo_theta(cfg: &RunConfig) -> Result<(String, f64)> {
    let theta = theta1(40)?;
    let spec = FamilySpec::free(theta_k(), 1);
    let l = GroupElement::from_matrix(Mat2::real(0.0, -1.0, 1.0, 0.0))?;
    let g = transform(&theta, &l, &spec);
    let mut out = String::new();
    header(
        &mut out,
        "theta1 under t -> -1/t, x -> x/t (first column is Im t)",
    );
    let mut worst = 0.0f64;
    let grid = GridSpec::new((0.8, 1.25), (-0.5, 0.5), cfg.nt, cfg.nx);
    for p in grid.points() {
        let z = Point::new(C64::new(0.0, p.t.re), p.x.clone());
        let psi = g.value(&z)?;
        let r = residual_at(&g, &spec, &z)?.norm();
        worst = worst.max(r / (psi.norm() + 1e-300));
        record(&mut out, p.t.re, p.x[0].re, psi, r, psi / theta.value(&z)?);
    }
    Ok((out, worst))
}
