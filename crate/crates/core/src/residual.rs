//! Residuals of `∂ₜψ = k(Δ − V)ψ`, transformed functions `Kψ(Λ·)`, and the
//! free-to-potential lift maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{act, family_map, nonsingular};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Point};
use crate::group::GroupElement;
use crate::jet::Jet;
use crate::multiplier::{family_multiplier, intertwiner_map, quadratic_parts, IntertwinerParams};
use crate::scalar::{re, Scalar, C64};
use crate::smooth::{Domain, SmoothFn};
use crate::solutions::{f_pair, phi_pair};

/// Floor added to `|ψ|` when normalizing residuals.
pub const REL_FLOOR: f64 = 1e-300;

/// `(∂ₜ − kΔ + kV)ψ` read off an order-2 jet at `z`, plus `−kλ|ψ|²ψ` for the
/// nonlinear family when `nonlinear` is set.
fn operator_on_jet(jet: &Jet, spec: &FamilySpec, z: &Point, nonlinear: bool) -> C64 {
    let n = z.dim() + 1;
    let mut alpha = vec![0u8; n];
    alpha[0] = 1;
    let dt = jet.partial(&alpha);
    alpha[0] = 0;
    let mut lap = re(0.0);
    for j in 1..n {
        alpha[j] = 2;
        lap += jet.partial(&alpha);
        alpha[j] = 0;
    }
    let psi = jet.value();
    let v = spec.potential(&z.x);
    let mut r = dt - spec.k * lap + spec.k * v * psi;
    if nonlinear && spec.family == Family::Nls2d {
        r -= spec.k * spec.nls_lambda * psi.norm_sqr() * psi;
    }
    r
}

/// `(∂ₜ − kΔ + kV)ψ` at `z` from exact partials.
pub fn residual_at(f: &SmoothFn, spec: &FamilySpec, z: &Point) -> Result<C64> {
    let jet = f.jet(z, 2)?;
    Ok(operator_on_jet(&jet, spec, z, true))
}

/// Centered second-order finite-difference residual at `z`.
pub fn residual_fd(f: &SmoothFn, spec: &FamilySpec, z: &Point, h: f64) -> Result<C64> {
    let at = |dt: f64, j: usize, dx: f64| -> Result<C64> {
        let mut p = z.clone();
        p.t += dt;
        if dx != 0.0 {
            p.x[j] += dx;
        }
        f.value(&p)
    };
    let psi = at(0.0, 0, 0.0)?;
    let dt = (at(h, 0, 0.0)? - at(-h, 0, 0.0)?) / (2.0 * h);
    let mut lap = re(0.0);
    for j in 0..z.dim() {
        lap += (at(0.0, j, h)? - 2.0 * psi + at(0.0, j, -h)?) / (h * h);
    }
    let mut r = dt - spec.k * lap + spec.k * spec.potential(&z.x) * psi;
    if spec.family == Family::Nls2d {
        r -= spec.k * spec.nls_lambda * psi.norm_sqr() * psi;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub nt: usize,
    pub nx: usize,
    pub h_fd: f64,
    /// Space point `j` is `x + x_offsets[j]`; the length sets the dimension.
    pub x_offsets: Vec<f64>,
}

impl GridSpec {
    pub fn new(t_range: (f64, f64), x_range: (f64, f64), nt: usize, nx: usize) -> Self {
        GridSpec {
            t_range,
            x_range,
            nt,
            nx,
            h_fd: 1e-2,
            x_offsets: vec![0.0],
        }
    }

    pub fn with_offsets(mut self, offsets: Vec<f64>) -> Self {
        self.x_offsets = offsets;
        self
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.h_fd = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt < 3 || self.nx < 3 {
            return Err(Error::Parameter("grid counts must be at least 3".into()));
        }
        if !(self.h_fd > 0.0) || self.x_offsets.is_empty() {
            return Err(Error::Parameter(
                "grid needs a positive step and at least one coordinate".into(),
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Point> {
        let lin = |(a, b): (f64, f64), n: usize, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
        let mut out = Vec::with_capacity(self.nt * self.nx);
        for i in 0..self.nt {
            let t = lin(self.t_range, self.nt, i);
            for j in 0..self.nx {
                let x = lin(self.x_range, self.nx, j);
                out.push(Point::real(
                    t,
                    &self.x_offsets.iter().map(|o| x + o).collect::<Vec<_>>(),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub max_rel: f64,
    pub argmax: Point,
    pub convergence_order: Option<f64>,
    pub points: usize,
    /// Grid points where the function could not be evaluated.
    pub skipped: usize,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.skipped == 0 && self.points > 0 && self.max_rel < tol
    }
}

/// Folds `(point, |r|, |ψ|)` samples into a report in grid order.
fn summarize(samples: Vec<(Point, Result<(f64, f64)>)>) -> Result<ResidualReport> {
    let mut report = ResidualReport {
        max_abs: 0.0,
        max_rel: 0.0,
        argmax: samples
            .first()
            .map(|s| s.0.clone())
            .ok_or_else(|| Error::Parameter("empty grid".into()))?,
        convergence_order: None,
        points: 0,
        skipped: 0,
    };
    let mut first_err = None;
    for (z, s) in samples {
        match s {
            Ok((abs, scale)) => {
                report.points += 1;
                let rel = abs / (scale + REL_FLOOR);
                report.max_abs = report.max_abs.max(abs);
                if rel > report.max_rel || !rel.is_finite() {
                    report.max_rel = rel;
                    report.argmax = z;
                }
            }
            Err(e) => {
                report.skipped += 1;
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) if report.points == 0 => Err(e),
        _ => Ok(report),
    }
}

fn sample_grid<F>(grid: &GridSpec, f: F) -> Result<ResidualReport>
where
    F: Fn(&Point) -> Result<(f64, f64)> + Sync,
{
    grid.validate()?;
    let samples: Vec<_> = grid
        .points()
        .into_par_iter()
        .map(|z| {
            let s = f(&z);
            (z, s)
        })
        .collect();
    summarize(samples)
}

pub fn grid_residual(
    f: &SmoothFn,
    spec: &FamilySpec,
    grid: &GridSpec,
    mode: ResidualMode,
) -> Result<ResidualReport> {
    match mode {
        ResidualMode::Analytic => sample_grid(grid, |z| {
            let jet = f.jet(z, 2)?;
            Ok((
                operator_on_jet(&jet, spec, z, true).norm(),
                jet.value().norm(),
            ))
        }),
        ResidualMode::FiniteDifference => {
            let h = grid.h_fd;
            let mut report = sample_grid(grid, |z| {
                Ok((residual_fd(f, spec, z, h)?.norm(), f.value(z)?.norm()))
            })?;
            // FD-versus-analytic gap at h and h/2
            let gap = |step: f64| -> Result<f64> {
                let r = sample_grid(grid, |z| {
                    let exact = residual_at(f, spec, z)?;
                    Ok((
                        (residual_fd(f, spec, z, step)? - exact).norm(),
                        f.value(z)?.norm(),
                    ))
                })?;
                Ok(r.max_rel)
            };
            let (coarse, fine) = (gap(h)?, gap(h / 2.0)?);
            if coarse > 0.0 && fine > 0.0 {
                report.convergence_order = Some((coarse / fine).log2());
            }
            Ok(report)
        }
    }
}

/// `ψ′(Z) = K(Z|Λ) ψ(ΛZ)` with chain-rule partials.
pub fn transform(f: &SmoothFn, l: &GroupElement, spec: &FamilySpec) -> SmoothFn {
    let (inner, dom, l1, s1) = (f.clone(), f.clone(), *l, spec.clone());
    let (l2, s2) = (*l, spec.clone());
    let domain = Domain::new(
        format!("preimage of {}", f.domain().description()),
        move |z| {
            act(&l2, z, &s2)
                .map(|zp| dom.domain().contains(&zp))
                .unwrap_or(false)
        },
    );
    SmoothFn::new(format!("U({})", f.name()), f.dim(), domain, move |t, x| {
        let (tp, xp) = family_map(&l1, &s1, t, x)?;
        Ok(family_multiplier(&l1, &s1, t, x)? * inner.eval_jets(&tp, &xp)?)
    })
}

/// Analytic residual report of the transformed function on `grid`.
pub fn verify_transformation(
    f: &SmoothFn,
    l: &GroupElement,
    spec: &FamilySpec,
    grid: &GridSpec,
) -> Result<ResidualReport> {
    grid_residual(&transform(f, l, spec), spec, grid, ResidualMode::Analytic)
}

/// `φ̇(t) = ξ(t)²` of the family's time reparametrization.
pub fn family_phidot(l: &GroupElement, spec: &FamilySpec, t: C64) -> Result<C64> {
    match spec.family {
        Family::Quadratic => Ok(quadratic_parts(l, spec, &t)?.phidot),
        _ => {
            let p = l.a() * t + l.b();
            nonsingular("at+b", p)?;
            Ok(1.0 / (p * p))
        }
    }
}

/// Checks `(∂ₜ − kΔ + kV)[Kψ(Λ·)] = φ̇ K · [(∂ₜ − kΔ + kV)ψ](ΛZ)` pointwise;
/// `f` need not be a solution. The nonlinear term is left out.
pub fn verify_intertwining(
    f: &SmoothFn,
    l: &GroupElement,
    spec: &FamilySpec,
    grid: &GridSpec,
) -> Result<ResidualReport> {
    let g = transform(f, l, spec);
    sample_grid(grid, |z| {
        let jet = g.jet(z, 2)?;
        let lhs = operator_on_jet(&jet, spec, z, false);
        let zp = act(l, z, spec)?;
        let inner = f.jet(&zp, 2)?;
        let k = family_multiplier(l, spec, &z.t, &z.x)?;
        let rhs = family_phidot(l, spec, z.t)? * k * operator_on_jet(&inner, spec, &zp, false);
        Ok(((lhs - rhs).norm(), jet.value().norm() + rhs.norm()))
    })
}

/// Free-to-potential (`F1`, `F2`, `K0`) and potential-to-free (`Phi1`,
/// `Phi2`) maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    F1,
    F2,
    Phi1,
    Phi2,
    K0,
}

impl MapKind {
    /// Whether the map's parameters come from the target family (otherwise
    /// the source family).
    pub fn parameters_from_target(self) -> bool {
        matches!(self, MapKind::F1 | MapKind::F2 | MapKind::K0)
    }
}

/// `(t′, x′, prefactor)` of a lift map on generic scalars.
fn lift_coords(
    kind: MapKind,
    spec: &FamilySpec,
    params: &IntertwinerParams,
    pre: &Option<SmoothFn>,
    t: &Jet,
    x: &Jet,
) -> Result<(Jet, Jet, Jet)> {
    let k2b = spec.k * spec.k * spec.beta;
    let prefactor = |tp: Jet, xp: Jet| -> Result<(Jet, Jet, Jet)> {
        let f = pre.as_ref().expect("prefactor present for f/phi maps");
        let v = f.eval_jets(t, std::slice::from_ref(x))?;
        Ok((tp, xp, v))
    };
    match kind {
        MapKind::F1 => prefactor(t.clone(), x.clone() - t.square() * k2b),
        MapKind::Phi1 => prefactor(t.clone(), x.clone() + t.square() * k2b),
        MapKind::F2 | MapKind::Phi2 => {
            nonsingular("t", t.value())?;
            let inv = t.recip();
            let xp = if kind == MapKind::F2 {
                x.clone() * inv.clone() - t.clone() * k2b
            } else {
                x.clone() * inv.clone() + inv.square() * k2b
            };
            prefactor(-inv, xp)
        }
        MapKind::K0 => intertwiner_map(params, spec, t, x),
    }
}

/// Builds `ψ(t, x) = P(t, x) ψ₀(t′, x′)` for the given map; `spec` is the
/// linear family for the f/φ maps and the quadratic family for `K0`.
pub fn lift(
    psi: &SmoothFn,
    kind: MapKind,
    spec: &FamilySpec,
    params: &IntertwinerParams,
) -> Result<SmoothFn> {
    if psi.dim() != 1 {
        return Err(Error::Parameter(
            "lift maps act on one-dimensional functions".into(),
        ));
    }
    let needed = if kind == MapKind::K0 {
        Family::Quadratic
    } else {
        Family::Linear
    };
    if spec.family != needed {
        return Err(Error::Parameter(format!(
            "{kind:?} map needs the {} family",
            needed.name()
        )));
    }
    let pre = match kind {
        MapKind::F1 => Some(f_pair(spec)?.0),
        MapKind::F2 => Some(f_pair(spec)?.1),
        MapKind::Phi1 => Some(phi_pair(spec)?.0),
        MapKind::Phi2 => Some(phi_pair(spec)?.1),
        MapKind::K0 => None,
    };
    let (s1, p1, pre1, inner) = (spec.clone(), *params, pre.clone(), psi.clone());
    let (s2, p2, pre2, dom) = (spec.clone(), *params, pre, psi.clone());
    let domain = Domain::new(
        format!("{kind:?} preimage of {}", psi.domain().description()),
        move |z| {
            let (t, x) = (
                Jet::seed(&[z.t], 0).remove(0),
                Jet::seed(&[z.x[0]], 0).remove(0),
            );
            if let Some(f) = &pre2 {
                if !f.domain().contains(z) {
                    return false;
                }
            }
            match lift_coords(kind, &s2, &p2, &pre2, &t, &x) {
                Ok((tp, xp, _)) => dom
                    .domain()
                    .contains(&Point::new(tp.value(), vec![xp.value()])),
                Err(_) => false,
            }
        },
    );
    Ok(SmoothFn::new(
        format!("{kind:?}[{}]", psi.name()),
        1,
        domain,
        move |t, x| {
            let (tp, xp, v) = lift_coords(kind, &s1, &p1, &pre1, t, &x[0])?;
            Ok(v * inner.eval_jets(&tp, std::slice::from_ref(&xp))?)
        },
    ))
}

/// Lifts `psi` and reports its residual against `target`.
pub fn verify_lift(
    psi: &SmoothFn,
    kind: MapKind,
    params: &IntertwinerParams,
    source: &FamilySpec,
    target: &FamilySpec,
    grid: &GridSpec,
) -> Result<ResidualReport> {
    let spec = if kind.parameters_from_target() {
        target
    } else {
        source
    };
    grid_residual(
        &lift(psi, kind, spec, params)?,
        target,
        grid,
        ResidualMode::Analytic,
    )
}

/// Largest relative deviation from constancy of `φⱼ[fⱼ[ψ₀]](t, x)/ψ₀(t, ±x)`
/// over the grid (`+x` for `j = 1`, `−x` for `j = 2`).
pub fn round_trip_constancy(
    psi0: &SmoothFn,
    second: bool,
    spec: &FamilySpec,
    grid: &GridSpec,
) -> Result<f64> {
    let params = IntertwinerParams::default();
    let (up, down) = if second {
        (MapKind::F2, MapKind::Phi2)
    } else {
        (MapKind::F1, MapKind::Phi1)
    };
    let back = lift(&lift(psi0, up, spec, &params)?, down, spec, &params)?;
    let ratios: Vec<C64> = grid
        .points()
        .iter()
        .map(|z| {
            let mirror = if second {
                Point::new(z.t, vec![-z.x[0]])
            } else {
                z.clone()
            };
            Ok(back.value(z)? / psi0.value(&mirror)?)
        })
        .collect::<Result<_>>()?;
    let r0 = ratios[0];
    Ok(ratios
        .iter()
        .map(|r| (r / r0 - 1.0).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_element, Mat2};
    use crate::smooth::ExpPoly;
    use crate::solutions::{gaussian_free, power_static};

    fn lin() -> FamilySpec {
        FamilySpec::linear(re(1.0), 0.3, 0.7)
    }

    fn elem() -> GroupElement {
        let (c, d, a) = (1.1, 0.3, 0.4);
        make_element(Mat2::real(c, d, a, (1.0 + a * d) / c), re(0.2), re(-0.5)).unwrap()
    }

    #[test]
    fn pointwise_residuals() {
        let z = Point::tx(1.0, 0.5);
        let g = gaussian_free(re(1.0), 0.0).unwrap();
        assert!(
            residual_at(&g, &FamilySpec::free(re(1.0), 1), &z)
                .unwrap()
                .norm()
                < 1e-12
        );
        let (f1, _) = f_pair(&lin()).unwrap();
        assert!(residual_at(&f1, &lin(), &z).unwrap().norm() < 1e-12);
    }

    #[test]
    fn grid_modes() {
        let (_, f2) = f_pair(&lin()).unwrap();
        let grid = GridSpec::new((0.5, 2.0), (-1.0, 1.0), 10, 20);
        let a = grid_residual(&f2, &lin(), &grid, ResidualMode::Analytic).unwrap();
        assert!(a.passes(1e-11), "{a:?}");
        let fd = grid_residual(&f2, &lin(), &grid, ResidualMode::FiniteDifference).unwrap();
        let order = fd.convergence_order.unwrap();
        assert!((1.8..=2.2).contains(&order), "order {order}");
        let zero = SmoothFn::constant(re(0.0), 1);
        assert_eq!(
            grid_residual(&zero, &lin(), &grid, ResidualMode::Analytic)
                .unwrap()
                .max_abs,
            0.0
        );
    }

    #[test]
    fn identity_transform_is_transparent() {
        let (f1, _) = f_pair(&lin()).unwrap();
        let grid = GridSpec::new((0.1, 1.0), (-1.0, 1.0), 4, 5);
        let a = grid_residual(&f1, &lin(), &grid, ResidualMode::Analytic).unwrap();
        let b = verify_transformation(&f1, &GroupElement::identity(), &lin(), &grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn transformations_preserve_solutions() {
        let grid = GridSpec::new((0.1, 1.0), (-1.0, 1.0), 5, 6);
        let (f1, _) = f_pair(&lin()).unwrap();
        assert!(verify_transformation(&f1, &elem(), &lin(), &grid)
            .unwrap()
            .passes(1e-9));
        let iq = FamilySpec::inverse_quadratic(re(1.0), 2.0, 1);
        let m = GroupElement::from_matrix(elem().m).unwrap();
        let pos = GridSpec::new((0.1, 1.0), (0.5, 2.0), 5, 6);
        let r = verify_transformation(&power_static(2.0, 2.0).unwrap(), &m, &iq, &pos).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
    }

    #[test]
    fn intertwining_on_non_solutions() {
        let grid = GridSpec::new((0.1, 1.0), (-1.0, 1.0), 5, 6);
        let e = ExpPoly::new(vec![
            crate::smooth::ExpTerm::new(re(1.0), 1, 0),
            crate::smooth::ExpTerm::new(re(1.0), 0, 1),
        ])
        .into_smooth("exp(t+x)", Domain::everywhere());
        let r = verify_intertwining(&e, &elem(), &lin(), &grid).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        let sq = SmoothFn::new("x^2", 1, Domain::everywhere(), |_, x| Ok(x[0].square()));
        let iq = FamilySpec::inverse_quadratic(re(1.0), 0.0, 1);
        let m = GroupElement::from_matrix(elem().m).unwrap();
        assert!(verify_intertwining(&sq, &m, &iq, &grid)
            .unwrap()
            .passes(1e-9));
    }

    #[test]
    fn lifts_and_round_trips() {
        let g = gaussian_free(re(1.0), 2.0).unwrap();
        let free = FamilySpec::free(re(1.0), 1);
        let p = IntertwinerParams::default();
        let grid = GridSpec::new((0.2, 1.0), (-1.0, 1.0), 5, 6);
        assert!(verify_lift(&g, MapKind::F1, &p, &free, &lin(), &grid)
            .unwrap()
            .passes(1e-9));
        let one = SmoothFn::constant(re(1.0), 1);
        assert!(verify_lift(&one, MapKind::F2, &p, &free, &lin(), &grid)
            .unwrap()
            .passes(1e-9));
        let quad = FamilySpec::quadratic(re(1.0), 0.3, re(0.8));
        let r = verify_lift(&g, MapKind::K0, &p, &free, &quad, &grid).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        assert!(round_trip_constancy(&g, false, &lin(), &grid).unwrap() < 1e-12);
        let neg = GridSpec::new((-1.0, -0.2), (-1.0, 1.0), 5, 6);
        assert!(round_trip_constancy(&g, true, &lin(), &neg).unwrap() < 1e-9);
        let (f1, _) = f_pair(&lin()).unwrap();
        assert!(verify_lift(&f1, MapKind::Phi1, &p, &lin(), &free, &grid)
            .unwrap()
            .passes(1e-9));
    }
}
