//! Thom maps between the disk/sphere bundle pair and the base: `ν`, its
//! inverses in even and odd rank, the compact-support map `μ`, the
//! compactly supported Thom form and the Chern–Gauss–Bonnet defect.
//!
//! Total-space forms use coordinates `(v, b)`. Fiber integrals follow the
//! fiber-first convention of [`crate::geometry::fiber_integrate`].

use crate::bundles::{disk_bundle, odd_rank_triple, section_transgression, sphere_bundle_pieces, TrivializedBundle};
use crate::chern_weil::{
    pf_form, secondary_transgression_with_order, transgression_with_order, Connection, SimplexConnectionFamily,
};
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, Local, SmoothMap};
use crate::geometry::{fiber_integrate, integrate, ChartDomain, Face, FiberBundleDomain, Pushforward};
use crate::jet::Jet;
use crate::relative::{lefschetz_i, pair_d, restrict, FormPair, ZeroCount};
use crate::tolerances;
use std::f64::consts::FRAC_PI_2;

/// Shape of the cutoff `f` in `ρ(r) = f(2 − r) / (f(2 − r) + f(r − 1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpKind {
    /// `f(x) = e^{−1/x}`.
    Exponential,
    /// `f(x) = e^{−1/x²}`.
    Gaussian,
}

/// Smooth `ρ: [0, ∞) → [0, 1]`, `ρ = 1` on `[0, 1]`, `ρ = 0` on `[2, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BumpProfile {
    pub kind: BumpKind,
}

impl BumpProfile {
    pub fn standard() -> BumpProfile {
        BumpProfile {
            kind: BumpKind::Exponential,
        }
    }

    pub fn alternate() -> BumpProfile {
        BumpProfile {
            kind: BumpKind::Gaussian,
        }
    }

    fn f(&self, x: &Jet) -> Jet {
        if x.value() <= 0.0 {
            return x.zero_like();
        }
        match self.kind {
            BumpKind::Exponential => (-x.recip()).exp(),
            BumpKind::Gaussian => (-(x * x).recip()).exp(),
        }
    }

    /// `ρ(r)` for a radius jet `r`.
    pub fn eval(&self, r: &Jet) -> Jet {
        let v = r.value();
        if v <= 1.0 {
            r.cst(1.0)
        } else if v >= 2.0 {
            r.zero_like()
        } else {
            let a = self.f(&(2.0 - r));
            let b = self.f(&(r - 1.0));
            &a * &(&a + &b).recip()
        }
    }

    /// `ρ(|v|)` from the jet of `|v|²`; constant on the unit ball.
    pub fn of_squared(&self, r2: &Jet) -> Jet {
        if r2.value() <= 1.0 {
            r2.cst(1.0)
        } else {
            self.eval(&r2.sqrt())
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(&Jet::constant(1, 0, r)).value()
    }

    /// Samples the defining properties; any violation is a `Bump` error.
    pub fn check(&self) -> Result<()> {
        for i in 0..=400 {
            let r = 3.0 * i as f64 / 400.0;
            let j = self.eval(&Jet::variable(1, 1, 0, r));
            let (v, dv) = (j.value(), j.coeff(&[1]));
            let bad = !(0.0..=1.0).contains(&v)
                || (r <= 1.0 && v != 1.0)
                || (r >= 2.0 && v != 0.0)
                || (r < 0.5 && dv != 0.0)
                || dv > 1e-12;
            if bad || !v.is_finite() {
                return Err(Error::Bump(format!("ρ({r}) = {v}, ρ'({r}) = {dv}")));
            }
        }
        Ok(())
    }
}

fn squared_norm(x: &[Jet]) -> Jet {
    x.iter().fold(x[0].zero_like(), |a, c| a + c * c)
}

/// Tautological section `s^τ(v, b) = v` on the total space.
fn tautological(m: usize) -> impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + Clone + 'static {
    move |x: &[Jet]| x[..m].to_vec()
}

/// Points `(v, b)` with `|v| = 1` used to validate the tautological splitting.
fn unit_points(m: usize, base_dim: usize) -> Vec<Vec<f64>> {
    (0..4)
        .map(|j| {
            let a = 0.3 + 1.1 * j as f64;
            let mut p = vec![0.0; m + base_dim];
            if m == 1 {
                p[0] = if j % 2 == 0 { 1.0 } else { -1.0 };
            } else {
                p[0] = a.cos();
                p[1] = a.sin();
            }
            for (i, x) in p.iter_mut().enumerate().skip(m) {
                *x = 0.2 + 0.05 * i as f64;
            }
            p
        })
        .collect()
}

/// `ν(ω, γ) = ∫_{DE/B} ω + ∫_{SE/B} γ`.
pub fn nu(p: &FormPair, de: &FiberBundleDomain) -> Result<Pushforward> {
    let m = de.fiber.dim;
    let k = p.degree();
    if k < m {
        return Ok(Pushforward::ZeroForm {
            nominal_degree: k as i64 - m as i64,
            base_dim: de.base.ambient_dim(),
        });
    }
    let mut acc = fiber_integrate(&p.omega, de)?.form();
    if let Some(g) = p.gamma_form() {
        for (piece, sign) in sphere_bundle_pieces(de) {
            acc = acc.add(&fiber_integrate(&g, &piece)?.form().scale(sign))?;
        }
    }
    Ok(Pushforward::Form(acc))
}

/// Residuals of `ν(d p) = ± dν(p)` at base points: `(stated, derived)` for
/// the signs `(−1)^k` (k = deg ω) and `(−1)^{m−1}` (m = fiber rank).
pub fn nu_sign_law(p: &FormPair, de: &FiberBundleDomain, points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let k = p.degree();
    let m = de.fiber.dim;
    let lhs = nu(&pair_d(p), de)?;
    let dnu = match nu(p, de)? {
        Pushforward::Form(f) => f.d(),
        Pushforward::ZeroForm { .. } => return Ok((0.0, 0.0)),
    };
    let lhs = match lhs {
        Pushforward::Form(f) => f,
        Pushforward::ZeroForm { .. } => DifferentialForm::zero(dnu.dim(), dnu.degree()),
    };
    let stated = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let derived = if (m + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for x in points {
        let l = lhs.eval(x, 0);
        let r = dnu.eval(x, 0);
        a = a.max(l.sub(&r.scale(stated)).max_abs());
        b = b.max(l.sub(&r.scale(derived)).max_abs());
    }
    Ok((a, b))
}

fn check_closed(eta: &DifferentialForm, base: &ChartDomain) -> Result<()> {
    let (lo, hi) = base.reference_box();
    let mut worst: f64 = 0.0;
    for j in 0..16 {
        let t = (j as f64 + 0.5) / 16.0;
        let x: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .enumerate()
            .map(|(i, (a, b))| a + (b - a) * ((t * (1.0 + i as f64 * 0.618)).fract()))
            .collect();
        let x = match &base.param {
            Some(f) => f.eval(&x),
            None => x,
        };
        worst = worst.max(eta.d().eval(&x, 0).max_abs());
    }
    if worst > tolerances::CLOSEDNESS {
        return Err(Error::Closedness(format!("|dη| = {worst:e} on the base")));
    }
    Ok(())
}

fn lift(eta: &DifferentialForm, m: usize) -> Result<DifferentialForm> {
    let n = eta.dim();
    eta.pullback(&SmoothMap::projection(m + n, (m..m + n).collect()))
}

/// `TPf(π*∇, s^τ)` on the total space.
pub fn tautological_transgression(e: &TrivializedBundle) -> Result<DifferentialForm> {
    let m = e.rank;
    let n = e.base.ambient_dim();
    section_transgression(&e.pulled_to_total(), tautological(m), &unit_points(m, n))
}

/// `ν⁻¹(η) = (π*Pf(∇) ∧ π*η, −TPf(π*∇, s^τ) ∧ π*η)` for even rank.
pub fn nu_inverse_even(eta: &DifferentialForm, e: &TrivializedBundle) -> Result<FormPair> {
    if e.rank % 2 == 1 {
        return Err(Error::Rank(format!("even-rank inverse for a rank {} bundle", e.rank)));
    }
    check_closed(eta, &e.base)?;
    let m = e.rank;
    let pe = lift(eta, m)?;
    let pf = pf_form(&e.pulled_to_total())?;
    let t = tautological_transgression(e)?;
    FormPair::new(pf.wedge(&pe)?, t.neg().wedge(&pe)?)
}

/// Which of the two labelings of `(∇¹, ∇²)` builds the odd-rank pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OddOrdering {
    /// `∇¹ = d ⊕ ∇^{τ⊥}` (tautological split), `∇² = d ⊕ π*∇`.
    Tautological,
    /// The two labels swapped.
    Swapped,
}

/// Quadrature orders for the odd-rank pair.
#[derive(Clone, Copy, Debug)]
pub struct OddOrders {
    pub path: usize,
    pub simplex: usize,
}

impl Default for OddOrders {
    fn default() -> Self {
        OddOrders {
            path: tolerances::TRANSGRESSION_ORDER,
            simplex: 10,
        }
    }
}

/// The bare odd-rank pair `(−TPf(∇¹,∇²), −TPf(∇¹,∇²,∇³))` on `(DE, SE)`,
/// transferred along `𝒮`.
pub fn odd_pair(e: &TrivializedBundle, ordering: OddOrdering, orders: OddOrders) -> Result<FormPair> {
    let t = odd_rank_triple(e)?;
    let [c1, c2, c3] = t.on_disk_bundle()?;
    let (a, b) = match ordering {
        OddOrdering::Tautological => (c1, c2),
        OddOrdering::Swapped => (c2, c1),
    };
    let w = transgression_with_order(&a, &b, orders.path)?;
    let fam = SimplexConnectionFamily::new(&a, &b, &c3)?;
    let g = secondary_transgression_with_order(&fam, orders.simplex)?;
    FormPair::new(w.neg(), g.neg())
}

/// Largest coefficient of `ω + dγ` on `SE`, for `γ` and `−γ`.
pub fn odd_pair_closedness(p: &FormPair, de: &FiberBundleDomain, samples: usize) -> Result<(f64, f64)> {
    let g = p.gamma_form().expect("odd pair has a boundary slot");
    let plus = p.omega.add(&g.d())?;
    let minus = p.omega.sub(&g.d())?;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for (piece, _) in sphere_bundle_pieces(de) {
        let total = piece.total();
        let (rp, rm) = (restrict(&plus, &total)?, restrict(&minus, &total)?);
        let (lo, hi) = total.reference_box();
        for j in 0..samples {
            let t = (j as f64 + 0.5) / samples as f64;
            let x: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .enumerate()
                .map(|(i, (l, h))| l + (h - l) * ((t * (1.0 + 0.618 * i as f64) + 0.1 * i as f64).fract()))
                .collect();
            a = a.max(rp.eval(&x, 0).max_abs());
            b = b.max(rm.eval(&x, 0).max_abs());
        }
    }
    Ok((a, b))
}

/// `ν` of the bare pair for both orderings at one base point.
#[derive(Clone, Debug)]
pub struct OddResolution {
    pub tautological: f64,
    pub swapped: f64,
    pub chosen: Option<OddOrdering>,
}

/// Evaluates `ν(pair)` for both orderings at `base_point`; exactly one must
/// give `+1` within `tol`.
pub fn resolve_odd_ordering(
    e: &TrivializedBundle,
    base_point: &[f64],
    orders: OddOrders,
    tol: f64,
) -> Result<OddResolution> {
    let de = odd_disk_bundle(e);
    let mut vals = [0.0; 2];
    for (i, o) in [OddOrdering::Tautological, OddOrdering::Swapped]
        .into_iter()
        .enumerate()
    {
        let p = odd_pair(e, o, orders)?;
        vals[i] = nu(&p, &de)?.form().eval(base_point, 0).c[0].value();
    }
    let ok: Vec<bool> = vals.iter().map(|v| (v - 1.0).abs() <= tol).collect();
    let chosen = match (ok[0], ok[1]) {
        (true, false) => Some(OddOrdering::Tautological),
        (false, true) => Some(OddOrdering::Swapped),
        _ => None,
    };
    Ok(OddResolution {
        tautological: vals[0],
        swapped: vals[1],
        chosen,
    })
}

/// `DE` for the odd-rank checks, at the reduced three-dimensional order.
pub fn odd_disk_bundle(e: &TrivializedBundle) -> FiberBundleDomain {
    disk_bundle(e.rank, &e.base, None)
}

/// `ν⁻¹(η)` for odd rank: the ordering is resolved first (at the first base
/// node) and the pair's closedness on `SE` is checked.
pub fn nu_inverse_odd(eta: &DifferentialForm, e: &TrivializedBundle, orders: OddOrders) -> Result<FormPair> {
    if e.rank.is_multiple_of(2) {
        return Err(Error::Rank(format!("odd-rank inverse for a rank {} bundle", e.rank)));
    }
    check_closed(eta, &e.base)?;
    let de = odd_disk_bundle(e);
    let base_point = crate::bundles::node_points(&e.base, 1).remove(0);
    let res = resolve_odd_ordering(e, &base_point, orders, 1e-4)?;
    let Some(ordering) = res.chosen else {
        return Err(Error::SignConvention(format!(
            "ν(pair) = {} (tautological first), {} (swapped); neither ordering alone gives +1",
            res.tautological, res.swapped
        )));
    };
    let p = odd_pair(e, ordering, orders)?;
    let (plus, minus) = odd_pair_closedness(&p, &de, 24)?;
    if plus > tolerances::ODD_PAIR_CLOSEDNESS {
        return Err(Error::SignConvention(format!(
            "pair not closed on SE: |ω + dγ| = {plus:e}, |ω − dγ| = {minus:e}"
        )));
    }
    let pe = lift(eta, e.rank)?;
    FormPair::new(p.omega.wedge(&pe)?, p.gamma_form().expect("slot").wedge(&pe)?)
}

/// `μ(ω, γ) = ρ(r) ω − d(ρ ∘ r) ∧ γ` on `(v, b)` coordinates; on `|v| ≤ 1`
/// it is `ω` and `γ` is never evaluated there.
pub fn mu(p: &FormPair, m: usize, rho: BumpProfile) -> Result<DifferentialForm> {
    rho.check()?;
    let dim = p.dim();
    let k = p.degree();
    let (w, g) = (p.omega.clone(), p.gamma_form());
    Ok(DifferentialForm::from_local(dim, k, move |x, ord| {
        let r2: f64 = x[..m].iter().map(|c| c * c).sum();
        let wl = w.eval(x, ord);
        if r2 <= 1.0 {
            return wl;
        }
        let vars = Jet::vars(x, ord + 1);
        let rj = rho.of_squared(&squared_norm(&vars[..m]));
        let mut out = wl.mul_jet(&rj.truncate(ord));
        if let Some(g) = &g {
            let drho = Local::function(rj).d();
            out = out.sub(&drho.wedge(&g.eval(x, ord)));
        }
        out
    }))
}

/// Compactly supported Thom form `ρ π*Pf(∇) + d(ρ ∘ r) ∧ TPf(π*∇, s^τ)`.
pub fn thom_form(e: &TrivializedBundle, rho: BumpProfile) -> Result<DifferentialForm> {
    if e.rank % 2 == 1 {
        return Err(Error::Rank(format!("Thom form of an odd rank {} bundle", e.rank)));
    }
    let m = e.rank;
    let pf = pf_form(&e.pulled_to_total())?;
    let t = tautological_transgression(e)?;
    let p = FormPair::new(pf, t.neg())?;
    mu(&p, m, rho)
}

/// Integral over the fibers `E_b` of a form supported in `|v| ≤ 2`: the unit
/// disk plus `panels` radial shells on `[1, 2]`.
pub fn fiber_integral_compact(
    w: &DifferentialForm,
    m: usize,
    base: &ChartDomain,
    panels: usize,
) -> Result<DifferentialForm> {
    let mut pieces: Vec<ChartDomain> = Vec::new();
    let edges: Vec<f64> = (0..=panels).map(|i| 1.0 + i as f64 / panels as f64).collect();
    if m == 1 {
        pieces.push(ChartDomain::interval(-1.0, 1.0));
        for win in edges.windows(2) {
            pieces.push(ChartDomain::interval(win[0], win[1]));
            pieces.push(ChartDomain::interval(-win[1], -win[0]));
        }
    } else {
        pieces.push(ChartDomain::disk(m));
        for win in edges.windows(2) {
            pieces.push(ChartDomain::shell(m, win[0], win[1]));
        }
    }
    let mut acc: Option<DifferentialForm> = None;
    for piece in pieces {
        let order = if m >= 3 {
            tolerances::FIBER3_ORDER
        } else {
            tolerances::DEFAULT_ORDER
        };
        let fb = FiberBundleDomain::new(piece.with_order(order), base.clone());
        let f = fiber_integrate(w, &fb)?.form();
        acc = Some(match acc {
            None => f,
            Some(a) => a.add(&f)?,
        });
    }
    Ok(acc.expect("at least one piece"))
}

/// `|∫_{E/B} μ(p) − ν(p)|` at base points.
pub fn left_square_residual(p: &FormPair, e: &TrivializedBundle, rho: BumpProfile, points: &[Vec<f64>]) -> Result<f64> {
    let m = e.rank;
    let lhs = fiber_integral_compact(&mu(p, m, rho)?, m, &e.base, 6)?;
    let rhs = nu(p, &e.disk_bundle())?.form();
    let mut worst: f64 = 0.0;
    for x in points {
        worst = worst.max(lhs.eval(x, 0).sub(&rhs.eval(x, 0)).max_abs());
    }
    Ok(worst)
}

/// A Chern–Gauss–Bonnet scenario: `M` with a connection on `TM` (in a
/// frame), the true boundary faces of `M` and the collar connection `∇^ν`
/// along them.
#[derive(Clone, Debug)]
pub struct CgbScenario {
    pub name: String,
    pub manifold: ChartDomain,
    pub connection: Connection,
    pub boundary: Vec<Face>,
    pub normal: Option<Connection>,
    pub chi: Option<i64>,
}

/// The pieces of `∫_M Pf − ∫_{∂M} TPf(∇^ν, ∇) − χ`.
#[derive(Clone, Debug)]
pub struct CgbReport {
    pub pf_integral: f64,
    pub boundary_integral: f64,
    pub chi: i64,
    pub defect: f64,
}

pub fn cgb_defect(s: &CgbScenario) -> Result<CgbReport> {
    let chi = s
        .chi
        .ok_or_else(|| Error::Config(format!("scenario {} has no expected χ", s.name)))?;
    let pf = integrate(&pf_form(&s.connection)?, &s.manifold)?;
    let mut bd = 0.0;
    if !s.boundary.is_empty() {
        let nu_c = s
            .normal
            .as_ref()
            .ok_or_else(|| Error::Config(format!("scenario {} has a boundary but no ∇^ν", s.name)))?;
        let t = transgression_with_order(nu_c, &s.connection, tolerances::TRANSGRESSION_ORDER)?;
        for f in &s.boundary {
            bd += f.sign * integrate(&t, &f.domain)?;
        }
    }
    Ok(CgbReport {
        pf_integral: pf,
        boundary_integral: bd,
        chi,
        defect: pf - bd - chi as f64,
    })
}

/// Round `S²` in the box chart; no boundary, `χ = 2`.
pub fn cgb_round_sphere(order: usize) -> Result<CgbScenario> {
    let e = crate::bundles::round_sphere_tangent(std::f64::consts::PI)?;
    Ok(CgbScenario {
        name: "round-s2".into(),
        manifold: e.base.clone().with_order(order),
        connection: e.connection,
        boundary: vec![],
        normal: None,
        chi: Some(2),
    })
}

/// Flat unit disk, `∇^ν` split by the outward normal `(x, y)`.
pub fn cgb_flat_disk(order: usize) -> Result<CgbScenario> {
    let m = ChartDomain::disk(2).with_order(order);
    let flat = Connection::trivial(2, 2);
    let pts = vec![vec![1.0, 0.0], vec![0.0, -1.0], vec![0.6, 0.8]];
    let normal =
        crate::bundles::section_splitting_connection(&flat, |x| x.to_vec(), &pts, tolerances::VANISHING_SECTION)?;
    Ok(CgbScenario {
        name: "flat-d2".into(),
        boundary: m.boundary_faces(),
        manifold: m,
        connection: flat,
        normal: Some(normal),
        chi: Some(1),
    })
}

/// Polar cap `θ ≤ θ₀` of the round sphere; the boundary is the circle
/// `θ = θ₀` and `∇^ν` keeps `e_θ` parallel.
pub fn cgb_spherical_cap(theta0: f64, order: usize) -> Result<CgbScenario> {
    let e = crate::bundles::round_sphere_tangent(theta0)?;
    let m = e.base.clone().with_order(order);
    let pts = vec![vec![theta0, 0.3], vec![theta0, 2.0]];
    let normal = crate::bundles::section_splitting_connection(
        &e.connection,
        |x| vec![x[0].cst(1.0), x[0].zero_like()],
        &pts,
        tolerances::VANISHING_SECTION,
    )?;
    // Face 0 of the box is θ = θ₀; the others are the pole and the seam.
    let boundary = vec![m.boundary_faces().remove(0)];
    Ok(CgbScenario {
        name: format!("cap-{theta0:.4}"),
        manifold: m,
        connection: e.connection,
        boundary,
        normal: Some(normal),
        chi: Some(1),
    })
}

/// `𝓛_I(Pf(∇), −TPf(∇, s))(1)` over a surface with boundary.
pub fn dual_zero_count<F>(c: &Connection, s: F, m: &ChartDomain, split_points: &[Vec<f64>]) -> Result<f64>
where
    F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
{
    let pf = pf_form(c)?;
    let t = section_transgression(c, s, split_points)?;
    let pair = FormPair::new(pf, t.neg())?;
    lefschetz_i(&pair, &DifferentialForm::constant(c.dim(), 1.0), m)
}

/// `|𝓛_II(Pf)(ω, γ) − ([s⁻¹(0)], 0)(ω, γ)|` for closed test pairs of
/// degree 0 on a closed surface.
pub fn zero_set_residual(c: &Connection, z: &ZeroCount, m: &ChartDomain, tests: &[f64]) -> Result<f64> {
    let pf = pf_form(c)?;
    let cur = crate::relative::lefschetz_ii_current(&pf, m);
    let zs = crate::relative::zero_set_current(z);
    let mut worst: f64 = 0.0;
    for &a in tests {
        let q = FormPair::interior(DifferentialForm::constant(c.dim(), a));
        let (x, _) = cur.eval(&q)?;
        let (y, _) = zs.eval(&q)?;
        worst = worst.max((x - y).abs());
    }
    Ok(worst)
}

/// Zero-set check on the round sphere with the tangential part of the
/// constant field `(cos 1, sin 1, 0)`, written in the frame `(e_θ, e_φ)`:
/// `s = (cos θ cos(φ − 1), −sin(φ − 1))`, zeros at `θ = π/2`,
/// `φ ∈ {1, 1 + π}`. Returns the signed count and the pairing residual on
/// the constant test pairs `tests`.
pub fn sphere_zero_set_check(order: usize, tests: &[f64]) -> Result<(ZeroCount, f64)> {
    let e = crate::bundles::round_sphere_tangent(std::f64::consts::PI)?;
    let m = e.base.clone().with_order(order);
    let half = std::f64::consts::FRAC_PI_2;
    let zeros = [vec![half, 1.0], vec![half, 1.0 + std::f64::consts::PI]];
    let z = crate::relative::signed_zero_count(
        |x: &[Jet]| {
            let a = &x[1] - 1.0;
            vec![&x[0].cos() * &a.cos(), -a.sin()]
        },
        &m,
        Some(&zeros),
    )?;
    let r = zero_set_residual(&e.connection, &z, &m, tests)?;
    Ok((z, r))
}

/// `max |TPf(∇¹,∇³)|` and `max |TPf(∇²,∇³)|` over `SE`, for the triple
/// transferred to `DE` along `𝒮`.
pub fn persistent_section_vanishing(e: &TrivializedBundle, samples: usize) -> Result<(f64, f64)> {
    let [c1, c2, c3] = odd_rank_triple(e)?.on_disk_bundle()?;
    let t13 = transgression_with_order(&c1, &c3, tolerances::TRANSGRESSION_ORDER)?;
    let t23 = transgression_with_order(&c2, &c3, tolerances::TRANSGRESSION_ORDER)?;
    let de = odd_disk_bundle(e);
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for (piece, _) in sphere_bundle_pieces(&de) {
        let total = piece.total();
        let (r13, r23) = (restrict(&t13, &total)?, restrict(&t23, &total)?);
        let (lo, hi) = total.reference_box();
        for j in 0..samples {
            let t = (j as f64 + 0.5) / samples as f64;
            let x: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .enumerate()
                .map(|(i, (l, h))| l + (h - l) * ((t * (1.0 + 0.618 * i as f64) + 0.13 * i as f64).fract()))
                .collect();
            a = a.max(r13.eval(&x, 0).max_abs());
            b = b.max(r23.eval(&x, 0).max_abs());
        }
    }
    Ok((a, b))
}

/// Outcome of the reflection `(s, v) ↦ (−s, v)`, `ψ = diag(−1, I)` on the
/// blow-up `[−1, 1] × S(E)`, parametrized by `s = sin σ`.
#[derive(Clone, Debug)]
pub struct ReflectionReport {
    /// `max |φ*T − T|` for `T = TPf(∇³, ∇¹)` at sample points.
    pub deviation: f64,
    /// `max |T|` at the same points.
    pub magnitude: f64,
    /// `∫_{[−1,1]×S(E_b)} T` at the first base node.
    pub integral: f64,
}

/// Blow-up `Bl(σ, v, b) = (sin σ, cos σ v, b)` onto `S(ℝ ⊕ E)`, with
/// `s = sin σ` so the map stays smooth up to `σ = ±π/2`.
fn blow_up(m: usize, n: usize) -> SmoothMap {
    SmoothMap::new(1 + m + n, 1 + m + n, move |x| {
        let r = x[0].cos();
        let mut out = vec![x[0].sin()];
        out.extend(x[1..=m].iter().map(|c| c * &r));
        out.extend_from_slice(&x[1 + m..]);
        out
    })
}

pub fn reflection_check(e: &TrivializedBundle, order: usize) -> Result<ReflectionReport> {
    let m = e.rank;
    if m.is_multiple_of(2) || m < 3 {
        return Err(Error::Rank(format!("reflection check needs odd rank ≥ 3, got {m}")));
    }
    let n = e.base.ambient_dim();
    let t = odd_rank_triple(e)?;
    let bl = blow_up(m, n);
    let c1 = t.nabla1.pullback(&bl)?.with_label("Bl*∇¹");
    let c3 = t.nabla3.pullback(&bl)?.with_label("Bl*∇³");
    let base_pt = crate::bundles::node_points(&e.base, 1).remove(0);
    let mut pts = Vec::new();
    for j in 0..6 {
        let a = 0.3 + 0.9 * j as f64;
        let mut p = vec![1.2 * (a * 1.7).sin()];
        let mut v = vec![0.0; m];
        v[0] = a.cos();
        v[1] = a.sin() * 0.6;
        v[2] = a.sin() * 0.8;
        p.extend(v);
        p.extend(base_pt.iter().copied());
        pts.push(p);
    }
    let dim = 1 + m + n;
    let iso = crate::chern_weil::BundleIsomorphism {
        phi: SmoothMap::new(dim, dim, |x| {
            let mut out = x.to_vec();
            out[0] = -&x[0];
            out
        }),
        psi: crate::forms::MatrixForm::from_local(m + 1, dim, 0, move |p, k| {
            let z = Jet::constant(dim, k, 0.0);
            let mut e = vec![z.clone(); (m + 1) * (m + 1)];
            for i in 0..=m {
                e[i * (m + 1) + i] = Jet::constant(dim, k, if i == 0 { -1.0 } else { 1.0 });
            }
            let _ = p;
            crate::forms::LocalMatrix::functions(m + 1, e)
        }),
    };
    let data = crate::chern_weil::SymmetryData::Transgression(c3.clone(), c1.clone());
    let deviation = crate::chern_weil::symmetry_check(&data, &iso, &pts)?;
    let tpf = transgression_with_order(&c3, &c1, tolerances::TRANSGRESSION_ORDER)?;
    let magnitude = pts.iter().map(|p| tpf.eval(p, 0).max_abs()).fold(0.0, f64::max);
    let q = ChartDomain::product(vec![
        ChartDomain::interval(-FRAC_PI_2, FRAC_PI_2),
        ChartDomain::sphere(m - 1),
    ])
    .with_order(order);
    let fb = FiberBundleDomain::new(q, e.base.clone());
    let integral = fiber_integrate(&tpf, &fb)?.form().eval(&base_pt, 0).c[0].value();
    Ok(ReflectionReport {
        deviation,
        magnitude,
        integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn bump_profiles_are_valid() {
        for b in [BumpProfile::standard(), BumpProfile::alternate()] {
            b.check().unwrap();
            assert_eq!(b.value(0.5), 1.0);
            assert_eq!(b.value(2.5), 0.0);
            assert_abs_diff_eq!(b.value(1.5), 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn nu_of_normalized_fiber_volume_is_one() {
        let base = ChartDomain::interval(0.0, 1.0);
        let e = TrivializedBundle::trivial(2, base);
        let w = DifferentialForm::new(3, 2, |x| {
            let c = x[0].cst(1.0 / PI);
            let z = x[0].zero_like();
            vec![c, z.clone(), z]
        });
        let v = nu(&FormPair::interior(w), &e.disk_bundle()).unwrap().form();
        assert_abs_diff_eq!(v.eval(&[0.3], 0).c[0].value(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn even_round_trip_over_point() {
        let e = TrivializedBundle::trivial(2, ChartDomain::point(vec![]));
        let one = DifferentialForm::constant(0, 1.0);
        let p = nu_inverse_even(&one, &e).unwrap();
        let v = nu(&p, &e.disk_bundle()).unwrap().form();
        assert_abs_diff_eq!(v.eval(&[], 0).c[0].value(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn odd_rank_one_gives_half() {
        let e = TrivializedBundle::trivial(1, ChartDomain::point(vec![]));
        let r = resolve_odd_ordering(&e, &[], OddOrders::default(), 1e-8).unwrap();
        assert_abs_diff_eq!(r.tautological.abs(), 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(r.tautological, -r.swapped, epsilon = 1e-12);
        assert!(r.chosen.is_none());
        let err = nu_inverse_odd(&DifferentialForm::constant(0, 1.0), &e, OddOrders::default());
        assert!(matches!(err, Err(Error::SignConvention(_))));
    }

    #[test]
    fn thom_form_over_point_integrates_to_one() {
        let e = TrivializedBundle::trivial(2, ChartDomain::point(vec![]));
        for rho in [BumpProfile::standard(), BumpProfile::alternate()] {
            let t = thom_form(&e, rho).unwrap();
            let v = fiber_integral_compact(&t, 2, &e.base, 6).unwrap();
            assert_abs_diff_eq!(v.eval(&[], 0).c[0].value(), 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn sphere_zero_set_matches_pfaffian() {
        let (z, r) = sphere_zero_set_check(24, &[1.0, -0.5, 3.0]).unwrap();
        assert_eq!(z.total, 2);
        assert!(z.zeros.iter().all(|(_, s)| *s == 1));
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn thom_form_is_closed_and_supported() {
        let e = TrivializedBundle::new(ChartDomain::disk(2), {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2);
            Connection::new(crate::random::random_skew_potential(2, 2, 0.4, &mut rng), "a").unwrap()
        })
        .unwrap();
        let t = thom_form(&e, BumpProfile::alternate()).unwrap();
        for x in [[0.5, 0.3, 0.1, 0.2], [1.2, -0.6, 0.3, -0.1], [0.2, 1.7, -0.4, 0.4]] {
            assert!(t.d().eval(&x, 0).max_abs() < 1e-8);
        }
        assert_eq!(t.eval(&[2.1, 0.0, 0.1, 0.1], 0).max_abs(), 0.0);
    }

    #[test]
    fn left_square_commutes_on_closed_pair() {
        let e = TrivializedBundle::trivial(2, ChartDomain::interval(0.0, 1.0));
        let eta = DifferentialForm::constant(1, 1.0);
        let p = nu_inverse_even(&eta, &e).unwrap();
        let r = left_square_residual(&p, &e, BumpProfile::standard(), &[vec![0.4]]).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn rank_errors() {
        let odd = TrivializedBundle::trivial(1, ChartDomain::point(vec![]));
        let even = TrivializedBundle::trivial(2, ChartDomain::point(vec![]));
        let one = DifferentialForm::constant(0, 1.0);
        assert!(matches!(nu_inverse_even(&one, &odd), Err(Error::Rank(_))));
        assert!(matches!(
            nu_inverse_odd(&one, &even, OddOrders::default()),
            Err(Error::Rank(_))
        ));
        assert!(matches!(thom_form(&odd, BumpProfile::standard()), Err(Error::Rank(_))));
        let base = TrivializedBundle::trivial(2, ChartDomain::interval(0.0, 1.0));
        let not_closed = DifferentialForm::function(1, |x| x[0].clone());
        assert!(matches!(nu_inverse_even(&not_closed, &base), Err(Error::Closedness(_))));
        let zero = nu_inverse_even(&DifferentialForm::zero(1, 0), &base).unwrap();
        assert_eq!(zero.omega.eval(&[0.3, 0.2, 0.5], 0).max_abs(), 0.0);
    }

    #[test]
    fn mu_chain_law() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let p = FormPair::random(3, 1, &mut rng);
        let lhs = mu(&pair_d(&p), 2, BumpProfile::standard()).unwrap();
        let rhs = mu(&p, 2, BumpProfile::standard()).unwrap().d();
        for x in [[0.3, 0.2, 0.1], [1.2, 0.5, -0.4], [0.9, 1.1, 0.3]] {
            assert!(lhs.eval(&x, 0).add(&rhs.eval(&x, 0)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn cgb_on_sphere_disk_and_caps() {
        let s = cgb_defect(&cgb_round_sphere(24).unwrap()).unwrap();
        assert!(s.defect.abs() < 1e-8, "{s:?}");
        let d = cgb_defect(&cgb_flat_disk(16).unwrap()).unwrap();
        assert!(d.defect.abs() < 1e-7, "{d:?}");
        for th in [PI / 6.0, PI / 2.0, 2.0 * PI / 3.0] {
            let c = cgb_defect(&cgb_spherical_cap(th, 16).unwrap()).unwrap();
            assert_abs_diff_eq!(c.pf_integral, 1.0 - th.cos(), epsilon = 1e-8);
            assert!(c.defect.abs() < 1e-6, "{c:?}");
        }
        let mut bad = cgb_flat_disk(8).unwrap();
        bad.chi = None;
        assert!(matches!(cgb_defect(&bad), Err(Error::Config(_))));
    }
}
