//! The mapping-cone pair complex `Ω^k(M) ⊕ Ω^{k−1}(∂M)`, current pairs,
//! the Lefschetz pairings, cylinder homotopy operators, sign constants and
//! signed zero counts of sections.
//!
//! Pairs hold both slots as forms in the ambient coordinates of `M`; the
//! restriction `ι*` happens when a slot is integrated over (or evaluated on)
//! a boundary face. Currents are evaluation closures.

use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, SmoothMap};
use crate::geometry::{integrate, ChartDomain, DomainKind};
use crate::jet::Jet;
use crate::random::random_form;
use nalgebra::DMatrix;
use rand::Rng;
use std::fmt;
use std::sync::Arc;

/// `(ω, γ)` with `deg γ = deg ω − 1`; `γ = None` is the zero form (and the
/// only option in degree 0).
#[derive(Clone, Debug)]
pub struct FormPair {
    pub omega: DifferentialForm,
    pub gamma: Option<DifferentialForm>,
}

impl FormPair {
    pub fn new(omega: DifferentialForm, gamma: DifferentialForm) -> Result<FormPair> {
        if omega.dim() != gamma.dim() {
            return Err(Error::Chart(format!(
                "pair slots on {} and {} coordinates",
                omega.dim(),
                gamma.dim()
            )));
        }
        if gamma.degree() + 1 != omega.degree() {
            return Err(Error::Degree(format!(
                "pair of a {}-form with a {}-form",
                omega.degree(),
                gamma.degree()
            )));
        }
        Ok(FormPair {
            omega,
            gamma: Some(gamma),
        })
    }

    /// `(ω, 0)`.
    pub fn interior(omega: DifferentialForm) -> FormPair {
        FormPair { omega, gamma: None }
    }

    pub fn degree(&self) -> usize {
        self.omega.degree()
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// `γ`, or the zero form of degree `k − 1` (`None` in degree 0).
    pub fn gamma_form(&self) -> Option<DifferentialForm> {
        match (&self.gamma, self.degree()) {
            (Some(g), _) => Some(g.clone()),
            (None, 0) => None,
            (None, k) => Some(DifferentialForm::zero(self.dim(), k - 1)),
        }
    }

    pub fn pullback(&self, f: &SmoothMap) -> Result<FormPair> {
        Ok(FormPair {
            omega: self.omega.pullback(f)?,
            gamma: match &self.gamma {
                Some(g) => Some(g.pullback(f)?),
                None => None,
            },
        })
    }

    pub fn add(&self, o: &FormPair) -> Result<FormPair> {
        let gamma = match (self.gamma_form(), o.gamma_form()) {
            (Some(a), Some(b)) => Some(a.add(&b)?),
            _ => None,
        };
        Ok(FormPair {
            omega: self.omega.add(&o.omega)?,
            gamma,
        })
    }

    pub fn scale(&self, s: f64) -> FormPair {
        FormPair {
            omega: self.omega.scale(s),
            gamma: self.gamma.as_ref().map(|g| g.scale(s)),
        }
    }

    /// Random polynomial pair of degree `k` on `ℝ^dim`.
    pub fn random<R: Rng>(dim: usize, k: usize, rng: &mut R) -> FormPair {
        let omega = random_form(dim, k, rng);
        if k == 0 {
            FormPair::interior(omega)
        } else {
            FormPair {
                omega,
                gamma: Some(random_form(dim, k - 1, rng)),
            }
        }
    }
}

/// `d(ω, γ) = (−dω, ι*ω + dγ)`.
pub fn pair_d(p: &FormPair) -> FormPair {
    let dw = p.omega.d();
    let gamma = match &p.gamma {
        Some(g) => p.omega.add(&g.d()).expect("slots share coordinates"),
        None => p.omega.clone(),
    };
    FormPair {
        omega: dw.neg(),
        gamma: Some(gamma),
    }
}

/// `a(γ) = (0, γ)`.
pub fn map_a(gamma: &DifferentialForm) -> FormPair {
    FormPair {
        omega: DifferentialForm::zero(gamma.dim(), gamma.degree() + 1),
        gamma: Some(gamma.clone()),
    }
}

/// `b(ω, γ) = ω`.
pub fn map_b(p: &FormPair) -> DifferentialForm {
    p.omega.clone()
}

/// Ambient sample points of a domain, `count` of them, away from its faces.
pub fn sample_ambient<R: Rng>(d: &ChartDomain, count: usize, margin: f64, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let p = d.sample(rng, margin);
            match &d.param {
                Some(f) => f.eval(&p),
                None => p,
            }
        })
        .collect()
}

/// A form restricted to a face: the pullback along its parametrization.
pub fn restrict(w: &DifferentialForm, face: &ChartDomain) -> Result<DifferentialForm> {
    match &face.param {
        Some(p) => w.pullback(p),
        None => Ok(w.clone()),
    }
}

/// Largest coefficient of `d(ω, γ)`: the first slot at interior samples,
/// the second restricted to each boundary face at face samples.
pub fn pair_closedness<R: Rng>(p: &FormPair, m: &ChartDomain, count: usize, rng: &mut R) -> Result<f64> {
    let dp = pair_d(p);
    let mut worst: f64 = 0.0;
    for x in sample_ambient(m, count, 0.02, rng) {
        worst = worst.max(dp.omega.eval(&x, 0).max_abs());
    }
    let g = dp.gamma.expect("pair_d fills the second slot");
    for f in m.boundary_faces() {
        let r = restrict(&g, &f.domain)?;
        for _ in 0..count {
            let x = f.domain.sample(rng, 0.02);
            worst = worst.max(r.eval(&x, 0).max_abs());
        }
    }
    Ok(worst)
}

/// `Σ_faces ∫_face w` over `∂M` with the outer-normal-first orientation.
pub fn integrate_boundary(w: &DifferentialForm, m: &ChartDomain) -> Result<f64> {
    let mut acc = 0.0;
    for f in m.boundary_faces() {
        acc += f.sign * integrate(w, &f.domain)?;
    }
    Ok(acc)
}

type Functional = dyn Fn(&DifferentialForm) -> Result<f64> + Send + Sync;

/// A current of dimension `dim`: a linear functional on `dim`-forms.
#[derive(Clone)]
pub struct CurrentEvaluator {
    pub dim: i64,
    f: Arc<Functional>,
}

impl fmt::Debug for CurrentEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurrentEvaluator(dim={})", self.dim)
    }
}

impl CurrentEvaluator {
    pub fn new<F>(dim: i64, f: F) -> CurrentEvaluator
    where
        F: Fn(&DifferentialForm) -> Result<f64> + Send + Sync + 'static,
    {
        CurrentEvaluator { dim, f: Arc::new(f) }
    }

    pub fn zero(dim: i64) -> CurrentEvaluator {
        CurrentEvaluator::new(dim, |_| Ok(0.0))
    }

    pub fn apply(&self, w: &DifferentialForm) -> Result<f64> {
        if w.degree() as i64 != self.dim {
            return Err(Error::Degree(format!(
                "current of dimension {} applied to a {}-form",
                self.dim,
                w.degree()
            )));
        }
        (self.f)(w)
    }

    /// `dT(w) = T(dw)`, with no sign.
    pub fn d(&self) -> CurrentEvaluator {
        let t = self.clone();
        CurrentEvaluator::new(self.dim - 1, move |w| t.apply(&w.d()))
    }

    /// `Σ sign · w(p)` over signed points.
    pub fn points(pts: Vec<(Vec<f64>, i32)>) -> CurrentEvaluator {
        CurrentEvaluator::new(0, move |w| {
            Ok(pts.iter().map(|(p, s)| *s as f64 * w.eval(p, 0).c[0].value()).sum())
        })
    }
}

/// A relative current `(T, S) ∈ 𝒟'_k(M) ⊕ 𝒟'_{k−1}(∂M)`.
#[derive(Clone, Debug)]
pub struct CurrentPair {
    pub t: CurrentEvaluator,
    pub s: CurrentEvaluator,
}

impl CurrentPair {
    /// `d(T, S) = (ι_*S − dT, dS)`.
    pub fn d(&self) -> CurrentPair {
        let (t, s) = (self.t.clone(), self.s.clone());
        CurrentPair {
            t: CurrentEvaluator::new(self.t.dim - 1, move |w| Ok(s.apply(w)? - t.apply(&w.d())?)),
            s: self.s.d(),
        }
    }

    /// The two slot evaluations on a pair of matching degree.
    pub fn eval(&self, p: &FormPair) -> Result<(f64, f64)> {
        let a = self.t.apply(&p.omega)?;
        let b = match p.gamma_form() {
            Some(g) => self.s.apply(&g)?,
            None => 0.0,
        };
        Ok((a, b))
    }
}

/// `𝓛_I(ω, γ)(η) = ∫_M ω ∧ η + ∫_{∂M} γ ∧ ι*η`.
pub fn lefschetz_i(p: &FormPair, eta: &DifferentialForm, m: &ChartDomain) -> Result<f64> {
    if p.degree() + eta.degree() != m.dim {
        return Err(Error::Degree(format!(
            "𝓛_I of a {}-pair against a {}-form on a {}-manifold",
            p.degree(),
            eta.degree(),
            m.dim
        )));
    }
    let mut v = integrate(&p.omega.wedge(eta)?, m)?;
    if let Some(g) = p.gamma_form() {
        v += integrate_boundary(&g.wedge(eta)?, m)?;
    }
    Ok(v)
}

/// `𝓛_I(p)` as a current on `M`.
pub fn lefschetz_i_current(p: &FormPair, m: &ChartDomain) -> CurrentEvaluator {
    let (p, m) = (p.clone(), m.clone());
    CurrentEvaluator::new(m.dim as i64 - p.degree() as i64, move |eta| lefschetz_i(&p, eta, &m))
}

/// `𝓛_II(η) = (ω ↦ ∫_M ω ∧ η, γ ↦ ∫_{∂M} γ ∧ ι*η)`.
pub fn lefschetz_ii_current(eta: &DifferentialForm, m: &ChartDomain) -> CurrentPair {
    let k = m.dim as i64 - eta.degree() as i64;
    let (e1, m1) = (eta.clone(), m.clone());
    let (e2, m2) = (eta.clone(), m.clone());
    CurrentPair {
        t: CurrentEvaluator::new(k, move |w| integrate(&w.wedge(&e1)?, &m1)),
        s: CurrentEvaluator::new(k - 1, move |g| integrate_boundary(&g.wedge(&e2)?, &m2)),
    }
}

pub fn lefschetz_ii(eta: &DifferentialForm, p: &FormPair, m: &ChartDomain) -> Result<(f64, f64)> {
    if p.degree() + eta.degree() != m.dim {
        return Err(Error::Degree(format!(
            "𝓛_II of a {}-form against a {}-pair on a {}-manifold",
            eta.degree(),
            p.degree(),
            m.dim
        )));
    }
    lefschetz_ii_current(eta, m).eval(p)
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `|𝓛_I(d p)(η) − (−1)^k 𝓛_I(p)(dη)|` for `deg η = n − k − 1`.
pub fn lefschetz_i_residual(p: &FormPair, eta: &DifferentialForm, m: &ChartDomain) -> Result<f64> {
    let k = p.degree();
    let lhs = lefschetz_i(&pair_d(p), eta, m)?;
    let rhs = sign(k) * lefschetz_i(p, &eta.d(), m)?;
    Ok((lhs - rhs).abs())
}

/// Slotwise `|d𝓛_II(η)(q) − (−1)^k 𝓛_II(dη)(q)|` for a test pair `q` of
/// degree `k` and `deg η = n − k − 1`.
pub fn lefschetz_ii_residual(eta: &DifferentialForm, q: &FormPair, m: &ChartDomain) -> Result<f64> {
    let k = q.degree();
    let (a, b) = lefschetz_ii_current(eta, m).d().eval(q)?;
    let (c, e) = lefschetz_ii(&eta.d(), q, m)?;
    Ok((a - sign(k) * c).abs().max((b - sign(k) * e).abs()))
}

/// `τ_{n,k} = k(n − k − 1)` and `υ_{n,k} = k(n − k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignConstants {
    pub n: i64,
    pub k: i64,
}

impl SignConstants {
    pub fn new(n: i64, k: i64) -> SignConstants {
        SignConstants { n, k }
    }

    pub fn tau(&self) -> i64 {
        self.k * (self.n - self.k - 1)
    }

    pub fn upsilon(&self) -> i64 {
        self.k * (self.n - self.k)
    }

    pub fn tau_sign(&self) -> i64 {
        if self.tau().rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    pub fn upsilon_sign(&self) -> i64 {
        if self.upsilon().rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

/// A boundary compatible homotopy `φ: [0, t] × B → P` on ambient
/// coordinates `(s, b)`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub phi: SmoothMap,
    pub base: ChartDomain,
    pub t: f64,
}

impl Homotopy {
    /// Samples `[0, t] × ∂B` and checks `|ρ(φ(s, b))| ≤ 1e-9` for a defining
    /// function `ρ` of `∂P`.
    pub fn new<F>(phi: SmoothMap, base: ChartDomain, t: f64, boundary_defining: F) -> Result<Homotopy>
    where
        F: Fn(&[f64]) -> f64,
    {
        if phi.src != base.ambient_dim() + 1 {
            return Err(Error::Chart(format!(
                "homotopy on {} coordinates over a base with {}",
                phi.src,
                base.ambient_dim()
            )));
        }
        let h = Homotopy { phi, base, t };
        for (face, _) in h.lateral() {
            let rule = face.clone().with_order(3).rule();
            for i in 0..rule.len() {
                let x = match &face.param {
                    Some(p) => p.eval(rule.node(i)),
                    None => rule.node(i).to_vec(),
                };
                let y = h.phi.eval(&x);
                let r = boundary_defining(&y);
                if !(r.abs() <= 1e-9) {
                    return Err(Error::Homotopy(format!(
                        "φ{x:?} = {y:?} is off the boundary (defect {r:e})"
                    )));
                }
            }
        }
        Ok(h)
    }

    pub fn with_t(&self, t: f64) -> Homotopy {
        Homotopy { t, ..self.clone() }
    }

    /// `φ_s: B → P`.
    pub fn slice(&self, s: f64) -> SmoothMap {
        let n = self.base.ambient_dim();
        let incl = SmoothMap::new(n, n + 1, move |b| {
            let mut x = vec![b[0].cst(s)];
            x.extend_from_slice(b);
            x
        });
        self.phi.after(&incl).expect("slice lands in the cylinder")
    }

    pub fn cylinder(&self) -> ChartDomain {
        ChartDomain::product(vec![ChartDomain::interval(0.0, self.t), self.base.clone()]).with_order(self.base.order)
    }

    /// `[0, t] × ∂B` with the product orientation, one piece per face of `B`.
    pub fn lateral(&self) -> Vec<(ChartDomain, f64)> {
        self.base
            .boundary_faces()
            .into_iter()
            .map(|f| {
                (
                    ChartDomain::product(vec![ChartDomain::interval(0.0, self.t), f.domain])
                        .with_order(self.base.order),
                    f.sign,
                )
            })
            .collect()
    }

    /// `π₂: (s, b) ↦ b`.
    pub fn pi2(&self) -> SmoothMap {
        let n = self.base.ambient_dim();
        SmoothMap::projection(n + 1, (1..n + 1).collect())
    }

    fn integrate_lateral(&self, w: &DifferentialForm) -> Result<f64> {
        let mut acc = 0.0;
        for (d, s) in self.lateral() {
            acc += s * integrate(w, &d)?;
        }
        Ok(acc)
    }
}

/// `𝒯^I_t(ω, γ)(η) = −∫_{[0,t]×B} φ*ω ∧ π₂*η + ∫_{[0,t]×∂B} φ*γ ∧ π₂*η`.
pub fn homotopy_ti(h: &Homotopy, p: &FormPair, eta: &DifferentialForm) -> Result<f64> {
    let pe = eta.pullback(&h.pi2())?;
    let mut v = -integrate(&p.omega.pullback(&h.phi)?.wedge(&pe)?, &h.cylinder())?;
    if let Some(g) = p.gamma_form() {
        v += h.integrate_lateral(&g.pullback(&h.phi)?.wedge(&pe)?)?;
    }
    Ok(v)
}

/// `𝒯^II_t(η)(ω, γ) = (−∫_{[0,t]×B} π₂*ω ∧ φ*η, ∫_{[0,t]×∂B} π₂*γ ∧ φ*η)`.
pub fn homotopy_tii(h: &Homotopy, eta: &DifferentialForm, p: &FormPair) -> Result<(f64, f64)> {
    homotopy_tii_current(h, eta).eval(p)
}

/// `𝒯^II_t(η)` as a relative current on `B`.
pub fn homotopy_tii_current(h: &Homotopy, eta: &DifferentialForm) -> CurrentPair {
    let k = h.base.dim as i64 + 1 - eta.degree() as i64;
    let (h1, e1) = (h.clone(), eta.clone());
    let (h2, e2) = (h.clone(), eta.clone());
    CurrentPair {
        t: CurrentEvaluator::new(k, move |w| {
            let a = w.pullback(&h1.pi2())?.wedge(&e1.pullback(&h1.phi)?)?;
            Ok(-integrate(&a, &h1.cylinder())?)
        }),
        s: CurrentEvaluator::new(k - 1, move |g| {
            let a = g.pullback(&h2.pi2())?.wedge(&e2.pullback(&h2.phi)?)?;
            h2.integrate_lateral(&a)
        }),
    }
}

/// Both sides of the first homotopy identity
/// `𝒯^I(d p)(η) + (−1)^{k−1} 𝒯^I(p)(dη) = 𝓛_I(φ_t* p)(η) − 𝓛_I(φ_0* p)(η)`
/// for `deg η = dim B − k`.
pub fn homotopy_first_sides(h: &Homotopy, p: &FormPair, eta: &DifferentialForm) -> Result<(f64, f64)> {
    let k = p.degree();
    let lhs = homotopy_ti(h, &pair_d(p), eta)? - sign(k) * homotopy_ti(h, p, &eta.d())?;
    let rhs = lefschetz_i(&p.pullback(&h.slice(h.t))?, eta, &h.base)?
        - lefschetz_i(&p.pullback(&h.slice(0.0))?, eta, &h.base)?;
    Ok((lhs, rhs))
}

pub fn homotopy_first_residual(h: &Homotopy, p: &FormPair, eta: &DifferentialForm) -> Result<f64> {
    let (a, b) = homotopy_first_sides(h, p, eta)?;
    Ok((a - b).abs())
}

/// The three slot-pairs of the second homotopy identity evaluated on a test
/// pair `q`: `𝒯^II(dη)(q)`, `d𝒯^II(η)(q)` and
/// `𝓛_II(φ_t*η)(q) − 𝓛_II(φ_0*η)(q)`, for `deg q = dim B − deg η`.
pub fn homotopy_second_terms(h: &Homotopy, eta: &DifferentialForm, q: &FormPair) -> Result<[(f64, f64); 3]> {
    let a = homotopy_tii(h, &eta.d(), q)?;
    let b = homotopy_tii_current(h, eta).d().eval(q)?;
    let e1 = eta.pullback(&h.slice(h.t))?;
    let e0 = eta.pullback(&h.slice(0.0))?;
    let (r1, r2) = lefschetz_ii(&e1, q, &h.base)?;
    let (s1, s2) = lefschetz_ii(&e0, q, &h.base)?;
    Ok([a, b, (r1 - s1, r2 - s2)])
}

/// `(−1)^{n−k} 𝒯^II(dη) + d𝒯^II(η) − (𝓛_II(φ_t*η) − 𝓛_II(φ_0*η))` with
/// `n = dim B`, `k = deg η`, slotwise maximum. `flip` multiplies the first
/// term by `−1`.
pub fn homotopy_second_residual(h: &Homotopy, eta: &DifferentialForm, q: &FormPair, flip: bool) -> Result<f64> {
    let [a, b, r] = homotopy_second_terms(h, eta, q)?;
    let mut s = sign((h.base.dim + eta.degree()) % 2);
    if flip {
        s = -s;
    }
    Ok((s * a.0 + b.0 - r.0).abs().max((s * a.1 + b.1 - r.1).abs()))
}

/// Rank-one disk bundle over the circle, `P = B = [−1, 1] × S¹` in ambient
/// coordinates `(v, x, y)`, with the flow
/// `φ_s(v, x, y) = (v e^{−s(1−v²)}, R_{0.3 s}(x, y))`.
pub fn radial_flow_scenario(t: f64, order: usize) -> Result<Homotopy> {
    let base = ChartDomain::product(vec![ChartDomain::interval(-1.0, 1.0), ChartDomain::sphere(1)]).with_order(order);
    let phi = SmoothMap::new(4, 3, |x| {
        let (s, v) = (&x[0], &x[1]);
        let shrink = (-(s * (1.0 - v * v))).exp();
        let a = s * 0.3;
        let (c, sn) = (a.cos(), a.sin());
        vec![v * &shrink, &c * &x[2] - &sn * &x[3], &sn * &x[2] + &c * &x[3]]
    });
    Homotopy::new(phi, base, t, |y| 1.0 - y[0] * y[0])
}

/// Signed zeros of a section `s: ℝ^n → ℝ^n` written in the chart's ambient
/// coordinates, each signed by `sign det ds` times the chart orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCount {
    pub total: i64,
    pub zeros: Vec<(Vec<f64>, i32)>,
}

type Section = dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync;

fn section_jacobian(s: &Section, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let n = x.len();
    let v = s(&Jet::vars(x, 1));
    let val = v.iter().map(|c| c.value()).collect();
    let mut j = DMatrix::zeros(v.len(), n);
    for (i, c) in v.iter().enumerate() {
        for k in 0..n {
            let mut e = vec![0u8; n];
            e[k] = 1;
            j[(i, k)] = c.coeff(&e);
        }
    }
    (val, j)
}

/// Distance from the boundary for boxes and Cartesian disks; `None` outside.
fn depth(b: &ChartDomain, x: &[f64]) -> Result<Option<f64>> {
    match &b.kind {
        DomainKind::Box { lo, hi } if b.param.is_none() => {
            let mut d = f64::INFINITY;
            for i in 0..x.len() {
                if x[i] < lo[i] || x[i] > hi[i] {
                    return Ok(None);
                }
                d = d.min(x[i] - lo[i]).min(hi[i] - x[i]);
            }
            Ok(Some(d))
        }
        DomainKind::Disk { r0, r1, .. } => {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r < *r0 || r > *r1 {
                Ok(None)
            } else if *r0 == 0.0 {
                Ok(Some(r1 - r))
            } else {
                Ok(Some((r1 - r).min(r - r0)))
            }
        }
        _ => Err(Error::Chart("zero counting needs a box chart or a disk".into())),
    }
}

/// Zeros of `s` in `B`, from the explicit list (each checked) or by damped
/// Newton from a coarse grid.
pub fn signed_zero_count<F>(s: F, b: &ChartDomain, zeros: Option<&[Vec<f64>]>) -> Result<ZeroCount>
where
    F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
{
    let s: Arc<Section> = Arc::new(s);
    let n = b.dim;
    if b.ambient_dim() != n {
        return Err(Error::Chart("zero counting needs ambient dimension = dimension".into()));
    }
    let found: Vec<Vec<f64>> = match zeros {
        Some(list) => {
            for z in list {
                let (v, _) = section_jacobian(&*s, z);
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    return Err(Error::Consistency(format!("|s({z:?})| = {norm:e} is not a zero")));
                }
            }
            list.to_vec()
        }
        None => newton_zeros(&*s, b)?,
    };
    let mut out = Vec::new();
    for z in found {
        match depth(b, &z)? {
            None => continue,
            Some(d) if d < 1e-9 => {
                return Err(Error::BoundaryZero(format!("s vanishes at {z:?} on ∂B")));
            }
            _ => {}
        }
        let (_, j) = section_jacobian(&*s, &z);
        let sv = j.clone().svd(false, false).singular_values;
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin < crate::tolerances::TRANSVERSALITY {
            return Err(Error::Transversality(format!(
                "smallest singular value {smin:e} of ds at {z:?}"
            )));
        }
        let sg = (j.determinant() * b.orientation).signum() as i32;
        out.push((z, sg));
    }
    Ok(ZeroCount {
        total: out.iter().map(|(_, s)| *s as i64).sum(),
        zeros: out,
    })
}

fn newton_zeros(s: &Section, b: &ChartDomain) -> Result<Vec<Vec<f64>>> {
    let n = b.dim;
    let (lo, hi) = match &b.kind {
        DomainKind::Disk { r1, .. } => (vec![-r1; n], vec![*r1; n]),
        DomainKind::Box { lo, hi } => (lo.clone(), hi.clone()),
        _ => return Err(Error::Chart("zero counting needs a box chart or a disk".into())),
    };
    let per = 9usize;
    let total = per.pow(n as u32);
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    for idx in 0..total {
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let c = (idx / per.pow(i as u32)) % per;
                lo[i] + (hi[i] - lo[i]) * (c as f64 + 0.5) / per as f64
            })
            .collect();
        let mut ok = false;
        for _ in 0..60 {
            let (v, j) = section_jacobian(s, &x);
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !norm.is_finite() {
                break;
            }
            if norm < 1e-14 {
                ok = true;
                break;
            }
            let Some(step) = j.lu().solve(&nalgebra::DVector::from_vec(v)) else {
                break;
            };
            let mut lambda = 1.0;
            let mut next = x.clone();
            while lambda > 1e-4 {
                next = x.iter().zip(step.iter()).map(|(a, d)| a - lambda * d).collect();
                let (w, _) = section_jacobian(s, &next);
                if w.iter().map(|c| c * c).sum::<f64>().sqrt() < norm {
                    break;
                }
                lambda *= 0.5;
            }
            x = next;
        }
        if ok
            && !zeros
                .iter()
                .any(|z| z.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-7)
        {
            zeros.push(x);
        }
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(zeros)
}

/// The zero-set pair `([s⁻¹(0)], 0)` of a count, as a relative 0-current.
pub fn zero_set_current(z: &ZeroCount) -> CurrentPair {
    CurrentPair {
        t: CurrentEvaluator::points(z.zeros.clone()),
        s: CurrentEvaluator::zero(-1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn disk() -> ChartDomain {
        ChartDomain::disk(2).with_order(24)
    }

    #[test]
    fn pair_d_of_closed_form() {
        // (dx ∧ dy, 0) ↦ (0, dx ∧ dy)
        let w = DifferentialForm::dx(2, 0).wedge(&DifferentialForm::dx(2, 1)).unwrap();
        let p = pair_d(&FormPair::interior(w));
        assert_eq!(p.omega.degree(), 3);
        assert_eq!(p.gamma.unwrap().values(&[0.2, 0.1]), vec![1.0]);
    }

    #[test]
    fn pair_d_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..=2 {
            let p = FormPair::random(2, k, &mut rng);
            let dd = pair_d(&pair_d(&p));
            assert!(pair_closedness(&pair_d(&p), &disk(), 5, &mut rng).unwrap() < 1e-10);
            let g = dd.gamma.unwrap();
            assert!(g.eval(&[0.3, -0.4], 0).max_abs() < 1e-12);
        }
    }

    #[test]
    fn lefschetz_interior_pair_is_plain_integral() {
        let one = DifferentialForm::constant(2, 1.0);
        let area = DifferentialForm::dx(2, 0).wedge(&DifferentialForm::dx(2, 1)).unwrap();
        let v = lefschetz_i(&FormPair::interior(area), &one, &disk()).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn weak_sign_identities_on_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 0..=1 {
            let p = FormPair::random(2, k, &mut rng);
            let eta = random_form(2, 1 - k, &mut rng);
            let r = lefschetz_i_residual(&p, &eta, &disk()).unwrap();
            assert!(r < 1e-9, "k={k} residual {r:e}");
            assert!(lefschetz_ii_residual(&eta, &p, &disk()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn exact_sequence_maps_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_form(2, 1, &mut rng);
        let lhs = pair_d(&map_a(&g));
        let rhs = map_a(&g.d());
        let x = [0.3, 0.2];
        let diff = lhs.gamma.unwrap().sub(&rhs.gamma.unwrap()).unwrap();
        assert!(diff.eval(&x, 0).max_abs() < 1e-14);
        assert!(lhs.omega.eval(&x, 0).max_abs() < 1e-14);
        let p = FormPair::random(2, 1, &mut rng);
        let s = map_b(&pair_d(&p)).add(&map_b(&p).d()).unwrap();
        assert!(s.eval(&x, 0).max_abs() < 1e-14);
    }

    #[test]
    fn sign_constant_table() {
        assert_eq!(SignConstants::new(4, 1).tau(), 2);
        assert_eq!(SignConstants::new(4, 1).upsilon(), 3);
        assert_eq!(SignConstants::new(5, 2).upsilon_sign(), 1);
        assert_eq!(SignConstants::new(3, 1).tau_sign(), -1);
    }

    #[test]
    fn zero_counts_of_model_sections() {
        let id = signed_zero_count(|x| x.to_vec(), &disk(), None).unwrap();
        assert_eq!(id.total, 1);
        let refl = signed_zero_count(|x| vec![x[0].clone(), -&x[1]], &disk(), None).unwrap();
        assert_eq!(refl.total, -1);
        let sq = |x: &[Jet]| vec![&x[0] * &x[0] - &x[1] * &x[1] - 0.25, &x[0] * &x[1] * 2.0];
        let two = signed_zero_count(sq, &disk(), None).unwrap();
        assert_eq!(two.total, 2);
        assert_eq!(two.zeros.len(), 2);
        assert_abs_diff_eq!(two.zeros[0].0[0], -0.5, epsilon = 1e-12);
        let given = signed_zero_count(sq, &disk(), Some(&[vec![0.5, 0.0], vec![-0.5, 0.0]])).unwrap();
        assert_eq!(given.total, 2);
    }

    #[test]
    fn zero_count_errors() {
        let tangent = signed_zero_count(|x| vec![&x[0] * &x[0], x[1].clone()], &disk(), Some(&[vec![0.0, 0.0]]));
        assert!(matches!(tangent, Err(Error::Transversality(_))));
        let edge = signed_zero_count(|x| vec![&x[0] - 1.0, x[1].clone()], &disk(), Some(&[vec![1.0, 0.0]]));
        assert!(matches!(edge, Err(Error::BoundaryZero(_))));
    }

    #[test]
    fn homotopy_at_zero_time_vanishes() {
        let h = radial_flow_scenario(0.0, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = FormPair::random(3, 1, &mut rng);
        let eta = random_form(3, 2, &mut rng);
        assert_eq!(homotopy_ti(&h, &p, &eta).unwrap(), 0.0);
        assert_eq!(
            homotopy_tii(&h, &eta, &FormPair::random(3, 1, &mut rng)).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn incompatible_homotopy_is_rejected() {
        let base = ChartDomain::product(vec![ChartDomain::interval(-1.0, 1.0), ChartDomain::sphere(1)]);
        let phi = SmoothMap::new(4, 3, |x| vec![&x[1] * 0.5, x[2].clone(), x[3].clone()]);
        let r = Homotopy::new(phi, base, 1.0, |y| 1.0 - y[0] * y[0]);
        assert!(matches!(r, Err(Error::Homotopy(_))));
    }

    #[test]
    fn homotopy_identities_on_radial_flow() {
        let h = radial_flow_scenario(0.8, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=2 {
            let p = FormPair::random(3, k, &mut rng);
            let eta = random_form(3, 2 - k, &mut rng);
            let (a, b) = homotopy_first_sides(&h, &p, &eta).unwrap();
            assert!((a - b).abs() < 1e-8, "first homotopy identity, k={k}: {a} vs {b}");
        }
        for k in 0..=1 {
            let eta = random_form(3, k, &mut rng);
            let q = FormPair::random(3, 2 - k, &mut rng);
            // The identity closes with (−1)^{n−k+1} in front of 𝒯^II(dη).
            assert!(homotopy_second_residual(&h, &eta, &q, true).unwrap() < 1e-7);
            assert!(homotopy_second_residual(&h, &eta, &q, false).unwrap() > 1e-3);
        }
    }
}
