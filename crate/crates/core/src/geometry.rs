//! Charted domains, orientation bookkeeping, tensor Gauss–Legendre
//! quadrature, boundary enumeration and fiber integration.
//!
//! Orientation conventions:
//! - boundaries are oriented outer normal first;
//! - products carry the product orientation, so a face `A × ∂B` of `A × B`
//!   enters Stokes' formula with the sign `(-1)^{dim A}`;
//! - fiber integration puts the fiber coordinates first:
//!   `∫_F du_1 ∧ … ∧ du_f ∧ β = (∫_F du) β`, which gives the projection formula
//!   `∫_E ω ∧ π*η = ∫_B (∫_{E/B} ω) ∧ η` for the fiber-first orientation of `E`.

use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, Local, SmoothMap};
use crate::jet::Jet;
use rand::Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<RwLock<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let c = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(r) = c.read().unwrap().get(&n) {
        return r;
    }
    let mut w = c.write().unwrap();
    w.entry(n).or_insert_with(|| {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut x = vec![0.0; n];
        let mut wt = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { z } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
                let dz = pn / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            let wi = 2.0 / ((1.0 - z * z) * dp * dp);
            wt[i] = wi;
            wt[n - 1 - i] = wi;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
        Box::leak(Box::new((x, wt)))
    })
}

/// A quadrature rule on a reference region: flattened nodes and weights.
#[derive(Clone, Debug)]
pub struct Rule {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    /// Gauss–Legendre rule on `[a, b]`.
    pub fn interval(a: f64, b: f64, order: usize) -> Rule {
        let (x, w) = gauss_legendre(order);
        let h = 0.5 * (b - a);
        Rule {
            dim: 1,
            nodes: x.iter().map(|t| a + h * (t + 1.0)).collect(),
            weights: w.iter().map(|v| v * h).collect(),
        }
    }

    /// Single node with weight one in dimension zero.
    pub fn point() -> Rule {
        Rule {
            dim: 0,
            nodes: vec![],
            weights: vec![1.0],
        }
    }

    /// Tensor product, nodes of `self` first.
    pub fn tensor(&self, o: &Rule) -> Rule {
        let mut nodes = Vec::with_capacity(self.len() * o.len() * (self.dim + o.dim));
        let mut weights = Vec::with_capacity(self.len() * o.len());
        for i in 0..self.len() {
            for j in 0..o.len() {
                nodes.extend_from_slice(self.node(i));
                nodes.extend_from_slice(o.node(j));
                weights.push(self.weights[i] * o.weights[j]);
            }
        }
        Rule {
            dim: self.dim + o.dim,
            nodes,
            weights,
        }
    }

    /// Collapsed-square rule on the simplex `{s, t ≥ 0, s + t ≤ 1}`.
    pub fn triangle(order: usize) -> Rule {
        let sq = Rule::interval(0.0, 1.0, order).tensor(&Rule::interval(0.0, 1.0, order));
        let mut nodes = Vec::with_capacity(sq.nodes.len());
        let mut weights = Vec::with_capacity(sq.len());
        for i in 0..sq.len() {
            let (u, v) = (sq.node(i)[0], sq.node(i)[1]);
            nodes.push(u * (1.0 - v));
            nodes.push(u * v);
            weights.push(sq.weights[i] * u);
        }
        Rule { dim: 2, nodes, weights }
    }
}

/// Shape of a chart domain's reference region.
#[derive(Clone, Debug)]
pub enum DomainKind {
    /// Coordinate box `[lo_1, hi_1] × … × [lo_n, hi_n]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Round sphere `S^n` in iterated polar angles
    /// `θ_1, …, θ_{n-1} ∈ [0, π]`, `φ ∈ [0, 2π]`.
    Sphere { n: usize },
    /// Ball shell `r0 ≤ |x| ≤ r1` in `ℝ^n` in polar coordinates `(r, angles)`.
    Disk { n: usize, r0: f64, r1: f64 },
    /// Standard simplex `Δ^m`, `m ∈ {1, 2}`, in its own coordinates.
    Simplex { m: usize },
    /// Product of domains with the product orientation.
    Product(Vec<ChartDomain>),
    /// A single point.
    Point,
}

/// An oriented chart region with quadrature and an optional
/// parametrization into ambient coordinates.
#[derive(Clone, Debug)]
pub struct ChartDomain {
    pub kind: DomainKind,
    pub dim: usize,
    /// Multiplier applied to reference-coordinate integrals.
    pub orientation: f64,
    pub order: usize,
    pub param: Option<SmoothMap>,
}

/// A boundary face together with the sign it carries in Stokes' formula.
#[derive(Clone, Debug)]
pub struct Face {
    pub domain: ChartDomain,
    pub sign: f64,
}

fn sphere_embedding(n: usize) -> SmoothMap {
    SmoothMap::new(n, n + 1, sphere_point)
}

/// Iterated polar coordinates of the unit sphere `S^n`, `n = a.len()`.
pub fn sphere_point(a: &[Jet]) -> Vec<Jet> {
    let n = a.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut prod = a[0].cst(1.0);
    for (i, ang) in a.iter().enumerate() {
        if i + 1 < n {
            out.push(&prod * &ang.cos());
            prod = &prod * &ang.sin();
        } else {
            out.push(&prod * &ang.cos());
            out.push(&prod * &ang.sin());
        }
    }
    out
}

fn sphere_box(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![0.0; n];
    let mut hi = vec![PI; n];
    lo[n - 1] = 0.0;
    hi[n - 1] = 2.0 * PI;
    (lo, hi)
}

fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Sign making the polar sphere chart outward-normal-first oriented.
fn sphere_chart_sign(n: usize) -> f64 {
    let emb = sphere_embedding(n);
    let p: Vec<f64> = (0..n).map(|i| if i + 1 < n { 1.1 } else { 0.7 }).collect();
    let x = emb.eval(&p);
    let j = emb.jacobian(&p);
    let mut m = vec![x];
    for c in 0..n {
        m.push(j.iter().map(|row| row[c]).collect());
    }
    det(m).signum()
}

impl ChartDomain {
    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> ChartDomain {
        assert_eq!(lo.len(), hi.len());
        ChartDomain {
            dim: lo.len(),
            kind: DomainKind::Box { lo, hi },
            orientation: 1.0,
            order: crate::tolerances::DEFAULT_ORDER,
            param: None,
        }
    }

    pub fn interval(a: f64, b: f64) -> ChartDomain {
        ChartDomain::boxed(vec![a], vec![b])
    }

    pub fn unit_cube(n: usize) -> ChartDomain {
        ChartDomain::boxed(vec![0.0; n], vec![1.0; n])
    }

    /// Unit sphere `S^n ⊂ ℝ^{n+1}` with the outward-first orientation.
    pub fn sphere(n: usize) -> ChartDomain {
        assert!(n >= 1);
        ChartDomain {
            kind: DomainKind::Sphere { n },
            dim: n,
            orientation: sphere_chart_sign(n),
            order: crate::tolerances::DEFAULT_ORDER,
            param: Some(sphere_embedding(n)),
        }
    }

    /// Closed unit ball `D^n ⊂ ℝ^n` in polar coordinates.
    pub fn disk(n: usize) -> ChartDomain {
        ChartDomain::shell(n, 0.0, 1.0)
    }

    /// Shell `r0 ≤ |x| ≤ r1` in `ℝ^n`, `n ≥ 2`.
    pub fn shell(n: usize, r0: f64, r1: f64) -> ChartDomain {
        assert!(n >= 2, "use an interval for one-dimensional disks");
        let param = SmoothMap::new(n, n, move |p| {
            let s = sphere_point(&p[1..]);
            s.iter().map(|c| c * &p[0]).collect()
        });
        ChartDomain {
            kind: DomainKind::Disk { n, r0, r1 },
            dim: n,
            orientation: sphere_chart_sign(n - 1),
            order: crate::tolerances::DEFAULT_ORDER,
            param: Some(param),
        }
    }

    pub fn simplex(m: usize) -> ChartDomain {
        assert!(m == 1 || m == 2, "simplices of dimension 1 and 2 only");
        ChartDomain {
            kind: DomainKind::Simplex { m },
            dim: m,
            orientation: 1.0,
            order: crate::tolerances::TRANSGRESSION_ORDER,
            param: None,
        }
    }

    /// The single point `value` of an ambient space.
    pub fn point(value: Vec<f64>) -> ChartDomain {
        ChartDomain {
            kind: DomainKind::Point,
            dim: 0,
            orientation: 1.0,
            order: 1,
            param: Some(SmoothMap::constant(0, value)),
        }
    }

    /// Product with the product orientation; coordinates concatenated.
    pub fn product(factors: Vec<ChartDomain>) -> ChartDomain {
        let dim = factors.iter().map(|f| f.dim).sum();
        let orientation = factors.iter().map(|f| f.orientation).product();
        let order = factors.iter().map(|f| f.order).max().unwrap_or(1);
        let param = if factors.iter().any(|f| f.param.is_some()) {
            let maps: Vec<SmoothMap> = factors
                .iter()
                .map(|f| f.param.clone().unwrap_or_else(|| SmoothMap::identity(f.dim)))
                .collect();
            let mut m = maps[0].clone();
            for x in &maps[1..] {
                m = SmoothMap::product(&m, x);
            }
            Some(m)
        } else {
            None
        };
        ChartDomain {
            kind: DomainKind::Product(factors),
            dim,
            orientation,
            order,
            param,
        }
    }

    /// Same region, integrated in reference coordinates.
    pub fn without_param(mut self) -> ChartDomain {
        self.param = None;
        self
    }

    pub fn with_param(mut self, param: SmoothMap) -> ChartDomain {
        assert_eq!(param.src, self.dim);
        self.param = Some(param);
        self
    }

    pub fn with_order(mut self, order: usize) -> ChartDomain {
        self.order = order;
        if let DomainKind::Product(fs) = &mut self.kind {
            for f in fs.iter_mut() {
                *f = f.clone().with_order(order);
            }
        }
        self
    }

    pub fn reversed(mut self) -> ChartDomain {
        self.orientation = -self.orientation;
        self
    }

    /// Dimension of the coordinates forms on this domain are written in.
    pub fn ambient_dim(&self) -> usize {
        self.param.as_ref().map_or(self.dim, |p| p.dst)
    }

    /// Reference-coordinate bounds (for boxes, polar charts and simplices).
    pub fn reference_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DomainKind::Box { lo, hi } => (lo.clone(), hi.clone()),
            DomainKind::Sphere { n } => sphere_box(*n),
            DomainKind::Disk { n, r0, r1 } => {
                let (mut lo, mut hi) = sphere_box(n - 1);
                lo.insert(0, *r0);
                hi.insert(0, *r1);
                (lo, hi)
            }
            DomainKind::Simplex { m } => (vec![0.0; *m], vec![1.0; *m]),
            DomainKind::Product(fs) => {
                let mut lo = vec![];
                let mut hi = vec![];
                for f in fs {
                    let (a, b) = f.reference_box();
                    lo.extend(a);
                    hi.extend(b);
                }
                (lo, hi)
            }
            DomainKind::Point => (vec![], vec![]),
        }
    }

    /// Quadrature rule in reference coordinates (weights include the
    /// collapsed-square Jacobian on simplices, nothing else).
    pub fn rule(&self) -> Rule {
        match &self.kind {
            DomainKind::Box { .. } | DomainKind::Sphere { .. } | DomainKind::Disk { .. } => {
                let (lo, hi) = self.reference_box();
                let mut r = Rule::point();
                for (a, b) in lo.iter().zip(&hi) {
                    r = r.tensor(&Rule::interval(*a, *b, self.order));
                }
                r
            }
            DomainKind::Simplex { m: 1 } => Rule::interval(0.0, 1.0, self.order),
            DomainKind::Simplex { .. } => Rule::triangle(self.order),
            DomainKind::Product(fs) => {
                let mut r = Rule::point();
                for f in fs {
                    r = r.tensor(&f.rule());
                }
                r
            }
            DomainKind::Point => Rule::point(),
        }
    }

    /// Uniform random point of the reference region, kept `margin` (relative)
    /// away from its faces.
    pub fn sample<R: Rng>(&self, rng: &mut R, margin: f64) -> Vec<f64> {
        match &self.kind {
            DomainKind::Simplex { m: 2 } => loop {
                let s = rng.gen_range(margin..1.0 - margin);
                let t = rng.gen_range(margin..1.0 - margin);
                if s + t <= 1.0 - margin {
                    return vec![s, t];
                }
            },
            DomainKind::Product(fs) => fs.iter().flat_map(|f| f.sample(rng, margin)).collect(),
            _ => {
                let (lo, hi) = self.reference_box();
                lo.iter()
                    .zip(&hi)
                    .map(|(a, b)| {
                        let h = (b - a) * margin;
                        rng.gen_range(a + h..b - h)
                    })
                    .collect()
            }
        }
    }

    /// Boundary faces; see the module docs for the orientation rules.
    pub fn boundary_faces(&self) -> Vec<Face> {
        let wrap = |inner: SmoothMap| -> SmoothMap {
            match &self.param {
                Some(p) => p.after(&inner).expect("face parametrization"),
                None => inner,
            }
        };
        match &self.kind {
            DomainKind::Point | DomainKind::Sphere { .. } => vec![],
            DomainKind::Box { lo, hi } => {
                let n = lo.len();
                let mut faces = Vec::new();
                for i in 0..n {
                    let base = if i % 2 == 0 { 1.0 } else { -1.0 };
                    for (value, sign) in [(hi[i], base), (lo[i], -base)] {
                        let inner = SmoothMap::from_germ(n - 1, n, move |p, k| {
                            let mut v = Jet::vars(p, k);
                            v.insert(i, Jet::constant(n - 1, k, value));
                            v
                        });
                        let domain = if n == 1 {
                            let amb = wrap(inner).eval(&[]);
                            let mut d = ChartDomain::point(amb);
                            d.orientation = sign * self.orientation;
                            d
                        } else {
                            let mut l = lo.clone();
                            let mut h = hi.clone();
                            l.remove(i);
                            h.remove(i);
                            let mut d = ChartDomain::boxed(l, h).with_param(wrap(inner));
                            d.orientation = sign * self.orientation;
                            d.order = self.order;
                            d
                        };
                        faces.push(Face { domain, sign: 1.0 });
                    }
                }
                faces
            }
            DomainKind::Disk { n, r0, r1 } => {
                let n = *n;
                let mut faces = Vec::new();
                for (r, sign) in [(*r1, 1.0), (*r0, -1.0)] {
                    if r == 0.0 {
                        continue;
                    }
                    let inner = SmoothMap::from_germ(n - 1, n, move |p, k| {
                        let mut v = Jet::vars(p, k);
                        v.insert(0, Jet::constant(n - 1, k, r));
                        v
                    });
                    let mut d = ChartDomain::sphere(n - 1).without_param();
                    d = d.with_param(wrap(inner));
                    d.orientation = sign * self.orientation;
                    d.order = self.order;
                    faces.push(Face { domain: d, sign: 1.0 });
                }
                faces
            }
            DomainKind::Simplex { m: 1 } => {
                let mut faces = Vec::new();
                for (v, s) in [(1.0, 1.0), (0.0, -1.0)] {
                    let mut d = ChartDomain::point(wrap(SmoothMap::constant(0, vec![v])).eval(&[]));
                    d.orientation = s * self.orientation;
                    faces.push(Face { domain: d, sign: 1.0 });
                }
                faces
            }
            DomainKind::Simplex { .. } => {
                let edges: [fn(&Jet) -> Vec<Jet>; 3] = [
                    |u| vec![u.clone(), u.zero_like()],
                    |u| vec![1.0 - u, u.clone()],
                    |u| vec![u.zero_like(), 1.0 - u],
                ];
                edges
                    .iter()
                    .map(|e| {
                        let e = *e;
                        let inner = SmoothMap::new(1, 2, move |u| e(&u[0]));
                        let mut d = ChartDomain::interval(0.0, 1.0).with_param(wrap(inner));
                        d.orientation = self.orientation;
                        d.order = self.order;
                        Face { domain: d, sign: 1.0 }
                    })
                    .collect()
            }
            DomainKind::Product(fs) => {
                let mut faces = Vec::new();
                let mut before = 0usize;
                for (j, f) in fs.iter().enumerate() {
                    let sgn = if before.is_multiple_of(2) { 1.0 } else { -1.0 };
                    for face in f.boundary_faces() {
                        let mut parts = fs.clone();
                        parts[j] = face.domain.clone();
                        let mut d = ChartDomain::product(parts);
                        d.orientation *= self.orientation / fs.iter().map(|x| x.orientation).product::<f64>();
                        faces.push(Face {
                            domain: d,
                            sign: sgn * face.sign,
                        });
                    }
                    before += f.dim;
                }
                faces
            }
        }
    }
}

fn check_values(l: &Local, what: &str) -> Result<()> {
    if l.is_finite() {
        Ok(())
    } else {
        Err(Error::Numerics(format!("non-finite coefficient in {what}")))
    }
}

/// Orientation-signed quadrature of a top-degree form over a domain.
pub fn integrate(w: &DifferentialForm, d: &ChartDomain) -> Result<f64> {
    if w.degree() != d.dim {
        return Err(Error::Degree(format!(
            "integrate: {}-form over a {}-dimensional domain",
            w.degree(),
            d.dim
        )));
    }
    if w.dim() != d.ambient_dim() {
        return Err(Error::Chart(format!(
            "integrate: form on {} coordinates, domain ambient dimension {}",
            w.dim(),
            d.ambient_dim()
        )));
    }
    let pulled = match &d.param {
        Some(p) => w.pullback(p)?,
        None => w.clone(),
    };
    let rule = d.rule();
    let eval = |i: usize| -> Result<f64> {
        let l = pulled.eval(rule.node(i), 0);
        check_values(&l, "integrate")?;
        Ok(l.c[0].value() * rule.weights[i])
    };
    let total: f64 = if rule.len() > 512 {
        (0..rule.len())
            .into_par_iter()
            .map(eval)
            .collect::<Result<Vec<f64>>>()?
            .iter()
            .sum()
    } else {
        let mut s = 0.0;
        for i in 0..rule.len() {
            s += eval(i)?;
        }
        s
    };
    Ok(total * d.orientation)
}

/// Enumerate boundary faces of a domain.
pub fn boundary_faces(d: &ChartDomain) -> Vec<Face> {
    d.boundary_faces()
}

/// `|∫_D dα − Σ_faces sign ∫_face α|`. With `cylinder` set, `D` must be a
/// product `[0, t] × B` and the lateral face enters with the minus sign of
/// the product orientation.
pub fn stokes_residual(alpha: &DifferentialForm, d: &ChartDomain, cylinder: bool) -> Result<f64> {
    if alpha.degree() + 1 != d.dim {
        return Err(Error::Degree(format!(
            "stokes_residual: {}-form on a {}-dimensional domain",
            alpha.degree(),
            d.dim
        )));
    }
    if cylinder {
        match &d.kind {
            DomainKind::Product(fs) if fs.len() == 2 && fs[0].dim == 1 => {}
            _ => {
                return Err(Error::Chart(
                    "stokes_residual: cylinder flag needs a product [0,t] × B".into(),
                ))
            }
        }
    }
    let lhs = integrate(&alpha.d(), d)?;
    let mut rhs = 0.0;
    for f in d.boundary_faces() {
        rhs += f.sign * integrate(alpha, &f.domain)?;
    }
    Ok((lhs - rhs).abs())
}

/// Integrate over the leading `rule.dim` coordinates, fiber first.
pub fn fiber_integrate_leading(w: &DifferentialForm, rule: Rule, orientation: f64) -> DifferentialForm {
    let f = rule.dim;
    let dim = w.dim() - f;
    let deg = w.degree().saturating_sub(f);
    let w = w.clone();
    DifferentialForm::from_local(dim, deg, move |x, k| {
        let mut acc = Local::zero(dim, deg, k);
        let mut q = vec![0.0; f + dim];
        q[f..].copy_from_slice(x);
        for i in 0..rule.len() {
            q[..f].copy_from_slice(rule.node(i));
            let l = w.eval(&q, k).fiber_part(f);
            acc = acc.add(&l.scale(rule.weights[i] * orientation));
        }
        acc
    })
}

/// A product-like bundle `fiber × base` with fiber coordinates first.
#[derive(Clone, Debug)]
pub struct FiberBundleDomain {
    pub base: ChartDomain,
    pub fiber: ChartDomain,
}

/// Result of integrating over the fiber.
#[derive(Clone, Debug)]
pub enum Pushforward {
    Form(DifferentialForm),
    /// The input degree was below the fiber dimension; the nominal degree of
    /// the (zero) result is negative.
    ZeroForm {
        nominal_degree: i64,
        base_dim: usize,
    },
}

impl Pushforward {
    /// The pushed-forward form, or the zero 0-form when the degree was too low.
    pub fn form(&self) -> DifferentialForm {
        match self {
            Pushforward::Form(f) => f.clone(),
            Pushforward::ZeroForm { base_dim, .. } => DifferentialForm::zero(*base_dim, 0),
        }
    }

    pub fn is_zero_form(&self) -> bool {
        matches!(self, Pushforward::ZeroForm { .. })
    }
}

impl FiberBundleDomain {
    pub fn new(fiber: ChartDomain, base: ChartDomain) -> FiberBundleDomain {
        FiberBundleDomain { base, fiber }
    }

    /// Coordinates of forms on the total space: fiber ambient, then base.
    pub fn total_dim(&self) -> usize {
        self.fiber.ambient_dim() + self.base.ambient_dim()
    }

    /// The total space as a product chart.
    pub fn total(&self) -> ChartDomain {
        ChartDomain::product(vec![self.fiber.clone(), self.base.clone()])
    }

    /// Coordinate projection of the total space onto the base.
    pub fn projection(&self) -> SmoothMap {
        let f = self.fiber.ambient_dim();
        let b = self.base.ambient_dim();
        SmoothMap::projection(f + b, (f..f + b).collect())
    }
}

/// Integrate a total-space form over the fibers; the result lives on the
/// base ambient coordinates.
pub fn fiber_integrate(w: &DifferentialForm, fb: &FiberBundleDomain) -> Result<Pushforward> {
    let b = fb.base.ambient_dim();
    if w.dim() != fb.total_dim() {
        return Err(Error::Chart(format!(
            "fiber_integrate: form on {} coordinates, bundle has {}",
            w.dim(),
            fb.total_dim()
        )));
    }
    if w.degree() < fb.fiber.dim {
        return Ok(Pushforward::ZeroForm {
            nominal_degree: w.degree() as i64 - fb.fiber.dim as i64,
            base_dim: b,
        });
    }
    let pulled = match &fb.fiber.param {
        Some(p) => w.pullback(&SmoothMap::product(p, &SmoothMap::identity(b)))?,
        None => w.clone(),
    };
    Ok(Pushforward::Form(fiber_integrate_leading(
        &pulled,
        fb.fiber.rule(),
        fb.fiber.orientation,
    )))
}
