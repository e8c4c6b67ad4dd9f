//! Curvature, the Pfaffian form, transgressions along paths and simplices of
//! connections, loop transgressions and symmetry checks.
//!
//! A family of connections over a parameter space `U` (an interval, the
//! simplex `Δ²`, a circle or a disk) is written on `U × B` with the parameter
//! coordinates first and no parameter-direction components. Integrating its
//! Pfaffian over `U` with the fiber-first convention gives
//! `d TPf(∇¹,∇²) = Pf(∇²) − Pf(∇¹)` and
//! `−d TPf(∇¹,∇²,∇³) = TPf(∇¹,∇²) + TPf(∇²,∇³) + TPf(∇³,∇¹)`.

use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, Local, LocalMatrix, MatrixForm, SmoothMap};
use crate::geometry::Rule;
use crate::jet::Jet;
use crate::tolerances;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// `Pf(F / 2π)`: the only place the Euler-form normalization lives.
pub const PF_NORMALIZATION: f64 = 1.0 / (2.0 * PI);

/// Metric connection `d + A` on a trivialized bundle of rank `m`.
#[derive(Clone, Debug)]
pub struct Connection {
    pub rank: usize,
    pub potential: MatrixForm,
    pub label: String,
}

/// `F = dA + A ∧ A` from a potential jet of order `k + 1`.
pub fn curvature_local(a: &LocalMatrix) -> LocalMatrix {
    let da = a.d();
    let k = da.order();
    da.add(&a.truncate(k).wedge(&a.truncate(k)))
}

impl Connection {
    pub fn new(potential: MatrixForm, label: &str) -> Result<Connection> {
        if potential.degree() != 1 {
            return Err(Error::Degree(format!(
                "connection potential must be a 1-form, got degree {}",
                potential.degree()
            )));
        }
        Ok(Connection {
            rank: potential.m,
            potential,
            label: label.to_string(),
        })
    }

    /// Potential `Σ_i M_i dx_i` from one matrix per coordinate.
    pub fn from_jets<F>(rank: usize, dim: usize, label: &str, f: F) -> Connection
    where
        F: Fn(&[Jet]) -> Vec<Vec<Jet>> + Send + Sync + 'static,
    {
        Connection {
            rank,
            potential: MatrixForm::one_form(rank, dim, f),
            label: label.to_string(),
        }
    }

    pub fn trivial(rank: usize, dim: usize) -> Connection {
        Connection {
            rank,
            potential: MatrixForm::zero(rank, dim, 1),
            label: "d".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn with_label(mut self, label: &str) -> Connection {
        self.label = label.to_string();
        self
    }

    /// Largest `|A + Aᵀ|` over the points; errors above `tol`.
    pub fn check_skew(&self, points: &[Vec<f64>], tol: f64) -> Result<f64> {
        let d = self.potential.skew_defect(points);
        if d > tol {
            return Err(Error::Consistency(format!(
                "connection {} is not metric: skew defect {d:e}",
                self.label
            )));
        }
        Ok(d)
    }

    pub fn curvature(&self) -> MatrixForm {
        let a = self.potential.clone();
        MatrixForm::from_local(self.rank, self.dim(), 2, move |p, k| curvature_local(&a.eval(p, k + 1)))
    }

    pub fn pullback(&self, f: &SmoothMap) -> Result<Connection> {
        Ok(Connection {
            rank: self.rank,
            potential: self.potential.pullback(f)?,
            label: format!("pullback of {}", self.label),
        })
    }

    /// Gauge transform by an orthogonal matrix function `g`:
    /// potential `gᵀ A g + gᵀ dg`.
    pub fn gauge(&self, g: &MatrixForm) -> Result<Connection> {
        if g.m != self.rank || g.degree() != 0 || g.dim() != self.dim() {
            return Err(Error::Shape("gauge: incompatible transformation".into()));
        }
        let (a, g) = (self.potential.clone(), g.clone());
        let m = self.rank;
        let dim = self.dim();
        Ok(Connection {
            rank: m,
            potential: MatrixForm::from_local(m, dim, 1, move |p, k| {
                let gl = g.eval(p, k + 1);
                let gt = gl.transpose();
                let al = a.eval(p, k);
                gt.truncate(k)
                    .wedge(&al)
                    .wedge(&gl.truncate(k))
                    .add(&gt.truncate(k).wedge(&gl.d()))
            }),
            label: format!("gauge of {}", self.label),
        })
    }
}

/// Curvature of a connection.
pub fn curvature(c: &Connection) -> MatrixForm {
    c.curvature()
}

fn pf_rec(f: &LocalMatrix, idx: &[usize]) -> Local {
    if idx.len() == 2 {
        return f.get(idx[0], idx[1]).clone();
    }
    let first = idx[0];
    let mut acc: Option<Local> = None;
    for (j, &b) in idx.iter().enumerate().skip(1) {
        let e = f.get(first, b);
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != b).collect();
        let mut term = e.wedge(&pf_rec(f, &rest));
        // position j (0-based) in the list: sign (-1)^(j+1)
        if j % 2 == 0 {
            term = term.scale(-1.0);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap_or_else(|| {
        let e = f.get(0, 0);
        Local::zero(e.dim, e.degree * idx.len() / 2, e.order)
    })
}

/// Pfaffian of a skew matrix of even-degree forms at a point, as a sum over
/// perfect matchings.
pub fn pfaffian_local(f: &LocalMatrix) -> Local {
    let idx: Vec<usize> = (0..f.m).collect();
    if f.m == 0 {
        return Local::function(Jet::constant(f.dim(), f.order(), 1.0));
    }
    pf_rec(f, &idx)
}

/// Pfaffian form of a skew matrix of even-degree forms.
pub fn pfaffian(mf: &MatrixForm) -> Result<DifferentialForm> {
    if mf.m % 2 == 1 {
        return Err(Error::Shape(format!("Pfaffian of an odd {}x{} matrix", mf.m, mf.m)));
    }
    if mf.degree() % 2 == 1 {
        return Err(Error::Degree("Pfaffian needs even-degree entries".into()));
    }
    let a = mf.clone();
    Ok(DifferentialForm::from_local(
        mf.dim(),
        mf.degree() * mf.m / 2,
        move |p, k| pfaffian_local(&a.eval(p, k)),
    ))
}

/// `Pf(F / 2π)` at a point from a potential jet of order `k + 1`.
pub fn pf_local_from_potential(a: &LocalMatrix) -> Local {
    pfaffian_local(&curvature_local(a).scale(PF_NORMALIZATION))
}

/// The Euler form `Pf(F(∇) / 2π)`.
pub fn pf_form(c: &Connection) -> Result<DifferentialForm> {
    if c.rank % 2 == 1 {
        return Err(Error::Rank(format!("Pfaffian of an odd rank {} bundle", c.rank)));
    }
    let a = c.potential.clone();
    Ok(DifferentialForm::from_local(c.dim(), c.rank, move |p, k| {
        pf_local_from_potential(&a.eval(p, k + 1))
    }))
}

type FamilyFn = dyn Fn(&[f64], &[f64], usize) -> LocalMatrix + Send + Sync;

/// Connections `∇^u` on a bundle over `B`, parametrized by `u` in a
/// parameter chart, assembled into one potential on `U × B` with no
/// `du` components.
#[derive(Clone)]
pub struct ConnectionFamily {
    pub rank: usize,
    pub params: usize,
    pub base_dim: usize,
    f: Arc<FamilyFn>,
    // Potentials of an affine family, so a parameter sweep at one point
    // evaluates each of them once.
    affine: Option<Arc<Vec<MatrixForm>>>,
}

impl fmt::Debug for ConnectionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ConnectionFamily(rank={}, params={}, base={})",
            self.rank, self.params, self.base_dim
        )
    }
}

impl ConnectionFamily {
    /// From a closure returning the potential jet on `params + base_dim`
    /// variables at `(u, x)` and the requested order.
    pub fn from_local<F>(rank: usize, params: usize, base_dim: usize, f: F) -> ConnectionFamily
    where
        F: Fn(&[f64], &[f64], usize) -> LocalMatrix + Send + Sync + 'static,
    {
        ConnectionFamily {
            rank,
            params,
            base_dim,
            f: Arc::new(f),
            affine: None,
        }
    }

    /// From a closure over parameter and base jets returning the base
    /// components `M_i(u, x)` of the potential.
    pub fn from_jets<F>(rank: usize, params: usize, base_dim: usize, f: F) -> ConnectionFamily
    where
        F: Fn(&[Jet], &[Jet]) -> Vec<Vec<Jet>> + Send + Sync + 'static,
    {
        ConnectionFamily::from_local(rank, params, base_dim, move |u, x, k| {
            let mut q = u.to_vec();
            q.extend_from_slice(x);
            let v = Jet::vars(&q, k);
            let comps = f(&v[..params], &v[params..]);
            let dim = params + base_dim;
            let mut out = LocalMatrix::zero(rank, dim, 1, k);
            for (i, mat) in comps.iter().enumerate() {
                for (e, x) in out.e.iter_mut().zip(mat) {
                    e.c[params + i] = x.truncate(k);
                }
            }
            out
        })
    }

    /// Affine combination `A⁰ + Σ_j u_j (A^j − A⁰)` of connections.
    pub fn affine(cs: &[Connection]) -> Result<ConnectionFamily> {
        let c0 = &cs[0];
        for c in cs {
            if c.rank != c0.rank {
                return Err(Error::Shape(format!("connections of ranks {} and {}", c0.rank, c.rank)));
            }
            if c.dim() != c0.dim() {
                return Err(Error::Shape(format!(
                    "connections over charts of dimension {} and {}",
                    c0.dim(),
                    c.dim()
                )));
            }
        }
        let pots: Vec<MatrixForm> = cs.iter().map(|c| c.potential.clone()).collect();
        let params = cs.len() - 1;
        let n = c0.dim();
        let shared = Arc::new(pots.clone());
        let mut fam = ConnectionFamily::from_local(c0.rank, params, n, move |u, x, k| {
            let ls: Vec<LocalMatrix> = pots.iter().map(|a| a.eval(x, k).lift_leading(params)).collect();
            affine_combine(&ls, u, n, k)
        });
        fam.affine = Some(shared);
        Ok(fam)
    }

    /// The potential on `U × B` as a connection.
    pub fn total(&self) -> Connection {
        let fam = self.clone();
        let p = self.params;
        Connection {
            rank: self.rank,
            potential: MatrixForm::from_local(self.rank, p + self.base_dim, 1, move |q, k| {
                (fam.f)(&q[..p], &q[p..], k)
            }),
            label: "family".into(),
        }
    }

    /// The connection at a fixed parameter value, on `B`.
    pub fn slice(&self, u: &[f64]) -> Connection {
        let fam = self.clone();
        let u = u.to_vec();
        let p = self.params;
        Connection {
            rank: self.rank,
            potential: MatrixForm::from_local(self.rank, self.base_dim, 1, move |x, k| {
                let l = (fam.f)(&u, x, k);
                LocalMatrix {
                    m: l.m,
                    e: l.e.iter().map(|e| drop_params(e, p)).collect(),
                }
            }),
            label: "slice".into(),
        }
    }

    /// `Pf(F̃/2π)` on `U × B` at `(u, x)`, as a jet in all variables.
    pub fn pf_local(&self, u: &[f64], x: &[f64], k: usize) -> Local {
        pf_local_from_potential(&(self.f)(u, x, k + 1))
    }

    /// `∫_U Pf(F̃/2π)` with the given rule (weights include any Jacobian).
    pub fn fiber_integral(&self, rule: Rule, orientation: f64) -> DifferentialForm {
        let fam = self.clone();
        let p = self.params;
        let n = self.base_dim;
        let deg = self.rank.saturating_sub(p);
        DifferentialForm::from_local(n, deg, move |x, k| {
            let mut acc = Local::zero(n, deg, k);
            let lifted: Option<Vec<LocalMatrix>> = fam
                .affine
                .as_ref()
                .map(|pots| pots.iter().map(|a| a.eval(x, k + 1).lift_leading(p)).collect());
            for i in 0..rule.len() {
                let l = match &lifted {
                    Some(ls) => pf_local_from_potential(&affine_combine(ls, rule.node(i), n, k + 1)),
                    None => fam.pf_local(rule.node(i), x, k),
                }
                .fiber_part(p);
                acc = acc.add(&l.scale(rule.weights[i] * orientation));
            }
            acc
        })
    }
}

fn affine_combine(ls: &[LocalMatrix], u: &[f64], n: usize, k: usize) -> LocalMatrix {
    let params = ls.len() - 1;
    let mut acc = ls[0].clone();
    for j in 0..params {
        let t = Jet::variable(params + n, k, j, u[j]);
        acc = acc.add(&ls[j + 1].sub(&ls[0]).mul_jet(&t));
    }
    acc
}

/// Restrict a form jet on `params + n` variables to `u = const` slices:
/// drop the parameter differentials and variables.
fn drop_params(e: &Local, p: usize) -> Local {
    let n = e.dim - p;
    let mut out = Local::zero(n, e.degree, e.order);
    let src = crate::forms::basis(e.dim, e.degree);
    let dst = crate::forms::basis(n, e.degree);
    for (i, t) in src.tuples.iter().enumerate() {
        if t.iter().all(|&a| a as usize >= p) {
            let s: Vec<u8> = t.iter().map(|a| a - p as u8).collect();
            out.c[dst.index_of(&s).unwrap()] = e.c[i].drop_leading(p);
        }
    }
    out
}

/// Linear path `(1 − t)∇¹ + t∇²`, `t ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct ConnectionPath {
    pub start: Connection,
    pub end: Connection,
    pub family: ConnectionFamily,
}

impl ConnectionPath {
    pub fn new(c1: &Connection, c2: &Connection) -> Result<ConnectionPath> {
        Ok(ConnectionPath {
            start: c1.clone(),
            end: c2.clone(),
            family: ConnectionFamily::affine(&[c1.clone(), c2.clone()])?,
        })
    }

    pub fn at(&self, t: f64) -> Connection {
        self.family.slice(&[t])
    }
}

/// `TPf(∇¹, ∇²) = ∫_{[0,1]} Pf(F̃/2π)` at the default order.
pub fn transgression(c1: &Connection, c2: &Connection) -> Result<DifferentialForm> {
    transgression_with_order(c1, c2, tolerances::TRANSGRESSION_ORDER)
}

pub fn transgression_with_order(c1: &Connection, c2: &Connection, order: usize) -> Result<DifferentialForm> {
    check_even(c1.rank)?;
    let path = ConnectionPath::new(c1, c2)?;
    Ok(path.family.fiber_integral(Rule::interval(0.0, 1.0, order), 1.0))
}

fn check_even(rank: usize) -> Result<()> {
    if rank % 2 == 1 {
        Err(Error::Rank(format!("Pfaffian of an odd rank {rank} bundle")))
    } else {
        Ok(())
    }
}

/// The family `∇¹ + s(∇² − ∇¹) + t(∇³ − ∇¹)` over `Δ² × B`.
#[derive(Clone, Debug)]
pub struct SimplexConnectionFamily {
    pub connections: [Connection; 3],
    pub family: ConnectionFamily,
}

impl SimplexConnectionFamily {
    pub fn new(c1: &Connection, c2: &Connection, c3: &Connection) -> Result<SimplexConnectionFamily> {
        Ok(SimplexConnectionFamily {
            connections: [c1.clone(), c2.clone(), c3.clone()],
            family: ConnectionFamily::affine(&[c1.clone(), c2.clone(), c3.clone()])?,
        })
    }

    /// `Ω²¹ = A² − A¹`.
    pub fn omega21(&self) -> MatrixForm {
        self.connections[1]
            .potential
            .add(&self.connections[0].potential.scale(-1.0))
            .expect("same shape")
    }

    /// `Ω³¹ = A³ − A¹`.
    pub fn omega31(&self) -> MatrixForm {
        self.connections[2]
            .potential
            .add(&self.connections[0].potential.scale(-1.0))
            .expect("same shape")
    }

    /// The family restricted to edge `i` of `Δ²` (counter-clockwise from
    /// vertex 1), as a path family on `[0,1] × B`.
    pub fn edge(&self, i: usize) -> ConnectionFamily {
        let fam = self.family.clone();
        let n = fam.base_dim;
        let edge: fn(f64) -> [f64; 2] = match i {
            0 => |u| [u, 0.0],
            1 => |u| [1.0 - u, u],
            _ => |u| [0.0, 1.0 - u],
        };
        let slope: [f64; 2] = match i {
            0 => [1.0, 0.0],
            1 => [-1.0, 1.0],
            _ => [0.0, -1.0],
        };
        ConnectionFamily::from_local(fam.rank, 1, n, move |u, x, k| {
            let st = edge(u[0]);
            let l = (fam.f)(&st, x, k);
            // pull back along (u, x) ↦ (edge(u), x)
            let du = Jet::variable(1 + n, k + 1, 0, 0.0);
            let mut germ = vec![
                Jet::constant(1 + n, k + 1, st[0]) + &du * slope[0],
                Jet::constant(1 + n, k + 1, st[1]) + &du * slope[1],
            ];
            for (j, xj) in x.iter().enumerate() {
                germ.push(Jet::variable(1 + n, k + 1, 1 + j, *xj));
            }
            LocalMatrix {
                m: l.m,
                e: l.e.iter().map(|e| e.pullback(&germ)).collect(),
            }
        })
    }
}

/// `TPf(∇¹,∇²,∇³) = ∫_{Δ²} Pf(F̃/2π)` at the default order.
pub fn secondary_transgression(fam: &SimplexConnectionFamily) -> Result<DifferentialForm> {
    secondary_transgression_with_order(fam, tolerances::TRANSGRESSION_ORDER)
}

pub fn secondary_transgression_with_order(fam: &SimplexConnectionFamily, order: usize) -> Result<DifferentialForm> {
    check_even(fam.family.rank)?;
    Ok(fam.family.fiber_integral(Rule::triangle(order), 1.0))
}

/// Polar rule on the unit disk with Cartesian nodes.
pub fn disk_rule(order: usize) -> Rule {
    let pol = Rule::interval(0.0, 1.0, order).tensor(&Rule::interval(0.0, 2.0 * PI, 2 * order));
    let mut nodes = Vec::with_capacity(pol.nodes.len());
    let mut weights = Vec::with_capacity(pol.len());
    for i in 0..pol.len() {
        let (r, th) = (pol.node(i)[0], pol.node(i)[1]);
        nodes.push(r * th.cos());
        nodes.push(r * th.sin());
        weights.push(pol.weights[i] * r);
    }
    Rule { dim: 2, nodes, weights }
}

/// Loop transgression `TPf(φ) = ∫_{S¹} Pf` and the primitive
/// `P = ∫_{D²} Pf(d + φ̃)`, with `dP = −TPf(φ)`. The loop is parametrized by
/// the angle `θ ∈ [0, 2π]`, the extension by Cartesian `(p, q) ∈ D²`.
pub fn loop_transgression(
    lp: &ConnectionFamily,
    ext: &ConnectionFamily,
    order: usize,
) -> Result<(DifferentialForm, DifferentialForm)> {
    if lp.params != 1 || ext.params != 2 {
        return Err(Error::Shape(
            "loop_transgression: loop over S¹, extension over D²".into(),
        ));
    }
    if lp.rank != ext.rank || lp.base_dim != ext.base_dim {
        return Err(Error::Shape(
            "loop_transgression: loop and extension differ in shape".into(),
        ));
    }
    check_even(lp.rank)?;
    let x: Vec<f64> = (0..lp.base_dim).map(|i| 0.1 + 0.07 * i as f64).collect();
    for j in 0..8 {
        let th = 2.0 * PI * (j as f64 + 0.3) / 8.0;
        let a = lp.slice(&[th]).potential.eval(&x, 0);
        let b = ext.slice(&[th.cos(), th.sin()]).potential.eval(&x, 0);
        let dev = a.sub(&b).e.iter().map(|e| e.max_abs()).fold(0.0, f64::max);
        if dev > 1e-8 {
            return Err(Error::Consistency(format!(
                "extension differs from the loop on the boundary circle by {dev:e}"
            )));
        }
    }
    let t = lp.fiber_integral(Rule::interval(0.0, 2.0 * PI, 2 * order), 1.0);
    let p = ext.fiber_integral(disk_rule(order), 1.0);
    Ok((t, p))
}

/// A bundle automorphism covering `φ: B → B`, given by an orthogonal matrix
/// function `ψ(b): E_b → E_{φ(b)}`.
#[derive(Clone, Debug)]
pub struct BundleIsomorphism {
    pub phi: SmoothMap,
    pub psi: MatrixForm,
}

/// Which characteristic form a symmetry check compares.
#[derive(Clone, Debug)]
pub enum SymmetryData {
    Pf(Connection),
    Transgression(Connection, Connection),
}

fn gauge_defect(c: &Connection, iso: &BundleIsomorphism, points: &[Vec<f64>]) -> Result<f64> {
    let moved = c.pullback(&iso.phi)?.gauge(&iso.psi)?;
    let mut worst: f64 = 0.0;
    for p in points {
        let a = moved.potential.eval(p, 0);
        let b = c.potential.eval(p, 0);
        worst = worst.max(a.sub(&b).e.iter().map(|e| e.max_abs()).fold(0.0, f64::max));
    }
    Ok(worst)
}

/// `max_p |φ*(form) − form|` after spot-checking `ψ̃⁻¹ (φ*∇) ψ̃ = ∇`.
pub fn symmetry_check(data: &SymmetryData, iso: &BundleIsomorphism, points: &[Vec<f64>]) -> Result<f64> {
    let (form, conns) = match data {
        SymmetryData::Pf(c) => (pf_form(c)?, vec![c]),
        SymmetryData::Transgression(a, b) => (transgression(a, b)?, vec![a, b]),
    };
    for c in conns {
        let d = gauge_defect(c, iso, points)?;
        if d > tolerances::SYMMETRY_PRECONDITION {
            return Err(Error::SymmetryPrecondition(format!(
                "connection {} is not invariant under the bundle map: defect {d:e}",
                c.label
            )));
        }
    }
    let moved = form.pullback(&iso.phi)?;
    let mut worst: f64 = 0.0;
    for p in points {
        let a = moved.values(p);
        let b = form.values(p);
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// Residual of `∫_{Δ^m} dω + (−1)^{m−1} d∫_{Δ^m} ω = ∫_{∂Δ^m} ω` at `x`, for a
/// form on `Δ^m × B` with simplex coordinates first, `m ∈ {1, 2}`.
pub fn simplex_homotopy_residual(w: &DifferentialForm, m: usize, x: &[f64], order: usize) -> Result<f64> {
    use crate::geometry::fiber_integrate_leading;
    let n = w.dim() - m;
    let rule = if m == 1 {
        Rule::interval(0.0, 1.0, order)
    } else {
        Rule::triangle(order)
    };
    let lhs1 = fiber_integrate_leading(&w.d(), rule.clone(), 1.0).values(x);
    let lhs2 = fiber_integrate_leading(w, rule, 1.0).d().values(x);
    let sgn = if m % 2 == 1 { 1.0 } else { -1.0 };
    let rhs: Vec<f64> = if m == 1 {
        let mut a = x.to_vec();
        a.insert(0, 1.0);
        let mut b = x.to_vec();
        b.insert(0, 0.0);
        let top = w.eval(&a, 0);
        let bot = w.eval(&b, 0);
        // restriction to slices: drop the dt components
        let t = drop_params(&top, 1).values();
        let s = drop_params(&bot, 1).values();
        t.iter().zip(&s).map(|(p, q)| p - q).collect()
    } else {
        let edges: [fn(&Jet) -> [Jet; 2]; 3] = [
            |u| [u.clone(), u.zero_like()],
            |u| [1.0 - u, u.clone()],
            |u| [u.zero_like(), 1.0 - u],
        ];
        let mut acc = vec![0.0; crate::forms::binomial(n, w.degree().saturating_sub(1))];
        for e in edges {
            let map = SmoothMap::new(1 + n, 2 + n, move |v| {
                let [s, t] = e(&v[0]);
                let mut out = vec![s, t];
                out.extend_from_slice(&v[1..]);
                out
            });
            let pulled = w.pullback(&map)?;
            let val = fiber_integrate_leading(&pulled, Rule::interval(0.0, 1.0, order), 1.0).values(x);
            for (a, v) in acc.iter_mut().zip(val) {
                *a += v;
            }
        }
        acc
    };
    let mut worst: f64 = 0.0;
    for i in 0..rhs.len() {
        worst = worst.max((lhs1[i] + sgn * lhs2[i] - rhs[i]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{integrate, ChartDomain};
    use crate::random::random_skew_potential;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_matrix(m: usize, vals: Vec<f64>) -> LocalMatrix {
        LocalMatrix::functions(m, vals.into_iter().map(|v| Jet::constant(1, 0, v)).collect())
    }

    /// Round sphere Levi-Civita connection in the polar chart (θ, φ) in the
    /// orthonormal frame (e_θ, e_φ): ω = −cos θ dφ.
    pub(crate) fn round_sphere() -> Connection {
        Connection::from_jets(2, 2, "levi-civita", |x| {
            let c = x[0].cos();
            let z = c.zero_like();
            vec![
                vec![z.clone(), z.clone(), z.clone(), z.clone()],
                vec![z.clone(), -&c, c.clone(), z.clone()],
            ]
        })
    }

    #[test]
    fn pfaffian_two_by_two() {
        let p = pfaffian_local(&scalar_matrix(2, vec![0.0, 3.0, -3.0, 0.0]));
        assert_eq!(p.values(), vec![3.0]);
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        // Independent oracle: cofactor determinant of a fixed 4x4 skew matrix.
        let a = [
            [0.0, 1.2, -0.7, 0.4],
            [-1.2, 0.0, 2.1, -0.3],
            [0.7, -2.1, 0.0, 0.9],
            [-0.4, 0.3, -0.9, 0.0],
        ];
        let pf = pfaffian_local(&scalar_matrix(4, a.iter().flatten().copied().collect())).values()[0];
        let det = {
            let m = |r: usize, c: usize| a[r][c];
            let mut d = 0.0;
            for p in permutations(4) {
                let sgn = perm_sign(&p);
                d += sgn * (0..4).map(|i| m(i, p[i])).product::<f64>();
            }
            d
        };
        assert_abs_diff_eq!(pf * pf, det, epsilon = 1e-10);
        assert_abs_diff_eq!(pf, 1.2 * 0.9 - (-0.7) * (-0.3) + 0.4 * 2.1, epsilon = 1e-12);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = vec![];
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn perm_sign(p: &[usize]) -> f64 {
        let mut s = 1.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }

    #[test]
    fn pfaffian_block_diagonal_is_wedge() {
        // blockdiag(J(dx0∧dx1), J(dx2∧dx3)) in four variables: Pf = volume.
        let mut m = LocalMatrix::zero(4, 4, 2, 0);
        let one = Jet::constant(4, 0, 1.0);
        m.e[1].c[0] = one.clone();
        m.e[4].c[0] = -&one;
        m.e[2 * 4 + 3].c[5] = one.clone();
        m.e[3 * 4 + 2].c[5] = -&one;
        assert_eq!(pfaffian_local(&m).values(), vec![1.0]);
    }

    #[test]
    fn pfaffian_errors() {
        assert!(matches!(pfaffian(&MatrixForm::zero(3, 2, 2)), Err(Error::Shape(_))));
        assert!(matches!(pfaffian(&MatrixForm::zero(2, 2, 1)), Err(Error::Degree(_))));
        assert!(matches!(pf_form(&Connection::trivial(3, 2)), Err(Error::Rank(_))));
    }

    #[test]
    fn round_sphere_curvature_and_euler_number() {
        let c = round_sphere();
        let f = c.curvature().eval(&[0.8, 0.3], 0);
        assert_abs_diff_eq!(f.get(0, 1).values()[0], 0.8f64.sin(), epsilon = 1e-14);
        let chart = ChartDomain::boxed(vec![0.0, 0.0], vec![PI, 2.0 * PI]).with_order(24);
        let e = integrate(&pf_form(&c).unwrap(), &chart).unwrap();
        assert_abs_diff_eq!(e, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn abelian_curvature_is_da() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Connection::new(random_skew_potential(2, 3, 1.0, &mut rng), "u1").unwrap();
        let f = c.curvature().eval(&[0.1, 0.2, 0.3], 0);
        let da = c.potential.d().eval(&[0.1, 0.2, 0.3], 0);
        assert!(f.sub(&da).e.iter().all(|e| e.max_abs() < 1e-14));
    }

    #[test]
    fn transgression_law_rank_two_and_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in [2, 4] {
            let dim = if m == 2 { 2 } else { 4 };
            let c1 = Connection::new(random_skew_potential(m, dim, 0.5, &mut rng), "a").unwrap();
            let c2 = Connection::new(random_skew_potential(m, dim, 0.5, &mut rng), "b").unwrap();
            let t = transgression(&c1, &c2).unwrap();
            let lhs = t.d();
            let rhs = pf_form(&c2).unwrap().sub(&pf_form(&c1).unwrap()).unwrap();
            let x: Vec<f64> = (0..dim).map(|i| 0.1 * i as f64 - 0.2).collect();
            for (a, b) in lhs.values(&x).iter().zip(rhs.values(&x)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn transgression_of_equal_connections_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = Connection::new(random_skew_potential(2, 2, 1.0, &mut rng), "a").unwrap();
        let t = transgression(&c, &c).unwrap();
        assert!(t.values(&[0.2, 0.1]).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn path_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c1 = Connection::new(random_skew_potential(2, 2, 1.0, &mut rng), "a").unwrap();
        let c2 = Connection::new(random_skew_potential(2, 2, 1.0, &mut rng), "b").unwrap();
        let p = ConnectionPath::new(&c1, &c2).unwrap();
        let x = [0.3, -0.4];
        for (t, c) in [(0.0, &c1), (1.0, &c2)] {
            let d = p.at(t).potential.eval(&x, 1).sub(&c.potential.eval(&x, 1));
            assert!(d.e.iter().all(|e| e.max_abs() < 1e-15));
        }
    }

    #[test]
    fn secondary_transgression_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cs: Vec<Connection> = (0..3)
            .map(|_| Connection::new(random_skew_potential(2, 2, 0.7, &mut rng), "c").unwrap())
            .collect();
        let fam = SimplexConnectionFamily::new(&cs[0], &cs[1], &cs[2]).unwrap();
        let s = secondary_transgression(&fam).unwrap();
        let x = [0.25, -0.35];
        let lhs = -s.d().values(&x)[0];
        let mut rhs = 0.0;
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            rhs += transgression(&cs[a], &cs[b]).unwrap().values(&x)[0];
        }
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn edge_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cs: Vec<Connection> = (0..3)
            .map(|_| Connection::new(random_skew_potential(2, 2, 0.7, &mut rng), "c").unwrap())
            .collect();
        let fam = SimplexConnectionFamily::new(&cs[0], &cs[1], &cs[2]).unwrap();
        let x = [0.1, 0.6];
        for (i, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
            let e = fam.edge(i).fiber_integral(Rule::interval(0.0, 1.0, 16), 1.0).values(&x);
            let t = transgression(&cs[a], &cs[b]).unwrap().values(&x);
            for (p, q) in e.iter().zip(&t) {
                assert_abs_diff_eq!(p, q, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn loop_primitive() {
        let lp = ConnectionFamily::from_jets(2, 1, 1, |u, x| {
            let a = &u[0].cos() * &x[0] + u[0].sin() * 0.5;
            let z = a.zero_like();
            vec![vec![z.clone(), a.clone(), -&a, z]]
        });
        let ext = ConnectionFamily::from_jets(2, 2, 1, |u, x| {
            let a = &u[0] * &x[0] + &u[1] * 0.5;
            let z = a.zero_like();
            vec![vec![z.clone(), a.clone(), -&a, z]]
        });
        let (t, p) = loop_transgression(&lp, &ext, 16).unwrap();
        let dp = p.d().values(&[0.3])[0];
        assert_abs_diff_eq!(dp, -t.values(&[0.3])[0], epsilon = 1e-10);
    }

    #[test]
    fn homotopy_lemma_simplices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in [1, 2] {
            let w = crate::random::random_form(m + 2, m + 1, &mut rng);
            let r = simplex_homotopy_residual(&w, m, &[0.2, -0.3], 12).unwrap();
            assert!(r < 1e-10, "m={m}: {r}");
        }
    }

    #[test]
    fn rotation_symmetry_of_sphere_pf() {
        let c = round_sphere();
        let iso = BundleIsomorphism {
            phi: SmoothMap::new(2, 2, |x| vec![x[0].clone(), &x[1] + 0.9]),
            psi: MatrixForm::identity(2, 2),
        };
        let pts = vec![vec![0.4, 1.0], vec![2.0, 4.0]];
        let d = symmetry_check(&SymmetryData::Pf(c), &iso, &pts).unwrap();
        assert!(d < 1e-12);
    }
}
