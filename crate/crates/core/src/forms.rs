//! Scalar- and matrix-valued differential forms on coordinate charts.
//!
//! A form is a lazily evaluated function from a chart point to its local jet:
//! the Taylor coefficients, up to a requested order, of every component on
//! an increasing index tuple. Exterior derivatives read one jet order off the
//! coefficients, so `d` of a form requested at order `k` evaluates the form
//! at order `k + 1`.

use crate::error::{Error, Result};
use crate::jet::Jet;
use smallvec::SmallVec;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

type Tuple = SmallVec<[u8; 8]>;

/// Increasing index tuples of length `p` in `0..dim`, in lexicographic order.
pub struct Basis {
    pub tuples: Vec<Tuple>,
    index: HashMap<Tuple, usize>,
}

impl Basis {
    fn build(dim: usize, p: usize) -> Basis {
        fn rec(dim: usize, p: usize, start: usize, cur: &mut Tuple, out: &mut Vec<Tuple>) {
            if cur.len() == p {
                out.push(cur.clone());
                return;
            }
            for i in start..dim {
                cur.push(i as u8);
                rec(dim, p, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut tuples = Vec::new();
        if p <= dim {
            rec(dim, p, 0, &mut Tuple::new(), &mut tuples);
        }
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Basis { tuples, index }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn index_of(&self, t: &[u8]) -> Option<usize> {
        let key: Tuple = t.iter().copied().collect();
        self.index.get(&key).copied()
    }
}

/// Cached basis of `p`-tuples in dimension `dim`.
pub fn basis(dim: usize, p: usize) -> &'static Basis {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), &'static Basis>>> = OnceLock::new();
    let c = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = c.read().unwrap().get(&(dim, p)) {
        return b;
    }
    let mut w = c.write().unwrap();
    w.entry((dim, p))
        .or_insert_with(|| Box::leak(Box::new(Basis::build(dim, p))))
}

/// Number of increasing `p`-tuples in dimension `dim`.
pub fn binomial(dim: usize, p: usize) -> usize {
    if p > dim {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..p {
        r = r * (dim - i) / (i + 1);
    }
    r
}

type WedgeTable = Vec<(u32, u32, u32, f64)>;

fn wedge_table(dim: usize, p: usize, q: usize) -> &'static WedgeTable {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize, usize), &'static WedgeTable>>> = OnceLock::new();
    let c = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = c.read().unwrap().get(&(dim, p, q)) {
        return b;
    }
    let mut w = c.write().unwrap();
    w.entry((dim, p, q)).or_insert_with(|| {
        let (a, b, out) = (basis(dim, p), basis(dim, q), basis(dim, p + q));
        let mut t = Vec::new();
        for (i, ti) in a.tuples.iter().enumerate() {
            for (j, tj) in b.tuples.iter().enumerate() {
                if ti.iter().any(|x| tj.contains(x)) {
                    continue;
                }
                let inversions = ti.iter().map(|x| tj.iter().filter(|y| *y < x).count()).sum::<usize>();
                let mut m: Tuple = ti.iter().chain(tj.iter()).copied().collect();
                m.sort_unstable();
                let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                t.push((i as u32, j as u32, out.index[&m] as u32, sign));
            }
        }
        Box::leak(Box::new(t))
    })
}

fn d_table(dim: usize, p: usize) -> &'static WedgeTable {
    // (source tuple, variable, target tuple, sign)
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), &'static WedgeTable>>> = OnceLock::new();
    let c = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = c.read().unwrap().get(&(dim, p)) {
        return b;
    }
    let mut w = c.write().unwrap();
    w.entry((dim, p)).or_insert_with(|| {
        let (a, out) = (basis(dim, p), basis(dim, p + 1));
        let mut t = Vec::new();
        for (i, ti) in a.tuples.iter().enumerate() {
            for v in 0..dim as u8 {
                if ti.contains(&v) {
                    continue;
                }
                let before = ti.iter().filter(|&&x| x < v).count();
                let mut m = ti.clone();
                m.push(v);
                m.sort_unstable();
                let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
                t.push((i as u32, v as u32, out.index[&m] as u32, sign));
            }
        }
        Box::leak(Box::new(t))
    })
}

/// Jet of a form at a single point: one coefficient jet per basis tuple.
#[derive(Clone)]
pub struct Local {
    pub dim: usize,
    pub degree: usize,
    pub order: usize,
    pub c: Vec<Jet>,
}

impl fmt::Debug for Local {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<f64> = self.c.iter().map(|j| j.value()).collect();
        write!(f, "Local(dim={}, deg={}, {:?})", self.dim, self.degree, v)
    }
}

impl Local {
    pub fn zero(dim: usize, degree: usize, order: usize) -> Local {
        Local {
            dim,
            degree,
            order,
            c: (0..binomial(dim, degree)).map(|_| Jet::zero(dim, order)).collect(),
        }
    }

    pub fn from_jets(dim: usize, degree: usize, order: usize, c: Vec<Jet>) -> Local {
        assert_eq!(
            c.len(),
            binomial(dim, degree),
            "wrong number of coefficients for a {degree}-form in dimension {dim}"
        );
        let c = c.into_iter().map(|j| j.truncate(order)).collect();
        Local { dim, degree, order, c }
    }

    pub fn function(f: Jet) -> Local {
        Local {
            dim: f.nvars(),
            degree: 0,
            order: f.order(),
            c: vec![f],
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.c.iter().map(|j| j.value()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, j| m.max(j.value().abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|j| j.is_finite())
    }

    /// True when every jet coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|j| j.max_abs() == 0.0)
    }

    pub fn truncate(&self, order: usize) -> Local {
        if order >= self.order {
            return self.clone();
        }
        Local {
            dim: self.dim,
            degree: self.degree,
            order,
            c: self.c.iter().map(|j| j.truncate(order)).collect(),
        }
    }

    fn check_same(&self, o: &Local) {
        assert_eq!(self.dim, o.dim, "local forms on different charts");
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
    }

    pub fn add(&self, o: &Local) -> Local {
        self.check_same(o);
        let order = self.order.min(o.order);
        Local {
            dim: self.dim,
            degree: self.degree,
            order,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Local) -> Local {
        self.check_same(o);
        let order = self.order.min(o.order);
        Local {
            dim: self.dim,
            degree: self.degree,
            order,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Local {
        Local {
            dim: self.dim,
            degree: self.degree,
            order: self.order,
            c: self.c.iter().map(|a| a.scale(s)).collect(),
        }
    }

    /// Multiply by a 0-form given as a jet.
    pub fn mul_jet(&self, f: &Jet) -> Local {
        let order = self.order.min(f.order());
        Local {
            dim: self.dim,
            degree: self.degree,
            order,
            c: self.c.iter().map(|a| a * f).collect(),
        }
    }

    pub fn wedge(&self, o: &Local) -> Local {
        assert_eq!(self.dim, o.dim, "wedge of local forms on different charts");
        let order = self.order.min(o.order);
        let mut out = Local::zero(self.dim, self.degree + o.degree, order);
        for &(i, j, k, s) in wedge_table(self.dim, self.degree, o.degree) {
            let p = &self.c[i as usize] * &o.c[j as usize];
            if s > 0.0 {
                out.c[k as usize] += p;
            } else {
                out.c[k as usize] -= p;
            }
        }
        out
    }

    /// Exterior derivative; lowers the jet order by one.
    pub fn d(&self) -> Local {
        assert!(self.order > 0, "exterior derivative needs a jet of order >= 1");
        let mut out = Local::zero(self.dim, self.degree + 1, self.order - 1);
        for &(i, v, k, s) in d_table(self.dim, self.degree) {
            let p = self.c[i as usize].derivative(v as usize);
            if s > 0.0 {
                out.c[k as usize] += p;
            } else {
                out.c[k as usize] -= p;
            }
        }
        out
    }

    /// Components of the form `du_0 ∧ … ∧ du_{f-1} ∧ β` for the leading `f`
    /// coordinates, returned as `β` restricted to the trailing coordinates.
    pub fn fiber_part(&self, f: usize) -> Local {
        let deg = self.degree.saturating_sub(f);
        let dim = self.dim - f;
        if self.degree < f {
            return Local::zero(dim, 0, self.order);
        }
        let src = basis(self.dim, self.degree);
        let dst = basis(dim, deg);
        let mut c: Vec<Jet> = (0..dst.len()).map(|_| Jet::zero(dim, self.order)).collect();
        for (i, t) in src.tuples.iter().enumerate() {
            if t.len() >= f && t[..f].iter().enumerate().all(|(a, &b)| a == b as usize) {
                let rest: Tuple = t[f..].iter().map(|x| x - f as u8).collect();
                c[dst.index[&rest]] = self.c[i].drop_leading(f);
            }
        }
        Local {
            dim,
            degree: deg,
            order: self.order,
            c,
        }
    }

    /// Regard a form in `dim` coordinates as a form in `f + dim` coordinates
    /// constant in the `f` new leading ones.
    pub fn lift_leading(&self, f: usize) -> Local {
        let dim = self.dim + f;
        let src = basis(self.dim, self.degree);
        let dst = basis(dim, self.degree);
        let mut c: Vec<Jet> = (0..dst.len()).map(|_| Jet::zero(dim, self.order)).collect();
        for (i, t) in src.tuples.iter().enumerate() {
            let shifted: Tuple = t.iter().map(|x| x + f as u8).collect();
            c[dst.index[&shifted]] = self.c[i].lift_leading(f);
        }
        Local {
            dim,
            degree: self.degree,
            order: self.order,
            c,
        }
    }

    /// Regard a form in `dim` coordinates as a form in `dim + f` coordinates
    /// constant in the `f` new trailing ones.
    pub fn lift_trailing(&self, f: usize) -> Local {
        let dim = self.dim + f;
        let src = basis(self.dim, self.degree);
        let dst = basis(dim, self.degree);
        let mut c: Vec<Jet> = (0..dst.len()).map(|_| Jet::zero(dim, self.order)).collect();
        for (i, t) in src.tuples.iter().enumerate() {
            c[dst.index[t]] = self.c[i].lift_trailing(f);
        }
        Local {
            dim,
            degree: self.degree,
            order: self.order,
            c,
        }
    }

    /// Pull back along a map germ: `germ` holds the components of the map as
    /// jets in the source coordinates (order at least `self.order + 1`
    /// is needed for a pullback of order `self.order`), and `self` is the
    /// local form at the image point.
    pub fn pullback(&self, germ: &[Jet]) -> Local {
        let m = if germ.is_empty() { 0 } else { germ[0].nvars() };
        self.pullback_into(germ, m)
    }

    /// [`Local::pullback`] with the source dimension given explicitly, so
    /// that maps into a point keep their source.
    pub fn pullback_into(&self, germ: &[Jet], m: usize) -> Local {
        assert_eq!(germ.len(), self.dim, "pullback: map target dimension");
        let gorder = germ.first().map_or(self.order + 1, |g| g.order());
        let order = if self.degree == 0 {
            self.order.min(gorder)
        } else {
            assert!(
                gorder >= 1,
                "pullback of a positive-degree form needs order >= 1 map jets"
            );
            self.order.min(gorder - 1)
        };
        let h: Vec<Jet> = germ
            .iter()
            .map(|g| {
                let mut g = g.truncate(order);
                g = &g - g.value();
                g
            })
            .collect();
        let composed: Vec<Jet> = if m == 0 && self.dim > 0 {
            self.c.iter().map(|c| Jet::constant(0, order, c.value())).collect()
        } else if self.dim == 0 {
            self.c.iter().map(|c| Jet::constant(m, order, c.value())).collect()
        } else {
            self.c.iter().map(|c| c.compose(&h)).collect()
        };
        let p = self.degree;
        let mut out = Local::zero(m, p, order);
        if p > m {
            return out;
        }
        if p == 0 {
            out.c[0] = composed[0].clone();
            return out;
        }
        let jac: Vec<Vec<Jet>> = germ
            .iter()
            .map(|g| (0..m).map(|j| g.derivative(j).truncate(order)).collect())
            .collect();
        let src = basis(self.dim, p);
        let dst = basis(m, p);
        for (ji, tj) in src.tuples.iter().enumerate() {
            let cj = &composed[ji];
            if cj.max_abs() == 0.0 {
                continue;
            }
            for (ii, ti) in dst.tuples.iter().enumerate() {
                let minor: Vec<Vec<&Jet>> = tj
                    .iter()
                    .map(|&r| ti.iter().map(|&c| &jac[r as usize][c as usize]).collect())
                    .collect();
                let det = jet_det(&minor);
                out.c[ii].add_product(cj, &det);
            }
        }
        out
    }
}

fn jet_det(a: &[Vec<&Jet>]) -> Jet {
    let n = a.len();
    match n {
        1 => a[0][0].clone(),
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            let mut acc = a[0][0].zero_like();
            for c in 0..n {
                let sub: Vec<Vec<&Jet>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, x)| *x)
                            .collect()
                    })
                    .collect();
                let t = a[0][c] * &jet_det(&sub);
                if c % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
    }
}

type LocalFn = dyn Fn(&[f64], usize) -> Local + Send + Sync;

/// A smooth degree-`p` form on an `n`-dimensional coordinate chart.
#[derive(Clone)]
pub struct DifferentialForm {
    dim: usize,
    degree: usize,
    f: Arc<LocalFn>,
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialForm(dim={}, degree={})", self.dim, self.degree)
    }
}

impl DifferentialForm {
    /// Form whose coefficients are computed from the coordinate jets.
    /// The closure returns one coefficient per increasing tuple.
    pub fn new<F>(dim: usize, degree: usize, coeffs: F) -> DifferentialForm
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        DifferentialForm::from_local(dim, degree, move |p, k| {
            if degree > dim {
                return Local::zero(dim, degree, k);
            }
            Local::from_jets(dim, degree, k, coeffs(&Jet::vars(p, k)))
        })
    }

    /// 0-form from a scalar function of the coordinates.
    pub fn function<F>(dim: usize, f: F) -> DifferentialForm
    where
        F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    {
        DifferentialForm::new(dim, 0, move |x| vec![f(x)])
    }

    pub fn from_local<F>(dim: usize, degree: usize, f: F) -> DifferentialForm
    where
        F: Fn(&[f64], usize) -> Local + Send + Sync + 'static,
    {
        DifferentialForm {
            dim,
            degree,
            f: Arc::new(f),
        }
    }

    pub fn zero(dim: usize, degree: usize) -> DifferentialForm {
        DifferentialForm::from_local(dim, degree, move |_, k| Local::zero(dim, degree, k))
    }

    pub fn constant(dim: usize, v: f64) -> DifferentialForm {
        DifferentialForm::from_local(dim, 0, move |_, k| Local::function(Jet::constant(dim, k, v)))
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> DifferentialForm {
        DifferentialForm::function(dim, move |x| x[i].clone())
    }

    /// The basis 1-form `dx_i`.
    pub fn dx(dim: usize, i: usize) -> DifferentialForm {
        DifferentialForm::from_local(dim, 1, move |_, k| {
            let mut l = Local::zero(dim, 1, k);
            l.c[i] = Jet::constant(dim, k, 1.0);
            l
        })
    }

    /// Standard volume form `dx_0 ∧ … ∧ dx_{n-1}` scaled by `f`.
    pub fn volume<F>(dim: usize, f: F) -> DifferentialForm
    where
        F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    {
        DifferentialForm::new(dim, dim, move |x| vec![f(x)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &[f64], order: usize) -> Local {
        debug_assert_eq!(p.len(), self.dim);
        (self.f)(p, order)
    }

    /// Coefficient values at `p` on the increasing tuples.
    pub fn values(&self, p: &[f64]) -> Vec<f64> {
        self.eval(p, 0).values()
    }

    /// Coefficient on an explicit increasing tuple.
    pub fn component(&self, p: &[f64], tuple: &[u8]) -> f64 {
        match basis(self.dim, self.degree).index_of(tuple) {
            Some(i) => self.values(p)[i],
            None => 0.0,
        }
    }

    fn same_shape(&self, o: &DifferentialForm, what: &str) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::Chart(format!(
                "{what}: chart dimensions {} and {}",
                self.dim, o.dim
            )));
        }
        if self.degree != o.degree {
            return Err(Error::Degree(format!(
                "{what}: degrees {} and {}",
                self.degree, o.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &DifferentialForm) -> Result<DifferentialForm> {
        self.same_shape(o, "add")?;
        let (a, b) = (self.clone(), o.clone());
        Ok(DifferentialForm::from_local(self.dim, self.degree, move |p, k| {
            a.eval(p, k).add(&b.eval(p, k))
        }))
    }

    pub fn sub(&self, o: &DifferentialForm) -> Result<DifferentialForm> {
        self.same_shape(o, "sub")?;
        let (a, b) = (self.clone(), o.clone());
        Ok(DifferentialForm::from_local(self.dim, self.degree, move |p, k| {
            a.eval(p, k).sub(&b.eval(p, k))
        }))
    }

    pub fn scale(&self, s: f64) -> DifferentialForm {
        let a = self.clone();
        DifferentialForm::from_local(self.dim, self.degree, move |p, k| a.eval(p, k).scale(s))
    }

    pub fn neg(&self) -> DifferentialForm {
        self.scale(-1.0)
    }

    pub fn wedge(&self, o: &DifferentialForm) -> Result<DifferentialForm> {
        if self.dim != o.dim {
            return Err(Error::Chart(format!(
                "wedge: chart dimensions {} and {}",
                self.dim, o.dim
            )));
        }
        let (a, b) = (self.clone(), o.clone());
        Ok(DifferentialForm::from_local(
            self.dim,
            self.degree + o.degree,
            move |p, k| a.eval(p, k).wedge(&b.eval(p, k)),
        ))
    }

    pub fn d(&self) -> DifferentialForm {
        let a = self.clone();
        DifferentialForm::from_local(self.dim, self.degree + 1, move |p, k| a.eval(p, k + 1).d())
    }

    pub fn pullback(&self, f: &SmoothMap) -> Result<DifferentialForm> {
        if f.dst != self.dim {
            return Err(Error::Chart(format!(
                "pullback: map lands in dimension {}, form lives in dimension {}",
                f.dst, self.dim
            )));
        }
        let (a, f) = (self.clone(), f.clone());
        let deg = self.degree;
        Ok(DifferentialForm::from_local(f.src, self.degree, move |p, k| {
            let kk = if deg == 0 { k } else { k + 1 };
            let g = f.germ(p, kk);
            let x: Vec<f64> = g.iter().map(|j| j.value()).collect();
            a.eval(&x, k).pullback_into(&g, f.src)
        }))
    }

    /// Components along the leading `f` coordinates (see [`Local::fiber_part`]),
    /// evaluated with the leading coordinates frozen at `u`.
    pub fn fiber_slice(&self, f: usize, u: &[f64]) -> DifferentialForm {
        let a = self.clone();
        let u = u.to_vec();
        let dim = self.dim - f;
        DifferentialForm::from_local(dim, self.degree.saturating_sub(f), move |p, k| {
            let mut q = u.clone();
            q.extend_from_slice(p);
            a.eval(&q, k).fiber_part(f)
        })
    }
}

type GermFn = dyn Fn(&[f64], usize) -> Vec<Jet> + Send + Sync;

/// Smooth map between coordinate charts, evaluated as jets.
#[derive(Clone)]
pub struct SmoothMap {
    pub src: usize,
    pub dst: usize,
    f: Arc<GermFn>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({} -> {})", self.src, self.dst)
    }
}

impl SmoothMap {
    /// Map given by a closure over the source coordinate jets.
    pub fn new<F>(src: usize, dst: usize, f: F) -> SmoothMap
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        SmoothMap {
            src,
            dst,
            f: Arc::new(move |p, k| {
                let out = f(&Jet::vars(p, k));
                debug_assert_eq!(out.len(), dst);
                out
            }),
        }
    }

    pub fn from_germ<F>(src: usize, dst: usize, f: F) -> SmoothMap
    where
        F: Fn(&[f64], usize) -> Vec<Jet> + Send + Sync + 'static,
    {
        SmoothMap {
            src,
            dst,
            f: Arc::new(f),
        }
    }

    pub fn identity(n: usize) -> SmoothMap {
        SmoothMap::new(n, n, |x| x.to_vec())
    }

    /// Constant map onto `value`.
    pub fn constant(src: usize, value: Vec<f64>) -> SmoothMap {
        let dst = value.len();
        SmoothMap::from_germ(src, dst, move |_, k| {
            value.iter().map(|&v| Jet::constant(src, k, v)).collect()
        })
    }

    /// Coordinate projection keeping the listed source coordinates.
    pub fn projection(src: usize, keep: Vec<usize>) -> SmoothMap {
        let dst = keep.len();
        SmoothMap::new(src, dst, move |x| keep.iter().map(|&i| x[i].clone()).collect())
    }

    pub fn germ(&self, p: &[f64], order: usize) -> Vec<Jet> {
        (self.f)(p, order)
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        self.germ(p, 0).iter().map(|j| j.value()).collect()
    }

    /// Jacobian matrix `∂f_i/∂x_j` at `p`.
    pub fn jacobian(&self, p: &[f64]) -> Vec<Vec<f64>> {
        self.germ(p, 1)
            .iter()
            .map(|g| (0..self.src).map(|j| g.derivative(j).value()).collect())
            .collect()
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        if inner.dst != self.src {
            return Err(Error::Chart(format!(
                "compose: inner lands in dimension {}, outer starts in {}",
                inner.dst, self.src
            )));
        }
        let (outer, inner) = (self.clone(), inner.clone());
        let src = inner.src;
        Ok(SmoothMap::from_germ(inner.src, self.dst, move |p, k| {
            let g = inner.germ(p, k);
            let x: Vec<f64> = g.iter().map(|j| j.value()).collect();
            let h: Vec<Jet> = g.iter().map(|j| j - j.value()).collect();
            outer
                .germ(&x, k)
                .iter()
                .map(|o| {
                    if outer.src == 0 {
                        Jet::constant(src, k, o.value())
                    } else {
                        o.compose(&h)
                    }
                })
                .collect()
        }))
    }

    /// Product map `(x, y) ↦ (a(x), b(y))` on concatenated coordinates.
    pub fn product(a: &SmoothMap, b: &SmoothMap) -> SmoothMap {
        let (a, b) = (a.clone(), b.clone());
        let (sa, sb) = (a.src, b.src);
        SmoothMap::from_germ(sa + sb, a.dst + b.dst, move |p, k| {
            let ga = a.germ(&p[..sa], k);
            let gb = b.germ(&p[sa..], k);
            let mut out: Vec<Jet> = ga.iter().map(|j| j.lift_trailing(sb)).collect();
            out.extend(gb.iter().map(|j| j.lift_leading(sa)));
            out
        })
    }
}

/// Jet of an `m × m` matrix of forms at a point, row-major.
#[derive(Clone, Debug)]
pub struct LocalMatrix {
    pub m: usize,
    pub e: Vec<Local>,
}

impl LocalMatrix {
    pub fn zero(m: usize, dim: usize, degree: usize, order: usize) -> LocalMatrix {
        LocalMatrix {
            m,
            e: (0..m * m).map(|_| Local::zero(dim, degree, order)).collect(),
        }
    }

    /// Matrix of 0-forms from jets.
    pub fn functions(m: usize, e: Vec<Jet>) -> LocalMatrix {
        assert_eq!(e.len(), m * m);
        LocalMatrix {
            m,
            e: e.into_iter().map(Local::function).collect(),
        }
    }

    pub fn identity(m: usize, dim: usize, order: usize) -> LocalMatrix {
        let mut r = LocalMatrix::zero(m, dim, 0, order);
        for i in 0..m {
            r.e[i * m + i] = Local::function(Jet::constant(dim, order, 1.0));
        }
        r
    }

    pub fn get(&self, i: usize, j: usize) -> &Local {
        &self.e[i * self.m + j]
    }

    pub fn dim(&self) -> usize {
        self.e[0].dim
    }

    pub fn degree(&self) -> usize {
        self.e[0].degree
    }

    pub fn order(&self) -> usize {
        self.e.iter().map(|l| l.order).min().unwrap_or(0)
    }

    pub fn add(&self, o: &LocalMatrix) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &LocalMatrix) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.scale(s)).collect(),
        }
    }

    pub fn mul_jet(&self, f: &Jet) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.mul_jet(f)).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.truncate(order)).collect(),
        }
    }

    pub fn transpose(&self) -> LocalMatrix {
        let m = self.m;
        LocalMatrix {
            m,
            e: (0..m * m).map(|k| self.e[(k % m) * m + k / m].clone()).collect(),
        }
    }

    /// Matrix product with entries wedged.
    pub fn wedge(&self, o: &LocalMatrix) -> LocalMatrix {
        let m = self.m;
        let order = self.order().min(o.order());
        let mut out = LocalMatrix::zero(m, self.dim(), self.degree() + o.degree(), order);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Local::zero(self.dim(), self.degree() + o.degree(), order);
                for l in 0..m {
                    let a = self.get(i, l);
                    let b = o.get(l, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.wedge(b));
                }
                out.e[i * m + j] = acc;
            }
        }
        out
    }

    pub fn d(&self) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.d()).collect(),
        }
    }

    pub fn pullback(&self, germ: &[Jet]) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.pullback(germ)).collect(),
        }
    }

    pub fn pullback_into(&self, germ: &[Jet], src: usize) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.pullback_into(germ, src)).collect(),
        }
    }

    pub fn lift_leading(&self, f: usize) -> LocalMatrix {
        LocalMatrix {
            m: self.m,
            e: self.e.iter().map(|a| a.lift_leading(f)).collect(),
        }
    }

    /// Largest coefficient of `M + Mᵀ`.
    pub fn skew_defect(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let s = self.get(i, j).add(self.get(j, i));
                worst = worst.max(s.max_abs());
            }
        }
        worst
    }
}

type MatrixFn = dyn Fn(&[f64], usize) -> LocalMatrix + Send + Sync;

/// An `m × m` matrix of degree-`p` forms on a chart.
#[derive(Clone)]
pub struct MatrixForm {
    pub m: usize,
    dim: usize,
    degree: usize,
    f: Arc<MatrixFn>,
}

impl fmt::Debug for MatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MatrixForm({}x{}, dim={}, degree={})",
            self.m, self.m, self.dim, self.degree
        )
    }
}

impl MatrixForm {
    pub fn from_local<F>(m: usize, dim: usize, degree: usize, f: F) -> MatrixForm
    where
        F: Fn(&[f64], usize) -> LocalMatrix + Send + Sync + 'static,
    {
        MatrixForm {
            m,
            dim,
            degree,
            f: Arc::new(f),
        }
    }

    /// Matrix of 1-forms `Σ_i M_i(x) dx_i`; the closure returns the `dim`
    /// row-major coefficient matrices `M_i`.
    pub fn one_form<F>(m: usize, dim: usize, f: F) -> MatrixForm
    where
        F: Fn(&[Jet]) -> Vec<Vec<Jet>> + Send + Sync + 'static,
    {
        MatrixForm::from_local(m, dim, 1, move |p, k| {
            let comps = f(&Jet::vars(p, k));
            assert_eq!(comps.len(), dim, "one_form: need one matrix per coordinate");
            let mut out = LocalMatrix::zero(m, dim, 1, k);
            for (i, mat) in comps.iter().enumerate() {
                for (e, x) in out.e.iter_mut().zip(mat) {
                    e.c[i] = x.truncate(k);
                }
            }
            out
        })
    }

    /// Matrix of 0-forms.
    pub fn functions<F>(m: usize, dim: usize, f: F) -> MatrixForm
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        MatrixForm::from_local(m, dim, 0, move |p, k| LocalMatrix::functions(m, f(&Jet::vars(p, k))))
    }

    pub fn zero(m: usize, dim: usize, degree: usize) -> MatrixForm {
        MatrixForm::from_local(m, dim, degree, move |_, k| LocalMatrix::zero(m, dim, degree, k))
    }

    pub fn identity(m: usize, dim: usize) -> MatrixForm {
        MatrixForm::from_local(m, dim, 0, move |_, k| LocalMatrix::identity(m, dim, k))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &[f64], order: usize) -> LocalMatrix {
        (self.f)(p, order)
    }

    /// Entry `(i, j)` as a scalar form.
    pub fn entry(&self, i: usize, j: usize) -> DifferentialForm {
        let a = self.clone();
        let m = self.m;
        DifferentialForm::from_local(self.dim, self.degree, move |p, k| a.eval(p, k).e[i * m + j].clone())
    }

    pub fn add(&self, o: &MatrixForm) -> Result<MatrixForm> {
        if self.m != o.m {
            return Err(Error::Shape(format!("add: sizes {} and {}", self.m, o.m)));
        }
        if self.dim != o.dim || self.degree != o.degree {
            return Err(Error::Degree("add: mismatched matrix forms".into()));
        }
        let (a, b) = (self.clone(), o.clone());
        Ok(MatrixForm::from_local(self.m, self.dim, self.degree, move |p, k| {
            a.eval(p, k).add(&b.eval(p, k))
        }))
    }

    pub fn scale(&self, s: f64) -> MatrixForm {
        let a = self.clone();
        MatrixForm::from_local(self.m, self.dim, self.degree, move |p, k| a.eval(p, k).scale(s))
    }

    pub fn d(&self) -> MatrixForm {
        let a = self.clone();
        MatrixForm::from_local(self.m, self.dim, self.degree + 1, move |p, k| a.eval(p, k + 1).d())
    }

    pub fn pullback(&self, f: &SmoothMap) -> Result<MatrixForm> {
        if f.dst != self.dim {
            return Err(Error::Chart(format!(
                "pullback: map lands in dimension {}, matrix form lives in {}",
                f.dst, self.dim
            )));
        }
        let (a, f) = (self.clone(), f.clone());
        let deg = self.degree;
        Ok(MatrixForm::from_local(self.m, f.src, self.degree, move |p, k| {
            let kk = if deg == 0 { k } else { k + 1 };
            let g = f.germ(p, kk);
            let x: Vec<f64> = g.iter().map(|j| j.value()).collect();
            a.eval(&x, k).pullback_into(&g, f.src)
        }))
    }

    /// Largest `|M + Mᵀ|` coefficient over the given points.
    pub fn skew_defect(&self, points: &[Vec<f64>]) -> f64 {
        points.iter().map(|p| self.eval(p, 0).skew_defect()).fold(0.0, f64::max)
    }
}

/// Matrix product of matrix-valued forms with wedged entries.
pub fn matrix_wedge(a: &MatrixForm, b: &MatrixForm) -> Result<MatrixForm> {
    if a.m != b.m {
        return Err(Error::Shape(format!("matrix_wedge: sizes {} and {}", a.m, b.m)));
    }
    if a.dim != b.dim {
        return Err(Error::Chart(format!(
            "matrix_wedge: chart dimensions {} and {}",
            a.dim, b.dim
        )));
    }
    let (x, y) = (a.clone(), b.clone());
    Ok(MatrixForm::from_local(a.m, a.dim, a.degree + b.degree, move |p, k| {
        x.eval(p, k).wedge(&y.eval(p, k))
    }))
}

/// Wedge product of scalar forms.
pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm> {
    a.wedge(b)
}

/// Exterior derivative.
pub fn exterior_derivative(w: &DifferentialForm) -> DifferentialForm {
    w.d()
}

/// Pullback along a smooth map.
pub fn pullback(f: &SmoothMap, w: &DifferentialForm) -> Result<DifferentialForm> {
    w.pullback(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_wedge_dx_dy() {
        let w = DifferentialForm::dx(2, 0).wedge(&DifferentialForm::dx(2, 1)).unwrap();
        assert_eq!(w.degree(), 2);
        assert_abs_diff_eq!(w.values(&[0.3, 0.4])[0], 1.0);
    }

    #[test]
    fn sign_rule() {
        // (x dy) ∧ (y dx) = -xy dx∧dy
        let a = DifferentialForm::new(2, 1, |x| vec![x[0].zero_like(), x[0].clone()]);
        let b = DifferentialForm::new(2, 1, |x| vec![x[1].clone(), x[1].zero_like()]);
        let w = a.wedge(&b).unwrap();
        assert_abs_diff_eq!(w.values(&[2.0, 3.0])[0], -6.0);
    }

    #[test]
    fn odd_form_squares_to_zero() {
        let a = DifferentialForm::new(3, 1, |x| vec![x[0].sin(), &x[1] * &x[2], x[0].exp()]);
        let w = a.wedge(&a).unwrap();
        for v in w.values(&[0.1, 0.2, 0.3]) {
            assert_abs_diff_eq!(v, 0.0);
        }
    }

    #[test]
    fn d_of_x_dy() {
        let a = DifferentialForm::new(2, 1, |x| vec![x[0].zero_like(), x[0].clone()]);
        assert_abs_diff_eq!(a.d().values(&[0.5, 0.5])[0], 1.0);
    }

    #[test]
    fn d_of_x2y() {
        let f = DifferentialForm::function(2, |x| &x[0] * &x[0] * &x[1]);
        let v = f.d().values(&[1.0, 2.0]);
        assert_abs_diff_eq!(v[0], 4.0);
        assert_abs_diff_eq!(v[1], 1.0);
    }

    #[test]
    fn angular_form_pullback() {
        let w = DifferentialForm::new(2, 1, |x| vec![-x[1].clone(), x[0].clone()]);
        let f = SmoothMap::new(1, 2, |t| vec![t[0].cos(), t[0].sin()]);
        let p = w.pullback(&f).unwrap();
        for t in [0.0, 0.7, 2.5] {
            assert_abs_diff_eq!(p.values(&[t])[0], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_map_kills_positive_degree() {
        let w = DifferentialForm::new(2, 1, |x| vec![x[0].clone(), x[1].exp()]);
        let f = SmoothMap::constant(2, vec![0.3, 0.1]);
        let p = w.pullback(&f).unwrap();
        for v in p.values(&[0.5, 0.5]) {
            assert_abs_diff_eq!(v, 0.0);
        }
    }

    #[test]
    fn pullback_of_function_is_composition() {
        let g = DifferentialForm::function(2, |x| (&x[0] * &x[1]).sin());
        let f = SmoothMap::new(2, 2, |u| vec![&u[0] + &u[1], &u[0] * &u[1]]);
        let p = g.pullback(&f).unwrap();
        let (a, b) = (0.3f64, -0.8f64);
        assert_abs_diff_eq!(p.values(&[a, b])[0], ((a + b) * a * b).sin(), epsilon = 1e-15);
    }

    #[test]
    fn composition_of_maps() {
        let f = SmoothMap::new(1, 2, |t| vec![t[0].cos(), t[0].sin()]);
        let g = SmoothMap::new(2, 1, |x| vec![&x[0] * &x[1]]);
        let h = g.after(&f).unwrap();
        let j = h.jacobian(&[0.4]);
        assert_abs_diff_eq!(j[0][0], (2.0f64 * 0.4).cos(), epsilon = 1e-14);
    }

    #[test]
    fn matrix_wedge_identity() {
        let b = MatrixForm::one_form(2, 2, |x| {
            vec![
                vec![x[0].clone(), x[1].clone(), x[0].exp(), x[1].zero_like()],
                vec![x[1].clone(), x[0].zero_like(), x[0].cst(2.0), x[0].clone()],
            ]
        });
        let i = MatrixForm::identity(2, 2);
        let w = matrix_wedge(&i, &b).unwrap();
        let (lw, lb) = (w.eval(&[0.2, 0.3], 0), b.eval(&[0.2, 0.3], 0));
        for (x, y) in lw.e.iter().zip(&lb.e) {
            assert_eq!(x.values(), y.values());
        }
    }

    #[test]
    fn so2_one_form_squares_to_zero() {
        let a = MatrixForm::one_form(2, 2, |x| {
            let f = &x[0] * &x[1];
            let g = x[0].sin();
            vec![
                vec![f.zero_like(), f.clone(), -&f, f.zero_like()],
                vec![g.zero_like(), g.clone(), -&g, g.zero_like()],
            ]
        });
        let w = matrix_wedge(&a, &a).unwrap().eval(&[0.4, 0.9], 0);
        for e in &w.e {
            assert_abs_diff_eq!(e.max_abs(), 0.0);
        }
    }

    #[test]
    fn size_mismatch_is_shape_error() {
        let a = MatrixForm::zero(2, 2, 1);
        let b = MatrixForm::zero(3, 2, 1);
        assert!(matches!(matrix_wedge(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn wedge_chart_mismatch() {
        let a = DifferentialForm::dx(2, 0);
        let b = DifferentialForm::dx(3, 0);
        assert!(matches!(a.wedge(&b), Err(Error::Chart(_))));
    }

    #[test]
    fn degree_above_dim_is_zero() {
        let w = DifferentialForm::new(2, 3, |_| vec![]);
        assert!(w.values(&[0.0, 0.0]).is_empty());
    }
}
