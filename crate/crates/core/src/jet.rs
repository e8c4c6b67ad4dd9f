//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] is the Taylor polynomial of a smooth function at a point, in `n`
//! local variables, truncated at total degree `order`. Order-1 jets in one
//! variable are ordinary dual numbers; higher orders carry the extra
//! derivatives needed when exterior derivatives are nested (d of a curvature
//! built from d of a projector, and so on). All arithmetic is forward mode and
//! exact up to floating point rounding.

use smallvec::SmallVec;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{OnceLock, RwLock};

/// Highest truncation order a jet may carry.
pub const MAX_ORDER: usize = 8;

type Exp = SmallVec<[u8; 8]>;

/// Monomial bookkeeping for jets in `n` variables up to a fixed order.
///
/// Monomials are listed degree by degree, so the table for order `k - 1` is a
/// prefix of the table for order `k`; truncation is slicing.
pub struct Table {
    n: usize,
    order: usize,
    exps: Vec<Exp>,
    index: HashMap<Exp, u32>,
    mul: Vec<(u32, u32, u32)>,
    parent: Vec<(u32, u8)>,
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

fn monomials(n: usize, order: usize) -> Vec<Exp> {
    fn rec(n: usize, var: usize, left: usize, cur: &mut Exp, out: &mut Vec<Exp>) {
        if var + 1 == n {
            cur[var] = left as u8;
            out.push(cur.clone());
            cur[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e as u8;
            rec(n, var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Exp::new());
        return out;
    }
    let mut cur: Exp = SmallVec::from_elem(0, n);
    for d in 0..=order {
        rec(n, 0, d, &mut cur, &mut out);
    }
    out
}

impl Table {
    fn build(n: usize, order: usize) -> Table {
        let exps = monomials(n, order);
        let index: HashMap<Exp, u32> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        let deg: Vec<usize> = exps.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let mut mul = Vec::new();
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if deg[i] + deg[j] <= order {
                    let s: Exp = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                    mul.push((i as u32, j as u32, index[&s]));
                }
            }
        }
        let mut parent = vec![(0u32, 0u8); exps.len()];
        for (k, e) in exps.iter().enumerate().skip(1) {
            let v = e.iter().position(|&x| x > 0).unwrap();
            let mut p = e.clone();
            p[v] -= 1;
            parent[k] = (index[&p], v as u8);
        }
        let mut deriv = vec![Vec::new(); n];
        for (k, e) in exps.iter().enumerate() {
            for (v, d) in deriv.iter_mut().enumerate() {
                if e[v] > 0 {
                    let mut p = e.clone();
                    p[v] -= 1;
                    d.push((k as u32, index[&p], e[v] as f64));
                }
            }
        }
        Table {
            n,
            order,
            exps,
            index,
            mul,
            parent,
            deriv,
        }
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }
}

fn table(n: usize, order: usize) -> &'static Table {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), &'static Table>>> = OnceLock::new();
    assert!(order <= MAX_ORDER, "jet order {order} exceeds MAX_ORDER = {MAX_ORDER}");
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = cache.read().unwrap().get(&(n, order)) {
        return t;
    }
    let mut w = cache.write().unwrap();
    w.entry((n, order))
        .or_insert_with(|| Box::leak(Box::new(Table::build(n, order))))
}

/// Truncated Taylor polynomial in `n` variables.
#[derive(Clone)]
pub struct Jet {
    t: &'static Table,
    c: SmallVec<[f64; 8]>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet(n={}, order={}, {:?})",
            self.t.n,
            self.t.order,
            self.c.as_slice()
        )
    }
}

impl Jet {
    pub fn constant(n: usize, order: usize, v: f64) -> Jet {
        let t = table(n, order);
        let mut c = SmallVec::from_elem(0.0, t.len());
        c[0] = v;
        Jet { t, c }
    }

    pub fn zero(n: usize, order: usize) -> Jet {
        Jet::constant(n, order, 0.0)
    }

    /// The coordinate function `x_i` expanded at `x_i = v`.
    pub fn variable(n: usize, order: usize, i: usize, v: f64) -> Jet {
        let mut j = Jet::constant(n, order, v);
        if order > 0 {
            let mut e: Exp = SmallVec::from_elem(0, n);
            e[i] = 1;
            let k = j.t.index[&e] as usize;
            j.c[k] = 1.0;
        }
        j
    }

    /// Identity jets of all coordinates at `point`.
    pub fn vars(point: &[f64], order: usize) -> Vec<Jet> {
        let n = point.len();
        (0..n).map(|i| Jet::variable(n, order, i, point[i])).collect()
    }

    pub fn nvars(&self) -> usize {
        self.t.n
    }

    pub fn order(&self) -> usize {
        self.t.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Coefficient of the monomial with exponent vector `e` (zero if absent).
    pub fn coeff(&self, e: &[u8]) -> f64 {
        let key: Exp = e.iter().copied().collect();
        self.t.index.get(&key).map_or(0.0, |&k| self.c[k as usize])
    }

    /// Constant jet with the same shape as `self`.
    pub fn cst(&self, v: f64) -> Jet {
        let mut c = SmallVec::from_elem(0.0, self.c.len());
        c[0] = v;
        Jet { t: self.t, c }
    }

    pub fn zero_like(&self) -> Jet {
        self.cst(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Drop all terms above total degree `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.t.order {
            return self.clone();
        }
        let t = table(self.t.n, order);
        Jet {
            t,
            c: self.c[..t.len()].iter().copied().collect(),
        }
    }

    fn matched(a: &Jet, b: &Jet) -> (Jet, Jet) {
        assert_eq!(a.t.n, b.t.n, "jets over different variable sets");
        let o = a.t.order.min(b.t.order);
        (a.truncate(o), b.truncate(o))
    }

    /// Partial derivative in variable `i`; the result has order one less.
    pub fn derivative(&self, i: usize) -> Jet {
        assert!(self.t.order > 0, "derivative of an order-0 jet: request a higher order");
        let t = table(self.t.n, self.t.order - 1);
        let mut c: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, t.len());
        for &(src, dst, f) in &self.t.deriv[i] {
            if (dst as usize) < c.len() {
                c[dst as usize] += f * self.c[src as usize];
            }
        }
        Jet { t, c }
    }

    /// Substitute `x_i = x_i(0) + h_i`, where each `h_i` is a jet without
    /// constant term in another variable set. The result lives in that set.
    pub fn compose(&self, h: &[Jet]) -> Jet {
        assert_eq!(h.len(), self.t.n, "compose: wrong number of substitutions");
        let order = h.first().map_or(self.t.order, |x| x.t.order).min(self.t.order);
        let m = h.first().map_or(0, |x| x.t.n);
        let out_t = table(m, order);
        let mut out = Jet {
            t: out_t,
            c: SmallVec::from_elem(0.0, out_t.len()),
        };
        out.c[0] = self.c[0];
        if order == 0 {
            return out;
        }
        let h: Vec<Jet> = h.iter().map(|x| x.truncate(order)).collect();
        let src = self.truncate(order);
        let mut pw: Vec<Jet> = Vec::with_capacity(src.t.len());
        pw.push(out.cst(1.0));
        for k in 1..src.t.len() {
            let (p, v) = src.t.parent[k];
            let next = &pw[p as usize] * &h[v as usize];
            pw.push(next);
        }
        for k in 1..src.t.len() {
            let a = src.c[k];
            if a != 0.0 {
                for (o, x) in out.c.iter_mut().zip(pw[k].c.iter()) {
                    *o += a * x;
                }
            }
        }
        out
    }

    /// Restrict to the trailing `n - f` variables by setting the leading `f`
    /// offsets to zero.
    pub fn drop_leading(&self, f: usize) -> Jet {
        let t = table(self.t.n - f, self.t.order);
        let mut c: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, t.len());
        for (k, e) in self.t.exps.iter().enumerate() {
            if e[..f].iter().all(|&x| x == 0) {
                let key: Exp = e[f..].iter().copied().collect();
                c[t.index[&key] as usize] = self.c[k];
            }
        }
        Jet { t, c }
    }

    /// Regard `self` as a jet in `f + n` variables that does not depend on
    /// the `f` new leading ones.
    pub fn lift_leading(&self, f: usize) -> Jet {
        let t = table(self.t.n + f, self.t.order);
        let mut c: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, t.len());
        for (k, e) in self.t.exps.iter().enumerate() {
            let mut key: Exp = SmallVec::from_elem(0, f);
            key.extend(e.iter().copied());
            c[t.index[&key] as usize] = self.c[k];
        }
        Jet { t, c }
    }

    /// Regard `self` as a jet in `n + f` variables that does not depend on
    /// the `f` new trailing ones.
    pub fn lift_trailing(&self, f: usize) -> Jet {
        let t = table(self.t.n + f, self.t.order);
        let mut c: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, t.len());
        for (k, e) in self.t.exps.iter().enumerate() {
            let mut key: Exp = e.clone();
            key.extend(std::iter::repeat_n(0, f));
            c[t.index[&key] as usize] = self.c[k];
        }
        Jet { t, c }
    }

    /// Evaluate `sum_m coeffs[m] * (self - self(0))^m` by Horner's rule.
    fn taylor(&self, coeffs: &[f64]) -> Jet {
        let k = self.t.order;
        if k == 0 {
            return self.cst(coeffs[0]);
        }
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut r = self.cst(coeffs[k]);
        for m in (0..k).rev() {
            r = &r * &h;
            r.c[0] += coeffs[m];
        }
        r
    }

    pub fn exp(&self) -> Jet {
        let e = self.c[0].exp();
        let mut c = vec![e; self.t.order + 1];
        let mut f = 1.0;
        for (m, x) in c.iter_mut().enumerate().skip(1) {
            f *= m as f64;
            *x = e / f;
        }
        self.taylor(&c)
    }

    pub fn ln(&self) -> Jet {
        let a = self.c[0];
        let mut c = vec![a.ln(); self.t.order + 1];
        for (m, x) in c.iter_mut().enumerate().skip(1) {
            let s = if m % 2 == 1 { 1.0 } else { -1.0 };
            *x = s / (m as f64 * a.powi(m as i32));
        }
        self.taylor(&c)
    }

    fn trig(&self, cycle: [f64; 4]) -> Jet {
        let mut c = vec![0.0; self.t.order + 1];
        let mut f = 1.0;
        for (m, x) in c.iter_mut().enumerate() {
            if m > 0 {
                f *= m as f64;
            }
            *x = cycle[m % 4] / f;
        }
        self.taylor(&c)
    }

    pub fn sin(&self) -> Jet {
        let (s, co) = self.c[0].sin_cos();
        self.trig([s, co, -s, -co])
    }

    pub fn cos(&self) -> Jet {
        let (s, co) = self.c[0].sin_cos();
        self.trig([co, -s, -co, s])
    }

    pub fn powf(&self, p: f64) -> Jet {
        let a = self.c[0];
        let mut c = vec![0.0; self.t.order + 1];
        let mut binom = 1.0;
        for (m, x) in c.iter_mut().enumerate() {
            if m > 0 {
                binom *= (p - (m as f64 - 1.0)) / m as f64;
            }
            *x = binom * a.powf(p - m as f64);
        }
        self.taylor(&c)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Jet {
        let a = self.c[0];
        let mut c = vec![0.0; self.t.order + 1];
        let mut p = 1.0 / a;
        for (m, x) in c.iter_mut().enumerate() {
            *x = if m % 2 == 0 { p } else { -p };
            p /= a;
        }
        self.taylor(&c)
    }

    pub fn powi(&self, k: u32) -> Jet {
        let mut r = self.cst(1.0);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            t: self.t,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    fn add_ref(&self, o: &Jet) -> Jet {
        if self.t.order == o.t.order {
            assert_eq!(self.t.n, o.t.n, "jets over different variable sets");
            return Jet {
                t: self.t,
                c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
            };
        }
        let (a, b) = Jet::matched(self, o);
        a.add_ref(&b)
    }

    fn sub_ref(&self, o: &Jet) -> Jet {
        if self.t.order == o.t.order {
            assert_eq!(self.t.n, o.t.n, "jets over different variable sets");
            return Jet {
                t: self.t,
                c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
            };
        }
        let (a, b) = Jet::matched(self, o);
        a.sub_ref(&b)
    }

    fn mul_ref(&self, o: &Jet) -> Jet {
        if self.t.order != o.t.order {
            let (a, b) = Jet::matched(self, o);
            return a.mul_ref(&b);
        }
        assert_eq!(self.t.n, o.t.n, "jets over different variable sets");
        if self.c.len() == 1 {
            return self.cst(self.c[0] * o.c[0]);
        }
        let mut c: SmallVec<[f64; 8]> = SmallVec::from_elem(0.0, self.c.len());
        for &(i, j, k) in &self.t.mul {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet { t: self.t, c }
    }

    /// `self += a * b` without allocating an intermediate for the sum.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let p = a.mul_ref(b);
        if p.t.order == self.t.order {
            for (x, y) in self.c.iter_mut().zip(&p.c) {
                *x += y;
            }
        } else {
            *self = self.add_ref(&p);
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! jet_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                self.$inner(&o)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: &Jet) -> Jet {
                self.$inner(o)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                self.$inner(&o)
            }
        }
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, o: &Jet) -> Jet {
                self.$inner(o)
            }
        }
    };
}

jet_binop!(Add, add, add_ref);
jet_binop!(Sub, sub, sub_ref);
jet_binop!(Mul, mul, mul_ref);

impl Jet {
    fn div_ref(&self, o: &Jet) -> Jet {
        self.mul_ref(&o.recip())
    }
}
jet_binop!(Div, div, div_ref);

macro_rules! jet_scalar_ops {
    ($t:ty) => {
        impl Add<f64> for $t {
            type Output = Jet;
            fn add(self, s: f64) -> Jet {
                let mut r = self.clone();
                r.c[0] += s;
                r
            }
        }
        impl Sub<f64> for $t {
            type Output = Jet;
            fn sub(self, s: f64) -> Jet {
                let mut r = self.clone();
                r.c[0] -= s;
                r
            }
        }
        impl Mul<f64> for $t {
            type Output = Jet;
            fn mul(self, s: f64) -> Jet {
                self.scale(s)
            }
        }
        impl Div<f64> for $t {
            type Output = Jet;
            fn div(self, s: f64) -> Jet {
                self.scale(1.0 / s)
            }
        }
        impl Add<$t> for f64 {
            type Output = Jet;
            fn add(self, j: $t) -> Jet {
                j + self
            }
        }
        impl Sub<$t> for f64 {
            type Output = Jet;
            fn sub(self, j: $t) -> Jet {
                let mut r = j.scale(-1.0);
                r.c[0] += self;
                r
            }
        }
        impl Mul<$t> for f64 {
            type Output = Jet;
            fn mul(self, j: $t) -> Jet {
                j.scale(self)
            }
        }
        impl Div<$t> for f64 {
            type Output = Jet;
            fn div(self, j: $t) -> Jet {
                j.recip().scale(self)
            }
        }
    };
}

jet_scalar_ops!(Jet);
jet_scalar_ops!(&Jet);

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, o: &Jet) {
        *self = self.add_ref(o);
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, o: Jet) {
        *self = self.add_ref(&o);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, o: &Jet) {
        *self = self.sub_ref(o);
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, o: Jet) {
        *self = self.sub_ref(&o);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, s: f64) {
        for x in self.c.iter_mut() {
            *x *= s;
        }
    }
}
