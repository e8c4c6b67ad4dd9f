//! Seeded random polynomial test data: forms, skew potentials and pairs.

use crate::forms::{binomial, DifferentialForm, MatrixForm};
use crate::jet::Jet;
use rand::Rng;

/// Default total degree of random polynomial coefficients.
pub const POLY_DEGREE: usize = 3;

/// Polynomial in `dim` variables, dense in monomials of total degree `≤ deg`.
#[derive(Clone, Debug)]
pub struct Poly {
    pub dim: usize,
    pub terms: Vec<(Vec<u32>, f64)>,
}

fn monomials(dim: usize, deg: usize) -> Vec<Vec<u32>> {
    if dim == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in 0..=deg {
        for mut rest in monomials(dim - 1, deg - e) {
            rest.insert(0, e as u32);
            out.push(rest);
        }
    }
    out
}

impl Poly {
    /// Coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng>(dim: usize, deg: usize, rng: &mut R) -> Poly {
        Poly {
            dim,
            terms: monomials(dim, deg)
                .into_iter()
                .map(|m| (m, rng.gen_range(-1.0..=1.0)))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        let mut acc = Jet::zero(x[0].nvars(), x[0].order());
        for (m, c) in &self.terms {
            let mut t = x[0].cst(*c);
            for (xi, &e) in x.iter().zip(m) {
                if e > 0 {
                    t = &t * &xi.powi(e);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c * x.iter().zip(m).map(|(v, &e)| v.powi(e as i32)).product::<f64>())
            .sum()
    }
}

/// Random `p`-form on `ℝ^dim` with polynomial coefficients.
pub fn random_form<R: Rng>(dim: usize, p: usize, rng: &mut R) -> DifferentialForm {
    random_form_deg(dim, p, POLY_DEGREE, rng)
}

pub fn random_form_deg<R: Rng>(dim: usize, p: usize, deg: usize, rng: &mut R) -> DifferentialForm {
    if p > dim {
        return DifferentialForm::zero(dim, p);
    }
    let polys: Vec<Poly> = (0..binomial(dim, p)).map(|_| Poly::random(dim, deg, rng)).collect();
    DifferentialForm::new(dim, p, move |x| polys.iter().map(|q| q.eval(x)).collect())
}

/// Random skew-symmetric matrix of 1-forms, scaled by `scale`.
pub fn random_skew_potential<R: Rng>(m: usize, dim: usize, scale: f64, rng: &mut R) -> MatrixForm {
    let mut polys = Vec::new();
    for _ in 0..dim {
        for i in 0..m {
            for j in i + 1..m {
                polys.push((i, j, Poly::random(dim, 2, rng)));
            }
        }
    }
    MatrixForm::one_form(m, dim, move |x| {
        let z = x[0].zero_like();
        let mut mats = vec![vec![z.clone(); m * m]; dim];
        let per = m * (m - 1) / 2;
        for (k, (i, j, q)) in polys.iter().enumerate() {
            let v = q.eval(x) * scale;
            let mat = &mut mats[k / per];
            mat[j * m + i] = -&v;
            mat[i * m + j] = v;
        }
        mats
    })
}

/// Uniform random point of the box `[lo, hi]`.
pub fn random_point<R: Rng>(lo: &[f64], hi: &[f64], rng: &mut R) -> Vec<f64> {
    lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect()
}

/// Uniform random point of the open disk of radius `r` in `ℝ²`.
pub fn random_disk_point<R: Rng>(r: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let p = [rng.gen_range(-r..r), rng.gen_range(-r..r)];
        if p[0] * p[0] + p[1] * p[1] < r * r {
            return p.to_vec();
        }
    }
}
