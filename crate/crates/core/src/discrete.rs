//! Exact rational cochain complexes: mapping cones, Betti numbers, the long
//! exact sequence of a pair, the Dirichlet subcomplex and a registry of
//! small oriented meshes.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, VecDeque};

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigRational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Matrix {
        assert_eq!(v.len(), rows * cols);
        Matrix {
            rows,
            cols,
            data: v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        self.data[i * self.cols + j] = x;
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Columns of `self` followed by the columns of `o`.
    pub fn hcat(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                out.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        out
    }

    /// Rows of `self` followed by the rows of `o`.
    pub fn vcat(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form and pivot columns.
    fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(row * m.cols + j, p * m.cols + j);
            }
            let inv = m.get(row, col).recip();
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for j in 0..m.cols {
                        let v = m.get(r, j) - &f * m.get(row, j);
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Basis of the null space, as the columns of the result.
    pub fn nullspace(&self) -> Matrix {
        if self.rows == 0 {
            return Matrix::identity(self.cols);
        }
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            out.set(f, j, BigRational::one());
            for (i, &p) in pivots.iter().enumerate() {
                out.set(p, j, -r.get(i, f).clone());
            }
        }
        out
    }
}

/// Cochain complex `C⁰ → C¹ → … → Cⁿ`; `d[k]` maps `Cᵏ` to `Cᵏ⁺¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainComplex {
    pub dims: Vec<usize>,
    pub d: Vec<Matrix>,
    pub labels: Vec<String>,
}

impl CochainComplex {
    pub fn new(dims: Vec<usize>, d: Vec<Matrix>) -> Result<CochainComplex> {
        if d.len() + 1 != dims.len().max(1) && !(dims.is_empty() && d.is_empty()) {
            return Err(Error::Complex(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                d.len()
            )));
        }
        for (k, m) in d.iter().enumerate() {
            if m.cols != dims[k] || m.rows != dims[k + 1] {
                return Err(Error::Complex(format!(
                    "d{k} is {}×{}, expected {}×{}",
                    m.rows,
                    m.cols,
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for k in 1..d.len() {
            if !d[k].mul(&d[k - 1]).is_zero() {
                return Err(Error::Complex(format!("d{k} ∘ d{} ≠ 0", k - 1)));
            }
        }
        let labels = (0..dims.len()).map(|k| format!("C{k}")).collect();
        Ok(CochainComplex { dims, d, labels })
    }

    /// The complex with no cochains at all.
    pub fn empty() -> CochainComplex {
        CochainComplex {
            dims: vec![],
            d: vec![],
            labels: vec![],
        }
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    /// `d: Cᵏ → Cᵏ⁺¹`, zero outside the stored range.
    pub fn diff(&self, k: usize) -> Matrix {
        match self.d.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.dim(k + 1), self.dim(k)),
        }
    }

    /// `d: Cᵏ⁻¹ → Cᵏ`.
    fn incoming(&self, k: usize) -> Matrix {
        if k == 0 {
            Matrix::zeros(self.dim(0), 0)
        } else {
            self.diff(k - 1)
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// The complex with every differential negated.
    pub fn negated(&self) -> CochainComplex {
        CochainComplex {
            dims: self.dims.clone(),
            d: self.d.iter().map(Matrix::neg).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Betti numbers `dim ker dᵏ − rank dᵏ⁻¹`.
pub fn betti(c: &CochainComplex) -> Result<Vec<usize>> {
    for k in 1..c.d.len() {
        if !c.d[k].mul(&c.d[k - 1]).is_zero() {
            return Err(Error::Complex(format!("d{k} ∘ d{} ≠ 0", k - 1)));
        }
    }
    Ok((0..c.dims.len())
        .map(|k| c.dim(k) - c.diff(k).rank() - c.incoming(k).rank())
        .collect())
}

/// Chain map matrices `r_k: C^k(M) → C^k(∂M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionData {
    pub r: Vec<Matrix>,
}

impl RestrictionData {
    pub fn map(&self, k: usize, src: &CochainComplex, dst: &CochainComplex) -> Matrix {
        match self.r.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(dst.dim(k), src.dim(k)),
        }
    }

    /// Exact check of `r ∘ d = d ∘ r` in every degree.
    pub fn check(&self, m: &CochainComplex, b: &CochainComplex) -> Result<()> {
        for k in 0..m.dims.len() {
            let r = self.map(k, m, b);
            if r.rows != b.dim(k) || r.cols != m.dim(k) {
                return Err(Error::ChainMap(format!(
                    "r{k} is {}×{}, expected {}×{}",
                    r.rows,
                    r.cols,
                    b.dim(k),
                    m.dim(k)
                )));
            }
            let lhs = self.map(k + 1, m, b).mul(&m.diff(k));
            let rhs = b.diff(k).mul(&r);
            if lhs != rhs {
                return Err(Error::ChainMap(format!("r{} ∘ d ≠ d ∘ r{k}", k + 1)));
            }
        }
        Ok(())
    }
}

/// A pair `(M, ∂M)` of complexes with its restriction map.
#[derive(Clone, Debug)]
pub struct Pair {
    pub name: String,
    /// Top dimension of `M`.
    pub n: usize,
    pub m: CochainComplex,
    pub boundary: CochainComplex,
    pub r: RestrictionData,
}

/// Cone `Cᵏ(M) ⊕ Cᵏ⁻¹(∂M)` with differential `[[−d_M, 0], [r, d_∂]]`.
pub fn mapping_cone(m: &CochainComplex, b: &CochainComplex, r: &RestrictionData) -> Result<CochainComplex> {
    r.check(m, b)?;
    let top = m.dims.len().max(b.dims.len() + 1);
    let dims: Vec<usize> = (0..top)
        .map(|k| m.dim(k) + if k == 0 { 0 } else { b.dim(k - 1) })
        .collect();
    let mut d = Vec::new();
    for k in 0..top.saturating_sub(1) {
        let (mk, bk) = (m.dim(k), if k == 0 { 0 } else { b.dim(k - 1) });
        let (mk1, bk1) = (m.dim(k + 1), b.dim(k));
        let mut out = Matrix::zeros(mk1 + bk1, mk + bk);
        let dm = m.diff(k).neg();
        for i in 0..mk1 {
            for j in 0..mk {
                out.set(i, j, dm.get(i, j).clone());
            }
        }
        let rk = r.map(k, m, b);
        for i in 0..bk1 {
            for j in 0..mk {
                out.set(mk1 + i, j, rk.get(i, j).clone());
            }
        }
        if k > 0 {
            let db = b.diff(k - 1);
            for i in 0..bk1 {
                for j in 0..bk {
                    out.set(mk1 + i, mk + j, db.get(i, j).clone());
                }
            }
        }
        d.push(out);
    }
    let mut c = CochainComplex::new(dims, d)?;
    c.labels = (0..top).map(|k| format!("C{k}(M) ⊕ C{}(∂M)", k as i64 - 1)).collect();
    Ok(c)
}

/// Betti numbers of the kernel subcomplex `ker r ⊂ C(M)`.
pub fn dirichlet_betti(m: &CochainComplex, b: &CochainComplex, r: &RestrictionData) -> Result<Vec<usize>> {
    r.check(m, b)?;
    let mut kernels = Vec::new();
    for k in 0..m.dims.len() {
        let rk = r.map(k, m, b);
        if rk.rank() != b.dim(k) {
            return Err(Error::Surjectivity(format!(
                "r{k} has rank {} onto a space of dimension {}",
                rk.rank(),
                b.dim(k)
            )));
        }
        kernels.push(rk.nullspace());
    }
    Ok((0..m.dims.len())
        .map(|k| {
            let z = m.diff(k).mul(&kernels[k]).rank();
            let cycles = kernels[k].cols - z;
            let bounds = if k == 0 {
                0
            } else {
                m.diff(k - 1).mul(&kernels[k - 1]).rank()
            };
            cycles - bounds
        })
        .collect())
}

/// Rank of the map induced in degree `k` cohomology by `f: A^k → B^j`,
/// where `f` commutes with the differentials up to sign.
fn induced_rank(f: &Matrix, a: &CochainComplex, ka: usize, b: &CochainComplex, kb: usize) -> usize {
    let z = a.diff(ka).nullspace();
    let image = f.mul(&z);
    let bounds = b.incoming(kb);
    image.hcat(&bounds).rank() - bounds.rank()
}

/// One spot `X` of the long exact sequence with its incoming and outgoing maps.
#[derive(Clone, Debug, PartialEq)]
pub struct Spot {
    pub group: String,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub composite_rank: usize,
    pub exact: bool,
}

/// Exactness of `H^{k−1}(∂M) → Hᵏ(cone) → Hᵏ(M) → Hᵏ(∂M) → Hᵏ⁺¹(cone)` at every spot.
#[derive(Clone, Debug, PartialEq)]
pub struct LesReport {
    pub spots: Vec<Spot>,
    /// Ranks of `Hᵏ(∂M) → Hᵏ⁺¹(cone)`, indexed by `k`.
    pub connecting_ranks: Vec<usize>,
}

impl LesReport {
    pub fn exact(&self) -> bool {
        self.spots.iter().all(|s| s.exact)
    }

    pub fn failures(&self) -> Vec<&Spot> {
        self.spots.iter().filter(|s| !s.exact).collect()
    }
}

pub fn les_check(m: &CochainComplex, b: &CochainComplex, r: &RestrictionData) -> Result<LesReport> {
    let cone = mapping_cone(m, b, r)?;
    let top = cone.dims.len();
    let hm = betti(m)?;
    let hb = betti(b)?;
    let hc = betti(&cone)?;
    // a: C^{k−1}(∂M) → cone^k, γ ↦ (0, γ); pr: cone^k → C^k(M), (ω, γ) ↦ ω.
    let a_map = |k: usize| {
        let mk = m.dim(k);
        let bk = if k == 0 { 0 } else { b.dim(k - 1) };
        let mut out = Matrix::zeros(mk + bk, bk);
        for i in 0..bk {
            out.set(mk + i, i, BigRational::one());
        }
        out
    };
    let pr_map = |k: usize| {
        let mk = m.dim(k);
        let bk = if k == 0 { 0 } else { b.dim(k - 1) };
        let mut out = Matrix::zeros(mk, mk + bk);
        for i in 0..mk {
            out.set(i, i, BigRational::one());
        }
        out
    };
    let r_map = |k: usize| r.map(k, m, b);
    let mut spots = Vec::new();
    let mut connecting = Vec::new();
    for k in 0..top {
        // Hᵏ(cone): in from H^{k−1}(∂M) via a, out to Hᵏ(M) via pr.
        let rin = if k == 0 {
            0
        } else {
            induced_rank(&a_map(k), b, k - 1, &cone, k)
        };
        let rout = induced_rank(&pr_map(k), &cone, k, m, k);
        let comp = if k == 0 {
            0
        } else {
            induced_rank(&pr_map(k).mul(&a_map(k)), b, k - 1, m, k)
        };
        spots.push(spot(format!("H{k}(M,∂M)"), hc[k], rin, rout, comp));
        // Hᵏ(M): in via pr, out via r.
        let rin = rout;
        let rout = induced_rank(&r_map(k), m, k, b, k);
        let comp = induced_rank(&r_map(k).mul(&pr_map(k)), &cone, k, b, k);
        spots.push(spot(format!("H{k}(M)"), *hm.get(k).unwrap_or(&0), rin, rout, comp));
        // Hᵏ(∂M): in via r, out via a into H^{k+1}(cone).
        if k < b.dims.len() {
            let rin = rout;
            let rout = induced_rank(&a_map(k + 1), b, k, &cone, k + 1);
            let comp = induced_rank(&a_map(k + 1).mul(&r_map(k)), m, k, &cone, k + 1);
            connecting.push(rout);
            spots.push(spot(format!("H{k}(∂M)"), hb[k], rin, rout, comp));
        }
    }
    Ok(LesReport {
        spots,
        connecting_ranks: connecting,
    })
}

fn spot(group: String, dim: usize, rank_in: usize, rank_out: usize, composite_rank: usize) -> Spot {
    Spot {
        exact: composite_rank == 0 && dim >= rank_out && dim - rank_out == rank_in,
        group,
        dim,
        rank_in,
        rank_out,
        composite_rank,
    }
}

/// Oriented simplicial complex given by its top simplices (vertex lists).
#[derive(Clone, Debug)]
pub struct Mesh {
    pub name: String,
    pub n: usize,
    pub top: Vec<Vec<usize>>,
}

impl Mesh {
    /// All faces by dimension, sorted.
    pub fn simplices(&self) -> Vec<Vec<Vec<usize>>> {
        let mut by_dim: Vec<std::collections::BTreeSet<Vec<usize>>> = vec![Default::default(); self.n + 1];
        for t in &self.top {
            let mut t = t.clone();
            t.sort_unstable();
            for mask in 1u32..(1 << t.len()) {
                let f: Vec<usize> = t
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                by_dim[f.len() - 1].insert(f);
            }
        }
        by_dim.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// `(n−1)`-faces lying in exactly one top simplex, closed under faces.
    pub fn boundary_simplices(&self) -> Vec<Vec<Vec<usize>>> {
        if self.n == 0 {
            return vec![];
        }
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for t in &self.top {
            let mut t = t.clone();
            t.sort_unstable();
            for i in 0..t.len() {
                let mut f = t.clone();
                f.remove(i);
                *count.entry(f).or_default() += 1;
            }
        }
        let facets: Vec<Vec<usize>> = count.into_iter().filter(|(_, c)| *c == 1).map(|(f, _)| f).collect();
        if facets.is_empty() {
            return vec![];
        }
        Mesh {
            name: String::new(),
            n: self.n - 1,
            top: facets,
        }
        .simplices()
    }

    /// Consistent orientation of the top simplices, if one exists.
    pub fn orientation(&self) -> Option<Vec<i8>> {
        let sorted: Vec<Vec<usize>> = self
            .top
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.sort_unstable();
                t
            })
            .collect();
        let mut faces: BTreeMap<Vec<usize>, Vec<(usize, i8)>> = BTreeMap::new();
        for (ti, t) in sorted.iter().enumerate() {
            for i in 0..t.len() {
                let mut f = t.clone();
                f.remove(i);
                faces.entry(f).or_default().push((ti, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        let mut sign = vec![0i8; sorted.len()];
        for start in 0..sorted.len() {
            if sign[start] != 0 {
                continue;
            }
            sign[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for inc in faces.values() {
                    if inc.len() > 2 {
                        return None;
                    }
                    if inc.len() != 2 {
                        continue;
                    }
                    let (a, b) = (inc[0], inc[1]);
                    let (me, other) = if a.0 == t {
                        (a, b)
                    } else if b.0 == t {
                        (b, a)
                    } else {
                        continue;
                    };
                    // Neighbors induce opposite orientations on a shared face.
                    let want = -sign[t] * me.1 * other.1;
                    if sign[other.0] == 0 {
                        sign[other.0] = want;
                        queue.push_back(other.0);
                    } else if sign[other.0] != want {
                        return None;
                    }
                }
            }
        }
        Some(sign)
    }

    /// Simplicial cochain complex, coboundary `(δf)(σ) = Σ (−1)^i f(∂_i σ)`.
    pub fn cochains(&self) -> CochainComplex {
        cochains_of(&self.simplices())
    }

    /// `(M, ∂M)` with `r` the restriction of cochains to boundary simplices.
    pub fn pair(&self) -> Result<Pair> {
        if self.orientation().is_none() {
            return Err(Error::Consistency(format!("mesh {} is not orientable", self.name)));
        }
        let all = self.simplices();
        let bd = self.boundary_simplices();
        let m = cochains_of(&all);
        let b = cochains_of(&bd);
        let r = RestrictionData {
            r: (0..bd.len())
                .map(|k| {
                    let mut mat = Matrix::zeros(bd[k].len(), all[k].len());
                    for (i, s) in bd[k].iter().enumerate() {
                        let j = all[k].binary_search(s).expect("boundary simplex in mesh");
                        mat.set(i, j, BigRational::one());
                    }
                    mat
                })
                .collect(),
        };
        Ok(Pair {
            name: self.name.clone(),
            n: self.n,
            m,
            boundary: if bd.is_empty() { CochainComplex::empty() } else { b },
            r,
        })
    }
}

fn cochains_of(simplices: &[Vec<Vec<usize>>]) -> CochainComplex {
    let dims: Vec<usize> = simplices.iter().map(Vec::len).collect();
    let d = (1..simplices.len())
        .map(|k| {
            let mut mat = Matrix::zeros(dims[k], dims[k - 1]);
            for (i, s) in simplices[k].iter().enumerate() {
                for drop in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(drop);
                    let j = simplices[k - 1].binary_search(&f).expect("face present");
                    let v = if drop % 2 == 0 { 1 } else { -1 };
                    mat.set(i, j, BigRational::from_integer(BigInt::from(v)));
                }
            }
            mat
        })
        .collect();
    CochainComplex::new(dims, d).expect("simplicial coboundary squares to zero")
}

/// Path `0 − 1 − … − segments`.
pub fn interval_mesh(segments: usize) -> Mesh {
    Mesh {
        name: "interval".into(),
        n: 1,
        top: (0..segments).map(|i| vec![i, i + 1]).collect(),
    }
}

/// Cycle on `vertices ≥ 3` vertices.
pub fn circle_mesh(vertices: usize) -> Mesh {
    Mesh {
        name: "circle".into(),
        n: 1,
        top: (0..vertices).map(|i| vec![i, (i + 1) % vertices]).collect(),
    }
}

/// Square `0..4` coned to the center `4`.
pub fn disk_mesh() -> Mesh {
    Mesh {
        name: "disk".into(),
        n: 2,
        top: (0..4).map(|i| vec![i, (i + 1) % 4, 4]).collect(),
    }
}

/// Band between an inner ring `0..k` and an outer ring `k..2k`.
fn ring_band(name: &str, k: usize) -> Mesh {
    let mut top = Vec::new();
    for i in 0..k {
        let j = (i + 1) % k;
        top.push(vec![i, j, k + j]);
        top.push(vec![i, k + j, k + i]);
    }
    Mesh {
        name: name.into(),
        n: 2,
        top,
    }
}

/// Planar annulus between two squares.
pub fn annulus_mesh() -> Mesh {
    ring_band("annulus", 4)
}

/// `S¹ × [0, 1]` with triangular cross sections and two layers.
pub fn cylinder_mesh() -> Mesh {
    let k = 3;
    let mut top = ring_band("cylinder", k).top;
    for t in ring_band("", k).top {
        top.push(t.iter().map(|v| v + k).collect());
    }
    Mesh {
        name: "cylinder".into(),
        n: 2,
        top,
    }
}

/// The meshes every duality check runs over.
pub fn mesh_registry() -> Vec<Mesh> {
    vec![
        interval_mesh(3),
        circle_mesh(4),
        disk_mesh(),
        annulus_mesh(),
        cylinder_mesh(),
    ]
}

/// Per-mesh duality data: cone and Dirichlet Betti numbers and `b(M)`.
#[derive(Clone, Debug)]
pub struct DualityReport {
    pub name: String,
    pub n: usize,
    pub cone: Vec<usize>,
    pub dirichlet: Vec<usize>,
    pub absolute: Vec<usize>,
    pub les: LesReport,
    pub euler_ok: bool,
}

impl DualityReport {
    /// `bᵏ(M, ∂M) = b_{n−k}(M)` for all `k`.
    pub fn lefschetz(&self) -> bool {
        (0..=self.n).all(|k| self.cone.get(k).copied().unwrap_or(0) == self.absolute[self.n - k])
    }

    pub fn drel(&self) -> bool {
        let len = self.cone.len().max(self.dirichlet.len());
        (0..len).all(|k| self.cone.get(k).copied().unwrap_or(0) == self.dirichlet.get(k).copied().unwrap_or(0))
    }
}

pub fn duality_report(mesh: &Mesh) -> Result<DualityReport> {
    let p = mesh.pair()?;
    let cone = mapping_cone(&p.m, &p.boundary, &p.r)?;
    Ok(DualityReport {
        name: p.name.clone(),
        n: p.n,
        cone: betti(&cone)?,
        dirichlet: dirichlet_betti(&p.m, &p.boundary, &p.r)?,
        absolute: betti(&p.m)?,
        les: les_check(&p.m, &p.boundary, &p.r)?,
        euler_ok: cone.euler_characteristic() == p.m.euler_characteristic() - p.boundary.euler_characteristic(),
    })
}

/// Largest absolute entry, for reporting.
pub fn max_abs(m: &Matrix) -> BigRational {
    m.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_restriction(c: &CochainComplex) -> RestrictionData {
        RestrictionData {
            r: c.dims.iter().map(|&n| Matrix::identity(n)).collect(),
        }
    }

    #[test]
    fn circle_betti() {
        assert_eq!(betti(&circle_mesh(4).cochains()).unwrap(), vec![1, 1]);
    }

    #[test]
    fn empty_boundary_cone_matches_m() {
        let c = circle_mesh(4).cochains();
        let cone = mapping_cone(&c, &CochainComplex::empty(), &RestrictionData { r: vec![] }).unwrap();
        let neg = c.negated();
        assert_eq!((&cone.dims, &cone.d), (&neg.dims, &neg.d));
        assert_eq!(betti(&cone).unwrap(), betti(&c).unwrap());
        let d = dirichlet_betti(&c, &CochainComplex::empty(), &RestrictionData { r: vec![] }).unwrap();
        assert_eq!(d, vec![1, 1]);
        let les = les_check(&c, &CochainComplex::empty(), &RestrictionData { r: vec![] }).unwrap();
        assert!(les.exact());
    }

    #[test]
    fn identity_cone_is_acyclic() {
        let c = disk_mesh().cochains();
        let cone = mapping_cone(&c, &c, &identity_restriction(&c)).unwrap();
        assert!(betti(&cone).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn registry_betti_numbers() {
        let want = [
            ("interval", vec![0, 1], vec![1, 0]),
            ("circle", vec![1, 1], vec![1, 1]),
            ("disk", vec![0, 0, 1], vec![1, 0, 0]),
            ("annulus", vec![0, 1, 1], vec![1, 1, 0]),
            ("cylinder", vec![0, 1, 1], vec![1, 1, 0]),
        ];
        for (mesh, (name, cone, abs)) in mesh_registry().iter().zip(want) {
            let r = duality_report(mesh).unwrap();
            assert_eq!(r.name, name);
            assert_eq!(r.cone, cone, "{name}");
            assert_eq!(r.absolute, abs, "{name}");
            assert!(r.drel() && r.lefschetz() && r.euler_ok, "{name}");
            assert!(r.les.exact(), "{name}: {:?}", r.les.failures());
        }
    }

    #[test]
    fn annulus_connecting_map() {
        let r = duality_report(&annulus_mesh()).unwrap();
        assert_eq!(r.les.connecting_ranks[0], 1);
    }

    #[test]
    fn errors() {
        let c = interval_mesh(1).cochains();
        let bad = RestrictionData {
            r: vec![Matrix::from_ints(1, 2, &[1, 0]), Matrix::from_ints(1, 1, &[1])],
        };
        let b = CochainComplex::new(vec![1, 1], vec![Matrix::from_ints(1, 1, &[0])]).unwrap();
        assert!(matches!(mapping_cone(&c, &b, &bad), Err(Error::ChainMap(_))));
        let not_complex = CochainComplex {
            dims: vec![1, 1, 1],
            d: vec![Matrix::from_ints(1, 1, &[1]), Matrix::from_ints(1, 1, &[1])],
            labels: vec![],
        };
        assert!(matches!(betti(&not_complex), Err(Error::Complex(_))));
        let pt = CochainComplex::new(vec![1], vec![]).unwrap();
        let two = CochainComplex::new(vec![2], vec![]).unwrap();
        let r = RestrictionData {
            r: vec![Matrix::from_ints(2, 1, &[1, 1])],
        };
        assert!(matches!(dirichlet_betti(&pt, &two, &r), Err(Error::Surjectivity(_))));
    }

    #[test]
    fn moebius_band_is_rejected() {
        let m = Mesh {
            name: "moebius".into(),
            n: 2,
            top: (0..5).map(|i| vec![i, (i + 1) % 5, (i + 2) % 5]).collect(),
        };
        assert!(m.orientation().is_none());
        assert!(m.pair().is_err());
        assert!(disk_mesh().orientation().is_some());
    }
}
