//! Trivialized bundles, projector subbundles, splitting connections, the
//! stereographic embedding and the odd-rank connection triple.
//!
//! Bundles live in a global orthonormal trivialization over each chart.
//! Total spaces of `E`, `DE` and `SE` use coordinates `(v, b)`: fiber
//! coordinates first, then the base ambient coordinates. The sphere bundle
//! `S(ℝ ⊕ E)` uses `(w₀, w, b)`.

use crate::chern_weil::{transgression, Connection};
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, LocalMatrix, MatrixForm, SmoothMap};
use crate::geometry::{ChartDomain, FiberBundleDomain};
use crate::jet::Jet;
use crate::tolerances;

/// Rank-`m` bundle over a chart with a metric connection.
#[derive(Clone, Debug)]
pub struct TrivializedBundle {
    pub rank: usize,
    pub base: ChartDomain,
    pub connection: Connection,
}

impl TrivializedBundle {
    /// Checks that the potential is skew at the base quadrature nodes.
    pub fn new(base: ChartDomain, connection: Connection) -> Result<TrivializedBundle> {
        if connection.dim() != base.ambient_dim() {
            return Err(Error::Chart(format!(
                "connection on {} coordinates over a base with {}",
                connection.dim(),
                base.ambient_dim()
            )));
        }
        let nodes = node_points(&base, 64);
        connection.check_skew(&nodes, 1e-12)?;
        Ok(TrivializedBundle {
            rank: connection.rank,
            base,
            connection,
        })
    }

    /// Product bundle with the trivial connection.
    pub fn trivial(rank: usize, base: ChartDomain) -> TrivializedBundle {
        let dim = base.ambient_dim();
        TrivializedBundle {
            rank,
            base,
            connection: Connection::trivial(rank, dim),
        }
    }

    /// `π*∇` on the total space coordinates `(v, b)`.
    pub fn pulled_to_total(&self) -> Connection {
        let n = self.base.ambient_dim();
        let m = self.rank;
        self.connection
            .pullback(&SmoothMap::projection(m + n, (m..m + n).collect()))
            .expect("projection lands in the base")
            .with_label("π*∇")
    }

    /// Disk bundle `DE`; for rank one the fiber is `[-1, 1]`.
    pub fn disk_bundle(&self) -> FiberBundleDomain {
        disk_bundle(self.rank, &self.base, None)
    }
}

/// Up to `max` base quadrature nodes mapped to ambient coordinates.
pub fn node_points(base: &ChartDomain, max: usize) -> Vec<Vec<f64>> {
    let rule = base.clone().with_order(4.min(base.order.max(1))).rule();
    let step = (rule.len() / max).max(1);
    (0..rule.len())
        .step_by(step)
        .map(|i| {
            let p = rule.node(i);
            match &base.param {
                Some(f) => f.eval(p),
                None => p.to_vec(),
            }
        })
        .collect()
}

/// Disk bundle of rank `m` over `base` (fiber radius 1 unless `order` set).
pub fn disk_bundle(m: usize, base: &ChartDomain, order: Option<usize>) -> FiberBundleDomain {
    let mut fiber = if m == 1 {
        ChartDomain::interval(-1.0, 1.0)
    } else {
        ChartDomain::disk(m)
    };
    if let Some(o) = order {
        fiber = fiber.with_order(o);
    } else if m >= 3 {
        fiber = fiber.with_order(tolerances::FIBER3_ORDER);
    }
    FiberBundleDomain::new(fiber, base.clone())
}

/// The boundary pieces of the disk fibers, forming `SE`, with their signs.
pub fn sphere_bundle_pieces(de: &FiberBundleDomain) -> Vec<(FiberBundleDomain, f64)> {
    de.fiber
        .boundary_faces()
        .into_iter()
        .map(|f| {
            (
                FiberBundleDomain::new(f.domain.with_order(de.fiber.order), de.base.clone()),
                f.sign,
            )
        })
        .collect()
}

/// A subbundle given by an orthonormal frame field, stored with its
/// projector `P = Σ eᵢeᵢᵀ`.
#[derive(Clone, Debug)]
pub struct Subbundle {
    pub parent_rank: usize,
    pub rank: usize,
    /// Frame vectors as matrix-form columns: an `m × m` matrix of 0-forms whose
    /// first `rank` columns are the frame.
    pub frame: MatrixForm,
    pub projector: MatrixForm,
}

fn frame_to_projector(frame: &LocalMatrix, r: usize) -> LocalMatrix {
    let m = frame.m;
    let mut e = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = frame.get(i, 0).scale(0.0);
            for c in 0..r {
                acc = acc.add(&frame.get(i, c).wedge(frame.get(j, c)));
            }
            e.push(acc);
        }
    }
    LocalMatrix { m, e }
}

impl Subbundle {
    /// From a closure returning `rank` orthonormal vectors (each of length
    /// `m`). The frame is validated at `points`.
    pub fn from_frame<F>(m: usize, dim: usize, rank: usize, points: &[Vec<f64>], f: F) -> Result<Subbundle>
    where
        F: Fn(&[Jet]) -> Vec<Vec<Jet>> + Send + Sync + 'static,
    {
        let frame = MatrixForm::functions(m, dim, move |x| {
            let vs = f(x);
            let z = x[0].zero_like();
            let mut e = vec![z; m * m];
            for (c, v) in vs.iter().enumerate() {
                for (i, x) in v.iter().enumerate() {
                    e[i * m + c] = x.clone();
                }
            }
            e
        });
        let fr = frame.clone();
        let projector = MatrixForm::from_local(m, dim, 0, move |p, k| frame_to_projector(&fr.eval(p, k), rank));
        let s = Subbundle {
            parent_rank: m,
            rank,
            frame,
            projector,
        };
        s.check(points)?;
        Ok(s)
    }

    /// The line spanned by a section, normalized.
    pub fn line<F>(m: usize, dim: usize, points: &[Vec<f64>], s: F) -> Result<Subbundle>
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        Subbundle::from_frame(m, dim, 1, points, move |x| {
            let v = s(x);
            let n2 = v.iter().fold(x[0].zero_like(), |a, c| a + c * c);
            let inv = n2.sqrt().recip();
            vec![v.iter().map(|c| c * &inv).collect()]
        })
    }

    /// Largest deviation from `P² = P`, `Pᵀ = P`; errors above tolerance.
    pub fn check(&self, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in points {
            let pm = self.projector.eval(p, 0);
            let sq = pm.wedge(&pm).sub(&pm);
            let tr = pm.transpose().sub(&pm);
            for e in sq.e.iter().chain(&tr.e) {
                worst = worst.max(e.max_abs());
            }
            if !worst.is_finite() {
                return Err(Error::Projector("projector is not finite".into()));
            }
        }
        if worst > tolerances::PROJECTOR {
            return Err(Error::Projector(format!(
                "projector defect {worst:e} exceeds {:e}",
                tolerances::PROJECTOR
            )));
        }
        Ok(worst)
    }
}

/// Compression `P∇P ⊕ Q∇Q`: potential `P dP − dP P + PAP + QAQ`.
pub fn projected_connection(c: &Connection, s: &Subbundle) -> Result<Connection> {
    if s.parent_rank != c.rank {
        return Err(Error::Shape(format!(
            "subbundle of a rank {} bundle, connection of rank {}",
            s.parent_rank, c.rank
        )));
    }
    let (a, p) = (c.potential.clone(), s.projector.clone());
    let m = c.rank;
    Ok(Connection {
        rank: m,
        potential: MatrixForm::from_local(m, c.dim(), 1, move |x, k| {
            let pl = p.eval(x, k + 1);
            let dp = pl.d();
            let pk = pl.truncate(k);
            let q = LocalMatrix::identity(m, pk.dim(), k).sub(&pk);
            let al = a.eval(x, k);
            pk.wedge(&dp)
                .sub(&dp.wedge(&pk))
                .add(&pk.wedge(&al).wedge(&pk))
                .add(&q.wedge(&al).wedge(&q))
        }),
        label: format!("compression of {}", c.label),
    })
}

/// Trivial connection on the framed subbundle (in its frame), projected
/// connection on the complement: potential `E dEᵀ − Q dP + QAQ`.
pub fn split_connection(c: &Connection, s: &Subbundle) -> Result<Connection> {
    if s.parent_rank != c.rank {
        return Err(Error::Shape(format!(
            "subbundle of a rank {} bundle, connection of rank {}",
            s.parent_rank, c.rank
        )));
    }
    let (a, fr) = (c.potential.clone(), s.frame.clone());
    let m = c.rank;
    let r = s.rank;
    Ok(Connection {
        rank: m,
        potential: MatrixForm::from_local(m, c.dim(), 1, move |x, k| {
            let mut f = fr.eval(x, k + 1);
            // keep only the frame columns
            for i in 0..m {
                for col in r..m {
                    f.e[i * m + col] = f.e[i * m + col].scale(0.0);
                }
            }
            let pl = frame_to_projector(&f, r);
            let dp = pl.d();
            let pk = pl.truncate(k);
            let q = LocalMatrix::identity(m, pk.dim(), k).sub(&pk);
            let al = a.eval(x, k);
            let fk = f.truncate(k);
            fk.wedge(&f.transpose().d())
                .sub(&q.wedge(&dp))
                .add(&q.wedge(&al).wedge(&q))
        }),
        label: format!("split of {}", c.label),
    })
}

/// `∇¹ = d ⊕ ∇^⊥` for the line spanned by a section `s`, after checking
/// `|s| ≥ threshold` at `points`.
pub fn section_splitting_connection<F>(c: &Connection, s: F, points: &[Vec<f64>], threshold: f64) -> Result<Connection>
where
    F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
{
    let m = c.rank;
    let dim = c.dim();
    let mut min_norm = f64::INFINITY;
    for p in points {
        let v = s(&Jet::vars(p, 0));
        min_norm = min_norm.min(v.iter().map(|j| j.value().powi(2)).sum::<f64>().sqrt());
    }
    if min_norm < threshold {
        return Err(Error::VanishingSection { min_norm, threshold });
    }
    let sub = Subbundle::line(m, dim, points, s)?;
    Ok(split_connection(c, &sub)?.with_label("d ⊕ ∇^⊥"))
}

/// `TPf(∇, s) := TPf(∇_s, ∇)` where `∇_s` splits off the line of `s`.
pub fn section_transgression<F>(c: &Connection, s: F, points: &[Vec<f64>]) -> Result<DifferentialForm>
where
    F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
{
    let split = section_splitting_connection(c, s, points, tolerances::VANISHING_SECTION)?;
    transgression(&split, c)
}

/// Levi-Civita connection of the round `S²` in the frame `(e_θ, e_φ)` over
/// the box chart `(θ, φ) ∈ [0, θ₀] × [0, 2π]`.
pub fn round_sphere_tangent(theta0: f64) -> Result<TrivializedBundle> {
    let base = ChartDomain::boxed(vec![0.0, 0.0], vec![theta0, 2.0 * std::f64::consts::PI]);
    let c = Connection::from_jets(2, 2, "levi-civita", |x| {
        let c = x[0].cos();
        let z = c.zero_like();
        vec![
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), -&c, c.clone(), z],
        ]
    });
    TrivializedBundle::new(base, c)
}

/// `𝒮(v) = (1 − |v|², 2v) / (1 + |v|²)`.
pub fn stereographic(v: &[f64]) -> Vec<f64> {
    let n2: f64 = v.iter().map(|x| x * x).sum();
    let mut out = vec![(1.0 - n2) / (1.0 + n2)];
    out.extend(v.iter().map(|x| 2.0 * x / (1.0 + n2)));
    out
}

/// `𝒮 × id_B` from `(v, b)` to `(w₀, w, b)`.
pub fn stereographic_map(m: usize, n: usize) -> SmoothMap {
    SmoothMap::new(m + n, m + 1 + n, move |x| {
        let n2 = x[..m].iter().fold(x[0].zero_like(), |a, c| a + c * c);
        let inv = (&n2 + 1.0).recip();
        let mut out = vec![(1.0 - &n2) * &inv];
        out.extend(x[..m].iter().map(|c| c * &inv * 2.0));
        out.extend_from_slice(&x[m..]);
        out
    })
}

/// Disk, sphere and `S(ℝ ⊕ E)` bundles of a trivialized bundle.
#[derive(Clone, Debug)]
pub struct AssociatedBundles {
    pub rank: usize,
    pub de: FiberBundleDomain,
    pub se: Vec<(FiberBundleDomain, f64)>,
    pub sre: FiberBundleDomain,
}

impl AssociatedBundles {
    pub fn new(e: &TrivializedBundle) -> AssociatedBundles {
        let de = e.disk_bundle();
        let se = sphere_bundle_pieces(&de);
        let mut sphere = ChartDomain::sphere(e.rank);
        if e.rank >= 3 {
            sphere = sphere.with_order(tolerances::FIBER3_ORDER);
        }
        AssociatedBundles {
            rank: e.rank,
            de,
            se,
            sre: FiberBundleDomain::new(sphere, e.base.clone()),
        }
    }
}

/// Connections on `ℝ ⊕ π*E` over `S(ℝ ⊕ E)` in coordinates `(w₀, w, b)`.
#[derive(Clone, Debug)]
pub struct OddRankTriple {
    /// Split by the tautological line `ℝ(w₀, w)`.
    pub nabla1: Connection,
    /// Split by the constant line `ℝ(1, 0)`: `d ⊕ π*∇`.
    pub nabla2: Connection,
    /// Split by the plane `𝒫 = ⟨(1,0), (0,w)/|w|⟩`, defined off the poles.
    pub nabla3: Connection,
    pub rank: usize,
    pub base_dim: usize,
}

/// `d ⊕ π*∇` on `ℝ ⊕ π*E` over the `(w₀, w, b)` coordinates.
pub fn direct_sum_connection(e: &TrivializedBundle) -> Connection {
    let m = e.rank;
    let n = e.base.ambient_dim();
    let a = e.connection.potential.clone();
    let big = m + 1;
    let dim = m + 1 + n;
    Connection {
        rank: big,
        potential: MatrixForm::from_local(big, dim, 1, move |x, k| {
            let l = a.eval(&x[m + 1..], k).lift_leading(m + 1);
            let mut out = LocalMatrix::zero(big, dim, 1, k);
            for i in 0..m {
                for j in 0..m {
                    out.e[(i + 1) * big + j + 1] = l.e[i * m + j].clone();
                }
            }
            out
        }),
        label: "d ⊕ π*∇".into(),
    }
}

/// `𝒫`-frame at `(w₀, w)`: `(1, 0)` and `(0, w)/|w|`.
pub fn plane_frame(w: &[Jet]) -> [Vec<Jet>; 2] {
    let z = w[0].zero_like();
    let mut e0 = vec![z.cst(1.0)];
    e0.extend(w.iter().map(|_| z.clone()));
    let n2 = w.iter().fold(z.clone(), |a, c| a + c * c);
    let inv = n2.sqrt().recip();
    let mut u = vec![z.clone()];
    u.extend(w.iter().map(|c| c * &inv));
    [e0, u]
}

/// The connection triple of an odd-rank bundle.
pub fn odd_rank_triple(e: &TrivializedBundle) -> Result<OddRankTriple> {
    let m = e.rank;
    if m.is_multiple_of(2) {
        return Err(Error::Rank(format!("odd-rank triple for a rank {m} bundle")));
    }
    let n = e.base.ambient_dim();
    let dim = m + 1 + n;
    let big = m + 1;
    let base = direct_sum_connection(e);
    let mut pts = Vec::new();
    for j in 0..6 {
        let mut p = vec![0.0; dim];
        let a = 0.4 + 0.37 * j as f64;
        p[0] = a.cos();
        p[1] = a.sin();
        for (i, x) in p.iter_mut().enumerate().skip(m + 1) {
            *x = 0.1 * i as f64;
        }
        pts.push(p);
    }
    let taut = Subbundle::line(big, dim, &pts, move |x| x[..big].to_vec())?;
    let nabla1 = split_connection(&base, &taut)?.with_label("∇¹");
    let nabla2 = base.clone().with_label("∇²");
    let plane = Subbundle::from_frame(big, dim, 2, &pts, move |x| plane_frame(&x[1..big]).to_vec())?;
    let nabla3 = split_connection(&base, &plane)?.with_label("∇³");
    Ok(OddRankTriple {
        nabla1,
        nabla2,
        nabla3,
        rank: m,
        base_dim: n,
    })
}

impl OddRankTriple {
    /// The triple pulled back to `(v, b)` coordinates along `𝒮 × id`.
    pub fn on_disk_bundle(&self) -> Result<[Connection; 3]> {
        let s = stereographic_map(self.rank, self.base_dim);
        Ok([
            self.nabla1.pullback(&s)?.with_label("𝒮*∇¹"),
            self.nabla2.pullback(&s)?.with_label("𝒮*∇²"),
            self.nabla3.pullback(&s)?.with_label("𝒮*∇³"),
        ])
    }
}

/// Named bundles used by scenarios: `(name, bundle)` in a fixed order.
pub fn bundle_registry() -> Result<Vec<(&'static str, TrivializedBundle)>> {
    let circle = ChartDomain::interval(0.0, 2.0 * std::f64::consts::PI);
    let twisted = Connection::from_jets(3, 1, "twisted", |x| {
        let a = &x[0] * 0.8;
        let b = (&x[0] * 2.0).sin() * 0.5;
        let z = a.zero_like();
        vec![vec![
            z.clone(),
            a.clone(),
            b.clone(),
            -&a,
            z.clone(),
            a.cst(0.3),
            -&b,
            a.cst(-0.3),
            z,
        ]]
    });
    Ok(vec![
        ("plane-point", TrivializedBundle::trivial(2, ChartDomain::point(vec![]))),
        ("plane-disk", TrivializedBundle::trivial(2, ChartDomain::disk(2))),
        ("tangent-s2", round_sphere_tangent(std::f64::consts::PI)?),
        ("line-point", TrivializedBundle::trivial(1, ChartDomain::point(vec![]))),
        ("line-circle", TrivializedBundle::trivial(1, circle)),
        ("rank3-point", TrivializedBundle::trivial(3, ChartDomain::point(vec![]))),
        (
            "rank3-interval",
            TrivializedBundle::new(ChartDomain::interval(0.0, 1.0), twisted)?,
        ),
    ])
}

pub fn registry_bundle(name: &str) -> Result<TrivializedBundle> {
    bundle_registry()?
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, b)| b)
        .ok_or_else(|| Error::Config(format!("no bundle named {name}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn max_diff(a: &LocalMatrix, b: &LocalMatrix) -> f64 {
        a.sub(b).e.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
    }

    #[test]
    fn stereographic_values() {
        assert_eq!(stereographic(&[0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(stereographic(&[0.6, 0.8]), vec![0.0, 0.6, 0.8]);
        let s = stereographic(&[2.0]);
        assert_abs_diff_eq!(s[0], -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(s[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn identity_projector_keeps_connection() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let c = Connection::new(crate::random::random_skew_potential(2, 2, 1.0, &mut rng), "a").unwrap();
        let pts = vec![vec![0.1, 0.2]];
        let full = Subbundle::from_frame(2, 2, 2, &pts, |x| {
            let z = x[0].zero_like();
            vec![vec![z.cst(1.0), z.clone()], vec![z.clone(), z.cst(1.0)]]
        })
        .unwrap();
        let p = projected_connection(&c, &full).unwrap();
        assert!(max_diff(&p.potential.eval(&[0.3, -0.2], 1), &c.potential.eval(&[0.3, -0.2], 1)) < 1e-14);
    }

    #[test]
    fn tautological_split_on_circle_is_angular_form() {
        // On ℝ² \ 0 the split by (x, y) has potential [[0, dθ], [−dθ, 0]]
        // in the frame-free form e deᵀ − de eᵀ.
        let flat = Connection::trivial(2, 2);
        let pts = vec![vec![1.0, 0.5]];
        let c = section_splitting_connection(&flat, |x| x.to_vec(), &pts, 1e-8).unwrap();
        let (x, y) = (0.6, 0.8);
        let a = c.potential.eval(&[x, y], 0);
        let dth = [-y / (x * x + y * y), x / (x * x + y * y)];
        for i in 0..2 {
            assert_abs_diff_eq!(a.get(0, 1).c[i].value(), dth[i], epsilon = 1e-14);
            assert_abs_diff_eq!(a.get(1, 0).c[i].value(), -dth[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn splitting_is_scale_invariant() {
        let flat = Connection::trivial(2, 2);
        let pts = vec![vec![1.0, 0.5]];
        let a = section_splitting_connection(&flat, |x| x.to_vec(), &pts, 1e-8).unwrap();
        let b = section_splitting_connection(&flat, |x| x.iter().map(|c| c * 3.0).collect(), &pts, 1e-8).unwrap();
        let p = [0.3, -0.7];
        assert!(max_diff(&a.potential.eval(&p, 2), &b.potential.eval(&p, 2)) < 1e-14);
    }

    #[test]
    fn constant_section_on_flat_bundle_is_flat() {
        let flat = Connection::trivial(2, 2);
        let c = section_splitting_connection(
            &flat,
            |x| vec![x[0].cst(1.0), x[0].zero_like()],
            &[vec![0.0, 0.0]],
            1e-8,
        )
        .unwrap();
        assert!(c.potential.eval(&[0.2, 0.4], 1).e.iter().all(|e| e.max_abs() == 0.0));
    }

    #[test]
    fn vanishing_section_is_rejected() {
        let flat = Connection::trivial(2, 2);
        let r = section_splitting_connection(&flat, |x| x.to_vec(), &[vec![0.0, 0.0]], 1e-8);
        assert!(matches!(r, Err(Error::VanishingSection { .. })));
    }

    #[test]
    fn rank_one_triple_over_point() {
        let e = TrivializedBundle::trivial(1, ChartDomain::point(vec![]));
        let t = odd_rank_triple(&e).unwrap();
        // ∇² is flat; ∇¹ is the angular form of (w₀, w).
        let p = [0.6, 0.8];
        assert!(t.nabla2.potential.eval(&p, 1).e.iter().all(|e| e.max_abs() == 0.0));
        let a = t.nabla1.potential.eval(&p, 0);
        assert_abs_diff_eq!(a.get(1, 0).c[0].value(), 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(a.get(1, 0).c[1].value(), -0.6, epsilon = 1e-14);
        assert!(odd_rank_triple(&TrivializedBundle::trivial(2, ChartDomain::point(vec![]))).is_err());
    }

    #[test]
    fn plane_frame_orthonormal_on_equator() {
        let w = Jet::vars(&[0.3, -0.5, 0.2], 0);
        let [e0, u] = plane_frame(&w);
        let dot = |a: &Vec<Jet>, b: &Vec<Jet>| a.iter().zip(b).map(|(x, y)| x.value() * y.value()).sum::<f64>();
        assert_abs_diff_eq!(dot(&e0, &e0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dot(&u, &u), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dot(&e0, &u), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn first_and_third_agree_along_equator() {
        // Off the normal direction dw₀ the two potentials coincide on w₀ = 0.
        let e = TrivializedBundle::trivial(3, ChartDomain::point(vec![]));
        let t = odd_rank_triple(&e).unwrap();
        let p = [0.0, 0.48, -0.6, 0.64];
        let (a, b) = (t.nabla1.potential.eval(&p, 0), t.nabla3.potential.eval(&p, 0));
        for (x, y) in a.e.iter().zip(&b.e) {
            for i in 1..4 {
                assert_abs_diff_eq!(x.c[i].value(), y.c[i].value(), epsilon = 1e-14);
            }
        }
    }
}
