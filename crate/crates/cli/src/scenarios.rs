//! The scenario registry. Each runner turns one family of identities into
//! report items; `Config` overrides quadrature orders and tolerances.

use crate::report::{Item, Provenance};
use cgb_core::bundles::{bundle_registry, plane_frame, registry_bundle, round_sphere_tangent, TrivializedBundle};
use cgb_core::chern_weil::{
    pf_form, secondary_transgression, symmetry_check, transgression, BundleIsomorphism, Connection,
    SimplexConnectionFamily, SymmetryData,
};
use cgb_core::discrete::{duality_report, mesh_registry};
use cgb_core::forms::{DifferentialForm, MatrixForm, SmoothMap};
use cgb_core::geometry::{stokes_residual, ChartDomain};
use cgb_core::jet::Jet;
use cgb_core::random::{random_disk_point, random_form, random_point, random_skew_potential};
use cgb_core::relative::{
    homotopy_first_residual, homotopy_second_residual, lefschetz_i_residual, pair_d, radial_flow_scenario,
    signed_zero_count, FormPair,
};
use cgb_core::thom::{
    cgb_defect, cgb_flat_disk, cgb_round_sphere, cgb_spherical_cap, dual_zero_count, fiber_integral_compact,
    left_square_residual, mu, nu, nu_inverse_even, nu_sign_law, persistent_section_vanishing, reflection_check,
    resolve_odd_ordering, sphere_zero_set_check, thom_form, BumpProfile, OddOrdering, OddOrders,
};
use cgb_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use Provenance::{Derived, Paper, Trivial};

/// Run-wide overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Replaces each scenario's default quadrature order.
    pub quad_order: Option<usize>,
    /// Replaces each item's default tolerance.
    pub tol: Option<f64>,
    pub seed: u64,
    /// Random test forms per identity.
    pub samples: usize,
    /// Bundle rank for scenarios that take one.
    pub rank: Option<usize>,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            quad_order: None,
            tol: None,
            seed: 0,
            samples: 50,
            rank: None,
        }
    }
}

impl Config {
    fn order(&self, default: usize) -> usize {
        self.quad_order.unwrap_or(default)
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// A generator seeded from the run seed and the scenario name, so a
    /// scenario's samples do not depend on which others run.
    fn rng(&self, name: &str) -> ChaCha8Rng {
        let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
        });
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

pub type Runner = fn(&Config) -> Result<Vec<Item>>;

pub struct Scenario {
    pub name: &'static str,
    pub modules: &'static [&'static str],
    pub description: &'static str,
    pub run: Runner,
}

impl Scenario {
    pub fn exercises(&self, module: &str) -> bool {
        self.modules.contains(&module)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |a, r| Ok(a.max(r?)))
}

/// Every registered scenario, in listing order.
pub fn registry() -> Vec<Scenario> {
    macro_rules! sc {
        ($name:expr, [$($m:expr),*], $desc:expr, $run:expr) => {
            Scenario { name: $name, modules: &[$($m),*], description: $desc, run: $run }
        };
    }
    vec![
        sc!(
            "cgb-sphere",
            ["thom", "chern_weil", "geometry"],
            "∫ Pf over the round S² equals χ = 2",
            cgb_sphere
        ),
        sc!(
            "cgb-flat-disk",
            ["thom", "chern_weil"],
            "CGB on the flat unit disk with the collar connection",
            cgb_disk
        ),
        sc!(
            "cgb-caps",
            ["thom", "chern_weil"],
            "CGB on spherical caps of three radii",
            cgb_caps
        ),
        sc!(
            "stokes",
            ["geometry", "forms"],
            "Stokes on [0,1]×[0,1]² with the boundary sign convention",
            stokes
        ),
        sc!(
            "exterior-derivative",
            ["forms"],
            "d² = 0 and the Leibniz rule on random polynomial forms",
            exterior
        ),
        sc!(
            "transgression-law",
            ["chern_weil"],
            "dTPf(∇¹,∇²) = Pf(∇²) − Pf(∇¹) on D²",
            transgression_law
        ),
        sc!(
            "secondary-transgression",
            ["chern_weil"],
            "dTPf(∇¹,∇²,∇³) plus the edge transgressions vanishes on S¹",
            secondary
        ),
        sc!(
            "symmetry-rotation",
            ["chern_weil", "bundles"],
            "Pf of TS² is invariant under rotation",
            symmetry_rotation
        ),
        sc!(
            "reflection-symmetry",
            ["chern_weil", "thom"],
            "TPf(∇³,∇¹) under the fiber reflection and its blow-up integral",
            reflection
        ),
        sc!(
            "plane-frame",
            ["bundles"],
            "the frame of the 2-plane bundle is orthonormal",
            plane_frame_check
        ),
        sc!(
            "persistent-sections",
            ["bundles", "thom"],
            "TPf(∇¹,∇³) and TPf(∇²,∇³) vanish on SE for odd ranks",
            persistent_sections
        ),
        sc!(
            "thom-form",
            ["thom", "bundles"],
            "the compactly supported Thom form integrates to 1 on fibers",
            thom_form_fibers
        ),
        sc!(
            "nu-roundtrip-even",
            ["thom", "relative"],
            "ν ∘ ν⁻¹ = id over S² in even rank",
            nu_roundtrip
        ),
        sc!(
            "odd-rank-point",
            ["thom", "bundles"],
            "ν of the odd-rank pair over a point (--rank 1 or 3)",
            odd_rank_point
        ),
        sc!(
            "left-square",
            ["thom"],
            "fiber integral of μ(p) agrees with ν(p)",
            left_square
        ),
        sc!(
            "sign-law",
            ["thom", "relative"],
            "ν(d p) against dν(p), stated and derived signs",
            sign_law
        ),
        sc!("mu-chain", ["thom", "relative"], "μ(d p) = −d μ(p)", mu_chain),
        sc!(
            "zero-count",
            ["relative", "thom"],
            "dual zero count on D² matches the signed zero count",
            zero_count
        ),
        sc!(
            "cgb-a-sphere",
            ["relative", "thom"],
            "𝓛_II(Pf) equals the zero-set current on S²",
            cgb_a_sphere
        ),
        sc!(
            "pair-complex",
            ["relative"],
            "pair_d² = 0 and the weak 𝓛_I identity on D²",
            pair_complex
        ),
        sc!(
            "homotopy-first",
            ["relative"],
            "first homotopy identity on the radial flow",
            homotopy_first
        ),
        sc!(
            "homotopy-second",
            ["relative"],
            "second homotopy identity on the radial flow, stated and flipped sign",
            homotopy_second
        ),
        sc!(
            "discrete-duality",
            ["discrete"],
            "cone Betti numbers, Lefschetz duality and exact sequences on meshes",
            discrete
        ),
    ]
}

pub fn find(name: &str) -> Option<Scenario> {
    registry().into_iter().find(|s| s.name == name)
}

fn cgb_sphere(cfg: &Config) -> Result<Vec<Item>> {
    let r = cgb_defect(&cgb_round_sphere(cfg.order(24))?)?;
    Ok(vec![Item::new(
        "∫_S² Pf(∇) = 2",
        r.pf_integral,
        2.0,
        cfg.tol(1e-8),
        Paper,
    )])
}

fn cgb_disk(cfg: &Config) -> Result<Vec<Item>> {
    let r = cgb_defect(&cgb_flat_disk(cfg.order(16))?)?;
    Ok(vec![
        Item::new("∫_D² Pf(∇) = 0", r.pf_integral, 0.0, cfg.tol(1e-7), Derived),
        Item::residual("χ − ∫Pf + ∫_∂ TPf", r.defect, cfg.tol(1e-7), Derived),
    ])
}

fn cgb_caps(cfg: &Config) -> Result<Vec<Item>> {
    [PI / 6.0, PI / 2.0, 2.0 * PI / 3.0]
        .into_iter()
        .map(|th| {
            let s = cgb_spherical_cap(th, cfg.order(16))?;
            let r = cgb_defect(&s)?;
            Ok(Item::residual(
                format!("CGB defect {}", s.name),
                r.defect,
                cfg.tol(1e-6),
                Derived,
            ))
        })
        .collect()
}

fn stokes(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("stokes");
    let d = ChartDomain::product(vec![ChartDomain::interval(0.0, 1.0), ChartDomain::unit_cube(2)])
        .with_order(cfg.order(16));
    let w = worst((0..cfg.samples).map(|_| stokes_residual(&random_form(3, 2, &mut rng), &d, true)))?;
    Ok(vec![Item::residual(
        "∫ dα − Σ sign ∫_face α",
        w,
        cfg.tol(1e-8),
        Derived,
    )])
}

fn exterior(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("exterior-derivative");
    let (mut dd, mut leibniz) = (0.0f64, 0.0f64);
    for i in 0..cfg.samples {
        let (p, q) = (i % 3, (i / 3) % 2);
        let a = random_form(3, p, &mut rng);
        let b = random_form(3, q, &mut rng);
        let lhs = a.wedge(&b)?.d();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.d().wedge(&b)?.add(&a.wedge(&b.d())?.scale(sign))?;
        let x = random_point(&[-1.0; 3], &[1.0; 3], &mut rng);
        dd = dd.max(max_abs(&a.d().d().values(&x)));
        leibniz = leibniz.max(
            lhs.values(&x)
                .iter()
                .zip(rhs.values(&x))
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max),
        );
    }
    Ok(vec![
        Item::residual("d(dα) = 0", dd, cfg.tol(1e-10), Trivial),
        Item::residual("d(α∧β) = dα∧β + (−1)^p α∧dβ", leibniz, cfg.tol(1e-10), Trivial),
    ])
}

fn transgression_law(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("transgression-law");
    let ranks = match cfg.rank {
        Some(m) => vec![m],
        None => vec![2, 4],
    };
    let mut items = Vec::new();
    for m in ranks {
        let c1 = Connection::new(random_skew_potential(m, 2, 0.5, &mut rng), "∇¹")?;
        let c2 = Connection::new(random_skew_potential(m, 2, 0.5, &mut rng), "∇²")?;
        let lhs = transgression(&c1, &c2)?.d();
        let rhs = pf_form(&c2)?.sub(&pf_form(&c1)?)?;
        let mut w: f64 = 0.0;
        for _ in 0..cfg.samples {
            let x = random_disk_point(1.0, &mut rng);
            let r: Vec<f64> = lhs.values(&x).iter().zip(rhs.values(&x)).map(|(a, b)| a - b).collect();
            w = w.max(max_abs(&r));
        }
        items.push(Item::residual(
            format!("dTPf = Pf(∇²) − Pf(∇¹), rank {m}"),
            w,
            cfg.tol(1e-7),
            Derived,
        ));
    }
    Ok(items)
}

fn secondary(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("secondary-transgression");
    let cs: Vec<Connection> = (0..3)
        .map(|_| Connection::new(random_skew_potential(2, 1, 0.7, &mut rng), "∇"))
        .collect::<Result<_>>()?;
    let ds = secondary_transgression(&SimplexConnectionFamily::new(&cs[0], &cs[1], &cs[2])?)?.d();
    let edges = [(0, 1), (1, 2), (2, 0)]
        .iter()
        .map(|&(a, b)| transgression(&cs[a], &cs[b]))
        .collect::<Result<Vec<_>>>()?;
    let mut w: f64 = 0.0;
    for _ in 0..cfg.samples {
        let x = random_point(&[0.0], &[2.0 * PI], &mut rng);
        let sum: f64 = edges.iter().map(|e| e.values(&x)[0]).sum();
        w = w.max((ds.values(&x)[0] + sum).abs());
    }
    Ok(vec![Item::residual(
        "dTPf(∇¹,∇²,∇³) + Σ TPf(edges)",
        w,
        cfg.tol(1e-6),
        Derived,
    )])
}

fn symmetry_rotation(cfg: &Config) -> Result<Vec<Item>> {
    let s2 = round_sphere_tangent(PI)?;
    let iso = BundleIsomorphism {
        phi: SmoothMap::new(2, 2, |x| vec![x[0].clone(), &x[1] + 0.9]),
        psi: MatrixForm::identity(2, 2),
    };
    let pts = vec![vec![0.4, 1.0], vec![2.0, 4.0], vec![1.1, 0.3]];
    let r = symmetry_check(&SymmetryData::Pf(s2.connection.clone()), &iso, &pts)?;
    Ok(vec![Item::residual("φ*Pf(∇) − Pf(∇)", r, cfg.tol(1e-8), Trivial)])
}

fn reflection(cfg: &Config) -> Result<Vec<Item>> {
    let r = reflection_check(&registry_bundle("rank3-point")?, cfg.order(12))?;
    Ok(vec![
        Item::residual("φ*TPf(∇³,∇¹) − TPf(∇³,∇¹)", r.deviation, cfg.tol(1e-8), Paper),
        Item::residual("∫_blow-up TPf(∇³,∇¹)", r.integral, cfg.tol(1e-6), Paper),
    ])
}

fn plane_frame_check(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("plane-frame");
    let mut w: f64 = 0.0;
    for _ in 0..cfg.samples {
        let v = random_point(&[-1.0; 3], &[1.0; 3], &mut rng);
        let [e0, u] = plane_frame(&Jet::vars(&v, 0));
        let dot = |a: &[Jet], b: &[Jet]| a.iter().zip(b).map(|(x, y)| x.value() * y.value()).sum::<f64>();
        w = w
            .max((dot(&e0, &e0) - 1.0).abs())
            .max((dot(&u, &u) - 1.0).abs())
            .max(dot(&e0, &u).abs());
    }
    Ok(vec![Item::residual(
        "frame Gram matrix − I",
        w,
        cfg.tol(1e-12),
        Trivial,
    )])
}

fn persistent_sections(cfg: &Config) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for (name, e) in bundle_registry()? {
        if e.rank % 2 == 1 && cfg.rank.is_none_or(|r| r == e.rank) {
            let (a, b) = persistent_section_vanishing(&e, cfg.samples.min(24))?;
            items.push(Item::residual(
                format!("TPf(∇¹,∇³)|SE on {name}"),
                a,
                cfg.tol(1e-8),
                Paper,
            ));
            items.push(Item::residual(
                format!("TPf(∇²,∇³)|SE on {name}"),
                b,
                cfg.tol(1e-8),
                Paper,
            ));
        }
    }
    Ok(items)
}

fn thom_form_fibers(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("thom-form");
    let e = registry_bundle("plane-disk")?;
    let fiber = fiber_integral_compact(&thom_form(&e, BumpProfile::standard())?, 2, &e.base, cfg.order(6))?;
    let mut w: f64 = 0.0;
    for _ in 0..cfg.samples.min(4) {
        w = w.max((fiber.values(&random_disk_point(0.95, &mut rng))[0] - 1.0).abs());
    }
    Ok(vec![Item::residual("∫_fiber Thom − 1", w, cfg.tol(1e-6), Paper)])
}

fn nu_roundtrip(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("nu-roundtrip-even");
    let s2 = round_sphere_tangent(PI)?;
    let mut w: f64 = 0.0;
    for eta in [
        DifferentialForm::constant(2, 1.0),
        DifferentialForm::new(2, 2, |x| vec![x[0].sin()]),
    ] {
        let back = nu(&nu_inverse_even(&eta, &s2)?, &s2.disk_bundle())?.form();
        for _ in 0..cfg.samples.min(10) {
            let x = random_point(&[0.05, 0.0], &[PI - 0.05, 2.0 * PI], &mut rng);
            w = w.max((back.values(&x)[0] - eta.values(&x)[0]).abs());
        }
    }
    Ok(vec![Item::residual("ν(ν⁻¹ η) − η", w, cfg.tol(1e-6), Paper)])
}

fn odd_rank_point(cfg: &Config) -> Result<Vec<Item>> {
    let rank = cfg.rank.unwrap_or(1);
    let (name, orders, tol) = match rank {
        1 => ("line-point", OddOrders::default(), 1e-8),
        3 => (
            "rank3-point",
            OddOrders {
                path: cfg.order(12),
                simplex: cfg.order(12),
            },
            1e-4,
        ),
        _ => {
            return Err(cgb_core::Error::Config(format!(
                "odd-rank-point supports rank 1 or 3, got {rank}"
            )));
        }
    };
    let r = resolve_odd_ordering(&registry_bundle(name)?, &[], orders, tol)?;
    let computed = match r.chosen {
        Some(OddOrdering::Swapped) => r.swapped,
        _ => r.tautological,
    };
    Ok(vec![Item::new(
        format!("ν(pair) = 1, rank {rank}"),
        computed,
        1.0,
        cfg.tol(tol),
        Derived,
    )])
}

fn left_square(cfg: &Config) -> Result<Vec<Item>> {
    let e = TrivializedBundle::trivial(2, ChartDomain::interval(0.0, 1.0));
    let eta = DifferentialForm::constant(1, 1.0);
    let p = nu_inverse_even(&eta, &e)?;
    let r = left_square_residual(&p, &e, BumpProfile::standard(), &[vec![0.4], vec![0.8]])?;
    Ok(vec![Item::residual("∫_E/B μ(p) − ν(p)", r, cfg.tol(1e-6), Paper)])
}

fn sign_law(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("sign-law");
    let (mut stated, mut derived) = (0.0f64, 0.0f64);
    let base = ChartDomain::interval(0.0, 1.0);
    for i in 0..cfg.samples {
        let (m, k) = if i % 2 == 0 { (2, 2) } else { (1, 1 + (i / 2) % 2) };
        let e = TrivializedBundle::trivial(m, base.clone());
        let p = FormPair::random(m + 1, k, &mut rng);
        let pts = vec![random_point(&[0.0], &[1.0], &mut rng)];
        let (a, b) = nu_sign_law(&p, &e.disk_bundle(), &pts)?;
        stated = stated.max(a);
        derived = derived.max(b);
    }
    Ok(vec![
        Item::residual("ν(d p) − (−1)^k dν(p)", stated, cfg.tol(1e-7), Paper),
        Item::residual("ν(d p) − (−1)^(m−1) dν(p)", derived, cfg.tol(1e-7), Derived),
    ])
}

fn mu_chain(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("mu-chain");
    let mut w: f64 = 0.0;
    for i in 0..cfg.samples {
        let p = FormPair::random(3, i % 3, &mut rng);
        let lhs = mu(&pair_d(&p), 2, BumpProfile::standard())?;
        let rhs = mu(&p, 2, BumpProfile::standard())?.d();
        let x = random_point(&[-1.9, -1.9, 0.0], &[1.9, 1.9, 1.0], &mut rng);
        let r: Vec<f64> = lhs.values(&x).iter().zip(rhs.values(&x)).map(|(a, b)| a + b).collect();
        w = w.max(max_abs(&r));
    }
    Ok(vec![Item::residual("μ(d p) + d μ(p)", w, cfg.tol(1e-7), Derived)])
}

type Section = fn(&[Jet]) -> Vec<Jet>;

fn zero_count(cfg: &Config) -> Result<Vec<Item>> {
    let c = Connection::trivial(2, 2);
    let m = ChartDomain::disk(2).with_order(cfg.order(48));
    let rim: Vec<Vec<f64>> = (0..5)
        .map(|j| vec![(1.3 * j as f64).cos(), (1.3 * j as f64).sin()])
        .collect();
    let cases: [(&str, Section, Vec<Vec<f64>>); 3] = [
        ("identity", |x| x.to_vec(), vec![vec![0.0, 0.0]]),
        ("conjugate", |x| vec![x[0].clone(), -&x[1]], vec![vec![0.0, 0.0]]),
        (
            "z² − 1/4",
            |x| vec![&x[0] * &x[0] - &x[1] * &x[1] - 0.25, &x[0] * &x[1] * 2.0],
            vec![vec![0.5, 0.0], vec![-0.5, 0.0]],
        ),
    ];
    let mut items = Vec::new();
    for (label, s, zeros) in cases {
        let count = signed_zero_count(s, &m, Some(&zeros))?.total;
        let dual = dual_zero_count(&c, s, &m, &rim)?;
        items.push(Item::new(
            format!("𝓛_I(Pf, −TPf(∇,s))(1), s = {label}"),
            dual,
            count as f64,
            cfg.tol(1e-6),
            Derived,
        ));
    }
    Ok(items)
}

fn cgb_a_sphere(cfg: &Config) -> Result<Vec<Item>> {
    let (z, r) = sphere_zero_set_check(cfg.order(24), &[1.0, -0.5, 3.0])?;
    Ok(vec![
        Item::new("signed zeros of s on S²", z.total as f64, 2.0, 0.0, Paper),
        Item::residual("𝓛_II(Pf) − [s⁻¹(0)]", r, cfg.tol(1e-6), Derived),
    ])
}

fn pair_complex(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("pair-complex");
    let mut d2: f64 = 0.0;
    for i in 0..cfg.samples {
        let pp = pair_d(&pair_d(&FormPair::random(2, i % 3, &mut rng)));
        let x = random_disk_point(1.0, &mut rng);
        d2 = d2.max(max_abs(&pp.omega.values(&x)));
        if let Some(g) = pp.gamma_form() {
            d2 = d2.max(max_abs(&g.values(&x)));
        }
    }
    let disk = ChartDomain::disk(2).with_order(cfg.order(24));
    let weak = worst((0..cfg.samples).map(|i| {
        let k = i % 2;
        let p = FormPair::random(2, k, &mut rng);
        let eta = random_form(2, 1 - k, &mut rng);
        lefschetz_i_residual(&p, &eta, &disk)
    }))?;
    Ok(vec![
        Item::residual("pair_d(pair_d(p))", d2, cfg.tol(1e-7), Trivial),
        Item::residual("𝓛_I(d p)(η) ± 𝓛_I(p)(dη)", weak, cfg.tol(1e-7), Derived),
    ])
}

fn homotopy_first(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("homotopy-first");
    let h = radial_flow_scenario(0.8, cfg.order(20))?;
    let w = worst((0..cfg.samples).map(|i| {
        let k = i % 3;
        let p = FormPair::random(3, k, &mut rng);
        let eta = random_form(3, 2 - k, &mut rng);
        homotopy_first_residual(&h, &p, &eta)
    }))?;
    Ok(vec![Item::residual(
        "first homotopy identity residual",
        w,
        cfg.tol(1e-6),
        Derived,
    )])
}

fn homotopy_second(cfg: &Config) -> Result<Vec<Item>> {
    let mut rng = cfg.rng("homotopy-second");
    let h = radial_flow_scenario(0.8, cfg.order(20))?;
    let (mut stated, mut flipped) = (0.0f64, 0.0f64);
    for i in 0..cfg.samples {
        let k = i % 2;
        let eta = random_form(3, k, &mut rng);
        let q = FormPair::random(3, 2 - k, &mut rng);
        stated = stated.max(homotopy_second_residual(&h, &eta, &q, false)?);
        flipped = flipped.max(homotopy_second_residual(&h, &eta, &q, true)?);
    }
    Ok(vec![
        Item::residual(
            "second homotopy identity residual, sign as stated",
            stated,
            cfg.tol(1e-6),
            Paper,
        ),
        Item::residual(
            "second homotopy identity residual, sign (−1)^(n−k+1)",
            flipped,
            cfg.tol(1e-6),
            Derived,
        ),
    ])
}

fn discrete(_cfg: &Config) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for mesh in mesh_registry() {
        let r = duality_report(&mesh)?;
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        items.push(Item::new(
            format!("{}: cone Betti = Dirichlet Betti", r.name),
            flag(r.drel()),
            1.0,
            0.0,
            Derived,
        ));
        items.push(Item::new(
            format!("{}: b^k(M,∂M) = b_(n−k)(M)", r.name),
            flag(r.lefschetz()),
            1.0,
            0.0,
            Paper,
        ));
        items.push(Item::new(
            format!("{}: long exact sequence exact", r.name),
            flag(r.les.exact()),
            1.0,
            0.0,
            Derived,
        ));
        items.push(Item::new(
            format!("{}: Euler characteristic additive", r.name),
            flag(r.euler_ok),
            1.0,
            0.0,
            Trivial,
        ));
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn names_are_unique_and_registry_is_large() {
        let r = registry();
        let names: HashSet<_> = r.iter().map(|s| s.name).collect();
        assert_eq!(names.len(), r.len());
        assert!(r.len() >= 18);
    }

    #[test]
    fn every_scenario_exercises_a_known_module() {
        let known = [
            "geometry",
            "forms",
            "chern_weil",
            "bundles",
            "relative",
            "thom",
            "discrete",
        ];
        for s in registry() {
            assert!(!s.modules.is_empty(), "{}", s.name);
            assert!(s.modules.iter().all(|m| known.contains(m)), "{}", s.name);
        }
    }

    #[test]
    fn rng_depends_on_seed_and_name() {
        use rand::Rng;
        let c = Config::default();
        let a: u64 = c.rng("a").gen();
        let b: u64 = c.rng("b").gen();
        let a2: u64 = Config { seed: 1, ..c.clone() }.rng("a").gen();
        assert_ne!(a, b);
        assert_ne!(a, a2);
        assert_eq!(a, c.rng("a").gen::<u64>());
    }

    #[test]
    fn odd_rank_point_rejects_even_rank() {
        let cfg = Config {
            rank: Some(2),
            ..Config::default()
        };
        assert!(odd_rank_point(&cfg).is_err());
    }

    #[test]
    fn discrete_scenario_passes() {
        assert!(discrete(&Config::default()).unwrap().iter().all(|i| i.pass));
    }
}
