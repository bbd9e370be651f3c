use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zn_gauge::forms::{boundary, Chain, Form, Ring};
use zn_gauge::lattice::{Cell, Lattice, LatticeBox, OrientedCell};
use zn_gauge::loops::{build_surface, random_loop};
use zn_gauge::model::Representation;
use zn_gauge::oracle::{exact_expectation_with, Method, OracleObservable, OracleSpec};
use zn_gauge::potential::{copoincare_potential, poincare_potential};
use zn_gauge::sampler::{Geometry, SpinConfiguration};
use zn_gauge::vortex::decompose;

fn cell() -> impl Strategy<Value = Cell> {
    (2usize..=5).prop_flat_map(|dim| {
        (prop::collection::vec(-4i32..=4, dim), 0u8..(1 << dim), any::<bool>()).prop_map(|(base, axes, dual)| {
            let l = if dual { Lattice::Dual } else { Lattice::Primal };
            Cell::new(l, &base, axes)
        })
    })
}

fn ring() -> impl Strategy<Value = Ring> {
    prop_oneof![Just(Ring::Integers), (2u32..=7).prop_map(Ring::Cyclic)]
}

fn random_form(rng: &mut ChaCha8Rng, bx: &LatticeBox, k: usize, ring: Ring) -> Form {
    let mut f = Form::on(bx, k, ring);
    for c in bx.cells(k) {
        if rng.gen_bool(0.3) {
            f.set(c, rng.gen_range(-4..=4));
        }
    }
    f
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

proptest! {
    #[test]
    fn boundary_of_boundary_vanishes(c in cell()) {
        prop_assume!(c.degree() >= 2);
        let b = boundary(OrientedCell::positive(c)).unwrap();
        prop_assert!(b.boundary().unwrap().is_empty());
    }

    #[test]
    fn faces_and_cofaces_are_transposes(c in cell()) {
        for (up, s) in c.cofaces(None) {
            prop_assert!(up.faces().contains(&(c, s)));
        }
        for (f, s) in c.faces() {
            prop_assert!(f.cofaces(None).contains(&(c, s)));
        }
    }

    #[test]
    fn hodge_twice_is_a_sign(c in cell()) {
        let (once, s1) = c.hodge();
        let (twice, s2) = once.hodge();
        prop_assert_eq!(twice, c);
        prop_assert_eq!(s1 * s2, sign(c.degree() * (c.dim() - c.degree())));
        prop_assert_ne!(once.lattice(), c.lattice());
    }

    #[test]
    fn stokes_and_bianchi(seed in any::<u64>(), m in 2usize..=4, ring in ring()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = LatticeBox::cube(m, 0, 2).unwrap();
        let k = rng.gen_range(0..m);
        let w = random_form(&mut rng, &bx, k, ring);
        let mut q = Chain::zero(Lattice::Primal, m, k + 1);
        for c in bx.cells(k + 1) {
            if rng.gen_bool(0.3) {
                q.add(c, rng.gen_range(-2..=2));
            }
        }
        prop_assert_eq!(w.d().unwrap().evaluate(&q).unwrap(), w.evaluate(&q.boundary().unwrap()).unwrap());
        if k + 2 <= m {
            prop_assert!(w.d().unwrap().d().unwrap().is_zero());
        }
        prop_assert_eq!(w.support_size(), 2 * w.nnz());
    }

    #[test]
    fn potentials_are_right_inverses(seed in any::<u64>(), m in 2usize..=4, n in 2u32..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = LatticeBox::cube(m, 0, 2).unwrap();
        let k = rng.gen_range(1..m);
        let closed = random_form(&mut rng, &bx, k - 1, Ring::Cyclic(n)).d().unwrap();
        let p = poincare_potential(&closed, &bx).unwrap();
        prop_assert!(p.support().all(|c| bx.contains_cell(c)));
        prop_assert_eq!(p.d().unwrap(), closed);

        let top = random_form(&mut rng, &bx, k + 1, Ring::Cyclic(n)).with_region(None);
        let coclosed = top.codiff().unwrap();
        if coclosed.support().all(|c| bx.contains_cell(c)) {
            let p = copoincare_potential(&coclosed, &bx).unwrap();
            prop_assert!(p.support().all(|c| bx.contains_cell(c)));
            prop_assert_eq!(p.with_region(None).codiff().unwrap(), coclosed);
        }
    }

    #[test]
    fn loops_split_into_corners_and_straight_edges(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = LatticeBox::centered(4, 4).unwrap();
        let g = random_loop(&mut rng, &bx);
        prop_assert_eq!(g.corner_restriction().plus(&g.straight_part()), g.chain().clone());
        let moved = g.translated(&[1, -2, 0, 3]).unwrap();
        prop_assert_eq!(moved.corner_count(), g.corner_count());
        prop_assert_eq!(moved.length(), g.length());
        let q = build_surface(&g, &bx).unwrap();
        prop_assert_eq!(q.chain.boundary().unwrap(), g.chain().clone());
    }

    #[test]
    fn s_beta_is_a_contraction_and_shift_invariant(n in 2u32..=7, gs in prop::collection::vec(0u32..64, 6), shift in 0u32..7, beta in 0.0f64..4.0) {
        let rep = Representation::standard(n).unwrap();
        let gs: Vec<u32> = gs.iter().map(|g| g % n).collect();
        let s = rep.s_beta(&gs, beta);
        prop_assert!(s.norm() <= 1.0 + 1e-15);
        let moved: Vec<u32> = gs.iter().map(|g| (g + shift) % n).collect();
        prop_assert!((rep.s_beta(&moved, beta).norm() - s.norm()).abs() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wilson_loops_and_action_are_gauge_invariant(seed in any::<u64>(), n in 2u32..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = LatticeBox::cube(3, -2, 2).unwrap();
        let geom = Geometry::new(&bx).unwrap();
        let rep = Representation::standard(n).unwrap();
        let vals: Vec<u32> = (0..geom.edges().len()).map(|_| rng.gen_range(0..n)).collect();
        let s = SpinConfiguration::from_values(&geom, n, vals).unwrap();
        let mut h = Form::on(&bx, 0, Ring::Cyclic(n));
        for p in bx.cells(0) {
            h.set(p, rng.gen_range(0..n as i64));
        }
        let shifted = SpinConfiguration::from_form(&geom, &s.to_form().plus(&h.d().unwrap()).unwrap()).unwrap();
        let g = random_loop(&mut rng, &bx);
        let (w, w2) = (s.wilson_loop(&rep, &g).unwrap(), shifted.wilson_loop(&rep, &g).unwrap());
        prop_assert!((w.norm() - 1.0).abs() < 1e-12);
        prop_assert!((w - w2).norm() < 1e-12);
        prop_assert!((s.action(&rep) - shifted.action(&rep)).abs() < 1e-9);
        prop_assert!(s.plaquette_field().d().unwrap().is_zero());
    }

    #[test]
    fn decomposition_partitions_the_field(seed in any::<u64>(), n in 2u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = LatticeBox::cube(3, 0, 3).unwrap();
        let geom = Geometry::new(&bx).unwrap();
        let mut s = SpinConfiguration::zero(&geom, n);
        for _ in 0..rng.gen_range(1..5) {
            let i = rng.gen_range(0..geom.edges().len());
            s.values_mut()[i] = rng.gen_range(1..n);
        }
        let field = s.plaquette_field();
        let comps = decompose(&field).unwrap();
        let mut sum = Form::on(&bx, 2, Ring::Cyclic(n));
        let mut seen = std::collections::BTreeSet::new();
        for v in &comps {
            prop_assert!(v.form.is_closed());
            for (p, x) in v.form.iter() {
                prop_assert!(seen.insert(p));
                sum.add(p, x);
            }
        }
        prop_assert_eq!(sum, field);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn gauge_fixing_does_not_change_the_oracle(beta in 0.0f64..1.5, n in 2u32..=3, flat in any::<bool>()) {
        let bx = if flat { LatticeBox::cube(2, 0, 2).unwrap() } else { LatticeBox::cube(3, 0, 1).unwrap() };
        let corner = vec![0; bx.dim()];
        let g = zn_gauge::loops::GeneralizedLoop::rectangle(&corner, 0, 1, 1, 1).unwrap();
        let obs = [OracleObservable::Wilson(g), OracleObservable::Action];
        let rep = Representation::standard(n).unwrap();
        let fixed = OracleSpec::new(bx.clone(), rep.clone(), beta);
        let full = OracleSpec { gauge_fix: false, ..fixed.clone() };
        let a = exact_expectation_with(&fixed, &obs, Method::Enumerate).unwrap();
        let b = exact_expectation_with(&full, &obs, Method::Enumerate).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()), "{} vs {}", x, y);
        }
        if flat {
            let c = exact_expectation_with(&fixed, &obs, Method::Auto).unwrap();
            for (x, y) in c.iter().zip(&b) {
                prop_assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()));
            }
        }
    }
}
