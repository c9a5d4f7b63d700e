use proptest::prelude::*;
use wdrcm_core::*;

fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let lo = x - i as f64 / n;
        let hi = (i + 1) as f64 / n - x;
        d = d.max(lo).max(hi);
    }
    d
}

fn ks_crit_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

#[test]
fn poisson_count_mean() {
    let g = BoxGeometry::torus(2, 100.0).unwrap();
    let reps = 1000;
    let mut total = 0.0;
    for r in 0..reps {
        let p = sample_poisson_points(&g, 1.0, &SeedSpec::new(11).for_trial(r)).unwrap();
        total += p.len() as f64;
    }
    let mean = total / reps as f64;
    assert!((mean - 10_000.0).abs() < 3.0 * 100.0, "mean {mean}");
    // the mean of 1000 draws should in fact be much closer
    assert!((mean - 10_000.0).abs() < 4.0 * 100.0 / (reps as f64).sqrt(), "mean {mean}");
}

#[test]
fn poisson_is_reproducible_and_in_box() {
    let g = BoxGeometry::hard_wall(3, 7.5).unwrap();
    let s = SeedSpec::new(5);
    let a = sample_poisson_points(&g, 2.0, &s).unwrap();
    let b = sample_poisson_points(&g, 2.0, &s).unwrap();
    assert_eq!(a, b);
    let c = sample_poisson_points(&g, 2.0, &s.for_trial(1)).unwrap();
    assert_ne!(a, c);
    for p in a.iter() {
        assert!(p.mark > 0.0 && p.mark < 1.0);
        assert!(p.position.iter().all(|&x| (0.0..7.5).contains(&x)));
    }
}

#[test]
fn marks_pass_ks() {
    let g = BoxGeometry::torus(1, 100_000.0).unwrap();
    let p = sample_poisson_points(&g, 1.0, &SeedSpec::new(2024)).unwrap();
    let n = p.len();
    assert!(ks_uniform(p.marks().to_vec()) < ks_crit_1pct(n));
}

#[test]
fn pair_uniform_passes_ks() {
    let h = PairHasher::new(&SeedSpec::new(77));
    let mut xs = Vec::with_capacity(1_000_000);
    for i in 0..1000u32 {
        for j in 0..1001u32 {
            if i != j && xs.len() < 1_000_000 {
                xs.push(h.uniform(i, j + 1000 * (j % 3)));
            }
        }
    }
    let n = xs.len();
    assert_eq!(n, 1_000_000);
    assert!(ks_uniform(xs) < ks_crit_1pct(n));
}

#[test]
fn pair_uniform_differs_across_seeds() {
    let mut same = 0;
    for k in 0..10_000u64 {
        let a = pair_uniform(&SeedSpec::new(k), 1, 2).unwrap();
        let b = pair_uniform(&SeedSpec::new(k + 1), 1, 2).unwrap();
        if a == b {
            same += 1;
        }
    }
    assert_eq!(same, 0);
}

#[test]
fn torus_triangle_inequality() {
    use rand::Rng;
    let g = BoxGeometry::torus(3, 10.0).unwrap();
    let mut rng = SeedSpec::new(9).rng(Stream::Aux(1));
    for _ in 0..10_000 {
        let mut p = [[0.0; 3]; 3];
        for q in p.iter_mut() {
            for x in q.iter_mut() {
                *x = rng.random::<f64>() * 10.0;
            }
        }
        let ab = g.distance(&p[0], &p[1]).unwrap();
        let bc = g.distance(&p[1], &p[2]).unwrap();
        let ac = g.distance(&p[0], &p[2]).unwrap();
        assert!(ac <= (ab + bc) * (1.0 + 1e-12));
    }
}

proptest! {
    #[test]
    fn torus_never_longer(d in 1usize..4, side in 0.5f64..50.0, raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3)) {
        let t = BoxGeometry::torus(d, side).unwrap();
        let h = BoxGeometry::hard_wall(d, side).unwrap();
        let a: Vec<f64> = raw[..d].iter().map(|p| p.0 * side).collect();
        let b: Vec<f64> = raw[..d].iter().map(|p| p.1 * side).collect();
        prop_assert!(t.distance(&a, &b).unwrap() <= h.distance(&a, &b).unwrap() + 1e-12);
        for k in 0..d {
            prop_assert!(t.axis_delta(a[k], b[k]) <= side / 2.0 + 1e-12);
        }
    }

    #[test]
    fn pair_uniform_symmetric(seed: u64, i in 0u64..1_000_000, j in 0u64..1_000_000) {
        prop_assume!(i != j);
        let s = SeedSpec::new(seed);
        let u = pair_uniform(&s, i, j).unwrap();
        prop_assert_eq!(u, pair_uniform(&s, j, i).unwrap());
        prop_assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn lattice_is_deterministic(seed: u64, side in 1u32..6, d in 1usize..4) {
        let g = BoxGeometry::torus(d, side as f64).unwrap();
        let a = lattice_points(&g, &SeedSpec::new(seed)).unwrap();
        prop_assert_eq!(a.len(), (side as usize).pow(d as u32));
        prop_assert_eq!(a, lattice_points(&g, &SeedSpec::new(seed)).unwrap());
    }
}
