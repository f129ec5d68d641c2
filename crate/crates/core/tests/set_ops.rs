mod common;

use std::collections::BTreeMap;

use certipose::set::{FactorAssignment, FactorId, Interval, MatPolyZonotope, PolyZonotope};
use common::random_mat_pz;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alphas<R: Rng>(rng: &mut R) -> BTreeMap<FactorId, f64> {
    (1..=4)
        .map(|i| (FactorId(i), rng.gen_range(-1.0..=1.0)))
        .collect()
}

fn betas<R: Rng>(rng: &mut R, q: usize) -> Vec<f64> {
    (0..q).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())))
}

fn matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            out[i * m + j] = (0..k).map(|l| a[i * k + l] * b[l * m + j]).sum();
        }
    }
    out
}

const SHAPES: [(usize, usize, usize); 4] = [(2, 2, 1), (1, 3, 1), (2, 2, 2), (1, 1, 1)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mink_sum_is_exact_under_shared_factors(seed in any::<u64>(), dim in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mat_pz(&mut rng, dim, 1, true);
        let b = random_mat_pz(&mut rng, dim, 1, true);
        let s = a.mink_sum(&b).unwrap();
        for _ in 0..10 {
            let al = alphas(&mut rng);
            let (ba, bb) = (betas(&mut rng, a.num_indep()), betas(&mut rng, b.num_indep()));
            let xa = a.sample(&FactorAssignment::new(al.clone(), ba.clone()).unwrap()).unwrap();
            let xb = b.sample(&FactorAssignment::new(al.clone(), bb.clone()).unwrap()).unwrap();
            let both: Vec<f64> = ba.into_iter().chain(bb).collect();
            let xs = s.sample(&FactorAssignment::new(al, both).unwrap()).unwrap();
            let want: Vec<f64> = xa.iter().zip(&xb).map(|(x, y)| x + y).collect();
            prop_assert!(close(&xs, &want), "{xs:?} vs {want:?}");
        }
    }

    #[test]
    fn dependent_products_are_exact(seed in any::<u64>(), shape in 0usize..4) {
        let (n, k, m) = SHAPES[shape];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mat_pz(&mut rng, n, k, false);
        let b = random_mat_pz(&mut rng, k, m, false);
        let p = a.mat_mul(&b).unwrap();
        prop_assert_eq!(p.num_indep(), 0);
        for _ in 0..10 {
            let fa = FactorAssignment::new(alphas(&mut rng), vec![]).unwrap();
            let want = matmul(&a.sample(&fa).unwrap(), &b.sample(&fa).unwrap(), n, k, m);
            prop_assert!(close(&p.sample(&fa).unwrap(), &want));
        }
    }

    #[test]
    fn products_with_independent_factors_stay_enclosed(seed in any::<u64>(), shape in 0usize..4) {
        let (n, k, m) = SHAPES[shape];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mat_pz(&mut rng, n, k, true);
        let b = random_mat_pz(&mut rng, k, m, true);
        let p = a.mat_mul(&b).unwrap();
        let hull = p.interval_hull();
        let eye: Vec<f64> = (0..n * m * n * m).map(|i| f64::from(i % (n * m + 1) == 0)).collect();
        let flat = PolyZonotope::try_from(p.affine_map(&eye, &vec![0.0; n * m], n * m, 1).unwrap()).unwrap();
        for _ in 0..10 {
            let al = alphas(&mut rng);
            let fa = FactorAssignment::new(al.clone(), betas(&mut rng, a.num_indep())).unwrap();
            let fb = FactorAssignment::new(al.clone(), betas(&mut rng, b.num_indep())).unwrap();
            let x = matmul(&a.sample(&fa).unwrap(), &b.sample(&fb).unwrap(), n, k, m);
            prop_assert!(hull.contains(&x, 1e-9));
            // The dependent part at the same alpha leaves a remainder that the
            // independent generators must cover entrywise.
            let dep = p.sample_dependent(&FactorAssignment::new(al, vec![]).unwrap()).unwrap();
            let mut rad = vec![0.0; n * m];
            for j in 0..p.num_indep() {
                for (r, g) in rad.iter_mut().zip(p.indep_gen(j)) {
                    *r += g.abs();
                }
            }
            for e in 0..n * m {
                prop_assert!((x[e] - dep[e]).abs() <= rad[e] + 1e-9 * (1.0 + x[e].abs()));
            }
            let dir: Vec<f64> = (0..n * m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let dot: f64 = dir.iter().zip(&x).map(|(c, v)| c * v).sum();
            prop_assert!(dot <= flat.support_upper(&dir).unwrap() + 1e-9 * (1.0 + dot.abs()));
        }
    }

    #[test]
    fn hull_and_support_bound_every_sample(seed in any::<u64>(), dim in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = PolyZonotope::try_from(random_mat_pz(&mut rng, dim, 1, true)).unwrap();
        let hull = a.interval_hull();
        for _ in 0..20 {
            let fa = FactorAssignment::random(a.ids(), a.num_indep(), &mut rng);
            let x = a.sample(&fa).unwrap();
            prop_assert!(hull.contains(&x, 1e-9));
            let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let dot: f64 = dir.iter().zip(&x).map(|(c, v)| c * v).sum();
            prop_assert!(dot <= a.support_upper(&dir).unwrap() + 1e-9);
        }
    }
}

#[test]
fn box_zonotope_hull_is_the_box() {
    let iv = Interval::new(vec![-1.0, 2.0, 0.5], vec![3.0, 2.5, 0.75]).unwrap();
    let ids = [FactorId(1), FactorId(2), FactorId(3)];
    let b = PolyZonotope::make_box(&iv, &ids).unwrap();
    assert_eq!(b.interval_hull(), iv);
    let corner = b
        .sample(&FactorAssignment::constant(&ids, 0, 1.0).unwrap())
        .unwrap();
    assert_eq!(corner, vec![3.0, 2.5, 0.75]);
}

#[test]
fn shape_mismatch_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let a = random_mat_pz(&mut rng, 2, 2, false);
    let b = random_mat_pz(&mut rng, 3, 1, false);
    assert!(a.mat_mul(&b).is_err());
    let c: MatPolyZonotope = random_mat_pz(&mut rng, 3, 1, false);
    assert!(a.mink_sum(&c).is_err());
}
