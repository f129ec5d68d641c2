//! Polynomial zonotope arithmetic with shared factors.
//!
//! `cargo run --example set_operations`

use certipose::set::{FactorAssignment, FactorId, Interval, MatPolyZonotope, PolyZonotope};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> certipose::Result<()> {
    let ids = [FactorId(1), FactorId(2)];
    // a = (a1, a2) on a box; b = (a1^2, 0.5) + independent noise.
    let a = PolyZonotope::make_box(&Interval::new(vec![0.0, 1.0], vec![2.0, 3.0])?, &ids)?;
    let b = PolyZonotope::new(
        vec![0.0, 0.5],
        vec![1.0, 0.0],
        vec![0.1, 0.1],
        vec![2],
        vec![FactorId(1)],
    )?;
    let sum = a.mink_sum(&b)?;
    println!(
        "a + b: {} dependent, {} independent generators",
        sum.num_dep(),
        sum.num_indep()
    );
    println!(
        "interval hull {:?} .. {:?}",
        sum.interval_hull().lo(),
        sum.interval_hull().hi()
    );
    println!("support in (1, 1): {:.4}", sum.support_upper(&[1.0, 1.0])?);

    // Row vector times column vector: a^T a as a 1x1 matrix set.
    let row = MatPolyZonotope::from(a.clone());
    let row = row.affine_map(&[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0], 1, 2)?;
    let dot = row.mat_mul(&MatPolyZonotope::from(a.clone()))?;
    println!(
        "a.a: {} dependent generators, hull {:?}",
        dot.num_dep(),
        dot.interval_hull()
    );

    // Every sampled value sits inside the computed sets.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let all_ids: Vec<_> = sum.ids().to_vec();
    for _ in 0..5 {
        let fa = FactorAssignment::random(&all_ids, sum.num_indep(), &mut rng);
        let (x, y) = (a.sample(&fa)?, b.sample(&fa)?);
        let s = sum.sample(&fa)?;
        println!(
            "alpha=({:+.2},{:+.2})  a={:?}  sum={:?}  a.a={:.3}",
            fa.alpha(ids[0]).unwrap(),
            fa.alpha(ids[1]).unwrap(),
            x,
            s,
            x[0] * x[0] + x[1] * x[1]
        );
        assert!(sum
            .interval_hull()
            .contains(&[x[0] + y[0], x[1] + y[1]], 1e-9));
    }
    Ok(())
}
