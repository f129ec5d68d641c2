//! Linear enclosures of sin, cos and 1/x, and their use on a set.
//!
//! `cargo run --example sin_cos_enclosure`

use std::f64::consts::PI;

use certipose::nonlin::{enclose_elementwise, fit_linear, ElementaryFn};
use certipose::set::{FactorId, Interval, PolyZonotope};

fn main() -> certipose::Result<()> {
    let dom = Interval::scalar(PI / 6.0, PI / 2.0)?;
    for f in [ElementaryFn::Sin, ElementaryFn::Cos] {
        let e = fit_linear(f, &dom)?;
        let worst = (0..=10_000)
            .map(|i| {
                let x = PI / 6.0 + (PI / 3.0) * i as f64 / 10_000.0;
                (f.eval(x) - e.line(x)).abs()
            })
            .fold(0.0, f64::max);
        println!(
            "{f:?}: {:.4} x + {:.4}, error radius {:.4} (grid max {:.4})",
            e.slope, e.intercept, e.error_radius, worst
        );
    }
    let recip = fit_linear(ElementaryFn::Recip, &Interval::scalar(80.0, 110.0)?)?;
    println!(
        "1/x on [80, 110]: slope {:.3e}, radius {:.3e}",
        recip.slope, recip.error_radius
    );
    match fit_linear(ElementaryFn::Recip, &Interval::scalar(-1.0, 1.0)?) {
        Err(e) => println!("1/x on [-1, 1]: {e}"),
        Ok(_) => unreachable!(),
    }

    // sin of an angle set theta = pi/3 + pi/6 a: one dependent generator
    // that keeps the factor, plus one independent error generator.
    let theta = PolyZonotope::make_box(&dom, &[FactorId(4)])?;
    let s = enclose_elementwise(ElementaryFn::Sin, &theta)?;
    println!(
        "sin(theta): offset {:.4}, dep {:?}, indep {:?}, ids {:?}",
        s.offset()[0],
        (0..s.num_dep())
            .map(|i| s.dep_gen(i)[0])
            .collect::<Vec<_>>(),
        (0..s.num_indep())
            .map(|j| s.indep_gen(j)[0])
            .collect::<Vec<_>>(),
        s.ids()
    );
    Ok(())
}
