//! Integrate the indicator of the rationals to zero with a tag-dependent
//! gauge. A mesh-based Riemann sum cannot settle this function, but the
//! rational-starving gauge shrinks every rational-tagged block so hard
//! that the whole sum stays under any tolerance you name.

use henstock::codings::{fmt_rat, Rat};
use henstock::exactreal::TagPoint;
use henstock::partition::{
    dirichlet_chain, dirichlet_fine_partition, dirichlet_gauge, gauge_integrate, is_delta_fine,
    riemann_sum, Integrand, TaggedPartition,
};

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn main() {
    let f = Integrand::RationalIndicator;

    // The two-point partition with the single irrational tag sqrt(2)/2.
    // The gauge gives irrational tags radius 1, so one block spanning all
    // of [0, 1] is already fine, and the sum is exactly zero.
    let p = TaggedPartition::new(
        vec![
            TagPoint::rational(Rat::new(0.into(), 1.into())),
            TagPoint::rational(Rat::new(1.into(), 1.into())),
        ],
        vec![TagPoint::sqrt2_over_2()],
    )
    .expect("two points and one tag");

    for eps in [rat(1, 4), rat(1, 16), rat(1, 256)] {
        let gauge = dirichlet_gauge(&eps);
        let verdict = is_delta_fine(&p, &gauge, 64).expect("checkable");
        let (sum, err) = riemann_sum(&f, &p, 40).expect("rational endpoints");
        println!(
            "eps {:>6}: one-block partition {:?}, Riemann sum {} (error term {})",
            fmt_rat(&eps),
            verdict,
            fmt_rat(&sum),
            fmt_rat(&err)
        );
    }

    // A partition that keeps rational tags is also possible: box each of
    // the first few enumerated rationals in a block smaller than its own
    // gauge radius and tag the gaps with irrational points.
    let eps = rat(1, 16);
    let fine = dirichlet_fine_partition(&eps, 6).expect("construction stays inside [0, 1]");
    let gauge = dirichlet_gauge(&eps);
    let verdict = is_delta_fine(&fine, &gauge, 64).expect("checkable");
    let (sum, _) = riemann_sum(&f, &fine, 40).expect("rational endpoints");
    let (covered, bound) = dirichlet_chain(&fine, &eps).expect("tags are enumerated");
    println!();
    println!(
        "{} blocks boxing 6 rationals: {:?}",
        fine.len(),
        verdict
    );
    println!(
        "rational-tagged width {} <= chain bound {} < eps {}",
        fmt_rat(&covered),
        fmt_rat(&bound),
        fmt_rat(&eps)
    );
    println!("Riemann sum {}", fmt_rat(&sum));
    assert!(sum < eps);

    // The full pipeline: gauge family + partition finder + certificate.
    let (value, cert) = gauge_integrate(
        &f,
        dirichlet_gauge,
        |_| dirichlet_fine_partition(&rat(1, 64), 4),
        &rat(1, 64),
    )
    .expect("finder output certifies");
    println!();
    println!(
        "gauge_integrate: value {} within {} using \"{}\" ({} blocks, {:?})",
        fmt_rat(&value),
        fmt_rat(&cert.epsilon),
        cert.gauge_name,
        cert.blocks,
        cert.fineness
    );
    assert!(value < cert.epsilon);
}
