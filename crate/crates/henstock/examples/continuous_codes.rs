//! Continuous functions as finite codes: piecewise-linear data plus a
//! Lipschitz constant and a modulus that converts output precision into
//! input precision. Weighted spike sums turn interval lists into
//! functions whose values reveal which interval covers a point, and
//! sequences of codes step outside the continuous world one rank.

use henstock::bairefun::{describe, mk_heaviside};
use henstock::codings::{fmt_rat, pow2, rat};
use henstock::contfun::{
    locate_covering_interval, mk_piecewise, mk_scaled_sum, spike_sum_approx,
};
use henstock::exactreal::{sqrt2_over_2, FastReal, TagPoint};
use henstock::intervals::IntervalUI;
use num_traits::Signed;

fn main() {
    // A tent glued from two linear pieces; the seam values must agree.
    let tent = mk_piecewise(
        vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        vec![
            henstock::contfun::mk_linear(rat(2, 1), rat(0, 1)),
            henstock::contfun::mk_linear(rat(-2, 1), rat(2, 1)),
        ],
    )
    .expect("the pieces agree at 1/2");
    let (v, err) = tent.exact_at(&rat(1, 3), 30).expect("piecewise evaluator");
    println!(
        "tent(1/3) = {} (error term {}), Lipschitz {}",
        fmt_rat(&v),
        fmt_rat(&err),
        fmt_rat(tent.lipschitz())
    );
    println!(
        "asking 2^-10 outputs needs 2^-{} inputs",
        tent.modulus(10)
    );
    let at_irrational = tent
        .eval_at(&FastReal::affine(&rat(0, 1), &rat(1, 2), &sqrt2_over_2()), 20, 64)
        .expect("within budget");
    println!("tent(sqrt(2)/4) ~ {}", fmt_rat(&at_irrational));

    // Spikes: zero outside their interval, peaked at the middle. The
    // weighted sum of a list stays small while remembering every member.
    println!();
    let us = vec![
        IntervalUI::new(rat(-1, 8), rat(1, 4)).unwrap(),
        IntervalUI::new(rat(1, 8), rat(5, 8)).unwrap(),
        IntervalUI::new(rat(1, 2), rat(9, 8)).unwrap(),
    ];
    let sum = mk_scaled_sum("three-interval sum", &us);
    let (peak, _) = sum.exact_at(&rat(3, 8), 30).expect("piecewise");
    println!("sum at 3/8: {}, bounds {:?}", fmt_rat(&peak), sum.bounds());

    // Truncating the sum after e + 1 terms and evaluating at a 2^-e
    // approximation moves the value by at most 2^-e.
    let x = FastReal::from_rational(rat(2, 7));
    let full = sum
        .exact_at(&rat(2, 7), 40)
        .expect("piecewise")
        .0;
    for e in [0u32, 1, 4] {
        let y = spike_sum_approx(&us, &x, e);
        let gap = (&full - &y).abs();
        println!(
            "e = {}: truncated value {}, gap {} <= 2^-{}",
            e,
            fmt_rat(&y),
            fmt_rat(&gap),
            e
        );
        assert!(gap <= pow2(-(e as i64)));
    }

    // Reading the sum tells you a covering interval: once the value
    // clears the threshold at some precision, the term that contributed
    // names an interval with the point strictly inside.
    let (which, at) =
        locate_covering_interval(&us, &FastReal::from_rational(rat(9, 16)), 40)
            .expect("9/16 is covered");
    println!(
        "9/16 sits inside member {} (seen at precision {})",
        which, at
    );
    assert!(us[which].contains_rat(&rat(9, 16)));

    // One rank up: the pointwise limit of steeper and steeper ramps is
    // the step at 0, a function no single code can be.
    println!();
    let h = mk_heaviside();
    println!("{}", describe(&h));
    for t in [
        TagPoint::rational(rat(0, 1)),
        TagPoint::rational(rat(1, 32)),
        TagPoint::sqrt2_over_2(),
    ] {
        if let Some((lo, hi)) = h.enclose(&t, 6) {
            println!(
                "  limit at {} within [{}, {}]",
                t.describe(),
                fmt_rat(&lo),
                fmt_rat(&hi)
            );
        }
    }
}
