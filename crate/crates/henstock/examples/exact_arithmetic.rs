//! Exact real arithmetic on fast-converging approximation sequences.
//! Every number answers approx(n) within 2^-n of its value; arithmetic
//! reshuffles precision requests so results keep that promise. Equality
//! at a budget has three honest outcomes, and comparisons return
//! certified verdicts or admit the budget ran out.

use henstock::codings::{fmt_rat, rat};
use henstock::exactreal::{sqrt2_over_2, CmpVerdict, EqVerdict, FastReal};
use num_traits::Signed;

fn main() {
    let z = sqrt2_over_2();
    for n in [4u32, 8, 16, 32] {
        let q = z.approx(n);
        println!("sqrt(2)/2 to 2^-{:<2}: {}", n, fmt_rat(&q));
    }

    // (sqrt(2)/2)^2 = 1/2, exactly, and doubling gives sqrt 2.
    let half = z.mul(&z);
    let two = FastReal::from_rational(rat(2, 1));
    let sqrt2 = z.add(&z);
    println!();
    match half.eq_budgeted(&FastReal::from_rational(rat(1, 2)), 40) {
        EqVerdict::IndistinguishableAtBudget(b) => {
            println!("z * z and 1/2: indistinguishable through budget {}", b)
        }
        EqVerdict::Apart => panic!("z * z is not apart from 1/2"),
    }
    match sqrt2.mul(&sqrt2).eq_budgeted(&two, 40) {
        EqVerdict::IndistinguishableAtBudget(b) => {
            println!("(z + z)^2 and 2: indistinguishable through budget {}", b)
        }
        EqVerdict::Apart => panic!("(2z)^2 is not apart from 2"),
    }

    // Apartness is decidable when it holds: z is not 7/10, and a short
    // budget suffices to see the gap.
    match z.compare_rat(&rat(7, 10), 40) {
        CmpVerdict::Greater => println!("sqrt(2)/2 > 7/10, certified"),
        other => panic!("expected a strict verdict, got {:?}", other),
    }

    // An affine expression: 3 - 2 z, trapped by its enclosure.
    let w = FastReal::affine(&rat(3, 1), &rat(-2, 1), &z);
    let (lo, hi) = w.enclosure(20);
    println!();
    println!("3 - 2 sqrt(2)/2 lives in [{}, {}]", fmt_rat(&lo), fmt_rat(&hi));
    assert!(lo <= rat(15858, 10000) && rat(15857, 10000) <= hi);

    // The fast-Cauchy contract itself: approximations at any two indices
    // stay within the sum of their tolerances.
    let x = w.mul(&z).sub(&FastReal::from_rational(rat(1, 3)));
    for (m, n) in [(2u32, 30u32), (5, 12), (1, 1), (20, 3)] {
        let gap = (x.approx(m) - x.approx(n)).abs();
        let allowance = henstock::codings::pow2(-(m as i64)) + henstock::codings::pow2(-(n as i64));
        assert!(gap <= allowance);
    }
    println!("fast-Cauchy spot checks hold for (3 - 2z) z - 1/3");
}
