//! Enumerate the small-measure interval list: for each machine index e,
//! the first time the machine halts on input e + 3 with a rational
//! output, emit the ball around that rational with radius 2^-(e + 3).
//! The clamped lengths sum below 1/2, so the list can never swallow all
//! of [0, 1], yet it traps every value a machine commits to.

use henstock::cantor::pi01_balls_with;
use henstock::codings::{fmt_rat, rat_code, Rat};
use henstock::machine::{constant_program, seeded_enumeration};

fn main() {
    let scan = henstock::cantor::pi01_balls(32, 1 << 16);
    println!(
        "scan complete: {}, {} balls",
        scan.complete,
        scan.balls.len()
    );
    let mut total = Rat::new(0.into(), 1.into());
    for b in scan.balls.iter().take(8) {
        println!(
            "  e={:<3} steps={:<4} center {:>8} radius 2^-{}",
            b.e,
            b.steps,
            fmt_rat(&b.center),
            b.e + 3
        );
    }
    println!("  ...");
    for b in &scan.balls {
        total += b.ball.length();
    }
    println!("total clamped length {}", fmt_rat(&total));
    assert!(total <= Rat::new(1.into(), 2.into()));

    // Plant machines that compute known rationals and watch their balls
    // appear with the promised centers.
    println!();
    let planted = [(0u64, 1i64, 2i64), (1, 1, 3), (2, 2, 3)];
    let listing = seeded_enumeration(
        planted
            .iter()
            .map(|&(slot, n, d)| {
                let code = rat_code(&Rat::new(n.into(), d.into()));
                (slot, constant_program(u64::try_from(&code).unwrap()))
            })
            .collect(),
    );
    // The constant programs take a few hundred steps, so their scan
    // positions sit behind the crowd of immediately halting indices.
    let seeded = pi01_balls_with(&listing, 600, 1 << 16);
    for &(slot, n, d) in &planted {
        let q = Rat::new(n.into(), d.into());
        let ball = seeded
            .balls
            .iter()
            .find(|b| b.e == slot)
            .expect("the planted machine halts in range");
        println!(
            "machine {} computes {}: ball [{}, {}]",
            slot,
            fmt_rat(&q),
            fmt_rat(ball.ball.raw_lo()),
            fmt_rat(ball.ball.raw_hi())
        );
        assert_eq!(ball.center, q);
        assert!(ball.ball.contains_rat(&q));
    }
}
