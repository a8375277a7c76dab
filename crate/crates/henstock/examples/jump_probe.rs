//! Probe a bit sequence for the shape of a jump tower. Reading the
//! sequence as columns through the pairing, column 0 should be empty and
//! each next column the stage-bounded jump of the one before. The probe
//! either stays silent or returns a radius certifying a concrete broken
//! bit, and that radius is an honest distance bound to the consistent
//! reference sequence.

use henstock::cantor::{
    cantor_metric, column_gauge, jump_consistent_oracle, ColumnVerdict, InfBitOracle,
    MetricVerdict,
};
use henstock::codings::{fmt_rat, pair_cantor, pow2, Nat};

fn main() {
    let stage = 4;
    let reference = jump_consistent_oracle(stage);
    match column_gauge(&reference, 4, stage) {
        ColumnVerdict::Undetermined => {
            println!("reference sequence: all probes consistent (as built)")
        }
        ColumnVerdict::Value(v) => panic!("reference flagged with {}", fmt_rat(&v)),
    }

    // Flip single bits and watch the probe locate each one. The returned
    // value 2^-(k+1) names the global index k; against the reference the
    // first differing bit is exactly there, so the metric comes out 2^-k.
    for (e, n) in [(0u64, 0u64), (2, 1), (1, 2), (3, 3)] {
        let k = pair_cantor(&Nat::from(e), &Nat::from(n));
        let flip_at = k.clone();
        let base = reference.clone();
        let bent = InfBitOracle::from_fn(move |idx| {
            let b = base.bit(idx);
            if *idx == flip_at {
                !b
            } else {
                b
            }
        });
        let verdict = column_gauge(&bent, 4, stage);
        let metric = cantor_metric(&bent, &reference, 64);
        let k_int = i64::try_from(&k).unwrap();
        println!(
            "flip column {} entry {} (bit {}): probe {:?}, metric {:?}",
            n, e, k_int, verdict, metric
        );
        assert_eq!(verdict, ColumnVerdict::Value(pow2(-k_int - 1)));
        assert_eq!(metric, MetricVerdict::Exact(pow2(-k_int)));
    }

    // Silence is not a certificate. An inconsistency parked beyond the
    // probed columns stays invisible until the bounds reach it.
    let far = pair_cantor(&Nat::from(0u32), &Nat::from(20u32));
    let base = reference.clone();
    let hidden = InfBitOracle::from_fn(move |idx| {
        let b = base.bit(idx);
        if *idx == far {
            !b
        } else {
            b
        }
    });
    let silent = column_gauge(&hidden, 4, stage);
    println!(
        "flip parked in column 20: probe to column bound 4 says {:?}",
        silent
    );
    assert_eq!(silent, ColumnVerdict::Undetermined);
}
