//! From an open cover of [0, 1] to a finite subcover. The margin gauge of
//! a cover measures how deeply each point sits inside some member; a
//! partition fine for that gauge has every block swallowed by a member,
//! and picking one member per block is the subcover.

use henstock::codings::{fmt_rat, rat};
use henstock::cousin::{cousin_search, extract_subcover, CousinOutcome, DEFAULT_SUBCOVER_CAP};
use henstock::intervals::{IntervalUI, OpenSet};
use henstock::partition::{is_delta_fine, FinenessVerdict, Gauge};

fn main() {
    // Three overlapping open intervals, overhanging both endpoints so the
    // closed unit interval is genuinely covered.
    let cover = vec![
        IntervalUI::new(rat(-1, 4), rat(3, 8)).unwrap(),
        IntervalUI::new(rat(1, 4), rat(3, 4)).unwrap(),
        IntervalUI::new(rat(5, 8), rat(9, 8)).unwrap(),
    ];
    for u in &cover {
        println!("member ({}, {})", fmt_rat(u.raw_lo()), fmt_rat(u.raw_hi()));
    }

    let gauge = Gauge::Cont(henstock::cousin::cover_margin_gauge(&cover));
    let outcome = cousin_search(&gauge, 16).expect("piecewise margins evaluate");
    let CousinOutcome::Finished {
        depth, partition, ..
    } = outcome
    else {
        panic!("a positive margin gauge must finish");
    };
    println!();
    println!(
        "search finished at depth {}, {} blocks",
        depth,
        partition.len()
    );
    assert_eq!(
        is_delta_fine(&partition, &gauge, 64).expect("checkable"),
        FinenessVerdict::Verified
    );

    let set = OpenSet::from_vec(cover.clone());
    let picked = extract_subcover(&set, &partition, DEFAULT_SUBCOVER_CAP)
        .expect("every fine block fits inside a member");
    println!("subcover indices: {:?}", picked);

    // Spot check: a fairly dense rational grid is covered by the picks.
    let grid = 1 << 10;
    for j in 0..=grid {
        let x = rat(j, grid);
        assert!(
            picked.iter().any(|&i| cover[i as usize].contains_rat(&x)),
            "{} escaped the subcover",
            fmt_rat(&x)
        );
    }
    println!("all {} grid points land inside a picked member", grid + 1);
}
