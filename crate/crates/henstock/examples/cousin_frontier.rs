//! Search the dyadic tree for a partition fine for a gauge. Blocks that
//! are already narrower than the gauge value at their midpoint leave the
//! tree; if every branch dies by some depth, the surviving frontier reads
//! off a tagged partition, certified fine by the independent checker.

use henstock::contfun::mk_const;
use henstock::cousin::{bits_name, cousin_search, CousinOutcome};
use henstock::dsl::parse_gauge;
use henstock::partition::{is_delta_fine, partition_to_json, Gauge};

fn main() {
    // A constant gauge 1/8 finishes quickly: blocks of width 2^-4 pass.
    let gauge = Gauge::Cont(mk_const(henstock::codings::rat(1, 8)));
    match cousin_search(&gauge, 12).expect("constant gauges evaluate") {
        CousinOutcome::Finished {
            depth,
            frontier,
            partition,
            levels,
        } => {
            println!("finished at depth {}", depth);
            println!(
                "frontier: {} blocks, first {}, last {}",
                frontier.len(),
                bits_name(&frontier[0]),
                bits_name(frontier.last().unwrap())
            );
            for (n, (alive, cut)) in levels
                .survivors
                .iter()
                .zip(levels.excluded.iter())
                .enumerate()
            {
                println!(
                    "  level {}: {} surviving, {} excluded",
                    n,
                    alive.len(),
                    cut.len()
                );
            }
            let verdict = is_delta_fine(&partition, &gauge, 64).expect("checkable");
            println!("checker says: {:?}", verdict);
            println!("{}", partition_to_json(&partition).expect("rational endpoints"));
        }
        CousinOutcome::DepthExhausted { depth, chain, .. } => {
            panic!("unexpectedly exhausted at {} along {:?}", depth, chain);
        }
    }

    // The tent-at-a-third gauge never lets the block holding 1/3 die: its
    // value shrinks toward zero exactly there, so the search walks a
    // single chain of nested dyadic blocks closing in on 1/3.
    println!();
    let tent = parse_gauge("(dyadic-cex)").expect("known form");
    match cousin_search(&tent, 10).expect("evaluates at dyadic midpoints") {
        CousinOutcome::Finished { depth, .. } => panic!("tent gauge finished at {}", depth),
        CousinOutcome::DepthExhausted { depth, chain, .. } => {
            println!("tent gauge still alive at depth {}", depth);
            let held: Vec<String> = chain.iter().map(|s| bits_name(s)).collect();
            println!("surviving chain: {}", held.join(" -> "));
            // 1/3 = 0.0101... in binary, and the chain spells it out.
            assert!(held.last().unwrap().starts_with("0101"));
        }
    }
}
