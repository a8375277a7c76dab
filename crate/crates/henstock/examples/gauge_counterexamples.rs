//! Gauges built to refute whole families of partitions. The tent gauge
//! vanishing at 1/3 refutes every partition with only dyadic breakpoints
//! and tags; the half-distance gauge around sqrt(2)/2 does the same to
//! rational partitions that keep their breakpoints away from it.

use henstock::codings::{fmt_rat, rat, Rat};
use henstock::dsl::parse_gauge;
use henstock::exactreal::TagPoint;
use henstock::partition::{is_delta_fine, FinenessVerdict, TaggedPartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random partition of [0, 1] with dyadic breakpoints and dyadic tags.
fn random_dyadic(rng: &mut ChaCha8Rng) -> TaggedPartition {
    let blocks = rng.gen_range(2..=24);
    let mut cuts: Vec<Rat> = (0..blocks - 1)
        .map(|_| rat(rng.gen_range(1..1024), 1024))
        .collect();
    cuts.push(rat(0, 1));
    cuts.push(rat(1, 1));
    cuts.sort();
    cuts.dedup();
    let tags: Vec<TagPoint> = cuts
        .windows(2)
        .map(|w| TagPoint::rational((&w[0] + &w[1]) / rat(2, 1)))
        .collect();
    let points = cuts.into_iter().map(TagPoint::rational).collect();
    TaggedPartition::new(points, tags).expect("sorted distinct cuts")
}

fn main() {
    let tent = parse_gauge("(dyadic-cex)").expect("known form");
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_cafe);
    let mut refuted = 0;
    for _ in 0..200 {
        let p = random_dyadic(&mut rng);
        match is_delta_fine(&p, &tent, 64).expect("checkable") {
            FinenessVerdict::Refuted { .. } => refuted += 1,
            other => panic!("a dyadic partition slipped through: {:?}", other),
        }
    }
    println!("tent gauge refuted {} of 200 random dyadic partitions", refuted);

    // Tag the whole interval by 1/3 itself and the tent relents: the
    // gauge value at exactly 1/3 is 1, enough for the single block.
    let third = TaggedPartition::new(
        vec![TagPoint::rational(rat(0, 1)), TagPoint::rational(rat(1, 1))],
        vec![TagPoint::rational(rat(1, 3))],
    )
    .expect("one block, tag inside");
    println!(
        "single block [0, 1] tagged by 1/3: {:?}",
        is_delta_fine(&third, &tent, 64).expect("checkable")
    );

    // The same game one level up: gauge value half the distance to
    // sqrt(2)/2. Any rational tag t leaves the block around sqrt(2)/2
    // reaching past it by more than |t - sqrt(2)/2| / 2.
    println!();
    let clb = parse_gauge("(clb1-gauge sqrt2-over-2)").expect("known form");
    let mut beaten = 0;
    for _ in 0..50 {
        let p = random_rational_avoiding(&mut rng);
        match is_delta_fine(&p, &clb, 64).expect("checkable") {
            FinenessVerdict::Refuted { index } => {
                if beaten == 0 {
                    let pts = p.rational_points().expect("rational breakpoints");
                    println!(
                        "first refutation: block {} = [{}, {}]",
                        index,
                        fmt_rat(&pts[index]),
                        fmt_rat(&pts[index + 1])
                    );
                }
                beaten += 1;
            }
            other => panic!("a rational partition slipped through: {:?}", other),
        }
    }
    println!("half-distance gauge refuted {} of 50 rational partitions", beaten);
}

/// Random rational partition whose breakpoints stay clear of sqrt(2)/2:
/// cuts are sampled off a grid punctured around 0.707.
fn random_rational_avoiding(rng: &mut ChaCha8Rng) -> TaggedPartition {
    let blocks = rng.gen_range(2..=24);
    let mut cuts: Vec<Rat> = Vec::new();
    while cuts.len() < blocks - 1 {
        let c = rat(rng.gen_range(1..3000), 3000);
        if c > rat(705, 1000) && c < rat(709, 1000) {
            continue;
        }
        cuts.push(c);
    }
    cuts.push(rat(0, 1));
    cuts.push(rat(1, 1));
    cuts.sort();
    cuts.dedup();
    let tags: Vec<TagPoint> = cuts
        .windows(2)
        .map(|w| TagPoint::rational((&w[0] + &w[1]) / rat(2, 1)))
        .collect();
    let points = cuts.into_iter().map(TagPoint::rational).collect();
    TaggedPartition::new(points, tags).expect("sorted distinct cuts")
}
