//! Walk the diagonal tree: binary strings survive unless some machine,
//! run on its own index for as many steps as the string is long, halts
//! and outputs exactly the bit the string carries at that index. Every
//! level keeps survivors, but no single computable sequence threads them
//! all, and flipping a halting machine's output bit shows the cut.

use henstock::cantor::diag_tree_member;
use henstock::codings::{BitString, Nat};
use henstock::machine::{decode_program, run_program, RunResult};

fn strings_of_length(n: usize) -> impl Iterator<Item = BitString> {
    (0u64..(1 << n)).map(move |m| {
        BitString((0..n).map(|i| (m >> (n - 1 - i)) & 1 == 1).collect())
    })
}

fn fmt_bits(s: &BitString) -> String {
    if s.0.is_empty() {
        "e".to_string()
    } else {
        s.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

fn main() {
    for n in 0..=10usize {
        let survivors: Vec<BitString> =
            strings_of_length(n).filter(diag_tree_member).collect();
        match survivors.first() {
            Some(first) => println!(
                "level {:>2}: {:>4} of {:>4} survive, leftmost {}",
                n,
                survivors.len(),
                1u64 << n,
                fmt_bits(first)
            ),
            None => println!("level {:>2}: empty", n),
        }
        assert!(!survivors.is_empty());
    }

    // Find the first few machines that halt on their own index quickly
    // and watch the tree cut exactly the strings that copy their output.
    println!();
    let mut shown = 0;
    for e in 0u64.. {
        if shown == 3 {
            break;
        }
        let prog = decode_program(&Nat::from(e));
        let steps = 8;
        if let RunResult::Halted { value, .. } = run_program(&prog, &Nat::from(e), steps) {
            let bit = if value == Nat::from(1u32) {
                true
            } else if value == Nat::from(0u32) {
                false
            } else {
                continue;
            };
            // A string long enough to see the halt, agreeing at e: cut.
            let len = (e as usize + 1).max(steps as usize);
            let mut agree = BitString(vec![!bit; len]);
            agree.0[e as usize] = bit;
            let differ = BitString(vec![!bit; len]);
            println!(
                "machine {} halts on itself with bit {}: member({}) = {}, member({}) = {}",
                e,
                if bit { 1 } else { 0 },
                fmt_bits(&agree),
                diag_tree_member(&agree),
                fmt_bits(&differ),
                diag_tree_member(&differ)
            );
            assert!(!diag_tree_member(&agree));
            shown += 1;
        }
    }
}
