//! The register machine behind every enumeration in this crate: four
//! registers, three instruction kinds, numbered lines, input and output
//! both in register 0. Programs round-trip through a numeric code, and
//! stage-bounded runs give halting questions their finite approximations.

use henstock::codings::Nat;
use henstock::machine::{
    decode_program, encode_program, jump_stage, parse_program, run_program, settled_halting,
    RunResult,
};

// Triple the input: drain register 0 into register 2 three-for-one, then
// copy register 2 back. DECJZ on the always-empty register 3 is the
// unconditional jump.
const TRIPLE: &str = "\
DECJZ 0 5
INC 2
INC 2
INC 2
DECJZ 3 0
DECJZ 2 8
INC 0
DECJZ 3 5
HALT
";

fn main() {
    let prog = parse_program(TRIPLE).expect("well-formed listing");
    for input in [0u32, 1, 2, 5] {
        match run_program(&prog, &Nat::from(input), 1_000) {
            RunResult::Halted { value, steps } => {
                println!("triple({}) = {} in {} steps", input, value, steps)
            }
            RunResult::StillRunning { after } => println!("still running after {}", after),
        }
    }
    assert_eq!(
        run_program(&prog, &Nat::from(5u32), 1_000),
        RunResult::Halted {
            value: Nat::from(15u32),
            steps: 73
        }
    );

    // Numeric codes are total: every program has one, every number
    // decodes to some program, and the round trip is the identity.
    let code = encode_program(&prog);
    let back = decode_program(&code);
    println!();
    println!("program code has {} bits", code.bits());
    assert_eq!(back, prog);

    // A too-small step budget reports honestly instead of guessing.
    match run_program(&prog, &Nat::from(5u32), 10) {
        RunResult::StillRunning { after } => println!("budget 10: still running after {}", after),
        RunResult::Halted { .. } => panic!("73 steps cannot fit in 10"),
    }

    // Settled halting adds cycle detection under a state bound, so small
    // loops are caught as provable divergence instead of budget noise.
    let verdict = settled_halting(&prog, &Nat::from(2u32), 1_000, &Nat::from(1_000_000u64));
    println!("settled halting on input 2: {:?}", verdict);
    let spin = parse_program("DECJZ 3 0\n").expect("one line");
    println!(
        "settled halting on a self-jump: {:?}",
        settled_halting(&spin, &Nat::from(0u32), 1_000, &Nat::from(16u32))
    );

    // The stage-bounded jump asks a program about its own index against
    // an oracle for earlier questions; small stages answer false simply
    // because nothing has had time to halt.
    let e = Nat::from(5u32);
    println!(
        "jump of program 5 at stage 0: {}, at stage 64: {}",
        jump_stage(&|_| false, &e, 0),
        jump_stage(&|_| false, &e, 64)
    );
}
