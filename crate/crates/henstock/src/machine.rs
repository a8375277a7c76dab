//! A four-register counter machine with a total numeric code.
//!
//! Programs are finite instruction lists over four unbounded registers.
//! Every natural number decodes to some program (malformed numbers give
//! the empty program), so the numbering is a total enumeration of the
//! partial functions the machine computes. Register 0 carries the input;
//! an explicit HALT reports register 0 back, while a run that walks past
//! the last instruction reports 0. The empty program is therefore the
//! immediately-halting zero function.
//!
//! QUERY extends the base machine with set-oracle access: it overwrites a
//! register with the oracle's membership bit for that register's value.
//! Plain runs answer every query with the empty set.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::codings::{pair_cantor, unpair_cantor, Nat};

/// Decoding refuses to materialize programs claiming more instructions
/// than this; such codes fall back to the empty program.
pub const MAX_DECODED_LEN: u64 = 4096;

pub const REGISTER_COUNT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// Increment the register.
    Inc(usize),
    /// If the register is zero jump to the address, else decrement and
    /// fall through.
    Decjz(usize, usize),
    /// Stop, reporting register 0.
    Halt,
    /// Replace the register's value v by the oracle bit for v.
    Query(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyProgram {
    instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunResult {
    Halted { value: Nat, steps: u64 },
    StillRunning { after: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SettledVerdict {
    Halts { value: Nat, steps: u64 },
    /// A full machine state repeated; the run can never halt.
    ProvablyLoops { at_step: u64 },
    Unsettled { after: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineError {
    BadLine { line: usize, text: String },
    BadRegister { line: usize, register: u64 },
    BadAddress { index: usize, addr: usize, len: usize },
}

impl fmt::Display for MachineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineError::BadLine { line, text } => {
                write!(f, "line {}: unrecognized instruction {:?}", line, text)
            }
            MachineError::BadRegister { line, register } => {
                write!(
                    f,
                    "line {}: register {} out of range (0..{})",
                    line,
                    register,
                    REGISTER_COUNT - 1
                )
            }
            MachineError::BadAddress { index, addr, len } => {
                write!(
                    f,
                    "instruction {}: jump target {} outside program of length {}",
                    index, addr, len
                )
            }
        }
    }
}

impl std::error::Error for MachineError {}

impl ToyProgram {
    /// Validates that every jump lands inside the program.
    pub fn new(instructions: Vec<Instruction>) -> Result<Self, MachineError> {
        let len = instructions.len();
        for (index, ins) in instructions.iter().enumerate() {
            if let Instruction::Decjz(_, addr) = ins {
                if *addr >= len {
                    return Err(MachineError::BadAddress {
                        index,
                        addr: *addr,
                        len,
                    });
                }
            }
        }
        Ok(ToyProgram { instructions })
    }

    pub fn empty() -> Self {
        ToyProgram {
            instructions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Inc(r) => write!(f, "INC {}", r),
            Instruction::Decjz(r, a) => write!(f, "DECJZ {} {}", r, a),
            Instruction::Halt => write!(f, "HALT"),
            Instruction::Query(r) => write!(f, "QUERY {}", r),
        }
    }
}

impl fmt::Display for ToyProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instructions.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", ins)?;
        }
        Ok(())
    }
}

/// One instruction per line: `INC r`, `DECJZ r addr`, `HALT`, `QUERY r`.
/// Blank lines are skipped; registers must be 0..3 and jump targets must
/// land inside the program.
pub fn parse_program(text: &str) -> Result<ToyProgram, MachineError> {
    let mut instructions = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        let bad = || MachineError::BadLine {
            line,
            text: trimmed.to_string(),
        };
        let reg = |s: &str| -> Result<usize, MachineError> {
            let r: u64 = s.parse().map_err(|_| bad())?;
            if r as usize >= REGISTER_COUNT {
                return Err(MachineError::BadRegister { line, register: r });
            }
            Ok(r as usize)
        };
        let ins = match parts.as_slice() {
            ["INC", r] => Instruction::Inc(reg(r)?),
            ["DECJZ", r, a] => {
                let addr: usize = a.parse().map_err(|_| bad())?;
                Instruction::Decjz(reg(r)?, addr)
            }
            ["HALT"] => Instruction::Halt,
            ["QUERY", r] => Instruction::Query(reg(r)?),
            _ => return Err(bad()),
        };
        instructions.push(ins);
    }
    ToyProgram::new(instructions)
}

fn encode_instruction(ins: &Instruction) -> Nat {
    let (op, arg) = match ins {
        Instruction::Inc(r) => (0u32, Nat::from(*r)),
        Instruction::Decjz(r, a) => (1, pair_cantor(&Nat::from(*r), &Nat::from(*a))),
        Instruction::Halt => (2, Nat::zero()),
        Instruction::Query(r) => (3, Nat::from(*r)),
    };
    pair_cantor(&op.into(), &arg)
}

fn decode_instruction(c: &Nat, len: usize) -> Option<Instruction> {
    let (op, arg) = unpair_cantor(c);
    let small = |n: &Nat| -> Option<usize> {
        if *n < Nat::from(REGISTER_COUNT) {
            Some(u64::try_from(n).ok()? as usize)
        } else {
            None
        }
    };
    if op == Nat::zero() {
        Some(Instruction::Inc(small(&arg)?))
    } else if op == Nat::one() {
        let (r, a) = unpair_cantor(&arg);
        let addr = u64::try_from(&a).ok()? as usize;
        if addr >= len {
            return None;
        }
        Some(Instruction::Decjz(small(&r)?, addr))
    } else if op == Nat::from(2u32) {
        if arg.is_zero() {
            Some(Instruction::Halt)
        } else {
            None
        }
    } else if op == Nat::from(3u32) {
        Some(Instruction::Query(small(&arg)?))
    } else {
        None
    }
}

/// Program number: the length paired with the right-nested instruction
/// codes. Every program gets a distinct number and encode/decode is a
/// round trip.
pub fn encode_program(prog: &ToyProgram) -> Nat {
    let mut packed = Nat::zero();
    for ins in prog.instructions.iter().rev() {
        packed = pair_cantor(&encode_instruction(ins), &packed);
    }
    pair_cantor(&Nat::from(prog.len()), &packed)
}

/// Total decoding: any malformed part (unknown opcode, bad register,
/// jump outside, or an absurd claimed length) yields the empty program,
/// which halts immediately with value 0.
pub fn decode_program(e: &Nat) -> ToyProgram {
    let (len_nat, mut rest) = unpair_cantor(e);
    if len_nat > Nat::from(MAX_DECODED_LEN) {
        return ToyProgram::empty();
    }
    let len = u64::try_from(&len_nat).expect("bounded above") as usize;
    let mut instructions = Vec::with_capacity(len);
    for _ in 0..len {
        let (code, tail) = unpair_cantor(&rest);
        rest = tail;
        match decode_instruction(&code, len) {
            Some(ins) => instructions.push(ins),
            None => return ToyProgram::empty(),
        }
    }
    if !rest.is_zero() {
        return ToyProgram::empty();
    }
    ToyProgram { instructions }
}

/// Step-bounded deterministic run with oracle answers for QUERY.
/// Halting is monotone in the step budget: once halted, any larger
/// budget reports the same value and step count.
pub fn run_with_oracle(
    prog: &ToyProgram,
    input: &Nat,
    steps: u64,
    oracle: &dyn Fn(&Nat) -> bool,
) -> RunResult {
    let mut regs = [Nat::zero(), Nat::zero(), Nat::zero(), Nat::zero()];
    regs[0] = input.clone();
    let mut pc = 0usize;
    let mut taken = 0u64;
    loop {
        if pc >= prog.instructions.len() {
            return RunResult::Halted {
                value: Nat::zero(),
                steps: taken,
            };
        }
        if taken >= steps {
            return RunResult::StillRunning { after: taken };
        }
        taken += 1;
        match &prog.instructions[pc] {
            Instruction::Inc(r) => {
                regs[*r] += 1u32;
                pc += 1;
            }
            Instruction::Decjz(r, a) => {
                if regs[*r].is_zero() {
                    pc = *a;
                } else {
                    regs[*r] -= 1u32;
                    pc += 1;
                }
            }
            Instruction::Halt => {
                return RunResult::Halted {
                    value: regs[0].clone(),
                    steps: taken,
                };
            }
            Instruction::Query(r) => {
                let bit = oracle(&regs[*r]);
                regs[*r] = if bit { Nat::one() } else { Nat::zero() };
                pc += 1;
            }
        }
    }
}

/// Oracle-free run: queries see the empty set.
pub fn run_program(prog: &ToyProgram, input: &Nat, steps: u64) -> RunResult {
    run_with_oracle(prog, input, steps, &|_| false)
}

/// Universal application: decode the number, then run.
pub fn run_machine(e: &Nat, input: &Nat, steps: u64) -> RunResult {
    run_program(&decode_program(e), input, steps)
}

/// Bounded simulation plus cycle detection. States whose registers all
/// stay at or below `state_bound` are recorded; revisiting one proves
/// the run loops forever. Larger states pass through unrecorded, so the
/// verdict stays sound but may come back Unsettled.
pub fn settled_halting(
    prog: &ToyProgram,
    input: &Nat,
    steps: u64,
    state_bound: &Nat,
) -> SettledVerdict {
    let mut regs = [Nat::zero(), Nat::zero(), Nat::zero(), Nat::zero()];
    regs[0] = input.clone();
    let mut pc = 0usize;
    let mut seen: HashSet<(usize, [Nat; 4])> = HashSet::new();
    for taken in 0..=steps {
        if pc >= prog.instructions.len() {
            return SettledVerdict::Halts {
                value: Nat::zero(),
                steps: taken,
            };
        }
        if regs.iter().all(|r| r <= state_bound) {
            if !seen.insert((pc, regs.clone())) {
                return SettledVerdict::ProvablyLoops { at_step: taken };
            }
        }
        if taken == steps {
            break;
        }
        match &prog.instructions[pc] {
            Instruction::Inc(r) => {
                regs[*r] += 1u32;
                pc += 1;
            }
            Instruction::Decjz(r, a) => {
                if regs[*r].is_zero() {
                    pc = *a;
                } else {
                    regs[*r] -= 1u32;
                    pc += 1;
                }
            }
            Instruction::Halt => {
                return SettledVerdict::Halts {
                    value: regs[0].clone(),
                    steps: taken + 1,
                };
            }
            Instruction::Query(r) => {
                // Oracle-free setting: queries see the empty set.
                regs[*r] = Nat::zero();
                pc += 1;
            }
        }
    }
    SettledVerdict::Unsettled { after: steps }
}

/// True when oracle-machine e halts on input e within the stage budget,
/// queries answered by the descriptor. Monotone in the stage.
pub fn jump_stage(oracle: &dyn Fn(&Nat) -> bool, e: &Nat, stage: u64) -> bool {
    matches!(
        run_with_oracle(&decode_program(e), e, stage, oracle),
        RunResult::Halted { .. }
    )
}

/// A total listing of programs; index i names the i-th program.
pub type ProgramEnumeration = Arc<dyn Fn(u64) -> ToyProgram + Send + Sync>;

/// The standard listing through the total decoding.
pub fn default_enumeration() -> ProgramEnumeration {
    Arc::new(|e| decode_program(&Nat::from(e)))
}

/// The standard listing with finitely many slots overridden; handy for
/// planting known programs at small indices.
pub fn seeded_enumeration(overrides: Vec<(u64, ToyProgram)>) -> ProgramEnumeration {
    Arc::new(move |e| {
        for (slot, prog) in &overrides {
            if *slot == e {
                return prog.clone();
            }
        }
        decode_program(&Nat::from(e))
    })
}

/// Ignore the input and halt with the given value in register 0: clear
/// register 0 with a decrement loop, then increment it back up. Halts on
/// input m after exactly 2m + value + 2 steps.
pub fn constant_program(value: u64) -> ToyProgram {
    let mut instructions = vec![Instruction::Decjz(0, 2), Instruction::Decjz(3, 0)];
    for _ in 0..value {
        instructions.push(Instruction::Inc(0));
    }
    instructions.push(Instruction::Halt);
    ToyProgram::new(instructions).expect("constant program addresses are fixed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codings::{rat_code, rat_decode_total, Rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    #[test]
    fn halt_reports_register_zero_and_costs_a_step() {
        let p = parse_program("HALT").unwrap();
        assert_eq!(
            run_program(&p, &nat(7), 1),
            RunResult::Halted {
                value: nat(7),
                steps: 1
            }
        );
        assert_eq!(run_program(&p, &nat(7), 0), RunResult::StillRunning { after: 0 });
    }

    #[test]
    fn empty_program_is_the_immediate_zero_function() {
        let p = ToyProgram::empty();
        for budget in [0u64, 1, 100] {
            assert_eq!(
                run_program(&p, &nat(9), budget),
                RunResult::Halted {
                    value: nat(0),
                    steps: 0
                }
            );
        }
    }

    #[test]
    fn increment_then_halt() {
        let p = parse_program("INC 0\nHALT").unwrap();
        assert_eq!(
            run_program(&p, &nat(5), 2),
            RunResult::Halted {
                value: nat(6),
                steps: 2
            }
        );
        assert_eq!(run_program(&p, &nat(5), 1), RunResult::StillRunning { after: 1 });
    }

    #[test]
    fn tight_loop_never_halts() {
        // Register 1 stays zero, so the jump retargets the same line.
        let p = parse_program("DECJZ 1 0").unwrap();
        assert_eq!(
            run_program(&p, &nat(0), 1000),
            RunResult::StillRunning { after: 1000 }
        );
        match settled_halting(&p, &nat(0), 1000, &nat(16)) {
            SettledVerdict::ProvablyLoops { at_step } => assert!(at_step <= 2),
            other => panic!("expected a loop verdict, got {:?}", other),
        }
    }

    #[test]
    fn halting_is_monotone_in_the_budget() {
        let p = constant_program(3);
        let first = (0..100)
            .map(|s| run_program(&p, &nat(4), s))
            .find_map(|r| match r {
                RunResult::Halted { value, steps } => Some((value, steps)),
                _ => None,
            })
            .unwrap();
        // 2*4 + 3 + 2 steps by the builder's accounting.
        assert_eq!(first, (nat(3), 13));
        for extra in [13u64, 14, 50] {
            assert_eq!(
                run_program(&p, &nat(4), extra),
                RunResult::Halted {
                    value: nat(3),
                    steps: 13
                }
            );
        }
    }

    #[test]
    fn text_form_round_trips_and_rejects_junk() {
        let text = "DECJZ 0 2\nDECJZ 3 0\nINC 0\nHALT";
        let p = parse_program(text).unwrap();
        assert_eq!(p.to_string(), text);
        assert_eq!(p, constant_program(1));
        match parse_program("INC 9") {
            Err(MachineError::BadRegister { line: 1, register: 9 }) => {}
            other => panic!("unexpected {:?}", other),
        }
        match parse_program("DECJZ 0 7") {
            Err(MachineError::BadAddress { index: 0, addr: 7, len: 1 }) => {}
            other => panic!("unexpected {:?}", other),
        }
        match parse_program("NOP") {
            Err(MachineError::BadLine { line: 1, .. }) => {}
            other => panic!("unexpected {:?}", other),
        }
        assert_eq!(parse_program("QUERY 2").unwrap().to_string(), "QUERY 2");
    }

    #[test]
    fn numbering_round_trips_and_decodes_totally() {
        let progs = [
            ToyProgram::empty(),
            parse_program("HALT").unwrap(),
            constant_program(0),
            constant_program(5),
            parse_program("QUERY 1\nDECJZ 1 0\nHALT").unwrap(),
        ];
        for p in &progs {
            assert_eq!(decode_program(&encode_program(p)), *p);
        }
        // Distinct programs get distinct numbers.
        let codes: Vec<Nat> = progs.iter().map(encode_program).collect();
        for i in 0..codes.len() {
            for j in 0..i {
                assert_ne!(codes[i], codes[j]);
            }
        }
        // Every number decodes to something runnable.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
        for _ in 0..200 {
            let e = nat(rng.gen_range(0..1_000_000));
            let p = decode_program(&e);
            match run_program(&p, &nat(1), 64) {
                RunResult::Halted { steps, .. } => assert!(steps <= 64),
                RunResult::StillRunning { after } => assert_eq!(after, 64),
            }
        }
    }

    #[test]
    fn unbounded_growth_stays_unsettled() {
        // Register 0 grows forever; no bounded state ever repeats.
        let p = parse_program("INC 0\nDECJZ 3 0").unwrap();
        assert_eq!(
            settled_halting(&p, &nat(0), 500, &nat(8)),
            SettledVerdict::Unsettled { after: 500 }
        );
    }

    #[test]
    fn query_reads_the_oracle() {
        // Answer the oracle question for the input and report the bit.
        let p = parse_program("QUERY 0\nHALT").unwrap();
        let odd = |n: &Nat| n % 2u32 == Nat::one();
        assert_eq!(
            run_with_oracle(&p, &nat(3), 2, &odd),
            RunResult::Halted {
                value: nat(1),
                steps: 2
            }
        );
        assert_eq!(
            run_with_oracle(&p, &nat(4), 2, &odd),
            RunResult::Halted {
                value: nat(0),
                steps: 2
            }
        );
        // Without an oracle the query reads the empty set.
        assert_eq!(
            run_program(&p, &nat(3), 2),
            RunResult::Halted {
                value: nat(0),
                steps: 2
            }
        );
    }

    #[test]
    fn stage_bounded_jump_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
        let odd = |n: &Nat| n % 2u32 == Nat::one();
        for _ in 0..100 {
            let e = nat(rng.gen_range(0..50_000));
            let stage = rng.gen_range(0..60);
            if jump_stage(&odd, &e, stage) {
                assert!(jump_stage(&odd, &e, stage + 1));
                assert!(jump_stage(&odd, &e, stage + 37));
            }
        }
    }

    #[test]
    fn planted_constant_programs_compute_their_rational() {
        let q = Rat::new(1.into(), 2.into());
        let code_value = u64::try_from(&rat_code(&q)).unwrap();
        let prog = constant_program(code_value);
        let listing = seeded_enumeration(vec![(3, prog.clone())]);
        assert_eq!(listing(3), prog);
        assert_eq!(listing(4), decode_program(&nat(4)));
        match run_program(&listing(3), &nat(6), 10_000) {
            RunResult::Halted { value, .. } => assert_eq!(rat_decode_total(&value), q),
            other => panic!("constant program failed to halt: {:?}", other),
        }
    }
}
