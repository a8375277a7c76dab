//! Command dispatch for the binary: ten subcommands covering search,
//! verification, classification, evaluation, and the machine simulator.
//! All numeric output is exact rational text, so runs are reproducible
//! byte for byte.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 a search or
//! verification that ran out or refuted, 3 internal invariant violation.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::Zero;

use crate::cantor::{diag_tree_member, embed_middle_thirds, pi01_balls, InfBitOracle};
use crate::codings::{fmt_rat, parse_rat, BitString, Nat, Rat};
use crate::cousin::{cousin_search, CousinError, CousinOutcome};
use crate::dsl::{parse_function, parse_gauge, DslFunction};
use crate::exactreal::TagPoint;
use crate::logic::{classify, eval_delta00, finite_set, parse_formula, DecidableSet};
use crate::machine::{parse_program, run_program, RunResult};
use crate::partition::{
    is_delta_fine, partition_from_json, partition_to_json, riemann_integrate, riemann_sum,
    FinenessVerdict, Gauge, Integrand,
};

const USAGE: &str = "\
usage: henstock <command> [flags]

  integrate --function <dsl> --mode riemann --mesh <k>
  integrate --function <dsl> --mode gauge --epsilon <q>
  cousin --gauge <dsl> --max-depth <N> [--out <file>]
  verify-partition --gauge <dsl> --partition <file> [--budget <B>]
  classify --formula <text>
  eval --formula <text> [--assign x=3 ...] [--set X={1,2,5} ...]
  tree diag --depth <N>
  pi01 --count <k> --bound <B>
  run --prog <file> --input <n> --steps <s>
  embed --bits <01 string> [--prec <n>]
  gauge-eval --gauge <dsl> --at <q | sqrt2/2> [--prec <n>]

Function and gauge forms: (const q), (linear m c),
(piecewise (d0 ... dk) e1 ... ek), (spike p q), (spikesum (iv p q) ...),
(spikesum-pi01 N), (lift e), (heaviside), (clb1-gauge sqrt2-over-2),
(dyadic-cex), (baire-seq e1 e2 ... generator-name).";

struct Usage(String);

type Flags = Vec<(String, String)>;

fn parse_flags(args: &[String]) -> Result<Flags, Usage> {
    let mut flags = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let name = args[i]
            .strip_prefix("--")
            .ok_or_else(|| Usage(format!("expected a --flag, got {}", args[i])))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| Usage(format!("--{} needs a value", name)))?;
        flags.push((name.to_string(), value.clone()));
        i += 2;
    }
    Ok(flags)
}

fn get<'a>(flags: &'a Flags, name: &str) -> Option<&'a str> {
    flags
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v.as_str())
}

fn require<'a>(flags: &'a Flags, name: &str) -> Result<&'a str, Usage> {
    get(flags, name).ok_or_else(|| Usage(format!("missing --{}", name)))
}

fn parse_count(text: &str, what: &str) -> Result<u64, Usage> {
    text.parse()
        .map_err(|_| Usage(format!("{} must be a number, got {}", what, text)))
}

fn rational(text: &str, what: &str) -> Result<Rat, Usage> {
    let padded = if text.contains('/') {
        text.to_string()
    } else {
        format!("{}/1", text)
    };
    parse_rat(&padded).map_err(|e| Usage(format!("{} is not a rational ({})", what, e)))
}

/// Run one command, writing results to out. Diagnostics go to stderr.
pub fn dispatch(args: &[String], out: &mut dyn Write) -> i32 {
    let Some((cmd, rest)) = args.split_first() else {
        eprintln!("{}", USAGE);
        return 1;
    };
    let handled = match cmd.as_str() {
        "integrate" => cmd_integrate(rest, out),
        "cousin" => cmd_cousin(rest, out),
        "verify-partition" => cmd_verify(rest, out),
        "classify" => cmd_classify(rest, out),
        "eval" => cmd_eval(rest, out),
        "tree" => cmd_tree(rest, out),
        "pi01" => cmd_pi01(rest, out),
        "run" => cmd_run(rest, out),
        "embed" => cmd_embed(rest, out),
        "gauge-eval" => cmd_gauge_eval(rest, out),
        other => {
            eprintln!("unknown command {}\n{}", other, USAGE);
            return 1;
        }
    };
    match handled {
        Ok(code) => code,
        Err(Usage(message)) => {
            eprintln!("{}", message);
            1
        }
    }
}

fn cont_function(text: &str) -> Result<Integrand, Usage> {
    match parse_function(text).map_err(|e| Usage(e.to_string()))? {
        DslFunction::Cont(c) => Ok(Integrand::Cont(c)),
        DslFunction::Baire(b) => Err(Usage(format!(
            "{} is a rank-1 code; integration needs a continuous one",
            b.name()
        ))),
    }
}

fn cmd_integrate(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let f = cont_function(require(&flags, "function")?)?;
    match require(&flags, "mode")? {
        "riemann" => {
            let mesh = parse_count(require(&flags, "mesh")?, "--mesh")? as u32;
            if mesh > 20 {
                return Err(Usage("--mesh beyond 20 builds over a million blocks".into()));
            }
            match riemann_integrate(&f, mesh) {
                Ok((value, bound)) => {
                    writeln!(out, "{} \u{b1} {}", fmt_rat(&value), fmt_rat(&bound)).ok();
                    Ok(0)
                }
                Err(e) => Err(Usage(e.to_string())),
            }
        }
        "gauge" => {
            let eps = rational(require(&flags, "epsilon")?, "--epsilon")?;
            if eps <= Rat::zero() {
                return Err(Usage("--epsilon must be positive".into()));
            }
            let lip = match &f {
                Integrand::Cont(c) => c.lipschitz().clone(),
                Integrand::RationalIndicator => unreachable!("cont_function returns Cont"),
            };
            let radius = if lip.is_zero() {
                eps.clone()
            } else {
                &eps / &lip
            };
            let gauge = Gauge::Cont(crate::contfun::mk_const(radius));
            match cousin_search(&gauge, 40) {
                Ok(CousinOutcome::Finished { partition, .. }) => {
                    let (value, _err) = riemann_sum(&f, &partition, 66)
                        .map_err(|e| Usage(e.to_string()))?;
                    writeln!(out, "{} \u{b1} {}", fmt_rat(&value), fmt_rat(&eps)).ok();
                    Ok(0)
                }
                Ok(CousinOutcome::DepthExhausted { depth, .. }) => {
                    writeln!(out, "search exhausted at depth {}", depth).ok();
                    Ok(2)
                }
                Err(e) => {
                    eprintln!("{}", e);
                    Ok(3)
                }
            }
        }
        other => Err(Usage(format!("--mode must be riemann or gauge, got {}", other))),
    }
}

fn cmd_cousin(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let gauge = parse_gauge(require(&flags, "gauge")?).map_err(|e| Usage(e.to_string()))?;
    let depth = parse_count(require(&flags, "max-depth")?, "--max-depth")? as u32;
    if depth > 24 {
        return Err(Usage("--max-depth beyond 24 builds millions of strings".into()));
    }
    match cousin_search(&gauge, depth) {
        Ok(CousinOutcome::Finished { partition, .. }) => {
            let json = match partition_to_json(&partition) {
                Ok(j) => j,
                Err(e) => {
                    eprintln!("{}", e);
                    return Ok(3);
                }
            };
            if let Some(path) = get(&flags, "out") {
                std::fs::write(path, format!("{}\n", json))
                    .map_err(|e| Usage(format!("cannot write {}: {}", path, e)))?;
            }
            writeln!(out, "{}", json).ok();
            Ok(0)
        }
        Ok(CousinOutcome::DepthExhausted { chain, .. }) => {
            let bits: String = chain
                .last()
                .map(|s| s.iter().map(|b| if *b { '1' } else { '0' }).collect())
                .unwrap_or_default();
            writeln!(out, "{}", bits).ok();
            Ok(2)
        }
        Err(CousinError::Gauge(e)) | Err(CousinError::Partition(e)) => {
            eprintln!("{}", e);
            Ok(3)
        }
        Err(e) => {
            eprintln!("{}", e);
            Ok(3)
        }
    }
}

fn cmd_verify(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let gauge = parse_gauge(require(&flags, "gauge")?).map_err(|e| Usage(e.to_string()))?;
    let path = require(&flags, "partition")?;
    let budget = match get(&flags, "budget") {
        Some(b) => parse_count(b, "--budget")? as u32,
        None => 64,
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read {}: {}", path, e)))?;
    let partition = partition_from_json(&text).map_err(|e| Usage(e.to_string()))?;
    match is_delta_fine(&partition, &gauge, budget) {
        Ok(FinenessVerdict::Verified) => {
            writeln!(out, "verified").ok();
            Ok(0)
        }
        Ok(FinenessVerdict::Refuted { index }) => {
            writeln!(out, "refuted at block {}", index).ok();
            Ok(2)
        }
        Ok(FinenessVerdict::UnknownAtBudget { budget }) => {
            writeln!(out, "unknown at budget {}", budget).ok();
            Ok(2)
        }
        Err(e) => {
            writeln!(out, "check failed: {}", e).ok();
            Ok(2)
        }
    }
}

fn cmd_classify(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let formula = parse_formula(require(&flags, "formula")?).map_err(|e| Usage(e.to_string()))?;
    writeln!(out, "{}", classify(&formula)).ok();
    Ok(0)
}

fn cmd_eval(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let formula = parse_formula(require(&flags, "formula")?).map_err(|e| Usage(e.to_string()))?;
    let mut nums: BTreeMap<String, Nat> = BTreeMap::new();
    let mut sets: BTreeMap<String, DecidableSet> = BTreeMap::new();
    for (name, value) in flags.iter() {
        match name.as_str() {
            "assign" => {
                let (var, num) = value
                    .split_once('=')
                    .ok_or_else(|| Usage(format!("--assign wants x=3, got {}", value)))?;
                let n = parse_count(num, "--assign value")?;
                nums.insert(var.trim().to_string(), Nat::from(n));
            }
            "set" => {
                let (var, body) = value
                    .split_once('=')
                    .ok_or_else(|| Usage(format!("--set wants X={{1,2,5}}, got {}", value)))?;
                let inner = body
                    .trim()
                    .strip_prefix('{')
                    .and_then(|b| b.strip_suffix('}'))
                    .ok_or_else(|| Usage(format!("--set wants X={{1,2,5}}, got {}", value)))?;
                let mut members = Vec::new();
                for part in inner.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    members.push(Nat::from(parse_count(part, "--set member")?));
                }
                sets.insert(var.trim().to_string(), finite_set(members));
            }
            _ => {}
        }
    }
    match eval_delta00(&formula, &nums, &sets) {
        Ok(v) => {
            writeln!(out, "{}", v).ok();
            Ok(0)
        }
        Err(e) => Err(Usage(e.to_string())),
    }
}

fn cmd_tree(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let Some((kind, rest)) = args.split_first() else {
        return Err(Usage("tree wants a kind: tree diag --depth N".into()));
    };
    if kind != "diag" {
        return Err(Usage(format!("unknown tree {}; only diag is wired", kind)));
    }
    let flags = parse_flags(rest)?;
    let depth = parse_count(require(&flags, "depth")?, "--depth")? as u32;
    if depth > 16 {
        return Err(Usage("--depth beyond 16 scans millions of strings".into()));
    }
    for n in 0..=depth {
        let mut survivors = 0u64;
        let mut least: Option<String> = None;
        for m in 0..(1u64 << n) {
            let bits: Vec<bool> = (0..n).map(|i| (m >> (n - 1 - i)) & 1 == 1).collect();
            if diag_tree_member(&BitString(bits.clone())) {
                survivors += 1;
                if least.is_none() {
                    least = Some(bits.iter().map(|b| if *b { '1' } else { '0' }).collect());
                }
            }
        }
        match least {
            Some(bits) => {
                writeln!(out, "level {}: {} surviving; leftmost \"{}\"", n, survivors, bits).ok()
            }
            None => writeln!(out, "level {}: empty", n).ok(),
        };
    }
    Ok(0)
}

fn cmd_pi01(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let count = parse_count(require(&flags, "count")?, "--count")? as usize;
    let bound = parse_count(require(&flags, "bound")?, "--bound")?;
    if count > 4096 || bound > (1 << 22) {
        return Err(Usage("count past 4096 or bound past 2^22 is a long scan".into()));
    }
    let scan = pi01_balls(count, bound);
    let mut total = Rat::zero();
    for b in &scan.balls {
        total += b.ball.length();
        writeln!(
            out,
            "e={} steps={} center={} ball=[{}, {}]",
            b.e,
            b.steps,
            fmt_rat(&b.center),
            fmt_rat(b.ball.raw_lo()),
            fmt_rat(b.ball.raw_hi()),
        )
        .ok();
    }
    writeln!(out, "clamped length total {}", fmt_rat(&total)).ok();
    writeln!(out, "scan complete: {}", scan.complete).ok();
    Ok(0)
}

fn cmd_run(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let path = require(&flags, "prog")?;
    let input = parse_count(require(&flags, "input")?, "--input")?;
    let steps = parse_count(require(&flags, "steps")?, "--steps")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read {}: {}", path, e)))?;
    let prog = parse_program(&text).map_err(|e| Usage(e.to_string()))?;
    match run_program(&prog, &Nat::from(input), steps) {
        RunResult::Halted { value, steps } => {
            writeln!(out, "halted value={} steps={}", value, steps).ok();
            Ok(0)
        }
        RunResult::StillRunning { after } => {
            writeln!(out, "still running after {} steps", after).ok();
            Ok(2)
        }
    }
}

fn cmd_embed(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let bits_text = require(&flags, "bits")?;
    let prec = match get(&flags, "prec") {
        Some(p) => parse_count(p, "--prec")? as u32,
        None => 16,
    };
    if prec > 256 {
        return Err(Usage("--prec beyond 256 is past any printable use".into()));
    }
    let mut prefix = Vec::new();
    for c in bits_text.chars() {
        match c {
            '0' => prefix.push(false),
            '1' => prefix.push(true),
            other => return Err(Usage(format!("--bits wants 0s and 1s, got {}", other))),
        }
    }
    let x = embed_middle_thirds(&InfBitOracle::from_bits(prefix, false));
    writeln!(out, "{}", fmt_rat(&x.approx(prec))).ok();
    Ok(0)
}

fn cmd_gauge_eval(args: &[String], out: &mut dyn Write) -> Result<i32, Usage> {
    let flags = parse_flags(args)?;
    let gauge = parse_gauge(require(&flags, "gauge")?).map_err(|e| Usage(e.to_string()))?;
    let at = require(&flags, "at")?;
    let prec = match get(&flags, "prec") {
        Some(p) => parse_count(p, "--prec")? as u32,
        None => 16,
    };
    if prec > 256 {
        return Err(Usage("--prec beyond 256 is past any printable use".into()));
    }
    let tag = if at == "sqrt2/2" {
        TagPoint::sqrt2_over_2()
    } else {
        TagPoint::rational(rational(at, "--at")?)
    };
    match gauge.enclose_at(&tag, prec) {
        Ok((lo, hi)) => {
            writeln!(out, "[{}, {}]", fmt_rat(&lo), fmt_rat(&hi)).ok();
            Ok(0)
        }
        Err(e) => {
            writeln!(out, "no enclosure: {}", e).ok();
            Ok(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn run_cli(args: &[&str]) -> (i32, String) {
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let code = dispatch(&owned, &mut out);
        (code, String::from_utf8(out).expect("utf8 output"))
    }

    #[test]
    fn the_three_reference_invocations() {
        let (code, text) = run_cli(&[
            "integrate",
            "--function",
            "(linear 1/1 0/1)",
            "--mode",
            "riemann",
            "--mesh",
            "8",
        ]);
        assert_eq!(code, 0);
        assert_eq!(text, "1/2 \u{b1} 1/256\n");

        let (code, text) = run_cli(&["classify", "--formula", "A n. ~(n+1=0)"]);
        assert_eq!(code, 0);
        assert_eq!(text, "Pi 0 1\n");

        let (code, text) = run_cli(&["cousin", "--gauge", "(const 1/1)", "--max-depth", "8"]);
        assert_eq!(code, 0);
        let p = partition_from_json(&text).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn exit_codes_split_usage_exhaustion_and_success() {
        let (code, _) = run_cli(&["no-such-command"]);
        assert_eq!(code, 1);
        let (code, _) = run_cli(&["classify", "--formula", "A n."]);
        assert_eq!(code, 1);
        // The tent gauge needs the tag 1/3, which the dyadic search never
        // finds, so the search exhausts and prints the surviving string.
        let (code, text) = run_cli(&["cousin", "--gauge", "(dyadic-cex)", "--max-depth", "6"]);
        assert_eq!(code, 2);
        let bits = text.trim();
        assert_eq!(bits.len(), 6);
        assert!(bits.chars().all(|c| c == '0' || c == '1'));
        let (code, text) = run_cli(&["eval", "--formula", "(E x < 5)(x*x = 4)"]);
        assert_eq!(code, 0);
        assert_eq!(text, "true\n");
    }

    #[test]
    fn assignments_and_sets_reach_the_evaluator() {
        let (code, text) = run_cli(&[
            "eval",
            "--formula",
            "x in X & ~(x+1 in X)",
            "--assign",
            "x=2",
            "--set",
            "X={1,2,5}",
        ]);
        assert_eq!(code, 0);
        assert_eq!(text, "true\n");
    }

    #[test]
    fn machine_program_round_trip_through_a_file() {
        let dir = std::env::temp_dir().join("henstock-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("double.prog");
        std::fs::write(
            &path,
            "DECJZ 0 4\nINC 2\nINC 2\nDECJZ 3 0\nDECJZ 2 7\nINC 0\nDECJZ 3 4\nHALT\n",
        )
        .unwrap();
        let (code, text) = run_cli(&[
            "run",
            "--prog",
            path.to_str().unwrap(),
            "--input",
            "5",
            "--steps",
            "100",
        ]);
        assert_eq!(code, 0);
        assert!(text.contains("value=10"), "doubling program output: {}", text);
        let (code, text) = run_cli(&[
            "run",
            "--prog",
            path.to_str().unwrap(),
            "--input",
            "50",
            "--steps",
            "10",
        ]);
        assert_eq!(code, 2);
        assert!(text.contains("still running"));
    }

    #[test]
    fn embeddings_and_gauge_probes_print_exact_rationals() {
        let (code, text) = run_cli(&["embed", "--bits", "1", "--prec", "8"]);
        assert_eq!(code, 0);
        // 2/3 plus a tail of zeros: the approximant is within 2^-8 of 2/3.
        let v = parse_rat(text.trim()).unwrap();
        let gap = (v - Rat::new(2.into(), 3.into())).abs();
        assert!(gap <= Rat::new(1.into(), 256.into()));

        let (code, text) = run_cli(&[
            "gauge-eval",
            "--gauge",
            "(const 1/4)",
            "--at",
            "1/2",
            "--prec",
            "8",
        ]);
        assert_eq!(code, 0);
        assert_eq!(text, "[1/4, 1/4]\n");
    }
}
