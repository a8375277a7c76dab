//! Parse arithmetic formulas, read their quantifier shape off the page,
//! and run the decidable fragment. Bounded quantifiers are transparent
//! for classification; unbounded ones are counted in alternating blocks,
//! number quantifiers first order 0, set quantifiers order 1.

use std::collections::BTreeMap;

use henstock::codings::Nat;
use henstock::logic::{
    basic_axiom_texts, classify, eval_delta00, finite_set, parse_formula, search_sigma01,
    universal_closure, SearchOutcome,
};

fn main() {
    for text in basic_axiom_texts() {
        let f = parse_formula(text).expect("axioms parse");
        println!("{:<46} : {}", format!("{}", f), classify(&f));
    }

    println!();
    for text in [
        "(A n < 10) (E m. m = n+n)",
        "E n. A m. ~(m < n)",
        "E X. A n. ((n in X) <-> (n+n < 9))",
        "A X. E Y. A n. ((n in Y) <-> ~(n in X))",
        "E X. A n. ((n in X) <-> (E m. m+m = n))",
    ] {
        let f = parse_formula(text).expect("parses");
        println!("{:<46} : {}", text, classify(&f));
    }

    // The decidable fragment evaluates outright once free variables get
    // values: assignments for numbers, decidable sets for set names.
    println!();
    let f = parse_formula("(A k < n) ((k in X) -> (E m < n) (m+k = n))").expect("parses");
    let mut nums = BTreeMap::new();
    nums.insert("n".to_string(), Nat::from(6u32));
    let mut sets = BTreeMap::new();
    sets.insert(
        "X".to_string(),
        finite_set(vec![Nat::from(2u32), Nat::from(4u32)]),
    );
    let value = eval_delta00(&f, &nums, &sets).expect("closed under the environment");
    println!("evens below 6 pair off against n = 6: {}", value);

    // Existential formulas over a decidable matrix are searched in the
    // pairing order, so the reported witness is the least one found.
    let g = parse_formula("E a. E b. ((a+a)+b = 10 & b < 3)").expect("parses");
    match search_sigma01(&g, 4096, &BTreeMap::new(), &BTreeMap::new()).expect("searchable") {
        SearchOutcome::Witness(w) => println!("witness for 2a + b = 10, b < 3: {:?}", w),
        SearchOutcome::ExhaustedAtBudget(b) => panic!("no witness through {}", b),
    }

    // Free variables are read off in first-use order and closed
    // universally, numbers outside sets.
    let open = parse_formula("(x < y) & (y in S)").expect("parses");
    println!("closure of (x < y) & (y in S): {}", universal_closure(&open));
}
