use std::fs;

use proptest::prelude::*;
use txconflict::frontend::{erase_positions, parse, print_source_unit, tokenize, FrontendError, SourceUnit};
use txconflict_testkit::gen::generate;
use txconflict_testkit::GenConfig;

const FIXTURES: [&str; 6] = [
    "example.sol",
    "erc20.sol",
    "dex.sol",
    "governance.sol",
    "vault.sol",
    "unsupported.sol",
];

fn fixture(name: &str) -> String {
    fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn round_trip(unit: &SourceUnit) {
    let printed = print_source_unit(unit);
    let mut again = parse(&printed, &unit.path).unwrap_or_else(|e| panic!("{e}\n{printed}"));
    let mut original = unit.clone();
    erase_positions(&mut original);
    erase_positions(&mut again);
    assert_eq!(original, again, "\n{printed}");
    // Printing is a fixed point after one pass.
    assert_eq!(print_source_unit(&again), printed);
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES.iter().filter(|n| **n != "unsupported.sol") {
        round_trip(&parse(&fixture(name), name).unwrap());
    }
}

#[test]
fn empty_inputs() {
    assert!(tokenize("").unwrap().is_empty());
    let unit = parse("pragma solidity ^0.8.0;", "p.sol").unwrap();
    assert!(unit.contracts.is_empty());
    let unit = parse("contract C {}", "c.sol").unwrap();
    let c = &unit.contracts[0];
    assert!(c.state_variables.is_empty() && c.functions.is_empty() && c.events.is_empty());
}

#[test]
fn rejected_constructs_name_themselves() {
    let cases = [
        ("contract C { function f() public { assembly { } } }", "UnsupportedConstruct"),
        ("library L {}", "UnsupportedConstruct"),
        ("interface I { function f() external; }", "UnsupportedConstruct"),
        ("contract C { using X for uint; }", "UnsupportedConstruct"),
        ("contract C { uint x; uint x; }", "ParseError"),
        ("contract C { string s = \"open; }", "LexError"),
        ("contract C { /* never closed ", "LexError"),
        ("contract C { uint x = 1 # 2; }", "LexError"),
    ];
    for (src, kind) in cases {
        let err: FrontendError = parse(src, "x.sol").unwrap_err();
        assert_eq!(err.kind(), kind, "{src}: {err}");
    }
}

fn mutate(src: &str, cuts: &[(usize, usize, u8)]) -> String {
    let mut bytes = src.as_bytes().to_vec();
    for &(at, len, op) in cuts {
        if bytes.is_empty() {
            break;
        }
        let at = at % bytes.len();
        let end = (at + len % 16).min(bytes.len());
        match op % 3 {
            0 => {
                bytes.drain(at..end);
            }
            1 => {
                let piece = bytes[at..end].to_vec();
                bytes.splice(at..at, piece);
            }
            _ => bytes.insert(at, b"{}();=+\"/*"[len % 10]),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_contracts_round_trip(seed in any::<u64>()) {
        let source = generate(seed, &GenConfig::default(), "G").render();
        round_trip(&parse(&source, "gen.sol").unwrap());
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse(&text, "fuzz.sol");
    }

    #[test]
    fn mutated_fixtures_never_panic(
        which in 0usize..FIXTURES.len(),
        cuts in proptest::collection::vec((any::<usize>(), any::<usize>(), any::<u8>()), 1..6),
    ) {
        let text = mutate(&fixture(FIXTURES[which]), &cuts);
        if let Ok(unit) = parse(&text, "fuzz.sol") {
            round_trip(&unit);
        }
    }

    #[test]
    fn deep_nesting_is_an_error(depth in 1usize..400) {
        let src = format!("contract C {{ function f() public {{ x = {}1{}; }} }}", "(".repeat(depth), ")".repeat(depth));
        let _ = parse(&src, "deep.sol");
    }
}
