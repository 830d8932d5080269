mod common;

use ccs_hhpb::conf::{self, ConfStructure};
use ccs_hhpb::crosscheck::Generator;
use ccs_hhpb::encoding::encode;
use ccs_hhpb::equiv::{check_process, check_structure, Relation};
use ccs_hhpb::syntax::{parse, parse_with, SumMode};

fn enc(s: &str) -> ConfStructure {
    encode(&parse_with(s, SumMode::General).unwrap())
}

#[test]
fn lazy_product_matches_subset_enumeration() {
    let texts = ["0", "a", "'a", "a.b", "a + b", "a | b", "a.a", "'a.b + c"];
    for s in texts {
        for t in texts {
            let (c1, c2) = (enc(s), enc(t));
            if c1.event_count() + c2.event_count() > 6 {
                continue;
            }
            assert_eq!(
                common::naive_product(&c1, &c2),
                common::library_product(&c1, &c2),
                "{s} x {t}"
            );
        }
    }
}

#[test]
fn product_of_two_actions() {
    // (a,*), (*,b), (a,b): empty, each single, the pair, and both singles together
    let p = conf::product(&enc("a"), &enc("b"));
    assert_eq!(p.event_count(), 3);
    assert_eq!(p.configs().len(), 5);
    assert_eq!(common::naive_product(&enc("a"), &enc("b")).len(), 5);
}

#[test]
fn random_products_match() {
    let mut g = Generator::new(11);
    let mut compared = 0;
    while compared < 40 {
        let (c1, c2) = (encode(&g.process(3)), encode(&g.process(3)));
        if c1.event_count() + c2.event_count() > 6 {
            continue;
        }
        assert_eq!(common::naive_product(&c1, &c2), common::library_product(&c1, &c2));
        compared += 1;
    }
}

#[test]
fn fixpoint_matches_kleene_iteration() {
    let pairs = [
        ("a.a | b", "a | a | b"),
        ("a.(b+b)", "a.b + a.b"),
        ("a | b", "a.b + b.a"),
        ("a.b + a.c", "a.(b + c)"),
        ("'a | a.b", "'a | a.b"),
        ("a | a", "a.a"),
        ("(a|(b+c)) + (a|b) + ((a+c)|b)", "(a|(b+c)) + ((a+c)|b)"),
    ];
    for (s, t) in pairs {
        let (c1, c2) = (enc(s), enc(t));
        for rel in Relation::ALL {
            let fast = check_structure(&c1, &c2, rel).unwrap();
            assert_eq!(
                fast.holds,
                common::naive_check(&c1, &c2, rel),
                "{rel} on {s} / {t}"
            );
            if fast.holds {
                common::validate_structure_relation(&c1, &c2, rel, &fast.relation).unwrap();
            }
        }
    }
}

#[test]
fn auto_concurrent_pair_under_every_relation() {
    let (c1, c2) = (enc("a.a | b"), enc("a | a | b"));
    assert_eq!(common::universe_size(&c1, &c2), 6);
    for rel in Relation::ALL {
        let fix = check_structure(&c1, &c2, rel).unwrap().holds;
        assert_eq!(common::enumerate_relations(&c1, &c2, rel, 20), Some(fix), "{rel}");
        assert!(!fix, "{rel}");
    }
}

#[test]
fn process_witnesses_validate() {
    let pairs = [
        ("a.(b+b)", "a.b + a.b"),
        ("(a|(b+c)) + (a|b) + ((a+c)|b)", "(a|(b+c)) + ((a+c)|b)"),
        ("a.b | c.'a", "a.b | c.'a"),
        ("(a | 'a)\\{a}", "(a | 'a)\\{a}"),
    ];
    for (s, t) in pairs {
        let (p, q) = (
            parse_with(s, SumMode::General).unwrap(),
            parse_with(t, SumMode::General).unwrap(),
        );
        for rel in Relation::ALL {
            let v = check_process(&p, &q, rel).unwrap();
            if v.holds {
                common::validate_process_relation(&p, &q, rel, 1, &v.relation).unwrap();
            }
        }
    }
}

#[test]
fn sums_pair_separates_hereditary() {
    let (c1, c2) = (enc("(a|(b+c)) + (a|b) + ((a+c)|b)"), enc("(a|(b+c)) + ((a+c)|b)"));
    assert!(common::naive_check(&c1, &c2, Relation::Hpb));
    assert!(!common::naive_check(&c1, &c2, Relation::Hhpb));
    let v = check_structure(&c1, &c2, Relation::Hhpb).unwrap();
    assert!(v
        .play
        .iter()
        .any(|s| s.attack.direction == ccs_hhpb::rccs::Direction::Backward));
}

#[test]
fn encodings_satisfy_axioms() {
    for s in [
        "a + a",
        "a | a",
        "'a | a.b",
        "a.a | b",
        "a | a | b",
        "(a.b | 'b)\\{b}",
        "a.(b | c) + d",
    ] {
        assert_eq!(common::axioms(&enc(s)), Ok(()), "{s}");
    }
    assert_eq!(parse("a.b").unwrap(), parse("a.b.0").unwrap());
}
