use thetaforge::corpus::{self, parse_records, write_record, IdentityRecord, Stage};
use thetaforge::ecs::ShiftRange;
use thetaforge::expand::expand_product;
use thetaforge::series::first_mismatch;
use thetaforge::{eval, parse, MonomialArg};

fn records() -> Vec<IdentityRecord> {
    corpus::load_default().unwrap()
}

fn record(id: &str) -> IdentityRecord {
    records().into_iter().find(|r| r.id == id).unwrap_or_else(|| panic!("no record {id}"))
}

fn one(text: &str) -> IdentityRecord {
    let mut v = parse_records(text).unwrap();
    assert_eq!(v.len(), 1);
    v.remove(0)
}

#[test]
fn every_derivation_replays_at_default_order() {
    let recs = records();
    let reports = corpus::verify_all_derivations(&recs, corpus::DEFAULT_DERIVATION_ORDER);
    let with_blocks = recs.iter().filter(|r| !r.derivations.is_empty()).count();
    assert_eq!(reports.len(), with_blocks);
    assert!(with_blocks >= 25, "only {with_blocks} records carry derivations");
    let bad: Vec<_> = reports.iter().filter(|r| !r.ok).collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn named_statement_examples() {
    for id in ["I4", "I7"] {
        let r = corpus::verify(&record(id), 200).unwrap();
        assert!(r.ok, "{r:?}");
    }
}

#[test]
fn one_flipped_sign_is_caught() {
    let mut rec = record("I7");
    let text = rec.lhs.to_string();
    let flipped = text.replacen("+ 2*q*", "- 2*q*", 1);
    assert_ne!(flipped, text, "unexpected I7 lhs layout {text}");
    rec.lhs = parse(&flipped).unwrap();
    let r = corpus::verify(&rec, 200).unwrap();
    assert!(!r.ok);
    assert!(r.first_mismatch.unwrap() < 10, "{r:?}");
}

#[test]
fn ids_are_unique_and_reports_keep_load_order() {
    let recs = records();
    let reports = corpus::verify_all(&recs, 50);
    let ids: Vec<&str> = reports.iter().map(|r| r.id.as_str()).collect();
    let loaded: Vec<&str> = recs.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, loaded);
    let unique: std::collections::BTreeSet<&str> = ids.iter().copied().collect();
    assert_eq!(unique.len(), ids.len());
}

#[test]
fn order_below_ten_is_rejected() {
    assert!(corpus::verify(&record("I4"), 9).is_err());
}

#[test]
fn records_round_trip_through_text() {
    for rec in records() {
        let back = one(&write_record(&rec));
        assert_eq!(back, rec, "{}", rec.id);
    }
}

#[test]
fn identities_13_and_14_share_a_left_side() {
    let a = eval(&record("I13").lhs, 300).unwrap();
    let b = eval(&record("I14").lhs, 300).unwrap();
    assert_eq!(first_mismatch(&a, &b, 300).unwrap(), None);
    assert!(corpus::verify_derivation(&record("I13-I14"), 200).unwrap().ok);
}

#[test]
fn both_left_side_matrices_of_identity_11_give_the_same_sum() {
    let rec = record("I11-II");
    let blocks = corpus::expansions(&rec).unwrap();
    assert_eq!(blocks.len(), 1);
    let e = &blocks[0];
    assert_eq!(e.len(), 3);
    // different combinations, one infinite sum
    assert_ne!(e[1].simplified(), e[2].simplified());
    assert_eq!(first_mismatch(&e[1].series(200).unwrap(), &e[2].series(200).unwrap(), 200).unwrap(), None);
}

#[test]
fn corollary_records_verify_at_150() {
    for id in ["C4.1a", "C4.1b", "C4.2"] {
        let r = corpus::verify(&record(id), 150).unwrap();
        assert!(r.ok, "{r:?}");
    }
}

#[test]
fn named_derivation_examples() {
    for id in ["I4", "I6", "RS-5"] {
        let r = corpus::verify_derivation(&record(id), 200).unwrap();
        assert!(r.ok, "{r:?}");
    }
    let rs5 = record("RS-5");
    let d = &rs5.derivations[0];
    assert_eq!(d.form, "quad: 2,2,3 | lin: 2,1 | delta: 0,1".parse().unwrap());
    let mats: Vec<String> = d.expansions.iter().map(|x| x.system.b.to_string()).collect();
    for b in ["1,2;-1,1", "1,-4;1,3"] {
        let want: thetaforge::ecs::IntMatrix = b.parse().unwrap();
        assert!(mats.contains(&want.to_string()), "{b} not in {mats:?}");
    }
}

/// The data as printed (lin 1,2 and B₁ = [[1,1],[−2,1]]) does not diagonalize
/// the form, so replay stops at expansion.
#[test]
fn printed_identity_6_data_fails_at_expansion() {
    let rec = one(
        "id: I6-printed\n\
         scale: 2\n\
         lhs: f(-q^2,-q^3)*f(-q^18,-q^27) + q^2*f(-q,-q^4)*f(-q^9,-q^36)\n\
         rhs: f(-q^3)*f(-q^3)\n\
         derivation.form: quad: 2,2,5 | lin: 1,2\n\
         derivation.B1: 1,1;-2,1  side: 2*rhs\n\
         derivation.B2: 0,-5;1,1  side: 2*lhs\n",
    );
    let r = corpus::verify_derivation(&rec, 200).unwrap();
    assert!(!r.ok);
    assert_eq!(r.stage, Some(Stage::Expansion), "{r:?}");
    assert_eq!(r.failed_at, Some((1, 1)));
}

#[test]
fn printed_identity_19_right_side_fails_early() {
    let mut rec = record("I19-1");
    rec.rhs = parse("f(-q^3,-q^12)*f(-q^26,-q^39) - q^2*f(-q^3,-q^12)*f(-q^13,-q^52)").unwrap();
    let r = corpus::verify(&rec, 300).unwrap();
    assert_eq!(r.first_mismatch, Some(5), "{r:?}");
}

/// The closed form for `f(a₁,b₁)·f(a₂,b₂)` against the general engine's
/// expansion of the same records, term by term.
#[test]
fn closed_product_formula_matches_general_engine() {
    let (one, q, nq) = (MonomialArg::q(0), MonomialArg::q, MonomialArg::neg_q);
    let cases = [
        ("I2", [one, q(1), nq(2), nq(2)]),
        ("I5", [one, nq(1), one, nq(4)]),
        ("I7", [one, q(1), nq(3), nq(3)]),
        ("I8", [nq(1), nq(1), one, q(3)]),
        ("I11", [one, nq(1), one, nq(6)]),
        ("I12", [one, nq(2), one, nq(3)]),
    ];
    for (id, [a1, b1, a2, b2]) in cases {
        let rec = record(id);
        let general = &corpus::expansions(&rec).unwrap()[0][0];
        let b = &rec.derivations[0].expansions[0].system.b;
        let closed = expand_product(a1, b1, a2, b2, b, ShiftRange::Centered).unwrap();
        assert_eq!(closed.simplified(), general.simplified(), "{id}");
        let rhs = eval(&rec.rhs, 200).unwrap();
        assert_eq!(first_mismatch(&closed.series(200).unwrap(), &rhs, 200).unwrap(), None, "{id}");
    }
}
