//! String calculus invariants: Δ-sequences against exact determinants,
//! blowdown invariants, blowup/blowdown round trips and the two unit-entry
//! lemmas on exhaustive small instances.

mod support;

const CASES: u32 = 10_000;

#[test]
fn delta_matches_minor_determinants() {
    support::delta_matches_minors(CASES).unwrap();
}

#[test]
fn blowdown_keeps_determinant_and_tracks_xi() {
    support::blowdown_invariants(CASES).unwrap();
}

#[test]
fn blowup_then_blowdown_is_identity() {
    support::blowup_then_blowdown(CASES).unwrap();
}

#[test]
fn blowdown_then_blowup_restores_intersections() {
    support::blowdown_then_blowup(CASES).unwrap();
}

#[test]
fn unit_endpoint_strings_are_negative_definite() {
    support::unit_endpoint_strings().unwrap();
}

#[test]
fn single_unit_blowdowns_keep_units_adjacent() {
    support::single_unit_blowdowns().unwrap();
}
