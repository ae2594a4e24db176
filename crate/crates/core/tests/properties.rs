#[allow(dead_code)]
mod support {
    pub mod properties;
}

use support::properties as props;

const CASES: u32 = 128;

#[test]
fn ring_axioms() {
    props::ring_axioms(CASES).unwrap();
}

#[test]
fn euler_matches_literal_product() {
    props::euler_vs_product(32).unwrap();
}

#[test]
fn sparse_kernel_matches_schoolbook() {
    props::sparse_vs_schoolbook(CASES).unwrap();
}

#[test]
fn derivative_is_a_derivation() {
    props::leibniz(CASES).unwrap();
}

#[test]
fn u_undoes_dilate() {
    props::u_after_dilate(CASES).unwrap();
}

#[test]
fn twisted_components_partition_coefficients() {
    props::twist_partition(CASES).unwrap();
}

#[test]
fn coefficient_files_round_trip() {
    props::coeffile_round_trip(CASES).unwrap();
}
