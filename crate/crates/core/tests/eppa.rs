use smoothbench::eppa::{graph_contrast, verify_no_eppa};

#[test]
fn no_witness_at_six_with_certificate() {
    let r = verify_no_eppa(6).unwrap();
    assert!(r.search.witness.is_none());
    assert!(r.certificate.holds);
    assert!(r.restriction.holds);
    assert!(r.holds);
}

#[test]
fn graphs_have_a_witness() {
    let out = graph_contrast(8).unwrap();
    assert!(out.witness.unwrap().b.size() <= 8);
}
