use paritycheck::triortho::{
    code_params, complete_14_qubit_code, parse_matrix_file, search_triorthogonal, verify_d_lemma, GF2Matrix,
    SearchCertificate,
};
use proptest::prelude::*;

fn reverify(cert: &SearchCertificate, k_min: usize, d2: bool) {
    if let Some(w) = cert.witness() {
        let p = code_params(w).expect("independent rows");
        assert!(w.is_triorthogonal(), "{w}");
        assert!(p.k >= k_min);
        assert!(!d2 || p.distance_at_least_2);
        assert_eq!(p.n, cert.n_range[0]);
    }
}

#[test]
fn witnesses_pass_the_checker() {
    for n in 1..=10 {
        for (k_min, d2) in [(0, false), (1, false), (0, true), (1, true), (2, true)] {
            let m_max = n.min(4);
            let cert = search_triorthogonal(n, m_max, k_min, d2).unwrap();
            reverify(&cert, k_min, d2);
        }
    }
}

#[test]
fn distance_two_codes_need_fourteen_columns() {
    for n in 9..=13 {
        let cert = search_triorthogonal(n, 5, 1, true).unwrap();
        assert!(cert.is_none_found(), "n={n}");
    }
    let cert = search_triorthogonal(14, 5, 1, true).unwrap();
    reverify(&cert, 1, true);
    assert!(cert.witness().is_some());
}

#[test]
fn nine_columns_six_rows_none_found() {
    let cert = search_triorthogonal(9, 6, 1, true).unwrap();
    assert!(cert.is_none_found());
    assert_eq!(cert.m_range, [1, 6]);
}

#[test]
fn certificates_round_trip_through_json() {
    for cert in
        [complete_14_qubit_code().unwrap(), verify_d_lemma(5).unwrap(), search_triorthogonal(6, 4, 1, true).unwrap()]
    {
        let json = serde_json::to_string(&cert).unwrap();
        let back: SearchCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }
}

#[test]
fn fourteen_column_witness_written_and_read_back() {
    let cert = complete_14_qubit_code().unwrap();
    let w = cert.witness().unwrap();
    let (g1, g0) = w.split_by_parity();
    let text = format!(
        "{}\n\n{}\n",
        GF2Matrix::new(14, g1.clone()).unwrap().to_text().trim_end(),
        GF2Matrix::new(14, g0.clone()).unwrap().to_text().trim_end()
    );
    let parsed = parse_matrix_file(&text).unwrap();
    assert_eq!(parsed.declared_g1_rows, Some(g1.len()));
    assert_eq!(code_params(&parsed.matrix).unwrap(), code_params(w).unwrap());
}

proptest! {
    // duplicating a column pair keeps every overlap parity, so triorthogonality
    // and the code parameters' k are unchanged
    #[test]
    fn duplicated_column_pairs_preserve_triorthogonality(rows in prop::collection::vec(0u64..(1 << 10), 1..6), col in 0usize..10) {
        let g = GF2Matrix::new(10, rows).unwrap();
        let mut cols = g.columns();
        cols.push(cols[col]);
        cols.push(cols[col]);
        let h = GF2Matrix::from_columns(g.num_rows(), &cols).unwrap();
        prop_assert_eq!(h.is_triorthogonal(), g.is_triorthogonal());
        prop_assert_eq!(h.is_biorthogonal(), g.is_biorthogonal());
        prop_assert_eq!(h.split_by_parity().0.len(), g.split_by_parity().0.len());
    }
}
