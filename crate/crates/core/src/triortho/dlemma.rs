use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use super::{GF2Matrix, SearchCertificate, SearchResult, TriorthoError};

/// Largest width accepted by [`verify_d_lemma`].
pub const D_LEMMA_MAX_WIDTH: usize = 8;
const MIN_ROWS: usize = 2;
const MAX_ROWS: usize = 4;

/// Predicates on a candidate `D` block (rows as bit masks over `u` columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DCondition {
    /// Every row is nonzero.
    NontrivialRows,
    /// The union of the rows is every column.
    CoversAllColumns,
    /// Every pair of rows overlaps on an even number of columns.
    PairwiseEvenOverlap,
    /// No combination of rows is the all-ones vector.
    SpanExcludesAllOnes,
    /// Every pair overlaps on at least 2 columns and each row has at least 2
    /// columns outside the other.
    OverlapAndExclusiveSupport,
    /// Every row has even weight. Not listed among the stated conditions; it
    /// follows from the even weight of the `(C D)` and `C` rows.
    EvenWeightRows,
}

impl DCondition {
    /// Conditions as stated for the minimal-width argument.
    pub const STATED: [DCondition; 5] = [
        DCondition::NontrivialRows,
        DCondition::CoversAllColumns,
        DCondition::PairwiseEvenOverlap,
        DCondition::SpanExcludesAllOnes,
        DCondition::OverlapAndExclusiveSupport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DCondition::NontrivialRows => "nontrivial-rows",
            DCondition::CoversAllColumns => "covers-all-columns",
            DCondition::PairwiseEvenOverlap => "pairwise-even-overlap",
            DCondition::SpanExcludesAllOnes => "span-excludes-all-ones",
            DCondition::OverlapAndExclusiveSupport => "overlap-and-exclusive-support",
            DCondition::EvenWeightRows => "even-weight-rows",
        }
    }

    pub fn holds(self, rows: &[u64], u: usize) -> bool {
        let all = (1u64 << u) - 1;
        let pairs = || (0..rows.len()).flat_map(move |a| (a + 1..rows.len()).map(move |b| (rows[a], rows[b])));
        match self {
            DCondition::NontrivialRows => rows.iter().all(|&r| r != 0),
            DCondition::CoversAllColumns => rows.iter().fold(0, |acc, r| acc | r) == all,
            DCondition::PairwiseEvenOverlap => pairs().all(|(a, b)| (a & b).count_ones() % 2 == 0),
            DCondition::SpanExcludesAllOnes => (1u64..1 << rows.len())
                .all(|s| (0..rows.len()).filter(|i| s >> i & 1 == 1).fold(0, |acc, i| acc ^ rows[i]) != all),
            DCondition::OverlapAndExclusiveSupport => pairs()
                .all(|(a, b)| (a & b).count_ones() >= 2 && (a & !b).count_ones() >= 2 && (b & !a).count_ones() >= 2),
            DCondition::EvenWeightRows => rows.iter().all(|r| r.count_ones() % 2 == 0),
        }
    }
}

/// The `D` block from the 14-qubit construction.
pub fn reference_d() -> GF2Matrix {
    GF2Matrix::from_strings(&["111100", "110011"]).expect("valid")
}

struct Variant {
    name: &'static str,
    conditions: Vec<DCondition>,
    min_width: Option<usize>,
    counts: Vec<u64>,
    witness: Option<(usize, Vec<u64>)>,
}

/// Exhaustive search over `D` blocks with 2..=4 distinct rows and width up to
/// `u_max`. The primary result uses the stated conditions; the certificate also
/// reports the minimal width with the overlap/exclusive-support condition dropped
/// and with the even-row-weight condition added.
pub fn verify_d_lemma(u_max: usize) -> Result<SearchCertificate, TriorthoError> {
    if u_max == 0 || u_max > D_LEMMA_MAX_WIDTH {
        return Err(TriorthoError::Bounds(format!("u_max must be in 1..={D_LEMMA_MAX_WIDTH}, got {u_max}")));
    }
    let without_e: Vec<DCondition> =
        DCondition::STATED.iter().copied().filter(|c| *c != DCondition::OverlapAndExclusiveSupport).collect();
    let with_even = |mut v: Vec<DCondition>| {
        v.push(DCondition::EvenWeightRows);
        v
    };
    let mut variants = vec![
        Variant::new("stated", DCondition::STATED.to_vec()),
        Variant::new("stated-without-overlap-support", without_e.clone()),
        Variant::new("stated-plus-even-rows", with_even(DCondition::STATED.to_vec())),
        Variant::new("without-overlap-support-plus-even-rows", with_even(without_e)),
    ];

    let mut nodes = 0u64;
    for u in 1..=u_max {
        for v in &mut variants {
            v.counts.push(0);
        }
        for rows in MIN_ROWS..=MAX_ROWS {
            let mut stack = Vec::with_capacity(rows);
            enumerate_rows(u, rows, 1, &mut stack, &mut nodes, &mut |cand| {
                for v in variants.iter_mut() {
                    if v.conditions.iter().all(|c| c.holds(cand, u)) {
                        *v.counts.last_mut().expect("pushed") += 1;
                        if v.witness.is_none() {
                            v.witness = Some((u, cand.to_vec()));
                            v.min_width = Some(u);
                        }
                    }
                }
            });
        }
    }

    let stated = &variants[0];
    let result = match &stated.witness {
        Some((u, rows)) => SearchResult::Witness { matrix: GF2Matrix::new(*u, rows.clone())? },
        None => SearchResult::NoneFound,
    };
    let mut details = BTreeMap::new();
    if let SearchResult::Witness { matrix } = &result {
        details.insert(
            "witness_equivalent_to_reference_d".into(),
            json!(matrix.equivalent_up_to_permutations(&reference_d())),
        );
    }
    details.insert(
        "variants".into(),
        json!(variants
            .iter()
            .map(|v| json!({
                "name": v.name,
                "conditions": v.conditions,
                "min_width": v.min_width,
                "count_by_width": v.counts,
            }))
            .collect::<Vec<_>>()),
    );
    details.insert(
        "overlap_support_condition_changes_min_width".into(),
        json!(variants[0].min_width != variants[1].min_width),
    );
    details.insert(
        "overlap_support_condition_changes_min_width_given_even_rows".into(),
        json!(variants[2].min_width != variants[3].min_width),
    );

    Ok(SearchCertificate {
        search: "d-lemma".into(),
        n_range: [1, u_max],
        m_range: [MIN_ROWS, MAX_ROWS],
        constraints: DCondition::STATED.iter().map(|c| c.name().to_string()).collect(),
        symmetry_reductions: vec!["rows distinct and in increasing order (row permutations)".into()],
        nodes,
        result,
        details,
    })
}

impl Variant {
    fn new(name: &'static str, conditions: Vec<DCondition>) -> Self {
        Variant { name, conditions, min_width: None, counts: Vec::new(), witness: None }
    }
}

// Pairwise even overlap is shared by every variant, so it prunes the enumeration.
fn enumerate_rows(
    u: usize,
    rows: usize,
    start: u64,
    stack: &mut Vec<u64>,
    nodes: &mut u64,
    visit: &mut impl FnMut(&[u64]),
) {
    if stack.len() == rows {
        visit(stack);
        return;
    }
    for r in start..1 << u {
        *nodes += 1;
        if stack.iter().any(|&s| (s & r).count_ones() % 2 == 1) {
            continue;
        }
        stack.push(r);
        enumerate_rows(u, rows, r + 1, stack, nodes, visit);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_d_satisfies_every_condition() {
        let d = reference_d();
        for c in DCondition::STATED.iter().chain([&DCondition::EvenWeightRows]) {
            assert!(c.holds(d.rows(), 6), "{c:?}");
        }
    }

    #[test]
    fn condition_counterexamples() {
        // span contains 1111
        assert!(!DCondition::SpanExcludesAllOnes.holds(&[0b0011, 0b1100], 4));
        assert!(!DCondition::CoversAllColumns.holds(&[0b0011, 0b0110], 4));
        assert!(!DCondition::PairwiseEvenOverlap.holds(&[0b011, 0b110], 3));
        assert!(!DCondition::OverlapAndExclusiveSupport.holds(&[0b0111, 0b1110], 4));
    }

    #[test]
    fn width_five_has_no_valid_d() {
        let cert = verify_d_lemma(5).unwrap();
        assert!(cert.is_none_found());
    }

    #[test]
    fn width_six_witness_is_reference_d() {
        let cert = verify_d_lemma(6).unwrap();
        let w = cert.witness().expect("witness");
        assert_eq!(w.num_cols(), 6);
        assert!(w.equivalent_up_to_permutations(&reference_d()));
        assert_eq!(cert.details["witness_equivalent_to_reference_d"], json!(true));
    }

    #[test]
    fn bounds() {
        assert!(verify_d_lemma(0).is_err());
        assert!(verify_d_lemma(9).is_err());
    }
}
